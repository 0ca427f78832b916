//! Interaction hypergraphs under the hypergraph stochastic blockmodel:
//! sampling, spectral embedding of interactions, and complete-linkage
//! recovery of interaction types.
//!
//! Node ids are 1-based in every public constructor and accessor that takes
//! or returns a node; matrix rows and interaction indices are 0-based.
#![no_std]

extern crate alloc;

pub mod blockmodel;
pub mod clustering;
pub mod error;
pub mod experiment;
pub mod hypergraph;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use nalgebra;

pub use blockmodel::{mean_matrix, type_matrix, BlockModelSpec, MeanMatrix, TypeMatrix};
pub use error::{Error, Result};
pub use hypergraph::{IncidenceMatrix, InteractionHypergraph};
pub use rng::RngStream;
