//! File formats, the simulation grid, SVG plots and the command-line front
//! end for [`hyperclust_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod grid;
pub mod svg;

pub use error::{Error, Result};
pub use hyperclust_core;
