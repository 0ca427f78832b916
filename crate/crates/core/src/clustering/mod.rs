//! Complete-linkage clustering of embedded interactions and partition
//! scoring.

pub mod ari;
pub mod linkage;
pub mod partition;

pub use ari::{adjusted_rand_index, adjusted_rand_index_labels};
pub use linkage::{complete_linkage, Dendrogram, Merge};
pub use partition::{choose_k_by_gap, cut_at_k, Partition};
