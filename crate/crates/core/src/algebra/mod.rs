//! Matrix kernels: Kronecker, semi-tensor and Khatri-Rao products, and the
//! construction of structure matrices from logical functions.

pub mod dense;
pub mod logical;
pub mod structure;

pub use dense::{stp_dense, DenseMatrix};
pub use logical::{stp_logical, LogicalMatrix};
pub use structure::{structure_matrix, table1_matrix, transition_structure_matrix};
