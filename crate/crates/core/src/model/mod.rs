//! Network data model: systems, sparsity masks and random ensembles.
mod generate;
mod mask;
mod system;

pub use generate::*;
pub use mask::*;
pub use system::*;
