//! Deterministic numeric kernel shared by the rest of the crate.

mod linalg;
mod parallel;
mod rng;
mod stats;

pub use linalg::{matmul_square, sym_eigen, Eigen, SymmetricMatrix, MAX_EIGEN_DIM};
pub use parallel::par_map;
pub use rng::RngStream;
pub use stats::{descriptive_stats, mean, percentile_nearest_rank, DescriptiveStats, Histogram};
