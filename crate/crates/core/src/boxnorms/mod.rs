//! Measured product spaces, kernels, the Gowers box norms □²/□³ and the
//! counting forms Λ₃/Λ₄.

mod io;
mod norms;
mod space;

pub use io::{read_kernel_binary, read_kernel_csv, write_kernel_binary, write_kernel_csv, KernelHeader};
pub use norms::{bilinear, box2_norm, box2_pow4, box3_norm, box3_pow8, gowers_inner, lambda3, lambda4};
pub use space::{BoundedMode, Kernel2, Kernel3, MeasuredSpace};
pub(crate) use norms::{row_gram, weighted_pair_sum};
