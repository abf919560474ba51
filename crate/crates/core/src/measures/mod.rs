//! Dislocation measures: polyline curves, gridded densities and their
//! pairings with test functions.

pub mod curve;
pub mod density;
pub mod io;
pub mod test_fn;

pub use curve::{pair_tensor, pair_tensor_via_density, pair_vector, DislocationCurve};
pub use density::{curl_consistency, kernel_registry, pair_grid, rasterize, rasterize_vector, DensityGrid, DepositionKernel};
pub use io::{format_curves, parse_curves, read_curves, write_curves};
pub use test_fn::{FnTensorTest, FnVectorTest, SupportBox, TensorTestFunction, VectorTestFunction};
