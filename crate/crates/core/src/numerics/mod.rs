//! General-purpose numerical kernels: quadrature, root finding, finite
//! differences, line fits and exact parameter arithmetic.

mod diff;
mod exact;
mod fit;
mod quadrature;
mod root;

pub use diff::{central_derivative, fd_step, richardson_derivative};
pub use exact::{bogovskii_gain_exact, decimal_rational, show};
pub use fit::{least_squares, log_log_slope, LineFit};
pub use quadrature::{integrate, QuadratureOptions, QuadratureResult};
pub use root::{brent, expand_bracket, RootOptions};
