//! Numerical kernel: standard normal functions, bracketed root finding,
//! adaptive Gauss-Kronrod quadrature and the chi-squared survival function.

mod chisq;
mod normal;
mod quadrature;
mod roots;

pub use chisq::chi_squared_sf;
pub use normal::{norm_cdf, norm_pdf, norm_quantile, norm_sf};
pub use quadrature::{integrate, Quadrature, QuadratureResult};
pub use roots::{find_root, Bracket, DEFAULT_ROOT_TOL};

pub(crate) use normal::{cdf, pdf, quantile, sf};
