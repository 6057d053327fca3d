//! Numerical laboratory for the form-factor expansion of the low-temperature
//! 2D Ising susceptibility.
//!
//! The modules follow the computation from primitives upward:
//!
//! * [`spectral`]: `s`, `k`, `γ(z)`, `D(x, y; s)`, the magnetization and the kernel `h`.
//! * [`quadrature`]: certified contour radii and deterministic tensor trapezoid rules.
//! * [`chi`]: the `χ^(n)` contour integrals, the susceptibility partial sums and
//!   the per-lattice-site contour integrals with their lattice summation.
//! * [`formfactor`]: the θ-space form-factor terms of `<σ00 σMN>`.
//! * [`fredholm`]: Nyström evaluation of `M^2 det(I + g_MN)`, used as an oracle.
//! * [`nickel`]: enumeration of Nickel points on the unit circle.
//! * [`hull`]: convex-hull separation and containment certificates.
//! * [`scan`]: `χ^(2)` along rays approaching the unit circle.
//! * [`identities`]: the algebraic identity battery.

pub mod chi;
pub mod correlation;
pub mod error;
pub mod formfactor;
pub mod fredholm;
pub mod hull;
pub mod identities;
pub mod linalg;
pub mod nickel;
pub mod quadrature;
pub mod scan;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use spectral::SpectralPoint;
