//! Lowest-Landau-level states on toric surfaces deformed by imaginary-time
//! Hamiltonian flow.
//!
//! The crate covers the round sphere and the flat plane, deformed along the
//! flow of `H(x) = x²/2` for imaginary time `s`:
//!
//! * [`geometry`]: symplectic and Kähler potentials, metric, curvature.
//! * [`quadrature`]: log-space adaptive Gauss–Legendre integration.
//! * [`orbitals`]: one-particle norm densities, L² norms and evolution factors.
//! * [`laughlin`]: exact Slater expansion of Laughlin states.
//! * [`density`]: many-body density profiles and their large-`s` limits.
//! * [`cli`]: the file-emitting command-line front end.

pub mod cli;
pub mod density;
pub mod error;
pub mod geometry;
pub mod laughlin;
pub mod orbitals;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{DeformedGeometry, SurfaceKind, SurfaceSpec};
pub use quadrature::{Domain, QuadratureConfig};
