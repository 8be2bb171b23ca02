//! Fast multipole summation for the 2-D Laplace Green's function in the upper
//! half-plane `y > 0` with Dirichlet, Neumann or Robin (impedance) boundary
//! conditions on `y = 0`.
//!
//! The Robin Green's function splits into a free-space logarithm, an image
//! logarithm and a reaction part given by a Sommerfeld-type integral. The
//! first two are handled by a classic log-kernel FMM, the reaction part by an
//! FMM built on the integral family `I_n` (see [`specfun`]).
//!
//! All numerics are generic over the real scalar through [`Real`]; the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI and the
//! accuracy targets assume.

pub mod engine;
pub mod error;
pub mod expansions;
pub mod geometry;
pub mod oracle;
pub mod quadtree;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use geometry::Point;
pub use num_complex::Complex;
pub use scalar::Real;
pub use specfun::{BoundaryKind, Impedance};

/// Complex scalar used for every potential and expansion coefficient.
pub type Cplx<T> = Complex<T>;

pub type Cplx64 = Complex<f64>;
pub type Point64 = Point<f64>;
pub type Impedance64 = Impedance<f64>;
pub type MultipoleCoeffs64 = expansions::MultipoleCoeffs<f64>;
pub type LocalCoeffs64 = expansions::LocalCoeffs<f64>;
pub type SourceCluster64 = expansions::SourceCluster<f64>;
pub type Quadtree64 = quadtree::Quadtree<f64>;
pub type ChargeSystem64 = engine::ChargeSystem<f64>;
pub type FmmParams64 = engine::FmmParams<f64>;
pub type PotentialVector64 = engine::PotentialVector<f64>;

pub type Cplx32 = Complex<f32>;
pub type Point32 = Point<f32>;
pub type Impedance32 = Impedance<f32>;
