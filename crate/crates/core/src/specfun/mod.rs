//! Exponential integral, the `I_n` integral family, the half-plane Green's
//! kernels and the quadrature oracles that check them.
//!
//! Conventions. For a target-minus-image offset `(x, y)` with `y > 0` put
//! `w = y - i x` and `zeta = Z_eps * w`. Then
//!
//! ```text
//! I_n(x, y) = 1/(2 pi n!) ∫_0^∞ e^{-λ w} λ^n / (λ - Z_eps) dλ = J_n(zeta) / (2 pi w^n)
//! J_0(zeta) = -e^{-zeta} (Ei(zeta) - i pi)
//! J_n       = 1/n + (zeta/n) J_{n-1}
//! ```
//!
//! where `Ei` is the principal branch (cut on the negative real axis). The
//! same expression covers the lossy (`eps > 0`) and the lossless
//! limiting-absorption case (`eps = 0`, path indented below `λ = Z`).

mod ei;
mod green;
pub mod quadrature;
mod sequence;

pub use ei::ei_pv;
pub use green::{g_half_plane, g_reaction, g_reaction_closed};
pub use quadrature::sommerfeld_quadrature;
pub use sequence::{i0, i_sequence, i_sequence_scaled, j_sequence};

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::{Complex, Real};

/// Boundary impedance `Z_eps = Z + i eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impedance<T> {
    z: T,
    eps: T,
}

impl<T: Real> Impedance<T> {
    pub fn new(z: T, eps: T) -> Result<Self> {
        if !(z.is_finite() && z > T::zero()) {
            return domain(format!("impedance Z must be finite and > 0, got {z}"));
        }
        if !(eps.is_finite() && eps >= T::zero()) {
            return domain(format!("loss eps must be finite and >= 0, got {eps}"));
        }
        Ok(Impedance { z, eps })
    }

    /// Real impedance, handled by limiting absorption.
    pub fn lossless(z: T) -> Result<Self> {
        Self::new(z, T::zero())
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn is_lossless(&self) -> bool {
        self.eps == T::zero()
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.z, self.eps)
    }
}

/// Boundary condition imposed on `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    Robin,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::Robin => "robin",
        })
    }
}

impl FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryKind::Dirichlet),
            "neumann" => Ok(BoundaryKind::Neumann),
            "robin" => Ok(BoundaryKind::Robin),
            other => domain(format!("unknown boundary kind {other:?}")),
        }
    }
}
