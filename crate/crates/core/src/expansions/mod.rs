//! Multipole and local expansions with their shift and translation
//! operators, for the reaction kernel and for the free-space logarithm.
//!
//! Every expansion carries a `scale` `s` (usually the box size). Stored
//! multipole coefficients are `alpha_n / s^n` and stored local coefficients
//! are `beta_n s^n`, which keeps deep-level expansions inside floating-point
//! range. The plain operators use `s = 1`, so there the stored values are
//! the textbook coefficients.
//!
//! Reaction kernel (image sources `z_j` below the boundary, targets above):
//!
//! ```text
//! ME  sum_n alpha_n I_n(r - c'),        alpha_n = sum_j Q_j (i (c' - z_j))^n
//! LE  sum_n beta_n (c - z)^n,           beta_n  = sum_j Q_j i^{-n} I_n(c - z_j)
//! ```
//!
//! Logarithmic kernel `phi(z) = sum_j Q_j log(z - z_j)`, potential
//! `-(1/2 pi) Re phi`:
//!
//! ```text
//! ME  a_0 log(z - c) + sum_k a_k (z - c)^{-k}
//! LE  sum_l b_l (z - c)^l
//! ```

mod bounds;
mod logk;
mod reaction;

pub use bounds::{chain_bound, le_bound, m2l_extra_bound, me_bound};
pub use logk::{log_eval, log_l2l, log_m2l, log_m2m, log_s2l, log_s2m, log_translate, LogExpansion, LogOp};
pub use reaction::{eval_le, eval_me, l2l, m2l, m2l_with_table, m2m, s2l, s2l_scaled, s2m, s2m_scaled};

pub(crate) use logk::kernels as log_kernels;
pub(crate) use reaction::kernels as reaction_kernels;

use crate::error::{domain, Result};
use crate::{Complex, Point, Real};

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 60;

pub(crate) fn check_order(p: usize) -> Result<()> {
    if p > MAX_ORDER {
        return domain(format!("expansion order {p} exceeds the maximum {MAX_ORDER}"));
    }
    Ok(())
}

fn check_scale<T: Real>(s: T) -> Result<()> {
    if !(s.is_finite() && s > T::zero()) {
        return domain(format!("expansion scale must be finite and > 0, got {s}"));
    }
    Ok(())
}

/// Truncated multipole expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleCoeffs<T> {
    pub(crate) center: Point<T>,
    pub(crate) scale: T,
    /// Radius of a disk about `center` holding every source.
    pub(crate) radius: T,
    pub(crate) coeffs: Vec<Complex<T>>,
}

impl<T: Real> MultipoleCoeffs<T> {
    /// Wraps stored coefficients; `radius` bounds the source distances from
    /// `center`.
    pub fn from_parts(center: Point<T>, scale: T, radius: T, coeffs: Vec<Complex<T>>) -> Result<Self> {
        check_scale(scale)?;
        if coeffs.is_empty() {
            return domain("expansion needs at least one coefficient");
        }
        check_order(coeffs.len() - 1)?;
        if !center.is_finite() {
            return domain("expansion center must be finite");
        }
        Ok(MultipoleCoeffs { center, scale, radius, coeffs })
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Stored (scaled) coefficients.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficients with the scale removed (`alpha_n`).
    pub fn unscaled(&self) -> Vec<Complex<T>> {
        let mut f = T::one();
        self.coeffs
            .iter()
            .map(|&c| {
                let v = c * f;
                f = f * self.scale;
                v
            })
            .collect()
    }
}

/// Truncated local expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCoeffs<T> {
    pub(crate) center: Point<T>,
    pub(crate) scale: T,
    pub(crate) coeffs: Vec<Complex<T>>,
}

impl<T: Real> LocalCoeffs<T> {
    pub fn from_parts(center: Point<T>, scale: T, coeffs: Vec<Complex<T>>) -> Result<Self> {
        check_scale(scale)?;
        if coeffs.is_empty() {
            return domain("expansion needs at least one coefficient");
        }
        check_order(coeffs.len() - 1)?;
        if !center.is_finite() {
            return domain("expansion center must be finite");
        }
        Ok(LocalCoeffs { center, scale, coeffs })
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficients with the scale removed (`beta_n`).
    pub fn unscaled(&self) -> Vec<Complex<T>> {
        let inv = T::one() / self.scale;
        let mut f = T::one();
        self.coeffs
            .iter()
            .map(|&c| {
                let v = c * f;
                f = f * inv;
                v
            })
            .collect()
    }
}

/// Point charges; for the reaction kernel the positions are the images.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCluster<T> {
    positions: Vec<Point<T>>,
    charges: Vec<T>,
}

impl<T: Real> SourceCluster<T> {
    pub fn new(positions: Vec<Point<T>>, charges: Vec<T>) -> Result<Self> {
        if positions.len() != charges.len() {
            return domain(format!("{} positions but {} charges", positions.len(), charges.len()));
        }
        if positions.is_empty() {
            return domain("source cluster is empty");
        }
        if !positions.iter().all(|p| p.is_finite()) || !charges.iter().all(|q| q.is_finite()) {
            return domain("source cluster contains non-finite values");
        }
        Ok(SourceCluster { positions, charges })
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub fn charges(&self) -> &[T] {
        &self.charges
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `sum_j |Q_j|`.
    pub fn total_abs_charge(&self) -> T {
        self.charges.iter().fold(T::zero(), |s, q| s + q.abs())
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (Point<T>, T)> + '_ {
        self.positions.iter().copied().zip(self.charges.iter().copied())
    }

    fn radius_about(&self, c: Point<T>) -> T {
        self.positions.iter().fold(T::zero(), |r, p| r.max(p.dist(c)))
    }
}

/// Pascal's triangle up to row `n`.
#[derive(Debug, Clone)]
pub struct Binomial<T> {
    rows: usize,
    table: Vec<T>,
}

impl<T: Real> Binomial<T> {
    pub fn new(n: usize) -> Self {
        let rows = n + 1;
        let mut table = vec![T::zero(); rows * rows];
        for i in 0..rows {
            table[i * rows] = T::one();
            for k in 1..=i {
                table[i * rows + k] = table[(i - 1) * rows + k - 1] + table[(i - 1) * rows + k];
            }
        }
        Binomial { rows, table }
    }

    /// `C(n, k)`; zero for `k > n`.
    #[inline]
    pub fn get(&self, n: usize, k: usize) -> T {
        self.table[n * self.rows + k]
    }

    pub fn max_n(&self) -> usize {
        self.rows - 1
    }
}

/// Successive powers `1, z, ..., z^n` by repeated multiplication.
pub(crate) fn powers<T: Real>(z: Complex<T>, n: usize, out: &mut Vec<Complex<T>>) {
    out.clear();
    let mut v = Complex::new(T::one(), T::zero());
    for _ in 0..=n {
        out.push(v);
        v = v * z;
    }
}
