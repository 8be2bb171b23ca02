//! Brute-force O(N M) sums, the reference for every FMM check.

use rayon::prelude::*;

use crate::engine::{ChargeSystem, PotentialVector, Targets};
use crate::error::{domain, Error, Result};
use crate::specfun::{g_reaction_closed, BoundaryKind, Impedance};
use crate::{Complex, Point, Real};

/// Deviation of a vector from a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport<T> {
    pub max_abs_err: T,
    /// `max_abs_err / max_i |reference_i|`.
    pub max_rel_err: T,
    pub argmax_index: usize,
    pub n_pairs: usize,
}

/// `sum_j Q_j G_Z(r_i, r_j)` through the closed form.
pub fn direct_reaction<T: Real>(
    targets: &[Point<T>],
    system: &ChargeSystem<T>,
    zeps: Impedance<T>,
) -> Result<PotentialVector<T>> {
    let values = targets
        .par_iter()
        .map(|&r| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (&rp, &q) in system.positions().iter().zip(system.charges()) {
                acc += g_reaction_closed(r, rp, zeps)? * q;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialVector { values })
}

/// Full potential `sum_j Q_j G(r_i, r_j)` with the free-space term `j = i`
/// dropped for source targets.
pub fn direct_total<T: Real>(
    system: &ChargeSystem<T>,
    targets: &Targets<T>,
    kind: BoundaryKind,
    zeps: Impedance<T>,
) -> Result<PotentialVector<T>> {
    let (pts, own) = targets.resolve(system)?;
    let values = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let r = pts[i];
            let skip = own.as_ref().map(|o| o[i]);
            let (mut free, mut image) = (T::zero(), T::zero());
            let mut reaction = Complex::new(T::zero(), T::zero());
            for (j, (&rp, &q)) in system.positions().iter().zip(system.charges()).enumerate() {
                if skip != Some(j) {
                    let d = r.dist(rp);
                    if d == T::zero() {
                        return Err(Error::Singularity(format!("target coincides with source {j}")));
                    }
                    free -= q * d.ln();
                }
                image += q * r.dist(rp.image()).ln();
                if kind == BoundaryKind::Robin {
                    reaction += g_reaction_closed(r, rp, zeps)? * q;
                }
            }
            let (free, image) = (free / T::TAU(), image / T::TAU());
            Ok(match kind {
                BoundaryKind::Dirichlet => Complex::new(free + image, T::zero()),
                BoundaryKind::Neumann => Complex::new(free - image, T::zero()),
                BoundaryKind::Robin => reaction + (free + image),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialVector { values })
}

/// Compare `a` against the reference `b`.
pub fn compare<T: Real>(a: &PotentialVector<T>, b: &PotentialVector<T>) -> Result<OracleReport<T>> {
    if a.len() != b.len() {
        return domain(format!("length mismatch: {} vs {}", a.len(), b.len()));
    }
    let mut worst = T::zero();
    let mut arg = 0;
    let mut scale = T::zero();
    for (i, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
        let e = (*x - *y).norm();
        if e > worst {
            worst = e;
            arg = i;
        }
        scale = scale.max(y.norm());
    }
    let rel = if scale > T::zero() { worst / scale } else { worst };
    Ok(OracleReport { max_abs_err: worst, max_rel_err: rel, argmax_index: arg, n_pairs: a.len() })
}
