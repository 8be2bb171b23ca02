//! Truncation-error envelopes with the generic constant set to one.
//!
//! The q-ratios use actual source and target radii about each center
//! rather than box half-diagonals; a ratio at or above one yields infinity.

use crate::specfun::Impedance;
use crate::{Point, Real};

fn tail<T: Real>(q: T, p: usize) -> T {
    if !(q < T::one()) {
        return T::infinity();
    }
    q.powi(p as i32 + 1) / (T::from_usize_lossy(p + 1) * (T::one() - q))
}

fn growth<T: Real>(zeps: Impedance<T>, d: T) -> T {
    let zd = zeps.value().norm() * d;
    (zd * zd).max(T::one())
}

/// ME truncation: `Q max{|Z_eps|^2 d^2, 1} q^{p+1} / ((p+1)(1-q))` with
/// `d = |r - c'|` and `q = rho / d`, `rho` the source radius about `c'`.
pub fn me_bound<T: Real>(q_abs: T, zeps: Impedance<T>, dist: T, rho: T, p: usize) -> T {
    q_abs * growth(zeps, dist) * tail(rho / dist, p)
}

/// LE truncation with `q = |r - c| / min_j |r_j^im - c|`.
pub fn le_bound<T: Real>(q_abs: T, zeps: Impedance<T>, target_dist: T, min_source_dist: T, p: usize) -> T {
    q_abs * growth(zeps, min_source_dist) * tail(target_dist / min_source_dist, p)
}

/// Extra M2L truncation term for centers `delta` apart carrying source
/// radius `rho_s` and target radius `rho_t`.
pub fn m2l_extra_bound<T: Real>(q_abs: T, zeps: Impedance<T>, delta: T, rho_s: T, rho_t: T, p: usize) -> T {
    let gap = delta - rho_s - rho_t;
    if !(gap > T::zero()) {
        return T::infinity();
    }
    let q = rho_t / (delta - rho_s);
    let c = growth(zeps, delta) * delta / gap;
    q_abs * c * q.powi(p as i32 + 1) / T::from_usize_lossy(p + 1)
}

/// Envelope for S2M, M2M to `source_center`, M2L to `local_center`, L2L,
/// evaluated at `target` for a single image `image` of charge `q_abs`:
/// ME bound at the shifted center plus the M2L term plus the LE bound at
/// the M2L center.
pub fn chain_bound<T: Real>(
    q_abs: T,
    zeps: Impedance<T>,
    target: Point<T>,
    image: Point<T>,
    source_center: Point<T>,
    local_center: Point<T>,
    p: usize,
) -> T {
    let rho_s = image.dist(source_center);
    let rho_t = target.dist(local_center);
    me_bound(q_abs, zeps, target.dist(source_center), rho_s, p)
        + m2l_extra_bound(q_abs, zeps, source_center.dist(local_center), rho_s, rho_t, p)
        + le_bound(q_abs, zeps, rho_t, image.dist(local_center), p)
}
