use super::{check_order, powers, Binomial, LocalCoeffs, MultipoleCoeffs, SourceCluster};
use crate::error::{domain, Result};
use crate::specfun::{i_sequence_scaled, Impedance};
use crate::{Complex, Point, Real};

/// Allocation-free building blocks shared with the engine. All slices hold
/// scaled coefficients; see the module docs for the convention.
pub(crate) mod kernels {
    use super::*;

    /// `i^k`.
    #[inline]
    pub fn i_pow<T: Real>(k: usize) -> Complex<T> {
        let (o, z) = (T::one(), T::zero());
        match k % 4 {
            0 => Complex::new(o, z),
            1 => Complex::new(z, o),
            2 => Complex::new(-o, z),
            _ => Complex::new(z, -o),
        }
    }

    /// `out[n] += q (i (c - z) / s)^n`.
    pub fn s2m_acc<T: Real>(c: Complex<T>, s: T, z: Complex<T>, q: T, out: &mut [Complex<T>]) {
        let u = Complex::new(T::zero(), T::one()) * (c - z) / s;
        let mut v = Complex::new(q, T::zero());
        for o in out.iter_mut() {
            *o += v;
            v = v * u;
        }
    }

    /// Shift a multipole expansion: `d = i (c_new - c_old) / s_new`,
    /// `ratio = s_old / s_new`.
    pub fn m2m_acc<T: Real>(
        src: &[Complex<T>],
        d: Complex<T>,
        ratio: T,
        binom: &Binomial<T>,
        dpow: &mut Vec<Complex<T>>,
        out: &mut [Complex<T>],
    ) {
        let p = src.len() - 1;
        powers(d, p, dpow);
        let mut rm = T::one();
        for m in 0..=p {
            let a = src[m] * rm;
            for n in m..=p {
                out[n] += a * dpow[n - m] * binom.get(n, m);
            }
            rm = rm * ratio;
        }
    }

    /// Translate a multipole into a local expansion; `table[k] = I_k(c_t - c_s) S^k`
    /// for `k = 0..=2p`, `ratio = s / S`.
    pub fn m2l_acc<T: Real>(
        src: &[Complex<T>],
        table: &[Complex<T>],
        ratio: T,
        binom: &Binomial<T>,
        out: &mut [Complex<T>],
    ) {
        let p = src.len() - 1;
        let mut rm = T::one();
        let mut a = [Complex::new(T::zero(), T::zero()); super::super::MAX_ORDER + 1];
        for m in 0..=p {
            a[m] = src[m] * rm;
            rm = rm * ratio;
        }
        for n in 0..=p {
            let mut acc = Complex::new(T::zero(), T::zero());
            for m in 0..=p {
                acc += a[m] * table[n + m] * binom.get(n + m, n);
            }
            // i^{-n} = i^{(4 - n % 4) % 4}
            out[n] += acc * i_pow::<T>((4 - n % 4) % 4);
        }
    }

    /// Shift a local expansion: `d = (c_old - c_new) / S_old`,
    /// `ratio = S_new / S_old`.
    pub fn l2l_acc<T: Real>(
        src: &[Complex<T>],
        d: Complex<T>,
        ratio: T,
        binom: &Binomial<T>,
        dpow: &mut Vec<Complex<T>>,
        out: &mut [Complex<T>],
    ) {
        let p = src.len() - 1;
        powers(d, p, dpow);
        let mut rm = T::one();
        for m in 0..=p {
            let mut acc = Complex::new(T::zero(), T::zero());
            for n in m..=p {
                acc += src[n] * dpow[n - m] * binom.get(n, m);
            }
            out[m] += acc * rm;
            rm = rm * ratio;
        }
    }

    /// `out[n] += q i^{-n} I_n S^n` given `iseq[n] = I_n S^n`.
    pub fn s2l_acc<T: Real>(iseq: &[Complex<T>], q: T, out: &mut [Complex<T>]) {
        for (n, (o, v)) in out.iter_mut().zip(iseq).enumerate() {
            *o += *v * i_pow::<T>((4 - n % 4) % 4) * q;
        }
    }

    /// Horner evaluation of `sum_n c_n u^n`.
    #[inline]
    pub fn horner<T: Real>(coeffs: &[Complex<T>], u: Complex<T>) -> Complex<T> {
        coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * u + c)
    }

    /// `sum_n c_n iseq[n]`.
    #[inline]
    pub fn dot<T: Real>(coeffs: &[Complex<T>], iseq: &[Complex<T>]) -> Complex<T> {
        coeffs.iter().zip(iseq).fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b)
    }
}

use kernels::*;

/// Multipole expansion of the reaction field of `cluster` (image positions)
/// about `center`, truncated at order `p`.
pub fn s2m<T: Real>(cluster: &SourceCluster<T>, center: Point<T>, p: usize) -> Result<MultipoleCoeffs<T>> {
    s2m_scaled(cluster, center, p, T::one())
}

pub fn s2m_scaled<T: Real>(
    cluster: &SourceCluster<T>,
    center: Point<T>,
    p: usize,
    scale: T,
) -> Result<MultipoleCoeffs<T>> {
    check_order(p)?;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let c = center.to_complex();
    for (pos, q) in cluster.iter() {
        s2m_acc(c, scale, pos.to_complex(), q, &mut coeffs);
    }
    MultipoleCoeffs::from_parts(center, scale, cluster.radius_about(center), coeffs)
}

/// Re-expand about `new_center`; exact for the truncated expansion.
pub fn m2m<T: Real>(me: &MultipoleCoeffs<T>, new_center: Point<T>) -> MultipoleCoeffs<T> {
    let p = me.order();
    let binom = Binomial::new(p);
    let d = Complex::new(T::zero(), T::one()) * (new_center.to_complex() - me.center.to_complex()) / me.scale;
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let mut buf = Vec::with_capacity(p + 1);
    m2m_acc(&me.coeffs, d, T::one(), &binom, &mut buf, &mut out);
    MultipoleCoeffs {
        center: new_center,
        scale: me.scale,
        radius: me.radius + me.center.dist(new_center),
        coeffs: out,
    }
}

/// Local expansion about `center` of the reaction field of `cluster`.
pub fn s2l<T: Real>(
    cluster: &SourceCluster<T>,
    center: Point<T>,
    p: usize,
    zeps: Impedance<T>,
) -> Result<LocalCoeffs<T>> {
    s2l_scaled(cluster, center, p, zeps, T::one())
}

pub fn s2l_scaled<T: Real>(
    cluster: &SourceCluster<T>,
    center: Point<T>,
    p: usize,
    zeps: Impedance<T>,
    scale: T,
) -> Result<LocalCoeffs<T>> {
    check_order(p)?;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); p + 1];
    for (pos, q) in cluster.iter() {
        if pos == center {
            return domain(format!("source at ({}, {}) coincides with the local center", pos.x, pos.y));
        }
        let iseq = i_sequence_scaled(center.x - pos.x, center.y - pos.y, zeps, p, scale)?;
        s2l_acc(&iseq, q, &mut coeffs);
    }
    LocalCoeffs::from_parts(center, scale, coeffs)
}

/// Shift a local expansion to `new_center`.
pub fn l2l<T: Real>(le: &LocalCoeffs<T>, new_center: Point<T>) -> LocalCoeffs<T> {
    let p = le.order();
    let binom = Binomial::new(p);
    let d = (le.center.to_complex() - new_center.to_complex()) / le.scale;
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let mut buf = Vec::with_capacity(p + 1);
    l2l_acc(&le.coeffs, d, T::one(), &binom, &mut buf, &mut out);
    LocalCoeffs { center: new_center, scale: le.scale, coeffs: out }
}

/// Translate a multipole expansion into a local expansion about
/// `target_center`, which must lie strictly above the multipole center.
pub fn m2l<T: Real>(
    me: &MultipoleCoeffs<T>,
    target_center: Point<T>,
    zeps: Impedance<T>,
) -> Result<LocalCoeffs<T>> {
    let (dx, dy) = (target_center.x - me.center.x, target_center.y - me.center.y);
    if !(dy > T::zero()) {
        return domain(format!("M2L needs the local center above the multipole center, got dy = {dy}"));
    }
    let p = me.order();
    let table = i_sequence_scaled(dx, dy, zeps, 2 * p, me.scale)?;
    let binom = Binomial::new(2 * p);
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    m2l_acc(&me.coeffs, &table, T::one(), &binom, &mut out);
    LocalCoeffs::from_parts(target_center, me.scale, out)
}

/// M2L with a caller-supplied table `table[k]` standing in for
/// `I_k(c_t - c_s)`, `k = 0..=2p`.
pub fn m2l_with_table<T: Real>(
    me: &MultipoleCoeffs<T>,
    target_center: Point<T>,
    table: &[Complex<T>],
) -> Result<LocalCoeffs<T>> {
    let p = me.order();
    if table.len() < 2 * p + 1 {
        return domain(format!("M2L table needs {} entries, got {}", 2 * p + 1, table.len()));
    }
    let mut scaled = Vec::with_capacity(2 * p + 1);
    let mut f = T::one();
    for v in &table[..=2 * p] {
        scaled.push(*v * f);
        f = f * me.scale;
    }
    let binom = Binomial::new(2 * p);
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    m2l_acc(&me.coeffs, &scaled, T::one(), &binom, &mut out);
    LocalCoeffs::from_parts(target_center, me.scale, out)
}

/// Truncated multipole series at `target`, which must lie above the center.
pub fn eval_me<T: Real>(me: &MultipoleCoeffs<T>, target: Point<T>, zeps: Impedance<T>) -> Result<Complex<T>> {
    let iseq = i_sequence_scaled(target.x - me.center.x, target.y - me.center.y, zeps, me.order(), me.scale)?;
    Ok(dot(&me.coeffs, &iseq))
}

/// Truncated local series at `target`.
pub fn eval_le<T: Real>(le: &LocalCoeffs<T>, target: Point<T>) -> Complex<T> {
    let u = (le.center.to_complex() - target.to_complex()) / le.scale;
    horner(&le.coeffs, u)
}
