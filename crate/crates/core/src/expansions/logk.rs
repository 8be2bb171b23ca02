use super::{check_order, powers, Binomial, LocalCoeffs, MultipoleCoeffs, SourceCluster};
use crate::error::{domain, Result};
use crate::{Complex, Point, Real};

pub(crate) mod kernels {
    use super::*;

    /// `out[0] += q`, `out[k] -= q ((z - c)/s)^k / k`.
    pub fn s2m_acc<T: Real>(c: Complex<T>, s: T, z: Complex<T>, q: T, out: &mut [Complex<T>]) {
        out[0] += Complex::new(q, T::zero());
        let u = (z - c) / s;
        let mut v = Complex::new(q, T::zero());
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            v = v * u;
            *o -= v / T::from_usize_lossy(k);
        }
    }

    /// `z0 = c_old - c_new`; `t = z0 / s_new`, `ratio = s_old / s_new`.
    pub fn m2m_acc<T: Real>(
        src: &[Complex<T>],
        t: Complex<T>,
        ratio: T,
        binom: &Binomial<T>,
        tpow: &mut Vec<Complex<T>>,
        out: &mut [Complex<T>],
    ) {
        let p = src.len() - 1;
        powers(t, p, tpow);
        out[0] += src[0];
        let mut rk = [T::one(); super::super::MAX_ORDER + 1];
        for k in 1..=p {
            rk[k] = rk[k - 1] * ratio;
        }
        for l in 1..=p {
            let mut acc = -src[0] * tpow[l] / T::from_usize_lossy(l);
            for k in 1..=l {
                acc += src[k] * rk[k] * tpow[l - k] * binom.get(l - 1, k - 1);
            }
            out[l] += acc;
        }
    }

    /// ME at `c_s` (scale `s`) to LE at `c_t` (scale `S`): `z0 = c_s - c_t`.
    #[allow(clippy::too_many_arguments)]
    pub fn m2l_acc<T: Real>(
        src: &[Complex<T>],
        z0: Complex<T>,
        s: T,
        big_s: T,
        binom: &Binomial<T>,
        upow: &mut Vec<Complex<T>>,
        vpow: &mut Vec<Complex<T>>,
        out: &mut [Complex<T>],
    ) {
        let p = src.len() - 1;
        // u = -s / z0, v = S / z0
        powers(-Complex::new(s, T::zero()) / z0, p, upow);
        powers(Complex::new(big_s, T::zero()) / z0, p, vpow);
        let a0 = src[0];
        let mut b0 = a0 * (-z0).ln();
        for k in 1..=p {
            b0 += src[k] * upow[k];
        }
        out[0] += b0;
        for l in 1..=p {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 1..=p {
                acc += src[k] * upow[k] * binom.get(l + k - 1, k - 1);
            }
            out[l] += (acc - a0 / T::from_usize_lossy(l)) * vpow[l];
        }
    }

    /// `d = (c_new - c_old) / S_old`, `ratio = S_new / S_old`.
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
            for l in m..=p {
                acc += src[l] * dpow[l - m] * binom.get(l, m);
            }
            out[m] += acc * rm;
            rm = rm * ratio;
        }
    }

    /// `out[0] += q log(c - z)`, `out[l] -= q (S / (z - c))^l / l`.
    pub fn s2l_acc<T: Real>(c: Complex<T>, big_s: T, z: Complex<T>, q: T, out: &mut [Complex<T>]) {
        out[0] += (c - z).ln() * q;
        let u = Complex::new(big_s, T::zero()) / (z - c);
        let mut v = Complex::new(q, T::zero());
        for (l, o) in out.iter_mut().enumerate().skip(1) {
            v = v * u;
            *o -= v / T::from_usize_lossy(l);
        }
    }

    /// Complex ME series `a_0 log(z - c) + sum_k a_k (s/(z - c))^k`.
    pub fn eval_me<T: Real>(coeffs: &[Complex<T>], c: Complex<T>, s: T, z: Complex<T>) -> Complex<T> {
        let d = z - c;
        let u = Complex::new(s, T::zero()) / d;
        let tail = coeffs[1..].iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &a| (acc + a) * u);
        coeffs[0] * d.ln() + tail
    }

    /// Complex LE series `sum_l b_l ((z - c)/S)^l`.
    pub fn eval_le<T: Real>(coeffs: &[Complex<T>], c: Complex<T>, big_s: T, z: Complex<T>) -> Complex<T> {
        let u = (z - c) / big_s;
        coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &b| acc * u + b)
    }
}

/// Free-space logarithmic expansion of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum LogExpansion<T> {
    Multipole(MultipoleCoeffs<T>),
    Local(LocalCoeffs<T>),
}

/// Shift or translation applied by [`log_translate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogOp {
    M2M,
    M2L,
    L2L,
}

/// Log-kernel multipole expansion of `cluster` about `center`.
pub fn log_s2m<T: Real>(cluster: &SourceCluster<T>, center: Point<T>, p: usize) -> Result<MultipoleCoeffs<T>> {
    check_order(p)?;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let c = center.to_complex();
    for (pos, q) in cluster.iter() {
        kernels::s2m_acc(c, T::one(), pos.to_complex(), q, &mut coeffs);
    }
    MultipoleCoeffs::from_parts(center, T::one(), cluster.radius_about(center), coeffs)
}

/// Log-kernel local expansion of `cluster` about `center`.
pub fn log_s2l<T: Real>(cluster: &SourceCluster<T>, center: Point<T>, p: usize) -> Result<LocalCoeffs<T>> {
    check_order(p)?;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let c = center.to_complex();
    for (pos, q) in cluster.iter() {
        if pos == center {
            return domain("source coincides with the local center");
        }
        kernels::s2l_acc(c, T::one(), pos.to_complex(), q, &mut coeffs);
    }
    LocalCoeffs::from_parts(center, T::one(), coeffs)
}

pub fn log_m2m<T: Real>(me: &MultipoleCoeffs<T>, new_center: Point<T>) -> MultipoleCoeffs<T> {
    let p = me.order();
    let binom = Binomial::new(p);
    let t = (me.center.to_complex() - new_center.to_complex()) / me.scale;
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let mut buf = Vec::with_capacity(p + 1);
    kernels::m2m_acc(&me.coeffs, t, T::one(), &binom, &mut buf, &mut out);
    MultipoleCoeffs {
        center: new_center,
        scale: me.scale,
        radius: me.radius + me.center.dist(new_center),
        coeffs: out,
    }
}

pub fn log_m2l<T: Real>(me: &MultipoleCoeffs<T>, target_center: Point<T>) -> Result<LocalCoeffs<T>> {
    if me.center == target_center {
        return domain("M2L with coincident centers");
    }
    let p = me.order();
    let binom = Binomial::new(2 * p);
    let z0 = me.center.to_complex() - target_center.to_complex();
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let (mut u, mut v) = (Vec::new(), Vec::new());
    kernels::m2l_acc(&me.coeffs, z0, me.scale, me.scale, &binom, &mut u, &mut v, &mut out);
    LocalCoeffs::from_parts(target_center, me.scale, out)
}

pub fn log_l2l<T: Real>(le: &LocalCoeffs<T>, new_center: Point<T>) -> LocalCoeffs<T> {
    let p = le.order();
    let binom = Binomial::new(p);
    let d = (new_center.to_complex() - le.center.to_complex()) / le.scale;
    let mut out = vec![Complex::new(T::zero(), T::zero()); p + 1];
    let mut buf = Vec::with_capacity(p + 1);
    kernels::l2l_acc(&le.coeffs, d, T::one(), &binom, &mut buf, &mut out);
    LocalCoeffs { center: new_center, scale: le.scale, coeffs: out }
}

/// Apply `op` to `coeffs`, which must be of the matching kind.
pub fn log_translate<T: Real>(op: LogOp, coeffs: &LogExpansion<T>, new_center: Point<T>) -> Result<LogExpansion<T>> {
    match (op, coeffs) {
        (LogOp::M2M, LogExpansion::Multipole(me)) => Ok(LogExpansion::Multipole(log_m2m(me, new_center))),
        (LogOp::M2L, LogExpansion::Multipole(me)) => Ok(LogExpansion::Local(log_m2l(me, new_center)?)),
        (LogOp::L2L, LogExpansion::Local(le)) => Ok(LogExpansion::Local(log_l2l(le, new_center))),
        (op, _) => domain(format!("{op:?} does not apply to this expansion kind")),
    }
}

/// Real potential `-(1/2 pi) Re(series)` at `target`.
pub fn log_eval<T: Real>(coeffs: &LogExpansion<T>, target: Point<T>) -> Result<T> {
    let z = target.to_complex();
    let v = match coeffs {
        LogExpansion::Multipole(me) => {
            if target.dist(me.center) <= me.radius {
                return domain("multipole expansion evaluated inside its source disk");
            }
            kernels::eval_me(&me.coeffs, me.center.to_complex(), me.scale, z)
        }
        LogExpansion::Local(le) => kernels::eval_le(&le.coeffs, le.center.to_complex(), le.scale, z),
    };
    Ok(-v.re / T::TAU())
}
