use crate::error::{domain, Error, Result};
use crate::{Complex, Real};

/// Below this modulus the power series is used in every direction.
const SERIES_RADIUS: f64 = 2.0;
/// The series loses about `exp(|z| - Re z)` in relative accuracy; it is
/// used while that loss stays below `exp(SERIES_GAP)`.
const SERIES_GAP: f64 = 2.0;
/// Beyond this modulus the asymptotic series is accurate to rounding.
const ASYMPTOTIC_RADIUS: f64 = 40.0;
const MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Series,
    Asymptotic,
    ContinuedFraction,
}

fn branch<T: Real>(z: Complex<T>) -> Branch {
    let r = z.norm();
    let gap = r - z.re;
    if r <= T::lit(SERIES_RADIUS) || (gap <= T::lit(SERIES_GAP) && r <= T::lit(ASYMPTOTIC_RADIUS)) {
        Branch::Series
    } else if r > T::lit(ASYMPTOTIC_RADIUS) {
        Branch::Asymptotic
    } else {
        Branch::ContinuedFraction
    }
}

fn check_arg<T: Real>(z: Complex<T>) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain(format!("Ei argument must be finite, got {z}"));
    }
    if z.re == T::zero() && z.im == T::zero() {
        return domain("Ei is singular at z = 0");
    }
    if z.im == T::zero() && z.re < T::zero() {
        return domain(format!("Ei argument {z} lies on the branch cut"));
    }
    Ok(())
}

/// `sign(Im z)` with `sign(0) = 0`; `Ei(z) = -E1(-z) + i pi sign(Im z)`.
fn im_sign<T: Real>(z: Complex<T>) -> T {
    if z.im > T::zero() {
        T::one()
    } else if z.im < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Exponential integral `Ei`, principal branch.
///
/// Analytic off the negative real axis and equal to the Cauchy principal
/// value `-PV ∫_{-x}^∞ e^{-t}/t dt` on the positive real axis, so
/// `Ei(conj z) = conj Ei(z)`. Off the axis `Ei(z) = -E1(-z) + i pi sign(Im z)`.
pub fn ei_pv<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_arg(z)?;
    match branch(z) {
        Branch::Series => ei_series(z),
        Branch::Asymptotic => {
            Ok(z.exp() * asymptotic_sum(z) / z + Complex::new(T::zero(), T::PI() * im_sign(z)))
        }
        Branch::ContinuedFraction => {
            let h = e_cf(1, -z)?;
            Ok(-h * z.exp() + Complex::new(T::zero(), T::PI() * im_sign(z)))
        }
    }
}

/// `e^{-z} (Ei(z) - i pi sign(Im z))`, which equals `-e^{-z} E1(-z)`,
/// computed without forming `Ei` where the two parts would cancel.
pub(crate) fn ei_scaled<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_arg(z)?;
    match branch(z) {
        Branch::Series => Ok((-z).exp() * (ei_series(z)? - Complex::new(T::zero(), T::PI() * im_sign(z)))),
        Branch::Asymptotic => Ok(asymptotic_sum(z) / z),
        Branch::ContinuedFraction => Ok(-e_cf(1, -z)?),
    }
}

pub(crate) fn ei_im_sign<T: Real>(z: Complex<T>) -> T {
    im_sign(z)
}

/// `gamma + ln z + sum_k z^k / (k k!)`.
fn ei_series<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let eps = T::epsilon();
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 1..MAX_ITER {
        let kf = T::from_usize_lossy(k);
        term = term * z / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.norm() <= eps * sum.norm() && kf > z.norm() {
            return Ok(sum + z.ln() + T::lit(T::EULER_GAMMA));
        }
    }
    Err(Error::Convergence(format!("Ei power series at {z}")))
}

/// `sum_k k!/z^k`, truncated at the smallest term.
fn asymptotic_sum<T: Real>(z: Complex<T>) -> Complex<T> {
    let eps = T::epsilon();
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    let mut k = 1usize;
    loop {
        let next = term * T::from_usize_lossy(k) / z;
        if next.norm() >= term.norm() || next.norm() <= eps * sum.norm() {
            break;
        }
        sum += next;
        term = next;
        k += 1;
    }
    sum
}

/// Continued fraction for the generalized exponential integral, returning
/// `h = e^{s} E_m(s)` (modified Lentz). Converges for `s` off the negative
/// real axis; slow only when `s` hugs it, which the branch logic avoids.
fn e_cf<T: Real>(m: usize, s: Complex<T>) -> Result<Complex<T>> {
    let tiny = T::min_positive_value().sqrt();
    let eps = T::epsilon();
    let one = Complex::new(T::one(), T::zero());
    let guard = |v: Complex<T>| if v.norm() < tiny { Complex::new(tiny, T::zero()) } else { v };
    let mf = T::from_usize_lossy(m);
    let mut b = s + mf;
    let mut c = one / Complex::new(tiny, T::zero());
    let mut d = one / guard(b);
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = T::from_usize_lossy(i);
        let a = -fi * (mf - T::one() + fi);
        b = b + T::lit(2.0);
        d = one / guard(d * a + b);
        c = guard(b + Complex::new(a, T::zero()) / c);
        let delta = c * d;
        h = h * delta;
        if (delta - one).norm() <= eps {
            return Ok(h);
        }
    }
    Err(Error::Convergence(format!("E_{m} continued fraction at {s}")))
}

/// `J_n(zeta)` evaluated directly (no recursion).
///
/// `J_0 = -e^{-zeta}(Ei(zeta) - i pi)`, but `Ei - i pi` cancels near the
/// negative real axis, so every `n` uses either the convergent series
/// `e^{-zeta}[zeta^n/n! (psi(n+1) - ln zeta + i pi) - sum_{k != n} zeta^k/((k-n) k!)]`
/// or `e^{-zeta} E_{n+1}(-zeta)` plus the pole residue `2 pi i e^{-zeta} zeta^n/n!`
/// when `Im zeta < 0`.
pub(crate) fn j_direct<T: Real>(n: usize, zeta: Complex<T>) -> Result<Complex<T>> {
    check_arg(zeta)?;
    let ipi = Complex::new(T::zero(), T::PI());
    let r = zeta.norm();
    let gap = r - zeta.re;
    // The series sums terms up to e^{|zeta|}; keep that representable.
    let series_limit = T::max_value().ln() * T::lit(0.9);
    if r <= T::lit(SERIES_RADIUS) || gap <= T::lit(SERIES_GAP) {
        if r < series_limit {
            j_series(n, zeta)
        } else {
            Ok(j_asymptotic(n, zeta))
        }
    } else {
        let mut j = e_cf(n + 1, -zeta)?;
        if zeta.im < T::zero() {
            j += ipi * T::lit(2.0) * (-zeta).exp() * power_over_factorial(zeta, n);
        }
        Ok(j)
    }
}

fn j_series<T: Real>(n: usize, zeta: Complex<T>) -> Result<Complex<T>> {
    let eps = T::epsilon();
    let r = zeta.norm();
    let mut psi = -T::lit(T::EULER_GAMMA);
    for k in 1..=n {
        psi += T::one() / T::from_usize_lossy(k);
    }
    let mut term = Complex::new(T::one(), T::zero());
    let mut zn = term;
    let mut sum = Complex::new(T::zero(), T::zero());
    let max_k = n + 3 * (r.to_usize().unwrap_or(MAX_ITER)) + 200;
    let mut k = 0usize;
    loop {
        if k == n {
            zn = term;
        } else {
            let contrib = term / (T::from_usize_lossy(k) - T::from_usize_lossy(n));
            sum += contrib;
            if k > n && T::from_usize_lossy(k) > r && contrib.norm() <= eps * sum.norm() {
                break;
            }
        }
        k += 1;
        if k > max_k {
            return Err(Error::Convergence(format!("J_{n} series at {zeta}")));
        }
        term = term * zeta / T::from_usize_lossy(k);
    }
    let ipi = Complex::new(T::zero(), T::PI());
    let head = zn * (Complex::new(psi, T::zero()) - zeta.ln() + ipi);
    Ok((-zeta).exp() * (head - sum))
}

/// `-(1/zeta) sum_k (n+1)_k / zeta^k` plus the exponentially small pole
/// term; only used for `|zeta| >> n` near the positive real axis.
fn j_asymptotic<T: Real>(n: usize, zeta: Complex<T>) -> Complex<T> {
    let eps = T::epsilon();
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    for k in 1..MAX_ITER {
        let next = term * T::from_usize_lossy(n + k) / zeta;
        if next.norm() >= term.norm() || next.norm() <= eps * sum.norm() {
            break;
        }
        sum += next;
        term = next;
    }
    let pole = Complex::new(T::zero(), T::PI() * (T::one() - im_sign(zeta)));
    -sum / zeta + pole * (-zeta).exp() * power_over_factorial(zeta, n)
}

/// `zeta^n / n!` by incremental products.
fn power_over_factorial<T: Real>(zeta: Complex<T>, n: usize) -> Complex<T> {
    let mut t = Complex::new(T::one(), T::zero());
    for k in 1..=n {
        t = t * zeta / T::from_usize_lossy(k);
    }
    t
}
