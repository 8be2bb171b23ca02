//! Adaptive Gauss–Kronrod quadrature and the integral oracles built on it.
//!
//! These are reference evaluators for tests and the CLI validators; nothing
//! in the FMM hot path calls them.

use super::Impedance;
use crate::error::{domain, Error, Result};
use crate::{Complex, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of panels before giving up.
pub const MAX_PANELS: usize = 20_000;

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: Complex<T>,
    pub error: T,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
    l1: T,
}

fn gk15<T: Real, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> Panel<T> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    let mut l1 = fc.norm() * T::lit(WGK[7]);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let (f1, f2) = (f(mid - dx), f(mid + dx));
        k += (f1 + f2) * T::lit(WGK[i]);
        l1 += (f1.norm() + f2.norm()) * T::lit(WGK[i]);
        if i % 2 == 1 {
            g += (f1 + f2) * T::lit(WG[i / 2]);
        }
    }
    let h = half.abs();
    Panel { a, b, value: k * half, error: (k - g).norm() * h, l1: l1 * h }
}

/// Globally adaptive G7K15 over consecutive intervals `breaks[i]..breaks[i+1]`.
///
/// Stops once the summed error estimate is below `rel_tol` times the
/// integral, or below the rounding floor set by the integral of `|f|`.
pub fn integrate<T, F>(f: F, breaks: &[T], rel_tol: T, max_panels: usize) -> Result<Quad<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    if breaks.len() < 2 {
        return domain("integration needs at least two break points");
    }
    let mut panels: Vec<Panel<T>> = breaks.windows(2).map(|ab| gk15(&f, ab[0], ab[1])).collect();
    let floor = T::epsilon() * T::lit(50.0);
    loop {
        let value = panels.iter().fold(Complex::new(T::zero(), T::zero()), |s, p| s + p.value);
        let error = panels.iter().fold(T::zero(), |s, p| s + p.error);
        let l1 = panels.iter().fold(T::zero(), |s, p| s + p.l1);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Convergence("quadrature produced a non-finite value".into()));
        }
        if error <= rel_tol * value.norm() || error <= floor * l1 {
            return Ok(Quad { value, error });
        }
        if panels.len() >= max_panels {
            return Err(Error::Convergence(format!(
                "adaptive quadrature hit {max_panels} panels with error {error} on value {value}"
            )));
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].error.partial_cmp(&panels[j].error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let m = (p.a + p.b) * T::lit(0.5);
        panels.push(gk15(&f, p.a, m));
        panels.push(gk15(&f, m, p.b));
    }
}

/// How a pole lying exactly on the real integration axis is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealPole {
    /// Cauchy principal value.
    PrincipalValue,
    /// Path passes below the pole (limit of a pole in the upper half plane).
    IndentBelow,
}

fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).fold(T::zero(), |s, k| s + T::from_usize_lossy(k).ln())
}

/// `∫_0^∞ e^{-λ w} λ^n / n! / (λ - p) dλ` along the positive real axis,
/// evaluated on the ray `λ = t e^{i theta}` with the residue of any pole
/// swept over added back.
///
/// Needs `Re(w e^{i theta}) > 0`. A pole on the real axis follows
/// `real_pole`; `PrincipalValue` is only accepted with `theta = 0`.
pub fn pole_integral<T: Real>(
    w: Complex<T>,
    n: usize,
    pole: Complex<T>,
    theta: T,
    real_pole: RealPole,
) -> Result<Complex<T>> {
    let zero = T::zero();
    let u = Complex::new(theta.cos(), theta.sin());
    let decay = (w * u).re;
    if !(decay > zero) {
        return domain(format!("integrand does not decay along ray angle {theta} for w = {w}"));
    }
    if pole.im == zero && real_pole == RealPole::PrincipalValue && theta != zero {
        return domain("principal value needs the unrotated path");
    }
    let q = pole / u;
    let lnf = ln_factorial::<T>(n);
    let nf = T::from_usize_lossy(n);
    let uw = u * w;
    // g(t) = e^{-t u w} (t u)^n / n!
    let g = |t: Complex<T>| -> Complex<T> {
        if n == 0 {
            return (-t * uw).exp();
        }
        if t.re == zero && t.im == zero {
            return Complex::new(zero, zero);
        }
        (-t * uw + (t * u).ln() * nf - lnf).exp()
    };
    let a = q.re;
    let subtract = a > zero && q.im.abs() < a;
    let gq = g(q);

    let mut breaks = vec![zero];
    if a > zero {
        breaks.push(a);
        breaks.push(a + a);
    }
    let env = |t: T| -t * decay + nf * t.ln() - lnf;
    let t_peak = nf / decay;
    let env_peak = if n == 0 { zero } else { env(t_peak) };
    let mut l = (*breaks.last().expect("non-empty")).max(T::one() / decay);
    if l > *breaks.last().expect("non-empty") {
        breaks.push(l);
    }
    while !(l > t_peak && env(l) < env_peak - T::lit(45.0)) {
        l = l + l;
        breaks.push(l);
    }

    let cut = a + a;
    let f = |t: T| -> Complex<T> {
        let tc = Complex::new(t, zero);
        if subtract && t <= cut {
            (g(tc) - gq) / (tc - q)
        } else {
            g(tc) / (tc - q)
        }
    };
    let rel = T::epsilon() * T::lit(500.0);
    let mut value = integrate(f, &breaks, rel, MAX_PANELS)?.value;

    let ipi = Complex::new(zero, T::PI());
    if subtract {
        let ln_minus_q = if q.im == zero {
            let offset = if theta > zero || (theta == zero && real_pole == RealPole::IndentBelow) {
                -ipi
            } else if theta < zero {
                ipi
            } else {
                Complex::new(zero, zero)
            };
            Complex::new(a.ln(), zero) + offset
        } else {
            (-q).ln()
        };
        value += gq * ((Complex::new(cut, zero) - q).ln() - ln_minus_q);
    }

    let above_real = pole.im > zero || (pole.im == zero && real_pole == RealPole::IndentBelow);
    if theta > zero && above_real && q.im < zero {
        value += ipi * T::lit(2.0) * gq;
    } else if theta < zero && !above_real && q.im > zero {
        value -= ipi * T::lit(2.0) * gq;
    }
    Ok(value)
}

fn check_args<T: Real>(x: T, y: T) -> Result<()> {
    if !(x.is_finite() && y.is_finite() && y > T::zero()) {
        return domain(format!("quadrature needs finite x and y > 0, got ({x}, {y})"));
    }
    Ok(())
}

/// `I_n(x, y)` by quadrature of its defining integral.
///
/// The path is rotated onto the ray where `λ w` is real (no oscillation, no
/// cancellation), and the pole residue is added when the rotation sweeps
/// over it. The lossless pole is passed below.
pub fn sommerfeld_quadrature<T: Real>(x: T, y: T, zeps: Impedance<T>, n: usize) -> Result<Complex<T>> {
    check_args(x, y)?;
    let w = Complex::new(y, -x);
    let theta = -w.arg();
    Ok(pole_integral(w, n, zeps.value(), theta, RealPole::IndentBelow)? / T::TAU())
}

/// Same integral taken along the unrotated real axis; only well conditioned
/// for moderate `|x| / y`.
pub fn sommerfeld_quadrature_real_axis<T: Real>(x: T, y: T, zeps: Impedance<T>, n: usize) -> Result<Complex<T>> {
    check_args(x, y)?;
    let w = Complex::new(y, -x);
    Ok(pole_integral(w, n, zeps.value(), T::zero(), RealPole::IndentBelow)? / T::TAU())
}

/// `∫_0^∞ e^{-λ y + i λ x} λ^{n-1} dλ` along the real axis, for `n ≥ 1`.
pub fn power_moment<T: Real>(x: T, y: T, n: usize) -> Result<Complex<T>> {
    check_args(x, y)?;
    if n == 0 {
        return domain("power moment needs n >= 1");
    }
    let w = Complex::new(y, -x);
    let m = n - 1;
    let mf = T::from_usize_lossy(m);
    let env = |t: T| -t * y + mf * t.ln();
    let peak = mf / y;
    let env_peak = if m == 0 { T::zero() } else { env(peak) };
    let mut breaks = vec![T::zero(), T::one() / y];
    let mut l = T::one() / y;
    while !(l > peak && env(l) < env_peak - T::lit(45.0)) {
        l = l + l;
        breaks.push(l);
    }
    let f = |t: T| {
        let e = (-w * t).exp();
        if m == 0 {
            e
        } else {
            e * t.powi(m as i32)
        }
    };
    Ok(integrate(f, &breaks, T::epsilon() * T::lit(500.0), MAX_PANELS)?.value)
}

/// `∫_0^∞ e^{-t} t^n / (t - z) dt`, principal value when `z > 0` is real.
pub fn exp_power_pole<T: Real>(n: usize, z: Complex<T>) -> Result<Complex<T>> {
    if z.re == T::zero() && z.im == T::zero() && n == 0 {
        return domain("integral diverges for n = 0, z = 0");
    }
    let fact = ln_factorial::<T>(n).exp();
    Ok(pole_integral(Complex::new(T::one(), T::zero()), n, z, T::zero(), RealPole::PrincipalValue)? * fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|t: f64| c(t * t, -t), &[0.0, 2.0], 1e-14, 10).unwrap();
        assert!((q.value - c(8.0 / 3.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|t: f64| c((1.0 / t).sin() / t, 0.0), &[1e-9, 1.0], 1e-15, 20);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn principal_value_of_simple_pole() {
        // PV ∫_0^∞ e^{-t}/(t - 1) dt = -e^{-1} Ei(1) (mpmath: -0.69717488323506606876).
        let v = exp_power_pole(0, c(1.0, 0.0)).unwrap();
        assert!((v - c(-0.697_174_883_235_066_1, 0.0)).norm() < 1e-13, "{v}");
    }

    #[test]
    fn rotation_agrees_with_real_axis() {
        let w = c(1.0, -0.6);
        for (p, rp) in [(c(1.0, 0.0), RealPole::IndentBelow), (c(2.0, 0.4), RealPole::IndentBelow), (c(0.3, 1.5), RealPole::IndentBelow)] {
            for n in [0usize, 3, 9] {
                let base = pole_integral(w, n, p, 0.0, rp).unwrap();
                for theta in [-0.9, -0.2, 0.2, 0.5, 1.2] {
                    // Rays far from the decay direction oscillate faster than
                    // they decay and are ill-conditioned.
                    if (w * Complex::from_polar(1.0, theta)).re < 0.5 * w.norm() {
                        continue;
                    }
                    let v = pole_integral(w, n, p, theta, rp).unwrap();
                    assert!((v - base).norm() < 1e-12 * base.norm().max(1.0), "p={p} n={n} theta={theta}: {v} vs {base}");
                }
            }
        }
    }

    #[test]
    fn pole_on_the_ray_is_continuous() {
        let w = c(1.0, -1.0);
        let p = Complex::from_polar(1.3, 0.4);
        let on = pole_integral(w, 2, p, 0.4, RealPole::IndentBelow).unwrap();
        let base = pole_integral(w, 2, p, 0.0, RealPole::IndentBelow).unwrap();
        assert!((on - base).norm() < 1e-12 * base.norm());
    }
}
