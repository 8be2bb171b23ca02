use super::ei::j_direct;
use super::Impedance;
use crate::error::{domain, Result};
use crate::{Complex, Real};

fn check_y<T: Real>(x: T, y: T) -> Result<()> {
    if !(x.is_finite() && y.is_finite()) {
        return domain(format!("I_n arguments must be finite, got ({x}, {y})"));
    }
    if y <= T::zero() {
        return domain(format!("I_n requires y > 0, got y = {y}"));
    }
    Ok(())
}

/// `I_0(x, y)` for `y > 0`.
pub fn i0<T: Real>(x: T, y: T, zeps: Impedance<T>) -> Result<Complex<T>> {
    check_y(x, y)?;
    let zeta = zeps.value() * Complex::new(y, -x);
    debug_assert!(zeta.im != T::zero() || zeta.re > T::zero());
    Ok(j_direct(0, zeta)? / T::TAU())
}

/// `J_0(zeta), ..., J_{n_max}(zeta)` where `J_n = 2 pi w^n I_n`.
///
/// Pivots at `M = min(n_max, floor |zeta|)`: `J_M` is evaluated directly,
/// the recursion runs backward below `M` and forward above it, both
/// directions being contractive there.
pub fn j_sequence<T: Real>(zeta: Complex<T>, n_max: usize) -> Result<Vec<Complex<T>>> {
    let m = zeta.norm().floor().to_usize().unwrap_or(usize::MAX).min(n_max);
    let mut j = vec![Complex::new(T::zero(), T::zero()); n_max + 1];
    j[m] = j_direct(m, zeta)?;
    for n in (1..=m).rev() {
        j[n - 1] = (j[n] * T::from_usize_lossy(n) - T::one()) / zeta;
    }
    for n in m + 1..=n_max {
        let nf = T::from_usize_lossy(n);
        j[n] = (zeta * j[n - 1] + T::one()) / nf;
    }
    if m > 0 {
        j[0] = j_direct(0, zeta)?;
    }
    Ok(j)
}

/// `I_0(x, y), ..., I_{n_max}(x, y)`.
pub fn i_sequence<T: Real>(x: T, y: T, zeps: Impedance<T>, n_max: usize) -> Result<Vec<Complex<T>>> {
    i_sequence_scaled(x, y, zeps, n_max, T::one())
}

/// `I_n(x, y) s^n` for `n = 0..=n_max`; with `s` of the order of `|w|` this
/// stays representable where `I_n` alone would overflow.
pub fn i_sequence_scaled<T: Real>(
    x: T,
    y: T,
    zeps: Impedance<T>,
    n_max: usize,
    scale: T,
) -> Result<Vec<Complex<T>>> {
    check_y(x, y)?;
    if !(scale.is_finite() && scale > T::zero()) {
        return domain(format!("scale must be finite and > 0, got {scale}"));
    }
    let w = Complex::new(y, -x);
    let mut j = j_sequence(zeps.value() * w, n_max)?;
    let ratio = Complex::new(scale, T::zero()) / w;
    let mut pw = Complex::new(T::one() / T::TAU(), T::zero());
    for v in j.iter_mut() {
        *v = *v * pw;
        pw = pw * ratio;
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn imp(z: f64, eps: f64) -> Impedance<f64> {
        Impedance::new(z, eps).unwrap()
    }

    fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn n_max_zero_is_i0() {
        let s = i_sequence(0.4, 0.8, imp(1.0, 0.2), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0], i0(0.4, 0.8, imp(1.0, 0.2)).unwrap());
    }

    #[test]
    fn first_step_of_recursion() {
        let (x, y, z) = (0.1, 0.9, imp(1.0, 0.5));
        let s = i_sequence(x, y, z, 1).unwrap();
        let expect = Complex::new(1.0, 0.0) / (Complex::new(y, -x) * std::f64::consts::TAU) + z.value() * s[0];
        assert!(rel(s[1], expect) < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_y() {
        assert!(i0(0.0, 0.0, imp(1.0, 0.0)).is_err());
        assert!(i_sequence(0.0, -1.0, imp(1.0, 0.0), 3).is_err());
        assert!(i_sequence_scaled(0.0, 1.0, imp(1.0, 0.0), 3, 0.0).is_err());
    }

    // mpmath at 120 digits: J_0 = -e^{-zeta}(Ei(zeta) - i pi), then forward
    // recursion (stable at that precision).
    const J_REF: &[(f64, f64, usize, f64, f64)] = &[
        (50.0, 0.0, 30, -0.060_059_945_788_813_817, 0.002_127_481_698_005_443_8),
        (50.0, 0.0, 60, 0.104_249_940_422_387_53, 0.063_161_318_634_218_52),
        (3.0, -40.0, 25, -125_222_582_863_521.51, -208_900_700_065_831.43),
        (0.05, 0.02, 40, 0.025_032_086_736_792_534, 1.285_431_585_953_678_7e-5),
        (-20.0, 70.0, 60, 0.007_040_901_535_702_949_6, 0.006_149_021_383_089_513_3),
    ];

    #[test]
    fn j_sequence_matches_high_precision() {
        for &(re, im, n, jr, ji) in J_REF {
            let j = j_sequence(Complex::new(re, im), 60).unwrap();
            let want = Complex::new(jr, ji);
            assert!(rel(j[n], want) < 1e-12, "zeta={re}+{im}i n={n}: {} vs {want}", j[n]);
        }
    }

    #[test]
    fn scaled_sequence_is_rescaled_plain_sequence() {
        let z = imp(1.5, 0.1);
        let plain = i_sequence(0.7, 0.3, z, 20).unwrap();
        let scaled = i_sequence_scaled(0.7, 0.3, z, 20, 0.25).unwrap();
        for (n, (a, b)) in plain.iter().zip(&scaled).enumerate() {
            assert!(rel(*a * 0.25f64.powi(n as i32), *b) < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn recursion_identity_holds(x in -10.0f64..10.0, y in 0.05f64..10.0, z in 0.1f64..5.0, eps in 0.0f64..2.0) {
            let zeps = imp(z, eps);
            let s = i_sequence(x, y, zeps, 40).unwrap();
            let w = Complex::new(y, -x);
            let mut wn = Complex::new(1.0, 0.0);
            for n in 1..=40usize {
                wn = wn * w;
                let rhs = Complex::new(1.0, 0.0) / (wn * std::f64::consts::TAU);
                let lhs = s[n] * n as f64 - zeps.value() * s[n - 1];
                let scale = rhs.norm().max((s[n] * n as f64).norm());
                prop_assert!((lhs - rhs).norm() <= 1e-12 * scale, "n={} lhs={} rhs={}", n, lhs, rhs);
            }
        }
    }
}
