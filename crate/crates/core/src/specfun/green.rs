use super::ei::{ei_im_sign, ei_scaled, j_direct};
use super::{BoundaryKind, Impedance};
use crate::error::{domain, Error, Result};
use crate::{Complex, Point, Real};

fn check_pair<T: Real>(r: Point<T>, rp: Point<T>) -> Result<()> {
    if !(r.is_finite() && rp.is_finite()) {
        return domain("points must be finite");
    }
    if rp.y <= T::zero() {
        return domain(format!("source must lie in y > 0, got y' = {}", rp.y));
    }
    if r.y < T::zero() {
        return domain(format!("target must lie in y >= 0, got y = {}", r.y));
    }
    Ok(())
}

/// Reaction kernel `G_Z(r, r') = I_0(x - x', y + y') + I_0(x' - x, y + y')`.
pub fn g_reaction<T: Real>(r: Point<T>, rp: Point<T>, zeps: Impedance<T>) -> Result<Complex<T>> {
    check_pair(r, rp)?;
    let (dx, ys) = (r.x - rp.x, r.y + rp.y);
    let z = zeps.value();
    let a = j_direct(0, z * Complex::new(ys, -dx))?;
    let b = j_direct(0, z * Complex::new(ys, dx))?;
    Ok((a + b) / T::TAU())
}

/// Closed form of the reaction kernel through `Ei`:
///
/// ```text
/// -(1/2 pi) [e^{-zeta1} Ei(zeta1) + e^{-zeta2} Ei(zeta2)] + i e^{-Z_eps Y} cos(Z_eps X)
/// ```
///
/// with `X = x - x'`, `Y = y + y'`, `zeta1,2 = Z_eps (Y ∓ i X)`.
///
/// Splitting `Ei(zeta) = e^zeta s(zeta) + i pi sigma` with `sigma = sign(Im zeta)`
/// and the cosine into `(e^{-zeta1} + e^{-zeta2}) / 2` leaves
/// `sum_k [-s(zeta_k) / (2 pi) + (i/2)(1 - sigma_k) e^{-zeta_k}]`, in which the
/// large exponentials of a lossy impedance at wide separation cancel exactly.
pub fn g_reaction_closed<T: Real>(r: Point<T>, rp: Point<T>, zeps: Impedance<T>) -> Result<Complex<T>> {
    check_pair(r, rp)?;
    let (dx, ys) = (r.x - rp.x, r.y + rp.y);
    let z = zeps.value();
    let half_i = Complex::new(T::zero(), T::lit(0.5));
    let mut acc = Complex::new(T::zero(), T::zero());
    for zeta in [z * Complex::new(ys, -dx), z * Complex::new(ys, dx)] {
        acc += half_i * (-zeta).exp() * (T::one() - ei_im_sign(zeta)) - ei_scaled(zeta)? / T::TAU();
    }
    Ok(acc)
}

/// Full half-plane Green's function for the given boundary condition.
///
/// The impedance is only read for [`BoundaryKind::Robin`].
pub fn g_half_plane<T: Real>(
    r: Point<T>,
    rp: Point<T>,
    kind: BoundaryKind,
    zeps: Impedance<T>,
) -> Result<Complex<T>> {
    check_pair(r, rp)?;
    if r == rp {
        return Err(Error::Singularity(format!("target coincides with source at ({}, {})", r.x, r.y)));
    }
    let free = -r.dist(rp).ln() / T::TAU();
    let image = r.dist(rp.image()).ln() / T::TAU();
    let re = |v: T| Complex::new(v, T::zero());
    match kind {
        BoundaryKind::Dirichlet => Ok(re(free + image)),
        BoundaryKind::Neumann => Ok(re(free - image)),
        BoundaryKind::Robin => Ok(re(free + image) + g_reaction(r, rp, zeps)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::{pole_integral, RealPole};

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn imp(z: f64, eps: f64) -> Impedance<f64> {
        Impedance::new(z, eps).unwrap()
    }

    #[test]
    fn symmetric_under_swap_and_reflection() {
        let (r, rp) = (p(0.3, 1.1), p(-0.8, 0.4));
        for z in [imp(1.0, 0.0), imp(2.0, 0.7)] {
            let a = g_reaction(r, rp, z).unwrap();
            assert!((a - g_reaction(rp, r, z).unwrap()).norm() < 1e-15 * a.norm());
            let mirrored = g_reaction(p(-0.8 + (-0.8 - 0.3), 1.1), rp, z).unwrap();
            assert!((a - mirrored).norm() < 1e-13 * a.norm());
        }
    }

    #[test]
    fn closed_form_matches_decomposition() {
        for z in [imp(1.0, 0.3), imp(0.5, 0.0), imp(3.0, 2.0)] {
            for (r, rp) in [(p(0.2, 0.5), p(1.0, 0.3)), (p(-4.0, 2.0), p(3.0, 0.1)), (p(0.0, 0.0), p(0.1, 0.05))] {
                let a = g_reaction(r, rp, z).unwrap();
                let b = g_reaction_closed(r, rp, z).unwrap();
                assert!((a - b).norm() < 1e-11 * a.norm().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn two_sided_quadrature_agrees() {
        // (1/2pi) ∫_R e^{i λ X - |λ| Y}/(|λ| - Z_eps) dλ as two half-line
        // quadratures, each on the real axis.
        let z = imp(1.2, 0.4);
        let (r, rp) = (p(0.5, 0.6), p(-0.1, 0.9));
        let (dx, ys) = (r.x - rp.x, r.y + rp.y);
        let right = pole_integral(Complex::new(ys, -dx), 0, z.value(), 0.0, RealPole::IndentBelow).unwrap();
        let left = pole_integral(Complex::new(ys, dx), 0, z.value(), 0.0, RealPole::IndentBelow).unwrap();
        let q = (right + left) / std::f64::consts::TAU;
        let g = g_reaction(r, rp, z).unwrap();
        assert!((q - g).norm() < 1e-10 * g.norm(), "{q} vs {g}");
    }

    #[test]
    fn lossless_is_limit_of_lossy() {
        let (r, rp) = (p(0.7, 0.2), p(-0.3, 0.5));
        let g0 = g_reaction_closed(r, rp, imp(1.0, 0.0)).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let d = (g_reaction_closed(r, rp, imp(1.0, eps)).unwrap() - g0).norm();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn dirichlet_vanishes_on_boundary() {
        let g = g_half_plane(p(0.4, 0.0), p(-0.2, 0.7), BoundaryKind::Dirichlet, imp(1.0, 0.0)).unwrap();
        assert!(g.norm() < 1e-16);
    }

    #[test]
    fn coincident_points_are_singular() {
        let r = g_half_plane(p(0.1, 0.2), p(0.1, 0.2), BoundaryKind::Robin, imp(1.0, 0.0));
        assert!(matches!(r, Err(Error::Singularity(_))));
        assert!(g_reaction(p(0.0, -0.1), p(0.0, 1.0), imp(1.0, 0.0)).is_err());
    }

    fn dy<F: Fn(Point<f64>) -> Complex<f64>>(f: &F, x: f64, h: f64) -> Complex<f64> {
        (f(p(x, h)) - f(p(x, -h))) / (2.0 * h)
    }

    #[test]
    fn neumann_normal_derivative_vanishes() {
        let rp = p(0.3, 0.8);
        // The log pair extends smoothly below y = 0, so a centred difference works.
        let f = |r: Point<f64>| {
            Complex::new(-(r.dist(rp).ln() + r.dist(rp.image()).ln()) / std::f64::consts::TAU, 0.0)
        };
        for x in [-1.0, 0.0, 0.5, 2.0] {
            assert!(dy(&f, x, 1e-5).norm() < 1e-8);
        }
    }

    #[test]
    fn closed_form_survives_lossy_wide_separation() {
        // e^{-Z_eps Y} cos(Z_eps X) is about 1e10 here while the kernel is
        // about 5e-4. Reference: mpmath at 50 digits on the unsplit formula.
        let z = imp(3.944, 2.788);
        let (r, rp) = (p(9.941, 0.5), p(0.0, 0.38));
        let want = Complex::new(-4.306_330_981_246_013e-4, 2.077_568_703_285_136e-4);
        let closed = g_reaction_closed(r, rp, z).unwrap();
        let split = g_reaction(r, rp, z).unwrap();
        assert!((closed - want).norm() < 1e-12 * want.norm(), "{closed}");
        assert!((split - want).norm() < 1e-12 * want.norm(), "{split}");
    }

    #[test]
    fn robin_boundary_residual() {
        // (d/dn - Z) G = -dG/dy - Z G at y = 0. G_Z is smooth across y = 0 as a
        // function of y + y', so the centred difference uses y = ±h.
        let rp = p(0.3, 0.8);
        let z = imp(1.0, 0.0);
        let f = |r: Point<f64>| {
            let free = -r.dist(rp).ln() / std::f64::consts::TAU;
            let image = r.dist(rp.image()).ln() / std::f64::consts::TAU;
            let reac = if r.y >= 0.0 {
                g_reaction(r, rp, z).unwrap()
            } else {
                g_reaction(p(r.x, 0.0), p(rp.x, rp.y + r.y), z).unwrap()
            };
            Complex::new(free + image, 0.0) + reac
        };
        for x in [-1.5, 0.0, 0.3, 1.0, 4.0] {
            let res = -dy(&f, x, 1e-5) - f(p(x, 0.0)) * z.z();
            assert!(res.norm() < 1e-6, "x={x}: residual {res}");
        }
    }

    #[test]
    fn harmonic_away_from_source() {
        let rp = p(0.0, 1.0);
        let h = 1e-3;
        for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Robin] {
            for r in [p(0.8, 0.5), p(-1.0, 2.0), p(2.5, 0.6)] {
                let g = |q: Point<f64>| g_half_plane(q, rp, kind, imp(1.0, 0.0)).unwrap();
                let lap = g(p(r.x + h, r.y)) + g(p(r.x - h, r.y)) + g(p(r.x, r.y + h)) + g(p(r.x, r.y - h))
                    - g(r) * 4.0;
                assert!((lap / (h * h)).norm() < 1e-4, "{kind} at {r:?}");
            }
        }
    }
}
