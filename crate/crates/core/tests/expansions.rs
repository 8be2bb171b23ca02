use hpfmm::expansions::{
    chain_bound, eval_le, eval_me, l2l, le_bound, log_eval, log_m2l, log_s2m, m2l, m2l_with_table, m2m, me_bound, s2l,
    s2m, LogExpansion, SourceCluster,
};
use hpfmm::specfun::i0;
use hpfmm::{Cplx64, Impedance, Impedance64, Point64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{SQRT_2, TAU};

fn p(x: f64, y: f64) -> Point64 {
    Point64::new(x, y)
}

/// Reaction field of `images` (already reflected) at `t`.
fn direct(images: &[Point64], q: &[f64], t: Point64, z: Impedance64) -> Cplx64 {
    images.iter().zip(q).map(|(s, &w)| i0(t.x - s.x, t.y - s.y, z).unwrap() * w).sum()
}

/// Random box of side `d` holding `m` image charges, and its center.
fn random_cluster(r: &mut ChaCha8Rng, d: f64) -> (Point64, SourceCluster<f64>, Vec<Point64>, Vec<f64>) {
    let c = p(r.gen_range(-2.0..2.0), -r.gen_range(0.6 * d..3.0));
    let m = r.gen_range(1..8);
    let pts: Vec<Point64> =
        (0..m).map(|_| p(c.x + r.gen_range(-0.5..0.5) * d, c.y + r.gen_range(-0.5..0.5) * d)).collect();
    let q: Vec<f64> = (0..m).map(|_| r.gen_range(-1.0..1.0)).collect();
    (c, SourceCluster::new(pts.clone(), q.clone()).unwrap(), pts, q)
}

fn impedances() -> [Impedance64; 3] {
    [Impedance::lossless(1.0).unwrap(), Impedance::new(0.4, 0.8).unwrap(), Impedance::new(2.5, 0.0).unwrap()]
}

#[test]
fn me_error_fits_the_bound_with_small_constant() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    let mut fitted: f64 = 0.0;
    for g in 0..100 {
        let z = impedances()[g % 3];
        let d = r.gen_range(0.1..1.0);
        let (c, cl, pts, q) = random_cluster(&mut r, d);
        // Admissible target: half-diagonal ratio at most 0.7, target above y = 0.
        let dist = (SQRT_2 * d / 2.0 / r.gen_range(0.2..0.7)).max(-c.y + 0.1);
        let t = loop {
            let th = r.gen_range(0.0..std::f64::consts::PI);
            let t = p(c.x + dist * th.cos(), c.y + dist * th.sin());
            if t.y > 0.0 {
                break t;
            }
        };
        let exact = direct(&pts, &q, t, z);
        let qs: f64 = q.iter().map(|v| v.abs()).sum();
        for order in 0..=20 {
            let err = (eval_me(&s2m(&cl, c, order).unwrap(), t, z).unwrap() - exact).norm();
            let bound = me_bound(qs, z, dist, SQRT_2 * d / 2.0, order);
            let floor = 64.0 * f64::EPSILON * exact.norm().max(qs);
            if err > floor {
                fitted = fitted.max(err / bound);
            }
        }
    }
    assert!(fitted <= 10.0, "fitted constant {fitted}");
}

#[test]
fn me_decay_rate_follows_q() {
    // A single charge on the box corner makes the source radius equal the
    // half-diagonal, so the error decays at exactly q.
    let z = Impedance::lossless(1.0).unwrap();
    for (d, dist) in [(0.5, 1.0), (0.4, 0.6), (1.0, 1.6)] {
        let c = p(0.0, -1.2);
        let src = p(c.x + d / 2.0, c.y + d / 2.0);
        let cl = SourceCluster::new(vec![src], vec![1.0]).unwrap();
        let t = p(c.x + (src.x - c.x) / (SQRT_2 * d / 2.0) * dist, c.y + (src.y - c.y) / (SQRT_2 * d / 2.0) * dist);
        let exact = direct(&[src], &[1.0], t, z);
        let q = SQRT_2 * d / 2.0 / dist;
        let pts: Vec<(f64, f64)> = (4..=40)
            .map(|o| (o as f64, (eval_me(&s2m(&cl, c, o).unwrap(), t, z).unwrap() - exact).norm()))
            .filter(|&(_, e)| e > 1e-13 * exact.norm())
            .map(|(o, e)| (o, e.ln()))
            .collect();
        assert!(pts.len() >= 5, "too few points above rounding for q = {q}");
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|v| v.0).sum::<f64>() / n, pts.iter().map(|v| v.1).sum::<f64>() / n);
        let slope = pts.iter().map(|v| (v.0 - mx) * (v.1 - my)).sum::<f64>()
            / pts.iter().map(|v| (v.0 - mx).powi(2)).sum::<f64>();
        assert!((slope / q.ln() - 1.0).abs() < 0.15, "q = {q}: slope {slope} vs ln q {}", q.ln());
    }
}

#[test]
fn le_error_fits_the_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(22);
    let mut fitted: f64 = 0.0;
    for g in 0..100 {
        let z = impedances()[g % 3];
        let d = r.gen_range(0.1..1.0);
        let (_, cl, pts, q) = random_cluster(&mut r, d);
        let lc = p(r.gen_range(-2.0..2.0), r.gen_range(0.5..2.0));
        let min_d = pts.iter().map(|s| s.dist(lc)).fold(f64::INFINITY, f64::min);
        let rt = min_d * r.gen_range(0.1..0.7);
        let th = r.gen_range(0.0..TAU);
        let t = p(lc.x + rt * th.cos(), (lc.y + rt * th.sin()).max(1e-3));
        let rt = t.dist(lc);
        let exact = direct(&pts, &q, t, z);
        let qs: f64 = q.iter().map(|v| v.abs()).sum();
        for order in 0..=20 {
            let err = (eval_le(&s2l(&cl, lc, order, z).unwrap(), t) - exact).norm();
            let floor = 64.0 * f64::EPSILON * exact.norm().max(qs);
            if err > floor {
                fitted = fitted.max(err / le_bound(qs, z, rt, min_d, order));
            }
        }
    }
    assert!(fitted <= 10.0, "fitted constant {fitted}");
}

#[test]
fn chain_error_is_within_the_summed_bounds() {
    let z = Impedance::lossless(1.0).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let img = p(r.gen_range(-0.1..0.1), -r.gen_range(0.3..0.5));
        let cm = p(0.0, -0.4);
        let cm2 = p(r.gen_range(-0.15..0.15), -0.35);
        let cl2 = p(r.gen_range(-1.0..1.0), r.gen_range(0.8..1.2));
        let cl = p(cl2.x + r.gen_range(-0.1..0.1), cl2.y + r.gen_range(-0.1..0.1));
        let t = p(cl.x + r.gen_range(-0.1..0.1), cl.y + r.gen_range(-0.1..0.1));
        let cluster = SourceCluster::new(vec![img], vec![1.0]).unwrap();
        let exact = i0(t.x - img.x, t.y - img.y, z).unwrap();
        for order in [2, 5, 10, 15, 20] {
            let le = l2l(&m2l(&m2m(&s2m(&cluster, cm, order).unwrap(), cm2), cl2, z).unwrap(), cl);
            let err = (eval_le(&le, t) - exact).norm();
            let bound = chain_bound(1.0, z, t, img, cm2, cl2, order);
            assert!(err <= bound + 64.0 * f64::EPSILON * exact.norm().max(1.0), "p={order}: {err} > {bound}");
        }
    }
}

#[test]
fn m2l_at_order_25_is_accurate_on_random_pairs() {
    let mut r = ChaCha8Rng::seed_from_u64(24);
    for g in 0..50 {
        let z = impedances()[g % 3];
        let d = 0.5;
        let (c, cl, pts, q) = random_cluster(&mut r, d);
        // Well-separated target box of the same size above the axis.
        let lc = p(c.x + r.gen_range(-1.5..1.5), r.gen_range(0.6..1.5) + (-c.y).max(d));
        let t = p(lc.x + r.gen_range(-0.25..0.25), lc.y + r.gen_range(-0.25..0.25));
        let exact = direct(&pts, &q, t, z);
        let got = eval_le(&m2l(&s2m(&cl, c, 25).unwrap(), lc, z).unwrap(), t);
        let qs: f64 = q.iter().map(|v| v.abs()).sum();
        assert!((got - exact).norm() < 1e-10 * qs.max(exact.norm()), "geometry {g}");
    }
}

#[test]
fn zero_impedance_table_reproduces_the_image_logarithm() {
    let mut r = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..30 {
        let (c, cl, pts, q) = random_cluster(&mut r, 0.4);
        let lc = p(c.x + r.gen_range(-1.0..1.0), 1.0 + r.gen_range(0.0..1.0));
        let (dx, dy) = (lc.x - c.x, lc.y - c.y);
        let zc = Cplx64::new(dx, dy);
        let w = Cplx64::new(dy, -dx);
        let order = 25;
        let table: Vec<Cplx64> = (0..=2 * order)
            .map(|n| {
                if n == 0 {
                    -w.ln() / TAU
                } else {
                    Cplx64::i().powu(n as u32) / (zc.powu(n as u32) * (TAU * n as f64))
                }
            })
            .collect();
        let le = m2l_with_table(&s2m(&cl, c, order).unwrap(), lc, &table).unwrap();
        let t = p(lc.x + 0.1, lc.y - 0.05);
        let exact: f64 = pts.iter().zip(&q).map(|(s, w)| -w * t.dist(*s).ln() / TAU).sum();
        assert!((eval_le(&le, t).re - exact).abs() < 1e-10, "{} vs {exact}", eval_le(&le, t).re);
    }
}

#[test]
fn log_kernel_sign_matches_the_image_term() {
    // Neumann adds the image logarithm with the same sign as the free term.
    let src = p(0.2, 0.5);
    let img = src.image();
    let cl = SourceCluster::new(vec![img], vec![1.0]).unwrap();
    let me = LogExpansion::Multipole(log_s2m(&cl, p(0.2, -0.5), 30).unwrap());
    let t = p(1.5, 1.0);
    assert!((log_eval(&me, t).unwrap() + t.dist(img).ln() / TAU).abs() < 1e-12);
    let LogExpansion::Multipole(inner) = &me else { unreachable!() };
    let le = LogExpansion::Local(log_m2l(inner, p(1.4, 1.1)).unwrap());
    assert!((log_eval(&le, t).unwrap() + t.dist(img).ln() / TAU).abs() < 1e-12);
}
