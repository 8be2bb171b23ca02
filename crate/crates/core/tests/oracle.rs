use hpfmm::engine::{ChargeSystem, PotentialVector, Targets};
use hpfmm::oracle::{compare, direct_reaction, direct_total};
use hpfmm::specfun::{g_half_plane, g_reaction, g_reaction_closed};
use hpfmm::{BoundaryKind, Cplx64, Impedance, Impedance64, Point64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [BoundaryKind; 3] = [BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Robin];

fn system(r: &mut ChaCha8Rng, n: usize) -> ChargeSystem<f64> {
    let pos = (0..n).map(|_| Point64::new(r.gen_range(-1.0..1.0), r.gen_range(0.05..1.0))).collect();
    let q = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    ChargeSystem::new(pos, q).unwrap()
}

fn points(r: &mut ChaCha8Rng, n: usize) -> Vec<Point64> {
    (0..n).map(|_| Point64::new(r.gen_range(-1.5..1.5), r.gen_range(0.0..1.5))).collect()
}

fn lossy() -> Impedance64 {
    Impedance::new(1.3, 0.6).unwrap()
}

#[test]
fn reversed_accumulation_agrees() {
    let mut r = ChaCha8Rng::seed_from_u64(31);
    let sys = system(&mut r, 100);
    for kind in KINDS {
        for z in [Impedance::lossless(1.0).unwrap(), lossy()] {
            let got = direct_total(&sys, &Targets::Sources, kind, z).unwrap();
            let pos = sys.positions();
            let by_term: Vec<Cplx64> = (0..pos.len())
                .map(|i| {
                    (0..pos.len())
                        .rev()
                        .filter(|&j| j != i)
                        .map(|j| g_half_plane(pos[i], pos[j], kind, z).unwrap() * sys.charges()[j])
                        .fold(Cplx64::new(0.0, 0.0), |a, b| a + b)
                        // The self pair keeps its image and reaction parts.
                        + self_pair(pos[i], kind, z) * sys.charges()[i]
                })
                .collect();
            let rep = compare(&got, &PotentialVector { values: by_term }).unwrap();
            assert!(rep.max_abs_err < 1e-12, "{kind:?}: {}", rep.max_abs_err);
        }
    }
}

/// `G` at `r = r'` without the singular free-space term.
fn self_pair(p: Point64, kind: BoundaryKind, z: Impedance64) -> Cplx64 {
    let image = -(2.0 * p.y).ln() / std::f64::consts::TAU;
    match kind {
        BoundaryKind::Dirichlet => Cplx64::new(-image, 0.0),
        BoundaryKind::Neumann => Cplx64::new(image, 0.0),
        BoundaryKind::Robin => g_reaction_closed(p, p, z).unwrap() - image,
    }
}

#[test]
fn closed_and_quadrature_kernels_agree() {
    let mut r = ChaCha8Rng::seed_from_u64(32);
    let sys = system(&mut r, 40);
    let tg = points(&mut r, 30);
    for z in [Impedance::lossless(1.0).unwrap(), lossy(), Impedance::lossless(3.0).unwrap()] {
        let closed = direct_reaction(&tg, &sys, z).unwrap();
        let quad: Vec<Cplx64> = tg
            .iter()
            .map(|&t| {
                sys.positions().iter().zip(sys.charges()).map(|(&s, &q)| g_reaction(t, s, z).unwrap() * q).sum()
            })
            .collect();
        let rep = compare(&closed, &PotentialVector { values: quad }).unwrap();
        assert!(rep.max_rel_err < 1e-10, "{:?}: {}", z, rep.max_rel_err);
    }
}

#[test]
fn reaction_sum_is_even_in_x() {
    let mut r = ChaCha8Rng::seed_from_u64(33);
    let sys = system(&mut r, 60);
    let tg = points(&mut r, 40);
    let flip = |v: &[Point64]| v.iter().map(|p| Point64::new(-p.x, p.y)).collect::<Vec<_>>();
    let mirrored = ChargeSystem::new(flip(sys.positions()), sys.charges().to_vec()).unwrap();
    for z in [Impedance::lossless(1.0).unwrap(), lossy()] {
        let a = direct_reaction(&tg, &sys, z).unwrap();
        let b = direct_reaction(&flip(&tg), &mirrored, z).unwrap();
        assert!(compare(&a, &b).unwrap().max_rel_err < 1e-13);
    }
}

#[test]
fn total_is_linear_in_the_charges() {
    let mut r = ChaCha8Rng::seed_from_u64(34);
    let a = system(&mut r, 50);
    let qb: Vec<f64> = (0..50).map(|_| r.gen_range(-1.0..1.0)).collect();
    let b = ChargeSystem::new(a.positions().to_vec(), qb.clone()).unwrap();
    let (s, t) = (0.75, -2.5);
    let mix: Vec<f64> = a.charges().iter().zip(&qb).map(|(x, y)| s * x + t * y).collect();
    let ab = ChargeSystem::new(a.positions().to_vec(), mix).unwrap();
    let tg = Targets::Points(points(&mut r, 25));
    for kind in KINDS {
        let z = lossy();
        let va = direct_total(&a, &tg, kind, z).unwrap();
        let vb = direct_total(&b, &tg, kind, z).unwrap();
        let vab = direct_total(&ab, &tg, kind, z).unwrap();
        let lin = PotentialVector { values: va.values.iter().zip(&vb.values).map(|(x, y)| x * s + y * t).collect() };
        assert!(compare(&lin, &vab).unwrap().max_rel_err < 1e-13, "{kind:?}");
    }
}

#[test]
fn dirichlet_total_vanishes_on_the_axis() {
    let mut r = ChaCha8Rng::seed_from_u64(35);
    let sys = system(&mut r, 80);
    let axis: Vec<Point64> = (0..20).map(|i| Point64::new(-1.5 + 0.15 * i as f64, 0.0)).collect();
    let v = direct_total(&sys, &Targets::Points(axis), BoundaryKind::Dirichlet, lossy()).unwrap();
    assert!(v.values.iter().all(|c| c.norm() < 1e-13));
}

#[test]
fn compare_matches_a_plain_scan() {
    let mut r = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..200 {
        let n = r.gen_range(1..40);
        let b: Vec<Cplx64> = (0..n).map(|_| Cplx64::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0))).collect();
        let a: Vec<Cplx64> =
            b.iter().map(|v| v + Cplx64::new(r.gen_range(-1e-3..1e-3), r.gen_range(-1e-3..1e-3))).collect();
        let errs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).collect();
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rep = compare(&PotentialVector { values: a }, &PotentialVector { values: b }).unwrap();
        assert_eq!(rep.max_abs_err, worst);
        assert_eq!(errs[rep.argmax_index], worst);
        assert_eq!(rep.max_rel_err, worst / scale);
        assert_eq!(rep.n_pairs, n);
    }
    let short = PotentialVector { values: vec![Cplx64::new(1.0, 0.0)] };
    assert!(compare(&short, &PotentialVector { values: vec![] }).is_err());
}
