//! Charge systems and target sets used by the commands.

use std::f64::consts::TAU;

use anyhow::Result;
use hpfmm::engine::ChargeSystem;
use hpfmm::{ChargeSystem64, Point64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator behind every random run.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` charges uniform in `[-1, 1)` at points uniform in
/// `[x0, x1) x [max(y0, y_min), y1)`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, domain: [f64; 4], y_min: f64) -> Result<ChargeSystem64> {
    let [x0, x1, y0, y1] = domain;
    let ylo = y0.max(y_min);
    let mut pos = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for _ in 0..n {
        pos.push(Point64::new(rng.gen_range(x0..x1), rng.gen_range(ylo..y1)));
        q.push(rng.gen_range(-1.0..1.0));
    }
    Ok(ChargeSystem::new(pos, q)?)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, domain: [f64; 4]) -> Vec<Point64> {
    let [x0, x1, y0, y1] = domain;
    (0..n).map(|_| Point64::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1))).collect()
}

/// Centers of the eight unit circles.
pub fn circle_centers() -> [Point64; 8] {
    let mut c = [Point64::default(); 8];
    for n in 0..4 {
        let x = -3.3 + 2.2 * n as f64;
        c[2 * n] = Point64::new(x, 1.01);
        c[2 * n + 1] = Point64::new(x, 3.2);
    }
    c
}

/// Segment midpoints of the eight circles, `per_circle` each, carrying
/// `density * 2 pi / per_circle`.
pub fn circles(per_circle: usize, density: f64) -> Result<ChargeSystem64> {
    let q = density * TAU / per_circle as f64;
    let mut pos = Vec::with_capacity(8 * per_circle);
    for c in circle_centers() {
        for j in 0..per_circle {
            let t = TAU * (j as f64 + 0.5) / per_circle as f64;
            pos.push(Point64::new(c.x + t.cos(), c.y + t.sin()));
        }
    }
    let n = pos.len();
    Ok(ChargeSystem::new(pos, vec![q; n])?)
}

/// Uniform `nx x ny` mesh over the domain including its edges, row-major
/// in `y` then `x`.
pub fn grid(domain: [f64; 4], nx: usize, ny: usize) -> Vec<Point64> {
    let [x0, x1, y0, y1] = domain;
    let at = |a: f64, b: f64, k: usize, n: usize| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (n - 1) as f64 };
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            pts.push(Point64::new(at(x0, x1, i, nx), at(y0, y1, j, ny)));
        }
    }
    pts
}
