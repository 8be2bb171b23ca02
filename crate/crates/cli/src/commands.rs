use std::time::Instant;

use anyhow::{bail, Result};
use hpfmm::engine::{free_space_fmm, half_plane_fmm, half_plane_fmm_timed, FmmParams, Targets};
use hpfmm::expansions::{chain_bound, eval_le, eval_me, l2l, le_bound, m2l, m2m, me_bound, s2l, s2m, SourceCluster};
use hpfmm::oracle::{compare, direct_total};
use hpfmm::specfun::i0;
use hpfmm::{Impedance64, Point64};
use rand::seq::index::sample;

use crate::config::{Components, Mode, RunConfig};
use crate::csv::{fmt_num, Table};
use crate::systems::{circles, grid, random_points, random_system, rng};

/// Outcome of one command.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub mode: Mode,
    pub config_echo: String,
    pub table: Table,
    pub wall_s: f64,
    pub pass: bool,
    pub summary: String,
}

impl RunReport {
    /// Config echo followed by the summary as comments; parses as a config.
    pub fn render(&self) -> String {
        format!(
            "{}# wall_s = {}\n# pass = {}\n# {}\n",
            self.config_echo,
            fmt_num(self.wall_s),
            self.pass,
            self.summary
        )
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let clock = Instant::now();
    let (table, pass, summary) = match cfg.mode {
        Mode::Validate => validate(cfg)?,
        Mode::Convergence => convergence(cfg)?,
        Mode::Scaling => scaling(cfg)?,
        Mode::Field => field(cfg)?,
    };
    Ok(RunReport {
        mode: cfg.mode,
        config_echo: cfg.echo(),
        table,
        wall_s: clock.elapsed().as_secs_f64(),
        pass,
        summary,
    })
}

fn params(cfg: &RunConfig) -> Result<FmmParams<f64>> {
    Ok(FmmParams::new(cfg.p, cfg.impedance()?, cfg.boundary)?
        .with_leaf_capacity(cfg.leaf_capacity)
        .with_parallel(cfg.threads != 1))
}

/// Largest system `validate` accepts.
pub const VALIDATE_MAX_N: usize = 10_000;

/// `validate` passes below this relative error, and only from order
/// [`VALIDATE_MIN_ORDER`] on.
pub const VALIDATE_TOL: f64 = 1e-8;
pub const VALIDATE_MIN_ORDER: usize = 20;

type Outcome = (Table, bool, String);

fn validate(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.n_sources > VALIDATE_MAX_N {
        bail!("validate supports at most {VALIDATE_MAX_N} sources, got {}", cfg.n_sources);
    }
    let mut r = rng(cfg.seed);
    let system = random_system(&mut r, cfg.n_sources, cfg.domain, cfg.y_min)?;
    let targets = if cfg.n_targets == 0 {
        Targets::Sources
    } else {
        Targets::Points(random_points(&mut r, cfg.n_targets, cfg.domain))
    };
    let prm = params(cfg)?;
    let clock = Instant::now();
    let fmm = half_plane_fmm(&system, &targets, &prm)?;
    let fmm_s = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    let exact = direct_total(&system, &targets, cfg.boundary, prm.impedance)?;
    let direct_s = clock.elapsed().as_secs_f64();
    let rep = compare(&fmm, &exact)?;

    let tol = VALIDATE_TOL;
    let pass = cfg.p >= VALIDATE_MIN_ORDER && rep.max_rel_err < tol;
    let time = |t: f64| if cfg.timings { fmt_num(t) } else { String::new() };
    let mut table = Table::new(&["n", "p", "max_abs_err", "max_rel_err", "fmm_s", "direct_s"]);
    table.push(vec![
        cfg.n_sources.to_string(),
        cfg.p.to_string(),
        fmt_num(rep.max_abs_err),
        fmt_num(rep.max_rel_err),
        time(fmm_s),
        time(direct_s),
    ]);
    let summary = format!(
        "validate n={} p={} max_rel_err={} tol={} fmm_s={:.3} direct_s={:.3} {}",
        cfg.n_sources,
        cfg.p,
        fmt_num(rep.max_rel_err),
        fmt_num(tol),
        fmm_s,
        direct_s,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok((table, pass, summary))
}

/// Example 1 geometry.
pub mod example1 {
    use hpfmm::Point64;

    pub const TARGET: Point64 = Point64 { x: 0.625, y: 1.25 };
    pub const SOURCE: Point64 = Point64 { x: 0.0, y: 0.375 };
    /// Multipole center and its M2M destination.
    pub const ME_CENTER: Point64 = Point64 { x: 0.031_25, y: -0.468_75 };
    pub const ME_SHIFTED: Point64 = Point64 { x: 0.1875, y: -0.3125 };
    /// M2L destination and the final L2L center.
    pub const LE_TRANSLATED: Point64 = Point64 { x: 0.8125, y: 0.9375 };
    pub const LE_CENTER: Point64 = Point64 { x: 0.656_25, y: 1.093_75 };
}

/// One row of the Example 1 study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub p: usize,
    pub err_me_plus: f64,
    pub err_le_minus: f64,
    pub err_chain_plus: f64,
    pub err_chain_minus: f64,
    pub bound_me: f64,
    pub bound_le: f64,
    pub bound_chain: f64,
    /// Rounding allowance added to every bound.
    pub floor: f64,
}

impl ConvergenceRow {
    pub fn within_bounds(&self) -> bool {
        self.err_me_plus <= self.bound_me + self.floor
            && self.err_le_minus <= self.bound_le + self.floor
            && self.err_chain_plus <= self.bound_chain + self.floor
            && self.err_chain_minus <= self.bound_chain + self.floor
    }
}

/// Errors of the ME and chain for `Phi_2^+` and of the LE and chain for
/// `Phi_2^-` (the same construction on x-negated coordinates and centers).
pub fn convergence_rows(zeps: Impedance64, p_max: usize) -> Result<Vec<ConvergenceRow>> {
    use example1::*;
    let image = SOURCE.image();
    let mirror = |p: Point64| p.mirror_x();
    let plus = i0(TARGET.x - image.x, TARGET.y - image.y, zeps)?;
    let minus = i0(mirror(TARGET).x - mirror(image).x, TARGET.y - image.y, zeps)?;
    let floor = 16.0 * f64::EPSILON * plus.norm().max(minus.norm());
    let one = |p: Point64| SourceCluster::new(vec![p], vec![1.0]);
    let (cl_plus, cl_minus) = (one(image)?, one(mirror(image))?);

    let mut rows = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let me = s2m(&cl_plus, ME_CENTER, p)?;
        let err_me_plus = (eval_me(&me, TARGET, zeps)? - plus).norm();
        let chain = l2l(&m2l(&m2m(&me, ME_SHIFTED), LE_TRANSLATED, zeps)?, LE_CENTER);
        let err_chain_plus = (eval_le(&chain, TARGET) - plus).norm();

        let le = s2l(&cl_minus, mirror(LE_CENTER), p, zeps)?;
        let err_le_minus = (eval_le(&le, mirror(TARGET)) - minus).norm();
        let me_m = s2m(&cl_minus, mirror(ME_CENTER), p)?;
        let chain_m = l2l(&m2l(&m2m(&me_m, mirror(ME_SHIFTED)), mirror(LE_TRANSLATED), zeps)?, mirror(LE_CENTER));
        let err_chain_minus = (eval_le(&chain_m, mirror(TARGET)) - minus).norm();

        rows.push(ConvergenceRow {
            p,
            err_me_plus,
            err_le_minus,
            err_chain_plus,
            err_chain_minus,
            bound_me: me_bound(1.0, zeps, TARGET.dist(ME_CENTER), image.dist(ME_CENTER), p),
            bound_le: le_bound(1.0, zeps, TARGET.dist(LE_CENTER), image.dist(LE_CENTER), p),
            bound_chain: chain_bound(1.0, zeps, TARGET, image, ME_SHIFTED, LE_TRANSLATED, p),
            floor,
        });
    }
    Ok(rows)
}

fn convergence(cfg: &RunConfig) -> Result<Outcome> {
    let rows = convergence_rows(cfg.impedance()?, cfg.p)?;
    let mut table = Table::new(&[
        "p",
        "err_me_plus",
        "err_le_minus",
        "err_chain_plus",
        "err_chain_minus",
        "bound_me",
        "bound_le",
    ]);
    for r in &rows {
        table.push(vec![
            r.p.to_string(),
            fmt_num(r.err_me_plus),
            fmt_num(r.err_le_minus),
            fmt_num(r.err_chain_plus),
            fmt_num(r.err_chain_minus),
            fmt_num(r.bound_me),
            fmt_num(r.bound_le),
        ]);
    }
    let bad: Vec<usize> = rows.iter().filter(|r| !r.within_bounds()).map(|r| r.p).collect();
    let last = rows.last().expect("p_max >= 0 gives a row");
    let summary = format!(
        "convergence p_max={} err_chain_plus={} err_chain_minus={} bound violations at p={:?}",
        cfg.p,
        fmt_num(last.err_chain_plus),
        fmt_num(last.err_chain_minus),
        bad
    );
    Ok((table, bad.is_empty(), summary))
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(n, t)| (n.ln(), t.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Accepted range of the fitted exponent.
pub const EXPONENT_RANGE: (f64, f64) = (0.85, 1.15);

/// Number of targets in each spot check.
pub const SPOT_TARGETS: usize = 100;

fn scaling(cfg: &RunConfig) -> Result<Outcome> {
    let prm = params(cfg)?;
    let mut table = Table::new(&["n", "setup_s", "upward_s", "downward_s", "near_s", "total_s", "spot_rel_err"]);
    let mut fit = Vec::new();
    for k in 0..cfg.rungs.max(1) {
        let n = cfg.n_sources << k;
        let mut r = rng(cfg.seed.wrapping_add(k as u64));
        let system = random_system(&mut r, n, cfg.domain, cfg.y_min)?;
        let mut best: Option<(hpfmm::engine::PotentialVector<f64>, hpfmm::engine::Timings)> = None;
        for _ in 0..cfg.repeats {
            let (v, t) = half_plane_fmm_timed(&system, &Targets::Sources, &prm)?;
            if best.as_ref().is_none_or(|(_, b)| t.total() < b.total()) {
                best = Some((v, t));
            }
        }
        let (values, t) = best.expect("at least one repeat");
        let idx = sample(&mut r, n, SPOT_TARGETS.min(n)).into_vec();
        let exact = direct_total(&system, &Targets::SourceSubset(idx.clone()), cfg.boundary, prm.impedance)?;
        let picked = hpfmm::engine::PotentialVector { values: idx.iter().map(|&i| values.values[i]).collect() };
        let spot = compare(&picked, &exact)?.max_rel_err;
        table.push(vec![
            n.to_string(),
            fmt_num(t.setup),
            fmt_num(t.upward),
            fmt_num(t.downward),
            fmt_num(t.near),
            fmt_num(t.total()),
            fmt_num(spot),
        ]);
        fit.push((n as f64, t.total()));
    }
    let gamma = fit_exponent(&fit);
    let pass = gamma.is_none_or(|g| (EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&g));
    let summary = match gamma {
        Some(g) => format!("scaling rungs={} fitted exponent {:.3}", fit.len(), g),
        None => "scaling single rung, no exponent fit".to_string(),
    };
    Ok((table, pass, summary))
}

fn field(cfg: &RunConfig) -> Result<Outcome> {
    let system = circles(cfg.n_per_circle, cfg.density)?;
    let pts = grid(cfg.domain, cfg.grid[0], cfg.grid[1]);
    let prm = params(cfg)?;
    let targets = Targets::Points(pts.clone());
    let phi = match cfg.components {
        Components::Total => half_plane_fmm(&system, &targets, &prm)?,
        Components::Free => free_space_fmm(&targets, &system, &prm, false)?,
    };
    let mut table = Table::new(&["x", "y", "re_phi", "im_phi"]);
    for (p, v) in pts.iter().zip(&phi.values) {
        table.push(vec![fmt_num(p.x), fmt_num(p.y), fmt_num(v.re), fmt_num(v.im)]);
    }
    let summary = format!("field {} points, {} sources", pts.len(), system.len());
    Ok((table, true, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_fit_recovers_power_law() {
        let pts: Vec<_> = [1e3, 2e3, 4e3, 8e3].iter().map(|&n: &f64| (n, 3e-7 * n.powf(1.07))).collect();
        assert!((fit_exponent(&pts).unwrap() - 1.07).abs() < 1e-12);
        assert!(fit_exponent(&pts[..1]).is_none());
    }

    #[test]
    fn tiny_validate_passes_and_low_order_fails() {
        let tiny = RunConfig::from_text("n_sources = 10\np = 25\n").unwrap();
        assert!(run(&tiny).unwrap().pass);
        let low = RunConfig::from_text("n_sources = 10\np = 19\n").unwrap();
        assert!(!run(&low).unwrap().pass);
    }

    #[test]
    fn p0_row_is_the_single_term_error() {
        let z = Impedance64::lossless(1.0).unwrap();
        let r = convergence_rows(z, 0).unwrap()[0];
        let img = example1::SOURCE.image();
        let direct = i0(example1::TARGET.x, example1::TARGET.y - img.y, z).unwrap();
        let d = example1::TARGET - example1::ME_CENTER;
        let approx = i0(d.x, d.y, z).unwrap();
        assert!((r.err_me_plus - (direct - approx).norm()).abs() < 1e-16);
    }
}
