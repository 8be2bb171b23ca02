//! `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, unknown keys are rejected. The
//! echo written into every report parses back to an equal [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use hpfmm::BoundaryKind;

use crate::csv::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Validate,
    Convergence,
    Scaling,
    Field,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Validate => "validate",
            Mode::Convergence => "convergence",
            Mode::Scaling => "scaling",
            Mode::Field => "field",
        }
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validate" => Ok(Mode::Validate),
            "convergence" => Ok(Mode::Convergence),
            "scaling" => Ok(Mode::Scaling),
            "field" => Ok(Mode::Field),
            _ => bail!("unknown mode {s:?}"),
        }
    }
}

/// Which potential `field` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Components {
    Free,
    Total,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_sources: usize,
    /// 0 evaluates at the sources themselves.
    pub n_targets: usize,
    /// Truncation order; the largest order for `convergence`.
    pub p: usize,
    pub z: f64,
    pub epsilon: f64,
    pub boundary: BoundaryKind,
    pub seed: u64,
    pub leaf_capacity: usize,
    /// `(x0, x1, y0, y1)`.
    pub domain: [f64; 4],
    pub grid: [usize; 2],
    pub out_path: PathBuf,
    /// 1 runs serially; 0 uses every core.
    pub threads: usize,
    /// Lower y limit for random sources.
    pub y_min: f64,
    pub n_per_circle: usize,
    pub density: f64,
    pub components: Components,
    /// Doubling steps of the scaling ladder.
    pub rungs: usize,
    /// Timed repetitions per rung; the fastest counts.
    pub repeats: usize,
    /// Write wall-clock columns into the CSV.
    pub timings: bool,
}

const KEYS: &[&str] = &[
    "mode",
    "n_sources",
    "n_targets",
    "p",
    "z",
    "epsilon",
    "boundary",
    "seed",
    "leaf_capacity",
    "domain",
    "grid",
    "out_path",
    "threads",
    "y_min",
    "n_per_circle",
    "density",
    "components",
    "rungs",
    "repeats",
    "timings",
];

/// Example 2 region.
pub const FIELD_DOMAIN: [f64; 4] = [-4.4, 4.4, 0.0, 4.2];

/// Raw pairs in file order; later duplicates override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key {k:?}", n + 1);
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(RawConfig(map))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown key {key:?}");
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| anyhow!("bad value {v:?} for {key}: {e}")),
        }
    }

    fn list<T: FromStr + Default + Copy, const N: usize>(&self, key: &str) -> Result<Option<[T; N]>>
    where
        T::Err: fmt::Display,
    {
        let Some(v) = self.0.get(key) else { return Ok(None) };
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        if parts.len() != N {
            bail!("{key} needs {N} comma-separated values, got {v:?}");
        }
        let mut out = [T::default(); N];
        for (o, s) in out.iter_mut().zip(parts) {
            *o = s.parse().map_err(|e| anyhow!("bad value {s:?} in {key}: {e}"))?;
        }
        Ok(Some(out))
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mode: Mode = self.get("mode", Mode::Validate)?;
        let default_domain = if mode == Mode::Field { FIELD_DOMAIN } else { [0.0, 1.0, 0.0, 1.0] };
        let boundary = match self.0.get("boundary").map(String::as_str) {
            None | Some("robin") => BoundaryKind::Robin,
            Some("dirichlet") => BoundaryKind::Dirichlet,
            Some("neumann") => BoundaryKind::Neumann,
            Some(v) => bail!("bad value {v:?} for boundary (dirichlet, neumann, robin)"),
        };
        let components = match self.0.get("components").map(String::as_str) {
            None | Some("total") => Components::Total,
            Some("free") => Components::Free,
            Some(v) => bail!("bad value {v:?} for components (free, total)"),
        };
        let cfg = RunConfig {
            mode,
            n_sources: self.get("n_sources", 1000)?,
            n_targets: self.get("n_targets", 0)?,
            p: self.get("p", 20)?,
            z: self.get("z", 1.0)?,
            epsilon: self.get("epsilon", 0.0)?,
            boundary,
            seed: self.get("seed", 0)?,
            leaf_capacity: self.get("leaf_capacity", 64)?,
            domain: self.list("domain")?.unwrap_or(default_domain),
            grid: self.list("grid")?.unwrap_or([89, 43]),
            out_path: PathBuf::from(self.get("out_path", "out.csv".to_string())?),
            threads: self.get("threads", 1)?,
            y_min: self.get("y_min", 0.01)?,
            n_per_circle: self.get("n_per_circle", 512)?,
            density: self.get("density", 1e-4)?,
            components,
            rungs: self.get("rungs", 4)?,
            repeats: self.get("repeats", 3)?,
            timings: self.get("timings", false)?,
        };
        cfg.check()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        RawConfig::parse(text)?.resolve()
    }

    pub fn load(path: &std::path::Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RawConfig::parse(&text)
    }

    fn check(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.domain;
        if !(self.z.is_finite() && self.z > 0.0) {
            bail!("z must be > 0");
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            bail!("epsilon must be >= 0");
        }
        if !(x0 < x1 && y0 < y1 && y0 >= 0.0 && [x0, x1, y0, y1].iter().all(|v| v.is_finite())) {
            bail!("domain must satisfy x0 < x1, 0 <= y0 < y1");
        }
        if self.grid[0] == 0 || self.grid[1] == 0 {
            bail!("grid must be positive");
        }
        if self.p > hpfmm::expansions::MAX_ORDER {
            bail!("p must be <= {}", hpfmm::expansions::MAX_ORDER);
        }
        if self.leaf_capacity == 0 || self.n_sources == 0 || self.n_per_circle == 0 || self.repeats == 0 {
            bail!("leaf_capacity, n_sources, n_per_circle and repeats must be positive");
        }
        if !(self.y_min.is_finite() && self.y_min > 0.0 && self.y_min < y1) {
            bail!("y_min must lie in (0, y1)");
        }
        if !(self.density.is_finite()) {
            bail!("density must be finite");
        }
        Ok(())
    }

    /// `key = value` lines that parse back to `self`.
    pub fn echo(&self) -> String {
        let b = match self.boundary {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::Robin => "robin",
        };
        let c = match self.components {
            Components::Free => "free",
            Components::Total => "total",
        };
        let d = self.domain.map(fmt_num);
        let lines = [
            ("mode", self.mode.name().to_string()),
            ("n_sources", self.n_sources.to_string()),
            ("n_targets", self.n_targets.to_string()),
            ("p", self.p.to_string()),
            ("z", fmt_num(self.z)),
            ("epsilon", fmt_num(self.epsilon)),
            ("boundary", b.to_string()),
            ("seed", self.seed.to_string()),
            ("leaf_capacity", self.leaf_capacity.to_string()),
            ("domain", d.join(", ")),
            ("grid", format!("{}, {}", self.grid[0], self.grid[1])),
            ("out_path", self.out_path.display().to_string()),
            ("threads", self.threads.to_string()),
            ("y_min", fmt_num(self.y_min)),
            ("n_per_circle", self.n_per_circle.to_string()),
            ("density", fmt_num(self.density)),
            ("components", c.to_string()),
            ("rungs", self.rungs.to_string()),
            ("repeats", self.repeats.to_string()),
            ("timings", self.timings.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn impedance(&self) -> Result<hpfmm::Impedance64> {
        hpfmm::Impedance::new(self.z, self.epsilon).map_err(Into::into)
    }
}
