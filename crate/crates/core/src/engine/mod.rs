//! FMM drivers for the half-plane potential
//!
//! ```text
//! Phi(r_i) = sum_{j != i} Q_j G_free(r_i, r_j) + Phi_1 + Phi_2
//! ```
//!
//! `Phi_1` is the image logarithm (sign set by the boundary kind) and
//! `Phi_2 = Phi_2^+ + Phi_2^-` the Robin reaction term. `Phi_2^+` runs the
//! `I_n` FMM on the images; `Phi_2^-` is the same run on x-negated data.

mod kernel;
mod passes;

use std::time::Instant;

use crate::error::{domain, Result};
use crate::expansions::MAX_ORDER;
use crate::quadtree::{build_tree, build_tree_anchored, Quadtree};
use crate::specfun::{BoundaryKind, Impedance};
use crate::{Complex, Point, Real};

use kernel::{LogKernel, ReactionKernel};
use passes::{run, Problem};

/// Charged particles in the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSystem<T> {
    positions: Vec<Point<T>>,
    charges: Vec<T>,
}

impl<T: Real> ChargeSystem<T> {
    pub fn new(positions: Vec<Point<T>>, charges: Vec<T>) -> Result<Self> {
        if positions.len() != charges.len() {
            return domain(format!("{} positions but {} charges", positions.len(), charges.len()));
        }
        if positions.is_empty() {
            return domain("charge system is empty");
        }
        if let Some(p) = positions.iter().find(|p| !(p.is_finite() && p.y > T::zero())) {
            return domain(format!("sources must be finite with y > 0, got ({}, {})", p.x, p.y));
        }
        if !charges.iter().all(|q| q.is_finite()) {
            return domain("charges must be finite");
        }
        Ok(ChargeSystem { positions, charges })
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub fn charges(&self) -> &[T] {
        &self.charges
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn images(&self) -> Vec<Point<T>> {
        self.positions.iter().map(|p| p.image()).collect()
    }
}

/// Run parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmmParams<T> {
    pub order: usize,
    pub leaf_capacity: usize,
    pub impedance: Impedance<T>,
    pub boundary: BoundaryKind,
    /// Parallel passes over boxes; the result does not depend on it.
    pub parallel: bool,
}

impl<T: Real> FmmParams<T> {
    pub const DEFAULT_LEAF_CAPACITY: usize = 64;

    pub fn new(order: usize, impedance: Impedance<T>, boundary: BoundaryKind) -> Result<Self> {
        let p = FmmParams {
            order,
            leaf_capacity: Self::DEFAULT_LEAF_CAPACITY,
            impedance,
            boundary,
            parallel: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_leaf_capacity(mut self, leaf_capacity: usize) -> Self {
        self.leaf_capacity = leaf_capacity;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return domain(format!("order {} exceeds {MAX_ORDER}", self.order));
        }
        if self.leaf_capacity == 0 {
            return domain("leaf capacity must be at least 1");
        }
        Ok(())
    }
}

/// One complex potential per target.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialVector<T> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> PotentialVector<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs_imag(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.im.abs()))
    }

    fn real(values: Vec<T>) -> Self {
        PotentialVector { values: values.into_iter().map(|v| Complex::new(v, T::zero())).collect() }
    }
}

/// Where the potential is wanted.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets<T> {
    /// At every source; the free-space self term is skipped.
    Sources,
    /// At the listed sources; their own free-space term is skipped.
    SourceSubset(Vec<usize>),
    /// At arbitrary points with `y >= 0`.
    Points(Vec<Point<T>>),
}

impl<T: Real> Targets<T> {
    /// Target coordinates and, for source targets, their source index.
    pub fn resolve(&self, system: &ChargeSystem<T>) -> Result<(Vec<Point<T>>, Option<Vec<usize>>)> {
        match self {
            Targets::Sources => Ok((system.positions.clone(), Some((0..system.len()).collect()))),
            Targets::SourceSubset(idx) => {
                if let Some(&i) = idx.iter().find(|&&i| i >= system.len()) {
                    return domain(format!("target index {i} out of range for {} sources", system.len()));
                }
                Ok((idx.iter().map(|&i| system.positions[i]).collect(), Some(idx.clone())))
            }
            Targets::Points(pts) => {
                check_targets(pts)?;
                Ok((pts.clone(), None))
            }
        }
    }
}

fn check_targets<T: Real>(pts: &[Point<T>]) -> Result<()> {
    if let Some(p) = pts.iter().find(|p| !(p.is_finite() && p.y >= T::zero())) {
        return domain(format!("targets must be finite with y >= 0, got ({}, {})", p.x, p.y));
    }
    Ok(())
}

/// Wall-clock seconds per phase, summed over all component runs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub setup: f64,
    pub upward: f64,
    pub downward: f64,
    pub near: f64,
}

impl Timings {
    pub fn total(&self) -> f64 {
        self.setup + self.upward + self.downward + self.near
    }
}

fn timed_tree<T: Real>(
    anchored: bool,
    targets: &[Point<T>],
    sources: &[Point<T>],
    cap: usize,
    times: &mut Timings,
) -> Result<Quadtree<T>> {
    let clock = Instant::now();
    let tree = if anchored {
        build_tree_anchored(targets, sources, cap)
    } else {
        build_tree(targets, sources, cap)
    };
    times.setup += clock.elapsed().as_secs_f64();
    tree
}

fn reaction_on_tree<T: Real>(
    tree: &Quadtree<T>,
    targets: &[Point<T>],
    images: &[Point<T>],
    charges: &[T],
    params: &FmmParams<T>,
    times: &mut Timings,
) -> Result<Vec<Complex<T>>> {
    let pb = Problem { tree, targets, sources: images, charges, self_src: None, parallel: params.parallel };
    run(&pb, &mut ReactionKernel::new(params.order, params.impedance), times)
}

/// `-(1/2 pi) sum_j Q_j ln|r - r_j|` on a prebuilt tree.
fn log_on_tree<T: Real>(pb: &Problem<'_, T>, order: usize, times: &mut Timings) -> Result<Vec<T>> {
    let phi = run(pb, &mut LogKernel::new(order), times)?;
    Ok(phi.into_iter().map(|v| -v.re / T::TAU()).collect())
}

fn minus_run<T: Real>(
    targets: &[Point<T>],
    system: &ChargeSystem<T>,
    params: &FmmParams<T>,
    times: &mut Timings,
) -> Result<Vec<Complex<T>>> {
    let t: Vec<_> = targets.iter().map(|p| p.mirror_x()).collect();
    let s: Vec<_> = system.positions.iter().map(|p| p.image().mirror_x()).collect();
    let tree = timed_tree(true, &t, &s, params.leaf_capacity, times)?;
    reaction_on_tree(&tree, &t, &s, &system.charges, params, times)
}

/// `Phi_2^+(r_i) = sum_j Q_j I_0(x_i - x_j, y_i + y_j)`.
pub fn reaction_fmm_plus<T: Real>(
    targets: &[Point<T>],
    system: &ChargeSystem<T>,
    params: &FmmParams<T>,
) -> Result<PotentialVector<T>> {
    params.validate()?;
    check_targets(targets)?;
    let mut times = Timings::default();
    let images = system.images();
    let tree = timed_tree(true, targets, &images, params.leaf_capacity, &mut times)?;
    let values = reaction_on_tree(&tree, targets, &images, &system.charges, params, &mut times)?;
    Ok(PotentialVector { values })
}

/// `Phi_2(r_i) = sum_j Q_j G_Z(r_i, r_j)`.
pub fn reaction_fmm<T: Real>(
    targets: &[Point<T>],
    system: &ChargeSystem<T>,
    params: &FmmParams<T>,
) -> Result<PotentialVector<T>> {
    let plus = reaction_fmm_plus(targets, system, params)?;
    let minus = minus_run(targets, system, params, &mut Timings::default())?;
    Ok(PotentialVector { values: plus.values.into_iter().zip(minus).map(|(a, b)| a + b).collect() })
}

/// Free-space potential `-(1/2 pi) sum_j Q_j ln|r_i - r_j|`; with
/// `exclude_self` the term `j = i` is dropped for source targets.
pub fn free_space_fmm<T: Real>(
    targets: &Targets<T>,
    system: &ChargeSystem<T>,
    params: &FmmParams<T>,
    exclude_self: bool,
) -> Result<PotentialVector<T>> {
    params.validate()?;
    let (pts, own) = targets.resolve(system)?;
    let mut times = Timings::default();
    let tree = timed_tree(false, &pts, &system.positions, params.leaf_capacity, &mut times)?;
    let pb = Problem {
        tree: &tree,
        targets: &pts,
        sources: &system.positions,
        charges: &system.charges,
        self_src: own.as_deref().filter(|_| exclude_self),
        parallel: params.parallel,
    };
    Ok(PotentialVector::real(log_on_tree(&pb, params.order, &mut times)?))
}

/// Image term `Phi_1 = (1/2 pi) sum_j Q_j ln|r_i - r_j^im|`.
pub fn image_fmm<T: Real>(
    targets: &Targets<T>,
    system: &ChargeSystem<T>,
    params: &FmmParams<T>,
) -> Result<PotentialVector<T>> {
    params.validate()?;
    let (pts, _) = targets.resolve(system)?;
    let images = system.images();
    let mut times = Timings::default();
    let tree = timed_tree(true, &pts, &images, params.leaf_capacity, &mut times)?;
    let pb = Problem {
        tree: &tree,
        targets: &pts,
        sources: &images,
        charges: &system.charges,
        self_src: None,
        parallel: params.parallel,
    };
    let v = log_on_tree(&pb, params.order, &mut times)?;
    Ok(PotentialVector::real(v.into_iter().map(|x| -x).collect()))
}

/// Total potential for the boundary kind in `params`.
pub fn half_plane_fmm<T: Real>(
    system: &ChargeSystem<T>,
    targets: &Targets<T>,
    params: &FmmParams<T>,
) -> Result<PotentialVector<T>> {
    half_plane_fmm_timed(system, targets, params).map(|(v, _)| v)
}

/// [`half_plane_fmm`] with per-phase timings.
pub fn half_plane_fmm_timed<T: Real>(
    system: &ChargeSystem<T>,
    targets: &Targets<T>,
    params: &FmmParams<T>,
) -> Result<(PotentialVector<T>, Timings)> {
    params.validate()?;
    let (pts, own) = targets.resolve(system)?;
    let mut times = Timings::default();
    let cap = params.leaf_capacity;

    let tree = timed_tree(false, &pts, &system.positions, cap, &mut times)?;
    let pb = Problem {
        tree: &tree,
        targets: &pts,
        sources: &system.positions,
        charges: &system.charges,
        self_src: own.as_deref(),
        parallel: params.parallel,
    };
    let free = log_on_tree(&pb, params.order, &mut times)?;

    let images = system.images();
    let tree = timed_tree(true, &pts, &images, cap, &mut times)?;
    let pb = Problem {
        tree: &tree,
        targets: &pts,
        sources: &images,
        charges: &system.charges,
        self_src: None,
        parallel: params.parallel,
    };
    let image = log_on_tree(&pb, params.order, &mut times)?;

    let combine = |sign: T| -> Vec<Complex<T>> {
        free.iter().zip(&image).map(|(&f, &i)| Complex::new(f - sign * i, T::zero())).collect()
    };
    let values = match params.boundary {
        BoundaryKind::Dirichlet => combine(T::one()),
        BoundaryKind::Neumann => combine(-T::one()),
        BoundaryKind::Robin => {
            let plus = reaction_on_tree(&tree, &pts, &images, &system.charges, params, &mut times)?;
            let minus = minus_run(&pts, system, params, &mut times)?;
            combine(T::one()).into_iter().zip(plus).zip(minus).map(|((v, a), b)| v + a + b).collect()
        }
    };
    Ok((PotentialVector { values }, times))
}
