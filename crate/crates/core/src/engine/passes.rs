use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;

use super::kernel::Kernel;
use super::Timings;
use crate::error::Result;
use crate::quadtree::Quadtree;
use crate::{Complex, Point, Real};

type C<T> = Complex<T>;

/// Index-ordered map over a box range; identical output in both modes
/// because each box is reduced by a single worker in list order.
fn map_boxes<R, F>(parallel: bool, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if parallel {
        range.into_par_iter().map(f).collect()
    } else {
        range.map(f).collect()
    }
}

pub(crate) struct Problem<'a, T> {
    pub tree: &'a Quadtree<T>,
    pub targets: &'a [Point<T>],
    pub sources: &'a [Point<T>],
    pub charges: &'a [T],
    /// `self_src[i]`: source index to skip for target `i`.
    pub self_src: Option<&'a [usize]>,
    pub parallel: bool,
}

/// Upward pass, downward pass and leaf evaluation of one kernel on one tree.
pub(crate) fn run<T: Real, K: Kernel<T>>(pb: &Problem<'_, T>, kernel: &mut K, times: &mut Timings) -> Result<Vec<C<T>>> {
    let tree = pb.tree;
    let n = tree.boxes.len();
    let p1 = kernel.order() + 1;
    let zero = C::new(T::zero(), T::zero());

    let clock = Instant::now();
    let pairs: Vec<(usize, usize)> = (0..n)
        .filter(|&b| !tree.boxes[b].targets.is_empty())
        .flat_map(|b| {
            tree.boxes[b]
                .interaction
                .iter()
                .filter(|&&s| !tree.boxes[s].sources.is_empty())
                .map(move |&s| (b, s))
        })
        .collect();
    kernel.prepare(tree, &pairs)?;
    times.setup += clock.elapsed().as_secs_f64();
    let kernel = &*kernel;

    let clock = Instant::now();
    let mut me: Vec<Option<Vec<C<T>>>> = vec![None; n];
    for level in tree.levels.iter().rev() {
        let done = map_boxes(pb.parallel, level.clone(), |b| {
            let bx = &tree.boxes[b];
            if bx.sources.is_empty() {
                return None;
            }
            let s = bx.width();
            let mut out = vec![zero; p1];
            if bx.is_leaf() {
                for &j in tree.box_sources(b) {
                    kernel.s2m(bx.center, s, pb.sources[j], pb.charges[j], &mut out);
                }
            } else {
                for &c in &bx.children {
                    if let Some(m) = &me[c] {
                        let cb = &tree.boxes[c];
                        kernel.m2m(m, cb.center, cb.width(), bx.center, s, &mut out);
                    }
                }
            }
            Some(out)
        });
        for (b, v) in level.clone().zip(done) {
            me[b] = v;
        }
    }
    times.upward += clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let mut le: Vec<Option<Vec<C<T>>>> = vec![None; n];
    for (lvl, level) in tree.levels.iter().enumerate() {
        let done = map_boxes(pb.parallel, level.clone(), |b| -> Result<Option<Vec<C<T>>>> {
            let bx = &tree.boxes[b];
            if bx.targets.is_empty() {
                return Ok(None);
            }
            let s = bx.width();
            let mut out = vec![zero; p1];
            let mut any = false;
            if let Some(pl) = bx.parent.and_then(|a| le[a].as_ref()) {
                let pa = &tree.boxes[bx.parent.unwrap_or(0)];
                kernel.l2l(pl, pa.center, pa.width(), bx.center, s, &mut out);
                any = true;
            }
            for &v in &bx.interaction {
                if let Some(m) = &me[v] {
                    let vb = &tree.boxes[v];
                    kernel.m2l(m, vb.center, vb.width(), bx.center, s, lvl, &mut out)?;
                    any = true;
                }
            }
            for &x in &bx.x_list {
                for &j in tree.box_sources(x) {
                    kernel.s2l(bx.center, s, pb.sources[j], pb.charges[j], &mut out)?;
                    any = true;
                }
            }
            Ok(any.then_some(out))
        });
        for (b, v) in level.clone().zip(done) {
            le[b] = v?;
        }
    }

    let leaves: Vec<usize> = tree.leaves().filter(|&b| !tree.boxes[b].targets.is_empty()).collect();
    let far = map_boxes(pb.parallel, 0..leaves.len(), |k| -> Result<Vec<C<T>>> {
        let b = leaves[k];
        let bx = &tree.boxes[b];
        let s = bx.width();
        tree.box_targets(b)
            .iter()
            .map(|&i| {
                let at = pb.targets[i];
                let mut v = le[b].as_ref().map_or(zero, |l| kernel.eval_le(l, bx.center, s, at));
                for &w in &bx.w_list {
                    if let Some(m) = &me[w] {
                        let wb = &tree.boxes[w];
                        v += kernel.eval_me(m, wb.center, wb.width(), at)?;
                    }
                }
                Ok(v)
            })
            .collect()
    });
    times.downward += clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let near = map_boxes(pb.parallel, 0..leaves.len(), |k| -> Result<Vec<C<T>>> {
        let b = leaves[k];
        tree.box_targets(b)
            .iter()
            .map(|&i| {
                let at = pb.targets[i];
                let skip = pb.self_src.map(|m| m[i]);
                let mut v = zero;
                for &u in &tree.boxes[b].near {
                    for &j in tree.box_sources(u) {
                        if skip != Some(j) {
                            v += kernel.direct(at, pb.sources[j], pb.charges[j])?;
                        }
                    }
                }
                Ok(v)
            })
            .collect()
    });

    let mut out = vec![zero; pb.targets.len()];
    for (k, (f, nf)) in far.into_iter().zip(near).enumerate() {
        let (f, nf) = (f?, nf?);
        for ((&i, a), b) in tree.box_targets(leaves[k]).iter().zip(f).zip(nf) {
            out[i] = a + b;
        }
    }
    times.near += clock.elapsed().as_secs_f64();
    Ok(out)
}
