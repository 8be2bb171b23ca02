//! Adaptive quadtree over the union of target and source points, with the
//! adaptive FMM lists.
//!
//! For a box `b` the lists are:
//!
//! * `neighbors`: same-level boxes whose closures touch `b` (self excluded);
//! * `interaction` (V): children of the parent's neighbors (and of the
//!   parent) that do not touch `b`; handled by M2L;
//! * `near` (U, leaves only): leaves touching `b`, including `b`; direct sums;
//! * `w_list` (leaves only): finer boxes below `b`'s neighbors whose parent
//!   touches `b` but which do not; their multipoles are evaluated at `b`'s
//!   targets;
//! * `x_list`: the leaves having `b` in their `w_list`; their sources feed
//!   `b`'s local expansion directly.
//!
//! Point indices are stored once, permuted so that every box owns a
//! contiguous range covering its whole subtree.

use std::ops::Range;

use crate::error::{domain, Result};
use crate::{Point, Real};

/// Deepest level a box may sit at.
pub const MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxNode<T> {
    pub level: usize,
    pub center: Point<T>,
    pub half_width: T,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Range into the target permutation.
    pub targets: Range<usize>,
    /// Range into the source permutation.
    pub sources: Range<usize>,
    pub neighbors: Vec<usize>,
    pub interaction: Vec<usize>,
    pub near: Vec<usize>,
    pub w_list: Vec<usize>,
    pub x_list: Vec<usize>,
}

impl<T: Real> BoxNode<T> {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Side length.
    pub fn width(&self) -> T {
        self.half_width + self.half_width
    }

    fn touches(&self, other: &BoxNode<T>) -> bool {
        let reach = self.half_width + other.half_width;
        let tol = reach * T::lit(1e-9);
        (self.center.x - other.center.x).abs() <= reach + tol && (self.center.y - other.center.y).abs() <= reach + tol
    }

    /// Half-open extent test: left/bottom edges inclusive.
    fn holds(&self, p: Point<T>) -> bool {
        let (c, h) = (self.center, self.half_width);
        p.x >= c.x - h && p.x < c.x + h && p.y >= c.y - h && p.y < c.y + h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadtree<T> {
    pub root_center: Point<T>,
    pub root_half_width: T,
    pub boxes: Vec<BoxNode<T>>,
    /// Box-index range of each level, root first.
    pub levels: Vec<Range<usize>>,
    pub leaf_capacity: usize,
    target_order: Vec<usize>,
    source_order: Vec<usize>,
}

/// Quadtree over `targets ∪ sources`, rooted at the smallest enclosing
/// square grown by a relative margin of `1e-12`.
pub fn build_tree<T: Real>(targets: &[Point<T>], sources: &[Point<T>], leaf_capacity: usize) -> Result<Quadtree<T>> {
    let (lo, hi) = bounds(targets, sources)?;
    let center = Point::new(half(lo.x + hi.x), half(lo.y + hi.y));
    let h = half((hi.x - lo.x).max(hi.y - lo.y));
    build(targets, sources, leaf_capacity, center, h)
}

/// Quadtree whose root is centered on the line `y = 0`, so that below the
/// root no box straddles the boundary.
pub fn build_tree_anchored<T: Real>(
    targets: &[Point<T>],
    sources: &[Point<T>],
    leaf_capacity: usize,
) -> Result<Quadtree<T>> {
    let (lo, hi) = bounds(targets, sources)?;
    let center = Point::new(half(lo.x + hi.x), T::zero());
    let h = half(hi.x - lo.x).max(lo.y.abs()).max(hi.y.abs());
    build(targets, sources, leaf_capacity, center, h)
}

fn half<T: Real>(v: T) -> T {
    v * T::lit(0.5)
}

fn bounds<T: Real>(targets: &[Point<T>], sources: &[Point<T>]) -> Result<(Point<T>, Point<T>)> {
    if targets.is_empty() && sources.is_empty() {
        return domain("quadtree needs at least one point");
    }
    let mut lo = Point::new(T::infinity(), T::infinity());
    let mut hi = Point::new(T::neg_infinity(), T::neg_infinity());
    for p in targets.iter().chain(sources) {
        if !p.is_finite() {
            return domain(format!("non-finite point ({}, {})", p.x, p.y));
        }
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    Ok((lo, hi))
}

fn build<T: Real>(
    targets: &[Point<T>],
    sources: &[Point<T>],
    leaf_capacity: usize,
    center: Point<T>,
    h: T,
) -> Result<Quadtree<T>> {
    if leaf_capacity == 0 {
        return domain("leaf capacity must be at least 1");
    }
    let margin = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
    let floor = center.x.abs().max(center.y.abs()).max(T::one()) * margin;
    let h = h.max(floor) * (T::one() + margin);

    let mut tree = Quadtree {
        root_center: center,
        root_half_width: h,
        boxes: vec![node(0, center, h, None, 0..targets.len(), 0..sources.len())],
        levels: vec![0..1],
        leaf_capacity,
        target_order: (0..targets.len()).collect(),
        source_order: (0..sources.len()).collect(),
    };

    let mut start = 0;
    loop {
        let end = tree.boxes.len();
        for b in start..end {
            let bx = &tree.boxes[b];
            if bx.targets.len() + bx.sources.len() <= leaf_capacity || bx.level >= MAX_DEPTH {
                continue;
            }
            let (c, hh, level) = (bx.center, half(bx.half_width), bx.level + 1);
            let (tr, sr) = (bx.targets.clone(), bx.sources.clone());
            let tcuts = split(&mut tree.target_order[tr.clone()], targets, c);
            let scuts = split(&mut tree.source_order[sr.clone()], sources, c);
            for q in 0..4 {
                let t = tr.start + tcuts[q]..tr.start + tcuts[q + 1];
                let s = sr.start + scuts[q]..sr.start + scuts[q + 1];
                if t.is_empty() && s.is_empty() {
                    continue;
                }
                let dx = if q & 1 == 1 { hh } else { -hh };
                let dy = if q & 2 == 2 { hh } else { -hh };
                let child = tree.boxes.len();
                tree.boxes.push(node(level, c + Point::new(dx, dy), hh, Some(b), t, s));
                tree.boxes[b].children.push(child);
            }
        }
        if tree.boxes.len() == end {
            break;
        }
        tree.levels.push(end..tree.boxes.len());
        start = end;
    }
    compute_lists(&mut tree);
    Ok(tree)
}

fn node<T: Real>(
    level: usize,
    center: Point<T>,
    half_width: T,
    parent: Option<usize>,
    targets: Range<usize>,
    sources: Range<usize>,
) -> BoxNode<T> {
    BoxNode {
        level,
        center,
        half_width,
        parent,
        children: Vec::new(),
        targets,
        sources,
        neighbors: Vec::new(),
        interaction: Vec::new(),
        near: Vec::new(),
        w_list: Vec::new(),
        x_list: Vec::new(),
    }
}

/// Quadrant 0..4: bit 0 set for `x >= c.x`, bit 1 for `y >= c.y`.
fn quadrant<T: Real>(p: Point<T>, c: Point<T>) -> usize {
    usize::from(p.x >= c.x) | (usize::from(p.y >= c.y) << 1)
}

/// Stable partition of `idx` by quadrant; returns the five cut offsets.
fn split<T: Real>(idx: &mut [usize], pts: &[Point<T>], c: Point<T>) -> [usize; 5] {
    let mut buckets: [Vec<usize>; 4] = Default::default();
    for &i in idx.iter() {
        buckets[quadrant(pts[i], c)].push(i);
    }
    let mut cuts = [0; 5];
    let mut k = 0;
    for (q, b) in buckets.iter().enumerate() {
        idx[k..k + b.len()].copy_from_slice(b);
        k += b.len();
        cuts[q + 1] = k;
    }
    cuts
}

/// Fills every box's lists; run by the builders, idempotent.
pub fn compute_lists<T: Real>(tree: &mut Quadtree<T>) {
    let n = tree.boxes.len();
    let mut neighbors = vec![Vec::new(); n];
    let mut interaction = vec![Vec::new(); n];
    for level in tree.levels.iter().skip(1) {
        for b in level.clone() {
            let parent = tree.boxes[b].parent.expect("non-root box has a parent");
            let bx = &tree.boxes[b];
            let uncles: Vec<usize> = std::iter::once(parent).chain(neighbors[parent].iter().copied()).collect();
            for a in uncles {
                for &d in &tree.boxes[a].children {
                    if d == b {
                        continue;
                    }
                    if bx.touches(&tree.boxes[d]) {
                        neighbors[b].push(d);
                    } else {
                        interaction[b].push(d);
                    }
                }
            }
            neighbors[b].sort_unstable();
            interaction[b].sort_unstable();
        }
    }

    let mut near = vec![Vec::new(); n];
    let mut w_list = vec![Vec::new(); n];
    for b in 0..n {
        if !tree.boxes[b].is_leaf() {
            continue;
        }
        near[b].push(b);
        for &c in &neighbors[b] {
            if tree.boxes[c].is_leaf() {
                near[b].push(c);
            } else {
                descend(tree, b, c, &mut near[b], &mut w_list[b]);
            }
        }
    }
    // Coarser touching leaves are only found from the finer side.
    for b in 0..n {
        for k in 0..near[b].len() {
            let c = near[b][k];
            if tree.boxes[c].level < tree.boxes[b].level {
                continue;
            }
            if tree.boxes[c].level > tree.boxes[b].level {
                near[c].push(b);
            }
        }
    }
    let mut x_list = vec![Vec::new(); n];
    for b in 0..n {
        near[b].sort_unstable();
        near[b].dedup();
        w_list[b].sort_unstable();
        for &d in &w_list[b] {
            x_list[d].push(b);
        }
    }
    for (i, bx) in tree.boxes.iter_mut().enumerate() {
        bx.neighbors = std::mem::take(&mut neighbors[i]);
        bx.interaction = std::mem::take(&mut interaction[i]);
        bx.near = std::mem::take(&mut near[i]);
        bx.w_list = std::mem::take(&mut w_list[i]);
        bx.x_list = std::mem::take(&mut x_list[i]);
    }
}

fn descend<T: Real>(tree: &Quadtree<T>, b: usize, c: usize, near: &mut Vec<usize>, w: &mut Vec<usize>) {
    for &d in &tree.boxes[c].children {
        if tree.boxes[b].touches(&tree.boxes[d]) {
            if tree.boxes[d].is_leaf() {
                near.push(d);
            } else {
                descend(tree, b, d, near, w);
            }
        } else {
            w.push(d);
        }
    }
}

/// The leaf whose half-open extent holds `point`.
pub fn locate_leaf<T: Real>(tree: &Quadtree<T>, point: Point<T>) -> Result<usize> {
    let (c, h) = (tree.root_center, tree.root_half_width);
    if !((point.x - c.x).abs() <= h && (point.y - c.y).abs() <= h) {
        return domain(format!("point ({}, {}) lies outside the root square", point.x, point.y));
    }
    let mut b = 0;
    while !tree.boxes[b].is_leaf() {
        let q = quadrant(point, tree.boxes[b].center);
        let next = tree.boxes[b]
            .children
            .iter()
            .copied()
            .find(|&d| quadrant(tree.boxes[d].center, tree.boxes[b].center) == q);
        match next {
            Some(d) => b = d,
            None => return domain(format!("point ({}, {}) falls in an empty pruned region", point.x, point.y)),
        }
    }
    Ok(b)
}

impl<T: Real> Quadtree<T> {
    /// Number of levels (root included).
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.boxes.len()).filter(|&b| self.boxes[b].is_leaf())
    }

    /// Target indices owned by box `b` and its subtree.
    pub fn box_targets(&self, b: usize) -> &[usize] {
        &self.target_order[self.boxes[b].targets.clone()]
    }

    /// Source indices owned by box `b` and its subtree.
    pub fn box_sources(&self, b: usize) -> &[usize] {
        &self.source_order[self.boxes[b].sources.clone()]
    }

    /// Closed-square containment test for box `b`.
    pub fn box_contains(&self, b: usize, p: Point<T>) -> bool {
        let bx = &self.boxes[b];
        (p.x - bx.center.x).abs() <= bx.half_width && (p.y - bx.center.y).abs() <= bx.half_width
    }

    pub fn locate_leaf(&self, point: Point<T>) -> Result<usize> {
        locate_leaf(self, point)
    }

    /// Whether box `b` holds `p` under the half-open convention.
    pub fn box_holds(&self, b: usize, p: Point<T>) -> bool {
        self.boxes[b].holds(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn few_points_give_a_root_leaf() {
        let t = build_tree(&[p(0.0, 0.0), p(1.0, 1.0)], &[p(0.5, 0.2)], 3).unwrap();
        assert_eq!(t.boxes.len(), 1);
        assert_eq!(t.boxes[0].near, vec![0]);
        assert!(t.boxes[0].interaction.is_empty());
        assert_eq!(t.locate_leaf(p(0.3, 0.3)).unwrap(), 0);
    }

    #[test]
    fn four_quadrant_points_split_once() {
        let pts = [p(0.25, 0.25), p(0.75, 0.25), p(0.25, 0.75), p(0.75, 0.75)];
        let t = build_tree(&pts, &[], 1).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.boxes.len(), 5);
        for b in 1..5 {
            assert!(t.boxes[b].is_leaf());
            assert_eq!(t.box_targets(b).len(), 1);
            let i = t.box_targets(b)[0];
            assert_eq!(t.locate_leaf(pts[i]).unwrap(), b);
        }
    }

    #[test]
    fn half_open_split() {
        // Root spans [0, 1]^2 up to the margin; 0.5 sits on the split line.
        let t = build_tree(&[p(0.0, 0.0), p(1.0, 1.0), p(0.5, 0.5)], &[], 1).unwrap();
        let leaf = t.locate_leaf(p(0.5, 0.5)).unwrap();
        assert!(t.boxes[leaf].center.x > 0.5 && t.boxes[leaf].center.y > 0.5);
    }

    #[test]
    fn empty_input_and_zero_capacity_fail() {
        assert!(build_tree::<f64>(&[], &[], 4).is_err());
        assert!(build_tree(&[p(0.0, 0.0)], &[], 0).is_err());
    }

    #[test]
    fn anchored_root_is_centered_on_the_boundary() {
        let t = build_tree_anchored(&[p(0.0, 0.3), p(2.0, 0.9)], &[p(1.0, -0.9), p(0.2, -0.1)], 1).unwrap();
        assert_eq!(t.root_center.y, 0.0);
        for b in 1..t.boxes.len() {
            let bx = &t.boxes[b];
            assert!(bx.center.y.abs() >= bx.half_width, "box {b} straddles y = 0");
        }
    }

    #[test]
    fn coincident_points_stop_at_max_depth() {
        let pts = vec![p(0.3, 0.3); 5];
        let t = build_tree(&pts, &[p(0.0, 0.0)], 2).unwrap();
        assert!(t.depth() <= MAX_DEPTH + 1);
        assert_eq!(t.leaves().map(|b| t.box_targets(b).len()).sum::<usize>(), 5);
    }

    #[test]
    fn uniform_grid_corner_lists() {
        // One point per cell of a 4x4 grid: a full level-2 tree.
        let mut pts = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                pts.push(p(0.25 * i as f64, 0.25 * j as f64));
            }
        }
        let t = build_tree(&pts, &[], 1).unwrap();
        assert_eq!(t.levels[2].len(), 16);
        let corner = t.locate_leaf(p(0.0, 0.0)).unwrap();
        assert_eq!(t.boxes[corner].neighbors.len(), 3);
        // Parent has no other neighbors at level 1 besides its 3 siblings'
        // subtrees: 16 children minus self minus 3 neighbors.
        assert_eq!(t.boxes[corner].interaction.len(), 12);
        assert!(t.boxes[0].interaction.is_empty());
        for b in t.levels[2].clone() {
            assert!(t.boxes[b].neighbors.len() <= 8);
            assert!(t.boxes[b].interaction.len() <= 27);
        }
    }
}
