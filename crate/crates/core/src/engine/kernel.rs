use std::collections::HashMap;

use crate::error::{domain, Error, Result};
use crate::expansions::{log_kernels as lk, reaction_kernels as rk, Binomial};
use crate::quadtree::Quadtree;
use crate::specfun::{i0, i_sequence_scaled, Impedance};
use crate::{Complex, Point, Real};

type C<T> = Complex<T>;

/// Expansion arithmetic the tree passes need. Every expansion is stored
/// scaled by its box width.
pub(crate) trait Kernel<T: Real>: Sync {
    fn order(&self) -> usize;

    /// Called once per tree before the downward pass; `pairs` lists every
    /// `(target box, source box)` M2L pair that will be requested.
    fn prepare(&mut self, _tree: &Quadtree<T>, _pairs: &[(usize, usize)]) -> Result<()> {
        Ok(())
    }

    fn s2m(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]);
    fn m2m(&self, child: &[C<T>], cc: Point<T>, cs: T, pc: Point<T>, ps: T, out: &mut [C<T>]);
    fn m2l(&self, me: &[C<T>], sc: Point<T>, ss: T, tc: Point<T>, ts: T, level: usize, out: &mut [C<T>])
        -> Result<()>;
    fn l2l(&self, parent: &[C<T>], pc: Point<T>, ps: T, cc: Point<T>, cs: T, out: &mut [C<T>]);
    fn s2l(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]) -> Result<()>;
    fn eval_me(&self, me: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> Result<C<T>>;
    fn eval_le(&self, le: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> C<T>;
    fn direct(&self, at: Point<T>, src: Point<T>, q: T) -> Result<C<T>>;
}

/// `sum_j Q_j I_0(r - r_j)` over image sources `r_j` below the targets.
pub(crate) struct ReactionKernel<T> {
    p: usize,
    zeps: Impedance<T>,
    binom: Binomial<T>,
    tables: HashMap<(usize, i64, i64), Vec<C<T>>>,
}

impl<T: Real> ReactionKernel<T> {
    pub fn new(p: usize, zeps: Impedance<T>) -> Self {
        ReactionKernel { p, zeps, binom: Binomial::new(2 * p), tables: HashMap::new() }
    }

    fn key(level: usize, sc: Point<T>, tc: Point<T>, s: T) -> (usize, i64, i64) {
        let ix = ((tc.x - sc.x) / s).round().to_i64().unwrap_or(i64::MAX);
        let iy = ((tc.y - sc.y) / s).round().to_i64().unwrap_or(i64::MAX);
        (level, ix, iy)
    }
}

impl<T: Real> Kernel<T> for ReactionKernel<T> {
    fn order(&self) -> usize {
        self.p
    }

    fn prepare(&mut self, tree: &Quadtree<T>, pairs: &[(usize, usize)]) -> Result<()> {
        let mut keys: Vec<_> = pairs
            .iter()
            .map(|&(t, s)| {
                let (bt, bs) = (&tree.boxes[t], &tree.boxes[s]);
                (Self::key(bt.level, bs.center, bt.center, bt.width()), bt.center - bs.center, bt.width())
            })
            .collect();
        keys.sort_by_key(|k| k.0);
        keys.dedup_by_key(|k| k.0);
        let (zeps, p) = (self.zeps, self.p);
        let mut tables = HashMap::with_capacity(keys.len());
        for (key, d, s) in keys {
            tables.insert(key, i_sequence_scaled(d.x, d.y, zeps, 2 * p, s)?);
        }
        self.tables = tables;
        Ok(())
    }

    fn s2m(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]) {
        rk::s2m_acc(c.to_complex(), s, src.to_complex(), q, out);
    }

    fn m2m(&self, child: &[C<T>], cc: Point<T>, cs: T, pc: Point<T>, ps: T, out: &mut [C<T>]) {
        let d = C::new(T::zero(), T::one()) * (pc.to_complex() - cc.to_complex()) / ps;
        let mut buf = Vec::with_capacity(self.p + 1);
        rk::m2m_acc(child, d, cs / ps, &self.binom, &mut buf, out);
    }

    fn m2l(
        &self,
        me: &[C<T>],
        sc: Point<T>,
        ss: T,
        tc: Point<T>,
        ts: T,
        level: usize,
        out: &mut [C<T>],
    ) -> Result<()> {
        let table = self
            .tables
            .get(&Self::key(level, sc, tc, ts))
            .ok_or_else(|| Error::Domain("M2L table missing for box pair".into()))?;
        rk::m2l_acc(me, table, ss / ts, &self.binom, out);
        Ok(())
    }

    fn l2l(&self, parent: &[C<T>], pc: Point<T>, ps: T, cc: Point<T>, cs: T, out: &mut [C<T>]) {
        let d = (pc.to_complex() - cc.to_complex()) / ps;
        let mut buf = Vec::with_capacity(self.p + 1);
        rk::l2l_acc(parent, d, cs / ps, &self.binom, &mut buf, out);
    }

    fn s2l(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]) -> Result<()> {
        let iseq = i_sequence_scaled(c.x - src.x, c.y - src.y, self.zeps, self.p, s)?;
        rk::s2l_acc(&iseq, q, out);
        Ok(())
    }

    fn eval_me(&self, me: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> Result<C<T>> {
        let iseq = i_sequence_scaled(at.x - c.x, at.y - c.y, self.zeps, self.p, s)?;
        Ok(rk::dot(me, &iseq))
    }

    fn eval_le(&self, le: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> C<T> {
        rk::horner(le, (c.to_complex() - at.to_complex()) / s)
    }

    fn direct(&self, at: Point<T>, src: Point<T>, q: T) -> Result<C<T>> {
        Ok(i0(at.x - src.x, at.y - src.y, self.zeps)? * q)
    }
}

/// Complex logarithmic potential `sum_j Q_j log(z - z_j)`.
pub(crate) struct LogKernel<T> {
    p: usize,
    binom: Binomial<T>,
}

impl<T: Real> LogKernel<T> {
    pub fn new(p: usize) -> Self {
        LogKernel { p, binom: Binomial::new(2 * p.max(1)) }
    }
}

impl<T: Real> Kernel<T> for LogKernel<T> {
    fn order(&self) -> usize {
        self.p
    }

    fn s2m(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]) {
        lk::s2m_acc(c.to_complex(), s, src.to_complex(), q, out);
    }

    fn m2m(&self, child: &[C<T>], cc: Point<T>, cs: T, pc: Point<T>, ps: T, out: &mut [C<T>]) {
        let t = (cc.to_complex() - pc.to_complex()) / ps;
        let mut buf = Vec::with_capacity(self.p + 1);
        lk::m2m_acc(child, t, cs / ps, &self.binom, &mut buf, out);
    }

    fn m2l(
        &self,
        me: &[C<T>],
        sc: Point<T>,
        ss: T,
        tc: Point<T>,
        ts: T,
        _level: usize,
        out: &mut [C<T>],
    ) -> Result<()> {
        let z0 = sc.to_complex() - tc.to_complex();
        if z0.norm() == T::zero() {
            return domain("M2L between coincident centers");
        }
        let (mut u, mut v) = (Vec::with_capacity(self.p + 1), Vec::with_capacity(self.p + 1));
        lk::m2l_acc(me, z0, ss, ts, &self.binom, &mut u, &mut v, out);
        Ok(())
    }

    fn l2l(&self, parent: &[C<T>], pc: Point<T>, ps: T, cc: Point<T>, cs: T, out: &mut [C<T>]) {
        let d = (cc.to_complex() - pc.to_complex()) / ps;
        let mut buf = Vec::with_capacity(self.p + 1);
        lk::l2l_acc(parent, d, cs / ps, &self.binom, &mut buf, out);
    }

    fn s2l(&self, c: Point<T>, s: T, src: Point<T>, q: T, out: &mut [C<T>]) -> Result<()> {
        lk::s2l_acc(c.to_complex(), s, src.to_complex(), q, out);
        Ok(())
    }

    fn eval_me(&self, me: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> Result<C<T>> {
        Ok(lk::eval_me(me, c.to_complex(), s, at.to_complex()))
    }

    fn eval_le(&self, le: &[C<T>], c: Point<T>, s: T, at: Point<T>) -> C<T> {
        lk::eval_le(le, c.to_complex(), s, at.to_complex())
    }

    fn direct(&self, at: Point<T>, src: Point<T>, q: T) -> Result<C<T>> {
        let d = at.to_complex() - src.to_complex();
        if d.norm() == T::zero() {
            return Err(Error::Singularity(format!("target coincides with source at ({}, {})", at.x, at.y)));
        }
        Ok(d.ln() * q)
    }
}
