//! Gaussian branching random walk on the binary tree.
//!
//! Leaves are indexed by their root-to-leaf path read as an `n`-bit integer, most
//! significant bit first. Internal nodes use heap numbering (root `1`, children `2k`,
//! `2k + 1`), and the two child increments of node `k` are the pair of normals at counter
//! address `(seed, k)`. The streaming and dense samplers read the same addresses.

use std::io::{Read, Write};

use crate::error::{capacity, domain, Error, Result};
use crate::rng::normal_pair;
use crate::stats::Multiscale;
use crate::Real;

pub const MAX_DEPTH: u32 = 40;
pub const MAX_DENSE_DEPTH: u32 = 22;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrwConfig<T> {
    pub n: u32,
    pub sigma2: T,
    pub seed: u64,
}

impl<T: Real> BrwConfig<T> {
    pub fn new(n: u32, sigma2: T, seed: u64) -> Result<Self> {
        if n == 0 {
            return domain("depth n must be at least 1");
        }
        if n > MAX_DEPTH {
            return capacity(format!("depth {n} exceeds the supported maximum {MAX_DEPTH}"));
        }
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return domain("sigma2 must be positive and finite");
        }
        Ok(Self { n, sigma2, seed })
    }

    pub fn leaves(&self) -> u64 {
        1u64 << self.n
    }

    fn sd(&self) -> T {
        self.sigma2.sqrt()
    }
}

/// Scale at which the paths to leaves `u` and `v` split, i.e. their common prefix length.
pub fn branching_scale(u: u64, v: u64, n: u32) -> u32 {
    n - (64 - (u ^ v).leading_zeros())
}

pub fn covariance<T: Real>(u: u64, v: u64, n: u32, sigma2: T) -> T {
    sigma2 * T::cst(branching_scale(u, v, n) as f64)
}

/// Depth-first leaf iterator holding the `n + 1` partial sums along the current path.
#[derive(Clone, Debug)]
pub struct LeafIter<T> {
    cfg: BrwConfig<T>,
    sd: T,
    next: u64,
    // partial[l] = X_v(l) for the most recently emitted leaf; partial[0] = 0.
    partial: Vec<T>,
    // Cached right-child draw per level, valid while the parent is unchanged.
    pending: Vec<T>,
    // First level rewritten by the last advance.
    first: u32,
}

impl<T: Real> LeafIter<T> {
    pub fn new(cfg: BrwConfig<T>) -> Self {
        let n = cfg.n as usize;
        Self {
            sd: cfg.sd(),
            cfg,
            next: 0,
            partial: vec![T::zero(); n + 1],
            pending: vec![T::zero(); n + 1],
            first: 1,
        }
    }

    /// First level whose partial sum changed on the last advance; levels below it are shared
    /// with the previous leaf.
    pub fn changed_from(&self) -> u32 {
        self.first
    }

    /// Partial sums `X_v(0..=n)` of the leaf returned by the last call to `next`.
    pub fn path(&self) -> &[T] {
        &self.partial
    }

    /// Advances to the next leaf and returns its index, updating only the levels below the
    /// deepest common ancestor with the previous leaf.
    pub fn advance(&mut self) -> Option<u64> {
        let v = self.next;
        let n = self.cfg.n;
        if v >= self.cfg.leaves() {
            return None;
        }
        let first = if v == 0 {
            1
        } else {
            branching_scale(v - 1, v, n) + 1
        };
        let node_base = self.cfg.leaves() + v;
        for l in first..=n {
            let node = node_base >> (n - l);
            let li = l as usize;
            let y = if node & 1 == 0 {
                let (a, b) = normal_pair(self.cfg.seed, node >> 1);
                self.pending[li] = T::cst(b) * self.sd;
                T::cst(a) * self.sd
            } else {
                self.pending[li]
            };
            self.partial[li] = self.partial[li - 1] + y;
        }
        self.first = first;
        self.next += 1;
        Some(v)
    }
}

impl<T: Real> Iterator for LeafIter<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        self.advance().map(|_| self.partial[self.cfg.n as usize])
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.cfg.leaves() - self.next) as usize;
        (left, Some(left))
    }
}

/// Streams the leaf values `X_v(n)` in increasing index order.
pub fn sample_field<T: Real>(cfg: &BrwConfig<T>) -> LeafIter<T> {
    LeafIter::new(*cfg)
}

/// Visits every leaf with its full path of partial sums `X_v(0..=n)` and the first level
/// that differs from the previous leaf's path.
pub fn for_each_path<T: Real>(cfg: &BrwConfig<T>, mut f: impl FnMut(u64, &[T], u32)) {
    let mut it = LeafIter::new(*cfg);
    while let Some(v) = it.advance() {
        f(v, it.path(), it.changed_from());
    }
}

/// Streaming [`crate::stats::barrier_count`]: leaves above `level` whose path stays at or
/// below `c l + b` at every level, without materializing the decomposition.
pub fn barrier_count_streaming<T: Real>(cfg: &BrwConfig<T>, c: T, b: T, level: T) -> u64 {
    let mut tracker = crate::stats::BarrierTracker::new(cfg.n, c, b);
    let mut count = 0;
    for_each_path(cfg, |_, path, from| {
        if tracker.update(path, from) && path[cfg.n as usize] > level {
            count += 1;
        }
    });
    count
}

/// Maximum leaf value and its smallest maximizing index.
pub fn sample_max<T: Real>(cfg: &BrwConfig<T>) -> (T, u64) {
    let mut it = LeafIter::new(*cfg);
    let mut best = T::neg_infinity();
    let mut arg = 0;
    while let Some(v) = it.advance() {
        let x = it.partial[cfg.n as usize];
        if x > best {
            best = x;
            arg = v;
        }
    }
    (best, arg)
}

/// Dense multiscale decomposition. Increments are stored once per tree edge, which is the
/// same information as the sites-by-scales matrix `Y_v(l)` without the `n`-fold duplication.
#[derive(Clone, Debug)]
pub struct ScaleDecomposition<T> {
    pub n: u32,
    pub sigma2: T,
    pub seed: u64,
    // edge[k] = increment on the edge into heap node k, for 2 <= k < 2^(n+1).
    edge: Vec<T>,
}

pub fn sample_decomposition<T: Real>(cfg: &BrwConfig<T>) -> Result<ScaleDecomposition<T>> {
    if cfg.n > MAX_DENSE_DEPTH {
        return Err(Error::Capacity(format!(
            "dense decomposition is limited to n <= {MAX_DENSE_DEPTH}; use brw::sample_field or brw::for_each_path for n = {}",
            cfg.n
        )));
    }
    let nodes = 2usize << cfg.n;
    let mut edge = vec![T::zero(); nodes];
    let sd = cfg.sd();
    for parent in 1..(nodes / 2) {
        let (a, b) = normal_pair(cfg.seed, parent as u64);
        edge[2 * parent] = T::cst(a) * sd;
        edge[2 * parent + 1] = T::cst(b) * sd;
    }
    Ok(ScaleDecomposition {
        n: cfg.n,
        sigma2: cfg.sigma2,
        seed: cfg.seed,
        edge,
    })
}

impl<T: Real> ScaleDecomposition<T> {
    pub fn leaves(&self) -> u64 {
        1u64 << self.n
    }

    /// Increment `Y_v(l)` for `1 <= l <= n`.
    #[inline]
    pub fn y(&self, v: u64, l: u32) -> T {
        debug_assert!(l >= 1 && l <= self.n && v < self.leaves());
        self.edge[((self.leaves() + v) >> (self.n - l)) as usize]
    }

    /// `X_v(l) = Y_v(1) + ... + Y_v(l)`, summed left to right.
    pub fn x(&self, v: u64, l: u32) -> T {
        let mut s = T::zero();
        for k in 1..=l {
            s = s + self.y(v, k);
        }
        s
    }

    /// Row `Y_v(1..=n)` of the increment matrix.
    pub fn row(&self, v: u64) -> Vec<T> {
        (1..=self.n).map(|l| self.y(v, l)).collect()
    }

    pub fn leaf_values(&self) -> Vec<T> {
        (0..self.leaves()).map(|v| self.x(v, self.n)).collect()
    }

    /// The `2^l` distinct values `X_v(l)`, one per depth-`l` prefix, in prefix order.
    pub fn level_values(&self, l: u32) -> Vec<T> {
        let shift = self.n - l;
        (0..(1u64 << l)).map(|p| self.x(p << shift, l)).collect()
    }
}

impl<T: Real> Multiscale<T> for ScaleDecomposition<T> {
    fn sites(&self) -> usize {
        self.leaves() as usize
    }

    fn scales(&self) -> u32 {
        self.n
    }

    fn increment(&self, site: usize, l: u32) -> T {
        self.y(site as u64, l)
    }
}

const DUMP_MAGIC: &[u8; 8] = b"LCBRW001";

/// Writes the leaf values as a binary dump: magic, `n` (u32), `sigma2` (f64), `seed` (u64),
/// then `2^n` f64 values, all little-endian.
pub fn write_dump<T: Real, W: Write>(cfg: &BrwConfig<T>, mut w: W) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&cfg.n.to_le_bytes())?;
    w.write_all(&cfg.sigma2.as_f64().to_le_bytes())?;
    w.write_all(&cfg.seed.to_le_bytes())?;
    for x in sample_field(cfg) {
        w.write_all(&x.as_f64().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dump written by [`write_dump`], returning the header and the values.
pub fn read_dump<R: Read>(mut r: R) -> Result<(BrwConfig<f64>, Vec<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Format("not a branching random walk dump".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4);
    r.read_exact(&mut b8)?;
    let sigma2 = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let seed = u64::from_le_bytes(b8);
    let cfg = BrwConfig::new(n, sigma2, seed)?;
    let mut values = Vec::with_capacity(cfg.leaves() as usize);
    for _ in 0..cfg.leaves() {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok((cfg, values))
}
