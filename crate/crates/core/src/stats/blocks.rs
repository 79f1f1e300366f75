use super::Multiscale;
use crate::error::{domain, Result};
use crate::Real;

/// Modified exceedance count with `K` blocks of `n/K` scales each: sites whose block sums
/// `W_m` exceed `(1 + eps)(n/K) E` for every `m = 2..=K`. The first block is left free.
pub fn kistler_count<T: Real, F: Multiscale<T> + ?Sized>(
    field: &F,
    k: u32,
    e: T,
    eps: T,
) -> Result<u64> {
    let n = field.scales();
    if k < 2 {
        return domain("K must be at least 2");
    }
    if n % k != 0 {
        return domain(format!("K = {k} does not divide n = {n}"));
    }
    let width = n / k;
    let threshold = (T::one() + eps) * T::cst(width as f64) * e;
    let mut count = 0;
    for v in 0..field.sites() {
        let ok = (1..k).all(|m| {
            let mut w = T::zero();
            for l in m * width + 1..=(m + 1) * width {
                w = w + field.increment(v, l);
            }
            w > threshold
        });
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

/// Tracks `X_v(l) <= c l + B` along a path whose prefix sums change only from some level on,
/// as in a depth-first traversal; the cost per leaf is the number of changed levels.
#[derive(Clone, Debug)]
pub struct BarrierTracker<T> {
    c: T,
    b: T,
    // below[l]: the path stays under the barrier at every level 1..=l.
    below: Vec<bool>,
}

impl<T: Real> BarrierTracker<T> {
    pub fn new(n: u32, c: T, b: T) -> Self {
        let mut below = vec![false; n as usize + 1];
        below[0] = true;
        Self { c, b, below }
    }

    /// `path[l] = X_v(l)` for `l = 0..=n`; levels below `from` are assumed unchanged since
    /// the previous call. Returns whether the whole path stays under the barrier.
    pub fn update(&mut self, path: &[T], from: u32) -> bool {
        let n = self.below.len() - 1;
        for l in from.max(1) as usize..=n {
            let line = self.c * T::cst(l as f64) + self.b;
            self.below[l] = self.below[l - 1] && path[l] <= line;
        }
        self.below[n]
    }
}

/// `#{v : X_v(n) > level and X_v(l) <= c l + B for all l <= n}`. Pass `B = +inf` to drop the
/// barrier.
pub fn barrier_count<T: Real, F: Multiscale<T> + ?Sized>(field: &F, c: T, b: T, level: T) -> u64 {
    let n = field.scales();
    let mut tracker = BarrierTracker::new(n, c, b);
    let mut path = vec![T::zero(); n as usize + 1];
    let mut count = 0;
    for v in 0..field.sites() {
        for l in 1..=n {
            path[l as usize] = path[l as usize - 1] + field.increment(v, l);
        }
        if tracker.update(&path, 1) && path[n as usize] > level {
            count += 1;
        }
    }
    count
}
