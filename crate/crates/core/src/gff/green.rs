use std::f64::consts::PI;
use std::io::Write;

use super::BoxRegion;
use crate::error::{Error, Result};

pub const MAX_GREEN_SITES: usize = 1 << 14;
pub const MAX_SPECTRAL_GREEN_SITES: usize = 1 << 12;

/// Symmetric Green matrix over the interior sites, stored as a packed lower triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenMatrix {
    pub region: BoxRegion,
    data: Vec<f64>,
}

impl GreenMatrix {
    fn zeros(region: BoxRegion) -> Self {
        let n = region.sites();
        Self {
            region,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    #[inline]
    fn slot(i: usize, j: usize) -> usize {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        a * (a + 1) / 2 + b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::slot(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.region.sites()
    }

    /// Column `G(., j)` as a dense vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, j)).collect()
    }

    /// Text export: a header line `width height`, then row `i` holds `G(i, 0..=i)`.
    pub fn write_lower_triangle<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.region.width, self.region.height)?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..=i).map(|j| format!("{:.17e}", self.get(i, j))).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Applies `-Δ` (averaged convention, zero boundary) to a vector over interior sites.
pub fn apply_operator(region: &BoxRegion, f: &[f64]) -> Vec<f64> {
    let (w, h) = (region.width, region.height);
    let mut out = vec![0.0; f.len()];
    for y in 0..h {
        for x in 0..w {
            let i = region.index(x, y);
            let mut s = 0.0;
            if x > 0 {
                s += f[i - 1];
            }
            if x + 1 < w {
                s += f[i + 1];
            }
            if y > 0 {
                s += f[i - w];
            }
            if y + 1 < h {
                s += f[i + w];
            }
            out[i] = f[i] - 0.25 * s;
        }
    }
    out
}

/// Exact Green matrix by banded Cholesky of `-Δ`, solving for every unit column.
///
/// Sites are ordered along the shorter side so the bandwidth is `min(width, height)`; the
/// cost is `O(N^2 b)`.
pub fn green(region: &BoxRegion) -> Result<GreenMatrix> {
    let n = region.sites();
    if n > MAX_GREEN_SITES {
        return Err(Error::Capacity(format!(
            "dense Green matrix limited to {MAX_GREEN_SITES} sites, box has {n}; use gff::spectral_green entries or the spectral sampler instead"
        )));
    }
    let (w, h) = (region.width, region.height);
    // Internal order runs fastest along the shorter side; `ext[k]` maps back to row-major.
    let short = w.min(h);
    let ext: Vec<usize> = (0..n)
        .map(|k| {
            let (a, b) = (k % short, k / short);
            if w <= h {
                region.index(a, b)
            } else {
                region.index(b, a)
            }
        })
        .collect();
    let bw = short;

    // Band of L: l[i * (bw + 1) + d] = L[i][i - d].
    let stride = bw + 1;
    let mut l = vec![0.0; n * stride];
    let a = |i: usize, j: usize| -> f64 {
        if i == j {
            1.0
        } else if i - j == bw || (i - j == 1 && i % short != 0) {
            -0.25
        } else {
            0.0
        }
    };
    for i in 0..n {
        let j0 = i.saturating_sub(bw);
        for j in j0..=i {
            let mut s = a(i, j);
            let k0 = j0.max(j.saturating_sub(bw));
            for k in k0..j {
                s -= l[i * stride + (i - k)] * l[j * stride + (j - k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Singular("operator is not positive definite".into()));
                }
                l[i * stride] = s.sqrt();
            } else {
                l[i * stride + (i - j)] = s / l[j * stride];
            }
        }
    }

    let mut g = GreenMatrix::zeros(*region);
    let mut y = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        // Forward: L y = e_j, zero above j.
        y[j] = 1.0 / l[j * stride];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j.max(i.saturating_sub(bw))..i {
                s += l[i * stride + (i - k)] * y[k];
            }
            y[i] = -s / l[i * stride];
        }
        // Backward: L^T g = y, only rows i >= j are needed.
        for i in (j..n).rev() {
            let mut s = y[i];
            for k in i + 1..n.min(i + bw + 1) {
                s -= l[k * stride + (k - i)] * col[k];
            }
            col[i] = s / l[i * stride];
        }
        for i in j..n {
            g.data[GreenMatrix::slot(ext[i], ext[j])] = col[i];
        }
    }
    Ok(g)
}

/// Sine eigenvector table of the path graph on `m` sites: `t[j * m + x]` for mode `j`.
pub(crate) fn sine_table(m: usize) -> Vec<f64> {
    let norm = (2.0 / (m + 1) as f64).sqrt();
    let mut t = vec![0.0; m * m];
    for j in 0..m {
        for x in 0..m {
            t[j * m + x] = norm * (PI * ((j + 1) * (x + 1)) as f64 / (m + 1) as f64).sin();
        }
    }
    t
}

/// Eigenvalues of `-Δ` on the rectangle, `lambda[k * width + j]` for modes `(j, k)`.
pub(crate) fn eigenvalues(region: &BoxRegion) -> Vec<f64> {
    let (w, h) = (region.width, region.height);
    let cw: Vec<f64> = (1..=w).map(|j| (PI * j as f64 / (w + 1) as f64).cos()).collect();
    let ch: Vec<f64> = (1..=h).map(|k| (PI * k as f64 / (h + 1) as f64).cos()).collect();
    let mut lam = vec![0.0; w * h];
    for k in 0..h {
        for j in 0..w {
            lam[k * w + j] = 1.0 - 0.5 * (cw[j] + ch[k]);
        }
    }
    lam
}

/// Green matrix assembled from the sine eigenbasis, `sum_modes phi(v) phi(v') / lambda`.
/// This is the exact covariance of the spectral sampler.
pub fn spectral_green(region: &BoxRegion) -> Result<GreenMatrix> {
    let n = region.sites();
    if n > MAX_SPECTRAL_GREEN_SITES {
        return Err(Error::Capacity(format!(
            "spectral Green assembly limited to {MAX_SPECTRAL_GREEN_SITES} sites, box has {n}"
        )));
    }
    let (w, h) = (region.width, region.height);
    let sx = sine_table(w);
    let sy = sine_table(h);
    let lam = eigenvalues(region);
    let mut g = GreenMatrix::zeros(*region);
    let mut c = vec![0.0; h];
    for x in 0..w {
        for xp in 0..=x {
            // c_k = sum_j sx_j(x) sx_j(x') / lambda_jk
            for (k, ck) in c.iter_mut().enumerate() {
                let mut s = 0.0;
                for j in 0..w {
                    s += sx[j * w + x] * sx[j * w + xp] / lam[k * w + j];
                }
                *ck = s;
            }
            for y in 0..h {
                for yp in 0..h {
                    let mut s = 0.0;
                    for (k, ck) in c.iter().enumerate() {
                        s += ck * sy[k * h + y] * sy[k * h + yp];
                    }
                    let (i, ip) = (region.index(x, y), region.index(xp, yp));
                    if x != xp || i >= ip {
                        g.data[GreenMatrix::slot(i, ip)] = s;
                    }
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense_operator(region: &BoxRegion) -> DMatrix<f64> {
        let n = region.sites();
        DMatrix::from_fn(n, n, |i, j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            apply_operator(region, &e)[i]
        })
    }

    #[test]
    fn tiny_boxes() {
        let g = green(&BoxRegion::new(1, 1).unwrap()).unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        for (w, h) in [(1, 2), (2, 1)] {
            let g = green(&BoxRegion::new(w, h).unwrap()).unwrap();
            assert!((g.get(0, 0) - 16.0 / 15.0).abs() < 1e-15);
            assert!((g.get(1, 1) - 16.0 / 15.0).abs() < 1e-15);
            assert!((g.get(0, 1) - 4.0 / 15.0).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_dense_inverse_and_inverts_operator() {
        for (w, h) in [(3, 5), (6, 4), (7, 7)] {
            let region = BoxRegion::new(w, h).unwrap();
            let g = green(&region).unwrap();
            let inv = dense_operator(&region).try_inverse().unwrap();
            for i in 0..region.sites() {
                for j in 0..region.sites() {
                    assert!((g.get(i, j) - inv[(i, j)]).abs() < 1e-12);
                }
                let lg = apply_operator(&region, &g.column(i));
                for (k, v) in lg.iter().enumerate() {
                    let target = if k == i { 1.0 } else { 0.0 };
                    assert!((v - target).abs() < 1e-10);
                }
                assert!(g.get(i, i) >= 1.0);
            }
        }
    }

    #[test]
    fn spectral_assembly_matches_cholesky() {
        for (w, h) in [(8, 8), (5, 9), (12, 3)] {
            let region = BoxRegion::new(w, h).unwrap();
            let a = green(&region).unwrap();
            let b = spectral_green(&region).unwrap();
            for i in 0..region.sites() {
                for j in 0..region.sites() {
                    assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-10, "{w}x{h} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let big = BoxRegion::new(129, 128).unwrap();
        assert!(matches!(green(&big), Err(Error::Capacity(_))));
    }

    #[test]
    fn export_has_triangle_shape() {
        let region = BoxRegion::new(2, 2).unwrap();
        let mut buf = Vec::new();
        green(&region).unwrap().write_lower_triangle(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "2 2");
        for (i, line) in lines[1..].iter().enumerate() {
            assert_eq!(line.split(' ').count(), i + 1);
        }
    }
}
