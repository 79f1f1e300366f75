use nalgebra::{DMatrix, DVector};

use super::green::{eigenvalues, sine_table};
use super::{BoxRegion, GffSample};
use crate::error::{domain, Error, Result};
use crate::rng::CounterRng;
use crate::Real;

pub const MAX_SPECTRAL_SITES: usize = 1 << 20;
pub const MAX_DENSE_SITES: usize = 1 << 12;

/// Exact sampler in the sine eigenbasis: i.i.d. standard normal mode coefficients scaled by
/// `lambda^{-1/2}`, then a separable sine transform back to sites in `O(N^{3/2})`.
#[derive(Clone, Debug)]
pub struct SpectralSampler<T> {
    region: BoxRegion,
    sx: Vec<T>,
    sy: Vec<T>,
    inv_sqrt_lambda: Vec<T>,
}

impl<T: Real> SpectralSampler<T> {
    pub fn new(region: &BoxRegion) -> Result<Self> {
        if region.sites() > MAX_SPECTRAL_SITES {
            return Err(Error::Capacity(format!(
                "spectral sampler limited to {MAX_SPECTRAL_SITES} sites, box has {}",
                region.sites()
            )));
        }
        let conv = |v: Vec<f64>| v.into_iter().map(T::cst).collect::<Vec<T>>();
        Ok(Self {
            region: *region,
            sx: conv(sine_table(region.width)),
            sy: conv(sine_table(region.height)),
            inv_sqrt_lambda: conv(eigenvalues(region).into_iter().map(|l| 1.0 / l.sqrt()).collect()),
        })
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    /// Mode coefficients are read in `(k, j)` row-major order from stream `0` under `seed`.
    pub fn sample(&self, seed: u64) -> GffSample<T> {
        let (w, h) = (self.region.width, self.region.height);
        let mut rng = CounterRng::new(seed, 0);
        let coef: Vec<T> = self
            .inv_sqrt_lambda
            .iter()
            .map(|&s| T::cst(rng.normal()) * s)
            .collect();
        // tmp[k][x] = sum_j coef[k][j] sx[j][x]
        let mut tmp = vec![T::zero(); h * w];
        for k in 0..h {
            let row = &mut tmp[k * w..(k + 1) * w];
            for j in 0..w {
                let c = coef[k * w + j];
                let s = &self.sx[j * w..(j + 1) * w];
                for x in 0..w {
                    row[x] += c * s[x];
                }
            }
        }
        // values[y][x] = sum_k sy[k][y] tmp[k][x]
        let mut values = vec![T::zero(); h * w];
        for y in 0..h {
            let out = &mut values[y * w..(y + 1) * w];
            for k in 0..h {
                let s = self.sy[k * h + y];
                let t = &tmp[k * w..(k + 1) * w];
                for x in 0..w {
                    out[x] += s * t[x];
                }
            }
        }
        GffSample {
            region: self.region,
            seed,
            values,
        }
    }
}

/// One-shot spectral sample. Reuse a [`SpectralSampler`] across replicas instead.
pub fn sample_field<T: Real>(region: &BoxRegion, seed: u64) -> Result<GffSample<T>> {
    Ok(SpectralSampler::new(region)?.sample(seed))
}

/// A general finite region inside a bounding rectangle; sites outside the mask are boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedRegion {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

impl MaskedRegion {
    pub fn rectangle(region: &BoxRegion) -> Self {
        Self {
            width: region.width,
            height: region.height,
            mask: vec![true; region.sites()],
        }
    }

    /// Row-major indices (in the bounding rectangle) of the interior sites.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }
}

/// Fallback sampler for arbitrary regions: `X = L^{-T} xi` where `-Δ = L L^T`.
#[derive(Clone, Debug)]
pub struct DenseSampler {
    region: MaskedRegion,
    sites: Vec<usize>,
    lt: DMatrix<f64>,
}

impl DenseSampler {
    pub fn new(region: &MaskedRegion) -> Result<Self> {
        if region.mask.len() != region.width * region.height {
            return domain("mask size does not match the bounding rectangle");
        }
        let sites = region.interior();
        let n = sites.len();
        if n == 0 {
            return domain("region has no interior sites");
        }
        if n > MAX_DENSE_SITES {
            return Err(Error::Capacity(format!(
                "dense sampler limited to {MAX_DENSE_SITES} sites, region has {n}"
            )));
        }
        let mut pos = vec![usize::MAX; region.mask.len()];
        for (k, &s) in sites.iter().enumerate() {
            pos[s] = k;
        }
        let (w, h) = (region.width, region.height);
        let mut a = DMatrix::<f64>::identity(n, n);
        for (k, &s) in sites.iter().enumerate() {
            let (x, y) = (s % w, s / w);
            let mut nb = Vec::with_capacity(4);
            if x > 0 {
                nb.push(s - 1);
            }
            if x + 1 < w {
                nb.push(s + 1);
            }
            if y > 0 {
                nb.push(s - w);
            }
            if y + 1 < h {
                nb.push(s + w);
            }
            for t in nb {
                if region.mask[t] {
                    a[(k, pos[t])] = -0.25;
                }
            }
        }
        let chol = a
            .cholesky()
            .ok_or_else(|| Error::Singular("operator is not positive definite".into()))?;
        Ok(Self {
            region: region.clone(),
            sites,
            lt: chol.l().transpose(),
        })
    }

    /// Values over the bounding rectangle, zero off the mask. Normals from stream `0` under `seed`.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = CounterRng::new(seed, 0);
        let xi = DVector::from_fn(self.sites.len(), |_, _| rng.normal());
        let x = self
            .lt
            .solve_upper_triangular(&xi)
            .expect("Cholesky factor has a positive diagonal");
        let mut out = vec![0.0; self.region.mask.len()];
        for (k, &s) in self.sites.iter().enumerate() {
            out[s] = x[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gff::green;

    // Monte Carlo covariance of both samplers against the Cholesky Green matrix.
    #[test]
    fn samplers_have_green_covariance() {
        let region = BoxRegion::new(3, 4).unwrap();
        let g = green(&region).unwrap();
        let spectral = SpectralSampler::<f64>::new(&region).unwrap();
        let dense = DenseSampler::new(&MaskedRegion::rectangle(&region)).unwrap();
        let reps = 40_000;
        let n = region.sites();
        for which in 0..2 {
            let mut sxx = vec![0.0; n * n];
            for r in 0..reps {
                let v = if which == 0 {
                    spectral.sample(r as u64).values
                } else {
                    dense.sample(r as u64)
                };
                for i in 0..n {
                    for j in 0..n {
                        sxx[i * n + j] += v[i] * v[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let c = sxx[i * n + j] / reps as f64;
                    let gij = g.get(i, j);
                    let se = ((g.get(i, i) * g.get(j, j) + gij * gij) / reps as f64).sqrt();
                    assert!((c - gij).abs() < 5.0 * se, "sampler {which} ({i},{j}): {c} vs {gij}");
                }
            }
        }
    }

    #[test]
    fn f32_sampler_tracks_f64() {
        let region = BoxRegion::new(6, 5).unwrap();
        let a = sample_field::<f64>(&region, 4).unwrap();
        let b = sample_field::<f32>(&region, 4).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - *y as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn dense_sampler_on_an_l_shape() {
        let mut mask = vec![true; 16];
        for y in 2..4 {
            for x in 2..4 {
                mask[y * 4 + x] = false;
            }
        }
        let s = DenseSampler::new(&MaskedRegion {
            width: 4,
            height: 4,
            mask: mask.clone(),
        })
        .unwrap();
        let v = s.sample(1);
        for i in 0..16 {
            assert_eq!(v[i] == 0.0, !mask[i]);
        }
    }
}
