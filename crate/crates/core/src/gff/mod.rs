//! Discrete 2D Gaussian free field with zero boundary values on a rectangle.
//!
//! Interior sites of a `width x height` box have coordinates `0 <= x < width`,
//! `0 <= y < height` and row-major index `y * width + x`. The boundary ring sits at
//! `x = -1, width` and `y = -1, height`, where the field is zero. The operator is the
//! averaged Laplacian `(-Δf)(v) = f(v) - (1/4) sum_{w ~ v} f(w)`, so the Green function is the
//! expected number of visits of simple random walk before exit.

mod green;
mod harmonic;
mod sampler;

use std::io::{Read, Write};

pub use green::{apply_operator, green, spectral_green, GreenMatrix, MAX_GREEN_SITES, MAX_SPECTRAL_GREEN_SITES};
pub use harmonic::{
    branching_scale, exit_distribution, harmonic_average, multiscale_increments, neighbourhood, ExitDistribution,
    MultiscalePlan, Neighbourhood,
};
pub use sampler::{sample_field, DenseSampler, MaskedRegion, SpectralSampler, MAX_DENSE_SITES, MAX_SPECTRAL_SITES};

use crate::error::{domain, Error, Result};
use crate::Real;

/// Rectangular interior region. `origin` places the box in `Z^2` and only matters for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoxRegion {
    pub width: usize,
    pub height: usize,
    pub origin: (i64, i64),
}

impl BoxRegion {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return domain("box sides must be at least 1");
        }
        Ok(Self {
            width,
            height,
            origin: (0, 0),
        })
    }

    pub fn sites(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.width, i / self.width)
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }
}

/// Axis-aligned sub-rectangle of interior sites, `x0 <= x < x0 + width`, same for `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubBox {
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
}

impl SubBox {
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0
            && y >= self.y0
            && x < self.x0 + self.width as i64
            && y < self.y0 + self.height as i64
    }

    /// Whether the sub-box, together with its boundary ring, stays inside the box closure.
    pub fn fits(&self, region: &BoxRegion) -> bool {
        self.width >= 1
            && self.height >= 1
            && self.x0 >= 0
            && self.y0 >= 0
            && self.x0 as usize + self.width <= region.width
            && self.y0 as usize + self.height <= region.height
    }

    pub fn whole(region: &BoxRegion) -> Self {
        Self {
            x0: 0,
            y0: 0,
            width: region.width,
            height: region.height,
        }
    }
}

/// A field realization over the interior of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct GffSample<T> {
    pub region: BoxRegion,
    pub seed: u64,
    pub values: Vec<T>,
}

impl<T: Real> GffSample<T> {
    /// Value at `(x, y)`, zero anywhere outside the interior (in particular on the boundary ring).
    #[inline]
    pub fn at(&self, x: i64, y: i64) -> T {
        if self.region.contains(x, y) {
            self.values[self.region.index(x as usize, y as usize)]
        } else {
            T::zero()
        }
    }
}

const DUMP_MAGIC: &[u8; 8] = b"LCGFF001";

/// Binary dump: magic, `width` and `height` (u32), `seed` (u64), then row-major f64 values,
/// all little-endian.
pub fn write_dump<T: Real, W: Write>(sample: &GffSample<T>, mut w: W) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(sample.region.width as u32).to_le_bytes())?;
    w.write_all(&(sample.region.height as u32).to_le_bytes())?;
    w.write_all(&sample.seed.to_le_bytes())?;
    for x in &sample.values {
        w.write_all(&x.as_f64().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<GffSample<f64>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Format("not a free field dump".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let width = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let height = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let seed = u64::from_le_bytes(b8);
    let region = BoxRegion::new(width, height)?;
    let mut values = Vec::with_capacity(region.sites());
    for _ in 0..region.sites() {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok(GffSample {
        region,
        seed,
        values,
    })
}
