use super::green::{eigenvalues, sine_table};
use super::{BoxRegion, GffSample, SubBox};
use crate::error::{domain, Result};
use crate::Real;

/// Exit law of simple random walk from `v` out of a sub-box `B`, over the boundary ring of `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExitDistribution {
    /// Boundary points in box coordinates; they may lie on the box's own boundary ring.
    pub points: Vec<(i64, i64)>,
    pub weights: Vec<f64>,
}

/// Row `G_B(v, .)` over the sites of `b`, from the sine expansion on `b`.
fn green_row(b: &SubBox, v: (i64, i64)) -> Vec<f64> {
    let (w, h) = (b.width, b.height);
    let sub = BoxRegion::new(w, h).expect("nonempty sub-box");
    let sx = sine_table(w);
    let sy = sine_table(h);
    let lam = eigenvalues(&sub);
    let (vx, vy) = ((v.0 - b.x0) as usize, (v.1 - b.y0) as usize);
    // tmp[k][x] = sum_j sx_j(vx) sy_k(vy) / lambda_jk * sx_j(x)
    let mut tmp = vec![0.0; h * w];
    for k in 0..h {
        for j in 0..w {
            let c = sx[j * w + vx] * sy[k * h + vy] / lam[k * w + j];
            for x in 0..w {
                tmp[k * w + x] += c * sx[j * w + x];
            }
        }
    }
    let mut row = vec![0.0; h * w];
    for y in 0..h {
        for k in 0..h {
            let s = sy[k * h + y];
            for x in 0..w {
                row[y * w + x] += s * tmp[k * w + x];
            }
        }
    }
    row
}

/// `p_u(v) = (1/4) sum_{w in B, w ~ u} G_B(v, w)` for `u` on the boundary ring of `B`.
pub fn exit_distribution(region: &BoxRegion, b: &SubBox, v: (i64, i64)) -> Result<ExitDistribution> {
    if !b.fits(region) {
        return domain("sub-box does not fit inside the box");
    }
    if !b.contains(v.0, v.1) {
        return domain(format!("site {v:?} is not interior to the sub-box"));
    }
    let row = green_row(b, v);
    let (w, h) = (b.width, b.height);
    let g = |x: usize, y: usize| 0.25 * row[y * w + x];
    let mut points = Vec::with_capacity(2 * (w + h));
    let mut weights = Vec::with_capacity(2 * (w + h));
    for x in 0..w {
        points.push((b.x0 + x as i64, b.y0 - 1));
        weights.push(g(x, 0));
        points.push((b.x0 + x as i64, b.y0 + h as i64));
        weights.push(g(x, h - 1));
    }
    for y in 0..h {
        points.push((b.x0 - 1, b.y0 + y as i64));
        weights.push(g(0, y));
        points.push((b.x0 + w as i64, b.y0 + y as i64));
        weights.push(g(w - 1, y));
    }
    Ok(ExitDistribution { points, weights })
}

impl ExitDistribution {
    /// `sum_u p_u X_u`.
    pub fn apply<T: Real>(&self, field: &GffSample<T>) -> T {
        let mut s = T::zero();
        for (&(x, y), &p) in self.points.iter().zip(&self.weights) {
            s += T::cst(p) * field.at(x, y);
        }
        s
    }
}

/// Conditional expectation of `X_v` given the field outside `B`.
pub fn harmonic_average<T: Real>(field: &GffSample<T>, b: &SubBox, v: (i64, i64)) -> Result<T> {
    Ok(exit_distribution(&field.region, b, v)?.apply(field))
}

/// A square neighbourhood `[v]_l`, possibly clipped to the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbourhood {
    pub sub: SubBox,
    pub clipped: bool,
}

/// Square of side `round(2^{(n - l)/2})` around `v`, extending `floor((s - 1)/2)` sites below
/// `v` in each direction, intersected with the box. Scale `0` is the whole box.
pub fn neighbourhood(region: &BoxRegion, v: (i64, i64), n: u32, l: u32) -> Neighbourhood {
    if l == 0 {
        return Neighbourhood {
            sub: SubBox::whole(region),
            clipped: false,
        };
    }
    let side = 2f64.powf((n - l) as f64 / 2.0).round().max(1.0) as i64;
    let lo = (side - 1) / 2;
    let clip = |start: i64, len: usize| {
        let a = start.max(0);
        let b = (start + side).min(len as i64);
        (a, (b - a) as usize, a != start || b != start + side)
    };
    let (x0, width, cx) = clip(v.0 - lo, region.width);
    let (y0, height, cy) = clip(v.1 - lo, region.height);
    Neighbourhood {
        sub: SubBox {
            x0,
            y0,
            width,
            height,
        },
        clipped: cx || cy,
    }
}

/// Precomputed harmonic weights for `X_v(l)`, `l = 0..=n`, reusable across samples.
#[derive(Clone, Debug)]
pub struct MultiscalePlan {
    pub region: BoxRegion,
    pub site: (i64, i64),
    pub n: u32,
    pub neighbourhoods: Vec<Neighbourhood>,
    // weights[l]: (interior site index, weight); boundary points of the box carry zero field
    // and are dropped. Level n is the site itself.
    weights: Vec<Vec<(usize, f64)>>,
}

impl MultiscalePlan {
    pub fn new(region: &BoxRegion, v: (i64, i64), n: u32) -> Result<Self> {
        if n == 0 {
            return domain("need at least one scale");
        }
        if !region.contains(v.0, v.1) {
            return domain(format!("site {v:?} is outside the box"));
        }
        let mut neighbourhoods = Vec::with_capacity(n as usize + 1);
        let mut weights = Vec::with_capacity(n as usize + 1);
        for l in 0..=n {
            let nb = neighbourhood(region, v, n, l);
            neighbourhoods.push(nb);
            if l == n {
                weights.push(vec![(region.index(v.0 as usize, v.1 as usize), 1.0)]);
                continue;
            }
            let exit = exit_distribution(region, &nb.sub, v)?;
            let w = exit
                .points
                .iter()
                .zip(&exit.weights)
                .filter(|((x, y), _)| region.contains(*x, *y))
                .map(|(&(x, y), &p)| (region.index(x as usize, y as usize), p))
                .collect();
            weights.push(w);
        }
        Ok(Self {
            region: *region,
            site: v,
            n,
            neighbourhoods,
            weights,
        })
    }

    /// `X_v(l)` for `l = 0..=n`.
    pub fn levels<T: Real>(&self, field: &GffSample<T>) -> Vec<T> {
        self.weights
            .iter()
            .map(|w| {
                let mut s = T::zero();
                for &(i, p) in w {
                    s += T::cst(p) * field.values[i];
                }
                s
            })
            .collect()
    }

    /// `Y_v(l) = X_v(l) - X_v(l - 1)` for `l = 1..=n`.
    pub fn increments<T: Real>(&self, field: &GffSample<T>) -> Vec<T> {
        let x = self.levels(field);
        x.windows(2).map(|p| p[1] - p[0]).collect()
    }

    /// Whether `[v]_l` was cut by the box edge.
    pub fn clipped(&self, l: u32) -> bool {
        self.neighbourhoods[l as usize].clipped
    }
}

pub fn multiscale_increments<T: Real>(field: &GffSample<T>, v: (i64, i64), n: u32) -> Result<Vec<T>> {
    Ok(MultiscalePlan::new(&field.region, v, n)?.increments(field))
}

/// Largest `l` at which the closures (box plus boundary ring) of `[u]_l` and `[v]_l` meet.
pub fn branching_scale(region: &BoxRegion, u: (i64, i64), v: (i64, i64), n: u32) -> u32 {
    let meets = |l: u32| {
        let (a, b) = if l == n {
            let one = |p: (i64, i64)| SubBox {
                x0: p.0,
                y0: p.1,
                width: 1,
                height: 1,
            };
            (one(u), one(v))
        } else {
            (neighbourhood(region, u, n, l).sub, neighbourhood(region, v, n, l).sub)
        };
        let overlap = |a0: i64, al: usize, b0: i64, bl: usize| {
            a0 - 1 <= b0 + bl as i64 && b0 - 1 <= a0 + al as i64
        };
        overlap(a.x0, a.width, b.x0, b.width) && overlap(a.y0, a.height, b.y0, b.height)
    };
    (0..=n).rev().find(|&l| meets(l)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gff::sample_field;
    use crate::rng::CounterRng;

    #[test]
    fn single_site_exits_uniformly() {
        let region = BoxRegion::new(5, 5).unwrap();
        let b = SubBox {
            x0: 2,
            y0: 2,
            width: 1,
            height: 1,
        };
        let e = exit_distribution(&region, &b, (2, 2)).unwrap();
        assert_eq!(e.points.len(), 4);
        for p in e.weights {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let region = BoxRegion::new(20, 17).unwrap();
        let mut rng = CounterRng::new(5, 0);
        for _ in 0..30 {
            let r = |rng: &mut CounterRng, m: usize| (rng.uniform() * m as f64) as usize;
            let x0 = r(&mut rng, 15);
            let y0 = r(&mut rng, 12);
            let b = SubBox {
                x0: x0 as i64,
                y0: y0 as i64,
                width: 1 + r(&mut rng, 20 - x0),
                height: 1 + r(&mut rng, 17 - y0),
            };
            let v = (
                b.x0 + r(&mut rng, b.width) as i64,
                b.y0 + r(&mut rng, b.height) as i64,
            );
            let e = exit_distribution(&region, &b, v).unwrap();
            assert!(e.weights.iter().all(|&p| p >= -1e-15));
            assert!((e.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_sites_outside() {
        let region = BoxRegion::new(6, 6).unwrap();
        let b = SubBox {
            x0: 1,
            y0: 1,
            width: 3,
            height: 3,
        };
        assert!(exit_distribution(&region, &b, (0, 2)).is_err());
        assert!(exit_distribution(&region, &b, (4, 2)).is_err());
    }

    #[test]
    fn harmonic_average_linear_cases() {
        let region = BoxRegion::new(9, 9).unwrap();
        let b = SubBox {
            x0: 2,
            y0: 3,
            width: 4,
            height: 3,
        };
        let e = exit_distribution(&region, &b, (3, 4)).unwrap();
        let constant = GffSample {
            region,
            seed: 0,
            values: vec![2.5f64; 81],
        };
        assert!((e.apply(&constant) - 2.5).abs() < 1e-12);
        let zero = GffSample {
            region,
            seed: 0,
            values: vec![0.0f64; 81],
        };
        assert_eq!(harmonic_average(&zero, &b, (3, 4)).unwrap(), 0.0);
    }

    #[test]
    fn neighbourhood_sides_and_clipping() {
        let region = BoxRegion::new(64, 64).unwrap();
        let nb = neighbourhood(&region, (32, 32), 12, 4);
        assert_eq!((nb.sub.width, nb.sub.height), (16, 16));
        assert_eq!((nb.sub.x0, nb.sub.y0), (25, 25));
        assert!(!nb.clipped);
        let nb = neighbourhood(&region, (1, 32), 12, 4);
        assert!(nb.clipped && nb.sub.x0 == 0 && nb.sub.width == 10);
        assert_eq!(neighbourhood(&region, (5, 5), 12, 11).sub.width, 1);
    }

    #[test]
    fn increments_telescope() {
        let region = BoxRegion::new(32, 32).unwrap();
        let plan = MultiscalePlan::new(&region, (16, 16), 10).unwrap();
        for seed in 0..5 {
            let f = sample_field::<f64>(&region, seed).unwrap();
            let x = plan.levels(&f);
            assert_eq!(x[0], 0.0);
            assert_eq!(x[10], f.at(16, 16));
            let y = plan.increments(&f);
            let total: f64 = y.iter().sum();
            assert!((x[0] + total - f.at(16, 16)).abs() < 1e-12);
        }
    }

    #[test]
    fn branching_scale_orders_with_distance() {
        let region = BoxRegion::new(64, 64).unwrap();
        let c = (32, 32);
        assert_eq!(branching_scale(&region, c, c, 12), 12);
        let near = branching_scale(&region, c, (34, 32), 12);
        let far = branching_scale(&region, c, (48, 32), 12);
        assert!(near > far, "{near} {far}");
    }
}
