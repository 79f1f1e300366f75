use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::EigenAngles;
use crate::error::{domain, Error, Result};
use crate::rng::CounterRng;

pub const MAX_HAAR_N: usize = 4096;

/// A Haar unitary together with its eigenangles; the matrix is kept for determinant checks.
#[derive(Clone, Debug)]
pub struct HaarSample {
    pub matrix: DMatrix<Complex64>,
    pub angles: EigenAngles,
}

/// Haar unitary from a complex Ginibre matrix: `Q diag(R_ii / |R_ii|)` where `G = QR`.
/// Entries are `(a + ib)/sqrt(2)` read column-major from stream `0` under `seed`.
pub fn haar_matrix(n: usize, seed: u64) -> Result<DMatrix<Complex64>> {
    if n < 1 {
        return domain("matrix size must be at least 1");
    }
    if n > MAX_HAAR_N {
        return Err(Error::Capacity(format!("dense Haar sampling limited to N <= {MAX_HAAR_N}")));
    }
    let mut rng = CounterRng::new(seed, 0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re = rng.normal();
        let im = rng.normal();
        Complex64::new(s * re, s * im)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Eigenangles of a unitary matrix from its complex Schur form.
pub fn unitary_angles(u: &DMatrix<Complex64>, seed: u64) -> Result<EigenAngles> {
    let n = u.nrows();
    let schur = Schur::try_new(u.clone(), 1e-14, 0)
        .ok_or_else(|| Error::Singular("Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    let angles: Vec<f64> = (0..n).map(|i| t[(i, i)].arg()).collect();
    Ok(EigenAngles::from_unsorted(angles, seed))
}

/// `sample_haar` on the dense route: Ginibre, QR with phase fix, Schur eigensolve.
pub fn sample_haar(n: usize, seed: u64) -> Result<EigenAngles> {
    if n < 2 {
        return domain("N must be at least 2");
    }
    unitary_angles(&haar_matrix(n, seed)?, seed)
}

pub fn sample_haar_with_matrix(n: usize, seed: u64) -> Result<HaarSample> {
    let matrix = haar_matrix(n, seed)?;
    let angles = unitary_angles(&matrix, seed)?;
    Ok(HaarSample { matrix, angles })
}

/// `log |det(e^{i theta} I - U)|` by LU factorization.
pub fn log_abs_det_shift(u: &DMatrix<Complex64>, theta: f64) -> f64 {
    let n = u.nrows();
    let z = Complex64::from_polar(1.0, theta);
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { z - u[(i, j)] } else { -u[(i, j)] });
    let lu = m.lu();
    let uu = lu.u();
    (0..n).map(|i| uu[(i, i)].norm().ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_is_unitary() {
        let u = haar_matrix(12, 3).unwrap();
        let p = u.adjoint() * &u;
        for i in 0..12 {
            for j in 0..12 {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - Complex64::new(t, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn angles_reproduce_the_determinant() {
        let s = sample_haar_with_matrix(24, 8).unwrap();
        let det: Complex64 = s.matrix.determinant();
        let from_angles: f64 = s.angles.angles.iter().sum();
        let diff = (det.arg() - from_angles).rem_euclid(std::f64::consts::TAU);
        assert!(diff < 1e-9 || std::f64::consts::TAU - diff < 1e-9);
        assert!((det.norm() - 1.0).abs() < 1e-10);
    }
}
