//! Small dense helpers shared by the circuit and projection layers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalue floor, relative to the largest eigenvalue, below which a
/// symmetric matrix is treated as singular.
pub const EIGEN_FLOOR: f64 = 1e-12;

pub fn is_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= rel_tol * scale))
}

/// Verifies that `m` is symmetric positive-definite, naming it in the error.
pub fn check_spd(m: &DMatrix<f64>, name: &'static str) -> Result<()> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            matrix: name,
            reason: "non-finite entry".into(),
        });
    }
    if !is_symmetric(m, 1e-12) {
        return Err(Error::NotPositiveDefinite {
            matrix: name,
            reason: "matrix is not symmetric".into(),
        });
    }
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max <= 0.0 || min <= EIGEN_FLOOR * max {
        return Err(Error::NotPositiveDefinite {
            matrix: name,
            reason: format!("eigenvalues span [{min:e}, {max:e}]"),
        });
    }
    Ok(())
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn sym_sqrt(m: &DMatrix<f64>, name: &'static str) -> Result<DMatrix<f64>> {
    check_spd(m, name)?;
    let eig = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let r = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    Ok(symmetrize(&r))
}

pub fn sym_inverse(m: &DMatrix<f64>, name: &'static str) -> Result<DMatrix<f64>> {
    check_spd(m, name)?;
    let inv = m.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
        Error::NotPositiveDefinite {
            matrix: name,
            reason: "Cholesky factorization failed".into(),
        }
    })?;
    Ok(symmetrize(&inv))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let m = DMatrix::from_row_slice(2, 2, &[0.124, 0.0079, 0.0079, 0.124]);
        let s = sym_sqrt(&m, "test").unwrap();
        assert!((&s * &s - &m).amax() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = check_spd(&m, "capacitance").unwrap_err();
        assert!(err.to_string().contains("capacitance"));
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.2, 1.0]);
        assert!(check_spd(&m, "x").is_err());
    }
}
