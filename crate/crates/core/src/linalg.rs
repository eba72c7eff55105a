//! Thin adapters between `ndarray` storage and the `faer` eigensolvers.

use faer::{Mat, Side};
use ndarray::Array2;

use crate::{Error, Result, C64};

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[[i, j]]);
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Diagonalization(format!("{e:?}")))
}

/// Eigenvalues and right eigenvectors (as columns) of a general complex matrix.
pub fn eigen(a: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let m = Mat::<C64>::from_fn(n, n, |i, j| a[[i, j]]);
    let evd = m
        .eigen()
        .map_err(|e| Error::Diagonalization(format!("{e:?}")))?;
    let values: Vec<C64> = (0..n).map(|i| evd.S()[i]).collect();
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Diagonalization("non-finite eigenvalue".into()));
    }
    let u = evd.U();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_eigenpairs_of_non_hermitian_matrix() {
        let a = ndarray::arr2(&[
            [C64::new(1.0, -0.5), C64::new(0.3, 0.2)],
            [C64::new(0.3, 0.2), C64::new(-0.4, -0.1)],
        ]);
        let (vals, vecs) = eigen(&a).unwrap();
        for k in 0..2 {
            let v = vecs.column(k);
            let av = a.dot(&v);
            for i in 0..2 {
                assert!((av[i] - vals[k] * v[i]).norm() < 1e-12);
            }
        }
    }
}
