//! Dense symmetric solves shared by the regression and analysis modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Diagonal shifts tried in order when a factorization fails.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Cholesky factor of `M + δI` for the smallest `δ` in [`JITTER_LADDER`] that succeeds.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter(format!(
                "cannot factor a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix to factor".into()));
        }
        let sym = (m + m.transpose()) * 0.5;
        for &jitter in &JITTER_LADDER {
            let mut shifted = sym.clone();
            if jitter > 0.0 {
                for i in 0..shifted.nrows() {
                    shifted[(i, i)] += jitter;
                }
            }
            if let Some(chol) = Cholesky::new(shifted) {
                return Ok(SpdFactor { chol, jitter });
            }
        }
        Err(Error::Singular {
            jitter: *JITTER_LADDER.last().unwrap(),
            detail: format!("{}x{} system", m.nrows(), m.ncols()),
        })
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mut(&self, b: &mut DVector<f64>) {
        self.chol.solve_mut(b)
    }

    /// Lower-triangular factor `L` with `LLᵀ = M + δI`.
    pub fn l(&self) -> DMatrix<f64> {
        self.chol.l()
    }
}

/// Solve `M x = b` for symmetric positive (semi)definite `M`.
pub fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(SpdFactor::new(m)?.solve(b))
}

/// Eigenpairs of the symmetric-definite pencil `A v = λ K v`.
///
/// Eigenvalues are returned in nonincreasing order; eigenvectors are the
/// columns of the second matrix and satisfy `vᵀ K v = 1`.
pub fn generalized_symmetric_eigen(
    a: &DMatrix<f64>,
    k: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if a.shape() != k.shape() {
        return Err(Error::DimensionMismatch {
            expected: k.nrows(),
            found: a.nrows(),
        });
    }
    let n = k.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let factor = SpdFactor::new(k)?;
    let l = factor.l();
    // C = L⁻¹ A L⁻ᵀ
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| singular(factor.jitter()))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| singular(factor.jitter()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let lt = l.transpose();
    let vecs = lt
        .solve_upper_triangular(&eig.eigenvectors)
        .ok_or_else(|| singular(factor.jitter()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok((values, vectors))
}

fn singular(jitter: f64) -> Error {
    Error::Singular {
        jitter,
        detail: "triangular solve".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let x = solve_spd(&m, &b).unwrap();
        assert!((&m * &x - &b).norm() < 1e-14);
    }

    #[test]
    fn jitter_rescues_semidefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let f = SpdFactor::new(&m).unwrap();
        assert!(f.jitter() > 0.0 && f.jitter() <= 1e-6);
    }

    #[test]
    fn indefinite_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(SpdFactor::new(&m), Err(Error::Singular { .. })));
    }

    #[test]
    fn generalized_eigen_relation() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 0.7]);
        let k = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, 1.0, 0.4, 0.0, 0.4, 1.0]);
        let (vals, vecs) = generalized_symmetric_eigen(&a, &k).unwrap();
        for i in 0..3 {
            let v = vecs.column(i).into_owned();
            let r = &a * &v - &k * &v * vals[i];
            assert!(r.norm() < 1e-12);
            assert!(((v.transpose() * &k * &v)[0] - 1.0).abs() < 1e-12);
        }
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
    }
}
