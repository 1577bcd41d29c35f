//! Kernel evaluation and Gram assembly for the scattered basis.
//!
//! Two families are supported, both normalized so that `k(x, x) = 1`:
//!
//! * Matérn-3/2: `(1 + √3 r/β) exp(−√3 r/β)`
//! * Gaussian: `exp(−r/β)`
//!
//! where `r` is `‖x − y‖` ([`DistanceMode::Norm`]) or `‖x − y‖²`
//! ([`DistanceMode::SquaredNorm`]).
//!
//! The Matérn kernel in `SquaredNorm` mode is *not* positive definite: its
//! Fourier transform changes sign, and Gram matrices of moderately dense point
//! sets have negative eigenvalues. It is kept for comparison with results that
//! use that form, but any Cholesky-based routine will reject its Gram matrices
//! on such sets. `Norm` is the default for Matérn; `SquaredNorm` is the
//! default for the Gaussian (where it gives the usual squared-exponential
//! kernel; `Norm` gives the exponential kernel).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::point::{check_same_dim, squared_distance, Point};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Matern32,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    /// `r = ‖x − y‖²`
    SquaredNorm,
    /// `r = ‖x − y‖`
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    beta: f64,
    distance_mode: DistanceMode,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, beta: f64, distance_mode: DistanceMode) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel length scale must be positive and finite, got {beta}"
            )));
        }
        Ok(KernelSpec {
            family,
            beta,
            distance_mode,
        })
    }

    /// Matérn-3/2 in the standard (`Norm`) distance mode.
    pub fn matern(beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Matern32, beta, DistanceMode::Norm)
    }

    /// Squared-exponential kernel `exp(−‖x − y‖²/β)`.
    pub fn gaussian(beta: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, beta, DistanceMode::SquaredNorm)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn distance_mode(&self) -> DistanceMode {
        self.distance_mode
    }

    /// `k(x, y)`, checking dimensions and finiteness.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_same_dim(x.len(), y.len())?;
        if x.is_empty() {
            return Err(Error::Empty("kernel argument has no coordinates".into()));
        }
        if x.iter().chain(y).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("kernel argument".into()));
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2 = squared_distance(x, y);
        let r = match self.distance_mode {
            DistanceMode::SquaredNorm => d2,
            DistanceMode::Norm => d2.sqrt(),
        };
        match self.family {
            KernelFamily::Matern32 => {
                let s = SQRT_3 * r / self.beta;
                (1.0 + s) * (-s).exp()
            }
            KernelFamily::Gaussian => (-r / self.beta).exp(),
        }
    }

    /// The constant `K̄` with `√k(x, x) ≤ K̄`; both families are normalized.
    pub fn sup_bound(&self) -> f64 {
        1.0
    }

    /// Vector `(k(ξ_1, x), …, k(ξ_N, x))`.
    pub fn kernel_vector(&self, centers: &[Point], x: &[f64]) -> Result<DVector<f64>> {
        if centers.is_empty() {
            return Err(Error::Empty("kernel vector over an empty center set".into()));
        }
        for c in centers {
            check_same_dim(c.dim(), x.len())?;
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("kernel argument".into()));
        }
        Ok(self.kernel_vector_unchecked(centers, x))
    }

    pub(crate) fn kernel_vector_unchecked(&self, centers: &[Point], x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(centers.len(), centers.iter().map(|c| self.eval_unchecked(c, x)))
    }

    /// Cross matrix `[k(rows_i, cols_j)]`. An empty side yields an empty matrix.
    pub fn gram_matrix<P: AsRef<[f64]> + Sync>(&self, rows: &[P], cols: &[P]) -> Result<DMatrix<f64>> {
        check_points(rows.iter().chain(cols).map(AsRef::as_ref))?;
        Ok(self.cross_unchecked(rows, cols))
    }

    /// Square Gram matrix of `points`, symmetrized as `(K + Kᵀ)/2`.
    pub fn gram_square<P: AsRef<[f64]> + Sync>(&self, points: &[P]) -> Result<DMatrix<f64>> {
        let k = self.gram_matrix(points, points)?;
        Ok(symmetrize(&k))
    }

    pub(crate) fn cross_unchecked<P: AsRef<[f64]> + Sync>(&self, rows: &[P], cols: &[P]) -> DMatrix<f64> {
        let n = rows.len();
        let m = cols.len();
        let mut data = vec![0.0; n * m];
        if n > 0 {
            // column-major: each column is independent
            data.par_chunks_mut(n)
                .zip(cols.par_iter())
                .for_each(|(col, y)| {
                    for (entry, x) in col.iter_mut().zip(rows) {
                        *entry = self.eval_unchecked(x.as_ref(), y.as_ref());
                    }
                });
        }
        DMatrix::from_vec(n, m, data)
    }
}

fn check_points<'a>(mut pts: impl Iterator<Item = &'a [f64]>) -> Result<()> {
    let Some(first) = pts.next() else {
        return Ok(());
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::Empty("point has no coordinates".into()));
    }
    if first.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("point".into()));
    }
    for p in pts {
        check_same_dim(d, p.len())?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point".into()));
        }
    }
    Ok(())
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `αᵀ K β`, the native-space inner product of two expansions over the same centers.
pub fn rkhs_inner(gram: &DMatrix<f64>, alpha: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    alpha.dot(&(gram * beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn matern_sq(beta: f64) -> KernelSpec {
        KernelSpec::new(KernelFamily::Matern32, beta, DistanceMode::SquaredNorm).unwrap()
    }

    #[test]
    fn diagonal_is_one() {
        for spec in [
            matern_sq(5.0),
            KernelSpec::matern(5.0).unwrap(),
            KernelSpec::gaussian(0.3).unwrap(),
        ] {
            assert_eq!(spec.eval(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 1.0);
            assert_eq!(spec.sup_bound(), 1.0);
        }
    }

    #[test]
    fn matern_squared_norm_value() {
        // (1 + √3/5) exp(−√3/5), r = 1
        let v = matern_sq(5.0).eval(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        let s = 3f64.sqrt() / 5.0;
        assert!((v - (1.0 + s) * (-s).exp()).abs() < 1e-15);
        assert!((v - 0.952_211_361_477_234_8).abs() < 1e-15);
    }

    #[test]
    fn distance_modes_differ_beyond_unit_distance() {
        let sq = matern_sq(5.0).eval(&[0.0], &[2.0]).unwrap();
        let n = KernelSpec::matern(5.0).unwrap().eval(&[0.0], &[2.0]).unwrap();
        let s_sq = SQRT_3 * 4.0 / 5.0;
        let s_n = SQRT_3 * 2.0 / 5.0;
        assert!((sq - (1.0 + s_sq) * (-s_sq).exp()).abs() < 1e-15);
        assert!((n - (1.0 + s_n) * (-s_n).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_value() {
        let v = KernelSpec::gaussian(1.0).unwrap().eval(&[0.0], &[1.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn eval_errors() {
        let k = KernelSpec::matern(5.0).unwrap();
        assert!(matches!(
            k.eval(&[0.0, 1.0], &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(k.eval(&[f64::NAN], &[0.0]), Err(Error::NonFinite(_))));
        assert!(KernelSpec::matern(0.0).is_err());
        assert!(KernelSpec::matern(-1.0).is_err());
    }

    #[test]
    fn kernel_vector_matches_elementwise() {
        let k = KernelSpec::matern(2.0).unwrap();
        let centers: Vec<Point> = [[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]]
            .into_iter()
            .map(|c| Point::try_from(c).unwrap())
            .collect();
        let x = [0.3, -0.7];
        let v = k.kernel_vector(&centers, &x).unwrap();
        for (j, c) in centers.iter().enumerate() {
            assert_eq!(v[j], k.eval(c, &x).unwrap());
        }
        let v0 = k.kernel_vector(&centers, &centers[0]).unwrap();
        assert_eq!(v0[0], 1.0);
        assert!(k.kernel_vector(&[], &x).is_err());
    }

    #[test]
    fn gram_small_cases() {
        let k = KernelSpec::matern(5.0).unwrap();
        let pts = vec![Point::try_from([0.2, 0.1]).unwrap()];
        let g = k.gram_square(&pts).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert_eq!(g[(0, 0)], 1.0);
        let empty: Vec<Point> = vec![];
        assert_eq!(k.gram_matrix(&empty, &empty).unwrap().shape(), (0, 0));
        let bad = vec![
            Point::try_from([0.0, 0.0]).unwrap(),
            Point::try_from([0.0]).unwrap(),
        ];
        assert!(k.gram_matrix(&bad, &bad).is_err());
    }

    #[test]
    fn three_point_gram_is_psd() {
        let k = KernelSpec::matern(5.0).unwrap();
        let pts: Vec<Point> = [[0.1, 0.4], [2.0, -1.0], [0.5, 0.3]]
            .into_iter()
            .map(|c| Point::try_from(c).unwrap())
            .collect();
        let g = k.gram_square(&pts).unwrap();
        assert_eq!(g, g.transpose());
        let min = SymmetricEigen::new(g).eigenvalues.min();
        assert!(min >= -1e-9);
    }

    #[test]
    fn squared_norm_matern_is_indefinite() {
        // Dense 1-D grid; the printed squared-distance form loses definiteness.
        let pts: Vec<Point> = (0..60)
            .map(|i| Point::try_from([i as f64 * 0.1]).unwrap())
            .collect();
        let g = matern_sq(5.0).gram_square(&pts).unwrap();
        let min = SymmetricEigen::new(g).eigenvalues.min();
        assert!(min < -1e-3, "min eigenvalue {min}");
    }

    fn pd_spec() -> impl Strategy<Value = KernelSpec> {
        (0.2f64..10.0, 0usize..3).prop_map(|(beta, which)| match which {
            0 => KernelSpec::matern(beta).unwrap(),
            1 => KernelSpec::gaussian(beta).unwrap(),
            _ => KernelSpec::new(KernelFamily::Gaussian, beta, DistanceMode::Norm).unwrap(),
        })
    }

    fn any_spec() -> impl Strategy<Value = KernelSpec> {
        (0.2f64..10.0, any::<bool>(), any::<bool>()).prop_map(|(beta, matern, sq)| {
            let family = if matern { KernelFamily::Matern32 } else { KernelFamily::Gaussian };
            let mode = if sq { DistanceMode::SquaredNorm } else { DistanceMode::Norm };
            KernelSpec::new(family, beta, mode).unwrap()
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(spec in any_spec(),
                                 x in prop::collection::vec(-5.0f64..5.0, 3),
                                 y in prop::collection::vec(-5.0f64..5.0, 3)) {
            let a = spec.eval(&x, &y).unwrap();
            let b = spec.eval(&y, &x).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a <= 1.0);
            if x != y {
                prop_assert!(a < 1.0);
            }
            // positive analytically, but the squared-norm profile underflows inside this box
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn gram_psd(spec in pd_spec(),
                    pts in prop::collection::vec(prop::collection::vec(-4.0f64..4.0, 2), 1..50)) {
            let pts: Vec<Point> = pts.into_iter().map(|p| Point::new(p).unwrap()).collect();
            let n = pts.len() as f64;
            let g = spec.gram_square(&pts).unwrap();
            prop_assert_eq!(&g, &g.transpose());
            let min = SymmetricEigen::new(g.clone()).eigenvalues.min();
            prop_assert!(min >= -1e-9 * n, "min eigenvalue {}", min);
            let alpha = DVector::from_fn(pts.len(), |i, _| (i as f64 * 0.37).sin());
            prop_assert!(rkhs_inner(&g, &alpha, &alpha) >= -1e-9 * n);
        }
    }
}
