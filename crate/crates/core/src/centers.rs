//! Kernel centers along the orbit and the power function of their span.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::SpdFactor;
use crate::point::{check_same_dim, squared_distance, Point};

/// Ordered centers `ξ_1, …, ξ_N` with the times they were sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    centers: Vec<Point>,
    center_times: Vec<f64>,
    separation: f64,
}

impl CenterSet {
    /// Build from explicit centers. No separation rule is enforced; `separation`
    /// is recorded as given.
    pub fn from_parts(centers: Vec<Point>, center_times: Vec<f64>, separation: f64) -> Result<Self> {
        check_same_dim(centers.len(), center_times.len())?;
        if let Some(first) = centers.first() {
            for c in &centers {
                check_same_dim(first.dim(), c.dim())?;
            }
        }
        Ok(CenterSet {
            centers,
            center_times,
            separation,
        })
    }

    pub fn empty(separation: f64) -> Self {
        CenterSet {
            centers: Vec::new(),
            center_times: Vec::new(),
            separation,
        }
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn times(&self) -> &[f64] {
        &self.center_times
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.centers.first().map(Point::dim)
    }

    /// Offer a candidate; it is appended iff it lies farther than the
    /// separation from every existing center (or the set is empty).
    pub fn offer(&mut self, x: &Point, t: f64) -> bool {
        let far = self
            .centers
            .iter()
            .all(|c| squared_distance(c, x).sqrt() > self.separation);
        if far {
            self.centers.push(x.clone());
            self.center_times.push(t);
        }
        far
    }

    /// The first `n` centers, `S_n ⊂ S_N`.
    pub fn prefix(&self, n: usize) -> CenterSet {
        let n = n.min(self.len());
        CenterSet {
            centers: self.centers[..n].to_vec(),
            center_times: self.center_times[..n].to_vec(),
            separation: self.separation,
        }
    }

    /// Centers sampled at or before `t`.
    pub fn up_to_time(&self, t: f64) -> CenterSet {
        self.prefix(self.center_times.partition_point(|&s| s <= t))
    }

    pub fn gram(&self, spec: &KernelSpec) -> Result<DMatrix<f64>> {
        spec.gram_square(&self.centers)
    }

    /// Cholesky factor of the center Gram matrix; on failure names the closest pair.
    pub fn factor_gram(&self, spec: &KernelSpec) -> Result<SpdFactor> {
        let k = self.gram(spec)?;
        SpdFactor::new(&k).map_err(|e| match e {
            Error::Singular { jitter, .. } => Error::Singular {
                jitter,
                detail: self.closest_pair_detail(),
            },
            other => other,
        })
    }

    fn closest_pair_detail(&self) -> String {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.centers[i].distance(&self.centers[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        if best.0.is_finite() {
            format!(
                "center Gram matrix of {} centers; closest pair {} and {} at distance {:.3e}",
                self.len(),
                best.1,
                best.2,
                best.0
            )
        } else {
            format!("center Gram matrix of {} centers", self.len())
        }
    }
}

/// Greedy selection along the trajectory: the first sample is taken, and each
/// later sample is taken iff it is more than `eta` from every center so far.
pub fn select_centers(traj: &Trajectory, eta: f64) -> Result<CenterSet> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "center separation must be positive, got {eta}"
        )));
    }
    let mut set = CenterSet::empty(eta);
    for (x, &t) in traj.states().iter().zip(traj.times()) {
        set.offer(x, t);
    }
    Ok(set)
}

/// `P_N(x) = |k(x, x) − k_x(S_N)ᵀ K(S_N, S_N)⁻¹ k_x(S_N)|`, clamped at zero,
/// with the Gram factor computed once.
pub struct PowerFunction<'a> {
    spec: KernelSpec,
    centers: &'a CenterSet,
    factor: Option<SpdFactor>,
}

impl<'a> PowerFunction<'a> {
    pub fn new(spec: &KernelSpec, centers: &'a CenterSet) -> Result<Self> {
        let factor = if centers.is_empty() {
            None
        } else {
            Some(centers.factor_gram(spec)?)
        };
        Ok(PowerFunction {
            spec: *spec,
            centers,
            factor,
        })
    }

    /// Unclamped `k(x,x) − k_N(x,x)`.
    pub fn raw(&self, x: &[f64]) -> Result<f64> {
        let kxx = self.spec.eval(x, x)?;
        let Some(factor) = &self.factor else {
            return Ok(kxx);
        };
        let kx = self.spec.kernel_vector(self.centers.centers(), x)?;
        let w = factor.solve(&kx);
        Ok(kxx - kx.dot(&w))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.raw(x)?.max(0.0))
    }

    /// Many points in parallel; order of the output follows `points`.
    pub fn eval_many(&self, points: &[Point]) -> Result<Vec<f64>> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }
}

pub fn power_function_at(spec: &KernelSpec, centers: &CenterSet, x: &[f64]) -> Result<f64> {
    PowerFunction::new(spec, centers)?.eval(x)
}

/// `(Σ w_i P_N(x_i)²)^{1/2}`, a quadrature estimate of `‖P_N‖_{L²(S)}`.
pub fn power_l2(
    spec: &KernelSpec,
    centers: &CenterSet,
    eval_points: &[Point],
    weights: &[f64],
) -> Result<f64> {
    check_same_dim(eval_points.len(), weights.len())?;
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidParameter("weights must be nonnegative".into()));
    }
    let pf = PowerFunction::new(spec, centers)?;
    let vals = pf.eval_many(eval_points)?;
    Ok(vals
        .iter()
        .zip(weights)
        .map(|(p, w)| w * p * p)
        .sum::<f64>()
        .sqrt())
}
