//! Estimates of the continuous-time regressor on the span of the centers.
//!
//! * [`fit_method1`] replaces the time integrals by a quadrature rule and
//!   solves the resulting normal equations.
//! * [`fit_method2`] integrates the coefficient evolution law along the orbit.
//! * [`fit_discrete_erm`] is the regularized least-squares problem over a
//!   finite sample set, for comparison with the quadrature form.

mod evolution;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};

use crate::centers::CenterSet;
use crate::dynamics::{Observations, Trajectory};
use crate::error::{Error, Result};
use crate::kernels::{rkhs_inner, KernelSpec};
use crate::linalg::SpdFactor;
use crate::point::{check_same_dim, Point};

pub use evolution::{fit_method2, CoefficientHistory, Method2Trace};
pub use quadrature::{quadrature_dense, quadrature_from_centers, quadrature_on_samples, QuadratureRule};

/// Everything needed to pose the regression along one trajectory.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    pub spec: KernelSpec,
    pub traj: Trajectory,
    pub obs: Observations,
    pub gamma: f64,
    pub centers: CenterSet,
}

impl RegressionProblem {
    pub fn new(
        spec: KernelSpec,
        traj: Trajectory,
        obs: Observations,
        gamma: f64,
        centers: CenterSet,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularization must be positive, got {gamma}"
            )));
        }
        let (t0, t1) = (traj.start(), traj.end());
        let (o0, o1) = (obs.times()[0], *obs.times().last().unwrap());
        if o0 < t0 || o1 > t1 {
            return Err(Error::InvalidParameter(format!(
                "observations span [{o0}, {o1}] outside trajectory [{t0}, {t1}]"
            )));
        }
        if let Some(d) = centers.dim() {
            check_same_dim(traj.dim(), d)?;
        }
        Ok(RegressionProblem {
            spec,
            traj,
            obs,
            gamma,
            centers,
        })
    }

    /// Same data and centers, different regularization.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(
            self.spec,
            self.traj.clone(),
            self.obs.clone(),
            gamma,
            self.centers.clone(),
        )
    }

    /// States `φ(τ_k)` and outputs `y(τ_k)` at the quadrature nodes.
    pub(crate) fn node_data(&self, quad: &QuadratureRule) -> Result<(Vec<Point>, Vec<f64>)> {
        let interp = self.traj.interp();
        let mut states = Vec::with_capacity(quad.len());
        let mut ys = Vec::with_capacity(quad.len());
        for &tau in quad.nodes() {
            states.push(self.traj.interpolate(tau)?);
            let y = self.obs.interpolate(tau, interp).map_err(|_| {
                Error::InvalidParameter(format!("no observation covering quadrature node {tau}"))
            })?;
            ys.push(y);
        }
        Ok((states, ys))
    }
}

/// `ĝ_N(t, x) = Σ_j α_j k(ξ_j, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub centers: CenterSet,
    pub alpha: DVector<f64>,
    pub fitted_at: f64,
}

impl Estimate {
    pub fn new(centers: CenterSet, alpha: DVector<f64>, fitted_at: f64) -> Result<Self> {
        check_same_dim(centers.len(), alpha.len())?;
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("estimate coefficients".into()));
        }
        Ok(Estimate {
            centers,
            alpha,
            fitted_at,
        })
    }

    pub fn evaluate(&self, spec: &KernelSpec, x: &[f64]) -> Result<f64> {
        if self.centers.is_empty() {
            return Ok(0.0);
        }
        Ok(spec.kernel_vector(self.centers.centers(), x)?.dot(&self.alpha))
    }

    pub fn evaluate_many(&self, spec: &KernelSpec, xs: &[Point]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        xs.par_iter().map(|x| self.evaluate(spec, x)).collect()
    }

    /// `‖ĝ‖ = √(αᵀ K α)`.
    pub fn rkhs_norm(&self, spec: &KernelSpec) -> Result<f64> {
        let k = self.centers.gram(spec)?;
        Ok(rkhs_inner(&k, &self.alpha, &self.alpha).max(0.0).sqrt())
    }
}

pub fn evaluate_estimate(est: &Estimate, spec: &KernelSpec, x: &[f64]) -> Result<f64> {
    est.evaluate(spec, x)
}

pub fn rkhs_norm(est: &Estimate, spec: &KernelSpec) -> Result<f64> {
    est.rkhs_norm(spec)
}

/// `(mean_i |y_i − ĝ(φ(t_i))|²)^{1/2}` over the observation samples.
pub fn orbit_rmse(est: &Estimate, spec: &KernelSpec, traj: &Trajectory, obs: &Observations) -> Result<f64> {
    if obs.is_empty() {
        return Err(Error::Empty("observations for RMSE".into()));
    }
    let states = obs
        .times()
        .iter()
        .map(|&t| traj.interpolate(t))
        .collect::<Result<Vec<_>>>()?;
    let ghat = est.evaluate_many(spec, &states)?;
    let sse: f64 = ghat
        .iter()
        .zip(obs.values())
        .map(|(g, y)| (y - g) * (y - g))
        .sum();
    Ok((sse / obs.len() as f64).sqrt())
}

/// Normal equations `(K_cq W K_qc + γ K_cc) α = K_cq W y`.
pub fn method1_system(
    problem: &RegressionProblem,
    quad: &QuadratureRule,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if problem.centers.is_empty() {
        return Err(Error::Empty("center set".into()));
    }
    let (states, ys) = problem.node_data(quad)?;
    weighted_system(
        &problem.spec,
        &problem.centers,
        &states,
        &ys,
        quad.weights(),
        problem.gamma,
        true,
    )
}

fn weighted_system(
    spec: &KernelSpec,
    centers: &CenterSet,
    states: &[Point],
    ys: &[f64],
    weights: &[f64],
    gamma: f64,
    rkhs_penalty: bool,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let k_cc = centers.gram(spec)?;
    let mut k_cq = spec.gram_matrix(centers.centers(), states)?;
    let wy = DVector::from_iterator(ys.len(), ys.iter().zip(weights).map(|(y, w)| y * w));
    let rhs = &k_cq * &wy;
    for (mut col, w) in k_cq.column_iter_mut().zip(weights) {
        col *= w.sqrt();
    }
    let mut m = &k_cq * k_cq.transpose();
    if rkhs_penalty {
        m += k_cc * gamma;
    } else {
        for i in 0..m.nrows() {
            m[(i, i)] += gamma;
        }
    }
    Ok(((&m + m.transpose()) * 0.5, rhs))
}

fn solve_system(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let x = SpdFactor::new(m)?.solve(rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("solution of normal equations".into()));
    }
    Ok(x)
}

/// Quadrature approximation of the continuous-time estimate at the last node.
pub fn fit_method1(problem: &RegressionProblem, quad: &QuadratureRule) -> Result<Estimate> {
    let (m, rhs) = method1_system(problem, quad)?;
    let alpha = solve_system(&m, &rhs)?;
    let fitted_at = quad.nodes().last().copied().unwrap_or(problem.traj.start());
    Estimate::new(problem.centers.clone(), alpha, fitted_at)
}

/// Regularized least squares over discrete samples:
/// `Σ_j (Σ_i k_j(x_i) k_k(x_i) + γ P_jk) α_j = Σ_i y_i k_k(x_i)`, with `P = K`
/// when `rkhs_penalty` and `P = I` otherwise.
pub fn fit_discrete_erm(
    spec: &KernelSpec,
    samples: &[(Point, f64)],
    centers: &CenterSet,
    gamma: f64,
    rkhs_penalty: bool,
) -> Result<Estimate> {
    if centers.is_empty() {
        return Err(Error::Empty("center set".into()));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "regularization must be nonnegative, got {gamma}"
        )));
    }
    let states: Vec<Point> = samples.iter().map(|(x, _)| x.clone()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, y)| *y).collect();
    let ones = vec![1.0; samples.len()];
    let (m, rhs) = weighted_system(spec, centers, &states, &ys, &ones, gamma, rkhs_penalty)?;
    let alpha = solve_system(&m, &rhs)?;
    // no time axis for discrete samples
    Estimate::new(centers.clone(), alpha, 0.0)
}
