//! Finite-dimensional analysis of the time-integrated operator
//!
//! ```text
//! T_φ(s,t) = ∫_s^t k_{φ(τ)} ⊗ k_{φ(τ)} dτ
//! ```
//!
//! restricted to the span of the centers. In the basis `k_{ξ_1}, …, k_{ξ_N}`
//! the quadratic form `⟨T g, h⟩` is `αᵀ A β` with
//! `A[i][j] = Σ_k w_k k(ξ_i, φ(τ_k)) k(φ(τ_k), ξ_j)`, and the ambient inner
//! product is `αᵀ K β`. Spectral questions about `T` become the pencil
//! `A v = λ K v`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::centers::CenterSet;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::kernels::{symmetrize, KernelSpec};
use crate::linalg::{generalized_symmetric_eigen, SpdFactor};
use crate::point::check_same_dim;
use crate::regression::{quadrature_on_samples, QuadratureRule};

/// Eigenvalues above `-NEG_TOL` are treated as rounding noise and clamped to zero.
const NEG_TOL: f64 = 1e-9;

/// Components with eigenvalue at or below this are never inverted.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub a: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub window: (f64, f64),
    /// `max |A − Aᵀ|` before symmetrization.
    pub asymmetry: f64,
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `αᵀ A α`, the value of `⟨T g, g⟩` for `g = Σ α_j k_{ξ_j}`.
    pub fn quadratic_form(&self, alpha: &DVector<f64>) -> f64 {
        alpha.dot(&(&self.a * alpha))
    }
}

/// Assemble `A` over `window` from the rule `quad`.
pub fn discretize_operator(
    spec: &KernelSpec,
    traj: &Trajectory,
    centers: &CenterSet,
    window: (f64, f64),
    quad: &QuadratureRule,
) -> Result<DiscretizedOperator> {
    let (s, t) = window;
    if s > t || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("empty window [{s}, {t}]")));
    }
    if centers.is_empty() {
        return Err(Error::Empty("center set".into()));
    }
    check_same_dim(traj.dim(), centers.dim().unwrap_or(traj.dim()))?;
    if let Some(&bad) = quad.nodes().iter().find(|&&x| x < s || x > t) {
        return Err(Error::OutOfRange { t: bad, start: s, end: t });
    }
    let n = centers.len();
    let k = centers.gram(spec)?;
    if quad.is_empty() {
        return Ok(DiscretizedOperator {
            a: DMatrix::zeros(n, n),
            k,
            window,
            asymmetry: 0.0,
        });
    }
    let states = quad
        .nodes()
        .iter()
        .map(|&tau| traj.interpolate(tau))
        .collect::<Result<Vec<_>>>()?;
    let mut b = spec.cross_unchecked(centers.centers(), &states);
    for (mut col, &w) in b.column_iter_mut().zip(quad.weights()) {
        col *= w.sqrt();
    }
    let a = &b * b.transpose();
    let asymmetry = max_abs_diff(&a, &a.transpose());
    Ok(DiscretizedOperator {
        a: symmetrize(&a),
        k,
        window,
        asymmetry,
    })
}

/// [`discretize_operator`] using the trapezoid on the trajectory's own samples in the window.
pub fn discretize_window(
    spec: &KernelSpec,
    traj: &Trajectory,
    centers: &CenterSet,
    window: (f64, f64),
) -> Result<DiscretizedOperator> {
    let quad = quadrature_on_samples(traj, window.0, window.1)?;
    discretize_operator(spec, traj, centers, window, &quad)
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    pub trace: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Trace of `K⁻¹A` against `K̄²(t − s)`.
pub fn trace_check(op: &DiscretizedOperator, spec: &KernelSpec) -> Result<TraceCheck> {
    let (s, t) = op.window;
    let bound = spec.sup_bound().powi(2) * (t - s);
    let factor = SpdFactor::new(&op.k)?;
    let mut trace = 0.0;
    for j in 0..op.dim() {
        let col = factor.solve(&op.a.column(j).into_owned());
        trace += col[j];
    }
    let ok = trace <= bound * (1.0 + 1e-6) + 1e-12;
    Ok(TraceCheck { trace, bound, ok })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PEEstimate {
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta: f64,
    pub windows_checked: usize,
}

/// Extremal generalized eigenvalues of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PEWindow {
    pub index: usize,
    pub s: f64,
    pub t: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
}

/// PE constants over the windows `[t0 + jΔ, t0 + (j+1)Δ]` that fit before `t_end`,
/// `t0` the trajectory start.
pub fn pe_constants(
    spec: &KernelSpec,
    traj: &Trajectory,
    centers: &CenterSet,
    delta: f64,
    t_end: f64,
) -> Result<(PEEstimate, Vec<PEWindow>)> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("window length must be positive, got {delta}")));
    }
    let t0 = traj.start();
    if t_end > traj.end() {
        return Err(Error::OutOfRange {
            t: t_end,
            start: t0,
            end: traj.end(),
        });
    }
    // tolerate t_end/Δ landing a hair under an integer
    let m = ((t_end - t0) / delta * (1.0 + 1e-12)).floor();
    if m < 1.0 || m.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "no complete window of length {delta} before {t_end}"
        )));
    }
    let m = m as usize;
    let windows = (0..m)
        .into_par_iter()
        .map(|j| {
            let s = t0 + j as f64 * delta;
            let t = (t0 + (j + 1) as f64 * delta).min(traj.end());
            let op = discretize_window(spec, traj, centers, (s, t))?;
            let (vals, _) = generalized_symmetric_eigen(&op.a, &op.k)?;
            Ok(PEWindow {
                index: j,
                s,
                t,
                min_lambda: vals[vals.len() - 1],
                max_lambda: vals[0],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gamma1 = windows.iter().map(|w| w.min_lambda).fold(f64::INFINITY, f64::min).max(0.0);
    let gamma2 = windows.iter().map(|w| w.max_lambda).fold(f64::NEG_INFINITY, f64::max).max(gamma1);
    Ok((
        PEEstimate {
            gamma1,
            gamma2,
            delta,
            windows_checked: m,
        },
        windows,
    ))
}

fn bound_weights(pe: &PEEstimate, gamma: f64, m: usize, kbar: f64) -> Result<(f64, f64)> {
    let denom = pe.gamma1 * m as f64 + gamma;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::InvalidParameter(format!("γ₁m + γ = {denom}")));
    }
    let a = kbar * kbar * m as f64 * pe.delta / denom;
    Ok((a, gamma / denom))
}

/// Error bound for the estimate sought in the span of the centers.
pub fn bound_galerkin(pe: &PEEstimate, gamma: f64, m: usize, kbar: f64, proj_err: f64, proj_norm: f64) -> Result<f64> {
    let (a, b) = bound_weights(pe, gamma, m, kbar)?;
    Ok(a * proj_err + b * proj_norm)
}

/// As [`bound_galerkin`] plus the drift `(1/γ) K̄² mΔ · proj_err` incurred in all of `ℋ`.
pub fn bound_full_h(pe: &PEEstimate, gamma: f64, m: usize, kbar: f64, proj_err: f64, proj_norm: f64) -> Result<f64> {
    let base = bound_galerkin(pe, gamma, m, kbar, proj_err, proj_norm)?;
    Ok(base + kbar * kbar * m as f64 * pe.delta / gamma * proj_err)
}

/// [`bound_galerkin`] with the projection error replaced by `‖P_N‖_{L²} ‖G‖_ℋ`.
pub fn bound_power(
    pe: &PEEstimate,
    gamma: f64,
    m: usize,
    kbar: f64,
    power_l2: f64,
    g_norm: f64,
    proj_norm: f64,
) -> Result<f64> {
    let (a, b) = bound_weights(pe, gamma, m, kbar)?;
    Ok(a * power_l2 * g_norm + b * proj_norm)
}

/// Generalized eigensystem of a discretized operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Nonincreasing, nonnegative.
    pub eigenvalues: DVector<f64>,
    /// Columns are K-orthonormal coefficient vectors.
    pub eigenvectors: DMatrix<f64>,
    pub gram: DMatrix<f64>,
}

pub fn spectral_decompose(op: &DiscretizedOperator) -> Result<SpectralDecomposition> {
    let (mut values, vectors) = generalized_symmetric_eigen(&op.a, &op.k)?;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -NEG_TOL {
                return Err(Error::InvalidParameter(format!(
                    "operator is indefinite: eigenvalue {v:e}"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
        gram: op.k.clone(),
    })
}

impl SpectralDecomposition {
    /// `max_k ‖A v_k − λ_k K v_k‖` against the operator it came from.
    pub fn max_residual(&self, op: &DiscretizedOperator) -> f64 {
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = self.eigenvectors.column(k);
                (&op.a * v - &op.k * v * self.eigenvalues[k]).amax()
            })
            .fold(0.0, f64::max)
    }

    /// `⟨g, h_k⟩_ℋ` for each eigenfunction.
    pub fn components(&self, g: &DVector<f64>) -> Result<DVector<f64>> {
        check_same_dim(self.gram.nrows(), g.len())?;
        Ok(self.eigenvectors.transpose() * (&self.gram * g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsNorm {
    pub value: f64,
    /// Components dropped because their eigenvalue was at or below [`EIGEN_FLOOR`].
    pub excluded: usize,
}

/// `(Σ λ_k^{−2s} ⟨g, h_k⟩²)^{1/2}`. At `s = 0` nothing is inverted and every
/// component counts.
pub fn as_norm(decomp: &SpectralDecomposition, g: &DVector<f64>, s: f64) -> Result<AsNorm> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::InvalidParameter(format!("smoothness exponent must be ≥ 0, got {s}")));
    }
    let comps = decomp.components(g)?;
    let mut sum = 0.0;
    let mut excluded = 0;
    for (&lam, &c) in decomp.eigenvalues.iter().zip(comps.iter()) {
        if s == 0.0 {
            sum += c * c;
        } else if lam > EIGEN_FLOOR {
            sum += lam.powf(-2.0 * s) * c * c;
        } else {
            excluded += 1;
        }
    }
    Ok(AsNorm {
        value: sum.sqrt(),
        excluded,
    })
}

/// Continuity and coercivity constants `(K̄²·len + γ, γ)` of the regularized form
/// over a window of length `len`.
pub fn lax_milgram_constants(kbar: f64, len: f64, gamma: f64) -> (f64, f64) {
    (kbar * kbar * len + gamma, gamma)
}

/// `galerkin_err ≤ (C1/C2)·best_err + 1e−8`.
pub fn cea_check(c1: f64, c2: f64, galerkin_err: f64, best_err: f64) -> bool {
    galerkin_err <= c1 / c2 * best_err + 1e-8
}

/// Extremal values of `αᵀ(A + γK)α / αᵀKα` against the Lax-Milgram constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityCheck {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub c1: f64,
    pub c2: f64,
    pub ok: bool,
}

pub fn coercivity_check(op: &DiscretizedOperator, spec: &KernelSpec, gamma: f64) -> Result<CoercivityCheck> {
    if gamma <= 0.0 || gamma.is_nan() {
        return Err(Error::InvalidParameter(format!("γ must be positive, got {gamma}")));
    }
    let (c1, c2) = lax_milgram_constants(spec.sup_bound(), op.window.1 - op.window.0, gamma);
    let form = &op.a + &op.k * gamma;
    let (vals, _) = generalized_symmetric_eigen(&form, &op.k)?;
    let (min_ratio, max_ratio) = (vals[vals.len() - 1], vals[0]);
    let tol = 1e-9 * c1;
    Ok(CoercivityCheck {
        min_ratio,
        max_ratio,
        c1,
        c2,
        ok: min_ratio >= c2 - tol && max_ratio <= c1 + tol,
    })
}
