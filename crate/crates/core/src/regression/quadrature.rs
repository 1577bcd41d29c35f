use crate::centers::CenterSet;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Nodes `τ_k` and weights `w_k` approximating `∫ ρ(τ) dτ ≈ Σ w_k ρ(τ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: weights.len(),
            });
        }
        if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadrature rule".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("negative quadrature weight".into()));
        }
        Ok(QuadratureRule { nodes, weights })
    }

    /// The rule with no nodes; integrates everything to zero.
    pub fn empty() -> Self {
        QuadratureRule {
            nodes: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Same nodes, all weights set to one.
    pub fn unit_weights(&self) -> Self {
        QuadratureRule {
            nodes: self.nodes.clone(),
            weights: vec![1.0; self.nodes.len()],
        }
    }
}

/// One-point rule at the center times: `w_k = t_{k+1} − t_k`, last `t_end − t_N`.
pub fn quadrature_from_centers(centers: &CenterSet, t_end: f64) -> Result<QuadratureRule> {
    let times = centers.times();
    let Some(&last) = times.last() else {
        return Ok(QuadratureRule::empty());
    };
    if t_end < last {
        return Err(Error::InvalidParameter(format!(
            "end time {t_end} precedes last center time {last}"
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("center times must increase".into()));
    }
    let weights = times
        .iter()
        .enumerate()
        .map(|(k, &t)| times.get(k + 1).copied().unwrap_or(t_end) - t)
        .collect();
    QuadratureRule::new(times.to_vec(), weights)
}

/// Trapezoidal rule on `n_nodes` uniform nodes over `[traj.start(), t_end]`.
pub fn quadrature_dense(traj: &Trajectory, t_end: f64, n_nodes: usize) -> Result<QuadratureRule> {
    if n_nodes < 2 {
        return Err(Error::InvalidParameter("trapezoidal rule needs ≥ 2 nodes".into()));
    }
    let t0 = traj.start();
    if !(t_end > t0 && t_end <= traj.end()) {
        return Err(Error::OutOfRange {
            t: t_end,
            start: t0,
            end: traj.end(),
        });
    }
    let h = (t_end - t0) / (n_nodes - 1) as f64;
    let nodes: Vec<f64> = (0..n_nodes)
        .map(|i| if i + 1 == n_nodes { t_end } else { t0 + i as f64 * h })
        .collect();
    Ok(trapezoid(nodes))
}

/// Trapezoidal rule on the trajectory's own sample times inside `[s, t]`,
/// with `s` and `t` added as nodes. Rules on adjacent windows sum to the
/// rule on their union.
pub fn quadrature_on_samples(traj: &Trajectory, s: f64, t: f64) -> Result<QuadratureRule> {
    if s > t || s.is_nan() || t.is_nan() {
        return Err(Error::InvalidParameter(format!("empty window [{s}, {t}]")));
    }
    for v in [s, t] {
        if v < traj.start() || v > traj.end() {
            return Err(Error::OutOfRange {
                t: v,
                start: traj.start(),
                end: traj.end(),
            });
        }
    }
    if s == t {
        return Ok(QuadratureRule::empty());
    }
    let times = traj.times();
    let lo = times.partition_point(|&x| x <= s);
    let hi = times.partition_point(|&x| x < t);
    let mut nodes = Vec::with_capacity(hi.saturating_sub(lo) + 2);
    nodes.push(s);
    nodes.extend_from_slice(&times[lo..hi]);
    nodes.push(t);
    Ok(trapezoid(nodes))
}

fn trapezoid(nodes: Vec<f64>) -> QuadratureRule {
    let n = nodes.len();
    let mut weights = vec![0.0; n];
    for k in 0..n - 1 {
        let half = 0.5 * (nodes[k + 1] - nodes[k]);
        weights[k] += half;
        weights[k + 1] += half;
    }
    QuadratureRule { nodes, weights }
}
