//! Coefficient evolution along the orbit:
//!
//! ```text
//! α̇(t) = (γ K)⁻¹ k(φ(t)) (y(t) − k(φ(t))ᵀ α(t)),   k(x) = (k(ξ_1, x), …, k(ξ_N, x))
//! ```
//!
//! integrated with RK4, with `φ` and `y` interpolated between samples.

use nalgebra::DVector;

use super::{Estimate, RegressionProblem};
use crate::dynamics::Rk4;
use crate::error::{Error, Result};
use crate::linalg::SpdFactor;

/// Coefficients sampled in time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientHistory {
    pub times: Vec<f64>,
    pub alphas: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct Method2Trace {
    /// One estimate per requested checkpoint, in order.
    pub checkpoints: Vec<Estimate>,
    /// Coefficients every `record_stride` steps (empty when not requested).
    pub history: CoefficientHistory,
}

/// `(γK)⁻¹ k(φ(t))` and `y(t)` for the two most recent distinct times; RK4
/// revisits the midpoint and each step starts where the last one ended.
struct ForcingCache {
    entries: [(f64, DVector<f64>, DVector<f64>, f64); 2],
    next: usize,
}

/// Integrate the coefficient law from `traj.start()` through every checkpoint.
///
/// Steps of length `h` are used; a segment whose length is not a multiple of
/// `h` is split into equal slightly shorter steps so every checkpoint is hit
/// exactly.
pub fn fit_method2(
    problem: &RegressionProblem,
    alpha0: &DVector<f64>,
    h: f64,
    checkpoints: &[f64],
    record_stride: Option<usize>,
) -> Result<Method2Trace> {
    let n = problem.centers.len();
    if n == 0 {
        return Err(Error::Empty("center set".into()));
    }
    if alpha0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha0.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let t0 = problem.traj.start();
    let t_max = problem.traj.end().min(*problem.obs.times().last().unwrap());
    let mut prev = t0;
    for &c in checkpoints {
        if c < prev || c > t_max {
            return Err(Error::InvalidParameter(format!(
                "checkpoint {c} must be nondecreasing within [{t0}, {t_max}]"
            )));
        }
        prev = c;
    }
    if problem.obs.times()[0] > t0 {
        return Err(Error::InvalidParameter(
            "observations must start with the trajectory".into(),
        ));
    }

    let mut gk = problem.centers.gram(&problem.spec)?;
    gk *= problem.gamma;
    let factor = SpdFactor::new(&gk).map_err(|e| match e {
        Error::Singular { jitter, detail } => Error::Singular {
            jitter,
            detail: format!("γK for the coefficient evolution: {detail}"),
        },
        other => other,
    })?;

    let spec = problem.spec;
    let centers = problem.centers.centers();
    let interp = problem.traj.interp();
    let mut state = vec![0.0; problem.traj.dim()];
    let empty = (f64::NAN, DVector::zeros(0), DVector::zeros(0), 0.0);
    let mut cache = ForcingCache {
        entries: [empty.clone(), empty],
        next: 0,
    };

    let mut rhs = |t: f64, alpha: &[f64], out: &mut [f64]| -> Result<()> {
        let hit = cache.entries.iter().position(|e| e.0 == t);
        let idx = match hit {
            Some(i) => i,
            None => {
                problem.traj.interpolate_into(t, &mut state)?;
                let k = spec.kernel_vector_unchecked(centers, &state);
                let u = factor.solve(&k);
                let y = problem.obs.interpolate(t, interp)?;
                let i = cache.next;
                cache.entries[i] = (t, k, u, y);
                cache.next = 1 - i;
                i
            }
        };
        let (_, k, u, y) = &cache.entries[idx];
        let err = y - k.iter().zip(alpha).map(|(a, b)| a * b).sum::<f64>();
        for (o, ui) in out.iter_mut().zip(u.iter()) {
            *o = err * ui;
        }
        Ok(())
    };

    let mut alpha: Vec<f64> = alpha0.iter().copied().collect();
    let mut stepper = Rk4::new(n);
    let mut trace = Method2Trace {
        checkpoints: Vec::with_capacity(checkpoints.len()),
        history: CoefficientHistory::default(),
    };
    let record = |t: f64, a: &[f64], trace: &mut Method2Trace| {
        trace.history.times.push(t);
        trace.history.alphas.push(DVector::from_column_slice(a));
    };
    if record_stride.is_some() {
        record(t0, &alpha, &mut trace);
    }

    let mut t = t0;
    let mut step_count = 0usize;
    for &c in checkpoints {
        let span = c - t;
        let ratio = span / h;
        let mut steps = ratio.round() as usize;
        if ((steps as f64) - ratio).abs() > 1e-9 * ratio.max(1.0) {
            steps = ratio.ceil() as usize;
        }
        let start = t;
        let dt = if steps > 0 { span / steps as f64 } else { 0.0 };
        for i in 0..steps {
            let ti = if i == 0 { start } else { start + i as f64 * dt };
            let tn = if i + 1 == steps { c } else { start + (i + 1) as f64 * dt };
            stepper.step(&mut rhs, ti, &mut alpha, tn - ti)?;
            if alpha.iter().any(|a| !a.is_finite()) {
                return Err(Error::BlowUp { time: tn });
            }
            step_count += 1;
            if let Some(stride) = record_stride {
                if stride > 0 && step_count.is_multiple_of(stride) {
                    record(tn, &alpha, &mut trace);
                }
            }
        }
        t = c;
        trace.checkpoints.push(Estimate::new(
            problem.centers.clone(),
            DVector::from_column_slice(&alpha),
            c,
        )?);
    }
    Ok(trace)
}
