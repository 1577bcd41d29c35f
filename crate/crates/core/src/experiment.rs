//! End-to-end recipes driven by an [`ExperimentConfig`].
//!
//! `run` writes, into `output_dir`:
//!
//! | file | columns |
//! |------|---------|
//! | `config_used.txt` | effective configuration |
//! | `centers.csv` | `index,t,x1..xd` |
//! | `estimate.csv`, `estimate_t{t}.csv` | `index,center_t,x1..xd,alpha` |
//! | `grid.csv`, `grid_t{t}.csv` | `x1,x2,ghat[,gtrue,abserr]` |
//! | `estimate_gamma{γ}.csv`, `grid_gamma{γ}.csv` | as above, one per swept γ |
//! | `gamma_sweep.csv` | `gamma,rkhs_norm,rmse` |
//! | `rmse_timeline.csv` | `t,rmse` |
//! | `coefficient_history.csv` | `t,alpha_1..alpha_N` (method 2 with `history_stride`) |
//! | `pe_report.csv` | `window,s,t,min_lambda,max_lambda` |
//! | `bounds.csv` | `quantity,value` |
//!
//! Times are in seconds. The final checkpoint is what `estimate.csv` and
//! `grid.csv` hold.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::centers::{power_l2, select_centers, CenterSet, PowerFunction};
use crate::config::{ExperimentConfig, Method, Observable, QuadratureChoice, SystemKind};
use crate::dynamics::{integrate_fixed_step, lorenz_test_function, observe, LorenzParams, Observations, Trajectory};
use crate::error::{Error, Result};
use crate::io::{self, GridRow};
use crate::kernels::KernelSpec;
use crate::operator::{bound_full_h, bound_galerkin, bound_power, pe_constants, PEEstimate, PEWindow};
use crate::point::Point;
use crate::regression::{
    fit_discrete_erm, fit_method1, fit_method2, orbit_rmse, quadrature_from_centers, quadrature_on_samples,
    CoefficientHistory, Estimate, QuadratureRule, RegressionProblem,
};

/// What the observations are samples of, when known.
#[derive(Debug, Clone)]
pub enum Truth {
    /// [`lorenz_test_function`] of the first two state components.
    LorenzTest,
    /// A known combination of kernel sections.
    Synthetic(Estimate),
    Unknown,
}

/// Regression data prepared from a configuration.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub spec: KernelSpec,
    /// Full state, when simulated.
    pub full: Option<Trajectory>,
    /// What the regressor sees: the configured axes of the state.
    pub traj: Trajectory,
    pub obs: Observations,
    pub centers: CenterSet,
    pub truth: Truth,
}

impl Dataset {
    pub fn problem(&self, gamma: f64) -> Result<RegressionProblem> {
        RegressionProblem::new(self.spec, self.traj.clone(), self.obs.clone(), gamma, self.centers.clone())
    }

    /// Truth evaluated at a regressor input, when available.
    pub fn truth_at(&self, x: &[f64], axes: &[usize]) -> Result<Option<f64>> {
        match &self.truth {
            Truth::LorenzTest if axes == [0, 1] => Ok(Some(lorenz_test_function(x))),
            Truth::Synthetic(g) => g.evaluate(&self.spec, x).map(Some),
            _ => Ok(None),
        }
    }
}

/// Full Lorenz state sampled every `h · subsample`.
pub fn simulate_lorenz(cfg: &ExperimentConfig) -> Result<Trajectory> {
    let params = LorenzParams::new(cfg.lorenz.sigma, cfg.lorenz.r, cfg.lorenz.b, cfg.lorenz.rhs_mode)?;
    let x0 = Point::new(cfg.x0.clone())?;
    let fine = integrate_fixed_step(params.vector_field(), &x0, cfg.t_end, cfg.h)?;
    Ok(fine.subsample(cfg.subsample)?.with_interp(cfg.interp))
}

/// `c_j` uniform on `[−1, 1]` from `seed`.
pub fn synthetic_coefficients(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0))
}

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    cfg.validate()?;
    let spec = cfg.kernel_spec()?;
    match cfg.system {
        SystemKind::Lorenz => {
            let full = simulate_lorenz(cfg)?;
            let traj = full.project(&cfg.axes)?;
            let centers = select_centers(&traj.subsample(cfg.center_subsample)?, cfg.eta)?;
            let (obs, truth) = match cfg.observable {
                Observable::LorenzTest => (observe(&full, lorenz_test_function)?, Truth::LorenzTest),
                Observable::Synthetic => {
                    let c = synthetic_coefficients(centers.len(), cfg.seed);
                    let g = Estimate::new(centers.clone(), c, 0.0)?;
                    let ys = g.evaluate_many(&spec, traj.states())?;
                    (Observations::new(traj.times().to_vec(), ys)?, Truth::Synthetic(g))
                }
            };
            Ok(Dataset {
                spec,
                full: Some(full),
                traj,
                obs,
                centers,
                truth,
            })
        }
        SystemKind::Csv => {
            let path = cfg.csv_path.as_ref().expect("validated");
            let (raw, obs) = io::load_samples(path, cfg.interp)?;
            let t_stop = cfg.t_end.min(raw.end());
            let raw = raw.truncate(t_stop)?;
            let obs = obs.truncate(t_stop)?;
            if let Some(&a) = cfg.axes.iter().find(|&&a| a >= raw.dim()) {
                return Err(Error::Config(format!(
                    "axis {a} out of range for {}-dimensional samples",
                    raw.dim()
                )));
            }
            if let Some(&c) = cfg.checkpoints.iter().find(|&&c| c > raw.end()) {
                return Err(Error::Config(format!("checkpoint {c} is past the data end {}", raw.end())));
            }
            let traj = raw.project(&cfg.axes)?;
            let centers = select_centers(&traj.subsample(cfg.center_subsample)?, cfg.eta)?;
            Ok(Dataset {
                spec,
                full: None,
                traj,
                obs,
                centers,
                truth: Truth::Unknown,
            })
        }
    }
}

/// Estimates at each checkpoint, plus the coefficient history for method 2.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub estimates: Vec<Estimate>,
    pub history: Option<CoefficientHistory>,
}

pub fn quadrature_for(cfg: &ExperimentConfig, data: &Dataset, t: f64) -> Result<QuadratureRule> {
    match cfg.quadrature {
        QuadratureChoice::Samples => quadrature_on_samples(&data.traj, data.traj.start(), t),
        QuadratureChoice::Centers => quadrature_from_centers(&data.centers.up_to_time(t), t),
    }
}

pub fn fit_checkpoints(cfg: &ExperimentConfig, data: &Dataset, gamma: f64, checkpoints: &[f64]) -> Result<FitOutput> {
    let problem = data.problem(gamma)?;
    match cfg.method {
        Method::Quadrature => {
            let estimates = checkpoints
                .iter()
                .map(|&t| {
                    let quad = quadrature_for(cfg, data, t)?;
                    let mut est = fit_method1(&problem, &quad)?;
                    est.fitted_at = t;
                    Ok(est)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FitOutput {
                estimates,
                history: None,
            })
        }
        Method::Evolution => {
            let alpha0 = DVector::zeros(data.centers.len());
            let trace = fit_method2(&problem, &alpha0, cfg.sample_step(), checkpoints, cfg.history_stride)?;
            Ok(FitOutput {
                estimates: trace.checkpoints,
                history: cfg.history_stride.map(|_| trace.history),
            })
        }
        Method::Erm => {
            let estimates = checkpoints
                .iter()
                .map(|&t| {
                    let samples: Vec<(Point, f64)> = data
                        .obs
                        .times()
                        .iter()
                        .zip(data.obs.values())
                        .take_while(|(&ti, _)| ti <= t)
                        .map(|(&ti, &y)| Ok((data.traj.interpolate(ti)?, y)))
                        .collect::<Result<_>>()?;
                    let mut est = fit_discrete_erm(&data.spec, &samples, &data.centers, gamma, true)?;
                    est.fitted_at = t;
                    Ok(est)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FitOutput {
                estimates,
                history: None,
            })
        }
    }
}

/// Uniform grid over the configured bounds, or the bounding box of the
/// regressor inputs widened by 5% of its extent on every side.
pub fn grid_points(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<Vec<Point>> {
    if traj.dim() != 2 {
        return Err(Error::Config(format!(
            "grids need a 2-dimensional input, got {} axes",
            traj.dim()
        )));
    }
    let [x0, x1, y0, y1] = match cfg.grid_bounds {
        Some(b) => b,
        None => {
            let bb = traj.bounding_box();
            let pad = |(lo, hi): (f64, f64)| {
                let w = (hi - lo).max(1e-12) * 0.05;
                (lo - w, hi + w)
            };
            let (a, b) = (pad(bb[0]), pad(bb[1]));
            [a.0, a.1, b.0, b.1]
        }
    };
    let n = cfg.grid_resolution;
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut pts = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            pts.push(Point::new(vec![at(x0, x1, i), at(y0, y1, j)])?);
        }
    }
    Ok(pts)
}

pub fn grid_rows(cfg: &ExperimentConfig, data: &Dataset, est: &Estimate, pts: &[Point]) -> Result<Vec<GridRow>> {
    let ghat = est.evaluate_many(&data.spec, pts)?;
    pts.iter()
        .zip(ghat)
        .map(|(p, g)| {
            Ok(GridRow {
                x1: p[0],
                x2: p[1],
                ghat: g,
                gtrue: data.truth_at(p, &cfg.axes)?,
            })
        })
        .collect()
}

/// Excitation constants over complete windows of the data horizon.
pub fn pe_check(cfg: &ExperimentConfig, data: &Dataset) -> Result<(PEEstimate, Vec<PEWindow>)> {
    let t_end = cfg.t_end.min(data.traj.end());
    pe_constants(&data.spec, &data.traj, &data.centers, cfg.delta(), t_end)
}

/// Quantities that enter the error bounds at time `t`, and the bounds themselves
/// when the projection of the truth onto the centers is known.
pub fn bounds_rows(data: &Dataset, pe: &PEEstimate, gamma: f64, est: &Estimate) -> Result<Vec<(String, f64)>> {
    let t = est.fitted_at;
    let kbar = data.spec.sup_bound();
    let m = ((t - data.traj.start()) / pe.delta * (1.0 + 1e-12)).floor().max(0.0) as usize;
    let quad = quadrature_on_samples(&data.traj, data.traj.start(), t)?;
    let nodes = quad
        .nodes()
        .iter()
        .map(|&tau| data.traj.interpolate(tau))
        .collect::<Result<Vec<_>>>()?;
    let pl2 = power_l2(&data.spec, &data.centers, &nodes, quad.weights())?;
    let mut rows = vec![
        ("t".to_string(), t),
        ("gamma".into(), gamma),
        ("gamma1".into(), pe.gamma1),
        ("gamma2".into(), pe.gamma2),
        ("delta".into(), pe.delta),
        ("m".into(), m as f64),
        ("kbar".into(), kbar),
        ("power_l2".into(), pl2),
        ("estimate_norm".into(), est.rkhs_norm(&data.spec)?),
    ];
    if let Truth::Synthetic(g) = &data.truth {
        // the truth lies in the span of the centers
        let g_norm = g.rkhs_norm(&data.spec)?;
        let diff = Estimate::new(data.centers.clone(), &est.alpha - &g.alpha, t)?;
        let err = diff.rkhs_norm(&data.spec)?;
        rows.extend([
            ("g_norm".to_string(), g_norm),
            ("proj_err".into(), 0.0),
            ("proj_norm".into(), g_norm),
            ("bound_galerkin".into(), bound_galerkin(pe, gamma, m, kbar, 0.0, g_norm)?),
            ("bound_full_h".into(), bound_full_h(pe, gamma, m, kbar, 0.0, g_norm)?),
            ("bound_power".into(), bound_power(pe, gamma, m, kbar, pl2, g_norm, g_norm)?),
            ("measured_error".into(), err),
        ]);
    }
    Ok(rows)
}

fn label(v: f64) -> String {
    format!("{v}")
}

fn out(cfg: &ExperimentConfig, name: &str, written: &mut Vec<PathBuf>) -> PathBuf {
    let p = cfg.output_dir.join(name);
    written.push(p.clone());
    p
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// What a recipe produced.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub n_centers: usize,
    pub rmse: Vec<(f64, f64)>,
    pub pe: Option<PEEstimate>,
    pub files: Vec<PathBuf>,
}

/// `trajectory.csv` (full state) and `samples.csv` (`t,x1..xd,y`, regressor inputs).
pub fn simulate(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    io::write_trajectory(&out(cfg, "trajectory.csv", &mut files), data.full.as_ref().unwrap_or(&data.traj))?;
    io::save_samples(&out(cfg, "samples.csv", &mut files), &data.traj, &data.obs)?;
    Ok(Summary {
        n_centers: data.centers.len(),
        files,
        ..Summary::default()
    })
}

fn rmse_at(data: &Dataset, est: &Estimate) -> Result<f64> {
    orbit_rmse(est, &data.spec, &data.traj, &data.obs)
}

/// Centers, the estimate at the last checkpoint, and the RMSE timeline.
pub fn fit(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    io::write_centers(&out(cfg, "centers.csv", &mut files), &data.centers)?;
    let fitted = fit_checkpoints(cfg, &data, cfg.gamma, &cfg.checkpoints)?;
    let rmse = fitted
        .estimates
        .iter()
        .map(|e| Ok((e.fitted_at, rmse_at(&data, e)?)))
        .collect::<Result<Vec<_>>>()?;
    io::write_estimate(&out(cfg, "estimate.csv", &mut files), fitted.estimates.last().unwrap())?;
    io::write_rmse_timeline(&out(cfg, "rmse_timeline.csv", &mut files), &rmse)?;
    if let Some(h) = &fitted.history {
        io::write_coefficient_history(&out(cfg, "coefficient_history.csv", &mut files), h)?;
    }
    Ok(Summary {
        n_centers: data.centers.len(),
        rmse,
        files,
        ..Summary::default()
    })
}

/// Evaluate a saved estimate on the grid.
pub fn eval_grid(cfg: &ExperimentConfig, estimate: &Path) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    let est = io::read_estimate(estimate)?;
    if est.centers.dim() != Some(data.traj.dim()) {
        return Err(Error::Config(format!(
            "estimate centers have dimension {:?}, the configured input has {}",
            est.centers.dim(),
            data.traj.dim()
        )));
    }
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    let pts = grid_points(cfg, &data.traj)?;
    io::write_grid(&out(cfg, "grid.csv", &mut files), &grid_rows(cfg, &data, &est, &pts)?)?;
    Ok(Summary {
        n_centers: est.centers.len(),
        files,
        ..Summary::default()
    })
}

/// Power function of the selected centers on the grid: `power.csv` (`x1,x2,power`).
pub fn power(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    let pts = grid_points(cfg, &data.traj)?;
    let vals = PowerFunction::new(&data.spec, &data.centers)?.eval_many(&pts)?;
    let rows: Vec<(f64, f64, f64)> = pts.iter().zip(vals).map(|(p, v)| (p[0], p[1], v)).collect();
    io::write_centers(&out(cfg, "centers.csv", &mut files), &data.centers)?;
    io::write_power_grid(&out(cfg, "power.csv", &mut files), &rows)?;
    Ok(Summary {
        n_centers: data.centers.len(),
        files,
        ..Summary::default()
    })
}

pub fn pe_report(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    let (pe, windows) = pe_check(cfg, &data)?;
    io::write_pe_report(&out(cfg, "pe_report.csv", &mut files), &windows)?;
    Ok(Summary {
        n_centers: data.centers.len(),
        pe: Some(pe),
        files,
        ..Summary::default()
    })
}

pub fn bounds(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    let (pe, _) = pe_check(cfg, &data)?;
    let last = *cfg.checkpoints.last().unwrap();
    let fitted = fit_checkpoints(cfg, &data, cfg.gamma, &[last])?;
    let est = fitted.estimates.last().unwrap();
    io::write_key_values(&out(cfg, "bounds.csv", &mut files), &bounds_rows(&data, &pe, cfg.gamma, est)?)?;
    Ok(Summary {
        n_centers: data.centers.len(),
        pe: Some(pe),
        files,
        ..Summary::default()
    })
}

/// The full recipe; see the module docs for the artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary> {
    let data = load_dataset(cfg)?;
    prepare_dir(&cfg.output_dir)?;
    let mut files = Vec::new();
    io::write_text(&out(cfg, "config_used.txt", &mut files), &cfg.to_text())?;
    io::write_centers(&out(cfg, "centers.csv", &mut files), &data.centers)?;
    let pts = grid_points(cfg, &data.traj)?;

    let fitted = fit_checkpoints(cfg, &data, cfg.gamma, &cfg.checkpoints)?;
    let mut rmse = Vec::with_capacity(fitted.estimates.len());
    for est in &fitted.estimates {
        let t = est.fitted_at;
        rmse.push((t, rmse_at(&data, est)?));
        io::write_estimate(&out(cfg, &format!("estimate_t{}.csv", label(t)), &mut files), est)?;
        io::write_grid(
            &out(cfg, &format!("grid_t{}.csv", label(t)), &mut files),
            &grid_rows(cfg, &data, est, &pts)?,
        )?;
    }
    let last = fitted.estimates.last().unwrap();
    io::write_estimate(&out(cfg, "estimate.csv", &mut files), last)?;
    io::write_grid(&out(cfg, "grid.csv", &mut files), &grid_rows(cfg, &data, last, &pts)?)?;
    io::write_rmse_timeline(&out(cfg, "rmse_timeline.csv", &mut files), &rmse)?;
    if let Some(h) = &fitted.history {
        io::write_coefficient_history(&out(cfg, "coefficient_history.csv", &mut files), h)?;
    }

    if !cfg.gamma_sweep.is_empty() {
        let t = last.fitted_at;
        let mut sweep = Vec::new();
        for &g in &cfg.gamma_sweep {
            let est = fit_checkpoints(cfg, &data, g, &[t])?.estimates.pop().unwrap();
            sweep.push(vec![g, est.rkhs_norm(&data.spec)?, rmse_at(&data, &est)?]);
            io::write_estimate(&out(cfg, &format!("estimate_gamma{}.csv", label(g)), &mut files), &est)?;
            io::write_grid(
                &out(cfg, &format!("grid_gamma{}.csv", label(g)), &mut files),
                &grid_rows(cfg, &data, &est, &pts)?,
            )?;
        }
        io::write_table(&out(cfg, "gamma_sweep.csv", &mut files), &["gamma", "rkhs_norm", "rmse"], &sweep)?;
    }

    let (pe, windows) = pe_check(cfg, &data)?;
    io::write_pe_report(&out(cfg, "pe_report.csv", &mut files), &windows)?;
    io::write_key_values(&out(cfg, "bounds.csv", &mut files), &bounds_rows(&data, &pe, cfg.gamma, last)?)?;

    Ok(Summary {
        n_centers: data.centers.len(),
        rmse,
        pe: Some(pe),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.apply_text(
            "t_end = 4\nh = 0.005\nsubsample = 2\ncheckpoints = 1,2,4\ngamma_sweep = 1,0.1\n\
             grid_resolution = 5\ndelta = 1\nbeta = 5\neta = 3\n",
        )
        .unwrap();
        c.output_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn run_writes_expected_files_deterministically() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let sa = run(&small(a.path())).unwrap();
        let sb = run(&small(b.path())).unwrap();
        assert_eq!(sa.rmse, sb.rmse);
        for name in [
            "centers.csv",
            "estimate.csv",
            "grid.csv",
            "grid_t1.csv",
            "grid_t4.csv",
            "grid_gamma0.1.csv",
            "gamma_sweep.csv",
            "rmse_timeline.csv",
            "pe_report.csv",
            "bounds.csv",
        ] {
            let x = fs::read(a.path().join(name)).unwrap();
            let y = fs::read(b.path().join(name)).unwrap();
            assert_eq!(x, y, "{name} differs");
        }
        let grid = fs::read_to_string(a.path().join("grid.csv")).unwrap();
        assert!(grid.starts_with("x1,x2,ghat,gtrue,abserr\n"));
        assert_eq!(grid.lines().count(), 26);
    }

    #[test]
    fn erm_matches_quadrature_with_unit_weights() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.method = Method::Erm;
        let data = load_dataset(&cfg).unwrap();
        let erm = fit_checkpoints(&cfg, &data, 0.1, &[2.0]).unwrap().estimates.pop().unwrap();
        // same nodes as the samples, unit weights
        let nodes: Vec<f64> = data.traj.times().iter().copied().filter(|&t| t <= 2.0).collect();
        let quad = QuadratureRule::new(nodes.clone(), vec![1.0; nodes.len()]).unwrap();
        let m1 = fit_method1(&data.problem(0.1).unwrap(), &quad).unwrap();
        let rel = (&erm.alpha - &m1.alpha).norm() / m1.alpha.norm();
        assert!(rel <= 1e-8, "{rel}");
    }

    #[test]
    fn synthetic_bounds_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.observable = Observable::Synthetic;
        let data = load_dataset(&cfg).unwrap();
        let (pe, _) = pe_check(&cfg, &data).unwrap();
        let est = fit_checkpoints(&cfg, &data, 0.1, &[4.0]).unwrap().estimates.pop().unwrap();
        let rows = bounds_rows(&data, &pe, 0.1, &est).unwrap();
        let get = |k: &str| rows.iter().find(|r| r.0 == k).unwrap().1;
        assert_eq!(get("m"), 4.0);
        assert!(get("measured_error").is_finite());
        assert!(get("bound_full_h") >= get("bound_galerkin"));
    }

    #[test]
    fn grid_needs_two_axes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.axes = vec![0];
        let data = load_dataset(&cfg).unwrap();
        assert!(grid_points(&cfg, &data.traj).is_err());
        cfg.axes = vec![0, 1];
        cfg.grid_bounds = Some([0.0, 1.0, -1.0, 1.0]);
        let data = load_dataset(&cfg).unwrap();
        let pts = grid_points(&cfg, &data.traj).unwrap();
        assert_eq!(pts[0].coords(), &[0.0, -1.0]);
        assert_eq!(pts[24].coords(), &[1.0, 1.0]);
    }
}
