//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Lists are comma
//! separated. Later assignments win, so defaults < file < command-line flags
//! is just the order in which [`ExperimentConfig::apply`] is called.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `kernel` | `matern` | `matern` or `gaussian` |
//! | `beta` | `5` | kernel length scale |
//! | `distance_mode` | `norm` for matern, `squared` for gaussian | argument of the kernel profile |
//! | `gamma` | `0.1` | regularization |
//! | `gamma_sweep` | `20,5,0.1,0.001` | extra γ values fitted by `run` (empty to skip) |
//! | `eta` | `2` | center separation |
//! | `system` | `lorenz` | `lorenz` or `csv` |
//! | `csv_path` | | samples file `t,x1..xd,y` when `system = csv` |
//! | `sigma`, `r`, `b` | `10`, `28`, `8/3` | Lorenz parameters |
//! | `rhs_mode` | `standard` | `standard` or `variant` |
//! | `x0` | `1,1,1` | initial state |
//! | `t_end` | `200` | horizon in seconds |
//! | `h` | `0.001` | integrator step |
//! | `subsample` | `10` | keep every n-th integrator step for regression |
//! | `center_subsample` | `5` | keep every n-th regression sample as a center candidate |
//! | `method` | `1` | `1` (quadrature), `2` (coefficient evolution), `erm` |
//! | `axes` | `0,1` | state components the regressor sees |
//! | `interp` | `cubic` | `cubic` or `linear` between samples |
//! | `quadrature` | `samples` | `samples` (trapezoid on samples) or `centers` (one point per center) |
//! | `grid_bounds` | bounding box widened 5% per side | `x1min,x1max,x2min,x2max` |
//! | `grid_resolution` | `100` | points per axis |
//! | `delta` | `t_end/10` | excitation window length |
//! | `checkpoints` | `10,20,50,200` | fit times |
//! | `seed` | `0` | coefficients of the synthetic observable |
//! | `observable` | `lorenz_test` | `lorenz_test` or `synthetic` (random combination of center kernels) |
//! | `output_dir` | `out` | where artifacts go |
//! | `history_stride` | | record coefficients every n steps (method 2) |

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::dynamics::{Interp, LorenzParams, RhsMode};
use crate::error::{Error, Result};
use crate::kernels::{DistanceMode, KernelFamily, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Lorenz,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Evolution,
    Erm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureChoice {
    Samples,
    Centers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    LorenzTest,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: KernelFamily,
    pub beta: f64,
    pub distance_mode: Option<DistanceMode>,
    pub gamma: f64,
    pub gamma_sweep: Vec<f64>,
    pub eta: f64,
    pub system: SystemKind,
    pub csv_path: Option<PathBuf>,
    pub lorenz: LorenzParams,
    pub x0: Vec<f64>,
    pub t_end: f64,
    pub h: f64,
    pub subsample: usize,
    pub center_subsample: usize,
    pub method: Method,
    pub axes: Vec<usize>,
    pub interp: Interp,
    pub quadrature: QuadratureChoice,
    pub grid_bounds: Option<[f64; 4]>,
    pub grid_resolution: usize,
    pub delta: Option<f64>,
    pub checkpoints: Vec<f64>,
    pub seed: u64,
    pub observable: Observable,
    pub output_dir: PathBuf,
    pub history_stride: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kernel: KernelFamily::Matern32,
            beta: 5.0,
            distance_mode: None,
            gamma: 0.1,
            gamma_sweep: vec![20.0, 5.0, 0.1, 0.001],
            eta: 2.0,
            system: SystemKind::Lorenz,
            csv_path: None,
            lorenz: LorenzParams::default(),
            x0: vec![1.0, 1.0, 1.0],
            t_end: 200.0,
            h: 0.001,
            subsample: 10,
            center_subsample: 5,
            method: Method::Quadrature,
            axes: vec![0, 1],
            interp: Interp::CubicHermite,
            quadrature: QuadratureChoice::Samples,
            grid_bounds: None,
            grid_resolution: 100,
            delta: None,
            checkpoints: vec![10.0, 20.0, 50.0, 200.0],
            seed: 0,
            observable: Observable::LorenzTest,
            output_dir: PathBuf::from("out"),
            history_stride: None,
        }
    }
}

fn cfg_err(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = {value:?}: {what}"))
}

fn num(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| cfg_err(key, v, "expected a finite number"))
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| cfg_err(key, v, "expected a nonnegative integer"))
}

fn list<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| f(key, s.trim())).collect()
}

impl ExperimentConfig {
    /// Set one key. Values are validated individually here and jointly in [`validate`](Self::validate).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "kernel" => {
                self.kernel = match v {
                    "matern" | "matern32" => KernelFamily::Matern32,
                    "gaussian" => KernelFamily::Gaussian,
                    _ => return Err(cfg_err(key, v, "expected matern or gaussian")),
                }
            }
            "beta" => self.beta = num(key, v)?,
            "distance_mode" => {
                self.distance_mode = Some(match v {
                    "norm" => DistanceMode::Norm,
                    "squared" | "squared_norm" => DistanceMode::SquaredNorm,
                    _ => return Err(cfg_err(key, v, "expected norm or squared")),
                })
            }
            "gamma" => self.gamma = num(key, v)?,
            "gamma_sweep" => self.gamma_sweep = list(key, v, num)?,
            "eta" => self.eta = num(key, v)?,
            "system" => {
                self.system = match v {
                    "lorenz" => SystemKind::Lorenz,
                    "csv" => SystemKind::Csv,
                    _ => return Err(cfg_err(key, v, "expected lorenz or csv")),
                }
            }
            "csv_path" => self.csv_path = Some(PathBuf::from(v)),
            "sigma" => self.lorenz.sigma = num(key, v)?,
            "r" => self.lorenz.r = num(key, v)?,
            "b" => self.lorenz.b = num(key, v)?,
            "rhs_mode" => {
                self.lorenz.rhs_mode = match v {
                    "standard" => RhsMode::Standard,
                    "variant" => RhsMode::Variant,
                    _ => return Err(cfg_err(key, v, "expected standard or variant")),
                }
            }
            "x0" => self.x0 = list(key, v, num)?,
            "t_end" => self.t_end = num(key, v)?,
            "h" => self.h = num(key, v)?,
            "subsample" => self.subsample = count(key, v)?,
            "center_subsample" => self.center_subsample = count(key, v)?,
            "method" => {
                self.method = match v {
                    "1" | "quadrature" => Method::Quadrature,
                    "2" | "evolution" => Method::Evolution,
                    "erm" => Method::Erm,
                    _ => return Err(cfg_err(key, v, "expected 1, 2 or erm")),
                }
            }
            "axes" => self.axes = list(key, v, count)?,
            "interp" => {
                self.interp = match v {
                    "cubic" => Interp::CubicHermite,
                    "linear" => Interp::Linear,
                    _ => return Err(cfg_err(key, v, "expected cubic or linear")),
                }
            }
            "quadrature" => {
                self.quadrature = match v {
                    "samples" => QuadratureChoice::Samples,
                    "centers" => QuadratureChoice::Centers,
                    _ => return Err(cfg_err(key, v, "expected samples or centers")),
                }
            }
            "grid_bounds" => {
                if v.is_empty() || v == "auto" {
                    self.grid_bounds = None;
                } else {
                    let b = list(key, v, num)?;
                    let b: [f64; 4] = b
                        .try_into()
                        .map_err(|_| cfg_err(key, v, "expected x1min,x1max,x2min,x2max"))?;
                    self.grid_bounds = Some(b);
                }
            }
            "grid_resolution" => self.grid_resolution = count(key, v)?,
            "delta" => self.delta = if v == "auto" { None } else { Some(num(key, v)?) },
            "checkpoints" => self.checkpoints = list(key, v, num)?,
            "seed" => self.seed = v.parse().map_err(|_| cfg_err(key, v, "expected an integer"))?,
            "observable" => {
                self.observable = match v {
                    "lorenz_test" => Observable::LorenzTest,
                    "synthetic" => Observable::Synthetic,
                    _ => return Err(cfg_err(key, v, "expected lorenz_test or synthetic")),
                }
            }
            "output_dir" => self.output_dir = PathBuf::from(v),
            "history_stride" => {
                self.history_stride = match count(key, v)? {
                    0 => None,
                    n => Some(n),
                }
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Apply every assignment in `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.apply(k, v)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_config(e))))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let mode = self.distance_mode.unwrap_or(match self.kernel {
            KernelFamily::Matern32 => DistanceMode::Norm,
            KernelFamily::Gaussian => DistanceMode::SquaredNorm,
        });
        KernelSpec::new(self.kernel, self.beta, mode).map_err(|e| Error::Config(strip_config(e)))
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(self.t_end / 10.0)
    }

    /// Step of the coefficient evolution: the regression sample spacing.
    pub fn sample_step(&self) -> f64 {
        self.h * self.subsample as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.kernel_spec()?;
        let positive = [
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("t_end", self.t_end),
            ("h", self.h),
            ("delta", self.delta()),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k} must be positive, got {v}"));
            }
        }
        if let Some(g) = self.gamma_sweep.iter().find(|g| **g <= 0.0 || g.is_nan()) {
            return bad(format!("gamma_sweep values must be positive, got {g}"));
        }
        if self.subsample == 0 || self.center_subsample == 0 {
            return bad("subsample and center_subsample must be at least 1".into());
        }
        if self.grid_resolution < 2 {
            return bad(format!("grid_resolution must be at least 2, got {}", self.grid_resolution));
        }
        if let Some(b) = self.grid_bounds {
            if !(b[0] < b[1] && b[2] < b[3]) {
                return bad("grid_bounds must satisfy min < max on both axes".into());
            }
        }
        if self.axes.is_empty() {
            return bad("axes must name at least one component".into());
        }
        if self.checkpoints.is_empty() {
            return bad("at least one checkpoint is required".into());
        }
        let mut prev = 0.0;
        for &c in &self.checkpoints {
            if c <= prev || c.is_nan() {
                return bad("checkpoints must be positive and increasing".into());
            }
            prev = c;
        }
        match self.system {
            SystemKind::Lorenz => {
                LorenzParams::new(self.lorenz.sigma, self.lorenz.r, self.lorenz.b, self.lorenz.rhs_mode)
                    .map_err(|e| Error::Config(strip_config(e)))?;
                if self.x0.len() != 3 {
                    return bad(format!("x0 needs 3 components, got {}", self.x0.len()));
                }
                if let Some(&a) = self.axes.iter().find(|&&a| a >= 3) {
                    return bad(format!("axis {a} out of range for the Lorenz state"));
                }
                if prev > self.t_end {
                    return bad(format!("last checkpoint {prev} exceeds t_end {}", self.t_end));
                }
            }
            SystemKind::Csv => {
                if self.csv_path.is_none() {
                    return bad("system = csv needs csv_path".into());
                }
                if self.observable == Observable::Synthetic {
                    return bad("the synthetic observable needs system = lorenz".into());
                }
            }
        }
        Ok(())
    }

    /// All keys with their current values, in the file format.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let spec_mode = self.kernel_spec().map(|s| s.distance_mode()).ok();
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put(
            "kernel",
            match self.kernel {
                KernelFamily::Matern32 => "matern",
                KernelFamily::Gaussian => "gaussian",
            }
            .into(),
        );
        put("beta", self.beta.to_string());
        if let Some(m) = spec_mode {
            put(
                "distance_mode",
                match m {
                    DistanceMode::Norm => "norm",
                    DistanceMode::SquaredNorm => "squared",
                }
                .into(),
            );
        }
        put("gamma", self.gamma.to_string());
        put("gamma_sweep", join(&self.gamma_sweep));
        put("eta", self.eta.to_string());
        put(
            "system",
            match self.system {
                SystemKind::Lorenz => "lorenz",
                SystemKind::Csv => "csv",
            }
            .into(),
        );
        if let Some(p) = &self.csv_path {
            put("csv_path", p.display().to_string());
        }
        put("sigma", self.lorenz.sigma.to_string());
        put("r", self.lorenz.r.to_string());
        put("b", self.lorenz.b.to_string());
        put(
            "rhs_mode",
            match self.lorenz.rhs_mode {
                RhsMode::Standard => "standard",
                RhsMode::Variant => "variant",
            }
            .into(),
        );
        put("x0", join(&self.x0));
        put("t_end", self.t_end.to_string());
        put("h", self.h.to_string());
        put("subsample", self.subsample.to_string());
        put("center_subsample", self.center_subsample.to_string());
        put(
            "method",
            match self.method {
                Method::Quadrature => "1",
                Method::Evolution => "2",
                Method::Erm => "erm",
            }
            .into(),
        );
        put(
            "axes",
            self.axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
        );
        put(
            "interp",
            match self.interp {
                Interp::CubicHermite => "cubic",
                Interp::Linear => "linear",
            }
            .into(),
        );
        put(
            "quadrature",
            match self.quadrature {
                QuadratureChoice::Samples => "samples",
                QuadratureChoice::Centers => "centers",
            }
            .into(),
        );
        put("grid_bounds", self.grid_bounds.map_or("auto".into(), |b| join(&b)));
        put("grid_resolution", self.grid_resolution.to_string());
        put("delta", self.delta().to_string());
        put("checkpoints", join(&self.checkpoints));
        put("seed", self.seed.to_string());
        put(
            "observable",
            match self.observable {
                Observable::LorenzTest => "lorenz_test",
                Observable::Synthetic => "synthetic",
            }
            .into(),
        );
        put("output_dir", self.output_dir.display().to_string());
        put("history_stride", self.history_stride.unwrap_or(0).to_string());
        s
    }
}

fn strip_config(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
