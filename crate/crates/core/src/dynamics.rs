//! Trajectories of the input dynamics: the Lorenz system, fixed-step RK4,
//! interpolation between samples, and the Lyapunov diagnostics used to show
//! orbits are precompact.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::point::{check_same_dim, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsMode {
    /// `(σ(y−x), x(r−z)−y, xy−bz)`
    #[default]
    Standard,
    /// `(σ(y−z), r(x−y−xz), xy−bz)`, as it appears in some printed sources.
    Variant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
    pub rhs_mode: RhsMode,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
            rhs_mode: RhsMode::Standard,
        }
    }
}

impl LorenzParams {
    pub fn new(sigma: f64, r: f64, b: f64, rhs_mode: RhsMode) -> Result<Self> {
        for (name, v) in [("sigma", sigma), ("r", r), ("b", b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "Lorenz parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(LorenzParams {
            sigma,
            r,
            b,
            rhs_mode,
        })
    }

    pub fn rhs(&self, state: &[f64]) -> Result<[f64; 3]> {
        check_same_dim(3, state.len())?;
        let mut out = [0.0; 3];
        self.rhs_into(state, &mut out);
        Ok(out)
    }

    fn rhs_into(&self, s: &[f64], out: &mut [f64]) {
        let (x, y, z) = (s[0], s[1], s[2]);
        let (sigma, r, b) = (self.sigma, self.r, self.b);
        match self.rhs_mode {
            RhsMode::Standard => {
                out[0] = sigma * (y - x);
                out[1] = x * (r - z) - y;
                out[2] = x * y - b * z;
            }
            RhsMode::Variant => {
                out[0] = sigma * (y - z);
                out[1] = r * (x - y - x * z);
                out[2] = x * y - b * z;
            }
        }
    }

    /// Right-hand side as a closure for [`integrate_fixed_step`].
    pub fn vector_field(&self) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |s, out| self.rhs_into(s, out)
    }

    /// `V = r x² + σ y² + σ (z − 2r)²`
    pub fn lyapunov_value(&self, s: &[f64]) -> f64 {
        let (x, y, z) = (s[0], s[1], s[2]);
        self.r * x * x + self.sigma * y * y + self.sigma * (z - 2.0 * self.r).powi(2)
    }

    /// `V̇ = −2σ (r x² + y² + b z² − 2 b r z)` along the standard flow.
    pub fn lyapunov_derivative(&self, s: &[f64]) -> f64 {
        let (x, y, z) = (s[0], s[1], s[2]);
        -2.0 * self.sigma
            * (self.r * x * x + y * y + self.b * z * z - 2.0 * self.b * self.r * z)
    }

    /// Point on the boundary of `Ω = {V̇ ≥ 0}` at angles `(θ, ψ)`.
    fn ellipse_point(&self, theta: f64, psi: f64) -> [f64; 3] {
        let ax = (self.b * self.r).sqrt();
        let ay = self.b.sqrt() * self.r;
        [
            ax * theta.sin() * psi.cos(),
            ay * theta.sin() * psi.sin(),
            self.r + self.r * theta.cos(),
        ]
    }

    /// `V̄ = max_Ω V`, found by an angular grid over the boundary ellipsoid of
    /// `Ω` followed by a shrinking pattern search. `V` is convex, so the
    /// maximum over the compact convex set is attained on its boundary.
    pub fn lyapunov_max_on_omega(&self) -> f64 {
        let (nt, np) = (181, 360);
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..nt {
            let theta = PI * i as f64 / (nt - 1) as f64;
            for j in 0..np {
                let psi = 2.0 * PI * j as f64 / np as f64;
                let v = self.lyapunov_value(&self.ellipse_point(theta, psi));
                if v > best.0 {
                    best = (v, theta, psi);
                }
            }
        }
        let mut step = PI / (nt - 1) as f64;
        while step > 1e-12 {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let theta = (best.1 + dt).clamp(0.0, PI);
                let psi = best.2 + dp;
                let v = self.lyapunov_value(&self.ellipse_point(theta, psi));
                if v > best.0 {
                    best = (v, theta, psi);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best.0
    }
}

/// Interpolation rule between trajectory samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interp {
    Linear,
    /// Cubic Hermite with Catmull-Rom tangents (C¹).
    #[default]
    CubicHermite,
}

/// Time-stamped samples of `t ↦ φ(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Point>,
    interp: Interp,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Point>, interp: Interp) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("trajectory".into()));
        }
        check_same_dim(times.len(), states.len())?;
        check_times(&times)?;
        let d = states[0].dim();
        for s in &states {
            check_same_dim(d, s.dim())?;
        }
        Ok(Trajectory {
            times,
            states,
            interp,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Point] {
        &self.states
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn with_interp(mut self, interp: Interp) -> Self {
        self.interp = interp;
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// State at time `t` by the trajectory's interpolation rule.
    pub fn interpolate(&self, t: f64) -> Result<Point> {
        let mut out = vec![0.0; self.dim()];
        self.interpolate_into(t, &mut out)?;
        Ok(Point::from_vec_unchecked(out))
    }

    pub fn interpolate_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        interpolate_channels(&self.times, |i| &self.states[i], self.interp, t, out)
    }

    /// Keep the coordinates in `axes`, in that order.
    pub fn project(&self, axes: &[usize]) -> Result<Trajectory> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("no projection axes".into()));
        }
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.dim() {
                return Err(Error::InvalidParameter(format!(
                    "axis {a} out of range for dimension {}",
                    self.dim()
                )));
            }
            if axes[..i].contains(&a) {
                return Err(Error::InvalidParameter(format!("repeated axis {a}")));
            }
        }
        let states = self
            .states
            .iter()
            .map(|s| Point::from_vec_unchecked(axes.iter().map(|&a| s[a]).collect()))
            .collect();
        Ok(Trajectory {
            times: self.times.clone(),
            states,
            interp: self.interp,
        })
    }

    /// Plane projection onto `(first, second)`.
    pub fn project_plane(&self, axes: (usize, usize)) -> Result<Trajectory> {
        self.project(&[axes.0, axes.1])
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn subsample(&self, stride: usize) -> Result<Trajectory> {
        if stride == 0 {
            return Err(Error::InvalidParameter("subsample stride must be ≥ 1".into()));
        }
        Ok(Trajectory {
            times: self.times.iter().copied().step_by(stride).collect(),
            states: self.states.iter().cloned().step_by(stride).collect(),
            interp: self.interp,
        })
    }

    /// Samples with `t ≤ t_end`.
    pub fn truncate(&self, t_end: f64) -> Result<Trajectory> {
        let n = self.times.partition_point(|&t| t <= t_end);
        if n == 0 {
            return Err(Error::OutOfRange {
                t: t_end,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(Trajectory {
            times: self.times[..n].to_vec(),
            states: self.states[..n].to_vec(),
            interp: self.interp,
        })
    }

    /// Per-coordinate `(min, max)` over the samples.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim())
            .map(|a| {
                self.states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s[a]), hi.max(s[a]))
                })
            })
            .collect()
    }
}

/// Measurements `y(t_i) = G(φ(t_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Observations {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("observations".into()));
        }
        check_same_dim(times.len(), values.len())?;
        check_times(&times)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation values".into()));
        }
        Ok(Observations { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `y(t)` between samples. Exact at sample times.
    pub fn interpolate(&self, t: f64, interp: Interp) -> Result<f64> {
        let mut out = [0.0];
        interpolate_channels(
            &self.times,
            |i| std::slice::from_ref(&self.values[i]),
            interp,
            t,
            &mut out,
        )?;
        Ok(out[0])
    }

    /// Samples with `t ≤ t_end`.
    pub fn truncate(&self, t_end: f64) -> Result<Observations> {
        let n = self.times.partition_point(|&t| t <= t_end);
        if n == 0 {
            return Err(Error::OutOfRange {
                t: t_end,
                start: self.times[0],
                end: *self.times.last().unwrap(),
            });
        }
        Ok(Observations {
            times: self.times[..n].to_vec(),
            values: self.values[..n].to_vec(),
        })
    }

    pub fn subsample(&self, stride: usize) -> Result<Observations> {
        if stride == 0 {
            return Err(Error::InvalidParameter("subsample stride must be ≥ 1".into()));
        }
        Ok(Observations {
            times: self.times.iter().copied().step_by(stride).collect(),
            values: self.values.iter().copied().step_by(stride).collect(),
        })
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("sample times".into()));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "sample times must be strictly increasing (index {})",
            i + 1
        )));
    }
    Ok(())
}

fn interpolate_channels<'a>(
    times: &[f64],
    sample: impl Fn(usize) -> &'a [f64],
    interp: Interp,
    t: f64,
    out: &mut [f64],
) -> Result<()> {
    let n = times.len();
    let (start, end) = (times[0], times[n - 1]);
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    // exact knot hit
    let k = times.partition_point(|&s| s < t);
    if k < n && times[k] == t {
        out.copy_from_slice(sample(k));
        return Ok(());
    }
    // times[k-1] < t < times[k]
    let (i0, i1) = (k - 1, k);
    let dt = times[i1] - times[i0];
    let s = (t - times[i0]) / dt;
    let p0 = sample(i0);
    let p1 = sample(i1);
    match interp {
        Interp::Linear => {
            for (o, (a, b)) in out.iter_mut().zip(p0.iter().zip(p1)) {
                *o = a + s * (b - a);
            }
        }
        Interp::CubicHermite => {
            let tangent = |i: usize, c: usize| -> f64 {
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (sample(hi)[c] - sample(lo)[c]) / (times[hi] - times[lo])
            };
            let s2 = s * s;
            let s3 = s2 * s;
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            for (c, o) in out.iter_mut().enumerate() {
                *o = h00 * p0[c]
                    + h10 * dt * tangent(i0, c)
                    + h01 * p1[c]
                    + h11 * dt * tangent(i1, c);
            }
        }
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta stepper with reusable stage buffers.
pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advance `y` from `t` to `t + h` for `ẏ = f(t, y)`.
    pub(crate) fn step<F>(&mut self, f: &mut F, t: f64, y: &mut [f64], h: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        f(t, y, &mut self.k1)?;
        axpy_into(&mut self.tmp, y, 0.5 * h, &self.k1);
        f(t + 0.5 * h, &self.tmp, &mut self.k2)?;
        axpy_into(&mut self.tmp, y, 0.5 * h, &self.k2);
        f(t + 0.5 * h, &self.tmp, &mut self.k3)?;
        axpy_into(&mut self.tmp, y, h, &self.k3);
        f(t + h, &self.tmp, &mut self.k4)?;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

fn axpy_into(out: &mut [f64], y: &[f64], a: f64, x: &[f64]) {
    for ((o, yi), xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}

/// Fixed-step RK4 samples at `t = 0, h, 2h, …`; the final step is shortened
/// when `t_end` is not a multiple of `h`.
pub fn integrate_fixed_step<F>(rhs: F, x0: &Point, t_end: f64, h: f64) -> Result<Trajectory>
where
    F: Fn(&[f64], &mut [f64]),
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "end time must be positive, got {t_end}"
        )));
    }
    let ratio = t_end / h;
    let mut steps = ratio.round() as usize;
    if ((steps as f64) - ratio).abs() > 1e-9 * ratio.max(1.0) {
        steps = ratio.ceil() as usize;
    }
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = x0.coords().to_vec();
    let mut stepper = Rk4::new(y.len());
    let mut f = |_t: f64, s: &[f64], out: &mut [f64]| -> Result<()> {
        rhs(s, out);
        Ok(())
    };
    times.push(0.0);
    states.push(x0.clone());
    for i in 0..steps {
        let t = i as f64 * h;
        let t_next = if i + 1 == steps { t_end } else { (i + 1) as f64 * h };
        stepper.step(&mut f, t, &mut y, t_next - t)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: t_next });
        }
        times.push(t_next);
        states.push(Point::from_vec_unchecked(y.clone()));
    }
    Trajectory::new(times, states, Interp::default())
}

/// `values[i] = G(states[i])`.
pub fn observe<G>(traj: &Trajectory, g: G) -> Result<Observations>
where
    G: Fn(&[f64]) -> f64,
{
    let values: Vec<f64> = traj.states().iter().map(|s| g(s)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "observable at t = {}",
            traj.times()[i]
        )));
    }
    Observations::new(traj.times().to_vec(), values)
}

/// `G(x, y) = −10 sin(y/10) + (x + y)³/2000 + 200`, the planar test output.
pub fn lorenz_test_function(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    -10.0 * (y / 10.0).sin() + (x + y).powi(3) / 2000.0 + 200.0
}
