//! CSV input and output.
//!
//! Every file has a header row. Floats are written as `{:.16e}` (17
//! significant digits) so a write/read cycle is bit-exact. Times are in
//! seconds; states and observables are in the units of the input data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;

use crate::centers::CenterSet;
use crate::dynamics::{Interp, Observations, Trajectory};
use crate::error::{Error, Result};
use crate::operator::PEWindow;
use crate::point::Point;
use crate::regression::{CoefficientHistory, Estimate};

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

fn finish(w: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    inner.flush()?;
    Ok(())
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

/// Read `t,x1,…,xd,y`. The state dimension is taken from the header.
pub fn load_samples(path: &Path, interp: Interp) -> Result<(Trajectory, Observations)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 3 {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header t,x1..xd,y, found {} columns", header.len()),
        });
    }
    if &header[0] != "t" || &header[header.len() - 1] != "y" {
        return Err(Error::Parse {
            line: 1,
            msg: "header must start with t and end with y".into(),
        });
    }
    let d = header.len() - 2;
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut ys = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != d + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", d + 2, rec.len()),
            });
        }
        let mut vals = Vec::with_capacity(d + 2);
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite value {field:?}"),
                });
            }
            vals.push(v);
        }
        if let Some(&prev) = times.last() {
            if vals[0] <= prev {
                return Err(Error::Parse {
                    line,
                    msg: format!("time {} does not increase past {prev}", vals[0]),
                });
            }
        }
        times.push(vals[0]);
        ys.push(vals[d + 1]);
        states.push(Point::from_vec_unchecked(vals[1..=d].to_vec()));
    }
    if times.len() < 2 {
        return Err(Error::Parse {
            line: times.len() + 1,
            msg: "need at least two samples".into(),
        });
    }
    let traj = Trajectory::new(times.clone(), states, interp)?;
    let obs = Observations::new(times, ys)?;
    Ok((traj, obs))
}

/// Write `t,x1,…,xd,y`; the inverse of [`load_samples`].
pub fn save_samples(path: &Path, traj: &Trajectory, obs: &Observations) -> Result<()> {
    if obs.times() != traj.times() {
        return Err(Error::InvalidParameter(
            "observations must share the trajectory sample times".into(),
        ));
    }
    let mut w = writer(path)?;
    let mut head = vec!["t".to_string()];
    head.extend(numbered("x", traj.dim()));
    head.push("y".into());
    w.write_record(&head)?;
    for ((t, x), y) in traj.times().iter().zip(traj.states()).zip(obs.values()) {
        let mut row = vec![fmt_f64(*t)];
        row.extend(x.iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(*y));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `t,x1,…,xd`.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = writer(path)?;
    let mut head = vec!["t".to_string()];
    head.extend(numbered("x", traj.dim()));
    w.write_record(&head)?;
    for (t, x) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![fmt_f64(*t)];
        row.extend(x.iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `index,t,x1,…,xd`; `t` is the time the center was selected.
pub fn write_centers(path: &Path, centers: &CenterSet) -> Result<()> {
    let d = centers.dim().unwrap_or(0);
    let mut w = writer(path)?;
    let mut head = vec!["index".to_string(), "t".into()];
    head.extend(numbered("x", d));
    w.write_record(&head)?;
    for (i, (c, t)) in centers.centers().iter().zip(centers.times()).enumerate() {
        let mut row = vec![i.to_string(), fmt_f64(*t)];
        row.extend(c.iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `index,center_t,x1,…,xd,alpha`.
pub fn write_estimate(path: &Path, est: &Estimate) -> Result<()> {
    let d = est.centers.dim().unwrap_or(0);
    let mut w = writer(path)?;
    let mut head = vec!["index".to_string(), "center_t".into()];
    head.extend(numbered("x", d));
    head.push("alpha".into());
    w.write_record(&head)?;
    let c = &est.centers;
    for (i, ((x, t), a)) in c.centers().iter().zip(c.times()).zip(est.alpha.iter()).enumerate() {
        let mut row = vec![i.to_string(), fmt_f64(*t)];
        row.extend(x.iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(*a));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Inverse of [`write_estimate`]; `fitted_at` is not stored and comes back as 0.
pub fn read_estimate(path: &Path) -> Result<Estimate> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 4 || &header[0] != "index" || &header[header.len() - 1] != "alpha" {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header index,center_t,x1..xd,alpha".into(),
        });
    }
    let d = header.len() - 3;
    let (mut pts, mut times, mut alpha) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let vals = rec
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        if vals.len() != d + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", d + 3, rec.len()),
            });
        }
        times.push(vals[0]);
        pts.push(Point::new(vals[1..=d].to_vec())?);
        alpha.push(vals[d + 1]);
    }
    let sep = separation_of(&pts);
    let centers = CenterSet::from_parts(pts, times, sep)?;
    Estimate::new(centers, DVector::from_vec(alpha), 0.0)
}

fn separation_of(pts: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.min(a.distance(b));
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// `t,alpha_1,…,alpha_N`.
pub fn write_coefficient_history(path: &Path, hist: &CoefficientHistory) -> Result<()> {
    let n = hist.alphas.first().map_or(0, |a| a.len());
    let mut w = writer(path)?;
    let mut head = vec!["t".to_string()];
    head.extend(numbered("alpha_", n));
    w.write_record(&head)?;
    for (t, a) in hist.times.iter().zip(&hist.alphas) {
        let mut row = vec![fmt_f64(*t)];
        row.extend(a.iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// One row of a grid file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub x1: f64,
    pub x2: f64,
    pub ghat: f64,
    pub gtrue: Option<f64>,
}

/// `x1,x2,ghat[,gtrue,abserr]`. The truth columns appear when every row has one.
pub fn write_grid(path: &Path, rows: &[GridRow]) -> Result<()> {
    let truth = !rows.is_empty() && rows.iter().all(|r| r.gtrue.is_some());
    let mut w = writer(path)?;
    if truth {
        w.write_record(["x1", "x2", "ghat", "gtrue", "abserr"])?;
    } else {
        w.write_record(["x1", "x2", "ghat"])?;
    }
    for r in rows {
        let mut row = vec![fmt_f64(r.x1), fmt_f64(r.x2), fmt_f64(r.ghat)];
        if truth {
            let g = r.gtrue.unwrap();
            row.push(fmt_f64(g));
            row.push(fmt_f64((r.ghat - g).abs()));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// `x1,x2,power`.
pub fn write_power_grid(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["x1", "x2", "power"])?;
    for &(a, b, p) in rows {
        w.write_record([fmt_f64(a), fmt_f64(b), fmt_f64(p)])?;
    }
    finish(w)
}

/// `t,rmse`.
pub fn write_rmse_timeline(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "rmse"])?;
    for &(t, e) in rows {
        w.write_record([fmt_f64(t), fmt_f64(e)])?;
    }
    finish(w)
}

/// `window,s,t,min_lambda,max_lambda`.
pub fn write_pe_report(path: &Path, windows: &[PEWindow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["window", "s", "t", "min_lambda", "max_lambda"])?;
    for win in windows {
        w.write_record([
            win.index.to_string(),
            fmt_f64(win.s),
            fmt_f64(win.t),
            fmt_f64(win.min_lambda),
            fmt_f64(win.max_lambda),
        ])?;
    }
    finish(w)
}

/// Numeric table with the given header.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt_f64(v)))?;
    }
    finish(w)
}

/// `quantity,value`.
pub fn write_key_values(path: &Path, rows: &[(String, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["quantity", "value"])?;
    for (k, v) in rows {
        w.write_record([k.clone(), fmt_f64(*v)])?;
    }
    finish(w)
}

/// Plain text for reports that are not tables.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}
