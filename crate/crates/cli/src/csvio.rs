//! CSV artifacts. Floats are written as 17-significant-digit scientific
//! decimals so values round-trip exactly and files are byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use ptd_core::detector::{SumSeries, TransitionReport};
use ptd_core::dimest::ResidualCurve;
use ptd_core::geometry::PointCloud;
use ptd_core::spectra::RatioSeries;
use ptd_core::vicsek::{SwarmState, SwarmTrajectory};

use crate::error::{io_at, CliError, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory(path: &Path, traj: &SwarmTrajectory) -> Result<()> {
    let mut out = String::from("n,i,x,y,theta\n");
    for state in &traj.states {
        for i in 0..traj.particles {
            let p = state.positions[i];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                state.step,
                i + 1,
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(state.headings[i])
            );
        }
    }
    io_at(path, std::fs::write(path, out))
}

/// Reads `n,i,x,y,theta` rows back into a trajectory. Steps must be
/// contiguous from 1 and each must list particles 1..=count in order.
pub fn read_trajectory(path: &Path, box_side: f64) -> Result<SwarmTrajectory> {
    let text = io_at(path, std::fs::read_to_string(path))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", path.display())))?;
    if header.trim() != "n,i,x,y,theta" {
        return Err(CliError::data(format!(
            "{}: expected header `n,i,x,y,theta`, got `{header}`",
            path.display()
        )));
    }
    let mut states: Vec<SwarmState> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::data(format!(
                "{}: line {}: expected 5 fields",
                path.display(),
                lineno + 2
            )));
        }
        let bad = |what: &str| {
            CliError::data(format!(
                "{}: line {}: bad {what}",
                path.display(),
                lineno + 2
            ))
        };
        let n: usize = fields[0].parse().map_err(|_| bad("step"))?;
        let i: usize = fields[1].parse().map_err(|_| bad("particle"))?;
        let x: f64 = fields[2].parse().map_err(|_| bad("x"))?;
        let y: f64 = fields[3].parse().map_err(|_| bad("y"))?;
        let theta: f64 = fields[4].parse().map_err(|_| bad("theta"))?;
        if n == states.len() + 1 && i == 1 {
            states.push(SwarmState {
                step: n,
                positions: Vec::new(),
                headings: Vec::new(),
            });
        }
        let state = states
            .last_mut()
            .filter(|s| s.step == n)
            .ok_or_else(|| bad("step order"))?;
        if i != state.positions.len() + 1 {
            return Err(bad("particle order"));
        }
        state.positions.push([x, y]);
        state.headings.push(theta);
    }
    if states.is_empty() {
        return Err(CliError::data(format!("{}: no rows", path.display())));
    }
    let particles = states[0].positions.len();
    if states.iter().any(|s| s.positions.len() != particles) {
        return Err(CliError::data(format!(
            "{}: steps disagree on particle count",
            path.display()
        )));
    }
    Ok(SwarmTrajectory {
        particles,
        box_side,
        states,
    })
}

pub fn write_ratio_series(path: &Path, rs: &RatioSeries) -> Result<()> {
    let mut out = String::from("n,ratio,degenerate\n");
    for (i, (&r, &flag)) in rs.ratios.iter().zip(rs.degenerate.iter()).enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, fmt_f64(r), u8::from(flag));
    }
    io_at(path, std::fs::write(path, out))
}

pub fn write_sum_series(path: &Path, ss: &SumSeries) -> Result<()> {
    let mut out = String::from("n,sigma_sum\n");
    for (i, &v) in ss.values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", ss.index_at(i), fmt_f64(v));
    }
    io_at(path, std::fs::write(path, out))
}

pub fn write_top_list(path: &Path, report: &TransitionReport) -> Result<()> {
    let mut out = String::from("rank,frame,magnitude\n");
    for (rank, peak) in report.top.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            rank + 1,
            peak.frame,
            fmt_f64(peak.magnitude)
        );
    }
    io_at(path, std::fs::write(path, out))
}

pub fn write_residual_curve(path: &Path, curve: &ResidualCurve) -> Result<()> {
    let mut out = String::from("d,residual,scaled_residual\n");
    for (i, (&r, &s)) in curve.residuals.iter().zip(curve.scaled.iter()).enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, fmt_f64(r), fmt_f64(s));
    }
    io_at(path, std::fs::write(path, out))
}

pub fn write_point_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut out = String::new();
    let coords: Vec<String> = (1..=cloud.dim()).map(|k| format!("x{k}")).collect();
    let _ = writeln!(out, "{},label", coords.join(","));
    for i in 0..cloud.len() {
        let vals: Vec<String> = cloud.point(i).iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(out, "{},{}", vals.join(","), cloud.label(i).as_str());
    }
    io_at(path, std::fs::write(path, out))
}

/// The fixed-order structured-text transition report: `alpha`,
/// `suppression_window`, `truncated`, then the `top` and `selected` arrays.
pub fn report_document(report: &TransitionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alpha: {}", report.alpha);
    let _ = writeln!(out, "suppression_window: {}", report.suppression_window);
    let _ = writeln!(out, "truncated: {}", report.truncated);
    let _ = writeln!(out, "top:");
    for peak in &report.top {
        let _ = writeln!(
            out,
            "  frame={} magnitude={}",
            peak.frame,
            fmt_f64(peak.magnitude)
        );
    }
    let _ = writeln!(out, "selected:");
    for peak in &report.selected {
        let _ = writeln!(
            out,
            "  frame={} magnitude={}",
            peak.frame,
            fmt_f64(peak.magnitude)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptd_core::vicsek::{simulate, SwarmConfig};

    #[test]
    fn trajectory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let mut cfg = SwarmConfig::default();
        cfg.steps = 5;
        cfg.schedule = vec![ptd_core::vicsek::NoiseBand {
            start: 1,
            end: 5,
            sigma: 0.3,
        }];
        let traj = simulate(&cfg).unwrap();
        write_trajectory(&path, &traj).unwrap();
        let back = read_trajectory(&path, cfg.box_side).unwrap();
        assert_eq!(traj.particles, back.particles);
        assert_eq!(traj.states.len(), back.states.len());
        for (a, b) in traj.states.iter().zip(back.states.iter()) {
            assert_eq!(a.positions, b.positions);
            assert_eq!(a.headings, b.headings);
        }
    }

    #[test]
    fn trajectory_rejects_mangled_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        std::fs::write(&path, "n,i,x,y,theta\n1,2,0.0,0.0,0.0\n").unwrap();
        assert!(read_trajectory(&path, 5.0).is_err());
    }
}
