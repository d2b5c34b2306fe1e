//! Run artifacts: per-step diagnostics CSV, per-field snapshot matrices,
//! a JSON run summary with a config echo, and optional dependency-free SVG
//! line plots. All text output uses '.' decimals and LF line endings, and is
//! byte-identical across replays of the same configuration.

use crate::config::SimulationConfig;
use crate::error::Result;
use crate::integrator::{StepReport, Trajectory};
use crate::state::BeamState;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Exportable nodal fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    U,
    W,
    WDot,
    Eps,
    Theta,
    Chi,
    M,
}

impl FieldKind {
    pub const ALL: [FieldKind; 7] = [
        FieldKind::U,
        FieldKind::W,
        FieldKind::WDot,
        FieldKind::Eps,
        FieldKind::Theta,
        FieldKind::Chi,
        FieldKind::M,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::U => "u",
            FieldKind::W => "w",
            FieldKind::WDot => "w_dot",
            FieldKind::Eps => "eps",
            FieldKind::Theta => "theta",
            FieldKind::Chi => "chi",
            FieldKind::M => "m",
        }
    }

    pub fn extract(&self, state: &BeamState) -> Vec<f64> {
        match self {
            FieldKind::U => state.u.clone(),
            FieldKind::W => state.w.clone(),
            FieldKind::WDot => state.w_dot.clone(),
            FieldKind::Eps => state.eps.clone(),
            FieldKind::Theta => state.theta.clone(),
            FieldKind::Chi => state.chi_values(),
            FieldKind::M => state.m_values(),
        }
    }
}

/// Snapshot matrix of one field: one row per sample time.
pub fn field_matrix(traj: &Trajectory, field: FieldKind) -> Vec<Vec<f64>> {
    traj.snapshots.iter().map(|s| field.extract(s)).collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Per-step diagnostics CSV. A zero-step run yields the header only.
pub fn diagnostics_csv(reports: &[StepReport]) -> String {
    let mut out =
        String::from("t,energy,energy_residual,entropy_production,min_theta,floor,max_eps_rate\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.t,
            r.energy_after,
            r.energy_residual,
            r.entropy_production,
            r.min_theta,
            r.floor_value,
            r.max_eps_rate
        );
    }
    out
}

/// Field snapshot CSV: header `t,node_0,...,node_n`, one row per sample time.
pub fn field_csv(times: &[f64], rows: &[Vec<f64>]) -> String {
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out = String::from("t");
    for k in 0..width {
        let _ = write!(out, ",node_{k}");
    }
    out.push('\n');
    for (t, row) in times.iter().zip(rows) {
        let _ = write!(out, "{t}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// JSON run summary: config echo plus scalar acceptance metrics.
pub fn summary_json(config: &SimulationConfig, traj: &Trajectory) -> String {
    let worst_residual = traj
        .reports
        .iter()
        .fold(0.0f64, |a, r| a.max(r.energy_residual.abs()));
    let min_entropy = traj
        .reports
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.entropy_production));
    let min_theta = traj.reports.iter().fold(f64::INFINITY, |a, r| a.min(r.min_theta));
    let min_floor_margin = traj
        .reports
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.min_theta - r.floor_value));
    let worst_violation = traj
        .reports
        .iter()
        .fold(0.0f64, |a, r| a.max(r.max_constraint_violation));
    let summary = serde_json::json!({
        "config": config,
        "steps": traj.reports.len(),
        "final_time": traj.snapshot_times.last().copied().unwrap_or(0.0),
        "energy_initial": traj.reports.first().map(|r| r.energy_before),
        "energy_final": traj.reports.last().map(|r| r.energy_after),
        "max_abs_energy_residual": finite_or_null(worst_residual),
        "min_entropy_production": finite_or_null(min_entropy),
        "min_theta": finite_or_null(min_theta),
        "min_floor_margin": finite_or_null(min_floor_margin),
        "max_constraint_violation": finite_or_null(worst_violation),
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    text
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Fixed-size SVG line plot of one series; pure path elements, no external
/// resources.
pub fn svg_line_plot(title: &str, series: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if series.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
        y0 -= 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut path = String::new();
    for (i, &(x, y)) in series.iter().enumerate() {
        let _ = write!(path, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, sx(x), sy(y));
    }
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" ",
            "font-size=\"14\">{title}</text>\n",
            "<path d=\"M{px0} {py0} L{px0} {py1} L{px1} {py1}\" fill=\"none\" ",
            "stroke=\"black\" stroke-width=\"1\"/>\n",
            "<text x=\"{px0}\" y=\"{ly}\" font-family=\"monospace\" font-size=\"10\">",
            "[{x0:.4}, {x1:.4}] x [{y0:.4}, {y1:.4}]</text>\n",
            "<path d=\"{path}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        tx = W / 2.0,
        title = xml_escape(title),
        px0 = PAD,
        py0 = PAD,
        py1 = H - PAD,
        px1 = W - PAD,
        ly = H - PAD / 2.0,
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        path = path,
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write every artifact of one run into `dir`; returns the created paths.
pub fn export_series(
    traj: &Trajectory,
    config: &SimulationConfig,
    dir: &Path,
    svg_plots: bool,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let emit = |name: &str, text: String, written: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
        Ok(())
    };
    emit("diagnostics.csv", diagnostics_csv(&traj.reports), &mut written)?;
    for field in FieldKind::ALL {
        let rows = field_matrix(traj, field);
        emit(
            &format!("field_{}.csv", field.name()),
            field_csv(&traj.snapshot_times, &rows),
            &mut written,
        )?;
    }
    emit("summary.json", summary_json(config, traj), &mut written)?;
    if svg_plots {
        let series = |f: fn(&StepReport) -> f64| -> Vec<(f64, f64)> {
            traj.reports.iter().map(|r| (r.t, f(r))).collect()
        };
        let plots: [(&str, Vec<(f64, f64)>); 4] = [
            ("energy", series(|r| r.energy_after)),
            ("energy_residual", series(|r| r.energy_residual)),
            ("entropy_production", series(|r| r.entropy_production)),
            ("min_theta", series(|r| r.min_theta)),
        ];
        for (name, data) in plots {
            emit(&format!("plot_{name}.svg"), svg_line_plot(name, &data), &mut written)?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests_support::base_config;
    use crate::integrator::run;

    #[test]
    fn header_only_for_empty_run() {
        let csv = diagnostics_csv(&[]);
        assert_eq!(
            csv,
            "t,energy,energy_residual,entropy_production,min_theta,floor,max_eps_rate\n"
        );
    }

    #[test]
    fn field_csv_shape() {
        let csv = field_csv(&[0.0, 0.5], &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,node_0,node_1,node_2");
        assert_eq!(lines[1], "0,1,2,3");
        assert_eq!(lines[2], "0.5,4,5,6");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn identical_runs_give_identical_bytes() {
        let mut raw = base_config();
        raw.forcing.f = "sin(3.14159*x)*sin(6.28318*t)".into();
        raw.time.horizon = 0.02;
        let cfg = raw.validate().unwrap();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(diagnostics_csv(&a.reports), diagnostics_csv(&b.reports));
        assert_eq!(summary_json(&raw, &a), summary_json(&raw, &b));
        for field in FieldKind::ALL {
            assert_eq!(
                field_csv(&a.snapshot_times, &field_matrix(&a, field)),
                field_csv(&b.snapshot_times, &field_matrix(&b, field))
            );
        }
    }

    #[test]
    fn summary_contains_config_echo_and_metrics() {
        let raw = base_config();
        let cfg = raw.validate().unwrap();
        let traj = run(&cfg).unwrap();
        let text = summary_json(&raw, &traj);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["config"]["grid"]["n"], 8);
        assert!(parsed["max_abs_energy_residual"].is_number());
        assert_eq!(parsed["steps"], 100);
    }

    #[test]
    fn svg_is_valid_xml_shaped() {
        let svg = svg_line_plot("energy", &[(0.0, 1.0), (0.5, 1.2), (1.0, 0.9)]);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
        // rudimentary balance check: every opened tag closes
        assert_eq!(svg.matches("<path").count(), 2);
        let empty = svg_line_plot("a<b", &[]);
        assert!(empty.contains("a&lt;b"));
    }

    #[test]
    fn export_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut raw = base_config();
        raw.time.horizon = 0.01;
        let cfg = raw.validate().unwrap();
        let traj = run(&cfg).unwrap();
        let files = export_series(&traj, &raw, dir.path(), true).unwrap();
        assert!(files.iter().any(|p| p.ends_with("diagnostics.csv")));
        assert!(files.iter().any(|p| p.ends_with("field_theta.csv")));
        assert!(files.iter().any(|p| p.ends_with("summary.json")));
        assert!(files.iter().any(|p| p.ends_with("plot_energy.svg")));
        for f in &files {
            assert!(f.exists());
        }
    }
}
