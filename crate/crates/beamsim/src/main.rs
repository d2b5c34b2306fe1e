//! Thin command-line front end over the library: `simulate`, `verify`,
//! `converge` and `floor`. Everything substantive lives in the library; this
//! file only parses arguments, orchestrates runs and prints reports.

use beamsim::config::{load_config, ValidatedConfig};
use beamsim::diagnostics::{convergence_metric, neumann_boundary_defect, InterpolantKind};
use beamsim::integrator::{run, temperature_floor};
use beamsim::output::{diagnostics_csv, export_series, field_matrix, FieldKind};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "beamsim", version, about = "Thermo-visco-elasto-plastic beam simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a scenario and write snapshots, diagnostics and a summary.
    Simulate {
        config: PathBuf,
        /// Override the output directory from the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full runtime-invariant suite on a scenario; exit 0 iff all pass.
    Verify { config: PathBuf },
    /// Run the scenario at several grid resolutions and report convergence.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        grids: Vec<usize>,
    },
    /// Emit the closed-form temperature floor p(t) against min_k theta_k.
    Floor { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Simulate { config, out } => simulate(&config, out.as_deref()),
        Cmd::Verify { config } => verify(&config),
        Cmd::Converge { config, grids } => converge(&config, &grids),
        Cmd::Floor { config } => floor(&config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let report = serde_json::json!({ "status": "error", "error": e.to_string() });
            eprintln!("{report}");
            ExitCode::from(2)
        }
    }
}

fn simulate(path: &std::path::Path, out: Option<&std::path::Path>) -> beamsim::Result<ExitCode> {
    let cfg = load_config(path)?;
    let traj = run(&cfg)?;
    let dir = out
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(&cfg.raw.output.directory));
    let files = export_series(&traj, &cfg.raw, &dir, cfg.raw.output.svg_plots)?;
    for f in &files {
        println!("{}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn verify(path: &std::path::Path) -> beamsim::Result<ExitCode> {
    let cfg = load_config(path)?;
    let dt = cfg.raw.time.dt;
    let mut checks: Vec<Check> = Vec::new();
    let push = |checks: &mut Vec<Check>, name, passed, detail: String| {
        checks.push(Check { name, passed, detail });
    };

    let traj = run(&cfg)?;
    push(&mut checks, "run_completes", true, format!("{} steps", traj.reports.len()));

    let worst_violation = traj
        .reports
        .iter()
        .fold(0.0f64, |a, r| a.max(r.max_constraint_violation));
    push(
        &mut checks,
        "exact_constraints",
        worst_violation <= 0.0,
        format!("max violation {worst_violation:e}"),
    );

    let min_theta = traj.reports.iter().fold(f64::INFINITY, |a, r| a.min(r.min_theta));
    push(&mut checks, "temperature_positive", !(min_theta <= 0.0), format!("min {min_theta}"));

    let floor_margin = traj
        .reports
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.min_theta - r.floor_value));
    push(
        &mut checks,
        "temperature_floor",
        floor_margin >= -5.0 * dt,
        format!("min margin {floor_margin:e} vs tolerance {:e}", 5.0 * dt),
    );

    let min_entropy = traj
        .reports
        .iter()
        .fold(f64::INFINITY, |a, r| a.min(r.entropy_production));
    push(
        &mut checks,
        "entropy_production",
        min_entropy >= -5.0 * dt,
        format!("min {min_entropy:e} vs tolerance {:e}", -5.0 * dt),
    );

    let worst_residual = traj
        .reports
        .iter()
        .fold(0.0f64, |a, r| a.max(r.energy_residual.abs()));
    push(
        &mut checks,
        "energy_residual",
        worst_residual.is_finite() && worst_residual <= 100.0 * dt.max(1e-6),
        format!("max |residual| {worst_residual:e}"),
    );

    let defect = traj
        .snapshots
        .last()
        .map(|s| s.eps_consistency_defect())
        .transpose()?
        .unwrap_or(0.0);
    push(
        &mut checks,
        "curvature_consistency",
        defect <= 1e-9,
        format!("final defect {defect:e}"),
    );

    let replay = run(&cfg)?;
    let identical = diagnostics_csv(&traj.reports) == diagnostics_csv(&replay.reports);
    push(&mut checks, "deterministic_replay", identical, "byte comparison".into());

    let mut all = true;
    for c in &checks {
        all &= c.passed;
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let report = serde_json::json!({
        "status": if all { "pass" } else { "fail" },
        "checks": checks
            .iter()
            .map(|c| serde_json::json!({
                "name": c.name, "passed": c.passed, "detail": c.detail
            }))
            .collect::<Vec<_>>(),
    });
    println!("{report}");
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn thread_budget(cfg: &ValidatedConfig) -> usize {
    std::env::var("SIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(cfg.raw.parallel.threads)
        .max(1)
}

fn converge(path: &std::path::Path, grids: &[usize]) -> beamsim::Result<ExitCode> {
    let base = load_config(path)?;
    if grids.len() < 2 {
        return Err(beamsim::Error::Comparison("need at least two grid sizes".into()));
    }
    let configs: Vec<ValidatedConfig> = grids
        .iter()
        .map(|&n| {
            let mut raw = base.raw.clone();
            raw.grid.n = n;
            raw.validate()
        })
        .collect::<beamsim::Result<_>>()?;

    // Independent runs; optionally concurrent, with results stored by index
    // so the report order never depends on scheduling.
    let budget = thread_budget(&base);
    let mut runs: Vec<Option<beamsim::Trajectory>> = (0..configs.len()).map(|_| None).collect();
    for batch in (0..configs.len()).collect::<Vec<_>>().chunks(budget) {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for &i in batch {
                let cfg = &configs[i];
                handles.push((i, scope.spawn(move || run(cfg))));
            }
            for (i, h) in handles {
                runs[i] = Some(h.join().expect("run thread panicked")?);
            }
            Ok::<(), beamsim::Error>(())
        })?;
    }
    let runs: Vec<beamsim::Trajectory> = runs.into_iter().map(|r| r.unwrap()).collect();

    println!("n_coarse,n_fine,w_metric,neumann_defect_coarse");
    let cadence = base.raw.time.snapshot_interval;
    for i in 0..runs.len() - 1 {
        let metric = convergence_metric(
            &field_matrix(&runs[i], FieldKind::W),
            &field_matrix(&runs[i + 1], FieldKind::W),
            InterpolantKind::PiecewiseQuadratic,
        )?;
        let defect = neumann_boundary_defect(&field_matrix(&runs[i], FieldKind::Theta), cadence);
        println!("{},{},{metric},{defect}", grids[i], grids[i + 1]);
    }
    let last = runs.len() - 1;
    let defect_last =
        neumann_boundary_defect(&field_matrix(&runs[last], FieldKind::Theta), cadence);
    println!("# neumann_defect at n = {}: {defect_last}", grids[last]);
    Ok(ExitCode::SUCCESS)
}

fn floor(path: &std::path::Path) -> beamsim::Result<ExitCode> {
    let cfg = load_config(path)?;
    let traj = run(&cfg)?;
    let density = cfg.raw.hysteresis.density;
    println!("t,floor,min_theta");
    println!(
        "0,{},{}",
        temperature_floor(0.0, cfg.raw.physics.theta_floor, cfg.raw.fatigue.a, &density),
        traj.snapshots[0].min_theta()
    );
    for r in &traj.reports {
        println!("{},{},{}", r.t, r.floor_value, r.min_theta);
    }
    Ok(ExitCode::SUCCESS)
}
