//! Discrete energy balance under time-step refinement.
//!
//! Runs the shipped driven scenario at dt in {1e-3, 5e-4, 2.5e-4} and prints
//! the worst per-step balance residual
//!   (E_after - E_before)/dt - (1/n) sum_k (f_dot_k w_dot_k + g_k)
//! for each dt. First-order splitting means the residual halves with dt.
//!
//! Run with: cargo run --example energy_balance

use beamsim::integrator::run;

fn main() -> beamsim::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.toml");
    let base = beamsim::load_config(&path)?;

    println!("dt,max_abs_energy_residual");
    let mut worst = Vec::new();
    for dt in [1e-3, 5e-4, 2.5e-4] {
        let mut raw = base.raw.clone();
        raw.time.dt = dt;
        let cfg = raw.validate()?;
        let traj = run(&cfg)?;
        let r = traj
            .reports
            .iter()
            .fold(0.0f64, |a, r| a.max(r.energy_residual.abs()));
        println!("{dt},{r:e}");
        worst.push(r);
    }
    for pair in worst.windows(2) {
        let ratio = pair[0] / pair[1];
        println!("# halving ratio {ratio:.3}");
        assert!((1.6..=2.4).contains(&ratio), "ratio {ratio} outside [1.6, 2.4]");
    }
    Ok(())
}
