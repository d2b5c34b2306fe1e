//! Temperature positivity via the closed-form comparison floor
//!   p(t) = mu theta_* e^{-mu t} / (delta theta_* (1 - e^{-mu t}) + mu),
//! delta = 1/4, mu = a (1 + M/2). The minimum nodal temperature of every
//! shipped scenario must stay above p(t) up to an O(dt) margin.
//!
//! Run with: cargo run --example temperature_floor

use beamsim::integrator::{run, temperature_floor};

fn main() -> beamsim::Result<()> {
    // Spot value of the closed form: theta_* = 1, a = 1, M = 2 gives
    // p(1) = 2 e^{-2} / (0.25 (1 - e^{-2}) + 2) ~ 0.12213.
    let d = beamsim::DensityModel::Exponential;
    let p1 = temperature_floor(1.0, 1.0, 1.0, &d);
    println!("# p(1) = {p1} (closed form ~ 0.12213)");
    assert!((p1 - 0.12213).abs() < 1e-4);

    println!("scenario,t,floor,min_theta,margin");
    for name in ["default", "fixed_point", "heating", "cycling", "recovery"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(format!("{name}.toml"));
        let cfg = beamsim::load_config(&path)?;
        let traj = run(&cfg)?;
        let mut worst = f64::INFINITY;
        for (i, r) in traj.reports.iter().enumerate() {
            worst = worst.min(r.min_theta - r.floor_value);
            if (i + 1) % 100 == 0 {
                println!(
                    "{name},{},{},{},{:e}",
                    r.t,
                    r.floor_value,
                    r.min_theta,
                    r.min_theta - r.floor_value
                );
            }
        }
        println!("# {name}: worst margin {worst:e}");
        assert!(worst >= -5.0 * cfg.raw.time.dt, "{name} fell below the floor");
    }
    Ok(())
}
