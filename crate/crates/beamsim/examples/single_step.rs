//! One fully hand-checkable integration step on the smallest grid (n = 2,
//! a single interior node) under a unit load, with every derived quantity
//! printed next to its pencil-and-paper value.
//!
//! With all constants 1 and f = 1 the initial velocity solves
//! (rho + 2 alpha n^2) w_dot = f, i.e. 9 w_dot = 1, so w_dot_1 = 1/9 and
//! eps_dot_1 = -2 n^2 w_dot_1 = -8/9. After one step of dt = 0.1 the
//! displacement is w_1 = dt/9 and the curvature eps_1 = -0.8/9.
//!
//! Run with: cargo run --example single_step

use beamsim::config::SimulationConfig;
use beamsim::integrator::step;
use beamsim::state::{BeamState, ModelContext};

fn main() -> beamsim::Result<()> {
    let toml = r#"
        [grid]
        n = 2
        [time]
        dt = 0.1
        horizon = 0.1
        snapshot_interval = 0.1
        [physics]
        hardening = 1.0
        viscosity = 1.0
        thermal_bending = 1.0
        melting_temp = 1.0
        mass_density = 1.0
        rotary_inertia = 1.0
        heat_capacity = 1.0
        conductivity = 1.0
        latent_heat = 1.0
        phase_relaxation = 1.0
        theta_floor = 1.0
        [hysteresis]
        density = "exponential"
        yield_count = 64
        tail_tol = 1e-8
        [fatigue]
        a = 1.0
        b = 0.5
        [kernel]
        amplitude = 1.0
        halfwidth = 0.25
        [forcing]
        f = "1"
        g = "0"
        [initial]
        theta = "1"
        chi = "0"
        [output]
        directory = "out/single_step"
        [parallel]
        threads = 1
    "#;
    let cfg = SimulationConfig::from_str(toml)?.validate()?;
    let ctx = ModelContext::build(&cfg)?;
    let s0 = BeamState::initial(&cfg, &ctx)?;

    println!("quantity,computed,expected");
    println!("w_dot_1(0),{},{}", s0.w_dot[1], 1.0 / 9.0);
    println!("eps_dot_1(0),{},{}", s0.eps_dot[1], -8.0 / 9.0);
    assert!((s0.w_dot[1] - 1.0 / 9.0).abs() < 1e-15);
    assert!((s0.eps_dot[1] + 8.0 / 9.0).abs() < 1e-13);

    let (s1, report) = step(&s0, &ctx, 0.1)?;
    println!("w_1(dt),{},{}", s1.w[1], 0.1 / 9.0);
    println!("eps_1(dt),{},{}", s1.eps[1], -0.8 / 9.0);
    assert!((s1.w[1] - 0.1 / 9.0).abs() < 1e-15);
    assert!((s1.eps[1] + 0.8 / 9.0).abs() < 1e-13);

    println!("# theta_1 moved to {} (O(dt) from viscous heating)", s1.theta[1]);
    println!("# energy residual {:e}", report.energy_residual);
    println!("# constraint violation {:e}", report.max_constraint_violation);
    assert!(report.max_constraint_violation <= 0.0);
    assert_eq!(s1.eps_consistency_defect()?, 0.0);
    Ok(())
}
