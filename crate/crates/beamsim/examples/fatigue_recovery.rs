//! Fatigue accumulation under mechanical cycling, then recovery under
//! clamped heating above the melting temperature.
//!
//! Phase 1 runs the `cycling` scenario: the beam is driven below the melting
//! point, plastic dissipation accumulates and the fatigue field `m` grows
//! monotonically. Phase 2 quenches the mechanical state (instantaneous
//! unload), reheats the beam uniformly above melting and continues under the
//! `recovery` scenario: the melting rate feeds the recovery term `h(chi_dot)`
//! and `m` relaxes monotonically toward zero.
//!
//! Run with: cargo run --example fatigue_recovery

use beamsim::integrator::step;
use beamsim::state::{BeamState, ModelContext};

fn scenario(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn max_m(state: &BeamState) -> f64 {
    state.m_values().iter().fold(0.0f64, |a, &v| a.max(v))
}

fn main() -> beamsim::Result<()> {
    // Phase 1: mechanical cycling below melting.
    let cycling = beamsim::load_config(&scenario("cycling.toml"))?;
    let ctx = ModelContext::build(&cycling)?;
    let dt = cycling.raw.time.dt;
    let steps = (cycling.raw.time.horizon / dt).round() as usize;
    let mut state = BeamState::initial(&cycling, &ctx)?;
    println!("phase,t,max_m,min_m_delta");
    let mut worst_decrease = 0.0f64;
    for i in 0..steps {
        let before = state.m_values();
        state = step(&state, &ctx, dt)?.0;
        let delta_min = state
            .m_values()
            .iter()
            .zip(&before)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        worst_decrease = worst_decrease.min(delta_min);
        if (i + 1) % 50 == 0 {
            println!("cycling,{},{},{delta_min:e}", state.t, max_m(&state));
        }
    }
    let accumulated = max_m(&state);
    assert!(worst_decrease >= 0.0, "m decreased during cycling by {worst_decrease:e}");
    assert!(accumulated > 0.0, "no fatigue accumulated");

    // Transition: instantaneous unload (a legitimate hysteresis input step),
    // mechanical fields to rest, uniform reheat above the melting point.
    let recovery = beamsim::load_config(&scenario("recovery.toml"))?;
    let rctx = ModelContext::build(&recovery)?;
    let n = state.n();
    for k in 0..=n {
        state.pi[k] = state.pi[k].advance(-state.eps[k])?;
    }
    state.t = 0.0;
    state.u = vec![0.0; n + 1];
    state.w = vec![0.0; n + 1];
    state.w_dot = vec![0.0; n + 1];
    state.eps = vec![0.0; n + 1];
    state.eps_dot = vec![0.0; n + 1];
    state.theta = vec![2.0; n + 1];

    // Phase 2: clamped heating, no mechanical load.
    let dt = recovery.raw.time.dt;
    let steps = (recovery.raw.time.horizon / dt).round() as usize;
    let mut worst_increase = 0.0f64;
    for i in 0..steps {
        let before = state.m_values();
        state = step(&state, &rctx, dt)?.0;
        let delta_max = state
            .m_values()
            .iter()
            .zip(&before)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        worst_increase = worst_increase.max(delta_max);
        if (i + 1) % 50 == 0 {
            println!("recovery,{},{},{delta_max:e}", state.t, max_m(&state));
        }
    }
    assert!(worst_increase <= 0.0, "m increased during heating by {worst_increase:e}");
    println!("# fatigue peaked at {accumulated:e}, recovered to {:e}", max_m(&state));
    Ok(())
}
