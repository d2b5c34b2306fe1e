//! Time integration: one semi-implicit operator-split step of the full
//! coupled system, the run loop with wall-time snapshots, and the closed-form
//! temperature floor.

use crate::beam::{
    assemble_moment_system, assemble_stiffness, assemble_velocity_system, boundary_eps_rhs,
    convolution_d, second_difference, source_g, spd_solve_dense, velocity_solve, Tridiagonal,
};
use crate::config::ValidatedConfig;
use crate::diagnostics::{entropy_production, total_energy};
use crate::error::{Error, Result};
use crate::phase::{chi_update, m_update};
use crate::prandtl::{fatigue_kernel, pi_dissipation_rate, pi_value, DensityModel};
use crate::state::{BeamState, ModelContext};

/// Per-step diagnostics aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// End-of-step time.
    pub t: f64,
    pub dt: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `(E_after - E_before)/dt - (1/n) sum (f_dot_k w_dot_k + g_k)`.
    pub energy_residual: f64,
    pub entropy_production: f64,
    pub min_theta: f64,
    /// Closed-form comparison floor `p(t)` at the end-of-step time.
    pub floor_value: f64,
    /// Largest box-constraint or dissipation-bound defect observed (0 when
    /// every exact invariant holds).
    pub max_constraint_violation: f64,
    /// Largest curvature rate `|delta eps| / dt` over all nodes.
    pub max_eps_rate: f64,
}

/// Closed-form comparison solution bounding the temperature from below:
/// `p(t) = mu theta_* e^{-mu t} / (delta theta_* (1 - e^{-mu t}) + mu)` with
/// `delta = 1/4` and `mu = a (1 + M/2)`.
pub fn temperature_floor(t: f64, theta_star: f64, a: f64, density: &DensityModel) -> f64 {
    debug_assert!(t >= 0.0 && theta_star > 0.0 && a > 0.0);
    let delta = 0.25;
    let mu = a * (1.0 + 0.5 * density.m_cap());
    let e = (-mu * t).exp();
    mu * theta_star * e / (delta * theta_star * (1.0 - e) + mu)
}

/// Advance the state by one step of size `dt`.
///
/// The eight stages run in a fixed order: (1) the velocity and curvature
/// rates already stored in the state (solved at the end of the previous
/// step); (2) displacement update with the curvature recomputed exactly from
/// it, and the boundary curvature by an explicit step of its relaxation ODE;
/// (3) hysteresis-memory advance and nodal dissipation; (4) phase update;
/// (5) dissipation convolution and fatigue update; (6) fatigue kernel;
/// (7) backward-Euler temperature solve with explicit sources; (8) update of
/// the moment primitive with end-of-step fields, implicit in the viscous
/// coupling, then the velocity solve at the new time so the returned state
/// is self-consistent.
///
/// The input state is untouched; on any failure the caller keeps it (exact
/// rollback).
pub fn step(state: &BeamState, ctx: &ModelContext, dt: f64) -> Result<(BeamState, StepReport)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidStep { dt });
    }
    let n = ctx.grid.n;
    let p = &ctx.params;
    let yg = &ctx.yield_grid;
    let density = &ctx.density;
    let t0 = state.t;
    let t1 = t0 + dt;
    let fail = |reason: String| Error::StepFailure { t: t0, reason };

    let energy_before = total_energy(state, ctx)?;
    let m_before = state.m_values();

    // Stage 2: displacement and curvature.
    let mut w_new = state.w.clone();
    for k in 1..n {
        w_new[k] += dt * state.w_dot[k];
    }
    let mut eps_new = vec![0.0; n + 1];
    for k in 1..n {
        eps_new[k] = second_difference(&w_new, k, n)?;
    }
    for &k in &[0, n] {
        let p_k = pi_value(&state.pi[k], m_before[k], yg, density)?;
        eps_new[k] =
            state.eps[k] + dt * boundary_eps_rhs(state.eps[k], p_k, state.theta[k], p);
    }

    // Stage 3: hysteresis memories and nodal dissipation rates.
    let mut d_eps = vec![0.0; n + 1];
    let mut pi_new = Vec::with_capacity(n + 1);
    for k in 0..=n {
        d_eps[k] = eps_new[k] - state.eps[k];
        pi_new.push(state.pi[k].advance(d_eps[k])?);
    }
    let mut violation: f64 = 0.0;
    let mut d_rate = Vec::with_capacity(n - 1);
    for k in 1..n {
        let d = pi_dissipation_rate(&state.pi[k], &pi_new[k], m_before[k], yg, density, dt)?;
        violation = violation.max(-d).max(d * dt - d_eps[k].abs() * yg.m_tilde);
        d_rate.push(d);
    }

    // Stage 4: phase fraction, beginning-of-step temperature.
    let mut chi_new = Vec::with_capacity(n - 1);
    let mut chi_dot = vec![0.0; n + 1];
    for k in 1..n {
        let (s, cd) = chi_update(&state.chi_stops[k - 1], state.theta[k], p, dt)?;
        chi_new.push(s);
        chi_dot[k] = cd;
    }
    chi_dot[0] = chi_dot[1];
    chi_dot[n] = chi_dot[n - 1];

    // Stage 5: convolved dissipation and fatigue update.
    let mean_abs_rate: f64 =
        d_eps[1..n].iter().map(|d| d.abs()).sum::<f64>() / (n as f64 * dt);
    let d_conv_bound = ctx.kernel.bound * yg.m_tilde * mean_abs_rate;
    let mut m_new = Vec::with_capacity(n + 1);
    let mut m_dot = vec![0.0; n + 1];
    for k in 0..=n {
        let d_conv = convolution_d(&d_rate, &ctx.kernel.offsets, &ctx.grid, k)?;
        violation = violation.max(d_conv - d_conv_bound - 1e-9 * d_conv_bound.max(1.0));
        let (s, md) = m_update(&state.m_stops[k], chi_dot[k], d_conv, dt, &ctx.fatigue)?;
        m_new.push(s);
        m_dot[k] = md;
    }

    // Stage 6: fatigue kernel (end-of-step memory, beginning-of-step m).
    let mut kernel_k = Vec::with_capacity(n - 1);
    for k in 1..n {
        kernel_k.push(fatigue_kernel(&pi_new[k], m_before[k], yg, density)?);
    }

    // Stage 7: backward-Euler temperature with reflected Neumann ghosts,
    // solved in increment form (c I + dt kappa A) delta = dt (kappa D^2 theta
    // + sources) so an equilibrium state reproduces itself exactly: a zero
    // right-hand side yields a zero increment with no rounding residue.
    let lam = dt * p.conductivity * (n * n) as f64;
    let c = p.heat_capacity;
    let mut diag = vec![c + 2.0 * lam; n - 1];
    diag[0] = c + lam;
    diag[n - 2] = c + lam;
    let system = Tridiagonal {
        lower: vec![-lam; n.saturating_sub(2)],
        diag,
        upper: vec![-lam; n.saturating_sub(2)],
    };
    let mut rhs = Vec::with_capacity(n - 1);
    for k in 1..n {
        let th = state.theta[k];
        let g_k = source_g(|theta, x, t| ctx.g.eval(x, t, theta), th, k, n, t0)?;
        let ed = state.eps_dot[k];
        // difference-of-differences keeps the Laplacian exactly zero on a
        // uniform temperature (the ghosts are stored copies)
        let lap = (state.theta[k + 1] - th) - (th - state.theta[k - 1]);
        rhs.push(
            lam * lap
                + dt * (m_dot[k] * kernel_k[k - 1]
                    + d_rate[k - 1]
                    + p.viscosity * ed * ed
                    - p.thermal_bending * th * ed
                    - p.latent_heat * chi_dot[k]
                    + g_k),
        );
    }
    let delta = system.solve(&rhs)?;
    let mut theta_new = vec![0.0; n + 1];
    for k in 1..n {
        let th = state.theta[k] + delta[k - 1];
        if !th.is_finite() {
            return Err(fail(format!("non-finite temperature at node {k}")));
        }
        if th <= 0.0 {
            return Err(Error::PositivityFailure { node: k, value: th, t: t1 });
        }
        theta_new[k] = th;
    }
    theta_new[0] = theta_new[1];
    theta_new[n] = theta_new[n - 1];

    // Stage 8: moment-primitive update with end-of-step fields, then the
    // velocity solve at the new time. The viscous term uses the end-of-step
    // curvature rate, which itself depends on the new moment through the
    // velocity system; eliminating that dependence gives the small linear
    // system (rho I + alpha S + dt nu S^2) u = (rho I + alpha S) X
    // - dt nu S f, with X the moment updated by all non-viscous terms.
    // Treating the viscous rate explicitly instead is unstable once dt
    // exceeds roughly alpha / (2 nu n^2).
    let m_values_new: Vec<f64> = m_new.iter().map(|s| s.z).collect();
    let mut p_new = Vec::with_capacity(n + 1);
    for k in 0..=n {
        p_new.push(pi_value(&pi_new[k], m_values_new[k], yg, density)?);
    }
    let mut max_eps_rate: f64 = 0.0;
    for k in 0..=n {
        max_eps_rate = max_eps_rate.max(d_eps[k].abs() / dt);
    }
    let f_row = ctx.f_row(t1)?;
    let x_vec: Vec<f64> = (1..n)
        .map(|k| {
            state.u[k]
                + dt * (p.hardening * eps_new[k] + p_new[k]
                    - p.thermal_bending * (theta_new[k] - p.melting_temp))
        })
        .collect();
    let mass = assemble_velocity_system(p, &ctx.grid);
    let stiff = assemble_stiffness(&ctx.grid);
    let mut rhs_u = mass.multiply(&x_vec);
    let stiff_f = stiff.multiply(&f_row);
    for i in 0..n - 1 {
        rhs_u[i] -= dt * p.viscosity * stiff_f[i];
    }
    let moment_system = assemble_moment_system(p, &ctx.grid, dt * p.viscosity);
    let interior_u = spd_solve_dense(&moment_system, &rhs_u)?;
    let mut u_new = state.u.clone();
    u_new[1..n].copy_from_slice(&interior_u);
    let (w_dot_new, mut eps_dot_new) = velocity_solve(&u_new, p, &ctx.grid, &f_row)?;
    for &k in &[0, n] {
        eps_dot_new[k] = boundary_eps_rhs(eps_new[k], p_new[k], theta_new[k], p);
    }

    let new_state = BeamState {
        t: t1,
        u: u_new,
        w: w_new,
        w_dot: w_dot_new,
        eps: eps_new,
        eps_dot: eps_dot_new,
        theta: theta_new,
        chi_stops: chi_new,
        m_stops: m_new,
        pi: pi_new,
    };
    new_state
        .check_finite()
        .map_err(|e| fail(format!("rolled back: {e}")))?;
    violation = violation.max(new_state.constraint_violation());

    let energy_after = total_energy(&new_state, ctx)?;
    let power = source_power(state, ctx, dt)?;
    let energy_residual = (energy_after - energy_before) / dt - power;
    let entropy = entropy_production(state, &new_state, ctx, dt)?;

    let report = StepReport {
        t: t1,
        dt,
        energy_before,
        energy_after,
        energy_residual,
        entropy_production: entropy,
        min_theta: new_state.min_theta(),
        floor_value: temperature_floor(t1, p.theta_floor, ctx.fatigue.a, density),
        max_constraint_violation: violation,
        max_eps_rate,
    };
    Ok((new_state, report))
}

/// External power `(1/n) sum_k (f_dot_k w_dot_k + g_k)` at the beginning of
/// the step; the load rate uses centered differences of the cell averages
/// (one-sided at t = 0), the heat source exactly the values the step used.
fn source_power(state: &BeamState, ctx: &ModelContext, dt: f64) -> Result<f64> {
    let n = ctx.grid.n;
    let t0 = state.t;
    let f_plus = ctx.f_row(t0 + dt)?;
    let (f_minus, span) = if t0 >= dt {
        (ctx.f_row(t0 - dt)?, 2.0 * dt)
    } else {
        (ctx.f_row(t0)?, dt)
    };
    let mut acc = 0.0;
    for k in 1..n {
        let f_dot = (f_plus[k - 1] - f_minus[k - 1]) / span;
        let g_k = source_g(
            |theta, x, t| ctx.g.eval(x, t, theta),
            state.theta[k],
            k,
            n,
            t0,
        )?;
        acc += f_dot * state.w_dot[k] + g_k;
    }
    Ok(acc / n as f64)
}

/// One run: snapshots plus per-step reports.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub reports: Vec<StepReport>,
    pub snapshots: Vec<BeamState>,
    pub snapshot_times: Vec<f64>,
}

/// Integrate the configured scenario to its horizon, taking snapshots at
/// fixed wall times `0, cadence, 2*cadence, ...` so runs at different
/// resolutions stay comparable. Aborts on the first failed step.
pub fn run(config: &ValidatedConfig) -> Result<Trajectory> {
    let ctx = ModelContext::build(config)?;
    run_with_context(config, &ctx)
}

pub fn run_with_context(config: &ValidatedConfig, ctx: &ModelContext) -> Result<Trajectory> {
    let dt = config.raw.time.dt;
    let horizon = config.raw.time.horizon;
    let cadence = config.raw.time.snapshot_interval;
    let steps = (horizon / dt).round() as usize;

    let mut state = BeamState::initial(config, ctx)?;
    let mut traj = Trajectory {
        reports: Vec::with_capacity(steps),
        snapshots: vec![state.clone()],
        snapshot_times: vec![0.0],
    };
    let mut snap_index: usize = 1;
    for i in 0..steps {
        let (new_state, report) = step(&state, ctx, dt)?;
        state = new_state;
        // exact-multiple time to keep snapshot stamps resolution-independent
        state.t = (i + 1) as f64 * dt;
        traj.reports.push(report);
        loop {
            let next_snap = snap_index as f64 * cadence;
            if state.t + 0.5 * dt < next_snap || next_snap > horizon + 0.5 * dt {
                break;
            }
            traj.snapshots.push(state.clone());
            traj.snapshot_times.push(next_snap);
            snap_index += 1;
        }
    }
    Ok(traj)
}
