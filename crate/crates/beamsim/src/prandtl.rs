//! Fatigue-dependent Prandtl-Ishlinskii superposition.
//!
//! A weighted family of stops over a yield-radius grid realizes the operator
//! value `P`, the potential `V`, the dissipation rate `D` and the fatigue
//! kernel `K`. The integral over radii is a composite midpoint rule on
//! `[0, r_max]` with a documented truncation tail bound.

use crate::error::{Error, Result};
use crate::hysteresis::{stop_init, stop_step, ConstraintInterval, StopState};

/// Weight density `phi(m, r)` of the superposition, together with its
/// dominating functions and integral bounds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityModel {
    /// `phi(m, r) = exp(-m) exp(-r)`; softens with fatigue.
    /// Dominating functions `phi_tilde = phi_star = exp(-r)`, so
    /// `M_tilde = 1` and `M = 2`.
    Exponential,
    /// `phi(r) = exp(-r)` independent of `m` (`phi_m = 0`, `M = 0`).
    FatigueIndependent,
    /// Single yield element of unit weight concentrated at one radius.
    Atomic { radius: f64 },
}

impl DensityModel {
    pub fn phi(&self, m: f64, r: f64) -> f64 {
        match self {
            DensityModel::Exponential => (-m - r).exp(),
            DensityModel::FatigueIndependent => (-r).exp(),
            DensityModel::Atomic { .. } => 1.0,
        }
    }

    pub fn phi_m(&self, m: f64, r: f64) -> f64 {
        match self {
            DensityModel::Exponential => -(-m - r).exp(),
            DensityModel::FatigueIndependent | DensityModel::Atomic { .. } => 0.0,
        }
    }

    pub fn phi_tilde(&self, r: f64) -> f64 {
        match self {
            DensityModel::Exponential | DensityModel::FatigueIndependent => (-r).exp(),
            DensityModel::Atomic { .. } => 1.0,
        }
    }

    pub fn phi_star(&self, r: f64) -> f64 {
        match self {
            DensityModel::Exponential => (-r).exp(),
            DensityModel::FatigueIndependent | DensityModel::Atomic { .. } => 0.0,
        }
    }

    /// `M_tilde = int_0^inf r phi_tilde(r) dr`, exact.
    pub fn m_tilde(&self) -> f64 {
        match self {
            DensityModel::Exponential | DensityModel::FatigueIndependent => 1.0,
            DensityModel::Atomic { radius } => *radius,
        }
    }

    /// `M = int_0^inf r^2 phi_star(r) dr`, exact.
    pub fn m_cap(&self) -> f64 {
        match self {
            DensityModel::Exponential => 2.0,
            DensityModel::FatigueIndependent | DensityModel::Atomic { .. } => 0.0,
        }
    }

    /// Truncation tail `int_{r_max}^inf r phi_tilde(r) dr`, exact.
    pub fn tail(&self, r_max: f64) -> f64 {
        match self {
            DensityModel::Exponential | DensityModel::FatigueIndependent => {
                (r_max + 1.0) * (-r_max).exp()
            }
            DensityModel::Atomic { radius } => {
                if r_max >= *radius {
                    0.0
                } else {
                    *radius
                }
            }
        }
    }
}

/// Quadrature grid over yield radii.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldGrid {
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_max: f64,
    /// `sum_j w_j r_j phi_tilde(r_j)`: the grid-level realization of `M_tilde`.
    /// Constraint checks use this value so that the discrete dissipation bound
    /// holds exactly, not merely up to quadrature error.
    pub m_tilde: f64,
    /// `sum_j w_j r_j^2 phi_star(r_j)`: grid-level realization of `M`.
    pub m_cap: f64,
}

impl YieldGrid {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Build a yield grid whose truncation tail is below `tail_tol`.
///
/// `r_max` is found by bisection on the closed-form tail integral and rounded
/// up to the next integer, then split into `count` midpoint cells.
pub fn make_yield_grid(density: &DensityModel, count: usize, tail_tol: f64) -> Result<YieldGrid> {
    if count < 1 {
        return Err(Error::InvalidDensity("yield grid needs count >= 1".into()));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidDensity("tail tolerance must be positive".into()));
    }
    if let DensityModel::Atomic { radius } = density {
        if !(*radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDensity(format!("atomic radius {radius} must be positive")));
        }
        return Ok(YieldGrid {
            radii: vec![*radius],
            weights: vec![1.0],
            r_max: *radius,
            m_tilde: *radius,
            m_cap: 0.0,
        });
    }

    // Bracket the tail root, then bisect.
    let mut hi = 1.0;
    while density.tail(hi) > tail_tol {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidDensity(
                "r * phi_tilde(r) tail does not drop below the tolerance".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if density.tail(mid) > tail_tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_max = hi.ceil().max(1.0);

    let h = r_max / count as f64;
    let radii: Vec<f64> = (0..count).map(|j| (j as f64 + 0.5) * h).collect();
    let weights = vec![h; count];
    let m_tilde = radii.iter().zip(&weights).map(|(&r, &w)| w * r * density.phi_tilde(r)).sum();
    let m_cap = radii.iter().zip(&weights).map(|(&r, &w)| w * r * r * density.phi_star(r)).sum();
    Ok(YieldGrid { radii, weights, r_max, m_tilde, m_cap })
}

/// Per-node hysteresis memory: one stop per yield radius, each on `[-r_j, r_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePiMemory {
    pub stops: Vec<StopState>,
}

impl NodePiMemory {
    /// Virgin memory (all stops at zero).
    pub fn virgin(grid: &YieldGrid) -> Self {
        let stops = grid
            .radii
            .iter()
            .map(|&r| stop_init(0.0, ConstraintInterval::symmetric(r), None).expect("z0 = 0 feasible"))
            .collect();
        Self { stops }
    }

    /// Advance every stop by the strain increment `d_eps`.
    pub fn advance(&self, d_eps: f64) -> Result<Self> {
        let stops = self
            .stops
            .iter()
            .map(|s| stop_step(s, d_eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { stops })
    }
}

fn require_nonnegative_m(m: f64) -> Result<()> {
    if m < 0.0 {
        return Err(Error::ConstraintViolation(format!("fatigue value m = {m} is negative")));
    }
    Ok(())
}

/// Operator value `P[m, eps] = sum_j w_j phi(m, r_j) z_j`.
pub fn pi_value(mem: &NodePiMemory, m: f64, grid: &YieldGrid, density: &DensityModel) -> Result<f64> {
    require_nonnegative_m(m)?;
    let mut acc = 0.0;
    for j in 0..grid.len() {
        acc += grid.weights[j] * density.phi(m, grid.radii[j]) * mem.stops[j].z;
    }
    Ok(acc)
}

/// Potential `V[m, eps] = (1/2) sum_j w_j phi(m, r_j) z_j^2 >= 0`.
pub fn pi_potential(
    mem: &NodePiMemory,
    m: f64,
    grid: &YieldGrid,
    density: &DensityModel,
) -> Result<f64> {
    require_nonnegative_m(m)?;
    let mut acc = 0.0;
    for j in 0..grid.len() {
        let z = mem.stops[j].z;
        acc += grid.weights[j] * density.phi(m, grid.radii[j]) * z * z;
    }
    Ok(0.5 * acc)
}

/// Dissipation rate over one step: `sum_j w_j r_j phi(m, r_j) |dxi_j| / dt`.
///
/// `m` is the beginning-of-step fatigue value; see the step documentation.
pub fn pi_dissipation_rate(
    mem_before: &NodePiMemory,
    mem_after: &NodePiMemory,
    m: f64,
    grid: &YieldGrid,
    density: &DensityModel,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidStep { dt });
    }
    require_nonnegative_m(m)?;
    let mut acc = 0.0;
    for j in 0..grid.len() {
        let dxi = (mem_after.stops[j].xi - mem_before.stops[j].xi).abs();
        acc += grid.weights[j] * grid.radii[j] * density.phi(m, grid.radii[j]) * dxi;
    }
    Ok(acc / dt)
}

/// Fatigue kernel `K = -(1/2) sum_j w_j phi_m(m, r_j) z_j^2`, in `[0, M/2]`.
pub fn fatigue_kernel(
    mem: &NodePiMemory,
    m: f64,
    grid: &YieldGrid,
    density: &DensityModel,
) -> Result<f64> {
    require_nonnegative_m(m)?;
    let mut acc = 0.0;
    for j in 0..grid.len() {
        let z = mem.stops[j].z;
        acc -= grid.weights[j] * density.phi_m(m, grid.radii[j]) * z * z;
    }
    let k = 0.5 * acc;
    if !(k >= 0.0 && k <= 0.5 * grid.m_cap + 1e-12) {
        return Err(Error::InternalInvariant(format!(
            "fatigue kernel K = {k} outside [0, {}]",
            0.5 * grid.m_cap
        )));
    }
    Ok(k)
}

/// Data describing one completed hysteresis step at a single node.
#[derive(Debug, Clone, Copy)]
pub struct PiStep<'a> {
    pub mem_before: &'a NodePiMemory,
    pub mem_after: &'a NodePiMemory,
    pub m_before: f64,
    pub m_after: f64,
    pub d_eps: f64,
    pub dt: f64,
}

/// Residual of the Prandtl-Ishlinskii energy balance over one step:
/// `d_eps * P - [dV + D*dt + dm * K]`. For smooth inputs it is O(dt^2)
/// per step. `P` and `V` use end-of-step memory, `D` and `K` use
/// beginning-of-step `m`.
pub fn pi_energy_residual(step: &PiStep, grid: &YieldGrid, density: &DensityModel) -> Result<f64> {
    let p_after = pi_value(step.mem_after, step.m_after, grid, density)?;
    let v_before = pi_potential(step.mem_before, step.m_before, grid, density)?;
    let v_after = pi_potential(step.mem_after, step.m_after, grid, density)?;
    let d = pi_dissipation_rate(step.mem_before, step.mem_after, step.m_before, grid, density, step.dt)?;
    let k = fatigue_kernel(step.mem_after, step.m_before, grid, density)?;
    Ok(step.d_eps * p_after - ((v_after - v_before) + d * step.dt + (step.m_after - step.m_before) * k))
}
