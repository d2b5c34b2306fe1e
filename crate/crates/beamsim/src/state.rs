//! The complete evolving state of the discrete beam: nodal mechanical
//! fields, temperature with reflected ghost ends, and the hysteresis
//! memories of the Prandtl-Ishlinskii superposition, the phase fraction and
//! the fatigue field.

use crate::beam::{cell_average, second_difference, velocity_solve, Grid, PhysicalParams};
use crate::config::ValidatedConfig;
use crate::error::{Error, Result};
use crate::hysteresis::{stop_init, ConstraintInterval, StopState};
use crate::phase::{FatigueParams, KernelTable};
use crate::prandtl::{make_yield_grid, DensityModel, NodePiMemory, YieldGrid};

/// Immutable model data shared by every step: grid, constants, yield-radius
/// quadrature, convolution kernel table and the parsed forcing expressions.
#[derive(Debug, Clone)]
pub struct ModelContext {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub density: DensityModel,
    pub yield_grid: YieldGrid,
    pub kernel: KernelTable,
    pub fatigue: FatigueParams,
    pub f: crate::expr::ForcingExpression,
    pub g: crate::expr::ForcingExpression,
}

impl ModelContext {
    pub fn build(config: &ValidatedConfig) -> Result<Self> {
        let grid = Grid::new(config.raw.grid.n)?;
        let yield_grid = make_yield_grid(
            &config.raw.hysteresis.density,
            config.raw.hysteresis.yield_count,
            config.raw.hysteresis.tail_tol,
        )?;
        let kernel =
            KernelTable::build(config.raw.kernel.amplitude, config.raw.kernel.halfwidth, grid.n);
        Ok(Self {
            grid,
            params: config.raw.physics,
            density: config.raw.hysteresis.density,
            yield_grid,
            kernel,
            fatigue: config.raw.fatigue,
            f: config.f.clone(),
            g: config.g.clone(),
        })
    }

    /// Cell-averaged transverse load on the interior nodes at time `t`.
    pub fn f_row(&self, t: f64) -> Result<Vec<f64>> {
        let n = self.grid.n;
        (1..n)
            .map(|k| cell_average(|x| self.f.eval(x, t, 0.0), k, n))
            .collect()
    }
}

/// Full nodal state at one instant. All vectors have length `n + 1`; the
/// temperature carries its reflected ghost values at the ends, the phase
/// fraction is stored on interior nodes with copied ends, and the fatigue
/// and hysteresis memories live on every node including the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    pub t: f64,
    /// Moment-like primitive, Dirichlet zero at the ends.
    pub u: Vec<f64>,
    /// Transverse displacement, Dirichlet zero at the ends.
    pub w: Vec<f64>,
    /// Velocity consistent with `t` (solved from `u` and the load at `t`).
    pub w_dot: Vec<f64>,
    /// Curvature: interior exactly the second difference of `w`, ends by the
    /// boundary relaxation ODE.
    pub eps: Vec<f64>,
    /// Curvature rate consistent with `t`.
    pub eps_dot: Vec<f64>,
    /// Temperature with ghost ends `theta[0] = theta[1]`,
    /// `theta[n] = theta[n-1]`.
    pub theta: Vec<f64>,
    /// Phase-fraction stops on `[0, 1]`, interior nodes `1..n-1`.
    pub chi_stops: Vec<StopState>,
    /// Fatigue stops on `[0, inf)`, every node `0..=n`.
    pub m_stops: Vec<StopState>,
    /// Prandtl-Ishlinskii memory, every node `0..=n`.
    pub pi: Vec<NodePiMemory>,
}

impl BeamState {
    /// Build the initial state: beam at rest, temperature sampled at the
    /// nodes, phase fraction cell-averaged, virgin fatigue and hysteresis
    /// memories, and the velocity solved for consistency at `t = 0`.
    pub fn initial(config: &ValidatedConfig, ctx: &ModelContext) -> Result<Self> {
        let n = ctx.grid.n;
        let u = vec![0.0; n + 1];
        let w = vec![0.0; n + 1];
        let eps = vec![0.0; n + 1];

        let mut theta = vec![0.0; n + 1];
        for k in 1..n {
            let v = config.theta0.eval(k as f64 / n as f64, 0.0, 0.0);
            if !v.is_finite() {
                return Err(Error::Evaluation(format!("theta0 at node {k} is not finite")));
            }
            theta[k] = v;
        }
        theta[0] = theta[1];
        theta[n] = theta[n - 1];

        let chi_stops = (1..n)
            .map(|k| {
                let avg = cell_average(|x| config.chi0.eval(x, 0.0, 0.0), k, n)?;
                stop_init(0.0, ConstraintInterval::unit(), Some(avg))
            })
            .collect::<Result<Vec<_>>>()?;

        let m_stops = (0..=n)
            .map(|_| stop_init(0.0, ConstraintInterval::nonnegative(), Some(0.0)))
            .collect::<Result<Vec<_>>>()?;
        let pi = (0..=n).map(|_| NodePiMemory::virgin(&ctx.yield_grid)).collect();

        let f_row = ctx.f_row(0.0)?;
        let (w_dot, eps_dot) = velocity_solve(&u, &ctx.params, &ctx.grid, &f_row)?;

        Ok(Self { t: 0.0, u, w, w_dot, eps, eps_dot, theta, chi_stops, m_stops, pi })
    }

    pub fn n(&self) -> usize {
        self.u.len() - 1
    }

    /// Phase-fraction values on every node, ends copied from their neighbors.
    pub fn chi_values(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n + 1];
        for k in 1..n {
            out[k] = self.chi_stops[k - 1].z;
        }
        out[0] = out[1];
        out[n] = out[n - 1];
        out
    }

    /// Fatigue values on every node.
    pub fn m_values(&self) -> Vec<f64> {
        self.m_stops.iter().map(|s| s.z).collect()
    }

    /// Exact box-constraint audit: returns the largest violation found
    /// (0 when everything is inside its constraint set).
    pub fn constraint_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in &self.chi_stops {
            worst = worst.max(-s.z).max(s.z - 1.0);
        }
        for s in &self.m_stops {
            worst = worst.max(-s.z);
        }
        for mem in &self.pi {
            for s in &mem.stops {
                worst = worst.max(s.z.abs() - s.interval.upper);
            }
        }
        worst
    }

    /// Verify the curvature-displacement consistency `eps_k = D^2 w_k` on
    /// interior nodes; returns the worst absolute defect.
    pub fn eps_consistency_defect(&self) -> Result<f64> {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for k in 1..n {
            worst = worst.max((self.eps[k] - second_difference(&self.w, k, n)?).abs());
        }
        Ok(worst)
    }

    /// Minimum nodal temperature (ghosts included, which copies the
    /// interior extremes anyway).
    pub fn min_theta(&self) -> f64 {
        self.theta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Fail unless every field is finite.
    pub fn check_finite(&self) -> Result<()> {
        let all = self
            .u
            .iter()
            .chain(&self.w)
            .chain(&self.w_dot)
            .chain(&self.eps)
            .chain(&self.eps_dot)
            .chain(&self.theta);
        for v in all {
            if !v.is_finite() {
                return Err(Error::NonFinite { context: format!("state at t = {}", self.t) });
            }
        }
        Ok(())
    }
}
