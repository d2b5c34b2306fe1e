//! Simulation configuration: a sectioned TOML file with forcing terms and
//! initial data given as quoted expressions. Loading validates every clause
//! of the data hypotheses that is checkable up front and reports all
//! violations at once, not just the first.

use crate::beam::PhysicalParams;
use crate::error::{Error, Result};
use crate::expr::ForcingExpression;
use crate::phase::FatigueParams;
use crate::prandtl::DensityModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Snapshots are taken at fixed wall times `0, interval, 2*interval, ...`
    /// so runs at different resolutions stay comparable.
    pub snapshot_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisConfig {
    pub density: DensityModel,
    pub yield_count: usize,
    pub tail_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub amplitude: f64,
    pub halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingConfig {
    /// Transverse load integral f(x, t).
    pub f: String,
    /// Heat source density g(theta, x, t).
    pub g: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConfig {
    /// Initial temperature theta0(x).
    pub theta: String,
    /// Initial phase fraction chi0(x).
    pub chi: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub directory: String,
    #[serde(default)]
    pub svg_plots: bool,
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelConfig {
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub physics: PhysicalParams,
    pub hysteresis: HysteresisConfig,
    pub fatigue: FatigueParams,
    pub kernel: KernelConfig,
    pub forcing: ForcingConfig,
    pub initial: InitialConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub parallel: ParallelConfig,
}

/// Configuration with all expressions parsed and all load-time hypothesis
/// clauses verified.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub raw: SimulationConfig,
    pub f: ForcingExpression,
    pub g: ForcingExpression,
    pub theta0: ForcingExpression,
    pub chi0: ForcingExpression,
}

impl SimulationConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigValidation {
            violations: vec![format!("TOML: {e}")],
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Parse expressions and check every load-time clause; returns either a
    /// validated config or the full list of violations.
    pub fn validate(&self) -> Result<ValidatedConfig> {
        let mut violations = Vec::new();

        if self.grid.n < 2 {
            violations.push(format!("grid: n = {} must be at least 2", self.grid.n));
        }
        if !(self.time.dt > 0.0) {
            violations.push(format!("time: dt = {} must be positive", self.time.dt));
        }
        if self.time.horizon < 0.0 {
            violations.push(format!("time: horizon = {} must be nonnegative", self.time.horizon));
        }
        if !(self.time.snapshot_interval > 0.0) {
            violations.push(format!(
                "time: snapshot_interval = {} must be positive",
                self.time.snapshot_interval
            ));
        }

        // H1(ii): all constants positive.
        let p = &self.physics;
        for (name, v) in [
            ("hardening", p.hardening),
            ("viscosity", p.viscosity),
            ("thermal_bending", p.thermal_bending),
            ("melting_temp", p.melting_temp),
            ("mass_density", p.mass_density),
            ("rotary_inertia", p.rotary_inertia),
            ("heat_capacity", p.heat_capacity),
            ("conductivity", p.conductivity),
            ("latent_heat", p.latent_heat),
            ("phase_relaxation", p.phase_relaxation),
        ] {
            if !(v > 0.0) {
                violations.push(format!("H1(ii): {name} = {v} must be strictly positive"));
            }
        }

        // H1(v): theta_* positive.
        if !(p.theta_floor > 0.0) {
            violations.push(format!(
                "H1(v): theta_floor = {} must be strictly positive",
                p.theta_floor
            ));
        }

        // H1(i): built-in densities carry their own bounds; atomic radius checked.
        if let DensityModel::Atomic { radius } = self.hysteresis.density {
            if !(radius > 0.0) {
                violations.push(format!("H1(i): atomic yield radius {radius} must be positive"));
            }
        }
        if self.hysteresis.yield_count < 1 {
            violations.push("hysteresis: yield_count must be at least 1".into());
        }
        if !(self.hysteresis.tail_tol > 0.0) {
            violations.push(format!(
                "hysteresis: tail_tol = {} must be positive",
                self.hysteresis.tail_tol
            ));
        }

        // H1(vi): a, b positive and b*M <= gamma.
        if !(self.fatigue.a > 0.0) {
            violations.push(format!("H1(vi): a = {} must be positive", self.fatigue.a));
        }
        if !(self.fatigue.b > 0.0) {
            violations.push(format!("H1(vi): b = {} must be positive", self.fatigue.b));
        }
        let m_cap = self.hysteresis.density.m_cap();
        if self.fatigue.b * m_cap > p.phase_relaxation {
            violations.push(format!(
                "H1(vi): b*M = {} exceeds gamma = {}",
                self.fatigue.b * m_cap,
                p.phase_relaxation
            ));
        }

        // H1(iii): kernel nonnegative with compact support.
        if self.kernel.amplitude < 0.0 {
            violations.push(format!(
                "H1(iii): kernel amplitude = {} must be nonnegative",
                self.kernel.amplitude
            ));
        }
        if !(self.kernel.halfwidth > 0.0) {
            violations.push(format!(
                "H1(iii): kernel halfwidth = {} must be positive",
                self.kernel.halfwidth
            ));
        }

        let parse = |label: &str, text: &str, violations: &mut Vec<String>| {
            match ForcingExpression::parse(text) {
                Ok(e) => Some(e),
                Err(err) => {
                    violations.push(format!("{label}: {err}"));
                    None
                }
            }
        };
        let f = parse("forcing.f", &self.forcing.f, &mut violations);
        let g = parse("forcing.g", &self.forcing.g, &mut violations);
        let theta0 = parse("initial.theta", &self.initial.theta, &mut violations);
        let chi0 = parse("initial.chi", &self.initial.chi, &mut violations);

        if let Some(e) = &f {
            if e.uses_theta() {
                violations.push("forcing.f: must not depend on theta".into());
            }
        }
        for (label, e) in [("initial.theta", &theta0), ("initial.chi", &chi0)] {
            if let Some(e) = e {
                if e.uses_theta() {
                    violations.push(format!("{label}: must not depend on theta"));
                }
            }
        }

        // Sampled clauses on a validation lattice.
        let lattice: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        if let Some(theta0) = &theta0 {
            for &x in &lattice {
                let v = theta0.eval(x, 0.0, 0.0);
                if !(v >= p.theta_floor) {
                    violations.push(format!(
                        "H1(v): theta0({x}) = {v} is below theta_floor = {}",
                        p.theta_floor
                    ));
                    break;
                }
            }
        }
        if let Some(chi0) = &chi0 {
            for &x in &lattice {
                let v = chi0.eval(x, 0.0, 0.0);
                if !(0.0..=1.0).contains(&v) {
                    violations.push(format!("H1(v): chi0({x}) = {v} is outside [0, 1]"));
                    break;
                }
            }
        }
        if let Some(g) = &g {
            let t_max = self.time.horizon.max(self.time.dt);
            'outer: for i in 0..=50 {
                let t = t_max * i as f64 / 50.0;
                for &x in &lattice {
                    let v = g.eval(x, t, 0.0);
                    if !(v >= 0.0) {
                        violations.push(format!("H1(vii): g(0, {x}, {t}) = {v} is negative"));
                        break 'outer;
                    }
                }
            }
        }

        if self.parallel.threads < 1 {
            violations.push("parallel: threads must be at least 1".into());
        }

        if !violations.is_empty() {
            return Err(Error::ConfigValidation { violations });
        }
        Ok(ValidatedConfig {
            raw: self.clone(),
            f: f.unwrap(),
            g: g.unwrap(),
            theta0: theta0.unwrap(),
            chi0: chi0.unwrap(),
        })
    }
}

/// Read and validate a configuration file.
pub fn load_config<P: AsRef<Path>>(path: P) -> Result<ValidatedConfig> {
    let text = std::fs::read_to_string(path)?;
    SimulationConfig::from_str(&text)?.validate()
}

/// In-crate test fixture: a small valid configuration that individual tests
/// tweak field by field.
#[cfg(test)]
pub mod tests_support {
    use super::*;

    pub fn base_config() -> SimulationConfig {
        SimulationConfig {
            grid: GridConfig { n: 8 },
            time: TimeConfig { dt: 1e-3, horizon: 0.1, snapshot_interval: 0.05 },
            physics: PhysicalParams::unit(),
            hysteresis: HysteresisConfig {
                density: DensityModel::Exponential,
                yield_count: 64,
                tail_tol: 1e-8,
            },
            fatigue: FatigueParams { a: 1.0, b: 0.5 },
            kernel: KernelConfig { amplitude: 1.0, halfwidth: 0.25 },
            forcing: ForcingConfig { f: "0".into(), g: "0".into() },
            initial: InitialConfig { theta: "1".into(), chi: "0".into() },
            output: OutputConfig { directory: "out".into(), svg_plots: false },
            parallel: ParallelConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::base_config as base;
    use super::*;

    #[test]
    fn base_config_is_valid() {
        base().validate().unwrap();
    }

    #[test]
    fn zero_theta_floor_rejected_with_clause() {
        let mut c = base();
        c.physics.theta_floor = 0.0;
        match c.validate() {
            Err(Error::ConfigValidation { violations }) => {
                assert!(violations.iter().any(|v| v.contains("H1(v)")), "{violations:?}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn fatigue_bound_rejected_with_clause() {
        // b = 3, gamma = 1, default density M = 2: b*M = 6 > 1.
        let mut c = base();
        c.fatigue.b = 3.0;
        match c.validate() {
            Err(Error::ConfigValidation { violations }) => {
                assert!(violations.iter().any(|v| v.contains("H1(vi)")), "{violations:?}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_reported_at_once() {
        let mut c = base();
        c.physics.theta_floor = 0.0;
        c.fatigue.b = 3.0;
        c.forcing.g = "-1".into();
        match c.validate() {
            Err(Error::ConfigValidation { violations }) => {
                assert!(violations.len() >= 3, "{violations:?}");
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn negative_heat_source_rejected() {
        let mut c = base();
        c.forcing.g = "0 - x".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn chi_outside_unit_interval_rejected_not_clamped() {
        let mut c = base();
        c.initial.chi = "1.5".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip_is_equivalent() {
        let c = base();
        let text = c.to_toml();
        let back = SimulationConfig::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(text, back.to_toml());
    }
}
