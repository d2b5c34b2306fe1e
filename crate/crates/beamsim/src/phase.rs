//! Phase fraction and fatigue evolution.
//!
//! Both fields are stops: the phase fraction `chi` on `[0, 1]` driven by the
//! rescaled temperature excess over the melting point, and the fatigue `m` on
//! `[0, inf)` driven by convolved plastic dissipation minus the melting
//! recovery term `h(chi_dot)`.

use crate::beam::PhysicalParams;
use crate::error::{Error, Result};
use crate::hysteresis::{stop_step, StopState};

/// Parameters of the recovery rate `h`; `a` bounds the slope, `b` the
/// quadratic growth, with `b * M <= gamma` required at configuration time.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FatigueParams {
    pub a: f64,
    pub b: f64,
}

/// `h(z) = a z_+^2 / (z_+ + a/b)`: zero for `z <= 0`, nondecreasing,
/// `h(z) <= b z_+^2` and `0 <= h' <= a`.
pub fn h_eval(z: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if z <= 0.0 {
        return 0.0;
    }
    a * z * z / (z + a / b)
}

/// Compactly supported dissipation-spreading kernel
/// `lambda(x) = amplitude * (1 - (x/halfwidth)^2)^2` on `|x| <= halfwidth`.
/// C1 at the support boundary.
pub fn lambda_eval(x: f64, amplitude: f64, halfwidth: f64) -> f64 {
    debug_assert!(amplitude >= 0.0 && halfwidth > 0.0);
    let s = x / halfwidth;
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - s * s;
    amplitude * q * q
}

fn lambda_prime(x: f64, amplitude: f64, halfwidth: f64) -> f64 {
    let s = x / halfwidth;
    if s.abs() >= 1.0 {
        return 0.0;
    }
    -4.0 * amplitude * s * (1.0 - s * s) / halfwidth
}

/// `Lambda = max_x (lambda(x) + |lambda'(x)|)`.
///
/// On `s = x / halfwidth in [0, 1]` the objective is
/// `amplitude [(1 - s^2)^2 + (4 s / halfwidth)(1 - s^2)]`; interior critical
/// points are roots of `s^3 - (3/halfwidth) s^2 - s + 1/halfwidth = 0`,
/// located by bisection on sign changes and compared with the endpoints.
pub fn lambda_bound(amplitude: f64, halfwidth: f64) -> f64 {
    let objective = |s: f64| {
        let x = s * halfwidth;
        lambda_eval(x, amplitude, halfwidth) + lambda_prime(x, amplitude, halfwidth).abs()
    };
    let cubic = |s: f64| s * s * s - 3.0 / halfwidth * s * s - s + 1.0 / halfwidth;
    let mut best = objective(0.0).max(objective(1.0));
    let samples = 64;
    for i in 0..samples {
        let a = i as f64 / samples as f64;
        let b = (i + 1) as f64 / samples as f64;
        if cubic(a) * cubic(b) <= 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if cubic(lo) * cubic(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.max(objective(0.5 * (lo + hi)));
        }
    }
    best
}

/// Table of `lambda(i/n)` for offsets `i = -n..=n`, plus the bound `Lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub offsets: Vec<f64>,
    pub bound: f64,
}

impl KernelTable {
    pub fn build(amplitude: f64, halfwidth: f64, n: usize) -> Self {
        let offsets = (-(n as isize)..=n as isize)
            .map(|i| lambda_eval(i as f64 / n as f64, amplitude, halfwidth))
            .collect();
        Self { offsets, bound: lambda_bound(amplitude, halfwidth) }
    }
}

/// Advance the phase stop on `[0, 1]` by one step of the driving integral
/// `(L / (gamma theta_c)) (theta - theta_c) dt`. Returns the new stop and the
/// difference quotient `chi_dot`.
pub fn chi_update(
    chi_stop: &StopState,
    theta: f64,
    params: &PhysicalParams,
    dt: f64,
) -> Result<(StopState, f64)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidStep { dt });
    }
    let drive = params.latent_heat / (params.phase_relaxation * params.melting_temp)
        * (theta - params.melting_temp);
    let new = stop_step(chi_stop, drive * dt)?;
    Ok((new, (new.z - chi_stop.z) / dt))
}

/// Advance the fatigue stop on `[0, inf)` by `(-h(chi_dot) + D_conv) dt`.
/// Returns the new stop and the difference quotient `m_dot`.
pub fn m_update(
    m_stop: &StopState,
    chi_dot: f64,
    d_conv: f64,
    dt: f64,
    fatigue: &FatigueParams,
) -> Result<(StopState, f64)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidStep { dt });
    }
    if d_conv < 0.0 {
        return Err(Error::ConstraintViolation(format!(
            "convolved dissipation {d_conv} is negative"
        )));
    }
    let drive = -h_eval(chi_dot, fatigue.a, fatigue.b) + d_conv;
    let new = stop_step(m_stop, drive * dt)?;
    Ok((new, (new.z - m_stop.z) / dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hysteresis::{stop_init, ConstraintInterval};

    #[test]
    fn h_values() {
        assert_eq!(h_eval(-1.0, 1.0, 1.0), 0.0);
        assert!((h_eval(1.0, 1.0, 1.0) - 0.5).abs() < 1e-15);
        // h(z) <= b z^2 on a sweep
        for i in 0..=1000 {
            let z = i as f64 * 0.1;
            assert!(h_eval(z, 0.7, 0.3) <= 0.3 * z * z + 1e-12);
        }
        // slope bounded by a
        let a = 0.7;
        for i in 0..1000 {
            let z = i as f64 * 0.01;
            let dz = 1e-6;
            let slope = (h_eval(z + dz, a, 0.3) - h_eval(z, a, 0.3)) / dz;
            assert!(slope >= -1e-9 && slope <= a + 1e-6);
        }
    }

    #[test]
    fn lambda_shape() {
        let (a0, w) = (2.0, 0.25);
        assert_eq!(lambda_eval(0.0, a0, w), a0);
        assert_eq!(lambda_eval(w, a0, w), 0.0);
        assert_eq!(lambda_eval(-w, a0, w), 0.0);
        // one-sided slopes vanish at the support boundary:
        // lambda(w - d) = a (2d/w)^2 + O(d^3), so the chord slope is O(d)
        let d = 1e-8;
        assert!(lambda_eval(w - d, a0, w) / d < 1e-5);
    }

    #[test]
    fn lambda_bound_matches_dense_sweep() {
        for &(a0, w) in &[(1.0, 0.25), (2.0, 0.1), (0.5, 0.6)] {
            let analytic = lambda_bound(a0, w);
            let mut swept: f64 = 0.0;
            for i in 0..=200_000 {
                let x = -w + 2.0 * w * i as f64 / 200_000.0;
                swept = swept.max(lambda_eval(x, a0, w) + lambda_prime(x, a0, w).abs());
            }
            assert!(analytic >= swept - 1e-6);
            assert!(analytic <= swept + 1e-3 * swept.max(1.0));
        }
    }

    #[test]
    fn chi_equilibrium_and_closed_form() {
        let p = PhysicalParams::unit();
        let s = stop_init(0.0, ConstraintInterval::unit(), Some(0.0)).unwrap();
        let (s2, rate) = chi_update(&s, p.melting_temp, &p, 0.1).unwrap();
        assert_eq!(s2.z, 0.0);
        assert_eq!(rate, 0.0);

        // constants 1, theta = theta_c + 1: chi(t) = min(t, 1)
        let mut s = stop_init(0.0, ConstraintInterval::unit(), Some(0.0)).unwrap();
        let dt = 0.01;
        for i in 1..=50 {
            let (next, _) = chi_update(&s, p.melting_temp + 1.0, &p, dt).unwrap();
            s = next;
            assert!((s.z - (i as f64 * dt).min(1.0)).abs() < 1e-12);
        }
        assert!((s.z - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chi_saturates_liquid() {
        let p = PhysicalParams::unit();
        let s = stop_init(1.0, ConstraintInterval::unit(), Some(1.0)).unwrap();
        let (s2, rate) = chi_update(&s, p.melting_temp + 5.0, &p, 0.1).unwrap();
        assert_eq!(s2.z, 1.0);
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn m_grows_linearly_without_recovery() {
        let f = FatigueParams { a: 1.0, b: 0.5 };
        let mut s = stop_init(0.0, ConstraintInterval::nonnegative(), Some(0.0)).unwrap();
        let dt = 0.05;
        for i in 1..=40 {
            let (next, rate) = m_update(&s, -1.0, 0.3, dt, &f).unwrap();
            s = next;
            assert!((rate - 0.3).abs() < 1e-12);
            assert!((s.z - 0.3 * i as f64 * dt).abs() < 1e-12);
        }
    }

    #[test]
    fn m_projected_at_zero() {
        let f = FatigueParams { a: 1.0, b: 1.0 };
        let s = stop_init(0.0, ConstraintInterval::nonnegative(), Some(0.0)).unwrap();
        let (s2, rate) = m_update(&s, 2.0, 0.0, 0.1, &f).unwrap();
        assert_eq!(s2.z, 0.0);
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn m_recovery_hand_case() {
        // a = b = 1, chi_dot = 1, D = 0, m = 1, dt = 0.1: h(1) = 0.5, m -> 0.95
        let f = FatigueParams { a: 1.0, b: 1.0 };
        let s = stop_init(1.0, ConstraintInterval::nonnegative(), Some(1.0)).unwrap();
        let (s2, rate) = m_update(&s, 1.0, 0.0, 0.1, &f).unwrap();
        assert!((s2.z - 0.95).abs() < 1e-15);
        assert!((rate - (-0.5)).abs() < 1e-12);
    }

    #[test]
    fn m_rejects_negative_dissipation() {
        let f = FatigueParams { a: 1.0, b: 1.0 };
        let s = stop_init(0.0, ConstraintInterval::nonnegative(), Some(0.0)).unwrap();
        assert!(m_update(&s, 0.0, -0.1, 0.1, &f).is_err());
    }
}
