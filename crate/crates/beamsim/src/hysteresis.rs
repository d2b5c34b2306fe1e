//! Scalar stop/play operators on closed intervals.
//!
//! The stop clamps the motion of its input to a constraint interval; the play
//! is the complement `xi = u - z`. For piecewise-linear input the evolution is
//! solved exactly by one projection per segment, so higher layers feed the
//! operator with per-step increments and no sub-stepping is ever needed.

use crate::error::{Error, Result};

/// Closed constraint interval; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ConstraintInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(lower < upper, "empty constraint interval [{lower}, {upper}]");
        Self { lower, upper }
    }

    /// Symmetric interval `[-r, r]`, the single-yield elastoplastic constraint.
    pub fn symmetric(r: f64) -> Self {
        assert!(r > 0.0, "yield radius must be positive");
        Self { lower: -r, upper: r }
    }

    /// `[0, 1]`, the phase-fraction constraint.
    pub fn unit() -> Self {
        Self { lower: 0.0, upper: 1.0 }
    }

    /// `[0, inf)`, the fatigue constraint.
    pub fn nonnegative() -> Self {
        Self { lower: 0.0, upper: f64::INFINITY }
    }

    #[inline]
    pub fn project(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && self.lower == -self.upper
    }
}

/// Current state of one stop operator: `z` is the stop value, `xi` the
/// accumulated play. `z + xi` always equals the accumulated input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopState {
    pub z: f64,
    pub xi: f64,
    pub interval: ConstraintInterval,
}

/// Initialize a stop. Without an explicit `z0`, the canonical initial value is
/// the projection of `u0` onto the interval.
pub fn stop_init(u0: f64, interval: ConstraintInterval, z0: Option<f64>) -> Result<StopState> {
    let z = match z0 {
        Some(z0) => {
            if !interval.contains(z0) {
                return Err(Error::InvalidInitialState {
                    z0,
                    lower: interval.lower,
                    upper: interval.upper,
                });
            }
            z0
        }
        None => interval.project(u0),
    };
    Ok(StopState { z, xi: u0 - z, interval })
}

/// Advance a stop by one input increment `du`.
///
/// `z_new = proj(z + du)`; the remainder of the increment goes into the play.
/// This is the exact solution of the stop variational inequality over one
/// monotone input segment, so refining the segment into sub-steps changes
/// nothing.
pub fn stop_step(state: &StopState, du: f64) -> Result<StopState> {
    if !du.is_finite() {
        return Err(Error::NonFinite { context: "stop increment du".into() });
    }
    let z_new = state.interval.project(state.z + du);
    Ok(StopState {
        z: z_new,
        xi: state.xi + du - (z_new - state.z),
        interval: state.interval,
    })
}

/// Energy dissipated between two states of a stop on `[-r, r]`: `r * |delta xi|`.
pub fn dissipation_increment(before: &StopState, after: &StopState, r: f64) -> Result<f64> {
    if !before.interval.is_symmetric() || before.interval.upper != r {
        return Err(Error::UnsupportedInterval {
            lower: before.interval.lower,
            upper: before.interval.upper,
        });
    }
    Ok(r * (after.xi - before.xi).abs())
}
