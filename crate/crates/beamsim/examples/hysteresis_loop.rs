//! Trace one scalar stop operator around a loading cycle and print the
//! resulting hysteresis loop as CSV, then demonstrate rate independence:
//! refining a monotone input segment into sub-steps changes nothing.
//!
//! Run with: cargo run --example hysteresis_loop

use beamsim::{stop_init, stop_step, ConstraintInterval};

fn main() -> beamsim::Result<()> {
    let r = 1.0;
    let mut s = stop_init(0.0, ConstraintInterval::symmetric(r), None)?;
    let mut u = 0.0;

    // Triangular input 0 -> 2 -> -2 -> 2: the stop saturates at +-r and the
    // play absorbs the rest, drawing the classic parallelogram loop.
    println!("u,z,xi");
    println!("{u},{},{}", s.z, s.xi);
    let legs = [(2.0, 80), (-4.0, 160), (4.0, 160)];
    for (span, steps) in legs {
        let du = span / steps as f64;
        for _ in 0..steps {
            s = stop_step(&s, du)?;
            u += du;
            println!("{u},{},{}", s.z, s.xi);
        }
    }

    // Rate independence: one coarse step vs 10,000 sub-steps over the same
    // monotone segment agree to rounding.
    let base = stop_init(0.3, ConstraintInterval::symmetric(r), None)?;
    let coarse = stop_step(&base, 1.4)?;
    let mut fine = base;
    for _ in 0..10_000 {
        fine = stop_step(&fine, 1.4 / 10_000.0)?;
    }
    let dz = (coarse.z - fine.z).abs();
    let dxi = (coarse.xi - fine.xi).abs();
    println!("# refinement discrepancy: |dz| = {dz:e}, |dxi| = {dxi:e}");
    assert!(dz <= 1e-12 && dxi <= 1e-12);
    Ok(())
}
