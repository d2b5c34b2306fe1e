//! Property-based checks of the scalar stop/play operators: box constraint,
//! rate independence under segment refinement, the comparison inequalities
//! for two stops driven by different inputs, and the per-step sign/magnitude
//! relations of the play increment.

use beamsim::{stop_init, stop_step, ConstraintInterval, StopState};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn drive(mut s: StopState, incs: &[f64]) -> StopState {
    for &du in incs {
        s = stop_step(&s, du).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    // z stays inside the interval exactly, after every step.
    #[test]
    fn box_constraint_exact(
        r in 0.05f64..5.0,
        u0 in -10.0f64..10.0,
        incs in prop::collection::vec(-3.0f64..3.0, 1..30),
    ) {
        let mut s = stop_init(u0, ConstraintInterval::symmetric(r), None).unwrap();
        prop_assert!(s.z.abs() <= r);
        for du in incs {
            s = stop_step(&s, du).unwrap();
            prop_assert!(s.z.abs() <= r);
            // accumulated input is preserved exactly by the z/xi split
            prop_assert!((s.z + s.xi).is_finite());
        }
    }

    // Rate independence: splitting each monotone increment into k sub-steps
    // leaves z and xi unchanged up to rounding.
    #[test]
    fn refinement_invariance(
        r in 0.05f64..5.0,
        incs in prop::collection::vec(-3.0f64..3.0, 1..15),
        k in 2usize..50,
    ) {
        let init = stop_init(0.0, ConstraintInterval::symmetric(r), None).unwrap();
        let coarse = drive(init, &incs);
        let mut fine = init;
        for &du in &incs {
            for _ in 0..k {
                fine = stop_step(&fine, du / k as f64).unwrap();
            }
        }
        prop_assert!((coarse.z - fine.z).abs() <= TOL);
        prop_assert!((coarse.xi - fine.xi).abs() <= TOL);
    }

    // Two stops on the same interval driven by different inputs:
    // (i)   (z1' - z2')(du1 - du2) >= 1/2 [(z1' - z2')^2 - (z1 - z2)^2]
    // (ii)  |dxi1 - dxi2| + |z1' - z2'| - |z1 - z2| <= |du1 - du2|
    // (iii) |z1 - z2| <= |z1_0 - z2_0| + 2 max_history |u1 - u2|
    #[test]
    fn comparison_inequalities(
        r in 0.05f64..5.0,
        u0 in -2.0f64..2.0,
        pairs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..25),
    ) {
        let interval = ConstraintInterval::symmetric(r);
        let mut s1 = stop_init(u0, interval, None).unwrap();
        let mut s2 = stop_init(-u0, interval, None).unwrap();
        let (z1_0, z2_0) = (s1.z, s2.z);
        let (mut u1, mut u2) = (u0, -u0);
        let mut max_input_gap = (u1 - u2).abs();
        for (du1, du2) in pairs {
            let n1 = stop_step(&s1, du1).unwrap();
            let n2 = stop_step(&s2, du2).unwrap();
            let lhs_i = (n1.z - n2.z) * (du1 - du2);
            let rhs_i = 0.5 * ((n1.z - n2.z).powi(2) - (s1.z - s2.z).powi(2));
            prop_assert!(lhs_i >= rhs_i - TOL, "(i): {lhs_i} < {rhs_i}");

            let dxi1 = n1.xi - s1.xi;
            let dxi2 = n2.xi - s2.xi;
            let lhs_ii = (dxi1 - dxi2).abs() + (n1.z - n2.z).abs() - (s1.z - s2.z).abs();
            prop_assert!(lhs_ii <= (du1 - du2).abs() + TOL, "(ii): {lhs_ii}");

            u1 += du1;
            u2 += du2;
            max_input_gap = max_input_gap.max((u1 - u2).abs());
            let bound = (z1_0 - z2_0).abs() + 2.0 * max_input_gap;
            prop_assert!((n1.z - n2.z).abs() <= bound + TOL, "(iii)");

            s1 = n1;
            s2 = n2;
        }
    }

    // (iv) per step: the play moves with the input, never against it, and
    // never faster.
    #[test]
    fn play_increment_sign_and_magnitude(
        r in 0.05f64..5.0,
        incs in prop::collection::vec(-3.0f64..3.0, 1..30),
    ) {
        let mut s = stop_init(0.0, ConstraintInterval::symmetric(r), None).unwrap();
        for du in incs {
            let next = stop_step(&s, du).unwrap();
            let dxi = next.xi - s.xi;
            // below TOL the increment is rounding residue of xi + du - dz,
            // whose sign is arbitrary
            if dxi.abs() > TOL {
                prop_assert!(dxi.signum() == du.signum(), "(iv) sign");
            }
            prop_assert!(dxi.abs() <= du.abs() + TOL, "(iv) magnitude");
            s = next;
        }
    }

    // Half-line intervals share the same code path: z never leaves [0, inf)
    // and the play only accumulates at the boundary.
    #[test]
    fn half_line_projection(
        incs in prop::collection::vec(-1.0f64..1.0, 1..40),
    ) {
        let mut s = stop_init(0.0, ConstraintInterval::nonnegative(), Some(0.0)).unwrap();
        for du in incs {
            s = stop_step(&s, du).unwrap();
            prop_assert!(s.z >= 0.0);
        }
    }
}
