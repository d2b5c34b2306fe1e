//! Thermodynamic and convergence instrumentation: total energy, entropy
//! production, the three interpolants, discrete norms and cross-resolution
//! comparison.

use crate::beam::source_g;
use crate::error::{Error, Result};
use crate::prandtl::pi_potential;
use crate::state::{BeamState, ModelContext};

/// Trapezoidal node quadrature with total mass 1:
/// `(1/n)(v_0/2 + v_1 + ... + v_{n-1} + v_n/2)`, so a constant field
/// integrates to itself exactly.
pub fn node_quadrature(v: &[f64]) -> f64 {
    let n = v.len() - 1;
    let mut acc = 0.5 * (v[0] + v[n]);
    for &x in &v[1..n] {
        acc += x;
    }
    acc / n as f64
}

/// Total energy of the state:
/// `(1/n) sum_{k=1}^{n-1} (B eps^2/2 + V_k + beta theta_c eps
/// + rho w_dot^2/2 + c theta + L chi)
/// + (alpha n / 2) sum_{k=1}^n (w_dot_k - w_dot_{k-1})^2`.
///
/// The nodal sum runs over interior nodes only: the boundary curvature
/// follows its own relaxation ODE with no matching heat node, so including
/// it would add an O(1/n) drift, independent of dt, to the balance residual.
pub fn total_energy(state: &BeamState, ctx: &ModelContext) -> Result<f64> {
    let n = state.n();
    let p = &ctx.params;
    let chi = state.chi_values();
    let m = state.m_values();
    let mut energy = 0.0;
    for k in 1..n {
        let v_k = pi_potential(&state.pi[k], m[k], &ctx.yield_grid, &ctx.density)?;
        let e = state.eps[k];
        energy += 0.5 * p.hardening * e * e
            + v_k
            + p.thermal_bending * p.melting_temp * e
            + 0.5 * p.mass_density * state.w_dot[k] * state.w_dot[k]
            + p.heat_capacity * state.theta[k]
            + p.latent_heat * chi[k];
    }
    energy /= n as f64;
    let mut grad = 0.0;
    for k in 1..=n {
        let d = state.w_dot[k] - state.w_dot[k - 1];
        grad += d * d;
    }
    energy += 0.5 * p.rotary_inertia * n as f64 * grad;
    if !energy.is_finite() {
        return Err(Error::NonFinite { context: "total energy".into() });
    }
    Ok(energy)
}

/// Total entropy `(1/n) sum_{k=1}^{n-1} (c log(theta_k/theta_c) + beta eps_k
/// + (L/theta_c) chi_k)`; requires positive temperature. Interior nodes only,
/// for the same reason as [`total_energy`]: the boundary curvature relaxes
/// with no heat node to balance it, so its entropy term would make the
/// production estimate fail by an O(1/n) amount whenever the boundary
/// temperature sits away from the melting point.
pub fn total_entropy(state: &BeamState, ctx: &ModelContext) -> Result<f64> {
    let p = &ctx.params;
    let chi = state.chi_values();
    let n = state.n();
    let mut acc = 0.0;
    for k in 1..n {
        let th = state.theta[k];
        if !(th > 0.0) {
            return Err(Error::Domain(format!("nonpositive temperature {th} at node {k}")));
        }
        acc += p.heat_capacity * (th / p.melting_temp).ln()
            + p.thermal_bending * state.eps[k]
            + p.latent_heat / p.melting_temp * chi[k];
    }
    Ok(acc / n as f64)
}

/// Entropy production across one step:
/// `(S_after - S_before)/dt - (1/n) sum_k g_k / theta_k`, with the source
/// evaluated exactly as the step used it (beginning-of-step temperature and
/// time) and divided by the end-of-step temperature. Expected to be bounded
/// below by -C dt.
pub fn entropy_production(
    before: &BeamState,
    after: &BeamState,
    ctx: &ModelContext,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidStep { dt });
    }
    let n = before.n();
    let s0 = total_entropy(before, ctx)?;
    let s1 = total_entropy(after, ctx)?;
    let mut source = 0.0;
    for k in 1..n {
        let g_k = source_g(
            |th, x, t| ctx.g.eval(x, t, th),
            before.theta[k],
            k,
            n,
            before.t,
        )?;
        source += g_k / after.theta[k];
    }
    Ok((s1 - s0) / dt - source / n as f64)
}

/// The three node-sequence interpolants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolantKind {
    PiecewiseConstant,
    PiecewiseLinear,
    PiecewiseQuadratic,
}

/// Evaluate an interpolant of nodal `values` at `x` in `[0, 1]`.
///
/// Cell `k` covers `[(k-1)/n, k/n)`. The piecewise-constant interpolant takes
/// `v_k` on cells `1..n-1` and `v_{n-1}` on the last cell; the quadratic one
/// uses the first difference of its own cell and the second difference of
/// cell `min(k, n-1)` so the stencil never leaves the index range.
pub fn interpolate(values: &[f64], kind: InterpolantKind, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("interpolation point {x} outside [0, 1]")));
    }
    let n = values.len() - 1;
    if n < 2 {
        return Err(Error::Domain("interpolation needs at least 2 cells".into()));
    }
    let nf = n as f64;
    let k = ((x * nf).floor() as usize + 1).min(n);
    let s = x - (k - 1) as f64 / nf;
    match kind {
        InterpolantKind::PiecewiseConstant => Ok(values[k.min(n - 1)]),
        InterpolantKind::PiecewiseLinear => {
            Ok(values[k - 1] + s * nf * (values[k] - values[k - 1]))
        }
        InterpolantKind::PiecewiseQuadratic => {
            let j = k.min(n - 1);
            let d1 = nf * (values[k] - values[k - 1]);
            let d2 = nf * nf * (values[j + 1] - 2.0 * values[j] + values[j - 1]);
            Ok(0.5 * (values[k - 1] + values[k]) + s * d1 + 0.5 * s * s * d2)
        }
    }
}

/// Discrete p-norm with endpoint half-weights (total mass 1), so a constant
/// vector has norm equal to the constant for every p; `p = inf` gives the
/// max norm.
pub fn discrete_norm(values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm exponent {p} must be >= 1")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
    }
    let n = values.len() - 1;
    let mut acc = 0.5 * (values[0].abs().powf(p) + values[n].abs().powf(p));
    for &v in &values[1..n] {
        acc += v.abs().powf(p);
    }
    Ok((acc / n as f64).powf(1.0 / p))
}

/// Discrete p-norm of the difference quotients:
/// `(n^{p-1} sum_k |v_k - v_{k-1}|^p)^{1/p}`; `p = inf` gives
/// `max_k n |v_k - v_{k-1}|`.
pub fn discrete_difference_norm(values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm exponent {p} must be >= 1")));
    }
    let n = values.len() - 1;
    let nf = n as f64;
    if p.is_infinite() {
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            worst = worst.max(nf * (values[k] - values[k - 1]).abs());
        }
        return Ok(worst);
    }
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (values[k] - values[k - 1]).abs().powf(p);
    }
    Ok((nf.powf(p - 1.0) * acc).powf(1.0 / p))
}

// 5-point Gauss-Legendre rule on [-1, 1] for the L2 comparison integrals.
const GAUSS_X: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GAUSS_W: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

/// `L^2(0, 1)` distance between interpolants of two node vectors, by a
/// composite Gauss rule on a grid fine enough to contain both sets of cell
/// boundaries when one resolution divides the other.
pub fn interpolant_l2_distance(
    coarse: &[f64],
    fine: &[f64],
    kind: InterpolantKind,
) -> Result<f64> {
    let cells = 4 * (coarse.len() - 1).max(fine.len() - 1);
    let h = 1.0 / cells as f64;
    let mut acc = 0.0;
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for i in 0..5 {
            // clamp guards the x = 1 endpoint against rounding past the domain
            let x = (mid + 0.5 * h * GAUSS_X[i]).clamp(0.0, 1.0);
            let d = interpolate(coarse, kind, x)? - interpolate(fine, kind, x)?;
            acc += GAUSS_W[i] * d * d;
        }
    }
    Ok((0.5 * h * acc).sqrt())
}

/// Maximum over sample times of the `L^2` distance between interpolants of
/// two runs' snapshots of one field. The snapshot sequences must have the
/// same length (same wall-time cadence).
pub fn convergence_metric(
    run_coarse: &[Vec<f64>],
    run_fine: &[Vec<f64>],
    kind: InterpolantKind,
) -> Result<f64> {
    if run_coarse.len() != run_fine.len() {
        return Err(Error::Comparison(format!(
            "snapshot counts differ: {} vs {}",
            run_coarse.len(),
            run_fine.len()
        )));
    }
    if run_coarse.is_empty() {
        return Err(Error::Comparison("no snapshots to compare".into()));
    }
    let mut worst: f64 = 0.0;
    for (a, b) in run_coarse.iter().zip(run_fine) {
        worst = worst.max(interpolant_l2_distance(a, b, kind)?);
    }
    Ok(worst)
}

/// Time-integrated Neumann boundary functional
/// `sum_snapshots |n (theta_{n-1} - theta_{n-2})| * cadence`, which should
/// shrink as the mesh resolves the homogeneous Neumann condition.
pub fn neumann_boundary_defect(theta_snapshots: &[Vec<f64>], cadence: f64) -> f64 {
    let mut acc = 0.0;
    for th in theta_snapshots {
        let n = th.len() - 1;
        acc += (n as f64 * (th[n - 1] - th[n - 2])).abs() * cadence;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests_support::base_config;
    use crate::state::BeamState;

    fn setup() -> (crate::config::ValidatedConfig, ModelContext, BeamState) {
        let cfg = base_config().validate().unwrap();
        let ctx = ModelContext::build(&cfg).unwrap();
        let s = BeamState::initial(&cfg, &ctx).unwrap();
        (cfg, ctx, s)
    }

    #[test]
    fn rest_state_energy_is_interior_share_of_c_theta_c() {
        // interior-node sum: (n-1)/n of the uniform value c theta_c
        let (cfg, ctx, s) = setup();
        let n = cfg.raw.grid.n as f64;
        let e = total_energy(&s, &ctx).unwrap();
        let expect = ctx.params.heat_capacity * ctx.params.melting_temp * (n - 1.0) / n;
        assert!((e - expect).abs() < 1e-14, "{e} vs {expect}");
    }

    #[test]
    fn energy_linear_in_theta() {
        let (cfg, ctx, s) = setup();
        let n = cfg.raw.grid.n as f64;
        let e0 = total_energy(&s, &ctx).unwrap();
        let mut s2 = s.clone();
        for th in &mut s2.theta {
            *th += 0.37;
        }
        let e1 = total_energy(&s2, &ctx).unwrap();
        assert!((e1 - e0 - ctx.params.heat_capacity * 0.37 * (n - 1.0) / n).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_entropy_production_zero() {
        let (_, ctx, s) = setup();
        let mut after = s.clone();
        after.t = 0.01;
        let prod = entropy_production(&s, &after, &ctx, 0.01).unwrap();
        assert_eq!(prod, 0.0);
    }

    #[test]
    fn entropy_rejects_nonpositive_theta() {
        let (_, ctx, mut s) = setup();
        s.theta[3] = 0.0;
        assert!(total_entropy(&s, &ctx).is_err());
    }

    #[test]
    fn interpolants_on_constant_and_affine() {
        let n = 8;
        let c = vec![2.5; n + 1];
        let lin: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        for kind in [
            InterpolantKind::PiecewiseConstant,
            InterpolantKind::PiecewiseLinear,
            InterpolantKind::PiecewiseQuadratic,
        ] {
            for i in 0..=40 {
                let x = i as f64 / 40.0;
                assert!((interpolate(&c, kind, x).unwrap() - 2.5).abs() < 1e-14);
            }
        }
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let v = interpolate(&lin, InterpolantKind::PiecewiseLinear, x).unwrap();
            assert!((v - x).abs() < 1e-14);
        }
    }

    // The quadratic interpolant of v_k = (k/n)^2 is exactly
    // x^2 + x/n + 1/(2 n^2) on interior cells: substitute the differences
    // Delta_k = (2k-1)/n, Delta^2 = 2 into the cell formula.
    #[test]
    fn quadratic_interpolant_of_squares() {
        let n = 8;
        let nf = n as f64;
        let v: Vec<f64> = (0..=n).map(|k| (k as f64 / nf).powi(2)).collect();
        for i in 0..=100 {
            let x = 0.05 + 0.8 * i as f64 / 100.0; // stays on interior cells
            let got = interpolate(&v, InterpolantKind::PiecewiseQuadratic, x).unwrap();
            let expect = x * x + x / nf + 0.5 / (nf * nf);
            assert!((got - expect).abs() < 1e-13, "x = {x}: {got} vs {expect}");
        }
    }

    #[test]
    fn interpolation_domain_checked() {
        let v = vec![0.0, 1.0, 2.0];
        assert!(interpolate(&v, InterpolantKind::PiecewiseLinear, -0.1).is_err());
        assert!(interpolate(&v, InterpolantKind::PiecewiseLinear, 1.1).is_err());
        assert!(interpolate(&v, InterpolantKind::PiecewiseLinear, 1.0).is_ok());
    }

    #[test]
    fn norm_cases() {
        let c = vec![3.0; 9];
        for p in [1.0, 2.0, 5.0, f64::INFINITY] {
            assert!((discrete_norm(&c, p).unwrap() - 3.0).abs() < 1e-14);
        }
        let v = vec![0.0, 1.0];
        assert!((discrete_difference_norm(&v, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let w = vec![1.0, -2.0, 0.5];
        assert_eq!(discrete_norm(&w, f64::INFINITY).unwrap(), 2.0);
        assert!(discrete_norm(&w, 0.5).is_err());
    }

    #[test]
    fn norm_monotone_in_p() {
        let v = vec![0.3, -1.7, 0.0, 2.2, -0.9, 1.1];
        let pairs = [(1.0, 2.0), (2.0, 4.0), (4.0, f64::INFINITY)];
        for (p, q) in pairs {
            let np = discrete_norm(&v, p).unwrap();
            let nq = discrete_norm(&v, q).unwrap();
            assert!(np <= nq + 1e-12, "|v|_{p} = {np} > |v|_{q} = {nq}");
        }
    }

    #[test]
    fn identical_runs_compare_to_zero() {
        let snap = vec![vec![0.1, 0.4, 0.9, 1.6, 2.5]; 3];
        let m = convergence_metric(&snap, &snap, InterpolantKind::PiecewiseQuadratic).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn mismatched_runs_rejected() {
        let a = vec![vec![0.0; 5]; 3];
        let b = vec![vec![0.0; 9]; 2];
        assert!(convergence_metric(&a, &b, InterpolantKind::PiecewiseLinear).is_err());
    }

    // Sampling sin(pi x) on grids n and 2n: the interpolant distance must
    // shrink roughly like the interpolation error of the coarser grid.
    #[test]
    fn refinement_shrinks_interpolant_distance() {
        let pi = std::f64::consts::PI;
        let sample = |n: usize| -> Vec<f64> {
            (0..=n).map(|k| (pi * k as f64 / n as f64).sin()).collect()
        };
        let d1 = interpolant_l2_distance(&sample(8), &sample(16), InterpolantKind::PiecewiseQuadratic)
            .unwrap();
        let d2 =
            interpolant_l2_distance(&sample(16), &sample(32), InterpolantKind::PiecewiseQuadratic)
                .unwrap();
        assert!(d2 < d1, "{d2} !< {d1}");
    }

    #[test]
    fn neumann_defect_cases() {
        // constant temperature: zero defect
        let flat = vec![vec![1.0; 9]; 4];
        assert_eq!(neumann_boundary_defect(&flat, 0.1), 0.0);
        // one snapshot with a unit jump over the last interior pair, n = 4
        let th = vec![vec![0.0, 0.0, 0.0, 1.0, 1.0]];
        assert!((neumann_boundary_defect(&th, 0.5) - 2.0).abs() < 1e-15);
    }
}
