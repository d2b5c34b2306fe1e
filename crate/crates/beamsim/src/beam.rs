//! Spatial algebra of the space-discrete beam: grids, second differences,
//! the velocity system, tridiagonal solves, boundary handling, cell-averaged
//! sources and the dissipation convolution.

use crate::error::{Error, Result};

/// Uniform grid on `[0, 1]` with `n` cells and nodes `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("grid needs n >= 2 cells, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Physical constants of the model; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalParams {
    /// Hardening modulus B.
    pub hardening: f64,
    /// Viscosity nu.
    pub viscosity: f64,
    /// Thermal bending coefficient beta.
    pub thermal_bending: f64,
    /// Melting temperature theta_c.
    pub melting_temp: f64,
    /// Mass density rho.
    pub mass_density: f64,
    /// Rotary inertia alpha.
    pub rotary_inertia: f64,
    /// Specific heat capacity c.
    pub heat_capacity: f64,
    /// Heat conductivity kappa.
    pub conductivity: f64,
    /// Latent heat L.
    pub latent_heat: f64,
    /// Phase relaxation time gamma.
    pub phase_relaxation: f64,
    /// Lower bound theta_* for the initial temperature.
    pub theta_floor: f64,
}

impl PhysicalParams {
    /// All constants set to 1, the normalization of the discrete scheme.
    pub fn unit() -> Self {
        Self {
            hardening: 1.0,
            viscosity: 1.0,
            thermal_bending: 1.0,
            melting_temp: 1.0,
            mass_density: 1.0,
            rotary_inertia: 1.0,
            heat_capacity: 1.0,
            conductivity: 1.0,
            latent_heat: 1.0,
            phase_relaxation: 1.0,
            theta_floor: 1.0,
        }
    }
}

/// `n^2 (v_{k+1} - 2 v_k + v_{k-1})` at an interior node.
pub fn second_difference(v: &[f64], k: usize, n: usize) -> Result<f64> {
    if k == 0 || k >= n || v.len() != n + 1 {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let n2 = (n * n) as f64;
    Ok(n2 * (v[k + 1] - 2.0 * v[k] + v[k - 1]))
}

/// Symmetric tridiagonal-by-structure system stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Thomas elimination. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 {
            return Err(Error::SingularSystem { row: 0 });
        }
        c[0] = self.upper.first().copied().unwrap_or(0.0) / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if pivot == 0.0 {
                return Err(Error::SingularSystem { row: i });
            }
            if i < n - 1 {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    pub fn multiply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Solve a dense symmetric positive definite system by Cholesky
/// factorization (no pivoting needed for SPD matrices); the systems here
/// have at most a few dozen rows.
pub fn spd_solve_dense(a: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = a.len();
    assert_eq!(rhs.len(), m);
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        assert_eq!(a[i].len(), m);
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::SingularSystem { row: i });
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = y[i];
        for k in i + 1..m {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Ok(x)
}

/// The stiffness matrix `S` (`n^2` times the negative second difference with
/// Dirichlet ends) on the interior nodes.
pub fn assemble_stiffness(grid: &Grid) -> Tridiagonal {
    let n = grid.n;
    let n2 = (n * n) as f64;
    let m = n - 1;
    Tridiagonal {
        lower: vec![-n2; m.saturating_sub(1)],
        diag: vec![2.0 * n2; m],
        upper: vec![-n2; m.saturating_sub(1)],
    }
}

/// Dense assembly of `rho I + alpha S + coeff S^2` on the interior nodes,
/// the system of the semi-implicit moment update. Pentadiagonal SPD; the
/// `S^2` term makes the backward-Euler treatment of the viscous coupling
/// unconditionally stable, where an explicit step would need
/// `dt < 2 (rho + alpha s) / (nu s^2)` for every stiffness eigenvalue `s`
/// (about `2 alpha / (4 nu n^2)` at the top of the spectrum).
pub fn assemble_moment_system(params: &PhysicalParams, grid: &Grid, coeff: f64) -> Vec<Vec<f64>> {
    let s = assemble_stiffness(grid);
    let m = s.len();
    let mut a = vec![vec![0.0; m]; m];
    // dense S from its diagonals, then rho I + alpha S + coeff S * S
    let mut s_dense = vec![vec![0.0; m]; m];
    for i in 0..m {
        s_dense[i][i] = s.diag[i];
        if i + 1 < m {
            s_dense[i][i + 1] = s.upper[i];
            s_dense[i + 1][i] = s.lower[i];
        }
    }
    for i in 0..m {
        a[i][i] = params.mass_density;
        for j in 0..m {
            a[i][j] += params.rotary_inertia * s_dense[i][j];
            if coeff != 0.0 {
                let mut s2 = 0.0;
                for k in j.saturating_sub(1)..(j + 2).min(m) {
                    s2 += s_dense[i][k] * s_dense[k][j];
                }
                a[i][j] += coeff * s2;
            }
        }
    }
    a
}

/// `rho I + alpha S` on the interior nodes, with Dirichlet ends.
/// `S` is `n^2` times the discrete negative Laplacian, symmetric positive
/// definite, so the smallest eigenvalue of the system is at least `rho`.
pub fn assemble_velocity_system(params: &PhysicalParams, grid: &Grid) -> Tridiagonal {
    let n = grid.n;
    let n2 = (n * n) as f64;
    let m = n - 1;
    Tridiagonal {
        lower: vec![-params.rotary_inertia * n2; m.saturating_sub(1)],
        diag: vec![params.mass_density + 2.0 * params.rotary_inertia * n2; m],
        upper: vec![-params.rotary_inertia * n2; m.saturating_sub(1)],
    }
}

/// Solve the velocity stage: `(rho I + alpha S) w_dot = -D^2 u + f` on the
/// interior, `w_dot = 0` at the ends, and `eps_dot` as the second difference
/// of the velocity. Returns full-length vectors with boundary entries zero.
pub fn velocity_solve(
    u: &[f64],
    params: &PhysicalParams,
    grid: &Grid,
    f_values: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n;
    assert_eq!(u.len(), n + 1);
    assert_eq!(f_values.len(), n - 1);
    let system = assemble_velocity_system(params, grid);
    let rhs: Vec<f64> = (1..n)
        .map(|k| Ok(-second_difference(u, k, n)? + f_values[k - 1]))
        .collect::<Result<_>>()?;
    let interior = system.solve(&rhs)?;

    let mut w_dot = vec![0.0; n + 1];
    w_dot[1..n].copy_from_slice(&interior);
    let mut eps_dot = vec![0.0; n + 1];
    for k in 1..n {
        eps_dot[k] = second_difference(&w_dot, k, n)?;
    }
    Ok((w_dot, eps_dot))
}

/// Right-hand side of the boundary curvature ODE:
/// `eps_dot = -(B eps + P - beta (theta_ghost - theta_c)) / nu`.
pub fn boundary_eps_rhs(eps: f64, pi_value: f64, theta_ghost: f64, params: &PhysicalParams) -> f64 {
    -(params.hardening * eps + pi_value
        - params.thermal_bending * (theta_ghost - params.melting_temp))
        / params.viscosity
}

/// Dissipation convolution `(1/n) sum_{j=1}^{n-1} lambda_{j-k} D_j` at node `k`.
///
/// `lambda_offsets` holds `lambda(i/n)` for `i = -n..=n`, centered at index `n`.
pub fn convolution_d(
    d_values: &[f64],
    lambda_offsets: &[f64],
    grid: &Grid,
    k: usize,
) -> Result<f64> {
    let n = grid.n;
    assert_eq!(d_values.len(), n - 1);
    assert_eq!(lambda_offsets.len(), 2 * n + 1);
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let mut acc = 0.0;
    for j in 1..n {
        let dj = d_values[j - 1];
        if dj < 0.0 {
            return Err(Error::ConstraintViolation(format!(
                "dissipation D_{j} = {dj} is negative"
            )));
        }
        acc += lambda_offsets[j + n - k] * dj;
    }
    Ok(acc / n as f64)
}

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
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

/// Cell average `n int_{(k-1)/n}^{k/n} fn(x) dx` by a 5-point Gauss rule,
/// exact for polynomials up to degree 9.
pub fn cell_average<F: Fn(f64) -> f64>(f: F, k: usize, n: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let a = (k - 1) as f64 / n as f64;
    let b = k as f64 / n as f64;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..5 {
        let v = f(mid + half * GAUSS_X[i]);
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "non-finite value at x = {}",
                mid + half * GAUSS_X[i]
            )));
        }
        acc += GAUSS_W[i] * v;
    }
    // n * (b - a) = 1, so the average is half the weighted sum.
    Ok(0.5 * acc)
}

/// Cell-averaged heat source `g_k(theta, t)`; the `theta < 0` branch falls
/// back to the zero-temperature value.
pub fn source_g<G: Fn(f64, f64, f64) -> f64>(
    g: G,
    theta: f64,
    k: usize,
    n: usize,
    t: f64,
) -> Result<f64> {
    let th = if theta >= 0.0 { theta } else { 0.0 };
    cell_average(|x| g(th, x, t), k, n)
}

/// Absolute defect of the summation-by-parts identity for two node vectors.
pub fn summation_by_parts_check(xi: &[f64], eta: &[f64]) -> f64 {
    assert_eq!(xi.len(), eta.len());
    let n = xi.len() - 1;
    let mut lhs = 0.0;
    for k in 1..n {
        lhs += xi[k] * (eta[k + 1] - 2.0 * eta[k] + eta[k - 1]);
    }
    for k in 1..=n {
        lhs += (xi[k] - xi[k - 1]) * (eta[k] - eta[k - 1]);
    }
    let rhs = xi[n] * (eta[n] - eta[n - 1]) - xi[0] * (eta[1] - eta[0]);
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_cases() {
        let n = 4;
        let linear: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        for k in 1..n {
            assert_eq!(second_difference(&linear, k, n).unwrap(), 0.0);
        }
        let v = vec![0.0, 1.0, 0.0];
        assert_eq!(second_difference(&v, 1, 2).unwrap(), -8.0);
        let quad: Vec<f64> = (0..=n).map(|k| (k as f64 / n as f64).powi(2)).collect();
        for k in 1..n {
            assert!((second_difference(&quad, k, n).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(second_difference(&v, 0, 2).is_err());
    }

    #[test]
    fn velocity_system_small_case() {
        let grid = Grid::new(2).unwrap();
        let sys = assemble_velocity_system(&PhysicalParams::unit(), &grid);
        assert_eq!(sys.diag, vec![9.0]);
        assert!(sys.lower.is_empty());
    }

    #[test]
    fn velocity_system_symmetric_and_dominant() {
        let grid = Grid::new(8).unwrap();
        let p = PhysicalParams::unit();
        let sys = assemble_velocity_system(&p, &grid);
        assert_eq!(sys.lower, sys.upper);
        // Gershgorin: every eigenvalue at least rho.
        for i in 0..sys.len() {
            let mut off = 0.0;
            if i > 0 {
                off += sys.lower[i - 1].abs();
            }
            if i + 1 < sys.len() {
                off += sys.upper[i].abs();
            }
            assert!(sys.diag[i] - off >= p.mass_density);
        }
    }

    #[test]
    fn tridiagonal_identity_and_hand_case() {
        let id = Tridiagonal { lower: vec![0.0; 3], diag: vec![1.0; 4], upper: vec![0.0; 3] };
        let rhs = vec![3.0, -1.0, 0.5, 2.0];
        assert_eq!(id.solve(&rhs).unwrap(), rhs);

        let sys = Tridiagonal { lower: vec![], diag: vec![9.0], upper: vec![] };
        assert_eq!(sys.solve(&[9.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn tridiagonal_residual_on_random_spd() {
        // deterministic LCG; diagonally dominant SPD
        let mut s: u64 = 0x9e3779b97f4a7c15;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let m = 50;
        let off: Vec<f64> = (0..m - 1).map(|_| -next()).collect();
        let diag: Vec<f64> = (0..m).map(|i| {
            let mut d = 0.1 + next();
            if i > 0 {
                d += off[i - 1].abs();
            }
            if i < m - 1 {
                d += off[i].abs();
            }
            d
        }).collect();
        let sys = Tridiagonal { lower: off.clone(), diag, upper: off };
        let rhs: Vec<f64> = (0..m).map(|_| next() - 0.5).collect();
        let x = sys.solve(&rhs).unwrap();
        let back = sys.multiply(&x);
        let scale = rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let res = back.iter().zip(&rhs).fold(0.0f64, |a, (&p, &q)| a.max((p - q).abs()));
        assert!(res <= 1e-10 * scale);
    }

    #[test]
    fn velocity_solve_rest_state() {
        let grid = Grid::new(8).unwrap();
        let u = vec![0.0; 9];
        let f = vec![0.0; 7];
        let (w_dot, eps_dot) = velocity_solve(&u, &PhysicalParams::unit(), &grid, &f).unwrap();
        assert!(w_dot.iter().all(|&v| v == 0.0));
        assert!(eps_dot.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn velocity_solve_hand_case() {
        let grid = Grid::new(2).unwrap();
        let u = vec![0.0, 1.0, 0.0];
        let f = vec![1.0];
        let (w_dot, eps_dot) = velocity_solve(&u, &PhysicalParams::unit(), &grid, &f).unwrap();
        assert!((w_dot[1] - 1.0).abs() < 1e-14);
        assert!((eps_dot[1] - (-8.0)).abs() < 1e-13);
    }

    // Manufactured solution with distinct frequencies so the discretization
    // errors of the two Laplacians cannot cancel: w_dot = sin(2 pi x),
    // u = sin(pi x), hence f = (rho + 4 pi^2 alpha) sin(2 pi x)
    // - pi^2 sin(pi x). Nodal error converges at second order.
    #[test]
    fn velocity_solve_manufactured_convergence() {
        let p = PhysicalParams::unit();
        let pi = std::f64::consts::PI;
        let err = |n: usize| -> f64 {
            let grid = Grid::new(n).unwrap();
            let u: Vec<f64> = (0..=n).map(|k| (pi * k as f64 / n as f64).sin()).collect();
            let f: Vec<f64> = (1..n)
                .map(|k| {
                    let x = k as f64 / n as f64;
                    (1.0 + 4.0 * pi * pi) * (2.0 * pi * x).sin() - pi * pi * (pi * x).sin()
                })
                .collect();
            let (w_dot, _) = velocity_solve(&u, &p, &grid, &f).unwrap();
            (0..=n)
                .map(|k| (w_dot[k] - (2.0 * pi * k as f64 / n as f64).sin()).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(16) / err(32);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn spd_dense_matches_thomas_on_tridiagonal() {
        let grid = Grid::new(8).unwrap();
        let p = PhysicalParams::unit();
        let tri = assemble_velocity_system(&p, &grid);
        let m = tri.len();
        let mut dense = vec![vec![0.0; m]; m];
        for i in 0..m {
            dense[i][i] = tri.diag[i];
            if i + 1 < m {
                dense[i][i + 1] = tri.upper[i];
                dense[i + 1][i] = tri.lower[i];
            }
        }
        let rhs: Vec<f64> = (0..m).map(|i| (i as f64 * 0.7 - 1.3).sin()).collect();
        let a = spd_solve_dense(&dense, &rhs).unwrap();
        let b = tri.solve(&rhs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_dense_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(spd_solve_dense(&a, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn moment_system_hand_case() {
        // n = 2: a single interior node, S = [8], S^2 = [64]
        let grid = Grid::new(2).unwrap();
        let p = PhysicalParams::unit();
        let a = assemble_moment_system(&p, &grid, 0.5);
        assert_eq!(a, vec![vec![1.0 + 8.0 + 32.0]]);
    }

    #[test]
    fn moment_system_is_symmetric_and_solvable() {
        let grid = Grid::new(16).unwrap();
        let p = PhysicalParams::unit();
        let a = assemble_moment_system(&p, &grid, 1e-3);
        let m = a.len();
        for i in 0..m {
            for j in 0..m {
                assert_eq!(a[i][j], a[j][i]);
                if j + 2 < i || i + 2 < j {
                    assert_eq!(a[i][j], 0.0, "bandwidth exceeded at ({i}, {j})");
                }
            }
        }
        let rhs = vec![1.0; m];
        let x = spd_solve_dense(&a, &rhs).unwrap();
        // residual check
        for i in 0..m {
            let mut back = 0.0;
            for j in 0..m {
                back += a[i][j] * x[j];
            }
            assert!((back - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_hand_case() {
        let grid = Grid::new(4).unwrap();
        let n = grid.n;
        let mut lambda = vec![0.0; 2 * n + 1];
        lambda[n - 1] = 0.25;
        lambda[n] = 0.5;
        lambda[n + 1] = 0.25;
        let d = vec![1.0, 1.0, 1.0];
        let v = convolution_d(&d, &lambda, &grid, 2).unwrap();
        assert!((v - 0.25).abs() < 1e-15);

        assert_eq!(convolution_d(&[0.0; 3], &lambda, &grid, 1).unwrap(), 0.0);
        assert!(convolution_d(&[-1.0, 0.0, 0.0], &lambda, &grid, 1).is_err());
    }

    #[test]
    fn cell_average_cases() {
        assert!((cell_average(|_| 1.0, 3, 8).unwrap() - 1.0).abs() < 1e-15);
        assert!((cell_average(|x| x, 1, 2).unwrap() - 0.25).abs() < 1e-15);
        // degree 9 integrated exactly: n int_0^{1/2} x^9 dx = 2 / (10 * 2^10)
        let exact = 2.0 / (10.0 * 1024.0);
        assert!((cell_average(|x| x.powi(9), 1, 2).unwrap() - exact).abs() < 1e-15);
        assert!(cell_average(|x| 1.0 / x, 1, 2).is_ok());
        assert!(cell_average(|_| f64::NAN, 1, 2).is_err());
    }

    #[test]
    fn source_branches() {
        let zero = |_: f64, _: f64, _: f64| 0.0;
        assert_eq!(source_g(zero, 1.0, 1, 2, 0.0).unwrap(), 0.0);

        let g = |th: f64, _: f64, _: f64| 1.0 + th / (1.0 + th);
        assert!((source_g(g, -3.0, 1, 2, 0.0).unwrap() - 1.0).abs() < 1e-15);

        let pi = std::f64::consts::PI;
        let g2 = |_: f64, x: f64, _: f64| (pi * x).sin().max(0.0);
        let v = source_g(g2, 0.5, 1, 2, 0.0).unwrap();
        assert!((v - 2.0 / pi).abs() < 1e-10, "{v}");
    }

    #[test]
    fn summation_by_parts_cases() {
        assert_eq!(summation_by_parts_check(&[1.0, 2.0, 3.0], &[0.0, 1.0, 4.0]), 0.0);
        let eta = vec![2.5; 6];
        let xi = vec![1.0, -3.0, 2.0, 0.5, 7.0, -1.0];
        assert_eq!(summation_by_parts_check(&xi, &eta), 0.0);

        let mut s: u64 = 42;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a: Vec<f64> = (0..100).map(|_| next() * 10.0).collect();
        let b: Vec<f64> = (0..100).map(|_| next() * 10.0).collect();
        let scale = a.iter().chain(&b).fold(1.0f64, |m, &v| m.max(v.abs()));
        assert!(summation_by_parts_check(&a, &b) <= 1e-12 * scale * scale);
    }
}
