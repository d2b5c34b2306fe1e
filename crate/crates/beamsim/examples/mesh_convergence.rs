//! Mesh-refinement study: the piecewise-quadratic interpolant distance of
//! the displacement field between consecutive resolutions shrinks, and the
//! time-integrated Neumann boundary defect of the temperature decreases.
//!
//! Run with: cargo run --example mesh_convergence

use beamsim::diagnostics::{convergence_metric, neumann_boundary_defect, InterpolantKind};
use beamsim::integrator::run;
use beamsim::output::{field_matrix, FieldKind};

fn main() -> beamsim::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.toml");
    let base = beamsim::load_config(&path)?;
    let grids = [8usize, 16, 32];

    let mut runs = Vec::new();
    for &n in &grids {
        let mut raw = base.raw.clone();
        raw.grid.n = n;
        runs.push(run(&raw.validate()?)?);
    }

    let cadence = base.raw.time.snapshot_interval;
    println!("n_coarse,n_fine,w_metric,neumann_defect_coarse");
    let mut metrics = Vec::new();
    let mut defects = Vec::new();
    for i in 0..runs.len() - 1 {
        let metric = convergence_metric(
            &field_matrix(&runs[i], FieldKind::W),
            &field_matrix(&runs[i + 1], FieldKind::W),
            InterpolantKind::PiecewiseQuadratic,
        )?;
        let defect = neumann_boundary_defect(&field_matrix(&runs[i], FieldKind::Theta), cadence);
        println!("{},{},{metric:e},{defect:e}", grids[i], grids[i + 1]);
        metrics.push(metric);
        defects.push(defect);
    }
    defects.push(neumann_boundary_defect(
        &field_matrix(runs.last().unwrap(), FieldKind::Theta),
        cadence,
    ));
    println!("# neumann defect at n = {}: {:e}", grids[2], defects[2]);

    assert!(metrics[1] < metrics[0], "interpolant distance did not shrink");
    assert!(defects[1] < defects[0] && defects[2] < defects[1], "Neumann defect did not shrink");
    Ok(())
}
