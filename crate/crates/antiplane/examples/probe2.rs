use antiplane::*;

fn main() {
    let opts = solver::SolverOptions::default();
    let t0 = std::time::Instant::now();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();
    println!("core ready ({:?})", t0.elapsed());

    // L-sweep probe
    let t0 = std::time::Instant::now();
    let spec = SweepSpec::new(SweepParameter::Separation, vec![24.0, 48.0, 96.0]);
    let table = residual_decay_data(&spec, model.potential, &core, &core_complex, &opts).unwrap();
    for row in &table.rows {
        println!(
            "  {}: measured {:.2} residual {:?} err {:?}",
            row.case_id, row.measured, row.residual, row.error
        );
    }
    println!("L-sweep slope {:?} ({:?})", table.residual_slope, t0.elapsed());

    // S-sweep probe
    let t0 = std::time::Instant::now();
    let spec = SweepSpec::new(SweepParameter::BoundaryDistance, vec![16.0, 32.0, 64.0]);
    let table = residual_decay_data(&spec, model.potential, &core, &core_complex, &opts).unwrap();
    for row in &table.rows {
        println!(
            "  {}: measured {:.2} residual {:?} dw {:?} lambda {:?} err {:?}",
            row.case_id, row.measured, row.residual, row.dw_norm, row.lambda_min, row.error
        );
    }
    println!(
        "S-sweep residual slope {:?} dw slope {:?} ({:?})",
        table.residual_slope, table.dw_slope, t0.elapsed()
    );
}
