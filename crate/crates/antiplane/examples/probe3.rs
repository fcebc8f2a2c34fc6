use antiplane::*;

fn main() {
    let opts = solver::SolverOptions::default();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();

    // criterion 8 probe: two-core at L=96, window 240
    let t0 = std::time::Instant::now();
    let window = build_ball(240.0).unwrap();
    println!("window 240: {} sites ({:?})", window.n_sites(), t0.elapsed());
    let config = predictor::separated_pair_config(96.0).unwrap();
    let z = assemble_predictor_infinite(&window, &config, &core, &core_complex, None).unwrap();
    let wmodel = EnergyModel::new(&window, model.potential);
    let t1 = std::time::Instant::now();
    let report = newton_correct(&wmodel, &z, 1e-8, 50, &opts).unwrap();
    println!(
        "two-core L=96: iters {} dw {:.3e} lambda_min {:.6} cores {:?} ({:?})",
        report.newton_iters, report.dw_norm, report.lambda_min,
        report.cores.len(), t1.elapsed()
    );
    println!("residual history {:?}", report.residual_history);

    // criterion 10 probe: dipole distance 60 on window 240
    let plus = Cell::origin();
    let minus = Cell::new(Site::new(60, -1), Orientation::Down);
    let config = DislocationConfig::new(vec![(plus, 1), (minus, -1)]).unwrap();
    let z = assemble_predictor_infinite(&window, &config, &core, &core_complex, None).unwrap();
    let t1 = std::time::Instant::now();
    let report = newton_correct(&wmodel, &z, 1e-8, 50, &opts).unwrap();
    println!(
        "dipole d=60: iters {} dw {:.3e} lambda_min {:.6} cores {} ({:?})",
        report.newton_iters, report.dw_norm, report.lambda_min,
        report.cores.len(), t1.elapsed()
    );
    let mut y = z.clone();
    y.add_scaled(1.0, &report.w);
    let t1 = std::time::Instant::now();
    let cert = certify(&wmodel, &y, 0.05, 10, 42, &opts).unwrap();
    println!("certify: {:?} probe_min {:.3e} ({:?})", cert.verdict, cert.probe_energy_min, t1.elapsed());
    let wit = global_instability_witness(&wmodel, &y).unwrap();
    println!(
        "witness: gap {:.6} tail {:.3e} degenerate {} pairs {}",
        wit.energy_gap, wit.tail_bound, wit.degenerate, wit.pairs.len()
    );
}
