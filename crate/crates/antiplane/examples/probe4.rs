use antiplane::*;

fn main() {
    let opts = solver::SolverOptions::default();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();

    for (name, window_r, cfg) in [
        ("dipole d=20 ball 80", 80.0, DislocationConfig::new(vec![
            (Cell::origin(), 1),
            (Cell::new(Site::new(20, -1), Orientation::Down), -1),
        ]).unwrap()),
        ("dipole d=28 ball 100", 100.0, DislocationConfig::new(vec![
            (Cell::origin(), 1),
            (Cell::new(Site::new(28, -1), Orientation::Down), -1),
        ]).unwrap()),
        ("pair L=32 ball 128", 128.0, predictor::separated_pair_config(32.0).unwrap()),
        ("triple ball 160", 160.0, DislocationConfig::new(vec![
            (Cell::new(Site::new(-36, -1), Orientation::Down), 1),
            (Cell::origin(), 1),
            (Cell::new(Site::new(36, -1), Orientation::Down), -1),
        ]).unwrap()),
    ] {
        let window = build_ball(window_r).unwrap();
        let wmodel = EnergyModel::new(&window, model.potential);
        let z = assemble_predictor_infinite(&window, &cfg, &core, &core_complex, None).unwrap();
        let t0 = std::time::Instant::now();
        match newton_correct(&wmodel, &z, 1e-8, 50, &opts) {
            Ok(rep) => println!(
                "{name}: OK iters {} lambda {:.5} cores {} ({:?})",
                rep.newton_iters, rep.lambda_min, rep.cores.len(), t0.elapsed()
            ),
            Err(e) => {
                let lam = min_eigenvalue(&wmodel, &z, 1e-6, &opts);
                println!("{name}: ERR {e} (predictor lambda: {lam:?})");
            }
        }
    }
}
