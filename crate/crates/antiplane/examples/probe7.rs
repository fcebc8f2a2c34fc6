use antiplane::*;

fn main() {
    let opts = solver::SolverOptions::default();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();

    for (name, window_r, cfg) in [
        ("dipole d=20", 80.0, DislocationConfig::new(vec![
            (Cell::origin(), 1),
            (Cell::new(Site::new(20, -1), Orientation::Down), -1),
        ]).unwrap()),
        ("pair L=32", 128.0, predictor::separated_pair_config(32.0).unwrap()),
        ("pair L=48", 192.0, predictor::separated_pair_config(48.0).unwrap()),
        ("dipole d=40", 160.0, DislocationConfig::new(vec![
            (Cell::origin(), 1),
            (Cell::new(Site::new(40, -1), Orientation::Down), -1),
        ]).unwrap()),
    ] {
        let window = build_ball(window_r).unwrap();
        let wmodel = EnergyModel::new(&window, model.potential);
        let z = assemble_predictor_infinite(&window, &cfg, &core, &core_complex, None).unwrap();
        // robust energy minimization from the predictor
        match solver::minimize_from(&wmodel, &z, 1e-8, 300, &opts) {
            Ok((u, iters, res)) => {
                let mut y = z.clone();
                y.add_scaled(1.0, &u);
                let alpha = bond_length_form(&window, &y);
                let cores = detect_cores(&window, &alpha).unwrap();
                let lam = min_eigenvalue(&wmodel, &y, 1e-6, &opts);
                let pretty: Vec<String> = cores.iter()
                    .map(|(c, s)| format!("({},{},{:?}):{:+}", c.anchor.m, c.anchor.n, c.orientation, s))
                    .collect();
                println!("{name}: iters {iters} res {res:.2e} cores [{}] lambda {lam:?}", pretty.join(" "));
            }
            Err(e) => println!("{name}: minimize ERR {e}"),
        }
    }
}
