use antiplane::*;

fn main() {
    let opts = solver::SolverOptions::default();
    for radius in [16.0, 32.0, 64.0] {
        let t0 = std::time::Instant::now();
        let complex = build_ball(radius).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();
        println!(
            "window {radius}: sites {} lambda_d {:.6} decay {:.3} prefactor {:.3} residual {:.2e} iters {} ({:?})",
            complex.n_sites(),
            core.lambda_d,
            core.decay.exponent,
            core.decay.prefactor,
            core.residual,
            core.newton_iters,
            t0.elapsed()
        );
    }
}
