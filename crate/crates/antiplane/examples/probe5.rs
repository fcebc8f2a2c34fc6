use antiplane::*;
use antiplane::energy::apply_weighted_laplacian;
use antiplane::solver::SolveSpace;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn main() {
    let opts = solver::SolverOptions::default();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();

    let window = build_ball(80.0).unwrap();
    let cfg = DislocationConfig::new(vec![
        (Cell::origin(), 1),
        (Cell::new(Site::new(20, -1), Orientation::Down), -1),
    ]).unwrap();
    let z = assemble_predictor_infinite(&window, &cfg, &core, &core_complex, None).unwrap();
    let wmodel = EnergyModel::new(&window, model.potential);
    let space = SolveSpace::for_complex(&window);
    let weights = wmodel.hessian_weights(&z).unwrap();
    println!("weights range: [{:.4}, {:.4}]",
        weights.iter().cloned().fold(f64::INFINITY, f64::min),
        weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let grad = wmodel.gradient(&z).unwrap();
    let mut b: Vec<f64> = grad.values().iter().map(|v| -v).collect();
    space.project(&mut b);
    let n = window.n_sites();
    let apply = |x: &[f64], out: &mut [f64]| {
        apply_weighted_laplacian(&window, &weights, x, out);
        let mut o = out.to_vec();
        space.project(&mut o);
        out.copy_from_slice(&o);
    };
    // manual CG with logging
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let bnorm = dot(&b, &b).sqrt();
    let mut rho = dot(&r, &r);
    println!("bnorm {:.3e}", bnorm);
    for it in 0..200000 {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        // true quadratic form value sum w (Dp)^2
        if pap <= 0.0 || it % 2000 == 0 {
            let mut quad = 0.0;
            for k in 0..window.n_bonds() {
                let (t, h) = window.bond_sites(k);
                let d = p[h] - p[t];
                quad += weights[k] * d * d;
            }
            println!("it {it}: pap {pap:.6e} quad {quad:.6e} |p| {:.3e} res {:.3e}",
                dot(&p, &p).sqrt(), rho.sqrt() / bnorm);
            if pap <= 0.0 { println!("NEGATIVE at iteration {it}"); return; }
        }
        let alpha = rho / pap;
        for i in 0..n { x[i] += alpha * p[i]; r[i] -= alpha * ap[i]; }
        let rho_new = dot(&r, &r);
        if rho_new.sqrt() <= 1e-8 * bnorm { println!("converged at {it}"); return; }
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n { p[i] = r[i] + beta * p[i]; }
    }
    println!("budget exhausted, res {:.3e}", rho.sqrt() / bnorm);
}
