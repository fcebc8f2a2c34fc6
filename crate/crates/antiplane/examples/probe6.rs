use antiplane::*;
use antiplane::energy::apply_weighted_laplacian;
use antiplane::solver::SolveSpace;

fn dot(a: &[f64], b: &[f64]) -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() }

fn cg(apply: &dyn Fn(&[f64], &mut [f64]), b: &[f64], tol: f64) -> (Vec<f64>, bool, usize) {
    let n = b.len();
    let (mut x, mut r) = (vec![0.0; n], b.to_vec());
    let bnorm = dot(b, b).sqrt();
    let mut rho = dot(&r, &r);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for it in 0..500000 {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 { return (x, true, it); }
        let alpha = rho / pap;
        for i in 0..n { x[i] += alpha * p[i]; r[i] -= alpha * ap[i]; }
        let rho2 = dot(&r, &r);
        if rho2.sqrt() <= tol * bnorm { return (x, false, it); }
        let beta = rho2 / rho;
        rho = rho2;
        for i in 0..n { p[i] = r[i] + beta * p[i]; }
    }
    (x, false, 500000)
}

fn main() {
    let opts = solver::SolverOptions::default();
    let core_complex = build_ball(32.0).unwrap();
    let model = EnergyModel::new(&core_complex, make_psi_cos(1.0).unwrap());
    let core = compute_core_corrector(&model, 1e-9, &opts).unwrap();

    let window = build_ball(160.0).unwrap();
    let cfg = DislocationConfig::new(vec![
        (Cell::new(Site::new(-36, -1), Orientation::Down), 1),
        (Cell::origin(), 1),
        (Cell::new(Site::new(36, -1), Orientation::Down), -1),
    ]).unwrap();
    let z = assemble_predictor_infinite(&window, &cfg, &core, &core_complex, None).unwrap();
    let wmodel = EnergyModel::new(&window, model.potential);
    let space = SolveSpace::for_complex(&window);
    let n = window.n_sites();

    let mut y = z.clone();
    for newton_it in 0..6 {
        let grad = wmodel.gradient(&y).unwrap();
        let mut g = grad.values().to_vec();
        space.project(&mut g);
        let res = dual_norm(&wmodel, &grad, &opts).unwrap();
        let weights = wmodel.hessian_weights(&y).unwrap();
        let wmin = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        let neg = weights.iter().filter(|&&w| w < 0.0).count();
        println!("it {newton_it}: dual res {res:.4e} |g| {:.3e} wmin {wmin:.3} neg-bonds {neg}", dot(&g,&g).sqrt());
        if res < 1e-8 { break; }
        let apply = |x: &[f64], out: &mut [f64]| {
            apply_weighted_laplacian(&window, &weights, x, out);
            let mut o = out.to_vec(); space.project(&mut o); out.copy_from_slice(&o);
        };
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let (d, indef, iters) = cg(&apply, &rhs, 1e-8);
        let dd = forms::finite_difference(&window, &Displacement::from_values(d.clone()));
        println!("   direction: indef {indef} cg_iters {iters} |Dd|_inf {:.4} |Dd|_2 {:.4}", dd.norm_inf(), dd.norm_l2());
        if indef { println!("   FIRST SOLVE INDEFINITE"); break; }
        let step = (0.125 / dd.norm_inf()).min(1.0);
        let mut y2 = y.clone();
        for (i, v) in y2.values_mut().iter_mut().enumerate() { *v += step * d[i]; }
        let res2 = dual_norm(&wmodel, &wmodel.gradient(&y2).unwrap(), &opts).unwrap();
        println!("   step {step:.3}: new res {res2:.4e}");
        y = y2;
    }
}
