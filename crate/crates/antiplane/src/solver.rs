//! Dual-norm evaluation, Newton correction, stability spectrum estimation
//! and global-instability witnesses.
//!
//! Ball windows emulate the full lattice: perturbations are clamped to zero
//! on the window rim. Polygon windows use the natural free boundary with
//! the anchor site pinned to remove the constant mode. All solves are
//! matrix-free conjugate-gradient iterations on the projected operators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elasticity::dipole_field;
use crate::energy::{apply_weighted_laplacian, EnergyModel};
use crate::error::{Error, Result};
use crate::forms::{
    bond_length_form, detect_cores, finite_difference, Displacement,
};
use crate::lattice::{Cell, LatticeComplex, Orientation};
use crate::linalg::{conjugate_gradient, dot, KahanSum};

/// Iteration controls shared by the solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// relative tolerance of the Riesz-map conjugate-gradient solves
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// relative tolerance of inner Newton/eigen solves
    pub inner_cg_tol: f64,
    /// relative Rayleigh-quotient tolerance of the eigenvalue iteration
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub armijo_c: f64,
    pub max_backtracks: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cg_tol: 1e-10,
            cg_max_iter: 500_000,
            inner_cg_tol: 1e-8,
            eigen_tol: 1e-6,
            eigen_max_iter: 600,
            armijo_c: 1e-4,
            max_backtracks: 40,
        }
    }
}

/// Largest admissible change of any bond difference in one damped step.
/// The potential's curvature flips sign a quarter period out, so capping
/// steps at an eighth keeps iterates from tunnelling through the barrier.
const MAX_BOND_STEP: f64 = 0.125;

fn capped_initial_step(complex: &LatticeComplex, direction: &[f64]) -> f64 {
    let mut d_inf = 0.0f64;
    for k in 0..complex.n_bonds() {
        let (t, h) = complex.bond_sites(k);
        d_inf = d_inf.max((direction[h] - direction[t]).abs());
    }
    if d_inf <= MAX_BOND_STEP {
        1.0
    } else {
        MAX_BOND_STEP / d_inf
    }
}

/// The space of admissible perturbations for a window.
#[derive(Debug, Clone)]
pub struct SolveSpace {
    free: Vec<bool>,
    n_free: usize,
}

impl SolveSpace {
    pub fn for_complex(complex: &LatticeComplex) -> SolveSpace {
        let free: Vec<bool> = if complex.is_ball() {
            (0..complex.n_sites())
                .map(|i| !complex.is_boundary_site(i))
                .collect()
        } else {
            let anchor = complex.anchor_index();
            (0..complex.n_sites()).map(|i| i != anchor).collect()
        };
        let n_free = free.iter().filter(|&&f| f).count();
        SolveSpace { free, n_free }
    }

    pub fn project(&self, v: &mut [f64]) {
        for (x, &f) in v.iter_mut().zip(self.free.iter()) {
            if !f {
                *x = 0.0;
            }
        }
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.free[i]
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }
}

fn projected_apply<'a>(
    complex: &'a LatticeComplex,
    weights: &'a [f64],
    space: &'a SolveSpace,
) -> impl Fn(&[f64], &mut [f64]) + 'a {
    move |x: &[f64], out: &mut [f64]| {
        apply_weighted_laplacian(complex, weights, x, out);
        for (o, &f) in out.iter_mut().zip(space.free.iter()) {
            if !f {
                *o = 0.0;
            }
        }
    }
}

/// Riesz representative of a per-site residual: solves the bond-graph
/// Laplacian system on the admissible space.
fn riesz_representative(
    complex: &LatticeComplex,
    space: &SolveSpace,
    residual: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let unit = vec![1.0; complex.n_bonds()];
    let mut rhs = residual.to_vec();
    space.project(&mut rhs);
    let mut v = vec![0.0; complex.n_sites()];
    conjugate_gradient(
        projected_apply(complex, &unit, space),
        &rhs,
        &mut v,
        opts.cg_tol,
        opts.cg_max_iter,
    )?;
    Ok(v)
}

/// Dual (negative) norm of a residual: `sup <residual, v> / ||Dv||_2`,
/// computed through the Riesz map `L v = residual`.
pub fn dual_norm(model: &EnergyModel, residual: &Displacement, opts: &SolverOptions) -> Result<f64> {
    let space = SolveSpace::for_complex(model.complex);
    dual_norm_in_space(model.complex, &space, residual.values(), opts)
}

fn dual_norm_in_space(
    complex: &LatticeComplex,
    space: &SolveSpace,
    residual: &[f64],
    opts: &SolverOptions,
) -> Result<f64> {
    let mut rhs = residual.to_vec();
    space.project(&mut rhs);
    if rhs.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let v = riesz_representative(complex, space, &rhs, opts)?;
    Ok(dot(&rhs, &v).max(0.0).sqrt())
}

/// Conjugate gradients for a Newton step that tolerates indefiniteness:
/// on a direction of nonpositive curvature it stops and returns the current
/// iterate (or the right-hand side on the first step), which is still a
/// descent direction.
fn cg_newton_direction(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, bool) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut rho = dot(&r, &r);
    if rho.sqrt() <= tol * bnorm {
        return (x, false);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for iter in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            if std::env::var_os("ANTIPLANE_CG_DEBUG").is_some() {
                eprintln!(
                    "cg_newton_direction: pap {pap:.6e} at iter {iter}, |p| {:.3e}, res {:.3e}, bnorm {bnorm:.3e}",
                    dot(&p, &p).sqrt(),
                    rho.sqrt()
                );
            }
            if x.iter().all(|&v| v == 0.0) {
                return (b.to_vec(), true);
            }
            return (x, true);
        }
        let alpha = rho / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rho_new = dot(&r, &r);
        if rho_new.sqrt() <= tol * bnorm {
            return (x, false);
        }
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    (x, false)
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct CoreRecord {
    pub m: i64,
    pub n: i64,
    pub orientation: Orientation,
    pub sign: i8,
}

impl CoreRecord {
    pub fn from_core(cell: Cell, sign: i8) -> CoreRecord {
        CoreRecord {
            m: cell.anchor.m,
            n: cell.anchor.n,
            orientation: cell.orientation,
            sign,
        }
    }

    pub fn cell(&self) -> Cell {
        Cell::new(crate::lattice::Site::new(self.m, self.n), self.orientation)
    }
}

/// Outcome of a Newton correction.
#[derive(Debug, Serialize)]
pub struct EquilibriumReport {
    #[serde(skip)]
    pub w: Displacement,
    pub dw_norm: f64,
    pub residual_initial: f64,
    pub residual_final: f64,
    pub lambda_min: f64,
    pub cores: Vec<CoreRecord>,
    pub newton_iters: usize,
    /// dual residual after each iteration, for convergence diagnostics
    pub residual_history: Vec<f64>,
    /// Hessian Lipschitz bound `sup |psi'''|` used in the quadratic-tail check
    pub hessian_lipschitz: f64,
}

/// Damped Newton correction of an approximate equilibrium: iterates
/// `w <- w - (d2E(z+w))^-1 dE(z+w)` with backtracking on the dual residual
/// norm, then measures the stability eigenvalue at the corrected state.
pub fn newton_correct(
    model: &EnergyModel,
    z: &Displacement,
    tol: f64,
    max_iters: usize,
    opts: &SolverOptions,
) -> Result<EquilibriumReport> {
    if !model.potential.is_smooth() {
        return Err(Error::NondifferentiablePoint { value: 0.5 });
    }
    let complex = model.complex;
    let space = SolveSpace::for_complex(complex);
    let mut w = Displacement::zeros(complex);
    let mut y = z.clone();

    let grad = model.gradient(&y)?;
    let mut res = dual_norm_in_space(complex, &space, grad.values(), opts)?;
    let residual_initial = res;
    let mut history = vec![res];
    let mut iters = 0usize;
    let mut grad_vec = {
        let mut g = grad.values().to_vec();
        space.project(&mut g);
        g
    };

    while res > tol {
        if iters >= max_iters {
            return Err(Error::NoConvergence(format!(
                "newton: dual residual {res:.3e} after {iters} iterations (target {tol:.3e})"
            )));
        }
        let weights = model.hessian_weights(&y)?;
        let mut rhs = grad_vec.clone();
        for v in &mut rhs {
            *v = -*v;
        }
        let apply = projected_apply(complex, &weights, &space);
        let (direction, indefinite) =
            cg_newton_direction(&apply, &rhs, opts.inner_cg_tol, opts.cg_max_iter);
        if indefinite {
            return Err(Error::LeftStabilityBasin);
        }

        // backtracking on the dual residual norm, starting from a step
        // that keeps every bond difference inside the curvature basin;
        // steps must also descend in energy so iterates cannot ride a soft
        // mode over a ridge while the residual still shrinks
        let energy_slope = dot(&grad_vec, &direction);
        let mut step = capped_initial_step(complex, &direction);
        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let mut y_trial = y.clone();
            for (i, v) in y_trial.values_mut().iter_mut().enumerate() {
                *v += step * direction[i];
            }
            let de = model.energy_difference(&y_trial, &y);
            if de > opts.armijo_c * step * energy_slope {
                step *= 0.5;
                continue;
            }
            let g_trial = model.gradient(&y_trial)?;
            let res_trial = dual_norm_in_space(complex, &space, g_trial.values(), opts)?;
            if res_trial <= (1.0 - opts.armijo_c * step) * res {
                for (i, v) in w.values_mut().iter_mut().enumerate() {
                    *v += step * direction[i];
                }
                y = y_trial;
                let mut g = g_trial.values().to_vec();
                space.project(&mut g);
                grad_vec = g;
                res = res_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(
                "newton: residual line search stalled".into(),
            ));
        }
        iters += 1;
        history.push(res);
    }

    let lambda_min = min_eigenvalue(model, &y, opts.eigen_tol, opts)?;
    let alpha = bond_length_form(complex, &y);
    let cores = detect_cores(complex, &alpha)?
        .into_iter()
        .map(|(c, s)| CoreRecord::from_core(c, s))
        .collect();
    let dw_norm = finite_difference(complex, &w).norm_l2();
    Ok(EquilibriumReport {
        w,
        dw_norm,
        residual_initial,
        residual_final: res,
        lambda_min,
        cores,
        newton_iters: iters,
        residual_history: history,
        hessian_lipschitz: model.potential.max_psi3(),
    })
}

/// Energy minimization from a fixed base state: used for the core corrector
/// where the initial Hessian may be indefinite. Falls back to a descent
/// direction when the Newton system loses positivity and backtracks on the
/// energy.
pub fn minimize_from(
    model: &EnergyModel,
    base: &Displacement,
    tol: f64,
    max_iters: usize,
    opts: &SolverOptions,
) -> Result<(Displacement, usize, f64)> {
    let complex = model.complex;
    let space = SolveSpace::for_complex(complex);
    let mut u = Displacement::zeros(complex);
    let mut y = base.clone();

    for iter in 0..=max_iters {
        let grad = model.gradient(&y)?;
        let mut g = grad.values().to_vec();
        space.project(&mut g);
        let res = dual_norm_in_space(complex, &space, &g, opts)?;
        if res <= tol {
            return Ok((u, iter, res));
        }
        if iter == max_iters {
            return Err(Error::NoStableCore(format!(
                "dual residual {res:.3e} after {max_iters} iterations (target {tol:.3e})"
            )));
        }
        let weights = model.hessian_weights(&y)?;
        let mut rhs = g.clone();
        for v in &mut rhs {
            *v = -*v;
        }
        let apply = projected_apply(complex, &weights, &space);
        let (direction, _indefinite) =
            cg_newton_direction(&apply, &rhs, opts.inner_cg_tol, opts.cg_max_iter);
        let slope = dot(&g, &direction);
        if slope >= 0.0 {
            return Err(Error::NoStableCore("ascent direction produced".into()));
        }

        let mut step = capped_initial_step(complex, &direction);
        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let mut y_trial = y.clone();
            for (i, v) in y_trial.values_mut().iter_mut().enumerate() {
                *v += step * direction[i];
            }
            let de = model.energy_difference(&y_trial, &y);
            if de <= opts.armijo_c * step * slope {
                y = y_trial;
                for (i, v) in u.values_mut().iter_mut().enumerate() {
                    *v += step * direction[i];
                }
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoStableCore("energy line search stalled".into()));
        }
    }
    unreachable!()
}

fn pseudo_random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(0x2545f4914f6cdd1d);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state % 2_000_003) as f64 / 1_000_001.5) - 1.0
        })
        .collect()
}

/// Smallest generalized eigenvalue of `d2E(y) v = lambda L v` against the
/// bond Laplacian, on the window's admissible space. Inverse iteration with
/// conjugate-gradient inner solves; a Rayleigh-quotient descent fallback
/// handles indefinite Hessians.
pub fn min_eigenvalue(
    model: &EnergyModel,
    y: &Displacement,
    tol: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if !model.potential.is_smooth() {
        return Err(Error::NondifferentiablePoint { value: 0.5 });
    }
    let complex = model.complex;
    let space = SolveSpace::for_complex(complex);
    let weights = model.hessian_weights(y)?;
    let unit = vec![1.0; complex.n_bonds()];
    let n = complex.n_sites();

    let apply_a = projected_apply(complex, &weights, &space);
    let apply_l = projected_apply(complex, &unit, &space);

    let mut v = pseudo_random_vector(n, 0x5eed);
    space.project(&mut v);
    let mut av = vec![0.0; n];
    let mut lv = vec![0.0; n];
    apply_l(&v, &mut lv);
    let norm = dot(&v, &lv).sqrt();
    for x in &mut v {
        *x /= norm;
    }

    let mut rho_prev = f64::INFINITY;
    for _ in 0..opts.eigen_max_iter {
        apply_l(&v, &mut lv);
        let mut x = v.clone();
        // warm-started inverse iteration step: A x = L v
        match conjugate_gradient(&apply_a, &lv, &mut x, opts.inner_cg_tol, opts.cg_max_iter) {
            Ok(_) => {}
            Err(Error::LeftStabilityBasin) => {
                return rayleigh_descent(&apply_a, &apply_l, &space, v, tol, n);
            }
            Err(e) => return Err(e),
        }
        apply_l(&x, &mut lv);
        let xlx = dot(&x, &lv);
        if !(xlx > 0.0) {
            return Err(Error::NoConvergence("eigen iteration collapsed".into()));
        }
        let s = xlx.sqrt();
        for i in 0..n {
            v[i] = x[i] / s;
        }
        apply_a(&v, &mut av);
        apply_l(&v, &mut lv);
        let rho = dot(&v, &av) / dot(&v, &lv);
        if (rho - rho_prev).abs() <= tol * rho.abs().max(1e-30) {
            return Ok(rho);
        }
        rho_prev = rho;
    }
    Err(Error::NoConvergence(format!(
        "eigen iteration: Rayleigh quotient {rho_prev:.6e} not settled after {} iterations",
        opts.eigen_max_iter
    )))
}

/// Two-term Rayleigh-quotient minimization on the pencil `(A, L)`; robust
/// for indefinite `A`, linear convergence. Only used to certify negative
/// eigenvalues.
fn rayleigh_descent(
    apply_a: impl Fn(&[f64], &mut [f64]),
    apply_l: impl Fn(&[f64], &mut [f64]),
    space: &SolveSpace,
    mut v: Vec<f64>,
    tol: f64,
    n: usize,
) -> Result<f64> {
    let mut av = vec![0.0; n];
    let mut lv = vec![0.0; n];
    let mut ar = vec![0.0; n];
    let mut lr = vec![0.0; n];
    let mut rho = 0.0;
    for iter in 0..5000 {
        apply_a(&v, &mut av);
        apply_l(&v, &mut lv);
        let vav = dot(&v, &av);
        let vlv = dot(&v, &lv);
        rho = vav / vlv;
        let mut r: Vec<f64> = (0..n).map(|i| av[i] - rho * lv[i]).collect();
        space.project(&mut r);
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= tol * rho.abs().max(1.0) && iter > 10 {
            return Ok(rho);
        }
        apply_a(&r, &mut ar);
        apply_l(&r, &mut lr);
        // smallest eigenvalue of the 2x2 pencil on span{v, r}
        let a11 = vav;
        let a12 = dot(&v, &ar);
        let a22 = dot(&r, &ar);
        let l11 = vlv;
        let l12 = dot(&v, &lr);
        let l22 = dot(&r, &lr);
        let qa = l11 * l22 - l12 * l12;
        let qb = -(a11 * l22 + a22 * l11 - 2.0 * a12 * l12);
        let qc = a11 * a22 - a12 * a12;
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        if qa.abs() < 1e-300 {
            return Ok(rho);
        }
        let lam = (-qb - disc) / (2.0 * qa);
        // eigenvector coordinates: (A2 - lam L2) c = 0
        let m11 = a11 - lam * l11;
        let m12 = a12 - lam * l12;
        let (c1, c2) = if m12.abs() > m11.abs() {
            (1.0, -m11 / m12)
        } else if m11.abs() > 0.0 {
            (-m12 / m11, 1.0)
        } else {
            (1.0, 0.0)
        };
        for i in 0..n {
            v[i] = c1 * v[i] + c2 * r[i];
        }
        apply_l(&v, &mut lv);
        let s = dot(&v, &lv).max(1e-300).sqrt();
        for x in &mut v {
            *x /= s;
        }
    }
    Ok(rho)
}

/// Witness against global stability of a balanced (zero net Burgers)
/// equilibrium: the annihilation field connecting it to the homogeneous
/// state and the resulting energy gap.
#[derive(Debug)]
pub struct InstabilityWitness {
    /// `E(0; equilibrium)`: negative when the homogeneous state lies below
    pub energy_gap: f64,
    /// bound on the neglected exterior energy for ball windows
    pub tail_bound: f64,
    pub witness: Displacement,
    /// the near-integer-valued comparison state `equilibrium - witness`
    pub comparison: Displacement,
    pub degenerate: bool,
    /// paired core barycenters (plus, minus)
    pub pairs: Vec<(crate::geometry::Vec2, crate::geometry::Vec2)>,
}

/// Tolerance for the tail-wise integrality check of the annihilation field.
const WITNESS_WRAP_TOL: f64 = 0.25;

pub fn global_instability_witness(
    model: &EnergyModel,
    equilibrium: &Displacement,
) -> Result<InstabilityWitness> {
    let complex = model.complex;
    let alpha = bond_length_form(complex, equilibrium);
    let cores = detect_cores(complex, &alpha)?;
    if cores.is_empty() {
        return Ok(InstabilityWitness {
            energy_gap: 0.0,
            tail_bound: 0.0,
            witness: Displacement::zeros(complex),
            comparison: equilibrium.clone(),
            degenerate: true,
            pairs: Vec::new(),
        });
    }
    let net: i64 = cores.iter().map(|&(_, s)| s as i64).sum();
    if net != 0 {
        return Err(Error::UnbalancedConfiguration { net });
    }

    let mut plus: Vec<_> = cores
        .iter()
        .filter(|&&(_, s)| s > 0)
        .map(|&(c, _)| c.barycenter())
        .collect();
    let mut minus: Vec<_> = cores
        .iter()
        .filter(|&&(_, s)| s < 0)
        .map(|&(c, _)| c.barycenter())
        .collect();
    let mut pairs = Vec::new();
    while let Some(_) = plus.first() {
        // greedy nearest pairing
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (i, &p) in plus.iter().enumerate() {
            for (j, &m) in minus.iter().enumerate() {
                let d = (p - m).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        let p = plus.swap_remove(best.0);
        let m = minus.swap_remove(best.1);
        pairs.push((p, m));
    }

    let fields: Vec<_> = pairs
        .iter()
        .map(|&(p, m)| dipole_field(p, m))
        .collect::<Result<_>>()?;
    let witness = Displacement::from_fn(complex, |i| {
        let x = complex.position(i);
        fields.iter().map(|f| f.value(x).unwrap_or(0.0)).sum()
    });

    // tail-wise integrality of D(equilibrium) - D(witness)
    let cores_pts: Vec<_> = cores.iter().map(|&(c, _)| c.barycenter()).collect();
    let d_eq = finite_difference(complex, equilibrium);
    let d_w = finite_difference(complex, &witness);
    for k in 0..complex.n_bonds() {
        let mid = complex.bond(k).midpoint();
        let clearance = cores_pts
            .iter()
            .map(|&c| (mid - c).norm())
            .fold(f64::INFINITY, f64::min);
        if clearance <= 8.0 {
            continue;
        }
        let diff = d_eq.get(k) - d_w.get(k);
        let wrapped = diff - diff.round_ties_even();
        if wrapped.abs() > WITNESS_WRAP_TOL {
            return Err(Error::PairingFailure(format!(
                "tail bond at clearance {clearance:.1} wraps to {wrapped:.3}"
            )));
        }
    }

    // E(0; equilibrium) over the window
    let zero = Displacement::zeros(complex);
    let energy_gap = model.energy_difference(&zero, equilibrium);

    let tail_bound = match complex.ball_radius() {
        Some(window) => {
            let total_sep: f64 = pairs.iter().map(|&(p, m)| (p - m).norm()).sum();
            let sigma = 2.0 * 3f64.sqrt();
            model.potential.psi2_at_zero() * sigma * total_sep * total_sep
                / (4.0 * std::f64::consts::PI * window * window)
        }
        None => 0.0,
    };

    let mut comparison = equilibrium.clone();
    comparison.add_scaled(-1.0, &witness);

    Ok(InstabilityWitness {
        energy_gap,
        tail_bound,
        witness,
        comparison,
        degenerate: false,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    StronglyStable,
    Indeterminate,
    Unstable,
}

#[derive(Debug, Serialize)]
pub struct CertifyReport {
    pub verdict: StabilityVerdict,
    pub lambda_min: f64,
    pub probe_energy_min: f64,
    pub trials: usize,
    pub eps: f64,
}

/// Randomized local-stability probe combined with the stability eigenvalue:
/// draws `trials` perturbations with `||Du||_2 = eps` and checks the energy
/// difference stays nonnegative.
pub fn certify(
    model: &EnergyModel,
    y: &Displacement,
    eps: f64,
    trials: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<CertifyReport> {
    let complex = model.complex;
    let space = SolveSpace::for_complex(complex);
    let lambda_min = min_eigenvalue(model, y, opts.eigen_tol, opts)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe_energy_min = f64::INFINITY;
    for _ in 0..trials {
        let raw: Vec<f64> = (0..complex.n_sites())
            .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
            .collect();
        let mut u = Displacement::from_values(raw);
        space.project(u.values_mut());
        let norm = finite_difference(complex, &u).norm_l2();
        if norm == 0.0 {
            continue;
        }
        let scale = eps / norm;
        for v in u.values_mut() {
            *v *= scale;
        }
        let mut probe = y.clone();
        probe.add_scaled(1.0, &u);
        let e = model.energy_difference(&probe, y);
        probe_energy_min = probe_energy_min.min(e);
    }

    let verdict = if lambda_min > 0.0 && probe_energy_min >= -1e-12 {
        StabilityVerdict::StronglyStable
    } else if lambda_min < 0.0 {
        StabilityVerdict::Unstable
    } else {
        StabilityVerdict::Indeterminate
    };
    Ok(CertifyReport {
        verdict,
        lambda_min,
        probe_energy_min,
        trials,
        eps,
    })
}

/// `||Dv||_2` over the window for a displacement (the discrete H1 seminorm).
pub fn h1_seminorm(complex: &LatticeComplex, v: &Displacement) -> f64 {
    finite_difference(complex, v).norm_l2()
}

/// Inner product `sum_b Dv_b Dw_b`.
pub fn h1_inner(complex: &LatticeComplex, v: &Displacement, w: &Displacement) -> f64 {
    let dv = finite_difference(complex, v);
    let dw = finite_difference(complex, w);
    let mut acc = KahanSum::new();
    for k in 0..complex.n_bonds() {
        acc.add(dv.get(k) * dw.get(k));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::hat_y;
    use crate::energy::{make_psi_cos, make_psi_lin};
    use crate::lattice::{build_ball, build_polygon, hexagon_corners, Site};

    fn random_free(complex: &LatticeComplex, seed: u64, scale: f64) -> Displacement {
        let space = SolveSpace::for_complex(complex);
        let mut v = Displacement::from_values(pseudo_random_vector(complex.n_sites(), seed));
        space.project(v.values_mut());
        for x in v.values_mut() {
            *x *= scale;
        }
        v
    }

    #[test]
    fn dual_norm_of_zero_residual() {
        let complex = build_ball(5.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        assert_eq!(dual_norm(&model, &zero, &SolverOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn dual_norm_inverts_the_laplacian_exactly() {
        let complex = build_ball(6.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let space = SolveSpace::for_complex(&complex);
        let w = random_free(&complex, 7, 0.3);
        // residual = L w has dual norm ||Dw||
        let unit = vec![1.0; complex.n_bonds()];
        let mut lw = vec![0.0; complex.n_sites()];
        apply_weighted_laplacian(&complex, &unit, w.values(), &mut lw);
        space.project(&mut lw);
        let res = Displacement::from_values(lw);
        let norm = dual_norm(&model, &res, &SolverOptions::default()).unwrap();
        assert!((norm - h1_seminorm(&complex, &w)).abs() < 1e-8 * (1.0 + norm));
    }

    #[test]
    fn dual_norm_matches_dense_solve_oracle() {
        // small complex solved densely with nalgebra
        let complex = build_ball(2.5).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let space = SolveSpace::for_complex(&complex);
        let n = complex.n_sites();
        let mut residual = Displacement::from_values(pseudo_random_vector(n, 99));
        space.project(residual.values_mut());

        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for k in 0..complex.n_bonds() {
            let (t, h) = complex.bond_sites(k);
            dense[(t, t)] += 1.0;
            dense[(h, h)] += 1.0;
            dense[(t, h)] -= 1.0;
            dense[(h, t)] -= 1.0;
        }
        // eliminate constrained rows/cols
        let free: Vec<usize> = (0..n).filter(|&i| space.is_free(i)).collect();
        let mut reduced = nalgebra::DMatrix::<f64>::zeros(free.len(), free.len());
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                reduced[(a, b)] = dense[(i, j)];
            }
        }
        let rhs = nalgebra::DVector::from_iterator(
            free.len(),
            free.iter().map(|&i| residual.get(i)),
        );
        let sol = reduced.clone().lu().solve(&rhs).unwrap();
        let expected = rhs.dot(&sol).sqrt();

        let norm = dual_norm(&model, &residual, &SolverOptions::default()).unwrap();
        assert!(
            (norm - expected).abs() < 1e-8 * (1.0 + expected),
            "cg {norm} dense {expected}"
        );
    }

    #[test]
    fn riesz_duality_identity() {
        let complex = build_ball(5.0).unwrap();
        let space = SolveSpace::for_complex(&complex);
        let opts = SolverOptions::default();
        let mut residual = Displacement::from_values(pseudo_random_vector(complex.n_sites(), 11));
        space.project(residual.values_mut());
        let v = riesz_representative(&complex, &space, residual.values(), &opts).unwrap();
        let pairing = dot(residual.values(), &v);
        let norm = dual_norm_in_space(&complex, &space, residual.values(), &opts).unwrap();
        assert!((norm * norm - pairing).abs() < 1e-8 * (1.0 + pairing.abs()));
    }

    #[test]
    fn min_eigenvalue_at_homogeneous_state_is_curvature() {
        for kappa in [1.0, 2.3] {
            let complex = build_ball(5.0).unwrap();
            let model = EnergyModel::new(&complex, make_psi_cos(kappa).unwrap());
            let zero = Displacement::zeros(&complex);
            let lam = min_eigenvalue(&model, &zero, 1e-10, &SolverOptions::default()).unwrap();
            assert!((lam - kappa).abs() < 1e-8, "kappa {kappa}: {lam}");
        }
    }

    #[test]
    fn min_eigenvalue_rejects_nonsmooth_potentials() {
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_lin(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        assert!(min_eigenvalue(&model, &zero, 1e-8, &SolverOptions::default()).is_err());
    }

    #[test]
    fn newton_at_homogeneous_state_stops_immediately() {
        let complex = build_ball(5.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        let report = newton_correct(&model, &zero, 1e-10, 20, &SolverOptions::default()).unwrap();
        assert_eq!(report.newton_iters, 0);
        assert_eq!(report.dw_norm, 0.0);
        assert!(report.cores.is_empty());
        assert!((report.lambda_min - 1.0).abs() < 1e-8);
    }

    #[test]
    fn newton_corrects_a_perturbed_state() {
        let complex = build_ball(8.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let z = random_free(&complex, 21, 0.02);
        let report = newton_correct(&model, &z, 1e-9, 30, &SolverOptions::default()).unwrap();
        assert!(report.residual_final <= 1e-9);
        assert!(report.lambda_min > 0.5);
        // w should essentially cancel z
        let mut total = z.clone();
        total.add_scaled(1.0, &report.w);
        assert!(h1_seminorm(&complex, &total) < 1e-7);
    }

    #[test]
    fn equilibrium_gauge_under_integer_shift() {
        let complex = build_ball(5.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let mut shifted = Displacement::zeros(&complex);
        for v in shifted.values_mut() {
            *v += 3.0;
        }
        let g = model.gradient(&shifted).unwrap();
        assert!(g.values().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn witness_on_homogeneous_state_is_degenerate() {
        let complex = build_ball(6.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        let w = global_instability_witness(&model, &zero).unwrap();
        assert!(w.degenerate);
        assert_eq!(w.energy_gap, 0.0);
    }

    #[test]
    fn witness_rejects_unbalanced_configurations() {
        let complex = build_ball(8.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let y = Displacement::from_fn(&complex, |i| hat_y(complex.position(i)).unwrap());
        assert!(matches!(
            global_instability_witness(&model, &y),
            Err(Error::UnbalancedConfiguration { net: 1 })
        ));
    }

    #[test]
    fn certify_homogeneous_state() {
        let complex = build_ball(5.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        let report = certify(&model, &zero, 0.1, 20, 42, &SolverOptions::default()).unwrap();
        assert_eq!(report.verdict, StabilityVerdict::StronglyStable);
        assert!(report.probe_energy_min >= 0.0);
    }

    #[test]
    fn certify_verdict_matches_eigenvalue_sign() {
        // an engineered unstable state: differences near the half-period
        // put every bond at maximal negative curvature
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let y = Displacement::from_fn(&complex, |i| {
            let p = complex.position(i);
            0.5 * (p.x + 2.0 * p.y / 3f64.sqrt())
        });
        let lam = min_eigenvalue(&model, &y, 1e-8, &SolverOptions::default()).unwrap();
        assert!(lam < 0.0, "expected instability, lambda {lam}");
        let report = certify(&model, &y, 0.05, 10, 1, &SolverOptions::default()).unwrap();
        assert_eq!(report.verdict, StabilityVerdict::Unstable);
    }

    #[test]
    fn solve_space_polygon_pins_anchor_only() {
        let complex = build_polygon(&hexagon_corners(4)).unwrap();
        let space = SolveSpace::for_complex(&complex);
        assert_eq!(space.n_free(), complex.n_sites() - 1);
        assert!(!space.is_free(complex.anchor_index()));
    }

    #[test]
    fn solve_space_ball_clamps_rim() {
        let complex = build_ball(6.0).unwrap();
        let space = SolveSpace::for_complex(&complex);
        let rim = complex.boundary_sites().count();
        assert_eq!(space.n_free(), complex.n_sites() - rim);
        let inner = complex.site_lookup(Site::new(0, 0)).unwrap();
        assert!(space.is_free(inner));
    }
}
