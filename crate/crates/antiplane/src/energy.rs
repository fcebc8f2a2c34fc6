//! The periodic pair-potential energy-difference functional with analytic
//! first and second variations.

use crate::error::{Error, Result};
use crate::forms::Displacement;
use crate::lattice::LatticeComplex;
use crate::linalg::KahanSum;

const TWO_PI: f64 = std::f64::consts::TAU;

/// A 1-periodic even pair potential with `psi(0) = 0`.
///
/// `cos` is the smooth reference instance `kappa (1 - cos 2 pi r) / (4 pi^2)`
/// with curvature `kappa` at the origin. `lin` is the piecewise-quadratic
/// `lambda dist(r, Z)^2 / 2`; it is continuous but not differentiable at
/// half-integers and is excluded from Newton and spectral paths.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    Cos { kappa: f64 },
    Lin { lambda: f64 },
}

/// Smooth cosine potential with `psi''(0) = kappa`.
pub fn make_psi_cos(kappa: f64) -> Result<Potential> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidPotential(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(Potential::Cos { kappa })
}

/// Piecewise-quadratic reference potential `lambda dist(r, Z)^2 / 2`.
pub fn make_psi_lin(lambda: f64) -> Result<Potential> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidPotential(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(Potential::Lin { lambda })
}

/// Distance to the nearest integer, signed: the wrap of `r` into [-1/2, 1/2].
fn wrap_nearest(r: f64) -> f64 {
    r - r.round_ties_even()
}

impl Potential {
    pub fn psi(&self, r: f64) -> f64 {
        match *self {
            Potential::Cos { kappa } => kappa * (1.0 - (TWO_PI * r).cos()) / (TWO_PI * TWO_PI),
            Potential::Lin { lambda } => {
                let w = wrap_nearest(r);
                0.5 * lambda * w * w
            }
        }
    }

    pub fn psi1(&self, r: f64) -> f64 {
        match *self {
            Potential::Cos { kappa } => kappa * (TWO_PI * r).sin() / TWO_PI,
            Potential::Lin { lambda } => lambda * wrap_nearest(r),
        }
    }

    pub fn psi2(&self, r: f64) -> f64 {
        match *self {
            Potential::Cos { kappa } => kappa * (TWO_PI * r).cos(),
            Potential::Lin { lambda } => lambda,
        }
    }

    pub fn psi3(&self, r: f64) -> f64 {
        match *self {
            Potential::Cos { kappa } => -TWO_PI * kappa * (TWO_PI * r).sin(),
            Potential::Lin { .. } => 0.0,
        }
    }

    /// Curvature at the origin.
    pub fn psi2_at_zero(&self) -> f64 {
        match *self {
            Potential::Cos { kappa } => kappa,
            Potential::Lin { lambda } => lambda,
        }
    }

    /// Sup norm of the third derivative (the Lipschitz constant of the
    /// Hessian used in Newton diagnostics).
    pub fn max_psi3(&self) -> f64 {
        match *self {
            Potential::Cos { kappa } => TWO_PI * kappa,
            Potential::Lin { .. } => 0.0,
        }
    }

    /// Whether derivative-based solvers may use this potential.
    pub fn is_smooth(&self) -> bool {
        matches!(self, Potential::Cos { .. })
    }

    /// For non-smooth potentials: reject arguments at half-integer kinks.
    fn check_differentiable(&self, r: f64) -> Result<()> {
        if self.is_smooth() {
            return Ok(());
        }
        let frac = wrap_nearest(r).abs();
        if (frac - 0.5).abs() < 1e-12 {
            return Err(Error::NondifferentiablePoint { value: r });
        }
        Ok(())
    }
}

/// An immutable window plus potential; all energy evaluations run over the
/// window's canonical bonds in a fixed order with compensated summation,
/// so results do not depend on evaluation batching.
#[derive(Debug, Clone, Copy)]
pub struct EnergyModel<'c> {
    pub complex: &'c LatticeComplex,
    pub potential: Potential,
}

impl<'c> EnergyModel<'c> {
    pub fn new(complex: &'c LatticeComplex, potential: Potential) -> EnergyModel<'c> {
        EnergyModel { complex, potential }
    }

    /// Energy of `y` relative to `y_ref`: the bondwise sum of
    /// `psi(Dy_b) - psi(Dy_ref_b)`.
    pub fn energy_difference(&self, y: &Displacement, y_ref: &Displacement) -> f64 {
        let mut acc = KahanSum::new();
        for k in 0..self.complex.n_bonds() {
            let (t, h) = self.complex.bond_sites(k);
            let dy = y.get(h) - y.get(t);
            let dr = y_ref.get(h) - y_ref.get(t);
            acc.add(self.potential.psi(dy) - self.potential.psi(dr));
        }
        acc.value()
    }

    /// First variation assembled as per-site residual forces:
    /// `<grad, v> = sum_b psi'(Dy_b) Dv_b` for every test displacement `v`.
    pub fn gradient(&self, y: &Displacement) -> Result<Displacement> {
        let mut out = vec![0.0; self.complex.n_sites()];
        for k in 0..self.complex.n_bonds() {
            let (t, h) = self.complex.bond_sites(k);
            let dy = y.get(h) - y.get(t);
            self.potential.check_differentiable(dy)?;
            let f = self.potential.psi1(dy);
            out[h] += f;
            out[t] -= f;
        }
        Ok(Displacement::from_values(out))
    }

    /// Per-bond Hessian coefficients `psi''(Dy_b)`.
    pub fn hessian_weights(&self, y: &Displacement) -> Result<Vec<f64>> {
        let mut w = vec![0.0; self.complex.n_bonds()];
        for (k, wk) in w.iter_mut().enumerate() {
            let (t, h) = self.complex.bond_sites(k);
            let dy = y.get(h) - y.get(t);
            self.potential.check_differentiable(dy)?;
            *wk = self.potential.psi2(dy);
        }
        Ok(w)
    }

    /// Matrix-free application of the second variation at `y` to `v`.
    pub fn hessian_apply(&self, y: &Displacement, v: &Displacement) -> Result<Displacement> {
        let weights = self.hessian_weights(y)?;
        let mut out = vec![0.0; self.complex.n_sites()];
        apply_weighted_laplacian(self.complex, &weights, v.values(), &mut out);
        Ok(Displacement::from_values(out))
    }

    /// Duality pairing of a per-site residual with a displacement.
    pub fn pair(&self, residual: &Displacement, v: &Displacement) -> f64 {
        let mut acc = KahanSum::new();
        for i in 0..residual.len() {
            acc.add(residual.get(i) * v.get(i));
        }
        acc.value()
    }

    /// Sparse triplets of the second variation at `y` (for small dense
    /// cross-checks and explicit eigen-solves).
    pub fn hessian_triplets(&self, y: &Displacement) -> Result<Vec<(usize, usize, f64)>> {
        let weights = self.hessian_weights(y)?;
        let mut t = Vec::with_capacity(4 * weights.len());
        for (k, &w) in weights.iter().enumerate() {
            let (a, b) = self.complex.bond_sites(k);
            t.push((a, a, w));
            t.push((b, b, w));
            t.push((a, b, -w));
            t.push((b, a, -w));
        }
        Ok(t)
    }
}

/// `out_i = sum_b w_b (Dv)_b (D e_i)_b`: the weighted bond-graph Laplacian.
/// Unit weights give the plain bond Laplacian that defines the discrete
/// H1 seminorm.
pub fn apply_weighted_laplacian(
    complex: &LatticeComplex,
    weights: &[f64],
    v: &[f64],
    out: &mut [f64],
) {
    out.fill(0.0);
    for k in 0..complex.n_bonds() {
        let (t, h) = complex.bond_sites(k);
        let f = weights[k] * (v[h] - v[t]);
        out[h] += f;
        out[t] -= f;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::finite_difference;
    use crate::lattice::{build_ball, Cell, CellAutomorphism, Orientation, Site};

    fn pseudo_random(complex: &LatticeComplex, seed: u64, scale: f64) -> Displacement {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        Displacement::from_fn(complex, |_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            scale * (((state % 100_000) as f64 / 100_000.0) - 0.5)
        })
    }

    #[test]
    fn psi_lin_reference_values() {
        let lin = make_psi_lin(1.0).unwrap();
        assert_eq!(lin.psi(0.0), 0.0);
        assert!((lin.psi(0.5) - 0.125).abs() < 1e-15);
        assert!((lin.psi(0.7) - lin.psi(0.3)).abs() < 1e-15);
        assert!(make_psi_lin(0.0).is_err());
        assert!(make_psi_lin(-1.0).is_err());
    }

    #[test]
    fn psi_cos_reference_values() {
        let kappa = 1.7;
        let cos = make_psi_cos(kappa).unwrap();
        assert!((cos.psi2(0.0) - kappa).abs() < 1e-15);
        assert!((cos.psi(0.5) - kappa / (2.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
        assert!(make_psi_cos(0.0).is_err());
    }

    #[test]
    fn potential_symmetries_on_sampled_grid() {
        for pot in [make_psi_cos(1.3).unwrap(), make_psi_lin(0.8).unwrap()] {
            for k in -50..=50 {
                let r = k as f64 * 0.037;
                assert!((pot.psi(r + 1.0) - pot.psi(r)).abs() < 1e-12);
                assert!((pot.psi(-r) - pot.psi(r)).abs() < 1e-12);
            }
            assert!(pot.psi(0.0).abs() < 1e-12);
            if pot.is_smooth() {
                assert!(pot.psi1(0.0).abs() < 1e-15);
                assert!(pot.psi1(0.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn psi3_matches_finite_differences_of_psi2() {
        let pot = make_psi_cos(2.1).unwrap();
        let h = 1e-5;
        for k in -20..=20 {
            let r = k as f64 * 0.049;
            let fd = (pot.psi2(r + h) - pot.psi2(r - h)) / (2.0 * h);
            assert!((fd - pot.psi3(r)).abs() < 1e-6);
        }
    }

    #[test]
    fn energy_difference_identities() {
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let y = pseudo_random(&complex, 3, 1.5);
        let z = pseudo_random(&complex, 9, 1.5);
        assert_eq!(model.energy_difference(&y, &y), 0.0);
        let e1 = model.energy_difference(&y, &z);
        let e2 = model.energy_difference(&z, &y);
        assert!((e1 + e2).abs() < 1e-12);
    }

    #[test]
    fn energy_difference_matches_naive_sum_on_small_window() {
        // seven-site window: the origin cell's vertices and their closest ring
        let complex = build_ball(2.0).unwrap();
        let pot = make_psi_cos(0.9).unwrap();
        let model = EnergyModel::new(&complex, pot);
        let y = pseudo_random(&complex, 17, 2.0);
        let z = pseudo_random(&complex, 23, 2.0);
        let mut naive = 0.0;
        for k in 0..complex.n_bonds() {
            let (t, h) = complex.bond_sites(k);
            naive += pot.psi(y.get(h) - y.get(t)) - pot.psi(z.get(h) - z.get(t));
        }
        assert!((model.energy_difference(&y, &z) - naive).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_homogeneous_state() {
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let g = model.gradient(&Displacement::zeros(&complex)).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let complex = build_ball(3.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.4).unwrap());
        let y = pseudo_random(&complex, 5, 0.8);
        let v = pseudo_random(&complex, 31, 1.0);
        let g = model.gradient(&y).unwrap();
        let analytic = model.pair(&g, &v);
        for h in [1e-4, 1e-5] {
            let mut yp = y.clone();
            yp.add_scaled(h, &v);
            let mut ym = y.clone();
            ym.add_scaled(-h, &v);
            let fd = (model.energy_difference(&yp, &y) - model.energy_difference(&ym, &y))
                / (2.0 * h);
            assert!(
                (analytic - fd).abs() < 1e-7 * (1.0 + analytic.abs()),
                "h={h}: analytic {analytic} vs fd {fd}"
            );
        }
    }

    #[test]
    fn gradient_is_equivariant_under_automorphisms() {
        // relabeling oracle: pulling back the state commutes with the force
        let complex = build_ball(12.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let cell = Cell::new(Site::new(2, 1), Orientation::Down);
        let auto = CellAutomorphism::of(cell);
        // a state supported well inside, so both it and its pullback live
        // away from the window rim
        let bump = |x: crate::geometry::Vec2| (-(x.norm_sq())).exp() * 0.4;
        let y = Displacement::from_fn(&complex, |i| bump(complex.position(i)));
        let y_pulled = Displacement::from_fn(&complex, |i| bump(auto.forward_point(complex.position(i))));
        let g = model.gradient(&y).unwrap();
        let g_pulled = model.gradient(&y_pulled).unwrap();
        for i in 0..complex.n_sites() {
            let image = auto.forward_site(complex.site(i));
            if let Some(j) = complex.site_lookup(image) {
                if complex.position(i).norm() < 8.0 {
                    assert!(
                        (g_pulled.get(i) - g.get(j)).abs() < 1e-10,
                        "site {i} -> {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn lin_gradient_rejects_half_integer_differences() {
        let complex = build_ball(3.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_lin(1.0).unwrap());
        let mut y = Displacement::zeros(&complex);
        let i = complex.site_lookup(Site::new(0, 0)).unwrap();
        y.set(i, 0.5);
        assert!(matches!(
            model.gradient(&y),
            Err(Error::NondifferentiablePoint { .. })
        ));
    }

    #[test]
    fn hessian_at_zero_is_scaled_bond_laplacian() {
        let complex = build_ball(4.0).unwrap();
        let kappa = 1.9;
        let model = EnergyModel::new(&complex, make_psi_cos(kappa).unwrap());
        let zero = Displacement::zeros(&complex);
        let v = pseudo_random(&complex, 77, 1.0);
        let hv = model.hessian_apply(&zero, &v).unwrap();
        let quad = model.pair(&hv, &v);
        let dv = finite_difference(&complex, &v);
        let exact = kappa * dv.norm_l2().powi(2);
        assert!((quad - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn hessian_of_zero_vector_is_zero() {
        let complex = build_ball(3.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let y = pseudo_random(&complex, 3, 0.5);
        let hv = model
            .hessian_apply(&y, &Displacement::zeros(&complex))
            .unwrap();
        assert!(hv.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hessian_is_symmetric_and_matches_finite_differences() {
        let complex = build_ball(3.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(0.7).unwrap());
        let y = pseudo_random(&complex, 11, 0.6);
        let v = pseudo_random(&complex, 13, 1.0);
        let w = pseudo_random(&complex, 19, 1.0);
        let hv = model.hessian_apply(&y, &v).unwrap();
        let hw = model.hessian_apply(&y, &w).unwrap();
        let hvw = model.pair(&hv, &w);
        let hwv = model.pair(&hw, &v);
        assert!((hvw - hwv).abs() < 1e-12 * (1.0 + hvw.abs()));

        // second central difference of the energy
        let h = 1e-4;
        let mut e = 0.0;
        for (sv, sw, sign) in [(h, h, 1.0), (h, -h, -1.0), (-h, h, -1.0), (-h, -h, 1.0)] {
            let mut yp = y.clone();
            yp.add_scaled(sv, &v);
            yp.add_scaled(sw, &w);
            e += sign * model.energy_difference(&yp, &y);
        }
        let fd = e / (4.0 * h * h);
        assert!(
            (hvw - fd).abs() < 1e-6 * (1.0 + hvw.abs()),
            "analytic {hvw} vs fd {fd}"
        );
    }

    #[test]
    fn gradient_consistency_over_many_random_states() {
        let complex = build_ball(3.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let h = 1e-5;
        for seed in 0..50 {
            let y = pseudo_random(&complex, 100 + seed, 0.7);
            let v = pseudo_random(&complex, 200 + seed, 1.0);
            let dv_norm = finite_difference(&complex, &v).norm_l2();
            let g = model.gradient(&y).unwrap();
            let analytic = model.pair(&g, &v);
            let mut yp = y.clone();
            yp.add_scaled(h, &v);
            let mut ym = y.clone();
            ym.add_scaled(-h, &v);
            let fd = (model.energy_difference(&yp, &y) - model.energy_difference(&ym, &y))
                / (2.0 * h);
            assert!(
                (analytic - fd).abs() <= 1e-7 * (1.0 + dv_norm),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn periodicity_gauge_invariance() {
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let y = pseudo_random(&complex, 41, 1.2);
        let z = pseudo_random(&complex, 43, 1.2);
        let mut shifted = y.clone();
        for (i, v) in shifted.values_mut().iter_mut().enumerate() {
            *v += ((i % 7) as f64) - 3.0;
        }
        let e1 = model.energy_difference(&y, &z);
        let e2 = model.energy_difference(&shifted, &z);
        assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn homogeneous_state_is_a_global_floor_for_cos() {
        // psi_cos is nonnegative, so every perturbation costs energy
        let complex = build_ball(4.0).unwrap();
        let model = EnergyModel::new(&complex, make_psi_cos(1.0).unwrap());
        let zero = Displacement::zeros(&complex);
        for seed in 0..20 {
            let mut v = pseudo_random(&complex, 500 + seed, 0.25);
            let a = complex.anchor_index();
            let shift = v.get(a);
            for x in v.values_mut() {
                *x -= shift;
            }
            assert!(model.energy_difference(&v, &zero) >= 0.0);
        }
    }
}
