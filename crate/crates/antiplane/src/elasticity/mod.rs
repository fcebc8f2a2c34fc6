//! Continuum linear-elasticity fields: the screw-dislocation solution, the
//! two-pole annihilation field, and the polygonal Neumann boundary
//! corrector with its discrete evaluation.

mod fem;

pub use fem::{corrector_on_bonds, solve_boundary_corrector, BoundaryCorrector};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

const TWO_PI: f64 = std::f64::consts::TAU;

/// The anti-plane screw-dislocation solution `arg(x) / 2pi`, single valued
/// with the branch cut along the positive x1-axis; values lie in `[0, 1)`.
pub fn hat_y(x: Vec2) -> Result<f64> {
    if x.x == 0.0 && x.y == 0.0 {
        return Err(Error::SingularPoint);
    }
    let mut theta = x.y.atan2(x.x);
    if theta < 0.0 {
        theta += TWO_PI;
    }
    Ok(theta / TWO_PI)
}

/// Smooth extension of the gradient of [`hat_y`] away from the origin
/// (no branch cut): `(-x2, x1) / (2 pi |x|^2)`.
pub fn grad_hat_y(x: Vec2) -> Result<Vec2> {
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(Vec2::new(-x.y, x.x) / (TWO_PI * r2))
}

/// The two-pole field `[arg(x - plus) - arg(x - minus)] / 2pi`, single
/// valued off the finite branch cut joining the two poles. Its gradient
/// decays like `|x|^-2` far from the pair.
#[derive(Debug, Clone, Copy)]
pub struct DipoleField {
    pub plus: Vec2,
    pub minus: Vec2,
}

/// Build a dipole field; the poles must be distinct.
pub fn dipole_field(plus: Vec2, minus: Vec2) -> Result<DipoleField> {
    if (plus - minus).norm_sq() == 0.0 {
        return Err(Error::PairingFailure(
            "coincident dipole poles".into(),
        ));
    }
    Ok(DipoleField { plus, minus })
}

impl DipoleField {
    /// Field value: the signed angle between `x - plus` and `x - minus`,
    /// divided by `2 pi`. The branch cut is the segment between the poles.
    pub fn value(&self, x: Vec2) -> Result<f64> {
        let a = x - self.plus;
        let b = x - self.minus;
        if a.norm_sq() == 0.0 || b.norm_sq() == 0.0 {
            return Err(Error::SingularPoint);
        }
        Ok(b.cross(a).atan2(a.dot(b)) / TWO_PI)
    }

    pub fn grad(&self, x: Vec2) -> Result<Vec2> {
        Ok(grad_hat_y(x - self.plus)? - grad_hat_y(x - self.minus)?)
    }

    pub fn swapped(&self) -> DipoleField {
        DipoleField {
            plus: self.minus,
            minus: self.plus,
        }
    }

    pub fn singular_points(&self) -> [Vec2; 2] {
        [self.plus, self.minus]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_y_reference_values() {
        assert_eq!(hat_y(Vec2::new(1.0, 0.0)).unwrap(), 0.0);
        assert!((hat_y(Vec2::new(0.0, 1.0)).unwrap() - 0.25).abs() < 1e-15);
        assert!((hat_y(Vec2::new(-1.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            hat_y(Vec2::ZERO),
            Err(Error::SingularPoint)
        ));
    }

    #[test]
    fn grad_hat_y_reference_values() {
        let g = grad_hat_y(Vec2::new(1.0, 0.0)).unwrap();
        assert!((g.x - 0.0).abs() < 1e-15);
        assert!((g.y - 1.0 / TWO_PI).abs() < 1e-15);
        for r in [0.5, 2.0, 17.0] {
            let g = grad_hat_y(Vec2::new(0.0, r)).unwrap();
            assert!((g.norm() - 1.0 / (TWO_PI * r)).abs() < 1e-14);
        }
        assert!(matches!(grad_hat_y(Vec2::ZERO), Err(Error::SingularPoint)));
    }

    /// 360-point trapezoid quadrature of the parametrized circulation
    /// integral around a circle.
    fn loop_integral(grad: impl Fn(Vec2) -> Vec2, center: Vec2, radius: f64) -> f64 {
        let n = 360;
        let dt = TWO_PI / n as f64;
        let mut total = 0.0;
        for k in 0..n {
            let t = dt * k as f64;
            let p = center + Vec2::new(t.cos(), t.sin()) * radius;
            let tangent = Vec2::new(-t.sin(), t.cos()) * radius;
            total += grad(p).dot(tangent) * dt;
        }
        total
    }

    #[test]
    fn grad_hat_y_circulation_is_one() {
        let g = |x: Vec2| grad_hat_y(x).unwrap();
        let around = loop_integral(g, Vec2::ZERO, 2.5);
        assert!((around - 1.0).abs() < 1e-6);
        // loop not enclosing the origin: curl free, circulation zero
        let away = loop_integral(g, Vec2::new(10.0, 3.0), 2.0);
        assert!(away.abs() < 1e-6);
    }

    #[test]
    fn dipole_far_field_decays() {
        let d = dipole_field(Vec2::new(0.5, 0.0), Vec2::new(-0.5, 0.0)).unwrap();
        let near = d.grad(Vec2::new(0.0, 1.0)).unwrap().norm();
        let far = d.grad(Vec2::new(0.0, 100.0)).unwrap().norm();
        assert!(far <= 1e-3 * near);
    }

    #[test]
    fn dipole_swap_negates() {
        let d = dipole_field(Vec2::new(1.0, 2.0), Vec2::new(-3.0, 0.5)).unwrap();
        let s = d.swapped();
        for p in [Vec2::new(4.0, 4.0), Vec2::new(-2.0, 6.0), Vec2::new(0.3, -5.0)] {
            assert!((d.value(p).unwrap() + s.value(p).unwrap()).abs() < 1e-14);
            assert!((d.grad(p).unwrap() + s.grad(p).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn dipole_loop_integrals() {
        let plus = Vec2::new(2.0, 0.0);
        let minus = Vec2::new(-2.0, 0.0);
        let d = dipole_field(plus, minus).unwrap();
        let g = |x: Vec2| d.grad(x).unwrap();
        let around_plus = loop_integral(g, plus, 1.0);
        assert!((around_plus - 1.0).abs() < 1e-6);
        let around_both = loop_integral(g, Vec2::ZERO, 10.0);
        assert!(around_both.abs() < 1e-6);
    }

    #[test]
    fn coincident_poles_rejected() {
        assert!(dipole_field(Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn dipole_value_is_single_valued_off_the_segment() {
        // walk a closed loop around one pole crossing the line through the
        // poles outside the segment; the value must not jump there
        let d = dipole_field(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).unwrap();
        let left = d.value(Vec2::new(-5.0, 1e-9)).unwrap();
        let right = d.value(Vec2::new(-5.0, -1e-9)).unwrap();
        assert!((left - right).abs() < 1e-6);
        // across the segment itself the value jumps by one
        let above = d.value(Vec2::new(0.0, 1e-9)).unwrap();
        let below = d.value(Vec2::new(0.0, -1e-9)).unwrap();
        assert!(((above - below).abs() - 1.0).abs() < 1e-6);
    }
}
