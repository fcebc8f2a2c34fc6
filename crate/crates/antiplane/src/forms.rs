//! Displacements, finite differences, bond-length 1-forms, Burgers
//! circuits and dislocation-configuration geometry.

use crate::error::{Error, Result};
use crate::lattice::{dist, Bond, Cell, LatticeComplex};
use crate::linalg::KahanSum;

/// Tolerance for detecting drift away from integer circulations.
const CIRCULATION_TOL: f64 = 1e-9;

/// A real-valued function on the sites of a window, indexed like the
/// window's site list.
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    values: Vec<f64>,
}

impl Displacement {
    pub fn zeros(complex: &LatticeComplex) -> Displacement {
        Displacement {
            values: vec![0.0; complex.n_sites()],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Displacement {
        Displacement { values }
    }

    pub fn from_fn(complex: &LatticeComplex, f: impl FnMut(usize) -> f64) -> Displacement {
        Displacement {
            values: (0..complex.n_sites()).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, site_idx: usize) -> f64 {
        self.values[site_idx]
    }

    pub fn set(&mut self, site_idx: usize, v: f64) {
        self.values[site_idx] = v;
    }

    /// Shift all values so the window anchor reads zero.
    pub fn rebase_to_anchor(&mut self, complex: &LatticeComplex) {
        let a = self.values[complex.anchor_index()];
        for v in &mut self.values {
            *v -= a;
        }
    }

    pub fn add_scaled(&mut self, alpha: f64, other: &Displacement) {
        for (v, o) in self.values.iter_mut().zip(other.values.iter()) {
            *v += alpha * o;
        }
    }
}

/// An antisymmetric real-valued function on oriented bonds. Values are
/// stored on the canonical orientation; reversed access negates.
#[derive(Debug, Clone, PartialEq)]
pub struct BondForm {
    values: Vec<f64>,
}

impl BondForm {
    pub fn zeros(complex: &LatticeComplex) -> BondForm {
        BondForm {
            values: vec![0.0; complex.n_bonds()],
        }
    }

    pub fn from_values(values: Vec<f64>) -> BondForm {
        BondForm { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value on a canonical bond by index.
    pub fn get(&self, bond_idx: usize) -> f64 {
        self.values[bond_idx]
    }

    /// Value on an arbitrarily oriented bond.
    pub fn eval(&self, complex: &LatticeComplex, b: Bond) -> Option<f64> {
        let (k, sign) = complex.bond_lookup(b)?;
        Some(sign * self.values[k])
    }

    /// `ell^2` norm over canonical bonds.
    pub fn norm_l2(&self) -> f64 {
        let mut acc = KahanSum::new();
        for v in &self.values {
            acc.add(v * v);
        }
        acc.value().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Finite difference `Dy_b = y(head) - y(tail)` on canonical bonds.
pub fn finite_difference(complex: &LatticeComplex, y: &Displacement) -> BondForm {
    let mut values = vec![0.0; complex.n_bonds()];
    for (k, v) in values.iter_mut().enumerate() {
        let (t, h) = complex.bond_sites(k);
        *v = y.get(h) - y.get(t);
    }
    BondForm { values }
}

/// Wrap into the half-open interval `(-1/2, 1/2]`.
fn wrap_upper(x: f64) -> f64 {
    let w = x - (x - 0.5).ceil();
    if w <= -0.5 {
        w + 1.0
    } else if w > 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// The canonical bond-length 1-form representative of `[Dy]`.
///
/// Interior bonds wrap the finite difference into `(-1/2, 1/2]` on the
/// canonical orientation (the deterministic tie rule). Boundary bonds apply
/// the half-open rule on the positively-oriented boundary orientation
/// instead, so the boundary circulation is independent of the
/// representative.
pub fn bond_length_form(complex: &LatticeComplex, y: &Displacement) -> BondForm {
    bond_length_form_with_ties(complex, y, false)
}

/// Same as [`bond_length_form`] but with the interior tie rule flipped to
/// `[-1/2, 1/2)`. Boundary bonds are unaffected; two valid representatives
/// of the same class can only differ on interior half-integer ties.
pub fn bond_length_form_with_ties(
    complex: &LatticeComplex,
    y: &Displacement,
    flip_interior_ties: bool,
) -> BondForm {
    let mut values = vec![0.0; complex.n_bonds()];
    for (k, v) in values.iter_mut().enumerate() {
        let (t, h) = complex.bond_sites(k);
        let d = y.get(h) - y.get(t);
        let boundary = complex.bond_is_boundary(k);
        *v = if boundary {
            if complex.bond_boundary_positive(k) {
                wrap_upper(d)
            } else {
                -wrap_upper(-d)
            }
        } else if flip_interior_ties {
            -wrap_upper(-d)
        } else {
            wrap_upper(d)
        };
    }
    BondForm { values }
}

/// Circulation of a bond-length form around a positively-oriented cell.
/// The value is guaranteed to be one of -1, 0, +1.
pub fn cell_circulation(complex: &LatticeComplex, alpha: &BondForm, cell: Cell) -> Result<i64> {
    let mut sum = 0.0;
    for b in cell.boundary_bonds() {
        let (k, sign) = complex
            .bond_lookup(b)
            .ok_or_else(|| Error::DegenerateDomain("cell boundary bond not in window".into()))?;
        sum += sign * alpha.get(k);
    }
    let rounded = sum.round();
    if (sum - rounded).abs() > CIRCULATION_TOL {
        return Err(Error::NonIntegerCirculation {
            value: sum,
            m: cell.anchor.m,
            n: cell.anchor.n,
        });
    }
    debug_assert!(rounded.abs() <= 1.0 + 1e-12);
    Ok(rounded as i64)
}

/// All cells with nonzero circulation, with their signs.
pub fn detect_cores(complex: &LatticeComplex, alpha: &BondForm) -> Result<Vec<(Cell, i8)>> {
    let mut cores = Vec::new();
    for idx in 0..complex.n_cells() {
        let cell = complex.cell(idx);
        let c = cell_circulation(complex, alpha, cell)?;
        if c != 0 {
            cores.push((cell, c as i8));
        }
    }
    Ok(cores)
}

/// Circulation of a bond-length form along the positively-oriented boundary
/// of the filled region.
pub fn boundary_circulation(complex: &LatticeComplex, alpha: &BondForm) -> Result<i64> {
    let mut sum = KahanSum::new();
    for k in 0..complex.n_bonds() {
        if complex.bond_is_boundary(k) {
            let sign = if complex.bond_boundary_positive(k) {
                1.0
            } else {
                -1.0
            };
            sum.add(sign * alpha.get(k));
        }
    }
    let total = sum.value();
    let rounded = total.round();
    if (total - rounded).abs() > 1e-6 {
        return Err(Error::NonIntegerCirculation {
            value: total,
            m: 0,
            n: 0,
        });
    }
    Ok(rounded as i64)
}

/// Net Burgers vector of a deformation: the sum of its core circulations.
pub fn net_burgers(complex: &LatticeComplex, y: &Displacement) -> Result<i64> {
    let alpha = bond_length_form(complex, y);
    let cores = detect_cores(complex, &alpha)?;
    Ok(cores.iter().map(|&(_, s)| s as i64).sum())
}

/// A finite set of signed dislocation cores. No cell may appear twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DislocationConfig {
    cores: Vec<(Cell, i8)>,
}

impl DislocationConfig {
    pub fn new(cores: Vec<(Cell, i8)>) -> Result<DislocationConfig> {
        for (i, &(c, s)) in cores.iter().enumerate() {
            assert!(s == 1 || s == -1, "core sign must be +1 or -1");
            for &(c2, _) in cores.iter().skip(i + 1) {
                if c == c2 {
                    return Err(Error::ConflictingCore {
                        m: c.anchor.m,
                        n: c.anchor.n,
                    });
                }
            }
        }
        Ok(DislocationConfig { cores })
    }

    pub fn single(cell: Cell, sign: i8) -> DislocationConfig {
        DislocationConfig {
            cores: vec![(cell, sign)],
        }
    }

    pub fn cores(&self) -> &[(Cell, i8)] {
        &self.cores
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn net_sign(&self) -> i64 {
        self.cores.iter().map(|&(_, s)| s as i64).sum()
    }
}

/// Separation metrics of a configuration: the minimum pairwise core
/// distance and the minimum core-to-boundary distance (infinite on ball
/// windows, which stand in for the full lattice).
pub fn config_metrics(config: &DislocationConfig, complex: &LatticeComplex) -> Result<(f64, f64)> {
    for &(c, _) in config.cores() {
        if complex.cell_index(c).is_none() {
            return Err(Error::CoreOutsideDomain(format!(
                "cell ({}, {}) not in window",
                c.anchor.m, c.anchor.n
            )));
        }
    }
    let cores = config.cores();
    let mut l_min = f64::INFINITY;
    for i in 0..cores.len() {
        for j in (i + 1)..cores.len() {
            if cores[i].0 != cores[j].0 {
                l_min = l_min.min(dist(&cores[i].0, &cores[j].0));
            }
        }
    }
    let s_min = if complex.is_ball() {
        f64::INFINITY
    } else {
        let mut s = f64::INFINITY;
        for &(c, _) in cores {
            s = s.min(complex.boundary_distance(&crate::lattice::LatticeElement::hull_points(&c)));
        }
        s
    };
    Ok((l_min, s_min))
}
