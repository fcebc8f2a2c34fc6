//! Compensated summation, conjugate gradients and a small CSR matrix.

use crate::error::{Error, Result};

/// Kahan compensated accumulator. Summation order is fixed by the caller,
/// so results are reproducible across runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = KahanSum::new();
    for i in 0..a.len() {
        acc.add(a[i] * b[i]);
    }
    acc.value()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Conjugate gradients for a symmetric positive definite operator given as a
/// matrix-free apply. Solves `A x = b` starting from `x` in place, to relative
/// residual `tol` (measured against `max(||b||, tiny)`).
///
/// Returns an error when the iteration budget is exhausted or when a
/// direction of nonpositive curvature shows up (the operator is then not
/// positive definite).
pub fn conjugate_gradient<F>(
    apply: F,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgStats>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    apply(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut rho = dot(&r, &r);
    if rho.sqrt() <= tol * bnorm {
        return Ok(CgStats {
            iterations: 0,
            residual: rho.sqrt(),
        });
    }
    let mut p = r.clone();
    for iter in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::LeftStabilityBasin);
        }
        let alpha = rho / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        let rho_new = dot(&r, &r);
        if rho_new.sqrt() <= tol * bnorm {
            return Ok(CgStats {
                iterations: iter,
                residual: rho_new.sqrt(),
            });
        }
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence(format!(
        "conjugate gradients: residual {:.3e} after {} iterations (target {:.3e})",
        rho.sqrt(),
        max_iter,
        tol * bnorm
    )))
}

/// Compressed sparse row matrix, symmetric storage not assumed.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &mut Vec<(usize, usize, f64)>) -> Csr {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets.iter() {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Csr {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_small_increments() {
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..1_000_000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-10)).abs() < 1e-14);
    }

    #[test]
    fn cg_solves_diagonal_system() {
        let diag = [1.0, 2.0, 3.0, 4.0];
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..4 {
                out[i] = diag[i] * x[i];
            }
        };
        let b = [1.0, 1.0, 1.0, 1.0];
        let mut x = [0.0; 4];
        conjugate_gradient(apply, &b, &mut x, 1e-12, 100).unwrap();
        for i in 0..4 {
            assert!((x[i] - 1.0 / diag[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cg_rejects_indefinite_operator() {
        let apply = |x: &[f64], out: &mut [f64]| {
            out[0] = -x[0];
        };
        let b = [1.0];
        let mut x = [0.0];
        assert!(matches!(
            conjugate_gradient(apply, &b, &mut x, 1e-12, 10),
            Err(Error::LeftStabilityBasin)
        ));
    }

    #[test]
    fn csr_from_triplets_sums_duplicates() {
        let mut t = vec![(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0), (0, 0, 4.0)];
        let m = Csr::from_triplets(2, &mut t);
        let mut out = [0.0; 2];
        m.apply(&[1.0, 1.0], &mut out);
        assert_eq!(out[0], 7.0);
        assert_eq!(out[1], 3.0);
    }
}
