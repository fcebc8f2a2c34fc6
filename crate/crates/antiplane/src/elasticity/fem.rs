//! P1 finite-element solution of the pure Neumann boundary-corrector
//! problem on the convex hull of a polygonal window.
//!
//! The mesh consists of the lattice cells of the filled region plus sliver
//! triangles between the zigzag boundary and the hull, triangulated over
//! boundary lattice sites. The Neumann data cancels the normal derivative
//! of the superposed dislocation fields on the hull; the additive constant
//! is fixed by pinning the anchor node and the discrete compatibility
//! defect is removed by projecting out the mean of the load.

use std::collections::HashMap;

use super::grad_hat_y;
use crate::error::{Error, Result};
use crate::forms::{BondForm, DislocationConfig, Displacement};
use crate::geometry::{point_segment_distance, Vec2};
use crate::lattice::LatticeComplex;
use crate::linalg::{conjugate_gradient, Csr};

/// 8-point Gauss-Legendre rule on [-1, 1].
const GL8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.1012285362903763),
    (-0.7966664774136267, 0.2223810344533745),
    (-0.5255324099163290, 0.3137066458778873),
    (-0.1834346424956498, 0.3626837833783620),
    (0.1834346424956498, 0.3626837833783620),
    (0.5255324099163290, 0.3137066458778873),
    (0.7966664774136267, 0.2223810344533745),
    (0.9602898564975363, 0.1012285362903763),
];

#[derive(Debug, Clone)]
struct FemMesh {
    /// CCW vertex triples; the first `n_lattice_cells` entries coincide
    /// with the window's cell list.
    triangles: Vec<[u32; 3]>,
    n_lattice_cells: usize,
    /// consecutive hull-contact nodes along the positively-oriented hull
    hull_edges: Vec<(u32, u32)>,
}

/// Discrete boundary corrector: nodal values on the window sites with a
/// per-triangle gradient reconstruction.
#[derive(Debug)]
pub struct BoundaryCorrector {
    nodal: Displacement,
    config: DislocationConfig,
    mesh: FemMesh,
    gradients: Vec<Vec2>,
    /// `| integral of the Neumann data |` before the mean projection
    pub compatibility_defect: f64,
    /// max P1 gradient magnitude over all triangles
    pub grad_max: f64,
    pub cg_iterations: usize,
    pub cg_residual: f64,
}

impl BoundaryCorrector {
    pub fn nodal(&self) -> &Displacement {
        &self.nodal
    }

    pub fn config(&self) -> &DislocationConfig {
        &self.config
    }

    /// P1 gradient in the lattice cell with the given window cell index.
    pub fn gradient_in_lattice_cell(&self, cell_idx: usize) -> Vec2 {
        debug_assert!(cell_idx < self.mesh.n_lattice_cells);
        self.gradients[cell_idx]
    }

    /// Edge-jump estimator used as a proxy for the L2 norm of the second
    /// derivatives: `sqrt(sum_e h_e [grad . n]_e^2)` over interior edges.
    pub fn hessian_jump_proxy(&self, complex: &LatticeComplex) -> f64 {
        let mut edge_map: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                edge_map.entry(key).or_default().push(t);
            }
        }
        let mut total = 0.0;
        for ((a, b), tris) in &edge_map {
            if tris.len() != 2 {
                continue;
            }
            let pa = complex.position(*a as usize);
            let pb = complex.position(*b as usize);
            let edge = pb - pa;
            let h = edge.norm();
            let n = edge.perp() / h;
            let jump = (self.gradients[tris[0]] - self.gradients[tris[1]]).dot(n);
            total += h * jump * jump;
        }
        total.sqrt()
    }
}

fn uv(s: crate::lattice::Site) -> (i64, i64) {
    (2 * s.m + s.n, s.n)
}

fn cross_uv(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Ear-clipping triangulation of a simple CCW polygon given by window site
/// indices. Orientation tests are exact in lattice coordinates.
fn ear_clip(complex: &LatticeComplex, polygon: &[u32]) -> Result<Vec<[u32; 3]>> {
    let mut verts: Vec<u32> = polygon.to_vec();
    let mut out = Vec::new();
    let coords = |v: u32| uv(complex.site(v as usize));
    while verts.len() > 3 {
        let n = verts.len();
        let mut clipped = false;
        'ears: for i in 0..n {
            let prev = coords(verts[(i + n - 1) % n]);
            let cur = coords(verts[i]);
            let next = coords(verts[(i + 1) % n]);
            let d1 = (cur.0 - prev.0, cur.1 - prev.1);
            let d2 = (next.0 - cur.0, next.1 - cur.1);
            if cross_uv(d1, d2) <= 0 {
                continue; // reflex or flat tip
            }
            // no other vertex inside or on the candidate ear
            for j in 0..n {
                if j == i || j == (i + 1) % n || j == (i + n - 1) % n {
                    continue;
                }
                let p = coords(verts[j]);
                let s1 = cross_uv((cur.0 - prev.0, cur.1 - prev.1), (p.0 - prev.0, p.1 - prev.1));
                let s2 = cross_uv((next.0 - cur.0, next.1 - cur.1), (p.0 - cur.0, p.1 - cur.1));
                let s3 = cross_uv(
                    (prev.0 - next.0, prev.1 - next.1),
                    (p.0 - next.0, p.1 - next.1),
                );
                if s1 >= 0 && s2 >= 0 && s3 >= 0 {
                    continue 'ears;
                }
            }
            out.push([
                verts[(i + n - 1) % n],
                verts[i],
                verts[(i + 1) % n],
            ]);
            verts.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::InvalidPolygon(
                "sliver triangulation failed (no ear found)".into(),
            ));
        }
    }
    out.push([verts[0], verts[1], verts[2]]);
    Ok(out)
}

fn build_mesh(complex: &LatticeComplex) -> Result<FemMesh> {
    let poly = complex
        .polygon()
        .ok_or_else(|| Error::InvalidPolygon("boundary corrector needs a polygon window".into()))?;
    let mut triangles: Vec<[u32; 3]> = Vec::with_capacity(complex.n_cells());
    for idx in 0..complex.n_cells() {
        let vs = complex.cell(idx).vertices();
        triangles.push([
            complex.site_lookup(vs[0]).unwrap() as u32,
            complex.site_lookup(vs[1]).unwrap() as u32,
            complex.site_lookup(vs[2]).unwrap() as u32,
        ]);
    }
    let n_lattice_cells = triangles.len();

    let cycles = complex.boundary_cycles();
    if cycles.len() != 1 {
        return Err(Error::InvalidPolygon("expected a single boundary walk".into()));
    }
    let cycle = &cycles[0];
    let len = cycle.len();
    let on_hull: Vec<bool> = cycle
        .iter()
        .map(|&i| poly.site_on_hull(complex.site(i as usize)).is_some())
        .collect();
    let first_hull = on_hull
        .iter()
        .position(|&h| h)
        .ok_or_else(|| Error::InvalidPolygon("no hull contact on boundary walk".into()))?;

    let mut hull_edges = Vec::new();
    let mut w = first_hull;
    loop {
        // advance to the next hull-contact node, collecting the pocket path
        let mut pocket = vec![cycle[w % len]];
        let mut v = w + 1;
        while !on_hull[v % len] {
            pocket.push(cycle[v % len]);
            v += 1;
        }
        pocket.push(cycle[v % len]);
        let a = pocket[0];
        let b = *pocket.last().unwrap();
        hull_edges.push((a, b));
        if pocket.len() > 2 {
            // region between the walk and the hull chord; reverse the walk
            // to orient the pocket counterclockwise
            let ccw: Vec<u32> = pocket.iter().rev().copied().collect();
            triangles.extend(ear_clip(complex, &ccw)?);
        }
        w = v;
        if w % len == first_hull {
            break;
        }
    }

    Ok(FemMesh {
        triangles,
        n_lattice_cells,
        hull_edges,
    })
}

fn p1_gradients(complex: &LatticeComplex, mesh: &FemMesh, u: &[f64]) -> Vec<Vec2> {
    mesh.triangles
        .iter()
        .map(|tri| {
            let p: Vec<Vec2> = tri.iter().map(|&v| complex.position(v as usize)).collect();
            let area2 = (p[1] - p[0]).cross(p[2] - p[0]);
            let mut g = Vec2::ZERO;
            for i in 0..3 {
                let opposite = p[(i + 2) % 3] - p[(i + 1) % 3];
                g = g + opposite.perp() * (u[tri[i] as usize] / area2);
            }
            g
        })
        .collect()
}

/// Solve the pure Neumann problem for the boundary corrector of a
/// dislocation configuration in a polygonal window.
pub fn solve_boundary_corrector(
    complex: &LatticeComplex,
    config: &DislocationConfig,
    tol: f64,
) -> Result<BoundaryCorrector> {
    if tol <= 0.0 {
        return Err(Error::NoConvergence("nonpositive tolerance".into()));
    }
    let poly = complex
        .polygon()
        .ok_or_else(|| Error::InvalidPolygon("boundary corrector needs a polygon window".into()))?
        .clone();

    // cores must lie strictly inside the hull
    let hull_pts: Vec<Vec2> = poly.corners.iter().map(|c| c.position()).collect();
    for &(cell, _) in config.cores() {
        if complex.cell_index(cell).is_none() {
            return Err(Error::CoreOutsideDomain(format!(
                "cell ({}, {}) not in window",
                cell.anchor.m, cell.anchor.n
            )));
        }
        let bc = cell.barycenter();
        let mut d = f64::INFINITY;
        for i in 0..hull_pts.len() {
            let a = hull_pts[i];
            let b = hull_pts[(i + 1) % hull_pts.len()];
            d = d.min(point_segment_distance(bc, a, b));
        }
        if d < 0.45 {
            return Err(Error::CoreOutsideDomain(format!(
                "core barycenter within {d:.3} of the hull boundary"
            )));
        }
    }

    let mesh = build_mesh(complex)?;
    let n = complex.n_sites();

    // stiffness assembly
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(9 * mesh.triangles.len());
    for tri in &mesh.triangles {
        let p: Vec<Vec2> = tri.iter().map(|&v| complex.position(v as usize)).collect();
        let area2 = (p[1] - p[0]).cross(p[2] - p[0]);
        debug_assert!(area2 > 0.0, "mesh triangle must be counterclockwise");
        let area = 0.5 * area2;
        let grads: Vec<Vec2> = (0..3)
            .map(|i| (p[(i + 2) % 3] - p[(i + 1) % 3]).perp() / area2)
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                triplets.push((
                    tri[i] as usize,
                    tri[j] as usize,
                    area * grads[i].dot(grads[j]),
                ));
            }
        }
    }
    let stiffness = Csr::from_triplets(n, &mut triplets);

    // Neumann load: g = -sum_cores s grad_hat(x - x^C) . nu on the hull
    let mut load = vec![0.0; n];
    let mut flux = 0.0;
    for &(a, b) in &mesh.hull_edges {
        let pa = complex.position(a as usize);
        let pb = complex.position(b as usize);
        let edge = pb - pa;
        let length = edge.norm();
        let nu = Vec2::new(edge.y, -edge.x) / length;
        for &(gx, gw) in &GL8 {
            let t = 0.5 * (gx + 1.0);
            let x = pa + edge * t;
            let mut g = 0.0;
            for &(cell, s) in config.cores() {
                g -= s as f64 * grad_hat_y(x - cell.barycenter())?.dot(nu);
            }
            let w = 0.5 * length * gw;
            load[a as usize] += w * g * (1.0 - t);
            load[b as usize] += w * g * t;
            flux += w * g;
        }
    }
    let compatibility_defect = flux.abs();

    // remove the mean of the load, then pin the anchor node
    let mean = load.iter().sum::<f64>() / n as f64;
    for v in &mut load {
        *v -= mean;
    }
    let anchor = complex.anchor_index();
    load[anchor] = 0.0;

    let apply = |x: &[f64], out: &mut [f64]| {
        stiffness.apply(x, out);
        out[anchor] = 0.0;
    };
    let mut u = vec![0.0; n];
    let stats = conjugate_gradient(apply, &load, &mut u, tol, 40 * n + 1000).map_err(|e| {
        match e {
            Error::NoConvergence(msg) => Error::NoConvergence(format!(
                "boundary corrector: {msg}"
            )),
            other => other,
        }
    })?;

    let gradients = p1_gradients(complex, &mesh, &u);
    let grad_max = gradients.iter().fold(0.0f64, |m, g| m.max(g.norm()));

    Ok(BoundaryCorrector {
        nodal: Displacement::from_values(u),
        config: config.clone(),
        mesh,
        gradients,
        compatibility_defect,
        grad_max,
        cg_iterations: stats.iterations,
        cg_residual: stats.residual,
    })
}

/// Per-bond differences of the corrector's P1 interpolant at lattice sites.
/// On lattice nodes the interpolant is nodal, so this is exact.
pub fn corrector_on_bonds(corr: &BoundaryCorrector, complex: &LatticeComplex) -> BondForm {
    crate::forms::finite_difference(complex, &corr.nodal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::loglog_fit;
    use crate::forms::config_metrics;
    use crate::lattice::{build_polygon, hexagon_corners, Cell, Orientation, Site};

    #[test]
    fn centered_core_in_hexagon_has_symmetric_gradient() {
        let complex = build_polygon(&hexagon_corners(8)).unwrap();
        let config = DislocationConfig::single(Cell::origin(), 1);
        let corr = solve_boundary_corrector(&complex, &config, 1e-12).unwrap();
        // threefold symmetry forces the gradient at the center cell to zero
        let c0 = complex.cell_index(Cell::origin()).unwrap();
        let g = corr.gradient_in_lattice_cell(c0);
        assert!(g.norm() < 1e-8, "central gradient {:?}", g);
    }

    #[test]
    fn compatibility_integral_vanishes() {
        let complex = build_polygon(&hexagon_corners(7)).unwrap();
        for config in [
            DislocationConfig::single(Cell::origin(), 1),
            DislocationConfig::new(vec![
                (Cell::origin(), 1),
                (Cell::new(Site::new(3, -1), Orientation::Down), -1),
            ])
            .unwrap(),
        ] {
            let corr = solve_boundary_corrector(&complex, &config, 1e-10).unwrap();
            assert!(
                corr.compatibility_defect <= 1e-10,
                "defect {}",
                corr.compatibility_defect
            );
        }
    }

    #[test]
    fn corrector_is_linear_in_the_configuration() {
        let complex = build_polygon(&hexagon_corners(7)).unwrap();
        let a = Cell::origin();
        let b = Cell::new(Site::new(2, 1), Orientation::Up);
        let both = DislocationConfig::new(vec![(a, 1), (b, -1)]).unwrap();
        let ca = solve_boundary_corrector(&complex, &DislocationConfig::single(a, 1), 1e-12).unwrap();
        let cb = solve_boundary_corrector(&complex, &DislocationConfig::single(b, -1), 1e-12).unwrap();
        let cab = solve_boundary_corrector(&complex, &both, 1e-12).unwrap();
        for i in 0..complex.n_sites() {
            let sum = ca.nodal().get(i) + cb.nodal().get(i);
            assert!((cab.nodal().get(i) - sum).abs() < 1e-7);
        }
    }

    #[test]
    fn interior_values_respect_boundary_extremes() {
        let complex = build_polygon(&hexagon_corners(6)).unwrap();
        let config = DislocationConfig::single(
            Cell::new(Site::new(2, 0), Orientation::Down),
            1,
        );
        let corr = solve_boundary_corrector(&complex, &config, 1e-12).unwrap();
        let mut bmin = f64::INFINITY;
        let mut bmax = f64::NEG_INFINITY;
        for i in complex.boundary_sites() {
            bmin = bmin.min(corr.nodal().get(i));
            bmax = bmax.max(corr.nodal().get(i));
        }
        let pad = 1e-9;
        for i in 0..complex.n_sites() {
            let v = corr.nodal().get(i);
            assert!(v >= bmin - pad && v <= bmax + pad, "site {i} value {v}");
        }
    }

    #[test]
    fn zero_configuration_gives_zero_corrector() {
        let complex = build_polygon(&hexagon_corners(5)).unwrap();
        let config = DislocationConfig::new(vec![]).unwrap();
        let corr = solve_boundary_corrector(&complex, &config, 1e-12).unwrap();
        assert!(corr.nodal().values().iter().all(|&v| v.abs() < 1e-12));
        let form = corrector_on_bonds(&corr, &complex);
        assert!(form.values().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn bond_form_matches_nodal_differences() {
        let complex = build_polygon(&hexagon_corners(5)).unwrap();
        let config = DislocationConfig::single(Cell::origin(), 1);
        let corr = solve_boundary_corrector(&complex, &config, 1e-10).unwrap();
        let form = corrector_on_bonds(&corr, &complex);
        for k in 0..complex.n_bonds() {
            let (t, h) = complex.bond_sites(k);
            let expect = corr.nodal().get(h) - corr.nodal().get(t);
            assert_eq!(form.get(k), expect);
        }
    }

    #[test]
    fn core_on_boundary_is_rejected() {
        let complex = build_polygon(&hexagon_corners(4)).unwrap();
        // a cell with an edge on the hull
        let rim = Cell::new(Site::new(3, 0), Orientation::Up);
        assert!(complex.cell_index(rim).is_some());
        let config = DislocationConfig::single(rim, 1);
        assert!(matches!(
            solve_boundary_corrector(&complex, &config, 1e-10),
            Err(Error::CoreOutsideDomain(_))
        ));
    }

    #[test]
    fn gradient_bound_scales_inversely_with_boundary_distance() {
        // move a single core towards the boundary of a fixed hexagon; the
        // max gradient grows like 1/S (fitted exponent at least 0.9)
        let complex = build_polygon(&hexagon_corners(16)).unwrap();
        let mut svals = Vec::new();
        let mut gmax = Vec::new();
        for t in [0i64, 6, 10, 13] {
            let cell = Cell::new(Site::new(t, -1), Orientation::Down);
            let config = DislocationConfig::single(cell, 1);
            let (_, s) = config_metrics(&config, &complex).unwrap();
            let corr = solve_boundary_corrector(&complex, &config, 1e-11).unwrap();
            svals.push(s);
            gmax.push(corr.grad_max);
        }
        let fit = loglog_fit(&svals, &gmax).unwrap();
        assert!(fit.slope <= -0.9, "grad_max slope {}", fit.slope);
    }

    #[test]
    fn hessian_proxy_scales_like_log_s_over_s() {
        // sweep hexagon sizes with a centered core; the jump proxy tracks
        // log(S)/S
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for size in [8i64, 16, 32] {
            let complex = build_polygon(&hexagon_corners(size)).unwrap();
            let config = DislocationConfig::single(Cell::origin(), 1);
            let (_, s) = config_metrics(&config, &complex).unwrap();
            let corr = solve_boundary_corrector(&complex, &config, 1e-11).unwrap();
            xs.push(s.ln() / s);
            ys.push(corr.hessian_jump_proxy(&complex));
        }
        let fit = loglog_fit(&xs, &ys).unwrap();
        assert!(
            (0.6..=1.4).contains(&fit.slope),
            "proxy slope vs log(S)/S: {}",
            fit.slope
        );
    }
}
