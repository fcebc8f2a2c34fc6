//! Convex lattice polygons: corner validation, lattice tangents,
//! boundary periods and the boundary index.

use super::{LatticeComplex, Site};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Integer plane coordinates `(2m + n, n)` in which orientation tests for
/// site positions are exact.
fn uv(s: Site) -> (i64, i64) {
    (2 * s.m + s.n, s.n)
}

fn cross_uv(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 - b.0, a.1 - b.1)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(super) fn validate_corners(corners: &[Site]) -> Result<()> {
    if corners.len() < 3 {
        return Err(Error::InvalidPolygon(format!(
            "{} corners, need at least 3",
            corners.len()
        )));
    }
    for i in 0..corners.len() {
        for j in (i + 1)..corners.len() {
            if corners[i] == corners[j] {
                return Err(Error::InvalidPolygon("duplicate corner".into()));
            }
        }
    }
    let k = corners.len();
    let mut negatives = 0;
    for i in 0..k {
        let a = uv(corners[i]);
        let b = uv(corners[(i + 1) % k]);
        let c = uv(corners[(i + 2) % k]);
        let turn = cross_uv(sub(b, a), sub(c, b));
        if turn == 0 {
            return Err(Error::InvalidPolygon("collinear corners".into()));
        }
        if turn < 0 {
            negatives += 1;
        }
    }
    if negatives == k {
        return Err(Error::InvalidPolygon(
            "corners are clockwise, expected positive orientation".into(),
        ));
    }
    if negatives > 0 {
        return Err(Error::InvalidPolygon("corners not in convex position".into()));
    }
    Ok(())
}

/// All lattice sites inside the closed convex hull of the corners.
pub(super) fn enumerate_polygon_sites(corners: &[Site]) -> Vec<Site> {
    let m_min = corners.iter().map(|c| c.m).min().unwrap();
    let m_max = corners.iter().map(|c| c.m).max().unwrap();
    let n_min = corners.iter().map(|c| c.n).min().unwrap();
    let n_max = corners.iter().map(|c| c.n).max().unwrap();
    let k = corners.len();
    let mut out = Vec::new();
    for n in n_min..=n_max {
        for m in m_min..=m_max {
            let s = Site::new(m, n);
            let p = uv(s);
            let inside = (0..k).all(|i| {
                let a = uv(corners[i]);
                let b = uv(corners[(i + 1) % k]);
                cross_uv(sub(b, a), sub(p, a)) >= 0
            });
            if inside {
                out.push(s);
            }
        }
    }
    out
}

/// One straight segment of the hull boundary.
#[derive(Debug, Clone)]
pub struct SegmentInfo {
    pub from: Site,
    pub to: Site,
    /// primitive lattice tangent in `(m, n)` coordinates
    pub tangent: (i64, i64),
    /// number of tangent periods along the segment
    pub multiplicity: usize,
    /// length of the boundary walk over each period
    pub periods: Vec<f64>,
    /// maximal period length along this segment
    pub index: f64,
}

#[derive(Debug, Clone)]
pub struct ConvexLatticePolygon {
    pub corners: Vec<Site>,
    pub segments: Vec<SegmentInfo>,
    /// maximal period length over all segments
    pub index: f64,
}

impl ConvexLatticePolygon {
    /// If the site lies on the hull boundary, the first segment it lies on
    /// and its integer offset along the tangent. Exact test.
    pub fn site_on_hull(&self, s: Site) -> Option<(usize, i64)> {
        let p = uv(s);
        for (i, seg) in self.segments.iter().enumerate() {
            let a = uv(seg.from);
            let d = sub(uv(seg.to), a);
            let r = sub(p, a);
            if cross_uv(d, r) != 0 {
                continue;
            }
            // r parallel to the primitive tangent: integer offset along it
            let tau = (2 * seg.tangent.0 + seg.tangent.1, seg.tangent.1);
            let t = if tau.0 != 0 {
                if r.0 % tau.0 != 0 {
                    continue;
                }
                r.0 / tau.0
            } else {
                if tau.1 == 0 || r.1 % tau.1 != 0 {
                    continue;
                }
                r.1 / tau.1
            };
            if t >= 0 && t <= seg.multiplicity as i64 {
                return Some((i, t));
            }
        }
        None
    }

    /// Outward unit normal of segment `i`.
    pub fn outward_normal(&self, i: usize) -> Vec2 {
        let seg = &self.segments[i];
        let t = (seg.to.position() - seg.from.position()).normalized();
        // positively-oriented hull: outward normal is the tangent rotated -90
        Vec2::new(t.y, -t.x)
    }
}

pub(super) fn build_geometry(
    corners: &[Site],
    complex: &LatticeComplex,
) -> Result<ConvexLatticePolygon> {
    let cycles = complex.boundary_cycles();
    if cycles.len() != 1 {
        return Err(Error::InvalidPolygon(format!(
            "expected one boundary walk, found {}",
            cycles.len()
        )));
    }
    let cycle = &cycles[0];
    let k = corners.len();

    let mut segments = Vec::with_capacity(k);
    for i in 0..k {
        let from = corners[i];
        let to = corners[(i + 1) % k];
        let dm = to.m - from.m;
        let dn = to.n - from.n;
        let g = gcd(dm, dn);
        segments.push(SegmentInfo {
            from,
            to,
            tangent: (dm / g, dn / g),
            multiplicity: g as usize,
            periods: Vec::new(),
            index: 0.0,
        });
    }

    // Rotate the walk to start at the first corner, then march through the
    // period endpoints of every segment in order. Every boundary bond has
    // unit length, so period lengths are bond counts.
    let start_idx = complex
        .site_lookup(corners[0])
        .ok_or_else(|| Error::InvalidPolygon("corner not in window".into()))? as u32;
    let offset = cycle
        .iter()
        .position(|&s| s == start_idx)
        .ok_or_else(|| Error::InvalidPolygon("corner not on boundary walk".into()))?;
    let len = cycle.len();
    let at = |w: usize| cycle[(offset + w) % len];

    let mut walk = 0usize;
    for seg in segments.iter_mut() {
        let mut marks = Vec::with_capacity(seg.multiplicity + 1);
        for j in 0..=seg.multiplicity {
            let z = Site::new(
                seg.from.m + j as i64 * seg.tangent.0,
                seg.from.n + j as i64 * seg.tangent.1,
            );
            let zi = complex
                .site_lookup(z)
                .ok_or_else(|| Error::InvalidPolygon("period endpoint missing".into()))?
                as u32;
            marks.push(zi);
        }
        for j in 0..seg.multiplicity {
            if at(walk) != marks[j] {
                return Err(Error::InvalidPolygon(
                    "boundary walk out of step with period endpoints".into(),
                ));
            }
            let mut steps = 0usize;
            loop {
                walk += 1;
                steps += 1;
                if at(walk % len) == marks[j + 1] {
                    break;
                }
                if steps > len {
                    return Err(Error::InvalidPolygon(
                        "boundary walk does not reach period endpoint".into(),
                    ));
                }
            }
            seg.periods.push(steps as f64);
        }
        seg.index = seg.periods.iter().cloned().fold(0.0, f64::max);
    }
    if walk != len {
        return Err(Error::InvalidPolygon(
            "boundary walk longer than the period decomposition".into(),
        ));
    }

    let index = segments.iter().map(|s| s.index).fold(0.0, f64::max);
    Ok(ConvexLatticePolygon {
        corners: corners.to_vec(),
        segments,
        index,
    })
}

/// Corners of a hexagonal window with all six edges along unit lattice
/// directions (boundary index 1), invariant under 120 degree rotation about
/// the origin. `size` controls the apothem; corners sit at radius
/// `sqrt(size^2 + size + 1/3)`.
pub fn hexagon_corners(size: i64) -> Vec<Site> {
    assert!(size >= 1, "hexagon size must be at least 1");
    let m = size;
    vec![
        Site::new(m, 0),
        Site::new(0, m),
        Site::new(-1 - m, m),
        Site::new(-1 - m, 0),
        Site::new(0, -1 - m),
        Site::new(m, -1 - m),
    ]
}
