//! The triangular lattice complex: sites, oriented bonds, oriented cells,
//! finite windows, boundary structure and lattice automorphisms.
//!
//! Site identity is the integer coordinate pair `(m, n)` with respect to the
//! basis `a1 = (1, 0)`, `a2 = (1/2, sqrt(3)/2)` applied to the offset
//! `(a1 + a2) / 3`. All incidence tests are exact integer arithmetic;
//! floating positions are derived and never compared for equality.

mod polygon;

pub use polygon::{hexagon_corners, ConvexLatticePolygon, SegmentInfo};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{convex_distance, Vec2};

const SQRT3: f64 = 1.732050807568877293527446341505872367_f64;

/// A lattice site, identified by its integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Site {
    pub m: i64,
    pub n: i64,
}

impl Site {
    pub fn new(m: i64, n: i64) -> Site {
        Site { m, n }
    }

    /// Cartesian position `(a1 + a2)/3 + m a1 + n a2`.
    pub fn position(self) -> Vec2 {
        let m = self.m as f64;
        let n = self.n as f64;
        Vec2::new(0.5 + m + 0.5 * n, SQRT3 * (1.0 + 3.0 * n) / 6.0)
    }

    /// `12 |position|^2`, computed exactly.
    pub fn norm12(self) -> i64 {
        let a = 1 + 2 * self.m + self.n;
        let b = 1 + 3 * self.n;
        3 * a * a + b * b
    }

    pub fn neighbor(self, dir: Dir) -> Site {
        let (dm, dn) = dir.step();
        Site::new(self.m + dm, self.n + dn)
    }
}

/// One of the six nearest-neighbour directions, numbered 1..=6
/// counterclockwise from `a1 = (1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dir(u8);

impl Dir {
    pub const ALL: [Dir; 6] = [Dir(1), Dir(2), Dir(3), Dir(4), Dir(5), Dir(6)];
    pub const CANONICAL: [Dir; 3] = [Dir(1), Dir(2), Dir(3)];

    pub fn new(i: u8) -> Dir {
        assert!((1..=6).contains(&i), "direction index out of range");
        Dir(i)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Lattice coordinate step of `a_i`.
    pub fn step(self) -> (i64, i64) {
        match self.0 {
            1 => (1, 0),
            2 => (0, 1),
            3 => (-1, 1),
            4 => (-1, 0),
            5 => (0, -1),
            6 => (1, -1),
            _ => unreachable!(),
        }
    }

    pub fn vector(self) -> Vec2 {
        let h = SQRT3 / 2.0;
        match self.0 {
            1 => Vec2::new(1.0, 0.0),
            2 => Vec2::new(0.5, h),
            3 => Vec2::new(-0.5, h),
            4 => Vec2::new(-1.0, 0.0),
            5 => Vec2::new(-0.5, -h),
            6 => Vec2::new(0.5, -h),
            _ => unreachable!(),
        }
    }

    pub fn reverse(self) -> Dir {
        Dir((self.0 - 1 + 3) % 6 + 1)
    }

    /// Rotation by +60 degrees: `a_i -> a_{i+1}`.
    pub fn rot60(self) -> Dir {
        Dir(self.0 % 6 + 1)
    }

    pub fn rot_minus60(self) -> Dir {
        Dir((self.0 + 4) % 6 + 1)
    }

    /// Canonical orientation stores directions 1..=3 only.
    pub fn is_canonical(self) -> bool {
        self.0 <= 3
    }
}

/// An oriented bond `(tail, tail + a_dir)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub tail: Site,
    pub dir: Dir,
}

impl Bond {
    pub fn new(tail: Site, dir: Dir) -> Bond {
        Bond { tail, dir }
    }

    pub fn head(self) -> Site {
        self.tail.neighbor(self.dir)
    }

    pub fn reverse(self) -> Bond {
        Bond::new(self.head(), self.dir.reverse())
    }

    /// Canonical representative and the sign of this orientation relative
    /// to it (+1 when already canonical).
    pub fn canonical(self) -> (Bond, f64) {
        if self.dir.is_canonical() {
            (self, 1.0)
        } else {
            (self.reverse(), -1.0)
        }
    }

    pub fn midpoint(self) -> Vec2 {
        (self.tail.position() + self.head().position()) * 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// A positively-oriented (counterclockwise) triangle, keyed by anchor site
/// and orientation. The up triangle at `s` has vertices `(s, s+a1, s+a2)`,
/// the down triangle `(s, s+a2, s+a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub anchor: Site,
    pub orientation: Orientation,
}

impl Cell {
    pub fn new(anchor: Site, orientation: Orientation) -> Cell {
        Cell {
            anchor,
            orientation,
        }
    }

    /// The cell whose barycentre is the origin.
    pub fn origin() -> Cell {
        Cell::new(Site::new(0, -1), Orientation::Down)
    }

    /// Vertices in counterclockwise order, anchor first.
    pub fn vertices(self) -> [Site; 3] {
        let s = self.anchor;
        match self.orientation {
            Orientation::Up => [s, s.neighbor(Dir(1)), s.neighbor(Dir(2))],
            Orientation::Down => [s, s.neighbor(Dir(2)), s.neighbor(Dir(3))],
        }
    }

    /// The three positively-oriented boundary bonds.
    pub fn boundary_bonds(self) -> [Bond; 3] {
        let [v0, v1, v2] = self.vertices();
        match self.orientation {
            Orientation::Up => [
                Bond::new(v0, Dir(1)),
                Bond::new(v1, Dir(3)),
                Bond::new(v2, Dir(5)),
            ],
            Orientation::Down => [
                Bond::new(v0, Dir(2)),
                Bond::new(v1, Dir(4)),
                Bond::new(v2, Dir(6)),
            ],
        }
    }

    pub fn barycenter(self) -> Vec2 {
        let p = self.anchor.position();
        match self.orientation {
            Orientation::Up => p + Vec2::new(0.5, SQRT3 / 6.0),
            Orientation::Down => p + Vec2::new(0.0, SQRT3 / 3.0),
        }
    }

    /// Recover a cell from its vertex set, in any order.
    pub fn from_vertices(mut v: [Site; 3]) -> Option<Cell> {
        v.sort_by_key(|s| (s.n, s.m));
        let min_n = v[0].n;
        let low: Vec<Site> = v.iter().copied().filter(|s| s.n == min_n).collect();
        let cell = if low.len() == 2 {
            Cell::new(low[0], Orientation::Up)
        } else if low.len() == 1 {
            Cell::new(low[0], Orientation::Down)
        } else {
            return None;
        };
        let mut w = cell.vertices();
        w.sort_by_key(|s| (s.n, s.m));
        if w == v {
            Some(cell)
        } else {
            None
        }
    }
}

/// The lattice automorphism pair `(G, H)` attached to a cell: `G` maps the
/// lattice to itself with `G(C) = C_0`, and `H` is its inverse. Cells in the
/// orientation class of `C_0` map by a pure translation; the others pick up
/// one +60 degree rotation.
#[derive(Debug, Clone, Copy)]
pub struct CellAutomorphism {
    cell: Cell,
}

impl CellAutomorphism {
    pub fn of(cell: Cell) -> CellAutomorphism {
        CellAutomorphism { cell }
    }

    /// Number of +60 degree rotation steps in `G` (0 or 1).
    pub fn rotation_steps(&self) -> u8 {
        match self.cell.orientation {
            Orientation::Down => 0,
            Orientation::Up => 1,
        }
    }

    pub fn forward_site(&self, s: Site) -> Site {
        let (mu, nu) = (self.cell.anchor.m, self.cell.anchor.n);
        match self.cell.orientation {
            Orientation::Down => Site::new(s.m - mu, s.n - nu - 1),
            Orientation::Up => Site::new(nu - s.n, s.m - mu + s.n - nu - 1),
        }
    }

    pub fn inverse_site(&self, s: Site) -> Site {
        let (mu, nu) = (self.cell.anchor.m, self.cell.anchor.n);
        match self.cell.orientation {
            Orientation::Down => Site::new(s.m + mu, s.n + nu + 1),
            Orientation::Up => Site::new(s.m + s.n + mu + 1, nu - s.m),
        }
    }

    pub fn forward_bond(&self, b: Bond) -> Bond {
        let dir = match self.cell.orientation {
            Orientation::Down => b.dir,
            Orientation::Up => b.dir.rot60(),
        };
        Bond::new(self.forward_site(b.tail), dir)
    }

    pub fn inverse_bond(&self, b: Bond) -> Bond {
        let dir = match self.cell.orientation {
            Orientation::Down => b.dir,
            Orientation::Up => b.dir.rot_minus60(),
        };
        Bond::new(self.inverse_site(b.tail), dir)
    }

    pub fn forward_cell(&self, c: Cell) -> Cell {
        let [v0, v1, v2] = c.vertices();
        Cell::from_vertices([
            self.forward_site(v0),
            self.forward_site(v1),
            self.forward_site(v2),
        ])
        .expect("automorphism image of a cell is a cell")
    }

    pub fn inverse_cell(&self, c: Cell) -> Cell {
        let [v0, v1, v2] = c.vertices();
        Cell::from_vertices([
            self.inverse_site(v0),
            self.inverse_site(v1),
            self.inverse_site(v2),
        ])
        .expect("automorphism preimage of a cell is a cell")
    }

    /// `G(x) = R6^i (x - x^C)` on the plane.
    pub fn forward_point(&self, x: Vec2) -> Vec2 {
        let shifted = x - self.cell.barycenter();
        match self.cell.orientation {
            Orientation::Down => shifted,
            Orientation::Up => shifted.rot60(),
        }
    }

    pub fn inverse_point(&self, x: Vec2) -> Vec2 {
        let rotated = match self.cell.orientation {
            Orientation::Down => x,
            Orientation::Up => {
                // R6^{-1}
                let (c, s) = (0.5, SQRT3 / 2.0);
                Vec2::new(c * x.x + s * x.y, -s * x.x + c * x.y)
            }
        };
        rotated + self.cell.barycenter()
    }
}

#[derive(Debug, Clone)]
pub enum WindowKind {
    /// Finite computational window standing in for the full lattice.
    Ball { radius: f64 },
    Polygon { geometry: ConvexLatticePolygon },
}

const NONE_U32: u32 = u32::MAX;

/// The CW complex of a finite lattice window.
#[derive(Debug)]
pub struct LatticeComplex {
    sites: Vec<Site>,
    positions: Vec<Vec2>,
    site_index: HashMap<Site, u32>,
    /// flattened `6 * n_sites` neighbour table (NONE_U32 when absent)
    neighbors: Vec<u32>,
    bond_tail: Vec<u32>,
    bond_head: Vec<u32>,
    bond_dir: Vec<u8>,
    /// flattened `3 * n_sites` lookup from (tail, canonical dir) to bond id
    bond_at: Vec<u32>,
    cells: Vec<Cell>,
    cell_anchor: Vec<u32>,
    /// flattened `2 * n_sites` lookup from (anchor, orientation) to cell id
    cell_at: Vec<u32>,
    bond_cell_count: Vec<u8>,
    is_boundary_site: Vec<bool>,
    bond_is_boundary: Vec<bool>,
    /// for boundary bonds: whether the positively-oriented boundary
    /// traverses the canonical orientation
    bond_boundary_positive: Vec<bool>,
    /// closed boundary walks (site indices, counterclockwise around the
    /// filled region)
    boundary_cycles: Vec<Vec<u32>>,
    anchor: u32,
    kind: WindowKind,
}

/// Construct the ball window `|position| <= radius` around the origin.
pub fn build_ball(radius: f64) -> Result<LatticeComplex> {
    if !(radius >= 2.0) {
        return Err(Error::DegenerateDomain(format!(
            "ball radius {radius} below minimum 2"
        )));
    }
    let bound = 12.0 * radius * radius;
    let n_max = (1.2 * radius).ceil() as i64 + 2;
    let mut sites = Vec::new();
    for n in -n_max..=n_max {
        let m_span = radius.ceil() as i64 + 2;
        for m in (-m_span - n / 2 - 2)..=(m_span - n / 2 + 2) {
            let s = Site::new(m, n);
            if (s.norm12() as f64) <= bound {
                sites.push(s);
            }
        }
    }
    LatticeComplex::from_sites(sites, WindowKind::Ball { radius })
}

/// Construct the window of a convex lattice polygon given its corners in
/// positive (counterclockwise) orientation. The site set is
/// `conv(corners)` intersected with the lattice.
pub fn build_polygon(corners: &[Site]) -> Result<LatticeComplex> {
    polygon::validate_corners(corners)?;
    let sites = polygon::enumerate_polygon_sites(corners);
    let mut complex = LatticeComplex::from_sites(
        sites,
        WindowKind::Ball { radius: 0.0 }, // placeholder, replaced below
    )?;
    if complex.cell_index(Cell::origin()).is_none() {
        return Err(Error::OriginCellExcluded);
    }
    let geometry = polygon::build_geometry(corners, &complex)?;
    complex.kind = WindowKind::Polygon { geometry };
    Ok(complex)
}

impl LatticeComplex {
    fn from_sites(mut sites: Vec<Site>, kind: WindowKind) -> Result<LatticeComplex> {
        sites.sort_by_key(|s| (s.n, s.m));
        sites.dedup();
        if sites.len() < 3 {
            return Err(Error::DegenerateDomain(format!(
                "window contains only {} sites",
                sites.len()
            )));
        }
        let n_sites = sites.len();
        let positions: Vec<Vec2> = sites.iter().map(|s| s.position()).collect();
        let mut site_index = HashMap::with_capacity(n_sites);
        for (i, &s) in sites.iter().enumerate() {
            site_index.insert(s, i as u32);
        }

        let mut neighbors = vec![NONE_U32; 6 * n_sites];
        for (i, &s) in sites.iter().enumerate() {
            for dir in Dir::ALL {
                if let Some(&j) = site_index.get(&s.neighbor(dir)) {
                    neighbors[6 * i + (dir.index() - 1) as usize] = j;
                }
            }
        }

        let mut bond_tail = Vec::new();
        let mut bond_head = Vec::new();
        let mut bond_dir = Vec::new();
        let mut bond_at = vec![NONE_U32; 3 * n_sites];
        for i in 0..n_sites {
            for dir in Dir::CANONICAL {
                let j = neighbors[6 * i + (dir.index() - 1) as usize];
                if j != NONE_U32 {
                    bond_at[3 * i + (dir.index() - 1) as usize] = bond_tail.len() as u32;
                    bond_tail.push(i as u32);
                    bond_head.push(j);
                    bond_dir.push(dir.index());
                }
            }
        }

        let mut cells = Vec::new();
        let mut cell_anchor = Vec::new();
        let mut cell_at = vec![NONE_U32; 2 * n_sites];
        for (i, &s) in sites.iter().enumerate() {
            let up_ok = site_index.contains_key(&s.neighbor(Dir(1)))
                && site_index.contains_key(&s.neighbor(Dir(2)));
            if up_ok {
                cell_at[2 * i] = cells.len() as u32;
                cells.push(Cell::new(s, Orientation::Up));
                cell_anchor.push(i as u32);
            }
            let down_ok = site_index.contains_key(&s.neighbor(Dir(2)))
                && site_index.contains_key(&s.neighbor(Dir(3)));
            if down_ok {
                cell_at[2 * i + 1] = cells.len() as u32;
                cells.push(Cell::new(s, Orientation::Down));
                cell_anchor.push(i as u32);
            }
        }

        let mut complex = LatticeComplex {
            sites,
            positions,
            site_index,
            neighbors,
            bond_cell_count: vec![0; bond_tail.len()],
            bond_is_boundary: vec![false; bond_tail.len()],
            bond_boundary_positive: vec![false; bond_tail.len()],
            bond_tail,
            bond_head,
            bond_dir,
            bond_at,
            cells,
            cell_anchor,
            cell_at,
            is_boundary_site: vec![false; n_sites],
            boundary_cycles: Vec::new(),
            anchor: 0,
            kind,
        };

        for idx in 0..complex.cells.len() {
            for b in complex.cells[idx].boundary_bonds() {
                let (canon, _) = b.canonical();
                let k = complex
                    .bond_lookup(canon)
                    .expect("cell boundary bond in complex")
                    .0;
                complex.bond_cell_count[k] += 1;
            }
        }
        if let Some(k) = complex.bond_cell_count.iter().position(|&c| c == 0) {
            let b = complex.bond(k);
            return Err(Error::DegenerateDomain(format!(
                "bond ({},{})->dir{} belongs to no cell",
                b.tail.m,
                b.tail.n,
                b.dir.index()
            )));
        }

        // boundary sites: fewer than six neighbours
        for i in 0..n_sites {
            let full = (0..6).all(|d| complex.neighbors[6 * i + d] != NONE_U32);
            complex.is_boundary_site[i] = !full;
        }

        complex.walk_boundary()?;
        complex.anchor = complex.pick_anchor();
        Ok(complex)
    }

    /// Directed boundary edges are the cell-boundary bonds lying in exactly
    /// one cell, oriented so the filled region stays on the left; chained
    /// they form the positively-oriented boundary walks.
    fn walk_boundary(&mut self) -> Result<()> {
        let mut outgoing: HashMap<u32, Vec<(u32, usize, bool)>> = HashMap::new();
        let mut n_edges = 0usize;
        for idx in 0..self.cells.len() {
            for b in self.cells[idx].boundary_bonds() {
                let (canon, sign) = b.canonical();
                let k = self.bond_lookup(canon).unwrap().0;
                if self.bond_cell_count[k] == 1 {
                    let tail = self.site_index[&b.tail];
                    let head = self.site_index[&b.head()];
                    self.bond_is_boundary[k] = true;
                    self.bond_boundary_positive[k] = sign > 0.0;
                    outgoing.entry(tail).or_default().push((head, k, sign > 0.0));
                    n_edges += 1;
                }
            }
        }
        let mut used = vec![false; self.bond_tail.len()];
        let mut cycles = Vec::new();
        let mut starts: Vec<u32> = outgoing.keys().copied().collect();
        starts.sort_unstable();
        for &start in &starts {
            loop {
                // unused outgoing edge from `start`, smallest head first
                let next = outgoing[&start]
                    .iter()
                    .filter(|&&(_, k, _)| !used[k])
                    .min_by_key(|&&(h, _, _)| h)
                    .copied();
                let Some((mut here, k0, _)) = next else { break };
                used[k0] = true;
                let mut cycle = vec![start];
                while here != start {
                    cycle.push(here);
                    let step = outgoing
                        .get(&here)
                        .and_then(|v| {
                            v.iter()
                                .filter(|&&(_, k, _)| !used[k])
                                .min_by_key(|&&(h, _, _)| h)
                                .copied()
                        })
                        .ok_or_else(|| {
                            Error::DegenerateDomain("open boundary walk".into())
                        })?;
                    used[step.1] = true;
                    here = step.0;
                }
                cycles.push(cycle);
            }
        }
        let walked: usize = cycles.iter().map(|c| c.len()).sum();
        if walked != n_edges {
            return Err(Error::DegenerateDomain(
                "boundary walk did not consume all boundary bonds".into(),
            ));
        }
        self.boundary_cycles = cycles;
        Ok(())
    }

    /// Pinning site: minimal `|position|`, ties broken towards the vertex of
    /// the origin cell on the negative y-axis.
    fn pick_anchor(&self) -> u32 {
        let mut best = 0u32;
        let mut best_key = (i64::MAX, i64::MAX, i64::MAX);
        for (i, s) in self.sites.iter().enumerate() {
            let key = (s.norm12(), s.n, s.m);
            if key < best_key {
                best_key = key;
                best = i as u32;
            }
        }
        best
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_bonds(&self) -> usize {
        self.bond_tail.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn site(&self, idx: usize) -> Site {
        self.sites[idx]
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn position(&self, idx: usize) -> Vec2 {
        self.positions[idx]
    }

    pub fn site_lookup(&self, s: Site) -> Option<usize> {
        self.site_index.get(&s).map(|&i| i as usize)
    }

    pub fn neighbor(&self, site_idx: usize, dir: Dir) -> Option<usize> {
        let v = self.neighbors[6 * site_idx + (dir.index() - 1) as usize];
        (v != NONE_U32).then_some(v as usize)
    }

    pub fn bond(&self, idx: usize) -> Bond {
        Bond::new(
            self.sites[self.bond_tail[idx] as usize],
            Dir::new(self.bond_dir[idx]),
        )
    }

    /// Tail and head site indices of a canonical bond.
    pub fn bond_sites(&self, idx: usize) -> (usize, usize) {
        (self.bond_tail[idx] as usize, self.bond_head[idx] as usize)
    }

    /// Canonical bond id and orientation sign for an arbitrary oriented bond.
    pub fn bond_lookup(&self, b: Bond) -> Option<(usize, f64)> {
        let (canon, sign) = b.canonical();
        let &tail = self.site_index.get(&canon.tail)?;
        let k = self.bond_at[3 * tail as usize + (canon.dir.index() - 1) as usize];
        (k != NONE_U32).then_some((k as usize, sign))
    }

    pub fn cell(&self, idx: usize) -> Cell {
        self.cells[idx]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_anchor_index(&self, idx: usize) -> usize {
        self.cell_anchor[idx] as usize
    }

    pub fn cell_index(&self, c: Cell) -> Option<usize> {
        let &anchor = self.site_index.get(&c.anchor)?;
        let slot = match c.orientation {
            Orientation::Up => 0,
            Orientation::Down => 1,
        };
        let k = self.cell_at[2 * anchor as usize + slot];
        (k != NONE_U32).then_some(k as usize)
    }

    pub fn anchor_index(&self) -> usize {
        self.anchor as usize
    }

    pub fn anchor_site(&self) -> Site {
        self.sites[self.anchor as usize]
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.kind, WindowKind::Ball { .. })
    }

    pub fn ball_radius(&self) -> Option<f64> {
        match self.kind {
            WindowKind::Ball { radius } => Some(radius),
            WindowKind::Polygon { .. } => None,
        }
    }

    pub fn polygon(&self) -> Option<&ConvexLatticePolygon> {
        match &self.kind {
            WindowKind::Polygon { geometry } => Some(geometry),
            WindowKind::Ball { .. } => None,
        }
    }

    pub fn is_boundary_site(&self, idx: usize) -> bool {
        self.is_boundary_site[idx]
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_sites()).filter(|&i| self.is_boundary_site[i])
    }

    pub fn bond_is_boundary(&self, idx: usize) -> bool {
        self.bond_is_boundary[idx]
    }

    /// For a boundary bond: whether the positively-oriented boundary walk
    /// traverses its canonical orientation.
    pub fn bond_boundary_positive(&self, idx: usize) -> bool {
        self.bond_boundary_positive[idx]
    }

    pub fn bond_cell_count(&self, idx: usize) -> u8 {
        self.bond_cell_count[idx]
    }

    /// Closed boundary walks as site index sequences (no repeated endpoint).
    pub fn boundary_cycles(&self) -> &[Vec<u32>] {
        &self.boundary_cycles
    }

    /// Distance from a convex hull (given by its points) to the
    /// positively-oriented boundary of the filled region.
    pub fn boundary_distance(&self, hull: &[Vec2]) -> f64 {
        let mut best = f64::INFINITY;
        for cycle in &self.boundary_cycles {
            for w in 0..cycle.len() {
                let a = self.positions[cycle[w] as usize];
                let b = self.positions[cycle[(w + 1) % cycle.len()] as usize];
                best = best.min(convex_distance(hull, &[a, b]));
            }
        }
        best
    }
}

/// Convex hull points of a lattice element, for set distances.
pub trait LatticeElement {
    fn hull_points(&self) -> Vec<Vec2>;
}

impl LatticeElement for Site {
    fn hull_points(&self) -> Vec<Vec2> {
        vec![self.position()]
    }
}

impl LatticeElement for Bond {
    fn hull_points(&self) -> Vec<Vec2> {
        vec![self.tail.position(), self.head().position()]
    }
}

impl LatticeElement for Cell {
    fn hull_points(&self) -> Vec<Vec2> {
        self.vertices().iter().map(|v| v.position()).collect()
    }
}

/// Euclidean distance between the closed convex hulls of two elements.
pub fn dist(a: &impl LatticeElement, b: &impl LatticeElement) -> f64 {
    convex_distance(&a.hull_points(), &b.hull_points())
}
