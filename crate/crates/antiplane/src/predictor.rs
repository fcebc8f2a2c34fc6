//! Numerical core corrector, truncation operators and assembly of
//! approximate equilibria on ball and polygon windows.

use serde::Serialize;

use crate::elasticity::{hat_y, BoundaryCorrector};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LogLogFit};
use crate::forms::{config_metrics, finite_difference, Displacement, DislocationConfig};
use crate::geometry::Vec2;
use crate::lattice::{dist, Cell, CellAutomorphism, LatticeComplex};
use crate::solver::{min_eigenvalue, minimize_from, SolverOptions};

/// Smallest admissible ball window for the core-corrector computation.
pub const MIN_CORE_WINDOW: f64 = 16.0;

/// C1 cutoff profile: 1 on `t <= 3/4`, 0 on `t >= 1`, cubic ramp between.
pub fn cutoff(t: f64) -> f64 {
    if t <= 0.75 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let s = (t - 0.75) * 4.0;
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

/// Truncation parameters: radius (must exceed 2) and center cell.
#[derive(Debug, Clone, Copy)]
pub struct TruncationParams {
    radius: f64,
    center: Cell,
}

impl TruncationParams {
    pub fn new(radius: f64, center: Cell) -> Result<TruncationParams> {
        if !(radius > 2.0) {
            return Err(Error::WindowTooSmall(format!(
                "truncation radius {radius} must exceed 2"
            )));
        }
        Ok(TruncationParams { radius, center })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> Cell {
        self.center
    }
}

// ---------------------------------------------------------------------------
// exact integration of linear functions over triangle/disk intersections

/// Primitive `M(x, y)` with `dM/dx = c0 + c1 x + c2 y`, used with Green's
/// theorem: the area integral equals the counterclockwise contour integral
/// of `M dy`.
fn green_m(coef: [f64; 3], p: Vec2) -> f64 {
    coef[0] * p.x + 0.5 * coef[1] * p.x * p.x + coef[2] * p.x * p.y
}

/// `int M dy` along the straight segment `a -> b` (two-point Gauss rule,
/// exact for the cubic integrand).
fn segment_m_dy(coef: [f64; 3], a: Vec2, b: Vec2) -> f64 {
    const GP: f64 = 0.5773502691896257_f64; // 1/sqrt(3)
    let dy = b.y - a.y;
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let p1 = mid - half * GP;
    let p2 = mid + half * GP;
    0.5 * dy * (green_m(coef, p1) + green_m(coef, p2))
}

/// `int M dy` along the circular arc of `D(c, r)` from angle `t0`
/// counterclockwise by `dt`, in closed form.
fn arc_m_dy(coef: [f64; 3], c: Vec2, r: f64, t0: f64, dt: f64) -> f64 {
    let (c0, c1, c2) = (coef[0], coef[1], coef[2]);
    let k1 = r * (c0 * c.x + 0.5 * c1 * c.x * c.x + c2 * c.x * c.y);
    let k2 = r * r * (c0 + c1 * c.x + c2 * c.y);
    let k3 = 0.5 * c1 * r * r * r;
    let k4 = c2 * r * r * c.x;
    let k5 = c2 * r * r * r;
    let prim = |t: f64| {
        let (s, co) = t.sin_cos();
        k1 * s
            + k2 * 0.5 * (t + s * co)
            + k3 * (s - s * s * s / 3.0)
            + k4 * 0.5 * s * s
            + k5 * (-co * co * co / 3.0)
    };
    prim(t0 + dt) - prim(t0)
}

/// Exact integral of the linear function `c0 + c1 x + c2 y` over the
/// intersection of a counterclockwise triangle with a closed disk.
fn integrate_linear_tri_disk(tri: [Vec2; 3], center: Vec2, radius: f64, coef: [f64; 3]) -> f64 {
    let r2 = radius * radius;
    let inside = |p: Vec2| (p - center).norm_sq() <= r2;

    // sub-segments of the triangle edges lying inside the disk
    let mut pieces: Vec<(Vec2, Vec2)> = Vec::new();
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let d = b - a;
        let f = a - center;
        let qa = d.norm_sq();
        let qb = 2.0 * d.dot(f);
        let qc = f.norm_sq() - r2;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let t0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
        let t1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
        if t1 - t0 > 1e-12 {
            pieces.push((a + d * t0, a + d * t1));
        }
    }

    if pieces.is_empty() {
        if tri.iter().all(|&p| inside(p)) {
            // whole triangle: area times the value at the centroid
            let area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
            let g = (tri[0] + tri[1] + tri[2]) / 3.0;
            return area * (coef[0] + coef[1] * g.x + coef[2] * g.y);
        }
        // whole disk if its center lies inside the triangle
        let mut contained = true;
        for i in 0..3 {
            let a = tri[i];
            let b = tri[(i + 1) % 3];
            if (b - a).cross(center - a) < 0.0 {
                contained = false;
                break;
            }
        }
        if contained {
            return std::f64::consts::PI * r2 * (coef[0] + coef[1] * center.x + coef[2] * center.y);
        }
        return 0.0;
    }

    let mut total = 0.0;
    let np = pieces.len();
    for (i, &(a, b)) in pieces.iter().enumerate() {
        total += segment_m_dy(coef, a, b);
        let next = pieces[(i + 1) % np].0;
        if (b - next).norm() > 1e-9 {
            // connect along the circle, counterclockwise
            let t0 = (b.y - center.y).atan2(b.x - center.x);
            let t1 = (next.y - center.y).atan2(next.x - center.x);
            let mut dt = t1 - t0;
            while dt < 0.0 {
                dt += std::f64::consts::TAU;
            }
            while dt >= std::f64::consts::TAU {
                dt -= std::f64::consts::TAU;
            }
            total += arc_m_dy(coef, center, radius, t0, dt);
        }
    }
    total
}

/// Integral of the P1 interpolant of `u` (and of 1) over the annulus
/// `B_outer(center) minus B_inner(center)`, by exact per-cell quadrature.
fn annulus_interpolant_integral(
    complex: &LatticeComplex,
    u: &Displacement,
    center: Vec2,
    inner: f64,
    outer: f64,
) -> Result<(f64, f64)> {
    let mut val = 0.0;
    let mut area = 0.0;
    let reach = outer + 1.0;
    for idx in 0..complex.n_cells() {
        let cell = complex.cell(idx);
        let bc = cell.barycenter();
        if (bc - center).norm() > reach {
            continue;
        }
        let vs = cell.vertices();
        let tri = [vs[0].position(), vs[1].position(), vs[2].position()];
        let vals = [
            u.get(complex.site_lookup(vs[0]).unwrap()),
            u.get(complex.site_lookup(vs[1]).unwrap()),
            u.get(complex.site_lookup(vs[2]).unwrap()),
        ];
        let area2 = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        let c1 = (vals[0] * (tri[1].y - tri[2].y)
            + vals[1] * (tri[2].y - tri[0].y)
            + vals[2] * (tri[0].y - tri[1].y))
            / area2;
        let c2 = (vals[0] * (tri[2].x - tri[1].x)
            + vals[1] * (tri[0].x - tri[2].x)
            + vals[2] * (tri[1].x - tri[0].x))
            / area2;
        let c0 = vals[0] - c1 * tri[0].x - c2 * tri[0].y;
        let coef = [c0, c1, c2];
        val += integrate_linear_tri_disk(tri, center, outer, coef)
            - integrate_linear_tri_disk(tri, center, inner, coef);
        area += integrate_linear_tri_disk(tri, center, outer, [1.0, 0.0, 0.0])
            - integrate_linear_tri_disk(tri, center, inner, [1.0, 0.0, 0.0]);
    }
    let expected = std::f64::consts::PI * (outer * outer - inner * inner);
    if (area - expected).abs() > 1e-6 * expected {
        return Err(Error::WindowTooSmall(format!(
            "annulus of radii ({inner}, {outer}) not covered by the window \
             (covered area {area:.6}, expected {expected:.6})"
        )));
    }
    Ok((val, area))
}

/// Truncation operator: `(Pi_R u)(x) = eta((x - x^C)/R) (u(x) - a)` where
/// `a` is the exact mean of the P1 interpolant of `u` over the annulus
/// `B_R minus B_{R/2+1}` around the center cell.
pub fn truncate(
    complex: &LatticeComplex,
    u: &Displacement,
    params: TruncationParams,
) -> Result<Displacement> {
    let r = params.radius;
    let center = params.center.barycenter();
    let (val, area) = annulus_interpolant_integral(complex, u, center, 0.5 * r + 1.0, r)?;
    let mean = val / area;
    let mut out = Displacement::zeros(complex);
    for i in 0..complex.n_sites() {
        let t = (complex.position(i) - center).norm() / r;
        if t < 1.0 {
            out.set(i, cutoff(t) * (u.get(i) - mean));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
}

/// The numerically computed core corrector on a ball window, together with
/// its stability constant estimate and decay fit.
#[derive(Debug)]
pub struct CoreCorrector {
    pub u: Displacement,
    pub lambda_d: f64,
    pub decay: DecayFit,
    pub window_radius: f64,
    pub residual: f64,
    pub newton_iters: usize,
}

/// Envelope fit of `|Du_b|` against `dist(b, C_0)`: bonds are binned into
/// integer radial shells and the shell maxima are fitted in log-log form.
fn corrector_decay_fit(complex: &LatticeComplex, u: &Displacement) -> Option<LogLogFit> {
    let c0 = Cell::origin();
    let du = finite_difference(complex, u);
    let r_max = complex.ball_radius()? * 0.55;
    let mut shells: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for k in 0..complex.n_bonds() {
        let b = complex.bond(k);
        let d = dist(&b, &c0);
        if d < 2.0 || d > r_max {
            continue;
        }
        let shell = d.round() as i64;
        let entry = shells.entry(shell).or_insert(0.0);
        *entry = entry.max(du.get(k).abs());
    }
    let xs: Vec<f64> = shells.keys().map(|&r| r as f64).collect();
    let ys: Vec<f64> = shells.values().copied().collect();
    loglog_fit(&xs, &ys)
}

/// The screw-dislocation field evaluated at the window sites.
pub fn hat_displacement(complex: &LatticeComplex) -> Displacement {
    Displacement::from_fn(complex, |i| {
        hat_y(complex.position(i)).expect("lattice sites avoid the singularity")
    })
}

/// Newton computation of the core corrector `u` such that `hat_y + u` is an
/// equilibrium on the ball window (zero clamp on the rim), with the
/// smallest stability eigenvalue and the decay fit of `Du`.
pub fn compute_core_corrector(
    model: &EnergyModel,
    tol: f64,
    opts: &SolverOptions,
) -> Result<CoreCorrector> {
    let complex = model.complex;
    let radius = complex.ball_radius().ok_or_else(|| {
        Error::WindowTooSmall("core corrector needs a ball window".into())
    })?;
    if radius < MIN_CORE_WINDOW {
        return Err(Error::WindowTooSmall(format!(
            "window {radius} below minimum {MIN_CORE_WINDOW} for the core corrector"
        )));
    }
    if !model.potential.is_smooth() {
        return Err(Error::NondifferentiablePoint { value: 0.5 });
    }
    let base = hat_displacement(complex);
    let (u, newton_iters, residual) = minimize_from(model, &base, tol, 200, opts)?;

    let mut y = base.clone();
    y.add_scaled(1.0, &u);
    let lambda_d = min_eigenvalue(model, &y, opts.eigen_tol, opts)?;
    if lambda_d <= 0.0 {
        return Err(Error::CoreUnstable { lambda: lambda_d });
    }
    let fit = corrector_decay_fit(complex, &u)
        .ok_or_else(|| Error::NoConvergence("corrector decay fit failed".into()))?;
    Ok(CoreCorrector {
        u,
        lambda_d,
        decay: DecayFit {
            exponent: fit.slope,
            prefactor: fit.prefactor(),
        },
        window_radius: radius,
        residual,
        newton_iters,
    })
}

fn validate_core_complex(core: &CoreCorrector, core_complex: &LatticeComplex) -> Result<()> {
    if core_complex.n_sites() != core.u.len()
        || core_complex.ball_radius() != Some(core.window_radius)
    {
        return Err(Error::WindowTooSmall(
            "core corrector does not match the supplied window".into(),
        ));
    }
    Ok(())
}

fn default_truncation_radius(
    l_d: f64,
    s_d: f64,
    core: &CoreCorrector,
    cores: &[(Cell, i8)],
    window: &LatticeComplex,
) -> f64 {
    let mut r = l_d / 5.0;
    if s_d.is_finite() {
        r = r.min(s_d.sqrt());
    }
    r = r.min(core.window_radius - 2.0);
    if let Some(w) = window.ball_radius() {
        let reach = cores
            .iter()
            .map(|&(c, _)| c.barycenter().norm())
            .fold(0.0f64, f64::max);
        r = r.min(w - reach - 1.0);
    }
    r
}

fn check_truncation_geometry(
    config: &DislocationConfig,
    r: f64,
    window: &LatticeComplex,
) -> Result<()> {
    if !(r > 2.0) {
        return Err(Error::CoresTooClose(format!(
            "truncation radius {r:.3} does not exceed 2"
        )));
    }
    let cores = config.cores();
    for i in 0..cores.len() {
        for j in (i + 1)..cores.len() {
            let d = (cores[i].0.barycenter() - cores[j].0.barycenter()).norm();
            if d <= 2.0 * r {
                return Err(Error::CoresTooClose(format!(
                    "truncation balls of radius {r:.3} overlap at separation {d:.3}"
                )));
            }
        }
    }
    match window.ball_radius() {
        Some(w) => {
            for &(c, _) in cores {
                if c.barycenter().norm() + r > w {
                    return Err(Error::WindowTooSmall(format!(
                        "truncation ball of radius {r:.3} leaves the window"
                    )));
                }
            }
        }
        None => {
            for &(c, _) in cores {
                let d = window.boundary_distance(&crate::lattice::LatticeElement::hull_points(&c));
                if d <= r {
                    return Err(Error::CoresTooClose(format!(
                        "truncation ball of radius {r:.3} reaches the boundary \
                         (core clearance {d:.3})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Superpose `sign * (hat_y + Pi_R u) o G^C` over the configuration at the
/// window sites. The result is shifted so the anchor site reads zero.
fn superpose(
    window: &LatticeComplex,
    config: &DislocationConfig,
    truncated: &Displacement,
    core_complex: &LatticeComplex,
    r: f64,
) -> Result<Displacement> {
    let autos: Vec<(CellAutomorphism, f64)> = config
        .cores()
        .iter()
        .map(|&(c, s)| (CellAutomorphism::of(c), s as f64))
        .collect();
    let mut z = Displacement::zeros(window);
    for i in 0..window.n_sites() {
        let site = window.site(i);
        let mut total = 0.0;
        for (auto, sign) in &autos {
            let mapped = auto.forward_site(site);
            let pos = mapped.position();
            let mut contribution = hat_y(pos)?;
            if pos.norm() < r {
                let idx = core_complex.site_lookup(mapped).ok_or_else(|| {
                    Error::WindowTooSmall(
                        "truncated corrector support leaves the core window".into(),
                    )
                })?;
                contribution += truncated.get(idx);
            }
            total += sign * contribution;
        }
        z.set(i, total);
    }
    z.rebase_to_anchor(window);
    Ok(z)
}

/// Approximate equilibrium on a ball window standing in for the full
/// lattice: truncated single-core solutions superposed over the
/// configuration. The default truncation radius is a fifth of the minimum
/// separation.
pub fn assemble_predictor_infinite(
    window: &LatticeComplex,
    config: &DislocationConfig,
    core: &CoreCorrector,
    core_complex: &LatticeComplex,
    radius: Option<f64>,
) -> Result<Displacement> {
    validate_core_complex(core, core_complex)?;
    if !window.is_ball() {
        return Err(Error::WindowTooSmall(
            "infinite-lattice predictor needs a ball window".into(),
        ));
    }
    let (l_d, s_d) = config_metrics(config, window)?;
    let r = radius.unwrap_or_else(|| {
        default_truncation_radius(l_d, s_d, core, config.cores(), window)
    });
    check_truncation_geometry(config, r, window)?;
    if r > core.window_radius - 2.0 {
        return Err(Error::WindowTooSmall(format!(
            "truncation radius {r:.3} needs a core window larger than {:.1}",
            core.window_radius
        )));
    }
    let params = TruncationParams::new(r, Cell::origin())?;
    let truncated = truncate(core_complex, &core.u, params)?;
    superpose(window, config, &truncated, core_complex, r)
}

/// Approximate equilibrium on a polygon window: the superposed truncated
/// cores plus the boundary corrector. The default truncation radius is
/// `min(L/5, sqrt(S))`.
pub fn assemble_predictor_polygon(
    window: &LatticeComplex,
    config: &DislocationConfig,
    core: &CoreCorrector,
    core_complex: &LatticeComplex,
    radius: Option<f64>,
    corrector: &BoundaryCorrector,
) -> Result<Displacement> {
    validate_core_complex(core, core_complex)?;
    if window.polygon().is_none() {
        return Err(Error::InvalidPolygon(
            "polygon predictor needs a polygon window".into(),
        ));
    }
    if corrector.config() != config {
        return Err(Error::MismatchedCorrector);
    }
    if config.is_empty() {
        return Ok(Displacement::zeros(window));
    }
    let (l_d, s_d) = config_metrics(config, window)?;
    let r = radius.unwrap_or_else(|| {
        default_truncation_radius(l_d, s_d, core, config.cores(), window)
    });
    check_truncation_geometry(config, r, window)?;
    let params = TruncationParams::new(r, Cell::origin())?;
    let truncated = truncate(core_complex, &core.u, params)?;
    let mut z = superpose(window, config, &truncated, core_complex, r)?;
    z.add_scaled(1.0, corrector.nodal());
    z.rebase_to_anchor(window);
    Ok(z)
}

/// Which separation a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// two like-signed cores at growing separation on a ball window
    Separation,
    /// one core centered in growing hexagonal windows
    BoundaryDistance,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// run the Newton correction per row and record the corrector norm
    pub measure_dw: bool,
    /// ball window radius as a multiple of the largest sweep value
    pub window_factor: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> SweepSpec {
        SweepSpec {
            parameter,
            values,
            measure_dw: parameter == SweepParameter::BoundaryDistance,
            window_factor: 4.0,
            newton_tol: 1e-8,
            newton_max_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub case_id: String,
    /// requested parameter value
    pub parameter: f64,
    /// measured separation (actual `L` or `S` of the built configuration)
    pub measured: f64,
    pub residual: Option<f64>,
    pub dw_norm: Option<f64>,
    pub lambda_min: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub residual_slope: Option<f64>,
    pub dw_slope: Option<f64>,
}

/// Pick the hexagon size parameter so the centered core sits at boundary
/// distance close to `s`.
pub fn hexagon_size_for_boundary_distance(s: f64) -> i64 {
    // the nearest hull segment sits at apothem sqrt(3)(1+3m)/6 from the
    // origin; the core triangle reaches out by its circumradius
    let m = ((6.0 * (s + 1.0 / 3f64.sqrt()) / 3f64.sqrt() - 1.0) / 3.0).round();
    m.max(2.0) as i64
}

/// Build the predictor for each sweep value, measure its dual residual
/// (and, when requested, the Newton corrector norm), and fit log-log decay
/// slopes against the measured separations. Failed rows are recorded and
/// skipped by the fits.
pub fn residual_decay_data(
    spec: &SweepSpec,
    potential: crate::energy::Potential,
    core: &CoreCorrector,
    core_complex: &LatticeComplex,
    opts: &SolverOptions,
) -> Result<SweepTable> {
    if spec.values.len() < 3 {
        return Err(Error::EmptySweep);
    }
    if spec.values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::EmptySweep);
    }

    let mut rows = Vec::new();
    let shared_window = match spec.parameter {
        SweepParameter::Separation => {
            let radius = spec.window_factor * spec.values.last().unwrap();
            Some(crate::lattice::build_ball(radius)?)
        }
        SweepParameter::BoundaryDistance => None,
    };

    for &value in &spec.values {
        let row = run_sweep_row(spec, value, potential, core, core_complex, shared_window.as_ref(), opts);
        rows.push(match row {
            Ok(r) => r,
            Err(e) => SweepRow {
                case_id: case_id(spec.parameter, value),
                parameter: value,
                measured: f64::NAN,
                residual: None,
                dw_norm: None,
                lambda_min: None,
                error: Some(e.to_string()),
            },
        });
    }

    let fit_against = |extract: &dyn Fn(&SweepRow) -> Option<f64>| {
        let xs: Vec<f64> = rows
            .iter()
            .filter(|r| r.error.is_none() && extract(r).is_some())
            .map(|r| r.measured)
            .collect();
        let ys: Vec<f64> = rows
            .iter()
            .filter_map(|r| if r.error.is_none() { extract(r) } else { None })
            .collect();
        loglog_fit(&xs, &ys).map(|f| f.slope)
    };
    let residual_slope = fit_against(&|r| r.residual);
    let dw_slope = fit_against(&|r| r.dw_norm);

    Ok(SweepTable {
        rows,
        residual_slope,
        dw_slope,
    })
}

fn case_id(parameter: SweepParameter, value: f64) -> String {
    match parameter {
        SweepParameter::Separation => format!("L{value:.0}"),
        SweepParameter::BoundaryDistance => format!("S{value:.0}"),
    }
}

/// Two like-signed cores at separation close to `l`, on the x-axis around
/// the origin.
pub fn separated_pair_config(l: f64) -> Result<DislocationConfig> {
    let half = (l / 2.0).round() as i64;
    let left = Cell::new(crate::lattice::Site::new(-half, -1), crate::lattice::Orientation::Down);
    let right = Cell::new(
        crate::lattice::Site::new((l.round() as i64) - half, -1),
        crate::lattice::Orientation::Down,
    );
    DislocationConfig::new(vec![(left, 1), (right, 1)])
}

fn run_sweep_row(
    spec: &SweepSpec,
    value: f64,
    potential: crate::energy::Potential,
    core: &CoreCorrector,
    core_complex: &LatticeComplex,
    shared_window: Option<&LatticeComplex>,
    opts: &SolverOptions,
) -> Result<SweepRow> {
    match spec.parameter {
        SweepParameter::Separation => {
            let window = shared_window.expect("ball window prepared for separation sweeps");
            let config = separated_pair_config(value)?;
            let (l_d, _) = config_metrics(&config, window)?;
            let z = assemble_predictor_infinite(window, &config, core, core_complex, None)?;
            let model = EnergyModel::new(window, potential);
            let grad = model.gradient(&z)?;
            let residual = crate::solver::dual_norm(&model, &grad, opts)?;
            let (dw_norm, lambda_min) = if spec.measure_dw {
                let report =
                    crate::solver::newton_correct(&model, &z, spec.newton_tol, spec.newton_max_iter, opts)?;
                (Some(report.dw_norm), Some(report.lambda_min))
            } else {
                (None, None)
            };
            Ok(SweepRow {
                case_id: case_id(spec.parameter, value),
                parameter: value,
                measured: l_d,
                residual: Some(residual),
                dw_norm,
                lambda_min,
                error: None,
            })
        }
        SweepParameter::BoundaryDistance => {
            let size = hexagon_size_for_boundary_distance(value);
            let corners = crate::lattice::hexagon_corners(size);
            let window = crate::lattice::build_polygon(&corners)?;
            let config = DislocationConfig::single(Cell::origin(), 1);
            let (_, s_d) = config_metrics(&config, &window)?;
            let corrector =
                crate::elasticity::solve_boundary_corrector(&window, &config, opts.cg_tol)?;
            let z = assemble_predictor_polygon(
                &window,
                &config,
                core,
                core_complex,
                None,
                &corrector,
            )?;
            let model = EnergyModel::new(&window, potential);
            let grad = model.gradient(&z)?;
            let residual = crate::solver::dual_norm(&model, &grad, opts)?;
            let (dw_norm, lambda_min) = if spec.measure_dw {
                let report =
                    crate::solver::newton_correct(&model, &z, spec.newton_tol, spec.newton_max_iter, opts)?;
                (Some(report.dw_norm), Some(report.lambda_min))
            } else {
                (None, None)
            };
            Ok(SweepRow {
                case_id: case_id(spec.parameter, value),
                parameter: value,
                measured: s_d,
                residual: Some(residual),
                dw_norm,
                lambda_min,
                error: None,
            })
        }
    }
}
