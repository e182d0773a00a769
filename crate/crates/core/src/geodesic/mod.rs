//! Hyperbolic, Hurwitz and quasihyperbolic distances as density-weighted
//! shortest paths.
//!
//! A solve runs Dijkstra on a stencil graph over a window around the
//! endpoints, then refines the resulting polyline level by level: each
//! level doubles the vertex count and shortens the path by Newton steps.
//! Reported distances always come from the adaptive segment quadrature of
//! the plane polyline.

mod chart;
mod grid;
mod shorten;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use chart::CoordinateSystem;
pub use grid::{GridSpec, Stencil};

use crate::density::{DensityField, FieldKind, BOUNDARY_GUARD};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{polyline_length_under_density, CPoint, Polyline};
use chart::Chart;
use grid::OpenSides;
use shorten::Shortener;

/// Grid nodes across the longer side of the coarse window.
const NODES_ACROSS: f64 = 32.0;
/// Segments of the polyline at the coarsest level.
const BASE_SEGMENTS: usize = 16;
/// Half-width of the window in units of the endpoint separation.
const WINDOW_HALF_WIDTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Hyperbolic,
    Hurwitz,
    Quasihyperbolic,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hyperbolic" => Ok(Metric::Hyperbolic),
            "hurwitz" => Ok(Metric::Hurwitz),
            "quasihyperbolic" => Ok(Metric::Quasihyperbolic),
            _ => Err(Error::Parse(format!("metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptions {
    /// Relative agreement between successive levels that ends a solve.
    pub tolerance: f64,
    pub stencil: Stencil,
    /// Levels including the coarsest one.
    pub max_levels: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self { tolerance: 1e-4, stencil: Stencil::Sixteen, max_levels: 6 }
    }
}

impl DistanceOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_levels < 2 {
            return Err(Error::InvalidArgument("max_levels must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Coarse grid spacing divided by `2^level`.
    pub h: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicResult {
    pub distance: f64,
    /// Witness path; `None` when the endpoints coincide.
    #[serde(serialize_with = "serialize_path")]
    pub path: Option<Polyline>,
    pub refinement_trace: Vec<TraceEntry>,
    pub converged: bool,
    pub grid: Option<GridSpec>,
}

fn serialize_path<S: serde::Serializer>(path: &Option<Polyline>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match path {
        None => s.serialize_none(),
        Some(p) => s.collect_seq(p.vertices().iter().map(|z| [z.re, z.im])),
    }
}

impl GeodesicResult {
    fn trivial() -> Self {
        Self { distance: 0.0, path: None, refinement_trace: Vec::new(), converged: true, grid: None }
    }

    /// Witness path as CSV with columns `re,im`.
    pub fn path_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        if let Some(p) = &self.path {
            for z in p.vertices() {
                let _ = writeln!(out, "{},{}", z.re, z.im);
            }
        }
        out
    }
}

/// A distance, interval-valued where the density is only known between two
/// bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum DistanceValue {
    Point(GeodesicResult),
    Interval { lower: GeodesicResult, upper: GeodesicResult },
}

impl DistanceValue {
    pub fn lower(&self) -> f64 {
        match self {
            DistanceValue::Point(r) => r.distance,
            DistanceValue::Interval { lower, .. } => lower.distance,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            DistanceValue::Point(r) => r.distance,
            DistanceValue::Interval { upper, .. } => upper.distance,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            DistanceValue::Point(r) => r.converged,
            DistanceValue::Interval { lower, upper } => lower.converged && upper.converged,
        }
    }
}

fn field(d: &DomainSpec, kind: FieldKind) -> Result<DensityField> {
    DensityField::new(*d, kind).map_err(|_| Error::UnsupportedMetric)
}

fn check_endpoint(d: &DomainSpec, w: CPoint) -> Result<()> {
    crate::geometry::check_finite(w)?;
    if !d.contains(w) {
        return Err(Error::OutsideDomain(w));
    }
    if d.boundary_distance_unchecked(w) < BOUNDARY_GUARD {
        return Err(Error::PointsTooCloseToBoundary);
    }
    Ok(())
}

/// Distance between `w1` and `w2` in `d` under `metric`.
///
/// The Hurwitz metric on the punctured disk yields an interval: the lower
/// end integrates the hyperbolic density, the upper end the Hahn density.
pub fn distance(d: &DomainSpec, metric: Metric, w1: CPoint, w2: CPoint, opts: &DistanceOptions) -> Result<DistanceValue> {
    opts.validate()?;
    let kinds: &[FieldKind] = match metric {
        Metric::Hyperbolic => &[FieldKind::Hyperbolic],
        Metric::Quasihyperbolic => &[FieldKind::Quasihyperbolic],
        Metric::Hurwitz if *d == DomainSpec::PuncturedDisk => &[FieldKind::HurwitzLower, FieldKind::HurwitzUpper],
        Metric::Hurwitz => &[FieldKind::HurwitzLower],
    };
    let fields = kinds.iter().map(|&k| field(d, k)).collect::<Result<Vec<_>>>()?;
    check_endpoint(d, w1)?;
    check_endpoint(d, w2)?;
    let mut results = fields.iter().map(|f| solve(f, w1, w2, opts)).collect::<Result<Vec<_>>>()?;
    Ok(if results.len() == 2 {
        let upper = results.pop().unwrap();
        let lower = results.pop().unwrap();
        DistanceValue::Interval { lower, upper }
    } else {
        DistanceValue::Point(results.pop().unwrap())
    })
}

/// [`distance`] over many pairs; results keep the order of `pairs`.
pub fn distances(
    d: &DomainSpec,
    metric: Metric,
    pairs: &[(CPoint, CPoint)],
    opts: &DistanceOptions,
    execution: Execution,
) -> Vec<Result<DistanceValue>> {
    exec::map(pairs, execution, |&(a, b)| distance(d, metric, a, b, opts))
}

/// Solves in a canonical endpoint order so the result is exactly symmetric.
fn solve(rho: &DensityField, w1: CPoint, w2: CPoint, opts: &DistanceOptions) -> Result<GeodesicResult> {
    if w1 == w2 {
        return Ok(GeodesicResult::trivial());
    }
    let swapped = (w2.re, w2.im) < (w1.re, w1.im);
    let (a, b) = if swapped { (w2, w1) } else { (w1, w2) };
    let mut r = solve_ordered(rho, a, b, opts)?;
    if swapped {
        r.path = r.path.map(|p| p.reversed());
    }
    Ok(r)
}

fn window(chart: &Chart, z1: CPoint, z2: CPoint, half_width: f64, stencil: Stencil) -> (GridSpec, OpenSides) {
    let c = 0.5 * (z1 + z2);
    let side = (z1.re - z2.re).abs().max((z1.im - z2.im).abs());
    let half = half_width * side;
    let (bx0, bx1, by0, by1) = chart.bounding_box();
    let open = OpenSides {
        left: c.re - half > bx0,
        right: c.re + half < bx1,
        bottom: c.im - half > by0,
        top: c.im + half < by1,
    };
    let (x_min, x_max) = ((c.re - half).max(bx0), (c.re + half).min(bx1));
    let (y_min, y_max) = ((c.im - half).max(by0), (c.im + half).min(by1));
    let h = ((x_max - x_min).max(y_max - y_min) / NODES_ACROSS).min(chart.scale() / 8.0);
    let grid = GridSpec { coordinate_system: chart.system(), x_min, x_max, y_min, y_max, h, stencil };
    (grid, open)
}

fn solve_ordered(rho: &DensityField, w1: CPoint, w2: CPoint, opts: &DistanceOptions) -> Result<GeodesicResult> {
    let chart = Chart::for_domain(&rho.domain());
    let z1 = chart.lift(w1, 0.0);
    let z2 = chart.lift(w2, z1.im);

    let (mut spec, open) = window(&chart, z1, z2, WINDOW_HALF_WIDTH, opts.stencil);
    let mut seed = grid::dijkstra_seed(&chart, rho, &spec, open, z1, z2)?;
    if seed.touches_window {
        let (wider, open) = window(&chart, z1, z2, 2.0 * WINDOW_HALF_WIDTH, opts.stencil);
        spec = wider;
        seed = grid::dijkstra_seed(&chart, rho, &spec, open, z1, z2)?;
    }

    let shortener = Shortener::new(chart, rho);
    let mut v = shortener.equidistribute(&seed.vertices, BASE_SEGMENTS);
    shortener.smooth(&mut v);

    let mut trace = Vec::with_capacity(opts.max_levels);
    let mut converged = false;
    let mut path = None;
    for level in 0..opts.max_levels {
        if level > 0 {
            v = shortener.bisect(&v);
        }
        shortener.newton(&mut v);
        let plane = Polyline::new(v.iter().map(|&z| chart.plane_of(z)).collect())?;
        let dist = polyline_length_under_density(&plane, rho)?;
        let h = spec.h / (1u64 << level) as f64;
        let agreed = trace
            .last()
            .is_some_and(|prev: &TraceEntry| (prev.distance - dist).abs() <= opts.tolerance * dist);
        trace.push(TraceEntry { h, distance: dist });
        path = Some(plane);
        if agreed {
            converged = true;
            break;
        }
    }
    let distance = trace.last().map_or(0.0, |t| t.distance);
    Ok(GeodesicResult { distance, path, refinement_trace: trace, converged, grid: Some(spec) })
}

/// Hyperbolic and Hurwitz distances between the same endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceComparison {
    pub hyperbolic: GeodesicResult,
    pub hurwitz: DistanceValue,
    /// Whether the Hurwitz distance (lower end) is at least the hyperbolic
    /// one, up to the relative tolerance.
    pub holds: bool,
}

pub fn distance_comparison(d: &DomainSpec, w1: CPoint, w2: CPoint, opts: &DistanceOptions) -> Result<DistanceComparison> {
    if !d.classify().is_hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    let hyperbolic = match distance(d, Metric::Hyperbolic, w1, w2, opts)? {
        DistanceValue::Point(r) => r,
        DistanceValue::Interval { lower, .. } => lower,
    };
    let hurwitz = distance(d, Metric::Hurwitz, w1, w2, opts)?;
    let holds = hurwitz.lower() >= hyperbolic.distance * (1.0 - opts.tolerance);
    Ok(DistanceComparison { hyperbolic, hurwitz, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCheck {
    pub w1: CPoint,
    pub w2: CPoint,
    pub outer: f64,
    pub inner_upper: f64,
    pub holds: bool,
}

/// Checks that inclusion does not increase Hurwitz distance: for each pair,
/// the outer distance is at most the upper end of the inner one.
pub fn contraction_distance_check(
    inner: &DomainSpec,
    outer: &DomainSpec,
    pairs: &[(CPoint, CPoint)],
    opts: &DistanceOptions,
    execution: Execution,
) -> Result<Vec<PairCheck>> {
    if !inner.is_subdomain_of(outer) {
        return Err(Error::NotNested);
    }
    exec::map(pairs, execution, |&(w1, w2)| {
        let o = distance(outer, Metric::Hurwitz, w1, w2, opts)?.upper();
        let i = distance(inner, Metric::Hurwitz, w1, w2, opts)?.upper();
        Ok(PairCheck { w1, w2, outer: o, inner_upper: i, holds: o <= i * (1.0 + opts.tolerance) })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cpoint;
    use std::f64::consts::{E, PI};

    fn opts() -> DistanceOptions {
        DistanceOptions::default()
    }

    fn uhp_distance(a: CPoint, b: CPoint) -> f64 {
        (1.0 + (a - b).norm_sqr() / (2.0 * a.im * b.im)).acosh()
    }

    #[test]
    fn disk_radius_matches_log_three() {
        let r = distance(&DomainSpec::unit_disk(), Metric::Hyperbolic, cpoint(0.0, 0.0), cpoint(0.5, 0.0), &opts()).unwrap();
        assert!((r.lower() - 3f64.ln()).abs() < 1e-4 * 3f64.ln(), "{}", r.lower());
        assert!(r.converged());
    }

    #[test]
    fn cstar_radial_and_antipodal() {
        let d = DomainSpec::cstar();
        let r = distance(&d, Metric::Hurwitz, cpoint(1.0, 0.0), cpoint(E, 0.0), &opts()).unwrap();
        assert!((r.lower() - 0.125).abs() < 1e-4 * 0.125, "{}", r.lower());
        let r = distance(&d, Metric::Hurwitz, cpoint(1.0, 0.0), cpoint(-1.0, 0.0), &opts()).unwrap();
        assert!((r.lower() - PI / 8.0).abs() < 1e-3 * PI / 8.0, "{}", r.lower());
    }

    #[test]
    fn half_plane_matches_arccosh_formula() {
        // half plane Re w > 0 is the upper half plane rotated by -i
        let d = DomainSpec::HalfPlane;
        for (a, b) in [(cpoint(1.0, 0.0), cpoint(2.0, 3.0)), (cpoint(0.1, -1.0), cpoint(0.1, 1.0))] {
            let exact = uhp_distance(a * CPoint::i(), b * CPoint::i());
            let r = distance(&d, Metric::Hyperbolic, a, b, &opts()).unwrap();
            assert!((r.lower() - exact).abs() < 1e-3 * exact, "{} vs {exact}", r.lower());
        }
    }

    #[test]
    fn punctured_disk_gives_an_interval() {
        let r = distance(&DomainSpec::PuncturedDisk, Metric::Hurwitz, cpoint(0.3, 0.0), cpoint(0.6, 0.0), &opts()).unwrap();
        assert!(matches!(r, DistanceValue::Interval { .. }));
        assert!(r.lower() <= r.upper());
        // radial segment: integral of -1/(t ln t) from 0.3 to 0.6
        let exact = (0.3f64.ln() / 0.6f64.ln()).ln();
        assert!((r.lower() - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn unsupported_metrics_and_points() {
        let o = opts();
        let p = cpoint(1.0, 0.0);
        assert_eq!(distance(&DomainSpec::cstar(), Metric::Hyperbolic, p, -p, &o), Err(Error::UnsupportedMetric));
        assert_eq!(distance(&DomainSpec::WholePlane, Metric::Hurwitz, p, -p, &o), Err(Error::UnsupportedMetric));
        assert!(matches!(
            distance(&DomainSpec::unit_disk(), Metric::Hyperbolic, p, cpoint(0.0, 0.0), &o),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn symmetric_and_zero_on_coincidence() {
        let d = DomainSpec::Strip;
        let (a, b) = (cpoint(-1.0, 0.5), cpoint(2.0, 2.5));
        let o = opts();
        let ab = distance(&d, Metric::Quasihyperbolic, a, b, &o).unwrap();
        let ba = distance(&d, Metric::Quasihyperbolic, b, a, &o).unwrap();
        assert_eq!(ab.lower(), ba.lower());
        let z = distance(&d, Metric::Hurwitz, a, a, &o).unwrap();
        assert_eq!(z.lower(), 0.0);
        assert!(matches!(z, DistanceValue::Point(GeodesicResult { path: None, .. })));
    }

    #[test]
    fn witness_path_reintegrates() {
        let d = DomainSpec::unit_disk();
        let rho = DensityField::new(d, FieldKind::Hyperbolic).unwrap();
        let DistanceValue::Point(r) = distance(&d, Metric::Hyperbolic, cpoint(-0.3, 0.4), cpoint(0.6, 0.1), &opts()).unwrap()
        else {
            panic!()
        };
        let again = polyline_length_under_density(r.path.as_ref().unwrap(), &rho).unwrap();
        assert_eq!(again, r.distance);
        assert!(r.path_csv().starts_with("re,im\n"));
        for w in r.refinement_trace.windows(2) {
            assert!(w[1].distance <= w[0].distance * (1.0 + 1e-9));
        }
    }

    #[test]
    fn comparison_and_contraction_examples() {
        let o = opts();
        let c = distance_comparison(&DomainSpec::unit_disk(), cpoint(0.0, 0.0), cpoint(0.5, 0.0), &o).unwrap();
        assert!((c.hurwitz.lower() - c.hyperbolic.distance).abs() < 1e-12);
        let c = distance_comparison(&DomainSpec::PuncturedDisk, cpoint(0.3, 0.0), cpoint(0.6, 0.0), &o).unwrap();
        assert!(c.holds);
        let checks = contraction_distance_check(
            &DomainSpec::PuncturedDisk,
            &DomainSpec::unit_disk(),
            &[(cpoint(0.3, 0.0), cpoint(0.6, 0.0)), (cpoint(0.2, 0.2), cpoint(0.2, 0.2))],
            &o,
            Execution::Sequential,
        )
        .unwrap();
        assert!(checks.iter().all(|c| c.holds));
        let half = DomainSpec::disk(0.0, 0.0, 0.5).unwrap();
        let checks = contraction_distance_check(&half, &DomainSpec::unit_disk(), &[(cpoint(0.1, 0.0), cpoint(0.2, 0.0))], &o, Execution::Sequential).unwrap();
        assert!(checks[0].holds && checks[0].outer < checks[0].inner_upper);
        assert_eq!(
            contraction_distance_check(&DomainSpec::unit_disk(), &half, &[], &o, Execution::Sequential),
            Err(Error::NotNested)
        );
    }
}
