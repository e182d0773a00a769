//! Contraction constants of an inclusion `inner ⊂ outer` under the Hurwitz
//! metric: the infinitesimal constant `l` (sup of the density ratio), a
//! sampled lower bound for the global constant `gl` (sup of the distance
//! ratio), and the Lipschitz classification built on them.

use serde::Serialize;

use crate::covering::RiemannChart;
use crate::density::{hurwitz_density, BOUNDARY_GUARD};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geodesic::{distance, DistanceOptions, Metric};
use crate::geometry::CPoint;
use crate::sampling::boundary_samples;

pub const DEFAULT_MARGIN: f64 = 1e-3;
/// Boundary levels used by [`classify_lipschitz`].
pub const CLASSIFY_LEVELS: usize = 20;
/// Slack allowed above 1 for ratios that are at most 1 in exact arithmetic.
pub const RATIO_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Lipschitz,
    NonLipschitz,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSpec {
    /// Boundary layers `k = 1..=levels` at relative depth `2^-k`.
    pub levels: usize,
    pub points: usize,
    /// Point pairs behind `gl_lower`; zero when it was not sampled.
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub inner: DomainSpec,
    pub outer: DomainSpec,
    pub l_interval: Interval,
    pub gl_lower: Option<f64>,
    pub sample_spec: SampleSpec,
    pub margin: f64,
    pub classification: Classification,
    /// Largest single ratio sample (upper end), expected `<= 1`.
    pub max_ratio_sample: f64,
}

impl ContractionReport {
    /// `gl_lower <= l.upper <= 1` up to slack.
    pub fn ordering_holds(&self, tol: f64) -> bool {
        self.gl_lower.is_none_or(|g| g >= 0.0 && g <= self.l_interval.upper + tol)
            && self.l_interval.upper <= 1.0 + RATIO_SLACK
    }
}

fn check_nested(inner: &DomainSpec, outer: &DomainSpec) -> Result<()> {
    if !inner.is_subdomain_of(outer) {
        return Err(Error::NotNested);
    }
    if !inner.classify().is_proper || !outer.classify().is_proper {
        return Err(Error::UnsupportedDensity);
    }
    Ok(())
}

fn usable(d: &DomainSpec, w: CPoint) -> bool {
    d.contains(w) && d.boundary_distance_unchecked(w) >= BOUNDARY_GUARD
}

/// Bounds `[lower, upper]` for `eta_outer(w) / eta_inner(w)`.
pub fn density_ratio(inner: &DomainSpec, outer: &DomainSpec, w: CPoint) -> Result<Interval> {
    if inner == outer {
        hurwitz_density(inner, w)?;
        return Ok(Interval { lower: 1.0, upper: 1.0 });
    }
    let i = hurwitz_density(inner, w)?;
    let o = hurwitz_density(outer, w)?;
    Ok(Interval { lower: o.lower() / i.upper(), upper: o.upper() / i.lower() })
}

fn classify(l: Interval, margin: f64) -> Classification {
    if l.lower >= 1.0 - margin {
        Classification::NonLipschitz
    } else if l.upper <= 1.0 - margin {
        Classification::Lipschitz
    } else {
        Classification::Undetermined
    }
}

fn sampled_supremum(ratios: &[Interval]) -> Interval {
    Interval {
        lower: ratios.iter().map(|r| r.lower).fold(0.0, f64::max),
        upper: ratios.iter().map(|r| r.upper).fold(0.0, f64::max),
    }
}

/// Sampled bounds for `l(inner, outer) = sup eta_outer / eta_inner`.
///
/// Samples are [`boundary_samples`] of `inner` with `levels` layers; the
/// lower end uses the inner density's upper bound and vice versa.
pub fn infinitesimal_constant(inner: &DomainSpec, outer: &DomainSpec, levels: usize) -> Result<ContractionReport> {
    infinitesimal_constant_with(inner, outer, levels, DEFAULT_MARGIN, Execution::default())
}

pub fn infinitesimal_constant_with(
    inner: &DomainSpec,
    outer: &DomainSpec,
    levels: usize,
    margin: f64,
    execution: Execution,
) -> Result<ContractionReport> {
    check_nested(inner, outer)?;
    if levels == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let points: Vec<CPoint> =
        boundary_samples(inner, levels).into_iter().filter(|&w| usable(inner, w) && usable(outer, w)).collect();
    let ratios = exec::map(&points, execution, |&w| density_ratio(inner, outer, w))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let l = sampled_supremum(&ratios);
    Ok(ContractionReport {
        inner: *inner,
        outer: *outer,
        l_interval: l,
        gl_lower: None,
        sample_spec: SampleSpec { levels, points: points.len(), pairs: 0 },
        margin,
        classification: classify(l, margin),
        max_ratio_sample: l.upper,
    })
}

/// Short pairs spread evenly over the sample set, each point paired with a
/// neighbour a quarter of its boundary distance away.
fn sample_pairs(inner: &DomainSpec, levels: usize, count: usize) -> Vec<(CPoint, CPoint)> {
    let points: Vec<CPoint> = boundary_samples(inner, levels).into_iter().filter(|&w| usable(inner, w)).collect();
    if points.is_empty() || count == 0 {
        return Vec::new();
    }
    let dir = CPoint::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let picks = count.min(points.len());
    (0..picks)
        .map(|j| {
            let k = if picks == 1 { 0 } else { (j * (points.len() - 1) + (picks - 1) / 2) / (picks - 1) };
            let w = points[k];
            (w, w + dir * (0.25 * inner.boundary_distance_unchecked(w)))
        })
        .filter(|&(_, v)| usable(inner, v))
        .collect()
}

/// Largest sampled `d_outer / d_inner` over short pairs: a lower bound for
/// `gl(inner, outer)`. Interval inner distances contribute their upper end.
pub fn global_constant_lower(
    inner: &DomainSpec,
    outer: &DomainSpec,
    levels: usize,
    pairs: usize,
    opts: &DistanceOptions,
    execution: Execution,
) -> Result<f64> {
    check_nested(inner, outer)?;
    if inner == outer {
        return Ok(1.0);
    }
    let pairs = sample_pairs(inner, levels, pairs);
    let ratios = exec::map(&pairs, execution, |&(a, b)| -> Result<f64> {
        let o = distance(outer, Metric::Hurwitz, a, b, opts)?.lower();
        let i = distance(inner, Metric::Hurwitz, a, b, opts)?.upper();
        Ok(o / i)
    });
    ratios.into_iter().try_fold(0.0, |acc, r| Ok(f64::max(acc, r?)))
}

/// Infinitesimal report with `gl_lower` filled in from `pairs` sampled
/// distance ratios.
pub fn contraction_report(
    inner: &DomainSpec,
    outer: &DomainSpec,
    levels: usize,
    pairs: usize,
    margin: f64,
    opts: &DistanceOptions,
    execution: Execution,
) -> Result<ContractionReport> {
    let mut report = infinitesimal_constant_with(inner, outer, levels, margin, execution)?;
    report.gl_lower = Some(global_constant_lower(inner, outer, levels, pairs, opts, execution)?);
    report.sample_spec.pairs = if inner == outer { 0 } else { sample_pairs(inner, levels, pairs).len() };
    Ok(report)
}

/// Classification from [`CLASSIFY_LEVELS`] boundary layers.
pub fn classify_lipschitz(inner: &DomainSpec, outer: &DomainSpec, margin: f64) -> Result<Classification> {
    Ok(infinitesimal_constant_with(inner, outer, CLASSIFY_LEVELS, margin, Execution::default())?.classification)
}

/// Matched comparison of `l(Y, hull)` in the original picture and after
/// conformal transport of the hull onto the unit disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    /// The domain reduced; for transported reports, the disk model before
    /// transport.
    pub y: DomainSpec,
    pub hull: DomainSpec,
    pub samples: usize,
    /// Sampled `l` computed on `Y` itself.
    pub l_original: Interval,
    /// Sampled `l` of the image of `Y` inside the disk.
    pub l_transported: Interval,
    /// Largest relative mismatch of matched pointwise ratios.
    pub max_mismatch: f64,
    pub classification: Classification,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn finish_reduction(y: DomainSpec, hull: DomainSpec, pairs: Vec<(Interval, Interval)>) -> ReductionReport {
    let original: Vec<Interval> = pairs.iter().map(|p| p.0).collect();
    let transported: Vec<Interval> = pairs.iter().map(|p| p.1).collect();
    let max_mismatch = pairs
        .iter()
        .map(|(a, b)| relative_gap(a.lower, b.lower).max(relative_gap(a.upper, b.upper)))
        .fold(0.0, f64::max);
    let l_original = sampled_supremum(&original);
    ReductionReport {
        y,
        hull,
        samples: pairs.len(),
        l_original,
        l_transported: sampled_supremum(&transported),
        max_mismatch,
        classification: classify(l_original, DEFAULT_MARGIN),
    }
}

/// Reduces `l(Y, hull(Y))` to the disk through the catalog Riemann map of
/// the hull.
///
/// The image of `Y` has to be a catalog domain again, which covers the
/// domains that are their own hull and the punctured disk.
pub fn theorem8_reduction(y: &DomainSpec, levels: usize) -> Result<ReductionReport> {
    if !y.is_quasi_bounded() {
        return Err(Error::NotQuasiBounded);
    }
    let hull = y.simply_connected_hull();
    let chart = RiemannChart::for_domain(&hull)?;
    let image = match *y {
        _ if *y == hull => DomainSpec::unit_disk(),
        DomainSpec::PuncturedDisk if hull == DomainSpec::unit_disk() => DomainSpec::PuncturedDisk,
        _ => return Err(Error::UnsupportedDomain),
    };
    let disk = DomainSpec::unit_disk();
    let mut matched = Vec::new();
    for w in boundary_samples(y, levels) {
        if !usable(y, w) {
            continue;
        }
        let (u, _) = chart.to_disk(w);
        if !usable(&image, u) {
            continue;
        }
        matched.push((density_ratio(y, &hull, w)?, density_ratio(&image, &disk, u)?));
    }
    Ok(finish_reduction(*y, hull, matched))
}

/// The punctured disk carried into `hull` by the inverse Riemann map
/// `psi`, i.e. `Y = hull minus psi(0)`.
///
/// Densities on `Y` are pulled back from the punctured disk; the hull's
/// own density comes from its closed form, so matching ratios checks the
/// chart against the closed forms.
pub fn theorem8_transported(hull: &DomainSpec, levels: usize) -> Result<ReductionReport> {
    let chart = RiemannChart::for_domain(hull)?;
    let model = DomainSpec::PuncturedDisk;
    let disk = DomainSpec::unit_disk();
    let mut matched = Vec::new();
    for u in boundary_samples(&model, levels) {
        if !usable(&model, u) {
            continue;
        }
        let (z, dpsi) = chart.from_disk(u);
        if !usable(hull, z) {
            continue;
        }
        let outer = hurwitz_density(hull, z)?.lower();
        let inner = hurwitz_density(&model, u)?;
        let scale = 1.0 / dpsi.norm();
        let original = Interval { lower: outer / (inner.upper() * scale), upper: outer / (inner.lower() * scale) };
        matched.push((original, density_ratio(&model, &disk, u)?));
    }
    Ok(finish_reduction(model, *hull, matched))
}

/// Ratio bounds for the punctured disk inside the unit disk at radius `m`:
/// `4m / (1 + m)^2` and `2 m ln(1/m) / (1 - m^2)`.
pub fn punctured_disk_ratio_bounds(m: f64) -> Interval {
    Interval { lower: 4.0 * m / ((1.0 + m) * (1.0 + m)), upper: 2.0 * m * (-m.ln()) / ((1.0 - m) * (1.0 + m)) }
}
