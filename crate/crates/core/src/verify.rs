//! The verification suite: every inequality and identity the toolkit relies
//! on, evaluated at configurable sample sizes with a fixed seed.
//!
//! Checks never error; a numerical error inside a check is reported as a
//! failed outcome carrying the error name.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    basepoint_comparison, basepoint_grid, candidate_upper, example318_upper_ratio, generalized_hurwitz_bounds_with,
    kobayashi_upper_bound, theorem2_sequence_bound,
};
use crate::contraction::{
    classify_lipschitz, contraction_report, density_ratio, infinitesimal_constant_with, punctured_disk_ratio_bounds,
    theorem8_reduction, theorem8_transported, Classification, DEFAULT_MARGIN, RATIO_SLACK,
};
use crate::covering::{hurwitz_covering_c_minus_1, hurwitz_covering_for, modular_product, universal_covering_for};
use crate::density::{
    hahn_density_punctured_disk, hurwitz_density, hyperbolic_density, DensityField, FieldKind,
};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geodesic::{
    contraction_distance_check, distance, distance_comparison, DistanceOptions, DistanceValue, GeodesicResult, Metric,
    Stencil,
};
use crate::geometry::{cpoint, polyline_length_under_density, segment_length, simpson_segment, CPoint, MobiusMap, Polyline};
use crate::sampling::{boundary_samples, random_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Settings shared by the CLI and the verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Relative tolerance for density certificates.
    pub tolerance: f64,
    pub budget: usize,
    pub stencil: Stencil,
    pub max_levels: usize,
    pub paper_normalization: bool,
    pub format: OutputFormat,
    pub seed: u64,
    /// Relative tolerance between successive geodesic refinement levels.
    pub distance_tolerance: f64,
    /// Random points per domain for pointwise density checks.
    pub density_samples: usize,
    /// Random point pairs per domain for distance comparisons.
    pub distance_pairs: usize,
    pub triangle_triples: usize,
    pub certificate_calls: usize,
    /// Boundary layers for contraction constants.
    pub contraction_levels: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            budget: 64,
            stencil: Stencil::Sixteen,
            max_levels: 6,
            paper_normalization: false,
            format: OutputFormat::Json,
            seed: 0,
            distance_tolerance: 1e-4,
            density_samples: 10_000,
            distance_pairs: 100,
            triangle_triples: 1_000,
            certificate_calls: 10_000,
            contraction_levels: 12,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tolerance) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if !positive(self.distance_tolerance) {
            return Err(Error::InvalidArgument("distance_tolerance must be positive".into()));
        }
        if self.budget == 0 {
            return Err(Error::InvalidArgument("budget must be positive".into()));
        }
        if self.max_levels < 2 {
            return Err(Error::InvalidArgument("max_levels must be at least 2".into()));
        }
        if self.contraction_levels == 0 {
            return Err(Error::InvalidArgument("contraction_levels must be positive".into()));
        }
        Ok(())
    }

    pub fn distance_options(&self) -> DistanceOptions {
        DistanceOptions { tolerance: self.distance_tolerance, stencil: self.stencil, max_levels: self.max_levels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationOutcome {
    pub id: String,
    pub status: Status,
    pub observed: Vec<Observation>,
    pub tolerance: f64,
    pub detail: Option<String>,
}

struct Recorder {
    tolerance: f64,
    observed: Vec<Observation>,
    failures: Vec<String>,
    failed: usize,
    checked: usize,
}

impl Recorder {
    fn observe(&mut self, name: &str, value: f64) {
        self.observed.push(Observation { name: name.to_string(), value });
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 3 {
                self.failures.push(what());
            }
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    exec: Execution,
    rng: ChaCha8Rng,
}

type CheckFn = fn(&mut Ctx, &mut Recorder) -> Result<()>;

/// Check ids in suite order.
pub const CHECK_IDS: [&str; 25] = [
    "def1-mobius",
    "def2-quadrature",
    "domain-hull",
    "remark-cstar",
    "covering-product",
    "thmA-covering-radius",
    "eq-2.2",
    "thmA-inclusion",
    "eq-2.2-distance",
    "def2-symmetry",
    "def2-triangle",
    "def2-refinement",
    "prop1-contraction",
    "thm2",
    "prop2",
    "prop3-cor",
    "budget-monotone",
    "cor-kobayashi",
    "thm3",
    "ex-3.18",
    "thm4-cor",
    "cor-4.17",
    "thm6",
    "thm7-dstar",
    "thm8",
];

const CHECKS: [CheckFn; 25] = [
    check_mobius,
    check_quadrature,
    check_hull,
    check_cstar_closed_form,
    check_covering_product,
    check_covering_radius,
    check_density_inequality,
    check_inclusion,
    check_distance_inequality,
    check_symmetry,
    check_triangle,
    check_refinement,
    check_contraction_distances,
    check_plane_sequence,
    check_certificate_floor,
    check_simply_connected_convergence,
    check_budget_monotone,
    check_kobayashi,
    check_holomorphic_pullback,
    check_punctured_gap,
    check_basepoint_ordering,
    check_conformal_equivalence,
    check_contraction_constants,
    check_non_lipschitz,
    check_hull_reduction,
];

/// Runs the whole suite, outcomes in [`CHECK_IDS`] order.
pub fn verify_suite(cfg: &RunConfig, execution: Execution) -> Vec<VerificationOutcome> {
    exec::map_range(CHECK_IDS.len(), execution, |i| run_check(i, cfg, execution))
}

/// Runs a single check by id.
pub fn verify_check(id: &str, cfg: &RunConfig, execution: Execution) -> Option<VerificationOutcome> {
    CHECK_IDS.iter().position(|c| *c == id).map(|i| run_check(i, cfg, execution))
}

fn run_check(index: usize, cfg: &RunConfig, execution: Execution) -> VerificationOutcome {
    let seed = cfg.seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut ctx = Ctx { cfg, exec: execution, rng: ChaCha8Rng::seed_from_u64(seed) };
    let mut rec = Recorder { tolerance: 0.0, observed: Vec::new(), failures: Vec::new(), failed: 0, checked: 0 };
    let result = CHECKS[index](&mut ctx, &mut rec);
    let (status, detail) = match result {
        Err(e) => (Status::Fail, Some(format!("{}: {e}", e.name()))),
        Ok(()) if rec.failed > 0 => {
            (Status::Fail, Some(format!("{} of {} assertions failed: {}", rec.failed, rec.checked, rec.failures.join("; "))))
        }
        Ok(()) if rec.checked == 0 => (Status::Skipped, Some("sample sizes are zero".into())),
        Ok(()) => (Status::Pass, None),
    };
    VerificationOutcome { id: CHECK_IDS[index].to_string(), status, observed: rec.observed, tolerance: rec.tolerance, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn small_disk() -> DomainSpec {
    DomainSpec::Disk { center: cpoint(1.0, -2.0), radius: 0.5 }
}

fn simply_connected_kinds() -> [DomainSpec; 4] {
    [DomainSpec::unit_disk(), small_disk(), DomainSpec::HalfPlane, DomainSpec::Strip]
}

fn hyperbolic_kinds() -> [DomainSpec; 5] {
    [DomainSpec::unit_disk(), small_disk(), DomainSpec::HalfPlane, DomainSpec::Strip, DomainSpec::PuncturedDisk]
}

fn distance_kinds() -> [DomainSpec; 4] {
    [DomainSpec::unit_disk(), DomainSpec::HalfPlane, DomainSpec::Strip, DomainSpec::PuncturedDisk]
}

/// Targets with a Hurwitz covering.
fn target_kinds() -> [DomainSpec; 6] {
    [
        DomainSpec::unit_disk(),
        small_disk(),
        DomainSpec::HalfPlane,
        DomainSpec::Strip,
        DomainSpec::cstar(),
        DomainSpec::PlaneMinusPoint { b: cpoint(0.5, 0.5) },
    ]
}

fn all_kinds() -> [DomainSpec; 7] {
    [
        DomainSpec::WholePlane,
        DomainSpec::cstar(),
        DomainSpec::unit_disk(),
        small_disk(),
        DomainSpec::HalfPlane,
        DomainSpec::Strip,
        DomainSpec::PuncturedDisk,
    ]
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())]
}

fn check_mobius(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-6;
    let disk = DomainSpec::unit_disk();
    let n = ctx.cfg.density_samples / 10;
    let mut worst_chain: f64 = 0.0;
    for _ in 0..n {
        let (s1, s2, z) = (random_point(&disk, &mut ctx.rng), random_point(&disk, &mut ctx.rng), random_point(&disk, &mut ctx.rng));
        let (t1, t2) = (MobiusMap::new(s1)?, MobiusMap::new(s2)?);
        rec.require(t1.eval(z)?.norm() < 1.0, || format!("T({z}) left the disk"));
        let d = t1.derivative(s1)?;
        rec.require(d.im == 0.0 && d.re > 0.0 && rel(d.re, 1.0 / (1.0 - s1.norm_sqr())) < 1e-14, || format!("T'(s) at {s1}"));
        let step = 1e-6;
        let comp = |x: CPoint| t2.eval(t1.eval(x).unwrap()).unwrap();
        let fd = (comp(z + step) - comp(z - step)) / (2.0 * step);
        let chain = t2.derivative(t1.eval(z)?)? * t1.derivative(z)?;
        let err = (fd - chain).norm() / chain.norm();
        worst_chain = worst_chain.max(err);
        rec.require(err < 1e-6, || format!("chain rule at {z}: {err:e}"));
    }
    rec.observe("samples", n as f64);
    rec.observe("worst_chain_rule_error", worst_chain);
    Ok(())
}

fn check_quadrature(_: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let lambda = |w: CPoint| 2.0 / (1.0 - w.norm_sqr());
    let exact = 3f64.ln();
    let (a, b) = (cpoint(0.0, 0.0), cpoint(0.5, 0.0));
    let errs: Vec<f64> = [2, 4, 8, 16].iter().map(|&n| (simpson_segment(&lambda, a, b, n) - exact).abs()).collect();
    let order = (errs[1] / errs[2]).log2();
    rec.observe("observed_order", order);
    rec.require(order >= 2.0, || format!("order {order}"));
    let whole = segment_length(&lambda, a, b)?;
    rec.observe("ln3_error", (whole - exact).abs());
    rec.require(rel(whole, exact) < 1e-9, || format!("ln 3 came out {whole}"));
    let split = polyline_length_under_density(&Polyline::new(vec![a, cpoint(0.2, 0.0), b])?, &lambda)?;
    rec.require(rel(split, whole) < 1e-9, || "additivity".into());
    let cstar = DensityField::new(DomainSpec::cstar(), FieldKind::HurwitzLower)?;
    let v = segment_length(&cstar, cpoint(1.0, 0.0), cpoint(std::f64::consts::E, 0.0))?;
    rec.observe("cstar_one_to_e", v);
    rec.require(rel(v, 0.125) < 1e-9, || format!("1 -> e gave {v}"));
    Ok(())
}

fn check_hull(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 0.0;
    let n = ctx.cfg.density_samples / 10;
    for d in all_kinds() {
        let hull = d.simply_connected_hull();
        rec.require(hull.classify().is_simply_connected, || format!("hull of {d}"));
        for _ in 0..n {
            let w = random_point(&d, &mut ctx.rng);
            if d.contains(w) {
                rec.require(d.boundary_distance(w)? > 0.0, || format!("boundary distance at {w} in {d}"));
                rec.require(hull.contains(w), || format!("{w} in {d} but not in its hull"));
            }
        }
    }
    rec.observe("samples_per_domain", n as f64);
    Ok(())
}

fn check_cstar_closed_form(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-12;
    let d = DomainSpec::cstar();
    for (w, want) in [(cpoint(1.0, 0.0), 0.125), (cpoint(2.0, 0.0), 0.0625), (cpoint(0.0, 1.0), 0.125)] {
        let v = hurwitz_density(&d, w)?.lower();
        rec.observe(&format!("eta({},{})", w.re, w.im), v);
        rec.require(v == want, || format!("eta({w}) = {v}"));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cfg.density_samples / 10 {
        let w = random_point(&d, &mut ctx.rng);
        let b = random_point(&d, &mut ctx.rng);
        let err = rel(hurwitz_density(&d, b * w)?.lower() * b.norm(), hurwitz_density(&d, w)?.lower());
        worst = worst.max(err);
        rec.require(err < 1e-12, || format!("scaling at w={w}, b={b}"));
    }
    rec.observe("worst_scaling_error", worst);
    Ok(())
}

fn check_covering_product(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let tol = ctx.cfg.tolerance;
    rec.tolerance = tol;
    let g0 = hurwitz_covering_c_minus_1(cpoint(0.0, 0.0), tol)?;
    rec.require(g0.value == cpoint(0.0, 0.0), || "g(0) != 0".into());
    let h = 1e-6;
    let fd = (hurwitz_covering_c_minus_1(cpoint(h, 0.0), 1e-15)?.value - hurwitz_covering_c_minus_1(cpoint(-h, 0.0), 1e-15)?.value)
        / (2.0 * h);
    rec.observe("fd_derivative_at_0", fd.re);
    rec.require((fd - 16.0).norm() < 1e-8, || format!("g'(0) by differences = {fd}"));
    let n = ctx.cfg.density_samples / 10;
    let points: Vec<CPoint> = (0..n)
        .map(|_| {
            let r = 0.99 * ctx.rng.gen::<f64>().sqrt();
            CPoint::from_polar(r, ctx.rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let moves = exec::map(&points, ctx.exec, |&w| -> Result<(f64, bool)> {
        let e = hurwitz_covering_c_minus_1(w, tol)?;
        let (doubled, _) = modular_product(w, 2 * e.truncation.n_terms);
        Ok(((doubled - e.value).norm() / e.value.norm().max(f64::MIN_POSITIVE), e.value != cpoint(1.0, 0.0)))
    });
    let mut worst: f64 = 0.0;
    for (w, m) in points.iter().zip(moves) {
        let (moved, omits_one) = m?;
        worst = worst.max(moved);
        rec.require(w.norm() == 0.0 || moved < tol, || format!("doubling terms at {w} moved {moved:e}"));
        rec.require(omits_one, || format!("g({w}) = 1"));
    }
    rec.observe("samples", n as f64);
    rec.observe("worst_doubling_move", worst);
    Ok(())
}

fn check_covering_radius(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let mut worst: f64 = 0.0;
    for d in target_kinds() {
        for _ in 0..50 {
            let b = random_point(&d, &mut ctx.rng);
            let g = hurwitz_covering_for(&d, b)?;
            rec.require(g.eval(cpoint(0.0, 0.0))?.0 == b, || format!("G(0) != {b} in {d}"));
            let err = rel(g.derivative_at_origin(), 2.0 / hurwitz_density(&d, b)?.lower());
            worst = worst.max(err);
            rec.require(err < 1e-9, || format!("G'(0) at {b} in {d}: {err:e}"));
        }
    }
    let d = DomainSpec::PuncturedDisk;
    for _ in 0..50 {
        let b = random_point(&d, &mut ctx.rng);
        let g = universal_covering_for(&d, b)?;
        let err = rel(g.derivative_at_origin(), 2.0 / hyperbolic_density(&d, b)?.lower());
        worst = worst.max(err);
        rec.require(err < 1e-9, || format!("universal cover of {d} at {b}: {err:e}"));
    }
    rec.observe("worst_radius_error", worst);
    Ok(())
}

fn check_density_inequality(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 0.0;
    let n = ctx.cfg.density_samples;
    for d in hyperbolic_kinds() {
        let mut min_ratio = f64::INFINITY;
        for _ in 0..n {
            let w = random_point(&d, &mut ctx.rng);
            let eta = hurwitz_density(&d, w)?;
            let lambda = hyperbolic_density(&d, w)?.lower();
            min_ratio = min_ratio.min(eta.lower() / lambda);
            rec.require(eta.lower() >= lambda, || format!("eta < lambda at {w} in {d}"));
            if d.classify().is_simply_connected {
                rec.require(eta.lower() == lambda && eta.upper() == lambda, || format!("eta != lambda at {w} in {d}"));
            } else {
                rec.require(lambda <= hahn_density_punctured_disk(w)?.lower(), || format!("sandwich empty at {w}"));
            }
        }
        rec.observe(&format!("min_eta_over_lambda[{d}]"), min_ratio);
    }
    rec.observe("samples_per_domain", n as f64);
    Ok(())
}

fn check_inclusion(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = RATIO_SLACK;
    let pairs = [
        (DomainSpec::PuncturedDisk, DomainSpec::unit_disk()),
        (DomainSpec::Disk { center: cpoint(0.0, 0.0), radius: 0.5 }, DomainSpec::unit_disk()),
        (DomainSpec::HalfPlane, DomainSpec::PlaneMinusPoint { b: cpoint(-1.0, 0.0) }),
        (DomainSpec::Strip, DomainSpec::PlaneMinusPoint { b: cpoint(0.0, -1.0) }),
        (DomainSpec::PuncturedDisk, DomainSpec::cstar()),
    ];
    let n = ctx.cfg.density_samples / 10;
    for (inner, outer) in pairs {
        rec.require(inner.is_subdomain_of(&outer), || format!("{inner} not inside {outer}"));
        let mut points = boundary_samples(&inner, 16);
        points.extend((0..n).map(|_| random_point(&inner, &mut ctx.rng)));
        let mut worst: f64 = 0.0;
        for w in points {
            let r = density_ratio(&inner, &outer, w)?;
            worst = worst.max(r.lower);
            // eta_outer <= eta_inner, tested against the inner upper end
            rec.require(r.lower <= 1.0 + RATIO_SLACK, || format!("ratio {} at {w} for {inner} in {outer}", r.lower));
            if hurwitz_density(&inner, w)?.point().is_some() || outer == DomainSpec::unit_disk() {
                rec.require(r.upper <= 1.0 + RATIO_SLACK, || format!("ratio upper {} at {w}", r.upper));
            }
        }
        rec.observe(&format!("max_ratio[{inner} in {outer}]"), worst);
    }
    Ok(())
}

fn random_pairs(rng: &mut ChaCha8Rng, d: &DomainSpec, n: usize) -> Vec<(CPoint, CPoint)> {
    (0..n).map(|_| (random_point(d, rng), random_point(d, rng))).collect()
}

fn check_distance_inequality(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = opts.tolerance;
    for d in distance_kinds() {
        let pairs = random_pairs(&mut ctx.rng, &d, ctx.cfg.distance_pairs);
        let results = exec::map(&pairs, ctx.exec, |&(a, b)| distance_comparison(&d, a, b, &opts));
        let mut min_ratio = f64::INFINITY;
        for ((a, b), r) in pairs.iter().zip(results) {
            let r = r?;
            min_ratio = min_ratio.min(r.hurwitz.lower() / r.hyperbolic.distance);
            rec.require(r.holds, || format!("hurwitz < hyperbolic for {a}, {b} in {d}"));
        }
        rec.observe(&format!("min_hurwitz_over_hyperbolic[{d}]"), min_ratio);
    }
    rec.observe("pairs_per_domain", ctx.cfg.distance_pairs as f64);
    Ok(())
}

fn hurwitz_distance_kinds() -> [DomainSpec; 5] {
    [DomainSpec::unit_disk(), DomainSpec::HalfPlane, DomainSpec::Strip, DomainSpec::PuncturedDisk, DomainSpec::cstar()]
}

fn check_symmetry(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = 0.0;
    let per = (ctx.cfg.distance_pairs / 5).max(1);
    for d in hurwitz_distance_kinds() {
        let pairs = random_pairs(&mut ctx.rng, &d, per);
        let out = exec::map(&pairs, ctx.exec, |&(a, b)| -> Result<(DistanceValue, DistanceValue, DistanceValue)> {
            Ok((
                distance(&d, Metric::Hurwitz, a, b, &opts)?,
                distance(&d, Metric::Hurwitz, b, a, &opts)?,
                distance(&d, Metric::Hurwitz, a, a, &opts)?,
            ))
        });
        for ((a, b), r) in pairs.iter().zip(out) {
            let (ab, ba, aa) = r?;
            rec.require(ab.lower() == ba.lower() && ab.upper() == ba.upper(), || format!("asymmetric at {a}, {b} in {d}"));
            rec.require(a == b || ab.lower() > 0.0, || format!("zero distance between {a} and {b}"));
            rec.require(aa.lower() == 0.0 && aa.upper() == 0.0, || format!("d({a},{a}) != 0"));
        }
    }
    rec.observe("pairs_per_domain", per as f64);
    Ok(())
}

fn check_triangle(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = 2.0 * opts.tolerance;
    let kinds = hurwitz_distance_kinds();
    let triples: Vec<(DomainSpec, [CPoint; 3])> = (0..ctx.cfg.triangle_triples)
        .map(|k| {
            let d = kinds[k % kinds.len()];
            (d, [random_point(&d, &mut ctx.rng), random_point(&d, &mut ctx.rng), random_point(&d, &mut ctx.rng)])
        })
        .collect();
    let out = exec::map(&triples, ctx.exec, |(d, [a, b, c])| -> Result<[DistanceValue; 3]> {
        Ok([
            distance(d, Metric::Hurwitz, *a, *b, &opts)?,
            distance(d, Metric::Hurwitz, *b, *c, &opts)?,
            distance(d, Metric::Hurwitz, *a, *c, &opts)?,
        ])
    });
    let mut worst = f64::NEG_INFINITY;
    for ((d, p), r) in triples.iter().zip(out) {
        let [ab, bc, ac] = r?;
        for (x, y, z) in [(ab.lower(), bc.lower(), ac.lower()), (ab.upper(), bc.upper(), ac.upper())] {
            let excess = (z - x - y) / x.max(y).max(z);
            worst = worst.max(excess);
            rec.require(excess <= 2.0 * opts.tolerance, || format!("triangle {p:?} in {d}: excess {excess:e}"));
        }
    }
    rec.observe("triples", triples.len() as f64);
    rec.observe("worst_relative_excess", worst);
    Ok(())
}

fn results_of(v: &DistanceValue) -> Vec<(&GeodesicResult, FieldKind)> {
    match v {
        DistanceValue::Point(r) => vec![(r, FieldKind::HurwitzLower)],
        DistanceValue::Interval { lower, upper } => vec![(lower, FieldKind::HurwitzLower), (upper, FieldKind::HurwitzUpper)],
    }
}

fn check_refinement(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = opts.tolerance;
    let per = (ctx.cfg.distance_pairs / 10).max(1);
    let mut worst_rotation: f64 = 0.0;
    for d in hurwitz_distance_kinds() {
        for (a, b) in random_pairs(&mut ctx.rng, &d, per) {
            let v = distance(&d, Metric::Hurwitz, a, b, &opts)?;
            for (r, kind) in results_of(&v) {
                for w in r.refinement_trace.windows(2) {
                    rec.require(w[1].distance <= w[0].distance * (1.0 + 1e-9), || format!("trace increased for {a}, {b} in {d}"));
                }
                let field = DensityField::new(d, kind)?;
                if let Some(p) = &r.path {
                    let again = polyline_length_under_density(p, &field)?;
                    rec.require(rel(again, r.distance) <= opts.tolerance, || format!("witness for {a}, {b} in {d}"));
                }
            }
            // rotation about the symmetry center, where there is one
            if matches!(d, DomainSpec::Disk { .. } | DomainSpec::PuncturedDisk | DomainSpec::PlaneMinusPoint { .. }) {
                let c = match d {
                    DomainSpec::Disk { center, .. } => center,
                    DomainSpec::PlaneMinusPoint { b } => b,
                    _ => cpoint(0.0, 0.0),
                };
                let rot = CPoint::from_polar(1.0, ctx.rng.gen_range(0.0..2.0 * PI));
                let turned = distance(&d, Metric::Hurwitz, c + (a - c) * rot, c + (b - c) * rot, &opts)?;
                let mut ends = vec![(v.lower(), turned.lower())];
                if let DistanceValue::Interval { .. } = v {
                    ends.push((v.upper(), turned.upper()));
                }
                for (x, y) in ends {
                    worst_rotation = worst_rotation.max(rel(x, y));
                    rec.require(rel(x, y) < opts.tolerance, || format!("rotation changed {x} to {y} in {d}"));
                }
            }
        }
    }
    rec.observe("pairs_per_domain", per as f64);
    rec.observe("worst_rotation_change", worst_rotation);
    Ok(())
}

fn check_contraction_distances(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = opts.tolerance;
    let per = (ctx.cfg.distance_pairs / 5).max(1);
    let nested = [
        (DomainSpec::PuncturedDisk, DomainSpec::unit_disk()),
        (DomainSpec::Disk { center: cpoint(0.0, 0.0), radius: 0.5 }, DomainSpec::unit_disk()),
        (DomainSpec::PuncturedDisk, DomainSpec::cstar()),
    ];
    for (inner, outer) in nested {
        let pairs = random_pairs(&mut ctx.rng, &inner, per);
        let checks = contraction_distance_check(&inner, &outer, &pairs, &opts, ctx.exec)?;
        let worst = checks.iter().map(|c| c.outer / c.inner_upper).fold(0.0, f64::max);
        for c in checks {
            rec.require(c.holds, || format!("d_outer {} > d_inner {} for {}, {}", c.outer, c.inner_upper, c.w1, c.w2));
        }
        rec.observe(&format!("max_distance_ratio[{inner} in {outer}]"), worst);
    }
    Ok(())
}

fn check_plane_sequence(_: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-12;
    let mut prev = f64::INFINITY;
    for k in 1..=4 {
        let n = 10usize.pow(k);
        let v = theorem2_sequence_bound(n, cpoint(0.0, 0.0))?;
        rec.require(v < prev, || format!("not decreasing at n = {n}"));
        prev = v;
        let t = cpoint(0.3, -0.4);
        let scaled = theorem2_sequence_bound(n, t)? * n as f64;
        rec.require(rel(scaled, theorem2_sequence_bound(1, t)?) < 1e-12, || format!("n * bound not constant at {n}"));
        let c = generalized_hurwitz_bounds_with(&DomainSpec::unit_disk(), &DomainSpec::WholePlane, cpoint(2.0, 1.0), 1e-6, n, Execution::Sequential)?;
        rec.require(c.lower == 0.0 && c.upper <= 2.0 / n as f64 * (1.0 + 1e-12), || format!("plane certificate at budget {n}"));
        rec.observe(&format!("upper[budget={n}]"), c.upper);
    }
    rec.require(rel(prev, 2e-4) < 1e-12, || format!("final value {prev}"));
    Ok(())
}

fn random_call(rng: &mut ChaCha8Rng, ys: &[DomainSpec], omegas: &[DomainSpec]) -> (DomainSpec, DomainSpec, CPoint) {
    let y = pick(rng, ys);
    let omega = pick(rng, omegas);
    let w = random_point(&omega, rng);
    (y, omega, w)
}

fn check_certificate_floor(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 0.0;
    let (tol, budget) = (ctx.cfg.tolerance, ctx.cfg.budget);
    let ys: Vec<DomainSpec> = hyperbolic_kinds().into_iter().chain([DomainSpec::cstar()]).collect();
    let omegas: Vec<DomainSpec> = target_kinds().into_iter().chain([DomainSpec::WholePlane]).collect();
    let calls: Vec<_> = (0..ctx.cfg.certificate_calls).map(|_| random_call(&mut ctx.rng, &ys, &omegas)).collect();
    let certs = exec::map(&calls, ctx.exec, |(y, o, w)| generalized_hurwitz_bounds_with(y, o, *w, tol, budget, Execution::Sequential));
    for ((y, o, w), c) in calls.iter().zip(certs) {
        let c = c?;
        let floor = if o.classify().is_proper { hurwitz_density(o, *w)?.lower() } else { 0.0 };
        rec.require(c.lower == floor, || format!("lower {} != eta {floor} for {y} -> {o} at {w}", c.lower));
        rec.require(c.upper >= c.lower, || format!("upper < lower for {y} -> {o} at {w}"));
    }
    rec.observe("calls", calls.len() as f64);
    Ok(())
}

fn check_simply_connected_convergence(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let budget = ctx.cfg.budget;
    let calls: Vec<_> = (0..ctx.cfg.certificate_calls)
        .map(|_| random_call(&mut ctx.rng, &simply_connected_kinds(), &target_kinds()))
        .collect();
    let certs = exec::map(&calls, ctx.exec, |(y, o, w)| generalized_hurwitz_bounds_with(y, o, *w, 1e-9, budget, Execution::Sequential));
    let mut worst: f64 = 0.0;
    for ((y, o, w), c) in calls.iter().zip(certs) {
        let c = c?;
        let gap = (c.upper - c.lower) / c.lower;
        worst = worst.max(gap);
        rec.require(c.converged && gap < 1e-9, || format!("gap {gap:e} for {y} -> {o} at {w}"));
    }
    rec.observe("calls", calls.len() as f64);
    rec.observe("worst_relative_gap", worst);
    Ok(())
}

fn check_budget_monotone(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 0.0;
    let ys: Vec<DomainSpec> = hyperbolic_kinds().into();
    for _ in 0..100 {
        let (y, o, w) = random_call(&mut ctx.rng, &ys, &target_kinds());
        let mut prev = f64::INFINITY;
        let mut budget = 1;
        while budget <= ctx.cfg.budget.max(1) {
            let c = generalized_hurwitz_bounds_with(&y, &o, w, ctx.cfg.tolerance, budget, Execution::Sequential)?;
            rec.require(c.upper <= prev, || format!("upper grew at budget {budget} for {y} -> {o} at {w}"));
            prev = c.upper;
            budget *= 2;
        }
    }
    Ok(())
}

fn check_kobayashi(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let budget = ctx.cfg.budget;
    let ys: Vec<DomainSpec> = distance_kinds().into();
    let omegas: Vec<DomainSpec> = simply_connected_kinds().into();
    for _ in 0..200 {
        let (y, o, w) = random_call(&mut ctx.rng, &ys, &omegas);
        let kappa = kobayashi_upper_bound(&y, &o, w, budget)?;
        let eta = generalized_hurwitz_bounds_with(&y, &o, w, ctx.cfg.tolerance, budget, Execution::Sequential)?;
        rec.require(kappa <= eta.upper * (1.0 + 1e-12), || format!("kappa {kappa} > eta upper {} for {y} -> {o}", eta.upper));
        if y.classify().is_simply_connected {
            let lambda = hyperbolic_density(&o, w)?.lower();
            rec.require(rel(kappa, lambda) < 1e-9, || format!("kappa {kappa} != lambda {lambda} for {y} -> {o}"));
        }
    }
    Ok(())
}

fn check_holomorphic_pullback(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-12;
    let (tol, budget) = (ctx.cfg.tolerance, ctx.cfg.budget);
    let cstar = DomainSpec::cstar();
    let minus_one = DomainSpec::PlaneMinusPoint { b: cpoint(1.0, 0.0) };
    for _ in 0..100 {
        let y = pick(&mut ctx.rng, &[DomainSpec::unit_disk(), DomainSpec::PuncturedDisk]);
        // h(w) = b w on C*
        let a = random_point(&cstar, &mut ctx.rng);
        let b = random_point(&cstar, &mut ctx.rng);
        let source = generalized_hurwitz_bounds_with(&y, &cstar, a, tol, budget, Execution::Sequential)?;
        let target = generalized_hurwitz_bounds_with(&y, &cstar, b * a, tol, budget, Execution::Sequential)?;
        rec.require(target.lower * b.norm() <= source.upper * (1.0 + 1e-12), || format!("h = b w, a = {a}, b = {b}"));
        // h(w) = 1 - w from C \ {1} to C*
        let a = random_point(&minus_one, &mut ctx.rng);
        let source = generalized_hurwitz_bounds_with(&y, &minus_one, a, tol, budget, Execution::Sequential)?;
        let target = generalized_hurwitz_bounds_with(&y, &cstar, 1.0 - a, tol, budget, Execution::Sequential)?;
        rec.require(target.lower <= source.upper * (1.0 + 1e-12), || format!("h = 1 - w at {a}"));
    }
    Ok(())
}

fn check_punctured_gap(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let (y, omega) = (DomainSpec::PuncturedDisk, DomainSpec::cstar());
    let mut ws = vec![cpoint(1.0, 0.0)];
    ws.extend((0..20).map(|_| random_point(&omega, &mut ctx.rng)));
    let mut worst: f64 = 0.0;
    for (i, &w) in ws.iter().enumerate() {
        let floor = hurwitz_density(&omega, w)?.lower();
        let mut prev = f64::INFINITY;
        for k in 1..=10 {
            let r = 1.0 - 0.5f64.powi(k);
            let theta = ctx.rng.gen_range(0.0..2.0 * PI);
            let factor = candidate_upper(&y, &omega, w, CPoint::from_polar(r, theta))? / floor;
            let want = example318_upper_ratio(r)?;
            worst = worst.max((factor - want).abs());
            rec.require((factor - want).abs() < 1e-9, || format!("gap factor {factor} vs {want} at k = {k}, w = {w}"));
            rec.require(factor < prev, || format!("gap factor not decreasing at k = {k}"));
            prev = factor;
            if i == 0 && k == 10 {
                rec.observe("gap_factor[k=10]", factor);
                rec.require(factor < 1.0 + 1e-4, || format!("gap factor {factor} at k = 10"));
            }
        }
        let c = generalized_hurwitz_bounds_with(&y, &omega, w, 1e-3, ctx.cfg.budget, Execution::Sequential)?;
        rec.require(c.converged, || format!("no coincidence at {w}"));
    }
    rec.observe("worst_factor_error", worst);
    Ok(())
}

fn check_basepoint_ordering(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let tol = ctx.cfg.tolerance;
    rec.tolerance = tol;
    let y2s = [DomainSpec::PuncturedDisk, DomainSpec::cstar(), DomainSpec::unit_disk()];
    for _ in 0..200 {
        let (y1, o, w) = random_call(&mut ctx.rng, &simply_connected_kinds(), &target_kinds());
        let y2 = pick(&mut ctx.rng, &y2s);
        let cmp = basepoint_comparison(&y1, &y2, &o, w, tol, ctx.cfg.budget)?;
        rec.require(cmp.ordering_holds == Some(true), || format!("{y1} vs {y2} into {o} at {w}"));
        rec.require(rel(cmp.first.upper, hurwitz_density(&o, w)?.lower()) < 1e-9, || format!("{y1} into {o} at {w}"));
    }
    Ok(())
}

fn check_conformal_equivalence(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let kinds = simply_connected_kinds();
    for _ in 0..200 {
        let (y1, o, w) = random_call(&mut ctx.rng, &kinds, &target_kinds());
        let y2 = pick(&mut ctx.rng, &kinds);
        let a = generalized_hurwitz_bounds_with(&y1, &o, w, 1e-9, ctx.cfg.budget, Execution::Sequential)?;
        let b = generalized_hurwitz_bounds_with(&y2, &o, w, 1e-9, ctx.cfg.budget, Execution::Sequential)?;
        rec.require(rel(a.upper, b.upper) < 1e-9, || format!("{y1} and {y2} into {o} at {w}: {} vs {}", a.upper, b.upper));
    }
    Ok(())
}

fn check_contraction_constants(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    let opts = ctx.cfg.distance_options();
    rec.tolerance = RATIO_SLACK;
    let levels = ctx.cfg.contraction_levels;
    let unit = DomainSpec::unit_disk();
    for inner in [DomainSpec::PuncturedDisk, DomainSpec::Disk { center: cpoint(0.0, 0.0), radius: 0.5 }] {
        let r = contraction_report(&inner, &unit, levels, 16, DEFAULT_MARGIN, &opts, ctx.exec)?;
        rec.observe(&format!("l_lower[{inner}]"), r.l_interval.lower);
        rec.observe(&format!("l_upper[{inner}]"), r.l_interval.upper);
        rec.observe(&format!("gl_lower[{inner}]"), r.gl_lower.unwrap_or(f64::NAN));
        rec.require(r.ordering_holds(opts.tolerance), || format!("gl <= l <= 1 fails for {inner}: {r:?}"));
        if inner == DomainSpec::PuncturedDisk {
            let deepest = punctured_disk_ratio_bounds(1.0 - 0.5f64.powi(levels as i32)).lower;
            rec.require(r.l_interval.lower >= deepest * (1.0 - 1e-12), || format!("l lower {} below {deepest}", r.l_interval.lower));
        }
        let mut prev = 0.0;
        for k in 1..=levels {
            let l = infinitesimal_constant_with(&inner, &unit, k, DEFAULT_MARGIN, Execution::Sequential)?.l_interval.lower;
            rec.require(l >= prev, || format!("l lower decreased at {k} levels for {inner}"));
            prev = l;
        }
    }
    Ok(())
}

fn check_non_lipschitz(ctx: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let unit = DomainSpec::unit_disk();
    let dstar = DomainSpec::PuncturedDisk;
    let c = classify_lipschitz(&dstar, &unit, DEFAULT_MARGIN)?;
    rec.require(c == Classification::NonLipschitz, || format!("punctured disk classified {c:?}"));
    let half = DomainSpec::Disk { center: cpoint(0.0, 0.0), radius: 0.5 };
    let c = classify_lipschitz(&half, &unit, DEFAULT_MARGIN)?;
    rec.require(c == Classification::Lipschitz, || format!("half disk classified {c:?}"));
    // eta^Y(w) <= (eta_Y(s) / eta_D(s)) eta(w) along the restriction family
    for _ in 0..50 {
        let o = pick(&mut ctx.rng, &target_kinds());
        let w = random_point(&o, &mut ctx.rng);
        let floor = hurwitz_density(&o, w)?.lower();
        for s in basepoint_grid(&dstar, 12) {
            let v = candidate_upper(&dstar, &o, w, s)?;
            let want = hurwitz_density(&dstar, s)?.upper() / hyperbolic_density(&unit, s)?.lower() * floor;
            rec.require(rel(v, want) < 1e-9, || format!("candidate at s = {s} into {o}: {v} vs {want}"));
        }
        let cert = generalized_hurwitz_bounds_with(&dstar, &o, w, 1e-3, ctx.cfg.budget, Execution::Sequential)?;
        rec.require(cert.converged, || format!("no coincidence into {o} at {w}"));
    }
    Ok(())
}

fn check_hull_reduction(_: &mut Ctx, rec: &mut Recorder) -> Result<()> {
    rec.tolerance = 1e-9;
    let r = theorem8_reduction(&DomainSpec::PuncturedDisk, 12)?;
    rec.require(r.max_mismatch == 0.0 && r.l_original == r.l_transported, || "identity transport".into());
    rec.require(r.classification == Classification::NonLipschitz, || "punctured disk reduction".into());
    for y in simply_connected_kinds() {
        let r = theorem8_reduction(&y, 8)?;
        rec.require(r.l_original.lower == 1.0 && r.l_original.upper == 1.0, || format!("{y} is its own hull"));
    }
    rec.require(theorem8_reduction(&DomainSpec::cstar(), 4) == Err(Error::NotQuasiBounded), || "cstar is not quasi-bounded".into());
    for hull in [DomainSpec::HalfPlane, DomainSpec::Strip, small_disk()] {
        let t = theorem8_transported(&hull, 12)?;
        rec.observe(&format!("max_mismatch[{hull}]"), t.max_mismatch);
        rec.require(t.max_mismatch < 1e-9, || format!("transport into {hull}: {:e}", t.max_mismatch));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            density_samples: 200,
            distance_pairs: 5,
            triangle_triples: 10,
            certificate_calls: 100,
            contraction_levels: 12,
            ..RunConfig::default()
        }
    }

    #[test]
    fn ids_are_unique() {
        let mut ids = CHECK_IDS.to_vec();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECK_IDS.len());
    }

    #[test]
    fn small_suite_passes() {
        for o in verify_suite(&small(), Execution::default()) {
            assert_eq!(o.status, Status::Pass, "{}: {:?}", o.id, o.detail);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let cfg = RunConfig { seed: 5, ..small() };
        let a = verify_check("def2-triangle", &cfg, Execution::Sequential).unwrap();
        let b = verify_check("def2-triangle", &cfg, Execution::default()).unwrap();
        assert_eq!(a, b);
        assert!(verify_check("nope", &cfg, Execution::Sequential).is_none());
    }

    #[test]
    fn config_round_trips_and_validates() {
        let cfg: RunConfig = serde_json::from_str(r#"{"budget": 8, "stencil": 8}"#).unwrap();
        assert_eq!(cfg.budget, 8);
        assert_eq!(cfg.stencil, Stencil::Eight);
        assert_eq!(cfg.tolerance, 1e-6);
        assert!(serde_json::from_str::<RunConfig>(r#"{"stencil": 12}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        assert!(RunConfig { budget: 0, ..RunConfig::default() }.validate().is_err());
    }
}
