//! Certified enclosures of the generalized Hurwitz density `eta_Omega^Y(w)`
//! and upper bounds for the generalized Kobayashi density.
//!
//! The lower end of every certificate is the Hurwitz density of the target
//! (zero on the plane). The upper end is the best value of
//! `eta_Y(s) / |h'(s)|` over explicit admissible maps `h: Y -> Omega` with
//! `h(s) = w` and `w` attained only at `s`:
//!
//! * `h = G ∘ T ∘ phi`, where `phi` maps `Y` into the disk (its Riemann map,
//!   or the inclusion for the punctured disk), `T` is the disk automorphism
//!   sending `phi(s)` to 0 and `G` the Hurwitz covering of `(Omega, w)`;
//! * on the plane, the affine maps `h_n(z) = n (z - t) + w`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::Serialize;

use crate::covering::{hurwitz_covering_for, universal_covering_for, CoveringEvaluator, RiemannChart};
use crate::density::{hurwitz_density, hyperbolic_density};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{check_finite, cpoint, CPoint, MobiusMap};

/// Default relative convergence tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Arguments per radial level of the basepoint grid.
pub const GRID_ARGUMENTS: usize = 8;

/// Deepest radial level `1 - 2^-k`; deeper levels would sit inside the
/// density boundary guard.
pub const MAX_GRID_LEVEL: usize = 28;

/// Candidate upper values may undershoot the floor by this relative amount
/// through rounding alone.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `G ∘ T_s ∘ phi` on a simply connected basepoint domain.
    MobiusThroughCovering,
    /// Affine maps `n (z - t) + w` into the plane.
    LinearMaps,
    /// `G ∘ T_s` restricted to the punctured disk.
    RestrictionFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LowerWitness {
    HurwitzDensityFloor,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperWitness {
    pub s: CPoint,
    pub family: Family,
    /// Multiplier `n` of the affine family.
    pub scale: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub lower: f64,
    /// `+inf` when no admissible candidate exists within the budget.
    pub upper: f64,
    pub lower_witness: LowerWitness,
    pub upper_witness: Option<UpperWitness>,
    pub converged: bool,
}

impl BoundCertificate {
    pub fn gap_factor(&self) -> f64 {
        self.upper / self.lower
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    Ok(())
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn polar(r: f64, theta: f64) -> CPoint {
    cpoint(r * theta.cos(), r * theta.sin())
}

fn argument_key(z: CPoint) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Ordering used for deterministic tie-breaking: smallest modulus, then
/// smallest argument in `[0, 2 pi)`.
fn grid_order(a: &CPoint, b: &CPoint) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| argument_key(*a).total_cmp(&argument_key(*b)))
}

/// Disk-side grid: the origin, then `1 - 2^-k` for `k = 1..=levels`.
fn disk_grid(levels: usize) -> Vec<CPoint> {
    let mut grid = vec![cpoint(0.0, 0.0)];
    for k in 1..=levels.min(MAX_GRID_LEVEL) {
        let r = 1.0 - 0.5f64.powi(k as i32);
        grid.extend((0..GRID_ARGUMENTS).map(|j| polar(r, 2.0 * PI * j as f64 / GRID_ARGUMENTS as f64)));
    }
    grid
}

/// Candidate basepoints `s` in `Y` for a given budget, in tie-break order.
pub fn basepoint_grid(y: &DomainSpec, budget: usize) -> Vec<CPoint> {
    let mut grid: Vec<CPoint> = match *y {
        DomainSpec::PuncturedDisk => disk_grid(budget).into_iter().skip(1).collect(),
        DomainSpec::PlaneMinusPoint { b } => {
            let mut g = Vec::new();
            for k in 0..budget.min(MAX_GRID_LEVEL) {
                let r = 2f64.powi(k as i32);
                g.extend((0..GRID_ARGUMENTS).map(|j| b + polar(r, 2.0 * PI * j as f64 / GRID_ARGUMENTS as f64)));
            }
            g
        }
        DomainSpec::WholePlane => Vec::new(),
        _ => {
            let chart = RiemannChart::for_domain(y).expect("simply connected proper kind");
            disk_grid(budget).into_iter().map(|u| chart.from_disk(u).0).collect()
        }
    };
    grid.retain(|s| y.contains(*s) && hurwitz_density(y, *s).is_ok());
    grid.sort_by(grid_order);
    grid
}

/// Map of the basepoint domain into the disk: `(phi(s), |phi'(s)|, 1 - |phi(s)|^2)`.
fn into_disk(y: &DomainSpec, s: CPoint) -> Result<(CPoint, f64, f64)> {
    match *y {
        DomainSpec::PuncturedDisk => Ok((s, 1.0, crate::geometry::one_minus_abs_sq(s))),
        _ => {
            let chart = RiemannChart::for_domain(y).map_err(|_| Error::UnsupportedPair)?;
            let (u, du) = chart.to_disk(s);
            Ok((u, du.norm(), chart.disk_defect(s)))
        }
    }
}

/// `|(G ∘ T ∘ phi)'(s)|`; the composite sends `s` to the basepoint of
/// `cover` because `T(phi(s)) = 0`.
fn composite_derivative(cover: &CoveringEvaluator, y: &DomainSpec, s: CPoint) -> Result<f64> {
    let (u, dphi, defect) = into_disk(y, s)?;
    // T'(u) = 1 / (1 - |u|^2), with the defect taken from the chart
    MobiusMap::new(u)?;
    Ok(cover.derivative_at_origin() * dphi / defect)
}

fn family_for(y: &DomainSpec, omega: &DomainSpec) -> Result<Family> {
    if *omega == DomainSpec::WholePlane {
        return Ok(Family::LinearMaps);
    }
    match y {
        DomainSpec::PuncturedDisk => Ok(Family::RestrictionFamily),
        DomainSpec::PlaneMinusPoint { .. } => Err(Error::UnsupportedPair),
        _ => Ok(Family::MobiusThroughCovering),
    }
}

/// Value of `eta_Y(s) / |h'(s)|` for the candidate based at `s`; for the
/// affine family `budget` is the multiplier.
fn candidate_value(
    y: &DomainSpec,
    cover: Option<&CoveringEvaluator>,
    family: Family,
    s: CPoint,
    budget: usize,
) -> Result<f64> {
    let eta_y = hurwitz_density(y, s)?.upper();
    match family {
        Family::LinearMaps => Ok(eta_y / budget as f64),
        _ => {
            let cover = cover.ok_or(Error::UnsupportedPair)?;
            Ok(eta_y / composite_derivative(cover, y, s)?)
        }
    }
}

/// Upper-bound candidate for a single basepoint `s in Y`.
pub fn candidate_upper(y: &DomainSpec, omega: &DomainSpec, w: CPoint, s: CPoint) -> Result<f64> {
    let family = family_for(y, omega)?;
    if !y.contains(s) {
        return Err(Error::OutsideDomain(s));
    }
    let cover = match family {
        Family::LinearMaps => None,
        _ => Some(hurwitz_covering_for(omega, w).map_err(|e| match e {
            Error::UnsupportedDomain => Error::UnsupportedPair,
            other => other,
        })?),
    };
    candidate_value(y, cover.as_ref(), family, s, 1)
}

/// Certificate for `eta_Omega^Y(w)` with the default execution mode.
pub fn generalized_hurwitz_bounds(
    y: &DomainSpec,
    omega: &DomainSpec,
    w: CPoint,
    tol: f64,
    budget: usize,
) -> Result<BoundCertificate> {
    generalized_hurwitz_bounds_with(y, omega, w, tol, budget, Execution::default())
}

pub fn generalized_hurwitz_bounds_with(
    y: &DomainSpec,
    omega: &DomainSpec,
    w: CPoint,
    tol: f64,
    budget: usize,
    exec: Execution,
) -> Result<BoundCertificate> {
    check_finite(w)?;
    check_tolerance(tol)?;
    check_budget(budget)?;
    if !y.classify().is_proper {
        return Err(Error::NotProper);
    }
    if !omega.contains(w) {
        return Err(Error::OutsideDomain(w));
    }
    let (lower, lower_witness) = if omega.classify().is_proper {
        if *omega == DomainSpec::PuncturedDisk {
            return Err(Error::UnsupportedPair);
        }
        (hurwitz_density(omega, w)?.lower(), LowerWitness::HurwitzDensityFloor)
    } else {
        (0.0, LowerWitness::Zero)
    };

    let family = match family_for(y, omega) {
        Ok(f) => Some(f),
        Err(Error::UnsupportedPair) => None,
        Err(e) => return Err(e),
    };
    let mut upper = f64::INFINITY;
    let mut upper_witness = None;
    if let Some(family) = family {
        let cover = match family {
            Family::LinearMaps => None,
            _ => Some(hurwitz_covering_for(omega, w)?),
        };
        let grid = basepoint_grid(y, budget);
        let values = exec::map(&grid, exec, |s| candidate_value(y, cover.as_ref(), family, *s, budget));
        // first strict minimum in grid order
        for (s, v) in grid.iter().zip(values) {
            let v = v?;
            if v < upper {
                upper = v;
                upper_witness = Some(UpperWitness {
                    s: *s,
                    family,
                    scale: (family == Family::LinearMaps).then_some(budget),
                });
            }
        }
    }

    if upper < lower {
        assert!(
            lower - upper <= ROUNDING_SLACK * lower,
            "certificate inverted: upper {upper} < lower {lower}"
        );
        upper = lower;
    }
    let converged = if lower > 0.0 { upper - lower < tol * lower } else { upper < tol };
    Ok(BoundCertificate { lower, upper, lower_witness, upper_witness, converged })
}

/// `lambda_D(t) / n`: the value of `h_n(z) = n (z - t) + w` as a candidate
/// for `eta_C^D(w)`.
pub fn theorem2_sequence_bound(n: usize, t: CPoint) -> Result<f64> {
    check_finite(t)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if t.norm() >= 1.0 {
        return Err(Error::OutsideUnitDisk(t));
    }
    Ok(2.0 / (crate::geometry::one_minus_abs_sq(t) * n as f64))
}

/// Gap factor `(1 + r)^2 / (4 r)` between the punctured-disk candidate at
/// `|s| = r` and the floor.
pub fn example318_upper_ratio(s_abs: f64) -> Result<f64> {
    if !(s_abs > 0.0 && s_abs < 1.0) {
        return Err(Error::InvalidArgument(format!("|s| must lie in (0, 1), got {s_abs}")));
    }
    Ok((1.0 + s_abs) * (1.0 + s_abs) / (4.0 * s_abs))
}

/// Best candidate `lambda_Y(s) / |f'(s)|` for `kappa_Omega^Y(w)`, using
/// `f = U ∘ T ∘ phi` with `U` the universal covering of `(Omega, w)`.
pub fn kobayashi_upper_bound(y: &DomainSpec, omega: &DomainSpec, w: CPoint, budget: usize) -> Result<f64> {
    check_budget(budget)?;
    if !y.classify().is_hyperbolic || !omega.classify().is_hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    let cover = universal_covering_for(omega, w)?;
    let mut best = f64::INFINITY;
    for s in basepoint_grid(y, budget) {
        let lambda_y = hyperbolic_density(y, s)?.upper();
        let v = lambda_y / composite_derivative(&cover, y, s)?;
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasepointComparison {
    pub first: BoundCertificate,
    pub second: BoundCertificate,
    /// `first.upper <= second.upper + tol`, checked when the first basepoint
    /// domain is simply connected.
    pub ordering_holds: Option<bool>,
}

pub fn basepoint_comparison(
    y1: &DomainSpec,
    y2: &DomainSpec,
    omega: &DomainSpec,
    w: CPoint,
    tol: f64,
    budget: usize,
) -> Result<BasepointComparison> {
    if !y1.classify().is_proper || !y2.classify().is_proper {
        return Err(Error::NotProper);
    }
    let first = generalized_hurwitz_bounds(y1, omega, w, tol, budget)?;
    let second = generalized_hurwitz_bounds(y2, omega, w, tol, budget)?;
    let ordering_holds = y1.classify().is_simply_connected.then_some(first.upper <= second.upper + tol);
    Ok(BasepointComparison { first, second, ordering_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_into_cstar_converges_to_one_eighth() {
        let c = generalized_hurwitz_bounds(&DomainSpec::unit_disk(), &DomainSpec::cstar(), cpoint(1.0, 0.0), 1e-6, 16)
            .unwrap();
        assert_eq!(c.lower, 0.125);
        assert_eq!(c.lower_witness, LowerWitness::HurwitzDensityFloor);
        assert_relative_eq!(c.upper, 0.125, max_relative = 1e-12);
        assert!(c.converged);
        assert_eq!(c.upper_witness.unwrap().family, Family::MobiusThroughCovering);
    }

    #[test]
    fn punctured_disk_candidate_at_point_nine() {
        let w = cpoint(1.0, 0.0);
        let v = candidate_upper(&DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, cpoint(0.9, 0.0)).unwrap();
        assert_relative_eq!(v / 0.125, 3.61 / 3.6, max_relative = 1e-12);
        assert!(v <= 1.002778 * 0.125);
        let v2 = candidate_upper(&DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, cpoint(0.0, 0.99)).unwrap();
        assert!(v2 < v);
    }

    #[test]
    fn plane_target_uses_affine_maps() {
        let c = generalized_hurwitz_bounds(&DomainSpec::unit_disk(), &DomainSpec::WholePlane, cpoint(3.0, 1.0), 1e-6, 100)
            .unwrap();
        assert_eq!(c.lower, 0.0);
        assert_eq!(c.lower_witness, LowerWitness::Zero);
        assert_relative_eq!(c.upper, 0.02, max_relative = 1e-15);
        let wit = c.upper_witness.unwrap();
        assert_eq!(wit.family, Family::LinearMaps);
        assert_eq!(wit.s, cpoint(0.0, 0.0));
        assert_eq!(wit.scale, Some(100));
    }

    #[test]
    fn errors() {
        let w = cpoint(0.5, 0.0);
        assert_eq!(
            generalized_hurwitz_bounds(&DomainSpec::unit_disk(), &DomainSpec::PuncturedDisk, w, 1e-6, 8),
            Err(Error::UnsupportedPair)
        );
        assert_eq!(
            generalized_hurwitz_bounds(&DomainSpec::WholePlane, &DomainSpec::unit_disk(), w, 1e-6, 8),
            Err(Error::NotProper)
        );
        assert!(generalized_hurwitz_bounds(&DomainSpec::unit_disk(), &DomainSpec::unit_disk(), w, 1e-6, 0).is_err());
        assert!(generalized_hurwitz_bounds(&DomainSpec::unit_disk(), &DomainSpec::unit_disk(), w, 0.0, 8).is_err());
    }

    #[test]
    fn punctured_plane_basepoint_has_no_bounded_candidates() {
        let c = generalized_hurwitz_bounds(&DomainSpec::cstar(), &DomainSpec::unit_disk(), cpoint(0.1, 0.0), 1e-6, 8)
            .unwrap();
        assert_eq!(c.upper, f64::INFINITY);
        assert!(c.upper_witness.is_none());
        assert!(!c.converged);
    }

    #[test]
    fn sequence_bound_values() {
        assert_relative_eq!(theorem2_sequence_bound(100, cpoint(0.0, 0.0)).unwrap(), 0.02);
        assert_relative_eq!(theorem2_sequence_bound(1000, cpoint(0.0, 0.0)).unwrap(), 0.002);
        assert_relative_eq!(theorem2_sequence_bound(100, cpoint(0.5, 0.0)).unwrap(), 2.0 / 75.0, max_relative = 1e-15);
        assert!(theorem2_sequence_bound(0, cpoint(0.0, 0.0)).is_err());
        assert!(theorem2_sequence_bound(3, cpoint(1.0, 0.0)).is_err());
    }

    #[test]
    fn gap_factor_values() {
        assert_relative_eq!(example318_upper_ratio(0.9).unwrap(), 3.61 / 3.6, max_relative = 1e-15);
        assert_relative_eq!(example318_upper_ratio(0.99).unwrap(), 1.99 * 1.99 / 3.96, max_relative = 1e-15);
        assert!((example318_upper_ratio(1.0 - 1e-9).unwrap() - 1.0).abs() < 1e-15);
        assert!(example318_upper_ratio(1.0).is_err());
        assert!(example318_upper_ratio(0.0).is_err());
    }

    #[test]
    fn kobayashi_examples() {
        let k = kobayashi_upper_bound(&DomainSpec::unit_disk(), &DomainSpec::unit_disk(), cpoint(0.0, 0.0), 4).unwrap();
        assert_relative_eq!(k, 2.0, max_relative = 1e-14);
        let w = cpoint((-1f64).exp(), 0.0);
        let k = kobayashi_upper_bound(&DomainSpec::unit_disk(), &DomainSpec::PuncturedDisk, w, 4).unwrap();
        assert_relative_eq!(k, std::f64::consts::E, max_relative = 1e-12);
        let k = kobayashi_upper_bound(&DomainSpec::PuncturedDisk, &DomainSpec::unit_disk(), cpoint(0.0, 0.0), 8).unwrap();
        assert!(k.is_finite() && k >= 2.0);
        assert_eq!(
            kobayashi_upper_bound(&DomainSpec::cstar(), &DomainSpec::unit_disk(), cpoint(0.0, 0.0), 4),
            Err(Error::NotHyperbolic)
        );
    }

    #[test]
    fn kobayashi_never_exceeds_hurwitz_candidate() {
        let w = cpoint(0.2, -0.4);
        for y in [DomainSpec::unit_disk(), DomainSpec::PuncturedDisk, DomainSpec::Strip] {
            let k = kobayashi_upper_bound(&y, &DomainSpec::unit_disk(), w, 10).unwrap();
            let h = generalized_hurwitz_bounds(&y, &DomainSpec::unit_disk(), w, 1e-6, 10).unwrap();
            assert!(k <= h.upper * (1.0 + 1e-12), "{y}: {k} > {}", h.upper);
        }
    }

    #[test]
    fn basepoint_comparisons() {
        let w = cpoint(1.0, 0.0);
        let c = basepoint_comparison(&DomainSpec::unit_disk(), &DomainSpec::HalfPlane, &DomainSpec::cstar(), w, 1e-6, 16)
            .unwrap();
        assert!(c.first.converged && c.second.converged);
        assert_relative_eq!(c.second.upper, 0.125, max_relative = 1e-12);
        assert_eq!(c.ordering_holds, Some(true));
        let c = basepoint_comparison(&DomainSpec::unit_disk(), &DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, 1e-6, 16)
            .unwrap();
        assert!(c.second.upper >= 0.125);
        assert_eq!(c.ordering_holds, Some(true));
        let omega = DomainSpec::disk(0.0, 0.0, 2.0).unwrap();
        let c = basepoint_comparison(&DomainSpec::Strip, &DomainSpec::unit_disk(), &omega, cpoint(0.0, 0.0), 1e-6, 16)
            .unwrap();
        assert!(c.first.converged && c.second.converged);
        assert_relative_eq!(c.first.upper, c.second.upper, max_relative = 1e-12);
    }

    #[test]
    fn budget_monotone_and_grid_nested() {
        let w = cpoint(-2.0, 0.5);
        let mut prev = f64::INFINITY;
        for budget in 1..=20 {
            let c = generalized_hurwitz_bounds(&DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, 1e-6, budget).unwrap();
            assert!(c.upper <= prev);
            prev = c.upper;
        }
    }

    #[test]
    fn execution_modes_agree() {
        let w = cpoint(0.3, 0.7);
        let a = generalized_hurwitz_bounds_with(&DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, 1e-3, 12, Execution::Sequential)
            .unwrap();
        let b = generalized_hurwitz_bounds_with(&DomainSpec::PuncturedDisk, &DomainSpec::cstar(), w, 1e-3, 12, Execution::Parallel)
            .unwrap();
        assert_eq!(a, b);
    }
}
