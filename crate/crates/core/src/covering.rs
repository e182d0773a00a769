//! Holomorphic covering maps of the catalog domains.
//!
//! The centerpiece is the modular product
//!
//! ```text
//! g(w) = 16 w prod_{n>=1} ((1 + w^{2n}) / (1 + w^{2n-1}))^8,   |w| < 1,
//! ```
//!
//! which extends the covering of `C \ {0, 1}` by the punctured disk to a
//! map `D -> C \ {1}` with `g(0) = 0`, `g'(0) = 16`. It is summed in log
//! space with an explicit geometric bound on the omitted tail.

use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{check_finite, cpoint, CPoint, MobiusMap};

/// Largest modulus at which the product is evaluated.
pub const PRODUCT_MAX_MODULUS: f64 = 1.0 - 1e-6;

/// Product truncation tolerance used inside covering evaluators.
pub const EVALUATOR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductTruncation {
    pub n_terms: usize,
    /// Bound on the modulus of the logarithm of the omitted tail.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveringEval {
    pub value: CPoint,
    pub derivative: CPoint,
    pub truncation: ProductTruncation,
}

/// Bound on `|log prod_{n>N}|` for `|w| = r`.
///
/// Uses `|log(1+x)| <= |x| / (1 - r)` and `sum_{m>2N} r^m = r^{2N+1} / (1-r)`.
pub fn product_tail_bound(r: f64, n_terms: usize) -> f64 {
    8.0 * r.powi(2 * n_terms as i32 + 1) / ((1.0 - r) * (1.0 - r))
}

/// Bound on the tail of the logarithmic derivative series, multiplied by `r`.
fn derivative_tail_bound(r: f64, n_terms: usize) -> f64 {
    // sum_{m>=M} m r^m = r^M (M - (M-1) r) / (1-r)^2
    let m = (2 * n_terms + 1) as f64;
    8.0 * r.powf(m) * (m - (m - 1.0) * r) / ((1.0 - r).powi(3))
}

fn terms_for(r: f64, tol: f64) -> usize {
    let mut n = 1usize;
    while product_tail_bound(r, n) > 0.5 * tol || derivative_tail_bound(r, n) > 0.5 * tol {
        n += 1;
    }
    n
}

/// Evaluates the truncated product with exactly `n_terms` factors, returning
/// `(g(w), g'(w))`.
pub fn modular_product(w: CPoint, n_terms: usize) -> (CPoint, CPoint) {
    let one = cpoint(1.0, 0.0);
    let mut log_sum = cpoint(0.0, 0.0);
    // d/dw of log_sum
    let mut dlog_sum = cpoint(0.0, 0.0);
    let mut odd = w; // w^{2n-1}
    let mut even = w * w; // w^{2n}
    let mut odd_prev = one; // w^{2n-2}
    for n in 1..=n_terms {
        let k = n as f64;
        log_sum += (one + even).ln() - (one + odd).ln();
        dlog_sum += (2.0 * k) * odd / (one + even) - (2.0 * k - 1.0) * odd_prev / (one + odd);
        odd_prev = even;
        odd = even * w;
        even = odd * w;
    }
    let product = (8.0 * log_sum).exp();
    let value = 16.0 * w * product;
    let derivative = 16.0 * product * (one + 8.0 * w * dlog_sum);
    (value, derivative)
}

/// The Hurwitz covering `g: D -> C \ {1}` with `g(0) = 0`, `g'(0) = 16`,
/// evaluated with relative error at most `tol`.
pub fn hurwitz_covering_c_minus_1(w: CPoint, tol: f64) -> Result<CoveringEval> {
    check_finite(w)?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let r = w.norm();
    if r > PRODUCT_MAX_MODULUS {
        return Err(Error::OutsideUnitDisk(w));
    }
    if r == 0.0 {
        return Ok(CoveringEval {
            value: cpoint(0.0, 0.0),
            derivative: cpoint(16.0, 0.0),
            truncation: ProductTruncation { n_terms: 1, tail_bound: 0.0 },
        });
    }
    let n_terms = terms_for(r, tol.min(0.5));
    let (value, derivative) = modular_product(w, n_terms);
    debug_assert!(value != cpoint(1.0, 0.0), "g omits the value 1");
    Ok(CoveringEval { value, derivative, truncation: ProductTruncation { n_terms, tail_bound: product_tail_bound(r, n_terms) } })
}

/// The universal covering `tau -> exp(i tau)` of the punctured disk by the
/// upper half-plane.
pub fn punctured_disk_covering(tau: CPoint) -> Result<CPoint> {
    check_finite(tau)?;
    if tau.im <= 0.0 {
        return Err(Error::InvalidArgument(format!("Im tau must be positive, got {}", tau.im)));
    }
    Ok((CPoint::i() * tau).exp())
}

/// Riemann map of a simply connected proper catalog domain onto the unit
/// disk, together with its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannChart {
    /// `z -> (z - c) / r`
    Disk { center: CPoint, radius: f64 },
    /// Cayley map `z -> (z - 1) / (z + 1)`
    HalfPlane,
    /// `z -> (e^z - i) / (e^z + i)`
    Strip,
}

impl RiemannChart {
    pub fn for_domain(d: &DomainSpec) -> Result<Self> {
        match *d {
            DomainSpec::Disk { center, radius } => Ok(RiemannChart::Disk { center, radius }),
            DomainSpec::HalfPlane => Ok(RiemannChart::HalfPlane),
            DomainSpec::Strip => Ok(RiemannChart::Strip),
            _ => Err(Error::UnsupportedDomain),
        }
    }

    pub fn domain(&self) -> DomainSpec {
        match *self {
            RiemannChart::Disk { center, radius } => DomainSpec::Disk { center, radius },
            RiemannChart::HalfPlane => DomainSpec::HalfPlane,
            RiemannChart::Strip => DomainSpec::Strip,
        }
    }

    /// `(phi(z), phi'(z))`
    pub fn to_disk(&self, z: CPoint) -> (CPoint, CPoint) {
        let one = cpoint(1.0, 0.0);
        match *self {
            RiemannChart::Disk { center, radius } => ((z - center) / radius, cpoint(1.0 / radius, 0.0)),
            RiemannChart::HalfPlane => {
                let den = z + one;
                ((z - one) / den, 2.0 / (den * den))
            }
            RiemannChart::Strip => {
                let e = z.exp();
                let i = CPoint::i();
                let den = e + i;
                ((e - i) / den, 2.0 * i * e / (den * den))
            }
        }
    }

    /// `1 - |phi(z)|^2`, evaluated without cancellation near the boundary.
    pub fn disk_defect(&self, z: CPoint) -> f64 {
        match *self {
            RiemannChart::Disk { center, radius } => {
                let m = (z - center).norm();
                (radius - m) * (radius + m) / (radius * radius)
            }
            RiemannChart::HalfPlane => 4.0 * z.re / (z + 1.0).norm_sqr(),
            RiemannChart::Strip => {
                let e = z.exp();
                4.0 * e.im / (e + CPoint::i()).norm_sqr()
            }
        }
    }

    /// `(phi^{-1}(u), (phi^{-1})'(u))`
    pub fn from_disk(&self, u: CPoint) -> (CPoint, CPoint) {
        let one = cpoint(1.0, 0.0);
        match *self {
            RiemannChart::Disk { center, radius } => (center + radius * u, cpoint(radius, 0.0)),
            RiemannChart::HalfPlane => {
                let den = one - u;
                ((one + u) / den, 2.0 / (den * den))
            }
            RiemannChart::Strip => {
                let z = (CPoint::i() * (one + u) / (one - u)).ln();
                (z, 2.0 / ((one + u) * (one - u)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CoverKind {
    /// `phi^{-1}(T_a^{-1}(e^{i theta} z))`
    Conformal { chart: RiemannChart, automorphism: MobiusMap, rotation: CPoint },
    /// `p + (b0 - p) g(e^{i theta} z)`
    PlaneMinusPoint { omitted: CPoint, rotation: CPoint },
    /// `exp(i tau(e^{i theta} z))` with `tau` the disk-to-half-plane map
    /// sending 0 to a logarithm of the basepoint.
    PuncturedDiskUniversal { tau0: CPoint, rotation: CPoint },
}

/// A covering map `G: D -> domain` normalized by `G(0) = basepoint`,
/// `G'(0) > 0`. Immutable and shareable across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringEvaluator {
    domain: DomainSpec,
    basepoint: CPoint,
    kind: CoverKind,
}

fn unit(z: CPoint) -> CPoint {
    z / z.norm()
}

impl CoveringEvaluator {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn basepoint(&self) -> CPoint {
        self.basepoint
    }

    /// `(G(z), G'(z))` for `|z| < 1`.
    pub fn eval(&self, z: CPoint) -> Result<(CPoint, CPoint)> {
        check_finite(z)?;
        if z.norm() >= 1.0 {
            return Err(Error::OutsideUnitDisk(z));
        }
        if z == cpoint(0.0, 0.0) {
            return Ok((self.basepoint, cpoint(self.derivative_at_origin(), 0.0)));
        }
        match self.kind {
            CoverKind::Conformal { chart, automorphism, rotation } => {
                let u = automorphism.inverse_eval(rotation * z)?;
                let du = automorphism.inverse_derivative(rotation * z)? * rotation;
                let (value, dphi_inv) = chart.from_disk(u);
                Ok((value, dphi_inv * du))
            }
            CoverKind::PlaneMinusPoint { omitted, rotation } => {
                let g = hurwitz_covering_c_minus_1(rotation * z, EVALUATOR_TOL)?;
                let scale = omitted - self.basepoint;
                Ok((self.basepoint + scale * g.value, scale * rotation * g.derivative))
            }
            CoverKind::PuncturedDiskUniversal { tau0, rotation } => {
                let one = cpoint(1.0, 0.0);
                let i = CPoint::i();
                let zr = rotation * z;
                let tau = tau0.re + tau0.im * i * (one + zr) / (one - zr);
                let dtau = tau0.im * i * 2.0 / ((one - zr) * (one - zr)) * rotation;
                let value = (i * tau).exp();
                Ok((value, i * dtau * value))
            }
        }
    }

    /// `G'(0)`, a positive real.
    pub fn derivative_at_origin(&self) -> f64 {
        match self.kind {
            CoverKind::Conformal { chart, automorphism, .. } => {
                let a = automorphism.center();
                let (_, dphi_inv) = chart.from_disk(a);
                crate::geometry::one_minus_abs_sq(a) * dphi_inv.norm()
            }
            CoverKind::PlaneMinusPoint { omitted, .. } => 16.0 * (omitted - self.basepoint).norm(),
            CoverKind::PuncturedDiskUniversal { tau0, .. } => 2.0 * tau0.im * self.basepoint.norm(),
        }
    }
}

fn conformal_evaluator(domain: &DomainSpec, basepoint: CPoint) -> Result<CoveringEvaluator> {
    let chart = RiemannChart::for_domain(domain)?;
    let (a, _) = chart.to_disk(basepoint);
    let automorphism = MobiusMap::new(a)?;
    let (_, dphi_inv) = chart.from_disk(a);
    let rotation = unit(dphi_inv).conj();
    Ok(CoveringEvaluator { domain: *domain, basepoint, kind: CoverKind::Conformal { chart, automorphism, rotation } })
}

fn check_basepoint(domain: &DomainSpec, basepoint: CPoint) -> Result<()> {
    check_finite(basepoint)?;
    if !domain.contains(basepoint) {
        return Err(Error::OutsideDomain(basepoint));
    }
    Ok(())
}

/// The Hurwitz covering of `(D, 0)` onto `(domain, basepoint)`.
///
/// Simply connected kinds use the normalized Riemann map; `C \ {b0}` uses
/// the rotated and rescaled modular product so that `b0` is the omitted
/// value. The punctured disk has no closed form and is reported as
/// unsupported, as is the plane.
pub fn hurwitz_covering_for(domain: &DomainSpec, basepoint: CPoint) -> Result<CoveringEvaluator> {
    match *domain {
        DomainSpec::WholePlane | DomainSpec::PuncturedDisk => Err(Error::UnsupportedDomain),
        DomainSpec::PlaneMinusPoint { b } => {
            check_basepoint(domain, basepoint)?;
            let rotation = unit(b - basepoint).conj();
            Ok(CoveringEvaluator { domain: *domain, basepoint, kind: CoverKind::PlaneMinusPoint { omitted: b, rotation } })
        }
        _ => {
            check_basepoint(domain, basepoint)?;
            conformal_evaluator(domain, basepoint)
        }
    }
}

/// The universal covering of `(D, 0)` onto `(domain, basepoint)` for a
/// hyperbolic catalog domain.
pub fn universal_covering_for(domain: &DomainSpec, basepoint: CPoint) -> Result<CoveringEvaluator> {
    if !domain.classify().is_hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    check_basepoint(domain, basepoint)?;
    match *domain {
        DomainSpec::PuncturedDisk => {
            let tau0 = cpoint(basepoint.arg(), -basepoint.norm().ln());
            // G'(0) before rotation is -2 Im(tau0) * basepoint
            let rotation = unit(-basepoint).conj();
            Ok(CoveringEvaluator {
                domain: *domain,
                basepoint,
                kind: CoverKind::PuncturedDiskUniversal { tau0, rotation },
            })
        }
        _ => conformal_evaluator(domain, basepoint),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn product_at_origin_is_exact() {
        let g = hurwitz_covering_c_minus_1(cpoint(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(g.value, cpoint(0.0, 0.0));
        assert_eq!(g.derivative, cpoint(16.0, 0.0));
    }

    #[test]
    fn truncation_is_honest_at_point_one() {
        let w = cpoint(0.1, 0.0);
        let g = hurwitz_covering_c_minus_1(w, 1e-12).unwrap();
        let (more, _) = modular_product(w, g.truncation.n_terms + 10);
        assert!(((g.value - more) / more).norm() < 1e-12);
        assert!(g.truncation.tail_bound < 1e-12);
    }

    #[test]
    fn leading_taylor_coefficients() {
        // g(w) = 16 w - 128 w^2 + 704 w^3 - 3072 w^4 + 11488 w^5 - ...
        let w = cpoint(1e-3, 0.0);
        let g = hurwitz_covering_c_minus_1(w, 1e-15).unwrap();
        let series = 16.0 * w - 128.0 * w * w + 704.0 * w * w * w - 3072.0 * w.powi(4) + 11488.0 * w.powi(5);
        assert!((g.value - series).norm() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let a = hurwitz_covering_c_minus_1(cpoint(0.1, 0.3), 1e-13).unwrap();
        let b = hurwitz_covering_c_minus_1(cpoint(0.1, -0.3), 1e-13).unwrap();
        assert!((a.value.conj() - b.value).norm() < 1e-12);
        let c = hurwitz_covering_c_minus_1(cpoint(-0.1, 0.0), 1e-13).unwrap();
        let d = hurwitz_covering_c_minus_1(cpoint(0.1, 0.0), 1e-13).unwrap();
        assert!(c.value.im.abs() < 1e-15 && d.value.im.abs() < 1e-15);
    }

    #[test]
    fn product_rejects_bad_arguments() {
        assert!(hurwitz_covering_c_minus_1(cpoint(0.9999999, 0.0), 1e-10).is_err());
        assert!(hurwitz_covering_c_minus_1(cpoint(0.5, 0.0), 0.0).is_err());
        assert!(hurwitz_covering_c_minus_1(cpoint(0.5, 0.0), -1.0).is_err());
    }

    #[test]
    fn tail_bound_decreases_with_terms() {
        for r in [0.1, 0.5, 0.9, 0.99] {
            let mut prev = f64::INFINITY;
            for n in 1..50 {
                let t = product_tail_bound(r, n);
                assert!(t < prev && t.is_finite());
                prev = t;
            }
        }
    }

    #[test]
    fn analytic_derivative_matches_central_difference() {
        let h = 1e-6;
        for w in [cpoint(0.3, 0.2), cpoint(-0.5, 0.1), cpoint(0.0, 0.7)] {
            let g = hurwitz_covering_c_minus_1(w, 1e-14).unwrap();
            let plus = hurwitz_covering_c_minus_1(w + h, 1e-14).unwrap().value;
            let minus = hurwitz_covering_c_minus_1(w - h, 1e-14).unwrap().value;
            let fd = (plus - minus) / (2.0 * h);
            assert!(((fd - g.derivative) / g.derivative).norm() < 1e-6, "{w}");
        }
    }

    #[test]
    fn punctured_disk_covering_values() {
        assert_relative_eq!(punctured_disk_covering(CPoint::i()).unwrap().re, (-1f64).exp(), epsilon = 1e-15);
        let z = punctured_disk_covering(cpoint(PI, 1.0)).unwrap();
        assert!((z - cpoint(-(-1f64).exp(), 0.0)).norm() < 1e-15);
        assert_relative_eq!(punctured_disk_covering(cpoint(0.3, 2.0)).unwrap().norm(), (-2f64).exp(), epsilon = 1e-15);
        assert!(punctured_disk_covering(cpoint(0.0, 0.0)).is_err());
    }

    #[test]
    fn disk_covering_is_identity_at_origin() {
        let g = hurwitz_covering_for(&DomainSpec::unit_disk(), cpoint(0.0, 0.0)).unwrap();
        assert_eq!(g.derivative_at_origin(), 1.0);
        let (v, d) = g.eval(cpoint(0.3, -0.2)).unwrap();
        assert!((v - cpoint(0.3, -0.2)).norm() < 1e-15);
        assert!((d - cpoint(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cstar_covering_has_derivative_sixteen() {
        let g = hurwitz_covering_for(&DomainSpec::cstar(), cpoint(1.0, 0.0)).unwrap();
        assert_eq!(g.derivative_at_origin(), 16.0);
        let (v, d) = g.eval(cpoint(0.0, 0.0)).unwrap();
        assert_eq!(v, cpoint(1.0, 0.0));
        assert_eq!(d, cpoint(16.0, 0.0));
    }

    #[test]
    fn punctured_disk_has_no_hurwitz_covering() {
        assert_eq!(
            hurwitz_covering_for(&DomainSpec::PuncturedDisk, cpoint(0.5, 0.0)),
            Err(Error::UnsupportedDomain)
        );
        assert_eq!(hurwitz_covering_for(&DomainSpec::WholePlane, cpoint(0.5, 0.0)), Err(Error::UnsupportedDomain));
    }

    #[test]
    fn conformal_coverings_hit_their_basepoint() {
        let cases = [
            (DomainSpec::HalfPlane, cpoint(0.7, -2.0)),
            (DomainSpec::Strip, cpoint(-1.0, 0.4)),
            (DomainSpec::disk(1.0, 1.0, 0.5).unwrap(), cpoint(1.2, 0.8)),
        ];
        for (d, p) in cases {
            let g = hurwitz_covering_for(&d, p).unwrap();
            // evaluate slightly off the origin to exercise the general branch
            let (v, dv) = g.eval(cpoint(1e-12, 0.0)).unwrap();
            assert!((v - p).norm() < 1e-9, "{d}");
            assert!((dv.norm() - g.derivative_at_origin()).abs() < 1e-9);
            assert!(dv.re > 0.0 && dv.im.abs() < 1e-9 * dv.re, "{d}: {dv}");
            for z in [cpoint(0.5, 0.1), cpoint(-0.3, -0.8)] {
                assert!(d.contains(g.eval(z).unwrap().0));
            }
        }
    }

    #[test]
    fn punctured_disk_universal_cover() {
        let w = cpoint(0.2, 0.3);
        let f = universal_covering_for(&DomainSpec::PuncturedDisk, w).unwrap();
        let (v, d) = f.eval(cpoint(1e-13, 0.0)).unwrap();
        assert!((v - w).norm() < 1e-11);
        assert_relative_eq!(d.norm(), f.derivative_at_origin(), max_relative = 1e-9);
        assert!(d.re > 0.0);
        for z in [cpoint(0.9, 0.0), cpoint(-0.5, 0.5)] {
            assert!(DomainSpec::PuncturedDisk.contains(f.eval(z).unwrap().0));
        }
    }
}
