//! Closed-form and interval-valued conformal densities.
//!
//! All densities use the curvature -1 normalization, so the unit disk
//! carries `2 / (1 - |w|^2)`. The Hahn density of the punctured disk is
//! rescaled into the same convention; the alternative normalization is kept
//! available through [`hahn_density_paper_normalization`].

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{check_finite, CPoint, Density};

/// Points closer than this to the boundary are rejected.
pub const BOUNDARY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityValue {
    ClosedForm(f64),
    Series(f64),
    /// Certified enclosure `0 <= lower <= upper`.
    Interval { lower: f64, upper: f64 },
}

impl DensityValue {
    pub fn lower(&self) -> f64 {
        match *self {
            DensityValue::ClosedForm(v) | DensityValue::Series(v) => v,
            DensityValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            DensityValue::ClosedForm(v) | DensityValue::Series(v) => v,
            DensityValue::Interval { upper, .. } => upper,
        }
    }

    /// The value, when it is not an interval.
    pub fn point(&self) -> Option<f64> {
        match *self {
            DensityValue::ClosedForm(v) | DensityValue::Series(v) => Some(v),
            DensityValue::Interval { .. } => None,
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            DensityValue::ClosedForm(_) => "ClosedForm",
            DensityValue::Series(_) => "Series",
            DensityValue::Interval { .. } => "Interval",
        }
    }

    fn map_reciprocal(&self, numerator: f64) -> DensityValue {
        match *self {
            DensityValue::ClosedForm(v) => DensityValue::ClosedForm(numerator / v),
            DensityValue::Series(v) => DensityValue::Series(numerator / v),
            DensityValue::Interval { lower, upper } => {
                DensityValue::Interval { lower: numerator / upper, upper: numerator / lower }
            }
        }
    }
}

impl Serialize for DensityValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            DensityValue::ClosedForm(v) | DensityValue::Series(v) => {
                let mut st = serializer.serialize_struct("DensityValue", 2)?;
                st.serialize_field("value", &v)?;
                st.serialize_field("provenance", self.provenance())?;
                st.end()
            }
            DensityValue::Interval { lower, upper } => {
                let mut st = serializer.serialize_struct("DensityValue", 3)?;
                st.serialize_field("lower", &lower)?;
                st.serialize_field("upper", &upper)?;
                st.serialize_field("provenance", self.provenance())?;
                st.end()
            }
        }
    }
}

fn check_point(d: &DomainSpec, w: CPoint) -> Result<()> {
    check_finite(w)?;
    if !d.contains(w) {
        return Err(Error::OutsideDomain(w));
    }
    if d.boundary_distance_unchecked(w) < BOUNDARY_GUARD {
        return Err(Error::TooCloseToBoundary(w));
    }
    Ok(())
}

fn raw_hyperbolic(d: &DomainSpec, w: CPoint) -> f64 {
    match *d {
        DomainSpec::Disk { center, radius } => {
            let m = (w - center).norm();
            2.0 * radius / ((radius - m) * (radius + m))
        }
        DomainSpec::HalfPlane => 1.0 / w.re,
        DomainSpec::Strip => 1.0 / w.im.sin(),
        DomainSpec::PuncturedDisk => {
            let m = w.norm();
            -1.0 / (m * m.ln())
        }
        DomainSpec::WholePlane | DomainSpec::PlaneMinusPoint { .. } => f64::INFINITY,
    }
}

fn raw_hahn(w: CPoint) -> f64 {
    let m = w.norm();
    (1.0 + m) / (2.0 * m * (1.0 - m))
}

/// Hyperbolic density `lambda_d(w)`.
pub fn hyperbolic_density(d: &DomainSpec, w: CPoint) -> Result<DensityValue> {
    if !d.classify().is_hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    check_point(d, w)?;
    Ok(DensityValue::ClosedForm(raw_hyperbolic(d, w)))
}

/// Hurwitz density `eta_d(w)`.
///
/// Simply connected domains share the hyperbolic density; `C \ {b}` has
/// `1 / (8 |w - b|)`; the punctured disk is enclosed between its hyperbolic
/// density and its Hahn density.
pub fn hurwitz_density(d: &DomainSpec, w: CPoint) -> Result<DensityValue> {
    if !d.classify().is_proper {
        return Err(Error::NotProper);
    }
    check_point(d, w)?;
    Ok(match *d {
        DomainSpec::PlaneMinusPoint { b } => DensityValue::ClosedForm(1.0 / (8.0 * (w - b).norm())),
        DomainSpec::PuncturedDisk => {
            DensityValue::Interval { lower: raw_hyperbolic(d, w), upper: raw_hahn(w) }
        }
        _ => DensityValue::ClosedForm(raw_hyperbolic(d, w)),
    })
}

/// Hurwitz radius `r_d(w) = 2 / eta_d(w)`, interval-valued where the
/// density is.
pub fn hurwitz_radius(d: &DomainSpec, w: CPoint) -> Result<DensityValue> {
    Ok(hurwitz_density(d, w)?.map_reciprocal(2.0))
}

fn check_punctured_disk_point(w: CPoint) -> Result<()> {
    check_finite(w)?;
    let m = w.norm();
    if m == 0.0 || m >= 1.0 {
        return Err(Error::OutsideDomain(w));
    }
    check_point(&DomainSpec::PuncturedDisk, w)
}

/// Hahn density of the punctured disk, `(1 + |w|) / (2 |w| (1 - |w|))`.
pub fn hahn_density_punctured_disk(w: CPoint) -> Result<DensityValue> {
    check_punctured_disk_point(w)?;
    Ok(DensityValue::ClosedForm(raw_hahn(w)))
}

/// The Hahn density in the curvature -4 normalization,
/// `(1 + |w|) / (4 |w| (1 - |w|))`; half of [`hahn_density_punctured_disk`].
pub fn hahn_density_paper_normalization(w: CPoint) -> Result<f64> {
    check_punctured_disk_point(w)?;
    Ok(0.5 * raw_hahn(w))
}

/// Quasihyperbolic density `1 / dist(w, boundary)`.
pub fn quasihyperbolic_density(d: &DomainSpec, w: CPoint) -> Result<DensityValue> {
    if !d.classify().is_proper {
        return Err(Error::NotProper);
    }
    check_point(d, w)?;
    Ok(DensityValue::ClosedForm(1.0 / d.boundary_distance_unchecked(w)))
}

/// Which density a [`DensityField`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Hyperbolic,
    /// Lower end of the Hurwitz density (the density itself where it is a
    /// point value).
    HurwitzLower,
    /// Upper end of the Hurwitz density.
    HurwitzUpper,
    Quasihyperbolic,
}

/// Infallible density evaluator for quadrature and graph weights.
///
/// Returns `+inf` outside the domain and within [`BOUNDARY_GUARD`] of its
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityField {
    domain: DomainSpec,
    kind: FieldKind,
}

impl DensityField {
    pub fn new(domain: DomainSpec, kind: FieldKind) -> Result<Self> {
        let class = domain.classify();
        match kind {
            FieldKind::Hyperbolic if !class.is_hyperbolic => Err(Error::NotHyperbolic),
            _ if !class.is_proper => Err(Error::NotProper),
            _ => Ok(Self { domain, kind }),
        }
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }
}

impl Density for DensityField {
    fn density(&self, w: CPoint) -> f64 {
        if !self.domain.contains(w) {
            return f64::INFINITY;
        }
        let bd = self.domain.boundary_distance_unchecked(w);
        if bd < BOUNDARY_GUARD {
            return f64::INFINITY;
        }
        match (self.kind, self.domain) {
            (FieldKind::Quasihyperbolic, _) => 1.0 / bd,
            (FieldKind::Hyperbolic, d) => raw_hyperbolic(&d, w),
            (_, DomainSpec::PlaneMinusPoint { b }) => 1.0 / (8.0 * (w - b).norm()),
            (FieldKind::HurwitzUpper, DomainSpec::PuncturedDisk) => raw_hahn(w),
            (_, d) => raw_hyperbolic(&d, w),
        }
    }
}
