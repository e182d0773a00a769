//! The closed catalog of plane domains.
//!
//! Half-plane and strip sit in canonical position (`Re w > 0` and
//! `0 < Im w < pi`); other positions are reached through affine maps applied
//! by the caller.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cpoint, CPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    WholePlane,
    PlaneMinusPoint { b: CPoint },
    Disk { center: CPoint, radius: f64 },
    HalfPlane,
    Strip,
    PuncturedDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainClass {
    pub is_proper: bool,
    pub is_hyperbolic: bool,
    pub is_simply_connected: bool,
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk { center: cpoint(0.0, 0.0), radius: 1.0 }
    }

    /// `C \ {0}`.
    pub fn cstar() -> Self {
        DomainSpec::PlaneMinusPoint { b: cpoint(0.0, 0.0) }
    }

    pub fn disk(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidArgument(format!("disk radius {radius} must be positive and finite")));
        }
        Ok(DomainSpec::Disk { center: cpoint(cx, cy), radius })
    }

    pub fn contains(&self, w: CPoint) -> bool {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return false;
        }
        match *self {
            DomainSpec::WholePlane => true,
            DomainSpec::PlaneMinusPoint { b } => w != b,
            DomainSpec::Disk { center, radius } => (w - center).norm() < radius,
            DomainSpec::HalfPlane => w.re > 0.0,
            DomainSpec::Strip => w.im > 0.0 && w.im < PI,
            DomainSpec::PuncturedDisk => w != cpoint(0.0, 0.0) && w.norm() < 1.0,
        }
    }

    /// Euclidean distance from `w` to the complement; `+inf` on the plane.
    pub fn boundary_distance(&self, w: CPoint) -> Result<f64> {
        if !self.contains(w) {
            return Err(Error::OutsideDomain(w));
        }
        Ok(self.boundary_distance_unchecked(w))
    }

    pub(crate) fn boundary_distance_unchecked(&self, w: CPoint) -> f64 {
        match *self {
            DomainSpec::WholePlane => f64::INFINITY,
            DomainSpec::PlaneMinusPoint { b } => (w - b).norm(),
            DomainSpec::Disk { center, radius } => radius - (w - center).norm(),
            DomainSpec::HalfPlane => w.re,
            DomainSpec::Strip => w.im.min(PI - w.im),
            DomainSpec::PuncturedDisk => {
                let m = w.norm();
                m.min(1.0 - m)
            }
        }
    }

    pub fn classify(&self) -> DomainClass {
        let (is_proper, is_hyperbolic, is_simply_connected) = match self {
            DomainSpec::WholePlane => (false, false, true),
            DomainSpec::PlaneMinusPoint { .. } => (true, false, false),
            DomainSpec::Disk { .. } | DomainSpec::HalfPlane | DomainSpec::Strip => (true, true, true),
            DomainSpec::PuncturedDisk => (true, true, false),
        };
        DomainClass { is_proper, is_hyperbolic, is_simply_connected }
    }

    /// Smallest simply connected domain containing `self`.
    pub fn simply_connected_hull(&self) -> DomainSpec {
        match *self {
            DomainSpec::PuncturedDisk => DomainSpec::unit_disk(),
            DomainSpec::PlaneMinusPoint { .. } => DomainSpec::WholePlane,
            other => other,
        }
    }

    pub fn is_quasi_bounded(&self) -> bool {
        self.simply_connected_hull() != DomainSpec::WholePlane
    }

    /// Catalog-decidable inclusion `self ⊂ outer`.
    pub fn is_subdomain_of(&self, outer: &DomainSpec) -> bool {
        use DomainSpec::*;
        if self == outer {
            return true;
        }
        let origin = cpoint(0.0, 0.0);
        match (*self, *outer) {
            (_, WholePlane) => true,
            (WholePlane, _) => false,
            (PlaneMinusPoint { b }, PlaneMinusPoint { b: b2 }) => b == b2,
            (PlaneMinusPoint { .. }, _) => false,
            (Disk { center, radius }, Disk { center: c2, radius: r2 }) => (center - c2).norm() + radius <= r2,
            (Disk { center, radius }, HalfPlane) => center.re - radius >= 0.0,
            (Disk { center, radius }, Strip) => center.im - radius >= 0.0 && center.im + radius <= PI,
            (Disk { center, radius }, PuncturedDisk) => {
                center.norm() >= radius && center.norm() + radius <= 1.0
            }
            (Disk { center, radius }, PlaneMinusPoint { b }) => (b - center).norm() >= radius,
            (PuncturedDisk, Disk { center, radius }) => center.norm() + 1.0 <= radius,
            (PuncturedDisk, PlaneMinusPoint { b }) => b == origin || b.norm() >= 1.0,
            (PuncturedDisk, _) => false,
            (HalfPlane, PlaneMinusPoint { b }) => b.re <= 0.0,
            (Strip, PlaneMinusPoint { b }) => b.im <= 0.0 || b.im >= PI,
            (HalfPlane, _) | (Strip, _) => false,
        }
    }

    /// Bounding box `(re_min, re_max, im_min, im_max)` of the domain.
    pub(crate) fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            DomainSpec::Disk { center, radius } => {
                (center.re - radius, center.re + radius, center.im - radius, center.im + radius)
            }
            DomainSpec::PuncturedDisk => (-1.0, 1.0, -1.0, 1.0),
            DomainSpec::HalfPlane => (0.0, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY),
            DomainSpec::Strip => (f64::NEG_INFINITY, f64::INFINITY, 0.0, PI),
            DomainSpec::WholePlane | DomainSpec::PlaneMinusPoint { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
            }
        }
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let nums = parse_floats(s, what)?;
    match nums.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Parse(format!("{what}: expected two numbers in {s:?}"))),
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("{what}: bad number {t:?}")))
        })
        .collect()
}

/// Parses a point written as `re,im`.
pub fn parse_point(s: &str) -> Result<CPoint> {
    let (re, im) = parse_pair(s, "point")?;
    Ok(cpoint(re, im))
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, args) {
            ("plane", None) => Ok(DomainSpec::WholePlane),
            ("cstar", None) => Ok(DomainSpec::cstar()),
            ("halfplane", None) => Ok(DomainSpec::HalfPlane),
            ("strip", None) => Ok(DomainSpec::Strip),
            ("punctured-disk", None) => Ok(DomainSpec::PuncturedDisk),
            ("plane-minus", Some(a)) => {
                let (bx, by) = parse_pair(a, "plane-minus")?;
                Ok(DomainSpec::PlaneMinusPoint { b: cpoint(bx, by) })
            }
            ("disk", Some(a)) => match parse_floats(a, "disk")?.as_slice() {
                [cx, cy, r] => DomainSpec::disk(*cx, *cy, *r),
                _ => Err(Error::Parse(format!("disk: expected cx,cy,r in {a:?}"))),
            },
            _ => Err(Error::Parse(format!("unknown domain {s:?}"))),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::WholePlane => write!(f, "plane"),
            DomainSpec::PlaneMinusPoint { b } if *b == cpoint(0.0, 0.0) => write!(f, "cstar"),
            DomainSpec::PlaneMinusPoint { b } => write!(f, "plane-minus:{},{}", b.re, b.im),
            DomainSpec::Disk { center, radius } => write!(f, "disk:{},{},{}", center.re, center.im, radius),
            DomainSpec::HalfPlane => write!(f, "halfplane"),
            DomainSpec::Strip => write!(f, "strip"),
            DomainSpec::PuncturedDisk => write!(f, "punctured-disk"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<DomainSpec> {
        vec![
            DomainSpec::WholePlane,
            DomainSpec::cstar(),
            DomainSpec::PlaneMinusPoint { b: cpoint(1.0, 0.0) },
            DomainSpec::unit_disk(),
            DomainSpec::disk(0.5, -1.0, 2.0).unwrap(),
            DomainSpec::HalfPlane,
            DomainSpec::Strip,
            DomainSpec::PuncturedDisk,
        ]
    }

    #[test]
    fn membership() {
        assert!(!DomainSpec::PuncturedDisk.contains(cpoint(0.0, 0.0)));
        assert!(DomainSpec::unit_disk().contains(cpoint(0.999, 0.0)));
        assert!(!DomainSpec::PlaneMinusPoint { b: cpoint(1.0, 0.0) }.contains(cpoint(1.0, 0.0)));
        assert!(!DomainSpec::Strip.contains(cpoint(0.0, PI)));
        assert!(!DomainSpec::HalfPlane.contains(cpoint(0.0, 2.0)));
    }

    #[test]
    fn boundary_distances() {
        assert_eq!(DomainSpec::unit_disk().boundary_distance(cpoint(0.25, 0.0)).unwrap(), 0.75);
        assert_eq!(DomainSpec::PuncturedDisk.boundary_distance(cpoint(0.25, 0.0)).unwrap(), 0.25);
        assert_eq!(DomainSpec::cstar().boundary_distance(cpoint(3.0, 0.0)).unwrap(), 3.0);
        assert_eq!(DomainSpec::WholePlane.boundary_distance(cpoint(3.0, 0.0)).unwrap(), f64::INFINITY);
        assert_eq!(
            DomainSpec::unit_disk().boundary_distance(cpoint(2.0, 0.0)),
            Err(Error::OutsideDomain(cpoint(2.0, 0.0)))
        );
    }

    #[test]
    fn classification() {
        let c = DomainSpec::WholePlane.classify();
        assert_eq!((c.is_proper, c.is_hyperbolic, c.is_simply_connected), (false, false, true));
        let c = DomainSpec::cstar().classify();
        assert_eq!((c.is_proper, c.is_hyperbolic, c.is_simply_connected), (true, false, false));
        let c = DomainSpec::PuncturedDisk.classify();
        assert_eq!((c.is_proper, c.is_hyperbolic, c.is_simply_connected), (true, true, false));
        for d in all_kinds() {
            let c = d.classify();
            assert!(!c.is_hyperbolic || c.is_proper);
        }
    }

    #[test]
    fn hulls_and_quasi_boundedness() {
        assert_eq!(DomainSpec::PuncturedDisk.simply_connected_hull(), DomainSpec::unit_disk());
        assert_eq!(DomainSpec::unit_disk().simply_connected_hull(), DomainSpec::unit_disk());
        assert_eq!(
            DomainSpec::PlaneMinusPoint { b: cpoint(1.0, 0.0) }.simply_connected_hull(),
            DomainSpec::WholePlane
        );
        assert!(DomainSpec::PuncturedDisk.is_quasi_bounded());
        assert!(!DomainSpec::cstar().is_quasi_bounded());
        assert!(DomainSpec::Strip.is_quasi_bounded());
        for d in all_kinds() {
            assert!(d.simply_connected_hull().classify().is_simply_connected);
            assert!(d.is_subdomain_of(&d.simply_connected_hull()));
        }
    }

    #[test]
    fn nesting() {
        let half = DomainSpec::disk(0.0, 0.0, 0.5).unwrap();
        assert!(half.is_subdomain_of(&DomainSpec::unit_disk()));
        assert!(DomainSpec::PuncturedDisk.is_subdomain_of(&DomainSpec::unit_disk()));
        assert!(DomainSpec::PuncturedDisk.is_subdomain_of(&DomainSpec::cstar()));
        assert!(!DomainSpec::unit_disk().is_subdomain_of(&DomainSpec::PuncturedDisk));
        assert!(!DomainSpec::unit_disk().is_subdomain_of(&half));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for d in all_kinds() {
            let back: DomainSpec = d.to_string().parse().unwrap();
            assert_eq!(back, d);
        }
        assert_eq!("cstar".parse::<DomainSpec>().unwrap(), DomainSpec::cstar());
        assert!("disk:0,0,-1".parse::<DomainSpec>().is_err());
        assert!("annulus".parse::<DomainSpec>().is_err());
        assert_eq!(parse_point("0.5,-2").unwrap(), cpoint(0.5, -2.0));
        assert!(parse_point("0.5").is_err());
    }
}
