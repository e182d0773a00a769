//! Coordinates in which the solver lays out its grid and moves vertices.
//!
//! Punctured domains use log-polar coordinates `w = c + exp(x + i y)`: the
//! chart is the universal cover of the punctured neighbourhood, the
//! puncture sits at `x = -inf` and a radial Hurwitz density becomes a
//! function of `x` alone.

use serde::Serialize;

use crate::domain::DomainSpec;
use crate::geometry::{cpoint, CPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoordinateSystem {
    Cartesian,
    LogPolar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Chart {
    Cartesian(DomainSpec),
    /// Center and, for the punctured disk, the outer radius.
    LogPolar { center: CPoint, outer_radius: Option<f64> },
}

impl Chart {
    pub fn for_domain(d: &DomainSpec) -> Chart {
        match *d {
            DomainSpec::PlaneMinusPoint { b } => Chart::LogPolar { center: b, outer_radius: None },
            DomainSpec::PuncturedDisk => Chart::LogPolar { center: cpoint(0.0, 0.0), outer_radius: Some(1.0) },
            other => Chart::Cartesian(other),
        }
    }

    pub fn system(&self) -> CoordinateSystem {
        match self {
            Chart::Cartesian(_) => CoordinateSystem::Cartesian,
            Chart::LogPolar { .. } => CoordinateSystem::LogPolar,
        }
    }

    pub fn plane_of(&self, z: CPoint) -> CPoint {
        match *self {
            Chart::Cartesian(_) => z,
            Chart::LogPolar { center, .. } => center + z.exp(),
        }
    }

    /// Chart coordinates of `w`, choosing the lift whose angle is within
    /// `pi` of `reference_angle`.
    pub fn lift(&self, w: CPoint, reference_angle: f64) -> CPoint {
        match *self {
            Chart::Cartesian(_) => w,
            Chart::LogPolar { center, .. } => {
                let v = w - center;
                let mut theta = v.arg();
                let two_pi = 2.0 * std::f64::consts::PI;
                while theta - reference_angle > std::f64::consts::PI {
                    theta -= two_pi;
                }
                while reference_angle - theta > std::f64::consts::PI {
                    theta += two_pi;
                }
                cpoint(v.norm().ln(), theta)
            }
        }
    }

    /// Chart-space distance to the edge of the chart domain.
    pub fn boundary_distance(&self, z: CPoint) -> f64 {
        match *self {
            Chart::Cartesian(d) => {
                if d.contains(z) {
                    d.boundary_distance_unchecked(z)
                } else {
                    -1.0
                }
            }
            Chart::LogPolar { outer_radius, .. } => match outer_radius {
                Some(r) => r.ln() - z.re,
                None => f64::INFINITY,
            },
        }
    }

    pub fn contains(&self, z: CPoint) -> bool {
        z.re.is_finite() && z.im.is_finite() && self.boundary_distance(z) > 0.0
    }

    /// Chart-space box `(x_min, x_max, y_min, y_max)` outside of which there
    /// is no chart domain.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Chart::Cartesian(d) => d.bounding_box(),
            Chart::LogPolar { outer_radius, .. } => (
                f64::NEG_INFINITY,
                outer_radius.map_or(f64::INFINITY, f64::ln),
                f64::NEG_INFINITY,
                f64::INFINITY,
            ),
        }
    }

    /// Width of the narrowest part of the chart domain, used to cap the grid
    /// spacing.
    pub fn scale(&self) -> f64 {
        match *self {
            Chart::Cartesian(DomainSpec::Disk { radius, .. }) => radius,
            Chart::Cartesian(DomainSpec::Strip) => std::f64::consts::PI,
            Chart::Cartesian(DomainSpec::PuncturedDisk) => 1.0,
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn log_polar_round_trip_and_lift() {
        let chart = Chart::for_domain(&DomainSpec::cstar());
        let w = cpoint(-1.0, 1e-300);
        let z = chart.lift(w, 0.0);
        assert!((z.im - PI).abs() < 1e-12);
        let z2 = chart.lift(cpoint(-1.0, -1e-3), 0.0);
        assert!(z2.im < 0.0);
        let z3 = chart.lift(cpoint(-1.0, -1e-3), PI);
        assert!(z3.im > PI);
        assert!((chart.plane_of(z3) - cpoint(-1.0, -1e-3)).norm() < 1e-14);
    }

    #[test]
    fn punctured_disk_chart_is_left_half_plane() {
        let chart = Chart::for_domain(&DomainSpec::PuncturedDisk);
        assert!(chart.contains(cpoint(-0.1, 7.0)));
        assert!(!chart.contains(cpoint(0.0, 0.0)));
        assert_eq!(chart.system(), CoordinateSystem::LogPolar);
    }
}
