//! Deterministic sample sets and seeded random points for the catalog.

use std::f64::consts::PI;

use rand::Rng;

use crate::domain::DomainSpec;
use crate::geometry::{cpoint, CPoint};

/// Arguments per boundary level.
pub const ARGUMENTS_PER_LEVEL: usize = 16;

fn circle(theta: f64) -> CPoint {
    cpoint(theta.cos(), theta.sin())
}

fn arguments() -> impl Iterator<Item = f64> {
    (0..ARGUMENTS_PER_LEVEL).map(|j| 2.0 * PI * j as f64 / ARGUMENTS_PER_LEVEL as f64)
}

fn offsets() -> impl Iterator<Item = f64> {
    (0..ARGUMENTS_PER_LEVEL).map(|j| -4.0 + 8.0 * j as f64 / (ARGUMENTS_PER_LEVEL - 1) as f64)
}

/// Points of `d` concentrated geometrically toward its boundary.
///
/// A fixed interior core is followed by `levels` boundary layers at
/// relative distance `2^-k`, `k = 1..=levels`, with 16 points each. The set
/// for `levels` is a prefix of the set for `levels + 1`.
pub fn boundary_samples(d: &DomainSpec, levels: usize) -> Vec<CPoint> {
    let mut out = Vec::new();
    match *d {
        DomainSpec::Disk { center, radius } => {
            out.push(center);
            for f in [0.25, 0.5, 0.75] {
                out.extend(arguments().map(|t| center + radius * f * circle(t)));
            }
            for k in 1..=levels {
                let f = 1.0 - 0.5f64.powi(k as i32);
                out.extend(arguments().map(|t| center + radius * f * circle(t)));
            }
        }
        DomainSpec::PuncturedDisk => {
            for f in [0.25, 0.5, 0.75] {
                out.extend(arguments().map(|t| f * circle(t)));
            }
            for k in 1..=levels {
                let f = 1.0 - 0.5f64.powi(k as i32);
                out.extend(arguments().map(|t| f * circle(t)));
                let g = 0.5f64.powi(k as i32 + 1);
                out.extend(arguments().map(|t| g * circle(t)));
            }
        }
        DomainSpec::HalfPlane => {
            out.extend(offsets().map(|y| cpoint(1.0, y)));
            for k in 1..=levels {
                let x = 0.5f64.powi(k as i32);
                out.extend(offsets().map(|y| cpoint(x, y)));
            }
        }
        DomainSpec::Strip => {
            out.extend(offsets().map(|x| cpoint(x, 0.5 * PI)));
            for k in 1..=levels {
                let y = 0.5 * PI * 0.5f64.powi(k as i32);
                out.extend(offsets().map(|x| cpoint(x, y)));
                out.extend(offsets().map(|x| cpoint(x, PI - y)));
            }
        }
        DomainSpec::PlaneMinusPoint { b } => {
            out.extend(arguments().map(|t| b + circle(t)));
            for k in 1..=levels {
                let near = 0.5f64.powi(k as i32);
                out.extend(arguments().map(|t| b + near * circle(t)));
                out.extend(arguments().map(|t| b + circle(t) / near));
            }
        }
        DomainSpec::WholePlane => {
            for k in 0..=levels {
                let r = 2f64.powi(k as i32) - 1.0;
                out.extend(arguments().map(|t| r * circle(t)));
            }
        }
    }
    out.retain(|w| d.contains(*w));
    out
}

/// A seeded random point comfortably inside `d`.
pub fn random_point<R: Rng + ?Sized>(d: &DomainSpec, rng: &mut R) -> CPoint {
    let theta = rng.gen_range(0.0..2.0 * PI);
    match *d {
        DomainSpec::Disk { center, radius } => {
            center + radius * 0.95 * rng.gen::<f64>().sqrt() * circle(theta)
        }
        DomainSpec::PuncturedDisk => rng.gen_range(0.02..0.95) * circle(theta),
        DomainSpec::HalfPlane => cpoint(rng.gen_range(0.05f64.ln()..4f64.ln()).exp(), rng.gen_range(-3.0..3.0)),
        DomainSpec::Strip => cpoint(rng.gen_range(-3.0..3.0), rng.gen_range(0.05 * PI..0.95 * PI)),
        DomainSpec::PlaneMinusPoint { b } => b + rng.gen_range(0.01f64.ln()..100f64.ln()).exp() * circle(theta),
        DomainSpec::WholePlane => cpoint(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kinds() -> Vec<DomainSpec> {
        vec![
            DomainSpec::WholePlane,
            DomainSpec::cstar(),
            DomainSpec::unit_disk(),
            DomainSpec::disk(2.0, 1.0, 0.5).unwrap(),
            DomainSpec::HalfPlane,
            DomainSpec::Strip,
            DomainSpec::PuncturedDisk,
        ]
    }

    #[test]
    fn samples_are_nested_and_inside() {
        for d in kinds() {
            let small = boundary_samples(&d, 4);
            let big = boundary_samples(&d, 8);
            assert!(big.len() > small.len());
            assert_eq!(&big[..small.len()], &small[..]);
            assert!(big.iter().all(|w| d.contains(*w)));
        }
    }

    #[test]
    fn random_points_are_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in kinds() {
            for _ in 0..500 {
                assert!(d.contains(random_point(&d, &mut rng)));
            }
        }
    }
}
