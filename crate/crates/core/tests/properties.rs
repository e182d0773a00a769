use std::f64::consts::PI;

use hurwitzkit::bounds::generalized_hurwitz_bounds;
use hurwitzkit::contraction::density_ratio;
use hurwitzkit::density::{hurwitz_density, hyperbolic_density};
use hurwitzkit::geodesic::{distance, DistanceOptions, Metric};
use hurwitzkit::{cpoint, CPoint, DomainSpec, MobiusMap};
use proptest::prelude::*;

fn disk_point(max: f64) -> impl Strategy<Value = CPoint> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, t)| CPoint::from_polar(r, t))
}

fn domain() -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        Just(DomainSpec::WholePlane),
        Just(DomainSpec::HalfPlane),
        Just(DomainSpec::Strip),
        Just(DomainSpec::PuncturedDisk),
        (-5.0..5.0, -5.0..5.0).prop_map(|(x, y)| DomainSpec::PlaneMinusPoint { b: cpoint(x, y) }),
        (-5.0..5.0, -5.0..5.0, 0.1..4.0).prop_map(|(x, y, r)| DomainSpec::disk(x, y, r).unwrap()),
    ]
}

proptest! {
    #[test]
    fn mobius_fixes_the_disk(s in disk_point(0.99), z in disk_point(0.99)) {
        let t = MobiusMap::new(s).unwrap();
        prop_assert!(t.eval(s).unwrap().norm() < 1e-12);
        prop_assert!(t.eval(z).unwrap().norm() < 1.0);
        let back = t.inverse_eval(t.eval(z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-9);
    }

    #[test]
    fn domain_strings_round_trip(d in domain()) {
        let parsed: DomainSpec = d.to_string().parse().unwrap();
        prop_assert_eq!(parsed, d);
    }

    #[test]
    fn cstar_density_scales(w in disk_point(50.0), b in disk_point(50.0)) {
        prop_assume!(w.norm() > 1e-3 && b.norm() > 1e-3);
        let d = DomainSpec::cstar();
        let lhs = hurwitz_density(&d, b * w).unwrap().lower() * b.norm();
        let rhs = hurwitz_density(&d, w).unwrap().lower();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn punctured_disk_enclosure_is_ordered(w in disk_point(0.999)) {
        prop_assume!(w.norm() > 1e-6);
        let d = DomainSpec::PuncturedDisk;
        let v = hurwitz_density(&d, w).unwrap();
        prop_assert!(v.lower() <= v.upper());
        prop_assert_eq!(v.lower(), hyperbolic_density(&d, w).unwrap().lower());
        let r = density_ratio(&d, &DomainSpec::unit_disk(), w).unwrap();
        prop_assert!(r.lower <= r.upper && r.upper <= 1.0 + 1e-9);
    }

    #[test]
    fn certificates_are_ordered(w in disk_point(0.95), budget in 1usize..40) {
        prop_assume!(w.norm() > 1e-3);
        for y in [DomainSpec::unit_disk(), DomainSpec::PuncturedDisk, DomainSpec::Strip] {
            let c = generalized_hurwitz_bounds(&y, &DomainSpec::unit_disk(), w, 1e-6, budget).unwrap();
            prop_assert!(c.lower <= c.upper);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hurwitz_distance_is_symmetric(a in disk_point(0.9), b in disk_point(0.9)) {
        prop_assume!(a.norm() > 0.05 && b.norm() > 0.05);
        let opts = DistanceOptions::default();
        let d = DomainSpec::PuncturedDisk;
        let ab = distance(&d, Metric::Hurwitz, a, b, &opts).unwrap();
        let ba = distance(&d, Metric::Hurwitz, b, a, &opts).unwrap();
        prop_assert_eq!(ab.lower(), ba.lower());
        prop_assert_eq!(ab.upper(), ba.upper());
        prop_assert!(ab.lower() <= ab.upper());
    }
}
