//! Complex scalars, normalized disk automorphisms, and polylines measured
//! against a conformal density.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the Euclidean plane, identified with a complex number.
pub type CPoint = Complex64;

/// Relative tolerance at which adaptive segment quadrature stops refining.
pub const QUADRATURE_RTOL: f64 = 1e-10;

const MIN_SIMPSON_PANELS: usize = 8;
const MAX_SIMPSON_PANELS: usize = 1 << 20;

pub fn cpoint(re: f64, im: f64) -> CPoint {
    CPoint::new(re, im)
}

pub fn check_finite(z: CPoint) -> Result<CPoint> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(z))
    }
}

/// `1 - |z|^2`, factored so that it keeps its relative accuracy as `|z| -> 1`.
pub fn one_minus_abs_sq(z: CPoint) -> f64 {
    let m = z.norm();
    (1.0 - m) * (1.0 + m)
}

/// A conformal density: a nonnegative weight per unit Euclidean length.
///
/// Evaluators return `f64::INFINITY` at points where the density is not
/// defined (outside the domain, or too close to its boundary).
pub trait Density: Sync {
    fn density(&self, w: CPoint) -> f64;
}

impl<F> Density for F
where
    F: Fn(CPoint) -> f64 + Sync,
{
    fn density(&self, w: CPoint) -> f64 {
        self(w)
    }
}

/// The disk automorphism `z -> (z - s) / (1 - conj(s) z)`.
///
/// It sends `s` to the origin with positive derivative there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    s: CPoint,
}

impl MobiusMap {
    pub fn new(s: CPoint) -> Result<Self> {
        check_finite(s)?;
        if s.norm() >= 1.0 {
            return Err(Error::OutsideUnitDisk(s));
        }
        Ok(Self { s })
    }

    pub fn identity() -> Self {
        Self { s: CPoint::new(0.0, 0.0) }
    }

    pub fn center(&self) -> CPoint {
        self.s
    }

    fn check_arg(z: CPoint) -> Result<()> {
        check_finite(z)?;
        if z.norm() >= 1.0 {
            return Err(Error::OutsideUnitDisk(z));
        }
        Ok(())
    }

    pub fn eval(&self, z: CPoint) -> Result<CPoint> {
        Self::check_arg(z)?;
        Ok((z - self.s) / (1.0 - self.s.conj() * z))
    }

    pub fn derivative(&self, z: CPoint) -> Result<CPoint> {
        Self::check_arg(z)?;
        if z == self.s {
            return Ok(CPoint::new(1.0 / one_minus_abs_sq(self.s), 0.0));
        }
        let den = 1.0 - self.s.conj() * z;
        Ok(CPoint::new(one_minus_abs_sq(self.s), 0.0) / (den * den))
    }

    /// The inverse map `z -> (z + s) / (1 + conj(s) z)`.
    pub fn inverse_eval(&self, z: CPoint) -> Result<CPoint> {
        Self::check_arg(z)?;
        Ok((z + self.s) / (1.0 + self.s.conj() * z))
    }

    pub fn inverse_derivative(&self, z: CPoint) -> Result<CPoint> {
        Self::check_arg(z)?;
        let den = 1.0 + self.s.conj() * z;
        Ok(CPoint::new(one_minus_abs_sq(self.s), 0.0) / (den * den))
    }
}

/// An ordered list of at least two vertices, consecutive vertices distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<CPoint>,
}

impl Polyline {
    pub fn new(vertices: Vec<CPoint>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegeneratePolyline);
        }
        for v in &vertices {
            check_finite(*v)?;
        }
        if vertices.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::DegeneratePolyline);
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[CPoint] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = (CPoint, CPoint)> + '_ {
        self.vertices.windows(2).map(|p| (p[0], p[1]))
    }

    pub fn euclidean_length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices }
    }

    /// Joins `other` onto the end of `self`; the shared vertex is kept once.
    pub fn concat(&self, other: &Polyline) -> Result<Self> {
        let last = *self.vertices.last().unwrap();
        if other.vertices[0] != last {
            return Err(Error::InvalidArgument(
                "concatenated polylines must share an endpoint".into(),
            ));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        Polyline::new(vertices)
    }
}

/// Composite Simpson rule with `panels` (even, >= 2) subintervals for the
/// density-weighted length of the straight segment `a -> b`.
pub fn simpson_segment<D: Density + ?Sized>(rho: &D, a: CPoint, b: CPoint, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let d = b - a;
    let step = 1.0 / n as f64;
    let mut acc = rho.density(a) + rho.density(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * rho.density(a + d * (i as f64 * step));
    }
    acc * step / 3.0 * d.norm()
}

/// Density-weighted length of the segment `a -> b`, refining the composite
/// Simpson rule by doubling until successive estimates agree to
/// [`QUADRATURE_RTOL`].
pub fn segment_length<D: Density + ?Sized>(rho: &D, a: CPoint, b: CPoint) -> Result<f64> {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let eval = |t: f64| -> Result<f64> {
        let w = a + d * t;
        let v = rho.density(w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InfiniteDensity(w))
        }
    };
    // trapezoid sums on a dyadic mesh; Simpson is their Richardson extrapolant
    let ends = eval(0.0)? + eval(1.0)?;
    let mut interior = 0.0;
    let mut n = 1usize;
    let mut trap_prev = 0.5 * ends;
    let mut simpson_prev = f64::NAN;
    loop {
        let h = 1.0 / (2 * n) as f64;
        let mut fresh = 0.0;
        for i in 0..n {
            fresh += eval((2 * i + 1) as f64 * h)?;
        }
        interior += fresh;
        n *= 2;
        let trap = (0.5 * ends + interior) / n as f64;
        let simpson = (4.0 * trap - trap_prev) / 3.0;
        if n >= MIN_SIMPSON_PANELS
            && ((simpson - simpson_prev).abs() <= QUADRATURE_RTOL * simpson.abs()
                || n >= MAX_SIMPSON_PANELS)
        {
            return Ok(simpson * len);
        }
        trap_prev = trap;
        simpson_prev = simpson;
    }
}

/// Density-weighted length of a polyline: the sum of its segment lengths.
pub fn polyline_length_under_density<D: Density + ?Sized>(path: &Polyline, rho: &D) -> Result<f64> {
    path.segments().map(|(a, b)| segment_length(rho, a, b)).sum()
}
