//! Polyline shortening: vertices slide along their normals (in chart
//! coordinates) by damped Newton steps on the discrete length.

use super::chart::Chart;
use crate::geometry::{simpson_segment, CPoint, Density};

const SEGMENT_PANELS: usize = 4;
const MAX_NEWTON_STEPS: usize = 40;
const FD_RELATIVE_STEP: f64 = 1e-4;
const SMOOTHING_PASSES: usize = 4;

pub(crate) struct Shortener<'a, D: Density + ?Sized> {
    chart: Chart,
    rho: &'a D,
}

impl<'a, D: Density + ?Sized> Shortener<'a, D> {
    pub fn new(chart: Chart, rho: &'a D) -> Self {
        Self { chart, rho }
    }

    fn segment(&self, a: CPoint, b: CPoint) -> f64 {
        let (wa, wb) = (self.chart.plane_of(a), self.chart.plane_of(b));
        if wa == wb {
            return 0.0;
        }
        simpson_segment(self.rho, wa, wb, SEGMENT_PANELS)
    }

    fn energy(&self, v: &[CPoint]) -> f64 {
        if !v[1..v.len() - 1].iter().all(|&z| self.chart.contains(z)) {
            return f64::INFINITY;
        }
        v.windows(2).map(|p| self.segment(p[0], p[1])).sum()
    }

    /// Point at fraction `t` of the plane chord from `a` to `b`.
    fn chord_point(&self, a: CPoint, b: CPoint, t: f64) -> CPoint {
        let (wa, wb) = (self.chart.plane_of(a), self.chart.plane_of(b));
        self.chart.lift(wa + (wb - wa) * t, a.im)
    }

    /// `m` segments of (approximately) equal density-weighted length along
    /// the chords of `v`.
    pub fn equidistribute(&self, v: &[CPoint], m: usize) -> Vec<CPoint> {
        let lengths: Vec<f64> = v.windows(2).map(|p| self.segment(p[0], p[1])).collect();
        let total: f64 = lengths.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return v.to_vec();
        }
        let mut out = Vec::with_capacity(m + 1);
        out.push(v[0]);
        let mut seg = 0;
        let mut before = 0.0;
        for j in 1..m {
            let goal = total * j as f64 / m as f64;
            while seg + 1 < lengths.len() && before + lengths[seg] < goal {
                before += lengths[seg];
                seg += 1;
            }
            let t = if lengths[seg] > 0.0 { ((goal - before) / lengths[seg]).clamp(0.0, 1.0) } else { 0.0 };
            let z = self.chord_point(v[seg], v[seg + 1], t);
            if z != *out.last().unwrap() {
                out.push(z);
            }
        }
        if *out.last().unwrap() != v[v.len() - 1] {
            out.push(v[v.len() - 1]);
        }
        out
    }

    /// Splits every segment at the density-weighted midpoint of its chord.
    ///
    /// The plane polyline is unchanged, so its length is too.
    pub fn bisect(&self, v: &[CPoint]) -> Vec<CPoint> {
        let mut out = Vec::with_capacity(2 * v.len() - 1);
        for p in v.windows(2) {
            out.push(p[0]);
            let ra = self.rho.density(self.chart.plane_of(p[0]));
            let rb = self.rho.density(self.chart.plane_of(p[1]));
            // half the mass under the linear interpolant of the density
            let t = if ra.is_finite() && rb.is_finite() && ra + rb > 0.0 {
                let c = 0.25 * (ra + rb);
                2.0 * c / (ra + (0.5 * (ra * ra + rb * rb)).sqrt())
            } else {
                0.5
            };
            out.push(self.chord_point(p[0], p[1], t));
        }
        out.push(v[v.len() - 1]);
        out
    }

    /// A few Laplacian passes to take the staircase out of a graph path.
    pub fn smooth(&self, v: &mut [CPoint]) {
        let e0 = self.energy(v);
        let original = v.to_vec();
        for _ in 0..SMOOTHING_PASSES {
            let prev = v.to_vec();
            for i in 1..v.len() - 1 {
                let z = 0.5 * prev[i] + 0.25 * (prev[i - 1] + prev[i + 1]);
                if self.chart.contains(z) {
                    v[i] = z;
                }
            }
        }
        if !(self.energy(v) <= e0) {
            v.copy_from_slice(&original);
        }
    }

    /// Damped Newton iteration on the normal offsets of the interior
    /// vertices. Returns the final discrete length.
    pub fn newton(&self, v: &mut Vec<CPoint>) -> f64 {
        let m = v.len() - 1;
        let mut e = self.energy(v);
        if m < 2 || !e.is_finite() {
            return e;
        }
        let n = m - 1;
        for _ in 0..MAX_NEWTON_STEPS {
            let normals: Vec<CPoint> = (1..m)
                .map(|i| {
                    let t = v[i + 1] - v[i - 1];
                    CPoint::i() * t / t.norm()
                })
                .collect();
            let steps: Vec<f64> = (1..m)
                .map(|i| FD_RELATIVE_STEP * (v[i] - v[i - 1]).norm().min((v[i + 1] - v[i]).norm()))
                .collect();
            let mut grad = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut off = vec![0.0; n.saturating_sub(1)];
            let mut frozen = vec![false; n];

            for s in 0..m {
                // unknown indices of the segment's ends, if interior
                let ia = if s >= 1 { Some(s - 1) } else { None };
                let ib = if s + 1 < m { Some(s) } else { None };
                let da = ia.map_or(0.0, |k| steps[k]);
                let db = ib.map_or(0.0, |k| steps[k]);
                let na = ia.map_or(CPoint::new(0.0, 0.0), |k| normals[k]);
                let nb = ib.map_or(CPoint::new(0.0, 0.0), |k| normals[k]);
                let f = |p: f64, q: f64| self.segment(v[s] + na * (p * da), v[s + 1] + nb * (q * db));
                let f00 = f(0.0, 0.0);
                if let Some(k) = ia {
                    let (fp, fm) = (f(1.0, 0.0), f(-1.0, 0.0));
                    let g = (fp - fm) / (2.0 * da);
                    let h = (fp - 2.0 * f00 + fm) / (da * da);
                    if g.is_finite() && h.is_finite() {
                        grad[k] += g;
                        diag[k] += h;
                    } else {
                        frozen[k] = true;
                    }
                }
                if let Some(k) = ib {
                    let (fp, fm) = (f(0.0, 1.0), f(0.0, -1.0));
                    let g = (fp - fm) / (2.0 * db);
                    let h = (fp - 2.0 * f00 + fm) / (db * db);
                    if g.is_finite() && h.is_finite() {
                        grad[k] += g;
                        diag[k] += h;
                    } else {
                        frozen[k] = true;
                    }
                }
                if let (Some(ka), Some(_)) = (ia, ib) {
                    let x = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * da * db);
                    if x.is_finite() {
                        off[ka] = x;
                    } else {
                        frozen[ka] = true;
                        frozen[ka + 1] = true;
                    }
                }
            }
            for k in 0..n {
                if frozen[k] {
                    grad[k] = 0.0;
                    diag[k] = 1.0;
                    if k > 0 {
                        off[k - 1] = 0.0;
                    }
                    if k + 1 < n {
                        off[k] = 0.0;
                    }
                }
            }
            let scale = diag.iter().map(|d| d.abs()).sum::<f64>() / n as f64;
            if !(scale > 0.0) {
                break;
            }

            let mut accepted = None;
            for mu in [0.0, 1e-4, 1e-2, 1.0, 1e2] {
                let shifted: Vec<f64> = diag.iter().map(|d| d + mu * scale).collect();
                let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
                let Some(delta) = solve_tridiagonal(&shifted, &off, &rhs) else { continue };
                // cap each move at the local segment length
                let mut alpha: f64 = 1.0;
                for k in 0..n {
                    let room = (v[k + 1] - v[k]).norm().min((v[k + 2] - v[k + 1]).norm());
                    if delta[k].abs() > room {
                        alpha = alpha.min(room / delta[k].abs());
                    }
                }
                for _ in 0..8 {
                    let mut cand = v.clone();
                    for k in 0..n {
                        cand[k + 1] += normals[k] * (alpha * delta[k]);
                    }
                    let ec = self.energy(&cand);
                    if ec < e {
                        accepted = Some((cand, ec));
                        break;
                    }
                    alpha *= 0.5;
                }
                if accepted.is_some() {
                    break;
                }
            }
            match accepted {
                Some((cand, ec)) => {
                    let gain = e - ec;
                    *v = cand;
                    e = ec;
                    if gain <= 1e-14 * e {
                        break;
                    }
                }
                None => break,
            }
        }
        e
    }
}

/// Solves a symmetric tridiagonal system by the Thomas algorithm; `None`
/// unless every pivot is positive.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if !(pivot > 0.0) {
        return None;
    }
    c[0] = if n > 1 { off[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if !(pivot > 0.0) {
            return None;
        }
        c[i] = if i + 1 < n { off[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{DensityField, FieldKind};
    use crate::domain::DomainSpec;
    use crate::geometry::cpoint;

    #[test]
    fn thomas_matches_dense_solution() {
        let x = solve_tridiagonal(&[4.0, 4.0, 4.0], &[1.0, 1.0], &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(solve_tridiagonal(&[-1.0, 2.0], &[0.0], &[1.0, 1.0]).is_none());
    }

    #[test]
    fn bisect_preserves_plane_polyline() {
        let d = DomainSpec::unit_disk();
        let rho = DensityField::new(d, FieldKind::Hyperbolic).unwrap();
        let s = Shortener::new(Chart::for_domain(&d), &rho);
        let v = vec![cpoint(0.0, 0.0), cpoint(0.5, 0.0)];
        let b = s.bisect(&v);
        assert_eq!(b.len(), 3);
        assert!(b[1].im == 0.0 && b[1].re > 0.25 && b[1].re < 0.5);
    }

    #[test]
    fn newton_straightens_a_bent_disk_path() {
        let d = DomainSpec::unit_disk();
        let rho = DensityField::new(d, FieldKind::Hyperbolic).unwrap();
        let s = Shortener::new(Chart::for_domain(&d), &rho);
        let mut v: Vec<CPoint> = (0..=16)
            .map(|k| {
                let t = k as f64 / 16.0;
                cpoint(-0.5 + t, 0.3 * (std::f64::consts::PI * t).sin())
            })
            .collect();
        let e = s.newton(&mut v);
        // the geodesic is the diameter; length 2 ln 3
        assert!((e - 2.0 * 3f64.ln()).abs() < 1e-3, "{e}");
        assert!(v.iter().all(|z| z.im.abs() < 1e-3));
    }
}
