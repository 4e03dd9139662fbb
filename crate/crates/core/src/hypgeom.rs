//! Hyperbolic geometry of the Poincaré disk.
//!
//! Distances use the convention `sh(rho/2) = |x - y| / sqrt((1-|x|^2)(1-|y|^2))`,
//! so that `rho(0, r) = 2 arth r`. Geodesics are diameters or circular arcs
//! orthogonal to the unit circle.

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Normalized cross product below which two points are treated as collinear
/// with the origin.
pub const COLLINEAR_TOL: f64 = 1e-14;

/// Number of boundary samples used by the starlikeness check.
pub const STARLIKE_SAMPLES: usize = 720;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm_sqr() < 1.0) {
            return Err(Error::Domain(format!("point {z} is not inside the unit disk")));
        }
        Ok(Self(z))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn z(&self) -> Complex64 {
        self.0
    }

    /// `1 - |z|^2`, evaluated without cancellation near the unit circle.
    #[inline]
    fn conformal_weight(&self) -> f64 {
        let n = self.0.norm();
        (1.0 - n) * (1.0 + n)
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::from_re_im(v[0], v[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

/// Hyperbolic distance between two points of the disk.
pub fn hyp_dist(x: DiskPoint, y: DiskPoint) -> f64 {
    let s = (x.z() - y.z()).norm() / (x.conformal_weight() * y.conformal_weight()).sqrt();
    2.0 * s.asinh()
}

/// The disk automorphism `T_a(z) = (z - a) / (1 - conj(a) z)`.
pub fn mobius(a: DiskPoint, z: DiskPoint) -> DiskPoint {
    DiskPoint(mobius_raw(a.z(), z.z()))
}

#[inline]
pub(crate) fn mobius_raw(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// A closed hyperbolic disk `B_rho(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypDisk {
    pub center: DiskPoint,
    pub radius: f64,
}

impl HypDisk {
    pub fn new(center: DiskPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("hyperbolic radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    /// Euclidean center and radius of the same disk.
    pub fn to_euclid(&self) -> (Complex64, f64) {
        hyp_disk_to_euclid(self)
    }
}

/// Euclidean image of a hyperbolic disk.
pub fn hyp_disk_to_euclid(d: &HypDisk) -> (Complex64, f64) {
    let x = d.center.z();
    let t = (0.5 * d.radius).tanh();
    let x2 = x.norm_sqr();
    let den = 1.0 - x2 * t * t;
    let center = x * ((1.0 - t) * (1.0 + t) / den);
    let radius = d.center.conformal_weight() * t / den;
    (center, radius)
}

/// Hyperbolic center and radius of a Euclidean disk `B(center, radius)`
/// contained in the unit disk.
pub fn euclid_disk_to_hyp(center: Complex64, radius: f64) -> Result<HypDisk> {
    let c = center.norm();
    if !(radius > 0.0 && c + radius < 1.0) {
        return Err(Error::Geometry(format!(
            "Euclidean disk ({center}, {radius}) is not compactly inside the unit disk"
        )));
    }
    let dir = if c > 0.0 { center / c } else { Complex64::new(1.0, 0.0) };
    // The disk meets its diameter ray at c - radius and c + radius; the
    // hyperbolic center is their hyperbolic midpoint.
    let (near, far) = ((c - radius).atanh(), (c + radius).atanh());
    let mid = (0.5 * (near + far)).tanh();
    HypDisk::new(DiskPoint::new(dir * mid)?, far - near)
}

pub fn hyp_disk_area(radius: f64) -> f64 {
    4.0 * PI * (0.5 * radius).sinh().powi(2)
}

pub fn hyp_disk_perimeter(radius: f64) -> f64 {
    TAU * radius.sinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArcKind {
    /// Arc of the circle `|z - center| = radius`, orthogonal to the unit
    /// circle. `sweep` is the signed angle swept from `start` to `end` as
    /// seen from `center`.
    Circular { center: Complex64, radius: f64, sweep: f64 },
    /// Diameter piece through (or pointing at) the origin.
    Segment,
}

/// One side of a hyperbolic polygon, traversed from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicArc {
    pub start: DiskPoint,
    pub end: DiskPoint,
    pub kind: ArcKind,
}

/// The geodesic arc joining `z1` to `z2`.
pub fn geodesic_arc(z1: DiskPoint, z2: DiskPoint) -> Result<GeodesicArc> {
    let (a, b) = (z1.z(), z2.z());
    if a == b {
        return Err(Error::DegenerateArc);
    }
    let (na, nb) = (a.norm(), b.norm());
    let cross = a.re * b.im - a.im * b.re;
    if na == 0.0 || nb == 0.0 || cross.abs() < COLLINEAR_TOL * na * nb {
        return Ok(GeodesicArc { start: z1, end: z2, kind: ArcKind::Segment });
    }
    // 2 Re(conj(z) c) = |z|^2 + 1 at both endpoints.
    let (ra, rb) = (0.5 * (na * na + 1.0), 0.5 * (nb * nb + 1.0));
    let cx = (ra * b.im - rb * a.im) / cross;
    let cy = (rb * a.re - ra * b.re) / cross;
    let center = Complex64::new(cx, cy);
    let from = a - center;
    let radius = from.norm();
    let w = (b - a) / from;
    let sweep = w.im.atan2(1.0 + w.re);
    Ok(GeodesicArc { start: z1, end: z2, kind: ArcKind::Circular { center, radius, sweep } })
}

impl GeodesicArc {
    /// Point at parameter `t` in `[0, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        let a = self.start.z();
        match self.kind {
            ArcKind::Segment => a + (self.end.z() - a) * t,
            ArcKind::Circular { center, sweep, .. } => {
                if t == 1.0 {
                    return self.end.z();
                }
                let phi = t * sweep;
                // e^{i phi} - 1 = 2i sin(phi/2) e^{i phi/2}
                let step = Complex64::new(0.0, 2.0 * (0.5 * phi).sin()) * Complex64::from_polar(1.0, 0.5 * phi);
                a + (a - center) * step
            }
        }
    }

    /// Derivative of [`Self::point`] with respect to `t`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        let a = self.start.z();
        match self.kind {
            ArcKind::Segment => self.end.z() - a,
            ArcKind::Circular { center, sweep, .. } => {
                (a - center) * Complex64::new(0.0, sweep) * Complex64::from_polar(1.0, t * sweep)
            }
        }
    }

    /// Parameter value of the hyperbolic midpoint is not 1/2 in general; this
    /// is the point splitting the arc into two pieces of equal hyperbolic length.
    pub fn hyperbolic_midpoint(&self) -> Complex64 {
        let total = hyp_dist(self.start, self.end);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let p = DiskPoint(self.point(mid));
            if hyp_dist(self.start, p) < 0.5 * total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.point(0.5 * (lo + hi))
    }

    pub fn hyp_length(&self) -> f64 {
        hyp_dist(self.start, self.end)
    }

    /// Euclidean distance from `q` to the arc.
    pub fn distance(&self, q: Complex64) -> f64 {
        let (a, b) = (self.start.z(), self.end.z());
        let ends = (q - a).norm().min((q - b).norm());
        match self.kind {
            ArcKind::Segment => {
                let d = b - a;
                let t = ((q - a) * d.conj()).re / d.norm_sqr();
                if (0.0..=1.0).contains(&t) {
                    (q - a - d * t).norm()
                } else {
                    ends
                }
            }
            ArcKind::Circular { center, radius, sweep } => {
                let rel = q - center;
                if rel.norm() == 0.0 {
                    return radius;
                }
                let phi = (rel / (a - center)).arg();
                let inside = if sweep >= 0.0 { (0.0..=sweep).contains(&phi) } else { (sweep..=0.0).contains(&phi) };
                if inside {
                    (rel.norm() - radius).abs()
                } else {
                    ends
                }
            }
        }
    }

    /// Euclidean length of the arc.
    pub fn euclid_length(&self) -> f64 {
        match self.kind {
            ArcKind::Segment => (self.end.z() - self.start.z()).norm(),
            ArcKind::Circular { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Residual of the geometric invariant: orthogonality to the unit circle
    /// for circular arcs, collinearity with the origin for segments.
    pub fn invariant_residual(&self) -> f64 {
        let (a, b) = (self.start.z(), self.end.z());
        match self.kind {
            ArcKind::Segment => {
                let (na, nb) = (a.norm(), b.norm());
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    (a.re * b.im - a.im * b.re).abs() / (na * nb)
                }
            }
            ArcKind::Circular { center, .. } => [a, b]
                .iter()
                .map(|z| (2.0 * (z.conj() * center).re - z.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// A closed hyperbolic polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypPolygon {
    vertices: Vec<DiskPoint>,
    sides: Vec<GeodesicArc>,
    /// Whether every ray from the origin meets the boundary exactly once.
    starlike_checked: bool,
}

impl HypPolygon {
    /// Builds the polygon, reversing clockwise input so the stored vertex
    /// order is counterclockwise. The first vertex is kept in place.
    pub fn new(vertices: Vec<DiskPoint>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::Geometry(format!("a polygon needs at least 3 vertices, got {m}")));
        }
        let mut vertices = vertices;
        let mut sides = build_sides(&vertices)?;
        if signed_area(&sides) < 0.0 {
            vertices[1..].reverse();
            sides = build_sides(&vertices)?;
        }
        let starlike_checked = is_starlike(&sides);
        Ok(Self { vertices, sides, starlike_checked })
    }

    /// Like [`HypPolygon::new`], but rejects polygons that are not starlike
    /// with respect to the origin.
    pub fn new_starlike(vertices: Vec<DiskPoint>) -> Result<Self> {
        let p = Self::new(vertices)?;
        if !p.starlike_checked {
            return Err(Error::Geometry("polygon is not starlike with respect to 0".into()));
        }
        Ok(p)
    }

    pub fn from_complex(points: &[Complex64]) -> Result<Self> {
        Self::new(points.iter().map(|&z| DiskPoint::new(z)).collect::<Result<_>>()?)
    }

    pub fn vertices(&self) -> &[DiskPoint] {
        &self.vertices
    }

    pub fn sides(&self) -> &[GeodesicArc] {
        &self.sides
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_starlike(&self) -> bool {
        self.starlike_checked
    }

    /// Image of the polygon under `T_a`.
    pub fn mobius(&self, a: DiskPoint) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&v| mobius(a, v)).collect())
    }

    /// Interior angle at each vertex, from the tangent directions of the
    /// adjacent arcs.
    pub fn tangent_angles(&self) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|k| {
                let t_in = self.sides[(k + m - 1) % m].derivative(1.0);
                let t_out = self.sides[k].derivative(0.0);
                PI - (t_out / t_in).arg()
            })
            .collect()
    }

    /// Unit vector at each vertex pointing into the polygon along the
    /// bisector of the interior angle.
    pub fn inward_bisectors(&self) -> Vec<Complex64> {
        let m = self.len();
        let angles = self.tangent_angles();
        (0..m)
            .map(|k| {
                let t_out = self.sides[k].derivative(0.0);
                t_out / t_out.norm() * Complex64::from_polar(1.0, 0.5 * angles[k])
            })
            .collect()
    }

    /// Winding-number containment test against a dense boundary polyline.
    pub fn contains(&self, z: Complex64) -> bool {
        let pts = self.boundary_samples(64);
        let n = pts.len();
        let mut winding = 0.0;
        for i in 0..n {
            let a = pts[i] - z;
            let b = pts[(i + 1) % n] - z;
            winding += (b / a).arg();
        }
        winding.abs() > PI
    }

    /// `per_side` points on each side (excluding each side's end vertex).
    /// Euclidean distance from `q` to the boundary.
    pub fn boundary_distance(&self, q: Complex64) -> f64 {
        self.sides.iter().map(|s| s.distance(q)).fold(f64::INFINITY, f64::min)
    }

    pub fn boundary_samples(&self, per_side: usize) -> Vec<Complex64> {
        self.sides
            .iter()
            .flat_map(|s| (0..per_side).map(move |i| s.point(i as f64 / per_side as f64)))
            .collect()
    }
}

fn build_sides(vertices: &[DiskPoint]) -> Result<Vec<GeodesicArc>> {
    let m = vertices.len();
    (0..m)
        .map(|k| {
            geodesic_arc(vertices[k], vertices[(k + 1) % m]).map_err(|_| {
                Error::Geometry(format!("consecutive vertices {k} and {} coincide", (k + 1) % m))
            })
        })
        .collect()
}

fn signed_area(sides: &[GeodesicArc]) -> f64 {
    let pts: Vec<Complex64> = sides.iter().flat_map(|s| (0..16).map(move |i| s.point(i as f64 / 16.0))).collect();
    let n = pts.len();
    0.5 * (0..n).map(|i| (pts[i].conj() * pts[(i + 1) % n]).im).sum::<f64>()
}

/// Starlike with respect to 0: the argument increases strictly along the
/// counterclockwise boundary and winds exactly once.
fn is_starlike(sides: &[GeodesicArc]) -> bool {
    let per_side = STARLIKE_SAMPLES.div_ceil(sides.len()).max(8);
    let pts: Vec<Complex64> = sides
        .iter()
        .flat_map(|s| (0..per_side).map(move |i| s.point(i as f64 / per_side as f64)))
        .collect();
    if pts.iter().any(|p| p.norm() == 0.0) {
        return false;
    }
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        let step = (pts[(i + 1) % n] / pts[i]).arg();
        if !(step > 0.0) {
            return false;
        }
        total += step;
    }
    (total - TAU).abs() < 1e-9
}

/// Side lengths, angles, area and perimeter of a hyperbolic triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleMeasures {
    /// Side lengths opposite the first, second and third vertex.
    pub sides: [f64; 3],
    /// Interior angles at the three vertices.
    pub angles: [f64; 3],
    pub area: f64,
    pub perimeter: f64,
}

/// Measures of the triangle with vertices `p`, from the side lengths.
pub fn triangle_measures(p: [DiskPoint; 3]) -> Result<TriangleMeasures> {
    let sides = [hyp_dist(p[1], p[2]), hyp_dist(p[2], p[0]), hyp_dist(p[0], p[1])];
    if sides.contains(&0.0) {
        return Err(Error::Geometry("triangle has coincident vertices".into()));
    }
    let s = 0.5 * (sides[0] + sides[1] + sides[2]);
    let mut angles = [0.0; 3];
    for i in 0..3 {
        let (b, c) = (sides[(i + 1) % 3], sides[(i + 2) % 3]);
        // Half-angle form of the hyperbolic law of cosines
        // cos A = (ch b ch c - ch a) / (sh b sh c).
        let q = ((s - b).max(0.0).sinh() * (s - c).max(0.0).sinh() / (b.sinh() * c.sinh())).sqrt();
        angles[i] = 2.0 * q.min(1.0).asin();
    }
    let area = PI - angles.iter().sum::<f64>();
    if !(area > 0.0) {
        return Err(Error::Geometry("triangle is degenerate".into()));
    }
    Ok(TriangleMeasures { sides, angles, area, perimeter: sides.iter().sum() })
}

pub fn polygon_perimeter(p: &HypPolygon) -> f64 {
    let v = p.vertices();
    let m = v.len();
    (0..m).map(|k| hyp_dist(v[k], v[(k + 1) % m])).sum()
}

/// Area, perimeter and interior angles of a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonMeasures {
    pub area: f64,
    pub perimeter: f64,
    pub angles: Vec<f64>,
}

/// Measures of a polygon through the fan of triangles `{0, v_k, v_k+1}`.
///
/// Triangles are measured directly and need not contain the origin; every
/// other polygon must be starlike with respect to 0.
pub fn polygon_measures(p: &HypPolygon) -> Result<PolygonMeasures> {
    let v = p.vertices();
    let m = v.len();
    if m == 3 {
        let t = triangle_measures([v[0], v[1], v[2]])?;
        return Ok(PolygonMeasures { area: t.area, perimeter: t.perimeter, angles: t.angles.to_vec() });
    }
    if v.iter().any(|q| q.z().norm() == 0.0) {
        return Err(Error::Geometry("a vertex at the origin degenerates the fan".into()));
    }
    if !p.is_starlike() {
        return Err(Error::Geometry("polygon is not starlike with respect to 0".into()));
    }
    let o = DiskPoint::origin();
    let mut angles = vec![0.0; m];
    let mut area = 0.0;
    for k in 0..m {
        let next = (k + 1) % m;
        let t = triangle_measures([o, v[k], v[next]])?;
        angles[k] += t.angles[1];
        angles[next] += t.angles[2];
        area += t.area;
    }
    Ok(PolygonMeasures { area, perimeter: polygon_perimeter(p), angles })
}

/// Radius `r` of the equilateral triangle `r, r e^{2 pi i/3}, r e^{4 pi i/3}`
/// whose three interior angles equal `omega`.
pub fn equilateral_triangle_radius(omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega < FRAC_PI_3) {
        return domain(format!("equilateral angle must lie in (0, pi/3), got {omega}"));
    }
    // r^2 = (2 - cos w - sqrt3 sin w) / (2 cos w - 1), rewritten with
    // half-angle identities so that both endpoints are well conditioned.
    let r2 = (0.5 * (FRAC_PI_3 - omega)).sin() / (0.5 * (FRAC_PI_3 + omega)).sin();
    Ok(r2.sqrt())
}

/// Vertices `r exp(2 pi i k / m)`, `k = 0..m-1`.
pub fn regular_polygon(m: usize, r: f64) -> Result<HypPolygon> {
    if m < 3 {
        return domain(format!("regular polygon needs m >= 3, got {m}"));
    }
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("regular polygon radius must lie in (0, 1), got {r}"));
    }
    let vertices = (0..m)
        .map(|k| DiskPoint::new(Complex64::from_polar(r, TAU * k as f64 / m as f64)))
        .collect::<Result<_>>()?;
    HypPolygon::new(vertices)
}

/// Radius of the regular `m`-gon with hyperbolic perimeter `perimeter`.
pub fn regular_radius_from_perimeter(m: usize, perimeter: f64) -> Result<f64> {
    if m < 3 || !(perimeter > 0.0) {
        return domain(format!("need m >= 3 and L > 0, got ({m}, {perimeter})"));
    }
    let s = (PI / m as f64).sin();
    let h = (perimeter / (2.0 * m as f64)).sinh();
    // (-s + sqrt(s^2 + h^2)) / h without cancellation
    Ok(h / (s + s.hypot(h)))
}

/// Radius of the regular `m`-gon with hyperbolic area `area`, by bisection.
pub fn regular_radius_from_area(m: usize, area: f64) -> Result<f64> {
    if m < 3 {
        return domain(format!("regular polygon needs m >= 3, got {m}"));
    }
    let max_area = (m as f64 - 2.0) * PI;
    if !(area > 0.0 && area < max_area) {
        return domain(format!("area must lie in (0, {max_area}), got {area}"));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let a = polygon_measures(&regular_polygon(m, mid)?)?.area;
        if a < area {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_dist(p(0.0, 0.0), p(0.0, 0.0)), 0.0);
        assert!((hyp_dist(p(0.0, 0.0), p(0.5, 0.0)) - 3f64.ln()).abs() < 1e-14);
        let s: f64 = 0.4;
        let h = s.powf(1.5);
        let rho = hyp_dist(p(-h, 0.0), p(h, 0.0));
        assert!(((0.5 * rho).tanh() - 2.0 * h / (s.powi(3) + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn points_outside_are_rejected() {
        assert!(DiskPoint::from_re_im(1.0, 0.0).is_err());
        assert!(DiskPoint::from_re_im(0.8, 0.8).is_err());
        assert!(serde_json::from_str::<DiskPoint>("[0.9, 0.9]").is_err());
    }

    #[test]
    fn mobius_basics() {
        let a = p(0.3, -0.2);
        assert!(mobius(a, a).z().norm() < 1e-16);
        let z = p(-0.5, 0.1);
        assert_eq!(mobius(DiskPoint::origin(), z), z);
    }

    #[test]
    fn centred_disk_is_euclidean_disk() {
        let d = HypDisk::new(DiskPoint::origin(), 1.3).unwrap();
        let (c, r) = d.to_euclid();
        assert_eq!(c, Complex64::new(0.0, 0.0));
        assert!((r - 0.65f64.tanh()).abs() < 1e-15);
        let tiny = HypDisk::new(DiskPoint::origin(), 1e-9).unwrap().to_euclid();
        assert!(tiny.1 < 1e-9);
    }

    #[test]
    fn off_centre_disk_boundary_is_at_radius() {
        let d = HypDisk::new(p(0.5, 0.0), 1.0).unwrap();
        let (c, r) = d.to_euclid();
        for k in 0..64 {
            let z = c + Complex64::from_polar(r, TAU * k as f64 / 64.0);
            assert!((hyp_dist(d.center, DiskPoint::new(z).unwrap()) - 1.0).abs() < 1e-12);
        }
        let back = euclid_disk_to_hyp(c, r).unwrap();
        assert!((back.center.z() - d.center.z()).norm() < 1e-14);
        assert!((back.radius - 1.0).abs() < 1e-13);
    }

    #[test]
    fn arc_classification() {
        let seg = geodesic_arc(p(0.3, 0.0), p(-0.6, 0.0)).unwrap();
        assert_eq!(seg.kind, ArcKind::Segment);
        let s = 0.6;
        let arc = geodesic_arc(p(s, 0.0), DiskPoint::new(Complex64::from_polar(s, TAU / 3.0)).unwrap()).unwrap();
        assert!(matches!(arc.kind, ArcKind::Circular { .. }));
        assert!(arc.invariant_residual() < 1e-12);
        assert_eq!(geodesic_arc(p(0.1, 0.1), p(0.1, 0.1)), Err(Error::DegenerateArc));
    }

    #[test]
    fn arc_endpoints_and_geodesic_additivity() {
        let (a, b) = (p(0.6, 0.0), p(0.1, -0.8));
        let arc = geodesic_arc(a, b).unwrap();
        assert!((arc.point(0.0) - a.z()).norm() < 1e-15);
        assert!((arc.point(1.0) - b.z()).norm() < 1e-15);
        assert!((arc.point(1.0 - 1e-12) - b.z()).norm() < 1e-10);
        let w = DiskPoint::new(arc.point(0.37)).unwrap();
        assert!((hyp_dist(a, w) + hyp_dist(w, b) - hyp_dist(a, b)).abs() < 1e-10);
        let mid = DiskPoint::new(arc.hyperbolic_midpoint()).unwrap();
        assert!((hyp_dist(a, mid) - hyp_dist(mid, b)).abs() < 1e-10);
    }

    #[test]
    fn perimeter_of_regular_polygons() {
        for &(m, r) in &[(3usize, 0.5), (4, 0.6), (7, 0.9)] {
            let poly = regular_polygon(m, r).unwrap();
            let closed = 2.0 * m as f64 * (2.0 * r * (PI / m as f64).sin() / (1.0 - r * r)).asinh();
            assert!((polygon_perimeter(&poly) - closed).abs() < 1e-12);
        }
        let s: f64 = 0.5;
        let u = polygon_perimeter(&regular_polygon(3, s).unwrap());
        let rhs = 3f64.sqrt() * s / (s.powi(4) + s * s + 1.0).sqrt();
        assert!(((u / 6.0).tanh() - rhs).abs() < 1e-14);
        assert!(polygon_perimeter(&regular_polygon(5, 1e-9).unwrap()) < 1e-7);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let poly = HypPolygon::from_complex(&[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.2, -0.5),
            Complex64::new(-0.3, -0.5),
        ])
        .unwrap();
        assert_eq!(poly.vertices()[0], p(0.6, 0.0));
        assert_eq!(poly.vertices()[1], p(-0.3, -0.5));
        assert!(poly.tangent_angles().iter().all(|&a| a > 0.0 && a < PI));
    }

    #[test]
    fn equilateral_triangle_measures() {
        let t = regular_polygon(3, 0.5).unwrap();
        let meas = polygon_measures(&t).unwrap();
        let w = meas.angles[0];
        assert!(meas.angles.iter().all(|a| (a - w).abs() < 1e-13));
        assert!((meas.area - (PI - 3.0 * w)).abs() < 1e-13);
        let (u, v) = (meas.perimeter, meas.area);
        assert!((2.0 * (u / 6.0).cosh() * ((PI - v) / 6.0).sin() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fan_and_tangent_angles_agree() {
        let poly = HypPolygon::from_complex(&[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.1, -0.8),
            Complex64::new(-0.5, -0.5),
            Complex64::new(-0.5, 0.6),
            Complex64::new(0.5, 0.5),
        ])
        .unwrap();
        let fan = polygon_measures(&poly).unwrap();
        for (a, b) in fan.angles.iter().zip(poly.tangent_angles()) {
            assert!((a - b).abs() < 1e-10);
        }
        let defect = 3.0 * PI - fan.angles.iter().sum::<f64>();
        assert!((fan.area - defect).abs() < 1e-10);
    }

    #[test]
    fn triangle_not_containing_origin() {
        let poly = HypPolygon::from_complex(&[
            Complex64::new(0.0, -0.1),
            Complex64::new(0.7, -0.5),
            Complex64::new(-0.7, -0.5),
        ])
        .unwrap();
        assert!(!poly.is_starlike());
        assert!(!poly.contains(Complex64::new(0.0, 0.0)));
        let meas = polygon_measures(&poly).unwrap();
        for (a, b) in meas.angles.iter().zip(poly.tangent_angles()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn non_starlike_polygon_measures_fail() {
        let poly = HypPolygon::from_complex(&[
            Complex64::new(0.1, -0.1),
            Complex64::new(0.8, -0.1),
            Complex64::new(0.8, 0.1),
            Complex64::new(0.1, 0.1),
        ])
        .unwrap();
        assert!(matches!(polygon_measures(&poly), Err(Error::Geometry(_))));
        assert!(HypPolygon::new_starlike(poly.vertices().to_vec()).is_err());
    }

    #[test]
    fn equilateral_radius_closed_form() {
        // Oracle: bisection on r against the measured angle.
        let target = FRAC_PI_4;
        let (mut lo, mut hi) = (1e-6, 1.0 - 1e-9);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let w = polygon_measures(&regular_polygon(3, mid).unwrap()).unwrap().angles[0];
            // angles shrink as r grows
            if w > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = equilateral_triangle_radius(target).unwrap();
        assert!((r - 0.5 * (lo + hi)).abs() < 1e-10);
        let printed = ((2.0 - target.cos() - 3f64.sqrt() * target.sin()) / (2.0 * target.cos() - 1.0)).sqrt();
        assert!((r - printed).abs() < 1e-14);
        assert!(equilateral_triangle_radius(FRAC_PI_3 - 1e-9).unwrap() < 1e-3);
        assert!(equilateral_triangle_radius(1e-9).unwrap() > 0.999);
        assert!(equilateral_triangle_radius(FRAC_PI_3).is_err());
        assert!(equilateral_triangle_radius(0.0).is_err());
    }

    #[test]
    fn regular_polygon_shapes() {
        let tri = regular_polygon(3, 0.3).unwrap();
        let a = polygon_measures(&tri).unwrap().angles;
        assert!((a[0] - a[1]).abs() < 1e-13 && (a[1] - a[2]).abs() < 1e-13);
        assert!(regular_polygon(12, 0.9).unwrap().is_starlike());
        assert!(regular_polygon(2, 0.5).is_err());
    }

    #[test]
    fn radius_from_perimeter_roundtrip() {
        let r = regular_radius_from_perimeter(5, 10.0).unwrap();
        assert!((polygon_perimeter(&regular_polygon(5, r).unwrap()) - 10.0).abs() < 1e-12);
        assert!(regular_radius_from_perimeter(4, 1e-12).unwrap() < 1e-12);
        let s = 0.5;
        let l = 3.0 * hyp_dist(p(s, 0.0), DiskPoint::new(Complex64::from_polar(s, TAU / 3.0)).unwrap());
        assert!((regular_radius_from_perimeter(3, l).unwrap() - s).abs() < 1e-14);
    }

    #[test]
    fn radius_from_area() {
        let w = FRAC_PI_4;
        let r = regular_radius_from_area(3, PI - 3.0 * w).unwrap();
        assert!((r - equilateral_triangle_radius(w).unwrap()).abs() < 1e-10);
        let r7 = regular_radius_from_area(7, 3.0).unwrap();
        let poly = regular_polygon(7, r7).unwrap();
        assert!(poly.is_starlike());
        assert!((polygon_measures(&poly).unwrap().area - 3.0).abs() < 1e-10);
        assert!(regular_radius_from_area(3, 1e-8).unwrap() < 1e-3);
        assert!(regular_radius_from_area(3, PI).is_err());
    }

    #[test]
    fn disk_area_and_perimeter() {
        let l = 1e-4;
        assert!((hyp_disk_area(l) / (l * l) - PI).abs() < 1e-6);
        assert!((hyp_disk_perimeter(l) / l - TAU).abs() < 1e-6);
        let c = 2.7;
        assert!((hyp_disk_area(2.0 * (c / (4.0 * PI)).sqrt().asinh()) - c).abs() < 1e-13);
        assert!((hyp_disk_perimeter((c / TAU).asinh()) - c).abs() < 1e-13);
    }
}
