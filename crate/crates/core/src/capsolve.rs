//! Numerical capacity of the doubly connected domain `D \ E` by charge
//! simulation.
//!
//! The plate is first moved by a disk automorphism so that the origin lies
//! deep inside it. The potential is then represented as
//!
//! ```text
//! u(z) = b log|z| + Laurent pairs + corner expansions + sum c_j G(z, q_j)
//! ```
//!
//! where every basis function is harmonic in `D \ E` and vanishes identically
//! on the unit circle. `G(z, q) = log|(z - q) / (1 - conj(q) z)|` is the
//! Green's function of the disk, the Laurent terms pair `z^-k` with its
//! reflection in the circle, and the corner expansions carry the exact
//! singular exponents `k pi / (2 pi - angle)` at each vertex. The
//! coefficients are fitted to `u = 1` on graded collocation nodes by
//! column-scaled Householder least squares, and the capacity is the flux of
//! `u` through the unit circle.
//!
//! Because `u` vanishes on the circle and `|u - 1| <= eps` on `E`, the maximum
//! principle gives `(1 - eps) U <= u <= (1 + eps) U` for the exact potential
//! `U`, hence `|cap - cap_exact| <= eps * cap_exact`. The reported
//! `boundary_residual` is a relative error bound on the capacity, up to the
//! density of the check grid.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeom::{euclid_disk_to_hyp, mobius_raw, DiskPoint, HypDisk, HypPolygon};

/// Inner boundary components must stay this far from the unit circle.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

/// Minimum node and charge count.
pub const MIN_COUNT: usize = 8;

/// Diagonal entries of the triangular factor below this fraction of the
/// largest mark the scaled system as rank deficient.
pub const RANK_TOL: f64 = 1e-15;

/// Largest growth of a corner function over the inner boundary.
pub const GROWTH_LIMIT: f64 = 1e6;

/// The inner plate `E` of the condenser `(D, E)`; the outer boundary is the
/// unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundarySet {
    Polygon(HypPolygon),
    /// Euclidean disk `|z - center| <= radius`.
    Disk { center: Complex64, radius: f64 },
}

impl BoundarySet {
    pub fn polygon(p: HypPolygon) -> Result<Self> {
        let max = p.boundary_samples(64).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::Geometry(format!("polygon boundary reaches |z| = {max}")));
        }
        Ok(Self::Polygon(p))
    }

    pub fn euclid_disk(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || center.norm() + radius >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::Geometry(format!("disk ({center}, {radius}) is not inside the unit disk")));
        }
        Ok(Self::Disk { center, radius })
    }

    pub fn hyp_disk(d: &HypDisk) -> Result<Self> {
        let (c, r) = d.to_euclid();
        Self::euclid_disk(c, r)
    }

    /// Number of corners of the inner boundary.
    pub fn corner_count(&self) -> usize {
        match self {
            Self::Polygon(p) => p.len(),
            Self::Disk { .. } => 0,
        }
    }

    /// Möbius image `T_a(E)`.
    fn mobius(&self, a: Complex64) -> Result<Self> {
        match self {
            Self::Polygon(p) => Ok(Self::Polygon(p.mobius(DiskPoint::new(a)?)?)),
            Self::Disk { center, radius } => {
                let h = euclid_disk_to_hyp(*center, *radius)?;
                let moved = HypDisk::new(DiskPoint::new(mobius_raw(a, h.center.z()))?, h.radius)?;
                let (c, r) = moved.to_euclid();
                Ok(Self::Disk { center: c, radius: r })
            }
        }
    }
}

/// Discretization and basis sizes for one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Graded collocation nodes per polygon side (or on the whole circle for
    /// a disk plate).
    pub nodes_per_side: usize,
    /// Number of compositions of the grading map `w(t) = t - sin(2 pi t)/(2 pi)`.
    pub corner_grading_strength: u32,
    /// Singular corner functions per corner (each contributes a sine and a
    /// cosine column).
    pub corner_terms: usize,
    /// Degree of the Laurent part about the normalized center.
    pub laurent_degree: usize,
    /// Green's function charges inside the plate, per side.
    pub charges_per_side: usize,
    /// Inward offset of the charges in units of the local charge spacing.
    pub charge_offset: f64,
    /// Check-grid refinement relative to the collocation grid.
    pub check_grid_factor: usize,
    /// Number of times the counts are doubled when the residual misses the
    /// tolerance.
    pub max_refine: u32,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            nodes_per_side: 256,
            corner_grading_strength: 1,
            corner_terms: 12,
            laurent_degree: 4,
            charges_per_side: 64,
            charge_offset: 2.0,
            check_grid_factor: 4,
            max_refine: 3,
        }
    }
}

impl SolverParams {
    /// Defaults for smooth plates (no corners).
    pub fn smooth() -> Self {
        Self { nodes_per_side: 128, laurent_degree: 16, ..Self::default() }
    }

    pub fn validate(&self, corners: usize) -> Result<()> {
        if self.nodes_per_side < MIN_COUNT {
            return Err(Error::Config(format!("nodes per side must be at least {MIN_COUNT}")));
        }
        if corners > 0 && self.corner_terms < 1 {
            return Err(Error::Config("at least one corner term is needed".into()));
        }
        if self.laurent_degree < 1 {
            return Err(Error::Config("Laurent degree must be positive".into()));
        }
        if !(self.charge_offset > 0.0) {
            return Err(Error::Config("charge offset must be positive".into()));
        }
        if self.check_grid_factor < 2 {
            return Err(Error::Config("check grid factor must be at least 2".into()));
        }
        let rows = self.nodes_per_side * corners.max(1);
        let cols = self.unknowns(corners);
        if rows < 2 * cols {
            return Err(Error::Config(format!(
                "{rows} collocation nodes cannot overdetermine {cols} unknowns by a factor 2"
            )));
        }
        Ok(())
    }

    /// Number of basis functions for a plate with `corners` corners.
    pub fn unknowns(&self, corners: usize) -> usize {
        1 + 2 * self.laurent_degree + 2 * corners * self.corner_terms + corners * self.charges_per_side
    }

    fn doubled(&self) -> Self {
        Self {
            nodes_per_side: 2 * self.nodes_per_side,
            corner_terms: self.corner_terms + self.corner_terms / 2,
            laurent_degree: self.laurent_degree + self.laurent_degree / 2,
            charges_per_side: 2 * self.charges_per_side,
            ..*self
        }
    }
}

/// Endpoint-clustering parameter map, `w(t) = t - sin(2 pi t) / (2 pi)`
/// composed `strength` times.
pub fn grading(t: f64, strength: u32) -> f64 {
    (0..strength).fold(t, |t, _| t - (TAU * t).sin() / TAU)
}

/// Collocation nodes of a boundary set.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    /// Nodes on the inner boundary, side by side.
    pub inner: Vec<Complex64>,
    /// Graded parameter of each inner node within its side (or angle / 2 pi
    /// for a disk plate).
    pub params: Vec<f64>,
}

/// Graded nodes on each side, or uniform nodes around a disk plate.
pub fn discretize(b: &BoundarySet, p: &SolverParams) -> Result<NodeSet> {
    p.validate(b.corner_count())?;
    Ok(nodes(b, p.nodes_per_side, p.corner_grading_strength))
}

fn nodes(b: &BoundarySet, per_side: usize, strength: u32) -> NodeSet {
    let mut inner = Vec::new();
    let mut params = Vec::new();
    match b {
        BoundarySet::Polygon(poly) => {
            for side in poly.sides() {
                for i in 0..per_side {
                    let t = grading(i as f64 / per_side as f64, strength);
                    inner.push(side.point(t));
                    params.push(t);
                }
            }
        }
        BoundarySet::Disk { center, radius } => {
            for i in 0..per_side {
                let t = i as f64 / per_side as f64;
                inner.push(center + Complex64::from_polar(*radius, TAU * t));
                params.push(t);
            }
        }
    }
    NodeSet { inner, params }
}

/// Result of one capacity solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub capacity: f64,
    /// Inner radius of the conformally equivalent annulus `q < |w| < 1`.
    pub modulus_q: f64,
    /// Maximum of `|u - 1|` over the inner check grid (`u = 0` holds exactly
    /// on the unit circle).
    pub boundary_residual: f64,
    pub n_collocation: usize,
    pub n_charges: usize,
    pub converged: bool,
    /// Number of doublings performed by the refinement ladder.
    pub refinements: u32,
}

impl SolveReport {
    fn new(capacity: f64, residual: f64, rows: usize, cols: usize, tol: f64, refinements: u32) -> Self {
        Self {
            capacity,
            modulus_q: (-TAU / capacity).exp(),
            boundary_residual: residual,
            n_collocation: rows,
            n_charges: cols,
            converged: residual < tol,
            refinements,
        }
    }
}

/// Solves for `cap(D, E)` with the refinement ladder: counts are doubled up
/// to `p.max_refine` times until the boundary residual drops below `tol`.
pub fn solve_capacity(b: &BoundarySet, p: &SolverParams, tol: f64) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    p.validate(b.corner_count())?;
    let centred = normalize(b)?;
    let mut params = *p;
    let mut best: Option<SolveReport> = None;
    for refinements in 0..=p.max_refine {
        let fit = Fit::solve(&centred, &params)?;
        let report = SolveReport::new(fit.capacity, fit.residual, fit.rows, fit.cols, tol, refinements);
        if report.converged {
            return Ok(report);
        }
        if best.is_none_or(|b| report.boundary_residual < b.boundary_residual) {
            best = Some(report);
        }
        params = params.doubled();
    }
    Ok(best.expect("at least one attempt"))
}

/// Capacity of a polygon plate with the default polygon parameters.
pub fn cap_polygon(p: &HypPolygon, tol: f64) -> Result<SolveReport> {
    solve_capacity(&BoundarySet::polygon(p.clone())?, &SolverParams::default(), tol)
}

/// Capacity of a hyperbolic disk plate, solved numerically.
pub fn cap_disk(d: &HypDisk, tol: f64) -> Result<SolveReport> {
    solve_capacity(&BoundarySet::hyp_disk(d)?, &SolverParams::smooth(), tol)
}

/// Moves the plate by a disk automorphism so that the origin sits deep
/// inside it. Capacity is invariant under the move.
fn normalize(b: &BoundarySet) -> Result<BoundarySet> {
    match b {
        BoundarySet::Disk { center, radius } => {
            let h = euclid_disk_to_hyp(*center, *radius)?;
            b.mobius(h.center.z())
        }
        BoundarySet::Polygon(poly) => {
            let moved = b.mobius(incenter(poly))?;
            if let BoundarySet::Polygon(q) = &moved {
                if q.is_starlike() {
                    return Ok(moved);
                }
            }
            if poly.is_starlike() {
                return Ok(b.clone());
            }
            Err(Error::Geometry("no Möbius normalization makes the polygon starlike about 0".into()))
        }
    }
}

/// A point of the polygon of locally maximal hyperbolic distance to its
/// boundary, by pattern search from the vertex centroid.
fn incenter(poly: &HypPolygon) -> Complex64 {
    let samples = poly.boundary_samples(64);
    let depth = |a: Complex64| {
        let w = 1.0 - a.norm_sqr();
        samples.iter().map(|&z| (z - a).norm_sqr() / ((1.0 - z.norm_sqr()) * w)).fold(f64::INFINITY, f64::min)
    };
    let verts: Vec<Complex64> = poly.vertices().iter().map(|v| v.z()).collect();
    let mut candidates = vec![verts.iter().sum::<Complex64>() / verts.len() as f64, Complex64::new(0.0, 0.0)];
    let bis = poly.inward_bisectors();
    for (k, side) in poly.sides().iter().enumerate() {
        for f in [0.05, 0.15, 0.3] {
            candidates.push(verts[k] + f * side.euclid_length() * bis[k]);
        }
    }
    let Some(mut a) = candidates
        .into_iter()
        .filter(|&c| poly.contains(c))
        .max_by(|&x, &y| depth(x).total_cmp(&depth(y)))
    else {
        return Complex64::new(0.0, 0.0);
    };
    let mut best = depth(a);
    let size = samples.iter().map(|z| (z - a).norm()).fold(f64::INFINITY, f64::min);
    let mut step = 0.25 * size;
    while step > 1e-6 * size {
        let mut moved = false;
        for k in 0..8 {
            let c = a + Complex64::from_polar(step, TAU * k as f64 / 8.0);
            if poly.contains(c) {
                let d = depth(c);
                if d > best {
                    (a, best, moved) = (c, d, true);
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    a
}

/// Singular expansion at one corner.
///
/// With `zeta = (z - v) / (z - p)`, `p` a point of the segment `[0, v]`, the
/// corner `v` goes to 0 and the segment `[p, v]`, which lies in the plate, to
/// the negative real axis. Locally the domain is
/// the wedge `lo < arg zeta < lo + angle`, and `|zeta|^b sin(b (arg zeta - lo))`
/// with `b = k pi / angle` carries the corner singularity. Subtracting the
/// reflection `z -> 1 / conj(z)` makes each term vanish on the unit circle.
#[derive(Debug, Clone, Copy)]
struct Corner {
    vertex: Complex64,
    pole: Complex64,
    lo: f64,
    angle: f64,
    terms: usize,
}

impl Corner {
    fn new(poly: &HypPolygon, k: usize, max_terms: usize) -> Self {
        let m = poly.len();
        let vertex = poly.vertices()[k].z();
        let out = poly.sides()[k].derivative(0.0);
        let back = -poly.sides()[(k + m - 1) % m].derivative(1.0);
        let (a, b) = ((out / vertex).arg(), (back / vertex).arg());
        let samples = poly.boundary_samples(64);
        let clear = |t: f64| samples.iter().map(|z| (z - t * vertex).norm()).fold(f64::INFINITY, f64::min);
        let t = (1..20).map(|i| i as f64 / 20.0).max_by(|&x, &y| clear(x).total_cmp(&clear(y))).unwrap_or(0.0);
        let mut c = Corner { vertex, pole: t * vertex, lo: a.min(b), angle: (a - b).abs(), terms: max_terms };
        // Keep |zeta|^b below GROWTH_LIMIT on the boundary.
        let reach = samples.iter().map(|&z| c.zeta(z).norm()).fold(0.0, f64::max);
        if reach > 1.0 {
            let b_max = GROWTH_LIMIT.ln() / reach.ln();
            c.terms = ((b_max / c.exponent(1)) as usize).clamp(1, max_terms);
        }
        c
    }

    fn zeta(&self, z: Complex64) -> Complex64 {
        (z - self.vertex) / (z - self.pole)
    }

    /// `zeta` at the reflected point `1 / conj(z)`.
    fn zeta_mirror(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (one - self.vertex * z.conj()) / (one - self.pole * z.conj())
    }

    /// `zeta^b` on the branch with the cut along the plate.
    fn power(&self, zeta: Complex64, b: f64) -> Complex64 {
        Complex64::from_polar(zeta.norm().powf(b), b * (zeta.arg() - self.lo))
    }

    fn exponent(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.angle
    }
}

/// The basis: `log|z|`, Laurent pairs and corner expansions, all harmonic in
/// the domain and zero on the unit circle.
struct Basis {
    laurent_degree: usize,
    laurent_scale: f64,
    corners: Vec<Corner>,
    /// Poles of Green's function charges.
    charges: Vec<Complex64>,
}

impl Basis {
    fn len(&self) -> usize {
        self.charge_start() + self.charges.len()
    }

    fn charge_start(&self) -> usize {
        1 + 2 * self.laurent_degree + 2 * self.corners.iter().map(|c| c.terms).sum::<usize>()
    }

    fn eval_row(&self, z: Complex64, row: &mut [f64]) {
        row[0] = z.norm().ln();
        let mut col = 1;
        let inv = self.laurent_scale / z;
        let fwd = self.laurent_scale * z.conj();
        let (mut pi, mut pf) = (inv, fwd);
        for _ in 0..self.laurent_degree {
            row[col] = pi.re - pf.re;
            row[col + 1] = pi.im - pf.im;
            pi *= inv;
            pf *= fwd;
            col += 2;
        }
        for c in &self.corners {
            let zeta = c.zeta(z);
            let mirror = c.zeta_mirror(z);
            for k in 1..=c.terms {
                let b = c.exponent(k);
                let d = c.power(zeta, b) - c.power(mirror, b);
                row[col] = d.im;
                row[col + 1] = d.re;
                col += 2;
            }
        }
        let one = Complex64::new(1.0, 0.0);
        for &q in &self.charges {
            row[col] = ((z - q) / (one - q.conj() * z)).norm().ln();
            col += 1;
        }
    }

    /// Outward flux of each basis function through the unit circle.
    fn fluxes(&self) -> Vec<f64> {
        let mut flux = vec![0.0; self.len()];
        flux[0] = TAU;
        for f in &mut flux[self.charge_start()..] {
            *f = TAU;
        }
        if self.corners.is_empty() {
            return flux;
        }
        // The integrands are analytic in an annulus of width about 1 - |v|.
        let reach = self.corners.iter().map(|c| c.vertex.norm()).fold(0.0, f64::max);
        let samples = ((60.0 / (1.0 - reach)) as usize).clamp(1024, 1 << 20);
        let start = 1 + 2 * self.laurent_degree;
        for j in 0..samples {
            let z = Complex64::from_polar(1.0, TAU * j as f64 / samples as f64);
            let mut col = start;
            for c in &self.corners {
                let zeta = c.zeta(z);
                // r d/dr of f(zeta(z)) is z f'(z) = b f z zeta' / zeta; the
                // reflected term contributes the same amount.
                let dz = z * (c.pole - c.vertex) / ((z - c.pole) * (z - c.pole) * zeta);
                for k in 1..=c.terms {
                    let b = c.exponent(k);
                    let d = 2.0 * b * c.power(zeta, b) * dz;
                    flux[col] += d.im;
                    flux[col + 1] += d.re;
                    col += 2;
                }
            }
        }
        for f in &mut flux[start..self.charge_start()] {
            *f *= TAU / samples as f64;
        }
        flux
    }
}

struct Fit {
    basis: Basis,
    coeffs: DVector<f64>,
    capacity: f64,
    residual: f64,
    rows: usize,
    cols: usize,
}

impl Fit {
    fn solve(b: &BoundarySet, p: &SolverParams) -> Result<Self> {
        let basis = build_basis(b, p);
        let colloc = nodes(b, p.nodes_per_side, p.corner_grading_strength).inner;
        let n = basis.len();
        let mut a = DMatrix::<f64>::zeros(colloc.len(), n);
        let mut row = vec![0.0; n];
        for (i, &z) in colloc.iter().enumerate() {
            basis.eval_row(z, &mut row);
            for (j, v) in row.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        let mut scales = vec![1.0; n];
        for (j, scale) in scales.iter_mut().enumerate() {
            let m = a.column(j).amax();
            if m > 0.0 {
                *scale = 1.0 / m;
                a.column_mut(j).scale_mut(*scale);
            }
        }
        let rhs = DVector::<f64>::from_element(colloc.len(), 1.0);
        let mut coeffs = least_squares(a, &rhs)?;
        for (c, s) in coeffs.iter_mut().zip(&scales) {
            *c *= s;
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::Solver("non-finite coefficients".into()));
        }
        let capacity = -basis.fluxes().iter().zip(coeffs.iter()).map(|(f, c)| f * c).sum::<f64>();
        let mut fit = Fit { basis, coeffs, capacity, residual: f64::INFINITY, rows: colloc.len(), cols: n };
        fit.residual = check_points(b, p).iter().map(|&z| (fit.potential(z) - 1.0).abs()).fold(0.0, f64::max);
        if !(fit.capacity > 0.0) {
            return Err(Error::Solver(format!("non-positive capacity {}", fit.capacity)));
        }
        Ok(fit)
    }

    fn potential(&self, z: Complex64) -> f64 {
        let mut row = vec![0.0; self.cols];
        self.basis.eval_row(z, &mut row);
        row.iter().zip(self.coeffs.iter()).map(|(a, c)| a * c).sum()
    }
}

/// Householder least squares on the column-scaled matrix.
fn least_squares(a: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = a.qr();
    let r = qr.r();
    let diag = r.diagonal().abs();
    if diag.min() <= RANK_TOL * diag.max() {
        return Err(Error::Solver("rank-deficient collocation matrix".into()));
    }
    let qtb = qr.q().transpose() * rhs;
    r.solve_upper_triangular(&qtb).ok_or_else(|| Error::Solver("singular triangular factor".into()))
}

fn build_basis(b: &BoundarySet, p: &SolverParams) -> Basis {
    let samples = match b {
        BoundarySet::Polygon(poly) => poly.boundary_samples(64),
        BoundarySet::Disk { center, radius } => (0..256)
            .map(|k| center + Complex64::from_polar(*radius, TAU * k as f64 / 256.0))
            .collect(),
    };
    let laurent_scale = samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let corners = match b {
        BoundarySet::Polygon(poly) => (0..poly.len()).map(|k| Corner::new(poly, k, p.corner_terms)).collect(),
        BoundarySet::Disk { .. } => Vec::new(),
    };
    let charges = match b {
        BoundarySet::Polygon(poly) => charges(poly, p),
        BoundarySet::Disk { .. } => Vec::new(),
    };
    Basis { laurent_degree: p.laurent_degree, laurent_scale, corners, charges }
}

/// Charges offset inward from graded points on each side; they inherit the
/// clustering of the grading toward the corners.
fn charges(poly: &HypPolygon, p: &SolverParams) -> Vec<Complex64> {
    let n = p.charges_per_side;
    let mut out = Vec::new();
    for side in poly.sides() {
        for j in 0..n {
            let t = grading((j as f64 + 0.5) / n as f64, p.corner_grading_strength);
            let lo = side.point(grading(j as f64 / n as f64, p.corner_grading_strength));
            let hi = side.point(grading((j + 1) as f64 / n as f64, p.corner_grading_strength));
            let z = side.point(t);
            let tangent = side.derivative(t);
            let normal = Complex64::i() * tangent / tangent.norm();
            let mut delta = p.charge_offset * (hi - lo).norm();
            for _ in 0..20 {
                let q = z + delta * normal;
                if poly.boundary_distance(q) >= 0.5 * delta && poly.contains(q) {
                    out.push(q);
                    break;
                }
                delta *= 0.5;
            }
        }
    }
    out
}

fn check_points(b: &BoundarySet, p: &SolverParams) -> Vec<Complex64> {
    let fine = p.nodes_per_side * p.check_grid_factor;
    let mut pts = nodes(b, fine, p.corner_grading_strength).inner;
    if let BoundarySet::Polygon(poly) = b {
        // Geometric ladder of points approaching each corner from both sides.
        for side in poly.sides() {
            for e in 1..=60 {
                let t = 0.7f64.powi(e);
                pts.push(side.point(t));
                pts.push(side.point(1.0 - t));
            }
        }
    }
    pts
}
