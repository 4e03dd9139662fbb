//! Closed-form capacities of hyperbolic disks and equilateral hyperbolic
//! triangles.
//!
//! Hyperbolic lengths use the curvature `-1` metric `2|dz| / (1 - |z|^2)`, so
//! the disk of hyperbolic radius `M` about 0 is `|z| < th(M/2)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hypgeom::DiskPoint;
use crate::specfun::{mu, mu_with_complement};

/// Capacity `2 pi / (-log th(M/2))` of a hyperbolic disk of radius `M`.
pub fn cap_hyp_disk(m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return domain(format!("cap_hyp_disk requires M > 0, got {m}"));
    }
    // -log th(x) = 2 arth(exp(-2x)), exact for large x
    Ok(TAU / (2.0 * (-m).exp().atanh()))
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return domain("radius list is empty");
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return domain(format!("hyperbolic radii must be positive and finite, got {r}"));
    }
    Ok(())
}

/// Radius `L` of the disk whose area equals the total area of the given
/// disks: `sh^2(L/2) = sum sh^2(L_j/2)`.
pub fn isoarea_radius(radii: &[f64]) -> Result<f64> {
    check_radii(radii)?;
    let s: f64 = radii.iter().map(|l| (0.5 * l).sinh().powi(2)).sum();
    Ok(2.0 * s.sqrt().asinh())
}

/// Radius `L^` of the disk whose perimeter equals the total perimeter:
/// `sh L^ = sum sh L_j`.
pub fn isoperim_radius(radii: &[f64]) -> Result<f64> {
    check_radii(radii)?;
    let s: f64 = radii.iter().map(|l| l.sinh()).sum();
    Ok(s.asinh())
}

/// `f(x) = 2x g(x) + g(x)^2` with `g(x) = sum (sqrt(sh^2 L_j + x^2) - x)`.
///
/// Interpolates between `f(0) = sh^2 L^` and `f(1) = sh^2 L`.
pub fn lemma_f(x: f64, radii: &[f64]) -> f64 {
    let g: f64 = radii
        .iter()
        .map(|l| {
            let s = l.sinh();
            // sqrt(s^2 + x^2) - x, rewritten to avoid cancellation
            s * s / ((s * s + x * x).sqrt() + x)
        })
        .sum();
    2.0 * x * g + g * g
}

/// `M1 = sqrt(1 + 4 pi / c)`.
///
/// A disk about 0 with Euclidean radius `1/M1` has hyperbolic area `c`.
pub fn ref_m1(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return domain(format!("ref_m1 requires c > 0, got {c}"));
    }
    Ok((1.0 + 4.0 * PI / c).sqrt())
}

/// `M2 = sqrt(1 + 4 pi^2 / c^2) + 2 pi / c`.
///
/// A disk about 0 with Euclidean radius `1/M2` has hyperbolic perimeter `c`.
pub fn ref_m2(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return domain(format!("ref_m2 requires c > 0, got {c}"));
    }
    let u = TAU / c;
    Ok((1.0 + u * u).sqrt() + u)
}

/// Capacity `2 pi / log M1` of the disk with hyperbolic area `c`.
pub fn ref_cap_m1(c: f64) -> Result<f64> {
    ref_m1(c)?;
    // log M1 = log(1 + 4 pi / c) / 2
    Ok(2.0 * TAU / (4.0 * PI / c).ln_1p())
}

/// Capacity `2 pi / log M2` of the disk with hyperbolic perimeter `c`.
pub fn ref_cap_m2(c: f64) -> Result<f64> {
    ref_m2(c)?;
    // log M2 = arsh(2 pi / c)
    Ok(TAU / (TAU / c).asinh())
}

/// A family of hyperbolic disks `B(x_j, L_j)`.
///
/// Centres are carried for reporting only. Disjointness is not checked since
/// none of the closed forms depend on the centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskFamily {
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<DiskPoint>>,
}

impl DiskFamily {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        check_radii(&radii)?;
        Ok(Self { radii, centers: None })
    }

    pub fn with_centers(radii: Vec<f64>, centers: Vec<DiskPoint>) -> Result<Self> {
        check_radii(&radii)?;
        if centers.len() != radii.len() {
            return domain(format!("{} centres for {} radii", centers.len(), radii.len()));
        }
        Ok(Self { radii, centers: Some(centers) })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Sum of the individual disk capacities.
    pub fn cap_sum(&self) -> Result<f64> {
        self.radii.iter().map(|&l| cap_hyp_disk(l)).sum()
    }

    pub fn isoarea_radius(&self) -> Result<f64> {
        isoarea_radius(&self.radii)
    }

    pub fn isoperim_radius(&self) -> Result<f64> {
        isoperim_radius(&self.radii)
    }

    pub fn total_area(&self) -> f64 {
        self.radii.iter().map(|l| 4.0 * PI * (0.5 * l).sinh().powi(2)).sum()
    }

    pub fn total_perimeter(&self) -> f64 {
        self.radii.iter().map(|l| TAU * l.sinh()).sum()
    }
}

/// Capacity bounds for the equilateral triangle with vertices
/// `s, s w, s w^2`, `w = exp(2 pi i / 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleBoundSet {
    pub s: f64,
    /// Hyperbolic perimeter `u`.
    pub perimeter: f64,
    /// Hyperbolic area `v`.
    pub area: f64,
    pub lower: f64,
    pub upper_s: f64,
    pub upper_perim: f64,
    pub upper_area: f64,
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("triangle parameter s must lie in (0, 1), got {s}"));
    }
    Ok(())
}

/// `th(u/6) = sqrt(3) s / sqrt(s^4 + s^2 + 1)` and its complement
/// `1 / ch(u/6) = (1 - s^2) / sqrt(s^4 + s^2 + 1)`.
fn half_side(s: f64) -> (f64, f64) {
    let q = (s.powi(4) + s * s + 1.0).sqrt();
    (3f64.sqrt() * s / q, (1.0 - s) * (1.0 + s) / q)
}

pub fn triangle_perimeter_from_s(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(6.0 * half_side(s).0.atanh())
}

pub fn triangle_area_from_s(s: f64) -> Result<f64> {
    check_s(s)?;
    let (_, sech) = half_side(s);
    Ok(PI - 6.0 * (0.5 * sech).asin())
}

pub fn triangle_bounds_from_s(s: f64) -> Result<TriangleBoundSet> {
    check_s(s)?;
    let (t, tc) = half_side(s);
    let u = 6.0 * t.atanh();
    let v = PI - 6.0 * (0.5 * tc).asin();
    let lower = hat_triangle_cap(s)?;
    let upper_s = 3.0 * PI / mu_with_complement(t, tc)?;
    let th = (u / 6.0).tanh();
    let upper_perim = 3.0 * PI / mu_with_complement(th, 1.0 / (u / 6.0).cosh())?;
    let upper_area = 12.0 / PI * mu(2.0 * ((PI - v) / 6.0).sin())?;
    Ok(TriangleBoundSet {
        s,
        perimeter: u,
        area: v,
        lower,
        upper_s,
        upper_perim,
        upper_area,
    })
}

/// Recovers `s^3` from the triangle perimeter `u`.
pub fn s_cubed_from_perimeter(u: f64) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return domain(format!("perimeter must be positive, got {u}"));
    }
    let x = u / 6.0;
    let sigma = 3f64.sqrt() * 1.5 / (x.sinh() * x.tanh().powi(2));
    // -sigma + sqrt(sigma^2 + 1) without cancellation
    Ok(1.0 / (sigma + (sigma * sigma + 1.0).sqrt()))
}

/// Recovers `s^3` from the triangle area `v`.
pub fn s_cubed_from_area(v: f64) -> Result<f64> {
    if !(v > 0.0 && v < PI) {
        return domain(format!("area must lie in (0, pi), got {v}"));
    }
    let tau = 3f64.sqrt() * ((PI - v) / 6.0).tan();
    Ok(((1.0 - tau) / (1.0 + tau)).powf(1.5))
}

/// Exact capacity `6 pi / mu(s^3)` of the three radial spokes `[0, s w^k]`.
pub fn hat_triangle_cap(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(6.0 * PI / mu(s.powi(3))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{hyp_disk_area, triangle_measures};
    use crate::specfun::{annulus_cap, f1};
    use crate::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SEED: u64 = 0x05ee_dca9;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn random_lists(n: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        (0..n)
            .map(|_| {
                let p = rng.random_range(2..=6);
                (0..p).map(|_| rng.random_range(0.05..4.0)).collect()
            })
            .collect()
    }

    #[test]
    fn disk_cap_examples() {
        let m = 2.0 * 0.5f64.atanh();
        assert!(rel(cap_hyp_disk(m).unwrap(), TAU / 2f64.ln()) < 1e-14);
        assert!(cap_hyp_disk(1e-12).unwrap() < 0.3);
        assert!(cap_hyp_disk(1e-300).unwrap() < 0.01);
        for m in [0.1f64, 1.0, 3.0, 10.0] {
            let a = annulus_cap((0.5 * m).tanh(), 1.0).unwrap();
            assert!(rel(cap_hyp_disk(m).unwrap(), a) < 1e-12);
        }
        assert!(cap_hyp_disk(0.0).is_err());
        assert!(cap_hyp_disk(-1.0).is_err());
        assert!(cap_hyp_disk(f64::NAN).is_err());
    }

    #[test]
    fn isoarea_examples() {
        assert!(rel(isoarea_radius(&[1.3]).unwrap(), 1.3) < 1e-14);
        let l: f64 = 0.8;
        let two = 2.0 * (2f64.sqrt() * (0.5 * l).sinh()).asinh();
        assert!(rel(isoarea_radius(&[l, l]).unwrap(), two) < 1e-14);
        // invert the summed area by bisection
        let target: f64 = [1.0, 2.0, 0.5].iter().map(|&l| hyp_disk_area(l)).sum();
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hyp_disk_area(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(rel(isoarea_radius(&[1.0, 2.0, 0.5]).unwrap(), lo) < 1e-12);
        assert!(isoarea_radius(&[]).is_err());
        assert!(isoarea_radius(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn isoperim_examples() {
        assert!(rel(isoperim_radius(&[2.1]).unwrap(), 2.1) < 1e-14);
        let l: f64 = 0.6;
        assert!(rel(isoperim_radius(&[l, l]).unwrap(), (2.0 * l.sinh()).asinh()) < 1e-14);
        assert!(isoperim_radius(&[]).is_err());
    }

    #[test]
    fn lemma_f_endpoints() {
        for radii in random_lists(50) {
            let sum: f64 = radii.iter().map(|l| l.sinh()).sum();
            assert!(rel(lemma_f(0.0, &radii), sum * sum) < 1e-13);
            let l = isoarea_radius(&radii).unwrap();
            assert!(rel(lemma_f(1.0, &radii), l.sinh().powi(2)) < 1e-12);
        }
    }

    #[test]
    fn lemma_f_decreasing_and_radii_ordered() {
        for radii in random_lists(1000) {
            let vals: Vec<f64> = (0..100).map(|k| lemma_f(k as f64 / 99.0, &radii)).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{radii:?}");
            assert!(isoperim_radius(&radii).unwrap() > isoarea_radius(&radii).unwrap());
        }
    }

    #[test]
    fn merged_disk_caps_below_sum() {
        for radii in random_lists(1000) {
            let fam = DiskFamily::new(radii.clone()).unwrap();
            let sum = fam.cap_sum().unwrap();
            assert!(cap_hyp_disk(fam.isoperim_radius().unwrap()).unwrap() <= sum, "{radii:?}");
            assert!(cap_hyp_disk(fam.isoarea_radius().unwrap()).unwrap() <= sum, "{radii:?}");
        }
    }

    #[test]
    fn perimeter_kernel_superadditive() {
        let f = |t: f64| TAU / (1.0 / t).asinh();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        for _ in 0..1000 {
            let p = rng.random_range(2..=6);
            let ts: Vec<f64> = (0..p).map(|_| rng.random_range(1e-3..30.0)).collect();
            let lhs = f(ts.iter().sum());
            let rhs: f64 = ts.iter().map(|&t| f(t)).sum();
            assert!(lhs <= rhs * (1.0 + 1e-14));
        }
    }

    #[test]
    fn family_totals_match_merged_disks() {
        let fam = DiskFamily::new(vec![0.4, 1.7, 2.2]).unwrap();
        let la = fam.isoarea_radius().unwrap();
        let lp = fam.isoperim_radius().unwrap();
        assert!(rel(hyp_disk_area(la), fam.total_area()) < 1e-13);
        assert!(rel(TAU * lp.sinh(), fam.total_perimeter()) < 1e-13);
        let c = vec![DiskPoint::origin()];
        assert!(DiskFamily::with_centers(vec![1.0, 2.0], c).is_err());
    }

    #[test]
    fn reference_radii() {
        assert!((ref_m1(4.0 * PI).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((ref_m2(TAU).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        for c in [0.01, 0.5, 3.0, 40.0] {
            assert!(rel(ref_cap_m2(c).unwrap(), f1(c).unwrap()) < 1e-14);
            let m1 = ref_m1(c).unwrap();
            assert!(rel(ref_cap_m1(c).unwrap(), TAU / m1.ln()) < 1e-12);
            // disk of Euclidean radius 1/M has the prescribed area and perimeter
            let area = hyp_disk_area(2.0 * (1.0 / m1).atanh());
            assert!(rel(area, c) < 1e-10);
            let l = 2.0 * (1.0 / ref_m2(c).unwrap()).atanh();
            assert!(rel(TAU * l.sinh(), c) < 1e-10);
        }
        assert!(ref_m1(0.0).is_err());
        assert!(ref_m2(-1.0).is_err());
    }

    #[test]
    fn triangle_bounds_at_half() {
        let b = triangle_bounds_from_s(0.5).unwrap();
        // mu(0.125) and mu(sqrt(3)/(2 sqrt(1.3125))) from the quadrature-checked mu
        let lower = 6.0 * PI / mu(0.125).unwrap();
        let upper = 3.0 * PI / mu(3f64.sqrt() / (2.0 * 1.3125f64.sqrt())).unwrap();
        assert!(rel(b.lower, lower) < 1e-14);
        assert!(rel(b.upper_s, upper) < 1e-12);
        assert!(rel(b.lower, 5.445_008_588_396_153) < 1e-10, "{}", b.lower);
        assert!(rel(b.upper_s, 6.407_042_876_659_66) < 1e-10, "{}", b.upper_s);
        assert!(b.lower <= b.upper_s);
    }

    #[test]
    fn triangle_bound_forms_agree() {
        for k in 1..200 {
            let s = k as f64 / 200.0;
            let b = triangle_bounds_from_s(s).unwrap();
            assert!(rel(b.upper_perim, b.upper_s) < 1e-12, "s = {s}");
            assert!(rel(b.upper_area, b.upper_s) < 1e-10, "s = {s}");
            assert!(b.lower <= b.upper_s);
            let s3 = s.powi(3);
            assert!((s_cubed_from_perimeter(b.perimeter).unwrap() - s3).abs() <= 1e-10 * s3.max(1e-3), "s = {s}");
            assert!((s_cubed_from_area(b.area).unwrap() - s3).abs() <= 1e-10 * s3.max(1e-3), "s = {s}");
        }
    }

    #[test]
    fn triangle_bounds_increase_in_s() {
        let grid: Vec<_> = (1..=19).map(|k| triangle_bounds_from_s(0.05 * k as f64).unwrap()).collect();
        for w in grid.windows(2) {
            assert!(w[1].lower > w[0].lower && w[1].upper_s > w[0].upper_s);
        }
        // both bounds keep shrinking with the triangle, down to the mu floor at s^3 = 1e-8
        let mut prev = grid[0];
        for s in [0.01, 0.003, 0.0022] {
            let b = triangle_bounds_from_s(s).unwrap();
            assert!(b.lower < prev.lower && b.upper_s < prev.upper_s && b.lower <= b.upper_s);
            prev = b;
        }
        assert!(prev.upper_s < 1.5);
        assert!(triangle_bounds_from_s(1e-3).is_err());
        assert!(triangle_bounds_from_s(0.0).is_err());
        assert!(triangle_bounds_from_s(1.0).is_err());
    }

    #[test]
    fn triangle_measures_match_closed_forms() {
        for s in [0.1, 0.4, 0.75, 0.95] {
            let w = Complex64::from_polar(1.0, TAU / 3.0);
            let v = [0, 1, 2].map(|k| DiskPoint::new(s * w.powu(k)).unwrap());
            let m = triangle_measures(v).unwrap();
            assert!(rel(m.perimeter, triangle_perimeter_from_s(s).unwrap()) < 1e-12);
            assert!(rel(m.area, triangle_area_from_s(s).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn hat_triangle_examples() {
        let s = 0.7;
        assert!(rel(hat_triangle_cap(s).unwrap(), 6.0 * PI / mu(0.343).unwrap()) < 1e-13);
        assert_eq!(hat_triangle_cap(s).unwrap(), triangle_bounds_from_s(s).unwrap().lower);
        // one arc of the doubled half-disk form equals a third of the total
        for s in [0.2, 0.5, 0.9] {
            let s3: f64 = s * s * s;
            let half = mu(2.0 * s.powf(1.5) / (s3 + 1.0)).unwrap();
            assert!(rel(2.0 * half, mu(s3).unwrap()) < 1e-12);
            assert!(rel(3.0 * TAU / (2.0 * half), hat_triangle_cap(s).unwrap()) < 1e-12);
        }
    }
}
