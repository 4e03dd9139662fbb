//! Complete elliptic integrals, the Grötzsch ring modulus `mu` and the
//! closed-form capacities expressed through them.
//!
//! All functions are pure. The complete integral `K(r)` is evaluated with the
//! arithmetic-geometric mean, `K(r) = pi / (2 AGM(1, sqrt(1 - r^2)))`, and
//! `mu(r) = (pi/2) K(r') / K(r)` collapses to a ratio of two AGMs.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Smallest ring parameter accepted by [`mu`].
pub const MU_MIN_R: f64 = 1e-8;

const AGM_REL_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 64;

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_REL_TOL * a.max(b) {
            break;
        }
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
    }
    0.5 * (a + b)
}

/// `sqrt(1 - r^2)` without cancellation near `r = 1`.
#[inline]
pub(crate) fn complement(r: f64) -> f64 {
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// Complete elliptic integral of the first kind, `K(r)` with modulus `r`.
pub fn ellint_k(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("ellint_k requires 0 <= r < 1, got {r}"));
    }
    Ok(FRAC_PI_2 / agm(1.0, complement(r)))
}

/// The Grötzsch ring modulus `mu(r)`, a decreasing homeomorphism of `(0, 1]`
/// onto `[0, inf)`.
pub fn mu(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return domain(format!("mu requires 0 < r <= 1, got {r}"));
    }
    mu_with_complement(r, complement(r))
}

/// `mu(r)` given both `r` and its complement `rc = sqrt(1 - r^2)`.
///
/// Use this when `r` is within rounding of 1, for example `r = th(x)` with
/// large `x`, where `rc = 1 / ch(x)` is still representable.
pub fn mu_with_complement(r: f64, rc: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) || !(0.0..1.0).contains(&rc) {
        return domain(format!("mu requires 0 < r <= 1 and 0 <= r' < 1, got ({r}, {rc})"));
    }
    if rc == 0.0 {
        return Ok(0.0);
    }
    if r < MU_MIN_R {
        return domain(format!("mu: r = {r} below supported minimum {MU_MIN_R}"));
    }
    Ok(FRAC_PI_2 * agm(1.0, rc) / agm(1.0, r))
}

/// Derivative `d mu / dr = -pi^2 / (4 r r'^2 K(r)^2)`.
pub fn mu_derivative(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("mu_derivative requires 0 < r < 1, got {r}"));
    }
    let rc = complement(r);
    let k = ellint_k(r)?;
    Ok(-PI * PI / (4.0 * r * rc * rc * k * k))
}

/// Inverse of [`mu`]: the `r` in `(0, 1]` with `mu(r) = y`.
///
/// Bisection on `ln r` over `[ln 1e-8, 0]` followed by Newton polishing with
/// the analytic derivative.
pub fn mu_inverse(y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return domain(format!("mu_inverse requires y >= 0, got {y}"));
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    let y_max = mu(MU_MIN_R)?;
    if y > y_max {
        return domain(format!("mu_inverse: y = {y} exceeds mu({MU_MIN_R}) = {y_max}"));
    }
    // mu is decreasing, so a larger ln r means a smaller mu.
    let (mut lo, mut hi) = (MU_MIN_R.ln(), 0.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mu(mid.exp())? > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = (0.5 * (lo + hi)).exp();
    for _ in 0..3 {
        if r >= 1.0 {
            break;
        }
        let err = mu(r)? - y;
        if err.abs() <= 1e-15 * y.max(1.0) {
            break;
        }
        let next = r - err / mu_derivative(r)?;
        if !(next > 0.0 && next <= 1.0) {
            break;
        }
        r = next;
    }
    Ok(r)
}

/// A ring parameter together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusValue {
    pub r: f64,
    pub mu: f64,
}

impl ModulusValue {
    pub fn new(r: f64) -> Result<Self> {
        Ok(Self { r, mu: mu(r)? })
    }

    /// Checks the classical envelope `log(1/r) < mu(r) < log(4/r)`.
    pub fn within_classical_bracket(&self) -> bool {
        if self.r == 1.0 {
            return self.mu == 0.0;
        }
        (1.0 / self.r).ln() < self.mu && self.mu < (4.0 / self.r).ln()
    }
}

/// Capacity `2 pi / log(b/a)` of the annulus `a < |z| < b`.
pub fn annulus_cap(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a < b) {
        return domain(format!("annulus_cap requires 0 < a < b, got ({a}, {b})"));
    }
    Ok(2.0 * PI / (b / a).ln())
}

/// Capacity `2 pi / mu(r)` of the Grötzsch condenser `(D, [0, r])`.
pub fn grotzsch_cap(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("grotzsch_cap requires 0 < r < 1, got {r}"));
    }
    Ok(2.0 * PI / mu(r)?)
}

/// Capacity of the hyperbolic disk of hyperbolic perimeter `c` centred at 0.
pub fn f1(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("f1 requires c > 0, got {c}"));
    }
    let u = 2.0 * PI / c;
    Ok(2.0 * PI / u.asinh())
}

/// Capacity of the radial segment `[0, th(c/4)]`, whose perimeter is taken
/// to be twice its hyperbolic length `c/2`.
pub fn f2(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("f2 requires c > 0, got {c}"));
    }
    let x = 0.25 * c;
    Ok(2.0 * PI / mu_with_complement(x.tanh(), 1.0 / x.cosh())?)
}

/// Outcome of evaluating the two-sided bound
/// `1 < mu(t) / log(sqrt(1 + u^2) + u) < pi/2`, `u = pi / (2 arth t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuBoundCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub ratio: f64,
}

pub fn check_mu_bound(t: f64) -> Result<MuBoundCheck> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("check_mu_bound requires 0 < t < 1, got {t}"));
    }
    let u = PI / (2.0 * t.atanh());
    // log(sqrt(1 + u^2) + u) = arsh(u)
    let ratio = mu(t)? / u.asinh();
    Ok(MuBoundCheck {
        lower_ok: ratio > 1.0,
        upper_ok: ratio < FRAC_PI_2,
        ratio,
    })
}
