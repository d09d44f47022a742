//! Special functions: log-gamma, the Binet remainder, Beta and its
//! normalized variant, the principal Lambert W branch, and the
//! logarithm-power ratio `kappa(t) = sup_u log(1+u) / u^t`.
//!
//! Everything here is pure `f64` arithmetic. Functions with a restricted
//! domain return [`Error::Domain`] instead of producing NaN.

use std::f64::consts::{E, PI};

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument log-gamma uses the Lanczos rational approximation
/// and theta uses the upward recurrence; above it both use the Stirling
/// series.
const STIRLING_CUTOFF: f64 = 10.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING_COEF: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn check_positive(func: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(func, x, "x > 0 and finite"))
    }
}

fn stirling_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Horner in 1/x^2, innermost term first.
    let mut acc = 0.0;
    for c in STIRLING_COEF.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn lanczos_ln_gamma(z: f64) -> f64 {
    // valid for z >= 0.5
    let x = z - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma", x)?;
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x >= STIRLING_CUTOFF {
        return Ok((x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_series(x));
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum away from its pole at 0
        let s = (PI * x).sin();
        return Ok((PI / s).ln() - lanczos_ln_gamma(1.0 - x));
    }
    Ok(lanczos_ln_gamma(x))
}

/// Remainder in Binet's formula,
/// `theta(x) = ln_gamma(x) - (x - 1/2) ln x + x - ln(2 pi)/2`.
///
/// For `x >= 10` the Stirling series is summed directly. Smaller arguments
/// are shifted up with `theta(x) = theta(x+1) + (x + 1/2) ln(1 + 1/x) - 1`,
/// which never forms the large cancelling difference of the defining
/// expression.
pub fn theta(x: f64) -> Result<f64> {
    check_positive("theta", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < STIRLING_CUTOFF {
        acc += (x + 0.5) * (1.0 / x).ln_1p() - 1.0;
        x += 1.0;
    }
    Ok(acc + stirling_series(x))
}

/// Digamma `psi(x) = d/dx ln_gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < STIRLING_CUTOFF {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // B_2k / (2k x^2k), k = 1..=6
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32_760.0)))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// Trigamma, the derivative of [`digamma`].
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < STIRLING_CUTOFF {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B_2k / x^(2k+1), k = 1..=6
    let tail = inv2
        * inv
        * (1.0 / 6.0
            - inv2
                * (1.0 / 30.0
                    - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * 691.0 / 2730.0)))));
    Ok(acc + inv + 0.5 * inv2 + tail)
}

/// Natural logarithm of the Beta function.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    check_positive("beta", x)?;
    check_positive("beta", y)?;
    Ok(ln_gamma(x)? + ln_gamma(y)? - ln_gamma(x + y)?)
}

pub fn beta(x: f64, y: f64) -> Result<f64> {
    ln_beta(x, y).map(f64::exp)
}

/// `ln B~(x, y)` where `B~(x, y) = B(x, y) (x+y)^(x+y) x^(-x) y^(-y)`.
pub fn ln_beta_tilde(x: f64, y: f64) -> Result<f64> {
    let lb = ln_beta(x, y)?;
    let s = x + y;
    Ok(lb + s * s.ln() - x * x.ln() - y * y.ln())
}

pub fn beta_tilde(x: f64, y: f64) -> Result<f64> {
    ln_beta_tilde(x, y).map(f64::exp)
}

/// Principal branch `W_0` of the Lambert function: the solution `w >= -1`
/// of `w e^w = z`, for `z >= -1/e`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let branch = -1.0 / E;
    // a few ulps of slack so that a rounded -1/e is accepted
    if z.is_nan() || z < branch - 4.0 * f64::EPSILON || z == f64::INFINITY {
        return Err(domain("lambert_w0", z, "z >= -1/e and finite"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let dist = E * z + 1.0;
    if dist <= 0.0 {
        return Ok(-1.0);
    }

    let mut w = if dist < 0.3 {
        // series about the branch point in p = sqrt(2(ez + 1))
        let p = (2.0 * dist).sqrt();
        let series = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
        if p < 1e-3 {
            return Ok(series);
        }
        series
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - (l.ln_1p()) / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// Solution of the fixed-point equation `u = t (1+u) log(1+u)` that
/// attains the supremum defining [`kappa`].
///
/// The root is stored as `v = log(1 + u)` because `u` itself overflows for
/// small `t` (roughly `u ~ e^(1/t)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaFixedPoint {
    pub t: f64,
    /// `log(1 + u*)`
    pub log1p_u: f64,
}

impl KappaFixedPoint {
    /// `log u*`, finite even when `u*` overflows.
    pub fn ln_u(&self) -> f64 {
        let v = self.log1p_u;
        v + (-(-v).exp_m1()).ln()
    }

    /// `u*` itself; `+inf` when it exceeds the double range.
    pub fn u(&self) -> f64 {
        self.log1p_u.exp_m1()
    }

    /// Residual of the fixed-point equation scaled by `1/(1+u)`:
    /// `|1 - e^(-v) - t v|`, which equals `|u - t(1+u)log(1+u)| / (1+u)`.
    pub fn scaled_residual(&self) -> f64 {
        let v = self.log1p_u;
        (-(-v).exp_m1() - self.t * v).abs()
    }

    /// `log(1+u*) / (u*)^t`.
    pub fn kappa(&self) -> f64 {
        self.log1p_u * (-self.t * self.ln_u()).exp()
    }
}

fn check_t(func: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(domain(func, t, "0 < t <= 1"))
    }
}

/// Newton solve of `t v = 1 - e^(-v)` for the nonzero root `v > 0`.
///
/// `phi(v) = t v - 1 + e^(-v)` is convex with `phi(0) = 0`, so Newton
/// started at `v = 1/t` (where `phi > 0`) decreases monotonically onto the
/// root. Any step that leaves the bracket `[ln(1/t), 1/t]` is replaced by
/// bisection.
pub fn kappa_fixed_point(t: f64) -> Result<KappaFixedPoint> {
    check_t("kappa", t)?;
    if t == 1.0 {
        return Ok(KappaFixedPoint { t, log1p_u: 0.0 });
    }
    let phi = |v: f64| t * v + (-v).exp_m1();
    let mut lo = (1.0 / t).ln();
    let mut hi = 1.0 / t;
    let mut v = hi;
    for _ in 0..500 {
        let f = phi(v);
        if f > 0.0 {
            hi = hi.min(v);
        } else {
            lo = lo.max(v);
        }
        let d = t - (-v).exp();
        let mut next = v - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let done = (next - v).abs() <= 2.0 * f64::EPSILON * v;
        v = next;
        if done || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(KappaFixedPoint { t, log1p_u: v })
}

/// `kappa(t) = sup_{u > 0} log(1 + u) / u^t` for `0 < t <= 1`.
pub fn kappa(t: f64) -> Result<f64> {
    check_t("kappa", t)?;
    if t == 1.0 {
        return Ok(1.0);
    }
    Ok(kappa_fixed_point(t)?.kappa())
}

/// Fixed point from the closed form
/// `u* = exp(W(-(1/t) e^(-1/t)) + 1/t) - 1`, so `log(1+u*) = W(..) + 1/t`.
///
/// Loses precision as `t -> 1` where the two terms cancel; kept as an
/// independent check on [`kappa_fixed_point`].
pub fn kappa_fixed_point_lambert(t: f64) -> Result<KappaFixedPoint> {
    check_t("kappa", t)?;
    let inv = 1.0 / t;
    let arg = -inv * (-inv).exp();
    let w = lambert_w0(arg.max(-1.0 / E))?;
    Ok(KappaFixedPoint { t, log1p_u: w + inv })
}

pub fn kappa_lambert(t: f64) -> Result<f64> {
    check_t("kappa", t)?;
    if t == 1.0 {
        return Ok(1.0);
    }
    Ok(kappa_fixed_point_lambert(t)?.kappa())
}
