//! Moment inequalities for `||f||_r` with `0 < r < 1`.
//!
//! The k-moment bound `||f||_r <= c_r(nu, s) * sum_i nu_i mu_{s_i}(f)` holds
//! for any nonnegative weights. Choosing two moments `p < 1/r - 1 < q` and
//! optimizing the weights gives the closed form
//! `||f||_r <= [omega(S) psi_r(p, q)]^((1-r)/r) mu_p^lambda mu_q^(1-lambda)`.
//!
//! Exponents like `(1-r)/r` blow up as `r -> 0`, so every bound here is
//! assembled as a logarithm and exponentiated once at the end.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, Domain, NumericsConfig};
use crate::specfun::{ln_beta_tilde, ln_gamma};

/// A validated triple `(r, p, q)` with `0 < r < 1` and `p < 1/r - 1 < q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoMomentParams {
    r: f64,
    p: f64,
    q: f64,
    lambda: f64,
}

/// `1/r - 1`, the moment order the two moments must straddle.
pub fn critical_order(r: f64) -> f64 {
    (1.0 - r) / r
}

/// `lambda = (q + 1 - 1/r) / (q - p)`.
pub fn lambda_of(r: f64, p: f64, q: f64) -> Result<f64> {
    let bad = || Error::InvalidMomentOrder { r, p, q };
    if !(r > 0.0 && r < 1.0) || !p.is_finite() || !q.is_finite() {
        return Err(bad());
    }
    let tau = critical_order(r);
    if !(p < tau && tau < q) {
        return Err(bad());
    }
    let lambda = (q - tau) / (q - p);
    if lambda > 0.0 && lambda < 1.0 {
        Ok(lambda)
    } else {
        Err(bad())
    }
}

impl TwoMomentParams {
    pub fn new(r: f64, p: f64, q: f64) -> Result<Self> {
        let lambda = lambda_of(r, p, q)?;
        Ok(Self { r, p, q, lambda })
    }

    /// Parameters from the `(lambda, u)` coordinates:
    /// `q - p = sqrt(tau u / (lambda (1 - lambda)))`,
    /// `p = tau - (1 - lambda)(q - p)`, `q = tau + lambda (q - p)`,
    /// with `tau = (1 - r)/r`. Every `lambda` in `(0,1)` and `u > 0` is valid.
    pub fn from_lambda_u(r: f64, lambda: f64, u: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) || !(u > 0.0 && u.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < lambda < 1 and u > 0, got lambda={lambda}, u={u}"
            )));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidMomentOrder {
                r,
                p: f64::NAN,
                q: f64::NAN,
            });
        }
        let tau = critical_order(r);
        let w = (tau * u / (lambda * (1.0 - lambda))).sqrt();
        Self::new(r, tau - (1.0 - lambda) * w, tau + lambda * w)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn width(&self) -> f64 {
        self.q - self.p
    }
    /// `r / (1 - r)`
    pub fn ratio(&self) -> f64 {
        self.r / (1.0 - self.r)
    }
}

/// `log psi_r(p, q) = log B~(r lambda/(1-r), r(1-lambda)/(1-r)) - log(q - p)`.
pub fn ln_psi_r(params: &TwoMomentParams) -> Result<f64> {
    let c = params.ratio();
    let l = params.lambda;
    Ok(ln_beta_tilde(c * l, c * (1.0 - l))? - params.width().ln())
}

pub fn psi_r(params: &TwoMomentParams) -> Result<f64> {
    ln_psi_r(params).map(f64::exp)
}

/// The `r = 1/2` closed form obtained from Euler's reflection formula:
/// `pi lambda^-lambda (1-lambda)^-(1-lambda) / ((q-p) sin(pi lambda))`.
pub fn psi_half(p: f64, q: f64) -> Result<f64> {
    let params = TwoMomentParams::new(0.5, p, q)?;
    let l = params.lambda;
    let entropy_term = -l * l.ln() - (1.0 - l) * (1.0 - l).ln();
    Ok(PI * entropy_term.exp() / (params.width() * (PI * l).sin()))
}

/// Exponents `s` and nonnegative weights `nu` of a k-moment inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    s: Vec<f64>,
    nu: Vec<f64>,
}

impl MomentVector {
    pub fn new(s: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if s.is_empty() || s.len() != nu.len() {
            return Err(Error::InvalidParameter(format!(
                "moment vector needs k >= 1 exponents and as many weights, got {} and {}",
                s.len(),
                nu.len()
            )));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("moment exponents must be finite".into()));
        }
        if nu.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "moment weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { s, nu })
    }

    /// The two-moment weights `(gamma^(1-lambda), gamma^-lambda)` at `(p, q)`.
    pub fn two_moment(params: &TwoMomentParams, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        let l = params.lambda;
        Self::new(vec![params.p, params.q], vec![gamma.powf(1.0 - l), gamma.powf(-l)])
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }
    pub fn len(&self) -> usize {
        self.s.len()
    }
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Whether some pair of positive weights has exponents on both sides of
    /// `(1-r)/r`, the sufficient condition for `c_r` to be finite.
    pub fn straddles(&self, r: f64) -> bool {
        let tau = critical_order(r);
        let active = || self.s.iter().zip(&self.nu).filter(|(_, &n)| n > 0.0);
        active().any(|(&s, _)| s < tau) && active().any(|(&s, _)| s > tau)
    }

    /// `log sum_i nu_i x^s_i` by log-sum-exp over the active terms.
    fn ln_weight(&self, x: f64) -> f64 {
        let lx = x.ln();
        let mut best = f64::NEG_INFINITY;
        for (&s, &n) in self.s.iter().zip(&self.nu) {
            if n > 0.0 {
                best = best.max(n.ln() + s * lx);
            }
        }
        if best == f64::NEG_INFINITY {
            return best;
        }
        let sum: f64 = self
            .s
            .iter()
            .zip(&self.nu)
            .filter(|(_, &n)| n > 0.0)
            .map(|(&s, &n)| (n.ln() + s * lx - best).exp())
            .sum();
        best + sum.ln()
    }

    /// Points where two active terms cross; useful quadrature breakpoints.
    fn crossovers(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for i in 0..self.s.len() {
            for j in (i + 1)..self.s.len() {
                let (si, sj, ni, nj) = (self.s[i], self.s[j], self.nu[i], self.nu[j]);
                if ni > 0.0 && nj > 0.0 && si != sj {
                    let x = ((ni / nj).ln() / (sj - si)).exp();
                    if x.is_finite() && x > 0.0 {
                        out.push(x);
                    }
                }
            }
        }
        out
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need 0 < r < 1, got r={r}")))
    }
}

/// `log c_r(nu, s)` by quadrature; `+inf` when the integral diverges.
pub fn ln_c_r_numeric(r: f64, mv: &MomentVector, cfg: &NumericsConfig) -> Result<f64> {
    check_r(r)?;
    let expo = r / (1.0 - r);
    let integrand = |x: f64| -> Result<f64> {
        let lw = mv.ln_weight(x);
        if lw == f64::NEG_INFINITY {
            // all weights zero: the integrand is +inf everywhere
            return Err(Error::DivergenceDetected);
        }
        Ok((-expo * lw).exp())
    };
    match try_integrate(integrand, Domain::HalfLine { a: 0.0 }, &mv.crossovers(), cfg) {
        Ok(est) if est.value > 0.0 => Ok(est.value.ln() / expo),
        Ok(_) => Err(Error::NonFinite(0.0)),
        Err(Error::DivergenceDetected) | Err(Error::NonFinite(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `c_r(nu, s) = (int_0^inf (sum_i nu_i x^s_i)^(-r/(1-r)) dx)^((1-r)/r)`,
/// or `+inf` when the integral does not exist.
pub fn c_r_numeric(r: f64, mv: &MomentVector, cfg: &NumericsConfig) -> Result<f64> {
    ln_c_r_numeric(r, mv, cfg).map(f64::exp)
}

/// The set on which a function lives, through its angular size
/// `omega(S) = vol(B^n ∩ cone(S))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    PositiveHalfLine,
    RealLine,
    EuclideanN {
        n: u32,
    },
    /// A subset of `R^n` whose `omega` is supplied by the caller.
    Custom {
        omega: f64,
        n: u32,
    },
}

/// Volume of the unit ball in `R^n`.
pub fn ln_unit_ball_volume(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    h * PI.ln() - ln_gamma(h + 1.0).expect("h + 1 > 0")
}

impl Support {
    pub fn euclidean(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self::EuclideanN { n })
    }

    pub fn custom(omega: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let max = ln_unit_ball_volume(n).exp();
        if !(omega > 0.0 && omega <= max * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "omega must lie in (0, {max}] for n={n}, got {omega}"
            )));
        }
        Ok(Self::Custom { omega, n })
    }

    pub fn dimension(&self) -> u32 {
        match *self {
            Support::PositiveHalfLine | Support::RealLine => 1,
            Support::EuclideanN { n } | Support::Custom { n, .. } => n,
        }
    }

    pub fn ln_omega(&self) -> f64 {
        match *self {
            Support::PositiveHalfLine => 0.0,
            Support::RealLine => 2f64.ln(),
            Support::EuclideanN { n } => ln_unit_ball_volume(n),
            Support::Custom { omega, .. } => omega.ln(),
        }
    }
}

pub fn omega(sup: &Support) -> f64 {
    sup.ln_omega().exp()
}

fn check_moment(name: &str, m: f64) -> Result<()> {
    if m >= 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "moment {name} must be finite and nonnegative, got {m}"
        )))
    }
}

/// Upper bound on `||f||_r` for a nonnegative `f` on `S ⊆ R^n` whose
/// moments of `||x||^(n p)` and `||x||^(n q)` are `mu_p` and `mu_q`.
/// The dimension `n` is taken from `sup`.
pub fn two_moment_bound(mu_p: f64, mu_q: f64, params: &TwoMomentParams, sup: &Support) -> Result<f64> {
    check_moment("mu_p", mu_p)?;
    check_moment("mu_q", mu_q)?;
    if mu_p == 0.0 || mu_q == 0.0 {
        return Ok(0.0);
    }
    let l = params.lambda;
    let ln = (sup.ln_omega() + ln_psi_r(params)?) / params.ratio() + l * mu_p.ln() + (1.0 - l) * mu_q.ln();
    Ok(ln.exp())
}

/// `c_r(nu, s) * sum_i nu_i mu_{s_i}`; `+inf` when `c_r` is infinite and
/// the moment combination is positive.
pub fn k_moment_bound(mv: &MomentVector, moments: &[f64], r: f64, cfg: &NumericsConfig) -> Result<f64> {
    if moments.len() != mv.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} moments, got {}",
            mv.len(),
            moments.len()
        )));
    }
    for m in moments {
        check_moment("mu", *m)?;
    }
    let total: f64 = mv.nu.iter().zip(moments).map(|(n, m)| n * m).sum();
    if total == 0.0 {
        check_r(r)?;
        return Ok(0.0);
    }
    let ln_c = ln_c_r_numeric(r, mv, cfg)?;
    Ok((ln_c + total.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_of(0.5, 0.0, 2.0).unwrap(), 0.5);
        assert_eq!(lambda_of(0.5, -1.0, 3.0).unwrap(), 0.5);
        let l = lambda_of(0.9, 0.0, 1.0).unwrap();
        assert!((l - (2.0 - 10.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn lambda_rejects_bad_orders() {
        assert!(matches!(
            lambda_of(0.5, 1.0, 2.0),
            Err(Error::InvalidMomentOrder { .. })
        ));
        assert!(matches!(
            lambda_of(0.5, 0.0, 1.0),
            Err(Error::InvalidMomentOrder { .. })
        ));
        assert!(lambda_of(1.0, 0.0, 2.0).is_err());
        assert!(lambda_of(0.5, f64::NEG_INFINITY, 2.0).is_err());
    }

    #[test]
    fn psi_at_half() {
        let p = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        assert!((psi_r(&p).unwrap() - PI).abs() < 1e-12);
        assert!((psi_half(0.0, 2.0).unwrap() - PI).abs() < 1e-12);
        for (a, b) in [(-0.5, 1.5), (0.3, 4.0), (-2.0, 1.1)] {
            let p = TwoMomentParams::new(0.5, a, b).unwrap();
            let rel = (psi_r(&p).unwrap() / psi_half(a, b).unwrap() - 1.0).abs();
            assert!(rel < 1e-10, "({a},{b}): {rel}");
        }
    }

    #[test]
    fn psi_limit_near_one() {
        // (2e)^(1/2) Gamma(3/2)
        let p = TwoMomentParams::new(0.999, 0.0, 2.0).unwrap();
        let lim = (2.0 * std::f64::consts::E).sqrt() * 0.5 * PI.sqrt();
        assert!((psi_r(&p).unwrap() - lim).abs() < 1e-2);
    }

    #[test]
    fn c_r_examples() {
        let mv = MomentVector::new(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap();
        let c = c_r_numeric(0.5, &mv, &cfg()).unwrap();
        assert!((c - PI / 2.0).abs() < 1e-9, "{c}");

        let single = MomentVector::new(vec![0.0, 2.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(c_r_numeric(0.5, &single, &cfg()).unwrap(), f64::INFINITY);
        let none = MomentVector::new(vec![0.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(c_r_numeric(0.5, &none, &cfg()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn c_r_matches_beta_substitution() {
        // nu = (gamma^(1/2), gamma^(-1/2)), s = (0, 2): c^(r/(1-r)) = B(1/2,1/2)/2 = pi/2
        let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        for gamma in [0.25, 1.0, 4.0] {
            let mv = MomentVector::two_moment(&params, gamma).unwrap();
            let c = c_r_numeric(0.5, &mv, &cfg()).unwrap();
            assert!((c - PI / 2.0).abs() < 1e-9, "gamma={gamma}: {c}");
        }
    }

    #[test]
    fn omega_values() {
        assert_eq!(omega(&Support::PositiveHalfLine), 1.0);
        assert_eq!(omega(&Support::RealLine), 2.0);
        assert!((omega(&Support::EuclideanN { n: 1 }) - 2.0).abs() < 1e-14);
        assert!((omega(&Support::EuclideanN { n: 2 }) - PI).abs() < 1e-14);
        assert!((omega(&Support::EuclideanN { n: 3 }) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert_eq!(omega(&Support::custom(0.5, 2).unwrap()), 0.5);
        assert!(Support::custom(3.5, 2).is_err());
        assert!(Support::custom(0.0, 2).is_err());
    }

    #[test]
    fn two_moment_bound_examples() {
        let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        let sup = Support::PositiveHalfLine;
        assert_eq!(two_moment_bound(0.0, 0.0, &params, &sup).unwrap(), 0.0);
        // f = e^-x: ||f||_{1/2} = 4, mu_0 = 1, mu_2 = 2
        let b = two_moment_bound(1.0, 2.0, &params, &sup).unwrap();
        assert!(b >= 4.0, "{b}");
        // f(x) -> f(x/a) scales mu_s by a^(s+1) and ||f||_r by a^(1/r)
        let a: f64 = 2.0;
        let scaled = two_moment_bound(a, 2.0 * a.powi(3), &params, &sup).unwrap();
        assert!((scaled / b - a.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn k_moment_reproduces_two_moment_at_optimal_gamma() {
        let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        let (mp, mq) = (1.0, 2.0);
        let l = params.lambda();
        let gamma = l * mq / ((1.0 - l) * mp);
        let mv = MomentVector::two_moment(&params, gamma).unwrap();
        let k = k_moment_bound(&mv, &[mp, mq], 0.5, &cfg()).unwrap();
        let two = two_moment_bound(mp, mq, &params, &Support::PositiveHalfLine).unwrap();
        assert!((k / two - 1.0).abs() < 1e-9, "{k} vs {two}");

        // a third exponent with zero weight changes nothing
        let mv3 = MomentVector::new(vec![0.0, 2.0, 1.0], vec![mv.nu()[0], mv.nu()[1], 0.0]).unwrap();
        let k3 = k_moment_bound(&mv3, &[mp, mq, 5.0], 0.5, &cfg()).unwrap();
        assert_eq!(k3, k);

        assert_eq!(k_moment_bound(&mv, &[0.0, 0.0], 0.5, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn moment_vector_validation() {
        assert!(MomentVector::new(vec![], vec![]).is_err());
        assert!(MomentVector::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(MomentVector::new(vec![0.0], vec![-1.0]).is_err());
        let mv = MomentVector::new(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap();
        assert!(mv.straddles(0.5));
        assert!(!mv.straddles(0.2));
    }
}
