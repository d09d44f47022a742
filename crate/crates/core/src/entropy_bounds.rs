//! Rényi entropy upper bounds from two moments and their gaps.
//!
//! For `X` with a density on `S ⊆ R^n`,
//! `h_r(X) <= log omega(S) + log psi_r(p, q) + L_r(||X||^n; p, q)`.
//! The gap `Delta_r(X; p, q)` is the difference between the two sides.
//! Minimizing it over `(p, q)` gives the optimal two-moment gap, and over
//! `q` alone with `p = 0` the optimal one-moment gap.
//!
//! Optimization runs in the coordinates `(lambda, log u)`. For the Gaussian
//! closed forms it runs in `(lambda, log z)`, where the feasible set is a box
//! (or a box with an explicit infeasible corner).

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::distributions::{Family, ScalarDistribution};
use crate::error::{Error, Result};
use crate::moment_core::{critical_order, ln_psi_r, Support, TwoMomentParams};
use crate::optimize::{minimize_box, minimize_scalar, OptimizerConfig};
use crate::quadrature::{try_integrate, Domain, NumericsConfig};
use crate::specfun::{ln_gamma, theta};

/// The right-hand side of the entropy bound at one `(r, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    /// Upper bound on `h_r` (nats).
    pub bound: f64,
    /// `h_r(X)` when the law has a density.
    pub entropy: Option<f64>,
    /// `bound - entropy`.
    pub gap: Option<f64>,
}

/// Which pair of coordinates an optimizer trace is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinates {
    /// `(lambda, u)` with `q - p = sqrt(tau u / (lambda (1 - lambda)))`.
    LambdaU,
    /// `(lambda, z)` of the Gaussian parametrization.
    LambdaZ,
    /// `p = 0` and `u = q - (1-r)/r`.
    PZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub lambda: f64,
    /// `u` or `z` depending on [`GapReport::coordinates`].
    pub scale: f64,
    pub value: f64,
}

/// An optimized gap with the parameters that attain it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub bound: f64,
    pub entropy: f64,
    pub gap: f64,
    pub coordinates: Coordinates,
    pub optimizer_trace: Vec<TracePoint>,
}

/// Upper bound on `h_r(X)`; the dimension `n` comes from `sup`.
pub fn entropy_bound(d: &ScalarDistribution, sup: &Support, params: &TwoMomentParams) -> Result<BoundReport> {
    let n = sup.dimension();
    if d.dimension() != n {
        return Err(Error::InvalidParameter(format!(
            "distribution lives in dimension {} but the support in dimension {n}",
            d.dimension()
        )));
    }
    let bound = sup.ln_omega() + ln_psi_r(params)? + d.l_r_pow(params, n)?;
    let entropy = if d.has_density() {
        Some(d.renyi_entropy(params.r())?)
    } else {
        None
    };
    Ok(BoundReport {
        r: params.r(),
        p: params.p(),
        q: params.q(),
        lambda: params.lambda(),
        bound,
        entropy,
        gap: entropy.map(|h| bound - h),
    })
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need 0 < r < 1, got r={r}")))
    }
}

/// `log r^(1/(r-1))`
fn ln_r_pow(r: f64) -> f64 {
    r.ln() / (r - 1.0)
}

/// `theta(c lambda) + theta(c (1-lambda)) - theta(c)` with `c = r/(1-r)`.
fn theta_split(r: f64, lambda: f64) -> Result<f64> {
    let c = r / (1.0 - r);
    Ok(theta(c * lambda)? + theta(c * (1.0 - lambda))? - theta(c)?)
}

/// Optimal two-moment gap of any lognormal law, via the Binet remainder:
/// `2 theta(c/2) - theta(c) + (1/2) log(e r^(1/(1-r)))`, `c = r/(1-r)`.
pub fn lognormal_gap_closed(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(theta_split(r, 0.5)? + 0.5 * (1.0 - ln_r_pow(r)))
}

/// The same gap written with the normalized Beta function:
/// `log(B~(c/2, c/2) sqrt(c/4)) + 1/2 - (1/2) log(2 pi r^(1/(r-1)))`.
pub fn lognormal_gap_closed_beta(r: f64) -> Result<f64> {
    check_r(r)?;
    let c = r / (1.0 - r);
    Ok(
        crate::specfun::ln_beta_tilde(0.5 * c, 0.5 * c)? + 0.5 * (0.25 * c).ln() + 0.5
            - 0.5 * ((2.0 * PI).ln() + ln_r_pow(r)),
    )
}

/// Lognormal gap at the `(lambda, u)` coordinates; it depends on `sigma2`
/// only through `u sigma2` and not at all on `mu`.
pub fn lognormal_gap_at(r: f64, lambda: f64, u: f64, sigma2: f64) -> Result<f64> {
    check_r(r)?;
    if !(lambda > 0.0 && lambda < 1.0) || !(u > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < lambda < 1, u > 0, sigma2 > 0; got ({lambda}, {u}, {sigma2})"
        )));
    }
    let us = u * sigma2;
    Ok(theta_split(r, lambda)? + 0.5 * us - 0.5 * us.ln() - 0.5 * ln_r_pow(r))
}

/// `x - log x - 1`
fn phi_log(x: f64) -> f64 {
    x - x.ln() - 1.0
}

/// Lognormal gap at an arbitrary `(p, q)`, written as the optimal gap plus
/// nonnegative excess terms.
pub fn lognormal_gap_pq(params: &TwoMomentParams, sigma2: f64) -> Result<f64> {
    let r = params.r();
    let l = params.lambda();
    let x = r * l * (1.0 - l) / (1.0 - r) * params.width().powi(2) * sigma2;
    Ok(lognormal_gap_closed(r)? + 0.5 * phi_log(x) + theta_split(r, l)? - theta_split(r, 0.5)?)
}

/// One-moment lognormal gap `Delta_r(X; 0, q)`.
pub fn lognormal_gap_p_zero(r: f64, q: f64, sigma2: f64) -> Result<f64> {
    TwoMomentParams::new(r, 0.0, q)?;
    let c = r / (1.0 - r);
    Ok(lognormal_gap_closed(r)?
        + 0.5 * phi_log((q - critical_order(r)) * sigma2)
        + theta(c - 1.0 / q)?
        + theta(1.0 / q)?
        - 2.0 * theta(0.5 * c)?)
}

const LOG_SCALE_RANGE: (f64, f64) = (-30.0, 30.0);
const LAMBDA_RANGE: (f64, f64) = (1e-6, 1.0 - 1e-6);

/// Optimal gap `Delta_r(X)`, or `Delta~_r(X)` when `constrain_p_zero`.
pub fn optimal_gap(
    d: &ScalarDistribution,
    sup: &Support,
    r: f64,
    constrain_p_zero: bool,
    opt: &OptimizerConfig,
) -> Result<GapReport> {
    check_r(r)?;
    let h = d.renyi_entropy(r)?;
    let tau = critical_order(r);
    let objective = |params: Result<TwoMomentParams>| -> f64 {
        params
            .and_then(|p| entropy_bound(d, sup, &p))
            .map(|b| b.bound - h)
            .unwrap_or(f64::INFINITY)
    };
    if constrain_p_zero {
        let m = minimize_scalar(
            |v| objective(TwoMomentParams::new(r, 0.0, tau + v.exp())),
            LOG_SCALE_RANGE.0,
            LOG_SCALE_RANGE.1,
            opt,
        )?;
        let params = TwoMomentParams::new(r, 0.0, tau + m.x[0].exp())?;
        let trace = m
            .trace
            .iter()
            .map(|(x, v)| TracePoint {
                lambda: tau / (tau + x[0].exp()),
                scale: x[0].exp(),
                value: *v,
            })
            .collect();
        return report(d, sup, &params, h, Coordinates::PZero, trace);
    }
    let m = minimize_box(
        |x: &[f64]| objective(TwoMomentParams::from_lambda_u(r, x[0], x[1].exp())),
        &[0.5, 0.0],
        &[LAMBDA_RANGE, LOG_SCALE_RANGE],
        opt,
    )?;
    let params = TwoMomentParams::from_lambda_u(r, m.x[0], m.x[1].exp())?;
    let trace = m
        .trace
        .iter()
        .map(|(x, v)| TracePoint {
            lambda: x[0],
            scale: x[1].exp(),
            value: *v,
        })
        .collect();
    report(d, sup, &params, h, Coordinates::LambdaU, trace)
}

fn report(
    d: &ScalarDistribution,
    sup: &Support,
    params: &TwoMomentParams,
    h: f64,
    coordinates: Coordinates,
    optimizer_trace: Vec<TracePoint>,
) -> Result<GapReport> {
    let b = entropy_bound(d, sup, params)?;
    Ok(GapReport {
        r: params.r(),
        p: params.p(),
        q: params.q(),
        bound: b.bound,
        entropy: h,
        gap: b.bound - h,
        coordinates,
        optimizer_trace,
    })
}

/// Coordinates `(lambda, z)` of the Gaussian gap for `Y ~ N(0, I_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussGapParams {
    r: f64,
    n: u32,
    lambda: f64,
    z: f64,
}

impl GaussGapParams {
    /// Fails with [`Error::Infeasible`] unless
    /// `(1-lambda) sqrt(2(1-r) z / (lambda (1-lambda) n)) < 1`, which keeps
    /// the lower moment order above `-1`.
    pub fn new(r: f64, n: u32, lambda: f64, z: f64) -> Result<Self> {
        check_r(r)?;
        if n == 0 || !(lambda > 0.0 && lambda < 1.0) || !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1, 0 < lambda < 1, z > 0; got ({n}, {lambda}, {z})"
            )));
        }
        let s = Self { r, n, lambda, z };
        if (1.0 - lambda) * s.spread() >= 1.0 {
            return Err(Error::Infeasible(format!(
                "lambda={lambda}, z={z} put the lower moment at or below -1 for n={n}"
            )));
        }
        Ok(s)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `sqrt(2(1-r) z / (lambda (1-lambda) n))`, so that
    /// `p = (1-r)/r - (1-lambda) spread / r` and `q = (1-r)/r + lambda spread / r`.
    fn spread(&self) -> f64 {
        let l = self.lambda;
        (2.0 * (1.0 - self.r) * self.z / (l * (1.0 - l) * self.n as f64)).sqrt()
    }

    pub fn moment_params(&self) -> Result<TwoMomentParams> {
        let tau = critical_order(self.r);
        let s = self.spread() / self.r;
        TwoMomentParams::new(self.r, tau - (1.0 - self.lambda) * s, tau + self.lambda * s)
    }
}

/// `Q_{r,n}(lambda, z)` from three log-gamma evaluations.
pub fn gaussian_q(gp: &GaussGapParams) -> Result<f64> {
    let (r, l) = (gp.r, gp.lambda);
    let n = gp.n as f64;
    let c = r / (1.0 - r);
    let base = n / (2.0 * r);
    let d = ((1.0 - r) * n * gp.z / (2.0 * l * (1.0 - l))).sqrt() / r;
    Ok(c * l * ln_gamma(base - (1.0 - l) * d)? + c * (1.0 - l) * ln_gamma(base + l * d)? - c * ln_gamma(base)?)
}

/// Lower bound `(z/2) / (1 + sqrt((lambda/(1-lambda)) b z))`, `b = 2(1-r)/(9n)`.
pub fn gaussian_q_lower_bound(gp: &GaussGapParams) -> f64 {
    let b = 2.0 * (1.0 - gp.r) / (9.0 * gp.n as f64);
    0.5 * gp.z / (1.0 + (gp.lambda / (1.0 - gp.lambda) * b * gp.z).sqrt())
}

/// `Delta_r(Y; p, q)` for `Y ~ N(0, I_n)` in the `(lambda, z)` coordinates.
pub fn gaussian_gap(gp: &GaussGapParams) -> Result<f64> {
    let r = gp.r;
    let half_n = 0.5 * gp.n as f64;
    Ok(
        theta_split(r, gp.lambda)? + gaussian_q(gp)? - 0.5 * gp.z.ln() - 0.5 * ln_r_pow(r)
            + r / (1.0 - r) * theta(half_n / r)?
            - theta(half_n)? / (1.0 - r),
    )
}

/// Optimal two-moment gap of `N(0, I_n)` from the closed form.
pub fn optimal_gaussian_gap(r: f64, n: u32, opt: &OptimizerConfig) -> Result<GapReport> {
    check_r(r)?;
    let objective = |x: &[f64]| {
        GaussGapParams::new(r, n, x[0], x[1].exp())
            .and_then(|gp| gaussian_gap(&gp))
            .unwrap_or(f64::INFINITY)
    };
    let m = minimize_box(objective, &[0.5, 0.0], &[LAMBDA_RANGE, LOG_SCALE_RANGE], opt)?;
    let gp = GaussGapParams::new(r, n, m.x[0], m.x[1].exp())?;
    let params = gp.moment_params()?;
    let h = 0.5 * n as f64 * ((2.0 * PI).ln() + ln_r_pow(r));
    Ok(GapReport {
        r,
        p: params.p(),
        q: params.q(),
        bound: h + m.value,
        entropy: h,
        gap: m.value,
        coordinates: Coordinates::LambdaZ,
        optimizer_trace: m
            .trace
            .iter()
            .map(|(x, v)| TracePoint {
                lambda: x[0],
                scale: x[1].exp(),
                value: *v,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop6Row {
    pub n: u32,
    pub gaussian_gap: f64,
    pub lognormal_gap: f64,
}

/// Optimal Gaussian gap for `n = 1, 2, 4, ...` up to `n_max` (inclusive),
/// next to its large-`n` limit, the lognormal gap.
pub fn prop6_limit_check(r: f64, n_max: u32, opt: &OptimizerConfig) -> Result<Vec<Prop6Row>> {
    if n_max < 16 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be at least 16, got {n_max}"
        )));
    }
    let limit = lognormal_gap_closed(r)?;
    let mut ns: Vec<u32> = (0..32).map(|k| 1u32 << k).take_while(|&n| n <= n_max).collect();
    if *ns.last().expect("n_max >= 16") != n_max {
        ns.push(n_max);
    }
    ns.into_iter()
        .map(|n| {
            Ok(Prop6Row {
                n,
                gaussian_gap: optimal_gaussian_gap(r, n, opt)?.gap,
                lognormal_gap: limit,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultBoundCheck {
    /// `h_r(XY)` by quadrature of the product density.
    pub h_product: f64,
    /// `h_r(tY) = h_r(Y) + log t`.
    pub h_scaled: f64,
    /// `Delta_r(Y; p, q)`.
    pub gap: f64,
    /// `h_product - (h_scaled + gap)`; nonpositive when the bound holds.
    pub residual: f64,
}

/// Checks `h_r(XY) <= h_r(tY) + Delta_r(Y; p, q)` for a scalar `Y` with a
/// density and a discrete `X` with atoms in `(0, t]`.
pub fn mult_bound_check(
    d_y: &ScalarDistribution,
    d_x: &ScalarDistribution,
    t: f64,
    params: &TwoMomentParams,
    cfg: &NumericsConfig,
) -> Result<MultBoundCheck> {
    let r = params.r();
    if !(params.p() > 0.0) {
        return Err(Error::InvalidParameter(format!("need p > 0, got p={}", params.p())));
    }
    let atoms = d_x
        .atoms()
        .ok_or_else(|| Error::Unsupported("the multiplier must be a discrete law".into()))?;
    if atoms.iter().any(|&(x, _)| !(x > 0.0 && x <= t)) {
        return Err(Error::InvalidParameter(format!(
            "multiplier atoms must lie in (0, {t}]"
        )));
    }
    let sup = d_y
        .natural_support()
        .filter(|s| s.dimension() == 1)
        .ok_or_else(|| Error::Unsupported("Y must be a scalar law with a density".into()))?;

    let (domain, centres): (Domain, Vec<f64>) = match d_y.family() {
        Family::LogNormal { mu, .. } => (Domain::HalfLine { a: 0.0 }, vec![mu.exp()]),
        Family::Generic(g) => {
            let dom = match g.domain() {
                Domain::Finite { a, b } => {
                    let xs = atoms.iter().map(|a| a.0);
                    let lo = xs.clone().map(|x| x * a).fold(f64::INFINITY, f64::min);
                    let hi = xs.map(|x| x * b).fold(f64::NEG_INFINITY, f64::max);
                    let mut pts = vec![a, b];
                    pts.extend_from_slice(g.breaks());
                    return finish_mult(
                        d_y,
                        &sup,
                        atoms,
                        Domain::Finite { a: lo, b: hi },
                        pts,
                        t,
                        params,
                        cfg,
                        r,
                    );
                }
                Domain::HalfLine { a: 0.0 } => Domain::HalfLine { a: 0.0 },
                Domain::FullLine => Domain::FullLine,
                Domain::HalfLine { .. } => {
                    return Err(Error::Unsupported("half-line densities must start at 0".into()))
                }
            };
            (dom, g.breaks().to_vec())
        }
        _ => return Err(Error::Unsupported("Y must be lognormal or a generic density".into())),
    };
    finish_mult(d_y, &sup, atoms, domain, centres, t, params, cfg, r)
}

#[allow(clippy::too_many_arguments)]
fn finish_mult(
    d_y: &ScalarDistribution,
    sup: &Support,
    atoms: Vec<(f64, f64)>,
    domain: Domain,
    centres: Vec<f64>,
    t: f64,
    params: &TwoMomentParams,
    cfg: &NumericsConfig,
    r: f64,
) -> Result<MultBoundCheck> {
    let breaks: Vec<f64> = atoms
        .iter()
        .flat_map(|&(x, _)| centres.iter().map(move |c| x * c))
        .collect();
    let ln_f = |z: f64| -> Result<f64> {
        let mut terms = Vec::with_capacity(atoms.len());
        for &(x, w) in &atoms {
            terms.push(w.ln() + d_y.ln_density(z / x)? - x.ln());
        }
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Ok(m);
        }
        Ok(m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln())
    };
    let mass = try_integrate(|z| Ok((r * ln_f(z)?).exp()), domain, &breaks, cfg)?;
    let h_product = mass.value.ln() / (1.0 - r);
    let h_scaled = d_y.renyi_entropy(r)? + t.ln();
    let gap = entropy_bound(d_y, sup, params)?
        .gap
        .ok_or_else(|| Error::Unsupported("Y must have a density".into()))?;
    Ok(MultBoundCheck {
        h_product,
        h_scaled,
        gap,
        residual: h_product - (h_scaled + gap),
    })
}

/// Right-hand sides of two differential-entropy inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffEntropyBounds {
    /// `log(Gamma(n/s+1)/Gamma(n/2+1)) + (n/2) log pi + (n/s) log(e s E||X||^s / n)`.
    pub moment_bound: f64,
    /// `E log X + (1/2) log(2 pi e Var log X)`, for positive scalar laws.
    pub log_moment_bound: Option<f64>,
    /// `h(X)` when available in closed form or by quadrature.
    pub entropy: Option<f64>,
}

/// Differential-entropy bounds from an arbitrary positive moment `s` and,
/// for positive scalar variables, from the mean and variance of `log X`.
pub fn diff_entropy_bounds(d: &ScalarDistribution, s: f64) -> Result<DiffEntropyBounds> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment order must be positive, got {s}"
        )));
    }
    let n = d.dimension() as f64;
    let lm = d.log_moment(s)?;
    if lm == f64::INFINITY {
        return Err(Error::MomentDiverges(s));
    }
    let moment_bound =
        ln_gamma(n / s + 1.0)? - ln_gamma(0.5 * n + 1.0)? + 0.5 * n * PI.ln() + (n / s) * ((E * s / n).ln() + lm);
    let scalar_positive = !matches!(d.family(), Family::GaussianMagnitude { .. }) && d.is_nonnegative();
    let log_moment_bound = if scalar_positive && d.has_density() {
        let (m, v) = d.log_stats()?;
        Some(m + 0.5 * (2.0 * PI * E * v).ln())
    } else {
        None
    };
    let entropy = if d.has_density() {
        Some(d.shannon_entropy()?)
    } else {
        None
    };
    Ok(DiffEntropyBounds {
        moment_bound,
        log_moment_bound,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment_core::psi_r;

    #[test]
    fn lognormal_closed_forms_agree() {
        for k in 1..=9 {
            let r = k as f64 / 10.0;
            let a = lognormal_gap_closed(r).unwrap();
            let b = lognormal_gap_closed_beta(r).unwrap();
            assert!((a - b).abs() < 1e-10, "r={r}: {a} vs {b}");
        }
        assert!(lognormal_gap_closed(0.999).unwrap() < 1e-2);
        assert!(lognormal_gap_closed(0.1).unwrap() > lognormal_gap_closed(0.9).unwrap());
    }

    #[test]
    fn lognormal_gap_at_examples() {
        for r in [0.2, 0.5, 0.8] {
            for s2 in [0.25, 1.0, 4.0] {
                let at = lognormal_gap_at(r, 0.5, 1.0 / s2, s2).unwrap();
                assert!((at - lognormal_gap_closed(r).unwrap()).abs() < 1e-12);
            }
        }
        let a = lognormal_gap_at(0.3, 0.5, 1.0, 1.0).unwrap();
        let b = lognormal_gap_at(0.3, 0.5, 0.25, 4.0).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn lognormal_gap_is_stationary_at_half_and_inverse_variance() {
        let (r, s2) = (0.4, 2.0);
        let best = lognormal_gap_at(r, 0.5, 1.0 / s2, s2).unwrap();
        for k in 1..=9 {
            let l = k as f64 / 10.0;
            assert!(lognormal_gap_at(r, l, 1.0 / s2, s2).unwrap() >= best - 1e-15);
        }
        for k in -8..=8 {
            let u = (k as f64 / 4.0).exp() / s2;
            assert!(lognormal_gap_at(r, 0.5, u, s2).unwrap() >= best - 1e-15);
        }
    }

    #[test]
    fn three_lognormal_gap_expressions_agree() {
        let (mu, s2) = (0.3, 1.7);
        let d = ScalarDistribution::lognormal(mu, s2).unwrap();
        for (r, l, u) in [(0.5, 0.5, 1.0), (0.2, 0.3, 2.5), (0.8, 0.7, 0.1)] {
            let params = TwoMomentParams::from_lambda_u(r, l, u).unwrap();
            let direct = entropy_bound(&d, &Support::PositiveHalfLine, &params)
                .unwrap()
                .gap
                .unwrap();
            let at = lognormal_gap_at(r, l, u, s2).unwrap();
            let pq = lognormal_gap_pq(&params, s2).unwrap();
            assert!((direct - at).abs() < 1e-10, "{direct} {at}");
            assert!((pq - at).abs() < 1e-10, "{pq} {at}");
        }
        for (r, q) in [(0.5, 1.5), (0.3, 4.0)] {
            let params = TwoMomentParams::new(r, 0.0, q).unwrap();
            let direct = entropy_bound(&d, &Support::PositiveHalfLine, &params)
                .unwrap()
                .gap
                .unwrap();
            let slice = lognormal_gap_p_zero(r, q, s2).unwrap();
            assert!((direct - slice).abs() < 1e-10, "{direct} {slice}");
        }
    }

    #[test]
    fn point_mass_bound_has_no_gap() {
        let d = ScalarDistribution::point_mass(2.0).unwrap();
        let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        let b = entropy_bound(&d, &Support::PositiveHalfLine, &params).unwrap();
        assert!(b.bound.is_finite());
        assert_eq!(b.entropy, None);
        assert_eq!(b.gap, None);
    }

    #[test]
    fn gaussian_bound_example() {
        let d = ScalarDistribution::gaussian_magnitude(1).unwrap();
        let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
        let b = entropy_bound(&d, &Support::RealLine, &params).unwrap();
        assert!(b.bound >= 0.5 * (8.0 * PI).ln());
        assert!(b.gap.unwrap() >= 0.0);
        assert!(entropy_bound(&d, &Support::EuclideanN { n: 2 }, &params).is_err());
    }

    #[test]
    fn gaussian_closed_form_matches_generic_path() {
        for (r, n, l, z) in [
            (0.5, 1, 0.5, 0.5),
            (0.1, 4, 0.3, 0.7),
            (0.8, 16, 0.6, 2.0),
            (0.3, 256, 0.45, 1.1),
        ] {
            let gp = GaussGapParams::new(r, n, l, z).unwrap();
            let params = gp.moment_params().unwrap();
            let d = ScalarDistribution::gaussian_magnitude(n).unwrap();
            let direct = entropy_bound(&d, &Support::EuclideanN { n }, &params)
                .unwrap()
                .gap
                .unwrap();
            let closed = gaussian_gap(&gp).unwrap();
            assert!((direct - closed).abs() < 1e-9, "r={r} n={n}: {direct} vs {closed}");
        }
    }

    #[test]
    fn gaussian_q_properties() {
        for r in [0.1, 0.5, 0.9] {
            for n in [1, 3, 10, 100] {
                for l in [0.2, 0.5, 0.8] {
                    for z in [0.1, 1.0, 5.0] {
                        if let Ok(gp) = GaussGapParams::new(r, n, l, z) {
                            let q = gaussian_q(&gp).unwrap();
                            assert!(q >= gaussian_q_lower_bound(&gp) - 1e-12, "{gp:?}");
                        }
                    }
                }
            }
        }
        let gp = GaussGapParams::new(0.5, 10_000, 0.5, 1.0).unwrap();
        assert!((gaussian_q(&gp).unwrap() - 0.5).abs() < 2e-2);
        assert!(matches!(
            GaussGapParams::new(0.5, 1, 0.1, 50.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn optimal_lognormal_gap_is_parameter_free() {
        let opt = OptimizerConfig::default();
        let target = lognormal_gap_closed(0.5).unwrap();
        for (mu, s2) in [(0.0, 1.0), (3.0, 2.0), (-1.0, 0.25)] {
            let d = ScalarDistribution::lognormal(mu, s2).unwrap();
            let g = optimal_gap(&d, &Support::PositiveHalfLine, 0.5, false, &opt).unwrap();
            assert!((g.gap - target).abs() < 1e-4, "({mu},{s2}): {} vs {target}", g.gap);
            assert!(g.optimizer_trace.windows(2).all(|w| w[1].value <= w[0].value));
        }
    }

    #[test]
    fn one_moment_gap_exceeds_two_moment_gap() {
        let opt = OptimizerConfig::default();
        let r = 0.5;
        let two = lognormal_gap_closed(r).unwrap();
        let mut one = Vec::new();
        for s2 in [0.1, 1.0, 10.0] {
            let d = ScalarDistribution::lognormal(0.0, s2).unwrap();
            let g = optimal_gap(&d, &Support::PositiveHalfLine, r, true, &opt).unwrap();
            assert!(g.p == 0.0);
            assert!(g.gap >= two - 1e-10, "{} vs {two}", g.gap);
            one.push(g.gap);
        }
        assert!(one[0] > two + 1e-3 && one[2] > two + 1e-3, "{one:?}");
    }

    #[test]
    fn gaussian_gaps_ordered() {
        let opt = OptimizerConfig::default();
        let d = ScalarDistribution::gaussian_magnitude(1).unwrap();
        let sup = Support::RealLine;
        let two = optimal_gap(&d, &sup, 0.1, false, &opt).unwrap().gap;
        let one = optimal_gap(&d, &sup, 0.1, true, &opt).unwrap().gap;
        let closed = optimal_gaussian_gap(0.1, 1, &opt).unwrap().gap;
        assert!(one >= two && two >= 0.0, "{one} {two}");
        assert!((two - closed).abs() < 1e-6, "{two} {closed}");
    }

    #[test]
    fn prop6_table_trends_to_lognormal() {
        let rows = prop6_limit_check(0.1, 256, &OptimizerConfig::default()).unwrap();
        assert_eq!(rows.len(), 9);
        for w in rows.windows(2) {
            assert!(w[1].gaussian_gap >= w[0].gaussian_gap - 1e-9, "{w:?}");
        }
        let last = rows.last().unwrap();
        assert!((last.gaussian_gap - last.lognormal_gap).abs() < 0.05, "{last:?}");
    }

    #[test]
    fn mult_bound_examples() {
        let cfg = NumericsConfig::default();
        let y = ScalarDistribution::lognormal(0.0, 1.0).unwrap();
        let params = TwoMomentParams::new(0.5, 0.5, 2.0).unwrap();
        let t = 2.0;
        let pm = ScalarDistribution::point_mass(t).unwrap();
        let c = mult_bound_check(&y, &pm, t, &params, &cfg).unwrap();
        assert!((c.residual + c.gap).abs() < 1e-8, "{c:?}");

        // atoms {t/2, t}: two_point stores atoms (1, a), so scale t = 2 gives {1, 2}
        let x = ScalarDistribution::two_point(0.5, 2.0).unwrap();
        let c = mult_bound_check(&y, &x, t, &params, &cfg).unwrap();
        assert!(c.residual <= 0.0, "{c:?}");

        let bad = TwoMomentParams::new(0.5, -0.5, 2.0).unwrap();
        assert!(mult_bound_check(&y, &x, t, &bad, &cfg).is_err());
    }

    #[test]
    fn diff_entropy_examples() {
        let g = ScalarDistribution::gaussian_magnitude(1).unwrap();
        let b = diff_entropy_bounds(&g, 2.0).unwrap();
        assert!((b.moment_bound - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-12);
        assert_eq!(b.log_moment_bound, None);

        let ln = ScalarDistribution::lognormal(0.0, 1.0).unwrap();
        let b = diff_entropy_bounds(&ln, 1.0).unwrap();
        let h = b.entropy.unwrap();
        assert!((b.log_moment_bound.unwrap() - h).abs() < 1e-12);
        assert!((h - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-12);
        assert!(b.moment_bound >= h);

        // psi along the log-moment parametrization tends to sqrt(2 pi / u)
        let params = TwoMomentParams::from_lambda_u(0.999, 0.5, 1.0).unwrap();
        assert!((psi_r(&params).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-2);
    }
}
