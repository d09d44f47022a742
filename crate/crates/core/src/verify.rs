//! Oracle cross-checks grouped by acceptance criterion.
//!
//! Each criterion returns a list of named checks. A check records the worst
//! observed discrepancy next to its tolerance so failures are diagnosable
//! from the report alone.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::distributions::ScalarDistribution;
use crate::entropy_bounds::{
    diff_entropy_bounds, gaussian_q, gaussian_q_lower_bound, lognormal_gap_closed, lognormal_gap_closed_beta,
    optimal_gap, optimal_gaussian_gap, prop6_limit_check, GaussGapParams,
};
use crate::error::Result;
use crate::figures::{default_eps_grid, fig3};
use crate::mi_bounds::{
    chi2_mi_bound, mi_oracle, prop7_bound, prop8_bound, prop9_bound, v_s, v_s_via, vs_upper_bound_check, ChannelModel,
    Conditioning, VsRoute,
};
use crate::moment_core::{
    c_r_numeric, critical_order, psi_r, two_moment_bound, MomentVector, Support, TwoMomentParams,
};
use crate::optimize::OptimizerConfig;
use crate::quadrature::{try_integrate, Domain, NumericsConfig};
use crate::specfun::{beta, beta_tilde, kappa, lambert_w0, ln_beta_tilde, ln_gamma, theta};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `observed <= limit`.
    fn at_most(name: &str, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: observed <= limit,
            detail: format!("observed {observed:.3e}, limit {limit:.1e}"),
        }
    }

    fn holds(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Self::holds(name, false, format!("error: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Titles of the numerically checkable criteria, `1..=8`.
pub const TITLES: [&str; 8] = [
    "special functions",
    "two-moment norm bound validity",
    "lognormal gap",
    "Gaussian gap",
    "differential-entropy corollaries",
    "mutual-information ordering",
    "V_s identities",
    "two-point mixture sweep",
];

/// Runs criterion `id` in `1..=8`.
pub fn criterion(id: u8, cfg: &NumericsConfig) -> CriterionReport {
    let checks = match id {
        1 => special_functions(),
        2 => norm_bounds(cfg),
        3 => lognormal_gap(),
        4 => gaussian_gap(),
        5 => diff_entropy(),
        6 => mi_ordering(cfg),
        7 => vs_identities(cfg),
        8 => mixture_sweep(cfg),
        _ => vec![Check::holds("criterion id", false, format!("unknown criterion {id}"))],
    };
    CriterionReport {
        id,
        title: TITLES.get((id as usize).wrapping_sub(1)).copied().unwrap_or("unknown"),
        checks,
    }
}

/// All criteria in order.
pub fn run_all(cfg: &NumericsConfig) -> Vec<CriterionReport> {
    (1..=8).map(|id| criterion(id, cfg)).collect()
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter()
        .fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
}

fn special_functions() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "gamma reflection",
        (|| {
            let mut worst = 0.0f64;
            for k in 1..20 {
                let x = k as f64 / 20.0;
                let lhs = ln_gamma(x)? + ln_gamma(1.0 - x)?;
                worst = worst.max((lhs - (PI / (PI * x).sin()).ln()).abs());
            }
            Ok(Check::at_most("gamma reflection", worst, 1e-12))
        })(),
    ));
    out.push(Check::from_result(
        "theta decreasing and convex",
        (|| {
            let xs: Vec<f64> = (0..=60).map(|k| 0.01 * 10f64.powf(k as f64 / 15.0)).collect();
            let th: Vec<f64> = xs.iter().map(|&x| theta(x)).collect::<Result<_>>()?;
            let decreasing = th.windows(2).all(|w| w[1] < w[0]) && th.iter().all(|&t| t > 0.0);
            // second divided differences on a nonuniform grid
            let convex = (1..xs.len() - 1).all(|i| {
                let s1 = (th[i] - th[i - 1]) / (xs[i] - xs[i - 1]);
                let s2 = (th[i + 1] - th[i]) / (xs[i + 1] - xs[i]);
                s2 >= s1 - 1e-14
            });
            Ok(Check::holds(
                "theta decreasing and convex",
                decreasing && convex,
                format!("decreasing {decreasing}, convex {convex}"),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "normalized beta identities",
        (|| {
            let mut worst = 0.0f64;
            for (x, y) in [(0.3, 0.7), (1.0, 2.5), (4.0, 0.25), (10.0, 10.0)] {
                let direct = beta(x, y)? * (x + y).powf(x + y) * x.powf(-x) * y.powf(-y);
                worst = worst.max((beta_tilde(x, y)? / direct - 1.0).abs());
                worst = worst.max((ln_beta_tilde(x, y)? - ln_beta_tilde(y, x)?).abs());
            }
            worst = worst.max((beta_tilde(0.5, 0.5)? - 2.0 * PI).abs());
            worst = worst.max((beta_tilde(1.0, 1.0)? - 4.0).abs());
            Ok(Check::at_most("normalized beta identities", worst, 1e-12))
        })(),
    ));
    out.push(Check::from_result(
        "Lambert W residuals",
        (|| {
            let mut worst = 0.0f64;
            let zs = [-1.0 / E + 1e-12, -0.3, -0.1, 0.0, 0.5, 1.0, 10.0, 1e3, 1e10];
            for z in zs {
                let w = lambert_w0(z)?;
                worst = worst.max((w * w.exp() - z).abs() / z.abs().max(1e-300).max(1e-3));
            }
            Ok(Check::at_most("Lambert W residuals", worst, 1e-10))
        })(),
    ));
    out.push(Check::from_result(
        "kappa(1) = 1",
        (|| {
            let k = kappa(1.0)?;
            Ok(Check::holds("kappa(1) = 1", k == 1.0, format!("kappa(1) = {k}")))
        })(),
    ));
    out.push(Check::from_result(
        "1/(e t) < kappa(t) <= 1/t",
        (|| {
            // Below t = 0.05 the excess of t kappa(t) over 1/e is about exp(-1/t),
            // under one ulp, so there the lower bound is checked to rounding.
            let ts: Vec<f64> = (0..=30).map(|k| 1e-3 * 1e3f64.powf(k as f64 / 30.0)).collect();
            let mut ok = true;
            for &t in &ts {
                let k = kappa(t)?;
                let lower = if t >= 0.05 {
                    1.0 / (E * t) < k
                } else {
                    E * t * k >= 1.0 - 4.0 * f64::EPSILON
                };
                ok &= lower && k <= 1.0 / t * (1.0 + 1e-12);
            }
            Ok(Check::holds(
                "1/(e t) < kappa(t) <= 1/t",
                ok,
                format!(
                    "{} grid points in [1e-3, 1], strict lower bound for t >= 0.05",
                    ts.len()
                ),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "t kappa(t) nondecreasing",
        (|| {
            let ts: Vec<f64> = (0..=30).map(|k| 1e-3 * 1e3f64.powf(k as f64 / 30.0)).collect();
            let g: Vec<f64> = ts.iter().map(|&t| kappa(t).map(|k| t * k)).collect::<Result<_>>()?;
            let mono = g.windows(2).all(|w| w[1] >= w[0] - 1e-15);
            let lim = (g[0] - 1.0 / E).abs();
            Ok(Check::holds(
                "t kappa(t) nondecreasing",
                mono && lim < 2e-2,
                format!("monotone {mono}, |g(0.001) - 1/e| = {lim:.3e} (limit 2e-2)"),
            ))
        })(),
    ));
    out
}

type TestDensity = (&'static str, fn(f64) -> f64, fn(f64) -> f64);

/// Test densities on `R_+` with closed-form moments `∫ x^s f(x) dx`.
fn test_densities() -> [TestDensity; 4] {
    fn g(x: f64) -> f64 {
        ln_gamma(x).map(f64::exp).unwrap_or(f64::NAN)
    }
    [
        ("exp(-x)", |x| (-x).exp(), |s| g(s + 1.0)),
        ("x exp(-x)", |x| x * (-x).exp(), |s| g(s + 2.0)),
        (
            "lognormal(0,1)",
            |x| {
                if x > 0.0 {
                    (-0.5 * x.ln().powi(2)).exp() / (x * (2.0 * PI).sqrt())
                } else {
                    0.0
                }
            },
            |s| (0.5 * s * s).exp(),
        ),
        (
            "half-normal",
            |x| 2.0 * (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            |s| 2f64.powf(0.5 * s) * g(0.5 * (s + 1.0)) / PI.sqrt(),
        ),
    ]
}

fn order_grid() -> Vec<(f64, f64, f64)> {
    let mut g = Vec::new();
    for r in [0.3, 0.5, 0.7] {
        let tau = critical_order(r);
        for p in [-0.5, 0.5 * tau, 0.9 * tau] {
            for dq in [0.5, 1.0, 2.0] {
                g.push((r, p, tau + dq));
            }
        }
    }
    g
}

fn norm_bounds(cfg: &NumericsConfig) -> Vec<Check> {
    let grid = order_grid();
    let mut out = Vec::new();
    out.push(Check::from_result(
        "norm <= two-moment bound",
        (|| {
            let mut worst = f64::INFINITY;
            let mut count = 0;
            for (name, f, mom) in test_densities() {
                for &(r, p, q) in &grid {
                    let params = TwoMomentParams::new(r, p, q)?;
                    let mass = try_integrate(
                        |x| {
                            let v = f(x);
                            Ok(if v > 0.0 { v.powf(r) } else { 0.0 })
                        },
                        Domain::HalfLine { a: 0.0 },
                        &[1.0],
                        cfg,
                    )?
                    .value;
                    let norm = mass.powf(1.0 / r);
                    let bound = two_moment_bound(mom(p), mom(q), &params, &Support::PositiveHalfLine)?;
                    let slack = bound - norm;
                    if slack < worst {
                        worst = slack;
                    }
                    if !(slack >= -1e-9) {
                        return Ok(Check::holds(
                            "norm <= two-moment bound",
                            false,
                            format!("{name} at (r,p,q)=({r},{p},{q}): slack {slack:.3e}"),
                        ));
                    }
                    count += 1;
                }
            }
            Ok(Check::holds(
                "norm <= two-moment bound",
                true,
                format!("{count} cases, minimum slack {worst:.3e} (limit -1e-9)"),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "psi closed form vs c_r",
        (|| {
            let mut worst = 0.0f64;
            for &(r, p, q) in &grid {
                let params = TwoMomentParams::new(r, p, q)?;
                let l = params.lambda();
                let gamma = l / (1.0 - l);
                let mv = MomentVector::two_moment(&params, gamma)?;
                let minimized = c_r_numeric(r, &mv, cfg)? * (gamma.powf(1.0 - l) + gamma.powf(-l));
                let closed = psi_r(&params)?.powf((1.0 - r) / r);
                worst = worst.max((minimized / closed - 1.0).abs());
            }
            Ok(Check::at_most("psi closed form vs c_r", worst, 1e-6))
        })(),
    ));
    out
}

fn lognormal_gap() -> Vec<Check> {
    let opt = OptimizerConfig::default();
    let rs: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let mut out = Vec::new();
    out.push(Check::from_result(
        "theta form vs beta form",
        (|| {
            let d = max_abs(
                rs.iter()
                    .map(|&r| Ok::<_, crate::Error>(lognormal_gap_closed(r)? - lognormal_gap_closed_beta(r)?))
                    .collect::<Result<Vec<_>>>()?,
            );
            Ok(Check::at_most("theta form vs beta form", d, 1e-10))
        })(),
    ));
    out.push(Check::from_result(
        "optimizer reproduces closed form",
        (|| {
            let d0 = ScalarDistribution::lognormal(0.0, 1.0)?;
            let mut worst = 0.0f64;
            for &r in &rs {
                let g = optimal_gap(&d0, &Support::PositiveHalfLine, r, false, &opt)?.gap;
                worst = worst.max((g - lognormal_gap_closed(r)?).abs());
            }
            Ok(Check::at_most("optimizer reproduces closed form", worst, 1e-4))
        })(),
    ));
    out.push(Check::from_result(
        "invariance across (mu, sigma2)",
        (|| {
            let mut worst = 0.0f64;
            for &r in &rs {
                let gs: Vec<f64> = [(0.0, 1.0), (3.0, 2.0), (-1.0, 0.25)]
                    .iter()
                    .map(|&(m, s)| {
                        let d = ScalarDistribution::lognormal(m, s)?;
                        Ok(optimal_gap(&d, &Support::PositiveHalfLine, r, false, &opt)?.gap)
                    })
                    .collect::<Result<_>>()?;
                let spread = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - gs.iter().cloned().fold(f64::INFINITY, f64::min);
                worst = worst.max(spread);
            }
            Ok(Check::at_most("invariance across (mu, sigma2)", worst, 2e-4))
        })(),
    ));
    out.push(Check::from_result(
        "gap at r = 0.999",
        (|| Ok(Check::at_most("gap at r = 0.999", lognormal_gap_closed(0.999)?, 1e-2)))(),
    ));
    out
}

fn gaussian_gap() -> Vec<Check> {
    let opt = OptimizerConfig::default();
    let mut out = Vec::new();
    out.push(Check::from_result(
        "Q lower bound",
        (|| {
            let mut worst = f64::INFINITY;
            let mut count = 0;
            for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
                for n in [1, 2, 5, 10, 50, 200] {
                    for l in [0.1, 0.3, 0.5, 0.7, 0.9] {
                        for z in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
                            if let Ok(gp) = GaussGapParams::new(r, n, l, z) {
                                worst = worst.min(gaussian_q(&gp)? - gaussian_q_lower_bound(&gp));
                                count += 1;
                            }
                        }
                    }
                }
            }
            Ok(Check::holds(
                "Q lower bound",
                worst >= -1e-12,
                format!("{count} feasible points, minimum Q - bound {worst:.3e}"),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "Q limit at n = 10^4",
        (|| {
            let q = gaussian_q(&GaussGapParams::new(0.5, 10_000, 0.5, 1.0)?)?;
            Ok(Check::at_most("Q limit at n = 10^4", (q - 0.5).abs(), 2e-2))
        })(),
    ));
    out.push(Check::from_result(
        "gap nondecreasing in n",
        (|| {
            let gaps: Vec<f64> = (1..=64u32)
                .chain([128, 256])
                .map(|n| optimal_gaussian_gap(0.1, n, &opt).map(|g| g.gap))
                .collect::<Result<_>>()?;
            let worst = gaps.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
            Ok(Check::holds(
                "gap nondecreasing in n",
                worst <= 0.0,
                format!("n in 1..=64, 128, 256; largest decrease {:.3e}", worst.max(0.0)),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "Gaussian gap near lognormal limit",
        (|| {
            let rows = prop6_limit_check(0.1, 256, &opt)?;
            let last = rows.last().expect("nonempty");
            Ok(Check::at_most(
                "Gaussian gap near lognormal limit",
                (last.gaussian_gap - last.lognormal_gap).abs(),
                0.05,
            ))
        })(),
    ));
    out
}

fn diff_entropy() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "moment bound s=2, unit normal",
        (|| {
            let normal =
                ScalarDistribution::generic_pdf(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(), Domain::FullLine)?;
            let b = diff_entropy_bounds(&normal, 2.0)?;
            let target = 0.5 * (2.0 * PI * E).ln();
            Ok(Check::at_most(
                "moment bound s=2, unit normal",
                (b.moment_bound - target).abs(),
                1e-8,
            ))
        })(),
    ));
    out.push(Check::from_result(
        "log-moment bound equality, lognormal",
        (|| {
            let mut worst = 0.0f64;
            for (mu, s2) in [(0.0, 1.0), (1.5, 0.3), (-2.0, 4.0)] {
                let d = ScalarDistribution::lognormal(mu, s2)?;
                let b = diff_entropy_bounds(&d, 1.0)?;
                worst = worst.max((b.log_moment_bound.unwrap_or(f64::NAN) - b.entropy.unwrap_or(f64::NAN)).abs());
                // the same law as a generic density exercises the quadrature paths
                let g = ScalarDistribution::generic_pdf_with_breaks(
                    move |x| {
                        if x > 0.0 {
                            (-(x.ln() - mu).powi(2) / (2.0 * s2)).exp() / (x * (2.0 * PI * s2).sqrt())
                        } else {
                            0.0
                        }
                    },
                    Domain::HalfLine { a: 0.0 },
                    vec![mu.exp()],
                )?;
                let b = diff_entropy_bounds(&g, 1.0)?;
                worst = worst.max((b.log_moment_bound.unwrap_or(f64::NAN) - b.entropy.unwrap_or(f64::NAN)).abs());
            }
            Ok(Check::at_most("log-moment bound equality, lognormal", worst, 1e-6))
        })(),
    ));
    out
}

fn normal_input(var: f64) -> Result<ScalarDistribution> {
    ScalarDistribution::generic_pdf(
        move |x| (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt(),
        Domain::FullLine,
    )
}

fn mi_ordering(cfg: &NumericsConfig) -> Vec<Check> {
    let x = Conditioning::GivenX;
    let mut out = Vec::new();
    for var in [0.5, 2.0] {
        let name = format!("AWGN, X ~ N(0, {var})");
        out.push(Check::from_result(
            &name,
            (|| {
                let ch = ChannelModel::awgn(normal_input(var)?)?;
                let i = mi_oracle(&ch, x, cfg)?;
                let err = (i - 0.5 * (1.0 + var).ln()).abs();
                let mut bounds = Vec::new();
                for t in [0.25, 0.5, 0.75, 1.0] {
                    bounds.push((format!("prop7(t={t})"), prop7_bound(&ch, x, t, cfg)?));
                }
                for r in [0.25, 0.5, 0.75] {
                    bounds.push((format!("prop8(r={r})"), prop8_bound(&ch, x, r, cfg)?));
                }
                bounds.push(("prop9(0,2)".into(), prop9_bound(&ch, x, 0.0, 2.0, cfg)?));
                bounds.push(("log1p chi2".into(), chi2_mi_bound(&ch, x, cfg)?));
                // every route here is deterministic quadrature, so the 4 SE slack is zero
                let (worst_name, worst) = bounds
                    .iter()
                    .map(|(n, b)| (n.clone(), b - i))
                    .fold((String::new(), f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
                Ok(Check::holds(
                    &name,
                    err <= 1e-6 && worst >= 0.0,
                    format!(
                        "|I - log(1+var)/2| = {err:.3e} (limit 1e-6); smallest bound - I = {worst:.3e} ({worst_name})"
                    ),
                ))
            })(),
        ));
    }
    out
}

fn vs_identities(cfg: &NumericsConfig) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "direct vs kernel, exact sums",
        (|| {
            let mut worst = 0.0f64;
            let cases = [
                (
                    ChannelModel::scale_mixture(ScalarDistribution::two_point(0.3, 4.0)?)?,
                    Conditioning::GivenU,
                ),
                (
                    ChannelModel::scale_mixture(ScalarDistribution::two_point(0.1, 11.0)?)?,
                    Conditioning::GivenX,
                ),
                (
                    ChannelModel::awgn(ScalarDistribution::two_point(0.4, 3.0)?)?,
                    Conditioning::GivenX,
                ),
            ];
            for (ch, cond) in &cases {
                for s in [0.0, 1.0, 2.0] {
                    let d = v_s_via(ch, s, *cond, VsRoute::Direct, cfg)?.value;
                    let k = v_s_via(ch, s, *cond, VsRoute::Kernel, cfg)?.value;
                    worst = worst.max((d - k).abs() / k.abs().max(1e-300));
                }
            }
            Ok(Check::at_most("direct vs kernel, exact sums", worst, 1e-8))
        })(),
    ));
    out.push(Check::from_result(
        "direct vs kernel, Monte Carlo",
        (|| {
            let mut worst = 0.0f64;
            let cases = [
                (
                    ChannelModel::scale_mixture(ScalarDistribution::lognormal(0.0, 0.5)?)?,
                    Conditioning::GivenU,
                    2.0,
                ),
                (
                    ChannelModel::scale_mixture(ScalarDistribution::lognormal(0.0, 0.5)?)?,
                    Conditioning::GivenX,
                    0.0,
                ),
                (
                    ChannelModel::awgn(ScalarDistribution::lognormal(0.0, 0.25)?)?,
                    Conditioning::GivenX,
                    2.0,
                ),
            ];
            for (ch, cond, s) in &cases {
                let d = v_s_via(ch, *s, *cond, VsRoute::Direct, cfg)?.value;
                let k = v_s_via(ch, *s, *cond, VsRoute::Kernel, cfg)?;
                let se = k.standard_error.unwrap_or(0.0);
                worst = worst.max((d - k.value).abs() / (4.0 * se).max(1e-300));
            }
            Ok(Check::holds(
                "direct vs kernel, Monte Carlo",
                worst <= 1.0,
                format!("largest |direct - kernel| / (4 SE) = {worst:.3}"),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "scaling law",
        (|| {
            let mut worst = 0.0f64;
            let base = ChannelModel::awgn(ScalarDistribution::two_point(0.4, 3.0)?)?;
            for s in [0.0, 2.0] {
                let v = v_s_via(&base, s, Conditioning::GivenX, VsRoute::Direct, cfg)?.value;
                for a in [0.5, 2.0, 3.0] {
                    let ch = base.clone().with_output_scale(a)?;
                    let va = v_s_via(&ch, s, Conditioning::GivenX, VsRoute::Direct, cfg)?.value;
                    worst = worst.max((va - a.powf(s - 1.0) * v).abs());
                }
            }
            Ok(Check::at_most("scaling law", worst, 1e-8))
        })(),
    ));
    out.push(Check::from_result(
        "constant mixing vs Gaussian input",
        (|| {
            let mut worst = 0.0f64;
            for c in [0.5, 1.0, 3.0] {
                let sm = ChannelModel::scale_mixture(ScalarDistribution::point_mass(c)?)?;
                let a = v_s(&sm, 0.0, Conditioning::GivenX, cfg)?.value;
                let closed = 0.5 / PI.sqrt() * (1.0 - (1.0 + c).powf(-0.5));
                let awgn = v_s(&ChannelModel::awgn(normal_input(c)?)?, 0.0, Conditioning::GivenX, cfg)?.value;
                worst = worst.max((a - closed).abs()).max((awgn - closed).abs());
            }
            Ok(Check::at_most("constant mixing vs Gaussian input", worst, 1e-9))
        })(),
    ));
    out.push(Check::from_result(
        "V_s(Y|U) upper bound",
        (|| {
            let cases = [
                (ScalarDistribution::point_mass(2.0)?, 1.0),
                (ScalarDistribution::two_point(0.5, 3.0)?, 0.0),
                (ScalarDistribution::two_point(0.1, 11.0)?, 2.0),
            ];
            let mut worst = f64::INFINITY;
            for (mixing, s) in cases {
                worst = worst.min(vs_upper_bound_check(&ChannelModel::scale_mixture(mixing)?, s)?.residual);
            }
            Ok(Check::holds(
                "V_s(Y|U) upper bound",
                worst >= -1e-12,
                format!("minimum residual {worst:.3e} (limit -1e-12)"),
            ))
        })(),
    ));
    out.push(Check::from_result(
        "V_s(Y|U) pairwise bound",
        (|| {
            let mut worst = f64::INFINITY;
            for eps in [0.01, 0.1, 0.3, 0.5, 0.9] {
                for a in [1e-3, 0.5, 1.5, 3.0, 11.0, 1e3] {
                    let ch = ChannelModel::scale_mixture(ScalarDistribution::two_point(eps, a)?)?;
                    for s in [0.0, 0.5, 1.0, 2.0, 3.0] {
                        let c = vs_upper_bound_check(&ch, s)?;
                        worst = worst.min(c.pairwise_bound - c.value);
                    }
                }
            }
            Ok(Check::holds(
                "V_s(Y|U) pairwise bound",
                worst >= -1e-12,
                format!("minimum residual {worst:.3e} (limit -1e-12)"),
            ))
        })(),
    ));
    out
}

fn mixture_sweep(cfg: &NumericsConfig) -> Vec<Check> {
    let rows = match fig3(&default_eps_grid(), 0.0, 2.0, cfg) {
        Ok(r) => r,
        Err(e) => return vec![Check::holds("two-point mixture sweep", false, format!("error: {e}"))],
    };
    let first = rows[0];
    // the grid increases in eps, so "decreasing as eps decreases" means
    // nondecreasing along the grid
    let rises: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[1].prop9_bound < w[0].prop9_bound)
        .map(|w| w[1].eps)
        .collect();
    let chi_min = rows.iter().map(|r| r.chi2_bound).fold(f64::INFINITY, f64::min);
    let below = rows
        .iter()
        .all(|r| r.mi_oracle <= r.prop9_bound && r.mi_oracle <= r.chi2_bound);
    vec![
        Check::holds(
            "prop9 monotone in eps over the grid",
            rises.is_empty(),
            if rises.is_empty() {
                "nondecreasing in eps at all 25 points".into()
            } else {
                format!(
                    "decreases in eps at eps = {:?}",
                    rises.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
                )
            },
        ),
        Check::holds(
            "prop9 smallest at smallest eps",
            rows.iter().all(|r| r.prop9_bound >= first.prop9_bound),
            format!(
                "prop9(1e-4) = {:.4e}, max over grid {:.4e}",
                first.prop9_bound,
                rows.iter().map(|r| r.prop9_bound).fold(0.0, f64::max)
            ),
        ),
        Check::holds(
            "min chi2 bound > prop9 at smallest eps",
            chi_min > first.prop9_bound,
            format!("min chi2 bound {chi_min:.4e} vs prop9(1e-4) {:.4e}", first.prop9_bound),
        ),
        Check::holds("I(U;Y) below both bounds", below, format!("{} grid points", rows.len())),
    ]
}
