//! Mutual-information bounds from the variance of the conditional density.
//!
//! Two scalar channels are supported, both with unit-variance additive
//! Gaussian noise `W`:
//!
//! * AWGN: `Y = X + W`.
//! * Gaussian scale mixture: `X = A sqrt(U)` with `A ~ N(0, 1)` and `U >= 0`,
//!   then `Y = X + W`.
//!
//! Either output may additionally be scaled, `Y -> a Y`. The conditioning
//! variable is `X` or, for scale mixtures, `U`. Every conditional law is then
//! a Gaussian mixture, so the marginal `f(y)` and `var(f(y | C))` are exact
//! finite sums when the law of `C` is discrete and one-dimensional integrals
//! otherwise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::distributions::ScalarDistribution;
use crate::error::{Error, Result};
use crate::moment_core::TwoMomentParams;
use crate::quadrature::{mc_expect, try_integrate, try_integrate_opts, Domain, NumericsConfig, PairSampler};
use crate::specfun::{kappa, ln_gamma};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn normal_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let d = y - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

#[derive(Debug, Clone)]
pub enum ChannelKind {
    Awgn { input: ScalarDistribution },
    ScaleMixture { mixing: ScalarDistribution },
}

/// A scalar channel with standard Gaussian noise.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    kind: ChannelKind,
    output_scale: f64,
}

/// Which variable the conditional density is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    GivenX,
    /// Only meaningful for scale mixtures.
    GivenU,
}

impl ChannelModel {
    pub fn awgn(input: ScalarDistribution) -> Result<Self> {
        if input.dimension() != 1 {
            return Err(Error::Unsupported("channel inputs must be scalar".into()));
        }
        Ok(Self {
            kind: ChannelKind::Awgn { input },
            output_scale: 1.0,
        })
    }

    pub fn scale_mixture(mixing: ScalarDistribution) -> Result<Self> {
        if mixing.dimension() != 1 || !mixing.is_nonnegative() {
            return Err(Error::InvalidParameter(
                "the mixing law must be a nonnegative scalar".into(),
            ));
        }
        Ok(Self {
            kind: ChannelKind::ScaleMixture { mixing },
            output_scale: 1.0,
        })
    }

    /// The channel used in the chi-square versus variance comparison:
    /// `U ~ (1-eps) delta_1 + eps delta_a` with `a = 1 + 1/sqrt(eps)`.
    pub fn two_point_mixture(eps: f64) -> Result<Self> {
        Self::scale_mixture(ScalarDistribution::two_point(eps, 1.0 + 1.0 / eps.sqrt())?)
    }

    /// Replaces `Y` by `a Y`.
    pub fn with_output_scale(mut self, a: f64) -> Result<Self> {
        if !(a.is_finite() && a != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "output scale must be finite and nonzero, got {a}"
            )));
        }
        self.output_scale = a;
        Ok(self)
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    fn law(&self, cond: Conditioning) -> Result<Law<'_>> {
        match (&self.kind, cond) {
            (ChannelKind::Awgn { input }, Conditioning::GivenX) => Law::of(input),
            (ChannelKind::ScaleMixture { mixing }, _) => Law::of(mixing),
            (ChannelKind::Awgn { .. }, Conditioning::GivenU) => {
                Err(Error::Unsupported("AWGN channels have no mixing variable".into()))
            }
        }
    }

    /// True when the conditioning variable is almost surely constant, in
    /// which case it is independent of `Y`.
    fn is_degenerate(&self, cond: Conditioning) -> Result<bool> {
        let law = self.law(cond)?;
        Ok(match (&self.kind, &law) {
            (ChannelKind::ScaleMixture { .. }, Law::Atoms(a)) if cond == Conditioning::GivenX => {
                // X = A sqrt(U) is constant only when U = 0
                a.len() == 1 && a[0].0 == 0.0
            }
            (_, Law::Atoms(a)) => a.len() == 1,
            _ => false,
        })
    }

    /// `f(y)` and `var(f(y | C))` of the unscaled output at `y`.
    fn pointwise(&self, law: &Law<'_>, cond: Conditioning, y: f64, cfg: &NumericsConfig) -> Result<(f64, f64)> {
        match (&self.kind, cond) {
            (ChannelKind::Awgn { .. }, _) => law.two_pass(|x| normal_pdf(y, x, 1.0), &[y], cfg),
            (ChannelKind::ScaleMixture { .. }, Conditioning::GivenU) => {
                law.two_pass(|u| normal_pdf(y, 0.0, 1.0 + u), &[], cfg)
            }
            (ChannelKind::ScaleMixture { .. }, Conditioning::GivenX) => {
                let f = law.expect(|u| Ok(normal_pdf(y, 0.0, 1.0 + u)), &[], cfg)?;
                let e2 = law.expect(|u| Ok(normal_pdf(y, 0.0, u + 0.5)), &[], cfg)? / (2.0 * PI.sqrt());
                Ok((f, (e2 - f * f).max(0.0)))
            }
        }
    }

    /// `f(y)` and `var(f(y | C))` of the scaled output.
    fn scaled_pointwise(&self, law: &Law<'_>, cond: Conditioning, y: f64, cfg: &NumericsConfig) -> Result<(f64, f64)> {
        let a = self.output_scale;
        let (f, v) = self.pointwise(law, cond, y / a, cfg)?;
        Ok((f / a.abs(), v / (a * a)))
    }

    fn y_breaks(&self, law: &Law<'_>) -> Vec<f64> {
        let mut b = vec![0.0];
        if let ChannelKind::Awgn { .. } = self.kind {
            b.extend(law.points().iter().map(|x| x * self.output_scale));
        }
        b
    }

    /// `∫ g(y, f(y), var(f(y|C))) dy` over the scaled output.
    fn integrate_y<G>(&self, cond: Conditioning, cfg: &NumericsConfig, mut g: G) -> Result<f64>
    where
        G: FnMut(f64, f64, f64) -> f64,
    {
        let law = self.law(cond)?;
        let breaks = self.y_breaks(&law);
        try_integrate(
            |y| {
                let (f, v) = self.scaled_pointwise(&law, cond, y, cfg)?;
                Ok(g(y, f, v))
            },
            Domain::FullLine,
            &breaks,
            cfg,
        )
        .map(|e| e.value)
    }

    /// Marginal density of the (scaled) output.
    pub fn marginal_density(&self, y: f64, cfg: &NumericsConfig) -> Result<f64> {
        let cond = self.natural_conditioning();
        let law = self.law(cond)?;
        Ok(self.scaled_pointwise(&law, cond, y, cfg)?.0)
    }

    /// `∫ f(y) dy`, which should be one.
    pub fn marginal_mass(&self, cfg: &NumericsConfig) -> Result<f64> {
        self.integrate_y(self.natural_conditioning(), cfg, |_, f, _| f)
    }

    fn natural_conditioning(&self) -> Conditioning {
        match self.kind {
            ChannelKind::Awgn { .. } => Conditioning::GivenX,
            ChannelKind::ScaleMixture { .. } => Conditioning::GivenU,
        }
    }

    /// Rényi entropy of the output, `(1/(1-r)) log ∫ f^r`.
    pub fn output_renyi_entropy(&self, r: f64, cfg: &NumericsConfig) -> Result<f64> {
        if !(r > 0.0 && r != 1.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Renyi order must be positive and differ from 1, got {r}"
            )));
        }
        let m = self.integrate_y(
            self.natural_conditioning(),
            cfg,
            |_, f, _| if f > 0.0 { f.powf(r) } else { 0.0 },
        )?;
        Ok(m.ln() / (1.0 - r))
    }

    /// Differential entropy of the output.
    pub fn output_entropy(&self, cfg: &NumericsConfig) -> Result<f64> {
        self.integrate_y(self.natural_conditioning(), cfg, |_, f, _| {
            if f > 0.0 {
                -f * f.ln()
            } else {
                0.0
            }
        })
    }
}

/// The law of the conditioning variable.
enum Law<'a> {
    /// `(value, weight)` with distinct values.
    Atoms(Vec<(f64, f64)>),
    Density {
        d: &'a ScalarDistribution,
        domain: Domain,
        breaks: Vec<f64>,
    },
}

fn inner(cfg: &NumericsConfig) -> NumericsConfig {
    NumericsConfig {
        rel_tol: cfg.rel_tol * 0.1,
        abs_tol: cfg.abs_tol * 1e-3,
        ..*cfg
    }
}

impl<'a> Law<'a> {
    fn of(d: &'a ScalarDistribution) -> Result<Self> {
        if let Some(atoms) = d.atoms() {
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
            for (x, w) in atoms {
                match merged.iter_mut().find(|(y, _)| *y == x) {
                    Some(e) => e.1 += w,
                    None => merged.push((x, w)),
                }
            }
            return Ok(Law::Atoms(merged));
        }
        let (domain, breaks) = d
            .density_domain()
            .ok_or_else(|| Error::Unsupported("law has neither atoms nor a density".into()))?;
        Ok(Law::Density { d, domain, breaks })
    }

    fn points(&self) -> Vec<f64> {
        match self {
            Law::Atoms(a) => a.iter().map(|p| p.0).collect(),
            Law::Density { breaks, .. } => breaks.clone(),
        }
    }

    /// `E g(C)`.
    fn expect<G>(&self, mut g: G, extra_breaks: &[f64], cfg: &NumericsConfig) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        match self {
            Law::Atoms(a) => {
                let mut s = 0.0;
                for &(x, w) in a {
                    s += w * g(x)?;
                }
                Ok(s)
            }
            Law::Density { d, domain, breaks } => {
                let mut b = breaks.clone();
                b.extend(extra_breaks.iter().filter(|x| domain.contains(**x)));
                try_integrate_opts(
                    |c| {
                        let p = d.density(c)?;
                        Ok(if p > 0.0 { p * g(c)? } else { 0.0 })
                    },
                    *domain,
                    &b,
                    &inner(cfg),
                    false,
                )
                .map(|e| e.value)
            }
        }
    }

    /// `(E g(C), E (g(C) - E g(C))^2)` without cancellation.
    fn two_pass<G>(&self, g: G, extra_breaks: &[f64], cfg: &NumericsConfig) -> Result<(f64, f64)>
    where
        G: Fn(f64) -> f64,
    {
        let m = self.expect(|c| Ok(g(c)), extra_breaks, cfg)?;
        let v = self.expect(|c| Ok((g(c) - m).powi(2)), extra_breaks, cfg)?;
        Ok((m, v))
    }

    /// `E g(C1, C2)` over an independent pair.
    fn expect_pair<G>(&self, g: G, cfg: &NumericsConfig) -> Result<f64>
    where
        G: Fn(f64, f64) -> Result<f64>,
    {
        self.expect(|c1| self.expect(|c2| g(c1, c2), &[c1], &inner(cfg)), &[], cfg)
    }
}

/// How a [`VsValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VsMethod {
    /// Closed-form kernel expectation, exact for discrete laws.
    ClosedForm,
    /// Direct quadrature of `∫ |y|^s var(f(y|C)) dy`.
    Quadrature,
    /// Kernel expectation by Monte Carlo over independent pairs.
    MonteCarlo,
}

/// Requested evaluation route for [`v_s_via`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsRoute {
    /// Closed form when available, then Monte Carlo, then quadrature.
    Auto,
    /// Direct integral of the conditional variance.
    Direct,
    /// `E[K_s(C, C) - K_s(C1, C2)]`.
    Kernel,
}

/// `V_s(Y | C) = ∫ |y|^s var(f(y | C)) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VsValue {
    pub s: f64,
    pub value: f64,
    pub method: VsMethod,
    pub standard_error: Option<f64>,
}

/// `E|W + m|^s` for standard normal `W`.
pub fn shifted_abs_moment(m: f64, s: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("need s >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    try_integrate_opts(
        |w| Ok((w + m).abs().powf(s) * normal_pdf(w, 0.0, 1.0)),
        Domain::FullLine,
        &[-m, 0.0],
        &inner(cfg),
        false,
    )
    .map(|e| e.value)
}

/// Expected likelihood kernel `K_s(x1, x2) = ∫ |y|^s f(y|x1) f(y|x2) dy` of
/// an AWGN channel, including the output scale.
pub fn kernel_ks(ch: &ChannelModel, x1: f64, x2: f64, s: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !matches!(ch.kind, ChannelKind::Awgn { .. }) {
        return Err(Error::Unsupported(
            "the input-level kernel is defined for AWGN channels".into(),
        ));
    }
    let base = 2f64.powf(-0.5 * (1.0 + s))
        * shifted_abs_moment((x1 + x2) * FRAC_1_SQRT_2, s, cfg)?
        * normal_pdf((x1 - x2) * FRAC_1_SQRT_2, 0.0, 1.0);
    Ok(ch.output_scale.abs().powf(s - 1.0) * base)
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need s >= 0, got {s}")))
    }
}

/// `V_s(Y | C)` by the most accurate available route.
pub fn v_s(ch: &ChannelModel, s: f64, cond: Conditioning, cfg: &NumericsConfig) -> Result<VsValue> {
    v_s_via(ch, s, cond, VsRoute::Auto, cfg)
}

/// `V_s(Y | C)` by a chosen route.
pub fn v_s_via(ch: &ChannelModel, s: f64, cond: Conditioning, route: VsRoute, cfg: &NumericsConfig) -> Result<VsValue> {
    check_s(s)?;
    let law = ch.law(cond)?;
    if ch.is_degenerate(cond)? {
        return Ok(VsValue {
            s,
            value: 0.0,
            method: VsMethod::ClosedForm,
            standard_error: None,
        });
    }
    let direct = || -> Result<VsValue> {
        let value = ch.integrate_y(cond, cfg, |y, _, v| if v > 0.0 { y.abs().powf(s) * v } else { 0.0 })?;
        Ok(VsValue {
            s,
            value,
            method: VsMethod::Quadrature,
            standard_error: None,
        })
    };
    match route {
        VsRoute::Direct => direct(),
        VsRoute::Kernel => kernel_vs(ch, &law, s, cond, cfg),
        VsRoute::Auto => match (&ch.kind, &law) {
            (ChannelKind::Awgn { .. }, Law::Density { .. }) if s > 0.0 => direct(),
            (_, Law::Density { d, .. }) if d.sampler().is_err() && s > 0.0 => direct(),
            _ => kernel_vs(ch, &law, s, cond, cfg),
        },
    }
}

fn kernel_vs(ch: &ChannelModel, law: &Law<'_>, s: f64, cond: Conditioning, cfg: &NumericsConfig) -> Result<VsValue> {
    let scale = ch.output_scale.abs().powf(s - 1.0);
    let done = |value: f64, method, se: Option<f64>| VsValue {
        s,
        value: scale * value.max(0.0),
        method,
        standard_error: se.map(|e| scale * e),
    };
    match &ch.kind {
        ChannelKind::ScaleMixture { .. } => {
            let c = (ln_gamma(0.5 * (1.0 + s))? - (2.0 * PI).ln()).exp();
            let first = |u: f64| match cond {
                Conditioning::GivenX => (1.0 + 2.0 * u).powf(0.5 * s),
                Conditioning::GivenU => (1.0 + u).powf(0.5 * (s - 1.0)),
            };
            let cross = |u1: f64, u2: f64| {
                ((1.0 + u1) * (1.0 + u2)).powf(0.5 * s) / (1.0 + 0.5 * (u1 + u2)).powf(0.5 * (s + 1.0))
            };
            match law {
                Law::Atoms(a) => {
                    let mut v = 0.0;
                    for &(u1, w1) in a {
                        let mut inner_sum = 0.0;
                        for &(u2, w2) in a {
                            inner_sum += w2 * (first(u1) - cross(u1, u2));
                        }
                        v += w1 * inner_sum;
                    }
                    Ok(done(c * v, VsMethod::ClosedForm, None))
                }
                Law::Density { d, .. } => {
                    let sampler = PairSampler(d.sampler()?);
                    let est = mc_expect(|&(u1, u2): &(f64, f64)| first(u1) - cross(u1, u2), &sampler, cfg)?;
                    Ok(done(c * est.mean, VsMethod::MonteCarlo, Some(c * est.std_error)))
                }
            }
        }
        ChannelKind::Awgn { .. } => {
            let unit = ChannelModel {
                output_scale: 1.0,
                ..ch.clone()
            };
            if s == 0.0 {
                let c = 0.5 / PI.sqrt();
                let g = |x1: f64, x2: f64| 1.0 - (-0.25 * (x1 - x2).powi(2)).exp();
                // 1 - E exp(-(X1-X2)^2/4) as the mean of a nonnegative
                // integrand, so small values keep their relative accuracy
                return Ok(done(
                    c * law.expect_pair(|a, b| Ok(g(a, b)), cfg)?,
                    VsMethod::ClosedForm,
                    None,
                ));
            }
            let k = |a: f64, b: f64| kernel_ks(&unit, a, b, s, cfg);
            match law {
                Law::Atoms(_) => {
                    let v = law.expect_pair(|a, b| Ok(k(a, a)? - k(a, b)?), cfg)?;
                    Ok(done(v, VsMethod::ClosedForm, None))
                }
                Law::Density { d, .. } => {
                    let sampler = PairSampler(d.sampler()?);
                    let est = mc_expect(
                        |&(a, b): &(f64, f64)| match (k(a, a), k(a, b)) {
                            (Ok(x), Ok(y)) => x - y,
                            _ => f64::NAN,
                        },
                        &sampler,
                        cfg,
                    )?;
                    if !est.mean.is_finite() {
                        return Err(Error::NonFinite(est.mean));
                    }
                    Ok(done(est.mean, VsMethod::MonteCarlo, Some(est.std_error)))
                }
            }
        }
    }
}

/// `chi^2(P_{C,Y}, P_C x P_Y) = ∫ var(f(y|C)) / f(y) dy`.
pub fn chi2(ch: &ChannelModel, cond: Conditioning, cfg: &NumericsConfig) -> Result<f64> {
    if ch.is_degenerate(cond)? {
        return Ok(0.0);
    }
    ch.integrate_y(cond, cfg, |_, f, v| if f > 0.0 && v > 0.0 { v / f } else { 0.0 })
}

/// `I(C; Y) <= log(1 + chi^2)`.
pub fn chi2_mi_bound(ch: &ChannelModel, cond: Conditioning, cfg: &NumericsConfig) -> Result<f64> {
    Ok(chi2(ch, cond, cfg)?.ln_1p())
}

/// `kappa(t) ∫ f(y)^(1-2t) var(f(y|C))^t dy` for `0 < t <= 1`.
pub fn prop7_bound(ch: &ChannelModel, cond: Conditioning, t: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < t <= 1, got t={t}")));
    }
    if ch.is_degenerate(cond)? {
        return Ok(0.0);
    }
    let integral = ch.integrate_y(cond, cfg, |_, f, v| {
        if f > 0.0 && v > 0.0 {
            let l = (1.0 - 2.0 * t) * f.ln() + t * v.ln();
            if l < -745.0 {
                0.0
            } else {
                l.exp()
            }
        } else {
            0.0
        }
    })?;
    Ok(kappa(t)? * integral)
}

/// `kappa(t) (e^{h_r(Y)} V_0(Y|C))^t` with `t = (1-r)/(2-r)`.
pub fn prop8_bound(ch: &ChannelModel, cond: Conditioning, r: f64, cfg: &NumericsConfig) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < r < 1, got r={r}")));
    }
    if ch.is_degenerate(cond)? {
        return Ok(0.0);
    }
    let t = (1.0 - r) / (2.0 - r);
    let h = ch.output_renyi_entropy(r, cfg)?;
    let v0 = v_s(ch, 0.0, cond, cfg)?.value;
    Ok(kappa(t)? * (t * (h + v0.ln())).exp())
}

/// `C(lambda) sqrt(omega V_p^lambda V_q^(1-lambda) / (q - p))` with
/// `lambda = (q-1)/(q-p)`, `omega = 2` for the real line and
/// `C(lambda) = kappa(1/2) sqrt(pi lambda^-lambda (1-lambda)^-(1-lambda) / sin(pi lambda))`.
pub fn prop9_bound(ch: &ChannelModel, cond: Conditioning, p: f64, q: f64, cfg: &NumericsConfig) -> Result<f64> {
    // p < 1 < q is the two-moment condition at order 1/2
    let params = TwoMomentParams::new(0.5, p, q)?;
    if p <= -1.0 {
        return Err(Error::MomentDiverges(p));
    }
    if ch.is_degenerate(cond)? {
        return Ok(0.0);
    }
    let l = params.lambda();
    let c = kappa(0.5)? * (PI * (-l * l.ln() - (1.0 - l) * (1.0 - l).ln()).exp() / (PI * l).sin()).sqrt();
    let vp = v_s(ch, p, cond, cfg)?.value;
    let vq = v_s(ch, q, cond, cfg)?.value;
    Ok(c * (2.0 * vp.powf(l) * vq.powf(1.0 - l) / (q - p)).sqrt())
}

/// `C(lambda)` of [`prop9_bound`].
pub fn prop9_constant(p: f64, q: f64) -> Result<f64> {
    let l = TwoMomentParams::new(0.5, p, q)?.lambda();
    Ok(kappa(0.5)? * (PI * (-l * l.ln() - (1.0 - l) * (1.0 - l).ln()).exp() / (PI * l).sin()).sqrt())
}

/// `I(C; Y) = h(Y) - h(Y | C)`.
pub fn mi_oracle(ch: &ChannelModel, cond: Conditioning, cfg: &NumericsConfig) -> Result<f64> {
    if ch.is_degenerate(cond)? {
        return Ok(0.0);
    }
    let law = ch.law(cond)?;
    let ln_a = ch.output_scale.abs().ln();
    let h_cond = match (&ch.kind, cond) {
        (ChannelKind::ScaleMixture { .. }, Conditioning::GivenU) => {
            law.expect(|u| Ok(0.5 * (1.0 + u).ln()), &[], cfg)? + LN_SQRT_2PI + 0.5
        }
        _ => LN_SQRT_2PI + 0.5,
    } + ln_a;
    Ok(ch.output_entropy(cfg)? - h_cond)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VsBoundCheck {
    pub value: f64,
    pub bound: f64,
    /// `bound - value`.
    pub residual: f64,
    /// `c E[(1+U1)^((s-1)/2) 1{U1 != U2}]`, which always dominates `value`.
    pub pairwise_bound: f64,
}

/// `V_s(Y|U) <= Gamma((1+s)/2)/(2 pi) P(U1 != U2) E(1+U)^((s-1)/2)` for a
/// discrete mixing law, both sides by exact sums.
pub fn vs_upper_bound_check(ch: &ChannelModel, s: f64) -> Result<VsBoundCheck> {
    check_s(s)?;
    let ChannelKind::ScaleMixture { mixing } = &ch.kind else {
        return Err(Error::Unsupported("the bound concerns scale mixtures".into()));
    };
    let Law::Atoms(atoms) = Law::of(mixing)? else {
        return Err(Error::Unsupported("the bound check needs a discrete mixing law".into()));
    };
    let cfg = NumericsConfig::default();
    let value = v_s_via(ch, s, Conditioning::GivenU, VsRoute::Kernel, &cfg)?.value;
    let differ = 1.0 - atoms.iter().map(|(_, w)| w * w).sum::<f64>();
    let moment: f64 = atoms.iter().map(|&(u, w)| w * (1.0 + u).powf(0.5 * (s - 1.0))).sum();
    let c = (ln_gamma(0.5 * (1.0 + s))? - (2.0 * PI).ln()).exp();
    let pairwise: f64 = atoms
        .iter()
        .map(|&(u, w)| w * (1.0 - w) * (1.0 + u).powf(0.5 * (s - 1.0)))
        .sum();
    let scale = ch.output_scale.abs().powf(s - 1.0) * c;
    Ok(VsBoundCheck {
        value,
        bound: scale * differ * moment,
        residual: scale * differ * moment - value,
        pairwise_bound: scale * pairwise,
    })
}

/// `(1 - E exp(-(X1-X2)^2/4), eps^2 + 2 P(|X - x0| >= eps))`: the first
/// entry is `2 sqrt(pi) V_0(Y|X)` for AWGN and never exceeds the second.
pub fn small_variation_bound(
    input: &ScalarDistribution,
    x0: f64,
    eps: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("need eps > 0, got {eps}")));
    }
    let law = Law::of(input)?;
    let lhs = law.expect_pair(|a, b| Ok(1.0 - (-0.25 * (a - b).powi(2)).exp()), cfg)?;
    let tail = match &law {
        Law::Atoms(a) => a.iter().filter(|(x, _)| (x - x0).abs() >= eps).map(|(_, w)| w).sum(),
        Law::Density { .. } => law.expect(
            |x| Ok(if (x - x0).abs() >= eps { 1.0 } else { 0.0 }),
            &[x0 - eps, x0 + eps],
            cfg,
        )?,
    };
    Ok((lhs, eps * eps + 2.0 * tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_with_breaks;
    use std::f64::consts::SQRT_2;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    fn normal_input(var: f64) -> ScalarDistribution {
        ScalarDistribution::generic_pdf(move |x| normal_pdf(x, 0.0, var), Domain::FullLine).unwrap()
    }

    #[test]
    fn kernel_values() {
        let ch = ChannelModel::awgn(ScalarDistribution::point_mass(0.0).unwrap()).unwrap();
        let c = cfg();
        let k = kernel_ks(&ch, 0.7, 0.7, 0.0, &c).unwrap();
        assert!((k - 0.5 / PI.sqrt()).abs() < 1e-15);
        let k = kernel_ks(&ch, 1.0, -1.0, 0.0, &c).unwrap();
        assert!((k - FRAC_1_SQRT_2 * normal_pdf(SQRT_2, 0.0, 1.0)).abs() < 1e-15);
        for (x1, x2, s) in [(1.0, -1.0, 0.0), (0.3, 1.2, 2.0), (-0.5, 2.0, 1.5)] {
            let direct = integrate_with_breaks(
                |y| y.abs().powf(s) * normal_pdf(y, x1, 1.0) * normal_pdf(y, x2, 1.0),
                Domain::FullLine,
                &[0.0],
                &c,
            )
            .unwrap()
            .value;
            let k = kernel_ks(&ch, x1, x2, s, &c).unwrap();
            assert!((k - direct).abs() < 1e-10, "{x1} {x2} {s}: {k} vs {direct}");
        }
        for m in [0.0, 0.5, 2.0] {
            assert!((shifted_abs_moment(m, 2.0, &c).unwrap() - (1.0 + m * m)).abs() < 1e-10);
        }
    }

    #[test]
    fn gram_matrix_is_psd() {
        let ch = ChannelModel::awgn(ScalarDistribution::point_mass(0.0).unwrap()).unwrap();
        let xs = [-1.0, 0.0, 1.0];
        let g: Vec<Vec<f64>> = xs
            .iter()
            .map(|&a| xs.iter().map(|&b| kernel_ks(&ch, a, b, 0.0, &cfg()).unwrap()).collect())
            .collect();
        // Sylvester: leading principal minors of a symmetric 3x3 matrix
        let m1 = g[0][0];
        let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let m3 = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        assert!(m1 > 0.0 && m2 > 0.0 && m3 > -1e-12);
    }

    #[test]
    fn degenerate_conditioning_gives_zero() {
        let c = cfg();
        let ch = ChannelModel::awgn(ScalarDistribution::point_mass(1.5).unwrap()).unwrap();
        let x = Conditioning::GivenX;
        for s in [0.0, 1.0, 2.0] {
            assert_eq!(v_s(&ch, s, x, &c).unwrap().value, 0.0);
        }
        assert_eq!(chi2_mi_bound(&ch, x, &c).unwrap(), 0.0);
        assert_eq!(prop7_bound(&ch, x, 0.5, &c).unwrap(), 0.0);
        assert_eq!(prop8_bound(&ch, x, 0.5, &c).unwrap(), 0.0);
        assert_eq!(prop9_bound(&ch, x, 0.0, 2.0, &c).unwrap(), 0.0);
        assert_eq!(mi_oracle(&ch, x, &c).unwrap(), 0.0);

        let sm = ChannelModel::scale_mixture(ScalarDistribution::point_mass(2.0).unwrap()).unwrap();
        assert_eq!(v_s(&sm, 2.0, Conditioning::GivenU, &c).unwrap().value, 0.0);
        let kernel = v_s_via(&sm, 2.0, Conditioning::GivenU, VsRoute::Kernel, &c).unwrap();
        assert!(kernel.value.abs() < 1e-15);
        assert!(matches!(
            v_s(&ch, 0.0, Conditioning::GivenU, &c),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn constant_mixing_matches_gaussian_input() {
        let c = cfg();
        for var in [0.5, 1.0, 3.0] {
            let sm = ChannelModel::scale_mixture(ScalarDistribution::point_mass(var).unwrap()).unwrap();
            let closed = v_s(&sm, 0.0, Conditioning::GivenX, &c).unwrap();
            assert_eq!(closed.method, VsMethod::ClosedForm);
            let expect = 0.5 / PI.sqrt() * (1.0 - (1.0 + var).powf(-0.5));
            assert!((closed.value - expect).abs() < 1e-12);
            let awgn = ChannelModel::awgn(normal_input(var)).unwrap();
            let a = v_s(&awgn, 0.0, Conditioning::GivenX, &c).unwrap();
            assert!((a.value - expect).abs() < 1e-9, "{} vs {expect}", a.value);
        }
    }

    #[test]
    fn direct_and_kernel_routes_agree() {
        let c = cfg();
        let cases = [
            (
                ChannelModel::scale_mixture(ScalarDistribution::two_point(0.3, 4.0).unwrap()).unwrap(),
                Conditioning::GivenU,
            ),
            (
                ChannelModel::scale_mixture(ScalarDistribution::two_point(0.3, 4.0).unwrap()).unwrap(),
                Conditioning::GivenX,
            ),
            (
                ChannelModel::awgn(ScalarDistribution::two_point(0.4, 3.0).unwrap()).unwrap(),
                Conditioning::GivenX,
            ),
        ];
        for (ch, cond) in &cases {
            for s in [0.0, 1.0, 2.0, 0.5] {
                let d = v_s_via(ch, s, *cond, VsRoute::Direct, &c).unwrap().value;
                let k = v_s_via(ch, s, *cond, VsRoute::Kernel, &c).unwrap().value;
                assert!((d - k).abs() < 1e-9 * (1.0 + k), "{cond:?} s={s}: {d} vs {k}");
            }
        }
    }

    #[test]
    fn monte_carlo_kernel_within_standard_errors() {
        let c = cfg().with_mc_samples(40_000);
        let sm = ChannelModel::scale_mixture(ScalarDistribution::lognormal(0.0, 0.5).unwrap()).unwrap();
        let mc = v_s(&sm, 2.0, Conditioning::GivenU, &c).unwrap();
        assert_eq!(mc.method, VsMethod::MonteCarlo);
        let d = v_s_via(&sm, 2.0, Conditioning::GivenU, VsRoute::Direct, &c)
            .unwrap()
            .value;
        assert!(
            (mc.value - d).abs() <= 4.0 * mc.standard_error.unwrap(),
            "{mc:?} vs {d}"
        );
    }

    #[test]
    fn scaling_law() {
        let c = cfg();
        let base = ChannelModel::awgn(ScalarDistribution::two_point(0.4, 3.0).unwrap()).unwrap();
        for s in [0.0, 2.0] {
            let v = v_s_via(&base, s, Conditioning::GivenX, VsRoute::Direct, &c)
                .unwrap()
                .value;
            for a in [0.5, 2.0, 3.0] {
                let ch = base.clone().with_output_scale(a).unwrap();
                let va = v_s_via(&ch, s, Conditioning::GivenX, VsRoute::Direct, &c)
                    .unwrap()
                    .value;
                let expect = a.powf(s - 1.0) * v;
                assert!(
                    (va - expect).abs() < 1e-8 * (1.0 + expect),
                    "a={a} s={s}: {va} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn marginal_is_normalized() {
        let c = cfg();
        let chans = [
            ChannelModel::awgn(normal_input(2.0)).unwrap(),
            ChannelModel::awgn(ScalarDistribution::two_point(0.2, 5.0).unwrap()).unwrap(),
            ChannelModel::two_point_mixture(1e-3).unwrap(),
            ChannelModel::scale_mixture(ScalarDistribution::lognormal(0.0, 1.0).unwrap())
                .unwrap()
                .with_output_scale(-2.0)
                .unwrap(),
        ];
        for ch in &chans {
            assert!((ch.marginal_mass(&c).unwrap() - 1.0).abs() < 1e-8, "{ch:?}");
        }
    }

    #[test]
    fn gaussian_channel_mutual_information() {
        let c = cfg();
        for var in [0.5, 1.0, 4.0] {
            let ch = ChannelModel::awgn(normal_input(var)).unwrap();
            let i = mi_oracle(&ch, Conditioning::GivenX, &c).unwrap();
            assert!((i - 0.5 * (1.0 + var).ln()).abs() < 1e-6, "{var}: {i}");
        }
    }

    #[test]
    fn bounds_dominate_mutual_information() {
        let c = cfg();
        let ch = ChannelModel::two_point_mixture(0.1).unwrap();
        let u = Conditioning::GivenU;
        let i = mi_oracle(&ch, u, &c).unwrap();
        assert!(i > 0.0);
        let chi = chi2(&ch, u, &c).unwrap();
        assert!((prop7_bound(&ch, u, 1.0, &c).unwrap() - chi).abs() < 1e-9 * chi);
        for t in [0.25, 0.5, 0.75, 1.0] {
            assert!(prop7_bound(&ch, u, t, &c).unwrap() >= i);
        }
        for r in [0.2, 0.5, 0.8] {
            assert!(prop8_bound(&ch, u, r, &c).unwrap() >= i);
        }
        assert!(prop9_bound(&ch, u, 0.0, 2.0, &c).unwrap() >= i);
        assert!(chi2_mi_bound(&ch, u, &c).unwrap() >= i);
        // data processing
        assert!(mi_oracle(&ch, Conditioning::GivenX, &c).unwrap() >= i - 1e-9);
    }

    #[test]
    fn prop7_half_matches_square_root_integral() {
        let c = cfg();
        let ch = ChannelModel::two_point_mixture(0.05).unwrap();
        let direct = ch.integrate_y(Conditioning::GivenU, &c, |_, _, v| v.sqrt()).unwrap();
        let b = prop7_bound(&ch, Conditioning::GivenU, 0.5, &c).unwrap();
        assert!((b - kappa(0.5).unwrap() * direct).abs() < 1e-12);
    }

    #[test]
    fn prop9_constant_at_half() {
        let c = prop9_constant(0.0, 2.0).unwrap();
        assert!((c - kappa(0.5).unwrap() * (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(matches!(
            prop9_constant(1.5, 2.0),
            Err(Error::InvalidMomentOrder { .. })
        ));
    }

    #[test]
    fn simple_vs_bound_can_fail_but_pairwise_bound_holds() {
        let ch = ChannelModel::scale_mixture(ScalarDistribution::two_point(0.1, 11.0).unwrap()).unwrap();
        let chk = vs_upper_bound_check(&ch, 3.0).unwrap();
        assert!(chk.residual < -1e-2, "{chk:?}");
        assert!(chk.pairwise_bound >= chk.value, "{chk:?}");
    }

    #[test]
    fn vs_bound_examples() {
        let u = |eps, a| ChannelModel::scale_mixture(ScalarDistribution::two_point(eps, a).unwrap()).unwrap();
        let chk = vs_upper_bound_check(&u(0.5, 3.0), 0.0).unwrap();
        assert!(chk.residual >= -1e-12 && chk.value > 0.0, "{chk:?}");
        let chk = vs_upper_bound_check(&u(0.1, 11.0), 2.0).unwrap();
        assert!(chk.residual >= -1e-12, "{chk:?}");
        let pm = ChannelModel::scale_mixture(ScalarDistribution::point_mass(2.0).unwrap()).unwrap();
        let chk = vs_upper_bound_check(&pm, 1.0).unwrap();
        assert_eq!(chk.bound, 0.0);
        assert!(chk.value.abs() < 1e-15);
    }

    #[test]
    fn small_variation_examples() {
        let c = cfg();
        let near = ScalarDistribution::two_point(0.05, 1.2).unwrap();
        for eps in [0.1, 0.3, 1.0] {
            let (lhs, rhs) = small_variation_bound(&near, 1.0, eps, &c).unwrap();
            assert!(lhs <= rhs, "{eps}: {lhs} > {rhs}");
        }
        let (lhs, rhs) = small_variation_bound(&normal_input(0.01), 0.0, 0.3, &c).unwrap();
        assert!(lhs <= rhs, "{lhs} > {rhs}");
    }
}
