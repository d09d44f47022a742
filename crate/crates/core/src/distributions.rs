//! Distribution families with closed-form log-moments and Rényi entropies.
//!
//! `log_moment(s)` always refers to `log E|X|^s` and returns `+inf` outside
//! the region where the moment is finite. The Gaussian magnitude family
//! stands for a standard Gaussian vector `Y ~ N(0, I_n)`: moments are those
//! of `||Y||`, while the entropies are those of the vector `Y` itself.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, LogNormal as LogNormalDist};

use crate::error::{Error, Result};
use crate::moment_core::{Support, TwoMomentParams};
use crate::quadrature::{try_integrate, Domain, NumericsConfig, Sampler};
use crate::specfun::{digamma, ln_gamma, trigamma};

/// Tolerance on the normalization of a user-supplied density.
pub const PDF_NORMALIZATION_TOL: f64 = 1e-6;

type PdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density known only through point evaluations.
#[derive(Clone)]
pub struct GenericPdf {
    f: PdfFn,
    domain: Domain,
    breaks: Vec<f64>,
}

impl fmt::Debug for GenericPdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericPdf")
            .field("domain", &self.domain)
            .field("breaks", &self.breaks)
            .finish_non_exhaustive()
    }
}

impl GenericPdf {
    pub fn eval(&self, x: f64) -> f64 {
        if self.domain.contains(x) {
            (self.f)(x)
        } else {
            0.0
        }
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Breakpoints plus the origin when it lies inside the domain, since
    /// `|x|^s` and `log|x|` are singular or kinked there.
    fn breaks_with_origin(&self) -> Vec<f64> {
        let mut b = self.breaks.clone();
        if self.domain.contains(0.0) {
            b.push(0.0);
        }
        b
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    LogNormal {
        mu: f64,
        sigma2: f64,
    },
    GaussianMagnitude {
        n: u32,
    },
    /// Atoms `1` and `a` with weights `1 - eps` and `eps`.
    TwoPoint {
        eps: f64,
        a: f64,
    },
    PointMass {
        c: f64,
    },
    Generic(GenericPdf),
}

/// An immutable, validated distribution descriptor.
#[derive(Debug, Clone)]
pub struct ScalarDistribution {
    family: Family,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl ScalarDistribution {
    pub fn lognormal(mu: f64, sigma2: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(invalid(format!(
                "lognormal needs finite mu and sigma2 > 0, got ({mu}, {sigma2})"
            )));
        }
        Ok(Self {
            family: Family::LogNormal { mu, sigma2 },
        })
    }

    pub fn gaussian_magnitude(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("gaussian magnitude needs n >= 1".into()));
        }
        Ok(Self {
            family: Family::GaussianMagnitude { n },
        })
    }

    pub fn two_point(eps: f64, a: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) || !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!(
                "two-point law needs 0 < eps < 1 and a > 0, got ({eps}, {a})"
            )));
        }
        Ok(Self {
            family: Family::TwoPoint { eps, a },
        })
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid(format!("point mass location must be finite, got {c}")));
        }
        Ok(Self {
            family: Family::PointMass { c },
        })
    }

    /// A density given by `f` on `domain`; its normalization is checked by
    /// quadrature.
    pub fn generic_pdf<F>(f: F, domain: Domain) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::generic_pdf_with_breaks(f, domain, Vec::new())
    }

    /// As [`ScalarDistribution::generic_pdf`], with quadrature breakpoints
    /// at peaks or kinks of `f`.
    pub fn generic_pdf_with_breaks<F>(f: F, domain: Domain, breaks: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let pdf = GenericPdf {
            f: Arc::new(f),
            domain,
            breaks,
        };
        let cfg = NumericsConfig::default();
        let mass = try_integrate(
            |x| {
                let v = pdf.eval(x);
                if v >= 0.0 {
                    Ok(v)
                } else {
                    Err(invalid(format!("density is negative at x={x}")))
                }
            },
            domain,
            &pdf.breaks,
            &cfg,
        )?;
        if (mass.value - 1.0).abs() > PDF_NORMALIZATION_TOL {
            return Err(invalid(format!("density integrates to {} instead of 1", mass.value)));
        }
        Ok(Self {
            family: Family::Generic(pdf),
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Atoms `(value, weight)` of a discrete law.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self.family {
            Family::TwoPoint { eps, a } => Some(vec![(1.0, 1.0 - eps), (a, eps)]),
            Family::PointMass { c } => Some(vec![(c, 1.0)]),
            _ => None,
        }
    }

    /// Integration domain and breakpoints of a law with a density.
    pub(crate) fn density_domain(&self) -> Option<(Domain, Vec<f64>)> {
        match &self.family {
            Family::LogNormal { mu, .. } => Some((Domain::HalfLine { a: 0.0 }, vec![mu.exp()])),
            Family::GaussianMagnitude { n } => {
                Some((Domain::HalfLine { a: 0.0 }, vec![(*n as f64 - 1.0).max(1.0).sqrt()]))
            }
            Family::Generic(g) => Some((g.domain, g.breaks.clone())),
            _ => None,
        }
    }

    pub fn has_density(&self) -> bool {
        self.atoms().is_none()
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.family {
            Family::LogNormal { .. } | Family::GaussianMagnitude { .. } | Family::TwoPoint { .. } => true,
            Family::PointMass { c } => *c >= 0.0,
            Family::Generic(g) => match g.domain {
                Domain::Finite { a, .. } | Domain::HalfLine { a } => a >= 0.0,
                Domain::FullLine => false,
            },
        }
    }

    /// Dimension of the random vector whose entropy this law describes.
    pub fn dimension(&self) -> u32 {
        match self.family {
            Family::GaussianMagnitude { n } => n,
            _ => 1,
        }
    }

    /// Support used by the entropy bounds: `R_+` for positive laws, `R` for
    /// densities on the line and `R^n` for the Gaussian vector.
    pub fn natural_support(&self) -> Option<Support> {
        match &self.family {
            Family::LogNormal { .. } => Some(Support::PositiveHalfLine),
            Family::GaussianMagnitude { n } => Some(Support::EuclideanN { n: *n }),
            Family::Generic(_) if self.is_nonnegative() => Some(Support::PositiveHalfLine),
            Family::Generic(_) => Some(Support::RealLine),
            _ => None,
        }
    }

    /// Density at `x` (for the Gaussian magnitude, the chi density of `||Y||`).
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.ln_density(x)?.exp())
    }

    pub fn ln_density(&self, x: f64) -> Result<f64> {
        match &self.family {
            Family::LogNormal { mu, sigma2 } => {
                if x <= 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                let l = x.ln();
                Ok(-(l - mu).powi(2) / (2.0 * sigma2) - l - 0.5 * (2.0 * PI * sigma2).ln())
            }
            Family::GaussianMagnitude { n } => {
                if x < 0.0 || (x == 0.0 && *n > 1) {
                    return Ok(f64::NEG_INFINITY);
                }
                let h = 0.5 * *n as f64;
                let lx = if *n == 1 { 0.0 } else { (*n as f64 - 1.0) * x.ln() };
                Ok(lx - 0.5 * x * x - (h - 1.0) * 2f64.ln() - ln_gamma(h)?)
            }
            Family::Generic(g) => Ok(g.eval(x).ln()),
            _ => Err(Error::Unsupported("discrete law has no density".into())),
        }
    }

    /// `log E|X|^s` with the default numerics.
    pub fn log_moment(&self, s: f64) -> Result<f64> {
        self.log_moment_with(s, &NumericsConfig::default())
    }

    /// `log E|X|^s`, or `+inf` when the moment is infinite.
    pub fn log_moment_with(&self, s: f64, cfg: &NumericsConfig) -> Result<f64> {
        if !s.is_finite() {
            return Err(invalid(format!("moment order must be finite, got {s}")));
        }
        match &self.family {
            Family::LogNormal { mu, sigma2 } => Ok(mu * s + 0.5 * sigma2 * s * s),
            Family::GaussianMagnitude { n } => {
                let n = *n as f64;
                if s <= -n {
                    return Ok(f64::INFINITY);
                }
                Ok(0.5 * s * 2f64.ln() + ln_gamma(0.5 * (n + s))? - ln_gamma(0.5 * n)?)
            }
            Family::TwoPoint { eps, a } => Ok(log_add((1.0 - eps).ln(), eps.ln() + s * a.ln())),
            Family::PointMass { c } => {
                if *c != 0.0 {
                    Ok(s * c.abs().ln())
                } else if s > 0.0 {
                    Ok(f64::NEG_INFINITY)
                } else if s == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Family::Generic(g) => {
                let integrand = |x: f64| {
                    let v = g.eval(x);
                    Ok(if v == 0.0 { 0.0 } else { v * x.abs().powf(s) })
                };
                match try_integrate(integrand, g.domain, &g.breaks_with_origin(), cfg) {
                    Ok(est) => Ok(est.value.ln()),
                    Err(Error::DivergenceDetected) | Err(Error::NonFinite(_)) => Ok(f64::INFINITY),
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// Rényi entropy of order `r` (nats) with the default numerics.
    pub fn renyi_entropy(&self, r: f64) -> Result<f64> {
        self.renyi_entropy_with(r, &NumericsConfig::default())
    }

    pub fn renyi_entropy_with(&self, r: f64, cfg: &NumericsConfig) -> Result<f64> {
        if !(r > 0.0 && r.is_finite() && r != 1.0) {
            return Err(invalid(format!(
                "Renyi order must be positive and differ from 1, got {r}"
            )));
        }
        // log r^(1/(r-1))
        let ln_rr = r.ln() / (r - 1.0);
        match &self.family {
            Family::LogNormal { mu, sigma2 } => {
                Ok(mu + 0.5 * ((1.0 - r) / r) * sigma2 + 0.5 * ((2.0 * PI * sigma2).ln() + ln_rr))
            }
            Family::GaussianMagnitude { n } => Ok(0.5 * *n as f64 * ((2.0 * PI).ln() + ln_rr)),
            Family::Generic(g) => {
                let est = try_integrate(
                    |x| {
                        let v = g.eval(x);
                        Ok(if v > 0.0 { v.powf(r) } else { 0.0 })
                    },
                    g.domain,
                    &g.breaks,
                    cfg,
                )?;
                Ok(est.value.ln() / (1.0 - r))
            }
            _ => Err(Error::Unsupported("Renyi entropy of a discrete law".into())),
        }
    }

    /// Shannon differential entropy (nats).
    pub fn shannon_entropy(&self) -> Result<f64> {
        match &self.family {
            Family::LogNormal { mu, sigma2 } => Ok(mu + 0.5 * (2.0 * PI * E * sigma2).ln()),
            Family::GaussianMagnitude { n } => Ok(0.5 * *n as f64 * (2.0 * PI * E).ln()),
            Family::Generic(g) => {
                let est = try_integrate(
                    |x| {
                        let v = g.eval(x);
                        Ok(if v > 0.0 { -v * v.ln() } else { 0.0 })
                    },
                    g.domain,
                    &g.breaks,
                    &NumericsConfig::default(),
                )?;
                Ok(est.value)
            }
            _ => Err(Error::Unsupported("differential entropy of a discrete law".into())),
        }
    }

    /// `(E log|X|, Var log|X|)`.
    pub fn log_stats(&self) -> Result<(f64, f64)> {
        match &self.family {
            Family::LogNormal { mu, sigma2 } => Ok((*mu, *sigma2)),
            Family::GaussianMagnitude { n } => {
                let h = 0.5 * *n as f64;
                Ok((0.5 * (2f64.ln() + digamma(h)?), 0.25 * trigamma(h)?))
            }
            Family::TwoPoint { eps, a } => {
                let la = a.ln();
                Ok((eps * la, eps * (1.0 - eps) * la * la))
            }
            Family::PointMass { c } => {
                if *c == 0.0 {
                    Err(Error::MomentDiverges(0.0))
                } else {
                    Ok((c.abs().ln(), 0.0))
                }
            }
            Family::Generic(g) => {
                let cfg = NumericsConfig::default();
                let b = g.breaks_with_origin();
                let weighted = |pow: i32, shift: f64| {
                    try_integrate(
                        |x| {
                            let v = g.eval(x);
                            Ok(if v == 0.0 {
                                0.0
                            } else {
                                v * (x.abs().ln() - shift).powi(pow)
                            })
                        },
                        g.domain,
                        &b,
                        &cfg,
                    )
                    .map_err(|e| match e {
                        Error::DivergenceDetected | Error::NonFinite(_) => Error::MomentDiverges(0.0),
                        e => e,
                    })
                };
                let m = weighted(1, 0.0)?.value;
                let v = weighted(2, m)?.value;
                Ok((m, v))
            }
        }
    }

    /// `L_r(X; p, q) = (r lambda/(1-r)) log E|X|^p + (r(1-lambda)/(1-r)) log E|X|^q`.
    pub fn l_r(&self, params: &TwoMomentParams) -> Result<f64> {
        self.l_r_pow(params, 1)
    }

    /// `L_r(|X|^n; p, q)`, which uses the moments of orders `n p` and `n q`.
    pub fn l_r_pow(&self, params: &TwoMomentParams, n: u32) -> Result<f64> {
        let n = n as f64;
        let (sp, sq) = (n * params.p(), n * params.q());
        let lp = self.log_moment(sp)?;
        let lq = self.log_moment(sq)?;
        if lp == f64::INFINITY {
            return Err(Error::MomentDiverges(sp));
        }
        if lq == f64::INFINITY {
            return Err(Error::MomentDiverges(sq));
        }
        let c = params.ratio();
        let l = params.lambda();
        Ok(c * l * lp + c * (1.0 - l) * lq)
    }

    /// A sampler for Monte Carlo; generic densities are not samplable.
    pub fn sampler(&self) -> Result<DistSampler> {
        Ok(match self.family {
            Family::LogNormal { mu, sigma2 } => {
                DistSampler::LogNormal(LogNormalDist::new(mu, sigma2.sqrt()).map_err(|e| invalid(e.to_string()))?)
            }
            Family::GaussianMagnitude { n } => {
                DistSampler::Chi(ChiSquared::new(n as f64).map_err(|e| invalid(e.to_string()))?)
            }
            Family::TwoPoint { eps, a } => DistSampler::TwoPoint { eps, a },
            Family::PointMass { c } => DistSampler::Constant(c),
            Family::Generic(_) => return Err(Error::Unsupported("sampling a generic density".into())),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.draw(rng))
    }
}

/// Sampler for the samplable families.
#[derive(Debug, Clone, Copy)]
pub enum DistSampler {
    LogNormal(LogNormalDist<f64>),
    Chi(ChiSquared<f64>),
    TwoPoint { eps: f64, a: f64 },
    Constant(f64),
}

impl Sampler for DistSampler {
    type Item = f64;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DistSampler::LogNormal(d) => d.sample(rng),
            DistSampler::Chi(d) => d.sample(rng).sqrt(),
            DistSampler::TwoPoint { eps, a } => {
                if rng.random::<f64>() < *eps {
                    *a
                } else {
                    1.0
                }
            }
            DistSampler::Constant(c) => *c,
        }
    }
}
