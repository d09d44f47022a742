//! Adaptive quadrature and seeded Monte Carlo.
//!
//! These routines are the verification oracle for every closed form in the
//! crate. One-dimensional integrals use a globally adaptive G7/K15 scheme.
//! Unbounded pieces are mapped onto `(-1, 1)` through
//! `x = c ± exp(u / (1 - u^2))`, so power-law tails `x^-a` become
//! exponentially decaying in the mapped variable and stay resolvable even
//! when `a` is barely above one.
//!
//! Before integrating, every infinite end and every finite endpoint is
//! probed with a dyadic decay test: masses of `|f|` on `[T, 2T]` for four
//! successive doublings of `T` (or halvings of an endpoint offset) must
//! shrink. Three non-decreasing ratios in a row report
//! [`Error::DivergenceDetected`].

mod gauss_kronrod;
mod monte_carlo;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use gauss_kronrod::qk15;

pub use monte_carlo::{mc_expect, FnSampler, McEstimate, PairSampler, Sampler};

/// Default Monte Carlo seed.
pub const DEFAULT_SEED: u64 = 0x5eed_2017_0117;

/// Integration region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Finite {
        a: f64,
        b: f64,
    },
    /// `[a, inf)`
    HalfLine {
        a: f64,
    },
    FullLine,
}

impl Domain {
    pub fn finite(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Domain::Finite { a, b })
        } else {
            Err(Error::InvalidParameter(format!(
                "finite domain needs finite a < b, got [{a}, {b}]"
            )))
        }
    }

    pub fn half_line(a: f64) -> Result<Self> {
        if a.is_finite() {
            Ok(Domain::HalfLine { a })
        } else {
            Err(Error::InvalidParameter(format!("half line start {a} is not finite")))
        }
    }

    pub fn full_line() -> Self {
        Domain::FullLine
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Finite { a, b } => a <= x && x <= b,
            Domain::HalfLine { a } => a <= x,
            Domain::FullLine => x.is_finite(),
        }
    }
}

/// Tolerances, budgets and the RNG seed shared by all numerical routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            mc_samples: 200_000,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive (rel_tol={}, abs_tol={})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter("max_subdivisions must be >= 1".into()));
        }
        if self.mc_samples < 1000 {
            return Err(Error::InvalidParameter(format!(
                "mc_samples must be >= 1000, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_mc_samples(mut self, n: usize) -> Self {
        self.mc_samples = n;
        self
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `x = c + exp(t)`, `t = u / (1 - u^2)`
    Upper(f64),
    /// `x = c - exp(t)`
    Lower(f64),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
}

impl Map {
    fn eval<F>(&self, f: &mut F, u: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let (c, sign) = match *self {
            Map::Identity => {
                let v = f(u)?;
                return if v.is_finite() { Ok(v) } else { Err(Error::NonFinite(u)) };
            }
            Map::Upper(c) => (c, 1.0),
            Map::Lower(c) => (c, -1.0),
        };
        let d = 1.0 - u * u;
        if d <= 0.0 {
            return Ok(0.0);
        }
        let t = u / d;
        if t > 709.0 {
            return Ok(0.0);
        }
        let et = t.exp();
        if et == 0.0 {
            return Ok(0.0);
        }
        let x = c + sign * et;
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        let out = v * et * (1.0 + u * u) / (d * d);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::NonFinite(x))
        }
    }
}

fn segments(domain: Domain, breaks: &[f64]) -> Result<Vec<Segment>> {
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .filter(|&x| match domain {
            Domain::Finite { a, b } => a < x && x < b,
            Domain::HalfLine { a } => a < x,
            Domain::FullLine => true,
        })
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let tail = |map| Segment { map, lo: -1.0, hi: 1.0 };
    let mut segs = Vec::new();
    match domain {
        Domain::Finite { a, b } => {
            let mut prev = a;
            for &p in pts.iter().chain(std::iter::once(&b)) {
                segs.push(Segment {
                    map: Map::Identity,
                    lo: prev,
                    hi: p,
                });
                prev = p;
            }
        }
        Domain::HalfLine { a } => {
            let mut prev = a;
            for &p in &pts {
                segs.push(Segment {
                    map: Map::Identity,
                    lo: prev,
                    hi: p,
                });
                prev = p;
            }
            segs.push(tail(Map::Upper(prev)));
        }
        Domain::FullLine => {
            if pts.is_empty() {
                pts.push(0.0);
            }
            segs.push(tail(Map::Lower(pts[0])));
            for w in pts.windows(2) {
                segs.push(Segment {
                    map: Map::Identity,
                    lo: w[0],
                    hi: w[1],
                });
            }
            segs.push(tail(Map::Upper(*pts.last().unwrap())));
        }
    }
    Ok(segs)
}

/// Mass of `|f|` on `[lo, hi]` from two K15 panels.
fn probe_mass<F>(f: &mut F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut g = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v.abs())
        } else {
            Err(Error::NonFinite(x))
        }
    };
    let mid = 0.5 * (lo + hi);
    Ok(qk15(&mut g, lo, mid)?.value + qk15(&mut g, mid, hi)?.value)
}

const DECAY_RATIO: f64 = 1.0 - 1e-9;

fn ratios_fail(masses: &[f64; 4]) -> bool {
    masses.windows(2).all(|w| w[0] > 0.0 && w[1] >= DECAY_RATIO * w[0])
}

/// Decay test toward an infinite end starting from `c` in direction `sign`.
fn tail_diverges<F>(f: &mut F, c: f64, sign: f64) -> Result<bool>
where
    F: FnMut(f64) -> Result<f64>,
{
    let scale = c.abs().max(1.0);
    let mut masses = [0.0; 4];
    for (k, m) in masses.iter_mut().enumerate() {
        let t = scale * 2f64.powi(38 + k as i32);
        let (lo, hi) = if sign > 0.0 {
            (c + t, c + 2.0 * t)
        } else {
            (c - 2.0 * t, c - t)
        };
        *m = probe_mass(f, lo, hi)?;
    }
    Ok(ratios_fail(&masses))
}

/// Decay test toward the finite endpoint `c`, approached from direction `sign`.
fn endpoint_diverges<F>(f: &mut F, c: f64, sign: f64) -> Result<bool>
where
    F: FnMut(f64) -> Result<f64>,
{
    let scale = c.abs().max(1.0);
    let mut masses = [0.0; 4];
    for (k, m) in masses.iter_mut().enumerate() {
        let e = scale * 2f64.powi(-40 - k as i32);
        let (lo, hi) = if sign > 0.0 {
            (c + e, c + 2.0 * e)
        } else {
            (c - 2.0 * e, c - e)
        };
        *m = probe_mass(f, lo, hi)?;
    }
    Ok(ratios_fail(&masses))
}

fn check_divergence<F>(f: &mut F, segs: &[Segment]) -> Result<()>
where
    F: FnMut(f64) -> Result<f64>,
{
    for s in segs {
        let diverges = match s.map {
            Map::Identity => endpoint_diverges(f, s.lo, 1.0)? || endpoint_diverges(f, s.hi, -1.0)?,
            Map::Upper(c) => endpoint_diverges(f, c, 1.0)? || tail_diverges(f, c, 1.0)?,
            Map::Lower(c) => endpoint_diverges(f, c, -1.0)? || tail_diverges(f, c, -1.0)?,
        };
        if diverges {
            return Err(Error::DivergenceDetected);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

struct ByError {
    error: f64,
    idx: usize,
}

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F>(f: &mut F, segs: &[Segment], cfg: &NumericsConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut panels: Vec<Panel> = Vec::new();
    let mut heap = BinaryHeap::new();
    for (i, s) in segs.iter().enumerate() {
        let n = match s.map {
            Map::Identity => 4,
            _ => 16,
        };
        let w = (s.hi - s.lo) / n as f64;
        for k in 0..n {
            let lo = s.lo + w * k as f64;
            let hi = if k + 1 == n { s.hi } else { lo + w };
            let mut g = |u: f64| s.map.eval(f, u);
            let r = qk15(&mut g, lo, hi)?;
            heap.push(ByError {
                error: r.error,
                idx: panels.len(),
            });
            panels.push(Panel {
                seg: i,
                lo,
                hi,
                value: r.value,
                error: r.error,
            });
        }
    }

    let mut subdivisions = 0;
    let budget = cfg.max_subdivisions.max(panels.len());
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = (cfg.rel_tol * value.abs()).max(cfg.abs_tol);
        if error <= target {
            return Ok(Estimate {
                value,
                error,
                subdivisions,
            });
        }
        let worst = loop {
            match heap.pop() {
                Some(ByError { idx, .. }) => {
                    let p = panels[idx];
                    let mid = 0.5 * (p.lo + p.hi);
                    // panels that can no longer be split keep their error
                    if mid > p.lo && mid < p.hi && (p.hi - p.lo) > 1e-15 * mid.abs().max(1e-300) {
                        break Some(idx);
                    }
                }
                None => break None,
            }
        };
        let Some(idx) = worst else {
            return Err(Error::MaxSubdivisions {
                subdivisions,
                estimate: value,
                error,
            });
        };
        if panels.len() >= budget {
            return Err(Error::MaxSubdivisions {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let p = panels[idx];
        let map = segs[p.seg].map;
        let mid = 0.5 * (p.lo + p.hi);
        let mut g = |u: f64| map.eval(f, u);
        let left = qk15(&mut g, p.lo, mid)?;
        let right = qk15(&mut g, mid, p.hi)?;
        panels[idx] = Panel {
            hi: mid,
            value: left.value,
            error: left.error,
            ..p
        };
        heap.push(ByError { error: left.error, idx });
        heap.push(ByError {
            error: right.error,
            idx: panels.len(),
        });
        panels.push(Panel {
            lo: mid,
            value: right.value,
            error: right.error,
            ..p
        });
        subdivisions += 1;
    }
}

pub(crate) fn try_integrate_opts<F>(
    mut f: F,
    domain: Domain,
    breaks: &[f64],
    cfg: &NumericsConfig,
    check: bool,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let segs = segments(domain, breaks)?;
    if check {
        check_divergence(&mut f, &segs)?;
    }
    adaptive(&mut f, &segs, cfg)
}

/// Integrate a fallible integrand. The first error returned by `f` aborts
/// the integration and is passed through unchanged, which makes nested
/// integrals straightforward.
pub fn try_integrate<F>(f: F, domain: Domain, breaks: &[f64], cfg: &NumericsConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_opts(f, domain, breaks, cfg, true)
}

/// Integrate `f` over `domain`.
///
/// Returns an estimate whose error satisfies
/// `error <= max(rel_tol * |value|, abs_tol)`, or
/// [`Error::DivergenceDetected`] when the decay test fails, or
/// [`Error::MaxSubdivisions`] when the panel budget runs out.
pub fn integrate<F>(f: F, domain: Domain, cfg: &NumericsConfig) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), domain, &[], cfg)
}

/// As [`integrate`], additionally splitting the domain at `breaks`
/// (kinks, peaks, or scale changes of the integrand).
pub fn integrate_with_breaks<F>(f: F, domain: Domain, breaks: &[f64], cfg: &NumericsConfig) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), domain, breaks, cfg)
}

/// Nested 2-D integral `∫_outer ∫_inner f(x, y) dy dx`.
pub fn integrate_2d<F>(f: F, outer: Domain, inner: Domain, cfg: &NumericsConfig) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    let inner_cfg = NumericsConfig {
        rel_tol: cfg.rel_tol * 0.1,
        abs_tol: cfg.abs_tol * 0.1,
        ..*cfg
    };
    try_integrate(
        |x| try_integrate_opts(|y| Ok(f(x, y)), inner, &[], &inner_cfg, false).map(|e| e.value),
        outer,
        &[],
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn exponential_on_half_line() {
        let e = integrate(|x| (-x).exp(), Domain::HalfLine { a: 0.0 }, &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn normal_pdf_on_full_line() {
        let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let e = integrate(pdf, Domain::FullLine, &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arctan_integral() {
        // c_r integrand with r = 1/2, nu = (1,1), s = (0,2)
        let e = integrate(|x| 1.0 / (1.0 + x * x), Domain::HalfLine { a: 0.0 }, &cfg()).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn heavy_power_tail_converges() {
        // ∫_1^∞ x^-1.1 dx = 10
        let e = integrate(|x| x.powf(-1.1), Domain::HalfLine { a: 1.0 }, &cfg()).unwrap();
        assert!((e.value - 10.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^-0.5 = 2
        let d = Domain::finite(0.0, 1.0).unwrap();
        let e = integrate(|x| x.powf(-0.5), d, &cfg()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn divergence_is_flagged() {
        let half = Domain::HalfLine { a: 0.0 };
        assert_eq!(integrate(|_| 1.0, half, &cfg()), Err(Error::DivergenceDetected));
        assert_eq!(
            integrate(|x| 1.0 / (1.0 + x), half, &cfg()),
            Err(Error::DivergenceDetected)
        );
        // non-integrable singularity at the origin
        assert_eq!(
            integrate(|x| x.powi(-2) / (1.0 + x * x), half, &cfg()),
            Err(Error::DivergenceDetected)
        );
        assert_eq!(
            integrate(|x| 1.0 / x.abs().sqrt(), Domain::FullLine, &cfg()),
            Err(Error::DivergenceDetected)
        );
    }

    #[test]
    fn breakpoints_find_offset_peaks() {
        let pdf = |x: f64| (-0.5 * ((x - 500.0) / 0.01).powi(2)).exp() / (0.01 * (2.0 * PI).sqrt());
        let e = integrate_with_breaks(pdf, Domain::FullLine, &[500.0], &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nested_gaussian_expectation() {
        // E exp(-(X1-X2)^2/4) for X_i iid N(0,1) is 1/sqrt(2)
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let e = integrate_2d(
            |x, y| phi(x) * phi(y) * (-(x - y).powi(2) / 4.0).exp(),
            Domain::FullLine,
            Domain::FullLine,
            &cfg(),
        )
        .unwrap();
        assert!((e.value - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn max_subdivisions_is_reported() {
        let tight = NumericsConfig {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            max_subdivisions: 20,
            ..cfg()
        };
        let d = Domain::finite(0.0, 1.0).unwrap();
        let r = integrate(|x| (1.0 / (x + 1e-9)).sin(), d, &tight);
        assert!(matches!(r, Err(Error::MaxSubdivisions { .. })), "{r:?}");
    }

    #[test]
    fn rejects_bad_config() {
        let bad = NumericsConfig {
            mc_samples: 10,
            ..cfg()
        };
        assert!(integrate(|x| x, Domain::finite(0.0, 1.0).unwrap(), &bad).is_err());
        assert!(Domain::finite(1.0, 0.0).is_err());
    }
}
