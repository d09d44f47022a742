//! Parameter sweeps behind the three figures.
//!
//! Grid points are evaluated in parallel; rows always come back in grid
//! order so that output files are reproducible byte for byte.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::ScalarDistribution;
use crate::entropy_bounds::{lognormal_gap_closed, optimal_gap, optimal_gaussian_gap};
use crate::error::{Error, Result};
use crate::mi_bounds::{chi2_mi_bound, mi_oracle, prop9_bound, ChannelModel, Conditioning};
use crate::moment_core::Support;
use crate::optimize::OptimizerConfig;
use crate::quadrature::NumericsConfig;

/// `n` points from `a` to `b` (inclusive) equally spaced in `log`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|k| match k {
                    0 => a,
                    k if k == n - 1 => b,
                    k => (la + (lb - la) * k as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// `r = 0.05, 0.10, ..., 0.95`.
pub fn default_r_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

pub fn default_sigma2() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

/// 25 log-spaced values of `eps` from `1e-4` to `0.5`.
pub fn default_eps_grid() -> Vec<f64> {
    logspace(1e-4, 0.5, 25)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub r: f64,
    pub sigma2: f64,
    pub delta_two_moment: f64,
    pub delta_one_moment: f64,
}

/// Optimal two- and one-moment gaps of `lognormal(0, sigma2)` against `r`.
/// Rows are ordered by `sigma2`, then `r`.
pub fn fig1(r_grid: &[f64], sigma2: &[f64], opt: &OptimizerConfig) -> Result<Vec<Fig1Row>> {
    let points: Vec<(f64, f64)> = sigma2
        .iter()
        .flat_map(|&s| r_grid.iter().map(move |&r| (r, s)))
        .collect();
    points
        .par_iter()
        .map(|&(r, s2)| {
            let d = ScalarDistribution::lognormal(0.0, s2)?;
            let sup = Support::PositiveHalfLine;
            Ok(Fig1Row {
                r,
                sigma2: s2,
                delta_two_moment: optimal_gap(&d, &sup, r, false, opt)?.gap,
                delta_one_moment: optimal_gap(&d, &sup, r, true, opt)?.gap,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Row {
    pub n: u32,
    pub delta_two_moment: f64,
    pub delta_one_moment: f64,
    pub lognormal_limit: f64,
}

/// Optimal gaps of `N(0, I_n)` for `n = 1..=n_max` next to their limit.
pub fn fig2(r: f64, n_max: u32, opt: &OptimizerConfig) -> Result<Vec<Fig2Row>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let limit = lognormal_gap_closed(r)?;
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let d = ScalarDistribution::gaussian_magnitude(n)?;
            Ok(Fig2Row {
                n,
                delta_two_moment: optimal_gaussian_gap(r, n, opt)?.gap,
                delta_one_moment: optimal_gap(&d, &Support::EuclideanN { n }, r, true, opt)?.gap,
                lognormal_limit: limit,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    pub eps: f64,
    pub mi_oracle: f64,
    pub prop9_bound: f64,
    pub chi2_bound: f64,
}

/// `I(U; Y)` and two upper bounds on it for the two-point scale mixture
/// `U ~ (1-eps) delta_1 + eps delta_{1 + 1/sqrt(eps)}`.
pub fn fig3(eps_grid: &[f64], p: f64, q: f64, cfg: &NumericsConfig) -> Result<Vec<Fig3Row>> {
    eps_grid
        .par_iter()
        .map(|&eps| {
            let ch = ChannelModel::two_point_mixture(eps)?;
            let u = Conditioning::GivenU;
            Ok(Fig3Row {
                eps,
                mi_oracle: mi_oracle(&ch, u, cfg)?,
                prop9_bound: prop9_bound(&ch, u, p, q, cfg)?,
                chi2_bound: chi2_mi_bound(&ch, u, cfg)?,
            })
        })
        .collect()
}
