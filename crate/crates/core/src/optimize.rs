//! Derivative-free minimization on boxes.
//!
//! Each coordinate is minimized in turn by a coarse grid scan over its whole
//! range followed by golden-section refinement inside the best grid cell.
//! Infeasible points are expressed by the objective returning `+inf`, which
//! the scan simply never selects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Cyclic passes over all coordinates.
    pub passes: usize,
    /// Hard cap on objective evaluations.
    pub budget: usize,
    /// Grid points of the initial scan of each coordinate.
    pub grid: usize,
    /// Relative bracket width at which golden section stops.
    pub x_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            passes: 12,
            budget: 2000,
            grid: 17,
            x_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Best point after every coordinate step.
    pub trace: Vec<(Vec<f64>, f64)>,
}

struct Counted<F> {
    f: F,
    used: usize,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if self.used >= self.budget {
            return Err(Error::OptimizerNoConverge(format!(
                "evaluation budget of {} exhausted",
                self.budget
            )));
        }
        self.used += 1;
        let v = (self.f)(x);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden<G>(mut f: G, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (hi - lo) > x_tol * (1.0 + x1.abs().max(x2.abs())) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Grid scan followed by golden refinement around the best grid point.
fn scan_then_golden<G>(mut f: G, lo: f64, hi: f64, grid: usize, x_tol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let n = grid.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    let mut best_i = 0;
    for i in 0..n {
        let x = lo + h * i as f64;
        let v = f(x)?;
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    if best.1 == f64::INFINITY {
        return Ok(best);
    }
    let a = lo + h * best_i.saturating_sub(1) as f64;
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let refined = golden(&mut f, a, b, x_tol)?;
    Ok(if refined.1 < best.1 { refined } else { best })
}

/// One-dimensional minimization on `[lo, hi]`.
pub fn minimize_scalar<F>(f: F, lo: f64, hi: f64, cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    let mut f = f;
    minimize_box(|x: &[f64]| f(x[0]), &[0.5 * (lo + hi)], &[(lo, hi)], cfg)
}

/// Cyclic coordinate minimization of `f` over the box `bounds`, starting at
/// `x0`. Fails with [`Error::OptimizerNoConverge`] if the budget runs out or
/// no feasible point is found.
pub fn minimize_box<F>(f: F, x0: &[f64], bounds: &[(f64, f64)], cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    if x0.len() != bounds.len() || bounds.iter().any(|(a, b)| !(a < b)) {
        return Err(Error::InvalidParameter(
            "optimizer bounds must be nonempty intervals".into(),
        ));
    }
    let mut obj = Counted {
        f,
        used: 0,
        budget: cfg.budget,
    };
    let mut x = x0.to_vec();
    let mut value = obj.eval(&x)?;
    let mut trace = vec![(x.clone(), value)];
    let cell: Vec<f64> = bounds
        .iter()
        .map(|(a, b)| (b - a) / (cfg.grid.max(3) - 1) as f64)
        .collect();
    for pass in 0..cfg.passes {
        let start = (x.clone(), value);
        for i in 0..x.len() {
            let (lo, hi) = bounds[i];
            let mut probe = x.clone();
            let mut g = |t: f64| {
                probe[i] = t;
                obj.eval(&probe)
            };
            let (xi, vi) = if pass == 0 {
                scan_then_golden(g, lo, hi, cfg.grid, cfg.x_tol)?
            } else {
                let a = (x[i] - cell[i]).max(lo);
                let b = (x[i] + cell[i]).min(hi);
                golden(&mut g, a, b, cfg.x_tol)?
            };
            if vi < value {
                x[i] = xi;
                value = vi;
            }
            trace.push((x.clone(), value));
        }
        // extrapolate along the net displacement of this pass
        let dir: Vec<f64> = x.iter().zip(&start.0).map(|(a, b)| a - b).collect();
        if start.1.is_finite() && dir.iter().any(|d| *d != 0.0) {
            let t_max = dir
                .iter()
                .zip(&x)
                .zip(bounds)
                .map(|((d, xi), (lo, hi))| match d.partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Greater) => (hi - xi) / d,
                    Some(std::cmp::Ordering::Less) => (lo - xi) / d,
                    _ => f64::INFINITY,
                })
                .fold(4.0, f64::min);
            if t_max > 0.0 {
                let base = x.clone();
                let mut probe = x.clone();
                let (t, v) = golden(
                    |t| {
                        for k in 0..probe.len() {
                            probe[k] = base[k] + t * dir[k];
                        }
                        obj.eval(&probe)
                    },
                    -1.0f64.max(-t_max),
                    t_max,
                    cfg.x_tol,
                )?;
                if v < value {
                    for k in 0..x.len() {
                        x[k] = base[k] + t * dir[k];
                    }
                    value = v;
                    trace.push((x.clone(), value));
                }
            }
        }
        if pass > 0 && start.1 - value <= 1e-15 * (1.0 + value.abs()) {
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::OptimizerNoConverge("no feasible point found".into()));
    }
    Ok(Minimum {
        x,
        value,
        evaluations: obj.used,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_quadratic() {
        let m = minimize_scalar(|x| (x - 1.234).powi(2) + 0.5, -10.0, 10.0, &OptimizerConfig::default()).unwrap();
        assert!((m.x[0] - 1.234).abs() < 1e-7);
        assert!((m.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn separable_two_dimensional() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1].exp() - x[1]);
        let m = minimize_box(f, &[0.5, 2.0], &[(0.0, 1.0), (-5.0, 5.0)], &OptimizerConfig::default()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-13, "{m:?}");
        assert!(m.evaluations <= 2000);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let f = |x: &[f64]| {
            if x[0] < 2.0 {
                f64::INFINITY
            } else {
                (x[0] - 3.0).powi(2)
            }
        };
        let m = minimize_box(f, &[5.0], &[(0.0, 10.0)], &OptimizerConfig::default()).unwrap();
        assert!((m.x[0] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn budget_and_feasibility_errors() {
        let cfg = OptimizerConfig {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            minimize_scalar(|x| x * x, -1.0, 1.0, &cfg),
            Err(Error::OptimizerNoConverge(_))
        ));
        assert!(matches!(
            minimize_scalar(|_| f64::INFINITY, -1.0, 1.0, &OptimizerConfig::default()),
            Err(Error::OptimizerNoConverge(_))
        ));
    }
}
