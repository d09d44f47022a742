mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use renyi_bounds::distributions::ScalarDistribution;
use renyi_bounds::entropy_bounds::{entropy_bound, optimal_gap, optimal_gaussian_gap};
use renyi_bounds::figures::{default_eps_grid, default_r_grid, default_sigma2, fig1, fig2, fig3};
use renyi_bounds::mi_bounds::{
    chi2_mi_bound, mi_oracle, prop7_bound, prop8_bound, prop9_bound, ChannelModel, Conditioning,
};
use renyi_bounds::moment_core::TwoMomentParams;
use renyi_bounds::optimize::OptimizerConfig;
use renyi_bounds::quadrature::{Domain, NumericsConfig};
use renyi_bounds::verify;
use renyi_bounds::Error;

use output::{Cell, Format, Table};

const SEED_ENV: &str = "RENYI_BOUNDS_SEED";

#[derive(Parser)]
#[command(
    name = "renyi-bounds",
    version,
    about = "Two-moment Renyi-entropy and mutual-information bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal lognormal gaps against the order r.
    Fig1 {
        /// Comma-separated orders in (0, 1).
        #[arg(long, value_delimiter = ',')]
        r_grid: Option<Vec<f64>>,
        /// Comma-separated lognormal variances.
        #[arg(long, value_delimiter = ',')]
        sigma2: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal Gaussian gaps against the dimension n.
    Fig2 {
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Mutual information of the two-point scale mixture and two bounds on it.
    Fig3 {
        /// Comma-separated mixture weights in (0, 1).
        #[arg(long, value_delimiter = ',')]
        eps_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        q: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy bound at given moment orders, or the optimal gap when they are omitted.
    EntropyBound {
        #[arg(long, value_enum)]
        dist: Dist,
        /// Log-mean of the lognormal law.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        /// Log-variance of the lognormal law.
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Dimension of the standard Gaussian vector.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        r: f64,
        #[arg(long, allow_hyphen_values = true, requires = "q")]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        q: Option<f64>,
        /// Optimize with p = 0 fixed.
        #[arg(long, conflicts_with_all = ["p", "q"])]
        one_moment: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Mutual information of a channel next to its upper bounds.
    MiBound {
        #[arg(long, value_enum)]
        channel: Channel,
        /// Input variance of the AWGN channel.
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Weight of the two-point mixture.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Conditioning variable; defaults to x for awgn and u for two-point.
        #[arg(long, value_enum)]
        given: Option<Given>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        q: f64,
        /// Comma-separated exponents t for the variance bound.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Comma-separated orders r for the Renyi bound.
        #[arg(long = "r", value_delimiter = ',')]
        r_orders: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the oracle cross-check suite; exits 1 if any check fails.
    Verify {
        /// Comma-separated criterion ids (1-8); all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// RNG seed; falls back to RENYI_BOUNDS_SEED, then the built-in default.
    #[arg(long)]
    seed: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Lognormal,
    GaussianMagnitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    Awgn,
    TwoPoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Given {
    X,
    U,
}

/// Why a run stopped.
enum Failure {
    InvalidSpec(String),
    Numerics(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. }
            | Error::InvalidMomentOrder { .. }
            | Error::InvalidParameter(_)
            | Error::Infeasible(_)
            | Error::MomentDiverges(_)
            | Error::Unsupported(_) => Failure::InvalidSpec(e.to_string()),
            e => Failure::Numerics(e),
        }
    }
}

struct Run {
    command: &'static str,
    params: Value,
    table: Table,
    all_passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(Failure::InvalidSpec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerics(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: Command) -> Result<bool, Failure> {
    let common = match &command {
        Command::Fig1 { common, .. }
        | Command::Fig2 { common, .. }
        | Command::Fig3 { common, .. }
        | Command::EntropyBound { common, .. }
        | Command::MiBound { common, .. }
        | Command::Verify { common, .. } => common,
    };
    let cfg = numerics(common)?;
    let opt = OptimizerConfig::default();
    let (out, format) = (common.out.clone(), common.format);
    let run = match command {
        Command::Fig1 { r_grid, sigma2, .. } => {
            let r_grid = r_grid.unwrap_or_else(default_r_grid);
            let sigma2 = sigma2.unwrap_or_else(default_sigma2);
            let rows = fig1(&r_grid, &sigma2, &opt)?;
            let mut table = Table::new(&["r", "sigma2", "delta_two_moment", "delta_one_moment"]);
            for row in rows {
                table.push(vec![
                    row.r.into(),
                    row.sigma2.into(),
                    row.delta_two_moment.into(),
                    row.delta_one_moment.into(),
                ]);
            }
            Run {
                command: "fig1",
                params: json!({ "r_grid": r_grid, "sigma2": sigma2 }),
                table,
                all_passed: true,
            }
        }
        Command::Fig2 { r, n_max, .. } => {
            let rows = fig2(r, n_max, &opt)?;
            let mut table = Table::new(&["n", "delta_two_moment", "delta_one_moment", "lognormal_limit"]);
            for row in rows {
                table.push(vec![
                    Cell::Int(row.n.into()),
                    row.delta_two_moment.into(),
                    row.delta_one_moment.into(),
                    row.lognormal_limit.into(),
                ]);
            }
            Run {
                command: "fig2",
                params: json!({ "r": r, "n_max": n_max }),
                table,
                all_passed: true,
            }
        }
        Command::Fig3 { eps_grid, p, q, .. } => {
            let eps_grid = eps_grid.unwrap_or_else(default_eps_grid);
            let rows = fig3(&eps_grid, p, q, &cfg)?;
            let mut table = Table::new(&["eps", "mi_oracle", "prop9_bound", "chi2_bound"]);
            for row in rows {
                table.push(vec![
                    row.eps.into(),
                    row.mi_oracle.into(),
                    row.prop9_bound.into(),
                    row.chi2_bound.into(),
                ]);
            }
            Run {
                command: "fig3",
                params: json!({ "eps_grid": eps_grid, "p": p, "q": q }),
                table,
                all_passed: true,
            }
        }
        Command::EntropyBound {
            dist,
            mu,
            sigma2,
            n,
            r,
            p,
            q,
            one_moment,
            ..
        } => {
            let (d, params) = match dist {
                Dist::Lognormal => (
                    ScalarDistribution::lognormal(mu, sigma2)?,
                    json!({ "dist": "lognormal", "mu": mu, "sigma2": sigma2 }),
                ),
                Dist::GaussianMagnitude => (
                    ScalarDistribution::gaussian_magnitude(n)?,
                    json!({ "dist": "gaussian-magnitude", "n": n }),
                ),
            };
            let sup = d
                .natural_support()
                .ok_or_else(|| Failure::InvalidSpec("distribution has no natural support".into()))?;
            let mut params = params;
            params["r"] = json!(r);
            let mut table = Table::new(&["r", "p", "q", "lambda", "bound", "entropy", "gap"]);
            match (p, q) {
                (Some(p), Some(q)) => {
                    params["p"] = json!(p);
                    params["q"] = json!(q);
                    let b = entropy_bound(&d, &sup, &TwoMomentParams::new(r, p, q)?)?;
                    table.push(vec![
                        b.r.into(),
                        b.p.into(),
                        b.q.into(),
                        b.lambda.into(),
                        b.bound.into(),
                        b.entropy.into(),
                        b.gap.into(),
                    ]);
                }
                _ => {
                    params["one_moment"] = json!(one_moment);
                    let g = match dist {
                        Dist::GaussianMagnitude if !one_moment => optimal_gaussian_gap(r, n, &opt)?,
                        _ => optimal_gap(&d, &sup, r, one_moment, &opt)?,
                    };
                    let lambda = TwoMomentParams::new(g.r, g.p, g.q)?.lambda();
                    table.push(vec![
                        g.r.into(),
                        g.p.into(),
                        g.q.into(),
                        lambda.into(),
                        g.bound.into(),
                        g.entropy.into(),
                        g.gap.into(),
                    ]);
                }
            }
            Run {
                command: "entropy-bound",
                params,
                table,
                all_passed: true,
            }
        }
        Command::MiBound {
            channel,
            sigma2,
            eps,
            given,
            p,
            q,
            t,
            r_orders,
            ..
        } => {
            let (ch, mut params, default_given) = match channel {
                Channel::Awgn => {
                    if !(sigma2 > 0.0 && sigma2.is_finite()) {
                        return Err(Failure::InvalidSpec(format!("need sigma2 > 0, got {sigma2}")));
                    }
                    let input = ScalarDistribution::generic_pdf(
                        move |x| (-0.5 * x * x / sigma2).exp() / (2.0 * PI * sigma2).sqrt(),
                        Domain::FullLine,
                    )?;
                    (
                        ChannelModel::awgn(input)?,
                        json!({ "channel": "awgn", "sigma2": sigma2 }),
                        Given::X,
                    )
                }
                Channel::TwoPoint => (
                    ChannelModel::two_point_mixture(eps)?,
                    json!({ "channel": "two-point", "eps": eps }),
                    Given::U,
                ),
            };
            let given = given.unwrap_or(default_given);
            let cond = match given {
                Given::X => Conditioning::GivenX,
                Given::U => Conditioning::GivenU,
            };
            params["given"] = json!(match given {
                Given::X => "x",
                Given::U => "u",
            });
            params["p"] = json!(p);
            params["q"] = json!(q);
            params["t"] = json!(t);
            params["r"] = json!(r_orders);
            let mut table = Table::new(&["quantity", "parameter", "value"]);
            table.push(vec![
                "mi_oracle".into(),
                Cell::Empty,
                mi_oracle(&ch, cond, &cfg)?.into(),
            ]);
            table.push(vec![
                "chi2_bound".into(),
                Cell::Empty,
                chi2_mi_bound(&ch, cond, &cfg)?.into(),
            ]);
            table.push(vec![
                "prop9_bound".into(),
                format!("p={p};q={q}").into(),
                prop9_bound(&ch, cond, p, q, &cfg)?.into(),
            ]);
            for &ti in &t {
                table.push(vec![
                    "prop7_bound".into(),
                    format!("t={ti}").into(),
                    prop7_bound(&ch, cond, ti, &cfg)?.into(),
                ]);
            }
            for &ri in &r_orders {
                table.push(vec![
                    "prop8_bound".into(),
                    format!("r={ri}").into(),
                    prop8_bound(&ch, cond, ri, &cfg)?.into(),
                ]);
            }
            Run {
                command: "mi-bound",
                params,
                table,
                all_passed: true,
            }
        }
        Command::Verify { criteria, .. } => {
            let ids = criteria.unwrap_or_else(|| (1..=8).collect());
            if let Some(bad) = ids.iter().find(|&&id| !(1..=8).contains(&id)) {
                return Err(Failure::InvalidSpec(format!("criterion ids are 1..=8, got {bad}")));
            }
            let mut table = Table::new(&["criterion", "title", "check", "passed", "detail"]);
            let mut all_passed = true;
            for id in &ids {
                let report = verify::criterion(*id, &cfg);
                for c in report.checks {
                    all_passed &= c.passed;
                    table.push(vec![
                        Cell::Int((*id).into()),
                        report.title.into(),
                        c.name.into(),
                        Cell::Bool(c.passed),
                        c.detail.into(),
                    ]);
                }
            }
            Run {
                command: "verify",
                params: json!({ "criteria": ids }),
                table,
                all_passed,
            }
        }
    };
    let header = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": run.command,
        "seed": cfg.rng_seed,
        "numerics": cfg,
        "optimizer": opt,
        "params": run.params,
    });
    let text = run
        .table
        .render(format, &header)
        .map_err(|e| Failure::InvalidSpec(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::InvalidSpec(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(run.all_passed)
}

fn numerics(common: &Common) -> Result<NumericsConfig, Failure> {
    let mut cfg = NumericsConfig::default();
    cfg.rng_seed = match common.seed {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::InvalidSpec(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))?,
            Err(_) => cfg.rng_seed,
        },
    };
    if let Some(tol) = common.tol {
        cfg.rel_tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}
