use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use renyi_bounds::distributions::ScalarDistribution;
use renyi_bounds::entropy_bounds::{optimal_gap, optimal_gaussian_gap};
use renyi_bounds::mi_bounds::{mi_oracle, prop9_bound, v_s, ChannelModel, Conditioning};
use renyi_bounds::moment_core::{c_r_numeric, MomentVector, Support, TwoMomentParams};
use renyi_bounds::optimize::OptimizerConfig;
use renyi_bounds::quadrature::{integrate, Domain, NumericsConfig};
use renyi_bounds::specfun::{kappa, lambert_w0, ln_gamma};

fn special_functions(c: &mut Criterion) {
    c.bench_function("ln_gamma", |b| b.iter(|| ln_gamma(black_box(7.3))));
    c.bench_function("lambert_w0", |b| b.iter(|| lambert_w0(black_box(2.5))));
    c.bench_function("kappa", |b| b.iter(|| kappa(black_box(0.3))));
}

fn quadrature(c: &mut Criterion) {
    let cfg = NumericsConfig::default();
    let half = Domain::half_line(0.0).unwrap();
    c.bench_function("integrate power tail", |b| {
        b.iter(|| integrate(|x| (1.0 + x).powf(-black_box(1.1)) * 0.1, half, &cfg))
    });
    let params = TwoMomentParams::new(0.5, 0.0, 2.0).unwrap();
    let mv = MomentVector::two_moment(&params, 1.0).unwrap();
    c.bench_function("c_r quadrature", |b| b.iter(|| c_r_numeric(black_box(0.5), &mv, &cfg)));
}

fn gaps(c: &mut Criterion) {
    let opt = OptimizerConfig::default();
    let d = ScalarDistribution::lognormal(0.0, 1.0).unwrap();
    c.bench_function("optimal lognormal gap", |b| {
        b.iter(|| optimal_gap(&d, &Support::PositiveHalfLine, black_box(0.5), false, &opt))
    });
    c.bench_function("optimal Gaussian gap n=64", |b| {
        b.iter(|| optimal_gaussian_gap(black_box(0.1), 64, &opt))
    });
}

fn mutual_information(c: &mut Criterion) {
    let cfg = NumericsConfig::default();
    let ch = ChannelModel::two_point_mixture(0.01).unwrap();
    let u = Conditioning::GivenU;
    c.bench_function("V_2 two-point", |b| b.iter(|| v_s(&ch, black_box(2.0), u, &cfg)));
    c.bench_function("prop9 two-point", |b| b.iter(|| prop9_bound(&ch, u, 0.0, 2.0, &cfg)));
    c.bench_function("mi oracle two-point", |b| b.iter(|| mi_oracle(&ch, u, &cfg)));
}

criterion_group!(benches, special_functions, quadrature, gaps, mutual_information);
criterion_main!(benches);
