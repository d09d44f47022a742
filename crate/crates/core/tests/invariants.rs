use std::f64::consts::{E, PI};

use renyi_bounds::distributions::ScalarDistribution;
use renyi_bounds::entropy_bounds::{diff_entropy_bounds, optimal_gap, optimal_gaussian_gap};
use renyi_bounds::mi_bounds::{mi_oracle, small_variation_bound, ChannelModel, Conditioning};
use renyi_bounds::moment_core::Support;
use renyi_bounds::optimize::OptimizerConfig;
use renyi_bounds::quadrature::{Domain, NumericsConfig};

fn normal(var: f64) -> ScalarDistribution {
    ScalarDistribution::generic_pdf(
        move |x| (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt(),
        Domain::FullLine,
    )
    .unwrap()
}

#[test]
fn gaussian_gaps_vanish_near_r_one() {
    let opt = OptimizerConfig::default();
    let two = optimal_gaussian_gap(0.99, 1, &opt).unwrap().gap;
    let d = ScalarDistribution::gaussian_magnitude(1).unwrap();
    let one = optimal_gap(&d, &Support::EuclideanN { n: 1 }, 0.99, true, &opt)
        .unwrap()
        .gap;
    assert!(two < 0.05 && one < 0.05, "{two} {one}");
    assert!(one >= two - 1e-9);
}

#[test]
fn restricted_gap_dominates_on_a_grid() {
    let opt = OptimizerConfig::default();
    for (d, sup) in [
        (
            ScalarDistribution::lognormal(0.3, 0.7).unwrap(),
            Support::PositiveHalfLine,
        ),
        (
            ScalarDistribution::gaussian_magnitude(3).unwrap(),
            Support::EuclideanN { n: 3 },
        ),
    ] {
        for r in [0.2, 0.5, 0.8] {
            let two = optimal_gap(&d, &sup, r, false, &opt).unwrap().gap;
            let one = optimal_gap(&d, &sup, r, true, &opt).unwrap().gap;
            assert!(two >= -1e-9 && one >= two - 1e-9, "r={r}: {two} {one}");
        }
    }
}

#[test]
fn lognormal_gap_invariant_in_parameters() {
    let opt = OptimizerConfig::default();
    for r in [0.1, 0.5, 0.9] {
        let gaps: Vec<f64> = [(0.0, 1.0), (3.0, 2.0), (-1.0, 0.25)]
            .iter()
            .map(|&(mu, s2)| {
                let d = ScalarDistribution::lognormal(mu, s2).unwrap();
                optimal_gap(&d, &Support::PositiveHalfLine, r, false, &opt).unwrap().gap
            })
            .collect();
        let spread = gaps.iter().cloned().fold(f64::MIN, f64::max) - gaps.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 2e-4, "r={r}: {gaps:?}");
    }
}

#[test]
fn unit_normal_entropy_meets_second_moment_bound() {
    let b = diff_entropy_bounds(&ScalarDistribution::gaussian_magnitude(1).unwrap(), 2.0).unwrap();
    let h = 0.5 * (2.0 * PI * E).ln();
    assert!((b.moment_bound - h).abs() < 1e-8);
    assert!((b.entropy.unwrap() - h).abs() < 1e-8);
}

#[test]
fn marginal_densities_integrate_to_one() {
    let cfg = NumericsConfig::default();
    let channels = [
        ChannelModel::awgn(normal(2.0)).unwrap(),
        ChannelModel::awgn(ScalarDistribution::two_point(0.3, 2.5).unwrap()).unwrap(),
        ChannelModel::two_point_mixture(0.05).unwrap(),
        ChannelModel::scale_mixture(ScalarDistribution::lognormal(0.0, 0.5).unwrap()).unwrap(),
    ];
    for ch in &channels {
        let m = ch.marginal_mass(&cfg).unwrap();
        assert!((m - 1.0).abs() < 1e-8, "{ch:?}: {m}");
    }
}

#[test]
fn data_processing_on_scale_mixtures() {
    let cfg = NumericsConfig::default();
    for eps in [0.01, 0.1, 0.4] {
        let ch = ChannelModel::two_point_mixture(eps).unwrap();
        let iu = mi_oracle(&ch, Conditioning::GivenU, &cfg).unwrap();
        let ix = mi_oracle(&ch, Conditioning::GivenX, &cfg).unwrap();
        assert!(iu > 0.0 && iu <= ix + 1e-8, "eps={eps}: I(U;Y)={iu} I(X;Y)={ix}");
    }
}

#[test]
fn small_variation_bound_on_concentrated_inputs() {
    let cfg = NumericsConfig::default();
    for (w, a) in [(0.01, 5.0), (0.1, 0.3), (0.5, 0.05)] {
        let x = ScalarDistribution::two_point(w, a).unwrap();
        for eps in [0.01, 0.1, 0.5] {
            let (lhs, rhs) = small_variation_bound(&x, 1.0, eps, &cfg).unwrap();
            assert!(lhs <= rhs + 1e-12, "({w}, {a}) eps={eps}: {lhs} > {rhs}");
        }
    }
    let (lhs, rhs) = small_variation_bound(&normal(1e-4), 0.0, 0.05, &cfg).unwrap();
    assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");
}
