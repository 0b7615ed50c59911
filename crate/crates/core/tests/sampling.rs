//! Seed-pinned Monte Carlo checks of the samplers against the exact laws.

use cnroots::construct::Blueprint;
use cnroots::distribution::DensityView;
use cnroots::family::PhaseVector;
use cnroots::support::SupportSpec;

fn single_pair() -> Blueprint {
    Blueprint::from_spec(&SupportSpec::validate(1.0, &[(2.0, 4.0)]).unwrap())
}

#[test]
fn median_of_symmetric_law_is_near_zero() {
    let bp = single_pair();
    let view = DensityView::new(bp.member(&PhaseVector::zero(1, 3).unwrap()).unwrap());
    let mut draws = view.sample(100_000, 3).draws;
    draws.sort_by(f64::total_cmp);
    let median = 0.5 * (draws[49_999] + draws[50_000]);
    assert!(median.abs() <= 0.02, "median {median}");
}

#[test]
fn kolmogorov_smirnov_against_exact_cdf() {
    let bp = single_pair();
    for (m, seed) in [(0, 5), (1, 6)] {
        let view = DensityView::new(bp.member(&PhaseVector::new(vec![m], 3).unwrap()).unwrap());
        let count = 4000;
        let batch = view.sample(count, seed);
        let ks = view.ks_statistic(&batch, 1e-6).unwrap();
        assert!(ks <= 1.95 / (count as f64).sqrt(), "omega = ({m}): KS {ks}");
    }
}
