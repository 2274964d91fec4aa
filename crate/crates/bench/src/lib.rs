//! Shared fixtures for the benchmarks in `benches/`.

use fedosov_core::fedosov::{FedosovSolution, Omega, Truncation};
use fedosov_core::geometry::{Builtin, KaehlerChart};
use fedosov_core::scalar::int;
use fedosov_core::verify::{Sampler, Variables};
use fedosov_core::{Jet, Rational};

/// A one-dimensional built-in chart carrying enough jet order for `lambda_order`.
pub fn chart(which: Builtin, lambda_order: u32) -> KaehlerChart {
    let truncation = Truncation::new(lambda_order);
    KaehlerChart::builtin(which, 1, truncation.required_jet_order(), &int(1)).expect("built-in charts are valid")
}

/// Solution with `Ω = 0` for the given ordering.
pub fn solve(which: Builtin, lambda_order: u32, kappa: Rational) -> FedosovSolution {
    let chart = chart(which, lambda_order);
    FedosovSolution::solve(&chart, None, kappa, Omega::zero(1), Truncation::new(lambda_order))
        .expect("zero Ω solves on every chart")
}

/// Seeded mixed polynomials of degree at most 3.
pub fn sample_pair(seed: u64) -> (Jet, Jet) {
    let mut sampler = Sampler::new(seed, 1);
    (
        sampler.polynomial(Variables::Mixed, 3),
        sampler.polynomial(Variables::Mixed, 3),
    )
}
