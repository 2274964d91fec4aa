//! Fibrewise algebra: `δ`, `δ⁻¹`, the κ-ordered products and their
//! equivalences.

use num_traits::One;

use super::kappas;
use crate::scalar::{int, Rational};
use crate::verify::random::{scalar_spanning_set, Sampler};
use crate::verify::{element_witness, first_failure, run_checks, zero_witness, Check, CheckReport, SuiteConfig};
use crate::weyl::ops::{delta, delta_inverse, kernel_projection};
use crate::weyl::product::{circ, s_kappa, weighted_product, ProductWeights};
use crate::weyl::{ScalarElement, Split};

fn form_sign(a: &ScalarElement, b: &ScalarElement) -> i64 {
    let p = a.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0);
    let q = b.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0);
    if p * q % 2 == 1 {
        -1
    } else {
        1
    }
}

fn pure_form(sampler: &mut Sampler, cap: u32, p: u32) -> ScalarElement {
    loop {
        let a = sampler.scalar_element(cap).form_part(p);
        if !a.is_empty() {
            return a;
        }
    }
}

pub(crate) fn graded(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let dim = cfg.chart.dim();
    let metric = cfg.chart.inverse_metric();
    let cap = cfg.spanning_cap + 2;
    let mut sampler = Sampler::new(cfg.seed, dim);
    let spanning = scalar_spanning_set(&mut sampler, cap, cfg.samples);
    let randoms: Vec<ScalarElement> = (0..3 * cfg.samples).map(|_| sampler.scalar_element(cap)).collect();
    let functions: Vec<ScalarElement> = (0..2 * cfg.samples)
        .map(|_| sampler.scalar_function_element(cap))
        .collect();
    let pure: Vec<(ScalarElement, ScalarElement)> = (0..cfg.samples)
        .map(|i| {
            let p = (i % 3) as u32;
            let q = ((i / 3) % 3) as u32;
            (pure_form(&mut sampler, cap, p), pure_form(&mut sampler, cap, q))
        })
        .collect();
    let spanning = &spanning;
    let randoms = &randoms;
    let functions = &functions;
    let pure = &pure;

    let checks = vec![
        Check::new(
            "graded.split_identity",
            "δδ⁻¹ + δ⁻¹δ + projection = id for the full, holomorphic and anti-holomorphic splits",
            move || {
                first_failure(spanning.iter().flat_map(|a| {
                    [Split::Full, Split::Holo, Split::AntiHolo].map(|s| {
                        let lhs = delta(&delta_inverse(a, s), s)
                            .add(&delta_inverse(&delta(a, s), s))
                            .add(&kernel_projection(a, s));
                        Ok(element_witness(&format!("{s:?} split"), &lhs, a))
                    })
                }))
            },
        ),
        Check::new("graded.delta_nilpotent", "δ² = 0 and (δ⁻¹)² = 0", move || {
            first_failure(spanning.iter().flat_map(|a| {
                [
                    Ok(zero_witness("δ²", &delta(&delta(a, Split::Full), Split::Full))),
                    Ok(zero_witness(
                        "(δ⁻¹)²",
                        &delta_inverse(&delta_inverse(a, Split::Full), Split::Full),
                    )),
                ]
            }))
        }),
        Check::new(
            "graded.associativity",
            "(a ∘_κ b) ∘_κ c = a ∘_κ (b ∘_κ c) for κ ∈ {−1, 0, 1}",
            move || {
                first_failure(randoms.chunks(3).flat_map(|t| {
                    kappas().map(|k| {
                        let l = circ(&circ(&t[0], &t[1], &k, metric, cap), &t[2], &k, metric, cap);
                        let r = circ(&t[0], &circ(&t[1], &t[2], &k, metric, cap), &k, metric, cap);
                        Ok(element_witness(&format!("kappa {k}"), &l, &r))
                    })
                }))
            },
        ),
        Check::new(
            "graded.supercommutative_limit",
            "the undeformed product is graded commutative",
            move || {
                let w = ProductWeights::undeformed();
                first_failure(pure.iter().map(|(a, b)| {
                    let ab = weighted_product(a, b, &w, metric, cap);
                    let ba = weighted_product(b, a, &w, metric, cap);
                    let s = crate::scalar::GaussianRational::from_int(form_sign(a, b));
                    Ok(element_witness("ab vs ±ba", &ab, &ba.scale(&s)))
                }))
            },
        ),
        Check::new(
            "graded.delta_derivation",
            "δ(a ∘_κ b) = δa ∘_κ b + (−1)^{|a|} a ∘_κ δb",
            move || {
                first_failure(pure.iter().flat_map(|(a, b)| {
                    kappas().map(|k| {
                        let p = a.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0);
                        let sign = crate::scalar::GaussianRational::from_int(if p % 2 == 1 { -1 } else { 1 });
                        let lhs = delta(&circ(a, b, &k, metric, cap), Split::Full);
                        let rhs = circ(&delta(a, Split::Full), b, &k, metric, cap)
                            .add(&circ(a, &delta(b, Split::Full), &k, metric, cap).scale(&sign));
                        Ok(element_witness(&format!("kappa {k}"), &lhs, &rhs))
                    })
                }))
            },
        ),
        Check::new(
            "graded.ordering_equivalence",
            "a ∘_κ b = S^κ(S^{−κ}a ∘_0 S^{−κ}b) with S^κ = exp(κλΔ_fib)",
            move || {
                let zero = Rational::from_integer(0.into());
                first_failure(randoms.chunks(3).flat_map(|t| {
                    [int(-1), int(1)].map(|k| {
                        let lhs = circ(&t[0], &t[1], &k, metric, cap);
                        let a = s_kappa(&t[0], &-k.clone(), metric);
                        let b = s_kappa(&t[1], &-k.clone(), metric);
                        let rhs = s_kappa(&circ(&a, &b, &zero, metric, cap), &k, metric);
                        Ok(element_witness(&format!("kappa {k}"), &lhs, &rhs))
                    })
                }))
            },
        ),
        Check::new(
            "graded.conjugation",
            "conj(a ∘_Wick b) = conj(b) ∘_Wick conj(a) for form-degree-0 elements",
            move || {
                let one = Rational::one();
                first_failure(functions.chunks(2).map(|p| {
                    let lhs = circ(&p[0], &p[1], &one, metric, cap).conj();
                    let rhs = circ(&p[1].conj(), &p[0].conj(), &one, metric, cap);
                    Ok(element_witness("conjugate product", &lhs, &rhs))
                }))
            },
        ),
    ];
    run_checks(checks, cfg.truncation)
}
