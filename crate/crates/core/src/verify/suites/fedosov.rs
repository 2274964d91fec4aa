//! The solved connection forms, Fedosov derivations, Taylor lifts, star
//! products and bimodule laws at the configured ordering.

use super::some_bundle;
use crate::fedosov::{DeformedEndo, DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries, Omega};
use crate::jet::{Jet, Order};
use crate::matrix::Endo;
use crate::scalar::GaussianRational;
use crate::verify::oracle::oracle_flat_star;
use crate::verify::random::{endo_spanning_set, scalar_spanning_set, section_spanning_set, Sampler, Variables};
use crate::verify::{
    element_witness, failed_setup, first_failure, run_checks, series_witness, zero_witness, Check, CheckReport,
    SuiteConfig,
};
use crate::weyl::ops::{delta_inverse, sigma};
use crate::weyl::product::circ;
use crate::weyl::{Coeff, Split, WeylElement};

fn sign_for(degree: u32) -> GaussianRational {
    GaussianRational::from_int(if degree % 2 == 1 { -1 } else { 1 })
}

fn form_degree<V: Coeff>(a: &WeylElement<V>) -> u32 {
    a.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0)
}

fn normalization<V: Coeff>(what: &str, r: &WeylElement<V>) -> Option<String> {
    if let Some(w) = zero_witness(&format!("δ⁻¹{what}"), &delta_inverse(r, Split::Full)) {
        return Some(w);
    }
    if let Some(w) = zero_witness(&format!("σ{what}"), &sigma(r)) {
        return Some(w);
    }
    r.terms()
        .find(|(k, v)| k.total_degree() < 3 && !v.is_zero())
        .map(|(k, _)| {
            format!(
                "{what} has a term of total degree {} at {}",
                k.total_degree(),
                k.label(r.dim())
            )
        })
}

/// Whether the chart is flat `ℂⁿ` with the unit metric.
fn unit_flat(sol: &FedosovSolution) -> bool {
    let dim = sol.dim();
    let id = Endo::identity(dim, dim);
    let g = sol.chart().metric();
    (0..dim).all(|i| (0..dim).all(|j| g.get(i, j) == id.get(i, j)))
}

pub(crate) fn fedosov(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let setup = || -> crate::error::Result<FedosovSolution> {
        let omega = Omega::new(cfg.omega.clone())?;
        let bundle = some_bundle(cfg)?;
        FedosovSolution::solve(&cfg.chart, Some(&bundle), cfg.kappa.clone(), omega, cfg.truncation)
    };
    let sol = match setup() {
        Ok(s) => s,
        Err(e) => {
            return vec![failed_setup(
                "fedosov.setup",
                "solving the connection forms",
                &e,
                cfg.truncation,
            )]
        }
    };
    let sol = &sol;
    let dim = sol.dim();
    let rank = sol.bundle().expect("solved with a bundle").rank();
    let n = cfg.truncation.lambda_order() as usize;
    let cap = cfg.spanning_cap;
    let mut sampler = Sampler::new(cfg.seed, dim);
    let scalars = scalar_spanning_set(&mut sampler, cap, cfg.samples);
    let endos = endo_spanning_set(&mut sampler, rank, cap, cfg.samples);
    let sections = section_spanning_set(&mut sampler, rank, cap, cfg.samples);
    let functions: Vec<DeformedFunction> = (0..3 * cfg.samples)
        .map(|_| LambdaSeries::classical(sampler.mixed(3)))
        .collect();
    let matrices: Vec<DeformedEndo> = (0..3 * cfg.samples.div_ceil(3).max(1))
        .map(|_| LambdaSeries::classical(sampler.endo(rank, 2)))
        .collect();
    let vectors: Vec<DeformedSection> = (0..cfg.samples.max(1))
        .map(|_| LambdaSeries::classical(sampler.section(rank, Variables::Mixed, 2)))
        .collect();
    let mixed_forms: Vec<_> = (0..cfg.samples)
        .map(|i| {
            let p = (i % 2) as u32;
            let q = ((i / 2) % 2) as u32;
            (
                sampler.endo_element(rank, cap + 1).form_part(p),
                sampler.section_element(rank, cap + 1).form_part(q),
                sampler.scalar_element(cap + 1).form_part((i % 3) as u32),
            )
        })
        .collect();
    let (scalars, endos, sections) = (&scalars, &endos, &sections);
    let (functions, matrices, vectors, mixed_forms) = (&functions, &matrices, &vectors, &mixed_forms);
    let one = LambdaSeries::classical(Jet::one(dim));
    let id = LambdaSeries::classical(Endo::identity(dim, rank));
    let (one, id) = (&one, &id);

    let checks = vec![
        Check::new(
            "fedosov.residual",
            "δr = R + Dr + (i/λ) r∘r + Ω and δr′ = R − iλR^E + D′r′ + (i/λ) r′∘r′ + Ω through the cap",
            move || {
                first_failure([
                    sol.residual().map(|e| zero_witness("scalar residual", &e)),
                    sol.residual_prime().map(|e| zero_witness("endomorphism residual", &e)),
                ])
            },
        ),
        Check::new(
            "fedosov.normalization",
            "δ⁻¹r = 0, σr = 0, total degree ≥ 3 (also for r′), and r′ − r has no λ⁰ part",
            move || {
                let rp = sol.r_prime().expect("bundle");
                if let Some(w) = normalization("r", sol.r()).or_else(|| normalization("r′", rp)) {
                    return Ok(Some(w));
                }
                let diff = rp.sub(&sol.r().to_endo(rank)).filter(|k| k.lam == 0);
                Ok(zero_witness("λ⁰ part of r′ − r", &diff))
            },
        ),
        Check::new(
            "fedosov.derivation_square",
            "𝒟² = 0, (𝒟′)² = 0 and (𝒟^E)² = 0 on the spanning sets",
            move || {
                let d = sol.derivation();
                let dp = sol.derivation_prime()?;
                let de = sol.derivation_section()?;
                first_failure(
                    scalars
                        .iter()
                        .map(|a| Ok(zero_witness("𝒟²", &d.apply(&d.apply(a)?)?)))
                        .chain(endos.iter().map(|a| Ok(zero_witness("𝒟′²", &dp.apply(&dp.apply(a)?)?))))
                        .chain(
                            sections
                                .iter()
                                .map(|a| Ok(zero_witness("(𝒟^E)²", &de.apply(&de.apply(a)?)?))),
                        ),
                )
            },
        ),
        Check::new(
            "fedosov.taylor_lift",
            "σ∘τ = id and 𝒟∘τ = 0 for τ, τ′ and τ^E; τ(1) = 1",
            move || {
                let d = sol.derivation();
                let dp = sol.derivation_prime()?;
                let de = sol.derivation_section()?;
                let lift_one = sol.taylor(one)?;
                let cap = cfg.truncation.degree_cap();
                if lift_one.cap() != cap {
                    return Ok(Some(format!(
                        "τ(1) is trusted through degree {} instead of {cap}",
                        lift_one.cap()
                    )));
                }
                if let Some(w) = element_witness("τ(1)", &lift_one, &one.to_element()) {
                    return Ok(Some(w));
                }
                first_failure(
                    functions
                        .iter()
                        .take(cfg.samples)
                        .map(|f| {
                            let t = sol.taylor(f)?;
                            Ok(element_witness("στ(f)", &sigma(&t), &f.to_element())
                                .or_else(|| zero_witness("𝒟τ(f)", &d.apply(&t).ok()?)))
                        })
                        .chain(matrices.iter().map(|a| {
                            let t = sol.taylor_prime(a)?;
                            Ok(element_witness("στ′(A)", &sigma(&t), &a.to_element())
                                .or_else(|| zero_witness("𝒟′τ′(A)", &dp.apply(&t).ok()?)))
                        }))
                        .chain(vectors.iter().map(|s| {
                            let t = sol.taylor_section(s)?;
                            if t.cap() != cap {
                                return Ok(Some(format!(
                                    "τ^E(s) is trusted through degree {} instead of {cap}",
                                    t.cap()
                                )));
                            }
                            Ok(element_witness("στ^E(s)", &sigma(&t), &s.to_element())
                                .or_else(|| zero_witness("𝒟^Eτ^E(s)", &de.apply(&t).ok()?)))
                        })),
                )
            },
        ),
        Check::new(
            "fedosov.unit",
            "1 ⋆ f = f ⋆ 1 = f, id ⋆′ A = A, s • 1 = s, id •′ s = s",
            move || {
                first_failure(
                    functions
                        .iter()
                        .take(cfg.samples)
                        .map(|f| {
                            Ok(series_witness("1⋆f", &sol.star(one, f)?, f).or(series_witness(
                                "f⋆1",
                                &sol.star(f, one)?,
                                f,
                            )))
                        })
                        .chain(
                            matrices
                                .iter()
                                .map(|a| Ok(series_witness("id⋆′A", &sol.star_prime(id, a)?, a))),
                        )
                        .chain(vectors.iter().map(|s| {
                            Ok(series_witness("s•1", &sol.module_right(s, one)?, s).or(series_witness(
                                "id•′s",
                                &sol.module_left(id, s)?,
                                s,
                            )))
                        })),
                )
            },
        ),
        Check::new(
            "fedosov.classical_limit",
            "the λ⁰ parts of ⋆, ⋆′, • and •′ are the pointwise products",
            move || {
                first_failure(
                    functions
                        .chunks(2)
                        .map(|p| {
                            let prod = sol.star(&p[0], &p[1])?;
                            let expected = &p[0].coeff(0) * &p[1].coeff(0);
                            Ok(prod.coeff(0).disagreement(&expected).map(|d| format!("f⋆g at λ⁰: {d}")))
                        })
                        .chain(matrices.chunks(2).map(|p| {
                            let prod = sol.star_prime(&p[0], &p[1])?;
                            let expected: Endo = p[0].coeff(0).matmul(&p[1].coeff(0));
                            Ok(prod
                                .coeff(0)
                                .disagreement(&expected)
                                .map(|d| format!("A⋆′B at λ⁰: {d}")))
                        }))
                        .chain(
                            vectors
                                .iter()
                                .zip(functions.iter())
                                .zip(matrices.iter())
                                .map(|((s, f), a)| {
                                    let right = sol.module_right(s, f)?.coeff(0);
                                    let expected = s.coeff(0).scale_jet(&f.coeff(0));
                                    if let Some(d) = right.disagreement(&expected) {
                                        return Ok(Some(format!("s•f at λ⁰: {d}")));
                                    }
                                    let left = sol.module_left(a, s)?.coeff(0);
                                    let expected = a.coeff(0).matmul(&s.coeff(0));
                                    Ok(left.disagreement(&expected).map(|d| format!("A•′s at λ⁰: {d}")))
                                }),
                        ),
                )
            },
        ),
        Check::new(
            "fedosov.associativity",
            "(f ⋆ g) ⋆ h = f ⋆ (g ⋆ h) and (A ⋆′ B) ⋆′ C = A ⋆′ (B ⋆′ C)",
            move || {
                first_failure(
                    functions
                        .chunks(3)
                        .map(|t| {
                            let l = sol.star(&sol.star(&t[0], &t[1])?, &t[2])?;
                            let r = sol.star(&t[0], &sol.star(&t[1], &t[2])?)?;
                            Ok(series_witness("⋆", &l, &r))
                        })
                        .chain(matrices.chunks(3).filter(|t| t.len() == 3).map(|t| {
                            let l = sol.star_prime(&sol.star_prime(&t[0], &t[1])?, &t[2])?;
                            let r = sol.star_prime(&t[0], &sol.star_prime(&t[1], &t[2])?)?;
                            Ok(series_witness("⋆′", &l, &r))
                        })),
                )
            },
        ),
        Check::new(
            "fedosov.first_order_commutator",
            "f ⋆ g − g ⋆ f = iλ 𝒫(f, g) + O(λ²) with 𝒫 = (2/i)(P − P̄)",
            move || {
                if n < 1 {
                    return Ok(None);
                }
                first_failure(functions.chunks(2).map(|p| {
                    let comm = sol.star(&p[0], &p[1])?.sub(&sol.star(&p[1], &p[0])?);
                    let bracket = sol.poisson_bracket(&p[0].coeff(0), &p[1].coeff(0))?.mul_i();
                    if let Some(d) = comm.coeff(0).disagreement(&Jet::zero(dim, Order::Exact)) {
                        return Ok(Some(format!("λ⁰ commutator: {d}")));
                    }
                    Ok(comm
                        .coeff(1)
                        .disagreement(&bracket)
                        .map(|d| format!("λ¹ commutator: {d}")))
                }))
            },
        ),
        Check::new(
            "fedosov.bimodule_laws",
            "(A ⋆′ B) •′ s = A •′ (B •′ s), (s • f) • g = s • (f ⋆ g), (A •′ s) • f = A •′ (s • f)",
            move || {
                first_failure(vectors.iter().enumerate().map(|(i, s)| {
                    let a = &matrices[i % matrices.len()];
                    let b = &matrices[(i + 1) % matrices.len()];
                    let f = &functions[(2 * i) % functions.len()];
                    let g = &functions[(2 * i + 1) % functions.len()];
                    let l = sol.module_left(&sol.star_prime(a, b)?, s)?;
                    let r = sol.module_left(a, &sol.module_left(b, s)?)?;
                    if let Some(w) = series_witness("left module", &l, &r) {
                        return Ok(Some(w));
                    }
                    let l = sol.module_right(&sol.module_right(s, f)?, g)?;
                    let r = sol.module_right(s, &sol.star(f, g)?)?;
                    if let Some(w) = series_witness("right module", &l, &r) {
                        return Ok(Some(w));
                    }
                    let l = sol.module_right(&sol.module_left(a, s)?, f)?;
                    let r = sol.module_left(a, &sol.module_right(s, f)?)?;
                    Ok(series_witness("bimodule", &l, &r))
                }))
            },
        ),
        Check::new(
            "fedosov.module_derivation",
            "𝒟^E(Ψ ∘ b) = 𝒟^EΨ ∘ b + (−1)^k Ψ ∘ 𝒟b and 𝒟^E(a ∘ Ψ) = 𝒟′a ∘ Ψ + (−1)^ℓ a ∘ 𝒟^EΨ",
            move || {
                let d = sol.derivation();
                let dp = sol.derivation_prime()?;
                let de = sol.derivation_section()?;
                let metric = sol.chart().inverse_metric();
                let kappa = sol.kappa();
                first_failure(mixed_forms.iter().map(|(a, psi, b)| {
                    let lim = cap + 1;
                    let lhs = de.apply(&circ(psi, b, kappa, metric, lim))?;
                    let rhs = circ(&de.apply(psi)?, b, kappa, metric, lim - 1)
                        .add(&circ(psi, &d.apply(b)?, kappa, metric, lim - 1).scale(&sign_for(form_degree(psi))));
                    if let Some(w) = element_witness("right derivation rule", &lhs, &rhs) {
                        return Ok(Some(w));
                    }
                    let lhs = de.apply(&circ(a, psi, kappa, metric, lim))?;
                    let rhs = circ(&dp.apply(a)?, psi, kappa, metric, lim - 1)
                        .add(&circ(a, &de.apply(psi)?, kappa, metric, lim - 1).scale(&sign_for(form_degree(a))));
                    Ok(element_witness("left derivation rule", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "fedosov.flat_oracle",
            "on unit-metric flat charts the star product equals the closed-form flat product",
            move || {
                if !unit_flat(sol) || !sol.r().is_zero() {
                    return Ok(None);
                }
                first_failure(functions.chunks(2).map(|p| {
                    let engine = sol.star(&p[0], &p[1])?;
                    let oracle = oracle_flat_star(&p[0].coeff(0), &p[1].coeff(0), sol.kappa(), n as u32)?;
                    Ok(series_witness("engine vs oracle", &engine, &oracle))
                }))
            },
        ),
    ];
    run_checks(checks, cfg.truncation)
}
