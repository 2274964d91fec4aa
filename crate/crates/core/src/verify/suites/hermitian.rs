//! The fibre metric on Weyl-algebra sections and the deformed Hermitian
//! metric at Wick ordering.

use num_traits::{One, Zero};

use super::{bundle_of_kind, transition, FlatWitnesses};
use crate::error::Result;
use crate::fedosov::hermitian::pairing;
use crate::fedosov::local::{conj_function, transform_section};
use crate::fedosov::{DeformedEndo, DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries, Omega};
use crate::geometry::BundleKind;
use crate::scalar::{GaussianRational, Rational};
use crate::verify::random::{Sampler, Variables};
use crate::verify::{
    element_witness, failed_setup, first_failure, run_checks, series_witness, Check, CheckReport, SuiteConfig,
};
use crate::weyl::involution::scalar_star;
use crate::weyl::product::circ;
use crate::weyl::{Coeff, EndoElement, ScalarElement, SectionElement, WeylElement};

fn sign(odd: bool) -> GaussianRational {
    GaussianRational::from_int(if odd { -1 } else { 1 })
}

fn form_degree<V: Coeff>(a: &WeylElement<V>) -> u32 {
    a.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0)
}

fn setup(cfg: &SuiteConfig) -> Result<(Omega, FedosovSolution, FedosovSolution)> {
    let omega = Omega::new(cfg.omega.clone())?;
    omega.check_for(&Rational::one())?;
    let solve = |kind| -> Result<FedosovSolution> {
        let bundle = bundle_of_kind(cfg, kind)?;
        bundle.require_metric()?;
        FedosovSolution::solve(
            &cfg.chart,
            Some(&bundle),
            Rational::one(),
            omega.clone(),
            cfg.truncation,
        )
    };
    let hol = solve(BundleKind::Holomorphic)?;
    let anti = solve(BundleKind::AntiHolomorphic)?;
    Ok((omega, hol, anti))
}

/// Rank-preserving holomorphic (or anti-holomorphic) transition with its
pub(crate) fn hermitian(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let (omega, hol, anti) = match setup(cfg) {
        Ok(s) => s,
        Err(e) => {
            return vec![failed_setup(
                "hermitian.setup",
                "Wick-type solutions with a fibre metric",
                &e,
                cfg.truncation,
            )]
        }
    };
    let (hol, anti) = (&hol, &anti);
    let hermitian_omega = omega.is_real();
    let dim = cfg.chart.dim();
    let rank = hol.bundle().expect("bundle").rank();
    let (h, _) = hol
        .bundle()
        .expect("bundle")
        .require_metric()
        .expect("checked in setup");
    let metric = cfg.chart.inverse_metric();
    let one = Rational::one();
    let cap = cfg.spanning_cap + 1;
    let samples = cfg.samples.max(1);
    let mut sampler = Sampler::new(cfg.seed, dim);
    let sections: Vec<DeformedSection> = (0..samples + 1)
        .map(|_| LambdaSeries::classical(sampler.section(rank, Variables::Mixed, 2)))
        .collect();
    let functions: Vec<DeformedFunction> = (0..samples)
        .map(|_| LambdaSeries::classical(sampler.mixed(3)))
        .collect();
    let endos: Vec<DeformedEndo> = (0..samples + 1)
        .map(|_| LambdaSeries::classical(sampler.endo(rank, 2)))
        .collect();
    let holomorphic_sections: Vec<DeformedSection> = {
        let bundle = hol.bundle().expect("bundle");
        let w = FlatWitnesses { bundle };
        (0..samples)
            .map(|_| LambdaSeries::classical(w.section_flat_01(&mut sampler)))
            .collect()
    };
    let elements: Vec<(EndoElement, SectionElement, SectionElement, ScalarElement)> = (0..samples)
        .map(|i| {
            (
                sampler.endo_element(rank, cap).form_part((i % 2) as u32),
                sampler.section_element(rank, cap).form_part(((i / 2) % 2) as u32),
                sampler.section_element(rank, cap).form_part(((i + 1) % 2) as u32),
                sampler.scalar_element(cap).form_part((i % 3) as u32),
            )
        })
        .collect();
    let (sections, functions, endos, holomorphic_sections, elements) =
        (&sections, &functions, &endos, &holomorphic_sections, &elements);
    let one = &one;
    let pair = move |a: &SectionElement, b: &SectionElement| pairing(a, b, h, metric, cap);

    let mut checks = vec![
        Check::new(
            "hermitian.pairing_adjoint",
            "H(a ∘ Ψ, Ψ′) = (−1)^{|a||Ψ|} H(Ψ, a* ∘ Ψ′)",
            move || {
                first_failure(elements.iter().map(|(a, psi, psi2, _)| {
                    let a_star = hol.adjoint_element(a)?;
                    let lhs = pair(&circ(a, psi, one, metric, cap), psi2);
                    let odd = form_degree(a) * form_degree(psi) % 2 == 1;
                    let rhs = pair(psi, &circ(&a_star, psi2, one, metric, cap)).scale(&sign(odd));
                    Ok(element_witness("adjoint in the pairing", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "hermitian.pairing_right_linear",
            "H(Ψ, Ψ′ ∘ b) = H(Ψ, Ψ′) ∘ b",
            move || {
                first_failure(elements.iter().map(|(_, psi, psi2, b)| {
                    let lhs = pair(psi, &circ(psi2, b, one, metric, cap));
                    let rhs = circ(&pair(psi, psi2), b, one, metric, cap);
                    Ok(element_witness("right linearity of the pairing", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "hermitian.pairing_symmetry",
            "H(Ψ, Ψ′) = (−1)^{|Ψ||Ψ′|} conj H(Ψ′, Ψ)",
            move || {
                first_failure(elements.iter().map(|(_, psi, psi2, _)| {
                    let odd = form_degree(psi) * form_degree(psi2) % 2 == 1;
                    let rhs = scalar_star(&pair(psi2, psi)).scale(&sign(odd));
                    Ok(element_witness("conjugate symmetry of the pairing", &pair(psi, psi2), &rhs))
                }))
            },
        ),
        Check::new(
            "hermitian.metric_classical_limit",
            "𝐡(s, s′) = h(s, s′) at λ⁰ and 𝐡(s, s) is real and non-negative at the basepoint at λ⁰",
            move || {
                first_failure(sections.windows(2).map(|p| {
                    let hs = hol.deformed_metric(&p[0], &p[1])?;
                    let classical = hol.classical_metric(&p[0].coeff(0), &p[1].coeff(0))?;
                    if let Some(d) = hs.coeff(0).disagreement(&classical) {
                        return Ok(Some(format!("λ⁰ of 𝐡(s, s′): {d}")));
                    }
                    let c = hol.deformed_metric(&p[0], &p[0])?.coeff(0).constant_term();
                    let negative = !c.im.is_zero() || c.re < Rational::from_integer(0.into());
                    Ok(negative.then(|| format!("𝐡(s, s) at the basepoint is {c}")))
                }))
            },
        ),
        Check::new(
            "hermitian.metric_right_linear",
            "𝐡(s, s′ • f) = 𝐡(s, s′) ⋆ f",
            move || {
                first_failure(sections.windows(2).zip(functions.iter()).map(|(p, f)| {
                    let lhs = hol.deformed_metric(&p[0], &hol.module_right(&p[1], f)?)?;
                    let rhs = hol.star(&hol.deformed_metric(&p[0], &p[1])?, f)?;
                    Ok(series_witness("right linearity of 𝐡", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "hermitian.metric_holomorphic_argument",
            "𝐡(s, s′) = h(s, s′) when s′ is holomorphic",
            move || {
                first_failure(sections.iter().zip(holomorphic_sections.iter()).map(|(s, t)| {
                    let lhs = hol.deformed_metric(s, t)?;
                    let rhs = LambdaSeries::classical(hol.classical_metric(&s.coeff(0), &t.coeff(0))?);
                    Ok(series_witness("𝐡 with a holomorphic argument", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "hermitian.metric_local_formulas",
            "𝐡 equals its frame expansion Σ conj(sⁱ) ⋆ 𝐡(eᵢ, eⱼ) ⋆ s′ʲ (anti-holomorphic frame) and its matrix expression (holomorphic frame)",
            move || {
                first_failure(sections.windows(2).map(|p| {
                    let direct = anti.deformed_metric(&p[0], &p[1])?;
                    let local = anti.deformed_metric_antiholomorphic_local(&p[0], &p[1])?;
                    if let Some(w) = series_witness("anti-holomorphic frame", &direct, &local) {
                        return Ok(Some(w));
                    }
                    let direct = hol.deformed_metric(&p[0], &p[1])?;
                    let local = hol.deformed_metric_holomorphic_local(&p[0], &p[1])?;
                    Ok(series_witness("holomorphic frame", &direct, &local))
                }))
            },
        ),
        Check::new(
            "hermitian.metric_frame_change",
            "the local expressions of 𝐡 agree in two frames related by a transition φ",
            move || {
                let mut items = Vec::new();
                for sol in [hol, anti] {
                    let bundle = sol.bundle().expect("bundle");
                    let (phi, phi_inv) = transition(dim, rank, bundle.kind());
                    let other_bundle = bundle.clone().with_transition(phi)?.reframed()?;
                    let other = FedosovSolution::solve(
                        &cfg.chart,
                        Some(&other_bundle),
                        Rational::one(),
                        sol.omega().clone(),
                        cfg.truncation,
                    )?;
                    for p in sections.windows(2) {
                        let (a, b) = (transform_section(&phi_inv, &p[0]), transform_section(&phi_inv, &p[1]));
                        let (here, there) = match bundle.kind() {
                            BundleKind::Holomorphic => (
                                sol.deformed_metric_holomorphic_local(&p[0], &p[1])?,
                                other.deformed_metric_holomorphic_local(&a, &b)?,
                            ),
                            BundleKind::AntiHolomorphic => (
                                sol.deformed_metric_antiholomorphic_local(&p[0], &p[1])?,
                                other.deformed_metric_antiholomorphic_local(&a, &b)?,
                            ),
                        };
                        items.push(series_witness(
                            &format!("{} frames", bundle.kind().name()),
                            &here,
                            &there,
                        ));
                    }
                }
                first_failure(items.into_iter().map(Ok))
            },
        ),
    ];

    if hermitian_omega {
        checks.extend([
            Check::new(
                "hermitian.connection_forms_involution",
                "(r′)* = r′, conj r = r and (r_E)* = −r_E",
                move || {
                    let rp = hol.r_prime().expect("bundle");
                    let re = hol.r_e().expect("bundle");
                    first_failure([
                        Ok(element_witness("(r′)*", &hol.adjoint_element(rp)?, rp)),
                        Ok(element_witness("conj r", &scalar_star(hol.r()), hol.r())),
                        Ok(element_witness("(r_E)*", &hol.adjoint_element(re)?, &re.neg())),
                    ])
                },
            ),
            Check::new(
                "hermitian.products_hermitian",
                "(A ⋆′ B)* = B* ⋆′ A* and conj(f ⋆ g) = conj g ⋆ conj f",
                move || {
                    first_failure(
                        endos
                            .windows(2)
                            .map(|p| {
                                let lhs = hol.adjoint(&hol.star_prime(&p[0], &p[1])?)?;
                                let rhs = hol.star_prime(&hol.adjoint(&p[1])?, &hol.adjoint(&p[0])?)?;
                                Ok(series_witness("(A ⋆′ B)*", &lhs, &rhs))
                            })
                            .chain(functions.windows(2).map(|p| {
                                let lhs = conj_function(&hol.star(&p[0], &p[1])?);
                                let rhs = hol.star(&conj_function(&p[1]), &conj_function(&p[0]))?;
                                Ok(series_witness("conj(f ⋆ g)", &lhs, &rhs))
                            })),
                    )
                },
            ),
            Check::new(
                "hermitian.pairing_compatibility",
                "𝒟 H(Ψ, Ψ′) = H(𝒟^EΨ, Ψ′) + (−1)^{|Ψ|} H(Ψ, 𝒟^EΨ′)",
                move || {
                    let d = hol.derivation();
                    let de = hol.derivation_section()?;
                    first_failure(elements.iter().map(|(_, psi, psi2, _)| {
                        let lhs = d.apply(&pair(psi, psi2))?;
                        let low = cap - 1;
                        let rhs = pairing(&de.apply(psi)?, psi2, h, metric, low).add(
                            &pairing(psi, &de.apply(psi2)?, h, metric, low).scale(&sign(form_degree(psi) % 2 == 1)),
                        );
                        Ok(element_witness("compatibility", &lhs, &rhs))
                    }))
                },
            ),
            Check::new(
                "hermitian.metric_conjugate_symmetry",
                "𝐡(s, s′) = conj 𝐡(s′, s)",
                move || {
                    first_failure(sections.windows(2).map(|p| {
                        let lhs = hol.deformed_metric(&p[0], &p[1])?;
                        let rhs = conj_function(&hol.deformed_metric(&p[1], &p[0])?);
                        Ok(series_witness("conjugate symmetry of 𝐡", &lhs, &rhs))
                    }))
                },
            ),
            Check::new(
                "hermitian.metric_adjoint",
                "𝐡(A •′ s, s′) = 𝐡(s, A* •′ s′)",
                move || {
                    first_failure(sections.windows(2).zip(endos.iter()).map(|(p, a)| {
                        let lhs = hol.deformed_metric(&hol.module_left(a, &p[0])?, &p[1])?;
                        let rhs = hol.deformed_metric(&p[0], &hol.module_left(&hol.adjoint(a)?, &p[1])?)?;
                        Ok(series_witness("adjoint in 𝐡", &lhs, &rhs))
                    }))
                },
            ),
        ]);
    }
    run_checks(checks, cfg.truncation)
}
