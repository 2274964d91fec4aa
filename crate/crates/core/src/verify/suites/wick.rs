//! Wick-ordering structure: projections of the connection forms, the
//! projected lift recursions, separation of variables, the local formulas
//! in (anti-)holomorphic frames and their frame independence.

use num_traits::One;

use super::{bundle_of_kind, transition, FlatWitnesses};
use crate::error::Result;
use crate::fedosov::local::{transform_endo, transform_section};
use crate::fedosov::recursion::{antiholomorphic_projection, holomorphic_projection};
use crate::fedosov::{DeformedEndo, DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries, Omega};
use crate::geometry::{covariant_derivative, BundleAction, BundleChart, BundleKind};
use crate::jet::Jet;
use crate::matrix::{Endo, Section};
use crate::scalar::{GaussianRational, Rational};
use crate::verify::random::{Sampler, Variables};
use crate::verify::{
    element_witness, failed_setup, first_failure, run_checks, series_witness, zero_witness, Check, CheckReport,
    SuiteConfig,
};
use crate::weyl::ops::{pi_antiholomorphic, pi_holomorphic};
use crate::weyl::Coeff;

struct Setup {
    hol: FedosovSolution,
    anti: FedosovSolution,
}

fn setup(cfg: &SuiteConfig) -> Result<Setup> {
    let omega = Omega::new(cfg.omega.clone())?;
    omega.check_for(&Rational::one())?;
    let hol_bundle = bundle_of_kind(cfg, BundleKind::Holomorphic)?;
    let anti_bundle = bundle_of_kind(cfg, BundleKind::AntiHolomorphic)?;
    let solve =
        |b: &BundleChart| FedosovSolution::solve(&cfg.chart, Some(b), Rational::one(), omega.clone(), cfg.truncation);
    Ok(Setup {
        hol: solve(&hol_bundle)?,
        anti: solve(&anti_bundle)?,
    })
}

/// Witness for a value that should be covariantly constant along the given
/// directions.
fn flatness_witness<V: BundleAction>(
    what: &str,
    v: &V,
    bundle: &BundleChart,
    directions: std::ops::Range<usize>,
) -> Result<Option<String>> {
    for a in directions {
        let d = covariant_derivative(v, bundle, a)?;
        if !d.is_zero() {
            return Ok(Some(format!(
                "{what}: covariant derivative along direction {a} is {}",
                d.describe()
            )));
        }
    }
    Ok(None)
}

fn pointwise_section(a: &Endo, s: &Section) -> Section {
    a.matmul(s)
}

pub(crate) fn wick(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let setup = match setup(cfg) {
        Ok(s) => s,
        Err(e) => {
            return vec![failed_setup(
                "wick.setup",
                "Wick-type solutions for Ω of type (1,1)",
                &e,
                cfg.truncation,
            )]
        }
    };
    let Setup { hol, anti } = &setup;
    let dim = cfg.chart.dim();
    let cap = cfg.truncation.degree_cap();
    let hol_bundle = hol.bundle().expect("solved with a bundle");
    let anti_bundle = anti.bundle().expect("solved with a bundle");
    let rank = hol_bundle.rank();
    let mut sampler = Sampler::new(cfg.seed, dim);
    let samples = cfg.samples.max(1);
    let mixed: Vec<DeformedFunction> = (0..samples)
        .map(|_| LambdaSeries::classical(sampler.mixed(3)))
        .collect();
    let holo: Vec<Jet> = (0..samples)
        .map(|_| sampler.polynomial(Variables::Holomorphic, 3))
        .collect();
    let antiholo: Vec<Jet> = (0..samples)
        .map(|_| sampler.polynomial(Variables::AntiHolomorphic, 3))
        .collect();
    let endos: Vec<DeformedEndo> = (0..samples)
        .map(|_| LambdaSeries::classical(sampler.endo(rank, 2)))
        .collect();
    let sections: Vec<DeformedSection> = (0..samples)
        .map(|_| LambdaSeries::classical(sampler.section(rank, Variables::Mixed, 2)))
        .collect();
    // witnesses in each bundle, per clause
    let mut witnesses = |bundle: &BundleChart| {
        let w = FlatWitnesses { bundle };
        (0..samples)
            .map(|_| {
                (
                    w.section_flat_10(&mut sampler),
                    w.section_flat_01(&mut sampler),
                    w.endo_flat_10(&mut sampler),
                    w.endo_flat_01(&mut sampler),
                )
            })
            .collect::<Vec<_>>()
    };
    let flat_hol = witnesses(hol_bundle);
    let flat_anti = witnesses(anti_bundle);
    let (mixed, holo, antiholo, endos, sections) = (&mixed, &holo, &antiholo, &endos, &sections);
    let (flat_hol, flat_anti) = (&flat_hol, &flat_anti);
    let sols = [(hol, flat_hol), (anti, flat_anti)];
    let sols = &sols;

    let checks = vec![
        Check::new(
            "wick.connection_form_projections",
            "π_z r = π_z̄ r = 0, π_z r′ = π_z̄ r′ = 0 and π_z r_E = π_z̄ r_E = 0",
            move || {
                let mut items = vec![
                    zero_witness("π_z r", &pi_holomorphic(hol.r())),
                    zero_witness("π_z̄ r", &pi_antiholomorphic(hol.r())),
                ];
                for sol in [hol, anti] {
                    let kind = sol.bundle().expect("bundle").kind().name();
                    let rp = sol.r_prime().expect("bundle");
                    let re = sol.r_e().expect("bundle");
                    items.push(zero_witness(&format!("π_z r′ ({kind})"), &pi_holomorphic(rp)));
                    items.push(zero_witness(&format!("π_z̄ r′ ({kind})"), &pi_antiholomorphic(rp)));
                    items.push(zero_witness(&format!("π_z r_E ({kind})"), &pi_holomorphic(re)));
                    items.push(zero_witness(&format!("π_z̄ r_E ({kind})"), &pi_antiholomorphic(re)));
                }
                first_failure(items.into_iter().map(Ok))
            },
        ),
        Check::new(
            "wick.projected_lifts",
            "the projected recursions reproduce π_z τ and π_z̄ τ for functions, endomorphisms and sections",
            move || {
                let chart = &cfg.chart;
                first_failure(
                    mixed
                        .iter()
                        .map(|f| {
                            let lift = hol.taylor(f)?;
                            let x = f.to_element();
                            let u = holomorphic_projection(&x, hol.r(), chart, None, cap)?;
                            let v = antiholomorphic_projection(&x, hol.r(), chart, None, cap)?;
                            Ok(element_witness("π_z τ(f)", &u, &pi_holomorphic(&lift))
                                .or_else(|| element_witness("π_z̄ τ(f)", &v, &pi_antiholomorphic(&lift))))
                        })
                        .chain(sols.iter().flat_map(|(sol, _)| {
                            let bundle = sol.bundle();
                            let rp = sol.r_prime().expect("bundle");
                            endos
                                .iter()
                                .map(move |a| {
                                    let lift = sol.taylor_prime(a)?;
                                    let x = a.to_element();
                                    let u = holomorphic_projection(&x, rp, chart, bundle, cap)?;
                                    let v = antiholomorphic_projection(&x, rp, chart, bundle, cap)?;
                                    Ok(element_witness("π_z τ′(A)", &u, &pi_holomorphic(&lift))
                                        .or_else(|| element_witness("π_z̄ τ′(A)", &v, &pi_antiholomorphic(&lift))))
                                })
                                .chain(sections.iter().map(move |s| {
                                    let lift = sol.taylor_section(s)?;
                                    let x = s.to_element();
                                    let u = holomorphic_projection(&x, sol.r(), chart, bundle, cap)?;
                                    let v = antiholomorphic_projection(&x, rp, chart, bundle, cap)?;
                                    Ok(element_witness("π_z τ^E(s)", &u, &pi_holomorphic(&lift))
                                        .or_else(|| element_witness("π_z̄ τ^E(s)", &v, &pi_antiholomorphic(&lift))))
                                }))
                        })),
                )
            },
        ),
        Check::new(
            "wick.projected_lifts_of_flat_data",
            "π_z τ(f) = f for anti-holomorphic f and π_z̄ τ(g) = g for holomorphic g; likewise for covariantly constant sections and endomorphisms",
            move || {
                let fns = holo.iter().zip(antiholo.iter()).map(|(g, f)| {
                    let f = LambdaSeries::classical(f.clone());
                    let g = LambdaSeries::classical(g.clone());
                    Ok(element_witness("π_z τ(f)", &pi_holomorphic(&hol.taylor(&f)?), &f.to_element())
                        .or_else(|| {
                            let t = hol.taylor(&g).ok()?;
                            element_witness("π_z̄ τ(g)", &pi_antiholomorphic(&t), &g.to_element())
                        }))
                });
                let bundles = sols.iter().flat_map(|(sol, flat)| {
                    flat.iter().map(move |(s10, s01, b10, b01)| {
                        let s10 = LambdaSeries::classical(s10.clone());
                        let s01 = LambdaSeries::classical(s01.clone());
                        let b10 = LambdaSeries::classical(b10.clone());
                        let b01 = LambdaSeries::classical(b01.clone());
                        first_failure([
                            Ok(element_witness(
                                "π_z τ^E(s)",
                                &pi_holomorphic(&sol.taylor_section(&s10)?),
                                &s10.to_element(),
                            )),
                            Ok(element_witness(
                                "π_z̄ τ^E(t)",
                                &pi_antiholomorphic(&sol.taylor_section(&s01)?),
                                &s01.to_element(),
                            )),
                            Ok(element_witness(
                                "π_z τ′(B)",
                                &pi_holomorphic(&sol.taylor_prime(&b10)?),
                                &b10.to_element(),
                            )),
                            Ok(element_witness(
                                "π_z̄ τ′(B)",
                                &pi_antiholomorphic(&sol.taylor_prime(&b01)?),
                                &b01.to_element(),
                            )),
                        ])
                    })
                });
                first_failure(fns.chain(bundles))
            },
        ),
        Check::new(
            "wick.flat_witnesses",
            "the separation-of-variables inputs are covariantly constant along the required directions",
            move || {
                first_failure(sols.iter().flat_map(|(sol, flat)| {
                    let bundle = sol.bundle().expect("bundle");
                    flat.iter().map(move |(s10, s01, b10, b01)| {
                        first_failure([
                            flatness_witness("(1,0)-flat section", s10, bundle, 0..dim),
                            flatness_witness("(0,1)-flat section", s01, bundle, dim..2 * dim),
                            flatness_witness("(1,0)-flat endomorphism", b10, bundle, 0..dim),
                            flatness_witness("(0,1)-flat endomorphism", b01, bundle, dim..2 * dim),
                        ])
                    })
                }))
            },
        ),
        Check::new(
            "wick.separation_functions",
            "f ⋆ g = fg for holomorphic g and g ⋆ f = gf for anti-holomorphic g",
            move || {
                first_failure(mixed.iter().zip(holo.iter().zip(antiholo.iter())).map(|(f, (g, a))| {
                    let gs = LambdaSeries::classical(g.clone());
                    let expected = LambdaSeries::classical(&f.coeff(0) * g);
                    if let Some(w) = series_witness("f ⋆ g (g holomorphic)", &hol.star(f, &gs)?, &expected) {
                        return Ok(Some(w));
                    }
                    let a_s = LambdaSeries::classical(a.clone());
                    let expected = LambdaSeries::classical(a * &f.coeff(0));
                    Ok(series_witness("g ⋆ f (g anti-holomorphic)", &hol.star(&a_s, f)?, &expected))
                }))
            },
        ),
        Check::new(
            "wick.separation_modules",
            "B •′ s = Bs and B ⋆′ A = BA for (1,0)-flat B; s • f = sf for (1,0)-flat s; A •′ t = At for (0,1)-flat t; A ⋆′ B = AB for (0,1)-flat B",
            move || {
                first_failure(sols.iter().flat_map(|(sol, flat)| {
                    flat.iter().enumerate().map(move |(i, (s10, s01, b10, b01))| {
                        let a = &endos[i % endos.len()];
                        let s = &sections[i % sections.len()];
                        let f = &mixed[i % mixed.len()];
                        let (a0, s0, f0) = (a.coeff(0), s.coeff(0), f.coeff(0));
                        let kind = sol.bundle().expect("bundle").kind().name();
                        let c = |x: &Endo| LambdaSeries::classical(x.clone());
                        let cs = |x: &Section| LambdaSeries::classical(x.clone());
                        let items: [Result<Option<String>>; 5] = [
                            Ok(series_witness(
                                &format!("B •′ s ({kind})"),
                                &sol.module_left(&c(b10), s)?,
                                &cs(&pointwise_section(b10, &s0)),
                            )),
                            Ok(series_witness(
                                &format!("B ⋆′ A ({kind})"),
                                &sol.star_prime(&c(b10), a)?,
                                &c(&b10.matmul(&a0)),
                            )),
                            Ok(series_witness(
                                &format!("s • f ({kind})"),
                                &sol.module_right(&cs(s10), f)?,
                                &cs(&s10.scale_jet(&f0)),
                            )),
                            Ok(series_witness(
                                &format!("A •′ t ({kind})"),
                                &sol.module_left(a, &cs(s01))?,
                                &cs(&pointwise_section(&a0, s01)),
                            )),
                            Ok(series_witness(
                                &format!("A ⋆′ B ({kind})"),
                                &sol.star_prime(a, &c(b01))?,
                                &c(&a0.matmul(b01)),
                            )),
                        ];
                        first_failure(items)
                    })
                }))
            },
        ),
        Check::new(
            "wick.separation_negative_control",
            "for f = z and g = zz̄ the λ¹ part of f ⋆ g − fg is 2 g^{kℓ̄} ∂_k f ∂_ℓ̄ g, which is non-zero",
            move || {
                if cfg.truncation.lambda_order() < 1 {
                    return Ok(None);
                }
                let z = Jet::z(dim, 0);
                let zz = &z * &Jet::zbar(dim, 0);
                let prod = hol.star(&LambdaSeries::classical(z.clone()), &LambdaSeries::classical(zz.clone()))?;
                let expected = cfg.chart.inverse_metric().get(0, 0) * &z.scale(&GaussianRational::from_int(2));
                if expected.is_zero() {
                    return Ok(Some("the expected deviation vanishes".into()));
                }
                Ok(prod.coeff(1).disagreement(&expected).map(|d| format!("λ¹ deviation: {d}")))
            },
        ),
        Check::new(
            "wick.local_formulas",
            "anti-holomorphic frame: (s • f)ⁱ = sⁱ ⋆ f; holomorphic frame: A •′ s = (1/k) Σᵢ (A ⋆′ (s ⊗ eⁱ)) eᵢ",
            move || {
                first_failure(sections.iter().enumerate().map(|(i, s)| {
                    let f = &mixed[i % mixed.len()];
                    let a = &endos[i % endos.len()];
                    let direct = anti.module_right(s, f)?;
                    let local = anti.module_right_local(s, f)?;
                    if let Some(w) = series_witness("right action", &direct, &local) {
                        return Ok(Some(w));
                    }
                    Ok(series_witness("left action", &hol.module_left(a, s)?, &hol.module_left_local(a, s)?))
                }))
            },
        ),
        Check::new(
            "wick.frame_change",
            "the local formulas in two frames related by a transition φ agree after transforming the data, and φ φ⁻¹ = id",
            move || {
                let mut items = Vec::new();
                for sol in [hol, anti] {
                    let bundle = sol.bundle().expect("bundle");
                    let (phi, phi_inv) = transition(dim, rank, bundle.kind());
                    let glued: Endo = phi.matmul(&phi_inv);
                    if let Some((i, j, d)) = glued.first_disagreement(&Endo::identity(dim, rank)) {
                        return Ok(Some(format!("φ φ⁻¹ at ({i},{j}): {d}")));
                    }
                    let other_bundle = bundle.clone().with_transition(phi.clone())?.reframed()?;
                    let other = FedosovSolution::solve(
                        &cfg.chart,
                        Some(&other_bundle),
                        Rational::one(),
                        sol.omega().clone(),
                        cfg.truncation,
                    )?;
                    for (i, s) in sections.iter().enumerate() {
                        let s_other = transform_section(&phi_inv, s);
                        match bundle.kind() {
                            BundleKind::Holomorphic => {
                                let a = &endos[i % endos.len()];
                                let a_other = transform_endo(&phi_inv, &phi, a);
                                let here = transform_section(&phi_inv, &sol.module_left_local(a, s)?);
                                let there = other.module_left_local(&a_other, &s_other)?;
                                items.push(series_witness("left action across frames", &here, &there));
                            }
                            BundleKind::AntiHolomorphic => {
                                let f = &mixed[i % mixed.len()];
                                let here = transform_section(&phi_inv, &sol.module_right_local(s, f)?);
                                let there = other.module_right_local(&s_other, f)?;
                                items.push(series_witness("right action across frames", &here, &there));
                            }
                        }
                    }
                }
                first_failure(items.into_iter().map(Ok))
            },
        ),
    ];
    run_checks(checks, cfg.truncation)
}
