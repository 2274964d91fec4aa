//! Curvature identities of the chart and bundle, and the connection
//! operators on the Weyl algebra.

use super::{kappas, some_bundle};
use crate::error::Result;
use crate::geometry::{connection, BundleAction, BundleChart, KaehlerChart};
use crate::scalar::GaussianRational;
use crate::verify::random::{endo_spanning_set, scalar_spanning_set, section_spanning_set, Sampler};
use crate::verify::{
    element_witness, failed_setup, first_failure, run_checks, zero_witness, Check, CheckReport, SuiteConfig,
};
use crate::weyl::ops::{delta, pi_antiholomorphic, pi_holomorphic};
use crate::weyl::product::{circ, laplace_fib, s_kappa, supercommutator};
use crate::weyl::{Split, WeylElement};

fn full<V: BundleAction>(
    a: &WeylElement<V>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
) -> Result<WeylElement<V>> {
    connection(a, chart, bundle, Split::Full)
}

/// `[Δ_fib, D] = 0`, `δD + Dδ = 0` and `π_z D = D_z π_z` (with its mirror).
fn operator_relations<V: BundleAction>(
    a: &WeylElement<V>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
) -> Result<Option<String>> {
    let metric = chart.inverse_metric();
    let lhs = laplace_fib(&full(a, chart, bundle)?, metric);
    let rhs = full(&laplace_fib(a, metric), chart, bundle)?;
    if let Some(w) = element_witness("[Δ_fib, D]", &lhs, &rhs) {
        return Ok(Some(w));
    }
    let anti = delta(&full(a, chart, bundle)?, Split::Full).add(&full(&delta(a, Split::Full), chart, bundle)?);
    if let Some(w) = zero_witness("δD + Dδ", &anti) {
        return Ok(Some(w));
    }
    let lhs = pi_holomorphic(&full(a, chart, bundle)?);
    let rhs = connection(&pi_holomorphic(a), chart, bundle, Split::Holo)?;
    if let Some(w) = element_witness("π_z D vs D_z π_z", &lhs, &rhs) {
        return Ok(Some(w));
    }
    let lhs = pi_antiholomorphic(&full(a, chart, bundle)?);
    let rhs = connection(&pi_antiholomorphic(a), chart, bundle, Split::AntiHolo)?;
    Ok(element_witness("π_z̄ D vs D_z̄ π_z̄", &lhs, &rhs))
}

pub(crate) fn geometry(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let chart = &cfg.chart;
    let dim = chart.dim();
    let bundle = match some_bundle(cfg) {
        Ok(b) => b,
        Err(e) => {
            return vec![failed_setup(
                "geometry.setup",
                "test bundle construction",
                &e,
                cfg.truncation,
            )]
        }
    };
    let bundle = &bundle;
    let rank = bundle.rank();
    let cap = cfg.spanning_cap;
    let mut sampler = Sampler::new(cfg.seed, dim);
    let scalars = scalar_spanning_set(&mut sampler, cap, cfg.samples);
    let endos = endo_spanning_set(&mut sampler, rank, cap, cfg.samples);
    let sections = section_spanning_set(&mut sampler, rank, cap, cfg.samples);
    let (scalars, endos, sections) = (&scalars, &endos, &sections);
    let metric = chart.inverse_metric();
    let r = chart.symplectic_curvature();
    let ricci = chart.ricci();
    let re = bundle.curvature();

    let checks = vec![
        Check::new(
            "geometry.curvature_symmetry",
            "g_{jl̄} ∂_p Γ̄^l_{qn} = g_{mn̄} ∂_q̄ Γ^m_{pj}",
            move || chart.curvature_symmetry_defect(),
        ),
        Check::new(
            "geometry.fibre_laplacian_of_curvature",
            "Δ_fib R = ϱ with ϱ from log det g",
            move || Ok(element_witness("Δ_fib R vs ϱ", &laplace_fib(r, metric), ricci)),
        ),
        Check::new("geometry.ricci_canonical", "ϱ = (i/2) R^{L_can}", move || {
            Ok(element_witness("ϱ vs (i/2)R^L", ricci, &chart.ricci_from_canonical()))
        }),
        Check::new(
            "geometry.canonical_curvature_two_ways",
            "R^{L_can} from the canonical connection equals the trace of the curvature tensor",
            move || {
                Ok(element_witness(
                    "two expressions",
                    chart.canonical_curvature(),
                    &chart.canonical_curvature_from_tensor(),
                ))
            },
        ),
        Check::new(
            "geometry.bianchi",
            "δR = 0, DR = 0, δR^E = 0, D′R^E = 0",
            move || {
                first_failure([
                    Ok(zero_witness("δR", &delta(r, Split::Full))),
                    full(r, chart, None).map(|d| zero_witness("DR", &d)),
                    Ok(zero_witness("δR^E", &delta(re, Split::Full))),
                    full(re, chart, Some(bundle)).map(|d| zero_witness("D′R^E", &d)),
                ])
            },
        ),
        Check::new(
            "geometry.ordering_shift_of_curvature",
            "S^κ R = R + κλϱ and S^κ R^E = R^E",
            move || {
                first_failure(kappas().into_iter().flat_map(|k| {
                    let shifted = r.add(&ricci.lambda_shift(1).scale(&GaussianRational::real(k.clone())));
                    [
                        Ok(element_witness(
                            &format!("S^κR, kappa {k}"),
                            &s_kappa(r, &k, metric),
                            &shifted,
                        )),
                        Ok(element_witness(
                            &format!("S^κR^E, kappa {k}"),
                            &s_kappa(re, &k, metric),
                            re,
                        )),
                    ]
                }))
            },
        ),
        Check::new(
            "geometry.connection_square",
            "D² = (i/λ) ad_κ(R) for κ ∈ {−1, 0, 1}",
            move || {
                first_failure(scalars.iter().flat_map(|a| {
                    kappas().map(move |k| {
                        let dd = full(&full(a, chart, None)?, chart, None)?;
                        let ad = supercommutator(r, a, &k, metric, a.cap() + 2).divide_lambda()?.mul_i();
                        Ok(element_witness(&format!("kappa {k}"), &dd, &ad))
                    })
                }))
            },
        ),
        Check::new(
            "geometry.bundle_connection_square",
            "D′² = (i/λ) ad_κ(R − iλR^E) on endomorphisms",
            move || {
                let curv = r.to_endo(rank).add(&re.lambda_shift(1).scale(&-GaussianRational::i()));
                let curv = &curv;
                first_failure(endos.iter().flat_map(|a| {
                    kappas().map(move |k| {
                        let dd = full(&full(a, chart, Some(bundle))?, chart, Some(bundle))?;
                        let ad = supercommutator(curv, a, &k, metric, a.cap() + 2)
                            .divide_lambda()?
                            .mul_i();
                        Ok(element_witness(&format!("kappa {k}"), &dd, &ad))
                    })
                }))
            },
        ),
        Check::new(
            "geometry.section_connection_square",
            "(D^E)²Ψ = (i/λ)(R ∘_κ Ψ − Ψ ∘_κ R) + R^E ∘_κ Ψ",
            move || {
                let r_endo = r.to_endo(rank);
                let r_endo = &r_endo;
                first_failure(sections.iter().flat_map(|psi| {
                    kappas().map(move |k| {
                        let limit = psi.cap() + 2;
                        let dd = full(&full(psi, chart, Some(bundle))?, chart, Some(bundle))?;
                        let inner = circ(r_endo, psi, &k, metric, limit)
                            .sub(&circ(psi, r, &k, metric, limit))
                            .divide_lambda()?
                            .mul_i();
                        let rhs = inner.add(&circ(re, psi, &k, metric, psi.cap()));
                        Ok(element_witness(&format!("kappa {k}"), &dd, &rhs))
                    })
                }))
            },
        ),
        Check::new(
            "geometry.operator_relations",
            "[Δ_fib, D] = 0, δD + Dδ = 0, π_z D = D_z π_z, π_z̄ D = D_z̄ π_z̄",
            move || {
                first_failure(
                    scalars
                        .iter()
                        .map(|a| operator_relations(a, chart, None))
                        .chain(endos.iter().map(|a| operator_relations(a, chart, Some(bundle))))
                        .chain(sections.iter().map(|a| operator_relations(a, chart, Some(bundle)))),
                )
            },
        ),
        Check::new(
            "geometry.bundle_compatibility",
            "dH = i(A^†H − HA) and R^E of type (1,1)",
            move || {
                if let Some(w) = bundle.compatibility_defect()? {
                    return Ok(Some(w));
                }
                if !bundle.curvature_is_type_one_one() {
                    return Ok(Some("bundle curvature has a (2,0) or (0,2) part".into()));
                }
                Ok(None)
            },
        ),
    ];
    run_checks(checks, cfg.truncation)
}
