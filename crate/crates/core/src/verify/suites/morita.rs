//! The bimodule over the Wick and anti-Wick products on sections of the
//! canonical line bundle.

use num_traits::One;

use crate::error::Result;
use crate::fedosov::morita::MoritaBimodule;
use crate::fedosov::{DeformedFunction, DeformedSection, LambdaSeries, Omega};
use crate::jet::{Jet, Order};
use crate::matrix::Endo;
use crate::scalar::{GaussianRational, Rational};
use crate::verify::oracle::oracle_flat_star;
use crate::verify::random::{section_spanning_set, Sampler, Variables};
use crate::verify::{
    element_witness, failed_setup, first_failure, run_checks, series_witness, zero_witness, Check, CheckReport,
    SuiteConfig,
};
use crate::weyl::product::circ;
use crate::weyl::{Coeff, WeylElement};

fn sign(odd: bool) -> GaussianRational {
    GaussianRational::from_int(if odd { -1 } else { 1 })
}

fn form_degree<V: Coeff>(a: &WeylElement<V>) -> u32 {
    a.terms().next().map(|(k, _)| k.form_degree()).unwrap_or(0)
}

fn flat_laplacian(f: &Jet) -> Result<Jet> {
    let dim = f.dim();
    let mut acc = Jet::zero(dim, Order::Exact);
    for k in 0..dim {
        acc = acc + f.derive_z(k)?.derive_zbar(k)?;
    }
    Ok(acc)
}

/// Coefficients of `exp(sign·λΔ) f` through `λ^max`.
fn heat_series(f: &Jet, sign: i64, max: u32) -> Result<Vec<Jet>> {
    let mut out = vec![f.clone()];
    for m in 1..=max {
        let next = flat_laplacian(&out[m as usize - 1])?
            .scale(&GaussianRational::real(Rational::new(sign.into(), (m as i64).into())));
        out.push(next);
    }
    Ok(out)
}

/// `(Σ λ^a f_a) ⋆_Weyl g` on flat unit-metric `ℂⁿ`, through `λ^max`.
fn weyl_product_of_series(left: &[Jet], right: &[Jet], max: u32) -> Result<DeformedFunction> {
    let dim = left[0].dim();
    let mut coeffs = vec![Jet::zero(dim, Order::Exact); max as usize + 1];
    for (a, f) in left.iter().enumerate() {
        for (b, g) in right.iter().enumerate() {
            if a + b > max as usize {
                continue;
            }
            let prod = oracle_flat_star(f, g, &Rational::from_integer(0.into()), max - (a + b) as u32)?;
            for (c, term) in prod.coeffs().iter().enumerate() {
                coeffs[a + b + c] = &coeffs[a + b + c] + term;
            }
        }
    }
    Ok(LambdaSeries::new(coeffs))
}

pub(crate) fn morita(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let setup = || -> Result<MoritaBimodule> {
        let omega = Omega::new(cfg.omega.clone())?;
        omega.check_for(&Rational::one())?;
        MoritaBimodule::new(&cfg.chart, omega, cfg.truncation)
    };
    let bimodule = match setup() {
        Ok(m) => m,
        Err(e) => {
            return vec![failed_setup(
                "morita.setup",
                "Wick and anti-Wick solutions from one Ω and the canonical line bundle",
                &e,
                cfg.truncation,
            )]
        }
    };
    let m = &bimodule;
    let dim = cfg.chart.dim();
    let n = cfg.truncation.lambda_order();
    let cap = cfg.spanning_cap;
    let metric = cfg.chart.inverse_metric();
    let mut sampler = Sampler::new(cfg.seed, dim);
    let spanning = section_spanning_set(&mut sampler, 1, cap, cfg.samples);
    let samples = cfg.samples.max(1);
    let functions: Vec<DeformedFunction> = (0..2 * samples)
        .map(|_| LambdaSeries::classical(sampler.mixed(3)))
        .collect();
    let sections: Vec<DeformedSection> = (0..samples)
        .map(|_| LambdaSeries::classical(sampler.section(1, Variables::Mixed, 2)))
        .collect();
    let elements: Vec<_> = (0..samples)
        .map(|i| {
            (
                sampler.scalar_element(cap + 1).form_part((i % 2) as u32),
                sampler.section_element(1, cap + 1).form_part(((i / 2) % 2) as u32),
                sampler.scalar_element(cap + 1).form_part(((i + 1) % 3) as u32),
            )
        })
        .collect();
    let (spanning, functions, sections, elements) = (&spanning, &functions, &sections, &elements);
    let one = LambdaSeries::classical(Jet::one(dim));
    let one = &one;

    let checks = vec![
        Check::new(
            "morita.derivation_square",
            "(𝒟^L)² = 0 on the spanning set",
            move || {
                let d = m.derivation();
                first_failure(
                    spanning
                        .iter()
                        .map(|psi| Ok(zero_witness("(𝒟^L)²", &d.apply(&d.apply(psi)?)?))),
                )
            },
        ),
        Check::new(
            "morita.module_derivation",
            "𝒟^L(a ◇ Ψ) = 𝒟_Wick a ◇ Ψ + (−1)^{|a|} a ◇ 𝒟^LΨ and 𝒟^L(Ψ ◇̄ b) = 𝒟^LΨ ◇̄ b + (−1)^{|Ψ|} Ψ ◇̄ 𝒟_antiWick b",
            move || {
                let dl = m.derivation();
                let dw = m.wick().derivation();
                let da = m.anti_wick().derivation();
                first_failure(elements.iter().map(|(a, psi, b)| {
                    let lhs = dl.apply(&m.act_left(a, psi))?;
                    let rhs = m
                        .act_left(&dw.apply(a)?, psi)
                        .add(&m.act_left(a, &dl.apply(psi)?).scale(&sign(form_degree(a) % 2 == 1)));
                    if let Some(w) = element_witness("left action", &lhs, &rhs) {
                        return Ok(Some(w));
                    }
                    let lhs = dl.apply(&m.act_right(psi, b))?;
                    let rhs = m
                        .act_right(&dl.apply(psi)?, b)
                        .add(&m.act_right(psi, &da.apply(b)?).scale(&sign(form_degree(psi) % 2 == 1)));
                    Ok(element_witness("right action", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "morita.curvature_shift",
            "R ∘_Weyl Ψ = R ◇ Ψ + λϱΨ and Ψ ∘_Weyl R = Ψ ◇̄ R − λϱΨ",
            move || {
                let r = cfg.chart.symplectic_curvature();
                let rho = cfg.chart.ricci().lambda_shift(1);
                let zero = Rational::from_integer(0.into());
                first_failure(elements.iter().map(|(_, psi, _)| {
                    let limit = psi.cap();
                    let r = r.clone().with_cap(limit);
                    let rho = rho.clone().with_cap(limit);
                    let rho_psi = circ(&rho, psi, &zero, metric, limit);
                    let psi_rho = circ(psi, &rho, &zero, metric, limit);
                    let lhs = circ(&r, psi, &zero, metric, limit);
                    if let Some(w) = element_witness("left", &lhs, &m.act_left(&r, psi).add(&rho_psi)) {
                        return Ok(Some(w));
                    }
                    let lhs = circ(psi, &r, &zero, metric, limit);
                    Ok(element_witness("right", &lhs, &m.act_right(psi, &r).sub(&psi_rho)))
                }))
            },
        ),
        Check::new("morita.lift", "σ τ^L(s) = s and 𝒟^L τ^L(s) = 0", move || {
            let d = m.derivation();
            first_failure(sections.iter().map(|s| {
                let t = m.taylor(s)?;
                Ok(
                    element_witness("στ^L(s)", &crate::weyl::ops::sigma(&t), &s.to_element())
                        .or_else(|| zero_witness("𝒟^Lτ^L(s)", &d.apply(&t).ok()?)),
                )
            }))
        }),
        Check::new("morita.unit", "1 ♦ s = s and s ♦̄ 1 = s", move || {
            first_failure(sections.iter().map(|s| {
                Ok(series_witness("1 ♦ s", &m.left_action(one, s)?, s).or(series_witness(
                    "s ♦̄ 1",
                    &m.right_action(s, one)?,
                    s,
                )))
            }))
        }),
        Check::new(
            "morita.classical_limit",
            "f ♦ s and s ♦̄ g are the pointwise products at λ⁰",
            move || {
                first_failure(sections.iter().zip(functions.chunks(2)).map(|(s, p)| {
                    let expected = s.coeff(0).scale_jet(&p[0].coeff(0));
                    if let Some(d) = m.left_action(&p[0], s)?.coeff(0).disagreement(&expected) {
                        return Ok(Some(format!("f ♦ s at λ⁰: {d}")));
                    }
                    let expected = s.coeff(0).scale_jet(&p[1].coeff(0));
                    Ok(m.right_action(s, &p[1])?
                        .coeff(0)
                        .disagreement(&expected)
                        .map(|d| format!("s ♦̄ g at λ⁰: {d}")))
                }))
            },
        ),
        Check::new(
            "morita.bimodule_laws",
            "(f ⋆_Wick g) ♦ s = f ♦ (g ♦ s), s ♦̄ (g ⋆_antiWick h) = (s ♦̄ g) ♦̄ h, (f ♦ s) ♦̄ g = f ♦ (s ♦̄ g)",
            move || {
                first_failure(sections.iter().zip(functions.chunks(2)).map(|(s, p)| {
                    let (f, g) = (&p[0], &p[1]);
                    let lhs = m.left_action(&m.wick().star(f, g)?, s)?;
                    let rhs = m.left_action(f, &m.left_action(g, s)?)?;
                    if let Some(w) = series_witness("left module", &lhs, &rhs) {
                        return Ok(Some(w));
                    }
                    let lhs = m.right_action(s, &m.anti_wick().star(f, g)?)?;
                    let rhs = m.right_action(&m.right_action(s, f)?, g)?;
                    if let Some(w) = series_witness("right module", &lhs, &rhs) {
                        return Ok(Some(w));
                    }
                    let lhs = m.right_action(&m.left_action(f, s)?, g)?;
                    let rhs = m.left_action(f, &m.right_action(s, g)?)?;
                    Ok(series_witness("bimodule", &lhs, &rhs))
                }))
            },
        ),
        Check::new(
            "morita.same_omega",
            "both orderings are solved from the same Ω",
            move || {
                let (a, b) = (m.wick().omega().form(), m.anti_wick().omega().form());
                Ok(element_witness("Ω of the two solutions", a, b))
            },
        ),
        Check::new(
            "morita.flat_closed_form",
            "on unit-metric flat charts f ♦ s = (e^{−λΔ} f) ⋆_Weyl s and s ♦̄ g = s ⋆_Weyl (e^{λΔ} g)",
            move || {
                let g = cfg.chart.metric();
                let id = Endo::identity(dim, dim);
                let unit = (0..dim).all(|i| (0..dim).all(|j| g.get(i, j) == id.get(i, j)));
                if !unit || !m.wick().r().is_zero() || !m.anti_wick().r().is_zero() {
                    return Ok(None);
                }
                first_failure(sections.iter().zip(functions.chunks(2)).map(|(s, p)| {
                    let s0 = vec![s.coeff(0).component(0).clone()];
                    let left = weyl_product_of_series(&heat_series(&p[0].coeff(0), -1, n)?, &s0, n)?;
                    let engine = m.left_action(&p[0], s)?.map(|c| c.component(0).clone());
                    if let Some(w) = series_witness("f ♦ s", &engine, &left) {
                        return Ok(Some(w));
                    }
                    let right = weyl_product_of_series(&s0, &heat_series(&p[1].coeff(0), 1, n)?, n)?;
                    let engine = m.right_action(s, &p[1])?.map(|c| c.component(0).clone());
                    Ok(series_witness("s ♦̄ g", &engine, &right))
                }))
            },
        ),
    ];
    run_checks(checks, cfg.truncation)
}
