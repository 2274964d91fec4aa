//! The connection operators `D`, `D^E`, `D′` on Weyl-algebra elements:
//!
//! `D a = Σ_k dzᵏ ∧ (∂_k a − Γ^m_{kj} yʲ ∂_{yᵐ} a + bundle)
//!      + Σ_ℓ dz̄ˡ ∧ (∂_ℓ̄ a − Γ̄^m_{ℓj} ȳʲ ∂_{ȳᵐ} a + bundle)`.
//!
//! The bundle term is `−i A_a Ψ` on sections and `−i [A_a, B]` on
//! endomorphisms. Form generators carry constant coefficients, so the
//! torsion-free connection does not rotate them.

use crate::error::Result;
use crate::jet::Monomial;
use crate::matrix::{Endo, Section};
use crate::scalar::GaussianRational;
use crate::weyl::{Coeff, Key, Split, WeylElement};
use crate::Jet;

use super::{BundleChart, KaehlerChart};

/// How a bundle connection component acts on coefficient values.
pub trait BundleAction: Coeff {
    /// The term `−i A·v` (sections) or `−i[A, v]` (endomorphisms); `None`
    /// for scalars.
    fn bundle_term(&self, a: &Endo) -> Option<Self>;
}

impl BundleAction for Jet {
    fn bundle_term(&self, _: &Endo) -> Option<Self> {
        None
    }
}

impl BundleAction for Section {
    fn bundle_term(&self, a: &Endo) -> Option<Self> {
        let v: Section = a.matmul(self);
        Some(v.scale(&-GaussianRational::i()))
    }
}

impl BundleAction for Endo {
    fn bundle_term(&self, a: &Endo) -> Option<Self> {
        Some(a.commutator(self).scale(&-GaussianRational::i()))
    }
}

/// `∇_a v = ∂_a v + bundle term` for a value (no Weyl-algebra content);
/// directions `a < n` are `∂/∂zᵃ`, the others `∂/∂z̄`.
pub fn covariant_derivative<V: BundleAction>(v: &V, bundle: &BundleChart, a: usize) -> Result<V> {
    let mut out = v.derive(a)?;
    if let Some(t) = v.bundle_term(bundle.connection(a)) {
        out.add_assign(&t);
    }
    Ok(out)
}

/// Applies the connection operator restricted to the directions of `split`.
/// Scalars ignore the bundle; other values require one.
pub fn connection<V: BundleAction>(
    a: &WeylElement<V>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
    split: Split,
) -> Result<WeylElement<V>> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap());
    for v in split.range(dim) {
        let holo = v < dim;
        let dir = if holo { v } else { v - dim };
        let mut along = a.derive_coefficients(v)?;
        for (key, c) in a.terms() {
            for m in 0..dim {
                let var_m = if holo { m } else { dim + m };
                let Some((lowered, e)) = key.sym.lower(var_m) else {
                    continue;
                };
                for j in 0..dim {
                    let gamma = if holo {
                        chart.christoffel(m, dir, j)
                    } else {
                        chart.christoffel_bar(m, dir, j)
                    };
                    if gamma.is_exact_zero() {
                        continue;
                    }
                    let var_j = if holo { j } else { dim + j };
                    let s = GaussianRational::from_int(-(e as i64));
                    along.add_term(
                        Key {
                            sym: lowered.times(Monomial::var(var_j)),
                            ..*key
                        },
                        c.scale_jet(gamma).scale(&s),
                    );
                }
            }
            if let Some(b) = bundle {
                if let Some(t) = c.bundle_term(b.connection(v)) {
                    along.add_term(*key, t);
                }
            }
        }
        out.add_assign(&along.wedge_generator(v));
    }
    Ok(out)
}

/// Exterior derivative of a form-valued element without fibre content
/// dependence: differentiates coefficients only.
pub fn exterior_derivative<V: Coeff>(a: &WeylElement<V>) -> Result<WeylElement<V>> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap());
    for v in 0..2 * dim {
        out.add_assign(&a.derive_coefficients(v)?.wedge_generator(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Builtin, BundleKind};
    use crate::scalar::int;
    use crate::weyl::product::circ;
    use crate::weyl::{EndoElement, ScalarElement, SectionElement};
    use crate::Order;

    fn fs() -> KaehlerChart {
        KaehlerChart::builtin(Builtin::FubiniStudy, 1, 10, &int(1)).unwrap()
    }

    #[test]
    fn flat_connection_is_exterior_derivative() {
        let chart = KaehlerChart::builtin(Builtin::Flat, 1, 6, &int(1)).unwrap();
        let f = Jet::z(1, 0) * Jet::zbar(1, 0);
        let a = ScalarElement::from_value(f);
        let d = connection(&a, &chart, None, Split::Full).unwrap();
        let expected = ScalarElement::from_value(Jet::zbar(1, 0))
            .wedge_generator(0)
            .add(&ScalarElement::from_value(Jet::z(1, 0)).wedge_generator(1));
        assert_eq!(d, expected);
    }

    #[test]
    fn curvature_identity_for_scalars() {
        // D² a = (i/λ) ad(R) a
        let chart = fs();
        let metric = chart.inverse_metric();
        let y = ScalarElement::sym_generator(1, 0);
        let ybar = ScalarElement::sym_generator(1, 1);
        let a = y.sym_multiply(1).add(&ybar.scale_jet(&Jet::z(1, 0))).with_cap(6);
        let dd = connection(
            &connection(&a, &chart, None, Split::Full).unwrap(),
            &chart,
            None,
            Split::Full,
        )
        .unwrap();
        for kappa in [int(-1), int(0), int(1)] {
            let ad = crate::weyl::product::supercommutator(chart.symplectic_curvature(), &a, &kappa, metric, 6);
            let rhs = ad.divide_lambda().unwrap().mul_i();
            assert!(dd.agrees_with(&rhs), "kappa {kappa}: {:?}", dd.first_disagreement(&rhs));
        }
    }

    #[test]
    fn curvature_identity_for_endomorphisms() {
        let chart = fs();
        let metric = chart.inverse_metric();
        let h: crate::matrix::JetMatrix = crate::matrix::JetMatrix::from_rows(vec![
            vec![&Jet::one(1) + &(Jet::z(1, 0) * Jet::zbar(1, 0)), Jet::z(1, 0)],
            vec![
                Jet::zbar(1, 0),
                Jet::constant(1, GaussianRational::from_int(2), Order::Exact),
            ],
        ])
        .unwrap()
        .truncated(Order::Finite(8));
        let bundle = BundleChart::from_metric(h.retag(), BundleKind::Holomorphic).unwrap();
        let b = Endo::from_rows(vec![
            vec![Jet::z(1, 0), Jet::one(1)],
            vec![Jet::zbar(1, 0), Jet::zero(1, Order::Exact)],
        ])
        .unwrap();
        let a = EndoElement::from_value(b).sym_multiply(0).with_cap(5);
        let dd = connection(
            &connection(&a, &chart, Some(&bundle), Split::Full).unwrap(),
            &chart,
            Some(&bundle),
            Split::Full,
        )
        .unwrap();
        let lam_re = bundle.curvature().lambda_shift(1).scale(&-GaussianRational::i());
        let curv = chart.symplectic_curvature().to_endo(2).add(&lam_re);
        let ad = crate::weyl::product::supercommutator(&curv, &a, &int(1), metric, 5);
        let rhs = ad.divide_lambda().unwrap().mul_i();
        assert!(dd.agrees_with(&rhs), "{:?}", dd.first_disagreement(&rhs));

        // Sections: (D^E)² Ψ = (i/λ) ad(R) Ψ + R^E Ψ
        let psi = SectionElement::from_value(Section::column(vec![Jet::z(1, 0), Jet::one(1)]))
            .sym_multiply(1)
            .with_cap(5);
        let dd = connection(
            &connection(&psi, &chart, Some(&bundle), Split::Full).unwrap(),
            &chart,
            Some(&bundle),
            Split::Full,
        )
        .unwrap();
        let r = chart.symplectic_curvature().to_endo(2);
        let left = circ(&r, &psi, &int(1), metric, 5);
        let right = circ(&psi, chart.symplectic_curvature(), &int(1), metric, 5);
        let rhs =
            left.sub(&right)
                .divide_lambda()
                .unwrap()
                .mul_i()
                .add(&circ(bundle.curvature(), &psi, &int(1), metric, 5));
        assert!(dd.agrees_with(&rhs), "{:?}", dd.first_disagreement(&rhs));
    }
}
