//! Kähler charts and Hermitian vector bundles over them.
//!
//! All tensors are jets at the chart basepoint. Index conventions:
//!
//! * `g_{kℓ̄} = ∂_k ∂_ℓ̄ K`, stored as `metric[(k, ℓ)]`;
//! * `g^{kℓ̄}` with `g^{kℓ̄} g_{mℓ̄} = δᵏₘ`, stored as `inverse[(k, ℓ)]`;
//! * `Γ^ℓ_{km} = g^{ℓn̄} ∂_k g_{mn̄}` (symmetric in `k, m`);
//! * `R^j_{mkℓ̄} = −∂_ℓ̄ Γ^j_{km}`;
//! * `R^{L_can} = ∂_ℓ̄ Γ^j_{kj} dzᵏ ∧ dz̄ˡ` and `ϱ = (i/2) R^{L_can}`;
//! * the symplectic curvature element
//!   `R = (i/2) g_{mn̄} ∂_q̄ Γ^m_{pj} yʲ ȳⁿ ⊗ dzᵖ ∧ dz̄^q`.

mod bundle;
mod connection;

pub use bundle::{BundleChart, BundleKind};
pub use connection::{connection, covariant_derivative, exterior_derivative, BundleAction};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Monomial, Order};
use crate::matrix::JetMatrix;
use crate::scalar::{GaussianRational, Rational};
use crate::weyl::product::InverseMetric;
use crate::weyl::{Key, ScalarElement};

/// Built-in Kähler potentials, each multiplied by a positive rational scale.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `Σ zᵏ z̄ᵏ`
    Flat,
    /// `log(1 + Σ zᵏ z̄ᵏ)`
    FubiniStudy,
    /// `−log(1 − Σ zᵏ z̄ᵏ)`
    HyperbolicDisc,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "flat" => Some(Builtin::Flat),
            "fubini_study" => Some(Builtin::FubiniStudy),
            "hyperbolic_disc" => Some(Builtin::HyperbolicDisc),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Flat => "flat",
            Builtin::FubiniStudy => "fubini_study",
            Builtin::HyperbolicDisc => "hyperbolic_disc",
        }
    }

    /// Potential jet through degree `order` (exact for the flat potential).
    pub fn potential(self, dim: usize, order: u32, scale: &Rational) -> Jet {
        let mut t = Jet::zero(dim, Order::Exact);
        for k in 0..dim {
            t.add_term(Monomial::var(k).times(Monomial::var(dim + k)), GaussianRational::one());
        }
        let scale = GaussianRational::real(scale.clone());
        match self {
            Builtin::Flat => t.scale(&scale),
            Builtin::FubiniStudy | Builtin::HyperbolicDisc => {
                // log(1 + s t) = Σ_{m ≥ 1} (−1)^{m+1} (s t)^m / m; s = ±1.
                let sign: i64 = if self == Builtin::FubiniStudy { 1 } else { -1 };
                let t = t.with_order(Order::Finite(order));
                let mut acc = Jet::zero(dim, Order::Finite(order));
                let mut power = Jet::one(dim);
                for m in 1..=(order / 2).max(1) as i64 {
                    power = &power * &t;
                    let s = sign.pow(m as u32);
                    let c = if m % 2 == 1 { s } else { -s };
                    acc.add_scaled(&power, &GaussianRational::from_ratio(c, m));
                }
                let acc = if self == Builtin::HyperbolicDisc {
                    acc.scale(&GaussianRational::from_int(-1))
                } else {
                    acc
                };
                acc.scale(&scale)
            }
        }
    }
}

/// A holomorphic chart with its Kähler metric and curvature data.
#[derive(Clone, Debug)]
pub struct KaehlerChart {
    dim: usize,
    potential: Option<Jet>,
    metric: JetMatrix,
    inverse: JetMatrix,
    inverse_metric: InverseMetric,
    /// `christoffel[(ℓ·n + k)·n + m] = Γ^ℓ_{km}`
    christoffel: Vec<Jet>,
    /// Conjugates `Γ̄^ℓ_{km}` acting on anti-holomorphic indices.
    christoffel_bar: Vec<Jet>,
    /// `curvature[((j·n + m)·n + k)·n + ℓ] = R^j_{mkℓ̄}`
    curvature: Vec<Jet>,
    canonical_curvature: ScalarElement,
    ricci: ScalarElement,
    symplectic_curvature: ScalarElement,
    christoffel_flipped: bool,
}

impl KaehlerChart {
    /// Chart from a Kähler potential jet.
    pub fn from_potential(potential: Jet) -> Result<Self> {
        let dim = potential.dim();
        let mut rows = Vec::with_capacity(dim);
        for k in 0..dim {
            let dk = potential.derive_z(k)?;
            rows.push((0..dim).map(|l| dk.derive_zbar(l)).collect::<Result<Vec<_>>>()?);
        }
        let mut chart = Self::from_metric(JetMatrix::from_rows(rows)?)?;
        chart.potential = Some(potential);
        Ok(chart)
    }

    /// Chart from a built-in potential through jet order `order`.
    pub fn builtin(which: Builtin, dim: usize, order: u32, scale: &Rational) -> Result<Self> {
        Self::from_potential(which.potential(dim, order, scale))
    }

    /// Chart from metric jets `g_{kℓ̄}`, checked to be Hermitian and Kähler.
    pub fn from_metric(metric: JetMatrix) -> Result<Self> {
        let dim = metric.dim();
        if metric.rows() != dim || metric.cols() != dim {
            return Err(Error::DimensionMismatch(metric.rows(), dim));
        }
        if !metric.is_hermitian() {
            return Err(Error::NonHermitianMetric("g_{kl} is not conjugate symmetric".into()));
        }
        if metric.determinant().constant_term().is_zero() {
            return Err(Error::DegenerateMetric);
        }
        let mut derivs = Vec::with_capacity(dim * dim * dim);
        for k in 0..dim {
            for m in 0..dim {
                for n in 0..dim {
                    derivs.push(metric.get(m, n).derive_z(k)?);
                }
            }
        }
        let d = |k: usize, m: usize, n: usize| &derivs[(k * dim + m) * dim + n];
        for k in 0..dim {
            for m in 0..dim {
                for n in 0..dim {
                    if !d(k, m, n).agrees_with(d(m, k, n)) {
                        return Err(Error::NonKaehlerMetric(format!(
                            "d_{} g_({},{}) differs from d_{} g_({},{})",
                            k + 1,
                            m + 1,
                            n + 1,
                            m + 1,
                            k + 1,
                            n + 1
                        )));
                    }
                }
            }
        }
        // g^{kℓ̄} g_{mℓ̄} = δ: the inverse of the transpose.
        let inverse = metric.transpose().inverse_within_order()?;
        let mut christoffel = Vec::with_capacity(dim * dim * dim);
        for l in 0..dim {
            for k in 0..dim {
                for m in 0..dim {
                    let mut acc = Jet::zero(dim, Order::Exact);
                    for n in 0..dim {
                        let (g, dg) = (inverse.get(l, n), d(k, m, n));
                        if g.is_exact_zero() || dg.is_exact_zero() {
                            continue;
                        }
                        acc.add_assign_ref(&(g * dg));
                    }
                    christoffel.push(acc);
                }
            }
        }
        let inverse_metric = InverseMetric::new(dim, inverse.entries().to_vec());
        let mut chart = KaehlerChart {
            dim,
            potential: None,
            metric,
            inverse,
            inverse_metric,
            christoffel,
            christoffel_bar: Vec::new(),
            curvature: Vec::new(),
            canonical_curvature: ScalarElement::zero(dim),
            ricci: ScalarElement::zero(dim),
            symplectic_curvature: ScalarElement::zero(dim),
            christoffel_flipped: false,
        };
        chart.ricci = chart.ricci_from_determinant()?;
        chart.derive_curvature()?;
        Ok(chart)
    }

    /// Negative control: the same chart with the sign of every Christoffel
    /// symbol flipped. Curvature data derived from `Γ` follow the flip; the
    /// Ricci form, computed from `det g`, does not.
    pub fn with_flipped_christoffel(&self) -> Result<Self> {
        let mut out = self.clone();
        out.christoffel = out.christoffel.iter().map(|g| -g).collect();
        out.christoffel_flipped = !out.christoffel_flipped;
        out.derive_curvature()?;
        Ok(out)
    }

    fn derive_curvature(&mut self) -> Result<()> {
        let dim = self.dim;
        self.christoffel_bar = self.christoffel.iter().map(Jet::conj).collect();
        let mut curvature = Vec::with_capacity(dim.pow(4));
        for j in 0..dim {
            for m in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        curvature.push(-&self.christoffel(j, k, m).derive_zbar(l)?);
                    }
                }
            }
        }
        self.curvature = curvature;

        let mut canonical = ScalarElement::zero(dim);
        for k in 0..dim {
            for l in 0..dim {
                let mut c = Jet::zero(dim, Order::Exact);
                for j in 0..dim {
                    c.add_assign_ref(&self.christoffel(j, k, j).derive_zbar(l)?);
                }
                canonical.add_term(type_one_one_key(dim, k, l), c);
            }
        }
        self.canonical_curvature = canonical;

        let half_i = half_i();
        let mut symplectic = ScalarElement::zero(dim);
        for p in 0..dim {
            for q in 0..dim {
                let form = type_one_one_key(dim, p, q).asym;
                for j in 0..dim {
                    for n in 0..dim {
                        let mut c = Jet::zero(dim, Order::Exact);
                        for m in 0..dim {
                            let g = self.metric.get(m, n);
                            let dgamma = self.christoffel(m, p, j).derive_zbar(q)?;
                            if g.is_exact_zero() || dgamma.is_exact_zero() {
                                continue;
                            }
                            c.add_assign_ref(&(g * &dgamma));
                        }
                        let sym = Monomial::var(j).times(Monomial::var(dim + n));
                        symplectic.add_term(Key::new(0, sym, form), c.scale(&half_i));
                    }
                }
            }
        }
        self.symplectic_curvature = symplectic;
        Ok(())
    }

    /// `ϱ = (i/2) ∂_ℓ̄(∂_k det g / det g) dzᵏ ∧ dz̄ˡ`, independent of `Γ`.
    fn ricci_from_determinant(&self) -> Result<ScalarElement> {
        let dim = self.dim;
        let det = self.metric.determinant();
        let inv = det.invert()?;
        let half_i = half_i();
        let mut out = ScalarElement::zero(dim);
        for k in 0..dim {
            let log_dk = &det.derive_z(k)? * &inv;
            for l in 0..dim {
                out.add_term(type_one_one_key(dim, k, l), log_dk.derive_zbar(l)?.scale(&half_i));
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn potential(&self) -> Option<&Jet> {
        self.potential.as_ref()
    }

    /// `g_{kℓ̄}`
    pub fn metric(&self) -> &JetMatrix {
        &self.metric
    }

    /// `g^{kℓ̄}`
    pub fn inverse(&self) -> &JetMatrix {
        &self.inverse
    }

    pub fn inverse_metric(&self) -> &InverseMetric {
        &self.inverse_metric
    }

    /// `Γ^ℓ_{km}`
    pub fn christoffel(&self, l: usize, k: usize, m: usize) -> &Jet {
        &self.christoffel[(l * self.dim + k) * self.dim + m]
    }

    /// `Γ̄^ℓ_{km}`, the conjugate symbol acting on anti-holomorphic indices.
    pub fn christoffel_bar(&self, l: usize, k: usize, m: usize) -> &Jet {
        &self.christoffel_bar[(l * self.dim + k) * self.dim + m]
    }

    /// `R^j_{mkℓ̄}`
    pub fn curvature(&self, j: usize, m: usize, k: usize, l: usize) -> &Jet {
        let n = self.dim;
        &self.curvature[((j * n + m) * n + k) * n + l]
    }

    /// Curvature two-form of the canonical line bundle.
    pub fn canonical_curvature(&self) -> &ScalarElement {
        &self.canonical_curvature
    }

    /// The Ricci form `ϱ`.
    pub fn ricci(&self) -> &ScalarElement {
        &self.ricci
    }

    /// The symplectic curvature element `R` (symmetric degree 2, form degree 2).
    pub fn symplectic_curvature(&self) -> &ScalarElement {
        &self.symplectic_curvature
    }

    /// `ω = (i/2) g_{kℓ̄} dzᵏ ∧ dz̄ˡ`
    pub fn kaehler_form(&self) -> ScalarElement {
        let half_i = half_i();
        let mut out = ScalarElement::zero(self.dim);
        for k in 0..self.dim {
            for l in 0..self.dim {
                out.add_term(type_one_one_key(self.dim, k, l), self.metric.get(k, l).scale(&half_i));
            }
        }
        out
    }

    pub fn christoffel_flipped(&self) -> bool {
        self.christoffel_flipped
    }

    /// Trusted order of the metric jets.
    pub fn metric_order(&self) -> Order {
        self.metric.order()
    }

    /// Ricci form computed through the canonical curvature, `(i/2) R^{L_can}`.
    pub fn ricci_from_canonical(&self) -> ScalarElement {
        self.canonical_curvature.scale(&half_i())
    }

    /// `−R^j_{jkℓ̄} dzᵏ ∧ dz̄ˡ`, the second expression for the canonical
    /// curvature.
    pub fn canonical_curvature_from_tensor(&self) -> ScalarElement {
        let mut out = ScalarElement::zero(self.dim);
        for k in 0..self.dim {
            for l in 0..self.dim {
                let mut c = Jet::zero(self.dim, Order::Exact);
                for j in 0..self.dim {
                    c.add_assign_ref(&-self.curvature(j, j, k, l));
                }
                out.add_term(type_one_one_key(self.dim, k, l), c);
            }
        }
        out
    }

    /// Both sides of the metric symmetry of the curvature tensor,
    /// `g_{jl̄} ∂_p Γ̄^l_{qn}` and `g_{mn̄} ∂_q̄ Γ^m_{pj}`, for every
    /// `(p, q, j, n)`; the first pair that differs is returned.
    pub fn curvature_symmetry_defect(&self) -> Result<Option<String>> {
        let n = self.dim;
        for p in 0..n {
            for q in 0..n {
                for j in 0..n {
                    for nn in 0..n {
                        let mut lhs = Jet::zero(n, Order::Exact);
                        let mut rhs = Jet::zero(n, Order::Exact);
                        for l in 0..n {
                            lhs.add_assign_ref(&(self.metric.get(j, l) * &self.christoffel_bar(l, q, nn).derive_z(p)?));
                            rhs.add_assign_ref(&(self.metric.get(l, nn) * &self.christoffel(l, p, j).derive_zbar(q)?));
                        }
                        if let Some((m, a, b)) = lhs.first_disagreement(&rhs) {
                            return Ok(Some(format!(
                                "p={} q={} j={} n={} at {}: {a} vs {b}",
                                p + 1,
                                q + 1,
                                j + 1,
                                nn + 1,
                                crate::jet::monomial_name(m, n)
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn half_i() -> GaussianRational {
    GaussianRational::new(Rational::from_integer(0.into()), crate::scalar::rat(1, 2))
}

/// Key of the two-form `dzᵏ ∧ dz̄ˡ`.
pub fn type_one_one_key(dim: usize, k: usize, l: usize) -> Key {
    Key::new(0, Monomial::ONE, (1u8 << k) | (1u8 << (dim + l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::weyl::product::laplace_fib;

    fn fs(order: u32) -> KaehlerChart {
        KaehlerChart::builtin(Builtin::FubiniStudy, 1, order, &int(1)).unwrap()
    }

    #[test]
    fn flat_chart_has_no_curvature() {
        let chart = KaehlerChart::builtin(Builtin::Flat, 2, 6, &int(1)).unwrap();
        assert!(chart.metric().is_exact_constant());
        assert!(chart.christoffel(0, 0, 0).is_exact_zero());
        assert!(chart.symplectic_curvature().is_empty());
        assert!(chart.ricci().is_empty());
    }

    #[test]
    fn fubini_study_metric_and_christoffel() {
        let chart = fs(8);
        let zz = Jet::z(1, 0) * Jet::zbar(1, 0);
        let one_plus = &Jet::one(1) + &zz;
        // g = (1 + zz̄)^{-2}
        let expected = one_plus.pow(2).invert_to(6).unwrap();
        assert!(chart.metric().get(0, 0).agrees_with(&expected));
        // Γ = −2z̄/(1 + zz̄)
        let gamma = (Jet::zbar(1, 0).scale(&GaussianRational::from_int(-2))) * one_plus.invert_to(5).unwrap();
        assert!(chart.christoffel(0, 0, 0).agrees_with(&gamma));
        // R^{L_can}(0) = −2 dz ∧ dz̄
        let at_origin = chart.canonical_curvature().get(&type_one_one_key(1, 0, 0)).unwrap();
        assert_eq!(at_origin.constant_term(), GaussianRational::from_int(-2));
    }

    #[test]
    fn ricci_identities() {
        for chart in [
            fs(8),
            KaehlerChart::builtin(Builtin::HyperbolicDisc, 2, 6, &int(1)).unwrap(),
        ] {
            assert!(laplace_fib(chart.symplectic_curvature(), chart.inverse_metric()).agrees_with(chart.ricci()));
            assert!(chart.ricci_from_canonical().agrees_with(chart.ricci()));
            assert!(chart
                .canonical_curvature_from_tensor()
                .agrees_with(chart.canonical_curvature()));
            assert_eq!(chart.curvature_symmetry_defect().unwrap(), None);
            assert!(chart
                .symplectic_curvature()
                .conj()
                .agrees_with(chart.symplectic_curvature()));
            assert!(chart.ricci().conj().agrees_with(chart.ricci()));
        }
    }

    #[test]
    fn flipped_christoffel_breaks_ricci_identity() {
        let chart = fs(8).with_flipped_christoffel().unwrap();
        assert!(!laplace_fib(chart.symplectic_curvature(), chart.inverse_metric()).agrees_with(chart.ricci()));
    }

    #[test]
    fn rejects_bad_metrics() {
        let m = JetMatrix::from_rows(vec![vec![Jet::z(1, 0)]]).unwrap();
        assert!(matches!(
            KaehlerChart::from_metric(m),
            Err(Error::NonHermitianMetric(_))
        ));
        let m = JetMatrix::from_rows(vec![vec![Jet::zero(1, Order::Exact)]]).unwrap();
        assert_eq!(KaehlerChart::from_metric(m).unwrap_err(), Error::DegenerateMetric);
    }
}
