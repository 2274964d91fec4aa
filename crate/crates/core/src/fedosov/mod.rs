//! Fedosov connections of κ-ordered type, their Taylor lifts, the induced
//! star products and bimodule structures.

pub mod hermitian;
pub mod local;
pub mod morita;
pub mod recursion;
mod series;

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

pub use self::series::{DeformedEndo, DeformedFunction, DeformedSection, LambdaSeries};

use self::recursion::{connection_form_residual, solve_connection_form, TwistedDerivation};
use crate::error::{Error, Result};
use crate::geometry::exterior_derivative;
use crate::geometry::{BundleChart, KaehlerChart};
use crate::jet::{Jet, Order};
use crate::matrix::{Endo, Section};
use crate::scalar::{GaussianRational, Rational};
use crate::weyl::product::circ;
use crate::weyl::{Coeff, Compose, EndoElement, ScalarElement, SectionElement, Split, WeylElement};

/// How far the formal series are carried.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    lambda_order: u32,
    degree_cap: u32,
}

impl Truncation {
    /// Products through `λ^N` need Taylor lifts through total degree `2N`.
    pub fn new(lambda_order: u32) -> Self {
        Truncation {
            lambda_order,
            degree_cap: (2 * lambda_order).max(3),
        }
    }

    /// Explicit total-degree cap; must reach `2N` and be at least 3.
    pub fn with_degree_cap(lambda_order: u32, degree_cap: u32) -> Result<Self> {
        if degree_cap < 3 {
            return Err(Error::Config(format!("total degree cap {degree_cap} is below 3")));
        }
        if degree_cap < 2 * lambda_order {
            return Err(Error::Config(format!(
                "total degree cap {degree_cap} cannot carry lambda order {lambda_order} (needs {})",
                2 * lambda_order
            )));
        }
        Ok(Truncation {
            lambda_order,
            degree_cap,
        })
    }

    pub fn lambda_order(&self) -> u32 {
        self.lambda_order
    }

    /// Total degree through which Taylor lifts are computed.
    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    /// Total degree through which the connection forms are solved.
    pub fn form_cap(&self) -> u32 {
        self.degree_cap + 1
    }

    /// Minimum jet order of the Kähler potential: the connection form of
    /// degree `T + 1` takes `T + 2` derivatives of it.
    pub fn required_jet_order(&self) -> u32 {
        self.degree_cap + 2
    }
}

/// The formal series `Ω = Σ λ^m Ω_m` of closed scalar 2-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Omega {
    form: ScalarElement,
}

impl Omega {
    pub fn zero(dim: usize) -> Self {
        Omega {
            form: ScalarElement::zero(dim),
        }
    }

    /// Checks shape (scalar 2-form, every term carrying `λ`) and
    /// closedness.
    pub fn new(form: ScalarElement) -> Result<Self> {
        let dim = form.dim();
        for (k, _) in form.terms() {
            if k.sym_degree() != 0 || k.form_degree() != 2 {
                return Err(Error::Config(format!(
                    "omega term {} is not a scalar 2-form",
                    k.label(dim)
                )));
            }
            if k.lam == 0 {
                return Err(Error::OmegaMissingLambda);
            }
        }
        let d = exterior_derivative(&form)?;
        if let Some((k, v)) = d.terms().find(|(_, v)| !v.is_zero()) {
            return Err(Error::NonClosedOmega(format!(
                "d omega has {} at {}",
                v.describe(),
                k.label(dim)
            )));
        }
        Ok(Omega { form })
    }

    /// `λ^lam · i ∂∂̄φ`, closed and of type (1,1); real when `φ` is.
    pub fn from_potential(phi: &Jet, lam: u32) -> Result<Self> {
        if lam == 0 {
            return Err(Error::OmegaMissingLambda);
        }
        let dim = phi.dim();
        let mut form = ScalarElement::zero(dim);
        for k in 0..dim {
            let dk = phi.derive_z(k)?;
            for l in 0..dim {
                let c = dk.derive_zbar(l)?.mul_i();
                let key = crate::geometry::type_one_one_key(dim, k, l);
                form.add_term(crate::weyl::Key { lam: lam as u8, ..key }, c);
            }
        }
        Self::new(form)
    }

    pub fn form(&self) -> &ScalarElement {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn is_type_one_one(&self) -> bool {
        let dim = self.form.dim();
        self.form
            .terms()
            .all(|(k, v)| v.is_zero() || k.split_degrees(Split::Holo, dim) == (0, 1))
    }

    pub fn is_real(&self) -> bool {
        self.form.conj().agrees_with(&self.form)
    }

    /// Wick-type constructions need type (1,1); only κ = 0 admits other
    /// closed forms.
    pub fn check_for(&self, kappa: &Rational) -> Result<()> {
        if kappa.is_zero() || self.is_type_one_one() {
            return Ok(());
        }
        let dim = self.form.dim();
        let (k, _) = self
            .form
            .terms()
            .find(|(k, v)| !v.is_zero() && k.split_degrees(Split::Holo, dim) != (0, 1))
            .expect("a non-(1,1) term exists");
        Err(Error::NonTypeOneOne(format!(
            "omega term {} at kappa {kappa}",
            k.label(dim)
        )))
    }
}

struct TaylorMemo<V: Coeff> {
    entries: Mutex<HashMap<Vec<V>, WeylElement<V>>>,
}

impl<V: Coeff + Hash + Eq> TaylorMemo<V> {
    fn new() -> Self {
        TaylorMemo {
            entries: Mutex::new(HashMap::new()),
        }
    }

    /// Computes outside the lock; concurrent inserts of the same key store
    /// identical values.
    fn get_or_compute(
        &self,
        x: &LambdaSeries<V>,
        compute: impl FnOnce() -> Result<WeylElement<V>>,
    ) -> Result<WeylElement<V>> {
        let key = x.coeffs().to_vec();
        if let Some(v) = self.entries.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.entries.lock().expect("memo lock").insert(key, v.clone());
        Ok(v)
    }
}

/// A solved Fedosov connection on a chart, optionally with a bundle.
pub struct FedosovSolution {
    chart: Arc<KaehlerChart>,
    bundle: Option<Arc<BundleChart>>,
    kappa: Rational,
    omega: Omega,
    truncation: Truncation,
    r: ScalarElement,
    r_prime: Option<EndoElement>,
    r_e: Option<EndoElement>,
    scalar_memo: TaylorMemo<Jet>,
    endo_memo: TaylorMemo<Endo>,
    section_memo: TaylorMemo<Section>,
}

impl std::fmt::Debug for FedosovSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FedosovSolution")
            .field("dim", &self.chart.dim())
            .field("kappa", &self.kappa)
            .field("truncation", &self.truncation)
            .field("bundle_rank", &self.bundle.as_ref().map(|b| b.rank()))
            .field("r_terms", &self.r.len())
            .finish()
    }
}

fn check_order(order: Order, offset: u32, truncation: &Truncation) -> Result<()> {
    if let Order::Finite(o) = order {
        let given = o + offset;
        let required = truncation.required_jet_order();
        if given < required {
            return Err(Error::JetOrderTooLow { given, required });
        }
    }
    Ok(())
}

impl FedosovSolution {
    /// Solves for `r` (and `r′`, `r_E` when a bundle is given).
    ///
    /// Jet orders are checked in potential-equivalent units: the metric
    /// counts two derivatives, curvature four.
    pub fn solve(
        chart: &KaehlerChart,
        bundle: Option<&BundleChart>,
        kappa: Rational,
        omega: Omega,
        truncation: Truncation,
    ) -> Result<Self> {
        let dim = chart.dim();
        if omega.dim() != dim {
            return Err(Error::DimensionMismatch(omega.dim(), dim));
        }
        omega.check_for(&kappa)?;
        check_order(chart.metric_order(), 2, &truncation)?;
        let cap = truncation.form_cap();
        let source = chart.symplectic_curvature().add(omega.form()).with_cap(cap);
        let r = solve_connection_form(&source, chart, None, &kappa, cap)?;
        let (r_prime, r_e) = match bundle {
            None => (None, None),
            Some(b) => {
                if b.dim() != dim {
                    return Err(Error::DimensionMismatch(b.dim(), dim));
                }
                check_order(b.curvature().jet_order(), 4, &truncation)?;
                let rank = b.rank();
                let source = chart
                    .symplectic_curvature()
                    .to_endo(rank)
                    .add(&omega.form().to_endo(rank))
                    .add(&b.curvature().lambda_shift(1).scale(&-GaussianRational::i()))
                    .with_cap(cap);
                let rp = solve_connection_form(&source, chart, Some(b), &kappa, cap)?;
                let re = rp.sub(&r.to_endo(rank)).divide_lambda()?.mul_i();
                (Some(rp), Some(re))
            }
        };
        Ok(FedosovSolution {
            chart: Arc::new(chart.clone()),
            bundle: bundle.map(|b| Arc::new(b.clone())),
            kappa,
            omega,
            truncation,
            r,
            r_prime,
            r_e,
            scalar_memo: TaylorMemo::new(),
            endo_memo: TaylorMemo::new(),
            section_memo: TaylorMemo::new(),
        })
    }

    pub fn chart(&self) -> &KaehlerChart {
        &self.chart
    }

    pub fn bundle(&self) -> Option<&BundleChart> {
        self.bundle.as_deref()
    }

    fn require_bundle(&self) -> Result<&BundleChart> {
        self.bundle
            .as_deref()
            .ok_or_else(|| Error::Bundle("this solution carries no bundle".into()))
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn r(&self) -> &ScalarElement {
        &self.r
    }

    pub fn r_prime(&self) -> Option<&EndoElement> {
        self.r_prime.as_ref()
    }

    pub fn r_e(&self) -> Option<&EndoElement> {
        self.r_e.as_ref()
    }

    fn r_prime_checked(&self) -> Result<&EndoElement> {
        self.r_prime
            .as_ref()
            .ok_or_else(|| Error::Bundle("this solution carries no bundle".into()))
    }

    /// Source term `R + Ω` of the scalar equation.
    pub fn source(&self) -> ScalarElement {
        self.chart
            .symplectic_curvature()
            .add(self.omega.form())
            .with_cap(self.truncation.form_cap())
    }

    /// Source term `R − iλR^E + Ω` of the endomorphism equation.
    pub fn source_prime(&self) -> Result<EndoElement> {
        let b = self.require_bundle()?;
        Ok(self
            .source()
            .to_endo(b.rank())
            .add(&b.curvature().lambda_shift(1).scale(&-GaussianRational::i()))
            .with_cap(self.truncation.form_cap()))
    }

    /// Residual of the scalar equation; zero through the degree cap.
    pub fn residual(&self) -> Result<ScalarElement> {
        connection_form_residual(&self.r, &self.source(), &self.chart, None, &self.kappa)
    }

    /// Residual of the endomorphism equation; zero through the degree cap.
    pub fn residual_prime(&self) -> Result<EndoElement> {
        connection_form_residual(
            self.r_prime_checked()?,
            &self.source_prime()?,
            &self.chart,
            self.bundle(),
            &self.kappa,
        )
    }

    /// `𝒟 = −δ + D + (i/λ)ad_κ(r)` on scalar elements.
    pub fn derivation(&self) -> TwistedDerivation<'_, Jet, Jet> {
        TwistedDerivation {
            chart: &self.chart,
            bundle: None,
            left: &self.r,
            right: &self.r,
            kappa: &self.kappa,
            metric: self.chart.inverse_metric(),
        }
    }

    /// `𝒟′ = −δ + D′ + (i/λ)ad_κ(r′)` on endomorphism elements.
    pub fn derivation_prime(&self) -> Result<TwistedDerivation<'_, Endo, Endo>> {
        let rp = self.r_prime_checked()?;
        Ok(TwistedDerivation {
            chart: &self.chart,
            bundle: self.bundle(),
            left: rp,
            right: rp,
            kappa: &self.kappa,
            metric: self.chart.inverse_metric(),
        })
    }

    /// `𝒟^E = −δ + D^E + (i/λ)ad_κ(r) + r_E`, written two-sidedly as
    /// `(i/λ)(r′ ∘ Ψ − Ψ ∘ r)` for the inner part.
    pub fn derivation_section(&self) -> Result<TwistedDerivation<'_, Endo, Jet>> {
        Ok(TwistedDerivation {
            chart: &self.chart,
            bundle: self.bundle(),
            left: self.r_prime_checked()?,
            right: &self.r,
            kappa: &self.kappa,
            metric: self.chart.inverse_metric(),
        })
    }

    fn check_lift_input<V: Coeff>(&self, x: &LambdaSeries<V>) -> Result<()> {
        let dim = x.coeffs()[0].dim();
        if dim != self.dim() {
            return Err(Error::DimensionMismatch(dim, self.dim()));
        }
        Ok(())
    }

    /// The flat lift `τ_κ(f)` through the degree cap.
    pub fn taylor(&self, f: &DeformedFunction) -> Result<ScalarElement> {
        self.check_lift_input(f)?;
        self.scalar_memo.get_or_compute(f, || {
            self.derivation().taylor(&f.to_element(), self.truncation.degree_cap)
        })
    }

    /// The flat lift `τ′_κ(A)`.
    pub fn taylor_prime(&self, a: &DeformedEndo) -> Result<EndoElement> {
        self.check_lift_input(a)?;
        self.check_rank(a.coeffs()[0].rows())?;
        let d = self.derivation_prime()?;
        self.endo_memo
            .get_or_compute(a, || d.taylor(&a.to_element(), self.truncation.degree_cap))
    }

    /// The flat lift `τ^E_κ(s)`.
    pub fn taylor_section(&self, s: &DeformedSection) -> Result<SectionElement> {
        self.check_lift_input(s)?;
        self.check_rank(s.coeffs()[0].rows())?;
        let d = self.derivation_section()?;
        self.section_memo
            .get_or_compute(s, || d.taylor(&s.to_element(), self.truncation.degree_cap))
    }

    fn check_rank(&self, rows: usize) -> Result<()> {
        let rank = self.require_bundle()?.rank();
        if rows != rank {
            return Err(Error::DimensionMismatch(rows, rank));
        }
        Ok(())
    }

    fn project<A, B>(&self, a: &WeylElement<A>, b: &WeylElement<B>, zero: &A::Output) -> LambdaSeries<A::Output>
    where
        A: Compose<B>,
        B: Coeff,
    {
        let cap = self.truncation.degree_cap;
        let prod = circ(a, b, &self.kappa, self.chart.inverse_metric(), cap);
        LambdaSeries::from_sigma(&prod, self.truncation.lambda_order as usize, zero)
    }

    /// `f ⋆_κ g = σ(τ(f) ∘_κ τ(g))` through `λ^N`.
    pub fn star(&self, f: &DeformedFunction, g: &DeformedFunction) -> Result<DeformedFunction> {
        Ok(self.project(&self.taylor(f)?, &self.taylor(g)?, &Jet::zero(self.dim(), Order::Exact)))
    }

    /// `A ⋆′_κ B = σ(τ′(A) ∘_κ τ′(B))` through `λ^N`.
    pub fn star_prime(&self, a: &DeformedEndo, b: &DeformedEndo) -> Result<DeformedEndo> {
        Ok(self.project(&self.taylor_prime(a)?, &self.taylor_prime(b)?, &a.coeff(0).zero_like()))
    }

    /// Right module action `s •_κ f = σ(τ^E(s) ∘_κ τ(f))`.
    pub fn module_right(&self, s: &DeformedSection, f: &DeformedFunction) -> Result<DeformedSection> {
        Ok(self.project(&self.taylor_section(s)?, &self.taylor(f)?, &s.coeff(0).zero_like()))
    }

    /// Left module action `A •′_κ s = σ(τ′(A) ∘_κ τ^E(s))`.
    pub fn module_left(&self, a: &DeformedEndo, s: &DeformedSection) -> Result<DeformedSection> {
        Ok(self.project(
            &self.taylor_prime(a)?,
            &self.taylor_section(s)?,
            &s.coeff(0).zero_like(),
        ))
    }

    /// First-order bracket `𝒫(f, g) = (2/i)(P − P̄)(df, dg)` with
    /// `P(df, dg) = g^{kℓ̄} ∂_k f ∂_ℓ̄ g`, so that
    /// `f ⋆ g − g ⋆ f = iλ𝒫(f, g) + O(λ²)`.
    pub fn poisson_bracket(&self, f: &Jet, g: &Jet) -> Result<Jet> {
        let n = self.dim();
        let mut p = Jet::zero(n, Order::Exact);
        for k in 0..n {
            for l in 0..n {
                let ginv = self.chart.inverse_metric().get(k, l);
                let forward = f.derive_z(k)? * g.derive_zbar(l)?;
                let backward = g.derive_z(k)? * f.derive_zbar(l)?;
                p = p + ginv * &(forward - backward);
            }
        }
        // (2/i)(P − P̄) = −2i(P − P̄)
        Ok(p.scale(&GaussianRational::from_int(-2)).mul_i())
    }
}
