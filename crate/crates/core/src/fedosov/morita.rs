//! The bimodule over Wick and anti-Wick star products carried by sections
//! of the canonical line bundle.
//!
//! Both products are built from a single `Ω`. Elements of the Weyl algebra
//! act on line-bundle sections through the Weyl-symmetric product after the
//! fibrewise equivalences `S = exp(λΔ_fib)` and `S⁻¹`:
//! `a ◇ Ψ = S⁻¹a ∘_Weyl Ψ` and `Ψ ◇̄ b = Ψ ∘_Weyl Sb`.

use num_traits::{One, Zero};

use super::recursion::TwistedDerivation;
use super::{DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries, Omega, Truncation};
use crate::error::Result;
use crate::geometry::{BundleChart, KaehlerChart};
use crate::scalar::Rational;
use crate::weyl::product::{circ, s_kappa};
use crate::weyl::{ScalarElement, SectionElement};

pub struct MoritaBimodule {
    wick: FedosovSolution,
    anti_wick: FedosovSolution,
    line: BundleChart,
    /// `S⁻¹ r_Wick`
    left_form: ScalarElement,
    /// `S r_antiWick`
    right_form: ScalarElement,
    zero: Rational,
}

impl MoritaBimodule {
    /// Solves the Wick (κ = 1) and anti-Wick (κ = −1) connections with the
    /// same `Ω` and sets up the canonical line bundle.
    pub fn new(chart: &KaehlerChart, omega: Omega, truncation: Truncation) -> Result<Self> {
        let wick = FedosovSolution::solve(chart, None, Rational::one(), omega.clone(), truncation)?;
        let anti_wick = FedosovSolution::solve(chart, None, -Rational::one(), omega, truncation)?;
        let line = BundleChart::canonical(chart)?;
        let metric = chart.inverse_metric();
        let left_form = s_kappa(wick.r(), &-Rational::one(), metric);
        let right_form = s_kappa(anti_wick.r(), &Rational::one(), metric);
        Ok(MoritaBimodule {
            wick,
            anti_wick,
            line,
            left_form,
            right_form,
            zero: Rational::zero(),
        })
    }

    pub fn wick(&self) -> &FedosovSolution {
        &self.wick
    }

    pub fn anti_wick(&self) -> &FedosovSolution {
        &self.anti_wick
    }

    pub fn line_bundle(&self) -> &BundleChart {
        &self.line
    }

    fn chart(&self) -> &KaehlerChart {
        self.wick.chart()
    }

    /// `a ◇ Ψ = S⁻¹a ∘_Weyl Ψ`.
    pub fn act_left(&self, a: &ScalarElement, psi: &SectionElement) -> SectionElement {
        let metric = self.chart().inverse_metric();
        let shifted = s_kappa(a, &-Rational::one(), metric);
        circ(&shifted, psi, &self.zero, metric, a.cap().min(psi.cap()))
    }

    /// `Ψ ◇̄ b = Ψ ∘_Weyl Sb`.
    pub fn act_right(&self, psi: &SectionElement, b: &ScalarElement) -> SectionElement {
        let metric = self.chart().inverse_metric();
        let shifted = s_kappa(b, &Rational::one(), metric);
        circ(psi, &shifted, &self.zero, metric, b.cap().min(psi.cap()))
    }

    /// `𝒟^L Ψ = −δΨ + D^LΨ + (i/λ)(r_Wick ◇ Ψ − (−1)^{|Ψ|} Ψ ◇̄ r_antiWick)`.
    pub fn derivation(&self) -> TwistedDerivation<'_, crate::Jet, crate::Jet> {
        TwistedDerivation {
            chart: self.chart(),
            bundle: Some(&self.line),
            left: &self.left_form,
            right: &self.right_form,
            kappa: &self.zero,
            metric: self.chart().inverse_metric(),
        }
    }

    /// The flat lift `τ^L(s)` of a line-bundle section.
    pub fn taylor(&self, s: &DeformedSection) -> Result<SectionElement> {
        self.derivation()
            .taylor(&s.to_element(), self.wick.truncation().degree_cap())
    }

    fn project(&self, psi: &SectionElement) -> DeformedSection {
        let zero = crate::Section::column(vec![crate::Jet::zero(self.chart().dim(), crate::Order::Exact)]);
        LambdaSeries::from_sigma(psi, self.wick.truncation().lambda_order() as usize, &zero)
    }

    /// `f ♦ s = σ(τ_Wick(f) ◇ τ^L(s))`.
    pub fn left_action(&self, f: &DeformedFunction, s: &DeformedSection) -> Result<DeformedSection> {
        Ok(self.project(&self.act_left(&self.wick.taylor(f)?, &self.taylor(s)?)))
    }

    /// `s ♦̄ g = σ(τ^L(s) ◇̄ τ_antiWick(g))`.
    pub fn right_action(&self, s: &DeformedSection, g: &DeformedFunction) -> Result<DeformedSection> {
        Ok(self.project(&self.act_right(&self.taylor(s)?, &self.anti_wick.taylor(g)?)))
    }
}
