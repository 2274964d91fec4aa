//! The fibre metric extended to Weyl-algebra sections and the deformed
//! Hermitian metric of a Wick-type bimodule.

use num_traits::One;

use super::{DeformedEndo, DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries};
use crate::error::{Error, Result};
use crate::jet::{Jet, Order};
use crate::matrix::{Endo, Section};
use crate::weyl::product::circ;
use crate::weyl::{EndoElement, ScalarElement, SectionElement};

/// `H(Ψ, Ψ′) = Σ_{ij} conj(Ψⁱ) ∘_Wick Ψ′ʲ H_{ij}` through total degree
/// `limit`.
pub fn pairing(
    psi: &SectionElement,
    psi2: &SectionElement,
    h: &Endo,
    metric: &crate::weyl::product::InverseMetric,
    limit: u32,
) -> ScalarElement {
    let one = crate::scalar::Rational::one();
    let rank = h.rows();
    let mut out = ScalarElement::zero_with_cap(psi.dim(), limit);
    let conj: Vec<ScalarElement> = (0..rank).map(|i| psi.component(i).conj()).collect();
    let right: Vec<ScalarElement> = (0..rank).map(|j| psi2.component(j)).collect();
    for (i, a) in conj.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            let hij = h.get(i, j);
            if hij.is_exact_zero() {
                continue;
            }
            out.add_assign(&circ(a, b, &one, metric, limit).scale_jet(hij));
        }
    }
    out
}

/// Classical `h(s, s′) = Σ conj(sⁱ) s′ʲ H_{ij}`.
pub fn classical_metric(s: &Section, s2: &Section, h: &Endo) -> Jet {
    let mut acc = Jet::zero(s.dim(), Order::Exact);
    for i in 0..h.rows() {
        let ci = s.component(i).conj();
        for j in 0..h.cols() {
            acc = acc + &(&ci * s2.component(j)) * h.get(i, j);
        }
    }
    acc
}

/// Fibre-metric adjoint `A* = H⁻¹ A† H`.
pub fn adjoint(a: &Endo, h: &Endo, h_inv: &Endo) -> Endo {
    let dag = a.dagger();
    let tmp: Endo = dag.matmul(h);
    h_inv.matmul(&tmp)
}

impl FedosovSolution {
    fn require_wick(&self) -> Result<()> {
        if !self.kappa().is_one() {
            return Err(Error::Config(format!(
                "the Hermitian structure is defined for Wick ordering only, got kappa {}",
                self.kappa()
            )));
        }
        Ok(())
    }

    fn fibre_metric(&self) -> Result<(&Endo, &Endo)> {
        self.bundle()
            .ok_or_else(|| Error::Bundle("this solution carries no bundle".into()))?
            .require_metric()
    }

    /// `H(Ψ, Ψ′)` with the bundle's fibre metric.
    pub fn pairing(&self, psi: &SectionElement, psi2: &SectionElement) -> Result<ScalarElement> {
        self.require_wick()?;
        let (h, _) = self.fibre_metric()?;
        let limit = psi.cap().min(psi2.cap());
        Ok(pairing(psi, psi2, h, self.chart().inverse_metric(), limit))
    }

    /// The deformed metric `𝐡(s, s′) = σ H(τ^E s, τ^E s′)` through `λ^N`.
    pub fn deformed_metric(&self, s: &DeformedSection, s2: &DeformedSection) -> Result<DeformedFunction> {
        let p = self.pairing(&self.taylor_section(s)?, &self.taylor_section(s2)?)?;
        Ok(LambdaSeries::from_sigma(
            &p,
            self.truncation().lambda_order() as usize,
            &Jet::zero(self.dim(), Order::Exact),
        ))
    }

    /// Classical metric of the bundle on sections.
    pub fn classical_metric(&self, s: &Section, s2: &Section) -> Result<Jet> {
        let (h, _) = self.fibre_metric()?;
        Ok(classical_metric(s, s2, h))
    }

    /// Pointwise adjoint `A* = H⁻¹A†H`, applied order by order.
    pub fn adjoint(&self, a: &DeformedEndo) -> Result<DeformedEndo> {
        let (h, h_inv) = self.fibre_metric()?;
        Ok(a.map(|c| adjoint(c, h, h_inv)))
    }

    /// Fibrewise adjoint on endomorphism elements: `*` on the Weyl part
    /// combined with `A ↦ H⁻¹A†H`.
    pub fn adjoint_element(&self, a: &EndoElement) -> Result<EndoElement> {
        let (h, h_inv) = self.fibre_metric()?;
        Ok(crate::weyl::involution::endo_star(a, h, h_inv))
    }
}
