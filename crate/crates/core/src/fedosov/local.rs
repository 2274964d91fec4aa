//! Closed local expressions of the Wick-type module structures and the
//! deformed metric in holomorphic or anti-holomorphic frames. They only
//! use `⋆_Wick` and `⋆′_Wick`, which makes them independent evaluation
//! paths for the bimodule products.

use num_traits::One;

use super::hermitian::adjoint;
use super::{DeformedEndo, DeformedFunction, DeformedSection, FedosovSolution, LambdaSeries};
use crate::error::{Error, Result};
use crate::geometry::BundleKind;
use crate::jet::{Jet, Order};
use crate::matrix::{Endo, Section};
use crate::scalar::{rat, GaussianRational};

/// Component `i` of a deformed section as a deformed function.
pub fn section_component(s: &DeformedSection, i: usize) -> DeformedFunction {
    s.map(|c| c.component(i).clone())
}

/// Deformed section from component series.
pub fn section_from_components(comps: &[DeformedFunction]) -> DeformedSection {
    let n = comps.iter().map(|c| c.coeffs().len()).max().unwrap_or(1);
    LambdaSeries::new(
        (0..n)
            .map(|m| Section::column(comps.iter().map(|c| c.coeff(m)).collect()))
            .collect(),
    )
}

/// `s ⊗ eⁱ` order by order.
pub fn outer_with_dual(s: &DeformedSection, i: usize) -> DeformedEndo {
    s.map(|c| Endo::outer_with_dual(c, i))
}

/// Frame change of section components `s ↦ φ s`, order by order.
pub fn transform_section(phi: &Endo, s: &DeformedSection) -> DeformedSection {
    s.map(|c| phi.matmul(c))
}

/// Frame change of endomorphisms `A ↦ φ A φ⁻¹`, order by order.
pub fn transform_endo(phi: &Endo, phi_inv: &Endo, a: &DeformedEndo) -> DeformedEndo {
    a.map(|c| {
        let t: Endo = c.matmul(phi_inv);
        phi.matmul(&t)
    })
}

/// Complex conjugate of a deformed function (`λ` is real).
pub fn conj_function(f: &DeformedFunction) -> DeformedFunction {
    f.map(Jet::conj)
}

impl FedosovSolution {
    fn require_kind(&self, kind: BundleKind, what: &str) -> Result<usize> {
        self.require_wick_local()?;
        let b = self
            .bundle()
            .ok_or_else(|| Error::Bundle("this solution carries no bundle".into()))?;
        if b.kind() != kind {
            return Err(Error::Bundle(format!(
                "{what} needs a {} frame, the bundle uses a {} one",
                kind.name(),
                b.kind().name()
            )));
        }
        Ok(b.rank())
    }

    fn require_wick_local(&self) -> Result<()> {
        if !self.kappa().is_one() {
            return Err(Error::Config("local formulas hold for Wick ordering only".into()));
        }
        Ok(())
    }

    /// Anti-holomorphic frame: `(s • f)ⁱ = sⁱ ⋆ f`.
    pub fn module_right_local(&self, s: &DeformedSection, f: &DeformedFunction) -> Result<DeformedSection> {
        let rank = self.require_kind(BundleKind::AntiHolomorphic, "the componentwise right action")?;
        let comps = (0..rank)
            .map(|i| self.star(&section_component(s, i), f))
            .collect::<Result<Vec<_>>>()?;
        Ok(section_from_components(&comps))
    }

    /// Holomorphic frame: `A •′ s = (1/k) Σᵢ (A ⋆′ (s ⊗ eⁱ)) eᵢ`.
    pub fn module_left_local(&self, a: &DeformedEndo, s: &DeformedSection) -> Result<DeformedSection> {
        let rank = self.require_kind(BundleKind::Holomorphic, "the matrix left action")?;
        let mut acc: Option<DeformedSection> = None;
        for i in 0..rank {
            let prod = self.star_prime(a, &outer_with_dual(s, i))?;
            let col = prod.map(|c| c.column_section(i));
            acc = Some(match acc {
                None => col,
                Some(x) => x.add(&col),
            });
        }
        let k = GaussianRational::real(rat(1, rank as i64));
        Ok(acc.expect("rank is positive").map(|c| c.scale(&k)))
    }

    /// Anti-holomorphic frame:
    /// `𝐡(s, s′) = Σ_{ij} conj(sⁱ) ⋆ 𝐡(eᵢ, eⱼ) ⋆ s′ʲ`.
    pub fn deformed_metric_antiholomorphic_local(
        &self,
        s: &DeformedSection,
        s2: &DeformedSection,
    ) -> Result<DeformedFunction> {
        let rank = self.require_kind(BundleKind::AntiHolomorphic, "the frame expansion of the metric")?;
        let dim = self.dim();
        let mut acc = LambdaSeries::classical(Jet::zero(dim, Order::Exact));
        for i in 0..rank {
            let ei = LambdaSeries::classical(Section::basis(dim, rank, i));
            let left = conj_function(&section_component(s, i));
            for j in 0..rank {
                let ej = LambdaSeries::classical(Section::basis(dim, rank, j));
                let hij = self.deformed_metric(&ei, &ej)?;
                let right = section_component(s2, j);
                acc = acc.add(&self.star(&self.star(&left, &hij)?, &right)?);
            }
        }
        Ok(acc.truncated(self.truncation().lambda_order() as usize))
    }

    /// Holomorphic frame:
    /// `𝐡(s, s′) = (1/k²) Σ_{ij} Σ_b H_{ib} [(s ⊗ eⁱ)* ⋆′ (s′ ⊗ eʲ)]_{bj}`.
    pub fn deformed_metric_holomorphic_local(
        &self,
        s: &DeformedSection,
        s2: &DeformedSection,
    ) -> Result<DeformedFunction> {
        let rank = self.require_kind(BundleKind::Holomorphic, "the matrix expression of the metric")?;
        let (h, h_inv) = self.bundle().expect("checked").require_metric()?;
        let dim = self.dim();
        let mut acc = LambdaSeries::classical(Jet::zero(dim, Order::Exact));
        for i in 0..rank {
            let left = outer_with_dual(s, i).map(|c| adjoint(c, h, h_inv));
            for j in 0..rank {
                let prod = self.star_prime(&left, &outer_with_dual(s2, j))?;
                for b in 0..rank {
                    let hib = h.get(i, b);
                    acc = acc.add(&prod.map(|c| c.get(b, j) * hib));
                }
            }
        }
        let k2 = GaussianRational::real(rat(1, (rank * rank) as i64));
        Ok(acc.map(|c| c.scale(&k2)))
    }
}
