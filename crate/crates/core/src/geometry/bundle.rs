//! Hermitian vector bundles in a local frame.
//!
//! The connection acts on a frame `e` by `∇_X e = −i e A(X)`, so on component
//! columns `∇_a s = ∂_a s − i A_a s`. Components of `A` are indexed by the
//! `2n` directions: `a < n` is `dzᵃ`, `a = n + ℓ` is `dz̄ˡ`.

use crate::error::{Error, Result};
use crate::jet::{Jet, Order};
use crate::matrix::Endo;
use crate::scalar::GaussianRational;
use crate::weyl::{EndoElement, Key, UNBOUNDED};

use super::KaehlerChart;

/// Holomorphy type of the bundle and of its distinguished frames.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BundleKind {
    Holomorphic,
    AntiHolomorphic,
}

impl BundleKind {
    pub fn name(self) -> &'static str {
        match self {
            BundleKind::Holomorphic => "holomorphic",
            BundleKind::AntiHolomorphic => "anti_holomorphic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BundleChart {
    dim: usize,
    rank: usize,
    kind: BundleKind,
    fibre_metric: Option<(Endo, Endo)>,
    connection: Vec<Endo>,
    curvature: EndoElement,
    transition: Option<Endo>,
}

impl BundleChart {
    /// Trivial bundle with the standard fibre metric and zero connection.
    pub fn trivial(dim: usize, rank: usize, kind: BundleKind) -> Self {
        let id = Endo::identity(dim, rank);
        Self::assemble(
            dim,
            kind,
            Some((id.clone(), id)),
            vec![Endo::zeros(dim, rank, rank, Order::Exact); 2 * dim],
        )
        .expect("trivial bundle")
    }

    /// Chern connection of a Hermitian fibre metric `H` in a frame of the
    /// given holomorphy type: `A = i H⁻¹ ∂H` (holomorphic) or
    /// `A = i H⁻¹ ∂̄H` (anti-holomorphic).
    pub fn from_metric(h: Endo, kind: BundleKind) -> Result<Self> {
        let dim = h.dim();
        if h.rows() != h.cols() {
            return Err(Error::DimensionMismatch(h.rows(), h.cols()));
        }
        if !h.is_hermitian() {
            return Err(Error::NonHermitianMetric("fibre metric is not Hermitian".into()));
        }
        let h_inv = h.inverse_within_order()?;
        let rank = h.rows();
        let mut connection = vec![Endo::zeros(dim, rank, rank, Order::Exact); 2 * dim];
        let range = match kind {
            BundleKind::Holomorphic => 0..dim,
            BundleKind::AntiHolomorphic => dim..2 * dim,
        };
        for v in range {
            connection[v] = h_inv
                .matmul::<_, crate::matrix::EndoKind>(&h.derive(v)?)
                .scale(&GaussianRational::i());
        }
        Self::assemble(dim, kind, Some((h, h_inv)), connection)
    }

    /// Bundle given by connection components, with an optional fibre metric.
    /// The components must have the type matching `kind`.
    pub fn from_connection(
        dim: usize,
        kind: BundleKind,
        connection: Vec<Endo>,
        fibre_metric: Option<Endo>,
    ) -> Result<Self> {
        if connection.len() != 2 * dim {
            return Err(Error::Bundle(format!(
                "expected {} connection components, got {}",
                2 * dim,
                connection.len()
            )));
        }
        let wrong = match kind {
            BundleKind::Holomorphic => dim..2 * dim,
            BundleKind::AntiHolomorphic => 0..dim,
        };
        if wrong.clone().any(|v| !connection[v].is_zero()) {
            return Err(Error::Bundle(format!(
                "connection of a {} frame must have no {} part",
                kind.name(),
                if kind == BundleKind::Holomorphic {
                    "(0,1)"
                } else {
                    "(1,0)"
                }
            )));
        }
        let metric = match fibre_metric {
            Some(h) => {
                if !h.is_hermitian() {
                    return Err(Error::NonHermitianMetric("fibre metric is not Hermitian".into()));
                }
                let inv = h.inverse_within_order()?;
                Some((h, inv))
            }
            None => None,
        };
        Self::assemble(dim, kind, metric, connection)
    }

    /// The canonical line bundle with connection `A_k = −i Γ^ℓ_{kℓ}` and
    /// fibre metric `1/det g` in the frame `dz¹ ∧ … ∧ dzⁿ`.
    pub fn canonical(chart: &KaehlerChart) -> Result<Self> {
        let dim = chart.dim();
        let mut connection = vec![Endo::zeros(dim, 1, 1, Order::Exact); 2 * dim];
        for (k, slot) in connection.iter_mut().enumerate().take(dim) {
            let mut trace = Jet::zero(dim, Order::Exact);
            for l in 0..dim {
                trace.add_assign_ref(chart.christoffel(l, k, l));
            }
            *slot = Endo::scalar(&trace.scale(&-GaussianRational::i()), 1);
        }
        let det = chart.metric().determinant();
        let h = Endo::scalar(&det.invert()?, 1);
        let h_inv = Endo::scalar(&det, 1);
        Self::assemble(dim, BundleKind::Holomorphic, Some((h, h_inv)), connection)
    }

    fn assemble(
        dim: usize,
        kind: BundleKind,
        fibre_metric: Option<(Endo, Endo)>,
        connection: Vec<Endo>,
    ) -> Result<Self> {
        let rank = connection[0].rows();
        let mut curvature = EndoElement::zero_with_cap(dim, UNBOUNDED);
        for a in 0..2 * dim {
            for b in a + 1..2 * dim {
                let f = field_strength(&connection, a, b)?;
                curvature.add_term(Key::new(0, crate::jet::Monomial::ONE, (1u8 << a) | (1u8 << b)), f);
            }
        }
        Ok(BundleChart {
            dim,
            rank,
            kind,
            fibre_metric,
            connection,
            curvature,
            transition: None,
        })
    }

    /// Attaches a transition matrix `φ` to a second frame `e_β = e φ`.
    pub fn with_transition(mut self, phi: Endo) -> Result<Self> {
        if phi.rows() != self.rank || phi.cols() != self.rank {
            return Err(Error::DimensionMismatch(phi.rows(), self.rank));
        }
        if phi.determinant().constant_term() == GaussianRational::from_int(0) {
            return Err(Error::NotInvertible(
                "transition matrix singular at the basepoint".into(),
            ));
        }
        let ok = phi.entries().iter().all(|e| match self.kind {
            BundleKind::Holomorphic => e.is_holomorphic(),
            BundleKind::AntiHolomorphic => e.is_antiholomorphic(),
        });
        if !ok {
            return Err(Error::Bundle(format!(
                "transition entries must be {}",
                self.kind.name()
            )));
        }
        self.transition = Some(phi);
        Ok(self)
    }

    /// The bundle expressed in the second frame `e φ`:
    /// `H ↦ φ^† H φ` and `A ↦ φ⁻¹ A φ + i φ⁻¹ dφ`.
    pub fn reframed(&self) -> Result<Self> {
        let phi = self
            .transition
            .as_ref()
            .ok_or_else(|| Error::Bundle("no transition matrix attached".into()))?;
        let phi_inv = match self.working_order() {
            Some(t) => phi.inverse(t)?,
            None => phi.inverse_within_order()?,
        };
        let mut connection = Vec::with_capacity(2 * self.dim);
        for a in 0..2 * self.dim {
            let rotated: Endo = phi_inv
                .matmul::<_, crate::matrix::EndoKind>(&self.connection[a])
                .matmul(phi);
            let dphi: Endo = phi_inv.matmul(&phi.derive(a)?);
            connection.push(rotated.add(&dphi.scale(&GaussianRational::i())));
        }
        let metric = match &self.fibre_metric {
            Some((h, _)) => {
                let h2: Endo = phi.dagger().matmul::<_, crate::matrix::EndoKind>(h).matmul(phi);
                let inv = h2.inverse_within_order()?;
                Some((h2, inv))
            }
            None => None,
        };
        let mut out = Self::assemble(self.dim, self.kind, metric, connection)?;
        out.transition = Some(phi_inv);
        Ok(out)
    }

    /// Smallest finite trusted order among the metric and connection jets.
    fn working_order(&self) -> Option<u32> {
        let metric = self.fibre_metric.iter().map(|(h, _)| h.order());
        metric
            .chain(self.connection.iter().map(|a| a.order()))
            .filter_map(|o| o.finite())
            .min()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    pub fn fibre_metric(&self) -> Option<&Endo> {
        self.fibre_metric.as_ref().map(|(h, _)| h)
    }

    pub fn fibre_metric_inverse(&self) -> Option<&Endo> {
        self.fibre_metric.as_ref().map(|(_, h)| h)
    }

    /// `(H, H⁻¹)`, or an error when no fibre metric is known.
    pub fn require_metric(&self) -> Result<(&Endo, &Endo)> {
        self.fibre_metric
            .as_ref()
            .map(|(h, inv)| (h, inv))
            .ok_or_else(|| Error::MissingFibreMetric("the bundle was given by a connection only".into()))
    }

    /// Connection component along direction `a` (`a < n`: `dzᵃ`).
    pub fn connection(&self, a: usize) -> &Endo {
        &self.connection[a]
    }

    /// The curvature element `R^E = Σ_{a<b} F_{ab} θᵃ ∧ θᵇ` with
    /// `F_{ab} = [∇_a, ∇_b]`.
    pub fn curvature(&self) -> &EndoElement {
        &self.curvature
    }

    pub fn transition(&self) -> Option<&Endo> {
        self.transition.as_ref()
    }

    /// True when the curvature has only mixed `dzᵏ ∧ dz̄ˡ` components.
    pub fn curvature_is_type_one_one(&self) -> bool {
        let dim = self.dim;
        self.curvature.terms().all(|(k, v)| {
            let holo = (k.asym & ((1u8 << dim) - 1)).count_ones();
            holo == 1 || v.is_zero()
        })
    }

    /// `dH = i(A^† H − H A)` where `A^†` conjugates both the matrix and the
    /// form type. Returns the first direction where it fails.
    pub fn compatibility_defect(&self) -> Result<Option<String>> {
        let (h, _) = self.require_metric()?;
        let dim = self.dim;
        for a in 0..2 * dim {
            let conj_dir = if a < dim { a + dim } else { a - dim };
            let lhs = h.derive(a)?;
            let adj: Endo = self.connection[conj_dir].dagger().matmul(h);
            let ha: Endo = h.matmul(&self.connection[a]);
            let rhs = adj.sub(&ha).scale(&GaussianRational::i());
            if let Some((i, j, d)) = lhs.first_disagreement(&rhs) {
                return Ok(Some(format!("direction {a}, entry ({},{}): {d}", i + 1, j + 1)));
            }
        }
        Ok(None)
    }
}

/// `F_{ab} = −i(∂_a A_b − ∂_b A_a) − [A_a, A_b]`.
fn field_strength(a: &[Endo], i: usize, j: usize) -> Result<Endo> {
    let d = a[j].derive(i)?.sub(&a[i].derive(j)?);
    let minus_i = -GaussianRational::i();
    Ok(d.scale(&minus_i).sub(&a[i].commutator(&a[j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Builtin, KaehlerChart};
    use crate::scalar::int;

    fn zz(dim: usize) -> Jet {
        Jet::z(dim, 0) * Jet::zbar(dim, 0)
    }

    #[test]
    fn identity_metric_is_flat() {
        let b = BundleChart::from_metric(Endo::identity(1, 2), BundleKind::Holomorphic).unwrap();
        assert!(b.curvature().is_zero());
        assert!((0..2).all(|a| b.connection(a).is_zero()));
    }

    #[test]
    fn rank_one_chern_connection() {
        let one_plus = &Jet::one(1) + &zz(1);
        let h = one_plus.pow(2).invert_to(8).unwrap();
        let b = BundleChart::from_metric(Endo::scalar(&h, 1), BundleKind::Holomorphic).unwrap();
        // A = i ∂ log H = −2i z̄/(1 + zz̄)
        let expected = Jet::zbar(1, 0).scale(&GaussianRational::new(int(0), int(-2))) * one_plus.invert_to(7).unwrap();
        assert!(b.connection(0).get(0, 0).agrees_with(&expected));
        assert!(b.connection(1).is_zero());
        assert_eq!(b.compatibility_defect().unwrap(), None);
        assert!(b.curvature_is_type_one_one());
    }

    #[test]
    fn anti_holomorphic_compatibility() {
        let h = Endo::from_rows(vec![
            vec![&Jet::one(1) + &zz(1), Jet::z(1, 0)],
            vec![
                Jet::zbar(1, 0),
                Jet::constant(1, GaussianRational::from_int(2), Order::Exact),
            ],
        ])
        .unwrap()
        .truncated(Order::Finite(6));
        for kind in [BundleKind::Holomorphic, BundleKind::AntiHolomorphic] {
            let b = BundleChart::from_metric(h.clone(), kind).unwrap();
            assert_eq!(b.compatibility_defect().unwrap(), None);
            assert!(b.curvature_is_type_one_one());
        }
    }

    #[test]
    fn canonical_bundle_curvature_matches_chart() {
        let chart = KaehlerChart::builtin(Builtin::FubiniStudy, 1, 8, &int(1)).unwrap();
        let b = BundleChart::canonical(&chart).unwrap();
        assert_eq!(b.compatibility_defect().unwrap(), None);
        let curv = b.curvature().entry(0, 0);
        assert!(curv.agrees_with(chart.canonical_curvature()));
        assert!(curv.conj().agrees_with(&curv.neg()));
    }

    #[test]
    fn reframing_preserves_compatibility() {
        let h = Endo::scalar(&(&Jet::one(1) + &zz(1)).truncated(Order::Finite(6)), 1);
        let phi = Endo::scalar(&(&Jet::one(1) + &Jet::z(1, 0)), 1);
        let b = BundleChart::from_metric(h, BundleKind::Holomorphic)
            .unwrap()
            .with_transition(phi)
            .unwrap();
        let b2 = b.reframed().unwrap();
        assert_eq!(b2.compatibility_defect().unwrap(), None);
        assert!(b2.connection(1).is_zero());
    }
}
