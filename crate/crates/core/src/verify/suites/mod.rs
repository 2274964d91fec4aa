//! Suite definitions. Each suite performs its own setup; a setup failure is
//! reported as a failed `<suite>.setup` check.

mod fedosov;
mod fibre;
mod geometry;
mod hermitian;
mod morita;
mod wick;

pub(crate) use self::fedosov::fedosov;
pub(crate) use self::fibre::graded;
pub(crate) use self::geometry::geometry;
pub(crate) use self::hermitian::hermitian;
pub(crate) use self::morita::morita;
pub(crate) use self::wick::wick;

use super::random::{Sampler, Variables};
use super::SuiteConfig;
use crate::error::Result;
use crate::geometry::{BundleChart, BundleKind};
use crate::jet::{Jet, Order};
use crate::matrix::{Endo, Section};
use crate::scalar::{int, rat, GaussianRational, Rational};

pub(crate) fn kappas() -> [Rational; 3] {
    [int(-1), int(0), int(1)]
}

/// Rank-2 fibre metric `[[1 + |z¹|², z¹], [z̄¹, 2]]` through `order`.
pub(crate) fn test_fibre_metric(dim: usize, order: u32) -> Endo {
    let z = Jet::z(dim, 0);
    let zb = Jet::zbar(dim, 0);
    let one = Jet::one(dim);
    let two = &one + &one;
    Endo::from_rows(vec![vec![&one + &(&z * &zb), z], vec![zb, two]])
        .expect("square")
        .truncated(Order::Finite(order))
}

/// The configured bundle, or the rank-2 test bundle, as a bundle of the
/// requested holomorphy type with the same fibre metric.
pub(crate) fn bundle_of_kind(cfg: &SuiteConfig, kind: BundleKind) -> Result<BundleChart> {
    let order = cfg.truncation.required_jet_order();
    match &cfg.bundle {
        Some(b) if b.kind() == kind => Ok(b.clone()),
        Some(b) => match b.fibre_metric() {
            Some(h) => BundleChart::from_metric(h.clone(), kind),
            None => BundleChart::from_metric(test_fibre_metric(cfg.chart.dim(), order), kind),
        },
        None => BundleChart::from_metric(test_fibre_metric(cfg.chart.dim(), order), kind),
    }
}

/// The configured bundle, or the holomorphic rank-2 test bundle.
pub(crate) fn some_bundle(cfg: &SuiteConfig) -> Result<BundleChart> {
    match &cfg.bundle {
        Some(b) => Ok(b.clone()),
        None => bundle_of_kind(cfg, BundleKind::Holomorphic),
    }
}

/// Witnesses for covariant constancy along one type of direction, built
/// from (anti-)holomorphic data in the bundle's frame.
pub(crate) struct FlatWitnesses<'a> {
    pub bundle: &'a BundleChart,
}

impl FlatWitnesses<'_> {
    fn metric(&self) -> (&Endo, &Endo) {
        self.bundle
            .require_metric()
            .expect("witness bundles carry a fibre metric")
    }

    fn conjugate_by_metric(&self, x: &Endo) -> Endo {
        let (h, h_inv) = self.metric();
        let t: Endo = x.matmul(h);
        h_inv.matmul(&t)
    }

    /// Section with `∇_Y s = 0` for all `(1,0)` vectors `Y`.
    pub fn section_flat_10(&self, sampler: &mut Sampler) -> Section {
        let rank = self.bundle.rank();
        let c = sampler.section(rank, Variables::AntiHolomorphic, 2);
        match self.bundle.kind() {
            BundleKind::Holomorphic => self.metric().1.matmul(&c),
            BundleKind::AntiHolomorphic => c,
        }
    }

    /// Section with `∇_X t = 0` for all `(0,1)` vectors `X`.
    pub fn section_flat_01(&self, sampler: &mut Sampler) -> Section {
        let rank = self.bundle.rank();
        let c = sampler.section(rank, Variables::Holomorphic, 2);
        match self.bundle.kind() {
            BundleKind::Holomorphic => c,
            BundleKind::AntiHolomorphic => self.metric().1.matmul(&c),
        }
    }

    fn matrix(&self, sampler: &mut Sampler, vars: Variables) -> Endo {
        let rank = self.bundle.rank();
        Endo::from_fn(rank, rank, |_, _| sampler.polynomial(vars, 2))
    }

    /// Endomorphism with `∇_Y B = 0` for all `(1,0)` vectors `Y`.
    pub fn endo_flat_10(&self, sampler: &mut Sampler) -> Endo {
        let x = self.matrix(sampler, Variables::AntiHolomorphic);
        match self.bundle.kind() {
            BundleKind::Holomorphic => self.conjugate_by_metric(&x),
            BundleKind::AntiHolomorphic => x,
        }
    }

    /// Endomorphism with `∇_X B = 0` for all `(0,1)` vectors `X`.
    pub fn endo_flat_01(&self, sampler: &mut Sampler) -> Endo {
        let x = self.matrix(sampler, Variables::Holomorphic);
        match self.bundle.kind() {
            BundleKind::Holomorphic => x,
            BundleKind::AntiHolomorphic => self.conjugate_by_metric(&x),
        }
    }
}

/// Transition matrix `φ` with its exact inverse: `id + w E_{0,k−1}` with
/// `w = z¹` or `z̄¹` depending on the frame type, or `2·id` in rank 1.
pub(crate) fn transition(dim: usize, rank: usize, kind: BundleKind) -> (Endo, Endo) {
    if rank == 1 {
        let id = Endo::identity(dim, 1);
        return (
            id.scale(&GaussianRational::from_int(2)),
            id.scale(&GaussianRational::real(rat(1, 2))),
        );
    }
    let w = match kind {
        BundleKind::Holomorphic => Jet::z(dim, 0),
        BundleKind::AntiHolomorphic => Jet::zbar(dim, 0),
    };
    let shift = |s: i64| {
        let mut m = Endo::identity(dim, rank);
        *m.get_mut(0, rank - 1) = w.scale(&GaussianRational::from_int(s));
        m
    };
    (shift(1), shift(-1))
}
