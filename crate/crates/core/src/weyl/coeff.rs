//! Coefficient types carried by Weyl-algebra elements.

use std::fmt::Debug;

use crate::error::Result;
use crate::jet::{Jet, Order};
use crate::matrix::{Endo, JetMatrix, MatrixKind, Section};
use crate::scalar::GaussianRational;

/// Values a Weyl-algebra element can carry at each key: scalar jets,
/// endomorphism jet matrices or section jet columns.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    const KIND: &'static str;

    fn dim(&self) -> usize;
    fn order(&self) -> Order;
    /// Zero within the trusted order.
    fn is_zero(&self) -> bool;
    /// Exactly zero; such values are never stored.
    fn is_exact_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, s: &GaussianRational) -> Self;
    fn scale_jet(&self, f: &Jet) -> Self;
    fn derive(&self, v: usize) -> Result<Self>;
    /// Entrywise complex conjugation of the jets.
    fn conj_entries(&self) -> Self;
    fn truncated(&self, order: Order) -> Self;
    /// Description of the first disagreement within trusted orders.
    fn disagreement(&self, other: &Self) -> Option<String>;
    /// An exact zero of the same shape.
    fn zero_like(&self) -> Self;
    fn describe(&self) -> String;

    fn neg(&self) -> Self {
        self.scale(&-GaussianRational::from_int(1))
    }
}

/// Fibrewise composition of coefficient values, `self · rhs`.
pub trait Compose<Rhs: Coeff>: Coeff {
    type Output: Coeff;
    fn compose(&self, rhs: &Rhs) -> Self::Output;
}

impl Coeff for Jet {
    const KIND: &'static str = "scalar";

    fn dim(&self) -> usize {
        Jet::dim(self)
    }
    fn order(&self) -> Order {
        Jet::order(self)
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        Jet::is_exact_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_assign_ref(other)
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        Jet::scale(self, s)
    }
    fn scale_jet(&self, f: &Jet) -> Self {
        self * f
    }
    fn derive(&self, v: usize) -> Result<Self> {
        Jet::derive(self, v)
    }
    fn conj_entries(&self) -> Self {
        self.conj()
    }
    fn truncated(&self, order: Order) -> Self {
        Jet::truncated(self, order)
    }
    fn disagreement(&self, other: &Self) -> Option<String> {
        self.first_disagreement(other).map(|(m, a, b)| {
            let name = crate::jet::monomial_name(m, Jet::dim(self));
            let name = if name.is_empty() { "1".to_string() } else { name };
            format!("jet monomial {name}: {a} vs {b}")
        })
    }
    fn zero_like(&self) -> Self {
        Jet::zero(Jet::dim(self), Order::Exact)
    }
    fn describe(&self) -> String {
        self.pretty()
    }
}

impl<K: MatrixKind> Coeff for JetMatrix<K> {
    const KIND: &'static str = K::NAME;

    fn dim(&self) -> usize {
        JetMatrix::dim(self)
    }
    fn order(&self) -> Order {
        JetMatrix::order(self)
    }
    fn is_zero(&self) -> bool {
        JetMatrix::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        JetMatrix::is_exact_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "shape mismatch"
        );
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                self.get_mut(i, j).add_assign_ref(other.get(i, j));
            }
        }
    }
    fn scale(&self, s: &GaussianRational) -> Self {
        JetMatrix::scale(self, s)
    }
    fn scale_jet(&self, f: &Jet) -> Self {
        JetMatrix::scale_jet(self, f)
    }
    fn derive(&self, v: usize) -> Result<Self> {
        JetMatrix::derive(self, v)
    }
    fn conj_entries(&self) -> Self {
        self.conj()
    }
    fn truncated(&self, order: Order) -> Self {
        JetMatrix::truncated(self, order)
    }
    fn disagreement(&self, other: &Self) -> Option<String> {
        if (self.rows(), self.cols()) != (other.rows(), other.cols()) {
            return Some("shape mismatch".into());
        }
        self.first_disagreement(other)
            .map(|(i, j, d)| format!("entry ({},{}) {d}", i + 1, j + 1))
    }
    fn zero_like(&self) -> Self {
        JetMatrix::zeros(JetMatrix::dim(self), self.rows(), self.cols(), Order::Exact)
    }
    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

impl Compose<Jet> for Jet {
    type Output = Jet;
    fn compose(&self, rhs: &Jet) -> Jet {
        self * rhs
    }
}

impl Compose<Endo> for Endo {
    type Output = Endo;
    fn compose(&self, rhs: &Endo) -> Endo {
        self.matmul(rhs)
    }
}

impl Compose<Section> for Endo {
    type Output = Section;
    fn compose(&self, rhs: &Section) -> Section {
        self.matmul(rhs)
    }
}

impl Compose<Jet> for Endo {
    type Output = Endo;
    fn compose(&self, rhs: &Jet) -> Endo {
        self.scale_jet(rhs)
    }
}

impl Compose<Endo> for Jet {
    type Output = Endo;
    fn compose(&self, rhs: &Endo) -> Endo {
        rhs.scale_jet(self)
    }
}

impl Compose<Jet> for Section {
    type Output = Section;
    fn compose(&self, rhs: &Jet) -> Section {
        self.scale_jet(rhs)
    }
}

impl Compose<Section> for Jet {
    type Output = Section;
    fn compose(&self, rhs: &Section) -> Section {
        rhs.scale_jet(self)
    }
}
