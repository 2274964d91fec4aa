//! Formal power series in `λ` with jet, endomorphism or section
//! coefficients.

use crate::jet::Monomial;
use crate::weyl::{Coeff, Key, WeylElement, UNBOUNDED};

/// `Σ_m λ^m c_m`, stored densely from `λ⁰`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSeries<V: Coeff> {
    coeffs: Vec<V>,
}

pub type DeformedFunction = LambdaSeries<crate::Jet>;
pub type DeformedEndo = LambdaSeries<crate::Endo>;
pub type DeformedSection = LambdaSeries<crate::Section>;

impl<V: Coeff> LambdaSeries<V> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<V>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs its λ⁰ coefficient");
        LambdaSeries { coeffs }
    }

    /// A classical datum viewed as a series.
    pub fn classical(v: V) -> Self {
        LambdaSeries { coeffs: vec![v] }
    }

    pub fn coeffs(&self) -> &[V] {
        &self.coeffs
    }

    /// Coefficient of `λ^m`, exact zero past the stored orders.
    pub fn coeff(&self, m: usize) -> V {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    /// Highest stored power of `λ`.
    pub fn top_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncated(&self, max: usize) -> Self {
        LambdaSeries::new((0..=max).map(|m| self.coeff(m)).collect())
    }

    pub fn map<W: Coeff>(&self, f: impl Fn(&V) -> W) -> LambdaSeries<W> {
        LambdaSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        LambdaSeries::new(
            (0..n)
                .map(|m| {
                    let mut c = self.coeff(m);
                    c.add_assign(&other.coeff(m));
                    c
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map(|c| c.neg()))
    }

    /// The series as a Weyl element supported on the keys `λ^m`.
    pub fn to_element(&self) -> WeylElement<V> {
        let dim = self.coeffs[0].dim();
        WeylElement::from_terms(
            dim,
            UNBOUNDED,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| (Key::new(m as u32, Monomial::ONE, 0), c.clone())),
        )
    }

    /// The `σ`-part of an element through `λ^max`.
    pub fn from_sigma(a: &WeylElement<V>, max: usize, zero: &V) -> Self {
        LambdaSeries::new(crate::weyl::ops::sigma_series(a, max as u32, zero))
    }

    /// First order (within both lengths, padding with zero) where the
    /// series differ within trusted jet orders.
    pub fn first_disagreement(&self, other: &Self) -> Option<(usize, String)> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).find_map(|m| self.coeff(m).disagreement(&other.coeff(m)).map(|d| (m, d)))
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }
}
