//! The formal Weyl algebra `W ⊗ Λ` and its endomorphism- and
//! section-valued variants.
//!
//! Symmetric generators are written as commuting variables: `yᵏ` stands for
//! the symmetric `dzᵏ` and `ȳᵏ` for the symmetric `dz̄ᵏ`. Contraction with a
//! tangent vector acts as a partial derivative in these variables, so a
//! symmetrised product such as `½ g_{kℓ̄} dzᵏ ∨ dz̄ˡ` becomes the polynomial
//! `g_{kℓ̄} yᵏ ȳˡ` (symmetrisation factors live in the coefficients).
//!
//! Antisymmetric generators `eᵏ` (`dzᵏ`) and `ēᵏ` (`dz̄ᵏ`) are stored as a
//! bitmask in canonical order (all `e` before all `ē`, increasing index);
//! reordering signs are absorbed into the coefficient on insertion.
//!
//! Every element records the total degree `cap` through which it is known
//! exactly; keys above the cap are dropped.

mod coeff;
pub mod involution;
pub mod ops;
pub mod product;

use std::collections::BTreeMap;
use std::fmt;

pub use coeff::{Coeff, Compose};

use crate::error::{Error, Result};
use crate::jet::{Jet, Monomial, Order};
use crate::matrix::{Endo, Section};
use crate::scalar::GaussianRational;

/// Cap of an element known to all degrees.
pub const UNBOUNDED: u32 = u32::MAX / 4;

/// Which of the `2n` generators an operator touches.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Full,
    Holo,
    AntiHolo,
}

impl Split {
    pub fn range(self, dim: usize) -> std::ops::Range<usize> {
        match self {
            Split::Full => 0..2 * dim,
            Split::Holo => 0..dim,
            Split::AntiHolo => dim..2 * dim,
        }
    }
}

/// Basis key: `λ^lam · y^sym ⊗ e^asym`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Key {
    pub lam: u8,
    pub sym: Monomial,
    pub asym: u8,
}

impl Key {
    pub const ONE: Key = Key {
        lam: 0,
        sym: Monomial::ONE,
        asym: 0,
    };

    pub fn new(lam: u32, sym: Monomial, asym: u8) -> Key {
        Key {
            lam: u8::try_from(lam).expect("lambda power out of range"),
            sym,
            asym,
        }
    }

    pub fn sym_degree(self) -> u32 {
        self.sym.degree()
    }

    pub fn form_degree(self) -> u32 {
        self.asym.count_ones()
    }

    /// Twice the λ-degree plus the symmetric degree.
    pub fn total_degree(self) -> u32 {
        2 * self.lam as u32 + self.sym.degree()
    }

    /// Symmetric and antisymmetric degree restricted to a split.
    pub fn split_degrees(self, split: Split, dim: usize) -> (u32, u32) {
        let r = split.range(dim);
        let k = r.clone().map(|v| self.sym.exp(v)).sum();
        let l = r.map(|v| ((self.asym >> v) & 1) as u32).sum();
        (k, l)
    }

    /// No anti-holomorphic generator, symmetric or antisymmetric.
    pub fn is_holomorphic(self, dim: usize) -> bool {
        self.split_degrees(Split::AntiHolo, dim) == (0, 0)
    }

    /// No holomorphic generator, symmetric or antisymmetric.
    pub fn is_antiholomorphic(self, dim: usize) -> bool {
        self.split_degrees(Split::Holo, dim) == (0, 0)
    }

    pub fn is_scalar_part(self) -> bool {
        self.sym == Monomial::ONE && self.asym == 0
    }

    pub fn label(self, dim: usize) -> String {
        let mut parts = Vec::new();
        if self.lam > 0 {
            parts.push(if self.lam == 1 {
                "lambda".to_string()
            } else {
                format!("lambda^{}", self.lam)
            });
        }
        let sym = sym_name(self.sym, dim);
        if !sym.is_empty() {
            parts.push(sym);
        }
        let asym = form_name(self.asym, dim);
        if !asym.is_empty() {
            parts.push(asym);
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Name of a symmetric monomial such as `y1^2*ybar1`.
pub fn sym_name(m: Monomial, dim: usize) -> String {
    crate::jet::monomial_name(m, dim)
        .replace("zbar", "ybar")
        .replace('z', "y")
}

/// Name of an antisymmetric monomial such as `dz1^dzbar1`.
pub fn form_name(mask: u8, dim: usize) -> String {
    (0..2 * dim)
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| {
            if v < dim {
                format!("dz{}", v + 1)
            } else {
                format!("dzbar{}", v - dim + 1)
            }
        })
        .collect::<Vec<_>>()
        .join("^")
}

/// Sign and mask of `e^a ∧ e^b`, or `None` when a generator repeats.
#[inline]
pub fn wedge_masks(a: u8, b: u8) -> Option<(bool, u8)> {
    if a & b != 0 {
        return None;
    }
    // Count pairs (i in a, j in b) with i > j: the transpositions needed.
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some((swaps % 2 == 1, a | b))
}

/// Equality compares dimension and stored terms; the caps are bookkeeping
/// and do not take part.
#[derive(Clone)]
pub struct WeylElement<V: Coeff> {
    dim: usize,
    cap: u32,
    terms: BTreeMap<Key, V>,
}

pub type ScalarElement = WeylElement<Jet>;
pub type EndoElement = WeylElement<Endo>;
pub type SectionElement = WeylElement<Section>;

impl<V: Coeff> WeylElement<V> {
    pub fn zero(dim: usize) -> Self {
        Self::zero_with_cap(dim, UNBOUNDED)
    }

    pub fn zero_with_cap(dim: usize, cap: u32) -> Self {
        WeylElement {
            dim,
            cap,
            terms: BTreeMap::new(),
        }
    }

    /// The element `v ⊗ 1 ⊗ 1` (no fibre or form content).
    pub fn from_value(v: V) -> Self {
        Self::monomial(Key::ONE, v)
    }

    pub fn monomial(key: Key, v: V) -> Self {
        let mut out = Self::zero(v.dim());
        out.add_term(key, v);
        out
    }

    pub fn from_terms(dim: usize, cap: u32, terms: impl IntoIterator<Item = (Key, V)>) -> Self {
        let mut out = Self::zero_with_cap(dim, cap);
        for (k, v) in terms {
            out.add_term(k, v);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &V)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Key, V)> {
        self.terms.into_iter()
    }

    pub fn get(&self, key: &Key) -> Option<&V> {
        self.terms.get(key)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero through the cap and within every coefficient's trusted order.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.is_zero())
    }

    /// Lowest total degree of a stored nonzero key (or `cap + 1`).
    pub fn valuation(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| k.total_degree())
            .min()
            .unwrap_or(self.cap.saturating_add(1))
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.total_degree()).max()
    }

    /// Smallest trusted jet order among the coefficients.
    pub fn jet_order(&self) -> Order {
        self.terms.values().map(|v| v.order()).min().unwrap_or(Order::Exact)
    }

    pub fn add_term(&mut self, key: Key, v: V) {
        if v.is_exact_zero() || key.total_degree() > self.cap {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&v);
                if e.get().is_exact_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn set_cap(&mut self, cap: u32) {
        if cap < self.cap {
            self.terms.retain(|k, _| k.total_degree() <= cap);
        }
        self.cap = cap;
    }

    /// Restriction to keys of total degree at most `cap`.
    pub fn with_cap(mut self, cap: u32) -> Self {
        self.set_cap(cap.min(self.cap));
        self
    }

    /// Drops the cap without touching the terms; for homogeneous parts that
    /// are exact in their own degree.
    pub fn uncapped(mut self) -> Self {
        self.cap = UNBOUNDED;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone().with_cap(other.cap);
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if other.cap < self.cap {
            self.set_cap(other.cap);
        }
        for (k, v) in &other.terms {
            self.add_term(*k, v.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_values(|v| v.neg())
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        self.map_values(|v| v.scale(s))
    }

    pub fn scale_jet(&self, f: &Jet) -> Self {
        self.map_values(|v| v.scale_jet(f))
    }

    pub fn mul_i(&self) -> Self {
        self.scale(&GaussianRational::i())
    }

    pub fn map_values(&self, f: impl Fn(&V) -> V) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap);
        for (k, v) in &self.terms {
            out.add_term(*k, f(v));
        }
        out
    }

    pub fn try_map_values(&self, f: impl Fn(&V) -> Result<V>) -> Result<Self> {
        let mut out = Self::zero_with_cap(self.dim, self.cap);
        for (k, v) in &self.terms {
            out.add_term(*k, f(v)?);
        }
        Ok(out)
    }

    /// Keeps the keys satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(Key) -> bool) -> Self {
        WeylElement {
            dim: self.dim,
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(**k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        self.filter(|k| k.total_degree() == d)
    }

    /// Part of antisymmetric degree exactly `p`.
    pub fn form_part(&self, p: u32) -> Self {
        self.filter(|k| k.form_degree() == p)
    }

    /// Homogeneous parts indexed by total degree, through `max`.
    pub fn by_degree(&self, max: u32) -> Vec<Self> {
        let mut parts: Vec<Self> = (0..=max).map(|_| Self::zero_with_cap(self.dim, UNBOUNDED)).collect();
        for (k, v) in &self.terms {
            let d = k.total_degree();
            if d <= max {
                parts[d as usize].terms.insert(*k, v.clone());
            }
        }
        parts
    }

    /// Multiplication by `λ^m`.
    pub fn lambda_shift(&self, m: u32) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap.saturating_add(2 * m));
        for (k, v) in &self.terms {
            out.add_term(Key::new(k.lam as u32 + m, k.sym, k.asym), v.clone());
        }
        out
    }

    /// Division by `λ`; fails if a nonzero `λ⁰` component is present.
    pub fn divide_lambda(&self) -> Result<Self> {
        if let Some((k, v)) = self.terms.iter().find(|(k, v)| k.lam == 0 && !v.is_zero()) {
            return Err(Error::NegativeLambdaPower(format!(
                "key {} carries {}",
                k.label(self.dim),
                v.describe()
            )));
        }
        let mut out = Self::zero_with_cap(self.dim, self.cap.saturating_sub(2));
        for (k, v) in &self.terms {
            if k.lam > 0 {
                out.add_term(Key::new(k.lam as u32 - 1, k.sym, k.asym), v.clone());
            }
        }
        Ok(out)
    }

    /// Coefficient-wise truncation of the jets.
    pub fn truncate_jets(&self, order: Order) -> Self {
        self.map_values(|v| v.truncated(order))
    }

    /// First key (within both caps) where the elements differ, with
    /// descriptions of both values.
    pub fn first_disagreement(&self, other: &Self) -> Option<Disagreement> {
        let cap = self.cap.min(other.cap);
        let keys: std::collections::BTreeSet<Key> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|k| k.total_degree() <= cap)
            .copied()
            .collect();
        for key in keys {
            let detail = match (self.terms.get(&key), other.terms.get(&key)) {
                (Some(a), Some(b)) => a.disagreement(b),
                (Some(a), None) => (!a.is_zero()).then(|| format!("{} vs 0", a.describe())),
                (None, Some(b)) => (!b.is_zero()).then(|| format!("0 vs {}", b.describe())),
                (None, None) => None,
            };
            if let Some(detail) = detail {
                return Some(Disagreement {
                    key,
                    label: key.label(self.dim),
                    detail,
                });
            }
        }
        None
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// Partial derivative with respect to symmetric generator `v`.
    pub fn sym_derivative(&self, v: usize) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap.saturating_sub(1));
        for (k, c) in &self.terms {
            if let Some((lowered, e)) = k.sym.lower(v) {
                out.add_term(
                    Key { sym: lowered, ..*k },
                    c.scale(&GaussianRational::from_int(e as i64)),
                );
            }
        }
        out
    }

    /// Multiplication by symmetric generator `v`.
    pub fn sym_multiply(&self, v: usize) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap.saturating_add(1));
        for (k, c) in &self.terms {
            out.add_term(
                Key {
                    sym: k.sym.times(Monomial::var(v)),
                    ..*k
                },
                c.clone(),
            );
        }
        out
    }

    /// Left exterior multiplication by form generator `v`.
    pub fn wedge_generator(&self, v: usize) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap);
        for (k, c) in &self.terms {
            if let Some((neg, mask)) = wedge_masks(1 << v, k.asym) {
                out.add_term(Key { asym: mask, ..*k }, if neg { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Jet derivative `∂/∂zᵛ` (or `∂/∂z̄`) of every coefficient.
    pub fn derive_coefficients(&self, v: usize) -> Result<Self> {
        self.try_map_values(|c| c.derive(v))
    }

    /// Complex conjugation of fibre and form generators only: `y ↔ ȳ`,
    /// `e ↔ ē`, with the reordering sign. Coefficients are left alone.
    pub fn swap_generators(&self, f: impl Fn(&V) -> V) -> Self {
        let mut out = Self::zero_with_cap(self.dim, self.cap);
        for (k, c) in &self.terms {
            let (neg, mask) = conj_mask(k.asym, self.dim);
            let v = f(c);
            out.add_term(
                Key {
                    lam: k.lam,
                    sym: k.sym.conj(self.dim),
                    asym: mask,
                },
                if neg { v.neg() } else { v },
            );
        }
        out
    }
}

/// Conjugate of a canonical form monomial: each `eᵏ ↔ ēᵏ`, resorted.
pub fn conj_mask(mask: u8, dim: usize) -> (bool, u8) {
    let images: Vec<usize> = (0..2 * dim)
        .filter(|v| mask >> v & 1 == 1)
        .map(|v| if v < dim { v + dim } else { v - dim })
        .collect();
    let mut inversions = 0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                inversions += 1;
            }
        }
    }
    let new_mask = images.iter().fold(0u8, |m, v| m | (1 << v));
    (inversions % 2 == 1, new_mask)
}

/// First point where two elements differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub key: Key,
    pub label: String,
    pub detail: String,
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.label, self.detail)
    }
}

impl ScalarElement {
    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        Self::from_value(Jet::constant(dim, c, Order::Exact))
    }

    pub fn one(dim: usize) -> Self {
        Self::from_value(Jet::one(dim))
    }

    /// Symmetric generator `yᵛ` (`v < n`) or `ȳ^{v-n}`.
    pub fn sym_generator(dim: usize, v: usize) -> Self {
        Self::monomial(Key::new(0, Monomial::var(v), 0), Jet::one(dim))
    }

    /// Antisymmetric generator `eᵛ` (`v < n`) or `ē^{v-n}`.
    pub fn form_generator(dim: usize, v: usize) -> Self {
        Self::monomial(Key::new(0, Monomial::ONE, 1 << v), Jet::one(dim))
    }

    /// The formal parameter λ.
    pub fn lambda(dim: usize) -> Self {
        Self::monomial(Key::new(1, Monomial::ONE, 0), Jet::one(dim))
    }

    /// Complex conjugation: conjugates jets and swaps holomorphic and
    /// anti-holomorphic generators. λ is real.
    pub fn conj(&self) -> Self {
        self.swap_generators(|c| c.conj())
    }

    /// Promotes a scalar element to `f · id` in a rank-`rank` bundle.
    pub fn to_endo(&self, rank: usize) -> EndoElement {
        let mut out = EndoElement::zero_with_cap(self.dim, self.cap);
        for (k, v) in &self.terms {
            out.add_term(*k, Endo::scalar(v, rank));
        }
        out
    }
}

impl<V: Coeff> PartialEq for WeylElement<V> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.terms == other.terms
    }
}

impl<V: Coeff> fmt::Debug for WeylElement<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement(cap {}) {{", self.cap)?;
        for (k, v) in &self.terms {
            write!(f, " [{}] {};", k.label(self.dim), v.describe())?;
        }
        write!(f, " }}")
    }
}

impl EndoElement {
    /// Entry `(i, j)` as a scalar element.
    pub fn entry(&self, i: usize, j: usize) -> ScalarElement {
        let mut out = ScalarElement::zero_with_cap(self.dim, self.cap);
        for (k, v) in &self.terms {
            out.add_term(*k, v.get(i, j).clone());
        }
        out
    }
}

impl SectionElement {
    /// Component `i` as a scalar element.
    pub fn component(&self, i: usize) -> ScalarElement {
        let mut out = ScalarElement::zero_with_cap(self.dim, self.cap);
        for (k, v) in &self.terms {
            out.add_term(*k, v.get(i, 0).clone());
        }
        out
    }

    /// Assembles a section element from scalar components.
    pub fn from_components(dim: usize, comps: &[ScalarElement]) -> Self {
        let rank = comps.len();
        let cap = comps.iter().map(|c| c.cap).min().unwrap_or(UNBOUNDED);
        let keys: std::collections::BTreeSet<Key> = comps.iter().flat_map(|c| c.terms.keys().copied()).collect();
        let mut out = SectionElement::zero_with_cap(dim, cap);
        for key in keys {
            let col = (0..rank)
                .map(|i| {
                    comps[i]
                        .terms
                        .get(&key)
                        .cloned()
                        .unwrap_or_else(|| Jet::zero(dim, Order::Exact))
                })
                .collect();
            out.add_term(key, Section::column(col));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        // e1 ∧ e0 = -e0 ∧ e1
        assert_eq!(wedge_masks(0b10, 0b01), Some((true, 0b11)));
        assert_eq!(wedge_masks(0b01, 0b10), Some((false, 0b11)));
        assert_eq!(wedge_masks(0b01, 0b01), None);
        // e2 ∧ (e0 ∧ e1) = e0 ∧ e1 ∧ e2
        assert_eq!(wedge_masks(0b100, 0b011), Some((false, 0b111)));
        // e1 ∧ (e0 ∧ e2) = -e0 ∧ e1 ∧ e2
        assert_eq!(wedge_masks(0b010, 0b101), Some((true, 0b111)));
    }

    #[test]
    fn conjugate_masks() {
        // dim 1: conj(e ∧ ē) = ē ∧ e = -e ∧ ē
        assert_eq!(conj_mask(0b11, 1), (true, 0b11));
        assert_eq!(conj_mask(0b01, 1), (false, 0b10));
        // dim 2: conj(e0 ∧ e1) = ē0 ∧ ē1
        assert_eq!(conj_mask(0b0011, 2), (false, 0b1100));
    }

    #[test]
    fn degrees_and_labels() {
        let k = Key::new(1, Monomial::from_exponents(&[2, 1]), 0b01);
        assert_eq!(k.total_degree(), 5);
        assert_eq!(k.form_degree(), 1);
        assert_eq!(k.label(1), "lambda y1^2*ybar1 dz1");
        assert_eq!(k.split_degrees(Split::Holo, 1), (2, 1));
        assert_eq!(k.split_degrees(Split::AntiHolo, 1), (1, 0));
    }

    #[test]
    fn lambda_division_guards_negative_powers() {
        let y = ScalarElement::sym_generator(1, 0);
        assert!(matches!(y.divide_lambda(), Err(Error::NegativeLambdaPower(_))));
        let ly = y.lambda_shift(1);
        assert_eq!(ly.divide_lambda().unwrap(), y);
    }

    #[test]
    fn caps_drop_high_keys() {
        let y = ScalarElement::sym_generator(1, 0).with_cap(2);
        let cubic = y.sym_multiply(0).sym_multiply(0);
        assert_eq!(cubic.cap(), 4);
        let capped = cubic.with_cap(2);
        assert!(capped.is_empty());
    }
}
