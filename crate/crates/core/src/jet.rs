//! Truncated Taylor series ("jets") in the holomorphic coordinates
//! `z¹..zⁿ` and their conjugates `z̄¹..z̄ⁿ`, centred at the chart basepoint.
//!
//! Every jet carries the order through which its coefficients are known. An
//! exact polynomial has [`Order::Exact`]; a series expanded from a
//! transcendental function has a finite order. Arithmetic takes the minimum
//! of the operands' orders and differentiation lowers a finite order by one;
//! differentiating a jet known only at the basepoint is an error.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Rational};

/// Largest supported chart dimension (`2n` variables must fit the packed monomial).
pub const MAX_DIM: usize = 4;

/// Exponent vector with one byte per variable. Variables `0..n` are `zᵏ`,
/// variables `n..2n` are `z̄ᵏ`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(v: usize) -> Monomial {
        Monomial(1u64 << (8 * v))
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= 2 * MAX_DIM);
        let mut m = 0u64;
        for (v, &e) in exps.iter().enumerate() {
            assert!(e < 128, "exponent too large");
            m |= (e as u64) << (8 * v);
        }
        Monomial(m)
    }

    #[inline]
    pub fn exp(self, v: usize) -> u32 {
        ((self.0 >> (8 * v)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        // Byte sum; exponents are bounded well below 256 in total.
        (self.0.wrapping_mul(0x0101_0101_0101_0101) >> 56) as u32
    }

    #[inline]
    pub fn times(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }

    /// Divides out one power of variable `v`, returning the old exponent.
    #[inline]
    pub fn lower(self, v: usize) -> Option<(Monomial, u32)> {
        let e = self.exp(v);
        (e > 0).then(|| (Monomial(self.0 - (1u64 << (8 * v))), e))
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }

    /// Swaps the exponents of `zᵏ` and `z̄ᵏ`.
    pub fn conj(self, dim: usize) -> Monomial {
        let mask = (1u64 << (8 * dim)) - 1;
        let lo = self.0 & mask;
        let hi = (self.0 >> (8 * dim)) & mask;
        Monomial((lo << (8 * dim)) | hi)
    }

    /// Degree in the holomorphic variables only.
    pub fn holo_degree(self, dim: usize) -> u32 {
        (0..dim).map(|v| self.exp(v)).sum()
    }

    pub fn antiholo_degree(self, dim: usize) -> u32 {
        (dim..2 * dim).map(|v| self.exp(v)).sum()
    }

    /// Packed exponents, one byte per variable.
    pub fn from_raw(raw: u64) -> Monomial {
        Monomial(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(2 * MAX_DIM))
    }
}

/// Order through which a jet's coefficients are known.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Order {
    Finite(u32),
    Exact,
}

impl Order {
    pub fn admits(self, degree: u32) -> bool {
        match self {
            Order::Exact => true,
            Order::Finite(t) => degree <= t,
        }
    }

    pub fn lowered(self) -> Result<Order> {
        match self {
            Order::Exact => Ok(Order::Exact),
            Order::Finite(0) => Err(Error::JetOrderExhausted),
            Order::Finite(t) => Ok(Order::Finite(t - 1)),
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Exact => None,
            Order::Finite(t) => Some(t),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact => write!(f, "exact"),
            Order::Finite(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    dim: usize,
    order: Order,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Jet {
    pub fn zero(dim: usize, order: Order) -> Jet {
        assert!(dim >= 1 && dim <= MAX_DIM, "unsupported chart dimension {dim}");
        Jet {
            dim,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: GaussianRational, order: Order) -> Jet {
        let mut j = Jet::zero(dim, order);
        j.add_term(Monomial::ONE, c);
        j
    }

    pub fn one(dim: usize) -> Jet {
        Jet::constant(dim, GaussianRational::one(), Order::Exact)
    }

    /// The coordinate function `zᵏ`.
    pub fn z(dim: usize, k: usize) -> Jet {
        assert!(k < dim);
        Jet::monomial(dim, Monomial::var(k), GaussianRational::one(), Order::Exact)
    }

    /// The coordinate function `z̄ᵏ`.
    pub fn zbar(dim: usize, k: usize) -> Jet {
        assert!(k < dim);
        Jet::monomial(dim, Monomial::var(dim + k), GaussianRational::one(), Order::Exact)
    }

    pub fn monomial(dim: usize, m: Monomial, c: GaussianRational, order: Order) -> Jet {
        let mut j = Jet::zero(dim, order);
        j.add_term(m, c);
        j
    }

    pub fn from_terms(dim: usize, order: Order, terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Jet {
        let mut j = Jet::zero(dim, order);
        for (m, c) in terms {
            j.add_term(m, c);
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero through its trusted order.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exactly the zero function (safe to drop from sparse containers).
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.order == Order::Exact
    }

    pub fn coeff(&self, m: Monomial) -> GaussianRational {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(Monomial::ONE)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Adds `c·m`, ignoring monomials beyond the trusted order.
    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() || !self.order.admits(m.degree()) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Drops every monomial above `order` and lowers the trusted order.
    pub fn truncated(&self, order: Order) -> Jet {
        let order = order.min(self.order);
        Jet {
            dim: self.dim,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| order.admits(m.degree()))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn with_order(mut self, order: Order) -> Jet {
        if order < self.order {
            self = self.truncated(order);
        }
        self
    }

    fn check_dim(&self, other: &Jet) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncated(order);
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        let rhs: Vec<(Monomial, u32, &GaussianRational)> =
            other.terms.iter().map(|(m, c)| (*m, m.degree(), c)).collect();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if !order.admits(da) {
                continue;
            }
            for (mb, db, cb) in &rhs {
                if !order.admits(da + db) {
                    continue;
                }
                let p = ca * *cb;
                let slot = acc.entry(ma.times(*mb)).or_default();
                *slot += &p;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Jet {
            dim: self.dim,
            order,
            terms: acc,
        })
    }

    pub fn add_assign_ref(&mut self, other: &Jet) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        if other.order < self.order {
            *self = self.truncated(other.order);
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Jet, s: &GaussianRational) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        if other.order < self.order {
            *self = self.truncated(other.order);
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * s);
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Jet {
        if s.is_zero() {
            return Jet::zero(self.dim, self.order);
        }
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Jet {
        self.scale(&GaussianRational::real(q.clone()))
    }

    pub fn mul_i(&self) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul_i())).collect(),
        }
    }

    /// Formal partial derivative with respect to variable `v`
    /// (`v < n`: `∂/∂zᵛ`, otherwise `∂/∂z̄^{v-n}`).
    pub fn derive(&self, v: usize) -> Result<Jet> {
        assert!(v < 2 * self.dim, "variable index out of range");
        let order = self.order.lowered()?;
        let mut out = Jet::zero(self.dim, order);
        for (m, c) in &self.terms {
            if let Some((lowered, e)) = m.lower(v) {
                out.add_term(lowered, c.scale(&crate::scalar::int(e as i64)));
            }
        }
        Ok(out)
    }

    pub fn derive_z(&self, k: usize) -> Result<Jet> {
        self.derive(k)
    }

    pub fn derive_zbar(&self, k: usize) -> Result<Jet> {
        self.derive(self.dim + k)
    }

    /// Complex conjugate: swaps `z ↔ z̄` and conjugates coefficients.
    pub fn conj(&self) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.conj(self.dim), c.conj())).collect(),
        }
    }

    /// Multiplicative inverse, truncated at the jet's own order.
    pub fn invert(&self) -> Result<Jet> {
        match self.order {
            Order::Finite(t) => self.invert_to(t),
            Order::Exact => {
                if self.terms.keys().all(|m| *m == Monomial::ONE) {
                    let c = self.constant_term();
                    let inv = c
                        .inv()
                        .ok_or_else(|| Error::NotInvertible("zero constant term".into()))?;
                    Ok(Jet::constant(self.dim, inv, Order::Exact))
                } else {
                    Err(Error::UnboundedInverse)
                }
            }
        }
    }

    /// Multiplicative inverse through degree `order`.
    pub fn invert_to(&self, order: u32) -> Result<Jet> {
        let c = self.constant_term();
        let c_inv = c
            .inv()
            .ok_or_else(|| Error::NotInvertible("zero constant term".into()))?;
        let order = Order::Finite(order).min(self.order);
        // a = c(1 + u) with u(0) = 0, so 1/a = c⁻¹ Σ (-u)^m.
        let mut minus_u = self.truncated(order).scale(&-c_inv.clone());
        minus_u.terms.remove(&Monomial::ONE);
        let one = Jet::constant(self.dim, GaussianRational::one(), order);
        let mut sum = one.clone();
        let mut power = one;
        let max = order.finite().unwrap_or(0);
        for _ in 0..max {
            power = &power * &minus_u;
            if power.is_zero() {
                break;
            }
            sum.add_assign_ref(&power);
        }
        Ok(sum.scale(&c_inv))
    }

    pub fn pow(&self, e: u32) -> Jet {
        let mut acc = Jet {
            dim: self.dim,
            order: self.order,
            terms: Jet::one(self.dim).terms,
        };
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Agreement of the two jets through the smaller trusted order.
    pub fn agrees_with(&self, other: &Jet) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// First monomial (within the common trusted order) where the jets differ.
    pub fn first_disagreement(&self, other: &Jet) -> Option<(Monomial, GaussianRational, GaussianRational)> {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<Monomial> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|m| order.admits(m.degree()))
            .copied()
            .collect();
        keys.into_iter().find_map(|m| {
            let (a, b) = (self.coeff(m), other.coeff(m));
            (a != b).then_some((m, a, b))
        })
    }

    /// No dependence on any `z̄`.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.antiholo_degree(self.dim) == 0)
    }

    /// No dependence on any `z`.
    pub fn is_antiholomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.holo_degree(self.dim) == 0)
    }

    /// Every coefficient of `conj(f) = f`.
    pub fn is_real(&self) -> bool {
        self.agrees_with(&self.conj())
    }

    /// Pretty form such as `1 + 2z1*zbar1 - 1/3i*z1^2`.
    pub fn pretty(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by_key(|(m, _)| (m.degree(), std::cmp::Reverse(**m)));
        for (i, (m, c)) in sorted.into_iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let mono = monomial_name(*m, self.dim);
            match (mono.is_empty(), c.is_real() || c.re.is_zero()) {
                (true, _) => out.push_str(&c.to_string()),
                (false, true) => out.push_str(&format!("{c}*{mono}")),
                (false, false) => out.push_str(&format!("({c})*{mono}")),
            }
        }
        out
    }
}

/// Human-readable name `z1^2*zbar1` of a monomial.
pub fn monomial_name(m: Monomial, dim: usize) -> String {
    let mut parts = Vec::new();
    for v in 0..2 * dim {
        let e = m.exp(v);
        if e == 0 {
            continue;
        }
        let base = if v < dim {
            format!("z{}", v + 1)
        } else {
            format!("zbar{}", v - dim + 1)
        };
        if e == 1 {
            parts.push(base);
        } else {
            parts.push(format!("{base}^{e}"));
        }
    }
    parts.join("*")
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[{}; {}]", self.order, self.pretty())
    }
}

impl Add for &Jet {
    type Output = Jet;
    /// Panics on dimension mismatch; see [`Jet::checked_add`].
    fn add(self, rhs: &Jet) -> Jet {
        self.checked_add(rhs).expect("jet dimension mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.checked_add(&-rhs).expect("jet dimension mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    /// Panics on dimension mismatch; see [`Jet::checked_mul`].
    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).expect("jet dimension mismatch")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Jet {
            type Output = Jet;
            fn $f(self, rhs: Jet) -> Jet {
                (&self).$f(&rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn gq(p: i64) -> GaussianRational {
        GaussianRational::from_int(p)
    }

    fn zzbar(order: Order) -> Jet {
        Jet::monomial(1, Monomial::from_exponents(&[1, 1]), gq(1), order)
    }

    /// Σ_{k} c_k (zz̄)^k as a jet of order `order`.
    fn radial(coeffs: &[Rational], order: u32) -> Jet {
        Jet::from_terms(
            1,
            Order::Finite(order),
            coeffs.iter().enumerate().map(|(k, c)| {
                (
                    Monomial::from_exponents(&[k as u32, k as u32]),
                    GaussianRational::real(c.clone()),
                )
            }),
        )
    }

    #[test]
    fn polynomial_identity() {
        let one = Jet::one(1).with_order(Order::Finite(5));
        let z = Jet::z(1, 0).with_order(Order::Finite(3));
        let p = &(&one + &z) * &(&one - &z);
        let expected = &one - &(&z * &z);
        assert_eq!(p.order(), Order::Finite(3));
        assert!(p.agrees_with(&expected));
        assert_eq!(p.coeff(Monomial::from_exponents(&[2, 0])), gq(-1));
    }

    #[test]
    fn additive_identity() {
        let f = &Jet::z(1, 0) + &Jet::zbar(1, 0);
        assert_eq!(&f + &Jet::zero(1, Order::Exact), f);
    }

    #[test]
    fn geometric_series_times_one_plus_t() {
        // Σ(-1)^k (zz̄)^k truncated at order 4 is 1 - zz̄ + (zz̄)^2.
        let series = radial(&[int(1), int(-1), int(1)], 4);
        let one_plus_t = &Jet::one(1) + &zzbar(Order::Exact);
        let prod = &series * &one_plus_t;
        assert_eq!(prod.order(), Order::Finite(4));
        assert!(prod.agrees_with(&Jet::one(1)));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Jet::z(1, 0);
        let b = Jet::z(2, 1);
        assert_eq!(a.checked_mul(&b), Err(Error::DimensionMismatch(1, 2)));
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn derivatives() {
        let z2zb = Jet::monomial(1, Monomial::from_exponents(&[2, 1]), gq(1), Order::Exact);
        let d = z2zb.derive_z(0).unwrap();
        assert_eq!(
            d,
            Jet::monomial(1, Monomial::from_exponents(&[1, 1]), gq(2), Order::Exact)
        );
        assert!(Jet::z(1, 0).derive_zbar(0).unwrap().is_zero());
        let finite = Jet::z(1, 0).with_order(Order::Finite(0));
        assert_eq!(finite.derive_z(0), Err(Error::JetOrderExhausted));
        assert_eq!(
            Jet::z(1, 0).with_order(Order::Finite(3)).derive_z(0).unwrap().order(),
            Order::Finite(2)
        );
    }

    #[test]
    fn laplacian_of_log_one_plus_t() {
        // log(1+t) = Σ (-1)^{m+1} t^m / m; ∂∂̄ log(1+zz̄) = (1+zz̄)^{-2}.
        let order = 10;
        let coeffs: Vec<Rational> = (0..=5)
            .map(|m| {
                if m == 0 {
                    int(0)
                } else {
                    rat(if m % 2 == 1 { 1 } else { -1 }, m)
                }
            })
            .collect();
        let log = radial(&coeffs, order);
        let lap = log.derive_z(0).unwrap().derive_zbar(0).unwrap();
        // (1+t)^{-2} = Σ (-1)^k (k+1) t^k
        let expected = radial(
            &(0..=4)
                .map(|k| int(if k % 2 == 0 { k + 1 } else { -(k + 1) }))
                .collect::<Vec<_>>(),
            8,
        );
        assert_eq!(lap.order(), Order::Finite(8));
        assert!(lap.agrees_with(&expected));
    }

    #[test]
    fn inversion() {
        let one_minus_t = &Jet::one(1) - &zzbar(Order::Finite(8));
        let inv = one_minus_t.invert().unwrap();
        assert!(inv.agrees_with(&radial(&[int(1), int(1), int(1), int(1), int(1)], 8)));
        assert!((&inv * &one_minus_t).agrees_with(&Jet::one(1)));

        assert_eq!(Jet::one(1).invert().unwrap(), Jet::one(1));

        let one_plus_t = &Jet::one(1) + &zzbar(Order::Finite(8));
        let sq = &one_plus_t * &one_plus_t;
        let inv = sq.invert().unwrap();
        let binomial = radial(&[int(1), int(-2), int(3), int(-4), int(5)], 8);
        assert!(inv.agrees_with(&binomial));

        assert!(matches!(Jet::z(1, 0).invert(), Err(Error::UnboundedInverse)));
        assert!(matches!(
            Jet::z(1, 0).with_order(Order::Finite(3)).invert(),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn conjugation() {
        let iz = Jet::z(1, 0).scale(&GaussianRational::i());
        let expected = Jet::zbar(1, 0).scale(&-GaussianRational::i());
        assert_eq!(iz.conj(), expected);
        assert_eq!(zzbar(Order::Exact).conj(), zzbar(Order::Exact));
        assert!(zzbar(Order::Exact).is_real());
    }

    #[test]
    fn monomial_packing() {
        let m = Monomial::from_exponents(&[1, 2, 0, 3]);
        assert_eq!(m.degree(), 6);
        assert_eq!(m.conj(2), Monomial::from_exponents(&[0, 3, 1, 2]));
        assert_eq!(m.holo_degree(2), 3);
        assert_eq!(monomial_name(m, 2), "z1*z2^2*zbar2^3");
    }
}
