//! Fibrewise products: the undeformed product `μ`, the κ-ordered products
//! `μ ∘ exp((κ+1)λP + (κ−1)λP̄)`, single contractions `P`, `P̄`, the fibrewise
//! Laplacian and the equivalence transformation `S^κ = exp(λκΔ_fib)`.
//!
//! With `P = g^{kℓ̄} ∂_{yᵏ} ⊗ ∂_{ȳˡ}` and `P̄ = g^{kℓ̄} ∂_{ȳˡ} ⊗ ∂_{yᵏ}`, the
//! exponential expands over pairs of contraction-count matrices `M`, `N`:
//! `Π (κ+1)^{|M|} (κ−1)^{|N|} λ^{|M|+|N|} / (M! N!) · Π (g^{kℓ̄})^{M+N}`.
//! All terms sharing a result key and a metric exponent pattern are summed
//! before the (expensive) multiplication by metric jets.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{wedge_masks, Coeff, Compose, Key, WeylElement};
use crate::jet::{Jet, Monomial, Order};
use crate::scalar::{GaussianRational, Rational};

/// Inverse metric `g^{kℓ̄}` used by all fibrewise contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseMetric {
    dim: usize,
    entries: Vec<Jet>,
}

impl InverseMetric {
    /// Entries in row-major order: `entries[k·n + ℓ] = g^{kℓ̄}`.
    pub fn new(dim: usize, entries: Vec<Jet>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        InverseMetric { dim, entries }
    }

    /// `g^{kℓ̄} = δ^{kℓ}`.
    pub fn flat(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim * dim)
                .map(|i| {
                    if i / dim == i % dim {
                        Jet::one(dim)
                    } else {
                        Jet::zero(dim, Order::Exact)
                    }
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, l: usize) -> &Jet {
        &self.entries[k * self.dim + l]
    }

    fn power(&self, pattern: u128) -> Jet {
        let mut acc = Jet::one(self.dim);
        for cell in 0..self.dim * self.dim {
            let e = (pattern >> (8 * cell)) as u8;
            if e > 0 {
                acc = &acc * &self.entries[cell].pow(e as u32);
            }
        }
        acc
    }
}

/// Weights `(a, b)` of the deformed product `μ ∘ exp(aλP + bλP̄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductWeights {
    pub holo: Rational,
    pub anti: Rational,
}

impl ProductWeights {
    pub fn undeformed() -> Self {
        ProductWeights {
            holo: Rational::zero(),
            anti: Rational::zero(),
        }
    }

    /// `∘_κ`: weights `κ + 1` and `κ − 1`.
    pub fn kappa(kappa: &Rational) -> Self {
        ProductWeights {
            holo: kappa + Rational::one(),
            anti: kappa - Rational::one(),
        }
    }
}

#[derive(Clone, Debug)]
struct Pattern {
    /// Cell `k·n + ℓ` holds the count of contractions of `yᵏ`/`ȳˡ`.
    cells: u128,
    total: u32,
    rows: [u32; 4],
    cols: [u32; 4],
    /// `Π cells!`
    factorial: BigInt,
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn falling(n: u32, m: u32) -> BigInt {
    (0..m as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(n as u64 - k))
}

/// All count matrices with row sums bounded by `row_max` and column sums by
/// `col_max`, skipping cells whose metric entry vanishes exactly.
fn patterns(dim: usize, row_max: [u32; 4], col_max: [u32; 4], allowed: &[bool]) -> Vec<Pattern> {
    let mut out = Vec::new();
    let mut cur = Pattern {
        cells: 0,
        total: 0,
        rows: [0; 4],
        cols: [0; 4],
        factorial: BigInt::one(),
    };
    fn rec(
        cell: usize,
        dim: usize,
        row_max: &[u32; 4],
        col_max: &[u32; 4],
        allowed: &[bool],
        cur: &mut Pattern,
        out: &mut Vec<Pattern>,
    ) {
        if cell == dim * dim {
            out.push(cur.clone());
            return;
        }
        let (k, l) = (cell / dim, cell % dim);
        let room = if allowed[cell] {
            (row_max[k] - cur.rows[k]).min(col_max[l] - cur.cols[l])
        } else {
            0
        };
        for m in 0..=room {
            let saved = cur.clone();
            cur.cells |= (m as u128) << (8 * cell);
            cur.total += m;
            cur.rows[k] += m;
            cur.cols[l] += m;
            cur.factorial *= factorial(m);
            rec(cell + 1, dim, row_max, col_max, allowed, cur, out);
            *cur = saved;
        }
    }
    rec(0, dim, &row_max, &col_max, allowed, &mut cur, &mut out);
    out
}

fn exps(m: Monomial, dim: usize, offset: usize) -> [u32; 4] {
    let mut e = [0; 4];
    for (k, slot) in e.iter_mut().enumerate().take(dim) {
        *slot = m.exp(offset + k);
    }
    e
}

fn packed(e: &[u32; 4], dim: usize, offset: usize) -> u64 {
    (0..dim).fold(0u64, |acc, k| acc | ((e[k] as u64) << (8 * (offset + k))))
}

type Accumulator<V> = HashMap<(Key, u128), V>;

fn accumulate<V: Coeff>(acc: &mut Accumulator<V>, key: (Key, u128), v: V) {
    match acc.entry(key) {
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(v);
        }
        std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().add_assign(&v),
    }
}

fn product_impl<A, B>(
    a: &WeylElement<A>,
    b: &WeylElement<B>,
    weights: &ProductWeights,
    metric: &InverseMetric,
    limit: u32,
    graded_sign: bool,
) -> WeylElement<A::Output>
where
    A: Compose<B>,
    B: Coeff,
{
    let dim = a.dim();
    assert_eq!(dim, b.dim(), "dimension mismatch");
    assert_eq!(dim, metric.dim(), "metric dimension mismatch");
    let cap = limit
        .min(a.cap().saturating_add(b.valuation()))
        .min(b.cap().saturating_add(a.valuation()));
    let allowed: Vec<bool> = metric.entries.iter().map(|g| !g.is_exact_zero()).collect();
    let use_holo = !weights.holo.is_zero();
    let use_anti = !weights.anti.is_zero();
    let holo_pows: Vec<Rational> = (0..=64)
        .scan(Rational::one(), |p, _| {
            let cur = p.clone();
            *p = &*p * &weights.holo;
            Some(cur)
        })
        .collect();
    let anti_pows: Vec<Rational> = (0..=64)
        .scan(Rational::one(), |p, _| {
            let cur = p.clone();
            *p = &*p * &weights.anti;
            Some(cur)
        })
        .collect();

    let b_terms: Vec<(&Key, &B)> = b.terms().collect();
    let a_terms: Vec<(&Key, &A)> = a.terms().collect();

    let work = |(ka, va): &(&Key, &A)| -> Accumulator<A::Output> {
        let mut acc: Accumulator<A::Output> = HashMap::new();
        let da = ka.total_degree();
        let a_y = exps(ka.sym, dim, 0);
        let a_ybar = exps(ka.sym, dim, dim);
        for (kb, vb) in &b_terms {
            if da + kb.total_degree() > cap {
                continue;
            }
            let Some((neg, mask)) = wedge_masks(ka.asym, kb.asym) else {
                continue;
            };
            let mut neg = neg;
            if graded_sign && (ka.form_degree() * kb.form_degree()) % 2 == 1 {
                neg = !neg;
            }
            let b_y = exps(kb.sym, dim, 0);
            let b_ybar = exps(kb.sym, dim, dim);
            let base = va.compose(vb);
            let holo = if use_holo {
                patterns(dim, a_y, b_ybar, &allowed)
            } else {
                patterns(dim, [0; 4], [0; 4], &allowed)
            };
            let anti = if use_anti {
                patterns(dim, b_y, a_ybar, &allowed)
            } else {
                patterns(dim, [0; 4], [0; 4], &allowed)
            };
            for m in &holo {
                for n in &anti {
                    let mut num = holo_pows[m.total as usize].clone() * &anti_pows[n.total as usize];
                    if num.is_zero() {
                        continue;
                    }
                    let mut ff = BigInt::one();
                    let mut ra = a_y;
                    let mut rab = a_ybar;
                    let mut rb = b_y;
                    let mut rbb = b_ybar;
                    for k in 0..dim {
                        ff *= falling(a_y[k], m.rows[k]) * falling(b_ybar[k], m.cols[k]);
                        ff *= falling(b_y[k], n.rows[k]) * falling(a_ybar[k], n.cols[k]);
                        ra[k] -= m.rows[k];
                        rbb[k] -= m.cols[k];
                        rb[k] -= n.rows[k];
                        rab[k] -= n.cols[k];
                    }
                    num = num * Rational::from_integer(ff) / Rational::from_integer(&m.factorial * &n.factorial);
                    if neg {
                        num = -num;
                    }
                    let sym = Monomial::from_raw(
                        packed(&ra, dim, 0) + packed(&rab, dim, dim) + packed(&rb, dim, 0) + packed(&rbb, dim, dim),
                    );
                    let key = Key::new(ka.lam as u32 + kb.lam as u32 + m.total + n.total, sym, mask);
                    let v = base.scale(&GaussianRational::real(num));
                    accumulate(&mut acc, (key, m.cells + n.cells), v);
                }
            }
        }
        acc
    };

    let merged: Accumulator<A::Output> = if a_terms.len() * b_terms.len() > 64 {
        a_terms.par_iter().map(work).reduce(HashMap::new, |mut x, y| {
            for (k, v) in y {
                accumulate(&mut x, k, v);
            }
            x
        })
    } else {
        let mut x = HashMap::new();
        for t in &a_terms {
            for (k, v) in work(t) {
                accumulate(&mut x, k, v);
            }
        }
        x
    };

    let mut powers: HashMap<u128, Jet> = HashMap::new();
    let mut entries: Vec<((Key, u128), A::Output)> = merged.into_iter().collect();
    entries.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out = WeylElement::zero_with_cap(dim, cap);
    for ((key, pattern), v) in entries {
        if pattern == 0 {
            out.add_term(key, v);
            continue;
        }
        let g = powers.entry(pattern).or_insert_with(|| metric.power(pattern)).clone();
        out.add_term(key, v.scale_jet(&g));
    }
    out
}

/// `μ ∘ exp(aλP + bλP̄)` through total degree `limit`.
pub fn weighted_product<A, B>(
    a: &WeylElement<A>,
    b: &WeylElement<B>,
    weights: &ProductWeights,
    metric: &InverseMetric,
    limit: u32,
) -> WeylElement<A::Output>
where
    A: Compose<B>,
    B: Coeff,
{
    product_impl(a, b, weights, metric, limit, false)
}

/// The κ-ordered fibrewise product `a ∘_κ b` through total degree `limit`.
pub fn circ<A, B>(
    a: &WeylElement<A>,
    b: &WeylElement<B>,
    kappa: &Rational,
    metric: &InverseMetric,
    limit: u32,
) -> WeylElement<A::Output>
where
    A: Compose<B>,
    B: Coeff,
{
    product_impl(a, b, &ProductWeights::kappa(kappa), metric, limit, false)
}

/// The undeformed super-commutative product `μ`.
pub fn mu<A, B>(a: &WeylElement<A>, b: &WeylElement<B>, limit: u32) -> WeylElement<A::Output>
where
    A: Compose<B>,
    B: Coeff,
{
    let metric = InverseMetric::flat(a.dim());
    product_impl(a, b, &ProductWeights::undeformed(), &metric, limit, false)
}

/// Super-commutator `ad_κ(r)a = r ∘_κ a − (−1)^{|r||a|} a ∘_κ r`.
pub fn supercommutator<R, A>(
    r: &WeylElement<R>,
    a: &WeylElement<A>,
    kappa: &Rational,
    metric: &InverseMetric,
    limit: u32,
) -> WeylElement<A>
where
    R: Compose<A, Output = A>,
    A: Compose<R, Output = A>,
{
    graded_two_sided(r, a, r, kappa, metric, limit)
}

/// `l ∘_κ a − (−1)^{|a||r|} a ∘_κ r`, the two-sided generalisation of the
/// super-commutator used for module derivations (the sign is applied per
/// pair of homogeneous terms).
pub fn graded_two_sided<L, A, R>(
    left: &WeylElement<L>,
    a: &WeylElement<A>,
    right: &WeylElement<R>,
    kappa: &Rational,
    metric: &InverseMetric,
    limit: u32,
) -> WeylElement<A>
where
    L: Compose<A, Output = A>,
    A: Compose<R, Output = A>,
    R: Coeff,
{
    let weights = ProductWeights::kappa(kappa);
    let lhs = product_impl(left, a, &weights, metric, limit, false);
    let rhs = product_impl(a, right, &weights, metric, limit, true);
    lhs.sub(&rhs)
}

/// Which single contraction to apply.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Contraction {
    /// `g^{kℓ̄} ∂_{yᵏ} ⊗ ∂_{ȳˡ}`
    P,
    /// `g^{kℓ̄} ∂_{ȳˡ} ⊗ ∂_{yᵏ}`
    PBar,
}

/// `μ ∘ P(a ⊗ b)` or `μ ∘ P̄(a ⊗ b)`, one contraction and no λ.
pub fn contract<A, B>(
    a: &WeylElement<A>,
    b: &WeylElement<B>,
    which: Contraction,
    metric: &InverseMetric,
) -> WeylElement<A::Output>
where
    A: Compose<B>,
    B: Coeff,
{
    let dim = a.dim();
    let mut out: Option<WeylElement<A::Output>> = None;
    for k in 0..dim {
        for l in 0..dim {
            let g = metric.get(k, l);
            if g.is_exact_zero() {
                continue;
            }
            let (da, db) = match which {
                Contraction::P => (a.sym_derivative(k), b.sym_derivative(dim + l)),
                Contraction::PBar => (a.sym_derivative(dim + l), b.sym_derivative(k)),
            };
            let term = mu(&da, &db, super::UNBOUNDED).scale_jet(g);
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
    }
    out.unwrap_or_else(|| WeylElement::zero(dim))
}

/// Fibrewise Laplacian `Δ_fib = g^{kℓ̄} ∂_{yᵏ} ∂_{ȳˡ}`.
pub fn laplace_fib<V: Coeff>(a: &WeylElement<V>, metric: &InverseMetric) -> WeylElement<V> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap().saturating_sub(2));
    for k in 0..dim {
        let dk = a.sym_derivative(k);
        for l in 0..dim {
            let g = metric.get(k, l);
            if g.is_exact_zero() {
                continue;
            }
            out.add_assign(&dk.sym_derivative(dim + l).scale_jet(g));
        }
    }
    out
}

/// `S^κ = exp(λκΔ_fib)`; the series terminates because `Δ_fib` lowers the
/// symmetric degree by two.
pub fn s_kappa<V: Coeff>(a: &WeylElement<V>, kappa: &Rational, metric: &InverseMetric) -> WeylElement<V> {
    if kappa.is_zero() {
        return a.clone();
    }
    let mut out = a.clone();
    let mut term = a.clone();
    let mut m = 0i64;
    loop {
        m += 1;
        let next = laplace_fib(&term, metric).lambda_shift(1);
        if next.is_empty() {
            break;
        }
        let factor = kappa / Rational::from_integer(BigInt::from(m));
        term = next.scale(&GaussianRational::real(factor));
        term.set_cap(a.cap());
        out.add_assign(&term);
    }
    out.set_cap(a.cap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::weyl::ScalarElement;

    fn y(v: usize) -> ScalarElement {
        ScalarElement::sym_generator(1, v)
    }
    fn lam() -> ScalarElement {
        ScalarElement::lambda(1)
    }

    #[test]
    fn wick_product_of_generators() {
        let flat = InverseMetric::flat(1);
        let wick = circ(&y(0), &y(1), &int(1), &flat, 8);
        assert_eq!(
            wick,
            mu(&y(0), &y(1), 8)
                .add(&lam().scale(&GaussianRational::from_int(2)))
                .with_cap(8)
        );
        let rev = circ(&y(1), &y(0), &int(1), &flat, 8);
        assert_eq!(rev, mu(&y(1), &y(0), 8).with_cap(8));
        let weyl = circ(&y(0), &y(1), &int(0), &flat, 8);
        assert_eq!(weyl, mu(&y(0), &y(1), 8).add(&lam()).with_cap(8));
    }

    #[test]
    fn form_generators_anticommute() {
        let e = ScalarElement::form_generator(1, 0);
        let ebar = ScalarElement::form_generator(1, 1);
        assert!(mu(&e, &e, 8).is_empty());
        assert_eq!(mu(&e, &ebar, 8), mu(&ebar, &e, 8).neg());
    }

    #[test]
    fn laplacian_and_s_kappa_on_flat() {
        let flat = InverseMetric::flat(1);
        let yy = mu(&y(0), &y(1), 8);
        assert_eq!(laplace_fib(&yy, &flat), ScalarElement::one(1).with_cap(6));
        let s = s_kappa(&yy, &int(1), &flat);
        assert_eq!(s, yy.add(&lam()).with_cap(8));
        assert!(laplace_fib(&mu(&y(0), &y(0), 8), &flat).is_empty());
    }

    #[test]
    fn single_contractions() {
        let flat = InverseMetric::flat(1);
        assert_eq!(contract(&y(0), &y(1), Contraction::P, &flat), ScalarElement::one(1));
        assert!(contract(&y(1), &y(0), Contraction::P, &flat).is_empty());
        assert_eq!(contract(&y(1), &y(0), Contraction::PBar, &flat), ScalarElement::one(1));
    }
}
