//! Seeded generators of small exact test data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{Jet, Monomial, Order};
use crate::matrix::{Endo, Section};
use crate::scalar::{rat, GaussianRational};
use crate::weyl::{EndoElement, Key, ScalarElement, SectionElement};

/// Which variables a random polynomial may use.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Variables {
    Mixed,
    Holomorphic,
    AntiHolomorphic,
}

pub struct Sampler {
    rng: ChaCha8Rng,
    dim: usize,
}

impl Sampler {
    pub fn new(seed: u64, dim: usize) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero Gaussian rational with numerators in `−2..=2` and
    /// denominators in `1..=3`.
    pub fn gaussian(&mut self) -> GaussianRational {
        loop {
            let re = rat(self.rng.gen_range(-2..=2), self.rng.gen_range(1..=3));
            let im = if self.rng.gen_bool(0.5) {
                rat(self.rng.gen_range(-2..=2), self.rng.gen_range(1..=3))
            } else {
                rat(0, 1)
            };
            let c = GaussianRational::new(re, im);
            if c != GaussianRational::from_int(0) {
                return c;
            }
        }
    }

    fn monomial(&mut self, vars: Variables, max_degree: u32) -> Monomial {
        let n = self.dim;
        let degree = self.rng.gen_range(0..=max_degree);
        let mut m = Monomial::ONE;
        for _ in 0..degree {
            let v = match vars {
                Variables::Mixed => self.rng.gen_range(0..2 * n),
                Variables::Holomorphic => self.rng.gen_range(0..n),
                Variables::AntiHolomorphic => n + self.rng.gen_range(0..n),
            };
            m = m.times(Monomial::var(v));
        }
        m
    }

    /// Exact polynomial with one to four terms of degree at most
    /// `max_degree`.
    pub fn polynomial(&mut self, vars: Variables, max_degree: u32) -> Jet {
        loop {
            let terms = self.rng.gen_range(1..=4);
            let mut j = Jet::zero(self.dim, Order::Exact);
            for _ in 0..terms {
                let m = self.monomial(vars, max_degree);
                let c = self.gaussian();
                j.add_term(m, c);
            }
            if !j.is_empty() {
                return j;
            }
        }
    }

    pub fn mixed(&mut self, max_degree: u32) -> Jet {
        self.polynomial(Variables::Mixed, max_degree)
    }

    pub fn endo(&mut self, rank: usize, max_degree: u32) -> Endo {
        Endo::from_fn(rank, rank, |_, _| self.polynomial(Variables::Mixed, max_degree))
    }

    pub fn section(&mut self, rank: usize, vars: Variables, max_degree: u32) -> Section {
        Section::column((0..rank).map(|_| self.polynomial(vars, max_degree)).collect())
    }

    /// Random basis key of total degree at most `cap`.
    pub fn key(&mut self, cap: u32) -> Key {
        let lam = self.rng.gen_range(0..=cap / 2);
        let sym_max = cap - 2 * lam;
        let n = self.dim;
        let deg = self.rng.gen_range(0..=sym_max);
        let mut sym = Monomial::ONE;
        for _ in 0..deg {
            sym = sym.times(Monomial::var(self.rng.gen_range(0..2 * n)));
        }
        let asym = self.rng.gen_range(0..(1u32 << (2 * n))) as u8;
        Key::new(lam, sym, asym)
    }

    fn terms(&mut self) -> usize {
        self.rng.gen_range(2..=4)
    }

    /// A few random keys of total degree ≤ `cap` with polynomial jet
    /// coefficients of degree ≤ 2.
    pub fn scalar_element(&mut self, cap: u32) -> ScalarElement {
        let mut out = ScalarElement::zero_with_cap(self.dim, cap);
        for _ in 0..self.terms() {
            let k = self.key(cap);
            let v = self.mixed(2);
            out.add_term(k, v);
        }
        out
    }

    /// Random element of form degree zero.
    pub fn scalar_function_element(&mut self, cap: u32) -> ScalarElement {
        let mut out = ScalarElement::zero_with_cap(self.dim, cap);
        for _ in 0..self.terms() {
            let k = Key {
                asym: 0,
                ..self.key(cap)
            };
            let v = self.mixed(2);
            out.add_term(k, v);
        }
        out
    }

    pub fn endo_element(&mut self, rank: usize, cap: u32) -> EndoElement {
        let mut out = EndoElement::zero_with_cap(self.dim, cap);
        for _ in 0..self.terms() {
            let k = self.key(cap);
            let v = self.endo(rank, 2);
            out.add_term(k, v);
        }
        out
    }

    pub fn section_element(&mut self, rank: usize, cap: u32) -> SectionElement {
        let mut out = SectionElement::zero_with_cap(self.dim, cap);
        for _ in 0..self.terms() {
            let k = self.key(cap);
            let v = self.section(rank, Variables::Mixed, 2);
            out.add_term(k, v);
        }
        out
    }
}

/// All basis keys of total degree ≤ `cap` (every form degree).
pub fn spanning_keys(dim: usize, cap: u32) -> Vec<Key> {
    let nvars = 2 * dim;
    let mut monos = vec![Monomial::ONE];
    let mut frontier = vec![Monomial::ONE];
    for _ in 0..cap {
        let mut next = Vec::new();
        for m in &frontier {
            // extend only by variables at or after the last one used, to
            // enumerate each monomial once
            let last = (0..nvars).rev().find(|&v| m.exp(v) > 0).unwrap_or(0);
            for v in last..nvars {
                next.push(m.times(Monomial::var(v)));
            }
        }
        monos.extend(next.iter().copied());
        frontier = next;
    }
    let mut keys = Vec::new();
    for lam in 0..=cap / 2 {
        for m in &monos {
            if 2 * lam + m.degree() > cap {
                continue;
            }
            for asym in 0..(1u32 << nvars) {
                keys.push(Key::new(lam, *m, asym as u8));
            }
        }
    }
    keys
}

/// Scalar spanning set: unit monomials on every key plus `samples` random
/// elements.
pub fn scalar_spanning_set(sampler: &mut Sampler, cap: u32, samples: usize) -> Vec<ScalarElement> {
    let dim = sampler.dim();
    let mut out: Vec<ScalarElement> = spanning_keys(dim, cap)
        .into_iter()
        .map(|k| ScalarElement::monomial(k, Jet::one(dim)).with_cap(cap))
        .collect();
    out.extend((0..samples).map(|_| sampler.scalar_element(cap)));
    out
}

/// Endomorphism spanning set: matrix units on every key plus random
/// elements.
pub fn endo_spanning_set(sampler: &mut Sampler, rank: usize, cap: u32, samples: usize) -> Vec<EndoElement> {
    let dim = sampler.dim();
    let mut out = Vec::new();
    for k in spanning_keys(dim, cap) {
        for a in 0..rank {
            for b in 0..rank {
                let unit = Endo::from_fn(rank, rank, |i, j| {
                    if (i, j) == (a, b) {
                        Jet::one(dim)
                    } else {
                        Jet::zero(dim, Order::Exact)
                    }
                });
                out.push(EndoElement::monomial(k, unit).with_cap(cap));
            }
        }
    }
    out.extend((0..samples).map(|_| sampler.endo_element(rank, cap)));
    out
}

/// Section spanning set: basis sections on every key plus random elements.
pub fn section_spanning_set(sampler: &mut Sampler, rank: usize, cap: u32, samples: usize) -> Vec<SectionElement> {
    let dim = sampler.dim();
    let mut out = Vec::new();
    for k in spanning_keys(dim, cap) {
        for a in 0..rank {
            out.push(SectionElement::monomial(k, Section::basis(dim, rank, a)).with_cap(cap));
        }
    }
    out.extend((0..samples).map(|_| sampler.section_element(rank, cap)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spanning_keys_are_distinct_and_counted() {
        let keys = spanning_keys(1, 2);
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), keys.len());
        // monomials in 2 variables of degree ≤ 2: 6; plus λ·1: 1; times 4 masks
        assert_eq!(keys.len(), (6 + 1) * 4);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = Sampler::new(7, 2).mixed(3);
        let b = Sampler::new(7, 2).mixed(3);
        assert_eq!(a, b);
    }
}
