//! Fibrewise operators `δ`, `δ*`, `δ⁻¹`, `σ` and the holomorphic /
//! anti-holomorphic projections, with their split variants.

use super::{wedge_masks, Coeff, Key, Split, WeylElement};
use crate::jet::Monomial;
use crate::scalar::GaussianRational;

fn sign_below(mask: u8, v: usize) -> bool {
    (mask & ((1u8 << v) - 1)).count_ones() % 2 == 1
}

/// `δ = Σ θᵛ ∧ ∂/∂yᵛ` over the generators selected by `split`.
pub fn delta<V: Coeff>(a: &WeylElement<V>, split: Split) -> WeylElement<V> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap().saturating_sub(1));
    for (k, c) in a.terms() {
        for v in split.range(dim) {
            let Some((sym, e)) = k.sym.lower(v) else { continue };
            let Some((neg, mask)) = wedge_masks(1 << v, k.asym) else {
                continue;
            };
            let s = GaussianRational::from_int(if neg { -(e as i64) } else { e as i64 });
            out.add_term(
                Key {
                    lam: k.lam,
                    sym,
                    asym: mask,
                },
                c.scale(&s),
            );
        }
    }
    out
}

/// `δ* = Σ yᵛ · i_a(∂ᵥ)` over the generators selected by `split`.
pub fn delta_star<V: Coeff>(a: &WeylElement<V>, split: Split) -> WeylElement<V> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap().saturating_add(1));
    for (k, c) in a.terms() {
        add_delta_star_term(&mut out, *k, c, split, dim, None);
    }
    out
}

fn add_delta_star_term<V: Coeff>(
    out: &mut WeylElement<V>,
    k: Key,
    c: &V,
    split: Split,
    dim: usize,
    divisor: Option<u32>,
) {
    for v in split.range(dim) {
        if k.asym >> v & 1 == 0 {
            continue;
        }
        let neg = sign_below(k.asym, v);
        let mut s = GaussianRational::from_int(if neg { -1 } else { 1 });
        if let Some(d) = divisor {
            s = s.scale(&crate::scalar::rat(1, d as i64));
        }
        out.add_term(
            Key {
                lam: k.lam,
                sym: k.sym.times(Monomial::var(v)),
                asym: k.asym & !(1 << v),
            },
            c.scale(&s),
        );
    }
}

/// `δ⁻¹ = δ*/(k+l)` on keys with split symmetric degree `k` and split
/// antisymmetric degree `l`, zero where `k + l = 0`.
pub fn delta_inverse<V: Coeff>(a: &WeylElement<V>, split: Split) -> WeylElement<V> {
    let dim = a.dim();
    let mut out = WeylElement::zero_with_cap(dim, a.cap().saturating_add(1));
    for (k, c) in a.terms() {
        let (s, l) = k.split_degrees(split, dim);
        if s + l == 0 {
            continue;
        }
        add_delta_star_term(&mut out, *k, c, split, dim, Some(s + l));
    }
    out
}

/// Projection onto symmetric and antisymmetric degree zero.
pub fn sigma<V: Coeff>(a: &WeylElement<V>) -> WeylElement<V> {
    a.filter(|k| k.is_scalar_part())
}

/// Projection onto keys without anti-holomorphic generators.
pub fn pi_holomorphic<V: Coeff>(a: &WeylElement<V>) -> WeylElement<V> {
    let dim = a.dim();
    a.filter(|k| k.is_holomorphic(dim))
}

/// Projection onto keys without holomorphic generators.
pub fn pi_antiholomorphic<V: Coeff>(a: &WeylElement<V>) -> WeylElement<V> {
    let dim = a.dim();
    a.filter(|k| k.is_antiholomorphic(dim))
}

/// The complementary projection for the split `δ`: keys with no generator
/// of the split's own type. `δ_s⁻¹δ_s + δ_sδ_s⁻¹ + kernel_projection(s) = id`.
pub fn kernel_projection<V: Coeff>(a: &WeylElement<V>, split: Split) -> WeylElement<V> {
    match split {
        Split::Full => sigma(a),
        Split::Holo => pi_antiholomorphic(a),
        Split::AntiHolo => pi_holomorphic(a),
    }
}

/// Coefficients of `λ⁰, λ¹, …` in the scalar part, through `max_lambda`.
pub fn sigma_series<V: Coeff>(a: &WeylElement<V>, max_lambda: u32, zero: &V) -> Vec<V> {
    (0..=max_lambda)
        .map(|m| {
            a.get(&Key::new(m, Monomial::ONE, 0))
                .cloned()
                .unwrap_or_else(|| zero.zero_like())
        })
        .collect()
}

/// True when the element has no nonzero coefficient.
pub fn vanishes<V: Coeff>(a: &WeylElement<V>) -> bool {
    a.terms().all(|(_, v)| v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::ScalarElement;

    fn y(dim: usize, v: usize) -> ScalarElement {
        ScalarElement::sym_generator(dim, v)
    }
    fn e(dim: usize, v: usize) -> ScalarElement {
        ScalarElement::form_generator(dim, v)
    }

    #[test]
    fn delta_of_generator() {
        assert_eq!(delta(&y(1, 0), Split::Full), e(1, 0));
        assert_eq!(delta_inverse(&e(1, 0), Split::Full), y(1, 0));
    }

    #[test]
    fn hodge_decomposition_on_single_keys() {
        let a = e(1, 0);
        let lhs = delta(&delta_inverse(&a, Split::Full), Split::Full)
            .add(&delta_inverse(&delta(&a, Split::Full), Split::Full))
            .add(&sigma(&a));
        assert_eq!(lhs, a);

        // a = y ⊗ e: δa = 0, δ⁻¹a = ½ y².
        let a = y(1, 0).wedge_generator(0);
        assert!(delta(&a, Split::Full).is_empty());
        let half_y2 = y(1, 0).sym_multiply(0).scale(&GaussianRational::from_ratio(1, 2));
        assert_eq!(delta_inverse(&a, Split::Full), half_y2.with_cap(a.cap() + 1));
        let lhs = delta(&delta_inverse(&a, Split::Full), Split::Full)
            .add(&delta_inverse(&delta(&a, Split::Full), Split::Full))
            .add(&sigma(&a));
        assert!(lhs.agrees_with(&a));
    }

    #[test]
    fn projections() {
        let mixed = y(1, 0).sym_multiply(1);
        assert!(pi_holomorphic(&mixed).is_empty());
        let f = ScalarElement::one(1);
        assert_eq!(pi_holomorphic(&f), f);
        // a = ȳ ⊗ e: the split identity for the holomorphic δ.
        let a = y(1, 1).wedge_generator(0);
        let lhs = delta_inverse(&delta(&a, Split::Holo), Split::Holo)
            .add(&delta(&delta_inverse(&a, Split::Holo), Split::Holo))
            .add(&kernel_projection(&a, Split::Holo));
        assert!(lhs.agrees_with(&a));
        assert!(pi_holomorphic(&a).is_empty());
    }
}
