//! Closed-form κ-ordered product on flat `ℂⁿ` with `g_{kℓ̄} = δ_{kℓ}`:
//!
//! `f ⋆_κ g = Σ_{α,β} (κ+1)^{|α|} (κ−1)^{|β|} / (α! β!) λ^{|α|+|β|}
//!            ∂^α ∂̄^β f · ∂̄^α ∂^β g`.
//!
//! Evaluated directly from derivatives of the inputs, without any Fedosov
//! data.

use crate::error::Result;
use crate::fedosov::{DeformedFunction, LambdaSeries};
use crate::jet::{Jet, Order};
use crate::scalar::{GaussianRational, Rational};

fn multi_indices(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=degree {
        for mut rest in multi_indices(dim - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::from_integer(1.into()), |acc, k| {
        acc * Rational::from_integer(k.into())
    })
}

fn derive_many(f: &Jet, holo: &[u32], anti: &[u32]) -> Result<Jet> {
    let dim = f.dim();
    let mut out = f.clone();
    for (k, &e) in holo.iter().enumerate() {
        for _ in 0..e {
            out = out.derive(k)?;
        }
    }
    for (k, &e) in anti.iter().enumerate() {
        for _ in 0..e {
            out = out.derive(dim + k)?;
        }
    }
    Ok(out)
}

/// The flat κ-ordered product of two jets through `λ^max_lambda`.
pub fn oracle_flat_star(f: &Jet, g: &Jet, kappa: &Rational, max_lambda: u32) -> Result<DeformedFunction> {
    let dim = f.dim();
    let one = Rational::from_integer(1.into());
    let plus = kappa + &one;
    let minus = kappa - &one;
    let mut coeffs = Vec::new();
    for m in 0..=max_lambda {
        let mut acc = Jet::zero(dim, Order::Exact);
        for a in 0..=m {
            let b = m - a;
            let weight = num_traits::pow(plus.clone(), a as usize) * num_traits::pow(minus.clone(), b as usize);
            if num_traits::Zero::is_zero(&weight) {
                continue;
            }
            for alpha in multi_indices(dim, a) {
                for beta in multi_indices(dim, b) {
                    let denom = alpha
                        .iter()
                        .chain(beta.iter())
                        .fold(one.clone(), |acc, &e| acc * factorial(e));
                    let left = derive_many(f, &alpha, &beta)?;
                    let right = derive_many(g, &beta, &alpha)?;
                    let c = GaussianRational::real(&weight / &denom);
                    acc = acc + (left * right).scale(&c);
                }
            }
        }
        coeffs.push(acc);
    }
    Ok(LambdaSeries::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn konst(c: i64) -> Jet {
        Jet::constant(1, GaussianRational::from_int(c), Order::Exact)
    }

    #[test]
    fn coordinate_products() {
        let (z, zb) = (Jet::z(1, 0), Jet::zbar(1, 0));
        let zzb = &z * &zb;
        let wick = oracle_flat_star(&z, &zb, &int(1), 2).unwrap();
        assert_eq!(wick.coeffs(), &[zzb.clone(), konst(2), konst(0)]);
        let weyl = oracle_flat_star(&z, &zb, &int(0), 1).unwrap();
        assert_eq!(weyl.coeffs(), &[zzb.clone(), konst(1)]);
        let weyl = oracle_flat_star(&zb, &z, &int(0), 1).unwrap();
        assert_eq!(weyl.coeffs(), &[zzb.clone(), konst(-1)]);
        let anti = oracle_flat_star(&z, &zb, &int(-1), 1).unwrap();
        assert_eq!(anti.coeffs(), &[zzb, konst(0)]);
    }

    #[test]
    fn second_order_wick_term() {
        // z² ⋆ z̄² = z²z̄² + 2λ·(2z)(2z̄) + (2λ)²/2 · 2 · 2
        let (z, zb) = (Jet::z(1, 0), Jet::zbar(1, 0));
        let p = oracle_flat_star(&(&z * &z), &(&zb * &zb), &int(1), 2).unwrap();
        assert_eq!(p.coeff(1), (&z * &zb).scale(&GaussianRational::from_int(8)));
        assert_eq!(p.coeff(2), konst(8));
    }
}
