//! Involutions on Weyl-algebra elements.
//!
//! On scalars the involution is complex conjugation: jets are conjugated and
//! holomorphic and anti-holomorphic generators swap. On endomorphisms of a
//! Hermitian bundle the matrix part becomes the `H`-adjoint `H⁻¹ A^† H`.

use super::{EndoElement, ScalarElement};
use crate::matrix::Endo;

pub fn scalar_star(a: &ScalarElement) -> ScalarElement {
    a.conj()
}

/// `A* = H⁻¹ A^† H` together with the fibre and form conjugation.
pub fn endo_star(a: &EndoElement, h: &Endo, h_inv: &Endo) -> EndoElement {
    a.swap_generators(|c| h_inv.matmul::<_, crate::matrix::EndoKind>(&c.dagger()).matmul(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet, Order};
    use crate::scalar::{int, GaussianRational};
    use crate::weyl::product::{circ, InverseMetric};

    #[test]
    fn conjugation_reverses_wick_products() {
        let flat = InverseMetric::flat(1);
        let y = ScalarElement::sym_generator(1, 0);
        let ybar = ScalarElement::sym_generator(1, 1);
        let a = y.add(&ybar.scale(&GaussianRational::i()));
        let b = y.sym_multiply(1).add(&ybar);
        let lhs = scalar_star(&circ(&a, &b, &int(1), &flat, 8));
        let rhs = circ(&scalar_star(&b), &scalar_star(&a), &int(1), &flat, 8);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn endo_star_is_an_involution() {
        let dim = 1;
        let h = Endo::from_rows(vec![
            vec![
                Jet::constant(dim, GaussianRational::from_int(2), Order::Exact),
                Jet::one(dim),
            ],
            vec![
                Jet::one(dim),
                Jet::constant(dim, GaussianRational::from_int(3), Order::Exact),
            ],
        ])
        .unwrap();
        let h_inv = h.inverse(4).unwrap();
        let a = Endo::from_rows(vec![
            vec![Jet::z(dim, 0), Jet::zero(dim, Order::Exact)],
            vec![
                Jet::constant(dim, GaussianRational::i(), Order::Exact),
                Jet::zbar(dim, 0),
            ],
        ])
        .unwrap();
        let elem = EndoElement::from_value(a).sym_multiply(0).wedge_generator(1);
        assert_eq!(endo_star(&endo_star(&elem, &h, &h_inv), &h, &h_inv), elem);
    }
}
