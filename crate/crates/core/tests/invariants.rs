//! Algebraic invariants on randomly generated data.

use fedosov_core::geometry::{Builtin, KaehlerChart};
use fedosov_core::scalar::{format_rational, int, parse_rational};
use fedosov_core::verify::{oracle_flat_star, Sampler};
use fedosov_core::weyl::ops::{delta, delta_inverse, kernel_projection};
use fedosov_core::weyl::product::{circ, InverseMetric};
use fedosov_core::weyl::{wedge_masks, Split};
use fedosov_core::{GaussianRational, Jet, Monomial, Order, Rational};
use proptest::prelude::*;

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| {
        GaussianRational::new(Rational::new(a.into(), b.into()), Rational::new(c.into(), d.into()))
    })
}

/// Polynomial in `z¹, z̄¹, z², z̄²`, each variable at most linear.
fn polynomial() -> impl Strategy<Value = Jet> {
    prop::collection::vec((prop::array::uniform4(0u32..=1), gaussian()), 0..5).prop_map(|terms| {
        Jet::from_terms(
            2,
            Order::Exact,
            terms.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), c)),
        )
    })
}

fn kappa() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![int(-1), int(0), int(1)])
}

fn fubini_study_metric() -> InverseMetric {
    KaehlerChart::builtin(Builtin::FubiniStudy, 1, 10, &int(1))
        .unwrap()
        .inverse_metric()
        .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_form_a_commutative_ring(f in polynomial(), g in polynomial(), h in polynomial()) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
    }

    #[test]
    fn conjugation_is_a_ring_involution(f in polynomial(), g in polynomial()) {
        prop_assert_eq!(f.conj().conj(), f.clone());
        prop_assert_eq!((&f * &g).conj(), &f.conj() * &g.conj());
        prop_assert!((&f * &f.conj()).is_real());
    }

    #[test]
    fn derivatives_obey_the_leibniz_rule(f in polynomial(), g in polynomial(), v in 0usize..4) {
        let lhs = (&f * &g).derive(v).unwrap();
        let rhs = &(&f.derive(v).unwrap() * &g) + &(&f * &g.derive(v).unwrap());
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn truncated_inverse_is_an_inverse(f in polynomial(), c in gaussian(), order in 0u32..5) {
        prop_assume!(!num_traits::Zero::is_zero(&c));
        let unit = &Jet::constant(2, c, Order::Exact) + &(&f * &Jet::z(2, 0));
        let inverse = unit.invert_to(order).unwrap();
        let product = (&unit * &inverse).truncated(Order::Finite(order));
        prop_assert!(product.agrees_with(&Jet::one(2).truncated(Order::Finite(order))));
    }

    #[test]
    fn gaussian_inverse(c in gaussian()) {
        prop_assume!(!num_traits::Zero::is_zero(&c));
        let one: GaussianRational = 1.into();
        prop_assert_eq!(c.clone() * c.inv().unwrap(), one);
    }

    #[test]
    fn rationals_round_trip_through_text(p in -1000i64..1000, q in 1i64..1000) {
        let r = Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn wedge_sign_is_graded_antisymmetric(a in 0u8..16, b in 0u8..16) {
        match (wedge_masks(a, b), wedge_masks(b, a)) {
            (None, None) => prop_assert!(a & b != 0),
            (Some((s, m)), Some((t, n))) => {
                prop_assert_eq!(m, n);
                let odd = a.count_ones() * b.count_ones() % 2 == 1;
                prop_assert_eq!(s ^ t, odd);
            }
            _ => prop_assert!(false, "asymmetric vanishing"),
        }
    }

    #[test]
    fn delta_squares_to_zero(seed in any::<u64>(), dim in 1usize..=2) {
        let a = Sampler::new(seed, dim).scalar_element(5);
        for split in [Split::Full, Split::Holo, Split::AntiHolo] {
            prop_assert!(delta(&delta(&a, split), split).is_zero());
            prop_assert!(delta_inverse(&delta_inverse(&a, split), split).is_zero());
        }
    }

    #[test]
    fn hodge_decomposition(seed in any::<u64>(), dim in 1usize..=2) {
        let a = Sampler::new(seed, dim).scalar_element(5);
        for split in [Split::Full, Split::Holo, Split::AntiHolo] {
            let parts = delta(&delta_inverse(&a, split), split)
                .add(&delta_inverse(&delta(&a, split), split))
                .add(&kernel_projection(&a, split));
            prop_assert!(parts.agrees_with(&a), "{:?}: {:?}", split, parts.first_disagreement(&a));
        }
    }

    #[test]
    fn fibrewise_product_is_associative(seed in any::<u64>(), kappa in kappa(), curved in any::<bool>()) {
        let metric = if curved { fubini_study_metric() } else { InverseMetric::flat(1) };
        let mut sampler = Sampler::new(seed, 1);
        let [a, b, c] = [(); 3].map(|_| sampler.scalar_element(3));
        let limit = 6;
        let left = circ(&circ(&a, &b, &kappa, &metric, limit), &c, &kappa, &metric, limit);
        let right = circ(&a, &circ(&b, &c, &kappa, &metric, limit), &kappa, &metric, limit);
        prop_assert!(left.agrees_with(&right), "{:?}", left.first_disagreement(&right));
    }

    #[test]
    fn flat_star_product_has_the_classical_limit(seed in any::<u64>(), kappa in kappa()) {
        let mut sampler = Sampler::new(seed, 2);
        let (f, g) = (sampler.mixed(3), sampler.mixed(3));
        let product = oracle_flat_star(&f, &g, &kappa, 3).unwrap();
        prop_assert_eq!(product.coeff(0), &f * &g);
        let swapped = oracle_flat_star(&g, &f, &kappa, 3).unwrap();
        // the commutator starts at first order
        prop_assert_eq!(product.coeff(0), swapped.coeff(0));
    }
}
