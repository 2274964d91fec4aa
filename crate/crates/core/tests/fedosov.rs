use fedosov_core::fedosov::recursion::{antiholomorphic_projection, holomorphic_projection};
use fedosov_core::fedosov::{DeformedFunction, FedosovSolution, LambdaSeries, Omega, Truncation};
use fedosov_core::geometry::{Builtin, KaehlerChart};
use fedosov_core::scalar::{int, rat};
use fedosov_core::weyl::ops::{delta_inverse, pi_antiholomorphic, pi_holomorphic, sigma};
use fedosov_core::weyl::{ScalarElement, Split};
use fedosov_core::{Error, GaussianRational, Jet, Order};

fn classical(f: Jet) -> DeformedFunction {
    LambdaSeries::classical(f)
}

fn z(dim: usize, k: usize) -> Jet {
    Jet::z(dim, k)
}

fn zb(dim: usize, k: usize) -> Jet {
    Jet::zbar(dim, k)
}

fn konst(dim: usize, c: i64) -> Jet {
    Jet::constant(dim, GaussianRational::from_int(c), Order::Exact)
}

fn fs(dim: usize, n: u32) -> (KaehlerChart, Truncation) {
    let t = Truncation::new(n);
    let chart = KaehlerChart::builtin(Builtin::FubiniStudy, dim, t.required_jet_order(), &int(1)).unwrap();
    (chart, t)
}

#[test]
fn flat_wick_product_of_coordinates() {
    let t = Truncation::new(2);
    let chart = KaehlerChart::builtin(Builtin::Flat, 1, t.required_jet_order(), &int(1)).unwrap();
    let sol = FedosovSolution::solve(&chart, None, int(1), Omega::zero(1), t).unwrap();
    assert!(sol.r().is_zero());
    let prod = sol.star(&classical(z(1, 0)), &classical(zb(1, 0))).unwrap();
    let expected = LambdaSeries::new(vec![z(1, 0) * zb(1, 0), konst(1, 2), konst(1, 0)]);
    assert!(prod.agrees_with(&expected), "{:?}", prod.first_disagreement(&expected));
    let back = sol.star(&classical(zb(1, 0)), &classical(z(1, 0))).unwrap();
    assert!(back.agrees_with(&classical(z(1, 0) * zb(1, 0))));
}

#[test]
fn flat_weyl_product_of_coordinates() {
    let t = Truncation::new(2);
    let chart = KaehlerChart::builtin(Builtin::Flat, 1, t.required_jet_order(), &int(1)).unwrap();
    let sol = FedosovSolution::solve(&chart, None, int(0), Omega::zero(1), t).unwrap();
    let prod = sol.star(&classical(z(1, 0)), &classical(zb(1, 0))).unwrap();
    assert!(prod.agrees_with(&LambdaSeries::new(vec![z(1, 0) * zb(1, 0), konst(1, 1)])));
    let prod = sol.star(&classical(zb(1, 0)), &classical(z(1, 0))).unwrap();
    assert!(prod.agrees_with(&LambdaSeries::new(vec![z(1, 0) * zb(1, 0), konst(1, -1)])));
}

#[test]
fn fubini_study_connection_form_is_normalized_and_solves_its_equation() {
    let (chart, t) = fs(1, 3);
    for kappa in [int(-1), int(0), int(1)] {
        let sol = FedosovSolution::solve(&chart, None, kappa.clone(), Omega::zero(1), t).unwrap();
        assert!(sol.r().valuation() >= 3);
        assert!(delta_inverse(sol.r(), Split::Full).is_zero());
        assert!(sigma(sol.r()).is_zero());
        let res = sol.residual().unwrap();
        assert!(res.is_zero(), "kappa {kappa}: {res:?}");
    }
}

#[test]
fn jet_order_below_requirement_is_rejected() {
    let t = Truncation::new(2);
    let chart = KaehlerChart::builtin(Builtin::FubiniStudy, 1, 5, &int(1)).unwrap();
    let err = FedosovSolution::solve(&chart, None, int(1), Omega::zero(1), t).unwrap_err();
    assert_eq!(err, Error::JetOrderTooLow { given: 5, required: 6 });
}

#[test]
fn fubini_study_star_is_associative() {
    let (chart, t) = fs(1, 2);
    let f = classical(&z(1, 0) * &z(1, 0) + zb(1, 0));
    let g = classical(&zb(1, 0) * &zb(1, 0) + z(1, 0) * zb(1, 0));
    let h = classical(z(1, 0) + konst(1, 3));
    for kappa in [int(-1), int(0), int(1)] {
        let sol = FedosovSolution::solve(&chart, None, kappa.clone(), Omega::zero(1), t).unwrap();
        let lhs = sol.star(&sol.star(&f, &g).unwrap(), &h).unwrap();
        let rhs = sol.star(&f, &sol.star(&g, &h).unwrap()).unwrap();
        assert!(
            lhs.agrees_with(&rhs),
            "kappa {kappa}: {:?}",
            lhs.first_disagreement(&rhs)
        );
    }
}

#[test]
fn taylor_lift_is_flat_and_sections_back() {
    let (chart, t) = fs(1, 2);
    let omega = Omega::from_potential(&(z(1, 0) * zb(1, 0)).truncated(Order::Finite(8)), 1).unwrap();
    for kappa in [int(-1), int(1)] {
        let sol = FedosovSolution::solve(&chart, None, kappa, omega.clone(), t).unwrap();
        let f = classical(&z(1, 0) * &zb(1, 0) + z(1, 0));
        let lift = sol.taylor(&f).unwrap();
        assert!(sigma(&lift).agrees_with(&f.to_element()));
        let d = sol.derivation().apply(&lift).unwrap();
        assert!(d.is_zero(), "{d:?}");
        let dd = sol
            .derivation()
            .apply(
                &sol.derivation()
                    .apply(&ScalarElement::sym_generator(1, 0).with_cap(4))
                    .unwrap(),
            )
            .unwrap();
        assert!(dd.is_zero(), "{dd:?}");
    }
}

#[test]
fn projected_recursions_reproduce_projections_of_the_lift() {
    let (chart, t) = fs(1, 2);
    let sol = FedosovSolution::solve(&chart, None, int(1), Omega::zero(1), t).unwrap();
    let f = classical(&z(1, 0) * &zb(1, 0) + zb(1, 0));
    let lift = sol.taylor(&f).unwrap();
    let cap = t.degree_cap();
    let u = holomorphic_projection(&f.to_element(), sol.r(), &chart, None, cap).unwrap();
    assert!(
        u.agrees_with(&pi_holomorphic(&lift)),
        "{:?}",
        u.first_disagreement(&pi_holomorphic(&lift))
    );
    let v = antiholomorphic_projection(&f.to_element(), sol.r(), &chart, None, cap).unwrap();
    assert!(v.agrees_with(&pi_antiholomorphic(&lift)));
    let _ = rat(1, 2);
}

#[test]
fn wick_separation_of_variables() {
    let (chart, t) = fs(1, 2);
    let sol = FedosovSolution::solve(&chart, None, int(1), Omega::zero(1), t).unwrap();
    let f = classical(&z(1, 0) * &zb(1, 0) + zb(1, 0));
    let hol = z(1, 0) * z(1, 0);
    let prod = sol.star(&f, &classical(hol.clone())).unwrap();
    assert!(prod.agrees_with(&classical(&f.coeff(0) * &hol)));
    let anti = zb(1, 0) * zb(1, 0);
    let prod = sol.star(&classical(anti.clone()), &f).unwrap();
    assert!(prod.agrees_with(&classical(&f.coeff(0) * &anti)));
}
