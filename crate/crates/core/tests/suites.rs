use fedosov_core::fedosov::{Omega, Truncation};
use fedosov_core::geometry::{Builtin, KaehlerChart};
use fedosov_core::scalar::int;
use fedosov_core::verify::{run_suite, SuiteConfig, SUITES};
use fedosov_core::{Jet, Order};

fn config(builtin: Builtin, dim: usize, n: u32) -> SuiteConfig {
    let t = Truncation::new(n);
    let chart = KaehlerChart::builtin(builtin, dim, t.required_jet_order(), &int(1)).unwrap();
    SuiteConfig::new(chart, t)
}

fn assert_all_pass(cfg: &SuiteConfig, suites: &[&str]) {
    let mut failures = Vec::new();
    for name in suites {
        for report in run_suite(name, cfg).unwrap() {
            println!("{report}");
            if !report.passed() {
                failures.push(report.to_string());
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn all_suites_pass_on_flat_space() {
    assert_all_pass(&config(Builtin::Flat, 1, 2), &SUITES);
}

#[test]
fn all_suites_pass_on_fubini_study() {
    let mut cfg = config(Builtin::FubiniStudy, 1, 2);
    cfg.omega = Omega::from_potential(&(Jet::z(1, 0) * Jet::zbar(1, 0)).truncated(Order::Finite(8)), 1)
        .unwrap()
        .form()
        .clone();
    assert_all_pass(&cfg, &SUITES);
}
