//! Named, reportable identity checks grouped into suites.
//!
//! Every check is a pure function of the suite configuration; failures carry
//! a witness naming the first disagreeing key and both values.

pub mod oracle;
pub mod random;
mod suites;

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use self::oracle::oracle_flat_star;
pub use self::random::{Sampler, Variables};

use crate::error::{Error, Result};
use crate::fedosov::{LambdaSeries, Truncation};
use crate::geometry::{BundleChart, KaehlerChart};
use crate::scalar::Rational;
use crate::weyl::{Coeff, ScalarElement, WeylElement};

pub const SUITES: [&str; 6] = ["graded", "geometry", "fedosov", "wick", "hermitian", "morita"];

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub id: String,
    /// The identity being checked, in words.
    pub anchor: String,
    pub status: Status,
    /// Present exactly when the check failed.
    pub witness: Option<String>,
    pub lambda_order: u32,
    pub degree_cap: u32,
    pub wall_time: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} (lambda^{}, degree {}, {:.3}s)",
            self.status.name(),
            self.id,
            self.anchor,
            self.lambda_order,
            self.degree_cap,
            self.wall_time.as_secs_f64()
        )?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

/// Everything a suite needs.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub chart: KaehlerChart,
    /// Bundle for the bundle-valued checks; a rank-2 test bundle is used
    /// when absent.
    pub bundle: Option<BundleChart>,
    pub kappa: Rational,
    /// Raw `Ω` form; validated by each suite for its own ordering.
    pub omega: ScalarElement,
    pub truncation: Truncation,
    pub seed: u64,
    /// Random samples per check.
    pub samples: usize,
    /// Total-degree cap of spanning-set elements for operator identities.
    pub spanning_cap: u32,
}

impl SuiteConfig {
    pub fn new(chart: KaehlerChart, truncation: Truncation) -> Self {
        let dim = chart.dim();
        SuiteConfig {
            chart,
            bundle: None,
            kappa: Rational::from_integer(1.into()),
            omega: ScalarElement::zero(dim),
            truncation,
            seed: 0,
            samples: 10,
            spanning_cap: 2,
        }
    }
}

type CheckFn<'a> = Box<dyn Fn() -> Result<Option<String>> + Send + Sync + 'a>;

/// A named identity with its evaluation.
pub(crate) struct Check<'a> {
    id: String,
    anchor: String,
    body: CheckFn<'a>,
}

impl<'a> Check<'a> {
    pub(crate) fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        body: impl Fn() -> Result<Option<String>> + Send + Sync + 'a,
    ) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            body: Box::new(body),
        }
    }
}

pub(crate) fn failed_setup(id: &str, anchor: &str, err: &Error, truncation: Truncation) -> CheckReport {
    CheckReport {
        id: id.to_string(),
        anchor: anchor.to_string(),
        status: Status::Fail,
        witness: Some(format!("{err}")),
        lambda_order: truncation.lambda_order(),
        degree_cap: truncation.degree_cap(),
        wall_time: Duration::ZERO,
    }
}

pub(crate) fn run_checks(checks: Vec<Check<'_>>, truncation: Truncation) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = checks
        .into_par_iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.body)();
            let wall_time = start.elapsed();
            let witness = match outcome {
                Ok(None) => None,
                Ok(Some(w)) => Some(w),
                Err(e) => Some(format!("error: {e}")),
            };
            CheckReport {
                id: c.id,
                anchor: c.anchor,
                status: if witness.is_none() { Status::Pass } else { Status::Fail },
                witness,
                lambda_order: truncation.lambda_order(),
                degree_cap: truncation.degree_cap(),
                wall_time,
            }
        })
        .collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}

/// Witness for two elements that should agree.
pub(crate) fn element_witness<V: Coeff>(what: &str, lhs: &WeylElement<V>, rhs: &WeylElement<V>) -> Option<String> {
    lhs.first_disagreement(rhs).map(|d| format!("{what}: {d}"))
}

/// Witness for an element that should vanish.
pub(crate) fn zero_witness<V: Coeff>(what: &str, a: &WeylElement<V>) -> Option<String> {
    let zero = WeylElement::zero_with_cap(a.dim(), a.cap());
    element_witness(what, a, &zero)
}

/// Witness for two series that should agree.
pub(crate) fn series_witness<V: Coeff>(what: &str, lhs: &LambdaSeries<V>, rhs: &LambdaSeries<V>) -> Option<String> {
    lhs.first_disagreement(rhs)
        .map(|(m, d)| format!("{what}: lambda^{m}: {d}"))
}

/// First witness of a sequence of sub-checks.
pub(crate) fn first_failure(items: impl IntoIterator<Item = Result<Option<String>>>) -> Result<Option<String>> {
    for item in items {
        if let Some(w) = item? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Runs one named suite.
pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    match name {
        "graded" => Ok(suites::graded(config)),
        "geometry" => Ok(suites::geometry(config)),
        "fedosov" => Ok(suites::fedosov(config)),
        "wick" => Ok(suites::wick(config)),
        "hermitian" => Ok(suites::hermitian(config)),
        "morita" => Ok(suites::morita(config)),
        other => Err(Error::Config(format!(
            "unknown suite {other:?}; known suites: {}",
            SUITES.join(", ")
        ))),
    }
}
