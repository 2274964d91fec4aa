//! The three commands. Each writes JSON-line records and returns the
//! process exit code: 0 on success, 1 when a verification check fails, 2
//! for configuration, setup and I/O errors.

use std::io::Write;

use fedosov_core::fedosov::morita::MoritaBimodule;
use fedosov_core::fedosov::{FedosovSolution, LambdaSeries};
use fedosov_core::scalar::format_rational;
use fedosov_core::verify::{run_suite, SuiteConfig, SUITES};
use fedosov_core::weyl::Coeff;
use fedosov_core::Result;
use rayon::prelude::*;

use crate::records::{
    emit, form_records, series_record, CheckRecord, ErrorRecord, OrderRecord, SummaryRecord, TaskRecord,
};
use crate::spec::{Problem, Task};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SETUP: i32 = 2;

/// Options shared by the commands.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    /// Suites to run; all when empty.
    pub suites: Vec<String>,
    /// Negative control: flip the sign of every Christoffel symbol.
    pub flip_christoffel: bool,
}

fn prepare(problem: &Problem, opts: &RunOptions) -> Result<Problem> {
    let mut p = problem.clone();
    if opts.flip_christoffel {
        p.chart = p.chart.with_flipped_christoffel()?;
    }
    Ok(p)
}

fn io_failure(e: std::io::Error) -> i32 {
    eprintln!("error: cannot write output: {e}");
    EXIT_SETUP
}

fn classical<V: Coeff>(v: &V) -> LambdaSeries<V> {
    LambdaSeries::classical(v.clone())
}

/// Solutions shared by the tasks of one specification, built on demand.
struct Engines {
    solution: Option<FedosovSolution>,
    morita: Option<MoritaBimodule>,
}

impl Engines {
    fn new(p: &Problem) -> Result<Self> {
        let needs_bundle = p.tasks.iter().any(Task::needs_bundle);
        let needs_solution = p.tasks.iter().any(|t| !t.is_morita());
        let solution = if needs_solution {
            let bundle = if needs_bundle { p.bundle.as_ref() } else { None };
            Some(FedosovSolution::solve(
                &p.chart,
                bundle,
                p.kappa.clone(),
                p.omega.clone(),
                p.truncation,
            )?)
        } else {
            None
        };
        let morita = if p.tasks.iter().any(Task::is_morita) {
            Some(MoritaBimodule::new(&p.chart, p.omega.clone(), p.truncation)?)
        } else {
            None
        };
        Ok(Engines { solution, morita })
    }

    fn run(&self, task: &Task, n: u32) -> Result<Vec<OrderRecord>> {
        let sol = || self.solution.as_ref().expect("built for non-bimodule tasks");
        let mor = || self.morita.as_ref().expect("built for bimodule tasks");
        Ok(match task {
            Task::Star { f, g } => series_record(&sol().star(&classical(f), &classical(g))?, n),
            Task::StarPrime { a, b } => series_record(&sol().star_prime(&classical(a), &classical(b))?, n),
            Task::ModuleRight { s, f } => series_record(&sol().module_right(&classical(s), &classical(f))?, n),
            Task::ModuleLeft { a, s } => series_record(&sol().module_left(&classical(a), &classical(s))?, n),
            Task::DeformedMetric { s, t } => series_record(&sol().deformed_metric(&classical(s), &classical(t))?, n),
            Task::MoritaLeft { f, s } => series_record(&mor().left_action(&classical(f), &classical(s))?, n),
            Task::MoritaRight { s, g } => series_record(&mor().right_action(&classical(s), &classical(g))?, n),
        })
    }
}

/// Evaluates every task; records are emitted in task order.
pub fn cmd_star<W: Write>(problem: &Problem, opts: &RunOptions, out: &mut W) -> i32 {
    let p = match prepare(problem, opts).and_then(|p| Engines::new(&p).map(|e| (p, e))) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SETUP;
        }
    };
    let (p, engines) = p;
    let n = p.truncation.lambda_order();
    let kappa = format_rational(&p.kappa);
    let results: Vec<Result<Vec<OrderRecord>>> = p.tasks.par_iter().map(|t| engines.run(t, n)).collect();
    let mut failed = 0;
    for (index, (task, result)) in p.tasks.iter().zip(results).enumerate() {
        let op = p.spec.tasks[index].op();
        let written = match result {
            Ok(orders) => emit(
                out,
                &TaskRecord {
                    record: "task",
                    index,
                    op,
                    kappa: (!task.is_morita()).then(|| kappa.clone()),
                    orders,
                },
            ),
            Err(e) => {
                failed += 1;
                emit(
                    out,
                    &ErrorRecord {
                        record: "error",
                        index,
                        op,
                        message: e.to_string(),
                    },
                )
            }
        };
        if let Err(e) = written {
            return io_failure(e);
        }
    }
    let summary = SummaryRecord {
        record: "summary",
        command: "star",
        items: p.tasks.len(),
        failed,
    };
    if let Err(e) = emit(out, &summary) {
        return io_failure(e);
    }
    if failed > 0 {
        EXIT_SETUP
    } else {
        EXIT_OK
    }
}

/// Runs the selected verification suites.
pub fn cmd_verify<W: Write>(problem: &Problem, opts: &RunOptions, out: &mut W) -> i32 {
    let suites: Vec<String> = if opts.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        opts.suites.clone()
    };
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        eprintln!("error: unknown suite {bad:?}; known suites: {}", SUITES.join(", "));
        return EXIT_SETUP;
    }
    let p = match prepare(problem, opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SETUP;
        }
    };
    let mut config = SuiteConfig::new(p.chart.clone(), p.truncation);
    config.bundle = p.bundle.clone();
    config.kappa = p.kappa.clone();
    config.omega = p.omega.form().clone();
    config.seed = opts.seed;

    let (mut total, mut failed, mut setup_failed) = (0, 0, false);
    for suite in &suites {
        let reports = match run_suite(suite, &config) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_SETUP;
            }
        };
        for r in &reports {
            total += 1;
            if !r.passed() {
                failed += 1;
                setup_failed |= r.id.ends_with(".setup");
            }
            if let Err(e) = emit(out, &CheckRecord::new(suite, r)) {
                return io_failure(e);
            }
        }
    }
    let summary = SummaryRecord {
        record: "summary",
        command: "verify",
        items: total,
        failed,
    };
    if let Err(e) = emit(out, &summary) {
        return io_failure(e);
    }
    match (setup_failed, failed) {
        (true, _) => EXIT_SETUP,
        (false, 0) => EXIT_OK,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Lists the terms of `r`, and of `r′` and `r_E` when a bundle is given.
pub fn cmd_dump_r<W: Write>(problem: &Problem, opts: &RunOptions, out: &mut W) -> i32 {
    let solved = prepare(problem, opts).and_then(|p| {
        FedosovSolution::solve(
            &p.chart,
            p.bundle.as_ref(),
            p.kappa.clone(),
            p.omega.clone(),
            p.truncation,
        )
    });
    let sol = match solved {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SETUP;
        }
    };
    let mut records = form_records("r", sol.r());
    if let Some(rp) = sol.r_prime() {
        records.extend(form_records("r_prime", rp));
    }
    if let Some(re) = sol.r_e() {
        records.extend(form_records("r_e", re));
    }
    for r in &records {
        if let Err(e) = emit(out, r) {
            return io_failure(e);
        }
    }
    let summary = SummaryRecord {
        record: "summary",
        command: "dump-r",
        items: records.len(),
        failed: 0,
    };
    match emit(out, &summary) {
        Ok(()) => EXIT_OK,
        Err(e) => io_failure(e),
    }
}
