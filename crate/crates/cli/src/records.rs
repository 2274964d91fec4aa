//! Output records, written one JSON object per line. Field order is fixed
//! by the struct definitions and no record carries timing data, so output
//! is byte-stable for a fixed specification and seed.

use std::io::Write;

use fedosov_core::fedosov::LambdaSeries;
use fedosov_core::scalar::format_rational;
use fedosov_core::verify::CheckReport;
use fedosov_core::weyl::{form_name, Coeff, Key, WeylElement};
use fedosov_core::{Endo, GaussianRational, Jet, Section};
use serde::Serialize;

use crate::poly::exponents;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexRecord {
    pub re: String,
    pub im: String,
}

impl From<&GaussianRational> for ComplexRecord {
    fn from(c: &GaussianRational) -> Self {
        ComplexRecord {
            re: format_rational(&c.re),
            im: format_rational(&c.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermRecord {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub coeff: ComplexRecord,
}

/// A jet: its terms by increasing degree, a readable form that parses back
/// to the same polynomial, and the order through which it is trusted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetRecord {
    pub text: String,
    pub jet_order: String,
    pub terms: Vec<TermRecord>,
}

impl From<&Jet> for JetRecord {
    fn from(j: &Jet) -> Self {
        let dim = j.dim();
        let mut terms: Vec<(u32, Vec<u32>, Vec<u32>, ComplexRecord)> = j
            .terms()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(m, c)| {
                let (z, zbar) = exponents(*m, dim);
                (m.degree(), z, zbar, c.into())
            })
            .collect();
        terms.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
        JetRecord {
            text: j.pretty(),
            jet_order: j.order().to_string(),
            terms: terms
                .into_iter()
                .map(|(_, z, zbar, coeff)| TermRecord { z, zbar, coeff })
                .collect(),
        }
    }
}

/// A function, a section (one jet per component) or an endomorphism (rows
/// of jets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Function(JetRecord),
    Section(Vec<JetRecord>),
    Endo(Vec<Vec<JetRecord>>),
}

pub trait ToRecord {
    fn to_record(&self) -> ValueRecord;
}

impl ToRecord for Jet {
    fn to_record(&self) -> ValueRecord {
        ValueRecord::Function(self.into())
    }
}

impl ToRecord for Section {
    fn to_record(&self) -> ValueRecord {
        ValueRecord::Section((0..self.rows()).map(|i| self.component(i).into()).collect())
    }
}

impl ToRecord for Endo {
    fn to_record(&self) -> ValueRecord {
        ValueRecord::Endo(
            (0..self.rows())
                .map(|i| (0..self.cols()).map(|j| self.get(i, j).into()).collect())
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRecord {
    pub lambda: usize,
    pub value: ValueRecord,
}

/// `λ^0 … λ^N` coefficients of a deformed quantity, zeros included.
pub fn series_record<V: Coeff + ToRecord>(s: &LambdaSeries<V>, lambda_order: u32) -> Vec<OrderRecord> {
    (0..=lambda_order as usize)
        .map(|m| OrderRecord {
            lambda: m,
            value: s.coeff(m).to_record(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskRecord {
    pub record: &'static str,
    pub index: usize,
    pub op: &'static str,
    /// Absent for the bimodule tasks, which combine both orderings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    pub orders: Vec<OrderRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorRecord {
    pub record: &'static str,
    pub index: usize,
    pub op: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub record: &'static str,
    pub suite: String,
    pub id: String,
    pub anchor: String,
    pub status: &'static str,
    pub witness: Option<String>,
    pub lambda_order: u32,
    pub degree_cap: u32,
}

impl CheckRecord {
    pub fn new(suite: &str, r: &CheckReport) -> Self {
        CheckRecord {
            record: "check",
            suite: suite.to_string(),
            id: r.id.clone(),
            anchor: r.anchor.clone(),
            status: r.status.name(),
            witness: r.witness.clone(),
            lambda_order: r.lambda_order,
            degree_cap: r.degree_cap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyRecord {
    pub lambda: u32,
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub forms: Vec<String>,
}

impl KeyRecord {
    pub fn new(k: Key, dim: usize) -> Self {
        let (z, zbar) = exponents(k.sym, dim);
        let forms = form_name(k.asym, dim);
        KeyRecord {
            lambda: k.lam as u32,
            z,
            zbar,
            forms: if forms.is_empty() {
                Vec::new()
            } else {
                forms.split('^').map(str::to_string).collect()
            },
        }
    }
}

/// One basis term of a dumped connection form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormTermRecord {
    pub record: &'static str,
    pub name: &'static str,
    pub total_degree: u32,
    pub label: String,
    pub key: KeyRecord,
    pub value: ValueRecord,
}

/// Terms of an element sorted by total degree, then key.
pub fn form_records<V: Coeff + ToRecord>(name: &'static str, a: &WeylElement<V>) -> Vec<FormTermRecord> {
    let dim = a.dim();
    let mut terms: Vec<(&Key, &V)> = a.terms().filter(|(_, v)| !v.is_zero()).collect();
    terms.sort_by_key(|(k, _)| (k.total_degree(), **k));
    terms
        .into_iter()
        .map(|(k, v)| FormTermRecord {
            record: "form",
            name,
            total_degree: k.total_degree(),
            label: k.label(dim),
            key: KeyRecord::new(*k, dim),
            value: v.to_record(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRecord {
    pub record: &'static str,
    pub command: &'static str,
    pub items: usize,
    pub failed: usize,
}

/// Writes one record per line.
pub fn emit<W: Write, T: Serialize>(out: &mut W, record: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}
