//! The problem specification file: a JSON document describing a chart, a
//! truncation, an ordering parameter, the two-form `Ω`, an optional bundle
//! and a list of tasks. Parsing yields a [`ProblemSpec`] that serializes
//! back to an equivalent document; [`Problem::from_spec`] validates it and
//! builds the engine objects, reporting every problem with its field path.

use std::fmt;
use std::path::Path;

use fedosov_core::fedosov::{Omega, Truncation};
use fedosov_core::geometry::{Builtin, BundleChart, BundleKind, KaehlerChart};
use fedosov_core::jet::Monomial;
use fedosov_core::scalar::{format_rational, parse_rational};
use fedosov_core::weyl::{wedge_masks, Key, ScalarElement};
use fedosov_core::{Endo, GaussianRational, Jet, Order, Rational, Section};
use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{monomial_jet, parse_polynomial};

pub const SCHEMA_VERSION: u32 = 1;

/// An exact rational, read from an integer or a `"p/q"` string and always
/// written as a string.
#[derive(Clone, Debug, PartialEq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d).map_err(|_| D::Error::custom("expected an integer or a \"p/q\" string"))? {
            Raw::Int(n) => Ok(Exact(Rational::from_integer(n.into()))),
            Raw::Text(t) => parse_rational(&t).map(Exact).map_err(D::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: Exact,
    #[serde(default = "exact_zero")]
    pub im: Exact,
}

fn exact_zero() -> Exact {
    Exact(Rational::from_integer(0.into()))
}

/// A coefficient: a real rational or `{"re", "im"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Complex(ComplexSpec),
    Real(Exact),
}

impl Coefficient {
    pub fn value(&self) -> GaussianRational {
        match self {
            Coefficient::Complex(c) => GaussianRational::new(c.re.0.clone(), c.im.0.clone()),
            Coefficient::Real(r) => GaussianRational::real(r.0.clone()),
        }
    }
}

/// One term `coeff · z^z · zbar^zbar` of an explicit jet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(default)]
    pub z: Vec<u32>,
    #[serde(default)]
    pub zbar: Vec<u32>,
    pub coeff: Coefficient,
}

/// A function: a polynomial string, an explicit list of terms, or a
/// constant `{"re", "im"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JetValue {
    Polynomial(String),
    Terms(Vec<TermSpec>),
    Constant(ComplexSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PotentialSpec {
    /// A built-in potential with unit scale.
    Named(String),
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<Exact>,
    },
    Jet {
        jet: JetValue,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    pub potential: PotentialSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub lambda_order: u32,
    /// Jet order of the Kähler potential.
    pub jet_order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_degree_cap: Option<u32>,
}

/// `coeff · dx ∧ dy ∧ …` with form names such as `dz1` and `dzbar1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormComponent {
    pub forms: Vec<String>,
    pub coeff: JetValue,
}

/// The `λ^lambda_power` part of `Ω`: explicit components, `i∂∂̄` of a
/// potential, or both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub lambda_power: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<FormComponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<JetValue>,
}

pub type MatrixSpec = Vec<Vec<JetValue>>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKindSpec {
    Holomorphic,
    AntiHolomorphic,
    /// The canonical line bundle of the chart.
    Canonical,
}

/// Connection component along one direction `dz<k>` or `dzbar<k>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionComponent {
    pub form: String,
    pub matrix: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub kind: BundleKindSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibre_metric: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Vec<ConnectionComponent>>,
    /// When present, the bundle and all task data use the frame `e·φ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<MatrixSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Star { f: JetValue, g: JetValue },
    StarPrime { a: MatrixSpec, b: MatrixSpec },
    ModuleRight { s: Vec<JetValue>, f: JetValue },
    ModuleLeft { a: MatrixSpec, s: Vec<JetValue> },
    DeformedMetric { s: Vec<JetValue>, t: Vec<JetValue> },
    MoritaLeft { f: JetValue, s: JetValue },
    MoritaRight { s: JetValue, g: JetValue },
}

impl TaskSpec {
    pub fn op(&self) -> &'static str {
        match self {
            TaskSpec::Star { .. } => "star",
            TaskSpec::StarPrime { .. } => "star_prime",
            TaskSpec::ModuleRight { .. } => "module_right",
            TaskSpec::ModuleLeft { .. } => "module_left",
            TaskSpec::DeformedMetric { .. } => "deformed_metric",
            TaskSpec::MoritaLeft { .. } => "morita_left",
            TaskSpec::MoritaRight { .. } => "morita_right",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    pub chart: ChartSpec,
    pub truncation: TruncationSpec,
    pub kappa: Exact,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega: Vec<OmegaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

/// A problem located at a field path such as `bundle.fibre_metric[0][1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug)]
pub enum SpecError {
    Io(String),
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Io(m) => write!(f, "{m}"),
            SpecError::Invalid(ds) => {
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for SpecError {}

impl ProblemSpec {
    /// Parses the JSON text of a specification without validating it.
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let spec: ProblemSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            SpecError::Invalid(vec![Diagnostic {
                path: if path == "." { "(root)".into() } else { path },
                reason: e.into_inner().to_string(),
            }])
        })?;
        de.end().map_err(|e| {
            SpecError::Invalid(vec![Diagnostic {
                path: "(root)".into(),
                reason: e.to_string(),
            }])
        })?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self, SpecError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| SpecError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specifications always serialize")
    }
}

/// A task with its inputs turned into jets.
#[derive(Clone, Debug)]
pub enum Task {
    Star { f: Jet, g: Jet },
    StarPrime { a: Endo, b: Endo },
    ModuleRight { s: Section, f: Jet },
    ModuleLeft { a: Endo, s: Section },
    DeformedMetric { s: Section, t: Section },
    MoritaLeft { f: Jet, s: Section },
    MoritaRight { s: Section, g: Jet },
}

impl Task {
    pub fn needs_bundle(&self) -> bool {
        matches!(
            self,
            Task::StarPrime { .. } | Task::ModuleRight { .. } | Task::ModuleLeft { .. } | Task::DeformedMetric { .. }
        )
    }

    pub fn is_morita(&self) -> bool {
        matches!(self, Task::MoritaLeft { .. } | Task::MoritaRight { .. })
    }
}

/// A validated specification together with the engine objects it describes.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub chart: KaehlerChart,
    pub truncation: Truncation,
    pub kappa: Rational,
    pub omega: Omega,
    pub bundle: Option<BundleChart>,
    pub tasks: Vec<Task>,
}

struct Collector {
    dim: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Collector {
    fn fail(&mut self, path: impl Into<String>, reason: impl fmt::Display) {
        self.diagnostics.push(Diagnostic {
            path: path.into(),
            reason: reason.to_string(),
        });
    }

    fn jet(&mut self, path: &str, value: &JetValue) -> Option<Jet> {
        let dim = self.dim;
        match value {
            JetValue::Polynomial(text) => match parse_polynomial(text, dim) {
                Ok(j) => Some(j),
                Err(e) => {
                    self.fail(path, e);
                    None
                }
            },
            JetValue::Terms(terms) => {
                let mut acc = Jet::zero(dim, Order::Exact);
                let mut ok = true;
                for (i, t) in terms.iter().enumerate() {
                    match monomial_jet(dim, &t.z, &t.zbar) {
                        Ok(m) => acc = acc + m.scale(&t.coeff.value()),
                        Err(e) => {
                            self.fail(format!("{path}[{i}]"), e);
                            ok = false;
                        }
                    }
                }
                ok.then_some(acc)
            }
            JetValue::Constant(c) => Some(Jet::constant(
                dim,
                GaussianRational::new(c.re.0.clone(), c.im.0.clone()),
                Order::Exact,
            )),
        }
    }

    fn section(&mut self, path: &str, values: &[JetValue]) -> Option<Section> {
        if values.is_empty() {
            self.fail(path, "a section needs at least one component");
            return None;
        }
        let comps: Vec<Option<Jet>> = values
            .iter()
            .enumerate()
            .map(|(i, v)| self.jet(&format!("{path}[{i}]"), v))
            .collect();
        comps.into_iter().collect::<Option<Vec<_>>>().map(Section::column)
    }

    fn matrix(&mut self, path: &str, rows: &MatrixSpec) -> Option<Endo> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            self.fail(path, "expected a non-empty square matrix");
            return None;
        }
        let mut out = Vec::with_capacity(n);
        let mut ok = true;
        for (i, row) in rows.iter().enumerate() {
            let mut r = Vec::with_capacity(n);
            for (j, v) in row.iter().enumerate() {
                match self.jet(&format!("{path}[{i}][{j}]"), v) {
                    Some(x) => r.push(x),
                    None => ok = false,
                }
            }
            out.push(r);
        }
        if !ok {
            return None;
        }
        match Endo::from_rows(out) {
            Ok(m) => Some(m),
            Err(e) => {
                self.fail(path, e);
                None
            }
        }
    }

    /// Index of a generator name: `dz<k>` is `k − 1`, `dzbar<k>` is `n + k − 1`.
    fn generator(&mut self, path: &str, name: &str) -> Option<usize> {
        let dim = self.dim;
        let parsed = if let Some(k) = name.strip_prefix("dzbar") {
            k.parse::<usize>().ok().map(|k| (k, dim))
        } else if let Some(k) = name.strip_prefix("dz") {
            k.parse::<usize>().ok().map(|k| (k, 0))
        } else {
            None
        };
        match parsed {
            Some((k, offset)) if (1..=dim).contains(&k) => Some(offset + k - 1),
            _ => {
                self.fail(path, format!("unknown form generator {name:?} in dimension {dim}"));
                None
            }
        }
    }

    /// Sign and mask of the wedge product of the named generators.
    fn form(&mut self, path: &str, names: &[String]) -> Option<(bool, u8)> {
        let mut negative = false;
        let mut mask = 0u8;
        for (i, name) in names.iter().enumerate() {
            let v = self.generator(&format!("{path}[{i}]"), name)?;
            match wedge_masks(mask, 1u8 << v) {
                Some((neg, m)) => {
                    negative ^= neg;
                    mask = m;
                }
                None => {
                    self.fail(path, format!("generator {name} repeats"));
                    return None;
                }
            }
        }
        Some((negative, mask))
    }
}

fn builtin_chart(c: &mut Collector, name: &str, scale: Option<&Exact>, order: u32) -> Option<KaehlerChart> {
    let Some(which) = Builtin::from_name(name) else {
        c.fail(
            "chart.potential",
            format!("unknown built-in potential {name:?}; known: flat, fubini_study, hyperbolic_disc"),
        );
        return None;
    };
    let scale = scale.map(|s| s.0.clone()).unwrap_or_else(Rational::one);
    if !scale.is_positive() {
        c.fail("chart.potential.scale", "the scale must be positive");
        return None;
    }
    match KaehlerChart::builtin(which, c.dim, order, &scale) {
        Ok(chart) => Some(chart),
        Err(e) => {
            c.fail("chart.potential", e);
            None
        }
    }
}

impl Problem {
    /// Validates a specification: shapes, jet orders against the truncation,
    /// a nondegenerate Kähler metric, a closed `Ω` of the type the ordering
    /// admits, and a Hermitian fibre metric invertible at the basepoint.
    pub fn from_spec(spec: ProblemSpec) -> Result<Problem, SpecError> {
        let dim = spec.chart.dim;
        let mut c = Collector {
            dim,
            diagnostics: Vec::new(),
        };
        if spec.schema_version != SCHEMA_VERSION {
            c.fail(
                "schema_version",
                format!(
                    "unsupported schema version {}; expected {SCHEMA_VERSION}",
                    spec.schema_version
                ),
            );
        }
        if !(1..=4).contains(&dim) {
            c.fail("chart.dim", "the dimension must be between 1 and 4");
            return Err(SpecError::Invalid(c.diagnostics));
        }

        let t = &spec.truncation;
        let truncation = match t.total_degree_cap {
            None => Some(Truncation::new(t.lambda_order)),
            Some(cap) => match Truncation::with_degree_cap(t.lambda_order, cap) {
                Ok(tr) => Some(tr),
                Err(e) => {
                    c.fail("truncation.total_degree_cap", e);
                    None
                }
            },
        };
        if let Some(tr) = truncation {
            let required = tr.required_jet_order();
            if t.jet_order < required {
                c.fail(
                    "truncation.jet_order",
                    fedosov_core::Error::JetOrderTooLow {
                        given: t.jet_order,
                        required,
                    },
                );
            }
        }
        let order = Order::Finite(t.jet_order);

        let chart = match &spec.chart.potential {
            PotentialSpec::Named(name) => builtin_chart(&mut c, name, None, t.jet_order),
            PotentialSpec::Builtin { builtin, scale } => builtin_chart(&mut c, builtin, scale.as_ref(), t.jet_order),
            PotentialSpec::Jet { jet } => c.jet("chart.potential.jet", jet).and_then(|j| {
                match KaehlerChart::from_potential(j.with_order(order)) {
                    Ok(chart) => Some(chart),
                    Err(e) => {
                        c.fail("chart.potential.jet", e);
                        None
                    }
                }
            }),
        };

        let kappa = spec.kappa.0.clone();
        let omega = build_omega(&mut c, &spec.omega, &kappa);
        let bundle = match (&spec.bundle, &chart) {
            (Some(b), Some(chart)) => build_bundle(&mut c, b, chart, order),
            _ => None,
        };

        let tasks: Vec<Option<Task>> = spec
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| build_task(&mut c, &format!("tasks[{i}]"), t, &spec))
            .collect();

        if !c.diagnostics.is_empty() {
            return Err(SpecError::Invalid(c.diagnostics));
        }
        Ok(Problem {
            chart: chart.expect("no diagnostics"),
            truncation: truncation.expect("no diagnostics"),
            kappa,
            omega: omega.expect("no diagnostics"),
            bundle,
            tasks: tasks.into_iter().map(|t| t.expect("no diagnostics")).collect(),
            spec,
        })
    }

    pub fn load(path: &Path) -> Result<Problem, SpecError> {
        Self::from_spec(ProblemSpec::read(path)?)
    }
}

fn build_omega(c: &mut Collector, parts: &[OmegaSpec], kappa: &Rational) -> Option<Omega> {
    let dim = c.dim;
    let mut form = ScalarElement::zero(dim);
    let mut ok = true;
    for (i, part) in parts.iter().enumerate() {
        let path = format!("omega[{i}]");
        if part.lambda_power == 0 {
            c.fail(format!("{path}.lambda_power"), "omega must start at lambda^1");
            ok = false;
            continue;
        }
        if part.components.is_empty() && part.potential.is_none() {
            c.fail(&path, "give components, a potential, or both");
            ok = false;
        }
        for (j, comp) in part.components.iter().enumerate() {
            let cpath = format!("{path}.components[{j}]");
            let shape = c.form(&format!("{cpath}.forms"), &comp.forms);
            let coeff = c.jet(&format!("{cpath}.coeff"), &comp.coeff);
            match (shape, coeff) {
                (Some((negative, mask)), Some(jet)) => {
                    if comp.forms.len() != 2 {
                        c.fail(format!("{cpath}.forms"), "omega components are 2-forms");
                        ok = false;
                        continue;
                    }
                    let jet = if negative { -jet } else { jet };
                    form.add_term(Key::new(part.lambda_power, Monomial::ONE, mask), jet);
                }
                _ => ok = false,
            }
        }
        if let Some(p) = &part.potential {
            let ppath = format!("{path}.potential");
            match c
                .jet(&ppath, p)
                .map(|phi| Omega::from_potential(&phi, part.lambda_power))
            {
                Some(Ok(o)) => form.add_assign(o.form()),
                Some(Err(e)) => {
                    c.fail(&ppath, e);
                    ok = false;
                }
                None => ok = false,
            }
        }
    }
    if !ok {
        return None;
    }
    let omega = match Omega::new(form) {
        Ok(o) => o,
        Err(e) => {
            c.fail("omega", e);
            return None;
        }
    };
    if let Err(e) = omega.check_for(kappa) {
        c.fail("omega", e);
        return None;
    }
    Some(omega)
}

fn build_bundle(c: &mut Collector, b: &BundleSpec, chart: &KaehlerChart, order: Order) -> Option<BundleChart> {
    let dim = c.dim;
    let kind = match b.kind {
        BundleKindSpec::Canonical => {
            if b.rank.is_some_and(|r| r != 1) {
                c.fail("bundle.rank", "the canonical bundle has rank 1");
            }
            if b.fibre_metric.is_some() || b.connection.is_some() {
                c.fail("bundle", "the canonical bundle takes no fibre metric or connection");
            }
            let bundle = match BundleChart::canonical(chart) {
                Ok(x) => x,
                Err(e) => {
                    c.fail("bundle", e);
                    return None;
                }
            };
            return apply_transition(c, b, bundle, order);
        }
        BundleKindSpec::Holomorphic => BundleKind::Holomorphic,
        BundleKindSpec::AntiHolomorphic => BundleKind::AntiHolomorphic,
    };
    let metric = b
        .fibre_metric
        .as_ref()
        .and_then(|m| c.matrix("bundle.fibre_metric", m))
        .map(|m| m.truncated(order));
    let rank = match (b.rank, &metric) {
        (Some(r), Some(m)) if r != m.rows() => {
            c.fail(
                "bundle.rank",
                format!("rank {r} does not match the {0}x{0} fibre metric", m.rows()),
            );
            return None;
        }
        (Some(r), _) => r,
        (None, Some(m)) => m.rows(),
        (None, None) => {
            c.fail("bundle.rank", "give the rank or a fibre metric");
            return None;
        }
    };
    if rank == 0 {
        c.fail("bundle.rank", "the rank must be positive");
        return None;
    }
    let built = match &b.connection {
        Some(components) => {
            let mut connection = vec![Endo::zeros(dim, rank, rank, Order::Exact); 2 * dim];
            for (i, comp) in components.iter().enumerate() {
                let path = format!("bundle.connection[{i}]");
                let v = c.generator(&format!("{path}.form"), &comp.form)?;
                let m = c.matrix(&format!("{path}.matrix"), &comp.matrix)?;
                if m.rows() != rank {
                    c.fail(format!("{path}.matrix"), format!("expected a {rank}x{rank} matrix"));
                    return None;
                }
                connection[v] = m.truncated(order);
            }
            BundleChart::from_connection(dim, kind, connection, metric)
        }
        None => match metric {
            Some(h) => BundleChart::from_metric(h, kind),
            None => Ok(BundleChart::trivial(dim, rank, kind)),
        },
    };
    match built {
        Ok(bundle) => apply_transition(c, b, bundle, order),
        Err(e) => {
            c.fail("bundle", e);
            None
        }
    }
}

fn apply_transition(c: &mut Collector, b: &BundleSpec, bundle: BundleChart, order: Order) -> Option<BundleChart> {
    let Some(spec) = &b.transition else {
        return Some(bundle);
    };
    let phi = c.matrix("bundle.transition", spec)?.truncated(order);
    match bundle.with_transition(phi).and_then(|x| x.reframed()) {
        Ok(x) => Some(x),
        Err(e) => {
            c.fail("bundle.transition", e);
            None
        }
    }
}

fn build_task(c: &mut Collector, path: &str, t: &TaskSpec, spec: &ProblemSpec) -> Option<Task> {
    let rank = spec.bundle.as_ref().map(|b| match b.kind {
        BundleKindSpec::Canonical => 1,
        _ => b.rank.or(b.fibre_metric.as_ref().map(|m| m.len())).unwrap_or(0),
    });
    let needs_rank = |c: &mut Collector, n: usize, what: &str| -> bool {
        match rank {
            None => {
                c.fail(path, format!("{} needs a bundle", t.op()));
                false
            }
            Some(r) if r != n => {
                c.fail(format!("{path}.{what}"), format!("expected size {r}, got {n}"));
                false
            }
            Some(_) => true,
        }
    };
    let p = |field: &str| format!("{path}.{field}");
    Some(match t {
        TaskSpec::Star { f, g } => Task::Star {
            f: c.jet(&p("f"), f)?,
            g: c.jet(&p("g"), g)?,
        },
        TaskSpec::StarPrime { a, b } => {
            let (a, b) = (c.matrix(&p("a"), a)?, c.matrix(&p("b"), b)?);
            if !needs_rank(c, a.rows(), "a") || !needs_rank(c, b.rows(), "b") {
                return None;
            }
            Task::StarPrime { a, b }
        }
        TaskSpec::ModuleRight { s, f } => {
            let (s, f) = (c.section(&p("s"), s)?, c.jet(&p("f"), f)?);
            if !needs_rank(c, s.rows(), "s") {
                return None;
            }
            Task::ModuleRight { s, f }
        }
        TaskSpec::ModuleLeft { a, s } => {
            let (a, s) = (c.matrix(&p("a"), a)?, c.section(&p("s"), s)?);
            if !needs_rank(c, a.rows(), "a") || !needs_rank(c, s.rows(), "s") {
                return None;
            }
            Task::ModuleLeft { a, s }
        }
        TaskSpec::DeformedMetric { s, t } => {
            let (s, t) = (c.section(&p("s"), s)?, c.section(&p("t"), t)?);
            if !needs_rank(c, s.rows(), "s") || !needs_rank(c, t.rows(), "t") {
                return None;
            }
            Task::DeformedMetric { s, t }
        }
        TaskSpec::MoritaLeft { f, s } => Task::MoritaLeft {
            f: c.jet(&p("f"), f)?,
            s: Section::column(vec![c.jet(&p("s"), s)?]),
        },
        TaskSpec::MoritaRight { s, g } => Task::MoritaRight {
            s: Section::column(vec![c.jet(&p("s"), s)?]),
            g: c.jet(&p("g"), g)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "chart": {"dim": 1, "potential": "flat"},
        "truncation": {"lambda_order": 2, "jet_order": 6},
        "kappa": 1,
        "tasks": [{"op": "star", "f": "z", "g": "zbar"}]
    }"#;

    fn diagnostics(text: &str) -> Vec<Diagnostic> {
        match ProblemSpec::parse(text).and_then(Problem::from_spec) {
            Err(SpecError::Invalid(d)) => d,
            other => panic!("expected diagnostics, got {other:?}"),
        }
    }

    #[test]
    fn minimal_flat_spec_is_valid() {
        let p = Problem::from_spec(ProblemSpec::parse(MINIMAL).unwrap()).unwrap();
        assert_eq!(p.tasks.len(), 1);
        assert_eq!(p.truncation.required_jet_order(), 6);
    }

    #[test]
    fn serialization_round_trips() {
        let text = r#"{
            "schema_version": 1,
            "chart": {"dim": 2, "potential": {"builtin": "fubini_study", "scale": "1/2"}},
            "truncation": {"lambda_order": 1, "jet_order": 9, "total_degree_cap": 4},
            "kappa": "-1/3",
            "omega": [{"lambda_power": 1,
                       "components": [{"forms": ["dzbar1", "dz1"], "coeff": {"re": "0", "im": "-1"}}],
                       "potential": "z1*zbar2 + z2*zbar1"}],
            "bundle": {"kind": "holomorphic", "rank": 1,
                       "fibre_metric": [[[{"z": [1], "zbar": [1], "coeff": 1}, {"coeff": {"re": 1}}]]]},
            "tasks": [{"op": "module_left", "a": [["z1"]], "s": ["1"]},
                      {"op": "morita_right", "s": "1", "g": "zbar2"}]
        }"#;
        let spec = ProblemSpec::parse(text).unwrap();
        let again = ProblemSpec::parse(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(again.to_json(), spec.to_json());
    }

    #[test]
    fn non_type_one_one_omega_is_rejected() {
        let text = MINIMAL.replace(
            r#""kappa": 1,"#,
            r#""kappa": 1, "omega": [{"lambda_power": 1, "components": [{"forms": ["dz1", "dz1"], "coeff": "1"}]}],"#,
        );
        let d = diagnostics(&text);
        assert!(d[0].reason.contains("repeats"), "{d:?}");

        // a (2,0) form needs two holomorphic directions
        let text = MINIMAL
            .replace(r#""dim": 1"#, r#""dim": 2"#)
            .replace(r#""jet_order": 6"#, r#""jet_order": 6"#)
            .replace(
                r#""kappa": 1,"#,
                r#""kappa": 1, "omega": [{"lambda_power": 1, "components": [{"forms": ["dz1", "dz2"], "coeff": "1"}]}],"#,
            );
        let d = diagnostics(&text);
        assert_eq!(d[0].path, "omega");
        assert!(d[0].reason.contains("not of type (1,1)"), "{d:?}");
        // κ = 0 admits it
        let ok = text.replace(r#""kappa": 1"#, r#""kappa": 0"#);
        assert!(Problem::from_spec(ProblemSpec::parse(&ok).unwrap()).is_ok());
    }

    #[test]
    fn low_jet_order_reports_the_minimum() {
        let text = MINIMAL
            .replace(r#""flat""#, r#""fubini_study""#)
            .replace(r#""jet_order": 6"#, r#""jet_order": 4"#);
        let d = diagnostics(&text);
        assert_eq!(d[0].path, "truncation.jet_order");
        assert!(d[0].reason.contains("required minimum 6"), "{d:?}");
    }

    #[test]
    fn schema_errors_carry_field_paths() {
        let d = diagnostics(&MINIMAL.replace(r#""kappa": 1"#, r#""kappa": "1/0""#));
        assert_eq!(d[0].path, "kappa");
        let d = diagnostics(&MINIMAL.replace(r#""lambda_order": 2"#, r#""lambda_order": "two""#));
        assert_eq!(d[0].path, "truncation.lambda_order");
        let d = diagnostics(&MINIMAL.replace(r#""g": "zbar""#, r#""g": "zbar7""#));
        assert_eq!(d[0].path, "tasks[0].g");
        let d = diagnostics(&MINIMAL.replace(r#""f": "z", "g": "zbar""#, r#""s": ["z"], "f": "1", "op2": 1"#));
        assert_eq!(d[0].path, "tasks[0]");
    }

    #[test]
    fn bundle_preconditions_are_checked() {
        let with_bundle = |b: &str| MINIMAL.replace(r#""kappa": 1,"#, &format!(r#""kappa": 1, "bundle": {b},"#));
        let d = diagnostics(&with_bundle(
            r#"{"kind": "holomorphic", "fibre_metric": [["1", "z"], ["z", "1"]]}"#,
        ));
        assert_eq!(d[0].path, "bundle");
        assert!(d[0].reason.contains("Hermitian"), "{d:?}");
        let d = diagnostics(&with_bundle(r#"{"kind": "holomorphic", "fibre_metric": [["z*zbar"]]}"#));
        assert_eq!(d[0].path, "bundle");
        let d = diagnostics(&with_bundle(
            r#"{"kind": "holomorphic", "rank": 1, "transition": [["z"]]}"#,
        ));
        assert_eq!(d[0].path, "bundle.transition");
        let ok = with_bundle(
            r#"{"kind": "anti_holomorphic", "fibre_metric": [["1 + z*zbar"]], "transition": [["2 + zbar"]]}"#,
        );
        let p = Problem::from_spec(ProblemSpec::parse(&ok).unwrap()).unwrap();
        assert_eq!(p.bundle.unwrap().rank(), 1);
    }

    #[test]
    fn bundle_tasks_need_a_bundle() {
        let text = MINIMAL.replace(
            r#"{"op": "star", "f": "z", "g": "zbar"}"#,
            r#"{"op": "module_right", "s": ["z"], "f": "1"}"#,
        );
        let d = diagnostics(&text);
        assert_eq!(d[0].path, "tasks[0]");
    }
}
