use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::report::Status;
use crate::scenario::registry::registry;
use crate::scenario::run::ScenarioReport;

/// Pretty JSON with every float written to 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    engine: &'static str,
    seed: u64,
    samples: usize,
    tolerance: f64,
    passed: bool,
    counts: Counts,
    matrix: Vec<JsonMatrixRow<'a>>,
    checks: Vec<JsonCheck<'a>>,
}

#[derive(Serialize)]
struct Counts {
    pass: usize,
    fail: usize,
    diagnostic: usize,
}

#[derive(Serialize)]
struct JsonMatrixRow<'a> {
    submanifold: &'a str,
    kind: Option<&'static str>,
    connection: &'static str,
    lambda: Option<f64>,
    soliton: Option<&'static str>,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    id: &'a str,
    target: Option<&'a str>,
    equation: &'a str,
    assertability: &'static str,
    status: &'static str,
    max_residual: Option<f64>,
    mean_residual: Option<f64>,
    tolerance: f64,
    samples: usize,
    coefficients: BTreeMap<&'a str, Option<f64>>,
    message: Option<&'a str>,
}

/// The machine-readable report. Deterministic: no timings, sorted coefficients.
pub fn report_json(report: &ScenarioReport) -> String {
    let doc = JsonReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: &report.scenario,
        engine: report.engine.name(),
        seed: report.seed,
        samples: report.samples,
        tolerance: report.tolerance,
        passed: report.passed(),
        counts: Counts {
            pass: report.count(Status::Pass),
            fail: report.count(Status::Fail),
            diagnostic: report.count(Status::Diagnostic),
        },
        matrix: report
            .matrix
            .iter()
            .map(|m| JsonMatrixRow {
                submanifold: &m.submanifold,
                kind: m.kind.map(|k| k.as_str()),
                connection: m.connection,
                lambda: m.lambda.and_then(finite),
                soliton: m.soliton.map(|s| s.as_str()),
            })
            .collect(),
        checks: report
            .rows
            .iter()
            .map(|r| JsonCheck {
                id: &r.entry.id,
                target: r.target.as_deref(),
                equation: &r.entry.equation,
                assertability: r.assertability.as_str(),
                status: r.entry.status.as_str(),
                max_residual: finite(r.entry.max_residual),
                mean_residual: finite(r.entry.mean_residual),
                tolerance: r.entry.tolerance,
                samples: r.entry.samples,
                coefficients: r.entry.coefficients.iter().map(|(k, v)| (k.as_str(), finite(*v))).collect(),
                message: r.entry.message.as_deref(),
            })
            .collect(),
    };
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    doc.serialize(&mut ser).expect("report serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        "-".to_string()
    }
}

/// Human-readable table: one row per check, the soliton matrix, then notes.
pub fn report_text(report: &ScenarioReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario {}  engine {}  seed {}  samples {}  tolerance {:e}",
        report.scenario,
        report.engine.name(),
        report.seed,
        report.samples,
        report.tolerance
    );
    let label = |r: &crate::scenario::run::ReportRow| match &r.target {
        Some(t) => format!("{}@{t}", r.entry.id),
        None => r.entry.id.clone(),
    };
    let width = report.rows.iter().map(|r| label(r).len()).max().unwrap_or(5).max(5);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<width$}  {:<10}  {:<12}  {:>10}  {:>10}", "check", "status", "assert", "max", "tol");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:<width$}  {:<10}  {:<12}  {:>10}  {:>10}",
            label(r),
            r.entry.status.as_str(),
            r.assertability.as_str(),
            sci(r.entry.max_residual),
            sci(r.entry.tolerance)
        );
    }
    if !report.matrix.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<20}  {:<15}  {:<18}  {:>10}  soliton", "submanifold", "kind", "connection", "lambda");
        for m in &report.matrix {
            let _ = writeln!(
                s,
                "{:<20}  {:<15}  {:<18}  {:>10}  {}",
                m.submanifold,
                m.kind.map_or("?", |k| k.as_str()),
                m.connection,
                m.lambda.map_or("-".to_string(), |l| format!("{l:.6}")),
                m.soliton.map_or("-", |c| c.as_str())
            );
        }
    }
    let notes: Vec<_> = report.rows.iter().filter(|r| r.entry.message.is_some() || !r.entry.coefficients.is_empty()).collect();
    if !notes.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "notes:");
        for r in notes {
            let mut line = format!("  {}:", label(r));
            for (k, v) in &r.entry.coefficients {
                let _ = write!(line, " {k}={}", sci(*v));
            }
            if let Some(m) = &r.entry.message {
                let _ = write!(line, " — {m}");
            }
            let _ = writeln!(s, "{line}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{}: {} pass, {} fail, {} diagnostic",
        if report.passed() { "PASS" } else { "FAIL" },
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Diagnostic)
    );
    s
}

/// The registry as a table for `list-checks`.
pub fn list_checks_text() -> String {
    let reg = registry();
    let width = reg.iter().map(|c| c.id.len()).max().unwrap_or(2);
    let aw = reg.iter().map(|c| c.assertability.to_string().len()).max().unwrap_or(10);
    let mut s = String::new();
    for c in reg {
        let scope = if c.group.needs_target() { "submanifold" } else { "ambient" };
        let _ = writeln!(s, "{:<width$}  {:<11}  {:<aw$}  {}", c.id, scope, c.assertability.to_string(), c.equation);
    }
    s
}
