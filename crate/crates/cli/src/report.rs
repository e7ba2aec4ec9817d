use std::fmt::Write as _;

use serde::Serialize;

use crate::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "==")]
    Equals,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Equals => "==",
        }
    }
}

/// One pass/fail line. `tol` is the bound `value` is compared against.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// `value <= tol`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::AtMost, tol, pass: value <= tol }
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::Equals, tol: expected, pass: value == expected }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>) -> Self {
        Self { name: name.into(), value: f64::NAN, relation: Relation::AtMost, tol: 0.0, pass: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Self { name: name.to_owned(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self { command: command.to_owned(), seed, summary: Vec::new(), tables: Vec::new(), checks: Vec::new(), pass: true }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_owned(), value.into()));
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.csv(),
            OutputFormat::Text => self.text(),
        }
    }

    fn json(&self) -> serde_json::Value {
        let summary: serde_json::Map<String, serde_json::Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("cell serializes")))
            .collect();
        serde_json::json!({
            "command": self.command,
            "seed": self.seed,
            "pass": self.pass,
            "summary": summary,
            "checks": self.checks,
            "tables": self.tables,
        })
    }

    /// Tables one after another, each with its own header row and separated
    /// by a blank line, then the checks as a final table.
    fn csv(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&t.columns.join(","));
            out.push('\n');
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out.push('\n');
        }
        out.push_str("check,value,relation,tol,status\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_text(&c.name),
                sci(c.value),
                c.relation.symbol(),
                sci(c.tol),
                status(c.pass)
            );
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "laxforge {} (seed {})", self.command, self.seed);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "  {k}: {}", text_cell(v));
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(text_cell).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| cells.iter().map(|r| r[j].len()).chain([t.columns[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |row: &[String]| {
                row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\n[checks]");
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "{} {}  {} {} {}",
                    status(c.pass),
                    c.name,
                    short(c.value),
                    c.relation.symbol(),
                    short(c.tol)
                );
            }
        }
        let _ = writeln!(out, "\nresult: {}", status(self.pass));
        out
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// C-style `%.15e`: `1.000000000000000e+00`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.15e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn short(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e6 {
        format!("{x}")
    } else {
        format!("{x:.3e}")
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => sci(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => csv_text(s),
    }
}

fn text_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format!("{x:.6e}"),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
    }
}
