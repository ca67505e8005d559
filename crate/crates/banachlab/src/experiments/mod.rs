//! Parameterized reconstructions of four counterexample operators, emitted
//! as reports with certified quantities, self-verifying checks, and growth
//! tables. Reports are deterministic given (seed, grid, params) and render
//! byte-identically through [`crate::report`].

mod thm10;
mod thm11;
mod thm12;
mod thm8;

pub use thm10::{run_thm10, LambdaMode, Thm10Config};
pub use thm11::{run_thm11, Thm11Config};
pub use thm12::{run_thm12, ShiftMode, Thm12Config};
pub use thm8::run_thm8;

use crate::report::{from_serde, table_csv, svg_growth_plot, JsonValue};

#[derive(Clone, Debug)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

/// A labeled scalar, optionally pointing at a serialized certificate.
#[derive(Clone, Debug)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
    pub certificate: Option<String>,
}

/// A named pass/fail check with detail text.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Monotonicity flags are computed from the table, never asserted.
#[derive(Clone, Debug)]
pub struct MonotoneFlag {
    pub column: String,
    pub strictly_increasing: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub monotone: Vec<MonotoneFlag>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Table {
        let monotone = columns
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let strictly = rows.windows(2).all(|w| w[1][j] > w[0][j]) && rows.len() > 1;
                MonotoneFlag {
                    column: name.clone(),
                    strictly_increasing: strictly,
                }
            })
            .collect();
        Table {
            columns,
            rows,
            monotone,
        }
    }

    pub fn column_flag(&self, name: &str) -> Option<bool> {
        self.monotone
            .iter()
            .find(|f| f.column == name)
            .map(|f| f.strictly_increasing)
    }
}

#[derive(Clone, Debug)]
pub struct Provenance {
    pub seed: u64,
    pub grid: usize,
    pub budget: usize,
    pub tolerances: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

/// The report produced by each experiment runner.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub params: Vec<(String, ParamValue)>,
    pub quantities: Vec<Quantity>,
    pub table: Table,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
    pub certificates: Vec<(String, serde_json::Value)>,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: u64, grid: usize, budget: usize) -> Self {
        ExperimentReport {
            name: name.to_string(),
            params: Vec::new(),
            quantities: Vec::new(),
            table: Table::default(),
            checks: Vec::new(),
            provenance: Provenance {
                seed,
                grid,
                budget,
                tolerances: Vec::new(),
                notes: Vec::new(),
            },
            certificates: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: ParamValue) {
        self.params.push((key.to_string(), value));
    }

    pub fn quantity(&mut self, label: &str, value: f64) {
        self.quantities.push(Quantity {
            label: label.to_string(),
            value,
            certificate: None,
        });
    }

    pub fn quantity_with_certificate(
        &mut self,
        label: &str,
        value: f64,
        cert_id: &str,
        cert: serde_json::Value,
    ) {
        self.quantities.push(Quantity {
            label: label.to_string(),
            value,
            certificate: Some(cert_id.to_string()),
        });
        if !self.certificates.iter().any(|(id, _)| id == cert_id) {
            self.certificates.push((cert_id.to_string(), cert));
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.provenance.tolerances.push((name.to_string(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.provenance.notes.push(text.into());
    }

    pub fn get_quantity(&self, label: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|q| q.label == label)
            .map(|q| q.value)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> JsonValue {
        let mut root = JsonValue::object();
        root.push("name", JsonValue::Str(self.name.clone()));

        let mut params = JsonValue::object();
        for (k, v) in &self.params {
            let jv = match v {
                ParamValue::Int(i) => JsonValue::Int(*i),
                ParamValue::Float(x) => JsonValue::Float(*x),
                ParamValue::Text(s) => JsonValue::Str(s.clone()),
            };
            params.push(k, jv);
        }
        root.push("params", params);

        let mut quantities = Vec::new();
        for q in &self.quantities {
            let mut o = JsonValue::object();
            o.push("label", JsonValue::Str(q.label.clone()));
            o.push("value", JsonValue::Float(q.value));
            o.push(
                "certificate",
                match &q.certificate {
                    Some(id) => JsonValue::Str(id.clone()),
                    None => JsonValue::Null,
                },
            );
            quantities.push(o);
        }
        root.push("quantities", JsonValue::Array(quantities));

        let mut table = JsonValue::object();
        table.push(
            "columns",
            JsonValue::Array(
                self.table
                    .columns
                    .iter()
                    .map(|c| JsonValue::Str(c.clone()))
                    .collect(),
            ),
        );
        table.push(
            "rows",
            JsonValue::Array(
                self.table
                    .rows
                    .iter()
                    .map(|r| JsonValue::Array(r.iter().map(|&x| JsonValue::Float(x)).collect()))
                    .collect(),
            ),
        );
        table.push(
            "monotone",
            JsonValue::Array(
                self.table
                    .monotone
                    .iter()
                    .map(|f| {
                        let mut o = JsonValue::object();
                        o.push("column", JsonValue::Str(f.column.clone()));
                        o.push("strictly_increasing", JsonValue::Bool(f.strictly_increasing));
                        o
                    })
                    .collect(),
            ),
        );
        root.push("table", table);

        let mut checks = Vec::new();
        for c in &self.checks {
            let mut o = JsonValue::object();
            o.push("name", JsonValue::Str(c.name.clone()));
            o.push("passed", JsonValue::Bool(c.passed));
            o.push("detail", JsonValue::Str(c.detail.clone()));
            checks.push(o);
        }
        root.push("checks", JsonValue::Array(checks));

        let mut prov = JsonValue::object();
        prov.push("seed", JsonValue::UInt(self.provenance.seed));
        prov.push("grid", JsonValue::UInt(self.provenance.grid as u64));
        prov.push("budget", JsonValue::UInt(self.provenance.budget as u64));
        let mut tols = JsonValue::object();
        for (k, v) in &self.provenance.tolerances {
            tols.push(k, JsonValue::Float(*v));
        }
        prov.push("tolerances", tols);
        prov.push(
            "notes",
            JsonValue::Array(
                self.provenance
                    .notes
                    .iter()
                    .map(|n| JsonValue::Str(n.clone()))
                    .collect(),
            ),
        );
        root.push("provenance", prov);

        let mut certs = JsonValue::object();
        for (id, v) in &self.certificates {
            certs.push(id, from_serde(v));
        }
        root.push("certificates", certs);
        root
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().render()
    }

    pub fn table_csv(&self) -> String {
        table_csv(&self.table.columns, &self.table.rows)
    }

    /// Growth plot of all non-leading table columns against the first.
    pub fn growth_svg(&self) -> Option<String> {
        if self.table.columns.len() < 2 || self.table.rows.is_empty() {
            return None;
        }
        let series: Vec<(String, Vec<(f64, f64)>)> = (1..self.table.columns.len())
            .map(|j| {
                (
                    self.table.columns[j].clone(),
                    self.table.rows.iter().map(|r| (r[0], r[j])).collect(),
                )
            })
            .collect();
        Some(svg_growth_plot(
            &self.name,
            &self.table.columns[0],
            &series,
        ))
    }
}
