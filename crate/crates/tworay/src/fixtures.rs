//! Reference tables as JSON fixtures, and the comparison of computed links
//! against them.
//!
//! A fixture row holds the cells as printed. Known misprints are listed in
//! `corrections` as JSON-pointer patches; each patch must find the printed
//! value it claims to replace, so a fixture cannot drift from its notes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tworay_core::{EndModel, Link, RestrictedStep, StepKind};

use crate::error::CliError;
use crate::report::{Family, LinkReport, Params};

pub const ENV_DIR: &str = "TWORAY_FIXTURES";

const EMBEDDED: [(&str, &str); 3] = [
    ("table1", include_str!("../../../fixtures/table1.json")),
    ("table3", include_str!("../../../fixtures/table3.json")),
    ("table4", include_str!("../../../fixtures/table4.json")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Psi {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suffix: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub no: u32,
    pub params: Vec<i64>,
    pub psi: Vec<Psi>,
    pub phi: String,
    /// Only the keys present are compared.
    pub model: serde_json::Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub row: u32,
    pub pointer: String,
    pub printed: Value,
    pub corrected: Value,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub table: String,
    pub family: Family,
    pub caption: String,
    pub rows: Vec<Row>,
    #[serde(default)]
    pub corrections: Vec<Correction>,
    /// Rows whose step tuples are compared; elsewhere they are informational.
    #[serde(default)]
    pub delta_decodable: Vec<u32>,
}

fn fixture_err(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Fixture { path: path.into(), msg: msg.into() }
}

fn parse(path: &str, text: &str) -> Result<Table, CliError> {
    serde_json::from_str(text).map_err(|e| fixture_err(path, e.to_string()))
}

/// Loads one table, from `$TWORAY_FIXTURES/<name>.json` when the variable is
/// set and from the copy compiled into the binary otherwise.
pub fn load(name: &str) -> Result<Table, CliError> {
    match std::env::var_os(ENV_DIR) {
        Some(dir) => load_from(&PathBuf::from(dir), name),
        None => {
            let (_, text) = EMBEDDED.iter().find(|(n, _)| *n == name).ok_or_else(|| fixture_err(name, "no such table"))?;
            parse(&format!("<embedded>/{}.json", name), text)
        }
    }
}

pub fn load_from(dir: &Path, name: &str) -> Result<Table, CliError> {
    let path = dir.join(format!("{}.json", name));
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(&path).map_err(|e| fixture_err(&shown, e.to_string()))?;
    parse(&shown, &text)
}

pub fn tables_for(family: Family) -> &'static [&'static str] {
    match family {
        Family::Dp2 => &["table1"],
        Family::Dp3 => &["table3", "table4"],
    }
}

/// The rows of a family's tables with corrections applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub family: Family,
    pub rows: Vec<Row>,
    pub corrections: Vec<Correction>,
    pub delta_decodable: BTreeSet<u32>,
}

impl Reference {
    pub fn load(family: Family) -> Result<Reference, CliError> {
        let tables = tables_for(family).iter().map(|n| load(n)).collect::<Result<Vec<_>, _>>()?;
        Reference::from_tables(family, tables)
    }

    pub fn from_tables(family: Family, tables: Vec<Table>) -> Result<Reference, CliError> {
        let mut r = Reference { family, rows: Vec::new(), corrections: Vec::new(), delta_decodable: BTreeSet::new() };
        for t in tables {
            if t.family != family {
                return Err(fixture_err(&t.table, format!("family {} where {} was expected", t.family, family)));
            }
            let mut rows = t.rows;
            for c in &t.corrections {
                let row = rows.iter_mut().find(|r| r.no == c.row).ok_or_else(|| fixture_err(&t.table, format!("correction names missing row {}", c.row)))?;
                let mut v = serde_json::to_value(&*row).expect("rows serialize");
                let slot = v.pointer_mut(&c.pointer).ok_or_else(|| fixture_err(&t.table, format!("row {}: no field {}", c.row, c.pointer)))?;
                if *slot != c.printed {
                    return Err(fixture_err(&t.table, format!("row {}: {} is {} but the correction expects {}", c.row, c.pointer, slot, c.printed)));
                }
                *slot = c.corrected.clone();
                *row = serde_json::from_value(v).map_err(|e| fixture_err(&t.table, format!("row {} after correction: {}", c.row, e)))?;
            }
            r.rows.extend(rows);
            r.corrections.extend(t.corrections);
            r.delta_decodable.extend(t.delta_decodable);
        }
        Ok(r)
    }

    pub fn find(&self, params: &Params) -> Option<&Row> {
        let key = params.flat();
        self.rows.iter().find(|r| r.params == key)
    }
}

fn kind_str(k: StepKind) -> String {
    k.as_str().to_string()
}

pub fn psi_of(s: &RestrictedStep) -> Psi {
    match s {
        RestrictedStep::Iso { .. } => Psi { kind: "iso".into(), count: None, delta: None, suffix: None },
        RestrictedStep::DisjointFlops { count, local_type, kind, .. } => {
            Psi { kind: kind_str(*kind), count: Some(*count), delta: Some(local_type.clone()), suffix: None }
        }
        RestrictedStep::EliminatedFlip { local_type, kind, .. } => Psi { kind: kind_str(*kind), count: None, delta: Some(local_type.clone()), suffix: None },
        RestrictedStep::ContainsLocus { delta, locus_degree, kind, .. } => {
            Psi { kind: kind_str(*kind), count: None, delta: Some(delta.clone()), suffix: Some(*locus_degree) }
        }
        RestrictedStep::Undetermined { .. } => Psi { kind: "undetermined".into(), count: None, delta: None, suffix: None },
    }
}

/// The model column as a JSON object, with every key a fixture may use.
pub fn model_of(m: &EndModel) -> serde_json::Map<String, Value> {
    let v = match m {
        EndModel::FanoImage { weights, degree: None, .. } => json!({"type": "wps", "weights": weights}),
        EndModel::FanoImage { weights, degree: Some(k), .. } => json!({"type": "hypersurface", "degree": k, "weights": weights}),
        EndModel::DpFibration { base_weights, fiber_weights, fiber_degree, dp_degree: Some(k) } => json!({
            "type": "dp_fibration", "dp_degree": k, "base": base_weights,
            "fiber_degree": fiber_degree, "fiber_weights": fiber_weights,
        }),
        EndModel::DpFibration { base_weights, fiber_weights, fiber_degree, dp_degree: None } => json!({
            "type": "fibration", "base": base_weights, "fiber_degree": fiber_degree, "fiber_weights": fiber_weights,
        }),
        EndModel::ConicBundle { base_weights, fiber_weights, fiber_degree, discriminant } => json!({
            "type": "conic_bundle", "base": base_weights, "discriminant": discriminant,
            "fiber_degree": fiber_degree, "fiber_weights": fiber_weights,
        }),
    };
    match v {
        Value::Object(o) => o,
        _ => unreachable!(),
    }
}

pub fn phi_of(m: &EndModel) -> &'static str {
    if m.is_fibration() {
        "fibration"
    } else {
        "contraction"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub row: u32,
    pub params: Vec<i64>,
    pub field: String,
    pub expected: Value,
    pub computed: Value,
}

/// Compares one computed link to its row. Returns hard differences and
/// informational ones (tuples on rows outside `delta_decodable`).
pub fn compare_row(row: &Row, link: &Link, decodable: bool) -> (Vec<FieldDiff>, Vec<FieldDiff>) {
    let (mut hard, mut soft) = (Vec::new(), Vec::new());
    let mut diff = |field: String, expected: Value, computed: Value, soft_only: bool| {
        let d = FieldDiff { row: row.no, params: row.params.clone(), field, expected, computed };
        if soft_only {
            soft.push(d)
        } else {
            hard.push(d)
        }
    };
    let computed: Vec<Psi> = link.steps.iter().map(psi_of).collect();
    if computed.len() != row.psi.len() {
        diff("psi".into(), json!(row.psi), json!(computed), false);
    } else {
        for (i, (want, got)) in row.psi.iter().zip(&computed).enumerate() {
            if want.kind != got.kind {
                diff(format!("psi/{}/kind", i), json!(want.kind), json!(got.kind), false);
            }
            if want.count != got.count {
                diff(format!("psi/{}/count", i), json!(want.count), json!(got.count), false);
            }
            if want.delta.is_some() && want.delta != got.delta {
                diff(format!("psi/{}/delta", i), json!(want.delta), json!(got.delta), !decodable);
            }
            if (want.suffix.is_some() || decodable) && want.suffix != got.suffix {
                diff(format!("psi/{}/suffix", i), json!(want.suffix), json!(got.suffix), !decodable);
            }
        }
    }
    let phi = phi_of(&link.end);
    if row.phi != phi {
        diff("phi".into(), json!(row.phi), json!(phi), false);
    }
    let model = model_of(&link.end);
    for (k, want) in &row.model {
        let got = model.get(k).cloned().unwrap_or(Value::Null);
        if *want != got {
            diff(format!("model/{}", k), want.clone(), got, false);
        }
    }
    (hard, soft)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TableCheck {
    pub family: Option<Family>,
    pub expected_rows: usize,
    pub matched_rows: usize,
    pub corrections: Vec<Correction>,
    pub mismatches: Vec<FieldDiff>,
    /// Table rows with no computed link.
    pub missing: Vec<Vec<i64>>,
    /// Computed links outside the table.
    pub extra: Vec<Vec<i64>>,
    pub notes: Vec<FieldDiff>,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.missing.is_empty()
    }
}

/// Checks computed links against the reference. Extra links are reported but
/// do not fail the check.
pub fn check(reference: &Reference, links: &[LinkReport]) -> TableCheck {
    let mut out =
        TableCheck { family: Some(reference.family), expected_rows: reference.rows.len(), corrections: reference.corrections.clone(), ..Default::default() };
    for row in &reference.rows {
        let Some(r) = links.iter().find(|l| l.params.flat() == row.params) else {
            out.missing.push(row.params.clone());
            continue;
        };
        let (Some(end), true) = (&r.end_model, r.is_link()) else {
            out.missing.push(row.params.clone());
            continue;
        };
        let link = Link { steps: r.restricted_steps.clone(), end: end.clone(), sing: r.sing };
        let (hard, soft) = compare_row(row, &link, reference.delta_decodable.contains(&row.no));
        if hard.is_empty() {
            out.matched_rows += 1;
        }
        out.mismatches.extend(hard);
        out.notes.extend(soft);
    }
    for l in links.iter().filter(|l| l.is_link()) {
        if reference.find(&l.params).is_none() {
            out.extra.push(l.params.flat());
        }
    }
    out
}

/// Anomaly flags for one report: absent from the tables, or matched only
/// after a correction.
pub fn annotate(reference: &Reference, r: &mut LinkReport) {
    if !r.is_link() {
        return;
    }
    match reference.find(&r.params) {
        None => r.anomalies.push("absent_from_table".into()),
        Some(row) => {
            for c in reference.corrections.iter().filter(|c| c.row == row.no) {
                r.anomalies.push(format!("table_correction:row{}{}", c.row, c.pointer));
            }
        }
    }
}
