//! Tabular output: CSV with a header row and 17-significant-digit floats,
//! or the same table as a JSON array of records, plus a JSON sidecar carrying
//! the parameters behind a file.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::dressed::DressedTriple;
use crate::hamiltonian::ModelParams;
use crate::meanfield::{
    ConvergenceStudy, COARSE_POINTS, PSI_THRESHOLD, PSI_TOL, RHO_STEP, TRUNCATION_GUARD,
};
use crate::sweep::{Cell, GridSpec, LobeBoundary, LobeTip, PhaseGrid, TipEntry, PSI_FLOOR};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SPECTRUM_COLUMNS: [&str; 5] = ["n", "omega_over_beta", "e_minus", "e_zero", "e_plus"];
pub const RABI_COLUMNS: [&str; 3] = ["n", "omega_over_beta", "R"];
pub const MU_CRIT_COLUMNS: [&str; 4] = ["n", "omega_over_beta", "mu_c_eq10", "mu_c_degeneracy"];
pub const PHASE_COLUMNS: [&str; 7] = [
    "kappa_over_beta",
    "mu_rel",
    "psi_min",
    "e_ground",
    "rho",
    "phase",
    "converged",
];
pub const CONVERGE_COLUMNS: [&str; 2] = ["n_max", "e_ground"];
pub const LOBE_TIP_COLUMNS: [&str; 4] = ["atoms", "n_lobe", "kappa_tip", "found"];

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(usize),
    Float(f64),
    Text(&'static str),
    Bool(bool),
    Empty,
}

impl From<Option<f64>> for Field {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Field::Empty, Field::Float)
    }
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Int(n) => n.to_string(),
            Field::Float(x) => format_float(*x),
            Field::Text(s) => (*s).to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Int(n) => json!(n),
            Field::Float(x) if x.is_finite() => json!(x),
            Field::Float(_) | Field::Empty => Value::Null,
            Field::Text(s) => json!(s),
            Field::Bool(b) => json!(b),
        }
    }
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Field::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_records(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let record: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, f)| ((*c).to_string(), f.json()))
                        .collect();
                    Value::Object(record)
                })
                .collect(),
        )
    }
}

/// Dressed branches per `(n, ω/β)`; missing branches are left empty.
pub fn spectrum_table(rows: &[(f64, DressedTriple)]) -> Table {
    let mut t = Table::new(&SPECTRUM_COLUMNS);
    for (x, d) in rows {
        t.push(vec![
            Field::Int(d.n),
            Field::Float(*x),
            Field::Float(d.e_minus),
            d.e_zero.into(),
            d.e_plus.into(),
        ]);
    }
    t
}

pub fn rabi_table(rows: &[(usize, f64, f64)]) -> Table {
    let mut t = Table::new(&RABI_COLUMNS);
    for &(n, x, r) in rows {
        t.push(vec![Field::Int(n), Field::Float(x), Field::Float(r)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuCritRow {
    pub n: usize,
    pub omega_over_beta: f64,
    pub formula: f64,
    /// Absent when the degeneracy solver found no crossing.
    pub degeneracy: Option<f64>,
}

pub fn mu_crit_table(rows: &[MuCritRow]) -> Table {
    let mut t = Table::new(&MU_CRIT_COLUMNS);
    for r in rows {
        t.push(vec![
            Field::Int(r.n),
            Field::Float(r.omega_over_beta),
            Field::Float(r.formula),
            r.degeneracy.into(),
        ]);
    }
    t
}

/// A phase-schema row. Failed cells keep their coordinates, leave the
/// numbers empty and carry phase `ERR`.
pub fn phase_row(kappa: f64, mu_rel: f64, cell: &Cell) -> Vec<Field> {
    let mut row = vec![Field::Float(kappa), Field::Float(mu_rel)];
    match cell {
        Ok(s) => row.extend([
            Field::Float(s.psi_min),
            Field::Float(s.e_ground),
            Field::Float(s.rho),
            Field::Text(s.phase.label()),
            Field::Bool(s.converged),
        ]),
        Err(_) => row.extend([
            Field::Empty,
            Field::Empty,
            Field::Empty,
            Field::Text("ERR"),
            Field::Bool(false),
        ]),
    }
    row
}

/// One row per cell, `κ` outer and `μ` inner.
pub fn phase_table(grid: &PhaseGrid) -> Table {
    let mut t = Table::new(&PHASE_COLUMNS);
    let (kappas, mu_rels) = (grid.spec.kappas(), grid.spec.mu_rels());
    for (i, &kappa) in kappas.iter().enumerate() {
        for (j, &mu_rel) in mu_rels.iter().enumerate() {
            t.push(phase_row(kappa, mu_rel, grid.cell(i, j)));
        }
    }
    t
}

pub fn converge_table(study: &ConvergenceStudy) -> Table {
    let mut t = Table::new(&CONVERGE_COLUMNS);
    for &(k, e) in &study.points {
        t.push(vec![Field::Int(k), Field::Float(e)]);
    }
    t
}

pub fn lobe_tip_table(entries: &[TipEntry]) -> Table {
    let mut t = Table::new(&LOBE_TIP_COLUMNS);
    for e in entries {
        t.push(vec![
            Field::Int(e.atoms),
            Field::Int(e.n_lobe),
            e.kappa_tip.into(),
            Field::Bool(e.kappa_tip.is_some()),
        ]);
    }
    t
}

/// Provenance written next to every data file.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: usize,
    pub params: Option<ModelParams>,
    pub grid: Option<GridSpec>,
    pub boundaries: Option<Vec<LobeBoundary>>,
    pub lobe_tips: Option<Vec<LobeTip>>,
    /// Command-specific settings (frequency lists, cutoffs, atom numbers …).
    pub settings: Value,
    pub solver: Value,
}

impl Sidecar {
    pub fn new(command: &str, table: &Table) -> Self {
        Self {
            tool: "dbh",
            version: VERSION,
            command: command.to_string(),
            columns: table.columns.to_vec(),
            rows: table.rows.len(),
            params: None,
            grid: None,
            boundaries: None,
            lobe_tips: None,
            settings: Value::Null,
            solver: json!({
                "psi_threshold": PSI_THRESHOLD,
                "psi_tolerance": PSI_TOL,
                "coarse_points": COARSE_POINTS,
                "truncation_guard": TRUNCATION_GUARD,
                "rho_step": RHO_STEP,
                "psi_floor": PSI_FLOOR,
            }),
        }
    }

    pub fn with_grid(mut self, grid: &PhaseGrid) -> Self {
        self.params = Some(grid.spec.params_base);
        self.grid = Some(grid.spec);
        self.boundaries = Some(grid.boundaries.clone());
        self.lobe_tips = Some(grid.lobe_tips.clone());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar is plain data");
        s.push('\n');
        s
    }

    /// The table and this metadata as one JSON document.
    pub fn with_records(&self, table: &Table) -> String {
        let mut doc = serde_json::to_value(self).expect("sidecar is plain data");
        doc["records"] = table.to_json_records();
        let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
        s.push('\n');
        s
    }
}
