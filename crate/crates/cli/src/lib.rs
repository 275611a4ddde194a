//! Front end for the `kdp` planner, simulator and leakage audit.
//!
//! Every command turns a [`Scenario`] into a [`Table`], which renders as CSV
//! or JSON. Rendering is deterministic and floats are written in their
//! shortest round-trip form.

pub mod scenario;

use std::fmt::Write as _;

use kdp::engine::{measure, toy_leakage_audit, AdversaryPolicy, SimLayout};
use kdp::planner::{asymptotic_rate, plan, ProtocolPlan};
use kdp::{Error, ProtocolKind};
use serde_json::{Map, Value};

pub use scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Scenario(_) => 3,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Scenario(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn opt_f(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn opt_i(v: Option<u64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Int)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Str(s) => Value::from(s.as_str()),
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("json values");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }
}

/// A command's table plus whether any row was infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub infeasible: Vec<String>,
}

fn report(table: Table, infeasible: Vec<String>) -> Report {
    Report { table, infeasible }
}

pub const PLAN_COLUMNS: &[&str] = &[
    "protocol", "ell", "feasible", "key_rate", "asymptote", "c", "total_k", "k_parts", "r1", "r2",
    "r0", "u", "nu", "ac_n0", "ac_k0", "ac_d", "ac_delta_w", "k0", "asu_a", "asu_b", "asu_i", "ell0",
    "pe_bound", "pe2_bound", "pf_bound", "pd_bound", "leakage_bound", "log2_leakage_bound",
    "leakage_risk", "leakage_vacuous", "stages", "reason",
];

fn plan_cells(kind: ProtocolKind, ell: u64, asymptote: f64, p: &ProtocolPlan) -> Vec<Cell> {
    let parts = p.k_parts.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    let stages = p.stages.iter().map(|s| s.protocol.name()).collect::<Vec<_>>().join(" ");
    vec![
        Cell::Str(kind.name().into()),
        Cell::Int(ell),
        Cell::Bool(true),
        Cell::Float(p.key_rate),
        Cell::Float(asymptote),
        Cell::opt_f(p.c),
        Cell::Int(p.total_k),
        Cell::Str(parts),
        Cell::Int(p.r1),
        Cell::Int(p.r2),
        Cell::Int(p.r0),
        Cell::Int(p.u),
        Cell::Int(p.nu.into()),
        Cell::opt_i(p.ac.map(|a| a.n0)),
        Cell::opt_i(p.ac.map(|a| a.k0)),
        Cell::opt_i(p.ac.map(|a| a.d)),
        Cell::opt_i(p.ac.map(|a| a.delta_w)),
        Cell::Int(p.k0),
        Cell::opt_i(p.asu.map(|a| a.a)),
        Cell::opt_i(p.asu.map(|a| a.b)),
        Cell::opt_i(p.asu.map(|a| a.i.into())),
        Cell::Int(p.ell0),
        Cell::Float(p.pe_bound),
        Cell::Float(p.pe2_bound),
        Cell::Float(p.pf_bound),
        Cell::Float(p.pd_bound),
        Cell::Float(p.leakage.shannon_bound),
        Cell::Float(p.leakage.log2_bound),
        Cell::Float(p.leakage.risk),
        Cell::Bool(p.leakage.vacuous),
        Cell::Str(stages),
        Cell::Empty,
    ]
}

fn infeasible_cells(kind: ProtocolKind, ell: u64, asymptote: f64, reason: &str, width: usize) -> Vec<Cell> {
    let mut row = vec![Cell::Str(kind.name().into()), Cell::Int(ell), Cell::Bool(false), Cell::Float(0.0), Cell::Float(asymptote)];
    row.resize(width - 1, Cell::Empty);
    row.push(Cell::Str(reason.into()));
    row
}

fn plans(s: &Scenario) -> Result<Vec<(ProtocolKind, u64, f64, Result<ProtocolPlan, String>)>, CliError> {
    let ch = s.channel.params()?;
    let mut out = Vec::new();
    for &kind in &s.protocols {
        // no advantage over the eavesdropper: every point is infeasible
        let asymptote = match asymptotic_rate(kind, ch) {
            Err(Error::ZeroCapacity { .. }) => 0.0,
            r => r?,
        };
        for &ell in &s.ells {
            let req = s.requirements.for_ell(ell)?;
            let p = match plan(kind, ch, &req) {
                Ok(p) => Ok(p),
                Err(Error::Infeasible(m)) => Err(m),
                Err(e @ Error::ZeroCapacity { .. }) => Err(e.to_string()),
                Err(e) => return Err(e.into()),
            };
            out.push((kind, ell, asymptote, p));
        }
    }
    Ok(out)
}

/// One row per `(protocol, ell)` with every plan field.
pub fn cmd_plan(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(PLAN_COLUMNS);
    let mut bad = Vec::new();
    for (kind, ell, asym, p) in plans(s)? {
        match p {
            Ok(p) => t.push(plan_cells(kind, ell, asym, &p)),
            Err(m) => {
                t.push(infeasible_cells(kind, ell, asym, &m, PLAN_COLUMNS.len()));
                bad.push(format!("{kind} at ell={ell}: {m}"));
            }
        }
    }
    Ok(report(t, bad))
}

pub const SWEEP_COLUMNS: &[&str] = &["protocol", "ell", "c_opt", "key_rate", "asymptote"];

/// Rate curves: protocols in scenario order, then by `ell`. Infeasible
/// points get a zero rate and an empty `c_opt`.
pub fn cmd_sweep(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(SWEEP_COLUMNS);
    let mut bad = Vec::new();
    for (kind, ell, asym, p) in plans(s)? {
        let (c, rate) = match &p {
            Ok(p) => (Cell::opt_f(p.c), p.key_rate),
            Err(m) => {
                bad.push(format!("{kind} at ell={ell}: {m}"));
                (Cell::Empty, 0.0)
            }
        };
        t.push(vec![Cell::Str(kind.name().into()), Cell::Int(ell), c, Cell::Float(rate), Cell::Float(asym)]);
    }
    Ok(report(t, bad))
}

pub const SIMULATE_COLUMNS: &[&str] = &[
    "protocol", "policy", "trials", "key_len", "total_k", "p_e", "p_e_lo", "p_e_hi", "pe_bound",
    "p_f", "p_f_lo", "p_f_hi", "pf_bound", "p_d", "p_d_lo", "p_d_hi", "pd_bound", "acceptance",
    "acceptance_lo", "acceptance_hi", "pe_within", "pd_within", "distance_verified", "reason",
];

/// Empirical error, failure and deception rates against the layout bounds,
/// one row per `(protocol, policy)`.
pub fn cmd_simulate(s: &Scenario) -> Result<Report, CliError> {
    let sim = &s.simulation;
    let ch = sim.channel.params()?;
    let req = sim.requirements.for_ell(sim.ell)?;
    let mut t = Table::new(SIMULATE_COLUMNS);
    let mut bad = Vec::new();
    for &kind in &s.protocols {
        let layout = match plan(kind, ch, &req).and_then(|p| SimLayout::from_plan(&p, ch, &req, s.seed)) {
            Ok(l) => l,
            Err(e @ (Error::Infeasible(_) | Error::ZeroCapacity { .. })) => {
                let m = match e {
                    Error::Infeasible(m) => m,
                    e => e.to_string(),
                };
                for &mode in &sim.policies {
                    let mut row = vec![Cell::Str(kind.name().into()), Cell::Str(mode.name().into()), Cell::Int(sim.trials)];
                    row.resize(SIMULATE_COLUMNS.len() - 1, Cell::Empty);
                    row.push(Cell::Str(m.clone()));
                    t.push(row);
                }
                bad.push(format!("{kind}: {m}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for &mode in &sim.policies {
            let m = measure(&layout, AdversaryPolicy::new(mode), sim.trials, s.seed)?;
            let b = m.bounds;
            t.push(vec![
                Cell::Str(kind.name().into()),
                Cell::Str(mode.name().into()),
                Cell::Int(m.trials),
                Cell::Int(layout.key_len() as u64),
                Cell::Int(layout.total_k as u64),
                Cell::Float(m.p_e.rate),
                Cell::Float(m.p_e.lo),
                Cell::Float(m.p_e.hi),
                Cell::Float(b.pe),
                Cell::Float(m.p_f.rate),
                Cell::Float(m.p_f.lo),
                Cell::Float(m.p_f.hi),
                Cell::Float(b.pf),
                Cell::Float(m.p_d.rate),
                Cell::Float(m.p_d.lo),
                Cell::Float(m.p_d.hi),
                Cell::Float(b.pd),
                Cell::Float(m.acceptance.rate),
                Cell::Float(m.acceptance.lo),
                Cell::Float(m.acceptance.hi),
                Cell::Bool(m.p_e.within(b.pe)),
                Cell::Bool(m.p_d.within(b.pd)),
                Cell::Bool(m.distance_verified),
                Cell::Empty,
            ]);
        }
    }
    Ok(report(t, bad))
}

pub const AUDIT_COLUMNS: &[&str] = &[
    "protocol", "k", "ell", "u", "support_bits", "p_w", "checks", "leakage", "leakage_seed_known",
    "eps_measured", "bound", "within", "vacuous",
];

/// Exact leakage of the scenario's toy instances against the analytic bound.
/// The master seed is added to each instance seed.
pub fn cmd_audit(s: &Scenario) -> Result<Report, CliError> {
    let mut t = Table::new(AUDIT_COLUMNS);
    for inst in &s.audit.instances {
        let mut inst = *inst;
        inst.seed = inst.seed.wrapping_add(s.seed);
        let r = toy_leakage_audit(&inst).map_err(|e| CliError::Scenario(e.to_string()))?;
        t.push(vec![
            Cell::Str(r.protocol.name().into()),
            Cell::Int(r.k),
            Cell::Int(r.ell),
            Cell::Int(r.u),
            Cell::Int(r.support_bits as u64),
            Cell::Float(r.p_w),
            Cell::Int(r.checks as u64),
            Cell::Float(r.leakage),
            Cell::Float(r.leakage_seed_known),
            Cell::Float(r.eps_measured),
            Cell::Float(r.bound),
            Cell::Bool(r.within),
            Cell::Bool(r.vacuous),
        ]);
    }
    Ok(report(t, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Plan,
    Sweep,
    Simulate,
    Audit,
}

/// Parses a `--protocols` value; an empty string is the empty list.
pub fn parse_protocols(list: &str) -> Result<Vec<ProtocolKind>, CliError> {
    let list = list.trim();
    if list.is_empty() {
        return Ok(Vec::new());
    }
    split_protocols(list)
        .iter()
        .map(|p| p.parse::<ProtocolKind>().map_err(|e| CliError::Scenario(e.to_string())))
        .collect()
}

// Hybrid names such as `beta,alpha'_ext` contain a comma themselves, so a
// comma followed by a stage-2 name stays inside the current item.
fn split_protocols(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in list.split(',').map(str::trim) {
        let joins = piece.starts_with("alpha'") || piece.starts_with("alpha_prime") || piece.starts_with("beta'") || piece.starts_with("beta_prime");
        match out.last_mut() {
            Some(prev) if joins && matches!(prev.as_str(), "alpha" | "beta") => {
                prev.push(',');
                prev.push_str(piece);
            }
            _ => out.push(piece.to_string()),
        }
    }
    out
}

/// Runs a command and returns the rendered output.
pub fn run(cmd: Command, s: &Scenario, format: Format) -> Result<(String, Vec<String>), CliError> {
    let r = match cmd {
        Command::Plan => cmd_plan(s)?,
        Command::Sweep => cmd_sweep(s)?,
        Command::Simulate => cmd_simulate(s)?,
        Command::Audit => cmd_audit(s)?,
    };
    Ok((r.table.render(format), r.infeasible))
}

/// One line per infeasible point, for stderr.
pub fn describe_infeasible(items: &[String]) -> String {
    let mut s = String::new();
    for i in items {
        let _ = writeln!(s, "infeasible: {i}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1e-30, 1.0, 0.150_431_234_567_890_12, 123_456_789.0, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.25), "0.25");
    }

    #[test]
    fn protocol_lists() {
        let p = parse_protocols("alpha, beta,alpha'_ext ,alpha_ext").unwrap();
        assert_eq!(p, vec![ProtocolKind::Alpha, ProtocolKind::BetaThenAlphaPrimeExt, ProtocolKind::AlphaExt]);
        assert!(parse_protocols("").unwrap().is_empty());
        assert!(parse_protocols("gamma").is_err());
    }
}
