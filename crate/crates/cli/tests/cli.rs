use std::path::PathBuf;
use std::process::{Command, Output};

use kdp::engine::AdversaryMode;
use kdp::planner::asymptotic_rate;
use kdp::{ChannelParams, ProtocolKind};
use kdp_cli::scenario::{ChannelSpec, RequirementSpec, Scenario};
use kdp_cli::{cmd_plan, cmd_sweep, fmt_f64, Cell, PLAN_COLUMNS, SWEEP_COLUMNS};
use proptest::prelude::*;

fn kdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdp")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kdp-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

const SMALL: &str = "schema = 1\nprotocols = [\"alpha\", \"beta\", \"alpha_prime\"]\nells = [1000, 50000]\n";

#[test]
fn empty_protocol_list_gives_header_only() {
    for cmd in ["plan", "sweep", "simulate"] {
        let out = kdp(&[cmd, "--protocols", ""]);
        assert!(out.status.success(), "{cmd}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 1, "{cmd}: {text}");
    }
    let out = kdp(&["sweep", "--protocols", ""]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "protocol,ell,c_opt,key_rate,asymptote\n");
}

#[test]
fn invalid_scenarios_exit_3() {
    let cases = [
        "schema = 2\n",
        "ells = [10]\n",
        "schema = 1\nunknown = 1\n",
        "schema = 1\n[channel]\np_m = 1.5\np_w = 0.2\n",
        "schema = 1\n[requirements]\np_d = 0.0\n",
        "schema = 1\nprotocols = [\"gamma\"]\n",
        "schema = 1\nells = [0]\n",
        "not toml at all [",
    ];
    for (i, text) in cases.iter().enumerate() {
        let p = scratch(&format!("bad{i}.toml"), text);
        let out = kdp(&["plan", "--scenario", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3), "{text:?}");
    }
    assert_eq!(kdp(&["plan", "--scenario", "/nonexistent/kdp.toml"]).status.code(), Some(3));
    assert_eq!(kdp(&["plan", "--protocols", "alpha,gamma"]).status.code(), Some(3));
    assert_eq!(kdp(&["plan", "--format", "xml"]).status.code(), Some(3));
}

#[test]
fn no_advantage_is_infeasible_exit_2() {
    let p = scratch("noadv.toml", "schema = 1\nprotocols = [\"alpha\", \"beta_ext\"]\nells = [1000]\n[channel]\np_m = 0.2\np_w = 0.1\n");
    let out = kdp(&["plan", "--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let (header, rows) = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header.len(), PLAN_COLUMNS.len());
    assert_eq!(rows.len(), 2);
    let feasible = header.iter().position(|h| h == "feasible").unwrap();
    assert!(rows.iter().all(|r| r[feasible] == "false" && !r.last().unwrap().is_empty()));
}

#[test]
fn sweep_columns_and_asymptotes() {
    let p = scratch("small.toml", SMALL);
    let out = kdp(&["sweep", "--scenario", p.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, SWEEP_COLUMNS);
    let ch = ChannelParams::new(0.01, 0.2).unwrap();
    let order: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(
        order,
        [("alpha", "1000"), ("alpha", "50000"), ("beta", "1000"), ("beta", "50000"), ("alpha_prime", "1000"), ("alpha_prime", "50000")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
    );
    for r in &rows {
        let kind: ProtocolKind = r[0].parse().unwrap();
        assert_eq!(r[4].parse::<f64>().unwrap(), asymptotic_rate(kind, ch).unwrap());
        assert!(r[2].is_empty());
        let rate: f64 = r[3].parse().unwrap();
        assert!(rate > 0.0 && rate < asymptotic_rate(kind, ch).unwrap());
    }
}

#[test]
fn plan_rows_carry_every_field() {
    let s = Scenario::parse(SMALL).unwrap();
    let t = cmd_plan(&s).unwrap().table;
    assert_eq!(t.rows.len(), 6);
    let idx = |n: &str| t.column(n).unwrap();
    for row in &t.rows {
        let (Cell::Int(ell), Cell::Int(total), Cell::Float(rate)) = (&row[idx("ell")], &row[idx("total_k")], &row[idx("key_rate")]) else {
            panic!("unexpected cells {row:?}");
        };
        assert!(*ell >= 1000);
        assert_eq!(*rate, *ell as f64 / *total as f64);
        assert_eq!(row[idx("feasible")], Cell::Bool(true));
        if !matches!(row[idx("protocol")], Cell::Str(ref k) if k == "alpha_prime") {
            assert!(matches!(row[idx("ac_n0")], Cell::Int(_)));
        }
    }
}

#[test]
fn numeric_cells_round_trip() {
    let s = Scenario::parse(SMALL).unwrap();
    let csv_text = cmd_plan(&s).unwrap().table.to_csv();
    let (_, rows) = records(&csv_text);
    let mut floats = 0;
    for cell in rows.iter().flatten() {
        if cell.contains('.') || cell.contains('e') {
            if let Ok(v) = cell.parse::<f64>() {
                assert_eq!(fmt_f64(v), *cell);
                floats += 1;
            }
        }
    }
    assert!(floats > 20);
}

#[test]
fn json_matches_csv() {
    let s = Scenario::parse(SMALL).unwrap();
    let t = cmd_sweep(&s).unwrap().table;
    let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), t.rows.len());
    let (_, rows) = records(&t.to_csv());
    for (obj, row) in arr.iter().zip(&rows) {
        assert_eq!(obj["protocol"], row[0].as_str());
        assert_eq!(obj["key_rate"].as_f64().unwrap(), row[3].parse::<f64>().unwrap());
        assert!(obj["c_opt"].is_null());
    }
}

#[test]
fn out_file_matches_stdout_and_runs_repeat() {
    let p = scratch("sim.toml", "schema = 1\nseed = 5\nprotocols = [\"alpha\", \"beta_ext\"]\n[simulation]\ntrials = 100\n");
    let path = p.to_str().unwrap();
    let target = p.with_extension("csv");
    let a = kdp(&["simulate", "--scenario", path]);
    let b = kdp(&["simulate", "--scenario", path, "--out", target.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert!(b.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), a.stdout);
    let c = kdp(&["simulate", "--scenario", path, "--seed", "6"]);
    assert_ne!(c.stdout, a.stdout);
    let d = kdp(&["simulate", "--scenario", path, "--seed", "5"]);
    assert_eq!(d.stdout, a.stdout);
    let (header, rows) = records(&String::from_utf8(a.stdout).unwrap());
    assert_eq!(rows.len(), 2 * AdversaryMode::ALL.len());
    let within = header.iter().position(|h| h == "pd_within").unwrap();
    assert!(rows.iter().all(|r| r[within] == "true"));
}

#[test]
fn audit_reports_within_bound() {
    let out = kdp(&["audit", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["within"] == true));
}

#[test]
fn beta_ext_above_alpha_ext_at_a_million() {
    let s = Scenario {
        protocols: vec![ProtocolKind::AlphaExt, ProtocolKind::BetaExt],
        ells: vec![1_000_000],
        channel: ChannelSpec::Bsc { p_m: 0.001, p_w: 0.2 },
        ..Scenario::default()
    };
    let t = cmd_sweep(&s).unwrap().table;
    let rate = |i: usize| match t.rows[i][3] {
        Cell::Float(v) => v,
        _ => panic!(),
    };
    assert!(rate(1) > rate(0), "{} vs {}", rate(1), rate(0));
}

fn arb_scenario() -> impl Strategy<Value = Scenario> {
    let req = (1e-40f64..1.0, 1e-12f64..0.5, 1e-12f64..0.5, 1e-12f64..0.5, 1e-12f64..0.5)
        .prop_map(|(i_adm, p_e, p_f, p_d, p_risk)| RequirementSpec { i_adm, p_e, p_f, p_d, p_risk });
    let chan = prop_oneof![
        (0.0f64..0.2, 0.2f64..0.5).prop_map(|(p_m, p_w)| ChannelSpec::Bsc { p_m, p_w }),
        (0.0f64..0.1, 0.0f64..0.1, 0.1f64..0.4).prop_map(|(pi_a, pi_b, pi_e)| ChannelSpec::Source { pi_a, pi_b, pi_e }),
    ];
    (
        any::<u64>(),
        proptest::sample::subsequence(ProtocolKind::ALL.to_vec(), 0..=12),
        proptest::collection::vec(1u64..1_000_000_000, 0..5),
        chan,
        req,
        1u64..100_000,
        proptest::sample::subsequence(AdversaryMode::ALL.to_vec(), 0..=5),
    )
        .prop_map(|(seed, protocols, ells, channel, requirements, trials, policies)| {
            let mut s = Scenario {
                seed,
                protocols,
                ells,
                channel,
                requirements,
                ..Scenario::default()
            };
            s.simulation.trials = trials;
            s.simulation.policies = policies;
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenarios_round_trip(s in arb_scenario()) {
        let text = s.to_toml();
        prop_assert_eq!(Scenario::parse(&text).unwrap(), s);
    }
}
