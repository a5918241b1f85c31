use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use netform::scenarios::make_fig1_fixture;
use netform_cli::files::{load_instance, load_profile, parse_json, to_json, InstanceFile, ProfileFile};
use netform_cli::SWEEP_HEADER;
use serde_json::Value;
use tempfile::TempDir;

fn netform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netform")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn golden(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file)
}

fn export(dir: &TempDir, scenario: &str, n: usize) -> (String, String) {
    let out = netform(&["scenario", scenario, "--n", &n.to_string(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = |f: &str| dir.path().join(f).to_str().unwrap().to_string();
    (path("instance.json"), path("profile.json"))
}

#[test]
fn golden_fixture_matches_the_builder() {
    let fx = make_fig1_fixture().unwrap();
    let inst = load_instance(&golden("instance.json")).unwrap();
    assert_eq!(inst, fx.bundle.instance);
    assert_eq!(load_profile(&golden("profile.json"), &inst).unwrap(), fx.bundle.profile);
    assert_eq!(load_profile(&golden("profile_with_edge.json"), &inst).unwrap(), fx.with_edge);
}

#[test]
fn files_round_trip() {
    let fx = make_fig1_fixture().unwrap();
    let text = to_json(&InstanceFile::from_instance(&fx.bundle.instance));
    let back: InstanceFile = parse_json(&text, "instance").unwrap();
    assert_eq!(back.to_instance().unwrap(), fx.bundle.instance);
    let text = to_json(&ProfileFile::from_profile(&fx.with_edge));
    assert_eq!(parse_json::<ProfileFile>(&text, "profile").unwrap().to_profile(), fx.with_edge);
    assert_eq!(std::fs::read_to_string(golden("profile.json")).unwrap(), to_json(&ProfileFile::from_profile(&fx.bundle.profile)));
}

#[test]
fn evaluate_reports_exact_welfare() {
    let dir = TempDir::new().unwrap();
    let (inst, prof) = export(&dir, "bad-nash", 12);
    let out = netform(&["evaluate", &inst, &prof]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["welfare"], "29");
    assert_eq!(v["welfare_decimal"], "29.0000");
    let attack = v["attack"].as_array().unwrap();
    assert_eq!(attack.len(), 3);
    assert!(attack.iter().all(|a| a["probability"] == "1/3" && a["region"].as_array().unwrap().len() == 1));

    let empty = TempDir::new().unwrap();
    std::fs::write(
        empty.path().join("i.json"),
        r#"{"n": 5, "edge_cost": "2", "immunization_cost": "3/2", "attacker": {"kind": "random"}}"#,
    )
    .unwrap();
    std::fs::write(empty.path().join("p.json"), to_json(&ProfileFile::from_profile(&netform::StrategyProfile::empty(5)))).unwrap();
    let out = netform(&["evaluate", empty.path().join("i.json").to_str().unwrap(), empty.path().join("p.json").to_str().unwrap()]);
    assert_eq!(json(&out)["welfare"], "4");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(netform(&["evaluate", bad, bad]).status.code(), Some(2));
    assert_eq!(netform(&["no-such-command"]).status.code(), Some(2));

    // a profile of the wrong size is a semantic error
    let (inst, _) = export(&dir, "bad-nash", 10);
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"agents": [{"buys": [], "immunized": false}]}"#).unwrap();
    assert_eq!(netform(&["evaluate", &inst, short.to_str().unwrap()]).status.code(), Some(3));

    // n = 25 exceeds the exact cap
    let fig = (golden("instance.json"), golden("profile.json"));
    let out = netform(&["verify-nash", fig.0.to_str().unwrap(), fig.1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    // the local class has no cap and finds the improving edge
    let out = netform(&["verify-nash", fig.0.to_str().unwrap(), fig.1.to_str().unwrap(), "--class", "local1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["agents"][1]["gap"], "1/2");
}

#[test]
fn verify_nash_on_the_bad_equilibrium() {
    let dir = TempDir::new().unwrap();
    let (inst, prof) = export(&dir, "bad-nash", 12);
    let out = netform(&["verify-nash", &inst, &prof]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["is_nash"], true);

    // drop one ray edge: no longer an equilibrium
    let mut p: ProfileFile = parse_json(&std::fs::read_to_string(&prof).unwrap(), "p").unwrap();
    let victim = p.agents.iter().position(|a| !a.buys.is_empty()).unwrap();
    p.agents[victim].buys.clear();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, to_json(&p)).unwrap();
    let out = netform(&["verify-nash", &inst, broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["agents"].as_array().unwrap().iter().any(|a| !a["witness"].is_null()));
}

#[test]
fn sweep_rows() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = netform(&["sweep", "--n-from", "10", "--n-to", "13", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines[1], "10,27,27.0000,true,73");
    assert_eq!(lines[4], "13,30,30.0000,true,139");
    assert_eq!(lines.len(), 5);
    assert_eq!(netform(&["sweep", "--n-from", "5", "--n-to", "9"]).status.code(), Some(3));
}

#[test]
fn properties_pass_on_equilibria_and_flag_violators() {
    let dir = TempDir::new().unwrap();
    let (inst, prof) = export(&dir, "bad-nash", 10);
    let out = netform(&["properties", &inst, &prof]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["profiles"][0]["status"], "verified");

    // a vulnerable cycle under carnage, assumed to be an equilibrium
    let cyc = TempDir::new().unwrap();
    std::fs::write(
        cyc.path().join("i.json"),
        r#"{"n": 4, "edge_cost": "2", "immunization_cost": "3/2", "attacker": {"kind": "named", "name": "max_carnage"}}"#,
    )
    .unwrap();
    std::fs::write(
        cyc.path().join("p.json"),
        r#"{"agents": [{"buys": [1], "immunized": false}, {"buys": [2], "immunized": false},
                       {"buys": [3], "immunized": false}, {"buys": [0], "immunized": true}]}"#,
    )
    .unwrap();
    let (i, p) = (cyc.path().join("i.json"), cyc.path().join("p.json"));
    let (i, p) = (i.to_str().unwrap(), p.to_str().unwrap());
    let out = netform(&["properties", i, p, "--assume-equilibrium"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["failures"].as_u64().unwrap() >= 1);
    // without the assumption the checks do not apply
    let out = netform(&["properties", i, p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["profiles"][0]["status"], "not_nash");
}

#[test]
fn properties_enumeration_limits() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("i.json");
    std::fs::write(&inst, r#"{"n": 3, "edge_cost": "3/2", "immunization_cost": "1/2", "attacker": {"kind": "named", "name": "max_carnage"}}"#).unwrap();
    let inst = inst.to_str().unwrap();
    let out = netform(&["properties", inst, "--enumerate", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json(&out)["profiles"].as_array().unwrap().is_empty());
    assert_eq!(netform(&["properties", inst, "--enumerate", "4"]).status.code(), Some(3));
    assert_eq!(netform(&["properties", inst, "--enumerate", "5"]).status.code(), Some(4));
}

#[test]
fn dynamics_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("i.json");
    std::fs::write(&inst, r#"{"n": 7, "edge_cost": "2", "immunization_cost": "2", "attacker": {"kind": "named", "name": "max_carnage"}}"#).unwrap();
    let inst = inst.to_str().unwrap();
    let args = ["dynamics", inst, "--seed", "11", "--max-rounds", "30"];
    let a = netform(&args);
    let b = netform(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = netform(&["dynamics", inst, "--seed", "12", "--max-rounds", "30"]);
    assert_ne!(json(&a)["initial_profile"], json(&other)["initial_profile"]);
}

#[test]
fn dynamics_stay_put_at_an_equilibrium() {
    let dir = TempDir::new().unwrap();
    let (inst, prof) = export(&dir, "bad-nash", 11);
    let out = netform(&["dynamics", &inst, "--profile", &prof, "--order", "round-robin"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["converged"], true);
    assert_eq!(v["passes"], 1);
    assert!(v["moves"].as_array().unwrap().is_empty());
    assert_eq!(v["final_welfare"], "28");
}
