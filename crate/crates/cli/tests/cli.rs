use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trispin"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read_json(p: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn number_after(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` in {text}"));
    line[key.len()..].trim().parse().unwrap()
}

#[test]
fn make_generic_prints_reference_amplitudes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "g.json");
    let text = ok(&[
        "make", "generic", "--alpha", "45", "--beta", "55", "--gamma", "60", "--delta", "58", "--phi", "125",
        "--out", &out,
    ]);
    for m in ["0.707107", "0.351242", "0.579228", "0.107462", "0.171976", "125.00"] {
        assert!(text.contains(m), "{m} missing from\n{text}");
    }
    assert_eq!(read_json(&out)["kind"], "ket");
}

#[test]
fn make_ghz_and_pseudopure() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "ghz.json");
    ok(&["make", "ghz", "--alpha", "45", "--out", &g]);
    let v = read_json(&g);
    let re: Vec<f64> = v["re"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, x) in re.iter().enumerate() {
        let expect = if i == 0 || i == 7 { h } else { 0.0 };
        assert!((x - expect).abs() < 1e-12);
    }

    let p = path(&dir, "pp.json");
    ok(&["make", "pseudopure", "--state", "000", "--epsilon", "1", "--out", &p]);
    let v = read_json(&p);
    assert_eq!(v["kind"], "density");
    assert_eq!(v["re"][0][0].as_f64().unwrap(), 1.0);
    assert_eq!(v["re"][1][1].as_f64().unwrap(), 0.0);
}

#[test]
fn out_of_range_parameter_is_named() {
    let out = run(&["make", "generic", "--alpha", "120"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn usage_and_help_exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["tomo", "--in", "x.json"]).status.code(), Some(1));
}

#[test]
fn circuit_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let c = path(&dir, "c.json");
    let text = ok(&[
        "circuit", "generic", "--alpha", "45", "--beta", "55", "--gamma", "60", "--delta", "58", "--phi", "125",
        "--circuit-out", &c,
    ]);
    assert!((number_after(&text, "overlap with closed form:") - 1.0).abs() < 1e-10);
    let replay = ok(&["circuit", "--circuit", &c]);
    assert!(replay.contains("0.579228"));
    let w = ok(&["circuit", "w", "--beta", "35.26439", "--gamma", "45"]);
    assert!((number_after(&w, "overlap with closed form:") - 1.0).abs() < 1e-10);
}

#[test]
fn pulse_sim_writes_program_and_state() {
    let dir = TempDir::new().unwrap();
    let prog = path(&dir, "prog.json");
    let rho = path(&dir, "rho.json");
    let text = ok(&["pulse-sim", "ghz", "--alpha", "45", "--program-out", &prog, "--out", &rho]);
    assert!(number_after(&text, "fidelity:") >= 0.999);
    let v = read_json(&prog);
    assert!(v["events"].as_array().unwrap().iter().any(|e| e["event"] == "delay"));
    assert_eq!(read_json(&rho)["kind"], "density");

    let sys = path(&dir, "sys.json");
    std::fs::write(&sys, r#"{"nu":[250.0,-120.0,80.0],"j":[69.8,47.5,-129.0],"t1":5.0,"t2":1.0}"#).unwrap();
    let text = ok(&[
        "pulse-sim", "generic", "--alpha", "30", "--beta", "20", "--gamma", "70", "--delta", "10", "--phi", "300",
        "--system", &sys,
    ]);
    assert!(number_after(&text, "fidelity:") >= 0.999);
    let text = ok(&["pulse-sim", "w", "--beta", "35.26439", "--gamma", "45", "--residual", "0,0,90"]);
    assert!(number_after(&text, "target overlap:") >= 0.999);
}

#[test]
fn relaxation_lowers_reported_fidelity() {
    let text = ok(&[
        "pulse-sim", "generic", "--alpha", "45", "--beta", "55", "--gamma", "60", "--delta", "58", "--phi", "125",
        "--relaxation", "on",
    ]);
    let f = number_after(&text, "fidelity:");
    assert!(f < 1.0 && f > 0.85, "{f}");
    assert!(number_after(&text, "target overlap:") < 0.99);
}

#[test]
fn tomography_round_trip_and_fidelity() {
    let dir = TempDir::new().unwrap();
    let (k, recs, rho) = (path(&dir, "k.json"), path(&dir, "r.csv"), path(&dir, "rho.json"));
    ok(&["make", "w", "--phased", "--out", &k]);
    ok(&["tomo", "--ops", "full", "--in", &k, "--out", &recs]);
    let csv = std::fs::read_to_string(&recs).unwrap();
    assert!(csv.starts_with("op,spin,spectator_state,re,im"));
    let text = ok(&["tomo-invert", "--in", &recs, "--out", &rho]);
    assert!(number_after(&text, "residual:") < 1e-10);
    let f: f64 = ok(&["fidelity", &k, &rho]).trim().parse().unwrap();
    assert!((f - 1.0).abs() < 1e-9);

    // pairwise set gives the BC marginal
    let (bc_recs, bc) = (path(&dir, "bc.csv"), path(&dir, "bc.json"));
    ok(&["tomo", "--ops", "bc", "--in", &k, "--out", &bc_recs]);
    ok(&["tomo-invert", "--in", &bc_recs, "--target", "bc", "--out", &bc]);
    assert_eq!(read_json(&bc)["re"].as_array().unwrap().len(), 4);
}

#[test]
fn tomography_rejects_same_input_and_output() {
    let dir = TempDir::new().unwrap();
    let k = path(&dir, "k.json");
    ok(&["make", "ghz", "--alpha", "45", "--out", &k]);
    assert_eq!(run(&["tomo", "--in", &k, "--out", &k]).status.code(), Some(1));
}

#[test]
fn noisy_tomography_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let k = path(&dir, "k.json");
    ok(&["make", "ghz", "--alpha", "30", "--out", &k]);
    let files: Vec<String> = ["a.csv", "b.csv", "c.csv"].iter().map(|n| path(&dir, n)).collect();
    for (f, seed) in files.iter().zip(["7", "7", "8"]) {
        ok(&["tomo", "--in", &k, "--out", f, "--noise", "0.01", "--seed", seed]);
    }
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&files[0]), read(&files[1]));
    assert_ne!(read(&files[0]), read(&files[2]));
}

#[test]
fn rank_check_reports() {
    let text = ok(&["rank-check", "--ops", "full"]);
    assert!(text.contains("rank: 63 / 63"));
    let text = ok(&["rank-check", "--ops", "III"]);
    assert!(text.contains("unobserved:"));
    let text = ok(&["rank-check", "--ops", "ac"]);
    assert!(text.contains("rank: 15 / 15"));
}

#[test]
fn export_tomograph_ghz_bars() {
    let dir = TempDir::new().unwrap();
    let (k, bars) = (path(&dir, "k.json"), path(&dir, "bars.csv"));
    ok(&["make", "ghz", "--alpha", "45", "--out", &k]);
    ok(&["export-tomograph", "--in", &k, "--out", &bars]);
    let text = std::fs::read_to_string(&bars).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 64);
    let big: Vec<&str> = rows
        .iter()
        .filter(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap().abs() > 1e-9)
        .copied()
        .collect();
    assert_eq!(big.len(), 4);
    for corner in ["000,000,", "000,111,", "111,000,", "111,111,"] {
        assert!(big.iter().any(|r| r.starts_with(corner)), "{corner}");
    }
}

#[test]
fn reconstruct_printed_w_marginals() {
    let dir = TempDir::new().unwrap();
    let (psi, w) = (path(&dir, "psi.json"), path(&dir, "w.json"));
    ok(&["reconstruct", "--ab", &fixture("w_rho_ab.json"), "--bc", &fixture("w_rho_bc.json"), "--out", &psi]);
    ok(&["make", "w", "--phased", "--out", &w]);
    let f: f64 = ok(&["fidelity", &psi, &w]).trim().parse().unwrap();
    assert!((f - 0.97).abs() <= 0.02, "{f}");
}

fn write_marginals(dir: &TempDir, state: &[&str], tag: &str) -> (String, String) {
    let k = path(dir, &format!("{tag}.json"));
    let mut args = state.to_vec();
    args.extend(["--out", &k]);
    ok(&args);
    let mut out = Vec::new();
    for pair in ["ab", "bc"] {
        let recs = path(dir, &format!("{tag}_{pair}.csv"));
        let m = path(dir, &format!("{tag}_{pair}.json"));
        ok(&["tomo", "--ops", pair, "--in", &k, "--out", &recs]);
        ok(&["tomo-invert", "--in", &recs, "--target", pair, "--out", &m]);
        out.push(m);
    }
    (out[0].clone(), out[1].clone())
}

#[test]
fn reconstruct_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (ab, bc) = write_marginals(&dir, &["make", "ghz", "--alpha", "45"], "ghz45");
    assert_eq!(run(&["reconstruct", "--ab", &ab, "--bc", &bc]).status.code(), Some(2));
    let (ab, bc) = write_marginals(&dir, &["make", "ghz", "--alpha", "30"], "ghz30");
    assert_eq!(run(&["reconstruct", "--ab", &ab, "--bc", &bc]).status.code(), Some(2));

    let (ab, _) = write_marginals(&dir, &["make", "generic"], "ground");
    let mixed = path(&dir, "mixed.json");
    let q = [[0.25, 0.0, 0.0, 0.0], [0.0, 0.25, 0.0, 0.0], [0.0, 0.0, 0.25, 0.0], [0.0, 0.0, 0.0, 0.25]];
    let z = [[0.0; 4]; 4];
    std::fs::write(&mixed, serde_json::json!({"kind": "density", "re": q, "im": z}).to_string()).unwrap();
    assert_eq!(run(&["reconstruct", "--ab", &ab, "--bc", &mixed]).status.code(), Some(3));

    let (ab, bc) = write_marginals(
        &dir,
        &["make", "generic", "--alpha", "45", "--beta", "55", "--gamma", "60", "--delta", "58", "--phi", "125"],
        "gen",
    );
    let psi = path(&dir, "psi.json");
    ok(&["reconstruct", "--ab", &ab, "--bc", &bc, "--out", &psi]);
    let f: f64 = ok(&["fidelity", &psi, &path(&dir, "gen.json")]).trim().parse().unwrap();
    assert!(f > 1.0 - 1e-9);
}

#[test]
fn pipeline_reports() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "report.json");
    let text = ok(&["pipeline", "ghz", "--alpha", "45", "--prep", "closed", "--report", &report]);
    assert!(text.contains("prepared fidelity: 1.0000"));
    let v = read_json(&report);
    assert!((v["tomographed_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let text = ok(&[
        "pipeline", "generic", "--alpha", "45", "--beta", "55", "--gamma", "60", "--delta", "58", "--phi", "125",
        "--prep", "pulse", "--relaxation", "on", "--reconstruct",
    ]);
    assert!(number_after(&text, "prepared fidelity:") < 1.0);
    assert!(text.contains("reconstruction fidelity:"));

    let out = run(&["pipeline", "ghz", "--alpha", "45", "--prep", "gate", "--reconstruct"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reconstruct"));
}

#[test]
fn state_export_reimport_is_exact() {
    let dir = TempDir::new().unwrap();
    let (k, rho, bars) = (path(&dir, "k.json"), path(&dir, "rho.json"), path(&dir, "bars.csv"));
    ok(&["make", "generic", "--alpha", "33", "--beta", "12", "--gamma", "77", "--delta", "41", "--phi", "222", "--out", &k]);
    ok(&["pulse-sim", "generic", "--alpha", "33", "--beta", "12", "--gamma", "77", "--delta", "41", "--phi", "222", "--out", &rho]);
    ok(&["export-tomograph", "--in", &rho, "--out", &bars]);
    let m = read_json(&rho);
    let text = std::fs::read_to_string(&bars).unwrap();
    for (idx, line) in text.lines().skip(1).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let (i, j) = (idx / 8, idx % 8);
        let re: f64 = cols[2].parse().unwrap();
        let im: f64 = cols[3].parse().unwrap();
        assert!((re - m["re"][i][j].as_f64().unwrap()).abs() < 1e-12);
        assert!((im - m["im"][i][j].as_f64().unwrap()).abs() < 1e-12);
    }
    assert!(Path::new(&k).exists());
}
