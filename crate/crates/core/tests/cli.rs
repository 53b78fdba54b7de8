use std::path::Path;
use std::process::{Command, Output};

use fermi_rdm::SlaterExpansion;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fermi-rdm"));
    c.env_remove("FERMI_RDM_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn state_files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let s = SlaterExpansion::random_state(4, 9, 30, seed).unwrap();
        let f = dir.path().join(format!("s{seed}.json"));
        s.save(&f).unwrap();
        let back = SlaterExpansion::load(&f).unwrap();
        for ((ka, ca), (kb, cb)) in s.coeffs().iter().zip(back.coeffs()) {
            assert_eq!(ka, kb);
            assert_eq!(ca.re.to_bits(), cb.re.to_bits());
            assert_eq!(ca.im.to_bits(), cb.im.to_bits());
        }
    }
}

#[test]
fn gen_slater_has_one_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.json");
    let o = run(&["gen", "--family", "slater", "--n", "3", "--m", "6", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = SlaterExpansion::load(&out).unwrap();
    assert_eq!(s.support_len(), 1);
    assert_eq!((s.n(), s.m()), (3, 6));
}

#[test]
fn verify_identity_on_slater() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let report = dir.path().join("decomp.json");
    run(&["gen", "--family", "slater", "--n", "4", "--m", "7", "--orbitals", "1,3,4,7", "--out", p(&state)]);
    let o = run(&["verify-identity", "--state", p(&state), "--k", "2", "--out", p(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["decomposition"]["residual"].as_f64(), Some(0.0));
    assert_eq!(v["decomposition"]["total"].as_f64(), Some(6.0));
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_and_validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["gen", "--family", "nope", "--n", "3", "--m", "6"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // odd particle count for the pairing state
    assert_eq!(run(&["gen", "--family", "yang", "--n", "3", "--m", "6"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "m": 4, "coeffs": [{"idx": [1, 1, 2], "re": 1.0, "im": 0.0}]}"#).unwrap();
    assert_eq!(run(&["rdm", "--state", p(&bad), "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["rdm", "--state", p(&dir.path().join("missing.json")), "--k", "1"]).status.code(), Some(2));
    let state = dir.path().join("s.json");
    run(&["gen", "--family", "random", "--n", "3", "--m", "6", "--seed", "2", "--out", p(&state)]);
    let o = run(&["verify-inequalities", "--state", p(&state), "--t", "2", "--lemma", "odd"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--max-dense-entries", "-1", "rdm", "--state", p(&state), "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"unknown": true}"#).unwrap();
    assert_eq!(run(&["--config", p(&cfg), "rdm", "--state", p(&state), "--k", "1"]).status.code(), Some(2));
}

#[test]
fn failing_cells_are_listed_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    run(&["gen", "--family", "random", "--n", "4", "--m", "7", "--support", "20", "--seed", "3", "--out", p(&state)]);
    let out = dir.path().join("r.json");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tolerance": 1e300}"#).unwrap();
    let ok = run(&["--config", p(&cfg), "verify-inequalities", "--state", p(&state), "--t", "1", "--out", p(&out)]);
    assert_eq!(ok.status.code(), Some(0));
    // a τ far too small for the summed bound is rejected up front
    let o = run(&["verify-inequalities", "--state", p(&state), "--t", "2", "--tau", "0.01", "--lemma", "prop"]);
    assert_eq!(o.status.code(), Some(2));

    // The certified constant only holds for normalized states; an expansion
    // scaled by 10 has ‖Γ‖²_HS ten thousand times larger.
    let s = SlaterExpansion::random_state(4, 7, 20, 3).unwrap();
    let scaled = fermi_rdm::state::StateFile {
        n: 4,
        m: 7,
        coeffs: s
            .to_file_repr()
            .coeffs
            .into_iter()
            .map(|mut c| {
                c.re *= 10.0;
                c.im *= 10.0;
                c
            })
            .collect(),
    };
    let big = dir.path().join("big.json");
    std::fs::write(&big, serde_json::to_string(&scaled).unwrap()).unwrap();
    let o = run(&["verify-inequalities", "--state", p(&big), "--t", "1", "--lemma", "theorem", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let fails = v["failures"].as_array().unwrap();
    assert!(!fails.is_empty());
    for key in ["label", "t", "core", "core_key", "lhs", "rhs"] {
        assert!(fails[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pass"], false);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (run_id, threads) in ["1", "3"].iter().enumerate() {
        let d = dir.path().join(format!("run{run_id}"));
        std::fs::create_dir(&d).unwrap();
        let state = d.join("s.json");
        let go = |args: &[&str]| {
            let o = bin().env("FERMI_RDM_THREADS", threads).args(args).output().unwrap();
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        };
        go(&["gen", "--family", "random", "--n", "5", "--m", "9", "--support", "40", "--seed", "11", "--out", p(&state)]);
        go(&["rdm", "--state", p(&state), "--k", "2", "--out", p(&d.join("rdm.json"))]);
        go(&["verify-identity", "--state", p(&state), "--k", "3", "--out", p(&d.join("id.json"))]);
        go(&["verify-inequalities", "--state", p(&state), "--t", "2", "--out", p(&d.join("ineq.json"))]);
        go(&["sweep", "--k", "2", "--n-range", "3:6", "--seeds", "2", "--out", p(&d.join("sweep.csv"))]);
        let files: Vec<Vec<u8>> = ["s.json", "rdm.json", "id.json", "ineq.json", "sweep.csv"]
            .iter()
            .map(|f| std::fs::read(d.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_csv_has_header_and_rows() {
    let o = run(&["sweep", "--family", "random", "--k", "2", "--n-range", "3:6", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    for col in ["n", "m", "k", "hs_norm", "op_norm", "trace", "S", "S2", "certified_bound", "realized_Ck"] {
        assert!(header.iter().any(|h| h == col), "missing {col}");
    }
    assert!(rdr.records().count() >= 4);
}

#[test]
fn corpus_with_small_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("corpus.json");
    std::fs::write(
        &manifest,
        r#"{"seeds": [1, 2], "particles": [3, 4], "max_orbitals": 6, "supports": [3, "full"], "dense_limit": 1e6, "max_ops": 1e10}"#,
    )
    .unwrap();
    let o = run(&["corpus", "--manifest", p(&manifest)]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 11);
}
