use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn koszul(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul"))
        .args(args)
        .env("KOSZUL_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn envelope(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn entries(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .map(|it| {
            it.map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn decomposition_of_the_square_of_three_forms() {
    let dir = tempfile::tempdir().unwrap();
    let env = envelope(&koszul(
        dir.path(),
        &["decompose", "--expr", "wedge2(wedge3(std))", "--g", "6"],
    ));
    assert_eq!(
        env["payload"]["decomposition"],
        "2V_0 + 3V_{1^2} + 2V_{1^4} + V_{1^6} + V_{2,1^2} + V_{2^2} + V_{2^2,1^2}"
    );
    assert_eq!(env["payload"]["dim"], 24090);
    assert_eq!(env["schema_version"], 1);
    assert_eq!(env["tool"], "koszul");
    assert_eq!(env["job"]["subcommand"], "decompose");
}

#[test]
fn black_graphs_without_legs_vanish_below_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let env = envelope(&koszul(
        dir.path(),
        &[
            "graph-homology",
            "--variant",
            "z",
            "--n",
            "1",
            "--legs",
            "0",
            "--max-q",
            "4",
            "--primes",
            "101,10007",
        ],
    ));
    let cells = env["payload"]["cells"].as_array().unwrap();
    assert!(!cells.is_empty());
    for c in cells {
        if c["p"].as_i64().unwrap() < c["q"].as_i64().unwrap() {
            assert_eq!(c["dim"], 0, "{c}");
        }
    }
    assert_eq!(env["payload"]["vanishing_ranges_hold"], true);
    assert_eq!(env["verification"]["d_squared_zero"], true);
    assert_eq!(env["verification"]["modular_check"], true);
}

#[test]
fn transfer_check_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out = koszul(
        dir.path(),
        &[
            "transfer-check",
            "--n",
            "1",
            "--max-q",
            "3",
            "--json-out",
            json.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("π∘t = q·id: PASS"), "{text}");
    let env: Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(env["payload"]["pi_t"], true);
}

#[test]
fn red_and_black_graphs_resolve_the_species() {
    let dir = tempfile::tempdir().unwrap();
    let env = envelope(&koszul(
        dir.path(),
        &["rb-homology", "--variant", "e", "--legs", "2", "--max-w", "2"],
    ));
    assert_eq!(env["payload"]["resolves_species"], true);
    let out = koszul(
        dir.path(),
        &["rb-homology", "--variant", "z", "--legs", "2", "--max-w", "2", "--tsv"],
    );
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("p\tq\tw\tdim\n"));
}

#[test]
fn relative_homology_is_a_single_class() {
    let dir = tempfile::tempdir().unwrap();
    let env = envelope(&koszul(
        dir.path(),
        &[
            "harrison",
            "--species",
            "z1",
            "--legs",
            "1",
            "--max-w",
            "3",
            "--relative",
        ],
    ));
    let cells = env["payload"]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0], serde_json::json!({"p": 2, "q": 1, "w": 1, "dim": 1}));
}

#[test]
fn koszul_check_and_torelli() {
    let dir = tempfile::tempdir().unwrap();
    let env = envelope(&koszul(
        dir.path(),
        &["koszul-check", "--species", "z1", "--max-legs", "2", "--max-w", "2"],
    ));
    assert_eq!(env["payload"]["diagonal"], true);
    let env = envelope(&koszul(dir.path(), &["torelli", "--g", "4", "--max-w", "2"]));
    let w2 = &env["payload"]["weights"][1];
    assert_eq!(
        (w2["dim_t"].as_i64(), w2["dim_h"].as_i64(), w2["dim_ker"].as_i64()),
        (Some(337), Some(336), Some(1))
    );
    assert_eq!(w2["ker_trivial"], true);
    assert_eq!(w2["ker_central"], true);
}

#[test]
fn same_job_gives_identical_payloads_and_cache_hits_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["realize", "--species", "e1", "--g", "3", "--max-w", "2"];
    let cold = envelope(&koszul(dir.path(), &[&args[..], &["--no-cache"]].concat()));
    assert_eq!(cold["cache"], "disabled");
    assert!(entries(dir.path()).is_empty());
    let miss = envelope(&koszul(dir.path(), &args));
    let hit = envelope(&koszul(dir.path(), &args));
    assert_eq!(miss["cache"], "miss");
    assert_eq!(hit["cache"], "hit");
    let bytes = |v: &Value| serde_json::to_string(&v["payload"]).unwrap();
    assert_eq!(bytes(&cold), bytes(&miss));
    assert_eq!(bytes(&miss), bytes(&hit));
    assert_eq!(hit["verification"], miss["verification"]);
    assert_eq!(entries(dir.path()).len(), 1);
}

#[test]
fn corrupt_entries_are_evicted_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["decompose", "--expr", "sym2(std)", "--g", "3"];
    let first = envelope(&koszul(dir.path(), &args));
    let path = entries(dir.path()).pop().unwrap();
    let text = fs::read_to_string(&path).unwrap().replace("\"dim\":21", "\"dim\":22");
    fs::write(&path, text).unwrap();
    let out = koszul(dir.path(), &args);
    assert!(String::from_utf8_lossy(&out.stderr).contains("evicted corrupt cache entry"));
    let second = envelope(&out);
    assert_eq!(second["cache"], "evicted");
    assert_eq!(second["payload"], first["payload"]);
    assert_eq!(envelope(&koszul(dir.path(), &args))["cache"], "hit");
}

fn is_audited(path: &Path) -> bool {
    let stem = path.file_stem().unwrap().to_str().unwrap();
    u8::from_str_radix(&stem[..2], 16).unwrap() % 10 == 0
}

/// Rewrites an entry with a consistent digest, so only recomputation can
/// notice the change.
fn forge(path: &Path, from: &str, to: &str) {
    let mut entry: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let payload: Value = serde_json::from_str(&entry["payload"].to_string().replace(from, to)).unwrap();
    let digest = hex::encode(Sha256::digest(
        serde_json::to_string(&(&payload, &entry["meta"])).unwrap(),
    ));
    entry["payload"] = payload;
    entry["sha256"] = Value::String(digest);
    fs::write(path, entry.to_string()).unwrap();
}

#[test]
fn audit_recomputes_sampled_hits() {
    let dir = tempfile::tempdir().unwrap();
    // Find a job whose key falls in the audited tenth.
    let mut found = None;
    for g in 1..=60 {
        let g = g.to_string();
        let sub = tempfile::tempdir_in(dir.path()).unwrap();
        let args = vec!["decompose", "--expr", "wedge2(std)", "--g", &g];
        envelope(&koszul(sub.path(), &args));
        let path = entries(sub.path()).pop().unwrap();
        if is_audited(&path) {
            found = Some((sub, g));
            break;
        }
    }
    let (sub, g) = found.expect("some key among 60 is audited");
    let args = ["decompose", "--expr", "wedge2(std)", "--g", &g, "--audit"];
    assert_eq!(envelope(&koszul(sub.path(), &args))["cache"], "hit-audited");

    let path = entries(sub.path()).pop().unwrap();
    forge(&path, "\"multiplicity\":1", "\"multiplicity\":7");
    let out = koszul(sub.path(), &args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differs from a fresh run"));
    assert!(!path.exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| koszul(dir.path(), args).status.code();
    assert_eq!(code(&["torelli", "--g", "5", "--max-w", "2"]), Some(2));
    assert_eq!(
        code(&["harrison", "--species", "z1", "--legs", "9", "--max-w", "2"]),
        Some(2)
    );
    assert_eq!(code(&["harrison", "--species", "nope", "--max-w", "2"]), Some(2));
    assert_eq!(code(&["decompose", "--expr", "wedge2(", "--g", "3"]), Some(2));
    assert_eq!(code(&["verify-all", "--profile", "medium"]), Some(2));
    assert_eq!(code(&["no-such-subcommand"]), Some(2));
    let missing = dir.path().join("missing").join("out.json");
    assert_eq!(
        code(&[
            "decompose",
            "--expr",
            "std",
            "--g",
            "2",
            "--json-out",
            missing.to_str().unwrap()
        ]),
        Some(3)
    );
}
