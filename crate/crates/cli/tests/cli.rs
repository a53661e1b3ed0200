//! Golden-file and exit-code tests for the `spreadkit` binary.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden/`.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    manifest()
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn corpus(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

fn corpus_dir() -> PathBuf {
    manifest().join("../../corpus")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with(args: &[&str], threads: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spreadkit"));
    cmd.args(args).env_remove("SPREADKIT_THREADS");
    if let Some(t) = threads {
        cmd.env("SPREADKIT_THREADS", t);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_with(args, None)
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout))
}

fn golden(name: &str, args: &[&str], code: i32) -> Value {
    let r = run(args);
    assert_eq!(r.code, code, "exit code for {name}: {}", r.stderr);
    let path = manifest().join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &r.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(r.stdout, expected, "{name} differs from its golden file");
    json(&r)
}

#[test]
fn analyze_complete_six() {
    let v = golden(
        "analyze_complete6_k3",
        &["analyze", &corpus("complete_06.facets"), "--k", "3"],
        0,
    );
    let layer = &v["results"]["layers"][0];
    assert_eq!(layer["r_star"]["value"], 2.0);
    assert_eq!(layer["lemma_spread"]["holds"], true);
    assert_eq!(layer["local_lym"]["worst_ratio"], "1/2");
}

#[test]
fn analyze_path_graph() {
    let v = golden(
        "analyze_path4_k1",
        &["analyze", &fixture("path4.graph"), "--k", "1"],
        0,
    );
    assert_eq!(v["results"]["rank"], 2);
    assert_eq!(v["results"]["layers"][0]["lemma_spread"]["holds"], true);
    // An explicit flag reads a facet-named file as a graph.
    let forced = run(&[
        "analyze",
        &fixture("disjoint.facets"),
        "--graph",
        "--k",
        "1",
    ]);
    assert_eq!(forced.code, 0);
    assert_eq!(json(&forced)["params"]["input_kind"], "graph");
}

#[test]
fn analyze_empty_layer_and_large_k() {
    let v = golden(
        "analyze_k0",
        &["analyze", &corpus("complete_06.facets"), "--k", "0"],
        0,
    );
    assert_eq!(v["results"]["layers"][0]["layer_size"], 1);
    let r = run(&["analyze", &corpus("complete_06.facets"), "--k", "9"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["results"]["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn decompose_star() {
    let v = golden(
        "decompose_star12",
        &[
            "decompose",
            &corpus("complete_12.facets"),
            "--k",
            "3",
            "--t",
            "1",
            "--r",
            "2",
            "--q",
            "1",
        ],
        0,
    );
    let d = &v["results"]["decomposition"];
    assert_eq!(d["cover"], serde_json::json!([[1]]));
    assert_eq!(d["stop_reason"], "exhausted");
    assert_eq!(d["remainder"]["members"], serde_json::json!([]));
}

#[test]
fn decompose_single_member_stops_oversize() {
    let v = golden(
        "decompose_triple",
        &[
            "decompose",
            &corpus("complete_03.facets"),
            "--k",
            "3",
            "--t",
            "1",
            "--r",
            "2",
            "--q",
            "1",
            "--family",
            &fixture("triple.facets"),
        ],
        0,
    );
    let d = &v["results"]["decomposition"];
    assert_eq!(d["stop_reason"], "oversize_set");
    assert_eq!(d["last_set"], serde_json::json!([1, 2, 3]));
    assert_eq!(d["remainder"]["members"], serde_json::json!([[1, 2, 3]]));
}

#[test]
fn decompose_disjoint_pair_reports_cover_not_intersecting() {
    let v = golden(
        "decompose_disjoint",
        &[
            "decompose",
            &corpus("complete_04.facets"),
            "--k",
            "2",
            "--t",
            "1",
            "--r",
            "2",
            "--q",
            "2",
            "--family",
            &fixture("disjoint.facets"),
        ],
        0,
    );
    let ver = &v["results"]["verification"];
    assert_eq!(ver["cover_t_intersecting"]["holds"], false);
    assert_eq!(ver["partition"], true);
}

#[test]
fn decompose_rejects_family_outside_layer() {
    let r = run(&[
        "decompose",
        &corpus("complete_04.facets"),
        "--k",
        "3",
        "--t",
        "1",
        "--r",
        "2",
        "--family",
        &fixture("disjoint.facets"),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not in layer 3"), "{}", r.stderr);
}

#[test]
fn extremal_examples() {
    let v = golden(
        "extremal_complete6_k3",
        &[
            "extremal",
            &corpus("complete_06.facets"),
            "--k",
            "3",
            "--t",
            "1",
        ],
        0,
    );
    assert_eq!(v["results"]["verdict"]["max_size"], 10);
    assert_eq!(v["results"]["verdict"]["star_optimal"], true);

    let v = golden(
        "extremal_complete7_nontrivial",
        &[
            "extremal",
            &corpus("complete_07.facets"),
            "--k",
            "3",
            "--t",
            "1",
            "--nontrivial",
        ],
        0,
    );
    assert_eq!(v["results"]["verdict"]["max_size"], 15);
    assert_eq!(v["results"]["nontrivial"]["max_size"], 13);

    // Below the threshold a non-star family may win; that is not a counterexample.
    let v = golden(
        "extremal_complete5_k3_t2",
        &[
            "extremal",
            &corpus("complete_05.facets"),
            "--k",
            "3",
            "--t",
            "2",
        ],
        0,
    );
    assert_eq!(v["results"]["verdict"]["max_size"], 4);
    assert_eq!(v["results"]["verdict"]["star_optimal"], false);
    assert_eq!(v["results"]["verdict"]["borg_threshold_met"], false);
}

#[test]
fn extremal_budget_exit_code() {
    let r = run(&[
        "extremal",
        &corpus("complete_14.facets"),
        "--k",
        "7",
        "--t",
        "1",
        "--budget",
        "5",
    ]);
    assert_eq!(r.code, 4);
    let v = json(&r);
    assert_eq!(v["status"], "budget_exhausted");
    assert_eq!(v["violations"][0]["check"], "budget");
}

#[test]
fn montecarlo_examples() {
    let v = golden(
        "montecarlo_triple",
        &[
            "montecarlo",
            &fixture("triple.facets"),
            "--r",
            "1",
            "--m",
            "0.25",
            "--delta",
            "2",
            "--seed",
            "7",
        ],
        0,
    );
    let o = &v["results"]["outcome"];
    let est = o["estimate"].as_f64().unwrap();
    let se = o["std_err"].as_f64().unwrap();
    assert!((est - 0.125).abs() <= 3.0 * se);
    assert_eq!(o["vacuous"], true);

    let v = golden(
        "montecarlo_two_color",
        &[
            "montecarlo",
            &fixture("one.facets"),
            "--two-color",
            &fixture("two.facets"),
            "--seed",
            "7",
        ],
        0,
    );
    let both = &v["results"]["both"];
    let est = both["estimate"].as_f64().unwrap();
    assert!((est - 0.25).abs() <= 3.0 * both["std_err"].as_f64().unwrap());
}

#[test]
fn montecarlo_rejects_unspread_family() {
    let r = run(&[
        "montecarlo",
        &fixture("triple.facets"),
        "--r",
        "2",
        "--p",
        "1",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not 2-spread"), "{}", r.stderr);
}

#[test]
fn plan_examples() {
    let v = golden(
        "plan_2_32",
        &["plan", "--n", "4294967296", "--k", "2", "--t", "1"],
        0,
    );
    let p = &v["results"];
    assert_eq!(p["q"], 264);
    assert_eq!(p["r0"], "2147483648");
    for flag in [
        "hyp_n_vs_klogk",
        "hyp_n_vs_tklog2",
        "cond_r_ge_2q",
        "cond_r_gt_spreadgate",
        "cond_q_ge_t",
    ] {
        assert_eq!(p[flag], true, "{flag}");
    }
    let v = golden(
        "plan_2_26",
        &["plan", "--n", "67108864", "--k", "2", "--t", "1"],
        0,
    );
    assert_eq!(v["results"]["hyp_n_vs_tklog2"], false);

    let r = run(&["plan", "--n", "4", "--k", "4", "--t", "1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["analyze"]).code, 2);
    assert_eq!(run(&["plan", "--n", "x", "--k", "2", "--t", "1"]).code, 2);
    assert_eq!(run(&["analyze", "/nonexistent/file.facets"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
}

#[test]
fn table_format_is_readable() {
    let r = run(&[
        "--format",
        "table",
        "plan",
        "--n",
        "4294967296",
        "--k",
        "2",
        "--t",
        "1",
    ]);
    assert_eq!(r.code, 0);
    assert!(r
        .stdout
        .lines()
        .any(|l| l.starts_with("results.q") && l.ends_with("264")));
}

#[test]
fn timing_is_opt_in() {
    let args = ["plan", "--n", "1024", "--k", "2", "--t", "1"];
    assert_eq!(json(&run(&args))["runtime_ms"], 0);
    let mut with = vec!["--timing"];
    with.extend(args);
    assert!(json(&run(&with))["runtime_ms"].is_u64());
}

#[test]
fn verify_shipped_corpus_passes() {
    let dir = corpus_dir().display().to_string();
    let v = golden("verify_corpus", &["verify", "--corpus", &dir], 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["results"]["totals"]["instances"], 60);
    assert!(
        v["results"]["totals"]["restriction_samples"]
            .as_u64()
            .unwrap()
            >= 1000
    );
}

#[test]
fn verify_is_thread_count_independent() {
    let dir = corpus_dir().display().to_string();
    let one = run_with(&["verify", "--corpus", &dir, "--samples", "5"], Some("1"));
    let four = run_with(&["verify", "--corpus", &dir, "--samples", "5"], Some("4"));
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, four.stdout);
}

fn copy_instance(dir: &Path, name: &str) {
    for ext in ["facets", "expect.json"] {
        let file = format!("{name}.{ext}");
        std::fs::copy(corpus_dir().join(&file), dir.join(&file)).unwrap();
    }
}

#[test]
fn verify_flags_corrupted_golden() {
    let tmp = tempfile::tempdir().unwrap();
    copy_instance(tmp.path(), "complete_05");
    copy_instance(tmp.path(), "complete_06");
    let golden = tmp.path().join("complete_06.expect.json");
    let text = std::fs::read_to_string(&golden).unwrap();
    let corrupted = text.replace("[6,15,20,15,6,1]", "[6,15,21,15,6,1]");
    assert_ne!(text, corrupted);
    std::fs::write(&golden, corrupted).unwrap();

    let r = run(&["verify", "--corpus", &tmp.path().display().to_string()]);
    assert_eq!(r.code, 5);
    let v = json(&r);
    assert_eq!(v["status"], "fail");
    let checks: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["check"].as_str().unwrap())
        .collect();
    assert_eq!(checks, ["golden:layer_sizes"]);
    assert_eq!(v["violations"][0]["witness"]["instance"], "complete_06");
}

#[test]
fn verify_empty_corpus_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(&["verify", "--corpus", &tmp.path().display().to_string()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no .facets or .graph files"));
}

#[test]
fn generated_corpus_matches_shipped_files() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(&["gen-corpus", &tmp.path().display().to_string(), "--expect"]);
    assert_eq!(r.code, 0);
    let mut generated: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    generated.sort();
    assert_eq!(generated.len(), 120);
    for name in generated {
        let fresh = std::fs::read(tmp.path().join(&name)).unwrap();
        let shipped = std::fs::read(corpus_dir().join(&name))
            .unwrap_or_else(|_| panic!("{name:?} missing from corpus/"));
        assert_eq!(fresh, shipped, "{name:?} differs from the shipped copy");
    }
}

#[test]
fn reports_carry_the_schema_keys() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(manifest().join("../../docs/report.schema.json")).unwrap(),
    )
    .unwrap();
    let mut required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    required.sort();
    let report = json(&run(&["plan", "--n", "1024", "--k", "2", "--t", "1"]));
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    assert_eq!(keys, required);
}
