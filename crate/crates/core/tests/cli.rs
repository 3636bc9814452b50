use std::path::PathBuf;
use std::process::Command;

use fpmod::cli::{run_command, Outcome};
use serde_json::{json, Value};

fn write_input(name: &str, doc: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fpmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, doc.to_string()).unwrap();
    p
}

fn run_doc(name: &str, cmd: &str, doc: &Value, extra: &[&str]) -> Outcome {
    let p = write_input(name, doc);
    let mut argv = vec!["fpmod".to_string(), cmd.to_string(), "--input".into(), p.display().to_string()];
    argv.extend(extra.iter().map(|s| s.to_string()));
    run_command(argv)
}

fn m(rows: usize, cols: usize, entries: &[&[i64]]) -> Value {
    let e: Vec<Vec<String>> = entries.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
    json!({ "rows": rows, "cols": cols, "entries": e })
}

#[test]
fn snf_of_diag_2_3() {
    let doc = json!({ "ring": {"kind": "Integers"}, "params": { "matrix": m(2, 2, &[&[2, 0], &[0, 3]]) } });
    let o = run_doc("snf", "snf", &doc, &[]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output["invariant_factors"], json!(["1", "6"]));
}

#[test]
fn doubling_does_not_dominate_the_identity() {
    let doc = json!({
        "ring": {"kind": "Integers"},
        "modules": { "Z": m(1, 0, &[&[]]) },
        "morphisms": {
            "f": { "source": "Z", "target": "Z", "mat": m(1, 1, &[&[2]]) },
            "g": { "source": "Z", "target": "Z", "mat": m(1, 1, &[&[1]]) }
        },
        "params": { "f": "f", "g": "g" }
    });
    let o = run_doc("dominates", "dominates", &doc, &[]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output["dominates"], json!(false));
    assert_eq!(o.output["pushout_agrees"], json!(true));
    let swapped = {
        let mut d = doc.clone();
        d["params"] = json!({ "f": "g", "g": "f" });
        d
    };
    let o = run_doc("dominates-swapped", "dominates", &swapped, &[]);
    assert_eq!((o.output["dominates"].clone(), o.output["factor"]["entries"].clone()), (json!(true), json!([["2"]])));
}

#[test]
fn malformed_json_reports_a_position() {
    let dir = std::env::temp_dir().join(format!("fpmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.json");
    std::fs::write(&p, "{\n  \"ring\": {\"kind\": \"Integers\"}\n  \"modules\": {}\n}\n").unwrap();
    let o = run_command(["fpmod", "invariants", "--input", p.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert_eq!(o.output["error"]["clause"], json!("MalformedJson"));
    assert!(o.output["error"]["location"].as_str().unwrap().starts_with("line 3"));
    std::fs::write(&p, "{\"ring\": {\"kind\": \"Integers\"}, \"modules\": []}").unwrap();
    let o = run_command(["fpmod", "invariants", "--input", p.to_str().unwrap()]);
    assert_eq!((o.code, o.output["error"]["clause"].clone()), (2, json!("SchemaViolation")));
}

#[test]
fn input_errors_exit_with_two() {
    let ill = json!({
        "ring": {"kind": "Integers"},
        "modules": { "A": m(1, 1, &[&[2]]), "B": m(1, 1, &[&[3]]) },
        "morphisms": { "f": { "source": "A", "target": "B", "mat": m(1, 1, &[&[1]]) } }
    });
    let o = run_doc("ill", "univinj", &ill, &[]);
    assert_eq!(o.code, 2);
    assert_eq!(o.output["error"]["clause"], json!("NotWellDefined"));
    assert_eq!(o.output["error"]["location"], json!("morphisms.f"));

    let two = json!({ "ring": {"kind": "Integers"}, "modules": { "A": m(1, 0, &[&[]]), "B": m(1, 0, &[&[]]) } });
    let o = run_doc("ambiguous", "invariants", &two, &[]);
    assert_eq!((o.code, o.output["error"]["clause"].clone()), (2, json!("MissingParameter")));

    let o = run_command(["fpmod", "frobnicate"]);
    assert_eq!((o.code, o.output["error"]["clause"].clone()), (2, json!("UsageError")));

    let z6 = json!({ "ring": {"kind": "IntegersMod", "n": 6}, "modules": { "M": m(1, 0, &[&[]]) },
        "params": { "module": "M", "psi": m(1, 1, &[&[1]]), "n": m(1, 0, &[&[]]) } });
    let o = run_doc("enlarge-z6", "enlarge-free", &z6, &[]);
    assert_eq!((o.code, o.output["error"]["clause"].clone()), (2, json!("UnsupportedRing")));
}

#[test]
fn modules_and_towers() {
    let doc = json!({
        "ring": {"kind": "Integers"},
        "modules": { "M": m(2, 2, &[&[2, 0], &[0, 0]]), "N": m(1, 1, &[&[4]]) },
        "params": { "source": "M", "target": "N", "left": "M", "right": "N" }
    });
    let o = run_doc("hom", "hom", &doc, &[]);
    assert_eq!(o.output["module"]["invariants"], json!({ "torsion": ["2", "4"], "free_rank": 0 }));
    let o = run_doc("tensor", "tensor", &doc, &[]);
    assert_eq!(o.output["module"]["invariants"], json!({ "torsion": ["2", "4"], "free_rank": 0 }));

    let towers = json!({
        "ring": {"kind": "IntegersMod", "n": 4},
        "modules": { "R": m(1, 0, &[&[]]) },
        "towers": { "T": { "object": "R", "step": m(1, 1, &[&[2]]), "direction": "forward" },
                    "S": { "object": "R", "step": m(1, 1, &[&[2]]), "direction": "backward" } },
        "params": { "tower": "T" }
    });
    let o = run_doc("ml", "ml-tower", &towers, &["--horizon", "20"]);
    assert_eq!((o.output["status"].clone(), o.output["level"].clone()), (json!("ML"), json!(2)));
    let mut back = towers.clone();
    back["params"]["tower"] = json!("S");
    let o = run_doc("stab", "inv-stab", &back, &[]);
    assert_eq!((o.output["status"].clone(), o.output["level"].clone()), (json!("ML"), json!(2)));
    let o = run_doc("wrong-direction", "inv-stab", &towers, &[]);
    assert_eq!(o.code, 2);
}

#[test]
fn projectivity_commands() {
    let doc = json!({ "ring": {"kind": "IntegersMod", "n": 6}, "modules": { "M": m(1, 1, &[&[2]]) } });
    for (cmd, key) in [("projtest", "projective"), ("flattest", "flat"), ("projchar", "projective")] {
        let o = run_doc(cmd, cmd, &doc, &[]);
        assert_eq!((o.code, o.output[key].clone()), (0, json!(true)), "{cmd}");
    }
    let q = json!({
        "map": { "source": {"kind": "Integers"}, "target": {"kind": "Rationals"} },
        "modules": { "M": m(1, 1, &[&[2]]) },
        "params": { "mode": "projectivity" }
    });
    let o = run_doc("descend-q", "descend", &q, &[]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output["equivalence_holds"], json!(false));
    assert!(o.output["counterexample_flag"].is_string());

    let gens = json!({
        "map": { "source": {"kind": "Integers"}, "target": {"kind": "GaussianIntegers"} },
        "modules": { "P": m(1, 1, &[&[6]]) },
        "params": { "mode": "generators", "generators": [[{ "scalar": {"re": "0", "im": "1"}, "vector": ["1"] }]] }
    });
    let o = run_doc("descend-gens", "descend", &gens, &[]);
    assert_eq!(o.output["components"], json!([["0"], ["1"]]));
}

#[test]
fn pushout_and_devissage_commands() {
    let doc = json!({
        "ring": {"kind": "Integers"},
        "modules": { "Z": m(1, 0, &[&[]]) },
        "morphisms": { "two": { "source": "Z", "target": "Z", "mat": m(1, 1, &[&[2]]) },
                       "three": { "source": "Z", "target": "Z", "mat": m(1, 1, &[&[3]]) } },
        "params": { "f": "two", "g": "three", "module": "Z" }
    });
    let o = run_doc("pushout", "pushout", &doc, &[]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output["commutes"], json!(true));
    assert_eq!(o.output["object"]["invariants"], json!({ "torsion": [], "free_rank": 1 }));

    let dev = json!({
        "ring": {"kind": "IntegersMod", "n": 6},
        "modules": { "R": m(1, 0, &[&[]]) },
        "params": { "mode": "filtration", "stages": [m(1, 0, &[&[]]), m(1, 1, &[&[3]]), m(1, 1, &[&[1]])],
                    "complements": [m(1, 1, &[&[3]]), m(1, 1, &[&[2]])] }
    });
    let o = run_doc("filtration", "devissage", &dev, &[]);
    assert_eq!(o.output["valid"], json!(true));
    assert_eq!(o.output["decomposition"]["parts"].as_array().unwrap().len(), 2);
    let mut bad = dev.clone();
    bad["params"]["stages"][1] = m(1, 1, &[&[2]]);
    let o = run_doc("bad-filtration", "devissage", &bad, &[]);
    assert_eq!(o.output["valid"], json!(false));
}

#[test]
fn harness_with_zero_trials_is_empty() {
    let o = run_command(["fpmod", "harness", "--seed", "42", "--trials", "0"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output["suites"], json!([]));
    assert_eq!(o.output["total_failures"], json!(0));
}

#[test]
fn harness_over_integers_is_clean_and_deterministic() {
    let argv = ["fpmod", "harness", "--seed", "42", "--trials", "200", "--rings", "Integers"];
    let a = run_command(argv);
    assert_eq!(a.code, 0, "{}", a.output);
    assert_eq!(a.output["total_failures"], json!(0));
    let b = run_command(argv.iter().copied().chain(["--parallelism", "4"]));
    assert_eq!(fpmod::cli::render(&a), fpmod::cli::render(&b));
}

#[test]
fn corrupted_decider_is_caught_shrunk_and_replayable() {
    let o = run_command([
        "fpmod", "harness", "--seed", "5", "--trials", "60", "--suites", "projchar", "--rings", "Integers", "--fault",
        "flat-free-summand",
    ]);
    assert_eq!(o.code, 1);
    let suite = &o.output["suites"][0];
    assert!(suite["failed"].as_u64().unwrap() > 0);
    let f = &suite["failures"][0];
    assert!(f["shrink_steps"].as_u64().unwrap() > 0);
    let ce = &f["counterexample"];
    let entries = ce["matrices"][0]["matrix"]["entries"].as_array().unwrap();
    // Z ⊕ Z/2 is the smallest module with a free summand that is not flat
    assert_eq!(ce["dims"][0]["size"], json!(2));
    assert_eq!(entries.len(), 2);
    let replay = run_doc("counterexample", "harness", ce, &[]);
    assert_eq!(replay.code, 1);
    assert_eq!(replay.output["failures"], json!(1));
    let whole = run_doc("report", "harness", &o.output, &[]);
    assert_eq!(whole.code, 1);
    let mut healed = ce.clone();
    healed["fault"] = Value::Null;
    assert_eq!(run_doc("healed", "harness", &healed, &[]).code, 0);
}

#[test]
fn binary_reads_the_seed_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_fpmod");
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(bin);
        c.args(["harness", "--trials", "3", "--suites", "snf"]).args(args);
        if let Some(s) = env {
            c.env("FPMOD_SEED", s);
        } else {
            c.env_remove("FPMOD_SEED");
        }
        let out = c.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stderr).contains("wall-clock"));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let from_env = run(Some("7"), &[]);
    assert_eq!(from_env["config"]["seed"], json!("7"));
    assert_eq!(from_env, run(None, &["--seed", "7"]));
    assert_eq!(run(Some("7"), &["--seed", "9"])["config"]["seed"], json!("9"));

    let out = Command::new(bin).args(["snf"]).stdin(std::process::Stdio::null()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
