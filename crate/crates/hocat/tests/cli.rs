//! End-to-end runs of the hocat binary: exit codes, report shapes, failure
//! messages and determinism. Fixtures that corrupt shipped instances are
//! written to the cargo tmp dir at runtime.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("instances")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hocat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn report(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("json report")
}

fn tmp_file(name: &str, content: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, content).unwrap();
    path
}

/// Shipped instance with some top-level JSON keys rewritten.
fn corrupted(name: &str, out: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let text = fs::read_to_string(instance(name)).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    edit(&mut v);
    tmp_file(out, &serde_json::to_string_pretty(&v).unwrap())
}

fn str_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_passes_on_a_model_instance() {
    let out = run(&["validate", "--instance", str_arg(&instance("triv_diamond"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("axiom: lifting_cof_trivfib"));
}

#[test]
fn validate_rejects_a_partial_composition_table() {
    let path = corrupted("arrow_w", "arrow_partial.json", |v| {
        let comp = v["composition"].as_array_mut().unwrap();
        comp.pop();
    });
    let out = run(&["validate", "--instance", str_arg(&path)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("composition table is partial"));
}

#[test]
fn validate_fails_on_a_corrupted_fibration_class() {
    let path = corrupted("collapse_diamond", "collapse_fib_all.json", |v| {
        let all: Vec<Value> = v["morphisms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["id"].clone())
            .collect();
        v["classes"]["Fib"] = Value::Array(all);
    });
    let out = run(&["validate", "--instance", str_arg(&path), "--format", "json"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["verdict"], "fail");
    let cex = r["counterexamples"][0].as_str().unwrap();
    assert!(cex.contains("square"), "counterexample names the square: {cex}");
}

#[test]
fn localize_inverts_the_arrow_into_an_iso_pair() {
    let out = run(&[
        "build",
        "localize",
        "--instance",
        str_arg(&instance("arrow_w")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["detail"]["category"]["n_objects"], 2);
    assert_eq!(r["detail"]["category"]["n_morphisms"], 4);

    // the embedded snapshot is itself a valid instance
    let snap = serde_json::to_string_pretty(&r["detail"]["localized_instance"]).unwrap();
    let path = tmp_file("arrow_localized.json", &snap);
    let out2 = run(&["validate", "--instance", str_arg(&path)]);
    assert_eq!(code(&out2), 0, "{}", stderr(&out2));
}

#[test]
fn localize_collapses_the_chain_to_seven_morphisms() {
    let out = run(&[
        "build",
        "localize",
        "--instance",
        str_arg(&instance("chain3_w")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["detail"]["category"]["n_morphisms"], 7);
}

#[test]
fn ho_build_reports_the_diamond_hom_table() {
    let out = run(&[
        "build",
        "ho",
        "--instance",
        str_arg(&instance("triv_diamond")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["detail"]["category"]["n_objects"], 4);
    assert_eq!(r["detail"]["route"], "q");
    // trivial model: the homotopy category keeps all nine morphisms
    assert_eq!(r["detail"]["category"]["n_morphisms"], 9);
}

#[test]
fn ho_routes_can_be_forced() {
    for route in ["q", "ctilde"] {
        let out = run(&[
            "build",
            "ho",
            "--instance",
            str_arg(&instance("qshift")),
            "--route",
            route,
            "--format",
            "json",
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(report(&out)["detail"]["route"], route);
    }
}

#[test]
fn small_budgets_refuse_with_exit_three() {
    let out = run(&[
        "build",
        "localize",
        "--instance",
        str_arg(&instance("triv_z2plus")),
        "--budget",
        "200",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("verdict: refused"));
    assert!(stdout(&out).contains("budget exceeded"));
}

#[test]
fn classify_marks_the_identity_witness_fully_verified() {
    let out = run(&[
        "classify",
        "identity",
        "--instance",
        str_arg(&instance("iso2_w")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let flags = &report(&out)["detail"]["flags"];
    for notion in ["faint", "weak", "strong", "strict"] {
        assert!(flags[notion].get("Verified").is_some(), "{notion} verified");
    }
}

#[test]
fn classify_separates_the_kan_and_quillen_witnesses() {
    let hok = run(&[
        "classify",
        "hok",
        "--instance",
        str_arg(&instance("collapse_diamond")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&hok), 0);
    let flags = report(&hok)["detail"]["flags"].clone();
    assert!(flags["weak"].get("Verified").is_some());
    assert!(flags["strong"].get("Refuted").is_some());

    // the collapsed localization is codiscrete, which makes the battery
    // checks against loc itself heavy; the default budget refuses
    let refused = run(&[
        "classify",
        "ho",
        "--instance",
        str_arg(&instance("collapse_diamond")),
    ]);
    assert_eq!(code(&refused), 3);

    let ho = run(&[
        "classify",
        "ho",
        "--instance",
        str_arg(&instance("collapse_diamond")),
        "--budget",
        "100000000",
        "--format",
        "json",
    ]);
    assert_eq!(code(&ho), 0);
    let flags = report(&ho)["detail"]["flags"].clone();
    for notion in ["faint", "weak", "strong", "strict"] {
        assert!(flags[notion].get("Verified").is_some(), "{notion} verified");
    }
}

#[test]
fn derive_k_runs_both_routes_on_the_shift_instance() {
    let out = run(&[
        "derive",
        "k",
        "--instance",
        str_arg(&instance("qshift")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let routes = report(&out)["detail"]["routes"].as_array().unwrap().clone();
    assert_eq!(routes.len(), 2);
    assert_eq!(routes[0]["route"], "q");
    assert_eq!(routes[1]["route"], "ctilde");
    // Q-route extension moves a to b; the local route keeps it
    assert_eq!(routes[0]["extension"]["obj_map"]["a"], "b");
    assert_eq!(routes[1]["extension"]["obj_map"]["a"], "a");
}

#[test]
fn derive_f_and_s_agree_on_the_shift_instance() {
    let f = run(&[
        "derive",
        "f",
        "--instance",
        str_arg(&instance("qshift")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&f), 0);
    let rf = report(&f);
    assert_eq!(rf["detail"]["cofibrant_objects"], serde_json::json!(["z", "a", "b", "t"]));

    let s = run(&[
        "derive",
        "s",
        "--instance",
        str_arg(&instance("qshift")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&s), 0);
    let rs = report(&s);
    assert_eq!(rs["detail"]["extension"]["obj_map"]["a"], "b");
    assert_eq!(rs["detail"]["replacement_identity_checked"], 11);
}

#[test]
fn derive_names_the_offending_weak_equivalence() {
    // identity-shaped map: collapse marks bot_x as a weak equivalence, the
    // trivial model on the same table does not
    let src = fs::read_to_string(instance("collapse_diamond")).unwrap();
    let v: Value = serde_json::from_str(&src).unwrap();
    let obj_map: serde_json::Map<String, Value> = v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o.as_str().unwrap().to_string(), o.clone()))
        .collect();
    let mor_map: serde_json::Map<String, Value> = v["morphisms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["id"].as_str().unwrap().to_string(), m["id"].clone()))
        .collect();
    let ff = serde_json::json!({ "obj_map": obj_map, "mor_map": mor_map });
    let path = tmp_file("ident_shape.json", &serde_json::to_string_pretty(&ff).unwrap());

    for cmd in [["derive", "k"], ["derive", "f"], ["compare", "kf"]] {
        let out = run(&[
            cmd[0],
            cmd[1],
            "--instance",
            str_arg(&instance("collapse_diamond")),
            "--target-instance",
            str_arg(&instance("triv_diamond")),
            "--functor",
            str_arg(&path),
            "--format",
            "json",
        ]);
        assert_eq!(code(&out), 1, "{:?}", cmd);
        let r = report(&out);
        assert_eq!(r["verdict"], "fail");
        let cex = r["counterexamples"][0].as_str().unwrap();
        assert!(cex.contains("weak equivalence bot_x"), "{cex}");
    }
}

#[test]
fn constant_functor_compares_kf_across_instances() {
    let src = fs::read_to_string(instance("collapse_diamond")).unwrap();
    let v: Value = serde_json::from_str(&src).unwrap();
    let obj_map: serde_json::Map<String, Value> = v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o.as_str().unwrap().to_string(), "top".into()))
        .collect();
    let mor_map: serde_json::Map<String, Value> = v["morphisms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["id"].as_str().unwrap().to_string(), "id_top".into()))
        .collect();
    let ff = serde_json::json!({ "obj_map": obj_map, "mor_map": mor_map });
    let path = tmp_file("const_top.json", &serde_json::to_string_pretty(&ff).unwrap());

    let out = run(&[
        "compare",
        "kf",
        "--instance",
        str_arg(&instance("collapse_diamond")),
        "--target-instance",
        str_arg(&instance("triv_diamond")),
        "--functor",
        str_arg(&path),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["detail"]["equal"], true);
    assert_eq!(r["detail"]["certificate_rows"], 4);
}

#[test]
fn compare_ks_reports_the_route_comparison() {
    let out = run(&[
        "compare",
        "ks",
        "--instance",
        str_arg(&instance("qshift")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["detail"]["extensions_equal"], true);
    assert_eq!(r["detail"]["routes_coincide"], false);
    // the canonical comparison is the identity away from the moved object
    assert_eq!(r["detail"]["cross_route_iso"]["components"]["a"], "a>b[id_b]");
    assert_eq!(r["detail"]["cross_route_iso"]["components"]["z"], "z>z[id_z]");
}

#[test]
fn q_route_needs_the_replacement_sections() {
    let path = corrupted("triv_diamond", "triv_no_q.json", |v| {
        let obj = v.as_object_mut().unwrap();
        obj.remove("Q");
        obj.remove("R");
    });
    let out = run(&[
        "derive",
        "k",
        "--instance",
        str_arg(&path),
        "--route",
        "q",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no cofibrant replacement functor"));

    // the local route still works, and "both" degrades to it
    for route in ["ctilde", "both"] {
        let out = run(&[
            "derive",
            "k",
            "--instance",
            str_arg(&path),
            "--route",
            route,
        ]);
        assert_eq!(code(&out), 0, "route {route}: {}", stderr(&out));
    }
}

#[test]
fn missing_instance_flag_is_invalid_input() {
    let out = run(&["validate"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--instance is required"));
}

#[test]
fn reports_are_deterministic_across_reruns() {
    let inst = instance("qshift");
    let args = ["compare", "ks", "--instance", str_arg(&inst), "--format", "json"];
    let mut first = report(&run(&args));
    let mut second = report(&run(&args));
    first["elapsed_ms"] = Value::Null;
    second["elapsed_ms"] = Value::Null;
    assert_eq!(first, second);
}
