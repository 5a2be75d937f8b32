use std::path::PathBuf;

use serde_json::Value;

use robustftap::cli::run;
use robustftap::rational::{int, parse_rational, rat};
use robustftap::Rational;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("robustftap").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn q(v: &Value) -> Rational {
    parse_rational(v.as_str().expect("rational string")).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn nra_holds_on_instance_a() {
    let r = cli(&["check-nra", &fixture("instance_a.json"), "--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["result"]["nra"], true);
    assert_eq!(v["result"]["certificates"].as_array().unwrap().len(), 2);
    assert_eq!(v["command"][0], "check-nra");
}

#[test]
fn arbitrage_exits_two_with_witness() {
    let r = cli(&["check-nra", &fixture("arbitrage.json"), "--json"]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["result"]["nra"], false);
    assert_eq!(v["result"]["witness"]["kind"], "arbitrage_witness");
}

#[test]
fn text_summary_by_default() {
    let r = cli(&["check-nra", &fixture("instance_a.json")]);
    assert_eq!(r.stdout, "NRA holds\ncertificates: 2\n");
}

#[test]
fn classical_na_fails_per_model_on_instance_b() {
    for theta in ["theta1", "theta2"] {
        let r = cli(&["na", &fixture("instance_b.json"), "--theta", theta, "--json"]);
        assert_eq!(r.code, 2, "{theta}");
        assert_eq!(r.json()["result"]["holds"], false);
    }
    let r = cli(&["check-nra", &fixture("instance_b.json")]);
    assert_eq!(r.code, 0);
}

#[test]
fn unknown_theta_is_an_input_error() {
    let r = cli(&["na", &fixture("instance_b.json"), "--theta", "nope"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("nope"), "{}", r.stderr);
}

#[test]
fn superhedge_and_bounds_on_instance_a() {
    let r = cli(&["superhedge", &fixture("instance_a.json"), "--claim", "maxstock", "--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(q(&v["result"]["price"]), int(2));
    assert_eq!(q(&v["result"]["strategy"][0]["position"][0]), int(1));

    let r = cli(&["subhedge", &fixture("instance_a.json"), "--claim", "maxstock", "--json"]);
    assert_eq!(q(&r.json()["result"]["price"]), int(1));

    let r = cli(&["bounds", &fixture("instance_a.json"), "--claim", "maxstock", "--json"]);
    let v = r.json();
    assert_eq!((q(&v["result"]["lo"]), q(&v["result"]["hi"])), (int(1), int(2)));
    assert_eq!(v["result"]["point"], false);
}

#[test]
fn options_collapse_the_bounds() {
    let args = ["bounds", &fixture("instance_a.json"), "--claim", "maxstock", "--with-options", "--json"];
    let v = cli(&args).json();
    assert_eq!(q(&v["result"]["lo"]), rat(3, 2));
    assert_eq!(q(&v["result"]["hi"]), rat(3, 2));

    let r = cli(&["calibrate", &fixture("instance_a.json"), "--claim", "maxstock", "--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(q(&v["result"]["uncalibrated"]["hi"]), int(2));
    assert_eq!(q(&v["result"]["calibrated"]["hi"]), rat(3, 2));
    assert_eq!(q(&v["result"]["superhedge"]["price"]), rat(3, 2));
}

#[test]
fn calibrate_without_options_is_rejected() {
    let r = cli(&["calibrate", &fixture("instance_b.json"), "--claim", "stock"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("$.options"), "{}", r.stderr);
}

#[test]
fn completeness_verdicts() {
    assert_eq!(cli(&["complete", &fixture("binomial.json")]).code, 0);
    let r = cli(&["complete", &fixture("instance_a.json"), "--json"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["result"]["complete"], false);
}

#[test]
fn binomial_call_replicates() {
    let r = cli(&["replicate", &fixture("binomial.json"), "--claim", "call", "--json"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(q(&v["result"]["initial"]), rat(1, 2));
    assert_eq!(q(&v["result"]["strategy"][0]["position"][0]), rat(1, 2));

    let r = cli(&["replicate", &fixture("instance_a.json"), "--claim", "maxstock"]);
    assert_eq!(r.code, 2);
}

#[test]
fn dp_value_exceeds_global_price() {
    let toy = fixture("toy_two_period.json");
    let dp = cli(&["dp-price", &toy, "--claim", "terminal", "--json"]).json();
    let sup = cli(&["superhedge", &toy, "--claim", "terminal", "--json"]).json();
    assert_eq!(q(&dp["result"]["value"]), int(2));
    assert_eq!(q(&sup["result"]["price"]), int(1));
}

#[test]
fn condexp_reports_an_affine_set() {
    let r = cli(&["condexp", &fixture("toy_two_period.json"), "--claim", "terminal", "--time", "1", "--theta", "theta1", "--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["result"]["kernel_basis"].as_array().unwrap().len(), 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["bounds", &fixture("instance_a.json"), "--claim", "maxstock", "--json"];
    assert_eq!(without_timing(cli(&args).json()), without_timing(cli(&args).json()));
}

#[test]
fn every_report_round_trips_through_verify_system() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("instance_a.json", vec!["check-nra"]),
        ("instance_a.json", vec!["check-nra", "--with-options"]),
        ("instance_a.json", vec!["bounds", "--claim", "maxstock"]),
        ("instance_a.json", vec!["calibrate", "--claim", "maxstock"]),
        ("instance_b.json", vec!["pricing-system", "--theta", "theta2"]),
        ("binomial.json", vec!["bounds", "--claim", "call"]),
        ("toy_two_period.json", vec!["check-nra"]),
        ("arbitrage.json", vec!["check-nra"]),
    ];
    for (i, (file, args)) in cases.iter().enumerate() {
        let market = fixture(file);
        let report = dir.path().join(format!("r{i}.json"));
        let report = report.to_str().unwrap();
        let mut argv = vec![args[0], market.as_str()];
        argv.extend(&args[1..]);
        argv.extend(["--report", report]);
        let first = cli(&argv);
        assert_ne!(first.code, 1, "{file} {args:?}: {}", first.stderr);
        let r = cli(&["verify-system", &market, "--file", report, "--json"]);
        assert_eq!(r.code, 0, "{file} {args:?}: {}", r.stdout);
        assert_eq!(r.json()["result"]["all_valid"], true);
    }
}

#[test]
fn tampered_certificate_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let market = fixture("instance_b.json");
    let r = cli(&["pricing-system", &market, "--theta", "theta1", "--json"]);
    let mut v = r.json();
    let weights = v["result"]["system"]["weights"].as_array_mut().unwrap();
    let w = weights.iter_mut().find(|w| w["q"] != "0/1").unwrap();
    w["q"] = Value::String("7/1".into());
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let r = cli(&["verify-system", &market, "--file", path.to_str().unwrap()]);
    assert_eq!(r.code, 2, "{}", r.stdout);
    assert!(r.stdout.starts_with("FAIL"), "{}", r.stdout);
}

#[test]
fn toy_expand_preserves_the_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy_two_period.json");
    let expanded = dir.path().join("expanded.json");
    let expanded = expanded.to_str().unwrap();
    assert_eq!(cli(&["toy", "expand", &toy, "-o", expanded]).code, 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(expanded).unwrap()).unwrap();
    assert!(doc.get("toy").is_none());
    assert_eq!(doc["space"]["outcomes"].as_array().unwrap().len(), 4);
    for file in [toy.as_str(), expanded] {
        let v = cli(&["superhedge", file, "--claim", "terminal", "--json"]).json();
        assert_eq!(q(&v["result"]["price"]), int(1));
    }
}

#[test]
fn bad_partition_names_its_path() {
    let r = cli(&["check-nra", &fixture("bad_partition.json")]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("$.space.partitions[1]"), "{}", r.stderr);
}

#[test]
fn missing_file_and_bad_args() {
    let r = cli(&["check-nra", "/nonexistent/market.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("market.json"));
    assert_eq!(cli(&["bounds", &fixture("instance_a.json")]).code, 1);
    assert_eq!(cli(&["bounds", &fixture("instance_a.json"), "--claim", "nope"]).code, 1);
}
