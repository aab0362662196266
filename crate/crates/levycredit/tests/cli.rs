//! End-to-end checks of the command-line surface: exit codes, error JSON,
//! output invariants.

use levycredit::cli::run_command;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["levycredit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_command(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fixture(name: &str) -> String {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn price_reproduces_reference_scenario() {
    let (code, out, _) = run(&[
        "price", "--model", "symvg", "--sigma", "0.2402", "--nu", "3.2453", "--va", "11666.7",
        "--k", "4998", "--t", "1", "--r", "0", "--nmax", "15",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "6676.847");
}

#[test]
fn price_binary_smoke() {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_levycredit"))
        .args([
            "price", "--model", "neggamma", "--lambda", "3.280", "--rho", "0.888", "--va",
            "180913", "--k", "16196", "--t", "1", "--r", "0",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), "164717.454");
}

#[test]
fn pd_certain_default_prints_probability_one() {
    let (code, out, _) = run(&[
        "pd", "--model", "neggamma", "--lambda", "3.0", "--rho", "0.8", "--va", "50", "--k",
        "100", "--r", "0", "--horizons", "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("probability=1.000000"), "{out}");
    assert!(out.contains("(100.00%)"), "{out}");
}

#[test]
fn pd_table_rows_match_reference() {
    let (code, out, _) = run(&[
        "pd", "--model", "neggamma", "--lambda", "3.280", "--rho", "0.888", "--va", "180913",
        "--k", "16196", "--r", "0", "--horizons", "1,5",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("probability=0.000121"), "{out}");
    assert!(out.contains("probability=0.004669"), "{out}");
}

#[test]
fn pd_actual_measure_needs_drift() {
    let (code, _, err) = run(&[
        "pd", "--model", "merton", "--sigma", "0.3", "--va", "120", "--k", "100", "--r", "0.01",
        "--horizons", "1", "--measure", "both",
    ]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "domain");
    let (code, out, _) = run(&[
        "pd", "--model", "merton", "--sigma", "0.3", "--va", "120", "--k", "100", "--r", "0.01",
        "--horizons", "1", "--measure", "both", "--rbar", "0.05",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("measure=risk-neutral") && out.contains("measure=actual"));
}

#[test]
fn calibrate_fixture_emits_params_json() {
    let tmp = tempfile::tempdir().unwrap();
    let params_path = tmp.path().join("params.json");
    let assets_path = tmp.path().join("assets.csv");
    let (code, out, _) = run(&[
        "calibrate", "--model", "neggamma", "--equity-csv", &fixture("sap_gy_synthetic.csv"),
        "--k", "16196", "--t", "1", "--r", "0",
        "--params-out", params_path.to_str().unwrap(),
        "--assets-out", assets_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["converged"], true);
    assert!(v["results"][0]["params"]["lambda"].as_f64().unwrap() > 0.0);
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&params_path).unwrap()).unwrap();
    assert_eq!(v, on_disk);
    let assets = std::fs::read_to_string(&assets_path).unwrap();
    assert!(assets.starts_with("date,implied_asset\n"));
    assert_eq!(assets.lines().count(), 253);
}

#[test]
fn calibrate_non_convergence_exits_three_with_json() {
    let (code, _, err) = run(&[
        "calibrate", "--config", &fixture("sap_gy.toml"), "--max-iter", "1", "--tolerance",
        "1e-12",
    ]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "not-converged");
}

#[test]
fn calibrate_rejects_malformed_input() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "date,value\n2020-01-01,100\n2020-01-02,-5\n").unwrap();
    let (code, _, err) = run(&[
        "calibrate", "--model", "merton", "--equity-csv", bad.to_str().unwrap(), "--k", "10",
        "--t", "1", "--r", "0",
    ]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "nonpositive-price");
    assert!(v["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn unknown_flags_exit_two() {
    let (code, _, err) = run(&["price", "--frobnicate"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(v["error"], "usage");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("term-structure"));
}

#[test]
fn term_structure_is_monotone_and_bounded() {
    let (code, out, _) = run(&[
        "term-structure", "--model", "neggamma", "--lambda", "3.230", "--rho", "0.612", "--va",
        "11658", "--k", "4998", "--r", "0", "--max-t", "10", "--points", "40",
    ]);
    assert_eq!(code, 0);
    let mut horizons = Vec::new();
    let mut probs = Vec::new();
    for line in out.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        horizons.push(cols[0].parse::<f64>().unwrap());
        probs.push(cols[2].parse::<f64>().unwrap());
    }
    assert_eq!(horizons.len(), 40);
    assert!(horizons.windows(2).all(|w| w[1] > w[0]));
    assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
    // the one-sided term structure grows with horizon on this scenario
    assert!(probs.last().unwrap() > probs.first().unwrap());
}

#[test]
fn identical_invocations_are_bit_identical() {
    let args = [
        "mc-validate", "--model", "negig", "--lambda", "1.8", "--mu", "0.45", "--va", "150",
        "--k", "100", "--t", "1", "--r", "0.01", "--paths", "20000", "--seed", "7",
    ];
    let (c1, out1, _) = run(&args);
    let (c2, out2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
    assert!(out1.contains("martingale_mean"));
    // closed form and Monte Carlo stay within a few standard errors
    let pd_line = out1.lines().find(|l| l.starts_with("default_probability")).unwrap();
    let z: f64 = pd_line.rsplit(',').next().unwrap().parse().unwrap();
    assert!(z.abs() <= 4.0, "{pd_line}");
}

#[test]
fn sweep_maturity_emits_stable_parameters() {
    let (code, out, _) = run(&[
        "sweep-maturity", "--config", &fixture("sap_gy.toml"), "--maturities", "1,5",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "ticker,model,maturity,params,iterations,converged,actual_drift");
    // 3 models x 2 maturities
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.contains(",true,")));
}

#[test]
fn data_dir_env_resolves_bare_filenames() {
    // only this test touches the variable; every other test passes
    // absolute paths, which never consult it
    std::env::set_var("LEVYCREDIT_DATA_DIR", fixture(""));
    let (code, out, _) = run(&[
        "calibrate", "--model", "merton", "--equity-csv", "sap_gy_synthetic.csv", "--k",
        "16196", "--t", "1", "--r", "0",
    ]);
    std::env::remove_var("LEVYCREDIT_DATA_DIR");
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["converged"], true);
}

#[test]
fn pd_from_config_reports_both_measures() {
    let (code, out, _) = run(&["pd", "--config", &fixture("get_fp.toml")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("GET FP"));
    assert!(out.contains("measure=risk-neutral"));
    assert!(out.contains("measure=actual"));
    assert!(out.contains("model=symvg"));
}
