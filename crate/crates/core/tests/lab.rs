use fraclab::lab::*;
use fraclab::Error;

#[test]
fn minimal_config_fills_preset_defaults() {
    let cfg = load_config_str("scenario = \"compare\"\n").unwrap();
    assert_eq!(cfg, preset(Scenario::Compare));
    let cfg = load_config_str("scenario = \"decay-b\"\nseed = 3\n[frac]\nalpha = 0.7\n").unwrap();
    assert_eq!(cfg.seed, 3);
    assert_eq!(cfg.frac.alpha, 0.7);
    assert_eq!(cfg.frac.s, preset(Scenario::DecayB).frac.s);
}

#[test]
fn every_preset_satisfies_its_hypotheses() {
    for sc in Scenario::ALL {
        let cfg = preset(sc);
        cfg.validate().unwrap();
        check_hypotheses(&cfg).unwrap_or_else(|e| panic!("{sc}: {e}"));
        assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "scenario = \"decay-b\"\n\n[time]\nsteps = \"many\"\n";
    match parse_config(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    match parse_config("scenario = \"decay-z\"\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
    match parse_config("scenario = \"eigen\"\n[domain]\ncells = 16\nwidth = 2.0\n") {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 4);
            assert!(message.contains("width"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_config("scenario = \"eigen\"\n[frac]\ns = 1.5\n"), Err(Error::Parameter(_))));
}

#[test]
fn lambda_dependent_hypotheses_name_the_clause() {
    let err = load_config_str("scenario = \"blowup-a\"\n[reaction]\nmu = 50.0\n").unwrap_err();
    assert_eq!(err.to_string(), "blowup-a requires λ₁(Ω) ≥ μ");
    let err = load_config_str("scenario = \"global-a\"\n[reaction]\ngamma = 40.0\n").unwrap_err();
    assert_eq!(err.to_string(), "global-a requires 0 < γ + μ ≤ λ₁(Ω)");
    let err = load_config_str("scenario = \"blowup-c\"\n[reaction]\ngamma = -1.0\nmu = 1.0\n").unwrap_err();
    assert_eq!(err.to_string(), "blowup-c requires γ > 0, μ ≤ 0");
    let err = load_config_str("scenario = \"decay-c\"\n[reaction]\ngamma = 0.5\n").unwrap_err();
    assert!(matches!(err, Error::Hypothesis { .. }));
}

#[test]
fn global_e_condition_is_informational() {
    let cfg = preset(Scenario::GlobalE);
    let check = check_hypotheses(&cfg).unwrap();
    assert_eq!(check.info.len(), 1);
    assert!(check.lambda1.unwrap() > 0.0);
    assert!(!check.sp_above_dimension && !check.sp_below_dimension);
    let mut cfg = preset(Scenario::DecayB);
    cfg.frac.s = 0.3;
    assert!(check_hypotheses(&cfg).unwrap().sp_below_dimension);
    cfg.frac.p = 4.0;
    assert!(check_hypotheses(&cfg).unwrap().sp_above_dimension);
    let report = run_scenario(&cfg).unwrap();
    assert!(report.pass);
}

#[test]
fn reports_are_byte_stable_and_echo_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset(Scenario::DecayB);
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    let pa = emit_report(&a, Format::Json, &dir.path().join("a")).unwrap();
    let pb = emit_report(&b, Format::Json, &dir.path().join("b")).unwrap();
    let (ba, bb) = (std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    assert_eq!(ba, bb);
    let tree: serde_json::Value = serde_json::from_slice(&ba).unwrap();
    let echo: ScenarioConfig = serde_json::from_value(tree["config"].clone()).unwrap();
    assert_eq!(echo, cfg);
    assert!(tree.get("wall_time").is_none());
    assert_eq!(tree["pass"], serde_json::Value::Bool(true));
}

#[test]
fn json_keys_sorted_and_floats_fixed() {
    #[derive(serde::Serialize)]
    struct Probe {
        zeta: f64,
        alpha: f64,
        nested: std::collections::HashMap<&'static str, f64>,
    }
    let nested = [("b", 1e-300), ("a", -2.5)].into_iter().collect();
    let bytes = to_json_bytes(&Probe { zeta: 0.1, alpha: 12345.0, nested }).unwrap();
    assert_eq!(
        String::from_utf8(bytes).unwrap(),
        "{\"alpha\":1.234500000000e+04,\"nested\":{\"a\":-2.500000000000e+00,\"b\":1.000000000000e-300},\"zeta\":1.000000000000e-01}\n"
    );
    assert_eq!(format_e12(0.0), "0.000000000000e+00");
}

#[test]
fn csv_rows_follow_the_payload() {
    let cfg = preset(Scenario::DecayC);
    let report = run_scenario(&cfg).unwrap();
    let csv = to_csv(&report);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,l2,sup,gagliardo_p,dalpha_l2,status");
    let nodes = match &report.payload {
        Payload::Decay { run, .. } => run.nodes,
        other => panic!("{other:?}"),
    };
    assert_eq!(lines.count(), nodes);

    let verify = run_scenario(&preset(Scenario::Verify)).unwrap();
    assert!(verify.pass);
    assert_eq!(to_csv(&verify).lines().count(), 7);
}

#[test]
fn failed_criterion_clears_the_pass_flag() {
    let mut cfg = preset(Scenario::BlowupC);
    cfg.initial.amplitude = 0.1;
    let report = run_scenario(&cfg).unwrap();
    assert!(!report.pass);
    match report.payload {
        Payload::Blowup { t_detect, prediction, .. } => {
            assert!(t_detect.is_none());
            assert!(prediction.unwrap().finite);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn eigen_preset_reports_a_sign_definite_mode() {
    let report = run_scenario(&preset(Scenario::Eigen)).unwrap();
    assert!(report.pass);
    match &report.payload {
        Payload::Eigen { lambda1, quotient_min, sign_definite, eigenfunction, .. } => {
            assert!(*sign_definite);
            assert!(lambda1 < quotient_min);
            assert_eq!(eigenfunction.len(), 128);
        }
        other => panic!("{other:?}"),
    }
}
