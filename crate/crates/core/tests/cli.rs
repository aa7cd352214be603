use std::process::{Command, Output};

fn relspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relspin")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_filter_emits_report() {
    let out = relspin(&["check", "--filter", "SU2_*", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["SU2_BG", "SU2_NW", "SU2_PRYCE_E", "SU2_FW"]);
    assert_eq!(v["meta"]["seed"], 42);
    assert_eq!(v["meta"]["count"], 10);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], true);
        assert!(c["anchor"].as_str().is_some_and(|a| !a.is_empty()));
        assert!(c["worst_sample"].is_object());
    }
}

#[test]
fn failing_check_exits_1_and_shows_fail_row() {
    let out = relspin(&["check", "--filter", "SC_ALGEBRA", "--samples", "20", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("| SC_ALGEBRA ")).unwrap();
    assert!(row.contains("| FAIL |"), "{row}");
}

#[test]
fn empty_filter_exits_2() {
    assert_eq!(relspin(&["check", "--filter", "NO_SUCH_*"]).status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(relspin(&["check", "--mass", "0"]).status.code(), Some(2));
    assert_eq!(relspin(&["check", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(relspin(&["check", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(relspin(&["boost", "--p", "1,2", "--w", "1,0,0,0"]).status.code(), Some(2));
    assert_eq!(relspin(&["eval", "--operator", "S_XX", "--p", "0,0,0"]).status.code(), Some(2));
    assert_eq!(relspin(&["zbw", "--p-min", "-1", "--p-max", "1"]).status.code(), Some(2));
    assert_eq!(relspin(&["nope"]).status.code(), Some(2));
}

#[test]
fn boost_inverse_sends_momentum_to_rest() {
    let out = relspin(&["boost", "--p", "0,0,0.75", "--w", "1.25,0,0,0.75", "--inverse"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
}

#[test]
fn eval_bg_spin_is_constant() {
    let out = relspin(&["eval", "--operator", "S_BG", "--p", "0.3,-0.2,0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 3);
    // Σ³/2 = diag(1, −1, 1, −1)/2.
    let a3 = &comps[2]["A"];
    for (i, d) in [0.5, -0.5, 0.5, -0.5].into_iter().enumerate() {
        assert_eq!(a3[i][i], serde_json::json!([d, 0.0]));
    }
    for comp in comps {
        for b in comp["B"].as_array().unwrap() {
            let rows = b.as_array().unwrap();
            assert!(rows.iter().flat_map(|r| r.as_array().unwrap()).all(|z| z == &serde_json::json!([0.0, 0.0])));
        }
    }
}

#[test]
fn zbw_writes_csv_file() {
    let dir = std::env::temp_dir().join(format!("relspin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("zbw.csv");
    let out = relspin(&["zbw", "--points", "256", "--steps", "20", "--t-max", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x_dirac,x_fw,norm,energy"));
    assert_eq!(lines.count(), 21);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn help_exits_0() {
    let out = relspin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("check"));
}
