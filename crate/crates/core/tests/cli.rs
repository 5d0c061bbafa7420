use std::process::{Command, Output};

fn wrtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wrtree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn solve_hard_core_above_transition() {
    let o = wrtree(&["solve", "--k", "2", "--theta", "0", "--lambda", "3"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["report"]["count"], "3");
    assert_eq!(v["laws"].as_array().unwrap().len(), 3);
    for law in v["laws"].as_array().unwrap() {
        assert!(law["residual"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn solve_free_model() {
    let v = json(&wrtree(&["solve", "--k", "2", "--theta", "1", "--lambda", "5"]));
    assert_eq!(v["report"]["count"], "1");
    assert_eq!(v["laws"][0]["x"], 5.0);
    assert_eq!(v["laws"][0]["y"], 5.0);
}

#[test]
fn solve_antiferro_between_curves() {
    let mid = (0.014425269942659653f64 * 0.02377324857585884).sqrt().to_string();
    let v = json(&wrtree(&["solve", "--k", "5", "--theta", "5", "--lambda", &mid]));
    assert_eq!(v["report"]["count"], "3");
    let crit = &v["report"]["critical"];
    assert!(crit["lambda_cr_anti_low"].as_f64().unwrap() < crit["lambda_cr_anti_high"].as_f64().unwrap());
}

#[test]
fn solve_accepts_coupling_form() {
    let v = json(&wrtree(&["solve", "--k", "2", "--j", "-1", "--beta", "0.5", "--lambda", "4"]));
    assert!(v["report"]["count"].is_string());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wrtree(&["solve", "--k", "2", "--lambda", "3"]).status.code(), Some(2));
    assert_eq!(wrtree(&["solve", "--k", "2", "--theta", "0", "--lambda", "-1"]).status.code(), Some(2));
    assert_eq!(wrtree(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(wrtree(&["curves", "--k", "3", "--regime", "nonsense"]).status.code(), Some(2));
}

#[test]
fn periodic_curves_need_k_at_least_6() {
    let o = wrtree(&["curves", "--k", "5", "--regime", "periodic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k^2 - 6k + 1"));
}

#[test]
fn curves_are_deterministic_and_exact() {
    let args = ["curves", "--k", "6", "--regime", "periodic", "--theta-steps", "25"];
    let a = stdout(&wrtree(&args));
    let b = stdout(&wrtree(&args));
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next().unwrap(), "theta,s_minus,s_plus,lambda_minus,lambda_plus,ordered,monotone");
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let theta: f64 = f[0].parse().unwrap();
        assert!(theta > 0.0 && theta < 1.0 / 49.0);
        let w = wr_tree::periodic_window(6, theta).unwrap();
        assert_eq!(f[3].parse::<f64>().unwrap(), w.lambda_minus.unwrap());
        assert_eq!(f[4].parse::<f64>().unwrap(), w.lambda_plus.unwrap());
        assert_eq!(f[5], "true");
    }
}

#[test]
fn ferro_curve_closed_form() {
    let out = stdout(&wrtree(&["curves", "--k", "2", "--regime", "ferro", "--theta-steps", "9"]));
    for line in out.lines().skip(1) {
        let f: Vec<f64> = line.split(',').take(2).map(|s| s.parse().unwrap()).collect();
        let want = 2.25 / (1.0 - 3.0 * f[0]);
        assert!((f[1] - want).abs() <= 4.0 * f64::EPSILON * want);
    }
}

#[test]
fn sweep_writes_file_in_theta_major_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let path_s = path.to_str().unwrap();
    let args = [
        "sweep", "--k", "4", "--theta-lo", "0", "--theta-hi", "0.5", "--theta-steps", "3", "--lambda-lo", "0.5",
        "--lambda-hi", "50", "--lambda-steps", "4", "--output", path_s,
    ];
    assert!(wrtree(&args).status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for (i, r) in rows.iter().enumerate() {
        let theta: f64 = r[1].parse().unwrap();
        assert_eq!(theta, [0.0, 0.25, 0.5][i / 4]);
    }
    // same flags, different worker count, same bytes
    let again = Command::new(env!("CARGO_BIN_EXE_wrtree"))
        .args(&args[..args.len() - 2])
        .env("WR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), csv);
}

#[test]
fn sweep_json_mirrors_csv() {
    let base = [
        "sweep", "--k", "2", "--theta-lo", "0", "--theta-hi", "0.2", "--theta-steps", "2", "--lambda-lo", "1",
        "--lambda-hi", "10", "--lambda-steps", "2",
    ];
    let v = json(&wrtree(&[&base[..], &["--format", "json"]].concat()));
    let csv = stdout(&wrtree(&base));
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(v[3]["count"], "3");
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = wrtree(&[
        "sweep", "--k", "2", "--theta-lo", "0", "--theta-hi", "0.2", "--theta-steps", "2", "--lambda-lo", "1",
        "--lambda-hi", "10", "--lambda-steps", "2", "--output", "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_quick_passes() {
    let o = wrtree(&["verify", "--level", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
}
