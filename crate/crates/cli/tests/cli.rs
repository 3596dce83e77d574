use std::process::{Command, Output};

fn caustic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caustic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let j = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().to_string()).collect()
}

#[test]
fn density_sweep_at_cusp_temperature() {
    let o = caustic(&["rho", "--g", "0.3", "--theta", "3.14159265", "--q0", "0:0.6:0.005"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(!s.contains('\r'));
    assert_eq!(
        s.lines().next().unwrap(),
        "q0,theta,g,n_solutions,rho_usual,rho_improved,F_factor,xi_or_phi,mu_or_chi"
    );
    let improved: Vec<f64> = column(&s, "rho_improved").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(improved.len(), 120);
    assert!(improved.iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn output_independent_of_thread_count() {
    let args = ["rho", "--g", "0.3", "--theta", "5", "--q0", "-0.6:0.6:0.01"];
    let one = caustic(&[&args[..], &["--threads", "1"]].concat());
    let four = caustic(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_caustic"))
        .args(args)
        .env("CAUSTIC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(env.stdout, one.stdout);
}

#[test]
fn single_lower_caustic() {
    let o = caustic(&["caustic", "--theta", "5", "--single"]);
    assert!(o.status.success());
    let q: f64 = column(&stdout(&o), "q0")[0].parse().unwrap();
    assert!((q - 0.3332).abs() < 5e-4);
}

#[test]
fn three_cusps_on_traced_curves() {
    let o = caustic(&["caustic", "--theta", "3:10:0.01"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let cusps: Vec<f64> = s
        .lines()
        .filter(|l| l.contains(",cusp,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(cusps.len(), 3);
    for (c, m) in cusps.iter().zip(1..) {
        assert!((c - m as f64 * std::f64::consts::PI).abs() < 1e-3);
    }
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(caustic(&["caustic", "--theta", "3:3:0.1"]).status.code(), Some(2));
    assert_eq!(caustic(&["rho", "--theta", "1", "--g", "-1"]).status.code(), Some(2));
    assert_eq!(caustic(&["rho", "--theta", "1", "--q0", "1.5"]).status.code(), Some(2));
    assert_eq!(caustic(&["rho", "--theta", "1", "--tol-quad", "0.5"]).status.code(), Some(2));
    assert_eq!(caustic(&["validate", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn json_mirrors_columns() {
    let o = caustic(&["branches", "--theta", "2", "--qt", "0:1:0.25", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["q_t"].as_array().unwrap().len(), 4);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["theta", "q_t", "q0"]);
}

#[test]
fn endpoint_sweep_lists_every_solution() {
    let o = caustic(&["branches", "--theta", "5", "--q0", "-0.9:0.91:0.3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let kinds = column(&s, "kind");
    assert_eq!(kinds.iter().filter(|k| *k == "global_min").count(), 7);
    assert_eq!(kinds.iter().filter(|k| *k == "local_min").count(), 3);
    assert_eq!(kinds.iter().filter(|k| *k == "complex").count(), 8);
}

#[test]
fn validate_single_check() {
    let o = caustic(&["validate", "--only", "fig7-caustic"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 1);
    assert_eq!(v["criteria"][0]["id"], "fig7-caustic");
}

#[test]
fn oracle_gap_shrinks_with_g() {
    let dev = |g: &str| {
        let o = caustic(&["validate", "--only", "oracle-agreement", "--g", g]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["criteria"][0]["measured"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m[1].as_f64().unwrap())
            .fold(0.0, f64::max)
    };
    assert!(dev("0.05") < dev("0.3"));
}

#[test]
fn gnuplot_companion_script() {
    let dir = std::env::temp_dir().join(format!("caustic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("fig6.csv");
    let o = caustic(&["rho", "--theta", "5", "--q0", "0:0.6:0.05", "--out", csv.to_str().unwrap(), "--gnuplot"]);
    assert!(o.status.success());
    let gp = std::fs::read_to_string(dir.join("fig6.csv.gp")).unwrap();
    assert!(gp.contains("using 1:5") && gp.contains("using 1:6"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 13);
    std::fs::remove_dir_all(&dir).unwrap();
}
