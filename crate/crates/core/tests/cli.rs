use std::process::Command;

use pslab::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pslab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn params_at_985() {
    let (code, out, err) = call(&["params", "--alpha", "sqrt:2", "--gamma", "19/20", "--conv-q", "985"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("clamped"));
    assert_eq!(
        body(&out),
        ["q,a,N,Delta,Delta_formula,Delta_clamped,H,M,theta", "985,1393,1139,0.499999,0.9297812609678857,true,31,1,20"]
    );
}

#[test]
fn ps_primes_list() {
    let (code, out, _) = call(&["ps-primes", "--gamma", "19/20", "--limit", "10", "--list"]);
    assert_eq!(code, 0);
    assert_eq!(body(&out), ["p,n", "2,2", "3,3", "5,5", "7,7"]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(call(&["params", "--conv-q", "985"]).0, 2);
    assert_eq!(call(&["params", "--gamma", "0.95", "--conv-q", "985"]).0, 2);
    assert_eq!(call(&["params", "--gamma", "9/10", "--conv-q", "985"]).0, 2);
    let (code, _, err) = call(&["params", "--gamma", "19/20", "--conv-q", "986"]);
    assert_eq!(code, 2);
    assert!(err.contains("not a convergent denominator"));
    assert_eq!(call(&["vaughan-check", "--n1", "1", "--n2", "100", "--theta", "5"]).0, 2);
    assert_eq!(call(&["no-such-command"]).0, 2);
}

#[test]
fn vaughan_check_json() {
    let (code, out, _) = call(&["--format", "json", "vaughan-check", "--n1", "20", "--n2", "500", "--theta", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["meta"]["command"], "vaughan-check");
    let row = &v["rows"][0];
    assert!(row["residual"].as_f64().unwrap() <= row["tolerance"].as_f64().unwrap());
    let psi: f64 = (21..=500u64)
        .filter_map(|n| {
            let p = (2..=n).find(|p| n % p == 0).unwrap();
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            (m == 1).then(|| (p as f64).ln())
        })
        .sum();
    assert!((row["phi_re"].as_f64().unwrap() - psi).abs() < 1e-9);
}

#[test]
fn output_file_matches_stdout() {
    let args = ["gamma", "--gamma", "19/20", "--conv-q", "408"];
    let (_, stdout, _) = call(&args);
    let path = std::env::temp_dir().join(format!("pslab-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let mut with_file = vec!["--output", p];
    with_file.extend(args);
    let (code, out, _) = call(&with_file);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn binary_honours_worker_env() {
    let bin = env!("CARGO_BIN_EXE_pslab");
    let args = ["search", "--gamma", "19/20", "--conv-q", "408", "--all"];
    let one = Command::new(bin).args(args).env("PSLAB_WORKERS", "1").output().unwrap();
    let four = Command::new(bin).args(args).env("PSLAB_WORKERS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(bin).args(["params"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
