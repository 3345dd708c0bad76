use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz-eig")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn eig_json_first_eigenvalue() {
    let v: Value = serde_json::from_str(&stdout(&["eig", "--two-alpha", "1.6", "--n", "64", "--format", "json"])).unwrap();
    let l1 = v["lambdas"][0].as_f64().unwrap();
    assert!((l1 - 1.7282959570964).abs() < 1e-12);
    assert_eq!(v["lambdas"].as_array().unwrap().len(), 65);
    assert!(v["poincare_bound"].as_f64().unwrap() < l1);
    assert!(l1 <= v["minmax_upper"].as_f64().unwrap());
}

#[test]
fn eig_single_mode() {
    let text = stdout(&["eig", "--two-alpha", "2.0", "--n", "0"]);
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    let l: f64 = r[0][1].parse().unwrap();
    assert!((l - 2.5).abs() < 1e-14);
}

#[test]
fn eig_vectors_csv_width() {
    let text = stdout(&["eig", "--two-alpha", "1.3", "--n", "5", "--vectors"]);
    assert!(text.starts_with("n,lambda,parity,u_0,u_1,u_2,u_3,u_4,u_5\n"));
    assert!(rows(&text).iter().all(|r| r.len() == 9));
}

#[test]
fn invalid_order_is_usage_error() {
    let out = run(&["eig", "--two-alpha", "-1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!run(&["eig", "--two-alpha", "0", "--n", "4"]).status.success());
    assert!(!run(&["eig", "--n", "4"]).status.success());
    assert!(!run(&["bogus"]).status.success());
}

#[test]
fn convergence_rows() {
    let text = stdout(&["convergence", "--two-alpha", "1.6", "--n-list", "8,16,32,64,128", "--reference-n", "200"]);
    assert!(text.starts_with("N,lambda1,error\n"));
    let errs: Vec<f64> = rows(&text).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(errs.iter().all(|&e| e >= 0.0));
    let nonzero: Vec<f64> = errs.iter().copied().take_while(|&e| e > 0.0).collect();
    assert!(nonzero.windows(2).all(|w| w[1] < w[0]));
    assert!(errs[nonzero.len()..].iter().all(|&e| e == 0.0));

    assert_eq!(rows(&stdout(&["convergence", "--two-alpha", "1.6", "--n-list", "12"])).len(), 1);
    let bad = run(&["convergence", "--two-alpha", "1.6", "--n-list", "8,16", "--reference-n", "16"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn weyl_reliable_rows() {
    let text = stdout(&["weyl", "--two-alpha", "2.0", "--n", "256"]);
    let r = rows(&text);
    assert_eq!(r.len(), 257);
    let reliable: Vec<&Vec<String>> = r.iter().filter(|row| row[3] == "true").collect();
    assert_eq!(reliable.len(), 162);
    for row in reliable {
        let rho: f64 = row[2].parse().unwrap();
        assert!((rho - 1.0).abs() <= 1e-2);
    }
    assert_eq!(rows(&stdout(&["weyl", "--two-alpha", "1.5", "--n", "0"]))[0][0], "1");
}

#[test]
fn condition_summary() {
    let text = stdout(&["condition", "--two-alpha", "1.8", "--n-list", "32,64,128,256,512"]);
    let summary = text.lines().last().unwrap().strip_prefix("# ").unwrap();
    let v: Value = serde_json::from_str(summary).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 3.6).abs() <= 0.3);
    assert_eq!(rows(&text).len(), 5);
    assert!(stdout(&["condition", "--two-alpha", "5.6", "--n-list", "16,32,64"]).contains("slope"));
}

#[test]
fn eigfun_matches_cosine() {
    let text = stdout(&["eigfun", "--two-alpha", "2.0", "--n", "32", "--k", "1", "--samples", "257"]);
    let r = rows(&text);
    assert_eq!(r.len(), 257);
    assert_eq!(r[0][1], "0");
    assert_eq!(r[256][1], "0");
    for row in &r {
        let x: f64 = row[0].parse().unwrap();
        let u: f64 = row[1].parse().unwrap();
        assert!((u - (std::f64::consts::FRAC_PI_2 * x).cos()).abs() <= 1e-8, "x = {x}");
    }
    let bad = run(&["eigfun", "--two-alpha", "1.6", "--n", "3", "--k", "5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn eigfun_indices_header() {
    let text = stdout(&["eigfun", "--two-alpha", "1.4", "--n", "16", "--indices", "1,3", "--samples", "5"]);
    assert!(text.starts_with("x,u_1,u_3\n"));
    assert_eq!(rows(&text).len(), 5);
}

#[test]
fn mass_dump_and_oracle() {
    let text = stdout(&["mass", "--two-alpha", "2.0", "--n", "8", "--verify-oracle"]);
    let r = rows(&text);
    assert_eq!(r.len(), 9);
    for (i, row) in r.iter().enumerate() {
        for j in 0..9 {
            let cell = &row[j + 1];
            if (i + j) % 2 == 1 || i.abs_diff(j) > 2 {
                assert_eq!(cell, "0", "({i}, {j})");
            } else {
                assert_ne!(cell, "0", "({i}, {j})");
            }
        }
    }
    let summary: Value = serde_json::from_str(text.lines().last().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert!(summary["oracle_max_deviation"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn output_file_is_written_atomically_and_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eig.json");
    let p = path.to_str().unwrap();
    let args = ["eig", "--two-alpha", "1.7", "--n", "40", "--format", "json", "--vectors", "--output", p];
    assert!(run(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let missing = dir.path().join("nope/out.csv");
    let out = run(&["eig", "--two-alpha", "1.7", "--n", "4", "--output", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!missing.exists());
}

#[test]
fn thread_env_is_respected() {
    let base = stdout(&["weyl", "--two-alpha", "1.2", "--n", "64"]);
    let single = Command::new(env!("CARGO_BIN_EXE_riesz-eig"))
        .args(["weyl", "--two-alpha", "1.2", "--n", "64"])
        .env("RIESZ_EIG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(single.stdout).unwrap(), base);
    let bad = Command::new(env!("CARGO_BIN_EXE_riesz-eig"))
        .args(["weyl", "--two-alpha", "1.2", "--n", "4"])
        .env("RIESZ_EIG_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
