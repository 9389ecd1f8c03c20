use std::fs;
use std::process::{Command, Output};

fn prandtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prandtl"))
        .args(args)
        .output()
        .expect("run prandtl")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn tables_reproduces_example_4_1() {
    let out = prandtl(&["tables", "--example", "4.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("m,cond_inf,err,EOC,nu"));
    let table = rows(&text);
    assert_eq!(table.len(), 7);
    let last = &table[6];
    assert_eq!(last[0], "512");
    assert!(last[2].parse::<f64>().unwrap() <= 1e-11);
    // the first row has no predecessor
    assert_eq!(table[0][3], "");
    assert_eq!(table[0][4], "");
}

#[test]
fn elliptic_wing_is_exact_at_two_nodes() {
    let out = prandtl(&[
        "wing", "--shape", "elliptic", "--b", "10", "--beta", "1", "--eps", "0.0872", "--m-list", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let err: f64 = rows(&text)[0][2].parse().unwrap();
    assert!(err <= 1e-13, "{err:e}");
}

#[test]
fn sigma_with_wrong_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"alpha": 0.25, "gamma": 0.125, "sigma": "2", "g": "1"}"#).unwrap();
    let out = prandtl(&["solve", "--config", cfg.to_str().unwrap(), "--m", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error["));
    let out = prandtl(&[
        "study",
        "--config",
        cfg.to_str().unwrap(),
        "--m-list",
        "8,16",
        "--ref",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"alpha": 0.5, "g": "1", "sigmaa": "2"}"#).unwrap();
    let out = prandtl(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_grid_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    fs::write(
        &cfg,
        r#"{"alpha": 0.5, "sigma_phi": "y^2+1", "k": "cos(x+y)/(x^2+y^2+20)^2",
            "h": {"kind": "abs_pow", "mu": -0.3333333333333333}, "g": "abs(y+3/10)^(7/2)+y*sin(y)"}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = prandtl(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--m",
            "32",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "y,zeta");
    assert_eq!(lines.len(), 202);
    assert!(lines[1].starts_with("-1.00,"));
    assert_eq!(lines[1].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.0);
    assert_eq!(lines[201].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn study_requires_an_exact_solution_for_exact_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    fs::write(&cfg, r#"{"alpha": 0.5, "sigma": "2", "h": {"kind": "log"}, "g": "1"}"#).unwrap();
    let out = prandtl(&[
        "study",
        "--config",
        cfg.to_str().unwrap(),
        "--m-list",
        "8,16",
        "--ref",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let ok = prandtl(&[
        "study",
        "--config",
        cfg.to_str().unwrap(),
        "--m-list",
        "8,16",
        "--ref",
        "64",
    ]);
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    let table = rows(&text);
    assert_eq!(table.len(), 2);
    assert!(!table[1][3].is_empty(), "EOC on the doubled row");
}
