use std::path::Path;
use std::process::{Command, Output};

fn gtkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtkit"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn gtkit")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_then_decode_recovers_truth() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    stdout(&gtkit(
        &["generate", "--n", "40", "--D", "3", "--algo", "coma", "--T", "120", "--seed", "4", "--out", "m.txt", "--outcomes", "y.txt", "--truth", "x.txt"],
        p,
    ));
    let truth = std::fs::read_to_string(p.join("x.txt")).unwrap();
    assert_eq!(truth.trim().len(), 40);
    for (algo, extra) in [("coma", vec![]), ("nolipo", vec!["--d", "3"]), ("lipo", vec!["--d", "3"]), ("nounlipo", vec!["--D", "3"])] {
        let mut args = vec!["decode", "--matrix", "m.txt", "--outcomes", "y.txt", "--algo", algo];
        args.extend(extra);
        let out = stdout(&gtkit(&args, p));
        let est = out.lines().next().unwrap().strip_prefix("estimate ").unwrap().to_string();
        assert_eq!(est, truth.trim(), "{algo}");
    }
}

#[test]
fn decode_json_and_eta_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("m.txt"), "3 3 explicit -\n100\n010\n001\n").unwrap();
    std::fs::write(p.join("y.txt"), "101\n").unwrap();
    let out = stdout(&gtkit(
        &["decode", "--matrix", "m.txt", "--outcomes", "y.txt", "--algo", "nolipo", "--d", "2", "--json", "--eta", "eta.csv"],
        p,
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["estimate"], "101");
    assert_eq!(v["integral"], true);
    assert_eq!(v["objective"], 0.0);
    let eta = std::fs::read_to_string(p.join("eta.csv")).unwrap();
    assert_eq!(eta.lines().count(), 4);
}

#[test]
fn lipo_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("m.txt"), "2 2 explicit -\n00\n10\n").unwrap();
    std::fs::write(p.join("y.txt"), "10\n").unwrap();
    let out = stdout(&gtkit(&["decode", "--matrix", "m.txt", "--outcomes", "y.txt", "--algo", "lipo", "--d", "0"], p));
    assert_eq!(out.trim(), "decode failure");
}

#[test]
fn simulate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("c.json"),
        r#"{"n":60,"D":3,"d":"random","delta":1.0,"noise":{"kind":"bsc","q":0.02},"algo":"nocoma","T":"auto","trials":20,"seed":1}"#,
    )
    .unwrap();
    let out = stdout(&gtkit(&["simulate", "--config", "c.json", "--trials", "10", "--out", "t.csv", "--summary", "s.csv"], p));
    assert!(out.contains("trials=10"));
    let t = std::fs::read_to_string(p.join("t.csv")).unwrap();
    assert_eq!(t.lines().count(), 11);
    let s = std::fs::read_to_string(p.join("s.csv")).unwrap();
    assert!(s.lines().nth(1).unwrap().starts_with("60,3,random,1.0,nocoma,bsc(q=0.02),"));
}

#[test]
fn bounds_table_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&gtkit(&["bounds", "--n", "1000", "--D", "10", "--json"], dir.path()));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["algo"].as_str().unwrap()).collect();
    assert!(names.contains(&"coma") && names.contains(&"lipo") && !names.contains(&"coco_as_stated"));

    let out = stdout(&gtkit(&["bounds", "--n", "1000", "--D", "10", "--q", "0.1", "--algo", "coco", "--as-stated", "--json"], dir.path()));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["algo"], "coco_as_stated");

    let bad = gtkit(&["bounds", "--n", "1000", "--D", "10", "--q", "0.1", "--algo", "lipo"], dir.path());
    assert!(!bad.status.success());
}

#[test]
fn bounds_cli_matches_library() {
    use gtkit_core::bounds::{upper_bound, BoundAlgo, BoundQuery};
    use gtkit_core::noise::NoiseModel;
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&gtkit(&["bounds", "--n", "1000", "--D", "10", "--delta", "1", "--algo", "coma", "--json"], dir.path()));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lib = upper_bound(&BoundQuery::new(1000, 10, 1.0, NoiseModel::Noiseless, BoundAlgo::Coma)).unwrap();
    assert_eq!(v[0]["T"].as_f64().unwrap(), lib.tests);
    assert_eq!(v[0]["T_ceil"], 376);
    assert_eq!(v[0]["log"], "ln");
}
