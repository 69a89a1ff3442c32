use std::process::{Command, Output};

fn sinmin(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinmin"))
        .args(args)
        .current_dir(dir)
        .env_remove("SINMIN_OUT")
        .output()
        .expect("binary runs")
}

#[test]
fn verify_thm4_writes_three_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sinmin(&["verify", "--suite", "thm4", "--out", "r"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let mut names: Vec<String> = std::fs::read_dir(tmp.path().join("r"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["summary.json", "thm4_case1.json", "thm4_case2.json", "thm4_case3.json"]
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let fail = sinmin(
        &["verify", "--suite", "thm1", "--tol", "1e-20", "--out", "r"],
        tmp.path(),
    );
    assert_eq!(fail.status.code(), Some(1));
    let bad = sinmin(&["verify", "--suite", "nosuch"], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
    let bad_grid = sinmin(&["verify", "--grid", "1x1"], tmp.path());
    assert_eq!(bad_grid.status.code(), Some(2));
}

#[test]
fn config_file_and_env_fallback() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.toml"), "suite = \"prop1\"\nseed = 3\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sinmin"))
        .args(["verify", "--config", "run.toml"])
        .current_dir(tmp.path())
        .env("SINMIN_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from-env/prop1_case1.json").exists());

    std::fs::write(tmp.path().join("bad.toml"), "suite = \"prop1\"\ncolour = 1\n").unwrap();
    let out = sinmin(&["verify", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.toml"), "suite = \"nosuch\"\nout = \"cfg\"\n").unwrap();
    let out = sinmin(
        &["verify", "--config", "run.toml", "--suite", "prop2", "--out", "flag"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("flag/prop2_case1.json").exists());
    assert!(!tmp.path().join("cfg").exists());
}

#[test]
fn ode_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let e31 = sinmin(
        &[
            "ode", "E31", "--b", "1", "--init", "0,0,0", "--end", "0.5", "--out", "o",
        ],
        tmp.path(),
    );
    assert_eq!(e31.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("o/E31.csv")).unwrap();
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(last[0], 0.5);
    assert!((last[1] - 0.5 * 1f64.cosh().ln()).abs() <= 1e-8);

    let e8 = sinmin(
        &["ode", "E8", "--b", "1", "--init", "0,0,0", "--end", "0.4", "--out", "o"],
        tmp.path(),
    );
    assert_eq!(e8.status.code(), Some(0));
    assert!(tmp.path().join("o/E8-roundtrip.json").exists());

    let pole = sinmin(
        &[
            "ode", "E22", "--a", "0.48", "--b", "0.6", "--c", "0.64", "--init", "0,1.58,0", "--end", "-5", "--out", "o",
        ],
        tmp.path(),
    );
    assert_eq!(pole.status.code(), Some(1));
    assert!(
        std::fs::read_to_string(tmp.path().join("o/E22.csv"))
            .unwrap()
            .lines()
            .count()
            > 1
    );

    let bad = sinmin(&["ode", "E8", "--a", "1", "--init", "0,0,0", "--end", "1"], tmp.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sample_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sinmin(
        &[
            "sample",
            "prop2/case1",
            "--grid",
            "2x2",
            "--format",
            "csv",
            "--out",
            "s",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("s/prop2_case1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let out = sinmin(&["sample", "thm1/case1", "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let obj = std::fs::read_to_string(tmp.path().join("s/thm1_case1.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 900);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 29 * 29);

    let holes = sinmin(
        &["sample", "thm1/case1", "--box", "-3,3,-1,1", "--out", "s"],
        tmp.path(),
    );
    assert_eq!(holes.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&holes.stderr).contains(" 0 skipped"));
}
