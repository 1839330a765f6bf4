use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ogw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

#[test]
fn disk_value() {
    let o = ogw(&["ogw", "--labels", "1", "--degree", "2,0", "--a", "1=1", "--eps", "1=+"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), r#"{"0":"1/2"}"#);
}

#[test]
fn spec_file_matches_flags() {
    let o = ogw(&["ogw", "--spec", &data("disk.json"), "--a", "1=1", "--eps", "1=+"]);
    assert_eq!(stdout(&o), r#"{"0":"1/2"}"#);
    for eps in ["1=+", "1=-"] {
        let run = |path| ogw(&["ogw", "--spec", &data("annulus.json"), "--a", "1=2", "--eps", eps, "--path", path]);
        let (a, b) = (run("compact"), run("graphsum"));
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(stdout(&a), stdout(&b));
        if eps == "1=+" {
            assert_eq!(stdout(&a), r#"{"0":"1/4"}"#);
        }
    }
}

#[test]
fn verify_dd_vanish() {
    let o = ogw(&["verify", "--suite", "dd-vanish", "--max-d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(r#""passed":true"#));
}

#[test]
fn volume_two_faces() {
    let o = ogw(&["volume", "--bc", &data("twoface.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), r#""2""#);
    let o = ogw(&["volume", "--bc", &data("twoface.json"), "--backend", "triangulation"]);
    assert_eq!(stdout(&o), r#""2""#);
}

#[test]
fn psi_values() {
    assert_eq!(stdout(&ogw(&["psi", "1", "1"])), r#""1/24""#);
    assert_eq!(stdout(&ogw(&["psi", "0", "1,0,0,0"])), r#""1""#);
    assert_eq!(stdout(&ogw(&["psi", "1", "0", "--lambda", "1"])), r#""1/24""#);
}

#[test]
fn malformed_json_names_field() {
    let o = ogw(&["ogw", "--spec", &data("bad_degree.json"), "--a", "1=1", "--eps", "1=+"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("components[0].d[1]"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_2() {
    let cases: [(&[&str], &str); 5] = [
        (&["ogw", "--labels", "1", "--degree", "2,0", "--a", "1=1"], "eps"),
        (&["ogw", "--labels", "1", "--degree", "2", "--a", "1=1", "--eps", "1=+"], "degree"),
        (&["ogw", "--labels", "1", "--degree", "2,0", "--a", "2=1", "--eps", "1=+"], "a:"),
        (&["verify", "--suite", "nope"], "suite"),
        (&["volume", "--bc", "/nonexistent.json"], "bc"),
    ];
    for (args, field) in cases {
        let o = ogw(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(field), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn listings() {
    let o = ogw(&["morphisms", "--spec", &data("disk.json")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let o = ogw(&["graphs", "--spec", &data("disk.json"), "--a", "1=1", "--eps", "1=+"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["graphs"].as_array().unwrap().len() > 0);
    assert!(v[0].get("contribution").is_some());
    let o = ogw(&["trees", "--labels", "1", "--degree", "2,0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn deterministic_across_jobs() {
    let runs = [
        vec!["ogw", "--labels", "1,2", "--degree", "2,1", "--a", "1=1,2=1", "--eps", "1=+,2=-", "--trace"],
        vec!["trees", "--labels", "1,2", "--degree", "2,1"],
        vec!["verify", "--suite", "divisor", "--max-d", "2", "--max-labels", "2"],
    ];
    for args in runs {
        let one = ogw(&[&["--jobs", "1"], args.as_slice()].concat());
        let two = ogw(&[&["--jobs", "3"], args.as_slice()].concat());
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, two.stdout, "{args:?}");
    }
}
