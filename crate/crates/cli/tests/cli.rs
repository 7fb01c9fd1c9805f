use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiff-lab"))
        .args(args)
        .env("QDIFF_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a2 = data("a2.json");
    let a3 = data("a3.json");
    let surf = data("a2_surface.json");
    let cys = data("a2_cys.json");
    let stab = data("stab.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["surface", "data", &surf],
        vec!["quiver", "build", &surf],
        vec!["hurwitz", "check", &a3],
        vec!["foliate", &a3, "--phase", "0.3"],
        vec!["periods", &cys],
        vec!["induce", &stab, "--s", "3.5,0.2"],
        vec!["corpus", "--suite", "induce"],
        vec!["wind", &a2, "--loop", "0,0,3"],
    ];
    for args in cases {
        let first = run(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        assert_eq!(first.stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let a3 = data("a3.json");
    let one = Command::new(env!("CARGO_BIN_EXE_qdiff-lab"))
        .args(["foliate", &a3])
        .env("QDIFF_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.stdout, run(&["foliate", &a3]).stdout);
}

#[test]
fn foliate_writes_svg_and_strip_datum() {
    let dir = std::env::temp_dir().join(format!("qdiff-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let svg = dir.join("a2.svg");
    let js = dir.join("a2.json");
    let out = run(&["foliate", &data("a2.json"), "--phase", "0.3", "--svg", svg.to_str().unwrap(), "--json", js.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<svg") && doc.contains(r#"stroke="red""#) && doc.contains(r#"stroke="black""#));
    assert!(doc.contains(r#"stroke="green""#) && doc.contains("circle"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(v["decomposition"]["saddle_free"], true);
    assert_eq!(v["decomposition"]["strips"].as_array().unwrap().len(), 2);
    assert_eq!(v["heart"]["objects"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_reports_no_residues() {
    let out = run(&["quiver", "verify", &data("a2_surface.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["residues"], serde_json::json!([]));
}

#[test]
fn cut_outcomes() {
    let ok = json(&run(&["cut", &data("graph.json")]));
    assert_eq!(ok["outcome"], "matched");
    let bad = run(&["cut", &data("hall.json")]);
    assert_eq!(bad.status.code(), Some(0));
    let v = json(&bad);
    assert_eq!(v["outcome"], "infeasible");
    assert_eq!(v["certificate"]["kind"], "hall");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["cut"]).status.code(), Some(1));
    assert_eq!(run(&["corpus", "--suite", "nope"]).status.code(), Some(1));
    // gldim 1.5 needs Re(s) > 2.5
    assert_eq!(run(&["induce", &data("stab.json"), "--s", "2,0"]).status.code(), Some(1));
    // non-integer s has no plain restriction
    assert_eq!(run(&["foliate", &data("a2_cys.json")]).status.code(), Some(1));
    assert_eq!(run(&["--budget", "0.5", "foliate", &data("a2.json")]).status.code(), Some(2));
    assert_eq!(run(&["wind", &data("a2.json"), "--loop", "0,0,0"]).status.code(), Some(1));
}

#[test]
fn malformed_json_points_at_the_error() {
    let path = std::env::temp_dir().join(format!("qdiff-lab-bad-{}.json", std::process::id()));
    std::fs::write(&path, "{\n  \"whites\": 2,\n  \"demands\": [1 1]\n}\n").unwrap();
    let out = run(&["cut", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{}:3:", path.display())), "{err}");
}

#[test]
fn recover_roundtrips_the_cover() {
    let out = run(&["hurwitz", "recover", &data("a2_cys.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["coefficient_residual"].as_f64().unwrap() < 1e-8);
}
