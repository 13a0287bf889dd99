use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradeforest"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/five_students.csv")
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn every_command_requires_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    let cases: [&[&str]; 6] = [
        &["synth", "--out", "raw"],
        &["ingest", "--input", &f, "--out", "c"],
        &["split", "--data", "d.csv", "--out", "s.json"],
        &["train", "--data", "d.csv", "--preset", "rf1", "--out", "m.txt"],
        &["evaluate", "--data", "d.csv", "--dummy", "majority", "--out", "r"],
        &["importance", "--data", "d.csv", "--model", "m.txt", "--out", "i"],
    ];
    for args in cases {
        let o = run(tmp.path(), args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"), "{args:?}");
    }
}

#[test]
fn ingest_writes_outputs_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["ingest", "--input", &fixture(), "--seed", "3", "--out", "c"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["completion.csv", "major.csv", "audit.jsonl", "rejects.csv", "manifest.txt"] {
        assert!(tmp.path().join("c").join(f).is_file(), "{f}");
    }
    let manifest = std::fs::read_to_string(tmp.path().join("c/manifest.txt")).unwrap();
    assert!(manifest.starts_with("command = ingest\n"));
    assert!(manifest.contains("seed = 3\n"));
    assert!(manifest.contains("input.records.sha256 = "));
}

#[test]
fn schema_error_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.csv", "student_id,course_title,department,semester,grade\ns1,A,MAT,2004F,70\n");
    let o = run(tmp.path(), &["ingest", "--input", &bad, "--seed", "1", "--out", "c"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("credit_value"));
}

#[test]
fn single_class_training_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("label,x\n");
    for i in 0..20 {
        text.push_str(&format!("a,{i}\n"));
    }
    let data = write(tmp.path(), "one.csv", &text);
    let o = run(tmp.path(), &["train", "--data", &data, "--rows", "all", "--preset", "rf1", "--seed", "1", "--out", "m.txt"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn model_task_mismatch_exits_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("label,x\n");
    for i in 0..30 {
        text.push_str(&format!("{},{i}\n", ["a", "b", "c"][i % 3]));
    }
    let data = write(tmp.path(), "three.csv", &text);
    let o = run(tmp.path(), &["train", "--data", &data, "--rows", "all", "--model", "logit", "--seed", "1", "--out", "m.txt"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(tmp.path(), &["train", "--data", &data, "--rows", "all", "--model", "multinomial", "--seed", "1", "--out", "m.txt"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(tmp.path(), &["importance", "--data", &data, "--rows", "all", "--model", "m.txt", "--seed", "1", "--out", "imp"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn numeric_failure_exits_with_5() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("label,x\n");
    for i in 0..20 {
        let v = if i == 0 { "1e308".to_string() } else { format!("{}e307", i % 9 + 1) };
        text.push_str(&format!("{},{v}\n", ["a", "b"][i % 2]));
    }
    let data = write(tmp.path(), "huge.csv", &text);
    let o = run(tmp.path(), &["train", "--data", &data, "--rows", "all", "--model", "logit", "--seed", "1", "--out", "m.txt"]);
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn split_train_evaluate_importance_round() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&run(d, &["synth", "--scenario", "default", "--n-students", "400", "--seed", "5", "--out", "raw"])), 0);
    assert_eq!(code(&run(d, &["ingest", "--input", "raw/records.csv", "--seed", "5", "--out", "c"])), 0);
    assert_eq!(code(&run(d, &["split", "--data", "c/completion.csv", "--seed", "5", "--out", "s.json"])), 0);
    let o = run(d, &["train", "--data", "c/completion.csv", "--split", "s.json", "--preset", "rf2", "--trees", "20", "--seed", "5", "--out", "m.txt"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(d, &["evaluate", "--data", "c/completion.csv", "--split", "s.json", "--model", "m.txt", "--seed", "5", "--out", "r"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall accuracy"));
    let o = run(d, &["importance", "--data", "c/completion.csv", "--split", "s.json", "--model", "m.txt", "--top", "5", "--seed", "5", "--out", "imp"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.join("imp.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(std::fs::read_to_string(d.join("imp.svg")).unwrap().starts_with("<svg"));
    for m in ["raw/manifest.txt", "c/manifest.txt", "s.json.manifest", "m.txt.manifest", "r.manifest", "imp.manifest"] {
        assert!(d.join(m).is_file(), "{m}");
    }
    let manifest = std::fs::read_to_string(d.join("m.txt.manifest")).unwrap();
    assert!(manifest.contains("seed = 5\n"));

    // A config seed that disagrees with --seed is rejected.
    let conf = write(d, "split.conf", "seed = 6\n");
    let o = run(d, &["split", "--data", "c/completion.csv", "--seed", "5", "--config", &conf, "--out", "t.json"]);
    assert_ne!(code(&o), 0);
}
