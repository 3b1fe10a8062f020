use std::fs;
use std::path::{Path, PathBuf};

use qperceptron::io::{ingest_csv, load_model};
use qperceptron::{classify_feature, train, EncodingScheme, NormalizationMode};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qperceptron").chain(args.iter().copied());
    let code = qperceptron_cli::run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn xor_csv(dir: &Path) -> String {
    write(dir, "xor.csv", "x1,x2,label\n0,0,-1\n0,1,1\n1,0,1\n1,1,-1\n")
}

fn trained_xor(dir: &Path) -> String {
    let data = xor_csv(dir);
    let model = dir.join("xor.model").to_str().unwrap().to_string();
    let o = run(&["train", "--data", &data, "--label", "label", "--encoding", "qubit", "--norm", "rescale", "--out", &model]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    model
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn assert_golden(name: &str, actual: &str) {
    let expected = fs::read_to_string(golden(name)).unwrap();
    assert_eq!(actual, expected, "golden mismatch for {name}");
    // Parseable, and stable under a parse/print round trip.
    let v: serde_json::Value = serde_json::from_str(actual).unwrap();
    assert_eq!(format!("{v}\n"), actual);
}

#[test]
fn train_then_classify_prints_xor_label() {
    let dir = TempDir::new().unwrap();
    let model = trained_xor(dir.path());
    let o = run(&["classify", "--model", &model, "--input", "0,1"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("label +1 "), "{}", o.stdout);
    let o = run(&["classify", "--model", &model, "--input", "1,1"]);
    assert!(o.stdout.starts_with("label -1 "), "{}", o.stdout);
}

#[test]
fn regime_reports_case_a_with_zero_defects() {
    let dir = TempDir::new().unwrap();
    let model = trained_xor(dir.path());
    let o = run(&["regime", "--model", &model]);
    assert_eq!(o.code, 0);
    assert_eq!(
        o.stdout,
        "case A\northogonality_defect 0\ncompleteness_defect 0\np_zero_min_eig 0\nphysical true\n"
    );
}

#[test]
fn capacity_counts() {
    let o = run(&["capacity", "--n", "2"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "originals=4 superpositions=4\n"));
}

#[test]
fn golden_json_outputs() {
    let dir = TempDir::new().unwrap();
    let model = trained_xor(dir.path());
    let data = xor_csv(dir.path());
    assert_golden("capacity.json", &run(&["--json", "capacity", "--n", "5"]).stdout);
    assert_golden("regime.json", &run(&["regime", "--model", &model, "--json"]).stdout);
    assert_golden(
        "classify.json",
        &run(&["--json", "classify", "--model", &model, "--data", &data, "--label", "label"]).stdout,
    );
    assert_golden(
        "sample.json",
        &run(&["--json", "sample", "--model", &model, "--input", "0.5,0.5", "--draws", "20", "--seed", "7"]).stdout,
    );
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = TempDir::new().unwrap();
    let model = trained_xor(dir.path());

    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
    let o = run(&["frobnicate"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.is_empty() && !o.stderr.is_empty());
    // Stochastic paths without a seed.
    assert_eq!(run(&["sample", "--model", &model, "--input", "0,1"]).code, 1);
    assert_eq!(run(&["classify", "--model", &model, "--input", "0,1", "--mode", "probabilistic"]).code, 1);
    assert_eq!(run(&["classify", "--model", &model]).code, 1);

    let bad = write(dir.path(), "bad.csv", "x1,x2,label\n0,abc,1\n");
    let o = run(&["train", "--data", &bad, "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("row 1") && o.stderr.contains("x2"), "{}", o.stderr);
    assert_eq!(run(&["regime", "--model", &bad]).code, 2);
    assert_eq!(run(&["classify", "--model", &model, "--input", "0,1,1"]).code, 2);

    // Unit-mode case D model has negative P0 support along the bisector of its two training states.
    let d = write(dir.path(), "d.csv", "a,b,label\n1,0,-1\n0.7071067811865476,0.7071067811865476,1\n");
    let dm = dir.path().join("d.model").to_str().unwrap().to_string();
    assert_eq!(run(&["train", "--data", &d, "--encoding", "direct", "--norm", "unit", "--out", &dm]).code, 0);
    assert!(run(&["regime", "--model", &dm]).stdout.starts_with("case D"));
    let o = run(&["sample", "--model", &dm, "--input", "0.9238795325112867,0.3826834323650898", "--seed", "1"]);
    assert_eq!(o.code, 3, "{}", o.stderr);
}

#[test]
fn saved_model_classifies_bit_identically() {
    let dir = TempDir::new().unwrap();
    let datasets = [
        ("xor.csv", "x1,x2,label\n0,0,-1\n0,1,1\n1,0,1\n1,1,-1\n", "qubit", "rescale"),
        ("and.csv", "x1,x2,label\n0,0,-1\n0,1,-1\n1,0,-1\n1,1,1\n", "qubit", "unit"),
        ("noisy.csv", "x1,x2,label\n0.1,0.2,-1\n0.9,0.3,1\n0.4,0.8,1\n0.7,0.6,-1\n0.2,0.1,-1\n", "qubit", "count"),
        ("direct.csv", "a,b,c,label\n1,2,3,-1\n3,1,0.5,1\n0.2,0.9,0.4,1\n", "direct", "rescale"),
    ];
    for (name, text, enc, norm) in datasets {
        let data = write(dir.path(), name, text);
        let out = dir.path().join(format!("{name}.model"));
        let o = run(&["train", "--data", &data, "--encoding", enc, "--norm", norm, "--out", out.to_str().unwrap()]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let records = ingest_csv(Path::new(&data), Some("label")).unwrap();
        let memory = train(&records, enc.parse::<EncodingScheme>().unwrap(), norm.parse::<NormalizationMode>().unwrap()).unwrap();
        let loaded = load_model(&out).unwrap();
        for fv in &records {
            let a = classify_feature(&memory, fv).unwrap().expectations;
            let b = classify_feature(&loaded, fv).unwrap().expectations;
            for (x, y) in [(a.minus, b.minus), (a.plus, b.plus), (a.zero, b.zero)] {
                assert_eq!(x.to_bits(), y.to_bits(), "{name}");
            }
        }
    }
}

#[test]
fn seeded_commands_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let model = trained_xor(dir.path());
    let data = xor_csv(dir.path());
    let commands: Vec<Vec<&str>> = vec![
        vec!["sample", "--model", &model, "--input", "0.3,0.6", "--draws", "500", "--seed", "11"],
        vec!["accuracy", "--model", &model, "--data", &data, "--trials", "300", "--seed", "11"],
        vec!["classify", "--model", &model, "--data", &data, "--label", "label", "--mode", "probabilistic", "--seed", "11"],
        vec!["baseline-train", "--data", &data, "--seed", "11", "--out", "/dev/null"],
    ];
    for cmd in &commands {
        for json in [false, true] {
            let mut args = cmd.clone();
            if json {
                args.push("--json");
            }
            let a = run(&args);
            let b = run(&args);
            assert_eq!(a.code, 0, "{cmd:?}: {}", a.stderr);
            assert_eq!(a.stdout, b.stdout, "{cmd:?}");
        }
    }
    let different = run(&["sample", "--model", &model, "--input", "0.3,0.6", "--draws", "500", "--seed", "12"]);
    assert_ne!(different.stdout, run(&commands[0]).stdout);
}

#[test]
fn synth_files_drive_ensemble_round_trip() {
    let dir = TempDir::new().unwrap();
    let synth = |sub: &str| {
        let d = dir.path().join(sub);
        let o = run(&["synth", "--seed", "5", "--sigma", "0.05", "--out-dir", d.to_str().unwrap()]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        d
    };
    let a = synth("a");
    let b = synth("b");
    for f in ["dof0.csv", "dof1.csv", "combined.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.join("combined.csv")).unwrap();
    assert!(header.starts_with("ch0,ch1,ch2,ch3,ch4,ch5,ch6,ch7,truth_dof0,truth_dof1\n"));

    let ens = dir.path().join("ens.json");
    let o = run(&[
        "ensemble-train",
        "--data",
        a.join("dof0.csv").to_str().unwrap(),
        "--data",
        a.join("dof1.csv").to_str().unwrap(),
        "--out",
        ens.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = run(&["--json", "ensemble-classify", "--model", ens.to_str().unwrap(), "--data", a.join("combined.csv").to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["matched"].as_u64().unwrap() >= 180, "{}", v["matched"]);
    assert_eq!(v["results"].as_array().unwrap().len(), 200);
}

#[test]
fn cluster_separates_orthogonal_groups() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "c.csv", "a,b,id\n1,0,1\n0,2,2\n3,0,3\n0,1,4\n");
    let o = run(&["cluster", "--data", &data, "--ignore", "id"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "-1\n+1\n-1\n+1\n"));
    let o = run(&["cluster", "--data", &data, "--ignore", "id", "--permutations", "10"]);
    assert_eq!(o.code, 1);
    let o = run(&["cluster", "--data", &data, "--ignore", "id", "--permutations", "10", "--seed", "3"]);
    assert!(o.stdout.ends_with("agreement 1 over 10 runs\n"), "{}", o.stdout);
}

#[test]
fn baseline_predicts_and_with_bias() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "and.csv", "x1,x2,label\n0,0,-1\n0,1,-1\n1,0,-1\n1,1,1\n");
    let out = dir.path().join("b.json");
    let o = run(&["baseline-train", "--data", &data, "--bias", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert!(o.stdout.starts_with("converged after "), "{}", o.stdout);
    let o = run(&["baseline-predict", "--model", out.to_str().unwrap(), "--data", &data, "--label", "label"]);
    assert_eq!(o.stdout, "label -\nlabel -\nlabel -\nlabel +\ncorrect 4/4\n");
}
