use std::fs;
use std::path::Path;
use std::process::Command;

use dirad::cli::run;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn dirad(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dirad").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--family", "gaussian", "--a", "0.5", "--seed", "7", "--out", p(dir)];
    args.extend_from_slice(extra);
    let r = dirad(&args);
    assert_eq!(r.code, 0, "{}", r.err);
}

const LABELLED_SCHEMA: &str = "risk,high\nprotect,low\nsite,none\nlabel,y,yes,no\n";

fn labelled_csv(seed: u64) -> String {
    // Small deterministic dataset: normals around 0, anomalies shifted along the risk directions.
    let mut s = String::from("site,risk,protect,y\n");
    let mut x = seed;
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0
    };
    for i in 0..60 {
        let anomalous = i >= 45;
        let shift = if anomalous { 1.5 } else { 0.0 };
        s.push_str(&format!(
            "{},{},{},{}\n",
            next(),
            next() + shift,
            next() - shift,
            if anomalous { "yes" } else { "no" }
        ));
    }
    s
}

#[test]
fn synth_writes_three_deterministic_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth(a.path(), &[]);
    synth(b.path(), &[]);
    for f in ["train.csv", "test.csv", "schema.txt"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let test = fs::read_to_string(a.path().join("test.csv")).unwrap();
    assert_eq!(test.lines().count(), 201);
    assert!(test.starts_with("x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,label\n"));
}

#[test]
fn synth_rejects_out_of_range_shift() {
    let d = tempfile::tempdir().unwrap();
    let r = dirad(&["synth", "--family", "gaussian", "--a", "1.5", "--out", p(d.path())]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("[0, 1]"), "{}", r.err);
    assert!(!d.path().join("train.csv").exists());
    assert_eq!(dirad(&["synth", "--family", "bernoulli", "--a", "0.2", "--out", p(d.path())]).code, 2);
}

#[test]
fn bench_cells_and_signed_alp_rejection() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("r.csv");
    let r = dirad(&["bench", "--family", "gaussian", "--a", "0.5", "--detectors", "nnd", "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("dataset,detector,variant,fold,auroc\n"));
    assert!(r.out.contains("best"));

    let r = dirad(&[
        "bench", "--family", "gaussian", "--a", "0.5", "--detectors", "nnd,alp", "--variants", "absolute,ramp", "--out",
        p(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 5);

    let r = dirad(&["bench", "--family", "gaussian", "--a", "0.5", "--detectors", "alp", "--variants", "signed"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("signed"));
}

#[test]
fn bench_sweep_has_one_row_per_shift() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("sweep.csv");
    let r = dirad(&[
        "bench", "--family", "gaussian", "--sweep", "--replicates", "10", "--detectors", "nnd", "--variants", "ramp",
        "--out", p(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family,shift,detector,k,variant,mean_auroc,replicates"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|l| l.ends_with(",10") && l.contains(",nnd,8,ramp,")));
}

#[test]
fn bench_cross_validates_and_reports_failed_datasets() {
    let d = tempfile::tempdir().unwrap();
    let good = d.path().join("toy.csv");
    fs::write(&good, labelled_csv(1)).unwrap();
    fs::write(d.path().join("toy.schema"), LABELLED_SCHEMA).unwrap();
    let orphan = d.path().join("orphan.csv");
    fs::write(&orphan, labelled_csv(2)).unwrap();
    let out = d.path().join("r.csv");

    let r = dirad(&["bench", "--dataset", p(&good), "--dataset", p(&orphan), "--detectors", "nnd", "--out", p(&out)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("orphan"), "{}", r.err);
    let csv = fs::read_to_string(&out).unwrap();
    // 3 variants x (5 folds + mean)
    assert_eq!(csv.lines().count(), 1 + 3 * 6);
    assert!(csv.contains("toy,nnd,ramp,mean,"));

    let again = d.path().join("r2.csv");
    dirad(&["bench", "--dataset", p(&good), "--detectors", "nnd", "--out", p(&again)]);
    assert_eq!(csv, fs::read_to_string(&again).unwrap());
}

#[test]
fn config_file_supplies_defaults() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "family = gaussian\na = 0.5\ndetectors = nnd\nvariants = absolute,signed\n").unwrap();
    let out = d.path().join("r.csv");
    let r = dirad(&["bench", "--config", p(&cfg), "--variants", "ramp", "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.contains(",nnd,ramp,holdout,"));
}

#[test]
fn scoring_training_records_with_k1_gives_one_half() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), &["--n-train", "50"]);
    let train = d.path().join("train.csv");
    let schema = d.path().join("schema.txt");
    let r = dirad(&["score", "--train", p(&train), "--schema", p(&schema), "--k", "1", "--query", p(&train)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "score");
    assert_eq!(lines.len(), 51);
    assert!(lines[1..].iter().all(|l| *l == "0.5"));
}

#[test]
fn saved_model_scores_like_a_fresh_fit() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), &["--n-train", "80"]);
    let train = d.path().join("train.csv");
    let test = d.path().join("test.csv");
    let schema = d.path().join("schema.txt");
    let model = d.path().join("m.txt");
    let fit = ["--detector", "alp", "--variant", "ramp"];

    let mut args = vec!["fit", "--train", p(&train), "--schema", p(&schema), "--out", p(&model)];
    args.extend_from_slice(&fit);
    assert_eq!(dirad(&args).code, 0);

    let loaded = dirad(&["score", "--model", p(&model), "--schema", p(&schema), "--query", p(&test)]);
    let mut args = vec!["score", "--train", p(&train), "--schema", p(&schema), "--query", p(&test)];
    args.extend_from_slice(&fit);
    let fresh = dirad(&args);
    assert_eq!(loaded.code, 0, "{}", loaded.err);
    assert_eq!(loaded.out, fresh.out);
    assert_eq!(loaded.out.lines().count(), 201);
    for s in loaded.out.lines().skip(1) {
        let v: f64 = s.parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn score_edge_cases() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), &["--n-train", "30", "--m", "3"]);
    let train = d.path().join("train.csv");
    let schema = d.path().join("schema.txt");
    let base = ["score", "--train", p(&train), "--schema", p(&schema), "--query"];

    let empty = d.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = d.path().join("scores.csv");
    let mut args = base.to_vec();
    args.extend_from_slice(&[p(&empty), "--out", p(&out)]);
    let r = dirad(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(fs::read_to_string(&out).unwrap(), "");

    let other = d.path().join("other.csv");
    fs::write(&other, "x1,x2,y9\n1,2,3\n").unwrap();
    let mut args = base.to_vec();
    args.push(p(&other));
    assert_ne!(dirad(&args).code, 0);

    let short = d.path().join("short.csv");
    fs::write(&short, "x1,x2,x3\n1,2,3\n4,5\n").unwrap();
    let mut args = base.to_vec();
    args.push(p(&short));
    let r = dirad(&args);
    assert_ne!(r.code, 0);
    assert!(r.err.contains("row 2"), "{}", r.err);
}

#[test]
fn stats_on_published_means() {
    let published = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/published_means.csv");
    let r = dirad(&[
        "stats",
        published,
        "--compare",
        "nnd:ramp>nnd:absolute",
        "--compare",
        "nnd:ramp>nnd:signed",
        "--holm",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("0.011654"), "{}", r.out);
    assert!(r.out.contains("0.021240"), "{}", r.out);
    assert_eq!(r.out.matches("0.023308").count(), 2, "{}", r.out);

    let r = dirad(&["stats", published, "--compare", "alp:ramp>alp:ramp"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("non-zero differences"));
}

#[test]
fn diagnose_suggests_but_does_not_apply() {
    let d = tempfile::tempdir().unwrap();
    let data = d.path().join("toy.csv");
    let schema = d.path().join("toy.schema");
    fs::write(&data, labelled_csv(3)).unwrap();
    // `site` is declared directional even though anomalies are not higher.
    let declared = "risk,high\nprotect,low\nsite,high\nlabel,y,yes,no\n";
    fs::write(&schema, declared).unwrap();
    let r = dirad(&["diagnose", p(&data), "--schema", p(&schema), "--tolerance", "0.3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("-site,high\n+site,none"), "{}", r.out);
    assert!(!r.out.contains("-risk"));
    assert!(!r.out.contains("-protect"));
    assert_eq!(fs::read_to_string(&schema).unwrap(), declared);
}

#[test]
fn binary_help_and_usage_errors() {
    let bin = env!("CARGO_BIN_EXE_dirad");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for cmd in ["synth", "bench", "fit", "score", "stats", "diagnose"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    let bad = Command::new(bin).args(["bench", "--folds", "many"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
