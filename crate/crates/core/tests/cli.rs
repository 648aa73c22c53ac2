use std::fs;
use std::path::Path;

use infinite_world::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("infinite-world").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let (code, out, err) = run(&["generate", "--out", p(&data), "--preset", "3-9-world", "--count", "30", "--seed", "5", "--holdout", "regular:9"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("generated 30 images"));
    for f in ["manifest.jsonl", "stats.json", "config.toml"] {
        assert!(data.join(f).exists(), "{f}");
    }

    let reports = data.join("reports.jsonl");
    let (code, out, err) = run(&[
        "evaluate", "--images", p(&data.join("images")), "--manifest", p(&data.join("manifest.jsonl")), "--out", p(&reports),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("30 exact matches"), "{out}");

    let score = data.join("score.json");
    let (code, _, err) = run(&["score", "--reports", p(&reports), "--manifest", p(&data.join("manifest.jsonl")), "--out", p(&score)]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&score).unwrap()).unwrap();
    assert_eq!(v["psi_overall"], 100.0);

    let (code, out, _) = run(&["stats", "--manifest", p(&data.join("manifest.jsonl"))]);
    assert_eq!(code, 0);
    assert!(out.starts_with("30 records"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "count = 50\nn_min = 4\nn_max = 5\n").unwrap();
    let data = dir.path().join("d");
    let (code, out, err) = run(&["generate", "--out", p(&data), "--config", p(&cfg), "--count", "6"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("generated 6 images"));
    let records = infinite_world::dataset::read_manifest(&data.join("manifest.jsonl")).unwrap();
    assert!(records.iter().all(|r| (4..=5).contains(&r.n)));
}

#[test]
fn render_writes_one_image() {
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("hex.png");
    let (code, out, err) = run(&["render", "--class", "regular", "--n", "6", "--color", "green", "--seed", "3", "--out", p(&png)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"n\":6"));
    let img = infinite_world::raster::load_png(&png).unwrap();
    let r = infinite_world::evaluator::analyze_image(&img, &Default::default()).unwrap();
    assert_eq!(r.detected_n, 6);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["generate"]).0, 2);
    assert_eq!(run(&["generate", "--out", "x", "--holdout", "hexagon:3"]).0, 2);
    assert_eq!(run(&["render", "--class", "regular", "--n", "5", "--color", "mauve", "--out", "x.png"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let (code, _, err) = run(&["stats", "--manifest", p(&missing)]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}
