use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transfinite"))
        .current_dir(dir)
        .env_remove("TRANSFINITE_PRECISION")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn derive_on_built_set_gives_three_points() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(run(p, &["build-set", "--alpha", "w+2", "--nu", "3", "-o", "set.json"])
        .status
        .success());
    assert!(run(p, &["derive", "-i", "set.json", "--beta", "w+1", "-o", "d.json"])
        .status
        .success());
    let d = json(&p.join("d.json"));
    assert_eq!(d["cardinality"], 3);
    assert_eq!(d["points"].as_array().unwrap().len(), 3);
    assert!(p.join("d.json.manifest.json").exists());
}

#[test]
fn ring_grid_has_sixty_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(run(
        p,
        &[
            "build-zeros",
            "--alpha",
            "3",
            "--nu",
            "1",
            "--nmax",
            "6",
            "-o",
            "z.json"
        ]
    )
    .status
    .success());
    assert!(run(
        p,
        &["eval", "-z", "z.json", "--j", "1", "--grid", "ring:a3", "-o", "e.csv"]
    )
    .status
    .success());
    let csv = fs::read_to_string(p.join("e.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("log_r,turn,log_mag,phase,tail_bound,valid"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn outputs_and_manifests_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut seen = Vec::new();
    for _ in 0..2 {
        assert!(run(
            p,
            &[
                "build-zeros",
                "--alpha",
                "3",
                "--nu",
                "inf",
                "--nmax",
                "4",
                "-o",
                "z.json"
            ]
        )
        .status
        .success());
        assert!(run(
            p,
            &[
                "eval",
                "-z",
                "z.json",
                "--j",
                "7",
                "--grid",
                "annulus:n=3,samples=16",
                "--strategy",
                "sequential",
                "-o",
                "e.csv"
            ]
        )
        .status
        .success());
        let files = ["z.json", "e.csv", "e.csv.manifest.json"].map(|f| fs::read(p.join(f)).unwrap());
        seen.push(files);
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let bad_flag = run(p, &["build-set", "--alpha", "x"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_flag.stderr).contains("--alpha"));
    let missing = run(p, &["eval", "-z", "missing.json", "--grid", "ring:a3"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--zeros"));
    fs::write(p.join("junk.json"), "{\"kind\":\"nope\"}").unwrap();
    assert_eq!(
        run(p, &["derive", "-i", "junk.json", "--beta", "1"]).status.code(),
        Some(2)
    );

    assert!(run(
        p,
        &[
            "build-zeros",
            "--alpha",
            "3",
            "--nu",
            "1",
            "--nmax",
            "12",
            "-o",
            "z.json"
        ]
    )
    .status
    .success());
    // the trail converges but the distances stay above r·δ
    let short = run(
        p,
        &[
            "probe",
            "-z",
            "z.json",
            "--rule",
            "ratio-plus:r=1/2",
            "--k",
            "3..4",
            "--delta",
            "1/100000",
            "-o",
            "p.json",
        ],
    );
    assert_eq!(short.status.code(), Some(4));
    assert_eq!(json(&p.join("p.json"))["report"]["status"], "inconclusive");
    let good = run(
        p,
        &[
            "probe",
            "-z",
            "z.json",
            "--rule",
            "ratio-plus:r=1/2",
            "--k",
            "6..10",
            "--sweep",
            "-o",
            "q.json",
        ],
    );
    assert!(good.status.success(), "{}", String::from_utf8_lossy(&good.stderr));
    let q = json(&p.join("q.json"));
    assert_eq!(q["report"]["classification"]["branch"], "toward-lower");
    assert_eq!(q["sweep"].as_array().unwrap().len(), 15);
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut reports = Vec::new();
    for out in ["a", "b"] {
        let o = run(p, &["verify", "--suite", "4,5,7", "--out-dir", out]);
        assert!(o.status.success());
        let table = String::from_utf8_lossy(&o.stdout).to_string();
        assert!(table.contains("3 passed, 0 failed"), "{table}");
        reports.push(fs::read(p.join(out).join("verify-report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
