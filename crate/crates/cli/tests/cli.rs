use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nvholo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvholo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nvholo(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares against a stored file; `UPDATE_GOLDEN=1` rewrites it instead.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn witness_golden() {
    assert_golden("witness.json", &stdout(&["run", "witness", "--seed", "7"]));
}

#[test]
fn square_holonomy_golden() {
    assert_golden("square_holonomy.json", &stdout(&["run", "square_holonomy"]));
}

#[test]
fn sweep_golden() {
    let out = stdout(&[
        "sweep-degeneracy",
        "--path",
        "square",
        "--deltas",
        "0,0.1",
        "--times",
        "50,80",
    ]);
    assert_golden("sweep_square.csv", &out);
}

#[test]
fn gyro_golden() {
    assert_golden("gyro.json", &stdout(&["gyro"]));
}

#[test]
fn witness_reports_both_orderings() {
    let v: Value = serde_json::from_str(&stdout(&["witness"])).unwrap();
    let r = &v["result"];
    let (ab, ba) = (r["pop_ab"].as_f64().unwrap(), r["pop_ba"].as_f64().unwrap());
    assert!((r["difference"].as_f64().unwrap() - (ab - ba).abs()).abs() < 1e-15);
    assert!((ba - 0.1447).abs() < 1e-3);
}

#[test]
fn square_matches_quoted_matrix_to_two_decimals() {
    let v: Value = serde_json::from_str(&stdout(&["holonomy", "--path", "square"])).unwrap();
    let m = &v["result"]["matrix"];
    let quoted_re = [[0.91, -0.11], [0.34, 0.66]];
    let quoted_im = [[0.23, -0.33], [-0.07, 0.67]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((m["re"][i][j].as_f64().unwrap() - quoted_re[i][j]).abs() < 5e-3);
            assert!((m["im"][i][j].as_f64().unwrap() - quoted_im[i][j]).abs() < 5e-3);
        }
    }
}

#[test]
fn repeated_seeded_runs_are_byte_identical() {
    let args = [
        "noise-ensemble",
        "--sigma",
        "1e-3",
        "--members",
        "4",
        "--events",
        "20",
        "--time",
        "200",
        "--seed",
        "7",
    ];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let other = stdout(&[
        "noise-ensemble",
        "--sigma",
        "1e-3",
        "--members",
        "4",
        "--events",
        "20",
        "--time",
        "200",
        "--seed",
        "8",
    ]);
    assert_ne!(a, other);
    assert_eq!(
        stdout(&["run", "witness", "--seed", "7"]),
        stdout(&["run", "witness", "--seed", "7"])
    );
}

#[test]
fn timing_is_opt_in() {
    assert!(!stdout(&["witness", "--steps", "64"]).contains("wall_time_s"));
    assert!(stdout(&["witness", "--steps", "64", "--record-timing"]).contains("wall_time_s"));
}

#[test]
fn list_is_stable_and_complete() {
    let a = stdout(&["list"]);
    assert_eq!(a, stdout(&["list"]));
    let names: Vec<_> = a.lines().map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "witness",
            "square_holonomy",
            "degeneracy_sweep",
            "adiabatic_sweep",
            "noise_ensemble",
            "path_perturb",
            "gyro"
        ]
    );
    assert!(a.contains("witness: non-Abelian ordering difference"));
}

#[test]
fn exit_codes_by_category() {
    assert_eq!(
        nvholo(&["run", "witness", "--set", "stepz=3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nvholo(&["run", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        nvholo(&["run", "witness", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nvholo(&[
            "run",
            "noise_ensemble",
            "--set",
            "steps=1000",
            "--set",
            "members=2"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        nvholo(&["holonomy", "--out", "/nonexistent/dir/x.json"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn file_output_and_time_units() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let out_s = out.to_str().unwrap();
    stdout(&[
        "sweep-degeneracy",
        "--path",
        "square",
        "--deltas",
        "-0.1",
        "--times-us",
        "0.02",
        "--out",
        out_s,
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(3).unwrap();
    let t: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 57.4).abs() < 1e-9, "{row}");
}

#[test]
fn path_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("square.path");
    std::fs::write(
        &file,
        "# the square again\nlatitude(pi/3, 0, pi/3)\nlongitude(pi/3, pi/3, 2*pi/3)\n\
         latitude(2*pi/3, pi/3, 0)\nlongitude(0, 2*pi/3, pi/3)\n",
    )
    .unwrap();
    let a: Value =
        serde_json::from_str(&stdout(&["holonomy", "--path", file.to_str().unwrap()])).unwrap();
    let b: Value = serde_json::from_str(&stdout(&["holonomy"])).unwrap();
    assert_eq!(a["result"]["matrix"], b["result"]["matrix"]);
}

#[test]
fn spec_files_and_batches() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("w.toml");
    std::fs::write(&spec, "experiment = \"witness\"\nseed = 7\n").unwrap();
    assert_eq!(
        stdout(&["run", "--spec", spec.to_str().unwrap()]),
        stdout(&["run", "witness", "--seed", "7"])
    );

    let batch = dir.path().join("all.toml");
    std::fs::write(
        &batch,
        "experiment = \"gyro\"\noutput = \"gyro.json\"\n---\n\
         experiment = \"square_holonomy\"\n[params]\nsteps = 128\n",
    )
    .unwrap();
    let out = nvholo(&[
        "batch",
        batch.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("gyro.json").exists());
    let second: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("02_square_holonomy.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(second["provenance"]["params"]["steps"], 128);

    std::fs::write(
        &batch,
        "experiment = \"gyro\"\n---\nexperiment = \"gyro\"\nbogus = 1\n",
    )
    .unwrap();
    assert_eq!(
        nvholo(&["batch", batch.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
