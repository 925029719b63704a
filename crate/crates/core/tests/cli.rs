use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use warpcluster::io::{ingest, read_assignments, IngestOptions, RunSummary};
use warpcluster::synthetic::shape_groups;
use warpcluster::{assignment_cost, build_matrix, solve_exact, DistanceMatrix, WarpWindow};

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/two_blobs_40.csv")
}

fn warpcluster(args: &[&str], input: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpcluster"))
        .arg("--input")
        .arg(input)
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_csv(dir: &Path, name: &str, rows: &[Vec<f64>]) -> PathBuf {
    let text: String = rows
        .iter()
        .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn exact_run_writes_consistent_outputs() {
    let out = tempfile::tempdir().unwrap();
    let o = warpcluster(
        &["--method", "exact", "--k", "2", "--scores", "--workers", "2"],
        &bundled(),
        out.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("certificate=global_optimal"));

    let data = ingest(&[bundled()], IngestOptions::default()).unwrap();
    let d = build_matrix(&data, WarpWindow::Unlimited, 1).unwrap();
    let summary = RunSummary::load(out.path().join("summary.json")).unwrap();
    let (medoids, assignment) = read_assignments(
        &out.path().join("assignments.csv"),
        &out.path().join("medoids.csv"),
        &data,
    )
    .unwrap();
    let direct = solve_exact(&d, 2).unwrap();

    assert_eq!(summary.p, 40);
    assert_eq!(summary.k, 2);
    assert_eq!(summary.method, "exact");
    assert_eq!(summary.certificate, "global_optimal");
    assert_eq!(summary.computed_pairs, 40 * 39 / 2);
    assert_eq!((summary.length_min, summary.length_max), (24, 32));
    assert_eq!(medoids, direct.medoids);
    assert_eq!(assignment, direct.assignment);
    assert_eq!(assignment_cost(&d, &assignment).to_bits(), summary.total_cost.to_bits());

    // Rows alternate between the two blobs.
    for (j, &m) in assignment.iter().enumerate() {
        assert_eq!(m % 2, j % 2);
    }

    let scores = fs::read_to_string(out.path().join("scores.csv")).unwrap();
    let (sil, elbow) = scores.split_once("\n\n").unwrap();
    assert_eq!(sil.lines().count(), 41);
    assert_eq!(elbow.lines().collect::<Vec<_>>()[0], "k,cost");
    assert_eq!(elbow.lines().count(), 3);
    assert!(summary.mean_silhouette.unwrap() > 0.8);
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = warpcluster(&["--k", "3", "--seed", "11"], &bundled(), dir.path());
        assert!(o.status.success());
    }
    for f in ["assignments.csv", "medoids.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
    let sa = RunSummary::load(a.path().join("summary.json")).unwrap();
    let sb = RunSummary::load(b.path().join("summary.json")).unwrap();
    assert_eq!(sa.total_cost.to_bits(), sb.total_cost.to_bits());
    assert_eq!(sa.certificate, "local_heuristic");
    assert!(sa.computed_pairs <= 40 * 39 / 2);
}

#[test]
fn k_range_writes_one_directory_per_k() {
    let out = tempfile::tempdir().unwrap();
    let o = warpcluster(
        &["--method", "exact", "--k-range", "1..3", "--scores"],
        &bundled(),
        out.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut prev = f64::INFINITY;
    for k in 1..=3 {
        let dir = out.path().join(format!("k{k}"));
        let s = RunSummary::load(dir.join("summary.json")).unwrap();
        assert_eq!(s.k, k);
        assert!(s.total_cost <= prev);
        assert_eq!(s.mean_silhouette.is_some(), k >= 2);
        prev = s.total_cost;
        assert!(dir.join("scores.csv").is_file());
    }
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = |args: &[&str], input: &Path| warpcluster(args, input, &out).status.code();

    assert_eq!(code(&["--k", "41"], &bundled()), Some(7));
    assert_eq!(code(&["--k", "0"], &bundled()), Some(7));
    assert_eq!(code(&["--k", "2"], &dir.path().join("missing.csv")), Some(3));
    assert_eq!(code(&["--k", "2", "--method", "nope"], &bundled()), Some(2));
    assert_eq!(code(&["--k", "2", "--workers", "0"], &bundled()), Some(2));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,3\n4,oops,6\n").unwrap();
    let o = warpcluster(&["--k", "1"], &bad, &out);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("oops"));

    let ragged = write_csv(dir.path(), "ragged.csv", &[vec![1.0; 10], vec![2.0; 3], vec![1.5; 10]]);
    assert_eq!(code(&["--k", "2", "--window", "2"], &ragged), Some(6));
    assert_eq!(code(&["--k", "2", "--window", "2", "--auto-widen"], &ragged), Some(0));
}

#[test]
fn labels_and_delimiter_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labelled.txt");
    fs::write(&path, "A;1;2;3\nA;1;2;4\nB;9;9;9\nB;9;8;9\n").unwrap();
    let out = dir.path().join("out");
    let o = warpcluster(
        &["--k", "2", "--labels", "--delimiter", ";", "--method", "exact"],
        &path,
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let assign = fs::read_to_string(out.join("assignments.csv")).unwrap();
    let rows: Vec<&str> = assign.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let medoid = |r: &str| r.split_once(',').unwrap().1.to_string();
    assert_eq!(medoid(rows[0]), medoid(rows[1]));
    assert_eq!(medoid(rows[2]), medoid(rows[3]));
    assert_ne!(medoid(rows[0]), medoid(rows[2]));
}

#[test]
fn saved_matrix_reloads_and_skips_dtw() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("d.txt");
    let m = matrix.to_str().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert!(warpcluster(
        &["--k", "2", "--method", "exact", "--save-matrix", m],
        &bundled(),
        &first
    )
    .status
    .success());
    assert!(warpcluster(
        &["--k", "2", "--method", "exact", "--load-matrix", m],
        &bundled(),
        &second
    )
    .status
    .success());

    let data = ingest(&[bundled()], IngestOptions::default()).unwrap();
    assert_eq!(
        DistanceMatrix::load(&matrix).unwrap(),
        build_matrix(&data, WarpWindow::Unlimited, 1).unwrap()
    );
    let a = RunSummary::load(first.join("summary.json")).unwrap();
    let b = RunSummary::load(second.join("summary.json")).unwrap();
    assert_eq!(a.total_cost.to_bits(), b.total_cost.to_bits());
    assert_eq!(b.computed_pairs, 0);

    // A matrix of the wrong size is rejected.
    let small = write_csv(dir.path(), "small.csv", &[vec![1.0], vec![2.0]]);
    assert_eq!(
        warpcluster(&["--k", "1", "--load-matrix", m], &small, &second)
            .status
            .code(),
        Some(8)
    );
}

#[test]
fn bench_reports_medians_per_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<Vec<f64>> = shape_groups(3, 10, 60, 0.2, 5)
        .iter()
        .map(|s| s.samples().to_vec())
        .collect();
    let input = write_csv(dir.path(), "shapes.csv", &rows);
    let mut matrices = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}"));
        let m = out.join("d.txt");
        fs::create_dir_all(&out).unwrap();
        let o = warpcluster(
            &[
                "--k",
                "3",
                "--method",
                "exact",
                "--workers",
                workers,
                "--bench",
                "3",
                "--save-matrix",
                m.to_str().unwrap(),
            ],
            &input,
            &out,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(out.join("bench.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("dataset,p,"));
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[1], "30");
        assert_eq!(cells[5], workers);
        assert_eq!(cells[7], "3");
        assert!(cells[9].parse::<f64>().unwrap() >= 0.0);
        matrices.push(fs::read(m).unwrap());
    }
    assert_eq!(matrices[0], matrices[1]);
}

#[test]
fn normalize_flag_is_recorded() {
    let out = tempfile::tempdir().unwrap();
    let o = warpcluster(&["--k", "2", "--normalize", "--window", "40"], &bundled(), out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = RunSummary::load(out.path().join("summary.json")).unwrap();
    assert!(s.normalized);
    assert_eq!(s.window, "40");
}
