//! Binary-level tests: exit-code contract, output determinism, file
//! formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relgrowth"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("relgrowth-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn validate_exit_codes() {
    let dir = temp_dir("validate");
    let ok = run(
        &[
            "validate",
            "--input",
            fixture("f2_abelian.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_of(&ok));
    assert!(stdout_of(&ok).contains("VALID"));

    let bad = run(
        &[
            "validate",
            "--input",
            fixture("two_max_connected.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout_of(&bad);
    assert!(text.contains("INVALID"));
    assert!(
        text.contains("path between distinct maximal components"),
        "witness missing: {text}"
    );

    let no_hom = run(
        &[
            "validate",
            "--input",
            fixture("no_hom.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(no_hom.status.code(), Some(1));
    assert!(
        stderr_of(&no_hom).contains("homomorphism incomplete"),
        "{}",
        stderr_of(&no_hom)
    );

    let unreachable = run(
        &[
            "validate",
            "--input",
            fixture("unreachable.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(unreachable.status.code(), Some(1));
    assert!(stdout_of(&unreachable).contains("unreachable"));
}

#[test]
fn count_matches_known_values_and_is_deterministic() {
    let dir1 = temp_dir("count1");
    let dir2 = temp_dir("count2");
    for dir in [&dir1, &dir2] {
        let out = run(
            &["count", "--group", "f2", "--n-max", "12", "--seed", "9"],
            dir,
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    }
    let csv1 = std::fs::read(dir1.join("counts.csv")).unwrap();
    let csv2 = std::fs::read(dir2.join("counts.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical runs must be byte-identical");
    let text = String::from_utf8(csv1).unwrap();
    let row4 = text.lines().find(|l| l.starts_with("4,")).unwrap();
    assert_eq!(row4, "4,108,8,7.40740740741e-2");
    let row0 = text.lines().find(|l| l.starts_with("0,")).unwrap();
    assert_eq!(row0, "0,1,1,1.00000000000e0");
    // Odd lengths have zero kernel counts on this fixture.
    for n in [1usize, 3, 5, 7, 9, 11] {
        let row = text
            .lines()
            .find(|l| l.starts_with(&format!("{n},")))
            .unwrap();
        assert!(row.contains(",0,"), "odd row {row}");
    }
}

#[test]
fn count_with_target_and_by_weight() {
    let dir = temp_dir("target");
    let out = run(
        &[
            "count",
            "--group",
            "f2",
            "--n-max",
            "6",
            "--target",
            "1,0",
            "--by-weight",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("counts.csv")).unwrap();
    assert!(text.starts_with("n,total,target_count,ratio"));
    // N(1, (1,0)) = 1: the single word "a".
    let row1 = text.lines().find(|l| l.starts_with("1,")).unwrap();
    assert!(row1.starts_with("1,4,1,"), "{row1}");
    let weights = std::fs::read_to_string(dir.join("weights.csv")).unwrap();
    assert!(weights.starts_with("n,w1,w2,count"));
    assert!(weights.lines().any(|l| l == "4,0,0,8"));
}

#[test]
fn budget_exhaustion_exits_two() {
    let dir = temp_dir("budget");
    let out = run(
        &[
            "count",
            "--group",
            "f2",
            "--n-max",
            "40",
            "--table-budget",
            "500",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    // Partial output still lands when at least one step fit the budget.
    let text = std::fs::read_to_string(dir.join("counts.csv")).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn scan_finds_dual_points_and_is_seeded() {
    let dir = temp_dir("scan");
    let out = run(
        &[
            "scan",
            "--input",
            fixture("f2_abelian.aut").to_str().unwrap(),
            "--grid",
            "16",
            "--samples",
            "50",
            "--seed",
            "11",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let near = std::fs::read_to_string(dir.join("near_max.txt")).unwrap();
    assert!(
        near.contains("\"near_maximal\": [[0, 0], [8, 8]]"),
        "{near}"
    );
    assert!(near.contains("sampled_max_radius"));
    let scan = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    assert!(scan.starts_with("t1,t2,radius_0"));
    assert_eq!(scan.lines().count(), 1 + 16 * 16);

    // Rank-1 fixture: only the origin is near-maximal.
    let out1 = run(
        &[
            "scan",
            "--input",
            fixture("f2_rank1.aut").to_str().unwrap(),
            "--grid",
            "16",
        ],
        &dir,
    );
    assert_eq!(out1.status.code(), Some(0));
    let near1 = std::fs::read_to_string(dir.join("near_max.txt")).unwrap();
    assert!(near1.contains("\"near_maximal\": [[0]]"), "{near1}");
}

#[test]
fn fourier_cross_check_is_exact() {
    let dir = temp_dir("fourier");
    let out = run(
        &["fourier", "--group", "f2", "--n-max", "12", "--upto", "12"],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("fourier.csv")).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",true"), "row not exact: {line}");
    }
}

#[test]
fn analyze_reports_structure() {
    let dir = temp_dir("analyze");
    let out = run(
        &[
            "analyze",
            "--input",
            fixture("f2_abelian.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("analyze.txt")).unwrap();
    assert!(text.contains("difference lattice basis: [[1, 1], [0, 2]]"));
    assert!(text.contains("quotient order D_j: 2"));
    assert!(text.contains("global period D: 2"));
    assert!(text.contains("dual points: (0, 0) (1/2, 1/2)"));
    assert!(text.contains("dual points vs torus scan: PASS"));

    // Rank-1 weighting: trivial quotient data, single dual point.
    let rank1 = run(
        &[
            "analyze",
            "--input",
            fixture("f2_rank1.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(rank1.status.code(), Some(0), "{}", stderr_of(&rank1));
    let text1 = std::fs::read_to_string(dir.join("analyze.txt")).unwrap();
    assert!(text1.contains("quotient order D_j: 1"));
    assert!(text1.contains("global period D: 1"));
    assert!(text1.contains("dual points: (0)"));

    let zero = run(
        &[
            "analyze",
            "--input",
            fixture("zero_weight.aut").to_str().unwrap(),
        ],
        &dir,
    );
    assert_eq!(zero.status.code(), Some(1));
    assert!(stderr_of(&zero).contains("rank"));
}

#[test]
fn report_skips_fit_on_truncated_run() {
    let dir = temp_dir("report-trunc");
    let out = run(&["report", "--group", "f2", "--n-max", "20"], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(
        text.contains("SKIP  asymptotic exponent"),
        "fit should be skipped: {text}"
    );
    assert!(text.contains("PASS  structure cross-check"));
}

#[test]
fn report_fails_on_preasymptotic_window() {
    // An explicitly preasymptotic window misses the exponent band; the
    // report must say so and exit 3.
    let dir = temp_dir("report-fail");
    let out = run(
        &[
            "report", "--group", "f2", "--n-max", "20", "--window", "5:20",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("FAIL  asymptotic exponent"));
}

#[test]
fn report_full_run_passes() {
    let dir = temp_dir("report-full");
    let out = run(
        &[
            "report", "--group", "f2", "--n-max", "100", "--window", "40:100",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(dir.join("report.txt").exists());
    assert!(dir.join("counts.csv").exists());
    assert!(dir.join("fit.csv").exists());
}

#[test]
fn oracle_command_cross_checks() {
    let dir = temp_dir("oracle");
    let out = run(
        &[
            "oracle",
            "--group",
            "f2",
            "--input",
            fixture("f2_abelian.aut").to_str().unwrap(),
            "--n-max",
            "6",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("oracle.csv")).unwrap();
    assert!(text.lines().any(|l| l == "4,0,0,8"));
    // Word budget exhaustion is exit 2.
    let budget = run(
        &[
            "oracle",
            "--group",
            "f2",
            "--n-max",
            "20",
            "--word-budget",
            "100",
        ],
        &dir,
    );
    assert_eq!(budget.status.code(), Some(2));
}

#[test]
fn rationality_command_outputs() {
    let dir = temp_dir("rationality");
    let out = run(
        &[
            "rationality",
            "--group",
            "f2",
            "--n-max",
            "60",
            "--max-order",
            "12",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("rationality.txt")).unwrap();
    assert!(text.contains("recurrence found, order 2"));
    assert!(text.contains("no recurrence of order <= 12"));
    let csv = std::fs::read_to_string(dir.join("rationality.csv")).unwrap();
    assert!(csv.starts_with("sequence,order,index,coefficient"));
    assert!(csv.contains("totals,2,1,3"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = temp_dir("config");
    let config_path = dir.join("run.conf");
    std::fs::write(&config_path, "group = f2\nn_max = 8\nseed = 3\n# comment\n").unwrap();
    let out = run(
        &[
            "count",
            "--config",
            config_path.to_str().unwrap(),
            "--n-max",
            "6",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("counts.csv")).unwrap();
    // Flag n_max = 6 wins over the file's 8.
    assert_eq!(text.lines().count(), 1 + 7);

    let bad = run(
        &[
            "count",
            "--config",
            config_path.to_str().unwrap(),
            "--n-max",
            "2",
        ],
        &dir,
    );
    assert_eq!(bad.status.code(), Some(1), "n_max below 4 must be rejected");
}

#[test]
fn fit_command_reports_slope() {
    let dir = temp_dir("fit");
    let out = run(
        &[
            "fit", "--group", "f2", "--hom", "a:1;b:0", "--n-max", "80", "--window", "40:80",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.join("fit.txt")).unwrap();
    assert!(text.contains("target -5.00000000000e-1"), "{text}");
    let gnuplot = std::fs::read_to_string(dir.join("fit.csv")).unwrap();
    assert!(gnuplot.starts_with("# log(n)  log(count*lambda^-n)"));
    assert!(gnuplot.lines().count() > 30);
}
