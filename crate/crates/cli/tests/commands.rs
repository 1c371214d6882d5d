use std::path::Path;
use std::process::{Command, Output};

use lcc::report::{parse_ratio, RunReport};
use num_rational::Ratio;

fn lcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcc"))
        .args(args)
        .env_remove("LCC_ORACLE_CAP")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lcc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn report(stdout: &str) -> RunReport {
    let mut rows: Vec<RunReport> = serde_json::from_str(stdout).unwrap();
    assert_eq!(rows.len(), 1);
    rows.remove(0)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

fn uniform_text(n: usize) -> String {
    let mut s = format!("U {n}\n");
    for i in 0..n - 1 {
        s.push_str(&vec!["1"; n - 1 - i].join(" "));
        s.push('\n');
    }
    s
}

#[test]
fn generated_circular_graph_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "c12.g");
    ok(&["gen", "circular-u", "--n", "12", "--out", &g]);
    let text = ok(&["verify", &g]);
    assert!(text.starts_with("graph ok: 12 vertices"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{g}.json")).unwrap()).unwrap();
    assert_eq!(meta["family"], "circular-u");
}

#[test]
fn tight_generation_records_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "tight4.g");
    ok(&["gen", "tight", "--p", "4", "--M", "100", "--out", &g]);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{g}.json")).unwrap()).unwrap();
    assert_eq!(meta["n"], 20);
    assert_eq!(meta["expected_optimum"], 228);
    assert_eq!(meta["p"], 4);

    // The sidecar optimum gives an exact ratio for the matching length set.
    let r = report(&ok(&["solve", "--alg", "apx-undir", "--L", "4,10..20 step 2", &g]));
    let ratio = r.ratio.unwrap();
    assert!(ratio >= Ratio::from_integer(2) && ratio <= r.bound.unwrap(), "{ratio}");

    assert_eq!(lcc(&["gen", "tight", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn random_directed_generation_is_reproducible() {
    let golden = include_str!("golden/random_d10_s7.g");
    let first = ok(&["gen", "random", "--n", "10", "--seed", "7", "--kind", "D"]);
    let second = ok(&["gen", "random", "--n", "10", "--seed", "7", "--kind", "D"]);
    assert_eq!(first, second);
    assert_eq!(first, golden);
}

#[test]
fn uniform_triangles_have_ratio_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "uniform6.g", &uniform_text(6));
    let prefix = path(dir.path(), "run");
    let trace = path(dir.path(), "trace.jsonl");
    let r = report(&ok(&[
        "solve", "--alg", "apx-undir", "--L", "3", &g, "--oracle", "--out", &prefix, "--debug-trace", &trace,
    ]));
    assert_eq!(r.weight, Some(6));
    assert_eq!(r.oracle_weight, Some(6));
    assert_eq!(r.ratio, Some(Ratio::from_integer(1)));
    let cover = std::fs::read_to_string(format!("{prefix}.cover")).unwrap();
    assert_eq!(cover.lines().count(), 2);
    assert!(Path::new(&format!("{prefix}.report.json")).exists());
    assert!(Path::new(&trace).exists());
    let checked = ok(&["verify", &g, "--cover", &format!("{prefix}.cover"), "--L", "3"]);
    assert!(checked.contains("cover ok: 2 cycles, weight 6"));
}

#[test]
fn tight_p2_against_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "tight2.g");
    ok(&["gen", "tight", "--p", "2", "--M", "100", "--out", &g]);
    let r = report(&ok(&["solve", "--alg", "apx-undir", "--L", "4,6..12", &g, "--oracle"]));
    assert_eq!(r.oracle_weight, Some(216));
    assert!(r.ratio.unwrap() >= Ratio::from_integer(1));
    assert!(r.within_bound());
    let exact = report(&ok(&["solve", "--alg", "exact-min", "--L", "4,6..12", &g]));
    assert_eq!(exact.weight, Some(216));
}

#[test]
fn directed_random_against_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "rand8d.g");
    ok(&["gen", "random", "--n", "8", "--seed", "3", "--kind", "D", "--out", &g]);
    let r = report(&ok(&["solve", "--alg", "apx-dir", "--L", "2,3", &g, "--oracle", "--format", "json"]));
    // bound 2 * 8 * (p + 4) with p = 1
    assert_eq!(r.bound, Some(Ratio::from_integer(80)));
    assert!(r.within_bound());
    let csv = ok(&["solve", "--alg", "apx-dir", "--L", "2,3", &g, "--format", "csv"]);
    assert!(csv.starts_with("instance,algorithm,lengths"));
}

#[test]
fn refinements_from_cover_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "u8.g", &uniform_text(8));
    let big = write(dir.path(), "big.cover", "0 1 2 3 4 5 6 7\n");
    let r = report(&ok(&["solve", "--alg", "refine-min", "--L", "4", &g, "--cover", &big]));
    assert_eq!(r.weight, Some(8));
    assert!(r.within_bound());

    let r = report(&ok(&["solve", "--alg", "refine-max", "--L", "3..8", "--s", "2", &g, "--cover", &big]));
    assert!(r.weight.unwrap() * 2 >= 8);

    assert_eq!(
        lcc(&["solve", "--alg", "refine-min", "--L", "5", &g, "--cover", &big]).status.code(),
        Some(3)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g7 = write(dir.path(), "u7.g", &uniform_text(7));
    assert_eq!(lcc(&["solve", "--alg", "apx-undir", "--L", "3,,4", &g7]).status.code(), Some(2));
    assert_eq!(lcc(&["solve", "--alg", "apx-undir", "--L", "3", &g7]).status.code(), Some(3));
    let g13 = write(dir.path(), "u13.g", &uniform_text(13));
    assert_eq!(
        lcc(&["solve", "--alg", "apx-undir", "--L", "13", &g13, "--oracle"]).status.code(),
        Some(4)
    );
    assert!(lcc(&["solve", "--alg", "apx-undir", "--L", "13", &g13, "--oracle", "--oracle-cap", "13"])
        .status
        .success());
    let env_cap = Command::new(env!("CARGO_BIN_EXE_lcc"))
        .args(["solve", "--alg", "exact-min", "--L", "13", &g13])
        .env("LCC_ORACLE_CAP", "13")
        .output()
        .unwrap();
    assert!(env_cap.status.success());
    assert_eq!(lcc(&["solve", "--alg", "apx-undir", "--L", "3", "missing.g"]).status.code(), Some(2));

    let bad = write(dir.path(), "bad.g", "U 3\n1 5\n1\n");
    assert_eq!(lcc(&["verify", &bad]).status.code(), Some(1));
    assert_eq!(lcc(&["solve", "--alg", "apx-undir", "--L", "3", &bad]).status.code(), Some(2));
    assert_eq!(lcc(&["bogus"]).status.code(), Some(2));
}

#[test]
fn bench_tight_sweep_reports_ratios() {
    let out = ok(&["bench", "tight", "--values", "2,4", "--M", "200"]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[0][0], "tight-p2-m200");
    assert_eq!(&rows[0][6], "oracle");
    assert_eq!(&rows[1][6], "formula");
    assert_eq!(&rows[2][0], "max:tight");
    let max = parse_ratio(&rows[2][7]).unwrap();
    assert!(max >= parse_ratio(&rows[1][7]).unwrap());

    let json = ok(&["bench", "uniform", "--values", "3,6", "--format", "json"]);
    let rows: Vec<RunReport> = serde_json::from_str(&json).unwrap();
    assert!(rows[..2].iter().all(|r| r.ratio == Some(Ratio::from_integer(1))));
}
