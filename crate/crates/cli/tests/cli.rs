use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;

use majcol::graph::{random_digraph, read_edge_list, write_edge_list};
use majcol::verify::{check_fraction, check_majority, read_colouring, read_lists, respects_lists};
use majcol_cli::{run, EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn majcol(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("majcol").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn three_cycle(dir: &TempDir) -> PathBuf {
    write(dir, "c3.txt", "3\n0 1\n1 2\n2 0\n")
}

#[test]
fn generate_regular_five() {
    let o = majcol(&["generate", "regular", "--q", "5"]);
    assert_eq!(o.code, EXIT_OK);
    let g = read_edge_list(&o.stdout).unwrap();
    assert_eq!(g.arc_count(), 10);
    assert!(g.is_tournament());
    assert!((0..5).all(|v| g.out_degree(v) == 2));
}

#[test]
fn generate_even_regular_is_usage_error() {
    let o = majcol(&["generate", "regular", "--q", "4"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("odd"));
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let o = majcol(&[
            "generate",
            "tournament",
            "--n",
            "100",
            "--seed",
            "7",
            "--out",
            s(p),
        ]);
        assert_eq!(o.code, EXIT_OK);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(read_edge_list(&text).unwrap().is_tournament());
}

#[test]
fn generate_rejects_bad_probability() {
    let o = majcol(&["generate", "digraph", "--n", "5", "--p", "1.5"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn generate_regular_random_and_lists() {
    let o = majcol(&["generate", "regular-random", "--q", "11", "--seed", "3"]);
    let g = read_edge_list(&o.stdout).unwrap();
    assert!(g.is_tournament() && (0..11).all(|v| g.out_degree(v) == 5));
    let o = majcol(&[
        "generate",
        "lists",
        "--n",
        "6",
        "--m",
        "3",
        "--palette",
        "9",
    ]);
    let lists = read_lists(&o.stdout).unwrap();
    assert_eq!(lists.len(), 6);
    assert!(lists.lists().iter().flatten().all(|&c| c < 9));
    let o = majcol(&[
        "generate",
        "lists",
        "--n",
        "6",
        "--m",
        "4",
        "--palette",
        "3",
    ]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn colour_partition_passes_majority_check() {
    let dir = TempDir::new().unwrap();
    for (i, p) in [0.1, 0.5, 0.9].into_iter().enumerate() {
        let g = random_digraph(60, p, i as u64).unwrap();
        let input = write(&dir, "g.txt", &write_edge_list(&g));
        let out = dir.path().join("c.txt");
        let o = majcol(&[
            "colour",
            "partition",
            "--k",
            "2",
            "--input",
            s(&input),
            "--out",
            s(&out),
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.contains("# verdict: PASS"));
        let c = read_colouring(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(c.colours().iter().all(|&x| x < 4));
        assert!(check_majority(&g, &c, 2).is_empty());
    }
}

#[test]
fn colour_stdout_is_a_colouring_file() {
    let dir = TempDir::new().unwrap();
    let input = three_cycle(&dir);
    let o = majcol(&["colour", "partition", "--k", "2", "--input", s(&input)]);
    assert_eq!(o.code, EXIT_OK);
    let c = read_colouring(&o.stdout).unwrap();
    assert_eq!(c.len(), 3);
}

#[test]
fn colour_list_passes_two_thirds() {
    let dir = TempDir::new().unwrap();
    let g = random_digraph(80, 0.3, 5).unwrap();
    let input = write(&dir, "g.txt", &write_edge_list(&g));
    let lists = dir.path().join("l.txt");
    majcol(&[
        "generate",
        "lists",
        "--n",
        "80",
        "--m",
        "3",
        "--palette",
        "9",
        "--out",
        s(&lists),
    ]);
    let out = dir.path().join("c.txt");
    let o = majcol(&[
        "colour",
        "list",
        "--lists",
        s(&lists),
        "--input",
        s(&input),
        "--out",
        s(&out),
        "--json",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let summary: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(summary["verdict"], "PASS");
    assert_eq!(summary["guarantee"], "2/3");
    let c = read_colouring(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let l = read_lists(&std::fs::read_to_string(&lists).unwrap()).unwrap();
    assert!(respects_lists(&c, &l));
    assert!(check_fraction(&g, &c, 2, 3).is_empty());
}

#[test]
fn colour_arcless_is_trivial() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "g.txt", "4\n");
    let o = majcol(&[
        "colour",
        "partition",
        "--k",
        "3",
        "--input",
        s(&input),
        "--json",
    ]);
    assert_eq!(o.code, EXIT_OK);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["max_monochrome_fraction"], 0.0);
    assert_eq!(v["colours"].as_array().unwrap().len(), 4);
    for key in [
        "vertices",
        "palette_size",
        "colours_used",
        "guarantee",
        "violations",
        "solver",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn colour_with_capacities() {
    let dir = TempDir::new().unwrap();
    let g = random_digraph(50, 0.4, 8).unwrap();
    let input = write(&dir, "g.txt", &write_edge_list(&g));
    let o = majcol(&[
        "colour",
        "partition",
        "--capacities",
        "1/2,1/4,1/4",
        "--input",
        s(&input),
        "--json",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["palette_size"], 3);
    let o = majcol(&[
        "colour",
        "partition",
        "--capacities",
        "1/2,1/3",
        "--input",
        s(&input),
    ]);
    assert_eq!(o.code, EXIT_USAGE);
    let o = majcol(&[
        "colour",
        "partition",
        "--capacities",
        "0.5,0.5",
        "--input",
        s(&input),
    ]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn colour_usage_errors() {
    let dir = TempDir::new().unwrap();
    let input = three_cycle(&dir);
    assert_eq!(
        majcol(&["colour", "partition", "--input", s(&input)]).code,
        EXIT_USAGE
    );
    assert_eq!(
        majcol(&["colour", "partition", "--k", "1", "--input", s(&input)]).code,
        EXIT_USAGE
    );
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        majcol(&["colour", "partition", "--k", "2", "--input", s(&missing)]).code,
        EXIT_USAGE
    );
    let bad = write(&dir, "bad.txt", "2\n0 0\n");
    let o = majcol(&["colour", "partition", "--k", "2", "--input", s(&bad)]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("line 2"));
}

#[test]
fn verify_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let input = three_cycle(&dir);
    let good = write(&dir, "good.txt", "0 0\n1 1\n2 2\n");
    let o = majcol(&[
        "verify",
        "--input",
        s(&input),
        "--colouring",
        s(&good),
        "--k",
        "2",
    ]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout.trim(), "PASS");

    let bad = write(&dir, "bad.txt", "0 0\n1 0\n2 1\n");
    let o = majcol(&[
        "verify",
        "--input",
        s(&input),
        "--colouring",
        s(&bad),
        "--k",
        "2",
    ]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.stdout.starts_with("FAIL"));
    assert!(o.stdout.contains("vertex 0:"));
    assert!(!o.stdout.contains("vertex 1:"));

    let o = majcol(&[
        "verify",
        "--input",
        s(&input),
        "--colouring",
        s(&bad),
        "--num",
        "2",
        "--den",
        "3",
        "--json",
    ]);
    assert_eq!(o.code, EXIT_FAIL);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "FAIL");
    assert_eq!(v["threshold"], "2/3");
    assert_eq!(v["violations"][0]["vertex"], 0);
    assert_eq!(v["violations"][0]["allowed"], 0);
}

#[test]
fn verify_usage_errors() {
    let dir = TempDir::new().unwrap();
    let input = three_cycle(&dir);
    let short = write(&dir, "short.txt", "0 0\n1 1\n");
    let o = majcol(&[
        "verify",
        "--input",
        s(&input),
        "--colouring",
        s(&short),
        "--k",
        "2",
    ]);
    assert_eq!(o.code, EXIT_USAGE);
    let good = write(&dir, "good.txt", "0 0\n1 1\n2 2\n");
    for extra in [
        &["--num", "3", "--den", "2"][..],
        &["--k", "2", "--num", "1", "--den", "2"],
        &[],
    ] {
        let mut args = vec!["verify", "--input", s(&input), "--colouring", s(&good)];
        args.extend_from_slice(extra);
        assert_eq!(majcol(&args).code, EXIT_USAGE, "{extra:?}");
    }
}

#[test]
fn experiment_report() {
    let args = [
        "experiment",
        "--n",
        "2000",
        "--trials",
        "100",
        "--seed",
        "1",
    ];
    let first = majcol(&args);
    assert_eq!(first.code, EXIT_OK);
    assert_eq!(first.stdout, majcol(&args).stdout);
    let v: Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(v["bad_counts"].as_array().unwrap().len(), 100);
    assert!(v["best_bad_count"].as_u64().unwrap() <= 205);
    assert!(v.get("dyadic_classes").is_none());
    for key in [
        "n",
        "trials",
        "seed",
        "best_trial",
        "mean_bad_count",
        "best_colouring",
        "min_out_degree",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn experiment_dyadic_report() {
    let o = majcol(&[
        "experiment",
        "--n",
        "300",
        "--trials",
        "5",
        "--min-outdeg-report",
    ]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["dyadic_within_capacity"], true);
    let classes = v["dyadic_classes"].as_array().unwrap();
    assert!(!classes.is_empty());
    let total: u64 = classes.iter().map(|c| c["size"].as_u64().unwrap()).sum();
    assert!(total <= 300);
}

#[test]
fn experiment_rejects_non_tournament() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "g.txt", "3\n0 1\n");
    let o = majcol(&["experiment", "--input", s(&input), "--trials", "3"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn lp_bounds() {
    let o = majcol(&["lp", "--lo", "1", "--hi", "1023", "--tail", "1/4"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("guarantee: 7"));
    let o = majcol(&["lp", "--lo", "1", "--hi", "1023", "--json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["optimum_decimal"].as_f64().unwrap() < 7.75);
    assert_eq!(v["tail"], "1/4");
    let o = majcol(&["lp", "--lo", "55", "--hi", "1023", "--json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["optimum_decimal"].as_f64().unwrap() < 0.75);
    let o = majcol(&["lp", "--lo", "1", "--hi", "1", "--json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["optimum"], "1");
}

#[test]
fn lp_usage_errors() {
    assert_eq!(majcol(&["lp", "--lo", "5", "--hi", "2"]).code, EXIT_USAGE);
    assert_eq!(majcol(&["lp", "--lo", "0", "--hi", "2"]).code, EXIT_USAGE);
    assert_eq!(
        majcol(&["lp", "--lo", "1", "--hi", "2", "--tail", "0.25"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        majcol(&["lp", "--lo", "1", "--hi", "2", "--tail", "-1/4"]).code,
        EXIT_USAGE
    );
}

#[test]
fn exact_values() {
    let dir = TempDir::new().unwrap();
    let c3 = three_cycle(&dir);
    let o = majcol(&["exact", "--input", s(&c3), "--k", "2"]);
    assert_eq!((o.code, o.stdout.trim()), (EXIT_OK, "3"));
    let r5 = dir.path().join("r5.txt");
    majcol(&["generate", "regular", "--q", "5", "--out", s(&r5)]);
    let o = majcol(&["exact", "--input", s(&r5), "--k", "3", "--json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["min_colours"], 5);
    let o = majcol(&["exact", "--input", s(&r5), "--k", "3", "--m-max", "4"]);
    assert_eq!((o.code, o.stdout.trim()), (EXIT_OK, "none"));
}

#[test]
fn exact_budget_has_its_own_exit_code() {
    let dir = TempDir::new().unwrap();
    let g = random_digraph(40, 0.9, 1).unwrap();
    let input = write(&dir, "g.txt", &write_edge_list(&g));
    let o = majcol(&["exact", "--input", s(&input), "--k", "2", "--budget", "100"]);
    assert_eq!(o.code, EXIT_BUDGET);
    assert_ne!(EXIT_BUDGET, EXIT_OK);
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(majcol(&["--help"]).code, EXIT_OK);
    assert_eq!(majcol(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(majcol(&[]).code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let input = three_cycle(&dir);
    let bad = write(&dir, "bad.txt", "0 0\n1 0\n2 1\n");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_majcol"))
        .args([
            "verify",
            "--input",
            s(&input),
            "--colouring",
            s(&bad),
            "--k",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_FAIL));
    assert!(String::from_utf8_lossy(&status.stdout).contains("vertex 0:"));
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_majcol"))
        .args(["generate", "regular", "--q", "4"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
}
