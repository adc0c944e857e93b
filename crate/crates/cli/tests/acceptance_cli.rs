//! CLI acceptance: byte-identical reruns under fixed seeds, exit codes, and
//! end-to-end round trips through the file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn thrg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thrg"))
}

fn write_fixture(dir: &Path) -> PathBuf {
    let path = dir.join("fixture.tsv");
    let mut text = String::from("% fixture\n");
    let edges: &[(u32, u32)] = &[
        (0, 1),
        (1, 2),
        (0, 2),
        (2, 3),
        (3, 4),
        (2, 4),
        (4, 5),
        (5, 6),
        (4, 6),
        (6, 7),
        (0, 7),
        (1, 7),
    ];
    for (t, (u, v)) in edges.iter().enumerate() {
        text.push_str(&format!("{u} {v} {t}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn c8_extract_generate_eval_are_byte_identical_across_reruns() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());

    let grammar_a = tmp.path().join("a.thrg");
    let grammar_b = tmp.path().join("b.thrg");
    for (out, dump) in [(&grammar_a, "a"), (&grammar_b, "b")] {
        run_ok(
            thrg()
                .arg("extract")
                .arg(&fixture)
                .args(["--beta", "4", "--alpha", "1", "--seed", "11"])
                .arg("-o")
                .arg(out)
                .arg("--dump-graph")
                .arg(tmp.path().join(format!("{dump}.graph")))
                .arg("--dump-td")
                .arg(tmp.path().join(format!("{dump}.td"))),
        );
    }
    assert_eq!(
        std::fs::read(&grammar_a).unwrap(),
        std::fs::read(&grammar_b).unwrap()
    );
    assert_eq!(
        std::fs::read(tmp.path().join("a.graph")).unwrap(),
        std::fs::read(tmp.path().join("b.graph")).unwrap()
    );
    assert_eq!(
        std::fs::read(tmp.path().join("a.td")).unwrap(),
        std::fs::read(tmp.path().join("b.td")).unwrap()
    );

    let gen_a = tmp.path().join("gen-a");
    let gen_b = tmp.path().join("gen-b");
    for dir in [&gen_a, &gen_b] {
        run_ok(
            thrg()
                .arg("generate")
                .arg(&grammar_a)
                .args(["--size", "8", "--mode", "exact", "--trials", "5", "--seed", "3"])
                .arg("-o")
                .arg(dir),
        );
    }
    let files_a = read_dir_bytes(&gen_a);
    assert_eq!(files_a.len(), 5);
    assert_eq!(files_a, read_dir_bytes(&gen_b));

    let eval_out = |paths: &[(String, Vec<u8>)]| {
        let mut cmd = thrg();
        cmd.arg("eval").arg(&fixture);
        for (name, _) in paths {
            cmd.arg(gen_a.join(name));
        }
        cmd.args(["--format", "csv"]);
        run_ok(&mut cmd).stdout
    };
    assert_eq!(eval_out(&files_a), eval_out(&files_a));

    println!("ACCEPTANCE C8 PASS extract/generate/eval reruns are byte-identical");
}

#[test]
fn c8_baseline_and_experiment_are_byte_identical_across_reruns() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());

    for model in ["chung-lu", "erdos-renyi"] {
        let out_a = tmp.path().join(format!("{model}-a"));
        let out_b = tmp.path().join(format!("{model}-b"));
        for dir in [&out_a, &out_b] {
            run_ok(
                thrg()
                    .arg("baseline")
                    .arg(&fixture)
                    .args(["--model", model, "--trials", "4", "--seed", "19"])
                    .arg("-o")
                    .arg(dir),
            );
        }
        assert_eq!(read_dir_bytes(&out_a), read_dir_bytes(&out_b));
    }

    let config = tmp.path().join("exp.cfg");
    std::fs::write(
        &config,
        format!(
            "dataset = fixture:{}\nbetas = 2, 4\nalphas = 0, 1\n\
             generators = thrg, chung-lu\ntrials = 3\nseed = 5\nmetrics = degree\n",
            fixture.display()
        ),
    )
    .unwrap();
    let run = |dir: &Path| {
        run_ok(
            thrg()
                .arg("experiment")
                .arg("--config")
                .arg(&config)
                .arg("--output")
                .arg(dir),
        );
        std::fs::read(dir.join("results.csv")).unwrap()
    };
    let csv_a = run(&tmp.path().join("exp-a"));
    let csv_b = run(&tmp.path().join("exp-b"));
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("dataset,generator,beta,alpha,metric,mean,ci95,trials\n"));
    // thrg: 2 betas x 2 alphas, chung-lu: 2 betas
    assert_eq!(text.lines().count(), 1 + 4 + 2);

    println!("ACCEPTANCE C8 PASS baseline/experiment reruns are byte-identical");
}

#[test]
fn usage_errors_exit_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());
    // beta = 0 violates the argument range
    let out = thrg()
        .arg("extract")
        .arg(&fixture)
        .args(["--beta", "0"])
        .arg("-o")
        .arg(tmp.path().join("x.thrg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = thrg().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_code_1() {
    let tmp = TempDir::new().unwrap();
    // a grammar whose only derivation has 3 vertices: size 5 is unreachable
    let grammar = tmp.path().join("fixed.thrg");
    std::fs::write(
        &grammar,
        "thrg-grammar v1\nalpha=0\nbeta=1\nseed=0\nsource=hand\nrules=1\n\
         rule lhs_arity=0 history=- internal=3 terminals=[i0-i1,i0-i2,i1-i2] nonterminals=[] count=1\n",
    )
    .unwrap();
    let out = thrg()
        .arg("generate")
        .arg(&grammar)
        .args(["--size", "5", "--mode", "exact"])
        .arg("-o")
        .arg(tmp.path().join("gen"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("unreachable") && stderr.contains("nearest") && stderr.contains('3'),
        "stderr should name nearest reachable sizes: {stderr}"
    );

    let out = thrg()
        .arg("extract")
        .arg(tmp.path().join("missing.tsv"))
        .args(["--beta", "2"])
        .arg("-o")
        .arg(tmp.path().join("y.thrg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn free_mode_runs_and_sizes_vary() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());
    let grammar = tmp.path().join("g.thrg");
    run_ok(
        thrg()
            .arg("extract")
            .arg(&fixture)
            .args(["--beta", "4", "--seed", "2"])
            .arg("-o")
            .arg(&grammar),
    );
    let dir = tmp.path().join("free");
    run_ok(
        thrg()
            .arg("generate")
            .arg(&grammar)
            .args(["--mode", "free", "--trials", "20", "--seed", "7"])
            .arg("-o")
            .arg(&dir),
    );
    assert_eq!(read_dir_bytes(&dir).len(), 20);
}

#[test]
fn eval_of_original_against_itself_is_zero() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());
    let out = run_ok(
        thrg()
            .arg("eval")
            .arg(&fixture)
            .arg(&fixture)
            .args(["--format", "csv"]),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mean_line = stdout
        .lines()
        .find(|l| l.starts_with("mean,"))
        .expect("mean row");
    assert_eq!(mean_line, "mean,0,0,0,0,0");
}

#[test]
fn validate_td_reports_all_checks() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());
    let dump = tmp.path().join("nodes.td");
    let out = run_ok(
        thrg()
            .arg("validate-td")
            .arg(&fixture)
            .args(["--beta", "3", "--cnf"])
            .arg("--dump")
            .arg(&dump),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    for key in [
        "vertex-cover: ok",
        "edge-cover: ok",
        "running-intersection: ok",
        "cnf-vertex-cover: ok",
        "width=",
        "cnf_width=",
    ] {
        assert!(stdout.contains(key), "missing `{key}` in:\n{stdout}");
    }
    let dump_text = std::fs::read_to_string(&dump).unwrap();
    assert!(dump_text.lines().count() >= 2);
    assert!(dump_text.contains("bag={"));
}

#[test]
fn grammar_files_round_trip_through_the_cli() {
    let tmp = TempDir::new().unwrap();
    let fixture = write_fixture(tmp.path());
    let grammar = tmp.path().join("g.thrg");
    run_ok(
        thrg()
            .arg("extract")
            .arg(&fixture)
            .args(["--beta", "4", "--alpha", "1", "--seed", "13"])
            .arg("-o")
            .arg(&grammar),
    );
    let text = std::fs::read_to_string(&grammar).unwrap();
    let parsed = thrg_core::grammar::deserialize(&text).unwrap();
    assert_eq!(thrg_core::grammar::serialize(&parsed), text);
    // generated samples land at the requested exact size
    let dir = tmp.path().join("gen");
    run_ok(
        thrg()
            .arg("generate")
            .arg(&grammar)
            .args(["--size", "8", "--mode", "reject", "--trials", "2", "--seed", "1"])
            .arg("-o")
            .arg(&dir),
    );
    for (_, bytes) in read_dir_bytes(&dir) {
        let body = String::from_utf8(bytes).unwrap();
        let g = thrg_core::temporal::parse_static_edgelist(&body).unwrap();
        assert_eq!(g.vertex_count(), 8);
    }
}
