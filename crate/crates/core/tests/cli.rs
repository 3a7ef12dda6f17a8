use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn pssolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pssolve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const EXP: &str = "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\n";

#[test]
fn exponential_golden_output() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "exp.txt", &format!("{EXP}A[1]:\n1\n"));
    for algo in ["dense", "dac", "newton"] {
        let o = pssolve(&["solve", &file, "--algo", algo]);
        assert_eq!(o.status.code(), Some(0), "{algo}");
        let text = stdout(&o);
        assert!(text.starts_with("p: 101\nn: 1\nN: 4\nt: 1\n"), "{text}");
        assert!(text.contains("K[0]:\n1\nK[1]:\n1\nK[2]:\n51\nK[3]:\n17\n"), "{algo}: {text}");
    }
}

#[test]
fn inconsistent_instance_prints_bot() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "bot.txt", &format!("{EXP}C[0]:\n1\n"));
    let out = dir.path().join("sol.txt");
    let o = pssolve(&["solve", &file, "--algo", "dac", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let sol = std::fs::read_to_string(&out).unwrap();
    assert!(sol.ends_with("BOT\n"));
    let o = pssolve(&["check", &file, out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn newton_on_bad_spectrum_exits_2() {
    let dir = TempDir::new().unwrap();
    // A_0 = diag(0, 1): R_1 overlaps the spectrum
    let file = write(dir.path(), "bad.txt", "p: 101\nq: 1\nk: 1\nn: 2\nN: 4\nA[0]:\n0 0\n0 1\n");
    let o = pssolve(&["solve", &file, "--algo", "newton"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("fails at i = 1"), "{err}");
    assert_eq!(pssolve(&["solve", &file, "--algo", "dac"]).status.code(), Some(0));
}

#[test]
fn check_reports_perturbed_and_truncated_solutions() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "exp.txt", &format!("{EXP}A[1]:\n1\n"));
    let sol = stdout(&pssolve(&["solve", &file]));
    let good = write(dir.path(), "good.txt", &sol);
    assert_eq!(pssolve(&["check", &file, &good]).status.code(), Some(0));

    let bad = write(dir.path(), "bad.txt", &sol.replace("K[2]:\n51\n", "K[2]:\n52\n"));
    let o = pssolve(&["check", &file, &bad]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("coefficient 2"), "{err}");

    let short = write(dir.path(), "short.txt", "p: 101\nn: 1\nN: 3\nt: 1\nF[0]:\n0\nK[0]:\n1\nK[1]:\n1\nK[2]:\n51\n");
    assert_eq!(pssolve(&["check", &file, &short]).status.code(), Some(1));
}

#[test]
fn parse_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "broken.txt", "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nA[0]:\n1 2\n");
    let o = pssolve(&["solve", &file]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 7"));
    assert_eq!(pssolve(&["gen", "--n", "0", "--N", "3"]).status.code(), Some(1));
    assert_eq!(pssolve(&["solve", &file, "--algo", "fast"]).status.code(), Some(1));
}

#[test]
fn gen_solve_check_round_trip() {
    let dir = TempDir::new().unwrap();
    for seed in 0..100u64 {
        let n = (1 + seed % 3).to_string();
        let big_n = (2 + seed % 11).to_string();
        let k = (1 + seed % 3).to_string();
        let q = if seed % 2 == 0 { "one" } else { "random" };
        let s = seed.to_string();
        let g = pssolve(&["gen", "--seed", &s, "--n", &n, "--N", &big_n, "--k", &k, "--q", q, "--good-spectrum"]);
        assert_eq!(g.status.code(), Some(0));
        let again = pssolve(&["gen", "--seed", &s, "--n", &n, "--N", &big_n, "--k", &k, "--q", q, "--good-spectrum"]);
        assert_eq!(g.stdout, again.stdout);
        let prob = write(dir.path(), "prob.txt", &stdout(&g));
        for algo in ["dense", "dac", "newton"] {
            let out = dir.path().join(format!("{algo}.txt"));
            let o = pssolve(&["solve", &prob, "--algo", algo, "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "seed {seed} {algo}: {}", String::from_utf8_lossy(&o.stderr));
            let c = pssolve(&["check", &prob, out.to_str().unwrap()]);
            assert_eq!(c.status.code(), Some(0), "seed {seed} {algo}: {}", String::from_utf8_lossy(&c.stderr));
        }
    }
}

#[test]
fn bench_emits_the_fixed_header() {
    let o = pssolve(&["bench", "--n", "2", "--N", "8", "--reps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algo,n,k,N,q_is_one,p,seed,ms,mul_count");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("dense,2,1,8,false,268435399,0,"));
}
