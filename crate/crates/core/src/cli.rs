//! Command-line front end.
//!
//! Exit codes: 0 success (a `BOT` answer included), 1 usage or parse error,
//! 2 violated precondition, 3 internal invariant violation or a solution
//! that fails the residual check.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig};
use crate::error::Error;
use crate::field::DEFAULT_PRIME;
use crate::format::{parse_solution, read_problem, write_problem, write_solution};
use crate::oracle::{dense_solve, homogeneous_residual, random_instance_in, residual, Engine, QMode};
use crate::polymat::SeriesMatrix;
use crate::solution::SolutionSpace;
use crate::PrimeField;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pssolve", version, about = "Power-series solutions of linear differential and q-difference systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Dense,
    Dac,
    Newton,
}

impl From<Algo> for Engine {
    fn from(a: Algo) -> Engine {
        match a {
            Algo::Dense => Engine::Dense,
            Algo::Dac => Engine::Dac,
            Algo::Newton => Engine::Newton,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QModeArg {
    One,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem file.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dac")]
        algo: Algo,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against a problem file.
    Check { file: PathBuf, solution: PathBuf },
    /// Time the engines on random good-spectrum instances; CSV on stdout.
    Bench {
        #[arg(long = "n", value_delimiter = ',', default_value = "1")]
        ns: Vec<usize>,
        #[arg(long = "N", value_delimiter = ',', default_value = "64")]
        precisions: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "random")]
        q_mode: QModeArg,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "dense,dac,newton")]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        p: u64,
    },
    /// Print a random problem file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "N")]
        n_prec: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// `one`, `random`, or an integer.
        #[arg(long, default_value = "random")]
        q: String,
        #[arg(long)]
        good_spectrum: bool,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        p: u64,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidInstance(_) | Error::NotPrime(_) | Error::ModulusOutOfRange(_) | Error::Io(_) => EXIT_USAGE,
        Error::Spectrum(_) | Error::GammaVanishes { .. } | Error::Precondition(_) | Error::RetryBudgetExhausted { .. } => {
            EXIT_PRECONDITION
        }
        _ => EXIT_INTERNAL,
    }
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(exit_code(&e), e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Solve { file, algo, out: path } => {
            let inst = read_problem(&read(&file)?)?;
            let space = Engine::from(algo).solve(&inst)?;
            let text = write_solution(&space, inst.field().modulus(), inst.n(), inst.n_prec());
            emit(out, path, &text)
        }
        Command::Check { file, solution } => {
            let inst = read_problem(&read(&file)?)?;
            let sol = parse_solution(&read(&solution)?)?;
            if sol.p != inst.field().modulus() || sol.n != inst.n() {
                return Err(Failure(EXIT_USAGE, format!("solution is for p = {}, n = {}", sol.p, sol.n)));
            }
            if sol.n_prec < inst.n_prec() {
                return Err(Failure(
                    EXIT_USAGE,
                    format!("solution known modulo x^{} only, problem needs x^{}", sol.n_prec, inst.n_prec()),
                ));
            }
            match &sol.space {
                SolutionSpace::Bottom => {
                    if !dense_solve(&inst).is_bottom() {
                        return Err(Failure(EXIT_INTERNAL, "BOT claimed but the system is consistent".into()));
                    }
                }
                SolutionSpace::Affine { particular, basis } => {
                    if let Some((d, r)) = first_nonzero(&residual(particular, &inst)?) {
                        return Err(Failure(EXIT_INTERNAL, format!("particular solution fails at coefficient {d} (row {r})")));
                    }
                    for j in 0..basis.cols() {
                        if let Some((d, r)) = first_nonzero(&homogeneous_residual(&basis.column(j), &inst)?) {
                            return Err(Failure(EXIT_INTERNAL, format!("basis column {j} fails at coefficient {d} (row {r})")));
                        }
                    }
                }
            }
            let _ = writeln!(out, "ok");
            Ok(())
        }
        Command::Bench { ns, precisions, k, q_mode, algos, seed, reps, p } => {
            let cfg = BenchConfig {
                ns,
                precisions,
                k,
                q_mode: match q_mode {
                    QModeArg::One => QMode::One,
                    QModeArg::Random => QMode::Random,
                },
                algos: algos.into_iter().map(Engine::from).collect(),
                seed,
                reps,
                p,
            };
            let recs = bench::run(&cfg)?;
            bench::write_csv(&recs, out)?;
            Ok(())
        }
        Command::Gen { seed, n, n_prec, k, q, good_spectrum, p } => {
            if n == 0 || n_prec == 0 {
                return Err(Failure(EXIT_USAGE, "--n and --N must be positive".into()));
            }
            let q_mode = match q.as_str() {
                "one" => QMode::One,
                "random" => QMode::Random,
                v => QMode::Fixed(v.parse().map_err(|_| Failure(EXIT_USAGE, format!("bad --q `{v}`")))?),
            };
            let field = PrimeField::new(p)?;
            let inst = random_instance_in(field, seed, n, n_prec, k, q_mode, good_spectrum)?;
            let _ = out.write_all(write_problem(&inst).as_bytes());
            Ok(())
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure(EXIT_USAGE, e.to_string())),
    }
}

/// `(degree, row)` of the first nonzero coefficient.
fn first_nonzero(m: &SeriesMatrix) -> Option<(usize, usize)> {
    (0..m.prec()).find_map(|d| {
        let c = m.coefficient_matrix(d);
        (0..c.rows()).find(|&r| (0..c.cols()).any(|j| !c.get(r, j).is_zero())).map(|r| (d, r))
    })
}
