//! Text formats for problem and solution files.
//!
//! A problem file is a `key: value` header followed by per-degree blocks:
//!
//! ```text
//! # x F' = F over F_101
//! p: 101
//! q: 1
//! k: 1
//! n: 1
//! N: 4
//! A[0]:
//! 1
//! C[0]:
//! 0
//! ```
//!
//! `A[d]:` is followed by `n` rows of `n` integers and `C[d]:` by `n` rows
//! of one integer. Integers may be negative or exceed `p`; they are reduced.
//! Degrees that are not listed are zero. Blank lines and `#` comments are
//! ignored.
//!
//! A solution file has the header `p`, `n`, `N`, `t` (the number of basis
//! columns) followed by `F[d]:` blocks of `n` rows of one integer and
//! `K[d]:` blocks of `n` rows of `t` integers, or the single line `BOT`
//! when there is no solution.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::oracle::ProblemInstance;
use crate::polymat::SeriesMatrix;
use crate::solution::SolutionSpace;

/// A problem file as declared, before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub p: u64,
    pub q: i128,
    pub k: usize,
    pub n: usize,
    pub n_prec: usize,
    pub a: Blocks,
    pub c: Blocks,
}

impl ProblemFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        let f = PrimeField::new(self.p)?;
        let q = f.from_i128(self.q);
        if q.is_zero() {
            return Err(Error::InvalidInstance("q must be nonzero modulo p".into()));
        }
        let a = blocks_to_series(&f, &self.a, self.n, self.n, self.n_prec);
        let c = blocks_to_series(&f, &self.c, self.n, 1, self.n_prec);
        ProblemInstance::new(f, q, self.k, self.n_prec, a, c)
    }
}

fn blocks_to_series(f: &PrimeField, blocks: &Blocks, rows: usize, cols: usize, prec: usize) -> SeriesMatrix {
    let coeffs: Vec<Matrix> = (0..prec)
        .map(|d| match blocks.get(&d) {
            Some(b) => Matrix::from_vec(*f, rows, cols, b.iter().flatten().map(|&v| f.from_i128(v)).collect()),
            None => Matrix::zeros(*f, rows, cols),
        })
        .collect();
    SeriesMatrix::from_coefficients(*f, rows, cols, &coeffs, prec)
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines { inner: it.peekable() }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next()
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.inner.peek().copied()
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads `key: value` lines until the first block or `BOT`.
fn parse_header(lines: &mut Lines<'_>, keys: &[&str]) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    while let Some((no, l)) = lines.peek() {
        if l == "BOT" || l.ends_with("]:") {
            break;
        }
        lines.next();
        let (key, value) = l.split_once(':').ok_or_else(|| err(no, format!("expected `key: value`, found `{l}`")))?;
        let key = key.trim();
        if !keys.contains(&key) {
            return Err(err(no, format!("unknown key `{key}`")));
        }
        if out.insert(key.to_string(), (no, value.trim().to_string())).is_some() {
            return Err(err(no, format!("duplicate key `{key}`")));
        }
    }
    for k in keys {
        if !out.contains_key(*k) {
            return Err(err(0, format!("missing header key `{k}`")));
        }
    }
    Ok(out)
}

fn header_int<T: std::str::FromStr>(h: &BTreeMap<String, (usize, String)>, key: &str) -> Result<T> {
    let (no, v) = &h[key];
    v.parse().map_err(|_| err(*no, format!("`{key}` must be an integer, found `{v}`")))
}

fn parse_row(no: usize, l: &str, width: usize) -> Result<Vec<i128>> {
    let row = l
        .split_whitespace()
        .map(|t| t.parse::<i128>().map_err(|_| err(no, format!("bad integer `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != width {
        return Err(err(no, format!("expected {width} entries, found {}", row.len())));
    }
    Ok(row)
}

/// Rows of one coefficient matrix, keyed by degree.
pub type Blocks = BTreeMap<usize, Vec<Vec<i128>>>;

/// Parses `NAME[d]:` blocks. `widths` maps block names to the row width.
fn parse_blocks(
    lines: &mut Lines<'_>,
    rows: usize,
    widths: &[(&str, usize)],
    max_degree: usize,
) -> Result<BTreeMap<String, Blocks>> {
    let mut out: BTreeMap<String, Blocks> = BTreeMap::new();
    while let Some((no, l)) = lines.next() {
        let head = l.strip_suffix("]:").ok_or_else(|| err(no, format!("expected a block header, found `{l}`")))?;
        let (name, deg) = head.split_once('[').ok_or_else(|| err(no, format!("malformed block header `{l}`")))?;
        let width = widths
            .iter()
            .find(|(w, _)| *w == name)
            .map(|(_, w)| *w)
            .ok_or_else(|| err(no, format!("unknown block `{name}`")))?;
        let deg: usize = deg.parse().map_err(|_| err(no, format!("bad degree `{deg}`")))?;
        if deg >= max_degree {
            return Err(err(no, format!("degree {deg} is not below N = {max_degree}")));
        }
        let mut block = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (rno, row) = lines.next().ok_or_else(|| err(no, format!("block {name}[{deg}] is truncated")))?;
            block.push(parse_row(rno, row, width)?);
        }
        if out.entry(name.to_string()).or_default().insert(deg, block).is_some() {
            return Err(err(no, format!("duplicate block {name}[{deg}]")));
        }
    }
    Ok(out)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let mut lines = Lines::new(text);
    let h = parse_header(&mut lines, &["p", "q", "k", "n", "N"])?;
    let p: u64 = header_int(&h, "p")?;
    let q: i128 = header_int(&h, "q")?;
    let k: usize = header_int(&h, "k")?;
    let n: usize = header_int(&h, "n")?;
    let n_prec: usize = header_int(&h, "N")?;
    if n == 0 {
        return Err(err(h["n"].0, "n must be positive"));
    }
    if n_prec == 0 {
        return Err(err(h["N"].0, "N must be positive"));
    }
    let mut blocks = parse_blocks(&mut lines, n, &[("A", n), ("C", 1)], n_prec)?;
    Ok(ProblemFile {
        p,
        q,
        k,
        n,
        n_prec,
        a: blocks.remove("A").unwrap_or_default(),
        c: blocks.remove("C").unwrap_or_default(),
    })
}

/// Parses and normalizes a problem file.
pub fn read_problem(text: &str) -> Result<ProblemInstance> {
    parse_problem(text)?.into_instance()
}

/// Writes a (normalized) instance; the output parses back to the same
/// instance. Zero blocks are omitted.
pub fn write_problem(inst: &ProblemInstance) -> String {
    let f = inst.field();
    let mut s = String::new();
    let _ = writeln!(s, "p: {}", f.modulus());
    let _ = writeln!(s, "q: {}", inst.q().value());
    let _ = writeln!(s, "k: {}", inst.k());
    let _ = writeln!(s, "n: {}", inst.n());
    let _ = writeln!(s, "N: {}", inst.n_prec());
    write_blocks(&mut s, "A", inst.a(), inst.n_prec(), true);
    write_blocks(&mut s, "C", inst.c(), inst.n_prec(), true);
    s
}

fn write_blocks(s: &mut String, name: &str, m: &SeriesMatrix, prec: usize, skip_zero: bool) {
    for d in 0..prec {
        let c = m.coefficient_matrix(d);
        if skip_zero && c.is_zero() {
            continue;
        }
        let _ = writeln!(s, "{name}[{d}]:");
        for r in 0..c.rows() {
            let row: Vec<String> = c.row(r).iter().map(|v| v.value().to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
}

/// Solution space as read from a solution file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFile {
    pub p: u64,
    pub n: usize,
    pub n_prec: usize,
    pub space: SolutionSpace,
}

/// Writes every degree of the particular solution and basis, with residues
/// in `[0, p)`.
pub fn write_solution(space: &SolutionSpace, p: u64, n: usize, n_prec: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p: {p}");
    let _ = writeln!(s, "n: {n}");
    let _ = writeln!(s, "N: {n_prec}");
    match space {
        SolutionSpace::Bottom => {
            let _ = writeln!(s, "t: 0");
            s.push_str("BOT\n");
        }
        SolutionSpace::Affine { particular, basis } => {
            let _ = writeln!(s, "t: {}", basis.cols());
            write_blocks(&mut s, "F", particular, n_prec, false);
            if basis.cols() > 0 {
                write_blocks(&mut s, "K", basis, n_prec, false);
            }
        }
    }
    s
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut lines = Lines::new(text);
    let h = parse_header(&mut lines, &["p", "n", "N", "t"])?;
    let p: u64 = header_int(&h, "p")?;
    let n: usize = header_int(&h, "n")?;
    let n_prec: usize = header_int(&h, "N")?;
    let t: usize = header_int(&h, "t")?;
    let f = PrimeField::new(p)?;
    if let Some((_, "BOT")) = lines.peek() {
        lines.next();
        if let Some((no, l)) = lines.next() {
            return Err(err(no, format!("unexpected `{l}` after BOT")));
        }
        return Ok(SolutionFile { p, n, n_prec, space: SolutionSpace::Bottom });
    }
    let mut blocks = parse_blocks(&mut lines, n, &[("F", 1), ("K", t)], n_prec)?;
    let particular = blocks_to_series(&f, &blocks.remove("F").unwrap_or_default(), n, 1, n_prec);
    let basis = blocks_to_series(&f, &blocks.remove("K").unwrap_or_default(), n, t, n_prec);
    Ok(SolutionFile { p, n, n_prec, space: SolutionSpace::Affine { particular, basis } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_instance, QMode};
    use crate::series::Series;

    const EXP: &str = "# x F' = F\np: 101\nq: 1\nk: 1\nn: 1\nN: 4\nA[0]:\n1\n";

    #[test]
    fn parses_a_hand_written_file() {
        let inst = read_problem(EXP).unwrap();
        let f = *inst.field();
        assert_eq!((inst.n(), inst.n_prec(), inst.k()), (1, 4, 1));
        assert_eq!(inst.a().get(0, 0), &Series::from_i64s(f, &[1], 4));
        assert!(inst.c().is_zero());
    }

    #[test]
    fn reduces_large_and_negative_entries() {
        let text = "p: 101\nq: -100\nk: 1\nn: 2\nN: 3\nA[2]:\n-1 202\n103 0\nC[1]:\n-5\n1000\n";
        let inst = read_problem(text).unwrap();
        let f = *inst.field();
        assert_eq!(inst.q(), f.one());
        assert_eq!(inst.a().coefficient_matrix(2), Matrix::from_i64_rows(f, &[&[100, 0], &[2, 0]]));
        assert_eq!(inst.c().coefficient_matrix(1), Matrix::from_i64_rows(f, &[&[96], &[91]]));
        assert!(inst.a().coefficient_matrix(0).is_zero());
    }

    #[test]
    fn k0_is_normalized_on_load() {
        let inst = read_problem("p: 101\nq: 1\nk: 0\nn: 1\nN: 3\nA[0]:\n1\n").unwrap();
        assert_eq!((inst.k(), inst.n_prec()), (1, 4));
        assert_eq!(inst.a().get(0, 0), &Series::from_i64s(*inst.field(), &[0, 1], 4));
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            "p: 100\nq: 1\nk: 1\nn: 1\nN: 4\n",
            "p: 101\nq: 0\nk: 1\nn: 1\nN: 4\n",
            "p: 101\nq: 202\nk: 1\nn: 1\nN: 4\n",
            "p: 7\nq: 1\nk: 1\nn: 1\nN: 7\n",
            "p: 101\nq: 1\nk: 1\nn: 0\nN: 4\n",
            "p: 101\nq: 1\nk: 1\nN: 4\n",
            "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nA[4]:\n1\n",
            "p: 101\nq: 1\nk: 1\nn: 2\nN: 4\nA[0]:\n1 2\n",
            "p: 101\nq: 1\nk: 1\nn: 2\nN: 4\nA[0]:\n1 2 3\n4 5\n",
            "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nB[0]:\n1\n",
            "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nA[0]:\nx\n",
            "p: 101\nq: 1\nk: 1\nn: 1\nN: 4\nz: 3\n",
        ];
        for c in cases {
            assert!(read_problem(c).is_err(), "{c}");
        }
        match read_problem(cases[7]) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn problem_round_trip() {
        for seed in 0..10 {
            let q = if seed % 2 == 0 { QMode::One } else { QMode::Random };
            let inst = random_instance(seed, 1 + seed as usize % 3, 5, 1 + seed as usize % 3, q, false).unwrap();
            let text = write_problem(&inst);
            let back = read_problem(&text).unwrap();
            assert_eq!((back.a(), back.c(), back.q(), back.k()), (inst.a(), inst.c(), inst.q(), inst.k()));
            assert_eq!(write_problem(&back), text);
        }
    }

    #[test]
    fn solution_round_trip() {
        let f = PrimeField::new(101).unwrap();
        let particular = SeriesMatrix::from_entries(f, 2, 1, 3, vec![Series::from_i64s(f, &[1, -1], 3), Series::from_i64s(f, &[0, 0, 7], 3)]);
        let basis = SeriesMatrix::from_entries(
            f,
            2,
            2,
            3,
            vec![
                Series::from_i64s(f, &[1], 3),
                Series::from_i64s(f, &[0, 1], 3),
                Series::from_i64s(f, &[], 3),
                Series::from_i64s(f, &[5, 5, 5], 3),
            ],
        );
        let space = SolutionSpace::Affine { particular, basis };
        let text = write_solution(&space, 101, 2, 3);
        assert!(text.contains("F[1]:\n100\n0\n"));
        let back = parse_solution(&text).unwrap();
        assert_eq!(back, SolutionFile { p: 101, n: 2, n_prec: 3, space });

        let bot = write_solution(&SolutionSpace::Bottom, 101, 2, 3);
        assert!(bot.ends_with("BOT\n"));
        assert_eq!(parse_solution(&bot).unwrap().space, SolutionSpace::Bottom);
        assert!(parse_solution("p: 101\nn: 1\nN: 3\nt: 0\nBOT\nF[0]:\n1\n").is_err());
    }
}
