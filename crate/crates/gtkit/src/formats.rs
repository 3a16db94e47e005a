//! Plain-text matrix and vector files.
//!
//! A matrix file starts with `T n tag param` where `tag` is `bernoulli`
//! (param `p`), `coco` (param `g`) or `explicit` (param `-`), followed by
//! `T` lines of `n` characters, each `0` or `1`. A vector file is a single
//! line of `0`/`1` characters.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use gtkit_core::bits::{BitMatrix, BitVec};
use gtkit_core::model::{Design, TestMatrix};

use crate::error::{format_err, io_err, Result};

pub fn matrix_to_string(m: &TestMatrix) -> String {
    let (tag, param) = match m.design() {
        Design::Bernoulli { p } => ("bernoulli", p.to_string()),
        Design::CouponCollector { g } => ("coco", g.to_string()),
        Design::Explicit => ("explicit", "-".to_string()),
    };
    let mut s = String::with_capacity(m.rows() * (m.cols() + 1) + 32);
    writeln!(s, "{} {} {tag} {param}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        s.push_str(&vector_to_string(&m.row(i)));
        s.push('\n');
    }
    s
}

pub fn vector_to_string(v: &BitVec) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(line: &str, expected: usize, what: &str) -> Result<BitVec> {
    let line = line.trim();
    if line.len() != expected {
        return Err(format_err(format!(
            "{what}: expected {expected} entries, found {}",
            line.len()
        )));
    }
    line.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format_err(format!("{what}: unexpected character {other:?}"))),
        })
        .collect::<Result<Vec<bool>>>()
        .map(BitVec::from_bools)
}

pub fn parse_vector(text: &str) -> Result<BitVec> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| format_err("empty vector file"))?;
    parse_bits(line, line.len(), "vector")
}

pub fn parse_matrix(text: &str) -> Result<TestMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| format_err("empty matrix file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [t, n, tag, param] = fields[..] else {
        return Err(format_err(format!("matrix header {header:?} is not `T n tag param`")));
    };
    let t: usize = t.parse().map_err(|_| format_err(format!("bad T {t:?}")))?;
    let n: usize = n.parse().map_err(|_| format_err(format!("bad n {n:?}")))?;
    let bad_param = || format_err(format!("bad {tag} parameter {param:?}"));
    let design = match tag {
        "bernoulli" => Design::Bernoulli {
            p: param.parse().map_err(|_| bad_param())?,
        },
        "coco" => Design::CouponCollector {
            g: param.parse().map_err(|_| bad_param())?,
        },
        "explicit" => Design::Explicit,
        other => return Err(format_err(format!("unknown design tag {other:?}"))),
    };
    let mut m = BitMatrix::zeros(t, n);
    for i in 0..t {
        let line = lines
            .next()
            .ok_or_else(|| format_err(format!("matrix has {i} rows, header says {t}")))?;
        for j in parse_bits(line, n, "matrix row")?.iter_ones() {
            m.set(i, j, true);
        }
    }
    if lines.next().is_some() {
        return Err(format_err(format!("matrix has more than {t} rows")));
    }
    Ok(TestMatrix::from_bit_matrix(m, design))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
    f.write_all(text.as_bytes()).map_err(io_err(path))?;
    f.flush().map_err(io_err(path))
}

pub fn read_text(path: &Path) -> Result<String> {
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    let mut s = String::new();
    for line in std::io::BufReader::new(f).lines() {
        s.push_str(&line.map_err(io_err(path))?);
        s.push('\n');
    }
    Ok(s)
}

pub fn read_matrix(path: &Path) -> Result<TestMatrix> {
    parse_matrix(&read_text(path)?)
}

pub fn read_vector(path: &Path) -> Result<BitVec> {
    parse_vector(&read_text(path)?)
}
