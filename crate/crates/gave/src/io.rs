//! JSON problem files and CSV traces.
//!
//! Problem files hold row-major matrices:
//!
//! ```text
//! GAVE  {"n": 2, "A": [a11, a12, a21, a22], "B": [...], "c": [c1, c2]}
//! LCP   {"l": 2, "M": [...], "q": [...]}
//! HLCP  {"l": 2, "C": [...], "D": [...], "p": [...]}
//! ```
//!
//! Writers print every float with 17 significant digits. Traces are CSV
//! with header `k_or_t,x_1,…,x_n,residual_norm`.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GaveError, Result};
use crate::integrators::{IterateLog, Trajectory};
use crate::problem::GaveProblem;
use crate::reformulations::{HlcpProblem, LcpProblem};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser).expect("in-memory serialization of plain numbers");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<f64>,
    c: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LcpFile {
    l: usize,
    #[serde(rename = "M")]
    m: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HlcpFile {
    l: usize,
    #[serde(rename = "C")]
    c: Vec<f64>,
    #[serde(rename = "D")]
    d: Vec<f64>,
    p: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VectorFile {
    x: Vec<f64>,
}

pub fn problem_to_json(problem: &GaveProblem) -> String {
    to_json(&ProblemFile {
        n: problem.dim(),
        a: row_major(problem.a()),
        b: row_major(problem.b()),
        c: problem.c().as_slice().to_vec(),
    })
}

pub fn problem_from_json(text: &str) -> Result<GaveProblem> {
    let f: ProblemFile = serde_json::from_str(text)?;
    GaveProblem::from_row_slices(f.n, &f.a, &f.b, &f.c)
}

pub fn lcp_to_json(lcp: &LcpProblem) -> String {
    to_json(&LcpFile {
        l: lcp.dim(),
        m: row_major(lcp.m()),
        q: lcp.q().as_slice().to_vec(),
    })
}

pub fn lcp_from_json(text: &str) -> Result<LcpProblem> {
    let f: LcpFile = serde_json::from_str(text)?;
    LcpProblem::from_row_slices(f.l, &f.m, &f.q)
}

pub fn hlcp_to_json(hlcp: &HlcpProblem) -> String {
    to_json(&HlcpFile {
        l: hlcp.dim(),
        c: row_major(hlcp.c()),
        d: row_major(hlcp.d()),
        p: hlcp.p().as_slice().to_vec(),
    })
}

pub fn hlcp_from_json(text: &str) -> Result<HlcpProblem> {
    let f: HlcpFile = serde_json::from_str(text)?;
    HlcpProblem::from_row_slices(f.l, &f.c, &f.d, &f.p)
}

/// `{"x": [...]}`.
pub fn vector_to_json(x: &DVector<f64>) -> String {
    to_json(&VectorFile { x: x.as_slice().to_vec() })
}

pub fn vector_from_json(text: &str) -> Result<DVector<f64>> {
    let f: VectorFile = serde_json::from_str(text)?;
    Ok(DVector::from_vec(f.x))
}

pub fn read_problem(path: &Path) -> Result<GaveProblem> {
    problem_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_lcp(path: &Path) -> Result<LcpProblem> {
    lcp_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_hlcp(path: &Path) -> Result<HlcpProblem> {
    hlcp_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn trace_header(n: usize) -> Vec<String> {
    let mut header = vec!["k_or_t".to_string()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.push("residual_norm".into());
    header
}

fn write_rows<'a, W: Write>(
    out: W,
    rows: impl Iterator<Item = (String, &'a DVector<f64>, f64)>,
    n: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(n))?;
    for (key, x, rn) in rows {
        let mut record = Vec::with_capacity(n + 2);
        record.push(key);
        record.extend(x.iter().map(|v| fmt_f64(*v)));
        record.push(fmt_f64(rn));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per iterate, keyed by the step index.
pub fn write_iterate_csv<W: Write>(log: &IterateLog, out: W) -> Result<()> {
    let n = log.iterates.first().map_or(0, |x| x.len());
    let rows = log
        .iterates
        .iter()
        .zip(&log.residual_norms)
        .enumerate()
        .map(|(k, (x, rn))| (k.to_string(), x, *rn));
    write_rows(out, rows, n)
}

/// One row per sample, keyed by time.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let n = traj.states.first().map_or(0, |x| x.len());
    let rows = traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&traj.residual_norms)
        .map(|((t, x), rn)| (fmt_f64(*t), x, *rn));
    write_rows(out, rows, n)
}

/// A parsed trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    /// Step index or time of each row.
    pub index: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<TraceTable> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    let width = header.len();
    if width < 3 || &header[0] != "k_or_t" || &header[width - 1] != "residual_norm" {
        return Err(GaveError::Format(format!("unexpected trace header: {header:?}")));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| GaveError::Format(format!("bad number {s:?}: {e}")))
    };
    let mut table = TraceTable {
        index: Vec::new(),
        states: Vec::new(),
        residual_norms: Vec::new(),
    };
    for record in reader.records() {
        let record = record?;
        table.index.push(parse(&record[0])?);
        table
            .states
            .push(record.iter().skip(1).take(width - 2).map(parse).collect::<Result<_>>()?);
        table.residual_norms.push(parse(&record[width - 1])?);
    }
    Ok(table)
}
