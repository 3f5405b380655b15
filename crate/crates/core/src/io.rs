//! Text formats: complex matrices and the trade-off table.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const MATRIX_HEADER: &str = "# complex-matrix v1";

/// Header line, dimension line, then one line per row of `re,im` pairs.
/// Entries carry 17 significant digits so the text round-trips exactly.
pub fn format_matrix(m: &ComplexMatrix) -> String {
    let d = m.dim();
    let mut out = format!("{MATRIX_HEADER}\n{d}\n");
    for i in 0..d {
        let row: Vec<String> = (0..d)
            .map(|j| format!("{:.16e},{:.16e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(MATRIX_HEADER) {
        return Err(Error::Parse(format!(
            "first line must be '{MATRIX_HEADER}'"
        )));
    }
    let dim: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("missing dimension line".into()))?
        .parse()
        .map_err(|_| Error::Parse("dimension is not an integer".into()))?;
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing row {r}")))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(Error::Parse(format!(
                "row {r} has {} entries, expected {dim}",
                entries.len()
            )));
        }
        for e in entries {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("entry '{e}' is not re,im")))?;
            let num = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::Parse(format!("'{s}' is not a number")))
            };
            data.push(Complex64::new(num(re)?, num(im)?));
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse(format!("more than {dim} rows")));
    }
    ComplexMatrix::from_row_major(dim, data)
}

pub const TRADEOFF_HEADER: &str =
    "alpha,beta,F_pole,F_sim_theta0,Er_eq10,Er_numeric_aB,gap,concurrence_aB,eof_aB";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub alpha: f64,
    pub beta: f64,
    pub f_pole: f64,
    pub f_sim_theta0: f64,
    pub er_eq10: f64,
    pub er_numeric_ab: f64,
    pub gap: f64,
    pub concurrence_ab: f64,
    pub eof_ab: f64,
}

impl TradeoffRow {
    fn fields(&self) -> [f64; 9] {
        [
            self.alpha,
            self.beta,
            self.f_pole,
            self.f_sim_theta0,
            self.er_eq10,
            self.er_numeric_ab,
            self.gap,
            self.concurrence_ab,
            self.eof_ab,
        ]
    }
}

/// Shortest round-trip decimals (`{:?}`), rows in the order given.
pub fn format_tradeoff_csv(rows: &[TradeoffRow]) -> String {
    let mut out = format!("{TRADEOFF_HEADER}\n");
    for r in rows {
        let f: Vec<String> = r.fields().iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", f.join(",")).expect("writing to a String");
    }
    out
}

pub fn parse_tradeoff_csv(text: &str) -> Result<Vec<TradeoffRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(TRADEOFF_HEADER) {
        return Err(Error::Parse(format!("header must be '{TRADEOFF_HEADER}'")));
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let v: Vec<f64> = line
                .trim()
                .split(',')
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::Parse(format!("row {n}: '{s}' is not a number")))
                })
                .collect::<Result<_>>()?;
            let [alpha, beta, f_pole, f_sim_theta0, er_eq10, er_numeric_ab, gap, concurrence_ab, eof_ab] =
                v[..]
            else {
                return Err(Error::Parse(format!("row {n} has {} fields, expected 9", v.len())));
            };
            Ok(TradeoffRow {
                alpha,
                beta,
                f_pole,
                f_sim_theta0,
                er_eq10,
                er_numeric_ab,
                gap,
                concurrence_ab,
                eof_ab,
            })
        })
        .collect()
}
