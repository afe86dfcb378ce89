//! JSON wire formats: exact matrices (entries as numerator/denominator
//! decimal strings), structures (family, parameters, member labels), and
//! distribution dumps (one JSON line per support point).

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Int, Rat};
use crate::lclt::ExactDistribution;

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// row-major entries as [numerator, denominator] decimal strings
    pub entries: Vec<[String; 2]>,
}

pub fn matrix_to_json(m: &ExactMatrix) -> MatrixJson {
    let entries = (0..m.rows)
        .flat_map(|i| m.row(i).iter().map(|x| [x.numer().to_string(), x.denom().to_string()]))
        .collect();
    MatrixJson { rows: m.rows, cols: m.cols, entries }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<ExactMatrix> {
    if j.entries.len() != j.rows * j.cols {
        return Err(Error::Dimension(format!(
            "{} entries for a {}x{} matrix",
            j.entries.len(),
            j.rows,
            j.cols
        )));
    }
    let mut rows = Vec::with_capacity(j.rows);
    for i in 0..j.rows {
        let mut row = Vec::with_capacity(j.cols);
        for e in &j.entries[i * j.cols..(i + 1) * j.cols] {
            let num = Int::from_str(&e[0]).map_err(|_| Error::Parse(e[0].clone()))?;
            let den = Int::from_str(&e[1]).map_err(|_| Error::Parse(e[1].clone()))?;
            if den == Int::from(0) {
                return Err(Error::Parse("zero denominator".into()));
            }
            row.push(Rat::new(num, den));
        }
        rows.push(row);
    }
    Ok(ExactMatrix::from_rows(rows))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StructureJson {
    pub family: String,
    pub params: BTreeMap<String, u64>,
    /// member labels in the family's own encoding
    pub members: Vec<String>,
}

/// One support point of a walk distribution.
#[derive(Debug, Serialize, Deserialize)]
pub struct DistLine {
    pub lambda: Vec<String>,
    pub num: String,
    pub den: String,
}

/// JSON lines, one per support point, in the distribution's key order.
pub fn distribution_to_json_lines(d: &ExactDistribution) -> String {
    let mut out = String::new();
    for (lambda, pr) in &d.probs {
        let line = DistLine {
            lambda: lambda.iter().map(|x| x.to_string()).collect(),
            num: pr.numer().to_string(),
            den: pr.denom().to_string(),
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn distribution_from_json_lines(s: &str) -> Result<ExactDistribution> {
    let mut probs = BTreeMap::new();
    for line in s.lines().filter(|l| !l.trim().is_empty()) {
        let d: DistLine = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        let lambda: Vec<Int> = d
            .lambda
            .iter()
            .map(|x| Int::from_str(x).map_err(|_| Error::Parse(x.clone())))
            .collect::<Result<_>>()?;
        let num = Int::from_str(&d.num).map_err(|_| Error::Parse(d.num.clone()))?;
        let den = Int::from_str(&d.den).map_err(|_| Error::Parse(d.den.clone()))?;
        probs.insert(lambda, Rat::new(num, den));
    }
    Ok(ExactDistribution { probs })
}
