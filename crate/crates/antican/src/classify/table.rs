//! The result-table schema and row-by-row comparison.
//!
//! A table row carries the Cox ring relations as text, the class group, the
//! degree matrix (free rows then torsion rows, `" / "`-separated), `(−K)³`
//! as `p/q` and `ι`. Rows are compared through their [`DistinctnessKey`],
//! which is rebuilt from the text, so the generator numbering of two tables
//! need not agree.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use num::BigInt;
use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::exact::{parse_rat, rat_to_string, Rat};
use crate::invariants::{key_from_parts, Degree, DistinctnessKey};

pub const COLUMNS: [&str; 6] = ["no", "relations", "class_group", "degree_matrix", "antican_cube", "gorenstein_index"];

/// The bundled reference table.
pub const REFERENCE_TABLE: &str = include_str!("../../data/reference_table.csv");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub no: usize,
    pub relations: String,
    pub class_group: String,
    pub degree_matrix: String,
    pub antican_cube: String,
    pub gorenstein_index: String,
}

fn schema(msg: impl Into<String>) -> ClassifyError {
    ClassifyError::SchemaMismatch(msg.into())
}

pub fn read_table(r: impl Read) -> Result<Vec<TableRow>, ClassifyError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers().map_err(|e| schema(e.to_string()))?.iter().map(String::from).collect();
    if header != COLUMNS {
        return Err(schema(format!("header {header:?}, expected {COLUMNS:?}")));
    }
    rdr.deserialize().map(|row| row.map_err(|e| schema(e.to_string()))).collect()
}

pub fn reference_table() -> Vec<TableRow> {
    read_table(REFERENCE_TABLE.as_bytes()).expect("bundled table parses")
}

pub fn write_table(w: impl Write, rows: &[TableRow]) -> Result<(), ClassifyError> {
    let mut wr = csv::Writer::from_writer(w);
    for row in rows {
        wr.serialize(row).map_err(|e| schema(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

/// Parses one monomial such as `λT3^2T4`; the coefficient prefix is dropped.
fn parse_monomial(s: &str) -> Result<Vec<(usize, i64)>, ClassifyError> {
    let s = s.trim();
    let start = s.find('T').ok_or_else(|| schema(format!("monomial {s:?}")))?;
    let mut out = Vec::new();
    for part in s[start..].split('T').skip(1) {
        let (g, e) = match part.split_once('^') {
            Some((g, e)) => (g, e),
            None => (part, "1"),
        };
        let g: usize = g.parse().map_err(|_| schema(format!("generator in {s:?}")))?;
        let e: i64 = e.parse().map_err(|_| schema(format!("exponent in {s:?}")))?;
        if g == 0 {
            return Err(schema("generators are numbered from 1"));
        }
        out.push((g - 1, e));
    }
    Ok(out)
}

/// Free rank and torsion orders of `Z+Z/2`-style strings.
pub fn parse_class_group(s: &str) -> Result<(usize, Vec<BigInt>), ClassifyError> {
    let mut free = 0;
    let mut tors = Vec::new();
    for t in s.split('+').map(str::trim) {
        if t == "Z" {
            free += 1;
        } else if let Some(k) = t.strip_prefix("Z/") {
            tors.push(k.parse::<BigInt>().map_err(|_| schema(format!("class group {s:?}")))?);
        } else {
            return Err(schema(format!("class group {s:?}")));
        }
    }
    Ok((free, tors))
}

/// The key of a row, rebuilt from its text fields.
pub fn row_key(row: &TableRow) -> Result<DistinctnessKey, ClassifyError> {
    let (free_rank, torsion) = parse_class_group(&row.class_group)?;
    let mat: Vec<Vec<BigInt>> = row
        .degree_matrix
        .split('/')
        .map(|r| r.split_whitespace().map(|x| x.parse::<BigInt>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|_| schema(format!("degree matrix {:?}", row.degree_matrix)))?;
    if mat.len() != free_rank + torsion.len() || mat.iter().any(|r| r.len() != mat[0].len()) {
        return Err(schema(format!("degree matrix {:?} vs class group {:?}", row.degree_matrix, row.class_group)));
    }
    let ngen = mat[0].len();
    let degree = |g: usize| -> Degree {
        (
            mat[..free_rank].iter().map(|r| r[g].clone()).collect(),
            mat[free_rank..].iter().map(|r| r[g].clone()).collect(),
        )
    };
    let mut monomials: Vec<Vec<(usize, i64)>> = Vec::new();
    for rel in row.relations.split(',') {
        for mono in rel.split('+') {
            let m = parse_monomial(mono)?;
            if m.iter().any(|&(g, _)| g >= ngen) {
                return Err(schema(format!("generator beyond the degree matrix in {mono:?}")));
            }
            if !monomials.contains(&m) {
                monomials.push(m);
            }
        }
    }
    let used: BTreeSet<usize> = monomials.iter().flatten().map(|&(g, _)| g).collect();
    let blocks = monomials.iter().map(|m| m.iter().map(|&(g, e)| (e, degree(g))).collect()).collect();
    let extra = (0..ngen).filter(|g| !used.contains(g)).map(degree).collect();
    let cube = parse_rat(&row.antican_cube).ok_or_else(|| schema(format!("cube {:?}", row.antican_cube)))?;
    let iota: BigInt = row.gorenstein_index.parse().map_err(|_| schema(format!("index {:?}", row.gorenstein_index)))?;
    Ok(key_from_parts(free_rank, torsion, blocks, extra, cube, iota))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDiff {
    pub expected_no: usize,
    pub result_no: usize,
    pub field: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    /// `(expected no, result no)` of rows with equal keys.
    pub matched: Vec<(usize, usize)>,
    pub field_diffs: Vec<FieldDiff>,
    /// Expected rows without a counterpart.
    pub missing: Vec<usize>,
    /// Result rows without a counterpart.
    pub extra: Vec<usize>,
    pub expected_total: usize,
}

impl DiffReport {
    pub fn summary(&self) -> String {
        format!(
            "{}/{} matched, {} missing, {} extra, {} field diffs",
            self.matched.len(),
            self.expected_total,
            self.missing.len(),
            self.extra.len(),
            self.field_diffs.len()
        )
    }

    pub fn is_clean(&self) -> bool {
        self.matched.len() == self.expected_total && self.extra.is_empty() && self.field_diffs.is_empty()
    }
}

fn without_numbers(k: &DistinctnessKey) -> DistinctnessKey {
    DistinctnessKey { cube: Rat::from_integer(0.into()), iota: BigInt::from(0), ..k.clone() }
}

/// Exponent pattern plus the two numbers, degrees ignored.
fn shape_only(k: &DistinctnessKey) -> (Vec<Vec<i64>>, usize, Rat, BigInt) {
    let mut b: Vec<Vec<i64>> = k
        .blocks
        .iter()
        .map(|bl| {
            let mut v: Vec<i64> = bl.iter().map(|(l, _)| *l).collect();
            v.sort();
            v
        })
        .collect();
    b.sort();
    (b, k.extra.len(), k.cube.clone(), k.iota.clone())
}

/// Pairs rows by key, then reports near-misses as field-level differences.
pub fn diff_table(result: &[TableRow], expected: &[TableRow]) -> Result<DiffReport, ClassifyError> {
    let rk: Vec<DistinctnessKey> = result.iter().map(row_key).collect::<Result<_, _>>()?;
    let ek: Vec<DistinctnessKey> = expected.iter().map(row_key).collect::<Result<_, _>>()?;
    let mut used_r = vec![false; result.len()];
    let mut used_e = vec![false; expected.len()];
    let mut rep = DiffReport { expected_total: expected.len(), ..Default::default() };
    for (i, k) in ek.iter().enumerate() {
        if let Some(j) = (0..result.len()).find(|&j| !used_r[j] && rk[j] == *k) {
            used_r[j] = true;
            used_e[i] = true;
            rep.matched.push((expected[i].no, result[j].no));
        }
    }
    // Same structure, different numbers.
    for (i, k) in ek.iter().enumerate() {
        if used_e[i] {
            continue;
        }
        let pick = (0..result.len())
            .find(|&j| !used_r[j] && without_numbers(&rk[j]) == without_numbers(k))
            .or_else(|| (0..result.len()).find(|&j| !used_r[j] && shape_only(&rk[j]) == shape_only(k)));
        if let Some(j) = pick {
            used_r[j] = true;
            used_e[i] = true;
            let (e, r) = (&expected[i], &result[j]);
            let mut push = |field: &str, a: String, b: String| {
                rep.field_diffs.push(FieldDiff {
                    expected_no: e.no,
                    result_no: r.no,
                    field: field.into(),
                    expected: a,
                    actual: b,
                })
            };
            if k.cube != rk[j].cube {
                push("antican_cube", rat_to_string(&k.cube), rat_to_string(&rk[j].cube));
            }
            if k.iota != rk[j].iota {
                push("gorenstein_index", k.iota.to_string(), rk[j].iota.to_string());
            }
            if (k.free_rank, &k.torsion) != (rk[j].free_rank, &rk[j].torsion) {
                push("class_group", e.class_group.clone(), r.class_group.clone());
            } else if without_numbers(k) != without_numbers(&rk[j]) {
                push("degree_matrix", e.degree_matrix.clone(), r.degree_matrix.clone());
            }
        }
    }
    rep.missing = (0..expected.len()).filter(|&i| !used_e[i]).map(|i| expected[i].no).collect();
    rep.extra = (0..result.len()).filter(|&j| !used_r[j]).map(|j| result[j].no).collect();
    Ok(rep)
}
