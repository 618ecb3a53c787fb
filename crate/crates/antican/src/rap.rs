//! Defining data `(A, P)` of a complexity-one variety: assembly of `P`,
//! the class group grading, the Fano test, the Cox ring presentation,
//! admissible operations and a canonical normal form.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    gcd_vector, hermite_rows, lcm_all, rat_int, rref, smith_normal_form, IntMat, Rat,
};
use crate::polyhedra::Cone;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RapError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid columns: {0}")]
    InvalidColumns(String),
    #[error("columns do not generate the ambient space as a cone")]
    NotGenerating,
    #[error("redundant block {0}: exponent sum below 2")]
    Redundant(usize),
    #[error("invalid admissible operation: {0}")]
    InvalidOp(String),
}

/// The data `(r, s, m, n_i, L, d, d′, λ)`; `P` is assembled from it.
///
/// The matrix `A` is carried by moduli only: nothing for `r = 2`, one opaque
/// tag per extra relation for `r ≥ 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DefiningData {
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub n: Vec<usize>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    pub dprime: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
}

/// Position of a column of `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Col {
    /// `v_{ij}`: block `i`, position `j` (both 0-based).
    T(usize, usize),
    /// `v_k` in the `d′` block.
    S(usize),
}

impl DefiningData {
    /// Data with `m = 0` from `L` and the `d` rows.
    pub fn new(l: Vec<Vec<i64>>, d: Vec<Vec<i64>>) -> Self {
        let s = d.len();
        DefiningData {
            r: l.len() - 1,
            s,
            m: 0,
            n: l.iter().map(Vec::len).collect(),
            l,
            d,
            dprime: vec![Vec::new(); s],
            lambda: None,
        }
    }

    pub fn with_dprime(mut self, dprime: Vec<Vec<i64>>) -> Self {
        self.m = dprime.first().map_or(0, Vec::len);
        self.dprime = dprime;
        self
    }

    pub fn n_total(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn ncols(&self) -> usize {
        self.n_total() + self.m
    }

    pub fn columns(&self) -> Vec<Col> {
        let mut v = Vec::with_capacity(self.ncols());
        for (i, &ni) in self.n.iter().enumerate() {
            v.extend((0..ni).map(|j| Col::T(i, j)));
        }
        v.extend((0..self.m).map(Col::S));
        v
    }

    /// Column index of `v_{ij}` in `P`.
    pub fn col_index(&self, c: Col) -> usize {
        match c {
            Col::T(i, j) => self.n[..i].iter().sum::<usize>() + j,
            Col::S(k) => self.n_total() + k,
        }
    }

    /// Exponent of the variable of a column in its relation monomial (0 for `S`).
    pub fn exponent(&self, c: Col) -> i64 {
        match c {
            Col::T(i, j) => self.l[i][j],
            Col::S(_) => 0,
        }
    }

    /// Leaf (block) of a column; `None` for columns in the lineality space.
    pub fn leaf(&self, c: Col) -> Option<usize> {
        match c {
            Col::T(i, _) => Some(i),
            Col::S(_) => None,
        }
    }

    pub fn check_shape(&self) -> Result<(), RapError> {
        let bad = |m: &str| Err(RapError::ShapeMismatch(m.to_string()));
        if self.r < 1 {
            return bad("r must be at least 1");
        }
        if self.n.len() != self.r + 1 || self.l.len() != self.r + 1 {
            return bad("need r+1 blocks");
        }
        if self.n.iter().zip(&self.l).any(|(&ni, li)| ni == 0 || li.len() != ni) {
            return bad("block sizes disagree with L");
        }
        if self.l.iter().flatten().any(|&x| x <= 0) {
            return bad("exponents must be positive");
        }
        let nt = self.n_total();
        if self.d.len() != self.s || self.d.iter().any(|row| row.len() != nt) {
            return bad("d must be s rows of n entries");
        }
        if self.dprime.len() != self.s || self.dprime.iter().any(|row| row.len() != self.m) {
            return bad("dprime must be s rows of m entries");
        }
        if let Some(lam) = &self.lambda {
            if lam.len() != self.r.saturating_sub(2) {
                return bad("lambda needs r-2 entries");
            }
        }
        Ok(())
    }

    pub fn is_irredundant(&self) -> bool {
        self.l.iter().all(|li| li.iter().sum::<i64>() >= 2)
    }

    /// Shape, primitive pairwise distinct columns, columns generating the space
    /// as a cone, and (optionally) irredundancy.
    pub fn validate(&self, irredundant: bool) -> Result<IntMat, RapError> {
        let p = assemble_p(self)?;
        let cols: Vec<Vec<BigInt>> = (0..p.cols).map(|j| p.col(j)).collect();
        for (j, c) in cols.iter().enumerate() {
            if !gcd_vector(c).is_one() {
                return Err(RapError::InvalidColumns(format!("column {} is not primitive", j + 1)));
            }
        }
        let distinct: BTreeSet<&Vec<BigInt>> = cols.iter().collect();
        if distinct.len() != cols.len() {
            return Err(RapError::InvalidColumns("repeated column".into()));
        }
        let cone = Cone::new(&cols, p.rows);
        if cone.dim() != p.rows || !cone.facets.is_empty() {
            return Err(RapError::NotGenerating);
        }
        if irredundant {
            if let Some(i) = self.l.iter().position(|li| li.iter().sum::<i64>() < 2) {
                return Err(RapError::Redundant(i));
            }
        }
        Ok(p)
    }
}

/// The `(r+s) × (n+m)` matrix with rows `[−l₀, 0, …, l_i, …, 0, 0]` on top of `[d, d′]`.
pub fn assemble_p(dd: &DefiningData) -> Result<IntMat, RapError> {
    dd.check_shape()?;
    let (r, s) = (dd.r, dd.s);
    let nt = dd.n_total();
    let mut p = IntMat::zeros(r + s, nt + dd.m);
    for i in 1..=r {
        for j in 0..dd.n[0] {
            p[(i - 1, j)] = BigInt::from(-dd.l[0][j]);
        }
        let off = dd.col_index(Col::T(i, 0));
        for j in 0..dd.n[i] {
            p[(i - 1, off + j)] = BigInt::from(dd.l[i][j]);
        }
    }
    for t in 0..s {
        for j in 0..nt {
            p[(r + t, j)] = BigInt::from(dd.d[t][j]);
        }
        for k in 0..dd.m {
            p[(r + t, nt + k)] = BigInt::from(dd.dprime[t][k]);
        }
    }
    Ok(p)
}

/// An element of `K = Z^free ⊕ ⊕ Z/tᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Class {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl Class {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

/// The class group `K = Z^{n+m}/im(P*)`, the degree map and the anticanonical class.
#[derive(Clone, Debug)]
pub struct Grading {
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    /// `Q(e_j)` for every column, in column order.
    pub degrees: Vec<Class>,
    pub kappa: Class,
    /// Common degree of the relations.
    pub relation_degree: Class,
    /// Rows of the linear map `Z^{n+m} → Z^{torsion} ⊕ Z^{free}` (before reduction).
    q_rows: Vec<Vec<BigInt>>,
}

impl Grading {
    /// `Q(x)` for an integer vector `x`.
    pub fn class_of(&self, x: &[BigInt]) -> Class {
        let t = self.torsion.len();
        let vals: Vec<BigInt> = self.q_rows.iter().map(|row| crate::exact::dot(row, x)).collect();
        Class {
            torsion: vals[..t].iter().zip(&self.torsion).map(|(v, m)| v.mod_floor(m)).collect(),
            free: vals[t..].to_vec(),
        }
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

/// `Σ e_j − (r−1) Σ_j l_{0j} e_{0j}`: a representative of the anticanonical class.
pub fn kappa_vector(dd: &DefiningData) -> Vec<BigInt> {
    let mut e = vec![BigInt::one(); dd.ncols()];
    let rm1 = dd.r as i64 - 1;
    for j in 0..dd.n[0] {
        e[j] -= BigInt::from(rm1 * dd.l[0][j]);
    }
    e
}

/// `Σ_j l_{0j} e_{0j}`: a representative of the relation degree.
pub fn relation_vector(dd: &DefiningData) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); dd.ncols()];
    for j in 0..dd.n[0] {
        e[j] = BigInt::from(dd.l[0][j]);
    }
    e
}

pub fn grading(dd: &DefiningData) -> Result<Grading, RapError> {
    let p = assemble_p(dd)?;
    let pt = p.transpose();
    let sf = smith_normal_form(&pt);
    let diag = sf.diagonal();
    let rank = sf.rank();
    let mut q_rows = Vec::new();
    let mut torsion = Vec::new();
    for (i, di) in diag.iter().enumerate().take(rank) {
        if !di.is_one() {
            torsion.push(di.clone());
            q_rows.push(sf.u.row(i).to_vec());
        }
    }
    let mut free_rows: Vec<Vec<BigInt>> = (rank..pt.rows).map(|i| sf.u.row(i).to_vec()).collect();
    // Canonical free coordinates: Hermite basis of the (saturated) kernel lattice.
    if !free_rows.is_empty() {
        free_rows = hermite_rows(&free_rows).0;
    }
    let free_rank = free_rows.len();
    q_rows.extend(free_rows);
    let mut g = Grading {
        free_rank,
        torsion,
        degrees: Vec::new(),
        kappa: Class { free: vec![], torsion: vec![] },
        relation_degree: Class { free: vec![], torsion: vec![] },
        q_rows,
    };
    let n = dd.ncols();
    g.degrees = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            g.class_of(&e)
        })
        .collect();
    g.kappa = g.class_of(&kappa_vector(dd));
    g.relation_degree = g.class_of(&relation_vector(dd));
    Ok(g)
}

/// `κ` in the interior of the moving cone `⋂_j cone(Q(e_i); i ≠ j)`.
///
/// Torsion is invisible to the cone condition. The moving cone of a Fano
/// variety is full-dimensional (it contains the open ample cone), so its
/// relative interior is its interior, which for a finite intersection is the
/// intersection of the interiors.
pub fn is_fano(dd: &DefiningData) -> bool {
    if dd.validate(false).is_err() {
        return false;
    }
    let Ok(g) = grading(dd) else { return false };
    is_fano_graded(&g)
}

pub fn is_fano_graded(g: &Grading) -> bool {
    let k = g.free_rank;
    if k == 0 {
        return false;
    }
    let w: Vec<&Vec<BigInt>> = g.degrees.iter().map(|c| &c.free).collect();
    // A pointed grading is needed for completeness: all degrees in one open half.
    let all = Cone::new(&w.iter().map(|x| (*x).clone()).collect::<Vec<_>>(), k);
    if !all.is_pointed() || all.dim() != k {
        return false;
    }
    (0..w.len()).all(|j| {
        let others: Vec<Vec<BigInt>> =
            w.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| (*x).clone()).collect();
        let c = Cone::new(&others, k);
        c.dim() == k && c.relint_contains(&g.kappa.free)
    })
}

/// A relation `Σ coeff · monomial`, one monomial per consecutive block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    /// Coefficient tag of each monomial (`"1"` or a modulus name).
    pub coefficients: Vec<String>,
    /// Monomials as `(generator index, exponent)` lists.
    pub monomials: Vec<Vec<(usize, i64)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoxPresentation {
    pub generators: Vec<String>,
    pub degrees: Vec<Class>,
    pub relations: Vec<Relation>,
    pub relation_degree: Class,
}

impl CoxPresentation {
    /// E.g. `T1T2+T3T4+T5^2, λT3T4+T5^2+T6^2`.
    pub fn render(&self) -> String {
        self.relations
            .iter()
            .map(|rel| {
                rel.monomials
                    .iter()
                    .zip(&rel.coefficients)
                    .map(|(mono, c)| {
                        let mut s = if c == "1" { String::new() } else { c.clone() };
                        for &(g, e) in mono {
                            s.push_str(&self.generators[g]);
                            if e > 1 {
                                s.push_str(&format!("^{e}"));
                            }
                        }
                        s
                    })
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Generators `T1 … T_{n+m}` in column order; relations `g_i = g_{i,i+1,i+2}`.
pub fn cox_presentation(dd: &DefiningData) -> Result<CoxPresentation, RapError> {
    let g = grading(dd)?;
    let generators: Vec<String> = (1..=dd.ncols()).map(|k| format!("T{k}")).collect();
    let monomial = |i: usize| -> Vec<(usize, i64)> {
        (0..dd.n[i]).map(|j| (dd.col_index(Col::T(i, j)), dd.l[i][j])).collect()
    };
    let relations = (0..dd.r.saturating_sub(1))
        .map(|i| {
            let first = if i == 0 {
                "1".to_string()
            } else {
                dd.lambda
                    .as_ref()
                    .and_then(|v| v.get(i - 1).cloned())
                    .unwrap_or_else(|| if dd.r == 3 { "λ".into() } else { format!("λ{}", i + 1) })
            };
            Relation {
                coefficients: vec![first, "1".into(), "1".into()],
                monomials: vec![monomial(i), monomial(i + 1), monomial(i + 2)],
            }
        })
        .collect();
    Ok(CoxPresentation { generators, degrees: g.degrees.clone(), relations, relation_degree: g.relation_degree })
}

/// The admissible operations on defining data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibleOp {
    /// (i) swap two columns inside a block.
    SwapInBlock { block: usize, a: usize, b: usize },
    /// (ii) swap two whole blocks.
    SwapBlocks { a: usize, b: usize },
    /// (iii) add `factor` times top row `top` (0-based, `< r`) to d-row `target`.
    AddTopRow { top: usize, target: usize, factor: i64 },
    /// (iv) replace the last `s` rows by `U ·` rows, `U` unimodular.
    RowTransform { matrix: Vec<Vec<i64>> },
    /// (v) swap two columns of the `d′` block.
    SwapPrime { a: usize, b: usize },
}

pub fn admissible_ops(dd: &DefiningData, op: &AdmissibleOp) -> Result<DefiningData, RapError> {
    dd.check_shape()?;
    let bad = |m: &str| Err(RapError::InvalidOp(m.to_string()));
    let mut out = dd.clone();
    match *op {
        AdmissibleOp::SwapInBlock { block, a, b } => {
            if block > dd.r || a >= dd.n[block] || b >= dd.n[block] {
                return bad("column index out of range");
            }
            out.l[block].swap(a, b);
            let (ca, cb) = (dd.col_index(Col::T(block, a)), dd.col_index(Col::T(block, b)));
            for row in out.d.iter_mut() {
                row.swap(ca, cb);
            }
        }
        AdmissibleOp::SwapBlocks { a, b } => {
            if a > dd.r || b > dd.r {
                return bad("block index out of range");
            }
            let mut order: Vec<usize> = (0..=dd.r).collect();
            order.swap(a, b);
            out = permute_blocks(dd, &order);
        }
        AdmissibleOp::AddTopRow { top, target, factor } => {
            if top >= dd.r || target >= dd.s {
                return bad("row index out of range");
            }
            for j in 0..dd.n[0] {
                out.d[target][j] -= factor * dd.l[0][j];
            }
            let off = dd.col_index(Col::T(top + 1, 0));
            for j in 0..dd.n[top + 1] {
                out.d[target][off + j] += factor * dd.l[top + 1][j];
            }
        }
        AdmissibleOp::RowTransform { ref matrix } => {
            if matrix.len() != dd.s || matrix.iter().any(|r| r.len() != dd.s) {
                return bad("row transform must be s x s");
            }
            if !IntMat::from_rows(matrix).is_unimodular() {
                return bad("row transform is not unimodular");
            }
            for t in 0..dd.s {
                for j in 0..dd.n_total() {
                    out.d[t][j] = (0..dd.s).map(|k| matrix[t][k] * dd.d[k][j]).sum();
                }
                for j in 0..dd.m {
                    out.dprime[t][j] = (0..dd.s).map(|k| matrix[t][k] * dd.dprime[k][j]).sum();
                }
            }
        }
        AdmissibleOp::SwapPrime { a, b } => {
            if a >= dd.m || b >= dd.m {
                return bad("d' column index out of range");
            }
            for row in out.dprime.iter_mut() {
                row.swap(a, b);
            }
        }
    }
    Ok(out)
}

/// Reorders blocks: new block `k` is old block `order[k]`.
fn permute_blocks(dd: &DefiningData, order: &[usize]) -> DefiningData {
    let mut out = dd.clone();
    out.n = order.iter().map(|&i| dd.n[i]).collect();
    out.l = order.iter().map(|&i| dd.l[i].clone()).collect();
    for t in 0..dd.s {
        out.d[t] = order
            .iter()
            .flat_map(|&i| {
                let off = dd.col_index(Col::T(i, 0));
                dd.d[t][off..off + dd.n[i]].to_vec()
            })
            .collect();
    }
    out
}

/// Applies a column permutation inside the `T` columns (given per block) and the `S` columns.
fn permute_columns(dd: &DefiningData, within: &[Vec<usize>], prime: &[usize]) -> DefiningData {
    let mut out = dd.clone();
    for i in 0..=dd.r {
        out.l[i] = within[i].iter().map(|&j| dd.l[i][j]).collect();
    }
    for t in 0..dd.s {
        out.d[t] = (0..=dd.r)
            .flat_map(|i| within[i].iter().map(move |&j| (i, j)))
            .map(|(i, j)| dd.d[t][dd.col_index(Col::T(i, j))])
            .collect();
        out.dprime[t] = prime.iter().map(|&k| dd.dprime[t][k]).collect();
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All orderings of `0..n` that sort `keys` descending, ties permuted every way.
fn sorted_orderings<K: Ord + Clone>(keys: &[K]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].cmp(&keys[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        match groups.last_mut() {
            Some(g) if keys[g[0]] == keys[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut acc: Vec<Vec<usize>> = vec![vec![]];
    for g in &groups {
        let perms = permutations(g);
        acc = acc
            .iter()
            .flat_map(|pre| {
                perms.iter().map(move |p| {
                    let mut v = pre.clone();
                    v.extend_from_slice(p);
                    v
                })
            })
            .collect();
    }
    acc
}

/// Canonical `[d | d′]` rows for a fixed column order: a Hermite basis of the
/// bottom rows modulo the row lattice of the top rows, lifted and reduced.
fn canonical_bottom(dd: &DefiningData) -> Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let p = assemble_p(dd).ok()?;
    let (r, s, ncols) = (dd.r, dd.s, p.cols);
    let top: Vec<Vec<BigInt>> = (0..r).map(|i| p.row(i).to_vec()).collect();
    let bottom: Vec<Vec<BigInt>> = (r..r + s).map(|i| p.row(i).to_vec()).collect();
    let top_q: Vec<Vec<Rat>> = top.iter().map(|row| row.iter().map(rat_int).collect()).collect();
    let (red, piv) = rref(&top_q);
    if piv.len() != r {
        return None;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    let den = lcm_all(red.iter().flatten().map(|q| q.denom()));
    let phi = |x: &[BigInt]| -> Vec<BigInt> {
        free.iter()
            .map(|&c| {
                let mut v = rat_int(&x[c]);
                for (row, &pc) in red.iter().zip(&piv) {
                    v -= &row[c] * rat_int(&x[pc]);
                }
                let scaled = v * rat_int(&den);
                debug_assert!(scaled.is_integer());
                scaled.to_integer()
            })
            .collect()
    };
    let images: Vec<Vec<BigInt>> = bottom.iter().map(|b| phi(b)).collect();
    let (h, tr) = hermite_rows(&images);
    if h.len() != s {
        return None;
    }
    let (top_h, _) = hermite_rows(&top);
    let top_piv: Vec<usize> =
        top_h.iter().map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
    let mut rows = Vec::with_capacity(s);
    for t in tr.iter() {
        let mut lift: Vec<BigInt> = (0..ncols).map(|c| t.iter().zip(&bottom).map(|(a, b)| a * &b[c]).sum()).collect();
        for (hrow, &pc) in top_h.iter().zip(&top_piv) {
            let q = lift[pc].div_floor(&hrow[pc]);
            if !q.is_zero() {
                for c in 0..ncols {
                    let v = &q * &hrow[c];
                    lift[c] -= v;
                }
            }
        }
        rows.push(lift.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>()?);
    }
    let nt = dd.n_total();
    Some((
        rows.iter().map(|row| row[..nt].to_vec()).collect(),
        rows.iter().map(|row| row[nt..].to_vec()).collect(),
    ))
}

/// Canonical representative of the admissible-operation orbit.
///
/// Columns inside a block are sorted by exponent (descending), blocks by
/// `(n_i, l_i)` (descending), `d′` columns arbitrarily; every ordering
/// consistent with these sorts is tried. For each, the bottom rows are put in
/// the canonical form of [`canonical_bottom`]; the lexicographically smallest
/// `(d, d′)` wins.
pub fn normalize(dd: &DefiningData) -> DefiningData {
    if dd.check_shape().is_err() {
        return dd.clone();
    }
    let within: Vec<Vec<Vec<usize>>> = dd.l.iter().map(|li| sorted_orderings(li)).collect();
    let primes = permutations(&(0..dd.m).collect::<Vec<_>>());
    let mut best: Option<DefiningData> = None;
    let mut col_choices: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for w in &within {
        col_choices = col_choices
            .iter()
            .flat_map(|pre| {
                w.iter().map(move |o| {
                    let mut v = pre.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    for cols in &col_choices {
        for pr in &primes {
            let sorted = permute_columns(dd, cols, pr);
            let keys: Vec<(usize, Vec<i64>)> =
                (0..=dd.r).map(|i| (sorted.n[i], sorted.l[i].clone())).collect();
            for order in sorted_orderings(&keys) {
                let mut cand = permute_blocks(&sorted, &order);
                let Some((d, dp)) = canonical_bottom(&cand) else { continue };
                cand.d = d;
                cand.dprime = dp;
                if best.as_ref().map_or(true, |b| (&cand.d, &cand.dprime) < (&b.d, &b.dprime)) {
                    best = Some(cand);
                }
            }
        }
    }
    best.unwrap_or_else(|| dd.clone())
}

/// Parses the JSON input schema.
pub fn from_json(s: &str) -> Result<DefiningData, String> {
    let dd: DefiningData = serde_json::from_str(s).map_err(|e| e.to_string())?;
    dd.check_shape().map_err(|e| e.to_string())?;
    Ok(dd)
}

pub fn to_json(dd: &DefiningData) -> String {
    serde_json::to_string(dd).expect("defining data serialises")
}

/// Free-rank-one weights: the primitive positive generator of `ker P` if it exists.
pub fn weights(dd: &DefiningData) -> Option<Vec<BigInt>> {
    let p = assemble_p(dd).ok()?;
    let k = crate::exact::kernel_basis(&p);
    if k.len() != 1 {
        return None;
    }
    let mut w = k[0].clone();
    if w.iter().any(|x| x.is_negative()) {
        w.iter_mut().for_each(|x| *x = -&*x);
    }
    w.iter().all(|x| x.is_positive()).then_some(w)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::{int, to_big};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The quadric matrix as usually written down. Its maximal minors are all
    /// ±2, so its class group is `Z ⊕ Z/2`: a free involution quotient of the
    /// smooth quadric rather than the quadric itself.
    pub fn quadric_listed() -> DefiningData {
        DefiningData::new(
            vec![vec![1, 1], vec![1, 1], vec![2]],
            vec![vec![0, 1, 0, 0, -1], vec![0, 0, 1, -1, 0]],
        )
    }

    /// The smooth quadric threefold, `K = Z`.
    pub fn quadric() -> DefiningData {
        DefiningData::new(
            vec![vec![1, 1], vec![1, 1], vec![2]],
            vec![vec![0, 1, 0, 0, -1], vec![0, 0, 1, 0, -1]],
        )
    }

    pub fn e6() -> DefiningData {
        DefiningData::new(vec![vec![1, 3], vec![3], vec![2]], vec![vec![-1, -2, 1, 1]])
    }

    #[test]
    fn assemble_quadric() {
        let p = assemble_p(&quadric_listed()).unwrap();
        let cols: Vec<Vec<BigInt>> = (0..5).map(|j| p.col(j)).collect();
        assert_eq!(
            cols,
            vec![
                to_big(&[-1, -1, 0, 0]),
                to_big(&[-1, -1, 1, 0]),
                to_big(&[1, 0, 0, 1]),
                to_big(&[1, 0, 0, -1]),
                to_big(&[0, 2, -1, 0])
            ]
        );
        assert_eq!(crate::exact::kernel_basis(&p), vec![to_big(&[1, 1, 1, 1, 1])]);
    }

    #[test]
    fn assemble_e6_and_errors() {
        let p = assemble_p(&e6()).unwrap();
        assert_eq!(p.row(0), &to_big(&[-1, -3, 3, 0])[..]);
        assert_eq!(p.row(1), &to_big(&[-1, -3, 0, 2])[..]);
        let mut bad = quadric();
        bad.d[0].pop();
        assert!(matches!(assemble_p(&bad), Err(RapError::ShapeMismatch(_))));
        let mut rep = quadric();
        rep.d = vec![vec![0, 0, 0, 0, -1], vec![0, 0, 1, -1, 0]];
        assert!(matches!(rep.validate(true), Err(RapError::InvalidColumns(_))));
    }

    #[test]
    fn grading_quadric_and_e6() {
        let g = grading(&quadric()).unwrap();
        assert_eq!(g.free_rank, 1);
        assert!(g.torsion.is_empty());
        assert!(g.degrees.iter().all(|c| c.free == vec![int(1)]));
        assert_eq!(g.kappa.free, vec![int(3)]);
        let gl = grading(&quadric_listed()).unwrap();
        assert_eq!(gl.torsion, vec![int(2)]);
        assert!(gl.degrees.iter().all(|c| c.free == vec![int(1)]));
        let g6 = grading(&e6()).unwrap();
        let w: Vec<BigInt> = g6.degrees.iter().map(|c| c.free[0].clone()).collect();
        assert_eq!(w, to_big(&[3, 1, 2, 3]));
        // rows of P map to zero
        let p = assemble_p(&quadric()).unwrap();
        for i in 0..p.rows {
            assert!(g.class_of(p.row(i)).is_zero());
        }
    }

    #[test]
    fn fano_examples() {
        assert!(is_fano(&quadric()));
        assert!(is_fano(&e6()));
        // one column with a degree of opposite sign
        let mixed = DefiningData::new(vec![vec![1, 1], vec![1, 1], vec![2]], vec![vec![0, 1, 0, 0, 3], vec![0, 0, 1, -1, 0]]);
        assert!(!is_fano(&mixed));
    }

    #[test]
    fn cox_rendering() {
        assert_eq!(cox_presentation(&quadric()).unwrap().render(), "T1T2+T3T4+T5^2");
        assert_eq!(cox_presentation(&e6()).unwrap().render(), "T1T2^3+T3^3+T4^2");
    }

    #[test]
    fn ops_examples() {
        let q = quadric();
        let sw = admissible_ops(&q, &AdmissibleOp::SwapInBlock { block: 0, a: 0, b: 1 }).unwrap();
        let p = assemble_p(&sw).unwrap();
        assert_eq!(p.col(0), to_big(&[-1, -1, 1, 0]));
        assert_eq!(p.col(1), to_big(&[-1, -1, 0, 0]));
        let add = admissible_ops(&q, &AdmissibleOp::AddTopRow { top: 0, target: 0, factor: 1 }).unwrap();
        let (p0, p1) = (assemble_p(&q).unwrap(), assemble_p(&add).unwrap());
        assert_eq!(p0.row(0), p1.row(0));
        let shifted: Vec<BigInt> = p0.row(2).iter().zip(p0.row(0)).map(|(a, b)| a + b).collect();
        assert_eq!(p1.row(2), &shifted[..]);
        let bad = admissible_ops(&q, &AdmissibleOp::RowTransform { matrix: vec![vec![2, 0], vec![0, 1]] });
        assert!(matches!(bad, Err(RapError::InvalidOp(_))));
    }

    pub fn random_op(rng: &mut impl Rng, dd: &DefiningData) -> AdmissibleOp {
        loop {
            match rng.gen_range(0..5) {
                0 => {
                    let b = rng.gen_range(0..=dd.r);
                    if dd.n[b] > 1 {
                        return AdmissibleOp::SwapInBlock { block: b, a: rng.gen_range(0..dd.n[b]), b: rng.gen_range(0..dd.n[b]) };
                    }
                }
                1 => return AdmissibleOp::SwapBlocks { a: rng.gen_range(0..=dd.r), b: rng.gen_range(0..=dd.r) },
                2 => {
                    return AdmissibleOp::AddTopRow {
                        top: rng.gen_range(0..dd.r),
                        target: rng.gen_range(0..dd.s),
                        factor: rng.gen_range(-2..=2),
                    }
                }
                3 => {
                    // elementary: add a multiple of one row to another, or swap/negate
                    let s = dd.s;
                    let mut m: Vec<Vec<i64>> = (0..s).map(|i| (0..s).map(|j| i64::from(i == j)).collect()).collect();
                    let (i, j) = (rng.gen_range(0..s), rng.gen_range(0..s));
                    if i != j {
                        m[i][j] = rng.gen_range(-2..=2);
                    } else {
                        m[i][i] = -1;
                    }
                    return AdmissibleOp::RowTransform { matrix: m };
                }
                _ => {
                    if dd.m > 1 {
                        return AdmissibleOp::SwapPrime { a: 0, b: dd.m - 1 };
                    }
                }
            }
        }
    }

    #[test]
    fn normal_form_is_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let base = [quadric(), e6(), DefiningData::new(vec![vec![1, 1], vec![2], vec![3]], vec![vec![0, 1, 1, 1], vec![0, 0, 1, 2]]).with_dprime(vec![vec![0], vec![1]])];
        for dd in &base {
            let nf = normalize(dd);
            assert_eq!(normalize(&nf), nf);
            for _ in 0..60 {
                let mut cur = dd.clone();
                for _ in 0..6 {
                    cur = admissible_ops(&cur, &random_op(&mut rng, &cur)).unwrap();
                }
                assert_eq!(normalize(&cur), nf);
                let g0 = grading(dd).unwrap();
                let g1 = grading(&cur).unwrap();
                assert_eq!(g0.torsion, g1.torsion);
                assert_eq!(is_fano(dd), is_fano(&cur));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let nf = normalize(&quadric());
        let s = to_json(&nf);
        assert_eq!(to_json(&from_json(&s).unwrap()), s);
        assert!(from_json("{\"r\": 2").is_err());
    }

    #[test]
    fn dimension_identity() {
        for dd in [quadric(), e6()] {
            let g = grading(&dd).unwrap();
            assert_eq!(dd.n_total() + dd.m - (dd.r - 1) - g.free_rank, dd.s + 1);
        }
    }
}
