//! Exact integer and rational arithmetic plus integer-lattice linear algebra.
//!
//! Everything downstream is computed with arbitrary-precision integers and
//! reduced rationals; a single rounding error would flip a terminality verdict.

use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Reduced rational with positive denominator.
pub type Rat = BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Renders a rational as `p/q`, or `p` when integral.
pub fn rat_to_string(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q` or `p`. Returns `None` on malformed input or a zero denominator.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

/// Serde adapter storing a rational as the string `p/q`.
pub mod rat_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

/// gcd of the absolute values of the entries; 0 for the zero (or empty) vector.
pub fn gcd_vector(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn lcm_all<'a>(v: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    v.into_iter().fold(BigInt::one(), |l, x| l.lcm(x))
}

/// Divides by the content; the zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_vector(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let l = lcm_all(v.iter().map(|q| q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    primitive(&ints)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds from rows; every row must have the same length.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let entries = rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect();
        IntMat { rows: rows.len(), cols, entries }
    }

    pub fn from_cols(cols: &[Vec<BigInt>]) -> Self {
        let nrows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMat {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * f;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * f;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn rank(&self) -> usize {
        rank_rat(&self.to_rows().iter().map(|r| r.iter().map(rat_int).collect()).collect::<Vec<_>>())
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`, `dᵢ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with transforms.
///
/// Pivot rule: smallest nonzero absolute value in the active submatrix,
/// leftmost column first, then topmost row. The rule makes the output a
/// deterministic function of the input.
pub fn smith_normal_form(m: &IntMat) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_pivot(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        // Reduce row t and column t; a nonzero remainder becomes the next pivot.
        let mut clean = true;
        for i in t + 1..rows {
            if d[(i, t)].is_zero() {
                continue;
            }
            let q = -d[(i, t)].div_floor(&d[(t, t)]);
            d.add_row(i, t, &q);
            u.add_row(i, t, &q);
            clean &= d[(i, t)].is_zero();
        }
        for j in t + 1..cols {
            if d[(t, j)].is_zero() {
                continue;
            }
            let q = -d[(t, j)].div_floor(&d[(t, t)]);
            d.add_col(j, t, &q);
            v.add_col(j, t, &q);
            clean &= d[(t, j)].is_zero();
        }
        if clean {
            t += 1;
        }
    }
    // Signs, then the divisibility chain via 2x2 gcd/lcm transforms.
    let k = rows.min(cols);
    for i in 0..k {
        if d[(i, i)].is_negative() {
            d.negate_row(i);
            u.negate_row(i);
        }
    }
    loop {
        let mut changed = false;
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (d[(i, i)].clone(), d[(j, j)].clone());
                if a.is_zero() || (!b.is_zero() && (&b % &a).is_zero()) {
                    continue;
                }
                if b.is_zero() {
                    continue;
                }
                let e = a.extended_gcd(&b);
                let (g, x, y) = (e.gcd, e.x, e.y);
                let (ag, bg) = (&a / &g, &b / &g);
                // U' = [[x, y], [-b/g, a/g]] on rows i, j
                let (ui, uj) = (u.row(i).to_vec(), u.row(j).to_vec());
                for c in 0..rows {
                    u[(i, c)] = &x * &ui[c] + &y * &uj[c];
                    u[(j, c)] = -&bg * &ui[c] + &ag * &uj[c];
                }
                // V' = [[1, -y b/g], [1, x a/g]] on cols i, j
                let (vi, vj) = (v.col(i), v.col(j));
                for r in 0..cols {
                    v[(r, i)] = &vi[r] + &vj[r];
                    v[(r, j)] = -(&y * &bg) * &vi[r] + (&x * &ag) * &vj[r];
                }
                d[(i, i)] = g;
                d[(j, j)] = &a * &bg;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    SmithForm { u, d, v }
}

fn smallest_pivot(d: &IntMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for j in t..d.cols {
        for i in t..d.rows {
            let a = d[(i, j)].abs();
            if a.is_zero() {
                continue;
            }
            if best.as_ref().map_or(true, |(b, _, _)| a < *b) {
                best = Some((a, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Row-style Hermite normal form of the row lattice: echelon, positive pivots,
/// entries above a pivot reduced into `[0, pivot)`, zero rows dropped.
/// Returns the basis rows and the unimodular transform restricted to them
/// (`basis = T · input`).
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut tr: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        // Euclid on column c among rows r..n
        loop {
            let piv = (r..n)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()).then(i.cmp(&j)));
            let Some(p) = piv else { break };
            a.swap(r, p);
            tr.swap(r, p);
            let mut done = true;
            for i in r + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for k in 0..cols {
                    let v = &a[r][k] * &q;
                    a[i][k] -= v;
                }
                for k in 0..n {
                    let v = &tr[r][k] * &q;
                    tr[i][k] -= v;
                }
                done &= a[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            a[r].iter_mut().for_each(|x| *x = -&*x);
            tr[r].iter_mut().for_each(|x| *x = -&*x);
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if q.is_zero() {
                continue;
            }
            for k in 0..cols {
                let v = &a[r][k] * &q;
                a[i][k] -= v;
            }
            for k in 0..n {
                let v = &tr[r][k] * &q;
                tr[i][k] -= v;
            }
        }
        r += 1;
    }
    a.truncate(r);
    tr.truncate(r);
    (a, tr)
}

/// Saturated lattice basis of `ker(M) ∩ Z^cols`, in Hermite normal form.
pub fn kernel_basis(m: &IntMat) -> Vec<Vec<BigInt>> {
    let sf = smith_normal_form(m);
    let rank = sf.rank();
    let gens: Vec<Vec<BigInt>> = (rank..m.cols).map(|j| sf.v.col(j)).collect();
    if gens.is_empty() {
        return gens;
    }
    hermite_rows(&gens).0
}

/// Rank of a rational matrix given by rows.
pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    row_echelon(rows).len()
}

/// Reduced row echelon form over Q (nonzero rows only) and pivot columns.
pub fn rref(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        a[r].iter_mut().for_each(|x| *x *= &inv);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let v = &a[r][k] * &f;
                    a[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

fn row_echelon(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    rref(rows).0
}

/// Solves `A x = b` over Q (A given by rows). Returns one solution if consistent.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &c) in red.iter().zip(&piv) {
        x[c] = row[n].clone();
    }
    Some(x)
}

/// Basis of the rational kernel `{x : A x = 0}` (A given by rows, `n` columns).
pub fn kernel_rat(a: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let (red, piv) = rref(a);
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); n];
            x[f] = Rat::one();
            for (row, &c) in red.iter().zip(&piv) {
                x[c] = -row[f].clone();
            }
            x
        })
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_rat(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(rat_int).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_smith(m: &IntMat) {
        let sf = smith_normal_form(m);
        assert_eq!(sf.u.mul(m).mul(&sf.v), sf.d);
        assert!(sf.u.is_unimodular() && sf.v.is_unimodular());
        for i in 0..sf.d.rows {
            for j in 0..sf.d.cols {
                if i != j {
                    assert!(sf.d[(i, j)].is_zero());
                }
            }
        }
        let diag = sf.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "{diag:?}");
            } else {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn smith_small_cases() {
        let sf = smith_normal_form(&IntMat::from_rows(&[vec![2i64, 0], vec![0, 3]]));
        assert_eq!(sf.diagonal(), to_big(&[1, 6]));
        let z = IntMat::zeros(2, 2);
        let sf = smith_normal_form(&z);
        assert_eq!(sf.diagonal(), to_big(&[0, 0]));
        assert_eq!(sf.u, IntMat::identity(2));
        assert_eq!(sf.v, IntMat::identity(2));
    }

    #[test]
    fn smith_random_4x5() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rows: Vec<Vec<i64>> =
                (0..4).map(|_| (0..5).map(|_| rng.gen_range(-20..=20)).collect()).collect();
            check_smith(&IntMat::from_rows(&rows));
        }
    }

    #[test]
    fn smith_is_deterministic() {
        let m = IntMat::from_rows(&[vec![4i64, 6, -2], vec![8, 3, 5]]);
        assert_eq!(smith_normal_form(&m), smith_normal_form(&m));
    }

    #[test]
    fn kernels() {
        assert!(kernel_basis(&IntMat::identity(3)).is_empty());
        assert_eq!(kernel_basis(&IntMat::from_rows(&[vec![2i64, -2]])), vec![to_big(&[1, 1])]);
        let quadric = IntMat::from_rows(&[
            vec![-1i64, -1, 1, 1, 0],
            vec![-1, -1, 0, 0, 2],
            vec![0, 1, 0, 0, -1],
            vec![0, 0, 1, -1, 0],
        ]);
        assert_eq!(kernel_basis(&quadric), vec![to_big(&[1, 1, 1, 1, 1])]);
    }

    #[test]
    fn kernel_is_saturated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let rows: Vec<Vec<i64>> =
                (0..2).map(|_| (0..5).map(|_| rng.gen_range(-6..=6)).collect()).collect();
            let m = IntMat::from_rows(&rows);
            let k = kernel_basis(&m);
            assert_eq!(k.len(), 5 - m.rank());
            for v in &k {
                assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
            if !k.is_empty() {
                // saturated iff all nonzero invariant factors of the basis are 1
                let sf = smith_normal_form(&IntMat::from_rows(&k));
                assert!(sf.diagonal().iter().all(|d| d.is_one()));
            }
        }
    }

    #[test]
    fn gcds() {
        assert_eq!(gcd_vector(&to_big(&[0, 0, -1, 2])), int(1));
        assert_eq!(gcd_vector(&to_big(&[6, -9, 12])), int(3));
        assert_eq!(gcd_vector(&to_big(&[0, 0, 0])), int(0));
    }

    #[test]
    fn rational_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rat(rng.gen_range(-50..50), rng.gen_range(1..30));
            let c = rat(rng.gen_range(-50..50), rng.gen_range(1..30));
            assert_eq!((&a + &c) - &c, a);
            assert_eq!(parse_rat(&rat_to_string(&a)), Some(a.clone()));
        }
        assert_eq!(parse_rat("3/0"), None);
        assert_eq!(rat_to_string(&rat(-6, 4)), "-3/2");
    }

    #[test]
    fn hermite_canonical() {
        let (h, t) = hermite_rows(&[to_big(&[2, 4, 1]), to_big(&[0, 2, 3])]);
        let orig = [to_big(&[2, 4, 1]), to_big(&[0, 2, 3])];
        for (row, tr) in h.iter().zip(&t) {
            let recon: Vec<BigInt> =
                (0..3).map(|k| tr.iter().zip(&orig).map(|(c, o)| c * &o[k]).sum()).collect();
            assert_eq!(&recon, row);
        }
        let (h2, _) = hermite_rows(&[to_big(&[2, 6, 4]), to_big(&[0, -2, -3])]);
        assert_eq!(h, h2);
    }
}
