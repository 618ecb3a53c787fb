//! Machine-integer prefilter.
//!
//! Runs the cheap conditions first — valid columns, positive weights,
//! `κ > 0`, `ℓ_σ > 0` on every elementary big cone and, for `s = 2`, no
//! lattice points other than `0` and columns in the lineality polygon `A⁰`
//! and in the integer-height sections of the leaf polytopes `A^i` — so the
//! exact pipeline only sees the survivors. Every
//! rejection here is an exact statement (all arithmetic is in `i128`);
//! candidates outside its scope are passed on untouched.

use crate::rap::DefiningData;

use super::Gate;

/// What the prefilter learned about a surviving candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastInfo {
    /// Primitive positive generator of `ker P`.
    pub weights: Vec<i64>,
    /// `gcd` of the maximal minors: order of the torsion part.
    pub torsion_order: i64,
}

/// A rejection with an optional ambient lattice point as witness.
pub type FastReject = (Gate, Option<Vec<i64>>);

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn assemble(dd: &DefiningData) -> Vec<Vec<i64>> {
    let (r, s) = (dd.r, dd.s);
    let nt = dd.n_total();
    let mut p = vec![vec![0i64; nt + dd.m]; r + s];
    let mut off = dd.n[0];
    for i in 1..=r {
        for j in 0..dd.n[0] {
            p[i - 1][j] = -dd.l[0][j];
        }
        for j in 0..dd.n[i] {
            p[i - 1][off + j] = dd.l[i][j];
        }
        off += dd.n[i];
    }
    for t in 0..s {
        p[r + t][..nt].copy_from_slice(&dd.d[t]);
        p[r + t][nt..].copy_from_slice(&dd.dprime[t]);
    }
    p
}

/// Fraction-free elimination; exact for integer input.
fn det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `None` when the candidate is outside the prefilter's scope (free rank
/// other than one is decided by the exact pipeline).
pub fn fast_gate(dd: &DefiningData) -> Result<Option<FastInfo>, FastReject> {
    if dd.check_shape().is_err() {
        return Err((Gate::Validity, None));
    }
    if !dd.is_irredundant() {
        return Err((Gate::Irredundancy, None));
    }
    let p = assemble(dd);
    let rows = p.len();
    let n = p[0].len();
    let cols: Vec<Vec<i64>> = (0..n).map(|j| p.iter().map(|row| row[j]).collect()).collect();
    for (j, c) in cols.iter().enumerate() {
        if c.iter().fold(0i128, |g, &x| gcd(g, x as i128)) != 1 || cols[..j].contains(c) {
            return Err((Gate::Validity, None));
        }
    }
    if n != rows + 1 {
        return Ok(None);
    }
    // Signed maximal minors span the kernel.
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let m: Vec<Vec<i128>> = p
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x as i128).collect())
            .collect();
        let d = det(m);
        w.push(if j % 2 == 0 { d } else { -d });
    }
    if w.iter().all(|&x| x == 0) {
        return Err((Gate::FreeRank, None));
    }
    if w[0] < 0 {
        w.iter_mut().for_each(|x| *x = -*x);
    }
    if w.iter().any(|&x| x <= 0) {
        return Err((Gate::Validity, None));
    }
    let t = w.iter().fold(0, |g, &x| gcd(g, x));
    let w: Vec<i128> = w.iter().map(|x| x / t).collect();
    // κ: sum of weights minus (r−1) times the relation degree.
    let rel: i128 = (0..dd.n[0]).map(|j| dd.l[0][j] as i128 * w[j]).sum();
    let kappa = w.iter().sum::<i128>() - (dd.r as i128 - 1) * rel;
    if kappa <= 0 {
        return Err((Gate::Fano, None));
    }
    // Elementary big cones: one column per block.
    let mut offs = vec![0usize; dd.r + 1];
    for i in 1..=dd.r {
        offs[i] = offs[i - 1] + dd.n[i - 1];
    }
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..=dd.r {
        tuples = tuples.into_iter().flat_map(|t| (0..dd.n[i]).map(move |j| [t.clone(), vec![j]].concat())).collect();
    }
    // Base points (0, v′_σ) as (numerators, ℓ_σ).
    let mut base: Vec<([i128; 2], i128)> = Vec::new();
    for tup in &tuples {
        let ls: Vec<i128> = tup.iter().enumerate().map(|(i, &j)| dd.l[i][j] as i128).collect();
        let prod: i128 = ls.iter().product();
        let ell_rho: Vec<i128> = ls.iter().map(|l| prod / l).collect();
        let ell = ell_rho.iter().sum::<i128>() - (dd.r as i128 - 1) * prod;
        if ell <= 0 {
            return Err((Gate::LogTerminal, None));
        }
        if dd.s == 2 {
            let y = |k: usize| -> i128 {
                tup.iter().enumerate().map(|(i, &j)| ell_rho[i] * dd.d[k][offs[i] + j] as i128).sum()
            };
            base.push(reduce([y(0), y(1)], ell));
        }
    }
    if dd.s == 2 {
        // A⁰: base points and the d′ columns; allowed are 0 and those columns.
        let mut pts = base.clone();
        let mut allowed = vec![[0i128, 0]];
        for k in 0..dd.m {
            let c = [dd.dprime[0][k] as i128, dd.dprime[1][k] as i128];
            pts.push((c, 1));
            allowed.push(c);
        }
        if let Some(pt) = polygon_lattice_point(&pts, &allowed) {
            let mut amb = vec![0i64; dd.r];
            amb.extend(pt.iter().map(|&x| x as i64));
            return Err((Gate::Terminal, Some(amb)));
        }
        // Leaves, slice by slice at integer heights x ≥ 1.
        for i in 0..=dd.r {
            // the leaf contains all of A⁰, d′ columns included
            let mut verts: Vec<(i128, [i128; 2], i128)> = pts.iter().map(|&(y, d)| (0, y, d)).collect();
            for j in 0..dd.n[i] {
                let c = offs[i] + j;
                verts.push((dd.l[i][j] as i128, [dd.d[0][c] as i128, dd.d[1][c] as i128], 1));
            }
            let top = verts.iter().map(|v| v.0).max().unwrap_or(0);
            for x in 1..=top {
                let allowed: Vec<[i128; 2]> = verts.iter().filter(|v| v.0 == x && v.2 == 1).map(|v| v.1).collect();
                let slice = slice_at(&verts, x);
                if let Some(pt) = polygon_lattice_point(&slice, &allowed) {
                    let mut amb = vec![0i64; dd.r + dd.s];
                    if i == 0 {
                        amb[..dd.r].iter_mut().for_each(|a| *a = -(x as i64));
                    } else {
                        amb[i - 1] = x as i64;
                    }
                    amb[dd.r] = pt[0] as i64;
                    amb[dd.r + 1] = pt[1] as i64;
                    return Err((Gate::Terminal, Some(amb)));
                }
            }
        }
    }
    Ok(Some(FastInfo {
        weights: w.iter().map(|&x| x as i64).collect(),
        torsion_order: t as i64,
    }))
}

fn reduce(y: [i128; 2], d: i128) -> ([i128; 2], i128) {
    let g = gcd(gcd(y[0], y[1]), d) * d.signum();
    ([y[0] / g, y[1] / g], d / g)
}

/// Section of `conv(verts)` at height `x`: the crossings of all vertex pairs.
fn slice_at(verts: &[(i128, [i128; 2], i128)], x: i128) -> Vec<([i128; 2], i128)> {
    let mut out = Vec::new();
    for (k, a) in verts.iter().enumerate() {
        if a.0 == x {
            out.push((a.1, a.2));
        }
        for b in &verts[k + 1..] {
            let (lo, hi) = if a.0 < b.0 { (a, b) } else { (b, a) };
            if !(lo.0 < x && x < hi.0) {
                continue;
            }
            let dh = hi.0 - lo.0;
            let t = x - lo.0;
            let y = [0, 1].map(|c| lo.1[c] * hi.2 * dh + t * (hi.1[c] * lo.2 - lo.1[c] * hi.2));
            out.push(reduce(y, lo.2 * hi.2 * dh));
        }
    }
    out
}

fn cross(o: (i128, i128), a: (i128, i128), b: (i128, i128)) -> i128 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// A lattice point of `conv(y_k / ℓ_k)` outside `allowed`, if any.
pub fn polygon_lattice_point(verts: &[([i128; 2], i128)], allowed: &[[i128; 2]]) -> Option<[i128; 2]> {
    if verts.is_empty() {
        return None;
    }
    let den = verts.iter().fold(1i128, |acc, (_, l)| acc / gcd(acc, *l) * l);
    let mut pts: Vec<(i128, i128)> = verts.iter().map(|(y, l)| (y[0] * (den / l), y[1] * (den / l))).collect();
    pts.sort();
    pts.dedup();
    let ok = |x: i128, y: i128| !allowed.contains(&[x, y]);
    let hull = convex_hull(&pts);
    if hull.len() < 3 {
        // a point or a segment: scan its bounding box
        let (a, b) = (pts[0], pts[pts.len() - 1]);
        let (xl, xh) = (a.0.min(b.0), a.0.max(b.0));
        let (yl, yh) = (a.1.min(b.1), a.1.max(b.1));
        for x in ceil_div(xl, den)..=floor_div(xh, den) {
            for y in ceil_div(yl, den)..=floor_div(yh, den) {
                if cross(a, b, (x * den, y * den)) == 0 && ok(x, y) {
                    return Some([x, y]);
                }
            }
        }
        return None;
    }
    let ymin = hull.iter().map(|p| p.1).min().unwrap();
    let ymax = hull.iter().map(|p| p.1).max().unwrap();
    for y in ceil_div(ymin, den)..=floor_div(ymax, den) {
        let yy = y * den;
        let (mut lo, mut hi) = (i128::MIN, i128::MAX);
        let mut empty = false;
        for k in 0..hull.len() {
            let a = hull[k];
            let b = hull[(k + 1) % hull.len()];
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            // inside: dx*(Y - ay) - dy*(X - ax) >= 0, with X = x*den
            let rhs = dx * (yy - a.1) + dy * a.0; // dy*X <= rhs
            if dy > 0 {
                hi = hi.min(floor_div(rhs, dy * den));
            } else if dy < 0 {
                lo = lo.max(ceil_div(rhs, dy * den));
            } else if dx * (yy - a.1) < 0 {
                empty = true;
                break;
            }
        }
        if empty || lo > hi {
            continue;
        }
        if let Some(x) = (lo..=hi).find(|&x| ok(x, y)) {
            return Some([x, y]);
        }
    }
    None
}

/// Monotone chain, counter-clockwise, collinear points dropped.
fn convex_hull(pts: &[(i128, i128)]) -> Vec<(i128, i128)> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut lower: Vec<(i128, i128)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i128, i128)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rap::tests::{e6, quadric};

    #[test]
    fn determinant() {
        assert_eq!(det(vec![vec![2, 1], vec![1, 3]]), 5);
        assert_eq!(det(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 4]]), -4);
    }

    #[test]
    fn weights_of_known_examples() {
        let info = fast_gate(&quadric()).unwrap().unwrap();
        assert_eq!(info.weights, vec![1, 1, 1, 1, 1]);
        assert_eq!(info.torsion_order, 1);
        let info = fast_gate(&e6()).unwrap().unwrap();
        let w = crate::rap::weights(&e6()).unwrap();
        assert_eq!(info.weights.iter().map(|&x| num::BigInt::from(x)).collect::<Vec<_>>(), w);
    }

    #[test]
    fn polygon_scan() {
        // unit square around the origin scaled by 1/2: only the origin
        let sq = vec![([1, 1], 2), ([-1, 1], 2), ([-1, -1], 2), ([1, -1], 2)];
        assert_eq!(polygon_lattice_point(&sq, &[[0, 0]]), None);
        assert_eq!(polygon_lattice_point(&sq, &[]), Some([0, 0]));
        let big = vec![([3, 0], 2), ([-1, 1], 1), ([-1, -1], 1)];
        assert_eq!(polygon_lattice_point(&big, &[[0, 0]]), Some([-1, -1]));
        assert_eq!(polygon_lattice_point(&big, &[[0, 0], [-1, -1], [-1, 0], [-1, 1], [1, 0]]), None);
        // segments and points
        let seg = vec![([0, 0], 1), ([4, 2], 1)];
        assert_eq!(polygon_lattice_point(&seg, &[[0, 0], [4, 2]]), Some([2, 1]));
        assert_eq!(polygon_lattice_point(&[([1, 1], 2)], &[]), None);
        assert_eq!(polygon_lattice_point(&[([3, 1], 1)], &[[3, 1]]), None);
    }

    #[test]
    fn rejects_non_positive_kappa() {
        // Large exponents everywhere: ℓ ≤ 0
        let dd = DefiningData::new(vec![vec![7], vec![7], vec![7]], vec![vec![1, 1, 1]])
            .with_dprime(vec![vec![-1]]);
        assert!(fast_gate(&dd).is_err());
    }
}
