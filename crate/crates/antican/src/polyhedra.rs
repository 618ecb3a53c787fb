//! Exact rational convex geometry in low dimension: hulls, polar duals,
//! halfspace descriptions, cones and lattice points.
//!
//! The workhorse is a double-description routine over primitive integer
//! vectors; every other conversion is a homogenised call into it.

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{
    clear_denominators, dot, dot_rat, primitive, rank_rat, rat_int, to_rat, Rat,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("origin is not an interior point; the dual is unbounded")]
    OriginNotInterior,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is empty")]
    Empty,
}

/// Extreme rays and lineality basis of `{x : ⟨a, x⟩ ≥ 0 for all rows a}`.
#[derive(Clone, Debug)]
pub struct ConeRep {
    pub rays: Vec<Vec<BigInt>>,
    pub lines: Vec<Vec<BigInt>>,
}

#[derive(Clone)]
struct DdRay {
    v: Vec<BigInt>,
    zero: Vec<u64>,
}

fn bit_set(s: &mut [u64], k: usize) {
    s[k / 64] |= 1 << (k % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

/// Double description with the combinatorial adjacency test.
pub fn dd_cone(rows: &[Vec<BigInt>], dim: usize) -> ConeRep {
    let words = rows.len().div_ceil(64).max(1);
    let mut lines: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut rays: Vec<DdRay> = Vec::new();
    let mut processed = vec![0u64; words];
    for (k, a) in rows.iter().enumerate() {
        if let Some(li) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lines.swap_remove(li);
            let mut s = dot(a, &l);
            if s.is_negative() {
                l.iter_mut().for_each(|x| *x = -&*x);
                s = -s;
            }
            for other in lines.iter_mut() {
                let t = dot(a, other);
                if !t.is_zero() {
                    let nv: Vec<BigInt> = other.iter().zip(&l).map(|(o, li)| &s * o - &t * li).collect();
                    *other = primitive(&nv);
                }
            }
            for r in rays.iter_mut() {
                let t = dot(a, &r.v);
                if !t.is_zero() {
                    let nv: Vec<BigInt> = r.v.iter().zip(&l).map(|(o, li)| &s * o - &t * li).collect();
                    r.v = primitive(&nv);
                }
                bit_set(&mut r.zero, k);
            }
            rays.push(DdRay { v: l, zero: processed.clone() });
        } else {
            let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
            let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
            let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
            let need = (dim - lines.len()).saturating_sub(2);
            let mut fresh = Vec::new();
            for &p in &pos {
                for &n in &neg {
                    let z: Vec<u64> = rays[p].zero.iter().zip(&rays[n].zero).map(|(x, y)| x & y).collect();
                    if popcount(&z) < need {
                        continue;
                    }
                    let adjacent = (0..rays.len())
                        .all(|q| q == p || q == n || !subset(&z, &rays[q].zero));
                    if !adjacent {
                        continue;
                    }
                    let nv: Vec<BigInt> = rays[n]
                        .v
                        .iter()
                        .zip(&rays[p].v)
                        .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                        .collect();
                    let mut zero = z;
                    bit_set(&mut zero, k);
                    fresh.push(DdRay { v: primitive(&nv), zero });
                }
            }
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i].is_zero() {
                    bit_set(&mut r.zero, k);
                }
            }
            let mut kept: Vec<DdRay> =
                rays.into_iter().enumerate().filter(|(i, _)| !vals[*i].is_negative()).map(|(_, r)| r).collect();
            kept.extend(fresh);
            rays = kept;
        }
        bit_set(&mut processed, k);
    }
    ConeRep { rays: rays.into_iter().map(|r| r.v).collect(), lines }
}

/// `⟨normal, x⟩ ≥ offset` (or `=` when used as an equation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Halfspace {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot_rat(&self.normal, x) - &self.offset
    }
}

/// A bounded convex polytope with both descriptions.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub ambient_dim: usize,
    /// Irredundant, lexicographically sorted.
    pub vertices: Vec<Vec<Rat>>,
    pub halfspaces: Vec<Halfspace>,
    pub equations: Vec<Halfspace>,
}

fn lex_cmp(a: &[Rat], b: &[Rat]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}

/// Homogenises a rational point to a primitive integer vector `(D, D·p)`.
fn homogenise(p: &[Rat]) -> Vec<BigInt> {
    let mut v = vec![Rat::one()];
    v.extend_from_slice(p);
    clear_denominators(&v)
}

fn int_halfspace(v: &[BigInt]) -> Halfspace {
    // v = (β, a) meaning β + ⟨a, x⟩ ≥ 0
    Halfspace { normal: to_rat(&v[1..]), offset: -rat_int(&v[0]) }
}

/// Convex hull of a nonempty finite point set.
pub fn hull(points: &[Vec<Rat>]) -> Polytope {
    assert!(!points.is_empty(), "hull of an empty set");
    let dim = points[0].len();
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    let rows: Vec<Vec<BigInt>> = pts.iter().map(|p| homogenise(p)).collect();
    let rep = dd_cone(&rows, dim + 1);
    let equations: Vec<Halfspace> = rep.lines.iter().map(|l| int_halfspace(l)).collect();
    let mut halfspaces: Vec<Halfspace> = Vec::new();
    let mut tight: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for r in &rep.rays {
        let hits: Vec<usize> = (0..pts.len()).filter(|&i| dot(r, &rows[i]).is_zero()).collect();
        if hits.is_empty() {
            continue;
        }
        let h = int_halfspace(r);
        for &i in &hits {
            tight[i].push(halfspaces.len());
        }
        halfspaces.push(h);
    }
    let eq_rows: Vec<Vec<Rat>> = equations.iter().map(|e| e.normal.clone()).collect();
    let vertices: Vec<Vec<Rat>> = pts
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let mut m = eq_rows.clone();
            m.extend(tight[*i].iter().map(|&f| halfspaces[f].normal.clone()));
            rank_rat(&m) == dim
        })
        .map(|(_, p)| p.clone())
        .collect();
    Polytope { ambient_dim: dim, vertices, halfspaces, equations }
}

/// The bounded polyhedron `{x : ⟨a, x⟩ ≥ b}`.
pub fn from_halfspaces(hs: &[Halfspace], dim: usize) -> Result<Polytope, PolyError> {
    let mut rows: Vec<Vec<BigInt>> = hs
        .iter()
        .map(|h| {
            let mut v = vec![-h.offset.clone()];
            v.extend(h.normal.iter().cloned());
            clear_denominators(&v)
        })
        .collect();
    let mut t = vec![BigInt::zero(); dim + 1];
    t[0] = BigInt::one();
    rows.push(t);
    let rep = dd_cone(&rows, dim + 1);
    if !rep.lines.is_empty() || rep.rays.iter().any(|r| r[0].is_zero() && r.iter().any(|x| !x.is_zero())) {
        return Err(PolyError::Unbounded);
    }
    let verts: Vec<Vec<Rat>> = rep
        .rays
        .iter()
        .filter(|r| r[0].is_positive())
        .map(|r| r[1..].iter().map(|x| Rat::new(x.clone(), r[0].clone())).collect())
        .collect();
    if verts.is_empty() {
        return Err(PolyError::Empty);
    }
    Ok(hull(&verts))
}

/// `{y : ⟨y, x⟩ ≥ −1 for all x ∈ P}`; requires 0 in the interior of `P`.
pub fn dual_polytope(p: &Polytope) -> Result<Polytope, PolyError> {
    if !p.equations.is_empty() || p.halfspaces.iter().any(|h| !h.offset.is_negative()) {
        return Err(PolyError::OriginNotInterior);
    }
    let verts: Vec<Vec<Rat>> = p
        .halfspaces
        .iter()
        .map(|h| {
            let s = -h.offset.recip();
            h.normal.iter().map(|x| x * &s).collect()
        })
        .collect();
    Ok(hull(&verts))
}

pub fn scale(p: &Polytope, eps: &Rat) -> Polytope {
    assert!(eps.is_positive(), "scale factor must be positive");
    let sc = |h: &Halfspace| Halfspace { normal: h.normal.clone(), offset: &h.offset * eps };
    Polytope {
        ambient_dim: p.ambient_dim,
        vertices: p.vertices.iter().map(|v| v.iter().map(|x| x * eps).collect()).collect(),
        halfspaces: p.halfspaces.iter().map(sc).collect(),
        equations: p.equations.iter().map(sc).collect(),
    }
}

/// Integer-scaled constraint for fast membership tests.
struct IntConstraint {
    a: Vec<BigInt>,
    b: BigInt,
    small: Option<(Vec<i128>, i128)>,
}

impl IntConstraint {
    fn new(h: &Halfspace) -> Self {
        let mut v = h.normal.clone();
        v.push(h.offset.clone());
        let l = crate::exact::lcm_all(v.iter().map(|q| q.denom()));
        let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
        let (a, b) = (ints[..ints.len() - 1].to_vec(), ints[ints.len() - 1].clone());
        let small = a
            .iter()
            .map(|x| x.to_i64().map(i128::from))
            .collect::<Option<Vec<i128>>>()
            .zip(b.to_i64().map(i128::from));
        IntConstraint { a, b, small }
    }

    /// sign of ⟨a, x⟩ − b
    fn sign(&self, x: &[i64]) -> Ordering {
        if let Some((a, b)) = &self.small {
            let s: i128 = a.iter().zip(x).map(|(p, q)| p * i128::from(*q)).sum();
            return s.cmp(b);
        }
        let s: BigInt = self.a.iter().zip(x).map(|(p, q)| p * BigInt::from(*q)).sum();
        s.cmp(&self.b)
    }
}

impl Polytope {
    pub fn dim(&self) -> usize {
        let eqs: Vec<Vec<Rat>> = self.equations.iter().map(|e| e.normal.clone()).collect();
        self.ambient_dim - rank_rat(&eqs)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|e| e.eval(x).is_zero())
            && self.halfspaces.iter().all(|h| !h.eval(x).is_negative())
    }

    /// Interior relative to the affine hull.
    pub fn relint_contains(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|e| e.eval(x).is_zero())
            && self.halfspaces.iter().all(|h| h.eval(x).is_positive())
    }

    /// Smallest integer box containing the polytope, per coordinate.
    pub fn integer_box(&self) -> Vec<(i64, i64)> {
        (0..self.ambient_dim)
            .map(|k| {
                let lo = self.vertices.iter().map(|v| v[k].clone()).min().unwrap();
                let hi = self.vertices.iter().map(|v| v[k].clone()).max().unwrap();
                (lo.ceil().to_integer().to_i64().unwrap(), hi.floor().to_integer().to_i64().unwrap())
            })
            .collect()
    }

    fn scan(&self, strict: bool) -> Vec<Vec<i64>> {
        let eqs: Vec<IntConstraint> = self.equations.iter().map(IntConstraint::new).collect();
        let hs: Vec<IntConstraint> = self.halfspaces.iter().map(IntConstraint::new).collect();
        let bx = self.integer_box();
        let mut out = Vec::new();
        if bx.iter().any(|(lo, hi)| lo > hi) {
            return out;
        }
        let mut x: Vec<i64> = bx.iter().map(|b| b.0).collect();
        loop {
            let ok = eqs.iter().all(|e| e.sign(&x) == Ordering::Equal)
                && hs.iter().all(|h| match h.sign(&x) {
                    Ordering::Greater => true,
                    Ordering::Equal => !strict,
                    Ordering::Less => false,
                });
            if ok {
                out.push(x.clone());
            }
            // odometer, last coordinate fastest
            let mut k = self.ambient_dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if x[k] < bx[k].1 {
                    x[k] += 1;
                    break;
                }
                x[k] = bx[k].0;
            }
        }
    }

    /// All integer points, lexicographically ordered.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.scan(false)
    }

    /// Integer points in the interior relative to the affine hull.
    pub fn relative_interior_lattice_points(&self) -> Vec<Vec<i64>> {
        self.scan(true)
    }
}

pub fn lattice_points(p: &Polytope) -> Vec<Vec<i64>> {
    p.lattice_points()
}

pub fn relative_interior_lattice_points(p: &Polytope) -> Vec<Vec<i64>> {
    p.relative_interior_lattice_points()
}

/// A rational polyhedral cone given by primitive integer generators.
#[derive(Clone, Debug)]
pub struct Cone {
    pub ambient_dim: usize,
    pub rays: Vec<Vec<BigInt>>,
    /// Inward facet normals.
    pub facets: Vec<Vec<BigInt>>,
    /// Basis of the orthogonal complement of the linear span.
    pub equations: Vec<Vec<BigInt>>,
}

impl Cone {
    pub fn new(gens: &[Vec<BigInt>], ambient_dim: usize) -> Self {
        let mut rays: Vec<Vec<BigInt>> =
            gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).map(|g| primitive(g)).collect();
        rays.sort();
        rays.dedup();
        let rep = dd_cone(&rays, ambient_dim);
        Cone { ambient_dim, rays, facets: rep.rays, equations: rep.lines }
    }

    pub fn from_rat(gens: &[Vec<Rat>], ambient_dim: usize) -> Self {
        let ints: Vec<Vec<BigInt>> = gens.iter().map(|g| clear_denominators(g)).collect();
        Self::new(&ints, ambient_dim)
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.equations.len()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|f| !dot(f, x).is_negative())
    }

    pub fn relint_contains(&self, x: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|f| dot(f, x).is_positive())
    }

    pub fn relint_contains_rat(&self, x: &[Rat]) -> bool {
        self.relint_contains(&clear_denominators(x))
    }

    /// True iff the cone contains no line.
    pub fn is_pointed(&self) -> bool {
        let mut m: Vec<Vec<Rat>> = self.facets.iter().map(|f| to_rat(f)).collect();
        m.extend(self.equations.iter().map(|e| to_rat(e)));
        rank_rat(&m) == self.ambient_dim
    }

    /// Generators that are extreme (for a pointed cone: the minimal generating set).
    pub fn extreme_rays(&self) -> Vec<Vec<BigInt>> {
        let d = self.dim();
        self.rays
            .iter()
            .filter(|r| {
                let tight: Vec<Vec<Rat>> =
                    self.facets.iter().filter(|f| dot(f, r).is_zero()).map(|f| to_rat(f)).collect();
                rank_rat(&tight) + 1 == d
            })
            .cloned()
            .collect()
    }
}

/// Euclid-style floor division for rationals.
pub fn floor_rat(q: &Rat) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil_rat(q: &Rat) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[(i64, i64)]) -> Vec<Rat> {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn ipt(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&n| rat(n, 1)).collect()
    }

    #[test]
    fn hull_drops_interior() {
        let p = hull(&[ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[0, 1]), pt(&[(1, 4), (1, 4)])]);
        assert_eq!(p.vertices, vec![ipt(&[0, 0]), ipt(&[0, 1]), ipt(&[1, 0])]);
        assert_eq!(p.dim(), 2);
        let q = hull(&[pt(&[(1, 2), (3, 1)])]);
        assert_eq!(q.vertices.len(), 1);
        assert_eq!(q.dim(), 0);
    }

    #[test]
    fn square_duality() {
        let sq = hull(&[ipt(&[1, 1]), ipt(&[1, -1]), ipt(&[-1, 1]), ipt(&[-1, -1])]);
        let d = dual_polytope(&sq).unwrap();
        assert_eq!(d.vertices, vec![ipt(&[-1, 0]), ipt(&[0, -1]), ipt(&[0, 1]), ipt(&[1, 0])]);
        let tri = hull(&[ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[0, 1])]);
        assert_eq!(dual_polytope(&tri).unwrap_err(), PolyError::OriginNotInterior);
    }

    #[test]
    fn lattice_point_examples() {
        let t = hull(&[ipt(&[0, 0]), ipt(&[2, 0]), ipt(&[0, 2])]);
        assert_eq!(t.lattice_points().len(), 6);
        let s = hull(&[pt(&[(1, 3), (1, 3)]), pt(&[(-1, 3), (1, 3)]), pt(&[(1, 3), (-1, 3)]), pt(&[(-1, 3), (-1, 3)])]);
        assert_eq!(s.lattice_points(), vec![vec![0, 0]]);
        let r = hull(&[ipt(&[-1, -1]), ipt(&[1, 0]), ipt(&[0, 1])]);
        assert_eq!(r.lattice_points(), vec![vec![-1, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn relint_lattice_point_examples() {
        let seg = hull(&[ipt(&[-1, 0]), ipt(&[1, 0])]);
        assert_eq!(seg.relative_interior_lattice_points(), vec![vec![0, 0]]);
        let t = hull(&[ipt(&[0, 0]), ipt(&[1, 0]), ipt(&[0, 1])]);
        assert!(t.relative_interior_lattice_points().is_empty());
        let t3 = hull(&[ipt(&[0, 0]), ipt(&[3, 0]), ipt(&[0, 3])]);
        assert_eq!(t3.relative_interior_lattice_points(), vec![vec![1, 1]]);
    }

    #[test]
    fn scaling() {
        let sq = hull(&[ipt(&[1, 1]), ipt(&[1, -1]), ipt(&[-1, 1]), ipt(&[-1, -1])]);
        assert_eq!(scale(&sq, &rat(1, 1)).vertices, sq.vertices);
        let h = scale(&sq, &rat(1, 2));
        assert_eq!(hull(&h.vertices).vertices, h.vertices);
        assert!(h.vertices.iter().all(|v| v.iter().all(|x| x.abs() == rat(1, 2))));
        assert_eq!(h.lattice_points(), vec![vec![0, 0]]);
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize, r: i64) -> Vec<Vec<Rat>> {
        (0..n).map(|_| (0..dim).map(|_| rat(rng.gen_range(-r..=r), rng.gen_range(1..=3))).collect()).collect()
    }

    /// A point is redundant iff it lies in the hull of the others.
    #[test]
    fn hull_vertices_are_irredundant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let pts = random_points(&mut rng, 9, 3, 6);
            let p = hull(&pts);
            for v in &p.vertices {
                let others: Vec<Vec<Rat>> = p.vertices.iter().filter(|w| *w != v).cloned().collect();
                assert!(!hull(&others).contains(v));
            }
            for q in &pts {
                assert!(p.contains(q));
            }
            // H/V agreement
            for h in &p.halfspaces {
                let tight = p.vertices.iter().filter(|v| h.eval(v).is_zero()).count();
                assert!(tight >= p.dim());
            }
        }
    }

    #[test]
    fn polarity_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 20 {
            let mut pts = random_points(&mut rng, 8, 3, 5);
            // make 0 interior by adding a small cross-polytope
            for k in 0..3 {
                let mut e = vec![rat(0, 1); 3];
                e[k] = rat(1, 2);
                pts.push(e.clone());
                e[k] = rat(-1, 2);
                pts.push(e);
            }
            let p = hull(&pts);
            let dd = dual_polytope(&dual_polytope(&p).unwrap()).unwrap();
            assert_eq!(dd.vertices, p.vertices);
            done += 1;
        }
    }

    #[test]
    fn halfspace_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let p = hull(&random_points(&mut rng, 7, 3, 5));
            if p.dim() < 3 {
                continue;
            }
            let q = from_halfspaces(&p.halfspaces, 3).unwrap();
            assert_eq!(q.vertices, p.vertices);
        }
        let open = [Halfspace { normal: ipt(&[1, 0]), offset: rat(0, 1) }];
        assert_eq!(from_halfspaces(&open, 2).unwrap_err(), PolyError::Unbounded);
    }

    #[test]
    fn scaled_lattice_points_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let mut pts = random_points(&mut rng, 6, 2, 6);
            pts.push(ipt(&[0, 0]));
            let p = hull(&pts);
            let half = scale(&p, &rat(1, 2)).lattice_points();
            let full = p.lattice_points();
            assert!(half.iter().all(|x| full.contains(x)));
        }
    }

    #[test]
    fn cones() {
        let g = vec![crate::exact::to_big(&[1, 0]), crate::exact::to_big(&[1, 2])];
        let c = Cone::new(&g, 2);
        assert!(c.is_pointed());
        assert!(c.relint_contains(&crate::exact::to_big(&[1, 1])));
        assert!(!c.relint_contains(&crate::exact::to_big(&[1, 0])));
        assert!(c.contains(&crate::exact::to_big(&[1, 0])));
        let line = Cone::new(&[crate::exact::to_big(&[1, 1]), crate::exact::to_big(&[-1, -1])], 2);
        assert!(!line.is_pointed());
        assert!(line.relint_contains(&crate::exact::to_big(&[3, 3])));
        assert_eq!(line.dim(), 1);
    }
}
