//! The anticanonical polyhedron and complex, singularity verdicts from
//! lattice points, and discrepancies along rays.
//!
//! Charts: the lineality space `λ = 0 × Q^s` is charted by its last `s`
//! coordinates; leaf `τ_i` by `(x, y) ↦ x·e_i + (0, y)` with `x ≥ 0`, where
//! `e_0 = −e_1 − … − e_r`. Every `e_i` is primitive, so a chart point is
//! integral iff its image in `Z^{r+s}` is.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exact::{rat_int, rat_to_string, solve_rat, to_rat, Rat};
use crate::polyhedra::{dual_polytope, from_halfspaces, hull, scale, Halfspace, PolyError, Polytope};
use crate::rap::{assemble_p, is_fano_graded, Col, DefiningData, Grading};
use crate::tropfan::{elementary_big_cones, locate_point, ElemBigCone};

#[derive(Debug, Error, Clone)]
pub enum AcError {
    #[error("the input is not Fano")]
    NotFano,
    #[error("not log terminal: elementary big cone {:?} has ell = {}", .0.cols, .0.ell)]
    NotLogTerminal(Box<ElemBigCone>),
    #[error("the ray does not lie on the tropical variety")]
    RayNotOnTrop,
    #[error("the complex is unbounded along the ray")]
    UnboundedDirection,
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("polyhedral failure: {0}")]
    Poly(#[from] PolyError),
}

/// Where a vertex of the complex comes from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Source {
    /// A column `v_ρ` (index into `P`).
    Column(usize),
    /// `v′_σ` of the elementary big cone with these columns.
    BigCone(Vec<usize>),
}

/// The anticanonical complex in chart coordinates.
#[derive(Clone, Debug)]
pub struct ACComplex {
    pub r: usize,
    pub s: usize,
    /// `A⁰ ⊂ Q^s`.
    pub lineality: Polytope,
    /// `A^i ⊂ Q^{1+s}`, `i = 0..r`.
    pub leaves: Vec<Polytope>,
    /// Sources of the vertices of `A⁰`, aligned with `lineality.vertices`.
    pub lineality_sources: Vec<Vec<Source>>,
    /// Sources of the vertices of each leaf polytope.
    pub leaf_sources: Vec<Vec<Vec<Source>>>,
    pub big_cones: Vec<ElemBigCone>,
}

/// Ambient point of a leaf chart point.
pub fn leaf_to_ambient(r: usize, leaf: usize, x: &Rat, y: &[Rat]) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); r];
    if leaf == 0 {
        v.iter_mut().for_each(|c| *c = -x.clone());
    } else {
        v[leaf - 1] = x.clone();
    }
    v.extend_from_slice(y);
    v
}

/// Chart coordinates `(leaf, x, y)` of an ambient point of `trop(X)`; points of
/// `λ` are reported with `leaf = None`, `x = 0`.
pub fn ambient_to_chart(r: usize, v: &[Rat]) -> Option<(Option<usize>, Rat, Vec<Rat>)> {
    let leaf = locate_point(r, v)?;
    let x = match leaf {
        None => Rat::zero(),
        Some(0) => -v[0].clone(),
        Some(i) => v[i - 1].clone(),
    };
    Some((leaf, x, v[r..].to_vec()))
}

fn column_chart(dd: &DefiningData, p: &crate::exact::IntMat, j: usize) -> (Option<usize>, Vec<Rat>) {
    let c = dd.columns()[j];
    let y: Vec<Rat> = (dd.r..dd.r + dd.s).map(|k| rat_int(&p[(k, j)])).collect();
    match c {
        Col::T(i, _) => {
            let mut pt = vec![Rat::from_integer(BigInt::from(dd.exponent(c)))];
            pt.extend(y);
            (Some(i), pt)
        }
        Col::S(_) => (None, y),
    }
}

/// The complex from the vertex description: `A⁰` is spanned by the `v′_σ`
/// and the columns in `λ`; `A^i` by those together with the columns in `τ_i`.
pub fn build_complex(dd: &DefiningData, g: &Grading) -> Result<ACComplex, AcError> {
    if !is_fano_graded(g) {
        return Err(AcError::NotFano);
    }
    let cones = elementary_big_cones(dd, g);
    if let Some(bad) = cones.iter().find(|c| !c.ell.is_positive()) {
        return Err(AcError::NotLogTerminal(Box::new(bad.clone())));
    }
    let p = assemble_p(dd).expect("valid data");
    let (r, s) = (dd.r, dd.s);
    let mut base: Vec<(Vec<Rat>, Source)> = cones
        .iter()
        .map(|c| (c.v_prime.as_ref().unwrap()[r..].to_vec(), Source::BigCone(c.cols.clone())))
        .collect();
    let mut per_leaf: Vec<Vec<(Vec<Rat>, Source)>> = vec![Vec::new(); r + 1];
    for j in 0..dd.ncols() {
        match column_chart(dd, &p, j) {
            (None, y) => base.push((y, Source::Column(j))),
            (Some(i), pt) => per_leaf[i].push((pt, Source::Column(j))),
        }
    }
    let lin_pts: Vec<Vec<Rat>> = base.iter().map(|(y, _)| y.clone()).collect();
    let lineality = hull(&lin_pts);
    let lineality_sources = sources_for(&lineality, &base);
    let mut leaves = Vec::new();
    let mut leaf_sources = Vec::new();
    for own in per_leaf.into_iter() {
        let mut tagged: Vec<(Vec<Rat>, Source)> = base
            .iter()
            .map(|(y, src)| {
                let mut pt = vec![Rat::zero()];
                pt.extend(y.iter().cloned());
                (pt, src.clone())
            })
            .collect();
        tagged.extend(own);
        let pts: Vec<Vec<Rat>> = tagged.iter().map(|(x, _)| x.clone()).collect();
        let poly = hull(&pts);
        leaf_sources.push(sources_for(&poly, &tagged));
        leaves.push(poly);
    }
    Ok(ACComplex { r, s, lineality, leaves, lineality_sources, leaf_sources, big_cones: cones })
}

fn sources_for(poly: &Polytope, tagged: &[(Vec<Rat>, Source)]) -> Vec<Vec<Source>> {
    poly.vertices
        .iter()
        .map(|v| {
            let mut s: Vec<Source> = tagged.iter().filter(|(p, _)| p == v).map(|(_, s)| s.clone()).collect();
            s.sort();
            s.dedup();
            s
        })
        .collect()
}

/// `B(−K_X) = {x ≥ 0 : Q(x) = κ}` over `K ⊗ Q`, by its vertices.
fn degree_fiber_vertices(dd: &DefiningData, g: &Grading) -> Result<Vec<Vec<Rat>>, AcError> {
    let n = dd.ncols();
    if g.free_rank == 1 {
        let k = rat_int(&g.kappa.free[0]);
        return Ok((0..n)
            .map(|j| {
                let mut v = vec![Rat::zero(); n];
                v[j] = &k / rat_int(&g.degrees[j].free[0]);
                v
            })
            .collect());
    }
    let mut hs: Vec<Halfspace> = (0..n)
        .map(|j| {
            let mut a = vec![Rat::zero(); n];
            a[j] = Rat::one();
            Halfspace { normal: a, offset: Rat::zero() }
        })
        .collect();
    for t in 0..g.free_rank {
        let row: Vec<Rat> = g.degrees.iter().map(|c| rat_int(&c.free[t])).collect();
        let b = rat_int(&g.kappa.free[t]);
        hs.push(Halfspace { normal: row.clone(), offset: b.clone() });
        hs.push(Halfspace { normal: row.iter().map(|x| -x).collect(), offset: -b });
    }
    Ok(from_halfspaces(&hs, n)?.vertices)
}

/// `B_X = (P*)^{-1}(B(−K_X) + B − e_Σ)`, with `B` the sum of the Newton
/// triangles of the relations.
pub fn b_x(dd: &DefiningData, g: &Grading) -> Result<Polytope, AcError> {
    if !is_fano_graded(g) {
        return Err(AcError::NotFano);
    }
    let n = dd.ncols();
    let p = assemble_p(dd).expect("valid data");
    let pt: Vec<Vec<Rat>> = (0..n).map(|j| to_rat(&p.col(j))).collect();
    let mono = |i: usize| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n];
        for j in 0..dd.n[i] {
            v[dd.col_index(Col::T(i, j))] = Rat::from_integer(BigInt::from(dd.l[i][j]));
        }
        v
    };
    // Minkowski sum over the relations g_i = g_{i,i+1,i+2}.
    let mut sums: Vec<Vec<Rat>> = vec![vec![-Rat::one(); n]];
    for i in 0..dd.r.saturating_sub(1) {
        let tri = [mono(i), mono(i + 1), mono(i + 2)];
        sums = sums
            .iter()
            .flat_map(|a| tri.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<Rat>>()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
    }
    let fiber = degree_fiber_vertices(dd, g)?;
    let mut pts = Vec::new();
    for f in &fiber {
        for b in &sums {
            let x: Vec<Rat> = f.iter().zip(b).map(|(a, c)| a + c).collect();
            let u = solve_rat(&pt, &x).expect("degree-zero vector lies in the image of P*");
            pts.push(u);
        }
    }
    Ok(hull(&pts))
}

/// `A_X` as the dual of `B_X` (the long way round).
pub fn anticanonical_polyhedron(dd: &DefiningData, g: &Grading) -> Result<Polytope, AcError> {
    Ok(dual_polytope(&b_x(dd, g)?)?)
}

/// `A_X ⊓ trop(X)` from the H-description `⟨u, b⟩ ≥ −1` (`b` running over the
/// vertices of `B_X`), sliced chart by chart. Fails when a slice is unbounded.
pub fn oracle_complex(dd: &DefiningData, g: &Grading) -> Result<ACComplex, AcError> {
    let bx = b_x(dd, g)?;
    let (r, s) = (dd.r, dd.s);
    let lin_hs: Vec<Halfspace> = bx
        .vertices
        .iter()
        .map(|b| Halfspace { normal: b[r..].to_vec(), offset: -Rat::one() })
        .collect();
    let lineality = from_halfspaces(&lin_hs, s)?;
    let mut leaves = Vec::new();
    for i in 0..=r {
        let mut hs: Vec<Halfspace> = bx
            .vertices
            .iter()
            .map(|b| {
                let ex = if i == 0 { -b[..r].iter().sum::<Rat>() } else { b[i - 1].clone() };
                let mut normal = vec![ex];
                normal.extend_from_slice(&b[r..]);
                Halfspace { normal, offset: -Rat::one() }
            })
            .collect();
        let mut xpos = vec![Rat::zero(); 1 + s];
        xpos[0] = Rat::one();
        hs.push(Halfspace { normal: xpos, offset: Rat::zero() });
        leaves.push(from_halfspaces(&hs, 1 + s)?);
    }
    let nl = lineality.vertices.len();
    let leaf_sources = leaves.iter().map(|l| vec![Vec::new(); l.vertices.len()]).collect();
    Ok(ACComplex {
        r,
        s,
        lineality,
        leaves,
        lineality_sources: vec![Vec::new(); nl],
        leaf_sources,
        big_cones: Vec::new(),
    })
}

impl ACComplex {
    /// Same vertex sets chart by chart.
    pub fn same_vertices(&self, other: &ACComplex) -> bool {
        self.lineality.vertices == other.lineality.vertices
            && self.leaves.len() == other.leaves.len()
            && self.leaves.iter().zip(&other.leaves).all(|(a, b)| a.vertices == b.vertices)
    }

    /// All lattice points of the complex in ambient coordinates (deduplicated, sorted).
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.points_of(|p| p.lattice_points())
    }

    /// Lattice points part by part, in ambient coordinates: `A⁰` first, then
    /// each leaf (its `x = 0` face included).
    pub fn lattice_points_by_part(&self) -> Vec<Vec<Vec<i64>>> {
        let mut parts = vec![self
            .lineality
            .lattice_points()
            .into_iter()
            .map(|y| {
                let mut v = vec![0; self.r];
                v.extend(y);
                v
            })
            .collect()];
        for (i, leaf) in self.leaves.iter().enumerate() {
            parts.push(leaf.lattice_points().iter().map(|pt| ambient_int(self.r, i, pt)).collect());
        }
        parts
    }

    /// Lattice points in the relative interior with respect to `trop(X)`:
    /// interior points of `A⁰` and points of leaf interiors with `x > 0`.
    pub fn relint_lattice_points(&self) -> Vec<Vec<i64>> {
        self.points_of(|p| p.relative_interior_lattice_points())
    }

    fn points_of(&self, f: impl Fn(&Polytope) -> Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
        for y in f(&self.lineality) {
            let mut v = vec![0; self.r];
            v.extend(y);
            out.insert(v);
        }
        for (i, leaf) in self.leaves.iter().enumerate() {
            for pt in f(leaf) {
                if pt[0] == 0 {
                    // x = 0 points are points of A⁰ (and never leaf-interior)
                    continue;
                }
                out.insert(ambient_int(self.r, i, &pt));
            }
        }
        out.into_iter().collect()
    }

    /// The complex scaled by `ε`.
    pub fn scaled(&self, eps: &Rat) -> ACComplex {
        ACComplex {
            r: self.r,
            s: self.s,
            lineality: scale(&self.lineality, eps),
            leaves: self.leaves.iter().map(|l| scale(l, eps)).collect(),
            lineality_sources: self.lineality_sources.clone(),
            leaf_sources: self.leaf_sources.clone(),
            big_cones: self.big_cones.clone(),
        }
    }

    /// Membership of an ambient point in the support.
    pub fn contains(&self, v: &[Rat]) -> bool {
        match ambient_to_chart(self.r, v) {
            None => false,
            Some((None, _, y)) => self.lineality.contains(&y),
            Some((Some(i), x, y)) => {
                let mut pt = vec![x];
                pt.extend(y);
                self.leaves[i].contains(&pt)
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.leaves.iter().map(Polytope::dim).chain([self.lineality.dim()]).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let pts = |p: &Polytope| -> Value {
            Value::Array(p.vertices.iter().map(|v| json!(v.iter().map(rat_to_string).collect::<Vec<_>>())).collect())
        };
        json!({
            "lineality": { "vertices": pts(&self.lineality), "sources": self.lineality_sources },
            "leaves": self.leaves.iter().zip(&self.leaf_sources).map(|(l, s)| json!({
                "vertices": pts(l), "sources": s
            })).collect::<Vec<_>>(),
            "big_cones": self.big_cones,
        })
    }
}

fn ambient_int(r: usize, leaf: usize, pt: &[i64]) -> Vec<i64> {
    let mut v = vec![0; r];
    if leaf == 0 {
        v.iter_mut().for_each(|c| *c = -pt[0]);
    } else {
        v[leaf - 1] = pt[0];
    }
    v.extend_from_slice(&pt[1..]);
    v
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An elementary big cone with `ℓ_σ ≤ 0` (the complex is unbounded along it).
    Cone { cols: Vec<usize>, l: Vec<i64>, ell: String },
    /// A lattice point violating the criterion named by `flag`.
    Point { flag: String, point: Vec<i64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityVerdict {
    pub log_terminal: bool,
    /// `(ε, verdict)` when an `ε` was supplied.
    pub eps_log_terminal: Option<(String, bool)>,
    pub canonical: bool,
    pub terminal: bool,
    pub witnesses: Vec<Witness>,
}

/// Singularity verdicts from the lattice points of the complex.
pub fn classify(dd: &DefiningData, g: &Grading, eps: Option<&Rat>) -> Result<SingularityVerdict, AcError> {
    match build_complex(dd, g) {
        Err(AcError::NotLogTerminal(c)) => Ok(SingularityVerdict {
            log_terminal: false,
            eps_log_terminal: eps.map(|e| (rat_to_string(e), false)),
            canonical: false,
            terminal: false,
            witnesses: vec![Witness::Cone { cols: c.cols.clone(), l: c.l.clone(), ell: c.ell.to_string() }],
        }),
        Err(e) => Err(e),
        Ok(cx) => Ok(verdict_from_complex(dd, &cx, eps)),
    }
}

pub fn columns_ambient(dd: &DefiningData) -> BTreeSet<Vec<i64>> {
    let p = assemble_p(dd).expect("valid data");
    (0..p.cols).map(|j| p.col(j).iter().map(|x| x.to_i64().expect("small entries")).collect()).collect()
}

pub fn verdict_from_complex(dd: &DefiningData, cx: &ACComplex, eps: Option<&Rat>) -> SingularityVerdict {
    let cols = columns_ambient(dd);
    let zero = vec![0i64; dd.r + dd.s];
    let mut witnesses = Vec::new();
    let bad_terminal: Vec<Vec<i64>> =
        cx.lattice_points().into_iter().filter(|p| *p != zero && !cols.contains(p)).collect();
    let bad_canonical: Vec<Vec<i64>> = cx.relint_lattice_points().into_iter().filter(|p| *p != zero).collect();
    for p in &bad_terminal {
        witnesses.push(Witness::Point { flag: "terminal".into(), point: p.clone() });
    }
    for p in &bad_canonical {
        witnesses.push(Witness::Point { flag: "canonical".into(), point: p.clone() });
    }
    let eps_verdict = eps.map(|e| {
        let bad: Vec<Vec<i64>> = cx.scaled(e).lattice_points().into_iter().filter(|p| *p != zero).collect();
        for p in &bad {
            witnesses.push(Witness::Point { flag: "eps_log_terminal".into(), point: p.clone() });
        }
        (rat_to_string(e), bad.is_empty())
    });
    SingularityVerdict {
        log_terminal: true,
        eps_log_terminal: eps_verdict,
        canonical: bad_canonical.is_empty(),
        terminal: bad_terminal.is_empty(),
        witnesses,
    }
}

/// `1/t − 1` where `t·v` is the point at which the ray through `v` leaves the complex.
pub fn discrepancy_ray(dd: &DefiningData, g: &Grading, ray: &[BigInt]) -> Result<Rat, AcError> {
    let v: Vec<Rat> = to_rat(ray);
    let (leaf, x, y) = ambient_to_chart(dd.r, &v).ok_or(AcError::RayNotOnTrop)?;
    let cx = match build_complex(dd, g) {
        Err(AcError::NotLogTerminal(_)) => return Err(AcError::UnboundedDirection),
        other => other?,
    };
    let (poly, dir) = match leaf {
        None => (&cx.lineality, y),
        Some(i) => {
            let mut d = vec![x];
            d.extend(y);
            (&cx.leaves[i], d)
        }
    };
    exit_parameter(poly, &dir).map(|t| t.recip() - Rat::one()).ok_or(AcError::UnboundedDirection)
}

/// Largest `t` with `t·dir` in the polytope (which contains 0).
pub fn exit_parameter(poly: &Polytope, dir: &[Rat]) -> Option<Rat> {
    poly.halfspaces
        .iter()
        .filter_map(|h| {
            let a = crate::exact::dot_rat(&h.normal, dir);
            a.is_negative().then(|| &h.offset / a)
        })
        .min()
}

/// The closed-form trapezoid `A⁰` for `r = 2`, `n = (2,2,1)`, `m = 0`,
/// `l₀ = (1,1)` with `d`-block columns `(0,0)`, `(1,0)` on block 0; also
/// `(|g₁|, h(g₁), |g₂|, h(g₂))`.
pub fn lineality_trapezoid(dd: &DefiningData) -> Result<(Polytope, [Rat; 4]), AcError> {
    let shape_ok = dd.r == 2
        && dd.s == 2
        && dd.m == 0
        && dd.n == [2, 2, 1]
        && dd.l[0] == [1, 1]
        && dd.d[0][..2] == [0, 1]
        && dd.d[1][..2] == [0, 0];
    if !shape_ok {
        return Err(AcError::WrongShape("expected r=2, n=(2,2,1), m=0, l0=(1,1) in normal shape".into()));
    }
    let q = |x: i64| Rat::from_integer(BigInt::from(x));
    let (l11, l12, l21) = (dd.l[1][0], dd.l[1][1], dd.l[2][0]);
    let (d111, d112, d121) = (dd.d[0][2], dd.d[0][3], dd.d[0][4]);
    let (d211, d212, d221) = (dd.d[1][2], dd.d[1][3], dd.d[1][4]);
    let w11 = -l21 * d212 - l12 * d221;
    let w12 = l21 * d211 + l11 * d221;
    let s1 = q(l11 + l21);
    let s2 = q(l12 + l21);
    let u1 = vec![q(l21 * d111 + l11 * d121) / &s1, q(l21 * d211 + l11 * d221) / &s1];
    let u2 = vec![q(l11 * l21 + l21 * d111 + l11 * d121) / &s1, u1[1].clone()];
    let u3 = vec![q(l21 * d112 + l12 * d121) / &s2, q(l21 * d212 + l12 * d221) / &s2];
    let u4 = vec![q(l12 * l21 + l21 * d112 + l12 * d121) / &s2, u3[1].clone()];
    let stats = [q(l11 * l21) / &s1, q(w12) / &s1, q(l12 * l21) / &s2, -q(w11) / &s2];
    Ok((hull(&[u1, u2, u3, u4]), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, to_big};
    use crate::rap::grading;
    use crate::rap::tests::{e6, quadric, quadric_listed};
    use crate::tropfan::tests::triple_three;

    fn rv(v: &[(i64, i64)]) -> Vec<Rat> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn e6_polyhedron() {
        let dd = e6();
        let g = grading(&dd).unwrap();
        let ax = anticanonical_polyhedron(&dd, &g).unwrap();
        let mut want = vec![
            rv(&[(-3, 1), (-3, 1), (-2, 1)]),
            rv(&[(-1, 1), (-1, 1), (-1, 1)]),
            rv(&[(3, 1), (0, 1), (1, 1)]),
            rv(&[(0, 1), (2, 1), (1, 1)]),
            rv(&[(0, 1), (0, 1), (1, 1)]),
            rv(&[(0, 1), (0, 1), (-1, 5)]),
        ];
        want.sort();
        assert_eq!(ax.vertices, want);
        let cx = build_complex(&dd, &g).unwrap();
        assert_eq!(cx.dimension(), 2);
        assert!(cx.same_vertices(&oracle_complex(&dd, &g).unwrap()));
        assert_eq!(cx.lineality.vertices, vec![vec![rat(-1, 5)], vec![rat(1, 1)]]);
    }

    #[test]
    fn quadric_complex() {
        for dd in [quadric(), quadric_listed()] {
            let g = grading(&dd).unwrap();
            let cx = build_complex(&dd, &g).unwrap();
            assert_eq!(cx.lineality.vertices.len(), 4);
            assert!(cx.lineality.relint_contains(&[Rat::zero(), Rat::zero()]));
            for leaf in &cx.leaves {
                assert!(leaf.contains(&[Rat::zero(), Rat::zero(), Rat::zero()]));
            }
            assert!(cx.same_vertices(&oracle_complex(&dd, &g).unwrap()));
        }
        let dd = quadric_listed();
        let cx = build_complex(&dd, &grading(&dd).unwrap()).unwrap();
        assert!(cx.lineality.vertices.contains(&vec![rat(-1, 3), rat(2, 3)]));
    }

    #[test]
    fn quadric_verdicts() {
        let dd = quadric();
        let g = grading(&dd).unwrap();
        let v = classify(&dd, &g, Some(&rat(1, 2))).unwrap();
        assert!(v.terminal && v.canonical && v.log_terminal);
        assert_eq!(v.eps_log_terminal, Some(("1/2".into(), true)));
        // columns are lattice points of A^c, so ε = 1 fails
        let v1 = classify(&dd, &g, Some(&rat(1, 1))).unwrap();
        assert_eq!(v1.eps_log_terminal.as_ref().unwrap().1, false);
        assert!(v1.terminal);
    }

    #[test]
    fn not_log_terminal() {
        let dd = triple_three();
        let g = grading(&dd).unwrap();
        assert!(matches!(build_complex(&dd, &g), Err(AcError::NotLogTerminal(_))));
        let v = classify(&dd, &g, None).unwrap();
        assert!(!v.log_terminal && !v.terminal);
        assert!(matches!(v.witnesses[0], Witness::Cone { .. }));
    }

    #[test]
    fn columns_are_vertices() {
        for dd in [quadric(), e6()] {
            let g = grading(&dd).unwrap();
            let ax = anticanonical_polyhedron(&dd, &g).unwrap();
            let p = assemble_p(&dd).unwrap();
            for j in 0..p.cols {
                assert!(ax.vertices.contains(&to_rat(&p.col(j))));
            }
        }
    }

    #[test]
    fn discrepancies() {
        let dd = quadric_listed();
        let g = grading(&dd).unwrap();
        assert_eq!(discrepancy_ray(&dd, &g, &to_big(&[0, 0, -1, 2])).unwrap(), rat(2, 1));
        let p = assemble_p(&dd).unwrap();
        assert_eq!(discrepancy_ray(&dd, &g, &p.col(0)).unwrap(), Rat::zero());
        assert!(matches!(discrepancy_ray(&dd, &g, &to_big(&[1, 1, 0, 0])), Err(AcError::RayNotOnTrop)));
        for c in elementary_big_cones(&dd, &g) {
            let prim: Vec<BigInt> = c.v.iter().map(|x| x / &c.c).collect();
            assert_eq!(discrepancy_ray(&dd, &g, &prim).unwrap(), c.discrepancy());
        }
        assert!(elementary_big_cones(&dd, &g).iter().all(|c| c.c == int(1)));
    }

    #[test]
    fn trapezoid_matches_complex() {
        let dd = quadric_listed();
        let (t, stats) = lineality_trapezoid(&dd).unwrap();
        let g = grading(&dd).unwrap();
        assert_eq!(t.vertices, build_complex(&dd, &g).unwrap().lineality.vertices);
        assert_eq!(stats[0], rat(2, 3));
        assert!(matches!(lineality_trapezoid(&e6()), Err(AcError::WrongShape(_))));
    }

    #[test]
    fn chart_integrality() {
        // e_0 = (−1, …, −1) is primitive: x integral iff the ambient point is
        for x in -3..4 {
            let a = leaf_to_ambient(2, 0, &rat(x, 2), &[rat(1, 1)]);
            assert_eq!(a.iter().all(|q| q.is_integer()), x % 2 == 0);
        }
    }
}
