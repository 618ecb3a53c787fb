//! Class group, anticanonical self-intersection, Gorenstein index, and the
//! key used to tell classification results apart.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat_to_string, smith_normal_form, IntMat, Rat};
use crate::rap::{assemble_p, kappa_vector, Class, Col, DefiningData, Grading};
use crate::tropfan::maximal_sigma_cones;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvError {
    #[error("free rank {0} is not one")]
    NotRankOne(usize),
    #[error("the anticanonical class has infinite order in a local class group")]
    NotQCartier,
}

/// `(free rank, invariant factors > 1)`.
pub fn class_group(g: &Grading) -> (usize, Vec<BigInt>) {
    (g.free_rank, g.torsion.clone())
}

/// `Z`, `Z+Z/2`, `Z^2+Z/2+Z/4`, …
pub fn class_group_string(free_rank: usize, torsion: &[BigInt]) -> String {
    let mut parts = Vec::new();
    match free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        k => parts.push(format!("Z^{k}")),
    }
    parts.extend(torsion.iter().map(|t| format!("Z/{t}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// `(Π μ_j)(Σ w_i − Σ μ_j)^d / (Π w_i · t)` in free rank one, `d = dim X`.
pub fn antican_cube(dd: &DefiningData, g: &Grading) -> Result<Rat, InvError> {
    if g.free_rank != 1 {
        return Err(InvError::NotRankOne(g.free_rank));
    }
    let w: Vec<BigInt> = g.degrees.iter().map(|c| c.free[0].clone()).collect();
    let mu = vec![g.relation_degree.free[0].clone(); dd.r - 1];
    Ok(weighted_ci_degree(&w, &mu, &g.torsion_order(), dd.s as u32 + 1))
}

pub fn weighted_ci_degree(w: &[BigInt], mu: &[BigInt], t: &BigInt, dim: u32) -> Rat {
    let sw: BigInt = w.iter().sum();
    let smu: BigInt = mu.iter().sum();
    let num: BigInt = mu.iter().product::<BigInt>() * num::pow(sw - smu, dim as usize);
    let den: BigInt = w.iter().product::<BigInt>() * t;
    Rat::new(num, den)
}

/// Order of `x` in `Z^N / (row span of `rows`)`, `None` if infinite.
pub fn order_in_quotient(rows: &[Vec<BigInt>], x: &[BigInt]) -> Option<BigInt> {
    let n = x.len();
    if rows.is_empty() {
        return x.iter().all(Zero::is_zero).then(BigInt::one);
    }
    let mt = IntMat::from_rows(rows).transpose();
    let sf = smith_normal_form(&mt);
    let diag = sf.diagonal();
    let y = sf.u.mul_vec(x);
    let mut ord = BigInt::one();
    for i in 0..n {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !y[i].is_zero() {
                return None;
            }
        } else {
            let o = &di / di.gcd(&y[i]);
            ord = ord.lcm(&o);
        }
    }
    Some(ord)
}

/// Least common multiple, over the maximal cones of `Σ`, of the order of `κ`
/// in the local class group `Z^N / (im P* + ⟨e_j : j ∉ σ⟩)`.
pub fn gorenstein_index(dd: &DefiningData, g: &Grading) -> Result<BigInt, InvError> {
    let cones = maximal_sigma_cones(dd, g);
    gorenstein_index_over(dd, &cones)
}

pub fn gorenstein_index_over(dd: &DefiningData, cones: &[Vec<usize>]) -> Result<BigInt, InvError> {
    let p = assemble_p(dd).expect("valid data");
    let n = dd.ncols();
    let ek = kappa_vector(dd);
    let mut iota = BigInt::one();
    for sigma in cones {
        let mut rows: Vec<Vec<BigInt>> = p.to_rows();
        for j in (0..n).filter(|j| !sigma.contains(j)) {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            rows.push(e);
        }
        let o = order_in_quotient(&rows, &ek).ok_or(InvError::NotQCartier)?;
        iota = iota.lcm(&o);
    }
    Ok(iota)
}

/// The numbers reported per classification row.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantSet {
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub degrees: Vec<Class>,
    #[serde(with = "crate::exact::rat_string")]
    pub antican_cube: Rat,
    pub gorenstein_index: String,
    pub exponents: Vec<Vec<i64>>,
}

pub fn invariant_set(dd: &DefiningData, g: &Grading) -> Result<InvariantSet, InvError> {
    Ok(InvariantSet {
        free_rank: g.free_rank,
        torsion: g.torsion.iter().map(ToString::to_string).collect(),
        degrees: g.degrees.clone(),
        antican_cube: antican_cube(dd, g)?,
        gorenstein_index: gorenstein_index(dd, g)?.to_string(),
        exponents: dd.l.clone(),
    })
}

/// A degree as `(free part, torsion residues)`.
pub type Degree = (Vec<BigInt>, Vec<BigInt>);

/// Canonical comparison key: class group, blocks of `(exponent, degree)`
/// pairs, degrees of the free variables, `(−K)³` and `ι`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistinctnessKey {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub blocks: Vec<Vec<(i64, Degree)>>,
    pub extra: Vec<Degree>,
    pub cube: Rat,
    pub iota: BigInt,
}

impl DistinctnessKey {
    pub fn describe(&self) -> String {
        format!(
            "{} blocks={:?} extra={:?} cube={} iota={}",
            class_group_string(self.free_rank, &self.torsion),
            self.blocks
                .iter()
                .map(|b| b.iter().map(|(l, d)| format!("{l}@{}", fmt_deg(d))).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            self.extra.iter().map(fmt_deg).collect::<Vec<_>>(),
            rat_to_string(&self.cube),
            self.iota
        )
    }
}

fn fmt_deg(d: &Degree) -> String {
    let f: Vec<String> = d.0.iter().map(ToString::to_string).collect();
    let t: Vec<String> = d.1.iter().map(ToString::to_string).collect();
    if t.is_empty() {
        f.join(",")
    } else {
        format!("{}|{}", f.join(","), t.join(","))
    }
}

/// Builds the key from raw parts.
///
/// Torsion coordinates are only defined up to an automorphism of the
/// torsion part `T` plus, in free rank one, a shift `τ ↦ τ + f·c` with
/// `c ∈ T`. The least key over all such changes of coordinates is taken
/// (brute force; `|T|` is small for every input of interest).
pub fn key_from_parts(
    free_rank: usize,
    torsion: Vec<BigInt>,
    blocks: Vec<Vec<(i64, Degree)>>,
    extra: Vec<Degree>,
    cube: Rat,
    iota: BigInt,
) -> DistinctnessKey {
    let make = |blocks: Vec<Vec<(i64, Degree)>>, extra: Vec<Degree>| {
        let mut blocks: Vec<Vec<(i64, Degree)>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort();
                b
            })
            .collect();
        blocks.sort();
        let mut extra = extra;
        extra.sort();
        DistinctnessKey {
            free_rank,
            torsion: torsion.clone(),
            blocks,
            extra,
            cube: cube.clone(),
            iota: iota.clone(),
        }
    };
    let ts: Option<Vec<i64>> = torsion.iter().map(|t| t.to_i64()).collect();
    let order: Option<i64> = ts.as_ref().and_then(|v| v.iter().try_fold(1i64, |a, &t| a.checked_mul(t)));
    let (Some(ts), Some(order)) = (ts, order) else { return make(blocks, extra) };
    if ts.is_empty() || order > MAX_TORSION_ORDER || free_rank > 1 {
        return make(blocks, extra);
    }
    let elems = torsion_elements(&ts);
    let shifts: Vec<Vec<i64>> = if free_rank == 1 { elems.clone() } else { vec![vec![0; ts.len()]] };
    let mut best: Option<DistinctnessKey> = None;
    for a in torsion_automorphisms(&ts, &elems) {
        for c in &shifts {
            let tr = |d: &Degree| -> Degree {
                let f = d.0.first().map_or(0, |x| x.to_i64().expect("small degree"));
                let tau: Vec<i64> = d.1.iter().map(|x| x.to_i64().expect("small residue")).collect();
                let img: Vec<BigInt> = (0..ts.len())
                    .map(|k| {
                        let v = (0..ts.len()).map(|i| a[i][k] * tau[i]).sum::<i64>() + f * c[k];
                        BigInt::from(v.rem_euclid(ts[k]))
                    })
                    .collect();
                (d.0.clone(), img)
            };
            let nb = blocks.iter().map(|b| b.iter().map(|(l, d)| (*l, tr(d))).collect()).collect();
            let ne = extra.iter().map(tr).collect();
            let k = make(nb, ne);
            if best.as_ref().map_or(true, |b| k < *b) {
                best = Some(k);
            }
        }
    }
    best.expect("the identity is an automorphism")
}

/// Torsion parts beyond this order are keyed without normalization.
pub const MAX_TORSION_ORDER: i64 = 1024;

fn torsion_elements(ts: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &t in ts {
        out = out.into_iter().flat_map(|v| (0..t).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Automorphisms of `⊕ Z/tᵢ` as the images `a[i]` of the basis vectors.
fn torsion_automorphisms(ts: &[i64], elems: &[Vec<i64>]) -> Vec<Vec<Vec<i64>>> {
    let images: Vec<Vec<&Vec<i64>>> = ts
        .iter()
        .map(|&t| elems.iter().filter(|x| x.iter().zip(ts).all(|(xi, tk)| (xi * t) % tk == 0)).collect())
        .collect();
    let mut maps: Vec<Vec<Vec<i64>>> = vec![vec![]];
    for imgs in &images {
        maps = maps
            .into_iter()
            .flat_map(|m| imgs.iter().map(move |x| [m.clone(), vec![(*x).clone()]].concat()))
            .collect();
    }
    maps.into_iter()
        .filter(|a| {
            let mut seen = BTreeSet::new();
            elems.iter().all(|e| {
                let img: Vec<i64> = (0..ts.len())
                    .map(|k| (0..ts.len()).map(|i| a[i][k] * e[i]).sum::<i64>().rem_euclid(ts[k]))
                    .collect();
                seen.insert(img)
            })
        })
        .collect()
}

pub fn distinctness_key(dd: &DefiningData, g: &Grading) -> Result<DistinctnessKey, InvError> {
    let cube = antican_cube(dd, g)?;
    let iota = gorenstein_index(dd, g)?;
    Ok(distinctness_key_with(dd, g, cube, iota))
}

pub fn distinctness_key_with(dd: &DefiningData, g: &Grading, cube: Rat, iota: BigInt) -> DistinctnessKey {
    let deg = |c: Col| -> Degree {
        let d = &g.degrees[dd.col_index(c)];
        (d.free.clone(), d.torsion.clone())
    };
    let blocks = (0..=dd.r)
        .map(|i| (0..dd.n[i]).map(|j| (dd.l[i][j], deg(Col::T(i, j)))).collect())
        .collect();
    let extra = (0..dd.m).map(|k| deg(Col::S(k))).collect();
    key_from_parts(g.free_rank, g.torsion.clone(), blocks, extra, cube, iota)
}

/// Free rank one with every generator degree positive.
pub fn is_positive_grading(g: &Grading) -> bool {
    g.free_rank == 1 && g.degrees.iter().all(|c| c.free[0].is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, to_big};
    use crate::rap::tests::{quadric, quadric_listed, random_op};
    use crate::rap::{admissible_ops, grading};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadric_invariants() {
        let dd = quadric();
        let g = grading(&dd).unwrap();
        assert_eq!(class_group(&g), (1, vec![]));
        assert_eq!(antican_cube(&dd, &g).unwrap(), rat(54, 1));
        assert_eq!(gorenstein_index(&dd, &g).unwrap(), int(1));
        let gl = grading(&quadric_listed()).unwrap();
        assert_eq!(class_group_string(gl.free_rank, &gl.torsion), "Z+Z/2");
        assert_eq!(antican_cube(&quadric_listed(), &gl).unwrap(), rat(27, 1));
    }

    #[test]
    fn cube_formula_rows() {
        let one = int(1);
        assert_eq!(weighted_ci_degree(&to_big(&[1, 1, 1, 1, 1]), &to_big(&[2]), &one, 3), rat(54, 1));
        assert_eq!(weighted_ci_degree(&to_big(&[1, 5, 2, 4, 3]), &to_big(&[6]), &one, 3), rat(729, 20));
        assert_eq!(weighted_ci_degree(&to_big(&[1, 1, 1, 1, 1, 1]), &to_big(&[2, 2]), &int(2), 3), rat(16, 1));
    }

    #[test]
    fn quotient_orders() {
        // Z^2 / <(2,0),(0,3)>: (1,1) has order 6
        assert_eq!(order_in_quotient(&[to_big(&[2, 0]), to_big(&[0, 3])], &to_big(&[1, 1])), Some(int(6)));
        assert_eq!(order_in_quotient(&[to_big(&[2, 0])], &to_big(&[0, 1])), None);
    }

    #[test]
    fn key_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for dd in [quadric(), quadric_listed()] {
            let g = grading(&dd).unwrap();
            let k0 = distinctness_key(&dd, &g).unwrap();
            for _ in 0..40 {
                let mut cur = dd.clone();
                for _ in 0..4 {
                    cur = admissible_ops(&cur, &random_op(&mut rng, &cur)).unwrap();
                }
                let gc = grading(&cur).unwrap();
                assert_eq!(distinctness_key(&cur, &gc).unwrap(), k0);
            }
        }
    }
}
