//! The tropical variety of a complexity-one variety, membership of cones in
//! its fan `Σ`, and the ℓ-data of elementary big cones.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exact::{gcd_vector, rat_int, rat_to_string, IntMat, Rat};
use crate::polyhedra::Cone;
use crate::rap::{assemble_p, Col, DefiningData, Grading};

/// `trop(X) = τ₀ ∪ … ∪ τ_r` with `τ_i = cone(e_i) + λ`, `λ = 0 × Q^s`.
#[derive(Clone, Debug)]
pub struct TropStructure {
    pub r: usize,
    pub s: usize,
    pub leaves: Vec<Cone>,
}

impl TropStructure {
    pub fn new(r: usize, s: usize) -> Self {
        let dim = r + s;
        let unit = |k: usize, sign: i64| {
            let mut v = vec![BigInt::zero(); dim];
            v[k] = BigInt::from(sign);
            v
        };
        let lineality: Vec<Vec<BigInt>> =
            (0..s).flat_map(|k| [unit(r + k, 1), unit(r + k, -1)]).collect();
        let leaves = (0..=r)
            .map(|i| {
                let e = if i == 0 {
                    let mut v = vec![BigInt::zero(); dim];
                    v[..r].iter_mut().for_each(|x| *x = -BigInt::one());
                    v
                } else {
                    unit(i - 1, 1)
                };
                let mut gens = lineality.clone();
                gens.push(e);
                Cone::new(&gens, dim)
            })
            .collect();
        TropStructure { r, s, leaves }
    }

    /// `Some(None)` for points of `λ`, `Some(Some(i))` for points of `τ_i ∖ λ`,
    /// `None` off the tropical variety.
    pub fn locate(&self, v: &[Rat]) -> Option<Option<usize>> {
        locate_point(self.r, v)
    }
}

pub fn locate_point(r: usize, v: &[Rat]) -> Option<Option<usize>> {
    let top = &v[..r];
    if top.iter().all(Zero::is_zero) {
        return Some(None);
    }
    if top.iter().all(|x| x.is_negative()) && top.iter().all(|x| *x == top[0]) {
        return Some(Some(0));
    }
    let nz: Vec<usize> = (0..r).filter(|&k| !top[k].is_zero()).collect();
    (nz.len() == 1 && top[nz[0]].is_positive()).then_some(Some(nz[0] + 1))
}

/// The leaves met by the relative interior of `cone(rays)` decide whether it
/// meets `trop(X)`: a positive combination projects to `Σ b_i e_i` with
/// `b_i > 0` exactly on the hit leaves, which lies on a single `cone(e_i)`
/// iff at most one leaf is hit, and can be made zero iff all leaves are hit.
pub fn meets_trop(dd: &DefiningData, rays: &[usize]) -> bool {
    let hit = leaves_hit(dd, rays);
    hit.len() <= 1 || hit.len() == dd.r + 1
}

pub fn leaves_hit(dd: &DefiningData, rays: &[usize]) -> BTreeSet<usize> {
    let cols = dd.columns();
    rays.iter().filter_map(|&c| dd.leaf(cols[c])).collect()
}

/// `κ ∈ relint(cone(Q(e_j); j ∈ γ₀))` over `K ⊗ Q`.
pub fn semistable(g: &Grading, gamma0: &[usize]) -> bool {
    let k = g.free_rank;
    if gamma0.is_empty() {
        return g.kappa.free.iter().all(Zero::is_zero);
    }
    if k == 1 {
        // Rank one: the cone is a ray or a line or the origin.
        let signs: BTreeSet<i32> = gamma0
            .iter()
            .map(|&j| match &g.degrees[j].free[0] {
                x if x.is_positive() => 1,
                x if x.is_negative() => -1,
                _ => 0,
            })
            .collect();
        let kap = &g.kappa.free[0];
        let has_pos = signs.contains(&1);
        let has_neg = signs.contains(&-1);
        return match (has_pos, has_neg) {
            (true, true) => true,
            (true, false) => kap.is_positive(),
            (false, true) => kap.is_negative(),
            (false, false) => kap.is_zero(),
        };
    }
    let gens: Vec<Vec<BigInt>> = gamma0.iter().map(|&j| g.degrees[j].free.clone()).collect();
    Cone::new(&gens, k).relint_contains(&g.kappa.free)
}

/// Whether the cone over the given columns belongs to `Σ`: the complementary
/// face is semistable and the relative interior meets `trop(X)`.
pub fn cone_in_sigma(dd: &DefiningData, g: &Grading, rays: &[usize]) -> bool {
    let set: BTreeSet<usize> = rays.iter().copied().collect();
    let gamma0: Vec<usize> = (0..dd.ncols()).filter(|j| !set.contains(j)).collect();
    semistable(g, &gamma0) && meets_trop(dd, rays)
}

/// An elementary big cone and its ℓ-data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElemBigCone {
    /// Column index (into `P`) chosen in each leaf, leaf order.
    pub cols: Vec<usize>,
    pub l: Vec<i64>,
    pub ell_rho: Vec<BigInt>,
    pub ell: BigInt,
    pub v: Vec<BigInt>,
    pub c: BigInt,
    #[serde(serialize_with = "ser_opt_rat_vec")]
    pub v_prime: Option<Vec<Rat>>,
}

fn ser_opt_rat_vec<S: serde::Serializer>(v: &Option<Vec<Rat>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_seq(x.iter().map(rat_to_string)),
        None => s.serialize_none(),
    }
}

impl ElemBigCone {
    /// Discrepancy along `ρ_σ`: `−1 + ℓ_σ / c_σ`.
    pub fn discrepancy(&self) -> Rat {
        assert!(!self.c.is_zero(), "c_sigma is zero");
        Rat::new(self.ell.clone(), self.c.clone()) - Rat::one()
    }

    /// `Σ 1/l_ρ > r − 1 + c_σ Π 1/l_ρ`, necessary for terminality.
    pub fn terminal_inequality(&self) -> bool {
        let r = self.l.len() as i64 - 1;
        let prod: BigInt = self.l.iter().map(|&x| BigInt::from(x)).product();
        let lhs: Rat = self.l.iter().map(|&x| Rat::new(BigInt::one(), BigInt::from(x))).sum();
        lhs > Rat::from_integer(BigInt::from(r - 1)) + Rat::new(self.c.clone(), prod)
    }
}

/// `Σ_ρ Π_{ρ′≠ρ} l_{ρ′} − (r−1) Π l_ρ` for the exponents of `r+1` rays.
pub fn ell_sigma(ls: &[i64]) -> BigInt {
    let prod: BigInt = ls.iter().map(|&x| BigInt::from(x)).product();
    let sum: BigInt = ls.iter().map(|&x| &prod / BigInt::from(x)).sum();
    sum - BigInt::from(ls.len() as i64 - 2) * prod
}

/// ℓ-data for one column per leaf (no membership test).
pub fn ell_data(dd: &DefiningData, p: &IntMat, cols: &[usize]) -> ElemBigCone {
    let all = dd.columns();
    let l: Vec<i64> = cols.iter().map(|&c| dd.exponent(all[c])).collect();
    let prod: BigInt = l.iter().map(|&x| BigInt::from(x)).product();
    let ell_rho: Vec<BigInt> = l.iter().map(|&x| &prod / BigInt::from(x)).collect();
    let ell = ell_sigma(&l);
    let mut v = vec![BigInt::zero(); p.rows];
    for (&c, w) in cols.iter().zip(&ell_rho) {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk += w * &p[(k, c)];
        }
    }
    let c = gcd_vector(&v);
    let v_prime = ell.is_positive().then(|| v.iter().map(|x| rat_int(x) / rat_int(&ell)).collect());
    ElemBigCone { cols: cols.to_vec(), l, ell_rho, ell, v, c, v_prime }
}

/// All one-column-per-leaf tuples that are cones of `Σ`, with ℓ-data.
pub fn elementary_big_cones(dd: &DefiningData, g: &Grading) -> Vec<ElemBigCone> {
    let p = assemble_p(dd).expect("valid data");
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..=dd.r {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..dd.n[i]).map(move |j| {
                    let mut u = t.clone();
                    u.push(dd.col_index(Col::T(i, j)));
                    u
                })
            })
            .collect();
    }
    tuples
        .into_iter()
        .filter(|t| cone_in_sigma(dd, g, t))
        .map(|t| ell_data(dd, &p, &t))
        .collect()
}

/// Log terminal iff every elementary big cone has `ℓ_σ > 0`.
pub fn is_log_terminal(dd: &DefiningData, g: &Grading) -> bool {
    non_log_terminal_witness(dd, g).is_none()
}

pub fn non_log_terminal_witness(dd: &DefiningData, g: &Grading) -> Option<ElemBigCone> {
    elementary_big_cones(dd, g).into_iter().find(|c| !c.ell.is_positive())
}

/// `r − 1 ≤ dim X + rk Pic X`, with `rk Pic = free rank` (Q-factorial case).
pub fn check_relation_bound(dd: &DefiningData, g: &Grading) -> bool {
    dd.r - 1 <= dd.s + 1 + g.free_rank
}

/// All cones of `Σ` as sorted column subsets (every subset is tested).
pub fn sigma_cones(dd: &DefiningData, g: &Grading) -> Vec<Vec<usize>> {
    let n = dd.ncols();
    assert!(n < 24, "too many columns for subset enumeration");
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&j| mask >> j & 1 == 1).collect::<Vec<_>>())
        .filter(|rays| cone_in_sigma(dd, g, rays))
        .collect()
}

/// Inclusion-maximal cones of `Σ`.
pub fn maximal_sigma_cones(dd: &DefiningData, g: &Grading) -> Vec<Vec<usize>> {
    let all = sigma_cones(dd, g);
    let sets: Vec<BTreeSet<usize>> = all.iter().map(|c| c.iter().copied().collect()).collect();
    all.iter()
        .enumerate()
        .filter(|(i, _)| !sets.iter().enumerate().any(|(k, s)| k != *i && s.len() > sets[*i].len() && sets[*i].is_subset(s)))
        .map(|(_, c)| c.clone())
        .collect()
}

/// Every cone of `Σ` has linearly independent generators.
pub fn is_simplicial(dd: &DefiningData, g: &Grading) -> bool {
    let p = assemble_p(dd).expect("valid data");
    maximal_sigma_cones(dd, g).iter().all(|c| p.select_cols(c).rank() == c.len())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::{int, rat, to_big};
    use crate::rap::tests::{e6, quadric, quadric_listed, random_op};
    use crate::rap::{admissible_ops, grading, AdmissibleOp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Exponents (3,3,3): a cone over a cubic curve, not log terminal.
    pub fn triple_three() -> DefiningData {
        DefiningData::new(vec![vec![3], vec![3], vec![3]], vec![vec![1, 1, 1]]).with_dprime(vec![vec![-1]])
    }

    #[test]
    fn quadric_membership() {
        let dd = quadric_listed();
        let g = grading(&dd).unwrap();
        assert!(cone_in_sigma(&dd, &g, &[0, 2, 4]));
        assert!(!cone_in_sigma(&dd, &g, &[0, 1, 2, 3, 4]));
        assert!(cone_in_sigma(&dd, &g, &[0, 1]));
        // two leaves out of three: misses trop
        assert!(!cone_in_sigma(&dd, &g, &[0, 2]));
    }

    #[test]
    fn big_cone_counts() {
        for dd in [quadric(), quadric_listed()] {
            let g = grading(&dd).unwrap();
            let cones = elementary_big_cones(&dd, &g);
            assert_eq!(cones.len(), 4);
            assert!(cones.iter().all(|c| c.ell == int(3)));
        }
        let g = grading(&e6()).unwrap();
        assert_eq!(elementary_big_cones(&e6(), &g).len(), 2);
        let t = triple_three();
        let gt = grading(&t).unwrap();
        assert_eq!(elementary_big_cones(&t, &gt).len(), 1);
    }

    #[test]
    fn quadric_ell_data() {
        let dd = quadric_listed();
        let g = grading(&dd).unwrap();
        let c = elementary_big_cones(&dd, &g).into_iter().find(|c| c.cols == vec![0, 2, 4]).unwrap();
        assert_eq!(c.v, to_big(&[0, 0, -1, 2]));
        assert_eq!(c.c, int(1));
        assert_eq!(c.v_prime.clone().unwrap(), vec![rat(0, 1), rat(0, 1), rat(-1, 3), rat(2, 3)]);
        assert_eq!(c.discrepancy(), rat(2, 1));
    }

    #[test]
    fn ell_closed_forms() {
        assert_eq!(ell_sigma(&[5, 3, 2]), int(1));
        assert_eq!(ell_sigma(&[4, 3, 2]), int(2));
        assert_eq!(ell_sigma(&[3, 3, 2]), int(3));
        assert_eq!(ell_sigma(&[7, 4, 1]), int(11));
        assert_eq!(ell_sigma(&[3, 3, 3]), int(0));
        for a in 1..30 {
            assert_eq!(ell_sigma(&[a, 2, 2]), int(4));
        }
    }

    #[test]
    fn log_terminal_gate() {
        let g = grading(&quadric()).unwrap();
        assert!(is_log_terminal(&quadric(), &g));
        let t = triple_three();
        let gt = grading(&t).unwrap();
        assert!(crate::rap::is_fano(&t));
        let w = non_log_terminal_witness(&t, &gt).unwrap();
        assert_eq!(w.ell, int(0));
        assert!(w.v_prime.is_none());
    }

    #[test]
    fn relation_bound() {
        let g = grading(&quadric()).unwrap();
        assert!(check_relation_bound(&quadric(), &g));
        let mut fake = quadric();
        fake.r = 7;
        assert!(!check_relation_bound(&fake, &g));
        fake.r = 5;
        assert!(check_relation_bound(&fake, &g));
    }

    #[test]
    fn v_sigma_spans_cone_meet_lambda() {
        for dd in [quadric(), e6()] {
            let g = grading(&dd).unwrap();
            let p = assemble_p(&dd).unwrap();
            for c in elementary_big_cones(&dd, &g) {
                assert!(c.v[..dd.r].iter().all(Zero::is_zero));
                let cone = Cone::new(&c.cols.iter().map(|&j| p.col(j)).collect::<Vec<_>>(), p.rows);
                assert!(cone.contains(&c.v));
            }
        }
    }

    #[test]
    fn ell_data_invariant_under_row_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dd in [quadric(), e6()] {
            let g = grading(&dd).unwrap();
            let base: Vec<(BigInt, BigInt)> =
                elementary_big_cones(&dd, &g).iter().map(|c| (c.ell.clone(), c.c.clone())).collect();
            for _ in 0..30 {
                let op = random_op(&mut rng, &dd);
                if !matches!(op, AdmissibleOp::AddTopRow { .. } | AdmissibleOp::RowTransform { .. }) {
                    continue;
                }
                let e = admissible_ops(&dd, &op).unwrap();
                let ge = grading(&e).unwrap();
                let got: Vec<(BigInt, BigInt)> =
                    elementary_big_cones(&e, &ge).iter().map(|c| (c.ell.clone(), c.c.clone())).collect();
                assert_eq!(got, base);
            }
        }
    }

    #[test]
    fn sigma_structure_quadric() {
        let dd = quadric();
        let g = grading(&dd).unwrap();
        let max = maximal_sigma_cones(&dd, &g);
        // the four 4-ray subsets hitting all leaves; {v01,v02,v11,v12} misses trop
        assert_eq!(max.len(), 4);
        assert!(max.iter().all(|c| c.len() == 4 && c.contains(&4)));
        assert!(is_simplicial(&dd, &g));
        let trop = TropStructure::new(2, 2);
        assert_eq!(trop.leaves.len(), 3);
        assert_eq!(locate_point(2, &[rat(-2, 1), rat(-2, 1), rat(1, 1), rat(0, 1)]), Some(Some(0)));
        assert_eq!(locate_point(2, &[rat(0, 1), rat(3, 1), rat(1, 1), rat(0, 1)]), Some(Some(2)));
        assert_eq!(locate_point(2, &[rat(1, 1), rat(3, 1), rat(1, 1), rat(0, 1)]), None);
    }
}
