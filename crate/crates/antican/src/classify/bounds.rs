//! Bound records for the case analysis of terminal Picard-rank-one Fano
//! threefolds with two-torus action, and the raw enumerators they drive.
//!
//! Each record names a sub-case, the matrix shape it fixes and its
//! inequalities in plain notation. `d_kij` is the entry of `d` in row `k`
//! (1-based) under column `v_ij`. Ranges marked "derived" are not part of
//! the transcribed inequalities: they follow from positivity of the weights
//! (the kernel vector of `P`) and only make an otherwise implied finite range
//! explicit for the loops.

use num::integer::Integer;
use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::rap::DefiningData;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// Smallest integer strictly greater than `x`.
pub fn above(x: Q) -> i64 {
    x.floor().to_integer() + 1
}

/// Largest integer strictly smaller than `x`.
pub fn below(x: Q) -> i64 {
    x.ceil().to_integer() - 1
}

/// Smallest integer `≥ x`.
pub fn at_least(x: Q) -> i64 {
    x.ceil().to_integer()
}

/// Largest integer `≤ x`.
pub fn at_most(x: Q) -> i64 {
    x.floor().to_integer()
}

/// The shapes of the defining matrix that can occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// `r=2, m=0, n=(2,2,1)`
    I,
    /// `r=3, m=0, n=(2,2,1,1)`
    II,
    /// `r=4, m=0, n=(2,2,1,1,1)`
    III,
    /// `r=2, m=0, n=(3,1,1)`
    IV,
    /// `r=3, m=0, n=(3,1,1,1)`
    V,
    /// `r=2, m=1, n=(2,1,1)`
    VI,
    /// `r=3, m=1, n=(2,1,1,1)`
    VII,
    /// `r=2, m=2, n=(1,1,1)`
    VIII,
}

impl CaseId {
    pub const ALL: [CaseId; 8] =
        [CaseId::I, CaseId::II, CaseId::III, CaseId::IV, CaseId::V, CaseId::VI, CaseId::VII, CaseId::VIII];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::I => "i",
            CaseId::II => "ii",
            CaseId::III => "iii",
            CaseId::IV => "iv",
            CaseId::V => "v",
            CaseId::VI => "vi",
            CaseId::VII => "vii",
            CaseId::VIII => "viii",
        }
    }

    pub fn parse(s: &str) -> Option<CaseId> {
        CaseId::ALL.iter().copied().find(|c| c.name() == s)
    }

    /// `(r, m, n_0..n_r)`.
    pub fn shape(self) -> (usize, usize, &'static [usize]) {
        match self {
            CaseId::I => (2, 0, &[2, 2, 1]),
            CaseId::II => (3, 0, &[2, 2, 1, 1]),
            CaseId::III => (4, 0, &[2, 2, 1, 1, 1]),
            CaseId::IV => (2, 0, &[3, 1, 1]),
            CaseId::V => (3, 0, &[3, 1, 1, 1]),
            CaseId::VI => (2, 1, &[2, 1, 1]),
            CaseId::VII => (3, 1, &[2, 1, 1, 1]),
            CaseId::VIII => (2, 2, &[1, 1, 1]),
        }
    }

    /// Shapes known to contain no terminal instance: their streams are empty.
    pub fn is_empty_case(self) -> bool {
        matches!(self, CaseId::III | CaseId::V | CaseId::VII | CaseId::VIII)
    }
}

/// One sub-case: its identifier, the fixed shape and the inequalities.
#[derive(Clone, Copy, Debug)]
pub struct BoundRecord {
    pub id: &'static str,
    pub case: CaseId,
    pub matrix: &'static str,
    pub bounds: &'static [&'static str],
    pub note: &'static str,
}

pub const BOUND_RECORDS: &[BoundRecord] = &[
    BoundRecord {
        id: "i.l1-ones",
        case: CaseId::I,
        matrix: "rows [-1,-1,l11,l12,0],[-1,-1,0,0,l21],[0,1,d111,d112,d121],[0,0,d211,d212,d221]",
        bounds: &[
            "l11 = l12 = 1, d112 = d212 = 0",
            "3 <= (l21+1)*d211 <= 72",
            "0 <= d111 < d211",
            "-d211*l21 < d221 < 0",
            "d111*d221/d211 - l21 < d121 < 0",
        ],
        note: "also reached from l21 = 2 and l21 >= 3 whenever l11 = l12 = 1",
    },
    BoundRecord {
        id: "i.l21-two.shape-a",
        case: CaseId::I,
        matrix: "as i.l1-ones, l21 = 2, reduced shape",
        bounds: &[
            "l21 = 2, l11 >= l12, d121 = 1, d221 = 0",
            "(2+l12)*d211 + (2+l11)*(-d212) <= 36",
            "0 <= d112 < w11",
            "-((l21+d121)*w21 + d112*w12)/w11 < d111 < -(d121*w21 + d112*w12)/w11",
        ],
        note: "loop ranges for d211 > 0 > d212 are derived (w11, w12 > 0); the sum bound then caps l11",
    },
    BoundRecord {
        id: "i.l21-two.shape-b",
        case: CaseId::I,
        matrix: "as i.l1-ones, l21 = 2, reduced shape",
        bounds: &[
            "l21 = 2, l11 >= l12, d121 = 0, d221 = 1",
            "(l11-l12) + (2+l12)*d211 + (2+l11)*(-d212) <= 36",
            "0 <= d112 < w11",
            "-((l21+d121)*w21 + d112*w12)/w11 < d111 < -(d121*w21 + d112*w12)/w11",
        ],
        note: "derived: the sum equals w11+w12+w21, so each weight is at most 34, and \
               l11*w11 + l12*w12 = 2*w21 gives l11 <= 68; this bounds l11, d211, d212",
    },
    BoundRecord {
        id: "i.l21-two.l12-one.l11-two",
        case: CaseId::I,
        matrix: "as i.l1-ones",
        bounds: &[
            "l21 = 2, l11 = 2, l12 = 1, d112 = d212 = 0",
            "-6 <= d221 <= -3, d211 = 1 - d221",
            "0 <= d121 < -d221",
            "d121*d211/d221 + 2*d211/d221 < d111 < d121*d211/d221",
        ],
        note: "",
    },
    BoundRecord {
        id: "i.l21-two.l12-one.l11-large",
        case: CaseId::I,
        matrix: "as i.l1-ones",
        bounds: &[
            "l21 = 2, l12 = 1, 3 <= l11 < 140, d112 = d212 = 0",
            "(-5*l11+2)/(l11-2) < d221 <= -3",
            "-(l11/2)*d221 < d211 < -(l11/2)*d221 + l11/2",
            "0 <= d121 < -d221",
            "d121*d211/d221 + 2*d211/d221 < d111 < d121*d211/d221",
        ],
        note: "",
    },
    BoundRecord {
        id: "i.l21-small.shape",
        case: CaseId::I,
        matrix: "as i.l1-ones, reduced shape",
        bounds: &[
            "3 <= l21 <= 5; l21=3: l12 <= 4, l11 <= 5; l21=4: l12 <= 2, l11 <= 3; l21=5: l12 <= 2, l11 <= 2",
            "l11 >= l12, 0 <= d121, d221 < l21, d121 < d221 if d221 != 0",
            "-2 - (l12/l21)*(d221+2) < d212 < 0",
            "-(l11/l21)*d221 < d211 < -(l11/l21)*d221 + 1 + l11/l21",
            "0 <= d112 < w11",
            "-((l21+d121)*w21 + d112*w12)/w11 < d111 < -(d121*w21 + d112*w12)/w11",
        ],
        note: "",
    },
    BoundRecord {
        id: "i.l21-large.l11-two",
        case: CaseId::I,
        matrix: "as i.l1-ones",
        bounds: &[
            "l21 >= 6, l11 = 2, l12 = 1, d112 = d212 = 0",
            "(d111,d211) -> max l21: (0,1) 141, (1,2) 71, (1,3) 71, (1,4) 179, (1,5) 177, (2,3) 137, (2,5) 143",
            "-2*(l21+1) < d221 < 0",
            "d111*d221/d211 - l21 < d121 < d111*d221/d211",
        ],
        note: "pairs (d111,d211) outside the seven listed are excluded",
    },
    BoundRecord {
        id: "i.l21-34.l11-two",
        case: CaseId::I,
        matrix: "as i.l1-ones",
        bounds: &[
            "l11 = 2, l12 = 1, l21 in {3,4}, d112 = d212 = 0",
            "-4*(l21+1) < d221 < 0",
            "-(2/l21)*d221 < d211 < -(2/l21)*(d221-1) + 1",
            "0 <= d121 < -d221",
            "d211*(d121+l21)/d221 < d111 < d211*d121/d221",
        ],
        note: "",
    },
    BoundRecord {
        id: "iv.l21-two.a",
        case: CaseId::IV,
        matrix: "rows [-1,-1,-1,l11,0],[-1,-1,-1,0,l21],[0,1,0,d111,d121],[0,0,1,d211,d221]",
        bounds: &[
            "l21 = 2, d121 = 1, d221 = 0, 2 <= l11 <= 69",
            "-l11/2 - 1 < d211 < 0",
            "-l11 <= d111 < -l11/2",
        ],
        note: "",
    },
    BoundRecord {
        id: "iv.l21-two.b",
        case: CaseId::IV,
        matrix: "as iv.l21-two.a",
        bounds: &[
            "l21 = 2, d121 = 1, d221 = 1",
            "-35 <= d111 < 0",
            "d111 <= d211 < 0",
            "max(2, -d111) <= l11 < -2*d211",
        ],
        note: "",
    },
    BoundRecord {
        id: "iv.l21-three",
        case: CaseId::IV,
        matrix: "as iv.l21-two.a",
        bounds: &[
            "l21 = 3, l11 >= 3, 0 <= d121 <= d221 < 3",
            "(d121,d221) -> max l11: (0,1) 71, (0,2) 211, (1,1) 103, (1,2) 211, (2,2) 69",
            "-(l11/3)*(d121+1) - 1 < d111 < -(l11/3)*d121",
            "-(l11/3)*(d221+1) - 1 < d211 < -(l11/3)*d221",
        ],
        note: "(d121,d221) = (0,0) makes v21 imprimitive and is not listed",
    },
    BoundRecord {
        id: "iv.l21-four-five",
        case: CaseId::IV,
        matrix: "as iv.l21-two.a",
        bounds: &[
            "l21 in {4,5}, l21 <= l11 < 3*l21/(l21-3)",
            "0 <= d121, d221 < l21",
            "-l11*d121/l21 - l11 < d111 < -l11*d121/l21",
            "-l11*d221/l21 - l11 < d211 < -l11*d221/l21",
        ],
        note: "",
    },
    BoundRecord {
        id: "ii.l31-two",
        case: CaseId::II,
        matrix: "rows [-1,-1,1,1,0,0],[-1,-1,0,0,l21,0],[-1,-1,0,0,0,l31],[0,1,d111,0,d121,d131],[0,0,d211,0,d221,d231]",
        bounds: &[
            "l31 = 2, l21 >= 2, d211 = 1, d111 = 0",
            "(d131,d231) -> max l21: (0,1) 33, (1,0) 141, (1,1) 69",
            "-(l21/2)*(d231+1) - 1 < d221 < -(l21/2)*d231",
            "-d221/l21 - d231/2 < d211 < -d221/l21 - d231/2 + (2+l21)/(2*l21)",
        ],
        note: "derived: -l21*(1 + d131/l31) < d121 < -l21*d131/l31 (w01, w02 > 0); no range for d121 is stated",
    },
    BoundRecord {
        id: "ii.l31-three",
        case: CaseId::II,
        matrix: "as ii.l31-two",
        bounds: &[
            "l31 = 3, 3 <= l21 <= 5, 0 <= d131, d231 < 3",
            "-(l21/3)*(d231+1) - 1 < d221 < -(l21/3)*d231",
            "-d221/l21 - d231/3 < d211 < -d221/l21 - d231/3 + (3+l21)/(3*l21)",
            "0 <= d111 < d211*l31",
            "E/(3*d211) - l21 < d121 < E/(3*d211), E = d111*(l21*d231 + 3*d221) - l21*d211*d131",
        ],
        note: "",
    },
    BoundRecord {
        id: "vi",
        case: CaseId::VI,
        matrix: "rows [-1,-1,l11,0,0],[-1,-1,0,l21,0],[0,1,d111,d121,0],[0,0,d211,d221,1]",
        bounds: &[
            "l11 >= l21, 0 <= d121, d221 < l21",
            "-(l11/l21)*d121 - l11 < d111 < -(l11/l21)*d121",
            "-(l11/l21)*(d221+1) - 1 < d211 < -(l11/l21)*d221",
            "l21 <= 7; max l11: l21=2 140, 3 211, 4 283, 5 19, 6 11, 7 9",
        ],
        note: "the d111 lower bound is the positivity bound (w01 > 0); the sharper published \
               form with -l21 in place of -l11 excludes every normal form of the Z+Z/2 member \
               with exponents (6,2), e.g. d111 = -5, d121 = 1, d211 = -4, d221 = 1",
    },
];

pub fn record(id: &str) -> Option<&'static BoundRecord> {
    BOUND_RECORDS.iter().find(|r| r.id == id)
}

/// A unit of work: a sub-case with its outer loop variables fixed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Shard {
    pub subcase: String,
    pub params: Vec<i64>,
}

impl Shard {
    pub fn id(&self) -> String {
        let p: Vec<String> = self.params.iter().map(ToString::to_string).collect();
        format!("{}@{}", self.subcase, p.join("_"))
    }
}

fn shard(id: &str, params: Vec<i64>) -> Shard {
    Shard { subcase: id.to_string(), params }
}

const I_L21_LARGE: [(i64, i64, i64); 7] =
    [(0, 1, 141), (1, 2, 71), (1, 3, 71), (1, 4, 179), (1, 5, 177), (2, 3, 137), (2, 5, 143)];
const IV_L21_THREE: [(i64, i64, i64); 5] = [(0, 1, 71), (0, 2, 211), (1, 1, 103), (1, 2, 211), (2, 2, 69)];
const II_L31_TWO: [(i64, i64, i64); 3] = [(0, 1, 33), (1, 0, 141), (1, 1, 69)];
const VI_CAPS: [(i64, i64); 6] = [(2, 140), (3, 211), (4, 283), (5, 19), (6, 11), (7, 9)];

/// Shards of a case, in a fixed order.
pub fn shards(case: CaseId) -> Vec<Shard> {
    let mut v = Vec::new();
    match case {
        CaseId::I => {
            for l21 in 2..=71 {
                v.push(shard("i.l1-ones", vec![l21]));
            }
            for l11 in 1..=68 {
                v.push(shard("i.l21-two.shape-a", vec![l11]));
                v.push(shard("i.l21-two.shape-b", vec![l11]));
            }
            v.push(shard("i.l21-two.l12-one.l11-two", vec![]));
            for l11 in 3..140 {
                v.push(shard("i.l21-two.l12-one.l11-large", vec![l11]));
            }
            for l21 in 3..=5 {
                v.push(shard("i.l21-small.shape", vec![l21]));
            }
            for (d111, d211, cap) in I_L21_LARGE {
                for l21 in 6..=cap {
                    v.push(shard("i.l21-large.l11-two", vec![d111, d211, l21]));
                }
            }
            for l21 in 3..=4 {
                v.push(shard("i.l21-34.l11-two", vec![l21]));
            }
        }
        CaseId::IV => {
            for l11 in 2..=69 {
                v.push(shard("iv.l21-two.a", vec![l11]));
            }
            for d111 in -35..0 {
                v.push(shard("iv.l21-two.b", vec![d111]));
            }
            for (d121, d221, cap) in IV_L21_THREE {
                for l11 in 3..=cap {
                    v.push(shard("iv.l21-three", vec![d121, d221, l11]));
                }
            }
            for l21 in 4..=5 {
                v.push(shard("iv.l21-four-five", vec![l21]));
            }
        }
        CaseId::II => {
            for (d131, d231, cap) in II_L31_TWO {
                for l21 in 2..=cap {
                    v.push(shard("ii.l31-two", vec![d131, d231, l21]));
                }
            }
            for l21 in 3..=5 {
                v.push(shard("ii.l31-three", vec![l21]));
            }
        }
        CaseId::VI => {
            for (l21, cap) in VI_CAPS {
                for l11 in l21..=cap {
                    v.push(shard("vi", vec![l21, l11]));
                }
            }
        }
        _ => {}
    }
    v
}

fn case_one(l11: i64, l12: i64, l21: i64, d1: [i64; 3], d2: [i64; 3]) -> DefiningData {
    DefiningData::new(
        vec![vec![1, 1], vec![l11, l12], vec![l21]],
        vec![vec![0, 1, d1[0], d1[1], d1[2]], vec![0, 0, d2[0], d2[1], d2[2]]],
    )
}

fn case_four(l11: i64, l21: i64, d111: i64, d121: i64, d211: i64, d221: i64) -> DefiningData {
    DefiningData::new(
        vec![vec![1, 1, 1], vec![l11], vec![l21]],
        vec![vec![0, 1, 0, d111, d121], vec![0, 0, 1, d211, d221]],
    )
}

fn case_two(l21: i64, l31: i64, d1: [i64; 3], d2: [i64; 3]) -> DefiningData {
    DefiningData::new(
        vec![vec![1, 1], vec![1, 1], vec![l21], vec![l31]],
        vec![vec![0, 1, d1[0], 0, d1[1], d1[2]], vec![0, 0, d2[0], 0, d2[1], d2[2]]],
    )
}

fn case_six(l11: i64, l21: i64, d111: i64, d121: i64, d211: i64, d221: i64) -> DefiningData {
    DefiningData::new(vec![vec![1, 1], vec![l11], vec![l21]], vec![vec![0, 1, d111, d121], vec![0, 0, d211, d221]])
        .with_dprime(vec![vec![0], vec![1]])
}

/// Remaining entries `d112`, `d111` of the reduced case-(i) shape, from the weights.
fn reduced_shape_tail(
    l: (i64, i64, i64),
    d121: i64,
    d221: i64,
    d211: i64,
    d212: i64,
    sink: &mut dyn FnMut(DefiningData),
) {
    let (l11, l12, l21) = l;
    let w11 = -l21 * d212 - l12 * d221;
    let w12 = l21 * d211 + l11 * d221;
    let w21 = -l11 * d212 + l12 * d211;
    if w11 <= 0 {
        return;
    }
    for d112 in 0..w11 {
        let lo = above(q(-((l21 + d121) * w21 + d112 * w12), w11));
        let hi = below(q(-(d121 * w21 + d112 * w12), w11));
        for d111 in lo..=hi {
            sink(case_one(l11, l12, l21, [d111, d112, d121], [d211, d212, d221]));
        }
    }
}

/// Feeds every candidate of a shard to `sink`, exactly the integer tuples
/// inside the record's inequalities.
pub fn enumerate_shard(sh: &Shard, sink: &mut dyn FnMut(DefiningData)) {
    let p = &sh.params;
    match sh.subcase.as_str() {
        "i.l1-ones" => {
            let l21 = p[0];
            for d211 in 1..=72 / (l21 + 1) {
                if (l21 + 1) * d211 < 3 {
                    continue;
                }
                for d111 in 0..d211 {
                    for d221 in (-d211 * l21 + 1)..=-1 {
                        let lo = above(q(d111 * d221, d211) - qi(l21));
                        for d121 in lo..=-1 {
                            sink(case_one(1, 1, l21, [d111, 0, d121], [d211, 0, d221]));
                        }
                    }
                }
            }
        }
        "i.l21-two.shape-a" => {
            let (l11, l21, d121, d221) = (p[0], 2, 1, 0);
            for l12 in 1..=l11 {
                // w12 = 2*d211 > 0, w11 = -2*d212 > 0
                let mut d211 = 1;
                while (2 + l12) * d211 + (2 + l11) <= 36 {
                    let mut m212 = 1;
                    while (2 + l12) * d211 + (2 + l11) * m212 <= 36 {
                        reduced_shape_tail((l11, l12, l21), d121, d221, d211, -m212, sink);
                        m212 += 1;
                    }
                    d211 += 1;
                }
            }
        }
        "i.l21-two.shape-b" => {
            let (l11, l21, d121, d221) = (p[0], 2, 0, 1);
            for l12 in 1..=l11 {
                // derived: 1 <= w11 = -2*d212 - l12 <= 34, 1 <= w12 = 2*d211 + l11 <= 34
                let d212_hi = at_most(q(-l12 - 1, 2));
                let d212_lo = at_least(q(-(34 + l12), 2));
                let d211_lo = at_least(q(1 - l11, 2));
                let d211_hi = at_most(q(34 - l11, 2));
                for d211 in d211_lo..=d211_hi {
                    for d212 in d212_lo..=d212_hi {
                        if (l11 - l12) + (2 + l12) * d211 + (2 + l11) * (-d212) > 36 {
                            continue;
                        }
                        let w21 = -l11 * d212 + l12 * d211;
                        if w21 <= 0 {
                            continue;
                        }
                        reduced_shape_tail((l11, l12, l21), d121, d221, d211, d212, sink);
                    }
                }
            }
        }
        "i.l21-two.l12-one.l11-two" => {
            for d221 in -6..=-3 {
                let d211 = 1 - d221;
                two_tail(2, 1, 2, d211, d221, sink);
            }
        }
        "i.l21-two.l12-one.l11-large" => {
            let l11 = p[0];
            let lo221 = above(q(-5 * l11 + 2, l11 - 2));
            for d221 in lo221..=-3 {
                let base = q(-l11 * d221, 2);
                for d211 in above(base)..=below(base + q(l11, 2)) {
                    two_tail(l11, 1, 2, d211, d221, sink);
                }
            }
        }
        "i.l21-small.shape" => {
            let l21 = p[0];
            let (c12, c11) = match l21 {
                3 => (4, 5),
                4 => (2, 3),
                _ => (2, 2),
            };
            for l11 in 1..=c11 {
                for l12 in 1..=l11.min(c12) {
                    for d221 in 0..l21 {
                        for d121 in 0..l21 {
                            if d221 != 0 && d121 >= d221 {
                                continue;
                            }
                            let lo212 = above(qi(-2) - q(l12, l21) * qi(d221 + 2));
                            for d212 in lo212..=-1 {
                                let b = q(-l11 * d221, l21);
                                for d211 in above(b)..=below(b + qi(1) + q(l11, l21)) {
                                    reduced_shape_tail((l11, l12, l21), d121, d221, d211, d212, sink);
                                }
                            }
                        }
                    }
                }
            }
        }
        "i.l21-large.l11-two" => {
            let (d111, d211, l21) = (p[0], p[1], p[2]);
            for d221 in (-2 * (l21 + 1) + 1)..=-1 {
                let c = q(d111 * d221, d211);
                for d121 in above(c - qi(l21))..=below(c) {
                    sink(case_one(2, 1, l21, [d111, 0, d121], [d211, 0, d221]));
                }
            }
        }
        "i.l21-34.l11-two" => {
            let l21 = p[0];
            for d221 in (-4 * (l21 + 1) + 1)..=-1 {
                let lo = above(q(-2 * d221, l21));
                let hi = below(q(-2 * (d221 - 1), l21) + qi(1));
                for d211 in lo..=hi {
                    for d121 in 0..-d221 {
                        let a = above(q(d211 * (d121 + l21), d221));
                        let b = below(q(d211 * d121, d221));
                        for d111 in a..=b {
                            sink(case_one(2, 1, l21, [d111, 0, d121], [d211, 0, d221]));
                        }
                    }
                }
            }
        }
        "iv.l21-two.a" => {
            let l11 = p[0];
            for d211 in above(q(-l11, 2) - qi(1))..=-1 {
                for d111 in -l11..=below(q(-l11, 2)) {
                    sink(case_four(l11, 2, d111, 1, d211, 0));
                }
            }
        }
        "iv.l21-two.b" => {
            let d111 = p[0];
            for d211 in d111..=-1 {
                for l11 in 2.max(-d111)..(-2 * d211) {
                    sink(case_four(l11, 2, d111, 1, d211, 1));
                }
            }
        }
        "iv.l21-three" => {
            let (d121, d221, l11) = (p[0], p[1], p[2]);
            let t = q(l11, 3);
            for d111 in above(-t * qi(d121 + 1) - qi(1))..=below(-t * qi(d121)) {
                for d211 in above(-t * qi(d221 + 1) - qi(1))..=below(-t * qi(d221)) {
                    sink(case_four(l11, 3, d111, d121, d211, d221));
                }
            }
        }
        "iv.l21-four-five" => {
            let l21 = p[0];
            for l11 in l21..=below(q(3 * l21, l21 - 3)) {
                for d121 in 0..l21 {
                    for d221 in 0..l21 {
                        let a = q(-l11 * d121, l21);
                        let b = q(-l11 * d221, l21);
                        for d111 in above(a - qi(l11))..=below(a) {
                            for d211 in above(b - qi(l11))..=below(b) {
                                sink(case_four(l11, l21, d111, d121, d211, d221));
                            }
                        }
                    }
                }
            }
        }
        "ii.l31-two" => {
            let (d131, d231, l21) = (p[0], p[1], p[2]);
            let (l31, d211, d111) = (2, 1, 0);
            let h = q(l21, 2);
            for d221 in above(-h * qi(d231 + 1) - qi(1))..=below(-h * qi(d231)) {
                let base = q(-d221, l21) - q(d231, 2);
                let d = qi(d211);
                if !(base < d && d < base + q(2 + l21, 2 * l21)) {
                    continue;
                }
                // derived from w01, w02 > 0
                let lo = above(-qi(l21) * (qi(1) + q(d131, l31)));
                let hi = below(-qi(l21) * q(d131, l31));
                for d121 in lo..=hi {
                    sink(case_two(l21, l31, [d111, d121, d131], [d211, d221, d231]));
                }
            }
        }
        "ii.l31-three" => {
            let (l21, l31) = (p[0], 3);
            for d131 in 0..3 {
                for d231 in 0..3 {
                    let h = q(l21, 3);
                    for d221 in above(-h * qi(d231 + 1) - qi(1))..=below(-h * qi(d231)) {
                        let base = q(-d221, l21) - q(d231, 3);
                        for d211 in above(base)..=below(base + q(3 + l21, 3 * l21)) {
                            for d111 in 0..d211 * l31 {
                                let e = d111 * (l21 * d231 + 3 * d221) - l21 * d211 * d131;
                                let c = q(e, 3 * d211);
                                for d121 in above(c - qi(l21))..=below(c) {
                                    sink(case_two(l21, l31, [d111, d121, d131], [d211, d221, d231]));
                                }
                            }
                        }
                    }
                }
            }
        }
        "vi" => {
            let (l21, l11) = (p[0], p[1]);
            let t = q(l11, l21);
            for d121 in 0..l21 {
                for d221 in 0..l21 {
                    for d111 in above(-t * qi(d121) - qi(l11))..=below(-t * qi(d121)) {
                        for d211 in above(-t * qi(d221 + 1) - qi(1))..=below(-t * qi(d221)) {
                            sink(case_six(l11, l21, d111, d121, d211, d221));
                        }
                    }
                }
            }
        }
        other => panic!("unknown sub-case {other}"),
    }
}

/// `0 <= d121 < -d221` and `(d121+2)*d211/d221 < d111 < d121*d211/d221`.
fn two_tail(l11: i64, l12: i64, l21: i64, d211: i64, d221: i64, sink: &mut dyn FnMut(DefiningData)) {
    for d121 in 0..-d221 {
        let hi = below(q(d121 * d211, d221));
        let lo = above(q(d121 * d211, d221) + q(2 * d211, d221));
        for d111 in lo..=hi {
            sink(case_one(l11, l12, l21, [d111, 0, d121], [d211, 0, d221]));
        }
    }
}

/// Number of raw candidates of a shard (for progress reports).
pub fn count_shard(sh: &Shard) -> u64 {
    let mut n = 0u64;
    enumerate_shard(sh, &mut |_| n += 1);
    n
}

/// Small boxes over the shapes without terminal members, for spot checks.
/// Exponents run over `2..=lmax` on single-column blocks and `1..=lmax` on
/// the others; `d`-entries of the non-fixed columns over `-b..=b`.
pub fn spot_box(case: CaseId, lmax: i64, b: i64, sink: &mut dyn FnMut(DefiningData)) {
    let (r, m, n) = case.shape();
    let nt: usize = n.iter().sum();
    let s = nt + m - r - 1;
    assert_eq!(s, 2, "spot boxes are for threefolds of Picard number one");
    // Exponent tuples, non-increasing inside blocks.
    let mut ls: Vec<Vec<Vec<i64>>> = vec![vec![]];
    for &ni in n {
        let lo = if ni == 1 { 2 } else { 1 };
        let mut blocks: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..ni {
            blocks = blocks
                .into_iter()
                .flat_map(|bl| {
                    let top = bl.last().copied().unwrap_or(lmax);
                    (lo..=top).map(move |x| {
                        let mut c = bl.clone();
                        c.push(x);
                        c
                    })
                })
                .collect();
        }
        ls = ls
            .into_iter()
            .flat_map(|pre| {
                blocks.iter().map(move |bl| {
                    let mut c = pre.clone();
                    c.push(bl.clone());
                    c
                })
            })
            .collect();
    }
    // Normal shape: the first two T-columns of block 0 (or the first T- and
    // S-column) carry the unit d-vectors when available; others are free.
    let free_cols = nt + m - 1;
    let total = (2 * b + 1).pow(2 * free_cols as u32 - 1);
    for l in ls {
        for code in 0..total {
            let mut c = code;
            let mut vals = Vec::with_capacity(2 * free_cols);
            for _ in 0..(2 * free_cols - 1) {
                vals.push(c.mod_floor(&(2 * b + 1)) - b);
                c /= 2 * b + 1;
            }
            // first free column has d-part (1, x): removes the row-swap freedom
            let mut d = vec![vec![0i64; nt], vec![0i64; nt]];
            let mut dp = vec![vec![0i64; m], vec![0i64; m]];
            let mut k = 0;
            let mut first = true;
            for j in 1..nt + m {
                let (a, bb) = if first {
                    first = false;
                    let v = (1, vals[k]);
                    k += 1;
                    v
                } else {
                    let v = (vals[k], vals[k + 1]);
                    k += 2;
                    v
                };
                if j < nt {
                    d[0][j] = a;
                    d[1][j] = bb;
                } else {
                    dp[0][j - nt] = a;
                    dp[1][j - nt] = bb;
                }
            }
            sink(DefiningData::new(l.clone(), d).with_dprime(dp));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(dd: &DefiningData) -> Vec<i64> {
        dd.d.iter().flatten().copied().collect()
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(above(q(3, 2)), 2);
        assert_eq!(above(qi(2)), 3);
        assert_eq!(below(q(3, 2)), 1);
        assert_eq!(below(qi(2)), 1);
        assert_eq!(below(q(-3, 2)), -2);
        assert_eq!(at_least(q(-3, 2)), -1);
        assert_eq!(at_most(q(-3, 2)), -2);
    }

    /// Independent slow enumerator for a small shard: box scan plus the raw
    /// inequalities checked with rationals.
    #[test]
    fn l1_ones_matches_box_scan() {
        for l21 in [2, 5, 11] {
            let mut fast: Vec<Vec<i64>> = Vec::new();
            enumerate_shard(&shard("i.l1-ones", vec![l21]), &mut |dd| fast.push(entries(&dd)));
            let mut slow = Vec::new();
            let m = 80;
            for d211 in -m..=m {
                let t = (l21 + 1) * d211;
                if !(3 <= t && t <= 72) {
                    continue;
                }
                for d111 in -m..=m {
                    if !(0 <= d111 && d111 < d211) {
                        continue;
                    }
                    for d221 in -m * 12..=m {
                        if !(-d211 * l21 < d221 && d221 < 0) {
                            continue;
                        }
                        for d121 in -m * 12..=m {
                            let lhs = q(d111 * d221, d211) - qi(l21);
                            if lhs < qi(d121) && d121 < 0 {
                                slow.push(vec![0, 1, d111, 0, d121, 0, 0, d211, 0, d221]);
                            }
                        }
                    }
                }
            }
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "l21 = {l21}");
        }
    }

    #[test]
    fn vi_matches_box_scan() {
        let (l21, l11) = (3, 7);
        let mut fast: Vec<Vec<i64>> = Vec::new();
        enumerate_shard(&shard("vi", vec![l21, l11]), &mut |dd| fast.push(entries(&dd)));
        let mut slow = Vec::new();
        let t = q(l11, l21);
        for d121 in -10..10 {
            for d221 in -10..10 {
                if !(0 <= d121 && d121 < l21 && 0 <= d221 && d221 < l21) {
                    continue;
                }
                for d111 in -40..40 {
                    if !(-t * qi(d121) - qi(l11) < qi(d111) && qi(d111) < -t * qi(d121)) {
                        continue;
                    }
                    for d211 in -40..40 {
                        if -t * qi(d221 + 1) - qi(1) < qi(d211) && qi(d211) < -t * qi(d221) {
                            slow.push(vec![0, 1, d111, d121, 0, 0, d211, d221]);
                        }
                    }
                }
            }
        }
        fast.sort();
        slow.sort();
        assert_eq!(fast, slow);
    }

    #[test]
    fn boundary_strictness() {
        // iv.l21-two.a: -l11 <= d111 (non-strict) and d111 < -l11/2 (strict)
        let mut d111s = std::collections::BTreeSet::new();
        enumerate_shard(&shard("iv.l21-two.a", vec![4]), &mut |dd| {
            d111s.insert(dd.d[0][3]);
        });
        assert_eq!(d111s.into_iter().collect::<Vec<_>>(), vec![-4, -3]);
        // vi with l21 = 7 stops at l11 = 9
        let last = shards(CaseId::VI).into_iter().filter(|s| s.params[0] == 7).map(|s| s.params[1]).max();
        assert_eq!(last, Some(9));
    }

    #[test]
    fn empty_cases_have_no_shards() {
        for c in [CaseId::III, CaseId::V, CaseId::VII, CaseId::VIII] {
            assert!(c.is_empty_case());
            assert!(shards(c).is_empty());
        }
        for r in BOUND_RECORDS {
            assert!(!r.case.is_empty_case());
        }
    }

    #[test]
    fn every_shard_names_a_record() {
        for c in CaseId::ALL {
            for s in shards(c) {
                assert!(record(&s.subcase).is_some(), "{}", s.subcase);
            }
        }
    }
}
