//! Random admissible operations change the matrix but not the variety:
//! the normal form and the distinctness key survive.

use antican::invariants::distinctness_key;
use antican::rap::{admissible_ops, grading, normalize, AdmissibleOp, DefiningData};

fn main() {
    let dd = DefiningData::new(vec![vec![1, 3], vec![3], vec![2]], vec![vec![-1, -2, 1, 1]]);
    let key = distinctness_key(&dd, &grading(&dd).unwrap()).unwrap();
    let nf = normalize(&dd);
    let ops = [
        AdmissibleOp::SwapInBlock { block: 0, a: 0, b: 1 },
        AdmissibleOp::SwapBlocks { a: 1, b: 2 },
        AdmissibleOp::AddTopRow { top: 0, target: 0, factor: 3 },
        AdmissibleOp::AddTopRow { top: 1, target: 0, factor: -2 },
        AdmissibleOp::RowTransform { matrix: vec![vec![-1]] },
    ];
    let mut cur = dd.clone();
    for op in &ops {
        cur = admissible_ops(&cur, op).unwrap();
        let k = distinctness_key(&cur, &grading(&cur).unwrap()).unwrap();
        println!("{op:?}\n  L={:?} d={:?}", cur.l, cur.d);
        println!("  same normal form: {}  same key: {}", normalize(&cur) == nf, k == key);
    }
    println!("key: {}", key.describe());
}
