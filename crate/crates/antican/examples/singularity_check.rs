//! Singularity verdicts for three small data sets: the smooth quadric, its
//! free `Z/2` quotient and the non-log-terminal `(3,3,3)` cone.

use antican::acomplex::{classify, Witness};
use antican::rap::{grading, is_fano_graded, DefiningData};
use antican::tropfan::elementary_big_cones;

fn report(name: &str, dd: &DefiningData) {
    let g = grading(dd).expect("valid data");
    println!("{name}: fano={} class group rank {} torsion {:?}", is_fano_graded(&g), g.free_rank, g.torsion);
    let v = classify(dd, &g, None).expect("complex");
    println!("  log_terminal={} canonical={} terminal={}", v.log_terminal, v.canonical, v.terminal);
    for w in v.witnesses.iter().take(3) {
        match w {
            Witness::Cone { cols, l, ell } => println!("  cone {cols:?} exponents {l:?} ell_sigma {ell}"),
            Witness::Point { flag, point } => println!("  {flag} violated at {point:?}"),
        }
    }
    for c in elementary_big_cones(dd, &g) {
        println!("  big cone {:?}: l={:?} ell={} c={}", c.cols, c.l, c.ell, c.c);
    }
}

fn main() {
    let l = vec![vec![1, 1], vec![1, 1], vec![2]];
    report("quadric", &DefiningData::new(l.clone(), vec![vec![0, 1, 0, 0, -1], vec![0, 0, 1, 0, -1]]));
    report("quadric / Z2", &DefiningData::new(l, vec![vec![0, 1, 0, 0, -1], vec![0, 0, 1, -1, 0]]));
    report(
        "(3,3,3)",
        &DefiningData::new(vec![vec![3], vec![3], vec![3]], vec![vec![1, 1, 1]]).with_dprime(vec![vec![-1]]),
    );
}
