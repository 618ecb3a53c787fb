//! The E₆ singular cubic surface: its anticanonical polyhedron (six
//! vertices) and the pieces of the anticanonical complex.

use antican::acomplex::{anticanonical_polyhedron, build_complex, oracle_complex};
use antican::exact::rat_to_string;
use antican::rap::{grading, DefiningData};

fn main() {
    let dd = DefiningData::new(vec![vec![1, 3], vec![3], vec![2]], vec![vec![-1, -2, 1, 1]]);
    let g = grading(&dd).unwrap();
    let ax = anticanonical_polyhedron(&dd, &g).unwrap();
    println!("A_X has {} vertices:", ax.vertices.len());
    for v in &ax.vertices {
        println!("  ({})", v.iter().map(rat_to_string).collect::<Vec<_>>().join(", "));
    }
    let cx = build_complex(&dd, &g).unwrap();
    println!("complex dimension {}", cx.dimension());
    for (i, leaf) in cx.leaves.iter().enumerate() {
        let verts: Vec<String> =
            leaf.vertices.iter().map(|v| format!("({})", v.iter().map(rat_to_string).collect::<Vec<_>>().join(","))).collect();
        println!("  leaf {i}: {}", verts.join(" "));
    }
    let parts = cx.lattice_points_by_part();
    println!("lattice points in A0: {:?}", parts[0]);
    let oracle = oracle_complex(&dd, &g).unwrap();
    println!("formula and dual-polytope constructions agree: {}", cx.same_vertices(&oracle));
}
