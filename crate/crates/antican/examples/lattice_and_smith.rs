//! Exact kernel: Smith normal form of an integer matrix and the lattice
//! points of a rational polytope.

use antican::exact::{rat, smith_normal_form, IntMat};
use antican::polyhedra::{hull, scale};

fn main() {
    let m = IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let s = smith_normal_form(&m);
    println!("diagonal {:?}", s.diagonal().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("U·M·V == D: {}", s.u.mul(&m).mul(&s.v) == s.d);

    let tri = hull(&[
        vec![rat(-3, 2), rat(-1, 1)],
        vec![rat(5, 2), rat(-1, 1)],
        vec![rat(0, 1), rat(7, 3)],
    ]);
    println!("triangle halfspaces: {}", tri.halfspaces.len());
    println!("lattice points: {:?}", tri.lattice_points());
    println!("interior: {:?}", tri.relative_interior_lattice_points());
    println!("half-size copy: {:?}", scale(&tri, &rat(1, 2)).lattice_points());
}
