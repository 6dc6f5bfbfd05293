//! The face test on degenerate inputs: symbolic perturbation gives every
//! case a definite answer, consistent across the faces of a tetrahedron.
//!
//! cargo run --release --example sos_predicates

use vfcp::predicates::{orient2_sos, origin_barycentric, values_have_cp};

fn main() {
    let cases: [(&str, [[i64; 2]; 3]); 5] = [
        ("origin inside", [[2, -1], [-1, 2], [-1, -1]]),
        ("origin on an edge", [[1, 0], [-1, 0], [0, 3]]),
        ("origin at a vertex", [[0, 0], [4, 1], [1, 4]]),
        ("collinear through origin", [[-2, -2], [1, 1], [3, 3]]),
        ("all zero", [[0, 0], [0, 0], [0, 0]]),
    ];
    for (name, vals) in cases {
        let a = values_have_cp(vals, [10, 11, 12]);
        let b = values_have_cp(vals, [12, 10, 11]);
        println!("{name:<26} contains zero: ids (10,11,12) {a:<5}  ids (12,10,11) {b}");
    }

    // a zero-area triangle still has a definite, antisymmetric orientation
    let (p, q, r) = ([0, 0], [1, 1], [2, 2]);
    println!(
        "orient(p,q,r) = {:+}, orient(q,p,r) = {:+}",
        orient2_sos(p, q, r, 0, 1, 2),
        orient2_sos(q, p, r, 1, 0, 2)
    );

    let b = origin_barycentric([2, -1], [-1, 2], [-1, -1]);
    println!("barycentric weights of the zero: {:?}", b.weights());
}
