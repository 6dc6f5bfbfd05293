//! Exact orientation and point-in-triangle tests on fixed-point vectors,
//! made total by Simulation of Simplicity.
//!
//! Point `k` is perturbed by `(ε^(2·4^r), ε^(4^r))` where `r` is its rank in
//! ascending-id order, so smaller ids are perturbed more. The virtual origin
//! (id `-1`) ranks after every real vertex and is perturbed least.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::{Dims, FixedField};
use crate::mesh::{for_each_face, FaceKey};

/// Id of the virtual origin vertex in the substitution tests.
pub const ORIGIN_ID: i64 = -1;

#[inline]
fn rank_key(id: i64) -> u64 {
    if id < 0 {
        u64::MAX
    } else {
        id as u64
    }
}

#[inline]
fn det2(a: [i64; 2], b: [i64; 2]) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

/// `det [[a 1] [b 1] [c 1]]`, twice the signed area of `abc`.
#[inline]
fn det3(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> i128 {
    det2(a, b) + det2(b, c) + det2(c, a)
}

#[inline]
fn sign(x: i128) -> i32 {
    (x > 0) as i32 - (x < 0) as i32
}

/// Symbolic sign of `det3` for rows already in ascending-rank order.
fn sos_sorted(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> i32 {
    let d = det3(a, b, c);
    if d != 0 {
        return sign(d);
    }
    // coefficients of ε^1 (a_y), ε^2 (a_x), ε^4 (b_y); ε^6 (a_x·b_y) is +1
    let s = sign(c[0] as i128 - b[0] as i128);
    if s != 0 {
        return s;
    }
    let s = sign(b[1] as i128 - c[1] as i128);
    if s != 0 {
        return s;
    }
    let s = sign(a[0] as i128 - c[0] as i128);
    if s != 0 {
        return s;
    }
    1
}

/// Orientation of `p0 p1 p2` under SoS: `+1` counter-clockwise, `-1`
/// clockwise, never 0. Ids must be distinct; this is only debug-checked,
/// see [`try_orient2_sos`].
pub fn orient2_sos(p0: [i64; 2], p1: [i64; 2], p2: [i64; 2], id0: i64, id1: i64, id2: i64) -> i32 {
    debug_assert!(id0 != id1 && id1 != id2 && id0 != id2);
    let d = det3(p0, p1, p2);
    if d != 0 {
        return sign(d);
    }
    let mut rows = [
        (rank_key(id0), p0),
        (rank_key(id1), p1),
        (rank_key(id2), p2),
    ];
    let mut odd = false;
    // three-element sort network, tracking transposition parity
    for (x, y) in [(0, 1), (1, 2), (0, 1)] {
        if rows[x].0 > rows[y].0 {
            rows.swap(x, y);
            odd = !odd;
        }
    }
    let s = sos_sorted(rows[0].1, rows[1].1, rows[2].1);
    if odd {
        -s
    } else {
        s
    }
}

pub fn try_orient2_sos(
    p0: [i64; 2],
    p1: [i64; 2],
    p2: [i64; 2],
    id0: i64,
    id1: i64,
    id2: i64,
) -> Result<i32> {
    if id0 == id1 || id1 == id2 || id0 == id2 {
        return Err(Error::InvalidParam(format!(
            "orientation ids must be distinct, got ({id0}, {id1}, {id2})"
        )));
    }
    Ok(orient2_sos(p0, p1, p2, id0, id1, id2))
}

/// True iff the (perturbed) origin lies inside the triangle of the three
/// value vectors.
pub fn values_have_cp(vals: [[i64; 2]; 3], ids: [i64; 3]) -> bool {
    let [a, b, c] = vals;
    // separating axis: a strict common sign on either component rules out the
    // origin for every infinitesimal perturbation
    if (a[0] > 0 && b[0] > 0 && c[0] > 0)
        || (a[0] < 0 && b[0] < 0 && c[0] < 0)
        || (a[1] > 0 && b[1] > 0 && c[1] > 0)
        || (a[1] < 0 && b[1] < 0 && c[1] < 0)
    {
        return false;
    }
    let [ia, ib, ic] = ids;
    let o = [0, 0];
    let s = orient2_sos(a, b, c, ia, ib, ic);
    orient2_sos(o, b, c, ORIGIN_ID, ib, ic) == s
        && orient2_sos(a, o, c, ia, ORIGIN_ID, ic) == s
        && orient2_sos(a, b, o, ia, ib, ORIGIN_ID) == s
}

/// Face-level critical point test on the values stored in `u`, `v`.
#[inline]
pub fn face_has_cp_in(f: FaceKey, u: &[i64], v: &[i64]) -> bool {
    let [a, b, c] = f.vertices();
    values_have_cp(
        [[u[a], v[a]], [u[b], v[b]], [u[c], v[c]]],
        [a as i64, b as i64, c as i64],
    )
}

pub fn face_has_cp(f: FaceKey, ff: &FixedField) -> bool {
    face_has_cp_in(f, &ff.u, &ff.v)
}

/// Exact barycentric coordinates `num[k] / den` of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Barycentric {
    pub num: [i128; 3],
    pub den: i128,
}

impl Barycentric {
    pub fn weights(&self) -> [f64; 3] {
        self.num.map(|n| n as f64 / self.den as f64)
    }

    /// Combination `Σ w_k · p_k` of three points.
    pub fn combine(&self, p: [[f64; 3]; 3]) -> [f64; 3] {
        let w = self.weights();
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = w[0] * p[0][k] + w[1] * p[1][k] + w[2] * p[2][k];
        }
        out
    }
}

/// Barycentric coordinates of the origin with respect to the value triangle
/// `abc`: `(det(b,c), det(c,a), det(a,b)) / D`.
///
/// A crossing found only through symbolic perturbation can sit on a
/// degenerate value triangle with `D = 0`; the centroid is returned there.
pub fn origin_barycentric(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> Barycentric {
    let num = [det2(b, c), det2(c, a), det2(a, b)];
    let den = num[0] + num[1] + num[2];
    if den == 0 {
        return Barycentric {
            num: [1, 1, 1],
            den: 3,
        };
    }
    if den < 0 {
        Barycentric {
            num: num.map(|x| -x),
            den: -den,
        }
    } else {
        Barycentric { num, den }
    }
}

/// Faces whose predicate holds on the original data, split into faces lying
/// in one time slice and faces spanning a slab.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CriticalFaceSet {
    pub slice: HashSet<FaceKey>,
    pub slab: HashSet<FaceKey>,
}

impl CriticalFaceSet {
    pub fn contains(&self, f: &FaceKey) -> bool {
        self.slice.contains(f) || self.slab.contains(f)
    }

    pub fn len(&self) -> usize {
        self.slice.len() + self.slab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &FaceKey> {
        self.slice.iter().chain(&self.slab)
    }

    /// Every vertex of every member face, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.iter().flat_map(|f| f.vertices()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

pub fn build_critical_face_set(ff: &FixedField) -> CriticalFaceSet {
    build_critical_face_set_in(&ff.dims, &ff.u, &ff.v)
}

pub fn build_critical_face_set_in(dims: &Dims, u: &[i64], v: &[i64]) -> CriticalFaceSet {
    let mut set = CriticalFaceSet::default();
    for_each_face(dims, |f| {
        if face_has_cp_in(f, u, v) {
            if f.is_slice(dims) {
                set.slice.insert(f);
            } else {
                set.slab.insert(f);
            }
        }
    });
    set
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mesh::{for_each_tet, tet_faces};

    /// Independent SoS oracle: expands the perturbed determinant with
    /// ε = 2^-64 using exact big integers. Point of rank r gets
    /// (x + ε^(2·4^r), y + ε^(4^r)); exponents stay below 64, so scaling by
    /// 2^(64·48) makes every entry integral, and ε = 2^-64 is small enough
    /// for the sign to match the symbolic limit on 31-bit inputs.
    fn oracle_orient(pts: [[i64; 2]; 3], ids: [i64; 3]) -> i32 {
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&k| rank_key(ids[k]));
        let mut rank = [0u32; 3];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r as u32;
        }
        let big = |x: i64, exp: u32| -> BigInt {
            // (x + 2^(-64·exp)) · 2^(64·48)
            (BigInt::from(x) << (64 * 48)) + (BigInt::from(1) << (64 * (48 - exp as usize)))
        };
        let one: BigInt = BigInt::from(1) << (64 * 48);
        let m: Vec<[BigInt; 3]> = (0..3)
            .map(|k| {
                let r = rank[k];
                [
                    big(pts[k][0], 2 * 4u32.pow(r)),
                    big(pts[k][1], 4u32.pow(r)),
                    one.clone(),
                ]
            })
            .collect();
        let d = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        match d.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => panic!("oracle determinant vanished"),
        }
    }

    fn oracle_has_cp(vals: [[i64; 2]; 3], ids: [i64; 3]) -> bool {
        let s = oracle_orient(vals, ids);
        (0..3).all(|k| {
            let mut p = vals;
            let mut q = ids;
            p[k] = [0, 0];
            q[k] = ORIGIN_ID;
            oracle_orient(p, q) == s
        })
    }

    #[test]
    fn ccw_triangle() {
        assert_eq!(orient2_sos([0, 0], [1, 0], [0, 1], 4, 9, 2), 1);
        assert_eq!(orient2_sos([0, 0], [0, 1], [1, 0], 4, 9, 2), -1);
        assert!(try_orient2_sos([0, 0], [1, 0], [0, 1], 1, 1, 2).is_err());
    }

    #[test]
    fn collinear_is_decided_and_antisymmetric() {
        let p = [[0, 0], [1, 1], [2, 2]];
        let s = orient2_sos(p[0], p[1], p[2], 0, 1, 2);
        assert_ne!(s, 0);
        assert_eq!(s, oracle_orient(p, [0, 1, 2]));
        assert_eq!(orient2_sos(p[1], p[0], p[2], 1, 0, 2), -s);
        assert_eq!(orient2_sos(p[0], p[2], p[1], 0, 2, 1), -s);
        assert_eq!(orient2_sos(p[1], p[2], p[0], 1, 2, 0), s);
    }

    #[test]
    fn all_equal_points_use_deep_terms() {
        for ids in [[0, 1, 2], [2, 0, 1], [5, -1, 3], [-1, 7, 4]] {
            let p = [[3, 3], [3, 3], [3, 3]];
            assert_eq!(
                orient2_sos(p[0], p[1], p[2], ids[0], ids[1], ids[2]),
                oracle_orient(p, ids)
            );
        }
    }

    #[test]
    fn inside_example() {
        let vals = [[1, 0], [-1, 1], [-1, -1]];
        assert!(values_have_cp(vals, [0, 1, 2]));
        assert!(!values_have_cp([[1, 0], [2, 1], [3, -1]], [0, 1, 2]));
        let b = origin_barycentric(vals[0], vals[1], vals[2]);
        assert_eq!(b.num.map(|x| x as f64 / b.den as f64), [0.5, 0.25, 0.25]);
        assert_eq!(b.num.iter().sum::<i128>(), b.den);
    }

    #[test]
    fn symmetric_triangle_has_equal_weights() {
        // (1, 0), (-1/2, ±√3/2) scaled to integers, within rounding
        let s = 1 << 20;
        let h = (0.75f64.sqrt() * s as f64).round() as i64;
        let b = origin_barycentric([s, 0], [-s / 2, h], [-s / 2, -h]);
        for w in b.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_vertex_is_consistent_under_relabelling() {
        let vals = [[0, 0], [5, -3], [-2, 7]];
        let ids = [10, 3, 8];
        let base = values_have_cp(vals, ids);
        assert_eq!(base, values_have_cp(vals, ids));
        for perm in [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            let v = perm.map(|k| vals[k]);
            let i = perm.map(|k| ids[k]);
            assert_eq!(values_have_cp(v, i), base);
        }
        assert_eq!(base, oracle_has_cp(vals, ids));
    }

    #[test]
    fn zero_vertex_belongs_to_exactly_one_fan_triangle() {
        // a regular value with a zero at the centre of a 6-triangle fan
        let u = [
            [0i64, 0],
            [4, 1],
            [3, 5],
            [-2, 4],
            [-5, -1],
            [-1, -6],
            [4, -3],
        ];
        let mut hits = 0;
        for k in 1..=6 {
            let n = if k == 6 { 1 } else { k + 1 };
            if values_have_cp([u[0], u[k], u[n]], [0, k as i64, n as i64]) {
                hits += 1;
            }
        }
        assert_eq!(hits, 1);
    }

    fn random_value(rng: &mut ChaCha8Rng, degenerate: bool) -> i64 {
        if degenerate {
            rng.gen_range(-2..=2)
        } else {
            rng.gen_range(-(1i64 << 30) + 1..(1i64 << 30))
        }
    }

    #[test]
    fn agrees_with_oracle_on_random_degenerate_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20_000 {
            let deg = rng.gen_bool(0.7);
            let mut vals = [[0i64; 2]; 3];
            for p in vals.iter_mut() {
                *p = [random_value(&mut rng, deg), random_value(&mut rng, deg)];
            }
            if rng.gen_bool(0.2) {
                vals[2] = vals[0];
            }
            let mut ids = [0i64; 3];
            loop {
                for id in ids.iter_mut() {
                    *id = rng.gen_range(0..6);
                }
                if ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
                    break;
                }
            }
            assert_eq!(
                values_have_cp(vals, ids),
                oracle_has_cp(vals, ids),
                "{vals:?} {ids:?}"
            );
        }
    }

    #[test]
    fn per_tet_crossings_are_even() {
        let dims = Dims::new(5, 5, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u: Vec<i64> = (0..dims.len()).map(|_| rng.gen_range(-2..=2)).collect();
            let v: Vec<i64> = (0..dims.len()).map(|_| rng.gen_range(-2..=2)).collect();
            for_each_tet(&dims, |tet| {
                let n = tet_faces(&tet)
                    .iter()
                    .filter(|&&f| face_has_cp_in(f, &u, &v))
                    .count();
                assert!(n == 0 || n == 2, "{tet:?} has {n} crossings");
            });
        }
    }

    #[test]
    fn constant_field_has_no_critical_faces() {
        let dims = Dims::new(4, 4, 3).unwrap();
        let u = vec![7; dims.len()];
        let v = vec![-2; dims.len()];
        assert!(build_critical_face_set_in(&dims, &u, &v).is_empty());
    }

    proptest! {
        #[test]
        fn never_zero_and_antisymmetric(
            pts in proptest::array::uniform3(proptest::array::uniform2(-4i64..4)),
            ids in proptest::sample::subsequence((-1i64..8).collect::<Vec<_>>(), 3),
        ) {
            let (a, b, c) = (pts[0], pts[1], pts[2]);
            let s = orient2_sos(a, b, c, ids[0], ids[1], ids[2]);
            prop_assert!(s == 1 || s == -1);
            prop_assert_eq!(orient2_sos(b, a, c, ids[1], ids[0], ids[2]), -s);
            prop_assert_eq!(orient2_sos(b, c, a, ids[1], ids[2], ids[0]), s);
            prop_assert_eq!(s, oracle_orient(pts, [ids[0], ids[1], ids[2]]));
        }

        #[test]
        fn positive_faces_have_interior_weights(
            pts in proptest::array::uniform3(proptest::array::uniform2(-1000i64..1000)),
        ) {
            if values_have_cp(pts, [0, 1, 2]) {
                let b = origin_barycentric(pts[0], pts[1], pts[2]);
                let d = det3(pts[0], pts[1], pts[2]);
                if d != 0 && b.num.iter().all(|&x| x != 0) {
                    prop_assert!(b.num.iter().all(|&x| x > 0 && x < b.den));
                }
                prop_assert_eq!(b.num.iter().sum::<i128>(), b.den);
            }
        }
    }
}
