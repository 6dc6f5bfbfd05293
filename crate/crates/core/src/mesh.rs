//! Implicit space-time simplicial mesh over the regular grid.
//!
//! Each grid cell is split along its `(i, j)–(i+1, j+1)` diagonal into two
//! triangles. Every triangle is extruded over each time slab `[t, t+1]` into a
//! prism, and the prism is cut into three tetrahedra. With the triangle's
//! vertices `a < b < c` in global index order and primes denoting the copy at
//! `t + 1`:
//!
//! ```text
//! τ1 = (a, b, c, c')   τ2 = (a, b, b', c')   τ3 = (a, a', b', c')
//! ```
//!
//! Every quad wall of a prism is cut along the diagonal from its lower-index
//! vertex at `t` to its higher-index vertex at `t + 1`, so neighbouring
//! prisms agree on shared walls and the mesh is conforming.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::Dims;

pub type VertexId = usize;

/// A triangular face identified by its sorted vertex triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceKey([VertexId; 3]);

impl FaceKey {
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Self {
        let mut k = [a, b, c];
        k.sort_unstable();
        debug_assert!(k[0] < k[1] && k[1] < k[2], "degenerate face {k:?}");
        FaceKey(k)
    }

    #[inline]
    pub fn vertices(&self) -> [VertexId; 3] {
        self.0
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// True when all three vertices lie in one time slice.
    pub fn is_slice(&self, dims: &Dims) -> bool {
        let fl = dims.frame_len();
        self.0[0] / fl == self.0[2] / fl
    }
}

/// A tetrahedron of the space-time mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tet(pub [VertexId; 4]);

impl Tet {
    pub fn faces(&self) -> [FaceKey; 4] {
        tet_faces(self)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }
}

/// Sorted vertex triple of a same-time triangle.
pub type Triangle = [VertexId; 3];

/// The two triangles of cell `(i, j)` at frame `t`: `(v00, v01, v11)` and
/// `(v00, v10, v11)`, where `v10` is the column neighbour and `v01` the row
/// neighbour.
pub fn cell_triangles(dims: &Dims, i: usize, j: usize, t: usize) -> Result<(Triangle, Triangle)> {
    if i + 1 >= dims.h || j + 1 >= dims.w || t >= dims.t {
        return Err(Error::InvalidParam(format!(
            "cell ({i}, {j}, {t}) outside {}x{}x{}",
            dims.h, dims.w, dims.t
        )));
    }
    Ok(cell_triangles_unchecked(dims, i, j, t))
}

#[inline]
fn cell_triangles_unchecked(dims: &Dims, i: usize, j: usize, t: usize) -> (Triangle, Triangle) {
    let v00 = dims.vid(t, i, j);
    let v10 = v00 + 1;
    let v01 = v00 + dims.w;
    let v11 = v01 + 1;
    ([v00, v01, v11], [v00, v10, v11])
}

/// The three tetrahedra of the prism above `tri` (a triangle at frame `t`).
pub fn prism_tets(dims: &Dims, tri: Triangle, t: usize) -> Result<[Tet; 3]> {
    if t + 1 >= dims.t {
        return Err(Error::InvalidParam(format!(
            "no slab above frame {t} of {}",
            dims.t
        )));
    }
    Ok(prism_tets_unchecked(dims, tri))
}

#[inline]
fn prism_tets_unchecked(dims: &Dims, mut tri: Triangle) -> [Tet; 3] {
    tri.sort_unstable();
    let [a, b, c] = tri;
    let up = dims.frame_len();
    let (a1, b1, c1) = (a + up, b + up, c + up);
    [
        Tet([a, b, c, c1]),
        Tet([a, b, b1, c1]),
        Tet([a, a1, b1, c1]),
    ]
}

pub fn tet_faces(tet: &Tet) -> [FaceKey; 4] {
    let [p, q, r, s] = tet.0;
    [
        FaceKey::new(p, q, r),
        FaceKey::new(p, q, s),
        FaceKey::new(p, r, s),
        FaceKey::new(q, r, s),
    ]
}

/// Visits every tetrahedron of the mesh, slab by slab.
pub fn for_each_tet(dims: &Dims, mut f: impl FnMut(Tet)) {
    for t in 0..dims.t - 1 {
        for_each_tet_in_slab(dims, t, &mut f);
    }
}

/// Visits the tetrahedra of slab `[t, t+1]`.
pub fn for_each_tet_in_slab(dims: &Dims, t: usize, mut f: impl FnMut(Tet)) {
    for i in 0..dims.h - 1 {
        for j in 0..dims.w - 1 {
            let (x, y) = cell_triangles_unchecked(dims, i, j, t);
            for tri in [x, y] {
                for tet in prism_tets_unchecked(dims, tri) {
                    f(tet);
                }
            }
        }
    }
}

pub fn tet_count(dims: &Dims) -> usize {
    6 * (dims.h - 1) * (dims.w - 1) * (dims.t - 1)
}

/// Visits every face of the mesh exactly once, without hashing.
///
/// Slice faces are the cell triangles of every frame. A slab contributes the
/// two prism-interior faces `(a, b, c')`, `(a, b', c')` of each triangle and
/// the two wall faces `(p, q, q')`, `(p, p', q')` of each spatial edge `p < q`.
pub fn for_each_face(dims: &Dims, mut f: impl FnMut(FaceKey)) {
    let up = dims.frame_len();
    for t in 0..dims.t {
        for i in 0..dims.h - 1 {
            for j in 0..dims.w - 1 {
                let (x, y) = cell_triangles_unchecked(dims, i, j, t);
                f(FaceKey(x));
                f(FaceKey(y));
            }
        }
    }
    for t in 0..dims.t - 1 {
        let mut wall = |p: VertexId, q: VertexId| {
            f(FaceKey([p, q, q + up]));
            f(FaceKey([p, p + up, q + up]));
        };
        for i in 0..dims.h {
            for j in 0..dims.w {
                let p = dims.vid(t, i, j);
                if j + 1 < dims.w {
                    wall(p, p + 1);
                }
                if i + 1 < dims.h {
                    wall(p, p + dims.w);
                    if j + 1 < dims.w {
                        wall(p, p + dims.w + 1);
                    }
                }
            }
        }
        for i in 0..dims.h - 1 {
            for j in 0..dims.w - 1 {
                let (x, y) = cell_triangles_unchecked(dims, i, j, t);
                for [a, b, c] in [x, y] {
                    f(FaceKey([a, b, c + up]));
                    f(FaceKey([a, b + up, c + up]));
                }
            }
        }
    }
}

/// All faces containing `v`, over the tetrahedra of slabs `[t−1, t]` and
/// `[t, t+1]`, deduplicated. This is the reference definition; the codec
/// uses the equivalent precomputed [`IncidenceTable`].
pub fn incident_faces(dims: &Dims, v: VertexId) -> Vec<FaceKey> {
    let (t, i, j) = dims.coords(v);
    let mut out: Vec<FaceKey> = Vec::with_capacity(40);
    let slabs = [t.checked_sub(1), (t + 1 < dims.t).then_some(t)];
    for slab in slabs.into_iter().flatten() {
        for ci in i.saturating_sub(1)..=i {
            for cj in j.saturating_sub(1)..=j {
                if ci + 1 >= dims.h || cj + 1 >= dims.w {
                    continue;
                }
                let (x, y) = cell_triangles_unchecked(dims, ci, cj, slab);
                for tri in [x, y] {
                    for tet in prism_tets_unchecked(dims, tri) {
                        if !tet.contains(v) {
                            continue;
                        }
                        for face in tet_faces(&tet) {
                            if face.contains(v) && !out.contains(&face) {
                                out.push(face);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Offset of a vertex relative to another, as `(dt, di, dj)`.
pub type Offset = (i32, i32, i32);

/// Incident-face pattern of an interior vertex, expressed as offsets of the
/// two other face vertices. A face is present at a boundary vertex exactly
/// when all its vertices are inside the grid.
#[derive(Debug, Clone)]
pub struct IncidenceTable {
    pairs: Vec<(Offset, Offset)>,
}

impl IncidenceTable {
    pub fn new() -> Self {
        let dims = Dims { h: 5, w: 5, t: 3 };
        let center = dims.vid(1, 2, 2);
        let off = |id: VertexId| -> Offset {
            let (t, i, j) = dims.coords(id);
            (t as i32 - 1, i as i32 - 2, j as i32 - 2)
        };
        let pairs = incident_faces(&dims, center)
            .into_iter()
            .map(|f| {
                let mut others = f.vertices().into_iter().filter(|&x| x != center);
                let p = others.next().unwrap();
                let q = others.next().unwrap();
                (off(p), off(q))
            })
            .collect();
        Self { pairs }
    }

    /// Number of faces around an interior vertex.
    pub fn interior_count(&self) -> usize {
        self.pairs.len()
    }

    /// Calls `f(p, q)` with the two other vertices of every face incident to
    /// `(t, i, j)`.
    #[inline]
    pub fn for_each(
        &self,
        dims: &Dims,
        t: usize,
        i: usize,
        j: usize,
        mut f: impl FnMut(VertexId, VertexId),
    ) {
        let at = |o: Offset| -> Option<VertexId> {
            let tt = t as i64 + o.0 as i64;
            let ii = i as i64 + o.1 as i64;
            let jj = j as i64 + o.2 as i64;
            if tt < 0
                || ii < 0
                || jj < 0
                || tt >= dims.t as i64
                || ii >= dims.h as i64
                || jj >= dims.w as i64
            {
                None
            } else {
                Some(dims.vid(tt as usize, ii as usize, jj as usize))
            }
        };
        for &(a, b) in &self.pairs {
            if let (Some(p), Some(q)) = (at(a), at(b)) {
                f(p, q);
            }
        }
    }

    pub fn faces(&self, dims: &Dims, v: VertexId) -> Vec<FaceKey> {
        let (t, i, j) = dims.coords(v);
        let mut out = Vec::with_capacity(self.pairs.len());
        self.for_each(dims, t, i, j, |p, q| out.push(FaceKey::new(v, p, q)));
        out.sort_unstable();
        out
    }
}

impl Default for IncidenceTable {
    fn default() -> Self {
        Self::new()
    }
}

/// All distinct faces, by scanning every tetrahedron. Test oracle for
/// [`for_each_face`].
pub fn faces_by_tet_scan(dims: &Dims) -> HashSet<FaceKey> {
    let mut set = HashSet::new();
    for_each_tet(dims, |tet| set.extend(tet_faces(&tet)));
    set
}
