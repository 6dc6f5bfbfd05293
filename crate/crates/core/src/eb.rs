//! Per-face error bounds that keep a face's critical point test unchanged,
//! and the per-vertex minimum over all incident faces.
//!
//! The triangle bound assumes only vertex 2 moves while vertices 0 and 1 stay
//! put. The codec therefore derives each vertex bound against the current
//! state of its neighbours (already reconstructed ones carry their final
//! values), so every perturbation step is covered by the bound it was
//! derived under.

use crate::field::Dims;
use crate::mesh::IncidenceTable;

#[inline]
fn strict_sign(a: i64, b: i64, c: i64) -> bool {
    (a > 0 && b > 0 && c > 0) || (a < 0 && b < 0 && c < 0)
}

/// Real-valued triangle bound for values `(u_k, v_k)`, vertex 2 being the
/// one that moves. Any perturbation of vertex 2 strictly smaller than the
/// result in every component preserves the face predicate.
///
/// The determinant part returns 0 on its degenerate cases (`M = 0` or a
/// vanishing fixed vertex); the same-sign clauses still apply afterwards.
pub fn derive_triangle_eb(u: [i64; 3], v: [i64; 3]) -> f64 {
    let [u0, u1, u2] = u.map(|x| x as i128);
    let [v0, v1, v2] = v.map(|x| x as i128);
    let m0 = u2 * v0 - u0 * v2;
    let m1 = u1 * v2 - u2 * v1;
    let m2 = u0 * v1 - u1 * v0;
    let m = m0 + m1 + m2;
    let det_part = (|| {
        if m == 0 {
            return 0.0;
        }
        let d = (u1 - u0).abs() + (v0 - v1).abs();
        let mut eb = if d == 0 {
            f64::INFINITY
        } else {
            m.abs() as f64 / d as f64
        };
        let n1 = u1.abs() + v1.abs();
        if n1 == 0 {
            return 0.0;
        }
        eb = eb.min(m1.abs() as f64 / n1 as f64);
        let n0 = u0.abs() + v0.abs();
        if n0 == 0 {
            return 0.0;
        }
        eb.min(m0.abs() as f64 / n0 as f64)
    })();
    let mut eb = det_part;
    if strict_sign(u[0], u[1], u[2]) {
        eb = eb.max(u2.abs() as f64);
    }
    if strict_sign(v[0], v[1], v[2]) {
        eb = eb.max(v2.abs() as f64);
    }
    eb
}

/// Largest integer strictly below `n / d` for `n, d > 0`.
#[inline]
fn below(n: i128, d: i128) -> i64 {
    ((n - 1) / d).min(i64::MAX as i128) as i64
}

/// Largest integer perturbation strictly inside [`derive_triangle_eb`],
/// evaluated exactly. `cap` short-circuits: the result is only exact when it
/// is below `cap`; otherwise some value `≥ cap` is returned.
#[inline]
pub fn triangle_bound(u: [i64; 3], v: [i64; 3], cap: i64) -> i64 {
    let mut same = -1i64;
    if strict_sign(u[0], u[1], u[2]) {
        same = same.max(u[2].abs() - 1);
    }
    if strict_sign(v[0], v[1], v[2]) {
        same = same.max(v[2].abs() - 1);
    }
    if same >= cap {
        return same;
    }
    let det = det_bound(u, v, cap);
    det.max(same).max(0)
}

#[inline]
fn det_bound(u: [i64; 3], v: [i64; 3], cap: i64) -> i64 {
    let [u0, u1, u2] = u.map(|x| x as i128);
    let [v0, v1, v2] = v.map(|x| x as i128);
    let m0 = (u2 * v0 - u0 * v2).abs();
    let m1 = (u1 * v2 - u2 * v1).abs();
    let m2 = u0 * v1 - u1 * v0;
    let m = (u2 * v0 - u0 * v2) + (u1 * v2 - u2 * v1) + m2;
    if m == 0 {
        return 0;
    }
    let m = m.abs();
    let n1 = u1.abs() + v1.abs();
    let n0 = u0.abs() + v0.abs();
    if n1 == 0 || n0 == 0 {
        return 0;
    }
    let cap = cap as i128;
    let mut eb = cap;
    // floor((n-1)/d) < eb  <=>  n <= eb·d
    for (n, d) in [(m, (u1 - u0).abs() + (v0 - v1).abs()), (m1, n1), (m0, n0)] {
        if d != 0 && n <= eb * d {
            if n == 0 {
                return 0;
            }
            eb = below(n, d) as i128;
        }
    }
    eb as i64
}

/// Error-bound cap `τ′` in fixed units: the largest integer with
/// `τ′ + 1/2 ≤ ε·S`, so a reconstruction within `τ′` of the rounded sample is
/// within `ε` of the original float. Capped below `2^30`.
pub fn tau_prime(eps: f64, scale_factor: f64) -> i64 {
    let t = (eps * scale_factor - 0.5).floor();
    if !(t >= 0.0) {
        return 0;
    }
    t.min(((1i64 << 30) - 1) as f64) as i64
}

/// Bound for vertex `v = (t, i, j)` against the values in `u`, `v`: the
/// minimum of `tau` and every incident face's [`triangle_bound`]. Callers
/// handle faces with a crossing (their vertices are stored losslessly).
pub fn derive_vertex_eb(
    dims: &Dims,
    table: &IncidenceTable,
    u: &[i64],
    v: &[i64],
    t: usize,
    i: usize,
    j: usize,
    tau: i64,
) -> i64 {
    let id = dims.vid(t, i, j);
    let (uc, vc) = (u[id], v[id]);
    let mut xi = tau;
    table.for_each(dims, t, i, j, |p, q| {
        if xi == 0 {
            return;
        }
        let b = triangle_bound([u[p], u[q], uc], [v[p], v[q], vc], xi);
        if b < xi {
            xi = b;
        }
    });
    xi
}

/// Quantized per-vertex bound: `e_q = τ′ >> k`, or stored losslessly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EbCode {
    Level(u8),
    Lossless,
}

pub const DEFAULT_K_MAX: u8 = 30;

impl EbCode {
    /// Symbol in the entropy-coded stream: 0 for lossless, `k + 1` otherwise.
    pub fn symbol(self) -> u32 {
        match self {
            EbCode::Lossless => 0,
            EbCode::Level(k) => k as u32 + 1,
        }
    }

    pub fn from_symbol(s: u32, k_max: u8) -> Option<Self> {
        match s {
            0 => Some(EbCode::Lossless),
            s if s - 1 <= k_max as u32 => Some(EbCode::Level((s - 1) as u8)),
            _ => None,
        }
    }

    pub fn bound(self, tau: i64) -> i64 {
        match self {
            EbCode::Lossless => 0,
            EbCode::Level(k) => tau >> k,
        }
    }
}

/// Smallest `k` with `τ′ / 2^k ≤ ξ`. Lossless when `ξ = 0`, when `k` would
/// exceed `k_max`, or when the integer bound `τ′ >> k` is 0.
pub fn quantize_eb(xi: i64, tau: i64, k_max: u8) -> EbCode {
    debug_assert!((0..=tau).contains(&xi), "xi {xi} outside [0, {tau}]");
    if xi <= 0 || tau <= 0 {
        return EbCode::Lossless;
    }
    let mut k = 0u8;
    while tau > xi << k {
        k += 1;
        if k > k_max {
            return EbCode::Lossless;
        }
    }
    if tau >> k == 0 {
        EbCode::Lossless
    } else {
        EbCode::Level(k)
    }
}
