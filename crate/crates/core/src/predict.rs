//! Lorenzo and semi-Lagrangian predictors over reconstructed fixed-point
//! frames.

use crate::field::{Scale, Spacing};

/// 7-point Lorenzo prediction at `(i, j)` of a frame with `w` columns.
/// `cur` holds the reconstructed current frame (only causal positions are
/// read), `prev` the previous frame if any. Out-of-range neighbours read 0.
#[inline]
pub fn lorenzo3d(cur: &[i64], prev: Option<&[i64]>, w: usize, i: usize, j: usize) -> i64 {
    let k = i * w + j;
    let up = i > 0;
    let left = j > 0;
    let mut p = 0i64;
    if up {
        p += cur[k - w];
    }
    if left {
        p += cur[k - 1];
    }
    if up && left {
        p -= cur[k - w - 1];
    }
    if let Some(prev) = prev {
        p += prev[k];
        if up {
            p -= prev[k - w];
        }
        if left {
            p -= prev[k - 1];
        }
        if up && left {
            p += prev[k - w - 1];
        }
    }
    p
}

/// Bilinear sample of an `h × w` frame at fractional `(i_f, j_f)`, clamped to
/// the domain and rounded half away from zero.
#[inline]
pub fn bilinear(frame: &[i64], h: usize, w: usize, i_f: f64, j_f: f64) -> i64 {
    bilinear_f(frame, h, w, i_f, j_f).round() as i64
}

#[inline]
fn bilinear_f(frame: &[i64], h: usize, w: usize, i_f: f64, j_f: f64) -> f64 {
    let i_f = i_f.clamp(0.0, (h - 1) as f64);
    let j_f = j_f.clamp(0.0, (w - 1) as f64);
    let i0 = i_f.floor() as usize;
    let j0 = j_f.floor() as usize;
    let i1 = (i0 + 1).min(h - 1);
    let j1 = (j0 + 1).min(w - 1);
    let a = i_f - i0 as f64;
    let b = j_f - j0 as f64;
    let f = |i: usize, j: usize| frame[i * w + j] as f64;
    (1.0 - a) * ((1.0 - b) * f(i0, j0) + b * f(i0, j1))
        + a * ((1.0 - b) * f(i1, j0) + b * f(i1, j1))
}

/// Grid cells travelled per time step per fixed-point unit of velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflFactors {
    pub cfl_x: f64,
    pub cfl_y: f64,
}

impl CflFactors {
    pub fn new(spacing: Spacing, scale: Scale) -> Self {
        let s = scale.factor();
        Self {
            cfl_x: spacing.dt / spacing.dx / s,
            cfl_y: spacing.dt / spacing.dy / s,
        }
    }
}

/// Backtracking parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlParams {
    pub cfl: CflFactors,
    /// Displacement (cells) above which RK2 gives way to Euler substeps.
    pub d_max: f64,
    pub n_max: u32,
}

pub const DEFAULT_D_MAX: f64 = 2.0;
pub const DEFAULT_N_MAX: u32 = 32;

/// Departure point of grid point `(i, j)`, backtracked one step through the
/// previous frame's velocity `(pu, pv)`.
pub fn sl_departure(
    pu: &[i64],
    pv: &[i64],
    h: usize,
    w: usize,
    i: usize,
    j: usize,
    p: &SlParams,
) -> (f64, f64) {
    let (cx, cy) = (p.cfl.cfl_x, p.cfl.cfl_y);
    let hi = (h - 1) as f64;
    let wj = (w - 1) as f64;
    let k = i * w + j;
    let (u0, v0) = (pu[k] as f64, pv[k] as f64);
    let d_inf = (u0.abs() * cx).max(v0.abs() * cy);
    let (fi, fj) = (i as f64, j as f64);
    if d_inf <= p.d_max {
        let ih = (fi - 0.5 * v0 * cy).clamp(0.0, hi);
        let jh = (fj - 0.5 * u0 * cx).clamp(0.0, wj);
        let uh = bilinear(pu, h, w, ih, jh) as f64;
        let vh = bilinear(pv, h, w, ih, jh) as f64;
        ((fi - vh * cy).clamp(0.0, hi), (fj - uh * cx).clamp(0.0, wj))
    } else {
        let n = ((d_inf / p.d_max).ceil() as u32).clamp(1, p.n_max.max(1));
        let dt = 1.0 / n as f64;
        let (mut si, mut sj) = (fi, fj);
        for _ in 0..n {
            let us = bilinear(pu, h, w, si, sj) as f64;
            let vs = bilinear(pv, h, w, si, sj) as f64;
            si = (si - dt * vs * cy).clamp(0.0, hi);
            sj = (sj - dt * us * cx).clamp(0.0, wj);
        }
        (si, sj)
    }
}

/// Semi-Lagrangian predictions of both components for every point of a
/// frame, from the reconstructed previous frame alone.
pub fn sl_predict_frame(
    pu: &[i64],
    pv: &[i64],
    h: usize,
    w: usize,
    p: &SlParams,
    out_u: &mut [i64],
    out_v: &mut [i64],
) {
    for i in 0..h {
        for j in 0..w {
            let (di, dj) = sl_departure(pu, pv, h, w, i, j, p);
            out_u[i * w + j] = bilinear(pu, h, w, di, dj);
            out_v[i * w + j] = bilinear(pv, h, w, di, dj);
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn params(cx: f64, cy: f64) -> SlParams {
        SlParams {
            cfl: CflFactors {
                cfl_x: cx,
                cfl_y: cy,
            },
            d_max: DEFAULT_D_MAX,
            n_max: DEFAULT_N_MAX,
        }
    }

    #[test]
    fn lorenzo_constant_and_origin() {
        let c = vec![5i64; 9];
        assert_eq!(lorenzo3d(&c, Some(&c), 3, 1, 1), 5);
        assert_eq!(lorenzo3d(&c, Some(&c), 3, 0, 0), 5);
        assert_eq!(lorenzo3d(&c, None, 3, 0, 0), 0);
        assert_eq!(lorenzo3d(&c, None, 3, 2, 2), 5);
    }

    proptest! {
        #[test]
        fn lorenzo_exact_on_linear_fields(a in -50i64..50, b in -50i64..50, g in -50i64..50, c in -100i64..100) {
            let (h, w) = (4, 5);
            let frame = |t: i64| -> Vec<i64> {
                (0..h * w).map(|k| a * (k / w) as i64 + b * (k % w) as i64 + g * t + c).collect()
            };
            let (f0, f1) = (frame(0), frame(1));
            for i in 1..h {
                for j in 1..w {
                    prop_assert_eq!(lorenzo3d(&f1, Some(&f0), w, i, j), f1[i * w + j]);
                }
            }
        }
    }

    #[test]
    fn bilinear_cases() {
        let f = vec![0, 0, 4, 4];
        assert_eq!(bilinear(&f, 2, 2, 0.5, 0.5), 2);
        assert_eq!(bilinear(&f, 2, 2, 1.0, 0.0), 4);
        assert_eq!(bilinear(&f, 2, 2, -0.7, 0.3), 0);
        assert_eq!(bilinear(&f, 2, 2, 9.0, 9.0), 4);
        let g = vec![0, 0, -3, -3];
        assert_eq!(bilinear(&g, 2, 2, 0.5, 0.0), -2);
    }

    #[test]
    fn zero_velocity_stays_put() {
        let z = vec![0i64; 20];
        assert_eq!(
            sl_departure(&z, &z, 4, 5, 2, 3, &params(0.1, 0.1)),
            (2.0, 3.0)
        );
    }

    #[test]
    fn constant_velocity_rk2_is_exact_backtrace() {
        let (h, w) = (10, 10);
        let u = vec![8i64; h * w];
        let v = vec![-4i64; h * w];
        let p = params(0.125, 0.25);
        let (di, dj) = sl_departure(&u, &v, h, w, 5, 5, &p);
        assert_eq!((di, dj), (5.0 + 4.0 * 0.25, 5.0 - 8.0 * 0.125));
    }

    #[test]
    fn large_displacement_uses_substeps() {
        let (h, w) = (20, 20);
        let u = vec![50i64; h * w];
        let v = vec![0i64; h * w];
        // d_inf = 5 > 2: three substeps telescope to one Euler step
        let p = params(0.1, 0.1);
        let (di, dj) = sl_departure(&u, &v, h, w, 10, 12, &p);
        assert_eq!(di, 10.0);
        assert!((dj - 7.0).abs() < 1e-12);
        let (_, dj) = sl_departure(&u, &v, h, w, 10, 3, &p);
        assert_eq!(dj, 0.0);
    }

    #[test]
    fn translation_by_one_column_is_predicted_exactly() {
        let (h, w) = (6, 8);
        let u = vec![4i64; h * w];
        let v = vec![0i64; h * w];
        let p = params(0.25, 0.25);
        let prev: Vec<i64> = (0..h * w)
            .map(|k| ((k % w) * (k % w) + 3 * (k / w)) as i64)
            .collect();
        let (mut pu, mut pv) = (vec![0; h * w], vec![0; h * w]);
        sl_predict_frame(&u, &v, h, w, &p, &mut pu, &mut pv);
        assert!(pu.iter().all(|&x| x == 4));
        for i in 0..h {
            for j in 1..w {
                let (di, dj) = sl_departure(&u, &v, h, w, i, j, &p);
                assert_eq!(bilinear(&prev, h, w, di, dj), prev[i * w + j - 1]);
            }
        }
    }

    #[test]
    fn static_field_has_zero_sl_residual() {
        let (h, w) = (5, 5);
        let u: Vec<i64> = (0..25)
            .map(|k| if k == 12 { 0 } else { (k as i64 - 12) * 3 })
            .collect();
        let zero = vec![0i64; 25];
        let p = params(0.5, 0.5);
        let (mut pu, mut pv) = (vec![0; 25], vec![0; 25]);
        sl_predict_frame(&zero, &zero, h, w, &p, &mut pu, &mut pv);
        assert_eq!(pu, zero);
        let (di, dj) = sl_departure(&zero, &zero, h, w, 1, 4, &p);
        assert_eq!(bilinear(&u, h, w, di, dj), u[9]);
    }
}
