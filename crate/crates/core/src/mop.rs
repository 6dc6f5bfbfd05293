//! Block-wise mixture of predictors: each block of a frame picks Lorenzo or
//! semi-Lagrangian prediction by an estimated coding rate.

use serde::{Deserialize, Serialize};

use crate::codec::quantize::{dequantize, quantize_residual};
use crate::predict::lorenzo3d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Lorenzo,
    Sl,
}

pub const DEFAULT_BLOCK: usize = 8;
pub const DEFAULT_STRIDE: usize = 1;
pub const DEFAULT_THETA: f64 = 0.0003;
pub const DEFAULT_LAMBDA: f64 = 16.0;

/// Scoring parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MopParams {
    /// Block rows.
    pub bx: usize,
    /// Block columns.
    pub by: usize,
    pub stride: usize,
    pub theta: f64,
    pub lambda: f64,
}

impl Default for MopParams {
    fn default() -> Self {
        Self {
            bx: DEFAULT_BLOCK,
            by: DEFAULT_BLOCK,
            stride: DEFAULT_STRIDE,
            theta: DEFAULT_THETA,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl MopParams {
    /// Amortized mode-bit cost per sample and component.
    pub fn r_meta(&self) -> f64 {
        1.0 / (self.bx * self.by * 2) as f64
    }
}

/// Zero-order entropy in bits of a histogram with `n_p` entries; 0 when
/// empty.
pub fn entropy_h0(counts: &[u64], n_p: u64) -> f64 {
    if n_p == 0 {
        return 0.0;
    }
    let n = n_p as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateScore {
    /// Histogram bin counts, in ascending index order.
    pub counts: Vec<u64>,
    pub n_p: u64,
    pub l_p: u64,
    pub rate: f64,
}

impl RateScore {
    /// Scores a list of sampled quantization indices (`None` = overflow).
    pub fn from_samples(samples: &mut [Option<i64>], lambda: f64, r_meta: f64) -> Self {
        samples.sort_unstable();
        let mut counts = Vec::new();
        let mut l_p = 0u64;
        let mut n_p = 0u64;
        let mut last: Option<i64> = None;
        for s in samples.iter() {
            match *s {
                None => l_p += 1,
                Some(x) => {
                    n_p += 1;
                    if last == Some(x) {
                        *counts.last_mut().unwrap() += 1;
                    } else {
                        counts.push(1);
                        last = Some(x);
                    }
                }
            }
        }
        let total = n_p + l_p;
        let penalty = if total == 0 {
            0.0
        } else {
            lambda * l_p as f64 / total as f64
        };
        let rate = entropy_h0(&counts, n_p) + penalty + r_meta;
        Self {
            counts,
            n_p,
            l_p,
            rate,
        }
    }
}

/// SL iff its relative rate improvement over Lorenzo strictly exceeds θ.
pub fn select_mode(r_lorenzo: f64, r_sl: f64, theta: f64) -> Mode {
    if r_lorenzo > 0.0 && (r_lorenzo - r_sl) / r_lorenzo > theta {
        Mode::Sl
    } else {
        Mode::Lorenzo
    }
}

/// Read-only inputs for scoring one frame.
pub struct FrameContext<'a> {
    pub h: usize,
    pub w: usize,
    pub orig_u: &'a [i64],
    pub orig_v: &'a [i64],
    pub prev_u: &'a [i64],
    pub prev_v: &'a [i64],
    /// Semi-Lagrangian predictions of the frame.
    pub sl_u: &'a [i64],
    pub sl_v: &'a [i64],
    /// Vertices stored exactly; they cost the same under either mode.
    pub lossless: &'a [bool],
    /// Optimistic quantization bound (the global cap).
    pub e_q: i64,
    pub radius: u32,
}

/// Block `b` of the frame as `(row range, column range)`.
pub fn block_bounds(
    h: usize,
    w: usize,
    p: &MopParams,
    b: usize,
) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let per_row = w.div_ceil(p.by);
    let (bi, bj) = (b / per_row, b % per_row);
    let i0 = bi * p.bx;
    let j0 = bj * p.by;
    (i0..(i0 + p.bx).min(h), j0..(j0 + p.by).min(w))
}

pub fn blocks_per_frame(h: usize, w: usize, p: &MopParams) -> usize {
    h.div_ceil(p.bx) * w.div_ceil(p.by)
}

/// Micro-encodes block `b` under `mode` into the candidate buffers and
/// returns its rate estimate. Only the block's own cells of `cand_u`,
/// `cand_v` are written; cells outside it provide the causal halo.
pub fn score_block(
    ctx: &FrameContext,
    cand_u: &mut [i64],
    cand_v: &mut [i64],
    b: usize,
    mode: Mode,
    p: &MopParams,
) -> RateScore {
    let (rows, cols) = block_bounds(ctx.h, ctx.w, p, b);
    let stride = p.stride.max(1);
    let mut samples =
        Vec::with_capacity(2 * rows.len().div_ceil(stride) * cols.len().div_ceil(stride));
    for i in rows.clone() {
        for j in cols.clone() {
            let k = i * ctx.w + j;
            if ctx.lossless[k] {
                cand_u[k] = ctx.orig_u[k];
                cand_v[k] = ctx.orig_v[k];
                continue;
            }
            let sampled = (i - rows.start) % stride == 0 && (j - cols.start) % stride == 0;
            for (cand, orig, prev, sl) in [
                (&mut *cand_u, ctx.orig_u, ctx.prev_u, ctx.sl_u),
                (&mut *cand_v, ctx.orig_v, ctx.prev_v, ctx.sl_v),
            ] {
                let pred = match mode {
                    Mode::Lorenzo => lorenzo3d(cand, Some(prev), ctx.w, i, j),
                    Mode::Sl => sl[k],
                };
                let q = quantize_residual(orig[k] - pred, ctx.e_q, ctx.radius);
                cand[k] = match q {
                    Some(idx) => dequantize(pred, idx, ctx.e_q),
                    None => orig[k],
                };
                if sampled {
                    samples.push(q);
                }
            }
        }
    }
    RateScore::from_samples(&mut samples, p.lambda, p.r_meta())
}

/// Selects modes for every block of a frame (`t ≥ 1`), scoring blocks in
/// raster order so each block's Lorenzo context sees the chosen candidate
/// reconstruction of the blocks before it.
pub fn select_frame_modes(ctx: &FrameContext, p: &MopParams) -> Vec<Mode> {
    let n = blocks_per_frame(ctx.h, ctx.w, p);
    if ctx.e_q <= 0 {
        return vec![Mode::Lorenzo; n];
    }
    let len = ctx.h * ctx.w;
    let mut cand_u = vec![0i64; len];
    let mut cand_v = vec![0i64; len];
    let mut keep_u = Vec::new();
    let mut keep_v = Vec::new();
    let mut modes = Vec::with_capacity(n);
    for b in 0..n {
        let lorenzo = score_block(ctx, &mut cand_u, &mut cand_v, b, Mode::Lorenzo, p);
        let (rows, cols) = block_bounds(ctx.h, ctx.w, p, b);
        keep_u.clear();
        keep_v.clear();
        for i in rows.clone() {
            keep_u.extend_from_slice(&cand_u[i * ctx.w + cols.start..i * ctx.w + cols.end]);
            keep_v.extend_from_slice(&cand_v[i * ctx.w + cols.start..i * ctx.w + cols.end]);
        }
        let sl = score_block(ctx, &mut cand_u, &mut cand_v, b, Mode::Sl, p);
        let mode = select_mode(lorenzo.rate, sl.rate, p.theta);
        if mode == Mode::Lorenzo {
            let cw = cols.len();
            for (r, i) in rows.enumerate() {
                cand_u[i * ctx.w + cols.start..i * ctx.w + cols.end]
                    .copy_from_slice(&keep_u[r * cw..(r + 1) * cw]);
                cand_v[i * ctx.w + cols.start..i * ctx.w + cols.end]
                    .copy_from_slice(&keep_v[r * cw..(r + 1) * cw]);
            }
        }
        modes.push(mode);
    }
    modes
}
