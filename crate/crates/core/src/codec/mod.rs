//! The compressor and decompressor.
//!
//! Encoding runs frame by frame. Every vertex first takes its error bound:
//! vertices of faces holding a critical point are stored exactly, others get
//! the minimum triangle bound over their incident faces, evaluated against
//! the current state (reconstructed values behind, original values ahead).
//! The bound is snapped down to a power-of-two fraction of `τ′`, and both
//! components are predicted, quantized and reconstructed under it.
//!
//! The decoder never re-derives bounds: it reads the eb codes, replays the
//! predictions on its own reconstruction and emits frames as they complete,
//! holding two frames at a time.

pub mod archive;
pub mod backend;
pub mod huffman;
pub mod quantize;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::eb::{derive_vertex_eb, quantize_eb, tau_prime, EbCode, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::field::{Dims, FieldSeries, FixedField, Scale, Spacing, FIXED_HARD_LIMIT_BITS};
use crate::mesh::IncidenceTable;
use crate::mop::{
    block_bounds, blocks_per_frame, select_frame_modes, FrameContext, Mode, MopParams,
};
use crate::predicates::{build_critical_face_set, CriticalFaceSet};
use crate::predict::{
    lorenzo3d, sl_predict_frame, CflFactors, SlParams, DEFAULT_D_MAX, DEFAULT_N_MAX,
};

pub use archive::{Archive, Header};
pub use backend::Backend;
use quantize::{
    dequantize, max_residual_symbol, quantize_residual, residual_symbol, symbol_index,
    DEFAULT_RADIUS,
};

/// Which predictor the encoder may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predictor {
    /// Per-block choice by estimated rate.
    #[default]
    Mop,
    Lorenzo,
    Sl,
}

impl Predictor {
    pub const ALL: [Predictor; 3] = [Predictor::Lorenzo, Predictor::Sl, Predictor::Mop];

    pub fn id(self) -> u8 {
        match self {
            Predictor::Mop => 0,
            Predictor::Lorenzo => 1,
            Predictor::Sl => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Predictor::Mop),
            1 => Ok(Predictor::Lorenzo),
            2 => Ok(Predictor::Sl),
            _ => Err(Error::Format(format!("unknown predictor id {id}"))),
        }
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predictor::Mop => "mop",
            Predictor::Lorenzo => "lorenzo",
            Predictor::Sl => "sl",
        })
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mop" => Ok(Predictor::Mop),
            "lorenzo" | "3dl" => Ok(Predictor::Lorenzo),
            "sl" => Ok(Predictor::Sl),
            _ => Err(Error::InvalidParam(format!("unknown predictor `{s}`"))),
        }
    }
}

/// Error bound, either in field units or as a fraction of the joint value
/// range of both components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorBound {
    Absolute(f64),
    Relative(f64),
}

impl ErrorBound {
    pub fn resolve(self, f: &FieldSeries) -> Result<f64> {
        let eps = match self {
            ErrorBound::Absolute(e) => e,
            ErrorBound::Relative(r) => {
                let (lo, hi) = f.value_range();
                r * (hi as f64 - lo as f64)
            }
        };
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParam(format!(
                "error bound must be positive, got {eps}"
            )));
        }
        Ok(eps)
    }
}

/// Encoder tunables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodecConfig {
    pub predictor: Predictor,
    pub mop: MopParams,
    pub radius: u32,
    pub d_max: f64,
    pub n_max: u32,
    pub k_max: u8,
    pub backend: Backend,
    /// Fixed-point scale exponent; `None` picks the field's natural scale.
    pub scale_exponent: Option<i32>,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            predictor: Predictor::Mop,
            mop: MopParams::default(),
            radius: DEFAULT_RADIUS,
            d_max: DEFAULT_D_MAX,
            n_max: DEFAULT_N_MAX,
            k_max: DEFAULT_K_MAX,
            backend: Backend::Deflate,
            scale_exponent: None,
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.mop.bx == 0
            || self.mop.by == 0
            || self.mop.bx > u32::MAX as usize
            || self.mop.by > u32::MAX as usize
        {
            return bad(format!("block size {}x{}", self.mop.bx, self.mop.by));
        }
        if self.mop.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        if !(self.mop.theta.is_finite() && self.mop.theta >= 0.0) {
            return bad(format!("theta {}", self.mop.theta));
        }
        if !(self.mop.lambda.is_finite() && self.mop.lambda >= 0.0) {
            return bad(format!("lambda {}", self.mop.lambda));
        }
        if !(2..=1 << 30).contains(&self.radius) {
            return bad(format!("radius {} outside [2, 2^30]", self.radius));
        }
        if !(self.d_max.is_finite() && self.d_max > 0.0) {
            return bad(format!("d_max {}", self.d_max));
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1".into());
        }
        if self.k_max > 62 {
            return bad(format!("k_max {} above 62", self.k_max));
        }
        Ok(())
    }
}

/// What the encoder did, for reporting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodeStats {
    pub critical_slice_faces: usize,
    pub critical_slab_faces: usize,
    /// Vertices stored exactly (crossing faces or bound too small).
    pub lossless_vertices: usize,
    /// Components that fell back to exact storage on quantization overflow.
    pub overflow_components: usize,
    pub sl_blocks: usize,
    pub lorenzo_blocks: usize,
    pub elapsed: Duration,
}

fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (k, &b) in bits.iter().enumerate() {
        if b {
            out[k >> 3] |= 0x80 >> (k & 7);
        }
    }
    out
}

fn unpack_bit(bytes: &[u8], k: usize) -> bool {
    bytes[k >> 3] & (0x80 >> (k & 7)) != 0
}

fn sl_params(spacing: Spacing, scale: Scale, d_max: f64, n_max: u32) -> SlParams {
    SlParams {
        cfl: CflFactors::new(spacing, scale),
        d_max,
        n_max,
    }
}

/// Fixed-point conversion used by the encoder: the natural scale, or an
/// explicit exponent.
pub fn fixed_for(f: &FieldSeries, scale_exponent: Option<i32>) -> Result<FixedField> {
    match scale_exponent {
        None => Ok(crate::field::to_fixed(f)),
        Some(exponent) => crate::field::to_fixed_with_scale(f, Scale { exponent }),
    }
}

/// Compresses `f` so that every sample is reconstructed within `eps` and
/// every face's critical point test is preserved.
pub fn compress(f: &FieldSeries, eps: f64, cfg: &CodecConfig) -> Result<Archive> {
    compress_with_stats(f, eps, cfg).map(|(a, _)| a)
}

pub fn compress_with_stats(
    f: &FieldSeries,
    eps: f64,
    cfg: &CodecConfig,
) -> Result<(Archive, EncodeStats)> {
    let start = Instant::now();
    cfg.validate()?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParam(format!(
            "error bound must be positive, got {eps}"
        )));
    }
    let ff = fixed_for(f, cfg.scale_exponent)?;
    let crit = build_critical_face_set(&ff);
    let tau = tau_prime(eps, ff.scale.factor());
    let header = Header {
        backend: cfg.backend,
        predictor: cfg.predictor,
        dims: ff.dims,
        spacing: f.spacing(),
        scale: ff.scale,
        eps,
        tau,
        block: (cfg.mop.bx, cfg.mop.by),
        radius: cfg.radius,
        d_max: cfg.d_max,
        n_max: cfg.n_max,
        k_max: cfg.k_max,
    };
    let mut enc = Encoder::new(&ff, &crit, &header, cfg);
    for t in 0..ff.dims.t {
        enc.encode_frame(t);
    }
    let (sections, mut stats) = enc.finish();
    stats.critical_slice_faces = crit.slice.len();
    stats.critical_slab_faces = crit.slab.len();
    let archive = Archive::assemble(&header, &sections)?;
    stats.elapsed = start.elapsed();
    Ok((archive, stats))
}

struct Encoder<'a> {
    dims: Dims,
    header: &'a Header,
    cfg: &'a CodecConfig,
    orig: &'a FixedField,
    /// Reconstructed values behind the cursor, originals ahead of it.
    u: Vec<i64>,
    v: Vec<i64>,
    lossless: Vec<bool>,
    table: IncidenceTable,
    sl: SlParams,
    sl_u: Vec<i64>,
    sl_v: Vec<i64>,
    mode_bits: Vec<bool>,
    eb_syms: Vec<u32>,
    res_syms: Vec<u32>,
    raw: Vec<u8>,
    stats: EncodeStats,
}

impl<'a> Encoder<'a> {
    fn new(
        ff: &'a FixedField,
        crit: &CriticalFaceSet,
        header: &'a Header,
        cfg: &'a CodecConfig,
    ) -> Self {
        let dims = ff.dims;
        let mut lossless = vec![false; dims.len()];
        for f in crit.iter() {
            for v in f.vertices() {
                lossless[v] = true;
            }
        }
        let fl = dims.frame_len();
        Self {
            dims,
            header,
            cfg,
            orig: ff,
            u: ff.u.clone(),
            v: ff.v.clone(),
            lossless,
            table: IncidenceTable::new(),
            sl: sl_params(header.spacing, header.scale, cfg.d_max, cfg.n_max),
            sl_u: vec![0; fl],
            sl_v: vec![0; fl],
            mode_bits: Vec::with_capacity((dims.t - 1) * header.blocks_per_frame()),
            eb_syms: Vec::with_capacity(dims.len()),
            res_syms: Vec::with_capacity(2 * dims.len()),
            raw: Vec::new(),
            stats: EncodeStats::default(),
        }
    }

    fn frame_modes(&mut self, t: usize) -> Vec<Mode> {
        let (h, w) = (self.dims.h, self.dims.w);
        let nb = blocks_per_frame(h, w, &self.cfg.mop);
        if t == 0 {
            return vec![Mode::Lorenzo; nb];
        }
        let fl = self.dims.frame_len();
        let prev = (t - 1) * fl..t * fl;
        let cur = t * fl..(t + 1) * fl;
        if self.cfg.predictor != Predictor::Lorenzo {
            sl_predict_frame(
                &self.u[prev.clone()],
                &self.v[prev.clone()],
                h,
                w,
                &self.sl,
                &mut self.sl_u,
                &mut self.sl_v,
            );
        }
        match self.cfg.predictor {
            Predictor::Lorenzo => vec![Mode::Lorenzo; nb],
            Predictor::Sl => vec![Mode::Sl; nb],
            Predictor::Mop => {
                let ctx = FrameContext {
                    h,
                    w,
                    orig_u: &self.orig.u[cur.clone()],
                    orig_v: &self.orig.v[cur.clone()],
                    prev_u: &self.u[prev.clone()],
                    prev_v: &self.v[prev],
                    sl_u: &self.sl_u,
                    sl_v: &self.sl_v,
                    lossless: &self.lossless[cur.clone()],
                    e_q: self.header.tau,
                    radius: self.cfg.radius,
                };
                select_frame_modes(&ctx, &self.cfg.mop)
            }
        }
    }

    fn push_raw(&mut self, x: i64) {
        self.raw.extend_from_slice(&(x as i32).to_le_bytes());
    }

    fn encode_frame(&mut self, t: usize) {
        let (h, w) = (self.dims.h, self.dims.w);
        let fl = self.dims.frame_len();
        let modes = self.frame_modes(t);
        if t > 0 {
            for &m in &modes {
                self.mode_bits.push(m == Mode::Sl);
                match m {
                    Mode::Sl => self.stats.sl_blocks += 1,
                    Mode::Lorenzo => self.stats.lorenzo_blocks += 1,
                }
            }
        }
        let mut vertex_mode = vec![Mode::Lorenzo; fl];
        for (b, &m) in modes.iter().enumerate() {
            let (rows, cols) = block_bounds(h, w, &self.cfg.mop, b);
            for i in rows {
                vertex_mode[i * w + cols.start..i * w + cols.end].fill(m);
            }
        }
        let tau = self.header.tau;
        let scale = self.header.scale;
        let base = t * fl;
        for i in 0..h {
            for j in 0..w {
                let k = i * w + j;
                let id = base + k;
                let code = if self.lossless[id] {
                    EbCode::Lossless
                } else {
                    let xi =
                        derive_vertex_eb(&self.dims, &self.table, &self.u, &self.v, t, i, j, tau);
                    quantize_eb(xi, tau, self.cfg.k_max)
                };
                self.eb_syms.push(code.symbol());
                let e_q = match code {
                    EbCode::Lossless => {
                        self.stats.lossless_vertices += 1;
                        self.push_raw(self.orig.u[id]);
                        self.push_raw(self.orig.v[id]);
                        continue;
                    }
                    c => c.bound(tau),
                };
                for comp in 0..2 {
                    let (state, orig, sl) = if comp == 0 {
                        (&self.u, &self.orig.u, &self.sl_u)
                    } else {
                        (&self.v, &self.orig.v, &self.sl_v)
                    };
                    let pred = match vertex_mode[k] {
                        Mode::Lorenzo => {
                            let prev = (t > 0).then(|| &state[base - fl..base]);
                            lorenzo3d(&state[base..base + fl], prev, w, i, j)
                        }
                        Mode::Sl => sl[k],
                    };
                    let x = orig[id];
                    let q = quantize_residual(x - pred, e_q, self.cfg.radius)
                        .map(|idx| (idx, scale.snap(dequantize(pred, idx, e_q))))
                        .filter(|&(_, r)| (r - x).abs() <= e_q);
                    let (sym, value) = match q {
                        Some((idx, r)) => (residual_symbol(Some(idx)), r),
                        None => {
                            self.stats.overflow_components += 1;
                            self.push_raw(x);
                            (residual_symbol(None), x)
                        }
                    };
                    self.res_syms.push(sym);
                    if comp == 0 {
                        self.u[id] = value;
                    } else {
                        self.v[id] = value;
                    }
                }
            }
        }
    }

    fn finish(self) -> (archive::Sections, EncodeStats) {
        let sections = archive::Sections {
            modes: pack_bits(&self.mode_bits),
            eb_codes: huffman::encode(&self.eb_syms),
            residuals: huffman::encode(&self.res_syms),
            lossless: self.raw,
        };
        (sections, self.stats)
    }
}

/// Receives decoded frames in time order.
pub trait FrameSink {
    fn frame(&mut self, t: usize, u: &[f32], v: &[f32]) -> Result<()>;
}

/// Collects every frame into a [`FieldSeries`].
#[derive(Debug, Default)]
pub struct CollectSink {
    u: Vec<f32>,
    v: Vec<f32>,
}

impl FrameSink for CollectSink {
    fn frame(&mut self, _t: usize, u: &[f32], v: &[f32]) -> Result<()> {
        self.u.extend_from_slice(u);
        self.v.extend_from_slice(v);
        Ok(())
    }
}

pub fn decompress(bytes: &[u8]) -> Result<FieldSeries> {
    let mut sink = CollectSink::default();
    let header = decompress_into(bytes, &mut sink)?;
    FieldSeries::new(header.dims, header.spacing, sink.u, sink.v)
}

/// Decodes frame by frame into `sink`, keeping only the previous and the
/// current frame resident.
pub fn decompress_into(bytes: &[u8], sink: &mut impl FrameSink) -> Result<Header> {
    let (header, sections) = archive::open(bytes)?;
    let dims = header.dims;
    let (h, w) = (dims.h, dims.w);
    let fl = dims.frame_len();
    let mop = MopParams {
        bx: header.block.0,
        by: header.block.1,
        ..MopParams::default()
    };
    let nb = blocks_per_frame(h, w, &mop);
    let mode_bits = (dims.t - 1) * nb;
    if sections.modes.len() != mode_bits.div_ceil(8) {
        return Err(Error::StreamLength {
            section: "mode bitmap",
            expected: mode_bits.div_ceil(8) as u64,
            actual: sections.modes.len() as u64,
        });
    }
    let mut eb = huffman::Decoder::new(&sections.eb_codes, header.k_max as u32 + 1)?;
    if eb.len() != dims.len() as u64 {
        return Err(Error::StreamLength {
            section: "eb codes",
            expected: dims.len() as u64,
            actual: eb.len(),
        });
    }
    let mut res = huffman::Decoder::new(&sections.residuals, max_residual_symbol(header.radius))?;
    let mut raw = sections.lossless.chunks_exact(4);
    if sections.lossless.len() % 4 != 0 {
        return Err(Error::Format(
            "lossless section not a multiple of 4 bytes".into(),
        ));
    }
    let mut next_raw = || -> Result<i64> {
        raw.next()
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()) as i64)
            .ok_or(Error::StreamLength {
                section: "lossless values",
                expected: sections.lossless.len() as u64 + 4,
                actual: sections.lossless.len() as u64,
            })
    };
    let sl = sl_params(header.spacing, header.scale, header.d_max, header.n_max);
    let scale = header.scale;
    let tau = header.tau;
    let limit = 1i64 << FIXED_HARD_LIMIT_BITS;
    let mut prev_u = vec![0i64; fl];
    let mut prev_v = vec![0i64; fl];
    let mut cur_u = vec![0i64; fl];
    let mut cur_v = vec![0i64; fl];
    let mut sl_u = vec![0i64; fl];
    let mut sl_v = vec![0i64; fl];
    let mut out_u = vec![0f32; fl];
    let mut out_v = vec![0f32; fl];
    let mut vertex_sl = vec![false; fl];
    for t in 0..dims.t {
        vertex_sl.fill(false);
        if t > 0 {
            let mut any = false;
            for b in 0..nb {
                if unpack_bit(&sections.modes, (t - 1) * nb + b) {
                    any = true;
                    let (rows, cols) = block_bounds(h, w, &mop, b);
                    for i in rows {
                        vertex_sl[i * w + cols.start..i * w + cols.end].fill(true);
                    }
                }
            }
            if any {
                sl_predict_frame(&prev_u, &prev_v, h, w, &sl, &mut sl_u, &mut sl_v);
            }
        }
        for i in 0..h {
            for j in 0..w {
                let k = i * w + j;
                let code = EbCode::from_symbol(eb.next_symbol()?, header.k_max)
                    .ok_or_else(|| Error::Format("eb code out of range".into()))?;
                let e_q = match code {
                    EbCode::Lossless => {
                        cur_u[k] = next_raw()?;
                        cur_v[k] = next_raw()?;
                        continue;
                    }
                    c => c.bound(tau),
                };
                if e_q <= 0 {
                    return Err(Error::Format("zero error bound on a lossy vertex".into()));
                }
                for comp in 0..2 {
                    let (cur, prev, slp) = if comp == 0 {
                        (&mut cur_u, &prev_u, &sl_u)
                    } else {
                        (&mut cur_v, &prev_v, &sl_v)
                    };
                    let pred = if vertex_sl[k] {
                        slp[k]
                    } else {
                        lorenzo3d(cur, (t > 0).then_some(&prev[..]), w, i, j)
                    };
                    let value = match symbol_index(res.next_symbol()?) {
                        None => next_raw()?,
                        Some(idx) => scale.snap(dequantize(pred, idx, e_q)),
                    };
                    if value.abs() >= limit {
                        return Err(Error::Format(format!(
                            "reconstructed value {value} out of range"
                        )));
                    }
                    cur[k] = value;
                }
            }
        }
        for k in 0..fl {
            out_u[k] = scale.to_float(cur_u[k]);
            out_v[k] = scale.to_float(cur_v[k]);
        }
        sink.frame(t, &out_u, &out_v)?;
        std::mem::swap(&mut prev_u, &mut cur_u);
        std::mem::swap(&mut prev_v, &mut cur_v);
    }
    if !res.is_empty() || raw.next().is_some() {
        return Err(Error::Format("trailing stream data".into()));
    }
    Ok(header)
}

/// Decoded symbol streams of an archive, for statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Streams {
    pub header: Header,
    pub modes: Vec<bool>,
    pub eb_codes: Vec<u32>,
    pub residuals: Vec<u32>,
}

pub fn read_streams(bytes: &[u8]) -> Result<Streams> {
    let (header, sections) = archive::open(bytes)?;
    let nbits = (header.dims.t - 1) * header.blocks_per_frame();
    if sections.modes.len() != nbits.div_ceil(8) {
        return Err(Error::StreamLength {
            section: "mode bitmap",
            expected: nbits.div_ceil(8) as u64,
            actual: sections.modes.len() as u64,
        });
    }
    let modes = (0..nbits).map(|k| unpack_bit(&sections.modes, k)).collect();
    let eb_codes =
        huffman::Decoder::new(&sections.eb_codes, header.k_max as u32 + 1)?.decode_all()?;
    let residuals = huffman::Decoder::new(&sections.residuals, max_residual_symbol(header.radius))?
        .decode_all()?;
    Ok(Streams {
        header,
        modes,
        eb_codes,
        residuals,
    })
}
