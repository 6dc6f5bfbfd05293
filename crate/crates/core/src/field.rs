//! Field data model: float samples on an `H × W × T` grid, raw binary I/O,
//! the fixed-point bridge shared by compressor and verifier, and scalar
//! quality metrics.
//!
//! Samples are stored frame-contiguous and row-major within a frame, so the
//! flat index of `(t, i, j)` is `t·H·W + i·W + j`. Row `i` pairs with the `v`
//! component and column `j` with `u` throughout the crate.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid extent: `h` rows, `w` columns, `t` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub h: usize,
    pub w: usize,
    pub t: usize,
}

impl Dims {
    pub fn new(h: usize, w: usize, t: usize) -> Result<Self> {
        if h < 2 || w < 2 || t < 2 {
            return Err(Error::InvalidDims(format!(
                "{h}x{w}x{t}: every extent must be at least 2"
            )));
        }
        h.checked_mul(w)
            .and_then(|n| n.checked_mul(t))
            .filter(|&n| n <= i64::MAX as usize)
            .ok_or_else(|| Error::InvalidDims(format!("{h}x{w}x{t} overflows")))?;
        Ok(Self { h, w, t })
    }

    #[inline]
    pub fn frame_len(&self) -> usize {
        self.h * self.w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.h * self.w * self.t
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat vertex index of `(t, i, j)`.
    #[inline]
    pub fn vid(&self, t: usize, i: usize, j: usize) -> usize {
        (t * self.h + i) * self.w + j
    }

    /// Inverse of [`Dims::vid`].
    #[inline]
    pub fn coords(&self, id: usize) -> (usize, usize, usize) {
        let fl = self.frame_len();
        let t = id / fl;
        let r = id % fl;
        (t, r / self.w, r % self.w)
    }

    /// Parses `HxWxT`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidDims(format!("`{s}` is not HxWxT")));
        }
        let mut v = [0usize; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDims(format!("`{s}` is not HxWxT")))?;
        }
        Self::new(v[0], v[1], v[2])
    }
}

/// Physical grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl Default for Spacing {
    fn default() -> Self {
        Self {
            dx: 1.0,
            dy: 1.0,
            dt: 1.0,
        }
    }
}

impl Spacing {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("dx", self.dx), ("dy", self.dy), ("dt", self.dt)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidParam(format!(
                    "{name} must be positive, got {x}"
                )));
            }
        }
        Ok(())
    }
}

/// Metadata sidecar written next to raw component files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl Metadata {
    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.h, self.w, self.t)
    }

    pub fn spacing(&self) -> Spacing {
        Spacing {
            dx: self.dx,
            dy: self.dy,
            dt: self.dt,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// A time-varying 2D vector field sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSeries {
    dims: Dims,
    spacing: Spacing,
    u: Vec<f32>,
    v: Vec<f32>,
}

impl FieldSeries {
    pub fn new(dims: Dims, spacing: Spacing, u: Vec<f32>, v: Vec<f32>) -> Result<Self> {
        let dims = Dims::new(dims.h, dims.w, dims.t)?;
        spacing.validate()?;
        for (name, c) in [("u", &u), ("v", &v)] {
            if c.len() != dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "component {name} has {} samples, grid needs {}",
                    c.len(),
                    dims.len()
                )));
            }
        }
        check_finite('u', &u)?;
        check_finite('v', &v)?;
        Ok(Self {
            dims,
            spacing,
            u,
            v,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn u(&self) -> &[f32] {
        &self.u
    }

    pub fn v(&self) -> &[f32] {
        &self.v
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            h: self.dims.h,
            w: self.dims.w,
            t: self.dims.t,
            dx: self.spacing.dx,
            dy: self.spacing.dy,
            dt: self.spacing.dt,
        }
    }

    /// Size of the two raw float32 components in bytes.
    pub fn raw_bytes(&self) -> usize {
        2 * 4 * self.dims.len()
    }

    /// Joint `(min, max)` over both components.
    pub fn value_range(&self) -> (f32, f32) {
        self.u
            .iter()
            .chain(&self.v)
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .fold(0.0f64, |m, &x| m.max((x as f64).abs()))
    }
}

fn check_finite(component: char, data: &[f32]) -> Result<()> {
    match data.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { component, index }),
        None => Ok(()),
    }
}

fn read_f32_file(path: &Path, n: usize) -> Result<Vec<f32>> {
    let bytes = fs::read(path)?;
    let expected = (n * 4) as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            expected,
            actual: bytes.len() as u64,
        });
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

/// Loads two headerless little-endian float32 files.
pub fn load_raw(
    u_path: impl AsRef<Path>,
    v_path: impl AsRef<Path>,
    dims: Dims,
    spacing: Spacing,
) -> Result<FieldSeries> {
    let dims = Dims::new(dims.h, dims.w, dims.t)?;
    let u = read_f32_file(u_path.as_ref(), dims.len())?;
    let v = read_f32_file(v_path.as_ref(), dims.len())?;
    FieldSeries::new(dims, spacing, u, v)
}

pub fn write_raw(
    field: &FieldSeries,
    u_path: impl AsRef<Path>,
    v_path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(u_path, f32_le_bytes(field.u()))?;
    fs::write(v_path, f32_le_bytes(field.v()))?;
    Ok(())
}

pub fn f32_le_bytes(data: &[f32]) -> Vec<u8> {
    data.iter().flat_map(|x| x.to_le_bytes()).collect()
}

/// Power-of-two fixed-point scale `S = 2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scale {
    pub exponent: i32,
}

/// Fixed values produced at the natural scale stay below this magnitude.
pub const FIXED_LIMIT_BITS: u32 = 30;
/// Hard limit for any fixed value entering the predicates.
pub const FIXED_HARD_LIMIT_BITS: u32 = 31;

impl Scale {
    pub fn factor(&self) -> f64 {
        2f64.powi(self.exponent)
    }

    /// Largest power of two keeping `max_abs · S < 2^30`; `2^30` for an
    /// all-zero field.
    pub fn for_max_abs(max_abs: f64) -> Self {
        let limit = 2f64.powi(FIXED_LIMIT_BITS as i32);
        if max_abs == 0.0 {
            return Self {
                exponent: FIXED_LIMIT_BITS as i32,
            };
        }
        let mut k = (FIXED_LIMIT_BITS as f64 - max_abs.log2()).floor() as i32;
        while max_abs * 2f64.powi(k) >= limit {
            k -= 1;
        }
        while max_abs * 2f64.powi(k + 1) < limit {
            k += 1;
        }
        Self { exponent: k }
    }

    #[inline]
    pub fn to_fixed(&self, x: f32) -> i64 {
        (x as f64 * self.factor()).round() as i64
    }

    #[inline]
    pub fn to_float(&self, q: i64) -> f32 {
        (q as f64 / self.factor()) as f32
    }

    /// Nearest value to `q` that survives the float32 output path unchanged:
    /// `snap(q) == to_fixed(to_float(snap(q)))`.
    #[inline]
    pub fn snap(&self, q: i64) -> i64 {
        self.to_fixed(self.to_float(q))
    }
}

/// A field converted to scaled signed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedField {
    pub dims: Dims,
    pub scale: Scale,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl FixedField {
    #[inline]
    pub fn value(&self, id: usize) -> (i64, i64) {
        (self.u[id], self.v[id])
    }
}

/// Converts at the field's natural scale (see [`Scale::for_max_abs`]).
pub fn to_fixed(f: &FieldSeries) -> FixedField {
    let scale = Scale::for_max_abs(f.max_abs());
    convert(f, scale)
}

/// Converts at an explicit scale; values must stay below `2^31`.
pub fn to_fixed_with_scale(f: &FieldSeries, scale: Scale) -> Result<FixedField> {
    let ff = convert(f, scale);
    let limit = 1i64 << FIXED_HARD_LIMIT_BITS;
    for (k, (&a, &b)) in ff.u.iter().zip(&ff.v).enumerate() {
        let worst = if a.abs() >= b.abs() { a } else { b };
        if worst.abs() >= limit {
            return Err(Error::FixedOverflow {
                index: k,
                value: worst,
                limit_bits: FIXED_HARD_LIMIT_BITS,
            });
        }
    }
    Ok(ff)
}

fn convert(f: &FieldSeries, scale: Scale) -> FixedField {
    FixedField {
        dims: f.dims,
        scale,
        u: f.u.iter().map(|&x| scale.to_fixed(x)).collect(),
        v: f.v.iter().map(|&x| scale.to_fixed(x)).collect(),
    }
}

/// Converts fixed values back to a float field.
pub fn from_fixed(ff: &FixedField, spacing: Spacing) -> Result<FieldSeries> {
    let u = ff.u.iter().map(|&q| ff.scale.to_float(q)).collect();
    let v = ff.v.iter().map(|&q| ff.scale.to_float(q)).collect();
    FieldSeries::new(ff.dims, spacing, u, v)
}

/// Fidelity and size summary of a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr_u: f64,
    pub psnr_v: f64,
    pub psnr_joint: f64,
    pub max_abs_err: f64,
    pub cr: f64,
}

/// PSNR against the joint `(u, v)` value range. Identical fields report
/// `f64::INFINITY`. `cr` is 1.
pub fn psnr(orig: &FieldSeries, recon: &FieldSeries) -> Result<QualityReport> {
    quality(orig, recon, None)
}

/// Like [`psnr`], with the compression ratio filled in from an archive size.
pub fn quality(
    orig: &FieldSeries,
    recon: &FieldSeries,
    archive_bytes: Option<usize>,
) -> Result<QualityReport> {
    if orig.dims != recon.dims {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            orig.dims, recon.dims
        )));
    }
    let (lo, hi) = orig.value_range();
    let range = hi as f64 - lo as f64;
    let sq = |a: &[f32], b: &[f32]| -> (f64, f64) {
        a.iter().zip(b).fold((0.0, 0.0), |(s, m), (&x, &y)| {
            let e = x as f64 - y as f64;
            (s + e * e, m.max(e.abs()))
        })
    };
    let (su, mu) = sq(&orig.u, &recon.u);
    let (sv, mv) = sq(&orig.v, &recon.v);
    let n = orig.dims.len() as f64;
    let db = |mse: f64| {
        if mse == 0.0 {
            f64::INFINITY
        } else {
            20.0 * range.log10() - 10.0 * mse.log10()
        }
    };
    let cr = match archive_bytes {
        Some(b) if b > 0 => orig.raw_bytes() as f64 / b as f64,
        _ => 1.0,
    };
    Ok(QualityReport {
        psnr_u: db(su / n),
        psnr_v: db(sv / n),
        psnr_joint: db((su + sv) / (2.0 * n)),
        max_abs_err: mu.max(mv),
        cr,
    })
}
