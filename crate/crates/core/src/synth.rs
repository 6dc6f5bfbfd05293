//! Deterministic synthetic vector fields used as stand-ins for simulation
//! output.
//!
//! Grid coordinates are used directly as positions: column `j` is `x`, row
//! `i` is `y`. Every generator is a pure function of its kind, dimensions,
//! parameters and seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Dims, FieldSeries, Spacing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    /// Single vortex whose center moves at constant velocity.
    MovingVortex,
    /// Two co-rotating vortices orbiting their midpoint.
    VortexPair,
    /// Uniform stream carrying a smooth cross-stream pattern.
    Translation,
    /// Band-limited random superposition of drifting Fourier modes.
    RandomFourier,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [
        SynthKind::MovingVortex,
        SynthKind::VortexPair,
        SynthKind::Translation,
        SynthKind::RandomFourier,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SynthKind::MovingVortex => "moving_vortex",
            SynthKind::VortexPair => "vortex_pair",
            SynthKind::Translation => "translation",
            SynthKind::RandomFourier => "random_fourier",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Generator knobs. `None` picks a default derived from the grid size.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynthParams {
    /// Vortex center at t = 0 (column, row).
    pub center: Option<(f64, f64)>,
    /// Center velocity in cells per frame (column, row).
    pub velocity: Option<(f64, f64)>,
    /// Peak swirl speed, or pattern amplitude for `translation`/`random_fourier`.
    pub amplitude: Option<f64>,
    /// Vortex core radius in cells.
    pub core_radius: Option<f64>,
    /// Half distance between the two vortices of a pair.
    pub separation: Option<f64>,
    /// Orbit rate of a vortex pair, radians per frame.
    pub omega: Option<f64>,
    /// Stream speed (field units) for `translation`.
    pub base_speed: Option<f64>,
    /// Pattern shift in cells per frame for `translation`.
    pub shift: Option<f64>,
    /// Pattern wavelength in cells.
    pub wavelength: Option<f64>,
    /// Number of Fourier modes for `random_fourier`.
    pub modes: Option<usize>,
}

impl SynthParams {
    /// Parses a `key=value` pair; pairs use `a,b`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidParam(format!("{key}={value}")))
        };
        let pair = |s: &str| -> Result<(f64, f64)> {
            let (a, b) = s
                .split_once(',')
                .ok_or_else(|| Error::InvalidParam(format!("{key} expects a,b")))?;
            Ok((num(a)?, num(b)?))
        };
        match key {
            "center" => self.center = Some(pair(value)?),
            "velocity" => self.velocity = Some(pair(value)?),
            "amplitude" => self.amplitude = Some(num(value)?),
            "core_radius" => self.core_radius = Some(num(value)?),
            "separation" => self.separation = Some(num(value)?),
            "omega" => self.omega = Some(num(value)?),
            "base_speed" => self.base_speed = Some(num(value)?),
            "shift" => self.shift = Some(num(value)?),
            "wavelength" => self.wavelength = Some(num(value)?),
            "modes" => {
                self.modes = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidParam(format!("{key}={value}")))?,
                )
            }
            _ => return Err(Error::InvalidParam(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

fn non_negative(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be non-negative, got {x}"
        )))
    }
}

/// Generates a synthetic field.
pub fn gen_synthetic(
    kind: SynthKind,
    dims: Dims,
    params: &SynthParams,
    seed: u64,
) -> Result<FieldSeries> {
    let dims = Dims::new(dims.h, dims.w, dims.t)?;
    match kind {
        SynthKind::MovingVortex => moving_vortex(dims, params, seed),
        SynthKind::VortexPair => vortex_pair(dims, params, seed),
        SynthKind::Translation => translation(dims, params, seed),
        SynthKind::RandomFourier => random_fourier(dims, params, seed),
    }
}

/// Swirl of an algebraic vortex with peak speed `amp` at radius `rc`. The
/// velocity vanishes only at the center and decays like `1/r`, so it never
/// rounds to zero in fixed point far from the core.
#[inline]
fn swirl(x: f64, y: f64, amp: f64, rc: f64) -> (f64, f64) {
    let k = 2.0 * amp * rc / (rc * rc + x * x + y * y);
    (-k * y, k * x)
}

fn fill(
    dims: Dims,
    spacing: Spacing,
    mut f: impl FnMut(f64, f64, f64) -> (f64, f64),
) -> Result<FieldSeries> {
    let mut u = Vec::with_capacity(dims.len());
    let mut v = Vec::with_capacity(dims.len());
    for t in 0..dims.t {
        for i in 0..dims.h {
            for j in 0..dims.w {
                let (a, b) = f(j as f64, i as f64, t as f64);
                u.push(a as f32);
                v.push(b as f32);
            }
        }
    }
    FieldSeries::new(dims, spacing, u, v)
}

/// `base` shifted by a seeded offset in `[-0.5, 0.5)` per axis, unless the
/// caller fixed the center.
fn seeded_center(p: &SynthParams, base: (f64, f64), seed: u64) -> (f64, f64) {
    p.center.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (
            base.0 + rng.gen_range(-0.5..0.5),
            base.1 + rng.gen_range(-0.5..0.5),
        )
    })
}

fn moving_vortex(dims: Dims, p: &SynthParams, seed: u64) -> Result<FieldSeries> {
    let (cx, cy) = seeded_center(p, (dims.w as f64 / 4.0, dims.h as f64 / 2.0 + 0.37), seed);
    let (vx, vy) = p.velocity.unwrap_or((0.5, 0.0));
    let amp = positive("amplitude", p.amplitude.unwrap_or(1.0))?;
    let rc = positive(
        "core_radius",
        p.core_radius.unwrap_or(dims.h.max(dims.w) as f64 / 8.0),
    )?;
    if !(vx.is_finite() && vy.is_finite() && cx.is_finite() && cy.is_finite()) {
        return Err(Error::InvalidParam("center/velocity must be finite".into()));
    }
    fill(dims, Spacing::default(), |x, y, t| {
        swirl(x - (cx + vx * t), y - (cy + vy * t), amp, rc)
    })
}

/// Center of a moving vortex at frame `t` for the given parameters.
pub fn moving_vortex_center(dims: Dims, p: &SynthParams, seed: u64, t: f64) -> (f64, f64) {
    let (cx, cy) = seeded_center(p, (dims.w as f64 / 4.0, dims.h as f64 / 2.0 + 0.37), seed);
    let (vx, vy) = p.velocity.unwrap_or((0.5, 0.0));
    (cx + vx * t, cy + vy * t)
}

fn vortex_pair(dims: Dims, p: &SynthParams, seed: u64) -> Result<FieldSeries> {
    let (mx, my) = seeded_center(
        p,
        (dims.w as f64 / 2.0 + 0.21, dims.h as f64 / 2.0 - 0.13),
        seed,
    );
    let d = positive(
        "separation",
        p.separation.unwrap_or(dims.w.min(dims.h) as f64 / 6.0),
    )?;
    let omega = p.omega.unwrap_or(0.05);
    let amp = positive("amplitude", p.amplitude.unwrap_or(1.0))?;
    let rc = positive("core_radius", p.core_radius.unwrap_or(d / 2.0))?;
    if !omega.is_finite() {
        return Err(Error::InvalidParam("omega must be finite".into()));
    }
    fill(dims, Spacing::default(), |x, y, t| {
        let (s, c) = (omega * t).sin_cos();
        let (ax, ay) = (mx + d * c, my + d * s);
        let (bx, by) = (mx - d * c, my - d * s);
        let (u1, v1) = swirl(x - ax, y - ay, amp, rc);
        let (u2, v2) = swirl(x - bx, y - by, amp, rc);
        (u1 + u2, v1 + v2)
    })
}

/// Smooth periodic pattern in `[-1, 1]` with random phases.
struct Pattern {
    terms: Vec<(f64, f64, f64, f64)>, // (weight, kx, ky, phase)
}

impl Pattern {
    fn random(rng: &mut ChaCha8Rng, wavelength: f64, n: usize) -> Self {
        let k0 = 2.0 * PI / wavelength;
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let angle = rng.gen_range(0.0..PI);
            let k = k0 * rng.gen_range(0.75..1.25);
            let phase = rng.gen_range(0.0..2.0 * PI);
            terms.push((1.0, k * angle.cos(), k * angle.sin(), phase));
        }
        let total: f64 = terms.iter().map(|t| t.0).sum();
        for t in &mut terms {
            t.0 /= total;
        }
        Self { terms }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(w, kx, ky, ph)| w * (kx * x + ky * y + ph).sin())
            .sum()
    }
}

/// Uniform stream `u = base_speed` carrying `v = amplitude · pattern(x − s·t, y)`,
/// where `s` is the shift in cells per frame. The time step is chosen so the
/// stream moves the pattern by exactly `s` columns per frame, and rows are
/// spaced so the cross-stream component displaces by at most 0.02 cells per
/// frame.
fn translation(dims: Dims, p: &SynthParams, seed: u64) -> Result<FieldSeries> {
    let u0 = positive("base_speed", p.base_speed.unwrap_or(2.0))?;
    let amp = non_negative("amplitude", p.amplitude.unwrap_or(1.0))?;
    let shift = positive("shift", p.shift.unwrap_or(1.0))?;
    let wl = positive("wavelength", p.wavelength.unwrap_or(12.0))?;
    let n = p.modes.unwrap_or(3).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pat = Pattern::random(&mut rng, wl, n);
    let dx = 1.0;
    let dt = shift * dx / u0;
    let dy = (50.0 * amp * dt).max(dx);
    let spacing = Spacing { dx, dy, dt };
    fill(dims, spacing, |x, y, t| {
        (u0, amp * pat.eval(x - shift * t, y))
    })
}

fn random_fourier(dims: Dims, p: &SynthParams, seed: u64) -> Result<FieldSeries> {
    let amp = positive("amplitude", p.amplitude.unwrap_or(1.0))?;
    let wl = positive("wavelength", p.wavelength.unwrap_or(16.0))?;
    let (vx, vy) = p.velocity.unwrap_or((0.6, 0.3));
    let n = p.modes.unwrap_or(6).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pu = Pattern::random(&mut rng, wl, n);
    let pv = Pattern::random(&mut rng, wl, n);
    // slow intrinsic evolution on top of the drift
    let wu = rng.gen_range(0.02..0.08);
    let wv = rng.gen_range(0.02..0.08);
    fill(dims, Spacing::default(), |x, y, t| {
        let (xs, ys) = (x - vx * t, y - vy * t);
        (
            amp * (pu.eval(xs, ys) * (1.0 - 0.2 * (wu * t).sin())),
            amp * (pv.eval(xs, ys) * (1.0 - 0.2 * (wv * t).cos())),
        )
    })
}
