//! Decodes an archive frame by frame without materializing the whole field.
//!
//! cargo run --release --example streaming_decode

use vfcp::codec::{self, CodecConfig, ErrorBound, FrameSink};
use vfcp::field::Dims;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};

/// Keeps a running maximum speed per frame.
struct PeakSpeed(Vec<f32>);

impl FrameSink for PeakSpeed {
    fn frame(&mut self, _t: usize, u: &[f32], v: &[f32]) -> vfcp::Result<()> {
        let peak = u
            .iter()
            .zip(v)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f32::max);
        self.0.push(peak);
        Ok(())
    }
}

fn main() -> vfcp::Result<()> {
    let f = gen_synthetic(
        SynthKind::RandomFourier,
        Dims::new(128, 128, 12)?,
        &SynthParams::default(),
        3,
    )?;
    let eps = ErrorBound::Relative(0.01).resolve(&f)?;
    let archive = codec::compress(&f, eps, &CodecConfig::default())?;
    let mut sink = PeakSpeed(Vec::new());
    let header = codec::decompress_into(archive.as_bytes(), &mut sink)?;
    println!(
        "{}x{}x{} field, {} archive bytes",
        header.dims.h,
        header.dims.w,
        header.dims.t,
        archive.len()
    );
    for (t, s) in sink.0.iter().enumerate() {
        println!("frame {t:>2}: peak speed {s:.4}");
    }
    Ok(())
}
