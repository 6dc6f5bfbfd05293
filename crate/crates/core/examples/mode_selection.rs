//! Per-block predictor choices of the mixture on a vortex pair, printed as a
//! map per frame (`S` semi-Lagrangian, `.` Lorenzo).
//!
//! cargo run --release --example mode_selection

use vfcp::codec::{self, CodecConfig, ErrorBound};
use vfcp::field::Dims;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};

fn main() -> vfcp::Result<()> {
    let f = gen_synthetic(
        SynthKind::VortexPair,
        Dims::new(64, 96, 6)?,
        &SynthParams::default(),
        1,
    )?;
    let eps = ErrorBound::Relative(0.01).resolve(&f)?;
    let cfg = CodecConfig::default();
    let archive = codec::compress(&f, eps, &cfg)?;
    let s = codec::read_streams(archive.as_bytes())?;
    let (rows, cols) = (64usize.div_ceil(cfg.mop.bx), 96usize.div_ceil(cfg.mop.by));
    for (t, frame) in s.modes.chunks(rows * cols).enumerate() {
        println!("frame {}:", t + 1);
        for r in frame.chunks(cols) {
            println!(
                "  {}",
                r.iter()
                    .map(|&m| if m { 'S' } else { '.' })
                    .collect::<String>()
            );
        }
    }
    Ok(())
}
