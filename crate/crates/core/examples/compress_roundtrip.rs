//! Compresses a field, decompresses it and checks that the error bound and
//! every critical point trajectory survived.
//!
//! cargo run --release --example compress_roundtrip

use vfcp::codec::{self, CodecConfig, ErrorBound};
use vfcp::field::Dims;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};
use vfcp::track::verify;

fn main() -> vfcp::Result<()> {
    let f = gen_synthetic(
        SynthKind::VortexPair,
        Dims::new(96, 96, 24)?,
        &SynthParams::default(),
        1,
    )?;
    for rel in [0.001, 0.01, 0.05, 0.2] {
        let eps = ErrorBound::Relative(rel).resolve(&f)?;
        let (archive, stats) = codec::compress_with_stats(&f, eps, &CodecConfig::default())?;
        let g = codec::decompress(archive.as_bytes())?;
        let r = verify(&f, &g, Some(archive.len()), Some(archive.header()?.scale))?;
        assert!(r.quality.max_abs_err <= eps);
        assert!(r.passed());
        println!(
            "eps {rel:>5}: cr {:>7.2}  psnr {:>6.2} dB  fc_t {} fc_s {}  trajectories {}  lossless vertices {}",
            r.cr, r.quality.psnr_joint, r.fc_t, r.fc_s, r.n_traj_recon, stats.lossless_vertices
        );
    }
    Ok(())
}
