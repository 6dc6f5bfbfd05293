//! Compression ratio of each predictor on every synthetic generator.
//!
//! cargo run --release --example compare_predictors -- [HxWxT] [eps_rel]

use vfcp::codec::{compress_with_stats, CodecConfig, ErrorBound, Predictor};
use vfcp::field::Dims;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};
use vfcp::track::verify;

fn main() -> vfcp::Result<()> {
    let mut args = std::env::args().skip(1);
    let dims = Dims::parse(&args.next().unwrap_or_else(|| "64x64x16".into()))?;
    let rel: f64 = args
        .next()
        .map(|s| s.parse().expect("eps_rel"))
        .unwrap_or(0.01);
    println!("kind,predictor,cr,psnr,fc_t,fc_s,sl_blocks,lorenzo_blocks,ms");
    for kind in SynthKind::ALL {
        let f = gen_synthetic(kind, dims, &SynthParams::default(), 1)?;
        let eps = ErrorBound::Relative(rel).resolve(&f)?;
        for predictor in Predictor::ALL {
            let cfg = CodecConfig {
                predictor,
                ..Default::default()
            };
            let (archive, stats) = compress_with_stats(&f, eps, &cfg)?;
            let g = vfcp::decompress(archive.as_bytes())?;
            let r = verify(&f, &g, Some(archive.len()), Some(archive.header()?.scale))?;
            println!(
                "{},{},{:.3},{:.2},{},{},{},{},{}",
                kind.name(),
                predictor,
                r.cr,
                r.quality.psnr_joint,
                r.fc_t,
                r.fc_s,
                stats.sl_blocks,
                stats.lorenzo_blocks,
                stats.elapsed.as_millis()
            );
        }
    }
    Ok(())
}
