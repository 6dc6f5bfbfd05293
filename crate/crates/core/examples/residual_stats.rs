//! Residual index statistics of Lorenzo and semi-Lagrangian prediction on an
//! advected pattern: distribution, tail and zero-run lengths.
//!
//! cargo run --release --example residual_stats -- [out_dir]

use vfcp::codec::{self, CodecConfig, ErrorBound, Predictor};
use vfcp::field::Dims;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};
use vfcp::track::residual_stats;

fn main() -> vfcp::Result<()> {
    let out = std::path::PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "residual_stats".into()),
    );
    let f = gen_synthetic(
        SynthKind::Translation,
        Dims::new(96, 96, 24)?,
        &SynthParams::default(),
        1,
    )?;
    let eps = ErrorBound::Relative(0.01).resolve(&f)?;
    for predictor in [Predictor::Lorenzo, Predictor::Sl] {
        let cfg = CodecConfig {
            predictor,
            ..Default::default()
        };
        let archive = codec::compress(&f, eps, &cfg)?;
        let s = codec::read_streams(archive.as_bytes())?;
        let r = residual_stats(&s.residuals);
        r.write_csv(out.join(predictor.to_string()))?;
        let p0 = r.pmf.iter().find(|p| p.0 == 0).map_or(0.0, |p| p.1);
        let p1 = r
            .pmf
            .iter()
            .filter(|p| p.0.abs() <= 1)
            .map(|p| p.1)
            .sum::<f64>();
        println!(
            "{predictor:>7}: P(0) {p0:.3}  P(|i|<=1) {p1:.3}  zero-run mean {:.2}  p75/p80/p85/p90 {:?}",
            r.run_mean,
            r.run_percentiles.map(|p| p.1)
        );
    }
    println!("tables written under {}", out.display());
    Ok(())
}
