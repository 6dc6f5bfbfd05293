//! Generates each synthetic field and writes it as raw float32 files plus a
//! JSON sidecar.
//!
//! cargo run --release --example generate_field -- [out_dir]

use vfcp::field::{write_raw, Dims};
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};

fn main() -> vfcp::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fields".into()));
    std::fs::create_dir_all(&dir)?;
    let dims = Dims::new(64, 64, 16)?;
    for kind in SynthKind::ALL {
        let f = gen_synthetic(kind, dims, &SynthParams::default(), 1)?;
        let stem = dir.join(kind.name());
        write_raw(
            &f,
            stem.with_extension("u.f32"),
            stem.with_extension("v.f32"),
        )?;
        f.metadata().write(stem.with_extension("json"))?;
        let (lo, hi) = f.value_range();
        println!(
            "{:<15} range [{lo:+.4}, {hi:+.4}]  {} bytes",
            kind.name(),
            f.raw_bytes()
        );
    }

    // knobs are optional; unset ones follow the grid size
    let mut p = SynthParams::default();
    p.set("velocity", "1.5,0.25")?;
    p.set("core_radius", "3")?;
    let fast = gen_synthetic(SynthKind::MovingVortex, dims, &p, 0)?;
    println!("fast vortex: {} samples per component", fast.u().len());
    Ok(())
}
