//! Per-face and per-vertex error bounds, and how they spread over a frame.
//!
//! cargo run --release --example error_bounds

use vfcp::eb::{
    derive_triangle_eb, derive_vertex_eb, quantize_eb, tau_prime, EbCode, DEFAULT_K_MAX,
};
use vfcp::field::{to_fixed, Dims};
use vfcp::mesh::IncidenceTable;
use vfcp::predicates::build_critical_face_set;
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};

fn main() -> vfcp::Result<()> {
    println!(
        "triangle u=(2,-1,-1) v=(0,1,-1): eb {}",
        derive_triangle_eb([2, -1, -1], [0, 1, -1])
    );
    println!(
        "triangle u=(5,4,3) v=(1,2,1):    eb {}",
        derive_triangle_eb([5, 4, 3], [1, 2, 1])
    );

    let f = gen_synthetic(
        SynthKind::MovingVortex,
        Dims::new(48, 48, 6)?,
        &SynthParams::default(),
        1,
    )?;
    let ff = to_fixed(&f);
    let (lo, hi) = f.value_range();
    let tau = tau_prime(0.01 * (hi - lo) as f64, ff.scale.factor());
    let crit = build_critical_face_set(&ff);
    let lossless = crit.vertices();
    let table = IncidenceTable::new();
    let mut levels = [0usize; DEFAULT_K_MAX as usize + 2];
    let t = 2;
    for i in 0..ff.dims.h {
        for j in 0..ff.dims.w {
            let id = ff.dims.vid(t, i, j);
            let code = if lossless.contains(&id) {
                EbCode::Lossless
            } else {
                quantize_eb(
                    derive_vertex_eb(&ff.dims, &table, &ff.u, &ff.v, t, i, j, tau),
                    tau,
                    DEFAULT_K_MAX,
                )
            };
            levels[code.symbol() as usize] += 1;
        }
    }
    println!(
        "frame {t}, tau' = {tau} fixed units (scale 2^{}):",
        ff.scale.exponent
    );
    println!("  lossless: {}", levels[0]);
    for (k, n) in levels.iter().enumerate().skip(1).filter(|(_, &n)| n > 0) {
        println!("  tau'/2^{}: {n}", k - 1);
    }
    Ok(())
}
