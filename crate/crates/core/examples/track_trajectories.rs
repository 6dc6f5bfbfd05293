//! Extracts critical point trajectories and prints each one's extent.
//!
//! cargo run --release --example track_trajectories -- [kind]

use vfcp::field::{to_fixed, Dims};
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};
use vfcp::track::extract_trajectories;

fn main() -> vfcp::Result<()> {
    let kind: SynthKind = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "vortex_pair".into())
        .parse()?;
    let f = gen_synthetic(kind, Dims::new(64, 64, 16)?, &SynthParams::default(), 1)?;
    let g = extract_trajectories(&to_fixed(&f))?;
    println!(
        "{}: {} crossed faces ({} in slices), {} trajectories",
        kind.name(),
        g.nodes.len(),
        g.slice_faces().len(),
        g.components.len()
    );
    for (c, traj) in g.components.iter().enumerate() {
        let first = traj.points.first().unwrap();
        let last = traj.points.last().unwrap();
        println!(
            "  #{c}: {} points, ({:.2}, {:.2}, t={:.2}) -> ({:.2}, {:.2}, t={:.2}){}",
            traj.points.len(),
            first[0],
            first[1],
            first[2],
            last[0],
            last[1],
            last[2],
            if traj.is_loop { ", closed" } else { "" }
        );
    }
    Ok(())
}
