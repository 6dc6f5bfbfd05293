//! Semi-Lagrangian backtracking on a translating pattern: departure points
//! and how prediction residuals compare with Lorenzo's.
//!
//! cargo run --release --example semi_lagrangian

use vfcp::field::{to_fixed, Dims};
use vfcp::predict::{
    lorenzo3d, sl_departure, sl_predict_frame, CflFactors, SlParams, DEFAULT_D_MAX, DEFAULT_N_MAX,
};
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};

fn main() -> vfcp::Result<()> {
    let f = gen_synthetic(
        SynthKind::Translation,
        Dims::new(64, 64, 8)?,
        &SynthParams::default(),
        1,
    )?;
    let ff = to_fixed(&f);
    let (h, w, fl) = (ff.dims.h, ff.dims.w, ff.dims.frame_len());
    let p = SlParams {
        cfl: CflFactors::new(f.spacing(), ff.scale),
        d_max: DEFAULT_D_MAX,
        n_max: DEFAULT_N_MAX,
    };
    let t = 4;
    let (prev, cur) = ((t - 1) * fl..t * fl, t * fl..(t + 1) * fl);
    for (i, j) in [(10, 10), (32, 32), (50, 5)] {
        let (di, dj) = sl_departure(&ff.u[prev.clone()], &ff.v[prev.clone()], h, w, i, j, &p);
        println!("({i}, {j}) departs from ({di:.3}, {dj:.3})");
    }
    let mut su = vec![0; fl];
    let mut sv = vec![0; fl];
    sl_predict_frame(
        &ff.u[prev.clone()],
        &ff.v[prev.clone()],
        h,
        w,
        &p,
        &mut su,
        &mut sv,
    );
    let (mut l1_sl, mut l1_lz) = (0i64, 0i64);
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let k = i * w + j;
            let lz = lorenzo3d(&ff.v[cur.clone()], Some(&ff.v[prev.clone()]), w, i, j);
            l1_sl += (ff.v[cur.start + k] - sv[k]).abs();
            l1_lz += (ff.v[cur.start + k] - lz).abs();
        }
    }
    println!("interior L1 residual of v at t={t}: semi-Lagrangian {l1_sl}, Lorenzo {l1_lz}");
    Ok(())
}
