//! Linear-scaling residual quantization.

pub const DEFAULT_RADIUS: u32 = 1 << 15;

/// `round(n / d)` half away from zero, for `d > 0`.
#[inline]
pub fn div_round(n: i64, d: i64) -> i64 {
    debug_assert!(d > 0);
    let q = (n.abs() + d / 2) / d;
    if n < 0 {
        -q
    } else {
        q
    }
}

/// Quantization index of residual `r` under bound `e_q`, or `None` when it
/// falls outside `radius` (the sample is then stored losslessly).
#[inline]
pub fn quantize_residual(r: i64, e_q: i64, radius: u32) -> Option<i64> {
    debug_assert!(e_q > 0);
    let step = 2 * e_q;
    let idx = div_round(r, step);
    if idx.unsigned_abs() >= radius as u64 || (r - idx * step).abs() > e_q {
        None
    } else {
        Some(idx)
    }
}

#[inline]
pub fn dequantize(pred: i64, idx: i64, e_q: i64) -> i64 {
    pred + 2 * e_q * idx
}

#[inline]
pub fn zigzag(x: i64) -> u32 {
    ((x << 1) ^ (x >> 63)) as u32
}

#[inline]
pub fn unzigzag(z: u32) -> i64 {
    let z = z as i64;
    (z >> 1) ^ -(z & 1)
}

/// Stream symbol of a component: 0 marks a lossless fallback, otherwise
/// `zigzag(index) + 1`.
#[inline]
pub fn residual_symbol(idx: Option<i64>) -> u32 {
    match idx {
        None => 0,
        Some(i) => zigzag(i) + 1,
    }
}

#[inline]
pub fn symbol_index(sym: u32) -> Option<i64> {
    if sym == 0 {
        None
    } else {
        Some(unzigzag(sym - 1))
    }
}

/// Largest residual symbol for a given radius.
pub fn max_residual_symbol(radius: u32) -> u32 {
    zigzag(-(radius as i64 - 1)).max(zigzag(radius as i64 - 1)) + 1
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn examples() {
        assert_eq!(quantize_residual(0, 10, DEFAULT_RADIUS), Some(0));
        // r = 3.2·e_q -> index round(1.6) = 2, error 0.8·e_q
        assert_eq!(quantize_residual(32, 10, DEFAULT_RADIUS), Some(2));
        assert_eq!(quantize_residual(10_000_000, 10, DEFAULT_RADIUS), None);
        assert_eq!(div_round(5, 2), 3);
        assert_eq!(div_round(-5, 2), -3);
        assert_eq!(div_round(3, 6), 1);
        assert_eq!(div_round(-3, 6), -1);
        assert_eq!(div_round(2, 6), 0);
    }

    #[test]
    fn symbols() {
        assert_eq!(residual_symbol(None), 0);
        assert_eq!(residual_symbol(Some(0)), 1);
        assert_eq!(residual_symbol(Some(-1)), 2);
        assert_eq!(residual_symbol(Some(1)), 3);
        assert_eq!(max_residual_symbol(4), 7);
        for k in -5..5 {
            assert_eq!(symbol_index(residual_symbol(Some(k))), Some(k));
        }
    }

    proptest! {
        #[test]
        fn div_round_matches_float(n in -1_000_000i64..1_000_000, d in 1i64..1000) {
            let f = (n as f64 / d as f64).round() as i64;
            prop_assert_eq!(div_round(n, d), f);
        }

        #[test]
        fn reconstruction_within_bound(r in -(1i64 << 40)..(1i64 << 40), e in 1i64..(1 << 20), pred in -1000i64..1000) {
            if let Some(idx) = quantize_residual(r, e, DEFAULT_RADIUS) {
                prop_assert!((dequantize(pred, idx, e) - (pred + r)).abs() <= e);
                prop_assert!(idx.unsigned_abs() < DEFAULT_RADIUS as u64);
            } else {
                prop_assert!((r / (2 * e)).unsigned_abs() + 1 >= DEFAULT_RADIUS as u64);
            }
        }

        #[test]
        fn zigzag_round_trip(x in -(1i64 << 30)..(1i64 << 30)) {
            prop_assert_eq!(unzigzag(zigzag(x)), x);
        }
    }
}
