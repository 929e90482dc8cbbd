//! s{6}{6} fixed-point weights and the logistic lookup table.

use std::sync::OnceLock;

/// Fraction bits.
pub const FRAC_BITS: u32 = 6;
pub const SCALE: f64 = (1 << FRAC_BITS) as f64;
/// Largest magnitude in raw units: 63 + 63/64.
pub const MAX_RAW: i32 = (1 << (6 + FRAC_BITS)) - 1;

/// Sign, 6 integer bits and 6 fraction bits; stored as raw 1/64 units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FixedPointWeight(i16);

impl FixedPointWeight {
    pub const MAX: FixedPointWeight = FixedPointWeight(MAX_RAW as i16);

    /// Round-to-nearest-even quantization; returns the weight and whether it
    /// saturated.
    pub fn quantize(x: f64) -> (Self, bool) {
        let raw = (x * SCALE).round_ties_even();
        if raw.is_nan() {
            return (FixedPointWeight(0), true);
        }
        let clamped = raw.clamp(-(MAX_RAW as f64), MAX_RAW as f64);
        (FixedPointWeight(clamped as i16), clamped != raw)
    }

    pub fn from_raw(raw: i32) -> Self {
        FixedPointWeight(raw.clamp(-MAX_RAW, MAX_RAW) as i16)
    }

    pub fn raw(self) -> i32 {
        self.0 as i32
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

/// Half-width of the tabulated input range, in integer units.
pub const LUT_HALF_RANGE: i32 = 32;
const LUT_HALF: i32 = LUT_HALF_RANGE << FRAC_BITS;
/// Number of table entries: one per 1/64 step over [-32, 32].
pub const LUT_ENTRIES: usize = (2 * LUT_HALF + 1) as usize;

fn logistic_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (-LUT_HALF..=LUT_HALF)
            .map(|raw| {
                let x = raw as f64 / SCALE;
                let p = 1.0 / (1.0 + (-x).exp());
                (p * 4_294_967_296.0).round() as u64
            })
            .collect()
    })
}

/// `round(σ(x) · 2^32)` for a fixed-point input in raw 1/64 units, clamped
/// to the table range. A 32-bit uniform word `u` maps to spin 1 iff
/// `u < threshold`.
#[inline]
pub fn logistic_threshold(raw_input: i32) -> u64 {
    let idx = (raw_input.clamp(-LUT_HALF, LUT_HALF) + LUT_HALF) as usize;
    logistic_table()[idx]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values_quantize_exactly() {
        assert_eq!(FixedPointWeight::quantize(1.0), (FixedPointWeight(64), false));
        assert_eq!(FixedPointWeight::quantize(-2.5).0.value(), -2.5);
    }

    #[test]
    fn point_seven_rounds_to_45_64ths() {
        let (w, sat) = FixedPointWeight::quantize(0.7);
        assert!(!sat);
        assert_eq!(w.raw(), 45);
        assert_eq!(w.value(), 0.703125);
    }

    #[test]
    fn ties_round_to_even() {
        assert_eq!(FixedPointWeight::quantize(0.5 / 64.0).0.raw(), 0);
        assert_eq!(FixedPointWeight::quantize(1.5 / 64.0).0.raw(), 2);
    }

    #[test]
    fn saturates_at_range() {
        let (w, sat) = FixedPointWeight::quantize(100.0);
        assert!(sat);
        assert_eq!(w.value(), 63.0 + 63.0 / 64.0);
        let (w, sat) = FixedPointWeight::quantize(-100.0);
        assert!(sat);
        assert_eq!(w.raw(), -MAX_RAW);
    }

    #[test]
    fn quantization_error_bounded_by_half_lsb() {
        for i in 0..10_000 {
            let x = -60.0 + 120.0 * (i as f64 / 10_000.0);
            let (w, _) = FixedPointWeight::quantize(x);
            assert!((w.value() - x).abs() <= 1.0 / 128.0 + 1e-12);
        }
    }

    #[test]
    fn table_is_monotone_and_centered() {
        assert_eq!(logistic_threshold(0), 1 << 31);
        let t = logistic_table();
        assert!(t.windows(2).all(|w| w[0] <= w[1]));
        assert!(logistic_threshold(i32::MAX) <= 1 << 32);
        assert_eq!(logistic_threshold(i32::MIN), t[0]);
    }
}
