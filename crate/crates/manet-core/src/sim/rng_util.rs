//! Division-free uniform index sampling for the hot slot loop.

use rand::Rng;

/// Exactly uniform draw from `0..n` (n >= 1) by widening multiply with
/// rejection. The division that computes the rejection threshold only runs
/// when the low word lands inside `0..n`, which for the cell-sized ranges
/// used here is a ~1e-9 event.
#[inline]
pub fn uniform_index<R: Rng>(rng: &mut R, n: u32) -> u32 {
    debug_assert!(n >= 1);
    loop {
        let x = rng.gen::<u32>();
        let m = u64::from(x) * u64::from(n);
        let lo = m as u32;
        if lo >= n {
            return (m >> 32) as u32;
        }
        let threshold = n.wrapping_neg() % n;
        if lo >= threshold {
            return (m >> 32) as u32;
        }
    }
}
