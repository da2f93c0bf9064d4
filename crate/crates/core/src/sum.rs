//! Order-fixed summation helpers. Results never depend on thread count or
//! chunking, which keeps reports byte-reproducible.

use std::ops::Add;

const BLOCK: usize = 128;

/// Pairwise sum of `f` mapped over `0..len`, without materializing the
/// whole mapped sequence.
pub(crate) fn pairwise_map<T, F>(len: usize, f: F) -> T
where
    T: Copy + Add<Output = T> + Default,
    F: Fn(usize) -> T + Copy,
{
    fn rec<T, F>(lo: usize, hi: usize, f: F) -> T
    where
        T: Copy + Add<Output = T> + Default,
        F: Fn(usize) -> T + Copy,
    {
        if hi - lo <= BLOCK {
            return (lo..hi).fold(T::default(), |acc, i| acc + f(i));
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, len, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_small_input() {
        assert_eq!(pairwise_map(1000, |i| i as f64), 499_500.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_map(0, |i| i as f64), 0.0);
    }
}
