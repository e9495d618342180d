//! Mixed-radix indexing for dense arrays over `S^k`.
//!
//! Multi-indices are stored row-major: the first coordinate is the most
//! significant digit, so the block of ranks sharing a fixed prefix is
//! contiguous.

use crate::error::{Error, Result};

/// Default cap on dense cell counts (`|S|^n`).
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 24;

/// `base^exp` as u128, or an error if it exceeds `budget`.
pub fn checked_cells(base: usize, exp: usize, budget: u64) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc > budget as u128 {
            return Err(Error::CapacityExceeded {
                required: acc,
                budget,
            });
        }
    }
    Ok(acc as usize)
}

/// Row-major rank of a multi-index over an alphabet of size `base`.
pub fn rank(base: usize, digits: &[usize]) -> usize {
    let mut r = 0usize;
    for &d in digits {
        debug_assert!(d < base);
        r = r * base + d;
    }
    r
}

/// Writes the `len` digits of `rank` into `out` (most significant first).
pub fn unrank(base: usize, len: usize, mut rank: usize, out: &mut [usize]) {
    debug_assert_eq!(out.len(), len);
    for slot in out.iter_mut().rev() {
        *slot = rank % base;
        rank /= base;
    }
}

/// Iterator over all multi-indices of `S^len` in rank order.
///
/// Yields a shared slice; callers copy if they need to keep it.
pub struct MultiIndexIter {
    base: usize,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl MultiIndexIter {
    pub fn new(base: usize, len: usize) -> Self {
        MultiIndexIter {
            base,
            digits: vec![0; len],
            started: false,
            done: base == 0 && len > 0,
        }
    }

    /// Advances the odometer and returns the current digits, or `None`.
    pub fn next_index(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        // increment least-significant digit with carry
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.base {
                return Some(&self.digits);
            }
            self.digits[pos] = 0;
        }
        self.done = true;
        None
    }
}

/// Compensated (Kahan) sum; keeps large dense reductions stable.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_unrank_roundtrip() {
        let mut buf = [0usize; 3];
        for r in 0..27 {
            unrank(3, 3, r, &mut buf);
            assert_eq!(rank(3, &buf), r);
        }
    }

    #[test]
    fn rank_is_row_major() {
        // first coordinate most significant
        assert_eq!(rank(2, &[1, 0, 0]), 4);
        assert_eq!(rank(2, &[0, 0, 1]), 1);
    }

    #[test]
    fn odometer_covers_all_ranks() {
        let mut it = MultiIndexIter::new(3, 2);
        let mut seen = Vec::new();
        while let Some(d) = it.next_index() {
            seen.push(rank(3, d));
        }
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn zero_length_index_has_one_element() {
        let mut it = MultiIndexIter::new(2, 0);
        assert!(it.next_index().is_some());
        assert!(it.next_index().is_none());
    }

    #[test]
    fn cells_budget_enforced() {
        assert_eq!(checked_cells(2, 10, 1 << 24).unwrap(), 1024);
        let err = checked_cells(2, 30, 1 << 24).unwrap_err();
        assert!(err.is_capacity());
    }

    #[test]
    fn kahan_sums_exactly_on_small_inputs() {
        let v = [0.1f64; 10];
        let s = kahan_sum(v.iter().copied());
        assert!((s - 1.0).abs() < 1e-15);
    }
}
