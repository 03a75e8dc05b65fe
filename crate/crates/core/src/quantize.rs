//! Uniform slab quantization of field ranges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `q` equal slabs over `[lo, hi]`.
///
/// Slab `k` covers `(lo + k·w, lo + (k+1)·w]`; slab 0 also includes `lo` and
/// values outside the range are clamped to the end slabs. A constant range
/// (`hi == lo`) uses `w = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantization {
    lo: f64,
    hi: f64,
    slabs: usize,
}

impl Quantization {
    pub fn new(lo: f64, hi: f64, slabs: usize) -> Result<Self> {
        if slabs == 0 {
            return Err(Error::ZeroSlabs);
        }
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::Invalid(format!("invalid quantization range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, slabs })
    }

    /// Covers the union of all given `(min, max)` ranges.
    pub fn covering(ranges: &[(f64, f64)], slabs: usize) -> Result<Self> {
        let lo = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = ranges.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        if ranges.is_empty() {
            return Err(Error::Invalid("no ranges to quantize".into()));
        }
        Self::new(lo, hi, slabs)
    }

    /// Shorthand for [`covering`](Self::covering) over the value ranges of
    /// several arrays.
    pub fn covering_values(values: &[&[f64]], slabs: usize) -> Result<Self> {
        let ranges: Vec<_> = values.iter().filter_map(|v| value_range(v)).collect();
        Self::covering(&ranges, slabs)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn slabs(&self) -> usize {
        self.slabs
    }

    pub fn width(&self) -> f64 {
        if self.hi > self.lo {
            (self.hi - self.lo) / self.slabs as f64
        } else {
            1.0
        }
    }

    /// Slab boundary `j` for `0 ≤ j ≤ q`. Computed so that doubling `q`
    /// reproduces every old boundary bit for bit.
    pub fn level(&self, j: usize) -> f64 {
        if self.hi > self.lo {
            if j == self.slabs {
                self.hi
            } else {
                self.lo + (self.hi - self.lo) * (j as f64 / self.slabs as f64)
            }
        } else {
            self.lo + j as f64
        }
    }

    pub fn bin(&self, v: f64) -> usize {
        // Linear guess, then fix against the exact boundaries.
        let guess = ((v - self.lo) / self.width()).ceil() - 1.0;
        let mut k = if guess.is_nan() || guess < 0.0 {
            0
        } else {
            (guess as usize).min(self.slabs - 1)
        };
        while k > 0 && v <= self.level(k) {
            k -= 1;
        }
        while k + 1 < self.slabs && v > self.level(k + 1) {
            k += 1;
        }
        k
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.level(k) + self.level(k + 1))
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.slabs).map(|k| self.center(k)).collect()
    }

    /// Bins touched by the closed interval `[a, b]`.
    pub fn bins_meeting(&self, a: f64, b: f64) -> std::ops::RangeInclusive<usize> {
        self.bin(a)..=self.bin(b)
    }
}

/// `(min, max)` of a non-empty array.
pub fn value_range(values: &[f64]) -> Option<(f64, f64)> {
    let first = *values.first()?;
    Some(values.iter().fold((first, first), |(a, b), &v| (a.min(v), b.max(v))))
}
