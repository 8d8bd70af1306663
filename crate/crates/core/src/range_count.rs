//! Static 2D dominance counting over integer points.
//!
//! Points are sorted by x; their y-values go into a wavelet matrix so a
//! rectangle count is two rank descents, `O(log n)` each.

use std::ops::Range;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RangeError {
    #[error("intervals {0:?} and {1:?} overlap")]
    Overlap(Range<usize>, Range<usize>),
    #[error("interval {0:?} exceeds the {1} positions")]
    OutOfRange(Range<usize>, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
struct BitRank {
    words: Vec<u64>,
    before: Vec<u32>,
}

impl BitRank {
    fn new(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len() / 64 + 1];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut before = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            before.push(acc);
            acc += w.count_ones();
        }
        BitRank { words, before }
    }

    /// Ones among the first `i` bits.
    #[inline]
    fn rank1(&self, i: usize) -> usize {
        let (w, b) = (i / 64, i % 64);
        let mask = if b == 0 { 0 } else { u64::MAX >> (64 - b) };
        self.before[w] as usize + (self.words[w] & mask).count_ones() as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
struct WaveletMatrix {
    len: usize,
    levels: Vec<BitRank>,
    zeros: Vec<usize>,
}

impl WaveletMatrix {
    fn new(mut values: Vec<u32>, bits: u32) -> Self {
        let len = values.len();
        let mut levels = Vec::with_capacity(bits as usize);
        let mut zeros = Vec::with_capacity(bits as usize);
        for level in (0..bits).rev() {
            let flags: Vec<bool> = values.iter().map(|&v| v >> level & 1 == 1).collect();
            levels.push(BitRank::new(&flags));
            let mut next: Vec<u32> = values
                .iter()
                .copied()
                .filter(|&v| v >> level & 1 == 0)
                .collect();
            zeros.push(next.len());
            next.extend(values.iter().copied().filter(|&v| v >> level & 1 == 1));
            values = next;
        }
        WaveletMatrix { len, levels, zeros }
    }

    /// Values `< bound` among positions `[l, r)`.
    fn count_less(&self, mut l: usize, mut r: usize, bound: u64) -> usize {
        let bits = self.levels.len() as u32;
        if bound >= 1u64 << bits {
            return r - l;
        }
        let mut res = 0;
        for (k, lv) in self.levels.iter().enumerate() {
            let bit = bound >> (bits - 1 - k as u32) & 1;
            let (l1, r1) = (lv.rank1(l), lv.rank1(r));
            let (l0, r0) = (l - l1, r - r1);
            if bit == 1 {
                res += r0 - l0;
                l = self.zeros[k] + l1;
                r = self.zeros[k] + r1;
            } else {
                l = l0;
                r = r0;
            }
        }
        res
    }
}

/// Counts weighted point pairs `{a, b}` with one end in each of two disjoint
/// position ranges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RangeCountTable {
    positions: usize,
    points: usize,
    x_start: Vec<u32>,
    wm: WaveletMatrix,
}

impl RangeCountTable {
    /// `pairs` are unordered position pairs over `0..positions`; repeats add up.
    pub fn new(positions: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut pts: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        pts.sort_unstable();
        let mut x_start = vec![0u32; positions + 1];
        for &(x, _) in &pts {
            x_start[x as usize + 1] += 1;
        }
        for i in 0..positions {
            x_start[i + 1] += x_start[i];
        }
        let bits = (u32::BITS - (positions as u32).leading_zeros()).max(1);
        let points = pts.len();
        let wm = WaveletMatrix::new(pts.into_iter().map(|(_, y)| y).collect(), bits);
        RangeCountTable {
            positions,
            points,
            x_start,
            wm,
        }
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    /// Stored points, repeats included.
    pub fn point_count(&self) -> usize {
        self.points
    }

    /// Pairs with one end in `a` and the other in `b` (half-open ranges).
    pub fn range_count(&self, a: Range<usize>, b: Range<usize>) -> Result<u64, RangeError> {
        for r in [&a, &b] {
            if r.end > self.positions && !r.is_empty() {
                return Err(RangeError::OutOfRange(r.clone(), self.positions));
            }
        }
        if a.is_empty() || b.is_empty() {
            return Ok(0);
        }
        if a.start < b.end && b.start < a.end {
            return Err(RangeError::Overlap(a, b));
        }
        let (lo, hi) = if a.start < b.start { (a, b) } else { (b, a) };
        let (l, r) = (
            self.x_start[lo.start] as usize,
            self.x_start[lo.end] as usize,
        );
        let c = self.wm.count_less(l, r, hi.end as u64) - self.wm.count_less(l, r, hi.start as u64);
        Ok(c as u64)
    }
}
