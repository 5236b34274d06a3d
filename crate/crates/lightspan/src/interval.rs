//! Interval representation of a path decomposition.
//!
//! Vertex `v` occupying the contiguous bag range `[first, last]` gets the
//! closed interval `[first + (2v+1)/D, last + 1 - (2v+2)/D]` with the common
//! denominator `D = 4n + 4`. Endpoints are stored as exact integer codes
//! (value times `D`), so comparisons are exact. The offsets live in
//! `(0, 1/2)`, which guarantees:
//!   * two intervals intersect iff the vertices share a bag,
//!   * all `2n` endpoints are pairwise distinct (left fractional parts are
//!     below 1/2 and determined by `v`; right ones above 1/2),
//!   * left-endpoint order refines (first bag, vertex id) lexicographically.

use crate::decomposition::PathDecomposition;
use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct IntervalRepresentation {
    den: i64,
    left: Vec<i64>,
    right: Vec<i64>,
    first_bag: Vec<usize>,
    last_bag: Vec<usize>,
}

impl IntervalRepresentation {
    /// Build intervals for vertices `0..n` from their bag ranges. Requires
    /// every vertex to appear in a contiguous nonempty range of bags.
    pub fn from_decomposition(pd: &PathDecomposition, n: usize) -> Result<Self> {
        let mut first = vec![usize::MAX; n];
        let mut last = vec![usize::MAX; n];
        for (b, bag) in pd.bags().iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(invalid(format!("bag vertex {v} out of range for n={n}")));
                }
                if first[v] == usize::MAX {
                    first[v] = b;
                } else if last[v] != b - 1 {
                    return Err(invalid(format!("vertex {v} occurs non-contiguously")));
                }
                last[v] = b;
            }
        }
        for v in 0..n {
            if first[v] == usize::MAX {
                return Err(invalid(format!("vertex {v} appears in no bag")));
            }
        }
        let den = 4 * n as i64 + 4;
        let left = (0..n)
            .map(|v| first[v] as i64 * den + (2 * v as i64 + 1))
            .collect();
        let right = (0..n)
            .map(|v| (last[v] as i64 + 1) * den - (2 * v as i64 + 2))
            .collect();
        Ok(IntervalRepresentation {
            den,
            left,
            right,
            first_bag: first,
            last_bag: last,
        })
    }

    pub fn n(&self) -> usize {
        self.left.len()
    }

    /// Common denominator of all endpoint codes.
    pub fn den(&self) -> i64 {
        self.den
    }

    /// Exact left endpoint code of `v` (actual value is `code / den`).
    pub fn left(&self, v: usize) -> i64 {
        self.left[v]
    }

    pub fn right(&self, v: usize) -> i64 {
        self.right[v]
    }

    pub fn first_bag(&self, v: usize) -> usize {
        self.first_bag[v]
    }

    pub fn last_bag(&self, v: usize) -> usize {
        self.last_bag[v]
    }

    pub fn intersects(&self, u: usize, v: usize) -> bool {
        self.left[u].max(self.left[v]) <= self.right[u].min(self.right[v])
    }

    /// Left endpoint of the intersection of `I_u` and `I_v`; only meaningful
    /// when the intervals intersect.
    pub fn meet_left(&self, u: usize, v: usize) -> i64 {
        self.left[u].max(self.left[v])
    }

    /// Vertex with the minimum left endpoint in `set` (all of `0..n` if
    /// `None`). Endpoints are distinct so this is unambiguous.
    pub fn leftmost(&self, set: Option<&[usize]>) -> usize {
        match set {
            Some(s) => *s.iter().min_by_key(|&&v| self.left[v]).expect("empty set"),
            None => (0..self.n()).min_by_key(|&v| self.left[v]).expect("empty"),
        }
    }

    pub fn rightmost_start(&self, set: Option<&[usize]>) -> usize {
        match set {
            Some(s) => *s.iter().max_by_key(|&&v| self.left[v]).expect("empty set"),
            None => (0..self.n()).max_by_key(|&v| self.left[v]).expect("empty"),
        }
    }
}
