//! `ℤⁿ` under the reverse lexicographic order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A vector of `ℤⁿ`, ordered by its last coordinate first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RloVec(pub Vec<i64>);

impl RloVec {
    pub fn zero(n: usize) -> Self {
        RloVec(vec![0; n])
    }

    /// `e_i`, the value of `T_{i+1}`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        RloVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<i64> {
        self.0.last().copied()
    }

    /// The last `r` coordinates.
    pub fn project(&self, r: usize) -> RloVec {
        RloVec(self.0[self.0.len() - r..].to_vec())
    }

    /// The first `n - 1` coordinates.
    pub fn inner(&self) -> RloVec {
        RloVec(self.0[..self.0.len().saturating_sub(1)].to_vec())
    }

    /// `(self, c)`, appending an outermost coordinate.
    pub fn extend_outer(&self, c: i64) -> RloVec {
        let mut v = self.0.clone();
        v.push(c);
        RloVec(v)
    }

    pub fn scale(&self, k: i64) -> RloVec {
        RloVec(self.0.iter().map(|x| x * k).collect())
    }
}

pub fn rlo_compare(a: &RloVec, b: &RloVec) -> Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.iter().rev().cmp(b.0.iter().rev()))
}

impl Ord for RloVec {
    fn cmp(&self, other: &Self) -> Ordering {
        rlo_compare(self, other)
    }
}

impl PartialOrd for RloVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &RloVec {
    type Output = RloVec;
    fn add(self, rhs: &RloVec) -> RloVec {
        assert_eq!(self.len(), rhs.len(), "rank mismatch");
        RloVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RloVec {
    type Output = RloVec;
    fn sub(self, rhs: &RloVec) -> RloVec {
        assert_eq!(self.len(), rhs.len(), "rank mismatch");
        RloVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RloVec {
    type Output = RloVec;
    fn neg(self) -> RloVec {
        RloVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RloVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_points(n: usize, r: i64) -> Vec<RloVec> {
        let mut out = vec![RloVec(vec![])];
        for _ in 0..n {
            out = out.into_iter().flat_map(|v| (-r..=r).map(move |x| v.extend_outer(x))).collect();
        }
        out
    }

    #[test]
    fn last_coordinate_decides() {
        assert_eq!(rlo_compare(&RloVec(vec![1, 0]), &RloVec(vec![0, 1])), Ordering::Less);
        assert_eq!(rlo_compare(&RloVec(vec![5, 2]), &RloVec(vec![5, 2])), Ordering::Equal);
        assert!(RloVec(vec![-9, 0, 1]) > RloVec(vec![9, 9, 0]));
    }

    #[test]
    fn translation_invariant_on_a_box() {
        let pts = box_points(2, 2);
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    if a <= b {
                        assert!((a + c) <= (b + c));
                    }
                }
            }
        }
    }

    #[test]
    fn projections_are_monotone() {
        let pts = box_points(3, 1);
        for a in &pts {
            for b in &pts {
                for r in 1..=3 {
                    if a <= b {
                        assert!(a.project(r) <= b.project(r));
                    }
                }
                assert_eq!(a.project(3), *a);
                assert_eq!(a.project(2).project(1), a.project(1));
            }
        }
    }
}
