//! Exact rank of integer matrices.
//!
//! Rows are reduced one at a time against an echelon basis using only
//! integer combinations `b[c]·r − r[c]·b`, followed by division by the row
//! content. Every intermediate row is an integer vector, so the rank over the
//! rationals comes out exact. The fast path runs on `i128` with overflow
//! checks; if any product overflows the whole computation is redone on
//! arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

trait ExactInt: Clone + Sized {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `a·x − b·y`, or `None` on overflow.
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    fn is_one(&self) -> bool;
}

impl ExactInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
}

struct Echelon<T> {
    pivots: Vec<usize>,
    rows: Vec<Vec<T>>,
}

impl<T: ExactInt> Echelon<T> {
    fn new() -> Self {
        Self {
            pivots: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Reduces `row` against the basis and appends it if independent.
    /// Returns `None` on overflow.
    fn insert(&mut self, mut row: Vec<T>) -> Option<bool> {
        for (pivot, basis) in self.pivots.iter().zip(&self.rows) {
            if row[*pivot].is_zero() {
                continue;
            }
            let g = basis[*pivot].gcd(&row[*pivot]);
            let a = basis[*pivot].div_exact(&g);
            let b = row[*pivot].div_exact(&g);
            for (r, bv) in row.iter_mut().zip(basis) {
                *r = T::combine(&a, r, &b, bv)?;
            }
            normalize(&mut row);
        }
        match row.iter().position(|v| !v.is_zero()) {
            None => Some(false),
            Some(pivot) => {
                if row[pivot].is_negative() {
                    row.iter_mut().for_each(|v| *v = v.neg());
                }
                self.pivots.push(pivot);
                self.rows.push(row);
                Some(true)
            }
        }
    }
}

fn normalize<T: ExactInt>(row: &mut [T]) {
    let mut content: Option<T> = None;
    for v in row.iter().filter(|v| !v.is_zero()) {
        let g = match &content {
            None => v.gcd(v),
            Some(c) => c.gcd(v),
        };
        if g.is_one() {
            return;
        }
        content = Some(g);
    }
    if let Some(c) = content {
        row.iter_mut().for_each(|v| *v = v.div_exact(&c));
    }
}

fn rank_with<T: ExactInt>(rows: &[Vec<i64>], ncols: usize) -> Option<usize> {
    let mut echelon = Echelon::<T>::new();
    for row in rows {
        if echelon.rows.len() == ncols {
            break;
        }
        echelon.insert(row.iter().map(|&v| T::from_i64(v)).collect())?;
    }
    Some(echelon.rows.len())
}

/// Exact rank over the rationals of the matrix with the given integer rows.
///
/// Panics if the rows have different lengths.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let ncols = first.len();
    assert!(
        rows.iter().all(|r| r.len() == ncols),
        "rows must share one length"
    );
    rank_with::<i128>(rows, ncols).unwrap_or_else(|| {
        rank_with::<BigInt>(rows, ncols).expect("big-integer elimination cannot overflow")
    })
}

/// Dimension of the affine hull of `points`: the rank of `p_i − p_0`.
/// `None` for an empty input.
pub fn affine_dimension(points: &[Vec<i64>]) -> Option<usize> {
    let (base, rest) = points.split_first()?;
    let diffs: Vec<Vec<i64>> = rest
        .iter()
        .map(|p| {
            assert_eq!(p.len(), base.len(), "points must share one dimension");
            p.iter().zip(base).map(|(a, b)| a - b).collect()
        })
        .collect();
    Some(integer_rank(&diffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0, 0]]), 0);
        assert_eq!(integer_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(integer_rank(&[vec![1, 2], vec![3, 4]]), 2);
        assert_eq!(
            integer_rank(&[vec![2, 4, 6], vec![1, 1, 1], vec![3, 5, 7], vec![0, 2, 4]]),
            2
        );
    }

    #[test]
    fn triangle_and_single_point() {
        assert_eq!(affine_dimension(&[vec![1, 1]]), Some(0));
        assert_eq!(affine_dimension(&[vec![1, 1], vec![1, -1], vec![-1, 1]]), Some(2));
        assert_eq!(affine_dimension(&[]), None);
    }

    #[test]
    fn falls_back_to_big_integers() {
        // Hilbert-like rows with large entries push the i128 path over.
        let big = 1i64 << 62;
        let rows = vec![
            vec![big, big - 1, 3, big - 7],
            vec![big - 3, big, big - 11, 5],
            vec![7, big - 5, big, big - 1],
            vec![big - 1, 1, big - 9, big],
        ];
        assert!(rank_with::<i128>(&rows, 4).is_none());
        assert_eq!(integer_rank(&rows), rank_with::<BigInt>(&rows, 4).unwrap());
        assert_eq!(integer_rank(&rows), 4);
    }
}
