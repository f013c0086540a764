//! Dense integer matrices, Smith normal form with unimodular witnesses,
//! integer kernels and linear Diophantine solving.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<i64>>", try_from = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is needed when there are no rows.
    pub fn from_rows(rows: Vec<Vec<i64>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(IntMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<i64>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn hconcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    // row_dst += c * row_src
    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        if c == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += c * v;
        }
    }

    // col_dst += c * col_src
    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        if c == 0 {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += c * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, String> {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(rows, cols).ok_or_else(|| "ragged matrix rows".to_string())
    }
}

/// Smith normal form `left * m * right = diag` together with the inverses of
/// both transforms.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, length `min(rows, cols)`, non-negative, each dividing the next;
    /// zeros trail the non-zero entries.
    pub diagonal: Vec<i64>,
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
    pub right_inv: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|&&d| d != 0).count()
    }
}

struct SmithState {
    a: IntMatrix,
    left: IntMatrix,
    left_inv: IntMatrix,
    right: IntMatrix,
    right_inv: IntMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.left.swap_rows(i, j);
        self.left_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.right.swap_cols(i, j);
        self.right_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        self.a.add_row(dst, src, c);
        self.left.add_row(dst, src, c);
        self.left_inv.add_col(src, dst, -c);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        self.a.add_col(dst, src, c);
        self.right.add_col(dst, src, c);
        self.right_inv.add_row(src, dst, -c);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.left.negate_row(i);
        self.left_inv.negate_col(i);
    }

    fn pivot_min(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let v = self.a[(i, j)].abs();
                if v != 0 && best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Computes the Smith normal form of `m` with witness transforms.
pub fn smith_decompose(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows, m.cols);
    let mut st = SmithState {
        a: m.clone(),
        left: IntMatrix::identity(rows),
        left_inv: IntMatrix::identity(rows),
        right: IntMatrix::identity(cols),
        right_inv: IntMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    for t in 0..steps {
        let Some((pi, pj)) = st.pivot_min(t) else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let p = st.a[(t, t)];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = st.a[(i, t)].div_euclid(p);
                st.add_row(i, t, -q);
                if st.a[(i, t)] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = st.a[(t, j)].div_euclid(p);
                st.add_col(j, t, -q);
                if st.a[(t, j)] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder now sits in row/column t; move it to the pivot
                let (mut bi, mut bj, mut bv) = (t, t, st.a[(t, t)].abs());
                for i in t + 1..rows {
                    let v = st.a[(i, t)].abs();
                    if v != 0 && v < bv {
                        (bi, bj, bv) = (i, t, v);
                    }
                }
                for j in t + 1..cols {
                    let v = st.a[(t, j)].abs();
                    if v != 0 && v < bv {
                        (bi, bj, bv) = (t, j, v);
                    }
                }
                st.swap_rows(t, bi);
                st.swap_cols(t, bj);
                continue;
            }
            // row and column are clear; enforce divisibility of the remaining block
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if st.a[(i, j)] % p != 0 {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => st.add_row(t, i, 1),
                None => break,
            }
        }
        if st.a[(t, t)] < 0 {
            st.negate_row(t);
        }
    }
    let diagonal = (0..steps).map(|i| st.a[(i, i)]).collect();
    Smith { diagonal, left: st.left, left_inv: st.left_inv, right: st.right, right_inv: st.right_inv }
}

/// A generating set (as columns) of the integer kernel `{x : m x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<i64>> {
    let s = smith_decompose(m);
    let r = s.rank();
    (r..m.cols).map(|j| s.right.column(j)).collect()
}

/// Some integer solution of `m x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(b.len(), m.rows);
    let s = smith_decompose(m);
    let c = s.left.mul_vec(b);
    let r = s.rank();
    let mut w = vec![0i64; m.cols];
    for (i, &ci) in c.iter().enumerate() {
        if i < r {
            let d = s.diagonal[i];
            if ci % d != 0 {
                return None;
            }
            w[i] = ci / d;
        } else if ci != 0 {
            return None;
        }
    }
    Some(s.right.mul_vec(&w))
}

/// Absolute determinant-free unimodularity check used by tests.
pub fn is_unimodular_pair(m: &IntMatrix, inv: &IntMatrix) -> bool {
    m.rows == m.cols && m.mul(inv) == IntMatrix::identity(m.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Smith {
        let s = smith_decompose(m);
        let d = s.left.mul(m).mul(&s.right);
        assert_eq!(d, IntMatrix::diagonal(m.rows(), m.cols(), &s.diagonal));
        assert!(is_unimodular_pair(&s.left, &s.left_inv));
        assert!(is_unimodular_pair(&s.right, &s.right_inv));
        let nz: Vec<_> = s.diagonal.iter().copied().filter(|&x| x != 0).collect();
        for w in nz.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn diag_two_three() {
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]], 2).unwrap();
        assert_eq!(check(&m).diagonal, vec![1, 6]);
    }

    #[test]
    fn zero_and_identity() {
        let z = IntMatrix::from_rows(vec![vec![0]], 1).unwrap();
        assert_eq!(check(&z).diagonal, vec![0]);
        assert_eq!(check(&IntMatrix::identity(2)).diagonal, vec![1, 1]);
    }

    #[test]
    fn kernel_and_solve() {
        let m = IntMatrix::from_rows(vec![vec![2, 4, 6]], 3).unwrap();
        for v in integer_kernel(&m) {
            assert_eq!(m.mul_vec(&v), vec![0]);
        }
        assert!(solve_integer(&m, &[3]).is_none());
        let x = solve_integer(&m, &[10]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![10]);
    }

    #[test]
    fn empty_shapes() {
        let m = IntMatrix::zeros(0, 3);
        assert_eq!(check(&m).diagonal, Vec::<i64>::new());
        assert_eq!(integer_kernel(&m).len(), 3);
    }
}
