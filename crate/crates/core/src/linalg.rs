//! Exact dense linear algebra over `Z` and `Q`.
//!
//! Everything here is written for the small dense matrices that show up in
//! lattice-polytope work (dimensions well under a hundred), so the
//! implementations favour clarity and exactness over asymptotics: Bareiss
//! fraction-free elimination for determinants, textbook Smith and Hermite
//! normal forms with recorded unimodular transforms, and rational
//! row-reduction for rank/solve/nullspace.

use crate::num::{Q, Z};
use num::{Integer, One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Z>,
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

/// Smith normal form `U * A * V = D` with `U`, `V` unimodular and `D`
/// diagonal with non-negative entries `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: ZMat,
    pub d: ZMat,
    pub v: ZMat,
}

impl ZMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ZMat { rows, cols, data: vec![Z::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Z::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ZMat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| Z::from(x)).collect(),
        }
    }

    pub fn from_z_rows(rows: Vec<Vec<Z>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ZMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Z] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Z> {
        self.row(i).to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<Z> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Z>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn to_q(&self) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Q::from_integer(x.clone())).collect(),
        }
    }

    pub fn transpose(&self) -> ZMat {
        let mut t = ZMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = ZMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Z]) -> Vec<Z> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> Z {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Z::one();
        }
        let mut a = self.to_rows();
        let mut sign = 1i32;
        let mut prev = Z::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Z::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = Z::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn rank(&self) -> usize {
        self.to_q().rank()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += q * row_k
    fn add_row_multiple(&mut self, i: usize, k: usize, q: &Z) {
        for c in 0..self.cols {
            let add = q * &self[(k, c)];
            self[(i, c)] += add;
        }
    }

    /// col_j += q * col_k
    fn add_col_multiple(&mut self, j: usize, k: usize, q: &Z) {
        for r in 0..self.rows {
            let add = q * &self[(r, k)];
            self[(r, j)] += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self[(i, c)].clone();
            self[(i, c)] = v;
        }
    }

    /// Smith normal form with recorded transforms.
    ///
    /// Textbook algorithm: bring a minimal pivot to `(t, t)`, clear its row
    /// and column with Euclidean steps, and only advance once the pivot
    /// divides the whole trailing block (folding an offending row into row
    /// `t` otherwise).  That invariant makes the divisibility chain
    /// `d_1 | d_2 | ...` automatic.
    pub fn smith(&self) -> Smith {
        let mut d = self.clone();
        let mut u = ZMat::identity(self.rows);
        let mut v = ZMat::identity(self.cols);
        let n = self.rows.min(self.cols);
        let mut t = 0;
        'place: while t < n {
            // Locate a pivot of minimal absolute value in the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if !d[(i, j)].is_zero()
                        && pivot
                            .map(|(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            // Clear row and column t.  Non-zero remainders become strictly
            // smaller pivots, so the loop terminates.
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if !d[(i, t)].is_zero() {
                        let q = -d[(i, t)].div_floor(&d[(t, t)]);
                        d.add_row_multiple(i, t, &q);
                        u.add_row_multiple(i, t, &q);
                        if !d[(i, t)].is_zero() {
                            d.swap_rows(t, i);
                            u.swap_rows(t, i);
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.cols {
                    if !d[(t, j)].is_zero() {
                        let q = -d[(t, j)].div_floor(&d[(t, t)]);
                        d.add_col_multiple(j, t, &q);
                        v.add_col_multiple(j, t, &q);
                        if !d[(t, j)].is_zero() {
                            d.swap_cols(t, j);
                            v.swap_cols(t, j);
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            // The pivot must divide every trailing entry before we move on.
            for i in t + 1..self.rows {
                for j in t + 1..self.cols {
                    if !d[(i, j)].is_multiple_of(&d[(t, t)]) {
                        d.add_row_multiple(t, i, &Z::one());
                        u.add_row_multiple(t, i, &Z::one());
                        continue 'place;
                    }
                }
            }
            t += 1;
        }
        for i in 0..n {
            if d[(i, i)].is_negative() {
                d.negate_row(i);
                u.negate_row(i);
            }
        }
        Smith { u, d, v }
    }

    /// Basis of the saturated right kernel `{ x : A x = 0 }`, returned as the
    /// rows of a matrix.  Because it is read off a Smith decomposition the
    /// basis generates the full kernel lattice, not a finite-index sublattice.
    pub fn kernel_rows(&self) -> ZMat {
        let Smith { d, v, .. } = self.smith();
        let n = self.rows.min(self.cols);
        let rank = (0..n).filter(|&i| !d[(i, i)].is_zero()).count();
        let rows: Vec<Vec<Z>> = (rank..self.cols).map(|j| v.col_vec(j)).collect();
        if rows.is_empty() {
            ZMat::zero(0, self.cols)
        } else {
            ZMat::from_z_rows(rows)
        }
    }

    /// Row-style Hermite normal form of the lattice spanned by the rows:
    /// echelon shape, positive pivots, entries above each pivot reduced into
    /// `[0, pivot)`.  Zero rows are dropped.
    pub fn hnf_rows(&self) -> ZMat {
        let mut rows = self.to_rows();
        let cols = self.cols;
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row >= rows.len() {
                break;
            }
            loop {
                let mut best: Option<usize> = None;
                for i in pivot_row..rows.len() {
                    if !rows[i][col].is_zero()
                        && best.map(|b| rows[i][col].abs() < rows[b][col].abs()).unwrap_or(true)
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                rows.swap(pivot_row, b);
                let mut clean = true;
                for i in pivot_row + 1..rows.len() {
                    if !rows[i][col].is_zero() {
                        let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                        for c in 0..cols {
                            let sub = &q * &rows[pivot_row][c];
                            rows[i][c] -= sub;
                        }
                        if !rows[i][col].is_zero() {
                            clean = false;
                        }
                    }
                }
                if clean {
                    break;
                }
            }
            if !rows[pivot_row][col].is_zero() {
                if rows[pivot_row][col].is_negative() {
                    for c in 0..cols {
                        let v = -rows[pivot_row][c].clone();
                        rows[pivot_row][c] = v;
                    }
                }
                for i in 0..pivot_row {
                    if !rows[i][col].is_zero() {
                        let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                        for c in 0..cols {
                            let sub = &q * &rows[pivot_row][c];
                            rows[i][c] -= sub;
                        }
                    }
                }
                pivot_row += 1;
            }
        }
        rows.truncate(pivot_row);
        if rows.is_empty() {
            ZMat::zero(0, cols)
        } else {
            ZMat::from_z_rows(rows)
        }
    }
}

impl std::ops::Index<(usize, usize)> for ZMat {
    type Output = Z;
    fn index(&self, (i, j): (usize, usize)) -> &Z {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Z {
        &mut self.data[i * self.cols + j]
    }
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(r * self.cols + j, p * self.cols + j);
            }
            let inv = self[(r, c)].recip();
            for j in 0..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in 0..self.cols {
                        let sub = &f * &self[(r, j)];
                        self[(i, j)] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// One solution of `A x = b`, if any (free variables set to zero).
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, b.len(), "dimension mismatch");
        let mut aug = QMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the right kernel `{ x : A x = 0 }`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(r, &c)| r != c) {
            return None;
        }
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(points: &[Vec<Z>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let rows: Vec<Vec<Z>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    ZMat::from_z_rows(rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, z};

    fn zm(rows: &[Vec<i64>]) -> ZMat {
        ZMat::from_rows(rows)
    }

    #[test]
    fn det_examples() {
        assert_eq!(zm(&[vec![2, 0], vec![0, 3]]).det(), z(6));
        assert_eq!(zm(&[vec![0, 1], vec![1, 0]]).det(), z(-1));
        assert_eq!(
            zm(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).det(),
            z(0)
        );
        assert_eq!(
            zm(&[vec![3, -1, 2], vec![0, 4, 1], vec![5, 2, -2]]).det(),
            z(-75)
        );
    }

    #[test]
    fn smith_reconstructs_and_divides() {
        let cases = [
            zm(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]),
            zm(&[vec![1, 1, 1, 1], vec![0, 5, 10, 15]]),
            zm(&[vec![0, 0], vec![0, 0]]),
            zm(&[vec![6]]),
        ];
        for a in cases {
            let s = a.smith();
            assert_eq!(s.u.mul(&a).mul(&s.v), s.d, "U A V = D fails");
            assert_eq!(s.u.det().abs(), z(1), "U not unimodular");
            assert_eq!(s.v.det().abs(), z(1), "V not unimodular");
            let n = a.rows.min(a.cols);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(s.d[(i, j)].is_zero(), "D not diagonal");
                    }
                }
            }
            for i in 0..n.saturating_sub(1) {
                let (a0, a1) = (s.d[(i, i)].clone(), s.d[(i + 1, i + 1)].clone());
                if !a0.is_zero() && !a1.is_zero() {
                    assert!((&a1 % &a0).is_zero(), "divisibility chain broken");
                }
            }
        }
    }

    #[test]
    fn kernel_of_homogenised_simplex_points() {
        // Columns: origin, e1..e4, -(e1+..+e4), homogenised by a row of ones.
        let a = zm(&[
            vec![1, 1, 1, 1, 1, 1],
            vec![0, 1, 0, 0, 0, -1],
            vec![0, 0, 1, 0, 0, -1],
            vec![0, 0, 0, 1, 0, -1],
            vec![0, 0, 0, 0, 1, -1],
        ]);
        let k = a.kernel_rows();
        assert_eq!(k.rows, 1);
        let v = k.row_vec(0);
        for x in a.mul_vec(&v) {
            assert!(x.is_zero());
        }
        // Primitive generator, up to sign: (-5, 1, 1, 1, 1, 1).
        let canon: Vec<Z> = if v[0].is_negative() { v } else { v.iter().map(|x| -x).collect() };
        assert_eq!(canon, vec![z(-5), z(1), z(1), z(1), z(1), z(1)]);
    }

    #[test]
    fn hnf_rows_canonical_shape() {
        let a = zm(&[vec![4, 6, 2], vec![2, 4, 2]]);
        let h = a.hnf_rows();
        // Row lattice of [[4,6,2],[2,4,2]] = [[2,0,-2],[0,2,2]] in HNF.
        assert_eq!(h, zm(&[vec![2, 0, -2], vec![0, 2, 2]]));
        // HNF is idempotent.
        assert_eq!(h.hnf_rows(), h);
    }

    #[test]
    fn rational_solve_and_nullspace() {
        let a = QMat::from_rows(vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
        ]);
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for e in a.mul_vec(v) {
                assert!(e.is_zero());
            }
        }
        let sol = a.solve(&[q(6), q(12)]).unwrap();
        assert_eq!(a.mul_vec(&sol), vec![q(6), q(12)]);
        assert!(a.solve(&[q(1), q(0)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = QMat::from_rows(vec![
            vec![q(2), q(1)],
            vec![q(5), q(3)],
        ]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMat::identity(2));
        let sing = QMat::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn affine_rank_of_square() {
        let pts = vec![
            vec![z(0), z(0)],
            vec![z(1), z(0)],
            vec![z(0), z(1)],
            vec![z(1), z(1)],
        ];
        assert_eq!(affine_rank(&pts), 2);
    }
}
