//! Exact dense and sparse rational linear algebra.
//!
//! Ranks, kernel and image bases, and linear solving over arbitrary-precision
//! rationals. These back every cohomology dimension in the crate, so there is
//! no floating point and no modular shortcut anywhere: a rank is the rank.
//!
//! [`Matrix`] is the dense type used at desk scale; rank runs fraction-free
//! (Bareiss) on an integer-scaled copy. The [`sparse`] submodule holds the
//! elimination engine used by the cohomology module, where coboundary
//! matrices are large but carry only a handful of entries per row.

use crate::rational::Rational;
use num::bigint::BigInt;
use num::traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    DimensionMismatch { expected: usize, got: usize },
}

impl std::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        Matrix { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).clone();
                    out.set(r, c, cur + a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = vec![Rational::zero(); self.rows];
        for r in 0..self.rows {
            let mut acc = Rational::zero();
            for c in 0..self.cols {
                let a = self.get(r, c);
                if !a.is_zero() && !v[c].is_zero() {
                    acc += a * &v[c];
                }
            }
            out[r] = acc;
        }
        Ok(out)
    }

    /// Row rank via fraction-free (Bareiss) elimination on an integer-scaled copy.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Scaling each row by the lcm of its denominators preserves the rank
        // and keeps the elimination in BigInt.
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    let d = self.get(r, c).denom();
                    lcm = num::integer::lcm(lcm, d.clone());
                }
                (0..self.cols)
                    .map(|c| {
                        let e = self.get(r, c);
                        e.numer() * (&lcm / e.denom())
                    })
                    .collect()
            })
            .collect();

        let mut rank = 0;
        let mut prev = BigInt::one();
        let mut col = 0;
        while rank < self.rows && col < self.cols {
            // Pick the nonzero pivot with smallest magnitude to limit growth.
            let pivot_row = (rank..self.rows)
                .filter(|&r| !m[r][col].is_zero())
                .min_by_key(|&r| m[r][col].magnitude().clone());
            let Some(p) = pivot_row else {
                col += 1;
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    m[r][c] = &v / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Basis of the right kernel; empty when the matrix has full column rank.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (rref, pivots) = self.rref();
        kernel_from_rref(&rref, &pivots, self.cols)
    }

    /// Columns of the original matrix at the pivot positions of its rref.
    pub fn image_basis(&self) -> Vec<Vec<Rational>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&(_, c)| self.column(c)).collect()
    }

    /// Any solution of `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (rref, pivots) = aug.rref();
        // A pivot in the augmented column means the system is inconsistent.
        if pivots.iter().any(|&(_, c)| c == self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for &(r, c) in &pivots {
            x[c] = rref.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Reduced row echelon form together with the (row, col) pivot positions.
    pub fn rref(&self) -> (Matrix, Vec<(usize, usize)>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..m.cols {
                m.entries.swap(row * m.cols + c, p * m.cols + c);
            }
            let inv = {
                let pv = m.get(row, col).clone();
                Rational::one() / pv
            };
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        (m, pivots)
    }
}

fn kernel_from_rref(rref: &Matrix, pivots: &[(usize, usize)], ncols: usize) -> Vec<Vec<Rational>> {
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for &(r, c) in pivots {
            v[c] = -rref.get(r, free).clone();
        }
        basis.push(v);
    }
    basis
}

pub mod sparse {
    //! Sparse exact elimination for the large, very sparse coboundary
    //! matrices. Rows hold sorted `(column, value)` pairs; pivoting follows a
    //! Markowitz-style cost with preference for unit pivots, which on the
    //! 0/±1 matrices arising from face maps keeps fill-in and coefficient
    //! growth low.

    use super::Matrix;
    use crate::rational::Rational;
    use num::traits::{One, Zero};
    use std::collections::BinaryHeap;

    pub type Row = Vec<(u32, Rational)>;

    #[derive(Clone, Debug)]
    pub struct SparseMat {
        pub rows: usize,
        pub cols: usize,
        pub data: Vec<Row>,
    }

    impl SparseMat {
        pub fn new(rows: usize, cols: usize) -> Self {
            SparseMat { rows, cols, data: vec![Vec::new(); rows] }
        }

        /// Entries may arrive in any order and duplicates are summed.
        pub fn add_entry(&mut self, r: usize, c: usize, v: Rational) {
            if v.is_zero() {
                return;
            }
            let row = &mut self.data[r];
            match row.binary_search_by_key(&(c as u32), |e| e.0) {
                Ok(i) => {
                    row[i].1 += v;
                    if row[i].1.is_zero() {
                        row.remove(i);
                    }
                }
                Err(i) => row.insert(i, (c as u32, v)),
            }
        }

        pub fn nnz(&self) -> usize {
            self.data.iter().map(|r| r.len()).sum()
        }

        pub fn to_dense(&self) -> Matrix {
            let mut m = Matrix::zeros(self.rows, self.cols);
            for (r, row) in self.data.iter().enumerate() {
                for (c, v) in row {
                    m.set(r, *c as usize, v.clone());
                }
            }
            m
        }

        pub fn from_dense(m: &Matrix) -> Self {
            let mut s = SparseMat::new(m.rows(), m.cols());
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if !m.get(r, c).is_zero() {
                        s.data[r].push((c as u32, m.get(r, c).clone()));
                    }
                }
            }
            s
        }

        pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
            assert_eq!(v.len(), self.cols);
            self.data
                .iter()
                .map(|row| {
                    let mut acc = Rational::zero();
                    for (c, a) in row {
                        if !v[*c as usize].is_zero() {
                            acc += a * &v[*c as usize];
                        }
                    }
                    acc
                })
                .collect()
        }

        pub fn rank(&self) -> usize {
            self.factor().rank()
        }

        /// Basis of the right kernel (vectors `x` with `self * x = 0`).
        pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
            self.factor().kernel_basis()
        }

        /// Any solution of `self * x = b`.
        pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
            self.factor().solve(b)
        }

        /// Eliminates once with Markowitz pivoting; the factor can solve any
        /// number of right-hand sides.
        pub fn factor(&self) -> Factor {
            Eliminator::new(self).run(false)
        }

        /// Like [`SparseMat::factor`], but pivots strictly in ascending column
        /// order, so the pivot columns form the greedy left-to-right
        /// independent column set.
        pub fn factor_ordered(&self) -> Factor {
            Eliminator::new(self).run(true)
        }

        pub fn transpose(&self) -> SparseMat {
            let mut t = SparseMat::new(self.cols, self.rows);
            for (r, row) in self.data.iter().enumerate() {
                for (c, v) in row {
                    t.data[*c as usize].push((r as u32, v.clone()));
                }
            }
            t
        }

        /// Builds a matrix whose columns are the given dense vectors.
        pub fn from_columns(nrows: usize, cols: &[Vec<Rational>]) -> SparseMat {
            let mut m = SparseMat::new(nrows, cols.len());
            for (c, col) in cols.iter().enumerate() {
                assert_eq!(col.len(), nrows);
                for (r, v) in col.iter().enumerate() {
                    if !v.is_zero() {
                        m.data[r].push((c as u32, v.clone()));
                    }
                }
            }
            m
        }

        /// Plain sparse product; intended for the small matrices arising on
        /// cohomology bases.
        pub fn matmul(&self, other: &SparseMat) -> SparseMat {
            assert_eq!(self.cols, other.rows);
            let mut out = SparseMat::new(self.rows, other.cols);
            for (r, row) in self.data.iter().enumerate() {
                let mut acc: Row = Vec::new();
                for (k, a) in row {
                    acc = add_scaled(&acc, &other.data[*k as usize], a);
                }
                out.data[r] = acc;
            }
            out
        }

        /// Checks that `self * other` is the zero matrix without materializing
        /// the product.
        pub fn compose_is_zero(&self, other: &SparseMat) -> bool {
            assert_eq!(self.cols, other.rows);
            for row in &self.data {
                let mut acc: Row = Vec::new();
                for (k, a) in row {
                    acc = add_scaled(&acc, &other.data[*k as usize], a);
                }
                if !acc.is_empty() {
                    return false;
                }
            }
            true
        }
    }

    /// dst + f * src over sorted sparse rows.
    pub fn add_scaled(dst: &Row, src: &Row, f: &Rational) -> Row {
        if f.is_zero() {
            return dst.clone();
        }
        let mut out = Vec::with_capacity(dst.len() + src.len());
        let (mut i, mut j) = (0, 0);
        while i < dst.len() || j < src.len() {
            match (dst.get(i), src.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let v = &a.1 + f * &b.1;
                    if !v.is_zero() {
                        out.push((a.0, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push((b.0, f * &b.1));
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push((b.0, f * &b.1));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// Result of one elimination pass: enough to read off the rank, solve any
    /// right-hand side, and produce a kernel basis.
    pub struct Factor {
        cols: usize,
        /// (pivot col, reduced row, original row id), in elimination order.
        pivots: Vec<(u32, Row, u32)>,
        /// Recorded row operations: rhs[victim] += f * rhs[src].
        ops: Vec<(u32, u32, Rational)>,
        /// Rows that eliminated to zero; a consistent rhs must vanish there.
        zero_rows: Vec<u32>,
    }

    impl Factor {
        pub fn rank(&self) -> usize {
            self.pivots.len()
        }

        /// Pivot columns in elimination order.
        pub fn pivot_cols(&self) -> Vec<usize> {
            self.pivots.iter().map(|p| p.0 as usize).collect()
        }

        /// Any solution of the factored matrix times x = b, with free
        /// variables at zero.
        pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
            let mut rhs = b.to_vec();
            for (victim, src, f) in &self.ops {
                let add = f * &rhs[*src as usize];
                rhs[*victim as usize] += add;
            }
            if self.zero_rows.iter().any(|r| !rhs[*r as usize].is_zero()) {
                return None;
            }
            let mut x = vec![Rational::zero(); self.cols];
            // pivot row k was eliminated from every row still active at step
            // k, so earlier pivot columns cannot occur in later pivot rows
            // and reverse elimination order back-substitutes cleanly
            for (pc, row, orig) in self.pivots.iter().rev() {
                let mut acc = rhs[*orig as usize].clone();
                let mut pv = Rational::one();
                for (c, v) in row {
                    if c == pc {
                        pv = v.clone();
                    } else if !x[*c as usize].is_zero() {
                        acc -= v * &x[*c as usize];
                    }
                }
                x[*pc as usize] = acc / pv;
            }
            Some(x)
        }

        pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
            let mut is_pivot = vec![false; self.cols];
            for (c, _, _) in &self.pivots {
                is_pivot[*c as usize] = true;
            }
            let mut basis = Vec::new();
            for free in 0..self.cols {
                if is_pivot[free] {
                    continue;
                }
                let mut x = vec![Rational::zero(); self.cols];
                x[free] = Rational::one();
                for (pc, row, _) in self.pivots.iter().rev() {
                    let mut acc = Rational::zero();
                    let mut pv = Rational::one();
                    for (c, v) in row {
                        if c == pc {
                            pv = v.clone();
                        } else if !x[*c as usize].is_zero() {
                            acc += v * &x[*c as usize];
                        }
                    }
                    x[*pc as usize] = -acc / pv;
                }
                basis.push(x);
            }
            basis
        }
    }

    struct Eliminator {
        cols: usize,
        active: Vec<Option<Row>>,
        col_rows: Vec<Vec<u32>>,
        col_count: Vec<u32>,
        heap: BinaryHeap<std::cmp::Reverse<(usize, u32)>>,
        ops: Vec<(u32, u32, Rational)>,
    }

    impl Eliminator {
        fn new(m: &SparseMat) -> Self {
            let mut col_rows = vec![Vec::new(); m.cols];
            let mut col_count = vec![0u32; m.cols];
            let mut heap = BinaryHeap::new();
            for (r, row) in m.data.iter().enumerate() {
                for (c, _) in row {
                    col_rows[*c as usize].push(r as u32);
                    col_count[*c as usize] += 1;
                }
                if !row.is_empty() {
                    heap.push(std::cmp::Reverse((row.len(), r as u32)));
                }
            }
            Eliminator {
                cols: m.cols,
                active: m.data.iter().map(|r| Some(r.clone())).collect(),
                col_rows,
                col_count,
                heap,
                ops: Vec::new(),
            }
        }

        fn run(mut self, ordered: bool) -> Factor {
            let mut pivots: Vec<(u32, Row, u32)> = Vec::new();
            if ordered {
                // strict ascending-column pivoting: pivot columns become the
                // greedy left-to-right maximal independent column set
                for col in 0..self.cols as u32 {
                    let rows = std::mem::take(&mut self.col_rows[col as usize]);
                    let mut best: Option<u32> = None;
                    for &r in &rows {
                        if let Some(row) = self.active[r as usize].as_ref() {
                            if row.binary_search_by_key(&col, |e| e.0).is_ok()
                                && best.map_or(true, |b| {
                                    self.active[b as usize].as_ref().unwrap().len() > row.len()
                                })
                            {
                                best = Some(r);
                            }
                        }
                    }
                    let Some(r) = best else { continue };
                    self.col_rows[col as usize] = rows;
                    self.pivot_step(r, col, &mut pivots);
                }
            } else {
                while let Some(std::cmp::Reverse((nnz, r))) = self.heap.pop() {
                    let Some(row) = self.active[r as usize].as_ref() else { continue };
                    if row.len() != nnz || row.is_empty() {
                        continue; // stale heap entry
                    }
                    // Markowitz-ish pivot: unit values first, then min column count
                    let pc = row
                        .iter()
                        .min_by_key(|(c, v)| {
                            let unit = if v.numer().magnitude().is_one() && v.denom().is_one() {
                                0u8
                            } else {
                                1u8
                            };
                            (unit, self.col_count[*c as usize])
                        })
                        .map(|(c, _)| *c)
                        .unwrap();
                    self.pivot_step(r, pc, &mut pivots);
                }
            }
            let mut zero_rows = Vec::new();
            for (r, row) in self.active.iter().enumerate() {
                if let Some(row) = row {
                    debug_assert!(row.is_empty());
                    zero_rows.push(r as u32);
                }
            }
            Factor { cols: self.cols, pivots, ops: self.ops, zero_rows }
        }

        fn pivot_step(&mut self, r: u32, pc: u32, pivots: &mut Vec<(u32, Row, u32)>) {
            let prow = self.active[r as usize].take().unwrap();
            let pv = prow[prow.binary_search_by_key(&pc, |e| e.0).unwrap()].1.clone();
            for (c, _) in &prow {
                self.col_count[*c as usize] -= 1;
            }
            let victims = std::mem::take(&mut self.col_rows[pc as usize]);
            for vr in victims {
                if vr == r {
                    continue;
                }
                let Some(vrow) = self.active[vr as usize].as_ref() else { continue };
                let Ok(idx) = vrow.binary_search_by_key(&pc, |e| e.0) else {
                    continue; // stale column entry
                };
                let f = -(&vrow[idx].1 / &pv);
                let newrow = add_scaled(vrow, &prow, &f);
                self.ops.push((vr, r, f));
                self.update_row(vr, newrow);
            }
            pivots.push((pc, prow, r));
        }

        fn update_row(&mut self, r: u32, newrow: Row) {
            let old = self.active[r as usize].take().unwrap_or_default();
            for (c, _) in &old {
                self.col_count[*c as usize] -= 1;
            }
            for (c, _) in &newrow {
                self.col_count[*c as usize] += 1;
                let cr = &mut self.col_rows[*c as usize];
                if cr.last() != Some(&r) {
                    cr.push(r);
                }
            }
            if !newrow.is_empty() {
                self.heap.push(std::cmp::Reverse((newrow.len(), r)));
            }
            self.active[r as usize] = Some(newrow);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::sparse::SparseMat;
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn rank_of_zero_matrix() {
        assert_eq!(m(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]).rank(), 0);
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn rank_of_identity() {
        for n in 1..6 {
            assert_eq!(Matrix::identity(n).rank(), n);
        }
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(Matrix::identity(4).kernel_basis().is_empty());
    }

    #[test]
    fn solve_scalar() {
        let a = m(&[&[2]]);
        let x = a.solve(&[int(1)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(1, 2)]);
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.solve(&[int(1), int(2)]).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = m(&[&[1, 1]]);
        assert!(a.solve(&[int(1), int(2)]).is_err());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 3 - a.rank());
        for v in &ker {
            assert!(a.mul_vec(v).unwrap().iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn image_basis_spans_columns() {
        let a = m(&[&[1, 2, 3], &[0, 0, 1]]);
        let img = a.image_basis();
        assert_eq!(img.len(), a.rank());
        // every column must be solvable in terms of the image basis
        let b = Matrix::from_rows(
            (0..a.rows()).map(|r| img.iter().map(|v| v[r].clone()).collect()).collect(),
        );
        for c in 0..a.cols() {
            assert!(b.solve(&a.column(c)).unwrap().is_some());
        }
    }

    #[test]
    fn sparse_matches_dense() {
        let a = m(&[&[1, 2, 3, 1], &[2, 4, 6, 0], &[1, 0, 1, -1], &[0, 0, 0, 0]]);
        let s = SparseMat::from_dense(&a);
        assert_eq!(s.rank(), a.rank());
        let ker = s.kernel_basis();
        assert_eq!(ker.len(), a.cols() - a.rank());
        for v in &ker {
            assert!(s.mul_vec(v).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn sparse_solve_round_trip() {
        let a = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let s = SparseMat::from_dense(&a);
        let x = s.solve(&[int(3), int(5)]).unwrap();
        assert_eq!(s.mul_vec(&x), vec![int(3), int(5)]);
        let none = SparseMat::from_dense(&m(&[&[1, 1], &[1, 1]])).solve(&[int(0), int(1)]);
        assert!(none.is_none());
    }

    #[test]
    fn rank_nullity_on_random_sign_matrices() {
        // brute-force property check backing the kernel/image contract
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let rows = (next() % 20 + 1) as usize;
            let cols = (next() % 30 + 1) as usize;
            let mut a = Matrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    let v = match next() % 4 {
                        0 => 1,
                        1 => -1,
                        _ => 0,
                    };
                    a.set(r, c, int(v));
                }
            }
            let rank = a.rank();
            let ker = a.kernel_basis();
            assert_eq!(rank + ker.len(), cols, "rank-nullity");
            assert_eq!(a.image_basis().len(), rank);
            for v in &ker {
                assert!(a.mul_vec(v).unwrap().iter().all(|e| e.is_zero()));
            }
            let s = SparseMat::from_dense(&a);
            assert_eq!(s.rank(), rank, "sparse and dense ranks agree");
        }
    }
}
