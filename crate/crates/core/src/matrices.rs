//! Dense matrices over GF(q).
//!
//! Row-major storage, exact arithmetic. Elimination always pivots on the
//! first nonzero entry of the column scanning top to bottom; there is no
//! magnitude over a finite field, and no stability concern either.
//!
//! The text interchange format is a header line `q rows cols` followed by
//! `rows` lines of `cols` space-separated element indices.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::fields::{field_of_order, FieldElement, FieldParams};

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    field: FieldParams,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixGF(GF({}) {}x{}", self.field.order(), self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|e| e.index()).collect();
            write!(f, " {row:?}")?;
        }
        write!(f, ")")
    }
}

impl MatrixGF {
    pub fn new(field: FieldParams, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&e| !field.contains(e)) {
            return Err(Error::ElementOutOfRange {
                index: bad.index() as u64,
                q: field.order(),
            });
        }
        Ok(Self { field, rows, cols, data })
    }

    /// Builds a matrix from rows of element indices.
    pub fn from_indices<R: AsRef<[u32]>>(field: &FieldParams, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for &n in row {
                data.push(field.sigma(n as u64)?);
            }
        }
        Self::new(field.clone(), rows.len(), cols, data)
    }

    pub fn zeros(field: &FieldParams, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldParams, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(
        field: &FieldParams,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        debug_assert!(self.field.contains(v));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    /// Entries as rows of indices; handy in tests and for serialization.
    pub fn to_indices(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| e.index()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn count_zeros(&self) -> usize {
        self.data.iter().filter(|e| e.is_zero()).count()
    }

    /// Copy of the listed columns, in order. Indices must be strictly increasing.
    pub fn submatrix_columns(&self, cols: &[usize]) -> Result<Self> {
        for w in cols.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::ColumnsNotIncreasing);
            }
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::ColumnOutOfRange {
                index: bad,
                cols: self.cols,
            });
        }
        Ok(Self::from_fn(&self.field, self.rows, cols.len(), |r, c| {
            self.get(r, cols[c])
        }))
    }

    /// The first `n` columns.
    pub fn first_columns(&self, n: usize) -> Result<Self> {
        if n > self.cols {
            return Err(Error::ColumnOutOfRange {
                index: n,
                cols: self.cols,
            });
        }
        Ok(Self::from_fn(&self.field, self.rows, n, |r, c| self.get(r, c)))
    }

    /// The first `k` rows.
    pub fn first_rows(&self, k: usize) -> Result<Self> {
        if k > self.rows {
            return Err(Error::OutOfRange(format!("{k} rows of a {}-row matrix", self.rows)));
        }
        Ok(Self {
            field: self.field.clone(),
            rows: k,
            cols: self.cols,
            data: self.data[..k * self.cols].to_vec(),
        })
    }

    /// Appends `col` as a new last column.
    pub fn append_column(&self, col: &[FieldElement]) -> Result<Self> {
        if col.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} for {} rows",
                col.len(),
                self.rows
            )));
        }
        Ok(Self::from_fn(&self.field, self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                col[r]
            }
        }))
    }

    pub fn mat_mul(&self, other: &MatrixGF) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        Ok(Self::from_fn(f, self.rows, other.cols, |r, c| {
            (0..self.cols).fold(FieldElement::ZERO, |acc, i| {
                f.add(acc, f.mul(self.get(r, i), other.get(i, c)))
            })
        }))
    }

    /// Row vector times matrix.
    pub fn vec_mat_mul(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.cols)
            .map(|c| {
                v.iter().enumerate().fold(FieldElement::ZERO, |acc, (r, &a)| {
                    f.add(acc, f.mul(a, self.get(r, c)))
                })
            })
            .collect())
    }

    /// Matrix times column vector.
    pub fn mat_vec_mul(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| dot(f, self.row(r), v))
            .collect())
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (MatrixGF, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            m.scale_row(lead, inv);
            for r in 0..m.rows {
                let factor = m.get(r, c);
                if r != lead && !factor.is_zero() {
                    m.sub_scaled_row(r, lead, factor);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        rank_in_place(&self.field, &mut self.data.clone(), self.rows, self.cols)
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        LuFactors::new(self)?.solve(b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: FieldElement) {
        for c in 0..self.cols {
            let v = self.field.mul(self.get(r, c), s);
            self.set(r, c, v);
        }
    }

    // row[dst] -= s * row[src]
    fn sub_scaled_row(&mut self, dst: usize, src: usize, s: FieldElement) {
        for c in 0..self.cols {
            let v = self
                .field
                .sub(self.get(dst, c), self.field.mul(s, self.get(src, c)));
            self.set(dst, c, v);
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.field.order(), self.rows, self.cols);
        for r in 0..self.rows {
            let mut first = true;
            for e in self.row(r) {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{}", e.index()).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::MatrixFormat(msg.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| bad("empty input"))?
            .split_whitespace()
            .collect();
        if header.len() != 3 {
            return Err(bad("header must be `q rows cols`"));
        }
        let nums: Vec<u64> = header
            .iter()
            .map(|t| t.parse::<u64>().map_err(|_| bad("header must be `q rows cols`")))
            .collect::<Result<_>>()?;
        let field = field_of_order(nums[0])?;
        let (rows, cols) = (nums[1] as usize, nums[2] as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("expected {rows} rows, got {r}")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(bad(&format!(
                    "row {r} has {} entries, expected {cols}",
                    entries.len()
                )));
            }
            for t in entries {
                let n = t
                    .parse::<u64>()
                    .map_err(|_| bad(&format!("bad entry {t:?}")))?;
                data.push(field.sigma(n)?);
            }
        }
        if lines.next().is_some() {
            return Err(bad("trailing rows"));
        }
        Self::new(field, rows, cols, data)
    }
}

pub(crate) fn dot(f: &FieldParams, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter()
        .zip(b)
        .fold(FieldElement::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Rank of a row-major `rows x cols` buffer; the buffer is clobbered.
pub(crate) fn rank_in_place(f: &FieldParams, m: &mut [FieldElement], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                m.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = f.inv(m[rank * cols + c]).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let factor = m[r * cols + c];
            if factor.is_zero() {
                continue;
            }
            let s = f.mul(factor, inv);
            for j in c..cols {
                let v = f.sub(m[r * cols + j], f.mul(s, m[rank * cols + j]));
                m[r * cols + j] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// `PA = LU` factorization of a square matrix, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct LuFactors {
    field: FieldParams,
    n: usize,
    // Unit lower factor below the diagonal, upper factor on and above it.
    lu: Vec<FieldElement>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &MatrixGF) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch(format!(
                "LU of non-square {}x{}",
                a.rows, a.cols
            )));
        }
        let f = &a.field;
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .find(|&r| !lu[r * n + k].is_zero())
                .ok_or(Error::Singular)?;
            if p != k {
                for j in 0..n {
                    lu.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
            }
            let inv = f.inv(lu[k * n + k])?;
            for r in k + 1..n {
                let l = f.mul(lu[r * n + k], inv);
                lu[r * n + k] = l;
                if l.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    lu[r * n + j] = f.sub(lu[r * n + j], f.mul(l, lu[k * n + j]));
                }
            }
        }
        Ok(Self {
            field: f.clone(),
            n,
            lu,
            perm,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut x = vec![FieldElement::ZERO; self.n];
        self.solve_into(b, &mut x)?;
        Ok(x)
    }

    /// Like [`solve`](Self::solve) but writes into `x`.
    pub fn solve_into(&self, b: &[FieldElement], x: &mut [FieldElement]) -> Result<()> {
        let (f, n, lu) = (&self.field, self.n, &self.lu);
        if b.len() != n || x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a {n}x{n} system",
                b.len()
            )));
        }
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc = f.sub(acc, f.mul(lu[i * n + j], x[j]));
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = f.sub(acc, f.mul(lu[i * n + j], x[j]));
            }
            x[i] = f.div(acc, lu[i * n + i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;

    fn gf(p: u64, h: u32) -> FieldParams {
        make_field(p, h).unwrap()
    }

    fn m(f: &FieldParams, rows: &[&[u32]]) -> MatrixGF {
        MatrixGF::from_indices(f, rows).unwrap()
    }

    fn v(f: &FieldParams, xs: &[u32]) -> Vec<FieldElement> {
        xs.iter().map(|&x| f.sigma(x as u64).unwrap()).collect()
    }

    #[test]
    fn rank_examples() {
        let f5 = gf(5, 1);
        assert_eq!(MatrixGF::identity(&f5, 3).rank(), 3);
        assert_eq!(m(&f5, &[&[1, 1], &[2, 2]]).rank(), 1);
        assert_eq!(MatrixGF::zeros(&f5, 2, 3).rank(), 0);
        let f4 = gf(2, 2);
        // P_4 with the formula value at (2,2)
        let p4 = m(&f4, &[&[1, 1, 1, 1], &[0, 1, 2, 3], &[0, 0, 3, 1], &[0, 0, 0, 1]]);
        assert_eq!(p4.rank(), 4);
    }

    #[test]
    fn solve_examples() {
        let f5 = gf(5, 1);
        let id = MatrixGF::identity(&f5, 2);
        assert_eq!(id.solve(&v(&f5, &[2, 3])).unwrap(), v(&f5, &[2, 3]));
        let a = m(&f5, &[&[1, 1], &[1, 2]]);
        assert_eq!(a.solve(&v(&f5, &[0, 1])).unwrap(), v(&f5, &[4, 1]));
        let sing = m(&f5, &[&[1, 2], &[2, 4]]);
        assert_eq!(sing.solve(&v(&f5, &[1, 1])), Err(Error::Singular));
        assert!(matches!(
            m(&f5, &[&[1, 2, 3]]).solve(&v(&f5, &[1])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn submatrix_examples() {
        let f5 = gf(5, 1);
        let h52 = m(&f5, &[&[1, 1, 1, 1, 1, 0], &[0, 1, 2, 3, 4, 1]]);
        assert_eq!(
            h52.submatrix_columns(&[0, 1]).unwrap().to_indices(),
            vec![vec![1, 1], vec![0, 1]]
        );
        assert_eq!(
            h52.submatrix_columns(&[2, 5]).unwrap().to_indices(),
            vec![vec![1, 0], vec![2, 1]]
        );
        assert_eq!(h52.submatrix_columns(&[0, 1, 2, 3, 4, 5]).unwrap(), h52);
        assert_eq!(
            h52.submatrix_columns(&[1, 1]).unwrap_err(),
            Error::ColumnsNotIncreasing
        );
        assert!(matches!(
            h52.submatrix_columns(&[6]),
            Err(Error::ColumnOutOfRange { index: 6, cols: 6 })
        ));
    }

    #[test]
    fn count_zeros_examples() {
        let f5 = gf(5, 1);
        assert_eq!(m(&f5, &[&[1, 1, 1, 1], &[0, 1, 2, 3]]).count_zeros(), 1);
        assert_eq!(MatrixGF::zeros(&f5, 2, 2).count_zeros(), 4);
    }

    #[test]
    fn products() {
        let f5 = gf(5, 1);
        let a = m(&f5, &[&[1, 1], &[1, 2]]);
        assert_eq!(a.vec_mat_mul(&v(&f5, &[1, 4])).unwrap(), v(&f5, &[0, 4]));
        assert_eq!(a.vec_mat_mul(&v(&f5, &[0, 0])).unwrap(), v(&f5, &[0, 0]));
        assert_eq!(MatrixGF::identity(&f5, 2).mat_mul(&a).unwrap(), a);
        assert!(matches!(
            a.mat_mul(&MatrixGF::zeros(&f5, 3, 1)),
            Err(Error::DimensionMismatch(_))
        ));
        let f7 = gf(7, 1);
        assert_eq!(
            a.mat_mul(&MatrixGF::identity(&f7, 2)),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn rref_pivots() {
        let f5 = gf(5, 1);
        let a = m(&f5, &[&[0, 2, 4], &[0, 1, 2], &[1, 0, 1]]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.to_indices(), vec![vec![1, 0, 1], vec![0, 1, 2], vec![0, 0, 0]]);
    }

    #[test]
    fn text_format() {
        let f9 = gf(3, 2);
        let a = m(&f9, &[&[1, 8, 0], &[4, 5, 6]]);
        let text = a.to_text();
        assert_eq!(text, "9 2 3\n1 8 0\n4 5 6\n");
        assert_eq!(MatrixGF::from_text(&text).unwrap(), a);
        assert!(MatrixGF::from_text("9 2 3\n1 8 0\n").is_err());
        assert!(MatrixGF::from_text("9 1 2\n1 9\n").is_err());
        assert!(MatrixGF::from_text("6 1 1\n1\n").is_err());
        assert!(MatrixGF::from_text("5 1 1\n1\n2\n").is_err());
        assert!(MatrixGF::from_text("").is_err());
    }
}
