//! Sparse integer matrices and the Smith normal form with transformation matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Default)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SparseForm {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SparseForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(&(r, c), x)| (r, c, x.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let f = SparseForm::deserialize(d)?;
        let mut m = IntMatrix::zeros(f.rows, f.cols);
        for (r, c, x) in f.entries {
            if r >= f.rows || c >= f.cols {
                return Err(D::Error::custom(format!("entry ({}, {}) out of range", r, c)));
            }
            let x: BigInt = x.parse().map_err(D::Error::custom)?;
            m.set(r, c, x);
        }
        Ok(m)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, d: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, r) in d.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        assert!(r < self.rows && c < self.cols, "index ({}, {}) out of {}x{}", r, c, self.rows, self.cols);
        if x.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), x);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &BigInt) {
        let v = self.get(r, c) + x;
        self.set(r, c, v);
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), x)| (r, c, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, x) in self.nonzeros() {
            d[r][c] = x.clone();
        }
        d
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, x) in self.nonzeros() {
            t.set(c, r, x.clone());
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut by_row: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (r, c, x) in o.nonzeros() {
            by_row.entry(r).or_default().push((c, x));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for (i, k, a) in self.nonzeros() {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &(a * b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![BigInt::zero(); self.rows];
        for (r, c, x) in self.nonzeros() {
            out[r] += x * &v[c];
        }
        out
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let mut out = Self::zeros(self.rows, range.len());
        for (r, c, x) in self.nonzeros() {
            if range.contains(&c) {
                out.set(r, c - range.start, x.clone());
            }
        }
        out
    }

    pub fn rows_range(&self, range: std::ops::Range<usize>) -> IntMatrix {
        self.transpose().columns(range).transpose()
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if let Some(x) = self.entries.get(&(r, c)) {
                    out.set(i, j, x.clone());
                }
            }
        }
        out
    }

    /// `[self | o]`.
    pub fn hcat(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, o.rows);
        let mut out = Self::zeros(self.rows, self.cols + o.cols);
        for (r, c, x) in self.nonzeros() {
            out.set(r, c, x.clone());
        }
        for (r, c, x) in o.nonzeros() {
            out.set(r, self.cols + c, x.clone());
        }
        out
    }

    /// Integer determinant by fraction-free elimination (square matrices only).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }
}

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal,
/// `d[0] | d[1] | ... | d[rank - 1]`, all positive.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub d: IntMatrix,
    /// The nonzero diagonal entries.
    pub diag: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.u.swap(i, j);
            for row in self.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            for row in self.v.iter_mut() {
                row.swap(i, j);
            }
            self.v_inv.swap(i, j);
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for (m, minv) in [(&mut self.a, false), (&mut self.u, false), (&mut self.u_inv, true)] {
            if minv {
                // inverse operation acts on columns: col_j -= q * col_i
                for row in m.iter_mut() {
                    let t = &row[i] * q;
                    row[j] -= t;
                }
            } else {
                let rj = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(rj.iter()) {
                    *x += y * q;
                }
            }
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let t = &row[j] * q;
            row[i] += t;
        }
        // inverse acts on rows: row_j -= q * row_i
        let ri = self.v_inv[i].clone();
        for (x, y) in self.v_inv[j].iter_mut().zip(ri.iter()) {
            *x -= y * q;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut w = Work {
        a: a.to_dense(),
        u: dense_identity(m),
        u_inv: dense_identity(m),
        v: dense_identity(n),
        v_inv: dense_identity(n),
    };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // pivot of least absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !w.a[i][j].is_zero() && best.map_or(true, |(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !w.a[i][t].is_zero() {
                    let q = -(&w.a[i][t] / &w.a[t][t]);
                    w.add_row(i, t, &q);
                    if !w.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !w.a[t][j].is_zero() {
                    let q = -(&w.a[t][j] / &w.a[t][t]);
                    w.add_col(j, t, &q);
                    if !w.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // move the smallest remainder of row / column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..m {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // divisibility: fold in a row carrying an entry not divisible by the pivot
            let p = w.a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diag.push(w.a[t][t].clone());
    }
    SnfResult {
        u: IntMatrix::from_dense(m, m, &w.u),
        u_inv: IntMatrix::from_dense(m, m, &w.u_inv),
        v: IntMatrix::from_dense(n, n, &w.v),
        v_inv: IntMatrix::from_dense(n, n, &w.v_inv),
        d: IntMatrix::from_dense(m, n, &w.a),
        diag,
    }
}

/// A basis of the integer kernel `{x : a x = 0}`, as columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    s.v.columns(s.rank()..a.cols)
}

/// Some integer `x` with `a x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(a);
    solve_with(&s, b)
}

pub fn solve_with(s: &SnfResult, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let y = s.u.mul_vec(b);
    let r = s.rank();
    if y[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut z = vec![BigInt::zero(); s.v.rows];
    for k in 0..r {
        let (q, rem) = y[k].div_rem(&s.diag[k]);
        if !rem.is_zero() {
            return None;
        }
        z[k] = q;
    }
    Some(s.v.mul_vec(&z))
}

/// Hermite normal form (upper triangular, positive pivots) of the lattice
/// spanned by the columns, returned as a list of basis columns.
pub fn lattice_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    // column-style HNF by working on the transpose's rows
    let mut rows: Vec<Vec<BigInt>> = a.transpose().to_dense();
    let ncoord = a.rows;
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut start = 0;
    for c in 0..ncoord {
        loop {
            let nz: Vec<usize> = (start..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).expect("nonempty");
            rows.swap(start, p);
            let mut done = true;
            for i in start + 1..rows.len() {
                if !rows[i][c].is_zero() {
                    let q = &rows[i][c] / &rows[start][c];
                    let r0 = rows[start].clone();
                    for (x, y) in rows[i].iter_mut().zip(r0.iter()) {
                        *x -= y * &q;
                    }
                    if !rows[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                if rows[start][c].is_negative() {
                    for x in rows[start].iter_mut() {
                        *x = -&*x;
                    }
                }
                // reduce earlier rows modulo the pivot
                for i in 0..start {
                    let q = rows[i][c].div_floor(&rows[start][c]);
                    let r0 = rows[start].clone();
                    for (x, y) in rows[i].iter_mut().zip(r0.iter()) {
                        *x -= y * &q;
                    }
                }
                start += 1;
                break;
            }
        }
    }
    for r in rows.into_iter().take(start) {
        out.push(r);
    }
    out
}

/// Basis (HNF columns) of `{v : a v in colspan_Z(b)}`.
pub fn preimage_lattice(a: &IntMatrix, b: &IntMatrix) -> Vec<Vec<BigInt>> {
    assert_eq!(a.rows, b.rows);
    let mut nb = IntMatrix::zeros(b.rows, b.cols);
    for (r, c, x) in b.nonzeros() {
        nb.set(r, c, -x);
    }
    let k = kernel_basis(&a.hcat(&nb));
    lattice_basis(&k.rows_range(0..a.cols))
}
