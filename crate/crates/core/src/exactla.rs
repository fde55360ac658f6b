//! Exact rational scalars, sparse vectors and row-reduction over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if r.denom().is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(r)
}

pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

/// Sparse vector over ℚ. Never stores zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec(BTreeMap<usize, Rational>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = SparseVec::new();
        v.0.insert(i, Rational::one());
        v
    }

    pub fn from_dense(d: &[Rational]) -> Self {
        SparseVec(
            d.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        )
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(it: I) -> Self {
        let mut v = SparseVec::new();
        for (i, x) in it {
            v.add_at(i, &x);
        }
        v
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); len];
        for (i, x) in &self.0 {
            d[*i] = x.clone();
        }
        d
    }

    pub fn get(&self, i: usize) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Option<&Rational> {
        self.0.get(&i)
    }

    pub fn set(&mut self, i: usize, x: Rational) {
        if x.is_zero() {
            self.0.remove(&i);
        } else {
            self.0.insert(i, x);
        }
    }

    pub fn add_at(&mut self, i: usize, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_insert_with(Rational::zero);
        *e += x;
        if e.is_zero() {
            self.0.remove(&i);
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.0 {
            self.add_at(*i, &(x * c));
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(i, x)| (*i, x * c)).collect())
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec(self.0.iter().map(|(i, x)| (*i, -x)).collect())
    }

    pub fn plus(&self, other: &SparseVec) -> SparseVec {
        let mut v = self.clone();
        v.add_scaled(other, &Rational::one());
        v
    }

    pub fn minus(&self, other: &SparseVec) -> SparseVec {
        let mut v = self.clone();
        v.add_scaled(other, &-Rational::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(i, x)| (*i, x))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.0.iter().next().map(|(i, x)| (*i, x))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let (a, b) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        let mut s = Rational::zero();
        for (i, x) in &a.0 {
            if let Some(y) = b.0.get(i) {
                s += x * y;
            }
        }
        s
    }

    /// Applies `f` to indices; entries mapped to `None` are dropped.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        let mut v = SparseVec::new();
        for (i, x) in &self.0 {
            if let Some(j) = f(*i) {
                v.add_at(j, x);
            }
        }
        v
    }

    pub fn restricted(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec(self.0.iter().filter(|(i, _)| keep(**i)).map(|(i, x)| (*i, x.clone())).collect())
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (i, x)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {x}")?;
        }
        f.write_str("}")
    }
}

/// Sparse matrix stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix literal");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, int(*x));
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>], cols: usize) -> Self {
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i] = SparseVec::from_dense(r);
        }
        m
    }

    /// Rows must only reference columns below `cols`.
    pub fn from_rows(rows: Vec<SparseVec>, cols: usize) -> Self {
        for r in &rows {
            assert!(r.max_index().map_or(true, |c| c < cols), "row entry out of range");
        }
        Matrix { rows: rows.len(), cols, data: rows }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[SparseVec], rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter() {
                assert!(i < rows, "column entry out of range");
                m.data[i].set(j, x.clone());
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

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r].set(c, x);
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec::from_pairs(self.data.iter().enumerate().filter_map(|(i, r)| r.coeff(c).map(|x| (i, x.clone()))))
    }

    pub fn push_row(&mut self, r: SparseVec) {
        assert!(r.max_index().map_or(true, |c| c < self.cols), "row entry out of range");
        self.data.push(r);
        self.rows += 1;
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, j, x)))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for (i, j, x) in self.entries() {
            t.data[j].set(i, x.clone());
        }
        t
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(self.data.iter().enumerate().map(|(i, r)| (i, r.dot(v))))
    }

    pub fn mul_dense(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, found: v.len() });
        }
        Ok(self.mul_vec(&SparseVec::from_dense(v)).to_dense(self.rows))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut p = Matrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (k, x) in r.iter() {
                acc.add_scaled(&other.data[k], x);
            }
            p.data[i] = acc;
        }
        p
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.plus(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|r| r.scaled(c)).collect() }
    }

    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.data.iter().cloned()).rank()
    }

    /// Basis of the null space, one vector per free column in ascending order.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let rref = Echelon::from_rows(self.data.iter().cloned()).into_rref();
        let pivots: Vec<usize> = rref.keys().copied().collect();
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|c| !rref.contains_key(c)) {
            let mut v = SparseVec::unit(f);
            for p in &pivots {
                let x = rref[p].get(f);
                if !x.is_zero() {
                    v.set(*p, -x);
                }
            }
            out.push(v);
        }
        out
    }

    /// One solution of `self * x = b` with free variables set to zero.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension { expected: self.rows, found: b.len() });
        }
        Ok(self.solve_sparse(&SparseVec::from_dense(b)).map(|x| x.to_dense(self.cols)))
    }

    pub fn solve_sparse(&self, b: &SparseVec) -> Option<SparseVec> {
        let n = self.cols;
        let rows = self.data.iter().enumerate().map(|(i, r)| {
            let mut r = r.clone();
            r.set(n, b.get(i));
            r
        });
        let rref = Echelon::from_rows(rows).into_rref();
        if rref.contains_key(&n) {
            return None;
        }
        Some(SparseVec::from_pairs(rref.iter().map(|(p, r)| (*p, r.get(n)))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.entries().all(|(i, j, x)| self.data[j].get(i) == *x)
    }

    /// Exact test via the signs of the elimination pivots (no row exchanges needed for
    /// positive definite matrices).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let mut a = self.data.clone();
        for k in 0..self.rows {
            let p = a[k].get(k);
            if !p.is_positive() {
                return false;
            }
            let pivot_row = a[k].clone();
            for row in a.iter_mut().skip(k + 1) {
                let x = row.get(k);
                if !x.is_zero() {
                    row.add_scaled(&pivot_row, &(-(x / &p)));
                }
            }
        }
        true
    }
}

/// Incrementally built row echelon basis. Each stored row has leading coefficient 1 at its
/// pivot column and no entry in the pivot columns of earlier-inserted rows to its left.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn from_rows<I: IntoIterator<Item = SparseVec>>(rows: I) -> Self {
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce_from(&self, v: &mut SparseVec, mut from: usize) {
        loop {
            let next = v
                .0
                .range(from..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            match next {
                None => break,
                Some((c, x)) => {
                    v.add_scaled(&self.pivots[&c], &-x);
                    from = c + 1;
                }
            }
        }
    }

    /// Residual of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut w = v.clone();
        self.reduce_from(&mut w, 0);
        w
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Returns true when `v` was independent of the stored rows.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut w = v;
        self.reduce_from(&mut w, 0);
        let Some((c, lead)) = w.leading() else { return false };
        let inv = lead.recip();
        let w = w.scaled(&inv);
        self.pivots.insert(c, w);
        true
    }

    /// Fully reduced rows keyed by pivot column.
    pub fn into_rref(mut self) -> BTreeMap<usize, SparseVec> {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for c in cols {
            let mut row = self.pivots.remove(&c).unwrap();
            self.reduce_from(&mut row, c + 1);
            self.pivots.insert(c, row);
        }
        self.pivots
    }

    pub fn basis(&self) -> Vec<SparseVec> {
        self.pivots.values().cloned().collect()
    }

    pub fn rref_basis(&self) -> Vec<SparseVec> {
        self.clone().into_rref().into_values().collect()
    }
}

/// Dimension of the span of the given vectors.
pub fn span_rank<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> usize {
    Echelon::from_rows(vs.into_iter().cloned()).rank()
}

/// Basis of the intersection of two subspaces given by spanning sets.
pub fn intersect(a: &[SparseVec], b: &[SparseVec]) -> Vec<SparseVec> {
    // x = Σ s_i a_i = Σ t_j b_j  ⇒ kernel of [A | −B]
    let dim = a.iter().chain(b).filter_map(SparseVec::max_index).max().map_or(0, |m| m + 1);
    let mut cols: Vec<SparseVec> = a.to_vec();
    cols.extend(b.iter().map(SparseVec::neg));
    let m = Matrix::from_columns(&cols, dim);
    let mut out = Echelon::new();
    for k in m.kernel_basis() {
        let mut x = SparseVec::new();
        for (i, s) in k.iter().filter(|(i, _)| *i < a.len()) {
            x.add_scaled(&a[i], s);
        }
        out.insert(x);
    }
    out.rref_basis()
}

/// Coordinates of `v` in terms of `basis`, if `v` lies in their span.
pub fn coordinates(basis: &[SparseVec], v: &SparseVec) -> Option<SparseVec> {
    let dim = basis.iter().chain(std::iter::once(v)).filter_map(SparseVec::max_index).max().map_or(0, |m| m + 1);
    Matrix::from_columns(basis, dim).solve_sparse(v)
}
