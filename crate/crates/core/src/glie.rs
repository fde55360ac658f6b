//! Graded Lie algebras over ℚ given by a weighted basis and structure constants.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{fmt_rational, parse_rational, Echelon, Matrix, Rational, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub label: String,
    pub weight: i32,
}

/// Structure constants are stored only for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    basis: Vec<BasisElement>,
    sc: BTreeMap<(usize, usize), SparseVec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Basis triples `i < j < k` violating the Jacobi identity.
    pub jacobi_failures: Vec<(usize, usize, usize)>,
    /// `(i, j, k)`: `[e_i, e_j]` has a component on `e_k` of the wrong weight.
    pub grading_violations: Vec<(usize, usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.jacobi_failures.is_empty() && self.grading_violations.is_empty()
    }
}

impl GradedLieAlgebra {
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, i32)>) -> Self {
        let basis = basis.into_iter().map(|(l, w)| BasisElement { label: l.into(), weight: w }).collect();
        GradedLieAlgebra { basis, sc: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn weight(&self, i: usize) -> i32 {
        self.basis[i].weight
    }

    pub fn weights(&self) -> Vec<i32> {
        self.basis.iter().map(|b| b.weight).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// Index of a label known to exist.
    pub fn idx(&self, label: &str) -> usize {
        self.index_of(label).unwrap_or_else(|| panic!("no basis element {label}"))
    }

    /// Sets `[e_i, e_j] = v` (and hence `[e_j, e_i] = -v`).
    pub fn set_bracket(&mut self, i: usize, j: usize, v: SparseVec) -> Result<()> {
        let n = self.dim();
        if i >= n || j >= n || v.max_index().is_some_and(|k| k >= n) {
            return Err(Error::InvalidAlgebra(format!("bracket index out of range ({i}, {j})")));
        }
        if i == j {
            if v.is_zero() {
                return Ok(());
            }
            return Err(Error::InvalidAlgebra(format!("nonzero self-bracket of {}", self.label(i))));
        }
        let (key, v) = if i < j { ((i, j), v) } else { ((j, i), v.neg()) };
        if v.is_zero() {
            self.sc.remove(&key);
        } else {
            self.sc.insert(key, v);
        }
        Ok(())
    }

    pub fn structure_constants(&self) -> impl Iterator<Item = (usize, usize, &SparseVec)> {
        self.sc.iter().map(|((i, j), v)| (*i, *j, v))
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => SparseVec::new(),
            Less => self.sc.get(&(i, j)).cloned().unwrap_or_default(),
            Greater => self.sc.get(&(j, i)).map(SparseVec::neg).unwrap_or_default(),
        }
    }

    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                if i == j {
                    continue;
                }
                let (key, sign) = if i < j { ((i, j), Rational::one()) } else { ((j, i), -Rational::one()) };
                if let Some(v) = self.sc.get(&key) {
                    out.add_scaled(v, &(a * b * sign));
                }
            }
        }
        out
    }

    /// Matrix of ad(x): column j holds `[x, e_j]`.
    pub fn adjoint_matrix(&self, x: &SparseVec) -> Matrix {
        let cols: Vec<SparseVec> = (0..self.dim()).map(|j| self.bracket(x, &SparseVec::unit(j))).collect();
        Matrix::from_columns(&cols, self.dim())
    }

    pub fn graded_component(&self, w: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weight(i) == w).collect()
    }

    /// Distinct weights in increasing order.
    pub fn weight_set(&self) -> Vec<i32> {
        self.basis.iter().map(|b| b.weight).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn weight_dims(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for b in &self.basis {
            *m.entry(b.weight).or_insert(0) += 1;
        }
        m
    }

    /// Common weight of the support of `v`, or `None` if `v` is zero or inhomogeneous.
    pub fn homogeneous_weight(&self, v: &SparseVec) -> Option<i32> {
        let mut it = v.indices().map(|i| self.weight(i));
        let w = it.next()?;
        it.all(|u| u == w).then_some(w)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for ((i, j), v) in &self.sc {
            for k in v.indices() {
                if self.weight(k) != self.weight(*i) + self.weight(*j) {
                    rep.grading_violations.push((*i, *j, k));
                }
            }
        }
        let n = self.dim();
        let ad: Vec<Matrix> = (0..n).map(|i| self.adjoint_matrix(&SparseVec::unit(i))).collect();
        for i in 0..n {
            for j in i + 1..n {
                let eij = self.bracket_basis(i, j);
                for k in j + 1..n {
                    let mut s = ad[i].mul_vec(&self.bracket_basis(j, k));
                    s.add_scaled(&ad[j].mul_vec(&self.bracket_basis(k, i)), &Rational::one());
                    s.add_scaled(&ad[k].mul_vec(&eij), &Rational::one());
                    if !s.is_zero() {
                        rep.jacobi_failures.push((i, j, k));
                    }
                }
            }
        }
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Lower central series dimensions `dim g, dim [g,g], …` down to the first repeat.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim();
        let mut current: Vec<SparseVec> = (0..n).map(SparseVec::unit).collect();
        let mut dims = vec![n];
        loop {
            let mut next = Echelon::new();
            for x in &current {
                for i in 0..n {
                    next.insert(self.bracket(&SparseVec::unit(i), x));
                }
            }
            let d = next.rank();
            let stalled = d == *dims.last().unwrap();
            dims.push(d);
            if d == 0 || stalled {
                return dims;
            }
            current = next.basis();
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        *self.lower_central_series().last().unwrap() == 0
    }

    /// Subalgebra spanned by the given basis elements, reindexed in the given order.
    pub fn subalgebra_on(&self, idx: &[usize]) -> Result<GradedLieAlgebra> {
        let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(p, i)| (*i, p)).collect();
        let mut sub = GradedLieAlgebra {
            basis: idx.iter().map(|i| self.basis[*i].clone()).collect(),
            sc: BTreeMap::new(),
        };
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a + 1) {
                let v = self.bracket_basis(i, j);
                if let Some(k) = v.indices().find(|k| !pos.contains_key(k)) {
                    return Err(Error::InvalidAlgebra(format!(
                        "[{}, {}] leaves the span (component on {})",
                        self.label(i),
                        self.label(j),
                        self.label(k)
                    )));
                }
                sub.set_bracket(a, b, v.remap(|k| pos.get(&k).copied()))?;
            }
        }
        Ok(sub)
    }

    /// Negative part and the indices of its basis in `self`.
    pub fn negative_part(&self) -> (GradedLieAlgebra, Vec<usize>) {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| self.weight(i) < 0).collect();
        (self.subalgebra_on(&idx).expect("negative weights are closed under brackets"), idx)
    }

    pub fn nonnegative_part(&self) -> (GradedLieAlgebra, Vec<usize>) {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| self.weight(i) >= 0).collect();
        (self.subalgebra_on(&idx).expect("non-negative weights are closed under brackets"), idx)
    }

    /// Same brackets with new weights; fails if the brackets are not graded for them.
    pub fn reweighted(&self, weights: &[i32]) -> Result<GradedLieAlgebra> {
        if weights.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: weights.len() });
        }
        let mut g = self.clone();
        for (b, w) in g.basis.iter_mut().zip(weights) {
            b.weight = *w;
        }
        if let Some((i, j, k)) = g.validate_grading().first().copied() {
            return Err(Error::InvalidAlgebra(format!(
                "grading incompatible with [{}, {}] ∋ {}",
                g.label(i),
                g.label(j),
                g.label(k)
            )));
        }
        Ok(g)
    }

    fn validate_grading(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for ((i, j), v) in &self.sc {
            for k in v.indices() {
                if self.weight(k) != self.weight(*i) + self.weight(*j) {
                    out.push((*i, *j, k));
                }
            }
        }
        out
    }

    pub fn relabeled(&self, labels: &[String]) -> GradedLieAlgebra {
        let mut g = self.clone();
        for (b, l) in g.basis.iter_mut().zip(labels) {
            b.label = l.clone();
        }
        g
    }

    /// Human readable linear combination, e.g. `2*X - 1/2*eta`.
    pub fn format_element(&self, v: &SparseVec) -> String {
        format_combination(v.iter().map(|(i, c)| (self.label(i).to_string(), c.clone())))
    }

    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            basis: self.basis.iter().map(|b| BasisEntry { label: b.label.clone(), weight: b.weight }).collect(),
            brackets: self
                .sc
                .iter()
                .map(|((i, j), v)| BracketEntry {
                    i: *i,
                    j: *j,
                    result: v.iter().map(|(k, c)| Term { c: fmt_rational(c), k }).collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(f: &AlgebraFile) -> Result<GradedLieAlgebra> {
        let mut g = GradedLieAlgebra::new(f.basis.iter().map(|b| (b.label.clone(), b.weight)));
        let mut seen = BTreeSet::new();
        for b in &f.brackets {
            if b.i >= b.j {
                return Err(Error::Parse(format!("bracket entry ({}, {}) must have i < j", b.i, b.j)));
            }
            if !seen.insert((b.i, b.j)) {
                return Err(Error::Parse(format!("duplicate bracket entry ({}, {})", b.i, b.j)));
            }
            let mut v = SparseVec::new();
            for t in &b.result {
                v.add_at(t.k, &parse_rational(&t.c)?);
            }
            g.set_bracket(b.i, b.j, v)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("algebra serializes")
    }

    pub fn from_json(s: &str) -> Result<GradedLieAlgebra> {
        let f: AlgebraFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        GradedLieAlgebra::from_file(&f)
    }
}

pub fn format_combination(terms: impl Iterator<Item = (String, Rational)>) -> String {
    let mut s = String::new();
    for (label, c) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            s.push_str(&fmt_rational(&a));
            s.push('*');
        }
        s.push_str(&label);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub weight: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub c: String,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub result: Vec<Term>,
}

/// Canonical on-disk form of an algebra. Field order is alphabetical so the pretty printed
/// JSON has sorted keys.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub basis: Vec<BasisEntry>,
    pub brackets: Vec<BracketEntry>,
}

/// Checks that `images[i]` (the image of `e_i`) defines a weight preserving Lie algebra
/// homomorphism `src → dst`. Returns a description of the first failure.
pub fn check_homomorphism(src: &GradedLieAlgebra, dst: &GradedLieAlgebra, images: &[SparseVec]) -> std::result::Result<(), String> {
    if images.len() != src.dim() {
        return Err(format!("expected {} images, got {}", src.dim(), images.len()));
    }
    for (i, v) in images.iter().enumerate() {
        if !v.is_zero() && dst.homogeneous_weight(v) != Some(src.weight(i)) {
            return Err(format!("image of {} is not of weight {}", src.label(i), src.weight(i)));
        }
    }
    let apply = |v: &SparseVec| {
        let mut out = SparseVec::new();
        for (i, c) in v.iter() {
            out.add_scaled(&images[i], c);
        }
        out
    };
    for i in 0..src.dim() {
        for j in i + 1..src.dim() {
            let lhs = apply(&src.bracket_basis(i, j));
            let rhs = dst.bracket(&images[i], &images[j]);
            if lhs != rhs {
                return Err(format!("bracket [{}, {}] not preserved", src.label(i), src.label(j)));
            }
        }
    }
    Ok(())
}

/// Homomorphism check plus bijectivity.
pub fn check_isomorphism(src: &GradedLieAlgebra, dst: &GradedLieAlgebra, images: &[SparseVec]) -> std::result::Result<(), String> {
    check_homomorphism(src, dst, images)?;
    if src.dim() != dst.dim() {
        return Err(format!("dimensions differ: {} vs {}", src.dim(), dst.dim()));
    }
    let r = crate::exactla::span_rank(images);
    if r != dst.dim() {
        return Err(format!("map has rank {r} < {}", dst.dim()));
    }
    Ok(())
}

/// Negatively graded algebra: the home of a Tanaka symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolAlgebra {
    alg: GradedLieAlgebra,
}

impl SymbolAlgebra {
    pub fn new(alg: GradedLieAlgebra) -> Result<SymbolAlgebra> {
        if let Some(b) = alg.basis.iter().find(|b| b.weight >= 0) {
            return Err(Error::InvalidAlgebra(format!("{} has non-negative weight {}", b.label, b.weight)));
        }
        let rep = alg.validate();
        if !rep.is_valid() {
            return Err(Error::InvalidAlgebra(format!(
                "{} Jacobi failures, {} grading violations",
                rep.jacobi_failures.len(),
                rep.grading_violations.len()
            )));
        }
        Ok(SymbolAlgebra { alg })
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.alg
    }

    pub fn into_algebra(self) -> GradedLieAlgebra {
        self.alg
    }

    /// Largest `μ` with a nonzero component of weight `−μ`.
    pub fn depth(&self) -> usize {
        self.alg.basis.iter().map(|b| (-b.weight) as usize).max().unwrap_or(0)
    }

    /// Iterated brackets of the weight −1 component span everything.
    pub fn is_fundamental(&self) -> bool {
        let g = &self.alg;
        let gens: Vec<SparseVec> = g.graded_component(-1).into_iter().map(SparseVec::unit).collect();
        let mut span = Echelon::from_rows(gens.iter().cloned());
        let mut layer = gens.clone();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for x in &gens {
                for y in &layer {
                    let z = g.bracket(x, y);
                    if span.insert(z.clone()) {
                        next.push(z);
                    }
                }
            }
            layer = next;
        }
        span.rank() == g.dim()
    }
}

impl Deref for SymbolAlgebra {
    type Target = GradedLieAlgebra;
    fn deref(&self) -> &GradedLieAlgebra {
        &self.alg
    }
}

/// Weight-preserving derivation test for a linear map given by its matrix.
pub fn is_derivation(g: &GradedLieAlgebra, d: &Matrix) -> bool {
    let n = g.dim();
    let cols: Vec<SparseVec> = (0..n).map(|j| d.column(j)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = d.mul_vec(&g.bracket_basis(i, j));
            let rhs = g.bracket(&cols[i], &SparseVec::unit(j)).plus(&g.bracket(&SparseVec::unit(i), &cols[j]));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;

    pub(crate) fn heis3() -> GradedLieAlgebra {
        let mut g = GradedLieAlgebra::new([("x", -1), ("y", -1), ("z", -2)]);
        g.set_bracket(0, 1, SparseVec::unit(2)).unwrap();
        g
    }

    #[test]
    fn heis3_valid_and_fundamental() {
        let g = heis3();
        assert!(g.validate().is_valid());
        let s = SymbolAlgebra::new(g).unwrap();
        assert!(s.is_fundamental());
        assert_eq!(s.depth(), 2);
        assert!(s.is_nilpotent());
    }

    #[test]
    fn antisymmetry_by_storage() {
        let g = heis3();
        assert_eq!(g.bracket_basis(1, 0), SparseVec::unit(2).neg());
        let x = SparseVec::from_pairs([(0, int(3)), (1, int(-2))]);
        assert!(g.bracket(&x, &x).is_zero());
        let mut h = heis3();
        assert!(h.set_bracket(1, 1, SparseVec::unit(0)).is_err());
    }

    #[test]
    fn grading_violation_reported() {
        let mut g = GradedLieAlgebra::new([("a", -1), ("b", -1), ("c", -3)]);
        g.set_bracket(0, 1, SparseVec::unit(2)).unwrap();
        let rep = g.validate();
        assert_eq!(rep.grading_violations, vec![(0, 1, 2)]);
        assert!(SymbolAlgebra::new(g).is_err());
    }

    #[test]
    fn jacobi_failure_reported() {
        // [a,b]=b, [a,c]=c, [b,c]=a violates Jacobi.
        let mut g = GradedLieAlgebra::new([("a", 0), ("b", 0), ("c", 0)]);
        g.set_bracket(0, 1, SparseVec::unit(1)).unwrap();
        g.set_bracket(0, 2, SparseVec::unit(2)).unwrap();
        g.set_bracket(1, 2, SparseVec::unit(0)).unwrap();
        assert_eq!(g.validate().jacobi_failures, vec![(0, 1, 2)]);
    }

    #[test]
    fn non_fundamental_abelian() {
        let g = GradedLieAlgebra::new([("a", -1), ("b", -2)]);
        assert!(!SymbolAlgebra::new(g).unwrap().is_fundamental());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let mut g = heis3();
        g.set_bracket(0, 1, SparseVec::from_pairs([(2, crate::exactla::rat(-3, 2))])).unwrap();
        let s = g.to_json();
        let h = GradedLieAlgebra::from_json(&s).unwrap();
        assert_eq!(g, h);
        assert_eq!(s, h.to_json());
        assert!(s.contains("\"-3/2\""));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = GradedLieAlgebra::from_json("{\"basis\": [\n{\"label\": 3}]}").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn empty_weight_component() {
        assert!(heis3().graded_component(7).is_empty());
    }

    #[test]
    fn format_element_signs() {
        let g = heis3();
        let v = SparseVec::from_pairs([(0, int(2)), (2, crate::exactla::rat(-1, 2))]);
        assert_eq!(g.format_element(&v), "2*x - 1/2*z");
        assert_eq!(g.format_element(&SparseVec::new()), "0");
    }
}
