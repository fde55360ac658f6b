//! Cochains C^k(𝔪, 𝔤) of the negative part 𝔪 of a graded algebra 𝔤 with values in 𝔤, the
//! coboundary, the weight grading and the 𝔤⁰-action.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{fmt_rational, Echelon, Matrix, Rational, SparseVec};
use crate::glie::GradedLieAlgebra;

/// Sorted argument indices (negative basis elements of 𝔤) and a target basis index.
pub type Key = (Vec<usize>, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    coeffs: BTreeMap<Key, Rational>,
}

/// Sign of the permutation sorting `v`, or `None` on a repeated entry.
fn sort_sign(v: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl Cochain {
    pub fn zero(degree: usize) -> Cochain {
        Cochain { degree, coeffs: BTreeMap::new() }
    }

    /// `x₁* ∧ … ∧ x_k* ⊗ e_t` for arguments in any order.
    pub fn unit(args: &[usize], target: usize) -> Cochain {
        let mut c = Cochain::zero(args.len());
        c.add_term(args, target, &Rational::one());
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, args: &[usize], target: usize) -> Rational {
        let mut a = args.to_vec();
        match sort_sign(&mut a) {
            None => Rational::zero(),
            Some(s) => self.coeffs.get(&(a, target)).map_or_else(Rational::zero, |c| c * Rational::from_integer(s.into())),
        }
    }

    pub fn add_term(&mut self, args: &[usize], target: usize, c: &Rational) {
        assert_eq!(args.len(), self.degree, "cochain degree");
        let mut a = args.to_vec();
        let Some(s) = sort_sign(&mut a) else { return };
        if c.is_zero() {
            return;
        }
        let key = (a, target);
        let e = self.coeffs.entry(key.clone()).or_insert_with(Rational::zero);
        if s > 0 {
            *e += c;
        } else {
            *e -= c;
        }
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, o: &Cochain, s: &Rational) {
        assert_eq!(self.degree, o.degree, "cochain degree");
        for ((a, t), c) in &o.coeffs {
            self.add_term(a, *t, &(c * s));
        }
    }

    pub fn scaled(&self, s: &Rational) -> Cochain {
        let mut c = Cochain::zero(self.degree);
        c.add_scaled(self, s);
        c
    }

    pub fn plus(&self, o: &Cochain) -> Cochain {
        let mut c = self.clone();
        c.add_scaled(o, &Rational::one());
        c
    }

    pub fn minus(&self, o: &Cochain) -> Cochain {
        let mut c = self.clone();
        c.add_scaled(o, &-Rational::one());
        c
    }

    /// Common weight wt(target) − Σ wt(args) of all terms.
    pub fn weight(&self, g: &GradedLieAlgebra) -> Option<i32> {
        let mut ws = self.coeffs.keys().map(|k| key_weight(g, k));
        let w = ws.next()?;
        ws.all(|u| u == w).then_some(w)
    }

    /// Value on basis arguments (any order).
    pub fn value_on_basis(&self, args: &[usize]) -> SparseVec {
        let mut a = args.to_vec();
        let Some(s) = sort_sign(&mut a) else { return SparseVec::new() };
        let mut out = SparseVec::new();
        let lo = (a.clone(), 0);
        let hi = (a.clone(), usize::MAX);
        for ((_, t), c) in self.coeffs.range(lo..=hi) {
            out.add_at(*t, c);
        }
        if s < 0 {
            out.neg()
        } else {
            out
        }
    }

    /// Multilinear evaluation.
    pub fn eval(&self, args: &[SparseVec]) -> SparseVec {
        assert_eq!(args.len(), self.degree, "cochain degree");
        let mut out = SparseVec::new();
        let mut idx = Vec::with_capacity(args.len());
        self.eval_rec(args, &mut idx, &Rational::one(), &mut out);
        out
    }

    fn eval_rec(&self, args: &[SparseVec], idx: &mut Vec<usize>, coef: &Rational, out: &mut SparseVec) {
        if idx.len() == args.len() {
            out.add_scaled(&self.value_on_basis(idx), coef);
            return;
        }
        for (i, c) in args[idx.len()].iter() {
            if idx.contains(&i) {
                continue;
            }
            idx.push(i);
            self.eval_rec(args, idx, &(coef * c), out);
            idx.pop();
        }
    }

    pub fn format(&self, g: &GradedLieAlgebra) -> String {
        crate::glie::format_combination(self.coeffs.iter().map(|((a, t), c)| (key_label(g, a, *t), c.clone())))
    }

    pub fn to_file(&self, g: &GradedLieAlgebra) -> Vec<CochainTerm> {
        self.coeffs
            .iter()
            .map(|((a, t), c)| CochainTerm {
                args: a.iter().map(|i| g.label(*i).to_string()).collect(),
                c: fmt_rational(c),
                target: g.label(*t).to_string(),
            })
            .collect()
    }
}

/// Serialized cochain term; keys in alphabetical order.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CochainTerm {
    pub args: Vec<String>,
    pub c: String,
    pub target: String,
}

pub fn key_label(g: &GradedLieAlgebra, args: &[usize], t: usize) -> String {
    let a: Vec<String> = args.iter().map(|i| format!("{}*", g.label(*i))).collect();
    format!("{}⊗{}", a.join("∧"), g.label(t))
}

pub fn key_weight(g: &GradedLieAlgebra, (args, t): &Key) -> i32 {
    g.weight(*t) - args.iter().map(|a| g.weight(*a)).sum::<i32>()
}

fn negatives(g: &GradedLieAlgebra) -> Vec<usize> {
    (0..g.dim()).filter(|&i| g.weight(i) < 0).collect()
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// ∂φ(x₀, …, x_k) = Σ_i (−1)^i [x_i, φ(…x̂_i…)] + Σ_{i<j} (−1)^{i+j} φ([x_i, x_j], …x̂_i…x̂_j…).
pub fn coboundary(c: &Cochain, g: &GradedLieAlgebra) -> Result<Cochain> {
    let k = c.degree;
    if k >= 3 {
        return Err(Error::UnsupportedDegree(k));
    }
    let negs = negatives(g);
    let mut out = Cochain::zero(k + 1);
    if c.is_zero() {
        return Ok(out);
    }
    let neg_set: std::collections::BTreeSet<usize> = negs.iter().copied().collect();
    for s in subsets(&negs, k + 1) {
        let mut val = SparseVec::new();
        for i in 0..=k {
            let rest: Vec<usize> = s.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, x)| *x).collect();
            let phi = c.value_on_basis(&rest);
            if phi.is_zero() {
                continue;
            }
            let term = g.bracket(&SparseVec::unit(s[i]), &phi);
            val.add_scaled(&term, &sign_rat(i));
        }
        for i in 0..=k {
            for j in i + 1..=k {
                let br = g.bracket_basis(s[i], s[j]);
                if br.is_zero() {
                    continue;
                }
                debug_assert!(br.indices().all(|x| neg_set.contains(&x)));
                let mut args = vec![br];
                args.extend(s.iter().enumerate().filter(|(p, _)| *p != i && *p != j).map(|(_, x)| SparseVec::unit(*x)));
                let term = c.eval(&args);
                val.add_scaled(&term, &sign_rat(i + j));
            }
        }
        for (t, x) in val.iter() {
            out.add_term(&s, t, x);
        }
    }
    Ok(out)
}

fn sign_rat(i: usize) -> Rational {
    if i % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Projection of `v` onto the negative part along 𝔤⁰.
pub fn project_negative(g: &GradedLieAlgebra, v: &SparseVec) -> SparseVec {
    v.restricted(|i| g.weight(i) < 0)
}

/// (a·φ)(x₁, …, x_k) = [a, φ(x₁, …, x_k)] − Σ_i φ(x₁, …, pr_𝔪[a, x_i], …, x_k).
pub fn g0_action(a: &SparseVec, c: &Cochain, g: &GradedLieAlgebra) -> Cochain {
    let k = c.degree;
    let mut out = Cochain::zero(k);
    if a.is_zero() || c.is_zero() {
        return out;
    }
    for ((args, t), x) in &c.coeffs {
        // [a, e_t] on the same arguments
        for (s, y) in g.bracket(a, &SparseVec::unit(*t)).iter() {
            out.add_term(args, s, &(x * y));
        }
    }
    // − Σ_i φ(…, pr[a, z], …): the term of φ at args contributes to arguments where args[p]
    // is replaced by z, with coefficient (pr[a, z])_{args[p]}
    let negs = negatives(g);
    let pr: Vec<(usize, SparseVec)> =
        negs.iter().map(|&z| (z, project_negative(g, &g.bracket(a, &SparseVec::unit(z))))).filter(|(_, v)| !v.is_zero()).collect();
    for ((args, t), x) in &c.coeffs {
        for p in 0..k {
            for (z, v) in &pr {
                let y = v.get(args[p]);
                if y.is_zero() {
                    continue;
                }
                let mut new_args = args.clone();
                new_args[p] = *z;
                out.add_term(&new_args, *t, &-(x * y));
            }
        }
    }
    out
}

/// Basis of C^k (or of its positive-weight part) by unit cochains, indexed for linear algebra.
#[derive(Clone, Debug)]
pub struct CochainSpace {
    pub degree: usize,
    pub keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl CochainSpace {
    pub fn new(g: &GradedLieAlgebra, degree: usize, positive: bool) -> CochainSpace {
        Self::filtered(g, degree, |w| !positive || w > 0)
    }

    pub fn filtered(g: &GradedLieAlgebra, degree: usize, keep: impl Fn(i32) -> bool) -> CochainSpace {
        let negs = negatives(g);
        let mut keys = Vec::new();
        for s in subsets(&negs, degree) {
            for t in 0..g.dim() {
                let key = (s.clone(), t);
                if keep(key_weight(g, &key)) {
                    keys.push(key);
                }
            }
        }
        keys.sort_by_key(|k| key_weight(g, k));
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        CochainSpace { degree, keys, index }
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn position(&self, key: &Key) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Coordinates; fails if `c` has a term outside the space.
    pub fn to_vector(&self, c: &Cochain) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (k, x) in &c.coeffs {
            v.add_at(self.position(k)?, x);
        }
        Some(v)
    }

    pub fn from_vector(&self, v: &SparseVec) -> Cochain {
        let mut c = Cochain::zero(self.degree);
        for (i, x) in v.iter() {
            c.coeffs.insert(self.keys[i].clone(), x.clone());
        }
        c
    }

    pub fn unit(&self, i: usize) -> Cochain {
        let (a, t) = &self.keys[i];
        Cochain::unit(a, *t)
    }

    /// Matrix of a linear operator that maps this space into `target`.
    pub fn operator_matrix(&self, target: &CochainSpace, op: impl Fn(&Cochain) -> Cochain) -> Result<Matrix> {
        let mut cols = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let img = op(&self.unit(i));
            let v = target
                .to_vector(&img)
                .ok_or_else(|| Error::Inconsistent("operator leaves the target cochain space".into()))?;
            cols.push(v);
        }
        Ok(Matrix::from_columns(&cols, target.dim()))
    }

    pub fn weights(&self, g: &GradedLieAlgebra) -> Vec<i32> {
        self.keys.iter().map(|k| key_weight(g, k)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct WeightedSpace {
    pub weight: i32,
    pub basis: Vec<Cochain>,
}

/// C^k (or C^k₊) split by weight, in increasing weight order.
pub fn weight_decompose(k: usize, positive: bool, g: &GradedLieAlgebra) -> Result<Vec<WeightedSpace>> {
    if k == 0 || k > 3 {
        return Err(Error::UnsupportedDegree(k));
    }
    let space = CochainSpace::new(g, k, positive);
    let mut by_w: BTreeMap<i32, Vec<Cochain>> = BTreeMap::new();
    for (i, key) in space.keys.iter().enumerate() {
        by_w.entry(key_weight(g, key)).or_default().push(space.unit(i));
    }
    Ok(by_w.into_iter().map(|(weight, basis)| WeightedSpace { weight, basis }).collect())
}

/// Matrix of ∂ : C^k(₊) → C^{k+1}(₊).
pub fn coboundary_matrix(g: &GradedLieAlgebra, src: &CochainSpace, dst: &CochainSpace) -> Result<Matrix> {
    let mut cols = Vec::with_capacity(src.dim());
    for i in 0..src.dim() {
        let d = coboundary(&src.unit(i), g)?;
        cols.push(dst.to_vector(&d).ok_or_else(|| Error::Inconsistent("coboundary changed the weight".into()))?);
    }
    Ok(Matrix::from_columns(&cols, dst.dim()))
}

/// Reduced echelon basis of ∂(C^k₊) (or ∂(C^k)) inside C^{k+1}.
pub fn image_of_coboundary(k: usize, positive: bool, g: &GradedLieAlgebra) -> Result<Vec<Cochain>> {
    if k != 1 && k != 2 {
        return Err(Error::UnsupportedDegree(k));
    }
    let src = CochainSpace::new(g, k, positive);
    let dst = CochainSpace::new(g, k + 1, positive);
    let m = coboundary_matrix(g, &src, &dst)?;
    let cols: Vec<SparseVec> = (0..m.cols()).map(|j| m.column(j)).collect();
    let e = Echelon::from_rows(cols);
    Ok(e.rref_basis().iter().map(|v| dst.from_vector(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, E, H, X};
    use crate::exactla::int;

    fn heis3() -> GradedLieAlgebra {
        let mut g = GradedLieAlgebra::new([("x", -1), ("y", -1), ("z", -2)]);
        g.set_bracket(0, 1, SparseVec::unit(2)).unwrap();
        g
    }

    #[test]
    fn unit_sign_convention() {
        let c = Cochain::unit(&[2, 1], 0);
        assert_eq!(c.coeff(&[1, 2], 0), int(-1));
        assert_eq!(c.coeff(&[2, 1], 0), int(1));
        assert!(Cochain::unit(&[1, 1], 0).is_zero());
    }

    #[test]
    fn coboundary_degree_one_by_hand() {
        // heis₃ acting on itself: ∂(z*⊗z)(x, y) = [x, φ(y)] − [y, φ(x)] − φ([x, y]) = −z
        let g = heis3();
        let d = coboundary(&Cochain::unit(&[2], 2), &g).unwrap();
        assert_eq!(d, Cochain::unit(&[0, 1], 2).scaled(&int(-1)));
        assert!(coboundary(&Cochain::zero(1), &g).unwrap().is_zero());
        assert!(matches!(coboundary(&Cochain::zero(3), &g), Err(Error::UnsupportedDegree(3))));
    }

    #[test]
    fn square_is_zero_on_heis3() {
        let g = heis3();
        let sp = CochainSpace::new(&g, 1, false);
        for i in 0..sp.dim() {
            let d = coboundary(&sp.unit(i), &g).unwrap();
            assert!(coboundary(&d, &g).unwrap().is_zero());
        }
    }

    #[test]
    fn h_action_eigenvalue() {
        let (k, n) = (1, 6);
        let g = catalog::gl2_heis_skn(k, n).unwrap();
        let c = Cochain::unit(&[g.idx("e2")], g.idx("e6"));
        assert_eq!(g0_action(&SparseVec::unit(H), &c, &g), c.scaled(&int(8)));
        assert!(g0_action(&SparseVec::new(), &c, &g).is_zero());
    }

    #[test]
    fn action_uses_projection() {
        // Y ∈ 𝔤₁ sends X to −H ∈ 𝔤₀, which is dropped by pr_𝔪.
        let g = catalog::gl2_heis_skn(2, 6).unwrap();
        let c = Cochain::unit(&[X], E);
        let a = g0_action(&SparseVec::unit(catalog::Y), &c, &g);
        assert!(a.is_zero(), "{}", a.format(&g));
    }

    #[test]
    fn decomposition_is_complete() {
        let g = catalog::gl2_heis_skn(1, 6).unwrap();
        for k in 1..=2 {
            let all: usize = weight_decompose(k, false, &g).unwrap().iter().map(|w| w.basis.len()).sum();
            assert_eq!(all, CochainSpace::new(&g, k, false).dim());
            assert!(weight_decompose(k, true, &g).unwrap().iter().all(|w| w.weight >= 1));
        }
    }
}
