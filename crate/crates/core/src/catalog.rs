//! Named algebras and distributions: heis_{2n−5}, gl₂⋉heis_{2n−5}, its gradings, the symbols
//! 𝔰^{k,n}, flat model frames and the Monge frames.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{int, Rational, SparseVec};
use crate::glie::{GradedLieAlgebra, SymbolAlgebra};
use crate::vf::{Poly, PolyFrame, PolyVectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Heis,
    Gl2Heis,
    Skn,
    SympSymbol,
    Monge1,
    Monge2,
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
}

impl FamilySpec {
    pub fn check(&self) -> Result<()> {
        let FamilySpec { family, n, k } = *self;
        match family {
            Family::Heis | Family::Gl2Heis | Family::SympSymbol if n < 5 => Err(Error::Range(format!("n = {n} < 5"))),
            Family::Monge1 | Family::Monge2 if n < 6 => Err(Error::Range(format!("n = {n} < 6"))),
            Family::Skn | Family::Flat => check_skn_range(k, n),
            _ => Ok(()),
        }
    }
}

fn check_skn_range(k: usize, n: usize) -> Result<()> {
    if n < 5 || k > n - 4 || (n == 5 && k > 1) {
        return Err(Error::Range(format!("(k, n) = ({k}, {n}) outside 0 ≤ k ≤ n−4, n ≥ 5")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Symp,
    Skn(usize),
}

/// Index of ε_i (1-based) in the gl₂⋉heis basis `Y, H, E, X, ε_1, …, ε_{2n−6}, η`.
pub fn eps(i: usize) -> usize {
    3 + i
}

pub fn eta(n: usize) -> usize {
    2 * n - 2
}

pub const Y: usize = 0;
pub const H: usize = 1;
pub const E: usize = 2;
pub const X: usize = 3;

fn eps_label(i: usize) -> String {
    format!("e{i}")
}

fn sign(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// heis_{2n−5} on ε_1, …, ε_{2n−6}, η with [ε_i, ε_{2n−5−i}] = (−1)^i η, graded by
/// wt ε_i = −i, wt η = 5 − 2n.
pub fn build_heisenberg(n: usize) -> Result<GradedLieAlgebra> {
    if n < 5 {
        return Err(Error::Range(format!("n = {n} < 5")));
    }
    let m = 2 * n - 6;
    let mut basis: Vec<(String, i32)> = (1..=m).map(|i| (eps_label(i), -(i as i32))).collect();
    basis.push(("eta".into(), 5 - 2 * n as i32));
    let mut g = GradedLieAlgebra::new(basis);
    for i in 1..=m {
        let j = 2 * n - 5 - i;
        if i < j {
            g.set_bracket(i - 1, j - 1, SparseVec::from_pairs([(m, int(sign(i)))]))?;
        }
    }
    Ok(g)
}

fn weights(n: usize, grading: Grading) -> Vec<i32> {
    let n_ = n as i32;
    let mut w = vec![1, 0, 0, -1];
    match grading {
        Grading::Symp => {
            w.extend((1..=2 * n - 6).map(|i| -(i as i32)));
            w.push(5 - 2 * n_);
        }
        Grading::Skn(k) => {
            let k_ = k as i32;
            w.extend((1..=2 * n - 6).map(|i| n_ - 4 - k_ - i as i32));
            w.push(-3 - 2 * k_);
        }
    }
    w
}

/// gl₂⋉heis_{2n−5} in the basis `Y, H, E, X, ε_1, …, ε_{2n−6}, η`, Symp graded.
pub fn build_gl2_semidirect_heis(n: usize) -> Result<GradedLieAlgebra> {
    if n < 5 {
        return Err(Error::Range(format!("n = {n} < 5")));
    }
    let m = 2 * n - 6;
    let mut labels: Vec<String> = ["Y", "H", "E", "X"].iter().map(|s| s.to_string()).collect();
    labels.extend((1..=m).map(eps_label));
    labels.push("eta".into());
    let mut g = GradedLieAlgebra::new(labels.into_iter().zip(weights(n, Grading::Symp)));
    let et = eta(n);
    let one = |k: usize, c: i64| SparseVec::from_pairs([(k, int(c))]);
    g.set_bracket(X, Y, one(H, 1))?;
    g.set_bracket(H, X, one(X, 2))?;
    g.set_bracket(H, Y, one(Y, -2))?;
    for i in 1..=m {
        let ii = i as i64;
        let nn = n as i64;
        g.set_bracket(H, eps(i), one(eps(i), 2 * ii + 5 - 2 * nn))?;
        g.set_bracket(E, eps(i), one(eps(i), 1))?;
        if i < m {
            g.set_bracket(X, eps(i), one(eps(i + 1), 1))?;
        }
        if i > 1 {
            g.set_bracket(Y, eps(i), one(eps(i - 1), (ii - 1) * (2 * nn - 5 - ii)))?;
        }
        let j = 2 * n - 5 - i;
        if i < j {
            g.set_bracket(eps(i), eps(j), one(et, sign(i)))?;
        }
    }
    g.set_bracket(E, et, one(et, 2))?;
    Ok(g)
}

pub fn grade(g: &GradedLieAlgebra, scheme: Grading) -> Result<GradedLieAlgebra> {
    let n = (g.dim() + 1) / 2;
    if g.dim() != 2 * n - 1 || g.index_of("eta") != Some(eta(n)) {
        return Err(Error::InvalidAlgebra("not a gl2⋉heis algebra from the catalog".into()));
    }
    if let Grading::Skn(k) = scheme {
        check_skn_range(k, n)?;
    }
    g.reweighted(&weights(n, scheme))
}

/// gl₂⋉heis_{2n−5} with the 𝔰^{k,n} grading.
pub fn gl2_heis_skn(k: usize, n: usize) -> Result<GradedLieAlgebra> {
    check_skn_range(k, n)?;
    grade(&build_gl2_semidirect_heis(n)?, Grading::Skn(k))
}

/// Negative part of gl₂⋉heis_{2n−5} under the 𝔰^{k,n} grading, basis `X, ε_{n−3−k}, …, η`.
pub fn build_skn(k: usize, n: usize) -> Result<SymbolAlgebra> {
    let g = gl2_heis_skn(k, n)?;
    SymbolAlgebra::new(g.negative_part().0)
}

/// Negative part of the Symp grading: ⟨X⟩⋉heis_{2n−5}.
pub fn symp_symbol(n: usize) -> Result<SymbolAlgebra> {
    let g = build_gl2_semidirect_heis(n)?;
    SymbolAlgebra::new(g.negative_part().0)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct EigenRow {
    pub label: String,
    pub weight: i32,
    pub l_h: i64,
    pub l_e: i64,
}

/// Grading weight and ad(H), ad(E) eigenvalues of every basis element, read off the adjoint
/// matrices and checked against the closed forms.
pub fn eigen_table(n: usize, k: usize) -> Result<Vec<EigenRow>> {
    let g = gl2_heis_skn(k, n)?;
    let ad_h = g.adjoint_matrix(&SparseVec::unit(H));
    let ad_e = g.adjoint_matrix(&SparseVec::unit(E));
    let (n_, k_) = (n as i64, k as i64);
    let mut rows = Vec::new();
    for b in 0..g.dim() {
        let read = |m: &crate::exactla::Matrix| -> Result<i64> {
            let col = m.column(b);
            let d = m.get(b, b);
            if col.nnz() > 1 || (col.nnz() == 1 && col.get(b).is_zero()) || !d.is_integer() {
                return Err(Error::Inconsistent(format!("{} is not an eigenvector", g.label(b))));
            }
            Ok(d.to_integer().try_into().expect("small eigenvalue"))
        };
        let row = EigenRow { label: g.label(b).to_string(), weight: g.weight(b), l_h: read(&ad_h)?, l_e: read(&ad_e)? };
        let expected = match b {
            Y => (1, -2, 0),
            H | E => (0, 0, 0),
            X => (-1, 2, 0),
            b if b == eta(n) => (-3 - 2 * k_, 0, 2),
            b => {
                let i = (b - 3) as i64;
                (n_ - 4 - k_ - i, 2 * i + 5 - 2 * n_, 1)
            }
        };
        if (row.weight as i64, row.l_h, row.l_e) != expected {
            return Err(Error::Inconsistent(format!("eigen table mismatch at {}: {:?} vs {:?}", row.label, row, expected)));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn var(nv: usize, i: usize) -> Poly {
    Poly::var(nv, i)
}

/// Monge frames for z′ = (y^{(n−3)})² (`which = 1`) and z″ = (y^{(n−4)})² (`which = 2`).
pub fn monge_frame(n: usize, which: u8) -> Result<PolyFrame> {
    if n < 6 {
        return Err(Error::Range(format!("n = {n} < 6")));
    }
    let (top, zs) = match which {
        1 => (n - 3, 1),
        2 => (n - 4, 2),
        _ => return Err(Error::Range(format!("Monge frame {which} ∉ {{1, 2}}"))),
    };
    let mut coords = vec!["x".to_string(), "y".to_string()];
    coords.extend((1..=top).map(|j| format!("y{j}")));
    coords.push("z".into());
    if zs == 2 {
        coords.push("z1".into());
    }
    let nv = coords.len();
    debug_assert_eq!(nv, n);
    // y^{(j)} sits at index 1 + j
    let mut x1 = vec![Poly::zero(nv); nv];
    x1[0] = Poly::constant(nv, Rational::one());
    for j in 0..top {
        x1[1 + j] = var(nv, 2 + j);
    }
    let sq = var(nv, 1 + top).mul(&var(nv, 1 + top));
    if zs == 1 {
        x1[2 + top] = sq;
    } else {
        x1[2 + top] = var(nv, 3 + top);
        x1[3 + top] = sq;
    }
    let mut x2 = vec![Poly::zero(nv); nv];
    x2[1 + top] = Poly::constant(nv, Rational::one());
    let names: Vec<String> = coords;
    Ok(PolyFrame::new(
        names.clone(),
        PolyVectorField::new(names.clone(), x1)?,
        PolyVectorField::new(names, x2)?,
    )?)
}

/// Left-invariant frame of 𝔪_{−1} on the simply connected group of 𝔪 in exponential
/// coordinates of the second kind, g = exp(x_N e_N)⋯exp(x_1 e_1), with e_1, …, e_N the
/// basis sorted by descending weight.
pub fn flat_model_frame(m: &SymbolAlgebra) -> Result<PolyFrame> {
    let g = m.algebra();
    let gens = g.graded_component(-1);
    if gens.len() != 2 {
        return Err(Error::Range(format!("weight −1 component has dimension {} ≠ 2", gens.len())));
    }
    if !m.is_fundamental() {
        return Err(Error::NotFundamental);
    }
    let nv = g.dim();
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(g.weight(i)));
    let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, i)| (*i, p)).collect();
    // algebra in coordinate order
    let h = {
        let mut h = GradedLieAlgebra::new(order.iter().map(|&i| (g.label(i).to_string(), g.weight(i))));
        for (i, j, v) in g.structure_constants() {
            h.set_bracket(pos[&i], pos[&j], v.remap(|k| pos.get(&k).copied()))?;
        }
        h
    };
    let coords: Vec<String> = (0..nv).map(|p| format!("x_{}", h.label(p))).collect();
    // ad as polynomial matrices: column c of M is Ad(exp(−x_1e_1))⋯Ad(exp(−x_{c−1}e_{c−1})) e_c
    let ad_mats: Vec<Vec<SparseVec>> = (0..nv).map(|i| (0..nv).map(|j| h.bracket_basis(i, j)).collect()).collect();
    // polynomial vectors: Vec<Poly> of length nv
    let exp_neg_ad = |i: usize, v: &[Poly]| -> Vec<Poly> {
        // exp(−x_i ad e_i) v, nilpotent series
        let mut out = v.to_vec();
        let mut term = v.to_vec();
        let mut k = 1i64;
        loop {
            let mut next = vec![Poly::zero(nv); nv];
            for (j, p) in term.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (t, c) in ad_mats[i][j].iter() {
                    let f = p.scale(&(-c.clone() / int(k))).mul(&var(nv, i));
                    next[t] = next[t].add(&f);
                }
            }
            if next.iter().all(Poly::is_zero) {
                break;
            }
            for (o, t) in out.iter_mut().zip(&next) {
                *o = o.add(t);
            }
            term = next;
            k += 1;
        }
        out
    };
    let mut cols: Vec<Vec<Poly>> = Vec::with_capacity(nv);
    for c in 0..nv {
        let mut v: Vec<Poly> = (0..nv).map(|t| if t == c { Poly::constant(nv, Rational::one()) } else { Poly::zero(nv) }).collect();
        for i in (0..c).rev() {
            v = exp_neg_ad(i, &v);
        }
        cols.push(v);
    }
    // M[t][c] = cols[c][t] is lower unitriangular (brackets lower the weight); the
    // left-invariant field of e_k is Σ_j (M⁻¹)_{jk} ∂_j, found by forward substitution.
    let m_entry = |t: usize, c: usize| &cols[c][t];
    for t in 0..nv {
        for c in t + 1..nv {
            if !m_entry(t, c).is_zero() {
                return Err(Error::Inconsistent("coordinate matrix is not triangular".into()));
            }
        }
        if *m_entry(t, t) != Poly::constant(nv, Rational::one()) {
            return Err(Error::Inconsistent("coordinate matrix is not unipotent".into()));
        }
    }
    let inv_col = |k: usize| -> Vec<Poly> {
        let mut y = vec![Poly::zero(nv); nv];
        for t in 0..nv {
            let mut s = if t == k { Poly::constant(nv, Rational::one()) } else { Poly::zero(nv) };
            for c in 0..t {
                if !y[c].is_zero() {
                    s = s.sub(&m_entry(t, c).mul(&y[c]));
                }
            }
            y[t] = s;
        }
        y
    };
    let mut gen_pos: Vec<usize> = gens.iter().map(|i| pos[i]).collect();
    gen_pos.sort();
    let f1 = PolyVectorField::new(coords.clone(), inv_col(gen_pos[0]))?;
    let f2 = PolyVectorField::new(coords.clone(), inv_col(gen_pos[1]))?;
    PolyFrame::new(coords, f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_brackets() {
        let g = build_heisenberg(5).unwrap();
        assert_eq!(g.dim(), 5);
        let eta = 4;
        assert_eq!(g.bracket_basis(0, 3), SparseVec::unit(eta).neg());
        assert_eq!(g.bracket_basis(1, 2), SparseVec::unit(eta));
        assert!(g.validate().is_valid());
        for i in 0..4 {
            for j in 0..4 {
                if i + j + 2 != 5 {
                    assert!(g.bracket_basis(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn heis7_eps1_eps6() {
        let g = build_heisenberg(6).unwrap();
        assert_eq!(g.bracket_basis(g.idx("e1"), g.idx("e6")), SparseVec::unit(g.idx("eta")).neg());
    }

    #[test]
    fn gl2_heis_tables() {
        for n in 5..=8 {
            let g = build_gl2_semidirect_heis(n).unwrap();
            assert_eq!(g.dim(), 2 * n - 1);
            assert!(g.validate().is_valid(), "n = {n}");
        }
        let g = build_gl2_semidirect_heis(6).unwrap();
        assert_eq!(g.bracket_basis(H, X), SparseVec::from_pairs([(X, int(2))]));
        assert_eq!(g.bracket_basis(Y, eps(4)), SparseVec::from_pairs([(eps(3), int(9))]));
        assert!(g.bracket_basis(X, eps(6)).is_zero());
        assert_eq!(g.graded_component(0), vec![H, E]);
        assert_eq!(g.weight(eta(6)), -7);
    }

    #[test]
    fn skn_gradings() {
        let g = gl2_heis_skn(0, 6).unwrap();
        assert_eq!(g.weight(eps(2)), 0);
        assert_eq!(g.weight(eps(1)), 1);
        assert_eq!(gl2_heis_skn(1, 6).unwrap().weight(eta(6)), -5);
        let s = build_skn(0, 6).unwrap();
        assert_eq!(s.dim(), 6);
        let dims: Vec<usize> = (1..=4).map(|w| s.graded_component(-w).len()).collect();
        assert_eq!(dims, vec![2, 1, 2, 1]);
        let labels: Vec<&str> = s.graded_component(-1).into_iter().map(|i| s.label(i)).collect();
        assert_eq!(labels, vec!["X", "e3"]);
        let s = build_skn(2, 6).unwrap();
        assert_eq!(s.dim(), 8);
        let dims: Vec<usize> = (1..=7).map(|w| s.graded_component(-w).len()).collect();
        assert_eq!(dims, vec![2, 1, 1, 1, 1, 1, 1]);
        assert_eq!(s.weight(s.idx("eta")), -7);
        for n in 5..=8 {
            for k in 0..=n - 4 {
                if n == 5 && k > 1 {
                    continue;
                }
                let s = build_skn(k, n).unwrap();
                assert_eq!(s.dim(), n + k);
                assert!(s.is_fundamental() && s.is_nilpotent(), "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn top_skn_matches_symp_weights() {
        for n in 6..=8 {
            let a = build_skn(n - 4, n).unwrap();
            let b = symp_symbol(n).unwrap();
            assert_eq!(a.weight_dims(), b.weight_dims());
            assert_eq!(a.algebra(), b.algebra());
        }
    }

    #[test]
    fn eigen_table_closed_forms() {
        let t = eigen_table(6, 1).unwrap();
        let get = |l: &str| t.iter().find(|r| r.label == l).unwrap().clone();
        assert_eq!(get("X").l_h, 2);
        assert_eq!(get("Y").l_h, -2);
        assert_eq!(get("H").l_e, 0);
        assert_eq!(get("eta").weight, -5);
        for n in 6..=8 {
            for k in 0..=n - 4 {
                eigen_table(n, k).unwrap();
            }
        }
    }

    #[test]
    fn ranges() {
        assert!(build_heisenberg(4).is_err());
        assert!(build_skn(3, 6).is_err());
        assert!(build_skn(2, 5).is_err());
        assert!(monge_frame(5, 1).is_err());
    }
}
