//! Universal Tanaka prolongation of a fundamental symbol, level by level.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, SparseVec};
use crate::glie::{check_isomorphism, GradedLieAlgebra, SymbolAlgebra};

#[derive(Clone, Debug)]
pub struct ProlongationResult {
    /// 𝔪 ⊕ 𝔤₀ ⊕ 𝔤₁ ⊕ …, with the basis of 𝔪 first.
    pub full: GradedLieAlgebra,
    /// Dimension of every nonzero graded piece, negative weights included.
    pub level_dims: BTreeMap<i32, usize>,
    /// False when the level cap was reached before a zero level.
    pub terminated: bool,
    /// Position of each input basis element in `full`.
    pub embedding: Vec<usize>,
}

impl ProlongationResult {
    pub fn dim(&self) -> usize {
        self.full.dim()
    }

    pub fn to_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct Level {
            dim: usize,
            weight: i32,
        }
        #[derive(serde::Serialize)]
        struct Out {
            basis: Vec<crate::glie::BasisEntry>,
            brackets: Vec<crate::glie::BracketEntry>,
            levels: Vec<Level>,
            terminated: bool,
        }
        let f = self.full.to_file();
        let out = Out {
            basis: f.basis,
            brackets: f.brackets,
            levels: self.level_dims.iter().map(|(w, d)| Level { dim: *d, weight: *w }).collect(),
            terminated: self.terminated,
        };
        serde_json::to_string_pretty(&out).expect("prolongation serializes")
    }
}

/// Default level cap: twice the depth plus four.
pub fn default_max_level(m: &SymbolAlgebra) -> usize {
    2 * m.depth() + 4
}

/// 𝔤_i = {φ ∈ ⊕_j Hom(𝔤_{−j}, 𝔤_{i−j}) : φ([x, y]) = [φ(x), y] + [x, φ(y)]} for i = 0, 1, …
/// until the first zero level or `max_level`. Brackets between non-negative elements follow
/// [u, v](x) = [u, [v, x]] − [v, [u, x]].
pub fn tanaka_prolong(m: &SymbolAlgebra, max_level: Option<usize>) -> Result<ProlongationResult> {
    if !m.is_fundamental() {
        return Err(Error::NotFundamental);
    }
    let cap = max_level.unwrap_or_else(|| default_max_level(m));
    let nm = m.dim();
    let mut full = m.algebra().clone();
    // maps[u - nm][a] = [e_u, e_a] for a in 𝔪
    let mut maps: Vec<Vec<SparseVec>> = Vec::new();
    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut terminated = false;

    for i in 0..=cap {
        let basis = level_kernel(m, &full, &levels, i as i32);
        if basis.is_empty() {
            terminated = true;
            break;
        }
        let start = full.dim();
        let mut new_basis: Vec<(String, i32)> = full.basis().iter().map(|b| (b.label.clone(), b.weight)).collect();
        for j in 0..basis.len() {
            new_basis.push((format!("g{i}_{}", j + 1), i as i32));
        }
        let mut grown = GradedLieAlgebra::new(new_basis);
        for (a, b, v) in full.structure_constants() {
            grown.set_bracket(a, b, v.clone())?;
        }
        for (j, phi) in basis.into_iter().enumerate() {
            let u = start + j;
            for (a, val) in phi.iter().enumerate() {
                grown.set_bracket(u, a, val.clone())?;
            }
            maps.push(phi);
        }
        full = grown;
        levels.push((start..full.dim()).collect());
    }

    install_nonnegative_brackets(&mut full, nm, &maps, &levels, terminated)?;

    if terminated {
        let rep = full.validate();
        if !rep.is_valid() {
            return Err(Error::Inconsistent(format!(
                "prolongation fails validation: {} Jacobi failures, {} grading violations",
                rep.jacobi_failures.len(),
                rep.grading_violations.len()
            )));
        }
    }
    Ok(ProlongationResult { level_dims: full.weight_dims(), full, terminated, embedding: (0..nm).collect() })
}

/// Basis of 𝔤_i as lists of values on the basis of 𝔪.
fn level_kernel(m: &SymbolAlgebra, full: &GradedLieAlgebra, levels: &[Vec<usize>], i: i32) -> Vec<Vec<SparseVec>> {
    let nm = m.dim();
    let comp = |w: i32| -> Vec<usize> {
        if w < 0 {
            m.graded_component(w)
        } else {
            levels.get(w as usize).cloned().unwrap_or_default()
        }
    };
    // variable (a, s): coefficient of e_s in φ(e_a)
    let mut var_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for a in 0..nm {
        for s in comp(i + m.weight(a)) {
            var_of.insert((a, s), vars.len());
            vars.push((a, s));
        }
    }
    if vars.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<SparseVec> = Vec::new();
    for a in 0..nm {
        for b in a + 1..nm {
            // rows indexed by output coordinate t
            let mut eq: BTreeMap<usize, SparseVec> = BTreeMap::new();
            let mut add = |t: usize, var: usize, c: &crate::Rational| {
                eq.entry(t).or_default().add_at(var, c);
            };
            for (c, coef) in m.bracket_basis(a, b).iter() {
                for s in comp(i + m.weight(c)) {
                    add(s, var_of[&(c, s)], coef);
                }
            }
            for s in comp(i + m.weight(a)) {
                for (t, x) in full.bracket_basis(s, b).iter() {
                    add(t, var_of[&(a, s)], &-x.clone());
                }
            }
            for s in comp(i + m.weight(b)) {
                for (t, x) in full.bracket_basis(s, a).iter() {
                    add(t, var_of[&(b, s)], x);
                }
            }
            rows.extend(eq.into_values().filter(|r| !r.is_zero()));
        }
    }
    let kernel = Matrix::from_rows(rows, vars.len()).kernel_basis();
    kernel
        .into_iter()
        .map(|k| {
            let mut phi = vec![SparseVec::new(); nm];
            for (v, c) in k.iter() {
                let (a, s) = vars[v];
                phi[a].add_at(s, c);
            }
            phi
        })
        .collect()
}

fn install_nonnegative_brackets(
    full: &mut GradedLieAlgebra,
    nm: usize,
    maps: &[Vec<SparseVec>],
    levels: &[Vec<usize>],
    terminated: bool,
) -> Result<()> {
    let nonneg: Vec<(usize, usize)> =
        levels.iter().enumerate().flat_map(|(l, idx)| idx.iter().map(move |&u| (u, l))).collect();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (x, &(u, lu)) in nonneg.iter().enumerate() {
        for &(v, lv) in &nonneg[x + 1..] {
            pairs.push((lu + lv, u, v));
        }
    }
    pairs.sort();
    for (s, u, v) in pairs {
        let eu = SparseVec::unit(u);
        let ev = SparseVec::unit(v);
        let w: Vec<SparseVec> = (0..nm)
            .map(|a| {
                let x = SparseVec::unit(a);
                full.bracket(&eu, &full.bracket(&ev, &x)).minus(&full.bracket(&ev, &full.bracket(&eu, &x)))
            })
            .collect();
        if w.iter().all(SparseVec::is_zero) {
            continue;
        }
        let Some(target) = levels.get(s) else {
            if terminated {
                return Err(Error::Inconsistent(format!("[{}, {}] lands above the last nonzero level", full.label(u), full.label(v))));
            }
            continue;
        };
        let z = element_with_map(full.dim(), nm, maps, target, &w).ok_or_else(|| {
            Error::Inconsistent(format!("[{}, {}] is not a derivation of the expected level", full.label(u), full.label(v)))
        })?;
        full.set_bracket(u, v, z)?;
    }
    Ok(())
}

/// The element of span(target) whose values on 𝔪 are `w`.
fn element_with_map(n: usize, nm: usize, maps: &[Vec<SparseVec>], target: &[usize], w: &[SparseVec]) -> Option<SparseVec> {
    let flat = |vals: &[SparseVec]| {
        let mut f = SparseVec::new();
        for (a, v) in vals.iter().enumerate() {
            for (t, c) in v.iter() {
                f.add_at(a * n + t, c);
            }
        }
        f
    };
    let cols: Vec<SparseVec> = target.iter().map(|&u| flat(&maps[u - nm])).collect();
    let sol = Matrix::from_columns(&cols, nm * n).solve_sparse(&flat(w))?;
    Some(sol.remap(|j| Some(target[j])))
}

pub fn nonnegative_part(r: &ProlongationResult) -> GradedLieAlgebra {
    r.full.nonnegative_part().0
}

/// Extends a correspondence on negative parts to a graded map `a → r.full`, defining the
/// image of each non-negative `u` as the element acting on 𝔪 like ad(u), and checks the
/// result is an isomorphism. `neg_images[x]` is the image of the negative basis element `x`.
pub fn extend_isomorphism(
    r: &ProlongationResult,
    a: &GradedLieAlgebra,
    neg_images: &BTreeMap<usize, SparseVec>,
) -> std::result::Result<Vec<SparseVec>, String> {
    let g = &r.full;
    let negs: Vec<usize> = (0..a.dim()).filter(|&x| a.weight(x) < 0).collect();
    if negs.iter().any(|x| !neg_images.contains_key(x)) {
        return Err("missing image for a negative basis element".into());
    }
    let mut images: BTreeMap<usize, SparseVec> = neg_images.clone();
    let mut order: Vec<usize> = (0..a.dim()).filter(|&x| a.weight(x) >= 0).collect();
    order.sort_by_key(|&x| a.weight(x));
    let apply = |images: &BTreeMap<usize, SparseVec>, v: &SparseVec| -> Option<SparseVec> {
        let mut out = SparseVec::new();
        for (i, c) in v.iter() {
            out.add_scaled(images.get(&i)?, c);
        }
        Some(out)
    };
    for u in order {
        let wt = a.weight(u);
        let cand = g.graded_component(wt);
        let n = g.dim();
        let mut cols = vec![SparseVec::new(); cand.len()];
        let mut rhs = SparseVec::new();
        for (p, &x) in negs.iter().enumerate() {
            let target = apply(&images, &a.bracket_basis(u, x)).ok_or("bracket needs an image not yet defined")?;
            for (t, c) in target.iter() {
                rhs.add_at(p * n + t, c);
            }
            for (j, &s) in cand.iter().enumerate() {
                for (t, c) in g.bracket(&SparseVec::unit(s), &images[&x]).iter() {
                    cols[j].add_at(p * n + t, c);
                }
            }
        }
        let sol = Matrix::from_columns(&cols, negs.len() * n)
            .solve_sparse(&rhs)
            .ok_or_else(|| format!("no element of weight {wt} acts like {}", a.label(u)))?;
        images.insert(u, sol.remap(|j| Some(cand[j])));
    }
    let images: Vec<SparseVec> = (0..a.dim()).map(|x| images[&x].clone()).collect();
    check_isomorphism(a, g, &images)?;
    Ok(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn heis3() -> SymbolAlgebra {
        let mut g = GradedLieAlgebra::new([("x", -1), ("y", -1), ("z", -2)]);
        g.set_bracket(0, 1, SparseVec::unit(2)).unwrap();
        SymbolAlgebra::new(g).unwrap()
    }

    #[test]
    fn heis3_level_zero_is_gl2() {
        // Grading preserving derivations of heis₃: any A ∈ gl(𝔪_{−1}) extended by trace.
        let r = tanaka_prolong(&heis3(), Some(0)).unwrap();
        assert_eq!(r.level_dims[&0], 4);
        assert!(!r.terminated);
    }

    #[test]
    fn heis3_is_infinite() {
        // The contact algebra has nonzero levels forever.
        let r = tanaka_prolong(&heis3(), Some(3)).unwrap();
        assert!(!r.terminated);
        assert!(r.level_dims[&3] > 0);
    }

    #[test]
    fn non_fundamental_rejected() {
        let g = GradedLieAlgebra::new([("a", -1), ("b", -2)]);
        let s = SymbolAlgebra::new(g).unwrap();
        assert!(matches!(tanaka_prolong(&s, None), Err(Error::NotFundamental)));
    }

    #[test]
    fn s06_has_gl2_heis_dimensions() {
        let r = tanaka_prolong(&catalog::build_skn(0, 6).unwrap(), None).unwrap();
        assert!(r.terminated);
        assert_eq!(r.dim(), 11);
        let dims: Vec<(i32, usize)> = r.level_dims.iter().map(|(w, d)| (*w, *d)).collect();
        assert_eq!(dims, vec![(-4, 1), (-3, 2), (-2, 1), (-1, 2), (0, 3), (1, 2)]);
    }

    #[test]
    fn nonnegative_parts() {
        let r = tanaka_prolong(&catalog::build_skn(1, 6).unwrap(), None).unwrap();
        assert_eq!(nonnegative_part(&r).dim(), 4);
        let r = tanaka_prolong(&catalog::build_skn(2, 6).unwrap(), None).unwrap();
        assert_eq!(nonnegative_part(&r).dim(), 3);
    }

    #[test]
    fn g2_levels() {
        let r = tanaka_prolong(&catalog::symp_symbol(5).unwrap(), None).unwrap();
        assert!(r.terminated);
        assert_eq!(r.dim(), 14);
        let dims: Vec<usize> = (-5..=5).map(|w| r.level_dims.get(&w).copied().unwrap_or(0)).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2, 2, 2, 1, 1, 1, 1]);
    }

    #[test]
    fn catalog_algebra_embeds() {
        let (k, n) = (1, 6);
        let a = catalog::gl2_heis_skn(k, n).unwrap();
        let (_, neg) = a.negative_part();
        let r = tanaka_prolong(&catalog::build_skn(k, n).unwrap(), None).unwrap();
        let neg_images = neg.iter().enumerate().map(|(p, &x)| (x, SparseVec::unit(p))).collect();
        extend_isomorphism(&r, &a, &neg_images).unwrap();
    }
}
