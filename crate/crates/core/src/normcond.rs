//! Linear invariant normalization conditions: a weight-graded 𝔤⁰-invariant complement 𝒩 of
//! ∂(C¹₊) in C²₊, Morimoto's sufficient criterion, and the explicit obstruction for 𝔰^{k,n}.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cohomo::{self, Cochain, CochainSpace, CochainTerm};
use crate::error::{Error, Result};
use crate::exactla::{coordinates, fmt_rational, int, Echelon, Matrix, Rational, SparseVec};
use crate::glie::GradedLieAlgebra;
use crate::prolong::ProlongationResult;

/// 𝔤 rewritten in a basis of joint eigenvectors of a split torus of 𝔤₀ containing the
/// grading element.
#[derive(Clone, Debug)]
pub struct AdaptedAlgebra {
    pub alg: GradedLieAlgebra,
    /// New basis vectors in the coordinates of the original algebra.
    pub change: Vec<SparseVec>,
    /// Eigenvalue of the extra torus element on each new basis vector (zero if none found).
    pub torus: Vec<Rational>,
}

fn is_square(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Restriction of ad(a) to the span of `idx`, assuming that span is ad(a)-stable.
fn restricted_ad(g: &GradedLieAlgebra, a: &SparseVec, idx: &[usize]) -> Matrix {
    let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let cols: Vec<SparseVec> = idx
        .iter()
        .map(|&i| g.bracket(a, &SparseVec::unit(i)).remap(|j| pos.get(&j).copied()))
        .collect();
    Matrix::from_columns(&cols, idx.len())
}

/// Looks for t ∈ 𝔤₀ acting on a two-dimensional 𝔤₋₁ with distinct rational eigenvalues.
fn split_element(g: &GradedLieAlgebra) -> Option<(SparseVec, Rational, Rational)> {
    let g0 = g.graded_component(0);
    let m1 = g.graded_component(-1);
    if m1.len() != 2 {
        return None;
    }
    let mut cands: Vec<SparseVec> = g0.iter().map(|&a| SparseVec::unit(a)).collect();
    for (p, &a) in g0.iter().enumerate() {
        for &b in &g0[p + 1..] {
            for c in [1, -1, 2, -2] {
                cands.push(SparseVec::from_pairs([(a, int(1)), (b, int(c))]));
            }
        }
    }
    for t in cands {
        let r = restricted_ad(g, &t, &m1);
        let (p, q, u, s) = (r.get(0, 0), r.get(0, 1), r.get(1, 0), r.get(1, 1));
        let disc = (&p - &s) * (&p - &s) + int(4) * &q * &u;
        if disc.is_zero() {
            continue;
        }
        if let Some(sq) = is_square(&disc) {
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let tr = &p + &s;
            return Some((t, (&tr + &sq) * &half, (&tr - &sq) * &half));
        }
    }
    None
}

/// Rewrites `g` in a joint eigenbasis of the grading element and, when one exists, a second
/// split semisimple element of 𝔤₀.
pub fn adapt(g: &GradedLieAlgebra) -> Result<AdaptedAlgebra> {
    let split = split_element(g);
    let mut change: Vec<SparseVec> = Vec::new();
    let mut torus: Vec<Rational> = Vec::new();
    let mut labels: Vec<(String, i32)> = Vec::new();
    let mut comp_basis: BTreeMap<i32, (usize, Vec<SparseVec>)> = BTreeMap::new();
    let span = g.weights().iter().map(|w| w.abs()).max().unwrap_or(0) as i64 + 2;
    for w in g.weight_set() {
        let idx = g.graded_component(w);
        let mut found: Vec<(SparseVec, Rational)> = Vec::new();
        match &split {
            None => found.extend(idx.iter().map(|&i| (SparseVec::unit(i), Rational::zero()))),
            Some((t, l1, l2)) => {
                let m = restricted_ad(g, t, &idx);
                let mut seen = BTreeSet::new();
                // eigenvalues on 𝔤_w are a·λ₁ + b·λ₂ with a + b = −w
                for a in -4 * span..=4 * span {
                    let c = int(a) * l1 + int(-(w as i64) - a) * l2;
                    if !seen.insert(c.clone()) {
                        continue;
                    }
                    let shifted = m.add(&Matrix::identity(idx.len()).scaled(&-c.clone()));
                    for v in shifted.kernel_basis() {
                        found.push((v.remap(|p| Some(idx[p])), c.clone()));
                    }
                    if found.len() == idx.len() {
                        break;
                    }
                }
                if found.len() != idx.len() {
                    return Err(Error::Inconsistent(format!("torus element is not split on weight {w}")));
                }
            }
        }
        let start = change.len();
        for (v, c) in found {
            let label = match v.iter().collect::<Vec<_>>()[..] {
                [(i, _)] => g.label(i).to_string(),
                _ => format!("u{}", change.len()),
            };
            labels.push((label, w));
            torus.push(c);
            change.push(v);
        }
        comp_basis.insert(w, (start, change[start..].to_vec()));
    }
    let mut alg = GradedLieAlgebra::new(labels);
    for i in 0..change.len() {
        for j in i + 1..change.len() {
            let br = g.bracket(&change[i], &change[j]);
            if br.is_zero() {
                continue;
            }
            let w = alg.weight(i) + alg.weight(j);
            let (start, basis) = comp_basis.get(&w).ok_or_else(|| Error::Inconsistent("bracket leaves the grading".into()))?;
            let c = coordinates(basis, &br).ok_or_else(|| Error::Inconsistent("eigenbasis does not span".into()))?;
            alg.set_bracket(i, j, c.remap(|p| Some(start + p)))?;
        }
    }
    Ok(AdaptedAlgebra { alg, change, torus })
}

/// Everything the decision needs, computed once.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub adapted: AdaptedAlgebra,
    pub c1: CochainSpace,
    pub c2: CochainSpace,
    /// Columns of ∂ : C¹₊ → C²₊.
    pub d: Matrix,
    pub image: Echelon,
    /// 𝔤⁰ basis (indices of the adapted algebra) with their action matrices on C²₊.
    pub actions: Vec<(usize, Matrix)>,
    /// Joint torus label (weight, eigenvalue) of every C²₊ key.
    pub labels2: Vec<(i32, Rational)>,
    pub labels1: Vec<(i32, Rational)>,
}

fn key_label(a: &AdaptedAlgebra, (args, t): &cohomo::Key) -> (i32, Rational) {
    let w = cohomo::key_weight(&a.alg, &(args.clone(), *t));
    let mut l = a.torus[*t].clone();
    for x in args {
        l -= &a.torus[*x];
    }
    (w, l)
}

pub fn analyze(g: &GradedLieAlgebra) -> Result<Analysis> {
    let adapted = adapt(g)?;
    let a = &adapted.alg;
    let c1 = CochainSpace::new(a, 1, true);
    let c2 = CochainSpace::new(a, 2, true);
    let d = cohomo::coboundary_matrix(a, &c1, &c2)?;
    let image = Echelon::from_rows((0..d.cols()).map(|j| d.column(j)));
    let mut actions = Vec::new();
    for x in (0..a.dim()).filter(|&x| a.weight(x) >= 0) {
        let u = SparseVec::unit(x);
        actions.push((x, c2.operator_matrix(&c2, |c| cohomo::g0_action(&u, c, a))?));
    }
    let labels2 = c2.keys.iter().map(|k| key_label(&adapted, k)).collect();
    let labels1 = c1.keys.iter().map(|k| key_label(&adapted, k)).collect();
    Ok(Analysis { adapted, c1, c2, d, image, actions, labels2, labels1 })
}

impl Analysis {
    pub fn image_is_invariant(&self) -> bool {
        let basis = self.image.basis();
        self.actions.iter().all(|(_, m)| basis.iter().all(|v| self.image.contains(&m.mul_vec(v))))
    }

    /// (dim C²₊ block, dim of ∂ image in the block) per torus label.
    pub fn blocks(&self) -> BTreeMap<(i32, Rational), (usize, usize)> {
        let mut out: BTreeMap<(i32, Rational), (usize, usize)> = BTreeMap::new();
        for l in &self.labels2 {
            out.entry(l.clone()).or_default().0 += 1;
        }
        let mut per: BTreeMap<(i32, Rational), Vec<SparseVec>> = BTreeMap::new();
        for (j, l) in self.labels1.iter().enumerate() {
            per.entry(l.clone()).or_default().push(self.d.column(j));
        }
        for (l, cols) in per {
            let r = crate::exactla::span_rank(&cols);
            if r > 0 {
                out.get_mut(&l).expect("∂ preserves torus labels").1 = r;
            }
        }
        out
    }
}

/// How a closure vector was reached: a forced unit cochain followed by actions.
#[derive(Clone, Debug)]
pub struct ActionChain {
    /// Position of the starting unit cochain in C²₊.
    pub start: usize,
    /// 𝔤⁰ basis indices (adapted algebra), applied left to right.
    pub actions: Vec<usize>,
    pub end: SparseVec,
}

#[derive(Clone, Debug)]
pub struct ClosureHit {
    /// Nonzero combination Σ c_i · end_i lying in ∂(C¹₊).
    pub terms: Vec<(Rational, ActionChain)>,
    pub result: SparseVec,
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub span: Echelon,
    pub hit: Option<ClosureHit>,
}

/// 𝔤⁰-submodule generated by the blocks where ∂(C¹₊) vanishes. Every invariant complement
/// contains it, so meeting ∂(C¹₊) rules complements out.
pub fn forced_closure(an: &Analysis) -> Closure {
    let blocks = an.blocks();
    let mut span = Echelon::new();
    let mut joint = an.image.clone();
    let mut chains: Vec<ActionChain> = Vec::new();
    let mut queue = VecDeque::new();
    let push = |v: SparseVec, chain: ActionChain, span: &mut Echelon, joint: &mut Echelon, chains: &mut Vec<ActionChain>| -> Option<bool> {
        if !span.insert(v.clone()) {
            return None;
        }
        chains.push(chain);
        Some(!joint.insert(v))
    };
    // forced units, highest torus label first
    let mut forced: Vec<usize> = (0..an.c2.dim()).filter(|&i| blocks[&an.labels2[i]].1 == 0).collect();
    forced.sort_by(|&a, &b| an.labels2[b].1.cmp(&an.labels2[a].1).then(a.cmp(&b)));
    let mut hit_at = None;
    for &i in &forced {
        let v = SparseVec::unit(i);
        let ch = ActionChain { start: i, actions: vec![], end: v.clone() };
        if push(v, ch, &mut span, &mut joint, &mut chains) == Some(true) {
            hit_at = Some(chains.len());
            break;
        }
        queue.push_back(chains.len() - 1);
    }
    while hit_at.is_none() {
        let Some(c) = queue.pop_front() else { break };
        for (x, m) in &an.actions {
            let v = m.mul_vec(&chains[c].end);
            if v.is_zero() {
                continue;
            }
            let mut actions = chains[c].actions.clone();
            actions.push(*x);
            let ch = ActionChain { start: chains[c].start, actions, end: v.clone() };
            match push(v, ch, &mut span, &mut joint, &mut chains) {
                Some(true) => {
                    hit_at = Some(chains.len());
                    break;
                }
                Some(false) => queue.push_back(chains.len() - 1),
                None => {}
            }
        }
    }
    let hit = hit_at.map(|len| {
        // Σ α_i end_i − Σ β_j im_j = 0 with α ≠ 0
        let im = an.image.basis();
        let mut cols: Vec<SparseVec> = chains[..len].iter().map(|c| c.end.clone()).collect();
        cols.extend(im.iter().map(SparseVec::neg));
        let k = Matrix::from_columns(&cols, an.c2.dim())
            .kernel_basis()
            .into_iter()
            .find(|k| k.indices().any(|i| i < len))
            .expect("dependent insertion has a kernel vector");
        let mut result = SparseVec::new();
        let mut terms = Vec::new();
        for (i, a) in k.iter().filter(|(i, _)| *i < len) {
            result.add_scaled(&chains[i].end, a);
            terms.push((a.clone(), chains[i].clone()));
        }
        ClosureHit { terms, result }
    });
    Closure { span, hit }
}

/// Checks that `basis` spans a 𝔤⁰-invariant complement of ∂(C¹₊) in C²₊.
pub fn verify_complement(an: &Analysis, basis: &[SparseVec]) -> std::result::Result<(), String> {
    let span = Echelon::from_rows(basis.iter().cloned());
    if span.rank() != basis.len() {
        return Err("complement basis is dependent".into());
    }
    if span.rank() + an.image.rank() != an.c2.dim() {
        return Err(format!("dimensions {} + {} ≠ {}", span.rank(), an.image.rank(), an.c2.dim()));
    }
    let mut joint = an.image.clone();
    for v in basis {
        if !joint.insert(v.clone()) {
            return Err("complement meets the image of ∂".into());
        }
    }
    for (x, m) in &an.actions {
        for v in basis {
            if !span.contains(&m.mul_vec(v)) {
                return Err(format!("not invariant under {}", an.adapted.alg.label(*x)));
            }
        }
    }
    Ok(())
}

/// Builds a complement block by block, from the top weight down, keeping every block inside
/// the preimage of what is already chosen. `None` when some block runs out of room; this
/// does not by itself rule complements out.
pub fn greedy_complement(an: &Analysis, closure: &Echelon) -> Option<Vec<SparseVec>> {
    let a = &an.adapted;
    let mut internal = Vec::new();
    let mut sign = 0i32;
    for (p, (x, _)) in an.actions.iter().enumerate() {
        let r = &a.torus[*x];
        if a.alg.weight(*x) == 0 {
            if r.is_zero() {
                internal.push(p);
            } else {
                let s = if r.is_positive() { 1 } else { -1 };
                if sign != 0 && sign != s {
                    return None;
                }
                sign = s;
            }
        }
    }
    let mut order: Vec<(i32, Rational)> = an.blocks().into_keys().collect();
    order.sort_by(|(w1, l1), (w2, l2)| w2.cmp(w1).then_with(|| (l2 * int(sign as i64)).cmp(&(l1 * int(sign as i64)))));
    let mut keys_of: BTreeMap<&(i32, Rational), Vec<usize>> = BTreeMap::new();
    for (i, l) in an.labels2.iter().enumerate() {
        keys_of.entry(l).or_default().push(i);
    }
    let mut img_of: BTreeMap<&(i32, Rational), Vec<SparseVec>> = BTreeMap::new();
    for (j, l) in an.labels1.iter().enumerate() {
        img_of.entry(l).or_default().push(an.d.column(j));
    }
    let closure_basis = closure.basis();
    let mut chosen = Echelon::new();
    let mut out = Vec::new();
    for mu in &order {
        let keys = &keys_of[mu];
        let pos: BTreeMap<usize, usize> = keys.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        // preimage of the chosen part under every action leaving the block
        let mut rows: Vec<SparseVec> = Vec::new();
        for (p, (_, m)) in an.actions.iter().enumerate() {
            if internal.contains(&p) {
                continue;
            }
            let imgs: Vec<SparseVec> = keys.iter().map(|&i| chosen.reduce(&m.column(i))).collect();
            let mut by_row: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for (c, v) in imgs.iter().enumerate() {
                for (r, x) in v.iter() {
                    by_row.entry(r).or_default().set(c, x.clone());
                }
            }
            rows.extend(by_row.into_values());
        }
        let pre: Vec<SparseVec> = Matrix::from_rows(rows, keys.len())
            .kernel_basis()
            .into_iter()
            .map(|v| v.remap(|p| Some(keys[p])))
            .collect();
        let img = img_of.get(mu).cloned().unwrap_or_default();
        let target = keys.len() - crate::exactla::span_rank(&img);
        let mut block = Echelon::from_rows(img);
        let mut picked = Vec::new();
        let forced = closure_basis.iter().filter(|v| v.indices().all(|i| pos.contains_key(&i)) && !v.is_zero());
        for v in forced.chain(pre.iter()) {
            if picked.len() == target {
                break;
            }
            if block.insert(v.clone()) {
                picked.push(v.clone());
            }
        }
        if picked.len() < target {
            return None;
        }
        let local = Echelon::from_rows(picked.iter().cloned());
        for &p in &internal {
            if picked.iter().any(|v| !local.contains(&an.actions[p].1.mul_vec(v))) {
                return None;
            }
        }
        for v in picked {
            chosen.insert(v.clone());
            out.push(v);
        }
    }
    Some(out)
}

/// A cochain reached from a forced generator by a sequence of 𝔤⁰ actions.
#[derive(Clone, Debug, Serialize)]
pub struct ChainRecord {
    pub actions: Vec<String>,
    pub coefficient: String,
    pub end: Vec<CochainTerm>,
    pub generator: Vec<CochainTerm>,
    pub generator_eigenvalue: String,
    pub generator_weight: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub chains: Vec<ChainRecord>,
    /// Preimage under ∂ of the result, in C¹₊.
    pub preimage: Vec<CochainTerm>,
    pub result: Vec<CochainTerm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementBlock {
    pub dim: usize,
    pub weight: i32,
}

#[derive(Clone, Debug)]
pub struct NormDecision {
    /// `None` when neither a complement nor an obstruction was found.
    pub exists: Option<bool>,
    pub complement: Option<Vec<Cochain>>,
    pub obstruction: Option<Obstruction>,
    pub certificate: Option<Certificate>,
    pub analysis: Analysis,
    pub method: &'static str,
}

impl NormDecision {
    /// Dimension of the complement per cochain weight.
    pub fn complement_dims(&self) -> Vec<ComplementBlock> {
        let mut by_w: BTreeMap<i32, usize> = BTreeMap::new();
        for c in self.complement.iter().flatten() {
            *by_w.entry(c.weight(&self.analysis.adapted.alg).unwrap_or(0)).or_default() += 1;
        }
        by_w.into_iter().map(|(weight, dim)| ComplementBlock { dim, weight }).collect()
    }

    pub fn to_value(&self) -> serde_json::Value {
        let an = &self.analysis;
        let mut v = serde_json::json!({
            "exists": self.exists,
            "method": self.method,
            "dim_c1_plus": an.c1.dim(),
            "dim_c2_plus": an.c2.dim(),
            "rank_d": an.image.rank(),
        });
        if self.complement.is_some() {
            v["witness"] = serde_json::json!({ "complement_dims": self.complement_dims() });
        }
        if let Some(o) = &self.obstruction {
            v["obstruction"] = serde_json::to_value(o).expect("serializes");
        }
        if let Some(c) = &self.certificate {
            v["certificate"] = serde_json::to_value(c).expect("serializes");
        }
        v
    }
}

fn obstruction_from(an: &Analysis, hit: &ClosureHit) -> Obstruction {
    let a = &an.adapted.alg;
    let chains = hit
        .terms
        .iter()
        .map(|(c, ch)| {
            let (w, l) = &an.labels2[ch.start];
            ChainRecord {
                actions: ch.actions.iter().map(|&x| a.label(x).to_string()).collect(),
                coefficient: fmt_rational(c),
                end: an.c2.from_vector(&ch.end).to_file(a),
                generator: an.c2.unit(ch.start).to_file(a),
                generator_eigenvalue: fmt_rational(l),
                generator_weight: *w,
            }
        })
        .collect();
    let pre = an.d.solve_sparse(&hit.result).expect("result lies in the image");
    Obstruction { chains, preimage: an.c1.from_vector(&pre).to_file(a), result: an.c2.from_vector(&hit.result).to_file(a) }
}

/// Decides whether the prolongation admits a linear invariant normalization condition.
///
/// Nonexistence: the submodule generated by the torus blocks where ∂(C¹₊) vanishes must lie in
/// any complement; it meeting ∂(C¹₊) is an obstruction. Existence: a complement built block
/// by block and verified.
pub fn normalization_exists(g: &ProlongationResult) -> Result<NormDecision> {
    decide(&g.full)
}

pub fn decide(g: &GradedLieAlgebra) -> Result<NormDecision> {
    let analysis = analyze(g)?;
    let closure = forced_closure(&analysis);
    if let Some(hit) = &closure.hit {
        let obstruction = Some(obstruction_from(&analysis, hit));
        return Ok(NormDecision { exists: Some(false), complement: None, obstruction, certificate: None, analysis, method: "forced-closure" });
    }
    if let Some(basis) = greedy_complement(&analysis, &closure.span) {
        if verify_complement(&analysis, &basis).is_ok() {
            let complement = Some(basis.iter().map(|v| analysis.c2.from_vector(v)).collect());
            return Ok(NormDecision { exists: Some(true), complement, obstruction: None, certificate: None, analysis, method: "graded-construction" });
        }
    }
    Ok(NormDecision { exists: None, complement: None, obstruction: None, certificate: None, analysis, method: "undecided" })
}

/// Outcome of one step of the explicit obstruction for 𝔰^{k,n}.
#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub detail: String,
    pub id: String,
    pub pass: bool,
}

/// Explicit obstruction: the top ad(H)-eigenvalue of C¹, the forced cochain
/// ε*_{n−3−k} ∧ η* ⊗ ε_{2n−6}, and the action of ε_{n−4−k}, ε_{n−4−k}, ε₁ on it.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub eigenvalue: i64,
    pub generator: Vec<CochainTerm>,
    pub forced: Vec<CochainTerm>,
    /// Cochains after each action of the chain, in order.
    pub intermediate: Vec<Vec<CochainTerm>>,
    pub k: usize,
    pub n: usize,
    pub result: Vec<CochainTerm>,
    pub steps: Vec<Step>,
}

impl Certificate {
    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }
}

fn h_eigenvalue(g: &GradedLieAlgebra, c: &Cochain) -> Option<Rational> {
    let hc = cohomo::g0_action(&SparseVec::unit(crate::catalog::H), c, g);
    let (key, x) = c.terms().next()?;
    let l = hc.coeff(&key.0, key.1) / x;
    (hc == c.scaled(&l)).then_some(l)
}

/// Runs every step and records the outcome, without stopping at a failure.
pub fn witness_steps(k: usize, n: usize) -> Result<Certificate> {
    use crate::catalog::{eps, eta, X};
    if n < 6 || k + 5 > n {
        return Err(Error::Range(format!("need n > 5 and k ≤ n − 5, got k={k}, n={n}")));
    }
    let g = crate::catalog::gl2_heis_skn(k, n)?;
    let lambda = 2 * (n as i64 + k as i64 - 3);
    let lam = int(lambda);
    let top = eps(2 * n - 6);
    let low = eps(n - 3 - k);
    let generator = Cochain::unit(&[low], top);
    let mut steps = Vec::new();

    let c1 = CochainSpace::new(&g, 1, false);
    let mut eigen = Vec::new();
    for i in 0..c1.dim() {
        let u = c1.unit(i);
        let l = h_eigenvalue(&g, &u).ok_or_else(|| Error::Inconsistent("ad(H) is not diagonal on C¹".into()))?;
        if l == lam {
            eigen.push(u);
        }
    }
    let gen_w = generator.weight(&g).unwrap_or(0);
    let positive_at_lambda = eigen.iter().filter(|c| c.weight(&g).is_some_and(|w| w > 0)).count();
    steps.push(Step {
        id: "a".into(),
        pass: eigen == [generator.clone()],
        detail: format!(
            "C¹ eigenspace of ad(H) at {lambda} has dimension {} and is spanned by {}; the generator has weight {gen_w}, so the eigenspace meets C¹₊ in dimension {positive_at_lambda} and ∂(C¹₊) vanishes at {lambda}",
            eigen.len(),
            eigen.iter().map(|c| c.format(&g)).collect::<Vec<_>>().join(", ")
        ),
    });

    let d = cohomo::coboundary(&generator, &g)?;
    steps.push(Step { id: "b".into(), pass: d.is_zero(), detail: format!("∂ of the generator is {}", if d.is_zero() { "0".into() } else { d.format(&g) }) });

    let forced = Cochain::unit(&[low, eta(n)], top);
    let fw = forced.weight(&g).unwrap_or(0);
    let fl = h_eigenvalue(&g, &forced);
    steps.push(Step {
        id: "c".into(),
        pass: fw > 0 && fl.as_ref() == Some(&lam),
        detail: format!("{} has weight {fw} and ad(H)-eigenvalue {}", forced.format(&g), fl.map_or("none".into(), |l| fmt_rational(&l))),
    });

    let a1 = SparseVec::unit(eps(n - 4 - k));
    let b1 = SparseVec::unit(eps(1));
    let s1 = cohomo::g0_action(&a1, &forced, &g);
    let s2 = cohomo::g0_action(&a1, &s1, &g);
    let s3 = cohomo::g0_action(&b1, &s2, &g);
    let base = cohomo::coboundary(&Cochain::unit(&[X], eps(n - 4 - k)), &g)?;
    let ratio = base.terms().next().map(|(key, x)| s3.coeff(&key.0, key.1) / x);
    let proportional = ratio.as_ref().filter(|r| !r.is_zero() && s3 == base.scaled(r));
    let literal_index = n - 4 + k;
    let literal = if literal_index <= 2 * n - 6 {
        Some(cohomo::coboundary(&Cochain::unit(&[X], eps(literal_index)), &g)?.scaled(&int(-2)))
    } else {
        None
    };
    let sign = if (n - k) % 2 == 0 { 1 } else { -1 };
    let displayed = Cochain::unit(&[X, eps(n - 1 + k)], top).scaled(&int(2 * sign));
    steps.push(Step {
        id: "d".into(),
        pass: proportional.is_some(),
        detail: format!(
            "ad(ε{a})² gives {}; then ad(ε1) gives {}, which is {} ∂(X*⊗ε{a}) (coefficient −2 expected by the hand computation); equals −2∂(X*⊗ε{literal_index}): {}; intermediate equals 2(−1)^(n−k) X*∧ε{m}*⊗ε{t}: {}",
            s2.format(&g),
            s3.format(&g),
            proportional.map_or("not a nonzero multiple of".to_string(), |r| format!("{} times", fmt_rational(r))),
            literal.as_ref().is_some_and(|l| *l == s3),
            s2 == displayed,
            a = n - 4 - k,
            m = n - 1 + k,
            t = 2 * n - 6,
        ),
    });
    Ok(Certificate {
        eigenvalue: lambda,
        generator: generator.to_file(&g),
        forced: forced.to_file(&g),
        intermediate: [&s1, &s2, &s3].iter().map(|c| c.to_file(&g)).collect(),
        k,
        n,
        result: s3.to_file(&g),
        steps,
    })
}

/// The four-step obstruction for 𝔰^{k,n}; any failing step is an error.
pub fn nonexistence_witness(k: usize, n: usize) -> Result<Certificate> {
    let c = witness_steps(k, n)?;
    if let Some(s) = c.steps.iter().find(|s| !s.pass) {
        return Err(Error::Inconsistent(format!("step ({}) fails: {}", s.id, s.detail)));
    }
    Ok(c)
}

/// Positive definite form, a subalgebra 𝔨 ⊆ 𝔤⁰ and τ : 𝔨 → 𝔤 for Morimoto's criterion.
#[derive(Clone, Debug)]
pub struct MorimotoData {
    pub k_subalg: Vec<SparseVec>,
    pub form: Matrix,
    /// Column i is τ(k_subalg[i]).
    pub tau: Matrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionResult {
    pub condition: u8,
    pub pass: bool,
    pub witness: Option<String>,
}

fn factorial(m: usize) -> Rational {
    (1..=m).fold(Rational::one(), |acc, i| acc * int(i as i64))
}

/// Orthogonal form with |Y|² = |X|² = |η|² = 1, |H|² = |E|² = 2, |ε_i|² = (i−1)!/(2n−6−i)!,
/// and τ : Y ↦ X, H ↦ H, E ↦ E, in the basis of `build_gl2_semidirect_heis(n)`.
pub fn explicit_morimoto_data(n: usize) -> Result<MorimotoData> {
    use crate::catalog::{eps, eta, E, H, X, Y};
    if n < 6 {
        return Err(Error::Range(format!("need n ≥ 6, got {n}")));
    }
    let dim = 2 * n - 1;
    let mut form = Matrix::zeros(dim, dim);
    for (i, v) in [(Y, 1), (H, 2), (E, 2), (X, 1), (eta(n), 1)] {
        form.set(i, i, int(v));
    }
    for i in 1..=2 * n - 6 {
        form.set(eps(i), eps(i), factorial(i - 1) / factorial(2 * n - 6 - i));
    }
    let k_subalg = vec![SparseVec::unit(Y), SparseVec::unit(H), SparseVec::unit(E)];
    let tau = Matrix::from_columns(&[SparseVec::unit(X), SparseVec::unit(H), SparseVec::unit(E)], dim);
    Ok(MorimotoData { k_subalg, form, tau })
}

fn inverse(p: &Matrix) -> Result<Matrix> {
    let n = p.rows();
    let cols = (0..n)
        .map(|j| p.solve_sparse(&SparseVec::unit(j)).ok_or_else(|| Error::Degenerate("change of basis is singular".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(&cols, n))
}

impl MorimotoData {
    /// Same data after a change of basis; `images[i]` is the new coordinate vector of old basis
    /// element i.
    pub fn transport(&self, images: &[SparseVec]) -> Result<MorimotoData> {
        let n = images.len();
        let p = Matrix::from_columns(images, n);
        let q = inverse(&p)?;
        Ok(MorimotoData {
            k_subalg: self.k_subalg.iter().map(|v| p.mul_vec(v)).collect(),
            form: q.transpose().mul(&self.form).mul(&q),
            tau: p.mul(&self.tau),
        })
    }
}

/// Checks Morimoto's three conditions; the form is validated first.
pub fn check_morimoto(g: &GradedLieAlgebra, d: &MorimotoData) -> Result<Vec<ConditionResult>> {
    let n = g.dim();
    if d.form.rows() != n || d.form.cols() != n {
        return Err(Error::Dimension { expected: n, found: d.form.rows() });
    }
    if !d.form.is_symmetric() {
        return Err(Error::InvalidForm("form is not symmetric".into()));
    }
    if !d.form.is_positive_definite() {
        return Err(Error::InvalidForm("form is not positive definite".into()));
    }
    let mut out = Vec::new();
    let w1 = d.form.entries().find(|(i, j, x)| g.weight(*i) != g.weight(*j) && !x.is_zero());
    out.push(ConditionResult {
        condition: 1,
        pass: w1.is_none(),
        witness: w1.map(|(i, j, x)| format!("({}, {}) = {}", g.label(i), g.label(j), fmt_rational(x))),
    });
    let mut w2 = None;
    for (i, a) in d.k_subalg.iter().enumerate() {
        let t = d.tau.column(i);
        let ok = match g.homogeneous_weight(a) {
            Some(p) if p >= 0 => t.is_zero() || g.homogeneous_weight(&t) == Some(-p),
            _ => false,
        };
        if !ok {
            w2 = Some(format!("τ({}) = {}", g.format_element(a), g.format_element(&t)));
            break;
        }
    }
    out.push(ConditionResult { condition: 2, pass: w2.is_none(), witness: w2 });
    let mut w3 = None;
    'outer: for (i, a) in d.k_subalg.iter().enumerate() {
        let lhs = g.adjoint_matrix(a).transpose().mul(&d.form);
        let rhs = d.form.mul(&g.adjoint_matrix(&d.tau.column(i)));
        for x in 0..n {
            for y in 0..n {
                let (l, r) = (lhs.get(x, y), rhs.get(x, y));
                if l != r {
                    w3 = Some(format!(
                        "A={}, x={}, y={}: ([A,x],y) = {} but (x,[τ(A),y]) = {}",
                        g.format_element(a),
                        g.label(x),
                        g.label(y),
                        fmt_rational(&l),
                        fmt_rational(&r)
                    ));
                    break 'outer;
                }
            }
        }
    }
    out.push(ConditionResult { condition: 3, pass: w3.is_none(), witness: w3 });
    Ok(out)
}

/// Orthogonal complement of ∂(C¹₊) in C²₊ for the form induced on Λ²𝔪* ⊗ 𝔤; `form` must be
/// given in the basis of the adapted algebra and be diagonal there.
pub fn orthogonal_complement(an: &Analysis, form: &Matrix) -> Option<Vec<SparseVec>> {
    let c2 = &an.c2;
    let mut weights = Vec::with_capacity(c2.dim());
    for (args, t) in &c2.keys {
        let mut w = form.get(*t, *t);
        for a in args {
            let f = form.get(*a, *a);
            if f.is_zero() {
                return None;
            }
            w /= f;
        }
        weights.push(w);
    }
    // c ⊥ v  ⇔  Σ_i weights_i c_i v_i = 0
    let rows: Vec<SparseVec> = an
        .image
        .basis()
        .iter()
        .map(|v| SparseVec::from_pairs(v.iter().map(|(i, x)| (i, x * &weights[i]))))
        .collect();
    Some(Matrix::from_rows(rows, c2.dim()).kernel_basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exactla::rat;
    use crate::glie::check_isomorphism;
    use crate::prolong::tanaka_prolong;

    fn identity_images(an: &Analysis, dim: usize) -> Vec<SparseVec> {
        (0..dim)
            .map(|i| SparseVec::unit(an.adapted.change.iter().position(|v| *v == SparseVec::unit(i)).expect("unit eigenvectors")))
            .collect()
    }

    #[test]
    fn adapted_basis_is_an_isomorphism() {
        let r = tanaka_prolong(&catalog::build_skn(1, 6).unwrap(), None).unwrap();
        let a = adapt(&r.full).unwrap();
        assert!(a.alg.is_valid());
        check_isomorphism(&a.alg, &r.full, &a.change).unwrap();
        assert!(a.torus.iter().any(|t| !t.is_zero()));
    }

    #[test]
    fn dichotomy_on_catalog_algebras() {
        for k in 0..=2 {
            let g = catalog::gl2_heis_skn(k, 6).unwrap();
            let d = decide(&g).unwrap();
            assert_eq!(d.exists, Some(k == 2), "k={k}");
            if let Some(basis) = &d.complement {
                let vs: Vec<SparseVec> = basis.iter().map(|c| d.analysis.c2.to_vector(c).unwrap()).collect();
                verify_complement(&d.analysis, &vs).unwrap();
            }
        }
    }

    #[test]
    fn dichotomy_on_prolongations() {
        for (k, exists) in [(1, false), (2, true)] {
            let r = tanaka_prolong(&catalog::build_skn(k, 6).unwrap(), None).unwrap();
            assert_eq!(normalization_exists(&r).unwrap().exists, Some(exists));
        }
    }

    #[test]
    fn obstruction_chains_replay() {
        let g = catalog::gl2_heis_skn(0, 7).unwrap();
        let an = analyze(&g).unwrap();
        let hit = forced_closure(&an).hit.expect("obstruction");
        let mut total = SparseVec::new();
        for (c, ch) in &hit.terms {
            let mut v = SparseVec::unit(ch.start);
            for x in &ch.actions {
                let m = &an.actions.iter().find(|(y, _)| y == x).unwrap().1;
                v = m.mul_vec(&v);
            }
            assert_eq!(v, ch.end);
            total.add_scaled(&v, c);
        }
        assert_eq!(total, hit.result);
        assert!(!total.is_zero());
        assert!(an.image.contains(&total));
    }

    #[test]
    fn explicit_witness_for_top_shift() {
        let c = nonexistence_witness(1, 6).unwrap();
        assert_eq!(c.eigenvalue, 8);
        assert_eq!(c.generator.len(), 1);
        assert_eq!((c.generator[0].args.clone(), c.generator[0].target.as_str()), (vec!["e2".to_string()], "e6"));
        assert!(nonexistence_witness(2, 7).unwrap().all_pass());
    }

    #[test]
    fn explicit_witness_needs_positive_forced_cochain() {
        // ε*_{n−3−k} ∧ η* ⊗ ε_{2n−6} has weight 6 − n + k, so it is not in C²₊ below k = n − 5
        let c = witness_steps(0, 7).unwrap();
        let failing: Vec<&str> = c.steps.iter().filter(|s| !s.pass).map(|s| s.id.as_str()).collect();
        assert_eq!(failing, ["c"]);
        assert!(matches!(nonexistence_witness(0, 7), Err(Error::Inconsistent(_))));
        assert!(matches!(witness_steps(2, 6), Err(Error::Range(_))));
    }

    #[test]
    fn morimoto_data_values() {
        let d = explicit_morimoto_data(6).unwrap();
        assert_eq!(d.form.get(catalog::eps(1), catalog::eps(1)), rat(1, 120));
        assert_eq!(d.form.get(catalog::eps(6), catalog::eps(6)), int(120));
        assert_eq!(d.tau.column(1), SparseVec::unit(catalog::H));
        assert!(explicit_morimoto_data(5).is_err());
    }

    #[test]
    fn morimoto_data_passes() {
        for n in 6..=8 {
            let g = catalog::build_gl2_semidirect_heis(n).unwrap();
            let rep = check_morimoto(&g, &explicit_morimoto_data(n).unwrap()).unwrap();
            assert!(rep.iter().all(|c| c.pass), "n={n}: {rep:?}");
        }
    }

    #[test]
    fn morimoto_perturbed_fails_condition_three() {
        // ([Y, ε₂], ε₁) = 5|ε₁|² = 1/24 but (ε₂, [X, ε₁]) = |ε₂|² = 1 after the change
        let g = catalog::build_gl2_semidirect_heis(6).unwrap();
        let mut d = explicit_morimoto_data(6).unwrap();
        d.form.set(catalog::eps(2), catalog::eps(2), int(1));
        let rep = check_morimoto(&g, &d).unwrap();
        assert!(rep[0].pass && rep[1].pass && !rep[2].pass);
        assert_eq!(rep[2].witness.as_deref(), Some("A=Y, x=e2, y=e1: ([A,x],y) = 1/24 but (x,[τ(A),y]) = 1"));
    }

    #[test]
    fn morimoto_trivial_and_invalid() {
        let g = catalog::build_gl2_semidirect_heis(6).unwrap();
        let n = g.dim();
        let d = MorimotoData { k_subalg: vec![], form: Matrix::identity(n), tau: Matrix::zeros(n, 0) };
        assert!(check_morimoto(&g, &d).unwrap().iter().all(|c| c.pass));
        let bad = MorimotoData { form: Matrix::identity(n).scaled(&int(-1)), ..d.clone() };
        assert!(matches!(check_morimoto(&g, &bad), Err(Error::InvalidForm(_))));
        let mut asym = Matrix::identity(n);
        asym.set(0, 1, int(1));
        assert!(matches!(check_morimoto(&g, &MorimotoData { form: asym, ..d }), Err(Error::InvalidForm(_))));
    }

    #[test]
    fn morimoto_orthogonal_complement_is_invariant() {
        let g = catalog::build_gl2_semidirect_heis(6).unwrap();
        let an = analyze(&g).unwrap();
        let d = explicit_morimoto_data(6).unwrap().transport(&identity_images(&an, g.dim())).unwrap();
        let oc = orthogonal_complement(&an, &d.form).unwrap();
        verify_complement(&an, &oc).unwrap();
    }

    #[test]
    fn transport_round_trip() {
        let g = catalog::build_gl2_semidirect_heis(6).unwrap();
        let d = explicit_morimoto_data(6).unwrap();
        let swap: Vec<SparseVec> = (0..g.dim()).map(|i| SparseVec::unit(if i < 2 { 1 - i } else { i })).collect();
        let t = d.transport(&swap).unwrap().transport(&swap).unwrap();
        assert_eq!(t.form, d.form);
        assert_eq!(t.tau, d.tau);
    }
}
