//! Polynomial vector fields over ℚ, weak derived flags, pointwise Tanaka symbols and Cartan
//! prolongation charts of rank 2 distributions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::exactla::{coordinates, fmt_rational, int, parse_rational, rat, Echelon, Rational, SparseVec};
use crate::glie::{check_isomorphism, GradedLieAlgebra, SymbolAlgebra};

/// Multivariate polynomial over ℚ in a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nv: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nv: usize) -> Poly {
        Poly { nv, terms: BTreeMap::new() }
    }

    pub fn constant(nv: usize, c: Rational) -> Poly {
        let mut p = Poly::zero(nv);
        p.add_term(vec![0; nv], c);
        p
    }

    pub fn var(nv: usize, i: usize) -> Poly {
        let mut e = vec![0; nv];
        e[i] = 1;
        let mut p = Poly::zero(nv);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nv
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.nv, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let key = exps.clone();
        let e = self.terms.entry(exps).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { nv: self.nv, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nv);
        }
        Poly { nv: self.nv, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.nv);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn deriv(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nv);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * int(e[i] as i64));
            }
        }
        p
    }

    pub fn eval(&self, q: &[Rational]) -> Rational {
        assert_eq!(q.len(), self.nv, "point dimension");
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in q.iter().zip(e) {
                if *k > 0 {
                    t *= num_traits::pow(x.clone(), *k as usize);
                }
            }
            s += t;
        }
        s
    }

    /// Same polynomial in `extra` further variables appended at the end.
    pub fn extended(&self, extra: usize) -> Poly {
        Poly {
            nv: self.nv + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f.resize(self.nv + extra, 0);
                    (f, c.clone())
                })
                .collect(),
        }
    }
}

/// Vector field Σ_i comps[i] ∂_{coords[i]} with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    coords: Vec<String>,
    comps: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(coords: Vec<String>, comps: Vec<Poly>) -> Result<PolyVectorField> {
        if comps.len() != coords.len() {
            return Err(Error::Dimension { expected: coords.len(), found: comps.len() });
        }
        if let Some(p) = comps.iter().find(|p| p.nvars() != coords.len()) {
            return Err(Error::Dimension { expected: coords.len(), found: p.nvars() });
        }
        Ok(PolyVectorField { coords, comps })
    }

    pub fn coordinate_field(coords: Vec<String>, i: usize) -> PolyVectorField {
        let nv = coords.len();
        let comps = (0..nv).map(|j| if j == i { Poly::constant(nv, Rational::one()) } else { Poly::zero(nv) }).collect();
        PolyVectorField { coords, comps }
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Directional derivative of `p` along the field.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(p.nvars());
        for (j, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                let d = p.deriv(j);
                if !d.is_zero() {
                    out = out.add(&c.mul(&d));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &PolyVectorField) -> PolyVectorField {
        PolyVectorField { coords: self.coords.clone(), comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: &Rational) -> PolyVectorField {
        PolyVectorField { coords: self.coords.clone(), comps: self.comps.iter().map(|p| p.scale(s)).collect() }
    }

    pub fn mul_poly(&self, f: &Poly) -> PolyVectorField {
        PolyVectorField { coords: self.coords.clone(), comps: self.comps.iter().map(|p| p.mul(f)).collect() }
    }

    pub fn eval(&self, q: &[Rational]) -> SparseVec {
        SparseVec::from_pairs(self.comps.iter().enumerate().map(|(i, p)| (i, p.eval(q))))
    }

    /// Lift to coordinates with new names appended, with zero components along them.
    pub fn extended(&self, new: &[String]) -> PolyVectorField {
        let mut coords = self.coords.clone();
        coords.extend(new.iter().cloned());
        let mut comps: Vec<Poly> = self.comps.iter().map(|p| p.extended(new.len())).collect();
        comps.extend((0..new.len()).map(|_| Poly::zero(coords.len())));
        PolyVectorField { coords, comps }
    }
}

pub fn lie_bracket(v: &PolyVectorField, w: &PolyVectorField) -> Result<PolyVectorField> {
    if v.coords != w.coords {
        return Err(Error::Inconsistent("vector fields on different coordinates".into()));
    }
    let comps = (0..v.coords.len()).map(|i| v.apply(&w.comps[i]).sub(&w.apply(&v.comps[i]))).collect();
    Ok(PolyVectorField { coords: v.coords.clone(), comps })
}

/// Rank 2 distribution given by two polynomial fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFrame {
    coords: Vec<String>,
    fields: [PolyVectorField; 2],
}

impl PolyFrame {
    /// The fields must be independent at the origin.
    pub fn new(coords: Vec<String>, x1: PolyVectorField, x2: PolyVectorField) -> Result<PolyFrame> {
        if x1.coords != coords || x2.coords != coords {
            return Err(Error::Inconsistent("frame fields on different coordinates".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(c) = coords.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::Parse(format!("duplicate coordinate {c}")));
        }
        let f = PolyFrame { coords, fields: [x1, x2] };
        let o = vec![Rational::zero(); f.dim()];
        if span_dim(&f.eval(&o)) < 2 {
            return Err(Error::Degenerate("fields dependent at the origin".into()));
        }
        Ok(f)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn fields(&self) -> &[PolyVectorField; 2] {
        &self.fields
    }

    pub fn eval(&self, q: &[Rational]) -> Vec<SparseVec> {
        self.fields.iter().map(|f| f.eval(q)).collect()
    }

    pub fn to_file(&self) -> FrameFile {
        FrameFile {
            coords: self.coords.clone(),
            fields: self
                .fields
                .iter()
                .map(|f| {
                    f.comps
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(i, p)| {
                            let terms = p.terms().map(|(e, c)| MonoTerm { c: fmt_rational(c), exps: e.clone() }).collect();
                            (self.coords[i].clone(), terms)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(f: &FrameFile) -> Result<PolyFrame> {
        if f.fields.len() != 2 {
            return Err(Error::Parse(format!("a frame has exactly two fields, found {}", f.fields.len())));
        }
        let nv = f.coords.len();
        let mut fields = Vec::new();
        for fld in &f.fields {
            let mut comps = vec![Poly::zero(nv); nv];
            for (name, terms) in fld {
                let i = f.coords.iter().position(|c| c == name).ok_or_else(|| Error::Parse(format!("unknown coordinate {name}")))?;
                for t in terms {
                    if t.exps.len() != nv {
                        return Err(Error::Parse(format!("exponent vector of length {} for {nv} coordinates", t.exps.len())));
                    }
                    comps[i].add_term(t.exps.clone(), parse_rational(&t.c)?);
                }
            }
            fields.push(PolyVectorField::new(f.coords.clone(), comps)?);
        }
        let x2 = fields.pop().unwrap();
        let x1 = fields.pop().unwrap();
        PolyFrame::new(f.coords.clone(), x1, x2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("frame serializes")
    }

    pub fn from_json(s: &str) -> Result<PolyFrame> {
        let f: FrameFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        PolyFrame::from_file(&f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MonoTerm {
    pub c: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub coords: Vec<String>,
    pub fields: Vec<BTreeMap<String, Vec<MonoTerm>>>,
}

fn span_dim(vs: &[SparseVec]) -> usize {
    crate::exactla::span_rank(vs)
}

/// Seeded sampler of rational points with numerators in [−10, 10] and denominators in [1, 10].
pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(seed: u64) -> PointSampler {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rational(&mut self) -> Rational {
        let p: i64 = self.rng.gen_range(-10..=10);
        let q: i64 = self.rng.gen_range(1..=10);
        rat(p, q)
    }

    pub fn point(&mut self, dim: usize) -> Vec<Rational> {
        (0..dim).map(|_| self.rational()).collect()
    }
}

/// A left-nested bracket word [X_{i₁},[X_{i₂},[…,X_{i_k}]]], letters 1 or 2.
pub type Word = Vec<u8>;

pub fn word_label(w: &Word) -> String {
    let digits: String = w.iter().map(|d| char::from(b'0' + d)).collect();
    format!("W{digits}")
}

#[derive(Clone, Debug)]
pub struct FlagEntry {
    pub word: Word,
    pub field: PolyVectorField,
    pub value: SparseVec,
}

/// Weak derived flag at a point together with the bracket words spanning it.
#[derive(Clone, Debug)]
pub struct FlagReport {
    pub point: Vec<Rational>,
    /// Small growth vector.
    pub dims: Vec<usize>,
    /// Words kept at each level (each increases the rank at the point).
    pub levels: Vec<Vec<FlagEntry>>,
}

impl FlagReport {
    pub fn bracket_generating(&self, dim: usize) -> bool {
        self.dims.last() == Some(&dim)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &FlagEntry)> {
        self.levels.iter().enumerate().flat_map(|(l, es)| es.iter().map(move |e| (l + 1, e)))
    }

    /// Fields spanning D^{−j} near the point (valid on the equiregular stratum).
    pub fn frame_of(&self, j: usize) -> Vec<&PolyVectorField> {
        self.levels.iter().take(j).flatten().map(|e| &e.field).collect()
    }
}

/// D^{−i}(q) = D^{−i+1}(q) + [D, D^{−i+1}](q), computed breadth first over left-nested
/// words. Only words raising the rank at `q` are kept; they form a local frame of each
/// flag piece wherever the flag has constant rank.
pub fn weak_derived_flag(f: &PolyFrame, q: &[Rational], depth: usize) -> Result<FlagReport> {
    if q.len() != f.dim() {
        return Err(Error::Dimension { expected: f.dim(), found: q.len() });
    }
    let mut span = Echelon::new();
    let mut level = Vec::new();
    for (i, fld) in f.fields.iter().enumerate() {
        let value = fld.eval(q);
        if !span.insert(value.clone()) {
            return Err(Error::Degenerate("frame fields dependent at the point".into()));
        }
        level.push(FlagEntry { word: vec![i as u8 + 1], field: fld.clone(), value });
    }
    let mut dims = vec![span.rank()];
    let mut levels = vec![level];
    while levels.len() < depth.max(1) && span.rank() < f.dim() {
        let mut next = Vec::new();
        for (a, x) in f.fields.iter().enumerate() {
            for w in levels.last().unwrap() {
                let field = lie_bracket(x, &w.field)?;
                let value = field.eval(q);
                if span.insert(value.clone()) {
                    let mut word = vec![a as u8 + 1];
                    word.extend(&w.word);
                    next.push(FlagEntry { word, field, value });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        dims.push(span.rank());
        levels.push(next);
    }
    Ok(FlagReport { point: q.to_vec(), dims, levels })
}

/// Growth vector at `q`, checked against seeded random points: `q` must attain the generic
/// (maximal) ranks.
pub fn regular_flag(f: &PolyFrame, q: &[Rational], seed: u64) -> Result<FlagReport> {
    let rep = weak_derived_flag(f, q, f.dim())?;
    let mut s = PointSampler::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..2 {
        let p = s.point(f.dim());
        let Ok(other) = weak_derived_flag(f, &p, f.dim()) else { continue };
        let len = rep.dims.len().max(other.dims.len());
        let padded = |d: &[usize], i: usize| d.get(i).or(d.last()).copied().unwrap_or(0);
        if (0..len).any(|i| padded(&rep.dims, i) < padded(&other.dims, i)) {
            return Err(Error::NotEquiregular(format!("growth {:?} below {:?} at a nearby sample", rep.dims, other.dims)));
        }
    }
    Ok(rep)
}

/// Graded nilpotent algebra of the weak derived flag at `q`, on the kept bracket words.
pub fn tanaka_symbol_at(f: &PolyFrame, q: &[Rational], seed: u64) -> Result<SymbolAlgebra> {
    let rep = regular_flag(f, q, seed)?;
    symbol_from_flag(f, &rep)
}

pub fn symbol_from_flag(f: &PolyFrame, rep: &FlagReport) -> Result<SymbolAlgebra> {
    if !rep.bracket_generating(f.dim()) {
        return Err(Error::Degenerate(format!("not bracket generating at the point: growth {:?}", rep.dims)));
    }
    let entries: Vec<(usize, &FlagEntry)> = rep.entries().collect();
    let values: Vec<SparseVec> = entries.iter().map(|(_, e)| e.value.clone()).collect();
    let mut g = GradedLieAlgebra::new(entries.iter().map(|(l, e)| (word_label(&e.word), -(*l as i32))));
    for a in 0..entries.len() {
        for b in a + 1..entries.len() {
            let (la, ea) = entries[a];
            let (lb, eb) = entries[b];
            let target = la + lb;
            let v = lie_bracket(&ea.field, &eb.field)?.eval(&rep.point);
            let c = coordinates(&values, &v).ok_or_else(|| Error::Inconsistent("bracket outside tangent space".into()))?;
            if c.iter().any(|(i, _)| entries[i].0 > target) {
                return Err(Error::NotEquiregular(format!(
                    "[{}, {}] leaves D^-{target} at the point",
                    word_label(&ea.word),
                    word_label(&eb.word)
                )));
            }
            g.set_bracket(a, b, c.restricted(|i| entries[i].0 == target))?;
        }
    }
    let s = SymbolAlgebra::new(g)?;
    if !s.is_fundamental() {
        return Err(Error::Inconsistent("symbol is not fundamental".into()));
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub frame: PolyFrame,
    pub fiber_coord: String,
}

/// Iterated Cartan prolongations in affine charts; level i lives on the base coordinates
/// followed by a1, …, ai.
#[derive(Clone, Debug)]
pub struct ChartTower {
    pub base: PolyFrame,
    pub levels: Vec<TowerLevel>,
}

impl ChartTower {
    pub fn top(&self) -> &PolyFrame {
        self.levels.last().map_or(&self.base, |l| &l.frame)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Lvl {
            fiber_coord: String,
            frame: FrameFile,
        }
        #[derive(Serialize)]
        struct Tower {
            base: FrameFile,
            levels: Vec<Lvl>,
        }
        let t = Tower {
            base: self.base.to_file(),
            levels: self.levels.iter().map(|l| Lvl { fiber_coord: l.fiber_coord.clone(), frame: l.frame.to_file() }).collect(),
        };
        serde_json::to_string_pretty(&t).expect("tower serializes")
    }
}

fn fresh_name(coords: &[String], stem: &str) -> String {
    let mut i = 1;
    loop {
        let c = format!("{stem}{i}");
        if !coords.contains(&c) {
            return c;
        }
        i += 1;
    }
}

/// One Cartan prolongation in the chart ⟨X₁ + a X₂⟩ of ℙD: frame {X₁ + (a + a₀) X₂, ∂_a}.
pub fn cartan_prolong_chart(f: &PolyFrame, shift: Option<&Rational>) -> Result<TowerLevel> {
    let a = fresh_name(&f.coords, "a");
    let new = [a.clone()];
    let x1 = f.fields[0].extended(&new);
    let x2 = f.fields[1].extended(&new);
    let nv = f.dim() + 1;
    let mut coef = Poly::var(nv, nv - 1);
    if let Some(s) = shift {
        coef = coef.add(&Poly::constant(nv, s.clone()));
    }
    let y1 = x1.add(&x2.mul_poly(&coef));
    let mut coords = f.coords.clone();
    coords.push(a.clone());
    let y2 = PolyVectorField::coordinate_field(coords.clone(), nv - 1);
    Ok(TowerLevel { frame: PolyFrame::new(coords, y1, y2)?, fiber_coord: a })
}

pub fn iterate_prolong(f: &PolyFrame, k: usize) -> Result<ChartTower> {
    if k == 0 {
        return Err(Error::Range("number of prolongations must be at least 1".into()));
    }
    let mut t = ChartTower { base: f.clone(), levels: Vec::new() };
    for _ in 0..k {
        let lvl = cartan_prolong_chart(t.top(), None)?;
        t.levels.push(lvl);
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionCheck {
    pub i: usize,
    pub vv: bool,
    pub vj: bool,
}

#[derive(Clone, Debug)]
pub struct InvolutivityReport {
    pub point: Vec<Rational>,
    pub checks: Vec<InclusionCheck>,
}

impl InvolutivityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.vv && c.vj)
    }
}

/// For 1 ≤ i ≤ n−4, with V_i the span of the last n−3−i fiber coordinate fields of a tower of
/// n−4 prolongations and J = D^{−(n−3+i)}, checks [V_i, V_i] ⊆ V_i and [V_i, J] ⊆ J at `q`.
pub fn check_involutivity_flags(t: &ChartTower, q: &[Rational], seed: u64) -> Result<InvolutivityReport> {
    let f = t.top();
    let levels = t.levels.len();
    let n = f.dim() - levels;
    if n < 5 || levels != n - 4 {
        return Err(Error::Range(format!("tower has {levels} levels over a base of dimension {n}; expected n − 4")));
    }
    let rep = regular_flag(f, q, seed)?;
    let fiber: Vec<usize> = (n..f.dim()).collect();
    let mut checks = Vec::new();
    for i in 1..=n - 4 {
        let vs: Vec<PolyVectorField> =
            fiber[fiber.len() - (n - 3 - i)..].iter().map(|&c| PolyVectorField::coordinate_field(f.coords.clone(), c)).collect();
        let v_vals: Vec<SparseVec> = vs.iter().map(|v| v.eval(q)).collect();
        let v_span = Echelon::from_rows(v_vals);
        let mut vv = true;
        for a in &vs {
            for b in &vs {
                if !v_span.contains(&lie_bracket(a, b)?.eval(q)) {
                    vv = false;
                }
            }
        }
        let jdeg = n - 3 + i;
        if rep.levels.len() < jdeg {
            return Err(Error::Degenerate(format!("flag shorter than {jdeg} at the point")));
        }
        let jfields = rep.frame_of(jdeg);
        let j_span = Echelon::from_rows(jfields.iter().map(|w| w.eval(q)));
        let mut vj = true;
        for a in &vs {
            for w in &jfields {
                if !j_span.contains(&lie_bracket(a, w)?.eval(q)) {
                    vj = false;
                }
            }
        }
        checks.push(InclusionCheck { i, vv, vj });
    }
    Ok(InvolutivityReport { point: q.to_vec(), checks })
}

#[derive(Clone, Debug)]
pub enum Recognition {
    /// Images of the 𝔰^{k,n} basis in the input algebra.
    Isomorphic(Vec<SparseVec>),
    NotIsomorphic(String),
    Indeterminate(String),
}

impl Recognition {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Recognition::Isomorphic(_))
    }
}

/// Decides m ≅ 𝔰^{k,n} (n ≥ 6) by building the adapted basis X̄, ε̄_{n−3−k}, ε̄_{i+1} = [X̄, ε̄_i],
/// η̄ = ±[ε̄_{n−3−k}, ε̄_{n−2+k}] and checking it is a graded isomorphism.
///
/// ε̄ spans D₀ = {v ∈ 𝔪_{−1} : [v, 𝔪_{−3}] = 0}; X̄ spans L = {v ∈ 𝔪_{−1} : [v, 𝔪_{2−n−k}] = 0}
/// when that is a line, otherwise it is a random element off D₀. All such choices are
/// related by automorphisms, so one successful trial is conclusive either way.
pub fn recognize_skn(m: &SymbolAlgebra, k: usize, n: usize, seed: u64) -> Result<Recognition> {
    let target = catalog::build_skn(k, n)?;
    if n < 6 {
        return Err(Error::Range("recognition needs n ≥ 6".into()));
    }
    if m.dim() != target.dim() || m.weight_dims() != target.weight_dims() {
        return Ok(Recognition::NotIsomorphic(format!("weight dimensions {:?} ≠ {:?}", m.weight_dims(), target.weight_dims())));
    }
    let g = m.algebra();
    let m1: Vec<usize> = g.graded_component(-1);
    let centralizer_line = |w: i32| -> Vec<SparseVec> {
        // v = Σ c_a e_a with [v, e_b] = 0 for every b of weight w
        let rows: Vec<SparseVec> = g
            .graded_component(w)
            .into_iter()
            .flat_map(|b| {
                let cols: Vec<SparseVec> = m1.iter().map(|&a| g.bracket_basis(a, b)).collect();
                let dim = g.dim();
                (0..dim).map(move |t| SparseVec::from_pairs(cols.iter().enumerate().map(|(c, v)| (c, v.get(t)))))
            })
            .filter(|r| !r.is_zero())
            .collect();
        crate::exactla::Matrix::from_rows(rows, m1.len())
            .kernel_basis()
            .into_iter()
            .map(|v| v.remap(|c| Some(m1[c])))
            .collect()
    };
    let d0 = centralizer_line(-3);
    if d0.len() != 1 {
        return Ok(Recognition::NotIsomorphic(format!("centralizer of 𝔪_-3 in 𝔪_-1 has dimension {}", d0.len())));
    }
    let eps_bar = d0[0].clone();
    let lx = centralizer_line(2 - n as i32 - k as i32);
    let mut sampler = PointSampler::new(seed);
    let trial = |sampler: &mut PointSampler| -> Option<SparseVec> {
        match lx.len() {
            1 => Some(lx[0].clone()),
            2 => {
                let v = SparseVec::from_pairs(m1.iter().map(|&a| (a, sampler.rational())));
                Some(v)
            }
            _ => None,
        }
    };
    let kk = k;
    for _ in 0..8 {
        let Some(x_bar) = trial(&mut sampler) else {
            return Ok(Recognition::NotIsomorphic(format!("centralizer of 𝔪_{} in 𝔪_-1 has dimension {}", 2 - n as i32 - k as i32, lx.len())));
        };
        if Echelon::from_rows([eps_bar.clone(), x_bar.clone()]).rank() < 2 {
            if lx.len() == 1 {
                return Ok(Recognition::NotIsomorphic("the two distinguished lines in 𝔪_-1 coincide".into()));
            }
            continue;
        }
        // images in the target basis order X, ε_{n−3−k}, …, ε_{2n−6}, η
        let first = n - 3 - kk;
        let mut eps_img: BTreeMap<usize, SparseVec> = BTreeMap::new();
        eps_img.insert(first, eps_bar.clone());
        for i in first..2 * n - 6 {
            let v = g.bracket(&x_bar, &eps_img[&i]);
            eps_img.insert(i + 1, v);
        }
        let partner = 2 * n - 5 - first;
        let mut eta_img = g.bracket(&eps_img[&first], &eps_img[&partner]);
        if first % 2 == 1 {
            eta_img = eta_img.neg();
        }
        let mut images = vec![x_bar.clone()];
        images.extend((first..=2 * n - 6).map(|i| eps_img[&i].clone()));
        images.push(eta_img);
        return Ok(match check_isomorphism(target.algebra(), g, &images) {
            Ok(()) => Recognition::Isomorphic(images),
            Err(e) => Recognition::NotIsomorphic(e),
        });
    }
    Ok(Recognition::Indeterminate("no generic X̄ found in 8 trials".into()))
}

/// Graded invariants of a symbol: centralizer of 𝔪_{−1} in each 𝔪_{−j}, and the rank of
/// [𝔪_{−1}, 𝔪_{−j}] → 𝔪_{−j−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInvariants {
    pub weight_dims: Vec<usize>,
    pub centralizer_dims: Vec<usize>,
}

pub fn symbol_invariants(m: &SymbolAlgebra) -> SymbolInvariants {
    let g = m.algebra();
    let depth = m.depth();
    let m1 = g.graded_component(-1);
    let mut weight_dims = Vec::new();
    let mut centralizer_dims = Vec::new();
    for j in 1..=depth {
        let comp = g.graded_component(-(j as i32));
        weight_dims.push(comp.len());
        // v ∈ 𝔪_{−j} with [e_a, v] = 0 for all a ∈ 𝔪_{−1}
        let rows: Vec<SparseVec> = m1
            .iter()
            .flat_map(|&a| {
                let cols: Vec<SparseVec> = comp.iter().map(|&b| g.bracket_basis(a, b)).collect();
                (0..g.dim()).map(move |t| SparseVec::from_pairs(cols.iter().enumerate().map(|(c, v)| (c, v.get(t)))))
            })
            .filter(|r| !r.is_zero())
            .collect();
        centralizer_dims.push(comp.len() - crate::exactla::Matrix::from_rows(rows, comp.len()).rank());
    }
    SymbolInvariants { weight_dims, centralizer_dims }
}
