//! Subcommand bodies. Each returns both renderings and an exit status; `main` picks one.

use std::path::Path;

use serde_json::{json, Value};
use tanaka_core::catalog;
use tanaka_core::exactla::{fmt_rational, parse_rational};
use tanaka_core::normcond::{self, NormDecision};
use tanaka_core::prolong::tanaka_prolong;
use tanaka_core::vf::{self, iterate_prolong, PointSampler, PolyFrame, Recognition};
use tanaka_core::{Error, GradedLieAlgebra, Rational, SymbolAlgebra};

use crate::verify;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::Parse(_) | Error::Range(_) | Error::Dimension { .. } | Error::Io(_)) => EXIT_USAGE,
            CliError::Core(_) => EXIT_FAIL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Output {
    pub text: String,
    pub json: String,
    pub code: i32,
}

impl Output {
    fn new(text: String, json: Value, code: i32) -> Output {
        Output { text, json: serde_json::to_string_pretty(&json).expect("serializes") + "\n", code }
    }
}

fn need_n(n: Option<usize>) -> CliResult<usize> {
    n.ok_or_else(|| CliError::Usage("--n is required".into()))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Core(Error::Io(e)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraFamily {
    Skn,
    Symp,
    Heis,
}

/// The algebra named by flags or read from a file.
pub fn load_algebra(family: Option<AlgebraFamily>, n: Option<usize>, k: usize, input: Option<&Path>) -> CliResult<GradedLieAlgebra> {
    match (family, input) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --family or --input".into())),
        (None, None) => Err(CliError::Usage("one of --family or --input is required".into())),
        (None, Some(p)) => Ok(GradedLieAlgebra::from_json(&read(p)?)?),
        (Some(f), None) => {
            let n = need_n(n)?;
            Ok(match f {
                AlgebraFamily::Skn => catalog::build_skn(k, n)?.into_algebra(),
                AlgebraFamily::Symp => catalog::symp_symbol(n)?.into_algebra(),
                AlgebraFamily::Heis => catalog::build_heisenberg(n)?,
            })
        }
    }
}

pub fn cmd_prolong(g: GradedLieAlgebra, max_level: Option<usize>) -> CliResult<Output> {
    let m = SymbolAlgebra::new(g)?;
    let r = tanaka_prolong(&m, max_level)?;
    let mut text = format!("dim {}\nterminated {}\n", r.dim(), r.terminated);
    for (w, d) in &r.level_dims {
        text.push_str(&format!("level {w}: {d}\n"));
    }
    let json: Value = serde_json::from_str(&r.to_json()).expect("valid json");
    Ok(Output::new(text, json, if r.terminated { EXIT_PASS } else { EXIT_INDETERMINATE }))
}

fn render_decision(d: &NormDecision) -> String {
    let an = &d.analysis;
    let mut s = format!(
        "exists: {}\nmethod: {}\ndim C1+ {}, dim C2+ {}, rank of coboundary {}\n",
        d.exists.map_or("undecided".to_string(), |b| b.to_string()),
        d.method,
        an.c1.dim(),
        an.c2.dim(),
        an.image.rank()
    );
    if d.complement.is_some() {
        s.push_str("complement dimensions by weight:");
        for b in d.complement_dims() {
            s.push_str(&format!(" {}:{}", b.weight, b.dim));
        }
        s.push('\n');
    }
    if let Some(o) = &d.obstruction {
        let show = |ts: &[tanaka_core::cohomo::CochainTerm]| -> String {
            ts.iter().map(|t| format!("{}*{}⊗{}", t.c, t.args.join("∧"), t.target)).collect::<Vec<_>>().join(" + ")
        };
        s.push_str(&format!("obstruction: {} = ∂({})\n", show(&o.result), show(&o.preimage)));
        for c in &o.chains {
            s.push_str(&format!(
                "  {} × ({}) applied to {} (weight {}, torus eigenvalue {})\n",
                c.coefficient,
                c.actions.join(", "),
                show(&c.generator),
                c.generator_weight,
                c.generator_eigenvalue
            ));
        }
    }
    if let Some(c) = &d.certificate {
        s.push_str(&format!("explicit obstruction for k={}, n={} at eigenvalue {}:\n", c.k, c.n, c.eigenvalue));
        for st in &c.steps {
            s.push_str(&format!("  ({}) {}: {}\n", st.id, if st.pass { "PASS" } else { "FAIL" }, st.detail));
        }
    }
    s
}

pub fn cmd_normcheck(g: GradedLieAlgebra, max_level: Option<usize>, skn: Option<(usize, usize)>) -> CliResult<Output> {
    let mut d = if g.weights().iter().all(|&w| w < 0) {
        let r = tanaka_prolong(&SymbolAlgebra::new(g)?, max_level)?;
        if !r.terminated {
            return Err(CliError::Core(Error::Inconsistent("prolongation did not terminate below the level cap".into())));
        }
        normcond::normalization_exists(&r)?
    } else {
        normcond::decide(&g)?
    };
    if let Some((k, n)) = skn {
        if n >= 6 && k + 5 <= n {
            d.certificate = Some(normcond::witness_steps(k, n)?);
        }
    }
    let code = if d.exists.is_some() { EXIT_PASS } else { EXIT_INDETERMINATE };
    Ok(Output::new(render_decision(&d), d.to_value(), code))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameFamily {
    Monge1,
    Monge2,
    FlatSkn,
}

pub fn load_frame(family: Option<FrameFamily>, n: Option<usize>, k: usize, input: Option<&Path>) -> CliResult<PolyFrame> {
    match (family, input) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --family or --input".into())),
        (None, None) => Err(CliError::Usage("one of --family or --input is required".into())),
        (None, Some(p)) => Ok(PolyFrame::from_json(&read(p)?)?),
        (Some(f), None) => {
            let n = need_n(n)?;
            Ok(match f {
                FrameFamily::Monge1 => catalog::monge_frame(n, 1)?,
                FrameFamily::Monge2 => catalog::monge_frame(n, 2)?,
                FrameFamily::FlatSkn => catalog::flat_model_frame(&catalog::build_skn(k, n)?)?,
            })
        }
    }
}

/// `x=1/2,y=0`; unnamed coordinates are 0.
pub fn parse_point(spec: &str, coords: &[String]) -> CliResult<Vec<Rational>> {
    let mut q = vec![Rational::from_integer(0.into()); coords.len()];
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, val) = part.split_once('=').ok_or_else(|| CliError::Usage(format!("point entry `{part}` is not name=value")))?;
        let i = coords
            .iter()
            .position(|c| c == name.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown coordinate `{}`; coordinates are {}", name.trim(), coords.join(","))))?;
        q[i] = parse_rational(val.trim())?;
    }
    Ok(q)
}

pub fn parse_pair(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("expected k,n, got `{spec}`"));
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Frame after `prolong` chart prolongations and the evaluation point (given, or seeded).
pub struct VfSetup {
    pub frame: PolyFrame,
    pub tower: Option<vf::ChartTower>,
    pub point: Vec<Rational>,
}

pub fn vf_setup(base: PolyFrame, prolong: usize, point: Option<&str>, seed: u64) -> CliResult<VfSetup> {
    let tower = if prolong > 0 { Some(iterate_prolong(&base, prolong)?) } else { None };
    let frame = tower.as_ref().map_or(base, |t| t.top().clone());
    let point = match point {
        Some(p) => parse_point(p, frame.coords())?,
        None => PointSampler::new(seed).point(frame.dim()),
    };
    Ok(VfSetup { frame, tower, point })
}

fn point_json(s: &VfSetup) -> Value {
    Value::Object(s.frame.coords().iter().zip(&s.point).map(|(c, x)| (c.clone(), Value::String(fmt_rational(x)))).collect())
}

pub fn cmd_growth(s: &VfSetup) -> CliResult<Output> {
    let rep = vf::weak_derived_flag(&s.frame, &s.point, s.frame.dim())?;
    let dims: Vec<String> = rep.dims.iter().map(|d| d.to_string()).collect();
    let text = format!("({})\n", dims.join(","));
    let generating = rep.bracket_generating(s.frame.dim());
    Ok(Output::new(text, json!({ "bracket_generating": generating, "growth": rep.dims, "point": point_json(s) }), EXIT_PASS))
}

pub fn cmd_symbol(s: &VfSetup, recognize: Option<(usize, usize)>, seed: u64) -> CliResult<Output> {
    let m = vf::tanaka_symbol_at(&s.frame, &s.point, seed)?;
    let alg: Value = serde_json::from_str(&m.to_json()).expect("valid json");
    let mut text = format!("symbol of dimension {}, weights", m.dim());
    for (w, d) in m.weight_dims() {
        text.push_str(&format!(" {w}:{d}"));
    }
    text.push('\n');
    let mut json = json!({ "point": point_json(s), "symbol": alg });
    let mut code = EXIT_PASS;
    if let Some((k, n)) = recognize {
        let (status, detail, iso) = match vf::recognize_skn(&m, k, n, seed)? {
            Recognition::Isomorphic(_) => ("isomorphic", String::new(), Some(true)),
            Recognition::NotIsomorphic(e) => ("not isomorphic", e, Some(false)),
            Recognition::Indeterminate(e) => ("indeterminate", e, None),
        };
        code = match iso {
            Some(true) => EXIT_PASS,
            Some(false) => EXIT_FAIL,
            None => EXIT_INDETERMINATE,
        };
        text.push_str(&format!("recognized as s^{{{k},{n}}}: {}\n", iso.map_or("indeterminate".to_string(), |b| b.to_string())));
        if !detail.is_empty() {
            text.push_str(&format!("{status}: {detail}\n"));
        }
        json["recognized"] = json!(iso);
        json["recognition_detail"] = json!(detail);
    }
    Ok(Output::new(text, json, code))
}

pub fn cmd_involutivity(s: &VfSetup, seed: u64) -> CliResult<Output> {
    let t = s.tower.as_ref().ok_or_else(|| CliError::Usage("involutivity needs --prolong n-4".into()))?;
    let rep = vf::check_involutivity_flags(t, &s.point, seed)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in &rep.checks {
        text.push_str(&format!("i={}: [V,V] ⊆ V {}, [V,J] ⊆ J {}\n", c.i, c.vv, c.vj));
        rows.push(json!({ "i": c.i, "vj": c.vj, "vv": c.vv }));
    }
    text.push_str(&format!("all pass: {}\n", rep.all_pass()));
    let json = json!({ "all_pass": rep.all_pass(), "checks": rows, "point": point_json(s) });
    Ok(Output::new(text, json, if rep.all_pass() { EXIT_PASS } else { EXIT_FAIL }))
}

pub fn cmd_tower(base: &PolyFrame, prolong: usize) -> CliResult<Output> {
    if prolong == 0 {
        return Err(CliError::Usage("tower needs --prolong of at least 1".into()));
    }
    let t = iterate_prolong(base, prolong)?;
    let json: Value = serde_json::from_str(&t.to_json()).expect("valid json");
    let mut text = format!("base coordinates {}\n", base.coords().join(","));
    for l in &t.levels {
        text.push_str(&format!("fiber {}: X1 = {}\n", l.fiber_coord, field_text(&l.frame, 0)));
    }
    Ok(Output::new(text, json, EXIT_PASS))
}

fn field_text(f: &PolyFrame, which: usize) -> String {
    let file = f.to_file();
    let parts: Vec<String> = file.fields[which].iter().map(|(c, terms)| format!("{c}:{}", terms.len())).collect();
    format!("{} nonzero components ({})", parts.len(), parts.join(" "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogItem {
    Heis,
    Gl2Heis,
    Skn,
    Symp,
    Monge1,
    Monge2,
    FlatSkn,
    EigenTable,
}

pub fn cmd_family(item: CatalogItem, n: usize, k: usize) -> CliResult<Output> {
    let (json, text): (Value, String) = match item {
        CatalogItem::Heis | CatalogItem::Gl2Heis | CatalogItem::Skn | CatalogItem::Symp => {
            let g = match item {
                CatalogItem::Heis => catalog::build_heisenberg(n)?,
                CatalogItem::Gl2Heis => catalog::build_gl2_semidirect_heis(n)?,
                CatalogItem::Skn => catalog::build_skn(k, n)?.into_algebra(),
                _ => catalog::symp_symbol(n)?.into_algebra(),
            };
            let s = g.to_json();
            (serde_json::from_str(&s).expect("valid json"), s + "\n")
        }
        CatalogItem::Monge1 | CatalogItem::Monge2 | CatalogItem::FlatSkn => {
            let f = match item {
                CatalogItem::Monge1 => catalog::monge_frame(n, 1)?,
                CatalogItem::Monge2 => catalog::monge_frame(n, 2)?,
                _ => catalog::flat_model_frame(&catalog::build_skn(k, n)?)?,
            };
            let s = f.to_json();
            (serde_json::from_str(&s).expect("valid json"), s + "\n")
        }
        CatalogItem::EigenTable => {
            let rows = catalog::eigen_table(n, k)?;
            let mut text = String::from("label weight L_H L_E\n");
            for r in &rows {
                text.push_str(&format!("{} {} {} {}\n", r.label, r.weight, r.l_h, r.l_e));
            }
            (serde_json::to_value(&rows).expect("serializes"), text)
        }
    };
    Ok(Output::new(text, json, EXIT_PASS))
}

pub fn cmd_verify_paper(n: usize, seed: u64, timings: bool) -> CliResult<Output> {
    let r = verify::verify_paper(n, seed, timings)?;
    Ok(Output { text: r.to_text(), json: r.to_json() + "\n", code: r.exit_code() })
}
