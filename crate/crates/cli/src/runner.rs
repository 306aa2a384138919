//! Validation and execution of a parsed script, producing the JSON report.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use torfib::algebra::{fiber_product, Element, FiniteLocalAlgebra};
use torfib::corpus::CorpusParams;
use torfib::exactla::PrimeField;
use torfib::fdmodule::{AlgebraMatrix, FdModule};
use torfib::gradedhyp::verify_dvr_example;
use torfib::resolution::DEFAULT_LIMIT;
use torfib::scan::{scan, ScanOptions};
use torfib::tor::tor_from_resolution;
use torfib::Error;

use crate::cache::ResolutionCache;
use crate::dsl::{parse, Diagnostic, InputModel, Monomial, Poly, Statement};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "torfib";
pub const DEFAULT_DVR_PRIME: u32 = 5;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Scan worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Highest Tor degree examined by `scan`.
    pub resolution_bound: usize,
    /// Replaces the seed of every `scan` statement.
    pub seed: Option<u64>,
    /// Cap on `β_i · dim A` for `resolve` and `tor`.
    pub limit: usize,
    pub cache: ResolutionCache,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: 0,
            resolution_bound: ScanOptions::default().bound,
            seed: None,
            limit: DEFAULT_LIMIT,
            cache: ResolutionCache::disabled(),
        }
    }
}

/// Why a run stopped before producing a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    pub message: String,
}

impl CliError {
    pub fn input(line: usize, column: usize, message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "input",
            line: Some(line),
            column: Some(column),
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "usage",
            line: None,
            column: None,
            message: message.into(),
        }
    }

    fn core(line: usize, e: Error) -> Self {
        let (code, kind) = match e {
            Error::Resource(_) => (3, "resource"),
            Error::Invariant(_) | Error::SplitFailure(_) | Error::Consistency(_) => (1, "consistency"),
            _ => (2, "input"),
        };
        CliError {
            code,
            kind,
            line: Some(line),
            column: None,
            message: e.to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self })
    }
}

impl From<Diagnostic> for CliError {
    fn from(d: Diagnostic) -> Self {
        CliError::input(d.line, d.column, d.message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// One line of the flat CSV view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsvRow {
    pub kind: String,
    pub subject: String,
    pub other: String,
    pub index: usize,
    pub value: usize,
}

impl CsvRow {
    fn new(kind: &str, subject: &str, other: &str, index: usize, value: usize) -> Self {
        CsvRow {
            kind: kind.into(),
            subject: subject.into(),
            other: other.into(),
            index,
            value,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub document: Value,
    pub csv: Vec<CsvRow>,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// The document without its timing block.
    pub fn deterministic_part(&self) -> Value {
        let mut d = self.document.clone();
        if let Some(o) = d.as_object_mut() {
            o.remove("timing");
        }
        d
    }
}

pub fn input_digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Column of the first occurrence of `name` as a whole word after the
/// leading keyword, or 1.
fn column_of(source: &str, line: usize, name: &str) -> usize {
    let Some(text) = source.lines().nth(line - 1) else {
        return 1;
    };
    let text = text.split('#').next().unwrap_or("");
    let chars: Vec<char> = text.chars().collect();
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut i = 0;
    let mut first = true;
    while i < chars.len() {
        if word(chars[i]) {
            let start = i;
            while i < chars.len() && word(chars[i]) {
                i += 1;
            }
            let w: String = chars[start..i].iter().collect();
            if !first && w == name {
                return start + 1;
            }
            first = false;
        } else {
            i += 1;
        }
    }
    1
}

fn monomial_vars(m: &Monomial) -> impl Iterator<Item = &String> {
    m.iter().map(|(v, _)| v)
}

fn poly_vars(p: &Poly) -> impl Iterator<Item = &String> {
    p.terms.iter().flat_map(|t| monomial_vars(&t.vars))
}

/// Names resolve, names are unique, variables belong to their ring, and a
/// field is declared before any ring.
pub fn check(model: &InputModel, source: &str) -> Result<(), CliError> {
    let mut field: Option<u32> = None;
    let mut rings: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut modules: HashMap<&str, &str> = HashMap::new();
    for s in &model.statements {
        let line = s.line;
        let at = |name: &str, msg: String| CliError::input(line, column_of(source, line, name), msg);
        let fresh = |name: &str, rings: &HashMap<&str, Vec<&str>>, modules: &HashMap<&str, &str>| {
            if rings.contains_key(name) || modules.contains_key(name) {
                Err(at(name, format!("`{name}` is already defined")))
            } else {
                Ok(())
            }
        };
        match &s.stmt {
            Statement::Field { p } => {
                if field.is_some() {
                    return Err(CliError::input(line, 1, "the field is declared twice"));
                }
                PrimeField::new(*p).map_err(|e| CliError::input(line, 7, e.to_string()))?;
                field = Some(*p);
            }
            Statement::Ring { name, vars, rels } => {
                if field.is_none() {
                    return Err(CliError::input(line, 1, "declare `field <p>` before any ring"));
                }
                fresh(name, &rings, &modules)?;
                let mut seen = HashSet::new();
                for v in vars {
                    if !seen.insert(v.as_str()) {
                        return Err(at(v, format!("variable `{v}` is listed twice")));
                    }
                }
                for r in rels {
                    if let Some(v) = monomial_vars(r).find(|v| !seen.contains(v.as_str())) {
                        return Err(at(v, format!("`{v}` is not a variable of `{name}`")));
                    }
                }
                rings.insert(name, vars.iter().map(String::as_str).collect());
            }
            Statement::Fiber { name, left, right } => {
                fresh(name, &rings, &modules)?;
                for r in [left, right] {
                    if !rings.contains_key(r.as_str()) {
                        return Err(at(r, format!("unknown ring `{r}`")));
                    }
                }
                let mut vars = rings[left.as_str()].clone();
                if let Some(v) = rings[right.as_str()].iter().find(|v| vars.contains(v)) {
                    return Err(at(right, format!("`{left}` and `{right}` share the variable `{v}`")));
                }
                vars.extend(rings[right.as_str()].iter().copied());
                rings.insert(name, vars);
            }
            Statement::Module { name, ring, rows } => {
                fresh(name, &rings, &modules)?;
                let Some(vars) = rings.get(ring.as_str()) else {
                    return Err(at(ring, format!("unknown ring `{ring}`")));
                };
                for p in rows.iter().flatten() {
                    if let Some(v) = poly_vars(p).find(|v| !vars.contains(&v.as_str())) {
                        return Err(at(v, format!("`{v}` is not a variable of `{ring}`")));
                    }
                }
                modules.insert(name, ring);
            }
            Statement::Resolve { module, .. } => {
                if !modules.contains_key(module.as_str()) {
                    return Err(at(module, format!("unknown module `{module}`")));
                }
            }
            Statement::Tor { left, right, .. } => {
                for m in [left, right] {
                    if !modules.contains_key(m.as_str()) {
                        return Err(at(m, format!("unknown module `{m}`")));
                    }
                }
                if modules[left.as_str()] != modules[right.as_str()] {
                    return Err(at(
                        right,
                        format!("`{left}` and `{right}` are modules over different rings"),
                    ));
                }
            }
            Statement::Scan { .. } | Statement::VerifyDvr { .. } => {}
        }
    }
    Ok(())
}

fn element(a: &FiniteLocalAlgebra, p: &Poly) -> Element {
    let f = a.field();
    let mut acc = a.zero();
    for t in &p.terms {
        let mut m = a.scalar(f.reduce(t.coeff));
        for (v, e) in &t.vars {
            // A variable absent from the generators is zero in the quotient.
            let g = a.generator(v).cloned().unwrap_or_else(|| a.zero());
            m = a.mul(&m, &a.pow(&g, *e));
        }
        acc = a.add(&acc, &m);
    }
    acc
}

fn exponents(vars: &[String], m: &Monomial) -> Vec<u32> {
    let mut e = vec![0; vars.len()];
    for (v, k) in m {
        let i = vars.iter().position(|w| w == v).expect("checked variable");
        e[i] += k;
    }
    e
}

struct Env {
    field: Option<PrimeField>,
    rings: HashMap<String, Arc<FiniteLocalAlgebra>>,
    modules: HashMap<String, FdModule>,
}

fn stmt_kind(s: &Statement) -> &'static str {
    match s {
        Statement::Field { .. } => "field",
        Statement::Ring { .. } => "ring",
        Statement::Fiber { .. } => "fiber",
        Statement::Module { .. } => "module",
        Statement::Resolve { .. } => "resolve",
        Statement::Tor { .. } => "tor",
        Statement::Scan { .. } => "scan",
        Statement::VerifyDvr { .. } => "verify",
    }
}

pub fn run_model(model: &InputModel, source: &str, opts: &RunOptions) -> Result<Report, CliError> {
    check(model, source)?;
    if !(1..=CorpusParams::default().depth).contains(&opts.resolution_bound) {
        return Err(CliError::usage(format!(
            "--resolution-bound must be between 1 and {}",
            CorpusParams::default().depth
        )));
    }
    let started = Instant::now();
    let mut env = Env {
        field: None,
        rings: HashMap::new(),
        modules: HashMap::new(),
    };
    let mut definitions = Vec::new();
    let mut results = Vec::new();
    let mut timings = Vec::new();
    let mut csv = Vec::new();
    let mut passed = true;
    for s in &model.statements {
        let line = s.line;
        let err = |e: Error| CliError::core(line, e);
        let t0 = Instant::now();
        match &s.stmt {
            Statement::Field { p } => {
                env.field = Some(PrimeField::new(*p).map_err(err)?);
            }
            Statement::Ring { name, vars, rels } => {
                let f = env.field.expect("checked field");
                let names: Vec<&str> = vars.iter().map(String::as_str).collect();
                let rels: Vec<Vec<u32>> = rels.iter().map(|r| exponents(vars, r)).collect();
                let a = FiniteLocalAlgebra::monomial_quotient(f, &names, &rels).map_err(err)?;
                definitions.push(json!({
                    "name": name, "kind": "ring", "dim": a.dim(), "embedding_dim": a.embedding_dim(),
                }));
                env.rings.insert(name.clone(), Arc::new(a));
            }
            Statement::Fiber { name, left, right } => {
                let fp = fiber_product(env.rings[left].clone(), env.rings[right].clone()).map_err(err)?;
                definitions.push(json!({
                    "name": name, "kind": "fiber", "dim": fp.r.dim(), "left": left, "right": right,
                }));
                env.rings.insert(name.clone(), fp.r.clone());
            }
            Statement::Module { name, ring, rows } => {
                let a = env.rings[ring].clone();
                let entries: Vec<Vec<Element>> =
                    rows.iter().map(|r| r.iter().map(|p| element(&a, p)).collect()).collect();
                let pres = AlgebraMatrix::from_entries(a.dim(), &entries).map_err(err)?;
                let m = FdModule::from_presentation(a, &pres).map_err(err)?;
                definitions.push(json!({
                    "name": name, "kind": "module", "ring": ring, "dim": m.dim(), "generators": m.betti0(),
                }));
                env.modules.insert(name.clone(), m);
            }
            Statement::Resolve { module, length } => {
                let m = &env.modules[module];
                let res = opts.cache.resolve(m, *length, opts.limit).map_err(err)?;
                for (i, &b) in res.betti().iter().enumerate() {
                    csv.push(CsvRow::new("betti", module, "", i, b));
                }
                for (i, &d) in res.syzygy_dims().iter().enumerate() {
                    csv.push(CsvRow::new("syzygy_dim", module, "", i, d));
                }
                results.push(json!({
                    "line": line, "command": "resolve", "module": module, "length": length,
                    "betti": res.betti(), "syzygy_dims": res.syzygy_dims(),
                    "pd": res.projective_dimension(), "terminated": res.terminated(),
                }));
            }
            Statement::Tor { left, right, max } => {
                let (m, n) = (&env.modules[left], &env.modules[right]);
                let rm = opts.cache.resolve(m, *max, opts.limit).map_err(err)?;
                let rn = opts.cache.resolve(n, *max, opts.limit).map_err(err)?;
                let dims = tor_from_resolution(&rm, n, *max).map_err(err)?;
                let other = tor_from_resolution(&rn, m, *max).map_err(err)?;
                let balanced = dims == other;
                passed &= balanced;
                for (i, &d) in dims.iter().enumerate() {
                    csv.push(CsvRow::new("tor", left, right, i, d));
                }
                let mut tor = json!({ "dims": dims, "balanced": balanced });
                if !balanced {
                    tor["right_resolved"] = json!(other);
                }
                results.push(json!({
                    "line": line, "command": "tor", "left": left, "right": right, "max": max, "tor": tor,
                }));
            }
            Statement::Scan { seed, count } => {
                let params = CorpusParams {
                    seed: opts.seed.unwrap_or(*seed),
                    count: *count,
                    p: env.field.map_or(CorpusParams::default().p, PrimeField::modulus),
                    ..CorpusParams::default()
                };
                let so = ScanOptions {
                    bound: opts.resolution_bound,
                    jobs: opts.jobs,
                };
                let report = scan(&params, &so).map_err(err)?;
                passed &= report.passed;
                for (name, t) in &report.checks {
                    for (field, v) in [("pass", t.pass), ("fail", t.fail), ("inapplicable", t.inapplicable), ("hits", t.hits)] {
                        csv.push(CsvRow::new("scan", name, field, 0, v));
                    }
                }
                results.push(json!({
                    "line": line, "command": "scan", "seed": params.seed, "count": count, "report": report,
                }));
            }
            Statement::VerifyDvr { degree } => {
                let p = env.field.map_or(DEFAULT_DVR_PRIME, PrimeField::modulus);
                let report = verify_dvr_example(p, *degree).map_err(err)?;
                passed &= report.passed();
                for (pair, dims) in &report.tor {
                    let (a, b) = pair.split_once(',').unwrap_or((pair, ""));
                    for (i, &d) in dims.iter().enumerate() {
                        csv.push(CsvRow::new("graded_tor", a, b, i + 1, d));
                    }
                }
                results.push(json!({
                    "line": line, "command": "verify", "degree": degree, "dvr_example": report,
                }));
            }
        }
        timings.push(json!({
            "line": line,
            "command": stmt_kind(&s.stmt),
            "ms": t0.elapsed().as_secs_f64() * 1e3,
        }));
    }
    let document = json!({
        "schema": SCHEMA_VERSION,
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "input_digest": input_digest(source),
        "options": {
            "resolution_bound": opts.resolution_bound,
            "seed": opts.seed,
        },
        "definitions": definitions,
        "results": results,
        "status": if passed { "pass" } else { "fail" },
        "timing": {
            "total_ms": started.elapsed().as_secs_f64() * 1e3,
            "statements": timings,
        },
    });
    Ok(Report {
        document,
        csv,
        passed,
    })
}

pub fn run_text(source: &str, opts: &RunOptions) -> Result<Report, CliError> {
    let model = parse(source)?;
    run_model(&model, source, opts)
}

pub fn write_csv(rows: &[CsvRow], w: impl std::io::Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(["kind", "subject", "other", "index", "value"])?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANONICAL: &str = "field 5
ring S vars x rel x^3
ring T vars y z rel y^2 y*z z^2
fiber R = S * T
module M over R coker [ x , y ]
module N over R coker [ x^2 , z ]
";

    #[test]
    fn canonical_tor_is_balanced() {
        let r = run_text(&format!("{CANONICAL}tor M N max 6\nresolve M len 4\n"), &RunOptions::default()).unwrap();
        assert!(r.passed);
        let tor = &r.document["results"][0]["tor"];
        assert_eq!(tor["dims"].as_array().unwrap().len(), 7);
        assert_eq!(tor["balanced"], json!(true));
        assert_eq!(r.document["definitions"][2]["dim"], json!(5));
        assert_eq!(r.document["results"][1]["betti"][0], json!(1));
    }

    #[test]
    fn semantic_errors_point_at_the_name() {
        let e = run_text("field 5\nring S vars x rel x^2\nmodule M over Q coker [ x ]\n", &RunOptions::default()).unwrap_err();
        assert_eq!((e.code, e.line, e.column), (2, Some(3), Some(15)));
        let e = run_text("field 5\nring S vars x rel x^2\nmodule M over S coker [ y ]\n", &RunOptions::default()).unwrap_err();
        assert_eq!(e.column, Some(25));
        let e = run_text("ring S vars x rel x^2\n", &RunOptions::default()).unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = run_text("field 6\n", &RunOptions::default()).unwrap_err();
        assert_eq!(e.code, 2);
        let e = run_text("field 5\nring S vars x rel x^2\nring T vars x rel x^3\nfiber R = S * T\n", &RunOptions::default()).unwrap_err();
        assert!(e.message.contains("share"), "{e}");
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let e = run_text("field 5\nring S vars x y rel x^2\n", &RunOptions::default()).unwrap_err();
        assert_eq!((e.code, e.line), (2, Some(2)));
        let opts = RunOptions {
            limit: 10,
            ..RunOptions::default()
        };
        let e = run_text(&format!("{CANONICAL}resolve M len 6\n"), &opts).unwrap_err();
        assert_eq!(e.code, 3);
    }

    #[test]
    fn report_is_deterministic_apart_from_timing() {
        let text = format!("{CANONICAL}tor N M max 3\nverify dvr-example degree 12\n");
        let a = run_text(&text, &RunOptions::default()).unwrap();
        let b = run_text(&text, &RunOptions::default()).unwrap();
        assert_eq!(a.deterministic_part().to_string(), b.deterministic_part().to_string());
        assert_eq!(a.document["results"][1]["dvr_example"]["status"], json!("pass"));
    }

    #[test]
    fn csv_has_flat_rows() {
        let r = run_text(&format!("{CANONICAL}tor M N max 2\n"), &RunOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&r.csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("kind,subject,other,index,value\ntor,M,N,0,"));
        assert_eq!(text.lines().count(), 4);
    }
}
