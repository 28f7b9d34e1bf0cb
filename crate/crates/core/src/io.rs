//! JSON wire formats.
//!
//! Scalars are strings (`"3"`, `"-1/2"`); integers are accepted on input.
//! Degrees are string keys. `X_∞` is written as the index `"inf"`.
//! Parsers enforce size limits and never panic on malformed input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complexes::{Complex, ModMap, Term};
use crate::decomp::{FormalObject, Size, Summand};
use crate::endofunctors::{CoeffAssignment, Window};
use crate::error::FormatError;
use crate::homspace::SymMorphism;
use crate::linalg::{DualMatrix, DualScalar, Field, FieldElem, FieldMatrix, Matrix};
use crate::stability::{GroupElem, StabilityCondition};

pub const MAX_INPUT_BYTES: usize = 1 << 20;
pub const MAX_DEGREES: usize = 256;
pub const MAX_RANK: usize = 256;
pub const MAX_ABS_DEGREE: i32 = 100_000;
pub const MAX_SUMMANDS: usize = 1024;
pub const MAX_MULTIPLICITY: usize = 1024;
pub const MAX_INDEX: usize = 10_000;
pub const MAX_WINDOW: usize = 64;

type Res<T> = std::result::Result<T, FormatError>;

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

fn from_text<T: for<'de> Deserialize<'de>>(text: &str) -> Res<T> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(invalid(format!("input exceeds {MAX_INPUT_BYTES} bytes")));
    }
    let v: Value = serde_json::from_str(text)?;
    if !v.is_object() {
        return Err(invalid("expected a JSON object"));
    }
    Ok(serde_json::from_value(v)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarWire {
    Int(i64),
    Text(String),
}

impl ScalarWire {
    fn parse(&self, k: Field) -> Res<FieldElem> {
        match self {
            ScalarWire::Int(n) => Ok(k.from_i64(*n)),
            ScalarWire::Text(s) => k.parse(s),
        }
    }
}

fn scalar_out(x: &FieldElem) -> Value {
    Value::String(x.to_string())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DualWire {
    #[serde(default)]
    a: Option<ScalarWire>,
    #[serde(default)]
    b: Option<ScalarWire>,
}

impl DualWire {
    fn parse(&self, k: Field) -> Res<DualScalar> {
        let part = |s: &Option<ScalarWire>| s.as_ref().map_or(Ok(k.zero()), |s| s.parse(k));
        Ok(DualScalar::new(part(&self.a)?, part(&self.b)?))
    }
}

pub fn dual_to_json(x: &DualScalar) -> Value {
    json!({ "a": scalar_out(&x.a), "b": scalar_out(&x.b) })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum IndexWire {
    Int(u64),
    Text(String),
}

/// Parses `"inf"` or a positive integer.
pub fn parse_size(s: &str) -> Res<Size> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Size::Inf);
    }
    match s.parse::<usize>() {
        Ok(n) if (1..=MAX_INDEX).contains(&n) => Ok(Size::Finite(n)),
        _ => Err(FormatError::BadIndex(s.chars().take(32).collect())),
    }
}

impl IndexWire {
    fn parse(&self) -> Res<Size> {
        match self {
            IndexWire::Int(n) => parse_size(&n.to_string()),
            IndexWire::Text(s) => parse_size(s),
        }
    }
}

pub fn size_to_json(s: Size) -> Value {
    match s {
        Size::Finite(i) => json!(i),
        Size::Inf => json!("inf"),
    }
}

fn parse_degree(s: &str) -> Res<i32> {
    match s.trim().parse::<i32>() {
        Ok(n) if n.abs() <= MAX_ABS_DEGREE => Ok(n),
        _ => Err(invalid(format!("bad degree key `{}`", s.chars().take(32).collect::<String>()))),
    }
}

fn field_matrix(k: Field, rows: usize, cols: usize, data: &[Vec<ScalarWire>], what: &str) -> Res<FieldMatrix> {
    if data.is_empty() {
        return Ok(Matrix::zeros(k, rows, cols));
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(invalid(format!("{what} must be {rows}x{cols}")));
    }
    let entries = data.iter().flatten().map(|x| x.parse(k)).collect::<Res<Vec<_>>>()?;
    Matrix::from_vec(k, rows, cols, entries).map_err(|e| invalid(e.to_string()))
}

fn dual_matrix(k: Field, rows: usize, cols: usize, data: &[Vec<DualWire>], what: &str) -> Res<DualMatrix> {
    if data.is_empty() {
        return Ok(Matrix::zeros(k, rows, cols));
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(invalid(format!("{what} must be {rows}x{cols}")));
    }
    let entries = data.iter().flatten().map(|x| x.parse(k)).collect::<Res<Vec<_>>>()?;
    Matrix::from_vec(k, rows, cols, entries).map_err(|e| invalid(e.to_string()))
}

fn field_matrix_out(m: &FieldMatrix) -> Value {
    (0..m.rows()).map(|r| m.row(r).iter().map(scalar_out).collect::<Vec<_>>()).collect()
}

fn dual_matrix_out(m: &DualMatrix) -> Value {
    (0..m.rows()).map(|r| m.row(r).iter().map(dual_to_json).collect::<Vec<_>>()).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypedDiffWire {
    #[serde(default)]
    a_to_a: Vec<Vec<DualWire>>,
    #[serde(default)]
    a_to_k: Vec<Vec<ScalarWire>>,
    #[serde(default)]
    k_to_a: Vec<Vec<ScalarWire>>,
    #[serde(default)]
    k_to_k: Vec<Vec<ScalarWire>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DiffWire {
    Free(Vec<Vec<DualWire>>),
    Typed(TypedDiffWire),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexWire {
    #[serde(default)]
    ranks: BTreeMap<String, usize>,
    #[serde(default)]
    diffs: BTreeMap<String, DiffWire>,
    #[serde(default)]
    kterms: BTreeMap<String, usize>,
}

/// Parses a complex. Shapes are checked; `d² = 0` is not.
pub fn complex_from_json(k: Field, text: &str) -> Res<Complex> {
    let w: ComplexWire = from_text(text)?;
    let mut terms: BTreeMap<i32, Term> = BTreeMap::new();
    for (key, &r) in &w.ranks {
        check_rank(r)?;
        terms.entry(parse_degree(key)?).or_default().free = r;
    }
    for (key, &t) in &w.kterms {
        check_rank(t)?;
        terms.entry(parse_degree(key)?).or_default().kdim = t;
    }
    if terms.len() > MAX_DEGREES {
        return Err(invalid(format!("more than {MAX_DEGREES} degrees")));
    }
    let mut diffs = BTreeMap::new();
    for (key, d) in &w.diffs {
        let n = parse_degree(key)?;
        let (s, t) = (
            terms.get(&n).copied().unwrap_or_default(),
            terms.get(&(n + 1)).copied().unwrap_or_default(),
        );
        let what = |b: &str| format!("d^{n} block {b}");
        let m = match d {
            DiffWire::Free(rows) => {
                let aa = dual_matrix(k, t.free, s.free, rows, &what("a_to_a"))?;
                ModMap::from_blocks(
                    aa,
                    Matrix::zeros(k, t.kdim, s.free),
                    Matrix::zeros(k, t.free, s.kdim),
                    Matrix::zeros(k, t.kdim, s.kdim),
                )
            }
            DiffWire::Typed(b) => ModMap::from_blocks(
                dual_matrix(k, t.free, s.free, &b.a_to_a, &what("a_to_a"))?,
                field_matrix(k, t.kdim, s.free, &b.a_to_k, &what("a_to_k"))?,
                field_matrix(k, t.free, s.kdim, &b.k_to_a, &what("k_to_a"))?,
                field_matrix(k, t.kdim, s.kdim, &b.k_to_k, &what("k_to_k"))?,
            ),
        }
        .map_err(|e| invalid(e.to_string()))?;
        diffs.insert(n, m);
    }
    Complex::new(k, terms, diffs).map_err(|e| invalid(e.to_string()))
}

fn check_rank(r: usize) -> Res<()> {
    if r > MAX_RANK {
        return Err(invalid(format!("rank {r} exceeds {MAX_RANK}")));
    }
    Ok(())
}

pub fn complex_to_json(c: &Complex) -> Value {
    let free = c.is_free();
    let mut ranks = serde_json::Map::new();
    let mut kterms = serde_json::Map::new();
    for (n, t) in c.terms() {
        if t.free > 0 {
            ranks.insert(n.to_string(), json!(t.free));
        }
        if t.kdim > 0 {
            kterms.insert(n.to_string(), json!(t.kdim));
        }
    }
    let mut diffs = serde_json::Map::new();
    for (n, d) in c.diffs() {
        let v = if free {
            dual_matrix_out(&d.a_to_a)
        } else {
            json!({
                "a_to_a": dual_matrix_out(&d.a_to_a),
                "a_to_k": field_matrix_out(&d.a_to_k),
                "k_to_a": field_matrix_out(&d.k_to_a),
                "k_to_k": field_matrix_out(&d.k_to_k),
            })
        };
        diffs.insert(n.to_string(), v);
    }
    let mut out = json!({ "ranks": ranks, "diffs": diffs });
    if !free {
        out["kterms"] = Value::Object(kterms);
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummandWire {
    i: IndexWire,
    h: i32,
    #[serde(default = "one")]
    m: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormalWire {
    summands: Vec<SummandWire>,
}

fn formal_from_wire(w: &FormalWire) -> Res<FormalObject> {
    if w.summands.len() > MAX_SUMMANDS {
        return Err(invalid(format!("more than {MAX_SUMMANDS} summands")));
    }
    let mut out = Vec::with_capacity(w.summands.len());
    for s in &w.summands {
        if s.h.abs() > MAX_ABS_DEGREE || s.m > MAX_MULTIPLICITY {
            return Err(invalid(format!("summand out of range (h={}, m={})", s.h, s.m)));
        }
        out.push(Summand {
            i: s.i.parse()?,
            h: s.h,
            m: s.m,
        });
    }
    let f = FormalObject::new(out);
    if f.summands().iter().map(|s| s.m).sum::<usize>() > MAX_MULTIPLICITY {
        return Err(invalid(format!("total multiplicity exceeds {MAX_MULTIPLICITY}")));
    }
    Ok(f)
}

pub fn formal_from_json(text: &str) -> Res<FormalObject> {
    formal_from_wire(&from_text(text)?)
}

pub fn formal_to_json(f: &FormalObject) -> Value {
    let s: Vec<Value> = f
        .summands()
        .iter()
        .map(|s| json!({ "i": size_to_json(s.i), "h": s.h, "m": s.m }))
        .collect();
    json!({ "summands": s })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockWire {
    from: usize,
    to: usize,
    #[serde(default)]
    a: Option<ScalarWire>,
    #[serde(default)]
    b: Option<ScalarWire>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymWire {
    source: FormalWire,
    target: FormalWire,
    #[serde(default)]
    blocks: Vec<BlockWire>,
}

pub fn sym_from_json(k: Field, text: &str) -> Res<SymMorphism> {
    let w: SymWire = from_text(text)?;
    let source = formal_from_wire(&w.source)?;
    let target = formal_from_wire(&w.target)?;
    let part = |s: &Option<ScalarWire>| s.as_ref().map_or(Ok(k.zero()), |s| s.parse(k));
    let blocks = w
        .blocks
        .iter()
        .map(|b| Ok(((b.from, b.to), (part(&b.a)?, part(&b.b)?))))
        .collect::<Res<Vec<_>>>()?;
    SymMorphism::new(k, source, target, blocks).map_err(|e| invalid(e.to_string()))
}

pub fn sym_to_json(m: &SymMorphism) -> Value {
    let blocks: Vec<Value> = m
        .blocks()
        .iter()
        .map(|(&(from, to), (a, b))| json!({ "from": from, "to": to, "a": scalar_out(a), "b": scalar_out(b) }))
        .collect();
    json!({
        "source": formal_to_json(m.source()),
        "target": formal_to_json(m.target()),
        "blocks": blocks,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowWire {
    imax: usize,
    amax: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffWire {
    i: usize,
    j: usize,
    alpha: i32,
    value: ScalarWire,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentWire {
    #[serde(default)]
    shift: i32,
    window: WindowWire,
    coeffs: Vec<CoeffWire>,
}

pub fn assignment_from_json(k: Field, text: &str) -> Res<CoeffAssignment> {
    let w: AssignmentWire = from_text(text)?;
    if w.window.imax == 0 || w.window.imax > MAX_WINDOW || w.window.amax < 0 || w.window.amax as usize > MAX_WINDOW {
        return Err(invalid(format!("window must satisfy 1 ≤ imax ≤ {MAX_WINDOW}, 0 ≤ amax ≤ {MAX_WINDOW}")));
    }
    if w.shift.abs() > MAX_ABS_DEGREE {
        return Err(invalid("shift out of range"));
    }
    let window = Window {
        imax: w.window.imax,
        amax: w.window.amax,
    };
    let mut coeffs = BTreeMap::new();
    for c in &w.coeffs {
        if coeffs.insert((c.i, c.j, c.alpha), c.value.parse(k)?).is_some() {
            return Err(invalid(format!("duplicate coefficient ({}, {}, {})", c.i, c.j, c.alpha)));
        }
    }
    CoeffAssignment::new(k, w.shift, window, coeffs).map_err(|e| invalid(e.to_string()))
}

pub fn assignment_to_json(c: &CoeffAssignment) -> Value {
    let coeffs: Vec<Value> = c
        .coeffs
        .iter()
        .map(|(&(i, j, alpha), v)| json!({ "i": i, "j": j, "alpha": alpha, "value": scalar_out(v) }))
        .collect();
    json!({
        "shift": c.shift,
        "window": { "imax": c.window.imax, "amax": c.window.amax },
        "coeffs": coeffs,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaWire {
    h: i32,
    mass: f64,
    phi: f64,
}

pub fn sigma_from_json(text: &str) -> Res<StabilityCondition> {
    let w: SigmaWire = from_text(text)?;
    StabilityCondition::new(w.h, w.mass, w.phi).map_err(|e| invalid(e.to_string()))
}

pub fn sigma_to_json(s: &StabilityCondition) -> Value {
    json!({ "h": s.h, "mass": s.mass, "phi": s.phi })
}

/// Parses the compact form `h,mass,phi`.
pub fn parse_sigma(s: &str) -> Res<StabilityCondition> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || invalid(format!("expected h,mass,phi, got `{}`", s.chars().take(64).collect::<String>()));
    let [h, m, p] = parts.as_slice() else {
        return Err(bad());
    };
    let h: i32 = h.parse().map_err(|_| bad())?;
    if h.abs() > MAX_ABS_DEGREE {
        return Err(bad());
    }
    let mass = parse_real(m).ok_or_else(bad)?;
    let phi = parse_real(p).ok_or_else(bad)?;
    StabilityCondition::new(h, mass, phi).map_err(|e| invalid(e.to_string()))
}

/// A float, or a fraction `p/q` of floats.
pub fn parse_real(s: &str) -> Option<f64> {
    let x = match s.split_once('/') {
        Some((n, d)) => n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?,
        None => s.trim().parse::<f64>().ok()?,
    };
    x.is_finite().then_some(x)
}

/// Parses `kappa,theta`.
pub fn parse_group_elem(s: &str) -> Res<GroupElem> {
    let bad = || invalid(format!("expected kappa,theta, got `{}`", s.chars().take(64).collect::<String>()));
    let (k, t) = s.split_once(',').ok_or_else(bad)?;
    GroupElem::new(parse_real(k).ok_or_else(bad)?, parse_real(t).ok_or_else(bad)?).map_err(|e| invalid(e.to_string()))
}

pub fn group_elem_to_json(g: &GroupElem) -> Value {
    json!({ "kappa": g.kappa, "theta": g.theta })
}

pub fn complex_number_to_json(z: num_complex::Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Field {
        Field::Prime(7)
    }

    #[test]
    fn complex_roundtrip() {
        let text = r#"{"ranks": {"-2": 1, "-1": 1}, "diffs": {"-2": [[{"a":"0","b":"1"}]]}}"#;
        let c = complex_from_json(k(), text).unwrap();
        assert_eq!(c, Complex::indecomposable(k(), 2, 0));
        let back = complex_from_json(k(), &complex_to_json(&c).to_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn module_complex_roundtrip() {
        let text = r#"{"ranks": {"-1": 1}, "kterms": {"0": 1}, "diffs": {"-1": {"a_to_k": [["1"]]}}}"#;
        let c = complex_from_json(k(), text).unwrap();
        assert!(!c.is_free());
        assert!(c.validate().is_ok());
        assert_eq!(complex_from_json(k(), &complex_to_json(&c).to_string()).unwrap(), c);
    }

    #[test]
    fn complex_errors() {
        for bad in [
            "",
            "[]",
            r#"{"ranks": {"x": 1}}"#,
            r#"{"ranks": {"0": 100000}}"#,
            r#"{"ranks": {"-2": 1, "-1": 1}, "diffs": {"-2": [[{"a":"0","b":"1"}, {"a":"1"}]]}}"#,
            r#"{"ranks": {"0": 1}, "bogus": 1}"#,
            r#"{"ranks": {"-2": 1, "-1": 1}, "diffs": {"-2": [[{"a":"1/7"}]]}}"#,
        ] {
            assert!(complex_from_json(k(), bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formal_roundtrip() {
        let text = r#"{"summands": [{"i": 3, "h": 0, "m": 1}, {"i": "inf", "h": 2, "m": 1}]}"#;
        let f = formal_from_json(text).unwrap();
        assert_eq!(f.to_string(), "X_3[0] + X_inf[2]");
        assert_eq!(formal_from_json(&formal_to_json(&f).to_string()).unwrap(), f);
        assert!(formal_from_json(r#"{"summands": [{"i": 0, "h": 0}]}"#).is_err());
        assert!(formal_from_json(r#"{"summands": [{"i": "infinity", "h": 0}]}"#).is_err());
    }

    #[test]
    fn sym_roundtrip() {
        let text = r#"{"source": {"summands": [{"i": 1, "h": 0, "m": 1}]},
                       "target": {"summands": [{"i": 1, "h": 0, "m": 1}]},
                       "blocks": [{"from": 0, "to": 0, "a": "1", "b": "3"}]}"#;
        let m = sym_from_json(k(), text).unwrap();
        assert_eq!(sym_from_json(k(), &sym_to_json(&m).to_string()).unwrap(), m);
        let bad = text.replace(r#""to": 0"#, r#""to": 5"#);
        assert!(sym_from_json(k(), &bad).is_err());
    }

    #[test]
    fn assignment_roundtrip() {
        let c = CoeffAssignment::lambda(&k().from_i64(2), Window { imax: 3, amax: 2 }).unwrap();
        let back = assignment_from_json(k(), &assignment_to_json(&c).to_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sigma_formats() {
        let s = parse_sigma("0,1,1/2").unwrap();
        assert_eq!((s.h, s.mass, s.phi), (0, 1.0, 0.5));
        assert_eq!(sigma_from_json(&sigma_to_json(&s).to_string()).unwrap(), s);
        assert!(parse_sigma("0,1,0").is_err());
        assert!(parse_sigma("0,-1,0.5").is_err());
        assert!(parse_sigma("0,1").is_err());
        assert!(parse_group_elem("1,nan").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("inf").unwrap(), Size::Inf);
        assert_eq!(parse_size("4").unwrap(), Size::Finite(4));
        assert!(parse_size("0").is_err());
        assert!(parse_size("-1").is_err());
    }
}
