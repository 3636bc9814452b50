//! JSON encoding of rings, elements, matrices, modules and input documents.
//!
//! Integers travel as decimal strings (plain JSON integers are accepted on
//! input), rationals as `{"num","den"}`, Gaussian integers as `{"re","im"}`.
//! Matrices are `{"rows","cols","entries"}` with `entries` a list of rows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::limits::{Direction, Tower};
use crate::matrix::Mat;
use crate::module::{FpModule, ModuleInvariants, Morphism};
use crate::ring::{GaussInt, RingDesc, RingElem, RingMap, RingMapKind};

/// A malformed or inconsistent input document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub clause: String,
    pub location: String,
    pub message: String,
}

impl InputError {
    pub fn new(clause: impl Into<String>, location: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { clause: clause.into(), location: location.into(), message: message.into() }
    }

    pub fn from_error(location: impl Into<String>, e: &Error) -> Self {
        InputError::new(e.clause(), location, e.to_string())
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "clause": self.clause, "location": self.location, "message": self.message } })
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.clause, self.location, self.message)
    }
}

pub type InputResult<T> = std::result::Result<T, InputError>;

// ---- rings ----------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RingJson {
    Integers,
    IntegersMod { n: u64 },
    Rationals,
    PrimeField { p: u64 },
    GaussianIntegers,
}

impl From<RingDesc> for RingJson {
    fn from(r: RingDesc) -> Self {
        match r {
            RingDesc::Integers => RingJson::Integers,
            RingDesc::IntegersMod(n) => RingJson::IntegersMod { n },
            RingDesc::Rationals => RingJson::Rationals,
            RingDesc::PrimeField(p) => RingJson::PrimeField { p },
            RingDesc::GaussianIntegers => RingJson::GaussianIntegers,
        }
    }
}

impl RingJson {
    pub fn to_ring(self, location: &str) -> InputResult<RingDesc> {
        let r = match self {
            RingJson::Integers => RingDesc::Integers,
            RingJson::IntegersMod { n } => RingDesc::IntegersMod(n),
            RingJson::Rationals => RingDesc::Rationals,
            RingJson::PrimeField { p } => RingDesc::PrimeField(p),
            RingJson::GaussianIntegers => RingDesc::GaussianIntegers,
        };
        r.validate().map_err(|e| InputError::from_error(location, &e))?;
        Ok(r)
    }
}

/// Short names used on the command line: `Integers`, `IntegersMod(6)`,
/// `Rationals`, `PrimeField(5)`, `GaussianIntegers`.
pub fn ring_name(r: RingDesc) -> String {
    match r {
        RingDesc::Integers => "Integers".into(),
        RingDesc::IntegersMod(n) => format!("IntegersMod({n})"),
        RingDesc::Rationals => "Rationals".into(),
        RingDesc::PrimeField(p) => format!("PrimeField({p})"),
        RingDesc::GaussianIntegers => "GaussianIntegers".into(),
    }
}

pub fn parse_ring_name(s: &str) -> Result<RingDesc, String> {
    let s = s.trim();
    let arg = |prefix: &str| -> Option<Result<u64, String>> {
        let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        Some(u64::from_str(inner.trim()).map_err(|e| format!("bad modulus in `{s}`: {e}")))
    };
    let r = match s {
        "Integers" => RingDesc::Integers,
        "Rationals" => RingDesc::Rationals,
        "GaussianIntegers" => RingDesc::GaussianIntegers,
        _ => {
            if let Some(n) = arg("IntegersMod") {
                RingDesc::IntegersMod(n?)
            } else if let Some(p) = arg("PrimeField") {
                RingDesc::PrimeField(p?)
            } else {
                return Err(format!("unknown ring `{s}`"));
            }
        }
    };
    r.validate().map_err(|e| e.to_string())?;
    Ok(r)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingMapJson {
    pub source: RingJson,
    pub target: RingJson,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub flat: Option<bool>,
    #[serde(default)]
    pub faithfully_flat: Option<bool>,
}

impl RingMapJson {
    pub fn to_map(&self) -> InputResult<RingMap> {
        let source = self.source.to_ring("map.source")?;
        let target = self.target.to_ring("map.target")?;
        let kind = match self.kind.as_deref() {
            None => None,
            Some("embedding") => Some(RingMapKind::Embedding),
            Some("quotient") => Some(RingMapKind::Quotient),
            Some("free_extension") => {
                Some(RingMap::new(source, target).map_err(|e| InputError::from_error("map", &e))?.kind)
            }
            Some(other) => {
                return Err(InputError::new("UnknownRingMapKind", "map.kind", format!("unknown kind `{other}`")))
            }
        };
        RingMap::declared(source, target, kind, self.flat, self.faithfully_flat)
            .map_err(|e| InputError::from_error("map", &e))
    }
}

pub fn ring_map_to_json(m: &RingMap) -> Value {
    let kind = match m.kind {
        RingMapKind::Embedding => json!("embedding"),
        RingMapKind::Quotient => json!("quotient"),
        RingMapKind::FreeExtension { .. } => json!("free_extension"),
    };
    json!({
        "source": RingJson::from(m.source),
        "target": RingJson::from(m.target),
        "kind": kind,
        "flat": m.flat,
        "faithfully_flat": m.faithfully_flat,
    })
}

// ---- elements and matrices ------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IntJson {
    Str(String),
    Num(i64),
}

impl IntJson {
    fn to_bigint(&self, location: &str) -> InputResult<BigInt> {
        match self {
            IntJson::Num(v) => Ok(BigInt::from(*v)),
            IntJson::Str(s) => BigInt::from_str(s.trim())
                .map_err(|_| InputError::new("InvalidInteger", location, format!("`{s}` is not a decimal integer"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ElemJson {
    Int(IntJson),
    Rat { num: IntJson, den: IntJson },
    Gauss { re: IntJson, im: IntJson },
}

impl ElemJson {
    pub fn to_elem(&self, ring: RingDesc, location: &str) -> InputResult<RingElem> {
        match (self, ring) {
            (ElemJson::Int(v), _) => Ok(ring.from_bigint(v.to_bigint(location)?)),
            (ElemJson::Rat { num, den }, RingDesc::Rationals) => {
                let d = den.to_bigint(location)?;
                if d.is_zero() {
                    return Err(InputError::new("DivisionByZero", location, "zero denominator"));
                }
                Ok(RingElem::Rat(BigRational::new(num.to_bigint(location)?, d)))
            }
            (ElemJson::Gauss { re, im }, RingDesc::GaussianIntegers) => {
                Ok(RingElem::Gauss(GaussInt { re: re.to_bigint(location)?, im: im.to_bigint(location)? }))
            }
            _ => Err(InputError::new("RingMismatch", location, format!("element is not in {ring}"))),
        }
    }
}

pub fn elem_to_json(e: &RingElem) -> Value {
    match e {
        RingElem::Int(v) => json!(v.to_string()),
        RingElem::Rat(q) => json!({ "num": q.numer().to_string(), "den": q.denom().to_string() }),
        RingElem::Gauss(g) => json!({ "re": g.re.to_string(), "im": g.im.to_string() }),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ElemJson>>,
}

impl MatJson {
    pub fn to_mat(&self, ring: RingDesc, location: &str) -> InputResult<Mat> {
        if self.entries.len() != self.rows {
            return Err(InputError::new(
                "DimensionMismatch",
                location,
                format!("{} rows declared, {} given", self.rows, self.entries.len()),
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(InputError::new(
                    "DimensionMismatch",
                    format!("{location}.entries[{i}]"),
                    format!("{} columns declared, {} given", self.cols, row.len()),
                ));
            }
            for (j, e) in row.iter().enumerate() {
                entries.push(e.to_elem(ring, &format!("{location}.entries[{i}][{j}]"))?);
            }
        }
        Mat::new(ring, self.rows, self.cols, entries).map_err(|e| InputError::from_error(location, &e))
    }
}

pub fn mat_to_json(m: &Mat) -> Value {
    let entries: Vec<Value> =
        (0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| elem_to_json(m.get(i, j))).collect())).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

/// Parse a matrix given as a JSON value (used for command parameters).
pub fn mat_from_value(v: &Value, ring: RingDesc, location: &str) -> InputResult<Mat> {
    let mj: MatJson = serde_json::from_value(v.clone())
        .map_err(|e| InputError::new("InvalidMatrix", location, e.to_string()))?;
    mj.to_mat(ring, location)
}

pub fn elem_from_value(v: &Value, ring: RingDesc, location: &str) -> InputResult<RingElem> {
    let ej: ElemJson = serde_json::from_value(v.clone())
        .map_err(|e| InputError::new("InvalidElement", location, e.to_string()))?;
    ej.to_elem(ring, location)
}

/// A column vector given as a JSON list of elements.
pub fn vector_from_value(v: &Value, ring: RingDesc, len: usize, location: &str) -> InputResult<Mat> {
    let Value::Array(items) = v else {
        return Err(InputError::new("InvalidVector", location, "expected a list of elements"));
    };
    if items.len() != len {
        return Err(InputError::new(
            "DimensionMismatch",
            location,
            format!("vector of length {} for a module on {len} generators", items.len()),
        ));
    }
    let entries: Vec<RingElem> = items
        .iter()
        .enumerate()
        .map(|(i, x)| elem_from_value(x, ring, &format!("{location}[{i}]")))
        .collect::<InputResult<_>>()?;
    Ok(Mat::column(ring, entries))
}

pub fn vector_to_json(x: &Mat) -> Value {
    Value::Array((0..x.rows()).map(|i| elem_to_json(x.get(i, 0))).collect())
}

pub fn invariants_to_json(inv: &ModuleInvariants) -> Value {
    json!({ "torsion": inv.torsion.iter().map(elem_to_json).collect::<Vec<_>>(), "free_rank": inv.free_rank })
}

pub fn module_to_json(m: &FpModule) -> Value {
    json!({
        "ring": RingJson::from(m.ring()),
        "relations": mat_to_json(m.rels()),
        "invariants": invariants_to_json(m.invariants()),
    })
}

pub fn morphism_to_json(f: &Morphism) -> Value {
    json!({
        "source": mat_to_json(f.source().rels()),
        "target": mat_to_json(f.target().rels()),
        "mat": mat_to_json(f.mat()),
    })
}

// ---- input documents ------------------------------------------------------

/// A JSON object whose keys are names; repeated names are rejected.
#[derive(Clone, Debug)]
pub struct Named<T>(pub Vec<(String, T)>);

impl<T> Default for Named<T> {
    fn default() -> Self {
        Named(Vec::new())
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(std::marker::PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Named<T>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping names to definitions")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Named<T>, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some(k) = map.next_key::<String>()? {
                    if out.iter().any(|(n, _)| n == &k) {
                        return Err(de::Error::custom(format!("duplicate name `{k}`")));
                    }
                    let v = map.next_value()?;
                    out.push((k, v));
                }
                Ok(Named(out))
            }
        }
        d.deserialize_map(V(std::marker::PhantomData))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub source: String,
    pub target: String,
    pub mat: MatJson,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerJson {
    pub object: String,
    pub step: MatJson,
    pub direction: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    #[serde(default)]
    pub ring: Option<RingJson>,
    #[serde(default)]
    pub map: Option<RingMapJson>,
    #[serde(default)]
    pub modules: Named<MatJson>,
    #[serde(default)]
    pub morphisms: Named<MorphismJson>,
    #[serde(default)]
    pub towers: Named<TowerJson>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

/// An input document with every name resolved and type-checked.
#[derive(Clone, Debug)]
pub struct Context {
    pub ring: Option<RingDesc>,
    pub map: Option<RingMap>,
    pub modules: BTreeMap<String, FpModule>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub towers: BTreeMap<String, Tower>,
    pub params: BTreeMap<String, Value>,
}

pub fn parse_document(text: &str) -> InputResult<InputDoc> {
    serde_json::from_str(text).map_err(|e| {
        let clause = match e.classify() {
            serde_json::error::Category::Syntax | serde_json::error::Category::Eof => "MalformedJson",
            _ => "SchemaViolation",
        };
        InputError::new(clause, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

impl InputDoc {
    pub fn resolve(&self) -> InputResult<Context> {
        let map = self.map.as_ref().map(|m| m.to_map()).transpose()?;
        let ring = match (self.ring, map) {
            (Some(r), _) => Some(r.to_ring("ring")?),
            (None, Some(m)) => Some(m.source),
            (None, None) => None,
        };
        if let (Some(r), Some(m)) = (ring, map) {
            if r != m.source {
                return Err(InputError::new("RingMismatch", "map.source", format!("map starts at {} but the ring is {r}", m.source)));
            }
        }
        let mut seen: Vec<&str> = Vec::new();
        for name in self.modules.0.iter().map(|(n, _)| n).chain(self.morphisms.0.iter().map(|(n, _)| n)).chain(self.towers.0.iter().map(|(n, _)| n)) {
            if seen.contains(&name.as_str()) {
                return Err(InputError::new("DuplicateName", name.clone(), format!("name `{name}` is used twice")));
            }
            seen.push(name);
        }
        let need_ring = || {
            ring.ok_or_else(|| InputError::new("MissingRing", "ring", "modules need a `ring` (or a `map`)"))
        };
        let mut modules = BTreeMap::new();
        for (name, mj) in &self.modules.0 {
            let loc = format!("modules.{name}");
            let r = need_ring()?;
            let m = FpModule::new(r, mj.to_mat(r, &loc)?).map_err(|e| InputError::from_error(&loc, &e))?;
            modules.insert(name.clone(), m);
        }
        let lookup = |name: &str, loc: &str| -> InputResult<FpModule> {
            modules
                .get(name)
                .cloned()
                .ok_or_else(|| InputError::new("UnresolvedName", loc, format!("no module named `{name}`")))
        };
        let mut morphisms = BTreeMap::new();
        for (name, fj) in &self.morphisms.0 {
            let loc = format!("morphisms.{name}");
            let src = lookup(&fj.source, &format!("{loc}.source"))?;
            let tgt = lookup(&fj.target, &format!("{loc}.target"))?;
            let mat = fj.mat.to_mat(need_ring()?, &format!("{loc}.mat"))?;
            let f = Morphism::new(&src, &tgt, mat).map_err(|e| InputError::from_error(&loc, &e))?;
            morphisms.insert(name.clone(), f);
        }
        let mut towers = BTreeMap::new();
        for (name, tj) in &self.towers.0 {
            let loc = format!("towers.{name}");
            let obj = lookup(&tj.object, &format!("{loc}.object"))?;
            let direction = match tj.direction.as_str() {
                "forward" => Direction::Forward,
                "backward" => Direction::Backward,
                other => {
                    return Err(InputError::new(
                        "InvalidDirection",
                        format!("{loc}.direction"),
                        format!("`{other}` is neither `forward` nor `backward`"),
                    ))
                }
            };
            let mat = tj.step.to_mat(need_ring()?, &format!("{loc}.step"))?;
            let step = Morphism::new(&obj, &obj, mat).map_err(|e| InputError::from_error(&loc, &e))?;
            let t = Tower::new(step, direction).map_err(|e| InputError::from_error(&loc, &e))?;
            towers.insert(name.clone(), t);
        }
        Ok(Context { ring, map, modules, morphisms, towers, params: self.params.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_round_trip() {
        let cases = [
            (RingDesc::Integers, RingElem::Int(BigInt::from(-12345678901234567890i128))),
            (RingDesc::Rationals, RingElem::Rat(BigRational::new(BigInt::from(-3), BigInt::from(4)))),
            (RingDesc::GaussianIntegers, RingElem::Gauss(GaussInt::new(2, -7))),
            (RingDesc::IntegersMod(6), RingDesc::IntegersMod(6).from_i64(5)),
        ];
        for (ring, e) in cases {
            let v = elem_to_json(&e);
            assert_eq!(elem_from_value(&v, ring, "x").unwrap(), e);
        }
        assert_eq!(elem_to_json(&RingDesc::Integers.from_i64(7)), json!("7"));
        assert_eq!(elem_from_value(&json!(-8), RingDesc::IntegersMod(6), "x").unwrap(), RingDesc::IntegersMod(6).from_i64(4));
        assert!(elem_from_value(&json!({"re": "1", "im": "1"}), RingDesc::Integers, "x").is_err());
        assert!(elem_from_value(&json!({"num": "1", "den": "0"}), RingDesc::Rationals, "x").is_err());
    }

    #[test]
    fn matrices_round_trip() {
        let m = Mat::from_i64(RingDesc::Integers, 2, 3, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(mat_from_value(&mat_to_json(&m), RingDesc::Integers, "m").unwrap(), m);
        let empty = Mat::zeros(RingDesc::Integers, 2, 0);
        assert_eq!(mat_from_value(&mat_to_json(&empty), RingDesc::Integers, "m").unwrap(), empty);
        let bad = json!({"rows": 2, "cols": 1, "entries": [["1"]]});
        assert_eq!(mat_from_value(&bad, RingDesc::Integers, "m").unwrap_err().clause, "DimensionMismatch");
    }

    #[test]
    fn ring_names() {
        for r in [RingDesc::Integers, RingDesc::IntegersMod(12), RingDesc::Rationals, RingDesc::PrimeField(7), RingDesc::GaussianIntegers] {
            assert_eq!(parse_ring_name(&ring_name(r)).unwrap(), r);
        }
        assert!(parse_ring_name("PrimeField(6)").is_err());
        assert!(parse_ring_name("Reals").is_err());
    }

    #[test]
    fn documents() {
        let text = r#"{
            "ring": {"kind": "Integers"},
            "modules": {"M": {"rows": 1, "cols": 1, "entries": [["2"]]}, "N": {"rows": 1, "cols": 0, "entries": [[]]}},
            "morphisms": {"f": {"source": "N", "target": "M", "mat": {"rows": 1, "cols": 1, "entries": [["1"]]}}},
            "towers": {"T": {"object": "M", "step": {"rows": 1, "cols": 1, "entries": [[3]]}, "direction": "forward"}}
        }"#;
        let ctx = parse_document(text).unwrap().resolve().unwrap();
        assert_eq!(ctx.modules.len(), 2);
        assert!(ctx.morphisms["f"].is_surjective());
        assert_eq!(ctx.towers["T"].direction, Direction::Forward);

        let dup = r#"{"ring": {"kind": "Integers"}, "modules": {"M": {"rows": 0, "cols": 0, "entries": []}, "M": {"rows": 0, "cols": 0, "entries": []}}}"#;
        let err = parse_document(dup).unwrap_err();
        assert_eq!(err.clause, "SchemaViolation");
        assert!(err.message.contains("duplicate name"));

        let clash = r#"{"ring": {"kind": "Integers"}, "modules": {"x": {"rows": 0, "cols": 0, "entries": []}},
            "morphisms": {"x": {"source": "x", "target": "x", "mat": {"rows": 0, "cols": 0, "entries": []}}}}"#;
        assert_eq!(parse_document(clash).unwrap().resolve().unwrap_err().clause, "DuplicateName");

        let bad = parse_document("{\"ring\": ").unwrap_err();
        assert_eq!(bad.clause, "MalformedJson");
        assert!(bad.location.starts_with("line 1"));

        let dangling = r#"{"ring": {"kind": "Integers"}, "morphisms": {"f": {"source": "A", "target": "A", "mat": {"rows": 0, "cols": 0, "entries": []}}}}"#;
        assert_eq!(parse_document(dangling).unwrap().resolve().unwrap_err().clause, "UnresolvedName");

        let ill = r#"{"ring": {"kind": "Integers"}, "modules": {"A": {"rows": 1, "cols": 1, "entries": [["2"]]}, "B": {"rows": 1, "cols": 1, "entries": [["3"]]}},
            "morphisms": {"f": {"source": "A", "target": "B", "mat": {"rows": 1, "cols": 1, "entries": [["1"]]}}}}"#;
        let err = parse_document(ill).unwrap().resolve().unwrap_err();
        assert_eq!((err.clause.as_str(), err.location.as_str()), ("NotWellDefined", "morphisms.f"));
    }
}
