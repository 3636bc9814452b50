//! Harness instances: named matrices whose dimensions refer to shared,
//! typed slots, so that deleting a generator or relation updates every
//! matrix consistently.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::Fault;
use crate::error::{Error, Result};
use crate::json::{mat_from_value, mat_to_json, InputError, InputResult, RingJson};
use crate::matrix::Mat;
use crate::ring::{GaussInt, RingDesc, RingElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimKind {
    Gen,
    Rel,
    Fixed,
}

impl DimKind {
    fn name(self) -> &'static str {
        match self {
            DimKind::Gen => "gen",
            DimKind::Rel => "rel",
            DimKind::Fixed => "fixed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "gen" => Some(DimKind::Gen),
            "rel" => Some(DimKind::Rel),
            "fixed" => Some(DimKind::Fixed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dim {
    pub name: String,
    pub size: usize,
    pub kind: DimKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub row: usize,
    pub col: usize,
    pub mat: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub suite: String,
    pub ring: RingDesc,
    pub horizon: usize,
    pub fault: Option<Fault>,
    pub dims: Vec<Dim>,
    pub slots: Vec<Slot>,
}

fn missing(what: &str, name: &str) -> Error {
    Error::DimensionMismatch(format!("instance has no {what} `{name}`"))
}

impl Case {
    pub fn new(suite: &str, ring: RingDesc, horizon: usize, fault: Option<Fault>) -> Self {
        Case { suite: suite.to_string(), ring, horizon, fault, dims: Vec::new(), slots: Vec::new() }
    }

    pub fn dim(&mut self, name: &str, size: usize, kind: DimKind) -> usize {
        self.dims.push(Dim { name: name.to_string(), size, kind });
        self.dims.len() - 1
    }

    pub fn put(&mut self, name: &str, row: usize, col: usize, mat: Mat) {
        assert_eq!((mat.rows(), mat.cols()), (self.dims[row].size, self.dims[col].size), "slot `{name}`");
        self.slots.push(Slot { name: name.to_string(), row, col, mat });
    }

    pub fn size(&self, name: &str) -> Result<usize> {
        self.dims.iter().find(|d| d.name == name).map(|d| d.size).ok_or_else(|| missing("dimension", name))
    }

    pub fn mat(&self, name: &str) -> Result<&Mat> {
        self.slots.iter().find(|s| s.name == name).map(|s| &s.mat).ok_or_else(|| missing("matrix", name))
    }

    /// Shrink candidates in the fixed order: halve one entry, delete one
    /// generator, delete one relation.
    pub fn shrink_candidates(&self) -> Vec<Case> {
        let mut out = Vec::new();
        for (s, slot) in self.slots.iter().enumerate() {
            for i in 0..slot.mat.rows() {
                for j in 0..slot.mat.cols() {
                    let e = slot.mat.get(i, j);
                    if self.ring.is_zero(e) {
                        continue;
                    }
                    let mut c = self.clone();
                    let m = &slot.mat;
                    let h = halve(self.ring, e);
                    c.slots[s].mat = Mat::from_fn(self.ring, m.rows(), m.cols(), |a, b| {
                        if (a, b) == (i, j) {
                            h.clone()
                        } else {
                            m.get(a, b).clone()
                        }
                    });
                    out.push(c);
                }
            }
        }
        for kind in [DimKind::Gen, DimKind::Rel] {
            for (d, dim) in self.dims.iter().enumerate() {
                if dim.kind != kind {
                    continue;
                }
                for i in 0..dim.size {
                    out.push(self.delete_index(d, i));
                }
            }
        }
        out
    }

    fn delete_index(&self, d: usize, i: usize) -> Case {
        let mut c = self.clone();
        c.dims[d].size -= 1;
        let keep: Vec<usize> = (0..self.dims[d].size).filter(|&k| k != i).collect();
        for slot in &mut c.slots {
            if slot.row == d {
                slot.mat = slot.mat.select_rows(&keep);
            }
            if slot.col == d {
                slot.mat = slot.mat.select_cols(&keep);
            }
        }
        c
    }

    pub fn to_json(&self) -> Value {
        let dims: Vec<Value> =
            self.dims.iter().map(|d| json!({ "name": d.name, "size": d.size, "kind": d.kind.name() })).collect();
        let slots: Vec<Value> = self
            .slots
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "row_dim": self.dims[s.row].name,
                    "col_dim": self.dims[s.col].name,
                    "matrix": mat_to_json(&s.mat),
                })
            })
            .collect();
        json!({
            "suite": self.suite,
            "ring": RingJson::from(self.ring),
            "horizon": self.horizon,
            "fault": self.fault.map(Fault::name),
            "dims": dims,
            "matrices": slots,
        })
    }

    pub fn from_json(v: &Value) -> InputResult<Case> {
        let bad = |loc: &str, msg: &str| InputError::new("InvalidInstance", loc, msg);
        let obj = v.as_object().ok_or_else(|| bad("$", "expected an object"))?;
        let suite = obj.get("suite").and_then(Value::as_str).ok_or_else(|| bad("suite", "expected a string"))?;
        let ring: RingJson = serde_json::from_value(obj.get("ring").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad("ring", &e.to_string()))?;
        let ring = ring.to_ring("ring")?;
        let horizon = obj.get("horizon").and_then(Value::as_u64).ok_or_else(|| bad("horizon", "expected an integer"))?;
        let fault = match obj.get("fault") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(Fault::parse(s).ok_or_else(|| bad("fault", "unknown fault"))?),
            Some(_) => return Err(bad("fault", "expected a string or null")),
        };
        let mut case = Case::new(suite, ring, horizon as usize, fault);
        let dims = obj.get("dims").and_then(Value::as_array).ok_or_else(|| bad("dims", "expected a list"))?;
        for (i, d) in dims.iter().enumerate() {
            let loc = format!("dims[{i}]");
            let name = d.get("name").and_then(Value::as_str).ok_or_else(|| bad(&loc, "missing name"))?;
            let size = d.get("size").and_then(Value::as_u64).ok_or_else(|| bad(&loc, "missing size"))?;
            let kind = d.get("kind").and_then(Value::as_str).and_then(DimKind::parse).ok_or_else(|| bad(&loc, "bad kind"))?;
            if case.dims.iter().any(|x| x.name == name) {
                return Err(InputError::new("DuplicateName", loc, format!("dimension `{name}` repeated")));
            }
            case.dim(name, size as usize, kind);
        }
        let slots = obj.get("matrices").and_then(Value::as_array).ok_or_else(|| bad("matrices", "expected a list"))?;
        for (i, s) in slots.iter().enumerate() {
            let loc = format!("matrices[{i}]");
            let name = s.get("name").and_then(Value::as_str).ok_or_else(|| bad(&loc, "missing name"))?;
            let dim_index = |key: &str| -> InputResult<usize> {
                let n = s.get(key).and_then(Value::as_str).ok_or_else(|| bad(&loc, &format!("missing {key}")))?;
                case.dims.iter().position(|d| d.name == n).ok_or_else(|| {
                    InputError::new("UnresolvedName", format!("{loc}.{key}"), format!("no dimension `{n}`"))
                })
            };
            let (row, col) = (dim_index("row_dim")?, dim_index("col_dim")?);
            let mat = mat_from_value(s.get("matrix").unwrap_or(&Value::Null), ring, &format!("{loc}.matrix"))?;
            if (mat.rows(), mat.cols()) != (case.dims[row].size, case.dims[col].size) {
                return Err(InputError::new("DimensionMismatch", loc, "matrix shape disagrees with its dimensions"));
            }
            if case.slots.iter().any(|x| x.name == name) {
                return Err(InputError::new("DuplicateName", loc, format!("matrix `{name}` repeated")));
            }
            case.put(name, row, col, mat);
        }
        Ok(case)
    }
}

fn half(v: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, _) = v.abs().div_rem(&two);
    if v.is_negative() {
        -q
    } else {
        q
    }
}

/// Halve toward zero, using the symmetric representative over `Z/n`.
pub fn halve(ring: RingDesc, e: &RingElem) -> RingElem {
    match (ring, e) {
        (RingDesc::IntegersMod(n) | RingDesc::PrimeField(n), RingElem::Int(v)) => {
            let n = BigInt::from(n);
            let sym = if v * 2 > n { v - &n } else { v.clone() };
            ring.from_bigint(half(&sym))
        }
        (_, RingElem::Int(v)) => RingElem::Int(half(v)),
        (_, RingElem::Rat(q)) => {
            let num = half(q.numer());
            if num.is_zero() {
                ring.zero()
            } else {
                RingElem::Rat(BigRational::new(num, q.denom().clone()))
            }
        }
        (_, RingElem::Gauss(g)) => RingElem::Gauss(GaussInt { re: half(&g.re), im: half(&g.im) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Case {
        let ring = RingDesc::Integers;
        let mut c = Case::new("demo", ring, 5, None);
        let g = c.dim("g", 2, DimKind::Gen);
        let r = c.dim("r", 1, DimKind::Rel);
        c.put("R", g, r, Mat::from_i64(ring, 2, 1, &[6, -3]));
        c.put("E", g, g, Mat::from_i64(ring, 2, 2, &[1, 2, 3, 4]));
        c
    }

    #[test]
    fn halving_rounds_toward_zero() {
        let z = RingDesc::Integers;
        assert_eq!(halve(z, &z.from_i64(-7)), z.from_i64(-3));
        let z6 = RingDesc::IntegersMod(6);
        assert_eq!(halve(z6, &z6.from_i64(5)), z6.zero());
        assert_eq!(halve(z6, &z6.from_i64(4)), z6.from_i64(5));
        let zi = RingDesc::GaussianIntegers;
        assert_eq!(halve(zi, &RingElem::Gauss(GaussInt::new(3, -5))), RingElem::Gauss(GaussInt::new(1, -2)));
    }

    #[test]
    fn candidates_follow_the_fixed_order() {
        let c = sample();
        let cands = c.shrink_candidates();
        // six nonzero entries, two generators, one relation
        assert_eq!(cands.len(), 9);
        assert_eq!(cands[0].mat("R").unwrap(), &Mat::from_i64(RingDesc::Integers, 2, 1, &[3, -3]));
        let dropped = &cands[6];
        assert_eq!(dropped.size("g").unwrap(), 1);
        assert_eq!(dropped.mat("R").unwrap(), &Mat::from_i64(RingDesc::Integers, 1, 1, &[-3]));
        assert_eq!(dropped.mat("E").unwrap(), &Mat::from_i64(RingDesc::Integers, 1, 1, &[4]));
        assert_eq!(cands[8].mat("R").unwrap().cols(), 0);
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        assert_eq!(Case::from_json(&c.to_json()).unwrap(), c);
        let mut v = c.to_json();
        v["matrices"][0]["row_dim"] = json!("nope");
        assert_eq!(Case::from_json(&v).unwrap_err().clause, "UnresolvedName");
    }
}
