//! Base rings, their elements and the ring maps between them.
//!
//! Every supported ring is either a Euclidean domain (`Integers`,
//! `Rationals`, `PrimeField`, `GaussianIntegers`) or a quotient `Z/n` of one.
//! Elements of the quotient are stored as residues in `[0, n)`; the normal
//! form machinery never runs over `Z/n` directly but over its integer lift.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Gaussian integer `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    fn add(&self, o: &Self) -> Self {
        GaussInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// An element of one of the supported rings, always in canonical form:
/// residues in `[0, n)`, reduced fractions, arbitrary Gaussian components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingElem {
    Int(BigInt),
    Rat(BigRational),
    Gauss(GaussInt),
}

impl RingElem {
    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            RingElem::Int(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Int(v) => write!(f, "{v}"),
            RingElem::Rat(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            RingElem::Gauss(g) => {
                if g.im.is_zero() {
                    write!(f, "{}", g.re)
                } else if g.re.is_zero() {
                    write!(f, "{}i", g.im)
                } else if g.im.is_negative() {
                    write!(f, "{}{}i", g.re, g.im)
                } else {
                    write!(f, "{}+{}i", g.re, g.im)
                }
            }
        }
    }
}

/// Descriptor of a computable base ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingDesc {
    Integers,
    IntegersMod(u64),
    Rationals,
    PrimeField(u64),
    GaussianIntegers,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation of a small positive integer as `(p, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    out.sort_unstable();
    out
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDesc::Integers => write!(f, "Z"),
            RingDesc::IntegersMod(n) => write!(f, "Z/{n}"),
            RingDesc::Rationals => write!(f, "Q"),
            RingDesc::PrimeField(p) => write!(f, "F_{p}"),
            RingDesc::GaussianIntegers => write!(f, "Z[i]"),
        }
    }
}

impl RingDesc {
    pub fn integers_mod(n: u64) -> Result<Self> {
        let r = RingDesc::IntegersMod(n);
        r.validate()?;
        Ok(r)
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        let r = RingDesc::PrimeField(p);
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RingDesc::IntegersMod(n) if n < 2 => {
                Err(Error::InvalidRing(format!("IntegersMod requires n >= 2, got {n}")))
            }
            RingDesc::PrimeField(p) if !is_prime(p) => {
                Err(Error::InvalidRing(format!("PrimeField requires a prime, got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        !matches!(self, RingDesc::IntegersMod(_))
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingDesc::Rationals | RingDesc::PrimeField(_))
    }

    /// The Euclidean domain the ring is computed over: `Z/n` lifts to `Z`.
    pub fn base(&self) -> RingDesc {
        match self {
            RingDesc::IntegersMod(_) => RingDesc::Integers,
            r => *r,
        }
    }

    /// `Some(n)` for `Z/n`.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingDesc::IntegersMod(n) => Some(*n),
            _ => None,
        }
    }

    fn require_euclidean(&self) -> Result<()> {
        if self.is_euclidean() {
            Ok(())
        } else {
            Err(Error::UnsupportedRing(format!("{self} is not a Euclidean domain")))
        }
    }

    pub fn zero(&self) -> RingElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> RingElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElem {
        self.from_bigint(BigInt::from(v))
    }

    /// The image of an integer under the canonical map `Z → R`.
    pub fn from_bigint(&self, v: BigInt) -> RingElem {
        match *self {
            RingDesc::Integers => RingElem::Int(v),
            RingDesc::IntegersMod(n) | RingDesc::PrimeField(n) => {
                RingElem::Int(v.mod_floor(&BigInt::from(n)))
            }
            RingDesc::Rationals => RingElem::Rat(BigRational::from_integer(v)),
            RingDesc::GaussianIntegers => RingElem::Gauss(GaussInt { re: v, im: BigInt::zero() }),
        }
    }

    /// Whether `e` is a canonical element of this ring.
    pub fn contains(&self, e: &RingElem) -> bool {
        match (self, e) {
            (RingDesc::Integers, RingElem::Int(_)) => true,
            (RingDesc::IntegersMod(n) | RingDesc::PrimeField(n), RingElem::Int(v)) => {
                !v.is_negative() && v < &BigInt::from(*n)
            }
            (RingDesc::Rationals, RingElem::Rat(_)) => true,
            (RingDesc::GaussianIntegers, RingElem::Gauss(_)) => true,
            _ => false,
        }
    }

    fn int<'a>(&self, e: &'a RingElem) -> &'a BigInt {
        match e {
            RingElem::Int(v) => v,
            _ => panic!("element {e} does not belong to {self}"),
        }
    }

    fn rat<'a>(&self, e: &'a RingElem) -> &'a BigRational {
        match e {
            RingElem::Rat(v) => v,
            _ => panic!("element {e} does not belong to {self}"),
        }
    }

    fn gauss<'a>(&self, e: &'a RingElem) -> &'a GaussInt {
        match e {
            RingElem::Gauss(v) => v,
            _ => panic!("element {e} does not belong to {self}"),
        }
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match self {
            RingDesc::Integers => RingElem::Int(self.int(a) + self.int(b)),
            RingDesc::IntegersMod(_) | RingDesc::PrimeField(_) => {
                self.from_bigint(self.int(a) + self.int(b))
            }
            RingDesc::Rationals => RingElem::Rat(self.rat(a) + self.rat(b)),
            RingDesc::GaussianIntegers => RingElem::Gauss(self.gauss(a).add(self.gauss(b))),
        }
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match self {
            RingDesc::Integers => RingElem::Int(self.int(a) - self.int(b)),
            RingDesc::IntegersMod(_) | RingDesc::PrimeField(_) => {
                self.from_bigint(self.int(a) - self.int(b))
            }
            RingDesc::Rationals => RingElem::Rat(self.rat(a) - self.rat(b)),
            RingDesc::GaussianIntegers => RingElem::Gauss(self.gauss(a).sub(self.gauss(b))),
        }
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match self {
            RingDesc::Integers => RingElem::Int(self.int(a) * self.int(b)),
            RingDesc::IntegersMod(_) | RingDesc::PrimeField(_) => {
                self.from_bigint(self.int(a) * self.int(b))
            }
            RingDesc::Rationals => RingElem::Rat(self.rat(a) * self.rat(b)),
            RingDesc::GaussianIntegers => RingElem::Gauss(self.gauss(a).mul(self.gauss(b))),
        }
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        match a {
            RingElem::Int(v) => v.is_zero(),
            RingElem::Rat(q) => q.is_zero(),
            RingElem::Gauss(g) => g.is_zero(),
        }
    }

    pub fn is_one(&self, a: &RingElem) -> bool {
        *a == self.one()
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        match self {
            RingDesc::Integers => self.int(a).abs().is_one(),
            RingDesc::IntegersMod(n) => self.int(a).gcd(&BigInt::from(*n)).is_one(),
            RingDesc::Rationals | RingDesc::PrimeField(_) => !self.is_zero(a),
            RingDesc::GaussianIntegers => self.gauss(a).norm().is_one(),
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, a: &RingElem) -> Option<RingElem> {
        if !self.is_unit(a) {
            return None;
        }
        match self {
            RingDesc::Integers => Some(a.clone()),
            RingDesc::IntegersMod(n) | RingDesc::PrimeField(n) => {
                let m = BigInt::from(*n);
                let e = self.int(a).extended_gcd(&m);
                Some(self.from_bigint(e.x))
            }
            RingDesc::Rationals => Some(RingElem::Rat(self.rat(a).recip())),
            RingDesc::GaussianIntegers => {
                // units are ±1, ±i and the inverse of a unit is its conjugate
                Some(RingElem::Gauss(self.gauss(a).conj()))
            }
        }
    }

    /// Euclidean norm: `|a|` on `Z`, `a²+b²` on `Z[i]`, 0/1 on fields.
    pub fn norm(&self, a: &RingElem) -> Result<BigInt> {
        self.require_euclidean()?;
        Ok(match self {
            RingDesc::Integers => self.int(a).abs(),
            RingDesc::GaussianIntegers => self.gauss(a).norm(),
            _ => {
                if self.is_zero(a) {
                    BigInt::zero()
                } else {
                    BigInt::one()
                }
            }
        })
    }

    /// Division with remainder: `a = q·b + r` with `norm(r) < norm(b)`.
    ///
    /// Integer remainders are non-negative. Gaussian quotients round each
    /// coordinate of `a/b` to the nearest integer, ties toward zero.
    pub fn euclid_div(&self, a: &RingElem, b: &RingElem) -> Result<(RingElem, RingElem)> {
        self.require_euclidean()?;
        if self.is_zero(b) {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            RingDesc::Integers => {
                let (a, b) = (self.int(a), self.int(b));
                let (mut q, mut r) = a.div_mod_floor(b);
                if r.is_negative() {
                    r -= b;
                    q += 1;
                }
                (RingElem::Int(q), RingElem::Int(r))
            }
            RingDesc::GaussianIntegers => {
                let (ga, gb) = (self.gauss(a), self.gauss(b));
                let num = ga.mul(&gb.conj());
                let n = gb.norm();
                let q = GaussInt { re: round_ties_to_zero(&num.re, &n), im: round_ties_to_zero(&num.im, &n) };
                let r = ga.sub(&q.mul(gb));
                (RingElem::Gauss(q), RingElem::Gauss(r))
            }
            _ => {
                let inv = self.inv(b).expect("nonzero field element");
                (self.mul(a, &inv), self.zero())
            }
        })
    }

    /// The unit `u` making `u·a` the canonical associate of `a`.
    pub fn unit_normal(&self, a: &RingElem) -> RingElem {
        match self {
            RingDesc::Integers => {
                if self.int(a).is_negative() {
                    self.from_i64(-1)
                } else {
                    self.one()
                }
            }
            RingDesc::Rationals | RingDesc::PrimeField(_) => {
                self.inv(a).unwrap_or_else(|| self.one())
            }
            RingDesc::GaussianIntegers => {
                let g = self.gauss(a);
                if g.is_zero() {
                    return self.one();
                }
                let units = [
                    GaussInt::new(1, 0),
                    GaussInt::new(0, 1),
                    GaussInt::new(-1, 0),
                    GaussInt::new(0, -1),
                ];
                for u in units {
                    let c = u.mul(g);
                    if c.re.is_positive() && !c.im.is_negative() {
                        return RingElem::Gauss(u);
                    }
                }
                unreachable!("some rotation of a nonzero Gaussian integer lies in the first quadrant")
            }
            RingDesc::IntegersMod(_) => self.one(),
        }
    }

    /// Canonical associate: non-negative integers, first-quadrant Gaussian
    /// integers, `1` for nonzero field elements.
    pub fn normalize(&self, a: &RingElem) -> RingElem {
        self.mul(&self.unit_normal(a), a)
    }

    /// Extended gcd `(g, s, t)` with `s·a + t·b = g`, `g` normalized.
    pub fn gcd_ext(&self, a: &RingElem, b: &RingElem) -> Result<(RingElem, RingElem, RingElem)> {
        self.require_euclidean()?;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !self.is_zero(&r1) {
            let (q, r) = self.euclid_div(&r0, &r1)?;
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let u = self.unit_normal(&r0);
        Ok((self.mul(&u, &r0), self.mul(&u, &s0), self.mul(&u, &t0)))
    }

    pub fn gcd(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        Ok(self.gcd_ext(a, b)?.0)
    }

    /// Whether `d` divides `a`.
    pub fn divides(&self, d: &RingElem, a: &RingElem) -> bool {
        match self {
            RingDesc::IntegersMod(n) => {
                let g = self.int(d).gcd(&BigInt::from(*n));
                self.int(a).is_multiple_of(&g)
            }
            _ => {
                if self.is_zero(d) {
                    self.is_zero(a)
                } else {
                    let (_, r) = self.euclid_div(a, d).expect("euclidean ring");
                    self.is_zero(&r)
                }
            }
        }
    }

    /// `a / d` when `d` divides `a` (Euclidean kinds only).
    pub fn div_exact(&self, a: &RingElem, d: &RingElem) -> Option<RingElem> {
        if !self.is_euclidean() {
            return None;
        }
        if self.is_zero(d) {
            return if self.is_zero(a) { Some(self.zero()) } else { None };
        }
        let (q, r) = self.euclid_div(a, d).ok()?;
        self.is_zero(&r).then_some(q)
    }
}

fn round_ties_to_zero(x: &BigInt, n: &BigInt) -> BigInt {
    let (f, rem) = x.div_mod_floor(n);
    let twice: BigInt = &rem * 2;
    match twice.cmp(n) {
        std::cmp::Ordering::Less => f,
        std::cmp::Ordering::Greater => f + 1,
        std::cmp::Ordering::Equal => {
            if f.is_negative() {
                f + 1
            } else {
                f
            }
        }
    }
}

/// How a ring map arises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingMapKind {
    Embedding,
    Quotient,
    FreeExtension { basis_size: usize },
}

/// A homomorphism between supported rings with its flatness metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingMap {
    pub source: RingDesc,
    pub target: RingDesc,
    pub kind: RingMapKind,
    pub flat: bool,
    pub faithfully_flat: bool,
}

impl RingMap {
    /// The canonical map `source → target`, with kind and flatness inferred.
    pub fn new(source: RingDesc, target: RingDesc) -> Result<Self> {
        source.validate()?;
        target.validate()?;
        use RingDesc::*;
        let mk = |kind, flat, faithfully_flat| RingMap { source, target, kind, flat, faithfully_flat };
        let unsupported = || Err(Error::UnsupportedRingMap(format!("{source} -> {target}")));
        match (source, target) {
            (s, t) if s == t => Ok(mk(RingMapKind::FreeExtension { basis_size: 1 }, true, true)),
            (Integers, Rationals) => Ok(mk(RingMapKind::Embedding, true, false)),
            (Integers, GaussianIntegers) => Ok(mk(RingMapKind::FreeExtension { basis_size: 2 }, true, true)),
            (Integers, IntegersMod(_)) | (Integers, PrimeField(_)) => {
                Ok(mk(RingMapKind::Quotient, false, false))
            }
            (IntegersMod(n), IntegersMod(m)) | (IntegersMod(n), PrimeField(m)) => {
                if n == m {
                    // Z/p and F_p are the same ring
                    Ok(mk(RingMapKind::FreeExtension { basis_size: 1 }, true, true))
                } else if n % m == 0 {
                    let cofactor = n / m;
                    let flat = num_integer::gcd(m, cofactor) == 1;
                    Ok(mk(RingMapKind::Quotient, flat, false))
                } else {
                    unsupported()
                }
            }
            (PrimeField(p), IntegersMod(n)) if p == n => {
                Ok(mk(RingMapKind::FreeExtension { basis_size: 1 }, true, true))
            }
            _ => unsupported(),
        }
    }

    /// Build a map with declared metadata, rejecting declarations that
    /// contradict the inferred flatness of the canonical map.
    pub fn declared(
        source: RingDesc,
        target: RingDesc,
        kind: Option<RingMapKind>,
        flat: Option<bool>,
        faithfully_flat: Option<bool>,
    ) -> Result<Self> {
        let m = RingMap::new(source, target)?;
        if let Some(k) = kind {
            let compatible = k == m.kind
                || (source == RingDesc::Integers
                    && target == RingDesc::GaussianIntegers
                    && k == RingMapKind::Embedding);
            if !compatible {
                return Err(Error::UnsupportedRingMap(format!(
                    "{source} -> {target} is not of kind {k:?}"
                )));
            }
        }
        if flat.is_some_and(|f| f != m.flat) || faithfully_flat.is_some_and(|f| f != m.faithfully_flat) {
            return Err(Error::UnsupportedRingMap(format!(
                "declared flatness of {source} -> {target} contradicts the ring map"
            )));
        }
        Ok(m)
    }

    pub fn apply(&self, e: &RingElem) -> RingElem {
        match (self.source, self.target) {
            (s, t) if s == t => e.clone(),
            (_, RingDesc::Rationals) => {
                RingElem::Rat(BigRational::from_integer(e.as_int().expect("integer").clone()))
            }
            (_, t) => t.from_bigint(e.as_int().expect("integer-like source").clone()),
        }
    }

    /// Coordinates of `s` in the source-basis of a free extension
    /// (`1, i` for `Z → Z[i]`).
    pub fn basis_coordinates(&self, s: &RingElem) -> Result<Vec<RingElem>> {
        match self.kind {
            RingMapKind::FreeExtension { basis_size: 1 } => match (self.source, s) {
                (RingDesc::Rationals, RingElem::Rat(_)) => Ok(vec![s.clone()]),
                (RingDesc::GaussianIntegers, RingElem::Gauss(_)) => Ok(vec![s.clone()]),
                (src, RingElem::Int(v)) => Ok(vec![src.from_bigint(v.clone())]),
                _ => Err(Error::RingMismatch(format!("{s} is not in {}", self.target))),
            },
            RingMapKind::FreeExtension { basis_size: 2 } => match s {
                RingElem::Gauss(g) => Ok(vec![RingElem::Int(g.re.clone()), RingElem::Int(g.im.clone())]),
                _ => Err(Error::RingMismatch(format!("{s} is not in {}", self.target))),
            },
            _ => Err(Error::UnsupportedRingMap(format!(
                "{} -> {} is not a free extension",
                self.source, self.target
            ))),
        }
    }

    /// Images in the target of the source-basis used by [`Self::basis_coordinates`].
    pub fn basis(&self) -> Result<Vec<RingElem>> {
        match self.kind {
            RingMapKind::FreeExtension { basis_size: 1 } => Ok(vec![self.target.one()]),
            RingMapKind::FreeExtension { basis_size: 2 } => Ok(vec![
                self.target.one(),
                RingElem::Gauss(GaussInt::new(0, 1)),
            ]),
            _ => Err(Error::UnsupportedRingMap(format!(
                "{} -> {} is not a free extension",
                self.source, self.target
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> RingElem {
        RingElem::Gauss(GaussInt::new(re, im))
    }

    #[test]
    fn integer_division() {
        let z = RingDesc::Integers;
        let (q, r) = z.euclid_div(&z.from_i64(7), &z.from_i64(3)).unwrap();
        assert_eq!((q, r), (z.from_i64(2), z.from_i64(1)));
        let (q, r) = z.euclid_div(&z.from_i64(-7), &z.from_i64(3)).unwrap();
        assert_eq!((q, r), (z.from_i64(-3), z.from_i64(2)));
        let (q, r) = z.euclid_div(&z.from_i64(7), &z.from_i64(-3)).unwrap();
        assert_eq!((q, r), (z.from_i64(-2), z.from_i64(1)));
        for a in [-5, 0, 9] {
            let (q, r) = z.euclid_div(&z.from_i64(a), &z.one()).unwrap();
            assert_eq!((q, r), (z.from_i64(a), z.zero()));
        }
    }

    #[test]
    fn division_errors() {
        let z = RingDesc::Integers;
        assert_eq!(z.euclid_div(&z.one(), &z.zero()), Err(Error::DivisionByZero));
        let m = RingDesc::IntegersMod(6);
        assert!(matches!(m.euclid_div(&m.one(), &m.one()), Err(Error::UnsupportedRing(_))));
    }

    #[test]
    fn gaussian_division_beats_every_nearby_quotient() {
        let zi = RingDesc::GaussianIntegers;
        let a = g(5, 0);
        let b = g(1, 2);
        let (q, r) = zi.euclid_div(&a, &b).unwrap();
        assert_eq!(zi.add(&zi.mul(&q, &b), &r), a);
        assert!(zi.norm(&r).unwrap() < BigInt::from(5));
        // 5/(1+2i) = 1-2i exactly
        assert_eq!(q, g(1, -2));
        assert!(zi.is_zero(&r));

        // exhaustive over the four lattice points around the exact quotient
        for (ar, ai, br, bi) in [(7, 3, 2, -1), (-4, 9, 3, 3), (1, 1, 2, 0), (10, -7, -3, 2)] {
            let (a, b) = (g(ar, ai), g(br, bi));
            let (_, r) = zi.euclid_div(&a, &b).unwrap();
            let best = (-1..=1)
                .flat_map(|x| (-1..=1).map(move |y| (x, y)))
                .map(|(x, y)| {
                    let (q, _) = zi.euclid_div(&a, &b).unwrap();
                    let q = zi.add(&q, &g(x, y));
                    zi.norm(&zi.sub(&a, &zi.mul(&q, &b))).unwrap()
                })
                .min()
                .unwrap();
            assert_eq!(zi.norm(&r).unwrap(), best);
            assert!(zi.norm(&r).unwrap() < zi.norm(&b).unwrap());
        }
    }

    #[test]
    fn gaussian_ties_round_toward_zero() {
        let zi = RingDesc::GaussianIntegers;
        // (1+i)/2 has both coordinates at exactly one half
        let (q, r) = zi.euclid_div(&g(1, 1), &g(2, 0)).unwrap();
        assert_eq!(q, g(0, 0));
        assert_eq!(r, g(1, 1));
        let (q, _) = zi.euclid_div(&g(-1, -1), &g(2, 0)).unwrap();
        assert_eq!(q, g(0, 0));
    }

    #[test]
    fn normalization_and_units() {
        let zi = RingDesc::GaussianIntegers;
        assert_eq!(zi.normalize(&g(-2, -1)), g(2, 1));
        assert_eq!(zi.normalize(&g(0, 3)), g(3, 0));
        assert!(zi.is_unit(&g(0, -1)));
        let z6 = RingDesc::IntegersMod(6);
        assert!(z6.is_unit(&z6.from_i64(5)));
        assert!(!z6.is_unit(&z6.from_i64(3)));
        assert_eq!(z6.inv(&z6.from_i64(5)), Some(z6.from_i64(5)));
        let f7 = RingDesc::PrimeField(7);
        assert_eq!(f7.mul(&f7.from_i64(3), &f7.inv(&f7.from_i64(3)).unwrap()), f7.one());
    }

    #[test]
    fn ring_validation() {
        assert!(RingDesc::integers_mod(1).is_err());
        assert!(RingDesc::prime_field(9).is_err());
        assert!(RingDesc::prime_field(7).is_ok());
        assert_eq!(RingDesc::IntegersMod(4).from_i64(-1), RingElem::Int(BigInt::from(3)));
    }

    #[test]
    fn gcd_ext_bezout() {
        let z = RingDesc::Integers;
        let (d, s, t) = z.gcd_ext(&z.from_i64(-12), &z.from_i64(18)).unwrap();
        assert_eq!(d, z.from_i64(6));
        assert_eq!(z.add(&z.mul(&s, &z.from_i64(-12)), &z.mul(&t, &z.from_i64(18))), d);
        let zi = RingDesc::GaussianIntegers;
        let (d, s, t) = zi.gcd_ext(&zi.from_i64(5), &g(1, 2)).unwrap();
        assert_eq!(d, zi.normalize(&g(1, 2)));
        assert_eq!(zi.add(&zi.mul(&s, &zi.from_i64(5)), &zi.mul(&t, &g(1, 2))), d);
    }

    #[test]
    fn ring_map_metadata() {
        let q = RingMap::new(RingDesc::Integers, RingDesc::Rationals).unwrap();
        assert!(q.flat && !q.faithfully_flat);
        let zi = RingMap::new(RingDesc::Integers, RingDesc::GaussianIntegers).unwrap();
        assert!(zi.flat && zi.faithfully_flat);
        let z4 = RingMap::new(RingDesc::Integers, RingDesc::IntegersMod(4)).unwrap();
        assert!(!z4.flat && !z4.faithfully_flat);
        let split = RingMap::new(RingDesc::IntegersMod(6), RingDesc::IntegersMod(2)).unwrap();
        assert!(split.flat && !split.faithfully_flat);
        let nonsplit = RingMap::new(RingDesc::IntegersMod(4), RingDesc::IntegersMod(2)).unwrap();
        assert!(!nonsplit.flat);
        assert!(RingMap::new(RingDesc::Rationals, RingDesc::Integers).is_err());
        assert!(RingMap::declared(RingDesc::Integers, RingDesc::Rationals, None, None, Some(true)).is_err());
    }

    #[test]
    fn ring_map_application() {
        let z = RingDesc::Integers;
        let q = RingMap::new(z, RingDesc::Rationals).unwrap();
        assert_eq!(q.apply(&z.from_i64(2)), RingDesc::Rationals.from_i64(2));
        let z4 = RingMap::new(z, RingDesc::IntegersMod(4)).unwrap();
        assert_eq!(z4.apply(&z.from_i64(6)), RingElem::Int(BigInt::from(2)));
        let zi = RingMap::new(z, RingDesc::GaussianIntegers).unwrap();
        assert_eq!(zi.apply(&z.from_i64(3)), g(3, 0));
        assert_eq!(zi.basis_coordinates(&g(1, 1)).unwrap(), vec![z.one(), z.one()]);
    }

    #[test]
    fn factorization_helpers() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
