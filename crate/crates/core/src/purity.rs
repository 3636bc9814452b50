//! Universal injectivity, the lifting property of pure maps, and domination.
//!
//! A map of finitely presented modules is universally injective exactly when
//! it splits, so purity is decided by searching for a retraction. Impure maps
//! are additionally given a concrete witness: a nonzero element of `M ⊗ Q`
//! killed by `f ⊗ id_Q` for some cyclic probe `Q`.

use crate::error::{Error, Result};
use crate::homtensor::{base_change_mor, tensor, tensor_mor};
use crate::matrix::Mat;
use crate::module::{cokernel, factor_through, kernel, FpModule, Morphism};
use crate::pushout::pushout;
use crate::ring::{RingDesc, RingElem, RingMap};

/// A nonzero `x ∈ source ⊗ Q` with `(f ⊗ id_Q)(x) = 0`.
#[derive(Clone, Debug)]
pub struct TensorWitness {
    pub probe: FpModule,
    pub element: Mat,
}

#[derive(Clone, Debug)]
pub struct PurityVerdict {
    pub pure: bool,
    pub retraction: Option<Morphism>,
    pub counterexample: Option<TensorWitness>,
}

#[derive(Clone, Debug)]
pub struct DominationVerdict {
    pub dominates: bool,
    pub factor: Option<Morphism>,
    pub pushout_agrees: bool,
}

const SMALL_PRIMES: [i64; 4] = [2, 3, 5, 7];

/// Probe modules for `f`: `R` itself, `R/(c)` for each torsion invariant of
/// `coker f`, and `R/(p)` for the primes up to 7 (skipping unit ideals).
///
/// Over a principal ideal ring, a non-split map with finitely presented
/// cokernel already fails to be injective after tensoring with one of the
/// first two kinds.
pub fn probe_family(f: &Morphism) -> Vec<FpModule> {
    let ring = f.ring();
    let mut ds: Vec<RingElem> = vec![ring.zero()];
    ds.extend(cokernel(f).0.invariants().torsion.iter().cloned());
    ds.extend(SMALL_PRIMES.iter().map(|&p| ring.from_i64(p)));
    let mut seen: Vec<RingElem> = Vec::new();
    let mut out = Vec::new();
    for d in ds {
        let d = probe_generator(ring, &d);
        if ring.is_unit(&d) || seen.contains(&d) {
            continue;
        }
        out.push(FpModule::cyclic(ring, &d));
        seen.push(d);
    }
    out
}

fn probe_generator(ring: RingDesc, d: &RingElem) -> RingElem {
    match ring.modulus() {
        Some(n) => {
            let g = num_integer::Integer::gcd(d.as_int().expect("residue"), &num_bigint::BigInt::from(n));
            ring.from_bigint(g)
        }
        None => ring.normalize(d),
    }
}

/// A nonzero element of `source ⊗ q` in the kernel of `f ⊗ id_q`, if any.
pub fn tensor_kernel_witness(f: &Morphism, q: &FpModule) -> Result<Option<Mat>> {
    let fq = tensor_mor(f, &Morphism::identity(q))?;
    let (k, incl) = kernel(&fq)?;
    if k.is_zero() {
        return Ok(None);
    }
    let src = fq.source();
    for j in 0..incl.mat().cols() {
        let x = incl.mat().col(j);
        if !src.is_zero_elem(&x) {
            return Ok(Some(x));
        }
    }
    Err(Error::InvariantViolation("nonzero kernel with all generators zero".into()))
}

impl TensorWitness {
    /// Re-check that the element is nonzero and killed by `f ⊗ id`.
    pub fn verify(&self, f: &Morphism) -> Result<bool> {
        let src = tensor(f.source(), &self.probe)?;
        if src.gens() != self.element.rows() || src.is_zero_elem(&self.element) {
            return Ok(false);
        }
        let fq = tensor_mor(f, &Morphism::identity(&self.probe))?;
        Ok(fq.target().is_zero_elem(&fq.apply(&self.element)))
    }
}

pub fn is_universally_injective(f: &Morphism) -> Result<PurityVerdict> {
    if let Some(r) = factor_through(f, &Morphism::identity(f.source()))? {
        return Ok(PurityVerdict { pure: true, retraction: Some(r), counterexample: None });
    }
    for q in probe_family(f) {
        if let Some(element) = tensor_kernel_witness(f, &q)? {
            let w = TensorWitness { probe: q, element };
            if !w.verify(f)? {
                return Err(Error::InvariantViolation("probe witness failed re-verification".into()));
            }
            return Ok(PurityVerdict { pure: false, retraction: None, counterexample: Some(w) });
        }
    }
    Err(Error::ProbeInconclusive)
}

/// Whether `f ⊗ id_Q` is injective for every probe `Q`.
pub fn probes_injective(f: &Morphism) -> Result<bool> {
    for q in probe_family(f) {
        if tensor_kernel_witness(f, &q)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Given a commuting square `h ∘ k ≡ f ∘ g` with free `F`, `G` and a
/// retraction `π` of `f`, the map `φ = π ∘ h : G → M` satisfies `φ ∘ k ≡ g`.
pub fn lift_through_univ_injective(
    f: &Morphism,
    pi: &Morphism,
    g: &Morphism,
    h: &Morphism,
    k: &Morphism,
) -> Result<Morphism> {
    if pi.source() != f.target() || pi.target() != f.source() {
        return Err(Error::DimensionMismatch("retraction must map N back to M".into()));
    }
    if g.target() != f.source() || h.target() != f.target() || k.source() != g.source() || k.target() != h.source() {
        return Err(Error::DimensionMismatch("square shapes: g : F → M, h : G → N, k : F → G".into()));
    }
    if g.source().rels().cols() != 0 || h.source().rels().cols() != 0 {
        return Err(Error::PreconditionViolation("F and G must be free".into()));
    }
    if !pi.compose(f)?.equiv(&Morphism::identity(f.source())) {
        return Err(Error::NotARetraction);
    }
    if !h.compose(k)?.equiv(&f.compose(g)?) {
        return Err(Error::SquareDoesNotCommute);
    }
    let phi = pi.compose(h)?;
    if !phi.compose(k)?.equiv(g) {
        return Err(Error::InvariantViolation("lift does not restrict to g".into()));
    }
    Ok(phi)
}

/// Whether `g` factors through `f`, cross-checked against purity of the
/// pushout injection.
pub fn dominates(f: &Morphism, g: &Morphism) -> Result<DominationVerdict> {
    if f.source() != g.source() {
        return Err(Error::SourceMismatch);
    }
    let factor = factor_through(f, g)?;
    if let Some(h) = &factor {
        if !h.compose(f)?.equiv(g) {
            return Err(Error::InvariantViolation("factor does not reproduce g".into()));
        }
    }
    let via_pushout = dominates_via_pushout(f, g)?;
    let dominates = factor.is_some();
    Ok(DominationVerdict { dominates, factor, pushout_agrees: via_pushout == dominates })
}

pub fn dominates_via_pushout(f: &Morphism, g: &Morphism) -> Result<bool> {
    let p = pushout(f, g)?;
    Ok(is_universally_injective(&p.inr)?.pure)
}

pub fn mutually_dominate(f: &Morphism, g: &Morphism) -> Result<bool> {
    Ok(dominates(f, g)?.dominates && dominates(g, f)?.dominates)
}

/// Whether "pure after base change ⇒ pure" held for `f`.
pub fn purity_descends(phi: &RingMap, f: &Morphism) -> Result<bool> {
    if !phi.faithfully_flat {
        return Err(Error::NotFaithfullyFlat);
    }
    let extended = is_universally_injective(&base_change_mor(phi, f)?)?.pure;
    let base = is_universally_injective(f)?.pure;
    Ok(!extended || base)
}
