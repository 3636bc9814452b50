//! Pushouts of module maps with a common source.
//!
//! For `f : A → B` and `g : A → C` the pushout is `(B ⊕ C) / {(f(a), −g(a))}`,
//! presented with B's generators first, then C's, and one extra relation
//! per generator of `A`.

use crate::error::{Error, Result};
use crate::homtensor::{base_change, base_change_mor};
use crate::matrix::Mat;
use crate::module::{factor_through, is_iso, FpModule, Morphism};
use crate::ring::RingMap;

#[derive(Clone, Debug)]
pub struct PushoutData {
    pub f: Morphism,
    pub g: Morphism,
    pub object: FpModule,
    pub inl: Morphism,
    pub inr: Morphism,
}

pub fn pushout(f: &Morphism, g: &Morphism) -> Result<PushoutData> {
    if f.ring() != g.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", f.ring(), g.ring())));
    }
    if f.source() != g.source() {
        return Err(Error::SourceMismatch);
    }
    let ring = f.ring();
    let (b, c) = (f.target(), g.target());
    let (nb, nc, na) = (b.gens(), c.gens(), f.source().gens());
    let (rb, rc) = (b.rels().cols(), c.rels().cols());
    let glue = f.mat().vcat(&g.mat().neg());
    let object = FpModule::new(ring, b.rels().block_diag(c.rels()).hcat(&glue))?;
    let inl = Morphism::from_parts(
        b.clone(),
        object.clone(),
        Mat::identity(ring, nb).vcat(&Mat::zeros(ring, nc, nb)),
        Mat::identity(ring, rb).vcat(&Mat::zeros(ring, rc + na, rb)),
    );
    let inr = Morphism::from_parts(
        c.clone(),
        object.clone(),
        Mat::zeros(ring, nb, nc).vcat(&Mat::identity(ring, nc)),
        Mat::zeros(ring, rb, rc).vcat(&Mat::identity(ring, rc)).vcat(&Mat::zeros(ring, na, rc)),
    );
    Ok(PushoutData { f: f.clone(), g: g.clone(), object, inl, inr })
}

impl PushoutData {
    /// Whether `inl ∘ f ≡ inr ∘ g`.
    pub fn commutes(&self) -> Result<bool> {
        Ok(self.inl.compose(&self.f)?.equiv(&self.inr.compose(&self.g)?))
    }
}

/// The unique `w : object → E` with `w ∘ inl ≡ u` and `w ∘ inr ≡ v`.
///
/// The map is read off on generators; an independent solve for any map
/// satisfying both equations must agree with it.
pub fn pushout_induced(p: &PushoutData, u: &Morphism, v: &Morphism) -> Result<Morphism> {
    if u.source() != p.f.target() || v.source() != p.g.target() || u.target() != v.target() {
        return Err(Error::DimensionMismatch("u, v must start at B, C and share a target".into()));
    }
    if !u.compose(&p.f)?.equiv(&v.compose(&p.g)?) {
        return Err(Error::SquareDoesNotCommute);
    }
    let w = Morphism::new(&p.object, u.target(), u.mat().hcat(v.mat()))?;
    if !w.compose(&p.inl)?.equiv(u) || !w.compose(&p.inr)?.equiv(v) {
        return Err(Error::InvariantViolation("induced map does not restrict to u and v".into()));
    }
    if let Some(other) = second_induced(p, u, v)? {
        if !other.equiv(&w) {
            return Err(Error::InvariantViolation("two different maps out of the pushout".into()));
        }
    } else {
        return Err(Error::InvariantViolation("solver found no map out of the pushout".into()));
    }
    Ok(w)
}

/// Any `w′` with `w′ ∘ [inl | inr] ≡ [u | v]`, found by linear solving.
fn second_induced(p: &PushoutData, u: &Morphism, v: &Morphism) -> Result<Option<Morphism>> {
    let ds = crate::module::direct_sum(p.f.target(), p.g.target())?;
    let both = Morphism::new(&ds.sum, &p.object, p.inl.mat().hcat(p.inr.mat()))?;
    let uv = Morphism::new(&ds.sum, u.target(), u.mat().hcat(v.mat()))?;
    factor_through(&both, &uv)
}

/// Extension of scalars commutes with the pushout: compare
/// `S ⊗ pushout(f, g)` with `pushout(S ⊗ f, S ⊗ g)` through the identity on
/// generators, and check the triangle with the right injections.
pub fn pushout_base_change_check(phi: &RingMap, f: &Morphism, g: &Morphism) -> Result<bool> {
    let p = pushout(f, g)?;
    let extended = base_change(phi, &p.object)?;
    let ps = pushout(&base_change_mor(phi, f)?, &base_change_mor(phi, g)?)?;
    if !is_iso(&extended, &ps.object)? {
        return Ok(false);
    }
    let ring = phi.target;
    let id = Mat::identity(ring, extended.gens());
    let (Ok(forward), Ok(backward)) = (
        Morphism::new(&extended, &ps.object, id.clone()),
        Morphism::new(&ps.object, &extended, id),
    ) else {
        return Ok(false);
    };
    let mutually_inverse = backward.compose(&forward)?.equiv(&Morphism::identity(&extended))
        && forward.compose(&backward)?.equiv(&Morphism::identity(&ps.object));
    let inr_triangle = forward.compose(&base_change_mor(phi, &p.inr)?)?.equiv(&ps.inr);
    let inl_triangle = forward.compose(&base_change_mor(phi, &p.inl)?)?.equiv(&ps.inl);
    Ok(mutually_inverse && inr_triangle && inl_triangle)
}
