//! Faithfully flat descent of projectivity, of generation and of the
//! Mittag-Leffler property, and the projectivity characterization at
//! finitely presented scale.

use crate::devissage::cyclic_decomposition;
use crate::error::{Error, Result};
use crate::homtensor::{base_change, base_change_mor, is_flat, is_projective};
use crate::limits::{tower_ml_check, Direction, MLStatus, MLVerdict, Tower};
use crate::matrix::Mat;
use crate::module::{FpModule, ModuleInvariants, SubmoduleRep};
use crate::ring::{RingElem, RingMap, RingMapKind};

#[derive(Clone, Debug)]
pub struct DescentReport {
    pub map: RingMap,
    pub module_invariants: ModuleInvariants,
    pub extended_invariants: ModuleInvariants,
    pub verdict_base: bool,
    pub verdict_extended: bool,
    pub equivalence_holds: bool,
    /// Set when the verdicts diverge along a map that is not faithfully flat.
    pub counterexample_flag: Option<String>,
}

impl DescentReport {
    /// A divergence along a faithfully flat map contradicts descent.
    pub fn is_violation(&self) -> bool {
        self.map.faithfully_flat && !self.equivalence_holds
    }
}

pub fn check_projectivity_descent(phi: &RingMap, p: &FpModule) -> Result<DescentReport> {
    let ext = base_change(phi, p)?;
    let verdict_base = is_projective(p)?;
    let verdict_extended = is_projective(&ext)?;
    let equivalence_holds = verdict_base == verdict_extended;
    let (bi, ei) = (p.invariants().clone(), ext.invariants().clone());
    let counterexample_flag = (!equivalence_holds && !phi.faithfully_flat).then(|| {
        format!(
            "{} -> {} is not faithfully flat: torsion rank {} becomes {} after base change",
            phi.source,
            phi.target,
            bi.torsion.len(),
            ei.torsion.len()
        )
    });
    Ok(DescentReport {
        map: *phi,
        module_invariants: bi,
        extended_invariants: ei,
        verdict_base,
        verdict_extended,
        equivalence_holds,
        counterexample_flag,
    })
}

/// An element of `S ⊗ P` written as `Σ sₖ ⊗ pₖ`.
pub type PureTensorSum = Vec<(RingElem, Mat)>;

fn tensor_vector(phi: &RingMap, ext: &FpModule, x: &PureTensorSum) -> Result<Mat> {
    let mut v = ext.zero_elem();
    for (s, p) in x {
        if p.rows() != ext.gens() || p.cols() != 1 {
            return Err(Error::DimensionMismatch(format!("tensor factor must be a column of length {}", ext.gens())));
        }
        if !phi.target.contains(s) {
            return Err(Error::RingMismatch(format!("{s} is not in {}", phi.target)));
        }
        v = v.add(&p.map_ring(phi).scale(s));
    }
    Ok(v)
}

/// Components in `P` of generators of `S ⊗ P` over a free extension.
///
/// Each `s ⊗ p` with `s = Σ c_b·e_b` contributes the components `c_b·p`;
/// together they span `P`.
pub fn descend_generators(phi: &RingMap, p: &FpModule, ext_gens: &[PureTensorSum]) -> Result<Vec<Mat>> {
    if !matches!(phi.kind, RingMapKind::FreeExtension { .. }) {
        return Err(Error::UnsupportedRingMap(format!("{} -> {} is not a free extension", phi.source, phi.target)));
    }
    let ext = base_change(phi, p)?;
    let ring = p.ring();
    let mut vecs = Mat::zeros(phi.target, ext.gens(), 0);
    for x in ext_gens {
        vecs = vecs.hcat(&tensor_vector(phi, &ext, x)?);
    }
    if !SubmoduleRep::new(&ext, vecs)?.is_full() {
        return Err(Error::DoesNotSpan);
    }
    let mut comps = Vec::new();
    for x in ext_gens {
        for (s, v) in x {
            for c in phi.basis_coordinates(s)? {
                comps.push(v.scale(&c));
            }
        }
    }
    let span = Mat::hcat_all(ring, p.gens(), &comps.iter().collect::<Vec<_>>());
    if !SubmoduleRep::new(p, span)?.is_full() {
        return Err(Error::ComponentsDoNotSpan);
    }
    Ok(comps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MLDescentStatus {
    Holds,
    Inconclusive,
    Violated,
}

#[derive(Clone, Debug)]
pub struct MLDescentReport {
    pub base: MLVerdict,
    pub extended: MLVerdict,
    pub status: MLDescentStatus,
}

/// Only "extended ML ⇒ base ML" is asserted.
pub fn check_ml_descent(phi: &RingMap, t: &Tower, horizon: usize) -> Result<MLDescentReport> {
    if !phi.faithfully_flat {
        return Err(Error::NotFaithfullyFlat);
    }
    let ext_tower = Tower::new(base_change_mor(phi, &t.step)?, Direction::Forward)?;
    let base = tower_ml_check(t, horizon)?;
    let extended = tower_ml_check(&ext_tower, horizon)?;
    let unknown = |v: &MLVerdict| matches!(v.status, MLStatus::UnknownAtHorizon);
    let status = if unknown(&base) || unknown(&extended) {
        MLDescentStatus::Inconclusive
    } else if extended.is_ml() && !base.is_ml() {
        MLDescentStatus::Violated
    } else {
        MLDescentStatus::Holds
    };
    Ok(MLDescentReport { base, extended, status })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjCharReport {
    pub flat: bool,
    pub mittag_leffler: bool,
    pub direct_sum_of_cyclics: bool,
    pub projective: bool,
    /// `projective == flat ∧ mittag_leffler ∧ direct_sum_of_cyclics`.
    pub consistent: bool,
}

/// Finitely presented modules are Mittag-Leffler and finite sums of
/// cyclics, so projectivity must coincide with flatness.
pub fn projchar_check(p: &FpModule) -> Result<ProjCharReport> {
    let flat = is_flat(p)?;
    let projective = is_projective(p)?;
    let direct_sum_of_cyclics = cyclic_decomposition(p).is_ok();
    let mittag_leffler = true;
    let consistent = projective == (flat && mittag_leffler && direct_sum_of_cyclics);
    Ok(ProjCharReport { flat, mittag_leffler, direct_sum_of_cyclics, projective, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::Morphism;
    use crate::ring::{GaussInt, RingDesc};

    const Z: RingDesc = RingDesc::Integers;

    fn zi() -> RingMap {
        RingMap::new(Z, RingDesc::GaussianIntegers).unwrap()
    }

    #[test]
    fn projectivity_descends_along_gaussian_integers() {
        let r = check_projectivity_descent(&zi(), &FpModule::diagonal(Z, &[0, 3])).unwrap();
        assert!(!r.verdict_base && !r.verdict_extended && r.equivalence_holds);
        let r = check_projectivity_descent(&zi(), &FpModule::free(Z, 2)).unwrap();
        assert!(r.verdict_base && r.verdict_extended && r.equivalence_holds && !r.is_violation());
    }

    #[test]
    fn rationals_give_the_expected_divergence() {
        let q = RingMap::new(Z, RingDesc::Rationals).unwrap();
        let r = check_projectivity_descent(&q, &FpModule::diagonal(Z, &[2])).unwrap();
        assert!(!r.verdict_base && r.verdict_extended && !r.equivalence_holds);
        assert!(r.counterexample_flag.is_some() && !r.is_violation());
        assert!(r.extended_invariants.is_zero());
        let wrong = check_projectivity_descent(&q, &FpModule::free(RingDesc::Rationals, 1));
        assert!(matches!(wrong, Err(Error::RingMismatch(_))));
    }

    #[test]
    fn generators_descend() {
        let one = Mat::from_i64(Z, 1, 1, &[1]);
        let one_plus_i = RingElem::Gauss(GaussInt::new(1, 1));
        let p5 = FpModule::diagonal(Z, &[5]);
        let comps = descend_generators(&zi(), &p5, &[vec![(one_plus_i.clone(), one.clone())]]).unwrap();
        assert_eq!(comps, vec![one.clone(); 2]);
        let p6 = FpModule::diagonal(Z, &[6]);
        let bad = descend_generators(&zi(), &p6, &[vec![(one_plus_i, one.clone())]]);
        assert_eq!(bad.unwrap_err(), Error::DoesNotSpan);
        let i = RingElem::Gauss(GaussInt::new(0, 1));
        let comps = descend_generators(&zi(), &p6, &[vec![(i, one.clone())]]).unwrap();
        assert_eq!(comps, vec![Mat::from_i64(Z, 1, 1, &[0]), one]);
        assert!(descend_generators(&zi(), &FpModule::zero(Z), &[]).unwrap().is_empty());
    }

    fn forward(m: &FpModule, k: i64) -> Tower {
        let step = Morphism::identity(m).scale(&m.ring().from_i64(k));
        Tower::new(step, Direction::Forward).unwrap()
    }

    #[test]
    fn ml_descent() {
        let r = check_ml_descent(&zi(), &forward(&FpModule::free(Z, 1), 2), 6).unwrap();
        assert_eq!(r.status, MLDescentStatus::Inconclusive);
        assert!(!r.base.is_ml() && !r.extended.is_ml());
        let r = check_ml_descent(&zi(), &forward(&FpModule::diagonal(Z, &[5, 0]), 1), 3).unwrap();
        assert_eq!(r.status, MLDescentStatus::Holds);
        let r = check_ml_descent(&zi(), &forward(&FpModule::diagonal(Z, &[4]), 2), 4).unwrap();
        assert_eq!(r.status, MLDescentStatus::Holds);
        assert_eq!((r.base.level(), r.extended.level()), (Some(2), Some(2)));
        let q = RingMap::new(Z, RingDesc::Rationals).unwrap();
        assert_eq!(check_ml_descent(&q, &forward(&FpModule::free(Z, 1), 2), 3).unwrap_err(), Error::NotFaithfullyFlat);
    }

    #[test]
    fn projectivity_characterization() {
        let r = projchar_check(&FpModule::diagonal(Z, &[2])).unwrap();
        assert!(!r.flat && !r.projective && r.consistent);
        let r = projchar_check(&FpModule::free(Z, 2)).unwrap();
        assert!(r.flat && r.projective && r.mittag_leffler && r.direct_sum_of_cyclics && r.consistent);
        let r = projchar_check(&FpModule::diagonal(RingDesc::IntegersMod(6), &[2])).unwrap();
        assert!(r.flat && r.projective && r.mittag_leffler && r.direct_sum_of_cyclics && r.consistent);
        let r = projchar_check(&FpModule::diagonal(RingDesc::IntegersMod(4), &[2])).unwrap();
        assert!(!r.flat && !r.projective && r.consistent);
    }
}
