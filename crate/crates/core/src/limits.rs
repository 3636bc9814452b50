//! Towers, finite directed systems, Mittag-Leffler certificates, lifting
//! along truncated inverse limits, and the free enlargement step over a PID.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::module::{factor_through, image, kernel, FpModule, Morphism, SubmoduleRep};
use crate::normal_form::{column_basis, solve_linear};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `F → F → ⋯`
    Forward,
    /// `F ← F ← ⋯`
    Backward,
}

/// A self-similar system: one object and one endomorphism at every level.
#[derive(Clone, Debug)]
pub struct Tower {
    pub object: FpModule,
    pub step: Morphism,
    pub direction: Direction,
}

impl Tower {
    pub fn new(step: Morphism, direction: Direction) -> Result<Tower> {
        if step.source() != step.target() {
            return Err(Error::DimensionMismatch("tower step must be an endomorphism".into()));
        }
        Ok(Tower { object: step.source().clone(), step, direction })
    }

    /// `step^e`: the transition across `e` levels.
    pub fn transition(&self, e: usize) -> Morphism {
        power(&self.step, e)
    }
}

pub fn power(f: &Morphism, e: usize) -> Morphism {
    let mut acc = Morphism::identity(f.source());
    for _ in 0..e {
        acc = f.compose(&acc).expect("endomorphism");
    }
    acc
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum MLStatus {
    /// Forward towers carry the factor `h` with `step^level ≡ h ∘ step^(level+1)`;
    /// backward towers record only the level at which images stabilize.
    ML { level: usize, factor: Option<Morphism> },
    NotML { level: usize },
    UnknownAtHorizon,
}

#[derive(Clone, Debug)]
pub struct MLVerdict {
    pub status: MLStatus,
    pub horizon: usize,
}

impl MLVerdict {
    pub fn is_ml(&self) -> bool {
        matches!(self.status, MLStatus::ML { .. })
    }

    pub fn level(&self) -> Option<usize> {
        match self.status {
            MLStatus::ML { level, .. } => Some(level),
            _ => None,
        }
    }
}

fn require(t: &Tower, direction: Direction, horizon: usize) -> Result<()> {
    if t.direction != direction {
        return Err(Error::PreconditionViolation(format!("expected a {direction:?} tower")));
    }
    if horizon == 0 {
        return Err(Error::PreconditionViolation("horizon must be at least 1".into()));
    }
    Ok(())
}

/// Search `j ≤ horizon` with `step^j` factoring through `step^(j+1)`.
pub fn tower_ml_check(t: &Tower, horizon: usize) -> Result<MLVerdict> {
    require(t, Direction::Forward, horizon)?;
    let mut sj = Morphism::identity(&t.object);
    for j in 0..=horizon {
        let sj1 = t.step.compose(&sj)?;
        if let Some(h) = factor_through(&sj1, &sj)? {
            let mut hm = Morphism::identity(&t.object);
            let mut sjm = sj.clone();
            for _ in 1..=horizon {
                hm = hm.compose(&h)?;
                sjm = t.step.compose(&sjm)?;
                if !hm.compose(&sjm)?.equiv(&sj) {
                    return Err(Error::InvariantViolation("iterated ML factorization failed".into()));
                }
            }
            return Ok(MLVerdict { status: MLStatus::ML { level: j, factor: Some(h) }, horizon });
        }
        sj = sj1;
    }
    Ok(MLVerdict { status: MLStatus::UnknownAtHorizon, horizon })
}

/// Least `k ≤ horizon` with `im(step^k) = im(step^(k+1))`.
pub fn inverse_tower_stabilization(t: &Tower, horizon: usize) -> Result<MLVerdict> {
    require(t, Direction::Backward, horizon)?;
    let images: Vec<SubmoduleRep> = {
        let mut out = Vec::with_capacity(horizon + 2);
        let mut s = Morphism::identity(&t.object);
        for _ in 0..=horizon + 1 {
            out.push(image(&s));
            s = t.step.compose(&s)?;
        }
        out
    };
    for k in 0..=horizon {
        if images[k].equals(&images[k + 1]) {
            if (k..=horizon).any(|k2| !images[k2].equals(&images[k2 + 1])) {
                return Err(Error::InvariantViolation("image chain stabilized and then moved".into()));
            }
            return Ok(MLVerdict { status: MLStatus::ML { level: k, factor: None }, horizon });
        }
    }
    Ok(MLVerdict { status: MLStatus::UnknownAtHorizon, horizon })
}

fn violation(hypothesis: &str, level: usize) -> Error {
    Error::HypothesisViolation { hypothesis: hypothesis.into(), level }
}

/// For levelwise exact `0 → A → B → C → 0` of backward towers with A
/// Mittag-Leffler, lift a compatible family `c₀, …, c_H` to a compatible
/// family in `B`.
///
/// Every `cᵢ` is lifted on its own first; then, from the top level down,
/// the mismatch `step(b_{i+1}) − b′ᵢ` lies in `ker g = im f` and is
/// repaired by adding its preimage in `A`.
pub fn tower_surjective_lift(
    a: &Tower,
    b: &Tower,
    c: &Tower,
    fmap: &Morphism,
    gmap: &Morphism,
    c_family: &[Mat],
    horizon: usize,
) -> Result<Vec<Mat>> {
    for t in [a, b, c] {
        if t.direction != Direction::Backward {
            return Err(violation("backward towers", 0));
        }
    }
    if fmap.source() != &a.object || fmap.target() != &b.object || gmap.source() != &b.object || gmap.target() != &c.object {
        return Err(violation("f : A → B and g : B → C", 0));
    }
    if !gmap.is_surjective() {
        return Err(violation("g surjective", 0));
    }
    let (_, kincl) = kernel(gmap)?;
    if !image(fmap).equals(&image(&kincl)) {
        return Err(violation("im f = ker g", 0));
    }
    if !b.step.compose(fmap)?.equiv(&fmap.compose(&a.step)?) {
        return Err(violation("f commutes with the transitions", 0));
    }
    if !c.step.compose(gmap)?.equiv(&gmap.compose(&b.step)?) {
        return Err(violation("g commutes with the transitions", 0));
    }
    if c_family.len() != horizon + 1 {
        return Err(violation("one element of C per level up to the horizon", c_family.len()));
    }
    for (i, ci) in c_family.iter().enumerate() {
        if ci.rows() != c.object.gens() || ci.cols() != 1 {
            return Err(violation("elements of C", i));
        }
    }
    for i in 0..horizon {
        if !c.object.elems_equal(&c.step.apply(&c_family[i + 1]), &c_family[i]) {
            return Err(violation("c family compatible", i));
        }
    }
    if !inverse_tower_stabilization(a, horizon.max(1))?.is_ml() {
        return Err(Error::LiftFailedAtHorizon(horizon));
    }

    let img_g = image(gmap);
    let img_f = image(fmap);
    let mut lifts = Vec::with_capacity(horizon + 1);
    for (i, ci) in c_family.iter().enumerate() {
        let pre = img_g.coefficients(ci)?.ok_or_else(|| violation("g surjective", i))?;
        lifts.push(pre);
    }
    let mut out = lifts.clone();
    for i in (0..horizon).rev() {
        let mismatch = b.step.apply(&out[i + 1]).sub(&lifts[i]);
        let a_elem = img_f
            .coefficients(&mismatch)?
            .ok_or_else(|| Error::InvariantViolation(format!("mismatch at level {i} outside im f")))?;
        out[i] = lifts[i].add(&fmap.apply(&a_elem));
    }
    for i in 0..=horizon {
        if !c.object.elems_equal(&gmap.apply(&out[i]), &c_family[i]) {
            return Err(Error::InvariantViolation(format!("lift misses c at level {i}")));
        }
        if i < horizon && !b.object.elems_equal(&b.step.apply(&out[i + 1]), &out[i]) {
            return Err(Error::InvariantViolation(format!("lift incompatible at level {i}")));
        }
    }
    Ok(out)
}

/// A diagram over a finite poset given by its order relation.
#[derive(Clone, Debug)]
pub struct FiniteDirectedSystem {
    pub le: Vec<Vec<bool>>,
    pub objects: Vec<FpModule>,
    pub maps: Vec<Vec<Option<Morphism>>>,
}

impl FiniteDirectedSystem {
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.objects.len();
        let ax = |s: String| Err(Error::AxiomViolation(s));
        if self.le.len() != n || self.maps.len() != n || self.le.iter().any(|r| r.len() != n) || self.maps.iter().any(|r| r.len() != n) {
            return ax("order and map tables must be square over the index".into());
        }
        for i in 0..n {
            if !self.le[i][i] {
                return ax(format!("{i} ≤ {i} fails"));
            }
            for j in 0..n {
                if i != j && self.le[i][j] && self.le[j][i] {
                    return ax(format!("{i} and {j} are distinct but mutually ≤"));
                }
                for k in 0..n {
                    if self.le[i][j] && self.le[j][k] && !self.le[i][k] {
                        return ax(format!("{i} ≤ {j} ≤ {k} but not {i} ≤ {k}"));
                    }
                }
                match (&self.maps[i][j], self.le[i][j]) {
                    (Some(m), true) => {
                        if m.source() != &self.objects[i] || m.target() != &self.objects[j] {
                            return ax(format!("map {i}→{j} has the wrong endpoints"));
                        }
                    }
                    (None, false) => {}
                    (Some(_), false) => return ax(format!("map {i}→{j} without {i} ≤ {j}")),
                    (None, true) => return ax(format!("missing map {i}→{j}")),
                }
            }
            if !self.map(i, i).equiv(&Morphism::identity(&self.objects[i])) {
                return ax(format!("map {i}→{i} is not the identity"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.le[i][j] && self.le[j][k] && !self.map(j, k).compose(self.map(i, j))?.equiv(self.map(i, k)) {
                        return ax(format!("f({j},{k}) ∘ f({i},{j}) ≠ f({i},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    fn map(&self, i: usize, j: usize) -> &Morphism {
        self.maps[i][j].as_ref().expect("checked")
    }
}

/// The colimit of a finite directed system is its value at the top element.
pub fn finite_system_colimit(s: &FiniteDirectedSystem) -> Result<(FpModule, Vec<Morphism>)> {
    s.check_axioms()?;
    let n = s.objects.len();
    if n == 0 {
        return Err(Error::NotDirected("empty index".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if !(0..n).any(|k| s.le[i][k] && s.le[j][k]) {
                return Err(Error::NotDirected(format!("{i} and {j} have no upper bound")));
            }
        }
    }
    let top = (0..n)
        .find(|&t| (0..n).all(|i| s.le[i][t]))
        .ok_or_else(|| Error::InvariantViolation("directed finite poset without a top".into()))?;
    let canonical: Vec<Morphism> = (0..n).map(|i| s.map(i, top).clone()).collect();
    for i in 0..n {
        for j in 0..n {
            if s.le[i][j] && !canonical[j].compose(s.map(i, j))?.equiv(&canonical[i]) {
                return Err(Error::InvariantViolation("cocone does not commute".into()));
            }
        }
    }
    Ok((s.objects[top].clone(), canonical))
}

/// `N′ = ker ψ` together with the checks that make `R^J / N′` free and
/// `N ⊆ N′`.
#[derive(Clone, Debug)]
pub struct Enlargement {
    pub n_prime: Mat,
    /// `N = N′ · coefficients`.
    pub coefficients: Mat,
    pub quotient: FpModule,
}

pub fn enlarge_to_free(m: &FpModule, psi: &Mat, n: &Mat) -> Result<Enlargement> {
    let ring = m.ring();
    if !ring.is_euclidean() {
        return Err(Error::UnsupportedRing(format!("{ring} is not a Euclidean domain")));
    }
    if !m.invariants().torsion.is_empty() {
        return Err(Error::PreconditionViolation("M has torsion".into()));
    }
    if psi.rows() != m.gens() || n.rows() != psi.cols() || psi.ring() != ring || n.ring() != ring {
        return Err(Error::DimensionMismatch("ψ : R^J → M and N ⊆ R^J".into()));
    }
    if !m.is_zero_elem(&psi.mul(n)) {
        return Err(Error::PreconditionViolation("N is not contained in ker ψ".into()));
    }
    let free = FpModule::free(ring, psi.cols());
    let (_, incl) = kernel(&Morphism::new(&free, m, psi.clone())?)?;
    let n_prime = column_basis(incl.mat())?;
    if !m.is_zero_elem(&psi.mul(&n_prime)) {
        return Err(Error::InvariantViolation("N′ ⊄ ker ψ".into()));
    }
    let quotient = FpModule::new(ring, n_prime.clone())?;
    if !quotient.invariants().torsion.is_empty() {
        return Err(Error::InvariantViolation("R^J / N′ has torsion".into()));
    }
    let coefficients = solve_linear(&n_prime, n)?.ok_or_else(|| Error::InvariantViolation("N ⊄ N′".into()))?;
    Ok(Enlargement { n_prime, coefficients, quotient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDesc;

    const Z: RingDesc = RingDesc::Integers;

    fn times(m: &FpModule, k: i64) -> Morphism {
        Morphism::new(m, m, Mat::scalar(m.ring(), m.gens(), &m.ring().from_i64(k))).unwrap()
    }

    fn tower(m: &FpModule, k: i64, d: Direction) -> Tower {
        Tower::new(times(m, k), d).unwrap()
    }

    #[test]
    fn forward_ml() {
        let m = FpModule::diagonal(Z, &[6, 0]);
        let v = tower_ml_check(&tower(&m, 1, Direction::Forward), 3).unwrap();
        assert_eq!(v.level(), Some(0));
        let zz = FpModule::free(Z, 1);
        let v = tower_ml_check(&tower(&zz, 2, Direction::Forward), 10).unwrap();
        assert!(matches!(v.status, MLStatus::UnknownAtHorizon));
        let z4 = FpModule::diagonal(Z, &[4]);
        let v = tower_ml_check(&tower(&z4, 2, Direction::Forward), 4).unwrap();
        assert_eq!(v.level(), Some(2));
        let MLStatus::ML { factor: Some(h), .. } = v.status else { panic!() };
        assert!(h.compose(&power(&times(&z4, 2), 3)).unwrap().equiv(&power(&times(&z4, 2), 2)));
        let z3 = FpModule::diagonal(Z, &[3]);
        assert_eq!(tower_ml_check(&tower(&z3, 2, Direction::Forward), 2).unwrap().level(), Some(0));
    }

    #[test]
    fn backward_stabilization() {
        let zz = FpModule::free(Z, 1);
        assert_eq!(inverse_tower_stabilization(&tower(&zz, 1, Direction::Backward), 2).unwrap().level(), Some(0));
        let v = inverse_tower_stabilization(&tower(&zz, 2, Direction::Backward), 10).unwrap();
        assert!(matches!(v.status, MLStatus::UnknownAtHorizon));
        let z4 = FpModule::diagonal(Z, &[4]);
        assert_eq!(inverse_tower_stabilization(&tower(&z4, 2, Direction::Backward), 4).unwrap().level(), Some(2));
        assert!(inverse_tower_stabilization(&tower(&z4, 2, Direction::Forward), 4).is_err());
    }

    fn z8_fixture() -> (Tower, Tower, Tower, Morphism, Morphism) {
        let z4 = FpModule::diagonal(Z, &[4]);
        let z8 = FpModule::diagonal(Z, &[8]);
        let z2 = FpModule::diagonal(Z, &[2]);
        let f = Morphism::new(&z4, &z8, Mat::from_i64(Z, 1, 1, &[2])).unwrap();
        let g = Morphism::new(&z8, &z2, Mat::from_i64(Z, 1, 1, &[1])).unwrap();
        (
            tower(&z4, 2, Direction::Backward),
            tower(&z8, 2, Direction::Backward),
            tower(&z2, 0, Direction::Backward),
            f,
            g,
        )
    }

    #[test]
    fn surjective_lift_with_repairs() {
        let (a, b, c, f, g) = z8_fixture();
        let cs: Vec<Mat> = [0, 0, 0, 1].iter().map(|&v| Mat::from_i64(Z, 1, 1, &[v])).collect();
        let bs = tower_surjective_lift(&a, &b, &c, &f, &g, &cs, 3).unwrap();
        assert_eq!(bs.len(), 4);
        for i in 0..3 {
            assert!(b.object.elems_equal(&b.step.apply(&bs[i + 1]), &bs[i]));
        }
        for i in 0..4 {
            assert!(c.object.elems_equal(&g.apply(&bs[i]), &cs[i]));
        }
        let bad: Vec<Mat> = [1, 0, 0, 1].iter().map(|&v| Mat::from_i64(Z, 1, 1, &[v])).collect();
        let err = tower_surjective_lift(&a, &b, &c, &f, &g, &bad, 3).unwrap_err();
        assert_eq!(err, Error::HypothesisViolation { hypothesis: "c family compatible".into(), level: 0 });
    }

    #[test]
    fn constant_towers_lift() {
        let zz = FpModule::free(Z, 1);
        let z2 = FpModule::free(Z, 2);
        let f = Morphism::new(&zz, &z2, Mat::from_i64(Z, 2, 1, &[1, 0])).unwrap();
        let g = Morphism::new(&z2, &zz, Mat::from_i64(Z, 1, 2, &[0, 1])).unwrap();
        let cs = vec![Mat::from_i64(Z, 1, 1, &[5]); 3];
        let (a, b, c) = (tower(&zz, 1, Direction::Backward), tower(&z2, 1, Direction::Backward), tower(&zz, 1, Direction::Backward));
        let bs = tower_surjective_lift(&a, &b, &c, &f, &g, &cs, 2).unwrap();
        assert!(bs.iter().all(|x| g.apply(x) == cs[0]));
    }

    #[test]
    fn non_stabilizing_kernel_fails() {
        let zz = FpModule::free(Z, 1);
        let zero = FpModule::zero(Z);
        let f = Morphism::identity(&zz);
        let g = Morphism::zero(&zz, &zero);
        let (a, b, c) = (tower(&zz, 2, Direction::Backward), tower(&zz, 2, Direction::Backward), tower(&zero, 1, Direction::Backward));
        let cs = vec![Mat::zeros(Z, 0, 1); 5];
        let err = tower_surjective_lift(&a, &b, &c, &f, &g, &cs, 4).unwrap_err();
        assert_eq!(err, Error::LiftFailedAtHorizon(4));
    }

    #[test]
    fn colimits() {
        let zz = FpModule::free(Z, 1);
        let le = vec![vec![true, true, true], vec![false, true, true], vec![false, false, true]];
        let t2 = times(&zz, 2);
        let t4 = times(&zz, 4);
        let id = Morphism::identity(&zz);
        let maps = vec![
            vec![Some(id.clone()), Some(t2.clone()), Some(t4)],
            vec![None, Some(id.clone()), Some(t2.clone())],
            vec![None, None, Some(id.clone())],
        ];
        let s = FiniteDirectedSystem { le: le.clone(), objects: vec![zz.clone(); 3], maps: maps.clone() };
        let (l, can) = finite_system_colimit(&s).unwrap();
        assert_eq!(l, zz);
        assert!(can[0].equiv(&times(&zz, 4)) && can[1].equiv(&t2) && can[2].equiv(&id));
        let mut broken = maps;
        broken[0][2] = Some(times(&zz, 3));
        let s = FiniteDirectedSystem { le, objects: vec![zz.clone(); 3], maps: broken };
        assert!(matches!(finite_system_colimit(&s), Err(Error::AxiomViolation(_))));
        let s = FiniteDirectedSystem {
            le: vec![vec![true, false], vec![false, true]],
            objects: vec![zz.clone(); 2],
            maps: vec![vec![Some(id.clone()), None], vec![None, Some(id)]],
        };
        assert!(matches!(finite_system_colimit(&s), Err(Error::NotDirected(_))));
    }

    fn same_span(a: &Mat, b: &Mat) -> bool {
        solve_linear(a, b).unwrap().is_some() && solve_linear(b, a).unwrap().is_some()
    }

    #[test]
    fn enlargement() {
        let zz = FpModule::free(Z, 1);
        let psi = Mat::from_i64(Z, 1, 2, &[2, 3]);
        let n = Mat::from_i64(Z, 2, 1, &[3, -2]);
        let e = enlarge_to_free(&zz, &psi, &n).unwrap();
        assert!(same_span(&e.n_prime, &n));
        assert_eq!(e.quotient.invariants().free_rank, 1);
        let e = enlarge_to_free(&zz, &Mat::from_i64(Z, 1, 2, &[2, 4]), &Mat::zeros(Z, 2, 0)).unwrap();
        assert!(same_span(&e.n_prime, &Mat::from_i64(Z, 2, 1, &[2, -1])));
        assert!(e.quotient.invariants().torsion.is_empty());
        let e = enlarge_to_free(&FpModule::free(Z, 2), &Mat::identity(Z, 2), &Mat::zeros(Z, 2, 0)).unwrap();
        assert_eq!(e.n_prime.cols(), 0);
        let bad = enlarge_to_free(&zz, &psi, &Mat::from_i64(Z, 2, 1, &[1, 1]));
        assert!(matches!(bad, Err(Error::PreconditionViolation(_))));
        let z6 = RingDesc::IntegersMod(6);
        let bad = enlarge_to_free(&FpModule::free(z6, 1), &Mat::identity(z6, 1), &Mat::zeros(z6, 1, 0));
        assert!(matches!(bad, Err(Error::UnsupportedRing(_))));
    }
}
