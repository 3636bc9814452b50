//! Finitely presented modules, morphisms and submodules.
//!
//! A module is the cokernel of its relation matrix `rels : R^c → R^g`.
//! Over `Z/n` every computation runs on the integer lift with `n·I`
//! appended to the relations (see [`FpModule::effective_rels`]).

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::normal_form::{column_basis, kernel_basis, snf, solve_left_mod, solve_linear};
use crate::ring::{RingDesc, RingElem};

/// Isomorphism invariants: `M ≅ ⊕ R/(dᵢ) ⊕ R^free_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleInvariants {
    /// Proper torsion factors `d₁ | d₂ | ⋯` (no units, no zeros; over `Z/n` no `n`).
    pub torsion: Vec<RingElem>,
    pub free_rank: usize,
}

impl ModuleInvariants {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

#[derive(Clone, Debug)]
pub struct FpModule {
    ring: RingDesc,
    rels: Mat,
    invariants: OnceLock<ModuleInvariants>,
}

impl PartialEq for FpModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.rels == other.rels
    }
}

impl Eq for FpModule {}

impl FpModule {
    pub fn new(ring: RingDesc, rels: Mat) -> Result<Self> {
        if rels.ring() != ring {
            return Err(Error::RingMismatch(format!("relations over {} for a module over {ring}", rels.ring())));
        }
        ring.validate()?;
        Ok(FpModule { ring, rels, invariants: OnceLock::new() })
    }

    pub fn free(ring: RingDesc, rank: usize) -> Self {
        FpModule { ring, rels: Mat::zeros(ring, rank, 0), invariants: OnceLock::new() }
    }

    pub fn zero(ring: RingDesc) -> Self {
        Self::free(ring, 0)
    }

    /// `R/(d)` on one generator.
    pub fn cyclic(ring: RingDesc, d: &RingElem) -> Self {
        FpModule { ring, rels: Mat::column(ring, vec![d.clone()]), invariants: OnceLock::new() }
    }

    /// Module from a relation matrix given by small integers.
    pub fn from_i64(ring: RingDesc, gens: usize, nrels: usize, vals: &[i64]) -> Self {
        FpModule { ring, rels: Mat::from_i64(ring, gens, nrels, vals), invariants: OnceLock::new() }
    }

    /// `⊕ R/(dᵢ)` with one generator per entry.
    pub fn diagonal(ring: RingDesc, ds: &[i64]) -> Self {
        let d: Vec<RingElem> = ds.iter().map(|&v| ring.from_i64(v)).collect();
        FpModule { ring, rels: Mat::diag(ring, &d), invariants: OnceLock::new() }
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    pub fn gens(&self) -> usize {
        self.rels.rows()
    }

    pub fn rels(&self) -> &Mat {
        &self.rels
    }

    /// Relations over the Euclidean base ring; `Z/n` appends `n·I`.
    pub fn effective_rels(&self) -> Mat {
        match self.ring.modulus() {
            Some(n) => {
                let z = RingDesc::Integers;
                self.rels.lift().hcat(&Mat::scalar(z, self.gens(), &z.from_i64(n as i64)))
            }
            None => self.rels.clone(),
        }
    }

    pub fn invariants(&self) -> &ModuleInvariants {
        self.invariants.get_or_init(|| compute_invariants(self))
    }

    pub fn is_zero(&self) -> bool {
        self.invariants().is_zero()
    }

    /// The zero element (column vector).
    pub fn zero_elem(&self) -> Mat {
        Mat::zeros(self.ring, self.gens(), 1)
    }

    /// Whether `x` (a column, or several) is zero in the module.
    pub fn is_zero_elem(&self, x: &Mat) -> bool {
        solve_linear(&self.effective_rels(), &x.lift()).expect("shapes agree").is_some()
    }

    pub fn elems_equal(&self, x: &Mat, y: &Mat) -> bool {
        self.is_zero_elem(&x.sub(y))
    }

    /// Number of elements when finite and small enough to count.
    pub fn cardinality(&self) -> Option<BigInt> {
        let inv = self.invariants();
        let mut total = BigInt::one();
        let per_free: BigInt = match self.ring {
            RingDesc::IntegersMod(n) | RingDesc::PrimeField(n) => BigInt::from(n),
            _ if inv.free_rank == 0 => BigInt::one(),
            _ => return None,
        };
        for _ in 0..inv.free_rank {
            total *= &per_free;
        }
        for d in &inv.torsion {
            let size = match (self.ring, d) {
                (RingDesc::GaussianIntegers, RingElem::Gauss(g)) => g.norm(),
                (_, RingElem::Int(v)) => v.abs(),
                _ => return None,
            };
            total *= size;
        }
        Some(total)
    }

    /// All elements, as canonical coordinate columns, for finite modules
    /// over `Z`, `Z/n` or `F_p` with at most `limit` elements.
    pub fn elements(&self, limit: usize) -> Option<Vec<Mat>> {
        if matches!(self.ring, RingDesc::GaussianIntegers | RingDesc::Rationals) && !self.is_zero() {
            return None;
        }
        let size = self.cardinality()?.to_usize()?;
        if size > limit {
            return None;
        }
        let base = self.ring.base();
        let sf = snf(&self.effective_rels()).ok()?;
        // generator j of the diagonal form is column j of u⁻¹
        let mut orders = Vec::new();
        for j in 0..self.gens() {
            let d = if j < sf.rank { sf.invariant_factors[j].clone() } else { base.zero() };
            let order = match (&d, self.ring) {
                (RingElem::Int(v), _) if !v.is_zero() => v.abs().to_usize()?,
                (_, RingDesc::PrimeField(p)) => p as usize,
                _ => return None,
            };
            orders.push(order);
        }
        let mut out = Vec::with_capacity(size);
        let mut coeffs = vec![0usize; orders.len()];
        loop {
            let mut v = Mat::zeros(base, self.gens(), 1);
            for (j, &c) in coeffs.iter().enumerate() {
                if c > 0 {
                    v = v.add(&sf.u_inv.col(j).scale(&base.from_i64(c as i64)));
                }
            }
            out.push(v.reduce_to(self.ring));
            let mut k = 0;
            loop {
                if k == coeffs.len() {
                    return Some(out);
                }
                coeffs[k] += 1;
                if coeffs[k] < orders[k] {
                    break;
                }
                coeffs[k] = 0;
                k += 1;
            }
        }
    }
}

fn compute_invariants(m: &FpModule) -> ModuleInvariants {
    let base = m.ring.base();
    let sf = snf(&m.effective_rels()).expect("base ring is Euclidean");
    match m.ring {
        RingDesc::IntegersMod(n) => {
            let n = base.from_i64(n as i64);
            let mut torsion = Vec::new();
            let mut free_rank = 0;
            for d in &sf.invariant_factors {
                if *d == n {
                    free_rank += 1;
                } else if !base.is_unit(d) {
                    torsion.push(m.ring.from_bigint(d.as_int().expect("integer").clone()));
                }
            }
            ModuleInvariants { torsion, free_rank }
        }
        _ => {
            let torsion = sf
                .invariant_factors
                .iter()
                .filter(|d| !base.is_zero(d) && !base.is_unit(d))
                .cloned()
                .collect();
            ModuleInvariants { torsion, free_rank: m.gens() - sf.rank }
        }
    }
}

/// Construct a module from a relation matrix.
pub fn mk_module(ring: RingDesc, rels: Mat) -> Result<FpModule> {
    FpModule::new(ring, rels)
}

pub fn invariant_factors(m: &FpModule) -> ModuleInvariants {
    m.invariants().clone()
}

pub fn is_iso(m: &FpModule, n: &FpModule) -> Result<bool> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), n.ring())));
    }
    Ok(m.invariants() == n.invariants())
}

// ---- morphisms -------------------------------------------------------------

/// A module map given on generators, with a witness `X` such that
/// `mat·source.rels = target.rels·X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: FpModule,
    target: FpModule,
    mat: Mat,
    witness: Mat,
}

impl Morphism {
    pub fn new(source: &FpModule, target: &FpModule, mat: Mat) -> Result<Self> {
        let ring = source.ring();
        if target.ring() != ring || mat.ring() != ring {
            return Err(Error::RingMismatch(format!(
                "morphism {} -> {} with matrix over {}",
                ring,
                target.ring(),
                mat.ring()
            )));
        }
        if mat.rows() != target.gens() || mat.cols() != source.gens() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but the map needs {}x{}",
                mat.rows(),
                mat.cols(),
                target.gens(),
                source.gens()
            )));
        }
        let rhs = mat.mul(source.rels());
        let witness = solve_linear(target.rels(), &rhs)?.ok_or(Error::NotWellDefined)?;
        Ok(Morphism { source: source.clone(), target: target.clone(), mat, witness })
    }

    /// Assemble a morphism whose witness is already known to satisfy the
    /// well-definedness equation.
    pub(crate) fn from_parts(source: FpModule, target: FpModule, mat: Mat, witness: Mat) -> Self {
        debug_assert!(mat.mul(source.rels()) == target.rels().mul(&witness));
        Morphism { source, target, mat, witness }
    }

    pub fn identity(m: &FpModule) -> Self {
        let ring = m.ring();
        Morphism {
            source: m.clone(),
            target: m.clone(),
            mat: Mat::identity(ring, m.gens()),
            witness: Mat::identity(ring, m.rels().cols()),
        }
    }

    pub fn zero(source: &FpModule, target: &FpModule) -> Self {
        let ring = source.ring();
        Morphism {
            source: source.clone(),
            target: target.clone(),
            mat: Mat::zeros(ring, target.gens(), source.gens()),
            witness: Mat::zeros(ring, target.rels().cols(), source.rels().cols()),
        }
    }

    pub fn source(&self) -> &FpModule {
        &self.source
    }

    pub fn target(&self) -> &FpModule {
        &self.target
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn witness(&self) -> &Mat {
        &self.witness
    }

    pub fn ring(&self) -> RingDesc {
        self.source.ring()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Morphism) -> Result<Morphism> {
        if first.target != self.source {
            return Err(Error::DimensionMismatch("composition of non-composable morphisms".into()));
        }
        Ok(Morphism {
            source: first.source.clone(),
            target: self.target.clone(),
            mat: self.mat.mul(&first.mat),
            witness: self.witness.mul(&first.witness),
        })
    }

    fn check_parallel(&self, o: &Morphism) -> Result<()> {
        if self.source != o.source || self.target != o.target {
            return Err(Error::DimensionMismatch("morphisms are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Morphism) -> Result<Morphism> {
        self.check_parallel(o)?;
        Ok(Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            mat: self.mat.add(&o.mat),
            witness: self.witness.add(&o.witness),
        })
    }

    pub fn sub(&self, o: &Morphism) -> Result<Morphism> {
        self.check_parallel(o)?;
        Ok(Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            mat: self.mat.sub(&o.mat),
            witness: self.witness.sub(&o.witness),
        })
    }

    pub fn scale(&self, s: &RingElem) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            mat: self.mat.scale(s),
            witness: self.witness.scale(s),
        }
    }

    /// Equality modulo the target relations.
    pub fn equiv(&self, o: &Morphism) -> bool {
        self.source.gens() == o.source.gens()
            && self.target == o.target
            && self.target.is_zero_elem(&self.mat.sub(&o.mat))
    }

    pub fn is_zero(&self) -> bool {
        self.target.is_zero_elem(&self.mat)
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        self.mat.mul(x)
    }

    pub fn is_surjective(&self) -> bool {
        cokernel(self).0.is_zero()
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(kernel(self)?.0.is_zero())
    }

    /// Re-check `mat·source.rels = target.rels·witness`.
    pub fn witness_holds(&self) -> bool {
        self.mat.mul(self.source.rels()) == self.target.rels().mul(&self.witness)
    }
}

pub fn mk_morphism(source: &FpModule, target: &FpModule, mat: Mat) -> Result<Morphism> {
    Morphism::new(source, target, mat)
}

/// A morphism `h : f.target → g.target` with `h ∘ f ≡ g`, if one exists.
///
/// Both the well-definedness of `h` and the factorization are congruences
/// modulo the relations of `g.target`, solved together by
/// [`solve_left_mod`].
pub fn factor_through(f: &Morphism, g: &Morphism) -> Result<Option<Morphism>> {
    if f.source() != g.source() {
        return Err(Error::SourceMismatch);
    }
    let ring = f.ring();
    let base = ring.base();
    let n = f.target();
    let m2 = g.target();
    let nrel = n.effective_rels();
    let a = nrel.hcat(&f.mat().lift());
    let b = Mat::zeros(base, m2.gens(), nrel.cols()).hcat(&g.mat().lift());
    match solve_left_mod(&a, &b, &m2.effective_rels())? {
        Some(p) => Ok(Some(Morphism::new(n, m2, p.reduce_to(ring))?)),
        None => Ok(None),
    }
}

/// Basis (over the base ring) of `{x : a·x ∈ span(rel)}`.
fn preimage_basis(a: &Mat, rel: &Mat) -> Result<Mat> {
    let k = kernel_basis(&a.hcat(rel))?;
    column_basis(&k.row_range(0, a.cols()))
}

/// The submodule of `ambient` spanned by `gens` (base-ring lift, containing
/// the ambient relations) presented as a module with its inclusion.
fn present_submodule(ambient: &FpModule, gens_base: &Mat) -> Result<(FpModule, Morphism)> {
    let ring = ambient.ring();
    let rel = ambient.effective_rels();
    let basis = column_basis(&gens_base.hcat(&rel))?;
    let rels = solve_linear(&basis, &rel)?
        .ok_or_else(|| Error::InvariantViolation("relations outside their own span".into()))?;
    let sub = FpModule::new(ring, rels.reduce_to(ring))?;
    let incl = Morphism::new(&sub, ambient, basis.reduce_to(ring))?;
    Ok((sub, incl))
}

/// Kernel with its inclusion into the source.
pub fn kernel(f: &Morphism) -> Result<(FpModule, Morphism)> {
    let pre = preimage_basis(&f.mat.lift(), &f.target.effective_rels())?;
    present_submodule(&f.source, &pre)
}

/// Cokernel with the canonical projection from the target.
pub fn cokernel(f: &Morphism) -> (FpModule, Morphism) {
    let ring = f.ring();
    let c = FpModule { ring, rels: f.target.rels.hcat(&f.mat), invariants: OnceLock::new() };
    let witness = Mat::identity(ring, f.target.rels.cols()).vcat(&Mat::zeros(ring, f.mat.cols(), f.target.rels.cols()));
    let proj = Morphism { source: f.target.clone(), target: c.clone(), mat: Mat::identity(ring, f.target.gens()), witness };
    (c, proj)
}

pub fn image(f: &Morphism) -> SubmoduleRep {
    SubmoduleRep { ambient: f.target.clone(), gens: f.mat.clone() }
}

/// `M ⊕ N` with its injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub sum: FpModule,
    pub inj1: Morphism,
    pub inj2: Morphism,
    pub proj1: Morphism,
    pub proj2: Morphism,
}

pub fn direct_sum(m: &FpModule, n: &FpModule) -> Result<DirectSum> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), n.ring())));
    }
    let ring = m.ring();
    let sum = FpModule::new(ring, m.rels.block_diag(&n.rels))?;
    let (a, b) = (m.gens(), n.gens());
    let (ra, rb) = (m.rels.cols(), n.rels.cols());
    let id_a = Mat::identity(ring, a);
    let id_b = Mat::identity(ring, b);
    let inj1 = Morphism {
        source: m.clone(),
        target: sum.clone(),
        mat: id_a.vcat(&Mat::zeros(ring, b, a)),
        witness: Mat::identity(ring, ra).vcat(&Mat::zeros(ring, rb, ra)),
    };
    let inj2 = Morphism {
        source: n.clone(),
        target: sum.clone(),
        mat: Mat::zeros(ring, a, b).vcat(&id_b),
        witness: Mat::zeros(ring, ra, rb).vcat(&Mat::identity(ring, rb)),
    };
    let proj1 = Morphism {
        source: sum.clone(),
        target: m.clone(),
        mat: id_a.hcat(&Mat::zeros(ring, a, b)),
        witness: Mat::identity(ring, ra).hcat(&Mat::zeros(ring, ra, rb)),
    };
    let proj2 = Morphism {
        source: sum.clone(),
        target: n.clone(),
        mat: Mat::zeros(ring, b, a).hcat(&id_b),
        witness: Mat::zeros(ring, rb, ra).hcat(&Mat::identity(ring, rb)),
    };
    Ok(DirectSum { sum, inj1, inj2, proj1, proj2 })
}

pub fn quotient_by(sub: &SubmoduleRep) -> (FpModule, Morphism) {
    let ring = sub.ambient.ring();
    let amb = &sub.ambient;
    let q = FpModule { ring, rels: amb.rels.hcat(&sub.gens), invariants: OnceLock::new() };
    let witness = Mat::identity(ring, amb.rels.cols()).vcat(&Mat::zeros(ring, sub.gens.cols(), amb.rels.cols()));
    let proj = Morphism { source: amb.clone(), target: q.clone(), mat: Mat::identity(ring, amb.gens()), witness };
    (q, proj)
}

pub fn member(sub: &SubmoduleRep, x: &Mat) -> Result<bool> {
    sub.contains(x)
}

// ---- submodules --------------------------------------------------------------

/// Submodule of `ambient` generated by the columns of `gens` (taken together
/// with the ambient relations). No canonical form: equality is mutual membership.
#[derive(Clone, Debug)]
pub struct SubmoduleRep {
    ambient: FpModule,
    gens: Mat,
}

impl SubmoduleRep {
    pub fn new(ambient: &FpModule, gens: Mat) -> Result<Self> {
        if gens.ring() != ambient.ring() {
            return Err(Error::RingMismatch(format!("generators over {} in a module over {}", gens.ring(), ambient.ring())));
        }
        if gens.rows() != ambient.gens() {
            return Err(Error::DimensionMismatch(format!(
                "generator columns have {} coordinates, ambient has {} generators",
                gens.rows(),
                ambient.gens()
            )));
        }
        Ok(SubmoduleRep { ambient: ambient.clone(), gens })
    }

    pub fn zero(ambient: &FpModule) -> Self {
        SubmoduleRep { ambient: ambient.clone(), gens: Mat::zeros(ambient.ring(), ambient.gens(), 0) }
    }

    pub fn full(ambient: &FpModule) -> Self {
        SubmoduleRep { ambient: ambient.clone(), gens: Mat::identity(ambient.ring(), ambient.gens()) }
    }

    pub fn ambient(&self) -> &FpModule {
        &self.ambient
    }

    pub fn gens(&self) -> &Mat {
        &self.gens
    }

    fn spanning(&self) -> Mat {
        self.gens.lift().hcat(&self.ambient.effective_rels())
    }

    pub fn contains(&self, x: &Mat) -> Result<bool> {
        if x.rows() != self.ambient.gens() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} coordinates, ambient has {} generators",
                x.rows(),
                self.ambient.gens()
            )));
        }
        Ok(solve_linear(&self.spanning(), &x.lift())?.is_some())
    }

    /// Coefficients `c` with `x = gens·c` modulo the ambient relations.
    pub fn coefficients(&self, x: &Mat) -> Result<Option<Mat>> {
        let k = self.gens.cols();
        Ok(solve_linear(&self.spanning(), &x.lift())?.map(|y| y.row_range(0, k).reduce_to(self.ambient.ring())))
    }

    pub fn le(&self, other: &SubmoduleRep) -> bool {
        self.gens.cols() == 0 || other.contains(&self.gens).expect("same ambient")
    }

    pub fn equals(&self, other: &SubmoduleRep) -> bool {
        self.le(other) && other.le(self)
    }

    pub fn is_zero(&self) -> bool {
        self.ambient.is_zero_elem(&self.gens)
    }

    pub fn is_full(&self) -> bool {
        SubmoduleRep::full(&self.ambient).le(self)
    }

    pub fn sum(&self, other: &SubmoduleRep) -> SubmoduleRep {
        SubmoduleRep { ambient: self.ambient.clone(), gens: self.gens.hcat(&other.gens) }
    }

    pub fn intersection(&self, other: &SubmoduleRep) -> Result<SubmoduleRep> {
        let ring = self.ambient.ring();
        let g1 = self.gens.lift();
        let g2 = other.gens.lift();
        let system = g1.hcat(&g2.neg()).hcat(&self.ambient.effective_rels());
        let k = kernel_basis(&system)?;
        let a = k.row_range(0, g1.cols());
        let gens = g1.mul(&a);
        Ok(SubmoduleRep { ambient: self.ambient.clone(), gens: gens.reduce_to(ring) })
    }

    /// Whether `self ∩ other = 0`.
    pub fn disjoint(&self, other: &SubmoduleRep) -> Result<bool> {
        Ok(self.intersection(other)?.is_zero())
    }

    /// The image of this submodule under an endomorphism-compatible map.
    pub fn map(&self, f: &Morphism) -> Result<SubmoduleRep> {
        if f.source() != &self.ambient {
            return Err(Error::DimensionMismatch("map does not start at the ambient module".into()));
        }
        Ok(SubmoduleRep { ambient: f.target().clone(), gens: f.mat().mul(&self.gens) })
    }

    /// This submodule as a module in its own right, with its inclusion.
    pub fn as_module(&self) -> Result<(FpModule, Morphism)> {
        present_submodule(&self.ambient, &self.gens.lift())
    }
}
