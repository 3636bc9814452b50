//! Hom modules, tensor products, base change, and the flatness and
//! projectivity deciders.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::module::{kernel, FpModule, Morphism, SubmoduleRep};
use crate::normal_form::{column_basis, kernel_basis, snf, solve_linear};
use crate::ring::{divisors, factorize, RingDesc, RingMap};

fn same_ring(m: &FpModule, n: &FpModule) -> Result<()> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), n.ring())));
    }
    Ok(())
}

/// One diagonal coordinate of the target after Smith reduction: the rows
/// `p` with `p·source_rels ≡ 0 (mod d)`, as a basis.
#[derive(Clone, Debug)]
struct HomBlock {
    row: usize,
    basis: Mat,
}

/// `Hom(M, N)` as a finitely presented module, with coordinates for morphisms.
///
/// After `U·rels(N)·V = diag(dᵢ)`, a map `X` is well defined iff each row of
/// `U·X` kills `rels(M)` modulo `dᵢ`, and it is zero iff each row lies in
/// `dᵢ·R^m`. Each row therefore contributes an independent block.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub underlying: FpModule,
    source: FpModule,
    target: FpModule,
    u: Mat,
    u_inv: Mat,
    blocks: Vec<HomBlock>,
}

pub fn hom_module(m: &FpModule, n: &FpModule) -> Result<HomModule> {
    same_ring(m, n)?;
    let ring = m.ring();
    let base = ring.base();
    let mrel = m.effective_rels();
    let nrel = n.effective_rels();
    let sf = snf(&nrel)?;
    let mt = mrel.transpose();
    let mut blocks = Vec::new();
    let mut block_rels = Mat::zeros(base, 0, 0);
    for row in 0..n.gens() {
        let d = if row < sf.rank { sf.invariant_factors[row].clone() } else { base.zero() };
        if base.is_unit(&d) {
            continue;
        }
        let modulus = if base.is_zero(&d) {
            Mat::zeros(base, mrel.cols(), 0)
        } else {
            Mat::scalar(base, mrel.cols(), &d)
        };
        let k = kernel_basis(&mt.hcat(&modulus))?;
        let basis = column_basis(&k.row_range(0, m.gens()))?;
        let rels = if base.is_zero(&d) {
            Mat::zeros(base, basis.cols(), 0)
        } else {
            solve_linear(&basis, &Mat::scalar(base, m.gens(), &d))?
                .ok_or_else(|| Error::InvariantViolation("d·R^m outside the hom block".into()))?
        };
        block_rels = block_rels.block_diag(&rels);
        blocks.push(HomBlock { row, basis });
    }
    let underlying = FpModule::new(ring, block_rels.reduce_to(ring))?;
    Ok(HomModule { underlying, source: m.clone(), target: n.clone(), u: sf.u, u_inv: sf.u_inv, blocks })
}

impl HomModule {
    pub fn source(&self) -> &FpModule {
        &self.source
    }

    pub fn target(&self) -> &FpModule {
        &self.target
    }

    /// Coordinates of a morphism as an element of [`Self::underlying`].
    pub fn encode(&self, f: &Morphism) -> Result<Mat> {
        if f.source() != &self.source || f.target() != &self.target {
            return Err(Error::DimensionMismatch("morphism is not in this hom module".into()));
        }
        let ring = self.source.ring();
        let base = ring.base();
        let xp = self.u.mul(&f.mat().lift());
        let mut out = Mat::zeros(base, 0, 1);
        for b in &self.blocks {
            let row = xp.row(b.row).transpose();
            let y = solve_linear(&b.basis, &row)?
                .ok_or_else(|| Error::InvariantViolation("morphism row outside its hom block".into()))?;
            out = out.vcat(&y);
        }
        Ok(out.reduce_to(ring))
    }

    /// The morphism with the given coordinates.
    pub fn decode(&self, coords: &Mat) -> Result<Morphism> {
        if coords.rows() != self.underlying.gens() || coords.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "hom element needs {} coordinates",
                self.underlying.gens()
            )));
        }
        let ring = self.source.ring();
        let base = ring.base();
        let c = coords.lift();
        let mut xp = Mat::zeros(base, self.target.gens(), self.source.gens());
        let mut offset = 0;
        for b in &self.blocks {
            let k = b.basis.cols();
            let row = b.basis.mul(&c.row_range(offset, offset + k));
            for j in 0..self.source.gens() {
                xp.set(b.row, j, row.get(j, 0).clone());
            }
            offset += k;
        }
        let x = self.u_inv.mul(&xp).reduce_to(ring);
        Morphism::new(&self.source, &self.target, x)
    }
}

/// `M ⊗ N`; generator `(i, j)` has index `i·N.gens + j`.
pub fn tensor(m: &FpModule, n: &FpModule) -> Result<FpModule> {
    same_ring(m, n)?;
    let ring = m.ring();
    let a = m.rels().kron(&Mat::identity(ring, n.gens()));
    let b = Mat::identity(ring, m.gens()).kron(n.rels());
    FpModule::new(ring, a.hcat(&b))
}

/// `f ⊗ g`.
pub fn tensor_mor(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    if f.ring() != g.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", f.ring(), g.ring())));
    }
    let src = tensor(f.source(), g.source())?;
    let tgt = tensor(f.target(), g.target())?;
    Morphism::new(&src, &tgt, f.mat().kron(g.mat()))
}

/// Extension of scalars `S ⊗_R M`.
pub fn base_change(phi: &RingMap, m: &FpModule) -> Result<FpModule> {
    if m.ring() != phi.source {
        return Err(Error::RingMismatch(format!("module over {} but map starts at {}", m.ring(), phi.source)));
    }
    FpModule::new(phi.target, m.rels().map_ring(phi))
}

/// `S ⊗_R f`, transporting the well-definedness witness entrywise.
pub fn base_change_mor(phi: &RingMap, f: &Morphism) -> Result<Morphism> {
    let src = base_change(phi, f.source())?;
    let tgt = base_change(phi, f.target())?;
    Ok(Morphism::from_parts(src, tgt, f.mat().map_ring(phi), f.witness().map_ring(phi)))
}

/// Multiplication by a scalar on a module.
fn scalar_endo(m: &FpModule, s: u64) -> Morphism {
    let ring = m.ring();
    Morphism::identity(m).scale(&ring.from_i64(s as i64))
}

/// Flatness decided without inspecting invariant factors.
///
/// * fields: always flat;
/// * `Z`, `Z[i]`: torsion-free, i.e. the relation span is saturated; its
///   double annihilator adds nothing;
/// * `Z/n`: for every `d | n`, `Tor₁(R/(d), M) = ann_M(d) / (n/d)·M` vanishes.
pub fn is_flat(m: &FpModule) -> Result<bool> {
    let ring = m.ring();
    match ring {
        RingDesc::Rationals | RingDesc::PrimeField(_) => Ok(true),
        RingDesc::Integers | RingDesc::GaussianIntegers => {
            let rel = m.rels();
            let annihilator = kernel_basis(&rel.transpose())?;
            let saturation = kernel_basis(&annihilator.transpose())?;
            Ok(solve_linear(rel, &saturation)?.is_some())
        }
        RingDesc::IntegersMod(n) => {
            for d in divisors(n) {
                if d == 1 || d == n {
                    continue;
                }
                let (_, incl) = kernel(&scalar_endo(m, d))?;
                let ann = crate::module::image(&incl);
                let multiples = SubmoduleRep::new(m, Mat::scalar(ring, m.gens(), &ring.from_i64((n / d) as i64)))?;
                if !ann.equals(&multiples) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Projectivity read off the invariant factors. Over `Z/n` a cyclic summand
/// `R/(d)` is projective iff `v_p(d) = v_p(n)` for every prime `p | d`.
pub fn is_projective_by_invariants(m: &FpModule) -> bool {
    let inv = m.invariants();
    match m.ring() {
        RingDesc::IntegersMod(n) => inv.torsion.iter().all(|d| {
            let d = d.as_int().and_then(|v| u64::try_from(v.clone()).ok()).expect("small residue");
            factorize(d).iter().all(|&(p, e)| {
                let mut vn = 0;
                let mut k = n;
                while k % p == 0 {
                    k /= p;
                    vn += 1;
                }
                vn == e
            })
        }),
        _ => inv.torsion.is_empty(),
    }
}

/// Search for a section of the canonical surjection `R^g → M`.
///
/// A section has matrix `S = I + rels·Z`; well-definedness `S·rels = 0`
/// is the linear system `rels·Z·rels = −rels` in the entries of `Z`.
pub fn split_section(m: &FpModule) -> Result<Option<Morphism>> {
    let ring = m.ring();
    let rel = m.rels();
    let (g, c) = (rel.rows(), rel.cols());
    let free = FpModule::free(ring, g);
    if c == 0 {
        return Ok(Some(Morphism::new(m, &free, Mat::identity(ring, g))?));
    }
    // column-major vec: vec(A·Z·B) = (Bᵀ ⊗ A)·vec(Z)
    let system = rel.transpose().kron(rel);
    let rhs = Mat::from_fn(ring, g * c, 1, |k, _| ring.neg(rel.get(k % g, k / g)));
    let Some(vz) = solve_linear(&system, &rhs)? else {
        return Ok(None);
    };
    let z = Mat::from_fn(ring, c, g, |i, j| vz.get(j * c + i, 0).clone());
    let s = Mat::identity(ring, g).add(&rel.mul(&z));
    Ok(Some(Morphism::new(m, &free, s)?))
}

/// Projectivity, decided twice: by the invariant-factor criterion and by
/// the split-surjection search. The two must agree.
pub fn is_projective(m: &FpModule) -> Result<bool> {
    let by_invariants = is_projective_by_invariants(m);
    let by_section = split_section(m)?.is_some();
    if by_invariants != by_section {
        return Err(Error::DeciderDisagreement(format!(
            "invariant criterion says {by_invariants}, section search says {by_section} for relations {}",
            m.rels()
        )));
    }
    Ok(by_invariants)
}
