//! Finite Kaplansky filtrations, internal direct sums, and the devissage of
//! a direct summand.

use crate::error::{Error, Result};
use crate::homtensor::is_projective;
use crate::matrix::Mat;
use crate::module::{FpModule, Morphism, SubmoduleRep};
use crate::normal_form::snf;

#[derive(Clone, Debug)]
pub struct KaplanskyFiltration {
    pub ambient: FpModule,
    /// `L + 1` stages from `0` to the whole module.
    pub stages: Vec<SubmoduleRep>,
    /// `complements[α]` complements `stages[α]` inside `stages[α + 1]`.
    pub complements: Vec<SubmoduleRep>,
}

/// `parts` form an internal direct sum equal to `total`.
#[derive(Clone, Debug)]
pub struct InternalDecomposition {
    pub ambient: FpModule,
    pub total: SubmoduleRep,
    pub parts: Vec<SubmoduleRep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationReport {
    pub valid: bool,
    /// First failing clause, with the stage index where it applies.
    pub violation: Option<String>,
    /// Always true: a finite filtration has no limit stages.
    pub limit_continuity_vacuous: bool,
}

fn span_of(ambient: &FpModule, subs: &[SubmoduleRep]) -> SubmoduleRep {
    subs.iter().fold(SubmoduleRep::zero(ambient), |acc, s| acc.sum(s))
}

fn first_violation(f: &KaplanskyFiltration) -> Result<Option<String>> {
    let len = f.complements.len();
    if f.stages.len() != len + 1 {
        return Ok(Some(format!("length: {} stages for {} complements", f.stages.len(), len)));
    }
    for s in f.stages.iter().chain(&f.complements) {
        if s.ambient() != &f.ambient {
            return Ok(Some("ambient: submodule of a different module".into()));
        }
    }
    if !f.stages[0].is_zero() {
        return Ok(Some("zero_eq_bot: stage 0 is not zero".into()));
    }
    if !f.stages[len].is_full() {
        return Ok(Some(format!("union_eq_top: stage {len} is not the whole module")));
    }
    for a in 0..len {
        if !f.stages[a].le(&f.stages[a + 1]) {
            return Ok(Some(format!("monotone: stage {a} ⊄ stage {}", a + 1)));
        }
    }
    for (a, c) in f.complements.iter().enumerate() {
        let (lo, hi) = (&f.stages[a], &f.stages[a + 1]);
        if !c.le(hi) {
            return Ok(Some(format!("succ_step: complement {a} ⊄ stage {}", a + 1)));
        }
        if !lo.disjoint(c)? {
            return Ok(Some(format!("succ_step: stage {a} meets complement {a}")));
        }
        if !hi.le(&lo.sum(c)) {
            return Ok(Some(format!("succ_step: stage {a} + complement {a} ≠ stage {}", a + 1)));
        }
    }
    Ok(None)
}

pub fn validate_filtration(f: &KaplanskyFiltration) -> Result<FiltrationReport> {
    let violation = first_violation(f)?;
    Ok(FiltrationReport { valid: violation.is_none(), violation, limit_continuity_vacuous: true })
}

impl InternalDecomposition {
    pub fn new(ambient: &FpModule, parts: Vec<SubmoduleRep>) -> Result<Self> {
        Self::inside(SubmoduleRep::full(ambient), parts)
    }

    pub fn inside(total: SubmoduleRep, parts: Vec<SubmoduleRep>) -> Result<Self> {
        let d = InternalDecomposition { ambient: total.ambient().clone(), total, parts };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |s: String| Err(Error::NotInternal(s));
        for (i, p) in self.parts.iter().enumerate() {
            if p.ambient() != &self.ambient {
                return bad(format!("part {i} lives in a different module"));
            }
            if !p.le(&self.total) {
                return bad(format!("part {i} is not inside the total"));
            }
            let others: Vec<SubmoduleRep> =
                self.parts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            if !p.disjoint(&span_of(&self.ambient, &others))? {
                return bad(format!("part {i} meets the span of the others"));
            }
        }
        if !self.total.le(&span_of(&self.ambient, &self.parts)) {
            return bad("parts do not span".into());
        }
        Ok(())
    }

    /// The components of `x` in each part.
    pub fn components(&self, x: &Mat) -> Result<Vec<Mat>> {
        let all = span_of(&self.ambient, &self.parts);
        let coef = all.coefficients(x)?.ok_or_else(|| Error::NotInternal("element outside the parts".into()))?;
        let mut out = Vec::with_capacity(self.parts.len());
        let mut row = 0;
        for p in &self.parts {
            let k = p.gens().cols();
            out.push(p.gens().mul(&coef.row_range(row, row + k)));
            row += k;
        }
        Ok(out)
    }
}

pub fn filtration_to_decomposition(f: &KaplanskyFiltration) -> Result<InternalDecomposition> {
    if let Some(v) = first_violation(f)? {
        return Err(Error::InvalidFiltration(v));
    }
    InternalDecomposition::new(&f.ambient, f.complements.clone())
        .map_err(|e| Error::InvariantViolation(format!("valid filtration gave a non-internal sum: {e}")))
}

pub fn decomposition_to_filtration(d: &InternalDecomposition) -> Result<KaplanskyFiltration> {
    d.check()?;
    if !d.total.is_full() {
        return Err(Error::NotInternal("parts do not span the ambient module".into()));
    }
    let stages: Vec<SubmoduleRep> = (0..=d.parts.len()).map(|a| span_of(&d.ambient, &d.parts[..a])).collect();
    let f = KaplanskyFiltration { ambient: d.ambient.clone(), stages, complements: d.parts.clone() };
    if let Some(v) = first_violation(&f)? {
        return Err(Error::InvariantViolation(format!("filtration from an internal sum: {v}")));
    }
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct SummandDevissage {
    pub decomposition: InternalDecomposition,
    /// Stages `M_α` of the ambient module, each a sum of whole parts of the
    /// input decomposition and stable under `e`.
    pub stages: Vec<SubmoduleRep>,
}

/// Split `im(e)` along a decomposition of the ambient module.
///
/// Stages grow by absorbing whole parts until they are closed under `e` and
/// `id − e`. With `C_α` the parts added at step α and `π` the projection
/// onto them, `π ∘ e` is idempotent on `C_α` and `e(π(e(C_α)))` complements
/// `M_α ∩ im e` inside `M_{α+1} ∩ im e`.
pub fn summand_devissage(d: &InternalDecomposition, e: &Morphism) -> Result<SummandDevissage> {
    let m = &d.ambient;
    if e.source() != m || e.target() != m {
        return Err(Error::DimensionMismatch("e must be an endomorphism of the ambient module".into()));
    }
    if !e.compose(e)?.equiv(e) {
        return Err(Error::NotIdempotent);
    }
    d.check()?;
    if !d.total.is_full() {
        return Err(Error::NotInternal("parts do not span the ambient module".into()));
    }
    let ring = m.ring();
    let id = Morphism::identity(m);
    let comp = id.sub(e)?;
    let n = SubmoduleRep::new(m, e.mat().clone())?;
    let k = SubmoduleRep::new(m, comp.mat().clone())?;

    let count = d.parts.len();
    let mut absorbed = vec![false; count];
    let mut stages = vec![SubmoduleRep::zero(m)];
    let mut pieces = Vec::new();
    while let Some(start) = absorbed.iter().position(|&a| !a) {
        let mut block = vec![start];
        let mut in_block = absorbed.clone();
        in_block[start] = true;
        let mut frontier = vec![start];
        while let Some(i) = frontier.pop() {
            let g = d.parts[i].gens();
            for x in [e.mat().mul(g), comp.mat().mul(g)] {
                for j in 0..x.cols() {
                    for (p, c) in d.components(&x.col(j))?.iter().enumerate() {
                        if !in_block[p] && !m.is_zero_elem(c) {
                            in_block[p] = true;
                            block.push(p);
                            frontier.push(p);
                        }
                    }
                }
            }
        }
        block.sort_unstable();
        for &p in &block {
            absorbed[p] = true;
        }
        let block_gens = Mat::hcat_all(ring, m.gens(), &block.iter().map(|&p| d.parts[p].gens()).collect::<Vec<_>>());
        let mut q = Mat::zeros(ring, m.gens(), 0);
        for j in 0..block_gens.cols() {
            let ec = e.apply(&block_gens.col(j));
            let comps = d.components(&ec)?;
            let proj = block.iter().fold(m.zero_elem(), |acc, &p| acc.add(&comps[p]));
            q = q.hcat(&e.apply(&proj));
        }
        let stage = stages.last().expect("nonempty").sum(&SubmoduleRep::new(m, block_gens)?);
        check_stage(&stage, e, &comp, &n, &k)?;
        stages.push(stage);
        let piece = SubmoduleRep::new(m, q)?;
        if !piece.is_zero() {
            pieces.push(piece);
        }
    }
    let decomposition = InternalDecomposition::inside(n, pieces)
        .map_err(|err| Error::InvariantViolation(format!("devissage output: {err}")))?;
    Ok(SummandDevissage { decomposition, stages })
}

/// `M_α = (M_α ∩ N) ⊕ (M_α ∩ K)` for `N = im e`, `K = im(id − e)`.
fn check_stage(stage: &SubmoduleRep, e: &Morphism, comp: &Morphism, n: &SubmoduleRep, k: &SubmoduleRep) -> Result<()> {
    let fail = |s: &str| Err(Error::InvariantViolation(format!("stage splitting: {s}")));
    let en = stage.map(e)?;
    let ek = stage.map(comp)?;
    if !en.le(stage) || !en.le(n) || !ek.le(stage) || !ek.le(k) {
        return fail("projections leave the stage");
    }
    let sn = stage.intersection(n)?;
    let sk = stage.intersection(k)?;
    if !stage.le(&sn.sum(&sk)) {
        return fail("intersections do not span");
    }
    if !sn.disjoint(&sk)? {
        return fail("intersections overlap");
    }
    Ok(())
}

/// Cyclic parts of a projective module, one per nontrivial invariant factor.
pub fn projective_cyclic_decomposition(p: &FpModule) -> Result<InternalDecomposition> {
    if !is_projective(p)? {
        return Err(Error::NotProjective);
    }
    cyclic_decomposition(p)
}

/// `M = ⊕ R·uᵢ` read off the Smith form of the relations.
pub fn cyclic_decomposition(p: &FpModule) -> Result<InternalDecomposition> {
    let ring = p.ring();
    let s = snf(&p.effective_rels())?;
    let base = s.d.ring();
    let parts: Vec<SubmoduleRep> = (0..p.gens())
        .filter(|&i| i >= s.invariant_factors.len() || !base.is_unit(&s.invariant_factors[i]))
        .map(|i| SubmoduleRep::new(p, s.u_inv.col(i).reduce_to(ring)))
        .collect::<Result<_>>()?;
    InternalDecomposition::new(p, parts).map_err(|err| Error::InvariantViolation(format!("cyclic parts: {err}")))
}
