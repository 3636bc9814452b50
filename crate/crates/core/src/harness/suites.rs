//! Property suites. Each suite draws raw ingredients into a [`Case`] and
//! rebuilds modules and maps from them at check time, so that shrinking
//! keeps every derived presentation well defined.

use num_bigint::BigInt;
use num_integer::Integer;

use super::{Case, Check, DimKind, Fault, Gen};
use crate::descent::{check_projectivity_descent, projchar_check};
use crate::devissage::{
    decomposition_to_filtration, filtration_to_decomposition, summand_devissage, validate_filtration,
    InternalDecomposition,
};
use crate::error::Result;
use crate::homtensor::{hom_module, is_flat, is_projective, tensor, tensor_mor};
use crate::limits::{
    enlarge_to_free, finite_system_colimit, inverse_tower_stabilization, power, tower_ml_check, Direction,
    FiniteDirectedSystem, MLStatus, Tower,
};
use crate::matrix::Mat;
use crate::module::{image, is_iso, FpModule, Morphism, SubmoduleRep};
use crate::normal_form::{det, kernel_basis, snf};
use crate::purity::{dominates, is_universally_injective, lift_through_univ_injective, probe_family, purity_descends};
use crate::pushout::{pushout, pushout_base_change_check, pushout_induced};
use crate::ring::{RingDesc, RingElem, RingMap};

pub struct Suite {
    pub name: &'static str,
    pub accepts: fn(RingDesc) -> bool,
    pub generate: fn(&mut Gen, &mut Case),
    pub check: fn(&Case) -> Result<Check>,
}

pub static SUITES: &[Suite] = &[
    Suite { name: "snf", accepts: euclidean, generate: gen_snf, check: check_snf },
    Suite { name: "homtensor", accepts: any, generate: gen_homtensor, check: check_homtensor },
    Suite { name: "pushout", accepts: any, generate: gen_pushout, check: check_pushout },
    Suite { name: "domination", accepts: any, generate: gen_domination, check: check_domination },
    Suite { name: "purity", accepts: any, generate: gen_purity, check: check_purity },
    Suite { name: "lift", accepts: any, generate: gen_lift, check: check_lift },
    Suite { name: "ml", accepts: any, generate: gen_ml, check: check_ml },
    Suite { name: "devissage-roundtrip", accepts: any, generate: gen_roundtrip, check: check_roundtrip },
    Suite { name: "devissage-summand", accepts: any, generate: gen_summand, check: check_summand },
    Suite { name: "descent", accepts: integers, generate: gen_presentation, check: check_descent },
    Suite { name: "projchar", accepts: any, generate: gen_presentation, check: check_projchar },
    Suite { name: "enlarge", accepts: integers, generate: gen_enlarge, check: check_enlarge },
    Suite { name: "colimit", accepts: any, generate: gen_colimit, check: check_colimit },
];

pub fn suite(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

fn any(_: RingDesc) -> bool {
    true
}

fn euclidean(r: RingDesc) -> bool {
    r.is_euclidean()
}

fn integers(r: RingDesc) -> bool {
    r == RingDesc::Integers
}

// ---- shared helpers ---------------------------------------------------------

fn coker(ring: RingDesc, rels: Mat) -> Result<FpModule> {
    FpModule::new(ring, rels)
}

fn unit_lower(l: &Mat) -> Mat {
    let ring = l.ring();
    Mat::from_fn(ring, l.rows(), l.cols(), |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => ring.one(),
        std::cmp::Ordering::Greater => l.get(i, j).clone(),
        std::cmp::Ordering::Less => ring.zero(),
    })
}

/// Inverse of `I + N` for nilpotent `N`: the alternating sum of powers.
fn unipotent_inverse(t: &Mat) -> Mat {
    let ring = t.ring();
    let k = t.rows();
    let n = t.sub(&Mat::identity(ring, k));
    let mut term = Mat::identity(ring, k);
    let mut acc = term.clone();
    for _ in 1..k.max(1) {
        term = term.mul(&n).neg();
        acc = acc.add(&term);
    }
    acc
}

/// `unit_lower(L) · unit_upper(U)`, with its inverse.
fn unimodular(l: &Mat, u: &Mat) -> (Mat, Mat) {
    let lo = unit_lower(l);
    let up = unit_lower(&u.transpose()).transpose();
    (lo.mul(&up), unipotent_inverse(&up).mul(&unipotent_inverse(&lo)))
}

fn put_unimodular(g: &mut Gen, c: &mut Case, k: usize, l: &str, u: &str) {
    let (a, b) = (g.mat(c.dims[k].size, c.dims[k].size), g.mat(c.dims[k].size, c.dims[k].size));
    c.put(l, k, k, a);
    c.put(u, k, k, b);
}

/// Orders for cyclic summands, biased toward small nonunits.
fn order(g: &mut Gen) -> RingElem {
    match g.ring {
        RingDesc::GaussianIntegers => g.elem(),
        r => {
            let choices: Vec<i64> = [0, 0, 1, 2, 3, 4, 5, 6, 8, 9, 10].into_iter().filter(|&v| v <= g.max_entry).collect();
            let v = g.pick(&choices);
            r.from_i64(v)
        }
    }
}

fn diag_column(c: &Mat) -> Mat {
    let d: Vec<RingElem> = (0..c.rows()).map(|i| c.get(i, 0).clone()).collect();
    Mat::diag(c.ring(), &d)
}

fn module_of_orders(ring: RingDesc, orders: &[RingElem]) -> Result<FpModule> {
    coker(ring, Mat::diag(ring, orders))
}

fn lift_u64(e: &RingElem) -> BigInt {
    e.as_int().cloned().unwrap_or_default()
}

/// Over `Z/n` the cyclic module `R/(a)` equals `Z/gcd(a, n)` as an abelian
/// group; `n` stands for the free module.
fn z_order(n: u64, a: &RingElem) -> BigInt {
    lift_u64(a).gcd(&BigInt::from(n))
}

fn cyclic_tensor(ring: RingDesc, a: &RingElem, b: &RingElem) -> Result<RingElem> {
    match ring.modulus() {
        Some(n) => Ok(ring.from_bigint(z_order(n, a).gcd(&z_order(n, b)))),
        None => ring.gcd(a, b),
    }
}

fn cyclic_hom(ring: RingDesc, a: &RingElem, b: &RingElem) -> Result<RingElem> {
    match ring.modulus() {
        Some(n) => Ok(ring.from_bigint(z_order(n, a).gcd(&z_order(n, b)))),
        None if ring.is_zero(a) => Ok(b.clone()),
        None if ring.is_zero(b) => Ok(ring.one()),
        None => ring.gcd(a, b),
    }
}

fn scalar_of(m: &Mat) -> RingElem {
    m.get(0, 0).clone()
}

/// Two relation blocks side by side: free relations, then those forced by
/// a map `X` out of a module with relations `r`.
fn forced(extra: &Mat, x: &Mat, r: &Mat) -> Mat {
    extra.hcat(&x.mul(r))
}

/// Rows `y` with `y·k ≡ 0`, as the rows of the result.
fn left_null(k: &Mat) -> Result<Mat> {
    let ring = k.ring();
    let kt = k.transpose();
    match ring.modulus() {
        Some(n) if !ring.is_euclidean() => {
            let z = RingDesc::Integers;
            let sys = kt.lift().hcat(&Mat::scalar(z, kt.rows(), &z.from_i64(n as i64)));
            let basis = kernel_basis(&sys)?;
            Ok(basis.row_range(0, kt.cols()).reduce_to(ring).transpose())
        }
        _ => Ok(kernel_basis(&kt)?.transpose()),
    }
}

fn dims(c: &mut Case, names: &[(&str, usize, DimKind)]) -> Vec<usize> {
    names.iter().map(|&(n, s, k)| c.dim(n, s, k)).collect()
}

// ---- snf --------------------------------------------------------------------

fn gen_snf(g: &mut Gen, c: &mut Case) {
    let (r, k) = (g.size(1), g.size(1));
    let d = dims(c, &[("rows", r, DimKind::Gen), ("cols", k, DimKind::Rel)]);
    let a = g.mat(r, k);
    c.put("A", d[0], d[1], a);
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn check_snf(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let a = c.mat("A")?;
    let s = snf(a)?;
    let mut out = Check::pass();
    if s.u.mul(a).mul(&s.v) != s.d {
        out.fail("U·A·V differs from D");
    }
    if !ring.is_unit(&det(&s.u)?) || !ring.is_unit(&det(&s.v)?) {
        out.fail("U or V is not unimodular");
    }
    if s.u.mul(&s.u_inv) != Mat::identity(ring, a.rows()) {
        out.fail("tracked inverse of U is wrong");
    }
    let k = a.rows().min(a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let want = if i == j { s.invariant_factors[i].clone() } else { ring.zero() };
            if s.d.get(i, j) != &want {
                out.fail(format!("D is not the diagonal of invariant factors at ({i}, {j})"));
            }
        }
    }
    for i in 0..k {
        let d = &s.invariant_factors[i];
        if ring.normalize(d) != *d {
            out.fail(format!("invariant factor {d} is not normalized"));
        }
        if i + 1 < k && !ring.divides(d, &s.invariant_factors[i + 1]) {
            out.fail(format!("divisibility chain breaks at {i}"));
        }
    }
    if s.rank != s.invariant_factors.iter().filter(|d| !ring.is_zero(d)).count() {
        out.fail("rank disagrees with the nonzero invariant factors");
    }
    let mut prod = ring.one();
    for size in 1..=k {
        prod = ring.mul(&prod, &s.invariant_factors[size - 1]);
        let mut g = ring.zero();
        for rows in combinations(a.rows(), size) {
            for cols in combinations(a.cols(), size) {
                g = ring.gcd(&g, &det(&a.select_rows(&rows).select_cols(&cols))?)?;
            }
        }
        if ring.normalize(&g) != ring.normalize(&prod) {
            out.fail(format!("gcd of {size}-minors is {g}, product of invariant factors is {prod}"));
        }
    }
    Ok(out)
}

// ---- hom and tensor -----------------------------------------------------------

fn gen_cyclic_sum(g: &mut Gen, c: &mut Case, tag: &str) {
    let k = g.size(1);
    let d = dims(c, &[(tag, k, DimKind::Gen)]);
    let one = c.dims.iter().position(|x| x.name == "one").unwrap_or_else(|| c.dim("one", 1, DimKind::Fixed));
    let orders = Mat::from_fn(g.ring, k, 1, |_, _| order(g));
    c.put(&format!("{tag}.orders"), d[0], one, orders);
    put_unimodular(g, c, d[0], &format!("{tag}.L"), &format!("{tag}.U"));
}

/// `P · diag(orders)` and the orders themselves.
fn cyclic_sum(c: &Case, tag: &str) -> Result<(FpModule, Vec<RingElem>, Mat)> {
    let orders = c.mat(&format!("{tag}.orders"))?;
    let (p, _) = unimodular(c.mat(&format!("{tag}.L"))?, c.mat(&format!("{tag}.U"))?);
    let m = coker(c.ring, p.mul(&diag_column(orders)))?;
    Ok((m, orders.col_vec(0), p))
}

fn gen_homtensor(g: &mut Gen, c: &mut Case) {
    gen_cyclic_sum(g, c, "M");
    gen_cyclic_sum(g, c, "N");
}

fn check_homtensor(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let (m, a, _) = cyclic_sum(c, "M")?;
    let (n, b, _) = cyclic_sum(c, "N")?;
    let mut t_orders = Vec::new();
    let mut h_orders = Vec::new();
    for x in &a {
        for y in &b {
            t_orders.push(cyclic_tensor(ring, x, y)?);
            h_orders.push(cyclic_hom(ring, x, y)?);
        }
    }
    let mut out = Check::pass();
    if !is_iso(&m, &module_of_orders(ring, &a)?)? {
        out.fail("invariants of a conjugated diagonal presentation changed");
    }
    if !is_iso(&tensor(&m, &n)?, &module_of_orders(ring, &t_orders)?)? {
        out.fail("M ⊗ N disagrees with the gcd formula");
    }
    let h = hom_module(&m, &n)?;
    if !is_iso(&h.underlying, &module_of_orders(ring, &h_orders)?)? {
        out.fail("Hom(M, N) disagrees with the gcd formula");
    }
    Ok(out)
}

// ---- pushouts -------------------------------------------------------------------

struct Span {
    f: Morphism,
    g: Morphism,
}

fn gen_module(g: &mut Gen, c: &mut Case, gens: &str, rels: &str, slot: &str, min: usize) -> (usize, usize) {
    let (k, r) = (g.size(min), g.size(0));
    let d = dims(c, &[(gens, k, DimKind::Gen), (rels, r, DimKind::Rel)]);
    let m = g.mat(k, r);
    c.put(slot, d[0], d[1], m);
    (d[0], d[1])
}

fn gen_map(g: &mut Gen, c: &mut Case, slot: &str, rows: usize, cols: usize) {
    let m = g.mat(c.dims[rows].size, c.dims[cols].size);
    c.put(slot, rows, cols, m);
}

fn gen_span(g: &mut Gen, c: &mut Case) {
    let (a, _) = gen_module(g, c, "a", "ra", "Ra", 1);
    let (b, _) = gen_module(g, c, "b", "rb", "Rb", 1);
    let (cc, _) = gen_module(g, c, "c", "rc", "Rc", 1);
    gen_map(g, c, "F", b, a);
    gen_map(g, c, "G", cc, a);
}

fn span(c: &Case) -> Result<Span> {
    let ring = c.ring;
    let ra = c.mat("Ra")?;
    let a = coker(ring, ra.clone())?;
    let b = coker(ring, forced(c.mat("Rb")?, c.mat("F")?, ra))?;
    let cm = coker(ring, forced(c.mat("Rc")?, c.mat("G")?, ra))?;
    let f = Morphism::new(&a, &b, c.mat("F")?.clone())?;
    let g = Morphism::new(&a, &cm, c.mat("G")?.clone())?;
    Ok(Span { f, g })
}

fn gen_pushout(g: &mut Gen, c: &mut Case) {
    gen_span(g, c);
    let (t, _) = gen_module(g, c, "t", "rt", "Rt", 1);
    let (b, cc) = (c.dims.iter().position(|d| d.name == "b").unwrap(), c.dims.iter().position(|d| d.name == "c").unwrap());
    gen_map(g, c, "U", t, b);
    gen_map(g, c, "V", t, cc);
}

fn check_pushout(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let s = span(c)?;
    let (bm, cm) = (s.f.target(), s.g.target());
    let (u, v) = (c.mat("U")?, c.mat("V")?);
    let square = u.mul(s.f.mat()).sub(&v.mul(s.g.mat()));
    let trels = c.mat("Rt")?.hcat(&u.mul(bm.rels())).hcat(&v.mul(cm.rels())).hcat(&square);
    let t = coker(ring, trels)?;
    let um = Morphism::new(bm, &t, u.clone())?;
    let vm = Morphism::new(cm, &t, v.clone())?;

    let mut out = Check::pass();
    let p = pushout(&s.f, &s.g)?;
    if !p.inl.compose(&s.f)?.equiv(&p.inr.compose(&s.g)?) {
        out.fail("pushout square does not commute");
    }
    let w = pushout_induced(&p, &um, &vm)?;
    if !w.compose(&p.inl)?.equiv(&um) || !w.compose(&p.inr)?.equiv(&vm) {
        out.fail("induced map does not restrict to u and v");
    }
    if !image(&p.inl).sum(&image(&p.inr)).is_full() {
        out.fail("injections do not generate the pushout, so induced maps are not unique");
    }
    if ring == RingDesc::Integers {
        for target in [RingDesc::Rationals, RingDesc::GaussianIntegers, RingDesc::IntegersMod(4)] {
            let phi = RingMap::new(ring, target)?;
            if !pushout_base_change_check(&phi, &s.f, &s.g)? {
                out.fail(format!("base change to {target} does not commute with the pushout"));
            }
        }
    }
    Ok(out)
}

// ---- domination -----------------------------------------------------------------

fn gen_domination(g: &mut Gen, c: &mut Case) {
    gen_span(g, c);
    let one = c.dim("one", 1, DimKind::Fixed);
    let (b, cc) = (c.dims.iter().position(|d| d.name == "b").unwrap(), c.dims.iter().position(|d| d.name == "c").unwrap());
    gen_map(g, c, "H", cc, b);
    let through = if g.chance(0.5) { g.ring.one() } else { g.ring.zero() };
    c.put("through", one, one, Mat::column(g.ring, vec![through]));
}

fn check_domination(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let through = !ring.is_zero(&scalar_of(c.mat("through")?));
    let (f, g) = if through {
        let ra = c.mat("Ra")?;
        let a = coker(ring, ra.clone())?;
        let b = coker(ring, forced(c.mat("Rb")?, c.mat("F")?, ra))?;
        let h = c.mat("H")?;
        let cm = coker(ring, forced(c.mat("Rc")?, h, b.rels()))?;
        let f = Morphism::new(&a, &b, c.mat("F")?.clone())?;
        let g = Morphism::new(&a, &cm, h.mul(f.mat()))?;
        (f, g)
    } else {
        let s = span(c)?;
        (s.f, s.g)
    };
    let v = dominates(&f, &g)?;
    let mut out = Check::pass();
    out.tag(if v.dominates { "dominates" } else { "does_not_dominate" });
    if !v.pushout_agrees {
        out.fail("factorization and pushout purity disagree");
    }
    if v.dominates != v.factor.is_some() {
        out.fail("positive verdict without a factor");
    }
    if let Some(h) = &v.factor {
        if h.source() != f.target() || h.target() != g.target() || !h.compose(&f)?.equiv(&g) {
            out.fail("factor does not reproduce g");
        }
    }
    if through && !v.dominates {
        out.fail("g = h ∘ f by construction but no factorization was found");
    }
    Ok(out)
}

// ---- purity -------------------------------------------------------------------

fn gen_purity(g: &mut Gen, c: &mut Case) {
    let (a, _) = gen_module(g, c, "a", "ra", "Ra", 1);
    let (b, _) = gen_module(g, c, "b", "rb", "Rb", 1);
    let (x, _) = gen_module(g, c, "x", "rx", "Rx", 0);
    gen_map(g, c, "F", b, a);
    gen_map(g, c, "T", x, a);
    let one = c.dim("one", 1, DimKind::Fixed);
    let split = if g.chance(0.5) { g.ring.one() } else { g.ring.zero() };
    c.put("split", one, one, Mat::column(g.ring, vec![split]));
}

/// `a ↦ (a, T·a)` into `A ⊕ X`, with the projection as retraction.
fn graph(c: &Case) -> Result<(Morphism, Morphism)> {
    let ring = c.ring;
    let ra = c.mat("Ra")?;
    let t = c.mat("T")?;
    let a = coker(ring, ra.clone())?;
    let x = coker(ring, forced(c.mat("Rx")?, t, ra))?;
    let n = coker(ring, ra.block_diag(x.rels()))?;
    let f = Morphism::new(&a, &n, Mat::identity(ring, a.gens()).vcat(t))?;
    let pi = Morphism::new(&n, &a, Mat::identity(ring, a.gens()).hcat(&Mat::zeros(ring, a.gens(), x.gens())))?;
    Ok((f, pi))
}

fn check_purity(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let split = !ring.is_zero(&scalar_of(c.mat("split")?));
    let f = if split {
        graph(c)?.0
    } else {
        let ra = c.mat("Ra")?;
        let a = coker(ring, ra.clone())?;
        let b = coker(ring, forced(c.mat("Rb")?, c.mat("F")?, ra))?;
        Morphism::new(&a, &b, c.mat("F")?.clone())?
    };
    let v = is_universally_injective(&f)?;
    let mut out = Check::pass();
    if v.pure {
        out.tag("pure");
        match &v.retraction {
            Some(r) if r.compose(&f)?.equiv(&Morphism::identity(f.source())) => {}
            _ => out.fail("pure verdict without a valid retraction"),
        }
        for q in probe_family(&f) {
            if !tensor_mor(&f, &Morphism::identity(&q))?.is_injective()? {
                out.fail(format!("split map is not injective after tensoring with R/({})", q.rels().get(0, 0)));
            }
        }
    } else {
        out.tag("impure");
        match &v.counterexample {
            Some(w) if w.verify(&f)? => {}
            _ => out.fail("impure verdict without a verified tensor witness"),
        }
        if split {
            out.fail("a split map was declared impure");
        }
    }
    if ring == RingDesc::Integers {
        let phi = RingMap::new(ring, RingDesc::GaussianIntegers)?;
        if !purity_descends(&phi, &f)? {
            out.fail("pure after base change to Z[i] but not pure");
        }
    }
    Ok(out)
}

fn gen_lift(g: &mut Gen, c: &mut Case) {
    let (a, _) = gen_module(g, c, "a", "ra", "Ra", 1);
    let (x, _) = gen_module(g, c, "x", "rx", "Rx", 0);
    gen_map(g, c, "T", x, a);
    let cap = g.max_gens.min(3);
    let (fr, gr) = (g.range(1, cap), g.range(1, cap));
    let d = dims(c, &[("F", fr, DimKind::Gen), ("G", gr, DimKind::Gen)]);
    gen_map(g, c, "K", d[1], d[0]);
    gen_map(g, c, "H0", a, d[1]);
    gen_map(g, c, "Y", x, d[1]);
}

fn check_lift(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let (f, pi) = graph(c)?;
    let (m, n) = (f.source().clone(), f.target().clone());
    let k = c.mat("K")?;
    let h0 = c.mat("H0")?;
    let t = c.mat("T")?;
    let null = left_null(k)?;
    let s = null.rows().min(k.rows());
    let y = c.mat("Y")?.col_range(0, s);
    let x = y.mul(&null.row_range(0, s));
    let fm = FpModule::free(ring, k.cols());
    let gm = FpModule::free(ring, k.rows());
    let km = Morphism::new(&fm, &gm, k.clone())?;
    let hm = Morphism::new(&gm, &n, h0.vcat(&t.mul(h0).add(&x)))?;
    let gmap = Morphism::new(&fm, &m, h0.mul(k))?;
    let phi = lift_through_univ_injective(&f, &pi, &gmap, &hm, &km)?;
    let mut out = Check::pass();
    if phi.source() != &gm || phi.target() != &m || !phi.compose(&km)?.equiv(&gmap) {
        out.fail("lift does not satisfy φ ∘ k ≡ g");
    }
    Ok(out)
}

// ---- Mittag-Leffler towers ------------------------------------------------------

fn gen_ml(g: &mut Gen, c: &mut Case) {
    gen_module(g, c, "m", "rm", "Rm", 1);
    let one = c.dim("one", 1, DimKind::Fixed);
    let choices: Vec<i64> = [0, 1, 1, 1, 2, 3, 4, 5, 6, 8].into_iter().filter(|&v| v <= g.max_entry).collect();
    let s = g.pick(&choices);
    let s = g.ring.from_i64(s);
    c.put("step", one, one, Mat::column(g.ring, vec![s]));
    let dir = if g.chance(0.5) { g.ring.one() } else { g.ring.zero() };
    c.put("backward", one, one, Mat::column(g.ring, vec![dir]));
}

fn check_ml(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let m = coker(ring, c.mat("Rm")?.clone())?;
    let s = scalar_of(c.mat("step")?);
    let backward = !ring.is_zero(&scalar_of(c.mat("backward")?));
    let step = Morphism::identity(&m).scale(&s);
    let dir = if backward { Direction::Backward } else { Direction::Forward };
    let t = Tower::new(step.clone(), dir)?;
    let v = if backward { inverse_tower_stabilization(&t, c.horizon)? } else { tower_ml_check(&t, c.horizon)? };
    let mut out = Check::pass();
    let im = |e: usize| SubmoduleRep::new(&m, power(&step, e).mat().clone());
    match &v.status {
        MLStatus::ML { level, factor } => {
            out.tag("ml");
            let l = *level;
            if backward {
                let (a, b, d) = (im(l)?, im(l + 1)?, im(l + 2)?);
                if !a.equals(&b) || !b.equals(&d) {
                    out.fail(format!("images have not stabilized at level {l}"));
                }
                if l > 0 && im(l - 1)?.equals(&a) {
                    out.fail(format!("stabilization level {l} is not minimal"));
                }
            } else {
                match factor {
                    Some(h) if h.compose(&power(&step, l + 1))?.equiv(&power(&step, l)) => {}
                    _ => out.fail(format!("ML certificate at level {l} does not factor step^{l}")),
                }
            }
            if ring.is_one(&s) && l != 0 {
                out.fail("identity tower certified only at a positive level");
            }
        }
        MLStatus::NotML { .. } => out.tag("not_ml"),
        MLStatus::UnknownAtHorizon => {
            out.tag("unknown");
            if ring.is_one(&s) {
                out.fail("identity tower not certified");
            }
        }
    }
    Ok(out)
}

// ---- devissage -------------------------------------------------------------------

fn gen_groups(g: &mut Gen, c: &mut Case, k: usize, one: usize, slot: &str) {
    let n = c.dims[k].size.max(1);
    let ring = g.ring;
    let labels = Mat::from_fn(ring, c.dims[k].size, 1, |_, _| ring.from_i64(g.below(n) as i64));
    c.put(slot, k, one, labels);
}

/// Indices grouped by label, groups in label order.
fn groups(labels: &Mat) -> Vec<Vec<usize>> {
    let key = |i: usize| labels.get(i, 0).to_string();
    let mut keys: Vec<String> = (0..labels.rows()).map(key).collect();
    keys.sort();
    keys.dedup();
    keys.iter().map(|k| (0..labels.rows()).filter(|&i| &key(i) == k).collect()).collect()
}

fn grouped_parts(m: &FpModule, p: &Mat, labels: &Mat) -> Result<Vec<SubmoduleRep>> {
    groups(labels).iter().map(|idx| SubmoduleRep::new(m, p.select_cols(idx))).collect()
}

fn gen_roundtrip(g: &mut Gen, c: &mut Case) {
    gen_cyclic_sum(g, c, "M");
    let (k, one) = (c.dims.iter().position(|d| d.name == "M").unwrap(), c.dims.iter().position(|d| d.name == "one").unwrap());
    gen_groups(g, c, k, one, "group");
}

fn check_roundtrip(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let (m, orders, p) = cyclic_sum(c, "M")?;
    let labels = c.mat("group")?;
    let parts = grouped_parts(&m, &p, labels)?;
    let d0 = InternalDecomposition::new(&m, parts)?;
    let filt = decomposition_to_filtration(&d0)?;
    let mut out = Check::pass();
    let rep = validate_filtration(&filt)?;
    if !rep.valid {
        out.fail(format!("filtration from a decomposition is invalid: {:?}", rep.violation));
        return Ok(out);
    }
    let d1 = filtration_to_decomposition(&filt)?;
    if d1.parts.len() != d0.parts.len() {
        out.fail(format!("{} parts became {}", d0.parts.len(), d1.parts.len()));
        return Ok(out);
    }
    for (i, idx) in groups(labels).iter().enumerate() {
        let expected: Vec<RingElem> = idx.iter().map(|&j| orders[j].clone()).collect();
        let want = module_of_orders(ring, &expected)?;
        let (before, _) = d0.parts[i].as_module()?;
        let (after, _) = d1.parts[i].as_module()?;
        if !is_iso(&before, &want)? || !is_iso(&after, &want)? {
            out.fail(format!("part {i} changed its invariant factors"));
        }
    }
    Ok(out)
}

fn gen_summand(g: &mut Gen, c: &mut Case) {
    let k = g.size(1);
    let d = dims(c, &[("k", k, DimKind::Gen), ("one", 1, DimKind::Fixed)]);
    put_unimodular(g, c, d[0], "L1", "U1");
    gen_groups(g, c, d[0], d[1], "group");
    put_unimodular(g, c, d[0], "L2", "U2");
    let sel = Mat::from_fn(g.ring, k, 1, |_, _| if g.chance(0.5) { g.ring.one() } else { g.ring.zero() });
    c.put("select", d[0], d[1], sel);
}

fn check_summand(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let k = c.size("k")?;
    let m = FpModule::free(ring, k);
    let (p, _) = unimodular(c.mat("L1")?, c.mat("U1")?);
    let d = InternalDecomposition::new(&m, grouped_parts(&m, &p, c.mat("group")?)?)?;
    let (q, q_inv) = unimodular(c.mat("L2")?, c.mat("U2")?);
    let sel = c.mat("select")?;
    let proj: Vec<RingElem> = (0..k).map(|i| if ring.is_zero(sel.get(i, 0)) { ring.zero() } else { ring.one() }).collect();
    let e = Morphism::new(&m, &m, q.mul(&Mat::diag(ring, &proj)).mul(&q_inv))?;
    let sd = summand_devissage(&d, &e)?;
    let mut out = Check::pass();
    let n = SubmoduleRep::new(&m, e.mat().clone())?;
    let dec = &sd.decomposition;
    if dec.check().is_err() || !dec.total.equals(&n) {
        out.fail("pieces do not form an internal decomposition of im e");
    }
    let sum = dec.parts.iter().fold(SubmoduleRep::zero(&m), |acc, x| acc.sum(x));
    if !sum.equals(&n) {
        out.fail("pieces do not span im e");
    }
    let stages = &sd.stages;
    if stages.first().is_none_or(|s| !s.is_zero()) || stages.last().is_none_or(|s| !s.is_full()) {
        out.fail("stages do not run from 0 to M");
    }
    for (i, st) in stages.iter().enumerate() {
        if i > 0 && !stages[i - 1].le(st) {
            out.fail(format!("stage {i} does not contain stage {}", i - 1));
        }
        // for an idempotent, M_α = (M_α ∩ im e) ⊕ (M_α ∩ ker e) iff e(M_α) ⊆ M_α
        if !st.map(&e)?.le(st) {
            out.fail(format!("stage {i} does not split along e"));
        }
        for (j, part) in d.parts.iter().enumerate() {
            if !part.le(st) && !part.intersection(st)?.is_zero() {
                out.fail(format!("stage {i} cuts part {j}"));
            }
        }
    }
    Ok(out)
}

// ---- descent and projectivity ----------------------------------------------------------

fn gen_presentation(g: &mut Gen, c: &mut Case) {
    gen_module(g, c, "g", "r", "R", 0);
}

fn check_descent(c: &Case) -> Result<Check> {
    let m = coker(c.ring, c.mat("R")?.clone())?;
    let mut out = Check::pass();
    let zi = RingMap::new(RingDesc::Integers, RingDesc::GaussianIntegers)?;
    let r = check_projectivity_descent(&zi, &m)?;
    if !r.equivalence_holds {
        out.fail("projectivity differs across Z → Z[i]");
    }
    let torsion_free = m.invariants().torsion.is_empty();
    if r.verdict_base != torsion_free {
        out.fail("projectivity over Z differs from torsion-freeness");
    }
    let q = RingMap::new(RingDesc::Integers, RingDesc::Rationals)?;
    let r = check_projectivity_descent(&q, &m)?;
    if !r.equivalence_holds {
        out.tag("divergence");
        if torsion_free {
            out.fail("divergence along Z → Q with a torsion-free base module");
        }
        if r.counterexample_flag.is_none() {
            out.fail("divergence along a non-faithfully-flat map was not flagged");
        }
    }
    Ok(out)
}

fn check_projchar(c: &Case) -> Result<Check> {
    let m = coker(c.ring, c.mat("R")?.clone())?;
    let flat = match c.fault {
        Some(Fault::FlatFreeSummand) => m.invariants().free_rank > 0 || is_flat(&m)?,
        None => is_flat(&m)?,
    };
    let projective = is_projective(&m)?;
    let rep = projchar_check(&m)?;
    let mut out = Check::pass();
    if projective {
        out.tag("projective");
    }
    if flat != projective {
        out.fail(format!("flat = {flat} but projective = {projective}"));
    }
    if !rep.mittag_leffler || !rep.direct_sum_of_cyclics {
        out.fail("a finitely presented module was not reported ML and a sum of cyclics");
    }
    if !rep.consistent {
        out.fail("projectivity report is inconsistent");
    }
    Ok(out)
}

// ---- enlargement -----------------------------------------------------------------------

fn gen_enlarge(g: &mut Gen, c: &mut Case) {
    let (m, j, t) = (g.size(1), g.size(1), g.size(0));
    let d = dims(c, &[("m", m, DimKind::Gen), ("j", j, DimKind::Gen), ("t", t, DimKind::Rel)]);
    gen_map(g, c, "Psi", d[0], d[1]);
    gen_map(g, c, "C", d[1], d[2]);
}

fn check_enlarge(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let psi = c.mat("Psi")?;
    let m = FpModule::free(ring, psi.rows());
    let kb = kernel_basis(psi)?;
    let s = kb.cols().min(c.mat("C")?.rows());
    let n = kb.col_range(0, s).mul(&c.mat("C")?.row_range(0, s));
    let e = enlarge_to_free(&m, psi, &n)?;
    let mut out = Check::pass();
    if !psi.mul(&e.n_prime).is_zero() {
        out.fail("N′ is not inside ker ψ");
    }
    if e.n_prime.mul(&e.coefficients) != n {
        out.fail("N is not inside N′");
    }
    let sf = snf(&e.n_prime)?;
    if sf.invariant_factors.iter().any(|d| !ring.is_zero(d) && !ring.is_unit(d)) {
        out.fail("R^J / N′ has torsion");
    }
    if !e.quotient.invariants().torsion.is_empty() {
        out.fail("reported quotient is not free");
    }
    Ok(out)
}

// ---- finite directed systems -----------------------------------------------------------

fn gen_colimit(g: &mut Gen, c: &mut Case) {
    gen_module(g, c, "m", "rm", "Rm", 1);
    let one = c.dim("one", 1, DimKind::Fixed);
    for name in ["a", "b"] {
        let s = g.elem();
        c.put(name, one, one, Mat::column(g.ring, vec![s]));
    }
}

fn check_colimit(c: &Case) -> Result<Check> {
    let ring = c.ring;
    let m = coker(ring, c.mat("Rm")?.clone())?;
    let (a, b) = (scalar_of(c.mat("a")?), scalar_of(c.mat("b")?));
    let id = Morphism::identity(&m);
    // the diamond 0 < 1, 2 < 3 with 0→1→3 = a then b and 0→2→3 = b then a
    let edges = [(0, 1, a.clone()), (1, 3, b.clone()), (0, 2, b.clone()), (2, 3, a.clone()), (0, 3, ring.mul(&a, &b))];
    let mut le = vec![vec![false; 4]; 4];
    let mut maps: Vec<Vec<Option<Morphism>>> = vec![vec![None; 4]; 4];
    for i in 0..4 {
        le[i][i] = true;
        maps[i][i] = Some(id.clone());
    }
    for (i, j, s) in edges {
        le[i][j] = true;
        maps[i][j] = Some(id.scale(&s));
    }
    let sys = FiniteDirectedSystem { le, objects: vec![m.clone(); 4], maps };
    let (obj, canonical) = finite_system_colimit(&sys)?;
    let mut out = Check::pass();
    if obj != m || !canonical[3].equiv(&id) {
        out.fail("colimit is not the top object");
    }
    if !canonical[0].equiv(&id.scale(&ring.mul(&a, &b))) {
        out.fail("canonical map from the bottom is not a·b");
    }
    Ok(out)
}
