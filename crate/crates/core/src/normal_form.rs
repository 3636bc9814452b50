//! Hermite and Smith normal forms, linear solving and kernels.
//!
//! All elimination runs over a Euclidean domain. Matrices over `Z/n` are
//! handled by the callers (or by [`solve_linear`]) by lifting to `Z` and
//! appending `n·I` as extra columns.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ring::{RingDesc, RingElem};

fn require_euclidean(r: RingDesc) -> Result<()> {
    if r.is_euclidean() {
        Ok(())
    } else {
        Err(Error::UnsupportedRing(format!("{r} is not a Euclidean domain; lift it first")))
    }
}

// ---- elementary operations on a working matrix ----------------------------

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

/// `(col_a, col_b) ← (p·col_a + q·col_b, r·col_a + s·col_b)`
fn mix_cols(m: &mut Mat, a: usize, b: usize, [p, q, r, s]: [&RingElem; 4]) {
    let ring = m.ring();
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, ring.add(&ring.mul(p, &x), &ring.mul(q, &y)));
        m.set(i, b, ring.add(&ring.mul(r, &x), &ring.mul(s, &y)));
    }
}

/// `(row_a, row_b) ← (p·row_a + q·row_b, r·row_a + s·row_b)`
fn mix_rows(m: &mut Mat, a: usize, b: usize, [p, q, r, s]: [&RingElem; 4]) {
    let ring = m.ring();
    for j in 0..m.cols() {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, ring.add(&ring.mul(p, &x), &ring.mul(q, &y)));
        m.set(b, j, ring.add(&ring.mul(r, &x), &ring.mul(s, &y)));
    }
}

/// `col_dst ← col_dst + c·col_src`
fn add_col_multiple(m: &mut Mat, dst: usize, src: usize, c: &RingElem) {
    let ring = m.ring();
    if ring.is_zero(c) {
        return;
    }
    for i in 0..m.rows() {
        let v = ring.add(m.get(i, dst), &ring.mul(c, m.get(i, src)));
        m.set(i, dst, v);
    }
}

fn scale_col(m: &mut Mat, j: usize, c: &RingElem) {
    let ring = m.ring();
    for i in 0..m.rows() {
        let v = ring.mul(c, m.get(i, j));
        m.set(i, j, v);
    }
}

fn scale_row(m: &mut Mat, i: usize, c: &RingElem) {
    let ring = m.ring();
    for j in 0..m.cols() {
        let v = ring.mul(c, m.get(i, j));
        m.set(i, j, v);
    }
}

/// Bezout data for combining `a` and `b`: `(g, s, t, a/g, b/g)`.
fn bezout(ring: RingDesc, a: &RingElem, b: &RingElem) -> Result<[RingElem; 5]> {
    if let Some(q) = ring.div_exact(b, a) {
        return Ok([a.clone(), ring.one(), ring.zero(), ring.one(), q]);
    }
    let (g, s, t) = ring.gcd_ext(a, b)?;
    let ag = ring.div_exact(a, &g).expect("gcd divides a");
    let bg = ring.div_exact(b, &g).expect("gcd divides b");
    Ok([g, s, t, ag, bg])
}

// ---- Hermite normal form -------------------------------------------------

/// Column Hermite form `H = A·U`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: Mat,
    pub u: Mat,
    /// Number of nonzero columns of `h`; they come first and are a basis of the column span.
    pub rank: usize,
    /// Row of the pivot of each nonzero column.
    pub pivot_rows: Vec<usize>,
}

/// Column-style Hermite normal form: `H = A·U` with `U` unimodular, pivot
/// rows strictly increasing, pivots normalized, and entries left of each
/// pivot reduced modulo it.
pub fn hermite(a: &Mat) -> Result<HermiteForm> {
    let ring = a.ring();
    require_euclidean(ring)?;
    let mut h = a.clone();
    let mut u = Mat::identity(ring, a.cols());
    let mut k = 0;
    let mut pivot_rows = Vec::new();
    for i in 0..a.rows() {
        if k == a.cols() {
            break;
        }
        for j in k + 1..a.cols() {
            if ring.is_zero(h.get(i, j)) {
                continue;
            }
            if ring.is_zero(h.get(i, k)) {
                swap_cols(&mut h, k, j);
                swap_cols(&mut u, k, j);
                continue;
            }
            let [_, s, t, ag, bg] = bezout(ring, h.get(i, k), h.get(i, j))?;
            let nbg = ring.neg(&bg);
            mix_cols(&mut h, k, j, [&s, &t, &nbg, &ag]);
            mix_cols(&mut u, k, j, [&s, &t, &nbg, &ag]);
        }
        if ring.is_zero(h.get(i, k)) {
            continue;
        }
        let unit = ring.unit_normal(h.get(i, k));
        scale_col(&mut h, k, &unit);
        scale_col(&mut u, k, &unit);
        for j in 0..k {
            let (q, _) = ring.euclid_div(h.get(i, j), h.get(i, k))?;
            let nq = ring.neg(&q);
            add_col_multiple(&mut h, j, k, &nq);
            add_col_multiple(&mut u, j, k, &nq);
        }
        pivot_rows.push(i);
        k += 1;
    }
    Ok(HermiteForm { h, u, rank: k, pivot_rows })
}

/// `(H, U)` with `H = A·U` in column Hermite form.
pub fn hnf(a: &Mat) -> Result<(Mat, Mat)> {
    let f = hermite(a)?;
    Ok((f.h, f.u))
}

/// A basis of the kernel `{x : A·x = 0}` as columns (Euclidean rings).
pub fn kernel_basis(a: &Mat) -> Result<Mat> {
    let f = hermite(a)?;
    Ok(f.u.col_range(f.rank, a.cols()))
}

/// A basis of the column span of `A` as columns (Euclidean rings).
pub fn column_basis(a: &Mat) -> Result<Mat> {
    let f = hermite(a)?;
    Ok(f.h.col_range(0, f.rank))
}

// ---- Smith normal form ---------------------------------------------------

/// `U·A·V = D` with `D` diagonal and `d₁ | d₂ | ⋯`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Mat,
    pub v: Mat,
    pub d: Mat,
    /// Inverse of `u`, maintained alongside it.
    pub u_inv: Mat,
    /// Diagonal of `d`, length `min(rows, cols)`: units, proper factors, then zeros.
    pub invariant_factors: Vec<RingElem>,
    pub rank: usize,
}

pub fn snf(a: &Mat) -> Result<SmithForm> {
    let ring = a.ring();
    require_euclidean(ring)?;
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Mat::identity(ring, rows);
    let mut u_inv = Mat::identity(ring, rows);
    let mut v = Mat::identity(ring, cols);
    let one = ring.one();
    let zero = ring.zero();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize, num_bigint::BigInt)> = None;
        for i in t..rows {
            for j in t..cols {
                let e = d.get(i, j);
                if ring.is_zero(e) {
                    continue;
                }
                let n = ring.norm(e)?;
                if best.as_ref().is_none_or(|b| n < b.2) {
                    best = Some((i, j, n));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut u_inv, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if ring.is_zero(d.get(i, t)) {
                    continue;
                }
                let [_, s, tt, ag, bg] = bezout(ring, d.get(t, t), d.get(i, t))?;
                let nbg = ring.neg(&bg);
                let ntt = ring.neg(&tt);
                mix_rows(&mut d, t, i, [&s, &tt, &nbg, &ag]);
                mix_rows(&mut u, t, i, [&s, &tt, &nbg, &ag]);
                // inverse of [[s, t], [-b, a]] is [[a, -t], [b, s]], applied on the right
                mix_cols(&mut u_inv, t, i, [&ag, &bg, &ntt, &s]);
            }
            for j in t + 1..cols {
                if ring.is_zero(d.get(t, j)) {
                    continue;
                }
                clean = false;
                let [_, s, tt, ag, bg] = bezout(ring, d.get(t, t), d.get(t, j))?;
                let nbg = ring.neg(&bg);
                mix_cols(&mut d, t, j, [&s, &tt, &nbg, &ag]);
                mix_cols(&mut v, t, j, [&s, &tt, &nbg, &ag]);
            }
            if !clean && (t + 1..rows).any(|i| !ring.is_zero(d.get(i, t))) {
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !ring.divides(d.get(t, t), d.get(i, j))));
            match offender {
                Some(i) => {
                    // row_t += row_i, so u_inv picks up col_i -= col_t
                    mix_rows(&mut d, t, i, [&one, &one, &zero, &one]);
                    mix_rows(&mut u, t, i, [&one, &one, &zero, &one]);
                    let neg_one = ring.neg(&one);
                    mix_cols(&mut u_inv, t, i, [&one, &zero, &neg_one, &one]);
                }
                None => break,
            }
        }
        let unit = ring.unit_normal(d.get(t, t));
        if !ring.is_one(&unit) {
            let inv = ring.inv(&unit).expect("unit");
            scale_row(&mut d, t, &unit);
            scale_row(&mut u, t, &unit);
            scale_col(&mut u_inv, t, &inv);
        }
        t += 1;
    }
    let invariant_factors: Vec<RingElem> = (0..rows.min(cols)).map(|i| d.get(i, i).clone()).collect();
    let rank = invariant_factors.iter().filter(|e| !ring.is_zero(e)).count();
    Ok(SmithForm { u, v, d, u_inv, invariant_factors, rank })
}

// ---- determinants ----------------------------------------------------------

/// Determinant by fraction-free (Bareiss) elimination; `Z/n` is computed on the lift.
pub fn det(a: &Mat) -> Result<RingElem> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("determinant of a {}x{} matrix", a.rows(), a.cols())));
    }
    let ring = a.ring();
    if !ring.is_euclidean() {
        let d = det(&a.lift())?;
        return Ok(ring.from_bigint(d.as_int().expect("integer").clone()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(ring.one());
    }
    let mut m = a.clone();
    let mut negate = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        if ring.is_zero(m.get(k, k)) {
            match (k + 1..n).find(|&i| !ring.is_zero(m.get(i, k))) {
                Some(i) => {
                    swap_rows(&mut m, k, i);
                    negate = !negate;
                }
                None => return Ok(ring.zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = ring.sub(&ring.mul(m.get(i, j), m.get(k, k)), &ring.mul(m.get(i, k), m.get(k, j)));
                let v = ring.div_exact(&num, &prev).expect("Bareiss division is exact");
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    let d = m.get(n - 1, n - 1).clone();
    Ok(if negate { ring.neg(&d) } else { d })
}

// ---- solving -------------------------------------------------------------

/// `A·X = B` solved over a Euclidean ring through the Smith form of `A`.
fn solve_euclidean(a: &Mat, b: &Mat) -> Result<Option<Mat>> {
    let ring = a.ring();
    let sf = snf(a)?;
    let c = sf.u.mul(b);
    let mut y = Mat::zeros(ring, a.cols(), b.cols());
    for col in 0..b.cols() {
        for i in 0..a.rows() {
            let ci = c.get(i, col);
            if i < sf.rank {
                match ring.div_exact(ci, &sf.invariant_factors[i]) {
                    Some(q) => y.set(i, col, q),
                    None => return Ok(None),
                }
            } else if !ring.is_zero(ci) {
                return Ok(None);
            }
        }
    }
    Ok(Some(sf.v.mul(&y)))
}

/// Solve `A·X = B` exactly over the ring of `A`; `None` when no solution exists.
pub fn solve_linear(a: &Mat, b: &Mat) -> Result<Option<Mat>> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", a.ring(), b.ring())));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows but B has {}",
            a.rows(),
            b.rows()
        )));
    }
    let ring = a.ring();
    match ring.modulus() {
        Some(n) => {
            let lifted = a.lift().hcat(&Mat::scalar(RingDesc::Integers, a.rows(), &RingDesc::Integers.from_i64(n as i64)));
            Ok(solve_euclidean(&lifted, &b.lift())?.map(|x| x.row_range(0, a.cols()).reduce_to(ring)))
        }
        None => solve_euclidean(a, b),
    }
}

/// Find `P` with `P·A − B` having every column in the column span of `rel`
/// (all over one Euclidean ring). Rows decouple after diagonalising `rel`.
pub fn solve_left_mod(a: &Mat, b: &Mat, rel: &Mat) -> Result<Option<Mat>> {
    let ring = a.ring();
    require_euclidean(ring)?;
    assert_eq!(a.cols(), b.cols(), "constraint widths");
    assert_eq!(b.rows(), rel.rows(), "target dimension");
    let t = rel.rows();
    let sf = snf(rel)?;
    let ub = sf.u.mul(b);
    let at = a.transpose();
    let q = a.cols();
    let mut p_prime = Mat::zeros(ring, t, a.rows());
    for i in 0..t {
        let d = if i < sf.rank { sf.invariant_factors[i].clone() } else { ring.zero() };
        if ring.is_unit(&d) {
            continue;
        }
        let rhs = ub.row(i).transpose();
        let system = if ring.is_zero(&d) { at.clone() } else { at.hcat(&Mat::scalar(ring, q, &d)) };
        match solve_euclidean(&system, &rhs)? {
            Some(x) => {
                for j in 0..a.rows() {
                    p_prime.set(i, j, x.get(j, 0).clone());
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(sf.u_inv.mul(&p_prime)))
}

/// Whether every column of `v` lies in the column span of `gens` (over the
/// ring of `gens`, with `Z/n` handled by lifting).
pub fn in_span(gens: &Mat, v: &Mat) -> Result<bool> {
    Ok(solve_linear(gens, v)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: usize, cols: usize, v: &[i64]) -> Mat {
        Mat::from_i64(RingDesc::Integers, rows, cols, v)
    }

    #[test]
    fn hnf_examples() {
        let id = Mat::identity(RingDesc::Integers, 3);
        let (h, u) = hnf(&id).unwrap();
        assert_eq!(h, id);
        assert_eq!(u, id);
        let (h, u) = hnf(&z(1, 2, &[2, 4])).unwrap();
        assert_eq!(h, z(1, 2, &[2, 0]));
        assert_eq!(z(1, 2, &[2, 4]).mul(&u), h);
        let (h, _) = hnf(&z(1, 2, &[2, 3])).unwrap();
        assert_eq!(h, z(1, 2, &[1, 0]));
    }

    #[test]
    fn hnf_reduces_left_of_pivots() {
        let a = z(2, 2, &[3, 1, 7, 8]);
        let f = hermite(&a).unwrap();
        assert_eq!(a.mul(&f.u), f.h);
        assert_eq!(f.rank, 2);
        // second pivot at row 1; entry to its left lies in [0, pivot)
        let piv = f.h.get(1, 1).as_int().unwrap().clone();
        let left = f.h.get(1, 0).as_int().unwrap().clone();
        assert!(left >= 0.into() && left < piv);
        assert!(RingDesc::Integers.is_unit(&det(&f.u).unwrap()));
    }

    #[test]
    fn snf_examples() {
        let sf = snf(&z(2, 2, &[2, 0, 0, 3])).unwrap();
        assert_eq!(sf.invariant_factors, vec![RingDesc::Integers.from_i64(1), RingDesc::Integers.from_i64(6)]);
        let sf = snf(&z(2, 2, &[2, 0, 0, 4])).unwrap();
        assert_eq!(sf.invariant_factors, vec![RingDesc::Integers.from_i64(2), RingDesc::Integers.from_i64(4)]);
        let sf = snf(&Mat::zeros(RingDesc::Integers, 2, 3)).unwrap();
        assert_eq!(sf.rank, 0);
        let sf = snf(&Mat::zeros(RingDesc::Integers, 0, 3)).unwrap();
        assert!(sf.invariant_factors.is_empty());
        assert!(matches!(snf(&Mat::identity(RingDesc::IntegersMod(4), 1)), Err(Error::UnsupportedRing(_))));
    }

    #[test]
    fn snf_tracks_inverse_transform() {
        let a = z(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]);
        let sf = snf(&a).unwrap();
        assert_eq!(sf.u.mul(&a).mul(&sf.v), sf.d);
        assert_eq!(sf.u.mul(&sf.u_inv), Mat::identity(RingDesc::Integers, 3));
        let ring = RingDesc::Integers;
        assert_eq!(sf.invariant_factors, vec![ring.from_i64(2), ring.from_i64(6), ring.from_i64(12)]);
    }

    #[test]
    fn gaussian_and_field_snf() {
        use crate::ring::{GaussInt, RingElem};
        let zi = RingDesc::GaussianIntegers;
        let g = |a: i64, b: i64| RingElem::Gauss(GaussInt::new(a, b));
        let a = Mat::new(zi, 2, 2, vec![g(2, 0), g(0, 0), g(0, 0), g(1, 1)]).unwrap();
        let sf = snf(&a).unwrap();
        assert_eq!(sf.u.mul(&a).mul(&sf.v), sf.d);
        // gcd(2, 1+i) = 1+i and lcm = 2 up to units
        assert_eq!(sf.invariant_factors[0], g(1, 1));
        assert_eq!(sf.invariant_factors[1], zi.normalize(&g(2, 0)));
        let q = RingDesc::Rationals;
        let sf = snf(&Mat::from_i64(q, 2, 2, &[2, 4, 1, 2])).unwrap();
        assert_eq!(sf.invariant_factors, vec![q.one(), q.zero()]);
    }

    #[test]
    fn solve_examples() {
        assert!(solve_linear(&z(1, 1, &[2]), &z(1, 1, &[3])).unwrap().is_none());
        let b = z(2, 2, &[5, -1, 7, 3]);
        assert_eq!(solve_linear(&Mat::identity(RingDesc::Integers, 2), &b).unwrap(), Some(b));
        let z6 = RingDesc::IntegersMod(6);
        let x = solve_linear(&Mat::from_i64(z6, 1, 1, &[2]), &Mat::from_i64(z6, 1, 1, &[4])).unwrap().unwrap();
        assert_eq!(Mat::from_i64(z6, 1, 1, &[2]).mul(&x), Mat::from_i64(z6, 1, 1, &[4]));
        assert!(solve_linear(&z(2, 1, &[1, 1]), &z(1, 1, &[1])).is_err());
    }

    #[test]
    fn solve_mod_residues_exhaustive() {
        // over Z/n (n ≤ 8) with 1×1 systems: solvable iff some residue works
        for n in 2..=8u64 {
            let r = RingDesc::IntegersMod(n);
            for a in 0..n as i64 {
                for b in 0..n as i64 {
                    let brute = (0..n as i64).any(|x| (a * x - b).rem_euclid(n as i64) == 0);
                    let got = solve_linear(&Mat::from_i64(r, 1, 1, &[a]), &Mat::from_i64(r, 1, 1, &[b])).unwrap();
                    assert_eq!(got.is_some(), brute, "n={n} a={a} b={b}");
                    if let Some(x) = got {
                        assert_eq!(Mat::from_i64(r, 1, 1, &[a]).mul(&x), Mat::from_i64(r, 1, 1, &[b]));
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_of_row() {
        let k = kernel_basis(&z(1, 2, &[1, 1])).unwrap();
        assert_eq!(k.cols(), 1);
        assert_eq!(z(1, 2, &[1, 1]).mul(&k), z(1, 1, &[0]));
        let v = k.col_vec(0);
        assert_eq!(RingDesc::Integers.add(&v[0], &v[1]), RingDesc::Integers.zero());
        assert!(RingDesc::Integers.is_unit(&v[0]));
    }

    #[test]
    fn left_solve_modulo_relations() {
        // find p with p·2 ≡ 1 mod 3
        let p = solve_left_mod(&z(1, 1, &[2]), &z(1, 1, &[1]), &z(1, 1, &[3])).unwrap().unwrap();
        let r = p.mul(&z(1, 1, &[2])).sub(&z(1, 1, &[1]));
        assert!(in_span(&z(1, 1, &[3]), &r).unwrap());
        // p·2 ≡ 1 mod 4 impossible
        assert!(solve_left_mod(&z(1, 1, &[2]), &z(1, 1, &[1]), &z(1, 1, &[4])).unwrap().is_none());
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&z(3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 2])).unwrap(), RingDesc::Integers.from_i64(6));
        assert_eq!(det(&z(2, 2, &[0, 1, 1, 0])).unwrap(), RingDesc::Integers.from_i64(-1));
        assert_eq!(det(&z(0, 0, &[])).unwrap(), RingDesc::Integers.one());
    }
}
