use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{RingDesc, RingElem, RingMap};

/// A dense row-major matrix over one of the supported rings.
///
/// Matrices are values: every operation returns a fresh matrix. Shape
/// mismatches inside the kernel are programming errors and panic; user
/// supplied matrices are checked by [`Mat::new`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    ring: RingDesc,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl Mat {
    pub fn new(ring: RingDesc, rows: usize, cols: usize, entries: Vec<RingElem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !ring.contains(e)) {
            return Err(Error::RingMismatch(format!("entry {bad} is not a canonical element of {ring}")));
        }
        Ok(Mat { ring, rows, cols, entries })
    }

    /// Build from small integers, reducing them into the ring.
    pub fn from_i64(ring: RingDesc, rows: usize, cols: usize, vals: &[i64]) -> Self {
        assert_eq!(vals.len(), rows * cols, "entry count");
        Mat { ring, rows, cols, entries: vals.iter().map(|&v| ring.from_i64(v)).collect() }
    }

    pub fn from_fn(ring: RingDesc, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElem) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Mat { ring, rows, cols, entries }
    }

    pub fn zeros(ring: RingDesc, rows: usize, cols: usize) -> Self {
        Mat { ring, rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: RingDesc, n: usize) -> Self {
        Self::scalar(ring, n, &ring.one())
    }

    pub fn scalar(ring: RingDesc, n: usize, s: &RingElem) -> Self {
        Self::from_fn(ring, n, n, |i, j| if i == j { s.clone() } else { ring.zero() })
    }

    pub fn diag(ring: RingDesc, d: &[RingElem]) -> Self {
        Self::from_fn(ring, d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { ring.zero() })
    }

    /// A column vector.
    pub fn column(ring: RingDesc, v: Vec<RingElem>) -> Self {
        let n = v.len();
        Mat { ring, rows: n, cols: 1, entries: v }
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Mat {
        Mat::from_fn(self.ring, self.rows, 1, |i, _| self.get(i, j).clone())
    }

    pub fn row(&self, i: usize) -> Mat {
        Mat::from_fn(self.ring, 1, self.cols, |_, j| self.get(i, j).clone())
    }

    /// Entries of a single column as a vector.
    pub fn col_vec(&self, j: usize) -> Vec<RingElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.ring, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.ring, idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    /// Rows `start..end`.
    pub fn row_range(&self, start: usize, end: usize) -> Mat {
        let idx: Vec<usize> = (start..end).collect();
        self.select_rows(&idx)
    }

    /// Columns `start..end`.
    pub fn col_range(&self, start: usize, end: usize) -> Mat {
        let idx: Vec<usize> = (start..end).collect();
        self.select_cols(&idx)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn assert_same_shape(&self, o: &Mat) {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
    }

    pub fn add(&self, o: &Mat) -> Mat {
        self.assert_same_shape(o);
        let r = self.ring;
        Mat {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| r.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.assert_same_shape(o);
        let r = self.ring;
        Mat {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| r.sub(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(&self.ring.from_i64(-1))
    }

    pub fn scale(&self, s: &RingElem) -> Mat {
        let r = self.ring;
        Mat { ring: r, rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| r.mul(s, a)).collect() }
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        assert_eq!(self.cols, o.rows, "inner dimension mismatch: {}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols);
        let r = self.ring;
        let mut out = Mat::zeros(r, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if r.is_zero(b) {
                        continue;
                    }
                    let v = r.add(out.get(i, j), &r.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Checked product for user-facing paths.
    pub fn try_mul(&self, o: &Mat) -> Result<Mat> {
        if self.ring != o.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, o.ring)));
        }
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(self.mul(o))
    }

    pub fn pow(&self, e: usize) -> Mat {
        assert!(self.is_square());
        let mut acc = Mat::identity(self.ring, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `[self | o]`
    pub fn hcat(&self, o: &Mat) -> Mat {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        assert_eq!(self.rows, o.rows, "row count mismatch in hcat");
        Mat::from_fn(self.ring, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    /// `[self ; o]`
    pub fn vcat(&self, o: &Mat) -> Mat {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        assert_eq!(self.cols, o.cols, "column count mismatch in vcat");
        let mut entries = self.entries.clone();
        entries.extend(o.entries.iter().cloned());
        Mat { ring: self.ring, rows: self.rows + o.rows, cols: self.cols, entries }
    }

    pub fn hcat_all(ring: RingDesc, rows: usize, parts: &[&Mat]) -> Mat {
        parts.iter().fold(Mat::zeros(ring, rows, 0), |acc, p| acc.hcat(p))
    }

    pub fn block_diag(&self, o: &Mat) -> Mat {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        let r = self.ring;
        Mat::from_fn(r, self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                r.zero()
            }
        })
    }

    /// Kronecker product; row `(i, k)` is index `i·o.rows + k`.
    pub fn kron(&self, o: &Mat) -> Mat {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        let r = self.ring;
        Mat::from_fn(r, self.rows * o.rows, self.cols * o.cols, |i, j| {
            let (a, b) = (i / o.rows, i % o.rows);
            let (c, d) = (j / o.cols, j % o.cols);
            r.mul(self.get(a, c), o.get(b, d))
        })
    }

    /// Apply a ring homomorphism entrywise.
    pub fn map_ring(&self, phi: &RingMap) -> Mat {
        assert_eq!(self.ring, phi.source, "matrix is not over the source of the ring map");
        Mat {
            ring: phi.target,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| phi.apply(e)).collect(),
        }
    }

    /// Reinterpret a `Z/n` matrix over `Z` using residues in `[0, n)`.
    pub fn lift(&self) -> Mat {
        match self.ring {
            RingDesc::IntegersMod(_) => Mat { ring: RingDesc::Integers, ..self.clone() },
            _ => self.clone(),
        }
    }

    /// Reduce an integer matrix into `ring` (the inverse of [`Mat::lift`]).
    pub fn reduce_to(&self, ring: RingDesc) -> Mat {
        if self.ring == ring {
            return self.clone();
        }
        assert_eq!(self.ring, RingDesc::Integers, "only integer matrices can be reduced");
        Mat {
            ring,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| ring.from_bigint(e.as_int().expect("integer").clone()))
                .collect(),
        }
    }

    /// The largest absolute value of an integer entry (0 for other rings).
    pub fn max_abs_int(&self) -> BigInt {
        use num_traits::Signed;
        self.entries
            .iter()
            .filter_map(|e| e.as_int().map(|v| v.abs()))
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "] over {}", self.ring)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_checked() {
        let z = RingDesc::Integers;
        assert!(Mat::new(z, 2, 2, vec![z.one()]).is_err());
        let bad = Mat::new(RingDesc::IntegersMod(4), 1, 1, vec![RingElem::Int(7.into())]);
        assert!(matches!(bad, Err(Error::RingMismatch(_))));
        let a = Mat::from_i64(z, 2, 3, &[1, 2, 3, 4, 5, 6]);
        assert!(a.try_mul(&a).is_err());
    }

    #[test]
    fn products_and_blocks() {
        let z = RingDesc::Integers;
        let a = Mat::from_i64(z, 2, 2, &[1, 2, 3, 4]);
        let b = Mat::from_i64(z, 2, 1, &[1, -1]);
        assert_eq!(a.mul(&b), Mat::from_i64(z, 2, 1, &[-1, -1]));
        let k = Mat::identity(z, 2).kron(&Mat::from_i64(z, 1, 2, &[5, 7]));
        assert_eq!(k, Mat::from_i64(z, 2, 4, &[5, 7, 0, 0, 0, 0, 5, 7]));
        let d = a.block_diag(&Mat::zeros(z, 0, 0));
        assert_eq!(d, a);
        let e = Mat::zeros(z, 3, 0);
        assert_eq!(e.mul(&Mat::zeros(z, 0, 2)), Mat::zeros(z, 3, 2));
    }

    #[test]
    fn lift_and_reduce() {
        let z4 = RingDesc::IntegersMod(4);
        let a = Mat::from_i64(z4, 1, 2, &[6, -1]);
        assert_eq!(a.lift(), Mat::from_i64(RingDesc::Integers, 1, 2, &[2, 3]));
        assert_eq!(a.lift().reduce_to(z4), a);
    }
}
