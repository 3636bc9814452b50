//! Random ring elements and matrices for the harness.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Mat;
use crate::ring::{GaussInt, RingDesc, RingElem};

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub ring: RingDesc,
    pub max_gens: usize,
    pub max_entry: i64,
}

impl Gen {
    /// A dimension in `lo..=max_gens`.
    pub fn size(&mut self, lo: usize) -> usize {
        self.rng.gen_range(lo.min(self.max_gens)..=self.max_gens)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn int(&mut self, bound: i64) -> i64 {
        self.rng.gen_range(-bound..=bound)
    }

    pub fn elem(&mut self) -> RingElem {
        let e = self.max_entry;
        match self.ring {
            RingDesc::Rationals => {
                let num = self.int(e);
                let den = self.rng.gen_range(1..=e.max(1));
                RingElem::Rat(num_rational::BigRational::new(num.into(), den.into()))
            }
            RingDesc::GaussianIntegers => {
                let b = (e / 2).max(1);
                RingElem::Gauss(GaussInt::new(self.int(b), self.int(b)))
            }
            r => r.from_i64(self.int(e)),
        }
    }

    /// Roughly a third of the entries are zero, which keeps the modules
    /// from collapsing to zero too often.
    pub fn mat(&mut self, rows: usize, cols: usize) -> Mat {
        let ring = self.ring;
        Mat::from_fn(ring, rows, cols, |_, _| if self.rng.gen_bool(0.35) { ring.zero() } else { self.elem() })
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())].clone()
    }
}
