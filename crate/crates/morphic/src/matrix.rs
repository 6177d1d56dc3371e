//! Incidence matrices of morphisms, with exact big-integer arithmetic.
//!
//! The incidence matrix `M` of a morphism `m` over `n` letters is the `n × n`
//! matrix with `M[i][j]` = number of occurrences of letter `i` in `m(j)`.
//! With Parikh vectors as columns this gives the transform law
//! `parikh(m(w)) = M · parikh(w)`, and composition multiplies matrices:
//! the tower `[g, h]` (apply `h` first) has matrix `M_g · M_h`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::words::{Morphism, MorphismTower, Word};

/// The Parikh vector of a word: occurrence counts per letter, in alphabet order.
pub fn parikh(w: &Word, n: usize) -> Vec<BigUint> {
    let mut counts = vec![BigUint::zero(); n];
    for &l in w.letters() {
        counts[l.index()] += 1u32;
    }
    counts
}

/// A square nonnegative integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IncidenceMatrix {
    n: usize,
    entries: Vec<BigUint>,
}

impl IncidenceMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigUint::one();
        }
        IncidenceMatrix { n, entries }
    }

    /// The incidence matrix of a morphism.
    pub fn of_morphism(m: &Morphism) -> Self {
        let n = m.alphabet().len();
        let mut entries = vec![BigUint::zero(); n * n];
        for j in m.alphabet().letters() {
            for &i in m.image(j).letters() {
                entries[i.index() * n + j.index()] += 1u32;
            }
        }
        IncidenceMatrix { n, entries }
    }

    /// The incidence matrix of a tower: the product of its layers' matrices,
    /// leftmost layer's matrix leftmost in the product.
    pub fn of_tower(t: &MorphismTower) -> Self {
        let mut acc = IncidenceMatrix::identity(t.alphabet().len());
        for m in t.layers() {
            acc = acc.mul(&IncidenceMatrix::of_morphism(m));
        }
        acc
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &IncidenceMatrix) -> IncidenceMatrix {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let n = self.n;
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        IncidenceMatrix { n, entries }
    }

    /// `self^k` by repeated squaring; `self^0` is the identity.
    pub fn pow(&self, mut k: u64) -> IncidenceMatrix {
        let mut result = IncidenceMatrix::identity(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The matrix-vector product `M · v` with `v` as a column.
    pub fn times_col(&self, v: &[BigUint]) -> Vec<BigUint> {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        let n = self.n;
        let mut out = vec![BigUint::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let a = &self.entries[i * n + j];
                if !a.is_zero() && !v[j].is_zero() {
                    out[i] += a * &v[j];
                }
            }
        }
        out
    }

    /// The vector-matrix product `rowᵀ · M`.
    pub fn row_times(&self, row: &[BigUint]) -> Vec<BigUint> {
        assert_eq!(row.len(), self.n, "vector length mismatch");
        let n = self.n;
        let mut out = vec![BigUint::zero(); n];
        for j in 0..n {
            for i in 0..n {
                let a = &self.entries[i * n + j];
                if !a.is_zero() && !row[i].is_zero() {
                    out[j] += a * &row[i];
                }
            }
        }
        out
    }

    /// Column sums. For an incidence matrix these are the image lengths:
    /// entry `j` is `|m(j)|`.
    pub fn column_sums(&self) -> Vec<BigUint> {
        let n = self.n;
        let mut out = vec![BigUint::zero(); n];
        for j in 0..n {
            for i in 0..n {
                out[j] += &self.entries[i * n + j];
            }
        }
        out
    }
}

/// The image lengths of a morphism's letters, in alphabet order.
pub fn image_length_row(m: &Morphism) -> Vec<BigUint> {
    m.alphabet().letters().map(|l| BigUint::from(m.image(l).len())).collect()
}
