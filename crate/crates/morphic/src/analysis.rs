//! Structural predicates on morphisms and small word-combinatorics utilities.
//!
//! The predicates here feed the decision pipeline's precondition checks:
//! primitivity (every letter eventually occurs in every image), growth
//! (iterated image lengths tend to infinity) and existence of the infinite
//! iterated word `m^ω(x)`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::words::{Letter, Morphism, Word};

/// Structural summary of a morphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MorphismProfile {
    /// Some power of the morphism maps every letter onto the full alphabet.
    pub primitive: bool,
    /// Every letter's iterated image length tends to infinity.
    /// Erasing morphisms are reported as not growing (an erased letter's
    /// iterates are eventually empty).
    pub growing: bool,
    /// Letters that occur in their own image.
    pub cyclic_letters: Vec<Letter>,
    /// Largest letter-image length.
    pub max_image_len: usize,
}

/// Compute the structural summary of a morphism.
pub fn profile(m: &Morphism) -> MorphismProfile {
    let growing = m.is_nonerasing() && bounded_core(m).is_empty();
    MorphismProfile {
        primitive: is_primitive(m),
        growing,
        cyclic_letters: cyclic_letters(m),
        max_image_len: m.max_image_len(),
    }
}

/// Boolean occurrence matrix: entry (i, j) says whether letter `i` occurs in
/// `m(j)`.
fn occurrence_matrix(m: &Morphism) -> Vec<Vec<bool>> {
    let n = m.alphabet().len();
    let mut b = vec![vec![false; n]; n];
    for j in m.alphabet().letters() {
        for &i in m.image(j).letters() {
            b[i.index()][j.index()] = true;
        }
    }
    b
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

/// True iff the morphism is primitive: for some `k ≥ 1`, every letter occurs
/// in `m^k(x)` for every letter `x`.
///
/// Decided by raising the Boolean occurrence matrix to the Wielandt exponent
/// `n² − 2n + 2`, which is the sharp bound on the exponent of a primitive
/// matrix: the power is all-positive exactly when the matrix is primitive.
pub fn is_primitive(m: &Morphism) -> bool {
    let n = m.alphabet().len();
    let exponent = (n * n).saturating_sub(2 * n) + 2;
    let base = occurrence_matrix(m);
    let mut result: Option<Vec<Vec<bool>>> = None;
    let mut sq = base;
    let mut k = exponent;
    while k > 0 {
        if k & 1 == 1 {
            result = Some(match result {
                None => sq.clone(),
                Some(r) => bool_mul(&r, &sq),
            });
        }
        k >>= 1;
        if k > 0 {
            sq = bool_mul(&sq, &sq);
        }
    }
    let power = result.expect("exponent is at least 1");
    power.iter().all(|row| row.iter().all(|&e| e))
}

/// The set of letters whose iterates stay single letters forever: the largest
/// set of letters with length-1 images that is closed under taking that one
/// image letter. Nonempty exactly when some letter fails to grow, provided
/// the morphism is nonerasing.
fn bounded_core(m: &Morphism) -> BTreeSet<Letter> {
    let mut core: BTreeSet<Letter> = m
        .alphabet()
        .letters()
        .filter(|&l| m.image(l).len() == 1)
        .collect();
    loop {
        let stale: Vec<Letter> = core
            .iter()
            .copied()
            .filter(|&l| !core.contains(&m.image(l).letters()[0]))
            .collect();
        if stale.is_empty() {
            return core;
        }
        for l in stale {
            core.remove(&l);
        }
    }
}

/// True iff every letter's iterated image length tends to infinity.
///
/// Restricted to nonerasing morphisms. For those, image lengths never shrink,
/// so a letter fails to grow exactly when its iterates eventually consist of
/// letters from the bounded core; the core is empty iff all letters grow.
pub fn is_growing(m: &Morphism) -> Result<bool> {
    if !m.is_nonerasing() {
        return Err(Error::Input(
            "is_growing is only supported for nonerasing morphisms".into(),
        ));
    }
    Ok(bounded_core(m).is_empty())
}

/// The letters that occur in their own image.
pub fn cyclic_letters(m: &Morphism) -> Vec<Letter> {
    m.alphabet()
        .letters()
        .filter(|&l| m.image(l).letters().contains(&l))
        .collect()
}

/// Letters whose iterated images are eventually empty.
fn mortal_letters(m: &Morphism) -> Vec<bool> {
    let n = m.alphabet().len();
    let mut mortal = vec![false; n];
    loop {
        let mut changed = false;
        for l in m.alphabet().letters() {
            if !mortal[l.index()]
                && m.image(l).letters().iter().all(|c| mortal[c.index()])
            {
                mortal[l.index()] = true;
                changed = true;
            }
        }
        if !changed {
            return mortal;
        }
    }
}

/// True iff the infinite word `m^ω(x)` exists: `m(x)` has the proper prefix
/// `x` and `|m^k(x)|` tends to infinity.
///
/// Since `m^{k+1}(x) = m^k(x) · m^k(u)` where `m(x) = x·u`, the lengths grow
/// without bound exactly when some letter of `u` never dies out; for
/// nonerasing morphisms that is automatic, so the test reduces to `m(x)`
/// beginning with `x` and having length at least 2.
pub fn omega_exists(m: &Morphism, x: Letter) -> bool {
    if x.index() >= m.alphabet().len() {
        return false;
    }
    let img = m.image(x);
    if img.len() < 2 || img.letters()[0] != x {
        return false;
    }
    let mortal = mortal_letters(m);
    img.letters()[1..].iter().any(|c| !mortal[c.index()])
}

/// The prefix of length `q`, or the whole word if it is shorter.
pub fn pref_q(w: &Word, q: usize) -> Word {
    let take = q.min(w.len());
    Word::from_letters(w.letters()[..take].to_vec())
}

/// All factors of length exactly `q`.
pub fn factors_q(w: &Word, q: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if q <= w.len() {
        for window in w.letters().windows(q.max(1)) {
            out.insert(Word::from_letters(window.to_vec()));
        }
        if q == 0 {
            out.clear();
            out.insert(Word::empty());
        }
    } else if q == 0 {
        out.insert(Word::empty());
    }
    out
}

/// The smallest period of a nonempty word: the least `p ≥ 1` such that
/// letters `p` apart always agree. Computed from the longest proper border
/// via the standard failure function; `period = |w| − border`.
pub fn period(w: &Word) -> Result<usize> {
    let letters = w.letters();
    if letters.is_empty() {
        return Err(Error::Input("the period of the empty word is undefined".into()));
    }
    let len = letters.len();
    let mut failure = vec![0usize; len];
    let mut k = 0usize;
    for i in 1..len {
        while k > 0 && letters[i] != letters[k] {
            k = failure[k - 1];
        }
        if letters[i] == letters[k] {
            k += 1;
        }
        failure[i] = k;
    }
    Ok(len - failure[len - 1])
}

/// The prefixes `Pref_q(m^i(w))` for `i = 0, …, steps`, computed without
/// materializing the iterates: for nonerasing `m`, the length-`q` prefix of
/// `m(v)` depends only on the length-`q` prefix of `v`.
pub fn iterated_prefixes(m: &Morphism, w: &Word, q: usize, steps: usize) -> Result<Vec<Word>> {
    if !m.is_nonerasing() {
        return Err(Error::Input(
            "iterated_prefixes requires a nonerasing morphism".into(),
        ));
    }
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = pref_q(w, q);
    out.push(cur.clone());
    for _ in 0..steps {
        cur = pref_q(&m.apply(&cur)?, q);
        out.push(cur.clone());
    }
    Ok(out)
}

fn factors_up_to(w: &Word, q: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for len in 1..=q {
        out.extend(factors_q(w, len));
    }
    out
}

/// The factor sets `F_q(m^i(w))` for `i = 0, …, steps`, computed without
/// materializing the iterates. For nonerasing `m` a length-`q` window of
/// `m(v)` spans at most `q` letters of `v`, so it suffices to evolve the set
/// of factors of length at most `q`.
pub fn iterated_factor_sets(
    m: &Morphism,
    w: &Word,
    q: usize,
    steps: usize,
) -> Result<Vec<BTreeSet<Word>>> {
    if !m.is_nonerasing() {
        return Err(Error::Input(
            "iterated_factor_sets requires a nonerasing morphism".into(),
        ));
    }
    if q == 0 {
        return Err(Error::Input("factor length must be at least 1".into()));
    }
    let mut short = factors_up_to(w, q);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(short.iter().filter(|f| f.len() == q).cloned().collect());
    for _ in 0..steps {
        let mut next = BTreeSet::new();
        for v in &short {
            next.extend(factors_up_to(&m.apply(v)?, q));
        }
        short = next;
        out.push(short.iter().filter(|f| f.len() == q).cloned().collect());
    }
    Ok(out)
}
