//! Slow, independent reference implementations.
//!
//! Everything here works by brute force — materialize, iterate, compare —
//! with none of the matrix, polynomial, or memoization machinery of the main
//! pipeline, so the two can cross-check each other. All entry points are
//! budgeted and fail loudly instead of silently truncating.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::analysis::omega_exists;
use crate::engine::{comparable_words, Comparability};
use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::words::{Letter, Morphism, MorphismTower, Word};

/// Default ceiling on materialized word length for the reference checks.
pub const DEFAULT_ORACLE_BUDGET: usize = 10_000_000;

/// Outcome of a direct prefix comparison of two infinite iteration words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleReport {
    /// The words agree on their first `l` letters.
    NoMismatchWithin(usize),
    /// First disagreement, 0-based.
    MismatchAt { position: usize, left: Letter, right: Letter },
}

/// A prefix of the iteration word of `m` from `x` with at least `l` letters,
/// by plain repeated application.
fn orbit_prefix(m: &Morphism, x: Letter, l: usize, budget: usize) -> Result<Word> {
    if l > budget {
        return Err(Error::ResourceLimit(format!(
            "requested prefix length {l} exceeds the oracle budget {budget}"
        )));
    }
    let mut w = Word::from_letters(vec![x]);
    while w.len() < l {
        w = m.apply(&w)?;
    }
    Ok(w)
}

/// Compare the iteration words of `g` and `h` from `x` letter by letter, up
/// to length `l`, by materializing both prefixes.
pub fn naive_equal_up_to(
    g: &Morphism,
    h: &Morphism,
    x: Letter,
    l: usize,
    budget: usize,
) -> Result<OracleReport> {
    if g.alphabet() != h.alphabet() {
        return Err(Error::Input("the two morphisms must share an alphabet".into()));
    }
    if !omega_exists(g, x) || !omega_exists(h, x) {
        return Err(Error::Precondition(format!(
            "both morphisms must have an infinite iteration word from '{}'",
            g.alphabet().symbol(x)
        )));
    }
    let u = orbit_prefix(g, x, l, budget)?;
    let v = orbit_prefix(h, x, l, budget)?;
    for i in 0..l {
        let (a, b) = (u.letters()[i], v.letters()[i]);
        if a != b {
            return Ok(OracleReport::MismatchAt { position: i, left: a, right: b });
        }
    }
    Ok(OracleReport::NoMismatchWithin(l))
}

/// Signed incidence matrix of a tower, row-major.
fn signed_matrix(t: &MorphismTower) -> (usize, Vec<BigInt>) {
    let m = IncidenceMatrix::of_tower(t);
    let n = m.size();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(BigInt::from(m.get(i, j).clone()));
        }
    }
    (n, entries)
}

/// The image-length difference row `|first(c)| − |second(c)|`, per letter.
fn length_delta(first: &MorphismTower, second: &MorphismTower) -> Result<Vec<BigInt>> {
    if first.alphabet() != second.alphabet() {
        return Err(Error::Input("the two towers must share an alphabet".into()));
    }
    let a = IncidenceMatrix::of_tower(first).column_sums();
    let b = IncidenceMatrix::of_tower(second).column_sums();
    Ok(a.into_iter().zip(b).map(|(x, y)| BigInt::from(x) - BigInt::from(y)).collect())
}

fn row_times_signed(row: &[BigInt], n: usize, matrix: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, r) in row.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        for j in 0..n {
            out[j] += r * &matrix[i * n + j];
        }
    }
    out
}

/// The largest length difference `| |first(w)| − |second(w)| |` over the
/// words `w` generated by single letters under `first`'s incidence action,
/// scanning iteration depths `0..=k_max`. A lower bound for the true
/// supremum, exact once `k_max` passes the transient and one full period.
pub fn naive_bal(first: &MorphismTower, second: &MorphismTower, k_max: usize) -> Result<BigUint> {
    let delta = length_delta(first, second)?;
    let (n, matrix) = signed_matrix(first);
    let mut best = BigUint::zero();
    let mut row = delta;
    for _ in 0..=k_max {
        for entry in &row {
            let mag = entry.magnitude();
            if *mag > best {
                best = mag.clone();
            }
        }
        row = row_times_signed(&row, n, &matrix);
    }
    Ok(best)
}

/// Are `first(w)` and `second(w)` prefix-comparable? Decided by direct
/// materialization of both images.
pub fn naive_comp_member(
    first: &MorphismTower,
    second: &MorphismTower,
    w: &Word,
    budget: usize,
) -> Result<bool> {
    if first.alphabet() != second.alphabet() {
        return Err(Error::Input("the two towers must share an alphabet".into()));
    }
    let a = first.apply(w, budget)?;
    let b = second.apply(w, budget)?;
    Ok(matches!(comparable_words(&a, &b), Comparability::Comparable))
}

/// Apply a mixed sequence of the two morphisms to a seed letter: entry `1`
/// selects `g1`, entry `2` selects `g2`, and `seq[0]` is applied first.
pub fn mixed_composition(
    seq: &[u8],
    g1: &Morphism,
    g2: &Morphism,
    x: Letter,
    budget: usize,
) -> Result<Word> {
    if g1.alphabet() != g2.alphabet() {
        return Err(Error::Input("the two morphisms must share an alphabet".into()));
    }
    let mut w = Word::from_letters(vec![x]);
    for &s in seq {
        let m = match s {
            1 => g1,
            2 => g2,
            _ => return Err(Error::Input(format!("composition selector must be 1 or 2, got {s}"))),
        };
        let next: usize = w
            .letters()
            .iter()
            .try_fold(0usize, |acc, &c| acc.checked_add(m.image(c).len()))
            .ok_or_else(|| Error::ResourceLimit("composed word length overflows".into()))?;
        if next > budget {
            return Err(Error::ResourceLimit(format!(
                "composed word would reach {next} letters, over the budget {budget}"
            )));
        }
        w = m.apply(&w)?;
    }
    Ok(w)
}

/// Reference finiteness test for the length-difference supremum: iterate the
/// difference row under `first`'s incidence action and report whether the
/// integer row vector revisits an earlier value within `cap` steps. Finite
/// suprema force a revisit (finitely many bounded integer rows); unbounded
/// growth never revisits.
pub fn vector_cycle_bal_finite(
    first: &MorphismTower,
    second: &MorphismTower,
    cap: usize,
) -> Result<bool> {
    let delta = length_delta(first, second)?;
    let (n, matrix) = signed_matrix(first);
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut row = delta;
    for _ in 0..cap {
        if !seen.insert(row.clone()) {
            return Ok(true);
        }
        row = row_times_signed(&row, n, &matrix);
    }
    Ok(false)
}
