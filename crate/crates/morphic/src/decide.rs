//! The top-level decision procedure: do two primitive morphisms generate the
//! same infinite iteration word from one seed letter?
//!
//! With `n` the alphabet size and `k = 2n − 2`, the pair `(g, h)` is replaced
//! by the composed towers `f1 = g^k ∘ h^k` and `f2 = h^k ∘ g^k`. The two
//! iteration words coincide exactly when
//!
//! 1. the length-difference supremum of `(f1, f2)` is finite, and
//! 2. the single word `W = f1^A(x)`, for `A = ⌊9 n³ √(n ln n)⌋`, has
//!    prefix-comparable images `f1(W)` and `f2(W)`.
//!
//! Both conditions are decided exactly: the first by the polynomial test in
//! [`crate::balance`], the second by the streaming engine in
//! [`crate::engine`], which also pins the first-mismatch position when the
//! answer is negative.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::analysis::{is_primitive, omega_exists};
use crate::balance::{bal_upper_bound, BalanceInstance};
use crate::engine::{
    compare_images_configured, Comparability, CompareStats, EngineConfig, LayeredWordSpec,
};
use crate::error::{Error, Result};
use crate::numeric::{certified_floor, certified_ln, certified_sqrt, Interval};
use crate::oracle::{naive_equal_up_to, OracleReport};
use crate::words::{Letter, Morphism, MorphismTower, DEFAULT_MATERIALIZATION_BUDGET};

/// `⌊9 n³ √(n ln n)⌋`: the number of `f1` applications that makes the single
/// comparability check conclusive, certified by interval arithmetic.
pub fn a_of_n(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the prefix exponent requires an alphabet of at least 2 letters, got {n}"
        )));
    }
    let nine_n_cubed = BigRational::from_integer(BigInt::from(9u64) * num_traits::pow(BigInt::from(n), 3));
    let n_rat = BigRational::from_integer(BigInt::from(n as u64));
    let value = certified_floor(96, move |prec| {
        let ln_n = certified_ln(&Interval::from_integer(n as i64), prec)?;
        let root = certified_sqrt(&ln_n.scale(&n_rat), prec)?;
        Ok(root.scale(&nine_n_cubed))
    })?;
    Ok(value.magnitude().clone())
}

/// The composed towers `f1 = g^{2n−2} ∘ h^{2n−2}` and `f2 = h^{2n−2} ∘ g^{2n−2}`.
pub fn build_f1_f2(g: &Morphism, h: &Morphism) -> Result<(MorphismTower, MorphismTower)> {
    if g.alphabet() != h.alphabet() {
        return Err(Error::Input("the two morphisms must share an alphabet".into()));
    }
    let n = g.alphabet().len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the composed towers require an alphabet of at least 2 letters, got {n}"
        )));
    }
    let k = 2 * n - 2;
    let g_part = MorphismTower::power(g, k)?;
    let h_part = MorphismTower::power(h, k)?;
    // Layer lists apply right to left, so `g_part.then_after(h_part)` is the
    // map `w ↦ g^k(h^k(w))`.
    Ok((g_part.then_after(&h_part)?, h_part.then_after(&g_part)?))
}

/// Replace `(g, h)` by the composed pair `(g∘h, h∘g)`: when both iteration
/// words from `x` exist, the originals are equal iff the composed words are.
/// This brings any instance to one where both morphisms have the same
/// incidence matrix product structure, at the cost of squaring image lengths.
pub fn reduce_to_composed_pair(
    g: &Morphism,
    h: &Morphism,
    x: Letter,
) -> Result<(Morphism, Morphism)> {
    if g.alphabet() != h.alphabet() {
        return Err(Error::Input("the two morphisms must share an alphabet".into()));
    }
    if !omega_exists(g, x) || !omega_exists(h, x) {
        return Err(Error::Precondition(format!(
            "the composed-pair reduction needs both iteration words from '{}' to exist",
            g.alphabet().symbol(x)
        )));
    }
    Ok((g.compose(h)?, h.compose(g)?))
}

/// Why two iteration words are distinct.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NotEqualReason {
    /// The length-difference supremum of the composed towers is unbounded;
    /// equal words would keep it finite. The mismatch witness is optional
    /// and only searched for on request.
    BalanceInfinite { witness: Option<MismatchWitness> },
    /// The comparability check failed; the witness is exact.
    PrefixMismatch { witness: MismatchWitness },
}

/// A position where the two iteration words disagree, with both letters.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MismatchWitness {
    pub position: BigUint,
    pub left: Letter,
    pub right: Letter,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Equal,
    NotEqual(NotEqualReason),
}

/// Tunables for [`decide_equality`].
#[derive(Clone, Debug)]
pub struct DecisionConfig {
    /// Overflow cap handed to the comparability engine.
    pub overflow_cap: usize,
    /// Scale factor (≥ 1) on the prefix exponent `A`; the decision stays
    /// correct for any value, larger ones only add safety margin.
    pub a_multiplier: BigRational,
    /// Materialization budget for cached letter images.
    pub materialization_budget: usize,
    /// On a balance failure, also search the two iteration words directly
    /// for a mismatch witness (best effort, budgeted).
    pub locate_mismatch_on_balance_failure: bool,
    /// Prefix length scanned by that witness search.
    pub mismatch_search_budget: usize,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            overflow_cap: crate::engine::DEFAULT_OVERFLOW_CAP,
            a_multiplier: BigRational::one(),
            materialization_budget: DEFAULT_MATERIALIZATION_BUDGET,
            locate_mismatch_on_balance_failure: false,
            mismatch_search_budget: 100_000,
        }
    }
}

/// Facts recorded along the decision path.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub alphabet_size: usize,
    /// Number of `f1` applications defining the checked word (after the
    /// configured multiplier).
    pub prefix_exponent: BigUint,
    /// Layer count of each composed tower.
    pub tower_layers: usize,
    /// Whether the length-difference supremum is finite; `None` when the
    /// identical-morphism shortcut skipped the test.
    pub balance_finite: Option<bool>,
    /// Certified cap that a finite supremum cannot exceed, when cheap to
    /// compute (small alphabets only); informational.
    pub theoretical_overflow_cap: Option<BigUint>,
    pub compare_stats: Option<CompareStats>,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

/// Decide whether the iteration words of `g` and `h` from `x` are equal.
///
/// Preconditions (violations are reported as precondition errors): the
/// alphabet has at least two letters, both morphisms are primitive, and both
/// iteration words from `x` exist.
pub fn decide_equality(
    g: &Morphism,
    h: &Morphism,
    x: Letter,
    cfg: &DecisionConfig,
) -> Result<Decision> {
    if g.alphabet() != h.alphabet() {
        return Err(Error::Input("the two morphisms must share an alphabet".into()));
    }
    let alphabet = g.alphabet();
    if x.index() >= alphabet.len() {
        return Err(Error::Input("the seed letter is outside the alphabet".into()));
    }
    if cfg.a_multiplier < BigRational::one() {
        return Err(Error::Input("the prefix-exponent multiplier must be at least 1".into()));
    }
    let n = alphabet.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the decision procedure requires an alphabet of at least 2 letters, got {n}"
        )));
    }
    for (name, m) in [("first", g), ("second", h)] {
        if !is_primitive(m) {
            return Err(Error::Precondition(format!("the {name} morphism is not primitive")));
        }
    }
    for (name, m) in [("first", g), ("second", h)] {
        if !omega_exists(m, x) {
            return Err(Error::Precondition(format!(
                "the {name} morphism has no infinite iteration word from '{}'",
                alphabet.symbol(x)
            )));
        }
    }

    let exponent = scaled_exponent(n, &cfg.a_multiplier)?;
    let tower_layers = 2 * (2 * n - 2);

    if g == h {
        return Ok(Decision {
            verdict: Verdict::Equal,
            diagnostics: Diagnostics {
                alphabet_size: n,
                prefix_exponent: exponent,
                tower_layers,
                balance_finite: None,
                theoretical_overflow_cap: None,
                compare_stats: None,
            },
        });
    }

    let (f1, f2) = build_f1_f2(g, h)?;
    let theoretical_overflow_cap = theoretical_cap(&f1, &f2);

    let instance = BalanceInstance::new(&f1, &f2)?;
    if !instance.bal_finite() {
        let witness = if cfg.locate_mismatch_on_balance_failure {
            locate_witness(g, h, x, cfg.mismatch_search_budget)
        } else {
            None
        };
        return Ok(Decision {
            verdict: Verdict::NotEqual(NotEqualReason::BalanceInfinite { witness }),
            diagnostics: Diagnostics {
                alphabet_size: n,
                prefix_exponent: exponent,
                tower_layers,
                balance_finite: Some(false),
                theoretical_overflow_cap,
                compare_stats: None,
            },
        });
    }

    let depth = exponent.to_usize().ok_or_else(|| {
        Error::ResourceLimit(format!("the prefix exponent {exponent} does not fit in memory"))
    })?;
    let spec = LayeredWordSpec::from_tower_power(&f1, depth, x)?;
    let engine_cfg = EngineConfig {
        overflow_cap: cfg.overflow_cap,
        materialization_budget: cfg.materialization_budget,
        memoize: true,
    };
    let (outcome, stats) = compare_images_configured(&spec, &f1, &f2, &engine_cfg)?;
    let diagnostics = Diagnostics {
        alphabet_size: n,
        prefix_exponent: exponent,
        tower_layers,
        balance_finite: Some(true),
        theoretical_overflow_cap,
        compare_stats: Some(stats),
    };
    match outcome {
        Comparability::Comparable => Ok(Decision { verdict: Verdict::Equal, diagnostics }),
        Comparability::Mismatch { position, left, right } => Ok(Decision {
            verdict: Verdict::NotEqual(NotEqualReason::PrefixMismatch {
                witness: MismatchWitness { position, left, right },
            }),
            diagnostics,
        }),
        Comparability::CapExceeded { position } => Err(Error::ResourceLimit(format!(
            "the unmatched surplus outgrew the overflow cap {} at position {position}; \
             rerun with a larger cap",
            cfg.overflow_cap
        ))),
    }
}

/// `⌊A(n) · multiplier⌋` for a multiplier already validated to be ≥ 1.
fn scaled_exponent(n: usize, multiplier: &BigRational) -> Result<BigUint> {
    let a = BigRational::from_integer(BigInt::from(a_of_n(n)?));
    let scaled = (a * multiplier).floor().to_integer();
    Ok(scaled.magnitude().clone())
}

/// Best-effort direct search for a mismatch between the two iteration words.
fn locate_witness(g: &Morphism, h: &Morphism, x: Letter, l: usize) -> Option<MismatchWitness> {
    match naive_equal_up_to(g, h, x, l, l) {
        Ok(OracleReport::MismatchAt { position, left, right }) => {
            Some(MismatchWitness { position: BigUint::from(position), left, right })
        }
        _ => None,
    }
}

/// The certified cap on a finite length-difference supremum of the composed
/// pair, plus one expansion step of slack, when the alphabet is small enough
/// for the bound to be worth computing.
fn theoretical_cap(f1: &MorphismTower, f2: &MorphismTower) -> Option<BigUint> {
    let n = f1.alphabet().len();
    if n > 6 {
        return None;
    }
    let m = crate::matrix::IncidenceMatrix::of_tower(f1)
        .column_sums()
        .into_iter()
        .chain(crate::matrix::IncidenceMatrix::of_tower(f2).column_sums())
        .max()?;
    let m = m.to_usize()?;
    let bound = bal_upper_bound(n, m).ok()?;
    let total = bound.magnitude() + BigUint::from(m);
    Some(total)
}
