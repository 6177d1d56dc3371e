//! Lazy streaming of layered words and the memoized prefix-comparability
//! engine.
//!
//! A [`LayeredWordSpec`] denotes a finite word `W` as a seed letter plus a
//! list of morphism layers, applied right to left; `W` itself may be far too
//! long to materialize (its length is still computed exactly, as a big
//! integer). [`compare_images`] then decides whether `f1(W)` and `f2(W)` are
//! prefix-comparable without enumerating `W`: it walks the expansion tree of
//! `W` depth-first, carries the unmatched surplus between the two image
//! streams as an [`OverflowState`], and memoizes each subtree's
//! state-to-state transition. Identical `(letter, level, state)` subtrees —
//! which dominate, since the layer list is periodic — are processed once.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::words::{Alphabet, Letter, Morphism, MorphismTower, Word};

/// Default cap on the unmatched surplus carried between the two streams.
pub const DEFAULT_OVERFLOW_CAP: usize = 1_000_000;

/// A finite word denoted by a seed letter and a list of layers: the word is
/// `layers[0](layers[1](… layers[m−1](seed) …))`, the last layer applied
/// first. The list may be empty, denoting the seed itself.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LayeredWordSpec {
    alphabet: Alphabet,
    layers: Vec<Morphism>,
    seed: Letter,
}

impl LayeredWordSpec {
    pub fn new(alphabet: Alphabet, layers: Vec<Morphism>, seed: Letter) -> Result<Self> {
        if seed.index() >= alphabet.len() {
            return Err(Error::Input("seed letter outside the alphabet".into()));
        }
        if layers.iter().any(|m| *m.alphabet() != alphabet) {
            return Err(Error::Input("spec layers use different alphabets".into()));
        }
        Ok(LayeredWordSpec { alphabet, layers, seed })
    }

    /// The word `t(seed)`.
    pub fn from_tower(t: &MorphismTower, seed: Letter) -> Result<Self> {
        LayeredWordSpec::new(t.alphabet().clone(), t.layers().to_vec(), seed)
    }

    /// The word `t^k(seed)`: the tower's layers unrolled `k` times.
    pub fn from_tower_power(t: &MorphismTower, k: usize, seed: Letter) -> Result<Self> {
        let mut layers = Vec::with_capacity(t.layers().len() * k);
        for _ in 0..k {
            layers.extend(t.layers().iter().cloned());
        }
        LayeredWordSpec::new(t.alphabet().clone(), layers, seed)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn layers(&self) -> &[Morphism] {
        &self.layers
    }

    /// The exact length of the denoted word, via incidence-matrix products.
    pub fn length(&self) -> BigUint {
        let n = self.alphabet.len();
        let mut row: Vec<BigUint> = vec![BigUint::from(1u32); n];
        for m in &self.layers {
            row = IncidenceMatrix::of_morphism(m).row_times(&row);
        }
        row[self.seed.index()].clone()
    }

    /// The first `min(l, length)` letters of the denoted word, by depth-first
    /// expansion with early exit. Memory stays proportional to the layer
    /// count times the largest image, never to the word length.
    pub fn stream_prefix(&self, l: usize) -> Word {
        let mut out = Word::empty();
        for letter in DfsStream::new(&self.layers, self.seed) {
            if out.len() == l {
                break;
            }
            out.push(letter);
        }
        out
    }
}

/// Depth-first letter stream of a layered word.
struct DfsStream<'a> {
    layers: &'a [Morphism],
    /// Pending nodes; a node `(c, lvl)` denotes the expansion of `c` through
    /// the first `lvl` layers, and `lvl == 0` is an output letter.
    stack: Vec<(Letter, usize)>,
}

impl<'a> DfsStream<'a> {
    fn new(layers: &'a [Morphism], seed: Letter) -> Self {
        DfsStream { layers, stack: vec![(seed, layers.len())] }
    }
}

impl Iterator for DfsStream<'_> {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        while let Some((c, lvl)) = self.stack.pop() {
            if lvl == 0 {
                return Some(c);
            }
            for &d in self.layers[lvl - 1].image(c).letters().iter().rev() {
                self.stack.push((d, lvl - 1));
            }
        }
        None
    }
}

/// Which side of the comparison is currently ahead.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    Even,
    LeftAhead,
    RightAhead,
}

/// The unmatched surplus between the two image streams: the letters the
/// ahead side has emitted beyond the matched region.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OverflowState {
    side: Side,
    tail: Word,
}

impl OverflowState {
    pub fn even() -> Self {
        OverflowState { side: Side::Even, tail: Word::empty() }
    }

    fn ahead(side: Side, tail: Word) -> Self {
        if tail.is_empty() {
            OverflowState::even()
        } else {
            OverflowState { side, tail }
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn tail(&self) -> &Word {
        &self.tail
    }
}

/// Outcome of a prefix-comparability check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Comparability {
    /// One word is a prefix of the other (including equality).
    Comparable,
    /// The words differ at `position` (0-based, within both).
    Mismatch { position: BigUint, left: Letter, right: Letter },
    /// The unmatched surplus outgrew the configured cap at `position`; raise
    /// the cap to get a verdict.
    CapExceeded { position: BigUint },
}

/// Counters describing a [`compare_images`] run.
#[derive(Clone, Default, Debug)]
pub struct CompareStats {
    pub memo_entries: usize,
    pub memo_hits: usize,
    pub leaves_processed: usize,
    pub max_tail_len: usize,
}

/// Tunables for the comparability engine.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Cap on the unmatched surplus length.
    pub overflow_cap: usize,
    /// Letter images of `f1`/`f2` no longer than this are materialized once
    /// and reused; longer ones are re-streamed lazily at every leaf.
    pub materialization_budget: usize,
    /// Disable to force full re-expansion of repeated subtrees (for testing).
    pub memoize: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            materialization_budget: crate::words::DEFAULT_MATERIALIZATION_BUDGET,
            memoize: true,
        }
    }
}

/// Are `u` and `v` prefix-comparable? If not, report the first mismatch.
pub fn comparable_words(u: &Word, v: &Word) -> Comparability {
    for (i, (a, b)) in u.letters().iter().zip(v.letters()).enumerate() {
        if a != b {
            return Comparability::Mismatch { position: BigUint::from(i), left: *a, right: *b };
        }
    }
    Comparability::Comparable
}

/// Decide whether `f1(W)` and `f2(W)` are prefix-comparable, `W` the word
/// denoted by `spec`, with the default configuration except for the given
/// overflow cap.
pub fn compare_images(
    spec: &LayeredWordSpec,
    f1: &MorphismTower,
    f2: &MorphismTower,
    cap: usize,
) -> Result<Comparability> {
    let cfg = EngineConfig { overflow_cap: cap, ..EngineConfig::default() };
    Ok(compare_images_configured(spec, f1, f2, &cfg)?.0)
}

/// [`compare_images`] with full configuration, also returning run statistics.
pub fn compare_images_configured(
    spec: &LayeredWordSpec,
    f1: &MorphismTower,
    f2: &MorphismTower,
    cfg: &EngineConfig,
) -> Result<(Comparability, CompareStats)> {
    if f1.alphabet() != spec.alphabet() || f2.alphabet() != spec.alphabet() {
        return Err(Error::Input(
            "comparability check requires one alphabet across the spec and both towers".into(),
        ));
    }
    let step = f1.max_layer_image_len().max(f2.max_layer_image_len());
    if cfg.overflow_cap < step {
        return Err(Error::Input(format!(
            "overflow cap {} is smaller than a single expansion step ({step})",
            cfg.overflow_cap
        )));
    }
    CompareRun::new(spec, f1, f2, cfg).run()
}

/// Result of pushing one leaf's image pair through the matcher.
enum LeafOutcome {
    Done(OverflowState),
    Mismatch { offset: usize, left: Letter, right: Letter },
    CapExceeded { offset: usize },
}

/// Feed the surplus-carrying matcher with the next image pair. `left` and
/// `right` are the letters of `f1(c)` and `f2(c)`; the carried tail is
/// matched first, then the fresh streams against each other, and whatever
/// remains unmatched becomes the next tail (subject to `cap`). The returned
/// mismatch offset counts aligned comparisons performed in this call.
fn match_streams(
    state: &OverflowState,
    mut left: impl Iterator<Item = Letter>,
    mut right: impl Iterator<Item = Letter>,
    cap: usize,
) -> LeafOutcome {
    let mut aligned = 0usize;
    let mut tail_iter = state.tail.letters().iter().copied();
    match state.side {
        Side::Even => {}
        Side::LeftAhead => {
            // The tail is earlier left-side output: match it against the
            // fresh right stream.
            for t in tail_iter.by_ref() {
                match right.next() {
                    Some(r) if t == r => aligned += 1,
                    Some(r) => return LeafOutcome::Mismatch { offset: aligned, left: t, right: r },
                    None => {
                        // Right is exhausted: everything left over stays on
                        // the left side's tail.
                        let rest = std::iter::once(t).chain(tail_iter).chain(left);
                        return match collect_capped(rest, cap) {
                            Some(tail) => {
                                LeafOutcome::Done(OverflowState::ahead(Side::LeftAhead, tail))
                            }
                            None => LeafOutcome::CapExceeded { offset: aligned },
                        };
                    }
                }
            }
        }
        Side::RightAhead => {
            for t in tail_iter.by_ref() {
                match left.next() {
                    Some(l) if l == t => aligned += 1,
                    Some(l) => return LeafOutcome::Mismatch { offset: aligned, left: l, right: t },
                    None => {
                        let rest = std::iter::once(t).chain(tail_iter).chain(right);
                        return match collect_capped(rest, cap) {
                            Some(tail) => {
                                LeafOutcome::Done(OverflowState::ahead(Side::RightAhead, tail))
                            }
                            None => LeafOutcome::CapExceeded { offset: aligned },
                        };
                    }
                }
            }
        }
    }
    // Tail fully matched; now the fresh streams run against each other.
    loop {
        match (left.next(), right.next()) {
            (Some(l), Some(r)) if l == r => aligned += 1,
            (Some(l), Some(r)) => {
                return LeafOutcome::Mismatch { offset: aligned, left: l, right: r }
            }
            (Some(l), None) => {
                let rest = std::iter::once(l).chain(left);
                return match collect_capped(rest, cap) {
                    Some(tail) => LeafOutcome::Done(OverflowState::ahead(Side::LeftAhead, tail)),
                    None => LeafOutcome::CapExceeded { offset: aligned },
                };
            }
            (None, Some(r)) => {
                let rest = std::iter::once(r).chain(right);
                return match collect_capped(rest, cap) {
                    Some(tail) => LeafOutcome::Done(OverflowState::ahead(Side::RightAhead, tail)),
                    None => LeafOutcome::CapExceeded { offset: aligned },
                };
            }
            (None, None) => return LeafOutcome::Done(OverflowState::even()),
        }
    }
}

/// Collect letters into a word, giving up (`None`) past `cap` letters.
fn collect_capped(items: impl Iterator<Item = Letter>, cap: usize) -> Option<Word> {
    let mut w = Word::empty();
    for l in items {
        if w.len() == cap {
            return None;
        }
        w.push(l);
    }
    Some(w)
}

enum Frame {
    /// Process the subtree of `letter` at `level` under the current state.
    Enter(Letter, usize),
    /// Record the completed subtree's transition in the memo table.
    Exit(Letter, usize, OverflowState),
}

struct CompareRun<'a> {
    spec: &'a LayeredWordSpec,
    f1: &'a MorphismTower,
    f2: &'a MorphismTower,
    cfg: &'a EngineConfig,
    /// Incidence matrices of the spec's layers, index-aligned with them.
    layer_matrices: Vec<IncidenceMatrix>,
    /// `rl[s][c] = |f1(E(c, s))|` where `E(c, s)` is the word generated by
    /// letter `c` through the first `s` layers; built on demand. `rr`
    /// likewise for `f2`.
    rl: Vec<Vec<BigUint>>,
    rr: Vec<Vec<BigUint>>,
    /// Per-letter materialized images of `f1`/`f2`; `None` = over budget,
    /// stream lazily instead.
    left_images: Vec<Option<Word>>,
    right_images: Vec<Option<Word>>,
    /// Letters emitted so far by the left and right streams.
    emitted_left: BigUint,
    emitted_right: BigUint,
    memo: HashMap<(u8, usize, OverflowState), OverflowState>,
    stats: CompareStats,
}

impl<'a> CompareRun<'a> {
    fn new(
        spec: &'a LayeredWordSpec,
        f1: &'a MorphismTower,
        f2: &'a MorphismTower,
        cfg: &'a EngineConfig,
    ) -> Self {
        let layer_matrices: Vec<IncidenceMatrix> =
            spec.layers().iter().map(IncidenceMatrix::of_morphism).collect();
        let rl0 = IncidenceMatrix::of_tower(f1).column_sums();
        let rr0 = IncidenceMatrix::of_tower(f2).column_sums();
        let budget = BigUint::from(cfg.materialization_budget);
        let mut left_images = Vec::with_capacity(spec.alphabet().len());
        let mut right_images = Vec::with_capacity(spec.alphabet().len());
        for c in spec.alphabet().letters() {
            left_images.push(materialize_image(f1, c, &rl0[c.index()], &budget));
            right_images.push(materialize_image(f2, c, &rr0[c.index()], &budget));
        }
        CompareRun {
            spec,
            f1,
            f2,
            cfg,
            layer_matrices,
            rl: vec![rl0],
            rr: vec![rr0],
            left_images,
            right_images,
            emitted_left: BigUint::zero(),
            emitted_right: BigUint::zero(),
            memo: HashMap::new(),
            stats: CompareStats::default(),
        }
    }

    /// Extend the per-level image-length rows up to level `s`.
    fn ensure_rows(&mut self, s: usize) {
        while self.rl.len() <= s {
            let t = self.rl.len();
            let m = &self.layer_matrices[t - 1];
            let next_l = m.row_times(&self.rl[t - 1]);
            let next_r = m.row_times(&self.rr[t - 1]);
            self.rl.push(next_l);
            self.rr.push(next_r);
        }
    }

    /// Aligned-comparison count so far: the shorter side's emission total.
    fn matched(&self) -> BigUint {
        self.emitted_left.clone().min(self.emitted_right.clone())
    }

    fn run(mut self) -> Result<(Comparability, CompareStats)> {
        let mut state = OverflowState::even();
        let mut stack = vec![Frame::Enter(self.spec.seed(), self.spec.layers().len())];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Enter(c, s) => {
                    if self.cfg.memoize {
                        if let Some(out) = self.memo.get(&(c.0, s, state.clone())) {
                            let out = out.clone();
                            self.stats.memo_hits += 1;
                            self.ensure_rows(s);
                            self.emitted_left += &self.rl[s][c.index()];
                            self.emitted_right += &self.rr[s][c.index()];
                            state = out;
                            continue;
                        }
                    }
                    if s == 0 {
                        let state_in = state.clone();
                        let outcome = {
                            let li = self.left_leaf_stream(c);
                            let ri = self.right_leaf_stream(c);
                            match_streams(&state_in, li, ri, self.cfg.overflow_cap)
                        };
                        self.stats.leaves_processed += 1;
                        match outcome {
                            LeafOutcome::Done(next) => {
                                self.stats.max_tail_len =
                                    self.stats.max_tail_len.max(next.tail.len());
                                self.emitted_left += &self.rl[0][c.index()];
                                self.emitted_right += &self.rr[0][c.index()];
                                if self.cfg.memoize {
                                    self.memo.insert((c.0, 0, state_in), next.clone());
                                }
                                state = next;
                            }
                            LeafOutcome::Mismatch { offset, left, right } => {
                                let position = self.matched() + BigUint::from(offset);
                                self.stats.memo_entries = self.memo.len();
                                return Ok((
                                    Comparability::Mismatch { position, left, right },
                                    self.stats,
                                ));
                            }
                            LeafOutcome::CapExceeded { offset } => {
                                let position = self.matched() + BigUint::from(offset);
                                self.stats.memo_entries = self.memo.len();
                                return Ok((Comparability::CapExceeded { position }, self.stats));
                            }
                        }
                    } else {
                        if self.cfg.memoize {
                            stack.push(Frame::Exit(c, s, state.clone()));
                        }
                        for &d in self.spec.layers()[s - 1].image(c).letters().iter().rev() {
                            stack.push(Frame::Enter(d, s - 1));
                        }
                    }
                }
                Frame::Exit(c, s, state_in) => {
                    self.memo.insert((c.0, s, state_in), state.clone());
                }
            }
        }
        self.stats.memo_entries = self.memo.len();
        Ok((Comparability::Comparable, self.stats))
    }

    fn left_leaf_stream(&self, c: Letter) -> Box<dyn Iterator<Item = Letter> + '_> {
        match &self.left_images[c.index()] {
            Some(w) => Box::new(w.letters().iter().copied()),
            None => Box::new(DfsStream::new(self.f1.layers(), c)),
        }
    }

    fn right_leaf_stream(&self, c: Letter) -> Box<dyn Iterator<Item = Letter> + '_> {
        match &self.right_images[c.index()] {
            Some(w) => Box::new(w.letters().iter().copied()),
            None => Box::new(DfsStream::new(self.f2.layers(), c)),
        }
    }
}

/// Materialize `t(c)` when its (exactly known) length fits the budget.
fn materialize_image(
    t: &MorphismTower,
    c: Letter,
    length: &BigUint,
    budget: &BigUint,
) -> Option<Word> {
    if length > budget {
        return None;
    }
    let mut w = Word::empty();
    for l in DfsStream::new(t.layers(), c) {
        w.push(l);
    }
    Some(w)
}
