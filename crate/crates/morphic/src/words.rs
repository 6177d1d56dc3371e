//! Alphabets, finite words, morphisms and composition towers.
//!
//! A [`Morphism`] maps every letter of its alphabet to a finite word over the
//! same alphabet and extends to words by concatenation. A [`MorphismTower`]
//! denotes a composition of morphisms without materializing the composite's
//! letter images, which can be enormous; the tower `[g, h]` denotes the map
//! `w ↦ g(h(w))`, i.e. the *last* layer is applied first.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix;

/// Default cap on the number of symbols a tower application may materialize.
pub const DEFAULT_MATERIALIZATION_BUDGET: usize = 1_000_000;

/// A letter, stored as an index into its [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Letter({})", self.0)
    }
}

/// An ordered alphabet of pairwise distinct symbols.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    symbols: Arc<Vec<char>>,
}

impl Alphabet {
    /// Build an alphabet from its symbols, in order.
    pub fn new<I: IntoIterator<Item = char>>(symbols: I) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Input("alphabet must contain at least one symbol".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::Input(format!(
                "alphabet has {} symbols, at most {} are supported",
                symbols.len(),
                u8::MAX
            )));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::Input(format!("duplicate alphabet symbol '{c}'")));
            }
        }
        Ok(Alphabet { symbols: Arc::new(symbols) })
    }

    /// Number of letters `n`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one symbol
    }

    /// All letters in alphabet order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len() as u8).map(Letter)
    }

    /// The printable symbol of a letter.
    pub fn symbol(&self, l: Letter) -> char {
        self.symbols[l.index()]
    }

    /// Look up the letter for a symbol.
    pub fn letter_of(&self, c: char) -> Option<Letter> {
        self.symbols.iter().position(|&s| s == c).map(|i| Letter(i as u8))
    }

    /// Parse a word given as a string of symbols.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut letters = Vec::with_capacity(s.chars().count());
        for c in s.chars() {
            match self.letter_of(c) {
                Some(l) => letters.push(l),
                None => return Err(Error::Input(format!("symbol '{c}' is not in the alphabet"))),
            }
        }
        Ok(Word(letters))
    }

    /// Render a word as a string of symbols.
    pub fn format_word(&self, w: &Word) -> String {
        w.letters().iter().map(|&l| self.symbol(l)).collect()
    }
}

/// A finite word: a sequence of letters of one alphabet.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// True if `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// A morphism: a total map from letters to words over one alphabet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    alphabet: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    /// Build a morphism from one image per letter, in alphabet order.
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::Input(format!(
                "expected {} images, got {}",
                alphabet.len(),
                images.len()
            )));
        }
        let n = alphabet.len();
        for (i, img) in images.iter().enumerate() {
            for &l in img.letters() {
                if l.index() >= n {
                    return Err(Error::Input(format!(
                        "image of '{}' uses a letter outside the alphabet",
                        alphabet.symbol(Letter(i as u8))
                    )));
                }
            }
        }
        Ok(Morphism { alphabet, images })
    }

    /// Build a morphism from `(symbol, image)` string rules over a given alphabet.
    pub fn from_rules(alphabet: &Alphabet, rules: &[(char, &str)]) -> Result<Self> {
        if rules.len() != alphabet.len() {
            return Err(Error::Input(format!(
                "expected {} rules, got {}",
                alphabet.len(),
                rules.len()
            )));
        }
        let mut images = vec![None; alphabet.len()];
        for &(sym, image) in rules {
            let l = alphabet
                .letter_of(sym)
                .ok_or_else(|| Error::Input(format!("rule symbol '{sym}' is not in the alphabet")))?;
            if images[l.index()].is_some() {
                return Err(Error::Input(format!("duplicate rule for symbol '{sym}'")));
            }
            images[l.index()] = Some(alphabet.parse_word(image)?);
        }
        let images = images.into_iter().map(|w| w.unwrap()).collect();
        Morphism::new(alphabet.clone(), images)
    }

    /// Parse the plain-text rule format, one rule per line: `a -> ab`.
    ///
    /// The alphabet is the ordered set of left-hand sides. Empty lines and
    /// lines starting with `#` are ignored. An empty right-hand side denotes
    /// the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols: Vec<char> = Vec::new();
        let mut rhs: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, image) = line.split_once("->").ok_or_else(|| {
                Error::Input(format!("line {}: expected `symbol -> image`", lineno + 1))
            })?;
            let lhs = lhs.trim();
            let mut lhs_chars = lhs.chars();
            let sym = match (lhs_chars.next(), lhs_chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Input(format!(
                        "line {}: left-hand side must be a single symbol, got '{lhs}'",
                        lineno + 1
                    )))
                }
            };
            if symbols.contains(&sym) {
                return Err(Error::Input(format!(
                    "line {}: duplicate rule for symbol '{sym}'",
                    lineno + 1
                )));
            }
            symbols.push(sym);
            rhs.push(image.trim().to_string());
        }
        let alphabet = Alphabet::new(symbols.clone())?;
        let mut images = Vec::with_capacity(rhs.len());
        for (sym, image) in symbols.iter().zip(&rhs) {
            images.push(alphabet.parse_word(image).map_err(|e| {
                Error::Input(format!("in the image of '{sym}': {e}"))
            })?);
        }
        Morphism::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The image of a single letter.
    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l.index()]
    }

    /// Largest image length over all letters.
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// True if every letter has a nonempty image.
    pub fn is_nonerasing(&self) -> bool {
        self.images.iter().all(|w| !w.is_empty())
    }

    /// Apply the morphism to a word: concatenate the images of its letters.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        let n = self.alphabet.len();
        let mut total = 0usize;
        for &l in w.letters() {
            if l.index() >= n {
                return Err(Error::Input(
                    "word contains a letter outside the morphism's alphabet".into(),
                ));
            }
            total += self.images[l.index()].len();
        }
        let mut out = Vec::with_capacity(total);
        for &l in w.letters() {
            out.extend_from_slice(self.images[l.index()].letters());
        }
        Ok(Word(out))
    }

    /// The composite morphism `self ∘ other`, i.e. `c ↦ self(other(c))`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if self.alphabet != other.alphabet {
            return Err(Error::Input("cannot compose morphisms over different alphabets".into()));
        }
        let mut images = Vec::with_capacity(self.alphabet.len());
        for l in self.alphabet.letters() {
            images.push(self.apply(other.image(l))?);
        }
        Morphism::new(self.alphabet.clone(), images)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.alphabet.letters() {
            writeln!(
                f,
                "{} -> {}",
                self.alphabet.symbol(l),
                self.alphabet.format_word(self.image(l))
            )?;
        }
        Ok(())
    }
}

/// A composition of morphisms, applied right to left.
///
/// The tower `[g, h]` denotes `w ↦ g(h(w))`: `h`, the last layer, is applied
/// to the argument first. This is ordinary function-composition order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MorphismTower {
    layers: Vec<Morphism>,
}

impl MorphismTower {
    /// Build a tower from its layers. All layers must share one alphabet and
    /// there must be at least one layer.
    pub fn new(layers: Vec<Morphism>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::Input("a morphism tower needs at least one layer".into()))?;
        let alphabet = first.alphabet().clone();
        if layers.iter().any(|m| *m.alphabet() != alphabet) {
            return Err(Error::Input("tower layers use different alphabets".into()));
        }
        Ok(MorphismTower { layers })
    }

    pub fn single(m: Morphism) -> Self {
        MorphismTower { layers: vec![m] }
    }

    /// The tower consisting of `k` copies of `m` (requires `k >= 1`).
    pub fn power(m: &Morphism, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("a morphism tower needs at least one layer".into()));
        }
        Ok(MorphismTower { layers: vec![m.clone(); k] })
    }

    /// Concatenate two towers: `self` is applied after `other`.
    pub fn then_after(&self, other: &MorphismTower) -> Result<Self> {
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        MorphismTower::new(layers)
    }

    pub fn layers(&self) -> &[Morphism] {
        &self.layers
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.layers[0].alphabet()
    }

    /// Largest single-layer image length over all layers.
    pub fn max_layer_image_len(&self) -> usize {
        self.layers.iter().map(|m| m.max_image_len()).max().unwrap_or(0)
    }

    /// Apply the tower to a word, materializing the result.
    ///
    /// Every intermediate word is size-checked against `budget` (predicted
    /// exactly from incidence matrices) before anything is materialized.
    pub fn apply(&self, w: &Word, budget: usize) -> Result<Word> {
        let n = self.alphabet().len();
        for &l in w.letters() {
            if l.index() >= n {
                return Err(Error::Input(
                    "word contains a letter outside the tower's alphabet".into(),
                ));
            }
        }
        // Predict each intermediate length exactly before materializing.
        let p = matrix::parikh(w, n);
        let mut v = p;
        for m in self.layers.iter().rev() {
            v = matrix::IncidenceMatrix::of_morphism(m).times_col(&v);
            let len: num_bigint::BigUint = v.iter().sum();
            if len > num_bigint::BigUint::from(budget) {
                return Err(Error::ResourceLimit(format!(
                    "tower application would materialize {len} symbols (budget {budget})"
                )));
            }
        }
        let mut cur = w.clone();
        for m in self.layers.iter().rev() {
            cur = m.apply(&cur)?;
        }
        Ok(cur)
    }
}
