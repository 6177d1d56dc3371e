//! Deterministic corpus generators shared by the integration suites.
//!
//! Every generator takes an explicit ChaCha RNG so a failing case can be
//! reproduced from the seed alone.

#![allow(dead_code)]

use morphic::analysis;
use morphic::engine::LayeredWordSpec;
use morphic::words::{Alphabet, Letter, Morphism, MorphismTower, Word};
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Alphabet {
    Alphabet::new("abcdefgh".chars().take(n)).unwrap()
}

pub fn fibonacci() -> Morphism {
    Morphism::parse("a -> ab\nb -> a").unwrap()
}

pub fn fibonacci_square() -> Morphism {
    let phi = fibonacci();
    phi.compose(&phi).unwrap()
}

pub fn thue_morse() -> Morphism {
    Morphism::parse("a -> ab\nb -> ba").unwrap()
}

/// The period-doubling morphism `a -> ab, b -> aa`.
pub fn doubling() -> Morphism {
    Morphism::parse("a -> ab\nb -> aa").unwrap()
}

pub fn letter(m: &Morphism, c: char) -> Letter {
    m.alphabet().letter_of(c).unwrap()
}

/// A uniformly random nonerasing morphism with image lengths in `1..=max_len`.
pub fn random_morphism(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_len: usize) -> Morphism {
    let n = alphabet.len();
    let images = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            Word::from_letters((0..len).map(|_| Letter(rng.gen_range(0..n) as u8)).collect())
        })
        .collect();
    Morphism::new(alphabet.clone(), images).unwrap()
}

/// Rejection-samples until the incidence matrix is primitive.
pub fn random_primitive_morphism(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_len: usize,
) -> Morphism {
    loop {
        let m = random_morphism(rng, alphabet, max_len);
        if analysis::is_primitive(&m) {
            return m;
        }
    }
}

/// Rejection-samples until every letter's iterated image length is unbounded.
pub fn random_growing_morphism(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_len: usize,
) -> Morphism {
    loop {
        let m = random_morphism(rng, alphabet, max_len);
        if analysis::is_growing(&m).unwrap() {
            return m;
        }
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let n = alphabet.len();
    Word::from_letters((0..len).map(|_| Letter(rng.gen_range(0..n) as u8)).collect())
}

pub fn random_tower(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_layers: usize,
    max_len: usize,
) -> MorphismTower {
    let k = rng.gen_range(1..=max_layers);
    MorphismTower::new((0..k).map(|_| random_morphism(rng, alphabet, max_len)).collect()).unwrap()
}

/// The first letter from which both morphisms generate an infinite word.
pub fn omega_seed(g: &Morphism, h: &Morphism) -> Option<Letter> {
    g.alphabet()
        .letters()
        .find(|&x| analysis::omega_exists(g, x) && analysis::omega_exists(h, x))
}

/// A random primitive pair sharing a seed from which both words exist.
pub fn random_primitive_pair(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_len: usize,
) -> (Morphism, Morphism, Letter) {
    loop {
        let g = random_primitive_morphism(rng, alphabet, max_len);
        let h = random_primitive_morphism(rng, alphabet, max_len);
        if let Some(x) = omega_seed(&g, &h) {
            return (g, h, x);
        }
    }
}

/// A random layered spec whose denoted word has at most `len_cap` letters.
pub fn random_small_spec(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_layers: usize,
    max_len: usize,
    len_cap: usize,
) -> LayeredWordSpec {
    loop {
        let k = rng.gen_range(1..=max_layers);
        let layers: Vec<Morphism> =
            (0..k).map(|_| random_morphism(rng, alphabet, max_len)).collect();
        let seed = Letter(rng.gen_range(0..alphabet.len()) as u8);
        let spec = LayeredWordSpec::new(alphabet.clone(), layers, seed).unwrap();
        if spec.length().to_usize().is_some_and(|l| l <= len_cap) {
            return spec;
        }
    }
}

/// Materializes the first `l` letters of `m`'s infinite word from `x`.
pub fn orbit_word(m: &Morphism, x: Letter, l: usize) -> Word {
    let mut w = Word::from_letters(vec![x]);
    while w.len() < l {
        w = m.apply(&w).unwrap();
    }
    Word::from_letters(w.letters()[..l].to_vec())
}
