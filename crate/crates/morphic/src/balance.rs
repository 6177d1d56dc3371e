//! The balance test: is `sup |  |first(w)| − |second(w)|  |` finite over the
//! iterates `w = first^k(x)`?
//!
//! Writing `δᵀ` for the difference of the two towers' image-length rows and
//! `M` for the incidence matrix of the iterated tower, the quantity in
//! question is `BAL = sup |δᵀ M^k e_j|` over letters `j` and `k ≥ 0`. Each
//! sequence `u_k = δᵀ M^k e_j` is an integer linear-recurrent sequence, and
//! it is bounded exactly when it is eventually periodic — equivalently, when
//! its minimal annihilator is `z^s · Q` with `Q` dividing `1 − z^p` for some
//! `p`, i.e. `Q` a product of distinct cyclotomic polynomials.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::numeric::{
    certified_ceil, certified_exp, certified_floor, certified_ln, certified_sqrt, Interval,
};
use crate::poly::{CyclotomicTable, IntPolynomial};
use crate::words::{Alphabet, Letter, MorphismTower};

/// A balance-test instance: the iterated tower (`first`), the compared tower
/// (`second`), their length difference `δ` and the incidence matrix of
/// `first`, all with exact integer entries.
#[derive(Clone, Debug)]
pub struct BalanceInstance {
    alphabet: Alphabet,
    delta: Vec<BigInt>,
    matrix: Vec<BigInt>, // n×n incidence matrix of `first`, row-major
}

/// Per-letter outcome of the balance analysis.
#[derive(Clone, Debug)]
pub struct LetterBalanceReport {
    pub letter: Letter,
    /// Minimal annihilator of the letter's length-difference sequence
    /// (primitive integer coefficients, positive leading coefficient).
    pub annihilator: IntPolynomial,
    /// Multiplicity of the root 0 (the transient part `z^s`).
    pub transient_degree: usize,
    /// The annihilator with the transient stripped.
    pub persistent: IntPolynomial,
    /// The least `p` with `persistent` dividing `1 − z^p`, if one exists;
    /// `None` means the sequence is unbounded.
    pub unity_period: Option<BigUint>,
}

impl BalanceInstance {
    pub fn new(first: &MorphismTower, second: &MorphismTower) -> Result<Self> {
        if first.alphabet() != second.alphabet() {
            return Err(Error::Input(
                "balance test requires towers over one alphabet".into(),
            ));
        }
        let alphabet = first.alphabet().clone();
        let m_first = IncidenceMatrix::of_tower(first);
        let m_second = IncidenceMatrix::of_tower(second);
        let len_first = m_first.column_sums();
        let len_second = m_second.column_sums();
        let delta = len_first
            .iter()
            .zip(&len_second)
            .map(|(a, b)| BigInt::from(a.clone()) - BigInt::from(b.clone()))
            .collect();
        let n = alphabet.len();
        let mut matrix = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                matrix.push(BigInt::from(m_first.get(i, j).clone()));
            }
        }
        Ok(BalanceInstance { alphabet, delta, matrix })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn delta(&self) -> &[BigInt] {
        &self.delta
    }

    fn row_times_matrix(&self, row: &[BigInt]) -> Vec<BigInt> {
        let n = self.alphabet.len();
        let mut out = vec![BigInt::zero(); n];
        for j in 0..n {
            for (i, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    out[j] += r * &self.matrix[i * n + j];
                }
            }
        }
        out
    }

    /// The rows `δᵀ M^k` for `k = 0, …, count − 1`.
    pub fn delta_rows(&self, count: usize) -> Vec<Vec<BigInt>> {
        let mut rows = Vec::with_capacity(count);
        let mut row = self.delta.clone();
        for _ in 0..count {
            let next = self.row_times_matrix(&row);
            rows.push(row);
            row = next;
        }
        rows
    }

    /// The sequence `u_k = δᵀ M^k e_j` for `k = 0, …, count − 1`.
    pub fn sequence_terms(&self, j: Letter, count: usize) -> Vec<BigInt> {
        self.delta_rows(count)
            .into_iter()
            .map(|row| row[j.index()].clone())
            .collect()
    }

    /// The minimal monic polynomial annihilating `u_k = δᵀ M^k e_j` under the
    /// shift, returned with primitive integer coefficients and positive
    /// leading coefficient. The zero sequence yields the constant 1.
    ///
    /// The characteristic polynomial of `M` (degree `n`) annihilates every
    /// such sequence, so the minimal annihilator has degree at most `n` and
    /// is determined by the first `2n + 1` terms: a candidate annihilates the
    /// whole sequence iff it annihilates the first `n` windows, because the
    /// windowed combination is itself a solution of the degree-`n` recurrence
    /// and vanishes once its first `n` terms do.
    pub fn minimal_annihilator(&self, j: Letter) -> IntPolynomial {
        let n = self.alphabet.len();
        let terms = self.sequence_terms(j, 2 * n + 1);
        if terms.iter().all(|t| t.is_zero()) {
            return IntPolynomial::one();
        }
        for d in 1..=n {
            // Ask for monic degree-d: u_{k+d} + Σ c_i u_{k+i} = 0 for every
            // window k = 0, …, 2n−d.
            let windows = 2 * n - d + 1;
            let mut aug = Vec::with_capacity(windows);
            for k in 0..windows {
                let mut row: Vec<BigRational> = (0..d)
                    .map(|i| BigRational::from_integer(terms[k + i].clone()))
                    .collect();
                row.push(BigRational::from_integer(-terms[k + d].clone()));
                aug.push(row);
            }
            if let Some(solution) = solve_linear_system(aug, d) {
                return clear_denominators(&solution);
            }
        }
        unreachable!("the characteristic polynomial annihilates the sequence at degree n");
    }

    /// Full per-letter balance analysis.
    pub fn letter_report(&self, j: Letter) -> LetterBalanceReport {
        let annihilator = self.minimal_annihilator(j);
        let (transient_degree, rest) = annihilator.strip_z_power();
        let persistent = rest.primitive_part();
        let unity_period = distinct_cyclotomic_period(&persistent);
        LetterBalanceReport { letter: j, annihilator, transient_degree, persistent, unity_period }
    }

    /// True iff `BAL(first, second)` is finite: every letter's
    /// length-difference sequence is eventually periodic.
    pub fn bal_finite(&self) -> bool {
        self.alphabet
            .letters()
            .all(|j| self.letter_report(j).unity_period.is_some())
    }
}

/// Solve a rational linear system given as augmented rows (`unknowns`
/// coefficient columns plus a right-hand side). Returns any solution if the
/// system is consistent, with free variables set to zero.
fn solve_linear_system(
    mut aug: Vec<Vec<BigRational>>,
    unknowns: usize,
) -> Option<Vec<BigRational>> {
    let rows = aug.len();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; unknowns];
    let mut next_row = 0usize;
    for col in 0..unknowns {
        if next_row == rows {
            break;
        }
        let Some(p) = (next_row..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(next_row, p);
        let inv = aug[next_row][col].clone();
        for entry in aug[next_row][col..].iter_mut() {
            let scaled = &*entry / &inv;
            *entry = scaled;
        }
        for r in 0..rows {
            if r != next_row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=unknowns {
                    let updated = &aug[r][c] - &factor * &aug[next_row][c];
                    aug[r][c] = updated;
                }
            }
        }
        pivot_row_of_col[col] = Some(next_row);
        next_row += 1;
    }
    // Inconsistent iff some row reads 0 = nonzero.
    for row in &aug {
        if row[..unknowns].iter().all(|e| e.is_zero()) && !row[unknowns].is_zero() {
            return None;
        }
    }
    let mut solution = vec![BigRational::zero(); unknowns];
    for col in 0..unknowns {
        if let Some(r) = pivot_row_of_col[col] {
            solution[col] = aug[r][unknowns].clone();
        }
    }
    Some(solution)
}

/// Turn a monic rational polynomial (low coefficients given, leading 1
/// implicit) into a primitive integer polynomial.
fn clear_denominators(low_coeffs: &[BigRational]) -> IntPolynomial {
    let mut lcm = BigInt::one();
    for c in low_coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let mut coeffs: Vec<BigInt> = low_coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    coeffs.push(lcm);
    IntPolynomial::new(coeffs).primitive_part()
}

/// If `q` is a product of distinct cyclotomic polynomials, return the least
/// `p` with `q | 1 − z^p` (the lcm of the cyclotomic indices); otherwise
/// `None`. The constant 1 yields `p = 1`.
fn distinct_cyclotomic_period(q: &IntPolynomial) -> Option<BigUint> {
    if q.is_zero() {
        return None;
    }
    if q.is_one() {
        return Some(BigUint::one());
    }
    // A product of distinct cyclotomics has constant term ±1.
    if !q.coeff(0).abs().is_one() {
        return None;
    }
    let deg = q.degree().unwrap_or(0);
    // φ(d) ≥ sqrt(d/2), so any cyclotomic factor has index at most 2·deg².
    let d_max = 2 * deg * deg + 2;
    let mut table = CyclotomicTable::new();
    let mut rest = q.clone();
    let mut period = BigUint::one();
    for d in 1..=d_max {
        if rest.is_one() {
            break;
        }
        let phi = table.get(d);
        if phi.degree() > rest.degree() {
            continue;
        }
        if let Some(quot) = rest.div_exact(&phi) {
            // A repeated cyclotomic factor makes the sequence grow
            // polynomially, so only distinct factors qualify.
            if quot.div_exact(&phi).is_some() {
                return None;
            }
            rest = quot;
            period = period.lcm(&BigUint::from(d));
        }
    }
    if rest.is_one() {
        Some(period)
    } else {
        None
    }
}

/// Exact divisibility test: does `p` divide `1 − z^power` (up to content)?
pub fn divides_one_minus_zp(p: &IntPolynomial, power: usize) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::Input("the zero polynomial divides nothing".into()));
    }
    if power == 0 {
        return Err(Error::Input("the exponent must be positive".into()));
    }
    Ok(IntPolynomial::one_minus_z_to(power)
        .div_exact(&p.primitive_part())
        .is_some())
}

/// `⌊exp(√(6 n ln n))⌋`: the certified upper bound on the least period `p`
/// that a bounded length-difference sequence over `n` letters can require.
pub fn unity_order_bound(n: usize) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the period bound requires an alphabet of at least 2 letters, got {n}"
        )));
    }
    let six_n = BigRational::from_integer(BigInt::from(6 * n as u64));
    certified_floor(96, move |prec| {
        let ln_n = certified_ln(&Interval::from_integer(n as i64), prec)?;
        let radicand = ln_n.scale(&six_n);
        let root = certified_sqrt(&radicand, prec)?;
        certified_exp(&root, prec)
    })
}

/// `⌈M^{2n−1} · exp(n²(1 + √(6 n ln n)))⌉`: the certified theoretical cap on
/// a finite `BAL` value, for an alphabet of `n` letters and maximum image
/// length `M`. Used in diagnostics only.
pub fn bal_upper_bound(n: usize, m: usize) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the balance bound requires an alphabet of at least 2 letters, got {n}"
        )));
    }
    if m < 1 {
        return Err(Error::Precondition(
            "the balance bound requires a maximum image length of at least 1".into(),
        ));
    }
    // Seed the precision from a rough size estimate so the certification loop
    // usually succeeds on its first try.
    let nf = n as f64;
    let exp_arg = nf * nf * (1.0 + (6.0 * nf * nf.ln()).sqrt());
    let m_bits = (2 * n - 1) as f64 * (m as f64).log2();
    let hint = (exp_arg / std::f64::consts::LN_2 + m_bits + 64.0).min(1e9) as u32;
    let m_power = BigRational::from_integer(num_traits::pow(BigInt::from(m), 2 * n - 1));
    let n_sq = BigRational::from_integer(BigInt::from((n * n) as u64));
    let six_n = BigRational::from_integer(BigInt::from(6 * n as u64));
    certified_ceil(hint, move |prec| {
        let ln_n = certified_ln(&Interval::from_integer(n as i64), prec)?;
        let root = certified_sqrt(&ln_n.scale(&six_n), prec)?;
        let arg = root
            .add(&Interval::from_integer(1))
            .scale(&n_sq);
        Ok(certified_exp(&arg, prec)?.scale(&m_power))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Morphism;

    fn fib_instance() -> BalanceInstance {
        let phi = Morphism::parse("a -> ab\nb -> a").unwrap();
        let first = MorphismTower::single(phi.clone());
        let second = MorphismTower::power(&phi, 2).unwrap();
        BalanceInstance::new(&first, &second).unwrap()
    }

    fn int_poly(coeffs: &[i64]) -> IntPolynomial {
        IntPolynomial::from(coeffs)
    }

    #[test]
    fn identical_towers_have_trivial_annihilator() {
        let g = Morphism::parse("a -> ab\nb -> ba").unwrap();
        let t = MorphismTower::single(g.clone());
        let inst = BalanceInstance::new(&t, &t).unwrap();
        for j in inst.alphabet().letters() {
            assert!(inst.minimal_annihilator(j).is_one());
        }
        assert!(inst.bal_finite());
    }

    #[test]
    fn fibonacci_vs_its_square_has_golden_annihilator() {
        let inst = fib_instance();
        let a = inst.alphabet().letter_of('a').unwrap();
        let terms = inst.sequence_terms(a, 6);
        let expect: Vec<BigInt> = [-1, -2, -3, -5, -8, -13].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(terms, expect);
        assert_eq!(inst.minimal_annihilator(a), int_poly(&[-1, -1, 1]));
    }

    #[test]
    fn fibonacci_vs_its_square_is_unbalanced() {
        assert!(!fib_instance().bal_finite());
    }

    #[test]
    fn transient_difference_gives_power_of_z() {
        // δ = (1, −1) and the iterated tower is Thue–Morse, whose matrix has
        // equal columns, so δᵀMᵏ vanishes for every k ≥ 1.
        let g = Morphism::parse("a -> ab\nb -> ba").unwrap();
        let h = Morphism::parse("a -> a\nb -> bab").unwrap();
        let inst =
            BalanceInstance::new(&MorphismTower::single(g), &MorphismTower::single(h)).unwrap();
        let a = inst.alphabet().letter_of('a').unwrap();
        assert_eq!(inst.minimal_annihilator(a), int_poly(&[0, 1]));
        let report = inst.letter_report(a);
        assert_eq!(report.transient_degree, 1);
        assert!(report.persistent.is_one());
        assert_eq!(report.unity_period, Some(BigUint::one()));
        assert!(inst.bal_finite());
    }

    #[test]
    fn divides_examples() {
        assert!(divides_one_minus_zp(&int_poly(&[1, -1]), 3).unwrap());
        assert!(divides_one_minus_zp(&int_poly(&[1, 1]), 2).unwrap());
        for p in 1..=20 {
            assert!(!divides_one_minus_zp(&int_poly(&[-1, -1, 1]), p).unwrap());
        }
        assert!(divides_one_minus_zp(&IntPolynomial::zero(), 2).is_err());
    }

    #[test]
    fn stripping_transients_matches_unstripped_division() {
        // z^s·Q divides z^s·(1 − z^p) exactly when Q divides 1 − z^p.
        for q_coeffs in [&[1i64, -1][..], &[1, 1][..]] {
            let q = IntPolynomial::from(q_coeffs);
            for s in 0..4usize {
                let mut coeffs = vec![0i64; s];
                coeffs.extend_from_slice(q_coeffs);
                let shifted = IntPolynomial::from(coeffs.as_slice());
                for p in 1..=6usize {
                    let direct = divides_one_minus_zp(&q, p).unwrap();
                    let via_shift = IntPolynomial::monomial(BigInt::one(), s)
                        .mul(&IntPolynomial::one_minus_z_to(p))
                        .div_exact(&shifted)
                        .is_some();
                    assert_eq!(direct, via_shift, "q = {q}, s = {s}, p = {p}");
                }
            }
        }
    }

    #[test]
    fn unity_order_bound_small_values() {
        let expect: [(usize, i64); 9] = [
            (2, 17),
            (3, 85),
            (4, 319),
            (5, 1041),
            (6, 3076),
            (7, 8436),
            (8, 21821),
            (9, 53780),
            (10, 127253),
        ];
        for (n, v) in expect {
            assert_eq!(unity_order_bound(n).unwrap(), BigInt::from(v), "n = {n}");
        }
    }

    #[test]
    fn unity_order_bound_is_monotone() {
        let mut prev = unity_order_bound(2).unwrap();
        for n in 3..=10 {
            let cur = unity_order_bound(n).unwrap();
            assert!(cur > prev, "n = {n}");
            prev = cur;
        }
    }

    #[test]
    fn unity_order_bound_rejects_tiny_alphabets() {
        assert!(unity_order_bound(1).is_err());
    }

    #[test]
    fn bal_upper_bound_reference_values() {
        assert_eq!(bal_upper_bound(2, 1).unwrap(), BigInt::from(5_588_465u64));
        assert_eq!(bal_upper_bound(2, 2).unwrap(), BigInt::from(44_707_715u64));
        assert_eq!(
            bal_upper_bound(3, 1).unwrap(),
            "1950168630561689298591".parse::<BigInt>().unwrap()
        );
    }

    #[test]
    fn bal_upper_bound_is_monotone_in_max_image_length() {
        let mut prev = bal_upper_bound(2, 1).unwrap();
        for m in 2..=5 {
            let cur = bal_upper_bound(2, m).unwrap();
            assert!(cur > prev, "m = {m}");
            prev = cur;
        }
    }

    #[test]
    fn cyclotomic_products_are_recognized() {
        // (z − 1)(z + 1)(z² + z + 1) divides 1 − z^6 and nothing smaller than 6.
        let q = int_poly(&[-1, 1]).mul(&int_poly(&[1, 1])).mul(&int_poly(&[1, 1, 1]));
        assert_eq!(distinct_cyclotomic_period(&q), Some(BigUint::from(6u32)));
        // A repeated factor is rejected.
        let sq = int_poly(&[-1, 1]).mul(&int_poly(&[-1, 1]));
        assert_eq!(distinct_cyclotomic_period(&sq), None);
        // A non-cyclotomic factor is rejected.
        assert_eq!(distinct_cyclotomic_period(&int_poly(&[-1, -1, 1])), None);
    }

    #[test]
    fn declared_periods_verify_by_division() {
        let q = int_poly(&[-1, 1]).mul(&int_poly(&[1, 0, 1])); // (z−1)(z²+1)
        let p = distinct_cyclotomic_period(&q).unwrap();
        assert_eq!(p, BigUint::from(4u32));
        assert!(divides_one_minus_zp(&q, 4).unwrap());
        assert!(!divides_one_minus_zp(&q, 3).unwrap());
    }
}
