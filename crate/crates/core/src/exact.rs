//! Exact Bernoulli numbers and polynomials from explicit forward-difference
//! formulas, together with an independent recurrence oracle.
//!
//! The forward differences are
//!
//! ```text
//! Δₙ(k) = Σ_{j=1}^{n} (−1)^j C(n,j) j^k
//! ```
//!
//! and the three explicit formulas for `Bₖ` are sums of `Δₙ(k)` against
//! simple rational weights. All values use the convention `B₁ = −1/2`.
//!
//! The oracle side (`bernoulli_recurrence_oracle`, `bernoulli_poly_oracle`,
//! `stirling2`) never touches a forward difference.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Assign, Complete, Integer, Rational};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// `B₀`. The explicit difference formulas start at `k = 1`.
pub fn bernoulli_zero() -> ExactRational {
    ExactRational::one()
}

/// Binomial coefficient `C(n, j)`, zero when `j > n`.
pub fn binomial(n: u32, j: u32) -> Integer {
    if j > n {
        return Integer::new();
    }
    let j = j.min(n - j);
    let mut c = Integer::from(1);
    for i in 0..j {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// Memoized forward differences `Δₙ(k)`.
///
/// Columns are computed whole (every `n ≤ k` for a given `k`) since every
/// formula consumes a full column. Safe to share between threads; a lost
/// race only means a column is computed twice, with identical results.
#[derive(Debug, Default)]
pub struct DifferenceTable {
    columns: RwLock<HashMap<u32, Arc<[Integer]>>>,
}

impl DifferenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide table used by the free functions of this module.
    pub fn global() -> &'static DifferenceTable {
        static TABLE: OnceLock<DifferenceTable> = OnceLock::new();
        TABLE.get_or_init(DifferenceTable::new)
    }

    /// `Δₙ(k)` for `n = 1..=k`, index `n − 1`.
    pub fn column(&self, k: u32) -> Arc<[Integer]> {
        if let Some(col) = self.columns.read().expect("difference table poisoned").get(&k) {
            return Arc::clone(col);
        }
        let col: Arc<[Integer]> = compute_column(k).into();
        self.columns
            .write()
            .expect("difference table poisoned")
            .entry(k)
            .or_insert(col)
            .clone()
    }

    pub fn get(&self, n: u32, k: u32) -> Result<Integer> {
        check_positive("forward_difference", "n", n)?;
        check_positive("forward_difference", "k", k)?;
        if n > k {
            return Ok(Integer::new());
        }
        Ok(self.column(k)[(n - 1) as usize].clone())
    }

    /// Number of cached columns.
    pub fn len(&self) -> usize {
        self.columns.read().expect("difference table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// Rolling Pascal row: C(n, ·) is updated in place from C(n−1, ·).
fn compute_column(k: u32) -> Vec<Integer> {
    let powers: Vec<Integer> = (0..=k).map(|j| Integer::u_pow_u(j, k).complete()).collect();
    let mut row: Vec<Integer> = Vec::with_capacity(k as usize + 1);
    row.push(Integer::from(1));
    let mut column = Vec::with_capacity(k as usize);
    let mut acc = Integer::new();
    for n in 1..=k as usize {
        row.push(Integer::from(1));
        for j in (1..n).rev() {
            let (lo, hi) = row.split_at_mut(j);
            hi[0] += &lo[j - 1];
        }
        acc.assign(0);
        for j in 1..=n {
            if j % 2 == 1 {
                acc -= &row[j] * &powers[j];
            } else {
                acc += &row[j] * &powers[j];
            }
        }
        column.push(acc.clone());
    }
    column
}

fn check_positive(op: &'static str, name: &str, value: u32) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidIndex { op, reason: format!("{name} must be at least 1") });
    }
    Ok(())
}

/// `Δₙ(k) = Σ_{j=1}^{n} (−1)^j C(n,j) j^k`, memoized in the global table.
pub fn forward_difference(n: u32, k: u32) -> Result<Integer> {
    DifferenceTable::global().get(n, k)
}

/// Stirling number of the second kind `S(k, n)` by the triangular
/// recurrence `S(k, n) = n S(k−1, n) + S(k−1, n−1)`.
pub fn stirling2(k: u32, n: u32) -> Result<Integer> {
    check_positive("stirling2", "k", k)?;
    check_positive("stirling2", "n", n)?;
    if n > k {
        return Ok(Integer::new());
    }
    Ok(stirling2_row(k).swap_remove(n as usize))
}

/// `S(k, n)` for `n = 0..=k`.
pub fn stirling2_row(k: u32) -> Vec<Integer> {
    let mut row = vec![Integer::from(1)];
    for m in 1..=k as usize {
        row.push(Integer::new());
        for n in (1..=m).rev() {
            let (lo, hi) = row.split_at_mut(n);
            hi[0] *= n as u32;
            hi[0] += &lo[n - 1];
        }
        row[0] = Integer::new();
    }
    row
}

/// Worpitzky's form: `Bₖ = Σ_{n=1}^{k} Δₙ(k)/(n+1)`, `k ≥ 1`.
pub fn bernoulli_worpitzky(k: u32) -> Result<ExactRational> {
    check_positive("bernoulli_worpitzky", "k", k)?;
    let col = DifferenceTable::global().column(k);
    Ok(weighted_sum(&col, |n| Integer::from(n + 1)).into())
}

/// `Bₖ = (−1)^{k+1} Σ_{n=1}^{k} Δₙ(k)/(n(n+1))`, `k ≥ 1`.
pub fn bernoulli_formula_a(k: u32) -> Result<ExactRational> {
    check_positive("bernoulli_formula_a", "k", k)?;
    let col = DifferenceTable::global().column(k);
    let sum = weighted_sum(&col, |n| Integer::from(n) * (n + 1));
    Ok(signed(k + 1, sum).into())
}

/// `Bₖ = (−1)^{k+1} Σ_{n=1}^{k+1} Δₙ(k+1)/n²`, `k ≥ 0`.
pub fn bernoulli_formula_b(k: u32) -> Result<ExactRational> {
    let col = DifferenceTable::global().column(k + 1);
    let sum = weighted_sum(&col, |n| Integer::from(n) * n);
    Ok(signed(k + 1, sum).into())
}

// Σ col[n−1] / weight(n), accumulated over the lcm of the weights.
fn weighted_sum(col: &[Integer], weight: impl Fn(u32) -> Integer) -> Rational {
    let weights: Vec<Integer> = (1..=col.len() as u32).map(&weight).collect();
    let mut den = Integer::from(1);
    for w in &weights {
        den.lcm_mut(w);
    }
    let mut num = Integer::new();
    for (d, w) in col.iter().zip(&weights) {
        num += d * Integer::from(&den / w);
    }
    Rational::from((num, den))
}

fn signed(exponent: u32, value: Rational) -> Rational {
    if exponent % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Bernoulli numbers from `Σ_{j=0}^{k} C(k+1, j) B_j = 0`, `B₀ = 1`.
/// Independent of every forward-difference formula.
pub fn bernoulli_recurrence_oracle(k: u32) -> ExactRational {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1)]));
    if let Some(b) = cache.read().expect("bernoulli cache poisoned").get(k as usize) {
        return b.clone().into();
    }
    let mut values = cache.write().expect("bernoulli cache poisoned");
    while values.len() <= k as usize {
        let m = values.len() as u32;
        let mut sum = Rational::new();
        for (j, b) in values.iter().enumerate() {
            sum += Rational::from(b * Integer::binomial_u(m + 1, j as u32).complete());
        }
        values.push(-sum / (m + 1));
    }
    values[k as usize].clone().into()
}

/// `Δₙ,ₓ(k)` together with its arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDifferenceValue {
    pub value: ExactRational,
    pub n: u32,
    pub k: u32,
    pub x: ExactRational,
}

/// `Δₙ,ₓ(k) = Σ_{j=1}^{n} (−1)^j C(n,j) j (j+x−1)^{k−1}`.
pub fn poly_difference(n: u32, k: u32, x: &ExactRational) -> Result<PolyDifferenceValue> {
    check_positive("poly_difference", "n", n)?;
    check_positive("poly_difference", "k", k)?;
    let shifted = shifted_powers(n, k, x);
    let mut row = Integer::from(1);
    let mut num = Integer::new();
    for j in 1..=n {
        row *= n - j + 1;
        row /= j;
        let term = Integer::from(&row * j) * &shifted.numerators[j as usize];
        if j % 2 == 1 {
            num -= term;
        } else {
            num += term;
        }
    }
    Ok(PolyDifferenceValue {
        value: Rational::from((num, shifted.denominator)).into(),
        n,
        k,
        x: x.clone(),
    })
}

// (j + x − 1)^{k−1} over the common denominator q^{k−1}, x = p/q.
struct ShiftedPowers {
    numerators: Vec<Integer>,
    denominator: Integer,
}

fn shifted_powers(max_j: u32, k: u32, x: &ExactRational) -> ShiftedPowers {
    let p = x.numerator();
    let q = x.denominator();
    let numerators = (0..=max_j)
        .map(|j| {
            let base = Integer::from(q * (j as i64 - 1)) + p;
            base.pow(k - 1)
        })
        .collect();
    ShiftedPowers { numerators, denominator: Integer::from(q.pow(k - 1)) }
}

/// `Bₖ(1−x) = (−1)^{k+1} Σ_{n=1}^{k} (1/(n(n+1)) + (x−1)/n²) Δₙ,ₓ(k)` for
/// any rational `x`.
pub fn bernoulli_poly_at(k: u32, x: &ExactRational) -> Result<ExactRational> {
    check_positive("bernoulli_poly_at", "k", k)?;
    let shifted = shifted_powers(k, k, x);
    let x_minus_one = Rational::from(x.as_rational() - 1u32);

    // Δₙ,ₓ(k) numerators share the denominator q^{k−1}; build them with a
    // rolling Pascal row.
    let mut row: Vec<Integer> = vec![Integer::from(1)];
    let mut total = Rational::new();
    for n in 1..=k as usize {
        row.push(Integer::from(1));
        for j in (1..n).rev() {
            let (lo, hi) = row.split_at_mut(j);
            hi[0] += &lo[j - 1];
        }
        let mut diff = Integer::new();
        for (j, (binom, num)) in row.iter().zip(&shifted.numerators).enumerate().skip(1) {
            let term = Integer::from(binom * j as u32) * num;
            if j % 2 == 1 {
                diff -= term;
            } else {
                diff += term;
            }
        }
        let n = n as u32;
        let weight = Rational::from((1, Integer::from(n) * (n + 1))) + Rational::from(&x_minus_one / (n * n));
        total += weight * diff;
    }
    total /= &shifted.denominator;
    Ok(signed(k + 1, total).into())
}

/// `Bₖ(y)`, computed as `bernoulli_poly_at(k, 1 − y)`.
pub fn bernoulli_poly(k: u32, y: &ExactRational) -> Result<ExactRational> {
    let x = Rational::from(1 - y.as_rational());
    bernoulli_poly_at(k, &x.into())
}

/// `Bₖ(y) = Σ_{j=0}^{k} C(k,j) B_j y^{k−j}` with `B_j` from the recurrence oracle.
pub fn bernoulli_poly_oracle(k: u32, y: &ExactRational) -> ExactRational {
    // Horner in y over the coefficients C(k,j) B_j, highest power first.
    let mut acc = Rational::new();
    for j in 0..=k {
        let coeff = bernoulli_recurrence_oracle(j).into_inner() * Integer::binomial_u(k, j).complete();
        acc *= y.as_rational();
        acc += coeff;
    }
    acc.into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p, d).unwrap()
    }

    // Pascal triangle by repeated addition.
    fn pascal(n: u32, j: u32) -> Integer {
        let mut row = vec![Integer::from(1)];
        for _ in 0..n {
            let mut next = vec![Integer::from(1)];
            for w in row.windows(2) {
                next.push(Integer::from(&w[0] + &w[1]));
            }
            next.push(Integer::from(1));
            row = next;
        }
        row.get(j as usize).cloned().unwrap_or_default()
    }

    // Definition of Δₙ(k) summed term by term with Pascal binomials.
    fn brute_difference(n: u32, k: u32) -> Integer {
        let mut acc = Integer::new();
        for j in 1..=n {
            let term = pascal(n, j) * Integer::u_pow_u(j, k).complete();
            if j % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        acc
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(4, 2), pascal(4, 2));
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        for n in 0..30 {
            for j in 0..=n + 2 {
                assert_eq!(binomial(n, j), pascal(n, j), "C({n},{j})");
            }
        }
    }

    #[test]
    fn forward_difference_examples() {
        assert_eq!(forward_difference(1, 1).unwrap(), -1);
        assert_eq!(forward_difference(2, 2).unwrap(), 2);
        assert_eq!(forward_difference(3, 3).unwrap(), -6);
        assert_eq!(forward_difference(2, 1).unwrap(), 0);
        assert_eq!(brute_difference(2, 2), 2);
        assert_eq!(brute_difference(3, 3), -6);
    }

    #[test]
    fn forward_difference_matches_definition() {
        let table = DifferenceTable::new();
        for k in 1..=25 {
            for n in 1..=k + 3 {
                assert_eq!(table.get(n, k).unwrap(), brute_difference(n, k), "Δ_{n}({k})");
            }
        }
    }

    #[test]
    fn forward_difference_rejects_zero() {
        assert!(forward_difference(0, 3).is_err());
        assert!(forward_difference(3, 0).is_err());
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling2(3, 2).unwrap(), 3);
        for k in 1..=10 {
            assert_eq!(stirling2(k, k).unwrap(), 1);
        }
        assert_eq!(stirling2(3, 5).unwrap(), 0);
        assert_eq!(stirling2(10, 3).unwrap(), 9330);
    }

    #[test]
    fn stirling_counts_set_partitions() {
        // Place elements one at a time into an existing block or a new one.
        fn count(placed: usize, blocks: usize, k: usize, counts: &mut [u64]) {
            if placed == k {
                counts[blocks] += 1;
                return;
            }
            for _ in 0..blocks {
                count(placed + 1, blocks, k, counts);
            }
            count(placed + 1, blocks + 1, k, counts);
        }
        for k in 1..=7u32 {
            let mut counts = vec![0u64; k as usize + 1];
            count(0, 0, k as usize, &mut counts);
            for n in 1..=k {
                assert_eq!(stirling2(k, n).unwrap(), counts[n as usize], "S({k},{n})");
            }
        }
    }

    #[test]
    fn explicit_formula_examples() {
        assert_eq!(bernoulli_worpitzky(1).unwrap(), q(-1, 2));
        assert_eq!(bernoulli_worpitzky(2).unwrap(), q(1, 6));
        assert_eq!(bernoulli_worpitzky(4).unwrap(), q(-1, 30));
        assert_eq!(bernoulli_formula_a(1).unwrap(), q(-1, 2));
        assert_eq!(bernoulli_formula_a(2).unwrap(), q(1, 6));
        assert_eq!(bernoulli_formula_a(3).unwrap(), q(0, 1));
        assert_eq!(bernoulli_formula_b(0).unwrap(), q(1, 1));
        assert_eq!(bernoulli_formula_b(1).unwrap(), q(-1, 2));
        assert_eq!(bernoulli_formula_b(2).unwrap(), q(1, 6));
        assert!(bernoulli_worpitzky(0).is_err());
        assert!(bernoulli_formula_a(0).is_err());
    }

    #[test]
    fn recurrence_oracle_examples() {
        assert_eq!(bernoulli_recurrence_oracle(0), q(1, 1));
        assert_eq!(bernoulli_recurrence_oracle(6), q(1, 42));
        assert_eq!(bernoulli_recurrence_oracle(8), q(-1, 30));
        assert_eq!(bernoulli_recurrence_oracle(12), q(-691, 2730));
        assert_eq!(bernoulli_zero(), q(1, 1));
    }

    #[test]
    fn poly_difference_examples() {
        assert_eq!(poly_difference(1, 1, &q(1, 2)).unwrap().value, q(-1, 1));
        for (n, k) in [(1, 1), (2, 2), (2, 3)] {
            let v = poly_difference(n, k, &q(1, 1)).unwrap();
            assert_eq!(v.value, ExactRational::from(forward_difference(n, k).unwrap()));
        }
        assert_eq!(poly_difference(2, 2, &q(1, 2)).unwrap().value, q(2, 1));
    }

    #[test]
    fn poly_formula_examples() {
        assert_eq!(bernoulli_poly_at(1, &q(1, 2)).unwrap(), q(0, 1));
        assert_eq!(bernoulli_poly_at(2, &q(1, 2)).unwrap(), q(-1, 12));
        for k in 1..=10 {
            assert_eq!(bernoulli_poly_at(k, &q(1, 1)).unwrap(), bernoulli_recurrence_oracle(k), "k={k}");
        }
        assert!(bernoulli_poly_at(0, &q(1, 2)).is_err());
        assert_eq!(bernoulli_poly(2, &q(1, 2)).unwrap(), q(-1, 12));
    }

    #[test]
    fn poly_formula_uses_poly_difference() {
        // Re-assemble the formula from poly_difference values.
        for k in 1..=8u32 {
            for x in [q(1, 3), q(-2, 5), q(7, 4)] {
                let mut total = ExactRational::zero();
                for n in 1..=k {
                    let w = &q(1, (n * (n + 1)) as i64) + &(&(&x - &q(1, 1)) * &q(1, (n * n) as i64));
                    total = &total + &(&w * &poly_difference(n, k, &x).unwrap().value);
                }
                if k % 2 == 0 {
                    total = -total;
                }
                assert_eq!(bernoulli_poly_at(k, &x).unwrap(), total);
            }
        }
    }

    #[test]
    fn poly_oracle_examples() {
        for y in [q(0, 1), q(5, 7), q(-3, 2)] {
            assert_eq!(bernoulli_poly_oracle(0, &y), q(1, 1));
        }
        assert_eq!(bernoulli_poly_oracle(1, &q(0, 1)), q(-1, 2));
        assert_eq!(bernoulli_poly_oracle(3, &q(1, 2)), q(0, 1));
        // B₂(y) = y² − y + 1/6
        let y = q(2, 3);
        let expected = &(&(&y * &y) - &y) + &q(1, 6);
        assert_eq!(bernoulli_poly_oracle(2, &y), expected);
    }

    #[test]
    fn table_is_shared_across_threads() {
        let table = Arc::new(DifferenceTable::new());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let t = Arc::clone(&table);
                std::thread::spawn(move || (1..=30).map(|k| t.get(k / 2 + 1, k).unwrap()).collect::<Vec<_>>())
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(table.len(), 30);
    }
}
