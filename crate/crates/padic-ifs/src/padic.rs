//! Digit arithmetic for rationals inside the p-adic integers.
//!
//! A rational x = a/b with gcd(b, p) = 1 lies in Z_p and has a unique expansion
//! x = sum_{i >= 0} d_i p^i with digits d_i in {0, ..., p-1}. The first digit
//! is the residue a * b^{-1} mod p, and the digit stream of (x - d_0)/p
//! continues the expansion. Each remainder determines the whole tail, so the
//! remainder sequence of a rational is eventually periodic and the first
//! repeated remainder yields the canonical minimal preperiod/period split.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// p-adic valuation of a rational: the exponent of p in its factorization.
///
/// Zero has infinite valuation, which compares greater than every finite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    /// Valuation of a nonzero rational.
    Finite(i64),
    /// Valuation of zero.
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// Returns the p-adic valuation of `x`.
pub fn valuation(x: &Rational, p: u32) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let count = |mut n: BigInt| -> i64 {
        let mut c = 0;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return c;
            }
            c += 1;
            n = q;
        }
    };
    Valuation::Finite(count(x.numer().clone()) - count(x.denom().clone()))
}

/// Returns whether `x` lies in the p-adic integers, i.e. has valuation >= 0.
pub fn is_padic_integer(x: &Rational, p: u32) -> bool {
    valuation(x, p) >= Valuation::Finite(0)
}

/// Modular inverse of `a` modulo `m` via the extended Euclidean algorithm.
///
/// Requires gcd(a, m) = 1 and m >= 2; the result lies in [0, m).
pub(crate) fn mod_inverse(a: i128, m: i128) -> i128 {
    debug_assert!(m >= 2);
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inputs must be coprime");
    old_s.rem_euclid(m)
}

/// Reduces `x` modulo `m`, mapping the denominator through its inverse.
///
/// Requires gcd(denom, m) = 1.
fn residue(x: &Rational, m: i128) -> i128 {
    let m_big = BigInt::from(m);
    let a = x.numer().mod_floor(&m_big).to_i128().expect("residue fits");
    let b = x.denom().mod_floor(&m_big).to_i128().expect("residue fits");
    a * mod_inverse(b, m) % m
}

/// First p-adic digit of `x`.
pub fn digit(x: &Rational, p: u32) -> Result<u32> {
    if !is_padic_integer(x, p) {
        return Err(Error::NotPadicInteger {
            value: x.clone(),
            p,
        });
    }
    Ok(residue(x, i128::from(p)) as u32)
}

/// First `k` p-adic digits of `x`, least significant first.
///
/// Panics if p^k does not fit in an i128; every caller stays far below that.
pub fn digit_prefix(x: &Rational, p: u32, k: u32) -> Result<Vec<u32>> {
    if !is_padic_integer(x, p) {
        return Err(Error::NotPadicInteger {
            value: x.clone(),
            p,
        });
    }
    let modulus = i128::from(p)
        .checked_pow(k)
        .expect("digit prefix length overflows i128");
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut value = residue(x, modulus);
    let mut digits = Vec::with_capacity(k as usize);
    for _ in 0..k {
        digits.push((value % i128::from(p)) as u32);
        value /= i128::from(p);
    }
    Ok(digits)
}

/// The integer whose base-p digits are the first `k` digits of `x`, i.e. the
/// residue of `x` in [0, p^k) modulo p^k.
pub fn digit_block(x: &Rational, p: u32, k: u32) -> Result<u64> {
    let digits = digit_prefix(x, p, k)?;
    let mut value: u64 = 0;
    let mut scale: u64 = 1;
    for d in digits {
        value += u64::from(d) * scale;
        scale = scale.saturating_mul(u64::from(p));
    }
    Ok(value)
}

/// Strips the first digit: returns (x - digit(x)) / p.
pub fn shift(x: &Rational, p: u32) -> Result<Rational> {
    let d = digit(x, p)?;
    Ok((x - Rational::from(BigInt::from(d))) / Rational::from(BigInt::from(p)))
}

/// Eventually periodic p-adic digit expansion with the minimal canonical
/// preperiod/period split. The period is never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicExpansion {
    /// Digits before the repeating part, least significant first.
    pub preperiod: Vec<u32>,
    /// Repeating digit block, least significant first; nonempty and minimal.
    pub period: Vec<u32>,
}

impl PadicExpansion {
    /// Digit at position `i` of the infinite expansion.
    pub fn digit_at(&self, i: usize) -> u32 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// First `n` digits of the infinite expansion.
    pub fn digits(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.digit_at(i)).collect()
    }

    /// The rational with this expansion, via the geometric series for the
    /// periodic tail: tail = block / (1 - p^c).
    pub fn to_rational(&self, p: u32) -> Rational {
        let p_rat = Rational::from(BigInt::from(p));
        let mut head = Rational::zero();
        let mut scale = Rational::one();
        for &d in &self.preperiod {
            head += &scale * Rational::from(BigInt::from(d));
            scale *= &p_rat;
        }
        let mut block = Rational::zero();
        let mut block_scale = Rational::one();
        for &d in &self.period {
            block += &block_scale * Rational::from(BigInt::from(d));
            block_scale *= &p_rat;
        }
        let tail = block / (Rational::one() - block_scale);
        head + scale * tail
    }
}

impl fmt::Display for PadicExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ds: &[u32]| {
            ds.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "[{};{}]", join(&self.preperiod), join(&self.period))
    }
}

/// Computes the canonical digit expansion of `x`.
///
/// Walks remainders x, (x - d_0)/p, ... and stops at the first repeat. The
/// remainder determines the whole tail, so the split is minimal: the first
/// repeated remainder is the first one that recurs forever, and all remainders
/// strictly inside the detected cycle are distinct.
pub fn expand(x: &Rational, p: u32) -> Result<PadicExpansion> {
    if !is_padic_integer(x, p) {
        return Err(Error::NotPadicInteger {
            value: x.clone(),
            p,
        });
    }
    let mut seen: BTreeMap<Rational, usize> = BTreeMap::new();
    let mut digits: Vec<u32> = Vec::new();
    let mut current = x.clone();
    loop {
        if let Some(&start) = seen.get(&current) {
            let period = digits.split_off(start);
            return Ok(PadicExpansion {
                preperiod: digits,
                period,
            });
        }
        seen.insert(current.clone(), digits.len());
        let d = digit(&current, p)?;
        digits.push(d);
        current = shift(&current, p)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn valuation_counts_powers_of_p() {
        assert_eq!(valuation(&ratio(1, 3), 5), Valuation::Finite(0));
        assert_eq!(valuation(&ratio(50, 3), 5), Valuation::Finite(2));
        assert_eq!(valuation(&ratio(3, 50), 5), Valuation::Finite(-2));
        assert_eq!(valuation(&ratio(0, 1), 5), Valuation::Infinite);
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
    }

    #[test]
    fn first_digit_uses_modular_inverse() {
        assert_eq!(digit(&ratio(1, 2), 5).unwrap(), 3);
        assert_eq!(digit(&ratio(0, 1), 3).unwrap(), 0);
        assert_eq!(digit(&ratio(-1, 3), 5).unwrap(), 3);
        assert_eq!(
            digit(&ratio(1, 5), 5),
            Err(Error::NotPadicInteger {
                value: ratio(1, 5),
                p: 5
            })
        );
    }

    #[test]
    fn digit_blocks_match_worked_values() {
        assert_eq!(digit_block(&ratio(1, 2), 5, 2).unwrap(), 13);
        assert_eq!(digit_block(&ratio(7, 1), 5, 2).unwrap(), 7);
        assert_eq!(digit_block(&ratio(-2, 3), 5, 2).unwrap(), 16);
        assert_eq!(digit_prefix(&ratio(1, 2), 5, 2).unwrap(), vec![3, 2]);
        assert_eq!(digit_prefix(&ratio(-2, 3), 5, 2).unwrap(), vec![1, 3]);
    }

    #[test]
    fn expansions_are_minimal_and_canonical() {
        let e = expand(&ratio(-1, 3), 5).unwrap();
        assert_eq!(e.preperiod, Vec::<u32>::new());
        assert_eq!(e.period, vec![3, 1]);
        assert_eq!(e.to_string(), "[;3,1]");

        let e = expand(&ratio(7, 1), 5).unwrap();
        assert_eq!(e.preperiod, vec![2, 1]);
        assert_eq!(e.period, vec![0]);
        assert_eq!(e.to_string(), "[2,1;0]");

        let e = expand(&ratio(-1, 8), 3).unwrap();
        assert_eq!(e.preperiod, Vec::<u32>::new());
        assert_eq!(e.period, vec![1, 0]);
    }

    #[test]
    fn expansion_round_trips() {
        for (n, d) in [(-1i64, 3i64), (7, 1), (-1, 8), (1, 2), (-2, 3), (22, 7)] {
            for p in [2u32, 3, 5, 7] {
                let x = ratio(n, d);
                if !is_padic_integer(&x, p) {
                    continue;
                }
                let e = expand(&x, p).unwrap();
                assert_eq!(e.to_rational(p), x, "round trip for {n}/{d} at p={p}");
            }
        }
    }
}
