//! Systems of affine contractions on the p-adic integers.
//!
//! Each map has the form F(x) = (-1)^b * p^k * x + d with k >= 1 and an offset
//! d in Z_p given as a rational. A word a_1 a_2 ... of map indices addresses
//! the attractor point
//!
//! x(a) = sum_j s_j * p^{e_j} * d_{a_j},
//!
//! where e_j and s_j accumulate the scale exponents and sign bits of the
//! earlier letters. Truncating the sum after m terms fixes the point modulo
//! p^{e_{m+1}}, which is what makes every digit question about the attractor
//! finite.

use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::is_padic_integer;
use crate::Rational;

/// Serde helpers mapping rationals to/from JSON strings like "1/2" or "-3".
/// Plain JSON integers are accepted on input.
mod rational_string {
    use super::Rational;
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    struct RationalVisitor;

    impl Visitor<'_> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a rational as a string \"a/b\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
            Rational::from_str(v.trim())
                .map_err(|e| E::custom(format!("bad rational {v:?}: {e}")))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
            Ok(Rational::from(num::BigInt::from(v)))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
            Ok(Rational::from(num::BigInt::from(v)))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// Serde helpers for an optional vector of rationals in string form.
mod opt_rational_vec {
    use super::Rational;
    use serde::de::{Deserialize, Deserializer};
    use serde::ser::{SerializeSeq, Serializer};

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Item(#[serde(with = "super::rational_string")] Rational);

    pub fn serialize<S: Serializer>(
        v: &Option<Vec<Rational>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v = v.as_ref().expect("skip_serializing_if guards None");
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Item(x.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        let items = Option::<Vec<Item>>::deserialize(d)?;
        Ok(items.map(|v| v.into_iter().map(|Item(x)| x).collect()))
    }
}

/// One affine map x -> (-1)^b * p^k * x + d. The modulus p lives on the
/// surrounding [`IfsSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    /// Sign bit: 0 for +p^k, 1 for -p^k.
    pub b: u8,
    /// Scale exponent, at least 1.
    pub k: u32,
    /// Offset, a rational in Z_p.
    #[serde(with = "rational_string")]
    pub d: Rational,
}

impl Contraction {
    /// +1 or -1 according to the sign bit.
    pub fn sign(&self) -> i8 {
        if self.b == 0 {
            1
        } else {
            -1
        }
    }

    /// Applies the map at modulus `p`.
    pub fn apply(&self, p: u32, x: &Rational) -> Rational {
        let scale = Rational::from(BigInt::from(p).pow(self.k));
        let scaled = scale * x;
        if self.b == 0 {
            scaled + &self.d
        } else {
            -scaled + &self.d
        }
    }

    /// Formula rendering like "5x+1/2" or "-25x-1/3".
    pub fn formula(&self, p: u32) -> String {
        let scale = BigInt::from(p).pow(self.k);
        let lead = if self.b == 0 {
            format!("{scale}x")
        } else {
            format!("-{scale}x")
        };
        if self.d.is_zero() {
            lead
        } else if self.d.is_negative() {
            format!("{lead}{}", self.d)
        } else {
            format!("{lead}+{}", self.d)
        }
    }
}

/// Letter used for a map in words and diagrams: A, B, ... Z, then M26, M27, ...
pub fn map_label(index: usize) -> String {
    if index < 26 {
        char::from(b'A' + index as u8).to_string()
    } else {
        format!("M{index}")
    }
}

/// A p-adic iterated function system: a prime modulus, a nonempty family of
/// distinct contractions, and optionally a probability weight per map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSystem {
    /// Prime modulus.
    pub p: u32,
    /// The maps, in address-alphabet order.
    pub maps: Vec<Contraction>,
    /// Optional probability per map, each in (0, 1), summing to 1.
    #[serde(
        default,
        with = "opt_rational_vec",
        skip_serializing_if = "Option::is_none"
    )]
    pub probs: Option<Vec<Rational>>,
}

/// The affine change of variable L(x) = c * (x + a) returned by
/// [`IfsSystem::normalize`]. The pair (a, c) is one witness; it is not unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjugation {
    /// Translation applied before scaling.
    pub a: Rational,
    /// Positive integer scale clearing all denominators, coprime to p.
    pub c: BigInt,
}

impl Conjugation {
    /// L(x) = c * (x + a).
    pub fn apply(&self, x: &Rational) -> Rational {
        Rational::from(self.c.clone()) * (x + &self.a)
    }

    /// L^{-1}(y) = y/c - a.
    pub fn unapply(&self, y: &Rational) -> Rational {
        y / Rational::from(self.c.clone()) - &self.a
    }
}

impl fmt::Display for Conjugation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {}, c = {}", self.a, self.c)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u32;
    while q.saturating_mul(q) <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

impl IfsSystem {
    /// Builds a system without probabilities.
    pub fn new(p: u32, maps: Vec<Contraction>) -> Self {
        IfsSystem {
            p,
            maps,
            probs: None,
        }
    }

    /// Checks all structural invariants: prime modulus, nonempty distinct
    /// maps with k >= 1 and offsets in Z_p, well-formed probabilities.
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::InvalidModulus { p: self.p });
        }
        if self.maps.is_empty() {
            return Err(Error::EmptySystem);
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.b > 1 {
                return Err(Error::BadSignBit { index: i, b: m.b });
            }
            if m.k == 0 {
                return Err(Error::ScaleExponentZero { index: i });
            }
            if !is_padic_integer(&m.d, self.p) {
                return Err(Error::OffsetNotPadicInteger {
                    index: i,
                    offset: m.d.clone(),
                    p: self.p,
                });
            }
        }
        for i in 0..self.maps.len() {
            for j in i + 1..self.maps.len() {
                if self.maps[i] == self.maps[j] {
                    return Err(Error::DuplicateMaps {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        if let Some(probs) = &self.probs {
            if probs.len() != self.maps.len() {
                return Err(Error::BadProbabilities {
                    reason: format!(
                        "{} probabilities for {} maps",
                        probs.len(),
                        self.maps.len()
                    ),
                });
            }
            for (i, q) in probs.iter().enumerate() {
                if !q.is_positive() || *q >= Rational::one() {
                    return Err(Error::BadProbabilities {
                        reason: format!("entry {i} = {q} is outside (0, 1)"),
                    });
                }
            }
            let total: Rational = probs.iter().sum();
            if total != Rational::one() {
                return Err(Error::BadProbabilities {
                    reason: format!("entries sum to {total}, not 1"),
                });
            }
        }
        Ok(())
    }

    /// Smallest scale exponent among the maps.
    pub fn min_scale_exp(&self) -> u32 {
        self.maps.iter().map(|m| m.k).min().expect("nonempty")
    }

    /// True when every map is x -> p*x + d (sign +, exponent 1).
    pub fn is_equicontractive(&self) -> bool {
        self.maps.iter().all(|m| m.b == 0 && m.k == 1)
    }

    /// Positive lcm of the offset denominators; carries of the transducer
    /// always have a denominator dividing this.
    pub fn offset_denominator_lcm(&self) -> BigInt {
        self.maps
            .iter()
            .fold(BigInt::one(), |acc, m| acc.lcm(m.d.denom()))
    }

    /// Largest |d_i|.
    pub fn max_offset_abs(&self) -> Rational {
        self.maps
            .iter()
            .map(|m| m.d.abs())
            .max()
            .expect("nonempty")
    }

    /// Partial sum of the address series: the first `terms` terms contributed
    /// by `word`. Requires terms <= word.len().
    pub fn compose_address(&self, word: &[usize], terms: usize) -> Result<Rational> {
        assert!(terms <= word.len(), "terms exceeds word length");
        let mut sum = Rational::zero();
        let mut scale = BigInt::one();
        let mut sign = 1i8;
        for (j, &a) in word.iter().take(terms).enumerate() {
            let m = self.maps.get(a).ok_or(Error::BadMapIndex {
                position: j,
                map: a,
                count: self.maps.len(),
            })?;
            let term = Rational::from(scale.clone()) * &m.d;
            sum += if sign > 0 { term } else { -term };
            scale *= BigInt::from(self.p).pow(m.k);
            sign *= m.sign();
        }
        Ok(sum)
    }

    /// Exact value of the infinite address `preperiod (period)^infinity`.
    /// The period must be nonempty.
    pub fn address_limit(&self, preperiod: &[usize], period: &[usize]) -> Result<Rational> {
        assert!(!period.is_empty(), "period must be nonempty");
        let head = self.compose_address(preperiod, preperiod.len())?;
        let (head_scale, head_sign) = self.word_scale_sign(preperiod)?;
        let block = self.compose_address(period, period.len())?;
        let (block_scale, block_sign) = self.word_scale_sign(period)?;
        // y = block + s*scale*y for the periodic tail value y.
        let factor = Rational::from(block_scale) * Rational::from(BigInt::from(block_sign));
        let tail = block / (Rational::one() - factor);
        Ok(head + Rational::from(head_scale) * Rational::from(BigInt::from(head_sign)) * tail)
    }

    /// Accumulated (p^{sum of k}, product of signs) over a word.
    fn word_scale_sign(&self, word: &[usize]) -> Result<(BigInt, i8)> {
        let mut scale = BigInt::one();
        let mut sign = 1i8;
        for (j, &a) in word.iter().enumerate() {
            let m = self.maps.get(a).ok_or(Error::BadMapIndex {
                position: j,
                map: a,
                count: self.maps.len(),
            })?;
            scale *= BigInt::from(self.p).pow(m.k);
            sign *= m.sign();
        }
        Ok((scale, sign))
    }

    /// Conjugates the system by L(x) = c*(x + a) into the standard form where
    /// every offset is an integer, maps with sign + have nonnegative offsets,
    /// maps with sign - have nonpositive offsets, and at least one offset is
    /// zero. Returns the rewritten system together with the witness (a, c).
    ///
    /// The witness is one valid choice among many: a is the largest
    /// translation admissible for every map, c the smallest positive integer
    /// clearing the shifted denominators.
    pub fn normalize(&self) -> Result<(IfsSystem, Conjugation)> {
        self.validate()?;
        // For L(x) = x + a the rewritten offset is d + (1 -+ p^k) a; the sign
        // constraints become a <= d/(p^k - 1) for b = 0 and
        // a <= -d/(p^k + 1) for b = 1. Take the largest admissible a.
        let a = self
            .maps
            .iter()
            .map(|m| {
                let pk = Rational::from(BigInt::from(self.p).pow(m.k));
                if m.b == 0 {
                    &m.d / (pk - Rational::one())
                } else {
                    -&m.d / (pk + Rational::one())
                }
            })
            .min()
            .expect("nonempty");
        let shifted: Vec<Rational> = self
            .maps
            .iter()
            .map(|m| {
                let pk = Rational::from(BigInt::from(self.p).pow(m.k));
                let coeff = if m.b == 0 {
                    Rational::one() - pk
                } else {
                    Rational::one() + pk
                };
                &m.d + coeff * &a
            })
            .collect();
        let c = shifted
            .iter()
            .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
        debug_assert!(c.gcd(&BigInt::from(self.p)).is_one());
        let maps: Vec<Contraction> = self
            .maps
            .iter()
            .zip(&shifted)
            .map(|(m, d)| {
                let nd = Rational::from(c.clone()) * d;
                debug_assert!(nd.denom().is_one());
                debug_assert!(if m.b == 0 {
                    !nd.is_negative()
                } else {
                    !nd.is_positive()
                });
                Contraction {
                    b: m.b,
                    k: m.k,
                    d: nd,
                }
            })
            .collect();
        debug_assert!(maps.iter().any(|m| m.d.is_zero()));
        let normalized = IfsSystem {
            p: self.p,
            maps,
            probs: self.probs.clone(),
        };
        normalized.validate()?;
        Ok((normalized, Conjugation { a, c }))
    }
}

impl fmt::Display for IfsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| format!("{}: {}", map_label(i), m.formula(self.p)))
            .collect::<Vec<_>>()
            .join(", ");
        write!(f, "p = {}, {{{maps}}}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn pair_5x_half_third() -> IfsSystem {
        IfsSystem::new(
            5,
            vec![
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(1, 2),
                },
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(1, 3),
                },
            ],
        )
    }

    #[test]
    fn validation_rejects_bad_systems() {
        assert_eq!(
            IfsSystem::new(5, vec![]).validate(),
            Err(Error::EmptySystem)
        );
        assert_eq!(
            IfsSystem::new(4, pair_5x_half_third().maps).validate(),
            Err(Error::InvalidModulus { p: 4 })
        );
        let bad_offset = IfsSystem::new(
            5,
            vec![Contraction {
                b: 0,
                k: 1,
                d: ratio(1, 5),
            }],
        );
        assert_eq!(
            bad_offset.validate(),
            Err(Error::OffsetNotPadicInteger {
                index: 0,
                offset: ratio(1, 5),
                p: 5
            })
        );
        let mut with_probs = pair_5x_half_third();
        with_probs.probs = Some(vec![ratio(1, 2), ratio(1, 3)]);
        assert!(matches!(
            with_probs.validate(),
            Err(Error::BadProbabilities { .. })
        ));
    }

    #[test]
    fn normalization_matches_worked_example() {
        let (normal, conj) = pair_5x_half_third().normalize().unwrap();
        assert_eq!(conj.a, ratio(1, 12));
        assert_eq!(conj.c, BigInt::from(6));
        assert_eq!(normal.maps[0].d, ratio(1, 1));
        assert_eq!(normal.maps[1].d, ratio(0, 1));

        // Already-normal systems come back unchanged with the trivial witness.
        let (again, conj2) = normal.normalize().unwrap();
        assert_eq!(again, normal);
        assert_eq!(conj2.a, ratio(0, 1));
        assert_eq!(conj2.c, BigInt::from(1));
    }

    #[test]
    fn normalization_handles_sign_flips() {
        let sys = IfsSystem::new(
            5,
            vec![
                Contraction {
                    b: 1,
                    k: 1,
                    d: ratio(0, 1),
                },
                Contraction {
                    b: 0,
                    k: 2,
                    d: ratio(1, 2),
                },
            ],
        );
        let (normal, conj) = sys.normalize().unwrap();
        assert_eq!(conj.a, ratio(0, 1));
        assert_eq!(conj.c, BigInt::from(2));
        assert_eq!(normal.maps[0].d, ratio(0, 1));
        assert_eq!(normal.maps[1].d, ratio(1, 1));
    }

    #[test]
    fn address_partial_sums_match_hand_values() {
        let overlap = IfsSystem::new(
            3,
            vec![
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(0, 1),
                },
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(1, 1),
                },
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(3, 1),
                },
            ],
        );
        assert_eq!(
            overlap.compose_address(&[2, 2, 2], 2).unwrap(),
            ratio(12, 1)
        );
        assert_eq!(overlap.compose_address(&[2, 2, 2], 0).unwrap(), ratio(0, 1));

        let pair = pair_5x_half_third();
        assert_eq!(pair.compose_address(&[1, 0], 2).unwrap(), ratio(1, 2) * ratio(5, 1) + ratio(1, 3));
    }

    #[test]
    fn json_round_trip_uses_string_rationals() {
        let mut sys = pair_5x_half_third();
        sys.probs = Some(vec![ratio(1, 2), ratio(1, 2)]);
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains("\"d\":\"1/2\""));
        assert!(json.contains("\"probs\":[\"1/2\",\"1/2\"]"));
        let back: IfsSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);

        let bare: IfsSystem =
            serde_json::from_str(r#"{"p":3,"maps":[{"b":0,"k":1,"d":2}]}"#).unwrap();
        assert_eq!(bare.maps[0].d, ratio(2, 1));
        assert_eq!(bare.probs, None);
    }
}
