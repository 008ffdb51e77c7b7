//! The digit-rewriting transducer of a system.
//!
//! Feeding an address word to the system leaves a tail that is always of the
//! form s + e*U, where s is a bounded rational carry, e a sign, and U the
//! value contributed by the not-yet-read suffix (a p-adic integer). Reading
//! map (-1)^b p^k x + d turns the tail into (s + e*d) + e*(-1)^b p^k U', so
//! the machine can emit the first k digits of s + e*d immediately: the suffix
//! only touches higher positions. The next carry is what remains after those
//! digits, shifted down by p^k.
//!
//! Carries stay within an a-priori rational bound and share a common
//! denominator, so the reachable state space is finite and the breadth-first
//! construction below terminates.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::padic::{digit_prefix, expand};
use crate::Rational;

/// A transducer state: the pending rational carry plus the orientation the
/// not-yet-read suffix enters with.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CarryState {
    /// Pending carry s.
    pub carry: Rational,
    /// True for orientation +, false for -.
    pub positive: bool,
}

impl fmt::Display for CarryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{}",
            self.carry,
            if self.positive { "+" } else { "-" }
        )
    }
}

/// Outcome of reading one map in one state: the digits emitted (least
/// significant first, exactly k of them) and the successor state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransducerEdge {
    /// Emitted digits, k = scale exponent of the map.
    pub output: Vec<u32>,
    /// Index of the successor state.
    pub target: usize,
}

/// Digit-rewriting transducer over the address alphabet of a system.
///
/// States are discovered breadth-first from (0, +); `edges[q][i]` is the
/// transition of state q under map i.
#[derive(Debug, Clone)]
pub struct Transducer {
    /// The system this transducer rewrites for.
    pub system: IfsSystem,
    /// Reachable states, `states[0]` = (0, +).
    pub states: Vec<CarryState>,
    /// Transition table, indexed `[state][map]`.
    pub edges: Vec<Vec<TransducerEdge>>,
    /// Bound every reachable |carry| provably stays within.
    pub carry_bound: Rational,
}

/// Builds the transducer of a validated system.
pub fn build(system: &IfsSystem) -> Result<Transducer> {
    system.validate()?;
    let p = system.p;
    // |s'| < (|s| + max|d|)/q + 1 with q = p^{min k}, so any bound B with
    // B >= max|d|/(q-1) + q/(q-1) is closed under transitions; + 2 covers it.
    let q = Rational::from(BigInt::from(p).pow(system.min_scale_exp()));
    let carry_bound =
        system.max_offset_abs() / (&q - Rational::one()) + Rational::from(BigInt::from(2));
    let denom_lcm = system.offset_denominator_lcm();

    let mut index: BTreeMap<(Rational, bool), usize> = BTreeMap::new();
    let mut states: Vec<CarryState> = Vec::new();
    let mut edges: Vec<Vec<TransducerEdge>> = Vec::new();
    let root = (Rational::zero(), true);
    index.insert(root.clone(), 0);
    states.push(CarryState {
        carry: root.0,
        positive: root.1,
    });
    let mut head = 0;
    while head < states.len() {
        let state = states[head].clone();
        let mut row = Vec::with_capacity(system.maps.len());
        for m in &system.maps {
            let entering = if state.positive {
                &state.carry + &m.d
            } else {
                &state.carry - &m.d
            };
            let output = digit_prefix(&entering, p, m.k)?;
            let mut block = Rational::zero();
            let mut scale = Rational::one();
            for &d in &output {
                block += &scale * Rational::from(BigInt::from(d));
                scale *= Rational::from(BigInt::from(p));
            }
            let carry = (entering - block) / scale;
            if carry.abs() > carry_bound {
                return Err(Error::CarryBoundExceeded {
                    carry: Box::new(carry),
                    bound: Box::new(carry_bound),
                });
            }
            debug_assert!(
                denom_lcm.is_multiple_of(carry.denom()),
                "carry denominator must divide the offset denominator lcm"
            );
            let positive = state.positive == (m.b == 0);
            let key = (carry.clone(), positive);
            let next = states.len();
            let target = *index.entry(key).or_insert_with(|| {
                states.push(CarryState { carry, positive });
                next
            });
            row.push(TransducerEdge { output, target });
        }
        edges.push(row);
        head += 1;
    }
    Ok(Transducer {
        system: system.clone(),
        states,
        edges,
        carry_bound,
    })
}

impl Transducer {
    /// Number of transitions (states x maps).
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|row| row.len()).sum()
    }

    /// Index of the state with the given carry and orientation, if reachable.
    pub fn state_index(&self, carry: &Rational, positive: bool) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.positive == positive && &s.carry == carry)
    }

    /// Runs a word from the initial state; returns the emitted digit string
    /// (least significant first) and the final state.
    pub fn run(&self, word: &[usize]) -> Result<(Vec<u32>, usize)> {
        let mut state = 0;
        let mut digits = Vec::new();
        for (position, &map) in word.iter().enumerate() {
            let edge = self
                .edges
                .get(state)
                .and_then(|row| row.get(map))
                .ok_or(Error::BadMapIndex {
                    position,
                    map,
                    count: self.system.maps.len(),
                })?;
            digits.extend_from_slice(&edge.output);
            state = edge.target;
        }
        Ok((digits, state))
    }

    /// Given a word that reaches `state` from the initial state, with `state`
    /// in the positive orientation, returns a word that reaches an integer
    /// carry from the initial state: the input repeated b*c times, where b is
    /// the carry's denominator and c its digit-expansion period length.
    ///
    /// The repeated word addresses the sum of b*c copies of the carry's value
    /// at shifted positions; the period structure makes the fractional parts
    /// cancel in that sum.
    pub fn integer_descendant(&self, state: usize, word: &[usize]) -> Result<Vec<usize>> {
        let (_, reached) = self.run(word)?;
        if reached != state {
            return Err(Error::WordDoesNotReachState { state, reached });
        }
        let s = &self.states[state];
        if !s.positive {
            return Err(Error::NotPositiveOrientation { state });
        }
        let b = s
            .carry
            .denom()
            .to_usize()
            .expect("carry denominator is small");
        let c = expand(&s.carry, self.system.p)?.period.len();
        let mut result = Vec::with_capacity(word.len() * b * c);
        for _ in 0..b * c {
            result.extend_from_slice(word);
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Contraction;
    use crate::ratio;

    /// p = 5, A: 5x, B: 5x - 1/3.
    fn pair_5x_0_third() -> IfsSystem {
        IfsSystem::new(
            5,
            vec![
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(0, 1),
                },
                Contraction {
                    b: 0,
                    k: 1,
                    d: ratio(-1, 3),
                },
            ],
        )
    }

    #[test]
    fn four_state_machine_has_expected_edges() {
        let t = build(&pair_5x_0_third()).unwrap();
        assert_eq!(t.states.len(), 4);
        assert_eq!(t.edge_count(), 8);
        let idx = |n: i64, d: i64| t.state_index(&ratio(n, d), true).unwrap();
        let (s0, s23, s1, s13) = (idx(0, 1), idx(-2, 3), idx(-1, 1), idx(-1, 3));
        let edge = |q: usize, m: usize| (&t.edges[q][m].output[..], t.edges[q][m].target);
        assert_eq!(edge(s0, 0), (&[0][..], s0));
        assert_eq!(edge(s0, 1), (&[3][..], s23));
        assert_eq!(edge(s23, 0), (&[1][..], s13));
        assert_eq!(edge(s23, 1), (&[4][..], s1));
        assert_eq!(edge(s1, 0), (&[4][..], s1));
        assert_eq!(edge(s1, 1), (&[2][..], s23));
        assert_eq!(edge(s13, 0), (&[3][..], s23));
        assert_eq!(edge(s13, 1), (&[1][..], s13));
    }

    #[test]
    fn runs_emit_digit_blocks_of_partial_sums() {
        let t = build(&pair_5x_0_third()).unwrap();
        let word: Vec<usize> = [1, 0].repeat(6);
        let (digits, end) = t.run(&word).unwrap();
        assert_eq!(digits, vec![3, 1, 1, 3, 4, 4, 2, 1, 1, 3, 4, 4]);
        assert_eq!(t.states[end].carry, ratio(-1, 1));

        let (digits, end) = t.run(&[1; 6]).unwrap();
        assert_eq!(digits, vec![3, 4, 2, 4, 2, 4]);
        assert_eq!(t.states[end].carry, ratio(-1, 1));
    }

    #[test]
    fn integer_descendants_repeat_by_denominator_times_period() {
        let t = build(&pair_5x_0_third()).unwrap();
        let third = t.state_index(&ratio(-1, 3), true).unwrap();
        let word = t.integer_descendant(third, &[1, 0]).unwrap();
        assert_eq!(word.len(), 2 * 6);
        let (_, end) = t.run(&word).unwrap();
        assert!(t.states[end].carry.denom().is_one());

        let two_thirds = t.state_index(&ratio(-2, 3), true).unwrap();
        let word = t.integer_descendant(two_thirds, &[1]).unwrap();
        assert_eq!(word.len(), 6);
        let (_, end) = t.run(&word).unwrap();
        assert!(t.states[end].carry.denom().is_one());
    }

    #[test]
    fn sign_flips_track_orientation() {
        // p = 5, A: -5x, B: 25x + 1/2.
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
        let t = build(&sys).unwrap();
        assert_eq!(t.states.len(), 6);
        for (n, d, positive) in [
            (0i64, 1i64, true),
            (0, 1, false),
            (-1, 2, true),
            (-1, 2, false),
            (-1, 1, true),
            (-1, 1, false),
        ] {
            assert!(
                t.state_index(&ratio(n, d), positive).is_some(),
                "missing state {n}/{d},{positive}"
            );
        }
        // x(BABABA...) = 1/252 = [3; 2,2,4,4,4,2] in base 5; six letters fix
        // 2+1+2+1+2+1 = 9 digits.
        let (digits, _) = t.run(&[1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(digits, vec![3, 2, 2, 4, 4, 4, 2, 2, 2]);
    }
}
