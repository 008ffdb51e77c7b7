//! Digit decimations of a recognized set.
//!
//! For stride k and offset j, the decimation of a set of digit strings keeps
//! positions j, j+k, j+2k, ... of each member. On the recognizing automaton
//! this is a relation composition: one decimated step reads a chosen digit
//! and then forgets k-1 arbitrary digits, and the start states are everything
//! reachable in exactly j arbitrary digits. Subset construction over these
//! relations, followed by pruning and minimization, recognizes the decimated
//! set exactly: every finite decimated prefix extends to an infinite one
//! because the relations are finitely branching and total on the pruned
//! automaton.

use std::collections::BTreeSet;

use num::Integer;

use crate::automaton::{
    classes, determinize_from_set, minimize, ClassDecomposition, DigitDfa, DigitNfa,
};
use crate::error::Result;
use crate::spectral::{dimension_from_rho, full_adjacency, spectral_radius};

/// Which digit positions to keep: j, j+k, j+2k, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimationSpec {
    /// Stride k >= 1 between kept positions.
    pub stride: u32,
    /// Offset j >= 0 of the first kept position.
    pub offset: u32,
}

type BoolMatrix = Vec<Vec<bool>>;

fn any_digit_relation(dfa: &DigitDfa) -> BoolMatrix {
    let n = dfa.state_count();
    let mut m = vec![vec![false; n]; n];
    for (row, out_edges) in m.iter_mut().zip(&dfa.trans) {
        for r in out_edges.iter().flatten() {
            row[*r] = true;
        }
    }
    m
}

fn bool_mul(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

fn bool_identity(n: usize) -> BoolMatrix {
    (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
}

fn bool_pow(m: &BoolMatrix, e: u32) -> BoolMatrix {
    let mut out = bool_identity(m.len());
    for _ in 0..e {
        out = bool_mul(&out, m);
    }
    out
}

fn row_apply(row: &[bool], m: &BoolMatrix) -> Vec<bool> {
    let n = row.len();
    let mut out = vec![false; n];
    for (q, &set) in row.iter().enumerate() {
        if set {
            for j in 0..n {
                if m[q][j] {
                    out[j] = true;
                }
            }
        }
    }
    out
}

/// Minimal deterministic automaton of the decimated set.
pub fn decimate(dfa: &DigitDfa, spec: DecimationSpec) -> Result<DigitDfa> {
    assert!(spec.stride >= 1, "stride must be at least 1");
    let n = dfa.state_count();
    let skip = any_digit_relation(dfa);
    let tail = bool_pow(&skip, spec.stride - 1);

    // NFA over the same states: read digit a, then forget stride-1 digits.
    let adj: Vec<Vec<(u32, usize)>> = (0..n)
        .map(|q| {
            let mut row = Vec::new();
            for digit in 0..dfa.p {
                if let Some(r) = dfa.step(q, digit) {
                    for (j, &hit) in tail[r].iter().enumerate() {
                        if hit {
                            row.push((digit, j));
                        }
                    }
                }
            }
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect();
    let nfa = DigitNfa {
        p: dfa.p,
        labels: (0..n).map(|q| dfa.label(q)).collect(),
        interior: vec![false; n],
        initial: dfa.initial,
        adj,
    };

    // Start set: reachable in exactly `offset` arbitrary digits.
    let mut start_row = vec![false; n];
    start_row[dfa.initial] = true;
    for _ in 0..spec.offset {
        start_row = row_apply(&start_row, &skip);
    }
    let start: BTreeSet<usize> = start_row
        .iter()
        .enumerate()
        .filter_map(|(q, &s)| s.then_some(q))
        .collect();
    minimize(&determinize_from_set(&nfa, &start))
}

/// Digits appearing on edges inside essential classes.
pub fn digit_support(dfa: &DigitDfa, decomposition: &ClassDecomposition) -> BTreeSet<u32> {
    let mut support = BTreeSet::new();
    for class in decomposition.essential_classes() {
        for &q in class {
            for digit in 0..dfa.p {
                if dfa.step(q, digit).is_some() {
                    support.insert(digit);
                }
            }
        }
    }
    support
}

/// Tests whether a strongly connected class contains two closed walks of
/// coprime length; returns the two lengths as a witness when it does.
///
/// The class period is the gcd of l(u) + 1 - l(v) over internal edges for any
/// breadth-first layering l. When it is 1, closed-walk lengths at a fixed
/// base state form a semigroup of gcd 1, so a coprime pair appears among
/// bounded lengths.
pub fn coprime_cycle_test(dfa: &DigitDfa, class: &[usize]) -> (bool, Option<(u64, u64)>) {
    let inside = |q: usize| class.binary_search(&q).is_ok();
    debug_assert!(class.windows(2).all(|w| w[0] < w[1]), "class must be sorted");

    // Breadth-first layering from the first member, within the class.
    let mut layer = vec![None::<u64>; dfa.state_count()];
    layer[class[0]] = Some(0);
    let mut queue = std::collections::VecDeque::from([class[0]]);
    while let Some(q) = queue.pop_front() {
        for digit in 0..dfa.p {
            if let Some(r) = dfa.step(q, digit) {
                if inside(r) && layer[r].is_none() {
                    layer[r] = Some(layer[q].unwrap() + 1);
                    queue.push_back(r);
                }
            }
        }
    }
    let mut g: u64 = 0;
    for &q in class {
        for digit in 0..dfa.p {
            if let Some(r) = dfa.step(q, digit) {
                if inside(r) {
                    let diff = layer[q].unwrap() as i64 + 1 - layer[r].unwrap() as i64;
                    g = g.gcd(&diff.unsigned_abs());
                }
            }
        }
    }
    if g != 1 {
        return (false, None);
    }

    // Collect closed-walk lengths at the base state until two are coprime.
    let base = class[0];
    let n = class.len() as u64;
    let cap = 2 * n * n + 16;
    let mut reach: Vec<bool> = (0..dfa.state_count()).map(|q| q == base).collect();
    let mut lengths: Vec<u64> = Vec::new();
    for t in 1..=cap {
        let mut next = vec![false; dfa.state_count()];
        for (q, &set) in reach.iter().enumerate() {
            if set {
                for digit in 0..dfa.p {
                    if let Some(r) = dfa.step(q, digit) {
                        if inside(r) {
                            next[r] = true;
                        }
                    }
                }
            }
        }
        reach = next;
        if reach[base] {
            for &earlier in &lengths {
                if earlier.gcd(&t) == 1 {
                    return (true, Some((earlier, t)));
                }
            }
            lengths.push(t);
        }
    }
    (true, None)
}

/// One stride's decimated dimensions across offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    /// Stride k.
    pub stride: u32,
    /// Dimension of the (k, j) decimation for j = 0, 1, ...
    pub dims: Vec<f64>,
    /// All offsets reached the plateau value.
    pub plateau: bool,
}

/// Decimated dimensions for strides 1..=k_max and offsets 0..=j_max, plus the
/// plateau value log(#support)/log(p) the strides eventually settle at.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimationProfile {
    /// Digits on edges inside essential classes.
    pub support: BTreeSet<u32>,
    /// log(#support)/log(p).
    pub plateau_value: f64,
    /// One row per stride.
    pub rows: Vec<ProfileRow>,
}

/// Computes the profile table.
pub fn decimation_dimension_profile(
    dfa: &DigitDfa,
    k_max: u32,
    j_max: u32,
    tol: f64,
) -> Result<DecimationProfile> {
    let decomposition = classes(dfa);
    let support = digit_support(dfa, &decomposition);
    let plateau_value = dimension_from_rho(support.len() as f64, dfa.p);
    let mut rows = Vec::new();
    for stride in 1..=k_max {
        let mut dims = Vec::new();
        for offset in 0..=j_max {
            let decimated = decimate(dfa, DecimationSpec { stride, offset })?;
            let rho = spectral_radius(&full_adjacency(&decimated), tol)?;
            dims.push(dimension_from_rho(rho, dfa.p));
        }
        let plateau = dims.iter().all(|d| (d - plateau_value).abs() <= 1e-9);
        rows.push(ProfileRow {
            stride,
            dims,
            plateau,
        });
    }
    Ok(DecimationProfile {
        support,
        plateau_value,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{determinize, to_nfa};
    use crate::ifs::{Contraction, IfsSystem};
    use crate::ratio;
    use crate::transducer::build;

    /// p = 3, maps 9x+3 and 9x+6: expansions use digit pairs 01 and 02 at
    /// even positions.
    fn even_pair() -> DigitDfa {
        let sys = IfsSystem::new(
            3,
            vec![
                Contraction {
                    b: 0,
                    k: 2,
                    d: ratio(3, 1),
                },
                Contraction {
                    b: 0,
                    k: 2,
                    d: ratio(6, 1),
                },
            ],
        );
        minimize(&determinize(&to_nfa(&build(&sys).unwrap()))).unwrap()
    }

    #[test]
    fn stride_one_offset_zero_is_the_identity() {
        let dfa = even_pair();
        let same = decimate(
            &dfa,
            DecimationSpec {
                stride: 1,
                offset: 0,
            },
        )
        .unwrap();
        for n in 0..=6 {
            assert_eq!(same.language_prefixes(n), dfa.language_prefixes(n));
        }
    }

    #[test]
    fn even_pair_parities_collapse_or_flatten() {
        let dfa = even_pair();
        let dim = |k: u32, j: u32| {
            let d = decimate(
                &dfa,
                DecimationSpec {
                    stride: k,
                    offset: j,
                },
            )
            .unwrap();
            let rho = spectral_radius(&full_adjacency(&d), 1e-12).unwrap();
            dimension_from_rho(rho, 3)
        };
        let log2_3 = 2.0f64.ln() / 3.0f64.ln();
        // Even stride sees only one parity: zeros, or the free digits {1,2}.
        assert!(dim(2, 0).abs() < 1e-12);
        assert!((dim(2, 1) - log2_3).abs() < 1e-12);
        // Odd strides mix parities and reproduce the original dimension.
        assert!((dim(3, 0) - log2_3 / 2.0).abs() < 1e-12);
        assert!((dim(1, 0) - log2_3 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn coprime_test_sees_the_even_period() {
        let dfa = even_pair();
        let decomposition = classes(&dfa);
        let essential = decomposition.essential_classes();
        assert_eq!(essential.len(), 1);
        let (coprime, witness) = coprime_cycle_test(&dfa, essential[0]);
        assert!(!coprime);
        assert_eq!(witness, None);

        assert_eq!(digit_support(&dfa, &decomposition), [0, 1, 2].into());
    }
}
