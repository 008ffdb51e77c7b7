//! Fixture systems shared across the integration suites. Each constructor
//! mirrors one of the JSON files under systems/ at the workspace root.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use padic_ifs::automaton::{determinize, minimize, to_nfa, AutomatonFile, DigitDfa, DigitNfa};
use padic_ifs::ifs::{Contraction, IfsSystem};
use padic_ifs::transducer::{build, Transducer};
use padic_ifs::{ratio, Rational};
use rand::Rng;

pub fn map(b: u8, k: u32, d: Rational) -> Contraction {
    Contraction { b, k, d }
}

fn with_probs(mut system: IfsSystem, weights: &[(i64, i64)]) -> IfsSystem {
    system.probs = Some(weights.iter().map(|&(n, d)| ratio(n, d)).collect());
    system
}

/// 3-adic Cantor pair {3x, 3x+2}, equal weights.
pub fn cantor() -> IfsSystem {
    with_probs(
        IfsSystem::new(3, vec![map(0, 1, ratio(0, 1)), map(0, 1, ratio(2, 1))]),
        &[(1, 2), (1, 2)],
    )
}

/// Full digit system {px+i : 0 <= i < p}, equal weights.
pub fn haar(p: u32) -> IfsSystem {
    let maps = (0..p).map(|i| map(0, 1, ratio(i as i64, 1))).collect();
    let weights: Vec<(i64, i64)> = (0..p).map(|_| (1, p as i64)).collect();
    with_probs(IfsSystem::new(p, maps), &weights)
}

/// 3-adic {3x, 3x+1, 3x+3} with optional weights.
pub fn overlap_three(weights: Option<&[(i64, i64)]>) -> IfsSystem {
    let system = IfsSystem::new(
        3,
        vec![
            map(0, 1, ratio(0, 1)),
            map(0, 1, ratio(1, 1)),
            map(0, 1, ratio(3, 1)),
        ],
    );
    match weights {
        Some(w) => with_probs(system, w),
        None => system,
    }
}

/// 5-adic {-5x, 25x+1/2}: mixed sign and scale.
pub fn negative_scale() -> IfsSystem {
    IfsSystem::new(5, vec![map(1, 1, ratio(0, 1)), map(0, 2, ratio(1, 2))])
}

/// 5-adic {5x+1/2, 5x+1/3}: normalizes to {5x+1, 5x}.
pub fn shifted_pair() -> IfsSystem {
    IfsSystem::new(5, vec![map(0, 1, ratio(1, 2)), map(0, 1, ratio(1, 3))])
}

/// 5-adic {5x, 5x-1/3}: the integer-descendant example.
pub fn third_offset_pair() -> IfsSystem {
    IfsSystem::new(5, vec![map(0, 1, ratio(0, 1)), map(0, 1, ratio(-1, 3))])
}

/// 3-adic {9x+3, 9x+6}: digits live in even positions only.
pub fn even_digits() -> IfsSystem {
    IfsSystem::new(3, vec![map(0, 2, ratio(3, 1)), map(0, 2, ratio(6, 1))])
}

/// 3-adic {3x+1, 3x+5}: coprime cycle lengths, plateau at stride 2.
pub fn dense_pair() -> IfsSystem {
    IfsSystem::new(3, vec![map(0, 1, ratio(1, 1)), map(0, 1, ratio(5, 1))])
}

/// Hand-built 5-adic automaton with two essential classes {B} and {C}
/// hanging off a looping initial class {A}.
pub fn branching_automaton() -> AutomatonFile {
    AutomatonFile {
        p: 5,
        states: vec!["A".into(), "B".into(), "C".into()],
        initial: 0,
        edges: vec![
            (0, 0, 0),
            (0, 2, 0),
            (0, 3, 0),
            (0, 1, 1),
            (0, 4, 2),
            (1, 1, 1),
            (1, 2, 1),
            (2, 3, 2),
            (2, 4, 2),
        ],
    }
}

/// Every fixture that is an IFS, for suite-wide properties.
pub fn suite() -> Vec<(&'static str, IfsSystem)> {
    vec![
        ("cantor", cantor()),
        ("haar-2", haar(2)),
        ("haar-3", haar(3)),
        ("haar-5", haar(5)),
        ("overlap-three", overlap_three(None)),
        ("negative-scale", negative_scale()),
        ("shifted-pair", shifted_pair()),
        ("third-offset-pair", third_offset_pair()),
        ("even-digits", even_digits()),
        ("dense-pair", dense_pair()),
    ]
}

/// Transducer plus minimal DFA for a system.
pub fn minimal_pipeline(system: &IfsSystem) -> (Transducer, DigitDfa) {
    let t = build(system).expect("transducer");
    let dfa = minimize(&determinize(&to_nfa(&t))).expect("minimize");
    (t, dfa)
}

/// Subset construction can explode on adversarial random systems; count the
/// reachable subsets up front so callers can skip a case that would not fit
/// in memory.
pub fn determinization_fits(nfa: &DigitNfa, cap: usize) -> bool {
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let start: BTreeSet<usize> = [nfa.initial].into();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(subset) = queue.pop_front() {
        for digit in 0..nfa.p {
            let next: BTreeSet<usize> = subset
                .iter()
                .flat_map(|&q| {
                    nfa.adj[q]
                        .iter()
                        .filter(move |&&(a, _)| a == digit)
                        .map(|&(_, r)| r)
                })
                .collect();
            if !next.is_empty() && !seen.contains(&next) {
                if seen.len() >= cap {
                    return false;
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    true
}

/// Minimal DFA of a system, or None when the intermediate automata would be
/// too large for a test.
pub fn tame_minimal(system: &IfsSystem, state_cap: usize, subset_cap: usize) -> Option<DigitDfa> {
    let t = build(system).expect("transducer");
    if t.states.len() > state_cap {
        return None;
    }
    let nfa = to_nfa(&t);
    if !determinization_fits(&nfa, subset_cap) {
        return None;
    }
    Some(minimize(&determinize(&nfa)).expect("minimize"))
}

/// Random valid system: p in {2,3,5,7}, up to `max_maps` maps, scale
/// exponent <= 2, mixed signs, offsets num/den with |num| <= num_bound and
/// den <= den_bound chosen coprime to p.
pub fn random_system<R: Rng>(
    rng: &mut R,
    max_maps: usize,
    num_bound: i64,
    den_bound: i64,
) -> IfsSystem {
    let primes = [2u32, 3, 5, 7];
    loop {
        let p = primes[rng.gen_range(0..primes.len())];
        let n = rng.gen_range(1..=max_maps);
        let maps = (0..n)
            .map(|_| {
                let b = rng.gen_range(0..=1u8);
                let k = rng.gen_range(1..=2u32);
                let num = rng.gen_range(-num_bound..=num_bound);
                let den = loop {
                    let c = rng.gen_range(1..=den_bound);
                    if c % (p as i64) != 0 {
                        break c;
                    }
                };
                map(b, k, ratio(num, den))
            })
            .collect();
        let system = IfsSystem::new(p, maps);
        if system.validate().is_ok() {
            return system;
        }
    }
}
