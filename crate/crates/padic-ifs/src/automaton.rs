//! Digit automata recognizing attractor expansions.
//!
//! The transducer's output side induces a nondeterministic automaton over the
//! digit alphabet {0, ..., p-1}: multi-digit outputs become chains through
//! fresh interior states, and the map identity is forgotten. Every state is
//! accepting; the recognized objects are the infinite digit strings that can
//! be read forever, and the finite prefixes thereof.
//!
//! Determinization is the usual subset construction, tracking the subset as
//! provenance. Minimization works on partial transition tables: a missing
//! digit is an implicit dead state, states are pruned when they cannot read
//! any digit at all, and partition refinement merges states with identical
//! forward behavior. Class decomposition finds the strongly connected
//! components and flags the essential ones, from which no edge escapes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::map_label;
use crate::transducer::Transducer;

/// Nondeterministic digit automaton. Every state is accepting.
#[derive(Debug, Clone)]
pub struct DigitNfa {
    /// Digit alphabet size.
    pub p: u32,
    /// Human-readable state labels.
    pub labels: Vec<String>,
    /// True for chain states introduced for multi-digit outputs; such states
    /// have exactly one incoming and one outgoing edge.
    pub interior: Vec<bool>,
    /// Start state.
    pub initial: usize,
    /// Outgoing edges per state, sorted (digit, target), duplicates removed.
    pub adj: Vec<Vec<(u32, usize)>>,
}

impl DigitNfa {
    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|row| row.len()).sum()
    }

    /// Checks digit ranges, index ranges, and interior degree constraints.
    pub fn validate(&self) -> Result<()> {
        let n = self.state_count();
        if self.interior.len() != n || self.adj.len() != n {
            return Err(Error::BadAutomaton {
                reason: "state table lengths disagree".into(),
            });
        }
        if self.initial >= n {
            return Err(Error::BadAutomaton {
                reason: format!("initial state {} out of range", self.initial),
            });
        }
        let mut in_degree = vec![0usize; n];
        for (q, row) in self.adj.iter().enumerate() {
            for &(digit, target) in row {
                if digit >= self.p {
                    return Err(Error::BadDigit { digit, p: self.p });
                }
                if target >= n {
                    return Err(Error::BadAutomaton {
                        reason: format!("edge from {q} targets missing state {target}"),
                    });
                }
                in_degree[target] += 1;
            }
        }
        for (q, degree) in in_degree.iter().enumerate() {
            if self.interior[q] && (*degree != 1 || self.adj[q].len() != 1) {
                return Err(Error::BadAutomaton {
                    reason: format!("interior state {q} must have in- and out-degree 1"),
                });
            }
        }
        Ok(())
    }

    /// All digit strings of length exactly `n` readable from the start state.
    pub fn language_prefixes(&self, n: usize) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        let start: BTreeSet<usize> = [self.initial].into();
        let mut prefix = Vec::with_capacity(n);
        self.collect_prefixes(&start, n, &mut prefix, &mut out);
        out
    }

    fn collect_prefixes(
        &self,
        states: &BTreeSet<usize>,
        remaining: usize,
        prefix: &mut Vec<u32>,
        out: &mut BTreeSet<Vec<u32>>,
    ) {
        if remaining == 0 {
            out.insert(prefix.clone());
            return;
        }
        for digit in 0..self.p {
            let successors: BTreeSet<usize> = states
                .iter()
                .flat_map(|&q| {
                    self.adj[q]
                        .iter()
                        .filter(move |&&(d, _)| d == digit)
                        .map(|&(_, t)| t)
                })
                .collect();
            if successors.is_empty() {
                continue;
            }
            prefix.push(digit);
            self.collect_prefixes(&successors, remaining - 1, prefix, out);
            prefix.pop();
        }
    }
}

/// Drops the input side of a transducer and expands multi-digit outputs into
/// chains of interior states. Carry states keep their indices; interior
/// states are appended behind them.
pub fn to_nfa(t: &Transducer) -> DigitNfa {
    let n = t.states.len();
    let mut labels: Vec<String> = t.states.iter().map(|s| s.to_string()).collect();
    let mut interior = vec![false; n];
    let mut adj: Vec<BTreeSet<(u32, usize)>> = vec![BTreeSet::new(); n];
    for (q, row) in t.edges.iter().enumerate() {
        for (map, edge) in row.iter().enumerate() {
            let mut from = q;
            for (step, &digit) in edge.output.iter().enumerate() {
                let last = step + 1 == edge.output.len();
                let target = if last {
                    edge.target
                } else {
                    labels.push(format!("{}~{}{}", labels[q], map_label(map), step + 1));
                    interior.push(true);
                    adj.push(BTreeSet::new());
                    labels.len() - 1
                };
                adj[from].insert((digit, target));
                from = target;
            }
        }
    }
    DigitNfa {
        p: t.system.p,
        labels,
        interior,
        initial: 0,
        adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// Deterministic digit automaton with partial transitions. Every state is
/// accepting; a state that can read no digit at all never occurs (such states
/// are pruned during minimization, and subset construction never creates
/// empty subsets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitDfa {
    /// Digit alphabet size.
    pub p: u32,
    /// Labels of the automaton the provenance sets refer to.
    pub source_labels: Vec<String>,
    /// For each state, the nonempty set of source-automaton states it stands
    /// for.
    pub provenance: Vec<BTreeSet<usize>>,
    /// Start state.
    pub initial: usize,
    /// trans[state][digit], None where no attractor expansion continues.
    pub trans: Vec<Vec<Option<usize>>>,
}

impl DigitDfa {
    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    /// Number of present transitions.
    pub fn edge_count(&self) -> usize {
        self.trans
            .iter()
            .map(|row| row.iter().filter(|t| t.is_some()).count())
            .sum()
    }

    /// Successor under one digit.
    pub fn step(&self, state: usize, digit: u32) -> Option<usize> {
        self.trans[state][digit as usize]
    }

    /// Runs a digit string from the start state.
    pub fn walk(&self, digits: &[u32]) -> Option<usize> {
        let mut q = self.initial;
        for &d in digits {
            q = self.step(q, d)?;
        }
        Some(q)
    }

    /// Digits readable from a state, ascending.
    pub fn digits_from(&self, state: usize) -> Vec<u32> {
        (0..self.p)
            .filter(|&d| self.step(state, d).is_some())
            .collect()
    }

    /// Display label of a state, built from its provenance set.
    pub fn label(&self, state: usize) -> String {
        let members = self.provenance[state]
            .iter()
            .map(|&s| self.source_labels[s].clone())
            .collect::<Vec<_>>()
            .join("; ");
        format!("{{{members}}}")
    }

    /// All digit strings of length exactly `n` readable from the start state.
    pub fn language_prefixes(&self, n: usize) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        let mut prefix = Vec::with_capacity(n);
        self.collect_prefixes(self.initial, n, &mut prefix, &mut out);
        out
    }

    fn collect_prefixes(
        &self,
        state: usize,
        remaining: usize,
        prefix: &mut Vec<u32>,
        out: &mut BTreeSet<Vec<u32>>,
    ) {
        if remaining == 0 {
            out.insert(prefix.clone());
            return;
        }
        for digit in 0..self.p {
            if let Some(next) = self.step(state, digit) {
                prefix.push(digit);
                self.collect_prefixes(next, remaining - 1, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Shortest digit string from the start state to `state` (breadth-first,
    /// lowest digits first), or None if unreachable.
    pub fn access_word(&self, state: usize) -> Option<Vec<u32>> {
        let mut prev: Vec<Option<(usize, u32)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            if q == state {
                let mut word = Vec::new();
                let mut at = q;
                while let Some((from, digit)) = prev[at] {
                    word.push(digit);
                    at = from;
                }
                word.reverse();
                return Some(word);
            }
            for digit in 0..self.p {
                if let Some(next) = self.step(q, digit) {
                    if !seen[next] {
                        seen[next] = true;
                        prev[next] = Some((q, digit));
                        queue.push_back(next);
                    }
                }
            }
        }
        None
    }
}

/// Subset construction from an explicit start set. States are numbered in
/// breadth-first discovery order, digits ascending.
pub fn determinize_from_set(nfa: &DigitNfa, start: &BTreeSet<usize>) -> DigitDfa {
    assert!(!start.is_empty(), "start set must be nonempty");
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut provenance: Vec<BTreeSet<usize>> = Vec::new();
    let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
    index.insert(start.clone(), 0);
    provenance.push(start.clone());
    let mut head = 0;
    while head < provenance.len() {
        let current = provenance[head].clone();
        let mut row = Vec::with_capacity(nfa.p as usize);
        for digit in 0..nfa.p {
            let successors: BTreeSet<usize> = current
                .iter()
                .flat_map(|&q| {
                    nfa.adj[q]
                        .iter()
                        .filter(move |&&(d, _)| d == digit)
                        .map(|&(_, t)| t)
                })
                .collect();
            if successors.is_empty() {
                row.push(None);
                continue;
            }
            let next = provenance.len();
            let target = *index.entry(successors.clone()).or_insert_with(|| {
                provenance.push(successors);
                next
            });
            row.push(Some(target));
        }
        trans.push(row);
        head += 1;
    }
    DigitDfa {
        p: nfa.p,
        source_labels: nfa.labels.clone(),
        provenance,
        initial: 0,
        trans,
    }
}

/// Subset construction from the automaton's own start state.
pub fn determinize(nfa: &DigitNfa) -> DigitDfa {
    determinize_from_set(nfa, &[nfa.initial].into())
}

/// Minimizes a partial deterministic automaton.
///
/// First prunes states that cannot read any digit (iterating, since pruning
/// may strand predecessors), then refines the partition {live states, dead
/// state} until transition targets are blockwise consistent, and finally
/// rebuilds the quotient with provenance sets merged by union and states
/// renumbered breadth-first. Fails with [`Error::EmptyLanguage`] when the
/// start state itself is pruned.
pub fn minimize(dfa: &DigitDfa) -> Result<DigitDfa> {
    let n = dfa.state_count();
    let digits = dfa.p as usize;

    // Prune states with no outgoing edge into the surviving set.
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for q in 0..n {
            if alive[q]
                && !dfa.trans[q]
                    .iter()
                    .any(|t| matches!(t, Some(r) if alive[*r]))
            {
                alive[q] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !alive[dfa.initial] {
        return Err(Error::EmptyLanguage);
    }
    let live: Vec<usize> = (0..n).filter(|&q| alive[q]).collect();
    let live_pos: BTreeMap<usize, usize> = live.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let m = live.len();
    let dead = m;
    // Total transition function over live states plus a dead sentinel.
    let total: Vec<Vec<usize>> = live
        .iter()
        .map(|&q| {
            (0..digits)
                .map(|a| match dfa.trans[q][a] {
                    Some(r) if alive[r] => live_pos[&r],
                    _ => dead,
                })
                .collect()
        })
        .collect();

    // Partition refinement to the coarsest stable partition.
    let mut block_of: Vec<usize> = (0..=m).map(|q| usize::from(q == dead)).collect();
    let mut block_count = 2;
    loop {
        let mut next_id: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut next: Vec<usize> = Vec::with_capacity(m + 1);
        for q in 0..=m {
            let signature: Vec<usize> = if q == dead {
                vec![block_count; digits]
            } else {
                (0..digits).map(|a| block_of[total[q][a]]).collect()
            };
            let key = (block_of[q], signature);
            let fresh = next_id.len();
            next.push(*next_id.entry(key).or_insert(fresh));
        }
        let count = next_id.len();
        block_of = next;
        if count == block_count {
            break;
        }
        block_count = count;
    }

    // Quotient automaton over the blocks of live states.
    let dead_block = block_of[dead];
    let mut merged_prov: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (pos, &q) in live.iter().enumerate() {
        merged_prov
            .entry(block_of[pos])
            .or_default()
            .extend(dfa.provenance[q].iter().copied());
    }
    let block_trans = |b: usize| -> Vec<Option<usize>> {
        let representative = (0..m).find(|&q| block_of[q] == b).expect("nonempty block");
        (0..digits)
            .map(|a| {
                let t = block_of[total[representative][a]];
                (t != dead_block).then_some(t)
            })
            .collect()
    };

    // Renumber blocks breadth-first from the start block.
    let start_block = block_of[live_pos[&dfa.initial]];
    let mut order: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([start_block]);
    order.insert(start_block, 0);
    let mut provenance = vec![merged_prov[&start_block].clone()];
    let mut rows: Vec<Vec<Option<usize>>> = vec![Vec::new()];
    while let Some(b) = queue.pop_front() {
        let row = block_trans(b);
        for target in row.iter().flatten() {
            if !order.contains_key(target) {
                let id = order.len();
                order.insert(*target, id);
                provenance.push(merged_prov[target].clone());
                rows.push(Vec::new());
                queue.push_back(*target);
            }
        }
        rows[order[&b]] = row.iter().map(|t| t.map(|x| order[&x])).collect();
    }
    Ok(DigitDfa {
        p: dfa.p,
        source_labels: dfa.source_labels.clone(),
        provenance,
        initial: 0,
        trans: rows,
    })
}

/// Strongly connected components of a deterministic automaton's digit graph,
/// with loop and essential flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecomposition {
    /// Components, each sorted ascending; ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Component has at least one internal edge.
    pub is_loop_class: Vec<bool>,
    /// No edge leaves the component.
    pub is_essential: Vec<bool>,
}

impl ClassDecomposition {
    /// The essential components.
    pub fn essential_classes(&self) -> Vec<&Vec<usize>> {
        self.classes
            .iter()
            .zip(&self.is_essential)
            .filter_map(|(c, &e)| e.then_some(c))
            .collect()
    }

    /// Number of essential components.
    pub fn essential_count(&self) -> usize {
        self.is_essential.iter().filter(|&&e| e).count()
    }

    /// Index of the component containing a state.
    pub fn class_of(&self, state: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.binary_search(&state).is_ok())
            .expect("state belongs to some class")
    }
}

/// Computes the class decomposition of a deterministic automaton.
pub fn classes(dfa: &DigitDfa) -> ClassDecomposition {
    let n = dfa.state_count();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    let mut edge_set = BTreeSet::new();
    for q in 0..n {
        for t in dfa.trans[q].iter().flatten() {
            if edge_set.insert((q, *t)) {
                graph.add_edge(nodes[q], nodes[*t], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|component| {
            let mut members: Vec<usize> = component.into_iter().map(|ix| ix.index()).collect();
            members.sort_unstable();
            members
        })
        .collect();
    classes.sort_by_key(|c| c[0]);
    let is_loop_class = classes
        .iter()
        .map(|c| {
            c.iter().any(|&q| {
                dfa.trans[q]
                    .iter()
                    .flatten()
                    .any(|t| c.binary_search(t).is_ok())
            })
        })
        .collect();
    let is_essential = classes
        .iter()
        .map(|c| {
            c.iter().all(|&q| {
                dfa.trans[q]
                    .iter()
                    .flatten()
                    .all(|t| c.binary_search(t).is_ok())
            })
        })
        .collect();
    ClassDecomposition {
        classes,
        is_loop_class,
        is_essential,
    }
}

/// Enforces the unique-essential-class property for automata that came from a
/// system; hand-built automata are exempt and merely report their classes.
pub fn assert_unique_essential(
    decomposition: &ClassDecomposition,
    from_self_similar: bool,
) -> Result<()> {
    let count = decomposition.essential_count();
    if from_self_similar && count != 1 {
        return Err(Error::UniquenessViolated {
            essential_count: count,
        });
    }
    Ok(())
}

/// Tests whether the recognized set has full dimension. On a minimized
/// automaton this holds exactly when some state carries a self-loop on every
/// digit; the witness is that state together with a shortest access word.
pub fn is_full_dimension(dfa: &DigitDfa) -> Option<(usize, Vec<u32>)> {
    for q in 0..dfa.state_count() {
        if (0..dfa.p).all(|d| dfa.step(q, d) == Some(q)) {
            let word = dfa.access_word(q)?;
            return Some((q, word));
        }
    }
    None
}

/// Serialized automaton interchange format: states by label, edges as
/// (from, digit, to) triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomatonFile {
    /// Digit alphabet size.
    pub p: u32,
    /// State labels; indices are positions in this list.
    pub states: Vec<String>,
    /// Start state index.
    pub initial: usize,
    /// Edge triples (from, digit, to).
    pub edges: Vec<(usize, u32, usize)>,
}

impl AutomatonFile {
    /// Builds the nondeterministic automaton this file describes.
    pub fn into_nfa(self) -> Result<DigitNfa> {
        let n = self.states.len();
        let mut adj: Vec<BTreeSet<(u32, usize)>> = vec![BTreeSet::new(); n];
        for &(from, digit, to) in &self.edges {
            if from >= n || to >= n {
                return Err(Error::BadAutomaton {
                    reason: format!("edge ({from}, {digit}, {to}) leaves the state range"),
                });
            }
            adj[from].insert((digit, to));
        }
        let nfa = DigitNfa {
            p: self.p,
            labels: self.states,
            interior: vec![false; n],
            initial: self.initial,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        };
        nfa.validate()?;
        Ok(nfa)
    }

    /// Snapshot of a nondeterministic automaton.
    pub fn from_nfa(nfa: &DigitNfa) -> Self {
        AutomatonFile {
            p: nfa.p,
            states: nfa.labels.clone(),
            initial: nfa.initial,
            edges: nfa
                .adj
                .iter()
                .enumerate()
                .flat_map(|(q, row)| row.iter().map(move |&(d, t)| (q, d, t)))
                .collect(),
        }
    }

    /// Snapshot of a deterministic automaton, using provenance labels.
    pub fn from_dfa(dfa: &DigitDfa) -> Self {
        AutomatonFile {
            p: dfa.p,
            states: (0..dfa.state_count()).map(|q| dfa.label(q)).collect(),
            initial: dfa.initial,
            edges: (0..dfa.state_count())
                .flat_map(|q| {
                    dfa.trans[q]
                        .iter()
                        .enumerate()
                        .filter_map(move |(a, t)| t.map(|target| (q, a as u32, target)))
                })
                .collect(),
        }
    }
}
