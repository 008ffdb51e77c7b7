//! Graphviz renderings of the transducer and the digit automata.

use std::fmt::Write as _;

use crate::automaton::{DigitDfa, DigitNfa};
use crate::ifs::map_label;
use crate::transducer::Transducer;

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn digits_csv(digits: &[u32]) -> String {
    digits
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Carry states labeled `carry,orientation`, edges labeled `map/digits`.
pub fn transducer_dot(t: &Transducer) -> String {
    let mut out = String::new();
    out.push_str("digraph transducer {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  start [shape=point];\n");
    for (q, state) in t.states.iter().enumerate() {
        let _ = writeln!(out, "  q{q} [label=\"{}\"];", escape(&state.to_string()));
    }
    out.push_str("  start -> q0;\n");
    for (q, row) in t.edges.iter().enumerate() {
        for (m, edge) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "  q{q} -> q{} [label=\"{}/{}\"];",
                edge.target,
                map_label(m),
                digits_csv(&edge.output)
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Carry states keep their labels; interior chain states render as points.
pub fn nfa_dot(a: &DigitNfa) -> String {
    let mut out = String::new();
    out.push_str("digraph nfa {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  start [shape=point];\n");
    for q in 0..a.state_count() {
        if a.interior[q] {
            let _ = writeln!(out, "  q{q} [shape=point];");
        } else {
            let _ = writeln!(out, "  q{q} [label=\"{}\"];", escape(&a.labels[q]));
        }
    }
    let _ = writeln!(out, "  start -> q{};", a.initial);
    for (q, row) in a.adj.iter().enumerate() {
        for &(digit, target) in row {
            let _ = writeln!(out, "  q{q} -> q{target} [label=\"{digit}\"];");
        }
    }
    out.push_str("}\n");
    out
}

/// States labeled by the carry sets they stand for.
pub fn dfa_dot(d: &DigitDfa) -> String {
    let mut out = String::new();
    out.push_str("digraph dfa {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  start [shape=point];\n");
    for q in 0..d.state_count() {
        let _ = writeln!(out, "  q{q} [label=\"{}\"];", escape(&d.label(q)));
    }
    let _ = writeln!(out, "  start -> q{};", d.initial);
    for q in 0..d.state_count() {
        for digit in 0..d.p {
            if let Some(r) = d.step(q, digit) {
                let _ = writeln!(out, "  q{q} -> q{r} [label=\"{digit}\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}
