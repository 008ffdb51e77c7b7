//! Spectral radius of transition-count matrices and Hausdorff dimension.
//!
//! The number of length-n digit strings the automaton accepts grows like
//! rho^n, where rho is the Perron root of the transition-count matrix; the
//! recognized set then has Hausdorff dimension log rho / log p. The Perron
//! root of a nonnegative matrix is the maximum of the Perron roots of its
//! strongly connected diagonal blocks, and on an irreducible block B the
//! shifted matrix B + I is primitive, so power iteration with the min/max
//! ratio bounds converges geometrically and brackets the root at every step.
//!
//! The exact path computes the characteristic polynomial over the rationals
//! (Faddeev-LeVerrier, all divisions exact) and certifies a rational
//! enclosure of each block's root by sign-checked bisection; the Perron root
//! of an irreducible block is a simple root, so the polynomial changes sign
//! there.

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::automaton::DigitDfa;
use crate::error::{Error, Result};
use crate::Rational;

/// Transition counts between a chosen list of automaton states.
/// `counts[i][j]` is the number of digits leading from `states[i]` to
/// `states[j]`; edges leaving the chosen set are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    /// The automaton states the rows/columns refer to, in row order.
    pub states: Vec<usize>,
    /// Row-major counts.
    pub counts: Vec<Vec<u64>>,
}

impl CountMatrix {
    /// Dimension of the (square) matrix.
    pub fn size(&self) -> usize {
        self.states.len()
    }
}

/// Transition-count matrix of the automaton restricted to `states`
/// (row/column order follows the given slice).
pub fn adjacency(dfa: &DigitDfa, states: &[usize]) -> CountMatrix {
    let position: std::collections::BTreeMap<usize, usize> =
        states.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut counts = vec![vec![0u64; states.len()]; states.len()];
    for (i, &q) in states.iter().enumerate() {
        for target in dfa.trans[q].iter().flatten() {
            if let Some(&j) = position.get(target) {
                counts[i][j] += 1;
            }
        }
    }
    CountMatrix {
        states: states.to_vec(),
        counts,
    }
}

/// Transition-count matrix over all states of the automaton.
pub fn full_adjacency(dfa: &DigitDfa) -> CountMatrix {
    adjacency(dfa, &(0..dfa.state_count()).collect::<Vec<_>>())
}

/// Strongly connected blocks of the count matrix, each as a sorted list of
/// row indices, ordered by smallest member.
fn blocks(m: &CountMatrix) -> Vec<Vec<usize>> {
    let n = m.size();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if m.counts[i][j] > 0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut result: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|component| {
            let mut ixs: Vec<usize> = component.into_iter().map(|ix| ix.index()).collect();
            ixs.sort_unstable();
            ixs
        })
        .collect();
    result.sort_by_key(|b| b[0]);
    result
}

fn submatrix(m: &CountMatrix, rows: &[usize]) -> Vec<Vec<u64>> {
    rows.iter()
        .map(|&i| rows.iter().map(|&j| m.counts[i][j]).collect())
        .collect()
}

pub(crate) const MAX_ITERATIONS: u64 = 1_000_000;

/// Perron root of one irreducible block via power iteration on block + I.
/// The min/max ratios bracket the root; iteration stops when the bracket is
/// narrower than `tol` (relative to the value).
fn block_radius(block: &[Vec<u64>], tol: f64) -> Result<f64> {
    let n = block.len();
    if n == 1 {
        return Ok(block[0][0] as f64);
    }
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| block[i][j] as f64 + f64::from(i == j))
                .collect()
        })
        .collect();
    let mut v = vec![1.0f64; n];
    for iteration in 0..MAX_ITERATIONS {
        let w: Vec<f64> = shifted
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum())
            .collect();
        let ratios: Vec<f64> = w.iter().zip(&v).map(|(wi, vi)| wi / vi).collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        if hi - lo <= tol * hi.max(1.0) {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        let scale = w.iter().cloned().fold(0.0f64, f64::max);
        v = w.into_iter().map(|x| x / scale).collect();
        let _ = iteration;
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Spectral radius of a nonnegative count matrix: the maximum Perron root
/// over its strongly connected diagonal blocks.
pub fn spectral_radius(m: &CountMatrix, tol: f64) -> Result<f64> {
    if m.size() == 0 {
        return Ok(0.0);
    }
    let mut rho = 0.0f64;
    for block in blocks(m) {
        rho = rho.max(block_radius(&submatrix(m, &block), tol)?);
    }
    Ok(rho)
}

/// Coefficients of det(xI - A), ascending degree, exact over the rationals.
/// Faddeev-LeVerrier: every division below is exact.
pub fn characteristic_polynomial(m: &CountMatrix) -> Vec<Rational> {
    let n = m.size();
    let a: Vec<Vec<Rational>> = m
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| Rational::from(BigInt::from(c)))
                .collect()
        })
        .collect();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    // m_k tracks A * (previous + c * I); the trace yields each coefficient.
    let mut current: Vec<Vec<Rational>> = a.clone();
    for step in 1..=n {
        let trace: Rational = (0..n).map(|i| current[i][i].clone()).sum();
        let c = -trace / Rational::from(BigInt::from(step as i64));
        coeffs[n - step] = c.clone();
        if step == n {
            break;
        }
        // current := A * (current + c*I)
        let mut bumped = current.clone();
        for (i, row) in bumped.iter_mut().enumerate() {
            row[i] += &c;
        }
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &a[i][k] * &bumped[k][j];
                    next[i][j] += t;
                }
            }
        }
        current = next;
    }
    coeffs
}

/// Evaluates an ascending-coefficient polynomial at a rational point.
pub fn polynomial_eval(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut value = Rational::zero();
    for c in coeffs.iter().rev() {
        value = value * x + c;
    }
    value
}

/// Converts a rational to the nearest f64.
pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().expect("rational converts to f64")
}

/// Certified rational enclosure of one block's Perron root.
fn block_radius_exact(
    m: &CountMatrix,
    block: &[usize],
    width: &Rational,
) -> Result<(Rational, Rational)> {
    let sub = submatrix(m, block);
    if block.len() == 1 {
        let c = Rational::from(BigInt::from(sub[0][0]));
        return Ok((c.clone(), c));
    }
    let poly = characteristic_polynomial(&CountMatrix {
        states: block.to_vec(),
        counts: sub.clone(),
    });
    let estimate = block_radius(&sub, 1e-9)?;
    // Find a sign-changing bracket around the numeric estimate. The root is
    // simple, poly is positive beyond it and negative just below it.
    let mut step = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    let approx = Rational::from_float(estimate).expect("finite estimate");
    let mut lo = (&approx - &step).max(Rational::zero());
    let mut hi = &approx + &step;
    for _ in 0..64 {
        if polynomial_eval(&poly, &lo).is_negative() {
            break;
        }
        if polynomial_eval(&poly, &lo).is_zero() {
            return Ok((lo.clone(), lo));
        }
        lo = (lo - &step).max(Rational::zero());
        step = &step + &step;
    }
    step = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    for _ in 0..64 {
        if polynomial_eval(&poly, &hi).is_positive() {
            break;
        }
        hi += &step;
        step = &step + &step;
    }
    debug_assert!(polynomial_eval(&poly, &lo).is_negative());
    debug_assert!(polynomial_eval(&poly, &hi).is_positive());
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / Rational::from(BigInt::from(2));
        let value = polynomial_eval(&poly, &mid);
        if value.is_zero() {
            return Ok((mid.clone(), mid));
        }
        if value.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Certified rational enclosure [lo, hi] of the spectral radius, with
/// hi - lo <= width (exact except when distinct block roots are closer than
/// the width, where the union of brackets still encloses the maximum).
pub fn spectral_radius_exact(m: &CountMatrix, width: &Rational) -> Result<(Rational, Rational)> {
    if m.size() == 0 {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let mut best: Option<(Rational, Rational)> = None;
    for block in blocks(m) {
        let (lo, hi) = block_radius_exact(m, &block, width)?;
        best = Some(match best {
            None => (lo, hi),
            Some((blo, bhi)) => (blo.max(lo), bhi.max(hi)),
        });
    }
    Ok(best.expect("at least one block"))
}

/// Spectral radius and Hausdorff dimension of the digit language.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionReport {
    /// Perron root of the transition-count matrix.
    pub rho: f64,
    /// log(rho)/log(p), clamped to 0 when rho <= 1.
    pub dimension: f64,
}

/// Dimension of log(rho)/log(p), clamped below at 0.
pub fn dimension_from_rho(rho: f64, p: u32) -> f64 {
    if rho <= 1.0 {
        0.0
    } else {
        rho.ln() / f64::from(p).ln()
    }
}

/// Numeric Hausdorff dimension of the automaton's recognized set.
pub fn hausdorff_dimension(dfa: &DigitDfa, tol: f64) -> Result<DimensionReport> {
    let rho = spectral_radius(&full_adjacency(dfa), tol)?;
    Ok(DimensionReport {
        rho,
        dimension: dimension_from_rho(rho, dfa.p),
    })
}

/// Hausdorff dimension with a certified rational enclosure of the Perron
/// root; the reported dimension uses the enclosure midpoint.
pub fn hausdorff_dimension_exact(
    dfa: &DigitDfa,
    width: &Rational,
) -> Result<(Rational, Rational, DimensionReport)> {
    let (lo, hi) = spectral_radius_exact(&full_adjacency(dfa), width)?;
    let rho = rational_to_f64(&((&lo + &hi) / Rational::from(BigInt::from(2))));
    Ok((
        lo,
        hi,
        DimensionReport {
            rho,
            dimension: dimension_from_rho(rho, dfa.p),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(counts: Vec<Vec<u64>>) -> CountMatrix {
        CountMatrix {
            states: (0..counts.len()).collect(),
            counts,
        }
    }

    #[test]
    fn golden_ratio_matrix() {
        let m = matrix(vec![vec![1, 1], vec![1, 0]]);
        let rho = spectral_radius(&m, 1e-12).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((rho - phi).abs() < 1e-10);

        let width = Rational::new(BigInt::one(), BigInt::from(10u64).pow(13));
        let (lo, hi) = spectral_radius_exact(&m, &width).unwrap();
        assert!(&hi - &lo <= width);
        assert!(rational_to_f64(&lo) <= phi && phi <= rational_to_f64(&hi));
    }

    #[test]
    fn reducible_matrices_take_the_max_over_blocks() {
        let m = matrix(vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 3]]);
        let rho = spectral_radius(&m, 1e-12).unwrap();
        assert!((rho - 3.0).abs() < 1e-12);
    }

    #[test]
    fn characteristic_polynomial_is_exact() {
        let m = matrix(vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let poly = characteristic_polynomial(&m);
        // det(xI - A) = (x-2)(x+1)(x-1) = x^3 - 2x^2 - x + 2.
        let expected: Vec<i64> = vec![2, -1, -2, 1];
        let got: Vec<Rational> = poly;
        for (c, e) in got.iter().zip(expected) {
            assert_eq!(c, &Rational::from(BigInt::from(e)));
        }
        let two = Rational::from(BigInt::from(2));
        assert!(polynomial_eval(&got, &two).is_zero());
    }

    #[test]
    fn exact_enclosure_hits_rational_roots() {
        let m = matrix(vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let width = Rational::new(BigInt::one(), BigInt::from(10u64).pow(13));
        let (lo, hi) = spectral_radius_exact(&m, &width).unwrap();
        let two = Rational::from(BigInt::from(2));
        assert!(lo <= two && two <= hi);
    }
}
