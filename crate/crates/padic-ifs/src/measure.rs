//! Self-similar measures on the attractor and their local dimensions.
//!
//! For a system whose maps all have the form x -> p*x + d with probability
//! weights p_i, the image measure of the Bernoulli measure on address space
//! satisfies an exact transfer recursion over the digit automaton: the mass
//! of a digit cylinder is a product of nonnegative rational matrices, one per
//! digit read, indexed by the carries that realize the digits. Local
//! dimensions at eventually periodic points reduce to spectral radii of the
//! cycle products.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num::{One, Signed, ToPrimitive, Zero};

use crate::automaton::{classes, determinize, minimize, to_nfa, ClassDecomposition, DigitDfa};
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::padic::{expand, PadicExpansion};
use crate::transducer::{build, Transducer};
use crate::Rational;

/// Dense matrix of nonnegative rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = RationalMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other.data[k][j].is_zero() {
                        let term = &self.data[i][k] * &other.data[k][j];
                        out.data[i][j] += term;
                    }
                }
            }
        }
        out
    }

    pub fn sum(&self) -> Rational {
        let mut total = Rational::zero();
        for row in &self.data {
            for x in row {
                total += x;
            }
        }
        total
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.data
            .iter()
            .all(|row| row.iter().all(|x| x.is_positive()))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.data
            .iter()
            .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
            .collect()
    }
}

/// A point of the p-adic integers, given directly or by its digit expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum PadicPoint {
    Value(Rational),
    Digits(PadicExpansion),
}

impl PadicPoint {
    /// Resolves the point to an eventually periodic digit expansion.
    pub fn to_expansion(&self, p: u32) -> Result<PadicExpansion> {
        match self {
            PadicPoint::Value(x) => expand(x, p),
            PadicPoint::Digits(e) => {
                if e.period.is_empty() {
                    return Err(Error::BadPoint {
                        reason: "period part must be nonempty".into(),
                    });
                }
                for &digit in e.preperiod.iter().chain(e.period.iter()) {
                    if digit >= p {
                        return Err(Error::BadDigit { digit, p });
                    }
                }
                Ok(e.clone())
            }
        }
    }
}

impl FromStr for PadicPoint {
    type Err = Error;

    /// Accepts a rational like `-3/2`, or digit lists `pre;period` like
    /// `1,0;2` (preperiod may be empty: `;2,0`).
    fn from_str(s: &str) -> Result<PadicPoint> {
        let s = s.trim();
        if let Some((pre, per)) = s.split_once(';') {
            let parse_list = |part: &str| -> Result<Vec<u32>> {
                if part.trim().is_empty() {
                    return Ok(Vec::new());
                }
                part.split(',')
                    .map(|tok| {
                        tok.trim().parse::<u32>().map_err(|_| Error::BadPoint {
                            reason: format!("bad digit {tok:?}"),
                        })
                    })
                    .collect()
            };
            let expansion = PadicExpansion {
                preperiod: parse_list(pre)?,
                period: parse_list(per)?,
            };
            if expansion.period.is_empty() {
                return Err(Error::BadPoint {
                    reason: "period part must be nonempty".into(),
                });
            }
            Ok(PadicPoint::Digits(expansion))
        } else {
            let value = Rational::from_str(s).map_err(|_| Error::BadPoint {
                reason: format!("bad rational {s:?}"),
            })?;
            Ok(PadicPoint::Value(value))
        }
    }
}

/// The transfer data of a self-similar measure over the minimal digit
/// automaton: per (state, digit), a rational matrix indexed by the carries
/// that the automaton state stands for.
#[derive(Debug, Clone)]
pub struct MeasureSystem {
    pub system: IfsSystem,
    pub transducer: Transducer,
    pub dfa: DigitDfa,
    pub decomposition: ClassDecomposition,
    /// Per automaton state, the sorted carry indices it stands for.
    pub carries: Vec<Vec<usize>>,
    /// Transfer matrix for each automaton edge.
    pub matrices: BTreeMap<(usize, u32), RationalMatrix>,
    /// Row vector over `carries[dfa.initial]`: unit mass on the zero carry.
    pub initial_row: RationalMatrix,
}

/// Builds the transfer data. Requires every map to have the shape
/// x -> p*x + d and a full probability vector on the system.
pub fn build_measure(system: &IfsSystem) -> Result<MeasureSystem> {
    system.validate()?;
    for (index, map) in system.maps.iter().enumerate() {
        if map.k != 1 || map.b != 0 {
            return Err(Error::NotEquicontractive { index });
        }
    }
    let probs = system
        .probs
        .clone()
        .ok_or(Error::MissingProbabilities)?;

    let transducer = build(system)?;
    let nfa = to_nfa(&transducer);
    debug_assert!(
        nfa.interior.iter().all(|&i| !i),
        "one-digit outputs leave no interior states"
    );
    let dfa = minimize(&determinize(&nfa))?;
    let decomposition = classes(&dfa);

    let carries: Vec<Vec<usize>> = dfa
        .provenance
        .iter()
        .map(|set| set.iter().copied().collect())
        .collect();

    let mut matrices = BTreeMap::new();
    for q in 0..dfa.state_count() {
        for digit in 0..system.p {
            let Some(r) = dfa.step(q, digit) else {
                continue;
            };
            let mut t = RationalMatrix::zero(carries[q].len(), carries[r].len());
            for (i, &carry) in carries[q].iter().enumerate() {
                for (m, edge) in transducer.edges[carry].iter().enumerate() {
                    if edge.output == [digit] {
                        let j = carries[r]
                            .binary_search(&edge.target)
                            .expect("digit successors stay inside the target state");
                        t.data[i][j] += &probs[m];
                    }
                }
            }
            matrices.insert((q, digit), t);
        }
    }

    // The transducer starts at carry zero, which its builder indexes 0.
    let mut initial_row = RationalMatrix::zero(1, carries[dfa.initial].len());
    let zero_carry = carries[dfa.initial]
        .binary_search(&0)
        .expect("zero carry belongs to the initial state");
    initial_row.data[0][zero_carry] = Rational::one();

    Ok(MeasureSystem {
        system: system.clone(),
        transducer,
        dfa,
        decomposition,
        carries,
        matrices,
        initial_row,
    })
}

impl MeasureSystem {
    /// Exact mass of the digit cylinder: measure of the set of points whose
    /// expansion starts with `digits`.
    pub fn cylinder_measure(&self, digits: &[u32]) -> Result<Rational> {
        let p = self.system.p;
        for &digit in digits {
            if digit >= p {
                return Err(Error::BadDigit { digit, p });
            }
        }
        let mut q = self.dfa.initial;
        let mut row = self.initial_row.clone();
        for &digit in digits {
            let Some(r) = self.dfa.step(q, digit) else {
                return Ok(Rational::zero());
            };
            row = row.mul(&self.matrices[&(q, digit)]);
            q = r;
        }
        Ok(row.sum())
    }

    /// Every carry of every state can emit some digit with positive weight.
    /// Holds automatically for transfer data built from a system; recorded
    /// as a check because the spectrum computation relies on it.
    pub fn positive_row_check(&self) -> Result<()> {
        for (q, state_carries) in self.carries.iter().enumerate() {
            for i in 0..state_carries.len() {
                let alive = (0..self.system.p).any(|digit| {
                    self.matrices
                        .get(&(q, digit))
                        .map(|t| t.data[i].iter().any(|x| !x.is_zero()))
                        .unwrap_or(false)
                });
                if !alive {
                    return Err(Error::PositiveRowViolated {
                        state: q,
                        carry_index: i,
                    });
                }
            }
        }
        Ok(())
    }

    fn walk_row(
        &self,
        mut q: usize,
        row: &RationalMatrix,
        digits: &[u32],
        consumed_before: usize,
    ) -> Result<(usize, RationalMatrix)> {
        let mut row = row.clone();
        for (offset, &digit) in digits.iter().enumerate() {
            let Some(r) = self.dfa.step(q, digit) else {
                return Err(Error::NotInSupport {
                    consumed: consumed_before + offset,
                });
            };
            row = row.mul(&self.matrices[&(q, digit)]);
            q = r;
        }
        Ok((q, row))
    }

    fn cycle_product(&self, start: usize, digits: &[u32], copies: usize) -> RationalMatrix {
        let mut q = start;
        let mut product: Option<RationalMatrix> = None;
        for _ in 0..copies {
            for &digit in digits {
                let t = &self.matrices[&(q, digit)];
                product = Some(match product {
                    None => t.clone(),
                    Some(acc) => acc.mul(t),
                });
                q = self.dfa.step(q, digit).expect("walk verified in support");
            }
        }
        debug_assert_eq!(q, start);
        product.expect("cycle has at least one digit")
    }

    /// Local dimension of the measure at an eventually periodic point of the
    /// attractor. Exact when some power of the cycle product is strictly
    /// positive (checked up to the primitivity bound (m-1)^2 + 1); otherwise
    /// numeric bounds from a long mass sequence.
    pub fn local_dimension(&self, point: &PadicPoint) -> Result<LocalDimensionReport> {
        let p = self.system.p;
        let expansion = point.to_expansion(p)?;
        let (q0, row0) = self.walk_row(
            self.dfa.initial,
            &self.initial_row,
            &expansion.preperiod,
            0,
        )?;

        // States at period boundaries repeat within state_count steps.
        let mut seen = BTreeMap::new();
        let mut boundary_states = vec![q0];
        let mut rows = vec![row0];
        seen.insert(q0, 0usize);
        let (cycle_entry, repeat) = loop {
            let q = *boundary_states.last().unwrap();
            let consumed = expansion.preperiod.len() + (rows.len() - 1) * expansion.period.len();
            let (r, row) = self.walk_row(q, rows.last().unwrap(), &expansion.period, consumed)?;
            if let Some(&first) = seen.get(&r) {
                boundary_states.push(r);
                rows.push(row);
                break (first, boundary_states.len() - 1);
            }
            seen.insert(r, boundary_states.len());
            boundary_states.push(r);
            rows.push(row);
        };
        let copies = repeat - cycle_entry;
        let cycle_digits = copies * expansion.period.len();
        let preperiod_digits = expansion.preperiod.len() + cycle_entry * expansion.period.len();
        let start = boundary_states[cycle_entry];
        let product = self.cycle_product(start, &expansion.period, copies);

        // Wielandt: a primitive m x m matrix has a strictly positive power
        // with exponent at most (m-1)^2 + 1.
        let m = product.rows;
        let bound = (m - 1) * (m - 1) + 1;
        let mut power = product.clone();
        let mut primitive = false;
        for _ in 0..bound {
            if power.is_strictly_positive() {
                primitive = true;
                break;
            }
            power = power.mul(&product);
        }

        let ln_p = f64::from(p).ln();
        if primitive {
            let rho = positive_radius(&product.to_f64(), 1e-13)?;
            let value = -rho.ln() / (cycle_digits as f64 * ln_p);
            return Ok(LocalDimensionReport {
                preperiod_digits,
                cycle_digits,
                kind: LocalDimension::Exact { rho, value },
            });
        }

        // Mass sequence along the cycle, log-rescaled to avoid underflow.
        let entry_row = &rows[cycle_entry];
        let cycle = product.to_f64();
        let mut v: Vec<f64> = entry_row.to_f64().remove(0);
        let total: f64 = v.iter().sum();
        let mut log_mass = total.ln();
        for x in &mut v {
            *x /= total;
        }
        let steps = 400usize;
        let window = 50usize;
        let mut tail = Vec::new();
        for n in 1..=steps {
            let mut w = vec![0.0; cycle[0].len()];
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0.0 {
                    for (j, wj) in w.iter_mut().enumerate() {
                        *wj += vi * cycle[i][j];
                    }
                }
            }
            let total: f64 = w.iter().sum();
            debug_assert!(total > 0.0, "cylinders along a recognized walk have mass");
            log_mass += total.ln();
            for x in &mut w {
                *x /= total;
            }
            v = w;
            let depth = (preperiod_digits + n * cycle_digits) as f64;
            let d = -log_mass / (depth * ln_p);
            if n > steps - window {
                tail.push(d);
            }
        }
        let lower = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(LocalDimensionReport {
            preperiod_digits,
            cycle_digits,
            kind: LocalDimension::Bounds { lower, upper },
        })
    }

    /// Samples the local dimensions attained at periodic points whose digit
    /// cycles stay inside essential classes, up to cycles of `max_len`
    /// digits. Cycles are deduplicated up to rotation and repetition, and
    /// only cycles with strictly positive transfer product are kept, so
    /// every sampled value is an exact local dimension.
    pub fn periodic_spectrum(&self, max_len: u32) -> Result<SpectrumReport> {
        self.positive_row_check()?;
        let mut seen: BTreeSet<Vec<(u32, usize)>> = BTreeSet::new();
        let mut samples = Vec::new();
        let ln_p = f64::from(self.system.p).ln();
        for (class_index, class) in self.decomposition.classes.iter().enumerate() {
            if !self.decomposition.is_essential[class_index] {
                continue;
            }
            for &base in class {
                let mut walk: Vec<(u32, usize)> = Vec::new();
                self.spectrum_dfs(
                    base,
                    base,
                    max_len,
                    &mut walk,
                    &mut seen,
                    &mut samples,
                    ln_p,
                )?;
            }
        }
        samples.sort_by(|a, b| {
            (a.digits.len(), &a.digits, a.state).cmp(&(b.digits.len(), &b.digits, b.state))
        });
        let bounds = samples
            .iter()
            .map(|s| s.local_dim)
            .fold(None, |acc: Option<(f64, f64)>, d| match acc {
                None => Some((d, d)),
                Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
            });
        Ok(SpectrumReport { samples, bounds })
    }

    #[allow(clippy::too_many_arguments)]
    fn spectrum_dfs(
        &self,
        base: usize,
        q: usize,
        remaining: u32,
        walk: &mut Vec<(u32, usize)>,
        seen: &mut BTreeSet<Vec<(u32, usize)>>,
        samples: &mut Vec<SpectrumSample>,
        ln_p: f64,
    ) -> Result<()> {
        if !walk.is_empty() && q == base {
            let key = canonical_cycle_key(walk);
            if seen.insert(key.clone()) {
                // Rotations of one cycle share their Perron root but not
                // necessarily strict positivity of the product, so scan the
                // rotations of the primitive root for a positive one.
                let r = key.len();
                for shift in 0..r {
                    let start = key[shift].1;
                    let digits: Vec<u32> =
                        (0..r).map(|t| key[(shift + t) % r].0).collect();
                    let product = self.cycle_product(start, &digits, 1);
                    if product.is_strictly_positive() {
                        let rho = positive_radius(&product.to_f64(), 1e-13)?;
                        let local_dim = -rho.ln() / (digits.len() as f64 * ln_p);
                        samples.push(SpectrumSample {
                            state: start,
                            digits,
                            rho,
                            local_dim,
                        });
                        break;
                    }
                }
            }
        }
        if remaining == 0 {
            return Ok(());
        }
        for digit in 0..self.system.p {
            if let Some(r) = self.dfa.step(q, digit) {
                walk.push((digit, q));
                self.spectrum_dfs(base, r, remaining - 1, walk, seen, samples, ln_p)?;
                walk.pop();
            }
        }
        Ok(())
    }
}

/// Cycle key invariant under rotation and under repetition of a shorter
/// cycle, so each periodic point is sampled once.
fn canonical_cycle_key(walk: &[(u32, usize)]) -> Vec<(u32, usize)> {
    let c = walk.len();
    let mut root = walk.to_vec();
    for d in 1..c {
        if c.is_multiple_of(d) && (0..c).all(|t| walk[t] == walk[t % d]) {
            root = walk[..d].to_vec();
            break;
        }
    }
    let r = root.len();
    (0..r)
        .map(|shift| {
            (0..r)
                .map(|t| root[(shift + t) % r])
                .collect::<Vec<(u32, usize)>>()
        })
        .min()
        .unwrap()
}

/// Local dimension at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDimensionReport {
    /// Digits consumed before the detected transfer cycle.
    pub preperiod_digits: usize,
    /// Digits per transfer cycle.
    pub cycle_digits: usize,
    pub kind: LocalDimension,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalDimension {
    /// -log(rho)/(c log p) with rho the Perron root of the cycle product.
    Exact { rho: f64, value: f64 },
    /// Numeric bracket from the tail of the mass sequence.
    Bounds { lower: f64, upper: f64 },
}

impl LocalDimension {
    pub fn point_estimate(&self) -> f64 {
        match self {
            LocalDimension::Exact { value, .. } => *value,
            LocalDimension::Bounds { lower, upper } => 0.5 * (lower + upper),
        }
    }
}

/// One periodic point's exact local dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    /// Base automaton state of the digit cycle.
    pub state: usize,
    /// The digit cycle.
    pub digits: Vec<u32>,
    /// Perron root of the transfer product around the cycle.
    pub rho: f64,
    /// -log(rho)/(c log p).
    pub local_dim: f64,
}

/// All sampled periodic local dimensions and their range.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub samples: Vec<SpectrumSample>,
    bounds: Option<(f64, f64)>,
}

impl SpectrumReport {
    /// (min, max) sampled local dimension; None when no cycle qualified.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }
}

/// Perron root of a nonnegative matrix with no zero rows whose powers become
/// strictly positive, by power iteration with min/max ratio brackets.
fn positive_radius(mat: &[Vec<f64>], tol: f64) -> Result<f64> {
    let n = mat.len();
    assert!(n > 0);
    let mut v = vec![1.0f64; n];
    for _ in 0..crate::spectral::MAX_ITERATIONS {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            for (j, &vj) in v.iter().enumerate() {
                w[i] += mat[i][j] * vj;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let ratio = w[i] / v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi - lo <= tol * hi.max(1e-300) {
            return Ok(0.5 * (lo + hi));
        }
        let norm = w.iter().cloned().fold(0.0f64, f64::max);
        for x in &mut w {
            *x /= norm;
        }
        v = w;
    }
    Err(Error::NonConvergence {
        iterations: crate::spectral::MAX_ITERATIONS,
    })
}
