//! Automata and dimension theory for p-adic iterated function systems.
//!
//! A system is a finite family of affine maps F_i(x) = (-1)^{b_i} p^{k_i} x + d_i
//! acting on the p-adic integers, with offsets d_i that are rationals inside Z_p.
//! Its attractor is the set of limits of F_{a_1} o F_{a_2} o ... applied to 0,
//! equivalently the values of the address series
//!
//! x(a) = sum_j (-1)^{b_{a_1}+...+b_{a_{j-1}}} p^{k_{a_1}+...+k_{a_{j-1}}} d_{a_j}.
//!
//! The crate builds, from such a system:
//!
//! * a finite digit-rewriting transducer that maps address words to p-adic
//!   digit strings by tracking a bounded rational carry ([`transducer`]),
//! * nondeterministic and deterministic automata recognizing exactly the digit
//!   expansions of attractor points ([`automaton`]),
//! * the Hausdorff dimension of the attractor from the spectral radius of the
//!   automaton's transition counts, numerically and with exact rational
//!   certificates ([`spectral`]),
//! * digit decimations x -> coefficients at positions j, j+k, j+2k, ... of
//!   attractor expansions ([`decimation`]),
//! * self-similar measures with matrix-product cylinder masses and local
//!   dimensions ([`measure`]),
//! * a brute-force enumeration oracle used to cross-check all of the above
//!   ([`oracle`]).
//!
//! All combinatorial arithmetic is exact over arbitrary-precision rationals;
//! floating point appears only where irrational quantities (spectral radii,
//! dimensions) are reported.

pub mod automaton;
pub mod decimation;
pub mod dot;
pub mod error;
pub mod ifs;
pub mod measure;
pub mod oracle;
pub mod padic;
pub mod spectral;
pub mod transducer;

pub use error::{Error, Result};

/// Exact rational scalar used throughout the crate. Always stored reduced,
/// with a positive denominator; integers display without a denominator.
pub type Rational = num::BigRational;

/// Convenience constructor for small rationals.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

pub use automaton::{ClassDecomposition, DigitDfa, DigitNfa};
pub use decimation::DecimationSpec;
pub use ifs::{Contraction, IfsSystem};
pub use measure::{MeasureSystem, PadicPoint};
pub use padic::{PadicExpansion, Valuation};
pub use spectral::CountMatrix;
pub use transducer::{CarryState, Transducer};
