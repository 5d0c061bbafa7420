//! Splitting Gibbs measures of a three-state hard-core-like model on the Cayley tree.
//!
//! Spins take values in `{−1, 0, +1}`. Opposite spins `±1` on an edge carry weight
//! `θ = exp(Jβ)`; `θ = 0` is the hard-core constraint. Every site with spin `±1`
//! pays activity `λ`. Boundary laws `(x, y)` obey
//!
//! ```text
//! x = λ F(x, y)^k,   y = λ F(y, x)^k,   F(x, y) = (1 + x + θy)/(1 + x + y)
//! ```
//!
//! and each solution gives a translation-invariant splitting Gibbs measure.
//!
//! | module | purpose |
//! |---|---|
//! | [`params`], [`tree`], [`recursion`] | parameters and tree indexing; the edge kernel and field recursion |
//! | [`tisgm`] | translation-invariant laws and the phase classification they support |
//! | [`brackets`] | monotone envelope bounds and uniqueness certificates |
//! | [`periodic`] | 2-periodic (checkerboard) laws and their window in `λ` |
//! | [`paths`] | non-translation-invariant fields indexed by a path `t ∈ [0,1]` |
//! | [`oracle`] | exact enumeration of finite-volume measures |
//! | [`conjecture`] | exploratory scan of the off-diagonal count for `k ≥ 4` |
//! | [`sweep`], [`verify`] | parameter grids and the verification suite |
//!
//! ```
//! use wr_tree::{classify_phase, CountTag, ModelParams};
//!
//! let p = ModelParams::hard_core(2, 3.0)?;
//! let report = classify_phase(&p)?;
//! assert_eq!(report.count, CountTag::Three);
//! # Ok::<(), wr_tree::Error>(())
//! ```

pub mod brackets;
pub mod conjecture;
pub mod error;
pub mod oracle;
pub mod params;
pub mod paths;
pub mod periodic;
pub mod recursion;
pub mod roots;
pub mod sweep;
pub mod tisgm;
pub mod tree;
pub mod verify;

pub use brackets::{iterate_bounds, uniqueness_certificate, BracketQuadruple, Decision, UniquenessCertificate};
pub use error::{Error, Result};
pub use oracle::{check_compatibility, enumerate_measure, BoundaryFields, FiniteVolumeMeasure};
pub use params::{Coupling, Interaction, ModelParams};
pub use paths::{distinguish_paths, solve_path_field, PathSpec, PathSolution, Side};
pub use periodic::{periodic_window, solve_two_periodic, PeriodicWindow, TwoPeriodicReport, TwoPeriodicSolution};
pub use recursion::{log_ratio, recursion_map, BoundaryLawPair, FieldAssignment};
pub use tisgm::{classify_phase, critical_values, solve_tisgm, CountTag, CriticalValues, PhaseReport, Theorem, TisgmSolutionSet};
pub use tree::TreeIndex;
