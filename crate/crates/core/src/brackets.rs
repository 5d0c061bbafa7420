//! Monotone envelope bounds for every boundary-law field and the uniqueness
//! certificate they give.
//!
//! For `θ < 1`, `F` is increasing in its first argument and decreasing in its
//! second, so iterating
//!
//! ```text
//! z1⁻ ← λF(z1⁻, z2⁺)^k    z1⁺ ← λF(z1⁺, z2⁻)^k
//! z2⁻ ← λF(z2⁻, z1⁺)^k    z2⁺ ← λF(z2⁺, z1⁻)^k
//! ```
//!
//! from `(λθ^k, λ, λθ^k, λ)` squeezes every solution between the lower and upper
//! sequences. When the limits collapse the boundary law is unique.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::recursion::log_ratio;
use crate::tisgm;

pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-12;
/// Lower seed used in the hard-core limit, where `λθ^k = 0`.
pub const HARD_CORE_SEED: f64 = 1e-300;

/// Limits `(z1⁻, z1⁺, z2⁻, z2⁺)` of the envelope iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketQuadruple {
    pub z1_lo: f64,
    pub z1_hi: f64,
    pub z2_lo: f64,
    pub z2_hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BracketQuadruple {
    pub fn as_array(&self) -> [f64; 4] {
        [self.z1_lo, self.z1_hi, self.z2_lo, self.z2_hi]
    }

    /// Whether `(z1, z2)` lies inside the envelope, with relative slack `rel`.
    pub fn contains(&self, z1: f64, z2: f64, rel: f64) -> bool {
        z1 >= self.z1_lo * (1.0 - rel)
            && z1 <= self.z1_hi * (1.0 + rel)
            && z2 >= self.z2_lo * (1.0 - rel)
            && z2 <= self.z2_hi * (1.0 + rel)
    }
}

/// One step of the envelope map on `[z1⁻, z1⁺, z2⁻, z2⁺]`, in the log domain.
pub fn envelope_step(z: [f64; 4], p: &ModelParams) -> [f64; 4] {
    let theta = p.theta();
    let kf = p.kf();
    let ll = p.ln_lambda();
    let [a, b, c, d] = z.map(f64::ln);
    [
        (ll + kf * log_ratio(a, d, theta)).exp(),
        (ll + kf * log_ratio(b, c, theta)).exp(),
        (ll + kf * log_ratio(c, b, theta)).exp(),
        (ll + kf * log_ratio(d, a, theta)).exp(),
    ]
}

/// Largest relative residual of the envelope fixed-point system.
pub fn envelope_residual(z: [f64; 4], p: &ModelParams) -> f64 {
    let image = envelope_step(z, p);
    z.iter().zip(image).map(|(a, b)| ((b - a) / a).abs()).fold(0.0, f64::max)
}

/// The sequence of envelope quadruples, starting from the a-priori seeds.
#[derive(Debug, Clone)]
pub struct EnvelopeIter {
    p: ModelParams,
    state: [f64; 4],
}

impl EnvelopeIter {
    pub fn new(p: &ModelParams) -> Result<Self> {
        if p.theta() >= 1.0 {
            return Err(Error::UnsupportedRegime(format!(
                "envelope bounds need theta < 1, got theta = {}",
                p.theta()
            )));
        }
        let lo = if p.is_hard_core() { HARD_CORE_SEED } else { p.lower_seed().max(HARD_CORE_SEED) };
        let hi = p.lambda();
        Ok(Self { p: *p, state: [lo, hi, lo, hi] })
    }

    pub fn current(&self) -> [f64; 4] {
        self.state
    }
}

impl Iterator for EnvelopeIter {
    type Item = [f64; 4];

    fn next(&mut self) -> Option<[f64; 4]> {
        self.state = envelope_step(self.state, &self.p);
        Some(self.state)
    }
}

/// Runs the envelope iteration until the largest relative change drops below `tol`.
///
/// Errors if a lower sequence decreases or an upper sequence increases beyond rounding.
pub fn iterate_bounds(p: &ModelParams, max_iter: usize, tol: f64) -> Result<BracketQuadruple> {
    let mut it = EnvelopeIter::new(p)?;
    let mut prev = it.current();
    let mut converged = false;
    let mut iterations = 0;
    const SLACK: f64 = 1e-14;
    for z in it.by_ref().take(max_iter) {
        iterations += 1;
        let monotone = z[0] >= prev[0] * (1.0 - SLACK)
            && z[2] >= prev[2] * (1.0 - SLACK)
            && z[1] <= prev[1] * (1.0 + SLACK)
            && z[3] <= prev[3] * (1.0 + SLACK);
        if !monotone {
            return Err(Error::Domain(format!("envelope iteration lost monotonicity at step {iterations}: {prev:?} -> {z:?}")));
        }
        let change = z.iter().zip(prev).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max);
        prev = z;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(BracketQuadruple {
        z1_lo: prev[0],
        z1_hi: prev[1],
        z2_lo: prev[2],
        z2_hi: prev[3],
        iterations,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    CertifiedUnique,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessCertificate {
    pub decision: Decision,
    pub bounds: BracketQuadruple,
    /// `(z1⁺ − z1⁻)/max(1, z1⁺)` at the last iterate.
    pub relative_gap: f64,
    pub note: String,
}

/// Certifies uniqueness when the converged envelope collapses to a point.
///
/// Never claims non-uniqueness: a wide envelope only means the certificate is inconclusive.
pub fn uniqueness_certificate(p: &ModelParams, tol: f64) -> Result<UniquenessCertificate> {
    let bounds = iterate_bounds(p, DEFAULT_MAX_ITER, DEFAULT_TOL)?;
    let gap1 = (bounds.z1_hi - bounds.z1_lo) / bounds.z1_hi.max(1.0);
    let gap2 = (bounds.z2_hi - bounds.z2_lo) / bounds.z2_hi.max(1.0);
    let collapsed = gap1 <= tol;
    if collapsed != (gap2 <= tol) && (gap1 - gap2).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "envelope collapsed in one coordinate only (gaps {gap1:e}, {gap2:e})"
        )));
    }
    let (decision, note) = if !bounds.converged {
        (
            Decision::Inconclusive,
            format!("no convergence within {} iterations (gap {gap1:e})", bounds.iterations),
        )
    } else if collapsed {
        (Decision::CertifiedUnique, "envelope collapsed to a single law".to_string())
    } else {
        (Decision::Inconclusive, format!("envelope gap {gap1:e} may contain several laws"))
    };
    Ok(UniquenessCertificate { decision, bounds, relative_gap: gap1, note })
}

/// All solutions `(z1⁻, z1⁺, z2⁻, z2⁺)` of the envelope system for `k = 2`.
///
/// The pairs `(z1⁻, z2⁺)` and `(z1⁺, z2⁻)` each solve the translation-invariant
/// system. In the uniqueness region this gives `(x*, x*, x*, x*)`; otherwise the
/// four combinations of the off-diagonal laws `(x₁*, x₂*)` and `(x₂*, x₁*)`.
pub fn k2_envelope_solutions(p: &ModelParams) -> Result<Vec<[f64; 4]>> {
    if p.k() != 2 {
        return Err(Error::Usage(format!("k=2 envelope enumeration called with k={}", p.k())));
    }
    if p.theta() >= 1.0 {
        return Err(Error::UnsupportedRegime("envelope system needs theta < 1".into()));
    }
    let off = tisgm::solve_offdiagonal_k2(p)?
        .into_iter()
        .filter(|l| !l.is_diagonal(crate::roots::MERGE_TOL))
        .collect::<Vec<_>>();
    let out = match off.first() {
        None => {
            let x = tisgm::solve_diagonal(p)[0].value;
            vec![[x; 4]]
        }
        Some(l) => {
            let (x1, x2) = (l.x, l.y);
            vec![[x1, x1, x2, x2], [x1, x2, x1, x2], [x2, x1, x2, x1], [x2, x2, x1, x1]]
        }
    };
    Ok(out)
}
