//! Translation-invariant boundary laws with their critical curves. The phase
//! classification names the theorem that decides each region.
//!
//! A translation-invariant law is a positive pair `(x, y)` with
//! `x = λF(x,y,θ)^k` and `y = λF(y,x,θ)^k`. Diagonal laws (`x = y`) reduce to a
//! scalar equation; off-diagonal laws come in swap-pairs and exist only in the
//! ferromagnetic regime.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Interaction, ModelParams};
use crate::recursion::{log_ratio, log_ratio_gradient, BoundaryLawPair};
use crate::roots::{self, find_roots, find_roots_on_grid, GridScale, ScalarRoot, Scan};

/// Relative half-width of the band around a critical curve that counts as "on" the curve.
pub const ON_CURVE_REL_TOL: f64 = 1e-9;
/// Scan resolution for the diagonal equation.
pub const DIAGONAL_CELLS: usize = 256;
/// Default scan resolution for the general off-diagonal solver.
pub const GENERAL_CELLS: usize = 2048;
/// Every reported law satisfies the fixed-point equations to this relative residual.
pub const SOLUTION_RESIDUAL_TOL: f64 = 1e-10;

/// Which reduction produced a solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedFormK2,
    SpReductionK3,
    ScalarAntiferro,
    GeneralNumeric,
}

/// All translation-invariant boundary laws found at a parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct TisgmSolutionSet {
    /// Roots of the diagonal equation, as `x = y` values.
    pub diagonal: Vec<ScalarRoot>,
    /// One representative `(x, y)` with `x < y` per swap-pair.
    pub offdiagonal: Vec<BoundaryLawPair>,
    pub method: SolveMethod,
    /// Largest relative fixed-point residual over all listed laws.
    pub residual: f64,
}

impl TisgmSolutionSet {
    /// Number of distinct laws, counting both members of each swap-pair.
    pub fn count(&self) -> usize {
        self.diagonal.len() + 2 * self.offdiagonal.len()
    }

    pub fn diagonal_laws(&self) -> impl Iterator<Item = BoundaryLawPair> + '_ {
        self.diagonal.iter().map(|r| BoundaryLawPair::diagonal(r.value))
    }

    /// Every law, swap partners included.
    pub fn all_laws(&self) -> Vec<BoundaryLawPair> {
        let mut out: Vec<BoundaryLawPair> = self.diagonal_laws().collect();
        for l in &self.offdiagonal {
            out.push(*l);
            out.push(l.swap());
        }
        out
    }

    /// The off-diagonal pair with the widest spread, ordered `x < y`.
    pub fn extreme_pair(&self) -> Option<BoundaryLawPair> {
        self.offdiagonal
            .iter()
            .copied()
            .max_by(|a, b| (a.y / a.x).total_cmp(&(b.y / b.x)))
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ordered(x: f64, y: f64) -> BoundaryLawPair {
    if x <= y {
        BoundaryLawPair { x, y }
    } else {
        BoundaryLawPair { x: y, y: x }
    }
}

// ---------------------------------------------------------------------------
// Diagonal laws

/// Roots `x > 0` of `x = λ((1 + (1+θ)x)/(1 + 2x))^k`.
///
/// Exactly one root for `θ ≤ 1`. For `θ > 1` a tangency gives two, flagged `double`, and otherwise one or three.
pub fn solve_diagonal(p: &ModelParams) -> Vec<ScalarRoot> {
    let theta = p.theta();
    let lambda = p.lambda();
    if theta == 1.0 {
        return vec![ScalarRoot { value: lambda, double: false }];
    }
    let kf = p.kf();
    let ln_lambda = p.ln_lambda();
    let g = |x: f64| x.ln() - ln_lambda - kf * ((1.0 + theta) * x).ln_1p() + kf * (2.0 * x).ln_1p();
    // the right-hand side ranges over (λ((1+θ)/2)^k, λ)
    let other = (ln_lambda + kf * (0.5 * (1.0 + theta)).ln()).exp();
    let (lo, hi) = if other < lambda { (other, lambda) } else { (lambda, other) };
    let scan = Scan { cells: DIAGONAL_CELLS, scale: GridScale::Log, tangent_tol: ON_CURVE_REL_TOL };
    find_roots(g, lo * (1.0 - 1e-9), hi * (1.0 + 1e-9), scan)
}

/// Substituted form of the antiferromagnetic diagonal equation, `a·t = ((1+t)/(b+t))^k`
/// with `t = (1+θ)x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalSubstitution {
    pub a: f64,
    pub b: f64,
    /// `(ν₁, ν₂)` with `ν₁ < ν₂`, present when `k > 1` and `b > ((k+1)/(k−1))²`.
    pub nu: Option<(f64, f64)>,
}

impl DiagonalSubstitution {
    pub fn new(p: &ModelParams) -> Self {
        let kf = p.kf();
        let theta = p.theta();
        let a = (kf * 2f64.ln() - p.ln_lambda() - (kf + 1.0) * (1.0 + theta).ln()).exp();
        let b = 0.5 * (1.0 + theta);
        let nu = if p.k() > 1 && b > ((kf + 1.0) / (kf - 1.0)).powi(2) {
            // x² + [2 − (b−1)(k−1)]x + b = 0
            let lin = 2.0 - (b - 1.0) * (kf - 1.0);
            let disc = (lin * lin - 4.0 * b).max(0.0);
            let roots = [0.5 * (-lin - disc.sqrt()), 0.5 * (-lin + disc.sqrt())];
            let nu_of = |x: f64| ((1.0 + x) / (b + x)).powi(p.k() as i32) / x;
            let (n1, n2) = (nu_of(roots[0]), nu_of(roots[1]));
            Some((n1.min(n2), n1.max(n2)))
        } else {
            None
        };
        Self { a, b, nu }
    }

    /// Number of roots predicted by the case split on `a` against `ν₁, ν₂`.
    pub fn predicted_count(&self) -> usize {
        match self.nu {
            None => 1,
            Some((n1, n2)) => {
                if relative(self.a, n1) <= ON_CURVE_REL_TOL || relative(self.a, n2) <= ON_CURVE_REL_TOL {
                    2
                } else if self.a > n1 && self.a < n2 {
                    3
                } else {
                    1
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Off-diagonal laws

/// `g(θ, λ) = (λ(1−θ²) + (1−θ)√(λ²(1+θ)² + 4λ)) / 2`, the value of `1 + x + y`
/// on an off-diagonal law for `k = 2`.
pub fn k2_sum(theta: f64, lambda: f64) -> f64 {
    0.5 * (lambda * (1.0 - theta * theta) + (1.0 - theta) * (lambda * lambda * (1.0 + theta).powi(2) + 4.0 * lambda).sqrt())
}

/// Off-diagonal laws for `k = 2` from the closed-form sum and a quadratic in `x`.
///
/// Returns one representative `(x₁*, x₂*)` with `x₁* < x₂*`, a single degenerate
/// pair `(x*, x*)` at the tangency `λ = λ_cr(2)`, or nothing.
pub fn solve_offdiagonal_k2(p: &ModelParams) -> Result<Vec<BoundaryLawPair>> {
    if p.k() != 2 {
        return Err(Error::Usage(format!("closed-form k=2 solver called with k={}", p.k())));
    }
    let theta = p.theta();
    if theta >= 1.0 {
        return Ok(Vec::new());
    }
    let lambda = p.lambda();
    let root = (lambda * lambda * (1.0 + theta).powi(2) + 4.0 * lambda).sqrt();
    let other_branch = 0.5 * (lambda * (1.0 - theta * theta) - (1.0 - theta) * root);
    if other_branch > 0.0 {
        return Err(Error::Domain(format!(
            "the discarded branch of 1+x+y is positive ({other_branch}) at theta={theta}, lambda={lambda}"
        )));
    }
    let g = k2_sum(theta, lambda);

    if theta < 1.0 / 3.0 {
        let crit = 2.25 / (1.0 - 3.0 * theta);
        if relative(lambda, crit) <= ON_CURVE_REL_TOL {
            return Ok(vec![BoundaryLawPair::diagonal(0.5 * (g - 1.0))]);
        }
    }

    // λ(1−θ)²x² + [2λ(1−θ)(1+θ(g−1)) − g²]x + λ(1+θ(g−1))² = 0
    let c0 = 1.0 + theta * (g - 1.0);
    let qa = lambda * (1.0 - theta).powi(2);
    let qb = 2.0 * lambda * (1.0 - theta) * c0 - g * g;
    let qc = lambda * c0 * c0;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let (r1, r2) = if q != 0.0 { (q / qa, qc / q) } else { (-qb / (2.0 * qa), -qb / (2.0 * qa)) };
    let mut out = Vec::new();
    for x in [r1.min(r2), r1.max(r2)] {
        let y = g - 1.0 - x;
        if x > 0.0 && y > 0.0 && x <= y * (1.0 + roots::MERGE_TOL) {
            out.push(polish(ordered(x, y), p));
        }
    }
    Ok(out)
}

/// `η(s) = s(s³ − 2)/((1+θ)s³ − 1)`, the activity root `a` as a function of `s = u + v` for `k = 3`.
pub fn eta_k3(s: f64, theta: f64) -> f64 {
    let s3 = s * s * s;
    s * (s3 - 2.0) / ((1.0 + theta) * s3 - 1.0)
}

/// Off-diagonal laws for `k = 3` through the sum/product reduction `s = u+v`, `p = uv`
/// in `u = x^{1/3}`, `v = y^{1/3}`.
pub fn solve_offdiagonal_k3(p: &ModelParams) -> Result<Vec<BoundaryLawPair>> {
    if p.k() != 3 {
        return Err(Error::Usage(format!("sum/product k=3 solver called with k={}", p.k())));
    }
    let theta = p.theta();
    if theta >= 0.5 {
        return Ok(Vec::new());
    }
    let a = p.a();
    let s_min = (4.0 / (1.0 - 2.0 * theta)).cbrt();
    let a_min = 2.0 / 3.0 * s_min;
    let lambda_cr = 1.0 / (2.0 - 4.0 * theta) * (4.0f64 / 3.0).powi(3);
    if relative(p.lambda(), lambda_cr) <= ON_CURVE_REL_TOL {
        let u = 0.5 * s_min;
        return Ok(vec![BoundaryLawPair::diagonal(u * u * u)]);
    }
    if a < a_min {
        return Ok(Vec::new());
    }
    let mut s_hi = 2.0 * s_min;
    while eta_k3(s_hi, theta) < a {
        s_hi *= 2.0;
    }
    let s = roots::bisect(|s| eta_k3(s, theta) - a, s_min, s_hi);
    let prod = (1.0 + theta * s * s * s) / ((1.0 + 2.0 * theta) * s);
    let disc = (s * s - 4.0 * prod).max(0.0);
    let u = 0.5 * (s - disc.sqrt());
    let v = 0.5 * (s + disc.sqrt());
    Ok(vec![polish(BoundaryLawPair { x: u * u * u, y: v * v * v }, p)])
}

/// `γ(u) = a(1+θ) − u + (u − aθ)/(1 + u^k)`; off-diagonal laws are its 2-cycles.
pub fn gamma_map(u: f64, p: &ModelParams) -> f64 {
    let a = p.a();
    let theta = p.theta();
    a * (1.0 + theta) - u + (u - a * theta) / (1.0 + u.powi(p.k() as i32))
}

/// The unique fixed point `ξ ∈ (aθ, a)` of `γ`; `ξ^k` is the diagonal law.
pub fn gamma_fixed_point(p: &ModelParams) -> f64 {
    let a = p.a();
    roots::bisect(|u| gamma_map(u, p) - u, a * p.theta(), a)
}

/// Off-diagonal laws for any `k ≥ 2`, `0 ≤ θ < 1`, from the 2-cycles of `γ` on `[aθ, a]`.
///
/// `γ` is strictly decreasing there, so every 2-cycle straddles `ξ`; the scan
/// runs over `[aθ, ξ)` with `cells` linear cells plus a geometric refinement
/// towards `ξ`.
pub fn solve_offdiagonal_general(p: &ModelParams, cells: usize) -> Result<Vec<BoundaryLawPair>> {
    if p.k() < 2 {
        return Err(Error::Usage("general off-diagonal solver needs k >= 2".into()));
    }
    let theta = p.theta();
    if theta >= 1.0 {
        return Ok(Vec::new());
    }
    let a = p.a();
    let lo = a * theta;
    let xi = gamma_fixed_point(p);
    let h = |u: f64| gamma_map(gamma_map(u, p), p) - u;

    let cells = cells.max(16);
    let span = xi - lo;
    let mut xs: Vec<f64> = (0..cells).map(|i| lo + span * i as f64 / cells as f64).collect();
    let near_lo = (1e-10 * xi).ln();
    let near_hi = (span / cells as f64).ln();
    if near_hi > near_lo {
        for i in 0..=cells {
            let d = (near_lo + (near_hi - near_lo) * i as f64 / cells as f64).exp();
            xs.push(xi - d);
        }
    }
    xs.push(xi);
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let found = find_roots_on_grid(h, &xs, 1e-12 * a);
    let kf = p.kf();
    let mut out: Vec<BoundaryLawPair> = Vec::new();
    for r in found {
        let u = r.value;
        if u >= xi * (1.0 - roots::MERGE_TOL) {
            continue;
        }
        let v = gamma_map(u, p);
        let law = polish(BoundaryLawPair { x: (kf * u.ln()).exp(), y: (kf * v.ln()).exp() }, p);
        let law = ordered(law.x, law.y);
        if law.is_diagonal(roots::MERGE_TOL) || law.residual(p) > SOLUTION_RESIDUAL_TOL {
            continue;
        }
        if !out.iter().any(|o| relative(o.x, law.x) <= roots::MERGE_TOL) {
            out.push(law);
        }
    }
    Ok(out)
}

/// Damped Newton iteration on the fixed-point equations in log coordinates.
///
/// Returns the converged law, or `None` when it leaves the positive quadrant or stalls.
pub fn newton_fixed_point(start: BoundaryLawPair, p: &ModelParams, max_iter: usize) -> Option<BoundaryLawPair> {
    let theta = p.theta();
    let kf = p.kf();
    let ln_lambda = p.ln_lambda();
    let resid = |u: f64, w: f64| {
        (
            u - ln_lambda - kf * log_ratio(u, w, theta),
            w - ln_lambda - kf * log_ratio(w, u, theta),
        )
    };
    let (mut u, mut w) = start.log_fields();
    let (mut r1, mut r2) = resid(u, w);
    for _ in 0..max_iter {
        let norm = r1.abs().max(r2.abs());
        if norm < 1e-14 {
            break;
        }
        let (a1, b1) = log_ratio_gradient(u, w, theta);
        let (a2, b2) = log_ratio_gradient(w, u, theta);
        // Jacobian of (r1, r2) in (u, w)
        let j11 = 1.0 - kf * a1;
        let j12 = -kf * b1;
        let j21 = -kf * b2;
        let j22 = 1.0 - kf * a2;
        let det = j11 * j22 - j12 * j21;
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let du = (r1 * j22 - r2 * j12) / det;
        let dw = (j11 * r2 - j21 * r1) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (nu, nw) = (u - step * du, w - step * dw);
            let (n1, n2) = resid(nu, nw);
            if n1.is_finite() && n2.is_finite() && n1.abs().max(n2.abs()) < norm {
                u = nu;
                w = nw;
                r1 = n1;
                r2 = n2;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let law = BoundaryLawPair { x: u.exp(), y: w.exp() };
    (law.x > 0.0 && law.y > 0.0 && law.x.is_finite() && law.y.is_finite() && law.residual(p) <= SOLUTION_RESIDUAL_TOL)
        .then_some(law)
}

fn polish(law: BoundaryLawPair, p: &ModelParams) -> BoundaryLawPair {
    match newton_fixed_point(law, p, 8) {
        Some(better) if better.residual(p) <= law.residual(p) => better,
        _ => law,
    }
}

/// Relative residual of the off-diagonal condition
/// `(1+x+y)^k = λ(1−θ) Σ_{j=0}^{k−1} (1+x+θy)^{k−1−j}(1+θx+y)^j`, scaled by `(1+x+y)^k`.
pub fn offdiagonal_condition_residual(law: &BoundaryLawPair, p: &ModelParams) -> f64 {
    let theta = p.theta();
    let s = 1.0 + law.x + law.y;
    let fa = (1.0 + law.x + theta * law.y) / s;
    let fb = (1.0 + theta * law.x + law.y) / s;
    let k = p.k() as i32;
    let sum: f64 = (0..k).map(|j| fa.powi(k - 1 - j) * fb.powi(j)).sum();
    (1.0 - p.lambda() * (1.0 - theta) * sum / s).abs()
}

/// For `θ > 1` the right-hand side of the off-diagonal condition is negative at
/// every positive `(x, y)` while the left-hand side is positive.
pub fn offdiagonal_sign_excluded(law: &BoundaryLawPair, p: &ModelParams) -> bool {
    let theta = p.theta();
    let s = 1.0 + law.x + law.y;
    let fa = (1.0 + law.x + theta * law.y) / s;
    let fb = (1.0 + theta * law.x + law.y) / s;
    let k = p.k() as i32;
    let sum: f64 = (0..k).map(|j| fa.powi(k - 1 - j) * fb.powi(j)).sum();
    let rhs_sign = p.lambda() * (1.0 - theta) * sum;
    theta > 1.0 && rhs_sign < 0.0 && s > 0.0
}

/// Solves for every translation-invariant law at `p`.
pub fn solve_tisgm(p: &ModelParams) -> Result<TisgmSolutionSet> {
    let diagonal = solve_diagonal(p);
    let (offdiagonal, method) = match (p.interaction(), p.k()) {
        (Interaction::Antiferromagnetic, _) => (Vec::new(), SolveMethod::ScalarAntiferro),
        (_, 1) => (Vec::new(), SolveMethod::GeneralNumeric),
        (_, 2) => (solve_offdiagonal_k2(p)?, SolveMethod::ClosedFormK2),
        (_, 3) => (solve_offdiagonal_k3(p)?, SolveMethod::SpReductionK3),
        _ => (solve_offdiagonal_general(p, GENERAL_CELLS)?, SolveMethod::GeneralNumeric),
    };
    let offdiagonal: Vec<BoundaryLawPair> = offdiagonal
        .into_iter()
        .filter(|l| !l.is_diagonal(roots::MERGE_TOL))
        .collect();
    let mut set = TisgmSolutionSet { diagonal, offdiagonal, method, residual: 0.0 };
    set.residual = set.all_laws().iter().map(|l| l.residual(p)).fold(0.0, f64::max);
    Ok(set)
}

// ---------------------------------------------------------------------------
// Critical values and classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Antiferro,
    FerroK2,
    FerroK3,
    FerroKge4,
}

/// Closed-form critical values at `(k, θ)`. Fields outside the regime are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValues {
    pub k: u32,
    pub theta: f64,
    pub regime: Regime,
    /// `θ_cr = 2((k+1)/(k−1))² − 1`.
    pub theta_cr_anti: Option<f64>,
    pub lambda_cr_anti_low: Option<f64>,
    pub lambda_cr_anti_high: Option<f64>,
    /// `θ_c(k) = (k−1)/(k+1)`.
    pub theta_c: Option<f64>,
    /// `λ_cr(k) = ((k+1)/k)^k / (k − 1 − θ(k+1))`, defined for `θ < θ_c`.
    pub lambda_cr: Option<f64>,
    /// `θ'_c(k) = (k−1)/k`, only for `k ≥ 4`.
    pub theta_c_prime: Option<f64>,
    /// `λ'_cr(k) = 1/(k − 1 − kθ)`, only for `k ≥ 4` and `θ < θ'_c`.
    pub lambda_cr_prime: Option<f64>,
}

/// The two antiferromagnetic critical activities `λ_{cr,i}(k, θ)` for `θ > θ_cr`, ascending.
pub fn antiferro_critical_lambdas(k: u32, theta: f64) -> Option<(f64, f64)> {
    let kf = k as f64;
    let theta_cr = 2.0 * ((kf + 1.0) / (kf - 1.0)).powi(2) - 1.0;
    if k < 2 || theta <= theta_cr {
        return None;
    }
    // 2x² + [4 − (θ−1)(k−1)]x + θ + 1 = 0
    let lin = 4.0 - (theta - 1.0) * (kf - 1.0);
    let disc = (lin * lin - 8.0 * (theta + 1.0)).max(0.0);
    let xs = [(-lin - disc.sqrt()) / 4.0, (-lin + disc.sqrt()) / 4.0];
    let lam = |x: f64| {
        (kf * 2f64.ln() + x.ln() - (kf + 1.0) * (1.0 + theta).ln()
            + kf * ((1.0 + theta + 2.0 * x) / (2.0 * (1.0 + x))).ln())
        .exp()
    };
    let (l1, l2) = (lam(xs[0]), lam(xs[1]));
    Some((l1.min(l2), l1.max(l2)))
}

pub fn critical_values(k: u32, theta: f64) -> Result<CriticalValues> {
    if k < 2 {
        return Err(Error::Usage(format!("critical values are defined for k >= 2, got k={k}")));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("theta must be finite and non-negative, got {theta}")));
    }
    let kf = k as f64;
    let mut cv = CriticalValues {
        k,
        theta,
        regime: match k {
            2 => Regime::FerroK2,
            3 => Regime::FerroK3,
            _ => Regime::FerroKge4,
        },
        theta_cr_anti: None,
        lambda_cr_anti_low: None,
        lambda_cr_anti_high: None,
        theta_c: None,
        lambda_cr: None,
        theta_c_prime: None,
        lambda_cr_prime: None,
    };
    if theta > 1.0 {
        cv.regime = Regime::Antiferro;
        cv.theta_cr_anti = Some(2.0 * ((kf + 1.0) / (kf - 1.0)).powi(2) - 1.0);
        if let Some((lo, hi)) = antiferro_critical_lambdas(k, theta) {
            cv.lambda_cr_anti_low = Some(lo);
            cv.lambda_cr_anti_high = Some(hi);
        }
        return Ok(cv);
    }
    let theta_c = (kf - 1.0) / (kf + 1.0);
    cv.theta_c = Some(theta_c);
    if theta < theta_c {
        cv.lambda_cr = Some(((kf + 1.0) / kf).powi(k as i32) / (kf - 1.0 - theta * (kf + 1.0)));
    }
    if k >= 4 {
        let theta_cp = (kf - 1.0) / kf;
        cv.theta_c_prime = Some(theta_cp);
        if theta < theta_cp {
            cv.lambda_cr_prime = Some(1.0 / (kf - 1.0 - kf * theta));
        }
    }
    Ok(cv)
}

/// How many translation-invariant measures the deciding theorem guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountTag {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "at_least_1")]
    AtLeastOne,
    #[serde(rename = "at_least_3")]
    AtLeastThree,
}

impl CountTag {
    pub fn is_exact(self) -> bool {
        matches!(self, CountTag::One | CountTag::Two | CountTag::Three)
    }

    pub fn value(self) -> usize {
        match self {
            CountTag::One | CountTag::AtLeastOne => 1,
            CountTag::Two => 2,
            CountTag::Three | CountTag::AtLeastThree => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CountTag::One => "1",
            CountTag::Two => "2",
            CountTag::Three => "3",
            CountTag::AtLeastOne => "at_least_1",
            CountTag::AtLeastThree => "at_least_3",
        }
    }

    /// Whether `n` solutions are compatible with this tag.
    pub fn admits(self, n: usize) -> bool {
        if self.is_exact() {
            n == self.value()
        } else {
            n >= self.value()
        }
    }
}

/// The result that decides the count in a region of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Antiferromagnetic case: 1, 2 or 3 measures.
    TGt,
    /// Ferromagnetic `k = 2`: 1 or 3 measures.
    TLt,
    /// Ferromagnetic `k = 3`: 1 or exactly 3 measures.
    Tk3,
    /// `k ≥ 4`, uniqueness region.
    Tkk1,
    /// `k ≥ 4`, gap region: at least one measure.
    Tkk2,
    /// `k ≥ 4`, at least three measures.
    Tkk3,
    /// Hard-core model, `k ≥ 4`: unique up to `λ_cr(k)`, at least three above.
    #[serde(rename = "hardcore_RKh")]
    HardcoreRKh,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::TGt => "t_gt",
            Theorem::TLt => "t_lt",
            Theorem::Tk3 => "tk3",
            Theorem::Tkk1 => "tkk_1",
            Theorem::Tkk2 => "tkk_2",
            Theorem::Tkk3 => "tkk_3",
            Theorem::HardcoreRKh => "hardcore_RKh",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub params: ModelParams,
    pub count: CountTag,
    pub deciding_theorem: Theorem,
    pub critical: CriticalValues,
    pub solutions: TisgmSolutionSet,
    /// `λ` lies within [`ON_CURVE_REL_TOL`] of a critical curve.
    pub on_critical_curve: bool,
    /// The solution set is compatible with `count`.
    pub consistent: bool,
}

fn near(lambda: f64, crit: f64) -> bool {
    relative(lambda, crit) <= ON_CURVE_REL_TOL
}

/// Decides the count of translation-invariant measures from the closed-form
/// critical curves and attaches the numerically solved laws.
pub fn classify_phase(p: &ModelParams) -> Result<PhaseReport> {
    let k = p.k();
    let theta = p.theta();
    let lambda = p.lambda();
    let critical = critical_values(k, theta)?;
    let mut on_curve = false;

    let (count, theorem) = if theta > 1.0 {
        match (critical.lambda_cr_anti_low, critical.lambda_cr_anti_high) {
            (Some(lo), Some(hi)) => {
                if near(lambda, lo) || near(lambda, hi) {
                    on_curve = true;
                    (CountTag::Two, Theorem::TGt)
                } else if lambda > lo && lambda < hi {
                    (CountTag::Three, Theorem::TGt)
                } else {
                    (CountTag::One, Theorem::TGt)
                }
            }
            _ => (CountTag::One, Theorem::TGt),
        }
    } else {
        let theta_c = critical.theta_c.unwrap_or(0.0);
        let below_or_on = |crit: f64, on: &mut bool| {
            if near(lambda, crit) {
                *on = true;
            }
            lambda <= crit || near(lambda, crit)
        };
        match k {
            2 | 3 => {
                let theorem = if k == 2 { Theorem::TLt } else { Theorem::Tk3 };
                match critical.lambda_cr {
                    Some(crit) if !below_or_on(crit, &mut on_curve) => (CountTag::Three, theorem),
                    _ => (CountTag::One, theorem),
                }
            }
            _ if theta == 0.0 => {
                let crit = critical.lambda_cr.expect("lambda_cr is defined at theta = 0");
                if below_or_on(crit, &mut on_curve) {
                    (CountTag::One, Theorem::HardcoreRKh)
                } else {
                    (CountTag::AtLeastThree, Theorem::HardcoreRKh)
                }
            }
            _ => match critical.lambda_cr_prime {
                None => (CountTag::One, Theorem::Tkk1),
                Some(prime) if lambda < prime && !near(lambda, prime) => (CountTag::One, Theorem::Tkk1),
                Some(prime) => {
                    if near(lambda, prime) {
                        on_curve = true;
                    }
                    if theta >= theta_c {
                        (CountTag::AtLeastOne, Theorem::Tkk2)
                    } else {
                        let crit = critical.lambda_cr.expect("lambda_cr is defined below theta_c");
                        if below_or_on(crit, &mut on_curve) {
                            (CountTag::AtLeastOne, Theorem::Tkk2)
                        } else {
                            (CountTag::AtLeastThree, Theorem::Tkk3)
                        }
                    }
                }
            },
        }
    };

    let solutions = solve_tisgm(p)?;
    let consistent = count.admits(solutions.count());
    Ok(PhaseReport {
        params: *p,
        count,
        deciding_theorem: theorem,
        critical,
        solutions,
        on_critical_curve: on_curve,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, theta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(k, theta, lambda).unwrap()
    }

    /// Independent oracle: count sign changes of the diagonal equation on a fine grid.
    fn brute_diagonal_count(k: u32, theta: f64, lambda: f64) -> usize {
        let g = |x: f64| x - lambda * ((1.0 + (1.0 + theta) * x) / (1.0 + 2.0 * x)).powi(k as i32);
        let (lo, hi) = (lambda.min(lambda * (0.5 * (1.0 + theta)).powi(k as i32)), lambda.max(lambda * (0.5 * (1.0 + theta)).powi(k as i32)));
        let n = 200_000;
        let mut count = 0;
        let mut prev = g(lo * 0.999);
        for i in 1..=n {
            let x = (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / n as f64).exp() * if i == n { 1.001 } else { 1.0 };
            let cur = g(x);
            if (cur < 0.0) != (prev < 0.0) {
                count += 1;
            }
            prev = cur;
        }
        count
    }

    #[test]
    fn theta_one_diagonal_is_lambda() {
        for k in [1, 2, 5, 9] {
            let r = solve_diagonal(&params(k, 1.0, 3.7));
            assert_eq!(r.len(), 1);
            assert!((r[0].value - 3.7).abs() < 1e-14);
        }
    }

    #[test]
    fn ferro_diagonal_unique() {
        for (k, theta, lambda) in [(2, 0.0, 3.0), (3, 0.3, 10.0), (8, 0.9, 1e6), (64, 0.0, 1e6), (1, 0.5, 0.01)] {
            let p = params(k, theta, lambda);
            let r = solve_diagonal(&p);
            assert_eq!(r.len(), 1, "k={k} theta={theta}");
            assert!(BoundaryLawPair::diagonal(r[0].value).residual(&p) < 1e-12);
        }
    }

    #[test]
    fn antiferro_k5_theta5_three_roots_between_curves() {
        // x_i = 3 ± √6 are the roots of 2x² − 12x + 6 = 0
        let s6 = 6f64.sqrt();
        let lam_of = |x: f64| 32.0 * x / 6f64.powi(6) * ((6.0 + 2.0 * x) / (2.0 * (1.0 + x))).powi(5);
        let expected = [lam_of(3.0 + s6), lam_of(3.0 - s6)];
        let (lo, hi) = antiferro_critical_lambdas(5, 5.0).unwrap();
        assert!((lo - expected[0]).abs() < 1e-15 && (hi - expected[1]).abs() < 1e-15);
        let mid = (lo * hi).sqrt();
        let p = params(5, 5.0, mid);
        let roots = solve_diagonal(&p);
        assert_eq!(roots.len(), 3);
        assert_eq!(brute_diagonal_count(5, 5.0, mid), 3);
        for r in &roots {
            let x = r.value;
            let sub = x - mid * ((1.0 + 6.0 * x) / (1.0 + 2.0 * x)).powi(5);
            assert!((sub / x).abs() < 1e-11);
        }
    }

    #[test]
    fn substitution_case_split_matches_brute_force() {
        for k in [2u32, 3, 5, 8] {
            let kf = k as f64;
            let theta_cr = 2.0 * ((kf + 1.0) / (kf - 1.0)).powi(2) - 1.0;
            for theta in [1.5, theta_cr * 0.9, theta_cr * 1.2, theta_cr * 3.0] {
                if theta <= 1.0 {
                    continue;
                }
                let base = antiferro_critical_lambdas(k, theta).map(|(l, h)| (l * h).sqrt()).unwrap_or(1.0);
                for f in [0.2, 0.7, 1.0, 1.4, 5.0] {
                    let lambda = base * f;
                    let p = params(k, theta, lambda);
                    let predicted = DiagonalSubstitution::new(&p).predicted_count();
                    assert_eq!(predicted, brute_diagonal_count(k, theta, lambda), "k={k} theta={theta} lambda={lambda}");
                    assert_eq!(predicted, solve_diagonal(&p).len());
                }
            }
        }
    }

    #[test]
    fn two_roots_at_substitution_nu() {
        let p0 = params(2, 40.0, 1.0);
        let sub = DiagonalSubstitution::new(&p0);
        let (n1, n2) = sub.nu.unwrap();
        for nu in [n1, n2] {
            // invert a = 2^k / (λ(1+θ)^{k+1})
            let lambda = 4.0 / (nu * 41f64.powi(3));
            let p = params(2, 40.0, lambda);
            assert_eq!(DiagonalSubstitution::new(&p).predicted_count(), 2);
            let roots = solve_diagonal(&p);
            assert_eq!(roots.len(), 2, "{roots:?}");
            assert_eq!(roots.iter().filter(|r| r.double).count(), 1);
        }
    }

    /// Oracle for the k=2 quadratic: bisection on x ↦ x − λ((1+x+θ(g−1−x))/g)² over (0, g−1).
    fn k2_bisection_oracle(theta: f64, lambda: f64) -> Vec<f64> {
        let g = k2_sum(theta, lambda);
        let q = |x: f64| x - lambda * ((1.0 + x + theta * (g - 1.0 - x)) / g).powi(2);
        let n = 100_000;
        let mut out = Vec::new();
        let step = (g - 1.0) / n as f64;
        for i in 0..n {
            let (a, b) = (i as f64 * step + 1e-300, (i + 1) as f64 * step);
            if (q(a) < 0.0) != (q(b) < 0.0) {
                out.push(roots::bisect(q, a, b));
            }
        }
        out
    }

    #[test]
    fn k2_hard_core_lambda_three() {
        let p = params(2, 0.0, 3.0);
        let pairs = solve_offdiagonal_k2(&p).unwrap();
        assert_eq!(pairs.len(), 1);
        let law = pairs[0];
        assert!(law.x < law.y);
        assert!(law.residual(&p) < 1e-11);
        assert!((law.x + law.y + 1.0 - k2_sum(0.0, 3.0)).abs() < 1e-12);
        let oracle = k2_bisection_oracle(0.0, 3.0);
        assert_eq!(oracle.len(), 2);
        assert!((oracle[0] - law.x).abs() < 1e-10 && (oracle[1] - law.y).abs() < 1e-10);
    }

    #[test]
    fn k2_empty_below_critical() {
        // λ_cr(2) at θ = 0.2 is 2.25 / 0.4 = 5.625
        assert!(solve_offdiagonal_k2(&params(2, 0.2, 5.0)).unwrap().is_empty());
        assert!(k2_bisection_oracle(0.2, 5.0).is_empty());
    }

    #[test]
    fn k2_tangency_at_nine_quarters() {
        let p = params(2, 0.0, 2.25);
        let pairs = solve_offdiagonal_k2(&p).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].is_diagonal(1e-12));
        let x = solve_diagonal(&p)[0].value;
        assert!((pairs[0].x - x).abs() < 1e-9);
        assert_eq!(solve_tisgm(&p).unwrap().count(), 1);
    }

    #[test]
    fn k2_no_solutions_above_one_third() {
        for theta in [1.0 / 3.0, 0.34, 0.5, 0.8, 0.99] {
            for lambda in [0.1, 1.0, 10.0, 100.0, 1e4, 1e6] {
                let p = params(2, theta, lambda);
                assert!(solve_offdiagonal_k2(&p).unwrap().is_empty(), "theta={theta} lambda={lambda}");
            }
        }
    }

    #[test]
    fn k3_thresholds() {
        let p = params(3, 0.0, 1.5);
        let pairs = solve_offdiagonal_k3(&p).unwrap();
        assert_eq!(pairs.len(), 1);
        let law = pairs[0];
        assert!(law.residual(&p) < 1e-11);
        let s = law.x.cbrt() + law.y.cbrt();
        assert!(s.powi(3) - 4.0 > 0.0);
        assert!(solve_offdiagonal_k3(&params(3, 0.0, 32.0 / 27.0 * 0.999)).unwrap().is_empty());
        assert!(solve_offdiagonal_k3(&params(3, 0.5, 100.0)).unwrap().is_empty());
        assert!(solve_offdiagonal_k3(&params(2, 0.0, 3.0)).is_err());
    }

    #[test]
    fn k3_scalar_oracle() {
        // bisection on η(s) = a directly, independent of the solver's bracket logic
        let theta = 0.1;
        let lambda: f64 = 4.0;
        let a = lambda.cbrt();
        let s0 = (4.0f64 / 0.8).cbrt();
        let mut lo = s0;
        let mut hi = 100.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eta_k3(mid, theta) < a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let law = solve_offdiagonal_k3(&params(3, theta, lambda)).unwrap()[0];
        assert!((law.x.cbrt() + law.y.cbrt() - lo).abs() < 1e-9);
    }

    #[test]
    fn general_solver_matches_closed_forms() {
        for (k, theta, lambda) in [(2, 0.0, 3.0), (2, 0.2, 7.0), (2, 0.1, 40.0), (3, 0.0, 1.5), (3, 0.25, 6.0), (3, 0.4, 50.0)] {
            let p = params(k, theta, lambda);
            let closed = if k == 2 { solve_offdiagonal_k2(&p) } else { solve_offdiagonal_k3(&p) }.unwrap();
            let general = solve_offdiagonal_general(&p, GENERAL_CELLS).unwrap();
            assert_eq!(closed.len(), general.len(), "k={k} theta={theta} lambda={lambda}");
            for (c, g) in closed.iter().zip(&general) {
                assert!(relative(g.x, c.x) < 1e-9 && relative(g.y, c.y) < 1e-9);
            }
        }
    }

    #[test]
    fn general_solver_k4_above_critical() {
        let lambda_cr = (5.0f64 / 4.0).powi(4) / 3.0;
        let p = params(4, 0.0, 1.05 * lambda_cr);
        let pairs = solve_offdiagonal_general(&p, GENERAL_CELLS).unwrap();
        assert!(!pairs.is_empty());
        for l in &pairs {
            assert!(l.residual(&p) < 1e-10);
            assert!(offdiagonal_condition_residual(l, &p) < 1e-9);
        }
    }

    #[test]
    fn general_solver_empty_when_contracting() {
        for theta in [0.75, 0.8, 0.95] {
            for lambda in [0.5, 5.0, 500.0] {
                let p = params(4, theta, lambda);
                assert!(solve_offdiagonal_general(&p, GENERAL_CELLS).unwrap().is_empty());
                // γ iteration converges to ξ from any start
                let xi = gamma_fixed_point(&p);
                for start in [p.a() * theta, 0.5 * p.a() * (1.0 + theta), p.a()] {
                    let mut u = start;
                    for _ in 0..20_000 {
                        u = gamma_map(u, &p);
                    }
                    assert!((u - xi).abs() < 1e-9 * xi, "theta={theta} lambda={lambda}");
                }
            }
        }
    }

    #[test]
    fn critical_value_closed_forms() {
        assert_eq!(critical_values(2, 20.0).unwrap().theta_cr_anti, Some(17.0));
        assert_eq!(critical_values(5, 4.0).unwrap().theta_cr_anti, Some(3.5));
        assert_eq!(critical_values(2, 0.0).unwrap().lambda_cr, Some(2.25));
        let l3 = critical_values(3, 0.0).unwrap().lambda_cr.unwrap();
        assert!((l3 - 32.0 / 27.0).abs() < 1e-15);
        let l3q = critical_values(3, 0.25).unwrap().lambda_cr.unwrap();
        assert!((l3q - (4.0f64 / 3.0).powi(3)).abs() < 1e-14);
        let cv = critical_values(8, 0.1).unwrap();
        let lcr = cv.lambda_cr.unwrap();
        let lcp = cv.lambda_cr_prime.unwrap();
        assert!((lcr - (9.0f64 / 8.0).powi(8) / (7.0 - 0.9)).abs() < 1e-14);
        assert!((lcp - 1.0 / (7.0 - 0.8)).abs() < 1e-15);
        assert!(lcp < lcr);
        assert!(cv.theta_c.unwrap() < cv.theta_c_prime.unwrap());
        assert!(critical_values(1, 0.1).is_err());
    }

    #[test]
    fn classify_hard_core_k2() {
        let r = classify_phase(&params(2, 0.0, 2.0)).unwrap();
        assert_eq!(r.count, CountTag::One);
        assert!(r.consistent);
        let r = classify_phase(&params(2, 0.0, 3.0)).unwrap();
        assert_eq!(r.count, CountTag::Three);
        assert_eq!(r.deciding_theorem, Theorem::TLt);
        assert!(r.consistent);
    }

    #[test]
    fn classify_antiferro_regions() {
        let (lo, hi) = antiferro_critical_lambdas(5, 5.0).unwrap();
        let cases = [
            ((lo * hi).sqrt(), CountTag::Three),
            (lo, CountTag::Two),
            (hi, CountTag::Two),
            (lo * 0.5, CountTag::One),
            (hi * 2.0, CountTag::One),
        ];
        for (lambda, expected) in cases {
            let r = classify_phase(&params(5, 5.0, lambda)).unwrap();
            assert_eq!(r.count, expected, "lambda={lambda}");
            assert!(r.consistent, "lambda={lambda}: {:?}", r.solutions);
            assert!(r.solutions.offdiagonal.is_empty());
        }
        let r = classify_phase(&params(5, 3.0, 0.02)).unwrap();
        assert_eq!(r.count, CountTag::One);
    }

    #[test]
    fn classify_k4_regions() {
        let r = classify_phase(&params(4, 0.9, 10.0)).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::One, Theorem::Tkk1));
        let cv = critical_values(4, 0.1).unwrap();
        let (lp, lc) = (cv.lambda_cr_prime.unwrap(), cv.lambda_cr.unwrap());
        let r = classify_phase(&params(4, 0.1, 0.5 * lp)).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::One, Theorem::Tkk1));
        let r = classify_phase(&params(4, 0.1, 0.5 * (lp + lc))).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::AtLeastOne, Theorem::Tkk2));
        let r = classify_phase(&params(4, 0.1, 1.5 * lc)).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::AtLeastThree, Theorem::Tkk3));
        assert!(r.consistent);
        let r = classify_phase(&params(4, 0.65, 10.0)).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::AtLeastOne, Theorem::Tkk2));
        let r = classify_phase(&params(6, 0.0, 0.5)).unwrap();
        assert_eq!((r.count, r.deciding_theorem), (CountTag::One, Theorem::HardcoreRKh));
    }

    #[test]
    fn offdiagonal_laws_satisfy_difference_condition() {
        for (k, theta, lambda) in [(2, 0.1, 20.0), (3, 0.2, 8.0), (5, 0.1, 4.0), (7, 0.05, 3.0)] {
            let p = params(k, theta, lambda);
            let set = solve_tisgm(&p).unwrap();
            assert!(!set.offdiagonal.is_empty(), "k={k}");
            for l in &set.offdiagonal {
                assert!(offdiagonal_condition_residual(l, &p) < 1e-9);
                assert!(l.swap().residual(&p) < 1e-10);
            }
        }
    }

    #[test]
    fn k2_vieta_and_diagonal() {
        let p = params(2, 0.1, 12.0);
        let set = solve_tisgm(&p).unwrap();
        let l = set.offdiagonal[0];
        assert!((l.x + l.y - (k2_sum(0.1, 12.0) - 1.0)).abs() < 1e-11);
        assert_eq!(set.diagonal.len(), 1);
    }

    #[test]
    fn newton_converges_to_known_law() {
        let p = params(2, 0.0, 3.0);
        let law = newton_fixed_point(BoundaryLawPair { x: 0.5, y: 2.0 }, &p, 100).unwrap();
        let exact = solve_offdiagonal_k2(&p).unwrap()[0];
        assert!(relative(law.x, exact.x) < 1e-12 && relative(law.y, exact.y) < 1e-12);
    }
}
