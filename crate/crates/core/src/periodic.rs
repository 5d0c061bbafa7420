//! Two-periodic boundary laws: the law alternates between `z` on even levels
//! and `t` on odd levels, with `z = φ(t)` and `t = φ(z)` where
//! `φ(x) = λ((1 + (1+θ)x)/(1 + 2x))^k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle;
use crate::params::ModelParams;
use crate::recursion::{BoundaryLawPair, FieldAssignment};
use crate::roots::{find_roots, GridScale, Scan};
use crate::tree::TreeIndex;

/// Scan resolution for fixed points of `φ∘φ`.
pub const PERIODIC_CELLS: usize = 512;
/// Relative distance below which a fixed point of `φ∘φ` counts as the diagonal root.
pub const TI_TOL: f64 = 1e-10;

fn ln_phi(x: f64, p: &ModelParams) -> f64 {
    p.ln_lambda() + p.kf() * (((1.0 + p.theta()) * x).ln_1p() - (2.0 * x).ln_1p())
}

/// `φ(x)`, evaluated in the log domain.
pub fn eval_phi(x: f64, p: &ModelParams) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("phi needs a positive finite argument, got {x}")));
    }
    Ok(ln_phi(x, p).exp())
}

/// `κ(x) = x((1+2x)/(1+(1+θ)x))^k`, the inverse of the diagonal relation `λ = κ(x*)`.
pub fn kappa(x: f64, k: u32, theta: f64) -> f64 {
    (x.ln() + k as f64 * ((2.0 * x).ln_1p() - ((1.0 + theta) * x).ln_1p())).exp()
}

/// The existence window `(λ⁻, λ⁺)` for genuine 2-cycles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicWindow {
    pub k: u32,
    pub theta: f64,
    /// `(k² − 6k + 1)/(k + 1)²`.
    pub theta_threshold: f64,
    pub s_minus: Option<f64>,
    pub s_plus: Option<f64>,
    pub lambda_minus: Option<f64>,
    pub lambda_plus: Option<f64>,
    /// The hypothesis that fails when the window is empty.
    pub violated: Option<String>,
}

impl PeriodicWindow {
    pub fn is_open(&self) -> bool {
        self.violated.is_none()
    }

    /// Whether `λ` lies strictly inside `(λ⁻, λ⁺)`.
    pub fn contains(&self, lambda: f64) -> bool {
        match (self.lambda_minus, self.lambda_plus) {
            (Some(lo), Some(hi)) => lambda > lo && lambda < hi,
            _ => false,
        }
    }
}

/// Computes `s±` and `λ± = κ(s±)`; the window is empty unless `k ≥ 6` and
/// `θ < (k² − 6k + 1)/(k + 1)²`.
pub fn periodic_window(k: u32, theta: f64) -> Result<PeriodicWindow> {
    if k < 2 {
        return Err(Error::Usage(format!("periodic window needs k >= 2, got k={k}")));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("theta must be finite and non-negative, got {theta}")));
    }
    let kf = k as f64;
    let quad = kf * kf - 6.0 * kf + 1.0;
    let threshold = quad / (kf + 1.0).powi(2);
    let mut w = PeriodicWindow {
        k,
        theta,
        theta_threshold: threshold,
        s_minus: None,
        s_plus: None,
        lambda_minus: None,
        lambda_plus: None,
        violated: None,
    };
    if k < 6 {
        w.violated = Some(format!("k >= 6 is required (k^2 - 6k + 1 = {quad} < 0)"));
        return Ok(w);
    }
    if theta >= threshold {
        w.violated = Some(format!("theta < (k^2 - 6k + 1)/(k + 1)^2 = {threshold} is required, got theta = {theta}"));
        return Ok(w);
    }
    let disc = ((1.0 - theta) * (quad - (kf + 1.0).powi(2) * theta)).sqrt();
    let base = kf - 3.0 - (kf + 1.0) * theta;
    let s_minus = (base - disc) / (4.0 * (1.0 + theta));
    let s_plus = (base + disc) / (4.0 * (1.0 + theta));
    let lambda_minus = kappa(s_minus, k, theta);
    let lambda_plus = kappa(s_plus, k, theta);
    if !(s_minus > 0.0 && s_minus < s_plus && lambda_minus < lambda_plus) {
        return Err(Error::Domain(format!(
            "periodic window is not ordered: s = ({s_minus}, {s_plus}), lambda = ({lambda_minus}, {lambda_plus})"
        )));
    }
    w.s_minus = Some(s_minus);
    w.s_plus = Some(s_plus);
    w.lambda_minus = Some(lambda_minus);
    w.lambda_plus = Some(lambda_plus);
    Ok(w)
}

/// `2(1+θ)x² + (3 + θ − k(1−θ))x + 1`; negative exactly when the diagonal root
/// is unstable for `φ` and a 2-cycle branches off.
pub fn instability_polynomial(x: f64, k: u32, theta: f64) -> f64 {
    2.0 * (1.0 + theta) * x * x + (3.0 + theta - k as f64 * (1.0 - theta)) * x + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPeriodicSolution {
    pub z_even: f64,
    pub z_odd: f64,
    pub is_translation_invariant: bool,
}

impl TwoPeriodicSolution {
    pub fn swapped(&self) -> Self {
        Self { z_even: self.z_odd, z_odd: self.z_even, ..*self }
    }

    /// Largest relative residual of `z = φ(t)`, `t = φ(z)`.
    pub fn residual(&self, p: &ModelParams) -> f64 {
        let r1 = (ln_phi(self.z_odd, p).exp() - self.z_even).abs() / self.z_even;
        let r2 = (ln_phi(self.z_even, p).exp() - self.z_odd).abs() / self.z_odd;
        r1.max(r2)
    }

    /// Even and odd laws as boundary-law pairs `(z, z)` and `(t, t)`.
    pub fn laws(&self) -> (BoundaryLawPair, BoundaryLawPair) {
        (BoundaryLawPair::diagonal(self.z_even), BoundaryLawPair::diagonal(self.z_odd))
    }

    /// The alternating field on a recursion tree: `(ln z, ln z)` on even levels, `(ln t, ln t)` on odd.
    pub fn field(&self, tree: TreeIndex) -> Result<FieldAssignment> {
        let (lz, lt) = (self.z_even.ln(), self.z_odd.ln());
        let levels: Vec<usize> = (0..tree.len()).map(|v| tree.level(v)).collect();
        FieldAssignment::from_fn(tree, |v| if levels[v].is_multiple_of(2) { (lz, lz) } else { (lt, lt) })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoPeriodicReport {
    /// Diagonal root first, then one representative per 2-cycle with `z_even < z_odd`.
    pub solutions: Vec<TwoPeriodicSolution>,
    /// Number of fixed points of `φ∘φ`, both members of each cycle counted.
    pub fixed_points: usize,
    pub window: Option<PeriodicWindow>,
    /// `λ` lies strictly inside an open window.
    pub in_window: bool,
    /// The instability inequality holds at the diagonal root.
    pub unstable_diagonal: bool,
    pub residual: f64,
}

impl TwoPeriodicReport {
    pub fn cycles(&self) -> impl Iterator<Item = &TwoPeriodicSolution> {
        self.solutions.iter().filter(|s| !s.is_translation_invariant)
    }
}

/// Finds all fixed points of `φ∘φ` for `θ < 1`.
///
/// `φ` maps `(0, ∞)` into `(λ((1+θ)/2)^k, λ)`, so every fixed point of `φ∘φ`
/// lies in that interval; the scan covers it with a log grid.
pub fn solve_two_periodic(p: &ModelParams) -> Result<TwoPeriodicReport> {
    let theta = p.theta();
    if theta >= 1.0 {
        return Err(Error::UnsupportedRegime(format!("2-periodic solver needs theta < 1, got {theta}")));
    }
    let lambda = p.lambda();
    let lo = (p.ln_lambda() + p.kf() * (0.5 * (1.0 + theta)).ln()).exp();
    let h = |x: f64| ln_phi(ln_phi(x, p).exp(), p) - x.ln();
    let scan = Scan { cells: PERIODIC_CELLS, scale: GridScale::Log, tangent_tol: 1e-12 };
    let roots = find_roots(h, lo * (1.0 - 1e-9), lambda * (1.0 + 1e-9), scan);

    let diag = crate::tisgm::solve_diagonal(p)[0].value;
    let mut solutions = vec![TwoPeriodicSolution { z_even: diag, z_odd: diag, is_translation_invariant: true }];
    let mut fixed_points = 0;
    for r in &roots {
        let z = r.value;
        let t = ln_phi(z, p).exp();
        fixed_points += 1;
        if ((t - z) / z).abs() <= 1e3 * TI_TOL || ((z - diag) / diag).abs() <= 1e3 * TI_TOL {
            continue;
        }
        let (z, t) = if z < t { (z, t) } else { (t, z) };
        if !solutions.iter().any(|s| ((s.z_even - z) / z).abs() <= crate::roots::MERGE_TOL) {
            solutions.push(TwoPeriodicSolution { z_even: z, z_odd: t, is_translation_invariant: false });
        }
    }
    let window = if p.k() >= 2 { Some(periodic_window(p.k(), theta)?) } else { None };
    let in_window = window.as_ref().is_some_and(|w| w.contains(lambda));
    let residual = solutions.iter().map(|s| s.residual(p)).fold(0.0, f64::max);
    Ok(TwoPeriodicReport {
        solutions,
        fixed_points,
        window,
        in_window,
        unstable_diagonal: instability_polynomial(diag, p.k(), theta) < 0.0,
        residual,
    })
}

/// Relative residual of the general four-variable 2-periodic system at `(z₁, z₂, t₁, t₂)`.
pub fn four_variable_residual(z: (f64, f64), t: (f64, f64), p: &ModelParams) -> f64 {
    let law = |a: f64, b: f64| BoundaryLawPair { x: a, y: b };
    let from_t = crate::recursion::recursion_map(law(t.0, t.1), p);
    let from_z = crate::recursion::recursion_map(law(z.0, z.1), p);
    [
        (from_t.x - z.0) / z.0,
        (from_t.y - z.1) / z.1,
        (from_z.x - t.0) / t.0,
        (from_z.y - t.1) / t.1,
    ]
    .iter()
    .map(|r| r.abs())
    .fold(0.0, f64::max)
}

/// Probability of a hole (spin 0) at an even and at an odd vertex whose `root_degree`
/// neighbors carry the opposite-parity law.
pub fn hole_density_gap(sol: &TwoPeriodicSolution, p: &ModelParams, root_degree: usize) -> Result<(f64, f64)> {
    let (even, odd) = sol.laws();
    let m_even = oracle::marginal_two_periodic(even, odd, p, root_degree)?;
    let m_odd = oracle::marginal_two_periodic(odd, even, p, root_degree)?;
    Ok((m_even[1], m_odd[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::field_recursion_residual;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(k: u32, theta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(k, theta, lambda).unwrap()
    }

    #[test]
    fn phi_basics() {
        let p = params(4, 1.0, 2.5);
        assert!((eval_phi(0.3, &p).unwrap() - 2.5).abs() < 1e-14);
        assert!(eval_phi(0.0, &p).is_err());
        let p = params(3, 0.4, 2.0);
        let x = crate::tisgm::solve_diagonal(&p)[0].value;
        assert!((eval_phi(x, &p).unwrap() - x).abs() < 1e-12 * x);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(1e-3..50.0);
            let b = a * rng.gen_range(1.001..3.0);
            assert!(eval_phi(a, &p).unwrap() > eval_phi(b, &p).unwrap());
        }
    }

    #[test]
    fn kappa_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let k = rng.gen_range(1..=20);
            let theta = rng.gen_range(0.0..0.999);
            let x: f64 = rng.gen_range(1e-4..100.0);
            let h = 1e-6 * x;
            assert!(kappa(x + h, k, theta) > kappa(x, k, theta));
        }
    }

    #[test]
    fn window_thresholds() {
        let w = periodic_window(6, 0.0).unwrap();
        assert!((w.theta_threshold - 1.0 / 49.0).abs() < 1e-16);
        let w5 = periodic_window(5, 0.0).unwrap();
        assert!(!w5.is_open());
        assert!(w5.violated.unwrap().contains("-4"));
        let w = periodic_window(6, 0.01).unwrap();
        let (sm, sp) = (w.s_minus.unwrap(), w.s_plus.unwrap());
        assert!(0.0 < sm && sm < sp);
        assert!(w.lambda_minus.unwrap() < w.lambda_plus.unwrap());
        assert!(!periodic_window(6, 0.03).unwrap().is_open());
    }

    #[test]
    fn genuine_cycle_mid_window() {
        let w = periodic_window(6, 0.005).unwrap();
        let lambda = 0.5 * (w.lambda_minus.unwrap() + w.lambda_plus.unwrap());
        let p = params(6, 0.005, lambda);
        let rep = solve_two_periodic(&p).unwrap();
        assert!(rep.in_window && rep.unstable_diagonal);
        assert!(rep.fixed_points >= 3);
        let cycle = *rep.cycles().next().unwrap();
        assert!(cycle.residual(&p) <= 1e-10);
        assert!(cycle.swapped().residual(&p) <= 1e-10);
        let (z, t) = (cycle.z_even, cycle.z_odd);
        assert!(four_variable_residual((z, z), (t, t), &p) <= 1e-10);
        let field = cycle.field(TreeIndex::recursion(6, 3).unwrap()).unwrap();
        assert!(field_recursion_residual(&field, &p).unwrap() <= 1e-12);
        let (he, ho) = hole_density_gap(&cycle, &p, 7).unwrap();
        assert!((he - ho).abs() > 1e-6);
        let (he2, ho2) = hole_density_gap(&cycle.swapped(), &p, 7).unwrap();
        assert!((he - ho2).abs() < 1e-15 && (ho - he2).abs() < 1e-15);
        let q = crate::brackets::iterate_bounds(&p, 100_000, 1e-12).unwrap();
        assert!(q.contains(z, z, 1e-9) && q.contains(t, t, 1e-9));
    }

    #[test]
    fn window_consistency_at_diagonal_root() {
        let w = periodic_window(8, 0.02).unwrap();
        let (lm, lp) = (w.lambda_minus.unwrap(), w.lambda_plus.unwrap());
        let (sm, sp) = (w.s_minus.unwrap(), w.s_plus.unwrap());
        for (lambda, inside) in [((lm * lp).sqrt(), true), (0.5 * lm, false), (2.0 * lp, false)] {
            let p = params(8, 0.02, lambda);
            let x = crate::tisgm::solve_diagonal(&p)[0].value;
            assert_eq!(x > sm && x < sp, inside);
            assert_eq!(instability_polynomial(x, 8, 0.02) < 0.0, inside);
            let rep = solve_two_periodic(&p).unwrap();
            assert_eq!(rep.cycles().count() > 0, inside, "lambda={lambda}");
        }
    }

    #[test]
    fn diagonal_has_no_gap() {
        let p = params(4, 0.3, 2.0);
        let rep = solve_two_periodic(&p).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        let (he, ho) = hole_density_gap(&rep.solutions[0], &p, 5).unwrap();
        assert_eq!(he, ho);
    }
}
