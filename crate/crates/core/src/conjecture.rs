//! Exploratory scan of the exact-count conjecture for `k ≥ 4`.
//!
//! Off-diagonal laws in `(u, v) = (x^{1/k}, y^{1/k})` solve a system that is
//! linear in `a` and `T = aθ`, with solution
//!
//! ```text
//! a(u,v) = Σ_{j=0}^{k} u^{k−j} v^j / Σ_{j=0}^{k−1} u^{k−1−j} v^j
//! T(u,v) = (uv Σ_{j=0}^{k−2} u^{k−2−j} v^j − 1) / Σ_{j=0}^{k−1} u^{k−1−j} v^j
//! ```
//!
//! On the level set `a(u,v) = a`, parametrized by `r = v/u ∈ (0, 1]`, every
//! crossing of `T = aθ` with `r < 1` is one swap-pair of off-diagonal laws. The
//! scan measures where `T` is extremal on that curve and counts crossings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::tisgm;

const R_CELLS: usize = 4096;

fn geometric_sum(r: f64, m: i32) -> f64 {
    if m < 0 {
        return 0.0;
    }
    (0..=m).map(|j| r.powi(j)).sum()
}

/// `a(u, v)` evaluated directly from its monomial sums.
pub fn a_uv(u: f64, v: f64, k: u32) -> f64 {
    let k = k as i32;
    let num: f64 = (0..=k).map(|j| u.powi(k - j) * v.powi(j)).sum();
    let den: f64 = (0..k).map(|j| u.powi(k - 1 - j) * v.powi(j)).sum();
    num / den
}

/// `T(u, v)` evaluated directly from its monomial sums.
pub fn t_uv(u: f64, v: f64, k: u32) -> f64 {
    let k = k as i32;
    let inner: f64 = (0..=k - 2).map(|j| u.powi(k - 2 - j) * v.powi(j)).sum();
    let den: f64 = (0..k).map(|j| u.powi(k - 1 - j) * v.powi(j)).sum();
    (u * v * inner - 1.0) / den
}

/// `T` on the level set `a(u, v) = a` at ratio `r = v/u`.
pub fn t_on_level_set(a: f64, r: f64, k: u32) -> f64 {
    let ki = k as i32;
    let u = a * geometric_sum(r, ki - 1) / geometric_sum(r, ki);
    (u.powi(ki) * r * geometric_sum(r, ki - 2) - 1.0) / (u.powi(ki - 1) * geometric_sum(r, ki - 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureRow {
    pub a: f64,
    pub lambda: f64,
    /// `T` at `u = v = ak/(k+1)`.
    pub t_diagonal: f64,
    pub t_sup: f64,
    pub argmax_r: f64,
    /// The supremum of `T` on the level set sits at `u = v`.
    pub extremum_at_diagonal: bool,
    /// `T` is increasing in `r` on the grid.
    pub monotone: bool,
    /// Crossings of `T = aθ` with `r < 1`.
    pub crossings: usize,
    /// `1` when `aθ < T(diagonal)`, else `0`: the count the conjecture predicts.
    pub expected_pairs: usize,
    /// Off-diagonal swap-pairs found by the general solver.
    pub solver_pairs: usize,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub k: u32,
    pub theta: f64,
    /// `((k+1)/k)·(k − 1 − θ(k+1))^{−1/k}`.
    pub a_crit_formula: f64,
    /// Root of `T(diagonal) = aθ` found by bisection.
    pub a_crit_numeric: f64,
    pub rows: Vec<ConjectureRow>,
    /// Every row has its extremum at the diagonal and a consistent count.
    pub supports_conjecture: bool,
}

/// Scans `grid` activity roots `a` around the critical value.
pub fn conjecture_scan(k: u32, theta: f64, grid: usize) -> Result<ConjectureReport> {
    if grid < 8 {
        return Err(Error::Usage(format!("conjecture scan needs grid >= 8, got {grid}")));
    }
    if k < 4 {
        return Err(Error::Usage(format!("conjecture scan is for k >= 4, got k={k}")));
    }
    let kf = k as f64;
    let theta_c = (kf - 1.0) / (kf + 1.0);
    if !(theta >= 0.0 && theta < theta_c) {
        return Err(Error::UnsupportedRegime(format!("conjecture scan needs 0 <= theta < {theta_c}, got {theta}")));
    }
    let a_crit_formula = (kf + 1.0) / kf * (kf - 1.0 - theta * (kf + 1.0)).powf(-1.0 / kf);
    let excess = |a: f64| t_on_level_set(a, 1.0, k) - a * theta;
    let mut hi = 2.0 * a_crit_formula;
    while excess(hi) < 0.0 {
        hi *= 2.0;
    }
    let a_crit_numeric = crate::roots::bisect(excess, 1e-6, hi);

    let rs: Vec<f64> = (1..=R_CELLS).map(|i| i as f64 / R_CELLS as f64).collect();
    let (lo_f, hi_f) = (0.6f64.ln(), 1.8f64.ln());
    let mut rows = Vec::with_capacity(grid);
    for i in 0..grid {
        let a = a_crit_formula * (lo_f + (hi_f - lo_f) * i as f64 / (grid - 1) as f64).exp();
        let ts: Vec<f64> = rs.iter().map(|&r| t_on_level_set(a, r, k)).collect();
        let t_diagonal = *ts.last().unwrap();
        let (imax, &t_sup) = ts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .unwrap();
        let argmax_r = rs[imax];
        let extremum_at_diagonal = imax == R_CELLS - 1 || t_sup - t_diagonal <= 1e-12 * t_diagonal.abs().max(1.0);
        let monotone = ts.windows(2).all(|w| w[1] >= w[0] - 1e-14 * w[0].abs().max(1.0));
        let target = a * theta;
        let crossings = ts[..R_CELLS - 1]
            .windows(2)
            .filter(|w| (w[0] - target < 0.0) != (w[1] - target < 0.0))
            .count();
        let expected_pairs = usize::from(target < t_diagonal);
        let lambda = a.powi(k as i32);
        let p = ModelParams::new(k, theta, lambda)?;
        let solver_pairs = tisgm::solve_offdiagonal_general(&p, tisgm::GENERAL_CELLS)?.len();
        let consistent = crossings == expected_pairs && solver_pairs == expected_pairs;
        rows.push(ConjectureRow {
            a,
            lambda,
            t_diagonal,
            t_sup,
            argmax_r,
            extremum_at_diagonal,
            monotone,
            crossings,
            expected_pairs,
            solver_pairs,
            consistent,
        });
    }
    let supports_conjecture = rows.iter().all(|r| r.extremum_at_diagonal && r.consistent);
    Ok(ConjectureReport { k, theta, a_crit_formula, a_crit_numeric, rows, supports_conjecture })
}
