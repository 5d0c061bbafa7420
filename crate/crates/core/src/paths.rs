//! Path-indexed boundary-law fields.
//!
//! An infinite path from the root splits the tree into the vertices on its
//! right (`Γ₁`) and on its left (`Γ₂`). Fixing the boundary law `(x₁*, x₂*)` on
//! `Γ₁` and the swapped law `(x₂*, x₁*)` on `Γ₂` at the leaves of a finite ball,
//! then solving the recursion inwards, gives a field that depends on the path.
//! Paths are encoded by `t ∈ [0, 1]` through its base-`k` digits, so `t = 0`
//! (the leftmost path) puts everything in `Γ₁` and reproduces `μ₁*`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::recursion::{field_recursion_residual, log_ratio, BoundaryLawPair, FieldAssignment};
use crate::tisgm;
use crate::tree::TreeIndex;

/// Which side of the path a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Right of the path; boundary law `(x₁*, x₂*)`.
    Gamma1,
    /// Left of the path; boundary law `(x₂*, x₁*)`.
    Gamma2,
}

impl Side {
    pub fn flipped(self) -> Self {
        match self {
            Side::Gamma1 => Side::Gamma2,
            Side::Gamma2 => Side::Gamma1,
        }
    }
}

/// Side assigned to the vertices of the path itself.
pub const PATH_VERTEX_SIDE: Side = Side::Gamma1;
const MAX_SWEEPS: usize = 10_000;

/// A path truncated at `depth`, or a forced assignment of every vertex to one side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSpec {
    pub t: f64,
    pub depth: usize,
    pub k: u32,
    /// `child_choices[m]` is the successor taken from the path vertex at level `m`.
    pub child_choices: Vec<usize>,
    /// When set, overrides the path and puts all of `V_depth` on this side.
    pub forced: Option<Side>,
    /// Swaps the roles of `Γ₁` and `Γ₂`.
    pub mirrored: bool,
}

/// The first `depth` base-`k` digits of `t`; `t = 1` gives all digits `k − 1`.
pub fn base_k_digits(t: f64, depth: usize, k: u32) -> Vec<usize> {
    let kf = k as f64;
    let mut x = t;
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        x *= kf;
        let d = (x.floor() as usize).min(k as usize - 1);
        x -= d as f64;
        out.push(d);
    }
    out
}

impl PathSpec {
    pub fn from_t(t: f64, depth: usize, k: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("path parameter t must lie in [0, 1], got {t}")));
        }
        if k < 2 {
            return Err(Error::Domain("paths need k >= 2".into()));
        }
        Ok(Self { t, depth, k, child_choices: base_k_digits(t, depth, k), forced: None, mirrored: false })
    }

    /// Every vertex on `side`.
    pub fn uniform(side: Side, depth: usize, k: u32) -> Result<Self> {
        let mut s = Self::from_t(0.0, depth, k)?;
        s.forced = Some(side);
        Ok(s)
    }

    pub fn mirror(mut self) -> Self {
        self.mirrored = !self.mirrored;
        self
    }

    /// The side of `vertex` in a recursion tree with branching `k`.
    pub fn side(&self, tree: &TreeIndex, vertex: usize) -> Side {
        let raw = match self.forced {
            Some(s) => s,
            None => {
                // branch indices along the way from the root to the vertex
                let mut ranks = Vec::with_capacity(tree.level(vertex));
                let mut v = vertex;
                while let Some(r) = tree.child_rank(v) {
                    ranks.push(r);
                    v = tree.parent(v).expect("non-root vertex has a parent");
                }
                ranks.reverse();
                ranks
                    .iter()
                    .zip(&self.child_choices)
                    .find(|(r, d)| r != d)
                    .map_or(PATH_VERTEX_SIDE, |(r, d)| if r > d { Side::Gamma1 } else { Side::Gamma2 })
            }
        };
        if self.mirrored {
            raw.flipped()
        } else {
            raw
        }
    }

    /// Vertex ids of the path inside `tree`.
    pub fn path_vertices(&self, tree: &TreeIndex) -> Vec<usize> {
        let mut out = vec![0];
        let mut v = 0;
        for &d in self.child_choices.iter().take(tree.depth()) {
            v = tree.children(v).start + d;
            out.push(v);
        }
        out
    }
}

/// `L(θ) = |1 − √θ|/(1 + √θ)`, a bound on both partial derivatives of the edge kernel.
pub fn lipschitz_constant(theta: f64) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Domain(format!("Lipschitz constant needs theta > 0, got {theta}")));
    }
    let s = theta.sqrt();
    Ok((1.0 - s).abs() / (1.0 + s))
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSolution {
    pub field: FieldAssignment,
    /// The off-diagonal law `(x₁*, x₂*)`, `x₁* < x₂*`, used at the boundary.
    pub pair: BoundaryLawPair,
    pub sweeps: usize,
    /// Largest sweep-to-sweep ratio of sup-norm changes.
    pub contraction: f64,
    pub residual: f64,
}

/// Checks the hypotheses and returns the off-diagonal pair to use at the boundary.
pub fn path_boundary_pair(p: &ModelParams) -> Result<BoundaryLawPair> {
    let k = p.k();
    let theta = p.theta();
    if k < 2 {
        return Err(Error::UnsupportedRegime("paths need k >= 2".into()));
    }
    let cv = tisgm::critical_values(k, theta)?;
    let theta_c = cv.theta_c.unwrap_or(0.0);
    if !(theta > 1.0 / 9.0 && theta < theta_c) {
        return Err(Error::UnsupportedRegime(format!("paths need 1/9 < theta < theta_c = {theta_c}, got {theta}")));
    }
    let lambda_cr = cv.lambda_cr.expect("lambda_cr defined below theta_c");
    if p.lambda() <= lambda_cr {
        return Err(Error::UnsupportedRegime(format!("paths need lambda > lambda_cr = {lambda_cr}, got {}", p.lambda())));
    }
    tisgm::solve_tisgm(p)?
        .extreme_pair()
        .ok_or_else(|| Error::UnsupportedRegime("no off-diagonal translation-invariant law was found".into()))
}

/// Fixes the boundary law on every vertex by its side, then runs Jacobi sweeps of
/// the recursion over the interior until the sup-norm change drops below `tol`.
pub fn solve_path_field(ps: &PathSpec, p: &ModelParams, tol: f64) -> Result<PathSolution> {
    if ps.k != p.k() {
        return Err(Error::Domain(format!("path built for k={} used with k={}", ps.k, p.k())));
    }
    if ps.depth < 1 {
        return Err(Error::Domain("path fields need depth >= 1".into()));
    }
    let pair = path_boundary_pair(p)?;
    let tree = TreeIndex::recursion(p.k() as usize, ps.depth)?;
    let (l1, l2) = (pair.x.ln(), pair.y.ln());
    let sides: Vec<Side> = (0..tree.len()).map(|v| ps.side(&tree, v)).collect();
    let mut fields: Vec<(f64, f64)> = sides
        .iter()
        .map(|s| match s {
            Side::Gamma1 => (l1, l2),
            Side::Gamma2 => (l2, l1),
        })
        .collect();

    let interior = tree.shell(tree.depth()).start;
    let theta = p.theta();
    let ll = p.ln_lambda();
    let mut prev_delta: Option<f64> = None;
    let mut contraction = 0.0f64;
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let next: Vec<(f64, f64)> = (0..interior)
            .map(|v| {
                let (mut hp, mut hm) = (ll, ll);
                for c in tree.children(v) {
                    let (cp, cm) = fields[c];
                    hp += log_ratio(cp, cm, theta);
                    hm += log_ratio(cm, cp, theta);
                }
                (hp, hm)
            })
            .collect();
        let delta = next
            .iter()
            .zip(&fields)
            .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
            .fold(0.0, f64::max);
        fields[..interior].copy_from_slice(&next);
        if let Some(pd) = prev_delta {
            if pd > 1e-13 && delta > 1e-13 {
                contraction = contraction.max(delta / pd);
            }
        }
        prev_delta = Some(delta);
        if delta <= tol {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NonConvergence { iterations: sweeps, residual: delta });
        }
    }
    if contraction >= 1.0 {
        return Err(Error::Domain(format!("observed sweep contraction {contraction} is not below 1")));
    }
    let field = FieldAssignment::new(tree, fields)?;
    let residual = field_recursion_residual(&field, p)?;
    Ok(PathSolution { field, pair, sweeps, contraction, residual })
}

/// Sup-norm distance between the converged fields of the paths `t1` and `t2`.
pub fn distinguish_paths(t1: f64, t2: f64, p: &ModelParams, depth: usize) -> Result<f64> {
    let a = solve_path_field(&PathSpec::from_t(t1, depth, p.k())?, p, 1e-13)?;
    let b = solve_path_field(&PathSpec::from_t(t2, depth, p.k())?, p, 1e-13)?;
    a.field.sup_distance(&b.field)
}
