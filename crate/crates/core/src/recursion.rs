//! The elementary recursion maps every solver composes.
//!
//! With `x = e^{h̃₊}` and `y = e^{h̃₋}` the weight ratio is
//! `F(x, y, θ) = (1 + x + θy) / (1 + x + y)` and its log-domain form is
//! `f(h₊, h₋, θ) = ln F(e^{h₊}, e^{h₋}, θ)`. A boundary-law field satisfies
//! `h̃_{±,i} = ln λ + Σ_{j∈S(i)} f(h̃_{±,j}, h̃_{∓,j}, θ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::tree::TreeIndex;

/// Signature of the log-domain edge kernel `f(h₊, h₋, θ)`.
///
/// Field propagation takes the kernel as a parameter so that verification can
/// be run against a deliberately broken kernel.
pub type Kernel = fn(f64, f64, f64) -> f64;

/// `ln(e^a + e^b + e^c)` without overflow.
pub(crate) fn log_sum_exp3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b).max(c);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

/// `ln(1 + e^x)`.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `f(h₊, h₋, θ) = ln((1 + e^{h₊} + θe^{h₋}) / (1 + e^{h₊} + e^{h₋}))`.
///
/// Evaluated in the log domain; `θ = 0` gives the hard-core kernel exactly.
/// Non-finite input propagates to a NaN; use [`checked_log_ratio`] for a
/// validating variant.
pub fn log_ratio(hp: f64, hm: f64, theta: f64) -> f64 {
    let log_den = log_sum_exp3(0.0, hp, hm);
    // share of the e^{h₋} term in the denominator
    let share = (hm - log_den).exp();
    let c = (1.0 - theta) * share;
    if c <= 0.5 {
        (-c).ln_1p()
    } else if theta == 0.0 {
        softplus(hp) - log_den
    } else {
        log_sum_exp3(0.0, hp, theta.ln() + hm) - log_den
    }
}

pub fn checked_log_ratio(hp: f64, hm: f64, theta: f64) -> Result<f64> {
    if !(hp.is_finite() && hm.is_finite()) {
        return Err(Error::Domain(format!("log_ratio needs finite fields, got ({hp}, {hm})")));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("theta must be finite and non-negative, got {theta}")));
    }
    Ok(log_ratio(hp, hm, theta))
}

/// The hard-core kernel `g(h₊, h₋) = ln((1 + e^{h₊}) / (1 + e^{h₊} + e^{h₋}))`.
pub fn hard_core_log_ratio(hp: f64, hm: f64) -> f64 {
    softplus(hp) - log_sum_exp3(0.0, hp, hm)
}

/// Partial derivatives `(∂f/∂h₊, ∂f/∂h₋)`.
pub fn log_ratio_gradient(hp: f64, hm: f64, theta: f64) -> (f64, f64) {
    let log_den = log_sum_exp3(0.0, hp, hm);
    let log_num = log_den + log_ratio(hp, hm, theta);
    let d_plus = (hp - log_num).exp() - (hp - log_den).exp();
    let d_minus = theta * (hm - log_num).exp() - (hm - log_den).exp();
    (d_plus, d_minus)
}

/// `F(x, y, θ) = (1 + x + θy) / (1 + x + y)` for `x, y > 0`.
pub fn ratio(x: f64, y: f64, theta: f64) -> f64 {
    (1.0 + x + theta * y) / (1.0 + x + y)
}

pub fn checked_ratio(x: f64, y: f64, theta: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("ratio needs positive finite arguments, got ({x}, {y})")));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("theta must be finite and non-negative, got {theta}")));
    }
    Ok(ratio(x, y, theta))
}

/// A translation-invariant boundary law `(x, y) = (e^{h̃₊}, e^{h̃₋})` in the gauge `l₀ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLawPair {
    pub x: f64,
    pub y: f64,
}

impl BoundaryLawPair {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("boundary law components must be positive, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    pub fn diagonal(x: f64) -> Self {
        Self { x, y: x }
    }

    pub fn swap(self) -> Self {
        Self { x: self.y, y: self.x }
    }

    /// `(ln x, ln y)`.
    pub fn log_fields(&self) -> (f64, f64) {
        (self.x.ln(), self.y.ln())
    }

    pub fn is_diagonal(&self, rel_tol: f64) -> bool {
        (self.x - self.y).abs() <= rel_tol * self.x.max(self.y)
    }

    /// Relative residual of the fixed-point equations
    /// `x = λF(x,y,θ)^k`, `y = λF(y,x,θ)^k`.
    pub fn residual(&self, p: &ModelParams) -> f64 {
        let image = recursion_map(*self, p);
        ((image.x - self.x) / self.x).abs().max(((image.y - self.y) / self.y).abs())
    }
}

/// One step of the translation-invariant recursion:
/// `(x, y) ↦ (λF(x,y,θ)^k, λF(y,x,θ)^k)`, evaluated in the log domain.
pub fn recursion_map(bl: BoundaryLawPair, p: &ModelParams) -> BoundaryLawPair {
    let (lx, ly) = bl.log_fields();
    let theta = p.theta();
    let kf = p.kf();
    let ln_lambda = p.ln_lambda();
    BoundaryLawPair {
        x: (ln_lambda + kf * log_ratio(lx, ly, theta)).exp(),
        y: (ln_lambda + kf * log_ratio(ly, lx, theta)).exp(),
    }
}

/// Vertex-indexed log fields `(h̃₊,i, h̃₋,i)` on a ball `V_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldAssignment {
    tree: TreeIndex,
    fields: Vec<(f64, f64)>,
}

impl FieldAssignment {
    pub fn new(tree: TreeIndex, fields: Vec<(f64, f64)>) -> Result<Self> {
        if fields.len() != tree.len() {
            return Err(Error::Domain(format!(
                "field table has {} entries for a tree with {} vertices",
                fields.len(),
                tree.len()
            )));
        }
        if let Some(v) = fields.iter().position(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(Error::Domain(format!("non-finite field at vertex {v}")));
        }
        Ok(Self { tree, fields })
    }

    pub fn from_fn(tree: TreeIndex, mut field: impl FnMut(usize) -> (f64, f64)) -> Result<Self> {
        let fields = (0..tree.len()).map(&mut field).collect();
        Self::new(tree, fields)
    }

    /// Constant field `(ln x, ln y)` at every vertex.
    pub fn constant(tree: TreeIndex, law: BoundaryLawPair) -> Self {
        let f = law.log_fields();
        let fields = vec![f; tree.len()];
        Self { tree, fields }
    }

    /// Fixes the leaf fields and fills every interior vertex by the recursion, bottom-up.
    pub fn propagate_from_leaves(
        tree: TreeIndex,
        p: &ModelParams,
        kernel: Kernel,
        mut leaf: impl FnMut(usize) -> (f64, f64),
    ) -> Result<Self> {
        let mut fields = vec![(0.0, 0.0); tree.len()];
        for v in tree.shell(tree.depth()) {
            fields[v] = leaf(v);
        }
        let theta = p.theta();
        let ln_lambda = p.ln_lambda();
        for v in (0..tree.shell(tree.depth()).start).rev() {
            let (mut hp, mut hm) = (ln_lambda, ln_lambda);
            for c in tree.children(v) {
                let (cp, cm) = fields[c];
                hp += kernel(cp, cm, theta);
                hm += kernel(cm, cp, theta);
            }
            fields[v] = (hp, hm);
        }
        Self::new(tree, fields)
    }

    pub fn tree(&self) -> &TreeIndex {
        &self.tree
    }

    pub fn get(&self, vertex: usize) -> (f64, f64) {
        self.fields[vertex]
    }

    pub fn set(&mut self, vertex: usize, value: (f64, f64)) {
        self.fields[vertex] = value;
    }

    pub fn fields(&self) -> &[(f64, f64)] {
        &self.fields
    }

    /// The field as linear boundary-law values `(e^{h̃₊}, e^{h̃₋})` at a vertex.
    pub fn law(&self, vertex: usize) -> (f64, f64) {
        let (a, b) = self.fields[vertex];
        (a.exp(), b.exp())
    }

    /// Largest deviation from the recursion over all non-leaf vertices and both signs.
    pub fn recursion_residual(&self, p: &ModelParams) -> Result<f64> {
        field_recursion_residual(self, p)
    }

    /// Exchanges the `+` and `−` components everywhere.
    pub fn swapped(&self) -> Self {
        Self {
            tree: self.tree.clone(),
            fields: self.fields.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// Sup-norm distance to another assignment on the same tree.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.tree != other.tree {
            return Err(Error::Domain("field assignments live on different trees".into()));
        }
        Ok(self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
            .fold(0.0, f64::max))
    }
}

/// `max_{i non-leaf, ±} |h̃_{±,i} − ln λ − Σ_{j∈S(i)} f(h̃_{±,j}, h̃_{∓,j}, θ)|`.
pub fn field_recursion_residual(fa: &FieldAssignment, p: &ModelParams) -> Result<f64> {
    let tree = fa.tree();
    if tree.depth() < 1 {
        return Err(Error::Domain("recursion residual needs a ball of depth at least 1".into()));
    }
    let theta = p.theta();
    let ln_lambda = p.ln_lambda();
    let mut worst = 0.0f64;
    for v in 0..tree.shell(tree.depth()).start {
        let (mut hp, mut hm) = (ln_lambda, ln_lambda);
        for c in tree.children(v) {
            let (cp, cm) = fa.get(c);
            hp += log_ratio(cp, cm, theta);
            hm += log_ratio(cm, cp, theta);
        }
        let (vp, vm) = fa.get(v);
        worst = worst.max((vp - hp).abs()).max((vm - hm).abs());
    }
    Ok(worst)
}
