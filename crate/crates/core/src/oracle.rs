//! Exact finite-volume Gibbs measures by brute-force enumeration, the
//! compatibility check between consecutive volumes, and single-site marginals
//! computed from boundary laws.
//!
//! Configurations on `V_n` are indexed in mixed radix 3 with site 0 least
//! significant and digit `d` meaning spin `d − 1`. Because `V_m` is a prefix of
//! the vertex order, the restriction of configuration `c` to `V_m` is
//! `c mod 3^{|V_m|}`.
//!
//! Weights are `λ^{Σω²} · θ^{#opposite edges} · Π_{i∈W_n} e^{h_{ω_i,i}}` in the
//! gauge `h_0 = 0`, `h_± = h̃_± − ln λ`. At `θ = 0` opposite edges have weight
//! exactly zero.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::recursion::{recursion_map, BoundaryLawPair, FieldAssignment};
use crate::tree::TreeIndex;

/// Largest configuration count enumerated.
pub const STATE_LIMIT: u64 = 100_000_000;
/// Boundary laws whose fixed-point residual exceeds this are refused by the marginal formulas.
pub const VERIFIED_LAW_TOL: f64 = 1e-9;

const CHUNK: u64 = 1 << 15;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Boundary fields `h_{q,i}` on the outer shell `W_n`, stored as `[h₋₁, h₀, h₊₁]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFields {
    pub h: Vec<[f64; 3]>,
}

impl BoundaryFields {
    /// Fields from log boundary laws `(h̃₊, h̃₋)` per outer-shell vertex.
    pub fn from_tilde(tilde: impl IntoIterator<Item = (f64, f64)>, p: &ModelParams) -> Self {
        let ll = p.ln_lambda();
        Self { h: tilde.into_iter().map(|(hp, hm)| [hm - ll, 0.0, hp - ll]).collect() }
    }

    /// The same law at every one of `width` outer vertices.
    pub fn constant(law: BoundaryLawPair, width: usize, p: &ModelParams) -> Self {
        Self::from_tilde(std::iter::repeat_n(law.log_fields(), width), p)
    }

    /// No boundary field (`h ≡ 0`).
    pub fn zero(width: usize) -> Self {
        Self { h: vec![[0.0; 3]; width] }
    }

    /// The fields of `fa` on its shell `n`.
    pub fn from_assignment(fa: &FieldAssignment, n: usize, p: &ModelParams) -> Self {
        Self::from_tilde(fa.tree().shell(n).map(|v| fa.get(v)), p)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Marginal of a finite-volume measure on a sub-ball `V_m`.
#[derive(Debug, Clone, Serialize)]
pub struct BallMarginal {
    pub depth: usize,
    /// Indexed by configuration on `V_m`.
    pub probs: Vec<f64>,
}

/// An exactly enumerated finite-volume Gibbs measure on `V_n`.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteVolumeMeasure {
    pub tree: TreeIndex,
    pub params: ModelParams,
    pub fields: BoundaryFields,
    pub ln_z: f64,
    /// Per-site distribution over `[−1, 0, +1]`.
    pub site_marginals: Vec<[f64; 3]>,
    pub ball: Option<BallMarginal>,
    pub states: u64,
}

struct Model {
    n_sites: usize,
    ln_lambda: f64,
    ln_theta: Option<f64>,
    edges: Vec<(usize, usize)>,
    leaf_start: usize,
    fields: Vec<[f64; 3]>,
}

impl Model {
    fn new(tree: &TreeIndex, p: &ModelParams, fields: &BoundaryFields) -> Self {
        let edges = (1..tree.len()).map(|v| (tree.parent(v).unwrap(), v)).collect();
        let theta = p.theta();
        Self {
            n_sites: tree.len(),
            ln_lambda: p.ln_lambda(),
            ln_theta: (theta > 0.0).then(|| theta.ln()),
            edges,
            leaf_start: tree.shell(tree.depth()).start,
            fields: fields.h.clone(),
        }
    }

    /// Log weight of a configuration given as digits `0, 1, 2` for spins `−1, 0, +1`.
    fn log_weight(&self, digits: &[u8]) -> f64 {
        let mut occupied = 0usize;
        for &d in digits {
            occupied += (d != 1) as usize;
        }
        let mut opposite = 0usize;
        for &(a, b) in &self.edges {
            opposite += (digits[a] + digits[b] == 2 && digits[a] != 1) as usize;
        }
        let mut lw = self.ln_lambda * occupied as f64;
        if opposite > 0 {
            match self.ln_theta {
                None => return f64::NEG_INFINITY,
                Some(lt) => lw += lt * opposite as f64,
            }
        }
        for (i, h) in self.fields.iter().enumerate() {
            lw += h[digits[self.leaf_start + i] as usize];
        }
        lw
    }

    fn decode(&self, mut index: u64, digits: &mut [u8]) {
        for d in digits.iter_mut() {
            *d = (index % 3) as u8;
            index /= 3;
        }
    }

    fn increment(digits: &mut [u8]) {
        for d in digits.iter_mut() {
            if *d == 2 {
                *d = 0;
            } else {
                *d += 1;
                return;
            }
        }
    }
}

fn state_count(sites: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..sites {
        total = total.saturating_mul(3);
        if total > STATE_LIMIT {
            return Err(Error::StateSpace { sites, limit: STATE_LIMIT });
        }
    }
    Ok(total)
}

/// Number of configurations on `V_n` for the given tree shape, or a size error above [`STATE_LIMIT`].
pub fn configuration_count(k: usize, n: usize, root_degree: usize) -> Result<u64> {
    state_count(TreeIndex::new(k, n, root_degree)?.len())
}

/// Enumerates the measure on `V_n` of the tree with `k` successors per vertex
/// and `root_degree` at the root.
pub fn enumerate_measure(p: &ModelParams, fields: &BoundaryFields, n: usize, root_degree: usize) -> Result<FiniteVolumeMeasure> {
    let tree = TreeIndex::new(p.k() as usize, n, root_degree)?;
    enumerate_on(&tree, p, fields, None)
}

/// As [`enumerate_measure`] on an explicit tree, optionally recording the marginal on `V_m`.
pub fn enumerate_on(tree: &TreeIndex, p: &ModelParams, fields: &BoundaryFields, ball_depth: Option<usize>) -> Result<FiniteVolumeMeasure> {
    let states = state_count(tree.len())?;
    let width = tree.shell(tree.depth()).len();
    if fields.len() != width {
        return Err(Error::Domain(format!("{} boundary fields for an outer shell of {width} vertices", fields.len())));
    }
    if let Some(m) = ball_depth {
        if m > tree.depth() {
            return Err(Error::Domain(format!("ball depth {m} exceeds tree depth {}", tree.depth())));
        }
    }
    let model = Model::new(tree, p, fields);
    let sites = model.n_sites;
    let ball_size = ball_depth.map(|m| 3usize.pow(tree.ball(m).len() as u32));
    let chunks: Vec<(u64, u64)> = (0..states.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(states)))
        .collect();

    let shift = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut digits = vec![0u8; sites];
            model.decode(start, &mut digits);
            let mut best = f64::NEG_INFINITY;
            for _ in start..end {
                best = best.max(model.log_weight(&digits));
                Model::increment(&mut digits);
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::Domain("every configuration has zero weight".into()));
    }

    struct Acc {
        total: Neumaier,
        sites: Vec<[Neumaier; 3]>,
        ball: Vec<Neumaier>,
    }
    let fresh = || Acc {
        total: Neumaier::default(),
        sites: vec![[Neumaier::default(); 3]; sites],
        ball: vec![Neumaier::default(); ball_size.unwrap_or(0)],
    };
    let acc = chunks
        .par_iter()
        .fold(fresh, |mut acc, &(start, end)| {
            let mut digits = vec![0u8; sites];
            model.decode(start, &mut digits);
            for index in start..end {
                let lw = model.log_weight(&digits);
                if lw > f64::NEG_INFINITY {
                    let w = (lw - shift).exp();
                    acc.total.add(w);
                    for (s, &d) in acc.sites.iter_mut().zip(&digits) {
                        s[d as usize].add(w);
                    }
                    if let Some(size) = ball_size {
                        acc.ball[(index % size as u64) as usize].add(w);
                    }
                }
                Model::increment(&mut digits);
            }
            acc
        })
        .reduce(fresh, |mut a, b| {
            a.total.merge(&b.total);
            for (x, y) in a.sites.iter_mut().zip(&b.sites) {
                for q in 0..3 {
                    x[q].merge(&y[q]);
                }
            }
            for (x, y) in a.ball.iter_mut().zip(&b.ball) {
                x.merge(y);
            }
            a
        });

    let z = acc.total.value();
    let site_marginals = acc.sites.iter().map(|s| [s[0].value() / z, s[1].value() / z, s[2].value() / z]).collect();
    let ball = ball_depth.map(|m| BallMarginal { depth: m, probs: acc.ball.iter().map(|b| b.value() / z).collect() });
    Ok(FiniteVolumeMeasure {
        tree: tree.clone(),
        params: *p,
        fields: fields.clone(),
        ln_z: shift + z.ln(),
        site_marginals,
        ball,
        states,
    })
}

impl FiniteVolumeMeasure {
    /// Probability of a configuration given as spins in `{−1, 0, +1}`, one per vertex.
    pub fn probability(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.tree.len() || spins.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::Domain("configuration must assign a spin in {-1,0,1} to every vertex".into()));
        }
        let digits: Vec<u8> = spins.iter().map(|&s| (s + 1) as u8).collect();
        let model = Model::new(&self.tree, &self.params, &self.fields);
        Ok((model.log_weight(&digits) - self.ln_z).exp())
    }

    /// Distribution of the root spin over `[−1, 0, +1]`.
    pub fn root_marginal(&self) -> [f64; 3] {
        self.site_marginals[0]
    }
}

/// `max_σ |Σ_ω μ_n(σω) − μ_{n−1}(σ)|` for the measures built from the fields of
/// `fa` on shells `W_n` and `W_{n−1}`.
pub fn check_compatibility(p: &ModelParams, fa: &FieldAssignment, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("compatibility needs n >= 2, got {n}")));
    }
    let full = fa.tree();
    if n > full.depth() {
        return Err(Error::Domain(format!("field assignment has depth {}, need {n}", full.depth())));
    }
    let tree_n = full.truncate(n)?;
    let tree_m = full.truncate(n - 1)?;
    state_count(tree_n.len())?;
    let mu_n = enumerate_on(&tree_n, p, &BoundaryFields::from_assignment(fa, n, p), Some(n - 1))?;
    let mu_m = enumerate_on(&tree_m, p, &BoundaryFields::from_assignment(fa, n - 1, p), Some(n - 1))?;
    let a = &mu_n.ball.as_ref().expect("ball marginal requested").probs;
    let b = &mu_m.ball.as_ref().expect("ball marginal requested").probs;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn normalized_from_logs(logs: [f64; 3]) -> [f64; 3] {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w = logs.map(|l| (l - m).exp());
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Site distribution over `[−1, 0, +1]` when `root_degree` neighbors carry `neighbor`:
/// `μ(q) ∝ λ^{q²} B_q^{root_degree}` with `B₊ = 1+x+θy`, `B₀ = 1+x+y`, `B₋ = 1+θx+y`.
fn marginal_from_neighbor(neighbor: BoundaryLawPair, p: &ModelParams, root_degree: usize) -> [f64; 3] {
    let (x, y) = (neighbor.x, neighbor.y);
    let theta = p.theta();
    let r = root_degree as f64;
    let ll = p.ln_lambda();
    normalized_from_logs([
        ll + r * (1.0 + theta * x + y).ln(),
        r * (1.0 + x + y).ln(),
        ll + r * (1.0 + x + theta * y).ln(),
    ])
}

/// Single-site distribution over `[−1, 0, +1]` under the translation-invariant measure
/// of a verified fixed point.
pub fn marginal_from_boundary_law(bl: BoundaryLawPair, p: &ModelParams, root_degree: usize) -> Result<[f64; 3]> {
    let residual = bl.residual(p);
    if residual.is_nan() || residual > VERIFIED_LAW_TOL {
        return Err(Error::UnverifiedLaw { residual, threshold: VERIFIED_LAW_TOL });
    }
    Ok(marginal_from_neighbor(bl, p, root_degree))
}

/// Site distribution at a vertex carrying `own` whose neighbors carry `neighbor`,
/// for a verified 2-cycle `own = R(neighbor)`, `neighbor = R(own)`.
pub fn marginal_two_periodic(own: BoundaryLawPair, neighbor: BoundaryLawPair, p: &ModelParams, root_degree: usize) -> Result<[f64; 3]> {
    let rel = |a: BoundaryLawPair, b: BoundaryLawPair| ((a.x - b.x) / b.x).abs().max(((a.y - b.y) / b.y).abs());
    let residual = rel(recursion_map(neighbor, p), own).max(rel(recursion_map(own, p), neighbor));
    if residual.is_nan() || residual > VERIFIED_LAW_TOL {
        return Err(Error::UnverifiedLaw { residual, threshold: VERIFIED_LAW_TOL });
    }
    Ok(marginal_from_neighbor(neighbor, p, root_degree))
}

/// `P(σ₀ = +1)` for several measures at one root degree.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub root_degree: usize,
    /// `(label, P(σ₀ = +1))`, the two extremes first.
    pub entries: Vec<(String, f64)>,
    /// `μ₁*` gives the smallest and `μ₂*` the largest value.
    pub holds: bool,
}

/// Compares `P(σ₀ = +1)` under `μ₁*`, `μ₂*`, the diagonal measure, any 2-periodic
/// measures and (for root degree `k`) the path measure at `t = 1/2`.
///
/// Reported for root degree `k` and `k + 1` side by side.
pub fn marginal_ordering_probe(p: &ModelParams) -> Result<Vec<OrderingReport>> {
    let set = crate::tisgm::solve_tisgm(p)?;
    let pair = set.extreme_pair().ok_or_else(|| {
        Error::UnsupportedRegime("ordering probe needs an off-diagonal pair (non-uniqueness regime)".into())
    })?;
    let k = p.k() as usize;
    let periodic = crate::periodic::solve_two_periodic(p).ok();
    let path = crate::paths::PathSpec::from_t(0.5, 8, p.k())
        .and_then(|ps| crate::paths::solve_path_field(&ps, p, 1e-12))
        .ok();

    let mut out = Vec::new();
    for r in [k, k + 1] {
        let mut entries = vec![
            ("mu1".to_string(), marginal_from_boundary_law(pair, p, r)?[2]),
            ("mu2".to_string(), marginal_from_boundary_law(pair.swap(), p, r)?[2]),
        ];
        for d in set.diagonal_laws() {
            entries.push(("diagonal".to_string(), marginal_from_boundary_law(d, p, r)?[2]));
        }
        if let Some(rep) = &periodic {
            for c in rep.cycles() {
                let (even, odd) = c.laws();
                entries.push(("periodic_even".to_string(), marginal_two_periodic(even, odd, p, r)?[2]));
                entries.push(("periodic_odd".to_string(), marginal_two_periodic(odd, even, p, r)?[2]));
            }
        }
        if r == k {
            if let Some(sol) = &path {
                let (x, y) = sol.field.law(0);
                entries.push(("path_t0.5".to_string(), x / (1.0 + x + y)));
            }
        }
        let lo = entries[0].1;
        let hi = entries[1].1;
        let slack = 1e-12;
        let holds = entries.iter().all(|(_, v)| *v >= lo - slack && *v <= hi + slack);
        out.push(OrderingReport { root_degree: r, entries, holds });
    }
    Ok(out)
}
