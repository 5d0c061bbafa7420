//! Scalar root finding: a grid scan for sign changes, then bisection with a Newton polish.
//!
//! Tangencies are handled explicitly. A local extremum of `g` whose value is
//! within `tangent_tol` of zero is reported as a double root, and two adjacent
//! simple roots separated only by such a negligible bump are merged into one.

use serde::Serialize;

/// Spacing of the scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    /// Geometric spacing; both endpoints must be positive.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarRoot {
    pub value: f64,
    /// Set when the root is a (numerical) tangency.
    pub double: bool,
}

/// Relative width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-13;
/// Roots closer than this (relative) after polishing are merged.
pub const MERGE_TOL: f64 = 1e-7;

/// Grid scan settings for [`find_roots`].
#[derive(Debug, Clone, Copy)]
pub struct Scan {
    pub cells: usize,
    pub scale: GridScale,
    /// Absolute threshold on `|g|` at an extremum for it to count as a tangency.
    pub tangent_tol: f64,
}

pub fn grid(lo: f64, hi: f64, cells: usize, scale: GridScale) -> Vec<f64> {
    let cells = cells.max(1);
    match scale {
        GridScale::Linear => (0..=cells)
            .map(|i| if i == cells { hi } else { lo + (hi - lo) * i as f64 / cells as f64 })
            .collect(),
        GridScale::Log => {
            let (llo, lhi) = (lo.ln(), hi.ln());
            (0..=cells)
                .map(|i| match i {
                    0 => lo,
                    i if i == cells => hi,
                    i => (llo + (lhi - llo) * i as f64 / cells as f64).exp(),
                })
                .collect()
        }
    }
}

/// Bisection on a bracket with `g(lo)` and `g(hi)` of opposite sign.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    if g(hi) == 0.0 {
        return hi;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= BISECTION_TOL * lo.abs().max(hi.abs()) {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One Newton step with a central-difference slope, kept only if it stays in
/// `[lo, hi]` and does not increase `|g|`.
pub fn newton_polish(g: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
    let gx = g(x);
    if gx == 0.0 {
        return x;
    }
    let h = 1e-7 * x.abs().max(1e-12);
    let slope = (g(x + h) - g(x - h)) / (2.0 * h);
    if !(slope.is_finite() && slope != 0.0) {
        return x;
    }
    let cand = x - gx / slope;
    if cand >= lo && cand <= hi && g(cand).abs() <= gx.abs() {
        cand
    } else {
        x
    }
}

/// Golden-section search for the point of largest `sign · g` on `[lo, hi]`.
fn extremum(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, sign: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (sign * g(c), sign * g(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = sign * g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = sign * g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

/// All roots of `g` on `[lo, hi]` found by the scan, sorted increasingly.
pub fn find_roots(g: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: Scan) -> Vec<ScalarRoot> {
    let xs = grid(lo, hi, scan.cells, scan.scale);
    find_roots_on_grid(g, &xs, scan.tangent_tol)
}

/// As [`find_roots`] but on a caller-supplied increasing grid.
pub fn find_roots_on_grid(g: impl Fn(f64) -> f64, xs: &[f64], tangent_tol: f64) -> Vec<ScalarRoot> {
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots: Vec<ScalarRoot> = Vec::new();

    for i in 0..xs.len().saturating_sub(1) {
        let (a, b) = (xs[i], xs[i + 1]);
        let (ga, gb) = (gs[i], gs[i + 1]);
        if ga == 0.0 {
            roots.push(ScalarRoot { value: a, double: false });
        } else if gb != 0.0 && (ga < 0.0) != (gb < 0.0) {
            let r = bisect(&g, a, b);
            let r = newton_polish(&g, r, a, b);
            roots.push(ScalarRoot { value: r, double: false });
        }
    }
    if let (Some(&x), Some(&gx)) = (xs.last(), gs.last()) {
        if gx == 0.0 {
            roots.push(ScalarRoot { value: x, double: false });
        }
    }

    // extrema that touch zero without a sign change
    for i in 1..xs.len().saturating_sub(1) {
        let (gl, gm, gr) = (gs[i - 1], gs[i], gs[i + 1]);
        if gm == 0.0 || (gl < 0.0) != (gm < 0.0) || (gm < 0.0) != (gr < 0.0) {
            continue;
        }
        if gm.abs() <= gl.abs() && gm.abs() <= gr.abs() {
            let sign = if gm > 0.0 { -1.0 } else { 1.0 };
            let (x, gx) = extremum(&g, xs[i - 1], xs[i + 1], sign);
            if gx == 0.0 || (gx < 0.0) == (gm < 0.0) {
                if gx.abs() <= tangent_tol {
                    roots.push(ScalarRoot { value: x, double: true });
                }
            } else {
                // the extremum crosses zero between grid points: two simple roots
                roots.push(ScalarRoot { value: bisect(&g, xs[i - 1], x), double: false });
                roots.push(ScalarRoot { value: bisect(&g, x, xs[i + 1]), double: false });
            }
        }
    }

    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    merge_close(&g, roots, tangent_tol)
}

fn merge_close(g: &impl Fn(f64) -> f64, roots: Vec<ScalarRoot>, tangent_tol: f64) -> Vec<ScalarRoot> {
    let mut out: Vec<ScalarRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        if let Some(last) = out.last_mut() {
            let close = (r.value - last.value).abs() <= MERGE_TOL * last.value.abs().max(r.value.abs()).max(1e-300);
            let flat_between = !close && {
                let mid = g(0.5 * (last.value + r.value));
                let sign = if mid > 0.0 { 1.0 } else { -1.0 };
                let (_, peak) = extremum(g, last.value, r.value, sign);
                peak.abs() <= tangent_tol
            };
            if close || flat_between {
                let value = if last.double { last.value } else if r.double { r.value } else { 0.5 * (last.value + r.value) };
                *last = ScalarRoot { value, double: true };
                continue;
            }
        }
        out.push(r);
    }
    out
}
