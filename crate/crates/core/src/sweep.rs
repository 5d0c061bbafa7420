//! Parameter sweeps over `(θ, λ)` grids and sampled critical curves, with
//! deterministic CSV and JSON output.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::periodic::periodic_window;
use crate::tisgm::{classify_phase, critical_values};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// `steps` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn points(&self, scale: Scale) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match (i, scale) {
                    (0, _) => self.lo,
                    (i, _) if i == n - 1 => self.hi,
                    (_, Scale::Linear) => self.lo + (self.hi - self.lo) * s,
                    (_, Scale::Log) => (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * s).exp(),
                }
            })
            .collect()
    }

    fn validate(&self, name: &str, positive: bool) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Usage(format!("{name} range needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::Usage(format!("{name} range needs finite lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.lo < 0.0 || (positive && self.lo <= 0.0) {
            return Err(Error::Usage(format!("{name} range must be positive, got lo = {}", self.lo)));
        }
        Ok(())
    }
}

/// A rectangular `(θ, λ)` grid at fixed `k`. `θ` is always linear; `scale` applies to `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub k: u32,
    pub theta: AxisRange,
    pub lambda: AxisRange,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Usage(format!("sweeps need k >= 2, got {}", self.k)));
        }
        self.theta.validate("theta", false)?;
        self.lambda.validate("lambda", true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u32,
    pub theta: f64,
    pub lambda: f64,
    pub count: &'static str,
    pub theorem: &'static str,
    pub residual: f64,
    pub solutions: usize,
    pub consistent: bool,
}

/// Classifies every grid point; rows are `θ`-major regardless of evaluation order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let thetas = spec.theta.points(Scale::Linear);
    let lambdas = spec.lambda.points(spec.scale);
    let grid: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| lambdas.iter().map(move |&l| (t, l))).collect();
    grid.par_iter()
        .map(|&(theta, lambda)| {
            let p = ModelParams::new(spec.k, theta, lambda)?;
            let r = classify_phase(&p)?;
            Ok(SweepRow {
                k: spec.k,
                theta,
                lambda,
                count: r.count.label(),
                theorem: r.deciding_theorem.label(),
                residual: r.solutions.residual,
                solutions: r.solutions.count(),
                consistent: r.consistent,
            })
        })
        .collect()
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("k,theta,lambda,count,theorem,residual,solutions,consistent\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.k,
            fmt_f64(r.theta),
            fmt_f64(r.lambda),
            r.count,
            r.theorem,
            fmt_f64(r.residual),
            r.solutions,
            r.consistent
        );
    }
    s
}

/// Which family of closed-form curves to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRegime {
    /// `λ_{cr,1}(θ)`, `λ_{cr,2}(θ)` for `θ > θ_cr`.
    Antiferro,
    /// `λ_cr(θ)` and, for `k ≥ 4`, `λ'_cr(θ)`.
    Ferro,
    /// `λ⁻(θ)`, `λ⁺(θ)` of the 2-periodic window.
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_cr_anti_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_cr_anti_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_cr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_cr_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_plus: Option<f64>,
    /// The lower curve lies below the upper one at this `θ`.
    pub ordered: bool,
    /// Each curve moved in its expected direction since the previous row.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub k: u32,
    pub regime: CurveRegime,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub rows: Vec<CurveRow>,
}

/// The natural open `θ` interval of a regime.
pub fn default_theta_range(k: u32, regime: CurveRegime) -> Result<(f64, f64)> {
    let kf = k as f64;
    match regime {
        CurveRegime::Antiferro => {
            let theta_cr = 2.0 * ((kf + 1.0) / (kf - 1.0)).powi(2) - 1.0;
            Ok((theta_cr, 3.0 * theta_cr))
        }
        CurveRegime::Ferro => {
            if k >= 4 {
                Ok((0.0, (kf - 1.0) / kf))
            } else {
                Ok((0.0, (kf - 1.0) / (kf + 1.0)))
            }
        }
        CurveRegime::Periodic => {
            let w = periodic_window(k, 0.0)?;
            if let Some(v) = w.violated {
                return Err(Error::UnsupportedRegime(format!("no periodic window for k={k}: {v}")));
            }
            Ok((0.0, w.theta_threshold))
        }
    }
}

/// Samples the curves of `regime` at `steps` interior points of `(theta_lo, theta_hi)`.
pub fn critical_curves(k: u32, regime: CurveRegime, steps: usize, range: Option<(f64, f64)>) -> Result<CurveTable> {
    if k < 2 {
        return Err(Error::Usage(format!("curves need k >= 2, got k={k}")));
    }
    if steps < 2 {
        return Err(Error::Usage(format!("curves need at least 2 theta steps, got {steps}")));
    }
    let natural = default_theta_range(k, regime)?;
    let (lo, hi) = range.unwrap_or(natural);
    if !(hi > lo && lo >= 0.0) {
        return Err(Error::Usage(format!("theta range needs 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let mut rows: Vec<CurveRow> = Vec::with_capacity(steps);
    for i in 1..=steps {
        let theta = lo + (hi - lo) * i as f64 / (steps + 1) as f64;
        let mut row = CurveRow {
            theta,
            lambda_cr_anti_low: None,
            lambda_cr_anti_high: None,
            lambda_cr: None,
            lambda_cr_prime: None,
            s_minus: None,
            s_plus: None,
            lambda_minus: None,
            lambda_plus: None,
            ordered: true,
            monotone: true,
        };
        match regime {
            CurveRegime::Antiferro => {
                if theta <= 1.0 {
                    return Err(Error::UnsupportedRegime(format!("antiferromagnetic curves need theta > 1, got {theta}")));
                }
                let cv = critical_values(k, theta)?;
                row.lambda_cr_anti_low = cv.lambda_cr_anti_low;
                row.lambda_cr_anti_high = cv.lambda_cr_anti_high;
                if let (Some(a), Some(b)) = (cv.lambda_cr_anti_low, cv.lambda_cr_anti_high) {
                    row.ordered = a < b;
                }
            }
            CurveRegime::Ferro => {
                if theta >= 1.0 {
                    return Err(Error::UnsupportedRegime(format!("ferromagnetic curves need theta < 1, got {theta}")));
                }
                let cv = critical_values(k, theta)?;
                row.lambda_cr = cv.lambda_cr;
                row.lambda_cr_prime = cv.lambda_cr_prime;
                if let (Some(a), Some(b)) = (cv.lambda_cr_prime, cv.lambda_cr) {
                    row.ordered = a < b;
                }
                if let Some(prev) = rows.last() {
                    let up = |new: Option<f64>, old: Option<f64>| match (new, old) {
                        (Some(n), Some(o)) => n > o,
                        _ => true,
                    };
                    row.monotone = up(row.lambda_cr, prev.lambda_cr) && up(row.lambda_cr_prime, prev.lambda_cr_prime);
                }
            }
            CurveRegime::Periodic => {
                let w = periodic_window(k, theta)?;
                if let Some(v) = &w.violated {
                    return Err(Error::UnsupportedRegime(format!("no periodic window at theta={theta}: {v}")));
                }
                row.s_minus = w.s_minus;
                row.s_plus = w.s_plus;
                row.lambda_minus = w.lambda_minus;
                row.lambda_plus = w.lambda_plus;
                row.ordered = matches!((w.lambda_minus, w.lambda_plus), (Some(a), Some(b)) if a < b);
            }
        }
        rows.push(row);
    }
    Ok(CurveTable { k, regime, theta_lo: lo, theta_hi: hi, rows })
}

pub fn curves_csv(table: &CurveTable) -> String {
    type Col = (&'static str, fn(&CurveRow) -> Option<f64>);
    let cols: Vec<Col> = match table.regime {
        CurveRegime::Antiferro => vec![
            ("lambda_cr_anti_low", |r| r.lambda_cr_anti_low),
            ("lambda_cr_anti_high", |r| r.lambda_cr_anti_high),
        ],
        CurveRegime::Ferro if table.k >= 4 => {
            vec![("lambda_cr", |r| r.lambda_cr), ("lambda_cr_prime", |r| r.lambda_cr_prime)]
        }
        CurveRegime::Ferro => vec![("lambda_cr", |r| r.lambda_cr)],
        CurveRegime::Periodic => vec![
            ("s_minus", |r| r.s_minus),
            ("s_plus", |r| r.s_plus),
            ("lambda_minus", |r| r.lambda_minus),
            ("lambda_plus", |r| r.lambda_plus),
        ],
    };
    let mut s = String::from("theta");
    for (name, _) in &cols {
        s.push(',');
        s.push_str(name);
    }
    s.push_str(",ordered,monotone\n");
    for r in &table.rows {
        s.push_str(&fmt_f64(r.theta));
        for (_, get) in &cols {
            s.push(',');
            s.push_str(&fmt_opt(get(r)));
        }
        let _ = writeln!(s, ",{},{}", r.ordered, r.monotone);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_grid_has_four_rows() {
        let spec = SweepSpec {
            k: 2,
            theta: AxisRange { lo: 0.0, hi: 0.2, steps: 2 },
            lambda: AxisRange { lo: 1.0, hi: 10.0, steps: 2 },
            scale: Scale::Log,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].theta, rows[0].lambda), (0.0, 1.0));
        assert_eq!((rows[1].theta, rows[1].lambda), (0.0, 10.0));
        assert_eq!(rows[3].count, "3");
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv, sweep_csv(&run_sweep(&spec).unwrap()));
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SweepSpec {
            k: 2,
            theta: AxisRange { lo: 0.0, hi: 0.2, steps: 1 },
            lambda: AxisRange { lo: 1.0, hi: 10.0, steps: 2 },
            scale: Scale::Linear,
        };
        assert!(matches!(run_sweep(&spec), Err(Error::Usage(_))));
        spec.theta.steps = 3;
        spec.lambda.lo = 0.0;
        assert!(matches!(run_sweep(&spec), Err(Error::Usage(_))));
    }

    #[test]
    fn k5_antiferro_regions() {
        let spec = SweepSpec {
            k: 5,
            theta: AxisRange { lo: 1.1, hi: 8.0, steps: 6 },
            lambda: AxisRange { lo: 1e-3, hi: 1.0, steps: 25 },
            scale: Scale::Log,
        };
        for r in run_sweep(&spec).unwrap() {
            assert!(r.consistent);
            let expected = match critical_values(5, r.theta).unwrap() {
                c if c.lambda_cr_anti_low.is_some_and(|lo| r.lambda > lo) && c.lambda_cr_anti_high.is_some_and(|hi| r.lambda < hi) => "3",
                _ => "1",
            };
            assert_eq!(r.count, expected, "theta={} lambda={}", r.theta, r.lambda);
        }
    }

    #[test]
    fn curves_match_library_exactly() {
        let t = critical_curves(2, CurveRegime::Ferro, 10, None).unwrap();
        let csv = curves_csv(&t);
        for (line, row) in csv.lines().skip(1).zip(&t.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            let theta: f64 = fields[0].parse().unwrap();
            let lam: f64 = fields[1].parse().unwrap();
            assert_eq!(theta, row.theta);
            assert_eq!(lam, critical_values(2, theta).unwrap().lambda_cr.unwrap());
            assert_eq!(lam, 9.0 / 4.0 / (1.0 - 3.0 * theta) * (1.0 + 0.0));
        }
        assert!(t.rows.iter().all(|r| r.monotone && r.ordered));
    }

    #[test]
    fn periodic_curves() {
        let t = critical_curves(6, CurveRegime::Periodic, 20, None).unwrap();
        assert!(t.rows.iter().all(|r| r.ordered && r.theta < 1.0 / 49.0));
        let err = critical_curves(5, CurveRegime::Periodic, 20, None).unwrap_err();
        assert!(err.to_string().contains("k^2 - 6k + 1"));
    }

    #[test]
    fn ferro_k8_two_curves() {
        let t = critical_curves(8, CurveRegime::Ferro, 30, None).unwrap();
        assert!(t.rows.iter().all(|r| r.ordered));
        assert!(t.rows.iter().any(|r| r.lambda_cr.is_none() && r.lambda_cr_prime.is_some()));
    }
}
