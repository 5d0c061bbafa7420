//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Each line combines the library's own check (`wr_tree::verify`) with
//! independent reference values computed here: exact rationals, and constants
//! frozen from a 40-digit solve of the same equations in a separate tool.

#![allow(clippy::excessive_precision)]

use std::process::ExitCode;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wr_tree::oracle::{enumerate_measure, marginal_from_boundary_law, BoundaryFields};
use wr_tree::verify::{run_criterion, Level, VerifyConfig};
use wr_tree::*;

type Oracle = Vec<(&'static str, bool, String)>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn close(name: &'static str, got: f64, want: f64, tol: f64) -> (&'static str, bool, String) {
    let r = rel(got, want);
    (name, r <= tol, format!("{got:.17e} vs {want:.17e} (rel {r:.1e}, tol {tol:.0e})"))
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn p(k: u32, theta: f64, lambda: f64) -> ModelParams {
    ModelParams::new(k, theta, lambda).unwrap()
}

fn offdiagonal(k: u32, theta: f64, lambda: f64) -> Option<(f64, f64)> {
    let s = solve_tisgm(&p(k, theta, lambda)).ok()?;
    let l = *s.offdiagonal.first()?;
    Some((l.x.min(l.y), l.x.max(l.y)))
}

fn oracle_1() -> Oracle {
    let exact = Ratio::new(3i64, 2).pow(2);
    let got = critical_values(2, 0.0).unwrap().lambda_cr.unwrap();
    let (x1, x2) = offdiagonal(2, 0.0, 3.0).unwrap_or((f64::NAN, f64::NAN));
    vec![
        ("lambda_cr = (3/2)^2", got == ratio_f64(exact), format!("{got} vs {exact}")),
        close("x1 at lambda=3", x1, 0.422_082_440_385_453_457, 1e-12),
        close("x2 at lambda=3", x2, 2.369_205_407_092_466_546, 1e-12),
    ]
}

fn oracle_2() -> Oracle {
    // ((k+1)/k)^k / (k-1) at k=3
    let exact = Ratio::new(4i64, 3).pow(3) / Ratio::from_integer(2);
    let got = critical_values(3, 0.0).unwrap().lambda_cr.unwrap();
    let (x1, x2) = offdiagonal(3, 0.0, 32.0 / 27.0 * 1.0001).unwrap_or((f64::NAN, f64::NAN));
    vec![
        ("lambda_cr = 32/27", exact == Ratio::new(32, 27) && (got - ratio_f64(exact)).abs() <= 1e-12, format!("{got:.17e}")),
        close("x1 at 32/27*(1+1e-4)", x1, 0.491_406_203_650_831_224, 1e-10),
        close("x2 at 32/27*(1+1e-4)", x2, 0.508_727_128_694_913_627, 1e-10),
    ]
}

fn oracle_3() -> Oracle {
    let theta = Ratio::new(1i64, 5);
    let exact = Ratio::new(9i64, 4) / (Ratio::from_integer(1) - theta * 3);
    let got = critical_values(2, 0.2).unwrap().lambda_cr.unwrap();
    vec![
        ("rational value", exact == Ratio::new(45, 8), format!("{exact}")),
        // 0.2 is not a binary fraction, so the float closed form may land one ulp off
        ("lambda_cr(2, 0.2)", rel(got, 5.625) <= 2.0 * f64::EPSILON, format!("{got:.17e}")),
    ]
}

fn oracle_4() -> Oracle {
    let theta_cr = Ratio::new(2i64, 1) * Ratio::new(6i64, 4).pow(2) - Ratio::from_integer(1);
    let cv = critical_values(5, 5.0).unwrap();
    let s6 = 6f64.sqrt();
    let quad = |x: f64| 2.0 * x * x - 12.0 * x + 6.0;
    vec![
        ("theta_cr = 7/2", theta_cr == Ratio::new(7, 2) && cv.theta_cr_anti == Some(3.5), format!("{:?}", cv.theta_cr_anti)),
        ("3 ± √6 solve the critical quadratic", quad(3.0 + s6).abs() < 1e-12 && quad(3.0 - s6).abs() < 1e-12, String::new()),
        // tangencies of x = λ((1+6x)/(1+2x))^5 solved directly in (x, λ)
        close("lambda_cr,1", cv.lambda_cr_anti_low.unwrap_or(f64::NAN), 0.014_425_269_942_659_654_24, 1e-12),
        close("lambda_cr,2", cv.lambda_cr_anti_high.unwrap_or(f64::NAN), 0.023_773_248_575_858_864_28, 1e-12),
    ]
}

fn oracle_5() -> Oracle {
    // x > y forces F(x,y) < F(y,x) when θ > 1, so x − y and λ(F(x,y)^k − F(y,x)^k) differ in sign
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut bad = 0;
    for _ in 0..10_000 {
        let k = rng.gen_range(2..=8);
        let theta: f64 = rng.gen_range(1.0001..100.0);
        let (x, y): (f64, f64) = (rng.gen_range(-9.0..9.0f64).exp(), rng.gen_range(-9.0..9.0f64).exp());
        let f = |a: f64, b: f64| (1.0 + a + theta * b) / (1.0 + a + b);
        let rhs = f(x, y).powi(k) - f(y, x).powi(k);
        if x != y && (x - y) * rhs > 0.0 {
            bad += 1;
        }
    }
    vec![("sign argument on 10^4 points", bad == 0, format!("{bad} violations"))]
}

fn oracle_6() -> Oracle {
    let b = iterate_bounds(&p(2, 0.0, 3.0), 100_000, 1e-12).unwrap();
    let (x1, x2) = (0.422_082_440_385_453_457, 2.369_205_407_092_466_546);
    let want = [x1, x2, x1, x2];
    let err = b.as_array().iter().zip(want).map(|(a, w)| (a - w).abs()).fold(0.0, f64::max);
    vec![("quadruple vs reference laws", err <= 1e-10, format!("max deviation {err:.1e}"))]
}

/// Direct sum over all 3^10 configurations of the k=2, depth-2 ball with a
/// 3-child root, written independently of the library's enumerator.
fn naive_root_marginal(theta: f64, lambda: f64, law: (f64, f64)) -> [f64; 3] {
    let mut parent = vec![usize::MAX, 0, 0, 0];
    for v in 1..=3 {
        parent.push(v);
        parent.push(v);
    }
    let leaf = |v: usize| v >= 4;
    let mut m = [0.0; 3];
    for code in 0..3usize.pow(10) {
        let mut c = code;
        let spins: Vec<i32> = (0..10)
            .map(|_| {
                let s = (c % 3) as i32 - 1;
                c /= 3;
                s
            })
            .collect();
        let mut w = 1.0;
        for v in 0..10 {
            let s = spins[v];
            if s != 0 {
                w *= lambda;
            }
            if leaf(v) {
                w *= match s {
                    1 => law.0 / lambda,
                    -1 => law.1 / lambda,
                    _ => 1.0,
                };
            }
            if v > 0 && s * spins[parent[v]] == -1 {
                w *= theta;
            }
        }
        m[(spins[0] + 1) as usize] += w;
    }
    let z: f64 = m.iter().sum();
    m.map(|x| x / z)
}

fn oracle_7() -> Oracle {
    let mut out = Oracle::new();
    for (theta, lambda) in [(0.0, 3.0), (0.4, 2.0), (2.5, 0.7)] {
        let params = p(2, theta, lambda);
        let law = solve_tisgm(&params).unwrap().all_laws()[0];
        let naive = naive_root_marginal(theta, lambda, (law.x, law.y));
        let lib = enumerate_measure(&params, &BoundaryFields::constant(law, 6, &params), 2, 3).unwrap().root_marginal();
        let formula = marginal_from_boundary_law(law, &params, 3).unwrap();
        let d1 = naive.iter().zip(lib).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let d2 = naive.iter().zip(formula).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(("naive enumeration", d1 <= 1e-12 && d2 <= 1e-10, format!("theta={theta}: {d1:.1e} / {d2:.1e}")));
    }
    out
}

fn oracle_8() -> Oracle {
    let k = 6i64;
    let thr = Ratio::new(k * k - 6 * k + 1, (k + 1) * (k + 1));
    let w = periodic_window(6, 0.005).unwrap();
    let (lm, lp) = (w.lambda_minus.unwrap_or(f64::NAN), w.lambda_plus.unwrap_or(f64::NAN));
    let params = p(6, 0.005, 0.5 * (lm + lp));
    let rep = solve_two_periodic(&params).unwrap();
    let cyc = rep.cycles().next().copied();
    let (z, t) = cyc.map(|c| (c.z_even, c.z_odd)).unwrap_or((f64::NAN, f64::NAN));
    let (pe, po) = cyc
        .and_then(|c| periodic::hole_density_gap(&c, &params, 2).ok())
        .unwrap_or((f64::NAN, f64::NAN));
    vec![
        ("threshold = 1/49", thr == Ratio::new(1, 49) && rel(w.theta_threshold, 1.0 / 49.0) < 1e-15, format!("{}", w.theta_threshold)),
        // flip points: x = φ(x) with φ'(x) = −1
        close("lambda-", lm, 3.030_623_016_957_000_289, 1e-12),
        close("lambda+", lp, 10.196_605_774_243_084_727, 1e-12),
        close("cycle z", z, 0.466_338_089_568_163_489, 1e-10),
        close("cycle t", t, 1.273_588_881_902_073_898, 1e-10),
        close("P_even(0), root degree 2", pe, 0.154_689_265_913_810_983, 1e-10),
        close("P_odd(0), root degree 2", po, 0.115_762_980_019_146_500, 1e-10),
    ]
}

fn oracle_9() -> Oracle {
    let l = paths::lipschitz_constant(0.2).unwrap();
    let (x1, x2) = offdiagonal(2, 0.2, 6.0).unwrap_or((f64::NAN, f64::NAN));
    vec![
        close("2L(0.2) = 3 - √5", 2.0 * l, 3.0 - 5f64.sqrt(), 1e-15),
        close("x1 at lambda=6", x1, 1.989_570_320_597_528_302, 1e-12),
        close("x2 at lambda=6", x2, 3.373_876_248_534_830_300, 1e-12),
    ]
}

fn oracle_10() -> Oracle {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let theta: f64 = rng.gen_range(0.0..10.0);
        let (hp, hm): (f64, f64) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let naive = ((1.0 + hp.exp() + theta * hm.exp()) / (1.0 + hp.exp() + hm.exp())).ln();
        worst = worst.max((log_ratio(hp, hm, theta) - naive).abs());
    }
    vec![
        ("kernel vs naive formula on 10^4 points", worst <= 1e-12, format!("max deviation {worst:.1e}")),
        ("L(1/9) = 1/2", (paths::lipschitz_constant(1.0 / 9.0).unwrap() - 0.5).abs() < 1e-15, String::new()),
        ("L(4) = 1/3", (paths::lipschitz_constant(4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15, String::new()),
    ]
}

fn main() -> ExitCode {
    let cfg = VerifyConfig::new(Level::Full);
    let oracles: [fn() -> Oracle; 10] =
        [oracle_1, oracle_2, oracle_3, oracle_4, oracle_5, oracle_6, oracle_7, oracle_8, oracle_9, oracle_10];
    let mut failed = 0;
    for (i, oracle) in oracles.iter().enumerate() {
        let lib = run_criterion(i + 1, &cfg);
        let refs = oracle();
        let ok = lib.passed && refs.iter().all(|r| r.1);
        println!("{} criterion {:>2}: {} ({:.2} s)", if ok { "PASS" } else { "FAIL" }, lib.id, lib.title, lib.seconds);
        if !ok {
            failed += 1;
            for c in lib.checks.iter().filter(|c| !c.passed) {
                println!("       library check {}: {}", c.name, c.detail);
            }
            for (name, _, detail) in refs.iter().filter(|r| !r.1) {
                println!("       reference {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", oracles.len() - failed, oracles.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
