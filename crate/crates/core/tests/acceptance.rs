//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde_json::Value;

use algradius::branch::{hensel_lift, validate_branch, verify_annihilation};
use algradius::cli::parse_polynomial;
use algradius::continuation::{track_root, Path, TrackerConfig};
use algradius::estimate::{cross_validate, hadamard_estimate, ratio_estimate, EstimateReport};
use algradius::exactpoly::{int, rat, BiPoly, Rational, UniPoly};
use algradius::radius::{radius_of, RadiusConfig, RadiusResult, RadiusValue};
use algradius::realalg::{isolate_real_roots, pair_product_poly, RealAlgebraic};
use algradius::reinhardt::{
    diagonal_exact_bound, directional_estimate, directional_profiles, log_convexity_check,
    multivariate_expand,
};
use algradius::singularities::CandidateSet;

const CLI_TIME_LIMIT: Duration = Duration::from_secs(1);
const CATALAN_HADAMARD_TOL: f64 = 0.02;
const CATALAN_RTOL: f64 = 0.05;
const GOLDEN_DECIMAL_TOL: f64 = 1e-9;
const GOLDEN_RATIO_TOL: f64 = 1e-8;
const CUBIC_HADAMARD_TOL: f64 = 0.05;
const DIRECTIONAL_TOL: f64 = 0.02;
const CONVEXITY_SLACK: f64 = 1e-6 + 0.02;
const ORACLE_GRID: f64 = 1e-4;
const ORACLE_REFINE: usize = 1000;
const RANDOM_POLYS: usize = 200;
const RANDOM_TRIPLES: usize = 5000;
const PATH_TOL_FACTOR: f64 = 10.0;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn u(c: &[i64]) -> UniPoly {
    UniPoly::from_ints(c)
}

fn pole() -> BiPoly {
    BiPoly::new(vec![u(&[-1]), UniPoly::new(vec![rat(2, 3), int(-1)])])
}

fn catalan() -> BiPoly {
    BiPoly::new(vec![u(&[1]), u(&[-1]), u(&[0, 1])])
}

fn fibonacci() -> BiPoly {
    BiPoly::new(vec![u(&[-1]), u(&[1, -1, -1])])
}

fn two_branch() -> BiPoly {
    BiPoly::new(vec![
        u(&[1]),
        UniPoly::new(vec![rat(-3, 2), int(2)]),
        UniPoly::new(vec![rat(1, 2), rat(-3, 2), int(1)]),
    ])
}

fn cubic() -> BiPoly {
    BiPoly::new(vec![u(&[0, -1]), u(&[-3]), u(&[]), u(&[1])])
}

fn entire() -> BiPoly {
    BiPoly::new(vec![u(&[-1, 0, -1]), u(&[1])])
}

fn square_root() -> BiPoly {
    BiPoly::new(vec![u(&[-1, 1]), u(&[]), u(&[1])])
}

fn finite_branches() -> Vec<(&'static str, BiPoly, Rational)> {
    vec![
        ("pole", pole(), rat(3, 2)),
        ("catalan", catalan(), int(1)),
        ("fibonacci", fibonacci(), int(1)),
        ("two-branch t0=1", two_branch(), int(1)),
        ("two-branch t0=2", two_branch(), int(2)),
        ("cubic", cubic(), int(0)),
    ]
}

fn rational_value(r: &RadiusResult) -> Option<Rational> {
    r.value.finite().and_then(|v| v.as_rational().cloned())
}

fn run_cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_algradius"))
        .args(args)
        .output()
        .map_err(fail)?;
    let elapsed = start.elapsed();
    ensure(
        out.status.success(),
        format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ),
    )?;
    Ok((serde_json::from_slice(&out.stdout).map_err(fail)?, elapsed))
}

fn point_interval(v: &Value, defining: &[i64], value: &str) -> Result<(), String> {
    let radius = &v["radius"];
    let got: Vec<i64> = radius["defining"]
        .as_array()
        .ok_or("missing defining polynomial")?
        .iter()
        .filter_map(Value::as_i64)
        .collect();
    ensure(got == defining, format!("defining {got:?}"))?;
    ensure(
        radius["interval"] == serde_json::json!([value, value]),
        format!("interval {}", radius["interval"]),
    )
}

fn criterion_1() -> Result<String, String> {
    let (v, t) = run_cli(&["--json", "radius", "--poly", "(2/3-X)*T-1", "--t0", "3/2"])?;
    point_interval(&v, &[-2, 3], "2/3")?;
    ensure(t < CLI_TIME_LIMIT, format!("took {t:?}"))?;
    Ok(format!(
        "radius 2/3, defining 3s-2, {:.0} ms",
        t.as_secs_f64() * 1e3
    ))
}

fn criterion_2() -> Result<String, String> {
    let r = radius_of(&catalan(), &int(1), &RadiusConfig::default()).map_err(fail)?;
    ensure(rational_value(&r) == Some(rat(1, 4)), "radius is not 1/4")?;
    let b = validate_branch(&catalan(), &int(1)).map_err(fail)?;
    let report = EstimateReport::new(&hensel_lift(&b, 1024)).map_err(fail)?;
    let h = report.hadamard.value();
    ensure(
        (h - 0.25).abs() <= CATALAN_HADAMARD_TOL * 0.25,
        format!("hadamard {h}"),
    )?;
    let check = cross_validate(
        &r.value,
        &report,
        CATALAN_RTOL,
        r.candidates.largest_modulus_f64(),
    )
    .map_err(fail)?;
    ensure(check.passed, "cross-validation failed")?;
    Ok(format!("radius 1/4, hadamard(1024) {h:.5}"))
}

fn criterion_3() -> Result<String, String> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let r = radius_of(&fibonacci(), &int(1), &RadiusConfig::default()).map_err(fail)?;
    let v = r.value.finite().ok_or("infinite radius")?;
    let coeffs: Vec<i64> = v
        .defining()
        .primitive_integer_coeffs()
        .iter()
        .map(|c| i64::try_from(c.clone()).unwrap_or(i64::MAX))
        .collect();
    ensure(
        coeffs == [-1, 1, 1] || coeffs == [1, -1, -1],
        format!("defining {coeffs:?}"),
    )?;
    let refined = v.refine(&rat(1, 1_000_000_000_000)).map_err(fail)?;
    let approx = refined.to_f64();
    ensure(
        (approx - golden).abs() <= GOLDEN_DECIMAL_TOL,
        format!("value {approx}"),
    )?;
    ensure(
        r.decimal == "0.618033988750",
        format!("decimal {}", r.decimal),
    )?;
    let b = validate_branch(&fibonacci(), &int(1)).map_err(fail)?;
    let ratio = ratio_estimate(&hensel_lift(&b, 64))
        .map_err(fail)?
        .ok_or("ratios did not settle")?;
    ensure(
        (ratio - golden).abs() <= GOLDEN_RATIO_TOL,
        format!("ratio {ratio}"),
    )?;
    Ok(format!("decimal {}, ratio(64) {ratio:.12}", r.decimal))
}

fn criterion_4() -> Result<String, String> {
    let cfg = RadiusConfig::default();
    let r = radius_of(&two_branch(), &int(1), &cfg).map_err(fail)?;
    ensure(rational_value(&r) == Some(int(1)), "t0=1 radius is not 1")?;
    let half = RealAlgebraic::from_rational(&rat(1, 2));
    let c = &r.candidates;
    let mi = c
        .moduli
        .iter()
        .position(|m| m.value.compare(&half) == Ordering::Equal)
        .ok_or("modulus 1/2 missing from the candidate set")?;
    let rejected = r
        .verdicts
        .iter()
        .any(|v| c.modulus_of_box(v.box_index) == Some(mi) && !v.obstructing);
    ensure(rejected, "modulus 1/2 was not rejected")?;
    let r2 = radius_of(&two_branch(), &int(2), &cfg).map_err(fail)?;
    ensure(
        rational_value(&r2) == Some(rat(1, 2)),
        "t0=2 radius is not 1/2",
    )?;
    Ok("t0=1 radius 1 past rejected 1/2; t0=2 radius 1/2".into())
}

fn criterion_5() -> Result<String, String> {
    let r = radius_of(&cubic(), &int(0), &RadiusConfig::default()).map_err(fail)?;
    ensure(rational_value(&r) == Some(int(2)), "radius is not 2")?;
    let b = validate_branch(&cubic(), &int(0)).map_err(fail)?;
    let h = hadamard_estimate(&hensel_lift(&b, 512))
        .map_err(fail)?
        .value();
    ensure(
        (h - 2.0).abs() <= CUBIC_HADAMARD_TOL * 2.0,
        format!("hadamard {h}"),
    )?;
    Ok(format!("radius 2, hadamard(512) {h:.4}"))
}

fn criterion_6() -> Result<String, String> {
    let (v, _) = run_cli(&[
        "--json",
        "radius",
        "--poly",
        "(2/3-X)*T-1",
        "--t0",
        "3/2",
        "--puiseux",
        "2",
    ])?;
    point_interval(&v, &[-4, 9], "4/9")?;
    Ok("radius 4/9".into())
}

fn criterion_7() -> Result<String, String> {
    let r = radius_of(&entire(), &int(1), &RadiusConfig::default()).map_err(fail)?;
    ensure(r.value.is_infinite(), "radius is finite")?;
    let b = validate_branch(&entire(), &int(1)).map_err(fail)?;
    let report = EstimateReport::new(&hensel_lift(&b, 64)).map_err(fail)?;
    ensure(
        report.hadamard.is_infinite(),
        "estimate is not flagged infinite",
    )?;
    let check =
        cross_validate(&r.value, &report, 0.1, r.candidates.largest_modulus_f64()).map_err(fail)?;
    ensure(check.passed, "cross-validation failed")?;
    Ok("radius inf, estimate flagged infinite".into())
}

fn criterion_8() -> Result<String, String> {
    let p = parse_polynomial("(1 - X1 - X2)*T - 1").map_err(fail)?;
    let s = multivariate_expand(&p, &int(1), 64).map_err(fail)?;
    let diag = [int(1), int(1)];
    let rho = directional_estimate(&s, &diag).map_err(fail)?.value();
    ensure(
        (rho - 0.5).abs() <= DIRECTIONAL_TOL * 0.5,
        format!("directional estimate {rho}"),
    )?;
    let cfg = RadiusConfig::default();
    let bound = diagonal_exact_bound(&p, &int(1), &diag, &cfg).map_err(fail)?;
    ensure(
        bound.finite().and_then(RealAlgebraic::as_rational) == Some(&rat(1, 2)),
        "diagonal bound is not 1/2",
    )?;
    let dirs: Vec<Vec<Rational>> = [
        (1, 1),
        (1, 2),
        (2, 1),
        (1, 3),
        (3, 1),
        (2, 3),
        (3, 2),
        (1, 4),
    ]
    .iter()
    .map(|&(a, b)| vec![int(a), int(b)])
    .collect();
    let profiles = directional_profiles(&p, &int(1), &dirs, 64, &cfg).map_err(fail)?;
    let conv = log_convexity_check(&profiles, CONVEXITY_SLACK).map_err(fail)?;
    ensure(
        conv.passed,
        format!("worst violation {}", conv.worst_violation),
    )?;
    Ok(format!(
        "rho(1,1) {rho:.4}, bound 1/2, {} triples convex",
        conv.triples_checked
    ))
}

/// `P(X, s(X)) mod X^(N+1)`, by Horner in `T` with truncated products.
fn residual(p: &BiPoly, s: &[Rational]) -> Vec<Rational> {
    let len = s.len();
    let mut acc = vec![Rational::zero(); len];
    for c in p.tcoeffs().iter().rev() {
        let mut next = vec![Rational::zero(); len];
        for (k, a) in c.coeffs().iter().enumerate().take(len) {
            next[k] = a.clone();
        }
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in s.iter().enumerate().take(len - i) {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    acc
}

fn criterion_9() -> Result<String, String> {
    let mut fixtures = finite_branches();
    fixtures.push(("entire", entire(), int(1)));
    fixtures.push(("square root", square_root(), int(1)));
    for (name, p, t0) in &fixtures {
        let b = validate_branch(p, t0).map_err(fail)?;
        let long = hensel_lift(&b, 64);
        let short = hensel_lift(&b, 32);
        ensure(
            verify_annihilation(&b, &long),
            format!("{name}: not annihilated"),
        )?;
        ensure(
            residual(p, long.coeffs()).iter().all(Zero::is_zero),
            format!("{name}: substitution residual is nonzero"),
        )?;
        ensure(
            short.coeffs() == &long.coeffs()[..33],
            format!("{name}: N=32 is not a prefix of N=64"),
        )?;
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Approximate real roots of `c` on `[lo, hi]` from sign changes on a grid
/// of the given step; zero samples are skipped.
fn scan(c: &[f64], lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    let mut roots = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for k in 0..=n {
        let x = (lo + k as f64 * step).min(hi);
        let s = sign(horner(c, x));
        if s == 0 {
            continue;
        }
        if let Some((px, ps)) = last {
            if ps != s {
                roots.push((px + x) / 2.0);
            }
        }
        last = Some((x, s));
    }
    roots
}

/// Brute-force oracle: a coarse grid scan, rescanned at a finer step around
/// every extremum of `c`, where two close roots could hide in one cell.
fn oracle_roots(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    let bound = 1.0 + c[..n].iter().map(|a| (a / c[n]).abs()).fold(0.0, f64::max);
    let lo = -bound - ORACLE_GRID;
    let hi = bound + ORACLE_GRID;
    let mut roots = scan(c, lo, hi, ORACLE_GRID);
    let dc: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| k as f64 * a)
        .collect();
    if dc.len() >= 2 {
        for e in scan(&dc, lo, hi, ORACLE_GRID) {
            let (a, b) = (e - 1.5 * ORACLE_GRID, e + 1.5 * ORACLE_GRID);
            if roots.iter().any(|&r| (a..=b).contains(&r)) {
                continue;
            }
            roots.extend(scan(c, a, b, ORACLE_GRID / ORACLE_REFINE as f64));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn criterion_10() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let mut pool: Vec<RealAlgebraic> = Vec::new();
    let mut total = 0;
    for case in 0..RANDOM_POLYS {
        let deg = rng.random_range(1..=6usize);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-10..=10)).collect();
        while c[deg] == 0 {
            c[deg] = rng.random_range(-10..=10);
        }
        let q = u(&c).squarefree_part();
        let roots = isolate_real_roots(&q).map_err(fail)?;
        let oracle = oracle_roots(&q.to_f64_coeffs());
        ensure(
            roots.len() == oracle.len(),
            format!(
                "case {case} {c:?}: {} roots isolated, oracle found {}",
                roots.len(),
                oracle.len()
            ),
        )?;
        for (k, (r, o)) in roots.iter().zip(&oracle).enumerate() {
            ensure(
                (r.to_f64() - o).abs() <= ORACLE_GRID,
                format!(
                    "case {case} {c:?}: root {k} at {} vs oracle {o}",
                    r.to_f64()
                ),
            )?;
        }
        for w in roots.windows(2) {
            ensure(
                w[0].compare(&w[1]) == Ordering::Less,
                format!("case {case}: roots out of order"),
            )?;
        }
        total += roots.len();
        pool.extend(roots);
    }
    ensure(pool.len() >= 3, "too few roots sampled")?;
    for _ in 0..RANDOM_TRIPLES {
        let i = rng.random_range(0..pool.len());
        let j = rng.random_range(0..pool.len());
        let k = rng.random_range(0..pool.len());
        let (a, b, c) = (&pool[i], &pool[j], &pool[k]);
        let ab = a.compare(b);
        ensure(ab == b.compare(a).reverse(), "compare is not antisymmetric")?;
        if ab != Ordering::Greater && b.compare(c) != Ordering::Greater {
            ensure(
                a.compare(c) != Ordering::Greater,
                "compare is not transitive",
            )?;
        }
    }
    Ok(format!(
        "{RANDOM_POLYS} polynomials, {total} roots, {RANDOM_TRIPLES} triples"
    ))
}

fn criterion_11() -> Result<String, String> {
    let cfg = TrackerConfig::default();
    let tol = PATH_TOL_FACTOR * cfg.newton_tol;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let cases = [
        (
            "catalan",
            catalan(),
            int(1),
            vec![c(0.0, 0.0), c(0.12, 0.1)],
            vec![c(0.0, 0.0), c(-0.1, 0.0), c(-0.1, 0.15), c(0.12, 0.1)],
        ),
        (
            "cubic",
            cubic(),
            int(0),
            vec![c(0.0, 0.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(0.0, 1.5), c(1.0, 1.0)],
        ),
    ];
    let mut worst: f64 = 0.0;
    for (name, p, t0, a, b) in &cases {
        let branch = validate_branch(p, t0).map_err(fail)?;
        let cands = CandidateSet::compute(p, cfg.precision_bits).map_err(fail)?;
        let ra = Path::new(a, &cands, None, cfg.precision_bits).map_err(fail)?;
        let rb = Path::new(b, &cands, None, cfg.precision_bits).map_err(fail)?;
        ensure(
            ra.clearance() > 0.0 && rb.clearance() > 0.0,
            format!("{name}: route without clearance"),
        )?;
        let va = track_root(&branch, &ra, &cfg).map_err(fail)?;
        let vb = track_root(&branch, &rb, &cfg).map_err(fail)?;
        let d = (va - vb).norm();
        ensure(d <= tol, format!("{name}: routes differ by {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max route difference {worst:.1e} (tol {tol:.0e})"))
}

fn criterion_12() -> Result<String, String> {
    let cfg = RadiusConfig::default();
    let mut checked = 0;
    for (name, p, t0) in finite_branches() {
        let r = radius_of(&p, &t0, &cfg).map_err(fail)?;
        let RadiusValue::Finite(v) = &r.value else {
            return Err(format!("{name}: infinite radius"));
        };
        let m = pair_product_poly(&r.candidates.d).map_err(fail)?;
        let target = m.compose_power(2).squarefree_part();
        let (_, rem) = target.div_rem(v.defining());
        ensure(
            rem.is_zero(),
            format!("{name}: {} does not divide", v.defining()),
        )?;
        checked += 1;
    }
    Ok(format!("{checked} finite radii"))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("rational pole via CLI", criterion_1),
        ("catalan", criterion_2),
        ("golden ratio", criterion_3),
        ("non-obstructing candidate", criterion_4),
        ("cubic", criterion_5),
        ("puiseux power via CLI", criterion_6),
        ("infinite radius", criterion_7),
        ("multivariate domain", criterion_8),
        ("annihilation and prefix stability", criterion_9),
        ("real root oracle", criterion_10),
        ("path independence", criterion_11),
        ("algebraic radius", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
