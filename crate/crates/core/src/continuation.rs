//! Numeric analytic continuation of a branch and the local obstruction test.
//!
//! Tracking is a tangent predictor with a Newton corrector in `T`. A step is
//! accepted only when the corrected root stays well separated from the other
//! roots of `P(x, .)`, which keeps the tracker on its own sheet.

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::BranchSpec;
use crate::error::{Error, Result};
use crate::exactpoly::{from_f64, to_f64, BiPoly, Rational};
use crate::numeric::{aberth, deflate, horner};
use crate::singularities::CandidateSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub newton_tol: f64,
    pub divergence_threshold: f64,
    /// Precision of certified candidate boxes and of rational waypoints.
    pub precision_bits: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            initial_step: 0.05,
            min_step: 1e-10,
            newton_tol: 1e-10,
            divergence_threshold: 1e8,
            precision_bits: 53,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return Err(Error::invalid("need 0 < min_step <= initial_step"));
        }
        if self.newton_tol.is_nan() || self.newton_tol <= 0.0 {
            return Err(Error::invalid("newton_tol must be positive"));
        }
        if self.divergence_threshold.is_nan() || self.divergence_threshold <= 0.0 {
            return Err(Error::invalid("divergence_threshold must be positive"));
        }
        Ok(())
    }
}

/// Polyline in the `x` plane with exact rational vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    waypoints: Vec<(Rational, Rational)>,
    clearance: f64,
}

impl Path {
    /// Builds a path and measures its clearance from every candidate box
    /// except `target`. Vertices are rounded to `bits` fractional bits.
    pub fn new(
        points: &[Complex64],
        candidates: &CandidateSet,
        target: Option<usize>,
        bits: u32,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a path needs at least one waypoint"));
        }
        let scale = (2f64).powi(bits.min(1000) as i32);
        let round = |v: f64| {
            let r = (v * scale).round() / scale;
            if r.is_finite() {
                from_f64(r)
            } else {
                from_f64(v)
            }
        };
        let waypoints: Vec<(Rational, Rational)> =
            points.iter().map(|z| (round(z.re), round(z.im))).collect();
        if waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("consecutive waypoints must be distinct"));
        }
        let pts: Vec<Complex64> = waypoints
            .iter()
            .map(|(a, b)| Complex64::new(to_f64(a), to_f64(b)))
            .collect();
        let mut clearance = f64::INFINITY;
        for (k, b) in candidates.boxes.iter().enumerate() {
            if Some(k) == target {
                continue;
            }
            let d = polyline_distance(&pts, b.center_f64()) - b.radius_f64();
            clearance = clearance.min(d);
        }
        if clearance <= 0.0 {
            return Err(Error::invalid("path touches a candidate singularity"));
        }
        Ok(Path {
            waypoints,
            clearance,
        })
    }

    pub fn waypoints(&self) -> &[(Rational, Rational)] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    fn points(&self) -> Vec<Complex64> {
        self.waypoints
            .iter()
            .map(|(a, b)| Complex64::new(to_f64(a), to_f64(b)))
            .collect()
    }
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = ((z - a) * ab.conj()).re / len2;
    (a + ab * s.clamp(0.0, 1.0) - z).norm()
}

fn polyline_distance(pts: &[Complex64], z: Complex64) -> f64 {
    if pts.len() == 1 {
        return (pts[0] - z).norm();
    }
    pts.windows(2)
        .map(|w| segment_distance(w[0], w[1], z))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug)]
enum TrackFailure {
    Diverged,
    Stalled(String),
}

impl From<TrackFailure> for Error {
    fn from(f: TrackFailure) -> Self {
        match f {
            TrackFailure::Diverged => Error::TrackingFailed("branch value diverged".into()),
            TrackFailure::Stalled(m) => Error::TrackingFailed(m),
        }
    }
}

/// Floating-point view of `P` for tracking.
struct Tracker<'a> {
    grid: Vec<Vec<f64>>,
    dgrid: Vec<Vec<f64>>,
    cfg: &'a TrackerConfig,
}

fn eval_real(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

impl<'a> Tracker<'a> {
    fn new(p: &BiPoly, cfg: &'a TrackerConfig) -> Self {
        Tracker {
            grid: p.to_f64_grid(),
            dgrid: p.derivative_x().to_f64_grid(),
            cfg,
        }
    }

    /// Coefficients of `P(x, .)`, low to high.
    fn fiber(&self, x: Complex64) -> Vec<Complex64> {
        self.grid.iter().map(|c| eval_real(c, x)).collect()
    }

    fn fiber_dx(&self, x: Complex64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.dgrid.iter().map(|c| eval_real(c, x)).collect();
        v.resize(self.grid.len(), Complex64::new(0.0, 0.0));
        v
    }

    fn slope(&self, x: Complex64, t: Complex64) -> Complex64 {
        let f = self.fiber(x);
        let df = derivative(&f);
        -horner(&self.fiber_dx(x), t) / horner(&df, t)
    }

    /// Newton in `T` at fixed `x`; returns the root and the first step size.
    fn correct(&self, x: Complex64, guess: Complex64) -> Option<(Complex64, f64)> {
        let f = self.fiber(x);
        let df = derivative(&f);
        let mut t = guess;
        let mut first = None;
        let mut last = f64::INFINITY;
        for _ in 0..12 {
            let step = horner(&f, t) / horner(&df, t);
            if !step.is_finite() {
                return None;
            }
            let s = step.norm();
            if s > last * 0.9 && s > self.cfg.newton_tol * t.norm().max(1.0) {
                return None;
            }
            last = s;
            t -= step;
            first.get_or_insert(s);
            if s <= self.cfg.newton_tol * t.norm().max(1.0) && self.residual_ok(&f, t) {
                return Some((t, first.unwrap()));
            }
        }
        None
    }

    fn residual_ok(&self, f: &[Complex64], t: Complex64) -> bool {
        let scale: f64 = f
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * t.norm().powi(j as i32))
            .sum();
        horner(f, t).norm() <= self.cfg.newton_tol * scale.max(f64::MIN_POSITIVE)
    }

    /// Distance from `t` to the nearest other root of `P(x, .)`.
    fn separation(&self, x: Complex64, t: Complex64) -> f64 {
        let q = deflate(&self.fiber(x), t);
        aberth(&q)
            .into_iter()
            .map(|r| (r - t).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn segment(
        &self,
        a: Complex64,
        b: Complex64,
        mut t: Complex64,
    ) -> std::result::Result<Complex64, TrackFailure> {
        let len = (b - a).norm();
        if len == 0.0 {
            return Ok(t);
        }
        let dir = (b - a) / len;
        let mut s = 0.0;
        let mut h = self.cfg.initial_step.min(len);
        while s < len {
            let h_eff = h.min(len - s);
            let x = a + dir * s;
            let x_new = if s + h_eff >= len {
                b
            } else {
                a + dir * (s + h_eff)
            };
            let pred = t + self.slope(x, t) * (x_new - x);
            let accepted = pred
                .is_finite()
                .then(|| self.correct(x_new, pred))
                .flatten()
                .filter(|(tn, first)| {
                    let basin = (tn - pred).norm().max(*first);
                    self.separation(x_new, *tn) > 3.0 * basin
                });
            match accepted {
                Some((tn, _)) => {
                    t = tn;
                    s += h_eff;
                    if t.norm() > self.cfg.divergence_threshold {
                        return Err(TrackFailure::Diverged);
                    }
                    h = (h * 2.0).min(self.cfg.initial_step);
                }
                None => {
                    h *= 0.5;
                    if h < self.cfg.min_step {
                        return Err(TrackFailure::Stalled(format!(
                            "step size underflow near x = {:.6}{:+.6}i",
                            x.re, x.im
                        )));
                    }
                }
            }
        }
        Ok(t)
    }

    fn polyline(
        &self,
        pts: &[Complex64],
        t: Complex64,
    ) -> std::result::Result<Complex64, TrackFailure> {
        let mut t = t;
        for w in pts.windows(2) {
            t = self.segment(w[0], w[1], t)?;
        }
        Ok(t)
    }

    fn roots_at(&self, x: Complex64) -> Vec<Complex64> {
        aberth(&self.fiber(x))
            .into_iter()
            .map(|r| self.correct(x, r).map_or(r, |(t, _)| t))
            .collect()
    }
}

fn derivative(f: &[Complex64]) -> Vec<Complex64> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * j as f64)
        .collect()
}

/// Continues the branch along `path` (which must start at 0) and returns its
/// value at the last waypoint.
pub fn track_root(b: &BranchSpec, path: &Path, cfg: &TrackerConfig) -> Result<Complex64> {
    cfg.validate()?;
    let pts = path.points();
    if pts[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::invalid("path must start at the origin"));
    }
    let tracker = Tracker::new(b.poly(), cfg);
    Ok(tracker.polyline(&pts, Complex64::new(to_f64(b.t0()), 0.0))?)
}

/// Vertices of a closed counter-clockwise circle starting at `start`.
fn circle(center: Complex64, start: Complex64, vertices: usize) -> Vec<Complex64> {
    let r = start - center;
    (0..=vertices)
        .map(|k| {
            if k == vertices {
                start
            } else {
                center
                    + r * Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * k as f64 / vertices as f64,
                    )
            }
        })
        .collect()
}

const LOOP_VERTICES: usize = 64;

/// Permutation of the roots of `P(base, .)` induced by going `loops` times
/// around `center` counter-clockwise. Roots are ordered by real then
/// imaginary part; entry `i` is the index reached from root `i`.
pub fn monodromy(
    p: &BiPoly,
    center: Complex64,
    base: Complex64,
    loops: usize,
    cfg: &TrackerConfig,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let tracker = Tracker::new(p, cfg);
    let mut roots = tracker.roots_at(base);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut path = Vec::new();
    for _ in 0..loops {
        path.extend(circle(center, base, LOOP_VERTICES));
    }
    path.dedup();
    let mut perm = Vec::with_capacity(roots.len());
    for &r in &roots {
        let end = tracker.polyline(&path, r)?;
        let (idx, _) = roots
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s - end).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::InternalInconsistency("empty fiber".into()))?;
        perm.push(idx);
    }
    Ok(perm)
}

/// Evidence gathered at one candidate singularity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub box_index: usize,
    pub obstructing: bool,
    pub delta: f64,
    pub monodromy_trivial: bool,
    pub leading_vanishes: bool,
    /// `|f|` at the radial approach points `c - (delta / 2^i) c/|c|`.
    pub radial_abs: Vec<f64>,
}

const RADIAL_STAGES: usize = 4;

/// Obstacle radius for each candidate: a quarter of its distance to the
/// nearest other candidate or the origin.
fn obstacle_radii(centres: &[Complex64]) -> Vec<f64> {
    centres
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let nearest = centres
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, d)| (c - d).norm())
                .fold(c.norm(), f64::min);
            nearest / 4.0
        })
        .collect()
}

/// Straight route from `a` to `b` with minor-arc detours around the given
/// discs; the result is homotopic to the straight segment.
fn route(a: Complex64, b: Complex64, discs: &[(Complex64, f64)]) -> Vec<Complex64> {
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let mut hits: Vec<(f64, Complex64, f64)> = discs
        .iter()
        .filter_map(|&(c, r)| {
            let s = ((c - a) * dir.conj()).re;
            let h = ((c - a) * dir.conj()).im;
            (h.abs() < r * 1.0001 && s > 0.0 && s < len).then_some((s, c, r * 1.0001))
        })
        .collect();
    hits.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut pts = vec![a];
    for (s, c, r) in hits {
        let h = ((c - a) * dir.conj()).im;
        let half = (r * r - h * h).max(0.0).sqrt();
        let entry = a + dir * (s - half);
        let exit = a + dir * (s + half);
        let a0 = (entry - c).arg();
        let mut a1 = (exit - c).arg();
        // The minor arc lies on the side of the chord away from the centre.
        let side = if h > 0.0 { -1.0 } else { 1.0 };
        if side > 0.0 {
            while a1 <= a0 {
                a1 += 2.0 * std::f64::consts::PI;
            }
        } else {
            while a1 >= a0 {
                a1 -= 2.0 * std::f64::consts::PI;
            }
        }
        let steps = 24;
        for k in 0..=steps {
            pts.push(c + Complex64::from_polar(r, a0 + (a1 - a0) * k as f64 / steps as f64));
        }
    }
    pts.push(b);
    pts.dedup();
    pts
}

/// Collects obstruction evidence for candidate `index`. The branch is
/// continued radially from the origin, detouring around other candidates,
/// which is valid when every candidate of smaller modulus is regular.
pub fn examine(
    b: &BranchSpec,
    candidates: &CandidateSet,
    index: usize,
    cfg: &TrackerConfig,
) -> Result<ObstructionReport> {
    cfg.validate()?;
    let bx = candidates
        .boxes
        .get(index)
        .ok_or_else(|| Error::invalid("candidate index out of range"))?;
    let centres: Vec<Complex64> = candidates.boxes.iter().map(|b| b.center_f64()).collect();
    let c = centres[index];
    let rho = c.norm();
    let radii = obstacle_radii(&centres);
    let delta = radii[index].min(rho / 2.0);
    if bx.radius_f64() * 16.0 > delta {
        return Err(Error::PrecisionExhausted {
            bits: cfg.precision_bits,
        });
    }
    let unit = c / rho;
    let approach = c - unit * delta;
    let discs: Vec<(Complex64, f64)> = centres
        .iter()
        .zip(&radii)
        .enumerate()
        .filter(|(j, _)| *j != index)
        .map(|(_, (c, r))| (*c, *r))
        .collect();
    let route_pts = route(Complex64::new(0.0, 0.0), approach, &discs);
    let path = Path::new(&route_pts, candidates, Some(index), cfg.precision_bits)?;
    let tracker = Tracker::new(b.poly(), cfg);
    let leading_vanishes = candidates.kinds[index].leading_vanishes;

    let start = Complex64::new(to_f64(b.t0()), 0.0);
    let t_approach = tracker.polyline(&path.points(), start)?;

    let sep = tracker.separation(approach, t_approach);
    let loop_end = tracker.polyline(&circle(c, approach, LOOP_VERTICES), t_approach);
    let monodromy_trivial = match loop_end {
        Ok(t) => (t - t_approach).norm() < sep / 2.0,
        Err(TrackFailure::Diverged) => false,
        Err(e) => return Err(e.into()),
    };
    let mut report = ObstructionReport {
        box_index: index,
        obstructing: !monodromy_trivial,
        delta,
        monodromy_trivial,
        leading_vanishes,
        radial_abs: vec![t_approach.norm()],
    };
    if !monodromy_trivial || !leading_vanishes {
        // Single-valued and bounded near the point means removable.
        return Ok(report);
    }

    let mut values = vec![t_approach];
    let mut x = approach;
    for i in 1..RADIAL_STAGES {
        let next = c - unit * (delta / 2f64.powi(i as i32));
        match tracker.segment(x, next, *values.last().unwrap()) {
            Ok(t) => values.push(t),
            Err(TrackFailure::Diverged) => {
                report.obstructing = true;
                report.radial_abs = values.iter().map(|v| v.norm()).collect();
                return Ok(report);
            }
            Err(e) => return Err(e.into()),
        }
        x = next;
    }
    report.radial_abs = values.iter().map(|v| v.norm()).collect();
    let growth = values.windows(2).all(|w| w[1].norm() >= 1.5 * w[0].norm());
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let settled = diffs.iter().all(|d| *d <= 10.0 * cfg.newton_tol * scale)
        || diffs.windows(2).all(|w| w[1] <= 0.75 * w[0]);
    if growth {
        report.obstructing = true;
        Ok(report)
    } else if settled {
        report.obstructing = false;
        Ok(report)
    } else {
        Err(Error::ObstructionUndecided(format!(
            "no clear growth or convergence approaching {:.6}{:+.6}i",
            c.re, c.im
        )))
    }
}

/// Whether the branch fails to continue holomorphically to candidate `index`.
pub fn is_obstructing(
    b: &BranchSpec,
    candidates: &CandidateSet,
    index: usize,
    cfg: &TrackerConfig,
) -> Result<bool> {
    examine(b, candidates, index, cfg).map(|r| r.obstructing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::validate_branch;
    use crate::exactpoly::{int, rat, UniPoly};

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pole_two_thirds() -> BiPoly {
        BiPoly::new(vec![u(&[-1]), UniPoly::new(vec![rat(2, 3), int(-1)])])
    }

    fn catalan() -> BiPoly {
        BiPoly::new(vec![u(&[1]), u(&[-1]), u(&[0, 1])])
    }

    fn two_branch() -> BiPoly {
        let lc = UniPoly::new(vec![rat(1, 2), rat(-3, 2), int(1)]);
        BiPoly::new(vec![u(&[1]), UniPoly::new(vec![rat(-3, 2), int(2)]), lc])
    }

    fn cubic() -> BiPoly {
        BiPoly::new(vec![u(&[0, -1]), u(&[-3]), u(&[]), u(&[1])])
    }

    fn track(p: &BiPoly, t0: Rational, pts: &[Complex64]) -> Complex64 {
        let b = validate_branch(p, &t0).unwrap();
        let cands = CandidateSet::compute(b.poly(), 53).unwrap();
        let path = Path::new(pts, &cands, None, 53).unwrap();
        track_root(&b, &path, &TrackerConfig::default()).unwrap()
    }

    #[test]
    fn tracks_closed_forms() {
        let v = track(
            &pole_two_thirds(),
            rat(3, 2),
            &[c(0.0, 0.0), c(1.0 / 3.0, 0.0)],
        );
        assert!((v - c(3.0, 0.0)).norm() < 1e-8);
        let sqrt = BiPoly::new(vec![u(&[-1, 1]), u(&[]), u(&[1])]);
        let v = track(&sqrt, int(1), &[c(0.0, 0.0), c(0.75, 0.0)]);
        assert!((v - c(0.5, 0.0)).norm() < 1e-8);
        let v = track(&catalan(), int(1), &[c(0.0, 0.0)]);
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn path_must_avoid_candidates() {
        let b = validate_branch(&catalan(), &int(1)).unwrap();
        let cands = CandidateSet::compute(b.poly(), 53).unwrap();
        assert!(Path::new(&[c(0.0, 0.0), c(0.5, 0.0)], &cands, None, 53).is_err());
        assert!(Path::new(&[c(0.0, 0.0), c(0.0, 0.0)], &cands, None, 53).is_err());
        let p = Path::new(&[c(0.0, 0.0), c(0.2, 0.0)], &cands, None, 53).unwrap();
        assert!((p.clearance() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn path_independence() {
        let cfg = TrackerConfig::default();
        let direct = track(&catalan(), int(1), &[c(0.0, 0.0), c(0.2, 0.1)]);
        let around = track(
            &catalan(),
            int(1),
            &[c(0.0, 0.0), c(-0.1, 0.0), c(-0.1, 0.2), c(0.2, 0.1)],
        );
        assert!((direct - around).norm() <= 10.0 * cfg.newton_tol);
        // closed form (1 - sqrt(1 - 4x)) / (2x)
        let x = c(0.2, 0.1);
        let exact = (1.0 - (1.0 - 4.0 * x).sqrt()) / (2.0 * x);
        assert!((direct - exact).norm() < 1e-8);
    }

    #[test]
    fn obstruction_examples() {
        let cfg = TrackerConfig::default();
        let cases: [(BiPoly, Rational, f64, bool); 5] = [
            (catalan(), int(1), 0.25, true),
            (two_branch(), int(1), 0.5, false),
            (two_branch(), int(1), 1.0, true),
            (two_branch(), int(2), 0.5, true),
            (pole_two_thirds(), rat(3, 2), 2.0 / 3.0, true),
        ];
        for (p, t0, at, expected) in cases {
            let b = validate_branch(&p, &t0).unwrap();
            let cands = CandidateSet::compute(b.poly(), 53).unwrap();
            let idx = cands
                .boxes
                .iter()
                .position(|bx| bx.contains_point(c(at, 0.0)))
                .unwrap();
            assert_eq!(
                is_obstructing(&b, &cands, idx, &cfg).unwrap(),
                expected,
                "{p} at {at}"
            );
        }
    }

    #[test]
    fn cubic_obstructs_at_both_candidates() {
        let cfg = TrackerConfig::default();
        let b = validate_branch(&cubic(), &int(0)).unwrap();
        let cands = CandidateSet::compute(b.poly(), 53).unwrap();
        for i in 0..cands.boxes.len() {
            assert!(is_obstructing(&b, &cands, i, &cfg).unwrap());
        }
    }

    #[test]
    fn monodromy_composes() {
        let cfg = TrackerConfig::default();
        let centre = c(0.25, 0.0);
        let base = c(0.125, 0.0);
        let once = monodromy(&catalan(), centre, base, 1, &cfg).unwrap();
        let twice = monodromy(&catalan(), centre, base, 2, &cfg).unwrap();
        assert_eq!(once, vec![1, 0]);
        let squared: Vec<usize> = (0..once.len()).map(|i| once[once[i]]).collect();
        assert_eq!(twice, squared);
    }
}
