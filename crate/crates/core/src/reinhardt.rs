//! Multivariate branches and their convergence domains.
//!
//! The domain of a series in `X_1 .. X_n` is probed along rays `t * d`:
//! a Hadamard-type estimate from the absolute coefficient sums gives the
//! directional radius, and the exact radius of the restriction to the ray
//! bounds it from above.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::branch::validate_branch;
use crate::error::{Error, Result};
use crate::estimate::RadiusEstimate;
use crate::exactpoly::{ln_abs, to_f64, MultiPoly, Rational};
use crate::radius::{exact_radius, RadiusConfig, RadiusValue};

/// Default cap on the number of `X` variables.
pub const DEFAULT_MAX_VARS: usize = 3;

const BITS_PER_VAR: u32 = 21;

fn pack(x: &[u32]) -> u64 {
    x.iter().enumerate().fold(0u64, |acc, (i, &e)| {
        acc | (u64::from(e) << (BITS_PER_VAR * i as u32))
    })
}

fn unpack(key: u64, n: usize) -> Vec<u32> {
    let mask = (1u64 << BITS_PER_VAR) - 1;
    (0..n)
        .map(|i| ((key >> (BITS_PER_VAR * i as u32)) & mask) as u32)
        .collect()
}

/// Homogeneous polynomial keyed by packed exponents.
type Homogeneous = BTreeMap<u64, Rational>;

fn add_scaled(acc: &mut Homogeneous, a: &Homogeneous, b: &Homogeneous) {
    for (ka, ca) in a {
        for (kb, cb) in b {
            let e = acc.entry(ka + kb).or_insert_with(Rational::zero);
            *e += ca * cb;
        }
    }
}

fn add_multiple(acc: &mut Homogeneous, a: &Homogeneous, s: &Rational) {
    for (k, c) in a {
        *acc.entry(*k).or_insert_with(Rational::zero) += c * s;
    }
}

/// Truncated multivariate branch: coefficients `a_alpha` for `|alpha| <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries {
    nvars: usize,
    order: usize,
    /// `parts[k]`: nonzero coefficients of total degree `k`.
    parts: Vec<Homogeneous>,
}

impl MultiSeries {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, alpha: &[u32]) -> Rational {
        assert_eq!(alpha.len(), self.nvars, "multi-index length");
        let k: u32 = alpha.iter().sum();
        self.parts
            .get(k as usize)
            .and_then(|h| h.get(&pack(alpha)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero coefficients of total degree `k`.
    pub fn homogeneous(&self, k: usize) -> impl Iterator<Item = (Vec<u32>, &Rational)> {
        self.parts[k]
            .iter()
            .map(move |(key, c)| (unpack(*key, self.nvars), c))
    }

    /// All nonzero coefficients by increasing total degree.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, &Rational)> {
        (0..=self.order).flat_map(move |k| self.homogeneous(k))
    }
}

/// Branch coefficients through total degree `n`, lifted one homogeneous
/// degree at a time.
pub fn multivariate_expand(p: &MultiPoly, t0: &Rational, n: usize) -> Result<MultiSeries> {
    multivariate_expand_with_limit(p, t0, n, DEFAULT_MAX_VARS)
}

pub fn multivariate_expand_with_limit(
    p: &MultiPoly,
    t0: &Rational,
    n: usize,
    max_vars: usize,
) -> Result<MultiSeries> {
    let nv = p.nvars();
    if nv > max_vars {
        return Err(Error::invalid(format!(
            "{nv} variables exceed the limit of {max_vars}"
        )));
    }
    if p.is_zero() {
        return Err(Error::invalid("the zero polynomial annihilates everything"));
    }
    let p0 = p.at_origin();
    if !p0.eval(t0).is_zero() {
        return Err(Error::NotARoot);
    }
    let slope = p0.derivative().eval(t0);
    if slope.is_zero() {
        return Err(Error::RamifiedBranch(
            "t0 is a multiple root of P(0, T)".into(),
        ));
    }
    let d = p.deg_t().unwrap_or(0) as usize;

    // cparts[j][m]: degree-m part of the coefficient of T^j.
    let mut cparts: Vec<Vec<Homogeneous>> = vec![Vec::new(); d + 1];
    for (m, c) in p.terms() {
        let row = &mut cparts[m.t as usize];
        let k = m.x_degree() as usize;
        if row.len() <= k {
            row.resize(k + 1, Homogeneous::new());
        }
        row[k].insert(pack(&m.x), c.clone());
    }

    let point = |c: Rational| -> Homogeneous { [(0u64, c)].into_iter().collect() };
    let mut f: Vec<Homogeneous> = vec![point(t0.clone())];
    // pw[j][k]: degree-k part of f^j
    let mut pw: Vec<Vec<Homogeneous>> = (0..=d)
        .map(|j| vec![point(num_traits::pow(t0.clone(), j))])
        .collect();
    let t0_pows: Vec<Rational> = (0..=d).map(|j| num_traits::pow(t0.clone(), j)).collect();

    for k in 1..=n {
        let mut partial: Vec<Homogeneous> = vec![Homogeneous::new(); d + 1];
        for j in 2..=d {
            let mut acc = Homogeneous::new();
            add_multiple(&mut acc, &partial[j - 1], t0);
            for a in 1..k {
                add_scaled(&mut acc, &f[a], &pw[j - 1][k - a]);
            }
            partial[j] = acc;
        }
        let mut residual = Homogeneous::new();
        for (j, row) in cparts.iter().enumerate() {
            for (m, c) in row.iter().enumerate().take(k + 1) {
                if c.is_empty() {
                    continue;
                }
                let other = if m == 0 {
                    &partial[j]
                } else if j == 0 {
                    if m == k {
                        &pw[0][0]
                    } else {
                        continue;
                    }
                } else {
                    &pw[j][k - m]
                };
                add_scaled(&mut residual, c, other);
            }
        }
        let fk: Homogeneous = residual
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, c)| (key, -c / &slope))
            .collect();
        for j in 1..=d {
            let mut part = std::mem::take(&mut partial[j]);
            add_multiple(
                &mut part,
                &fk,
                &(&t0_pows[j - 1] * Rational::from_integer(j.into())),
            );
            part.retain(|_, c| !c.is_zero());
            pw[j].push(part);
        }
        pw[0].push(Homogeneous::new());
        f.push(fk);
    }
    f.iter_mut().for_each(|h| h.retain(|_, c| !c.is_zero()));
    Ok(MultiSeries {
        nvars: nv,
        order: n,
        parts: f,
    })
}

fn check_direction(d: &[Rational], n: usize) -> Result<()> {
    if d.len() != n {
        return Err(Error::invalid(format!(
            "direction needs {n} entries, got {}",
            d.len()
        )));
    }
    if d.iter().any(|x| !x.is_positive()) {
        return Err(Error::invalid("direction entries must be positive"));
    }
    Ok(())
}

/// Estimate of `sup { t : t*d in the domain }` from
/// `c_k(d) = sum_{|alpha|=k} |a_alpha| d^alpha` over `k` in `[N/2, N]`.
pub fn directional_estimate(s: &MultiSeries, d: &[Rational]) -> Result<RadiusEstimate> {
    check_direction(d, s.nvars)?;
    if s.order < 8 {
        return Err(Error::invalid("need total order at least 8"));
    }
    let ln_d: Vec<f64> = d.iter().map(ln_abs).collect();
    let mut best: Option<f64> = None;
    for k in s.order / 2..=s.order {
        let logs: Vec<f64> = s
            .homogeneous(k)
            .map(|(alpha, a)| {
                ln_abs(a)
                    + alpha
                        .iter()
                        .zip(&ln_d)
                        .map(|(&e, l)| e as f64 * l)
                        .sum::<f64>()
            })
            .collect();
        if logs.is_empty() || k == 0 {
            continue;
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ln_ck = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
        let rate = ln_ck / k as f64;
        best = Some(best.map_or(rate, |b| b.max(rate)));
    }
    Ok(match best {
        None => RadiusEstimate::Infinite,
        Some(r) => RadiusEstimate::Finite((-r).exp()),
    })
}

/// Exact radius of `S -> f(d_1 S, .., d_n S)`; an upper bound for the
/// directional radius along `d`.
pub fn diagonal_exact_bound(
    p: &MultiPoly,
    t0: &Rational,
    d: &[Rational],
    cfg: &RadiusConfig,
) -> Result<RadiusValue> {
    check_direction(d, p.nvars())?;
    let restricted = p.restrict_to_ray(d)?;
    let b = validate_branch(&restricted, t0)?;
    Ok(exact_radius(&b, cfg)?.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionalProfile {
    pub direction: Vec<Rational>,
    pub rho_estimate: RadiusEstimate,
    pub rho_upper: RadiusValue,
    /// `(upper - estimate) / upper` when both are finite.
    pub gap: Option<f64>,
    /// Set when `|gap|` exceeds [`GAP_FLAG`].
    pub gap_flagged: bool,
}

pub const GAP_FLAG: f64 = 0.05;

/// Expands once and profiles every direction in parallel.
pub fn directional_profiles(
    p: &MultiPoly,
    t0: &Rational,
    directions: &[Vec<Rational>],
    order: usize,
    cfg: &RadiusConfig,
) -> Result<Vec<DirectionalProfile>> {
    let s = multivariate_expand(p, t0, order)?;
    directions
        .par_iter()
        .map(|d| {
            let rho_estimate = directional_estimate(&s, d)?;
            let rho_upper = diagonal_exact_bound(p, t0, d, cfg)?;
            let gap = match (&rho_upper, rho_estimate) {
                (RadiusValue::Finite(u), RadiusEstimate::Finite(e)) => {
                    let u = u.to_f64();
                    Some((u - e) / u)
                }
                _ => None,
            };
            Ok(DirectionalProfile {
                direction: d.clone(),
                rho_estimate,
                rho_upper,
                gap,
                gap_flagged: gap.is_some_and(|g| g.abs() > GAP_FLAG),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityCheck {
    pub passed: bool,
    pub triples_checked: usize,
    /// Largest amount by which a sampled point fell below its chord.
    pub worst_violation: f64,
}

/// Checks that the sampled boundary points `rho(d) * d` bound a region that
/// is convex in logarithmic coordinates.
///
/// Scaling `d` moves the boundary point along the same ray, so each sample
/// reduces to `y = (ln d_i - ln d_n)_{i<n}` and `v = ln rho(d) + ln d_n`;
/// convexity of the region means `v` is concave in `y`. Every triple whose
/// middle point lies on the segment between the other two is checked
/// against its chord with the given additive slack.
pub fn log_convexity_check(profiles: &[DirectionalProfile], slack: f64) -> Result<ConvexityCheck> {
    let samples: Vec<(Vec<f64>, f64)> = profiles
        .iter()
        .filter_map(|p| match p.rho_estimate {
            RadiusEstimate::Finite(r) if r > 0.0 => {
                let eta: Vec<f64> = p.direction.iter().map(|x| to_f64(x).ln()).collect();
                let last = *eta.last()?;
                let y = eta[..eta.len() - 1].iter().map(|e| e - last).collect();
                Some((y, r.ln() + last))
            }
            _ => None,
        })
        .collect();
    if samples.len() < 3 {
        return Err(Error::InsufficientData);
    }
    let dist = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if dist(&samples[i].0, &samples[j].0) <= 1e-12 {
                return Err(Error::invalid(
                    "directions must be pairwise non-proportional",
                ));
            }
        }
    }
    let mut triples = 0;
    let mut worst = f64::NEG_INFINITY;
    for (i, (yi, vi)) in samples.iter().enumerate() {
        for (k, (yk, vk)) in samples.iter().enumerate() {
            if k <= i {
                continue;
            }
            let dir: Vec<f64> = yk.iter().zip(yi).map(|(a, b)| a - b).collect();
            let len2: f64 = dir.iter().map(|x| x * x).sum();
            for (j, (yj, vj)) in samples.iter().enumerate() {
                if j == i || j == k {
                    continue;
                }
                let off: Vec<f64> = yj.iter().zip(yi).map(|(a, b)| a - b).collect();
                let lambda = off.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() / len2;
                if !(lambda > 0.0 && lambda < 1.0) {
                    continue;
                }
                let resid: f64 = off
                    .iter()
                    .zip(&dir)
                    .map(|(a, b)| (a - lambda * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if resid > 1e-9 * (1.0 + len2.sqrt()) {
                    continue;
                }
                triples += 1;
                let chord = (1.0 - lambda) * vi + lambda * vk;
                worst = worst.max(chord - vj);
            }
        }
    }
    if triples == 0 {
        return Err(Error::InsufficientData);
    }
    Ok(ConvexityCheck {
        passed: worst <= slack,
        triples_checked: triples,
        worst_violation: worst,
    })
}
