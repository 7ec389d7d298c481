//! Exact convergence radius of a branch.
//!
//! Candidate moduli are scanned in increasing order; the first one owning a
//! candidate at which the branch obstructs is the radius. The result is then
//! checked against a Hadamard estimate from the lifted coefficients.

use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{hensel_lift, validate_branch, BranchSpec};
use crate::continuation::{examine, ObstructionReport, TrackerConfig};
use crate::error::{Error, Result};
use crate::estimate::{cross_validate, CrossCheck, EstimateReport, RadiusEstimate};
use crate::exactpoly::{BiPoly, Rational};
use crate::realalg::RealAlgebraic;
use crate::singularities::{CandidateSet, ComplexBox};

#[derive(Clone, Debug, PartialEq)]
pub enum RadiusValue {
    Finite(RealAlgebraic),
    Infinite,
}

impl RadiusValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RadiusValue::Infinite)
    }

    pub fn finite(&self) -> Option<&RealAlgebraic> {
        match self {
            RadiusValue::Finite(r) => Some(r),
            RadiusValue::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.finite().map_or(f64::INFINITY, RealAlgebraic::to_f64)
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        self.finite()
            .map_or_else(|| "inf".to_string(), |r| r.to_decimal(digits))
    }

    /// `r^p`, with `inf^p = inf`.
    pub fn pow(&self, p: u32) -> Result<Self> {
        Ok(match self {
            RadiusValue::Finite(r) => RadiusValue::Finite(r.pow(p)?),
            RadiusValue::Infinite => RadiusValue::Infinite,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusConfig {
    pub tracker: TrackerConfig,
    pub digits: usize,
    pub rtol: f64,
    /// Order of the truncation used by the cross-validation gate; 0 disables it.
    pub check_order: usize,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        RadiusConfig {
            tracker: TrackerConfig::default(),
            digits: 12,
            rtol: 0.1,
            check_order: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusResult {
    pub value: RadiusValue,
    /// Radius of the series annihilated by the input; differs from `value`
    /// only for Puiseux problems, where `value = base^p`.
    pub base: RadiusValue,
    pub power: u32,
    pub obstructing_box: Option<ComplexBox>,
    pub candidates: CandidateSet,
    pub decimal: String,
    pub cross_check: Option<CrossCheck>,
    /// Evidence for every candidate examined, in scan order.
    pub verdicts: Vec<ObstructionReport>,
}

/// Frontier of a scan that could not be decided.
#[derive(Clone, Debug, PartialEq)]
pub struct UndecidedReport {
    pub modulus: RealAlgebraic,
    pub hadamard: Option<RadiusEstimate>,
    pub reason: String,
}

/// Exact radius of the branch through `b`.
pub fn exact_radius(b: &BranchSpec, cfg: &RadiusConfig) -> Result<RadiusResult> {
    cfg.tracker.validate()?;
    let candidates = CandidateSet::compute(b.poly(), cfg.tracker.precision_bits)?;
    let mut verdicts = Vec::new();
    let mut found = None;
    for (mi, m) in candidates.moduli.iter().enumerate() {
        let outcomes: Vec<Result<ObstructionReport>> = m
            .boxes
            .par_iter()
            .map(|&i| examine(b, &candidates, i, &cfg.tracker))
            .collect();
        let mut failure = None;
        for o in outcomes {
            match o {
                Ok(r) => verdicts.push(r),
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        let hit = m
            .boxes
            .iter()
            .find(|&&i| verdicts.iter().any(|v| v.box_index == i && v.obstructing));
        if let Some(&i) = hit {
            found = Some((mi, i));
            break;
        }
        if let Some(e) = failure {
            return Err(undecided(b, cfg, &m.value, e));
        }
    }

    let (value, obstructing_box) = match found {
        Some((mi, i)) => (
            RadiusValue::Finite(candidates.moduli[mi].value.clone()),
            Some(candidates.boxes[i].clone()),
        ),
        None => (RadiusValue::Infinite, None),
    };
    let decimal = value.to_decimal(cfg.digits);
    let mut result = RadiusResult {
        base: value.clone(),
        value,
        power: 1,
        obstructing_box,
        candidates,
        decimal,
        cross_check: None,
        verdicts,
    };
    if cfg.check_order > 0 {
        let report = EstimateReport::new(&hensel_lift(b, cfg.check_order))?;
        let check = cross_validate(
            &result.base,
            &report,
            cfg.rtol,
            result.candidates.largest_modulus_f64(),
        )?;
        let passed = check.passed;
        result.cross_check = Some(check);
        if !passed {
            return Err(Error::CrossValidationFailed(Box::new(result)));
        }
    }
    Ok(result)
}

fn undecided(b: &BranchSpec, cfg: &RadiusConfig, modulus: &RealAlgebraic, cause: Error) -> Error {
    match cause {
        Error::ObstructionUndecided(reason) | Error::TrackingFailed(reason) => {
            let order = cfg.check_order.max(64);
            let hadamard = EstimateReport::new(&hensel_lift(b, order))
                .ok()
                .map(|r| r.hadamard);
            Error::Undecided(Box::new(UndecidedReport {
                modulus: modulus.clone(),
                hadamard,
                reason,
            }))
        }
        other => other,
    }
}

/// Radius `R(f)^p` of the Puiseux series `f(X^(1/p))`, where `f` is the
/// branch of `q` through `t0`.
pub fn puiseux_radius(
    q: &BiPoly,
    p: u32,
    t0: &Rational,
    cfg: &RadiusConfig,
) -> Result<RadiusResult> {
    if p < 1 {
        return Err(Error::invalid("ramification index must be at least 1"));
    }
    // The ramified problem shares P(0, T) with q, so this is the same check.
    let b = validate_branch(q, t0)?;
    let mut result = exact_radius(&b, cfg)?;
    if p > 1 {
        result.value = result.base.pow(p)?;
        result.power = p;
        result.decimal = result.value.to_decimal(cfg.digits);
    }
    Ok(result)
}

/// Convenience wrapper: validates the branch and computes its radius.
pub fn radius_of(p: &BiPoly, t0: &Rational, cfg: &RadiusConfig) -> Result<RadiusResult> {
    exact_radius(&validate_branch(p, t0)?, cfg)
}
