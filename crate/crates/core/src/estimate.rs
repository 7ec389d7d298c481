//! Radius estimates from coefficient asymptotics, used as an independent
//! check on the exact engine.

use num_traits::Zero;
use serde::Serialize;

use crate::branch::SeriesCoefficients;
use crate::error::{Error, Result};
use crate::exactpoly::{ln_abs, to_f64};
use crate::radius::RadiusValue;

/// A numeric radius, or the flag that the coefficient tail vanished.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusEstimate {
    Finite(f64),
    Infinite,
}

impl RadiusEstimate {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RadiusEstimate::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            RadiusEstimate::Finite(v) => *v,
            RadiusEstimate::Infinite => f64::INFINITY,
        }
    }
}

/// Orientation of the ratio test used by [`ratio_estimate`].
pub const RATIO_CONVENTION: &str = "R = lim |a_k / a_(k+1)|";

const MIN_ORDER: usize = 8;
const RATIO_WINDOW: usize = 8;
const RATIO_STABILITY: f64 = 1e-3;

fn check_order(s: &SeriesCoefficients) -> Result<usize> {
    let n = s.order();
    if n < MIN_ORDER {
        return Err(Error::invalid(format!(
            "need at least {MIN_ORDER} coefficients beyond a_0"
        )));
    }
    Ok(n)
}

/// `1 / max |a_k|^(1/k)` over `k` in `[N/2, N]`.
pub fn hadamard_estimate(s: &SeriesCoefficients) -> Result<RadiusEstimate> {
    let n = check_order(s)?;
    let best = s.coeffs()[n / 2..=n]
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(i, a)| ln_abs(a) / (n / 2 + i) as f64)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    Ok(match best {
        None => RadiusEstimate::Infinite,
        Some(l) => RadiusEstimate::Finite((-l).exp()),
    })
}

/// `|a_(N-1) / a_N|` when the last eight ratios have settled.
pub fn ratio_estimate(s: &SeriesCoefficients) -> Result<Option<f64>> {
    let n = check_order(s)?;
    let tail = &s.coeffs()[n - RATIO_WINDOW..=n];
    if tail.iter().any(Zero::is_zero) {
        return Ok(None);
    }
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| to_f64(&(&w[0] / &w[1])).abs())
        .collect();
    let settled = ratios
        .windows(2)
        .all(|w| ((w[1] - w[0]) / w[0]).abs() < RATIO_STABILITY);
    Ok(settled.then(|| *ratios.last().unwrap()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub order: usize,
    pub window: (usize, usize),
    pub hadamard: RadiusEstimate,
    pub ratio: Option<f64>,
    pub ratio_convention: &'static str,
    /// Relative deviation of the Hadamard estimate from the exact radius.
    pub agreement: Option<f64>,
}

impl EstimateReport {
    pub fn new(s: &SeriesCoefficients) -> Result<Self> {
        let n = check_order(s)?;
        Ok(EstimateReport {
            order: n,
            window: (n / 2, n),
            hadamard: hadamard_estimate(s)?,
            ratio: ratio_estimate(s)?,
            ratio_convention: RATIO_CONVENTION,
            agreement: None,
        })
    }

    pub fn with_exact(mut self, exact: &RadiusValue) -> Self {
        self.agreement = relative_deviation(exact, &self.hadamard);
        self
    }
}

fn relative_deviation(exact: &RadiusValue, h: &RadiusEstimate) -> Option<f64> {
    match (exact, h) {
        (RadiusValue::Finite(r), RadiusEstimate::Finite(h)) => {
            let r = r.to_f64();
            Some((h - r).abs() / r)
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub passed: bool,
    pub rtol: f64,
    pub order: usize,
    pub hadamard: RadiusEstimate,
    pub deviation: Option<f64>,
}

/// Compares an exact radius with the Hadamard estimate. An infinite radius
/// passes when the estimate is flagged infinite or exceeds ten times the
/// largest candidate modulus.
pub fn cross_validate(
    exact: &RadiusValue,
    report: &EstimateReport,
    rtol: f64,
    largest_candidate: Option<f64>,
) -> Result<CrossCheck> {
    if rtol.is_nan() || rtol <= 0.0 {
        return Err(Error::invalid("rtol must be positive"));
    }
    let deviation = relative_deviation(exact, &report.hadamard);
    let passed = match (exact, report.hadamard) {
        (RadiusValue::Finite(_), RadiusEstimate::Finite(_)) => deviation.unwrap() <= rtol,
        (RadiusValue::Finite(_), RadiusEstimate::Infinite) => false,
        (RadiusValue::Infinite, RadiusEstimate::Infinite) => true,
        (RadiusValue::Infinite, RadiusEstimate::Finite(h)) => {
            largest_candidate.is_some_and(|m| h > 10.0 * m)
        }
    };
    Ok(CrossCheck {
        passed,
        rtol,
        order: report.order,
        hadamard: report.hadamard,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{hensel_lift, validate_branch};
    use crate::exactpoly::{int, rat, BiPoly, Rational, UniPoly};
    use crate::realalg::RealAlgebraic;
    use num_bigint::BigInt;
    use num_traits::One;

    fn series(f: impl Fn(usize) -> Rational, n: usize) -> SeriesCoefficients {
        SeriesCoefficients::new((0..=n).map(f).collect())
    }

    fn geometric(c: Rational, r: Rational, n: usize) -> SeriesCoefficients {
        series(|k| &c * num_traits::pow(r.clone(), k), n)
    }

    fn catalan(n: usize) -> SeriesCoefficients {
        let mut out = vec![Rational::one()];
        for k in 0..n {
            let next = out[k].clone() * int(2 * (2 * k as i64 + 1)) / int(k as i64 + 2);
            out.push(next);
        }
        SeriesCoefficients::new(out)
    }

    fn finite(e: RadiusEstimate) -> f64 {
        match e {
            RadiusEstimate::Finite(v) => v,
            RadiusEstimate::Infinite => panic!("unexpected infinite estimate"),
        }
    }

    #[test]
    fn hadamard_examples() {
        let s = geometric(rat(3, 2), rat(3, 2), 256);
        assert!((finite(hadamard_estimate(&s).unwrap()) - 2.0 / 3.0).abs() < 0.01 * 2.0 / 3.0);
        let h = finite(hadamard_estimate(&catalan(1024)).unwrap());
        assert!((h - 0.25).abs() < 0.02 * 0.25, "{h}");
        let poly = series(|k| if k == 0 { int(5) } else { Rational::zero() }, 16);
        assert!(hadamard_estimate(&poly).unwrap().is_infinite());
        assert!(hadamard_estimate(&poly.truncate(4)).is_err());
    }

    #[test]
    fn hadamard_error_shrinks_on_geometric_series() {
        let c = rat(7, 1);
        let r = rat(5, 3);
        let mut last = f64::INFINITY;
        for n in [64, 256, 1024] {
            let h = finite(hadamard_estimate(&geometric(c.clone(), r.clone(), n)).unwrap());
            let err = (h - 0.6).abs() / 0.6;
            assert!(err <= 7f64.ln() / (n / 2) as f64 + 1e-12);
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn ratio_examples() {
        // Fibonacci: a_k = F_(k+1)
        let mut fib = vec![int(1), int(1)];
        for k in 2..=64 {
            let next = &fib[k - 1] + &fib[k - 2];
            fib.push(next);
        }
        let r = ratio_estimate(&SeriesCoefficients::new(fib))
            .unwrap()
            .unwrap();
        assert!((r - 0.6180339887498949).abs() < 1e-8);

        let s = geometric(rat(3, 2), rat(3, 2), 64);
        assert!((ratio_estimate(&s).unwrap().unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let sqrt = BiPoly::new(vec![
            UniPoly::from_ints(&[-1, 1]),
            UniPoly::zero(),
            UniPoly::one(),
        ]);
        let b = validate_branch(&sqrt, &int(1)).unwrap();
        let r = ratio_estimate(&hensel_lift(&b, 64)).unwrap().unwrap();
        assert!((r - 1.0).abs() < 0.05);

        // alternating zeros: no ratio
        let sparse = series(|k| if k % 2 == 0 { int(1) } else { Rational::zero() }, 32);
        assert_eq!(ratio_estimate(&sparse).unwrap(), None);
        // unsettled: |a_k| alternates between two growth rates
        let wobbly = series(
            |k| num_traits::pow(int(if k % 2 == 0 { 2 } else { 3 }), k),
            32,
        );
        assert_eq!(ratio_estimate(&wobbly).unwrap(), None);
    }

    #[test]
    fn cross_validate_examples() {
        let quarter = RadiusValue::Finite(RealAlgebraic::from_rational(&rat(1, 4)));
        let mut report = EstimateReport::new(&catalan(1024)).unwrap();
        assert!(
            cross_validate(&quarter, &report, 0.05, Some(0.25))
                .unwrap()
                .passed
        );

        let two_thirds = RadiusValue::Finite(RealAlgebraic::from_rational(&rat(2, 3)));
        report.hadamard = RadiusEstimate::Finite(0.41);
        let c = cross_validate(&two_thirds, &report, 0.05, Some(2.0 / 3.0)).unwrap();
        assert!(!c.passed);

        report.hadamard = RadiusEstimate::Infinite;
        assert!(
            cross_validate(&RadiusValue::Infinite, &report, 0.05, None)
                .unwrap()
                .passed
        );
        report.hadamard = RadiusEstimate::Finite(3.0);
        assert!(
            !cross_validate(&RadiusValue::Infinite, &report, 0.05, Some(1.0))
                .unwrap()
                .passed
        );
        report.hadamard = RadiusEstimate::Finite(30.0);
        assert!(
            cross_validate(&RadiusValue::Infinite, &report, 0.05, Some(1.0))
                .unwrap()
                .passed
        );
        assert!(cross_validate(&quarter, &report, 0.0, None).is_err());
    }

    #[test]
    fn report_records_convention_and_agreement() {
        let s = geometric(Rational::one(), Rational::from_integer(BigInt::from(4)), 64);
        let exact = RadiusValue::Finite(RealAlgebraic::from_rational(&rat(1, 4)));
        let r = EstimateReport::new(&s).unwrap().with_exact(&exact);
        assert_eq!(r.window, (32, 64));
        assert_eq!(r.ratio_convention, RATIO_CONVENTION);
        assert!(r.agreement.unwrap() < 1e-12);
    }
}
