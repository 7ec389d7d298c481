//! Power-series branches of `P(X, T) = 0` through a simple root `t0` of `P(0, T)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::{lcm_of_denominators, rational_to_string, BiPoly, Rational, UniPoly};

/// A validated branch: `P` squarefree in `T`, `P(0, t0) = 0`, `dP/dT(0, t0) != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSpec {
    p: BiPoly,
    t0: Rational,
}

impl BranchSpec {
    pub fn poly(&self) -> &BiPoly {
        &self.p
    }

    pub fn t0(&self) -> &Rational {
        &self.t0
    }
}

/// Exact coefficients `a_0 .. a_N` of a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCoefficients {
    coeffs: Vec<Rational>,
}

impl SeriesCoefficients {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a_0");
        SeriesCoefficients { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_string).collect()
    }
}

/// Checks the branch hypotheses on `P` as given, then replaces `P` by its
/// squarefree part in `T`.
pub fn validate_branch(p: &BiPoly, t0: &Rational) -> Result<BranchSpec> {
    if p.is_zero() {
        return Err(Error::invalid("the zero polynomial annihilates everything"));
    }
    let at_origin = p.eval_x(&Rational::zero());
    if !at_origin.eval(t0).is_zero() {
        return Err(Error::NotARoot);
    }
    let slope = p.derivative_t().eval_x(&Rational::zero()).eval(t0);
    if slope.is_zero() {
        return Err(Error::RamifiedBranch(format!(
            "t0 = {} is a multiple root of P(0, T); Newton-polygon expansion is not supported",
            rational_to_string(t0)
        )));
    }
    let sq = p.squarefree_part_t();
    debug_assert!(sq.eval(&Rational::zero(), t0).is_zero());
    debug_assert!(!sq.derivative_t().eval(&Rational::zero(), t0).is_zero());
    Ok(BranchSpec {
        p: sq,
        t0: t0.clone(),
    })
}

/// `Q(X^p, T)` for every coefficient.
pub fn ramify(q: &BiPoly, p: usize) -> Result<BiPoly> {
    q.ramify(p)
}

type IntSeries = Vec<BigInt>;

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> IntSeries {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Inverse of a series with constant term 1.
fn inv_trunc(a: &[BigInt], len: usize) -> IntSeries {
    debug_assert!(a[0].is_one());
    let mut b = vec![BigInt::zero(); len];
    b[0] = BigInt::one();
    for k in 1..len {
        let mut s = BigInt::zero();
        for i in 1..=k.min(a.len() - 1) {
            if !a[i].is_zero() {
                s += &a[i] * &b[k - i];
            }
        }
        b[k] = -s;
    }
    b
}

fn add_into(acc: &mut IntSeries, b: &[BigInt]) {
    for (x, y) in acc.iter_mut().zip(b) {
        *x += y;
    }
}

/// Integer rescaling of the lifting problem.
///
/// With `G = f - t0`, `Q(X, G) = P(X, t0 + G)` is cleared of denominators and
/// `u = dQ/dG(0, 0)`. Substituting `X = u^2 Y`, `G = u H` and dividing by
/// `u^2` yields `R(Y, H) = sum_j R_j(Y) H^j` with integer coefficients,
/// `R_1(0) = 1` and `R_0(0) = 0`, so Newton steps never divide.
struct ScaledProblem {
    r: Vec<Vec<BigInt>>,
    u: BigInt,
}

impl ScaledProblem {
    fn new(b: &BranchSpec) -> Self {
        let q = b.p.shift_t(&b.t0);
        let l = lcm_of_denominators(q.tcoeffs().iter().flat_map(|c| c.coeffs()));
        let lr = BigRational::from_integer(l);
        let qi: Vec<Vec<BigInt>> = q
            .tcoeffs()
            .iter()
            .map(|c| c.coeffs().iter().map(|a| (a * &lr).to_integer()).collect())
            .collect();
        let u = qi[1][0].clone();
        debug_assert!(!u.is_zero());
        let r = qi
            .iter()
            .enumerate()
            .map(|(j, cj)| {
                cj.iter()
                    .enumerate()
                    .map(|(i, c)| {
                        // c * u^(2i + j - 2); the two negative exponents occur only
                        // for c = Q_0(0) = 0 and c = Q_1(0) = u.
                        let e = 2 * i as i64 + j as i64 - 2;
                        if e >= 0 {
                            c * num_traits::pow(u.clone(), e as usize)
                        } else {
                            c / num_traits::pow(u.clone(), (-e) as usize)
                        }
                    })
                    .collect()
            })
            .collect();
        ScaledProblem { r, u }
    }

    fn eval(&self, h: &[BigInt], len: usize) -> (IntSeries, IntSeries) {
        let d = self.r.len() - 1;
        let pad = |c: &Vec<BigInt>| {
            let mut v = c.clone();
            v.resize(len, BigInt::zero());
            v.truncate(len);
            v
        };
        let mut val = pad(&self.r[d]);
        for j in (0..d).rev() {
            val = mul_trunc(&val, h, len);
            add_into(&mut val, &pad(&self.r[j]));
        }
        let mut der = pad(&self.r[d])
            .into_iter()
            .map(|c| c * BigInt::from(d))
            .collect::<Vec<_>>();
        for j in (1..d).rev() {
            der = mul_trunc(&der, h, len);
            let scaled: Vec<BigInt> = pad(&self.r[j])
                .into_iter()
                .map(|c| c * BigInt::from(j))
                .collect();
            add_into(&mut der, &scaled);
        }
        (val, der)
    }
}

/// Coefficients `a_0 .. a_N` of the branch by Newton iteration with doubling
/// precision.
pub fn hensel_lift(b: &BranchSpec, n: usize) -> SeriesCoefficients {
    let problem = ScaledProblem::new(b);
    let target = n + 1;
    let mut h: IntSeries = vec![BigInt::zero()];
    let mut prec = 1;
    while prec < target {
        prec = (2 * prec).min(target);
        h.resize(prec, BigInt::zero());
        let (val, der) = problem.eval(&h, prec);
        let step = mul_trunc(&val, &inv_trunc(&der, prec), prec);
        for (x, s) in h.iter_mut().zip(&step) {
            *x -= s;
        }
    }
    let mut coeffs = Vec::with_capacity(target);
    coeffs.push(b.t0.clone());
    let u2 = &problem.u * &problem.u;
    let mut denom = problem.u.clone(); // u^(2k-1)
    for hk in h.iter().skip(1).take(n) {
        coeffs.push(BigRational::new(hk.clone(), denom.clone()));
        denom *= &u2;
    }
    SeriesCoefficients::new(coeffs)
}

/// Truncated product of rational series.
pub(crate) fn mul_trunc_rat(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// True iff `P(X, f_N(X)) = 0 mod X^(N+1)`, by direct substitution.
pub fn verify_annihilation(b: &BranchSpec, s: &SeriesCoefficients) -> bool {
    let len = s.order() + 1;
    let pad = |c: &UniPoly| {
        let mut v: Vec<Rational> = c.coeffs().iter().take(len).cloned().collect();
        v.resize(len, Rational::zero());
        v
    };
    let tc = b.p.tcoeffs();
    let mut acc = pad(tc.last().unwrap());
    for c in tc.iter().rev().skip(1) {
        acc = mul_trunc_rat(&acc, s.coeffs(), len);
        for (x, y) in acc.iter_mut().zip(pad(c)) {
            *x += y;
        }
    }
    acc.iter().all(Zero::is_zero)
}
