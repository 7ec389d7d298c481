//! Real algebraic numbers as (defining polynomial, isolating interval).
//!
//! Isolation uses Sturm sequences with exact rational arithmetic. Equality of
//! two numbers is decided through the gcd of their defining polynomials, so
//! `compare` terminates on equal inputs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::{format_significant, rational_to_string, to_f64, BiPoly, Rational, UniPoly};

/// A real root of a squarefree, content-free integer polynomial, pinned by an
/// isolating interval `[lo, hi]`.
///
/// Either `lo == hi` and that point is the root, or the defining polynomial
/// has opposite nonzero signs at `lo` and `hi` and exactly one root between.
#[derive(Clone, PartialEq, Eq)]
pub struct RealAlgebraic {
    defining: UniPoly,
    lo: Rational,
    hi: Rational,
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<UniPoly>,
}

impl SturmSequence {
    pub fn new(p: &UniPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            // Positive rescaling keeps the sign pattern and the numbers small.
            let r = match r.leading() {
                Some(lc) => r.scale(&(-lc.abs().recip())),
                None => r,
            };
            seq.push(r);
        }
        seq.pop();
        SturmSequence { seq }
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.seq.iter().map(|p| sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            if positive || p.degree().unwrap() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub fn count_half_open(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

pub(crate) fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Power of two `B` with every root strictly inside `(-B, B)`.
fn cauchy_bound(p: &UniPoly) -> Rational {
    let lc = p.leading().unwrap().abs();
    let m = p
        .coeffs()
        .iter()
        .rev()
        .skip(1)
        .map(|c| c.abs() / &lc)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let m = m + Rational::one();
    let mut b = Rational::one();
    while b < m {
        b *= BigInt::from(2);
    }
    b
}

/// All real roots of `u`, ascending, with pairwise disjoint isolating intervals.
pub fn isolate_real_roots(u: &UniPoly) -> Result<Vec<RealAlgebraic>> {
    if u.is_zero() {
        return Err(Error::invalid(
            "cannot isolate roots of the zero polynomial",
        ));
    }
    let p = u.squarefree_part().normalized();
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    if p.degree() == Some(1) {
        return Ok(vec![RealAlgebraic::from_linear(&p)]);
    }
    let sturm = SturmSequence::new(&p);
    let b = cauchy_bound(&p);
    let mut out = Vec::new();
    // Depth-first with the left half explored first keeps the output ascending.
    let mut stack = vec![(-b.clone(), b.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sturm.count_half_open(&a, &b);
        match n {
            0 => {}
            1 => {
                let mut r = finish_isolation(&p, &sturm, a, b);
                while r.width() > Rational::one() {
                    r.bisect();
                }
                out.push(r);
            }
            _ => {
                let m = (&a + &b) / BigInt::from(2);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    Ok(out)
}

/// Exactly one root in `(a, b]`; shrink until the endpoints are not roots.
fn finish_isolation(
    p: &UniPoly,
    sturm: &SturmSequence,
    mut a: Rational,
    mut b: Rational,
) -> RealAlgebraic {
    loop {
        if p.eval(&b).is_zero() {
            return RealAlgebraic::from_rational(&b);
        }
        if !p.eval(&a).is_zero() {
            return RealAlgebraic {
                defining: p.clone(),
                lo: a,
                hi: b,
            };
        }
        let m = (&a + &b) / BigInt::from(2);
        if sturm.count_half_open(&a, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
}

impl RealAlgebraic {
    pub fn from_rational(r: &Rational) -> Self {
        let defining = UniPoly::from_integers(&[-r.numer().clone(), r.denom().clone()]);
        RealAlgebraic {
            defining,
            lo: r.clone(),
            hi: r.clone(),
        }
    }

    fn from_linear(p: &UniPoly) -> Self {
        let r = -&p.coeffs()[0] / &p.coeffs()[1];
        Self::from_rational(&r)
    }

    /// Builds a value from a polynomial and an interval believed to isolate
    /// one of its roots; validated with a Sturm count.
    pub fn new(defining: &UniPoly, lo: Rational, hi: Rational) -> Result<Self> {
        if defining.is_zero() {
            return Err(Error::invalid("zero defining polynomial"));
        }
        if lo > hi {
            return Err(Error::invalid("empty isolating interval"));
        }
        let p = defining.squarefree_part().normalized();
        if lo == hi {
            if !p.eval(&lo).is_zero() {
                return Err(Error::invalid("point interval is not a root"));
            }
            return Ok(Self::from_rational(&lo));
        }
        let sturm = SturmSequence::new(&p);
        let lo_root = p.eval(&lo).is_zero() as usize;
        if sturm.count_half_open(&lo, &hi) + lo_root != 1 {
            return Err(Error::invalid("interval does not isolate exactly one root"));
        }
        if lo_root == 1 {
            return Ok(Self::from_rational(&lo));
        }
        Ok(finish_isolation(&p, &sturm, lo, hi))
    }

    pub fn defining(&self) -> &UniPoly {
        &self.defining
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval once.
    pub fn bisect(&mut self) {
        if self.is_rational() {
            return;
        }
        let m = (&self.lo + &self.hi) / BigInt::from(2);
        let sm = sign(&self.defining.eval(&m));
        if sm == 0 {
            *self = Self::from_rational(&m);
            return;
        }
        if sign(&self.defining.eval(&self.lo)) == sm {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    /// Same number with an isolating interval of width at most `eps`.
    pub fn refine(&self, eps: &Rational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::invalid("refinement tolerance must be positive"));
        }
        let mut out = self.clone();
        while out.width() > *eps {
            out.bisect();
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self
            .refine(&Rational::new(BigInt::one(), BigInt::one() << 60u32))
            .expect("positive eps");
        let mid = (&r.lo + &r.hi) / BigInt::from(2);
        // Relative accuracy for tiny magnitudes.
        if !mid.is_zero() && to_f64(&mid).abs() < 1e-3 && !r.is_rational() {
            let rel = r.refine_relative(60);
            return to_f64(&((&rel.lo + &rel.hi) / BigInt::from(2)));
        }
        to_f64(&mid)
    }

    /// Refines until the interval width is below `2^-bits` times the magnitude.
    fn refine_relative(&self, bits: u32) -> Self {
        let mut out = self.clone();
        loop {
            if out.is_rational() {
                return out;
            }
            let mag = if out.lo.abs() < out.hi.abs() {
                out.lo.abs()
            } else {
                out.hi.abs()
            };
            let straddles = out.lo.is_negative() != out.hi.is_negative() || out.lo.is_zero();
            if !straddles && out.width() * (BigInt::one() << bits) <= mag {
                return out;
            }
            out.bisect();
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if let Some(r) = self.as_rational() {
            return format_significant(r, digits);
        }
        let bits = ((digits as f64 + 3.0) * std::f64::consts::LOG2_10).ceil() as u32;
        let r = self.refine_relative(bits);
        let mid = (&r.lo + &r.hi) / BigInt::from(2);
        format_significant(&mid, digits)
    }

    /// Sign of the number: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self.compare(&Self::from_rational(&Rational::zero())) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Exact trichotomy.
    pub fn compare(&self, other: &Self) -> Ordering {
        let mut a = self.clone();
        let mut b = other.clone();
        let mut equality_checked = false;
        loop {
            if a.hi < b.lo {
                return Ordering::Less;
            }
            if b.hi < a.lo {
                return Ordering::Greater;
            }
            if a.is_rational() && b.is_rational() {
                return a.lo.cmp(&b.lo);
            }
            if !equality_checked {
                equality_checked = true;
                if a.equals_overlapping(&b) {
                    return Ordering::Equal;
                }
            }
            if a.width() >= b.width() && !a.is_rational() {
                a.bisect();
            } else if !b.is_rational() {
                b.bisect();
            } else {
                a.bisect();
            }
        }
    }

    /// With overlapping intervals, the two numbers are equal exactly when the
    /// gcd of the defining polynomials has a root in the overlap.
    fn equals_overlapping(&self, other: &Self) -> bool {
        let lo = if self.lo > other.lo {
            &self.lo
        } else {
            &other.lo
        };
        let hi = if self.hi < other.hi {
            &self.hi
        } else {
            &other.hi
        };
        let g = UniPoly::gcd(&self.defining, &other.defining);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        if g.eval(lo).is_zero() {
            return self.contains_root_at(lo) && other.contains_root_at(lo);
        }
        let sturm = SturmSequence::new(&g);
        sturm.count_half_open(lo, hi) > 0
    }

    fn contains_root_at(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi && self.defining.eval(x).is_zero()
    }

    /// Tries to identify the number as a rational `p/q`, returning the point
    /// representation when successful.
    pub fn simplify(&self) -> Self {
        if self.is_rational() || self.defining.degree() == Some(1) {
            return self.clone();
        }
        let ints = self.defining.primitive_integer_coeffs();
        let lc = ints.last().unwrap().abs();
        let Some(divisors) = small_divisors(&lc) else {
            return self.clone();
        };
        let qmax = divisors.iter().max().cloned().unwrap_or_else(BigInt::one);
        let eps = Rational::new(BigInt::one(), &qmax * BigInt::from(4));
        let r = self.refine(&eps).expect("positive eps");
        for q in &divisors {
            let qr = BigRational::from_integer(q.clone());
            let lo = (&r.lo * &qr).ceil().to_integer();
            let hi = (&r.hi * &qr).floor().to_integer();
            let mut p = lo;
            while p <= hi {
                let cand = Rational::new(p.clone(), q.clone());
                if self.defining.eval(&cand).is_zero() {
                    return Self::from_rational(&cand);
                }
                p += 1;
            }
        }
        r
    }

    /// Shrinks the defining polynomial to its gcd with `candidate` when that
    /// gcd still vanishes on the number.
    pub fn reduce_with(&self, candidate: &UniPoly) -> Self {
        let g = UniPoly::gcd(&self.defining, candidate);
        if g.degree().unwrap_or(0) == 0 || g.degree() == self.defining.degree() {
            return self.clone();
        }
        let g = g.normalized();
        match isolate_real_roots(&g) {
            Ok(roots) => roots
                .into_iter()
                .find(|c| c.compare(self) == Ordering::Equal)
                .unwrap_or_else(|| self.clone()),
            Err(_) => self.clone(),
        }
    }

    /// `self^p` via `Res_s(defining(s), u - s^p)`.
    pub fn pow(&self, p: u32) -> Result<Self> {
        if p == 0 {
            return Ok(Self::from_rational(&Rational::one()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&num_traits::pow(r.clone(), p as usize)));
        }
        let a = BiPoly::from_t_coeffs(&self.defining);
        let mut b_coeffs = vec![UniPoly::zero(); p as usize + 1];
        b_coeffs[0] = UniPoly::x();
        b_coeffs[p as usize] = UniPoly::constant(-Rational::one());
        let b = BiPoly::new(b_coeffs);
        let res = BiPoly::resultant_t(&a, &b)?;
        let res = res.squarefree_part().normalized();
        let base = self.clone();
        let selected = select_root(&res, |level| {
            let mut r = base.clone();
            for _ in 0..level {
                r.bisect();
            }
            // An interval avoiding zero makes the power monotone on it.
            while !r.is_rational() && r.lo.is_negative() && r.hi.is_positive() {
                r.bisect();
            }
            pow_interval(&r.lo, &r.hi, p)
        })?;
        Ok(selected.simplify())
    }
}

fn pow_interval(lo: &Rational, hi: &Rational, p: u32) -> (Rational, Rational) {
    let a = num_traits::pow(lo.clone(), p as usize);
    let b = num_traits::pow(hi.clone(), p as usize);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Divisors of `n`, when `n` factors by trial division up to `10^6`.
fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut rest = n.abs();
    if rest.is_zero() {
        return None;
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u32);
    while &d * &d <= rest && d <= limit {
        let mut e = 0;
        while (&rest % &d).is_zero() {
            rest /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if rest > BigInt::one() {
        if &d * &d <= rest {
            // Unfactored cofactor above the trial bound.
            return None;
        }
        factors.push((rest, 1));
    }
    let mut divisors = vec![BigInt::one()];
    for (prime, e) in factors {
        let mut next = Vec::new();
        for dv in &divisors {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &prime;
            }
        }
        divisors = next;
        if divisors.len() > 10_000 {
            return None;
        }
    }
    divisors.sort();
    Some(divisors)
}

/// Picks the unique real root of `poly` consistent with a shrinking family of
/// enclosures `enclosure(level)`, each of which must contain the target.
pub fn select_root(
    poly: &UniPoly,
    mut enclosure: impl FnMut(u32) -> (Rational, Rational),
) -> Result<RealAlgebraic> {
    let mut roots = isolate_real_roots(poly)?;
    for level in 0..400 {
        let (lo, hi) = enclosure(level);
        roots.retain(|r| !(r.hi < lo || r.lo > hi));
        match roots.len() {
            0 => break,
            1 => return Ok(roots.pop().unwrap()),
            _ => roots.iter_mut().for_each(RealAlgebraic::bisect),
        }
    }
    Err(Error::InternalInconsistency(
        "no unique root matches the numeric enclosure".into(),
    ))
}

/// `M(s) = Res_y(D(y), y^n D(s/y))`, whose roots include every product of two
/// roots of `D`.
pub fn pair_product_poly(d: &UniPoly) -> Result<UniPoly> {
    let n = d
        .degree()
        .ok_or_else(|| Error::invalid("pair products of the zero polynomial"))?;
    if d.coeff(0).is_zero() {
        return Err(Error::invalid("pair products need D(0) != 0"));
    }
    if n == 0 {
        return Ok(UniPoly::one());
    }
    let a = BiPoly::from_t_coeffs(d);
    // y^n D(s/y) = sum_i d_i s^i y^(n-i)
    let mut b = vec![UniPoly::zero(); n + 1];
    for (i, c) in d.coeffs().iter().enumerate() {
        b[n - i] = UniPoly::monomial(c.clone(), i);
    }
    let m = BiPoly::resultant_t(&a, &BiPoly::new(b))?;
    Ok(m.normalized())
}

impl PartialOrd for RealAlgebraic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.compare(other))
    }
}

impl fmt::Debug for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RealAlgebraic({} in [{}, {}])",
            self.defining.display_in("s"),
            rational_to_string(&self.lo),
            rational_to_string(&self.hi)
        )
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => f.write_str(&rational_to_string(r)),
            None => write!(
                f,
                "root of {} in [{}, {}] ~ {}",
                self.defining.display_in("s"),
                rational_to_string(&self.lo),
                rational_to_string(&self.hi),
                self.to_decimal(12)
            ),
        }
    }
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<RealAlgebraic>();
}
