//! Candidate singularities of a branch: the zeros of `lc_T(P) * disc_T(P)`.
//!
//! Complex zeros are approximated numerically and then certified with the
//! Krawczyk form of interval Newton over exact rational boxes. Moduli are
//! recovered exactly as positive roots of `M(u^2)`, where `M` is the pair
//! product polynomial of the candidate polynomial.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactpoly::{from_f64, rational_to_string, to_f64, BiPoly, Rational, UniPoly};
use crate::numeric::{aberth, real_to_complex};
use crate::realalg::{isolate_real_roots, pair_product_poly, RealAlgebraic};

/// Axis-aligned rational box in the complex plane holding exactly one
/// root of the candidate polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexBox {
    #[serde(serialize_with = "ser_rational")]
    pub re_lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub re_hi: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub im_lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub im_hi: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(r))
}

impl ComplexBox {
    fn around(re: &Rational, im: &Rational, r: &Rational) -> Self {
        ComplexBox {
            re_lo: re - r,
            re_hi: re + r,
            im_lo: im - r,
            im_hi: im + r,
        }
    }

    pub fn center(&self) -> (Rational, Rational) {
        let two = BigInt::from(2);
        (
            (&self.re_lo + &self.re_hi) / &two,
            (&self.im_lo + &self.im_hi) / &two,
        )
    }

    pub fn center_f64(&self) -> Complex64 {
        let (re, im) = self.center();
        Complex64::new(to_f64(&re), to_f64(&im))
    }

    pub fn width(&self) -> Rational {
        &self.re_hi - &self.re_lo
    }

    pub fn height(&self) -> Rational {
        &self.im_hi - &self.im_lo
    }

    /// Half of the diagonal, in floating point.
    pub fn radius_f64(&self) -> f64 {
        0.5 * to_f64(&self.width()).hypot(to_f64(&self.height()))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !(self.re_hi < other.re_lo
            || other.re_hi < self.re_lo
            || self.im_hi < other.im_lo
            || other.im_hi < self.im_lo)
    }

    pub fn contains_point(&self, z: Complex64) -> bool {
        to_f64(&self.re_lo) <= z.re
            && z.re <= to_f64(&self.re_hi)
            && to_f64(&self.im_lo) <= z.im
            && z.im <= to_f64(&self.im_hi)
    }

    pub fn conjugate(&self) -> Self {
        ComplexBox {
            re_lo: self.re_lo.clone(),
            re_hi: self.re_hi.clone(),
            im_lo: -&self.im_hi,
            im_hi: -&self.im_lo,
        }
    }

    /// Exact bounds `(min |z|^2, max |z|^2)` over the box.
    pub fn modulus_sq_bounds(&self) -> (Rational, Rational) {
        fn axis(lo: &Rational, hi: &Rational) -> (Rational, Rational) {
            let near = if lo.is_positive() {
                lo.clone()
            } else if hi.is_negative() {
                hi.abs()
            } else {
                Rational::zero()
            };
            let far = if lo.abs() > hi.abs() {
                lo.abs()
            } else {
                hi.abs()
            };
            (near, far)
        }
        let (rn, rf) = axis(&self.re_lo, &self.re_hi);
        let (inn, inf) = axis(&self.im_lo, &self.im_hi);
        (&rn * &rn + &inn * &inn, &rf * &rf + &inf * &inf)
    }

    /// `true` when the box is symmetric about the real axis.
    pub fn is_real_symmetric(&self) -> bool {
        self.im_lo == -&self.im_hi
    }
}

#[derive(Clone, Debug)]
struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Outward rounding to the dyadic grid `2^-bits`.
    fn round_out(&self, bits: u32) -> Self {
        let scale = BigRational::from_integer(BigInt::one() << bits);
        Interval {
            lo: (&self.lo * &scale).floor() / &scale,
            hi: (&self.hi * &scale).ceil() / &scale,
        }
    }
}

#[derive(Clone, Debug)]
struct ComplexInterval {
    re: Interval,
    im: Interval,
}

impl ComplexInterval {
    fn point(re: Rational, im: Rational) -> Self {
        ComplexInterval {
            re: Interval::point(re),
            im: Interval::point(im),
        }
    }

    fn add(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    fn sub(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    fn round_out(&self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.round_out(bits),
            im: self.im.round_out(bits),
        }
    }
}

fn horner_interval(p: &UniPoly, x: &ComplexInterval, bits: u32) -> ComplexInterval {
    let mut acc = ComplexInterval::point(Rational::zero(), Rational::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc
            .mul(x)
            .add(&ComplexInterval::point(c.clone(), Rational::zero()))
            .round_out(bits);
    }
    acc
}

fn complex_eval(p: &UniPoly, re: &Rational, im: &Rational) -> (Rational, Rational) {
    let (mut ar, mut ai) = (Rational::zero(), Rational::zero());
    for c in p.coeffs().iter().rev() {
        let nr = &ar * re - &ai * im + c;
        let ni = &ar * im + &ai * re;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigRational::from_integer(BigInt::one() << bits);
    (x * &scale).round() / scale
}

/// One exact Newton step from `(re, im)`, rounded to `bits` fractional bits.
/// Returns the new point and `|step|` as a float.
fn newton_step(
    p: &UniPoly,
    dp: &UniPoly,
    re: &Rational,
    im: &Rational,
    bits: u32,
) -> Option<(Rational, Rational, f64)> {
    let (pr, pi) = complex_eval(p, re, im);
    let (dr, di) = complex_eval(dp, re, im);
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    let sr = (&pr * &dr + &pi * &di) / &den;
    let si = (&pi * &dr - &pr * &di) / &den;
    let step = to_f64(&sr).hypot(to_f64(&si));
    Some((
        round_dyadic(&(re - &sr), bits),
        round_dyadic(&(im - &si), bits),
        step,
    ))
}

/// Krawczyk test on the square of half-width `r` around `(re, im)`; success
/// proves the square holds exactly one root of `p`.
fn krawczyk(
    p: &UniPoly,
    dp: &UniPoly,
    re: &Rational,
    im: &Rational,
    r: &Rational,
    bits: u32,
) -> bool {
    let (pr, pi) = complex_eval(p, re, im);
    let dz = dp.eval_complex(Complex64::new(to_f64(re), to_f64(im)));
    if dz.norm() == 0.0 || !dz.is_finite() {
        return false;
    }
    let y = dz.inv();
    let y = ComplexInterval::point(from_f64(y.re), from_f64(y.im));
    let r_int = Interval {
        lo: -r.clone(),
        hi: r.clone(),
    };
    let offset = ComplexInterval {
        re: r_int.clone(),
        im: r_int,
    };
    let boxed = ComplexInterval::point(re.clone(), im.clone()).add(&offset);
    let dp_box = horner_interval(dp, &boxed, bits);
    let one = ComplexInterval::point(Rational::one(), Rational::zero());
    let k = ComplexInterval::point(re.clone(), im.clone())
        .sub(&y.mul(&ComplexInterval::point(pr, pi)))
        .add(&one.sub(&y.mul(&dp_box)).mul(&offset));
    let inside = |iv: &Interval, c: &Rational| (c - r) < iv.lo && iv.hi < (c + r);
    inside(&k.re, re) && inside(&k.im, im)
}

/// Certifies a box of side at most `2^-bits * max(1, |z|)` around a root
/// approximated by `z`.
fn certify_near(p: &UniPoly, z: Complex64, snap_real: bool, bits: u32) -> Option<ComplexBox> {
    let dp = p.derivative();
    let scale = z.norm().max(1.0);
    let mut re = from_f64(z.re);
    let mut im = if snap_real {
        Rational::zero()
    } else {
        from_f64(z.im)
    };
    for attempt in 0..6u32 {
        let work = bits + 12 * attempt + 8;
        let mut step = f64::INFINITY;
        for _ in 0..80 {
            let (nr, ni, s) = newton_step(p, &dp, &re, &im, work + 8)?;
            re = nr;
            im = ni;
            step = s;
            if s <= scale * 2f64.powi(-(work as i32 + 4)) {
                break;
            }
        }
        let max_half = scale * 2f64.powi(-(bits as i32 + 1));
        let mut half = (4.0 * step).max(scale * 2f64.powi(-(work as i32)));
        while half <= max_half {
            let r = from_f64(half);
            if krawczyk(p, &dp, &re, &im, &r, work + 16) {
                return Some(ComplexBox::around(&re, &im, &r));
            }
            half *= 4.0;
        }
    }
    None
}

/// One certified box per complex root of a squarefree `d`, conjugate
/// symmetric for the real input.
pub fn isolate_complex_roots(d: &UniPoly, bits: u32) -> Result<Vec<ComplexBox>> {
    let n = match d.degree() {
        None => {
            return Err(Error::invalid(
                "cannot isolate roots of the zero polynomial",
            ))
        }
        Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let d = d.normalized();
    let approx = aberth(&real_to_complex(&d.to_f64_coeffs()));
    let real_tol = |z: &Complex64| z.im.abs() <= 1e-7 * z.norm().max(1.0);
    let reals: Vec<Complex64> = approx.iter().filter(|z| real_tol(z)).cloned().collect();
    let uppers: Vec<Complex64> = approx
        .iter()
        .filter(|z| !real_tol(z) && z.im > 0.0)
        .cloned()
        .collect();
    let symmetric = reals.len() + 2 * uppers.len() == n;

    let mut boxes = Vec::with_capacity(n);
    if symmetric {
        for z in &reals {
            let b = certify_near(&d, *z, true, bits)
                .or_else(|| certify_near(&d, *z, false, bits))
                .ok_or(Error::PrecisionExhausted { bits })?;
            boxes.push(b);
        }
        for z in &uppers {
            let b = certify_near(&d, *z, false, bits).ok_or(Error::PrecisionExhausted { bits })?;
            let c = b.conjugate();
            boxes.push(b);
            boxes.push(c);
        }
    } else {
        for z in &approx {
            boxes
                .push(certify_near(&d, *z, false, bits).ok_or(Error::PrecisionExhausted { bits })?);
        }
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].intersects(&boxes[j]) {
                return Err(Error::PrecisionExhausted { bits });
            }
        }
    }
    boxes.sort_by(|a, b| {
        let (ar, ai) = a.center();
        let (br, bi) = b.center();
        ar.cmp(&br).then(ai.cmp(&bi))
    });
    Ok(boxes)
}

/// Shrinks a certified box by re-certifying around its centre.
pub fn refine_box(d: &UniPoly, b: &ComplexBox, bits: u32) -> Result<ComplexBox> {
    let snap = b.is_real_symmetric();
    let d = d.normalized();
    let refined =
        certify_near(&d, b.center_f64(), snap, bits).ok_or(Error::PrecisionExhausted { bits })?;
    if !refined.intersects(b) {
        return Err(Error::InternalInconsistency(
            "refined box left its parent".into(),
        ));
    }
    Ok(refined)
}

/// `sqfree(lc_T(P) * disc_T(P))`, normalized; contains every point where a
/// branch of `P` can fail to continue.
pub fn candidate_polynomial(p: &BiPoly) -> Result<UniPoly> {
    let lc = p.leading_coeff_t()?;
    let disc = p.discriminant_t()?;
    Ok((&lc * &disc).squarefree_part().normalized())
}

/// One exact modulus together with the boxes lying on that circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateModulus {
    pub value: RealAlgebraic,
    pub boxes: Vec<usize>,
}

/// Exact moduli of the boxes' roots, ascending and strictly increasing.
pub fn candidate_moduli(d: &UniPoly, boxes: &[ComplexBox]) -> Result<Vec<CandidateModulus>> {
    if boxes.is_empty() {
        return Ok(Vec::new());
    }
    let d = d.normalized();
    let m = pair_product_poly(&d)?;
    let f = m.compose_power(2).squarefree_part().normalized();
    let mut roots: Vec<RealAlgebraic> = isolate_real_roots(&f)?
        .into_iter()
        .filter(|r| r.interval().1.is_positive())
        .map(|mut r| {
            while r.interval().0.is_negative() {
                r.bisect();
            }
            r
        })
        .collect();
    let mut boxes: Vec<ComplexBox> = boxes.to_vec();
    let mut bits = 40u32;
    let mut owner = vec![usize::MAX; boxes.len()];
    for _round in 0..80 {
        let mut ambiguous_roots = vec![false; roots.len()];
        let mut ambiguous_boxes = Vec::new();
        for (bi, b) in boxes.iter().enumerate() {
            let (lo2, hi2) = b.modulus_sq_bounds();
            let hits: Vec<usize> = roots
                .iter()
                .enumerate()
                .filter(|(_, r)| {
                    let (a, c) = r.interval();
                    (a * a) <= hi2 && (c * c) >= lo2
                })
                .map(|(k, _)| k)
                .collect();
            match hits.len() {
                0 => {
                    return Err(Error::InternalInconsistency(
                        "a certified box matches no candidate modulus".into(),
                    ))
                }
                1 => owner[bi] = hits[0],
                _ => {
                    owner[bi] = usize::MAX;
                    ambiguous_boxes.push(bi);
                    for k in hits {
                        ambiguous_roots[k] = true;
                    }
                }
            }
        }
        if ambiguous_boxes.is_empty() {
            return group_moduli(&d, &roots, &owner);
        }
        for (k, r) in roots.iter_mut().enumerate() {
            if ambiguous_roots[k] {
                r.bisect();
            }
        }
        bits += 4;
        for bi in ambiguous_boxes {
            if boxes[bi].width() > Rational::new(BigInt::one(), BigInt::one() << (bits + 2)) {
                boxes[bi] = refine_box(&d, &boxes[bi], bits)?;
            }
        }
    }
    Err(Error::InternalInconsistency(
        "candidate moduli did not separate".into(),
    ))
}

fn group_moduli(
    d: &UniPoly,
    roots: &[RealAlgebraic],
    owner: &[usize],
) -> Result<Vec<CandidateModulus>> {
    // A real candidate x has |x| as a root of D(u) or D(-u), usually of much lower degree.
    let mirror = d.reflect();
    let mut out: Vec<CandidateModulus> = Vec::new();
    let mut used: Vec<usize> = owner.to_vec();
    used.sort_unstable();
    used.dedup();
    for k in used {
        let members: Vec<usize> = owner
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == k)
            .map(|(i, _)| i)
            .collect();
        let value = roots[k].reduce_with(d).reduce_with(&mirror).simplify();
        out.push(CandidateModulus {
            value,
            boxes: members,
        });
    }
    out.sort_by(|a, b| a.value.compare(&b.value));
    for w in out.windows(2) {
        if w[0].value.compare(&w[1].value) != Ordering::Less {
            return Err(Error::InternalInconsistency(
                "duplicate candidate modulus".into(),
            ));
        }
    }
    Ok(out)
}

/// Which factor of the candidate polynomial a box's root belongs to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CandidateKind {
    pub leading_vanishes: bool,
    pub discriminant_vanishes: bool,
}

/// The candidate singularities of `P`, located and ordered by modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    /// Squarefree candidate polynomial with the factor `X` removed.
    pub d: UniPoly,
    /// Whether `X` divided the full candidate polynomial (origin discarded).
    pub origin_candidate: bool,
    pub leading: UniPoly,
    pub discriminant: UniPoly,
    pub boxes: Vec<ComplexBox>,
    pub kinds: Vec<CandidateKind>,
    pub moduli: Vec<CandidateModulus>,
}

impl CandidateSet {
    pub fn compute(p: &BiPoly, bits: u32) -> Result<Self> {
        let leading = p.leading_coeff_t()?;
        let discriminant = p.discriminant_t()?;
        let full = candidate_polynomial(p)?;
        let k = full.low_order();
        let d = full.shift_down(k).normalized();
        let boxes = isolate_complex_roots(&d, bits)?;
        let moduli = candidate_moduli(&d, &boxes)?;
        let kinds = classify(&d, &boxes, &leading, &discriminant);
        Ok(CandidateSet {
            d,
            origin_candidate: k > 0,
            leading,
            discriminant,
            boxes,
            kinds,
            moduli,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Index into `moduli` of the circle holding box `b`.
    pub fn modulus_of_box(&self, b: usize) -> Option<usize> {
        self.moduli.iter().position(|m| m.boxes.contains(&b))
    }

    pub fn largest_modulus_f64(&self) -> Option<f64> {
        self.moduli.last().map(|m| m.value.to_f64())
    }
}

/// Marks the boxes holding roots of `gcd(lc, D)` and `gcd(disc, D)`.
fn classify(d: &UniPoly, boxes: &[ComplexBox], lc: &UniPoly, disc: &UniPoly) -> Vec<CandidateKind> {
    let mut kinds = vec![CandidateKind::default(); boxes.len()];
    let mut mark = |factor: &UniPoly, set: &mut dyn FnMut(&mut CandidateKind)| {
        let g = UniPoly::gcd(factor, d);
        if g.degree().unwrap_or(0) == 0 {
            return;
        }
        for z in aberth(&real_to_complex(&g.normalized().to_f64_coeffs())) {
            let nearest = boxes
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (a.center_f64() - z)
                        .norm()
                        .total_cmp(&(b.center_f64() - z).norm())
                })
                .map(|(i, _)| i);
            if let Some(i) = nearest {
                set(&mut kinds[i]);
            }
        }
    };
    mark(lc, &mut |k| k.leading_vanishes = true);
    mark(disc, &mut |k| k.discriminant_vanishes = true);
    kinds
}
