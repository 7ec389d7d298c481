//! Exact polynomial arithmetic over the rationals.
//!
//! [`UniPoly`] is a dense univariate polynomial in `X`, [`BiPoly`] a
//! polynomial in `T` whose coefficients are [`UniPoly`]s. Resultants in `T`
//! use the subresultant remainder sequence over `Q[X]`.

mod bipoly;
mod multipoly;
mod unipoly;

pub use bipoly::BiPoly;
pub use multipoly::{Monomial, MultiPoly};
pub use unipoly::UniPoly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational scalar; always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Magnitudes beyond f64 range.
        let l = ln_abs(r);
        let v = l.exp();
        if r.is_negative() {
            -v
        } else {
            v
        }
    })
}

pub fn from_f64(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite float")
}

/// Natural log of `|n|` for a nonzero big integer, accurate to f64 precision.
pub fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|r|` for a nonzero rational.
pub fn ln_abs(r: &Rational) -> f64 {
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

pub(crate) fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Rounds `r` to `sig` significant decimal digits, returned in positional notation.
pub fn format_significant(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let neg = r.is_negative();
    let a = r.abs();
    // Decimal exponent estimate, then correct.
    let mut e = (ln_abs(&a) / std::f64::consts::LN_10).floor() as i64;
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while a >= pow10(e + 1) {
        e += 1;
    }
    while a < pow10(e) {
        e -= 1;
    }
    let scale = pow10(sig as i64 - 1 - e);
    let scaled = &a * &scale;
    let mut digits = round_half_up(&scaled);
    // Rounding may carry into a new digit.
    if digits.to_string().len() > sig {
        e += 1;
        digits = round_half_up(&(&a * pow10(sig as i64 - 1 - e)));
    }
    let ds = digits.to_string();
    let point = e + 1; // digits before decimal point
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), ds)
    } else if point as usize >= ds.len() {
        format!("{}{}", ds, "0".repeat(point as usize - ds.len()))
    } else {
        format!("{}.{}", &ds[..point as usize], &ds[point as usize..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn round_half_up(x: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let num = x.numer() * &two + x.denom();
    num.div_floor(&(x.denom() * &two))
}
