use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{rational_to_string, BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

/// Exponents of `X_1 .. X_n` followed by the exponent of `T`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub t: u32,
}

impl Monomial {
    pub fn x_degree(&self) -> u32 {
        self.x.iter().sum()
    }
}

/// Sparse polynomial in `X_1 .. X_n` and `T`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], 0, c)])
    }

    /// The variable `X_(i+1)`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut x = vec![0; nvars];
        x[i] = 1;
        Self::from_terms(nvars, [(x, 0, Rational::one())])
    }

    pub fn t(nvars: usize) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], 1, Rational::one())])
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, u32, Rational)>,
    ) -> Self {
        let mut p = Self::zero(nvars);
        for (x, t, c) in terms {
            assert_eq!(x.len(), nvars, "exponent vector length");
            p.add_term(Monomial { x, t }, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_t(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.t).max()
    }

    /// Same polynomial viewed in `n >= nvars` variables.
    pub fn with_nvars(&self, n: usize) -> Self {
        assert!(n >= self.nvars, "cannot drop variables");
        let mut p = Self::zero(n);
        for (m, c) in &self.terms {
            let mut x = m.x.clone();
            x.resize(n, 0);
            p.add_term(Monomial { x, t: m.t }, c.clone());
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative_t(&self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.t > 0 {
                p.add_term(
                    Monomial {
                        x: m.x.clone(),
                        t: m.t - 1,
                    },
                    c * Rational::from_integer(m.t.into()),
                );
            }
        }
        p
    }

    /// `P(0, T)`.
    pub fn at_origin(&self) -> UniPoly {
        let mut c = vec![Rational::zero(); self.deg_t().map_or(0, |d| d as usize + 1)];
        for (m, a) in &self.terms {
            if m.x_degree() == 0 {
                c[m.t as usize] += a;
            }
        }
        UniPoly::new(c)
    }

    /// `P(d_1 S, .., d_n S, T)` as a polynomial in `S` and `T`.
    pub fn restrict_to_ray(&self, d: &[Rational]) -> Result<BiPoly> {
        if d.len() != self.nvars {
            return Err(Error::invalid(format!(
                "direction has {} entries, polynomial has {} variables",
                d.len(),
                self.nvars
            )));
        }
        Ok(BiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let scale = m.x.iter().zip(d).fold(c.clone(), |acc, (&e, di)| {
                acc * num_traits::pow(di.clone(), e as usize)
            });
            (m.x_degree() as usize, m.t as usize, scale)
        })))
    }

    /// The polynomial as a [`BiPoly`]; needs at most one `X` variable.
    pub fn to_bipoly(&self) -> Result<BiPoly> {
        if self.nvars > 1 {
            return Err(Error::invalid("polynomial has more than one X variable"));
        }
        Ok(BiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                m.x.first().copied().unwrap_or(0) as usize,
                m.t as usize,
                c.clone(),
            )
        })))
    }

    pub fn from_bipoly(p: &BiPoly) -> Self {
        let mut out = Self::zero(1);
        for (j, c) in p.tcoeffs().iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                out.add_term(
                    Monomial {
                        x: vec![i as u32],
                        t: j as u32,
                    },
                    a.clone(),
                );
            }
        }
        out
    }

    fn var_name(&self, i: usize) -> String {
        if self.nvars == 1 {
            "X".into()
        } else {
            format!("X{}", i + 1)
        }
    }
}

fn binary(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let n = a.nvars.max(b.nvars);
    (a.with_nvars(n), b.with_nvars(n))
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let (mut a, b) = binary(self, rhs);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let (a, b) = binary(self, rhs);
        let mut out = MultiPoly::zero(a.nvars);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let x = ma.x.iter().zip(&mb.x).map(|(p, q)| p + q).collect();
                out.add_term(Monomial { x, t: ma.t + mb.t }, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    /// Expanded monomials, highest `T` degree first; re-parseable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            b.t.cmp(&a.t)
                .then(b.x_degree().cmp(&a.x_degree()))
                .then(b.x.cmp(&a.x))
        });
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || (m.x_degree() == 0 && m.t == 0) {
                factors.push(rational_to_string(&abs));
            }
            for (i, &e) in m.x.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.var_name(i)),
                    _ => factors.push(format!("{}^{e}", self.var_name(i))),
                }
            }
            match m.t {
                0 => {}
                1 => factors.push("T".into()),
                e => factors.push(format!("T^{e}")),
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({self})", self.nvars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{int, rat};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn arithmetic_and_display() {
        let one = MultiPoly::constant(2, int(1));
        let p = &(&(&one - &x(2, 0)) - &x(2, 1)) * &MultiPoly::t(2);
        let p = &p - &one;
        assert_eq!(p.to_string(), "-X1*T - X2*T + T - 1");
        let sq = (&x(2, 0) + &x(2, 1)).pow(2);
        assert_eq!(sq.to_string(), "X1^2 + 2*X1*X2 + X2^2");
        assert!((&sq - &sq).is_zero());
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
    }

    #[test]
    fn bipoly_round_trip() {
        let b = BiPoly::from_terms([(1, 2, int(1)), (0, 1, int(-1)), (0, 0, int(1))]);
        let m = MultiPoly::from_bipoly(&b);
        assert_eq!(m.to_string(), b.to_string());
        assert_eq!(m.to_bipoly().unwrap(), b);
        assert!(x(2, 1).to_bipoly().is_err());
    }

    #[test]
    fn ray_restriction() {
        // (1 - X1 - X2) T - 1 along (1, 2) is (1 - 3S) T - 1
        let one = MultiPoly::constant(2, int(1));
        let p = &(&(&(&one - &x(2, 0)) - &x(2, 1)) * &MultiPoly::t(2)) - &one;
        let r = p.restrict_to_ray(&[int(1), int(2)]).unwrap();
        assert_eq!(r.to_string(), "-3*X*T + T - 1");
        assert!(p.restrict_to_ray(&[int(1)]).is_err());
        assert_eq!(p.at_origin(), UniPoly::from_ints(&[-1, 1]));
        assert_eq!(p.derivative_t().to_string(), "-X1 - X2 + 1");
        let half = MultiPoly::constant(1, rat(1, 2));
        assert_eq!(half.to_string(), "1/2");
    }
}
