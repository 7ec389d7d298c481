use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{rational_to_string, to_f64, Rational, UniPoly};
use crate::error::{Error, Result};

/// Polynomial in `T` with coefficients in `Q[X]`; `tcoeffs[j]` multiplies `T^j`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    tcoeffs: Vec<UniPoly>,
}

impl BiPoly {
    pub fn new(mut tcoeffs: Vec<UniPoly>) -> Self {
        while tcoeffs.last().is_some_and(UniPoly::is_zero) {
            tcoeffs.pop();
        }
        BiPoly { tcoeffs }
    }

    pub fn zero() -> Self {
        BiPoly {
            tcoeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::new(vec![UniPoly::one()])
    }

    /// A polynomial in `T` alone, with rational coefficients.
    pub fn from_t_coeffs(coeffs: &UniPoly) -> Self {
        Self::new(
            coeffs
                .coeffs()
                .iter()
                .map(|c| UniPoly::constant(c.clone()))
                .collect(),
        )
    }

    /// Builds from `(x_degree, t_degree, coefficient)` triples.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let mut grid: Vec<Vec<Rational>> = Vec::new();
        for (i, j, c) in terms {
            if grid.len() <= j {
                grid.resize(j + 1, Vec::new());
            }
            if grid[j].len() <= i {
                grid[j].resize(i + 1, Rational::zero());
            }
            grid[j][i] += c;
        }
        Self::new(grid.into_iter().map(UniPoly::new).collect())
    }

    pub fn tcoeffs(&self) -> &[UniPoly] {
        &self.tcoeffs
    }

    pub fn tcoeff(&self, j: usize) -> UniPoly {
        self.tcoeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.tcoeffs.is_empty()
    }

    /// Degree in `T`; `None` for the zero polynomial.
    pub fn deg_t(&self) -> Option<usize> {
        self.tcoeffs.len().checked_sub(1)
    }

    pub fn deg_x(&self) -> usize {
        self.tcoeffs
            .iter()
            .filter_map(UniPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// `lc_T(P)`, the coefficient of the highest power of `T`.
    pub fn leading_coeff_t(&self) -> Result<UniPoly> {
        self.tcoeffs
            .last()
            .cloned()
            .ok_or_else(|| Error::invalid("leading coefficient of the zero polynomial"))
    }

    pub fn derivative_t(&self) -> Self {
        Self::new(
            self.tcoeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(&Rational::from_integer(j.into())))
                .collect(),
        )
    }

    pub fn derivative_x(&self) -> Self {
        Self::new(self.tcoeffs.iter().map(UniPoly::derivative).collect())
    }

    /// Specializes `X := x`, giving a polynomial in `T`.
    pub fn eval_x(&self, x: &Rational) -> UniPoly {
        UniPoly::new(self.tcoeffs.iter().map(|c| c.eval(x)).collect())
    }

    pub fn eval(&self, x: &Rational, t: &Rational) -> Rational {
        self.eval_x(x).eval(t)
    }

    pub fn eval_complex(&self, x: Complex64, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.tcoeffs.iter().rev() {
            acc = acc * t + c.eval_complex(x);
        }
        acc
    }

    /// Coefficients as `f64`, `[j][i]` for `X^i T^j`.
    pub fn to_f64_grid(&self) -> Vec<Vec<f64>> {
        self.tcoeffs
            .iter()
            .map(|c| c.coeffs().iter().map(to_f64).collect())
            .collect()
    }

    /// `X -> X^p` in every coefficient.
    pub fn ramify(&self, p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::invalid("ramification index must be at least 1"));
        }
        Ok(Self::new(
            self.tcoeffs.iter().map(|c| c.compose_power(p)).collect(),
        ))
    }

    /// `X -> inner(X)` in every coefficient.
    pub fn substitute_x(&self, inner: &UniPoly) -> Self {
        Self::new(self.tcoeffs.iter().map(|c| c.compose(inner)).collect())
    }

    /// `P(X, T + t0)`
    pub fn shift_t(&self, t0: &Rational) -> Self {
        let lin = BiPoly::new(vec![UniPoly::constant(t0.clone()), UniPoly::one()]);
        let mut acc = BiPoly::zero();
        for c in self.tcoeffs.iter().rev() {
            acc = &(&acc * &lin) + &BiPoly::new(vec![c.clone()]);
        }
        acc
    }

    pub fn scale_x(&self, c: &UniPoly) -> Self {
        Self::new(self.tcoeffs.iter().map(|a| a * c).collect())
    }

    fn shift_t_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut t = vec![UniPoly::zero(); k];
        t.extend(self.tcoeffs.iter().cloned());
        Self::new(t)
    }

    /// Pseudo-division in `T`: returns `(Q, R)` with
    /// `lc(B)^(deg A - deg B + 1) * A = Q*B + R` and `deg R < deg B`.
    pub fn pseudo_div_rem(&self, divisor: &Self) -> (Self, Self) {
        let db = divisor.deg_t().expect("pseudo-division by zero");
        let lb = divisor.tcoeffs[db].clone();
        let Some(da) = self.deg_t() else {
            return (Self::zero(), Self::zero());
        };
        if da < db {
            return (Self::zero(), self.clone());
        }
        let mut e = da - db + 1;
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some(dr) = r.deg_t() {
            if dr < db {
                break;
            }
            let s = BiPoly::new(vec![r.tcoeffs[dr].clone()]).shift_t_up(dr - db);
            q = &q.scale_x(&lb) + &s;
            r = &r.scale_x(&lb) - &(&s * divisor);
            e -= 1;
        }
        let f = lb.pow(e as u32);
        (q.scale_x(&f), r.scale_x(&f))
    }

    pub fn pseudo_rem(&self, divisor: &Self) -> Self {
        self.pseudo_div_rem(divisor).1
    }

    /// Monic gcd of the coefficients in `Q[X]`.
    pub fn content(&self) -> UniPoly {
        self.tcoeffs
            .iter()
            .fold(UniPoly::zero(), |acc, c| UniPoly::gcd(&acc, c))
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content();
        Self::new(self.tcoeffs.iter().map(|a| a.exact_div(&c)).collect())
    }

    fn exact_div_x(&self, c: &UniPoly) -> Self {
        Self::new(self.tcoeffs.iter().map(|a| a.exact_div(c)).collect())
    }

    /// Gcd in `Q(X)[T]`, returned primitive over `Q[X]`. Units yield `1`.
    pub fn gcd_t(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.primitive_part();
        }
        if b.is_zero() {
            return a.primitive_part();
        }
        let (mut a, mut b) = (a.primitive_part(), b.primitive_part());
        if a.deg_t() < b.deg_t() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        if a.deg_t() == Some(0) {
            Self::one()
        } else {
            a
        }
    }

    /// Exact quotient in `Q(X)[T]`, made primitive over `Q[X]`.
    pub fn div_t(&self, divisor: &Self) -> Self {
        let (q, r) = self.pseudo_div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact division in Q(X)[T]");
        q.primitive_part()
    }

    /// `P / gcd_T(P, dP/dT)`, primitive over `Q[X]`.
    pub fn squarefree_part_t(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if self.deg_t() == Some(0) {
            return self.primitive_part();
        }
        let g = Self::gcd_t(self, &self.derivative_t());
        if g.deg_t() == Some(0) {
            self.primitive_part()
        } else {
            self.div_t(&g)
        }
    }

    /// `Res_T(A, B)` by the subresultant remainder sequence over `Q[X]`.
    pub fn resultant_t(a: &Self, b: &Self) -> Result<UniPoly> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::invalid("resultant of a zero polynomial"));
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        let mut sign = false;
        let (da, db) = (a.deg_t().unwrap(), b.deg_t().unwrap());
        if da < db {
            std::mem::swap(&mut a, &mut b);
            if da % 2 == 1 && db % 2 == 1 {
                sign = !sign;
            }
        }
        let apply_sign = |u: UniPoly, s: bool| if s { -u } else { u };

        let mut g = UniPoly::one();
        let mut h = UniPoly::one();
        loop {
            let (da, db) = (a.deg_t().unwrap(), b.deg_t().unwrap());
            if db == 0 {
                // Res(A, c) = c^deg A, scaled by the accumulated subresultant factor.
                let lb = b.tcoeffs[0].clone();
                let res = if h.is_one_poly() {
                    lb.pow(da as u32)
                } else {
                    lb.pow(da as u32).exact_div(&h.pow(da as u32 - 1))
                };
                return Ok(apply_sign(res, sign));
            }
            let delta = da - db;
            if da % 2 == 1 && db % 2 == 1 {
                sign = !sign;
            }
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return Ok(UniPoly::zero());
            }
            a = b;
            let divisor = &g * &h.pow(delta as u32);
            b = r.exact_div_x(&divisor);
            g = a.tcoeffs.last().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta as u32).exact_div(&h.pow(delta as u32 - 1))
            };
        }
    }

    /// `disc_T(P) = (-1)^(d(d-1)/2) Res_T(P, dP/dT) / lc_T(P)`.
    pub fn discriminant_t(&self) -> Result<UniPoly> {
        let d = match self.deg_t() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::invalid("discriminant needs degree at least 1 in T")),
        };
        if d == 1 {
            return Ok(UniPoly::one());
        }
        let res = Self::resultant_t(self, &self.derivative_t())?;
        let lc = self.leading_coeff_t()?;
        let q = res.exact_div(&lc);
        Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
    }

    /// True when `self = c * other` for a nonzero rational `c`.
    pub fn is_associate(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.tcoeffs.len() != other.tcoeffs.len() {
            return false;
        }
        let l = self.tcoeffs.last().unwrap().leading().unwrap();
        let r = other.tcoeffs.last().unwrap().leading().unwrap();
        let c = l / r;
        self.tcoeffs
            .iter()
            .zip(&other.tcoeffs)
            .all(|(a, b)| *a == b.scale(&c))
    }
}

impl UniPoly {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeffs()[0].is_one()
    }
}

impl fmt::Display for BiPoly {
    /// Expanded monomials, highest `T` degree first; re-parseable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.tcoeffs.iter().enumerate().rev() {
            for (i, a) in c.coeffs().iter().enumerate().rev() {
                if a.is_zero() {
                    continue;
                }
                let neg = a.is_negative();
                if first {
                    if neg {
                        f.write_str("-")?;
                    }
                } else {
                    f.write_str(if neg { " - " } else { " + " })?;
                }
                first = false;
                let abs = a.abs();
                let mut factors = Vec::new();
                if !abs.is_one() || (i == 0 && j == 0) {
                    factors.push(rational_to_string(&abs));
                }
                match i {
                    0 => {}
                    1 => factors.push("X".into()),
                    _ => factors.push(format!("X^{i}")),
                }
                match j {
                    0 => {}
                    1 => factors.push("T".into()),
                    _ => factors.push(format!("T^{j}")),
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let n = self.tcoeffs.len().max(rhs.tcoeffs.len());
        BiPoly::new((0..n).map(|j| &self.tcoeff(j) + &rhs.tcoeff(j)).collect())
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let n = self.tcoeffs.len().max(rhs.tcoeffs.len());
        BiPoly::new((0..n).map(|j| &self.tcoeff(j) - &rhs.tcoeff(j)).collect())
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![UniPoly::zero(); self.tcoeffs.len() + rhs.tcoeffs.len() - 1];
        for (i, a) in self.tcoeffs.iter().enumerate() {
            for (j, b) in rhs.tcoeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BiPoly::new(out)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::new(self.tcoeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{int, rat};

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn bp(t: Vec<UniPoly>) -> BiPoly {
        BiPoly::new(t)
    }

    /// Determinant of the Sylvester matrix, computed by fraction-free
    /// elimination over Q(X) represented as (numerator, denominator) pairs.
    fn sylvester_resultant(a: &BiPoly, b: &BiPoly) -> UniPoly {
        let m = a.deg_t().unwrap();
        let n = b.deg_t().unwrap();
        let size = m + n;
        let mut rows: Vec<Vec<UniPoly>> = Vec::new();
        for i in 0..n {
            let mut row = vec![UniPoly::zero(); size];
            for j in 0..=m {
                row[i + j] = a.tcoeff(m - j);
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![UniPoly::zero(); size];
            for j in 0..=n {
                row[i + j] = b.tcoeff(n - j);
            }
            rows.push(row);
        }
        // Cofactor expansion; sizes here stay tiny.
        fn det(mat: &[Vec<UniPoly>]) -> UniPoly {
            let n = mat.len();
            if n == 1 {
                return mat[0][0].clone();
            }
            let mut acc = UniPoly::zero();
            for col in 0..n {
                if mat[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<UniPoly>> = mat[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &mat[0][col] * &det(&minor);
                acc = if col % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
        det(&rows)
    }

    #[test]
    fn resultant_examples() {
        let t = bp(vec![u(&[]), u(&[1])]);
        assert!(BiPoly::resultant_t(&t, &t).unwrap().is_zero());

        // Res_T(T^2 - X, 2T) = -4X
        let a = bp(vec![u(&[0, -1]), u(&[]), u(&[1])]);
        let b = bp(vec![u(&[]), u(&[2])]);
        let expected = sylvester_resultant(&a, &b);
        assert_eq!(expected, u(&[0, -4]));
        assert_eq!(BiPoly::resultant_t(&a, &b).unwrap(), expected);

        // B constant in T: Res = c^deg A
        let a = bp(vec![u(&[-1]), UniPoly::new(vec![rat(2, 3), int(-1)])]);
        let c = bp(vec![u(&[1, 3])]);
        assert_eq!(BiPoly::resultant_t(&a, &c).unwrap(), u(&[1, 3]));
        let a2 = &a * &a;
        assert_eq!(BiPoly::resultant_t(&a2, &c).unwrap(), u(&[1, 3]).pow(2));
        assert_eq!(BiPoly::resultant_t(&c, &a2).unwrap(), u(&[1, 3]).pow(2));
    }

    #[test]
    fn resultant_rejects_zero() {
        let t = bp(vec![u(&[]), u(&[1])]);
        assert!(matches!(
            BiPoly::resultant_t(&t, &BiPoly::zero()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn resultant_matches_sylvester_on_mixed_degrees() {
        let a = bp(vec![u(&[1, 2]), u(&[0, 1, -1]), u(&[3]), u(&[1, 0, 1])]);
        let b = bp(vec![u(&[-2, 0, 1]), u(&[1, 1]), u(&[0, 0, 2])]);
        assert_eq!(
            BiPoly::resultant_t(&a, &b).unwrap(),
            sylvester_resultant(&a, &b)
        );
        assert_eq!(
            BiPoly::resultant_t(&b, &a).unwrap(),
            sylvester_resultant(&b, &a)
        );
    }

    #[test]
    fn discriminant_examples() {
        // X T^2 - T + 1 -> 1 - 4X
        let p = bp(vec![u(&[1]), u(&[-1]), u(&[0, 1])]);
        assert_eq!(p.discriminant_t().unwrap(), u(&[1, -4]));
        // T^2 - (1 - X) -> 4(1 - X)
        let p = bp(vec![u(&[-1, 1]), u(&[]), u(&[1])]);
        assert_eq!(p.discriminant_t().unwrap(), u(&[4, -4]));
        // T^3 - 3T - X -> 108 - 27X^2
        let p = bp(vec![u(&[0, -1]), u(&[-3]), u(&[]), u(&[1])]);
        assert_eq!(p.discriminant_t().unwrap(), u(&[108, 0, -27]));
        assert!(matches!(
            bp(vec![u(&[1, 1])]).discriminant_t(),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn squarefree_examples() {
        let tm1 = bp(vec![u(&[-1]), u(&[1])]);
        assert!((&tm1 * &tm1).squarefree_part_t().is_associate(&tm1));

        let q = bp(vec![u(&[0, -1]), u(&[]), u(&[1])]);
        assert!(q.squarefree_part_t().is_associate(&q));

        let tp1 = bp(vec![u(&[1]), u(&[1])]);
        let p = &(&q * &q) * &tp1;
        assert!(p.squarefree_part_t().is_associate(&(&q * &tp1)));
    }

    #[test]
    fn leading_coefficients() {
        let p = bp(vec![u(&[1]), u(&[-1]), u(&[0, 1])]);
        assert_eq!(p.leading_coeff_t().unwrap(), u(&[0, 1]));
        let pole = bp(vec![u(&[-1]), UniPoly::new(vec![rat(2, 3), int(-1)])]);
        assert_eq!(
            pole.leading_coeff_t().unwrap(),
            UniPoly::new(vec![rat(2, 3), int(-1)])
        );
        let p = bp(vec![u(&[-1, 1]), u(&[]), u(&[1])]);
        assert_eq!(p.leading_coeff_t().unwrap(), UniPoly::one());
        assert!(BiPoly::zero().leading_coeff_t().is_err());
    }

    #[test]
    fn shift_and_ramify() {
        let p = bp(vec![u(&[-1, 1]), u(&[]), u(&[1])]); // T^2 - 1 + X
        let s = p.shift_t(&int(1)); // T^2 + 2T + X
        assert_eq!(s, bp(vec![u(&[0, 1]), u(&[2]), u(&[1])]));
        assert_eq!(
            p.ramify(3).unwrap(),
            bp(vec![u(&[-1, 0, 0, 1]), u(&[]), u(&[1])])
        );
        assert_eq!(p.ramify(1).unwrap(), p);
        assert!(p.ramify(0).is_err());
    }

    #[test]
    fn display_is_expanded() {
        let p = bp(vec![u(&[1]), u(&[-1]), u(&[0, 1])]);
        assert_eq!(p.to_string(), "X*T^2 - T + 1");
        let pole = bp(vec![u(&[-1]), UniPoly::new(vec![rat(2, 3), int(-1)])]);
        assert_eq!(pole.to_string(), "-X*T + 2/3*T - 1");
    }
}
