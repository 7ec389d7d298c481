//! Floating-point polynomial helpers shared by root location and path tracking.

use num_complex::Complex64;

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Drops exactly-zero leading coefficients.
fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let n = coeffs
        .iter()
        .rposition(|c| c.norm() != 0.0)
        .map_or(0, |k| k + 1);
    &coeffs[..n]
}

/// All complex roots by Aberth-Ehrlich simultaneous iteration.
pub(crate) fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let coeffs = trim(coeffs);
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lc).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    // Fujiwara bound for the initial circle.
    let bound = (1..=n)
        .map(|k| {
            let c = monic[n - k].norm();
            if k == n {
                (c / 2.0).powf(1.0 / k as f64)
            } else {
                c.powf(1.0 / k as f64)
            }
        })
        .fold(0.0f64, f64::max)
        * 2.0;
    let centre = -monic[n - 1] / n as f64;
    let radius = if bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            centre + Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    for _ in 0..800 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

pub(crate) fn real_to_complex(coeffs: &[f64]) -> Vec<Complex64> {
    coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()
}

/// Synthetic division by `(T - root)`, dropping the remainder.
pub(crate) fn deflate(coeffs: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let coeffs = trim(coeffs);
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let mut q = vec![Complex64::new(0.0, 0.0); n];
    let mut carry = coeffs[n];
    for k in (0..n).rev() {
        q[k] = carry;
        carry = coeffs[k] + carry * root;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aberth_finds_roots_of_unity() {
        // z^5 - 1
        let mut c = vec![Complex64::new(0.0, 0.0); 6];
        c[0] = Complex64::new(-1.0, 0.0);
        c[5] = Complex64::new(1.0, 0.0);
        let roots = aberth(&c);
        assert_eq!(roots.len(), 5);
        for r in &roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(horner(&c, *r).norm() < 1e-12);
        }
    }

    #[test]
    fn aberth_handles_clustered_real_roots() {
        // (z - 1)(z - 1.001)(z + 2)
        let r = [1.0, 1.001, -2.0];
        let coeffs = [
            -(r[0] * r[1] * r[2]),
            r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            -(r[0] + r[1] + r[2]),
            1.0,
        ];
        let roots = aberth(&real_to_complex(&coeffs));
        for e in r {
            assert!(roots
                .iter()
                .any(|z| (z - Complex64::new(e, 0.0)).norm() < 1e-9));
        }
    }

    #[test]
    fn deflation() {
        // (T - 2)(T + 3) / (T - 2) = T + 3
        let c = real_to_complex(&[-6.0, 1.0, 1.0]);
        let q = deflate(&c, Complex64::new(2.0, 0.0));
        assert_eq!(q, real_to_complex(&[3.0, 1.0]));
    }
}
