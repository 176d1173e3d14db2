//! Scalar building blocks: Laguerre polynomials, the moment polynomials
//! `Q_n` of the free unitary Brownian motion, its free cumulants, and the
//! series `eta` and `lambda` that everything else is assembled from.

use serde::Serialize;
use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries1};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamError {
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("time must be finite and non-negative, got {0}")]
    Time(f64),
}

/// Rank `alpha = tau(P)` of the projection and the time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub t: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, t: f64) -> Result<Self, ParamError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ParamError::Alpha(alpha));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ParamError::Time(t));
        }
        Ok(Self { alpha, t })
    }
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by the three-term
/// recurrence.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for i in 1..n {
        let i = i as f64;
        let next = ((2.0 * i + 1.0 + k - x) * cur - (i + k) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Q_n(t) = L_{n-1}^{(1)}(n t) / n`, with `Q_0 = 1`.
pub fn q_poly(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    laguerre(n - 1, 1, n as f64 * t) / n as f64
}

/// `tau(Y_t^n)` for any integer `n`; negative powers are adjoints and give
/// the same real value.
pub fn fubm_moment(n: i64, t: f64) -> f64 {
    let n = n.unsigned_abs() as usize;
    (-(n as f64) * t / 2.0).exp() * q_poly(n, t)
}

/// Free cumulant `k_n(Y_t) = e^{-nt/2} (-n)^{n-1} t^{n-1} / n!`.
pub fn cumulant_y(n: usize, t: f64) -> f64 {
    assert!(n >= 1, "cumulants start at order 1");
    let nf = n as f64;
    let mut v = (-nf * t / 2.0).exp();
    for i in 1..n {
        v *= -nf * t / i as f64;
    }
    v / nf
}

/// The polynomials `v_r(t)` entering the one-star mixed cumulant.
pub fn v_poly(r: usize, t: f64) -> f64 {
    match r {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let rm1 = (r - 1) as f64;
            let mut sum = 0.0;
            let mut binom = 1.0;
            let mut falling = 1.0;
            let mut pow = 1.0;
            for j in 0..=(r - 2) {
                if j > 0 {
                    binom *= (r - 1 - j) as f64 / j as f64;
                    falling *= (r - j) as f64;
                    pow *= rm1 * t;
                }
                sum += binom * pow / falling;
            }
            sum
        }
    }
}

/// `k_r[Y*, Y, ..., Y]` with one adjoint followed by `r - 1` copies of `Y`.
pub fn cumulant_star_word(r: usize, t: f64) -> f64 {
    assert!(r >= 1, "cumulants start at order 1");
    let base = -(-t / 2.0).exp();
    base.powi(r as i32 - 2) * (v_poly(r - 1, t) - (-t).exp() * v_poly(r, t))
}

/// Free cumulants of a projection of trace one half.
pub fn projection_cumulant_half(m: usize) -> f64 {
    assert!(m >= 1, "cumulants start at order 1");
    if m == 1 {
        return 0.5;
    }
    if m % 2 == 1 {
        return 0.0;
    }
    let j = m / 2;
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    sign * catalan(j - 1) as f64 / 4f64.powi(j as i32)
}

/// The `j`-th Catalan number. Exact up to `j = 35`.
pub fn catalan(j: usize) -> u64 {
    let mut c: u128 = 1;
    for n in 0..j as u128 {
        c = c * 2 * (2 * n + 1) / (n + 2);
    }
    u64::try_from(c).expect("Catalan number overflows u64")
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `eta(t, z) = sum_{n >= 1} Q_n(t) z^n`.
pub fn eta_series(t: f64, cap: usize) -> TruncatedSeries1 {
    TruncatedSeries1::from_fn(cap, |n| if n == 0 { 0.0 } else { q_poly(n, t) })
}

/// `eta(t, z)^j` from its Laguerre expansion; `t` is used as given.
pub fn eta_power(t: f64, j: usize, cap: usize) -> TruncatedSeries1 {
    assert!(j >= 1, "power must be positive");
    TruncatedSeries1::from_fn(cap, |m| {
        if m < j {
            0.0
        } else {
            j as f64 * laguerre(m - j, j, m as f64 * t) / m as f64
        }
    })
}

/// Compositional inverse of `eta(t, .)`: `y e^{ty} / (1 + y)`.
pub fn eta_inverse_series(t: f64, cap: usize) -> Result<TruncatedSeries1, SeriesError> {
    let y = TruncatedSeries1::monomial(1.0, 1, cap);
    let e = y.scale(t).exp()?;
    y.mul(&e)
        .div(&TruncatedSeries1::from_coeffs(&[1.0, 1.0], cap))
}

/// `lambda(z) = (1 - sqrt(1 - z)) / (1 + sqrt(1 - z))`.
pub fn lambda_series(cap: usize) -> TruncatedSeries1 {
    let s = sqrt_one_minus_z(cap);
    let one = TruncatedSeries1::one(cap);
    (&one - &s)
        .div(&(&one + &s))
        .expect("1 + sqrt(1 - z) has constant term 2")
}

/// `sqrt(1 - z)`.
pub fn sqrt_one_minus_z(cap: usize) -> TruncatedSeries1 {
    TruncatedSeries1::from_coeffs(&[1.0, -1.0], cap)
        .sqrt()
        .expect("1 - z has constant term 1")
}

/// `max |[z^n] (eta(t, .) o eta^{-1}(t, .) - z)|` up to degree `cap`.
pub fn biane_inverse_residual(t: f64, cap: usize) -> Result<f64, SeriesError> {
    let c = eta_series(t, cap).compose(&eta_inverse_series(t, cap)?)?;
    Ok(c.max_abs_diff(&TruncatedSeries1::monomial(1.0, 1, cap)))
}

/// Residual of `eta(2t, w) / (1 + eta(2t, w)) e^{2t eta(2t, w)} = w`.
pub fn functional_relation_residual(t: f64, cap: usize) -> Result<f64, SeriesError> {
    let eta = eta_series(2.0 * t, cap);
    let one = TruncatedSeries1::one(cap);
    let lhs = eta.div(&(&one + &eta))?.mul(&eta.scale(2.0 * t).exp()?);
    Ok(lhs.max_abs_diff(&TruncatedSeries1::monomial(1.0, 1, cap)))
}

/// Residual of `4 lambda / (1 + lambda)^2 = z`.
pub fn lambda_residual(cap: usize) -> Result<f64, SeriesError> {
    let l = lambda_series(cap);
    let one = TruncatedSeries1::one(cap);
    let den = (&one + &l).powi(2);
    let lhs = l.scale(4.0).div(&den)?;
    Ok(lhs.max_abs_diff(&TruncatedSeries1::monomial(1.0, 1, cap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Explicit sum `sum_r binom(n+k, n-r) (-x)^r / r!`.
    fn laguerre_sum(n: usize, k: usize, x: f64) -> f64 {
        let mut fact = 1.0;
        let mut s = 0.0;
        for r in 0..=n {
            if r > 0 {
                fact *= r as f64;
            }
            s += binomial(n + k, n - r) * (-x).powi(r as i32) / fact;
        }
        s
    }

    #[test]
    fn laguerre_matches_explicit_sum() {
        assert_eq!(laguerre(0, 3, 1.7), 1.0);
        assert_abs_diff_eq!(laguerre(1, 1, 0.4), 2.0 - 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(laguerre(2, 1, 3.0), -1.5, epsilon = 1e-14);
        for n in 0..12 {
            for k in 0..5 {
                for &x in &[0.0, 0.3, 1.0, 2.5, 7.0] {
                    assert_relative_eq!(
                        laguerre(n, k, x),
                        laguerre_sum(n, k, x),
                        max_relative = 1e-10,
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn q_poly_low_orders() {
        for &t in &[0.0, 0.4, 1.0, 2.2] {
            assert_eq!(q_poly(0, t), 1.0);
            assert_abs_diff_eq!(q_poly(1, t), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(q_poly(2, t), 1.0 - t, epsilon = 1e-14);
            assert_abs_diff_eq!(q_poly(3, t), 1.0 - 3.0 * t + 1.5 * t * t, epsilon = 1e-13);
        }
    }

    #[test]
    fn fubm_moment_values() {
        assert_eq!(fubm_moment(0, 0.8), 1.0);
        assert_abs_diff_eq!(fubm_moment(1, 1.0), (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(fubm_moment(2, 1.0), 0.0, epsilon = 1e-15);
        assert_eq!(fubm_moment(-3, 0.7), fubm_moment(3, 0.7));
    }

    #[test]
    fn cumulant_y_values() {
        let t: f64 = 0.9;
        assert_abs_diff_eq!(cumulant_y(1, t), (-t / 2.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant_y(2, t), -t * (-t).exp(), epsilon = 1e-15);
        // (-3)^2 t^2 / 3! e^{-3t/2}
        assert_abs_diff_eq!(
            cumulant_y(3, t),
            1.5 * t * t * (-1.5 * t).exp(),
            epsilon = 1e-15
        );
        for n in 2..8 {
            assert_eq!(cumulant_y(n, 0.0), 0.0);
        }
    }

    #[test]
    fn v_poly_values() {
        assert_eq!(v_poly(0, 2.0), 0.0);
        assert_eq!(v_poly(1, 5.0), 1.0);
        assert_eq!(v_poly(2, 3.0), 1.0);
        assert_abs_diff_eq!(v_poly(3, 0.7), 1.7, epsilon = 1e-15);
        // r = 4: 1 + 2*3t/3 + 9t^2/(3*2)
        let t = 0.4;
        assert_abs_diff_eq!(v_poly(4, t), 1.0 + 2.0 * t + 1.5 * t * t, epsilon = 1e-15);
    }

    #[test]
    fn one_star_cumulants() {
        let t: f64 = 1.1;
        assert_abs_diff_eq!(cumulant_star_word(1, t), (-t / 2.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant_star_word(2, t), 1.0 - (-t).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant_star_word(2, 0.0), 0.0);
        // k_3[Y*, Y, Y] = tau(Y*YY) - 2 k_1(Y*) k_2[Y, Y]... computed from moments:
        // tau(Y* Y Y) = tau(Y); moment-cumulant expansion over NC(3).
        let m1 = (-t / 2.0).exp();
        let k2_star = 1.0 - (-t).exp();
        let k2_yy = cumulant_y(2, t);
        // tau(Y*YY) = k3 + k1*k2[Y,Y] + 2 k2[Y*,Y] k1 + k1^3
        let k3 = m1 - m1 * k2_yy - 2.0 * k2_star * m1 - m1.powi(3);
        assert_abs_diff_eq!(cumulant_star_word(3, t), k3, epsilon = 1e-14);
    }

    #[test]
    fn projection_cumulants() {
        assert_eq!(projection_cumulant_half(1), 0.5);
        assert_eq!(projection_cumulant_half(2), 0.25);
        assert_eq!(projection_cumulant_half(3), 0.0);
        assert_eq!(projection_cumulant_half(4), -1.0 / 16.0);
        assert_eq!(projection_cumulant_half(6), 2.0 / 64.0);
    }

    #[test]
    fn catalan_numbers() {
        let want = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (j, &c) in want.iter().enumerate() {
            assert_eq!(catalan(j), c);
        }
        assert_eq!(catalan(35), 3_116_285_494_907_301_262);
    }

    #[test]
    fn eta_examples() {
        let e0 = eta_series(0.0, 10);
        for n in 1..=10 {
            assert_abs_diff_eq!(e0.coeff(n), 1.0, epsilon = 1e-15);
        }
        assert_eq!(e0.coeff(0), 0.0);
        let e1 = eta_series(1.0, 6);
        assert_abs_diff_eq!(e1.coeff(2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e1.coeff(1), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eta_power_examples() {
        let t = 0.6;
        assert!(eta_power(t, 1, 12).max_abs_diff(&eta_series(t, 12)) < 1e-14);
        let sq0 = eta_power(0.0, 2, 10);
        for m in 0..=10 {
            assert_abs_diff_eq!(sq0.coeff(m), m.saturating_sub(1) as f64, epsilon = 1e-12);
        }
        let eta = eta_series(t, 14);
        for j in 1..6 {
            let direct = eta.powi(j);
            assert!(eta_power(t, j, 14).max_abs_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn lambda_low_coefficients() {
        let l = lambda_series(8);
        assert_eq!(l.coeff(0), 0.0);
        assert_abs_diff_eq!(l.coeff(1), 0.25, epsilon = 1e-16);
        assert_abs_diff_eq!(l.coeff(2), 0.125, epsilon = 1e-16);
        assert_abs_diff_eq!(l.coeff(3), 5.0 / 64.0, epsilon = 1e-16);
    }

    #[test]
    fn compose_geometric_with_lambda() {
        let l = lambda_series(8);
        let geo = TruncatedSeries1::from_fn(8, |_| 1.0);
        let c = geo.compose(&l).unwrap();
        assert_abs_diff_eq!(c.coeff(0), 1.0);
        assert_abs_diff_eq!(c.coeff(1), 0.25, epsilon = 1e-16);
        assert_abs_diff_eq!(c.coeff(2), 3.0 / 16.0, epsilon = 1e-16);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.5, 1.0).is_ok());
        assert!(ModelParams::new(1.0, 0.0).is_ok());
        assert_eq!(ModelParams::new(0.0, 1.0), Err(ParamError::Alpha(0.0)));
        assert_eq!(ModelParams::new(1.2, 1.0), Err(ParamError::Alpha(1.2)));
        assert_eq!(ModelParams::new(0.5, -1.0), Err(ParamError::Time(-1.0)));
        assert!(ModelParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn inverse_and_functional_relations() {
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            assert!(biane_inverse_residual(t, 12).unwrap() < 1e-9);
            // eta(2t, .) runs over the same times as above.
            assert!(functional_relation_residual(t / 2.0, 12).unwrap() < 1e-9);
        }
        assert!(lambda_residual(16).unwrap() < 1e-10);
        // Wrong time scaling in the exponent breaks the relation.
        let eta = eta_series(1.0, 8);
        let one = TruncatedSeries1::one(8);
        let bad = eta
            .div(&(&one + &eta))
            .unwrap()
            .mul(&eta.scale(2.0).exp().unwrap());
        assert!(bad.max_abs_diff(&TruncatedSeries1::monomial(1.0, 1, 8)) > 1e-2);
    }
}
