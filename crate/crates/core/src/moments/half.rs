//! Closed-form pipelines available when `alpha = 1/2`.

use serde::Serialize;

use super::{alternating_ode, Method, MomentKind, MomentTable, MomentsError};
use crate::series::TruncatedSeries1;
use crate::specfun::{binomial, eta_series, lambda_series, sqrt_one_minus_z, ModelParams};

const HALF: f64 = 0.5;

/// `eta(2t, e^{-t} lambda(z))`.
fn eta_of_lambda(t: f64, cap: usize) -> Result<TruncatedSeries1, MomentsError> {
    let inner = lambda_series(cap).scale((-t).exp());
    Ok(eta_series(2.0 * t, cap).compose(&inner)?)
}

/// `1 / (2 sqrt(1 - z))`, the generating function of `r_n(infinity)`
/// including `r_0 = 1/2`.
fn n_infinity(cap: usize) -> TruncatedSeries1 {
    sqrt_one_minus_z(cap)
        .recip()
        .expect("sqrt(1 - z) has constant term 1")
        .scale(0.5)
}

/// `N_t(z) = sum_n r_n(t) z^n` at `alpha = 1/2`, with `r_0 = 1/2`:
/// `N_t = (1 + 2 eta(2t, e^{-t} lambda(z))) / (2 sqrt(1 - z))`.
pub fn jacobi_even_half_series(t: f64, cap: usize) -> Result<TruncatedSeries1, MomentsError> {
    ModelParams::new(HALF, t)?;
    let eta = eta_of_lambda(t, cap)?;
    let bracket = &TruncatedSeries1::one(cap) + &eta.scale(2.0);
    Ok(bracket.mul(&n_infinity(cap)))
}

/// `V_infinity(z) = 1 / (sqrt(1 - z) (1 + sqrt(1 - z)))`.
pub fn v_infinity_half(cap: usize) -> TruncatedSeries1 {
    let s = sqrt_one_minus_z(cap);
    let one = TruncatedSeries1::one(cap);
    s.mul(&(&one + &s)).recip().expect("constant term is 2")
}

/// `M_infinity(z) = (1 / sqrt(1 - z) - 1) / 2`.
pub fn m_infinity_half(cap: usize) -> TruncatedSeries1 {
    let inv = sqrt_one_minus_z(cap).recip().expect("constant term is 1");
    (&inv - &TruncatedSeries1::one(cap)).scale(0.5)
}

/// `V_t(z) = 1/2 + e^{t/2} sum_{n >= 1} s_{n,1}(t) z^n` at `alpha = 1/2`:
/// `V_infinity(z) (1 + eta) e^{-t eta}` with `eta = eta(2t, e^{-t} lambda(z))`.
pub fn v_half_series(t: f64, cap: usize) -> Result<TruncatedSeries1, MomentsError> {
    ModelParams::new(HALF, t)?;
    let eta = eta_of_lambda(t, cap)?;
    let damp = eta.scale(-t).exp()?;
    let one_plus = &TruncatedSeries1::one(cap) + &eta;
    Ok(v_infinity_half(cap).mul(&one_plus).mul(&damp))
}

/// `s_{n,1}(t)`, `n <= nmax`, read off `V_t`.
pub fn odd_half_closed(nmax: usize, t: f64, cap: usize) -> Result<MomentTable, MomentsError> {
    if cap < nmax {
        return Err(MomentsError::DegreeTooSmall {
            need: nmax,
            have: cap,
        });
    }
    let params = ModelParams::new(HALF, t)?;
    let v = v_half_series(t, cap)?;
    let decay = (-t / 2.0).exp();
    let mut table = MomentTable::new(MomentKind::OddAlt, params, Method::HalfSeries);
    for n in 0..=nmax {
        table.insert(n, decay * v.coeff(n));
    }
    Ok(table)
}

/// Coefficients `c_j(t)` of `(1 + w)/2 (1 + eta(2t, e^{-t} w)) e^{-t eta(2t, e^{-t} w)}`.
pub fn half_c_coefficients(t: f64, cap: usize) -> Result<Vec<f64>, MomentsError> {
    ModelParams::new(HALF, t)?;
    let inner = TruncatedSeries1::monomial((-t).exp(), 1, cap);
    let eta = eta_series(2.0 * t, cap).compose(&inner)?;
    let damp = eta.scale(-t).exp()?;
    let one_plus = &TruncatedSeries1::one(cap) + &eta;
    let half_shift = TruncatedSeries1::from_coeffs(&[0.5, 0.5], cap);
    Ok(half_shift.mul(&one_plus).mul(&damp).coeffs().to_vec())
}

/// `s_{n,1}(t) = e^{-t/2} 4^{-n} sum_{k <= n} binom(2n, n - k) c_k(t)`.
pub(crate) fn convolve_c(c: &[f64], n: usize, t: f64) -> f64 {
    let b: f64 = (0..=n).map(|k| binomial(2 * n, n - k) * c[k]).sum();
    (-t / 2.0).exp() * b / 4f64.powi(n as i32)
}

/// `s_{n,1}(t)` through the binomial convolution of the `c_j`.
pub fn odd_half_convolution(nmax: usize, t: f64) -> Result<MomentTable, MomentsError> {
    let params = ModelParams::new(HALF, t)?;
    let c = half_c_coefficients(t, nmax)?;
    let mut table = MomentTable::new(MomentKind::OddAlt, params, Method::Convolution);
    for n in 0..=nmax {
        table.insert(n, convolve_c(&c, n, t));
    }
    Ok(table)
}

/// Max coefficient residual of
/// `W_t^2 = e^t (1 - z) / (4z) [4 (1 - z) N_t^2 - 1]`, `W_t = (1 - z) V_t`,
/// up to degree `cap`.
pub fn verify_w_square(t: f64, cap: usize) -> Result<f64, MomentsError> {
    // One extra degree is consumed by the division by z.
    let big = cap + 1;
    let one_minus_z = TruncatedSeries1::from_coeffs(&[1.0, -1.0], big);
    let w = one_minus_z.mul(&v_half_series(t, big)?);
    let lhs = w.mul(&w).truncate(cap);
    let n = jacobi_even_half_series(t, big)?;
    let bracket = &one_minus_z.mul(&n.mul(&n)).scale(4.0) - &TruncatedSeries1::one(big);
    if bracket.coeff(0).abs() > 1e-10 {
        return Err(MomentsError::BracketNotDivisible(bracket.coeff(0)));
    }
    // The constant term is zero up to rounding; drop it before dividing.
    let mut c = bracket.coeffs().to_vec();
    c[0] = 0.0;
    let b = TruncatedSeries1::from_coeffs(&c, big);
    let rhs = b
        .div_z()?
        .mul(&one_minus_z.truncate(cap))
        .scale(t.exp() / 4.0);
    Ok(lhs.max_abs_diff(&rhs))
}

/// Max coefficient residual of `e^{-t} z V_t^2 = N_t^2 - N_infinity^2` up to
/// degree `cap`.
pub fn verify_oddeven(t: f64, cap: usize) -> Result<f64, MomentsError> {
    let v = v_half_series(t, cap)?;
    let lhs = v.mul(&v).shift_up().scale((-t).exp());
    let n = jacobi_even_half_series(t, cap)?;
    let ninf = n_infinity(cap);
    let rhs = &n.mul(&n) - &ninf.mul(&ninf);
    Ok(lhs.max_abs_diff(&rhs))
}

/// Coefficient residual of the stationary equation
/// `[2z(a + M) - M] V + [2z(a + M) - (1 + 2M)] z V' = 0`.
pub fn stationary_residual(v: &TruncatedSeries1, m: &TruncatedSeries1, alpha: f64) -> f64 {
    let cap = v.cap().min(m.cap());
    let one = TruncatedSeries1::one(cap);
    let a_plus_m = &TruncatedSeries1::constant(alpha, cap) + m;
    let two_z = a_plus_m.shift_up().scale(2.0);
    let first = &two_z - m;
    let second = &two_z - &(&one + &m.scale(2.0));
    (&first.mul(v) + &second.mul(&v.euler())).max_abs()
}

/// Stationary equation checked on `V_infinity` and `M_infinity` at
/// `alpha = 1/2`.
pub fn verify_stationary(cap: usize) -> f64 {
    stationary_residual(&v_infinity_half(cap), &m_infinity_half(cap), HALF)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub n: usize,
    /// `(t, F(t))` with `F = sum_{k=1}^n s_{k-1,1} s_{n-k,1} - sum_{k=0}^n r_k r_{n-k}`.
    pub values: Vec<(f64, f64)>,
    /// `max |F(t) - F(t_0)|` over the grid.
    pub max_deviation: f64,
    /// `-[z^n] N_infinity^2`, the value `F` should keep.
    pub expected: f64,
}

/// Evaluates `F(t)` on a time grid from the even/odd hierarchies at
/// `alpha = 1/2`.
pub fn verify_constancy(n: usize, t_grid: &[f64], h: f64) -> Result<ConstancyReport, MomentsError> {
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (even, odd) = alternating_ode(n, HALF, t, h)?;
        let r = |k| even.get(k).expect("index within table");
        let s = |k| odd.get(k).expect("index within table");
        let ss: f64 = (1..=n).map(|k| s(k - 1) * s(n - k)).sum();
        let rr: f64 = (0..=n).map(|k| r(k) * r(n - k)).sum();
        values.push((t, ss - rr));
    }
    let max_deviation = values
        .first()
        .map(|&(_, f0)| {
            values
                .iter()
                .map(|&(_, f)| (f - f0).abs())
                .fold(0.0, f64::max)
        })
        .unwrap_or(0.0);
    let ninf = n_infinity(n);
    let expected = -ninf.mul(&ninf).coeff(n);
    Ok(ConstancyReport {
        n,
        values,
        max_deviation,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn even_series_low_orders() {
        let n0 = jacobi_even_half_series(0.0, 10).unwrap();
        for k in 0..=10 {
            assert_abs_diff_eq!(n0.coeff(k), 0.5, epsilon = 1e-13);
        }
        let n1 = jacobi_even_half_series(1.0, 10).unwrap();
        assert_abs_diff_eq!(n1.coeff(1), 0.25 + 0.25 * (-1f64).exp(), epsilon = 1e-14);
        // Binomial series of 1 / (2 sqrt(1 - z)).
        let ninf = n_infinity(8);
        let mut c = 0.5;
        for k in 0..=8 {
            assert_abs_diff_eq!(ninf.coeff(k), c, epsilon = 1e-15);
            c *= (k as f64 + 0.5) / (k as f64 + 1.0);
        }
    }

    #[test]
    fn v_series_low_orders() {
        for &t in &[0.0f64, 0.4, 1.0, 2.0] {
            let v = v_half_series(t, 8).unwrap();
            assert_abs_diff_eq!(v.coeff(0), 0.5, epsilon = 1e-15);
            let s11 = odd_half_closed(1, t, 8).unwrap().get(1).unwrap();
            let want = (-t / 2.0).exp() * (0.375 + (1.0 - t) * (-t).exp() / 8.0);
            assert_abs_diff_eq!(s11, want, epsilon = 1e-14);
        }
        let v0 = v_half_series(0.0, 8).unwrap();
        for k in 0..=8 {
            assert_abs_diff_eq!(v0.coeff(k), 0.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn convolution_route_matches_series() {
        for &t in &[0.0, 0.25, 1.0, 2.0] {
            let a = odd_half_closed(8, t, 12).unwrap();
            let b = odd_half_convolution(8, t).unwrap();
            for n in 0..=8 {
                assert_abs_diff_eq!(a.get(n).unwrap(), b.get(n).unwrap(), epsilon = 1e-12);
            }
        }
        let c = half_c_coefficients(0.7, 3).unwrap();
        assert_abs_diff_eq!(c[0], 0.5);
        assert_abs_diff_eq!(
            c[1],
            (1.0 + (1.0 - 0.7) * (-0.7f64).exp()) / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn long_time_v_approaches_stationary() {
        let v = v_half_series(30.0, 10).unwrap();
        assert!(v.max_abs_diff(&v_infinity_half(10)) < 1e-9);
    }

    #[test]
    fn identity_residuals() {
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            assert!(verify_w_square(t, 12).unwrap() < 1e-10, "t = {t}");
            assert!(verify_oddeven(t, 12).unwrap() < 1e-10, "t = {t}");
        }
        assert!(verify_w_square(0.3, 1).unwrap() < 1e-12);
        assert!(verify_stationary(12) < 1e-12);
    }

    #[test]
    fn stationary_negative_control() {
        let mut c = v_infinity_half(12).coeffs().to_vec();
        c[2] += 0.01;
        let perturbed = TruncatedSeries1::from_coeffs(&c, 12);
        assert!(stationary_residual(&perturbed, &m_infinity_half(12), 0.5) > 1e-3);
    }

    #[test]
    fn constancy_first_order() {
        let rep = verify_constancy(1, &[0.0, 0.5, 1.0, 2.0], 1e-3).unwrap();
        assert!(rep.max_deviation < 1e-10);
        assert_abs_diff_eq!(rep.values[0].1, -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.expected, -0.25, epsilon = 1e-15);
        let single = verify_constancy(3, &[1.0], 1e-3).unwrap();
        assert_eq!(single.max_deviation, 0.0);
    }
}
