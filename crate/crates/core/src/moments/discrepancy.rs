//! Alternative printed forms that disagree with values derived elsewhere in
//! this crate. Each is implemented literally and compared against the
//! derived value, so the disagreement is reported rather than assumed.

use serde::Serialize;

use super::half::convolve_c;
use super::{half_c_coefficients, mixed_coeff_grid, stationary_limits, MomentsError};
use crate::series::{TruncatedSeries1, TruncatedSeries2};
use crate::specfun::{binomial, laguerre, ModelParams};

/// Relative agreement threshold for calling a printed form consistent.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Outcome of comparing a printed form with a derived value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub check: String,
    pub printed: f64,
    pub derived: f64,
    /// Largest relative difference over every compared quantity.
    pub difference: f64,
    pub consistent: bool,
}

impl Discrepancy {
    fn new(check: impl Into<String>, printed: f64, derived: f64, difference: f64) -> Self {
        Self {
            check: check.into(),
            printed,
            derived,
            difference,
            consistent: difference <= CONSISTENCY_TOL,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.consistent {
            "CONSISTENT"
        } else {
            "INCONSISTENT"
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// The triple-sum expansion of `-1/g` with leading factor
/// `1 + a y + a z + a y z`:
///
/// `N sum_q sum_{l,j <= q} (-1)^{q-j} e^{jt} a^l C(q,j) C(q,l)
///   (yz)^{q+l} [(1+y)(1+z)]^{-q} e^{j t a (y+z)} (1 + a y + a z)^{-l}`.
pub fn remark_inverse_expansion(
    alpha: f64,
    t: f64,
    cap_y: usize,
    cap_z: usize,
) -> Result<TruncatedSeries2, MomentsError> {
    ModelParams::new(alpha, t)?;
    let (cy, cz) = (cap_y, cap_z);
    let d = cy.min(cz);
    let alt = |cap| TruncatedSeries1::from_fn(cap, |i| if i % 2 == 0 { 1.0 } else { -1.0 });
    let inv_yz = TruncatedSeries2::outer(&alt(cy), &alt(cz));
    let inv_lin =
        TruncatedSeries2::from_terms(&[(0, 0, 1.0), (1, 0, alpha), (0, 1, alpha)], cy, cz)
            .recip()?;
    let exp_pair = |c: f64| {
        let e = |cap| {
            let mut term = 1.0;
            TruncatedSeries1::from_fn(cap, |i| {
                if i > 0 {
                    term *= c / i as f64;
                }
                term
            })
        };
        TruncatedSeries2::outer(&e(cy), &e(cz))
    };
    let mut sum = TruncatedSeries2::zeros(cy, cz);
    for q in 0..=d {
        let inv_yz_q = inv_yz.powi(q);
        for l in 0..=(d - q) {
            let shift = TruncatedSeries2::from_terms(&[(q + l, q + l, 1.0)], cy, cz);
            let base = shift.mul(&inv_yz_q).mul(&inv_lin.powi(l));
            for j in 0..=q {
                let sign = if (q - j) % 2 == 0 { 1.0 } else { -1.0 };
                let coef = sign
                    * (j as f64 * t).exp()
                    * alpha.powi(l as i32)
                    * binomial(q, j)
                    * binomial(q, l);
                let term = base.mul(&exp_pair(j as f64 * t * alpha)).scale(coef);
                sum = &sum + &term;
            }
        }
    }
    let numerator = TruncatedSeries2::from_terms(
        &[(0, 0, 1.0), (1, 0, alpha), (0, 1, alpha), (1, 1, alpha)],
        cy,
        cz,
    );
    Ok(numerator.mul(&sum))
}

/// Compares the triple-sum expansion with direct inversion of `-g` on a
/// `cap x cap` grid; `printed`/`derived` report `c_{1,1}`.
pub fn remark_discrepancy(alpha: f64, t: f64, cap: usize) -> Result<Discrepancy, MomentsError> {
    let printed = remark_inverse_expansion(alpha, t, cap, cap)?;
    let derived = mixed_coeff_grid(alpha, t, cap, cap)?;
    let mut worst: f64 = 0.0;
    for j in 0..=cap {
        for k in 0..=cap {
            worst = worst.max(rel(printed.coeff(j, k), derived.get(j, k)));
        }
    }
    Ok(Discrepancy::new(
        "inverse_g_expansion",
        printed.coeff(1, 1),
        derived.get(1, 1),
        worst,
    ))
}

/// The listed coefficients `c_0, ..., c_jmax` of the `alpha = 1/2`
/// convolution formula, taken verbatim (they are built from the factor
/// `e^{-2t eta}`).
pub fn printed_corollary_c(t: f64, jmax: usize) -> Vec<f64> {
    let e = |k: usize| (-(k as f64) * t).exp();
    let l1 = |n: usize, x: f64| laguerre(n, 1, x);
    (0..=jmax)
        .map(|j| match j {
            0 => 0.5,
            1 => (1.0 + (1.0 - 2.0 * t) * e(1)) / 2.0,
            2 => ((1.0 - 2.0 * t) * e(1) - 2.0 * t * e(2)) / 2.0,
            _ => {
                let first: f64 = (1..j)
                    .map(|k| {
                        l1(k - 1, 2.0 * k as f64 * t) * l1(j - k - 1, 2.0 * (j - k + 1) as f64 * t)
                            / (k * (j - k)) as f64
                    })
                    .sum();
                let second: f64 = (1..j - 1)
                    .map(|k| {
                        l1(k - 1, 2.0 * k as f64 * t) * l1(j - k - 2, 2.0 * (j - k) as f64 * t)
                            / (k * (j - k - 1)) as f64
                    })
                    .sum();
                -t * e(j) * first - t * e(j - 1) * second
            }
        })
        .collect()
}

/// `s_{n,1}(t)` at `alpha = 1/2` from the listed coefficients.
pub fn printed_corollary_s(n: usize, t: f64) -> f64 {
    convolve_c(&printed_corollary_c(t, n), n, t)
}

/// Compares the listed `c_1(t)` and the resulting `s_{1,1}` with the direct
/// formula `s_{1,1} = e^{-t/2} a [a(2-a) + (1-a)(1-a-at) e^{-t}]` at
/// `a = 1/2`.
pub fn corollary_discrepancy(t: f64) -> Result<Discrepancy, MomentsError> {
    ModelParams::new(0.5, t)?;
    let a = 0.5;
    let direct =
        (-t / 2.0).exp() * a * (a * (2.0 - a) + (1.0 - a) * (1.0 - a - a * t) * (-t).exp());
    let printed = printed_corollary_s(1, t);
    let c_printed = printed_corollary_c(t, 1)[1];
    let c_derived = half_c_coefficients(t, 1)?[1];
    let worst = rel(printed, direct).max(rel(c_printed, c_derived));
    Ok(Discrepancy::new("corollary_s11", printed, direct, worst))
}

/// `(2a - 1 + sqrt(1 - 4a(1-a) z)) / sqrt(1 - z) - a`.
pub fn printed_m_infinity(alpha: f64, cap: usize) -> TruncatedSeries1 {
    let inner = TruncatedSeries1::from_coeffs(&[1.0, -4.0 * alpha * (1.0 - alpha)], cap)
        .sqrt()
        .expect("constant term is 1");
    let num = &TruncatedSeries1::constant(2.0 * alpha - 1.0, cap) + &inner;
    let den = TruncatedSeries1::from_coeffs(&[1.0, -1.0], cap)
        .sqrt()
        .expect("constant term is 1");
    &num.div(&den).expect("constant term is 1") - &TruncatedSeries1::constant(alpha, cap)
}

/// Sanity checks on the printed general-`alpha` stationary generating
/// function: `M(0) = 0`, `[z] M = r_1(infinity) = alpha^2`, and agreement
/// with the long-time limits of the even hierarchy up to `nmax`.
pub fn m_infinity_discrepancy(alpha: f64, nmax: usize) -> Result<Vec<Discrepancy>, MomentsError> {
    ModelParams::new(alpha, 0.0)?;
    let m = printed_m_infinity(alpha, nmax.max(1));
    let limits = stationary_limits(nmax.max(1), alpha)?;
    let worst = (1..=nmax.max(1))
        .map(|n| rel(m.coeff(n), limits.get(n).expect("index within table")))
        .fold(0.0, f64::max);
    Ok(vec![
        Discrepancy::new("m_infinity_at_zero", m.coeff(0), 0.0, m.coeff(0).abs()),
        Discrepancy::new(
            "m_infinity_first_coefficient",
            m.coeff(1),
            alpha * alpha,
            rel(m.coeff(1), alpha * alpha),
        ),
        Discrepancy::new(
            "m_infinity_vs_long_time_limits",
            m.coeff(nmax.max(1)),
            limits.get(nmax.max(1)).expect("index within table"),
            worst,
        ),
    ])
}
