use serde::Serialize;

use super::{Method, MomentKind, MomentTable, MomentsError};
use crate::series::{TruncatedSeries1, TruncatedSeries2};
use crate::specfun::{laguerre, q_poly, ModelParams};

/// `tau[(P Y_t)^n] = alpha e^{-nt/2} Q_n(alpha t)`; `alpha` for `n = 0`.
pub fn moment_py_closed(n: usize, alpha: f64, t: f64) -> f64 {
    alpha * (-(n as f64) * t / 2.0).exp() * q_poly(n, alpha * t)
}

/// `1 / (1 + x)` as a series.
fn alternating_geometric(cap: usize) -> TruncatedSeries1 {
    TruncatedSeries1::from_fn(cap, |i| if i % 2 == 0 { 1.0 } else { -1.0 })
}

/// Two-variable expansion of
/// `g(t, y, z) = yz (e^{t(1 + a y + a z)} - 1) / ((1 + a y + a z)(1 + y)(1 + z))
///               - 1 / (a (1 + y)(1 + z))`.
pub fn g_series(
    alpha: f64,
    t: f64,
    cap_y: usize,
    cap_z: usize,
) -> Result<TruncatedSeries2, MomentsError> {
    ModelParams::new(alpha, t)?;
    let inv_yz =
        TruncatedSeries2::outer(&alternating_geometric(cap_y), &alternating_geometric(cap_z));
    let exp_minus_one = &TruncatedSeries2::exp_linear(t, alpha, cap_y, cap_z)
        - &TruncatedSeries2::one(cap_y, cap_z);
    let linear =
        TruncatedSeries2::from_terms(&[(0, 0, 1.0), (1, 0, alpha), (0, 1, alpha)], cap_y, cap_z);
    let yz = TruncatedSeries2::from_terms(&[(1, 1, 1.0)], cap_y, cap_z);
    let first = yz.mul(&exp_minus_one).mul(&linear.recip()?).mul(&inv_yz);
    Ok(&first - &inv_yz.scale(1.0 / alpha))
}

/// Taylor coefficients `c_{j,k}` of `-1/g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffGrid {
    #[serde(skip)]
    series: TruncatedSeries2,
    pub params: ModelParams,
}

impl CoeffGrid {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.series.coeff(j, k)
    }

    pub fn caps(&self) -> (usize, usize) {
        (self.series.cap_y(), self.series.cap_z())
    }

    pub fn series(&self) -> &TruncatedSeries2 {
        &self.series
    }

    /// Rows `j = 0..=J` of `c_{j,k}`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let (cy, cz) = self.caps();
        (0..=cy)
            .map(|j| (0..=cz).map(|k| self.get(j, k)).collect())
            .collect()
    }

    /// Largest `|c_{j,k} - c_{k,j}|` relative to `max(1, |c_{j,k}|)` over
    /// the square part of the grid.
    pub fn max_asymmetry(&self) -> f64 {
        let (cy, cz) = self.caps();
        let d = cy.min(cz);
        let mut worst: f64 = 0.0;
        for j in 0..=d {
            for k in 0..j {
                let (a, b) = (self.get(j, k), self.get(k, j));
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
            }
        }
        worst
    }
}

/// `c_{j,k}(t, alpha)` for `j <= cap_y`, `k <= cap_z`, by inverting `-g`.
pub fn mixed_coeff_grid(
    alpha: f64,
    t: f64,
    cap_y: usize,
    cap_z: usize,
) -> Result<CoeffGrid, MomentsError> {
    let params = ModelParams::new(alpha, t)?;
    let series = g_series(alpha, t, cap_y, cap_z)?.scale(-1.0).recip()?;
    Ok(CoeffGrid { series, params })
}

/// `[y^m] eta(x, y)^j`, with `eta^0 = 1`.
fn eta_power_coeff(j: usize, m: usize, x: f64) -> f64 {
    match (j, m) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ if m < j => 0.0,
        _ => j as f64 * laguerre(m - j, j, m as f64 * x) / m as f64,
    }
}

impl CoeffGrid {
    /// `R_{m,n} = sum_{j,k} c_{j,k} [y^m] eta(alpha t, y)^j [z^n] eta(alpha t, z)^k`.
    ///
    /// For `m, n >= 1` only `j, k >= 1` contribute and this is the Laguerre
    /// double sum `(1/mn) sum jk c_{j,k} L_{m-j}^{(j)}(m alpha t) L_{n-k}^{(k)}(n alpha t)`.
    pub fn mixed_moment(&self, m: usize, n: usize) -> Result<f64, MomentsError> {
        let (cy, cz) = self.caps();
        if m > cy || n > cz {
            return Err(MomentsError::GridTooSmall {
                m,
                n,
                have: (cy, cz),
            });
        }
        let x = self.params.alpha * self.params.t;
        let ey: Vec<f64> = (0..=m).map(|j| eta_power_coeff(j, m, x)).collect();
        let ez: Vec<f64> = (0..=n).map(|k| eta_power_coeff(k, n, x)).collect();
        let mut sum = 0.0;
        for (j, &a) in ey.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (k, &b) in ez.iter().enumerate() {
                sum += self.get(j, k) * a * b;
            }
        }
        Ok(sum)
    }
}

/// `R_{m,n}(t)` from the coefficient grid of `-1/g`.
pub fn mixed_moment_closed(m: usize, n: usize, alpha: f64, t: f64) -> Result<f64, MomentsError> {
    mixed_coeff_grid(alpha, t, m, n)?.mixed_moment(m, n)
}

/// All `R_{m,n}`, `m <= mmax`, `n <= nmax`, from a single grid.
pub fn mixed_closed_table(
    mmax: usize,
    nmax: usize,
    alpha: f64,
    t: f64,
) -> Result<MomentTable, MomentsError> {
    let grid = mixed_coeff_grid(alpha, t, mmax, nmax)?;
    let mut table = MomentTable::new(MomentKind::Mixed, grid.params, Method::Closed);
    for m in 0..=mmax {
        for n in 0..=nmax {
            table.insert2(m, n, grid.mixed_moment(m, n)?);
        }
    }
    Ok(table)
}
