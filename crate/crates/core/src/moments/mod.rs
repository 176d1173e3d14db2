//! Moment engines and generating-function identity checks.
//!
//! Four families of moments are computed here, always with `P` a free
//! projection of trace `alpha` and `Y_t` the free unitary Brownian motion:
//!
//! * `tau[(P Y_t)^n]`,
//! * the mixed moments `R_{m,n}(t) = e^{t(m+n)/2} tau[(P Y_t)^m (P Y_t^*)^n]`,
//! * the even alternating moments `r_n(t) = tau[(P Y_t P Y_t^*)^n]`,
//! * the odd alternating moments `s_{n,1}(t) = tau[(P Y_t P Y_t^*)^n P Y_t]`.

mod closed;
mod discrepancy;
mod half;
mod ode;

pub use closed::{
    g_series, mixed_closed_table, mixed_coeff_grid, mixed_moment_closed, moment_py_closed,
    CoeffGrid,
};
pub use discrepancy::{
    corollary_discrepancy, m_infinity_discrepancy, printed_corollary_c, printed_corollary_s,
    printed_m_infinity, remark_discrepancy, remark_inverse_expansion, Discrepancy, CONSISTENCY_TOL,
};
pub use half::{
    half_c_coefficients, jacobi_even_half_series, m_infinity_half, odd_half_closed,
    odd_half_convolution, stationary_residual, v_half_series, v_infinity_half, verify_constancy,
    verify_oddeven, verify_stationary, verify_w_square, ConstancyReport,
};
pub use ode::{alternating_ode, jacobi_even_ode, mixed_ode_table, odd_ode, rk4, stationary_limits};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::noncrossing::NcError;
use crate::series::SeriesError;
use crate::specfun::{ModelParams, ParamError};

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentsError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("integration produced a non-finite value at t = {0}; reduce the step")]
    StepTooLarge(f64),
    #[error("coefficient grid {have:?} too small for R_{{{m},{n}}}")]
    GridTooSmall {
        m: usize,
        n: usize,
        have: (usize, usize),
    },
    #[error("bracket is not divisible by z: constant term {0:e}")]
    BracketNotDivisible(f64),
    #[error("series degree {have} below the required {need}")]
    DegreeTooSmall { need: usize, have: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    /// `tau[(P Y)^n]`
    Py,
    /// `R_{m,n}`
    Mixed,
    /// `r_n`
    EvenAlt,
    /// `s_{n,1}`
    OddAlt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Cumulant,
    Combinatorial,
    Ode,
    HalfSeries,
    Convolution,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Cumulant => "cumulant",
            Method::Combinatorial => "combinatorial",
            Method::Ode => "ode",
            Method::HalfSeries => "half_series",
            Method::Convolution => "convolution",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of a table entry: `n` for one-index families, `(m, n)` for mixed
/// moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum MomentIndex {
    Single(usize),
    Pair(usize, usize),
}

impl std::fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentIndex::Single(n) => write!(f, "{n}"),
            MomentIndex::Pair(m, n) => write!(f, "{m},{n}"),
        }
    }
}

/// Moment values of one family, tagged with how they were computed.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub kind: MomentKind,
    pub params: ModelParams,
    pub method: Method,
    pub values: BTreeMap<MomentIndex, f64>,
}

impl MomentTable {
    pub fn new(kind: MomentKind, params: ModelParams, method: Method) -> Self {
        Self {
            kind,
            params,
            method,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(&MomentIndex::Single(n)).copied()
    }

    pub fn get2(&self, m: usize, n: usize) -> Option<f64> {
        self.values.get(&MomentIndex::Pair(m, n)).copied()
    }

    pub fn insert(&mut self, n: usize, v: f64) {
        self.values.insert(MomentIndex::Single(n), v);
    }

    pub fn insert2(&mut self, m: usize, n: usize, v: f64) {
        self.values.insert(MomentIndex::Pair(m, n), v);
    }

    /// Largest `|v(m,n) - v(n,m)|` relative to `max(1, |v|)`; zero for
    /// one-index tables.
    pub fn max_asymmetry(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|(idx, &v)| match *idx {
                MomentIndex::Pair(m, n) => {
                    self.get2(n, m).map(|w| (v - w).abs() / v.abs().max(1.0))
                }
                MomentIndex::Single(_) => None,
            })
            .fold(0.0, f64::max)
    }
}

/// Relative difference `|a - b| / max(1, |a|, |b|)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
