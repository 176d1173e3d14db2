//! Degree-capped formal power series over `f64`, in one and two variables.
//!
//! Every operation truncates eagerly: a series with cap `D` stores exactly
//! the coefficients of `z^0 ..= z^D`, and binary operations produce a result
//! whose cap is the minimum of the operand caps. Nothing here ever grows the
//! degree.

mod bivariate;
mod univariate;

pub use bivariate::TruncatedSeries2;
pub use univariate::TruncatedSeries1;

use thiserror::Error;

/// Default cap for one-variable series.
pub const DEFAULT_DEGREE: usize = 16;

/// Default cap (in each variable) for two-variable series.
pub const DEFAULT_DEGREE_2D: usize = 12;

/// Constant terms with magnitude below this are treated as zero.
pub const CONSTANT_TERM_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SeriesError {
    #[error("series has a vanishing constant term ({0:e}) and cannot be inverted")]
    ZeroConstantTerm(f64),
    #[error("square root needs a positive constant term, got {0:e}")]
    NonPositiveConstantTerm(f64),
    #[error("inner series of a composition must vanish at zero, constant term is {0:e}")]
    NonZeroInnerConstant(f64),
    #[error("cannot divide by z: constant term {0:e} does not vanish")]
    NotDivisibleByZ(f64),
}

pub fn s1_mul(a: &TruncatedSeries1, b: &TruncatedSeries1) -> TruncatedSeries1 {
    a.mul(b)
}

pub fn s1_div(a: &TruncatedSeries1, b: &TruncatedSeries1) -> Result<TruncatedSeries1, SeriesError> {
    a.div(b)
}

pub fn s1_sqrt(a: &TruncatedSeries1) -> Result<TruncatedSeries1, SeriesError> {
    a.sqrt()
}

pub fn s1_compose(
    outer: &TruncatedSeries1,
    inner: &TruncatedSeries1,
) -> Result<TruncatedSeries1, SeriesError> {
    outer.compose(inner)
}

pub fn s2_mul(a: &TruncatedSeries2, b: &TruncatedSeries2) -> TruncatedSeries2 {
    a.mul(b)
}

pub fn s2_recip(a: &TruncatedSeries2) -> Result<TruncatedSeries2, SeriesError> {
    a.recip()
}

/// `exp(t (1 + alpha y + alpha z))`, built coefficient by coefficient.
pub fn s2_exp_linear(t: f64, alpha: f64, cap_y: usize, cap_z: usize) -> TruncatedSeries2 {
    TruncatedSeries2::exp_linear(t, alpha, cap_y, cap_z)
}
