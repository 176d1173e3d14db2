//! Random-matrix Monte Carlo: Brownian motion on `U(N)` and Haar unitaries,
//! compressed by the diagonal projection `P = diag(1^r, 0^{N-r})`.
//!
//! Words are over the letters `A = P Y` and `A* = P Y^*`. Since every letter
//! starts with `P`, `tr_N(A_1 ... A_k)` only needs the top-left `r x r`
//! block `B` of `Y` (and `B^*` for `A*`).

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::{EvdError, SvdError};
use faer::{c64, Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::specfun::laguerre;

/// Bound on `max |Y^* Y - I|` along a path.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Step count used when none is given.
pub const DEFAULT_STEPS: usize = 10;

/// Paths are checked for drift from unitarity every this many steps.
const UNITARITY_CHECK_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("variance must be positive and finite, got {0}")]
    Variance(f64),
    #[error("empty word")]
    EmptyWord,
    #[error("cannot parse word {0:?}: use letters A and A*")]
    Parse(String),
    #[error("path left the unitary group: max |Y*Y - I| = {0:e}")]
    NonUnitaryDrift(f64),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl From<EvdError> for SimError {
    fn from(e: EvdError) -> Self {
        SimError::Linalg(format!("{e:?}"))
    }
}

impl From<SvdError> for SimError {
    fn from(e: SvdError) -> Self {
        SimError::Linalg(format!("{e:?}"))
    }
}

/// Entry variance of the GUE increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Increment {
    /// `h / N`, so that `E tr_N H^2 = h`. Weak error `O(h)`: for instance
    /// `E tr_N Y_t ~ e^{-t/2} (1 - t h / 24)` at large `N`.
    Plain,
    /// `v / N` with `v` solving `E tr_N exp(i H) = e^{-h/2}`, so that
    /// `E Y_t = e^{-t/2} I` holds exactly for any step count. `v = h -
    /// h^2/12 + ...`.
    #[default]
    MeanMatched,
}

/// `E tr_N exp(i H)` for a GUE matrix with entry variance `v / N`.
pub fn expected_trace_expi(dim: usize, v: f64) -> f64 {
    let s2 = v / dim as f64;
    (-s2 / 2.0).exp() * laguerre(dim - 1, 1, s2) / dim as f64
}

/// `v` with `expected_trace_expi(dim, v) = e^{-h/2}`, by bisection.
pub fn mean_matched_variance(dim: usize, h: f64) -> f64 {
    let target = (-h / 2.0).exp();
    let (mut lo, mut hi) = (0.0, h.max(1e-300));
    while expected_trace_expi(dim, hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if expected_trace_expi(dim, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Monte Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dim: usize,
    pub t: f64,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub alpha: f64,
    pub increment: Increment,
}

impl SimConfig {
    pub fn new(
        dim: usize,
        t: f64,
        steps: usize,
        samples: usize,
        seed: u64,
        alpha: f64,
    ) -> Result<Self, SimError> {
        let cfg = Self {
            dim,
            t,
            steps,
            samples,
            seed,
            alpha,
            increment: Increment::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if self.dim < 2 {
            return bad(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if self.samples < 1 {
            return bad("samples must be at least 1".into());
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t must be finite and non-negative, got {}", self.t));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if self.rank() < 1 {
            return bad(format!(
                "rank floor(alpha * dim) = 0 for alpha = {}, dim = {}",
                self.alpha, self.dim
            ));
        }
        Ok(())
    }

    /// `floor(alpha * dim)`.
    pub fn rank(&self) -> usize {
        (self.alpha * self.dim as f64).floor() as usize
    }

    /// Time step `t / steps`.
    pub fn step(&self) -> f64 {
        self.t / self.steps as f64
    }

    pub fn with_increment(self, increment: Increment) -> Self {
        Self { increment, ..self }
    }

    /// Entry variance of each GUE increment.
    pub fn increment_variance(&self) -> f64 {
        let h = self.step();
        let v = match self.increment {
            Increment::Plain => h,
            Increment::MeanMatched => mean_matched_variance(self.dim, h),
        };
        v / self.dim as f64
    }

    /// Generator for sample `index`: the seed picks the key, the index picks
    /// the stream.
    pub fn sample_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SimLetter {
    /// `P Y`
    A,
    /// `P Y^*`
    AStar,
}

/// A nonempty word in `A = P Y` and `A* = P Y^*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimWord(Vec<SimLetter>);

impl SimWord {
    pub fn new(letters: Vec<SimLetter>) -> Result<Self, SimError> {
        if letters.is_empty() {
            return Err(SimError::EmptyWord);
        }
        Ok(Self(letters))
    }

    /// `A^n`.
    pub fn power(n: usize) -> Result<Self, SimError> {
        Self::new(vec![SimLetter::A; n])
    }

    /// `(A A*)^n`, followed by `A` when `odd`.
    pub fn alternating(n: usize, odd: bool) -> Result<Self, SimError> {
        let mut w: Vec<_> = (0..n)
            .flat_map(|_| [SimLetter::A, SimLetter::AStar])
            .collect();
        if odd {
            w.push(SimLetter::A);
        }
        Self::new(w)
    }

    pub fn letters(&self) -> &[SimLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SimWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                SimLetter::A => "A",
                SimLetter::AStar => "A*",
            })?;
        }
        Ok(())
    }
}

/// Accepts `AA*A`, `A A* A`, `A,Astar,A` and similar spellings.
impl FromStr for SimWord {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        let mut letters = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            rest = rest.trim_start_matches([' ', ',']);
            if rest.is_empty() {
                break;
            }
            let Some(r) = rest.strip_prefix('A') else {
                return Err(SimError::Parse(s.to_string()));
            };
            if let Some(r) = r.strip_prefix('*') {
                letters.push(SimLetter::AStar);
                rest = r;
            } else if let Some(r) = r.strip_prefix("star") {
                letters.push(SimLetter::AStar);
                rest = r;
            } else {
                letters.push(SimLetter::A);
                rest = r;
            }
        }
        Self::new(letters)
    }
}

impl Serialize for SimWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Mean and standard error of `Re tr_N` of a word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`; zero for one sample.
    pub stderr: f64,
    pub samples: usize,
    pub word: SimWord,
}

impl SimEstimate {
    fn from_values(word: SimWord, values: &[f64]) -> Self {
        let n = values.len();
        let mean = compensated_sum(values.iter().copied()) / n as f64;
        let stderr = if n > 1 {
            let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            samples: n,
            word,
        }
    }

    /// Whether `target` lies within `k` standard errors plus `slack`.
    pub fn brackets(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + slack
    }
}

/// Neumaier summation.
fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in it {
        let s = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - s) + x
        } else {
            (x - s) + sum
        };
        sum = s;
    }
    sum + comp
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> c64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(s * re, s * im)
}

/// GUE matrix: off-diagonal entries complex Gaussian with `E|h_ij|^2 =
/// variance`, diagonal entries real with variance `variance`.
pub fn sample_gue<R: Rng + ?Sized>(
    dim: usize,
    variance: f64,
    rng: &mut R,
) -> Result<Mat<c64>, SimError> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(SimError::Variance(variance));
    }
    let sd = variance.sqrt();
    let mut h = Mat::<c64>::zeros(dim, dim);
    for j in 0..dim {
        let d: f64 = rng.sample(StandardNormal);
        h[(j, j)] = c64::new(sd * d, 0.0);
        for i in (j + 1)..dim {
            let z = complex_gaussian(rng, variance);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    Ok(h)
}

/// `exp(i H)` for Hermitian `H`, through its eigendecomposition.
pub fn expi_hermitian(h: MatRef<'_, c64>) -> Result<Mat<c64>, SimError> {
    let evd = h.self_adjoint_eigen(Side::Lower)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| {
        let lam = s[j].re;
        u[(i, j)] * c64::new(lam.cos(), lam.sin())
    });
    Ok(&scaled * u.adjoint())
}

/// `max |Y^* Y - I|` over entries.
pub fn unitarity_defect(y: MatRef<'_, c64>) -> f64 {
    let g = y.adjoint() * y;
    let mut worst: f64 = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Nearest unitary `U V^*` from the SVD `Y = U S V^*`.
pub fn polar_unitary(y: MatRef<'_, c64>) -> Result<Mat<c64>, SimError> {
    let svd = y.svd()?;
    Ok(svd.U() * svd.V().adjoint())
}

fn guard_unitary(y: Mat<c64>) -> Result<Mat<c64>, SimError> {
    if unitarity_defect(y.as_ref()) <= UNITARITY_TOL {
        return Ok(y);
    }
    let fixed = polar_unitary(y.as_ref())?;
    let defect = unitarity_defect(fixed.as_ref());
    if defect > UNITARITY_TOL {
        return Err(SimError::NonUnitaryDrift(defect));
    }
    Ok(fixed)
}

/// `Y_t = exp(i H_1) ... exp(i H_steps)` with independent GUE increments of
/// entry variance `cfg.increment_variance()`, i.e. `(t / steps) / dim` for
/// the plain scheme.
pub fn unitary_bm_path<R: Rng + ?Sized>(
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Mat<c64>, SimError> {
    cfg.validate()?;
    let n = cfg.dim;
    let mut y = Mat::<c64>::identity(n, n);
    if cfg.t == 0.0 {
        return Ok(y);
    }
    let variance = cfg.increment_variance();
    for k in 1..=cfg.steps {
        let h = sample_gue(n, variance, rng)?;
        let e = expi_hermitian(h.as_ref())?;
        y = &y * &e;
        if k % UNITARITY_CHECK_EVERY == 0 || k == cfg.steps {
            y = guard_unitary(y)?;
        }
    }
    Ok(y)
}

/// Haar unitary from the QR factorization of a complex Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Mat<c64>, SimError> {
    if dim < 2 {
        return Err(SimError::Config(format!(
            "dim must be at least 2, got {dim}"
        )));
    }
    let mut g = Mat::<c64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            g[(i, j)] = complex_gaussian(rng, 1.0);
        }
    }
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<c64> = (0..dim)
        .map(|j| {
            let d = r[(j, j)];
            let a = d.norm();
            if a > 0.0 {
                d / a
            } else {
                c64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok(Mat::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]))
}

/// `Re tr_N` of the word, with `A = P Y` and `A* = P Y^*`, `P` of rank `rank`.
pub fn word_trace(y: MatRef<'_, c64>, rank: usize, word: &SimWord) -> f64 {
    let n = y.nrows();
    let b = y.submatrix(0, 0, rank, rank);
    let letter = |l: SimLetter| match l {
        SimLetter::A => b.to_owned(),
        SimLetter::AStar => b.adjoint().to_owned(),
    };
    let mut letters = word.letters().iter().copied();
    let mut prod = letter(letters.next().expect("words are nonempty"));
    for l in letters {
        prod = match l {
            SimLetter::A => &prod * b,
            SimLetter::AStar => &prod * b.adjoint(),
        };
    }
    let tr: f64 = (0..rank).map(|i| prod[(i, i)].re).sum();
    tr / n as f64
}

fn estimate_with<F>(
    cfg: &SimConfig,
    words: &[SimWord],
    draw: F,
) -> Result<Vec<SimEstimate>, SimError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Mat<c64>, SimError> + Sync,
{
    cfg.validate()?;
    if words.is_empty() {
        return Ok(Vec::new());
    }
    let rank = cfg.rank();
    let per_sample: Vec<Vec<f64>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = cfg.sample_rng(s);
            let y = draw(&mut rng)?;
            Ok(words
                .iter()
                .map(|w| word_trace(y.as_ref(), rank, w))
                .collect())
        })
        .collect::<Result<_, SimError>>()?;
    Ok(words
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let values: Vec<f64> = per_sample.iter().map(|v| v[k]).collect();
            SimEstimate::from_values(w.clone(), &values)
        })
        .collect())
}

/// Estimates several words from the same Brownian paths.
pub fn estimate_words(cfg: &SimConfig, words: &[SimWord]) -> Result<Vec<SimEstimate>, SimError> {
    estimate_with(cfg, words, |rng| unitary_bm_path(cfg, rng))
}

/// Monte Carlo estimate of `E tr_N` of the word at time `cfg.t`.
pub fn estimate_word_moment(cfg: &SimConfig, word: &SimWord) -> Result<SimEstimate, SimError> {
    Ok(estimate_words(cfg, std::slice::from_ref(word))?.remove(0))
}

/// As [`estimate_words`], with `Y` replaced by a Haar unitary; `cfg.t` and
/// `cfg.steps` are ignored.
pub fn estimate_haar_words(
    cfg: &SimConfig,
    words: &[SimWord],
) -> Result<Vec<SimEstimate>, SimError> {
    estimate_with(cfg, words, |rng| haar_unitary(cfg.dim, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(m: &Mat<c64>) -> c64 {
        (0..m.nrows()).map(|i| m[(i, i)]).sum::<c64>() / m.nrows() as f64
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(8, 1.0, 10, 5, 1, 0.5).is_ok());
        assert!(SimConfig::new(1, 1.0, 10, 5, 1, 0.5).is_err());
        assert!(SimConfig::new(8, 1.0, 0, 5, 1, 0.5).is_err());
        assert!(SimConfig::new(8, 1.0, 10, 0, 1, 0.5).is_err());
        assert!(SimConfig::new(8, -1.0, 10, 5, 1, 0.5).is_err());
        assert!(SimConfig::new(8, 1.0, 10, 5, 1, 0.1).is_err());
        assert_eq!(SimConfig::new(10, 1.0, 1, 1, 0, 0.25).unwrap().rank(), 2);
    }

    #[test]
    fn word_parsing() {
        let w: SimWord = "AA*A".parse().unwrap();
        assert_eq!(w.letters(), &[SimLetter::A, SimLetter::AStar, SimLetter::A]);
        assert_eq!(w.to_string(), "AA*A");
        assert_eq!("A, Astar".parse::<SimWord>().unwrap().to_string(), "AA*");
        assert_eq!("".parse::<SimWord>(), Err(SimError::EmptyWord));
        assert!("AB".parse::<SimWord>().is_err());
        assert_eq!(
            SimWord::alternating(2, true).unwrap().to_string(),
            "AA*AA*A"
        );
    }

    #[test]
    fn increment_variance() {
        // N = 1: E e^{iH} = e^{-v/2}.
        assert!((expected_trace_expi(1, 0.7) - (-0.35f64).exp()).abs() < 1e-15);
        // Large N: J_1(2 sqrt v) / sqrt v = 1 - v/2 + v^2/12 - v^3/144 + ...
        let v: f64 = 0.1;
        let limit = 1.0 - v / 2.0 + v * v / 12.0 - v.powi(3) / 144.0 + v.powi(4) / 2880.0;
        assert!((expected_trace_expi(4000, v) - limit).abs() < 1e-6);
        // Roots computed independently in arbitrary precision.
        for &(n, h, root) in &[
            (2usize, 0.5f64, 0.484055422524254),
            (8, 0.1, 0.0991794864276996),
            (256, 0.2, 0.196666906026672),
            (256, 3.0, 2.26351085353166),
        ] {
            assert!((mean_matched_variance(n, h) - root).abs() < 1e-10 * root);
        }
        let h = 0.05;
        assert!((mean_matched_variance(100_000, h) - (h - h * h / 12.0)).abs() < 1e-5);
        let cfg = SimConfig::new(10, 1.0, 4, 1, 0, 0.5).unwrap();
        assert_eq!(
            cfg.with_increment(Increment::Plain).increment_variance(),
            0.025
        );
    }

    #[test]
    fn gue_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample_gue(12, 0.3, &mut rng).unwrap();
        for i in 0..12 {
            assert_eq!(h[(i, i)].im, 0.0);
            for j in 0..12 {
                assert_eq!(h[(i, j)], h[(j, i)].conj());
            }
        }
        assert!(sample_gue(4, 0.0, &mut rng).is_err());
    }

    #[test]
    fn expi_is_unitary_and_exact_on_diagonal() {
        let mut h = Mat::<c64>::zeros(3, 3);
        h[(0, 0)] = c64::new(0.5, 0.0);
        h[(1, 1)] = c64::new(-1.0, 0.0);
        h[(2, 2)] = c64::new(2.0, 0.0);
        let e = expi_hermitian(h.as_ref()).unwrap();
        for (i, lam) in [0.5f64, -1.0, 2.0].into_iter().enumerate() {
            assert!((e[(i, i)] - c64::new(lam.cos(), lam.sin())).norm() < 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = sample_gue(16, 1.0, &mut rng).unwrap();
        assert!(unitarity_defect(expi_hermitian(g.as_ref()).unwrap().as_ref()) < 1e-12);
    }

    #[test]
    fn polar_restores_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(8, &mut rng).unwrap();
        let perturbed = Mat::from_fn(8, 8, |i, j| {
            u[(i, j)] + c64::new(1e-6 * ((i * 8 + j) as f64).sin(), 0.0)
        });
        assert!(unitarity_defect(perturbed.as_ref()) > UNITARITY_TOL);
        let fixed = guard_unitary(perturbed).unwrap();
        assert!(unitarity_defect(fixed.as_ref()) < 1e-12);
    }

    #[test]
    fn time_zero_path_is_identity() {
        let cfg = SimConfig::new(6, 0.0, 7, 1, 1, 0.5).unwrap();
        let y = unitary_bm_path(&cfg, &mut cfg.sample_rng(0)).unwrap();
        assert_eq!(y, Mat::<c64>::identity(6, 6));
        let est = estimate_word_moment(&cfg, &SimWord::power(3).unwrap()).unwrap();
        assert_eq!(est.mean, 0.5);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn word_trace_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let y = haar_unitary(7, &mut rng).unwrap();
        let p = Mat::from_fn(7, 7, |i, j| {
            if i == j && i < 3 {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let a = &p * &y;
        let astar = &p * y.adjoint();
        let full = &(&(&a * &astar) * &a) * &a;
        let w: SimWord = "AA*AA".parse().unwrap();
        assert!((word_trace(y.as_ref(), 3, &w) - trace(&full).re).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_is_exact_on_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v.iter().copied()), 2.0);
    }

    #[test]
    fn estimates_are_reproducible() {
        let cfg = SimConfig::new(8, 0.5, 4, 6, 42, 0.5).unwrap();
        let words = [SimWord::power(2).unwrap(), "AA*".parse().unwrap()];
        let a = estimate_words(&cfg, &words).unwrap();
        let b = estimate_words(&cfg, &words).unwrap();
        assert_eq!(a, b);
        let c = estimate_words(&SimConfig { seed: 43, ..cfg }, &words).unwrap();
        assert_ne!(a[0].mean, c[0].mean);
    }
}
