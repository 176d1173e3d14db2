use super::{enumerate_nc, NcError, NcPartition, MAX_GROUND_SET};
use crate::series::TruncatedSeries1;
use crate::specfun::{binomial, cumulant_y, fubm_moment, laguerre, q_poly, v_poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Y,
    YStar,
}

impl Letter {
    pub fn exponent(self) -> i64 {
        match self {
            Letter::Y => 1,
            Letter::YStar => -1,
        }
    }
}

/// A word in `Y` and `Y*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LetterWord {
    pub letters: Vec<Letter>,
}

impl LetterWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// `Y, Y*, Y, Y*, ...` of the given length.
    pub fn alternating(len: usize) -> Self {
        let letters = (0..len)
            .map(|i| if i % 2 == 0 { Letter::Y } else { Letter::YStar })
            .collect();
        Self { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// `tau_kappa[word]`: the product over blocks of `tau(Y_t^e)`, where `e` is
/// the net exponent of the block's letters.
pub fn trace_functional(kappa: &NcPartition, word: &LetterWord, t: f64) -> Result<f64, NcError> {
    if word.len() != kappa.n() {
        return Err(NcError::LengthMismatch {
            word: word.len(),
            n: kappa.n(),
        });
    }
    Ok(kappa
        .blocks()
        .iter()
        .map(|b| {
            let e: i64 = b.iter().map(|&i| word.letters[i - 1].exponent()).sum();
            fubm_moment(e, t)
        })
        .product())
}

fn block_weight(size: usize) -> f64 {
    // |V|^{|V|-1} / |V|!
    let s = size as f64;
    (1..size).fold(1.0, |acc, i| acc * s / (i + 1) as f64)
}

/// Sum over partitions in `NC(n)` with exactly `n - r` blocks of
/// `prod |V|^{|V|-1} / |V|!`, by enumeration.
pub fn weight_sum(n: usize, r: usize) -> Result<f64, NcError> {
    if n == 0 || n > MAX_GROUND_SET {
        return Err(NcError::Range(format!(
            "n = {n} outside 1..={MAX_GROUND_SET}"
        )));
    }
    if r >= n {
        return Err(NcError::Range(format!("r = {r} outside 0..={}", n - 1)));
    }
    Ok(enumerate_nc(n)?
        .filter(|p| p.len() == n - r)
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| block_weight(b.len()))
                .product::<f64>()
        })
        .sum())
}

/// `n^{r-1} / r! * binom(n, r + 1)`.
pub fn weight_sum_closed(n: usize, r: usize) -> f64 {
    let mut v = (n as f64).powi(r as i32 - 1) * binomial(n, r + 1);
    for i in 2..=r {
        v /= i as f64;
    }
    v
}

/// `tau[(P Y_t)^n]` as a sum over `NC(n)` of `k_pi(Y_t) alpha^{n+1-|pi|}`.
pub fn moment_py_cumulant(n: usize, alpha: f64, t: f64) -> Result<f64, NcError> {
    let cumulants: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { cumulant_y(k, t) })
        .collect();
    Ok(enumerate_nc(n)?
        .map(|p| {
            let k: f64 = p.blocks().iter().map(|b| cumulants[b.len()]).product();
            k * alpha.powi((n + 1 - p.len()) as i32)
        })
        .sum())
}

/// `sum_{i_1 + ... + i_r = total} Q_{i_1}(x) ... Q_{i_r}(x)`, all `i_k >= 0`.
pub fn r_m1_inner_compositions(r: usize, total: usize, x: f64) -> f64 {
    let base = TruncatedSeries1::from_fn(total, |i| q_poly(i, x));
    base.powi(r).coeff(total)
}

/// Laguerre form of the same inner sum for `total = m + 1 - r >= 1`.
pub fn r_m1_inner_laguerre(r: usize, total: usize, x: f64) -> f64 {
    if total == 0 {
        return 1.0;
    }
    let s: f64 = (1..=r.min(total))
        .map(|j| j as f64 * binomial(r, j) * laguerre(total - j, j, total as f64 * x))
        .sum();
    s / total as f64
}

/// `R_{m,1}(t)` from the one-star cumulant expansion over the block
/// containing the adjoint.
pub fn mixed_r_m1_comb(m: usize, alpha: f64, t: f64) -> f64 {
    assert!(m >= 1, "m must be positive");
    let x = alpha * t;
    let decay = (-t).exp();
    let sum: f64 = (1..=m + 1)
        .map(|r| {
            let k = v_poly(r - 1, t) - decay * v_poly(r, t);
            (-alpha).powi(r as i32) * k * r_m1_inner_compositions(r, m + 1 - r, x)
        })
        .sum();
    t.exp() * sum
}
