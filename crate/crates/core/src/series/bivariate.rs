use std::ops::{Add, Mul, Neg, Sub};

use super::{SeriesError, TruncatedSeries1, CONSTANT_TERM_EPS};

/// A power series in `y` and `z`, truncated after degree `cap_y` in `y`
/// and `cap_z` in `z` independently.
///
/// Storage is row-major: entry `(j, k)` is the coefficient of `y^j z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries2 {
    cap_y: usize,
    cap_z: usize,
    coeffs: Vec<f64>,
}

impl TruncatedSeries2 {
    pub fn zeros(cap_y: usize, cap_z: usize) -> Self {
        Self {
            cap_y,
            cap_z,
            coeffs: vec![0.0; (cap_y + 1) * (cap_z + 1)],
        }
    }

    pub fn constant(c: f64, cap_y: usize, cap_z: usize) -> Self {
        let mut s = Self::zeros(cap_y, cap_z);
        s.coeffs[0] = c;
        s
    }

    pub fn one(cap_y: usize, cap_z: usize) -> Self {
        Self::constant(1.0, cap_y, cap_z)
    }

    pub fn from_fn(cap_y: usize, cap_z: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut coeffs = Vec::with_capacity((cap_y + 1) * (cap_z + 1));
        for j in 0..=cap_y {
            for k in 0..=cap_z {
                coeffs.push(f(j, k));
            }
        }
        Self {
            cap_y,
            cap_z,
            coeffs,
        }
    }

    /// Sparse construction from `(j, k, value)` triples; terms outside the
    /// caps are dropped.
    pub fn from_terms(terms: &[(usize, usize, f64)], cap_y: usize, cap_z: usize) -> Self {
        let mut s = Self::zeros(cap_y, cap_z);
        for &(j, k, c) in terms {
            if j <= cap_y && k <= cap_z {
                *s.at_mut(j, k) += c;
            }
        }
        s
    }

    /// A series in `y` alone.
    pub fn from_y(s: &TruncatedSeries1, cap_z: usize) -> Self {
        Self::from_fn(s.cap(), cap_z, |j, k| if k == 0 { s.coeff(j) } else { 0.0 })
    }

    /// A series in `z` alone.
    pub fn from_z(s: &TruncatedSeries1, cap_y: usize) -> Self {
        Self::from_fn(cap_y, s.cap(), |j, k| if j == 0 { s.coeff(k) } else { 0.0 })
    }

    /// Outer product `a(y) b(z)`.
    pub fn outer(a: &TruncatedSeries1, b: &TruncatedSeries1) -> Self {
        Self::from_fn(a.cap(), b.cap(), |j, k| a.coeff(j) * b.coeff(k))
    }

    pub fn cap_y(&self) -> usize {
        self.cap_y
    }

    pub fn cap_z(&self) -> usize {
        self.cap_z
    }

    fn idx(&self, j: usize, k: usize) -> usize {
        j * (self.cap_z + 1) + k
    }

    /// Coefficient of `y^j z^k`; zero outside the caps.
    pub fn coeff(&self, j: usize, k: usize) -> f64 {
        if j <= self.cap_y && k <= self.cap_z {
            self.coeffs[self.idx(j, k)]
        } else {
            0.0
        }
    }

    fn at_mut(&mut self, j: usize, k: usize) -> &mut f64 {
        let i = self.idx(j, k);
        &mut self.coeffs[i]
    }

    pub fn truncate(&self, cap_y: usize, cap_z: usize) -> Self {
        let (cy, cz) = (cap_y.min(self.cap_y), cap_z.min(self.cap_z));
        Self::from_fn(cy, cz, |j, k| self.coeff(j, k))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            cap_y: self.cap_y,
            cap_z: self.cap_z,
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (cy, cz) = (self.cap_y.min(other.cap_y), self.cap_z.min(other.cap_z));
        Self::from_fn(cy, cz, |j, k| f(self.coeff(j, k), other.coeff(j, k)))
    }

    /// Doubly truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let (cy, cz) = (self.cap_y.min(other.cap_y), self.cap_z.min(other.cap_z));
        let mut out = Self::zeros(cy, cz);
        for p in 0..=cy {
            for q in 0..=cz {
                let a = self.coeff(p, q);
                if a == 0.0 {
                    continue;
                }
                for j in p..=cy {
                    for k in q..=cz {
                        *out.at_mut(j, k) += a * other.coeff(j - p, k - q);
                    }
                }
            }
        }
        out
    }

    pub fn powi(&self, n: usize) -> Self {
        let mut acc = Self::one(self.cap_y, self.cap_z);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse, lifted one total order at a time.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if a0.abs() < CONSTANT_TERM_EPS {
            return Err(SeriesError::ZeroConstantTerm(a0));
        }
        let (cy, cz) = (self.cap_y, self.cap_z);
        let mut r = Self::zeros(cy, cz);
        for order in 0..=(cy + cz) {
            for j in order.saturating_sub(cz)..=order.min(cy) {
                let k = order - j;
                if order == 0 {
                    *r.at_mut(0, 0) = 1.0 / a0;
                    continue;
                }
                let mut acc = 0.0;
                for p in 0..=j {
                    for q in 0..=k {
                        if p == 0 && q == 0 {
                            continue;
                        }
                        acc += self.coeff(p, q) * r.coeff(j - p, k - q);
                    }
                }
                *r.at_mut(j, k) = -acc / a0;
            }
        }
        Ok(r)
    }

    /// Exact expansion of `exp(t (1 + alpha y + alpha z))`.
    pub fn exp_linear(t: f64, alpha: f64, cap_y: usize, cap_z: usize) -> Self {
        let y = exp_scaled(t * alpha, cap_y);
        let z = exp_scaled(t * alpha, cap_z);
        Self::outer(&y, &z).scale(t.exp())
    }

    /// Swaps the roles of `y` and `z`.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cap_z, self.cap_y, |j, k| self.coeff(k, j))
    }

    /// Largest absolute difference over the common index range.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.zip_with(other, |a, b| (a - b).abs())
            .coeffs
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Coefficients of `exp(c x)`: `c^i / i!`.
fn exp_scaled(c: f64, cap: usize) -> TruncatedSeries1 {
    let mut term = 1.0;
    TruncatedSeries1::from_fn(cap, |i| {
        if i > 0 {
            term *= c / i as f64;
        }
        term
    })
}

impl Add for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn add(self, rhs: Self) -> TruncatedSeries2 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn sub(self, rhs: Self) -> TruncatedSeries2 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn mul(self, rhs: Self) -> TruncatedSeries2 {
        TruncatedSeries2::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries2 {
    type Output = TruncatedSeries2;
    fn neg(self) -> TruncatedSeries2 {
        self.scale(-1.0)
    }
}
