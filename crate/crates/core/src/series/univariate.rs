use std::ops::{Add, Mul, Neg, Sub};

use super::{SeriesError, CONSTANT_TERM_EPS};

/// A power series in `z` truncated after degree `cap`.
///
/// `coeffs[i]` is the coefficient of `z^i`; there are always `cap + 1` of
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries1 {
    coeffs: Vec<f64>,
}

impl TruncatedSeries1 {
    /// The zero series with the given cap.
    pub fn zeros(cap: usize) -> Self {
        Self {
            coeffs: vec![0.0; cap + 1],
        }
    }

    pub fn constant(c: f64, cap: usize) -> Self {
        let mut s = Self::zeros(cap);
        s.coeffs[0] = c;
        s
    }

    pub fn one(cap: usize) -> Self {
        Self::constant(1.0, cap)
    }

    /// `c * z^k`, or zero if `k > cap`.
    pub fn monomial(c: f64, k: usize, cap: usize) -> Self {
        let mut s = Self::zeros(cap);
        if k <= cap {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from leading coefficients, padding with zeros or
    /// dropping terms above `cap`.
    pub fn from_coeffs(coeffs: &[f64], cap: usize) -> Self {
        let mut s = Self::zeros(cap);
        for (dst, &src) in s.coeffs.iter_mut().zip(coeffs) {
            *dst = src;
        }
        s
    }

    /// Builds a series by evaluating `f(i)` for every retained degree.
    pub fn from_fn(cap: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            coeffs: (0..=cap).map(f).collect(),
        }
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`; zero above the cap.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Drops every term above `cap`. Caps larger than the current one are
    /// clamped, so this never grows the series.
    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap());
        Self {
            coeffs: self.coeffs[..=cap].to_vec(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let cap = self.cap().min(other.cap());
        Self::from_fn(cap, |i| f(self.coeffs[i], other.coeffs[i]))
    }

    /// Cauchy product truncated at the smaller cap.
    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        Self::from_fn(cap, |n| {
            (0..=n).map(|i| self.coeffs[i] * other.coeffs[n - i]).sum()
        })
    }

    /// `self^k` by repeated multiplication.
    pub fn powi(&self, k: usize) -> Self {
        let mut acc = Self::one(self.cap());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Quotient `self / other` by forward substitution.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let b0 = other.coeffs[0];
        if b0.abs() < CONSTANT_TERM_EPS {
            return Err(SeriesError::ZeroConstantTerm(b0));
        }
        let cap = self.cap().min(other.cap());
        let mut q = vec![0.0; cap + 1];
        for n in 0..=cap {
            let acc: f64 = (1..=n).map(|i| other.coeffs[i] * q[n - i]).sum();
            q[n] = (self.coeffs[n] - acc) / b0;
        }
        Ok(Self { coeffs: q })
    }

    pub fn recip(&self) -> Result<Self, SeriesError> {
        Self::one(self.cap()).div(self)
    }

    /// Principal square root (positive constant term).
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return Err(SeriesError::NonPositiveConstantTerm(a0));
        }
        let cap = self.cap();
        let mut r = vec![0.0; cap + 1];
        r[0] = a0.sqrt();
        for n in 1..=cap {
            let cross: f64 = (1..n).map(|i| r[i] * r[n - i]).sum();
            r[n] = (self.coeffs[n] - cross) / (2.0 * r[0]);
        }
        Ok(Self { coeffs: r })
    }

    /// `outer(inner(z))`, evaluated by Horner's rule in series arithmetic.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let c0 = inner.coeffs[0];
        if c0.abs() >= CONSTANT_TERM_EPS {
            return Err(SeriesError::NonZeroInnerConstant(c0));
        }
        let cap = self.cap().min(inner.cap());
        let inner = inner.truncate(cap);
        let mut acc = Self::zeros(cap);
        for &c in self.coeffs[..=cap].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let cap = self.cap();
        let mut fact = 1.0;
        let outer = Self::from_fn(cap, |k| {
            if k > 0 {
                fact *= k as f64;
            }
            1.0 / fact
        });
        outer.compose(self)
    }

    /// Multiplication by `z`; the top coefficient falls off.
    pub fn shift_up(&self) -> Self {
        let cap = self.cap();
        Self::from_fn(cap, |i| if i == 0 { 0.0 } else { self.coeffs[i - 1] })
    }

    /// Exact division by `z`. The cap drops by one since the coefficient of
    /// `z^cap` in the quotient is unknown.
    pub fn div_z(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0];
        if c0.abs() >= CONSTANT_TERM_EPS {
            return Err(SeriesError::NotDivisibleByZ(c0));
        }
        let cap = self.cap().saturating_sub(1);
        Ok(Self::from_fn(cap, |i| self.coeff(i + 1)))
    }

    /// Formal derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Self {
        Self::from_fn(self.cap(), |i| (i + 1) as f64 * self.coeff(i + 1))
    }

    /// `z d/dz`, which keeps the cap exact.
    pub fn euler(&self) -> Self {
        Self::from_fn(self.cap(), |i| i as f64 * self.coeffs[i])
    }

    /// Largest coefficientwise absolute difference over the common degrees.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.zip_with(other, |a, b| (a - b).abs())
            .coeffs
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Add for &TruncatedSeries1 {
    type Output = TruncatedSeries1;
    fn add(self, rhs: Self) -> TruncatedSeries1 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries1 {
    type Output = TruncatedSeries1;
    fn sub(self, rhs: Self) -> TruncatedSeries1 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &TruncatedSeries1 {
    type Output = TruncatedSeries1;
    fn mul(self, rhs: Self) -> TruncatedSeries1 {
        TruncatedSeries1::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries1 {
    type Output = TruncatedSeries1;
    fn neg(self) -> TruncatedSeries1 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(c: &[f64], cap: usize) -> TruncatedSeries1 {
        TruncatedSeries1::from_coeffs(c, cap)
    }

    fn geometric(cap: usize) -> TruncatedSeries1 {
        TruncatedSeries1::from_fn(cap, |_| 1.0)
    }

    #[test]
    fn difference_of_squares() {
        let p = s(&[1.0, 1.0], 6).mul(&s(&[1.0, -1.0], 6));
        assert_eq!(p, s(&[1.0, 0.0, -1.0], 6));
    }

    #[test]
    fn geometric_telescopes() {
        let p = geometric(10).mul(&s(&[1.0, -1.0], 10));
        assert_eq!(p, TruncatedSeries1::one(10));
    }

    #[test]
    fn mul_takes_min_cap() {
        let p = geometric(10).mul(&geometric(4));
        assert_eq!(p.cap(), 4);
        assert_eq!(p.coeffs(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn division_examples() {
        let q = TruncatedSeries1::one(8).div(&s(&[1.0, -1.0], 8)).unwrap();
        assert_eq!(q, geometric(8));
        let q = s(&[1.0, 0.0, -1.0], 8).div(&s(&[1.0, -1.0], 8)).unwrap();
        assert_eq!(q, s(&[1.0, 1.0], 8));
        let a = s(&[2.0, -0.3, 0.7, 1.1], 8);
        let q = a.div(&a).unwrap();
        assert!(q.max_abs_diff(&TruncatedSeries1::one(8)) < 1e-15);
    }

    #[test]
    fn division_by_zero_constant() {
        let err = TruncatedSeries1::one(4).div(&s(&[0.0, 1.0], 4));
        assert!(matches!(err, Err(SeriesError::ZeroConstantTerm(_))));
    }

    #[test]
    fn sqrt_one_minus_z_matches_binomial_series() {
        let r = s(&[1.0, -1.0], 12).sqrt().unwrap();
        // (1-z)^{1/2} = sum binom(1/2, k) (-z)^k
        let mut c = 1.0;
        for k in 0..=12 {
            assert_abs_diff_eq!(r.coeff(k), c, epsilon = 1e-15);
            c *= (k as f64 - 0.5) / (k as f64 + 1.0);
        }
        assert_abs_diff_eq!(r.coeff(1), -0.5);
        assert_abs_diff_eq!(r.coeff(2), -0.125);
        assert_abs_diff_eq!(r.coeff(3), -0.0625);
    }

    #[test]
    fn sqrt_perfect_square() {
        let r = s(&[1.0, 2.0, 1.0], 8).sqrt().unwrap();
        assert!(r.max_abs_diff(&s(&[1.0, 1.0], 8)) < 1e-15);
        assert_eq!(
            TruncatedSeries1::one(3).sqrt().unwrap(),
            TruncatedSeries1::one(3)
        );
        assert!(matches!(
            s(&[-1.0, 1.0], 3).sqrt(),
            Err(SeriesError::NonPositiveConstantTerm(_))
        ));
    }

    #[test]
    fn compose_examples() {
        let f = s(&[0.0, 0.3, -1.2, 0.5], 9);
        let id = s(&[0.0, 1.0], 9);
        assert_eq!(id.compose(&f).unwrap(), f);
        let sq = geometric(9).compose(&s(&[0.0, 0.0, 1.0], 9)).unwrap();
        let want = TruncatedSeries1::from_fn(9, |i| if i % 2 == 0 { 1.0 } else { 0.0 });
        assert_eq!(sq, want);
        assert!(matches!(
            geometric(4).compose(&s(&[0.1, 1.0], 4)),
            Err(SeriesError::NonZeroInnerConstant(_))
        ));
    }

    #[test]
    fn exp_of_z() {
        let e = s(&[0.0, 1.0], 10).exp().unwrap();
        let mut f = 1.0;
        for k in 0..=10 {
            if k > 0 {
                f *= k as f64;
            }
            assert_abs_diff_eq!(e.coeff(k), 1.0 / f, epsilon = 1e-16);
        }
    }

    #[test]
    fn div_z_drops_one_degree() {
        let q = s(&[0.0, 1.0, 2.0, 3.0], 3).div_z().unwrap();
        assert_eq!(q.cap(), 2);
        assert_eq!(q.coeffs(), &[1.0, 2.0, 3.0]);
        assert!(s(&[1.0], 3).div_z().is_err());
    }

    #[test]
    fn truncate_never_grows() {
        assert_eq!(geometric(3).truncate(10).cap(), 3);
        assert_eq!(geometric(10).truncate(3).cap(), 3);
    }
}
