use super::{Method, MomentKind, MomentTable, MomentsError, DEFAULT_STEP};
use crate::specfun::{q_poly, ModelParams};

/// Time used as "infinity" for stationary limits.
pub const STATIONARY_TIME: f64 = 30.0;

/// Classical fourth-order Runge-Kutta from `t = 0` to `t_end`.
///
/// The step actually used is `t_end / ceil(t_end / h)`, so the final time is
/// hit exactly.
pub fn rk4<F>(y0: &[f64], t_end: f64, h: f64, mut f: F) -> Result<Vec<f64>, MomentsError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(MomentsError::InvalidStep(h));
    }
    let mut y = y0.to_vec();
    if t_end <= 0.0 {
        return Ok(y);
    }
    let steps = (t_end / h).ceil() as usize;
    let h = t_end / steps as f64;
    let d = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; d],
        vec![0.0; d],
        vec![0.0; d],
        vec![0.0; d],
        vec![0.0; d],
    );
    for step in 0..steps {
        let t = step as f64 * h;
        f(t, &y, &mut k1);
        for i in 0..d {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..d {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..d {
            tmp[i] = y[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..d {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(MomentsError::StepTooLarge(t + h));
        }
    }
    Ok(y)
}

/// Integrates the hierarchy for `R_{m,n}`, `m <= mmax`, `n <= nmax`.
///
/// The boundary rows `R_{m,0}` and `R_{0,n}` are integrated too, through
/// `dR_{m,0}/dt = -sum_k k R_{k,0} R_{m-k,0}`, rather than being fixed to
/// their closed form.
pub fn mixed_ode_table(
    mmax: usize,
    nmax: usize,
    alpha: f64,
    t_end: f64,
    h: f64,
) -> Result<MomentTable, MomentsError> {
    let params = ModelParams::new(alpha, t_end)?;
    let w = nmax + 1;
    let at = |r: &[f64], m: usize, n: usize| r[m * w + n];
    let qmax = mmax.max(nmax);
    let mut q = vec![0.0; qmax + 1];
    let y0 = vec![alpha; (mmax + 1) * w];
    let y = rk4(&y0, t_end, h, |t, r, dr| {
        for (i, qi) in q.iter_mut().enumerate() {
            *qi = q_poly(i, alpha * t);
        }
        let et = t.exp();
        for m in 0..=mmax {
            for n in 0..=nmax {
                let v = match (m, n) {
                    (0, 0) => 0.0,
                    (_, 0) => -(1..m)
                        .map(|k| k as f64 * at(r, k, 0) * at(r, m - k, 0))
                        .sum::<f64>(),
                    (0, _) => -(1..n)
                        .map(|k| k as f64 * at(r, 0, k) * at(r, 0, n - k))
                        .sum::<f64>(),
                    _ => {
                        let a: f64 = (1..n).map(|k| k as f64 * at(r, m, k) * q[n - k]).sum();
                        let b: f64 = (1..m).map(|k| k as f64 * at(r, k, n) * q[m - k]).sum();
                        let mut c = 0.0;
                        for k in 0..m {
                            for j in 0..n {
                                c += at(r, k, j) * at(r, m - 1 - k, n - 1 - j);
                            }
                        }
                        -alpha * (a + b) + et * c
                    }
                };
                dr[m * w + n] = v;
            }
        }
    })?;
    let mut table = MomentTable::new(MomentKind::Mixed, params, Method::Ode);
    for m in 0..=mmax {
        for n in 0..=nmax {
            table.insert2(m, n, at(&y, m, n));
        }
    }
    Ok(table)
}

fn even_rhs(alpha: f64, r: &[f64], n: usize) -> f64 {
    // r[0] = alpha, r[k] = r_k.
    let nf = n as f64;
    let tail: f64 = (0..n.saturating_sub(1))
        .map(|q| r[n - q - 1] * (r[q] - r[q + 1]))
        .sum();
    -nf * r[n] + nf * alpha * r[n - 1] + nf * tail
}

/// `r_n(t)`, `n <= nmax`, from the even hierarchy with `r_0 = alpha`.
pub fn jacobi_even_ode(
    nmax: usize,
    alpha: f64,
    t_end: f64,
    h: f64,
) -> Result<MomentTable, MomentsError> {
    let params = ModelParams::new(alpha, t_end)?;
    let mut full = vec![alpha; nmax + 1];
    let y = rk4(&vec![alpha; nmax], t_end, h, |_, y, dy| {
        full[1..].copy_from_slice(y);
        for n in 1..=nmax {
            dy[n - 1] = even_rhs(alpha, &full, n);
        }
    })?;
    let mut table = MomentTable::new(MomentKind::EvenAlt, params, Method::Ode);
    table.insert(0, alpha);
    for (n, v) in y.into_iter().enumerate() {
        table.insert(n + 1, v);
    }
    Ok(table)
}

/// Even and odd alternating moments integrated jointly. The odd hierarchy is
/// seeded with `s_{0,1}(t) = alpha e^{-t/2}`.
pub fn alternating_ode(
    nmax: usize,
    alpha: f64,
    t_end: f64,
    h: f64,
) -> Result<(MomentTable, MomentTable), MomentsError> {
    let params = ModelParams::new(alpha, t_end)?;
    let mut r = vec![alpha; nmax + 1];
    let mut s = vec![alpha; nmax + 1];
    let y = rk4(&vec![alpha; 2 * nmax], t_end, h, |t, y, dy| {
        r[1..].copy_from_slice(&y[..nmax]);
        s[1..].copy_from_slice(&y[nmax..]);
        s[0] = alpha * (-t / 2.0).exp();
        for n in 1..=nmax {
            dy[n - 1] = even_rhs(alpha, &r, n);
            let mut v = -((2 * n + 1) as f64) / 2.0 * s[n];
            for q in 1..=n {
                v -= (2 * n - 2 * q + 1) as f64 * s[n - q] * r[q];
                v += (2 * n - 2 * q + 2) as f64 * s[n - q] * r[q - 1];
            }
            dy[nmax + n - 1] = v;
        }
    })?;
    let mut even = MomentTable::new(MomentKind::EvenAlt, params, Method::Ode);
    let mut odd = MomentTable::new(MomentKind::OddAlt, params, Method::Ode);
    even.insert(0, alpha);
    odd.insert(0, alpha * (-t_end / 2.0).exp());
    for n in 1..=nmax {
        even.insert(n, y[n - 1]);
        odd.insert(n, y[nmax + n - 1]);
    }
    Ok((even, odd))
}

/// `s_{n,1}(t)`, `n <= nmax`.
pub fn odd_ode(nmax: usize, alpha: f64, t_end: f64, h: f64) -> Result<MomentTable, MomentsError> {
    Ok(alternating_ode(nmax, alpha, t_end, h)?.1)
}

/// `r_n(infinity) = tau[(P U P U^*)^n]`, read off the even hierarchy at a
/// long time.
pub fn stationary_limits(nmax: usize, alpha: f64) -> Result<MomentTable, MomentsError> {
    jacobi_even_ode(nmax, alpha, STATIONARY_TIME, DEFAULT_STEP)
}
