#![allow(dead_code)]

//! Property checks shared by the proptest suites and the acceptance runner.

use fubm_core::moments::{mixed_closed_table, mixed_coeff_grid};
use fubm_core::noncrossing::enumerate_nc;
use fubm_core::series::{TruncatedSeries1, TruncatedSeries2};
use fubm_core::specfun::{
    biane_inverse_residual, eta_power, eta_series, functional_relation_residual, q_poly,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub fn coeffs(cap: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(lo..hi, cap + 1)
}

/// Series with coefficients in `[-2, 2]` and cap in `1..=10`.
pub fn series() -> impl Strategy<Value = TruncatedSeries1> {
    (1usize..=10).prop_flat_map(|cap| {
        coeffs(cap, -2.0, 2.0).prop_map(move |c| TruncatedSeries1::from_coeffs(&c, cap))
    })
}

/// Three series sharing one cap.
pub fn series3() -> impl Strategy<Value = (TruncatedSeries1, TruncatedSeries1, TruncatedSeries1)> {
    (1usize..=10).prop_flat_map(|cap| {
        let s = move || {
            coeffs(cap, -2.0, 2.0).prop_map(move |c| TruncatedSeries1::from_coeffs(&c, cap))
        };
        (s(), s(), s())
    })
}

/// A series with constant term in `[1, 2]` and small tail, paired with an
/// arbitrary one of the same cap.
pub fn unit_pair() -> impl Strategy<Value = (TruncatedSeries1, TruncatedSeries1)> {
    (1usize..=10).prop_flat_map(|cap| {
        let a = coeffs(cap, -2.0, 2.0).prop_map(move |c| TruncatedSeries1::from_coeffs(&c, cap));
        let b = (1.0..2.0f64, coeffs(cap, -0.5, 0.5)).prop_map(move |(c0, mut c)| {
            c[0] = c0;
            TruncatedSeries1::from_coeffs(&c, cap)
        });
        (a, b)
    })
}

/// Zero-constant series `(f, g, h)` for composition.
pub fn compose_triple(
) -> impl Strategy<Value = (TruncatedSeries1, TruncatedSeries1, TruncatedSeries1)> {
    (1usize..=8).prop_flat_map(|cap| {
        let s = move || {
            coeffs(cap, -1.0, 1.0).prop_map(move |mut c| {
                c[0] = 0.0;
                TruncatedSeries1::from_coeffs(&c, cap)
            })
        };
        let f = coeffs(cap, -1.0, 1.0).prop_map(move |c| TruncatedSeries1::from_coeffs(&c, cap));
        (f, s(), s())
    })
}

pub fn series2() -> impl Strategy<Value = (TruncatedSeries2, TruncatedSeries2)> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(cy, cz)| {
        let n = (cy + 1) * (cz + 1);
        let mk = move |v: Vec<f64>| TruncatedSeries2::from_fn(cy, cz, |j, k| v[j * (cz + 1) + k]);
        let a = proptest::collection::vec(-2.0..2.0f64, n).prop_map(mk);
        let b = (1.0..2.0f64, proptest::collection::vec(-0.5..0.5f64, n)).prop_map(
            move |(c0, mut v)| {
                v[0] = c0;
                mk(v)
            },
        );
        (a, b)
    })
}

fn scale1(a: &TruncatedSeries1) -> f64 {
    a.max_abs().max(1.0)
}

fn close1(
    a: &TruncatedSeries1,
    b: &TruncatedSeries1,
    tol: f64,
    what: &str,
) -> Result<(), TestCaseError> {
    let d = a.max_abs_diff(b);
    let s = scale1(a).max(scale1(b));
    prop_assert!(d <= tol * s, "{}: difference {:e} (scale {:e})", what, d, s);
    Ok(())
}

pub fn prop_ring_axioms(
    (a, b, c): (TruncatedSeries1, TruncatedSeries1, TruncatedSeries1),
) -> Result<(), TestCaseError> {
    let cap = a.cap();
    let zero = TruncatedSeries1::zeros(cap);
    let one = TruncatedSeries1::one(cap);
    prop_assert_eq!(&a + &zero, a.clone());
    prop_assert_eq!(a.mul(&one), a.clone());
    prop_assert_eq!(&a + &(-&a), zero);
    prop_assert_eq!(&a + &b, &b + &a);
    close1(&a.mul(&b), &b.mul(&a), 1e-13, "commutativity")?;
    close1(
        &a.mul(&b).mul(&c),
        &a.mul(&b.mul(&c)),
        1e-12,
        "associativity",
    )?;
    close1(
        &a.mul(&(&b + &c)),
        &(&a.mul(&b) + &a.mul(&c)),
        1e-12,
        "distributivity",
    )?;
    close1(&a.powi(3), &a.mul(&a).mul(&a), 1e-12, "powi")?;
    Ok(())
}

pub fn prop_division_round_trip(
    (a, b): (TruncatedSeries1, TruncatedSeries1),
) -> Result<(), TestCaseError> {
    let q = a
        .mul(&b)
        .div(&b)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    close1(&q, &a, 1e-11, "(a b) / b")?;
    let r = b.recip().map_err(|e| TestCaseError::fail(e.to_string()))?;
    close1(&b.mul(&r), &TruncatedSeries1::one(b.cap()), 1e-12, "b / b")?;
    let s = b.sqrt().map_err(|e| TestCaseError::fail(e.to_string()))?;
    close1(&s.mul(&s), &b, 1e-12, "sqrt(b)^2")?;
    Ok(())
}

pub fn prop_composition(
    (f, g, h): (TruncatedSeries1, TruncatedSeries1, TruncatedSeries1),
) -> Result<(), TestCaseError> {
    let fail = |e: fubm_core::series::SeriesError| TestCaseError::fail(e.to_string());
    let left = f.compose(&g).map_err(fail)?.compose(&h).map_err(fail)?;
    let right = f.compose(&g.compose(&h).map_err(fail)?).map_err(fail)?;
    close1(&left, &right, 1e-11, "composition associativity")?;
    let sum = g.exp().map_err(fail)?.mul(&h.exp().map_err(fail)?);
    close1(&(&g + &h).exp().map_err(fail)?, &sum, 1e-12, "exp(g + h)")?;
    let z = TruncatedSeries1::monomial(1.0, 1, f.cap());
    close1(&f.compose(&z).map_err(fail)?, &f, 0.0, "f o z")?;
    Ok(())
}

pub fn prop_leibniz(
    (a, b, _c): (TruncatedSeries1, TruncatedSeries1, TruncatedSeries1),
) -> Result<(), TestCaseError> {
    let lhs = a.mul(&b).derivative();
    let rhs = &a.derivative().mul(&b.truncate(a.cap() - 1))
        + &a.truncate(a.cap() - 1).mul(&b.derivative());
    close1(&lhs, &rhs, 1e-12, "Leibniz")?;
    close1(&a.euler(), &a.derivative().shift_up(), 0.0, "z d/dz")?;
    Ok(())
}

pub fn prop_bivariate((a, b): (TruncatedSeries2, TruncatedSeries2)) -> Result<(), TestCaseError> {
    let (cy, cz) = (a.cap_y(), a.cap_z());
    let d = a.mul(&b).max_abs_diff(&b.mul(&a));
    prop_assert!(d < 1e-12, "commutativity {:e}", d);
    let r = b.recip().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let d = b.mul(&r).max_abs_diff(&TruncatedSeries2::one(cy, cz));
    prop_assert!(d < 1e-11, "recip {:e}", d);
    let d = a
        .mul(&b)
        .transpose()
        .max_abs_diff(&a.transpose().mul(&b.transpose()));
    prop_assert!(d < 1e-12, "transpose {:e}", d);
    Ok(())
}

pub fn prop_eta_power((t, j): (f64, usize)) -> Result<(), TestCaseError> {
    let cap = 12;
    let direct = eta_series(t, cap).powi(j);
    let d = eta_power(t, j, cap).max_abs_diff(&direct);
    let s = direct.max_abs().max(1.0);
    prop_assert!(d <= 1e-10 * s, "eta^{} at t = {}: {:e}", j, t, d);
    Ok(())
}

pub fn prop_inverse_relations(t: f64) -> Result<(), TestCaseError> {
    let b = biane_inverse_residual(t, 12).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(b <= 1e-9, "Biane inverse at t = {}: {:e}", t, b);
    let f = functional_relation_residual(t / 2.0, 12)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(f <= 1e-9, "functional relation at t = {}: {:e}", t / 2.0, f);
    Ok(())
}

/// At `alpha = 1`, `R_{m,n} = e^{t min(m,n)} Q_{|m-n|}(t)`.
pub fn prop_full_rank_mixed(t: f64) -> Result<(), TestCaseError> {
    let table = mixed_closed_table(6, 6, 1.0, t).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for m in 0..=6usize {
        for n in 0..=6usize {
            let want = (t * m.min(n) as f64).exp() * q_poly(m.abs_diff(n), t);
            let got = table.get2(m, n).unwrap();
            let d = (got - want).abs() / want.abs().max(1.0);
            prop_assert!(
                d <= 1e-8,
                "R({},{}) at t = {}: {} vs {}",
                m,
                n,
                t,
                got,
                want
            );
        }
    }
    Ok(())
}

pub fn prop_grid_symmetry((alpha, t): (f64, f64)) -> Result<(), TestCaseError> {
    let grid = mixed_coeff_grid(alpha, t, 8, 8).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(grid.max_asymmetry() < 1e-10);
    let table =
        mixed_closed_table(5, 5, alpha, t).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(table.max_asymmetry() < 1e-10);
    Ok(())
}

/// `|K(pi)| = n + 1 - |pi|` and `K(K(pi))` is `pi` rotated by one.
pub fn prop_kreweras((n, pick): (usize, usize)) -> Result<(), TestCaseError> {
    let all: Vec<_> = enumerate_nc(n)
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .collect();
    let pi = &all[pick % all.len()];
    let k = pi.kreweras();
    prop_assert_eq!(k.len(), n + 1 - pi.len());
    prop_assert_eq!(k.kreweras(), pi.rotate(-1));
    Ok(())
}

/// Runs a property with a fixed seed; `Err` carries the minimal failure.
pub fn run_property<S, F>(name: &str, cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

/// Every property above, `cases` cases each.
pub fn run_all_properties(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "ring axioms",
            run_property("ring axioms", cases, series3(), prop_ring_axioms),
        ),
        (
            "division round trip",
            run_property(
                "division round trip",
                cases,
                unit_pair(),
                prop_division_round_trip,
            ),
        ),
        (
            "composition",
            run_property("composition", cases, compose_triple(), prop_composition),
        ),
        (
            "leibniz",
            run_property("leibniz", cases, series3(), prop_leibniz),
        ),
        (
            "bivariate",
            run_property("bivariate", cases, series2(), prop_bivariate),
        ),
        (
            "eta power",
            run_property(
                "eta power",
                cases,
                (0.0..2.0f64, 1usize..=6),
                prop_eta_power,
            ),
        ),
        (
            "inverse relations",
            run_property(
                "inverse relations",
                cases.min(64),
                0.0..2.0f64,
                prop_inverse_relations,
            ),
        ),
        (
            "full-rank mixed moments",
            run_property(
                "full-rank mixed moments",
                cases.min(64),
                0.0..2.0f64,
                prop_full_rank_mixed,
            ),
        ),
        (
            "grid symmetry",
            run_property(
                "grid symmetry",
                cases.min(64),
                (0.05..1.0f64, 0.0..2.0f64),
                prop_grid_symmetry,
            ),
        ),
        (
            "kreweras",
            run_property(
                "kreweras",
                cases,
                (1usize..=9, any::<usize>()),
                prop_kreweras,
            ),
        ),
    ]
}
