use fubm_core::moments::{
    corollary_discrepancy, jacobi_even_half_series, jacobi_even_ode, m_infinity_discrepancy,
    mixed_closed_table, mixed_ode_table, moment_py_closed, odd_half_closed, odd_ode, rel_diff,
    remark_discrepancy, verify_constancy, verify_oddeven, verify_stationary, verify_w_square,
    Discrepancy, CONSISTENCY_TOL,
};
use fubm_core::noncrossing::{
    enumerate_nc, mixed_r_m1_comb, moment_py_cumulant, weight_sum, weight_sum_closed, NcPartition,
};
use fubm_core::specfun::{biane_inverse_residual, functional_relation_residual, lambda_residual};

use crate::report::{CheckRow, Param, Real, RunReport};
use crate::{CliError, Suite, VerifyArgs};

const SUITES: [Suite; 9] = [
    Suite::Binom,
    Suite::Kreweras,
    Suite::WSquare,
    Suite::Oddeven,
    Suite::Stationary,
    Suite::Constancy,
    Suite::CrossMethod,
    Suite::Inverse,
    Suite::Discrepancy,
];

/// Orders used by the constancy suite.
const CONSTANCY_ORDERS: [usize; 3] = [1, 2, 3];

/// Largest mixed index compared between closed form and ODE.
const MIXED_MAX: usize = 6;

/// Largest `m` for the combinatorial `R_{m,1}`.
const COMB_MAX: usize = 8;

/// Largest orders in the `alpha = 1/2` pipeline comparisons.
const ODD_HALF_MAX: usize = 8;
const EVEN_HALF_MAX: usize = 10;

fn fmt_t(t: f64) -> String {
    format!("{t}")
}

struct Suites<'a> {
    args: &'a VerifyArgs,
    report: RunReport,
}

impl Suites<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.args.tol.unwrap_or(default)
    }

    fn within(&mut self, check: String, method: &str, residual: f64, default_tol: f64) {
        let tol = self.tol(default_tol);
        self.report
            .check(CheckRow::within(check, method, residual, tol));
    }

    fn binom(&mut self) -> Result<(), CliError> {
        let mut worst: f64 = 0.0;
        for n in 1..=self.args.nmax {
            for r in 0..n {
                worst = worst.max(rel_diff(weight_sum(n, r)?, weight_sum_closed(n, r)));
            }
        }
        self.within(
            format!("binom n<={}", self.args.nmax),
            "combinatorial",
            worst,
            1e-10,
        );
        Ok(())
    }

    fn kreweras(&mut self) -> Result<(), CliError> {
        let p =
            |blocks: &[&[usize]]| NcPartition::new(5, blocks.iter().map(|b| b.to_vec()).collect());
        let examples = [
            (p(&[&[1], &[2], &[3], &[4, 5]])?, p(&[&[1, 2, 3, 5], &[4]])?),
            (p(&[&[1], &[2], &[4], &[3, 5]])?, p(&[&[1, 2, 5], &[3, 4]])?),
        ];
        for (pi, want) in examples {
            let got = pi.kreweras();
            let miss = if got == want { 0.0 } else { 1.0 };
            let row = CheckRow::within(format!("kreweras K({pi})"), "combinatorial", miss, 0.0)
                .with_note(format!("got {got}, expected {want}"));
            self.report.check(row);
        }
        let mut bad = 0usize;
        let mut total = 0usize;
        for n in 1..=self.args.nmax {
            for pi in enumerate_nc(n)? {
                total += 1;
                if pi.kreweras().len() != n + 1 - pi.len() {
                    bad += 1;
                }
            }
        }
        let row = CheckRow::within(
            format!("kreweras block count n<={}", self.args.nmax),
            "combinatorial",
            bad as f64,
            0.0,
        )
        .with_note(format!("{bad} violations in {total} partitions"));
        self.report.check(row);
        Ok(())
    }

    fn w_square(&mut self) -> Result<(), CliError> {
        for &t in &self.args.t {
            let r = verify_w_square(t, self.args.degree)?;
            self.within(format!("w-square t={}", fmt_t(t)), "half_series", r, 1e-8);
        }
        Ok(())
    }

    fn oddeven(&mut self) -> Result<(), CliError> {
        for &t in &self.args.t {
            let r = verify_oddeven(t, self.args.degree)?;
            self.within(format!("oddeven t={}", fmt_t(t)), "half_series", r, 1e-8);
        }
        Ok(())
    }

    fn stationary(&mut self) {
        let r = verify_stationary(self.args.degree);
        self.within("stationary".to_string(), "half_series", r, 1e-9);
    }

    /// `F(t)` must stay at its predicted constant over the time grid.
    fn constancy(&mut self) -> Result<(), CliError> {
        for n in CONSTANCY_ORDERS {
            let rep = verify_constancy(n, &self.args.t, self.args.step)?;
            let residual = rep
                .values
                .iter()
                .map(|&(_, f)| (f - rep.expected).abs())
                .fold(0.0, f64::max);
            let tol = self.tol(1e-8);
            let row = CheckRow::within(format!("constancy n={n}"), "ode", residual, tol).with_note(
                format!(
                    "expected {}, spread {}",
                    Real(rep.expected).text(),
                    Real(rep.max_deviation).text()
                ),
            );
            self.report.check(row);
        }
        Ok(())
    }

    fn cross_method(&mut self) -> Result<(), CliError> {
        let (nmax, step) = (self.args.nmax, self.args.step);
        let mut cumulant: f64 = 0.0;
        let mut ode: f64 = 0.0;
        let mut comb: f64 = 0.0;
        for &alpha in &self.args.alpha {
            for &t in &self.args.t {
                for n in 1..=nmax {
                    let c = moment_py_cumulant(n, alpha, t)?;
                    cumulant = cumulant.max(rel_diff(c, moment_py_closed(n, alpha, t)));
                }
                let closed = mixed_closed_table(MIXED_MAX, MIXED_MAX, alpha, t)?;
                let rk = mixed_ode_table(MIXED_MAX, MIXED_MAX, alpha, t, step)?;
                for (idx, v) in &closed.values {
                    ode = ode.max((v - rk.values[idx]).abs());
                }
                let wide = mixed_closed_table(COMB_MAX, 1, alpha, t)?;
                for m in 1..=COMB_MAX {
                    let want = wide.get2(m, 1).expect("index within table");
                    comb = comb.max(rel_diff(mixed_r_m1_comb(m, alpha, t), want));
                }
            }
        }
        self.within(
            format!("cumulant vs closed n<={nmax}"),
            "cumulant",
            cumulant,
            1e-10,
        );
        self.within(
            format!("mixed ode vs closed (m,n)<=({MIXED_MAX},{MIXED_MAX})"),
            "ode",
            ode,
            1e-6,
        );
        self.within(
            format!("R_m1 combinatorial vs closed m<={COMB_MAX}"),
            "combinatorial",
            comb,
            1e-8,
        );
        let mut odd: f64 = 0.0;
        let mut even: f64 = 0.0;
        for &t in &self.args.t {
            let half = odd_half_closed(ODD_HALF_MAX, t, self.args.degree.max(ODD_HALF_MAX))?;
            let rk = odd_ode(ODD_HALF_MAX, 0.5, t, step)?;
            for n in 0..=ODD_HALF_MAX {
                odd =
                    odd.max((half.get(n).expect("in table") - rk.get(n).expect("in table")).abs());
            }
            let series = jacobi_even_half_series(t, self.args.degree.max(EVEN_HALF_MAX))?;
            let rk = jacobi_even_ode(EVEN_HALF_MAX, 0.5, t, step)?;
            for n in 0..=EVEN_HALF_MAX {
                even = even.max((series.coeff(n) - rk.get(n).expect("in table")).abs());
            }
        }
        self.within(
            format!("odd half series vs ode n<={ODD_HALF_MAX}"),
            "half_series",
            odd,
            1e-6,
        );
        self.within(
            format!("even half series vs ode n<={EVEN_HALF_MAX}"),
            "half_series",
            even,
            1e-7,
        );
        Ok(())
    }

    /// The functional relation is evaluated with `eta` at time `t` itself,
    /// that is at half time `t/2` of the doubled argument.
    fn inverse(&mut self) -> Result<(), CliError> {
        let d = self.args.degree;
        for &t in &self.args.t {
            let r = biane_inverse_residual(t, d)?;
            self.within(format!("eta inverse t={}", fmt_t(t)), "series", r, 1e-9);
            let r = functional_relation_residual(t / 2.0, d)?;
            self.within(
                format!("functional relation eta(t={})", fmt_t(t)),
                "series",
                r,
                1e-9,
            );
        }
        self.within(
            "lambda inverse".to_string(),
            "series",
            lambda_residual(d)?,
            1e-10,
        );
        Ok(())
    }

    /// Passes when the automated comparison reaches the expected verdict.
    fn flag(&mut self, check: String, d: &Discrepancy, expect_consistent: bool) {
        let tol = self.tol(CONSISTENCY_TOL);
        let consistent = d.difference <= tol;
        let expect = if expect_consistent {
            "CONSISTENT"
        } else {
            "INCONSISTENT"
        };
        self.report.check(CheckRow {
            check: format!("{check} expect {expect}"),
            method: "discrepancy".to_string(),
            residual: Real(d.difference),
            tolerance: Real(tol),
            pass: consistent == expect_consistent,
            note: Some(format!(
                "{} (printed {}, derived {})",
                if consistent {
                    "CONSISTENT"
                } else {
                    "INCONSISTENT"
                },
                Real(d.printed).text(),
                Real(d.derived).text()
            )),
        });
    }

    fn discrepancy(&mut self) -> Result<(), CliError> {
        let times: Vec<f64> = self.args.t.iter().copied().filter(|&t| t > 0.0).collect();
        for &alpha in &self.args.alpha.clone() {
            for &t in &times {
                let d = remark_discrepancy(alpha, t, 8)?;
                self.flag(
                    format!("remark expansion alpha={alpha} t={}", fmt_t(t)),
                    &d,
                    alpha == 1.0,
                );
            }
            let checks = m_infinity_discrepancy(alpha, 3)?;
            self.flag(format!("m_infinity(0)=0 alpha={alpha}"), &checks[0], false);
        }
        for &t in &times {
            let d = corollary_discrepancy(t)?;
            self.flag(format!("corollary s_11 t={}", fmt_t(t)), &d, false);
        }
        Ok(())
    }
}

pub fn run(args: &VerifyArgs) -> Result<RunReport, CliError> {
    let mut selected: Vec<Suite> = if args.suite.contains(&Suite::All) {
        SUITES.to_vec()
    } else {
        args.suite.clone()
    };
    selected.sort();
    selected.dedup();
    if args.t.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::Usage("--t values must be finite and >= 0".into()));
    }
    let mut report = RunReport::new("verify");
    let names: Vec<String> = selected
        .iter()
        .filter_map(|s| clap::ValueEnum::to_possible_value(s).map(|v| v.get_name().to_string()))
        .collect();
    report
        .param("suite", names.join(","))
        .param("t", args.t.as_slice())
        .param("alpha", args.alpha.as_slice())
        .param("degree", args.degree)
        .param("nmax", args.nmax)
        .param("step", args.step);
    if let Some(tol) = args.tol {
        report.params.insert("tol".into(), Param::Real(Real(tol)));
    }
    let mut s = Suites { args, report };
    for suite in selected {
        match suite {
            Suite::Binom => s.binom()?,
            Suite::Kreweras => s.kreweras()?,
            Suite::WSquare => s.w_square()?,
            Suite::Oddeven => s.oddeven()?,
            Suite::Stationary => s.stationary(),
            Suite::Constancy => s.constancy()?,
            Suite::CrossMethod => s.cross_method()?,
            Suite::Inverse => s.inverse()?,
            Suite::Discrepancy => s.discrepancy()?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(s.report)
}
