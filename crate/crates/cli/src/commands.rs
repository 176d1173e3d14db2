use fubm_core::mcsim::{estimate_haar_words, estimate_words, Increment, SimConfig, SimWord};
use fubm_core::moments::{
    jacobi_even_half_series, jacobi_even_ode, mixed_closed_table, mixed_coeff_grid,
    mixed_ode_table, moment_py_closed, odd_half_closed, odd_half_convolution, odd_ode, rel_diff,
    stationary_limits, MomentTable, DEFAULT_STEP,
};
use fubm_core::noncrossing::{mixed_r_m1_comb, moment_py_cumulant};
use fubm_core::specfun::ModelParams;

use crate::report::{CheckRow, Index, Real, RunReport, ValueRow};
use crate::{
    CliError, CoeffsArgs, EvenArgs, EvenMethod, IncrementArg, MixedArgs, MixedMethod, Model,
    MomentsArgs, MonteCarlo, OddArgs, OddMethod, PyMethod, SimulateArgs,
};

fn validate(model: &Model) -> Result<ModelParams, CliError> {
    ModelParams::new(model.alpha, model.t).map_err(|e| CliError::Usage(e.to_string()))
}

fn model_params(report: &mut RunReport, model: &Model) {
    report
        .param("alpha", model.alpha)
        .param("t", model.t)
        .param("step", model.step);
}

fn require_half(alpha: f64, method: &str) -> Result<(), CliError> {
    if alpha == 0.5 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "method {method} requires --alpha 0.5, got {alpha}"
        )))
    }
}

fn method_list<T: clap::ValueEnum>(methods: &[T]) -> String {
    methods
        .iter()
        .filter_map(|m| m.to_possible_value().map(|v| v.get_name().to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

/// Value columns by method; each column after the first is checked against
/// the first.
struct Columns {
    base: Option<Base>,
}

struct Base {
    method: String,
    values: Vec<(Index, f64)>,
    tol: f64,
    relative: bool,
}

impl Columns {
    fn new() -> Self {
        Self { base: None }
    }

    /// Adds a column. The agreement check uses the looser of the two
    /// methods' tolerances, and is relative only when both are.
    fn push(
        &mut self,
        report: &mut RunReport,
        method: &str,
        values: Vec<(Index, f64)>,
        tol: f64,
        relative: bool,
    ) {
        for (idx, v) in &values {
            report.value(ValueRow::new(idx.clone(), method, *v));
        }
        match &self.base {
            None => {
                self.base = Some(Base {
                    method: method.to_string(),
                    values,
                    tol,
                    relative,
                })
            }
            Some(base) => {
                let relative = relative && base.relative;
                let worst = values
                    .iter()
                    .filter_map(|(idx, v)| {
                        base.values.iter().find(|(i, _)| i == idx).map(|(_, b)| {
                            if relative {
                                rel_diff(*v, *b)
                            } else {
                                (v - b).abs()
                            }
                        })
                    })
                    .fold(0.0, f64::max);
                report.check(CheckRow::within(
                    format!("{method} vs {}", base.method),
                    method,
                    worst,
                    tol.max(base.tol),
                ));
            }
        }
    }
}

fn singles(table: &MomentTable, range: impl Iterator<Item = usize>) -> Vec<(Index, f64)> {
    range
        .filter_map(|n| table.get(n).map(|v| (Index::Single(n), v)))
        .collect()
}

fn increment(arg: IncrementArg) -> Increment {
    match arg {
        IncrementArg::Plain => Increment::Plain,
        IncrementArg::MeanMatched => Increment::MeanMatched,
    }
}

fn sim_config(mc: &MonteCarlo, alpha: f64, t: f64) -> Result<SimConfig, CliError> {
    Ok(
        SimConfig::new(mc.dim, t, mc.steps, mc.samples, mc.seed, alpha)?
            .with_increment(increment(mc.increment)),
    )
}

fn mc_params(report: &mut RunReport, mc: &MonteCarlo) {
    let inc = match mc.increment {
        IncrementArg::Plain => "plain",
        IncrementArg::MeanMatched => "mean-matched",
    };
    report
        .param("dim", mc.dim)
        .param("samples", mc.samples)
        .param("steps", mc.steps)
        .param("increment", inc)
        .param("k", mc.k)
        .param("slack", mc.slack);
    report.seed = Some(mc.seed);
}

fn bracket_check(
    word: &str,
    method: &str,
    mean: f64,
    se: f64,
    reference: f64,
    mc: &MonteCarlo,
) -> CheckRow {
    CheckRow::within(
        format!("bracket {word}"),
        method,
        (mean - reference).abs(),
        mc.k * se + mc.slack,
    )
}

pub fn moments(a: &MomentsArgs) -> Result<RunReport, CliError> {
    let params = validate(&a.model)?;
    let mut report = RunReport::new("moments");
    model_params(&mut report, &a.model);
    report
        .param("n", a.n)
        .param("method", method_list(&a.method));
    let (alpha, t) = (params.alpha, params.t);
    let mut cols = Columns::new();
    for &method in &a.method {
        match method {
            PyMethod::Closed => {
                let v = (1..=a.n)
                    .map(|n| (Index::Single(n), moment_py_closed(n, alpha, t)))
                    .collect();
                cols.push(&mut report, "closed", v, a.tol.unwrap_or(1e-10), true);
            }
            PyMethod::Cumulant => {
                let v = (1..=a.n)
                    .map(|n| Ok((Index::Single(n), moment_py_cumulant(n, alpha, t)?)))
                    .collect::<Result<_, CliError>>()?;
                cols.push(&mut report, "cumulant", v, a.tol.unwrap_or(1e-10), true);
            }
            PyMethod::Ode => {
                let table = mixed_ode_table(a.n, 0, alpha, t, a.model.step)?;
                let v = (1..=a.n)
                    .filter_map(|n| {
                        table
                            .get2(n, 0)
                            .map(|r| (Index::Single(n), r * (-(n as f64) * t / 2.0).exp()))
                    })
                    .collect();
                cols.push(&mut report, "ode", v, a.tol.unwrap_or(1e-6), false);
            }
            PyMethod::Mc => {
                mc_params(&mut report, &a.mc);
                let cfg = sim_config(&a.mc, alpha, t)?;
                let words = (1..=a.n)
                    .map(SimWord::power)
                    .collect::<Result<Vec<_>, _>>()?;
                for (n, e) in (1..=a.n).zip(estimate_words(&cfg, &words)?) {
                    let reference = moment_py_closed(n, alpha, t);
                    let mut row = ValueRow::new(Index::Single(n), "monte_carlo", e.mean);
                    row.stderr = Some(Real(e.stderr));
                    row.samples = Some(e.samples);
                    row.reference = Some(Real(reference));
                    report.value(row);
                    report.check(bracket_check(
                        &format!("n={n}"),
                        "monte_carlo",
                        e.mean,
                        e.stderr,
                        reference,
                        &a.mc,
                    ));
                }
            }
        }
    }
    Ok(report)
}

pub fn mixed(a: &MixedArgs) -> Result<RunReport, CliError> {
    let params = validate(&a.model)?;
    let mut report = RunReport::new("mixed");
    model_params(&mut report, &a.model);
    report
        .param("m", a.m)
        .param("n", a.n)
        .param("method", method_list(&a.method));
    let (alpha, t) = (params.alpha, params.t);
    let pairs = |table: &MomentTable| -> Vec<(Index, f64)> {
        (0..=a.m)
            .flat_map(|m| (0..=a.n).map(move |n| (m, n)))
            .filter_map(|(m, n)| table.get2(m, n).map(|v| (Index::Pair([m, n]), v)))
            .collect()
    };
    let mut cols = Columns::new();
    for &method in &a.method {
        match method {
            MixedMethod::Closed => {
                let table = mixed_closed_table(a.m, a.n, alpha, t)?;
                cols.push(
                    &mut report,
                    "closed",
                    pairs(&table),
                    a.tol.unwrap_or(1e-6),
                    false,
                );
            }
            MixedMethod::Ode => {
                let table = mixed_ode_table(a.m, a.n, alpha, t, a.model.step)?;
                cols.push(
                    &mut report,
                    "ode",
                    pairs(&table),
                    a.tol.unwrap_or(1e-6),
                    false,
                );
            }
            MixedMethod::Combinatorial => {
                if a.n < 1 || a.m < 1 {
                    return Err(CliError::Usage(
                        "method combinatorial gives R_{m,1}, m >= 1; needs --m, --n >= 1".into(),
                    ));
                }
                let v = (1..=a.m)
                    .map(|m| (Index::Pair([m, 1]), mixed_r_m1_comb(m, alpha, t)))
                    .collect();
                cols.push(&mut report, "combinatorial", v, a.tol.unwrap_or(1e-8), true);
            }
        }
    }
    Ok(report)
}

pub fn even(a: &EvenArgs) -> Result<RunReport, CliError> {
    let params = validate(&a.model)?;
    let mut report = RunReport::new("even");
    model_params(&mut report, &a.model);
    report
        .param("n", a.n)
        .param("method", method_list(&a.method));
    let mut cols = Columns::new();
    let tol = a.tol.unwrap_or(1e-7);
    for &method in &a.method {
        match method {
            EvenMethod::Ode => {
                let table = jacobi_even_ode(a.n, params.alpha, params.t, a.model.step)?;
                cols.push(&mut report, "ode", singles(&table, 0..=a.n), tol, false);
            }
            EvenMethod::HalfSeries => {
                require_half(params.alpha, "half-series")?;
                let s = jacobi_even_half_series(params.t, a.n)?;
                let v = (0..=a.n).map(|n| (Index::Single(n), s.coeff(n))).collect();
                cols.push(&mut report, "half_series", v, tol, false);
            }
        }
    }
    Ok(report)
}

pub fn odd(a: &OddArgs) -> Result<RunReport, CliError> {
    let params = validate(&a.model)?;
    let mut report = RunReport::new("odd");
    model_params(&mut report, &a.model);
    report
        .param("n", a.n)
        .param("method", method_list(&a.method));
    let mut cols = Columns::new();
    let tol = a.tol.unwrap_or(1e-6);
    for &method in &a.method {
        let (name, table) = match method {
            OddMethod::Ode => ("ode", odd_ode(a.n, params.alpha, params.t, a.model.step)?),
            OddMethod::HalfSeries => {
                require_half(params.alpha, "half-series")?;
                ("half_series", odd_half_closed(a.n, params.t, a.n + 1)?)
            }
            OddMethod::Convolution => {
                require_half(params.alpha, "convolution")?;
                ("convolution", odd_half_convolution(a.n, params.t)?)
            }
        };
        cols.push(&mut report, name, singles(&table, 0..=a.n), tol, false);
    }
    Ok(report)
}

pub fn coeffs(a: &CoeffsArgs) -> Result<RunReport, CliError> {
    let params = validate(&a.model)?;
    let mut report = RunReport::new("coeffs");
    report
        .param("alpha", params.alpha)
        .param("t", params.t)
        .param("j", a.j)
        .param("k", a.k);
    let grid = mixed_coeff_grid(params.alpha, params.t, a.j, a.k)?;
    for j in 0..=a.j {
        for k in 0..=a.k {
            report.value(ValueRow::new(Index::Pair([j, k]), "closed", grid.get(j, k)));
        }
    }
    report.check(CheckRow::within(
        "symmetry",
        "closed",
        grid.max_asymmetry(),
        a.tol.unwrap_or(1e-10),
    ));
    Ok(report)
}

/// Which known family a word's trace belongs to.
enum Family {
    /// `A^n` or `A*^n`.
    Power(usize),
    /// Alternating of even length `2n`.
    Even(usize),
    /// Alternating of odd length `2n + 1`.
    Odd(usize),
}

fn family(word: &SimWord) -> Option<Family> {
    let l = word.letters();
    if l.iter().all(|&x| x == l[0]) {
        return Some(Family::Power(l.len()));
    }
    if l.windows(2).all(|w| w[0] != w[1]) {
        let n = l.len() / 2;
        return Some(if l.len() % 2 == 0 {
            Family::Even(n)
        } else {
            Family::Odd(n)
        });
    }
    None
}

fn word_reference(word: &SimWord, alpha: f64, t: f64, haar: bool) -> Result<Option<f64>, CliError> {
    let Some(fam) = family(word) else {
        return Ok(None);
    };
    let value = match (fam, haar) {
        (Family::Power(_), true) | (Family::Odd(_), true) => 0.0,
        (Family::Even(n), true) => stationary_limits(n, alpha)?
            .get(n)
            .expect("index within table"),
        (Family::Power(n), false) => moment_py_closed(n, alpha, t),
        (Family::Even(n), false) => jacobi_even_ode(n, alpha, t, DEFAULT_STEP)?
            .get(n)
            .expect("index within table"),
        (Family::Odd(n), false) => odd_ode(n, alpha, t, DEFAULT_STEP)?
            .get(n)
            .expect("index within table"),
    };
    Ok(Some(value))
}

pub fn simulate(a: &SimulateArgs) -> Result<RunReport, CliError> {
    let words = a
        .word
        .iter()
        .map(|w| w.parse::<SimWord>())
        .collect::<Result<Vec<_>, _>>()?;
    let t = if a.haar { 0.0 } else { a.t };
    let cfg = sim_config(&a.mc, a.alpha, t)?;
    let mut report = RunReport::new("simulate");
    report.param("alpha", a.alpha).param("haar", a.haar).param(
        "words",
        words
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    if !a.haar {
        report.param("t", a.t);
    }
    mc_params(&mut report, &a.mc);
    let estimates = if a.haar {
        estimate_haar_words(&cfg, &words)?
    } else {
        estimate_words(&cfg, &words)?
    };
    let method = if a.haar { "haar" } else { "monte_carlo" };
    let mut checks = Vec::new();
    for (word, e) in words.iter().zip(estimates) {
        let name = word.to_string();
        let mut row = ValueRow::new(Index::Word(name.clone()), method, e.mean);
        row.stderr = Some(Real(e.stderr));
        row.samples = Some(e.samples);
        if !a.no_reference {
            if let Some(reference) = word_reference(word, a.alpha, a.t, a.haar)? {
                row.reference = Some(Real(reference));
                checks.push(bracket_check(
                    &name, method, e.mean, e.stderr, reference, &a.mc,
                ));
            }
        }
        report.value(row);
    }
    for c in checks {
        report.check(c);
    }
    Ok(report)
}
