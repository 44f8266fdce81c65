// SPDX-License-Identifier: Apache-2.0

use anyhow::{bail, Context, Result};
use edr_core::optimal::THEOREM_TOL;
use edr_core::{
    edr_report, family, is_minimum_error_disturbance, mixture_moments, posterior_family, run_verification,
    solve_params, Constants, ErrorDisturbanceReport, FamilyKind, GaussianState, InteractionParams, Interval,
    LinearPositionMeasurement, MixtureMoments, SolverInput, SolverOutput, TransferMatrix, VerifyConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Command, Format, OutputArgs, PsiArgs};
use crate::render::{emit, exact, fixed, json, Table};

pub enum Status {
    Success,
    VerificationFailed,
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Family { kind, mu, psi, out } => cmd_family(kind.into(), mu, &psi, &out),
        Command::Solve { mu, gamma, discriminant, psi, out } => cmd_solve(mu, gamma, discriminant, &psi, &out),
        Command::Sweep { kind, mu, points, psi, out } => cmd_sweep(kind.into(), mu, points, &psi, &out),
        Command::Posterior { kind, mu, y, interval, psi, out } => {
            cmd_posterior(kind.into(), mu, &y, interval.as_deref(), &psi, &out)
        }
        Command::Verify { seed, n, random, tamper, psi, out } => cmd_verify(seed, n, random, tamper, &psi, &out),
    }
}

fn format(out: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("format {f:?} is not available for this command");
    }
    Ok(f)
}

fn transfer_text(t: &TransferMatrix) -> String {
    format!("[[{}, {}], [{}, {}]]", fixed(t.a), fixed(t.b), fixed(t.c), fixed(t.d))
}

fn state_text(s: &GaussianState) -> String {
    format!(
        "mean_q={} mean_p={} sigma_q={} sigma_p={}",
        fixed(s.mean_q),
        fixed(s.mean_p),
        fixed(s.sigma_q),
        fixed(s.sigma_p)
    )
}

fn report_rows(t: &mut Table, r: &ErrorDisturbanceReport) {
    t.num("epsilon_q", r.epsilon_q)
        .num("epsilon_q^2", r.epsilon_q * r.epsilon_q)
        .num("eta_p", r.eta_p)
        .num("eta_p^2", r.eta_p * r.eta_p)
        .num("eta_q", r.eta_q)
        .num("sigma_q1", r.sigma_q1)
        .num("sigma_p1", r.sigma_p1)
        .num("edr_lhs", r.edr_lhs)
        .num("edr_bound", r.edr_bound)
        .num("heisenberg_product", r.heisenberg_product)
        .row("saturated", r.saturated);
}

#[derive(Serialize)]
struct MeasurementOut {
    params: InteractionParams,
    tau: f64,
    discriminant: f64,
    transfer: TransferMatrix,
    probe: GaussianState,
    report: ErrorDisturbanceReport,
    optimal: bool,
}

impl MeasurementOut {
    fn new(m: &LinearPositionMeasurement, psi: &GaussianState, consts: &Constants) -> Self {
        Self {
            params: m.params,
            tau: m.tau,
            discriminant: m.params.discriminant(),
            transfer: m.transfer(),
            probe: m.probe,
            report: edr_report(m, psi, consts),
            optimal: is_minimum_error_disturbance(m, psi, consts, THEOREM_TOL),
        }
    }

    fn rows(&self, t: &mut Table) {
        t.num("alpha", self.params.alpha)
            .num("beta", self.params.beta)
            .num("gamma", self.params.gamma)
            .num("tau", self.tau)
            .num("D", self.discriminant)
            .row("transfer", transfer_text(&self.transfer))
            .row("probe", state_text(&self.probe));
        report_rows(t, &self.report);
        t.row("optimal", self.optimal);
    }
}

fn cmd_family(kind: FamilyKind, mu: f64, psi_args: &PsiArgs, out: &OutputArgs) -> Result<Status> {
    let fmt = format(out, Format::Text, &[Format::Text, Format::Json])?;
    let (consts, psi) = psi_args.resolve()?;
    let m = family(kind, mu, &psi, &consts).with_context(|| format!("family {kind} at mu={mu}"))?;
    let body = MeasurementOut::new(&m, &psi, &consts);
    let text = match fmt {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                kind: String,
                mu: f64,
                psi: GaussianState,
                hbar: f64,
                #[serde(flatten)]
                measurement: &'a MeasurementOut,
            }
            json(&Doc { kind: kind.to_string(), mu, psi, hbar: consts.hbar, measurement: &body })?
        }
        _ => {
            let mut t = Table::default();
            t.row("family", kind).num("mu", mu).row("psi", state_text(&psi));
            body.rows(&mut t);
            t.finish()
        }
    };
    emit(out, &text)?;
    Ok(Status::Success)
}

fn cmd_solve(mu: f64, gamma: f64, discriminant: f64, psi_args: &PsiArgs, out: &OutputArgs) -> Result<Status> {
    let fmt = format(out, Format::Text, &[Format::Text, Format::Json])?;
    let (consts, psi) = psi_args.resolve()?;
    let solution = solve_params(&SolverInput::new(mu, gamma, discriminant)?)?;
    let m = solution.measurement(mu, &psi, &consts)?;
    let body = MeasurementOut::new(&m, &psi, &consts);
    let text = match fmt {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                mu: f64,
                solution: SolverOutput,
                #[serde(flatten)]
                measurement: &'a MeasurementOut,
            }
            json(&Doc { mu, solution, measurement: &body })?
        }
        _ => {
            let mut t = Table::default();
            t.num("mu", mu).row("regime", solution.regime);
            body.rows(&mut t);
            t.row("residual", format!("{:.3e}", solution.residual));
            t.finish()
        }
    };
    emit(out, &text)?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct SweepRow {
    mu: f64,
    epsilon_q: f64,
    eta_p: f64,
    eta_q: f64,
    sigma_q1: f64,
    sigma_p1: f64,
    edr_lhs: f64,
    heisenberg_product: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    tau: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    #[serde(rename = "D")]
    discriminant: f64,
}

const SWEEP_COLUMNS: [&str; 17] = [
    "mu",
    "epsilon_q",
    "eta_p",
    "eta_q",
    "sigma_q1",
    "sigma_p1",
    "edr_lhs",
    "heisenberg_product",
    "a",
    "b",
    "c",
    "d",
    "tau",
    "alpha",
    "beta",
    "gamma",
    "D",
];

impl SweepRow {
    fn values(&self) -> [f64; 17] {
        [
            self.mu,
            self.epsilon_q,
            self.eta_p,
            self.eta_q,
            self.sigma_q1,
            self.sigma_p1,
            self.edr_lhs,
            self.heisenberg_product,
            self.a,
            self.b,
            self.c,
            self.d,
            self.tau,
            self.alpha,
            self.beta,
            self.gamma,
            self.discriminant,
        ]
    }
}

fn sweep_row(kind: FamilyKind, mu: f64, psi: &GaussianState, consts: &Constants) -> Result<SweepRow> {
    let m = family(kind, mu, psi, consts).with_context(|| format!("family {kind} at mu={mu}"))?;
    let r = edr_report(&m, psi, consts);
    let TransferMatrix { a, b, c, d } = m.transfer();
    Ok(SweepRow {
        mu,
        epsilon_q: r.epsilon_q,
        eta_p: r.eta_p,
        eta_q: r.eta_q,
        sigma_q1: r.sigma_q1,
        sigma_p1: r.sigma_p1,
        edr_lhs: r.edr_lhs,
        heisenberg_product: r.heisenberg_product,
        a,
        b,
        c,
        d,
        tau: m.tau,
        alpha: m.params.alpha,
        beta: m.params.beta,
        gamma: m.params.gamma,
        discriminant: m.params.discriminant(),
    })
}

fn cmd_sweep(kind: FamilyKind, mus: Vec<f64>, points: usize, psi_args: &PsiArgs, out: &OutputArgs) -> Result<Status> {
    let fmt = format(out, Format::Csv, &[Format::Csv, Format::Json])?;
    let (consts, psi) = psi_args.resolve()?;
    let grid = if mus.is_empty() {
        if points == 0 {
            bail!("--points must be at least 1");
        }
        (1..=points).map(|i| i as f64 / (points + 1) as f64).collect()
    } else {
        mus
    };
    // Indexed parallel collect keeps grid order.
    let rows = grid.par_iter().map(|&mu| sweep_row(kind, mu, &psi, &consts)).collect::<Result<Vec<_>>>()?;
    let text = match fmt {
        Format::Json => json(&rows)?,
        _ => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(SWEEP_COLUMNS)?;
            for row in &rows {
                w.write_record(row.values().map(exact))?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(out, &text)?;
    Ok(Status::Success)
}

fn parse_interval(s: &str) -> Result<Interval> {
    let (lo, hi) = s.split_once(':').with_context(|| format!("interval '{s}' is not of the form lo:hi"))?;
    let parse = |x: &str| x.trim().parse::<f64>().with_context(|| format!("bad interval end '{x}'"));
    Ok(Interval::new(parse(lo)?, parse(hi)?)?)
}

fn cmd_posterior(
    kind: FamilyKind,
    mu: f64,
    ys: &[f64],
    interval: Option<&str>,
    psi_args: &PsiArgs,
    out: &OutputArgs,
) -> Result<Status> {
    format(out, Format::Json, &[Format::Json])?;
    let (consts, psi) = psi_args.resolve()?;
    let m = family(kind, mu, &psi, &consts)?;
    let fam = posterior_family(&m, &psi, &consts)?;
    let text = if let Some(bounds) = interval {
        #[derive(Serialize)]
        struct Doc<'a> {
            kind: String,
            mu: f64,
            interval: &'a str,
            #[serde(flatten)]
            moments: MixtureMoments,
        }
        let moments = mixture_moments(&m, &psi, &consts, &parse_interval(bounds)?)?;
        json(&Doc { kind: kind.to_string(), mu, interval: bounds, moments })?
    } else {
        #[derive(Serialize)]
        struct Member {
            y: f64,
            #[serde(flatten)]
            state: GaussianState,
        }
        #[derive(Serialize)]
        struct Doc {
            kind: String,
            mu: f64,
            slope: f64,
            reading_mean: f64,
            reading_variance: f64,
            uncertainty_product: f64,
            states: Vec<Member>,
        }
        json(&Doc {
            kind: kind.to_string(),
            mu,
            slope: fam.slope,
            reading_mean: fam.weight.mean,
            reading_variance: fam.weight.variance,
            uncertainty_product: fam.uncertainty_product(),
            states: ys.iter().map(|&y| Member { y, state: fam.state(y) }).collect(),
        })?
    };
    emit(out, &text)?;
    Ok(Status::Success)
}

fn cmd_verify(
    seed: u64,
    n: usize,
    random: usize,
    tamper: Option<f64>,
    psi_args: &PsiArgs,
    out: &OutputArgs,
) -> Result<Status> {
    let fmt = format(out, Format::Text, &[Format::Text, Format::Json])?;
    let (consts, psi) = psi_args.resolve()?;
    let cfg = VerifyConfig { seed, n, random_measurements: random, tamper, ..VerifyConfig::new(psi) };
    let summary = run_verification(&cfg, &consts)?;
    let text = match fmt {
        Format::Json => json(&summary)?,
        _ => {
            let mut s = format!("{:<20} {:>7} {:>7} {:>9}\n", "quantity", "checks", "passed", "max |z|");
            let mut quantities: Vec<&str> = Vec::new();
            for row in &summary.rows {
                if !quantities.contains(&row.quantity) {
                    quantities.push(row.quantity);
                }
            }
            for q in quantities {
                let rows: Vec<_> = summary.rows.iter().filter(|r| r.quantity == q).collect();
                let passed = rows.iter().filter(|r| r.pass).count();
                let max_z = rows
                    .iter()
                    .filter(|r| r.std_error > 0.0)
                    .map(|r| (r.estimate - r.analytic).abs() / r.std_error)
                    .fold(0.0, f64::max);
                s += &format!("{q:<20} {:>7} {passed:>7} {max_z:>9.3}\n", rows.len());
            }
            for r in summary.failures() {
                s += &format!(
                    "FAIL {} {}: analytic {} estimate {} (se {})\n",
                    r.case,
                    r.quantity,
                    exact(r.analytic),
                    exact(r.estimate),
                    exact(r.std_error)
                );
            }
            let failed = summary.failures().count();
            s += &format!(
                "{} of {} checks passed (seed {seed}, n {n}){}\n",
                summary.rows.len() - failed,
                summary.rows.len(),
                if failed == 0 { "" } else { ": FAILED" }
            );
            s
        }
    };
    emit(out, &text)?;
    Ok(if summary.passed() { Status::Success } else { Status::VerificationFailed })
}
