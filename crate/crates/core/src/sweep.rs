//! Deterministic parallel sweeps with CSV output.
//!
//! Every sample is a pure function of `(seed, index)`. Work is cut into
//! fixed-size chunks that are evaluated in parallel and written in index
//! order, so the bytes written do not depend on the worker count.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::bell::{bmax, bell_m_closed, eigen_ordering_holds, nogo_check, Pair};
use crate::complementarity::{
    convexity_chain_check, lemma_split_check, measure, mixed_claim_check, slack, theorem_tangle_pair,
    theorem_tangle_pair_partner, theorem_w_max, FrontierBin, FrontierMeasure, LemmaOutcome, MeasureRecord,
};
use crate::discord::{dms_with, DmsConvention};
use crate::entanglement::{ggm, ggm_closed, tangle_closed, tangle_pure, DEFAULT_ROOF_TRIALS};
use crate::error::Error;
use crate::rng::{Domain, RngSeed};
use crate::states::{haar_pure, induced_mixed, sample_ghz_params, sample_w_params, FamilyParams, GhzParams, PureState3, WParams};

pub const SCHEMA_VERSION: u32 = 1;
const CHUNK: u64 = 4096;
/// Tolerance for negative mixed-state slack before refinement.
pub const MIXED_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Core(#[from] Error),
}

pub type SweepResult<T> = std::result::Result<T, SweepError>;

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> SweepResult<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    Ok(pool.install(f))
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_writer<W: Write>(mut out: W, comment: &str) -> SweepResult<csv::Writer<W>> {
    writeln!(out, "# schema_version={SCHEMA_VERSION} {comment}")?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out))
}

fn chunks(samples: u64) -> impl Iterator<Item = std::ops::Range<u64>> {
    (0..samples.div_ceil(CHUNK)).map(move |k| k * CHUNK..((k + 1) * CHUNK).min(samples))
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub samples: u64,
    pub seed: RngSeed,
    pub tol: f64,
    pub dms: Option<DmsConvention>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: u64,
    pub header: Vec<String>,
    pub row: Vec<String>,
    pub state: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub rows: u64,
    pub min_tau_slack: f64,
    pub min_ggm_slack: f64,
    pub violation: Option<Violation>,
}

pub fn scan_header(dms: bool) -> Vec<String> {
    let mut h = vec!["index", "tau", "ggm", "ggm_split"];
    if dms {
        h.push("dms");
    }
    h.extend(["m_ab", "m_bc", "m_ac", "b_max", "violating_pair", "tau_slack", "ggm_slack"]);
    h.into_iter().map(String::from).collect()
}

fn scan_row(index: u64, rec: &MeasureRecord) -> Vec<String> {
    let s = rec.slack();
    let mut row = vec![
        index.to_string(),
        fmt_f64(rec.tangle.tau),
        fmt_f64(rec.ggm.ggm),
        rec.ggm.split.label().to_string(),
    ];
    if let Some(d) = rec.dms {
        row.push(fmt_f64(d.delta_d));
    }
    row.extend([
        fmt_f64(rec.bell.m_ab),
        fmt_f64(rec.bell.m_bc),
        fmt_f64(rec.bell.m_ac),
        fmt_f64(rec.bell.b_max),
        rec.bell.pair_label().to_string(),
        fmt_f64(s.tau_slack),
        fmt_opt(s.ggm_slack),
    ]);
    row
}

/// Writes one row per Haar sample. Stops after the first row whose slack
/// is below `-tol`, reporting it as a violation.
pub fn write_scan<W: Write>(out: W, opts: &ScanOptions) -> SweepResult<ScanSummary> {
    let dms_label = opts.dms.map_or("none", DmsConvention::label);
    let comment = format!("kind=scan seed={} samples={} dms={dms_label}", opts.seed.0, opts.samples);
    let mut w = csv_writer(out, &comment)?;
    let header = scan_header(opts.dms.is_some());
    w.write_record(&header)?;
    let mut summary = ScanSummary {
        rows: 0,
        min_tau_slack: f64::INFINITY,
        min_ggm_slack: f64::INFINITY,
        violation: None,
    };
    for range in chunks(opts.samples) {
        let recs = range
            .into_par_iter()
            .map(|i| {
                let psi = haar_pure(opts.seed, i);
                measure(&psi, opts.dms).map(|r| (i, psi, r))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for (i, psi, rec) in recs {
            let row = scan_row(i, &rec);
            w.write_record(&row)?;
            summary.rows += 1;
            let s = rec.slack();
            summary.min_tau_slack = summary.min_tau_slack.min(s.tau_slack);
            summary.min_ggm_slack = summary.min_ggm_slack.min(s.ggm_slack.unwrap_or(f64::INFINITY));
            if s.min_slack() < -opts.tol {
                summary.violation = Some(Violation { index: i, header, row, state: psi.serialize() });
                w.flush()?;
                return Ok(summary);
            }
        }
    }
    w.flush()?;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Mbv,
    GhzReal,
    Ghz,
    W,
}

impl FamilyKind {
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::Mbv => "mbv",
            FamilyKind::GhzReal => "ghzr",
            FamilyKind::Ghz => "ghz",
            FamilyKind::W => "w",
        }
    }

    pub fn default_grid(self) -> usize {
        match self {
            FamilyKind::Mbv => 101,
            FamilyKind::GhzReal => 8,
            FamilyKind::Ghz => 5,
            FamilyKind::W => 30,
        }
    }
}

/// Uniform grid over a family's parameter domain with `n` points per axis.
///
/// Half-open angle ranges `(0, hi]` use `hi·k/n` for `k = 1..=n`; the phase
/// uses `2πk/n` for `k = 0..n`; W weights use `k/n` with all three positive
/// and summing to at most 1.
pub fn family_grid(kind: FamilyKind, n: usize) -> Result<Vec<FamilyParams>, Error> {
    if n == 0 || (kind == FamilyKind::Mbv && n < 2) || (kind == FamilyKind::W && n < 3) {
        return Err(Error::Parameter(format!("grid of {n} points is too small for {}", kind.label())));
    }
    let axis = |hi: f64| (1..=n).map(move |k| hi * k as f64 / n as f64);
    let mut out = Vec::new();
    match kind {
        FamilyKind::Mbv => out.extend((0..n).map(|k| FamilyParams::Mbv { m: k as f64 / (n - 1) as f64 })),
        FamilyKind::GhzReal | FamilyKind::Ghz => {
            let phases: Vec<f64> = if kind == FamilyKind::Ghz {
                (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
            } else {
                vec![0.0]
            };
            for alpha in axis(FRAC_PI_2) {
                for beta in axis(FRAC_PI_2) {
                    for gamma in axis(FRAC_PI_2) {
                        for delta in axis(FRAC_PI_4) {
                            for &phi in &phases {
                                out.push(FamilyParams::Ghz(GhzParams { alpha, beta, gamma, delta, phi }));
                            }
                        }
                    }
                }
            }
        }
        FamilyKind::W => {
            for i in 1..n {
                for j in 1..n - i {
                    for k in 1..=n - i - j {
                        let f = |x: usize| x as f64 / n as f64;
                        out.push(FamilyParams::W(WParams { a: f(i), b: f(j), c: f(k) }));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Family CSV columns; `dms` appends the discord monogamy score.
pub fn family_header(dms: bool) -> Vec<String> {
    let mut h = vec!["family", "m", "alpha", "beta", "gamma", "delta", "phi", "a", "b", "c"];
    h.extend(["tau", "tau_closed", "tau_diff", "ggm", "ggm_closed", "ggm_diff", "g_max_diff"]);
    h.extend(["m_ab", "m_ab_closed", "m_ab_diff", "m_bc", "m_bc_closed", "m_bc_diff"]);
    h.extend(["m_ac", "m_ac_closed", "m_ac_diff", "b_max", "tau_plus_b_minus_1", "ordering_ok"]);
    if dms {
        h.push("dms");
    }
    h.into_iter().map(String::from).collect()
}

/// Numeric and closed-form values for one family member.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRow {
    pub params: FamilyParams,
    pub tau: f64,
    pub tau_diff: f64,
    pub ggm_diff: f64,
    pub g_max_diff: f64,
    /// `None` where no closed form exists.
    pub m_diff: Option<f64>,
    pub mbv_residual: f64,
    pub ordering_ok: Option<bool>,
    pub fields: Vec<String>,
}

fn family_row(params: FamilyParams, dms: Option<DmsConvention>) -> Result<FamilyRow, Error> {
    let psi = params.state()?;
    let tau = tangle_pure(&psi).tau;
    let tau_closed = tangle_closed(&params)?.tau;
    let g = ggm(&psi);
    let gc = ggm_closed(&params)?;
    let g_max_diff = g
        .maxima()
        .iter()
        .zip(gc.maxima())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let bell = bmax(&psi);
    let closed_m: Option<Vec<f64>> = Pair::ALL.iter().map(|&p| bell_m_closed(&params, p).ok()).collect();
    let ordering_ok = match params {
        FamilyParams::Mbv { .. } => None,
        FamilyParams::Ghz(p) if !p.is_real() => None,
        _ => Some(
            Pair::ALL
                .iter()
                .map(|&p| eigen_ordering_holds(&params, p, 1e-10))
                .collect::<Result<Vec<bool>, Error>>()?
                .into_iter()
                .all(|x| x),
        ),
    };
    let mbv_residual = (tau + bell.b_max - 1.0).abs();

    let blank = String::new;
    let mut fields = vec![params_label(&params).to_string()];
    let (m, ghz, w) = match params {
        FamilyParams::Mbv { m } => (Some(m), None, None),
        FamilyParams::Ghz(p) => (None, Some(p), None),
        FamilyParams::W(p) => (None, None, Some(p)),
    };
    fields.push(fmt_opt(m));
    match ghz {
        Some(p) => fields.extend([p.alpha, p.beta, p.gamma, p.delta, p.phi].map(fmt_f64)),
        None => fields.extend(std::iter::repeat_with(blank).take(5)),
    }
    match w {
        Some(p) => fields.extend([p.a, p.b, p.c].map(fmt_f64)),
        None => fields.extend(std::iter::repeat_with(blank).take(3)),
    }
    fields.extend([tau, tau_closed, (tau - tau_closed).abs()].map(fmt_f64));
    fields.extend([g.ggm, gc.ggm, (g.ggm - gc.ggm).abs(), g_max_diff].map(fmt_f64));
    let mut m_diff: Option<f64> = closed_m.as_ref().map(|_| 0.0);
    for (k, &p) in Pair::ALL.iter().enumerate() {
        fields.push(fmt_f64(bell.m(p)));
        match &closed_m {
            Some(c) => {
                let d = (bell.m(p) - c[k]).abs();
                m_diff = m_diff.map(|x| x.max(d));
                fields.push(fmt_f64(c[k]));
                fields.push(fmt_f64(d));
            }
            None => fields.extend([blank(), blank()]),
        }
    }
    // Header order is AB, BC, AC, which matches `Pair::ALL`.
    fields.push(fmt_f64(bell.b_max));
    fields.push(fmt_f64(tau + bell.b_max - 1.0));
    fields.push(ordering_ok.map_or_else(blank, |b| b.to_string()));
    if let Some(conv) = dms {
        fields.push(fmt_f64(dms_with(&psi, conv)?.delta_d));
    }
    Ok(FamilyRow {
        params,
        tau,
        tau_diff: (tau - tau_closed).abs(),
        ggm_diff: (g.ggm - gc.ggm).abs(),
        g_max_diff,
        m_diff,
        mbv_residual,
        ordering_ok,
        fields,
    })
}

fn params_label(p: &FamilyParams) -> &'static str {
    match p {
        FamilyParams::Mbv { .. } => "mbv",
        FamilyParams::Ghz(g) if g.is_real() => "ghzr",
        FamilyParams::Ghz(_) => "ghz",
        FamilyParams::W(_) => "w",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySummary {
    pub rows: u64,
    pub max_tau_diff: f64,
    pub max_ggm_diff: f64,
    pub max_m_diff: f64,
    pub max_mbv_residual: f64,
    pub ordering_failures: u64,
    /// First row whose closed-form difference exceeds the tolerance.
    pub first_failure: Option<FamilyParams>,
}

impl FamilySummary {
    pub fn is_clean(&self) -> bool {
        self.first_failure.is_none() && self.ordering_failures == 0
    }
}

pub fn write_family<W: Write>(
    out: W,
    kind: FamilyKind,
    grid: usize,
    tol: f64,
    dms: Option<DmsConvention>,
) -> SweepResult<FamilySummary> {
    let params = family_grid(kind, grid)?;
    let dms_label = dms.map_or("none", DmsConvention::label);
    let comment = format!("kind=family family={} grid={grid} dms={dms_label}", kind.label());
    let mut w = csv_writer(out, &comment)?;
    w.write_record(family_header(dms.is_some()))?;
    let mut s = FamilySummary {
        rows: 0,
        max_tau_diff: 0.0,
        max_ggm_diff: 0.0,
        max_m_diff: 0.0,
        max_mbv_residual: 0.0,
        ordering_failures: 0,
        first_failure: None,
    };
    for chunk in params.chunks(CHUNK as usize) {
        let rows = chunk.par_iter().map(|&p| family_row(p, dms)).collect::<Result<Vec<_>, Error>>()?;
        for r in rows {
            w.write_record(&r.fields)?;
            s.rows += 1;
            s.max_tau_diff = s.max_tau_diff.max(r.tau_diff);
            s.max_ggm_diff = s.max_ggm_diff.max(r.ggm_diff.max(r.g_max_diff));
            s.max_m_diff = s.max_m_diff.max(r.m_diff.unwrap_or(0.0));
            if kind == FamilyKind::Mbv {
                s.max_mbv_residual = s.max_mbv_residual.max(r.mbv_residual);
            }
            if r.ordering_ok == Some(false) {
                s.ordering_failures += 1;
            }
            let worst = r.tau_diff.max(r.ggm_diff).max(r.g_max_diff).max(r.m_diff.unwrap_or(0.0));
            let mbv_bad = kind == FamilyKind::Mbv && r.mbv_residual > tol;
            if (worst > tol || mbv_bad) && s.first_failure.is_none() {
                s.first_failure = Some(r.params);
            }
        }
    }
    w.flush()?;
    Ok(s)
}

pub fn frontier_header() -> Vec<String> {
    ["bin_lo", "bin_hi", "count", "max_b", "mbv_b", "excess", "bin_slack"]
        .into_iter()
        .map(String::from)
        .collect()
}

pub fn write_frontier<W: Write>(
    out: W,
    bins: &[FrontierBin],
    measure: FrontierMeasure,
    samples: u64,
    seed: RngSeed,
) -> SweepResult<()> {
    let comment = format!("kind=frontier measure={} seed={} samples={samples}", measure.label(), seed.0);
    let mut w = csv_writer(out, &comment)?;
    w.write_record(frontier_header())?;
    for b in bins {
        w.write_record([
            fmt_f64(b.measure_lo),
            fmt_f64(b.measure_hi),
            b.count.to_string(),
            fmt_opt(b.max_b),
            fmt_f64(b.mbv_b),
            fmt_opt(b.excess()),
            fmt_f64(b.bin_slack),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pass/fail/indeterminate counts of one verification check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckTally {
    pub name: String,
    pub pass: u64,
    pub fail: u64,
    pub indeterminate: u64,
    /// Serialized first failing case, in draw order.
    pub counterexample: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

impl From<LemmaOutcome> for Outcome {
    fn from(o: LemmaOutcome) -> Self {
        match o {
            LemmaOutcome::Holds => Outcome::Pass,
            LemmaOutcome::Fails => Outcome::Fail,
            LemmaOutcome::Indeterminate => Outcome::Indeterminate,
        }
    }
}

/// Evaluates `check` on draws `0..n` in parallel and tallies in draw order.
pub fn tally<F>(name: &str, n: u64, check: F) -> Result<CheckTally, Error>
where
    F: Fn(u64) -> Result<(Outcome, String), Error> + Sync,
{
    let outcomes = (0..n).into_par_iter().map(&check).collect::<Result<Vec<_>, Error>>()?;
    let mut t = CheckTally {
        name: name.to_string(),
        pass: 0,
        fail: 0,
        indeterminate: 0,
        counterexample: None,
    };
    for (i, (o, what)) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => t.pass += 1,
            Outcome::Indeterminate => t.indeterminate += 1,
            Outcome::Fail => {
                t.fail += 1;
                if t.counterexample.is_none() {
                    t.counterexample = Some(format!("draw {i}: {what}"));
                }
            }
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckTally>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.checks.iter().all(|c| c.fail == 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = format!("{:<width$}  {:>8}  {:>8}  {:>13}\n", "check", "pass", "fail", "indeterminate");
        for c in &self.checks {
            let _ = writeln!(s, "{:<width$}  {:>8}  {:>8}  {:>13}", c.name, c.pass, c.fail, c.indeterminate);
        }
        for c in self.checks.iter().filter(|c| c.counterexample.is_some()) {
            let _ = writeln!(s, "counterexample [{}] {}", c.name, c.counterexample.as_deref().unwrap_or(""));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Draws per pure-state suite; ensemble and mixed suites use a tenth.
    pub samples: u64,
    pub seed: RngSeed,
    pub tol: f64,
    pub roof_trials: usize,
}

impl VerifyOptions {
    pub fn new(samples: u64, seed: RngSeed, tol: f64) -> Self {
        Self { samples, seed, tol, roof_trials: DEFAULT_ROOF_TRIALS }
    }
}

fn describe(params: &FamilyParams) -> String {
    let state = params.state().map(|s| s.serialize()).unwrap_or_default();
    format!("{params:?} state={state}")
}

/// Draw `i` of the real GHZ suite.
pub fn verify_ghzr_draw(seed: RngSeed, i: u64) -> FamilyParams {
    FamilyParams::Ghz(sample_ghz_params(&mut seed.derive(1).stream(Domain::Family, i), true))
}

/// Draw `i` of the W suite.
pub fn verify_w_draw(seed: RngSeed, i: u64) -> FamilyParams {
    FamilyParams::W(sample_w_params(&mut seed.derive(2).stream(Domain::Family, i)))
}

/// Draw `i` of the ensemble suite: 2 to 4 Haar components with random weights.
pub fn verify_ensemble_draw(seed: RngSeed, i: u64) -> Vec<(f64, PureState3)> {
    let mut s = seed.stream(Domain::Ensemble, i);
    let n = 2 + (s.uniform() * 3.0) as usize;
    let mut w: Vec<f64> = (0..n).map(|_| s.uniform() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let sub = seed.derive(3 + i);
    w.into_iter().enumerate().map(|(k, x)| (x, haar_pure(sub, k as u64))).collect()
}

/// Environment dimension of draw `i` of the mixed suite.
pub fn verify_mixed_rank(i: u64) -> usize {
    [2, 4, 8][(i % 3) as usize]
}

/// Runs every verification suite.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport, Error> {
    let n = opts.samples;
    let small = (n / 10).max(1);
    let (seed, tol) = (opts.seed, opts.tol);
    let mut checks = Vec::new();
    checks.push(tally("theorem_tangle_pair", n, |i| {
        let p = verify_ghzr_draw(seed, i);
        Ok((theorem_tangle_pair(&p)?.into(), describe(&p)))
    })?);
    checks.push(tally("theorem_tangle_pair_partner", n, |i| {
        let p = verify_ghzr_draw(seed, i);
        Ok(((theorem_tangle_pair_partner(&p)? == theorem_tangle_pair(&p)?).into(), describe(&p)))
    })?);
    checks.push(tally("theorem_w_max", n, |i| {
        let p = verify_w_draw(seed, i);
        Ok((theorem_w_max(&p)?.into(), describe(&p)))
    })?);
    checks.push(tally("lemma_split_ghzr", n, |i| {
        let p = verify_ghzr_draw(seed, i);
        Ok((lemma_split_check(&p.state()?, tol).into(), describe(&p)))
    })?);
    checks.push(tally("lemma_split_w", n, |i| {
        let p = verify_w_draw(seed, i);
        Ok((lemma_split_check(&p.state()?, tol).into(), describe(&p)))
    })?);
    checks.push(tally("lemma_split_haar", n, |i| {
        let psi = haar_pure(seed, i);
        Ok((lemma_split_check(&psi, tol).into(), psi.serialize()))
    })?);
    checks.push(tally("nogo_check", n, |i| {
        let psi = haar_pure(seed, i);
        Ok((nogo_check(&psi, tol).into(), psi.serialize()))
    })?);
    checks.push(tally("tau_complementarity", n, |i| {
        let psi = haar_pure(seed, i);
        Ok(((slack(&psi).tau_slack >= -tol).into(), psi.serialize()))
    })?);
    checks.push(tally("ggm_complementarity", n, |i| {
        let psi = haar_pure(seed, i);
        Ok(((slack(&psi).ggm_slack.unwrap_or(0.0) >= -tol).into(), psi.serialize()))
    })?);
    checks.push(tally("convexity_chain", small, |i| {
        let comps = verify_ensemble_draw(seed, i);
        let what = comps.iter().map(|(w, s)| format!("{w}*[{}]", s.serialize())).collect::<Vec<_>>().join(" + ");
        Ok((convexity_chain_check(&comps, tol)?.into(), what))
    })?);
    checks.push(tally("mixed_claim", small, |i| {
        let k = verify_mixed_rank(i);
        let rho = induced_mixed(seed, i, k)?;
        let out = mixed_claim_check(&rho, opts.roof_trials, seed.derive(i), MIXED_TOL)?;
        // A negative bound slack is never a counterexample to the claim.
        let o = if out.inconclusive { Outcome::Indeterminate } else { Outcome::Pass };
        Ok((o, format!("induced K={k} index={i}")))
    })?);
    Ok(VerifyReport { checks })
}

/// Pure-state checks for one user-supplied state.
pub fn verify_state(psi: &PureState3, tol: f64) -> VerifyReport {
    let one = |name: &str, o: Outcome| CheckTally {
        name: name.to_string(),
        pass: (o == Outcome::Pass) as u64,
        fail: (o == Outcome::Fail) as u64,
        indeterminate: (o == Outcome::Indeterminate) as u64,
        counterexample: (o == Outcome::Fail).then(|| psi.serialize()),
    };
    let s = slack(psi);
    VerifyReport {
        checks: vec![
            one("lemma_split", lemma_split_check(psi, tol).into()),
            one("nogo_check", nogo_check(psi, tol).into()),
            one("tau_complementarity", (s.tau_slack >= -tol).into()),
            one("ggm_complementarity", (s.ggm_slack.unwrap_or(0.0) >= -tol).into()),
        ],
    }
}
