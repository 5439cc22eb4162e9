//! Complementarity between tripartite measures and the maximal bipartite
//! CHSH violation.
//!
//! For pure three-qubit states both `τ + ℬ_max ≤ 1` and
//! `4𝒢(1 − 𝒢) + ℬ_max ≤ 1` are expected, with the MBV family
//! `ψ_m` on the boundary.

use rayon::prelude::*;

use crate::bell::{bmax, bmax_mixed, BellRecord, Pair};
use crate::discord::{dms_with, DmsBreakdown, DmsConvention};
use crate::entanglement::{ggm, tangle_pure, tangle_upper_bound, GgmBreakdown, TangleBreakdown};
use crate::error::{Error, Result};
use crate::qmath::ComplexMatrix;
use crate::rng::RngSeed;
use crate::states::{haar_pure, mbv_state, FamilyParams, PureState3};

/// Inequality tolerance for checks that involve no optimization.
pub const CLOSED_TOL: f64 = 1e-9;
/// Tolerance wherever discord optimization enters.
pub const DISCORD_TOL: f64 = 1e-4;
/// Points on the `ψ_m` grid used for the DMS boundary.
pub const DMS_BOUNDARY_POINTS: usize = 2001;
/// Trial multipliers tried when a mixed-state slack comes out negative.
const REFINE_FACTORS: [usize; 2] = [4, 16];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlackRecord {
    /// `1 − τ − ℬ_max`.
    pub tau_slack: f64,
    /// `1 − 4𝒢(1 − 𝒢) − ℬ_max`; absent for mixed states.
    pub ggm_slack: Option<f64>,
    pub state_id: Option<u64>,
}

impl SlackRecord {
    pub fn with_id(self, id: u64) -> Self {
        Self { state_id: Some(id), ..self }
    }

    /// Smallest of the available slacks.
    pub fn min_slack(&self) -> f64 {
        self.ggm_slack.map_or(self.tau_slack, |g| g.min(self.tau_slack))
    }
}

/// Every measure of one pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureRecord {
    pub tangle: TangleBreakdown,
    pub ggm: GgmBreakdown,
    pub bell: BellRecord,
    pub dms: Option<DmsBreakdown>,
}

impl MeasureRecord {
    pub fn slack(&self) -> SlackRecord {
        let g = self.ggm.ggm;
        SlackRecord {
            tau_slack: 1.0 - self.tangle.tau - self.bell.b_max,
            ggm_slack: Some(1.0 - 4.0 * g * (1.0 - g) - self.bell.b_max),
            state_id: None,
        }
    }
}

/// Tangle, GGM and Bell quantities, plus the DMS when a convention is given.
pub fn measure(psi: &PureState3, dms: Option<DmsConvention>) -> Result<MeasureRecord> {
    Ok(MeasureRecord {
        tangle: tangle_pure(psi),
        ggm: ggm(psi),
        bell: bmax(psi),
        dms: dms.map(|conv| dms_with(psi, conv)).transpose()?,
    })
}

pub fn slack(psi: &PureState3) -> SlackRecord {
    let g = ggm(psi).ggm;
    let b = bmax(psi).b_max;
    SlackRecord {
        tau_slack: 1.0 - tangle_pure(psi).tau - b,
        ggm_slack: Some(1.0 - 4.0 * g * (1.0 - g) - b),
        state_id: None,
    }
}

/// Boundary value `ℬ_max(ψ_m) = 1 − τ(ψ_m)`.
pub fn tangle_boundary(tau: f64) -> f64 {
    1.0 - tau
}

/// Boundary value `ℬ_max(ψ_m) = 4(1/2 − 𝒢(ψ_m))²`.
pub fn ggm_boundary(g: f64) -> f64 {
    4.0 * (0.5 - g).powi(2)
}

/// The `m ∈ [0, 1]` with `τ(ψ_m) = tau`.
pub fn partner_m_for_tangle(tau: f64) -> Result<f64> {
    if !(-CLOSED_TOL..=1.0 + CLOSED_TOL).contains(&tau) {
        return Err(Error::Parameter(format!("tangle {tau} outside [0, 1]")));
    }
    let r = tau.clamp(0.0, 1.0).sqrt();
    Ok(((1.0 - r) / (1.0 + r)).sqrt())
}

/// The `m ∈ [0, 1]` with `𝒢(ψ_m) = g`.
pub fn partner_m_for_ggm(g: f64) -> Result<f64> {
    if !(-CLOSED_TOL..=0.5 + CLOSED_TOL).contains(&g) {
        return Err(Error::Parameter(format!("GGM {g} outside [0, 1/2]")));
    }
    let y = (0.5 - g).clamp(0.0, 0.5);
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 - (1.0 - 4.0 * y * y).sqrt()) / (2.0 * y))
}

fn real_ghz(params: &FamilyParams) -> Result<PureState3> {
    match params {
        FamilyParams::Ghz(p) if p.is_real() => params.state(),
        FamilyParams::Ghz(p) => Err(Error::UnsupportedClosedForm(format!(
            "tangle pairing needs phi = 0, got {}",
            p.phi
        ))),
        _ => Err(Error::Parameter("expected GHZ parameters".into())),
    }
}

/// `ℬ_max(ψ_m) ≥ ℬ_max(ψ_GHZ^R)` for the `ψ_m` of equal tangle, using
/// `ℬ_max(ψ_m) = 1 − τ`.
pub fn theorem_tangle_pair(params: &FamilyParams) -> Result<bool> {
    let psi = real_ghz(params)?;
    let tau = tangle_pure(&psi).tau;
    Ok(tangle_boundary(tau) >= bmax(&psi).b_max - CLOSED_TOL)
}

/// Same comparison with the equal-tangle partner `ψ_m` built explicitly.
pub fn theorem_tangle_pair_partner(params: &FamilyParams) -> Result<bool> {
    let psi = real_ghz(params)?;
    let m = partner_m_for_tangle(tangle_pure(&psi).tau)?;
    Ok(bmax(&mbv_state(m)?).b_max >= bmax(&psi).b_max - CLOSED_TOL)
}

/// `ℬ_max(ψ_W) ≤ 1`, which `ψ₁` attains.
pub fn theorem_w_max(params: &FamilyParams) -> Result<bool> {
    match params {
        FamilyParams::W(_) => Ok(bmax(&params.state()?).b_max <= 1.0 + 1e-12),
        _ => Err(Error::Parameter("expected W parameters".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaOutcome {
    Holds,
    Fails,
    /// A violation exists but the GGM split is tied.
    Indeterminate,
}

/// If the GGM is attained across `X:YZ`, only `ρ_YZ` may violate CHSH.
pub fn lemma_split_check(psi: &PureState3, tol: f64) -> LemmaOutcome {
    let bell = bmax(psi);
    let violating: Vec<Pair> = Pair::ALL.into_iter().filter(|&p| bell.m(p) > 1.0 + tol).collect();
    if violating.is_empty() {
        return LemmaOutcome::Holds;
    }
    let g = ggm(psi);
    if g.has_tie() {
        return LemmaOutcome::Indeterminate;
    }
    if violating == [Pair::complement_of(g.split.party())] {
        LemmaOutcome::Holds
    } else {
        LemmaOutcome::Fails
    }
}

/// Checks `ℬ_max(Σ pᵢ ψᵢ) ≤ Σ pᵢ ℬ_max(ψᵢ)` together with the pair-level
/// convexity of `√M` and `ℬ`.
pub fn convexity_chain_check(components: &[(f64, PureState3)], tol: f64) -> Result<bool> {
    if components.is_empty() {
        return Err(Error::Parameter("empty ensemble".into()));
    }
    if components.iter().any(|(w, _)| *w < 0.0) {
        return Err(Error::Parameter("negative weight".into()));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!("weights sum to {total}")));
    }
    let mut rho = ComplexMatrix::zeros(8);
    for (w, psi) in components {
        rho = &rho + &psi.density().scale_real(*w);
    }
    let mixed = bmax_mixed(&rho.hermitian_part())?;
    let pure: Vec<(f64, BellRecord)> = components.iter().map(|(w, psi)| (*w, bmax(psi))).collect();
    let avg = |f: &dyn Fn(&BellRecord) -> f64| pure.iter().map(|(w, r)| w * f(r)).sum::<f64>();
    let mut ok = mixed.b_max <= avg(&|r| r.b_max) + tol;
    for p in Pair::ALL {
        ok &= mixed.m(p).max(0.0).sqrt() <= avg(&|r| r.m(p).max(0.0).sqrt()) + tol;
        ok &= mixed.b(p) <= avg(&|r| r.b(p)) + tol;
    }
    Ok(ok)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedSlack {
    pub record: SlackRecord,
    pub tau_upper: f64,
    pub b_max: f64,
    pub trials_used: usize,
    /// Negative slack survived refinement. This says nothing about the
    /// true tangle, which the bound only majorizes.
    pub inconclusive: bool,
}

/// `1 − τ_ub(ρ) − ℬ_max(ρ)` with the sampled roof bound in place of `τ`.
/// A slack below `-tol` triggers more trials before being reported.
pub fn mixed_claim_check(rho: &ComplexMatrix, trials: usize, seed: RngSeed, tol: f64) -> Result<MixedSlack> {
    let b_max = bmax_mixed(rho)?.b_max;
    let mut trials_used = trials;
    let mut tau_upper = tangle_upper_bound(rho, trials, seed)?;
    for factor in REFINE_FACTORS {
        if 1.0 - tau_upper - b_max >= -tol {
            break;
        }
        trials_used = trials * factor;
        tau_upper = tangle_upper_bound(rho, trials_used, seed)?;
    }
    let tau_slack = 1.0 - tau_upper - b_max;
    Ok(MixedSlack {
        record: SlackRecord { tau_slack, ggm_slack: None, state_id: None },
        tau_upper,
        b_max,
        trials_used,
        inconclusive: tau_slack < -tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrontierMeasure {
    Tangle,
    Ggm,
    Dms,
}

impl FrontierMeasure {
    pub fn label(self) -> &'static str {
        match self {
            FrontierMeasure::Tangle => "tangle",
            FrontierMeasure::Ggm => "ggm",
            FrontierMeasure::Dms => "dms",
        }
    }

    /// Binned range of the measure.
    pub fn range(self) -> (f64, f64) {
        match self {
            FrontierMeasure::Tangle => (0.0, 1.0),
            FrontierMeasure::Ggm => (0.0, 0.5),
            FrontierMeasure::Dms => (-1.0, 1.0),
        }
    }
}

/// `ℬ_max` of `ψ_m` as a function of its DMS, tabulated on an `m` grid.
#[derive(Clone, Debug)]
pub struct DmsBoundary {
    /// `(δ_D, ℬ_max)` sorted by increasing `δ_D`.
    points: Vec<(f64, f64)>,
}

impl DmsBoundary {
    pub fn new(points: usize, convention: DmsConvention) -> Result<Self> {
        if points < 2 {
            return Err(Error::Parameter("boundary grid needs two points".into()));
        }
        let mut pts = (0..points)
            .into_par_iter()
            .map(|k| {
                let psi = mbv_state(k as f64 / (points - 1) as f64)?;
                Ok((dms_with(&psi, convention)?.delta_d, bmax(&psi).b_max))
            })
            .collect::<Result<Vec<_>>>()?;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { points: pts })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// True when `ℬ_max` decreases along increasing `δ_D` up to `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
    }

    /// Interpolated boundary. Below the grid the curve is flat at its
    /// left end; above it, at its right end.
    pub fn value(&self, x: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= x);
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        if x1 == x0 {
            return y0.max(y1);
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Largest absolute segment slope touching `[lo, hi]`.
    pub fn max_slope(&self, lo: f64, hi: f64) -> f64 {
        self.points
            .windows(2)
            .filter(|w| w[1].0 >= lo && w[0].0 <= hi && w[1].0 > w[0].0)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontierBin {
    pub measure_lo: f64,
    pub measure_hi: f64,
    /// `None` for empty bins.
    pub max_b: Option<f64>,
    /// Boundary at the bin center.
    pub mbv_b: f64,
    /// Boundary variation allowance: max slope over the bin times its width.
    pub bin_slack: f64,
    pub count: u64,
}

impl FrontierBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.measure_lo + self.measure_hi)
    }

    /// `max_b − mbv_b − bin_slack`; `None` for empty bins.
    pub fn excess(&self) -> Option<f64> {
        self.max_b.map(|b| b - self.mbv_b - self.bin_slack)
    }
}

/// Boundary curve of one frontier.
#[derive(Clone, Debug)]
pub enum Boundary {
    Tangle,
    Ggm,
    Dms(DmsBoundary),
}

impl Boundary {
    pub fn for_measure(measure: FrontierMeasure, convention: DmsConvention) -> Result<Self> {
        Ok(match measure {
            FrontierMeasure::Tangle => Boundary::Tangle,
            FrontierMeasure::Ggm => Boundary::Ggm,
            FrontierMeasure::Dms => Boundary::Dms(DmsBoundary::new(DMS_BOUNDARY_POINTS, convention)?),
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Boundary::Tangle => tangle_boundary(x),
            Boundary::Ggm => ggm_boundary(x),
            Boundary::Dms(d) => d.value(x),
        }
    }

    /// Largest `|boundary'|` on `[lo, hi]`.
    pub fn max_slope(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Boundary::Tangle => 1.0,
            Boundary::Ggm => 8.0 * (0.5 - lo.min(hi)).abs().max((0.5 - hi.max(lo)).abs()),
            Boundary::Dms(d) => d.max_slope(lo, hi),
        }
    }
}

/// Per-bin running maxima of `ℬ_max` over a measure range.
#[derive(Clone, Debug, PartialEq)]
pub struct Binner {
    lo: f64,
    hi: f64,
    max_b: Vec<Option<f64>>,
    count: Vec<u64>,
}

impl Binner {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Self { lo, hi, max_b: vec![None; bins], count: vec![0; bins] }
    }

    pub fn index(&self, x: f64) -> usize {
        let n = self.count.len();
        let t = ((x - self.lo) / (self.hi - self.lo) * n as f64).floor();
        if t.is_nan() || t < 0.0 {
            0
        } else {
            (t as usize).min(n - 1)
        }
    }

    pub fn push(&mut self, x: f64, b: f64) {
        let k = self.index(x);
        self.count[k] += 1;
        self.max_b[k] = Some(self.max_b[k].map_or(b, |m: f64| m.max(b)));
    }

    pub fn merge(mut self, other: Self) -> Self {
        for k in 0..self.count.len() {
            self.count[k] += other.count[k];
            self.max_b[k] = match (self.max_b[k], other.max_b[k]) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        self
    }

    pub fn finish(self, boundary: &Boundary) -> Vec<FrontierBin> {
        let n = self.count.len();
        let width = (self.hi - self.lo) / n as f64;
        (0..n)
            .map(|k| {
                let lo = self.lo + k as f64 * width;
                let hi = if k + 1 == n { self.hi } else { self.lo + (k + 1) as f64 * width };
                FrontierBin {
                    measure_lo: lo,
                    measure_hi: hi,
                    max_b: self.max_b[k],
                    mbv_b: boundary.value(0.5 * (lo + hi)),
                    bin_slack: boundary.max_slope(lo, hi) * (hi - lo),
                    count: self.count[k],
                }
            })
            .collect()
    }
}

/// Value of `measure` for one state.
pub fn frontier_coordinate(psi: &PureState3, measure: FrontierMeasure, convention: DmsConvention) -> Result<f64> {
    Ok(match measure {
        FrontierMeasure::Tangle => tangle_pure(psi).tau,
        FrontierMeasure::Ggm => ggm(psi).ggm,
        FrontierMeasure::Dms => dms_with(psi, convention)?.delta_d,
    })
}

/// Binned maxima of `ℬ_max` over `samples` Haar states against the MBV boundary.
pub fn frontier_scan(samples: u64, seed: RngSeed, measure: FrontierMeasure, bins: usize) -> Result<Vec<FrontierBin>> {
    frontier_scan_with(samples, seed, measure, bins, DmsConvention::default())
}

pub fn frontier_scan_with(
    samples: u64,
    seed: RngSeed,
    measure: FrontierMeasure,
    bins: usize,
    convention: DmsConvention,
) -> Result<Vec<FrontierBin>> {
    if bins == 0 {
        return Err(Error::Parameter("bins must be at least 1".into()));
    }
    if samples < bins as u64 {
        return Err(Error::Parameter(format!("samples ({samples}) < bins ({bins})")));
    }
    let boundary = Boundary::for_measure(measure, convention)?;
    let (lo, hi) = measure.range();
    let binner = (0..samples)
        .into_par_iter()
        .try_fold(
            || Binner::new(lo, hi, bins),
            |mut acc, i| -> Result<Binner> {
                let psi = haar_pure(seed, i);
                acc.push(frontier_coordinate(&psi, measure, convention)?, bmax(&psi).b_max);
                Ok(acc)
            },
        )
        .try_reduce(|| Binner::new(lo, hi, bins), |a, b| Ok(a.merge(b)))?;
    Ok(binner.finish(&boundary))
}
