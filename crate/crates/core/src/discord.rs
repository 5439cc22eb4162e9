//! Quantum discord under rank-one projective measurements and the discord
//! monogamy score.
//!
//! The measured party of a pair is its second qubit unless the
//! [`DmsConvention::MeasureFirst`] convention is chosen.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmath::{c, check_density, entropy2_unnormalized, von_neumann_entropy, ComplexMatrix, Subsystem, C64};
use crate::states::PureState3;

/// Branches with smaller probability contribute nothing.
pub const BRANCH_FLOOR: f64 = 1e-14;
/// Discord values above `-CLAMP_TOL` are clamped at zero.
pub const CLAMP_TOL: f64 = 1e-8;

const GRID_THETA: usize = 24;
const GRID_PHI: usize = 48;
const STARTS: usize = 3;
const SIMPLEX_TOL: f64 = 1e-8;
const MAX_ITER: usize = 2000;

/// Rank-one projector `|v><v|` with `v = (cos θ/2, e^{iφ} sin θ/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementAngles {
    /// Maps any `(θ, φ)` onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)` describing the same projector.
    pub fn normalized(self) -> Self {
        let mut theta = self.theta.rem_euclid(2.0 * PI);
        let mut phi = self.phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self { theta, phi: phi.rem_euclid(2.0 * PI) }
    }

    pub fn vector(self) -> [C64; 2] {
        let (s, co) = (0.5 * self.theta).sin_cos();
        [c(co, 0.0), C64::from_polar(s, self.phi)]
    }
}

/// Which qubit of a pair is measured inside the monogamy score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DmsConvention {
    #[default]
    MeasureSecond,
    MeasureFirst,
}

impl DmsConvention {
    pub fn label(self) -> &'static str {
        match self {
            DmsConvention::MeasureSecond => "measure-second",
            DmsConvention::MeasureFirst => "measure-first",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmsBreakdown {
    pub d_a_bc: f64,
    pub d_ab: f64,
    pub d_ac: f64,
    pub delta_d: f64,
    /// Largest objective spread over the final simplices of the pair optimizations.
    pub optimizer_residual: f64,
}

/// Entries of a two-qubit state needed by the measured conditional entropy.
#[derive(Clone, Copy)]
struct Objective {
    r: [[C64; 4]; 4],
}

impl Objective {
    fn new(rho: &ComplexMatrix) -> Self {
        let mut r = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = rho[(i, j)];
            }
        }
        Self { r }
    }

    /// `Σ_i p_i S(ρ_{A|i})` for the measurement on the second qubit.
    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let r = &self.r;
        let (s, co) = (0.5 * theta).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let (c2, s2, cs) = (co * co, s * s, co * s);
        let a00 = c2 * r[0][0].re + s2 * r[1][1].re + 2.0 * cs * (e * r[0][1]).re;
        let a11 = c2 * r[2][2].re + s2 * r[3][3].re + 2.0 * cs * (e * r[2][3]).re;
        let a01 = r[0][2] * c2 + r[1][3] * s2 + e * r[0][3] * cs + e.conj() * r[1][2] * cs;
        let t00 = r[0][0].re + r[1][1].re;
        let t11 = r[2][2].re + r[3][3].re;
        let t01 = r[0][2] + r[1][3];
        branch(a00, a11, a01.norm()) + branch(t00 - a00, t11 - a11, (t01 - a01).norm())
    }
}

#[inline]
fn branch(a: f64, d: f64, b_abs: f64) -> f64 {
    let p = a + d;
    if p < BRANCH_FLOOR {
        0.0
    } else {
        p * entropy2_unnormalized(a, d, b_abs)
    }
}

struct Minimum {
    value: f64,
    at: [f64; 2],
    spread: f64,
}

/// Nelder-Mead on `R^2`, stopping when the simplex diameter drops below `tol`.
fn nelder_mead(f: impl Fn(f64, f64) -> f64, x0: [f64; 2], step: [f64; 2], tol: f64) -> Minimum {
    let eval = |x: [f64; 2]| (x, f(x[0], x[1]));
    let mut simplex = [
        eval(x0),
        eval([x0[0] + step[0], x0[1]]),
        eval([x0[0], x0[1] + step[1]]),
    ];
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..MAX_ITER {
        simplex.sort_by(|p, q| p.1.total_cmp(&q.1));
        let diameter = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| (simplex[i].0[0] - simplex[j].0[0]).hypot(simplex[i].0[1] - simplex[j].0[1]))
            .fold(0.0, f64::max);
        if diameter < tol {
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = eval(lerp(centroid, worst.0, -1.0));
        if reflected.1 < simplex[0].1 {
            let expanded = eval(lerp(centroid, worst.0, -2.0));
            simplex[2] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[1].1 {
            simplex[2] = reflected;
        } else {
            let contracted = if reflected.1 < worst.1 {
                eval(lerp(centroid, reflected.0, 0.5))
            } else {
                eval(lerp(centroid, worst.0, 0.5))
            };
            if contracted.1 < worst.1.min(reflected.1) {
                simplex[2] = contracted;
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    *v = eval(lerp(best, v.0, 0.5));
                }
            }
        }
    }
    simplex.sort_by(|p, q| p.1.total_cmp(&q.1));
    Minimum {
        value: simplex[0].1,
        at: simplex[0].0,
        spread: simplex[2].1 - simplex[0].1,
    }
}

fn minimize(obj: &Objective) -> Minimum {
    let dt = PI / (GRID_THETA - 1) as f64;
    let dp = 2.0 * PI / GRID_PHI as f64;
    let mut cells: Vec<(f64, [f64; 2])> = Vec::with_capacity(GRID_THETA * GRID_PHI);
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            let x = [i as f64 * dt, j as f64 * dp];
            cells.push((obj.eval(x[0], x[1]), x));
        }
    }
    cells.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut best = Minimum { value: cells[0].0, at: cells[0].1, spread: 0.0 };
    let mut spread: f64 = 0.0;
    for &(_, start) in cells.iter().take(STARTS) {
        let m = nelder_mead(|t, p| obj.eval(t, p), start, [0.5 * dt, 0.5 * dp], SIMPLEX_TOL);
        spread = spread.max(m.spread);
        if m.value < best.value {
            best = Minimum { spread: 0.0, ..m };
        }
    }
    best.spread = spread;
    best
}

fn require_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    check_density(rho)
}

/// Minimal measured conditional entropy `S(ρ_{A|B})` with the second qubit measured.
pub fn conditional_entropy_min(rho: &ComplexMatrix) -> Result<(f64, MeasurementAngles)> {
    require_two_qubit(rho)?;
    let m = minimize(&Objective::new(rho));
    let angles = MeasurementAngles { theta: m.at[0], phi: m.at[1] }.normalized();
    Ok((m.value.max(0.0), angles))
}

/// Measured conditional entropy at fixed angles.
pub fn conditional_entropy(rho: &ComplexMatrix, angles: MeasurementAngles) -> Result<f64> {
    require_two_qubit(rho)?;
    Ok(Objective::new(rho).eval(angles.theta, angles.phi))
}

/// Returns the discord and the final simplex spread of the optimizer.
fn discord_with_residual(rho: &ComplexMatrix) -> Result<(f64, f64)> {
    require_two_qubit(rho)?;
    let m = minimize(&Objective::new(rho));
    let s_b = entropy2_unnormalized(
        rho[(0, 0)].re + rho[(2, 2)].re,
        rho[(1, 1)].re + rho[(3, 3)].re,
        (rho[(0, 1)] + rho[(2, 3)]).norm(),
    );
    let s_ab = von_neumann_entropy(rho)?;
    let d = s_b + m.value.max(0.0) - s_ab;
    let d = if d < 0.0 && d > -CLAMP_TOL { 0.0 } else { d };
    Ok((d, m.spread))
}

/// Discord `D(ρ) = S(ρ_B) + S(ρ_{A|B}) − S(ρ)` with the second qubit measured.
pub fn discord(rho: &ComplexMatrix) -> Result<f64> {
    discord_with_residual(rho).map(|(d, _)| d)
}

/// Exchanges the two qubits of a two-qubit operator.
pub fn swap_qubits(rho: &ComplexMatrix) -> ComplexMatrix {
    const P: [usize; 4] = [0, 2, 1, 3];
    ComplexMatrix::from_fn(rho.dim(), |i, j| rho[(P[i], P[j])])
}

/// `D_{A:BC}` of a pure state, equal to `S(ρ_A)`.
pub fn discord_pure_cut(psi: &PureState3) -> f64 {
    let a = psi.reduced(Subsystem::A);
    entropy2_unnormalized(a[(0, 0)].re, a[(1, 1)].re, a[(0, 1)].norm())
}

/// Discord monogamy score with the default convention.
pub fn dms(psi: &PureState3) -> Result<DmsBreakdown> {
    dms_with(psi, DmsConvention::default())
}

pub fn dms_with(psi: &PureState3, convention: DmsConvention) -> Result<DmsBreakdown> {
    let pair = |s: Subsystem| {
        let rho = psi.reduced(s);
        match convention {
            DmsConvention::MeasureSecond => discord_with_residual(&rho),
            DmsConvention::MeasureFirst => discord_with_residual(&swap_qubits(&rho)),
        }
    };
    let d_a_bc = discord_pure_cut(psi);
    let (d_ab, r_ab) = pair(Subsystem::AB)?;
    let (d_ac, r_ac) = pair(Subsystem::AC)?;
    Ok(DmsBreakdown {
        d_a_bc,
        d_ab,
        d_ac,
        delta_d: d_a_bc - d_ab - d_ac,
        optimizer_residual: r_ab.max(r_ac),
    })
}
