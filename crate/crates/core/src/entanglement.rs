//! Concurrence, three-tangle, generalized geometric measure and a sampled
//! convex-roof upper bound for the tangle of mixed states.
//!
//! Concurrence is evaluated from a pure-state ensemble `{v_k}` of the
//! two-qubit state: the matrix `t_kl = v_k^T (σ_y⊗σ_y) v_l` has singular
//! values equal to the square roots of the eigenvalues of `ρρ̃`. For a rank-2
//! ensemble the squared concurrence is `‖t‖² − 2|det t|`, which needs no
//! square root of a near-zero eigenvalue.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmath::{check_density, eig2, hermitian_eigen, ComplexMatrix, Party, Subsystem, C64};
use crate::rng::{Domain, RngSeed};
use crate::states::{haar_isometry, FamilyParams, PureState3};

/// Eigenvalues below this are dropped when building ensembles from a
/// density matrix.
const ENSEMBLE_FLOOR: f64 = 1e-14;

/// Negative CKW residues down to this size are floating-point noise.
const TANGLE_NEG_TOL: f64 = 1e-10;

/// Tie width when comparing marginal maxima for the GGM split.
pub const SPLIT_TIE_TOL: f64 = 1e-12;

pub const DEFAULT_ROOF_TRIALS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangleBreakdown {
    pub c2_a_bc: f64,
    pub c2_ab: f64,
    pub c2_ac: f64,
    pub tau: f64,
}

/// The bipartition that attains the GGM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    ABc,
    BAc,
    CAb,
}

impl Split {
    pub fn from_party(p: Party) -> Self {
        match p {
            Party::A => Split::ABc,
            Party::B => Split::BAc,
            Party::C => Split::CAb,
        }
    }

    /// The isolated party.
    pub fn party(self) -> Party {
        match self {
            Split::ABc => Party::A,
            Split::BAc => Party::B,
            Split::CAb => Party::C,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Split::ABc => "A:BC",
            Split::BAc => "B:AC",
            Split::CAb => "C:AB",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GgmBreakdown {
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    pub ggm: f64,
    pub split: Split,
}

impl GgmBreakdown {
    fn from_maxima(g_a: f64, g_b: f64, g_c: f64) -> Self {
        let top = g_a.max(g_b).max(g_c);
        let split = if g_a >= top - SPLIT_TIE_TOL {
            Split::ABc
        } else if g_b >= top - SPLIT_TIE_TOL {
            Split::BAc
        } else {
            Split::CAb
        };
        Self { g_a, g_b, g_c, ggm: 1.0 - top, split }
    }

    pub fn maxima(&self) -> [f64; 3] {
        [self.g_a, self.g_b, self.g_c]
    }

    /// True when two marginal maxima agree within [`SPLIT_TIE_TOL`], i.e.
    /// the split label came from tie-breaking.
    pub fn has_tie(&self) -> bool {
        let mut g = self.maxima();
        g.sort_by(|a, b| b.total_cmp(a));
        g[0] - g[1] <= SPLIT_TIE_TOL
    }
}

/// `v^T (σ_y ⊗ σ_y) w` for two-qubit vectors in the `|00>,|01>,|10>,|11>` basis.
#[inline]
fn spin_flip_form(v: &[C64; 4], w: &[C64; 4]) -> C64 {
    -v[0] * w[3] + v[1] * w[2] + v[2] * w[1] - v[3] * w[0]
}

/// Squared concurrence of the two-qubit state `Σ_k |v_k><v_k|`.
fn concurrence_sq_from_ensemble(vs: &[[C64; 4]]) -> f64 {
    match vs.len() {
        0 => 0.0,
        1 => spin_flip_form(&vs[0], &vs[0]).norm_sqr(),
        2 => {
            let t00 = spin_flip_form(&vs[0], &vs[0]);
            let t01 = spin_flip_form(&vs[0], &vs[1]);
            let t11 = spin_flip_form(&vs[1], &vs[1]);
            let frob = t00.norm_sqr() + 2.0 * t01.norm_sqr() + t11.norm_sqr();
            let det = (t00 * t11 - t01 * t01).norm();
            (frob - 2.0 * det).max(0.0)
        }
        n => {
            let t = ComplexMatrix::from_fn(n, |i, j| spin_flip_form(&vs[i], &vs[j]));
            let tt = &t.adjoint() * &t;
            let eig = hermitian_eigen(&tt.hermitian_part()).expect("t^dagger t is Hermitian");
            let sv: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
            let c = sv[0] - sv[1..].iter().sum::<f64>();
            c.max(0.0).powi(2)
        }
    }
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    check_density(rho)?;
    let eig = hermitian_eigen(rho)?;
    if eig.values.iter().any(|&v| v < -crate::qmath::NEG_CLAMP) {
        return Err(Error::MalformedState("negative eigenvalue".into()));
    }
    let vs: Vec<[C64; 4]> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > ENSEMBLE_FLOOR)
        .map(|(k, &p)| {
            let s = p.sqrt();
            let mut v = [C64::new(0.0, 0.0); 4];
            for (i, x) in v.iter_mut().enumerate() {
                *x = eig.vectors[(i, k)] * s;
            }
            v
        })
        .collect();
    Ok(concurrence_sq_from_ensemble(&vs).sqrt().min(1.0))
}

/// The two conditional vectors `<k|_X ψ` (k = 0, 1) of the pair left after
/// projecting party `traced`, in the pair's own `|00>..|11>` basis.
fn pair_ensemble(psi: &PureState3, traced: Party) -> [[C64; 4]; 2] {
    let keep = match traced {
        Party::A => Subsystem::BC,
        Party::B => Subsystem::AC,
        Party::C => Subsystem::AB,
    };
    let mut out = [[C64::new(0.0, 0.0); 4]; 2];
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        let k = (i >> traced.shift()) & 1;
        out[k][keep.local_index(i)] = *amp;
    }
    out
}

/// Squared concurrence of a pair marginal of a pure three-qubit state.
pub fn pair_concurrence_sq(psi: &PureState3, traced: Party) -> f64 {
    concurrence_sq_from_ensemble(&pair_ensemble(psi, traced))
}

/// `4 det ρ_X`, the squared concurrence across `X : rest` for a pure state.
pub fn one_vs_rest_concurrence_sq(psi: &PureState3, party: Party) -> f64 {
    let r = psi.reduced(Subsystem::single(party));
    (4.0 * (r[(0, 0)].re * r[(1, 1)].re - r[(0, 1)].norm_sqr())).max(0.0)
}

/// CKW tangle `C²_{A:BC} − C²_{AB} − C²_{AC}`.
pub fn tangle_pure(psi: &PureState3) -> TangleBreakdown {
    let c2_a_bc = one_vs_rest_concurrence_sq(psi, Party::A);
    let c2_ab = pair_concurrence_sq(psi, Party::C);
    let c2_ac = pair_concurrence_sq(psi, Party::B);
    let raw = c2_a_bc - c2_ab - c2_ac;
    debug_assert!(raw > -1e-8, "CKW residue {raw} for {psi:?}");
    let tau = if raw < 0.0 && raw > -TANGLE_NEG_TOL { 0.0 } else { raw.clamp(0.0, 1.0) };
    TangleBreakdown { c2_a_bc, c2_ab, c2_ac, tau }
}

/// Three-tangle from the Cayley hyperdeterminant, `4 |s₁ − 2 s₂ + 4 s₃|`.
pub fn tangle_hyperdet(psi: &PureState3) -> f64 {
    let a = |i: usize, j: usize, k: usize| psi.amp(i, j, k);
    let sq = |z: C64| z * z;
    let s1 = sq(a(0, 0, 0)) * sq(a(1, 1, 1))
        + sq(a(0, 0, 1)) * sq(a(1, 1, 0))
        + sq(a(0, 1, 0)) * sq(a(1, 0, 1))
        + sq(a(1, 0, 0)) * sq(a(0, 1, 1));
    let p = a(0, 1, 1) * a(1, 0, 0);
    let q = a(1, 0, 1) * a(0, 1, 0);
    let r = a(1, 1, 0) * a(0, 0, 1);
    let s2 = a(0, 0, 0) * a(1, 1, 1) * (p + q + r) + p * (q + r) + q * r;
    let s3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    (4.0 * (s1 - 2.0 * s2 + 4.0 * s3).norm()).min(1.0)
}

/// Closed-form tangle of a state family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedTangle {
    pub tau: f64,
    /// Set for W-class parameters, where the tangle vanishes identically
    /// and no formula is evaluated.
    pub w_class: bool,
}

pub fn tangle_closed(params: &FamilyParams) -> Result<ClosedTangle> {
    params.validate()?;
    let tau = match params {
        FamilyParams::Mbv { m } => {
            let m2 = m * m;
            1.0 - 4.0 * m2 / ((1.0 + m2) * (1.0 + m2))
        }
        FamilyParams::Ghz(p) => {
            let (sa, sb, sg) = (p.alpha.sin(), p.beta.sin(), p.gamma.sin());
            let s2d = (2.0 * p.delta).sin();
            let denom = 1.0 + p.cross_term();
            (sa * sb * sg * s2d).powi(2) / (denom * denom)
        }
        FamilyParams::W(_) => return Ok(ClosedTangle { tau: 0.0, w_class: true }),
    };
    Ok(ClosedTangle { tau, w_class: false })
}

/// Largest eigenvalue of a 2x2 density matrix.
fn largest_eigenvalue2(r: &ComplexMatrix) -> f64 {
    eig2(r[(0, 0)].re, r[(1, 1)].re, r[(0, 1)].norm()).0
}

/// Generalized geometric measure of a pure three-qubit state.
pub fn ggm(psi: &PureState3) -> GgmBreakdown {
    let g = Party::ALL.map(|p| largest_eigenvalue2(&psi.reduced(Subsystem::single(p))));
    GgmBreakdown::from_maxima(g[0], g[1], g[2])
}

pub fn ggm_closed(params: &FamilyParams) -> Result<GgmBreakdown> {
    params.validate()?;
    let top = |disc: f64| 0.5 * (1.0 + disc.max(0.0).sqrt());
    let (ga, gb, gc) = match params {
        FamilyParams::Mbv { m } => (0.5, 0.5 + m / (1.0 + m * m), 0.5),
        FamilyParams::Ghz(p) => {
            let (ca, cb, cg) = (p.alpha.cos(), p.beta.cos(), p.gamma.cos());
            let (sa, sb, sg) = (p.alpha.sin(), p.beta.sin(), p.gamma.sin());
            let s2d2 = (2.0 * p.delta).sin().powi(2);
            let d2 = (1.0 + p.cross_term()).powi(2);
            (
                top(1.0 + sa * sa * (cb * cb * cg * cg - 1.0) * s2d2 / d2),
                top(1.0 + sb * sb * (ca * ca * cg * cg - 1.0) * s2d2 / d2),
                top(1.0 + sg * sg * (ca * ca * cb * cb - 1.0) * s2d2 / d2),
            )
        }
        FamilyParams::W(p) => (
            top(1.0 - 4.0 * (p.a + p.b) * p.c),
            top(1.0 - 4.0 * (p.a + p.c) * p.b),
            top(1.0 - 4.0 * (p.b + p.c) * p.a),
        ),
    };
    Ok(GgmBreakdown::from_maxima(ga, gb, gc))
}

/// Upper bound on the convex-roof tangle of a mixed three-qubit state.
///
/// Trial 0 is the eigen-ensemble; trial `t ≥ 1` mixes the eigen-ensemble
/// with a Haar isometry drawn from stream `t` of `seed`, cycling the
/// ensemble size through `rank..=8`. The result is the minimum average
/// tangle seen, so it can only decrease as `trials` grows.
pub fn tangle_upper_bound(rho: &ComplexMatrix, trials: usize, seed: RngSeed) -> Result<f64> {
    if trials < 1 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    if rho.dim() != 8 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    check_density(rho)?;
    let eig = hermitian_eigen(rho)?;
    if eig.values.iter().any(|&v| v < -crate::qmath::NEG_CLAMP) {
        return Err(Error::MalformedState("negative eigenvalue".into()));
    }
    let weighted: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > ENSEMBLE_FLOOR)
        .map(|(k, &p)| eig.vector(k).into_iter().map(|z| z * p.sqrt()).collect())
        .collect();
    let rank = weighted.len();

    let ensemble_tangle = |vectors: &[Vec<C64>]| -> f64 {
        let total: f64 = vectors.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
        vectors
            .iter()
            .filter_map(|v| {
                let mut amps = [C64::new(0.0, 0.0); 8];
                amps.copy_from_slice(v);
                let w = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
                PureState3::normalized(amps)
                    .ok()
                    .map(|psi| w / total * tangle_hyperdet(&psi))
            })
            .sum()
    };

    let eigen_value = ensemble_tangle(&weighted);
    if rank == 1 || trials == 1 {
        return Ok(eigen_value);
    }
    let sizes = 9 - rank;
    let best = (1..trials as u64)
        .into_par_iter()
        .map(|t| {
            let n = rank + ((t - 1) as usize % sizes);
            let mut stream = seed.stream(Domain::Isometry, t);
            let cols = haar_isometry(&mut stream, n, rank);
            let mixed: Vec<Vec<C64>> = (0..n)
                .map(|k| {
                    let mut v = vec![C64::new(0.0, 0.0); 8];
                    for (i, w) in weighted.iter().enumerate() {
                        let u = cols[i][k];
                        v.iter_mut().zip(w).for_each(|(x, y)| *x += u * y);
                    }
                    v
                })
                .collect();
            ensemble_tangle(&mixed)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(eigen_value.min(best))
}
