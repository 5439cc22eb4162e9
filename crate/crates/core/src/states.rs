//! Three-qubit state families, Haar sampling and density matrices.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::qmath::{c, tensor_product, ComplexMatrix, Subsystem, C64};
use crate::rng::{Domain, RngSeed, Stream};

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;

/// Pure three-qubit state; amplitude `k` belongs to `|abc>` with `k = 4a + 2b + c`.
#[derive(Clone, Copy, PartialEq)]
pub struct PureState3 {
    amps: [C64; 8],
}

impl fmt::Debug for PureState3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PureState3[{}]", self.serialize())
    }
}

impl PureState3 {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: [C64; 8]) -> Result<Self> {
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::MalformedState(format!(
                "squared norm {n2} differs from 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: [C64; 8]) -> Result<Self> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::MalformedState("zero or non-finite vector".into()));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Ok(Self { amps })
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [c(0.0, 0.0); 8];
        amps[index] = c(1.0, 0.0);
        Self { amps }
    }

    /// `(|000> + |111>)/√2`.
    pub fn ghz() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = [c(0.0, 0.0); 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        Self { amps }
    }

    /// `(|001> + |010> + |100>)/√3`.
    pub fn w() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let mut amps = [c(0.0, 0.0); 8];
        amps[1] = c(s, 0.0);
        amps[2] = c(s, 0.0);
        amps[4] = c(s, 0.0);
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, a: usize, b: usize, cc: usize) -> C64 {
        self.amps[4 * a + 2 * b + cc]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|ψ><ψ|`.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps)
    }

    /// Reduced density matrix computed straight from the amplitudes.
    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(1 << keep.parties().len());
        for i in 0..8 {
            let ti = keep.traced_bits(i);
            let li = keep.local_index(i);
            for j in 0..8 {
                if keep.traced_bits(j) == ti {
                    out[(li, keep.local_index(j))] += self.amps[i] * self.amps[j].conj();
                }
            }
        }
        out
    }

    /// `(U_A ⊗ U_B ⊗ U_C) |ψ>`.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix, uc: &ComplexMatrix) -> Result<Self> {
        let u = tensor_product(&tensor_product(ua, ub)?, uc)?;
        let v = u.apply(&self.amps);
        let mut amps = [c(0.0, 0.0); 8];
        amps.copy_from_slice(&v);
        Self::normalized(amps)
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Full-precision `re:im` list, comma separated, as accepted by the CLI.
    pub fn serialize(&self) -> String {
        self.amps
            .iter()
            .map(|z| format!("{:.17e}:{:.17e}", z.re, z.im))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a comma-separated list of 8 entries, each `re` or `re:im`.
    /// The result must already be normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(Error::Parameter(format!(
                "expected 8 amplitudes, got {}",
                parts.len()
            )));
        }
        let mut amps = [c(0.0, 0.0); 8];
        for (slot, part) in amps.iter_mut().zip(parts) {
            let (re, im) = match part.split_once(':') {
                Some((re, im)) => (re, im),
                None => (part, "0"),
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("bad amplitude '{part}'")))
            };
            *slot = c(parse(re)?, parse(im)?);
        }
        Self::new(amps)
    }
}

/// Parameters of the five-parameter GHZ class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub phi: f64,
}

impl GhzParams {
    /// Real subclass (`phi = 0`).
    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self { alpha, beta, gamma, delta, phi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let half_open = |name: &str, x: f64, hi: f64| {
            if x > 0.0 && x <= hi {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} = {x} outside (0, {hi}]")))
            }
        };
        half_open("alpha", self.alpha, FRAC_PI_2)?;
        half_open("beta", self.beta, FRAC_PI_2)?;
        half_open("gamma", self.gamma, FRAC_PI_2)?;
        half_open("delta", self.delta, FRAC_PI_4)?;
        if !(0.0..2.0 * PI).contains(&self.phi) {
            return Err(Error::Parameter(format!("phi = {} outside [0, 2π)", self.phi)));
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.phi == 0.0
    }

    /// `c_α c_β c_γ c_φ s_2δ`, the cross term in the normalization.
    pub fn cross_term(&self) -> f64 {
        self.alpha.cos() * self.beta.cos() * self.gamma.cos() * self.phi.cos() * (2.0 * self.delta).sin()
    }
}

const W_RESIDUE_TOL: f64 = 1e-14;

/// W-class weights; `a`, `b`, `c` are the populations of `|001>`, `|010>`, `|100>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Parameter(format!("{name} = {x} must be positive")));
            }
        }
        if self.a + self.b + self.c > 1.0 + 1e-12 {
            return Err(Error::Parameter(format!(
                "a + b + c = {} exceeds 1",
                self.a + self.b + self.c
            )));
        }
        Ok(())
    }

    /// Population of `|000>`. Residues of a few ulps from `1 − a − b − c`
    /// are zeroed, since `√d` would blow them up to ~1e-8 amplitudes.
    pub fn d(&self) -> f64 {
        let d = 1.0 - self.a - self.b - self.c;
        if d < W_RESIDUE_TOL {
            0.0
        } else {
            d
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyParams {
    Mbv { m: f64 },
    Ghz(GhzParams),
    W(WParams),
}

impl FamilyParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParams::Mbv { m } => {
                if (0.0..=1.0).contains(m) {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("m = {m} outside [0, 1]")))
                }
            }
            FamilyParams::Ghz(p) => p.validate(),
            FamilyParams::W(p) => p.validate(),
        }
    }

    pub fn state(&self) -> Result<PureState3> {
        match self {
            FamilyParams::Mbv { m } => mbv_state(*m),
            FamilyParams::Ghz(p) => ghz_state(p),
            FamilyParams::W(p) => w_state(p),
        }
    }
}

/// `(|000> + m(|010> + |101>) + |111>) / √(2 + 2m²)`.
pub fn mbv_state(m: f64) -> Result<PureState3> {
    FamilyParams::Mbv { m }.validate()?;
    let n = 1.0 / (2.0 + 2.0 * m * m).sqrt();
    let mut amps = [c(0.0, 0.0); 8];
    amps[0b000] = c(n, 0.0);
    amps[0b010] = c(m * n, 0.0);
    amps[0b101] = c(m * n, 0.0);
    amps[0b111] = c(n, 0.0);
    Ok(PureState3 { amps })
}

/// `√K (c_δ|000> + s_δ e^{iφ} |φ_α>|φ_β>|φ_γ>)` with `|φ_x> = c_x|0> + s_x|1>`.
pub fn ghz_state(p: &GhzParams) -> Result<PureState3> {
    p.validate()?;
    let k = 1.0 / (1.0 + p.cross_term());
    let sk = k.sqrt();
    let branch = c(0.0, p.phi).exp() * p.delta.sin();
    let local = |t: f64| [t.cos(), t.sin()];
    let (va, vb, vg) = (local(p.alpha), local(p.beta), local(p.gamma));
    let mut amps = [c(0.0, 0.0); 8];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let prod = va[(idx >> 2) & 1] * vb[(idx >> 1) & 1] * vg[idx & 1];
        *amp = branch * prod;
    }
    amps[0] += p.delta.cos();
    amps.iter_mut().for_each(|z| *z *= sk);
    Ok(PureState3 { amps })
}

/// `√d|000> + √a|001> + √b|010> + √c|100>`.
pub fn w_state(p: &WParams) -> Result<PureState3> {
    p.validate()?;
    let mut amps = [c(0.0, 0.0); 8];
    amps[0b000] = c(p.d().sqrt(), 0.0);
    amps[0b001] = c(p.a.sqrt(), 0.0);
    amps[0b010] = c(p.b.sqrt(), 0.0);
    amps[0b100] = c(p.c.sqrt(), 0.0);
    // a + b + c may exceed 1 by rounding; renormalize.
    PureState3::normalized(amps)
}

/// Haar-random pure state number `index` of the stream identified by `seed`.
pub fn haar_pure(seed: RngSeed, index: u64) -> PureState3 {
    let mut s = seed.stream(Domain::HaarPure, index);
    haar_pure_from(&mut s)
}

pub fn haar_pure_from(stream: &mut Stream) -> PureState3 {
    loop {
        let mut amps = [c(0.0, 0.0); 8];
        amps.iter_mut().for_each(|z| *z = stream.complex_gaussian());
        if let Ok(psi) = PureState3::normalized(amps) {
            return psi;
        }
    }
}

/// Partial trace over a `k`-dimensional environment of a Haar-random pure
/// state on `8k` dimensions.
pub fn induced_mixed(seed: RngSeed, index: u64, k: usize) -> Result<ComplexMatrix> {
    if !(1..=8).contains(&k) {
        return Err(Error::Parameter(format!("environment dimension {k} outside 1..=8")));
    }
    let mut s = seed.stream(Domain::InducedMixed, index);
    let g: Vec<C64> = (0..8 * k).map(|_| s.complex_gaussian()).collect();
    let mut rho = ComplexMatrix::zeros(8);
    for i in 0..8 {
        for j in 0..8 {
            rho[(i, j)] = (0..k).map(|e| g[i * k + e] * g[j * k + e].conj()).sum();
        }
    }
    let tr = rho.trace().re;
    Ok(rho.scale_real(1.0 / tr).hermitian_part())
}

pub fn density(psi: &PureState3) -> ComplexMatrix {
    psi.density()
}

/// `cols` orthonormal Haar-random vectors of length `rows` (`cols <= rows`).
pub fn haar_isometry(stream: &mut Stream, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    assert!(cols <= rows && cols >= 1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| stream.complex_gaussian()).collect();
        // Two rounds of modified Gram-Schmidt.
        for _ in 0..2 {
            for u in &basis {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|z| *z /= n);
            basis.push(v);
        }
    }
    basis
}

/// Haar-random unitary (columns are a Haar isometry of full size).
pub fn haar_unitary(stream: &mut Stream, dim: usize) -> ComplexMatrix {
    let cols = haar_isometry(stream, dim, dim);
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Uniform draw from the parameter box of the GHZ class; `real` pins `phi = 0`.
pub fn sample_ghz_params(stream: &mut Stream, real: bool) -> GhzParams {
    let mut half_open = |hi: f64| (1.0 - stream.uniform()) * hi;
    let (alpha, beta, gamma) = (half_open(FRAC_PI_2), half_open(FRAC_PI_2), half_open(FRAC_PI_2));
    let delta = half_open(FRAC_PI_4);
    let phi = if real { 0.0 } else { 2.0 * PI * stream.uniform() };
    GhzParams { alpha, beta, gamma, delta, phi }
}

/// Uniform draw of `(a, b, c, d)` from the probability simplex.
pub fn sample_w_params(stream: &mut Stream) -> WParams {
    loop {
        let e: [f64; 4] = std::array::from_fn(|_| -(1.0 - stream.uniform()).ln());
        let total: f64 = e.iter().sum();
        let p = WParams { a: e[0] / total, b: e[1] / total, c: e[2] / total };
        if p.validate().is_ok() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{hermitian_eigenvalues, partial_trace, tensor_product};
    use crate::testutil::test_rng;

    fn assert_close(a: C64, b: f64) {
        assert!((a - c(b, 0.0)).norm() < 1e-15, "{a} vs {b}");
    }

    #[test]
    fn mbv_endpoints() {
        let g = mbv_state(0.0).unwrap();
        for i in 0..8 {
            assert!((g.amplitudes()[i] - PureState3::ghz().amplitudes()[i]).norm() < 1e-15);
        }
        let one = mbv_state(1.0).unwrap();
        for i in [0b000, 0b010, 0b101, 0b111] {
            assert_close(one.amplitudes()[i], 0.5);
        }
        let half = mbv_state(0.5).unwrap();
        assert_close(half.amplitudes()[0], 1.0 / 2.5f64.sqrt());
        assert_close(half.amplitudes()[0b010], 0.5 / 2.5f64.sqrt());
    }

    #[test]
    fn mbv_out_of_range() {
        assert!(matches!(mbv_state(1.5), Err(Error::Parameter(_))));
        assert!(matches!(mbv_state(-0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn mbv_one_factorizes() {
        // ψ₁ = Bell(AC) ⊗ |+>_B.
        let psi = mbv_state(1.0).unwrap();
        let rho = psi.density();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::outer(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        let ac = partial_trace(&rho, Subsystem::AC).unwrap();
        assert!(ac.max_abs_diff(&bell) < 1e-12);
        let plus = ComplexMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        let half_id = ComplexMatrix::identity(2).scale_real(0.5);
        let ab = partial_trace(&rho, Subsystem::AB).unwrap();
        assert!(ab.max_abs_diff(&tensor_product(&half_id, &plus).unwrap()) < 1e-12);
        let a = partial_trace(&rho, Subsystem::A).unwrap();
        assert!(a.max_abs_diff(&half_id) < 1e-12);
    }

    #[test]
    fn ghz_family_reduces_to_ghz() {
        let p = GhzParams::real(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_4);
        let psi = ghz_state(&p).unwrap();
        assert!((psi.inner(&PureState3::ghz()).norm() - 1.0).abs() < 1e-15);

        let flipped = ghz_state(&GhzParams { phi: PI, ..p }).unwrap();
        assert!((flipped.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((flipped.amplitudes()[7] + psi.amplitudes()[7]).norm() < 1e-15);
        assert!((flipped.amplitudes()[0] - psi.amplitudes()[0]).norm() < 1e-15);
    }

    #[test]
    fn ghz_family_is_normalized() {
        let mut rng = test_rng(21);
        for _ in 0..10_000 {
            let p = GhzParams {
                alpha: rng.uniform_in(1e-9, FRAC_PI_2),
                beta: rng.uniform_in(1e-9, FRAC_PI_2),
                gamma: rng.uniform_in(1e-9, FRAC_PI_2),
                delta: rng.uniform_in(1e-9, FRAC_PI_4),
                phi: rng.uniform_in(0.0, 2.0 * PI),
            };
            let psi = ghz_state(&p).unwrap();
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_params_validated() {
        let ok = GhzParams::real(1.0, 1.0, 1.0, 0.5);
        assert!(ok.validate().is_ok());
        assert!(ghz_state(&GhzParams { alpha: 0.0, ..ok }).is_err());
        assert!(ghz_state(&GhzParams { delta: 1.0, ..ok }).is_err());
        assert!(ghz_state(&GhzParams { phi: 2.0 * PI, ..ok }).is_err());
    }

    #[test]
    fn w_family() {
        let third = 1.0 / 3.0;
        let w = w_state(&WParams { a: third, b: third, c: third }).unwrap();
        assert!((w.inner(&PureState3::w()).norm() - 1.0).abs() < 1e-15);

        let q = w_state(&WParams { a: 0.25, b: 0.25, c: 0.25 }).unwrap();
        for i in [0b000, 0b001, 0b010, 0b100] {
            assert_close(q.amplitudes()[i], 0.5);
        }

        let near = w_state(&WParams { a: 1.0 - 2e-9, b: 1e-9, c: 1e-9 }).unwrap();
        assert!((near.amplitudes()[0b001].norm() - 1.0).abs() < 1e-8);

        assert!(w_state(&WParams { a: -0.1, b: 0.5, c: 0.5 }).is_err());
        assert!(w_state(&WParams { a: 0.5, b: 0.5, c: 0.5 }).is_err());
    }

    #[test]
    fn haar_draws_are_normalized_and_reproducible() {
        let seed = RngSeed(99);
        for i in 0..1000 {
            let psi = haar_pure(seed, i);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert_eq!(haar_pure(seed, 17), haar_pure(seed, 17));
        assert_ne!(haar_pure(seed, 17), haar_pure(seed, 18));
    }

    #[test]
    fn haar_first_population_moment() {
        // |c0|^2 ~ Beta(1, 7): mean 1/8, variance 7/(64*9).
        let n = 10_000;
        let seed = RngSeed(2024);
        let mean = (0..n)
            .map(|i| haar_pure(seed, i).amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        let sigma = (7.0 / (64.0 * 9.0) / n as f64).sqrt();
        assert!((mean - 0.125).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn induced_mixed_states() {
        let seed = RngSeed(5);
        let pure = induced_mixed(seed, 0, 1).unwrap();
        let purity = (&pure * &pure).trace().re;
        assert!((purity - 1.0).abs() < 1e-10);

        for i in 0..50 {
            let rho = induced_mixed(seed, i, 8).unwrap();
            let purity = (&rho * &rho).trace().re;
            assert!(purity > 0.125 && purity < 1.0);
            for k in [2, 4, 8] {
                let rho = induced_mixed(seed, i, k).unwrap();
                assert!((rho.trace().re - 1.0).abs() < 1e-12);
                let spec = hermitian_eigenvalues(&rho).unwrap();
                assert!(spec.smallest() >= -1e-12);
                // rank <= k
                assert!(spec.values()[k..].iter().all(|v| v.abs() < 1e-12));
            }
        }
        assert!(induced_mixed(seed, 0, 0).is_err());
        assert!(induced_mixed(seed, 0, 9).is_err());
    }

    #[test]
    fn density_examples() {
        let d = PureState3::basis(0).density();
        assert_eq!(d[(0, 0)], c(1.0, 0.0));
        assert_eq!(d.entries().iter().filter(|z| z.norm() > 0.0).count(), 1);

        let g = PureState3::ghz().density();
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((g[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(g.entries().iter().filter(|z| z.norm() > 1e-15).count(), 4);

        let psi = haar_pure(RngSeed(3), 0);
        let r = density(&psi);
        assert!(((&r * &r).trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_matches_partial_trace() {
        for i in 0..100 {
            let psi = haar_pure(RngSeed(8), i);
            let rho = psi.density();
            for keep in [Subsystem::A, Subsystem::B, Subsystem::C, Subsystem::AB, Subsystem::AC, Subsystem::BC] {
                let lhs = psi.reduced(keep);
                let rhs = partial_trace(&rho, keep).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-15);
            }
        }
    }

    #[test]
    fn isometry_is_orthonormal() {
        let mut rng = test_rng(4);
        let cols = haar_isometry(&mut rng, 8, 3);
        for (i, u) in cols.iter().enumerate() {
            for (j, v) in cols.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn parse_roundtrip_and_rejects_bad_norm() {
        let psi = haar_pure(RngSeed(1), 1);
        let back = PureState3::parse(&psi.serialize()).unwrap();
        assert_eq!(back, psi);
        assert!(matches!(
            PureState3::parse("0.9,0,0,0,0,0,0,0"),
            Err(Error::MalformedState(_))
        ));
        assert!(matches!(PureState3::parse("1,0"), Err(Error::Parameter(_))));
    }
}
