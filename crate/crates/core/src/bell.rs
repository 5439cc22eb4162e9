//! Horodecki criterion for the CHSH inequality on two-qubit reductions.
//!
//! Pauli indices run x, y, z. `t_ij = Tr[(σ_i ⊗ σ_j) ρ]` where the first
//! factor acts on the first party of the pair in A, B, C order.

use std::fmt;

use crate::error::{Error, Result};
use crate::qmath::{partial_trace, symmetric3_eigenvalues, ComplexMatrix, Party, Subsystem};
use crate::states::{FamilyParams, PureState3};

/// `b_xy` above this counts as a violation when labelling records.
pub const VIOLATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pair {
    AB,
    BC,
    AC,
}

impl Pair {
    /// Record order: AB, BC, AC.
    pub const ALL: [Pair; 3] = [Pair::AB, Pair::BC, Pair::AC];

    pub fn subsystem(self) -> Subsystem {
        match self {
            Pair::AB => Subsystem::AB,
            Pair::BC => Subsystem::BC,
            Pair::AC => Subsystem::AC,
        }
    }

    /// The pair left over when `p` is split off.
    pub fn complement_of(p: Party) -> Pair {
        match p {
            Party::A => Pair::BC,
            Party::B => Pair::AC,
            Party::C => Pair::AB,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::AB => "AB",
            Pair::BC => "BC",
            Pair::AC => "AC",
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    /// `T^T T`.
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.t[k][i] * self.t[k][j]).sum();
            }
        }
        g
    }

    /// Eigenvalues of `T^T T`, descending.
    pub fn gram_spectrum(&self) -> [f64; 3] {
        symmetric3_eigenvalues(&self.gram())
    }

    /// Sum of the two largest eigenvalues of `T^T T`.
    pub fn m_value(&self) -> f64 {
        let e = self.gram_spectrum();
        e[0] + e[1]
    }
}

/// Pauli-Pauli expectation values of a two-qubit state.
pub fn correlation_matrix(rho: &ComplexMatrix) -> Result<CorrelationMatrix> {
    if rho.dim() != 4 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    Ok(correlation_unchecked(rho))
}

fn correlation_unchecked(rho: &ComplexMatrix) -> CorrelationMatrix {
    // Written out per Pauli pair: r(k, l) = ρ_{kl}, basis |00>,|01>,|10>,|11>.
    let r = |k: usize, l: usize| rho[(k, l)];
    let xx = 2.0 * (r(3, 0) + r(2, 1)).re;
    let yy = 2.0 * (r(2, 1) - r(3, 0)).re;
    let xy = 2.0 * (r(2, 1) - r(3, 0)).im * -1.0;
    let yx = 2.0 * (r(2, 1) + r(3, 0)).im;
    let xz = 2.0 * (r(2, 0) - r(3, 1)).re;
    let yz = 2.0 * (r(2, 0) - r(3, 1)).im;
    let zx = 2.0 * (r(1, 0) - r(3, 2)).re;
    let zy = 2.0 * (r(1, 0) - r(3, 2)).im;
    let zz = (r(0, 0) - r(1, 1) - r(2, 2) + r(3, 3)).re;
    CorrelationMatrix {
        t: [[xx, xy, xz], [yx, yy, yz], [zx, zy, zz]],
    }
}

/// `M(ρ) = m₁ + m₂`; the maximal CHSH value is `2√M`.
pub fn bell_m(rho: &ComplexMatrix) -> Result<f64> {
    Ok(correlation_matrix(rho)?.m_value())
}

/// `max{0, M − 1}`.
pub fn bell_b(rho: &ComplexMatrix) -> Result<f64> {
    Ok((bell_m(rho)? - 1.0).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellRecord {
    pub m_ab: f64,
    pub m_bc: f64,
    pub m_ac: f64,
    pub b_ab: f64,
    pub b_bc: f64,
    pub b_ac: f64,
    pub b_max: f64,
    pub violating_pair: Option<Pair>,
}

impl BellRecord {
    pub fn from_m(m_ab: f64, m_bc: f64, m_ac: f64) -> Self {
        let b = |m: f64| (m - 1.0).max(0.0);
        let (b_ab, b_bc, b_ac) = (b(m_ab), b(m_bc), b(m_ac));
        let mut best = (Pair::AB, b_ab);
        for cand in [(Pair::BC, b_bc), (Pair::AC, b_ac)] {
            if cand.1 > best.1 {
                best = cand;
            }
        }
        let violating_pair = (best.1 > VIOLATION_TOL).then_some(best.0);
        Self { m_ab, m_bc, m_ac, b_ab, b_bc, b_ac, b_max: best.1, violating_pair }
    }

    pub fn m(&self, pair: Pair) -> f64 {
        match pair {
            Pair::AB => self.m_ab,
            Pair::BC => self.m_bc,
            Pair::AC => self.m_ac,
        }
    }

    pub fn b(&self, pair: Pair) -> f64 {
        match pair {
            Pair::AB => self.b_ab,
            Pair::BC => self.b_bc,
            Pair::AC => self.b_ac,
        }
    }

    pub fn pair_label(&self) -> &'static str {
        self.violating_pair.map_or("none", Pair::label)
    }

    /// Number of pairs with `M > 1 + tol`.
    pub fn violations(&self, tol: f64) -> usize {
        Pair::ALL.iter().filter(|&&p| self.m(p) > 1.0 + tol).count()
    }
}

/// Bell quantities for the three reductions of a pure state.
pub fn bmax(psi: &PureState3) -> BellRecord {
    let m = Pair::ALL.map(|p| correlation_unchecked(&psi.reduced(p.subsystem())).m_value());
    BellRecord::from_m(m[0], m[1], m[2])
}

/// Bell quantities for the three reductions of a mixed state.
pub fn bmax_mixed(rho: &ComplexMatrix) -> Result<BellRecord> {
    let mut m = [0.0; 3];
    for (slot, p) in m.iter_mut().zip(Pair::ALL) {
        *slot = bell_m(&partial_trace(rho, p.subsystem())?)?;
    }
    Ok(BellRecord::from_m(m[0], m[1], m[2]))
}

/// At most one reduction violates CHSH by more than `tol`.
pub fn nogo_check(psi: &PureState3, tol: f64) -> bool {
    bmax(psi).violations(tol) <= 1
}

fn require_real_ghz(params: &FamilyParams) -> Result<()> {
    if let FamilyParams::Ghz(p) = params {
        if !p.is_real() {
            return Err(Error::UnsupportedClosedForm(format!(
                "GHZ with phi = {} has no closed-form M; use the numeric route",
                p.phi
            )));
        }
    }
    Ok(())
}

/// Closed-form `M` of one reduction of a family member.
pub fn bell_m_closed(params: &FamilyParams, pair: Pair) -> Result<f64> {
    params.validate()?;
    require_real_ghz(params)?;
    let value = match params {
        FamilyParams::Ghz(p) => {
            let (ca2, cb2, cg2) = (p.alpha.cos().powi(2), p.beta.cos().powi(2), p.gamma.cos().powi(2));
            let s2d2 = (2.0 * p.delta).sin().powi(2);
            let x = p.cross_term();
            let num = match pair {
                Pair::BC => ca2 - cb2 - cg2 + 2.0 * cb2 * cg2,
                Pair::AC => cb2 - ca2 - cg2 + 2.0 * ca2 * cg2,
                Pair::AB => cg2 - ca2 - cb2 + 2.0 * ca2 * cb2,
            };
            1.0 + (num * s2d2 - x * x) / (1.0 + x).powi(2)
        }
        FamilyParams::W(p) => {
            let (a, b, c) = (p.a, p.b, p.c);
            let lin = match pair {
                Pair::BC => 12.0 * a * b - 4.0 * a * c - 4.0 * b * c,
                Pair::AC => -4.0 * a * b + 12.0 * a * c - 4.0 * b * c,
                Pair::AB => -4.0 * a * b - 4.0 * a * c + 12.0 * b * c,
            };
            0.5 + (lin + w_discriminant(p).sqrt()) / 2.0
        }
        FamilyParams::Mbv { m } => {
            let m2 = m * m;
            match pair {
                Pair::AC => 1.0 + 4.0 * m2 / (1.0 + m2).powi(2),
                Pair::AB | Pair::BC => ((1.0 - m2) / (1.0 + m2)).powi(2),
            }
        }
    };
    Ok(value)
}

/// `V` of the W-class `T^T T` spectrum.
fn w_discriminant(p: &crate::states::WParams) -> f64 {
    let (sa, sb, sc) = (p.a.sqrt(), p.b.sqrt(), p.c.sqrt());
    let d = p.d();
    ((sa + sb - sc).powi(2) + d)
        * ((sa - sb + sc).powi(2) + d)
        * ((-sa + sb + sc).powi(2) + d)
        * ((sa + sb + sc).powi(2) + d)
}

/// The closed-form eigenvalue of `T^T T` that sits apart from the `M` sum:
/// the smallest one for real GHZ states, the middle one for W states.
pub fn distinguished_eigenvalue(params: &FamilyParams, pair: Pair) -> Result<f64> {
    params.validate()?;
    require_real_ghz(params)?;
    match params {
        FamilyParams::Ghz(p) => {
            let (ca2, cb2, cg2) = (p.alpha.cos().powi(2), p.beta.cos().powi(2), p.gamma.cos().powi(2));
            let (sa2, sb2, sg2) = (1.0 - ca2, 1.0 - cb2, 1.0 - cg2);
            let s2d2 = (2.0 * p.delta).sin().powi(2);
            let d2 = (1.0 + p.cross_term()).powi(2);
            let lead = match pair {
                Pair::BC => ca2 * sb2 * sg2,
                Pair::AC => cb2 * sa2 * sg2,
                Pair::AB => cg2 * sa2 * sb2,
            };
            Ok(lead * s2d2 / d2)
        }
        FamilyParams::W(p) => Ok(4.0
            * match pair {
                Pair::BC => p.a * p.b,
                Pair::AC => p.a * p.c,
                Pair::AB => p.b * p.c,
            }),
        FamilyParams::Mbv { .. } => Err(Error::UnsupportedClosedForm(
            "eigenvalue ordering is only stated for GHZ^R and W".into(),
        )),
    }
}

/// Checks the stated `T^T T` eigenvalue ordering numerically: for real
/// GHZ states the distinguished eigenvalue is the smallest, for W states it
/// lies between the other two.
pub fn eigen_ordering_holds(params: &FamilyParams, pair: Pair, tol: f64) -> Result<bool> {
    let lam1 = distinguished_eigenvalue(params, pair)?;
    let psi = params.state()?;
    let e = correlation_unchecked(&psi.reduced(pair.subsystem())).gram_spectrum();
    Ok(match params {
        FamilyParams::Ghz(_) => (e[2] - lam1).abs() <= tol && lam1 <= e[1] + tol,
        _ => (e[1] - lam1).abs() <= tol && e[2] <= lam1 + tol && lam1 <= e[0] + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{c, pauli, tensor_product, C64};
    use crate::rng::RngSeed;
    use crate::states::{haar_pure, mbv_state, GhzParams, WParams};
    use crate::testutil::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn phi_plus() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
    }

    /// Reference correlation matrix from explicit Kronecker products.
    fn correlation_oracle(rho: &ComplexMatrix) -> [[f64; 3]; 3] {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let op = tensor_product(&pauli(i), &pauli(j)).unwrap();
                *x = (&op * rho).trace().re;
            }
        }
        t
    }

    #[test]
    fn correlation_examples() {
        let t = correlation_matrix(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        assert_eq!(t.t, [[0.0; 3]; 3]);
        let t = correlation_matrix(&phi_plus()).unwrap();
        let expect = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((t.t[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
        let ghz_pair = PureState3::ghz().reduced(Subsystem::AB);
        let t = correlation_matrix(&ghz_pair).unwrap();
        let expect = [[0.0; 3], [0.0; 3], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((t.t[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn correlation_matches_kronecker_oracle() {
        let mut rng = test_rng(51);
        for _ in 0..2000 {
            let rho = random_density(&mut rng, 4);
            let fast = correlation_matrix(&rho).unwrap().t;
            let slow = correlation_oracle(&rho);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((fast[i][j] - slow[i][j]).abs() < 1e-14);
                    assert!(fast[i][j].abs() <= 1.0 + 1e-10);
                }
            }
        }
    }

    #[test]
    fn bell_m_examples() {
        assert!((bell_m(&phi_plus()).unwrap() - 2.0).abs() < 1e-14);
        assert!((bell_m(&PureState3::ghz().reduced(Subsystem::BC)).unwrap() - 1.0).abs() < 1e-15);
        let w_pair = PureState3::w().reduced(Subsystem::AB);
        let t = correlation_matrix(&w_pair).unwrap().t;
        assert!((t[0][0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((t[1][1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((t[2][2] + 1.0 / 3.0).abs() < 1e-15);
        assert!((bell_m(&w_pair).unwrap() - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn bell_b_examples() {
        assert!((bell_b(&phi_plus()).unwrap() - 1.0).abs() < 1e-14);
        assert!(bell_b(&PureState3::ghz().reduced(Subsystem::AB)).unwrap() < 1e-14);
        assert_eq!(bell_b(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap(), 0.0);
    }

    #[test]
    fn bmax_examples() {
        let one = bmax(&mbv_state(1.0).unwrap());
        assert!((one.b_max - 1.0).abs() < 1e-12);
        assert_eq!(one.violating_pair, Some(Pair::AC));
        assert_eq!(one.b_ab, 0.0);
        assert_eq!(one.b_bc, 0.0);

        let ghz = bmax(&PureState3::ghz());
        assert!(ghz.b_max < 1e-14);
        assert_eq!(ghz.pair_label(), "none");

        let half = bmax(&mbv_state(0.5).unwrap());
        assert!((half.b_max - 0.64).abs() < 1e-12);
    }

    #[test]
    fn bmax_mixed_examples() {
        for i in 0..50 {
            let psi = haar_pure(RngSeed(52), i);
            let a = bmax(&psi);
            let b = bmax_mixed(&psi.density()).unwrap();
            for p in Pair::ALL {
                assert!((a.m(p) - b.m(p)).abs() < 1e-13);
            }
        }
        let mix = &PureState3::ghz().density().scale_real(0.5) + &PureState3::w().density().scale_real(0.5);
        let r = bmax_mixed(&mix).unwrap();
        assert_eq!(r.b_max, 0.0);
        let r = bmax_mixed(&mbv_state(1.0).unwrap().density()).unwrap();
        assert!((r.b_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nogo_examples() {
        assert!(nogo_check(&mbv_state(1.0).unwrap(), 1e-9));
        assert!(nogo_check(&PureState3::ghz(), 1e-9));
        for i in 0..100_000 {
            let rec = bmax(&haar_pure(RngSeed(53), i));
            assert!(rec.violations(1e-9) <= 1, "state {i}: {rec:?}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let ghz = FamilyParams::Ghz(GhzParams::real(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_4));
        assert!((bell_m_closed(&ghz, Pair::BC).unwrap() - 1.0).abs() < 1e-15);
        let third = 1.0 / 3.0;
        let w = FamilyParams::W(WParams { a: third, b: third, c: third });
        assert!((bell_m_closed(&w, Pair::BC).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        if let FamilyParams::W(p) = w {
            assert!((w_discriminant(&p) - 1.0 / 9.0).abs() < 1e-15);
        }
        assert!((bell_m_closed(&FamilyParams::Mbv { m: 1.0 }, Pair::AC).unwrap() - 2.0).abs() < 1e-15);
        let phased = FamilyParams::Ghz(GhzParams { phi: 0.3, ..GhzParams::real(1.0, 1.0, 1.0, 0.5) });
        assert!(matches!(bell_m_closed(&phased, Pair::AB), Err(Error::UnsupportedClosedForm(_))));
    }

    fn random_ghzr(rng: &mut crate::rng::Stream) -> FamilyParams {
        FamilyParams::Ghz(GhzParams::real(
            rng.uniform_in(1e-6, FRAC_PI_2),
            rng.uniform_in(1e-6, FRAC_PI_2),
            rng.uniform_in(1e-6, FRAC_PI_2),
            rng.uniform_in(1e-6, FRAC_PI_4),
        ))
    }

    fn random_w(rng: &mut crate::rng::Stream) -> FamilyParams {
        let (x, y, z, d) = (rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
        let s = x + y + z + d;
        FamilyParams::W(WParams { a: x / s, b: y / s, c: z / s })
    }

    #[test]
    fn closed_forms_match_numeric() {
        let mut rng = test_rng(54);
        for _ in 0..10_000 {
            for params in [random_ghzr(&mut rng), random_w(&mut rng)] {
                let rec = bmax(&params.state().unwrap());
                for p in Pair::ALL {
                    let closed = bell_m_closed(&params, p).unwrap();
                    assert!((closed - rec.m(p)).abs() < 1e-10, "{params:?} {p}");
                }
            }
        }
        for k in 0..=100 {
            let params = FamilyParams::Mbv { m: k as f64 / 100.0 };
            let rec = bmax(&params.state().unwrap());
            for p in Pair::ALL {
                assert!((bell_m_closed(&params, p).unwrap() - rec.m(p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exchange_symmetry() {
        let mut rng = test_rng(55);
        for _ in 0..1000 {
            if let FamilyParams::Ghz(p) = random_ghzr(&mut rng) {
                let swapped = GhzParams { alpha: p.beta, beta: p.alpha, ..p };
                let bc_swapped = bell_m_closed(&FamilyParams::Ghz(swapped), Pair::BC).unwrap();
                let ac = bell_m_closed(&FamilyParams::Ghz(p), Pair::AC).unwrap();
                assert!((bc_swapped - ac).abs() < 1e-12);
                let numeric_bc = bmax(&crate::states::ghz_state(&swapped).unwrap()).m_bc;
                assert!((numeric_bc - ac).abs() < 1e-10);
            }
            if let FamilyParams::W(p) = random_w(&mut rng) {
                let swapped = WParams { a: p.b, b: p.a, ..p };
                let ab_swapped = bell_m_closed(&FamilyParams::W(swapped), Pair::AB).unwrap();
                let ac = bell_m_closed(&FamilyParams::W(p), Pair::AC).unwrap();
                assert!((ab_swapped - ac).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalue_orderings() {
        let mut rng = test_rng(56);
        for _ in 0..10_000 {
            for params in [random_ghzr(&mut rng), random_w(&mut rng)] {
                for p in Pair::ALL {
                    assert!(eigen_ordering_holds(&params, p, 1e-10).unwrap(), "{params:?} {p}");
                }
            }
        }
    }

    #[test]
    fn m_is_local_unitary_invariant() {
        let mut rng = test_rng(57);
        for i in 0..500 {
            let psi = haar_pure(RngSeed(58), i);
            let (ua, ub, uc) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
            let phi = psi.apply_local(&ua, &ub, &uc).unwrap();
            let (r1, r2) = (bmax(&psi), bmax(&phi));
            for p in Pair::ALL {
                assert!((r1.m(p) - r2.m(p)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sqrt_m_and_b_are_convex() {
        let mut rng = test_rng(59);
        for _ in 0..1000 {
            let r1 = random_density(&mut rng, 4);
            // Mix a random state with a near-pure one so violations occur.
            let k = random_ket(&mut rng, 4);
            let r2 = ComplexMatrix::outer(&k);
            let p = rng.uniform();
            let mix = (&r1.scale_real(p) + &r2.scale_real(1.0 - p)).hermitian_part();
            let (m1, m2, mm) = (bell_m(&r1).unwrap(), bell_m(&r2).unwrap(), bell_m(&mix).unwrap());
            assert!(mm.sqrt() <= p * m1.sqrt() + (1.0 - p) * m2.sqrt() + 1e-9);
            let b = |m: f64| (m - 1.0).max(0.0);
            assert!(b(mm) <= p * b(m1) + (1.0 - p) * b(m2) + 1e-9);
        }
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(correlation_matrix(&ComplexMatrix::identity(2)).is_err());
        let _ = C64::new(0.0, 0.0);
    }
}
