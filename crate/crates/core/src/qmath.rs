//! Dense complex linear algebra for the 2-, 3-, 4- and 8-dimensional
//! problems that show up with three qubits.
//!
//! Qubit ordering: the basis ket `|abc>` has integer index `4a + 2b + c`,
//! so party A is the most significant bit. Every partial trace and every
//! correlation matrix in this crate relies on that convention.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest dimension any matrix in this crate may have (an 8x8 Kronecker product).
pub const MAX_DIM: usize = 64;

/// Hermiticity tolerance for eigensolver inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance for density-matrix preconditions.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `(-NEG_CLAMP, 0)` are treated as floating-point drift and clamped to zero.
pub const NEG_CLAMP: f64 = 1e-9;

/// Below this normalized cubic discriminant the trigonometric 3x3 solve
/// loses digits to `acos` and the Jacobi sweep takes over.
const TRIG_DISCRIMINANT_FLOOR: f64 = 1e-6;

const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension {dim} out of range");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_rows(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::Parameter(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|` for an (unnormalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `max |M - M^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[row * n + k] -= f * v;
                }
            }
        }
        det
    }

    /// Hermitian part `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pauli matrix by index: 0 = x, 1 = y, 2 = z.
pub fn pauli(i: usize) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let entries = match i {
        0 => vec![z, c(1.0, 0.0), c(1.0, 0.0), z],
        1 => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        2 => vec![c(1.0, 0.0), z, z, c(-1.0, 0.0)],
        _ => panic!("pauli index {i} out of range"),
    };
    ComplexMatrix::from_rows(2, entries).unwrap()
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim * b.dim;
    if dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        a[(i / b.dim, j / b.dim)] * b[(i % b.dim, j % b.dim)]
    }))
}

/// A single party of the three-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    /// Bit position inside the basis index `4a + 2b + c`.
    pub fn shift(self) -> usize {
        match self {
            Party::A => 2,
            Party::B => 1,
            Party::C => 0,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
        };
        f.write_str(s)
    }
}

/// Parties kept by a partial trace, always listed in A, B, C order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
    C,
    AB,
    AC,
    BC,
}

impl Subsystem {
    pub fn parties(self) -> &'static [Party] {
        match self {
            Subsystem::A => &[Party::A],
            Subsystem::B => &[Party::B],
            Subsystem::C => &[Party::C],
            Subsystem::AB => &[Party::A, Party::B],
            Subsystem::AC => &[Party::A, Party::C],
            Subsystem::BC => &[Party::B, Party::C],
        }
    }

    pub fn single(p: Party) -> Self {
        match p {
            Party::A => Subsystem::A,
            Party::B => Subsystem::B,
            Party::C => Subsystem::C,
        }
    }

    /// Index of a three-qubit basis state inside the kept subsystem.
    #[inline]
    pub(crate) fn local_index(self, global: usize) -> usize {
        self.parties()
            .iter()
            .fold(0, |acc, p| (acc << 1) | ((global >> p.shift()) & 1))
    }

    /// Bits of `global` belonging to the traced-out parties.
    #[inline]
    pub(crate) fn traced_bits(self, global: usize) -> usize {
        let kept_mask: usize = self.parties().iter().map(|p| 1 << p.shift()).sum();
        global & !kept_mask & 0b111
    }
}

/// Checks the density-matrix preconditions shared by most operations.
pub fn check_density(rho: &ComplexMatrix) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::MalformedState(format!(
            "not Hermitian (deviation {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::MalformedState(format!(
            "trace {} differs from 1",
            tr.re
        )));
    }
    Ok(())
}

/// Reduced state of a three-qubit density matrix.
pub fn partial_trace(rho: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if rho.dim() != 8 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    check_density(rho)?;
    Ok(reduce(rho, keep))
}

/// Partial trace without preconditions; linear in `rho`.
pub(crate) fn reduce(rho: &ComplexMatrix, keep: Subsystem) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(1 << keep.parties().len());
    for i in 0..8 {
        let ti = keep.traced_bits(i);
        let li = keep.local_index(i);
        for j in 0..8 {
            if keep.traced_bits(j) == ti {
                out[(li, keep.local_index(j))] += rho[(i, j)];
            }
        }
    }
    out
}

/// Eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Eigenvalues with eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix, eigenpairs sorted
/// by descending eigenvalue.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    let defect = m.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(jacobi(m))
}

fn jacobi(m: &ComplexMatrix) -> Eigen {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Rotate the phase of a_pq onto the real axis.
                let ph = apq / r;
                let phc = ph.conj();
                for k in 0..n {
                    a[(k, q)] *= phc;
                    v[(k, q)] *= phc;
                }
                for k in 0..n {
                    a[(q, k)] *= ph;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * sn;
                    a[(k, q)] = akp * sn + akq * cs;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * sn;
                    v[(k, q)] = vkp * sn + vkq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * sn;
                    a[(q, k)] = apk * sn + aqk * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
///
/// Dimension 2 uses the closed form, real-symmetric 3x3 input goes through
/// [`symmetric3_eigenvalues`], everything else through Jacobi.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    let defect = m.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    match m.dim() {
        2 => {
            let (hi, lo) = eig2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].norm());
            Ok(Spectrum { values: vec![hi, lo] })
        }
        3 if m.entries().iter().all(|z| z.im == 0.0) => {
            let mut s = [[0.0; 3]; 3];
            for (i, row) in s.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = 0.5 * (m[(i, j)].re + m[(j, i)].re);
                }
            }
            Ok(Spectrum {
                values: symmetric3_eigenvalues(&s).to_vec(),
            })
        }
        _ => Ok(Spectrum {
            values: jacobi(m).values,
        }),
    }
}

/// Eigenvalues of `[[a, b], [b*, d]]` as `(larger, smaller)` given `|b|`.
#[inline]
pub fn eig2(a: f64, d: f64, b_abs: f64) -> (f64, f64) {
    if b_abs == 0.0 {
        return (a.max(d), a.min(d));
    }
    let mean = 0.5 * (a + d);
    let half = (0.5 * (a - d)).hypot(b_abs);
    (mean + half, mean - half)
}

/// Eigenvalues of a real symmetric 3x3 matrix, descending.
///
/// Trigonometric solution of the characteristic cubic; near-degenerate
/// spectra fall back to Jacobi.
pub fn symmetric3_eigenvalues(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let d0 = a[0][0] - q;
    let d1 = a[1][1] - q;
    let d2 = a[2][2] - q;
    if p1 == 0.0 {
        let mut out = [a[0][0], a[1][1], a[2][2]];
        out.sort_by(|x, y| y.total_cmp(x));
        return out;
    }
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = [
        [d0 / p, a[0][1] / p, a[0][2] / p],
        [a[1][0] / p, d1 / p, a[1][2] / p],
        [a[2][0] / p, a[2][1] / p, d2 / p],
    ];
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = 0.5 * det_b;
    if 1.0 - r * r < TRIG_DISCRIMINANT_FLOOR {
        let m = ComplexMatrix::from_fn(3, |i, j| C64::new(a[i][j], 0.0));
        let vals = jacobi(&m).values;
        return [vals[0], vals[1], vals[2]];
    }
    let phi = r.clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut out = [e1, e2, e3];
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

/// Shannon entropy in bits of a probability list, with `0 log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Clamps tiny negative eigenvalues; errors on genuinely negative ones.
pub fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v < -NEG_CLAMP {
                Err(Error::MalformedState(format!("negative eigenvalue {v:e}")))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// Von Neumann entropy `-Tr ρ log2 ρ` in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let spec = hermitian_eigenvalues(rho)
        .map_err(|e| Error::MalformedState(e.to_string()))?;
    let probs = clamp_spectrum(spec.values())?;
    Ok(shannon_bits(&probs))
}

/// Entropy in bits of a 2x2 Hermitian PSD block given its entries. The
/// block need not be normalized; `trace` is the normalization.
#[inline]
pub(crate) fn entropy2_unnormalized(a: f64, d: f64, b_abs: f64) -> f64 {
    let tr = a + d;
    if tr <= 0.0 {
        return 0.0;
    }
    let (hi, lo) = eig2(a, d, b_abs);
    let hi = (hi / tr).clamp(0.0, 1.0);
    let lo = (lo / tr).clamp(0.0, 1.0);
    shannon_bits(&[hi, lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    fn ket(bits: usize, dim: usize) -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); dim];
        v[bits] = c(1.0, 0.0);
        v
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn zz_is_diagonal() {
        let zz = tensor_product(&pauli(2), &pauli(2)).unwrap();
        assert_eq!(zz, ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn x_on_first_qubit_flips_msb() {
        let xi = tensor_product(&pauli(0), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(xi.apply(&ket(0b00, 4)), ket(0b10, 4));
    }

    #[test]
    fn tensor_product_too_large() {
        let a = ComplexMatrix::identity(16);
        let b = ComplexMatrix::identity(8);
        assert_eq!(
            tensor_product(&a, &b).unwrap_err(),
            Error::UnsupportedDimension(128)
        );
    }

    #[test]
    fn trace_out_c_of_product() {
        let rho = ComplexMatrix::outer(&ket(0, 8));
        let ab = partial_trace(&rho, Subsystem::AB).unwrap();
        assert_eq!(ab, ComplexMatrix::outer(&ket(0, 4)));
    }

    #[test]
    fn ghz_single_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(s, 0.0);
        v[7] = c(s, 0.0);
        let a = partial_trace(&ComplexMatrix::outer(&v), Subsystem::A).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(a.max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn subsystem_index_convention() {
        // |abc> = |1,0,1> is index 5; keeping AC gives |11> = 3, keeping B gives 0.
        assert_eq!(Subsystem::AC.local_index(5), 3);
        assert_eq!(Subsystem::B.local_index(5), 0);
        assert_eq!(Subsystem::BC.local_index(6), 2);
        assert_eq!(Subsystem::AB.traced_bits(5), 1);
    }

    #[test]
    fn partial_trace_rejects_bad_trace() {
        let rho = ComplexMatrix::identity(8).scale_real(0.2);
        assert!(matches!(
            partial_trace(&rho, Subsystem::A),
            Err(Error::MalformedState(_))
        ));
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let s = hermitian_eigenvalues(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0, 1.0]);
        let s = hermitian_eigenvalues(&ComplexMatrix::from_real_diag(&[0.3, 0.7])).unwrap();
        assert_eq!(s.values(), &[0.7, 0.3]);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn symmetric3_degenerate_and_generic() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(symmetric3_eigenvalues(&id), [1.0, 1.0, 1.0]);
        // {1, x, x} with a rotated basis hits the Jacobi fallback.
        let m = [[0.6, 0.2, 0.0], [0.2, 0.6, 0.0], [0.0, 0.0, 0.4]];
        let e = symmetric3_eigenvalues(&m);
        assert!((e[0] - 0.8).abs() < 1e-15 && (e[1] - 0.4).abs() < 1e-15 && (e[2] - 0.4).abs() < 1e-15);
        let m = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let e = symmetric3_eigenvalues(&m);
        let r2 = 2f64.sqrt();
        assert!((e[0] - (2.0 + r2)).abs() < 1e-14);
        assert!((e[1] - 2.0).abs() < 1e-14);
        assert!((e[2] - (2.0 - r2)).abs() < 1e-14);
    }

    #[test]
    fn eigenpairs_satisfy_characteristic_polynomial() {
        let mut rng = test_rng(11);
        for dim in [2, 3, 4, 8] {
            for _ in 0..50 {
                let m = random_hermitian(&mut rng, dim);
                let spec = hermitian_eigenvalues(&m).unwrap();
                for &lam in spec.values() {
                    let shifted = &m - &ComplexMatrix::identity(dim).scale_real(lam);
                    assert!(shifted.determinant().norm() < 1e-8, "dim {dim}");
                }
                let eig = hermitian_eigen(&m).unwrap();
                for k in 0..dim {
                    let v = eig.vector(k);
                    let mv = m.apply(&v);
                    let err: f64 = mv
                        .iter()
                        .zip(&v)
                        .map(|(x, y)| (x - y * eig.values[k]).norm())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = test_rng(12);
        for dim in [2, 3, 4, 8] {
            for _ in 0..10_000 {
                let m = random_hermitian(&mut rng, dim);
                let spec = hermitian_eigenvalues(&m).unwrap();
                assert!((spec.sum() - m.trace().re).abs() < 1e-10);
                assert!(spec.values().windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn spectrum_invariant_under_unitary_conjugation() {
        let mut rng = test_rng(13);
        for dim in [2, 4, 8] {
            for _ in 0..200 {
                let rho = random_density(&mut rng, dim);
                let u = random_unitary(&mut rng, dim);
                let conj = &(&u * &rho) * &u.adjoint();
                let a = hermitian_eigenvalues(&rho).unwrap();
                let b = hermitian_eigenvalues(&conj.hermitian_part()).unwrap();
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((von_neumann_entropy(&half).unwrap() - 1.0).abs() < 1e-15);
        let pure = ComplexMatrix::outer(&ket(3, 4));
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        let d = ComplexMatrix::from_real_diag(&[2.0 / 3.0, 1.0 / 3.0]);
        let direct = -(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0f64 / 3.0) * (1.0f64 / 3.0).log2();
        let s = von_neumann_entropy(&d).unwrap();
        assert!((s - direct).abs() < 1e-15);
        assert!((s - 0.918_295_834_054_489_6).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        let d = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(matches!(von_neumann_entropy(&d), Err(Error::MalformedState(_))));
    }

    #[test]
    fn entropy_additive_on_products() {
        let mut rng = test_rng(14);
        for _ in 0..1000 {
            let a = random_density(&mut rng, 2);
            let b = random_density(&mut rng, 2);
            let ab = tensor_product(&a, &b).unwrap();
            let lhs = von_neumann_entropy(&ab).unwrap();
            let rhs = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_trace_is_linear() {
        let mut rng = test_rng(15);
        for _ in 0..200 {
            let r = random_hermitian(&mut rng, 8);
            let s = random_hermitian(&mut rng, 8);
            let (alpha, beta) = (0.37, -1.25);
            let mix = &r.scale_real(alpha) + &s.scale_real(beta);
            for keep in [Subsystem::A, Subsystem::B, Subsystem::C, Subsystem::AB, Subsystem::AC, Subsystem::BC] {
                let lhs = reduce(&mix, keep);
                let rhs = &reduce(&r, keep).scale_real(alpha) + &reduce(&s, keep).scale_real(beta);
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity() {
        let mut rng = test_rng(16);
        for _ in 0..200 {
            let rho = random_density(&mut rng, 8);
            for keep in [Subsystem::A, Subsystem::AB, Subsystem::AC, Subsystem::BC] {
                let red = partial_trace(&rho, keep).unwrap();
                assert!((red.trace().re - 1.0).abs() < 1e-10);
                assert!(red.is_hermitian(1e-12));
            }
        }
    }
}
