//! Small dense complex matrices, Hermitian eigenvalues, partial traces and
//! von Neumann entropy.
//!
//! Two-qubit operators use the A-major basis `|00>, |01>, |10>, |11>`, where
//! the first symbol labels qubit A. Composite index of `(i_a, i_b)` is
//! `i_a * dim_b + i_b`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which the Jacobi sweeps stop.
const JACOBI_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-9;
pub const DEFAULT_TRACE_TOL: f64 = 1e-9;
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-8;

/// Which factor of a bipartite space an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
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
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_vec(dim, data)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn outer(psi: &[C64]) -> Self {
        let dim = psi.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self + s * other`, in place.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Trace of `M^2`; the purity when `M` is a density matrix.
    pub fn trace_of_square(&self) -> f64 {
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * self[(k, i)];
            }
        }
        acc.re
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n).max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm())).unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// Eigenvalues of a 2x2 Hermitian matrix `[[p, c], [c*, q]]`, ascending.
#[inline]
pub fn hermitian_eigenvalues_2x2(p: f64, q: f64, c: C64) -> [f64; 2] {
    let mean = 0.5 * (p + q);
    let half_gap = 0.5 * (p - q);
    let r = half_gap.hypot(c.norm());
    [mean - r, mean + r]
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
///
/// Dimensions 1 and 2 use closed forms; larger matrices go through cyclic
/// complex Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let scale = m.frobenius_norm().max(1.0);
    let herr = m.hermiticity_error();
    if herr > DEFAULT_HERMITICITY_TOL * scale {
        return Err(Error::InvalidState(format!("matrix is not Hermitian (max |M - M^dagger| = {herr:.3e})")));
    }
    Ok(match m.dim() {
        1 => vec![m[(0, 0)].re],
        2 => hermitian_eigenvalues_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]).to_vec(),
        _ => jacobi_eigenvalues(m),
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    // Symmetrize so round-off asymmetry does not leak into the rotations.
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    let threshold = JACOBI_THRESHOLD * m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, phase*) . [[c, s], [-s, c]] on the (p, q) plane.
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;
                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A <- U^dagger A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Tolerances applied when validating a [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self { hermiticity: DEFAULT_HERMITICITY_TOL, trace: DEFAULT_TRACE_TOL, positivity: DEFAULT_POSITIVITY_TOL }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
///
/// The eigenvalues are computed once at construction (they are needed for the
/// positivity check) and reused by [`vn_entropy`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    tolerances: StateTolerances,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, StateTolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tolerances: StateTolerances) -> Result<Self> {
        let herr = matrix.hermiticity_error();
        if herr > tolerances.hermiticity {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (max |rho - rho^dagger| = {herr:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerances.trace || tr.im.abs() > tolerances.trace {
            return Err(Error::InvalidState(format!(
                "density matrix trace is {:.12} {:+.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let eigenvalues = hermitian_eigenvalues(&matrix)?;
        let min = eigenvalues[0];
        if min < -tolerances.positivity {
            return Err(Error::InvalidState(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { matrix, tolerances, eigenvalues })
    }

    /// Pure state `|psi><psi|`; `psi` is normalized here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)).expect("maximally mixed state is valid")
    }

    /// `rho_a (x) rho_b`.
    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<Self> {
        Self::new(rho_a.matrix.kron(&rho_b.matrix))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tolerances(&self) -> StateTolerances {
        self.tolerances
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_of_square()
    }
}

/// `-sum p log2 p` over a probability-like list, with `0 log 0 = 0`.
///
/// Entries are clamped to `[0, 1]`; callers are responsible for rejecting
/// significantly negative inputs.
pub fn shannon_bits(ps: &[f64]) -> f64 {
    ps.iter().map(|&p| xlog2x(p.clamp(0.0, 1.0))).sum()
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy `h(p) = -p log2 p - (1-p) log2 (1-p)`.
#[inline]
pub fn binary_entropy(p: f64) -> f64 {
    xlog2x(p) + xlog2x(1.0 - p)
}

fn entropy_of_spectrum(eigenvalues: &[f64], positivity_tol: f64) -> Result<f64> {
    let floor = -10.0 * positivity_tol;
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < floor {
            return Err(Error::InvalidState(format!(
                "eigenvalue {l:.3e} is below the entropy clamp floor {floor:.1e}"
            )));
        }
        s += xlog2x(l.clamp(0.0, 1.0));
    }
    Ok(s)
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&rho.eigenvalues, rho.tolerances.positivity)
}

/// Entropy of an already-normalized 2x2 Hermitian block.
pub(crate) fn entropy_2x2(p: f64, q: f64, c: C64) -> f64 {
    let [l0, l1] = hermitian_eigenvalues_2x2(p, q, c);
    xlog2x(l0.clamp(0.0, 1.0)) + xlog2x(l1.clamp(0.0, 1.0))
}

/// Partial trace of an operator on `C^dim_a (x) C^dim_b`, removing `traced`.
pub fn partial_trace_dims(m: &ComplexMatrix, dim_a: usize, dim_b: usize, traced: Subsystem) -> Result<ComplexMatrix> {
    if m.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch { expected: dim_a * dim_b, found: m.dim() });
    }
    let out = match traced {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    out[(i, j)] = (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum();
                }
            }
            out
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(dim_b);
            for i in 0..dim_b {
                for j in 0..dim_b {
                    out[(i, j)] = (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum();
                }
            }
            out
        }
    };
    Ok(out)
}

/// Reduced single-qubit state of a two-qubit density matrix with `traced`
/// removed.
pub fn partial_trace(rho: &DensityMatrix, traced: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    let reduced = partial_trace_dims(rho.matrix(), 2, 2, traced)?;
    DensityMatrix::with_tolerances(reduced, rho.tolerances)
}
