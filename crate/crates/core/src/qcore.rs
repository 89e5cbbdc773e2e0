//! Dense complex linear algebra for one to three qubits.
//!
//! Basis ordering is binary with qubit 1 (party A) as the most significant
//! bit, so `|abc>` has index `4a + 2b + c`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cplx = Complex64;

pub const ZERO: Cplx = Cplx::new(0.0, 0.0);
pub const ONE: Cplx = Cplx::new(1.0, 0.0);
pub const I: Cplx = Cplx::new(0.0, 1.0);

/// Tolerance on Hermiticity accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-8;

const STATE_HERMITIAN_TOL: f64 = 1e-10;
const STATE_TRACE_TOL: f64 = 1e-10;
const STATE_EIGEN_FLOOR: f64 = -1e-8;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        _ => Err(Error::Dimension(format!("{dim} is not one of 2, 4, 8"))),
    }
}

/// Number of qubits for a supported dimension.
pub fn qubit_count(dim: usize) -> usize {
    dim.trailing_zeros() as usize
}

/// Square complex matrix of dimension 2, 4 or 8.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Cplx>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: DMatrix::identity(dim, dim),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Cplx) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: DMatrix::from_fn(dim, dim, f),
        })
    }

    pub fn from_diagonal(diag: &[Cplx]) -> Result<Self> {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(rows: &[Vec<Cplx>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("matrix rows are not square".into()));
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Cplx>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Cplx::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Cplx], b: &[Cplx]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension("outer product of unequal vectors".into()));
        }
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub(crate) fn from_inner(data: DMatrix<Cplx>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        check_dim(data.nrows())?;
        Ok(Self { data })
    }

    pub fn inner(&self) -> &DMatrix<Cplx> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Cplx) {
        self.data[(row, col)] = value;
    }

    pub fn rows(&self) -> Vec<Vec<Cplx>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Cplx {
        self.data.trace()
    }

    pub fn scale(&self, factor: Cplx) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `(H + H^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()) * Cplx::new(0.5, 0.0),
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.adjoint() * self;
        let id = DMatrix::<Cplx>::identity(self.dim(), self.dim());
        prod.data
            .iter()
            .zip(id.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Cplx]) -> Vec<Cplx> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `U * self * U^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> CMatrix {
        &(u * self) * &u.adjoint()
    }

    /// Distance between two unitaries after removing the best global phase:
    /// `max |U - e^{i t} V|` with `t = arg Tr(V^dagger U)`.
    pub fn phase_distance(&self, other: &CMatrix) -> f64 {
        let ov = (&other.adjoint() * self).trace();
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.max_abs_diff(&other.scale(phase))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim(), self.dim())?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// Tensor product `a (x) b`; the result may not exceed dimension 8.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (da, db) = (a.dim(), b.dim());
    if da * db > 8 {
        return Err(Error::Dimension(format!(
            "kron of {da}x{da} and {db}x{db} exceeds three qubits"
        )));
    }
    CMatrix::from_fn(da * db, |i, j| {
        a.get(i / db, j / db) * b.get(i % db, j % db)
    })
}

/// Lifts a 2x2 operator acting on `qubit` (0-based, 0 = most significant)
/// into an `n`-qubit space.
pub fn lift_single(op: &CMatrix, qubit: usize, n: usize) -> Result<CMatrix> {
    if op.dim() != 2 || qubit >= n || n > 3 {
        return Err(Error::Qubits(format!("cannot lift onto qubit {qubit} of {n}")));
    }
    let mut out: Option<CMatrix> = None;
    for q in 0..n {
        let factor = if q == qubit {
            op.clone()
        } else {
            CMatrix::identity(2)?
        };
        out = Some(match out {
            None => factor,
            Some(acc) => kron(&acc, &factor)?,
        });
    }
    Ok(out.expect("n >= 1"))
}

/// Normalized pure state of one to three qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<Cplx>,
}

impl Ket {
    /// Accepts amplitudes whose norm is already 1 within 1e-10 and
    /// renormalizes them to machine precision.
    pub fn new(amps: Vec<Cplx>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = norm(&amps);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("ket norm {norm} is not 1")));
        }
        Ok(Self::scaled(amps, norm))
    }

    pub fn normalized(amps: Vec<Cplx>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = norm(&amps);
        if norm < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self::scaled(amps, norm))
    }

    fn scaled(amps: Vec<Cplx>, norm: f64) -> Self {
        Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Cplx] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Cplx {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest componentwise difference after aligning global phases.
    pub fn phase_distance(&self, other: &Ket) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }

    /// Copy with the global phase chosen so the first amplitude of
    /// non-negligible modulus is real and positive.
    pub fn canonical_phase(&self) -> Ket {
        let lead = self
            .amps
            .iter()
            .find(|a| a.norm() > 1e-12)
            .copied()
            .unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        Ket {
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = CMatrix::outer(&self.amps, &self.amps).expect("ket dims are valid");
        DensityMatrix(m)
    }
}

fn norm(v: &[Cplx]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues
    /// no lower than -1e-8.
    pub fn new(m: CMatrix) -> Result<Self> {
        let dev = m.hermiticity_deviation();
        if dev > STATE_HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = m.trace();
        if (tr - ONE).norm() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let eig = eig_hermitian(&m)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < STATE_EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self(CMatrix::identity(dim)?.scale(Cplx::new(
            1.0 / dim as f64,
            0.0,
        ))))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx {
        self.0.get(row, col)
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `U rho U^dagger`, which stays a valid state for unitary `U`.
    pub fn evolve_unitary(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix(self.0.conjugate_by(u))
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

impl AsRef<CMatrix> for CMatrix {
    fn as_ref(&self) -> &CMatrix {
        self
    }
}

/// Reduced operator on the qubits at positions `keep` (0 = most significant),
/// in ascending position order.
pub fn partial_trace_matrix(m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let n = qubit_count(m.dim());
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() >= n || keep.iter().any(|&q| q >= n) {
        return Err(Error::Qubits(format!(
            "keep set {keep:?} must be a non-empty proper subset of {n} qubits"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose = |kept: usize, tr: usize| {
        let mut idx = 0usize;
        for (k, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (keep.len() - 1 - k)) & 1) << (n - 1 - q);
        }
        for (k, &q) in traced.iter().enumerate() {
            idx |= ((tr >> (traced.len() - 1 - k)) & 1) << (n - 1 - q);
        }
        idx
    };
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    CMatrix::from_fn(dk, |i, j| {
        (0..dt)
            .map(|t| m.get(compose(i, t), compose(j, t)))
            .sum()
    })
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace_matrix(rho.matrix(), keep).map(DensityMatrix)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Cplx> {
        (0..self.vectors.dim())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }

    /// `V diag(values) V^dagger`.
    pub fn recompose(&self, values: &[f64]) -> CMatrix {
        let d = self.vectors.dim();
        let mut out = CMatrix::zeros(d).expect("valid dim");
        for (k, &lam) in values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..d {
                for j in 0..d {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v[i] * v[j].conj() * lam);
                }
            }
        }
        out
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix. Each
/// eigenvector's largest-modulus component is made real and positive.
pub fn eig_hermitian(h: &CMatrix) -> Result<HermitianEigen> {
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sym = h.hermitian_part();
    let eig = SymmetricEigen::new(sym.inner().clone());
    let d = h.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<Cplx>::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // first component within rounding of the maximum, for determinism
        let lead = v
            .iter()
            .find(|z| z.norm() >= max - 1e-12)
            .copied()
            .unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        for i in 0..d {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(HermitianEigen {
        values,
        vectors: CMatrix::from_inner(vectors)?,
    })
}

/// Normalized Hilbert-Schmidt overlap
/// `Tr(a^dagger b) / sqrt(Tr(a^dagger a) Tr(b^dagger b))`.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "fidelity between dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let ad = a.adjoint();
    let na = (&ad * a).trace().re;
    let nb = (&b.adjoint() * b).trace().re;
    if na <= 1e-300 || nb <= 1e-300 {
        return Err(Error::ZeroNorm);
    }
    let denom = na.sqrt() * nb.sqrt();
    let f = (&ad * b).trace() / denom;
    if f.im.abs() > 1e-10 {
        return Err(Error::NotHermitian {
            deviation: f.im.abs(),
        });
    }
    Ok(f.re)
}

/// Nearest unit-trace positive semidefinite operator obtained by clipping
/// negative eigenvalues of the Hermitian part and renormalizing.
pub fn psd_project(h: &CMatrix) -> Result<DensityMatrix> {
    let eig = eig_hermitian(&h.hermitian_part())?;
    let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 1e-14 {
        return Err(Error::InvalidState(
            "no positive spectrum left after clipping".into(),
        ));
    }
    let scaled: Vec<f64> = clipped.iter().map(|v| v / total).collect();
    Ok(DensityMatrix(eig.recompose(&scaled).hermitian_part()))
}

/// Random states for tests, benchmarks and examples.
pub mod random {
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::*;

    /// Haar-distributed pure state.
    pub fn haar_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
        let amps: Vec<Cplx> = (0..dim)
            .map(|_| Cplx::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Ket::normalized(amps).expect("gaussian vector is nonzero")
    }

    /// Full-rank mixed state `G G^dagger / Tr` with Ginibre `G`.
    pub fn mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
        let g = CMatrix::from_fn(dim, |_, _| {
            Cplx::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
        .expect("valid dim");
        let p = &g * &g.adjoint();
        let tr = p.trace().re;
        DensityMatrix(p.scale(Cplx::new(1.0 / tr, 0.0)).hermitian_part())
    }

    /// Random Hermitian matrix with Gaussian entries.
    pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
        let g = CMatrix::from_fn(dim, |_, _| {
            Cplx::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
        .expect("valid dim");
        g.hermitian_part()
    }
}
