//! Pure three-qubit states from two two-qubit marginals.
//!
//! A pure state has the Schmidt form
//! `sqrt(p0)|a0>|v0> + e^{i alpha} sqrt(p1)|a1>|v1>` across the A|BC cut,
//! where `|a_i>` and `|v_i>` are eigenvectors of `rho_A` and `rho_BC`. The
//! marginals fix everything except `alpha`, which is chosen so the
//! candidate's AB marginal is closest to the measured one. Generalized GHZ
//! states fail here: either the spectrum is degenerate or the AB marginal
//! carries no information about `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, kron, partial_trace, partial_trace_matrix, CMatrix, Cplx, DensityMatrix, Ket, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructConfig {
    /// Minimum gap `p0 - p1` of the Schmidt spectrum.
    pub degeneracy_tol: f64,
    /// Largest allowed difference between the spectra of `rho_A` and the
    /// top of `rho_BC`.
    pub inconsistency_tol: f64,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self { degeneracy_tol: 1e-3, inconsistency_tol: 0.2 }
    }
}

/// Norm below which the cross block cannot fix the phase.
const CROSS_TOL: f64 = 1e-9;
/// Smaller Schmidt weight treated as zero (product across A|BC).
const RANK_ONE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SchmidtData {
    /// Descending, summing to one.
    pub p: [f64; 2],
    pub a_vectors: [Vec<Cplx>; 2],
    pub bc_vectors: [Vec<Cplx>; 2],
}

fn check_dim4(rho: &DensityMatrix, name: &str) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{name} must be 4x4, got {}", rho.dim())))
    }
}

pub fn schmidt_from_marginals(
    rho_bc: &DensityMatrix,
    rho_ab: &DensityMatrix,
    cfg: &ReconstructConfig,
) -> Result<SchmidtData> {
    check_dim4(rho_bc, "rho_BC")?;
    check_dim4(rho_ab, "rho_AB")?;
    let rho_a = partial_trace(rho_ab, &[0])?;
    let ea = eig_hermitian(rho_a.matrix())?;
    let ebc = eig_hermitian(rho_bc.matrix())?;
    let diff = (0..2).map(|i| (ea.values[i] - ebc.values[i]).abs()).fold(0.0, f64::max);
    if diff > cfg.inconsistency_tol {
        return Err(Error::Inconsistent { diff });
    }
    let avg: Vec<f64> = (0..2).map(|i| ((ea.values[i] + ebc.values[i]) / 2.0).max(0.0)).collect();
    let total = avg[0] + avg[1];
    if total <= 0.0 {
        return Err(Error::InvalidState("marginals have no weight in their top two eigenvalues".into()));
    }
    let p = [avg[0] / total, avg[1] / total];
    let gap = p[0] - p[1];
    if gap < cfg.degeneracy_tol {
        return Err(Error::Degenerate { gap, tol: cfg.degeneracy_tol });
    }
    Ok(SchmidtData {
        p,
        a_vectors: [ea.vector(0), ea.vector(1)],
        bc_vectors: [ebc.vector(0), ebc.vector(1)],
    })
}

/// Cross block of the candidate AB marginal at zero phase,
/// `sqrt(p0 p1) |a1><a0| (x) Tr_C |v1><v0|`.
fn cross_block(s: &SchmidtData) -> Result<CMatrix> {
    let a = CMatrix::outer(&s.a_vectors[1], &s.a_vectors[0])?;
    let v = CMatrix::outer(&s.bc_vectors[1], &s.bc_vectors[0])?;
    let b = partial_trace_matrix(&v, &[0])?;
    Ok(kron(&a, &b)?.scale(Cplx::new((s.p[0] * s.p[1]).sqrt(), 0.0)))
}

/// Relative Schmidt phase that brings the candidate AB marginal closest to
/// `rho_ab` in Frobenius norm.
pub fn phase_fit(s: &SchmidtData, rho_ab: &DensityMatrix) -> Result<f64> {
    check_dim4(rho_ab, "rho_AB")?;
    if s.p[1] < RANK_ONE_TOL {
        return Ok(0.0);
    }
    let x0 = cross_block(s)?;
    let norm = x0.frobenius_norm();
    if norm < CROSS_TOL {
        return Err(Error::PhaseIndeterminate { norm });
    }
    let overlap = (&x0.adjoint() * rho_ab.matrix()).trace();
    if overlap.norm() < CROSS_TOL {
        return Err(Error::PhaseIndeterminate { norm: overlap.norm() });
    }
    Ok(overlap.arg())
}

/// `sqrt(p0)|a0>|v0> + e^{i alpha} sqrt(p1)|a1>|v1>`.
pub fn ket_from_schmidt(s: &SchmidtData, alpha: f64) -> Result<Ket> {
    let mut amps = vec![ZERO; 8];
    let weights = [Cplx::new(s.p[0].sqrt(), 0.0), Cplx::from_polar(s.p[1].sqrt(), alpha)];
    for (i, w) in weights.iter().enumerate() {
        for a in 0..2 {
            for bc in 0..4 {
                amps[4 * a + bc] += w * s.a_vectors[i][a] * s.bc_vectors[i][bc];
            }
        }
    }
    Ket::normalized(amps)
}

/// Candidate AB marginal for a given phase.
pub fn candidate_ab(s: &SchmidtData, alpha: f64) -> Result<CMatrix> {
    partial_trace_matrix(ket_from_schmidt(s, alpha)?.to_density().matrix(), &[0, 1])
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub ket: Ket,
    pub schmidt: SchmidtData,
    pub alpha: f64,
    /// Frobenius distance between the reconstructed and input AB marginals.
    pub ab_distance: f64,
}

pub fn reconstruct_detailed(
    rho_ab: &DensityMatrix,
    rho_bc: &DensityMatrix,
    cfg: &ReconstructConfig,
) -> Result<Reconstruction> {
    let schmidt = schmidt_from_marginals(rho_bc, rho_ab, cfg)?;
    let alpha = phase_fit(&schmidt, rho_ab)?;
    let ket = ket_from_schmidt(&schmidt, alpha)?;
    let ab = partial_trace_matrix(ket.to_density().matrix(), &[0, 1])?;
    let ab_distance = (&ab - rho_ab.matrix()).frobenius_norm();
    Ok(Reconstruction { ket, schmidt, alpha, ab_distance })
}

pub fn reconstruct_pure(rho_ab: &DensityMatrix, rho_bc: &DensityMatrix) -> Result<Ket> {
    reconstruct_with(rho_ab, rho_bc, &ReconstructConfig::default())
}

pub fn reconstruct_with(rho_ab: &DensityMatrix, rho_bc: &DensityMatrix, cfg: &ReconstructConfig) -> Result<Ket> {
    reconstruct_detailed(rho_ab, rho_bc, cfg).map(|r| r.ket)
}

/// Exchanges the two qubits of a 4x4 matrix.
fn swap_pair(m: &CMatrix) -> CMatrix {
    let sw = |i: usize| ((i & 1) << 1) | (i >> 1);
    CMatrix::from_fn(4, |i, j| m.get(sw(i), sw(j))).expect("dim 4")
}

/// Reconstruction from `rho_AB` and `rho_AC`: qubit B is split off against
/// AC, and `rho_AB` fixes the phase.
pub fn reconstruct_from_ab_ac(rho_ab: &DensityMatrix, rho_ac: &DensityMatrix, cfg: &ReconstructConfig) -> Result<Ket> {
    check_dim4(rho_ab, "rho_AB")?;
    check_dim4(rho_ac, "rho_AC")?;
    // relabel (A, B, C) -> (B, A, C)
    let ba = DensityMatrix::new(swap_pair(rho_ab.matrix()))?;
    let k = reconstruct_with(&ba, rho_ac, cfg)?;
    let swap_ab = |i: usize| ((i & 0b100) >> 1) | ((i & 0b010) << 1) | (i & 1);
    let mut amps = vec![ZERO; 8];
    for (i, a) in k.amps().iter().enumerate() {
        amps[swap_ab(i)] = *a;
    }
    Ket::new(amps)
}
