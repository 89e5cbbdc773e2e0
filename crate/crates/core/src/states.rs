//! Closed-form canonical three-qubit states.
//!
//! The canonical form is
//! `a1|000> + a2|001> + a3|010> + a4|100> + a5 e^{i phi}|111>` with
//! non-negative real `a_i`, parameterized by four angles in `[0, pi/2]`
//! and a phase. At boundary values (e.g. `alpha = 0`) several parameter
//! sets map to the same state; such inputs are accepted.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, Cplx, DensityMatrix, Ket, ZERO};

const RANGE_EPS: f64 = 1e-12;

fn check_quarter_turn(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() || !(-RANGE_EPS..=FRAC_PI_2 + RANGE_EPS).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "[0, pi/2]",
        });
    }
    Ok(value.clamp(0.0, FRAC_PI_2))
}

fn check_phase(value: f64) -> Result<f64> {
    if !value.is_finite() || !(-RANGE_EPS..=TAU + RANGE_EPS).contains(&value) {
        return Err(Error::OutOfRange {
            name: "phi",
            value,
            range: "[0, 2pi]",
        });
    }
    Ok(value.clamp(0.0, TAU).rem_euclid(TAU))
}

/// The five canonical parameters, in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub phi: f64,
}

impl GenericParams {
    /// Range-checked constructor. `phi = 2pi` is identified with 0.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            alpha: check_quarter_turn("alpha", alpha)?,
            beta: check_quarter_turn("beta", beta)?,
            gamma: check_quarter_turn("gamma", gamma)?,
            delta: check_quarter_turn("delta", delta)?,
            phi: check_phase(phi)?,
        })
    }

    pub fn from_degrees(alpha: f64, beta: f64, gamma: f64, delta: f64, phi: f64) -> Result<Self> {
        Self::new(
            alpha.to_radians(),
            beta.to_radians(),
            gamma.to_radians(),
            delta.to_radians(),
            phi.to_radians(),
        )
    }

    /// Parameters reducing the canonical form to `cos a|000> + sin a|111>`.
    pub fn ghz(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 0.0, FRAC_PI_2, 0.0)
    }

    /// Parameters reducing the canonical form to the W family.
    pub fn w(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, beta, gamma, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, self.delta, self.phi)
    }
}

/// Degree-valued parameter file layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericParamsDeg {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gamma_deg: f64,
    pub delta_deg: f64,
    pub phi_deg: f64,
}

impl TryFrom<GenericParamsDeg> for GenericParams {
    type Error = Error;
    fn try_from(d: GenericParamsDeg) -> Result<Self> {
        GenericParams::from_degrees(d.alpha_deg, d.beta_deg, d.gamma_deg, d.delta_deg, d.phi_deg)
    }
}

impl From<GenericParams> for GenericParamsDeg {
    fn from(p: GenericParams) -> Self {
        Self {
            alpha_deg: p.alpha.to_degrees(),
            beta_deg: p.beta.to_degrees(),
            gamma_deg: p.gamma.to_degrees(),
            delta_deg: p.delta.to_degrees(),
            phi_deg: p.phi.to_degrees(),
        }
    }
}

/// Moduli `a1..a5` and phase of the canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes {
    pub a: [f64; 5],
    pub phi: f64,
}

impl Amplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }
}

/// Basis indices carrying `a1..a5`: |000>, |001>, |010>, |100>, |111>.
pub const CANONICAL_BASIS: [usize; 5] = [0b000, 0b001, 0b010, 0b100, 0b111];

pub fn generic_amplitudes(p: &GenericParams) -> Result<Amplitudes> {
    let p = p.validate()?;
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let (sg, cg) = p.gamma.sin_cos();
    let (sd, cd) = p.delta.sin_cos();
    Ok(Amplitudes {
        a: [ca, sa * cb * sg, sa * sb, sa * cb * cg * cd, sa * cb * cg * sd],
        phi: p.phi,
    })
}

pub fn generic_ket(p: &GenericParams) -> Result<Ket> {
    let amp = generic_amplitudes(p)?;
    let mut amps = vec![ZERO; 8];
    for (k, &idx) in CANONICAL_BASIS.iter().enumerate() {
        amps[idx] = Cplx::new(amp.a[k], 0.0);
    }
    amps[0b111] *= Cplx::from_polar(1.0, amp.phi);
    Ket::new(amps)
}

/// `cos(alpha)|000> + sin(alpha)|111>`.
pub fn ghz_ket(alpha: f64) -> Result<Ket> {
    let alpha = check_quarter_turn("alpha", alpha)?;
    let mut amps = vec![ZERO; 8];
    amps[0b000] = Cplx::new(alpha.cos(), 0.0);
    amps[0b111] = Cplx::new(alpha.sin(), 0.0);
    Ket::new(amps)
}

/// `cos(g)cos(b)|100> + sin(g)cos(b)|001> + sin(b)|010>`.
pub fn w_ket(beta: f64, gamma: f64) -> Result<Ket> {
    let beta = check_quarter_turn("beta", beta)?;
    let gamma = check_quarter_turn("gamma", gamma)?;
    let mut amps = vec![ZERO; 8];
    amps[0b100] = Cplx::new(gamma.cos() * beta.cos(), 0.0);
    amps[0b001] = Cplx::new(gamma.sin() * beta.cos(), 0.0);
    amps[0b010] = Cplx::new(beta.sin(), 0.0);
    Ket::new(amps)
}

/// Rotation half-angle giving equal weights in [`w_ket`]: `asin(1/sqrt 3)`.
pub fn symmetric_w_beta() -> f64 {
    (1.0 / 3f64.sqrt()).asin()
}

/// `(i|001> + |010> + |100>)/sqrt 3`, the symmetric W state carrying a
/// local phase on qubit 3 as produced by the uncompensated pulse program.
pub fn phased_w_ket() -> Ket {
    let s = 1.0 / 3f64.sqrt();
    let mut amps = vec![ZERO; 8];
    amps[0b001] = Cplx::new(0.0, s);
    amps[0b010] = Cplx::new(s, 0.0);
    amps[0b100] = Cplx::new(s, 0.0);
    Ket::new(amps).expect("unit norm")
}

/// Pseudopure state `(1 - eps)/8 I + eps |s><s|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudopureSpec {
    pub basis_state: usize,
    pub epsilon: f64,
}

impl PseudopureSpec {
    pub fn new(basis_state: usize, epsilon: f64) -> Result<Self> {
        if basis_state > 7 {
            return Err(Error::OutOfRange {
                name: "basis_state",
                value: basis_state as f64,
                range: "0..=7",
            });
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1]",
            });
        }
        Ok(Self {
            basis_state,
            epsilon,
        })
    }
}

pub fn pseudopure(spec: &PseudopureSpec) -> Result<DensityMatrix> {
    let spec = PseudopureSpec::new(spec.basis_state, spec.epsilon)?;
    let background = (1.0 - spec.epsilon) / 8.0;
    let diag: Vec<Cplx> = (0..8)
        .map(|k| {
            let extra = if k == spec.basis_state { spec.epsilon } else { 0.0 };
            Cplx::new(background + extra, 0.0)
        })
        .collect();
    DensityMatrix::new(CMatrix::from_diagonal(&diag)?)
}

/// Parses a 3-character binary label such as `"100"`.
pub fn parse_basis_label(label: &str) -> Result<usize> {
    if label.len() != 3 || !label.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Parse(format!("`{label}` is not a 3-bit basis label")));
    }
    usize::from_str_radix(label, 2).map_err(|e| Error::Parse(e.to_string()))
}

pub fn basis_label(index: usize, qubits: usize) -> String {
    format!("{index:0width$b}", width = qubits)
}
