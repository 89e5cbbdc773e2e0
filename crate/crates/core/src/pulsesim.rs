//! Pulse-level simulation of the three-spin register.
//!
//! RF pulses are instantaneous. Free evolution follows the weak-coupling
//! rotating-frame Hamiltonian `H = sum nu_i Iz_i + sum J_ij Iz_i Iz_j` (Hz),
//! propagated as `exp(-i 2 pi H t)`.
//!
//! Coupling windows are split into quarters. Each qubit follows one of two
//! sign patterns, flipped by pi pulses: `Late` (pi at T/2 and T) or `Early`
//! (pi at T/4 and 3T/4). A pair evolves under its coupling only when both
//! qubits share a pattern; offsets cancel for every qubit.
//!
//! A net `exp(-i pi m IzIz)` with integer `m` equals a controlled-Z to the
//! power `m` times local z rotations by `m pi/2`. The `Short` compilation
//! leaves those rotations in place and tracks them as per-qubit frames:
//! later pulses are phase-shifted so that the program equals the ideal
//! sequence followed by `Rz(frames)`. The pending compensation is `-frames`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{axis_rotation, level_pi_rotation, qubit_bit};
use crate::qcore::{lift_single, CMatrix, Cplx, DensityMatrix, ONE, ZERO};
use crate::states::GenericParams;

const DIM: usize = 8;
const INTEGER_TOL: f64 = 1e-9;

mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(x.to_degrees())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d).map(f64::to_radians)
    }

    pub mod triple {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(x: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
            x.map(f64::to_degrees).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 3], D::Error> {
            <[f64; 3]>::deserialize(d).map(|a| a.map(f64::to_radians))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coupling {
    J12,
    J13,
    J23,
}

impl Coupling {
    pub const ALL: [Coupling; 3] = [Coupling::J12, Coupling::J13, Coupling::J23];

    /// 1-based qubit pair.
    pub fn qubits(self) -> (usize, usize) {
        match self {
            Coupling::J12 => (1, 2),
            Coupling::J13 => (1, 3),
            Coupling::J23 => (2, 3),
        }
    }

    pub fn between(a: usize, b: usize) -> Result<Coupling> {
        match (a.min(b), a.max(b)) {
            (1, 2) => Ok(Coupling::J12),
            (1, 3) => Ok(Coupling::J13),
            (2, 3) => Ok(Coupling::J23),
            _ => Err(Error::Qubits(format!("no coupling between qubits {a} and {b}"))),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Offsets and scalar couplings (Hz) plus relaxation times (s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    pub nu: [f64; 3],
    /// `[J12, J13, J23]`.
    pub j: [f64; 3],
    pub t1: f64,
    pub t2: f64,
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self { nu: [0.0; 3], j: [69.8, 47.5, -129.0], t1: 5.0, t2: 1.0 }
    }
}

impl SpinSystem {
    pub fn coupling(&self, c: Coupling) -> f64 {
        self.j[c.index()]
    }

    /// `1/(2|J|)`, the time for a controlled-Z class evolution.
    pub fn tau(&self, c: Coupling) -> Result<f64> {
        let j = self.coupling(c);
        if j == 0.0 || !j.is_finite() {
            return Err(Error::Program(format!("coupling {c:?} is {j}; cannot build a gate on it")));
        }
        Ok(0.5 / j.abs())
    }

    pub fn validate(&self, relaxation: bool) -> Result<()> {
        if self.nu.iter().chain(&self.j).any(|x| !x.is_finite()) {
            return Err(Error::Program("non-finite spin system parameter".into()));
        }
        if relaxation && !(self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(Error::OutOfRange { name: "T1/T2", value: self.t1.min(self.t2), range: "(0, inf)" });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum PulseEvent {
    Rf {
        targets: Vec<usize>,
        #[serde(rename = "flip_deg", with = "degrees")]
        flip: f64,
        #[serde(rename = "phase_deg", with = "degrees")]
        phase: f64,
    },
    Delay {
        duration: f64,
        /// Couplings meant to act during this delay.
        couplings: Vec<Coupling>,
    },
    ZRot {
        targets: Vec<usize>,
        #[serde(rename = "angle_deg", with = "degrees")]
        angle: f64,
    },
    Transition {
        level_a: usize,
        level_b: usize,
        #[serde(rename = "axis_phase_deg", with = "degrees")]
        axis_phase: f64,
    },
}

impl PulseEvent {
    fn validate(&self) -> Result<()> {
        let check_targets = |t: &[usize]| -> Result<()> {
            if t.is_empty() {
                return Err(Error::Program("pulse without targets".into()));
            }
            if let Some(q) = t.iter().find(|q| !(1..=3).contains(*q)) {
                return Err(Error::Program(format!("target qubit {q} not in 1..=3")));
            }
            Ok(())
        };
        match self {
            PulseEvent::Rf { targets, flip, phase } => {
                check_targets(targets)?;
                if !flip.is_finite() || !phase.is_finite() {
                    return Err(Error::Program("non-finite pulse angle".into()));
                }
            }
            PulseEvent::Delay { duration, .. } => {
                if !(duration.is_finite() && *duration >= 0.0) {
                    return Err(Error::Program(format!("invalid delay {duration}")));
                }
            }
            PulseEvent::ZRot { targets, angle } => {
                check_targets(targets)?;
                if !angle.is_finite() {
                    return Err(Error::Program("non-finite z rotation".into()));
                }
            }
            PulseEvent::Transition { level_a, level_b, axis_phase } => {
                if *level_a >= DIM || *level_b >= DIM || level_a == level_b || !axis_phase.is_finite() {
                    return Err(Error::Program(format!("invalid transition ({level_a}, {level_b})")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    pub events: Vec<PulseEvent>,
    /// z rotation per qubit still to be applied at the end, radians.
    #[serde(default, rename = "compensation_deg", with = "degrees::triple")]
    pub compensation: [f64; 3],
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if (TAU - w) < 1e-12 {
        0.0
    } else {
        w
    }
}

impl PulseProgram {
    pub fn validate(&self) -> Result<()> {
        self.events.iter().try_for_each(PulseEvent::validate)
    }

    pub fn is_finalized(&self) -> bool {
        self.compensation.iter().all(|&a| wrap_angle(a) == 0.0)
    }

    /// Sum of delay durations.
    pub fn duration(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Delay { duration, .. } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    /// Appends the pending compensation as explicit z rotations.
    pub fn finalize(self) -> PulseProgram {
        self.finalize_with_residual([0.0; 3])
    }

    /// Like [`finalize`](Self::finalize) but leaves `residual[q]` of z
    /// rotation on each qubit, so the output is `Rz(residual)` applied to
    /// the ideal result.
    pub fn finalize_with_residual(mut self, residual: [f64; 3]) -> PulseProgram {
        let total: Vec<f64> =
            self.compensation.iter().zip(&residual).map(|(c, r)| wrap_angle(c + r)).collect();
        push_zrots(&mut self.events, &total);
        self.compensation = [0.0; 3];
        self
    }
}

/// Emits per-qubit z rotations, merging qubits with equal angles.
fn push_zrots(events: &mut Vec<PulseEvent>, angles: &[f64]) {
    let mut done = [false; 3];
    for q in 0..3 {
        if done[q] || angles[q] == 0.0 {
            continue;
        }
        let targets: Vec<usize> =
            (q..3).filter(|&r| (angles[r] - angles[q]).abs() < 1e-12).collect();
        for &r in &targets {
            done[r] = true;
        }
        events.push(PulseEvent::ZRot {
            targets: targets.iter().map(|r| r + 1).collect(),
            angle: angles[q],
        });
    }
}

/// Free-evolution propagator for `t` seconds, keeping only `active`
/// couplings and, optionally, the offsets. Diagonal.
pub fn delay_unitary(t: f64, sys: &SpinSystem, active: &[Coupling], include_offsets: bool) -> CMatrix {
    let diag: Vec<Cplx> = (0..DIM)
        .map(|idx| {
            let z = |q: usize| 0.5 - qubit_bit(idx, q) as f64;
            let mut energy = 0.0;
            if include_offsets {
                energy += (1..=3).map(|q| sys.nu[q - 1] * z(q)).sum::<f64>();
            }
            for &c in active {
                let (a, b) = c.qubits();
                energy += sys.coupling(c) * z(a) * z(b);
            }
            Cplx::from_polar(1.0, -TAU * energy * t)
        })
        .collect();
    CMatrix::from_diagonal(&diag).expect("dim 8")
}

fn lift(op: [[Cplx; 2]; 2], qubit: usize) -> CMatrix {
    let m = CMatrix::from_fn(2, |r, c| op[r][c]).expect("dim 2");
    lift_single(&m, qubit - 1, 3).expect("qubit in range")
}

/// `exp(-i angle Iz)` on one qubit.
fn zrot(angle: f64) -> [[Cplx; 2]; 2] {
    [[Cplx::from_polar(1.0, -angle / 2.0), ZERO], [ZERO, Cplx::from_polar(1.0, angle / 2.0)]]
}

/// Which couplings act during simulated delays.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingMode {
    /// Every coupling of the system, regardless of the event's declaration.
    #[default]
    All,
    /// Only the couplings each delay declares.
    Declared,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub relaxation: bool,
    pub couplings: CouplingMode,
    pub offsets: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { relaxation: false, couplings: CouplingMode::All, offsets: true }
    }
}

fn event_unitary(e: &PulseEvent, sys: &SpinSystem, opts: &EvolveOptions) -> CMatrix {
    match e {
        PulseEvent::Rf { targets, flip, phase } => targets
            .iter()
            .fold(CMatrix::identity(DIM).expect("dim 8"), |acc, &q| &lift(axis_rotation(*flip, *phase), q) * &acc),
        PulseEvent::ZRot { targets, angle } => targets
            .iter()
            .fold(CMatrix::identity(DIM).expect("dim 8"), |acc, &q| &lift(zrot(*angle), q) * &acc),
        PulseEvent::Transition { level_a, level_b, axis_phase } => {
            level_pi_rotation(*level_a, *level_b, *axis_phase)
        }
        PulseEvent::Delay { duration, couplings } => {
            let active: &[Coupling] = match opts.couplings {
                CouplingMode::All => &Coupling::ALL,
                CouplingMode::Declared => couplings,
            };
            delay_unitary(*duration, sys, active, opts.offsets)
        }
    }
}

/// Net unitary of a program, first event rightmost.
pub fn program_unitary(prog: &PulseProgram, sys: &SpinSystem, opts: &EvolveOptions) -> Result<CMatrix> {
    prog.validate()?;
    Ok(prog
        .events
        .iter()
        .fold(CMatrix::identity(DIM).expect("dim 8"), |acc, e| &event_unitary(e, sys, opts) * &acc))
}

/// Per-qubit relaxation over `t` seconds: amplitude damping towards `|0>`
/// at rate `1/T1` and extra pure dephasing so coherences decay at `1/T2`.
fn relax(rho: &CMatrix, t: f64, sys: &SpinSystem) -> CMatrix {
    let gamma = 1.0 - (-t / sys.t1).exp();
    let dephase_rate = (1.0 / sys.t2 - 0.5 / sys.t1).max(0.0);
    let lambda = (-t * dephase_rate).exp();
    let s = |x: f64| Cplx::new(x.sqrt(), 0.0);
    let kraus: [[[Cplx; 2]; 2]; 4] = [
        [[ONE, ZERO], [ZERO, s(1.0 - gamma)]],
        [[ZERO, s(gamma)], [ZERO, ZERO]],
        [[s((1.0 + lambda) / 2.0), ZERO], [ZERO, s((1.0 + lambda) / 2.0)]],
        [[s((1.0 - lambda) / 2.0), ZERO], [ZERO, -s((1.0 - lambda) / 2.0)]],
    ];
    let mut out = rho.clone();
    for q in 1..=3 {
        for pair in [&kraus[0..2], &kraus[2..4]] {
            let mut next = CMatrix::zeros(DIM).expect("dim 8");
            for k in pair {
                let kq = lift(*k, q);
                next = &next + &out.conjugate_by(&kq);
            }
            out = next;
        }
    }
    out
}

/// Runs `prog` on `rho` with all couplings and the system offsets.
pub fn evolve(prog: &PulseProgram, rho: &DensityMatrix, sys: &SpinSystem, relaxation: bool) -> Result<DensityMatrix> {
    evolve_with(prog, rho, sys, &EvolveOptions { relaxation, ..EvolveOptions::default() })
}

pub fn evolve_with(
    prog: &PulseProgram,
    rho: &DensityMatrix,
    sys: &SpinSystem,
    opts: &EvolveOptions,
) -> Result<DensityMatrix> {
    if rho.dim() != DIM {
        return Err(Error::Dimension(format!("pulse programs act on dim 8, state has {}", rho.dim())));
    }
    prog.validate()?;
    sys.validate(opts.relaxation)?;
    let mut m = rho.matrix().clone();
    for e in &prog.events {
        m = m.conjugate_by(&event_unitary(e, sys, opts));
        if let (true, PulseEvent::Delay { duration, .. }) = (opts.relaxation, e) {
            m = relax(&m, *duration, sys);
        }
    }
    Ok(DensityMatrix::new_unchecked(m.hermitian_part()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrotVariant {
    /// Coupling-induced z rotations are undone inside each block.
    Ideal,
    /// z rotations are carried as frames and compensated at the end.
    #[default]
    Short,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Echo {
    /// pi pulses at T/2 and T.
    Late,
    /// pi pulses at T/4 and 3T/4.
    Early,
}

impl Echo {
    fn sign(self, quarter: usize) -> f64 {
        match (self, quarter) {
            (Echo::Late, 0 | 1) | (Echo::Early, 0 | 3) => 1.0,
            _ => -1.0,
        }
    }
}

struct Builder<'a> {
    sys: &'a SpinSystem,
    variant: CrotVariant,
    events: Vec<PulseEvent>,
    frames: [f64; 3],
    /// Signed coupling time accumulated in the open echo segment.
    pending: [f64; 3],
}

impl<'a> Builder<'a> {
    fn new(sys: &'a SpinSystem, variant: CrotVariant) -> Self {
        Self { sys, variant, events: Vec::new(), frames: [0.0; 3], pending: [0.0; 3] }
    }

    /// Ideal rotation on each target, shifted into the current frame.
    fn rf(&mut self, targets: &[usize], flip: f64, phase: f64) {
        let mut remaining: Vec<usize> = targets.to_vec();
        while let Some(&q) = remaining.first() {
            let shifted = wrap_angle(phase + self.frames[q - 1]);
            let (same, rest): (Vec<usize>, Vec<usize>) = remaining
                .iter()
                .partition(|&&r| (wrap_angle(phase + self.frames[r - 1]) - shifted).abs() < 1e-12);
            self.events.push(PulseEvent::Rf { targets: same, flip, phase: shifted });
            remaining = rest;
        }
    }

    fn transition(&mut self, a: usize, b: usize, axis: f64) {
        let shift: f64 = (1..=3)
            .map(|q| self.frames[q - 1] * (qubit_bit(b, q) as f64 - qubit_bit(a, q) as f64))
            .sum();
        self.events.push(PulseEvent::Transition { level_a: a, level_b: b, axis_phase: wrap_angle(axis + shift) });
    }

    /// One echo window of length `t` with the given pattern per qubit.
    fn window(&mut self, t: f64, patterns: [Echo; 3]) {
        if t <= 0.0 {
            return;
        }
        let declared: Vec<Coupling> = Coupling::ALL
            .into_iter()
            .filter(|c| {
                let (a, b) = c.qubits();
                patterns[a - 1] == patterns[b - 1]
            })
            .collect();
        for c in &declared {
            self.pending[c.index()] += t;
        }
        let with = |p: Echo| -> Vec<usize> { (1..=3).filter(|&q| patterns[q - 1] == p).collect() };
        let (early, late) = (with(Echo::Early), with(Echo::Late));
        for quarter in 0..4 {
            self.events.push(PulseEvent::Delay { duration: t / 4.0, couplings: declared.clone() });
            let flips = match quarter {
                0 | 2 => &early,
                _ => &late,
            };
            if !flips.is_empty() {
                let flips = flips.clone();
                self.rf(&flips, PI, FRAC_PI_2);
            }
        }
        debug_assert!(Coupling::ALL.iter().all(|c| {
            let (a, b) = c.qubits();
            let net: f64 = (0..4).map(|k| patterns[a - 1].sign(k) * patterns[b - 1].sign(k)).sum();
            (net.abs() < 1e-12) == !declared.contains(c)
        }));
    }

    /// Closes an echo segment. Each pair's evolution must be a whole
    /// multiple of a controlled-Z; the leftover local rotations become
    /// frames (short) or explicit z rotations (ideal).
    fn close_segment(&mut self) -> Result<()> {
        let mut local = [0.0; 3];
        for c in Coupling::ALL {
            let t = std::mem::take(&mut self.pending[c.index()]);
            if t == 0.0 {
                continue;
            }
            let m = 2.0 * self.sys.coupling(c) * t;
            if (m - m.round()).abs() > INTEGER_TOL {
                return Err(Error::Program(format!(
                    "coupling {c:?} evolves for {m:.6} half-turns, not a whole number"
                )));
            }
            let (a, b) = c.qubits();
            local[a - 1] += m.round() * FRAC_PI_2;
            local[b - 1] += m.round() * FRAC_PI_2;
        }
        match self.variant {
            CrotVariant::Short => {
                for q in 0..3 {
                    self.frames[q] = wrap_angle(self.frames[q] + local[q]);
                }
            }
            CrotVariant::Ideal => {
                let undo: Vec<f64> = local.iter().map(|x| wrap_angle(-x)).collect();
                push_zrots(&mut self.events, &undo);
            }
        }
        Ok(())
    }

    /// `Ry(theta)_t CZ Ry(-theta)_t`: a rotation of the target by `2 theta`
    /// conditioned on the control, exact on inputs with the target in `|0>`.
    fn crot_block(&mut self, control: usize, target: usize, theta: f64) -> Result<()> {
        let c = Coupling::between(control, target)?;
        let tau = self.sys.tau(c)?;
        let spectator = 6 - control - target;
        let mut patterns = [Echo::Late; 3];
        patterns[spectator - 1] = Echo::Early;
        self.rf(&[target], theta, -FRAC_PI_2);
        self.window(tau, patterns);
        self.close_segment()?;
        self.rf(&[target], theta, FRAC_PI_2);
        Ok(())
    }

    fn finish(self) -> PulseProgram {
        PulseProgram { events: self.events, compensation: self.frames.map(|f| wrap_angle(-f)) }
    }
}

fn check_angle(name: &'static str, x: f64, hi: f64) -> Result<()> {
    if x.is_finite() && (-1e-12..=hi + 1e-12).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: x, range: "[0, pi/2]" })
    }
}

/// Controlled rotation block with flip angle `theta`: the target turns by
/// `2 theta` about y when the control is set and starts in `|0>`. At
/// `theta = pi/2` the block is exactly a CNOT.
pub fn compile_crot(
    control: usize,
    target: usize,
    theta: f64,
    variant: CrotVariant,
    sys: &SpinSystem,
) -> Result<PulseProgram> {
    if !theta.is_finite() {
        return Err(Error::OutOfRange { name: "theta", value: theta, range: "finite" });
    }
    let mut b = Builder::new(sys, variant);
    b.crot_block(control, target, theta)?;
    Ok(b.finish())
}

/// Full preparation of the canonical state from `|000>`, unfinalized.
pub fn compile_generic(p: &GenericParams, sys: &SpinSystem) -> Result<PulseProgram> {
    compile_generic_variant(p, sys, CrotVariant::Short)
}

pub fn compile_generic_variant(p: &GenericParams, sys: &SpinSystem, variant: CrotVariant) -> Result<PulseProgram> {
    let p = p.validate()?;
    let mut b = Builder::new(sys, variant);
    b.rf(&[1], 2.0 * p.alpha, FRAC_PI_2);
    b.crot_block(1, 2, p.beta)?;
    b.crot_block(2, 1, FRAC_PI_2)?;
    b.crot_block(1, 3, p.gamma)?;
    b.crot_block(3, 1, FRAC_PI_2)?;
    b.crot_block(1, 2, p.delta)?;
    b.transition(0b110, 0b111, p.phi + FRAC_PI_2);
    Ok(b.finish())
}

/// GHZ-family preparation from `|000>`.
///
/// When `1/(2|J13|) > 1/(2|J12|)` the two CNOTs share their evolution:
/// a J13-only window of `tau_d`, a window with every coupling active for
/// `tau12`, another `tau_d` J13-only window, and a J23-only window that
/// brings the J23 evolution to a whole number of turns so it reduces to
/// local z rotations. Otherwise the CNOTs run one after the other.
pub fn compile_ghz(alpha: f64, sys: &SpinSystem) -> Result<PulseProgram> {
    check_angle("alpha", alpha, FRAC_PI_2)?;
    let tau12 = sys.tau(Coupling::J12)?;
    let tau13 = sys.tau(Coupling::J13)?;
    let mut b = Builder::new(sys, CrotVariant::Short);
    b.rf(&[1], 2.0 * alpha, FRAC_PI_2);
    if tau13 <= tau12 {
        warn!("tau13 = {tau13:.3e} s does not exceed tau12 = {tau12:.3e} s; using sequential CNOTs");
        b.crot_block(1, 2, FRAC_PI_2)?;
        b.crot_block(1, 3, FRAC_PI_2)?;
        return Ok(b.finish());
    }
    let tau_d = (tau13 - tau12) / 2.0;
    use Echo::{Early, Late};
    b.rf(&[2, 3], FRAC_PI_2, -FRAC_PI_2);
    b.window(tau_d, [Late, Early, Late]);
    b.window(tau12, [Late, Late, Late]);
    b.window(tau_d, [Late, Early, Late]);
    let j23 = sys.coupling(Coupling::J23);
    if j23 != 0.0 {
        let turns = (j23.abs() * tau12 - INTEGER_TOL).ceil().max(1.0);
        b.window(turns / j23.abs() - tau12, [Early, Late, Late]);
    }
    b.close_segment()?;
    b.rf(&[2, 3], FRAC_PI_2, FRAC_PI_2);
    Ok(b.finish())
}

/// W-family preparation starting from `|100>`.
pub fn compile_w(beta: f64, gamma: f64, sys: &SpinSystem) -> Result<PulseProgram> {
    check_angle("beta", beta, FRAC_PI_2)?;
    check_angle("gamma", gamma, FRAC_PI_2)?;
    let mut b = Builder::new(sys, CrotVariant::Short);
    b.rf(&[2], 2.0 * beta, FRAC_PI_2);
    b.crot_block(2, 1, FRAC_PI_2)?;
    b.crot_block(1, 3, gamma)?;
    b.crot_block(3, 1, FRAC_PI_2)?;
    Ok(b.finish())
}

/// Gate-level unitary of one controlled-rotation block,
/// `Ry(theta)_t CZ Ry(-theta)_t`.
pub fn crot_block_unitary(control: usize, target: usize, theta: f64) -> Result<CMatrix> {
    Coupling::between(control, target)?;
    let ry = |a: f64| lift(axis_rotation(a, FRAC_PI_2), target);
    let cz = CMatrix::from_diagonal(
        &(0..DIM)
            .map(|i| if qubit_bit(i, control) & qubit_bit(i, target) == 1 { -ONE } else { ONE })
            .collect::<Vec<_>>(),
    )?;
    Ok(&(&ry(theta) * &cz) * &ry(-theta))
}

/// `exp(-i a_q Iz_q)` on all three qubits.
pub fn zrot_unitary(angles: [f64; 3]) -> CMatrix {
    (1..=3).fold(CMatrix::identity(DIM).expect("dim 8"), |acc, q| &lift(zrot(angles[q - 1]), q) * &acc)
}
