//! Ideal gate-level preparation circuits.
//!
//! Qubits are numbered 1..=3 with qubit 1 the most significant bit.
//! Controlled rotations use the convention
//! `|1>_c|0>_t -> cos(t)|10> + sin(t)|11>` for a `2t` rotation, so every
//! amplitude produced by the preparation sequences is non-negative.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, Cplx, Ket, ONE, ZERO};
use crate::states::GenericParams;

const DIM: usize = 8;

fn check_qubit(q: usize) -> Result<()> {
    if (1..=3).contains(&q) {
        Ok(())
    } else {
        Err(Error::Qubits(format!("qubit {q} not in 1..=3")))
    }
}

fn check_distinct(qs: &[usize]) -> Result<()> {
    for &q in qs {
        check_qubit(q)?;
    }
    for (i, a) in qs.iter().enumerate() {
        if qs[i + 1..].contains(a) {
            return Err(Error::Qubits(format!("repeated qubit {a} in {qs:?}")));
        }
    }
    Ok(())
}

/// Bit of basis `index` belonging to 1-based `qubit`.
pub fn qubit_bit(index: usize, qubit: usize) -> usize {
    (index >> (3 - qubit)) & 1
}

fn qubit_mask(qubit: usize) -> usize {
    1 << (3 - qubit)
}

/// `exp(-i angle/2 (cos(p) sx + sin(p) sy))`.
pub fn axis_rotation(angle: f64, axis_phase: f64) -> [[Cplx; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let off = Cplx::new(0.0, -s);
    [
        [Cplx::new(c, 0.0), off * Cplx::from_polar(1.0, -axis_phase)],
        [off * Cplx::from_polar(1.0, axis_phase), Cplx::new(c, 0.0)],
    ]
}

/// 8x8 unitary applying `op` to `target` when all `controls` are 1.
fn controlled_unitary(controls: &[usize], target: usize, op: [[Cplx; 2]; 2]) -> CMatrix {
    let tmask = qubit_mask(target);
    CMatrix::from_fn(DIM, |row, col| {
        let active = controls.iter().all(|&c| qubit_bit(col, c) == 1);
        if !active {
            return if row == col { ONE } else { ZERO };
        }
        if row & !tmask != col & !tmask {
            return ZERO;
        }
        op[qubit_bit(row, target)][qubit_bit(col, target)]
    })
    .expect("dim 8")
}

/// Rotation by pi restricted to the levels `{a, b}` about an axis at
/// `axis_phase` in the xy plane, identity elsewhere.
pub(crate) fn level_pi_rotation(level_a: usize, level_b: usize, axis_phase: f64) -> CMatrix {
    let r = axis_rotation(std::f64::consts::PI, axis_phase);
    let pick = |l: usize| if l == level_a { Some(0) } else if l == level_b { Some(1) } else { None };
    CMatrix::from_fn(DIM, |row, col| match (pick(row), pick(col)) {
        (Some(i), Some(j)) => r[i][j],
        (None, None) if row == col => ONE,
        _ => ZERO,
    })
    .expect("dim 8")
}

/// What a gate does, kept alongside its matrix for serialization.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Rot { qubit: usize, angle: f64, axis_phase: f64 },
    Cnot { control: usize, target: usize },
    Crot { control: usize, target: usize, angle: f64 },
    Toffoli { controls: [usize; 2], target: usize },
    CcPhase { controls: [usize; 2], target: usize, phi: f64 },
    TransitionPi { level_a: usize, level_b: usize, phi: f64 },
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub label: String,
    unitary: CMatrix,
}

impl Gate {
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn from_kind(kind: GateKind) -> Result<Gate> {
        match kind {
            GateKind::Rot { qubit, angle, axis_phase } => rot1(qubit, angle, axis_phase),
            GateKind::Cnot { control, target } => cnot(control, target),
            GateKind::Crot { control, target, angle } => crot(control, target, angle),
            GateKind::Toffoli { controls, target } => toffoli(controls[0], controls[1], target),
            GateKind::CcPhase { controls, target, phi } => {
                ccphase(controls[0], controls[1], target, phi)
            }
            GateKind::TransitionPi { level_a, level_b, phi } => transition_pi(level_a, level_b, phi),
        }
    }
}

/// Single-qubit rotation by `angle` about `cos(p) x + sin(p) y`.
pub fn rot1(qubit: usize, angle: f64, axis_phase: f64) -> Result<Gate> {
    check_qubit(qubit)?;
    Ok(Gate {
        kind: GateKind::Rot { qubit, angle, axis_phase },
        label: format!("R{qubit}({:.2},{:.2})", angle.to_degrees(), axis_phase.to_degrees()),
        unitary: controlled_unitary(&[], qubit, axis_rotation(angle, axis_phase)),
    })
}

/// Rotation about +y, the preparation rotation `U_{angle}` on `qubit`.
pub fn rot_y(qubit: usize, angle: f64) -> Result<Gate> {
    rot1(qubit, angle, FRAC_PI_2)
}

pub fn cnot(control: usize, target: usize) -> Result<Gate> {
    check_distinct(&[control, target])?;
    let x = [[ZERO, ONE], [ONE, ZERO]];
    Ok(Gate {
        kind: GateKind::Cnot { control, target },
        label: format!("CNOT{control}{target}"),
        unitary: controlled_unitary(&[control], target, x),
    })
}

/// Controlled rotation `CROT^{angle}`: the target is rotated by `angle`
/// about y when the control is 1.
pub fn crot(control: usize, target: usize, angle: f64) -> Result<Gate> {
    check_distinct(&[control, target])?;
    Ok(Gate {
        kind: GateKind::Crot { control, target, angle },
        label: format!("CROT{control}{target}({:.2})", angle.to_degrees()),
        unitary: controlled_unitary(&[control], target, axis_rotation(angle, FRAC_PI_2)),
    })
}

pub fn toffoli(c1: usize, c2: usize, target: usize) -> Result<Gate> {
    check_distinct(&[c1, c2, target])?;
    let x = [[ZERO, ONE], [ONE, ZERO]];
    Ok(Gate {
        kind: GateKind::Toffoli { controls: [c1, c2], target },
        label: format!("CCN{c1}{c2},{target}"),
        unitary: controlled_unitary(&[c1, c2], target, x),
    })
}

/// Doubly-controlled phase: `e^{i phi}` on the component with all three
/// qubits set.
pub fn ccphase(c1: usize, c2: usize, target: usize, phi: f64) -> Result<Gate> {
    check_distinct(&[c1, c2, target])?;
    let p = [[ONE, ZERO], [ZERO, Cplx::from_polar(1.0, phi)]];
    Ok(Gate {
        kind: GateKind::CcPhase { controls: [c1, c2], target, phi },
        label: format!("Ph{c1}{c2},{target}({:.2})", phi.to_degrees()),
        unitary: controlled_unitary(&[c1, c2], target, p),
    })
}

/// Transition-selective pi rotation between basis levels `a` and `b` about
/// the axis at `phi + pi/2`: `<b|U|a> = e^{i phi}`, `<a|U|b> = -e^{-i phi}`.
pub fn transition_pi(level_a: usize, level_b: usize, phi: f64) -> Result<Gate> {
    if level_a >= DIM || level_b >= DIM || level_a == level_b {
        return Err(Error::Qubits(format!(
            "transition levels ({level_a}, {level_b}) must be distinct and < 8"
        )));
    }
    Ok(Gate {
        kind: GateKind::TransitionPi { level_a, level_b, phi },
        label: format!("Pi[{level_a:03b}<->{level_b:03b}]({:.2})", phi.to_degrees()),
        unitary: level_pi_rotation(level_a, level_b, phi + FRAC_PI_2),
    })
}

/// Ordered gate list applied left to right.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Product of the gate unitaries, last gate leftmost.
    pub fn unitary(&self) -> CMatrix {
        self.gates
            .iter()
            .fold(CMatrix::identity(DIM).expect("dim 8"), |acc, g| g.unitary() * &acc)
    }

    /// States after each gate, starting with `k` itself.
    pub fn trajectory(&self, k: &Ket) -> Result<Vec<Ket>> {
        let mut out = vec![k.clone()];
        for g in &self.gates {
            let next = apply_gate(g, out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

fn apply_gate(g: &Gate, k: &Ket) -> Result<Ket> {
    if k.dim() != DIM {
        return Err(Error::Dimension(format!("circuit acts on dim 8, ket has {}", k.dim())));
    }
    Ket::normalized(g.unitary().apply(k.amps()))
}

pub fn apply(c: &Circuit, k: &Ket) -> Result<Ket> {
    if k.dim() != DIM {
        return Err(Error::Dimension(format!("circuit acts on dim 8, ket has {}", k.dim())));
    }
    c.gates.iter().try_fold(k.clone(), |acc, g| apply_gate(g, &acc))
}

/// Full canonical-state sequence from `|000>`. With `fuse`, the final
/// Toffoli and doubly-controlled phase are merged into one
/// transition-selective pulse on the `|110> <-> |111>` transition.
pub fn build_generic_circuit(p: &GenericParams, fuse: bool) -> Result<Circuit> {
    let p = p.validate()?;
    let mut gates = vec![
        rot_y(1, 2.0 * p.alpha)?,
        crot(1, 2, 2.0 * p.beta)?,
        cnot(2, 1)?,
        crot(1, 3, 2.0 * p.gamma)?,
        cnot(3, 1)?,
        crot(1, 2, 2.0 * p.delta)?,
    ];
    if fuse {
        gates.push(transition_pi(0b110, 0b111, p.phi)?);
    } else {
        gates.push(toffoli(1, 2, 3)?);
        gates.push(ccphase(1, 2, 3, p.phi)?);
    }
    Ok(Circuit::new(gates))
}

/// `cos(a)|000> + sin(a)|111>` from `|000>`: rotation then two CNOTs.
pub fn ghz_circuit(alpha: f64) -> Result<Circuit> {
    Ok(Circuit::new(vec![rot_y(1, 2.0 * alpha)?, cnot(1, 2)?, cnot(1, 3)?]))
}

/// W-family sequence starting from `|100>`. The controlled rotation on
/// qubit 2 is replaced by a plain rotation since qubit 1 is already set.
pub fn w_circuit(beta: f64, gamma: f64) -> Result<Circuit> {
    Ok(Circuit::new(vec![
        rot_y(2, 2.0 * beta)?,
        cnot(2, 1)?,
        crot(1, 3, 2.0 * gamma)?,
        cnot(3, 1)?,
    ]))
}

/// W-family sequence from `|000>` without the shortcut of [`w_circuit`].
pub fn w_circuit_from_ground(beta: f64, gamma: f64) -> Result<Circuit> {
    Ok(Circuit::new(vec![
        rot_y(1, std::f64::consts::PI)?,
        crot(1, 2, 2.0 * beta)?,
        cnot(2, 1)?,
        crot(1, 3, 2.0 * gamma)?,
        cnot(3, 1)?,
    ]))
}

/// One entry of the circuit file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub gate: String,
    /// Qubit numbers, or the two basis levels for `transition_pi`.
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params_deg: Vec<f64>,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        let (gate, qubits, params) = match &g.kind {
            GateKind::Rot { qubit, angle, axis_phase } => {
                ("rot", vec![*qubit], vec![*angle, *axis_phase])
            }
            GateKind::Cnot { control, target } => ("cnot", vec![*control, *target], vec![]),
            GateKind::Crot { control, target, angle } => {
                ("crot", vec![*control, *target], vec![*angle])
            }
            GateKind::Toffoli { controls, target } => {
                ("toffoli", vec![controls[0], controls[1], *target], vec![])
            }
            GateKind::CcPhase { controls, target, phi } => {
                ("ccphase", vec![controls[0], controls[1], *target], vec![*phi])
            }
            GateKind::TransitionPi { level_a, level_b, phi } => {
                ("transition_pi", vec![*level_a, *level_b], vec![*phi])
            }
        };
        GateRecord {
            gate: gate.to_string(),
            qubits,
            params_deg: params.iter().map(|x| x.to_degrees()).collect(),
        }
    }
}

impl TryFrom<&GateRecord> for Gate {
    type Error = Error;
    fn try_from(r: &GateRecord) -> Result<Gate> {
        let q = |n: usize| -> Result<&[usize]> {
            if r.qubits.len() == n {
                Ok(&r.qubits)
            } else {
                Err(Error::Parse(format!("gate `{}` needs {n} qubits", r.gate)))
            }
        };
        let p = |n: usize| -> Result<Vec<f64>> {
            if r.params_deg.len() == n {
                Ok(r.params_deg.iter().map(|d| d.to_radians()).collect())
            } else {
                Err(Error::Parse(format!("gate `{}` needs {n} parameters", r.gate)))
            }
        };
        match r.gate.as_str() {
            "rot" => {
                let qs = q(1)?;
                let ps = if r.params_deg.len() == 1 { vec![r.params_deg[0].to_radians(), FRAC_PI_2] } else { p(2)? };
                rot1(qs[0], ps[0], ps[1])
            }
            "cnot" => {
                let qs = q(2)?;
                cnot(qs[0], qs[1])
            }
            "crot" => {
                let qs = q(2)?;
                crot(qs[0], qs[1], p(1)?[0])
            }
            "toffoli" => {
                let qs = q(3)?;
                toffoli(qs[0], qs[1], qs[2])
            }
            "ccphase" => {
                let qs = q(3)?;
                ccphase(qs[0], qs[1], qs[2], p(1)?[0])
            }
            "transition_pi" => {
                let qs = q(2)?;
                transition_pi(qs[0], qs[1], p(1)?[0])
            }
            other => Err(Error::Parse(format!("unknown gate `{other}`"))),
        }
    }
}

impl Circuit {
    pub fn to_records(&self) -> Vec<GateRecord> {
        self.gates.iter().map(GateRecord::from).collect()
    }

    pub fn from_records(records: &[GateRecord]) -> Result<Circuit> {
        records.iter().map(Gate::try_from).collect::<Result<Vec<_>>>().map(Circuit::new)
    }
}
