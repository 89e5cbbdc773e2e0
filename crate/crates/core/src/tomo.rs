//! Simulated NMR state tomography.
//!
//! Each readout operation applies per-qubit pi/2 pulses (`X`, `Y`) or
//! nothing (`I`), then records one complex amplitude per resolved line:
//! for spin `k` with the two other spins in basis state `s`, the signal is
//! `Tr[rho' (P_s (x) (Ix + i Iy)_k)] = rho'[(1_k, s), (0_k, s)]`.
//!
//! Inversion writes `rho = (I + sum_P c_P P) / d` over non-identity Pauli
//! strings and solves for the real `c_P` by least squares.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::axis_rotation;
use crate::qcore::{kron, psd_project, CMatrix, Cplx, DensityMatrix, ONE, ZERO};

/// Relative eigenvalue floor of the normal matrix for counting rank.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
}

impl Letter {
    fn matrix(self) -> CMatrix {
        let r = match self {
            Letter::I => return CMatrix::identity(2).expect("dim 2"),
            Letter::X => axis_rotation(std::f64::consts::FRAC_PI_2, 0.0),
            Letter::Y => axis_rotation(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
        };
        CMatrix::from_fn(2, |i, j| r[i][j]).expect("dim 2")
    }

    fn from_char(c: char) -> Result<Letter> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Letter::I),
            'X' => Ok(Letter::X),
            'Y' => Ok(Letter::Y),
            other => Err(Error::Parse(format!("unknown tomography letter `{other}`"))),
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
        }
    }
}

/// One readout operation, a letter per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TomoOp(pub [Letter; 3]);

impl FromStr for TomoOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<Letter> = s.trim().chars().map(Letter::from_char).collect::<Result<_>>()?;
        let arr: [Letter; 3] = letters
            .try_into()
            .map_err(|_| Error::Parse(format!("tomography op `{s}` must have three letters")))?;
        Ok(TomoOp(arr))
    }
}

impl fmt::Display for TomoOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl Serialize for TomoOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TomoOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl TomoOp {
    /// All 27 letter triples.
    pub fn all() -> Vec<TomoOp> {
        let l = [Letter::I, Letter::X, Letter::Y];
        let mut out = Vec::with_capacity(27);
        for a in l {
            for b in l {
                for c in l {
                    out.push(TomoOp([a, b, c]));
                }
            }
        }
        out
    }

    fn without(self, qubit: usize) -> Vec<Letter> {
        (1..=3).filter(|&q| q != qubit).map(|q| self.0[q - 1]).collect()
    }
}

fn parse_ops(labels: &[&str]) -> Vec<TomoOp> {
    labels.iter().map(|s| s.parse().expect("valid literal")).collect()
}

/// The eleven-operation set for full three-qubit tomography.
pub fn full_ops() -> Vec<TomoOp> {
    parse_ops(&["III", "IIX", "IXI", "XII", "IIY", "IYI", "YII", "YYI", "IXX", "XXX", "YYY"])
}

/// A smaller seven-operation set.
pub fn seven_ops() -> Vec<TomoOp> {
    parse_ops(&["III", "XXX", "IIY", "XYX", "YII", "XXY", "IYY"])
}

/// Two-qubit marginal labels. Qubits A, B, C are 1, 2, 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairLabel {
    AB,
    BC,
    AC,
}

impl PairLabel {
    pub fn qubits(self) -> (usize, usize) {
        match self {
            PairLabel::AB => (1, 2),
            PairLabel::BC => (2, 3),
            PairLabel::AC => (1, 3),
        }
    }

    pub fn excluded(self) -> usize {
        let (a, b) = self.qubits();
        6 - a - b
    }

    /// Four-operation set sufficient for this marginal.
    pub fn ops(self) -> Vec<TomoOp> {
        match self {
            PairLabel::AB => parse_ops(&["III", "IXI", "IYI", "XXI"]),
            PairLabel::BC => parse_ops(&["III", "IIX", "IIY", "IXX"]),
            PairLabel::AC => parse_ops(&["III", "IIX", "IIY", "XIX"]),
        }
    }
}

impl FromStr for PairLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AB" => Ok(PairLabel::AB),
            "BC" => Ok(PairLabel::BC),
            "AC" => Ok(PairLabel::AC),
            other => Err(Error::Parse(format!("unknown pair `{other}` (AB, BC or AC)"))),
        }
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Line amplitudes of one readout: `lines[k - 1][s]` for spin `k` with the
/// other two spins (ascending qubit order) in basis state `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoRecord {
    pub op: TomoOp,
    pub lines: [[Cplx; 4]; 3],
}

#[derive(Clone, Debug)]
pub struct MarginalPair {
    pub label: PairLabel,
    pub rho: DensityMatrix,
}

/// Readout pulse unitary: tensor product of the per-qubit operations.
pub fn op_unitary(op: &TomoOp) -> CMatrix {
    letters_unitary(&op.0)
}

fn letters_unitary(letters: &[Letter]) -> CMatrix {
    letters
        .iter()
        .skip(1)
        .fold(letters[0].matrix(), |acc, l| kron(&acc, &l.matrix()).expect("at most 3 qubits"))
}

/// `m[(1_k, s), (0_k, s)]` for every spin `k` and spectator state `s` of an
/// `n`-qubit matrix, spin-major.
fn lines_of(m: &CMatrix, n: usize) -> Vec<Cplx> {
    let mut out = Vec::with_capacity(n << (n - 1));
    for k in 0..n {
        let kbit = 1 << (n - 1 - k);
        for s in 0..1usize << (n - 1) {
            // spread the spectator bits around position k
            let high = (s >> (n - 1 - k)) << (n - k);
            let low = s & ((1 << (n - 1 - k)) - 1);
            let base = high | low;
            out.push(m.get(base | kbit, base));
        }
    }
    out
}

pub fn simulate_readout(rho: &DensityMatrix, op: &TomoOp) -> Result<TomoRecord> {
    if rho.dim() != 8 {
        return Err(Error::Dimension(format!("tomography needs dim 8, got {}", rho.dim())));
    }
    let after = rho.matrix().conjugate_by(&op_unitary(op));
    let flat = lines_of(&after, 3);
    let mut lines = [[ZERO; 4]; 3];
    for k in 0..3 {
        lines[k].copy_from_slice(&flat[4 * k..4 * k + 4]);
    }
    Ok(TomoRecord { op: *op, lines })
}

pub fn simulate_set(rho: &DensityMatrix, ops: &[TomoOp]) -> Result<Vec<TomoRecord>> {
    ops.iter().map(|op| simulate_readout(rho, op)).collect()
}

/// Adds independent Gaussian noise of width `sigma` to every real and
/// imaginary line component.
pub fn add_noise<R: Rng + ?Sized>(records: &mut [TomoRecord], sigma: f64, rng: &mut R) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::OutOfRange { name: "sigma", value: sigma, range: "[0, inf)" });
    }
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma checked");
    for r in records.iter_mut() {
        for line in r.lines.iter_mut().flatten() {
            *line += Cplx::new(normal.sample(rng), normal.sample(rng));
        }
    }
    Ok(())
}

/// Non-identity Pauli strings on `n` qubits with their labels.
fn paulis(n: usize) -> Vec<(String, CMatrix)> {
    let single = [
        ('I', CMatrix::identity(2).expect("dim 2")),
        ('X', CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).expect("dim 2")),
        ('Y', CMatrix::from_rows(&[vec![ZERO, -Cplx::i()], vec![Cplx::i(), ZERO]]).expect("dim 2")),
        ('Z', CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).expect("dim 2")),
    ];
    let mut out: Vec<(String, CMatrix)> =
        single.iter().map(|(c, m)| (c.to_string(), m.clone())).collect();
    for _ in 1..n {
        out = out
            .iter()
            .flat_map(|(l, m)| {
                single
                    .iter()
                    .map(move |(c, s)| (format!("{l}{c}"), kron(m, s).expect("small")))
            })
            .collect();
    }
    out.remove(0);
    out
}

/// One readout on an `n`-qubit register, reduced to its real equations.
struct Readout {
    unitary: CMatrix,
    lines: Vec<Cplx>,
}

/// Real linear model `b = A c` for the Pauli coefficients `c`.
struct LinearModel {
    n: usize,
    paulis: Vec<(String, CMatrix)>,
    a: DMatrix<f64>,
}

impl LinearModel {
    fn new(n: usize, unitaries: &[CMatrix]) -> Self {
        let paulis = paulis(n);
        let d = 1usize << n;
        let per_op = 2 * (n << (n - 1));
        let mut a = DMatrix::zeros(per_op * unitaries.len(), paulis.len());
        for (j, (_, p)) in paulis.iter().enumerate() {
            for (o, u) in unitaries.iter().enumerate() {
                let lines = lines_of(&p.conjugate_by(u), n);
                for (l, v) in lines.iter().enumerate() {
                    a[(o * per_op + 2 * l, j)] = v.re / d as f64;
                    a[(o * per_op + 2 * l + 1, j)] = v.im / d as f64;
                }
            }
        }
        Self { n, paulis, a }
    }

    fn normal(&self) -> DMatrix<f64> {
        self.a.transpose() * &self.a
    }

    /// Rank and names of unobserved Pauli directions.
    fn rank(&self) -> (usize, Vec<String>) {
        let eig = SymmetricEigen::new(self.normal());
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let floor = RANK_TOL * max.max(f64::MIN_POSITIVE);
        let mut missing = Vec::new();
        let mut rank = 0;
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev > floor {
                rank += 1;
                continue;
            }
            let v = eig.eigenvectors.column(i);
            let mut idx: Vec<usize> = (0..v.len()).filter(|&j| v[j].abs() > 0.3).collect();
            if idx.is_empty() {
                idx.push(v.iamax());
            }
            let mut names: Vec<&str> = idx.iter().map(|&j| self.paulis[j].0.as_str()).collect();
            names.sort();
            let entry = names.join("+");
            if !missing.contains(&entry) {
                missing.push(entry);
            }
        }
        missing.sort();
        (rank, missing)
    }

    fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let (rank, missing) = self.rank();
        let needed = self.paulis.len();
        if rank < needed {
            return Err(Error::RankDeficient { rank, needed, missing: missing.join(", ") });
        }
        let rhs = self.a.transpose() * b;
        self.normal()
            .cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::RankDeficient { rank, needed, missing: "ill-conditioned normal matrix".into() })
    }

    fn assemble(&self, c: &DVector<f64>) -> CMatrix {
        let d = 1usize << self.n;
        let mut m = CMatrix::identity(d).expect("small");
        for (coef, (_, p)) in c.iter().zip(&self.paulis) {
            m = &m + &p.scale(Cplx::new(*coef, 0.0));
        }
        m.scale(Cplx::new(1.0 / d as f64, 0.0))
    }

    fn coefficients(&self, m: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(self.paulis.len(), self.paulis.iter().map(|(_, p)| (p * m).trace().re))
    }
}

fn stack(readouts: &[Readout]) -> DVector<f64> {
    DVector::from_iterator(
        readouts.iter().map(|r| 2 * r.lines.len()).sum(),
        readouts.iter().flat_map(|r| r.lines.iter().flat_map(|c| [c.re, c.im])),
    )
}

fn model_for(n: usize, readouts: &[Readout]) -> LinearModel {
    let us: Vec<CMatrix> = readouts.iter().map(|r| r.unitary.clone()).collect();
    LinearModel::new(n, &us)
}

/// Full tomography or one two-qubit marginal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Full,
    Pair(PairLabel),
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("full") {
            Ok(Target::Full)
        } else {
            s.parse().map(Target::Pair)
        }
    }
}

fn readouts(records: &[TomoRecord], target: Target) -> Vec<Readout> {
    match target {
        Target::Full => records
            .iter()
            .map(|r| Readout { unitary: op_unitary(&r.op), lines: r.lines.iter().flatten().copied().collect() })
            .collect(),
        Target::Pair(label) => {
            let (qa, qb) = label.qubits();
            let ex = label.excluded();
            records
                .iter()
                .map(|r| {
                    let mut lines = Vec::with_capacity(4);
                    for (k, other) in [(qa, qb), (qb, qa)] {
                        // spectators of k in ascending order: `other` and `ex`
                        let other_is_high = other < ex;
                        for s_other in 0..2 {
                            let sum: Cplx = (0..2)
                                .map(|s_ex| {
                                    let s = if other_is_high { 2 * s_other + s_ex } else { 2 * s_ex + s_other };
                                    r.lines[k - 1][s]
                                })
                                .sum();
                            lines.push(sum);
                        }
                    }
                    Readout { unitary: letters_unitary(&r.op.without(ex)), lines }
                })
                .collect()
        }
    }
}

fn target_qubits(target: Target) -> usize {
    match target {
        Target::Full => 3,
        Target::Pair(_) => 2,
    }
}

/// Least-squares Hermitian, unit-trace estimate before any positivity
/// projection, with the residual norm of the fit.
pub fn invert_raw(records: &[TomoRecord], target: Target) -> Result<(CMatrix, f64)> {
    if records.is_empty() {
        return Err(Error::RankDeficient { rank: 0, needed: if target == Target::Full { 63 } else { 15 }, missing: "all".into() });
    }
    let rs = readouts(records, target);
    let model = model_for(target_qubits(target), &rs);
    let b = stack(&rs);
    let c = model.solve(&b)?;
    let residual = (&model.a * &c - &b).norm();
    Ok((model.assemble(&c), residual))
}

/// Least-squares estimate projected onto the nearest density matrix.
pub fn invert(records: &[TomoRecord], target: Target) -> Result<DensityMatrix> {
    let (m, _) = invert_raw(records, target)?;
    psd_project(&m)
}

pub fn invert_pair(records: &[TomoRecord], label: PairLabel) -> Result<MarginalPair> {
    Ok(MarginalPair { label, rho: invert(records, Target::Pair(label))? })
}

/// Predicted line amplitudes of a Hermitian matrix (three-qubit records or
/// summed pair lines, depending on `target`).
pub fn forward(m: &CMatrix, ops: &[TomoOp], target: Target) -> Result<Vec<f64>> {
    let n = target_qubits(target);
    if m.dim() != 1 << n {
        return Err(Error::Dimension(format!("expected dim {}, got {}", 1 << n, m.dim())));
    }
    let dummy: Vec<TomoRecord> = ops.iter().map(|op| TomoRecord { op: *op, lines: [[ZERO; 4]; 3] }).collect();
    let model = model_for(n, &readouts(&dummy, target));
    Ok((&model.a * model.coefficients(m)).iter().copied().collect())
}

/// Rank of the three-qubit measurement map of `ops` (63 when complete).
pub fn measurement_rank(ops: &[TomoOp]) -> usize {
    rank_report(ops, Target::Full).0
}

/// Rank plus the unobserved Pauli directions for `target`.
pub fn rank_report(ops: &[TomoOp], target: Target) -> (usize, Vec<String>) {
    if ops.is_empty() {
        return (0, vec!["all".into()]);
    }
    let dummy: Vec<TomoRecord> = ops.iter().map(|op| TomoRecord { op: *op, lines: [[ZERO; 4]; 3] }).collect();
    model_for(target_qubits(target), &readouts(&dummy, target)).rank()
}
