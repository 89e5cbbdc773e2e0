//! File formats: state JSON, tomography record CSV and tomograph CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{qubit_count, CMatrix, Cplx, DensityMatrix, Ket};
use crate::states::basis_label;
use crate::tomo::{TomoOp, TomoRecord};

/// State file contents. Matrices are stored as separate real and imaginary
/// row lists; a matrix need not be a valid density matrix on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateFile {
    Ket {
        re: Vec<f64>,
        im: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Density {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
}

impl StateFile {
    pub fn from_ket(k: &Ket) -> Self {
        StateFile::Ket {
            re: k.amps().iter().map(|z| z.re).collect(),
            im: k.amps().iter().map(|z| z.im).collect(),
            note: None,
        }
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = m.rows();
        StateFile::Density {
            re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
            note: None,
        }
    }

    pub fn with_note(mut self, text: impl Into<String>) -> Self {
        match &mut self {
            StateFile::Ket { note, .. } | StateFile::Density { note, .. } => *note = Some(text.into()),
        }
        self
    }

    /// The stored data as a matrix: `|k><k|` for kets.
    pub fn matrix(&self) -> Result<CMatrix> {
        match self {
            StateFile::Ket { .. } => Ok(self.ket()?.to_density().into_matrix()),
            StateFile::Density { re, im, .. } => {
                if re.len() != im.len() || re.iter().zip(im).any(|(a, b)| a.len() != b.len() || a.len() != re.len()) {
                    return Err(Error::Parse("real and imaginary parts must be matching square arrays".into()));
                }
                let rows: Vec<Vec<Cplx>> = re
                    .iter()
                    .zip(im)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| Cplx::new(*x, *y)).collect())
                    .collect();
                CMatrix::from_rows(&rows)
            }
        }
    }

    pub fn ket(&self) -> Result<Ket> {
        match self {
            StateFile::Ket { re, im, .. } => {
                if re.len() != im.len() {
                    return Err(Error::Parse("ket real and imaginary parts differ in length".into()));
                }
                Ket::new(re.iter().zip(im).map(|(a, b)| Cplx::new(*a, *b)).collect())
            }
            StateFile::Density { .. } => Err(Error::Parse("expected a ket, found a density matrix".into())),
        }
    }

    /// Validated density matrix.
    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            StateFile::Ket { .. } => Ok(self.ket()?.to_density()),
            StateFile::Density { .. } => DensityMatrix::new(self.matrix()?),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let f = File::open(path.as_ref())?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_state(path: impl AsRef<Path>) -> Result<StateFile> {
    read_json(path)
}

pub fn write_state(path: impl AsRef<Path>, state: &StateFile) -> Result<()> {
    write_json(path, state)
}

#[derive(Debug, Serialize, Deserialize)]
struct LineRow {
    op: String,
    spin: usize,
    spectator_state: String,
    re: f64,
    im: f64,
}

pub fn write_records<W: Write>(w: W, records: &[TomoRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        for (k, lines) in r.lines.iter().enumerate() {
            for (s, v) in lines.iter().enumerate() {
                out.serialize(LineRow {
                    op: r.op.to_string(),
                    spin: k + 1,
                    spectator_state: format!("{s:02b}"),
                    re: v.re,
                    im: v.im,
                })?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads line rows, grouping by operation in order of first appearance.
/// Every operation must supply all twelve lines.
pub fn read_records<R: Read>(r: R) -> Result<Vec<TomoRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out: Vec<(TomoRecord, [[bool; 4]; 3])> = Vec::new();
    for row in rdr.deserialize::<LineRow>() {
        let row = row?;
        let op: TomoOp = row.op.parse()?;
        if !(1..=3).contains(&row.spin) {
            return Err(Error::Parse(format!("spin {} not in 1..=3", row.spin)));
        }
        let s = usize::from_str_radix(&row.spectator_state, 2)
            .ok()
            .filter(|s| *s < 4 && row.spectator_state.len() == 2)
            .ok_or_else(|| Error::Parse(format!("bad spectator state `{}`", row.spectator_state)))?;
        let pos = match out.iter().position(|(r, _)| r.op == op) {
            Some(p) => p,
            None => {
                out.push((TomoRecord { op, lines: [[Cplx::new(0.0, 0.0); 4]; 3] }, [[false; 4]; 3]));
                out.len() - 1
            }
        };
        let (rec, seen) = &mut out[pos];
        if seen[row.spin - 1][s] {
            return Err(Error::Parse(format!("duplicate line {op} spin {} state {}", row.spin, row.spectator_state)));
        }
        seen[row.spin - 1][s] = true;
        rec.lines[row.spin - 1][s] = Cplx::new(row.re, row.im);
    }
    for (rec, seen) in &out {
        if seen.iter().flatten().any(|b| !b) {
            return Err(Error::Parse(format!("operation {} is missing lines", rec.op)));
        }
    }
    Ok(out.into_iter().map(|(r, _)| r).collect())
}

pub fn write_records_file(path: impl AsRef<Path>, records: &[TomoRecord]) -> Result<()> {
    write_records(BufWriter::new(File::create(path.as_ref())?), records)
}

pub fn read_records_file(path: impl AsRef<Path>) -> Result<Vec<TomoRecord>> {
    read_records(BufReader::new(File::open(path.as_ref())?))
}

#[derive(Debug, Serialize, Deserialize)]
struct BarRow {
    row: String,
    col: String,
    re: f64,
    im: f64,
}

/// One row per matrix element in binary basis order.
pub fn write_tomograph<W: Write>(w: W, m: &CMatrix) -> Result<()> {
    let n = qubit_count(m.dim());
    let mut out = csv::Writer::from_writer(w);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let v = m.get(i, j);
            out.serialize(BarRow { row: basis_label(i, n), col: basis_label(j, n), re: v.re, im: v.im })?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_tomograph<R: Read>(r: R) -> Result<CMatrix> {
    let rows: Vec<BarRow> = csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<_, _>>()?;
    let dim = (rows.len() as f64).sqrt().round() as usize;
    if dim * dim != rows.len() {
        return Err(Error::Parse(format!("{} bars do not form a square matrix", rows.len())));
    }
    let mut m = CMatrix::zeros(dim)?;
    let mut seen = vec![false; rows.len()];
    for b in &rows {
        let parse = |s: &str| {
            usize::from_str_radix(s, 2)
                .ok()
                .filter(|i| *i < dim)
                .ok_or_else(|| Error::Parse(format!("bad basis label `{s}`")))
        };
        let (i, j) = (parse(&b.row)?, parse(&b.col)?);
        if std::mem::replace(&mut seen[i * dim + j], true) {
            return Err(Error::Parse(format!("duplicate bar ({}, {})", b.row, b.col)));
        }
        m.set(i, j, Cplx::new(b.re, b.im));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random;
    use crate::tomo::{full_ops, simulate_set};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn state_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let k = random::haar_ket(8, &mut rng);
        let json = serde_json::to_string(&StateFile::from_ket(&k)).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        let d = back.ket().unwrap().amps().iter().zip(k.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(d < 1e-15);

        let rho = random::mixed_state(8, &mut rng);
        let sf = StateFile::from_matrix(rho.matrix()).with_note("sample");
        let json = serde_json::to_string(&sf).unwrap();
        assert!(json.contains("\"kind\":\"density\""));
        let back: StateFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.matrix().unwrap().max_abs_diff(rho.matrix()), 0.0);
        assert!(back.ket().is_err());
    }

    #[test]
    fn malformed_state_rejected() {
        let bad = StateFile::Density { re: vec![vec![1.0, 0.0]], im: vec![vec![0.0, 0.0]], note: None };
        assert!(bad.matrix().is_err());
        let bad = StateFile::Ket { re: vec![1.0, 0.0], im: vec![0.0], note: None };
        assert!(bad.ket().is_err());
        assert!(serde_json::from_str::<StateFile>("{\"kind\":\"vector\"}").is_err());
    }

    #[test]
    fn records_csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let rho = random::mixed_state(8, &mut rng);
        let recs = simulate_set(&rho, &full_ops()).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("op,spin,spectator_state,re,im\n"));
        assert_eq!(text.lines().count(), 1 + 11 * 12);
        assert_eq!(read_records(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn records_csv_incomplete_rejected() {
        let text = "op,spin,spectator_state,re,im\nIII,1,00,0.5,0\n";
        assert!(read_records(text.as_bytes()).is_err());
        let text = "op,spin,spectator_state,re,im\nIII,4,00,0.5,0\n";
        assert!(read_records(text.as_bytes()).is_err());
    }

    #[test]
    fn tomograph_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let rho = random::mixed_state(8, &mut rng);
        let mut buf = Vec::new();
        write_tomograph(&mut buf, rho.matrix()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.lines().nth(1).unwrap().starts_with("000,000,"));
        let back = read_tomograph(&buf[..]).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
    }
}
