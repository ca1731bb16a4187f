//! On-disk formats. Complex scalars are `[re, im]`, matrices are row-major
//! arrays of rows.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use su4_core::gates::{CircuitParams, ClassParams, GateLibraryElement, LocalGate, PulseSequence};
use su4_core::linalg::CMat;
use su4_core::sim::{Basis, InputStateLabel, LocalState, MeasurementRecord, NoiseModel};
use su4_core::tolerance::Tolerances;
use su4_core::tomography::ProcessMatrix;
use su4_core::C64;

use crate::error::CliError;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(bytes: &[u8], what: &str) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

/// SHA-256 of the git blob encoding `blob <len>\0<content>`, hex encoded.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn matrix_to_json<const N: usize>(m: &CMat<N>) -> JsonMatrix {
    m.0.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json<const N: usize>(rows: &JsonMatrix) -> Result<CMat<N>, CliError> {
    if rows.len() != N || rows.iter().any(|r| r.len() != N) {
        return Err(CliError::Parse(format!("expected a {N}x{N} matrix")));
    }
    let m = CMat::from_fn(|i, j| C64::new(rows[i][j][0], rows[i][j][1]));
    if !m.is_finite() {
        return Err(CliError::Parse("matrix has non-finite entries".into()));
    }
    Ok(m)
}

/// A matrix file is either a bare matrix or an object with a `matrix` key.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(JsonMatrix),
    Wrapped { matrix: JsonMatrix },
}

pub fn parse_matrix4(bytes: &[u8]) -> Result<su4_core::linalg::Mat4, CliError> {
    let f: MatrixFile = parse_json(bytes, "matrix file")?;
    match f {
        MatrixFile::Bare(m) | MatrixFile::Wrapped { matrix: m } => matrix_from_json(&m),
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
pub struct LocalJson {
    pub theta: f64,
    pub phi: f64,
    pub phiz: f64,
    #[serde(default = "default_sign")]
    pub sign: f64,
}

impl From<LocalGate> for LocalJson {
    fn from(l: LocalGate) -> Self {
        LocalJson { theta: l.theta, phi: l.phi, phiz: l.phiz, sign: l.sign }
    }
}

impl From<LocalJson> for LocalGate {
    fn from(l: LocalJson) -> Self {
        LocalGate { theta: l.theta, phi: l.phi, phiz: l.phiz, sign: l.sign }
    }
}

fn default_sign() -> f64 {
    1.0
}

/// CircuitParams file. `meta` is informational and ignored on input.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CircuitParamsJson {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    #[serde(rename = "A")]
    pub a: LocalJson,
    #[serde(rename = "B")]
    pub b: LocalJson,
    #[serde(rename = "C")]
    pub c: LocalJson,
    #[serde(rename = "D")]
    pub d: LocalJson,
    pub global_phase: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl CircuitParamsJson {
    pub fn from_params(c: &CircuitParams) -> Self {
        CircuitParamsJson {
            alpha: c.class.alpha,
            beta: c.class.beta,
            delta: c.class.delta,
            a: c.a.into(),
            b: c.b.into(),
            c: c.c.into(),
            d: c.d.into(),
            global_phase: [c.global_phase.re, c.global_phase.im],
            meta: None,
        }
    }

    pub fn to_params(&self) -> Result<CircuitParams, CliError> {
        let locals = [self.a, self.b, self.c, self.d];
        let mut vals = vec![self.alpha, self.beta, self.delta, self.global_phase[0], self.global_phase[1]];
        vals.extend(locals.iter().flat_map(|l| [l.theta, l.phi, l.phiz]));
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Parse("circuit parameters must be finite".into()));
        }
        if locals.iter().any(|l| l.sign != 1.0 && l.sign != -1.0) {
            return Err(CliError::Parse("local gate sign must be 1 or -1".into()));
        }
        let gp = C64::new(self.global_phase[0], self.global_phase[1]);
        if (gp.norm() - 1.0).abs() > 1e-6 {
            return Err(CliError::Parse("global_phase must have unit modulus".into()));
        }
        Ok(CircuitParams {
            class: ClassParams::new(self.alpha, self.beta, self.delta),
            a: self.a.into(),
            b: self.b.into(),
            c: self.c.into(),
            d: self.d.into(),
            global_phase: gp,
        })
    }
}

pub fn pulses_to_json(seq: &PulseSequence) -> Value {
    let elements: Vec<Value> = seq
        .elements
        .iter()
        .map(|e| match *e {
            GateLibraryElement::R { theta, phi, target } => json!({"gate": "R", "theta": theta, "phi": phi, "target": target}),
            GateLibraryElement::Rz { phiz, target } => json!({"gate": "Rz", "phiz": phiz, "target": target}),
            GateLibraryElement::G => json!({"gate": "G"}),
        })
        .collect();
    json!({ "count": seq.len(), "g_count": seq.g_count(), "elements": elements })
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct NoiseJson {
    #[serde(default)]
    pub overrotation_sigma: f64,
    #[serde(default)]
    pub depolarizing_per_g: f64,
    #[serde(default)]
    pub damping_per_circuit: f64,
}

impl From<NoiseJson> for NoiseModel {
    fn from(n: NoiseJson) -> Self {
        NoiseModel {
            overrotation_sigma: n.overrotation_sigma,
            depolarizing_per_g: n.depolarizing_per_g,
            damping_per_circuit: n.damping_per_circuit,
        }
    }
}

impl From<NoiseModel> for NoiseJson {
    fn from(n: NoiseModel) -> Self {
        NoiseJson {
            overrotation_sigma: n.overrotation_sigma,
            depolarizing_per_g: n.depolarizing_per_g,
            damping_per_circuit: n.damping_per_circuit,
        }
    }
}

pub fn parse_noise(bytes: &[u8]) -> Result<NoiseModel, CliError> {
    let n: NoiseJson = parse_json(bytes, "noise file")?;
    let model = NoiseModel::from(n);
    model.validate()?;
    Ok(model)
}

pub fn label_names(l: InputStateLabel) -> [&'static str; 2] {
    [l.0.name(), l.1.name()]
}

pub fn parse_label(s: &str) -> Result<InputStateLabel, CliError> {
    let parts: Vec<&str> = s.split([',', ':']).map(str::trim).collect();
    let err = || CliError::Parse(format!("input state '{s}': expected two of down, up, plus, minus_i separated by a comma"));
    if parts.len() != 2 {
        return Err(err());
    }
    let a = LocalState::from_name(parts[0]).ok_or_else(err)?;
    let b = LocalState::from_name(parts[1]).ok_or_else(err)?;
    Ok(InputStateLabel(a, b))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RecordJson {
    pub setting: [String; 2],
    pub counts: [u64; 4],
    pub shots: u64,
}

impl From<&MeasurementRecord> for RecordJson {
    fn from(r: &MeasurementRecord) -> Self {
        RecordJson { setting: r.setting.map(|b| b.name().to_string()), counts: r.counts, shots: r.shots }
    }
}

impl RecordJson {
    pub fn to_record(&self) -> Result<MeasurementRecord, CliError> {
        let b = |s: &str| Basis::from_name(s).ok_or_else(|| CliError::Parse(format!("unknown basis '{s}'")));
        if self.counts.iter().sum::<u64>() != self.shots {
            return Err(CliError::Parse(format!("counts {:?} do not sum to shots {}", self.counts, self.shots)));
        }
        Ok(MeasurementRecord { setting: [b(&self.setting[0])?, b(&self.setting[1])?], counts: self.counts, shots: self.shots })
    }
}

/// Either a bare array of records or an experiment bundle with `records`.
#[derive(Deserialize)]
#[serde(untagged)]
enum RecordsFile {
    Bare(Vec<RecordJson>),
    Bundle { records: Vec<RecordJson> },
}

pub fn parse_records(bytes: &[u8]) -> Result<Vec<MeasurementRecord>, CliError> {
    let f: RecordsFile = parse_json(bytes, "records file")?;
    let recs = match f {
        RecordsFile::Bare(r) | RecordsFile::Bundle { records: r } => r,
    };
    recs.iter().map(RecordJson::to_record).collect()
}

pub fn process_to_json(e: &ProcessMatrix) -> JsonMatrix {
    matrix_to_json(&e.0)
}

pub fn tolerances_json(t: &Tolerances) -> Value {
    json!({
        "unitarity": t.unitarity,
        "symmetry": t.symmetry,
        "su2_det": t.su2_det,
        "angle_snap": t.angle_snap,
        "eigen_cluster": t.eigen_cluster,
        "reality": t.reality,
        "factorization": t.factorization,
        "verify": t.verify,
    })
}

/// Provenance block embedded in every report.
pub fn meta(seed: Option<u64>, inputs: &BTreeMap<String, String>, tol: &Tolerances) -> Value {
    json!({
        "tool": concat!("su4c ", env!("CARGO_PKG_VERSION")),
        "seed": seed,
        "rng": su4_core::haar::SeededRng::ALGORITHM,
        "input_hashes": inputs,
        "tolerances": tolerances_json(tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_hash_matches_git_sha256_blob() {
        // printf 'blob 5\0hello' | sha256sum
        assert_eq!(content_hash(b"hello"), "8aec4e4876f854f688d0ebfc8f37598f38e5fd6903cccc850ca36591175aeb60");
    }

    #[test]
    fn matrix_round_trip() {
        let m = su4_core::linalg::Mat4::from_fn(|i, j| C64::new(i as f64, -(j as f64)));
        assert_eq!(matrix_from_json::<4>(&matrix_to_json(&m)).unwrap(), m);
        assert!(matrix_from_json::<4>(&vec![vec![[0.0, 0.0]; 4]; 3]).is_err());
    }

    #[test]
    fn labels_parse() {
        let l = parse_label("minus_i, down").unwrap();
        assert_eq!(label_names(l), ["minus_i", "down"]);
        assert_eq!(parse_label("up:plus").unwrap(), InputStateLabel(LocalState::Up, LocalState::Plus));
        assert!(parse_label("up").is_err());
        assert!(parse_label("left,up").is_err());
    }

    #[test]
    fn record_counts_must_sum_to_shots() {
        let r = RecordJson { setting: ["Z".into(), "X".into()], counts: [1, 2, 3, 4], shots: 11 };
        assert!(r.to_record().is_err());
        let r = RecordJson { shots: 10, ..r };
        assert_eq!(r.to_record().unwrap().setting, [Basis::Z, Basis::X]);
    }

    #[test]
    fn params_reject_bad_sign_and_phase() {
        let l = LocalJson { theta: 0.0, phi: 0.0, phiz: 0.0, sign: 1.0 };
        let mut p = CircuitParamsJson {
            alpha: 0.0,
            beta: 0.0,
            delta: 0.0,
            a: l,
            b: l,
            c: l,
            d: l,
            global_phase: [1.0, 0.0],
            meta: None,
        };
        assert!(p.to_params().is_ok());
        p.a.sign = 0.5;
        assert!(p.to_params().is_err());
        p.a.sign = -1.0;
        p.global_phase = [2.0, 0.0];
        assert!(p.to_params().is_err());
    }
}
