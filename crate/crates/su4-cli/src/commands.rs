use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use su4_core::benchmark::{process_tomography, run_benchmark, BenchmarkConfig, BenchmarkReport};
use su4_core::compiler::{decompose, local_invariants, verify, VerifyReport};
use su4_core::gates::{circuit_to_unitary, lower_to_pulses};
use su4_core::haar::{sample_su4, SeededRng};
use su4_core::linalg::{nearest_unitary, Mat4};
use su4_core::sim::{run_experiment, NoiseModel};
use su4_core::tolerance::Tolerances;
use su4_core::tomography::{reconstruct_state, Method};

use crate::error::CliError;
use crate::formats::{
    content_hash, label_names, matrix_to_json, meta, parse_json, parse_label, parse_matrix4, parse_noise,
    parse_records, process_to_json, pulses_to_json, read_file, CircuitParamsJson, NoiseJson, RecordJson,
};

/// Inputs read from disk, remembered with their content hashes.
#[derive(Default)]
pub struct Inputs {
    hashes: BTreeMap<String, String>,
}

impl Inputs {
    pub fn read(&mut self, name: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = read_file(path)?;
        self.hashes.insert(name.to_string(), content_hash(&bytes));
        Ok(bytes)
    }

    pub fn hashes(&self) -> &BTreeMap<String, String> {
        &self.hashes
    }
}

/// Apply `SU4C_TOLERANCE`: either a bare number (the verify tolerance) or
/// comma-separated `unitarity=…`, `verify=…` pairs.
pub fn tolerances_from_env(value: Option<&str>) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::DEFAULT;
    let Some(v) = value.map(str::trim).filter(|v| !v.is_empty()) else {
        return Ok(t);
    };
    let num = |s: &str| -> Result<f64, CliError> {
        let x: f64 = s.trim().parse().map_err(|_| CliError::Parse(format!("SU4C_TOLERANCE: bad number '{s}'")))?;
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(CliError::Parse(format!("SU4C_TOLERANCE: '{s}' must be positive")))
        }
    };
    if !v.contains('=') {
        t.verify = num(v)?;
        return Ok(t);
    }
    for pair in v.split(',') {
        let (k, x) = pair.split_once('=').ok_or_else(|| CliError::Parse(format!("SU4C_TOLERANCE: bad entry '{pair}'")))?;
        match k.trim() {
            "unitarity" => t.unitarity = num(x)?,
            "verify" => t.verify = num(x)?,
            other => return Err(CliError::Parse(format!("SU4C_TOLERANCE: unknown key '{other}'"))),
        }
    }
    Ok(t)
}

/// Accept a matrix whose unitarity residual is within `tol.unitarity`, and
/// replace it by its closest unitary.
pub fn checked_unitary(m: &Mat4, tol: &Tolerances) -> Result<Mat4, CliError> {
    let residual = m.unitarity_residual();
    if !(residual <= tol.unitarity) {
        return Err(CliError::NonUnitary { residual, tolerance: tol.unitarity });
    }
    nearest_unitary(m).ok_or(CliError::NonUnitary { residual, tolerance: tol.unitarity })
}

pub fn write_output(out: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn verify_json(r: &VerifyReport, tolerance: f64) -> Value {
    json!({
        "distance": r.distance,
        "invariant_error": r.invariant_error,
        "tolerance": tolerance,
        "pass": r.pass,
    })
}

fn load_noise(inputs: &mut Inputs, path: Option<&Path>) -> Result<NoiseModel, CliError> {
    match path {
        Some(p) => parse_noise(&inputs.read("noise", p)?),
        None => Ok(NoiseModel::IDEAL),
    }
}

fn load_unitary(inputs: &mut Inputs, name: &str, path: &Path, tol: &Tolerances) -> Result<Mat4, CliError> {
    let m = parse_matrix4(&inputs.read(name, path)?)?;
    checked_unitary(&m, tol)
}

fn load_params(inputs: &mut Inputs, path: &Path) -> Result<su4_core::gates::CircuitParams, CliError> {
    let p: CircuitParamsJson = parse_json(&inputs.read("params", path)?, "circuit parameters")?;
    p.to_params()
}

pub fn compile(input: &Path, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let raw = parse_matrix4(&inputs.read("unitary", input)?)?;
    let u = checked_unitary(&raw, tol)?;
    let params = decompose(&u)?;
    let report = verify(&u, &params, tol.verify);
    if !report.pass {
        return Err(CliError::Verify { distance: report.distance, tolerance: tol.verify });
    }
    let mut doc = CircuitParamsJson::from_params(&params);
    doc.meta = Some(json!({
        "verify": verify_json(&report, tol.verify),
        "input_projection_distance": (u - raw).max_abs(),
        "local_invariants": local_invariants(&u)?,
        "provenance": meta(None, inputs.hashes(), tol),
    }));
    write_output(out, &serde_json::to_value(doc).map_err(|e| CliError::Internal(e.to_string()))?)
}

pub fn lower(params: &Path, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let c = load_params(&mut inputs, params)?;
    let seq = lower_to_pulses(&c);
    let mut doc = pulses_to_json(&seq);
    doc["meta"] = meta(None, inputs.hashes(), tol);
    write_output(out, &doc)
}

pub fn verify_cmd(unitary: &Path, params: &Path, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let u = load_unitary(&mut inputs, "unitary", unitary, tol)?;
    let c = load_params(&mut inputs, params)?;
    let report = verify(&u, &c, tol.verify);
    let doc = json!({
        "verify": verify_json(&report, tol.verify),
        "meta": meta(None, inputs.hashes(), tol),
    });
    write_output(out, &doc)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verify { distance: report.distance, tolerance: tol.verify })
    }
}

pub fn sample(n: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let mut rng = SeededRng::new(seed);
    let mats: Vec<Value> = (0..n).map(|_| json!(matrix_to_json(&sample_su4(&mut rng)))).collect();
    write_output(out, &Value::Array(mats))
}

pub struct SimulateArgs<'a> {
    pub unitary: &'a Path,
    pub input: &'a str,
    pub noise: Option<&'a Path>,
    pub shots: u64,
    pub seed: u64,
}

pub fn simulate(a: &SimulateArgs, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let u = load_unitary(&mut inputs, "unitary", a.unitary, tol)?;
    let label = parse_label(a.input)?;
    let noise = load_noise(&mut inputs, a.noise)?;
    let params = decompose(&u)?;
    let circuit = serde_json::to_vec(&CircuitParamsJson::from_params(&params)).map_err(|e| CliError::Internal(e.to_string()))?;
    let recs = run_experiment(&u, label, &noise, a.shots, &mut SeededRng::new(a.seed))?;
    let records: Vec<RecordJson> = recs.iter().map(RecordJson::from).collect();
    let doc = json!({
        "records": records,
        "metadata": {
            "seed": a.seed,
            "noise": NoiseJson::from(noise),
            "input": label_names(label),
            "shots_per_setting": a.shots,
            "circuit_hash": content_hash(&circuit),
        },
        "meta": meta(Some(a.seed), inputs.hashes(), tol),
    });
    write_output(out, &doc)
}

pub fn reconstruct(records: &Path, method: Method, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let recs = parse_records(&inputs.read("records", records)?)?;
    let rho = reconstruct_state(&recs, method)?;
    let m = rho.matrix();
    let purity = (*m * *m).trace().re;
    let doc = json!({
        "rho": matrix_to_json(m),
        "method": method.name(),
        "purity": purity,
        "meta": meta(None, inputs.hashes(), tol),
    });
    write_output(out, &doc)
}

pub struct BenchmarkArgs<'a> {
    pub n: usize,
    pub seed: u64,
    pub noise: Option<&'a Path>,
    pub shots: u64,
    pub method: Method,
    pub exact: bool,
    pub csv: Option<&'a Path>,
    pub bin_width: f64,
}

/// Fidelity histogram over [0, 1] with bins of `width`.
pub fn histogram(values: &[f64], width: f64) -> Vec<(f64, f64, usize)> {
    let nbins = (1.0 / width).ceil() as usize;
    let mut counts = vec![0usize; nbins];
    for &v in values {
        let k = ((v / width).floor() as isize).clamp(0, nbins as isize - 1) as usize;
        counts[k] += 1;
    }
    counts.into_iter().enumerate().map(|(k, c)| (k as f64 * width, ((k + 1) as f64 * width).min(1.0), c)).collect()
}

fn write_csv(path: &Path, report: &BenchmarkReport) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io { path: path.display().to_string(), source: std::io::Error::other(e) };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["index", "input_qubit0", "input_qubit1", "fidelity"]).map_err(io)?;
    for op in &report.operations {
        let [a, b] = label_names(op.label);
        w.write_record([op.index.to_string(), a.to_string(), b.to_string(), format!("{:.12}", op.fidelity)]).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn benchmark(a: &BenchmarkArgs, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    if !(a.bin_width > 0.0 && a.bin_width <= 1.0) {
        return Err(CliError::Invalid("--bin-width must lie in (0, 1]".into()));
    }
    let mut inputs = Inputs::default();
    let noise = load_noise(&mut inputs, a.noise)?;
    let cfg = BenchmarkConfig { n: a.n, shots: a.shots, noise, method: a.method, exact: a.exact };
    let report = run_benchmark(&cfg, a.seed)?;
    let fids: Vec<f64> = report.operations.iter().map(|o| o.fidelity).collect();
    let ops: Vec<Value> = report
        .operations
        .iter()
        .map(|o| json!({"index": o.index, "input": label_names(o.label), "fidelity": o.fidelity}))
        .collect();
    let hist: Vec<Value> =
        histogram(&fids, a.bin_width).into_iter().map(|(lo, hi, c)| json!({"lo": lo, "hi": hi, "count": c})).collect();
    let doc = json!({
        "config": {
            "n": a.n,
            "shots": a.shots,
            "method": a.method.name(),
            "exact": a.exact,
            "noise": NoiseJson::from(noise),
        },
        "mean": report.mean,
        "std": report.std,
        "operations": ops,
        "histogram": hist,
        "meta": meta(Some(a.seed), inputs.hashes(), tol),
    });
    if let Some(p) = a.csv {
        write_csv(p, &report)?;
    }
    write_output(out, &doc)
}

pub struct ProcessTomoArgs<'a> {
    pub unitary: &'a Path,
    pub noise: Option<&'a Path>,
    pub shots: u64,
    pub seed: u64,
    pub method: Method,
    pub exact: bool,
    pub cp: bool,
}

pub fn process_tomo(a: &ProcessTomoArgs, tol: &Tolerances, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let u = load_unitary(&mut inputs, "unitary", a.unitary, tol)?;
    let noise = load_noise(&mut inputs, a.noise)?;
    let cfg = BenchmarkConfig { n: 16, shots: a.shots, noise, method: a.method, exact: a.exact };
    let rep = process_tomography(&u, &cfg, a.cp, &SeededRng::new(a.seed))?;
    let doc = json!({
        "process_matrix": process_to_json(&rep.e_exp),
        "fidelity": {
            "F": rep.entanglement_fidelity,
            "f_bar": rep.f_bar,
            "f_bar_from_F": rep.f_bar_from_f,
            "per_state": rep.per_state,
        },
        "config": {
            "shots": a.shots,
            "method": a.method.name(),
            "exact": a.exact,
            "cp_projection": a.cp,
            "noise": NoiseJson::from(noise),
        },
        "meta": meta(Some(a.seed), inputs.hashes(), tol),
    });
    write_output(out, &doc)
}

/// Unitary of a circuit parameter file.
pub fn unitary_of(params: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let c = load_params(&mut inputs, params)?;
    write_output(out, &json!(matrix_to_json(&circuit_to_unitary(&c))))
}

pub fn out_path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_tolerance_forms() {
        assert_eq!(tolerances_from_env(None).unwrap().verify, Tolerances::DEFAULT.verify);
        assert_eq!(tolerances_from_env(Some("1e-4")).unwrap().verify, 1e-4);
        let t = tolerances_from_env(Some("unitarity=1e-3, verify=2e-5")).unwrap();
        assert_eq!((t.unitarity, t.verify), (1e-3, 2e-5));
        assert!(tolerances_from_env(Some("verify=-1")).is_err());
        assert!(tolerances_from_env(Some("reality=1")).is_err());
        assert!(tolerances_from_env(Some("abc")).is_err());
    }

    #[test]
    fn histogram_covers_unit_interval() {
        let h = histogram(&[0.0, 0.5, 0.99, 1.0], 0.25);
        assert_eq!(h.len(), 4);
        assert_eq!(h.iter().map(|b| b.2).collect::<Vec<_>>(), [1, 0, 1, 2]);
        assert_eq!(h[3].1, 1.0);
    }
}
