//! State and process reconstruction from measurement records, and the
//! fidelity measures used to score them.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eigh, from_eigen, kron, kron_vec, CMat, Mat2, Mat4, Mat16, I, ONE, ZERO};
use crate::sim::{input_state, setting_rotation, InputStateLabel, MeasurementRecord, Setting, SETTINGS};

pub const DENSITY_TOLERANCE: f64 = 1e-10;
pub const MLE_MAX_ITERATIONS: usize = 2000;
pub const MLE_STOP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TomographyError {
    #[error("setting {0:?} is missing")]
    MissingSetting(Setting),
    #[error("setting {0:?} appears more than once")]
    DuplicateSetting(Setting),
    #[error("no counts in the data")]
    NoCounts,
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("input states do not span operator space")]
    RankDeficient,
    #[error("expected 16 input states, got {0}")]
    WrongInputCount(usize),
    #[error("trace has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

/// Validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self, TomographyError> {
        Self::with_tolerance(m, DENSITY_TOLERANCE)
    }

    pub fn with_tolerance(m: Mat4, tol: f64) -> Result<Self, TomographyError> {
        if !m.is_finite() {
            return Err(TomographyError::InvalidDensityMatrix("non-finite entries"));
        }
        if m.hermiticity_residual() > tol {
            return Err(TomographyError::InvalidDensityMatrix("not Hermitian"));
        }
        if (m.trace().re - 1.0).abs() > tol {
            return Err(TomographyError::InvalidDensityMatrix("trace is not 1"));
        }
        if eigh(&m).0[0] < -tol {
            return Err(TomographyError::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(DensityMatrix(m))
    }

    pub fn pure(psi: &[C64; 4]) -> Self {
        DensityMatrix(Mat4::outer(psi, psi))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

/// Hermitize, clip eigenvalues at zero and renormalize the trace.
pub fn project_to_density(m: &Mat4) -> Mat4 {
    let (mut vals, vecs) = eigh(&m.hermitian_part());
    vals.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = vals.iter().sum();
    if s <= 0.0 {
        return Mat4::identity().scale(C64::new(0.25, 0.0));
    }
    vals.iter_mut().for_each(|v| *v /= s);
    from_eigen(&vals, &vecs).hermitian_part()
}

/// Outcome frequencies for one setting. `weight` is the number of shots
/// behind them and only matters for MLE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frequencies {
    pub setting: Setting,
    pub probs: [f64; 4],
    pub weight: f64,
}

impl Frequencies {
    pub fn from_record(r: &MeasurementRecord) -> Self {
        let n = r.shots.max(1) as f64;
        Frequencies { setting: r.setting, probs: r.counts.map(|c| c as f64 / n), weight: r.shots as f64 }
    }

    /// Exact Born probabilities of `rho`, standing in for `weight` shots.
    pub fn exact(rho: &Mat4, setting: Setting, weight: f64) -> Self {
        Frequencies { setting, probs: crate::sim::probabilities(rho, setting), weight }
    }
}

pub fn exact_frequencies(rho: &Mat4, weight: f64) -> Vec<Frequencies> {
    SETTINGS.iter().map(|&s| Frequencies::exact(rho, s, weight)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    Linear,
    #[default]
    Mle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Mle => "mle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Method::Linear),
            "mle" => Some(Method::Mle),
            _ => None,
        }
    }
}

/// Outcome vectors: the projector of outcome k in setting s is |v⟩⟨v|.
fn outcome_vectors(setting: Setting) -> [[C64; 4]; 4] {
    let w = setting_rotation(setting);
    core::array::from_fn(|k| core::array::from_fn(|j| w.0[k][j].conj()))
}

fn expectation(v: &[C64; 4], rho: &Mat4) -> f64 {
    let rv = rho.mul_vec(v);
    v.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
}

fn pauli(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => CMat([[ZERO, ONE], [ONE, ZERO]]),
        2 => CMat([[ZERO, -I], [I, ZERO]]),
        _ => CMat([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// Two-qubit Pauli products σ_a ⊗ σ_b indexed by 4a + b.
pub fn pauli_basis() -> [Mat4; 16] {
    core::array::from_fn(|m| kron(&pauli(m / 4), &pauli(m % 4)))
}

struct Data {
    vectors: Vec<[[C64; 4]; 4]>,
    freqs: Vec<Frequencies>,
}

fn prepare(data: &[Frequencies]) -> Result<Data, TomographyError> {
    for s in SETTINGS {
        match data.iter().filter(|f| f.setting == s).count() {
            0 => return Err(TomographyError::MissingSetting(s)),
            1 => {}
            _ => return Err(TomographyError::DuplicateSetting(s)),
        }
    }
    if data.iter().all(|f| f.weight <= 0.0 || f.probs.iter().all(|&p| p <= 0.0)) {
        return Err(TomographyError::NoCounts);
    }
    let freqs: Vec<Frequencies> = SETTINGS.iter().map(|s| *data.iter().find(|f| f.setting == *s).unwrap()).collect();
    let vectors = freqs.iter().map(|f| outcome_vectors(f.setting)).collect();
    Ok(Data { vectors, freqs })
}

pub fn reconstruct_state(records: &[MeasurementRecord], method: Method) -> Result<DensityMatrix, TomographyError> {
    if records.iter().all(|r| r.shots == 0) {
        return Err(TomographyError::NoCounts);
    }
    let freqs: Vec<Frequencies> = records.iter().map(Frequencies::from_record).collect();
    reconstruct_from_frequencies(&freqs, method)
}

pub fn reconstruct_from_frequencies(data: &[Frequencies], method: Method) -> Result<DensityMatrix, TomographyError> {
    match method {
        Method::Linear => linear_inversion(data),
        Method::Mle => mle(data).map(|r| r.state),
    }
}

/// Unconstrained least-squares estimate (Hermitian, trace 1, possibly
/// not positive).
pub fn linear_estimate(data: &[Frequencies]) -> Result<Mat4, TomographyError> {
    let d = prepare(data)?;
    let basis = pauli_basis();
    // rows: (setting, outcome); a[r][m] = Tr(Π_r σ_m)/4
    let mut ata = [[0.0f64; 16]; 16];
    let mut atb = [0.0f64; 16];
    for (vs, f) in d.vectors.iter().zip(d.freqs.iter()) {
        for k in 0..4 {
            let row: [f64; 16] = core::array::from_fn(|m| expectation(&vs[k], &basis[m]) / 4.0);
            for a in 0..16 {
                atb[a] += row[a] * f.probs[k];
                for b in 0..16 {
                    ata[a][b] += row[a] * row[b];
                }
            }
        }
    }
    let inv = Mat16::from_fn(|a, b| C64::new(ata[a][b], 0.0)).inverse().ok_or(TomographyError::RankDeficient)?;
    let x: [f64; 16] = core::array::from_fn(|a| (0..16).map(|b| inv.0[a][b].re * atb[b]).sum());
    let mut rho = Mat4::zeros();
    for m in 0..16 {
        rho = rho + basis[m].scale(C64::new(x[m] / 4.0, 0.0));
    }
    Ok(rho.hermitian_part())
}

pub fn linear_inversion(data: &[Frequencies]) -> Result<DensityMatrix, TomographyError> {
    let rho = linear_estimate(data)?;
    Ok(DensityMatrix(project_to_density(&rho)))
}

/// Multinomial log-likelihood, with frequencies weighted by shot counts.
pub fn log_likelihood(rho: &Mat4, data: &[Frequencies]) -> Result<f64, TomographyError> {
    let d = prepare(data)?;
    Ok(log_likelihood_prepared(rho, &d))
}

fn log_likelihood_prepared(rho: &Mat4, d: &Data) -> f64 {
    let mut l = 0.0;
    for (vs, f) in d.vectors.iter().zip(d.freqs.iter()) {
        for k in 0..4 {
            let n = f.weight * f.probs[k];
            if n > 0.0 {
                l += n * expectation(&vs[k], rho).max(1e-300).ln();
            }
        }
    }
    l
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleResult {
    pub state: DensityMatrix,
    pub iterations: usize,
    /// Log-likelihood after each accepted step, starting from I/4.
    pub trace: Vec<f64>,
}

/// Diluted RρR fixed-point iteration starting from I/4.
pub fn mle(data: &[Frequencies]) -> Result<MleResult, TomographyError> {
    let d = prepare(data)?;
    let total: f64 = d.freqs.iter().map(|f| f.weight).sum();
    let mut rho = Mat4::identity().scale(C64::new(0.25, 0.0));
    let mut l = log_likelihood_prepared(&rho, &d);
    let mut trace = alloc::vec![l];
    let mut iterations = 0;
    while iterations < MLE_MAX_ITERATIONS {
        iterations += 1;
        let mut r = Mat4::zeros();
        for (vs, f) in d.vectors.iter().zip(d.freqs.iter()) {
            for k in 0..4 {
                let n = f.weight * f.probs[k];
                if n > 0.0 {
                    let p = expectation(&vs[k], &rho).max(1e-300);
                    r = r + Mat4::outer(&vs[k], &vs[k]).scale(C64::new(n / (p * total), 0.0));
                }
            }
        }
        let step = |op: &Mat4| {
            let m = (*op * rho * op.adjoint()).hermitian_part();
            m.scale(C64::new(1.0 / m.trace().re, 0.0))
        };
        let mut candidate = step(&r);
        let mut lc = log_likelihood_prepared(&candidate, &d);
        let mut eps = 0.5;
        while lc < l && eps > 1e-12 {
            let op = Mat4::identity() + r.scale(C64::new(eps, 0.0));
            candidate = step(&op);
            lc = log_likelihood_prepared(&candidate, &d);
            eps *= 0.5;
        }
        if lc < l {
            break;
        }
        let gain = lc - l;
        rho = candidate;
        l = lc;
        trace.push(l);
        if gain < MLE_STOP {
            break;
        }
    }
    Ok(MleResult { state: DensityMatrix(project_to_density(&rho)), iterations, trace })
}

fn sqrt_psd(m: &Mat4) -> Mat4 {
    let (vals, vecs) = eigh(m);
    from_eigen(&vals.map(|v| v.max(0.0).sqrt()), &vecs)
}

/// Rank-one check: returns the dominant eigenvector if all other
/// eigenvalues are negligible.
fn as_pure(m: &Mat4) -> Option<[C64; 4]> {
    let (vals, vecs) = eigh(m);
    if vals[..3].iter().all(|v| v.abs() < 1e-12) {
        let s = vals[3].max(0.0).sqrt();
        Some(core::array::from_fn(|i| vecs.0[i][3] * s))
    } else {
        None
    }
}

fn fidelity_matrices(a: &Mat4, b: &Mat4) -> f64 {
    if let Some(psi) = as_pure(a) {
        return expectation(&psi, b).clamp(0.0, 1.0);
    }
    if let Some(psi) = as_pure(b) {
        return expectation(&psi, a).clamp(0.0, 1.0);
    }
    let s = sqrt_psd(a);
    let m = (s * *b * s).hermitian_part();
    let (vals, _) = eigh(&m);
    let t: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    (t * t).clamp(0.0, 1.0)
}

/// (Tr √(√ρ1 ρ2 √ρ1))², clipped to [0, 1].
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    fidelity_matrices(&a.0, &b.0)
}

/// 16×16 process matrix E = Σ |i⟩⟨j| ⊗ 𝓔(|i⟩⟨j|); entry (4i+k, 4j+l) is
/// 𝓔(|i⟩⟨j|)[k][l] with zero-based indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessMatrix(pub Mat16);

impl ProcessMatrix {
    pub fn block(&self, i: usize, j: usize) -> Mat4 {
        CMat::from_fn(|k, l| self.0 .0[4 * i + k][4 * j + l])
    }

    pub fn from_blocks(f: impl Fn(usize, usize) -> Mat4) -> Self {
        let mut e = Mat16::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let b = f(i, j);
                for k in 0..4 {
                    for l in 0..4 {
                        e.0[4 * i + k][4 * j + l] = b.0[k][l];
                    }
                }
            }
        }
        ProcessMatrix(e)
    }

    /// 𝓔(ρ) = Σ ρ_ij 𝓔(|i⟩⟨j|).
    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                if rho.0[i][j] != ZERO {
                    out = out + self.block(i, j).scale(rho.0[i][j]);
                }
            }
        }
        out
    }

    /// Tr_out E, which is I for a trace-preserving map.
    pub fn output_partial_trace(&self) -> Mat4 {
        CMat::from_fn(|i, j| (0..4).map(|k| self.0 .0[4 * i + k][4 * j + k]).sum())
    }

    pub fn depolarizing() -> Self {
        Self::from_blocks(|i, j| if i == j { Mat4::identity().scale(C64::new(0.25, 0.0)) } else { Mat4::zeros() })
    }

    /// (1 − p)·self + p·other.
    pub fn mix(&self, other: &ProcessMatrix, p: f64) -> Self {
        ProcessMatrix(self.0.scale(C64::new(1.0 - p, 0.0)) + other.0.scale(C64::new(p, 0.0)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.0).0[0]
    }

    pub fn tp_residual(&self) -> f64 {
        (self.output_partial_trace() - Mat4::identity()).max_abs()
    }
}

fn basis_op(i: usize, j: usize) -> Mat4 {
    let mut m = Mat4::zeros();
    m.0[i][j] = ONE;
    m
}

pub fn process_matrix_of_unitary(u: &Mat4) -> ProcessMatrix {
    ProcessMatrix::from_blocks(|i, j| *u * basis_op(i, j) * u.adjoint())
}

fn project_tp(e: &Mat16) -> Mat16 {
    let pm = ProcessMatrix(*e);
    let d = pm.output_partial_trace() - Mat4::identity();
    let mut out = *e;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out.0[4 * i + k][4 * j + k] -= d.0[i][j] * 0.25;
            }
        }
    }
    out
}

fn project_psd(e: &Mat16) -> Mat16 {
    let (vals, vecs) = eigh(e);
    from_eigen(&vals.map(|v| v.max(0.0)), &vecs)
}

/// Assemble E from the output states of 16 spanning inputs. The map is made
/// Hermitian and trace preserving; with `cp` it is also driven into the
/// positive cone by alternating projections.
pub fn reconstruct_process(per_input: &[(InputStateLabel, Mat4)], cp: bool) -> Result<ProcessMatrix, TomographyError> {
    let inputs: Vec<(Mat4, Mat4)> =
        per_input.iter().map(|(l, out)| (Mat4::outer(&input_state(*l), &input_state(*l)), *out)).collect();
    reconstruct_process_from(&inputs, cp)
}

/// Same as [`reconstruct_process`] with arbitrary input density matrices.
pub fn reconstruct_process_from(pairs: &[(Mat4, Mat4)], cp: bool) -> Result<ProcessMatrix, TomographyError> {
    if pairs.len() != 16 {
        return Err(TomographyError::WrongInputCount(pairs.len()));
    }
    // column s holds vec(ρ_s) with index 4i + j
    let m = Mat16::from_fn(|r, s| pairs[s].0 .0[r / 4][r % 4]);
    let inv = m.inverse().ok_or(TomographyError::RankDeficient)?;
    let e = ProcessMatrix::from_blocks(|i, j| {
        let mut b = Mat4::zeros();
        for (s, (_, out)) in pairs.iter().enumerate() {
            b = b + out.scale(inv.0[s][4 * i + j]);
        }
        b
    });
    let mut e = project_tp(&e.0.hermitian_part());
    if cp {
        for _ in 0..500 {
            let min = eigh(&e).0[0];
            if min >= -1e-12 {
                break;
            }
            e = project_tp(&project_psd(&e)).hermitian_part();
        }
    }
    Ok(ProcessMatrix(e))
}

/// F = Tr(E_ideal E_exp)/16.
pub fn entanglement_fidelity(e_ideal: &ProcessMatrix, e_exp: &ProcessMatrix) -> Result<f64, TomographyError> {
    let mut t = ZERO;
    for a in 0..16 {
        for b in 0..16 {
            t += e_ideal.0 .0[a][b] * e_exp.0 .0[b][a];
        }
    }
    let t = t / 16.0;
    if t.im.abs() >= 1e-9 {
        return Err(TomographyError::ImaginaryResidue(t.im));
    }
    Ok(t.re)
}

/// f̄ from F in dimension d.
pub fn mean_fidelity_from_entanglement(f: f64, d: f64) -> f64 {
    (f * d + 1.0) / (d + 1.0)
}

/// Axis of a single-qubit Pauli eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

fn pauli_eigenvector(axis: PauliAxis, positive: bool) -> [C64; 2] {
    let h = FRAC_1_SQRT_2;
    let s = if positive { 1.0 } else { -1.0 };
    match axis {
        PauliAxis::X => [C64::new(h, 0.0), C64::new(s * h, 0.0)],
        PauliAxis::Y => [C64::new(h, 0.0), C64::new(0.0, s * h)],
        PauliAxis::Z if positive => [ONE, ZERO],
        PauliAxis::Z => [ZERO, ONE],
    }
}

/// The 36 joint eigenstates of σ_a ⊗ σ_b: a and b run over x, y, z (a
/// major), and for each pair the sign combinations (+,+), (+,−), (−,+), (−,−).
pub fn pauli_eigenstates() -> Vec<[C64; 4]> {
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let mut out = Vec::with_capacity(36);
    for a in axes {
        for b in axes {
            for (sa, sb) in [(true, true), (true, false), (false, true), (false, false)] {
                out.push(kron_vec(&pauli_eigenvector(a, sa), &pauli_eigenvector(b, sb)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFidelityAverage {
    pub mean: f64,
    pub per_state: Vec<f64>,
}

/// Average output-state fidelity of the two maps over the 36 Pauli
/// eigenstates. Outputs that are not valid states (non-CP reconstructions)
/// are projected onto the state space first.
pub fn mean_state_fidelity(e_ideal: &ProcessMatrix, e_exp: &ProcessMatrix) -> StateFidelityAverage {
    let per_state: Vec<f64> = pauli_eigenstates()
        .iter()
        .map(|psi| {
            let rho = Mat4::outer(psi, psi);
            let a = e_ideal.apply(&rho).hermitian_part();
            let b = e_exp.apply(&rho).hermitian_part();
            let a = if DensityMatrix::new(a).is_ok() { a } else { project_to_density(&a) };
            let b = if DensityMatrix::new(b).is_ok() { b } else { project_to_density(&b) };
            fidelity_matrices(&a, &b)
        })
        .collect();
    let mean = per_state.iter().sum::<f64>() / per_state.len() as f64;
    StateFidelityAverage { mean, per_state }
}
