//! Randomized benchmark: Haar-random operations applied to product inputs,
//! scored by the fidelity of the reconstructed output state, plus full
//! process tomography of a single operation.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;

use crate::compiler::decompose;
use crate::gates::{lower_to_pulses, PulseSequence};
use crate::haar::{sample_su4, SeededRng};
use crate::linalg::Mat4;
use crate::sim::{expected_output, input_state, run_sequence, InputStateLabel, NoiseModel, SimError};
use crate::tomography::{
    entanglement_fidelity, exact_frequencies, mean_fidelity_from_entanglement, mean_state_fidelity,
    process_matrix_of_unitary, reconstruct_from_frequencies, reconstruct_process, state_fidelity, DensityMatrix,
    Frequencies, Method, ProcessMatrix, TomographyError,
};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum BenchmarkError {
    #[error("n = {0} is not a positive multiple of 16")]
    NotDivisible(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub shots: u64,
    pub noise: NoiseModel,
    pub method: Method,
    /// Replace sampled counts by exact outcome probabilities. For stochastic
    /// noise the channel is averaged over `shots` realizations.
    pub exact: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig { n: 160, shots: 100, noise: NoiseModel::IDEAL, method: Method::Mle, exact: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperationResult {
    pub index: usize,
    pub label: InputStateLabel,
    pub unitary: Mat4,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub operations: Vec<OperationResult>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
}

/// Each of the 16 inputs exactly n/16 times, in random order.
pub fn equal_usage_labels(n: usize, rng: &mut SeededRng) -> Result<Vec<InputStateLabel>, BenchmarkError> {
    if n == 0 || n % 16 != 0 {
        return Err(BenchmarkError::NotDivisible(n));
    }
    let all = InputStateLabel::all();
    let mut labels: Vec<InputStateLabel> = (0..n).map(|k| all[k % 16]).collect();
    labels.shuffle(rng);
    Ok(labels)
}

fn output_frequencies(
    seq: &PulseSequence,
    label: InputStateLabel,
    cfg: &BenchmarkConfig,
    rng: &mut SeededRng,
) -> Result<Vec<Frequencies>, BenchmarkError> {
    if cfg.exact {
        let rho = expected_output(seq, label, &cfg.noise, cfg.shots.max(1), rng)?;
        Ok(exact_frequencies(&rho, cfg.shots.max(1) as f64))
    } else {
        let recs = run_sequence(seq, label, &cfg.noise, cfg.shots, rng)?;
        Ok(recs.iter().map(Frequencies::from_record).collect())
    }
}

/// Simulate and reconstruct the output of `u` on `label`.
pub fn reconstruct_output(
    u: &Mat4,
    label: InputStateLabel,
    cfg: &BenchmarkConfig,
    rng: &mut SeededRng,
) -> Result<DensityMatrix, BenchmarkError> {
    cfg.noise.validate()?;
    let seq = lower_to_pulses(&decompose(u).map_err(SimError::from)?);
    let f = output_frequencies(&seq, label, cfg, rng)?;
    Ok(reconstruct_from_frequencies(&f, cfg.method)?)
}

pub fn run_operation(
    u: &Mat4,
    label: InputStateLabel,
    cfg: &BenchmarkConfig,
    rng: &mut SeededRng,
) -> Result<f64, BenchmarkError> {
    let est = reconstruct_output(u, label, cfg, rng)?;
    let ideal = DensityMatrix::pure(&u.mul_vec(&input_state(label)));
    Ok(state_fidelity(&ideal, &est))
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Operation k draws its unitary and its noise from fork k + 1 of the master
/// seed; fork 0 shuffles the input assignment.
pub fn run_benchmark(cfg: &BenchmarkConfig, seed: u64) -> Result<BenchmarkReport, BenchmarkError> {
    cfg.noise.validate()?;
    let master = SeededRng::new(seed);
    let labels = equal_usage_labels(cfg.n, &mut master.fork(0))?;
    let mut operations = Vec::with_capacity(cfg.n);
    for (index, &label) in labels.iter().enumerate() {
        let mut rng = master.fork(index as u64 + 1);
        let unitary = sample_su4(&mut rng);
        let fidelity = run_operation(&unitary, label, cfg, &mut rng)?;
        operations.push(OperationResult { index, label, unitary, fidelity });
    }
    let fids: Vec<f64> = operations.iter().map(|o| o.fidelity).collect();
    let (mean, std) = mean_std(&fids);
    Ok(BenchmarkReport { operations, mean, std })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessTomographyReport {
    pub e_exp: ProcessMatrix,
    pub e_ideal: ProcessMatrix,
    pub entanglement_fidelity: f64,
    /// 36-state average.
    pub f_bar: f64,
    /// (4F + 1)/5.
    pub f_bar_from_f: f64,
    pub per_state: Vec<f64>,
}

/// Reconstruct the output for each of the 16 inputs (input s uses fork s of
/// `rng`) and assemble the process matrix.
pub fn process_tomography(
    u: &Mat4,
    cfg: &BenchmarkConfig,
    cp: bool,
    rng: &SeededRng,
) -> Result<ProcessTomographyReport, BenchmarkError> {
    cfg.noise.validate()?;
    let seq = lower_to_pulses(&decompose(u).map_err(SimError::from)?);
    let mut outputs = Vec::with_capacity(16);
    for (s, label) in InputStateLabel::all().into_iter().enumerate() {
        let mut r = rng.fork(s as u64);
        let f = output_frequencies(&seq, label, cfg, &mut r)?;
        let rho = reconstruct_from_frequencies(&f, cfg.method)?;
        outputs.push((label, *rho.matrix()));
    }
    let e_exp = reconstruct_process(&outputs, cp)?;
    let e_ideal = process_matrix_of_unitary(u);
    let f = entanglement_fidelity(&e_ideal, &e_exp)?;
    let avg = mean_state_fidelity(&e_ideal, &e_exp);
    Ok(ProcessTomographyReport {
        e_exp,
        e_ideal,
        entanglement_fidelity: f,
        f_bar: avg.mean,
        f_bar_from_f: mean_fidelity_from_entanglement(f, 4.0),
        per_state: avg.per_state,
    })
}
