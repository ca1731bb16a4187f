//! Density-matrix simulation of compiled pulse sequences under a
//! phenomenological noise model, and projective measurement in the nine
//! local Pauli settings.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::compiler::{decompose, CompileError};
use crate::gates::{embed, g, lower_to_pulses, r, GateLibraryElement, PulseSequence};
use crate::linalg::{eigh, kron, kron_vec, CMat, Mat2, Mat4, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("invalid noise model: {0}")]
    InvalidNoise(&'static str),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Single-qubit input state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalState {
    Down,
    Up,
    Plus,
    MinusI,
}

impl LocalState {
    pub const ALL: [LocalState; 4] = [LocalState::Down, LocalState::Up, LocalState::Plus, LocalState::MinusI];

    pub fn vector(self) -> [C64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            LocalState::Up => [ONE, ZERO],
            LocalState::Down => [ZERO, ONE],
            LocalState::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
            LocalState::MinusI => [C64::new(h, 0.0), C64::new(0.0, -h)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LocalState::Down => "down",
            LocalState::Up => "up",
            LocalState::Plus => "plus",
            LocalState::MinusI => "minus_i",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        LocalState::ALL.into_iter().find(|l| l.name() == s)
    }
}

/// Product input state label for (qubit 0, qubit 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputStateLabel(pub LocalState, pub LocalState);

impl InputStateLabel {
    /// The 16 labels, qubit 0 major.
    pub fn all() -> [InputStateLabel; 16] {
        core::array::from_fn(|k| InputStateLabel(LocalState::ALL[k / 4], LocalState::ALL[k % 4]))
    }
}

pub fn input_state(label: InputStateLabel) -> [C64; 4] {
    kron_vec(&label.0.vector(), &label.1.vector())
}

pub fn pure_density(psi: &[C64; 4]) -> Mat4 {
    Mat4::outer(psi, psi)
}

/// Over-rotation of every π/2 pulse, depolarizing after each G and
/// amplitude damping of both qubits toward |↑⟩ at the end of the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct NoiseModel {
    /// Relative standard deviation of the rotation angle of each R pulse.
    pub overrotation_sigma: f64,
    /// Weight of the fully mixed state mixed in after each G.
    pub depolarizing_per_g: f64,
    /// Amplitude-damping probability per qubit, applied once.
    pub damping_per_circuit: f64,
}

impl NoiseModel {
    pub const IDEAL: NoiseModel =
        NoiseModel { overrotation_sigma: 0.0, depolarizing_per_g: 0.0, damping_per_circuit: 0.0 };

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.overrotation_sigma >= 0.0 && self.overrotation_sigma.is_finite()) {
            return Err(SimError::InvalidNoise("overrotation_sigma must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.depolarizing_per_g) {
            return Err(SimError::InvalidNoise("depolarizing_per_g must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.damping_per_circuit) {
            return Err(SimError::InvalidNoise("damping_per_circuit must lie in [0, 1]"));
        }
        Ok(())
    }

    /// True when every realization is the same channel.
    pub fn is_deterministic(&self) -> bool {
        self.overrotation_sigma == 0.0
    }
}

pub fn check_density(rho: &Mat4, tol: f64) -> Result<(), SimError> {
    if !rho.is_finite() {
        return Err(SimError::InvalidDensityMatrix("non-finite entries"));
    }
    if rho.hermiticity_residual() > tol {
        return Err(SimError::InvalidDensityMatrix("not Hermitian"));
    }
    if (rho.trace().re - 1.0).abs() > tol {
        return Err(SimError::InvalidDensityMatrix("trace is not 1"));
    }
    let (vals, _) = eigh(rho);
    if vals[0] < -tol {
        return Err(SimError::InvalidDensityMatrix("negative eigenvalue"));
    }
    Ok(())
}

fn conjugate(u: &Mat4, rho: &Mat4) -> Mat4 {
    *u * *rho * u.adjoint()
}

fn damp(rho: &Mat4, gamma: f64) -> Mat4 {
    let k0 = CMat([[ONE, ZERO], [ZERO, C64::new((1.0 - gamma).sqrt(), 0.0)]]);
    let k1 = CMat([[ZERO, C64::new(gamma.sqrt(), 0.0)], [ZERO, ZERO]]);
    let mut out = *rho;
    for target in 0..2u8 {
        let a = embed(&k0, target);
        let b = embed(&k1, target);
        out = conjugate(&a, &out) + conjugate(&b, &out);
    }
    out
}

/// One Monte-Carlo realization of the noisy sequence acting on `rho`.
pub fn apply_channel<R: RngCore + ?Sized>(
    rho: &Mat4,
    seq: &PulseSequence,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Mat4, SimError> {
    check_density(rho, 1e-9)?;
    noise.validate()?;
    let mixed = Mat4::identity().scale(C64::new(0.25, 0.0));
    let p = noise.depolarizing_per_g;
    let mut out = *rho;
    for e in &seq.elements {
        match *e {
            GateLibraryElement::R { theta, phi, target } => {
                let scale = if noise.overrotation_sigma > 0.0 {
                    let z: f64 = StandardNormal.sample(rng);
                    1.0 + noise.overrotation_sigma * z
                } else {
                    1.0
                };
                out = conjugate(&embed(&r(theta * scale, phi), target), &out);
            }
            GateLibraryElement::Rz { .. } => out = conjugate(&e.embedded(), &out),
            GateLibraryElement::G => {
                out = conjugate(&g(), &out);
                if p > 0.0 {
                    out = out.scale(C64::new(1.0 - p, 0.0)) + mixed.scale(C64::new(p, 0.0));
                }
            }
        }
    }
    if noise.damping_per_circuit > 0.0 {
        out = damp(&out, noise.damping_per_circuit);
    }
    Ok(out.hermitian_part())
}

/// Measurement basis for one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    /// Rotation applied before a computational-basis readout:
    /// X via R(π/2, π/2), Y via R(π/2, 0).
    pub fn pre_rotation(self) -> Mat2 {
        match self {
            Basis::Z => Mat2::identity(),
            Basis::X => r(FRAC_PI_2, FRAC_PI_2),
            Basis::Y => r(FRAC_PI_2, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Basis::Z, Basis::X, Basis::Y].into_iter().find(|b| b.name() == s)
    }
}

pub type Setting = [Basis; 2];

/// The nine analysis settings in fixed order.
pub const SETTINGS: [Setting; 9] = [
    [Basis::Z, Basis::Z],
    [Basis::Z, Basis::X],
    [Basis::Z, Basis::Y],
    [Basis::X, Basis::Z],
    [Basis::X, Basis::X],
    [Basis::X, Basis::Y],
    [Basis::Y, Basis::Z],
    [Basis::Y, Basis::X],
    [Basis::Y, Basis::Y],
];

/// Counts over outcomes (↑↑, ↑↓, ↓↑, ↓↓) after the setting's pre-rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub setting: Setting,
    pub counts: [u64; 4],
    pub shots: u64,
}

pub fn setting_rotation(setting: Setting) -> Mat4 {
    kron(&setting[0].pre_rotation(), &setting[1].pre_rotation())
}

/// Projectors of the four outcomes of `setting`, pulled back to the lab frame.
pub fn projectors(setting: Setting) -> [Mat4; 4] {
    let w = setting_rotation(setting);
    core::array::from_fn(|k| {
        let mut e = Mat4::zeros();
        e.0[k][k] = ONE;
        w.adjoint() * e * w
    })
}

/// Born probabilities of the four outcomes.
pub fn probabilities(rho: &Mat4, setting: Setting) -> [f64; 4] {
    let w = setting_rotation(setting);
    let rotated = conjugate(&w, rho);
    let mut p: [f64; 4] = core::array::from_fn(|k| rotated.0[k][k].re.max(0.0));
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        p.iter_mut().for_each(|x| *x /= s);
    }
    p
}

/// Multinomial draw of `shots` outcomes with probabilities `p`.
pub fn multinomial<R: RngCore + ?Sized>(p: &[f64; 4], shots: u64, rng: &mut R) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut left = shots;
    let mut mass = 1.0;
    for k in 0..3 {
        if left == 0 {
            break;
        }
        let q = if mass > 0.0 { (p[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(left, q).map(|b| b.sample(rng)).unwrap_or(0);
        counts[k] = n;
        left -= n;
        mass -= p[k];
    }
    counts[3] = left;
    counts
}

fn categorical<R: RngCore + ?Sized>(p: &[f64; 4], rng: &mut R) -> usize {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for (k, pk) in p.iter().enumerate() {
        acc += pk;
        if x < acc {
            return k;
        }
    }
    3
}

pub fn measure<R: RngCore + ?Sized>(rho: &Mat4, setting: Setting, shots: u64, rng: &mut R) -> MeasurementRecord {
    let p = probabilities(rho, setting);
    MeasurementRecord { setting, counts: multinomial(&p, shots, rng), shots }
}

/// Compile `u` and simulate `shots_per_setting` independent runs for each of
/// the nine settings. Every run draws fresh pulse errors; when the noise has
/// no stochastic part the channel output is computed once.
pub fn run_experiment<R: RngCore + ?Sized>(
    u: &Mat4,
    label: InputStateLabel,
    noise: &NoiseModel,
    shots_per_setting: u64,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>, SimError> {
    noise.validate()?;
    let seq = lower_to_pulses(&decompose(u)?);
    run_sequence(&seq, label, noise, shots_per_setting, rng)
}

pub fn run_sequence<R: RngCore + ?Sized>(
    seq: &PulseSequence,
    label: InputStateLabel,
    noise: &NoiseModel,
    shots_per_setting: u64,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>, SimError> {
    let rho0 = pure_density(&input_state(label));
    if noise.is_deterministic() {
        let rho = apply_channel(&rho0, seq, noise, rng)?;
        return Ok(SETTINGS.iter().map(|&s| measure(&rho, s, shots_per_setting, rng)).collect());
    }
    let mut out = Vec::with_capacity(9);
    for &s in SETTINGS.iter() {
        let mut counts = [0u64; 4];
        for _ in 0..shots_per_setting {
            let rho = apply_channel(&rho0, seq, noise, rng)?;
            counts[categorical(&probabilities(&rho, s), rng)] += 1;
        }
        out.push(MeasurementRecord { setting: s, counts, shots: shots_per_setting });
    }
    Ok(out)
}

/// Mean channel output for `label`, averaged over `realizations` noise draws
/// (a single evaluation when the noise is deterministic).
pub fn expected_output<R: RngCore + ?Sized>(
    seq: &PulseSequence,
    label: InputStateLabel,
    noise: &NoiseModel,
    realizations: u64,
    rng: &mut R,
) -> Result<Mat4, SimError> {
    let rho0 = pure_density(&input_state(label));
    if noise.is_deterministic() || realizations <= 1 {
        return apply_channel(&rho0, seq, noise, rng);
    }
    let mut acc = Mat4::zeros();
    for _ in 0..realizations {
        acc = acc + apply_channel(&rho0, seq, noise, rng)?;
    }
    Ok(acc.scale(C64::new(1.0 / realizations as f64, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{sample_su4, SeededRng};

    #[test]
    fn input_state_examples() {
        let s = input_state(InputStateLabel(LocalState::Up, LocalState::Up));
        assert_eq!(s, [ONE, ZERO, ZERO, ZERO]);
        let s = input_state(InputStateLabel(LocalState::Plus, LocalState::Down));
        let h = FRAC_1_SQRT_2;
        for (a, b) in s.iter().zip([0.0, h, 0.0, h]) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-15);
        }
        let s = input_state(InputStateLabel(LocalState::MinusI, LocalState::Plus));
        let e = [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, -0.5), C64::new(0.0, -0.5)];
        for (a, b) in s.iter().zip(e) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ideal_channel_is_unitary_conjugation() {
        let mut rng = SeededRng::new(1);
        let u = sample_su4(&mut rng);
        let seq = lower_to_pulses(&decompose(&u).unwrap());
        let rho = pure_density(&[ONE, ZERO, ZERO, ZERO]);
        let out = apply_channel(&rho, &seq, &NoiseModel::IDEAL, &mut rng).unwrap();
        assert!((out - u * rho * u.adjoint()).max_abs() < 1e-9);
    }

    #[test]
    fn full_depolarizing_gives_mixed_state() {
        let mut rng = SeededRng::new(2);
        let seq = lower_to_pulses(&decompose(&sample_su4(&mut rng)).unwrap());
        let noise = NoiseModel { depolarizing_per_g: 1.0, ..NoiseModel::IDEAL };
        let rho = pure_density(&input_state(InputStateLabel(LocalState::Plus, LocalState::MinusI)));
        let out = apply_channel(&rho, &seq, &noise, &mut rng).unwrap();
        assert!((out - Mat4::identity().scale(C64::new(0.25, 0.0))).max_abs() < 1e-12);
    }

    #[test]
    fn overrotation_fidelity_is_bracketed() {
        let mut rng = SeededRng::new(3);
        let u = sample_su4(&mut rng);
        let seq = lower_to_pulses(&decompose(&u).unwrap());
        let psi = u.mul_vec(&input_state(InputStateLabel(LocalState::Up, LocalState::Up)));
        let rho = pure_density(&input_state(InputStateLabel(LocalState::Up, LocalState::Up)));
        let noise = NoiseModel { overrotation_sigma: 0.01, ..NoiseModel::IDEAL };
        let mut mean = 0.0;
        for _ in 0..1000 {
            let out = apply_channel(&rho, &seq, &noise, &mut rng).unwrap();
            let f: C64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| psi[i].conj() * out.0[i][j] * psi[j]).sum();
            mean += f.re / 1000.0;
        }
        assert!(mean > 0.25 && mean < 1.0 - 1e-6, "{mean}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = SeededRng::new(4);
        let seq = PulseSequence::default();
        let bad = Mat4::identity();
        assert!(apply_channel(&bad, &seq, &NoiseModel::IDEAL, &mut rng).is_err());
        let rho = pure_density(&[ONE, ZERO, ZERO, ZERO]);
        let noise = NoiseModel { depolarizing_per_g: 1.5, ..NoiseModel::IDEAL };
        assert!(apply_channel(&rho, &seq, &noise, &mut rng).is_err());
    }

    #[test]
    fn measurement_examples() {
        let mut rng = SeededRng::new(5);
        let upup = pure_density(&[ONE, ZERO, ZERO, ZERO]);
        let rec = measure(&upup, [Basis::Z, Basis::Z], 100, &mut rng);
        assert_eq!(rec.counts, [100, 0, 0, 0]);

        let plus_up = pure_density(&input_state(InputStateLabel(LocalState::Plus, LocalState::Up)));
        let p = probabilities(&plus_up, [Basis::X, Basis::Z]);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12 || (p[2] + p[3] - 1.0).abs() < 1e-12);
        assert!(p[1] + p[3] < 1e-12);
    }

    #[test]
    fn bell_state_statistics() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let bell = pure_density(&[h, ZERO, ZERO, h]);
        let p = probabilities(&bell, [Basis::Z, Basis::Z]);
        for (a, b) in p.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut rng = SeededRng::new(6);
        let n = 10_000u64;
        let rec = measure(&bell, [Basis::Z, Basis::Z], n, &mut rng);
        assert_eq!(rec.counts[1] + rec.counts[2], 0);
        // chi-square with one degree of freedom, 99.9% quantile 10.83
        let e = n as f64 / 2.0;
        let chi = [rec.counts[0], rec.counts[3]].iter().map(|&c| (c as f64 - e).powi(2) / e).sum::<f64>();
        assert!(chi < 10.83, "{chi}");
    }

    #[test]
    fn marginals_are_consistent() {
        let mut rng = SeededRng::new(7);
        let u = sample_su4(&mut rng);
        let psi = u.mul_vec(&input_state(InputStateLabel(LocalState::Plus, LocalState::Down)));
        let rho = pure_density(&psi);
        let pz0 = probabilities(&rho, [Basis::Z, Basis::Z]);
        let pzx = probabilities(&rho, [Basis::Z, Basis::X]);
        let pzy = probabilities(&rho, [Basis::Z, Basis::Y]);
        for q in [pzx, pzy] {
            assert!(((pz0[0] + pz0[1]) - (q[0] + q[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn run_experiment_structure() {
        let mut rng = SeededRng::new(8);
        let recs = run_experiment(&Mat4::identity(), InputStateLabel(LocalState::Up, LocalState::Up), &NoiseModel::IDEAL, 100, &mut rng).unwrap();
        assert_eq!(recs.len(), 9);
        assert_eq!(recs.iter().map(|r| r.shots).sum::<u64>(), 900);
        assert_eq!(recs[0].counts, [100, 0, 0, 0]);
        for r in &recs {
            assert_eq!(r.counts.iter().sum::<u64>(), r.shots);
        }
        let noisy = NoiseModel { overrotation_sigma: 0.02, ..NoiseModel::IDEAL };
        let recs = run_experiment(&Mat4::identity(), InputStateLabel(LocalState::Up, LocalState::Up), &noisy, 20, &mut rng).unwrap();
        assert!(recs.iter().all(|r| r.counts.iter().sum::<u64>() == 20));
    }

    #[test]
    fn zero_noise_probabilities_are_born_rule() {
        let mut rng = SeededRng::new(9);
        let u = sample_su4(&mut rng);
        let label = InputStateLabel(LocalState::MinusI, LocalState::Plus);
        let seq = lower_to_pulses(&decompose(&u).unwrap());
        let out = expected_output(&seq, label, &NoiseModel::IDEAL, 1, &mut rng).unwrap();
        let psi = u.mul_vec(&input_state(label));
        for s in SETTINGS {
            let w = setting_rotation(s);
            let amp = w.mul_vec(&psi);
            let p = probabilities(&out, s);
            for k in 0..4 {
                assert!((p[k] - amp[k].norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn channel_outputs_stay_physical() {
        let mut rng = SeededRng::new(10);
        let noise = NoiseModel { overrotation_sigma: 0.05, depolarizing_per_g: 0.1, damping_per_circuit: 0.2 };
        for k in 0..100 {
            let u = sample_su4(&mut rng);
            let seq = lower_to_pulses(&decompose(&u).unwrap());
            let label = InputStateLabel::all()[k % 16];
            let out = apply_channel(&pure_density(&input_state(label)), &seq, &noise, &mut rng).unwrap();
            check_density(&out, 1e-10).unwrap();
        }
    }
}
