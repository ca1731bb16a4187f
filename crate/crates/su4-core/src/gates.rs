//! Gate library {R, Rz, G}, the magic basis, class gates, full 15-parameter
//! circuits and their lowering to fixed-angle π/2 pulse sequences.
//!
//! Basis order is |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with |↑⟩ = (1, 0). Qubit 0 is the
//! left tensor factor.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{
    cis, kron, special_unitary_projection2, su2_params, wrap_tau, CMat, LinalgError, Mat2, Mat4, Su2Params, I,
    ONE, ZERO,
};

/// R(θ, φ) = cos(θ/2)·I − i·sin(θ/2)·(cos φ·σx + sin φ·σy)
pub fn r(theta: f64, phi: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let off = -I * s;
    CMat([[C64::new(c, 0.0), off * cis(-phi)], [off * cis(phi), C64::new(c, 0.0)]])
}

/// Rz(φz) = diag(e^{−iφz/2}, e^{iφz/2})
pub fn rz(phiz: f64) -> Mat2 {
    CMat([[cis(-phiz / 2.0), ZERO], [ZERO, cis(phiz / 2.0)]])
}

/// G = e^{−iπ/4}·exp(iπ/4·σz⊗σz) = diag(1, −i, −i, 1)
pub fn g() -> Mat4 {
    Mat4::diag(&[ONE, -I, -I, ONE])
}

/// Embed a single-qubit matrix on `target` (0 = left factor).
pub fn embed(m: &Mat2, target: u8) -> Mat4 {
    if target == 0 {
        kron(m, &Mat2::identity())
    } else {
        kron(&Mat2::identity(), m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateLibraryElement {
    R { theta: f64, phi: f64, target: u8 },
    Rz { phiz: f64, target: u8 },
    G,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateMatrix {
    Single(Mat2),
    Two(Mat4),
}

impl GateLibraryElement {
    pub fn matrix(&self) -> GateMatrix {
        match *self {
            GateLibraryElement::R { theta, phi, .. } => GateMatrix::Single(r(theta, phi)),
            GateLibraryElement::Rz { phiz, .. } => GateMatrix::Single(rz(phiz)),
            GateLibraryElement::G => GateMatrix::Two(g()),
        }
    }

    /// The element as a 4×4 operator on the register.
    pub fn embedded(&self) -> Mat4 {
        match (*self, self.matrix()) {
            (GateLibraryElement::R { target, .. }, GateMatrix::Single(m))
            | (GateLibraryElement::Rz { target, .. }, GateMatrix::Single(m)) => embed(&m, target),
            (_, GateMatrix::Two(m)) => m,
            _ => unreachable!(),
        }
    }
}

/// Matrix of a library element: 2×2 for R and Rz, 4×4 for G.
pub fn gate_matrix(g: &GateLibraryElement) -> GateMatrix {
    g.matrix()
}

/// Λ, the change of basis into the magic basis.
pub fn lambda() -> Mat4 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let hi = C64::new(0.0, FRAC_1_SQRT_2);
    CMat([
        [h, hi, ZERO, ZERO],
        [ZERO, ZERO, hi, h],
        [ZERO, ZERO, hi, -h],
        [h, -hi, ZERO, ZERO],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MagicDirection {
    ToMagic,
    FromMagic,
}

pub fn to_magic(m: &Mat4) -> Mat4 {
    let l = lambda();
    l.adjoint() * *m * l
}

pub fn from_magic(m: &Mat4) -> Mat4 {
    let l = lambda();
    l * *m * l.adjoint()
}

pub fn magic_transform(m: &Mat4, direction: MagicDirection) -> Mat4 {
    match direction {
        MagicDirection::ToMagic => to_magic(m),
        MagicDirection::FromMagic => from_magic(m),
    }
}

/// Local-equivalence-class coordinates (α, β, δ) in radians.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ClassParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl ClassParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Self {
        ClassParams { alpha, beta, delta }
    }

    /// (φ₁, φ₂, φ₃, φ₄) = (α+β−δ, α−β+δ, −α+β+δ, −α−β−δ)
    pub fn eigenphases(&self) -> [f64; 4] {
        let (a, b, d) = (self.alpha, self.beta, self.delta);
        [a + b - d, a - b + d, -a + b + d, -a - b - d]
    }
}

/// Λ·diag(e^{iφⱼ/2})·Λ†, an SU(4) element whose v·vᵀ has eigenvalues e^{iφⱼ}.
pub fn canonical_v(p: &ClassParams) -> Mat4 {
    from_magic(&Mat4::diag(&p.eigenphases().map(|x| cis(x / 2.0))))
}

/// exp(i(α/2·XX + β/2·YY + δ/2·ZZ)). Diagonal in the magic basis.
pub fn nonlocal_core(p: &ClassParams) -> Mat4 {
    from_magic(&core_magic_diag(p))
}

/// Magic-basis diagonal of [`nonlocal_core`]. The eigenphases appear in the
/// order (φ₂, φ₃, φ₁, φ₄)/2.
pub fn core_magic_diag(p: &ClassParams) -> Mat4 {
    let [p1, p2, p3, p4] = p.eigenphases();
    Mat4::diag(&[p2, p3, p1, p4].map(|x| cis(x / 2.0)))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Fixed qubit-0 frame around the class core.
pub fn frame_p() -> Mat2 {
    let s = FRAC_1_SQRT_2;
    CMat([[ZERO, c(-s, -s)], [c(s, -s), ZERO]])
}

/// Fixed qubit-1 frame after the class core.
pub fn frame_q() -> Mat2 {
    CMat([[c(0.5, -0.5), c(0.5, 0.5)], [c(-0.5, 0.5), c(0.5, 0.5)]])
}

/// Fixed qubit-1 frame before the class core.
pub fn frame_s() -> Mat2 {
    let s = FRAC_1_SQRT_2;
    CMat([[c(0.0, -s), c(0.0, s)], [c(0.0, s), c(0.0, s)]])
}

/// Ry(t) = R(t, π/2)
pub fn ry(t: f64) -> Mat2 {
    r(t, FRAC_PI_2)
}

/// The class gate V used by circuits:
/// (P ⊗ Q·Ry(−δ)) · exp(i(α/2·XX + β/2·YY + δ/2·ZZ)) · (P ⊗ S).
///
/// It has the same local invariants as `canonical_v` for the same
/// parameters and is the frame in which the reference parameter tables of
/// the experiment are expressed. det V = 1.
pub fn class_gate(p: &ClassParams) -> Mat4 {
    let post: Mat4 = kron(&frame_p(), &(frame_q() * ry(-p.delta)));
    let pre: Mat4 = kron(&frame_p(), &frame_s());
    post * nonlocal_core(p) * pre
}

/// One of the four single-qubit corrections: sign·Rz(φz)·R(θ, φ).
pub type LocalGate = Su2Params;

pub fn local_gate_matrix(l: &LocalGate) -> Mat2 {
    (rz(l.phiz) * r(l.theta, l.phi)).scale(C64::new(l.sign, 0.0))
}

/// U = global_phase · (C⊗D) · V · (A⊗B)
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParams {
    pub class: ClassParams,
    pub a: LocalGate,
    pub b: LocalGate,
    pub c: LocalGate,
    pub d: LocalGate,
    pub global_phase: C64,
}

impl CircuitParams {
    pub fn identity_params() -> Self {
        let z = LocalGate { theta: 0.0, phi: 0.0, phiz: 0.0, sign: 1.0 };
        CircuitParams { class: ClassParams::default(), a: z, b: z, c: z, d: z, global_phase: ONE }
    }

    /// Build from the 15 tabulated numbers in the order
    /// α β δ θA φA φzA θB φB φzB θC φC φzC θD φD φzD.
    pub fn from_row(row: &[f64; 15], global_phase: C64) -> Self {
        let l = |k: usize| LocalGate { theta: row[k], phi: row[k + 1], phiz: row[k + 2], sign: 1.0 };
        CircuitParams {
            class: ClassParams::new(row[0], row[1], row[2]),
            a: l(3),
            b: l(6),
            c: l(9),
            d: l(12),
            global_phase,
        }
    }
}

pub fn circuit_to_unitary(c: &CircuitParams) -> Mat4 {
    let ab: Mat4 = kron(&local_gate_matrix(&c.a), &local_gate_matrix(&c.b));
    let cd: Mat4 = kron(&local_gate_matrix(&c.c), &local_gate_matrix(&c.d));
    (cd * class_gate(&c.class) * ab).scale(c.global_phase)
}

/// Time-ordered list of library elements; every R has θ = π/2.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PulseSequence {
    pub elements: Vec<GateLibraryElement>,
}

impl PulseSequence {
    /// Operator of the whole sequence (first element acts first).
    pub fn compose(&self) -> Mat4 {
        self.elements.iter().fold(Mat4::identity(), |acc, e| e.embedded() * acc)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn g_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e, GateLibraryElement::G)).count()
    }
}

/// R(θ, φ) = R(π/2, φ+π/2)·Rz(θ)·R(π/2, φ−π/2), returned in time order.
pub fn lower_rotation(theta: f64, phi: f64, target: u8) -> [GateLibraryElement; 3] {
    [
        GateLibraryElement::R { theta: FRAC_PI_2, phi: wrap_tau(phi - FRAC_PI_2), target },
        GateLibraryElement::Rz { phiz: theta, target },
        GateLibraryElement::R { theta: FRAC_PI_2, phi: wrap_tau(phi + FRAC_PI_2), target },
    ]
}

/// Number of elements emitted by [`lower_to_pulses`] for every circuit.
pub const PULSE_COUNT: usize = 35;

/// i·H, the Hadamard scaled into SU(2).
fn ih() -> Mat2 {
    let h = C64::new(0.0, FRAC_1_SQRT_2);
    CMat([[h, h], [h, -h]])
}

/// Local layers (qubit 0, qubit 1) of a three-G realization of the class
/// core: core ∝ L3·G·L2·G·L1·G·L0.
pub fn core_layers(p: &ClassParams) -> [(Mat2, Mat2); 4] {
    let (a, b, d) = (p.alpha / 2.0, p.beta / 2.0, p.delta / 2.0);
    let h = ih();
    let q = FRAC_PI_2;
    [
        (h * rz(-q), Mat2::identity()),
        (h * rz(q), h * ry(q - 2.0 * b) * rz(q)),
        (h * rz(q - 2.0 * d) * rz(q), ry(2.0 * a - q) * h * rz(q)),
        (h * rz(q), rz(q) * rz(q)),
    ]
}

fn push_local(out: &mut Vec<GateLibraryElement>, m: &Mat2, target: u8) -> Result<(), LinalgError> {
    let (su, _) = special_unitary_projection2(m);
    let p = su2_params(&su)?;
    out.extend_from_slice(&lower_rotation(p.theta, p.phi, target));
    out.push(GateLibraryElement::Rz { phiz: p.phiz, target });
    Ok(())
}

/// Lower a circuit to π/2 pulses, Rz phases and three G gates.
///
/// The output always has [`PULSE_COUNT`] elements and composes to
/// `circuit_to_unitary(c)` up to a global phase.
pub fn lower_to_pulses(c: &CircuitParams) -> PulseSequence {
    let layers = core_layers(&c.class);
    let (p, q, s) = (frame_p(), frame_q(), frame_s());
    let (a, b) = (local_gate_matrix(&c.a), local_gate_matrix(&c.b));
    let (cc, dd) = (local_gate_matrix(&c.c), local_gate_matrix(&c.d));
    let slots: [(Mat2, Mat2); 4] = [
        (layers[0].0 * p * a, layers[0].1 * s * b),
        layers[1],
        layers[2],
        (cc * p * layers[3].0, dd * q * ry(-c.class.delta) * layers[3].1),
    ];
    let mut out = Vec::with_capacity(PULSE_COUNT);
    for (k, (m0, m1)) in slots.iter().enumerate() {
        if k > 0 {
            out.push(GateLibraryElement::G);
        }
        // Every slot is unitary with nonzero determinant, so extraction after
        // projection cannot fail.
        push_local(&mut out, m0, 0).expect("projected slot is in SU(2)");
        push_local(&mut out, m1, 1).expect("projected slot is in SU(2)");
    }
    PulseSequence { elements: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use crate::linalg::phase_invariant_distance;

    fn pauli(k: usize) -> Mat2 {
        match k {
            0 => CMat([[ZERO, ONE], [ONE, ZERO]]),
            1 => CMat([[ZERO, -I], [I, ZERO]]),
            _ => CMat([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    /// exp(i·t·P⊗P) = cos t·I + i sin t·P⊗P since (P⊗P)² = I.
    fn exp_pp(t: f64, k: usize) -> Mat4 {
        let pp: Mat4 = kron(&pauli(k), &pauli(k));
        Mat4::identity().scale(C64::new(t.cos(), 0.0)) + pp.scale(C64::new(0.0, t.sin()))
    }

    #[test]
    fn gate_matrix_examples() {
        let GateMatrix::Single(m) = gate_matrix(&GateLibraryElement::R { theta: PI, phi: 0.0, target: 0 }) else {
            panic!()
        };
        assert!((m - pauli(0).scale(-I)).max_abs() < 1e-15);
        let GateMatrix::Single(m) = gate_matrix(&GateLibraryElement::Rz { phiz: 0.0, target: 1 }) else { panic!() };
        assert_eq!(m, Mat2::identity());
        let GateMatrix::Two(m) = gate_matrix(&GateLibraryElement::G) else { panic!() };
        // e^{−iπ/4}·exp(iπ/4·Z⊗Z)
        let oracle = exp_pp(PI / 4.0, 2).scale(cis(-PI / 4.0));
        assert!((m - oracle).max_abs() < 1e-15);
        assert!((m.det() + ONE).norm() < 1e-15);
    }

    #[test]
    fn magic_examples() {
        assert!((to_magic(&Mat4::identity()) - Mat4::identity()).max_abs() < 1e-15);
        let mg = to_magic(&g());
        assert!((mg - Mat4::diag(&[ONE, ONE, -I, -I])).max_abs() < 1e-15);
        let m = Mat4::from_fn(|i, j| C64::new(i as f64, j as f64 * 0.5));
        assert!((from_magic(&to_magic(&m)) - m).max_abs() < 1e-14);
        assert_eq!(magic_transform(&m, MagicDirection::ToMagic), to_magic(&m));
    }

    #[test]
    fn pauli_pairs_are_diagonal_in_magic_basis() {
        let expect = [[1.0, -1.0, 1.0, -1.0], [-1.0, 1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0]];
        for k in 0..3 {
            let pp: Mat4 = kron(&pauli(k), &pauli(k));
            let d = Mat4::diag(&expect[k].map(|x| C64::new(x, 0.0)));
            assert!((to_magic(&pp) - d).max_abs() < 1e-15, "pair {k}");
        }
    }

    #[test]
    fn nonlocal_core_matches_pauli_exponential() {
        let p = ClassParams::new(0.7, -1.3, 2.9);
        let oracle = exp_pp(p.alpha / 2.0, 0) * exp_pp(p.beta / 2.0, 1) * exp_pp(p.delta / 2.0, 2);
        assert!((nonlocal_core(&p) - oracle).max_abs() < 1e-14);
    }

    #[test]
    fn canonical_v_examples() {
        assert!((canonical_v(&ClassParams::default()) - Mat4::identity()).max_abs() < 1e-15);
        let p = ClassParams::new(1.1, 2.3, -0.4);
        assert!((canonical_v(&p).det() - ONE).norm() < 1e-14);
        assert!((class_gate(&p).det() - ONE).norm() < 1e-14);
    }

    #[test]
    fn class_gate_frames() {
        for m in [frame_p(), frame_q(), frame_s()] {
            assert!(m.unitarity_residual() < 1e-15);
            assert!((m.det() - ONE).norm() < 1e-15);
        }
        // At the origin the class gate is a local operation, I ⊗ Rx(π/2) up to phase.
        let v0 = class_gate(&ClassParams::default());
        let rx: Mat4 = kron(&Mat2::identity(), &r(FRAC_PI_2, 0.0));
        assert!(phase_invariant_distance(&v0, &rx) < 1e-14);
    }

    #[test]
    fn eq5_lowering_examples() {
        let seq = PulseSequence { elements: lower_rotation(0.7, 2.0, 0).to_vec() };
        assert!((seq.compose() - embed(&r(0.7, 2.0), 0)).max_abs() < 1e-14);
        let seq = PulseSequence { elements: lower_rotation(0.0, 1.3, 1).to_vec() };
        assert!((seq.compose() - Mat4::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn core_layers_realize_the_core() {
        for p in [ClassParams::new(0.3, 1.7, -2.2), ClassParams::default(), ClassParams::new(PI, 0.0, PI / 2.0)] {
            let l = core_layers(&p);
            let k = |i: usize| -> Mat4 { kron(&l[i].0, &l[i].1) };
            let w = k(3) * g() * k(2) * g() * k(1) * g() * k(0);
            assert!(phase_invariant_distance(&w, &nonlocal_core(&p)) < 1e-13, "{p:?}");
        }
    }

    #[test]
    fn zero_circuit_is_local() {
        let u = circuit_to_unitary(&CircuitParams::identity_params());
        assert!((u - class_gate(&ClassParams::default())).max_abs() < 1e-15);
    }

    #[test]
    fn lowering_composes_and_counts() {
        let c1 = CircuitParams::from_row(
            &[5.058, 1.477, 6.144, 4.165, 4.759, 1.151, 4.327, 5.678, 2.088, 0.856, 5.210, 3.046, 2.526, 4.528, 1.570],
            -ONE,
        );
        let c2 = CircuitParams::identity_params();
        for c in [c1, c2] {
            let seq = lower_to_pulses(&c);
            assert_eq!(seq.len(), PULSE_COUNT);
            assert_eq!(seq.g_count(), 3);
            assert!(seq.elements.iter().all(|e| match e {
                GateLibraryElement::R { theta, .. } => *theta == FRAC_PI_2,
                _ => true,
            }));
            let d = phase_invariant_distance(&seq.compose(), &circuit_to_unitary(&c));
            assert!(d < 1e-12, "{d}");
        }
    }
}
