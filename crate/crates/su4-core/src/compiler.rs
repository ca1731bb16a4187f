//! Decomposition of arbitrary two-qubit unitaries into 15-parameter
//! circuits, local invariants and verification.

use core::f64::consts::PI;

use crate::gates::{
    circuit_to_unitary, core_magic_diag, frame_p, frame_q, frame_s, from_magic, ry, to_magic, CircuitParams,
    ClassParams,
};
use crate::linalg::{
    circular_distance, factor_tensor_product, joint_real_diagonalization, phase_invariant_distance,
    special_unitary_projection, su2_params, wrap_tau, EigenSystem, LinalgError, Mat4, RMat,
};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("input is not unitary (residual {0:e})")]
    NonUnitary(f64),
    #[error("magic-basis factor has imaginary residue {0:e}")]
    RealityViolation(f64),
    #[error("local factor is not a tensor product (residual {0:e})")]
    NotAProduct(f64),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for CompileError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NonUnitary(r) => CompileError::NonUnitary(r),
            LinalgError::NotAProduct(r) => CompileError::NotAProduct(r),
            other => CompileError::Linalg(other),
        }
    }
}

fn magic_square_eigen(u: &Mat4) -> Result<(Mat4, EigenSystem, num_complex::Complex64), CompileError> {
    let (su, phase) = special_unitary_projection(u)?;
    let um = to_magic(&su);
    let es = joint_real_diagonalization(&(um * um.transpose()))?;
    Ok((um, es, phase))
}

/// Sorted eigenphases of u·uᵀ in the magic basis after removing the
/// global phase.
///
/// The phases are determined up to a common shift by π: the fourth root
/// taken when removing the global phase multiplies u by a power of i.
/// Compare invariants with [`invariant_distance`].
pub fn local_invariants(u: &Mat4) -> Result<[f64; 4], CompileError> {
    let (_, es, _) = magic_square_eigen(u)?;
    Ok(es.phases)
}

/// Distance between two invariant lists on the circle, minimized over
/// pairings and over the common π shift.
pub fn invariant_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    let mut best = f64::INFINITY;
    for shift in [0.0, PI] {
        for p in PERMS.iter() {
            let d = (0..4).map(|i| circular_distance(a[i], b[p[i]] + shift)).fold(0.0, f64::max);
            best = best.min(d);
        }
    }
    best
}

fn class_from_phases(t: &[f64; 4]) -> ClassParams {
    ClassParams::new(wrap_tau((t[0] + t[1]) / 2.0), wrap_tau((t[0] + t[2]) / 2.0), wrap_tau((t[1] + t[2]) / 2.0))
}

/// (α, β, δ) from the sorted invariants: α = (φ₁+φ₂)/2, β = (φ₁+φ₃)/2,
/// δ = (φ₂+φ₃)/2, each wrapped into [0, 2π).
pub fn class_parameters(u: &Mat4) -> Result<ClassParams, CompileError> {
    Ok(class_from_phases(&local_invariants(u)?))
}

/// Reorder the columns of `k` so that column j carries the eigenvalue of
/// `l` column j, using nearest-on-circle greedy matching, then restore
/// det = +1 by negating the last column.
fn match_eigenvectors(l: &EigenSystem, k: &EigenSystem) -> RMat<4> {
    let mut used = [false; 4];
    let mut out = RMat::<4>::zeros();
    for j in 0..4 {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for c in 0..4 {
            if used[c] {
                continue;
            }
            let d = circular_distance(l.phases[j], k.phases[c]);
            if d < best_d - 1e-12 {
                best_d = d;
                best = c;
            }
        }
        used[best] = true;
        for i in 0..4 {
            out.0[i][j] = k.vectors.0[i][best];
        }
    }
    if out.det() < 0.0 {
        for i in 0..4 {
            out.0[i][3] = -out.0[i][3];
        }
    }
    out
}

/// Decompose `u` into `global_phase·(C⊗D)·V(α,β,δ)·(A⊗B)`.
pub fn decompose(u: &Mat4) -> Result<CircuitParams, CompileError> {
    let tol = Tolerances::DEFAULT;
    let (um, es_u, phase) = magic_square_eigen(u)?;
    let class = class_from_phases(&es_u.phases);
    let v = core_magic_diag(&class);
    let es_v = joint_real_diagonalization(&(v * v.transpose()))?;
    let k = match_eigenvectors(&es_u, &es_v);
    let l = es_u.vectors;

    // u = l·kᵀ·v·m with m = v†·k·lᵀ·u real orthogonal.
    let lk = l * k.transpose();
    let m = v.adjoint() * k.to_complex() * l.transpose().to_complex() * um;
    let im = m.max_abs_im();
    if !(im < tol.reality) {
        return Err(CompileError::RealityViolation(im));
    }
    let ab = from_magic(&m.re().to_complex());
    let cd = from_magic(&lk.to_complex());
    let (a1, b1, ph_ab) = factor_tensor_product(&ab)?;
    let (c1, d1, ph_cd) = factor_tensor_product(&cd)?;

    // Move the fixed frames of the class gate onto the local corrections.
    let p_dag = frame_p().adjoint();
    let a = p_dag * a1;
    let b = frame_s().adjoint() * b1;
    let c = c1 * p_dag;
    let d = d1 * ry(class.delta) * frame_q().adjoint();

    Ok(CircuitParams {
        class,
        a: su2_params(&a)?,
        b: su2_params(&b)?,
        c: su2_params(&c)?,
        d: su2_params(&d)?,
        global_phase: phase * ph_ab * ph_cd,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    pub distance: f64,
    pub invariant_error: f64,
    pub pass: bool,
}

/// Compare `u` with the unitary of `c`. Passes when the phase-invariant
/// distance is below `tolerance`.
pub fn verify(u: &Mat4, c: &CircuitParams, tolerance: f64) -> VerifyReport {
    let w = circuit_to_unitary(c);
    let distance = phase_invariant_distance(u, &w);
    let invariant_error = match (local_invariants(u), local_invariants(&w)) {
        (Ok(a), Ok(b)) => invariant_distance(&a, &b),
        _ => f64::INFINITY,
    };
    VerifyReport { distance, invariant_error, pass: distance < tolerance }
}
