//! Dense fixed-size complex and real matrices plus the kernels the compiler
//! needs: Kronecker products and their factorization, special-unitary
//! projection, joint real diagonalization of unitary symmetric matrices,
//! phase-invariant distances and SU(2) parameter extraction.

use core::f64::consts::{PI, TAU};
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::tolerance::Tolerances;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;
pub type Mat16 = CMat<16>;

/// Square real matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RMat<const N: usize>(pub [[f64; N]; N]);

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not unitary (residual {0:e})")]
    NonUnitary(f64),
    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not a tensor product (residual {0:e})")]
    NotAProduct(f64),
    #[error("determinant is not one (|det - 1| = {0:e})")]
    NotSpecialUnitary(f64),
}

impl<const N: usize> CMat<N> {
    pub const fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Outer product |a><b|.
    pub fn outer(a: &[C64; N], b: &[C64; N]) -> Self {
        Self::from_fn(|i, j| a[i] * b[j].conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn re(&self) -> RMat<N> {
        RMat::from_fn(|i, j| self.0[i][j].re)
    }

    pub fn im(&self) -> RMat<N> {
        RMat::from_fn(|i, j| self.0[i][j].im)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for z in row {
                m = m.max(z.norm());
            }
        }
        m
    }

    pub fn max_abs_im(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for z in row {
                m = m.max(z.im.abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// ‖M†M − I‖_max.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    /// ‖M − M†‖_max.
    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            for j in 0..N {
                out[i] += self.0[i][j] * v[j];
            }
        }
        out
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for k in 0..N {
            let mut p = k;
            for r in k + 1..N {
                if a[r][k].norm() > a[p][k].norm() {
                    p = r;
                }
            }
            if a[p][k].norm() == 0.0 {
                return ZERO;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for r in k + 1..N {
                let f = a[r][k] / a[k][k];
                for c in k..N {
                    let t = a[k][c];
                    a[r][c] -= f * t;
                }
            }
        }
        det
    }

    /// Inverse via Gauss-Jordan elimination. Returns `None` when a pivot
    /// falls below `1e-12` times the largest entry.
    pub fn inverse(&self) -> Option<Self> {
        let scale = self.max_abs();
        let mut a = self.0;
        let mut inv = Self::identity().0;
        for k in 0..N {
            let mut p = k;
            for r in k + 1..N {
                if a[r][k].norm() > a[p][k].norm() {
                    p = r;
                }
            }
            if a[p][k].norm() <= 1e-12 * scale {
                return None;
            }
            a.swap(p, k);
            inv.swap(p, k);
            let d = ONE / a[k][k];
            for c in 0..N {
                a[k][c] *= d;
                inv[k][c] *= d;
            }
            for r in 0..N {
                if r != k {
                    let f = a[r][k];
                    if f != ZERO {
                        for c in 0..N {
                            let (ak, ik) = (a[k][c], inv[k][c]);
                            a[r][c] -= f * ak;
                            inv[r][c] -= f * ik;
                        }
                    }
                }
            }
        }
        Some(CMat(inv))
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> RMat<N> {
    pub const fn zeros() -> Self {
        RMat([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn to_complex(&self) -> CMat<N> {
        CMat::from_fn(|i, j| C64::new(self.0[i][j], 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn det(&self) -> f64 {
        self.to_complex().det().re
    }

    pub fn column(&self, j: usize) -> [f64; N] {
        core::array::from_fn(|i| self.0[i][j])
    }
}

impl<const N: usize> Mul for RMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Sub for RMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

/// Kronecker product; the output dimension is checked at compile time.
pub fn kron<const A: usize, const B: usize, const C: usize>(a: &CMat<A>, b: &CMat<B>) -> CMat<C> {
    const { assert!(A * B == C, "kron output dimension must equal the product of input dimensions") };
    let mut out = CMat::<C>::zeros();
    for i in 0..A {
        for j in 0..A {
            for k in 0..B {
                for l in 0..B {
                    out.0[i * B + k][j * B + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

pub fn kron_vec<const A: usize, const B: usize, const C: usize>(a: &[C64; A], b: &[C64; B]) -> [C64; C] {
    const { assert!(A * B == C, "kron output dimension must equal the product of input dimensions") };
    core::array::from_fn(|n| a[n / B] * b[n % B])
}

/// Wrap an angle into (−π, π], sending −π to +π.
pub fn wrap_pi(x: f64) -> f64 {
    let mut y = x % TAU;
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// Wrap an angle into [0, 2π).
pub fn wrap_tau(x: f64) -> f64 {
    let y = x.rem_euclid_f(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

trait RemEuclid {
    fn rem_euclid_f(self, m: f64) -> f64;
}

impl RemEuclid for f64 {
    fn rem_euclid_f(self, m: f64) -> f64 {
        let r = self % m;
        if r < 0.0 {
            r + m
        } else {
            r
        }
    }
}

/// Principal argument mapped to (−π, π].
pub fn arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

pub fn cis(x: f64) -> C64 {
    C64::new(x.cos(), x.sin())
}

/// Shortest distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Divide a unitary by a fourth root of its determinant.
///
/// Returns `(su, phase)` with `su = u / phase`, `det(su) = 1` and the
/// principal root, `arg(phase)` in (−π/4, π/4].
pub fn special_unitary_projection(u: &Mat4) -> Result<(Mat4, C64), LinalgError> {
    let r = u.unitarity_residual();
    if !(r < Tolerances::DEFAULT.unitarity) {
        return Err(LinalgError::NonUnitary(r));
    }
    let phase = cis(arg(u.det()) / 4.0);
    Ok((u.scale(phase.conj()), phase))
}

/// Same as [`special_unitary_projection`] for 2×2 matrices using a square root.
pub fn special_unitary_projection2(u: &Mat2) -> (Mat2, C64) {
    let phase = cis(arg(u.det()) / 2.0);
    (u.scale(phase.conj()), phase)
}

/// Unitary polar factor m·(m†m)^{−1/2}, the closest unitary to `m`.
/// `None` if `m` is singular.
pub fn nearest_unitary<const N: usize>(m: &CMat<N>) -> Option<CMat<N>> {
    let (vals, vecs) = eigh(&(m.adjoint() * *m));
    if !(vals[0] > 1e-24) {
        return None;
    }
    Some(*m * from_eigen(&vals.map(|v| 1.0 / v.sqrt()), &vecs))
}

/// Eigenphases and real orthogonal eigenvectors of a unitary symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    /// Eigenphases in (−π, π], ascending.
    pub phases: [f64; 4],
    /// Columns are the eigenvectors; orthogonal with determinant +1.
    pub vectors: RMat<4>,
}

impl EigenSystem {
    /// vectors·diag(e^{iφ})·vectorsᵀ
    pub fn reconstruct(&self) -> Mat4 {
        let o = self.vectors.to_complex();
        let d = Mat4::diag(&self.phases.map(cis));
        o * d * o.transpose()
    }
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix.
/// Eigenvalues come back ascending with matching eigenvector columns.
pub fn eigh_real<const N: usize>(a: &RMat<N>) -> ([f64; N], RMat<N>) {
    let mut a = *a;
    let mut v = RMat::<N>::identity();
    let norm = a.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..N {
            for q in p + 1..N {
                off = off.max(a.0[p][q].abs());
            }
        }
        if off <= 1e-17 * norm {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.0[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * apq).atan2(a.0[p][p] - a.0[q][q]);
                let (s, c) = theta.sin_cos();
                for k in 0..N {
                    let (akp, akq) = (a.0[k][p], a.0[k][q]);
                    a.0[k][p] = c * akp + s * akq;
                    a.0[k][q] = -s * akp + c * akq;
                }
                for k in 0..N {
                    let (apk, aqk) = (a.0[p][k], a.0[q][k]);
                    a.0[p][k] = c * apk + s * aqk;
                    a.0[q][k] = -s * apk + c * aqk;
                }
                for k in 0..N {
                    let (vkp, vkq) = (v.0[k][p], v.0[k][q]);
                    v.0[k][p] = c * vkp + s * vkq;
                    v.0[k][q] = -s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: [usize; N] = core::array::from_fn(|i| i);
    idx.sort_by(|&i, &j| a.0[i][i].total_cmp(&a.0[j][j]));
    let vals = idx.map(|i| a.0[i][i]);
    let vecs = RMat::from_fn(|r, c| v.0[r][idx[c]]);
    (vals, vecs)
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
/// Eigenvalues come back ascending with matching unitary eigenvector columns.
pub fn eigh<const N: usize>(h: &CMat<N>) -> ([f64; N], CMat<N>) {
    let mut a = h.hermitian_part();
    let mut v = CMat::<N>::identity();
    let norm = a.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..N {
            for q in p + 1..N {
                off = off.max(a.0[p][q].norm());
            }
        }
        if off <= 1e-17 * norm {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Q = diag(1, e^{-iγ}) · [[c, -s], [s, c]] on columns p, q.
                let e = (apq / r).conj();
                let theta = 0.5 * (2.0 * r).atan2(a.0[p][p].re - a.0[q][q].re);
                let (s, c) = theta.sin_cos();
                let q00 = C64::new(c, 0.0);
                let q01 = C64::new(-s, 0.0);
                let q10 = e * s;
                let q11 = e * c;
                for k in 0..N {
                    let (akp, akq) = (a.0[k][p], a.0[k][q]);
                    a.0[k][p] = akp * q00 + akq * q10;
                    a.0[k][q] = akp * q01 + akq * q11;
                }
                for k in 0..N {
                    let (apk, aqk) = (a.0[p][k], a.0[q][k]);
                    a.0[p][k] = q00.conj() * apk + q10.conj() * aqk;
                    a.0[q][k] = q01.conj() * apk + q11.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
                for k in 0..N {
                    let (vkp, vkq) = (v.0[k][p], v.0[k][q]);
                    v.0[k][p] = vkp * q00 + vkq * q10;
                    v.0[k][q] = vkp * q01 + vkq * q11;
                }
            }
        }
    }
    let mut idx: [usize; N] = core::array::from_fn(|i| i);
    idx.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let vals = idx.map(|i| a.0[i][i].re);
    let vecs = CMat::from_fn(|r, c| v.0[r][idx[c]]);
    (vals, vecs)
}

/// Rebuild a Hermitian matrix from eigenvalues and eigenvectors.
pub fn from_eigen<const N: usize>(vals: &[f64; N], vecs: &CMat<N>) -> CMat<N> {
    let d = CMat::diag(&vals.map(|x| C64::new(x, 0.0)));
    *vecs * d * vecs.adjoint()
}

/// Weight applied to the imaginary part when forming the single real
/// symmetric matrix whose eigenvectors diagonalize both parts.
pub const JOINT_DIAG_WEIGHT: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Diagonalize a unitary symmetric matrix with a real orthogonal basis.
///
/// `Re w` and `Im w` commute, so the eigenvectors of `Re w + t·Im w` are
/// shared by both. Clusters of equal eigenvalues of the combination are
/// refined with `Im w` restricted to the cluster. Output columns are sorted
/// by phase, sign-normalized, and the last column is negated if needed to
/// reach determinant +1.
pub fn joint_real_diagonalization(w: &Mat4) -> Result<EigenSystem, LinalgError> {
    let tol = Tolerances::DEFAULT;
    let sym = (*w - w.transpose()).max_abs();
    if !(sym < tol.symmetry) {
        return Err(LinalgError::NotSymmetric(sym));
    }
    let unit = w.unitarity_residual();
    if !(unit < tol.unitarity) {
        return Err(LinalgError::NonUnitary(unit));
    }
    let re = w.re();
    let im = w.im();
    let combo = RMat::from_fn(|i, j| {
        let x = re.0[i][j] + JOINT_DIAG_WEIGHT * im.0[i][j];
        let y = re.0[j][i] + JOINT_DIAG_WEIGHT * im.0[j][i];
        0.5 * (x + y)
    });
    let (mu, mut vecs) = eigh_real(&combo);

    // Refine clusters of (numerically) equal combination eigenvalues.
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (mu[end] - mu[end - 1]).abs() < tol.eigen_cluster {
            end += 1;
        }
        if end - start > 1 {
            refine_cluster(&mut vecs, &im, start, end);
        }
        start = end;
    }

    let wd = vecs.to_complex().transpose() * *w * vecs.to_complex();
    let mut cols: [([f64; 4], f64); 4] = core::array::from_fn(|j| {
        let mut col = vecs.column(j);
        if let Some(&first) = col.iter().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
        (col, arg(wd.0[j][j]))
    });
    // Ties: larger leading components first, so the identity maps to itself.
    cols.sort_by(|a, b| {
        if (a.1 - b.1).abs() < 1e-9 {
            for k in 0..4 {
                let o = b.0[k].total_cmp(&a.0[k]);
                if o != core::cmp::Ordering::Equal && (a.0[k] - b.0[k]).abs() > 1e-12 {
                    return o;
                }
            }
            core::cmp::Ordering::Equal
        } else {
            a.1.total_cmp(&b.1)
        }
    });
    let mut vectors = RMat::from_fn(|i, j| cols[j].0[i]);
    if vectors.det() < 0.0 {
        for i in 0..4 {
            vectors.0[i][3] = -vectors.0[i][3];
        }
    }
    Ok(EigenSystem { phases: cols.map(|c| c.1), vectors })
}

fn refine_cluster(vecs: &mut RMat<4>, m: &RMat<4>, start: usize, end: usize) {
    // Restrict m to span{vecs[:, start..end]} and rotate within the span.
    let k = end - start;
    let mut sub = RMat::<4>::zeros();
    for a in 0..k {
        for b in 0..k {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += vecs.0[i][start + a] * m.0[i][j] * vecs.0[j][start + b];
                }
            }
            sub.0[a][b] = s;
        }
    }
    // Pad unused diagonal entries far away so they sort last.
    let big = 1e6;
    for a in k..4 {
        sub.0[a][a] = big + a as f64;
    }
    let (_, rot) = eigh_real(&sub);
    let old = *vecs;
    for c in 0..k {
        for i in 0..4 {
            vecs.0[i][start + c] = (0..k).map(|a| old.0[i][start + a] * rot.0[a][c]).sum();
        }
    }
}

/// Split a 4×4 unitary into `phase · kron(a, b)` with `a, b ∈ SU(2)`.
pub fn factor_tensor_product(m: &Mat4) -> Result<(Mat2, Mat2, C64), LinalgError> {
    let block = |i: usize, j: usize| Mat2::from_fn(|k, l| m.0[2 * i + k][2 * j + l]);
    let frob = |b: &Mat2| b.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for i in 0..2 {
        for j in 0..2 {
            let n = frob(&block(i, j));
            if n > best_norm + 1e-12 {
                best_norm = n;
                best = (i, j);
            }
        }
    }
    let b0 = block(best.0, best.1);
    let db = b0.det();
    if db.norm() < 1e-12 {
        let resid = m.max_abs();
        return Err(LinalgError::NotAProduct(resid));
    }
    let b = b0.scale(ONE / db.sqrt());
    let bd = b.adjoint();
    let a = Mat2::from_fn(|i, j| (bd * block(i, j)).trace() / 2.0);
    let da = a.det();
    if da.norm() < 1e-12 {
        return Err(LinalgError::NotAProduct(m.max_abs()));
    }
    let a = a.scale(ONE / da.sqrt());
    let k: Mat4 = kron(&a, &b);
    let t = (k.adjoint() * *m).trace();
    let phase = if t.norm() > 1e-12 { t / t.norm() } else { ONE };
    let resid = (k.scale(phase) - *m).max_abs();
    if !(resid < Tolerances::DEFAULT.factorization) {
        return Err(LinalgError::NotAProduct(resid));
    }
    Ok((a, b, phase))
}

/// min over unit scalars c of ‖u − c·w‖_max, with c taken from the trace
/// overlap, or from a 360-point scan when the overlap vanishes.
pub fn phase_invariant_distance<const N: usize>(u: &CMat<N>, w: &CMat<N>) -> f64 {
    let t = (w.adjoint() * *u).trace();
    if t.norm() > 1e-12 {
        let c = t / t.norm();
        (*u - w.scale(c)).max_abs()
    } else {
        (0..360)
            .map(|k| (*u - w.scale(cis(k as f64 * TAU / 360.0))).max_abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Parameters of `sign · Rz(φz) · R(θ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Params {
    pub theta: f64,
    pub phi: f64,
    pub phiz: f64,
    pub sign: f64,
}

/// Extract `(θ, φ, φz, sign)` with `sign · Rz(φz) · R(θ, φ) = m`.
pub fn su2_params(m: &Mat2) -> Result<Su2Params, LinalgError> {
    let tol = Tolerances::DEFAULT;
    let d = (m.det() - ONE).norm();
    if !(d < tol.su2_det) {
        return Err(LinalgError::NotSpecialUnitary(d));
    }
    let (m00, m10) = (m.0[0][0], m.0[1][0]);
    let theta = 2.0 * m10.norm().atan2(m00.norm());
    if theta > PI - tol.angle_snap {
        // m ≈ R(π, φ); Rz is unobservable, fold the sign into φ.
        let phi = wrap_tau(arg(m10) + PI / 2.0);
        return Ok(Su2Params { theta: PI, phi, phiz: 0.0, sign: 1.0 });
    }
    // φz is defined mod 4π; the upper half of that range maps to sign −1.
    let mut raw = (-2.0 * arg(m00)).rem_euclid_f(2.0 * TAU);
    if raw >= 2.0 * TAU {
        raw = 0.0;
    }
    let (phiz, sign) = if raw >= TAU { (raw - TAU, -1.0) } else { (raw, 1.0) };
    if theta < tol.angle_snap {
        return Ok(Su2Params { theta: 0.0, phi: 0.0, phiz, sign });
    }
    let phi = wrap_tau(arg(m10 * sign) + PI / 2.0 - phiz / 2.0);
    Ok(Su2Params { theta, phi, phiz, sign })
}
