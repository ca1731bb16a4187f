//! Seeded generator and Haar-random SU(4) sampling.

use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{arg, cis, CMat, Mat4, ONE, ZERO};

/// ChaCha20 generator with an explicit 64-bit seed. Sub-streams for
/// independent tasks come from [`SeededRng::fork`].
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub const ALGORITHM: &'static str = "ChaCha20 (rand_chacha 0.9, seed_from_u64, stream-forked)";

    pub fn new(seed: u64) -> Self {
        SeededRng { seed, inner: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent deterministic generator for task `index`.
    pub fn fork(&self, index: u64) -> SeededRng {
        let mut inner = ChaCha20Rng::seed_from_u64(self.seed);
        inner.set_stream(index.wrapping_add(1));
        SeededRng { seed: self.seed, inner }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// 4×4 complex Ginibre matrix with E|z|² = 1.
pub fn ginibre<R: RngCore + ?Sized>(rng: &mut R) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m.0[i][j] = C64::new(re, im) * FRAC_1_SQRT_2;
        }
    }
    m
}

/// Householder QR. Returns Q and the diagonal of R.
pub fn householder_qr(a: &Mat4) -> (Mat4, [C64; 4]) {
    let mut r = *a;
    let mut q = Mat4::identity();
    let mut diag = [ZERO; 4];
    for k in 0..4 {
        let norm = (k..4).map(|i| r.0[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = ZERO;
            continue;
        }
        let alpha = -cis(arg(r.0[k][k])) * norm;
        let mut v = [ZERO; 4];
        for i in k..4 {
            v[i] = r.0[i][k];
        }
        v[k] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn > 0.0 {
            v.iter_mut().for_each(|z| *z /= vn);
            // r ← (I − 2vv†)·r, q ← q·(I − 2vv†)
            for j in 0..4 {
                let s: C64 = (k..4).map(|i| v[i].conj() * r.0[i][j]).sum();
                for i in k..4 {
                    r.0[i][j] -= v[i] * s * 2.0;
                }
            }
            for i in 0..4 {
                let s: C64 = (k..4).map(|j| q.0[i][j] * v[j]).sum();
                for j in k..4 {
                    q.0[i][j] -= s * v[j].conj() * 2.0;
                }
            }
        }
        diag[k] = r.0[k][k];
    }
    (q, diag)
}

/// QR-based unitary from a Ginibre draw. With `phase_fix` the columns of Q
/// are rescaled by the phases of R's diagonal, which makes the result
/// Haar-distributed; without it the distribution is biased.
pub fn qr_unitary<R: RngCore + ?Sized>(rng: &mut R, phase_fix: bool) -> Mat4 {
    let z = ginibre(rng);
    let (q, d) = householder_qr(&z);
    if !phase_fix {
        return q;
    }
    let ph = d.map(|x| if x.norm() > 0.0 { x / x.norm() } else { ONE });
    CMat::from_fn(|i, j| q.0[i][j] * ph[j])
}

/// Haar-random element of SU(4).
pub fn sample_su4<R: RngCore + ?Sized>(rng: &mut R) -> Mat4 {
    let u = qr_unitary(rng, true);
    let ph = cis(arg(u.det()) / 4.0);
    u.scale(ph.conj())
}

/// Haar-random element of U(2), used for local dressings.
pub fn sample_u2<R: RngCore + ?Sized>(rng: &mut R) -> crate::linalg::Mat2 {
    let z = ginibre(rng);
    let m = crate::linalg::Mat2::from_fn(|i, j| z.0[i][j]);
    // Gram-Schmidt on the columns with positive diagonal of R.
    let c0 = [m.0[0][0], m.0[1][0]];
    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    let e0 = [c0[0] / n0, c0[1] / n0];
    let c1 = [m.0[0][1], m.0[1][1]];
    let p = e0[0].conj() * c1[0] + e0[1].conj() * c1[1];
    let w = [c1[0] - p * e0[0], c1[1] - p * e0[1]];
    let n1 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    CMat([[e0[0], w[0] / n1], [e0[1], w[1] / n1]])
}
