//! Numerical thresholds shared by every module.

/// Tolerance configuration. `Tolerances::DEFAULT` holds the thresholds used
/// by the library internals; `verify` takes its pass threshold from here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// ‖u†u − I‖_max accepted as unitary input.
    pub unitarity: f64,
    /// ‖w − wᵀ‖_max accepted as symmetric input.
    pub symmetry: f64,
    /// |det m − 1| accepted for SU(2) parameter extraction.
    pub su2_det: f64,
    /// θ within this distance of 0 or π snaps to the boundary convention.
    pub angle_snap: f64,
    /// Eigenvalues closer than this are treated as one cluster.
    pub eigen_cluster: f64,
    /// Imaginary residue tolerated in matrices that must be real.
    pub reality: f64,
    /// Residual tolerated when factoring a tensor product.
    pub factorization: f64,
    /// Phase-invariant distance under which `verify` passes.
    pub verify: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unitarity: 1e-8,
        symmetry: 1e-8,
        su2_det: 1e-9,
        angle_snap: 1e-9,
        eigen_cluster: 1e-6,
        reality: 1e-6,
        factorization: 1e-6,
        verify: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
