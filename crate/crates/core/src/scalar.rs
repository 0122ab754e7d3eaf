//! Floating-point scalar abstraction.
//!
//! All state-space numerics are generic over [`Scalar`], which is implemented
//! for `f32` and `f64`. Every tolerance used by the library is an associated
//! constant of this trait, so there is a single point of tuning per precision.
//! The `f64` values are the working defaults; the `f32` values are the same
//! thresholds scaled to single-precision rounding.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type underlying complex amplitudes.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Unit-norm validation: |‖v‖ − 1| must stay below this.
    const NORM_TOL: Self;
    /// Basis validation: |⟨v_j, v_k⟩ − δ_jk| must stay below this.
    const ORTHO_TOL: Self;
    /// Eigensolver contract: ‖H v − λ v‖ stays below this for unit ‖H‖ scale.
    const EIGEN_TOL: Self;
    /// Hermiticity validation: max |H_jk − conj(H_kj)| must stay below this.
    const HERMITIAN_TOL: Self;
    /// Expansion coefficients at or below this modulus take phase 1 in the
    /// imposition operators.
    const ZERO_COEFF: Self;
    /// Probability vectors must sum to 1 within this.
    const SIMPLEX_TOL: Self;
    /// Canonical-phase pivot: first coefficient with modulus above this is
    /// rotated real nonnegative.
    const PHASE_PIVOT: Self;
    /// Partner-symmetry condition checks (real parts, moduli, products).
    const CONDITION_TOL: Self;
    /// A reconstructed ray counts as a partner when every measured
    /// distribution matches within this.
    const PARTNER_TOL: Self;
    /// Two bases count as unbiased when every cross overlap has modulus
    /// 1/√N within this.
    const UNBIASED_TOL: Self;
    /// Converged rays closer than this belong to the same cluster.
    const CLUSTER_TOL: Self;

    /// Lossless conversion from `f64` literals (tolerances, parsed input).
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to Scalar")
    }

    /// Widening conversion for error reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    const NORM_TOL: Self = 1e-12;
    const ORTHO_TOL: Self = 1e-10;
    const EIGEN_TOL: Self = 1e-9;
    const HERMITIAN_TOL: Self = 1e-10;
    const ZERO_COEFF: Self = 1e-14;
    const SIMPLEX_TOL: Self = 1e-10;
    const PHASE_PIVOT: Self = 1e-10;
    const CONDITION_TOL: Self = 1e-10;
    const PARTNER_TOL: Self = 1e-8;
    const UNBIASED_TOL: Self = 1e-8;
    const CLUSTER_TOL: Self = 1e-6;
}

impl Scalar for f32 {
    const NORM_TOL: Self = 1e-5;
    const ORTHO_TOL: Self = 1e-4;
    const EIGEN_TOL: Self = 1e-3;
    const HERMITIAN_TOL: Self = 1e-4;
    const ZERO_COEFF: Self = 1e-6;
    const SIMPLEX_TOL: Self = 1e-4;
    const PHASE_PIVOT: Self = 1e-4;
    const CONDITION_TOL: Self = 1e-4;
    const PARTNER_TOL: Self = 1e-3;
    const UNBIASED_TOL: Self = 1e-3;
    const CLUSTER_TOL: Self = 1e-2;
}

/// Complex amplitude over a [`Scalar`].
pub type Cpx<T> = Complex<T>;

/// Unit-modulus phase of `z`, or exactly 1 when |z| ≤ `Scalar::ZERO_COEFF`.
pub(crate) fn phase_or_one<T: Scalar>(z: Cpx<T>) -> Cpx<T> {
    let m = z.norm();
    if m > T::ZERO_COEFF {
        z / m
    } else {
        Cpx::new(T::one(), T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::assertions_on_constants)]
    fn tolerance_ordering_f64() {
        // The cluster radius must sit strictly between convergence-scale
        // errors and partner separation; the simplex/ortho thresholds are
        // coarser than the norm check.
        assert!(f64::NORM_TOL < f64::ORTHO_TOL);
        assert!(f64::ORTHO_TOL < f64::PARTNER_TOL);
        assert!(f64::PARTNER_TOL < f64::CLUSTER_TOL);
        assert!(f64::ZERO_COEFF < f64::NORM_TOL);
    }

    #[test]
    fn phase_of_zero_is_one() {
        let p = phase_or_one(Cpx::new(0.0_f64, 0.0));
        assert_eq!(p, Cpx::new(1.0, 0.0));
    }

    #[test]
    fn phase_of_nonzero_has_unit_modulus() {
        let p = phase_or_one(Cpx::new(3.0_f64, -4.0));
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert!((p - Cpx::new(0.6, -0.8)).norm() < 1e-15);
    }
}
