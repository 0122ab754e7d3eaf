//! State vectors, the ray metric, and canonical phase fixing.
//!
//! A pure state is a *ray*: the set of unit vectors differing by a global
//! phase. [`StateVector`] is the working representative; [`ray_distance`]
//! is the genuine metric between rays,
//!
//! ```text
//! d(a, b) = √2 · √(1 − |⟨a, b⟩|)   ∈ [0, √2],
//! ```
//!
//! the minimum of ‖e^{iα}a − e^{iβ}b‖ over both phases. It never exceeds the
//! plain induced distance ‖a − b‖ and vanishes exactly on equal rays.
//! [`canonicalize`] picks a unique representative per ray so states can be
//! compared, clustered and serialized deterministically.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::scalar::{Cpx, Scalar};

/// Unit-norm complex amplitude vector of dimension ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    amplitudes: Vec<Cpx<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Validates dimension and the unit-norm invariant.
    pub fn new(amplitudes: Vec<Cpx<T>>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: amplitudes.len(),
            });
        }
        let norm = norm(&amplitudes);
        if !norm.is_finite() || (norm - T::one()).abs() > T::NORM_TOL {
            return Err(Error::NormViolation {
                norm: norm.as_f64(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Cpx<T>>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: amplitudes.len(),
            });
        }
        let norm = norm(&amplitudes);
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        Ok(Self { amplitudes })
    }

    /// Convenience constructor from real amplitudes.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&x| Cpx::new(x, T::zero()))
                .collect::<Vec<_>>(),
        )
    }

    /// Standard basis vector `e_k`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amplitudes = vec![Cpx::new(T::zero(), T::zero()); dim];
        amplitudes[k] = Cpx::new(T::one(), T::zero());
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Cpx<T>] {
        &self.amplitudes
    }

    /// Inner product ⟨self, other⟩, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> Result<Cpx<T>> {
        check_dims(self.dim(), other.dim())?;
        Ok(dot_raw(&self.amplitudes, &other.amplitudes))
    }

    /// Multiplies every amplitude by the global phase e^{iθ}.
    pub fn with_global_phase(&self, theta: T) -> Self {
        let phase = Cpx::from_polar(T::one(), theta);
        Self {
            amplitudes: self.amplitudes.iter().map(|&c| c * phase).collect(),
        }
    }

    pub(crate) fn from_unit_unchecked(amplitudes: Vec<Cpx<T>>) -> Self {
        debug_assert!((norm(&amplitudes) - T::one()).abs() <= T::NORM_TOL);
        Self { amplitudes }
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn dot_raw<T: Scalar>(a: &[Cpx<T>], b: &[Cpx<T>]) -> Cpx<T> {
    let mut acc = Cpx::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.conj() * *y;
    }
    acc
}

pub(crate) fn norm<T: Scalar>(a: &[Cpx<T>]) -> T {
    a.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt()
}

/// Distance between the rays of `a` and `b`: √2·√(1 − |⟨a,b⟩|).
///
/// Invariant under a global phase of either argument; bounded by √2.
pub fn ray_distance<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    let overlap = a.dot(b)?.norm();
    let two = T::one() + T::one();
    Ok(two.sqrt() * (T::one() - overlap).max(T::zero()).sqrt())
}

/// Induced distance between the canonical representatives of both rays.
///
/// Near zero this is the sharper equality test: [`ray_distance`] takes a
/// square root of the overlap defect, which amplifies rounding into a floor
/// of about √(2ε) ≈ 2e-8 in f64 even for bit-identical rays, while the
/// representative gap stays at rounding level.
pub fn canonical_gap<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    check_dims(a.dim(), b.dim())?;
    induced_distance(
        canonicalize(a).representative(),
        canonicalize(b).representative(),
    )
}

/// Norm-induced distance ‖a − b‖ between representatives.
///
/// Always at least [`ray_distance`]; does *not* vanish on a shared ray.
pub fn induced_distance<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    check_dims(a.dim(), b.dim())?;
    let sq = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y).norm_sqr());
    Ok(sq.sqrt())
}

/// Unique ray representative: global phase fixed so the first coefficient
/// with modulus above `Scalar::PHASE_PIVOT` is real and nonnegative.
#[derive(Debug, Clone)]
pub struct CanonicalRay<T: Scalar> {
    representative: StateVector<T>,
}

impl<T: Scalar> CanonicalRay<T> {
    pub fn representative(&self) -> &StateVector<T> {
        &self.representative
    }

    pub fn into_representative(self) -> StateVector<T> {
        self.representative
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }
}

/// Canonical phase fixing.
///
/// A unit vector always has a coefficient of modulus ≥ 1/√N, so the pivot
/// search cannot fail for any dimension this crate supports; a zero vector is
/// rejected earlier, at [`StateVector`] construction.
pub fn canonicalize<T: Scalar>(s: &StateVector<T>) -> CanonicalRay<T> {
    let pivot = s
        .amplitudes
        .iter()
        .find(|c| c.norm() > T::PHASE_PIVOT)
        .expect("unit vector has a coefficient above the phase pivot");
    let rotation = pivot.conj() / pivot.norm();
    let amplitudes = s.amplitudes.iter().map(|&c| c * rotation).collect();
    CanonicalRay {
        representative: StateVector::from_unit_unchecked(amplitudes),
    }
}

/// Haar-random unit vector: every real and imaginary part standard normal,
/// then normalized. The resulting distribution is invariant under every
/// unitary, which is the uniform choice of a state.
pub fn random_state<T: Scalar>(dim: usize, rng: &mut RandomSource) -> Result<StateVector<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let amplitudes: Vec<Cpx<T>> = (0..dim)
        .map(|_| Cpx::new(rng.normal_scalar(), rng.normal_scalar()))
        .collect();
    StateVector::normalized(amplitudes)
}

/// Haar-random unit vector in the orthogonal complement of `axis`.
pub fn random_orthogonal_state<T: Scalar>(
    axis: &StateVector<T>,
    rng: &mut RandomSource,
) -> Result<StateVector<T>> {
    let dim = axis.dim();
    // A Gaussian draw projected onto axis⊥ is Haar on that subspace.
    for _ in 0..10 {
        let raw = random_state::<T>(dim, rng)?;
        let overlap = axis.dot(&raw)?;
        let projected: Vec<Cpx<T>> = raw
            .amplitudes
            .iter()
            .zip(&axis.amplitudes)
            .map(|(&r, &a)| r - a * overlap)
            .collect();
        if norm(&projected) > T::from_f64_lossy(1e-6) {
            return StateVector::normalized(projected);
        }
    }
    Err(Error::DependentDraws)
}

// External form: a JSON array of [re, im] pairs. Deserialization re-validates
// the unit-norm invariant.
impl<T: Scalar> Serialize for StateVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.amplitudes.len()))?;
        for c in &self.amplitudes {
            seq.serialize_element(&[c.re.as_f64(), c.im.as_f64()])?;
        }
        seq.end()
    }
}

impl<'de, T: Scalar> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct AmpVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Scalar> Visitor<'de> for AmpVisitor<T> {
            type Value = StateVector<T>;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array of [re, im] pairs forming a unit vector")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut amplitudes = Vec::new();
                while let Some([re, im]) = seq.next_element::<[f64; 2]>()? {
                    amplitudes.push(Cpx::new(T::from_f64_lossy(re), T::from_f64_lossy(im)));
                }
                StateVector::new(amplitudes).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_seq(AmpVisitor(std::marker::PhantomData))
    }
}

impl<T: Scalar> Serialize for CanonicalRay<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.representative.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cpx<f64> {
        Cpx::new(re, im)
    }

    #[test]
    fn orthogonal_states_sit_at_sqrt_two() {
        let a = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let b = StateVector::from_real(&[0.0, 1.0]).unwrap();
        let d = ray_distance(&a, &b).unwrap();
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn same_ray_has_zero_distance_for_any_phase() {
        let a = StateVector::from_real(&[1.0, 0.0]).unwrap();
        for k in 0..16 {
            let alpha = k as f64 * 0.41;
            let b = a.with_global_phase(alpha);
            assert!(ray_distance(&a, &b).unwrap() < 1e-7);
        }
    }

    /// Independent oracle: brute-force minimization of ‖e^{iα}a − e^{iβ}b‖
    /// over a 2-D grid of phases, refined around the coarse minimum.
    fn brute_force_ray_distance(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
        let shifted_norm = |alpha: f64, beta: f64| {
            let pa = Cpx::from_polar(1.0, alpha);
            let pb = Cpx::from_polar(1.0, beta);
            a.amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(&x, &y)| (x * pa - y * pb).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let tau = std::f64::consts::TAU;
        let coarse = 401;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..coarse {
            for j in 0..coarse {
                let alpha = tau * i as f64 / coarse as f64;
                let beta = tau * j as f64 / coarse as f64;
                let v = shifted_norm(alpha, beta);
                if v < best.0 {
                    best = (v, alpha, beta);
                }
            }
        }
        let (mut val, a0, b0) = best;
        let fine = 801;
        let half = tau / coarse as f64;
        for i in 0..fine {
            for j in 0..fine {
                let alpha = a0 - half + 2.0 * half * i as f64 / (fine - 1) as f64;
                let beta = b0 - half + 2.0 * half * j as f64 / (fine - 1) as f64;
                val = val.min(shifted_norm(alpha, beta));
            }
        }
        val
    }

    #[test]
    fn matches_brute_force_phase_minimization() {
        let a = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let b = StateVector::from_real(&[inv, inv]).unwrap();
        let expected = (2.0 - 2.0_f64.sqrt()).sqrt();
        let d = ray_distance(&a, &b).unwrap();
        assert!(
            (d - expected).abs() < 1e-12,
            "closed form {d} vs {expected}"
        );
        let oracle = brute_force_ray_distance(&a, &b);
        assert!((d - oracle).abs() < 1e-6, "oracle {oracle} vs {d}");
    }

    #[test]
    fn brute_force_agrees_on_random_complex_pairs() {
        let mut rng = RandomSource::new(11, 0);
        for _ in 0..3 {
            let a = random_state::<f64>(3, &mut rng).unwrap();
            let b = random_state::<f64>(3, &mut rng).unwrap();
            let d = ray_distance(&a, &b).unwrap();
            let oracle = brute_force_ray_distance(&a, &b);
            assert!((d - oracle).abs() < 1e-6, "oracle {oracle} vs {d}");
        }
    }

    #[test]
    fn antipodal_representatives_have_induced_two_ray_zero() {
        let a = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let b = StateVector::from_real(&[-1.0, 0.0]).unwrap();
        assert!((induced_distance(&a, &b).unwrap() - 2.0f64).abs() < 1e-15);
        assert!(ray_distance(&a, &b).unwrap() < 1e-7);
    }

    #[test]
    fn induced_distance_of_equal_states_is_zero() {
        let a = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert_eq!(induced_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ray_distance_never_exceeds_induced() {
        let mut rng = RandomSource::new(5, 0);
        for _ in 0..10_000 {
            let a = random_state::<f64>(4, &mut rng).unwrap();
            let b = random_state::<f64>(4, &mut rng).unwrap();
            let d = ray_distance(&a, &b).unwrap();
            let delta = induced_distance(&a, &b).unwrap();
            assert!(d <= delta + 1e-12, "d {d} > delta {delta}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let b = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            ray_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            induced_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonicalize_rotates_leading_phase_away() {
        let s = StateVector::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let r = canonicalize(&s);
        assert!(
            induced_distance(
                r.representative(),
                &StateVector::from_real(&[1.0, 0.0]).unwrap()
            )
            .unwrap()
                < 1e-12
        );

        let s = StateVector::new(vec![c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let r = canonicalize(&s);
        assert!(
            induced_distance(
                r.representative(),
                &StateVector::from_real(&[0.0, 1.0]).unwrap()
            )
            .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn canonicalize_collapses_the_whole_ray() {
        let mut rng = RandomSource::new(17, 3);
        for _ in 0..200 {
            let s = random_state::<f64>(5, &mut rng).unwrap();
            let theta = rng.uniform() * std::f64::consts::TAU;
            let rotated = s.with_global_phase(theta);
            let r1 = canonicalize(&s);
            let r2 = canonicalize(&rotated);
            let gap = induced_distance(r1.representative(), r2.representative()).unwrap();
            assert!(gap < 1e-10, "representatives differ by {gap}");
            // The metric itself bottoms out at ~√(2ε) for equal rays.
            assert!(ray_distance(&s, r1.representative()).unwrap() < 1e-7);
            assert!(canonical_gap(&s, r1.representative()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn random_state_is_unit_norm_and_deterministic() {
        let mut rng = RandomSource::new(100, 0);
        let s = random_state::<f64>(6, &mut rng).unwrap();
        let n = norm(s.amplitudes());
        assert!((n - 1.0).abs() < 1e-12);

        let mut rng2 = RandomSource::new(100, 0);
        let s2 = random_state::<f64>(6, &mut rng2).unwrap();
        assert_eq!(s.amplitudes(), s2.amplitudes());
    }

    #[test]
    fn random_state_rejects_dim_below_two() {
        let mut rng = RandomSource::new(1, 0);
        assert!(matches!(
            random_state::<f64>(1, &mut rng),
            Err(Error::InvalidDimension { dim: 1 })
        ));
    }

    #[test]
    fn component_mass_is_uniform_on_average() {
        let mut rng = RandomSource::new(2024, 1);
        let n = 100_000;
        let mut mean = [0.0; 3];
        for _ in 0..n {
            let s = random_state::<f64>(3, &mut rng).unwrap();
            for (m, c) in mean.iter_mut().zip(s.amplitudes()) {
                *m += c.norm_sqr();
            }
        }
        for m in mean {
            assert!((m / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn orthogonal_draw_is_orthogonal_and_unit() {
        let mut rng = RandomSource::new(55, 0);
        let axis = random_state::<f64>(4, &mut rng).unwrap();
        for _ in 0..50 {
            let v = random_orthogonal_state(&axis, &mut rng).unwrap();
            assert!(axis.dot(&v).unwrap().norm() < 1e-12);
            assert!((norm(v.amplitudes()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn serde_roundtrip_revalidates_norm() {
        let mut rng = RandomSource::new(8, 0);
        let s = random_state::<f64>(3, &mut rng).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: StateVector<f64> = serde_json::from_str(&json).unwrap();
        assert!(induced_distance(&s, &back).unwrap() < 1e-12);

        let bad = "[[0.5,0.0],[0.0,0.0]]";
        assert!(serde_json::from_str::<StateVector<f64>>(bad).is_err());
    }

    #[test]
    fn non_finite_amplitudes_are_rejected() {
        assert!(StateVector::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![c(f64::INFINITY, 0.0), c(0.0, 0.0)]).is_err());
        assert!(StateVector::normalized(vec![c(f64::NAN, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(matches!(
            StateVector::normalized(vec![c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::ZeroVector)
        ));
    }
}
