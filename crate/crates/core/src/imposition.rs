//! Distribution imposition operators.
//!
//! A complete measurement of an observable yields the probabilities
//! ϱ(a_k) = |⟨φ_k, Φ⟩|² of its eigenvectors in the unknown state Φ. The
//! imposition operator rewrites any state's expansion moduli in that
//! eigenbasis to match the measured values while keeping the state's own
//! phases:
//!
//! ```text
//! T s = Σ_k √ϱ(a_k) · u_k · φ_k,    u_k = ⟨φ_k, s⟩ / |⟨φ_k, s⟩|,
//! ```
//!
//! with u_k = 1 when the coefficient is numerically zero (modulus at or
//! below `Scalar::ZERO_COEFF`; that cutoff is a numerical choice, and the
//! result for coefficients straddling it is sensitive to it, though random
//! states hit the window with vanishing probability). T is idempotent,
//! norm-preserving, and never moves a state farther than its distance to Φ,
//! though it can move it farther *from* Φ. The complementary phase operator
//! keeps the moduli and substitutes Φ's phases; it provably never increases
//! the distance to Φ but is experimentally inaccessible, so it serves only
//! as a diagnostic.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::observables::{ObservableKind, ObservableSpec, OrthonormalBasis};
use crate::scalar::{phase_or_one, Cpx, Scalar};
use crate::state::{check_dims, dot_raw, StateVector};

/// Born probabilities of one observable: N nonnegative reals summing to 1.
#[derive(Debug, Clone)]
pub struct ProbabilityDistribution<T: Scalar> {
    probs: Vec<T>,
}

impl<T: Scalar> ProbabilityDistribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDimension { dim: probs.len() });
        }
        let mut sum = T::zero();
        for &p in &probs {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::NegativeProbability { value: p.as_f64() });
            }
            sum += p;
        }
        if (sum - T::one()).abs() > T::SIMPLEX_TOL {
            return Err(Error::SimplexViolation { sum: sum.as_f64() });
        }
        Ok(Self { probs })
    }

    /// Uniform distribution 1/N.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        let p = T::one() / T::from_usize(dim).unwrap();
        Ok(Self {
            probs: vec![p; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Largest absolute per-entry difference.
    pub fn linf_distance(&self, other: &Self) -> Result<T> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }
}

/// Everything the algorithm knows about Φ per observable: the eigenbasis and
/// the target moduli √ϱ(a_k).
#[derive(Debug, Clone)]
pub struct ImpositionData<T: Scalar> {
    basis: OrthonormalBasis<T>,
    target_moduli: Vec<T>,
}

impl<T: Scalar> ImpositionData<T> {
    /// Ingests a measured distribution, converting probabilities to moduli.
    pub fn new(
        basis: OrthonormalBasis<T>,
        distribution: &ProbabilityDistribution<T>,
    ) -> Result<Self> {
        check_dims(basis.dim(), distribution.dim())?;
        let target_moduli = distribution.probs().iter().map(|&p| p.sqrt()).collect();
        Ok(Self {
            basis,
            target_moduli,
        })
    }

    /// Builds from raw moduli; their squares must sum to 1.
    pub fn from_moduli(basis: OrthonormalBasis<T>, target_moduli: Vec<T>) -> Result<Self> {
        check_dims(basis.dim(), target_moduli.len())?;
        let mut sum = T::zero();
        for &m in &target_moduli {
            if !m.is_finite() || m < T::zero() {
                return Err(Error::NegativeProbability { value: m.as_f64() });
            }
            sum += m * m;
        }
        if (sum - T::one()).abs() > T::SIMPLEX_TOL {
            return Err(Error::SimplexViolation { sum: sum.as_f64() });
        }
        Ok(Self {
            basis,
            target_moduli,
        })
    }

    /// The distributions an unknown state Φ generates, as measured data.
    pub fn from_generator(basis: OrthonormalBasis<T>, phi: &StateVector<T>) -> Result<Self> {
        let distribution = born_distribution(&basis, phi)?;
        Self::new(basis, &distribution)
    }

    pub fn basis(&self) -> &OrthonormalBasis<T> {
        &self.basis
    }

    pub fn target_moduli(&self) -> &[T] {
        &self.target_moduli
    }

    pub fn target_probs(&self) -> Vec<T> {
        self.target_moduli.iter().map(|&m| m * m).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Born rule: probs_k = |⟨φ_k, s⟩|². Sums to 1 by completeness.
pub fn born_distribution<T: Scalar>(
    basis: &OrthonormalBasis<T>,
    s: &StateVector<T>,
) -> Result<ProbabilityDistribution<T>> {
    check_dims(basis.dim(), s.dim())?;
    let probs = basis
        .vectors()
        .iter()
        .map(|v| dot_raw(v.amplitudes(), s.amplitudes()).norm_sqr())
        .collect();
    ProbabilityDistribution::new(probs)
}

/// The imposition operator T: rewrite the moduli of `s` in the data's basis
/// to the measured targets, keeping the phases of `s`.
///
/// Coefficients with modulus at or below `Scalar::ZERO_COEFF` take phase 1.
/// The output is renormalized explicitly to suppress drift over long
/// iterations, although the targets already make it unit norm analytically.
pub fn impose_distribution<T: Scalar>(
    data: &ImpositionData<T>,
    s: &StateVector<T>,
) -> Result<StateVector<T>> {
    check_dims(data.dim(), s.dim())?;
    let dim = data.dim();
    let mut out = vec![Cpx::new(T::zero(), T::zero()); dim];
    for (v, &target) in data.basis.vectors().iter().zip(&data.target_moduli) {
        let coeff = dot_raw(v.amplitudes(), s.amplitudes());
        let weight = phase_or_one(coeff).scale(target);
        for (o, &b) in out.iter_mut().zip(v.amplitudes()) {
            *o = *o + b * weight;
        }
    }
    StateVector::normalized(out)
}

/// The phase operator P: keep the moduli of `s` in the basis, substitute the
/// phases that `phase_source` has there. Phase 1 is used where the source
/// coefficient is numerically zero. Diagnostic only: the phases of an
/// unknown state are not measurable.
pub fn impose_phases<T: Scalar>(
    basis: &OrthonormalBasis<T>,
    phase_source: &StateVector<T>,
    s: &StateVector<T>,
) -> Result<StateVector<T>> {
    check_dims(basis.dim(), s.dim())?;
    check_dims(basis.dim(), phase_source.dim())?;
    let dim = basis.dim();
    let mut out = vec![Cpx::new(T::zero(), T::zero()); dim];
    for v in basis.vectors() {
        let modulus = dot_raw(v.amplitudes(), s.amplitudes()).norm();
        let phase = phase_or_one(dot_raw(v.amplitudes(), phase_source.amplitudes()));
        let weight = phase.scale(modulus);
        for (o, &b) in out.iter_mut().zip(v.amplitudes()) {
            *o = *o + b * weight;
        }
    }
    StateVector::normalized(out)
}

/// Guaranteed bound on d(T s, Φ) for *any* input state:
/// 2√2·√(1 − max_k √ϱ(a_k)).
///
/// T s and Φ sit at equal distances from every basis vector, so both lie
/// within d(Φ, φ_k) of the nearest eigenvector; the triangle inequality
/// through the best k gives the bound. It beats the diameter √2 exactly when
/// max_k ϱ(a_k) > 9/16.
pub fn post_imposition_bound<T: Scalar>(data: &ImpositionData<T>) -> T {
    let max_modulus = data
        .target_moduli
        .iter()
        .fold(T::zero(), |acc, &m| acc.max(m));
    let two = T::one() + T::one();
    two * two.sqrt() * (T::one() - max_modulus).max(T::zero()).sqrt()
}

// ---------------------------------------------------------------------------
// Distribution file ingestion.

/// One measured observable in the JSON input format: a basis (named spec
/// string or explicit vectors as [re, im] pair lists) and its probabilities.
#[derive(Debug, Deserialize)]
struct RawDistribution {
    basis: RawBasis,
    probs: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawBasis {
    Named(String),
    Explicit(Vec<Vec<[f64; 2]>>),
}

/// Parses a JSON array of `{basis, probs}` objects into imposition data.
///
/// Validates the simplex invariant of every `probs` entry, orthonormality of
/// explicit bases, and dimensional consistency across observables.
pub fn ingest_distributions<T: Scalar>(json: &str) -> Result<Vec<ImpositionData<T>>> {
    let raw: Vec<RawDistribution> = serde_json::from_str(json)?;
    if raw.is_empty() {
        return Err(Error::EmptyDataSet);
    }
    let mut out = Vec::with_capacity(raw.len());
    let mut dim: Option<usize> = None;
    for (i, entry) in raw.into_iter().enumerate() {
        let n = entry.probs.len();
        match dim {
            None => dim = Some(n),
            Some(d) => {
                if d != n {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: n,
                    });
                }
            }
        }
        let probs = ProbabilityDistribution::new(
            entry.probs.iter().map(|&p| T::from_f64_lossy(p)).collect(),
        )
        .map_err(|e| Error::InvalidInput(format!("entry {i}: {e}")))?;
        let basis = match entry.basis {
            RawBasis::Named(text) => {
                let kind: ObservableKind = text
                    .parse()
                    .map_err(|e| Error::InvalidInput(format!("entry {i}: {e}")))?;
                ObservableSpec::new(kind, n)
                    .and_then(|spec| spec.build::<T>())
                    .map_err(|e| Error::InvalidInput(format!("entry {i}: {e}")))?
            }
            RawBasis::Explicit(rows) => {
                let vectors = rows
                    .into_iter()
                    .map(|row| {
                        StateVector::new(
                            row.into_iter()
                                .map(|[re, im]| {
                                    Cpx::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
                                })
                                .collect(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::InvalidInput(format!("entry {i}: {e}")))?;
                OrthonormalBasis::new(vectors, None)
                    .map_err(|e| Error::InvalidInput(format!("entry {i}: {e}")))?
            }
        };
        out.push(ImpositionData::new(basis, &probs)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{fourier_basis, random_basis, standard_basis};
    use crate::rng::RandomSource;
    use crate::state::{random_state, ray_distance};

    #[test]
    fn born_of_basis_state_is_peaked() {
        let basis = standard_basis::<f64>(3).unwrap();
        let s = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let d = born_distribution(&basis, &s).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn born_in_unbiased_basis_is_uniform() {
        let basis = fourier_basis::<f64>(3).unwrap();
        let s = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let d = born_distribution(&basis, &s).unwrap();
        for &p in d.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn born_satisfies_parseval_on_random_draws() {
        let mut rng = RandomSource::new(21, 0);
        for _ in 0..10_000 {
            let basis = random_basis::<f64>(3, &mut rng).unwrap();
            let s = random_state::<f64>(3, &mut rng).unwrap();
            let sum: f64 = born_distribution(&basis, &s).unwrap().probs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficient_takes_phase_one() {
        let basis = standard_basis::<f64>(2).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let data = ImpositionData::from_moduli(basis, vec![inv, inv]).unwrap();
        let s = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let out = impose_distribution(&data, &s).unwrap();
        let expected = StateVector::from_real(&[inv, inv]).unwrap();
        assert!(crate::state::induced_distance(&out, &expected).unwrap() < 1e-14);
    }

    #[test]
    fn satisfying_state_is_a_fixed_point() {
        let mut rng = RandomSource::new(4, 0);
        let basis = random_basis::<f64>(3, &mut rng).unwrap();
        let phi = random_state::<f64>(3, &mut rng).unwrap();
        let data = ImpositionData::from_generator(basis, &phi).unwrap();
        let out = impose_distribution(&data, &phi).unwrap();
        assert!(ray_distance(&out, &phi).unwrap() < 1e-13);
        assert!(crate::state::induced_distance(&out, &phi).unwrap() < 1e-12);
    }

    #[test]
    fn output_reproduces_the_target_distribution() {
        let mut rng = RandomSource::new(5, 1);
        for _ in 0..200 {
            let basis = random_basis::<f64>(4, &mut rng).unwrap();
            let phi = random_state::<f64>(4, &mut rng).unwrap();
            let s = random_state::<f64>(4, &mut rng).unwrap();
            let data = ImpositionData::from_generator(basis, &phi).unwrap();
            let out = impose_distribution(&data, &s).unwrap();
            let born = born_distribution(data.basis(), &out).unwrap();
            for (p, t) in born.probs().iter().zip(data.target_probs()) {
                assert!((*p - t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scaling_input_scales_output_phase() {
        // T(c·s) = (c/|c|)·T(s) whenever no coefficient vanishes.
        let mut rng = RandomSource::new(6, 0);
        for _ in 0..100 {
            let basis = random_basis::<f64>(3, &mut rng).unwrap();
            let phi = random_state::<f64>(3, &mut rng).unwrap();
            let s = random_state::<f64>(3, &mut rng).unwrap();
            let data = ImpositionData::from_generator(basis, &phi).unwrap();
            let theta = rng.uniform() * std::f64::consts::TAU;
            let rotated = s.with_global_phase(theta);
            let lhs = impose_distribution(&data, &rotated).unwrap();
            let rhs = impose_distribution(&data, &s)
                .unwrap()
                .with_global_phase(theta);
            assert!(crate::state::induced_distance(&lhs, &rhs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn idempotence_within_rounding() {
        let mut rng = RandomSource::new(7, 0);
        for _ in 0..200 {
            let basis = random_basis::<f64>(3, &mut rng).unwrap();
            let phi = random_state::<f64>(3, &mut rng).unwrap();
            let s = random_state::<f64>(3, &mut rng).unwrap();
            let data = ImpositionData::from_generator(basis, &phi).unwrap();
            let once = impose_distribution(&data, &s).unwrap();
            let twice = impose_distribution(&data, &once).unwrap();
            assert!(ray_distance(&twice, &once).unwrap() < 1e-7);
            assert!(crate::state::canonical_gap(&twice, &once).unwrap() < 1e-12);
        }
    }

    #[test]
    fn phase_operator_preserves_moduli_and_fixes_correct_phases() {
        let mut rng = RandomSource::new(8, 0);
        let basis = random_basis::<f64>(3, &mut rng).unwrap();
        let phi = random_state::<f64>(3, &mut rng).unwrap();
        let s = random_state::<f64>(3, &mut rng).unwrap();
        let out = impose_phases(&basis, &phi, &s).unwrap();
        for v in basis.vectors() {
            let before = v.dot(&s).unwrap().norm();
            let after = v.dot(&out).unwrap().norm();
            assert!((before - after).abs() < 1e-12);
        }
        // A state that already carries Φ's phases is untouched.
        let fixed = impose_phases(&basis, &phi, &out).unwrap();
        assert!(crate::state::induced_distance(&fixed, &out).unwrap() < 1e-12);
    }

    #[test]
    fn phase_operator_never_recedes() {
        let mut rng = RandomSource::new(9, 0);
        for _ in 0..10_000 {
            let basis = random_basis::<f64>(3, &mut rng).unwrap();
            let phi = random_state::<f64>(3, &mut rng).unwrap();
            let s = random_state::<f64>(3, &mut rng).unwrap();
            let out = impose_phases(&basis, &phi, &s).unwrap();
            let before = ray_distance(&s, &phi).unwrap();
            let after = ray_distance(&out, &phi).unwrap();
            assert!(after <= before + 1e-12);
        }
    }

    #[test]
    fn bound_for_peaked_targets_is_zero() {
        let basis = standard_basis::<f64>(3).unwrap();
        let data = ImpositionData::from_moduli(basis, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(post_imposition_bound(&data), 0.0);
    }

    #[test]
    fn bound_for_uniform_targets_matches_closed_form() {
        let basis = standard_basis::<f64>(3).unwrap();
        let dist = ProbabilityDistribution::uniform(3).unwrap();
        let data = ImpositionData::new(basis, &dist).unwrap();
        let bound = post_imposition_bound(&data);
        let expected = 2.0 * 2.0_f64.sqrt() * (1.0 - 1.0 / 3.0_f64.sqrt()).sqrt();
        assert!((bound - expected).abs() < 1e-14);
        // Sampled post-imposition distances never exceed it.
        let mut rng = RandomSource::new(10, 0);
        let phi = impose_distribution(&data, &random_state::<f64>(3, &mut rng).unwrap()).unwrap();
        for _ in 0..2_000 {
            let s = random_state::<f64>(3, &mut rng).unwrap();
            let moved = impose_distribution(&data, &s).unwrap();
            assert!(ray_distance(&moved, &phi).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn bound_beats_diameter_exactly_when_peak_exceeds_nine_sixteenths() {
        let sqrt2 = 2.0_f64.sqrt();
        for peak in [0.5f64, 0.5625, 0.57, 0.7, 0.95] {
            let rest = ((1.0 - peak) / 2.0).sqrt();
            let basis = standard_basis::<f64>(3).unwrap();
            let data = ImpositionData::from_moduli(basis, vec![peak.sqrt(), rest, rest]).unwrap();
            let bound = post_imposition_bound(&data);
            if peak > 9.0 / 16.0 {
                assert!(bound < sqrt2, "peak {peak} bound {bound}");
            } else {
                assert!(bound >= sqrt2, "peak {peak} bound {bound}");
            }
        }
    }

    #[test]
    fn ingestion_accepts_named_and_explicit_bases() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let json = format!(
            r#"[
                {{"basis": "standard", "probs": [0.25, 0.75]}},
                {{"basis": [[[{inv},0.0],[{inv},0.0]],[[{inv},0.0],[-{inv},0.0]]], "probs": [0.5, 0.5]}}
            ]"#
        );
        let data = ingest_distributions::<f64>(&json).unwrap();
        assert_eq!(data.len(), 2);
        assert!((data[0].target_moduli()[0] - 0.5).abs() < 1e-15);
        assert_eq!(data[1].dim(), 2);
    }

    #[test]
    fn non_finite_probabilities_are_rejected() {
        assert!(ProbabilityDistribution::new(vec![f64::NAN, 0.5]).is_err());
        assert!(ProbabilityDistribution::new(vec![f64::INFINITY, 0.0]).is_err());
        let basis = standard_basis::<f64>(2).unwrap();
        assert!(ImpositionData::from_moduli(basis, vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn ingestion_rejects_bad_input() {
        // Simplex violation.
        let json = r#"[{"basis": "standard", "probs": [0.5, 0.6]}]"#;
        assert!(ingest_distributions::<f64>(json).is_err());
        // Mixed dimensions.
        let json = r#"[
            {"basis": "standard", "probs": [0.5, 0.5]},
            {"basis": "standard", "probs": [0.2, 0.3, 0.5]}
        ]"#;
        assert!(matches!(
            ingest_distributions::<f64>(json),
            Err(Error::DimensionMismatch { .. })
        ));
        // Non-orthonormal explicit basis.
        let json =
            r#"[{"basis": [[[1.0,0.0],[0.0,0.0]],[[1.0,0.0],[0.0,0.0]]], "probs": [0.5, 0.5]}]"#;
        assert!(ingest_distributions::<f64>(json).is_err());
        // Empty set.
        assert!(matches!(
            ingest_distributions::<f64>("[]"),
            Err(Error::EmptyDataSet)
        ));
        // Negative probability.
        let json = r#"[{"basis": "standard", "probs": [1.5, -0.5]}]"#;
        assert!(ingest_distributions::<f64>(json).is_err());
    }
}
