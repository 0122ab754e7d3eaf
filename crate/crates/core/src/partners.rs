//! Pauli partner enumeration and the spin-1 partner symmetry.
//!
//! Distinct rays can generate identical distributions for every measured
//! observable; such rays are Pauli partners and no amount of re-measuring
//! the same observables separates them. Spanning the start-state space with
//! many random reconstructions and clustering the converged rays enumerates
//! the partners reachable by the algorithm. Detection of the measure-zero
//! partner sets relies on the gap between the convergence tolerance and the
//! much coarser cluster radius: every state within that window of a partner
//! counts as a hit.
//!
//! For the three spin components at N = 3 there is also a closed-form
//! partner map, implemented on [`JState3`] in the J_z basis with the
//! convention J_z = diag(1, 0, −1) and J_x, J_y from the standard ladder
//! elements.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imposition::{born_distribution, ImpositionData};
use crate::observables::{spin_matrices, OrthonormalBasis};
use crate::reconstruct::{reconstruct, ReconstructionConfig};
use crate::scalar::{Cpx, Scalar};
use crate::state::{canonicalize, ray_distance, CanonicalRay, StateVector};

/// Distinct converged rays sharing every measured distribution, with
/// sampling statistics.
#[derive(Debug, Clone)]
pub struct PartnerSet<T: Scalar> {
    representatives: Vec<CanonicalRay<T>>,
    hit_counts: Vec<usize>,
    pairwise_distances: Vec<Vec<T>>,
    /// Per representative, per observable: L∞ gap to the measured targets.
    residual_matrix: Vec<Vec<T>>,
    trials: usize,
    failed_trials: usize,
    /// Converged clusters whose representative missed the partner tolerance
    /// (possible only when the run tolerance is coarser than that).
    rejected_clusters: usize,
}

impl<T: Scalar> PartnerSet<T> {
    pub fn representatives(&self) -> &[CanonicalRay<T>] {
        &self.representatives
    }

    pub fn hit_counts(&self) -> &[usize] {
        &self.hit_counts
    }

    pub fn pairwise_distances(&self) -> &[Vec<T>] {
        &self.pairwise_distances
    }

    pub fn residual_matrix(&self) -> &[Vec<T>] {
        &self.residual_matrix
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn failed_trials(&self) -> usize {
        self.failed_trials
    }

    pub fn rejected_clusters(&self) -> usize {
        self.rejected_clusters
    }
}

impl<T: Scalar> Serialize for PartnerSet<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let to_f64 = |m: &Vec<Vec<T>>| -> Vec<Vec<f64>> {
            m.iter()
                .map(|row| row.iter().map(|x| x.as_f64()).collect())
                .collect()
        };
        let mut s = serializer.serialize_struct("PartnerSet", 7)?;
        s.serialize_field("representatives", &self.representatives)?;
        s.serialize_field("hit_counts", &self.hit_counts)?;
        s.serialize_field("pairwise_distances", &to_f64(&self.pairwise_distances))?;
        s.serialize_field("per_observable_residuals", &to_f64(&self.residual_matrix))?;
        s.serialize_field("trials", &self.trials)?;
        s.serialize_field("failed_trials", &self.failed_trials)?;
        s.serialize_field("rejected_clusters", &self.rejected_clusters)?;
        s.end()
    }
}

/// A cluster of rays under single-linkage at a distance threshold.
#[derive(Debug, Clone)]
pub struct RayCluster<T: Scalar> {
    /// Indices into the input list, ascending; the first is the
    /// representative's origin.
    pub members: Vec<usize>,
    pub representative: CanonicalRay<T>,
}

/// Single-linkage clustering under the ray metric: clusters are the
/// connected components of the graph joining pairs closer than `tol`. Each
/// cluster is represented by its lowest-index member, canonicalized.
/// Clusters are ordered by that index.
///
/// All states must share one dimension; mixed input panics.
pub fn cluster_rays<T: Scalar>(states: &[StateVector<T>], tol: T) -> Vec<RayCluster<T>> {
    let n = states.len();
    let mut component: Vec<usize> = (0..n).collect();
    fn root(component: &mut [usize], mut i: usize) -> usize {
        while component[i] != i {
            component[i] = component[component[i]];
            i = component[i];
        }
        i
    }
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate().skip(i + 1) {
            let d = ray_distance(a, b).expect("uniform dimensions");
            if d <= tol {
                let (ri, rj) = (root(&mut component, i), root(&mut component, j));
                if ri != rj {
                    component[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<RayCluster<T>> = Vec::new();
    let mut cluster_of_root: Vec<Option<usize>> = vec![None; n];
    for (i, state) in states.iter().enumerate() {
        let r = root(&mut component, i);
        match cluster_of_root[r] {
            Some(c) => clusters[c].members.push(i),
            None => {
                cluster_of_root[r] = Some(clusters.len());
                clusters.push(RayCluster {
                    members: vec![i],
                    representative: canonicalize(state),
                });
            }
        }
    }
    clusters
}

/// Spans the start-state space: `trials` independent reconstructions, each
/// on its own random stream (`config.rng.stream() + trial`), clustered at
/// `Scalar::CLUSTER_TOL`. Clusters whose representative fails the measured
/// distributions at `Scalar::PARTNER_TOL` are rejected, not reported.
///
/// Sampling cannot certify completeness: a partner whose basin of
/// attraction has negligible measure may never be visited.
///
/// All trials failing is not an error: the set comes back empty with the
/// failure count in the diagnostics.
pub fn enumerate_partners<T: Scalar>(
    data_set: &[ImpositionData<T>],
    trials: usize,
    config: &ReconstructionConfig<T>,
) -> Result<PartnerSet<T>> {
    if trials < 1 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if data_set.is_empty() {
        return Err(Error::EmptyDataSet);
    }

    let mut converged: Vec<StateVector<T>> = Vec::with_capacity(trials);
    let mut failed_trials = 0;
    for trial in 0..trials {
        let mut trial_config = config.clone();
        trial_config.rng = config.rng.substream(trial as u64);
        let run = reconstruct(data_set, &trial_config)?;
        if run.converged() {
            converged.push(run.final_state.into_representative());
        } else {
            failed_trials += 1;
        }
    }

    let clusters = cluster_rays(&converged, T::CLUSTER_TOL);
    let mut representatives = Vec::new();
    let mut hit_counts = Vec::new();
    let mut residual_matrix = Vec::new();
    let mut rejected_clusters = 0;
    for cluster in clusters {
        let rep = cluster.representative.representative();
        let residuals: Vec<T> = data_set
            .iter()
            .map(|data| {
                let born = born_distribution(data.basis(), rep).expect("dims checked");
                born.probs()
                    .iter()
                    .zip(data.target_probs())
                    .fold(T::zero(), |acc, (&p, t)| acc.max((p - t).abs()))
            })
            .collect();
        if residuals.iter().any(|&r| r > T::PARTNER_TOL) {
            rejected_clusters += 1;
            continue;
        }
        representatives.push(cluster.representative.clone());
        hit_counts.push(cluster.members.len());
        residual_matrix.push(residuals);
    }

    let k = representatives.len();
    let mut pairwise_distances = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = ray_distance(
                representatives[i].representative(),
                representatives[j].representative(),
            )?;
            pairwise_distances[i][j] = d;
            pairwise_distances[j][i] = d;
        }
    }

    Ok(PartnerSet {
        representatives,
        hit_counts,
        pairwise_distances,
        residual_matrix,
        trials,
        failed_trials,
        rejected_clusters,
    })
}

/// Partner count in the fully pathological setup: a state unbiased to M
/// measured observables from the complete unbiased family in prime
/// dimension N leaves N·(N+1−M) indistinguishable rays.
pub fn pathological_expected_count(dim: usize, observables: usize) -> Result<usize> {
    let prime = dim >= 2
        && (2..dim)
            .take_while(|d| d * d <= dim)
            .all(|d| !dim.is_multiple_of(d));
    if !prime {
        return Err(Error::UnsupportedDimension { dim });
    }
    if observables < 1 || observables > dim + 1 {
        return Err(Error::ObservableCountOutOfRange {
            dim,
            observables,
            max: dim + 1,
        });
    }
    Ok(dim * (dim + 1 - observables))
}

// ---------------------------------------------------------------------------
// Closed-form spin-1 partner symmetry.

/// Spin-1 state (a, b, c) in the J_z basis, global phase fixed so b is real
/// and nonnegative; when b vanishes the leftover phase freedom is spent
/// making a real and nonnegative instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JState3<T: Scalar> {
    pub a: Cpx<T>,
    pub b: T,
    pub c: Cpx<T>,
}

impl<T: Scalar> JState3<T> {
    /// Validates normalization; components are taken as already gauged
    /// (b real ≥ 0).
    pub fn new(a: Cpx<T>, b: T, c: Cpx<T>) -> Result<Self> {
        if !b.is_finite() || b < T::zero() {
            return Err(Error::InvalidInput(
                "middle component must be nonnegative".into(),
            ));
        }
        let norm_sq = a.norm_sqr() + b * b + c.norm_sqr();
        if !norm_sq.is_finite()
            || (norm_sq - T::one()).abs() > T::from_f64_lossy(1e-12).max(T::NORM_TOL)
        {
            return Err(Error::NormViolation {
                norm: norm_sq.sqrt().as_f64(),
            });
        }
        Ok(Self { a, b, c })
    }

    /// Gauges an arbitrary dim-3 state into the b-real-nonnegative form.
    pub fn from_state(s: &StateVector<T>) -> Result<Self> {
        if s.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: s.dim(),
            });
        }
        let amps = s.amplitudes();
        let (a, mid, c) = (amps[0], amps[1], amps[2]);
        let rotation = if mid.norm() > T::ZERO_COEFF {
            mid.conj() / mid.norm()
        } else if amps[0].norm() > T::ZERO_COEFF {
            amps[0].conj() / amps[0].norm()
        } else {
            Cpx::new(T::one(), T::zero())
        };
        let a = a * rotation;
        let b = (mid * rotation).re.max(T::zero());
        let c = c * rotation;
        Self::new(a, b, c)
    }

    pub fn to_state(self) -> StateVector<T> {
        StateVector::normalized(vec![self.a, Cpx::new(self.b, T::zero()), self.c])
            .expect("JState3 is normalized")
    }
}

/// The four sufficient symmetry conditions for a spin-1 partner in the
/// regime b > 0, a* + c ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JCondition {
    /// Re(a) = −Re(c)
    RealAntisymmetric,
    /// Im(a) = Im(c)
    ImaginarySymmetric,
    /// |a| = |c|
    EqualModulus,
    /// Im(a·c) = 0
    RealProduct,
}

impl JCondition {
    pub const ALL: [JCondition; 4] = [
        JCondition::RealAntisymmetric,
        JCondition::ImaginarySymmetric,
        JCondition::EqualModulus,
        JCondition::RealProduct,
    ];
}

/// Which of the four conditions hold, each at `Scalar::CONDITION_TOL`.
/// Generic complex (a, c) satisfy none; the condition surfaces have measure
/// zero.
pub fn j_partner_conditions<T: Scalar>(s: &JState3<T>) -> Vec<JCondition> {
    let tol = T::CONDITION_TOL;
    let mut satisfied = Vec::new();
    if (s.a.re + s.c.re).abs() <= tol {
        satisfied.push(JCondition::RealAntisymmetric);
    }
    if (s.a.im - s.c.im).abs() <= tol {
        satisfied.push(JCondition::ImaginarySymmetric);
    }
    if (s.a.norm() - s.c.norm()).abs() <= tol {
        satisfied.push(JCondition::EqualModulus);
    }
    if (s.a * s.c).im.abs() <= tol {
        satisfied.push(JCondition::RealProduct);
    }
    satisfied
}

/// Closed-form partner(s) of a spin-1 state for the J_x, J_y, J_z
/// distributions.
///
/// Main regime (b > 0, a* + c ≠ 0, at least one symmetry condition): the
/// single partner a′ = a*(a + c*)/(a* + c), c′ = c*(a* + c)/(a + c*), b
/// unchanged. When b = 0 (a gauged real nonnegative): the single partner
/// (a, 0, c*). When a* + c = 0: the three partners with a′ ∈ {−a, i·a*,
/// −i·a*} and c′ = −a′*. Outside every regime this is an error.
pub fn j_partner_construct<T: Scalar>(s: &JState3<T>) -> Result<Vec<JState3<T>>> {
    let tol = T::CONDITION_TOL;
    if s.b.abs() <= tol {
        // Regauge so a is real nonnegative, then conjugate c.
        let rotation = if s.a.norm() > T::ZERO_COEFF {
            s.a.conj() / s.a.norm()
        } else {
            Cpx::new(T::one(), T::zero())
        };
        let a = Cpx::new((s.a * rotation).norm(), T::zero());
        let c = s.c * rotation;
        return Ok(vec![JState3::new(a, T::zero(), c.conj())?]);
    }
    let denom_ac = s.a.conj() + s.c;
    if denom_ac.norm() <= tol {
        // With c = −a*, the three spin distributions pin |Re a′| = |Re a|
        // and |Im a′| = |Im a|, leaving exactly three partners besides the
        // state itself. (This is also the limit set of the main formula:
        // a′ = a*·ε̄/ε as a* + c = ε → 0 sweeps the a* sign family.)
        let candidates = [-s.a, s.a.conj(), -s.a.conj()];
        return candidates
            .into_iter()
            .map(|a_new| JState3::new(a_new, s.b, -a_new.conj()))
            .collect();
    }
    if j_partner_conditions(s).is_empty() {
        return Err(Error::NoPartnerRegime);
    }
    let denom_ca = s.a + s.c.conj();
    let a_new = s.a.conj() * denom_ca / denom_ac;
    let c_new = s.c.conj() * denom_ac / denom_ca;
    // The map preserves |a| and |c| exactly; renormalize to absorb rounding.
    let norm = (a_new.norm_sqr() + s.b * s.b + c_new.norm_sqr()).sqrt();
    JState3::new(a_new / norm, s.b / norm, c_new / norm).map(|p| vec![p])
}

/// Eigenbases of J_x, J_y, J_z at N = 3 in the fixed convention
/// (J_z = diag(1, 0, −1), standard ladder elements), labels ascending.
pub fn jxyz_bases<T: Scalar>() -> [OrthonormalBasis<T>; 3] {
    let [jx, jy, jz] = spin_matrices::<T>(3);
    let solve = |m| {
        let (_, basis) =
            crate::eigen::hermitian_eigenbasis(&m).expect("spin components are Hermitian");
        basis
    };
    [solve(jx), solve(jy), solve(jz)]
}

/// Measured data for J_x, J_y, J_z generated by `phi`.
pub fn jxyz_data<T: Scalar>(phi: &StateVector<T>) -> Result<Vec<ImpositionData<T>>> {
    jxyz_bases::<T>()
        .into_iter()
        .map(|basis| ImpositionData::from_generator(basis, phi))
        .collect()
}
