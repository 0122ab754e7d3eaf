//! Iterative state determination.
//!
//! Starting from a random state, one cycle applies the imposition operator of
//! every measured observable once. Convergence is monitored through the
//! residual (the worst L∞ gap between the distributions the iterate
//! generates and the measured ones), because distinct rays can share all
//! measured distributions, so distributions are the only honest stopping
//! criterion. A run that stops shrinking its residual geometrically is
//! restarted from a fresh state, by default one drawn in the orthogonal
//! complement of the start that failed, which empirically cuts the repeat
//! failure rate well below the first-failure rate.

use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imposition::{born_distribution, impose_distribution, ImpositionData};
use crate::rng::RandomSource;
use crate::scalar::Scalar;
use crate::state::{
    canonicalize, random_orthogonal_state, random_state, ray_distance, CanonicalRay, StateVector,
};

/// Restart draw after a stalled attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartPolicy {
    /// Fresh Haar-random state.
    Random,
    /// Haar-random state in the orthogonal complement of the failed start.
    Orthogonal,
}

/// Order in which the imposition operators are applied within a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingPolicy {
    /// Data-set order, every cycle.
    FixedCyclic,
    /// Freshly shuffled order each cycle.
    RandomPerCycle,
}

/// Knobs for one reconstruction run.
#[derive(Debug, Clone)]
pub struct ReconstructionConfig<T: Scalar> {
    /// Total cycle budget across all restarts.
    pub max_cycles: usize,
    /// Convergence threshold on the residual.
    pub residual_tol: T,
    /// Cycles per stall decision window.
    pub stall_window: usize,
    /// Minimum geometric shrink rate per cycle; a window that beats
    /// `stall_factor^stall_window` counts as progress.
    pub stall_factor: T,
    pub max_restarts: usize,
    pub restart_policy: RestartPolicy,
    pub ordering_policy: OrderingPolicy,
    pub rng: RandomSource,
}

impl<T: Scalar> ReconstructionConfig<T> {
    pub fn new(rng: RandomSource) -> Self {
        Self {
            max_cycles: 500,
            residual_tol: T::from_f64_lossy(1e-12),
            stall_window: 20,
            stall_factor: T::from_f64_lossy(0.99),
            max_restarts: 10,
            restart_policy: RestartPolicy::Orthogonal,
            ordering_policy: OrderingPolicy::FixedCyclic,
            rng,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.residual_tol <= T::zero() || self.max_cycles < 1 || self.stall_window < 2 {
            return Err(Error::InvalidInput(
                "config requires residual_tol > 0, max_cycles >= 1, stall_window >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// One record per executed cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<T: Scalar> {
    /// 1-based cycle index, global across restarts.
    pub cycle: usize,
    pub residual: T,
    /// Ray distance to a known reference state, when one was supplied.
    pub distance: Option<T>,
}

/// Residual (and optional reference-distance) history of a run.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace<T: Scalar> {
    entries: Vec<TraceEntry<T>>,
}

impl<T: Scalar> IterationTrace<T> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, cycle: usize, residual: T, distance: Option<T>) {
        debug_assert!(residual >= T::zero());
        self.entries.push(TraceEntry {
            cycle,
            residual,
            distance,
        });
    }

    pub fn entries(&self) -> &[TraceEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// View of the entries from `start` on, as its own trace.
    pub fn tail(&self, start: usize) -> IterationTrace<T> {
        IterationTrace {
            entries: self.entries[start.min(self.entries.len())..].to_vec(),
        }
    }
}

/// Termination state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    Failed,
}

/// Outcome of [`reconstruct`].
#[derive(Debug, Clone)]
pub struct RunResult<T: Scalar> {
    pub final_state: CanonicalRay<T>,
    pub trace: IterationTrace<T>,
    pub restarts_used: usize,
    pub status: RunStatus,
    /// Median ratio residual_n / residual_{n+1} over the final attempt.
    pub contraction_estimate: T,
}

impl<T: Scalar> RunResult<T> {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }

    pub fn final_residual(&self) -> Option<T> {
        self.trace.entries().last().map(|e| e.residual)
    }
}

/// Worst L∞ gap between the distributions `s` generates and the measured
/// targets, over all observables. Zero exactly when `s` reproduces every
/// measured distribution.
pub fn residual<T: Scalar>(s: &StateVector<T>, data_set: &[ImpositionData<T>]) -> Result<T> {
    if data_set.is_empty() {
        return Err(Error::EmptyDataSet);
    }
    let mut worst = T::zero();
    for data in data_set {
        let born = born_distribution(data.basis(), s)?;
        let gap = born
            .probs()
            .iter()
            .zip(data.target_probs())
            .fold(T::zero(), |acc, (&p, t)| acc.max((p - t).abs()));
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// One full cycle: applies each imposition once, in iteration order (the
/// first item is applied first).
pub fn cycle<'a, T, I>(s: &StateVector<T>, data_set: I) -> Result<StateVector<T>>
where
    T: Scalar,
    I: IntoIterator<Item = &'a ImpositionData<T>>,
{
    let mut state = None;
    for data in data_set {
        let current = state.as_ref().unwrap_or(s);
        state = Some(impose_distribution(data, current)?);
    }
    state.ok_or(Error::EmptyDataSet)
}

/// Stall test: true when the residual over the last `stall_window` cycles
/// shrank by less than `stall_factor^stall_window` (strictly). Returns false
/// while the trace is too short to decide.
pub fn detect_stall<T: Scalar>(
    trace: &IterationTrace<T>,
    config: &ReconstructionConfig<T>,
) -> bool {
    stall_in(trace.entries(), config)
}

fn stall_in<T: Scalar>(entries: &[TraceEntry<T>], config: &ReconstructionConfig<T>) -> bool {
    let n = entries.len();
    let w = config.stall_window;
    if n < w + 1 {
        return false;
    }
    let last = entries[n - 1].residual;
    let earlier = entries[n - 1 - w].residual;
    if earlier <= T::zero() {
        return false;
    }
    let threshold = config.stall_factor.powi(w as i32);
    last / earlier > threshold
}

/// Runs the full iteration from a random start, with stall detection and
/// restarts. Identical config and data yield identical results.
pub fn reconstruct<T: Scalar>(
    data_set: &[ImpositionData<T>],
    config: &ReconstructionConfig<T>,
) -> Result<RunResult<T>> {
    reconstruct_traced(data_set, config, None)
}

/// [`reconstruct`], additionally recording the ray distance to a known
/// reference state at every cycle (for convergence-rate studies where the
/// generator is known).
pub fn reconstruct_traced<T: Scalar>(
    data_set: &[ImpositionData<T>],
    config: &ReconstructionConfig<T>,
    reference: Option<&StateVector<T>>,
) -> Result<RunResult<T>> {
    if data_set.is_empty() {
        return Err(Error::EmptyDataSet);
    }
    config.validate()?;
    let dim = data_set[0].dim();
    for data in data_set {
        if data.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.dim(),
            });
        }
    }
    if let Some(r) = reference {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
    }

    let mut rng = config.rng.clone();
    let mut order: Vec<usize> = (0..data_set.len()).collect();
    let mut trace = IterationTrace::new();
    let mut segment_start = 0;
    let mut restarts_used = 0;

    let mut start = random_state::<T>(dim, &mut rng)?;
    let mut state = start.clone();

    let status = 'run: loop {
        // Iterate the current attempt until convergence, stall, or budget.
        loop {
            if trace.len() >= config.max_cycles {
                break 'run RunStatus::Failed;
            }
            if config.ordering_policy == OrderingPolicy::RandomPerCycle {
                rng.shuffle(&mut order);
            }
            state = cycle(&state, order.iter().map(|&i| &data_set[i]))?;
            let r = residual(&state, data_set)?;
            let distance = match reference {
                Some(phi) => Some(ray_distance(&state, phi)?),
                None => None,
            };
            trace.push(trace.len() + 1, r, distance);
            if r <= config.residual_tol {
                break 'run RunStatus::Converged;
            }
            if stall_in(&trace.entries()[segment_start..], config) {
                break;
            }
        }
        if restarts_used >= config.max_restarts || trace.len() >= config.max_cycles {
            break RunStatus::Failed;
        }
        restarts_used += 1;
        state = match config.restart_policy {
            RestartPolicy::Random => random_state::<T>(dim, &mut rng)?,
            RestartPolicy::Orthogonal => random_orthogonal_state(&start, &mut rng)?,
        };
        start = state.clone();
        segment_start = trace.len();
    };

    let contraction_estimate = median_ratio(&trace.entries()[segment_start..]);
    Ok(RunResult {
        final_state: canonicalize(&state),
        trace,
        restarts_used,
        status,
        contraction_estimate,
    })
}

/// Median of residual_n / residual_{n+1} over consecutive pairs; 1 when no
/// pair is usable.
fn median_ratio<T: Scalar>(entries: &[TraceEntry<T>]) -> T {
    let mut ratios: Vec<T> = entries
        .windows(2)
        .filter(|w| w[1].residual > T::zero())
        .map(|w| w[0].residual / w[1].residual)
        .collect();
    if ratios.is_empty() {
        return T::one();
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ratios[ratios.len() / 2]
}

// External form: final state, status, restart count, contraction estimate,
// and the trace as (cycle, residual) pairs.
impl<T: Scalar> Serialize for RunResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct TracePairs<'a, T: Scalar>(&'a [TraceEntry<T>]);
        impl<T: Scalar> Serialize for TracePairs<'_, T> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for e in self.0 {
                    seq.serialize_element(&(e.cycle, e.residual.as_f64()))?;
                }
                seq.end()
            }
        }

        let mut s = serializer.serialize_struct("RunResult", 6)?;
        s.serialize_field("final_state", &self.final_state)?;
        s.serialize_field(
            "status",
            match self.status {
                RunStatus::Converged => "converged",
                RunStatus::Failed => "failed",
            },
        )?;
        s.serialize_field("restarts_used", &self.restarts_used)?;
        s.serialize_field("final_residual", &self.final_residual().map(|r| r.as_f64()))?;
        s.serialize_field("contraction_estimate", &self.contraction_estimate.as_f64())?;
        s.serialize_field("trace", &TracePairs(self.trace.entries()))?;
        s.end()
    }
}
