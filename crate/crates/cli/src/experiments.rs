//! The experiments the binary exposes.
//!
//! Stream discipline: stream 0 of the run seed draws the generator state Φ,
//! stream 1 drives the sample states or the first reconstruction trial.
//! `scatter_t` and `scatter_p` therefore see the *same* generator and the
//! same sample states for the same seed, which is what makes their plots
//! comparable point by point.

use serde::Serialize;
use statedet::{
    born_distribution, enumerate_partners, impose_distribution, impose_phases, j_partner_construct,
    mub_family,
    partners::{jxyz_bases, jxyz_data, JState3},
    pathological_expected_count, random_state, ray_distance, reconstruct_traced, Distribution64,
    Error, ImpositionData, ImpositionData64, JCondition, ObservableKind, ObservableSpec,
    PartnerSet64, RandomSource, StateVector64,
};

use crate::config::EffectiveConfig;

pub const GENERATOR_STREAM: u64 = 0;
pub const SAMPLE_STREAM: u64 = 1;

/// One scatter experiment: distances to Φ before and after one operator
/// application, for a batch of Haar-random states.
#[derive(Debug, Serialize)]
pub struct ScatterReport {
    pub config: EffectiveConfig,
    /// Upper bound on the after-distance guaranteed by the target
    /// distribution alone.
    pub bound: f64,
    /// (d_before, d_after) per sampled state.
    pub rows: Vec<(f64, f64)>,
}

fn build_observables(cfg: &EffectiveConfig) -> Result<Vec<statedet::Basis64>, Error> {
    cfg.observables
        .iter()
        .map(|text| {
            let kind: ObservableKind = text.parse()?;
            ObservableSpec::new(kind, cfg.dim)?.build::<f64>()
        })
        .collect()
}

fn single_observable(cfg: &EffectiveConfig) -> Result<statedet::Basis64, Error> {
    let mut bases = build_observables(cfg)?;
    if bases.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "this experiment takes exactly one observable, got {}",
            bases.len()
        )));
    }
    Ok(bases.pop().unwrap())
}

/// Distance scatter for the distribution-imposition operator: many random
/// states d(Ψ,Φ) vs d(TΨ,Φ). Points land on both sides of the diagonal, but
/// never above the analytic bound.
pub fn scatter_t(cfg: &EffectiveConfig) -> Result<ScatterReport, Error> {
    let basis = single_observable(cfg)?;
    let mut phi_rng = RandomSource::new(cfg.seed, GENERATOR_STREAM);
    let phi = random_state::<f64>(cfg.dim, &mut phi_rng)?;
    let data = ImpositionData::from_generator(basis, &phi)?;
    let bound = statedet::post_imposition_bound(&data);

    let mut rng = RandomSource::new(cfg.seed, SAMPLE_STREAM);
    let mut rows = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let psi = random_state::<f64>(cfg.dim, &mut rng)?;
        let moved = impose_distribution(&data, &psi)?;
        rows.push((ray_distance(&psi, &phi)?, ray_distance(&moved, &phi)?));
    }
    Ok(ScatterReport {
        config: cfg.clone(),
        bound,
        rows,
    })
}

/// Distance scatter for the phase-imposition operator on the same generator
/// and the same sample states as [`scatter_t`]: every point is on or below
/// the diagonal.
pub fn scatter_p(cfg: &EffectiveConfig) -> Result<ScatterReport, Error> {
    let basis = single_observable(cfg)?;
    let mut phi_rng = RandomSource::new(cfg.seed, GENERATOR_STREAM);
    let phi = random_state::<f64>(cfg.dim, &mut phi_rng)?;
    let data = ImpositionData::from_generator(basis.clone(), &phi)?;
    let bound = statedet::post_imposition_bound(&data);

    let mut rng = RandomSource::new(cfg.seed, SAMPLE_STREAM);
    let mut rows = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let psi = random_state::<f64>(cfg.dim, &mut rng)?;
        let moved = impose_phases(&basis, &phi, &psi)?;
        rows.push((ray_distance(&psi, &phi)?, ray_distance(&moved, &phi)?));
    }
    Ok(ScatterReport {
        config: cfg.clone(),
        bound,
        rows,
    })
}

/// Convergence trace in known-generator mode: Φ is drawn from the seed, the
/// measured distributions are generated from it, and the trace records the
/// true distance to Φ per cycle.
#[derive(Debug, Serialize)]
pub struct ConvergeReport {
    pub config: EffectiveConfig,
    pub converged: bool,
    pub restarts_used: usize,
    pub median_contraction: f64,
    /// (cycle, distance-to-generator, residual) per executed cycle.
    pub rows: Vec<(usize, f64, f64)>,
}

pub fn converge(cfg: &EffectiveConfig) -> Result<ConvergeReport, Error> {
    let bases = build_observables(cfg)?;
    if bases.is_empty() {
        return Err(Error::EmptyDataSet);
    }
    let mut phi_rng = RandomSource::new(cfg.seed, GENERATOR_STREAM);
    let phi = random_state::<f64>(cfg.dim, &mut phi_rng)?;
    let data: Vec<ImpositionData64> = bases
        .into_iter()
        .map(|b| ImpositionData::from_generator(b, &phi))
        .collect::<Result<_, _>>()?;
    let run = reconstruct_traced(&data, &cfg.reconstruction(SAMPLE_STREAM), Some(&phi))?;
    let rows: Vec<(usize, f64, f64)> = run
        .trace
        .entries()
        .iter()
        .map(|e| (e.cycle, e.distance.unwrap_or(f64::NAN), e.residual))
        .collect();
    Ok(ConvergeReport {
        config: cfg.clone(),
        converged: run.converged(),
        restarts_used: run.restarts_used,
        median_contraction: median_distance_contraction(&rows),
        rows,
    })
}

/// Median per-cycle division factor of the distance column, over consecutive
/// pairs above the numerical floor.
pub fn median_distance_contraction(rows: &[(usize, f64, f64)]) -> f64 {
    let mut ratios: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[1].1 > 1e-13 && w[0].1.is_finite())
        .map(|w| w[0].1 / w[1].1)
        .collect();
    if ratios.is_empty() {
        return 1.0;
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ratios[ratios.len() / 2]
}

/// Partner enumeration over many random starts.
#[derive(Debug, Serialize)]
pub struct PartnersReport {
    pub config: EffectiveConfig,
    /// N·(N+1−M), present when every observable is an unbiased-family member
    /// with uniform targets.
    pub expected_pathological: Option<usize>,
    pub set: PartnerSet64,
}

/// Enumerates partners for data built from named observable specs in
/// known-generator mode (Φ from stream 0).
pub fn partners_from_specs(cfg: &EffectiveConfig) -> Result<PartnersReport, Error> {
    let bases = build_observables(cfg)?;
    if bases.is_empty() {
        return Err(Error::EmptyDataSet);
    }
    let mut phi_rng = RandomSource::new(cfg.seed, GENERATOR_STREAM);
    let phi = random_state::<f64>(cfg.dim, &mut phi_rng)?;
    let data: Vec<ImpositionData64> = bases
        .into_iter()
        .map(|b| ImpositionData::from_generator(b, &phi))
        .collect::<Result<_, _>>()?;
    partners_from_data(cfg, &data)
}

/// Enumerates partners for already-ingested measurement data.
pub fn partners_from_data(
    cfg: &EffectiveConfig,
    data: &[ImpositionData64],
) -> Result<PartnersReport, Error> {
    let set = enumerate_partners(data, cfg.trials, &cfg.reconstruction(SAMPLE_STREAM))?;
    Ok(PartnersReport {
        config: cfg.clone(),
        expected_pathological: pathological_expectation(data),
        set,
    })
}

/// Recognizes the pathological setup from the measured data itself: two to
/// N observables, every pair of bases mutually unbiased, and every target
/// distribution uniform. (At M = N+1 the count formula is degenerate, so no
/// expectation is attached.)
fn pathological_expectation(data: &[ImpositionData64]) -> Option<usize> {
    if data.len() < 2 || data.len() > data[0].dim() {
        return None;
    }
    let dim = data.first()?.dim();
    let uniform = 1.0 / dim as f64;
    let targets_uniform = data
        .iter()
        .all(|d| d.target_probs().iter().all(|&p| (p - uniform).abs() < 1e-9));
    if !targets_uniform {
        return None;
    }
    for (i, a) in data.iter().enumerate() {
        for b in data.iter().skip(i + 1) {
            if !statedet::unbiasedness_check(a.basis(), b.basis()).ok()? {
                return None;
            }
        }
    }
    pathological_expected_count(dim, data.len()).ok()
}

/// The fully pathological setup: the first M unbiased-family bases with
/// uniform targets, enumerated and compared against N·(N+1−M).
///
/// At M = N+1 the formula evaluates to 0 while measuring the whole family
/// leaves a unique state, so the comparison is reported only for M ≤ N and
/// the raw cluster count stands on its own.
#[derive(Debug, Serialize)]
pub struct PathologicalReport {
    pub config: EffectiveConfig,
    pub observables_used: usize,
    pub expected: Option<usize>,
    pub found: usize,
    pub matches: Option<bool>,
    pub set: PartnerSet64,
}

pub fn pathological(
    cfg: &EffectiveConfig,
    observables: usize,
) -> Result<PathologicalReport, Error> {
    let count = pathological_expected_count(cfg.dim, observables)?;
    let expected = (observables <= cfg.dim).then_some(count);
    let family = mub_family::<f64>(cfg.dim)?;
    let uniform = Distribution64::uniform(cfg.dim)?;
    let data: Vec<ImpositionData64> = family
        .into_iter()
        .take(observables)
        .map(|b| ImpositionData::new(b, &uniform))
        .collect::<Result<_, _>>()?;
    let set = enumerate_partners(&data, cfg.trials, &cfg.reconstruction(SAMPLE_STREAM))?;
    Ok(PathologicalReport {
        config: cfg.clone(),
        observables_used: observables,
        expected,
        found: set.len(),
        matches: expected.map(|e| set.len() == e),
        set,
    })
}

/// One family of the spin-1 partner symmetry check.
#[derive(Debug, Serialize)]
pub struct FamilyResult {
    pub family: String,
    pub samples: usize,
    /// Samples whose constructed partners all reproduce the three spin
    /// distributions within 1e-10.
    pub verified: usize,
    /// Samples additionally cross-checked by enumeration.
    pub enumeration_checked: usize,
    /// Cross-checks where the enumeration rediscovered the constructed
    /// partner.
    pub enumeration_confirmed: usize,
}

#[derive(Debug, Serialize)]
pub struct JSymmetryReport {
    pub config: EffectiveConfig,
    pub families: Vec<FamilyResult>,
    pub all_verified: bool,
}

/// Surfaces 100%-covered by construction: the four symmetry conditions plus
/// the two special regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryFamily {
    Condition(JCondition),
    VanishingMiddle,
    AntisymmetricSum,
}

impl SymmetryFamily {
    pub const ALL: [SymmetryFamily; 6] = [
        SymmetryFamily::Condition(JCondition::RealAntisymmetric),
        SymmetryFamily::Condition(JCondition::ImaginarySymmetric),
        SymmetryFamily::Condition(JCondition::EqualModulus),
        SymmetryFamily::Condition(JCondition::RealProduct),
        SymmetryFamily::VanishingMiddle,
        SymmetryFamily::AntisymmetricSum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymmetryFamily::Condition(JCondition::RealAntisymmetric) => "real_antisymmetric",
            SymmetryFamily::Condition(JCondition::ImaginarySymmetric) => "imaginary_symmetric",
            SymmetryFamily::Condition(JCondition::EqualModulus) => "equal_modulus",
            SymmetryFamily::Condition(JCondition::RealProduct) => "real_product",
            SymmetryFamily::VanishingMiddle => "vanishing_middle",
            SymmetryFamily::AntisymmetricSum => "antisymmetric_sum",
        }
    }
}

type Cpx = statedet::scalar::Cpx<f64>;

/// Seeded draw of a state on the given symmetry surface.
pub fn sample_on_surface(family: SymmetryFamily, rng: &mut RandomSource) -> JState3<f64> {
    loop {
        let a = Cpx::new(rng.normal(), rng.normal());
        let c = Cpx::new(rng.normal(), rng.normal());
        let b = rng.normal().abs();
        let (a, b, c) = match family {
            SymmetryFamily::Condition(JCondition::RealAntisymmetric) => {
                (a, b, Cpx::new(-a.re, c.im))
            }
            SymmetryFamily::Condition(JCondition::ImaginarySymmetric) => {
                (a, b, Cpx::new(c.re, a.im))
            }
            SymmetryFamily::Condition(JCondition::EqualModulus) => {
                if c.norm() < 1e-6 {
                    continue;
                }
                (a, b, c * (a.norm() / c.norm()))
            }
            SymmetryFamily::Condition(JCondition::RealProduct) => {
                // arg(c) = −arg(a) up to a sign makes a·c real.
                if a.norm() < 1e-6 {
                    continue;
                }
                let sign = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
                (a, b, (a.conj() / a.norm()) * c.norm() * sign)
            }
            SymmetryFamily::VanishingMiddle => {
                if a.norm() < 1e-6 {
                    continue;
                }
                // Gauge freedom at b = 0 is spent making a real positive.
                let rot = a.conj() / a.norm();
                (a * rot, 0.0, c * rot)
            }
            SymmetryFamily::AntisymmetricSum => (a, b, -a.conj()),
        };
        // Stay inside the main regime unless the family is the special case.
        if family != SymmetryFamily::AntisymmetricSum
            && family != SymmetryFamily::VanishingMiddle
            && ((a.conj() + c).norm() < 1e-6 || b < 1e-6)
        {
            continue;
        }
        if family == SymmetryFamily::AntisymmetricSum && b < 1e-6 {
            continue;
        }
        let norm = (a.norm_sqr() + b * b + c.norm_sqr()).sqrt();
        if norm < 1e-6 {
            continue;
        }
        match JState3::new(a / norm, b / norm, c / norm) {
            Ok(state) => return state,
            Err(_) => continue,
        }
    }
}

/// Verifies the closed-form partner map family by family: every constructed
/// partner must reproduce the three spin distributions within 1e-10, and a
/// leading subset is cross-checked against enumeration.
pub fn j_symmetry(
    cfg: &EffectiveConfig,
    enumeration_checks: usize,
) -> Result<JSymmetryReport, Error> {
    let bases = jxyz_bases::<f64>();
    let mut families = Vec::new();
    for (slot, family) in SymmetryFamily::ALL.into_iter().enumerate() {
        let mut rng = RandomSource::new(cfg.seed, SAMPLE_STREAM + slot as u64);
        let mut verified = 0;
        let mut enumeration_checked = 0;
        let mut enumeration_confirmed = 0;
        for sample in 0..cfg.trials {
            let state = sample_on_surface(family, &mut rng);
            let partners = j_partner_construct(&state)?;
            let phi = state.to_state();
            let mut all_match = true;
            for partner in &partners {
                let partner_state = partner.to_state();
                for basis in &bases {
                    let d_phi = born_distribution(basis, &phi)?;
                    let d_partner = born_distribution(basis, &partner_state)?;
                    if d_phi.linf_distance(&d_partner)? > 1e-10 {
                        all_match = false;
                    }
                }
            }
            if all_match {
                verified += 1;
            }
            if sample < enumeration_checks {
                enumeration_checked += 1;
                if enumeration_rediscovers(cfg, slot, sample, &phi, &partners)? {
                    enumeration_confirmed += 1;
                }
            }
        }
        families.push(FamilyResult {
            family: family.name().to_string(),
            samples: cfg.trials,
            verified,
            enumeration_checked,
            enumeration_confirmed,
        });
    }
    let all_verified = families
        .iter()
        .all(|f| f.verified == f.samples && f.enumeration_confirmed == f.enumeration_checked);
    Ok(JSymmetryReport {
        config: cfg.clone(),
        families,
        all_verified,
    })
}

/// Surface samples can land near the self-partnered subsurface, where φ and
/// its partner sit within ~1e-2 of each other and the iteration converges
/// linearly at rates as slow as ~0.998 per cycle. The rediscovery runs
/// therefore get a much larger budget and a stall rule that only fires on
/// near-flat windows.
const REDISCOVERY_CYCLE_BUDGET: usize = 25_000;
const REDISCOVERY_STALL_FACTOR: f64 = 0.9995;

/// Partner pairs stay well separated compared to this even in the
/// near-degenerate cases observed (≥ 1e-2), while converged clusters land
/// far closer to the analytic partner.
const REDISCOVERY_MATCH_TOL: f64 = 1e-4;

fn enumeration_rediscovers(
    cfg: &EffectiveConfig,
    slot: usize,
    sample: usize,
    phi: &StateVector64,
    partners: &[JState3<f64>],
) -> Result<bool, Error> {
    let data = jxyz_data(phi)?;
    let stream = 1000 + (slot * cfg.trials + sample) as u64 * 64;
    let mut config = cfg.reconstruction(stream);
    config.max_cycles = config.max_cycles.max(REDISCOVERY_CYCLE_BUDGET);
    config.stall_factor = REDISCOVERY_STALL_FACTOR;
    let set = enumerate_partners(&data, 50, &config)?;
    let found = |target: &StateVector64| {
        set.representatives().iter().any(|rep| {
            ray_distance(rep.representative(), target).is_ok_and(|d| d < REDISCOVERY_MATCH_TOL)
        })
    };
    Ok(partners.iter().all(|p| found(&p.to_state())))
}
