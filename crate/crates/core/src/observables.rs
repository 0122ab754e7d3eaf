//! Observable eigenbases.
//!
//! The reconstruction algorithm identifies an observable with the orthonormal
//! basis of its eigenvectors; eigenvalue labels are carried as metadata only.
//! Constructors: the standard basis, its Fourier transform (the finite
//! position/momentum pair), Haar-random bases, the full mutually unbiased
//! family in prime dimension, spin components along arbitrary directions, and
//! the eigenbasis of the position+momentum sum.

use std::fmt;
use std::str::FromStr;

use crate::eigen::{hermitian_eigenbasis, CMatrix};
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::scalar::{Cpx, Scalar};
use crate::state::{canonicalize, check_dims, dot_raw, norm, random_state, StateVector};

/// N orthonormal state vectors spanning the space, with optional eigenvalue
/// labels.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis<T: Scalar> {
    vectors: Vec<StateVector<T>>,
    labels: Option<Vec<T>>,
}

impl<T: Scalar> OrthonormalBasis<T> {
    /// Validates that the vectors form a complete orthonormal set.
    pub fn new(vectors: Vec<StateVector<T>>, labels: Option<Vec<T>>) -> Result<Self> {
        let dim = vectors.len();
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        for v in &vectors {
            check_dims(dim, v.dim())?;
        }
        if let Some(l) = &labels {
            check_dims(dim, l.len())?;
        }
        let mut dev = T::zero();
        for j in 0..dim {
            for k in j..dim {
                let overlap = dot_raw(vectors[j].amplitudes(), vectors[k].amplitudes());
                let expected = if j == k { T::one() } else { T::zero() };
                dev = dev.max((overlap - Cpx::new(expected, T::zero())).norm());
            }
        }
        if dev > T::ORTHO_TOL {
            return Err(Error::NotOrthonormal {
                deviation: dev.as_f64(),
            });
        }
        Ok(Self { vectors, labels })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector<T>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &StateVector<T> {
        &self.vectors[k]
    }

    pub fn labels(&self) -> Option<&[T]> {
        self.labels.as_deref()
    }
}

/// Canonical basis e_0..e_{N−1}, labeled 0..N−1.
pub fn standard_basis<T: Scalar>(dim: usize) -> Result<OrthonormalBasis<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let vectors = (0..dim)
        .map(|k| StateVector::basis_state(dim, k))
        .collect::<Result<Vec<_>>>()?;
    OrthonormalBasis::new(vectors, Some(index_labels(dim)))
}

/// Discrete Fourier basis: (f_r)_k = e^{2πi·kr/N}/√N, labeled 0..N−1.
///
/// Unbiased to the standard basis; the pair realizes position and momentum
/// on a cyclic lattice.
pub fn fourier_basis<T: Scalar>(dim: usize) -> Result<OrthonormalBasis<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let inv_sqrt = T::one() / T::from_usize(dim).unwrap().sqrt();
    let vectors = (0..dim)
        .map(|r| {
            let amplitudes = (0..dim)
                .map(|k| {
                    let angle = T::TAU() * T::from_usize(k * r % dim).unwrap()
                        / T::from_usize(dim).unwrap();
                    Cpx::from_polar(inv_sqrt, angle)
                })
                .collect();
            StateVector::new(amplitudes)
        })
        .collect::<Result<Vec<_>>>()?;
    OrthonormalBasis::new(vectors, Some(index_labels(dim)))
}

/// Haar-random orthonormal basis.
///
/// Gram–Schmidt over independent Gaussian draws; the positive normalization
/// at each pivot fixes the phase convention, which makes the resulting basis
/// Haar-distributed. Nearly dependent draws are redrawn, failing only after
/// ten consecutive rejections.
pub fn random_basis<T: Scalar>(dim: usize, rng: &mut RandomSource) -> Result<OrthonormalBasis<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let mut vectors: Vec<StateVector<T>> = Vec::with_capacity(dim);
    let dependent_floor = T::from_f64_lossy(1e-6);
    for _ in 0..dim {
        let mut attempts = 0;
        loop {
            let draw = random_state::<T>(dim, rng)?;
            let mut residue: Vec<Cpx<T>> = draw.amplitudes().to_vec();
            for prev in &vectors {
                let overlap = dot_raw(prev.amplitudes(), &residue);
                for (r, p) in residue.iter_mut().zip(prev.amplitudes()) {
                    *r = *r - *p * overlap;
                }
            }
            if norm(&residue) > dependent_floor {
                vectors.push(StateVector::normalized(residue)?);
                break;
            }
            attempts += 1;
            if attempts >= 10 {
                return Err(Error::DependentDraws);
            }
        }
    }
    OrthonormalBasis::new(vectors, None)
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Complete family of N+1 mutually unbiased bases in prime dimension N.
///
/// The first entry is the standard basis. For odd primes the remaining N
/// bases have vectors v^{(m)}_r with components ω^{m·k² + r·k}/√N,
/// ω = e^{2πi/N}; the quadratic Gauss sum makes every cross overlap have
/// modulus 1/√N. Dimension 2 uses the three Pauli eigenbases. Composite and
/// prime-power dimensions are rejected.
pub fn mub_family<T: Scalar>(dim: usize) -> Result<Vec<OrthonormalBasis<T>>> {
    if !is_prime(dim) {
        return Err(Error::UnsupportedDimension { dim });
    }
    if dim == 2 {
        let inv = T::one() / (T::one() + T::one()).sqrt();
        let zero = T::zero();
        let x_basis = OrthonormalBasis::new(
            vec![
                StateVector::new(vec![Cpx::new(inv, zero), Cpx::new(inv, zero)])?,
                StateVector::new(vec![Cpx::new(inv, zero), Cpx::new(-inv, zero)])?,
            ],
            Some(index_labels(2)),
        )?;
        let y_basis = OrthonormalBasis::new(
            vec![
                StateVector::new(vec![Cpx::new(inv, zero), Cpx::new(zero, inv)])?,
                StateVector::new(vec![Cpx::new(inv, zero), Cpx::new(zero, -inv)])?,
            ],
            Some(index_labels(2)),
        )?;
        return Ok(vec![standard_basis(2)?, x_basis, y_basis]);
    }

    let mut family = vec![standard_basis(dim)?];
    let inv_sqrt = T::one() / T::from_usize(dim).unwrap().sqrt();
    for m in 0..dim {
        let vectors = (0..dim)
            .map(|r| {
                let amplitudes = (0..dim)
                    .map(|k| {
                        let exponent = (m * k * k + r * k) % dim;
                        let angle = T::TAU() * T::from_usize(exponent).unwrap()
                            / T::from_usize(dim).unwrap();
                        Cpx::from_polar(inv_sqrt, angle)
                    })
                    .collect();
                StateVector::new(amplitudes)
            })
            .collect::<Result<Vec<_>>>()?;
        family.push(OrthonormalBasis::new(vectors, Some(index_labels(dim)))?);
    }
    Ok(family)
}

/// Spin matrices J_x, J_y, J_z for spin j = (dim − 1)/2, in the basis where
/// J_z = diag(j, j−1, …, −j).
pub fn spin_matrices<T: Scalar>(dim: usize) -> [CMatrix<T>; 3] {
    assert!(dim >= 2);
    let two = T::one() + T::one();
    let j = T::from_usize(dim - 1).unwrap() / two;
    let mut jz = CMatrix::zeros(dim);
    for k in 0..dim {
        jz[(k, k)] = Cpx::new(j - T::from_usize(k).unwrap(), T::zero());
    }
    // ⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1)) with m = j − k for column k.
    let mut jplus = CMatrix::zeros(dim);
    for k in 1..dim {
        let m = j - T::from_usize(k).unwrap();
        let element = (j * (j + T::one()) - m * (m + T::one())).sqrt();
        jplus[(k - 1, k)] = Cpx::new(element, T::zero());
    }
    let half = T::from_f64_lossy(0.5);
    let mut jx = CMatrix::zeros(dim);
    let mut jy = CMatrix::zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            let plus = jplus[(i, k)];
            let minus = jplus[(k, i)].conj();
            jx[(i, k)] = (plus + minus).scale(half);
            // (J₊ − J₋)/(2i) = −i/2·(J₊ − J₋)
            jy[(i, k)] = (plus - minus) * Cpx::new(T::zero(), -half);
        }
    }
    [jx, jy, jz]
}

/// Eigenbasis of the spin component n·J along a unit direction, labeled by
/// the exact magnetic quantum numbers −j..j in ascending order.
pub fn angular_momentum_basis<T: Scalar>(
    dim: usize,
    direction: [T; 3],
) -> Result<OrthonormalBasis<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let norm_sq = direction.iter().fold(T::zero(), |acc, &x| acc + x * x);
    if (norm_sq.sqrt() - T::one()).abs() > T::ORTHO_TOL {
        return Err(Error::UnnormalizedDirection {
            norm: norm_sq.sqrt().as_f64(),
        });
    }
    let [jx, jy, jz] = spin_matrices::<T>(dim);
    let component = jx
        .scale(Cpx::new(direction[0], T::zero()))
        .add(&jy.scale(Cpx::new(direction[1], T::zero())))
        .add(&jz.scale(Cpx::new(direction[2], T::zero())));
    let (_, basis) = hermitian_eigenbasis(&component)?;
    // Phases from the eigensolver are arbitrary; canonicalize them. Labels
    // are the exact half-integers rather than the numerical eigenvalues.
    let two = T::one() + T::one();
    let j = T::from_usize(dim - 1).unwrap() / two;
    let labels: Vec<T> = (0..dim).map(|k| T::from_usize(k).unwrap() - j).collect();
    let vectors = basis
        .vectors()
        .iter()
        .map(|v| canonicalize(v).into_representative())
        .collect();
    OrthonormalBasis::new(vectors, Some(labels))
}

/// Eigenbasis of X + P, where X has the standard basis with labels 0..N−1
/// and P = F·X·F† has the Fourier basis with the same labels. Biased toward
/// both; labels are the eigenvalues of the sum.
pub fn xp_basis<T: Scalar>(dim: usize) -> Result<OrthonormalBasis<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let fourier = fourier_basis::<T>(dim)?;
    let mut sum = CMatrix::zeros(dim);
    for k in 0..dim {
        let label = T::from_usize(k).unwrap();
        sum[(k, k)] = sum[(k, k)] + Cpx::new(label, T::zero());
        let f = fourier.vector(k).amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                sum[(i, j)] = sum[(i, j)] + (f[i] * f[j].conj()).scale(label);
            }
        }
    }
    let (eigenvalues, basis) = hermitian_eigenbasis(&sum)?;
    let vectors = basis
        .vectors()
        .iter()
        .map(|v| canonicalize(v).into_representative())
        .collect();
    OrthonormalBasis::new(vectors, Some(eigenvalues))
}

/// True when every cross overlap |⟨u_j, v_k⟩| equals 1/√N within
/// `Scalar::UNBIASED_TOL`.
pub fn unbiasedness_check<T: Scalar>(
    b1: &OrthonormalBasis<T>,
    b2: &OrthonormalBasis<T>,
) -> Result<bool> {
    check_dims(b1.dim(), b2.dim())?;
    let target = T::one() / T::from_usize(b1.dim()).unwrap().sqrt();
    for u in b1.vectors() {
        for v in b2.vectors() {
            let overlap = dot_raw(u.amplitudes(), v.amplitudes()).norm();
            if (overlap - target).abs() > T::UNBIASED_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn index_labels<T: Scalar>(dim: usize) -> Vec<T> {
    (0..dim).map(|k| T::from_usize(k).unwrap()).collect()
}

/// Stream index reserved for `random:<seed>` basis construction.
pub const BASIS_STREAM: u64 = 1 << 32;

/// Named observable constructions, parsed from CLI strings.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableKind {
    Standard,
    Fourier,
    Random { seed: u64 },
    Mub { index: usize },
    Jmom { direction: [f64; 3] },
    Xp,
}

impl FromStr for ObservableKind {
    type Err = Error;

    /// Accepted forms: `standard`, `fourier`, `xp`, `random:<seed>`,
    /// `mub:<index>`, `jmom:<nx>,<ny>,<nz>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ParseObservable {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match s.split_once(':') {
            None => match s {
                "standard" => Ok(Self::Standard),
                "fourier" => Ok(Self::Fourier),
                "xp" => Ok(Self::Xp),
                _ => Err(bad("unknown kind")),
            },
            Some(("random", arg)) => arg
                .parse::<u64>()
                .map(|seed| Self::Random { seed })
                .map_err(|e| bad(&format!("seed: {e}"))),
            Some(("mub", arg)) => arg
                .parse::<usize>()
                .map(|index| Self::Mub { index })
                .map_err(|e| bad(&format!("index: {e}"))),
            Some(("jmom", arg)) => {
                let parts: Vec<&str> = arg.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("jmom needs three comma-separated components"));
                }
                let mut direction = [0.0f64; 3];
                for (d, p) in direction.iter_mut().zip(&parts) {
                    *d = p
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| bad(&format!("component: {e}")))?;
                }
                Ok(Self::Jmom { direction })
            }
            Some(_) => Err(bad("unknown kind")),
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Standard => write!(f, "standard"),
            Self::Fourier => write!(f, "fourier"),
            Self::Xp => write!(f, "xp"),
            Self::Random { seed } => write!(f, "random:{seed}"),
            Self::Mub { index } => write!(f, "mub:{index}"),
            Self::Jmom { direction } => {
                write!(f, "jmom:{},{},{}", direction[0], direction[1], direction[2])
            }
        }
    }
}

/// An observable kind bound to a dimension, ready to build.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub dim: usize,
}

impl ObservableSpec {
    pub fn new(kind: ObservableKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if let ObservableKind::Jmom { direction } = &kind {
            let n = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::UnnormalizedDirection { norm: n });
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn build<T: Scalar>(&self) -> Result<OrthonormalBasis<T>> {
        match &self.kind {
            ObservableKind::Standard => standard_basis(self.dim),
            ObservableKind::Fourier => fourier_basis(self.dim),
            ObservableKind::Xp => xp_basis(self.dim),
            ObservableKind::Random { seed } => {
                // Basis draws live on their own stream block so an embedded
                // seed equal to an experiment seed cannot collide with the
                // experiment's state draws (which use low stream indices).
                let mut rng = RandomSource::new(*seed, BASIS_STREAM);
                random_basis(self.dim, &mut rng)
            }
            ObservableKind::Mub { index } => {
                let family = mub_family(self.dim)?;
                family
                    .into_iter()
                    .nth(*index)
                    .ok_or(Error::MubIndexOutOfRange {
                        index: *index,
                        count: self.dim + 1,
                    })
            }
            ObservableKind::Jmom { direction } => {
                let dir = [
                    T::from_f64_lossy(direction[0]),
                    T::from_f64_lossy(direction[1]),
                    T::from_f64_lossy(direction[2]),
                ];
                angular_momentum_basis(self.dim, dir)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::canonical_gap;

    #[test]
    fn standard_basis_is_the_canonical_one() {
        let b = standard_basis::<f64>(2).unwrap();
        assert_eq!(b.vector(0).amplitudes()[0], Cpx::new(1.0, 0.0));
        assert_eq!(b.vector(1).amplitudes()[1], Cpx::new(1.0, 0.0));
        assert_eq!(b.labels().unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn fourier_dim_two_is_the_hadamard_pair() {
        let b = fourier_basis::<f64>(2).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let plus = StateVector::from_real(&[inv, inv]).unwrap();
        let minus = StateVector::from_real(&[inv, -inv]).unwrap();
        assert!(canonical_gap(b.vector(0), &plus).unwrap() < 1e-12);
        assert!(canonical_gap(b.vector(1), &minus).unwrap() < 1e-12);
    }

    #[test]
    fn fourier_is_orthonormal_and_unbiased_to_standard() {
        for dim in 2..=20 {
            let f = fourier_basis::<f64>(dim).unwrap();
            let s = standard_basis::<f64>(dim).unwrap();
            // Constructor already enforces orthonormality at 1e-10; check the
            // tighter 1e-12 directly.
            for j in 0..dim {
                for k in 0..dim {
                    let overlap = f.vector(j).dot(f.vector(k)).unwrap();
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert!(
                        (overlap - Cpx::new(expected, 0.0)).norm() < 1e-12,
                        "dim {dim} gram ({j},{k})"
                    );
                }
            }
            assert!(unbiasedness_check(&s, &f).unwrap());
        }
    }

    #[test]
    fn standard_is_not_unbiased_to_itself() {
        let s = standard_basis::<f64>(3).unwrap();
        assert!(!unbiasedness_check(&s, &s).unwrap());
    }

    #[test]
    fn random_basis_is_reproducible_and_orthonormal() {
        let mut rng = RandomSource::new(7, 0);
        let b1 = random_basis::<f64>(4, &mut rng).unwrap();
        let mut rng2 = RandomSource::new(7, 0);
        let b2 = random_basis::<f64>(4, &mut rng2).unwrap();
        for k in 0..4 {
            assert_eq!(b1.vector(k).amplitudes(), b2.vector(k).amplitudes());
        }
        for j in 0..4 {
            for k in 0..4 {
                let overlap = b1.vector(j).dot(b1.vector(k)).unwrap().norm();
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_basis_first_vector_is_haar_uniform() {
        let mut rng = RandomSource::new(12, 0);
        let n = 10_000;
        let e0 = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let mut acc = 0.0;
        for _ in 0..n {
            let b = random_basis::<f64>(3, &mut rng).unwrap();
            acc += e0.dot(b.vector(0)).unwrap().norm_sqr();
        }
        assert!((acc / n as f64 - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn mub_family_dim_three_is_fully_unbiased() {
        let family = mub_family::<f64>(3).unwrap();
        assert_eq!(family.len(), 4);
        let target = 1.0 / 3.0_f64.sqrt();
        for a in 0..family.len() {
            for b in a + 1..family.len() {
                for u in family[a].vectors() {
                    for v in family[b].vectors() {
                        let overlap = u.dot(v).unwrap().norm();
                        assert!(
                            (overlap - target).abs() < 1e-12,
                            "family pair ({a},{b}) overlap {overlap}"
                        );
                    }
                }
            }
        }
        assert!(unbiasedness_check(&family[1], &family[3]).unwrap());
    }

    #[test]
    fn mub_family_dim_two_has_three_bases() {
        let family = mub_family::<f64>(2).unwrap();
        assert_eq!(family.len(), 3);
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(unbiasedness_check(&family[a], &family[b]).unwrap());
            }
        }
    }

    #[test]
    fn mub_family_larger_primes_check_out() {
        for dim in [5usize, 7] {
            let family = mub_family::<f64>(dim).unwrap();
            assert_eq!(family.len(), dim + 1);
            for a in 0..family.len() {
                for b in a + 1..family.len() {
                    assert!(unbiasedness_check(&family[a], &family[b]).unwrap());
                }
            }
        }
    }

    #[test]
    fn composite_dimension_is_unsupported() {
        assert!(matches!(
            mub_family::<f64>(4),
            Err(Error::UnsupportedDimension { dim: 4 })
        ));
        assert!(matches!(
            mub_family::<f64>(9),
            Err(Error::UnsupportedDimension { dim: 9 })
        ));
    }

    #[test]
    fn jz_direction_reproduces_standard_rays_with_descending_m() {
        let b = angular_momentum_basis::<f64>(3, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(b.labels().unwrap(), &[-1.0, 0.0, 1.0]);
        // Ascending labels pair m = −1 with e_2 and m = +1 with e_0.
        for (k, expect) in [(0usize, 2usize), (1, 1), (2, 0)] {
            let e = StateVector::<f64>::basis_state(3, expect).unwrap();
            assert!(canonical_gap(b.vector(k), &e).unwrap() < 1e-9);
        }
    }

    #[test]
    fn jx_direction_dim_two_gives_hadamard_rays() {
        let b = angular_momentum_basis::<f64>(2, [1.0, 0.0, 0.0]).unwrap();
        let inv = 1.0 / 2.0_f64.sqrt();
        let minus = StateVector::from_real(&[inv, -inv]).unwrap();
        let plus = StateVector::from_real(&[inv, inv]).unwrap();
        assert!(canonical_gap(b.vector(0), &minus).unwrap() < 1e-9);
        assert!(canonical_gap(b.vector(1), &plus).unwrap() < 1e-9);
    }

    #[test]
    fn spectrum_is_rotation_invariant() {
        let dirs = [
            [0.6, 0.0, 0.8],
            [-0.267261241912424, 0.534522483824849, 0.801783725737273],
            [0.0, 1.0, 0.0],
        ];
        for dim in [2usize, 3, 5] {
            let j = (dim as f64 - 1.0) / 2.0;
            for dir in dirs {
                let [jx, jy, jz] = spin_matrices::<f64>(dim);
                let h = jx
                    .scale(Cpx::new(dir[0], 0.0))
                    .add(&jy.scale(Cpx::new(dir[1], 0.0)))
                    .add(&jz.scale(Cpx::new(dir[2], 0.0)));
                let (vals, _) = hermitian_eigenbasis(&h).unwrap();
                for (k, v) in vals.iter().enumerate() {
                    let expected = -j + k as f64;
                    assert!((v - expected).abs() < 1e-9, "dim {dim} m {expected}: {v}");
                }
            }
        }
    }

    #[test]
    fn flipped_direction_spans_the_same_rays_with_reversed_labels() {
        let dir = [0.48, -0.6, 0.64];
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dir = [dir[0] / norm, dir[1] / norm, dir[2] / norm];
        let flipped = [-dir[0], -dir[1], -dir[2]];
        for dim in [2usize, 3, 4] {
            let b = angular_momentum_basis::<f64>(dim, dir).unwrap();
            let f = angular_momentum_basis::<f64>(dim, flipped).unwrap();
            for k in 0..dim {
                let d = canonical_gap(b.vector(k), f.vector(dim - 1 - k)).unwrap();
                assert!(d < 1e-8, "dim {dim} ray {k} mismatch {d}");
                assert!((b.labels().unwrap()[k] + f.labels().unwrap()[dim - 1 - k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unnormalized_direction_is_rejected() {
        assert!(matches!(
            angular_momentum_basis::<f64>(3, [1.0, 1.0, 0.0]),
            Err(Error::UnnormalizedDirection { .. })
        ));
    }

    #[test]
    fn xp_basis_is_biased_to_both_parents() {
        let b = xp_basis::<f64>(3).unwrap();
        let s = standard_basis::<f64>(3).unwrap();
        let f = fourier_basis::<f64>(3).unwrap();
        assert!(!unbiasedness_check(&b, &s).unwrap());
        assert!(!unbiasedness_check(&b, &f).unwrap());
    }

    #[test]
    fn spec_strings_roundtrip() {
        for text in [
            "standard",
            "fourier",
            "xp",
            "random:42",
            "mub:2",
            "jmom:0,0,1",
        ] {
            let kind: ObservableKind = text.parse().unwrap();
            assert_eq!(kind.to_string(), text);
        }
        assert!("mub".parse::<ObservableKind>().is_err());
        assert!("jmom:1,2".parse::<ObservableKind>().is_err());
        assert!("spooky:1".parse::<ObservableKind>().is_err());
    }

    #[test]
    fn mub_index_out_of_range_is_rejected() {
        let spec = ObservableSpec::new(ObservableKind::Mub { index: 4 }, 3).unwrap();
        assert!(matches!(
            spec.build::<f64>(),
            Err(Error::MubIndexOutOfRange { index: 4, count: 4 })
        ));
    }

    #[test]
    fn spec_build_matches_direct_constructors() {
        let spec = ObservableSpec::new(ObservableKind::Fourier, 5).unwrap();
        let built = spec.build::<f64>().unwrap();
        let direct = fourier_basis::<f64>(5).unwrap();
        for k in 0..5 {
            assert!(canonical_gap(built.vector(k), direct.vector(k)).unwrap() < 1e-12);
        }
        assert!(matches!(
            ObservableSpec::new(
                ObservableKind::Jmom {
                    direction: [1.0, 1.0, 0.0]
                },
                3
            ),
            Err(Error::UnnormalizedDirection { .. })
        ));
    }
}
