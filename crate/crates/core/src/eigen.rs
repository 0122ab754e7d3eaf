//! Small dense Hermitian eigensolver.
//!
//! Cyclic complex Jacobi rotations: repeatedly zero each off-diagonal entry
//! with a 2×2 unitary until the off-diagonal mass is at rounding level. For
//! the N ≤ 64 matrices this crate builds, accuracy matters more than speed
//! and the method keeps the accumulated eigenvector matrix unitary to within
//! a few ulps.

use crate::error::{Error, Result};
use crate::observables::OrthonormalBasis;
use crate::scalar::{Cpx, Scalar};
use crate::state::StateVector;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMatrix<T: Scalar> {
    dim: usize,
    data: Vec<Cpx<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Cpx::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cpx::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cpx<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest |H_ij − conj(H_ji)| over all entries; NaN when any entry is
    /// not finite (`Float::max` would silently drop a NaN deviation).
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if !d.is_finite() {
                    return T::nan();
                }
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&other.data) {
            *o = *o + *r;
        }
        out
    }

    pub fn scale(&self, factor: Cpx<T>) -> Self {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o = *o * factor;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cpx<T>]) -> Vec<Cpx<T>> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| {
                let mut acc = Cpx::new(T::zero(), T::zero());
                for j in 0..self.dim {
                    acc = acc + self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Cpx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cpx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cpx<T> {
        &mut self.data[i * self.dim + j]
    }
}

const MAX_SWEEPS: usize = 64;

/// Full eigendecomposition of a Hermitian matrix.
///
/// Returns the eigenvalues in ascending order and the matching eigenvectors
/// as an orthonormal basis labeled with those eigenvalues. Rejects input
/// whose Hermitian deviation exceeds `Scalar::HERMITIAN_TOL`.
pub fn hermitian_eigenbasis<T: Scalar>(h: &CMatrix<T>) -> Result<(Vec<T>, OrthonormalBasis<T>)> {
    let n = h.dim();
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n });
    }
    let dev = h.hermitian_deviation();
    if !dev.is_finite() || dev > T::HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }

    // Work on the Hermitian average so validated drift cannot bias rotations.
    let mut a = CMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()).scale(half::<T>()));
    let mut v = CMatrix::identity(n);

    // After a converged sweep the off-diagonal mass is rotation rounding,
    // about n·ε·‖A‖; the factor 4 keeps the stopping test off that noise floor.
    let scale = frobenius(&a).max(T::min_positive_value());
    let target = scale * T::epsilon() * T::from_usize(4 * n).unwrap();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::EigenConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let eigenvalues: Vec<T> = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors: Vec<StateVector<T>> = order
        .iter()
        .map(|&k| {
            let col: Vec<Cpx<T>> = (0..n).map(|r| v[(r, k)]).collect();
            StateVector::normalized(col).expect("Jacobi columns are unit vectors")
        })
        .collect();
    let basis = OrthonormalBasis::new(vectors, Some(eigenvalues.clone()))?;
    Ok((eigenvalues, basis))
}

fn half<T: Scalar>() -> T {
    T::from_f64_lossy(0.5)
}

fn frobenius<T: Scalar>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

fn off_diagonal_norm<T: Scalar>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation zeroing A[p][q].
///
/// With g = A[p][q] = |g|e^{iθ} and τ = (A[p][p] − A[q][q]) / (2|g|), the
/// unitary U = [[c, −s], [s̄, c]] with s = e^{iθ}·t·c and the stable root
/// t = sign(τ)/(|τ| + √(1+τ²)) annihilates the pair under A ← U†AU.
fn rotate<T: Scalar>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_mag = g.norm();
    if g_mag <= T::min_positive_value() {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let tau = (alpha - beta) / (g_mag + g_mag);
    let t = {
        let root = (T::one() + tau * tau).sqrt();
        if tau >= T::zero() {
            T::one() / (tau + root)
        } else {
            -T::one() / (-tau + root)
        }
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = (g / g_mag).scale(t * c);

    let n = a.dim();
    // Column update: A ← A·U, V ← V·U.
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp.scale(c) + arq * s.conj();
        a[(r, q)] = arq.scale(c) - arp * s;

        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp.scale(c) + vrq * s.conj();
        v[(r, q)] = vrq.scale(c) - vrp * s;
    }
    // Row update: A ← U†·A.
    for r in 0..n {
        let apr = a[(p, r)];
        let aqr = a[(q, r)];
        a[(p, r)] = apr.scale(c) + aqr * s;
        a[(q, r)] = aqr.scale(c) - apr * s.conj();
    }
    // Make the annihilated pair exact and the diagonal real.
    a[(p, q)] = Cpx::new(T::zero(), T::zero());
    a[(q, p)] = Cpx::new(T::zero(), T::zero());
    a[(p, p)] = Cpx::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Cpx::new(a[(q, q)].re, T::zero());
}
