//! Smallest eigenvalue of a Hermitian [`OperatorMatrix`].
//!
//! Small matrices go through a dense Hermitian eigendecomposition; larger
//! ones through restarted Lanczos with full reorthogonalization. Both paths
//! run in `f64` whatever the operator's scalar type.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{OperatorMatrix, StateVector};
use crate::scalar::{Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub min_eigenvalue: f64,
    /// `‖H v − λ v‖` for the unit eigenvector estimate `v`.
    pub residual: f64,
    pub method: SpectralMethod,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest dimension handed to the dense solver (4096 = 12 sites).
    pub dense_max_dim: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Relative residual target for the iterative path.
    pub tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_max_dim: 4096,
            krylov_dim: 80,
            max_restarts: 200,
            tolerance: 1e-8,
        }
    }
}

fn to_f64<T: Real>(h: &OperatorMatrix<T>) -> OperatorMatrix<f64> {
    let triplets = h
        .triplets()
        .map(|(r, c, v)| (r, c, Complex::new(v.re.as_f64(), v.im.as_f64())))
        .collect();
    OperatorMatrix::from_triplets(h.dim(), triplets).expect("same shape")
}

/// Smallest eigenvalue with the default options.
pub fn min_eigenvalue<T: Real>(h: &OperatorMatrix<T>) -> Result<SpectralResult> {
    min_eigenvalue_with(h, EigenOptions::default())
}

pub fn min_eigenvalue_with<T: Real>(h: &OperatorMatrix<T>, options: EigenOptions) -> Result<SpectralResult> {
    let h = to_f64(h);
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    if h.dim() <= options.dense_max_dim {
        Ok(dense_min(&h))
    } else {
        lanczos_min(&h, options)
    }
}

fn residual(h: &OperatorMatrix<f64>, v: Vec<Complex<f64>>, lambda: f64) -> f64 {
    let v = StateVector::new(v).expect("finite eigenvector");
    let hv = h.apply(&v).expect("same dimension");
    hv.sub(&v.scale(Complex::from(lambda))).expect("same dimension").norm() / v.norm()
}

fn dense_min(h: &OperatorMatrix<f64>) -> SpectralResult {
    let n = h.dim();
    let (lambda, vector) = if h.is_real() {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (r, c, v) in h.triplets() {
            m[(r, c)] = v.re;
        }
        let eig = SymmetricEigen::new(m);
        let k = eig.eigenvalues.imin();
        let v = eig.eigenvectors.column(k).iter().map(|&x| Complex::from(x)).collect();
        (eig.eigenvalues[k], v)
    } else {
        let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
        for (r, c, v) in h.triplets() {
            m[(r, c)] = v;
        }
        let eig = SymmetricEigen::new(m);
        let k = eig.eigenvalues.imin();
        (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
    };
    SpectralResult {
        min_eigenvalue: lambda,
        residual: residual(h, vector, lambda),
        method: SpectralMethod::Dense,
        iterations: 1,
    }
}

fn dot(a: &[Complex<f64>], b: &[Complex<f64>]) -> Complex<f64> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[Complex<f64>]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lanczos_min(h: &OperatorMatrix<f64>, options: EigenOptions) -> Result<SpectralResult> {
    let n = h.dim();
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(0x01a2_c705);
    let mut start: Vec<Complex<f64>> = (0..n).map(|_| Complex::from(rng.random_range(-1.0..1.0))).collect();
    let mut last_residual = f64::INFINITY;
    for restart in 0..options.max_restarts {
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);
        let m = options.krylov_dim.min(n);
        let mut basis: Vec<Vec<Complex<f64>>> = vec![start.clone()];
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m);
        loop {
            let v = basis.last().unwrap();
            let mut w = h.apply(&StateVector::new(v.clone())?)?.amplitudes().to_vec();
            diag.push(dot(v, &w).re);
            // two Gram-Schmidt passes against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let beta = norm(&w);
            if basis.len() == m || beta <= 1e-14 * scale {
                break;
            }
            off.push(beta);
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w);
        }
        let k = basis.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = diag[i];
            if i + 1 < k {
                t[(i, i + 1)] = off[i];
                t[(i + 1, i)] = off[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let j = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[j];
        let y: DVector<f64> = eig.eigenvectors.column(j).into_owned();
        let mut ritz = vec![Complex::zero(); n];
        for (b, &c) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(b).for_each(|(x, v)| *x += v * c);
        }
        last_residual = residual(h, ritz.clone(), theta);
        if last_residual <= options.tolerance * scale.max(theta.abs()) {
            return Ok(SpectralResult {
                min_eigenvalue: theta,
                residual: last_residual,
                method: SpectralMethod::Iterative,
                iterations: restart + 1,
            });
        }
        start = ritz;
    }
    Err(Error::NoConvergence {
        iterations: options.max_restarts,
        residual: last_residual,
    })
}
