//! Hermitian eigendecomposition by the cyclic complex Jacobi method.
//!
//! Deterministic for fixed input (fixed sweep order, no randomized
//! initialization) and accurate to a few ulps at the matrix sizes this
//! crate targets.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Full ascending spectrum of a Hermitian matrix with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum<F: Scalar> {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<F>,
    /// Unit-norm eigenvectors, one per eigenvalue, same order.
    pub eigenvectors: Vec<Vec<Complex<F>>>,
}

impl<F: Scalar> HermitianSpectrum<F> {
    pub fn min(&self) -> F {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> F {
        *self.eigenvalues.last().unwrap()
    }

    pub fn min_vector(&self) -> &[Complex<F>] {
        &self.eigenvectors[0]
    }

    /// Rebuild V Λ V†.
    pub fn reconstruct(&self) -> ComplexMatrix<F> {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] = out[(r, c)] + v[r] * v[c].conj() * Complex::new(*lam, F::zero());
                }
            }
        }
        out
    }
}

/// Spectrum of `a`, rejecting input whose asymmetry exceeds the default
/// Hermiticity tolerance scaled by (1 + max entry).
pub fn hermitian_spectrum<F: Scalar>(a: &ComplexMatrix<F>) -> Result<HermitianSpectrum<F>> {
    hermitian_spectrum_with_tol(a, real(super::HERMITICITY_TOL))
}

pub fn hermitian_spectrum_with_tol<F: Scalar>(
    a: &ComplexMatrix<F>,
    tol: F,
) -> Result<HermitianSpectrum<F>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.max_asymmetry();
    if asym > tol * (F::one() + a.max_abs()) {
        return Err(Error::NotHermitian {
            max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(jacobi_hermitian(&a.hermitize()))
}

/// Cyclic Jacobi on a Hermitian matrix (caller guarantees symmetry).
pub(crate) fn jacobi_hermitian<F: Scalar>(a: &ComplexMatrix<F>) -> HermitianSpectrum<F> {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = ComplexMatrix::<F>::identity(n);
    let eps = F::epsilon();
    let scale = m.frobenius_norm();

    if scale > F::zero() {
        for _sweep in 0..64 {
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off + m[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q, eps);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors: Vec<Vec<Complex<F>>> = order
        .iter()
        .map(|&col| (0..n).map(|r| v[(r, col)]).collect())
        .collect();
    HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    }
}

fn rotate<F: Scalar>(
    m: &mut ComplexMatrix<F>,
    v: &mut ComplexMatrix<F>,
    p: usize,
    q: usize,
    eps: F,
) {
    let alpha = m[(p, q)];
    let g = alpha.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if g <= eps * (app.abs() + aqq.abs()) * real(0.5) {
        m[(p, q)] = Complex::zero();
        m[(q, p)] = Complex::zero();
        return;
    }
    // Phase so that e^{-iψ}·α is real positive.
    let phase = alpha / Complex::new(g, F::zero());
    let tau = (aqq - app) / (real::<F>(2.0) * g);
    let t = if tau.abs() > real(1e12) {
        (real::<F>(2.0) * tau).recip()
    } else {
        let sign = if tau >= F::zero() { F::one() } else { -F::one() };
        sign / (tau.abs() + (F::one() + tau * tau).sqrt())
    };
    let c = (F::one() + t * t).sqrt().recip();
    let s = t * c;

    let jpp = phase * Complex::new(c, F::zero());
    let jpq = phase * Complex::new(s, F::zero());
    let jqp = Complex::new(-s, F::zero());
    let jqq = Complex::new(c, F::zero());

    let n = m.rows();
    // A <- A·J
    for r in 0..n {
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        m[(r, p)] = arp * jpp + arq * jqp;
        m[(r, q)] = arp * jpq + arq * jqq;
    }
    // A <- J†·A
    for r in 0..n {
        let apr = m[(p, r)];
        let aqr = m[(q, r)];
        m[(p, r)] = jpp.conj() * apr + jqp.conj() * aqr;
        m[(q, r)] = jpq.conj() * apr + jqq.conj() * aqr;
    }
    // Clean the rotated pair; the diagonal is real by construction.
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)] = Complex::new(m[(p, p)].re, F::zero());
    m[(q, q)] = Complex::new(m[(q, q)].re, F::zero());
    // V <- V·J
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * jpp + vrq * jqp;
        v[(r, q)] = vrp * jpq + vrq * jqq;
    }
}
