//! Singular values, operator norm, numerical rank and minimum-norm solves,
//! all routed through the Hermitian Jacobi eigensolver on Gram matrices.
//! Singular values are re-measured as ‖A v_j‖ in the data space, so near-zero
//! directions are resolved to machine precision rather than to the square
//! root of the Gram round-off.

use num_complex::Complex;
use num_traits::Zero;

use super::eigen::jacobi_hermitian;
use super::{norm, ComplexMatrix};
use crate::scalar::{real, Scalar};

/// Singular values in descending order.
pub fn singular_values<F: Scalar>(a: &ComplexMatrix<F>) -> Vec<F> {
    let (gram, tall) = if a.rows() >= a.cols() {
        (a.dagger().matmul(a), true)
    } else {
        (a.matmul(&a.dagger()), false)
    };
    let spec = jacobi_hermitian(&gram.hermitize());
    let mut sigmas: Vec<F> = spec
        .eigenvectors
        .iter()
        .map(|v| {
            let img = if tall {
                a.apply(v)
            } else {
                a.dagger().apply(v)
            };
            norm(&img)
        })
        .collect();
    sigmas.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sigmas
}

/// Largest singular value.
pub fn operator_norm<F: Scalar>(a: &ComplexMatrix<F>) -> F {
    singular_values(a).first().copied().unwrap_or(F::zero())
}

/// Number of singular values of the stacked vectors exceeding
/// `tol` times the largest one. Empty input or an all-zero stack has rank 0.
pub fn numerical_rank<F: Scalar>(vectors: &[Vec<Complex<F>>], tol: F) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let dim = vectors[0].len();
    assert!(
        vectors.iter().all(|v| v.len() == dim),
        "all vectors must share a length"
    );
    if dim == 0 {
        return 0;
    }
    let mut stack = ComplexMatrix::zeros(vectors.len(), dim);
    for (r, v) in vectors.iter().enumerate() {
        for (c, &z) in v.iter().enumerate() {
            stack[(r, c)] = z;
        }
    }
    let sigmas = singular_values(&stack);
    let top = sigmas[0];
    if top <= F::epsilon() {
        return 0;
    }
    sigmas.iter().filter(|&&s| s > tol * top).count()
}

/// Minimum-Frobenius-norm solution of the (possibly underdetermined)
/// system B·x = t, via x = B†(BB†)⁺t.
#[derive(Clone, Debug)]
pub struct LeastNormSolution<F: Scalar> {
    pub solution: Vec<Complex<F>>,
    pub residual: F,
}

pub fn least_norm_solve<F: Scalar>(
    b: &ComplexMatrix<F>,
    t: &[Complex<F>],
) -> LeastNormSolution<F> {
    assert_eq!(b.rows(), t.len());
    let gram = b.matmul(&b.dagger());
    let spec = jacobi_hermitian(&gram.hermitize());
    let lam_max = spec.eigenvalues.iter().cloned().fold(F::zero(), F::max);
    let cutoff = lam_max * F::epsilon() * real(64.0);
    // y = (BB†)⁺ t
    let mut y = vec![Complex::<F>::zero(); b.rows()];
    for (lam, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if *lam <= cutoff {
            continue;
        }
        let coef = super::inner(v, t) / Complex::new(*lam, F::zero());
        for (yi, &vi) in y.iter_mut().zip(v) {
            *yi = *yi + vi * coef;
        }
    }
    let solution = b.dagger().apply(&y);
    let image = b.apply(&solution);
    let mut res = F::zero();
    for (im, ti) in image.iter().zip(t) {
        res = res + (*im - *ti).norm_sqr();
    }
    LeastNormSolution {
        solution,
        residual: res.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;

    type M = ComplexMatrix<f64>;
    type C = Complex<f64>;

    #[test]
    fn operator_norm_identity_and_diagonal() {
        assert!((operator_norm(&M::identity(5)) - 1.0).abs() < 1e-14);
        let d = M::diagonal(&[C::new(0.5, 0.0), C::new(-2.0, 0.0)]);
        assert!((operator_norm(&d) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gram_oracle_for_stacked_coefficient_rows() {
        // Two stacked coefficient rows; oracle is the explicit 2x2 Gram eigensolve.
        let s = (2.0f64).sqrt() / 3.0;
        let row1 = [
            C::new(s, 0.0),
            C::new(s, 0.0),
            C::new(s, 0.0),
            C::new(1.0 / 3.0, 0.0),
            C::new(1.0 / 3.0, 0.0),
            C::new(1.0 / 3.0, 0.0),
        ];
        let th = [0.3f64, -1.1, 2.0];
        let row2_phases: Vec<C> = (0..3)
            .map(|i| C::from_polar(1.0 / 3.0, th[i] - th[(i + 1) % 3]))
            .collect();
        let mut row2 = vec![C::new(s, 0.0); 3];
        row2.extend(row2_phases);
        let mut f = M::zeros(2, 6);
        for c in 0..6 {
            f[(0, c)] = row1[c];
            f[(1, c)] = row2[c];
        }
        // explicit 2x2 Gram
        let g = f.matmul(&f.dagger());
        let tr = g.trace().re;
        let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let lam_max = tr / 2.0 + disc;
        assert!((operator_norm(&f) - lam_max.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn numerical_rank_cases() {
        let e1 = basis_vector::<f64>(3, 0);
        let e2 = basis_vector::<f64>(3, 1);
        let sum: Vec<C> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
        assert_eq!(numerical_rank(&[e1.clone(), e2.clone(), sum], 1e-8), 2);
        assert_eq!(numerical_rank::<f64>(&[], 1e-8), 0);
        assert_eq!(numerical_rank(&[vec![C::new(0.0, 0.0); 4]], 1e-8), 0);
    }

    #[test]
    fn least_norm_matches_hand_solution() {
        // Single equation sqrt(2)·a + b = 1: min-norm (a, b) = (sqrt2, 1)/3.
        let mut b = M::zeros(1, 2);
        b[(0, 0)] = C::new(2.0f64.sqrt(), 0.0);
        b[(0, 1)] = C::new(1.0, 0.0);
        let sol = least_norm_solve(&b, &[C::new(1.0, 0.0)]);
        assert!(sol.residual < 1e-14);
        assert!((sol.solution[0] - C::new(2.0f64.sqrt() / 3.0, 0.0)).norm() < 1e-14);
        assert!((sol.solution[1] - C::new(1.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn least_norm_reports_infeasibility_via_residual() {
        // B = [[1,0],[1,0]] has no solution to (1, 2): residual positive.
        let mut b = M::zeros(2, 2);
        b[(0, 0)] = C::new(1.0, 0.0);
        b[(1, 0)] = C::new(1.0, 0.0);
        let sol = least_norm_solve(&b, &[C::new(1.0, 0.0), C::new(2.0, 0.0)]);
        assert!(sol.residual > 0.5);
    }
}
