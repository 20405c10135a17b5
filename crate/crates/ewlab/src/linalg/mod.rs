//! Dense complex linear algebra: the carrier type for operators, states and
//! map terms, plus tensor products, partial transposes, Hermitian spectra,
//! norms and numerical rank.
//!
//! Index convention (fixed repo-wide): composite basis vector |i⟩⊗|j⟩ of an
//! A⊗B system sits at index `i * dim_b + j` (A-major, 0-based).

mod eigen;
mod svd;

pub use eigen::{hermitian_spectrum, hermitian_spectrum_with_tol, HermitianSpectrum};
pub use svd::{least_norm_solve, numerical_rank, operator_norm, singular_values, LeastNormSolution};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Default tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default tolerance on eigenpair residuals ‖Av − λv‖ relative to ‖A‖.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
/// Default relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<F: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<F>>,
}

impl<F: Scalar> std::fmt::Debug for ComplexMatrix<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<F: Scalar> ComplexMatrix<F> {
    /// Build from row-major data; checks the shape and entry finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<F>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "rows and cols must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Matrix unit E_ij (0-based) of the given square dimension.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = Complex::one();
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<F>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[Complex<F>]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Rank-one |u⟩⟨v|.
    pub fn outer(u: &[Complex<F>], v: &[Complex<F>]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<F>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn scale(&self, s: Complex<F>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: F) -> Self {
        self.scale(Complex::new(s, F::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] = out[(r, c)] + a * other[(k, c)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<F>]) -> Vec<Complex<F>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    pub fn trace(&self) -> Complex<F> {
        assert!(self.is_square());
        (0..self.rows).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> F {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(F::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(F::zero(), F::max)
    }

    /// Largest entry of |A − A†|.
    pub fn max_asymmetry(&self) -> F {
        assert!(self.is_square());
        let mut worst = F::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: F) -> bool {
        self.is_square() && self.max_asymmetry() <= tol * (F::one() + self.max_abs())
    }

    /// Replace A by (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        let half = real::<F>(0.5);
        let dag = self.dagger();
        self.add(&dag).scale_re(half)
    }

    /// Real part of Tr(A† B), the Hilbert–Schmidt inner product.
    pub fn hs_inner_re(&self, other: &Self) -> F {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .fold(F::zero(), |x, y| x + y)
    }

    /// ⟨u|A|v⟩.
    pub fn sandwich(&self, u: &[Complex<F>], v: &[Complex<F>]) -> Complex<F> {
        let av = self.apply(v);
        inner(u, &av)
    }

    /// Smallest eigenvalue, Hermitian input assumed (symmetrized internally).
    pub fn min_eigenvalue(&self) -> F {
        let spec = eigen::jacobi_hermitian(&self.hermitize());
        spec.eigenvalues[0]
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for ComplexMatrix<F> {
    type Output = Complex<F>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<F> {
        &self.data[r * self.cols + c]
    }
}

impl<F: Scalar> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<F> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<F> {
        &mut self.data[r * self.cols + c]
    }
}

/// Subsystem dimensions of a bipartite operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteDims {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::InvalidDims(format!(
                "subsystem dimensions must be at least 2, got {dim_a} and {dim_b}"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn composite(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Composite index of |i⟩⊗|j⟩ (0-based, A-major).
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }
}

/// Which subsystem a partial transpose acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Kronecker product with the A-major convention.
pub fn tensor<F: Scalar>(a: &ComplexMatrix<F>, b: &ComplexMatrix<F>) -> ComplexMatrix<F> {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Tensor product of vectors: (x ⊗ y)[i*len(y)+j] = x_i y_j.
pub fn tensor_vec<F: Scalar>(x: &[Complex<F>], y: &[Complex<F>]) -> Vec<Complex<F>> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &xi in x {
        for &yj in y {
            out.push(xi * yj);
        }
    }
    out
}

/// Partial transpose on the selected subsystem.
pub fn partial_transpose<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
    side: Side,
) -> Result<ComplexMatrix<F>> {
    let n = dims.dim_a();
    let m = dims.dim_b();
    if w.rows() != n * m || w.cols() != n * m {
        return Err(Error::InvalidDims(format!(
            "operator is {}x{}, dims say {}x{}",
            w.rows(),
            w.cols(),
            n * m,
            n * m
        )));
    }
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            for a in 0..m {
                for b in 0..m {
                    let src = w[(dims.index(i, a), dims.index(j, b))];
                    let (r, c) = match side {
                        Side::A => (dims.index(j, a), dims.index(i, b)),
                        Side::B => (dims.index(i, b), dims.index(j, a)),
                    };
                    out[(r, c)] = src;
                }
            }
        }
    }
    Ok(out)
}

/// ⟨u|v⟩ with the physics convention (conjugate-linear in the first slot).
pub fn inner<F: Scalar>(u: &[Complex<F>], v: &[Complex<F>]) -> Complex<F> {
    assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn norm<F: Scalar>(v: &[Complex<F>]) -> F {
    v.iter()
        .map(|z| z.norm_sqr())
        .fold(F::zero(), |a, b| a + b)
        .sqrt()
}

pub fn normalize<F: Scalar>(v: &[Complex<F>]) -> Vec<Complex<F>> {
    let n = norm(v);
    if n <= F::zero() {
        return v.to_vec();
    }
    v.iter().map(|&z| z / n).collect()
}

pub fn basis_vector<F: Scalar>(dim: usize, index: usize) -> Vec<Complex<F>> {
    let mut v = vec![Complex::zero(); dim];
    v[index] = Complex::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;
    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = M::identity(2);
        let t = tensor(&i2, &i2);
        assert_eq!(t, M::identity(4));
    }

    #[test]
    fn tensor_basis_elements() {
        let e11 = M::basis(2, 0, 0);
        let t = tensor(&e11, &e11);
        let mut expect = M::zeros(4, 4);
        expect[(0, 0)] = C::new(1.0, 0.0);
        assert_eq!(t, expect);

        // E_12 ⊗ E_21: row |1⟩⊗|2⟩ = index 0*2+1 = 1, col |2⟩⊗|1⟩ = 1*2+0 = 2
        let e12 = M::basis(2, 0, 1);
        let e21 = M::basis(2, 1, 0);
        let t = tensor(&e12, &e21);
        let mut expect = M::zeros(4, 4);
        expect[(1, 2)] = C::new(1.0, 0.0);
        assert_eq!(t, expect);
    }

    #[test]
    fn tensor_trace_multiplicative() {
        let a = M::from_fn(3, 3, |r, c_| c(r as f64 + 0.3, c_ as f64 - 1.0));
        let b = M::from_fn(2, 2, |r, c_| c(1.0 - r as f64, 0.5 * c_ as f64));
        let t = tensor(&a, &b);
        let lhs = t.trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_product_operator() {
        let a = M::from_fn(2, 2, |r, c_| c(r as f64, c_ as f64 + 0.5));
        let b = M::from_fn(3, 3, |r, c_| c(0.2 * r as f64 - 1.0, c_ as f64));
        let dims = BipartiteDims::new(2, 3).unwrap();
        let w = tensor(&a, &b);
        let ptb = partial_transpose(&w, dims, Side::B).unwrap();
        let expect = tensor(&a, &b.transpose());
        assert!(ptb.sub(&expect).max_abs() < 1e-14);
        let pta = partial_transpose(&w, dims, Side::A).unwrap();
        let expect = tensor(&a.transpose(), &b);
        assert!(pta.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_involution_and_full_transpose() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let w = M::from_fn(9, 9, |r, c_| c((r * 7 % 5) as f64, (c_ * 3 % 4) as f64 - 1.5));
        let twice = partial_transpose(
            &partial_transpose(&w, dims, Side::A).unwrap(),
            dims,
            Side::A,
        )
        .unwrap();
        assert!(twice.sub(&w).max_abs() == 0.0);
        // PT_A ∘ PT_B = full transpose
        let both = partial_transpose(
            &partial_transpose(&w, dims, Side::B).unwrap(),
            dims,
            Side::A,
        )
        .unwrap();
        assert!(both.sub(&w.transpose()).max_abs() == 0.0);
    }

    #[test]
    fn partial_transpose_dimension_mismatch() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let w = M::identity(5);
        assert!(partial_transpose(&w, dims, Side::B).is_err());
    }

    #[test]
    fn rejects_nonfinite_entries() {
        let bad = vec![c(f64::NAN, 0.0)];
        assert!(M::new(1, 1, bad).is_err());
    }

    #[test]
    fn bipartite_dims_validation() {
        assert!(BipartiteDims::new(1, 3).is_err());
        assert!(BipartiteDims::new(2, 2).is_ok());
    }
}
