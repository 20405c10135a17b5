//! Positive linear maps in elementary-operator form: the Φ^(n,k) family,
//! Choi–Jamiołkowski conversion, positivity scanning and the local
//! coefficient machinery behind the contractivity test.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, hermitian_spectrum, inner, least_norm_solve, normalize, operator_norm, tensor,
    BipartiteDims, ComplexMatrix,
};
use crate::rng;
use crate::scalar::{real, Scalar};

/// Eigenvalues with |λ| at or below this are dropped when a Choi matrix is
/// split into map terms, to avoid spurious near-zero terms.
pub const CHOI_EIGENVALUE_CUTOFF: f64 = 1e-12;
/// Scan minima above this are reported as consistent with a positive map.
pub const POSITIVITY_SCAN_TOL: f64 = 1e-9;
/// See-saw stops when the objective changes by less than this.
pub const SEESAW_CONVERGENCE_TOL: f64 = 1e-12;
/// See-saw iteration cap per restart.
pub const SEESAW_MAX_ITERATIONS: usize = 500;
/// Residual bound for a successful local-coefficient solve, scaled by (1+‖probe‖).
pub const COEFFICIENT_RESIDUAL_TOL: f64 = 1e-9;

/// A linear map X ↦ Σ C_i X C_i† − Σ D_j X D_j† given by its term lists.
#[derive(Clone, Debug)]
pub struct ElementaryMap<F: Scalar> {
    in_dim: usize,
    out_dim: usize,
    plus_terms: Vec<ComplexMatrix<F>>,
    minus_terms: Vec<ComplexMatrix<F>>,
}

impl<F: Scalar> ElementaryMap<F> {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        plus_terms: Vec<ComplexMatrix<F>>,
        minus_terms: Vec<ComplexMatrix<F>>,
    ) -> Result<Self> {
        if in_dim < 2 || out_dim < 2 {
            return Err(Error::InvalidDims(
                "map dimensions must be at least 2".into(),
            ));
        }
        if plus_terms.is_empty() {
            return Err(Error::Invalid("plus_terms must be nonempty".into()));
        }
        for t in plus_terms.iter().chain(&minus_terms) {
            if t.rows() != out_dim || t.cols() != in_dim {
                return Err(Error::DimensionMismatch(format!(
                    "map terms must be {}x{}, got {}x{}",
                    out_dim,
                    in_dim,
                    t.rows(),
                    t.cols()
                )));
            }
        }
        Ok(Self {
            in_dim,
            out_dim,
            plus_terms,
            minus_terms,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn plus_terms(&self) -> &[ComplexMatrix<F>] {
        &self.plus_terms
    }

    pub fn minus_terms(&self) -> &[ComplexMatrix<F>] {
        &self.minus_terms
    }
}

/// Parameters (n, k) of the map family; π^k(i) = (i + k) mod n on 0-based
/// indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    n: usize,
    k: usize,
}

impl FamilySpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 || k == 0 || k >= n {
            return Err(Error::InvalidFamily { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// π^k on 0-based indices.
    #[inline]
    pub fn permuted(&self, i: usize) -> usize {
        (i + self.k) % self.n
    }

    /// Inverse shift, 0-based.
    #[inline]
    pub fn permuted_inv(&self, i: usize) -> usize {
        (i + self.n - self.k) % self.n
    }

    /// True when k = n/2, the decomposable (and non-optimal) case.
    pub fn is_half(&self) -> bool {
        self.n % 2 == 0 && self.k == self.n / 2
    }
}

/// The map Φ^(n,k)(A) = (n−1) Σ E_ii A E_ii + Σ E_{i,π^k(i)} A E_{π^k(i),i} − A
/// in elementary form: 2n plus-terms and the single minus-term I_n.
pub fn phi_nk<F: Scalar>(spec: FamilySpec) -> ElementaryMap<F> {
    let n = spec.n();
    let root = real::<F>((n as f64 - 1.0).sqrt());
    let mut plus = Vec::with_capacity(2 * n);
    for i in 0..n {
        plus.push(ComplexMatrix::basis(n, i, i).scale_re(root));
    }
    for i in 0..n {
        plus.push(ComplexMatrix::basis(n, i, spec.permuted(i)));
    }
    let minus = vec![ComplexMatrix::identity(n)];
    ElementaryMap::new(n, n, plus, minus).expect("family terms are well formed")
}

/// Apply the map to a square matrix.
pub fn apply_map<F: Scalar>(
    phi: &ElementaryMap<F>,
    x: &ComplexMatrix<F>,
) -> Result<ComplexMatrix<F>> {
    if x.rows() != phi.in_dim() || x.cols() != phi.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "map expects {0}x{0} input, got {1}x{2}",
            phi.in_dim(),
            x.rows(),
            x.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(phi.out_dim(), phi.out_dim());
    for c in phi.plus_terms() {
        out.add_assign(&c.matmul(x).matmul(&c.dagger()));
    }
    for d in phi.minus_terms() {
        let term = d.matmul(x).matmul(&d.dagger());
        out = out.sub(&term);
    }
    Ok(out)
}

/// Choi matrix Σ_ij E_ij ⊗ Φ(E_ij) with its bipartite dimensions.
pub fn map_to_choi<F: Scalar>(phi: &ElementaryMap<F>) -> (ComplexMatrix<F>, BipartiteDims) {
    let n = phi.in_dim();
    let m = phi.out_dim();
    let dims = BipartiteDims::new(n, m).expect("map dims are at least 2");
    let mut w = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = apply_map(phi, &ComplexMatrix::basis(n, i, j))
                .expect("basis matrix has the map's input shape");
            for a in 0..m {
                for b in 0..m {
                    w[(dims.index(i, a), dims.index(j, b))] = block[(a, b)];
                }
            }
        }
    }
    (w, dims)
}

/// Reshape a composite A-major vector into the m×n operator it encodes:
/// mat(v)[a, i] = v[i·m + a], so that |v⟩⟨v| is the Choi matrix of
/// X ↦ mat(v) X mat(v)†.
pub fn vector_to_operator<F: Scalar>(v: &[Complex<F>], dims: BipartiteDims) -> ComplexMatrix<F> {
    let n = dims.dim_a();
    let m = dims.dim_b();
    assert_eq!(v.len(), n * m);
    ComplexMatrix::from_fn(m, n, |a, i| v[dims.index(i, a)])
}

/// Spectral split of a Hermitian Choi matrix into map terms: eigenpairs with
/// λ > cutoff become plus-terms √λ·mat(v), those with λ < −cutoff become
/// minus-terms √|λ|·mat(v).
pub fn choi_to_map<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
) -> Result<ElementaryMap<F>> {
    let spec = hermitian_spectrum(w)?;
    let cutoff = real::<F>(CHOI_EIGENVALUE_CUTOFF);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (lam, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if lam.abs() <= cutoff {
            continue;
        }
        let op = vector_to_operator(v, dims).scale_re(lam.abs().sqrt());
        if *lam > F::zero() {
            plus.push(op);
        } else {
            minus.push(op);
        }
    }
    if plus.is_empty() {
        // Entirely negative (or zero) operator; keep the contract by storing
        // a zero plus-term.
        plus.push(ComplexMatrix::zeros(dims.dim_b(), dims.dim_a()));
    }
    ElementaryMap::new(dims.dim_a(), dims.dim_b(), plus, minus)
}

/// Outcome of a multistart positivity scan.
#[derive(Clone, Debug)]
pub struct ScanReport<F: Scalar> {
    pub min_value: F,
    pub argmin_x: Vec<Complex<F>>,
    pub argmin_y: Vec<Complex<F>>,
    pub restarts_used: usize,
    pub converged_iterations: Vec<usize>,
    /// min_value ≥ −1e−9: no violation found at this budget.
    pub consistent_with_positive: bool,
}

/// One see-saw run from a given x start. Returns the objective trajectory
/// (one entry per half-step) with the final minimizing pair.
pub fn scan_run<F: Scalar>(
    phi: &ElementaryMap<F>,
    x0: &[Complex<F>],
) -> (Vec<F>, Vec<Complex<F>>, Vec<Complex<F>>) {
    let mut x = normalize(x0);
    let mut y = basis_vector(phi.out_dim(), 0);
    let mut trajectory = Vec::new();
    let tol = real::<F>(SEESAW_CONVERGENCE_TOL);
    let mut prev: Option<F> = None;
    for _ in 0..SEESAW_MAX_ITERATIONS {
        // Optimal y for fixed x: ground state of Φ(|x⟩⟨x|).
        let a_x = image_matrix(phi, &x);
        let spec = crate::linalg::hermitian_spectrum_with_tol(&a_x, real(1e-8))
            .expect("image of a rank-one projector is Hermitian");
        y = spec.min_vector().to_vec();
        trajectory.push(spec.min());
        // Optimal x for fixed y: ground state of Σ C†yy†C − Σ D†yy†D.
        let b_y = pullback_matrix(phi, &y);
        let spec = crate::linalg::hermitian_spectrum_with_tol(&b_y, real(1e-8))
            .expect("pullback matrix is Hermitian");
        x = spec.min_vector().to_vec();
        let val = spec.min();
        trajectory.push(val);
        if let Some(p) = prev {
            if (p - val).abs() < tol {
                break;
            }
        }
        prev = Some(val);
    }
    (trajectory, x, y)
}

/// Φ(|x⟩⟨x|) assembled from term images, m×m Hermitian.
fn image_matrix<F: Scalar>(phi: &ElementaryMap<F>, x: &[Complex<F>]) -> ComplexMatrix<F> {
    let m = phi.out_dim();
    let mut out = ComplexMatrix::zeros(m, m);
    for c in phi.plus_terms() {
        let u = c.apply(x);
        out.add_assign(&ComplexMatrix::outer(&u, &u));
    }
    for d in phi.minus_terms() {
        let u = d.apply(x);
        out = out.sub(&ComplexMatrix::outer(&u, &u));
    }
    out
}

/// Σ C_i†|y⟩⟨y|C_i − Σ D_j†|y⟩⟨y|D_j, n×n Hermitian.
fn pullback_matrix<F: Scalar>(phi: &ElementaryMap<F>, y: &[Complex<F>]) -> ComplexMatrix<F> {
    let n = phi.in_dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for c in phi.plus_terms() {
        let u = c.dagger().apply(y);
        out.add_assign(&ComplexMatrix::outer(&u, &u));
    }
    for d in phi.minus_terms() {
        let u = d.dagger().apply(y);
        out = out.sub(&ComplexMatrix::outer(&u, &u));
    }
    out
}

/// Structured + seeded-random x starts shared by the scan and the witness
/// block minimization: computational basis, random-phase vectors (the known
/// zero family), modulus ramps, then normalized complex Gaussians.
pub(crate) fn seesaw_starts<F: Scalar>(
    dim: usize,
    budget: usize,
    seed: u64,
) -> Vec<Vec<Complex<F>>> {
    let mut starts: Vec<Vec<Complex<F>>> = Vec::with_capacity(budget);
    for i in 0..dim.min(budget) {
        starts.push(basis_vector(dim, i));
    }
    let mut idx = 0u64;
    // Random-phase unimodular vectors.
    while starts.len() < budget.min(dim + dim.max(4)) {
        let mut r = rng::stream(seed, 1_000 + idx);
        idx += 1;
        let th = rng::phases::<F>(&mut r, dim);
        starts.push(normalize(
            &th.iter()
                .map(|&t| Complex::from_polar(F::one(), t))
                .collect::<Vec<_>>(),
        ));
    }
    // Modulus ramps with random phases: geometric profiles rotated through
    // every index, the shapes where boundary violations concentrate.
    let ramp_levels = [1e1, 1e3];
    'ramps: for (li, &level) in ramp_levels.iter().enumerate() {
        for s in 0..dim {
            if starts.len() >= budget {
                break 'ramps;
            }
            let mut r = rng::stream(seed, 2_000 + (li * dim + s) as u64);
            let th = rng::phases::<F>(&mut r, dim);
            let v: Vec<Complex<F>> = (0..dim)
                .map(|i| {
                    let pos = (i + dim - s) % dim;
                    let modulus = real::<F>(level).powi(pos as i32);
                    Complex::from_polar(modulus, th[i])
                })
                .collect();
            starts.push(normalize(&v));
        }
    }
    let mut i = 0u64;
    while starts.len() < budget {
        let mut r = rng::stream(seed, 3_000 + i);
        i += 1;
        starts.push(rng::unit_vector(&mut r, dim));
    }
    starts
}

/// Multistart see-saw minimization of ⟨y|Φ(|x⟩⟨x|)|y⟩ over unit vectors.
pub fn positivity_scan<F: Scalar>(
    phi: &ElementaryMap<F>,
    budget: usize,
    seed: u64,
) -> ScanReport<F> {
    let budget = budget.max(1);
    let starts = seesaw_starts(phi.in_dim(), budget, seed);
    let runs: Vec<(Vec<F>, Vec<Complex<F>>, Vec<Complex<F>>)> = starts
        .par_iter()
        .map(|x0| scan_run(phi, x0))
        .collect();
    let mut best: Option<(F, usize)> = None;
    let mut iterations = Vec::with_capacity(runs.len());
    for (i, (traj, _, _)) in runs.iter().enumerate() {
        let val = *traj.last().unwrap();
        iterations.push(traj.len().div_ceil(2));
        let better = match best {
            None => true,
            Some((b, _)) => val < b,
        };
        if better {
            best = Some((val, i));
        }
    }
    let (min_value, at) = best.unwrap();
    ScanReport {
        min_value,
        argmin_x: runs[at].1.clone(),
        argmin_y: runs[at].2.clone(),
        restarts_used: runs.len(),
        converged_iterations: iterations,
        consistent_with_positive: min_value >= -real::<F>(POSITIVITY_SCAN_TOL),
    }
}

/// Minimum-norm local coefficients of `targets` against `basis` at `probe`.
#[derive(Clone, Debug)]
pub struct CoefficientSolve<F: Scalar> {
    /// One row per target: target_j·probe = Σ_i alpha[j][i]·(basis_i·probe).
    pub alpha: ComplexMatrix<F>,
    pub probe: Vec<Complex<F>>,
    /// Norm of the stacked constraint violation; above tolerance means the
    /// targets are not a locally linear combination of the basis here.
    pub residual: F,
    /// ‖FF†‖ of the coefficient matrix.
    pub gram_norm: F,
}

impl<F: Scalar> CoefficientSolve<F> {
    pub fn is_feasible(&self) -> bool {
        let probe_norm = crate::linalg::norm(&self.probe);
        self.residual <= real::<F>(COEFFICIENT_RESIDUAL_TOL) * (F::one() + probe_norm)
    }
}

pub fn local_coefficients<F: Scalar>(
    targets: &[ComplexMatrix<F>],
    basis: &[ComplexMatrix<F>],
    probe: &[Complex<F>],
) -> Result<CoefficientSolve<F>> {
    if crate::linalg::norm(probe) == F::zero() {
        return Err(Error::ZeroProbe);
    }
    let k = basis.len();
    let m = basis[0].rows();
    let mut b = ComplexMatrix::zeros(m, k);
    for (col, term) in basis.iter().enumerate() {
        let img = term.apply(probe);
        for (r, &z) in img.iter().enumerate() {
            b[(r, col)] = z;
        }
    }
    let mut alpha = ComplexMatrix::zeros(targets.len(), k);
    let mut res_sq = F::zero();
    for (row, target) in targets.iter().enumerate() {
        let t = target.apply(probe);
        let sol = least_norm_solve(&b, &t);
        for (c, &z) in sol.solution.iter().enumerate() {
            alpha[(row, c)] = z;
        }
        res_sq = res_sq + sol.residual * sol.residual;
    }
    let gram_norm = {
        let s = operator_norm(&alpha);
        s * s
    };
    Ok(CoefficientSolve {
        alpha,
        probe: probe.to_vec(),
        residual: res_sq.sqrt(),
        gram_norm,
    })
}

/// Stack the minimum-norm coefficients of every minus-term and of the
/// candidate (each computed independently) and return ‖FF†‖. A value above 1
/// at any probe certifies that X ↦ Φ(X) − C X C† is not positive. Returns
/// +∞ when some row is not even a locally linear combination at the probe.
///
/// With a single minus-term this is the two-row test; more minus-terms stack
/// naturally but extend past the single-subtraction analysis, so the result
/// is flagged as an extrapolation.
pub struct FmatrixOutcome<F: Scalar> {
    pub gram_norm: F,
    pub extrapolated: bool,
}

pub fn fmatrix_gram_norm<F: Scalar>(
    phi: &ElementaryMap<F>,
    candidate: &ComplexMatrix<F>,
    probe: &[Complex<F>],
) -> Result<FmatrixOutcome<F>> {
    if let Some(index) = probe.iter().position(|z| z.norm() == F::zero()) {
        return Err(Error::ZeroProbeEntry { index });
    }
    if candidate.rows() != phi.out_dim() || candidate.cols() != phi.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "candidate must be {}x{}",
            phi.out_dim(),
            phi.in_dim()
        )));
    }
    let mut targets: Vec<ComplexMatrix<F>> = phi.minus_terms().to_vec();
    let extrapolated = targets.len() > 1;
    targets.push(candidate.clone());
    let solve = local_coefficients(&targets, phi.plus_terms(), probe)?;
    let gram_norm = if solve.is_feasible() {
        solve.gram_norm
    } else {
        F::infinity()
    };
    Ok(FmatrixOutcome {
        gram_norm,
        extrapolated,
    })
}

/// Closed-form minimum-norm coefficients (α, β) of the identity against the
/// Φ^(n,1) plus-terms at a probe with nonzero entries:
/// α_i = √(n−1)·r_i/(1+(n−1)r_i) and
/// β_i = √r_i·e^{i(θ_i−θ_{i+1})}/(1+(n−1)r_i), r_i = |x_i/x_{i+1}|².
pub fn closed_form_coeffs_phi_n1<F: Scalar>(
    n: usize,
    probe: &[Complex<F>],
) -> Result<(Vec<Complex<F>>, Vec<Complex<F>>)> {
    if n < 3 {
        return Err(Error::InvalidFamily { n, k: 1 });
    }
    if probe.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "probe must have length {n}"
        )));
    }
    if let Some(index) = probe.iter().position(|z| z.norm() == F::zero()) {
        return Err(Error::ZeroProbeEntry { index });
    }
    let nm1 = real::<F>(n as f64 - 1.0);
    let root = nm1.sqrt();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for i in 0..n {
        let xi = probe[i];
        let xn = probe[(i + 1) % n];
        let r = xi.norm_sqr() / xn.norm_sqr();
        let den = F::one() + nm1 * r;
        alpha.push(Complex::new(root * r / den, F::zero()));
        let phase = (xi / xn) / Complex::new((xi / xn).norm(), F::zero());
        beta.push(phase * Complex::new(r.sqrt() / den, F::zero()));
    }
    Ok((alpha, beta))
}

/// Closed-form two-row F-matrix gram norm for the Φ^(n,k) basis, stable at
/// probes with extreme modulus ratios where the generic least-norm route
/// loses the small rows. Row 1 carries the identity coefficients, row 2 the
/// candidate's; both are the exact per-row minimum-norm solutions.
pub fn family_fmatrix_gram_norm<F: Scalar>(
    spec: FamilySpec,
    candidate: &ComplexMatrix<F>,
    probe: &[Complex<F>],
) -> Result<F> {
    let n = spec.n();
    if probe.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "probe must have length {n}"
        )));
    }
    if let Some(index) = probe.iter().position(|z| z.norm() == F::zero()) {
        return Err(Error::ZeroProbeEntry { index });
    }
    if candidate.rows() != n || candidate.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "candidate must be {n}x{n}"
        )));
    }
    let nm1 = real::<F>(n as f64 - 1.0);
    let root = nm1.sqrt();
    let t = candidate.apply(probe);
    // Gram accumulators for the 2x2 FF†.
    let mut g11 = F::zero();
    let mut g22 = F::zero();
    let mut g12 = Complex::<F>::zero();
    for i in 0..n {
        let xi = probe[i];
        let xp = probe[spec.permuted(i)];
        let den = nm1 * xi.norm_sqr() + xp.norm_sqr();
        // row 1: identity target (t_i = x_i)
        let a1 = xi.conj() * xi * Complex::new(root / den, F::zero());
        let b1 = xp.conj() * xi / Complex::new(den, F::zero());
        // row 2: candidate target
        let a2 = xi.conj() * t[i] * Complex::new(root / den, F::zero());
        let b2 = xp.conj() * t[i] / Complex::new(den, F::zero());
        g11 = g11 + a1.norm_sqr() + b1.norm_sqr();
        g22 = g22 + a2.norm_sqr() + b2.norm_sqr();
        g12 = g12 + a1 * a2.conj() + b1 * b2.conj();
    }
    // Largest eigenvalue of [[g11, g12], [conj g12, g22]].
    let half_tr = (g11 + g22) * real::<F>(0.5);
    let half_diff = (g11 - g22) * real::<F>(0.5);
    Ok(half_tr + (half_diff * half_diff + g12.norm_sqr()).sqrt())
}

/// Kronecker assembly of the unnormalized witness of a map (Choi matrix) by
/// explicit tensor products; used as an independent route in tests.
pub fn assemble_choi_by_tensor<F: Scalar>(phi: &ElementaryMap<F>) -> ComplexMatrix<F> {
    let n = phi.in_dim();
    let m = phi.out_dim();
    let mut w = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let eij = ComplexMatrix::basis(n, i, j);
            let img = apply_map(phi, &eij).unwrap();
            w.add_assign(&tensor(&eij, &img));
        }
    }
    w
}
