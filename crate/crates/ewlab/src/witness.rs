//! Entanglement-witness objects: axiom validation, block-positivity search,
//! state detection, normalization, structural physical approximation and the
//! SPA separability certificate.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, hermitian_spectrum, normalize as normalize_vec, partial_transpose, BipartiteDims,
    ComplexMatrix, Side,
};
use crate::posmaps::{map_to_choi, phi_nk, seesaw_starts, FamilySpec};
use crate::scalar::{real, Scalar};

/// Witness hermiticity tolerance, scaled by (1 + max entry).
pub const WITNESS_HERMITICITY_TOL: f64 = 1e-10;
/// An eigenvalue below −1e−10 counts as genuinely negative.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
/// Block-minimum acceptance threshold, scaled by (1 + max entry): values
/// above it are boundary zeros, values below are genuine violations.
pub const BLOCK_POSITIVITY_TOL: f64 = 1e-9;
/// PSD / PPT tolerance on states and certificate blocks.
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Residual bound for the SPA separability reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// A bipartite Hermitian operator with its subsystem dimensions.
#[derive(Clone, Debug)]
pub struct Witness<F: Scalar> {
    matrix: ComplexMatrix<F>,
    dims: BipartiteDims,
    normalized: bool,
    family: Option<FamilySpec>,
}

impl<F: Scalar> Witness<F> {
    pub fn new(matrix: ComplexMatrix<F>, dims: BipartiteDims) -> Result<Self> {
        if matrix.rows() != dims.composite() || matrix.cols() != dims.composite() {
            return Err(Error::InvalidDims(format!(
                "witness matrix is {}x{}, dims require {}",
                matrix.rows(),
                matrix.cols(),
                dims.composite()
            )));
        }
        let asym = matrix.max_asymmetry();
        if asym > real::<F>(WITNESS_HERMITICITY_TOL) * (F::one() + matrix.max_abs()) {
            return Err(Error::NotHermitian {
                max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = matrix.trace();
        let normalized = (tr.re - F::one()).abs() <= real(1e-12) && tr.im.abs() <= real(1e-12);
        Ok(Self {
            matrix,
            dims,
            normalized,
            family: None,
        })
    }

    /// Unnormalized family witness W_Φ for Φ^(n,k), tagged with its family.
    pub fn from_family(spec: FamilySpec) -> Self {
        let (matrix, dims) = map_to_choi(&phi_nk::<F>(spec));
        let mut w = Self::new(matrix, dims).expect("family Choi matrix is Hermitian");
        w.family = Some(spec);
        w
    }

    pub fn matrix(&self) -> &ComplexMatrix<F> {
        &self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn family(&self) -> Option<FamilySpec> {
        self.family
    }

    pub fn with_family(mut self, family: Option<FamilySpec>) -> Self {
        self.family = family;
        self
    }

    /// Block-minimum acceptance threshold for this witness.
    pub fn block_tolerance(&self) -> F {
        real::<F>(BLOCK_POSITIVITY_TOL) * (F::one() + self.matrix.max_abs())
    }
}

/// Outcome of the multistart product-state minimization of ⟨x⊗y|W|x⊗y⟩.
#[derive(Clone, Debug)]
pub struct BlockPositivityReport<F: Scalar> {
    pub min_value: F,
    pub argmin_x: Vec<Complex<F>>,
    pub argmin_y: Vec<Complex<F>>,
    pub restarts_used: usize,
    pub converged_iterations: Vec<usize>,
}

/// M_x[a,b] = Σ_ij x̄_i x_j W[(i,a),(j,b)], the B-side contraction.
pub(crate) fn contract_a<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
    x: &[Complex<F>],
) -> ComplexMatrix<F> {
    let n = dims.dim_a();
    let m = dims.dim_b();
    let mut out = ComplexMatrix::zeros(m, m);
    for i in 0..n {
        let xi = x[i].conj();
        if xi.is_zero() {
            continue;
        }
        for j in 0..n {
            let coef = xi * x[j];
            if coef.is_zero() {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    out[(a, b)] = out[(a, b)] + coef * w[(dims.index(i, a), dims.index(j, b))];
                }
            }
        }
    }
    out
}

/// N_y[i,j] = Σ_ab ȳ_a y_b W[(i,a),(j,b)], the A-side contraction.
pub(crate) fn contract_b<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
    y: &[Complex<F>],
) -> ComplexMatrix<F> {
    let n = dims.dim_a();
    let m = dims.dim_b();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..m {
        let ya = y[a].conj();
        if ya.is_zero() {
            continue;
        }
        for b in 0..m {
            let coef = ya * y[b];
            if coef.is_zero() {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + coef * w[(dims.index(i, a), dims.index(j, b))];
                }
            }
        }
    }
    out
}

/// Single see-saw run from an x start; returns the half-step objective
/// trajectory and the final product pair.
pub fn block_run<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
    x0: &[Complex<F>],
) -> (Vec<F>, Vec<Complex<F>>, Vec<Complex<F>>) {
    let mut x = normalize_vec(x0);
    let mut y = basis_vector(dims.dim_b(), 0);
    let mut trajectory = Vec::new();
    let tol = real::<F>(crate::posmaps::SEESAW_CONVERGENCE_TOL);
    let mut prev: Option<F> = None;
    for _ in 0..crate::posmaps::SEESAW_MAX_ITERATIONS {
        let mx = contract_a(w, dims, &x).hermitize();
        let spec = crate::linalg::hermitian_spectrum_with_tol(&mx, real(1e-6))
            .expect("contraction of a Hermitian operator is Hermitian");
        y = spec.min_vector().to_vec();
        trajectory.push(spec.min());
        let ny = contract_b(w, dims, &y).hermitize();
        let spec = crate::linalg::hermitian_spectrum_with_tol(&ny, real(1e-6))
            .expect("contraction of a Hermitian operator is Hermitian");
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

/// Multistart block minimization with the standard structured + random starts.
pub fn block_min<F: Scalar>(w: &Witness<F>, budget: usize, seed: u64) -> BlockPositivityReport<F> {
    block_min_with_starts(w.matrix(), w.dims(), budget, seed, &[])
}

/// Same, with caller-supplied warm starts evaluated first (used by the
/// subtraction search to reuse violating product vectors across bisection
/// steps). Deterministic given (inputs, seed).
pub fn block_min_with_starts<F: Scalar>(
    w: &ComplexMatrix<F>,
    dims: BipartiteDims,
    budget: usize,
    seed: u64,
    warm_starts: &[Vec<Complex<F>>],
) -> BlockPositivityReport<F> {
    let budget = budget.max(1);
    let mut starts: Vec<Vec<Complex<F>>> = warm_starts.to_vec();
    starts.extend(seesaw_starts(dims.dim_a(), budget, seed));
    let runs: Vec<(Vec<F>, Vec<Complex<F>>, Vec<Complex<F>>)> = starts
        .par_iter()
        .map(|x0| block_run(w, dims, x0))
        .collect();
    let mut best: Option<(F, usize)> = None;
    let mut iterations = Vec::with_capacity(runs.len());
    for (i, (traj, _, _)) in runs.iter().enumerate() {
        let val = *traj.last().unwrap();
        iterations.push(traj.len().div_ceil(2));
        if best.map_or(true, |(b, _)| val < b) {
            best = Some((val, i));
        }
    }
    let (min_value, at) = best.unwrap();
    BlockPositivityReport {
        min_value,
        argmin_x: runs[at].1.clone(),
        argmin_y: runs[at].2.clone(),
        restarts_used: runs.len(),
        converged_iterations: iterations,
    }
}

/// Per-axiom witness validation: (a) hermiticity, (b) a negative eigenvalue,
/// (c) block positivity within tolerance.
#[derive(Clone, Debug)]
pub struct ValidationReport<F: Scalar> {
    pub hermitian: bool,
    pub max_asymmetry: F,
    pub min_eigenvalue: F,
    pub has_negative_eigenvalue: bool,
    pub block_positive: bool,
    pub block_report: BlockPositivityReport<F>,
    pub is_witness: bool,
}

pub fn validate_witness<F: Scalar>(
    w: &Witness<F>,
    budget: usize,
    seed: u64,
) -> ValidationReport<F> {
    let asym = w.matrix().max_asymmetry();
    let hermitian =
        asym <= real::<F>(WITNESS_HERMITICITY_TOL) * (F::one() + w.matrix().max_abs());
    let min_eigenvalue = w.matrix().min_eigenvalue();
    let has_negative_eigenvalue = min_eigenvalue < -real::<F>(NEGATIVE_EIGENVALUE_TOL);
    let block_report = block_min(w, budget, seed);
    let block_positive = block_report.min_value >= -w.block_tolerance();
    ValidationReport {
        hermitian,
        max_asymmetry: asym,
        min_eigenvalue,
        has_negative_eigenvalue,
        block_positive,
        is_witness: hermitian && has_negative_eigenvalue && block_positive,
        block_report,
    }
}

/// Tr(Wρ); negative means ρ is detected.
pub fn detects<F: Scalar>(w: &Witness<F>, rho: &ComplexMatrix<F>) -> Result<F> {
    let d = w.dims().composite();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::InvalidState(format!(
            "state is {}x{}, witness needs {d}x{d}",
            rho.rows(),
            rho.cols()
        )));
    }
    let tol = real::<F>(STATE_PSD_TOL);
    if (rho.trace().re - F::one()).abs() > tol || rho.trace().im.abs() > tol {
        return Err(Error::InvalidState("state trace must be 1".into()));
    }
    if !rho.is_hermitian(tol) {
        return Err(Error::InvalidState("state must be Hermitian".into()));
    }
    let min = rho.min_eigenvalue();
    if min < -tol * (F::one() + rho.max_abs()) {
        return Err(Error::InvalidState(format!(
            "state must be PSD, min eigenvalue {min}"
        )));
    }
    Ok(w.matrix().hs_inner_re(rho))
}

/// Divide by the (positive) trace and set the normalized flag.
pub fn normalize<F: Scalar>(w: &Witness<F>) -> Result<Witness<F>> {
    let tr = w.matrix().trace().re;
    if tr <= F::zero() {
        return Err(Error::NonPositiveTrace {
            trace: tr.to_f64().unwrap_or(f64::NAN),
        });
    }
    if w.is_normalized() {
        return Ok(w.clone());
    }
    let matrix = w.matrix().scale_re(tr.recip());
    let mut out = Witness::new(matrix, w.dims())?;
    out.normalized = true;
    out.family = w.family;
    Ok(out)
}

/// Structural physical approximation of a normalized witness.
#[derive(Clone, Debug)]
pub struct SpaResult<F: Scalar> {
    /// |minimum eigenvalue| of the normalized witness.
    pub lambda: F,
    /// Boundary mixing weight 1/(1 + dimA·dimB·λ).
    pub p_star: F,
    /// (1−p*)·I/(nm) + p*·W, PSD with minimum eigenvalue 0 by construction.
    pub spa_state: ComplexMatrix<F>,
    pub spa_min_eigenvalue: F,
    pub ppt: bool,
    pub min_pt_eigenvalue: F,
}

pub fn spa<F: Scalar>(w: &Witness<F>, budget: usize, seed: u64) -> Result<SpaResult<F>> {
    if !w.is_normalized() {
        return Err(Error::Invalid(
            "SPA is defined for normalized witnesses; normalize first".into(),
        ));
    }
    let validation = validate_witness(w, budget, seed);
    if !validation.has_negative_eigenvalue {
        return Err(Error::NotAWitness(
            "no negative eigenvalue, SPA of a positive operator is itself".into(),
        ));
    }
    if !validation.block_positive {
        return Err(Error::NotAWitness(format!(
            "block minimum {} below tolerance",
            validation.block_report.min_value
        )));
    }
    let lambda = -validation.min_eigenvalue;
    let nm = real::<F>(w.dims().composite() as f64);
    let p_star = (F::one() + nm * lambda).recip();
    let noise = ComplexMatrix::identity(w.dims().composite()).scale_re((F::one() - p_star) / nm);
    let spa_state = noise.add(&w.matrix().scale_re(p_star));
    let spa_min_eigenvalue = spa_state.min_eigenvalue();
    let pt = partial_transpose(&spa_state, w.dims(), Side::B)?;
    let min_pt_eigenvalue = pt.min_eigenvalue();
    Ok(SpaResult {
        lambda,
        p_star,
        spa_state,
        spa_min_eigenvalue,
        ppt: min_pt_eigenvalue >= -real::<F>(STATE_PSD_TOL),
        min_pt_eigenvalue,
    })
}

/// PPT verdict from the side-B partial transpose spectrum.
#[derive(Clone, Copy, Debug)]
pub struct PptReport<F: Scalar> {
    pub ppt: bool,
    pub min_pt_eigenvalue: F,
}

pub fn ppt_check<F: Scalar>(rho: &ComplexMatrix<F>, dims: BipartiteDims) -> Result<PptReport<F>> {
    if !rho.is_hermitian(real(WITNESS_HERMITICITY_TOL)) {
        return Err(Error::NotHermitian {
            max_asymmetry: rho.max_asymmetry().to_f64().unwrap_or(f64::NAN),
        });
    }
    let pt = partial_transpose(rho, dims, Side::B)?;
    let min = pt.min_eigenvalue();
    Ok(PptReport {
        ppt: min >= -real::<F>(STATE_PSD_TOL),
        min_pt_eigenvalue: min,
    })
}

/// One two-qubit piece of the SPA decomposition, supported on
/// span{|i⟩,|j⟩}⊗span{|i⟩,|j⟩}.
#[derive(Clone, Debug)]
pub struct CertificateBlock<F: Scalar> {
    /// Index pair (i, j), i < j, 0-based.
    pub support: (usize, usize),
    /// 4×4 block on the ordered basis (ii, ij, ji, jj).
    pub block: ComplexMatrix<F>,
    pub min_eigenvalue: F,
    pub min_pt_eigenvalue: F,
    pub ppt_ok: bool,
}

/// Block-wise separable decomposition evidence for the SPA state.
#[derive(Clone, Debug)]
pub struct SeparabilityCertificate<F: Scalar> {
    pub spec: FamilySpec,
    pub p_star: F,
    /// Classical weights on product basis pairs (i, j) (0-based).
    pub diagonal_part: Vec<(F, (usize, usize))>,
    pub blocks: Vec<CertificateBlock<F>>,
    pub reconstruction_residual: F,
}

impl<F: Scalar> SeparabilityCertificate<F> {
    pub fn all_blocks_ok(&self) -> bool {
        self.blocks.iter().all(|b| b.ppt_ok)
    }
}

/// Decompose the SPA state of W^(n,k) into a classical diagonal part plus
/// PSD+PPT two-qubit blocks. Couplings only ever connect |ii⟩ with |jj⟩, so
/// the blocks are read off pairwise from the computed state; every weight is
/// re-derived from the matrix rather than taken from any term list.
pub fn spa_separability_certificate<F: Scalar>(
    spec: FamilySpec,
) -> Result<SeparabilityCertificate<F>> {
    if spec.is_half() {
        return Err(Error::Invalid(format!(
            "k = n/2 witness is not in the separable-SPA regime (n={}, k={})",
            spec.n(),
            spec.k()
        )));
    }
    let w = normalize(&Witness::<F>::from_family(spec))?;
    let result = spa(&w, 16, 1)?;
    certificate_from_state(spec, result.p_star, &result.spa_state)
}

fn certificate_from_state<F: Scalar>(
    spec: FamilySpec,
    p_star: F,
    state: &ComplexMatrix<F>,
) -> Result<SeparabilityCertificate<F>> {
    let n = spec.n();
    let dims = BipartiteDims::new(n, n)?;
    let idx = |i: usize, j: usize| dims.index(i, j);
    let psd_tol = real::<F>(STATE_PSD_TOL);

    let mut blocks = Vec::new();
    let mut consumed_diag = vec![F::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let coupling = state[(idx(i, i), idx(j, j))];
            if coupling.norm() <= real(1e-14) {
                continue;
            }
            let c = coupling.norm();
            // (|ii⟩ ± |jj⟩)-type rank-one on the diagonal pair, padded with
            // |ij⟩, |ji⟩ weight so the partial transpose stays PSD.
            let mut block = ComplexMatrix::zeros(4, 4);
            block[(0, 0)] = Complex::new(c, F::zero());
            block[(3, 3)] = Complex::new(c, F::zero());
            block[(0, 3)] = coupling;
            block[(3, 0)] = coupling.conj();
            block[(1, 1)] = Complex::new(c, F::zero());
            block[(2, 2)] = Complex::new(c, F::zero());
            consumed_diag[idx(i, i)] = consumed_diag[idx(i, i)] + c;
            consumed_diag[idx(j, j)] = consumed_diag[idx(j, j)] + c;
            consumed_diag[idx(i, j)] = consumed_diag[idx(i, j)] + c;
            consumed_diag[idx(j, i)] = consumed_diag[idx(j, i)] + c;

            let min_eigenvalue = block.min_eigenvalue();
            let two_qubit = BipartiteDims::new(2, 2)?;
            let pt = partial_transpose(&block, two_qubit, Side::B)?;
            let min_pt_eigenvalue = pt.min_eigenvalue();
            blocks.push(CertificateBlock {
                support: (i, j),
                block,
                min_eigenvalue,
                min_pt_eigenvalue,
                ppt_ok: min_eigenvalue >= -psd_tol && min_pt_eigenvalue >= -psd_tol,
            });
        }
    }

    // Remaining diagonal mass is the classical part.
    let mut diagonal_part = Vec::new();
    let mut worst_negative = F::zero();
    for i in 0..n {
        for j in 0..n {
            let weight = state[(idx(i, j), idx(i, j))].re - consumed_diag[idx(i, j)];
            if weight.abs() > real(1e-14) {
                diagonal_part.push((weight, (i, j)));
                worst_negative = worst_negative.min(weight);
            }
        }
    }
    if worst_negative < -psd_tol {
        return Err(Error::CertificateFailure {
            residual: worst_negative.abs().to_f64().unwrap_or(f64::NAN),
        });
    }

    // Reconstruct and measure the residual entrywise.
    let mut recon = ComplexMatrix::zeros(n * n, n * n);
    for (weight, (i, j)) in &diagonal_part {
        let at = idx(*i, *j);
        recon[(at, at)] = recon[(at, at)] + Complex::new(*weight, F::zero());
    }
    for blk in &blocks {
        let (i, j) = blk.support;
        let comp = [idx(i, i), idx(i, j), idx(j, i), idx(j, j)];
        for (r, &cr) in comp.iter().enumerate() {
            for (cc, &ccol) in comp.iter().enumerate() {
                recon[(cr, ccol)] = recon[(cr, ccol)] + blk.block[(r, cc)];
            }
        }
    }
    let residual = state.sub(&recon).max_abs();
    if residual > real::<F>(RECONSTRUCTION_TOL) {
        return Err(Error::CertificateFailure {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(SeparabilityCertificate {
        spec,
        p_star,
        diagonal_part,
        blocks,
        reconstruction_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor, tensor_vec};

    type M = ComplexMatrix<f64>;
    type C = Complex<f64>;

    fn family_witness(n: usize, k: usize) -> Witness<f64> {
        Witness::from_family(FamilySpec::new(n, k).unwrap())
    }

    fn normalized(n: usize, k: usize) -> Witness<f64> {
        normalize(&family_witness(n, k)).unwrap()
    }

    #[test]
    fn family_witness_spectrum_values() {
        // Normalized W^(3,1): λ_min = −1/6; unnormalized: −1.
        let w = normalized(3, 1);
        assert!((w.matrix().trace().re - 1.0).abs() < 1e-14);
        let spec = hermitian_spectrum(w.matrix()).unwrap();
        assert!((spec.min() + 1.0 / 6.0).abs() < 1e-12);
        let raw = family_witness(3, 1);
        assert!((raw.matrix().trace().re - 6.0).abs() < 1e-14);
        assert!((hermitian_spectrum(raw.matrix()).unwrap().min() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_min_from_uniform_start_is_zero() {
        let w = normalized(3, 1);
        let s = 1.0 / 3.0f64.sqrt();
        let x0 = vec![C::new(s, 0.0); 3];
        let (traj, x, y) = block_run(w.matrix(), w.dims(), &x0);
        assert!(traj.last().unwrap().abs() < 1e-10);
        let xy = tensor_vec(&x, &y);
        assert!(w.matrix().sandwich(&xy, &xy).re.abs() < 1e-10);
    }

    #[test]
    fn block_min_report_value_matches_argmin_pair() {
        let w = normalized(3, 2);
        let report = block_min(&w, 16, 3);
        let xy = tensor_vec(&report.argmin_x, &report.argmin_y);
        let direct = w.matrix().sandwich(&xy, &xy).re;
        assert!((report.min_value - direct).abs() < 1e-10);
        assert!(report.min_value.abs() < 1e-9);
        assert_eq!(report.converged_iterations.len(), report.restarts_used);
    }

    #[test]
    fn block_min_of_psd_product_operator_nonnegative() {
        // A ⊗ B with A, B PSD.
        let a = M::diagonal(&[C::new(0.5, 0.0), C::new(1.5, 0.0)]);
        let b = M::diagonal(&[C::new(0.2, 0.0), C::new(2.0, 0.0), C::new(1.0, 0.0)]);
        let dims = BipartiteDims::new(2, 3).unwrap();
        let w = Witness::new(tensor(&a, &b), dims).unwrap();
        let report = block_min(&w, 12, 5);
        assert!(report.min_value >= -1e-12, "min {}", report.min_value);
        // And in fact equals the product of the least eigenvalues here.
        assert!((report.min_value - 0.1).abs() < 1e-9);
    }

    #[test]
    fn validation_verdicts() {
        let w = normalized(3, 1);
        let report = validate_witness(&w, 24, 9);
        assert!(report.is_witness);
        assert!((report.min_eigenvalue + 1.0 / 6.0).abs() < 1e-12);

        let positive = Witness::new(
            M::identity(9).scale_re(1.0 / 9.0),
            BipartiteDims::new(3, 3).unwrap(),
        )
        .unwrap();
        let report = validate_witness(&positive, 8, 9);
        assert!(!report.has_negative_eigenvalue);
        assert!(report.block_positive);
        assert!(!report.is_witness);

        let negative = Witness::new(
            M::identity(4).scale_re(-1.0),
            BipartiteDims::new(2, 2).unwrap(),
        )
        .unwrap();
        let report = validate_witness(&negative, 8, 9);
        assert!(report.has_negative_eigenvalue);
        assert!(!report.block_positive);
        assert!((report.block_report.min_value + 1.0).abs() < 1e-10);
        assert!(!report.is_witness);
    }

    #[test]
    fn detects_reference_values() {
        let w = normalized(3, 1);
        // Product state E11 ⊗ E11: value Φ(E11)[0,0]/6 = 1/6, not detected.
        let sigma = tensor(&M::basis(3, 0, 0), &M::basis(3, 0, 0));
        let v = detects(&w, &sigma).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-12);

        // The maximally entangled state is the minimum eigenstate: −1/6.
        let mut psi = vec![C::new(0.0, 0.0); 9];
        for i in 0..3 {
            psi[i * 3 + i] = C::new(1.0 / 3.0f64.sqrt(), 0.0);
        }
        let p = M::outer(&psi, &psi);
        let v = detects(&w, &p).unwrap();
        assert!((v + 1.0 / 6.0).abs() < 1e-12);

        // Its own minimum-eigenvalue eigenstate gives λ_min.
        let spec = hermitian_spectrum(w.matrix()).unwrap();
        let ground = M::outer(spec.min_vector(), spec.min_vector());
        let v = detects(&w, &ground).unwrap();
        assert!((v + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn detects_rejects_invalid_states() {
        let w = normalized(3, 1);
        let not_normalized = M::identity(9);
        assert!(detects(&w, &not_normalized).is_err());
        let mut non_psd = M::identity(9).scale_re(1.0 / 9.0);
        non_psd[(0, 0)] = C::new(-0.5, 0.0);
        non_psd[(4, 4)] = C::new(1.0 / 9.0 + 0.5, 0.0);
        assert!(detects(&w, &non_psd).is_err());
    }

    #[test]
    fn normalize_behaviour() {
        let w = family_witness(3, 1);
        let nw = normalize(&w).unwrap();
        assert!(nw.is_normalized());
        assert!((nw.matrix().trace().re - 1.0).abs() < 1e-14);
        assert_eq!(nw.family(), w.family());
        // Idempotent.
        let again = normalize(&nw).unwrap();
        assert!(again.matrix().sub(nw.matrix()).max_abs() == 0.0);
        // Traceless input errors.
        let mut traceless = M::zeros(4, 4);
        traceless[(0, 0)] = C::new(1.0, 0.0);
        traceless[(1, 1)] = C::new(-1.0, 0.0);
        let tw = Witness::new(traceless, BipartiteDims::new(2, 2).unwrap()).unwrap();
        assert!(matches!(
            normalize(&tw),
            Err(Error::NonPositiveTrace { .. })
        ));
    }

    #[test]
    fn spa_reference_values() {
        for k in [1usize, 2] {
            let w = normalized(3, k);
            let result = spa(&w, 12, 2).unwrap();
            assert!((result.p_star - 0.4).abs() < 1e-12, "k={k}");
            assert!(result.spa_min_eigenvalue.abs() < 1e-10);
            assert!(result.ppt);
        }
        let w = normalized(4, 1);
        let result = spa(&w, 12, 2).unwrap();
        assert!((result.p_star - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn spa_requires_normalization_and_witness() {
        let w = family_witness(3, 1);
        assert!(spa(&w, 8, 1).is_err());
        let positive = Witness::new(
            M::identity(9).scale_re(1.0 / 9.0),
            BipartiteDims::new(3, 3).unwrap(),
        )
        .unwrap();
        assert!(matches!(spa(&positive, 8, 1), Err(Error::NotAWitness(_))));
    }

    #[test]
    fn spa_boundary_sharpness() {
        // p ≤ p* keeps the state PSD, p slightly above does not.
        let w = normalized(3, 1);
        let result = spa(&w, 12, 2).unwrap();
        let nm = 9.0;
        let mix = |p: f64| {
            M::identity(9)
                .scale_re((1.0 - p) / nm)
                .add(&w.matrix().scale_re(p))
        };
        let below = mix(result.p_star * 0.999);
        assert!(below.min_eigenvalue() > 0.0);
        let above = mix(result.p_star * (1.0 + 1e-6));
        assert!(above.min_eigenvalue() < 0.0);
    }

    #[test]
    fn ppt_check_cases() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        // Product state: PPT.
        let rho = tensor(&M::basis(3, 0, 0), &M::identity(3).scale_re(1.0 / 3.0));
        let report = ppt_check(&rho, dims).unwrap();
        assert!(report.ppt);
        // Maximally entangled state: min PT eigenvalue −1/3.
        let mut psi = vec![C::new(0.0, 0.0); 9];
        for i in 0..3 {
            psi[i * 3 + i] = C::new(1.0 / 3.0f64.sqrt(), 0.0);
        }
        let p = M::outer(&psi, &psi);
        let report = ppt_check(&p, dims).unwrap();
        assert!(!report.ppt);
        assert!((report.min_pt_eigenvalue + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spa_state_of_family_witness_is_ppt() {
        let w = normalized(3, 1);
        let result = spa(&w, 12, 2).unwrap();
        let report = ppt_check(&result.spa_state, w.dims()).unwrap();
        assert!(report.ppt);
    }

    #[test]
    fn separability_certificate_small_cases() {
        for (n, k) in [(3usize, 1usize), (3, 2), (5, 2)] {
            let cert =
                spa_separability_certificate::<f64>(FamilySpec::new(n, k).unwrap()).unwrap();
            assert!(cert.reconstruction_residual <= 1e-10);
            assert!(cert.all_blocks_ok(), "n={n} k={k}");
            assert!(cert.diagonal_part.iter().all(|(w, _)| *w >= -1e-12));
            if n == 3 {
                assert_eq!(cert.blocks.len(), 3);
            }
        }
    }

    #[test]
    fn separability_certificate_rejects_half_k() {
        assert!(spa_separability_certificate::<f64>(FamilySpec::new(4, 2).unwrap()).is_err());
    }
}
