//! Multipartite linear-algebra substrate: states, operators, tensor structure,
//! reductions, transposes, spectra, and random sampling.
//!
//! Everything is dense; the dimensions this crate targets are desk scale
//! (total dimension up to 64), where dense storage and full eigensolves are
//! the fastest option anyway.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::config::NumericConfig;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Explicit tensor-product structure of a multipartite Hilbert space.
///
/// Subsystem 0 is the most significant factor: basis index `i` decomposes
/// row-major over the local dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorStructure {
    local_dims: Vec<usize>,
}

impl TensorStructure {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::InvalidStructure("no subsystems".into()));
        }
        if let Some(&d) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidStructure(format!(
                "local dimension {d} < 2"
            )));
        }
        Ok(Self { local_dims })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    /// Two subsystems of dimensions `da` and `db`.
    pub fn bipartite(da: usize, db: usize) -> Result<Self> {
        Self::new(vec![da, db])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.local_dims.iter().all(|&d| d == 2)
    }

    /// Row-major strides: flat index = sum_k idx[k] * stride[k].
    pub(crate) fn strides(&self) -> Vec<usize> {
        let n = self.local_dims.len();
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.local_dims[k + 1];
        }
        s
    }

    /// Validates a subsystem index set: in range, sorted output, no duplicates.
    pub(crate) fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let n = self.num_subsystems();
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != subset.len() {
            return Err(Error::InvalidSubsystems("duplicate indices".into()));
        }
        if sorted.iter().any(|&i| i >= n) {
            return Err(Error::InvalidSubsystems(format!(
                "index out of range (have {n} subsystems)"
            )));
        }
        Ok(sorted)
    }

    /// Structure obtained by keeping only the listed subsystems.
    pub(crate) fn substructure(&self, keep: &[usize]) -> TensorStructure {
        TensorStructure {
            local_dims: keep.iter().map(|&i| self.local_dims[i]).collect(),
        }
    }
}

fn max_herm_deviation(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
}

/// Normalized pure state over an explicit tensor structure.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
    structure: TensorStructure,
}

impl PureState {
    pub fn new(amplitudes: CVector, structure: TensorStructure) -> Result<Self> {
        Self::new_with(amplitudes, structure, &NumericConfig::default())
    }

    pub fn new_with(
        amplitudes: CVector,
        structure: TensorStructure,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        if amplitudes.len() != structure.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: structure.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > cfg.tol_norm {
            return Err(Error::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self {
            amplitudes,
            structure,
        })
    }

    /// Normalizes the given amplitudes (rejects the zero vector).
    pub fn normalized(amplitudes: CVector, structure: TensorStructure) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(1.0));
        }
        Self::new(amplitudes / C64::new(norm, 0.0), structure)
    }

    /// Computational basis state |index> in row-major subsystem order.
    pub fn basis_state(structure: TensorStructure, index: usize) -> Result<Self> {
        let d = structure.total_dim();
        if index >= d {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range {d}"
            )));
        }
        let mut v = CVector::zeros(d);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v, structure)
    }

    /// Tensor product of one local vector per subsystem.
    pub fn product(locals: &[CVector], structure: TensorStructure) -> Result<Self> {
        if locals.len() != structure.num_subsystems() {
            return Err(Error::DimensionMismatch {
                expected: structure.num_subsystems(),
                got: locals.len(),
            });
        }
        for (v, &d) in locals.iter().zip(structure.local_dims()) {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
        for v in locals {
            amps = kron_vec(&amps, v);
        }
        Self::normalized(amps, structure)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn structure(&self) -> &TensorStructure {
        &self.structure
    }

    /// |psi><psi| as a raw matrix.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// <self|op|self> for a raw Hermitian matrix.
    pub(crate) fn quadratic_form(&self, op: &CMatrix) -> f64 {
        (self.amplitudes.adjoint() * op * &self.amplitudes)[(0, 0)].re
    }
}

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    structure: TensorStructure,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, structure: TensorStructure) -> Result<Self> {
        Self::new_with(matrix, structure, &NumericConfig::default())
    }

    pub fn new_with(
        matrix: CMatrix,
        structure: TensorStructure,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        let d = structure.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.nrows(),
            });
        }
        let dev = max_herm_deviation(&matrix);
        if dev > cfg.tol_hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > cfg.tol_trace || tr.im.abs() > cfg.tol_trace {
            return Err(Error::TraceNotOne(((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt()));
        }
        let eigs = eigvals_ascending(&matrix);
        if eigs[0] < -cfg.tol_psd {
            return Err(Error::NotPositive(eigs[0]));
        }
        Ok(Self { matrix, structure })
    }

    /// Skips validation; for matrices constructed to be valid by algebra.
    pub(crate) fn new_unchecked(matrix: CMatrix, structure: TensorStructure) -> Self {
        Self { matrix, structure }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
            structure: psi.structure().clone(),
        }
    }

    pub fn maximally_mixed(structure: TensorStructure) -> Self {
        let d = structure.total_dim();
        Self {
            matrix: CMatrix::identity(d, d).scale(1.0 / d as f64),
            structure,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn structure(&self) -> &TensorStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.structure.total_dim()
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix
            .iter()
            .zip(self.matrix.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    /// Eigenvalues in descending order (clamped tiny negatives are kept as is).
    pub fn eigenvalues_descending(&self) -> Vec<f64> {
        let mut e = eigvals_ascending(&self.matrix);
        e.reverse();
        e
    }
}

/// Hermitian operator (witness or otherwise) with a tensor structure.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
    structure: TensorStructure,
}

impl Observable {
    pub fn new(matrix: CMatrix, structure: TensorStructure) -> Result<Self> {
        Self::new_with(matrix, structure, &NumericConfig::default())
    }

    pub fn new_with(
        matrix: CMatrix,
        structure: TensorStructure,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        let d = structure.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.nrows(),
            });
        }
        let dev = max_herm_deviation(&matrix);
        if dev > cfg.tol_hermitian {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { matrix, structure })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, structure: TensorStructure) -> Self {
        Self { matrix, structure }
    }

    pub fn identity(structure: TensorStructure) -> Self {
        let d = structure.total_dim();
        Self {
            matrix: CMatrix::identity(d, d),
            structure,
        }
    }

    /// |psi><psi| as an observable.
    pub fn projector(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
            structure: psi.structure().clone(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn structure(&self) -> &TensorStructure {
        &self.structure
    }

    /// Smallest and largest eigenvalue.
    pub fn spectral_range(&self) -> (f64, f64) {
        let e = eigvals_ascending(&self.matrix);
        (e[0], e[e.len() - 1])
    }

    /// self + c * other (structures must match).
    pub fn linear_combination(terms: &[(f64, &Observable)]) -> Result<Observable> {
        let first = terms.first().ok_or(Error::EmptyRecord)?.1;
        let d = first.structure.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for &(c, op) in terms {
            if op.structure != first.structure {
                return Err(Error::StructureMismatch);
            }
            m += op.matrix.scale(c);
        }
        Ok(Observable {
            matrix: m,
            structure: first.structure.clone(),
        })
    }
}

/// A list of (observable, measured mean value) pairs sharing one structure.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    entries: Vec<(Observable, f64)>,
}

impl MeasurementRecord {
    pub fn new(entries: Vec<(Observable, f64)>) -> Result<Self> {
        Self::new_with(entries, &NumericConfig::default())
    }

    pub fn new_with(entries: Vec<(Observable, f64)>, cfg: &NumericConfig) -> Result<Self> {
        let first = match entries.first() {
            Some((o, _)) => o.structure().clone(),
            None => return Err(Error::EmptyRecord),
        };
        for (op, mean) in &entries {
            if *op.structure() != first {
                return Err(Error::StructureMismatch);
            }
            let (lo, hi) = op.spectral_range();
            if *mean < lo - cfg.tol_mean_range || *mean > hi + cfg.tol_mean_range {
                return Err(Error::MeanOutOfRange {
                    mean: *mean,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn single(op: Observable, mean: f64) -> Result<Self> {
        Self::new(vec![(op, mean)])
    }

    pub fn entries(&self) -> &[(Observable, f64)] {
        &self.entries
    }

    pub fn structure(&self) -> &TensorStructure {
        self.entries[0].0.structure()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Dense linear algebra helpers
// ---------------------------------------------------------------------------

/// Kronecker product of two matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn eigvals_ascending(m: &CMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Full Hermitian eigendecomposition, eigenvalues ascending with matching
/// eigenvector columns.
pub(crate) fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = SymmetricEigen::new(m.clone());
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Embeds an operator acting on the listed subsystems (ascending order) into
/// the full space, acting as the identity elsewhere.
pub(crate) fn embed_operator(
    op: &CMatrix,
    positions: &[usize],
    structure: &TensorStructure,
) -> CMatrix {
    let dims = structure.local_dims();
    let strides = structure.strides();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !positions.contains(i)).collect();
    let dk: usize = positions.iter().map(|&i| dims[i]).product();
    let dr: usize = rest.iter().map(|&i| dims[i]).product();
    let d = structure.total_dim();

    // flat index of the full space from (kept multi-index, rest multi-index)
    let flat = |mut ik: usize, mut ir: usize| -> usize {
        let mut idx = 0usize;
        for &p in positions.iter().rev() {
            idx += (ik % dims[p]) * strides[p];
            ik /= dims[p];
        }
        for &p in rest.iter().rev() {
            idx += (ir % dims[p]) * strides[p];
            ir /= dims[p];
        }
        idx
    };

    let mut out = CMatrix::zeros(d, d);
    for ik in 0..dk {
        for jk in 0..dk {
            let v = op[(ik, jk)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for ir in 0..dr {
                out[(flat(ik, ir), flat(jk, ir))] += v;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Reduced state on the `keep` subsystems (trace over the complement).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let structure = rho.structure();
    let keep = structure.check_subset(keep)?;
    let n = structure.num_subsystems();
    if keep.is_empty() || keep.len() == n {
        return Err(Error::InvalidSubsystems(
            "keep set must be a nonempty proper subset".into(),
        ));
    }
    let reduced = partial_trace_raw(rho.matrix(), structure, &keep);
    Ok(DensityMatrix::new_unchecked(
        reduced,
        structure.substructure(&keep),
    ))
}

/// Partial trace on a raw matrix; `keep` must be validated and sorted.
pub(crate) fn partial_trace_raw(
    m: &CMatrix,
    structure: &TensorStructure,
    keep: &[usize],
) -> CMatrix {
    let dims = structure.local_dims();
    let strides = structure.strides();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let dk: usize = keep.iter().map(|&i| dims[i]).product();
    let dr: usize = rest.iter().map(|&i| dims[i]).product();

    let flat = |mut ik: usize, mut ir: usize| -> usize {
        let mut idx = 0usize;
        for &p in keep.iter().rev() {
            idx += (ik % dims[p]) * strides[p];
            ik /= dims[p];
        }
        for &p in rest.iter().rev() {
            idx += (ir % dims[p]) * strides[p];
            ir /= dims[p];
        }
        idx
    };

    let mut out = CMatrix::zeros(dk, dk);
    for ik in 0..dk {
        for jk in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for ir in 0..dr {
                acc += m[(flat(ik, ir), flat(jk, ir))];
            }
            out[(ik, jk)] = acc;
        }
    }
    out
}

/// Reduced state of a pure state on the `keep` subsystems.
pub fn reduce_pure(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace(&DensityMatrix::from_pure(psi), keep)
}

/// Transposes one subsystem. The result is Hermitian and trace preserving but
/// not necessarily positive, so it is returned as an [`Observable`].
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<Observable> {
    let structure = rho.structure();
    let n = structure.num_subsystems();
    if subsystem >= n {
        return Err(Error::InvalidSubsystems(format!(
            "subsystem {subsystem} out of range (have {n})"
        )));
    }
    let dims = structure.local_dims();
    let strides = structure.strides();
    let d = structure.total_dim();
    let ds = dims[subsystem];
    let ss = strides[subsystem];
    let m = rho.matrix();

    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        let is = (i / ss) % ds;
        for j in 0..d {
            let js = (j / ss) % ds;
            // swap the subsystem component between row and column
            let i2 = i - is * ss + js * ss;
            let j2 = j - js * ss + is * ss;
            out[(i2, j2)] = m[(i, j)];
        }
    }
    Ok(Observable::new_unchecked(out, structure.clone()))
}

/// Largest eigenvalue and a matching normalized eigenvector.
pub fn max_eig(op: &Observable) -> (f64, PureState) {
    let (vals, vecs) = eigh(op.matrix());
    let k = vals.len() - 1;
    let mut v: CVector = vecs.column(k).into_owned();
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    (
        vals[k],
        PureState {
            amplitudes: v,
            structure: op.structure().clone(),
        },
    )
}

/// Smallest eigenvalue and a matching normalized eigenvector.
pub fn min_eig(op: &Observable) -> (f64, PureState) {
    let (vals, vecs) = eigh(op.matrix());
    let mut v: CVector = vecs.column(0).into_owned();
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    (
        vals[0],
        PureState {
            amplitudes: v,
            structure: op.structure().clone(),
        },
    )
}

/// Tr(op * rho).
pub fn expectation(op: &Observable, rho: &DensityMatrix) -> Result<f64> {
    if op.structure() != rho.structure() {
        return Err(Error::StructureMismatch);
    }
    Ok(op
        .matrix()
        .iter()
        .zip(rho.matrix().transpose().iter())
        .map(|(a, b)| (a * b).re)
        .sum())
}

/// <psi|op|psi>.
pub fn expectation_pure(op: &Observable, psi: &PureState) -> Result<f64> {
    if op.structure() != psi.structure() {
        return Err(Error::StructureMismatch);
    }
    Ok(psi.quadratic_form(op.matrix()))
}

// ---------------------------------------------------------------------------
// Pauli matrices and Pauli strings
// ---------------------------------------------------------------------------

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(1.0, 0.0),
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
    ])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(0.0, -1.0),
        C64::new(0.0, 1.0), C64::new(0.0, 0.0),
    ])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
        C64::new(0.0, 0.0), C64::new(-1.0, 0.0),
    ])
}

/// Tensor product of single-qubit Paulis from a string over `1IXYZ`
/// (`1` and `I` both mean the identity).
pub fn pauli_string(spec: &str) -> Result<Observable> {
    let n = spec.chars().count();
    let structure = TensorStructure::qubits(n)?;
    let mut m = CMatrix::identity(1, 1);
    for c in spec.chars() {
        let local = match c {
            '1' | 'I' | 'i' => CMatrix::identity(2, 2),
            'X' | 'x' => pauli_x(),
            'Y' | 'y' => pauli_y(),
            'Z' | 'z' => pauli_z(),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown Pauli symbol '{other}'"
                )))
            }
        };
        m = kron(&m, &local);
    }
    Ok(Observable::new_unchecked(m, structure))
}

// ---------------------------------------------------------------------------
// Random sampling
// ---------------------------------------------------------------------------

/// SplitMix64 step, used to derive independent stream seeds from a base seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    use rand_distr::StandardNormal;
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| standard_complex(rng))
}

/// Haar-like random pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng>(structure: &TensorStructure, rng: &mut R) -> PureState {
    let d = structure.total_dim();
    let v = CVector::from_fn(d, |_, _| standard_complex(rng));
    PureState::normalized(v, structure.clone()).expect("gaussian vector is nonzero")
}

/// Density matrix from the induced Hilbert-Schmidt measure: G G^dag / Tr.
pub fn random_density_matrix<R: Rng>(structure: &TensorStructure, rng: &mut R) -> DensityMatrix {
    let d = structure.total_dim();
    let g = ginibre(d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(m.scale(1.0 / tr), structure.clone())
}

/// Random Hermitian matrix (G + G^dag)/2 with entries O(1).
pub fn random_hermitian<R: Rng>(structure: &TensorStructure, rng: &mut R) -> Observable {
    let d = structure.total_dim();
    let g = ginibre(d, rng);
    let m = (&g + g.adjoint()).scale(0.5);
    Observable::new_unchecked(m, structure.clone())
}

/// Haar random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / C64::new(rkk.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// Minimal eigenvalue of the partial transpose over the second qubit.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, 1)?;
    Ok(pt.spectral_range().0)
}

/// Hilbert-Schmidt random separable two-qubit state via PPT rejection.
///
/// For two qubits PPT is exactly separability, so rejection against the PPT
/// test samples the separable set in the induced Hilbert-Schmidt measure.
pub fn random_separable_two_qubit(seed: u64) -> Result<DensityMatrix> {
    random_separable_two_qubit_with(seed, &NumericConfig::default())
}

pub fn random_separable_two_qubit_with(seed: u64, cfg: &NumericConfig) -> Result<DensityMatrix> {
    let structure = TensorStructure::qubits(2)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..cfg.rejection_cap {
        let rho = random_density_matrix(&structure, &mut rng);
        if ppt_min_eigenvalue(&rho)? >= -cfg.tol_psd {
            return Ok(rho);
        }
    }
    Err(Error::RejectionExhausted(cfg.rejection_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn bell_phi_plus() -> PureState {
        let s = TensorStructure::qubits(2).unwrap();
        let v = CVector::from_vec(vec![
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ]);
        PureState::new(v, s).unwrap()
    }

    #[test]
    fn structure_rejects_trivial_dims() {
        assert!(TensorStructure::new(vec![2, 1]).is_err());
        assert!(TensorStructure::new(vec![]).is_err());
        let s = TensorStructure::new(vec![2, 3, 2]).unwrap();
        assert_eq!(s.total_dim(), 12);
        assert_eq!(s.strides(), vec![6, 2, 1]);
    }

    #[test]
    fn pure_state_requires_normalization() {
        let s = TensorStructure::qubits(1).unwrap();
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(v.clone(), s.clone()),
            Err(Error::NotNormalized(_))
        ));
        assert!(PureState::normalized(v, s).is_ok());
    }

    #[test]
    fn density_matrix_validation() {
        let s = TensorStructure::qubits(1).unwrap();
        // non-hermitian
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m, s.clone()),
            Err(Error::NotHermitian(_))
        ));
        // wrong trace
        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(m, s.clone()),
            Err(Error::TraceNotOne(_))
        ));
        // negative eigenvalue
        let m = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m, s),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell_phi_plus());
        let red = partial_trace(&rho, &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(red.matrix()[(i, j)].re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(red.matrix()[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_product_state() {
        // |0> x |+>, keep second -> |+><+|
        let s = TensorStructure::qubits(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let psi = PureState::new(v, s).unwrap();
        let red = partial_trace(&DensityMatrix::from_pure(&psi), &[1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(red.matrix()[(i, j)].re, 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_weighted_state() {
        // (4|00> + |11>)/sqrt(17), keep first -> diag(16/17, 1/17)
        let s = TensorStructure::qubits(2).unwrap();
        let n = 17f64.sqrt();
        let v = CVector::from_vec(vec![c(4.0 / n, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 / n, 0.0)]);
        let psi = PureState::new(v, s).unwrap();
        let red = partial_trace(&DensityMatrix::from_pure(&psi), &[0]).unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 16.0 / 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 1.0 / 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_subsets() {
        let rho = DensityMatrix::maximally_mixed(TensorStructure::qubits(2).unwrap());
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[0, 1]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn partial_transpose_identity_and_bell() {
        let s = TensorStructure::qubits(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(s);
        let pt = partial_transpose(&rho, 1).unwrap();
        assert_abs_diff_eq!((pt.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-15);

        let bell = DensityMatrix::from_pure(&bell_phi_plus());
        let pt = partial_transpose(&bell, 1).unwrap();
        let eigs = eigvals_ascending(pt.matrix());
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in eigs.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!(partial_transpose(&bell, 2).is_err());
    }

    #[test]
    fn partial_transpose_is_involution() {
        let s = TensorStructure::new(vec![2, 3]).unwrap();
        let mut rng = rng_from_seed(5);
        let rho = random_density_matrix(&s, &mut rng);
        let pt = partial_transpose(&rho, 1).unwrap();
        let rho_pt = DensityMatrix::new_unchecked(pt.matrix().clone(), s.clone());
        let back = partial_transpose(&rho_pt, 1).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn max_eig_examples() {
        let s = TensorStructure::qubits(1).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]);
        let op = Observable::new(m, s).unwrap();
        let (val, vec) = max_eig(&op);
        assert_abs_diff_eq!(val, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(vec.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);

        let bell = bell_phi_plus();
        let proj = Observable::projector(&bell);
        let (val, vec) = max_eig(&proj);
        assert_abs_diff_eq!(val, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vec.overlap(&bell).norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn max_eig_residual_is_small() {
        let s = TensorStructure::qubits(3).unwrap();
        let mut rng = rng_from_seed(9);
        let op = random_hermitian(&s, &mut rng);
        let (val, vec) = max_eig(&op);
        let resid = (op.matrix() * vec.amplitudes() - vec.amplitudes().scale(val)).norm();
        assert!(resid <= 1e-9, "residual {resid}");
    }

    #[test]
    fn expectation_basics() {
        let s = TensorStructure::qubits(2).unwrap();
        let rho = DensityMatrix::from_pure(&bell_phi_plus());
        let id = Observable::identity(s.clone());
        assert_abs_diff_eq!(expectation(&id, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let proj = Observable::projector(&bell_phi_plus());
        assert_abs_diff_eq!(expectation(&proj, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let other = DensityMatrix::maximally_mixed(TensorStructure::new(vec![4]).unwrap());
        assert!(matches!(
            expectation(&id, &other),
            Err(Error::StructureMismatch)
        ));
    }

    #[test]
    fn record_validates_means() {
        let s = TensorStructure::qubits(1).unwrap();
        let z = Observable::new(pauli_z(), s).unwrap();
        assert!(MeasurementRecord::single(z.clone(), 0.3).is_ok());
        assert!(matches!(
            MeasurementRecord::single(z, 1.5),
            Err(Error::MeanOutOfRange { .. })
        ));
        assert!(matches!(
            MeasurementRecord::new(vec![]),
            Err(Error::EmptyRecord)
        ));
    }

    #[test]
    fn separable_sampler_is_ppt() {
        for seed in 0..8 {
            let rho = random_separable_two_qubit(seed).unwrap();
            assert!(ppt_min_eigenvalue(&rho).unwrap() >= -1e-10);
            // valid density matrix invariants
            assert!(DensityMatrix::new(rho.matrix().clone(), rho.structure().clone()).is_ok());
        }
    }

    #[test]
    fn embed_operator_matches_kron_on_leading_block() {
        let s = TensorStructure::new(vec![2, 3]).unwrap();
        let mut rng = rng_from_seed(3);
        let a = ginibre(2, &mut rng);
        let a = (&a + a.adjoint()).scale(0.5);
        let embedded = embed_operator(&a, &[0], &s);
        let direct = kron(&a, &CMatrix::identity(3, 3));
        assert_abs_diff_eq!((embedded - direct).norm(), 0.0, epsilon = 1e-14);

        // middle subsystem of three
        let s = TensorStructure::qubits(3).unwrap();
        let b = ginibre(2, &mut rng);
        let b = (&b + b.adjoint()).scale(0.5);
        let embedded = embed_operator(&b, &[1], &s);
        let direct = kron(&kron(&CMatrix::identity(2, 2), &b), &CMatrix::identity(2, 2));
        assert_abs_diff_eq!((embedded - direct).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pauli_string_matches_kron() {
        let zz = pauli_string("ZZ").unwrap();
        let direct = kron(&pauli_z(), &pauli_z());
        assert_abs_diff_eq!((zz.matrix() - direct).norm(), 0.0, epsilon = 1e-15);
        assert!(pauli_string("ZQ").is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(21);
        let u = random_unitary(4, &mut rng);
        let id = &u * u.adjoint();
        assert_abs_diff_eq!((id - CMatrix::identity(4, 4)).norm(), 0.0, epsilon = 1e-12);
    }
}
