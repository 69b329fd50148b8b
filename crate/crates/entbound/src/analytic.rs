//! Closed-form bounds and special bases: GHZ / cluster stabilizer bases, the
//! k x k matrix bound on the geometric conjugate, single- and multi-fidelity
//! bounds, and isotropic-state formulas.

use nalgebra::DMatrix;

use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::legendre::{BoundDiagnostics, BoundResult};
use crate::opt::golden_max;
use crate::qcore::{
    CMatrix, CVector, DensityMatrix, Observable, PureState, TensorStructure, C64,
};

/// Basis-state fidelities together with the inverse product-overlap bound of
/// the basis: every basis state has overlap at most `1/k` with fully
/// separable states.
#[derive(Debug, Clone)]
pub struct FidelityVector {
    fidelities: Vec<f64>,
    overlap_bound_inv: usize,
}

impl FidelityVector {
    pub fn new(fidelities: Vec<f64>, overlap_bound_inv: usize) -> Result<Self> {
        if overlap_bound_inv < 2 {
            return Err(Error::InvalidParameter(
                "overlap bound 1/k needs k >= 2".into(),
            ));
        }
        if fidelities.is_empty() || fidelities.len() > overlap_bound_inv {
            return Err(Error::InvalidParameter(format!(
                "need between 1 and k = {overlap_bound_inv} fidelities"
            )));
        }
        if fidelities.iter().any(|&f| !(0.0..=1.0 + 1e-12).contains(&f)) {
            return Err(Error::InvalidParameter("fidelities must lie in [0, 1]".into()));
        }
        let sum: f64 = fidelities.iter().sum();
        if sum > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "fidelities sum to {sum} > 1"
            )));
        }
        Ok(Self {
            fidelities,
            overlap_bound_inv,
        })
    }

    pub fn fidelities(&self) -> &[f64] {
        &self.fidelities
    }

    pub fn overlap_bound_inv(&self) -> usize {
        self.overlap_bound_inv
    }
}

/// A witness diagonal in a named orthonormal basis, stored by its
/// decreasingly sorted eigenvalues.
#[derive(Debug, Clone)]
pub struct DiagonalWitness {
    eigenvalues: Vec<f64>,
    basis_label: String,
}

impl DiagonalWitness {
    pub fn new(mut eigenvalues: Vec<f64>, basis_label: impl Into<String>) -> Self {
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self {
            eigenvalues,
            basis_label: basis_label.into(),
        }
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis_label(&self) -> &str {
        &self.basis_label
    }

    /// Materializes `W = sum_i lambda_i |psi_i><psi_i|` over the given basis.
    pub fn to_observable(&self, basis: &[PureState]) -> Result<Observable> {
        if basis.len() < self.eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eigenvalues.len(),
                got: basis.len(),
            });
        }
        let structure = basis[0].structure().clone();
        let d = structure.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (l, psi) in self.eigenvalues.iter().zip(basis) {
            m += psi.projector().scale(*l);
        }
        Ok(Observable::new_unchecked(m, structure))
    }
}

// ---------------------------------------------------------------------------
// GHZ basis
// ---------------------------------------------------------------------------

/// The 2^n GHZ basis states `(|x...> +/- |complement(x)...>)/sqrt(2)`,
/// ordered canonically by their stabilizer sign pattern read as a binary
/// integer (all-plus first, so index 0 is the standard GHZ state).
///
/// The sign pattern lists the eigenvalues under the generators
/// `X...X, Z Z 1..., 1 Z Z 1..., ...` with `+1 -> 0`.
pub fn ghz_basis(n: usize) -> Result<Vec<PureState>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ basis needs at least two qubits, got {n}"
        )));
    }
    let structure = TensorStructure::qubits(n)?;
    let d = 1usize << n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d);
    for pattern in 0..d {
        // bit n-1 of the pattern (most significant) is the X-string sign,
        // the remaining bits are the Z_k Z_{k+1} signs in order
        let x_sign = if (pattern >> (n - 1)) & 1 == 0 { 1.0 } else { -1.0 };
        let mut x = 0usize; // bit string, qubit 0 at the most significant bit
        let mut prev = 0usize;
        for k in 1..n {
            let zz_bit = (pattern >> (n - 1 - k)) & 1;
            let cur = prev ^ zz_bit;
            x = (x << 1) | cur;
            prev = cur;
        }
        // qubit 0 is fixed to 0, so idx < 2^(n-1) and the bitwise complement
        // flips every qubit
        let idx = x;
        let comp = !idx & (d - 1);
        let mut v = CVector::zeros(d);
        v[idx] = C64::new(h, 0.0);
        v[comp] = C64::new(x_sign * h, 0.0);
        basis.push(PureState::new(v, structure.clone())?);
    }
    Ok(basis)
}

// ---------------------------------------------------------------------------
// Stabilizer (cluster) bases
// ---------------------------------------------------------------------------

/// The four stabilizer generators `ZZ11, XXZ1, 1ZXX, 11ZZ` of the linear
/// four-qubit cluster state.
pub fn standard_cluster_generators() -> Vec<Observable> {
    ["ZZ11", "XXZ1", "1ZXX", "11ZZ"]
        .iter()
        .map(|s| crate::qcore::pauli_string(s).expect("valid Pauli strings"))
        .collect()
}

/// Common eigenbasis of commuting, independent stabilizer generators on
/// qubits. With n generators on n qubits the 2^n simultaneous eigenstates
/// are labeled by their eigenvalue sign pattern, ordered as a binary integer
/// (`+1 -> 0`, generator 0 most significant); the all-plus state comes first.
pub fn cluster_basis(generators: &[Observable]) -> Result<Vec<PureState>> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("no generators given".into()));
    }
    let structure = generators[0].structure().clone();
    let n = structure.num_subsystems();
    if !structure.is_qubits() || generators.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need exactly one generator per qubit (got {} on {} qubits)",
            generators.len(),
            n
        )));
    }
    let d = structure.total_dim();
    for g in generators {
        if g.structure() != &structure {
            return Err(Error::StructureMismatch);
        }
        let sq = g.matrix() * g.matrix();
        if (sq - CMatrix::identity(d, d)).norm() > 1e-9 {
            return Err(Error::InvalidParameter(
                "generators must square to the identity".into(),
            ));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = generators[i].matrix();
            let b = generators[j].matrix();
            if (a * b - b * a).norm() > 1e-9 {
                return Err(Error::NonCommutingGenerators);
            }
        }
    }

    let mut basis = Vec::with_capacity(d);
    for pattern in 0..d {
        let mut proj = CMatrix::identity(d, d);
        for (i, g) in generators.iter().enumerate() {
            let sign = if (pattern >> (n - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
            let factor = (CMatrix::identity(d, d) + g.matrix().scale(sign)).scale(0.5);
            proj = &proj * factor;
        }
        let trace = proj.trace();
        if (trace.re - 1.0).abs() > 1e-6 {
            return Err(Error::DependentGenerators);
        }
        // rank-one projector: any nonzero column is the state
        let mut best_col = 0;
        let mut best_norm = 0.0;
        for c in 0..d {
            let nrm = proj.column(c).norm();
            if nrm > best_norm {
                best_norm = nrm;
                best_col = c;
            }
        }
        let mut v: CVector = proj.column(best_col).into_owned();
        // deterministic global phase: largest amplitude real positive
        let mut kmax = 0;
        for k in 0..d {
            if v[k].norm() > v[kmax].norm() {
                kmax = k;
            }
        }
        let phase = v[kmax] / C64::new(v[kmax].norm(), 0.0);
        v /= phase;
        basis.push(PureState::normalized(v, structure.clone())?);
    }
    Ok(basis)
}

/// All 2^n products of the generators, indexed by subset mask (bit i of the
/// mask selects generator i; mask 0 is the identity).
pub fn stabilizer_group(generators: &[Observable]) -> Result<Vec<Observable>> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("no generators given".into()));
    }
    let structure = generators[0].structure().clone();
    let d = structure.total_dim();
    let n = generators.len();
    let mut group = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let mut m = CMatrix::identity(d, d);
        for (i, g) in generators.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                m = &m * g.matrix();
            }
        }
        group.push(Observable::new_unchecked(m, structure.clone()));
    }
    Ok(group)
}

/// Reconstructs all basis-state fidelities from the measured means of the
/// full stabilizer group: `F_i = 2^-n sum_g s_i(g) <g>`, with group elements
/// indexed by subset mask as in [`stabilizer_group`] and basis states in
/// canonical sign-pattern order.
pub fn fidelities_from_stabilizer_means(n: usize, means: &[f64]) -> Result<Vec<f64>> {
    let d = 1usize << n;
    if means.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: means.len(),
        });
    }
    let mut fids = Vec::with_capacity(d);
    for pattern in 0..d {
        let mut acc = 0.0;
        for mask in 0..d {
            // sign of group element `mask` on basis state `pattern`
            let mut sign = 1.0;
            for i in 0..n {
                if (mask >> i) & 1 == 1 && (pattern >> (n - 1 - i)) & 1 == 1 {
                    sign = -sign;
                }
            }
            acc += sign * means[mask];
        }
        fids.push(acc / d as f64);
    }
    Ok(fids)
}

// ---------------------------------------------------------------------------
// The k x k observation bound and fidelity-based bounds
// ---------------------------------------------------------------------------

fn top_eig_symmetric(m: &DMatrix<f64>) -> f64 {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    se.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Builds the k x k matrix `X = diag(lambda_i + 1/k) + offdiag 1/k` from the
/// k largest eigenvalues and returns `||X|| - 1`, an upper bound on the
/// geometric conjugate of any witness diagonal in a basis whose product
/// overlap is bounded by 1/k.
pub fn observation_bound(w: &DiagonalWitness, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    if w.eigenvalues().len() < k {
        return Err(Error::InvalidParameter(format!(
            "need at least {k} eigenvalues, got {}",
            w.eigenvalues().len()
        )));
    }
    Ok(observation_bound_raw(&w.eigenvalues()[..k], k))
}

/// `||diag(lambda) + J/k|| - 1` for exactly the given top-k eigenvalues.
fn observation_bound_raw(top: &[f64], k: usize) -> f64 {
    let x = DMatrix::<f64>::from_fn(k, k, |i, j| {
        let base = 1.0 / k as f64;
        if i == j {
            top[i] + base
        } else {
            base
        }
    });
    top_eig_symmetric(&x) - 1.0
}

/// Analytic conjugate of the geometric measure for `r W` with
/// `W = alpha 1 - |chi><chi|`: `r alpha` for `r >= 0`, otherwise
/// `[sqrt((1-r)^2 + 4 r E_G(chi)) + 2 alpha r - r - 1] / 2`.
pub fn geometric_conjugate_rank_one(r: f64, alpha: f64, e_g_chi: f64) -> f64 {
    if r >= 0.0 {
        r * alpha
    } else {
        (((1.0 - r).powi(2) + 4.0 * r * e_g_chi).max(0.0).sqrt() + 2.0 * alpha * r - r - 1.0)
            / 2.0
    }
}

/// Lower bound on the geometric measure from a single measured fidelity
/// `<chi|rho|chi>`, optimizing the slope of the witness
/// `W = alpha 1 - |chi><chi|` through the analytic conjugate.
///
/// Zero when `fidelity <= 1 - e_g_chi`; equal to `e_g_chi` at fidelity 1
/// (there the supremum is a limit of infinite slopes and is returned
/// analytically).
pub fn single_fidelity_bound(fidelity: f64, e_g_chi: f64, alpha: f64) -> Result<f64> {
    single_fidelity_bound_with(fidelity, e_g_chi, alpha, &NumericConfig::default())
}

pub fn single_fidelity_bound_with(
    fidelity: f64,
    e_g_chi: f64,
    alpha: f64,
    cfg: &NumericConfig,
) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&fidelity) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {fidelity} outside [0, 1]"
        )));
    }
    if !(0.0..1.0).contains(&e_g_chi) {
        return Err(Error::InvalidParameter(format!(
            "geometric measure {e_g_chi} outside [0, 1)"
        )));
    }
    if fidelity >= 1.0 - 1e-12 {
        return Ok(e_g_chi);
    }
    // w = Tr(W rho) = alpha - fidelity; g(r) = r w - conjugate(r W)
    let g = |r: f64| r * (alpha - fidelity) - geometric_conjugate_rank_one(r, alpha, e_g_chi);
    let (_, best) = golden_max(g, -cfg.lambda_max, 0.0, 1e-9 * cfg.lambda_max, 300);
    Ok(best.max(0.0))
}

/// Lower bound on the geometric measure from several basis-state fidelities:
/// maximizes `sum_i lambda_i F_i - ||X(lambda)|| + 1` over the multipliers by
/// coordinate ascent. The search is seeded with the embedded single-fidelity
/// optimum, so the result never falls below [`single_fidelity_bound`] of the
/// largest fidelity.
pub fn multi_fidelity_bound(fv: &FidelityVector) -> Result<BoundResult> {
    multi_fidelity_bound_with(fv, &NumericConfig::default())
}

pub fn multi_fidelity_bound_with(fv: &FidelityVector, cfg: &NumericConfig) -> Result<BoundResult> {
    let k = fv.overlap_bound_inv();
    let mut fids = fv.fidelities().to_vec();
    fids.resize(k, 0.0);

    let objective = |lambdas: &[f64]| -> f64 {
        let linear: f64 = lambdas.iter().zip(&fids).map(|(l, f)| l * f).sum();
        linear - observation_bound_raw(lambdas, k)
    };

    // best fidelity index drives the embedded single-fidelity start
    let (imax, &fmax) = fids
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty fidelities");
    let alpha = 1.0 / k as f64;
    let e_g = 1.0 - alpha;

    if fmax >= 1.0 - 1e-12 {
        // the supremum 1 - 1/k is approached only as the multipliers diverge;
        // report it with the best finite box-corner iterate
        let mut lambdas = vec![-cfg.lambda_max * alpha; k];
        lambdas[imax] = cfg.lambda_max * (1.0 - alpha);
        let legendre_at_optimum = observation_bound_raw(&lambdas, k);
        return Ok(BoundResult {
            bound: e_g,
            optimal_lambdas: lambdas,
            legendre_at_optimum,
            diagnostics: BoundDiagnostics {
                iterations_per_eval: vec![0],
                converged: true,
            },
        });
    }

    let mut evals = 0usize;
    let mut best_lambdas = vec![0.0; k];
    let mut best = 0.0f64; // objective at lambda = 0 (||J/k|| = 1)
    // embedded single-fidelity start
    let g_single = |r: f64| r * (alpha - fmax) - geometric_conjugate_rank_one(r, alpha, e_g);
    let (r_star, _) = golden_max(g_single, -cfg.lambda_max, 0.0, 1e-9 * cfg.lambda_max, 300);
    let mut lambdas = vec![r_star * alpha; k];
    lambdas[imax] = r_star * (alpha - 1.0);
    let seeded = objective(&lambdas);
    if seeded > best {
        best = seeded;
        best_lambdas = lambdas.clone();
    }

    for _ in 0..cfg.fidelity_rounds {
        let round_start = best;
        for i in 0..k {
            let (li, vi) = golden_max(
                |x| {
                    evals += 1;
                    lambdas[i] = x;
                    objective(&lambdas)
                },
                -cfg.lambda_max,
                cfg.lambda_max,
                1e-9 * cfg.lambda_max,
                300,
            );
            lambdas[i] = li;
            if vi > best {
                best = vi;
                best_lambdas = lambdas.clone();
            } else {
                lambdas[i] = best_lambdas[i];
            }
        }
        if best - round_start < 1e-12 {
            break;
        }
    }

    let legendre_at_optimum = observation_bound_raw(&best_lambdas, k);
    Ok(BoundResult {
        bound: best.max(0.0),
        optimal_lambdas: best_lambdas,
        legendre_at_optimum,
        diagnostics: BoundDiagnostics {
            iterations_per_eval: vec![evals],
            converged: true,
        },
    })
}

// ---------------------------------------------------------------------------
// Isotropic states
// ---------------------------------------------------------------------------

/// The maximally entangled state `sum_i |ii> / sqrt(n)` on an n x n system.
pub fn maximally_entangled(n: usize) -> Result<PureState> {
    let structure = TensorStructure::bipartite(n, n)?;
    let mut v = CVector::zeros(n * n);
    for i in 0..n {
        v[i * n + i] = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    }
    PureState::new(v, structure)
}

/// Isotropic state with fidelity `f` on an n x n system:
/// `(1-F)/(n^2-1) (1 - |phi><phi|) + F |phi><phi|`.
pub fn isotropic_state(f: f64, n: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    let phi = maximally_entangled(n)?;
    let d = n * n;
    let p = phi.projector();
    let m = (CMatrix::identity(d, d) - &p).scale((1.0 - f) / (d as f64 - 1.0)) + p.scale(f);
    Ok(DensityMatrix::new_unchecked(m, phi.structure().clone()))
}

/// Exact concurrence of the isotropic state:
/// `sqrt(2n/(n-1)) (F - 1/n)`, clamped to zero below `F = 1/n`.
pub fn isotropic_concurrence_exact(f: f64, n: usize) -> f64 {
    let v = (2.0 * n as f64 / (n as f64 - 1.0)).sqrt() * (f - 1.0 / n as f64);
    v.max(0.0)
}

/// The standard isotropic witness `W = 1/n - |phi><phi|`, whose mean on the
/// isotropic state of fidelity `F` is `1/n - F`.
pub fn isotropic_witness(n: usize) -> Result<Observable> {
    let phi = maximally_entangled(n)?;
    let d = n * n;
    let m = CMatrix::identity(d, d).scale(1.0 / n as f64) - phi.projector();
    Ok(Observable::new_unchecked(m, phi.structure().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::geometric_pure;
    use crate::qcore::{expectation, expectation_pure};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_basis_n2_is_bell_basis() {
        let basis = ghz_basis(2).unwrap();
        assert_eq!(basis.len(), 4);
        // index 0 is (|00> + |11>)/sqrt(2)
        let v = basis[0].amplitudes();
        assert_abs_diff_eq!(v[0].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(basis[i].overlap(&basis[j]).norm(), want, epsilon = 1e-12);
            }
        }
        assert!(ghz_basis(1).is_err());
    }

    #[test]
    fn ghz_basis_n3_orthonormal() {
        let basis = ghz_basis(3).unwrap();
        assert_eq!(basis.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!( (basis[i].overlap(&basis[j]).norm() - want).abs() < 1e-12 );
            }
        }
    }

    #[test]
    fn cluster_basis_contains_the_cluster_state() {
        let gens = standard_cluster_generators();
        let basis = cluster_basis(&gens).unwrap();
        assert_eq!(basis.len(), 16);
        // the all-plus state equals (|0000> + |0011> + |1100> - |1111>)/2
        let mut v = CVector::zeros(16);
        v[0b0000] = C64::new(0.5, 0.0);
        v[0b0011] = C64::new(0.5, 0.0);
        v[0b1100] = C64::new(0.5, 0.0);
        v[0b1111] = C64::new(-0.5, 0.0);
        let cl = PureState::new(v, TensorStructure::qubits(4).unwrap()).unwrap();
        assert_abs_diff_eq!(basis[0].overlap(&cl).norm(), 1.0, epsilon = 1e-10);
        for i in 0..16 {
            for j in i + 1..16 {
                assert!(basis[i].overlap(&basis[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cluster_basis_rejects_bad_generators() {
        let bad = vec![
            crate::qcore::pauli_string("XZ11").unwrap(),
            crate::qcore::pauli_string("ZX11").unwrap(),
            crate::qcore::pauli_string("11ZZ").unwrap(),
            crate::qcore::pauli_string("11XX").unwrap(),
        ];
        assert!(matches!(
            cluster_basis(&bad),
            Err(Error::NonCommutingGenerators)
        ));
        // dependent set: ZZ11 appearing twice cannot span a complete basis
        let dep = vec![
            crate::qcore::pauli_string("ZZ11").unwrap(),
            crate::qcore::pauli_string("ZZ11").unwrap(),
            crate::qcore::pauli_string("11ZZ").unwrap(),
            crate::qcore::pauli_string("1Z1Z").unwrap(),
        ];
        assert!(cluster_basis(&dep).is_err());
    }

    #[test]
    fn stabilizer_fidelities_reconstruct_projections() {
        let gens = standard_cluster_generators();
        let basis = cluster_basis(&gens).unwrap();
        let group = stabilizer_group(&gens).unwrap();
        let mut rng = crate::qcore::rng_from_seed(44);
        let s = TensorStructure::qubits(4).unwrap();
        let rho = crate::qcore::random_density_matrix(&s, &mut rng);
        let means: Vec<f64> = group.iter().map(|g| expectation(g, &rho).unwrap()).collect();
        let fids = fidelities_from_stabilizer_means(4, &means).unwrap();
        for (i, f) in fids.iter().enumerate() {
            let direct = expectation(&Observable::projector(&basis[i]), &rho).unwrap();
            assert_abs_diff_eq!(*f, direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn observation_bound_examples() {
        // lambda = (1, 0), k = 2 -> sqrt(2)/2
        let w = DiagonalWitness::new(vec![1.0, 0.0], "ghz2");
        assert_abs_diff_eq!(
            observation_bound(&w, 2).unwrap(),
            std::f64::consts::SQRT_2 / 2.0,
            epsilon = 1e-12
        );
        // all-equal eigenvalues: bound = c for any k
        let w = DiagonalWitness::new(vec![0.3; 6], "flat");
        assert_abs_diff_eq!(observation_bound(&w, 4).unwrap(), 0.3, epsilon = 1e-12);
        // (1, 0, 0, 0), k = 4: direct 4x4 eigensolve oracle
        let w = DiagonalWitness::new(vec![1.0, 0.0, 0.0, 0.0], "cl");
        let x = DMatrix::<f64>::from_fn(4, 4, |i, j| {
            (if i == j && i == 0 { 1.0 } else { 0.0 }) + 0.25
        });
        let oracle = top_eig_symmetric(&x) - 1.0;
        assert_abs_diff_eq!(observation_bound(&w, 4).unwrap(), oracle, epsilon = 1e-14);
        assert!(observation_bound(&w, 1).is_err());
    }

    #[test]
    fn observation_bound_matches_rank_one_formula() {
        // closed-form cross-check against the analytic conjugate at
        // r = -1, alpha = 0, E_G = 1/2
        let e = geometric_conjugate_rank_one(-1.0, 0.0, 0.5);
        let w = DiagonalWitness::new(vec![1.0, 0.0], "ghz2");
        assert_abs_diff_eq!(observation_bound(&w, 2).unwrap(), e, epsilon = 1e-12);
    }

    #[test]
    fn single_fidelity_examples() {
        // fidelity 1 -> E_G exactly
        assert_abs_diff_eq!(single_fidelity_bound(1.0, 0.5, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(single_fidelity_bound(1.0, 0.75, 0.25).unwrap(), 0.75, epsilon = 1e-15);
        // zero crossing at fidelity = 1 - E_G
        let b = single_fidelity_bound(0.25, 0.75, 0.25).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-9);
        let b = single_fidelity_bound(0.2, 0.75, 0.25).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
        // strictly between 0 and 3/4 at fidelity 0.9
        let b = single_fidelity_bound(0.9, 0.75, 0.25).unwrap();
        assert!(b > 0.0 && b < 0.75, "bound {b}");
        // invalid inputs
        assert!(single_fidelity_bound(1.2, 0.5, 0.5).is_err());
        assert!(single_fidelity_bound(0.5, 1.0, 0.5).is_err());
    }

    #[test]
    fn multi_fidelity_examples() {
        // pure cluster state: F = (1, 0, 0, 0) -> 3/4
        let fv = FidelityVector::new(vec![1.0, 0.0, 0.0], 4).unwrap();
        let r = multi_fidelity_bound(&fv).unwrap();
        assert_abs_diff_eq!(r.bound, 0.75, epsilon = 1e-12);
        // flat fidelities -> 0
        let fv = FidelityVector::new(vec![0.25, 0.25, 0.25, 0.25], 4).unwrap();
        let r = multi_fidelity_bound(&fv).unwrap();
        assert_abs_diff_eq!(r.bound, 0.0, epsilon = 1e-9);
        // dominance over the single-fidelity bound on a small grid
        for &(f1, f2) in &[(0.6, 0.3), (0.5, 0.25), (0.4, 0.4), (0.34, 0.33)] {
            let f3: f64 = 1.0 - f1 - f2;
            let fv = FidelityVector::new(vec![f1, f2, f3], 4).unwrap();
            let multi = multi_fidelity_bound(&fv).unwrap().bound;
            let single =
                single_fidelity_bound(f1.max(f2).max(f3), 0.75, 0.25).unwrap();
            assert!(
                multi >= single - 1e-8,
                "multi {multi} < single {single} at ({f1}, {f2})"
            );
        }
        // invalid: fidelities summing above one
        assert!(FidelityVector::new(vec![0.9, 0.9], 4).is_err());
    }

    #[test]
    fn isotropic_examples() {
        // f = 1/n^2 gives the maximally mixed state
        let rho = isotropic_state(1.0 / 9.0, 3).unwrap();
        let mm = DensityMatrix::maximally_mixed(TensorStructure::bipartite(3, 3).unwrap());
        assert_abs_diff_eq!((rho.matrix() - mm.matrix()).norm(), 0.0, epsilon = 1e-12);
        // f = 1 is the projector onto phi
        let rho = isotropic_state(1.0, 3).unwrap();
        let phi = maximally_entangled(3).unwrap();
        assert_abs_diff_eq!(
            expectation(&Observable::projector(&phi), &rho).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(isotropic_state(1.5, 3).is_err());

        // concurrence formula anchors
        assert_abs_diff_eq!(isotropic_concurrence_exact(1.0 / 3.0, 3), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            isotropic_concurrence_exact(1.0, 3),
            3f64.sqrt() * 2.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(isotropic_concurrence_exact(1.0, 2), 1.0, epsilon = 1e-12);
        // zero-concurrence boundary per the formula
        assert_abs_diff_eq!(isotropic_concurrence_exact(0.2, 3), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn isotropic_witness_means() {
        let w = isotropic_witness(3).unwrap();
        for f in [0.0, 1.0 / 9.0, 0.4, 0.9, 1.0] {
            let rho = isotropic_state(f, 3).unwrap();
            assert_abs_diff_eq!(
                expectation(&w, &rho).unwrap(),
                1.0 / 3.0 - f,
                epsilon = 1e-10
            );
        }
        let phi = maximally_entangled(3).unwrap();
        assert_abs_diff_eq!(
            expectation_pure(&w, &phi).unwrap(),
            1.0 / 3.0 - 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ghz_states_have_geometric_measure_half() {
        let basis = ghz_basis(3).unwrap();
        assert_abs_diff_eq!(geometric_pure(&basis[0]), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(geometric_pure(&basis[5]), 0.5, epsilon = 1e-6);
    }
}
