//! Exact entanglement measures on pure states, the two-qubit mixed-state
//! oracle (Wootters), and directly evaluable witness estimators.
//!
//! All entropies are base 2, so a Bell state carries one ebit of
//! entanglement of formation.

use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::qcore::{
    self, eigh, embed_operator, kron_vec, reduce_pure, CMatrix, CVector, DensityMatrix,
    Observable, PureState, TensorStructure, C64,
};

/// A bipartite cut: the subsystem indices forming side A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
}

impl Bipartition {
    /// Validates that `side_a` is a nonempty proper subset of the structure's
    /// subsystems.
    pub fn new(side_a: Vec<usize>, structure: &TensorStructure) -> Result<Self> {
        let sorted = structure.check_subset(&side_a)?;
        if sorted.is_empty() || sorted.len() == structure.num_subsystems() {
            return Err(Error::InvalidSubsystems(
                "side A must be a nonempty proper subset".into(),
            ));
        }
        Ok(Self { side_a: sorted })
    }

    /// The conventional cut: subsystem 0 versus the rest.
    pub fn first_vs_rest(structure: &TensorStructure) -> Result<Self> {
        Self::new(vec![0], structure)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }
}

/// Schmidt probabilities across the cut: eigenvalues of the reduced state,
/// descending.
pub fn schmidt_probs(psi: &PureState, cut: &Bipartition) -> Result<Vec<f64>> {
    let rho_a = reduce_pure(psi, cut.side_a())?;
    Ok(rho_a.eigenvalues_descending())
}

/// Pure-state concurrence sqrt(2 [1 - Tr(rho_A^2)]).
pub fn concurrence_pure(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let rho_a = reduce_pure(psi, cut.side_a())?;
    Ok((2.0 * tsallis2(&rho_a)).max(0.0).sqrt())
}

/// Tsallis-2 (linear) entropy 1 - Tr(rho^2).
pub fn tsallis2(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy_bits(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues_descending()
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Entanglement of formation of a pure state: entropy of the reduction, in
/// bits.
pub fn eof_pure(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let rho_a = reduce_pure(psi, cut.side_a())?;
    Ok(von_neumann_entropy_bits(&rho_a))
}

/// Wootters concurrence of a two-qubit mixed state:
/// `max(0, mu1 - mu2 - mu3 - mu4)` where the `mu_i` are the decreasing square
/// roots of the eigenvalues of `rho (sy x sy) rho* (sy x sy)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let s = rho.structure();
    if s.local_dims() != [2, 2] {
        return Err(Error::InvalidStructure(
            "Wootters formula requires a two-qubit state".into(),
        ));
    }
    let yy = qcore::kron(&qcore::pauli_y(), &qcore::pauli_y());
    let rho_tilde = &yy * rho.matrix().conjugate() * &yy;
    // Eigenvalues of rho * rho_tilde equal those of the Hermitian
    // sqrt(rho) rho_tilde sqrt(rho).
    let (vals, vecs) = eigh(rho.matrix());
    let mut sqrt_rho = CMatrix::zeros(4, 4);
    for i in 0..4 {
        let v = vecs.column(i);
        sqrt_rho += (v * v.adjoint()).scale(vals[i].max(0.0).sqrt());
    }
    let m = &sqrt_rho * rho_tilde * &sqrt_rho;
    let mut mu: Vec<f64> = eigh(&m).0.iter().map(|&x| x.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Entanglement of formation from a two-qubit concurrence:
/// `h((1 + sqrt(1 - C^2)) / 2)` in bits.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "concurrence {c} outside [0, 1]"
        )));
    }
    let c = c.min(1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0))
}

// ---------------------------------------------------------------------------
// Geometric measure: best product-state approximation
// ---------------------------------------------------------------------------

/// Contracts `psi` with the conjugated local vectors of every party except
/// `skip`, yielding the environment vector for that party.
fn contract_all_but(psi: &PureState, locals: &[CVector], skip: usize) -> CVector {
    let dims = psi.structure().local_dims();
    let n = dims.len();
    let amps = psi.amplitudes();
    let mut v = CVector::zeros(dims[skip]);
    for (flat, &a) in amps.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let mut coeff = a;
        let mut rem = flat;
        let mut own_index = 0usize;
        for j in (0..n).rev() {
            let ij = rem % dims[j];
            rem /= dims[j];
            if j == skip {
                own_index = ij;
            } else {
                coeff *= locals[j][ij].conj();
            }
        }
        v[own_index] += coeff;
    }
    v
}

/// One alternating-least-squares pass over all parties; returns the overlap
/// |<phi|psi>| after the final update. Each update is optimal for its party,
/// so the overlap never decreases.
fn als_sweep(psi: &PureState, locals: &mut [CVector]) -> f64 {
    let n = locals.len();
    let mut overlap = 0.0;
    for k in 0..n {
        let v = contract_all_but(psi, locals, k);
        let norm = v.norm();
        if norm > 0.0 {
            locals[k] = v / C64::new(norm, 0.0);
        }
        overlap = norm;
    }
    overlap
}

fn product_from_locals(locals: &[CVector], structure: &TensorStructure) -> PureState {
    let mut amps = CVector::from_element(1, C64::new(1.0, 0.0));
    for v in locals {
        amps = kron_vec(&amps, v);
    }
    PureState::normalized(amps, structure.clone()).expect("product of unit vectors")
}

/// Refines a product ansatz by alternating single-party optimization starting
/// from `init`. Returns the local vectors and the achieved overlap |<phi|psi>|.
pub(crate) fn refine_product(
    psi: &PureState,
    init: Vec<CVector>,
    cfg: &NumericConfig,
) -> (Vec<CVector>, f64) {
    let mut locals = init;
    let mut prev = 0.0;
    let mut overlap = 0.0;
    for _ in 0..cfg.product_sweeps {
        overlap = als_sweep(psi, &mut locals);
        if (overlap - prev).abs() < cfg.product_tol {
            break;
        }
        prev = overlap;
    }
    (locals, overlap)
}

fn random_locals(structure: &TensorStructure, rng: &mut impl rand::Rng) -> Vec<CVector> {
    structure
        .local_dims()
        .iter()
        .map(|&d| {
            let s = TensorStructure::new(vec![d]).unwrap();
            qcore::random_pure_state(&s, rng).amplitudes().clone()
        })
        .collect()
}

/// Closest fully separable pure state: maximizes |<phi|psi>| over product
/// states by alternating optimization with random restarts. Returns the
/// product state and the squared overlap.
pub fn closest_product_state(psi: &PureState, seed: u64) -> (PureState, f64) {
    closest_product_state_with(psi, seed, &NumericConfig::default())
}

pub fn closest_product_state_with(
    psi: &PureState,
    seed: u64,
    cfg: &NumericConfig,
) -> (PureState, f64) {
    let structure = psi.structure();
    let mut best: Option<(Vec<CVector>, f64)> = None;
    for r in 0..cfg.product_restarts {
        let mut rng = qcore::rng_from_seed(qcore::derive_seed(seed, r as u64));
        let init = random_locals(structure, &mut rng);
        let (locals, overlap) = refine_product(psi, init, cfg);
        if best.as_ref().map_or(true, |(_, b)| overlap > *b) {
            best = Some((locals, overlap));
        }
    }
    let (locals, overlap) = best.expect("at least one restart");
    (product_from_locals(&locals, structure), overlap * overlap)
}

/// Geometric measure of entanglement: one minus the maximal squared overlap
/// with pure fully separable states.
pub fn geometric_pure(psi: &PureState) -> f64 {
    geometric_pure_seeded(psi, 0)
}

pub fn geometric_pure_seeded(psi: &PureState, seed: u64) -> f64 {
    let (_, overlap_sq) = closest_product_state(psi, seed);
    (1.0 - overlap_sq).max(0.0)
}

/// Meyer-Wallach measure: `2 [1 - (1/N) sum_k Tr(rho_k^2)]` over the
/// single-qubit reductions of an N-qubit pure state.
pub fn meyer_wallach(psi: &PureState) -> Result<f64> {
    let s = psi.structure();
    if !s.is_qubits() || s.num_subsystems() < 2 {
        return Err(Error::InvalidStructure(
            "Meyer-Wallach measure requires at least two qubits".into(),
        ));
    }
    let n = s.num_subsystems();
    let mut purity_sum = 0.0;
    for k in 0..n {
        purity_sum += reduce_pure(psi, &[k])?.purity();
    }
    Ok(2.0 * (1.0 - purity_sum / n as f64))
}

// ---------------------------------------------------------------------------
// Witness constructions and the reduction-witness estimator
// ---------------------------------------------------------------------------

/// Standard projector witness `W = alpha 1 - |psi><psi|` with the threshold
/// `alpha` equal to the squared largest Schmidt coefficient across the cut
/// (the maximal overlap of `psi` with product states), so `Tr(W sigma) >= 0`
/// for every separable `sigma`.
pub fn projector_witness(psi: &PureState, cut: &Bipartition) -> Result<Observable> {
    let probs = schmidt_probs(psi, cut)?;
    let alpha = probs[0];
    if alpha > 1.0 - 1e-9 {
        return Err(Error::InvalidParameter(
            "product state admits no projector witness".into(),
        ));
    }
    let d = psi.structure().total_dim();
    let m = CMatrix::identity(d, d).scale(alpha) - psi.projector();
    Ok(Observable::new_unchecked(m, psi.structure().clone()))
}

/// Reduction-criterion witness
/// `W_phi = 2 [1_A (x) Tr_A(|phi><phi|) - |phi><phi|]`.
pub fn reduction_witness(phi: &PureState, cut: &Bipartition) -> Result<Observable> {
    let structure = phi.structure();
    let side_b: Vec<usize> = (0..structure.num_subsystems())
        .filter(|i| !cut.side_a().contains(i))
        .collect();
    let rho_b = reduce_pure(phi, &side_b)?;
    let embedded = embed_operator(rho_b.matrix(), &side_b, structure);
    let m = (embedded - phi.projector()).scale(2.0);
    Ok(Observable::new_unchecked(m, structure.clone()))
}

/// Concurrence lower bound from a measured reduction witness:
/// `max(0, -<W_phi> / E_C(phi))`.
pub fn reduction_witness_bound(mean_w_phi: f64, e_c_phi: f64) -> Result<f64> {
    if e_c_phi <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "reference concurrence must be positive, got {e_c_phi}"
        )));
    }
    Ok((-mean_w_phi / e_c_phi).max(0.0))
}
