//! Data-generation harness behind the `entbound` binary: bound computation
//! from record files and CSV reproduction of the isotropic sweep, the
//! method-comparison study, and the fidelity-grid study.

pub mod formats;

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analytic::{
    isotropic_concurrence_exact, isotropic_state, isotropic_witness, multi_fidelity_bound_with,
    single_fidelity_bound_with, FidelityVector,
};
use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::legendre::{bound_from_record_with, BoundResult, MeasureSelector};
use crate::measures::{
    concurrence_pure, eof_from_concurrence, reduction_witness, wootters_concurrence, Bipartition,
};
use crate::qcore::{
    self, expectation, min_eig, partial_transpose, CVector, DensityMatrix, MeasurementRecord,
    Observable, PureState, TensorStructure, C64,
};

pub use formats::{MatrixFile, RecordFile};

/// Default seed used by the binary when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Measure selection as exposed on the command line; bipartite measures use
/// the first-versus-rest cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Concurrence,
    Eof,
    Geometric,
    MeyerWallach,
}

impl MeasureKind {
    pub fn selector(&self, structure: &TensorStructure) -> Result<MeasureSelector> {
        Ok(match self {
            MeasureKind::Concurrence => {
                MeasureSelector::Concurrence(Bipartition::first_vs_rest(structure)?)
            }
            MeasureKind::Eof => {
                MeasureSelector::EntanglementOfFormation(Bipartition::first_vs_rest(structure)?)
            }
            MeasureKind::Geometric => MeasureSelector::Geometric,
            MeasureKind::MeyerWallach => MeasureSelector::MeyerWallach,
        })
    }
}

/// Harness configuration; every experiment reads the fields it needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Noise realizations for the method comparison.
    pub samples: usize,
    /// Grid resolution: fidelity points for the isotropic sweep, points per
    /// axis for the fidelity grid.
    pub grid: usize,
    /// Noise levels p for the method comparison.
    pub noise_levels: Vec<f64>,
    /// Output path for CSV emission.
    pub out: Option<PathBuf>,
    pub numeric: NumericConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: 100,
            grid: 0, // 0 = per-experiment default
            noise_levels: (0..=20).map(|i| i as f64 * 0.05).collect(),
            out: None,
            numeric: NumericConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidParameter("samples must be >= 1".into()));
        }
        if self.noise_levels.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(
                "noise levels must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Resolves an output path against the `ENTBOUND_OUT_DIR` override.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os("ENTBOUND_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

// ---------------------------------------------------------------------------
// bound subcommand
// ---------------------------------------------------------------------------

/// Computes the optimized lower bound for the record stored at `path`.
pub fn run_bound(path: &Path, measure: MeasureKind, seed: u64) -> Result<BoundResult> {
    run_bound_with(path, measure, seed, &NumericConfig::default())
}

pub fn run_bound_with(
    path: &Path,
    measure: MeasureKind,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<BoundResult> {
    let record = RecordFile::load(path)?.to_record()?;
    let selector = measure.selector(record.structure())?;
    bound_from_record_with(&record, &selector, seed, cfg)
}

// ---------------------------------------------------------------------------
// Isotropic sweep (exact concurrence versus witness bound)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig2Row {
    pub fidelity: f64,
    pub exact: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct Fig2Output {
    pub rows: Vec<Fig2Row>,
    pub max_gap: f64,
}

/// Sweeps the isotropic-state fidelity on a 3 x 3 system and compares the
/// exact concurrence with the witness bound. Needs at least 30 grid points.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Fig2Output> {
    cfg.validate()?;
    let n = 3usize;
    let grid = if cfg.grid == 0 { 30 } else { cfg.grid };
    if grid < 30 {
        return Err(Error::InvalidParameter(format!(
            "isotropic sweep needs >= 30 fidelity points, got {grid}"
        )));
    }
    let witness = isotropic_witness(n)?;
    let cut = Bipartition::first_vs_rest(witness.structure())?;

    let rows: Vec<Fig2Row> = (0..grid)
        .into_par_iter()
        .map(|i| -> Result<Fig2Row> {
            let f = 1.0 / 3.0 + (i as f64 / (grid - 1) as f64) * (1.0 - 1.0 / 3.0);
            let rho = isotropic_state(f, n)?;
            let mean = expectation(&witness, &rho)?;
            let record = MeasurementRecord::single(witness.clone(), mean)?;
            let result = bound_from_record_with(
                &record,
                &MeasureSelector::Concurrence(cut.clone()),
                qcore::derive_seed(cfg.seed, i as u64),
                &cfg.numeric,
            )?;
            Ok(Fig2Row {
                fidelity: f,
                exact: isotropic_concurrence_exact(f, n),
                bound: result.bound,
            })
        })
        .collect::<Result<_>>()?;

    let max_gap = rows
        .iter()
        .map(|r| (r.exact - r.bound).abs())
        .fold(0.0f64, f64::max);
    let out = Fig2Output { rows, max_gap };
    if let Some(path) = &cfg.out {
        write_fig2_csv(&out, &resolve_out(path))?;
    }
    Ok(out)
}

pub fn write_fig2_csv(out: &Fig2Output, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "F,exact,bound")?;
    for r in &out.rows {
        writeln!(
            f,
            "{},{},{}",
            formats::fmt_csv(r.fidelity),
            formats::fmt_csv(r.exact),
            formats::fmt_csv(r.bound)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Method comparison on noisy two-qubit states
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig3Row {
    pub p: f64,
    pub exact_mean: f64,
    pub wit_mean: f64,
    pub rwit_mean: f64,
}

/// Efficiency over a noise window: mean over the grid points with
/// `lo <= p < hi` of estimate-curve / exact-curve, in percent.
#[derive(Debug, Clone)]
pub struct EfficiencyWindow {
    pub lo: f64,
    pub hi: f64,
    pub wit_percent: f64,
    pub rwit_percent: f64,
}

#[derive(Debug, Clone)]
pub struct Fig3Output {
    pub rows: Vec<Fig3Row>,
    pub windows: Vec<EfficiencyWindow>,
    /// Local measurement settings per method (reported, not derived):
    /// (method name, settings).
    pub measurement_settings: Vec<(&'static str, usize)>,
}

/// The fixed reference state (4|00> + |11>)/sqrt(17).
pub fn comparison_state() -> PureState {
    let s = TensorStructure::qubits(2).unwrap();
    let norm = 17f64.sqrt();
    let v = CVector::from_vec(vec![
        C64::new(4.0 / norm, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0 / norm, 0.0),
    ]);
    PureState::new(v, s).unwrap()
}

/// Witness for states of the form `p |psi><psi| + (1-p) 1/4`: the partial
/// transpose of the projector onto the negative-eigenvalue eigenvector of
/// `(|psi><psi|)^T_B`. Its mean equals `<phi|rho^T_B|phi>`, which is
/// nonnegative on every separable state.
pub fn build_method3_witness(psi: &PureState) -> Result<Observable> {
    let structure = psi.structure();
    if structure.local_dims() != [2, 2] {
        return Err(Error::InvalidStructure(
            "method-3 witness is defined for two qubits".into(),
        ));
    }
    let cut = Bipartition::first_vs_rest(structure)?;
    if concurrence_pure(psi, &cut)? < 1e-9 {
        return Err(Error::InvalidParameter(
            "product state admits no witness".into(),
        ));
    }
    let pt = partial_transpose(&DensityMatrix::from_pure(psi), 1)?;
    let (min_val, phi) = min_eig(&pt);
    debug_assert!(min_val < 0.0);
    let w = partial_transpose(&DensityMatrix::new_unchecked(phi.projector(), structure.clone()), 1)?;
    Ok(w)
}

/// Runs the three-method comparison: exact Wootters entanglement of
/// formation, the witness-Legendre bound, and the reduction-witness bound,
/// averaged over random separable noise.
///
/// The reduction-witness column averages the raw affine values over the
/// realizations and maps the averaged concurrence through the entanglement
/// of formation, which keeps it a valid lower bound on the averaged exact
/// curve without the clamping bias of per-realization mapping.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Fig3Output> {
    cfg.validate()?;
    let psi = comparison_state();
    let proj = psi.projector();
    let structure = psi.structure().clone();
    let cut = Bipartition::first_vs_rest(&structure)?;
    let witness = build_method3_witness(&psi)?;
    let red = reduction_witness(&psi, &cut)?;
    let ec_psi = concurrence_pure(&psi, &cut)?;
    let selector = MeasureSelector::EntanglementOfFormation(cut.clone());

    let mut ps = cfg.noise_levels.clone();
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ps.dedup();
    let samples = cfg.samples;

    struct Cell {
        exact: f64,
        wit: f64,
        rwit_raw: f64,
    }

    let cells: Vec<Vec<Cell>> = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<Vec<Cell>> {
            let sigma =
                qcore::random_separable_two_qubit_with(
                    qcore::derive_seed(cfg.seed, 0x5EED_0000 + k as u64),
                    &cfg.numeric,
                )?;
            ps.iter()
                .enumerate()
                .map(|(j, &p)| -> Result<Cell> {
                    let m = proj.scale(p) + sigma.matrix().scale(1.0 - p);
                    let rho = DensityMatrix::new_unchecked(m, structure.clone());
                    let exact = eof_from_concurrence(wootters_concurrence(&rho)?)?;
                    let mean = expectation(&witness, &rho)?;
                    let record = MeasurementRecord::single(witness.clone(), mean)?;
                    let wit = bound_from_record_with(
                        &record,
                        &selector,
                        qcore::derive_seed(cfg.seed, ((k as u64) << 20) | j as u64),
                        &cfg.numeric,
                    )?
                    .bound;
                    let rwit_raw = -expectation(&red, &rho)? / ec_psi;
                    Ok(Cell {
                        exact,
                        wit,
                        rwit_raw,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(ps.len());
    for (j, &p) in ps.iter().enumerate() {
        let exact_mean = cells.iter().map(|c| c[j].exact).sum::<f64>() / samples as f64;
        let wit_mean = cells.iter().map(|c| c[j].wit).sum::<f64>() / samples as f64;
        let rwit_raw_mean = cells.iter().map(|c| c[j].rwit_raw).sum::<f64>() / samples as f64;
        let rwit_mean = eof_from_concurrence(rwit_raw_mean.clamp(0.0, 1.0))?;
        rows.push(Fig3Row {
            p,
            exact_mean,
            wit_mean,
            rwit_mean,
        });
    }

    let window = |lo: f64, hi: f64| -> EfficiencyWindow {
        let pts: Vec<&Fig3Row> = rows
            .iter()
            .filter(|r| r.p >= lo - 1e-9 && r.p < hi - 1e-9 && r.exact_mean > 1e-12)
            .collect();
        let mean = |sel: &dyn Fn(&Fig3Row) -> f64| -> f64 {
            if pts.is_empty() {
                return f64::NAN;
            }
            pts.iter().map(|r| sel(r) / r.exact_mean).sum::<f64>() / pts.len() as f64 * 100.0
        };
        EfficiencyWindow {
            lo,
            hi,
            wit_percent: mean(&|r| r.wit_mean),
            rwit_percent: mean(&|r| r.rwit_mean),
        }
    };
    let windows = vec![window(0.8, 1.0), window(0.6, 0.8)];

    let out = Fig3Output {
        rows,
        windows,
        measurement_settings: vec![("WIT", 3), ("RWIT", 3)],
    };
    if let Some(path) = &cfg.out {
        write_fig3_csv(&out, &resolve_out(path))?;
    }
    Ok(out)
}

pub fn write_fig3_csv(out: &Fig3Output, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "p,exact_mean,wit_mean,rwit_mean")?;
    for r in &out.rows {
        writeln!(
            f,
            "{},{},{},{}",
            formats::fmt_csv(r.p),
            formats::fmt_csv(r.exact_mean),
            formats::fmt_csv(r.wit_mean),
            formats::fmt_csv(r.rwit_mean)
        )?;
    }
    Ok(())
}

/// Renders the efficiency table as plain text.
pub fn efficiency_table(out: &Fig3Output) -> String {
    let mut s = String::new();
    s.push_str("method   ");
    for w in &out.windows {
        s.push_str(&format!("  eta p in [{:.1},{:.1})", w.lo, w.hi));
    }
    s.push('\n');
    s.push_str("WIT      ");
    for w in &out.windows {
        s.push_str(&format!("  {:16.1}%", w.wit_percent));
    }
    s.push('\n');
    s.push_str("RWIT     ");
    for w in &out.windows {
        s.push_str(&format!("  {:16.1}%", w.rwit_percent));
    }
    s.push('\n');
    s.push_str("# local measurement settings: ");
    let counts: Vec<String> = out
        .measurement_settings
        .iter()
        .map(|(name, n)| format!("{name}={n}"))
        .collect();
    s.push_str(&counts.join(", "));
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Fidelity-grid study for the cluster basis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig4Row {
    pub f1: f64,
    pub f2: f64,
    pub single_bound: f64,
    pub multi_bound: f64,
}

#[derive(Debug, Clone)]
pub struct Fig4Output {
    pub rows: Vec<Fig4Row>,
}

/// Grid over the first two cluster-basis fidelities with `F3 = 1 - F1 - F2`,
/// comparing the single-fidelity bound (largest fidelity only) against the
/// multi-fidelity optimization. Needs at least 20 points per axis.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<Fig4Output> {
    cfg.validate()?;
    let grid = if cfg.grid == 0 { 20 } else { cfg.grid };
    if grid < 20 {
        return Err(Error::InvalidParameter(format!(
            "fidelity grid needs >= 20 points per axis, got {grid}"
        )));
    }
    let e_g = 0.75;
    let alpha = 0.25;

    let mut points = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let f1 = i as f64 / (grid - 1) as f64;
            let f2 = j as f64 / (grid - 1) as f64;
            if f1 + f2 <= 1.0 + 1e-12 {
                points.push((f1, f2));
            }
        }
    }

    let rows: Vec<Fig4Row> = points
        .into_par_iter()
        .map(|(f1, f2)| -> Result<Fig4Row> {
            let f3 = (1.0 - f1 - f2).max(0.0);
            let fmax = f1.max(f2).max(f3);
            let single = single_fidelity_bound_with(fmax, e_g, alpha, &cfg.numeric)?;
            let fv = FidelityVector::new(vec![f1, f2, f3], 4)?;
            let multi = multi_fidelity_bound_with(&fv, &cfg.numeric)?.bound;
            assert!(
                multi >= single - 1e-8,
                "multi-fidelity bound {multi} below single-fidelity bound {single} at ({f1}, {f2})"
            );
            Ok(Fig4Row {
                f1,
                f2,
                single_bound: single,
                multi_bound: multi,
            })
        })
        .collect::<Result<_>>()?;

    let out = Fig4Output { rows };
    if let Some(path) = &cfg.out {
        write_fig4_csv(&out, &resolve_out(path))?;
    }
    Ok(out)
}

pub fn write_fig4_csv(out: &Fig4Output, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "F1,F2,single_bound,multi_bound")?;
    for r in &out.rows {
        writeln!(
            f,
            "{},{},{},{}",
            formats::fmt_csv(r.f1),
            formats::fmt_csv(r.f2),
            formats::fmt_csv(r.single_bound),
            formats::fmt_csv(r.multi_bound)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn method3_witness_properties() {
        let psi = comparison_state();
        let w = build_method3_witness(&psi).unwrap();
        // mean on psi itself is minus the product of Schmidt coefficients
        let rho = DensityMatrix::from_pure(&psi);
        assert_abs_diff_eq!(
            expectation(&w, &rho).unwrap(),
            -4.0 / 17.0,
            epsilon = 1e-12
        );
        // nonnegative on separable states
        for seed in 0..50 {
            let sigma = qcore::random_separable_two_qubit(seed).unwrap();
            assert!(expectation(&w, &sigma).unwrap() >= -1e-9);
        }
        // product state: no witness
        let s = TensorStructure::qubits(2).unwrap();
        let product = PureState::basis_state(s, 0).unwrap();
        assert!(build_method3_witness(&product).is_err());
    }

    #[test]
    fn fig4_default_grid_validates() {
        let cfg = ExperimentConfig {
            grid: 5,
            ..Default::default()
        };
        assert!(run_fig4(&cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig {
            samples: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            noise_levels: vec![0.5, 1.2],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
