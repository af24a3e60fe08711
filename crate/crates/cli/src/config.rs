//! Experiment configuration: one JSON file per run, no interactive mode.
//!
//! File paths inside a config are resolved relative to the config file's
//! directory, so a config and its data files travel together.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use dirac_core::error::{Error, Result};
use dirac_core::fourier::SparseTable;
use dirac_core::linalg::RMatrix;
use dirac_core::metric::{direction_from_json, MetricField};
use dirac_core::product::FiniteTriple;
use dirac_core::riemann::SpinStructure;
use dirac_core::InnerProduct;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Model {
    #[serde(rename = "quantum-torus")]
    QuantumTorus,
    #[serde(rename = "circle")]
    Circle,
    #[serde(rename = "torus2")]
    Torus2,
    #[serde(rename = "product")]
    Product,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::QuantumTorus => "quantum-torus",
            Model::Circle => "circle",
            Model::Torus2 => "torus2",
            Model::Product => "product",
        }
    }
}

/// Perturbation sweep: operator family `base + scale·direction` with the
/// scales listed explicitly (no continuation heuristics).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    /// Strictly decreasing, nonnegative.
    pub scales: Vec<f64>,
    /// quantum-torus: symmetric `d×d` direction matrix, by rows.
    pub direction: Option<Vec<Vec<f64>>>,
    /// circle / torus2 / product: direction in the metric file format
    /// (positive definiteness not required of a direction).
    pub direction_file: Option<PathBuf>,
    /// product: finite-factor direction in the finite-triple file format;
    /// its `D_F` entry is the direction `ΔF`.
    pub finite_direction_file: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    /// quantum-torus: SPD inner-product matrix, by rows.
    pub inner_product: Option<Vec<Vec<f64>>>,
    /// quantum-torus: scale of the defining derivations (default 1).
    pub derivation_scale: Option<f64>,
    /// circle / torus2 / product: metric field file.
    pub metric_file: Option<PathBuf>,
    /// product: finite triple file.
    pub finite_file: Option<PathBuf>,
    /// circle / torus2 / product: spinor boundary condition (default periodic).
    pub spin_structure: Option<SpinStructure>,
    pub n_trunc: usize,
    pub lambda: Option<f64>,
    pub gap_tol: Option<f64>,
    pub cluster_tol: Option<f64>,
    /// Upper bound on the quantum diameter used for `K = 2·diam + 1` in
    /// bound runs.  When absent, a flat-torus heuristic is used:
    /// `π·√(d·λ_max)` with `λ_max` the largest metric eigenvalue (its grid
    /// supremum for variable metrics) — an upper bound for flat metrics and
    /// a heuristic for nearby ones.
    pub diameter_upper: Option<f64>,
    /// Truncation radius for the graph-norm prefactor `Q` in torus2 bound
    /// runs (default: `n_trunc`).
    pub q_trunc: Option<usize>,
    pub sequence: Option<SequenceConfig>,
}

/// A config with its referenced files loaded and validated.
pub struct Loaded {
    pub model: Model,
    pub n_trunc: usize,
    pub lambda: Option<f64>,
    pub gap_tol: f64,
    pub cluster_tol: Option<f64>,
    pub diameter_upper: Option<f64>,
    pub q_trunc: usize,
    pub base: BaseModel,
    pub sequence: Option<LoadedSequence>,
}

pub enum BaseModel {
    QuantumTorus {
        h: InnerProduct,
        derivation_scale: f64,
        hash: String,
    },
    /// circle (`d = 1`) and torus2 (`d = 2`).
    Metric { g: MetricField, spin: SpinStructure },
    Product {
        g: MetricField,
        spin: SpinStructure,
        f: FiniteTriple,
        finite_hash: String,
    },
}

pub struct LoadedSequence {
    pub scales: Vec<f64>,
    /// quantum-torus direction.
    pub matrix_direction: Option<RMatrix>,
    /// metric-side direction, upper-triangle component order.
    pub field_direction: Option<Vec<SparseTable>>,
    /// finite-side direction for product sweeps.
    pub finite_direction: Option<FiniteTriple>,
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<RMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput(format!(
            "{what} must be a nonempty square matrix given by rows"
        )));
    }
    let mut m = RMatrix::zeros((d, d));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(m)
}

fn require<T>(opt: Option<T>, model: Model, field: &str) -> Result<T> {
    opt.ok_or_else(|| {
        Error::InvalidInput(format!("model {} requires \"{field}\"", model.name()))
    })
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::InvalidInput("sequence.scales must be nonempty".into()));
    }
    for s in scales {
        if !(s.is_finite() && *s >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "sequence scales must be finite and nonnegative, got {s}"
            )));
        }
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "sequence scales must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn sha256_hex(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Canonical hash of an inner-product matrix (row-major, full precision).
pub fn inner_product_hash(m: &RMatrix) -> String {
    let text: Vec<String> = m.iter().map(|v| format!("{v:.17e}")).collect();
    sha256_hex(&format!("d={};{}", m.nrows(), text.join(",")))
}

/// Canonical hash of a finite triple (its interchange JSON rendering).
pub fn finite_hash(f: &FiniteTriple) -> String {
    sha256_hex(&f.to_json().to_string())
}

/// Loads a config file, resolves and validates every referenced file, and
/// checks model/field consistency.
pub fn load(config_path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(config_path).map_err(|e| {
        Error::InvalidInput(format!("cannot read {}: {e}", config_path.display()))
    })?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    let dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &PathBuf| -> PathBuf {
        if p.is_absolute() {
            p.clone()
        } else {
            dir.join(p)
        }
    };

    if cfg.n_trunc == 0 {
        return Err(Error::InvalidInput("n_trunc must be >= 1".into()));
    }
    let gap_tol = cfg.gap_tol.unwrap_or(1e-6);
    if !(gap_tol > 0.0 && gap_tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "gap_tol must be positive and finite, got {gap_tol}"
        )));
    }

    let spin = cfg.spin_structure.unwrap_or(SpinStructure::Periodic);
    let base = match cfg.model {
        Model::QuantumTorus => {
            let rows = require(cfg.inner_product.as_deref(), cfg.model, "inner_product")?;
            let m = matrix_from_rows(rows, "inner_product")?;
            let hash = inner_product_hash(&m);
            let h = InnerProduct::new(m)?;
            let derivation_scale = cfg.derivation_scale.unwrap_or(1.0);
            BaseModel::QuantumTorus {
                h,
                derivation_scale,
                hash,
            }
        }
        Model::Circle | Model::Torus2 => {
            let path = require(cfg.metric_file.as_ref(), cfg.model, "metric_file")?;
            let g = MetricField::from_json(&read_json(&resolve(path))?)?;
            let want_d = if cfg.model == Model::Circle { 1 } else { 2 };
            if g.d() != want_d {
                return Err(Error::InvalidInput(format!(
                    "model {} needs a d = {want_d} metric, file has d = {}",
                    cfg.model.name(),
                    g.d()
                )));
            }
            BaseModel::Metric { g, spin }
        }
        Model::Product => {
            let mpath = require(cfg.metric_file.as_ref(), cfg.model, "metric_file")?;
            let g = MetricField::from_json(&read_json(&resolve(mpath))?)?;
            if g.d() != 2 {
                return Err(Error::InvalidInput(format!(
                    "model product uses a torus2 geometric factor (d = 2), file has d = {}",
                    g.d()
                )));
            }
            let fpath = require(cfg.finite_file.as_ref(), cfg.model, "finite_file")?;
            let f = FiniteTriple::from_json(&read_json(&resolve(fpath))?)?;
            let finite_hash = finite_hash(&f);
            BaseModel::Product {
                g,
                spin,
                f,
                finite_hash,
            }
        }
    };

    let sequence = match cfg.sequence {
        None => None,
        Some(sc) => {
            check_scales(&sc.scales)?;
            let matrix_direction = match (&cfg.model, &sc.direction) {
                (Model::QuantumTorus, Some(rows)) => {
                    let m = matrix_from_rows(rows, "sequence.direction")?;
                    let d = match &base {
                        BaseModel::QuantumTorus { h, .. } => h.dim(),
                        _ => unreachable!(),
                    };
                    if m.nrows() != d {
                        return Err(Error::InvalidInput(format!(
                            "sequence.direction is {}×{} but the inner product is {d}×{d}",
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                    let asym = (0..d)
                        .flat_map(|i| (0..d).map(move |j| (i, j)))
                        .map(|(i, j)| (m[[i, j]] - m[[j, i]]).abs())
                        .fold(0.0f64, f64::max);
                    if asym > 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "sequence.direction must be symmetric (asymmetry {asym:.3e})"
                        )));
                    }
                    Some(m)
                }
                (Model::QuantumTorus, None) => {
                    return Err(Error::InvalidInput(
                        "quantum-torus sweeps need sequence.direction".into(),
                    ))
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidInput(
                        "sequence.direction applies only to model quantum-torus; use \
                         sequence.direction_file"
                            .into(),
                    ))
                }
                _ => None,
            };
            let field_direction = match (&cfg.model, &sc.direction_file) {
                (Model::QuantumTorus, Some(_)) => {
                    return Err(Error::InvalidInput(
                        "sequence.direction_file does not apply to model quantum-torus".into(),
                    ))
                }
                (_, Some(path)) => {
                    let (dd, comps, dr) = direction_from_json(&read_json(&resolve(path))?)?;
                    let g = match &base {
                        BaseModel::Metric { g, .. } | BaseModel::Product { g, .. } => g,
                        _ => unreachable!(),
                    };
                    if dd != g.d() || dr != g.grid_resolution() {
                        return Err(Error::GridMismatch {
                            context: format!(
                                "direction file (d = {dd}, grid {dr}) vs metric \
                                 (d = {}, grid {})",
                                g.d(),
                                g.grid_resolution()
                            ),
                        });
                    }
                    Some(comps)
                }
                (Model::Circle | Model::Torus2, None) => {
                    return Err(Error::InvalidInput(format!(
                        "model {} sweeps need sequence.direction_file",
                        cfg.model.name()
                    )));
                }
                _ => None,
            };
            let finite_direction = match (&cfg.model, &sc.finite_direction_file) {
                (Model::Product, Some(path)) => {
                    let df = FiniteTriple::from_json(&read_json(&resolve(path))?)?;
                    let f_dim = match &base {
                        BaseModel::Product { f, .. } => f.dim(),
                        _ => unreachable!(),
                    };
                    if df.dim() != f_dim {
                        return Err(Error::DimensionMismatch {
                            expected: f_dim,
                            found: df.dim(),
                            context: "sequence.finite_direction_file (finite factor size)"
                                .into(),
                        });
                    }
                    Some(df)
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidInput(
                        "sequence.finite_direction_file applies only to model product".into(),
                    ))
                }
                _ => None,
            };
            if let (Model::Product, None, None) = (cfg.model, &field_direction, &finite_direction)
            {
                return Err(Error::InvalidInput(
                    "product sweeps need sequence.direction_file and/or \
                     sequence.finite_direction_file"
                        .into(),
                ));
            }
            Some(LoadedSequence {
                scales: sc.scales,
                matrix_direction,
                field_direction,
                finite_direction,
            })
        }
    };

    Ok(Loaded {
        model: cfg.model,
        n_trunc: cfg.n_trunc,
        lambda: cfg.lambda,
        gap_tol,
        cluster_tol: cfg.cluster_tol,
        diameter_upper: cfg.diameter_upper,
        q_trunc: cfg.q_trunc.unwrap_or(cfg.n_trunc),
        base,
        sequence,
    })
}
