//! The five run modes behind the subcommands.  Each consumes a loaded
//! config (plus command-line overrides), computes in memory, and writes
//! deterministic tables via [`crate::output`].

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use dirac_core::analysis::convergence_report;
use dirac_core::bound::{bound_sweep, estimate_k, BoundSweep, DeviationEstimates};
use dirac_core::clifford::{build_rep, chirality, CliffordRep};
use dirac_core::error::{Error, Result};
use dirac_core::frames::gram_det_frame;
use dirac_core::linalg::{eigvals_hermitian, kron, sym_eig, CMatrix, LuFactors, RMatrix, Spectrum};
use dirac_core::metric::{c1_distance, MetricField, MetricGrid};
use dirac_core::product::{product_even, FiniteTriple};
use dirac_core::riemann::{assemble_dirac, rg_bound_with_q, rg_q_estimate, SpinStructure};
use dirac_core::{HermitianMatrix, InnerProduct};

use crate::config::{self, BaseModel, Loaded, Model};
use crate::output::{opt_cell, spectrum_csv, write_file, Provenance};

/// Command-line overrides and output destination shared by the run modes.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub trunc: Option<usize>,
    pub lambda: Option<f64>,
    pub cluster_tol: Option<f64>,
    pub timestamps: bool,
}

impl RunContext {
    fn n_trunc(&self, loaded: &Loaded) -> usize {
        self.trunc.unwrap_or(loaded.n_trunc)
    }

    fn lambda(&self, loaded: &Loaded) -> Result<f64> {
        self.lambda.or(loaded.lambda).ok_or_else(|| {
            Error::InvalidInput("this run needs lambda (config or --lambda)".into())
        })
    }

    fn cluster_tol(&self, loaded: &Loaded) -> Option<f64> {
        self.cluster_tol.or(loaded.cluster_tol)
    }
}

fn spin_name(spin: SpinStructure) -> &'static str {
    match spin {
        SpinStructure::Periodic => "periodic",
        SpinStructure::Antiperiodic => "antiperiodic",
    }
}

/// Mode-decomposition representation convention: one irreducible copy for
/// even `d`, one copy of each irreducible for odd `d` (so the circle Dirac
/// carries both signs of `−i d/dx`).
fn rep_for(d: usize) -> Result<CliffordRep> {
    if d % 2 == 0 {
        build_rep(d, 1, None)
    } else {
        build_rep(d, 1, Some(1))
    }
}

fn metric_at(loaded: &Loaded, g: &MetricField, s: f64) -> Result<MetricField> {
    match loaded.sequence.as_ref().and_then(|q| q.field_direction.as_ref()) {
        Some(dir) => g.add_scaled(dir, s),
        None => Ok(g.clone()),
    }
}

fn inner_product_at(loaded: &Loaded, h: &InnerProduct, s: f64) -> Result<InnerProduct> {
    match loaded.sequence.as_ref().and_then(|q| q.matrix_direction.as_ref()) {
        Some(dir) => InnerProduct::new(h.matrix() + &dir.mapv(|v| v * s)),
        None => Ok(h.clone()),
    }
}

fn finite_at(loaded: &Loaded, f: &FiniteTriple, s: f64) -> Result<FiniteTriple> {
    match loaded.sequence.as_ref().and_then(|q| q.finite_direction.as_ref()) {
        Some(dir) => {
            let sum = f.d_f().as_array() + &dir.d_f().as_array().mapv(|v| v * s);
            // The perturbed finite factor enters even-sided products only,
            // which never consult the finite grading.
            FiniteTriple::new(HermitianMatrix::new(sum)?, None)
        }
        None => Ok(f.clone()),
    }
}

/// Even-sided product operator `D_g ⊗ 1 + θ ⊗ D_F` with `θ` the spinor
/// chirality extended mode-diagonally over the Galerkin basis.
fn product_matrix(
    g: &MetricField,
    spin: SpinStructure,
    f: &FiniteTriple,
    n_trunc: usize,
) -> Result<HermitianMatrix> {
    let rep = rep_for(2)?;
    let asm = assemble_dirac(g, n_trunc, &rep, spin)?;
    let chi = chirality(&rep)?;
    let n_modes = asm.dim() / rep.spinor_dim();
    let theta = HermitianMatrix::new(kron(&CMatrix::eye(n_modes), chi.as_array()))?;
    product_even(asm.matrix(), &theta, f)
}

/// Spectrum of the configured operator at sweep parameter `s` (`s = 0`
/// recovers the base operator).
fn operator_spectrum(ctx: &RunContext, loaded: &Loaded, s: f64) -> Result<Spectrum> {
    let n = ctx.n_trunc(loaded);
    let tol = ctx.cluster_tol(loaded);
    match &loaded.base {
        BaseModel::QuantumTorus {
            h,
            derivation_scale,
            ..
        } => {
            let h_s = inner_product_at(loaded, h, s)?;
            let ts = dirac_core::qtorus::TorusTripleSpec::new(h_s, n, *derivation_scale, None)?;
            dirac_core::qtorus::qt_spectrum(&ts, tol)
        }
        BaseModel::Metric { g, spin } => {
            let g_s = metric_at(loaded, g, s)?;
            let rep = rep_for(g.d())?;
            assemble_dirac(&g_s, n, &rep, *spin)?.spectrum(tol)
        }
        BaseModel::Product { g, spin, f, .. } => {
            let g_s = metric_at(loaded, g, s)?;
            let f_s = finite_at(loaded, f, s)?;
            let p = product_matrix(&g_s, *spin, &f_s, n)?;
            let vals = eigvals_hermitian(&p)?;
            Ok(Spectrum::from_eigenvalues(&vals, tol))
        }
    }
}

fn base_provenance(subcommand: &str, ctx: &RunContext, loaded: &Loaded) -> Provenance {
    let mut p = Provenance::new(subcommand, ctx.timestamps);
    p.kv("model", loaded.model.name());
    p.kv("n_trunc", ctx.n_trunc(loaded));
    p.kv_opt_f64("cluster_tol", ctx.cluster_tol(loaded));
    match &loaded.base {
        BaseModel::QuantumTorus {
            derivation_scale,
            hash,
            ..
        } => {
            p.kv("derivation_scale", format_args!("{derivation_scale:.17e}"));
            p.kv("inner_product_hash", hash);
        }
        BaseModel::Metric { g, spin } => {
            p.kv("spin", spin_name(*spin));
            p.kv("grid_resolution", g.grid_resolution());
            p.kv("metric_hash", g.content_hash());
            p.note("conventions", dirac_core::riemann::DIRAC_CONVENTIONS);
        }
        BaseModel::Product {
            g,
            spin,
            finite_hash,
            ..
        } => {
            p.kv("spin", spin_name(*spin));
            p.kv("grid_resolution", g.grid_resolution());
            p.kv("metric_hash", g.content_hash());
            p.kv("finite_hash", finite_hash);
            p.note("conventions", dirac_core::riemann::DIRAC_CONVENTIONS);
        }
    }
    p
}

fn scales_line(scales: &[f64]) -> String {
    scales
        .iter()
        .map(|s| format!("{s:.17e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn require_sequence<'a>(loaded: &'a Loaded) -> Result<&'a config::LoadedSequence> {
    loaded.sequence.as_ref().ok_or_else(|| {
        Error::InvalidInput("this run needs a \"sequence\" block in the config".into())
    })
}

/// Sweep spectra in scale order; steps run concurrently, results are
/// reassembled in order and the first failing step (by order) reports.
fn sweep_spectra(ctx: &RunContext, loaded: &Loaded, scales: &[f64]) -> Result<Vec<Spectrum>> {
    let results: Vec<Result<Spectrum>> = scales
        .par_iter()
        .map(|&s| operator_spectrum(ctx, loaded, s))
        .collect();
    results.into_iter().collect()
}

pub fn run_spectrum(ctx: &RunContext, config_path: &Path) -> Result<()> {
    let loaded = config::load(config_path)?;
    if loaded.model == Model::Product {
        return Err(Error::InvalidInput(
            "model product is served by the `product` subcommand".into(),
        ));
    }
    let spec = operator_spectrum(ctx, &loaded, 0.0)?;
    let mut prov = base_provenance("spectrum", ctx, &loaded);
    prov.kv("distinct_values", spec.entries().len());
    prov.kv("total_multiplicity", spec.total_multiplicity());
    let body = format!("{}{}", prov.render(), spectrum_csv(&spec));
    let path = write_file(&ctx.out_dir, "spectrum.csv", &body)?;
    println!(
        "wrote {} ({} distinct values, total multiplicity {})",
        path.display(),
        spec.entries().len(),
        spec.total_multiplicity()
    );
    Ok(())
}

pub fn run_product(ctx: &RunContext, config_path: &Path) -> Result<()> {
    let loaded = config::load(config_path)?;
    if loaded.model != Model::Product {
        return Err(Error::InvalidInput(
            "the `product` subcommand needs a model=product config".into(),
        ));
    }
    let spec = operator_spectrum(ctx, &loaded, 0.0)?;
    let mut prov = base_provenance("product", ctx, &loaded);
    prov.kv("distinct_values", spec.entries().len());
    prov.kv("total_multiplicity", spec.total_multiplicity());
    let body = format!("{}{}", prov.render(), spectrum_csv(&spec));
    let path = write_file(&ctx.out_dir, "product_spectrum.csv", &body)?;
    println!(
        "wrote {} ({} distinct values, total multiplicity {})",
        path.display(),
        spec.entries().len(),
        spec.total_multiplicity()
    );
    Ok(())
}

pub fn run_converge(ctx: &RunContext, config_path: &Path) -> Result<()> {
    let loaded = config::load(config_path)?;
    let lambda = ctx.lambda(&loaded)?;
    let scales = require_sequence(&loaded)?.scales.clone();
    let target = operator_spectrum(ctx, &loaded, 0.0)?;
    let steps = sweep_spectra(ctx, &loaded, &scales)?;
    let report = convergence_report(&steps, &target, lambda, loaded.gap_tol)?;

    let mut prov = base_provenance("converge", ctx, &loaded);
    prov.kv("lambda", format_args!("{lambda:.17e}"));
    prov.kv("gap_tol", format_args!("{:.17e}", loaded.gap_tol));
    prov.kv("gap_margin", format_args!("{:.17e}", report.gap_margin));
    prov.kv("target_count", report.target_count);
    prov.kv("scales", scales_line(&scales));
    let body = format!("{}{}", prov.render(), report.to_csv());
    let csv_path = write_file(&ctx.out_dir, "converge.csv", &body)?;

    let mut summary = report.summary_json();
    summary["scales"] = serde_json::json!(scales);
    let json_path = write_file(
        &ctx.out_dir,
        "converge_summary.json",
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;

    let stab = report
        .stabilization_index
        .map(|i| i.to_string())
        .unwrap_or_else(|| "none".into());
    let final_h = report
        .steps
        .last()
        .and_then(|s| s.hausdorff)
        .map(|v| format!("{v:.17e}"))
        .unwrap_or_else(|| "n/a".into());
    println!(
        "wrote {} and {}; stabilization_index={} final_hausdorff={}",
        csv_path.display(),
        json_path.display(),
        stab,
        final_h
    );
    Ok(())
}

/// Largest singular value of a small real matrix.
fn sigma_max(m: &RMatrix) -> Result<f64> {
    let mtm = m.t().dot(m);
    let (vals, _) = sym_eig(&mtm)?;
    Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

fn to_complex(m: &RMatrix) -> CMatrix {
    m.mapv(|v| dirac_core::linalg::C64::new(v, 0.0))
}

/// Deviation estimates along a quantum-torus sweep, in closed form: with
/// frames `E` (columns orthonormal for the respective inner products), the
/// single constant `δ = σ_max(E_g^{-1}(E_h − E_g))` bounds both relative
/// deviations — per mode `n` the seminorm satisfies
/// `|‖E_hᵀn‖ − ‖E_gᵀn‖| ≤ δ·‖E_gᵀn‖`, and the per-mode operator block obeys
/// `‖(D_h − D_g)(D_g + i)^{-1}‖ ≤ ‖(E_h − E_g)ᵀn‖ / ‖E_gᵀn‖ ≤ δ`.
fn qt_estimates(
    loaded: &Loaded,
    h: &InnerProduct,
    scales: &[f64],
    k: f64,
) -> Result<Vec<(f64, DeviationEstimates)>> {
    let e_g = gram_det_frame(h)?.columns().clone();
    let d = h.dim();
    let lu = LuFactors::new(&to_complex(&e_g))?;
    let mut out = Vec::with_capacity(scales.len());
    for &s in scales {
        let h_s = inner_product_at(loaded, h, s)?;
        let e_s = gram_det_frame(&h_s)?.columns().clone();
        let diff = &e_s - &e_g;
        let mut m = RMatrix::zeros((d, d));
        for j in 0..d {
            let col: Vec<dirac_core::linalg::C64> = (0..d)
                .map(|i| dirac_core::linalg::C64::new(diff[[i, j]], 0.0))
                .collect();
            let x = lu.solve(&col, false)?;
            for i in 0..d {
                m[[i, j]] = x[i].re;
            }
        }
        let delta = sigma_max(&m)?;
        out.push((s, DeviationEstimates::new(delta, delta, k, false)?));
    }
    Ok(out)
}

/// Grid supremum of the largest metric eigenvalue.
fn sup_lambda_max(grid: &MetricGrid) -> f64 {
    let mut sup = 0.0f64;
    if grid.d() == 1 {
        for &v in grid.g_comp(0, 0) {
            sup = sup.max(v);
        }
    } else {
        let a = grid.g_comp(0, 0);
        let b = grid.g_comp(0, 1);
        let c = grid.g_comp(1, 1);
        for ((&a, &b), &c) in a.iter().zip(b.iter()).zip(c.iter()) {
            let tr = a + c;
            let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
            sup = sup.max(0.5 * (tr + disc));
        }
    }
    sup
}

/// `max_p sup_x √(g_pp(x))`, the constant converting coordinate-derivative
/// sups into Lipschitz seminorm multiples.
fn gradient_constant(grid: &MetricGrid) -> f64 {
    let mut k = 0.0f64;
    for p in 0..grid.d() {
        for &v in grid.g_comp(p, p) {
            k = k.max(v);
        }
    }
    k.sqrt()
}

pub fn run_bound(ctx: &RunContext, config_path: &Path) -> Result<()> {
    let loaded = config::load(config_path)?;
    let scales = require_sequence(&loaded)?.scales.clone();
    let n = ctx.n_trunc(&loaded);

    let mut prov = base_provenance("bound", ctx, &loaded);
    let (k, rows): (f64, Vec<(f64, DeviationEstimates)>) = match &loaded.base {
        BaseModel::QuantumTorus { h, .. } => {
            let diam = match loaded.diameter_upper {
                Some(d) => d,
                None => {
                    let (vals, _) = sym_eig(h.matrix())?;
                    let lmax = vals.last().copied().unwrap_or(1.0);
                    std::f64::consts::PI * (h.dim() as f64 * lmax).sqrt()
                }
            };
            let k = estimate_k(diam)?;
            (k, qt_estimates(&loaded, h, &scales, k)?)
        }
        BaseModel::Metric { g, .. } if g.d() == 2 => {
            let grid = MetricGrid::new(g)?;
            let diam = match loaded.diameter_upper {
                Some(d) => d,
                None => std::f64::consts::PI * (2.0 * sup_lambda_max(&grid)).sqrt(),
            };
            let k = estimate_k(diam)?;
            let k_grad = gradient_constant(&grid);
            let rgq = rg_q_estimate(g, loaded.q_trunc)?;
            prov.kv("q_trunc", loaded.q_trunc);
            prov.kv("q", format_args!("{:.17e}", rgq.q));
            let results: Vec<Result<(f64, DeviationEstimates)>> = scales
                .par_iter()
                .map(|&s| {
                    let h_s = metric_at(&loaded, g, s)?;
                    let rb = rg_bound_with_q(g, &h_s, &rgq)?;
                    let est = DeviationEstimates::new(
                        k_grad * rb.frame_term,
                        rb.bound,
                        k,
                        true,
                    )?;
                    Ok((s, est))
                })
                .collect();
            (k, results.into_iter().collect::<Result<Vec<_>>>()?)
        }
        BaseModel::Metric { .. } => {
            return Err(Error::InvalidInput(
                "bound runs support model quantum-torus and torus2".into(),
            ))
        }
        BaseModel::Product { .. } => {
            return Err(Error::InvalidInput(
                "bound runs support model quantum-torus and torus2".into(),
            ))
        }
    };

    let estimates: Vec<DeviationEstimates> = rows.iter().map(|(_, e)| e.clone()).collect();
    let BoundSweep {
        reports,
        nonincreasing,
    } = bound_sweep(&estimates);

    prov.kv("k", format_args!("{k:.17e}"));
    prov.kv("scales", scales_line(&scales));
    prov.kv("nonincreasing", nonincreasing);
    let mut csv = String::from(
        "scale,delta_lip_rel,delta_op_rel,epsilon,tunnel_extent,semigroup_slope,\
         time_horizon,propinquity_bound,in_regime\n",
    );
    for ((s, est), rep) in rows.iter().zip(reports.iter()) {
        csv.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{:.17e},{}\n",
            s,
            est.delta_lip_rel,
            est.delta_op_rel,
            rep.epsilon,
            rep.tunnel_extent_bound,
            rep.semigroup_slope,
            opt_cell(rep.time_horizon),
            rep.propinquity_bound,
            rep.in_regime
        ));
    }
    let body = format!("{}{}", prov.render(), csv);
    let csv_path = write_file(&ctx.out_dir, "bound.csv", &body)?;

    let final_bound = reports
        .last()
        .map(|r| r.propinquity_bound)
        .unwrap_or(0.0);
    let summary = serde_json::json!({
        "model": loaded.model.name(),
        "n_trunc": n,
        "k": k,
        "steps": reports.len(),
        "nonincreasing": nonincreasing,
        "final_bound": final_bound,
        "caveats": reports.last().map(|r| r.caveats.clone()).unwrap_or_default(),
    });
    let json_path = write_file(
        &ctx.out_dir,
        "bound_summary.json",
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    println!(
        "wrote {} and {}; nonincreasing={} final_bound={:.17e}",
        csv_path.display(),
        json_path.display(),
        nonincreasing,
        final_bound
    );
    Ok(())
}

pub fn run_c1dist(g_file: &Path, h_file: &Path) -> Result<()> {
    let g = MetricField::from_json(&config::read_json(g_file)?)?;
    let h = MetricField::from_json(&config::read_json(h_file)?)?;
    let d = c1_distance(&g, &h)?;
    println!("{d:.11e}");
    Ok(())
}
