//! Spectral-convergence diagnostics: interval eigenvalue counts with
//! multiplicity, Hausdorff distance between interval-restricted spectra,
//! labeled-eigenvalue matching, and per-sequence convergence reports.
//!
//! The two headline diagnostics are deliberately independent: the Hausdorff
//! distance compares value *sets* (multiplicity ignored), while counting and
//! labeling track multiplicity.  Neither bounds the other in general for
//! multisets, so reports carry both and assert nothing between them.
//!
//! The interval bound `Λ` must stay away from the target spectrum
//! ([`validate_lambda`]): eigenvalue counts in `[−Λ, Λ]` are only stable
//! under perturbation when `Λ` has a positive gap to the limiting
//! eigenvalues.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Spectrum;

/// Sum of multiplicities of spectrum values in `[−Λ, Λ]` (inclusive).
pub fn count_interval(spec: &Spectrum, lambda: f64) -> Result<usize> {
    check_lambda_positive(lambda)?;
    Ok(spec
        .entries()
        .iter()
        .filter(|(v, _)| -lambda <= *v && *v <= lambda)
        .map(|&(_, m)| m)
        .sum())
}

fn check_lambda_positive(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "interval bound must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Distance from `{−Λ, +Λ}` to the spectrum values; rejected
/// ([`Error::LambdaNearSpectrum`]) when below `gap_tol`, since eigenvalue
/// counts in `[−Λ, Λ]` are then unstable.
pub fn validate_lambda(spec: &Spectrum, lambda: f64, gap_tol: f64) -> Result<f64> {
    check_lambda_positive(lambda)?;
    if spec.is_empty() {
        return Err(Error::EmptySet {
            context: "validate_lambda on an empty spectrum".into(),
        });
    }
    let mut margin = f64::INFINITY;
    for &(v, _) in spec.entries() {
        margin = margin.min((v - lambda).abs()).min((v + lambda).abs());
    }
    if margin < gap_tol {
        return Err(Error::LambdaNearSpectrum {
            lambda,
            distance: margin,
            gap_tol,
        });
    }
    Ok(margin)
}

/// Hausdorff distance between two finite nonempty sets of reals:
/// `max(sup_a inf_b |a−b|, sup_b inf_a |a−b|)`.
pub fn hausdorff(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet {
            context: "hausdorff distance of an empty set".into(),
        });
    }
    let directed = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Eigenvalues in `[−Λ, Λ]` repeated by multiplicity, ascending.  Callers
/// wanting perturbation-stable labels must pass a `Λ` cleared by
/// [`validate_lambda`] against the limiting spectrum.
pub fn label_eigenvalues(spec: &Spectrum, lambda: f64) -> Result<Vec<f64>> {
    check_lambda_positive(lambda)?;
    let mut out = Vec::new();
    for &(v, m) in spec.entries() {
        if -lambda <= v && v <= lambda {
            for _ in 0..m {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// One sequence step in a [`ConvergenceReport`].
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub index: usize,
    /// Multiplicity count in `[−Λ, Λ]`.
    pub count: usize,
    /// Hausdorff distance between the interval-restricted value sets;
    /// absent when either restriction is empty.
    pub hausdorff: Option<f64>,
    /// `max_j |λ_{step,j} − λ_{target,j}|` over ascending labels; present
    /// only when this step's count equals the target count.
    pub labeled_dev: Option<f64>,
}

/// Convergence diagnostics of a spectrum sequence against a target.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub steps: Vec<StepRecord>,
    /// First index from which every later supplied step matches the target
    /// count; defined over the supplied finite sequence only.
    pub stabilization_index: Option<usize>,
    pub lambda: f64,
    pub gap_margin: f64,
    pub target_count: usize,
}

impl ConvergenceReport {
    /// CSV rendering: header `step,count,hausdorff,labeled_dev`, absent
    /// diagnostics as empty cells, values at full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,count,hausdorff,labeled_dev\n");
        for s in &self.steps {
            let h = s
                .hausdorff
                .map(|v| format!("{v:.17e}"))
                .unwrap_or_default();
            let l = s
                .labeled_dev
                .map(|v| format!("{v:.17e}"))
                .unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", s.index, s.count, h, l));
        }
        out
    }

    /// Structured summary block (interval bound, margin, stabilization,
    /// target count).
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda,
            "gap_margin": self.gap_margin,
            "stabilization_index": self.stabilization_index,
            "target_count": self.target_count,
            "steps": self.steps.len(),
        })
    }
}

/// Builds the convergence report of `seq` against `target` for the interval
/// `[−Λ, Λ]`.  Precondition: `Λ` clears the target spectrum by `gap_tol`.
pub fn convergence_report(
    seq: &[Spectrum],
    target: &Spectrum,
    lambda: f64,
    gap_tol: f64,
) -> Result<ConvergenceReport> {
    let gap_margin = validate_lambda(target, lambda, gap_tol)?;
    let target_labels = label_eigenvalues(target, lambda)?;
    let target_count = target_labels.len();
    let target_values: Vec<f64> = target
        .values()
        .into_iter()
        .filter(|v| -lambda <= *v && *v <= lambda)
        .collect();

    let mut steps = Vec::with_capacity(seq.len());
    for (index, spec) in seq.iter().enumerate() {
        let count = count_interval(spec, lambda)?;
        let values: Vec<f64> = spec
            .values()
            .into_iter()
            .filter(|v| -lambda <= *v && *v <= lambda)
            .collect();
        let hausdorff = if values.is_empty() || target_values.is_empty() {
            None
        } else {
            Some(hausdorff(&values, &target_values)?)
        };
        let labeled_dev = if count == target_count {
            let labels = label_eigenvalues(spec, lambda)?;
            Some(
                labels
                    .iter()
                    .zip(target_labels.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        steps.push(StepRecord {
            index,
            count,
            hausdorff,
            labeled_dev,
        });
    }

    let mut stabilization_index = None;
    for start in 0..steps.len() {
        if steps[start..].iter().all(|s| s.count == target_count) {
            stabilization_index = Some(start);
            break;
        }
    }

    Ok(ConvergenceReport {
        steps,
        stabilization_index,
        lambda,
        gap_margin,
        target_count,
    })
}
