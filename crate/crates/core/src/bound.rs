//! Quantitative propinquity bounds from measured deviations.
//!
//! Given relative deviations between two Dirac operators on a common
//! Hilbert space — a Lipschitz-seminorm deviation `δ_lip` and a relative
//! operator-norm deviation `δ_op` — and a constant `K = 2·diam + 1` built
//! from an upper bound on the quantum diameter, the distance estimate is
//! driven by the single parameter
//!
//! ```text
//!     ε = max( δ_lip , δ_op / K ).
//! ```
//!
//! The derived quantities are exact multiples of `K·ε` by construction:
//! tunnel extent `K·ε`, semigroup slope `3·K·ε`, propinquity bound
//! `5·K·ε`, and time horizon `1/(5·K·ε)` (unbounded when `ε = 0`), so the
//! identities `bound = 5·extent` and `horizon·bound = 1` hold exactly.
//!
//! The estimate is theorem-backed only in the regime
//! `ε ≤ min{1, 1/(K+1)}` (inclusive).  Outside it the numbers are still
//! reported, flagged via `in_regime = false` and a caveat — a flag, not a
//! failure, so sweeps can show where a family leaves the admissible range.

use serde::Serialize;

use crate::error::{Error, Result};

/// Measured deviations between two Dirac operators, plus the diameter
/// constant `K ≥ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationEstimates {
    /// Relative deviation of Lipschitz seminorms (dimensionless, `≥ 0`).
    pub delta_lip_rel: f64,
    /// Relative operator-norm deviation `‖(D_g − D_h)(D_g + i)^{-1}‖` or an
    /// upper bound for it (`≥ 0`).
    pub delta_op_rel: f64,
    /// Diameter constant `K = 2·diam + 1 ≥ 1`.
    pub k: f64,
    /// Whether the deviations were measured on a restricted probe set
    /// (finite truncation / sampled states) rather than in full generality.
    pub probe_restricted: bool,
}

impl DeviationEstimates {
    pub fn new(
        delta_lip_rel: f64,
        delta_op_rel: f64,
        k: f64,
        probe_restricted: bool,
    ) -> Result<Self> {
        for (name, v) in [("delta_lip_rel", delta_lip_rel), ("delta_op_rel", delta_op_rel)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "diameter constant K must be finite and >= 1, got {k}"
            )));
        }
        Ok(Self {
            delta_lip_rel,
            delta_op_rel,
            k,
            probe_restricted,
        })
    }
}

/// Distance estimate derived from [`DeviationEstimates`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// `ε = max(δ_lip, δ_op / K)`.
    pub epsilon: f64,
    /// `K·ε`: how far a tunnel's admissible states can spread.
    pub tunnel_extent_bound: f64,
    /// `3·K·ε`: slope of the comparison semigroup estimate.
    pub semigroup_slope: f64,
    /// `1/(5·K·ε)`; `None` means unbounded (`ε = 0`).
    pub time_horizon: Option<f64>,
    /// `5·K·ε`: the propinquity upper bound.
    pub propinquity_bound: f64,
    /// Human-readable qualifications (probe restriction, regime violation).
    pub caveats: Vec<String>,
    /// `ε ≤ min{1, 1/(K+1)}` (inclusive).
    pub in_regime: bool,
}

/// Diameter constant `K = 2·diam + 1` from an upper bound `diam ≥ 0` on the
/// quantum diameter.
pub fn estimate_k(diameter_upper: f64) -> Result<f64> {
    if !(diameter_upper >= 0.0 && diameter_upper.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "diameter upper bound must be finite and nonnegative, got {diameter_upper}"
        )));
    }
    Ok(2.0 * diameter_upper + 1.0)
}

/// Evaluates the distance estimate.  Never fails: out-of-regime inputs are
/// flagged, not rejected.
pub fn propinquity_upper_bound(est: &DeviationEstimates) -> BoundReport {
    let epsilon = est.delta_lip_rel.max(est.delta_op_rel / est.k);
    let extent = est.k * epsilon;
    let bound = 5.0 * extent;
    let slope = 3.0 * extent;
    let horizon = if bound > 0.0 { Some(1.0 / bound) } else { None };
    let in_regime = epsilon <= 1.0_f64.min(1.0 / (est.k + 1.0));

    let mut caveats = Vec::new();
    if est.probe_restricted {
        caveats.push(
            "deviations were measured on a restricted probe set; they estimate the true \
             deviations from below"
                .to_string(),
        );
    }
    if !in_regime {
        caveats.push(format!(
            "epsilon = {epsilon:.6e} exceeds the admissible regime min{{1, 1/(K+1)}} = {:.6e}; \
             the reported numbers are extrapolations",
            1.0_f64.min(1.0 / (est.k + 1.0))
        ));
    }

    BoundReport {
        epsilon,
        tunnel_extent_bound: extent,
        semigroup_slope: slope,
        time_horizon: horizon,
        propinquity_bound: bound,
        caveats,
        in_regime,
    }
}

/// Element-wise bound evaluation over a family, with a monotonicity
/// diagnostic (`nonincreasing` = every bound `≤` its predecessor).
#[derive(Debug, Clone, Serialize)]
pub struct BoundSweep {
    pub reports: Vec<BoundReport>,
    pub nonincreasing: bool,
}

pub fn bound_sweep(estimates: &[DeviationEstimates]) -> BoundSweep {
    let reports: Vec<BoundReport> = estimates.iter().map(propinquity_upper_bound).collect();
    let nonincreasing = reports
        .windows(2)
        .all(|w| w[1].propinquity_bound <= w[0].propinquity_bound);
    BoundSweep {
        reports,
        nonincreasing,
    }
}
