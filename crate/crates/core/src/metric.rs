//! Fourier-polynomial Riemannian metrics on `T^1`/`T^2` and their pointwise
//! differential geometry.
//!
//! A [`MetricField`] stores, per component `g_{jk}`, a sparse Fourier table,
//! plus the sampling resolution used for every sup-norm in this crate.  The
//! single global periodic chart is the entire atlas: `T^d = R^d/2πZ^d` with
//! coordinates `x^p ∈ [0, 2π)`.  Invariants enforced at construction: reality
//! of each coefficient table, symmetry `g_{jk} = g_{kj}` (stored once),
//! `grid_resolution ≥ 4 ×` the largest retained Fourier index (so that grid
//! maxima of trigonometric polynomials are faithful sup norms), and SPD at
//! every grid point with smallest eigenvalue `≥ 1e-8`.
//!
//! A [`MetricGrid`] samples the metric and derives, exactly (metric
//! derivatives come from the coefficient tables; everything else is closed
//! algebra of those samples, no numerical differentiation anywhere):
//!
//! * `g`, `∂_p g`, `g^{-1}`, `det g` and the orthonormal frame
//!   `E = G^{-1/2}` (columns `e_j`, so `e_j^p = E[p][j]`, `Eᵀ G E = I`);
//! * Christoffel symbols
//!   `Γ^p_{jq} = ½ Σ_l g^{pl}(∂_j g_{lq} + ∂_q g_{jl} − ∂_l g_{jq})`;
//! * frame derivatives `∂_p e_j^q` (differentiating the 2×2 closed form of
//!   the inverse square root);
//! * spin coefficients stored derivative-index-first,
//!   `ω_{jkl} = g(∇_{e_j} e_k, e_l)`, antisymmetric in `(k, l)` for each
//!   fixed `j` (verified within `1e-9`) — this is the index layout consumed
//!   by the spin lift `∇̸_{e_j} = ∂_{e_j} + ¼ Σ_{k,l} ω_{jkl} c(e_k)c(e_l)`;
//! * the log-volume derivative `κ_p = ¼ ∂_p log det g` via the trace
//!   identity `∂_p log det g = tr(g^{-1} ∂_p g)`.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::SparseTable;
use crate::linalg::{C64, RMatrix};

/// Number of stored (upper-triangular) components for dimension `d`.
fn comp_count(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Index of component `(j, k)` (0-based, order (0,0), (0,1), (1,1)).
fn sym_idx(j: usize, k: usize) -> usize {
    let (a, b) = if j <= k { (j, k) } else { (k, j) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        _ => unreachable!("d ≤ 2"),
    }
}

/// A validated metric field: sparse Fourier tables per component plus the
/// sampling resolution.
#[derive(Debug, Clone)]
pub struct MetricField {
    d: usize,
    comps: Vec<SparseTable>,
    grid_resolution: usize,
}

#[derive(Serialize, Deserialize)]
struct FileEntry {
    n: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct FileForm {
    d: usize,
    components: BTreeMap<String, Vec<FileEntry>>,
    grid_resolution: usize,
}

impl MetricField {
    /// Builds and validates a metric from component tables in the order
    /// `(0,0)` for `d = 1`; `(0,0), (0,1), (1,1)` for `d = 2`.
    pub fn new(d: usize, comps: Vec<SparseTable>, grid_resolution: usize) -> Result<Self> {
        if d == 0 || d > 2 {
            return Err(Error::InvalidInput(format!(
                "metric dimension must be 1 or 2, got {d}"
            )));
        }
        if comps.len() != comp_count(d) {
            return Err(Error::DimensionMismatch {
                expected: comp_count(d),
                found: comps.len(),
                context: "MetricField::new (component count)".into(),
            });
        }
        let mut max_mode = 0i64;
        for (i, t) in comps.iter().enumerate() {
            if t.d() != d {
                return Err(Error::GridMismatch {
                    context: format!("component {i} has dimension {} ≠ {d}", t.d()),
                });
            }
            t.validate_reality(&format!("metric component {i}"))?;
            max_mode = max_mode.max(t.max_mode());
        }
        let min_res = (4 * max_mode as usize).max(4);
        if grid_resolution < min_res {
            return Err(Error::InvalidInput(format!(
                "grid_resolution {grid_resolution} below 4× the largest Fourier index \
                 (need at least {min_res})"
            )));
        }
        let field = Self {
            d,
            comps,
            grid_resolution,
        };
        field.check_spd()?;
        Ok(field)
    }

    /// Constant metric from an SPD matrix.
    pub fn constant(matrix: &RMatrix, grid_resolution: usize) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || d > 2 || matrix.ncols() != d {
            return Err(Error::InvalidInput(
                "constant metric needs a 1×1 or 2×2 matrix".into(),
            ));
        }
        let mut comps = Vec::new();
        for j in 0..d {
            for k in j..d {
                let mut t = SparseTable::new(d)?;
                t.insert([0, 0], C64::new(matrix[[j, k]], 0.0))?;
                comps.push(t);
            }
        }
        Self::new(d, comps, grid_resolution)
    }

    /// Flat metric `δ`.
    pub fn flat(d: usize, grid_resolution: usize) -> Result<Self> {
        Self::constant(&RMatrix::eye(d), grid_resolution)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    /// Component table `g_{jk}` (symmetric lookup, 0-based indices).
    pub fn comp(&self, j: usize, k: usize) -> &SparseTable {
        &self.comps[sym_idx(j, k)]
    }

    /// Largest Fourier index retained in any component.
    pub fn max_mode(&self) -> i64 {
        self.comps.iter().map(|t| t.max_mode()).max().unwrap_or(0)
    }

    /// `g + t · P` where `P` is given per component in the same order as
    /// [`MetricField::new`]; the perturbed field is revalidated in full.
    pub fn add_scaled(&self, direction: &[SparseTable], t: f64) -> Result<Self> {
        if direction.len() != self.comps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.comps.len(),
                found: direction.len(),
                context: "MetricField::add_scaled (direction component count)".into(),
            });
        }
        let comps = self
            .comps
            .iter()
            .zip(direction.iter())
            .map(|(c, p)| c.add_scaled(p, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.d, comps, self.grid_resolution)
    }

    fn check_spd(&self) -> Result<()> {
        let r = self.grid_resolution;
        let grids: Vec<Array2<C64>> = self.comps.iter().map(|t| t.eval_grid(r)).collect();
        let cols = if self.d == 2 { r } else { 1 };
        for i in 0..r {
            for j in 0..cols {
                let min_eig = if self.d == 1 {
                    grids[0][[i, j]].re
                } else {
                    let a = grids[0][[i, j]].re;
                    let b = grids[1][[i, j]].re;
                    let c = grids[2][[i, j]].re;
                    let tr = a + c;
                    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
                    0.5 * (tr - disc)
                };
                if min_eig < 1e-8 {
                    return Err(Error::NotPositiveDefinite {
                        eigenvalue: min_eig,
                        context: format!(" at grid point ({i}, {j})"),
                    });
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of a canonical rendering of the field (dimension, grid
    /// resolution, and every coefficient at full precision) — stamped into
    /// output provenance so results can be traced to their exact input.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut text = format!("d={};r={}", self.d, self.grid_resolution);
        for j in 0..self.d {
            for k in j..self.d {
                text.push_str(&format!(";g{}{}:", j + 1, k + 1));
                for (n, c) in self.comp(j, k).iter() {
                    text.push_str(&format!(
                        "({},{},{:.17e},{:.17e})",
                        n[0], n[1], c.re, c.im
                    ));
                }
            }
        }
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Serializes to the interchange JSON object
    /// `{"d": …, "components": {"11": [{"n": …, "re": …, "im": …}, …], …},
    ///   "grid_resolution": …}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut components = BTreeMap::new();
        for j in 0..self.d {
            for k in j..self.d {
                let key = format!("{}{}", j + 1, k + 1);
                let entries: Vec<FileEntry> = self
                    .comp(j, k)
                    .iter()
                    .map(|(&n, &c)| FileEntry {
                        n: n[..self.d].to_vec(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect();
                components.insert(key, entries);
            }
        }
        serde_json::to_value(FileForm {
            d: self.d,
            components,
            grid_resolution: self.grid_resolution,
        })
        .expect("metric file form serializes")
    }

    /// Parses and validates the interchange JSON object.  Component keys are
    /// `"11"`, `"12"`, `"22"` (1-based index pairs); a redundant `"21"` must
    /// agree with `"12"`; missing off-diagonal components default to zero.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let (d, comps, grid_resolution) = parse_component_tables(v)?;
        Self::new(d, comps, grid_resolution)
    }
}

/// Parses the metric interchange format into raw component tables without
/// requiring positive definiteness, for symmetric perturbation *directions*
/// (typically indefinite).  Reality of each component is still enforced.
/// Returns `(d, components in upper-triangle order, grid_resolution)`.
pub fn direction_from_json(v: &serde_json::Value) -> Result<(usize, Vec<SparseTable>, usize)> {
    let (d, comps, grid_resolution) = parse_component_tables(v)?;
    for (i, t) in comps.iter().enumerate() {
        t.validate_reality(&format!("direction component {i}"))?;
    }
    Ok((d, comps, grid_resolution))
}

fn parse_component_tables(
    v: &serde_json::Value,
) -> Result<(usize, Vec<SparseTable>, usize)> {
    {
        let form: FileForm = serde_json::from_value(v.clone())?;
        let d = form.d;
        if d == 0 || d > 2 {
            return Err(Error::InvalidInput(format!(
                "metric dimension must be 1 or 2, got {d}"
            )));
        }
        let mut tables: BTreeMap<(usize, usize), SparseTable> = BTreeMap::new();
        for (key, entries) in form.components.iter() {
            let bytes = key.as_bytes();
            if bytes.len() != 2 || !bytes.iter().all(|b| (b'1'..=b'9').contains(b)) {
                return Err(Error::InvalidInput(format!(
                    "component key {key:?} is not an index pair like \"12\""
                )));
            }
            let j = (bytes[0] - b'1') as usize;
            let k = (bytes[1] - b'1') as usize;
            if j >= d || k >= d {
                return Err(Error::InvalidInput(format!(
                    "component key {key:?} out of range for d = {d}"
                )));
            }
            let mut t = SparseTable::new(d)?;
            for e in entries {
                let n = match e.n.len() {
                    l if l == d => {
                        let mut n = [0i64; 2];
                        n[..d].copy_from_slice(&e.n);
                        n
                    }
                    2 if d == 1 && e.n[1] == 0 => [e.n[0], 0],
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "mode index {:?} has wrong length for d = {d}",
                            e.n
                        )))
                    }
                };
                let prev = t.get(n);
                if prev != C64::new(0.0, 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "duplicate mode {:?} in component {key:?}",
                        e.n
                    )));
                }
                t.insert(n, C64::new(e.re, e.im))?;
            }
            if let Some(existing) = tables.get(&(j.min(k), j.max(k))) {
                // A transposed duplicate key (e.g. both "12" and "21") must
                // carry the identical table.
                if existing != &t {
                    return Err(Error::InvalidInput(format!(
                        "components {key:?} and its transpose disagree"
                    )));
                }
            } else {
                tables.insert((j.min(k), j.max(k)), t);
            }
        }
        let mut comps = Vec::new();
        for j in 0..d {
            for k in j..d {
                let t = tables
                    .remove(&(j, k))
                    .map(Ok)
                    .unwrap_or_else(|| {
                        if j == k {
                            Err(Error::InvalidInput(format!(
                                "missing diagonal component \"{}{}\"",
                                j + 1,
                                k + 1
                            )))
                        } else {
                            SparseTable::new(d)
                        }
                    })?;
                comps.push(t);
            }
        }
        Ok((d, comps, form.grid_resolution))
    }
}

/// `C¹` distance between two metric fields on the same grid:
/// `max_{j,k} [ sup |h_{jk} − g_{jk}| + max_p sup |∂_p(h_{jk} − g_{jk})| ]`,
/// sup norms as grid maxima and derivatives by exact Fourier
/// differentiation of the coefficient tables.
pub fn c1_distance(g: &MetricField, h: &MetricField) -> Result<f64> {
    if g.d() != h.d() || g.grid_resolution() != h.grid_resolution() {
        return Err(Error::GridMismatch {
            context: format!(
                "c1_distance needs matching charts: d {} vs {}, resolution {} vs {}",
                g.d(),
                h.d(),
                g.grid_resolution(),
                h.grid_resolution()
            ),
        });
    }
    let d = g.d();
    let r = g.grid_resolution();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in j..d {
            let diff = h.comp(j, k).add_scaled(g.comp(j, k), -1.0)?;
            let sup0 = crate::fourier::sup_abs_grid(&diff.eval_grid(r));
            let mut sup_d = 0.0f64;
            for p in 0..d {
                let dp = diff.derivative(p)?;
                sup_d = sup_d.max(crate::fourier::sup_abs_grid(&dp.eval_grid(r)));
            }
            worst = worst.max(sup0 + sup_d);
        }
    }
    Ok(worst)
}

/// Pointwise volume-correction factor `f_g^h = (det g / det h)^{1/4}` on the
/// shared grid.  The quarter power is the exponent that makes multiplication
/// by `f_g^h` unitary `L²(vol_h) → L²(vol_g)`: `|f_g^h|²·√(det h) = √(det g)`
/// pointwise.
pub fn volume_correction_grid(g: &MetricField, h: &MetricField) -> Result<Array2<f64>> {
    if g.d() != h.d() || g.grid_resolution() != h.grid_resolution() {
        return Err(Error::GridMismatch {
            context: "volume_correction needs matching charts".into(),
        });
    }
    let gg = MetricGrid::new(g)?;
    let hh = MetricGrid::new(h)?;
    Ok(azip_grid(gg.det(), hh.det(), |a, b| (a / b).powf(0.25)))
}

/// [`volume_correction_grid`] at a single grid point `(i, j)` (use `j = 0`
/// for `d = 1`).
pub fn volume_correction(g: &MetricField, h: &MetricField, point: [usize; 2]) -> Result<f64> {
    let grid = volume_correction_grid(g, h)?;
    check_point(&grid, point)?;
    Ok(grid[[point[0], point[1]]])
}

fn check_point(grid: &Array2<f64>, point: [usize; 2]) -> Result<()> {
    if point[0] >= grid.shape()[0] || point[1] >= grid.shape()[1] {
        return Err(Error::IndexOutOfRange {
            index: point[0].max(point[1]) as i64,
            max: grid.shape()[0].max(grid.shape()[1]) as i64 - 1,
            context: "grid point lookup".into(),
        });
    }
    Ok(())
}

fn azip_grid(a: &Array2<f64>, b: &Array2<f64>, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
    let mut out = a.clone();
    out.zip_mut_with(b, |x, &y| *x = f(*x, y));
    out
}

/// Sampled metric with every derived geometric field precomputed on the grid.
pub struct MetricGrid {
    d: usize,
    r: usize,
    /// Symmetric components `g_{jk}`, upper-triangular storage.
    g: Vec<Array2<f64>>,
    /// `∂_p g_{jk}`: `dg[p][sym_idx]`.
    dg: Vec<Vec<Array2<f64>>>,
    /// Inverse components, upper-triangular storage.
    ginv: Vec<Array2<f64>>,
    det: Array2<f64>,
    /// Frame components `e_j^p = frame[p][j]` (so `E = G^{-1/2}` columnwise).
    frame: Vec<Vec<Array2<f64>>>,
    /// `∂_p e_j^q = dframe[p][q][j]`.
    dframe: Vec<Vec<Vec<Array2<f64>>>>,
    /// `Γ^p_{jq} = christoffel[p][j][q]`.
    christoffel: Vec<Vec<Vec<Array2<f64>>>>,
    /// `ω_{jkl} = g(∇_{e_j} e_k, e_l) = omega[j][k][l]` (derivative index
    /// first; antisymmetric in `(k, l)`).
    omega: Vec<Vec<Vec<Array2<f64>>>>,
    /// `κ_p = ¼ ∂_p log det g`.
    kappa: Vec<Array2<f64>>,
}

impl MetricGrid {
    pub fn new(field: &MetricField) -> Result<Self> {
        let d = field.d();
        let r = field.grid_resolution();
        let cols = if d == 2 { r } else { 1 };
        let nc = comp_count(d);

        let real =
            |t: &SparseTable| -> Array2<f64> { t.eval_grid(r).mapv(|z| z.re) };

        let mut g: Vec<Array2<f64>> = Vec::with_capacity(nc);
        for j in 0..d {
            for k in j..d {
                g.push(real(field.comp(j, k)));
            }
        }
        let mut dg: Vec<Vec<Array2<f64>>> = Vec::with_capacity(d);
        for p in 0..d {
            let mut per = Vec::with_capacity(nc);
            for j in 0..d {
                for k in j..d {
                    per.push(real(&field.comp(j, k).derivative(p)?));
                }
            }
            dg.push(per);
        }

        let zeros = || Array2::<f64>::zeros((r, cols));
        let mut ginv = vec![zeros(); nc];
        let mut det = zeros();
        let mut frame = vec![vec![zeros(); d]; d];
        let mut dframe = vec![vec![vec![zeros(); d]; d]; d];

        for i in 0..r {
            for jj in 0..cols {
                if d == 1 {
                    let a = g[0][[i, jj]];
                    if a < 1e-8 {
                        return Err(Error::NotPositiveDefinite {
                            eigenvalue: a,
                            context: format!(" at grid point ({i}, {jj})"),
                        });
                    }
                    det[[i, jj]] = a;
                    ginv[0][[i, jj]] = 1.0 / a;
                    frame[0][0][[i, jj]] = 1.0 / a.sqrt();
                    let da = dg[0][0][[i, jj]];
                    dframe[0][0][0][[i, jj]] = -0.5 * da / (a * a.sqrt());
                } else {
                    let a = g[0][[i, jj]];
                    let b = g[1][[i, jj]];
                    let c = g[2][[i, jj]];
                    let delta = a * c - b * b;
                    let tr = a + c;
                    let min_eig = 0.5 * (tr - ((a - c) * (a - c) + 4.0 * b * b).sqrt());
                    if min_eig < 1e-8 {
                        return Err(Error::NotPositiveDefinite {
                            eigenvalue: min_eig,
                            context: format!(" at grid point ({i}, {jj})"),
                        });
                    }
                    det[[i, jj]] = delta;
                    ginv[0][[i, jj]] = c / delta;
                    ginv[1][[i, jj]] = -b / delta;
                    ginv[2][[i, jj]] = a / delta;

                    // Closed-form inverse square root of a 2×2 SPD matrix:
                    // with u = √det, s = √(tr + 2u),
                    //   G^{-1/2} = (adj(G) + u·I) / (u·s).
                    let u = delta.sqrt();
                    let s = (tr + 2.0 * u).sqrt();
                    let denom = u * s;
                    let a11 = c + u;
                    let a12 = -b;
                    let a22 = a + u;
                    // frame[p][j] = E_{p j}.
                    frame[0][0][[i, jj]] = a11 / denom;
                    frame[0][1][[i, jj]] = a12 / denom;
                    frame[1][0][[i, jj]] = a12 / denom;
                    frame[1][1][[i, jj]] = a22 / denom;

                    for p in 0..2 {
                        let da = dg[p][0][[i, jj]];
                        let db = dg[p][1][[i, jj]];
                        let dc = dg[p][2][[i, jj]];
                        let ddelta = da * c + a * dc - 2.0 * b * db;
                        let du = ddelta / (2.0 * u);
                        let ds = (da + dc + 2.0 * du) / (2.0 * s);
                        let ddenom = du * s + u * ds;
                        let d11 = dc + du;
                        let d12 = -db;
                        let d22 = da + du;
                        dframe[p][0][0][[i, jj]] = (d11 * denom - a11 * ddenom) / (denom * denom);
                        dframe[p][0][1][[i, jj]] = (d12 * denom - a12 * ddenom) / (denom * denom);
                        dframe[p][1][0][[i, jj]] = dframe[p][0][1][[i, jj]];
                        dframe[p][1][1][[i, jj]] = (d22 * denom - a22 * ddenom) / (denom * denom);
                    }
                }
            }
        }

        // Christoffel symbols Γ^p_{jq}.
        let mut christoffel = vec![vec![vec![zeros(); d]; d]; d];
        for p in 0..d {
            for j in 0..d {
                for q in 0..d {
                    let mut grid = zeros();
                    for l in 0..d {
                        let gpl = &ginv[sym_idx(p, l)];
                        let t1 = &dg[j][sym_idx(l, q)];
                        let t2 = &dg[q][sym_idx(j, l)];
                        let t3 = &dg[l][sym_idx(j, q)];
                        for i in 0..r {
                            for jj in 0..cols {
                                grid[[i, jj]] += 0.5
                                    * gpl[[i, jj]]
                                    * (t1[[i, jj]] + t2[[i, jj]] - t3[[i, jj]]);
                            }
                        }
                    }
                    christoffel[p][j][q] = grid;
                }
            }
        }

        // Spin coefficients ω_{jkl} = g(∇_{e_j} e_k, e_l), derivative first.
        let mut omega = vec![vec![vec![zeros(); d]; d]; d];
        for j in 0..d {
            for k in 0..d {
                // Coefficient of ∂_q in ∇_{e_j} e_k.
                let mut w = vec![zeros(); d];
                for q in 0..d {
                    for i in 0..r {
                        for jj in 0..cols {
                            let mut s = 0.0;
                            for m in 0..d {
                                s += frame[m][j][[i, jj]] * dframe[m][q][k][[i, jj]];
                                for pp in 0..d {
                                    s += frame[m][j][[i, jj]]
                                        * frame[pp][k][[i, jj]]
                                        * christoffel[q][m][pp][[i, jj]];
                                }
                            }
                            w[q][[i, jj]] = s;
                        }
                    }
                }
                for l in 0..d {
                    let mut grid = zeros();
                    for q in 0..d {
                        for ss in 0..d {
                            let gqs = &g[sym_idx(q, ss)];
                            for i in 0..r {
                                for jj in 0..cols {
                                    grid[[i, jj]] +=
                                        gqs[[i, jj]] * frame[ss][l][[i, jj]] * w[q][[i, jj]];
                                }
                            }
                        }
                    }
                    omega[j][k][l] = grid;
                }
            }
        }

        // Antisymmetry in (k, l) for each fixed derivative index j — a
        // consequence of metric compatibility; its failure means the inputs
        // were inconsistent or the algebra above drifted.
        let mut asym = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    for i in 0..r {
                        for jj in 0..cols {
                            asym = asym
                                .max((omega[j][k][l][[i, jj]] + omega[j][l][k][[i, jj]]).abs());
                        }
                    }
                }
            }
        }
        if asym > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "spin coefficients lost antisymmetry in the last index pair: {asym:.3e} > 1e-9"
            )));
        }

        // κ_p = ¼ ∂_p log det g = ¼ tr(g^{-1} ∂_p g).
        let mut kappa = vec![zeros(); d];
        for p in 0..d {
            for i in 0..r {
                for jj in 0..cols {
                    let mut tr = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            tr += ginv[sym_idx(a, b)][[i, jj]] * dg[p][sym_idx(b, a)][[i, jj]];
                        }
                    }
                    kappa[p][[i, jj]] = 0.25 * tr;
                }
            }
        }

        Ok(Self {
            d,
            r,
            g,
            dg,
            ginv,
            det,
            frame,
            dframe,
            christoffel,
            omega,
            kappa,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn det(&self) -> &Array2<f64> {
        &self.det
    }

    pub fn g_comp(&self, j: usize, k: usize) -> &Array2<f64> {
        &self.g[sym_idx(j, k)]
    }

    pub fn ginv_comp(&self, j: usize, k: usize) -> &Array2<f64> {
        &self.ginv[sym_idx(j, k)]
    }

    pub fn dg_comp(&self, p: usize, j: usize, k: usize) -> &Array2<f64> {
        &self.dg[p][sym_idx(j, k)]
    }

    /// Grid of `e_j^p` (component `p` of frame vector `e_j`).
    pub fn frame_grid(&self, p: usize, j: usize) -> &Array2<f64> {
        &self.frame[p][j]
    }

    /// Grid of `∂_p e_j^q`.
    pub fn dframe_grid(&self, p: usize, q: usize, j: usize) -> &Array2<f64> {
        &self.dframe[p][q][j]
    }

    pub fn christoffel_grid(&self, p: usize, j: usize, q: usize) -> &Array2<f64> {
        &self.christoffel[p][j][q]
    }

    /// Grid of `ω_{jkl} = g(∇_{e_j} e_k, e_l)`.
    pub fn omega_grid(&self, j: usize, k: usize, l: usize) -> &Array2<f64> {
        &self.omega[j][k][l]
    }

    /// Grid of `κ_p = ¼ ∂_p log det g`.
    pub fn kappa_grid(&self, p: usize) -> &Array2<f64> {
        &self.kappa[p]
    }

    /// Metric matrix at a grid point.
    pub fn g_at(&self, point: [usize; 2]) -> Result<RMatrix> {
        check_point(&self.det, point)?;
        let mut m = RMatrix::zeros((self.d, self.d));
        for j in 0..self.d {
            for k in 0..self.d {
                m[[j, k]] = self.g[sym_idx(j, k)][[point[0], point[1]]];
            }
        }
        Ok(m)
    }

    /// Frame matrix `E(x) = G(x)^{-1/2}` at a grid point (columns `e_j`).
    pub fn frame_at(&self, point: [usize; 2]) -> Result<RMatrix> {
        check_point(&self.det, point)?;
        let mut m = RMatrix::zeros((self.d, self.d));
        for p in 0..self.d {
            for j in 0..self.d {
                m[[p, j]] = self.frame[p][j][[point[0], point[1]]];
            }
        }
        Ok(m)
    }

    /// `Γ^p_{jq}` at a grid point, indexed `[p][j][q]`.
    pub fn christoffel_at(&self, point: [usize; 2]) -> Result<Vec<Vec<Vec<f64>>>> {
        check_point(&self.det, point)?;
        let d = self.d;
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for p in 0..d {
            for j in 0..d {
                for q in 0..d {
                    out[p][j][q] = self.christoffel[p][j][q][[point[0], point[1]]];
                }
            }
        }
        Ok(out)
    }

    /// `ω_{jkl}` at a grid point, indexed `[j][k][l]` (derivative first).
    pub fn omega_at(&self, point: [usize; 2]) -> Result<Vec<Vec<Vec<f64>>>> {
        check_point(&self.det, point)?;
        let d = self.d;
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[j][k][l] = self.omega[j][k][l][[point[0], point[1]]];
                }
            }
        }
        Ok(out)
    }

    /// `κ_p` at a grid point.
    pub fn kappa_at(&self, point: [usize; 2]) -> Result<Vec<f64>> {
        check_point(&self.det, point)?;
        Ok((0..self.d)
            .map(|p| self.kappa[p][[point[0], point[1]]])
            .collect())
    }
}
