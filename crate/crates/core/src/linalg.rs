//! Dense Hermitian linear algebra: validated matrix types, LAPACK-backed
//! eigendecomposition, SPD square roots, LU solves, and spectrum clustering.
//!
//! All eigenvalue work goes through LAPACK (`zheevd` for complex Hermitian,
//! `dsyev` for real symmetric): Householder tridiagonalization followed by a
//! deterministic dense solver.  Matrices are `ndarray` arrays in row-major
//! layout; the column-major transpose happens once at the FFI boundary.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = Array2<C64>;
/// Dense real matrix.
pub type RMatrix = Array2<f64>;

/// Relative tolerance for the Hermiticity invariant:
/// `max |A - A*| ≤ HERMITICITY_RTOL · (1 + max |A|)`.
pub const HERMITICITY_RTOL: f64 = 1e-12;

/// Entrywise deviation of a square matrix from its own conjugate transpose,
/// `max_{i,j} |A_{ij} - conj(A_{ji})|`.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols(), "hermiticity_deviation needs a square matrix");
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// A square complex matrix with the Hermiticity invariant enforced at
/// construction: `max |A - A*| ≤ 1e-12 · (1 + max |A|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
}

impl HermitianMatrix {
    /// Validates and wraps `data`.  Fails with the measured deviation when the
    /// invariant does not hold.
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
                context: "HermitianMatrix::new (square matrix required)".into(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidInput(
                "HermitianMatrix must have dimension >= 1".into(),
            ));
        }
        let deviation = hermiticity_deviation(&data);
        let tol = HERMITICITY_RTOL * (1.0 + max_abs(&data));
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self { data })
    }

    /// Averages `data` with its adjoint and wraps the result; returns the
    /// pre-averaging deviation so callers can enforce their own threshold.
    /// The averaged matrix is Hermitian by construction.
    pub fn symmetrized(data: CMatrix) -> (Self, f64) {
        let n = data.nrows();
        assert_eq!(n, data.ncols(), "symmetrized needs a square matrix");
        let deviation = hermiticity_deviation(&data);
        let mut avg = data;
        for i in 0..n {
            for j in i..n {
                let m = 0.5 * (avg[[i, j]] + avg[[j, i]].conj());
                avg[[i, j]] = m;
                avg[[j, i]] = m.conj();
            }
        }
        (Self { data: avg }, deviation)
    }

    /// Builds from a real symmetric matrix (exact Hermiticity).
    pub fn from_real(a: &RMatrix) -> Result<Self> {
        Self::new(a.mapv(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_array(self) -> CMatrix {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
}

/// Eigenvalues (ascending) and matching eigenvectors (column `k` of `vectors`
/// belongs to `values[k]`).
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn to_col_major(a: &CMatrix) -> Vec<C64> {
    let n = a.nrows();
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            buf[j * n + i] = a[[i, j]];
        }
    }
    buf
}

/// Raw `zheevd` driver: `jobz` is `b'V'` (vectors) or `b'N'` (values only).
/// Input row-major; returned matrix (for `b'V'`) is row-major with
/// eigenvectors in columns.
fn zheevd_driver(a: &CMatrix, jobz: u8) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = a.nrows();
    let ni = n as i32;
    let mut buf = to_col_major(a);
    let mut w = vec![0.0f64; n];
    let mut info: i32 = 0;

    // Workspace query.
    let mut work_q = [C64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack::zheevd(
            jobz, b'L', ni, &mut buf, ni, &mut w, &mut work_q, -1, &mut rwork_q, -1, &mut iwork_q,
            -1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::LapackFailure {
            routine: "zheevd (workspace query)",
            info,
        });
    }
    let lwork = work_q[0].re as i32;
    let lrwork = rwork_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack::zheevd(
            jobz, b'L', ni, &mut buf, ni, &mut w, &mut work, lwork, &mut rwork, lrwork, &mut iwork,
            liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::LapackFailure {
            routine: "zheevd",
            info,
        });
    }
    let vectors = if jobz == b'V' {
        let mut v = CMatrix::zeros((n, n));
        for k in 0..n {
            for i in 0..n {
                v[[i, k]] = buf[k * n + i];
            }
        }
        Some(v)
    } else {
        None
    };
    Ok((w, vectors))
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Post-conditions, verified before returning: eigenvalues ascending, and
/// `‖A v_k − λ_k v_k‖₂ ≤ 1e-10 · (1 + ‖A‖)` for every eigenpair, with `‖A‖`
/// the spectral radius.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Eigendecomposition> {
    let (values, vectors) = zheevd_driver(a.as_array(), b'V')?;
    let vectors = vectors.expect("jobz='V' returns vectors");
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));

    let n = a.dim();
    let norm_a = values
        .first()
        .map(|lo| lo.abs())
        .unwrap_or(0.0)
        .max(values.last().map(|hi| hi.abs()).unwrap_or(0.0));
    let tol = 1e-10 * (1.0 + norm_a);
    // Residual AV − VΛ, columnwise.
    let av = a.as_array().dot(&vectors);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let mut sq = 0.0f64;
        for i in 0..n {
            sq += (av[[i, k]] - values[k] * vectors[[i, k]]).norm_sqr();
        }
        worst = worst.max(sq.sqrt());
    }
    if worst > tol {
        return Err(Error::ResidualCheck {
            residual: worst,
            tol,
        });
    }
    Ok(Eigendecomposition { values, vectors })
}

/// Eigenvalues only (ascending); cheaper than [`eig_hermitian`] because no
/// eigenvectors are accumulated.
pub fn eigvals_hermitian(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let (values, _) = zheevd_driver(a.as_array(), b'N')?;
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    Ok(values)
}

/// Eigendecomposition of a real symmetric matrix via `dsyev`.
/// Returns ascending eigenvalues and eigenvectors as columns.
pub fn sym_eig(a: &RMatrix) -> Result<(Vec<f64>, RMatrix)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
            context: "sym_eig (square matrix required)".into(),
        });
    }
    let sym_dev = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max((a[[i, j]] - a[[j, i]]).abs()));
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sym_dev > HERMITICITY_RTOL * (1.0 + scale) {
        return Err(Error::NotHermitian {
            deviation: sym_dev,
            tol: HERMITICITY_RTOL * (1.0 + scale),
        });
    }
    let ni = n as i32;
    let mut buf = vec![0.0f64; n * n];
    for j in 0..n {
        for i in 0..n {
            buf[j * n + i] = a[[i, j]];
        }
    }
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    let mut work_q = [0.0f64];
    unsafe {
        lapack::dsyev(b'V', b'L', ni, &mut buf, ni, &mut w, &mut work_q, -1, &mut info);
    }
    if info != 0 {
        return Err(Error::LapackFailure {
            routine: "dsyev (workspace query)",
            info,
        });
    }
    let lwork = work_q[0] as i32;
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    unsafe {
        lapack::dsyev(b'V', b'L', ni, &mut buf, ni, &mut w, &mut work, lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::LapackFailure {
            routine: "dsyev",
            info,
        });
    }
    let mut v = RMatrix::zeros((n, n));
    for k in 0..n {
        for i in 0..n {
            v[[i, k]] = buf[k * n + i];
        }
    }
    Ok((w, v))
}

/// Spectral function of a real symmetric positive definite matrix:
/// `f_spd(A) = V f(Λ) Vᵀ`.  Rejects any eigenvalue `≤ 0`.
fn spd_spectral_map(a: &RMatrix, f: impl Fn(f64) -> f64, context: &str) -> Result<RMatrix> {
    let (w, v) = sym_eig(a)?;
    if let Some(&lo) = w.first() {
        if lo <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: lo,
                context: format!(" in {context}"),
            });
        }
    }
    let n = a.nrows();
    let mut out = RMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += v[[i, k]] * f(w[k]) * v[[j, k]];
            }
            out[[i, j]] = s;
        }
    }
    // Exact symmetrization (the spectral form is symmetric up to rounding).
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (out[[i, j]] + out[[j, i]]);
            out[[i, j]] = m;
            out[[j, i]] = m;
        }
    }
    Ok(out)
}

/// Unique SPD square root `A^{1/2}` of a symmetric positive definite matrix.
pub fn sqrt_spd(a: &RMatrix) -> Result<RMatrix> {
    spd_spectral_map(a, f64::sqrt, "sqrt_spd")
}

/// Inverse SPD square root `A^{-1/2}`.
pub fn inv_sqrt_spd(a: &RMatrix) -> Result<RMatrix> {
    spd_spectral_map(a, |x| 1.0 / x.sqrt(), "inv_sqrt_spd")
}

/// Inverse of a symmetric positive definite matrix.
pub fn inv_spd(a: &RMatrix) -> Result<RMatrix> {
    spd_spectral_map(a, |x| 1.0 / x, "inv_spd")
}

/// Determinant by LU with partial pivoting (small dense matrices).
pub fn det_lu(a: &RMatrix) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "det_lu needs a square matrix");
    if n == 0 {
        return 1.0;
    }
    let mut m = a.clone();
    let mut det = 1.0f64;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[[col, col]].abs();
        for r in (col + 1)..n {
            if m[[r, col]].abs() > best {
                best = m[[r, col]].abs();
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                let t = m[[col, c]];
                m[[col, c]] = m[[piv, c]];
                m[[piv, c]] = t;
            }
            det = -det;
        }
        det *= m[[col, col]];
        for r in (col + 1)..n {
            let factor = m[[r, col]] / m[[col, col]];
            for c in col..n {
                m[[r, c]] -= factor * m[[col, c]];
            }
        }
    }
    det
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Operator (spectral) norm of a Hermitian matrix: `max |λ|`.
pub fn hermitian_op_norm(a: &HermitianMatrix) -> Result<f64> {
    let w = eigvals_hermitian(a)?;
    Ok(w.first()
        .map(|lo| lo.abs())
        .unwrap_or(0.0)
        .max(w.last().map(|hi| hi.abs()).unwrap_or(0.0)))
}

/// LU factorization of a general square complex matrix, for repeated solves
/// with the matrix or its conjugate transpose.
pub struct LuFactors {
    n: usize,
    a: Vec<C64>, // column-major factored matrix
    ipiv: Vec<i32>,
}

impl LuFactors {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
                context: "LuFactors::new (square matrix required)".into(),
            });
        }
        let mut buf = to_col_major(a);
        let mut ipiv = vec![0i32; n];
        let mut info = 0i32;
        unsafe {
            lapack::zgetrf(n as i32, n as i32, &mut buf, n as i32, &mut ipiv, &mut info);
        }
        if info != 0 {
            return Err(Error::LapackFailure {
                routine: "zgetrf",
                info,
            });
        }
        Ok(Self { n, a: buf, ipiv })
    }

    /// Solves `A x = b` (`conjugate_transpose = false`) or `A* x = b` (`true`).
    pub fn solve(&self, b: &[C64], conjugate_transpose: bool) -> Result<Vec<C64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
                context: "LuFactors::solve".into(),
            });
        }
        let mut x = b.to_vec();
        let mut info = 0i32;
        let trans = if conjugate_transpose { b'C' } else { b'N' };
        unsafe {
            lapack::zgetrs(
                trans,
                self.n as i32,
                1,
                &self.a,
                self.n as i32,
                &self.ipiv,
                &mut x,
                self.n as i32,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::LapackFailure {
                routine: "zgetrs",
                info,
            });
        }
        Ok(x)
    }
}

/// A dense complex matrix held column-major for fast repeated
/// matrix–vector products (plain and conjugate-transposed) through BLAS.
pub struct DenseOp {
    n: usize,
    a: Vec<C64>,
}

impl DenseOp {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
                context: "DenseOp::new".into(),
            });
        }
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                a[j * n + i] = m[[i, j]];
            }
        }
        Ok(Self { n, a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `A x` (`adjoint = false`) or `A* x` (`adjoint = true`).
    pub fn matvec(&self, x: &[C64], adjoint: bool) -> Result<Vec<C64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
                context: "DenseOp::matvec".into(),
            });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        if self.n == 0 {
            return Ok(y);
        }
        let trans = if adjoint { b'C' } else { b'N' };
        unsafe {
            blas::zgemv(
                trans,
                self.n as i32,
                self.n as i32,
                C64::new(1.0, 0.0),
                &self.a,
                self.n as i32,
                x,
                1,
                C64::new(0.0, 0.0),
                &mut y,
                1,
            );
        }
        Ok(y)
    }
}

/// Estimates the largest singular value of the linear map given by
/// `apply(x, false) = M x` and `apply(x, true) = M* x` by power iteration on
/// `M*M` from a fixed full-support start vector (golden-angle phases), so the
/// result is deterministic.  Power iteration approaches the true norm from
/// below; callers that need a guaranteed upper bound must add their own
/// margin.
pub fn largest_singular_value<F>(apply: F, dim: usize, iters: usize) -> Result<f64>
where
    F: Fn(&[C64], bool) -> Result<Vec<C64>>,
{
    if dim == 0 {
        return Ok(0.0);
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut v: Vec<C64> = (0..dim)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * ((i as f64 * golden).fract());
            C64::new(theta.cos(), theta.sin())
        })
        .collect();
    normalize(&mut v);
    let mut sigma = 0.0f64;
    for _ in 0..iters {
        let w = apply(&v, false)?;
        sigma = norm2(&w);
        if sigma == 0.0 {
            return Ok(0.0);
        }
        let mut u = apply(&w, true)?;
        let nu = norm2(&u);
        if nu == 0.0 {
            return Ok(0.0);
        }
        for z in u.iter_mut() {
            *z /= nu;
        }
        v = u;
    }
    let w = apply(&v, false)?;
    sigma = sigma.max(norm2(&w));
    Ok(sigma)
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm2(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// A clustered spectrum: strictly ascending representative values with
/// positive multiplicities, plus the tolerance used to form the clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    entries: Vec<(f64, usize)>,
    cluster_tol: f64,
}

impl Spectrum {
    /// Default clustering tolerance given a spectral radius:
    /// `1e-8 · (1 + radius)`.
    pub fn default_cluster_tol(spectral_radius: f64) -> f64 {
        1e-8 * (1.0 + spectral_radius)
    }

    /// Clusters raw eigenvalues.  The input is sorted internally; a value
    /// joins the current cluster when it lies within `tol` of the cluster's
    /// running mean, and each finished cluster reports `(mean, multiplicity)`.
    /// An empty input yields an empty spectrum.
    pub fn cluster(values: &[f64], tol: f64) -> Spectrum {
        let mut v: Vec<f64> = values.to_vec();
        debug_assert!(v.iter().all(|x| x.is_finite()), "eigenvalues must be finite");
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let mut entries: Vec<(f64, usize)> = Vec::new();
        let mut sum = 0.0f64;
        let mut count = 0usize;
        for &x in &v {
            if count > 0 && (x - sum / count as f64) <= tol {
                sum += x;
                count += 1;
            } else {
                if count > 0 {
                    entries.push((sum / count as f64, count));
                }
                sum = x;
                count = 1;
            }
        }
        if count > 0 {
            entries.push((sum / count as f64, count));
        }
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Spectrum {
            entries,
            cluster_tol: tol,
        }
    }

    /// Clusters with an explicit tolerance, or the default tolerance derived
    /// from the spectral radius of `values` when `tol` is `None`.
    pub fn from_eigenvalues(values: &[f64], tol: Option<f64>) -> Spectrum {
        let radius = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = tol.unwrap_or_else(|| Self::default_cluster_tol(radius));
        Self::cluster(values, tol)
    }

    /// `(value, multiplicity)` pairs, strictly ascending in value.
    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    /// Distinct representative values, ascending.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|&(v, _)| v).collect()
    }

    /// Values repeated according to multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for &(v, m) in &self.entries {
            out.extend(std::iter::repeat(v).take(m));
        }
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn spectral_radius(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0f64, |m, &(v, _)| m.max(v.abs()))
    }

    /// Multiplicity of the cluster nearest `x`, if it lies within `tol`.
    pub fn multiplicity_near(&self, x: f64, tol: f64) -> Option<usize> {
        self.entries
            .iter()
            .filter(|&&(v, _)| (v - x).abs() <= tol)
            .min_by(|a, b| {
                (a.0 - x)
                    .abs()
                    .partial_cmp(&(b.0 - x).abs())
                    .expect("finite values")
            })
            .map(|&(_, m)| m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
            }
        }
        HermitianMatrix::new(a).unwrap()
    }

    #[test]
    fn hermitian_invariant_rejects_asymmetry() {
        let bad = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(2.0, 0.0), c(0.0, 0.0)]];
        match HermitianMatrix::new(bad) {
            Err(Error::NotHermitian { deviation, .. }) => {
                assert!((deviation - 1.0).abs() < 1e-15);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_invariant_accepts_tiny_noise() {
        let a = array![
            [c(1.0, 0.0), c(0.5, 0.25)],
            [c(0.5, -0.25 + 1e-14), c(2.0, 0.0)]
        ];
        assert!(HermitianMatrix::new(a).is_ok());
    }

    #[test]
    fn eig_off_diagonal_pair() {
        let a = HermitianMatrix::new(array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_identity_dim3_clusters_to_single_value() {
        let a = HermitianMatrix::new(CMatrix::eye(3)).unwrap();
        let w = eigvals_hermitian(&a).unwrap();
        let s = Spectrum::from_eigenvalues(&w, None);
        assert_eq!(s.entries(), &[(1.0, 3)]);
    }

    #[test]
    fn eig_complex_pauli_combination() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let a = HermitianMatrix::new(array![[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]])
            .unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13);
        assert!((e.values[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn eig_random_residuals_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1usize, 2, 3, 5, 8, 17, 33, 64] {
            let a = random_hermitian(n, &mut rng);
            let e = eig_hermitian(&a).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]), "ascending order");
            // Residual check already enforced inside eig_hermitian; verify
            // eigenvector orthonormality here.
            for p in 0..n {
                for q in 0..n {
                    let mut dot = c(0.0, 0.0);
                    for i in 0..n {
                        dot += e.vectors[[i, p]].conj() * e.vectors[[i, q]];
                    }
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!(
                        (dot - c(want, 0.0)).norm() < 1e-12,
                        "orthonormality failed at n={n}, ({p},{q})"
                    );
                }
            }
        }
    }

    #[test]
    fn sqrt_spd_diagonal_example() {
        let a = array![[4.0, 0.0], [0.0, 9.0]];
        let r = sqrt_spd(&a).unwrap();
        assert!((r[[0, 0]] - 2.0).abs() < 1e-13);
        assert!((r[[1, 1]] - 3.0).abs() < 1e-13);
        assert!(r[[0, 1]].abs() < 1e-13);
    }

    #[test]
    fn sqrt_spd_squares_back() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let r = sqrt_spd(&a).unwrap();
        let rr = r.dot(&r);
        for i in 0..2 {
            for j in 0..2 {
                assert!((rr[[i, j]] - a[[i, j]]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sqrt_spd_rejects_indefinite() {
        let a = array![[1.0, 0.0], [0.0, -1.0]];
        match sqrt_spd(&a) {
            Err(Error::NotPositiveDefinite { eigenvalue, .. }) => {
                assert!((eigenvalue + 1.0).abs() < 1e-13);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn inv_sqrt_spd_inverts_sqrt() {
        let a = array![[2.0, 1.0], [1.0, 3.0]];
        let s = sqrt_spd(&a).unwrap();
        let si = inv_sqrt_spd(&a).unwrap();
        let prod = s.dot(&si);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[[i, j]] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn det_lu_hand_cases() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        assert!((det_lu(&a) - 3.0).abs() < 1e-14);
        let b = array![[0.0, 1.0], [1.0, 0.0]];
        assert!((det_lu(&b) + 1.0).abs() < 1e-14);
        let c3 = array![[2.0, 0.0, 1.0], [0.0, 3.0, 0.0], [1.0, 0.0, 2.0]];
        assert!((det_lu(&c3) - 9.0).abs() < 1e-13);
    }

    #[test]
    fn cluster_running_mean_hand_trace() {
        // Default tolerance at radius 1e-9 is ~1e-8; all three values merge
        // into one cluster whose mean is exactly 5e-10.
        let s = Spectrum::from_eigenvalues(&[0.0, 5e-10, 1e-9], None);
        assert_eq!(s.len(), 1);
        let (v, m) = s.entries()[0];
        assert_eq!(m, 3);
        assert!((v - 5e-10).abs() < 1e-24);
    }

    #[test]
    fn cluster_running_mean_breaks_on_drift() {
        // Second value joins (within tol of mean 0); third is 1.25·tol above
        // the running mean 0.45·tol, so it starts a new cluster.
        let tol = 1e-3;
        let s = Spectrum::cluster(&[0.0, 0.9e-3, 1.7e-3], tol);
        assert_eq!(s.len(), 2);
        assert_eq!(s.entries()[0].1, 2);
        assert_eq!(s.entries()[1].1, 1);
        assert!((s.entries()[0].0 - 0.45e-3).abs() < 1e-18);
        assert!((s.entries()[1].0 - 1.7e-3).abs() < 1e-18);
    }

    #[test]
    fn cluster_empty_and_singleton() {
        let s = Spectrum::cluster(&[], 1e-8);
        assert!(s.is_empty());
        assert_eq!(s.total_multiplicity(), 0);
        let s = Spectrum::cluster(&[2.5], 1e-8);
        assert_eq!(s.entries(), &[(2.5, 1)]);
    }

    #[test]
    fn cluster_sorts_unordered_input() {
        let s = Spectrum::cluster(&[1.0, -1.0, 1.0 + 1e-12], 1e-8);
        assert_eq!(s.len(), 2);
        assert_eq!(s.entries()[0], (-1.0, 1));
        assert_eq!(s.entries()[1].1, 2);
    }

    #[test]
    fn spectrum_expanded_round_trips_multiplicity() {
        let s = Spectrum::cluster(&[0.0, 0.0, 1.0], 1e-10);
        assert_eq!(s.expanded(), vec![0.0, 0.0, 1.0]);
        assert_eq!(s.total_multiplicity(), 3);
        assert_eq!(s.spectral_radius(), 1.0);
    }

    #[test]
    fn lu_solve_handles_both_transposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            a[[i, i]] += c(4.0, 0.0); // keep comfortably nonsingular
        }
        let lu = LuFactors::new(&a).unwrap();
        let b: Vec<C64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x = lu.solve(&b, false).unwrap();
        let mut r = 0.0f64;
        for i in 0..n {
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                s += a[[i, j]] * x[j];
            }
            r = r.max((s - b[i]).norm());
        }
        assert!(r < 1e-10, "A x = b residual {r}");
        let y = lu.solve(&b, true).unwrap();
        let mut r2 = 0.0f64;
        for i in 0..n {
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                s += a[[j, i]].conj() * y[j];
            }
            r2 = r2.max((s - b[i]).norm());
        }
        assert!(r2 < 1e-10, "A* x = b residual {r2}");
    }

    #[test]
    fn dense_op_matches_naive_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 9;
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let op = DenseOp::new(&a).unwrap();
        let x: Vec<C64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let y = op.matvec(&x, false).unwrap();
        let z = op.matvec(&x, true).unwrap();
        for i in 0..n {
            let mut want = c(0.0, 0.0);
            let mut want_adj = c(0.0, 0.0);
            for j in 0..n {
                want += a[[i, j]] * x[j];
                want_adj += a[[j, i]].conj() * x[j];
            }
            assert!((y[i] - want).norm() < 1e-13);
            assert!((z[i] - want_adj).norm() < 1e-13);
        }
        assert!(op.matvec(&x[..4], false).is_err());
    }

    #[test]
    fn power_iteration_recovers_operator_norm() {
        // Diagonal matrix with a clear spectral gap: the norm is the largest
        // |entry|, and the gap makes power iteration converge fast.
        let n = 40;
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = c(1.0 + i as f64 / 20.0, 0.5);
        }
        a[[n - 1, n - 1]] = c(8.0, 0.5);
        let op = DenseOp::new(&a).unwrap();
        let est = largest_singular_value(|x, adj| op.matvec(x, adj), n, 120).unwrap();
        let want = a[[n - 1, n - 1]].norm();
        assert!((est - want).abs() < 1e-9 * want, "est {est} vs {want}");
        // A non-normal matrix: 2×2 Jordan-ish block with known largest
        // singular value from the explicit Gram matrix.
        let b = array![[c(0.0, 0.0), c(3.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let opb = DenseOp::new(&b).unwrap();
        let est = largest_singular_value(|x, adj| opb.matvec(x, adj), 2, 60).unwrap();
        assert!((est - 3.0).abs() < 1e-10);
    }

    #[test]
    fn kron_shapes_and_pauli_product() {
        let sx = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let i2 = CMatrix::eye(2);
        let k = kron(&sx, &i2);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[[0, 2]], c(1.0, 0.0));
        assert_eq!(k[[1, 3]], c(1.0, 0.0));
        assert_eq!(k[[0, 1]], c(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn cluster_preserves_total_multiplicity(values in proptest::collection::vec(-10.0f64..10.0, 0..60)) {
            let s = Spectrum::from_eigenvalues(&values, None);
            prop_assert_eq!(s.total_multiplicity(), values.len());
            let vals = s.values();
            for w in vals.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
        }

        #[test]
        fn eig_of_real_diagonal_sorts_entries(mut d in proptest::collection::vec(-5.0f64..5.0, 1..8)) {
            let n = d.len();
            let mut a = CMatrix::zeros((n, n));
            for i in 0..n { a[[i,i]] = c(d[i], 0.0); }
            let h = HermitianMatrix::new(a).unwrap();
            let w = eigvals_hermitian(&h).unwrap();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (x, y) in w.iter().zip(d.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
