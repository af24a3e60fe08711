//! Orthonormal frames for inner products on `R^d`, by Gram determinants.
//!
//! Given an SPD inner product `h` on `R^d` (the reference basis is always the
//! standard basis), [`gram_det_frame`] produces the `h`-orthonormal frame
//! whose coefficient matrix is upper triangular with positive diagonal:
//!
//! ```text
//! e_j(h) = (det G_{h,j} · det G_{h,j−1})^{−1/2} · Σ_k (−1)^{j+k} det(D_{h,j}^{j,k}) ê_k
//! ```
//!
//! where `G_{h,j}` is the leading `j×j` Gram minor (`det G_{h,0} := 1`, the
//! empty product) and `D_{h,j}` is the `j×j` matrix whose first `j−1` rows
//! are `[h(ê_c, ê_m)]_{c≤j}` for `m = 1..j−1` and whose last row is all ones;
//! `D^{j,k}` deletes the ones row and column `k`.  Classical Gram–Schmidt
//! ([`gs_iterative`]) produces the same frame and serves as an independent
//! oracle.
//!
//! [`transfer_map`] returns the unique `g`-positive linear map `b` with
//! `g(b·v, b·w) = h(v, w)`; it is computed in `g`-orthonormal coordinates
//! (where the matrix fed to the SPD square root is symmetric) and mapped
//! back.  [`frame_deviation`] is the scalar
//! `f(h) = Σ_j [ Σ_{k<j} j·|f_{j,k}(h)| + |f_{j,j}(h) − 1| ]`, zero exactly
//! at the reference inner product; the outer sum runs over all `j` (the
//! alternative reading, max over `j`, would only shrink the scalar — the sum
//! is what the dimension-weighted deviation bounds downstream consume).

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{det_lu, inv_sqrt_spd, sqrt_spd, sym_eig, RMatrix, HERMITICITY_RTOL};

/// A validated symmetric positive definite inner product on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    matrix: RMatrix,
}

impl InnerProduct {
    /// Validates symmetry (relative `1e-12`) and positive definiteness.
    pub fn new(matrix: RMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || d != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: d.max(1),
                found: matrix.ncols(),
                context: "InnerProduct::new (nonempty square matrix required)".into(),
            });
        }
        let scale = matrix.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                dev = dev.max((matrix[[i, j]] - matrix[[j, i]]).abs());
            }
        }
        let tol = HERMITICITY_RTOL * (1.0 + scale);
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol,
            });
        }
        let (w, _) = sym_eig(&matrix)?;
        if let Some(&lo) = w.first() {
            if lo <= 0.0 {
                return Err(Error::NotPositiveDefinite {
                    eigenvalue: lo,
                    context: " in InnerProduct::new".into(),
                });
            }
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: Array2::eye(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    /// Evaluates the bilinear form `h(u, v) = uᵀ H v`.
    pub fn pair(&self, u: &[f64], v: &[f64]) -> f64 {
        let d = self.dim();
        assert_eq!(u.len(), d);
        assert_eq!(v.len(), d);
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += u[i] * self.matrix[[i, j]] * v[j];
            }
        }
        s
    }
}

/// How a frame was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameProvenance {
    GramDeterminant,
    Iterative,
    SqrtTransfer,
}

/// An `h`-orthonormal frame: column `j` holds the coefficients of `e_j(h)`
/// in the standard basis, so `Eᵀ H E = I`.
#[derive(Debug, Clone)]
pub struct Frame {
    columns: RMatrix,
    provenance: FrameProvenance,
}

impl Frame {
    /// Wraps candidate columns, enforcing `Eᵀ H E = I` within `1e-10`.
    pub fn new(columns: RMatrix, h: &InnerProduct, provenance: FrameProvenance) -> Result<Self> {
        let d = h.dim();
        if columns.nrows() != d || columns.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: columns.nrows().max(columns.ncols()),
                context: "Frame::new (square d×d column matrix required)".into(),
            });
        }
        let gram = columns.t().dot(h.matrix()).dot(&columns);
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((gram[[i, j]] - want).abs());
            }
        }
        if dev > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "frame columns are not h-orthonormal: max |EᵀHE − I| = {dev:.3e} > 1e-10"
            )));
        }
        Ok(Self {
            columns,
            provenance,
        })
    }

    /// Column matrix `E` with `e_j(h)` in column `j`.
    pub fn columns(&self) -> &RMatrix {
        &self.columns
    }

    /// Coefficient `f_{j,k}(h)` of `ê_k` in `e_j(h)`; both indices 1-based to
    /// match the usual double-index notation.
    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        self.columns[[k - 1, j - 1]]
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn provenance(&self) -> FrameProvenance {
        self.provenance
    }
}

/// Leading `j×j` principal submatrix of `h` (`j = 0` gives the empty matrix,
/// whose determinant is 1 by convention).
pub fn gram_matrix(h: &InnerProduct, j: usize) -> Result<RMatrix> {
    if j > h.dim() {
        return Err(Error::IndexOutOfRange {
            index: j as i64,
            max: h.dim() as i64,
            context: "gram_matrix".into(),
        });
    }
    let mut out = RMatrix::zeros((j, j));
    for a in 0..j {
        for b in 0..j {
            out[[a, b]] = h.matrix()[[a, b]];
        }
    }
    Ok(out)
}

/// The ones-row matrix `D_{h,j}`: rows `m = 1..j−1` are `[h(ê_c, ê_m)]_{c≤j}`
/// and the last row is all ones.
fn ones_row_matrix(h: &InnerProduct, j: usize) -> RMatrix {
    let mut d = RMatrix::zeros((j, j));
    for m in 0..(j - 1) {
        for c in 0..j {
            d[[m, c]] = h.matrix()[[c, m]];
        }
    }
    for c in 0..j {
        d[[j - 1, c]] = 1.0;
    }
    d
}

/// Minor of `a` with row `r` and column `c` deleted.
fn minor(a: &RMatrix, r: usize, c: usize) -> RMatrix {
    let n = a.nrows();
    let mut out = RMatrix::zeros((n - 1, n - 1));
    let mut ii = 0;
    for i in 0..n {
        if i == r {
            continue;
        }
        let mut jj = 0;
        for j in 0..n {
            if j == c {
                continue;
            }
            out[[ii, jj]] = a[[i, j]];
            jj += 1;
        }
        ii += 1;
    }
    out
}

/// The `h`-orthonormal frame by the Gram-determinant formula (see module
/// docs).  Coefficients are upper triangular (`f_{j,k} = 0` for `k > j`) with
/// positive diagonal; the identity inner product yields the identity frame.
pub fn gram_det_frame(h: &InnerProduct) -> Result<Frame> {
    let d = h.dim();
    let mut dets = vec![1.0f64; d + 1];
    for j in 1..=d {
        dets[j] = det_lu(&gram_matrix(h, j)?);
        if dets[j] < 1e-14 {
            return Err(Error::SingularGram {
                index: j,
                determinant: dets[j],
            });
        }
    }
    let mut columns = RMatrix::zeros((d, d));
    for j in 1..=d {
        let dj = ones_row_matrix(h, j);
        let scale = 1.0 / (dets[j] * dets[j - 1]).sqrt();
        for k in 1..=j {
            let m = minor(&dj, j - 1, k - 1);
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            columns[[k - 1, j - 1]] = sign * det_lu(&m) * scale;
        }
    }
    Frame::new(columns, h, FrameProvenance::GramDeterminant)
}

/// Classical Gram–Schmidt on the standard basis under `h`; independent
/// oracle for [`gram_det_frame`] (they agree within `1e-10`).
pub fn gs_iterative(h: &InnerProduct) -> Result<Frame> {
    let d = h.dim();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut u = vec![0.0f64; d];
        u[j] = 1.0;
        for e in cols.iter() {
            let mut basis_j = vec![0.0f64; d];
            basis_j[j] = 1.0;
            let proj = h.pair(&basis_j, e);
            for i in 0..d {
                u[i] -= proj * e[i];
            }
        }
        let norm_sq = h.pair(&u, &u);
        if norm_sq < 1e-14 {
            return Err(Error::SingularGram {
                index: j + 1,
                determinant: norm_sq,
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        for x in u.iter_mut() {
            *x *= inv;
        }
        cols.push(u);
    }
    let mut columns = RMatrix::zeros((d, d));
    for (j, col) in cols.iter().enumerate() {
        for i in 0..d {
            columns[[i, j]] = col[i];
        }
    }
    Frame::new(columns, h, FrameProvenance::Iterative)
}

/// The unique `g`-positive linear map `b` with `g(b·v, b·w) = h(v, w)`.
///
/// Computed as `b = S · sqrt_spd(S H S) · S^{-1}` with `S = G^{-1/2}`, i.e.
/// the square root of `G^{-1} H` taken in `g`-orthonormal coordinates where
/// the operand is symmetric.  `transfer_map(g,h) ∘ transfer_map(h,g) = I`.
pub fn transfer_map(g: &InnerProduct, h: &InnerProduct) -> Result<RMatrix> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: h.dim(),
            context: "transfer_map (inner products must share d)".into(),
        });
    }
    let s = inv_sqrt_spd(g.matrix())?;
    let s_inv = sqrt_spd(g.matrix())?;
    let middle = sqrt_spd(&s.dot(h.matrix()).dot(&s))?;
    Ok(s.dot(&middle).dot(&s_inv))
}

/// Deviation scalar `f(h) = Σ_j [ Σ_{k<j} j·|f_{j,k}(h)| + |f_{j,j}(h) − 1| ]`
/// of the Gram-determinant frame from the reference frame; zero exactly when
/// `h` is the identity.
pub fn frame_deviation(h: &InnerProduct) -> Result<f64> {
    let frame = gram_det_frame(h)?;
    let d = h.dim();
    let mut total = 0.0f64;
    for j in 1..=d {
        for k in 1..j {
            total += j as f64 * frame.coefficient(j, k).abs();
        }
        total += (frame.coefficient(j, j) - 1.0).abs();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> InnerProduct {
        let mut a = RMatrix::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                a[[i, j]] = rng.gen_range(-1.0..1.0);
            }
        }
        let spd = a.t().dot(&a) + 0.3 * RMatrix::eye(d);
        InnerProduct::new(spd).unwrap()
    }

    #[test]
    fn inner_product_validation() {
        assert!(InnerProduct::new(array![[1.0, 0.5], [0.4, 1.0]]).is_err(), "asymmetric");
        assert!(InnerProduct::new(array![[1.0, 2.0], [2.0, 1.0]]).is_err(), "indefinite");
        assert!(InnerProduct::new(array![[2.0, 1.0], [1.0, 2.0]]).is_ok());
    }

    #[test]
    fn gram_matrix_minors_and_conventions() {
        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let g1 = gram_matrix(&h, 1).unwrap();
        assert_eq!(g1[[0, 0]], 4.0);
        let g0 = gram_matrix(&h, 0).unwrap();
        assert_eq!(g0.nrows(), 0);
        assert_eq!(det_lu(&g0), 1.0, "empty determinant is 1 by convention");
        let h2 = InnerProduct::new(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let g2 = gram_matrix(&h2, 2).unwrap();
        assert!((det_lu(&g2) - 3.0).abs() < 1e-14);
        assert!(gram_matrix(&h, 3).is_err(), "j out of range");
    }

    #[test]
    fn gram_det_frame_diagonal_hand_case() {
        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let f = gram_det_frame(&h).unwrap();
        assert!((f.coefficient(1, 1) - 0.5).abs() < 1e-12);
        assert!(f.coefficient(2, 1).abs() < 1e-12);
        assert!((f.coefficient(2, 2) - 1.0 / 3.0).abs() < 1e-12);
        // Columns: e_1 = (1/2, 0), e_2 = (0, 1/3).
        assert!((f.columns()[[0, 0]] - 0.5).abs() < 1e-12);
        assert!((f.columns()[[1, 1]] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gram_det_frame_coupled_hand_case() {
        let h = InnerProduct::new(array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let f = gram_det_frame(&h).unwrap();
        let s2 = 1.0 / 2.0f64.sqrt();
        let s6 = 1.0 / 6.0f64.sqrt();
        assert!((f.columns()[[0, 0]] - s2).abs() < 1e-12);
        assert!(f.columns()[[1, 0]].abs() < 1e-12);
        assert!((f.columns()[[0, 1]] + s6).abs() < 1e-12);
        assert!((f.columns()[[1, 1]] - 2.0 * s6).abs() < 1e-12);
    }

    #[test]
    fn gram_det_frame_identity_is_identity() {
        for d in 1..=5 {
            let f = gram_det_frame(&InnerProduct::identity(d)).unwrap();
            for j in 1..=d {
                for k in 1..=d {
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((f.coefficient(j, k) - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn upper_triangular_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_spd(4, &mut rng);
        let f = gram_det_frame(&h).unwrap();
        for j in 1..=4 {
            for k in (j + 1)..=4 {
                assert_eq!(f.coefficient(j, k), 0.0, "f_{{{j},{k}}} must vanish");
            }
            assert!(f.coefficient(j, j) > 0.0, "positive diagonal");
        }
    }

    #[test]
    fn oracle_equivalence_gram_det_vs_iterative() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..200 {
            let d = 1 + (trial % 5);
            let h = random_spd(d, &mut rng);
            let a = gram_det_frame(&h).unwrap();
            let b = gs_iterative(&h).unwrap();
            let mut dev = 0.0f64;
            for i in 0..d {
                for j in 0..d {
                    dev = dev.max((a.columns()[[i, j]] - b.columns()[[i, j]]).abs());
                }
            }
            assert!(dev <= 1e-10, "trial {trial}: frames disagree by {dev:.3e}");
        }
    }

    #[test]
    fn frames_are_h_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let d = rng.gen_range(1..=5);
            let h = random_spd(d, &mut rng);
            // Frame::new enforces EᵀHE = I within 1e-10; just build them.
            gram_det_frame(&h).unwrap();
            gs_iterative(&h).unwrap();
        }
    }

    #[test]
    fn transfer_map_diagonal_and_identity() {
        let g = InnerProduct::identity(2);
        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let b = transfer_map(&g, &h).unwrap();
        assert!((b[[0, 0]] - 2.0).abs() < 1e-12);
        assert!((b[[1, 1]] - 3.0).abs() < 1e-12);
        assert!(b[[0, 1]].abs() < 1e-12);

        let b_self = transfer_map(&h, &h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b_self[[i, j]] - want).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn transfer_map_bilinear_property_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let g = random_spd(3, &mut rng);
            let h = random_spd(3, &mut rng);
            let b = transfer_map(&g, &h).unwrap();
            // g(b e_i, b e_j) = h(e_i, e_j) on all basis pairs.
            let lhs = b.t().dot(g.matrix()).dot(&b);
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (lhs[[i, j]] - h.matrix()[[i, j]]).abs() < 1e-9,
                        "bilinear property violated"
                    );
                }
            }
            let b_back = transfer_map(&h, &g).unwrap();
            let prod = b.dot(&b_back);
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[[i, j]] - want).abs() < 1e-9, "not mutually inverse");
                }
            }
        }
        let g2 = InnerProduct::identity(2);
        let h3 = InnerProduct::identity(3);
        assert!(transfer_map(&g2, &h3).is_err(), "dimension mismatch");
    }

    #[test]
    fn frame_deviation_hand_values() {
        assert_eq!(frame_deviation(&InnerProduct::identity(3)).unwrap(), 0.0);
        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let f = frame_deviation(&h).unwrap();
        assert!((f - 7.0 / 6.0).abs() < 1e-12, "expected 7/6, got {f}");
    }

    #[test]
    fn frame_deviation_decays_toward_identity() {
        let delta = array![[0.4, 0.2], [0.2, -0.3]];
        let mut prev = f64::INFINITY;
        for step in 0..6 {
            let t = 0.4 / (1 << step) as f64;
            let h = InnerProduct::new(RMatrix::eye(2) + &delta.mapv(|x| t * x)).unwrap();
            let f = frame_deviation(&h).unwrap();
            assert!(f < prev, "deviation must shrink monotonically along t → 0");
            prev = f;
        }
        assert!(prev < 0.02, "deviation near identity should be small");
    }

    #[test]
    fn sampled_lipschitz_estimate_is_finite() {
        // Continuity diagnostic: report an empirical Lipschitz ratio on a
        // compact SPD neighborhood (not asserted against a fixed constant).
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut worst_ratio = 0.0f64;
        for _ in 0..50 {
            let base = random_spd(3, &mut rng);
            let mut bump = RMatrix::zeros((3, 3));
            for i in 0..3 {
                for j in i..3 {
                    let x = rng.gen_range(-1e-4..1e-4);
                    bump[[i, j]] = x;
                    bump[[j, i]] = x;
                }
            }
            let other = InnerProduct::new(base.matrix() + &bump).unwrap();
            let fa = gram_det_frame(&base).unwrap();
            let fb = gram_det_frame(&other).unwrap();
            let num = (fa.columns() - fb.columns())
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            let den = bump.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if den > 0.0 {
                worst_ratio = worst_ratio.max(num / den);
            }
        }
        assert!(worst_ratio.is_finite());
        println!("sampled frame Lipschitz ratio on SPD neighborhood: {worst_ratio:.3}");
    }
}
