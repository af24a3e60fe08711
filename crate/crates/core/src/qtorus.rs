//! Constant-metric torus spectral triples, mode by mode.
//!
//! For an inner product `h` on `R^d` the Dirac operator of the associated
//! torus triple acts on each Fourier mode `n ∈ Z^d` as the Clifford vector
//! `M_n = Σ_j ⟨n, e_j(h)⟩·scale · γ_j` built from the `h`-orthonormal frame
//! `E` of [`crate::frames::gram_det_frame`]; its eigenvalues are
//! `±‖Eᵀn‖·scale = ±√(nᵀH⁻¹n)·scale` (using `E Eᵀ = H⁻¹`).  The truncated
//! spectrum is the clustered multiset union over `‖n‖∞ ≤ N`.
//!
//! Conventions: the torus is `R^d/2πZ^d`, derivations act as
//! `d_X U^n = i⟨n, X⟩ U^n`, so Fourier labels are plain integers and the
//! overall normalization is exposed as `derivation_scale` (default 1).  The
//! noncommutative deformation parameter of a quantum torus never enters: the
//! construction is mode-diagonal and depends only on `h`, so the same code
//! covers every deformation at once.
//!
//! Deviation estimates between two inner products ([`qt_deviation`]) probe
//! the Lipschitz seminorm on the unitary generator set `{U^m}` — a surrogate
//! for the full seminorm domain, flagged as such downstream — and measure
//! operator deviation per mode with the exact `|n| → ∞` limit appended, since
//! the per-mode ratio is asymptotically homogeneous of degree 0.

use crate::clifford::{build_rep, clifford_vector, CliffordRep};
use crate::error::{Error, Result};
use crate::frames::{gram_det_frame, Frame, InnerProduct};
use crate::linalg::{
    eigvals_hermitian, hermitian_op_norm, inv_sqrt_spd, sym_eig, HermitianMatrix, RMatrix,
    Spectrum,
};

/// Specification of a truncated torus triple: inner product, Clifford
/// representation, truncation radius, and derivation normalization.
#[derive(Debug, Clone)]
pub struct TorusTripleSpec {
    h: InnerProduct,
    rep: CliffordRep,
    n_trunc: usize,
    derivation_scale: f64,
    frame: Frame,
}

impl TorusTripleSpec {
    /// Builds a spec.  `rep = None` selects the minimal representation for
    /// the parity of `d` (one irreducible copy for even `d`, one copy of each
    /// irreducible for odd `d`).
    pub fn new(
        h: InnerProduct,
        n_trunc: usize,
        derivation_scale: f64,
        rep: Option<CliffordRep>,
    ) -> Result<Self> {
        if n_trunc == 0 {
            return Err(Error::InvalidInput("truncation radius N must be >= 1".into()));
        }
        if !(derivation_scale > 0.0) || !derivation_scale.is_finite() {
            return Err(Error::InvalidInput(format!(
                "derivation_scale must be positive and finite, got {derivation_scale}"
            )));
        }
        let d = h.dim();
        let rep = match rep {
            Some(r) => {
                if r.d() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: r.d(),
                        context: "TorusTripleSpec::new (rep.d must equal h dimension)".into(),
                    });
                }
                r
            }
            None => {
                if d % 2 == 0 {
                    build_rep(d, 1, None)?
                } else {
                    build_rep(d, 1, Some(1))?
                }
            }
        };
        let frame = gram_det_frame(&h)?;
        Ok(Self {
            h,
            rep,
            n_trunc,
            derivation_scale,
            frame,
        })
    }

    pub fn d(&self) -> usize {
        self.h.dim()
    }

    pub fn h(&self) -> &InnerProduct {
        &self.h
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    pub fn trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn derivation_scale(&self) -> f64 {
        self.derivation_scale
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Total dimension of the truncated space: `spinor_dim · (2N+1)^d`.
    pub fn total_dim(&self) -> usize {
        self.rep.spinor_dim() * (2 * self.n_trunc + 1).pow(self.d() as u32)
    }
}

/// All modes `‖n‖∞ ≤ n_trunc` in `Z^d`, lexicographic (deterministic) order.
pub fn modes(d: usize, n_trunc: usize) -> Vec<Vec<i64>> {
    let side = 2 * n_trunc as i64 + 1;
    let count = (side as usize).pow(d as u32);
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0i64; d];
    for flat in 0..count {
        let mut rem = flat as i64;
        for a in (0..d).rev() {
            idx[a] = rem % side - n_trunc as i64;
            rem /= side;
        }
        out.push(idx.clone());
    }
    out
}

/// One Fourier-mode block of the torus Dirac operator.
#[derive(Debug, Clone)]
pub struct ModeBlock {
    pub n: Vec<i64>,
    pub matrix: HermitianMatrix,
}

/// The mode block `M_n = clifford_vector(Eᵀn · scale)`; Hermitian with
/// `M_n² = (nᵀH⁻¹n)·scale²·I` and eigenvalues `±‖Eᵀn‖·scale`.
pub fn qt_mode_matrix(n: &[i64], spec: &TorusTripleSpec) -> Result<ModeBlock> {
    let d = spec.d();
    if n.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: n.len(),
            context: "qt_mode_matrix (mode vector length)".into(),
        });
    }
    let max_comp = n.iter().map(|x| x.abs()).max().unwrap_or(0);
    if max_comp > spec.trunc() as i64 {
        return Err(Error::IndexOutOfRange {
            index: max_comp,
            max: spec.trunc() as i64,
            context: "qt_mode_matrix (mode outside truncation)".into(),
        });
    }
    let v = frame_pairing(n, spec.frame(), spec.derivation_scale());
    let matrix = clifford_vector(&v, spec.rep())?;
    Ok(ModeBlock {
        n: n.to_vec(),
        matrix,
    })
}

/// `v_j = ⟨n, e_j(h)⟩·scale` for all `j`: the coefficients of the mode block.
fn frame_pairing(n: &[i64], frame: &Frame, scale: f64) -> Vec<f64> {
    let d = frame.dim();
    let e = frame.columns();
    (0..d)
        .map(|j| {
            let mut s = 0.0;
            for (p, &np) in n.iter().enumerate() {
                s += np as f64 * e[[p, j]];
            }
            s * scale
        })
        .collect()
}

/// Raw (unclustered) eigenvalues of the truncated torus Dirac operator,
/// ascending: the multiset union of all mode-block spectra over `‖n‖∞ ≤ N`.
pub fn qt_eigenvalues(spec: &TorusTripleSpec) -> Result<Vec<f64>> {
    let mut all = Vec::with_capacity(spec.total_dim());
    for n in modes(spec.d(), spec.trunc()) {
        let block = qt_mode_matrix(&n, spec)?;
        all.extend(eigvals_hermitian(&block.matrix)?);
    }
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(all)
}

/// Clustered truncated spectrum (default clustering tolerance
/// `1e-8·(1 + spectral radius)` unless overridden).
pub fn qt_spectrum(spec: &TorusTripleSpec, cluster_tol: Option<f64>) -> Result<Spectrum> {
    Ok(Spectrum::from_eigenvalues(&qt_eigenvalues(spec)?, cluster_tol))
}

/// Lipschitz number of the unitary generator `U^m`:
/// `‖[D_h, U^m]‖ = ‖Eᵀm‖·scale = √(mᵀH⁻¹m)·scale`.
pub fn qt_lip_generator(m: &[i64], h: &InnerProduct, scale: f64) -> Result<f64> {
    if m.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: m.len(),
            context: "qt_lip_generator (generator exponent length)".into(),
        });
    }
    let frame = gram_det_frame(h)?;
    let v = frame_pairing(m, &frame, scale);
    Ok(v.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Relative deviations between the triples of `h1` and `h2` at truncation `N`.
///
/// * `delta_lip_rel`: max over probe generators `{m ≠ 0, ‖m‖∞ ≤ N}` of
///   `|Lip_{h2}(U^m) − Lip_{h1}(U^m)| / Lip_{h1}(U^m)` — generator-restricted
///   (flag it as such when feeding distance bounds);
/// * `delta_op_rel`: max of the per-mode ratios
///   `‖M_n^{h2} − M_n^{h1}‖ / (1 + ‖M_n^{h1}‖)` over `‖n‖∞ ≤ N` and the exact
///   `|n| → ∞` limit `max_u ‖(E₂−E₁)ᵀu‖ / ‖E₁ᵀu‖` (a generalized Rayleigh
///   quotient of `(ΔE)(ΔE)ᵀ` against `E₁E₁ᵀ = H₁⁻¹`).
pub fn qt_deviation(
    h1: &InnerProduct,
    h2: &InnerProduct,
    n_trunc: usize,
    scale: f64,
) -> Result<(f64, f64)> {
    let d = h1.dim();
    if h2.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h2.dim(),
            context: "qt_deviation (inner products must share d)".into(),
        });
    }
    if n_trunc == 0 {
        return Err(Error::InvalidInput("truncation radius N must be >= 1".into()));
    }
    let spec1 = TorusTripleSpec::new(h1.clone(), n_trunc, scale, None)?;
    let spec2 = TorusTripleSpec::new(h2.clone(), n_trunc, scale, None)?;

    let mut delta_lip_rel = 0.0f64;
    let mut delta_op_rel = 0.0f64;
    for n in modes(d, n_trunc) {
        let b1 = qt_mode_matrix(&n, &spec1)?;
        let b2 = qt_mode_matrix(&n, &spec2)?;
        let norm1 = hermitian_op_norm(&b1.matrix)?;
        let diff_array = b2.matrix.as_array() - b1.matrix.as_array();
        let diff = HermitianMatrix::new(diff_array)?;
        let dev = hermitian_op_norm(&diff)?;
        delta_op_rel = delta_op_rel.max(dev / (1.0 + norm1));
        if n.iter().any(|&x| x != 0) {
            let lip1 = qt_lip_generator(&n, h1, scale)?;
            let lip2 = qt_lip_generator(&n, h2, scale)?;
            delta_lip_rel = delta_lip_rel.max((lip2 - lip1).abs() / lip1);
        }
    }

    delta_op_rel = delta_op_rel.max(frame_ratio_limit(spec1.frame(), spec2.frame())?);
    Ok((delta_lip_rel, delta_op_rel))
}

/// Exact `|n| → ∞` deviation ratio `max_{u ≠ 0} ‖(E₂−E₁)ᵀu‖ / ‖E₁ᵀu‖`:
/// the square root of the largest generalized eigenvalue of
/// `(ΔE)(ΔE)ᵀ` against the SPD matrix `E₁E₁ᵀ`.
fn frame_ratio_limit(f1: &Frame, f2: &Frame) -> Result<f64> {
    let e1 = f1.columns();
    let delta: RMatrix = f2.columns() - e1;
    if delta.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let numer = delta.dot(&delta.t());
    let denom = e1.dot(&e1.t());
    let r = inv_sqrt_spd(&denom)?;
    let pencil = r.dot(&numer).dot(&r);
    let (w, _) = sym_eig(&pencil)?;
    let top = w.last().copied().unwrap_or(0.0).max(0.0);
    Ok(top.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inv_spd;
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
        InnerProduct::new(a.t().dot(&a) + 0.3 * RMatrix::eye(d)).unwrap()
    }

    fn closed_form_values(h: &InnerProduct, n_trunc: usize, scale: f64) -> Vec<f64> {
        // Independent oracle: ±√(nᵀH⁻¹n)·scale per mode, each eigenvalue with
        // multiplicity spinor_dim/2 per sign (full spinor_dim at n = 0).
        let d = h.dim();
        let hinv = inv_spd(h.matrix()).unwrap();
        let spinor = if d % 2 == 0 {
            1usize << (d / 2)
        } else {
            2 * (1usize << ((d - 1) / 2))
        };
        let mut vals = Vec::new();
        for n in modes(d, n_trunc) {
            let mut q = 0.0;
            for i in 0..d {
                for j in 0..d {
                    q += n[i] as f64 * hinv[[i, j]] * n[j] as f64;
                }
            }
            let v = q.sqrt() * scale;
            for _ in 0..(spinor / 2) {
                vals.push(v);
                vals.push(-v);
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    #[test]
    fn mode_matrix_hand_cases() {
        let flat = TorusTripleSpec::new(InnerProduct::identity(2), 2, 1.0, None).unwrap();
        let zero = qt_mode_matrix(&[0, 0], &flat).unwrap();
        assert_eq!(zero.matrix.max_abs(), 0.0);
        let w = eigvals_hermitian(&zero.matrix).unwrap();
        assert_eq!(w.len(), flat.rep().spinor_dim());
        assert!(w.iter().all(|&x| x == 0.0));

        let one = qt_mode_matrix(&[1, 0], &flat).unwrap();
        let w = eigvals_hermitian(&one.matrix).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);

        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let spec = TorusTripleSpec::new(h, 2, 1.0, None).unwrap();
        let b = qt_mode_matrix(&[1, 1], &spec).unwrap();
        let w = eigvals_hermitian(&b.matrix).unwrap();
        let want = (1.0 / 4.0 + 1.0 / 9.0f64).sqrt(); // √13/6
        assert!((w[0] + want).abs() < 1e-13);
        assert!((w[1] - want).abs() < 1e-13);
        assert!((want - 13.0f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn mode_matrix_square_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_spd(2, &mut rng);
        let hinv = inv_spd(h.matrix()).unwrap();
        let spec = TorusTripleSpec::new(h, 3, 0.7, None).unwrap();
        for n in modes(2, 3) {
            let b = qt_mode_matrix(&n, &spec).unwrap();
            let sq = b.matrix.as_array().dot(b.matrix.as_array());
            let mut q = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    q += n[i] as f64 * hinv[[i, j]] * n[j] as f64;
                }
            }
            let want = q * 0.7 * 0.7;
            for i in 0..sq.nrows() {
                for j in 0..sq.ncols() {
                    let target = if i == j { want } else { 0.0 };
                    assert!(
                        (sq[[i, j]] - num_complex::Complex64::new(target, 0.0)).norm() < 1e-12,
                        "M_n² must be (nᵀH⁻¹n)·scale²·I"
                    );
                }
            }
        }
    }

    #[test]
    fn mode_out_of_truncation_rejected() {
        let spec = TorusTripleSpec::new(InnerProduct::identity(2), 1, 1.0, None).unwrap();
        match qt_mode_matrix(&[2, 0], &spec) {
            Err(Error::IndexOutOfRange { index, max, .. }) => {
                assert_eq!(index, 2);
                assert_eq!(max, 1);
            }
            other => panic!("expected IndexOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_flat_d2_n1_multiset() {
        // Nine modes, 2-dim blocks: n = 0 contributes (0,0); the four modes of
        // norm 1 contribute ±1 each; the four corner modes of norm √2
        // contribute ±√2 each.  Total multiplicity 18.
        let spec = TorusTripleSpec::new(InnerProduct::identity(2), 1, 1.0, None).unwrap();
        let s = qt_spectrum(&spec, None).unwrap();
        assert_eq!(s.total_multiplicity(), 18);
        let entries = s.entries();
        assert_eq!(entries.len(), 5);
        let root2 = 2.0f64.sqrt();
        let expect = [(-root2, 4), (-1.0, 4), (0.0, 2), (1.0, 4), (root2, 4)];
        for ((v, m), (ev, em)) in entries.iter().zip(expect.iter()) {
            assert!((v - ev).abs() < 1e-12);
            assert_eq!(m, em);
        }
    }

    #[test]
    fn spectrum_circle_d1_two_irreducibles() {
        let h = InnerProduct::new(array![[1.0]]).unwrap();
        let spec = TorusTripleSpec::new(h, 2, 1.0, None).unwrap();
        assert_eq!(spec.rep().spinor_dim(), 2, "p = q = 1 gives 2-dim spinors");
        let s = qt_spectrum(&spec, None).unwrap();
        let expect = [(-2.0, 2), (-1.0, 2), (0.0, 2), (1.0, 2), (2.0, 2)];
        assert_eq!(s.entries().len(), 5);
        for ((v, m), (ev, em)) in s.entries().iter().zip(expect.iter()) {
            assert!((v - ev).abs() < 1e-12);
            assert_eq!(m, em);
        }
    }

    #[test]
    fn spectrum_scaling_covariance() {
        // h → 4h scales H⁻¹ by 1/4, so every eigenvalue halves.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_spd(2, &mut rng);
        let h4 = InnerProduct::new(h.matrix().mapv(|x| 4.0 * x)).unwrap();
        let s1 = TorusTripleSpec::new(h, 2, 1.0, None).unwrap();
        let s4 = TorusTripleSpec::new(h4, 2, 1.0, None).unwrap();
        let v1 = qt_eigenvalues(&s1).unwrap();
        let v4 = qt_eigenvalues(&s4).unwrap();
        for (a, b) in v1.iter().zip(v4.iter()) {
            assert!((a / 2.0 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_closed_form_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for d in [1usize, 2, 3] {
            let h = random_spd(d, &mut rng);
            let scale = 0.8;
            let spec = TorusTripleSpec::new(h.clone(), 2, scale, None).unwrap();
            let got = qt_eigenvalues(&spec).unwrap();
            let want = closed_form_values(&h, 2, scale);
            assert_eq!(got.len(), want.len());
            let radius = want.last().map(|x| x.abs()).unwrap_or(0.0);
            for (a, b) in got.iter().zip(want.iter()) {
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + radius),
                    "d={d}: {a} vs closed form {b}"
                );
            }
            // Symmetry about zero as a multiset.
            for (lo, hi) in got.iter().zip(got.iter().rev()) {
                assert!((lo + hi).abs() <= 1e-12 * (1.0 + radius));
            }
        }
    }

    #[test]
    fn lip_generator_hand_values_and_norm_properties() {
        let id = InnerProduct::identity(2);
        assert_eq!(qt_lip_generator(&[0, 0], &id, 1.0).unwrap(), 0.0);
        assert!((qt_lip_generator(&[1, 0], &id, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let h = InnerProduct::new(array![[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let lip = qt_lip_generator(&[0, 1], &h, 1.0).unwrap();
        assert!((lip - 1.0 / 3.0).abs() < 1e-13);

        // Norm behavior: integer homogeneity and triangle inequality.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h = random_spd(3, &mut rng);
        for _ in 0..30 {
            let m: Vec<i64> = (0..3).map(|_| rng.gen_range(-4..=4)).collect();
            let k = rng.gen_range(1..=3i64);
            let km: Vec<i64> = m.iter().map(|x| k * x).collect();
            let a = qt_lip_generator(&m, &h, 1.0).unwrap();
            let b = qt_lip_generator(&km, &h, 1.0).unwrap();
            assert!((b - k as f64 * a).abs() < 1e-12 * (1.0 + b));
            let m2: Vec<i64> = (0..3).map(|_| rng.gen_range(-4..=4)).collect();
            let sum: Vec<i64> = m.iter().zip(&m2).map(|(x, y)| x + y).collect();
            let c = qt_lip_generator(&m2, &h, 1.0).unwrap();
            let s = qt_lip_generator(&sum, &h, 1.0).unwrap();
            assert!(s <= a + c + 1e-12);
        }
    }

    #[test]
    fn deviation_trivial_and_scaling_cases() {
        let id = InnerProduct::identity(2);
        let (dl, dop) = qt_deviation(&id, &id, 2, 1.0).unwrap();
        assert_eq!(dl, 0.0);
        assert_eq!(dop, 0.0);

        let four = InnerProduct::new(RMatrix::eye(2).mapv(|x: f64| 4.0 * x)).unwrap();
        let (dl, dop) = qt_deviation(&id, &four, 2, 1.0).unwrap();
        assert!((dl - 0.5).abs() < 1e-12, "every generator norm halves");
        // Per-mode ratios stay below 1/2; the asymptotic frame ratio is
        // exactly 1/2 and dominates.
        assert!((dop - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deviation_decays_along_shrinking_perturbation() {
        let base = InnerProduct::new(array![[1.3, 0.2], [0.2, 0.9]]).unwrap();
        let delta = array![[0.5, -0.1], [-0.1, 0.3]];
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for step in 0..8 {
            let t = 1.0 / (1 << step) as f64;
            let h2 = InnerProduct::new(base.matrix() + &delta.mapv(|x| t * x)).unwrap();
            let (dl, dop) = qt_deviation(&base, &h2, 2, 1.0).unwrap();
            assert!(dl < prev.0 + 1e-15);
            assert!(dop < prev.1 + 1e-15);
            prev = (dl, dop);
        }
        assert!(prev.0 < 1e-2);
        assert!(prev.1 < 1e-2);
    }

    #[test]
    fn deviation_vanishes_iff_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let h1 = random_spd(2, &mut rng);
            let h2 = random_spd(2, &mut rng);
            let (dl, dop) = qt_deviation(&h1, &h2, 2, 1.0).unwrap();
            let same = (h1.matrix() - h2.matrix())
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()))
                < 1e-12;
            if same {
                assert!(dl < 1e-12 && dop < 1e-12);
            } else {
                assert!(dop > 0.0, "distinct inner products must register");
            }
            let (dl_self, dop_self) = qt_deviation(&h1, &h1, 2, 1.0).unwrap();
            assert_eq!(dl_self, 0.0);
            assert_eq!(dop_self, 0.0);
        }
        let id3 = InnerProduct::identity(3);
        let id2 = InnerProduct::identity(2);
        assert!(qt_deviation(&id3, &id2, 2, 1.0).is_err());
    }

    #[test]
    fn mode_enumeration_is_deterministic_and_complete() {
        let m = modes(2, 1);
        assert_eq!(m.len(), 9);
        assert_eq!(m[0], vec![-1, -1]);
        assert_eq!(m[4], vec![0, 0]);
        assert_eq!(m[8], vec![1, 1]);
        let m1 = modes(1, 3);
        assert_eq!(m1.len(), 7);
        assert_eq!(m1[0], vec![-3]);
        assert_eq!(m1[6], vec![3]);
    }

    #[test]
    fn spec_validation() {
        assert!(TorusTripleSpec::new(InnerProduct::identity(2), 0, 1.0, None).is_err());
        assert!(TorusTripleSpec::new(InnerProduct::identity(2), 2, 0.0, None).is_err());
        let rep3 = build_rep(3, 1, Some(1)).unwrap();
        assert!(
            TorusTripleSpec::new(InnerProduct::identity(2), 2, 1.0, Some(rep3)).is_err(),
            "rep dimension must match"
        );
    }
}
