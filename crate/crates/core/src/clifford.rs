//! Finite-dimensional Clifford representations.
//!
//! `build_rep(d, p, q)` returns `d` Hermitian, unitary, pairwise
//! anticommuting gamma matrices (`γ_j² = I`), built from the standard tensor
//! (Jordan–Wigner) chains of Pauli matrices:
//!
//! * even `d = 2m`: the irreducible representation on `C^{2^m}` given by
//!   `γ_{2k−1} = σ_z^{⊗(k−1)} ⊗ σ_x ⊗ I^{⊗(m−k)}`,
//!   `γ_{2k}   = σ_z^{⊗(k−1)} ⊗ σ_y ⊗ I^{⊗(m−k)}`,
//!   repeated in `p` diagonal blocks;
//! * odd `d = 2m+1`: the even-`d` chain plus `γ_d = ±σ_z^{⊗m}` — the sign
//!   distinguishes the two inequivalent irreducibles — with `p` copies of the
//!   `+` representation and `q` copies of the `−` representation.
//!
//! For even `d` the chirality element is `θ = i^{d/2} γ_d ⋯ γ_1`
//! (equivalently `(−i)^{d/2} γ_1 ⋯ γ_d`), the phase fixed so that `θ` is
//! Hermitian with `θ = diag(1, −1)` at `d = 2`; in the chain basis
//! `θ = σ_z^{⊗m}` on each block.  `θ` is Hermitian, squares to the identity,
//! and anticommutes with every `γ_j`.

use ndarray::array;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, kron, CMatrix, HermitianMatrix, C64};

pub(crate) fn pauli_x() -> CMatrix {
    array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ]
}

pub(crate) fn pauli_y() -> CMatrix {
    array![
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
    ]
}

pub(crate) fn pauli_z() -> CMatrix {
    array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ]
}

/// `m`-fold tensor chain with `factors[k]` in slot `k` (slot 0 leftmost);
/// an empty chain is the 1×1 identity.
fn chain(factors: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::eye(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Irreducible even-dimensional gamma chain on `C^{2^m}` for `d = 2m`.
fn irrep_even(m: usize) -> Vec<CMatrix> {
    let mut gammas = Vec::with_capacity(2 * m);
    for k in 1..=m {
        for odd in [true, false] {
            let mut slots: Vec<CMatrix> = Vec::with_capacity(m);
            for _ in 0..(k - 1) {
                slots.push(pauli_z());
            }
            slots.push(if odd { pauli_x() } else { pauli_y() });
            for _ in 0..(m - k) {
                slots.push(CMatrix::eye(2));
            }
            gammas.push(chain(&slots));
        }
    }
    gammas
}

fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros((total, total));
    let mut off = 0;
    for b in blocks {
        let n = b.nrows();
        for i in 0..n {
            for j in 0..n {
                out[[off + i, off + j]] = b[[i, j]];
            }
        }
        off += n;
    }
    out
}

/// A concrete Clifford representation: the generators, their signature
/// bookkeeping, and (for even `d`) the chirality element.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    d: usize,
    p: usize,
    q: usize,
    gammas: Vec<HermitianMatrix>,
    grading: Option<HermitianMatrix>,
}

impl CliffordRep {
    /// Number of generators (the underlying dimension `d`).
    pub fn d(&self) -> usize {
        self.d
    }

    /// Copies of the first irreducible.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Copies of the second irreducible (odd `d` only; zero for even `d`).
    pub fn q(&self) -> usize {
        self.q
    }

    /// Spinor-space dimension: `p·2^{d/2}` (even) or `(p+q)·2^{(d−1)/2}` (odd).
    pub fn spinor_dim(&self) -> usize {
        self.gammas[0].dim()
    }

    /// Generator `γ_j`, `j` zero-based.
    pub fn gamma(&self, j: usize) -> &HermitianMatrix {
        &self.gammas[j]
    }

    pub fn gammas(&self) -> &[HermitianMatrix] {
        &self.gammas
    }

    /// Chirality element for even `d`; `None` for odd `d`.
    pub fn grading(&self) -> Option<&HermitianMatrix> {
        self.grading.as_ref()
    }
}

/// Builds the `d`-dimensional representation with `p` copies of the first
/// irreducible and — for odd `d` only — `q` copies of the second.
///
/// `q` must be `None` for even `d` and `Some(_)` for odd `d`; at least one
/// copy in total is required.
/// The single-copy representation used when a caller does not care about
/// multiplicity: one irreducible copy for even `d`, the positive-sign copy
/// for odd `d`.
pub fn default_rep(d: usize) -> Result<CliffordRep> {
    if d % 2 == 0 {
        build_rep(d, 1, None)
    } else {
        build_rep(d, 1, Some(0))
    }
}

pub fn build_rep(d: usize, p: usize, q: Option<usize>) -> Result<CliffordRep> {
    if d == 0 {
        return Err(Error::InvalidInput("Clifford dimension d must be >= 1".into()));
    }
    let even = d % 2 == 0;
    let q = match (even, q) {
        (true, None) => 0,
        (true, Some(_)) => {
            return Err(Error::InvalidInput(
                "q applies only to odd d (two inequivalent irreducibles); pass q = None for even d"
                    .into(),
            ))
        }
        (false, Some(q)) => q,
        (false, None) => {
            return Err(Error::InvalidInput(
                "odd d has two inequivalent irreducibles; pass q = Some(copies of the second)"
                    .into(),
            ))
        }
    };
    if p + q == 0 {
        return Err(Error::InvalidInput(
            "representation must contain at least one irreducible copy (p + q >= 1)".into(),
        ));
    }

    let m = d / 2;
    let base = irrep_even(m); // 2m generators on C^{2^m}
    let copies = p + q;
    let mut gammas: Vec<CMatrix> = Vec::with_capacity(d);
    for j in 0..(2 * m) {
        let blocks: Vec<CMatrix> = (0..copies).map(|_| base[j].clone()).collect();
        gammas.push(block_diag(&blocks));
    }
    if !even {
        // γ_d = +σ_z^{⊗m} on the p block(s), −σ_z^{⊗m} on the q block(s).
        let z = chain(&vec![pauli_z(); m]);
        let mut blocks: Vec<CMatrix> = Vec::with_capacity(copies);
        for _ in 0..p {
            blocks.push(z.clone());
        }
        for _ in 0..q {
            blocks.push(z.mapv(|v| -v));
        }
        gammas.push(block_diag(&blocks));
    }

    let grading = if even {
        // θ = (−i)^{d/2} γ_1 ⋯ γ_d; equals σ_z^{⊗m} per block in this basis.
        let mut prod = CMatrix::eye(gammas[0].nrows());
        for g in &gammas {
            prod = prod.dot(g);
        }
        let phase = C64::new(0.0, -1.0).powu(m as u32);
        let theta = prod.mapv(|v| phase * v);
        debug_assert!(hermiticity_deviation(&theta) < 1e-14);
        Some(HermitianMatrix::new(theta)?)
    } else {
        None
    };

    let gammas = gammas
        .into_iter()
        .map(HermitianMatrix::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(CliffordRep {
        d,
        p,
        q,
        gammas,
        grading,
    })
}

/// Clifford multiplication by a real vector: `Σ_j v_j γ_j`, Hermitian with
/// spectrum `±‖v‖₂` (for irreducible blocks).
pub fn clifford_vector(v: &[f64], rep: &CliffordRep) -> Result<HermitianMatrix> {
    if v.len() != rep.d() {
        return Err(Error::DimensionMismatch {
            expected: rep.d(),
            found: v.len(),
            context: "clifford_vector (vector length must equal d)".into(),
        });
    }
    let s = rep.spinor_dim();
    let mut out = CMatrix::zeros((s, s));
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        out = out + rep.gamma(j).as_array().mapv(|z| z * vj);
    }
    HermitianMatrix::new(out)
}

/// Chirality element `θ = i^{d/2} γ_d ⋯ γ_1` for even `d`; errors for odd `d`.
///
/// `θ` is Hermitian, `θ² = I`, and `θ γ_j = −γ_j θ` for all `j`; at `d = 2`
/// it is `diag(1, −1)` per irreducible block.
pub fn chirality(rep: &CliffordRep) -> Result<HermitianMatrix> {
    rep.grading()
        .cloned()
        .ok_or_else(|| Error::InvalidInput("chirality exists only for even d".into()))
}
