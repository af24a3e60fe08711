//! Fourier tables and uniform grids on `T^d = R^d/2πZ^d`, `d ∈ {1, 2}`.
//!
//! Fields are trigonometric polynomials `f(x) = Σ_n c_n e^{i⟨n,x⟩}`.  Two
//! representations are used:
//!
//! * [`SparseTable`] — an explicit `{n ↦ c_n}` map, the exchange format for
//!   metric components (and exact under differentiation);
//! * [`DenseCoefs`] — a full `r^d` coefficient array aligned with a sampling
//!   grid of resolution `r`, produced from grid samples by FFT.  Index `i`
//!   along an axis carries the signed wavenumber `i` for `i ≤ (r−1)/2` and
//!   `i − r` above.
//!
//! The grid is `x_i = 2π i / r` per axis; `d = 1` data is stored with shape
//! `(r, 1)` so both dimensions share code.  Coefficient lookups are only
//! served for `‖k‖∞ ≤ max_wave(r)` (`= (r−1)/2` odd, `r/2 − 1` even): the
//! outermost shell(s), including the even-`r` Nyquist ring, are reserved for
//! the aliasing diagnostic [`DenseCoefs::tail`] — sampled fields whose
//! spectrum has not decayed below `1e-10` there cannot be trusted on this
//! grid, and callers reject them ([`crate::error::Error::Aliasing`]).

use std::collections::BTreeMap;

use ndarray::Array2;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Aliasing threshold for coefficient tails at the resolution boundary.
pub const TAIL_TOL: f64 = 1e-10;

/// Signed wavenumber carried by index `i` on an axis of length `r`.
pub fn signed_wave(i: usize, r: usize) -> i64 {
    if i <= (r - 1) / 2 {
        i as i64
    } else {
        i as i64 - r as i64
    }
}

/// Largest wavenumber magnitude servable from a resolution-`r` axis.
pub fn max_wave(r: usize) -> i64 {
    if r % 2 == 0 {
        (r as i64) / 2 - 1
    } else {
        (r as i64 - 1) / 2
    }
}

/// Sparse Fourier coefficient table.  Keys are `[n1, n2]`; for `d = 1` the
/// second component is always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTable {
    d: usize,
    map: BTreeMap<[i64; 2], C64>,
}

impl SparseTable {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > 2 {
            return Err(Error::InvalidInput(format!(
                "SparseTable supports d in {{1, 2}}, got {d}"
            )));
        }
        Ok(Self {
            d,
            map: BTreeMap::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sets the coefficient of mode `n` (dropping exact zeros).
    pub fn insert(&mut self, n: [i64; 2], c: C64) -> Result<()> {
        if self.d == 1 && n[1] != 0 {
            return Err(Error::InvalidInput(format!(
                "d = 1 table got mode [{}, {}]; second component must be 0",
                n[0], n[1]
            )));
        }
        if c == C64::new(0.0, 0.0) {
            self.map.remove(&n);
        } else {
            self.map.insert(n, c);
        }
        Ok(())
    }

    /// Inserts `c` at `n` and `conj(c)` at `−n`, keeping the field real.
    pub fn insert_real_pair(&mut self, n: [i64; 2], c: C64) -> Result<()> {
        self.insert(n, c)?;
        if n != [0, 0] {
            self.insert([-n[0], -n[1]], c.conj())?;
        }
        Ok(())
    }

    pub fn get(&self, n: [i64; 2]) -> C64 {
        self.map.get(&n).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64; 2], &C64)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Largest `‖n‖∞` present (0 for an empty table).
    pub fn max_mode(&self) -> i64 {
        self.map
            .keys()
            .map(|n| n[0].abs().max(n[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// Checks `c(−n) = conj(c(n))` for every mode, within relative `1e-12`.
    pub fn validate_reality(&self, context: &str) -> Result<()> {
        for (&n, &c) in self.map.iter() {
            let mirror = self.get([-n[0], -n[1]]);
            let dev = (mirror - c.conj()).norm();
            if dev > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::InvalidInput(format!(
                    "reality violated in {context}: mode [{}, {}] has c(-n) - conj(c(n)) = {dev:.3e}",
                    n[0], n[1]
                )));
            }
        }
        Ok(())
    }

    /// Exact derivative `∂_p`: multiplies each coefficient by `i·n_p`.
    pub fn derivative(&self, p: usize) -> Result<SparseTable> {
        if p >= self.d {
            return Err(Error::IndexOutOfRange {
                index: p as i64,
                max: self.d as i64 - 1,
                context: "SparseTable::derivative".into(),
            });
        }
        let mut out = SparseTable::new(self.d)?;
        for (&n, &c) in self.map.iter() {
            out.insert(n, C64::new(0.0, n[p] as f64) * c)?;
        }
        Ok(out)
    }

    /// `self + factor·other` as a new table.
    pub fn add_scaled(&self, other: &SparseTable, factor: f64) -> Result<SparseTable> {
        if self.d != other.d {
            return Err(Error::GridMismatch {
                context: "add_scaled on tables of different dimension".into(),
            });
        }
        let mut out = self.clone();
        for (&n, &c) in other.map.iter() {
            let cur = out.get(n);
            out.insert(n, cur + c * factor)?;
        }
        Ok(out)
    }

    /// Samples the field on the resolution-`r` grid by direct summation
    /// (exact up to rounding; no aliasing for any mode set).
    pub fn eval_grid(&self, r: usize) -> Array2<C64> {
        let cols = if self.d == 2 { r } else { 1 };
        let mut out = Array2::zeros((r, cols));
        for (&n, &c) in self.map.iter() {
            let phase1: Vec<C64> = (0..r)
                .map(|i| {
                    let x = 2.0 * std::f64::consts::PI * i as f64 / r as f64;
                    C64::from_polar(1.0, n[0] as f64 * x)
                })
                .collect();
            let phase2: Vec<C64> = (0..cols)
                .map(|j| {
                    let y = 2.0 * std::f64::consts::PI * j as f64 / r as f64;
                    C64::from_polar(1.0, n[1] as f64 * y)
                })
                .collect();
            for i in 0..r {
                for j in 0..cols {
                    out[[i, j]] += c * phase1[i] * phase2[j];
                }
            }
        }
        out
    }

    /// Exact dense embedding on a resolution-`r` grid; rejects modes beyond
    /// the servable range.
    pub fn to_dense(&self, r: usize) -> Result<DenseCoefs> {
        let mw = max_wave(r);
        if self.max_mode() > mw {
            return Err(Error::Aliasing {
                field: "sparse table".into(),
                tail: self
                    .map
                    .iter()
                    .filter(|(n, _)| n[0].abs().max(n[1].abs()) > mw)
                    .map(|(_, c)| c.norm())
                    .fold(0.0, f64::max),
                grid_resolution: r,
            });
        }
        let cols = if self.d == 2 { r } else { 1 };
        let mut data = Array2::zeros((r, cols));
        for (&n, &c) in self.map.iter() {
            let i = n[0].rem_euclid(r as i64) as usize;
            let j = if self.d == 2 {
                n[1].rem_euclid(r as i64) as usize
            } else {
                0
            };
            data[[i, j]] = c;
        }
        Ok(DenseCoefs { d: self.d, r, data })
    }
}

/// FFT along one axis, in place.  `inverse = false` applies `e^{−2πi jk/r}`
/// (synthesis-to-analysis), `true` the conjugate kernel; neither normalizes.
fn fft_axis(a: &mut Array2<C64>, axis: usize, inverse: bool) {
    let len = a.shape()[axis];
    if len <= 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    };
    match axis {
        1 => {
            for mut row in a.rows_mut() {
                let mut buf: Vec<C64> = row.to_vec();
                fft.process(&mut buf);
                for (dst, src) in row.iter_mut().zip(buf.iter()) {
                    *dst = *src;
                }
            }
        }
        0 => {
            let cols = a.shape()[1];
            let mut buf = vec![C64::new(0.0, 0.0); len];
            for j in 0..cols {
                for i in 0..len {
                    buf[i] = a[[i, j]];
                }
                fft.process(&mut buf);
                for i in 0..len {
                    a[[i, j]] = buf[i];
                }
            }
        }
        _ => unreachable!("axis must be 0 or 1"),
    }
}

/// Dense coefficient array aligned with a resolution-`r` sampling grid.
#[derive(Debug, Clone)]
pub struct DenseCoefs {
    d: usize,
    r: usize,
    data: Array2<C64>,
}

impl DenseCoefs {
    /// Analyzes grid samples into coefficients (forward FFT, normalized by
    /// `r^d`).  The grid shape must be `(r, 1)` for `d = 1` or `(r, r)`.
    pub fn from_grid(grid: &Array2<C64>, d: usize) -> Result<Self> {
        let r = grid.shape()[0];
        let expect_cols = if d == 2 { r } else { 1 };
        if d == 0 || d > 2 || grid.shape()[1] != expect_cols || r < 2 {
            return Err(Error::GridMismatch {
                context: format!(
                    "DenseCoefs::from_grid: shape ({}, {}) incompatible with d = {d}",
                    grid.shape()[0],
                    grid.shape()[1]
                ),
            });
        }
        let mut data = grid.clone();
        fft_axis(&mut data, 0, false);
        if d == 2 {
            fft_axis(&mut data, 1, false);
        }
        let norm = 1.0 / (r as f64).powi(d as i32);
        data.mapv_inplace(|z| z * norm);
        Ok(Self { d, r, data })
    }

    /// Synthesizes grid samples (unnormalized inverse FFT).
    pub fn to_grid(&self) -> Array2<C64> {
        let mut out = self.data.clone();
        fft_axis(&mut out, 0, true);
        if self.d == 2 {
            fft_axis(&mut out, 1, true);
        }
        out
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Coefficient of wavenumber `k`, or `None` when `‖k‖∞` exceeds the
    /// servable range of this grid (the tail shell is never served).
    pub fn coef(&self, k: [i64; 2]) -> Option<C64> {
        let mw = max_wave(self.r);
        if k[0].abs() > mw {
            return None;
        }
        let j = if self.d == 2 {
            if k[1].abs() > mw {
                return None;
            }
            k[1].rem_euclid(self.r as i64) as usize
        } else {
            if k[1] != 0 {
                return None;
            }
            0
        };
        let i = k[0].rem_euclid(self.r as i64) as usize;
        Some(self.data[[i, j]])
    }

    /// Largest coefficient modulus on the boundary shell(s)
    /// `‖k‖∞ ≥ max_wave(r)` — the aliasing diagnostic.
    pub fn tail(&self) -> f64 {
        let mw = max_wave(self.r);
        let mut t = 0.0f64;
        for ((i, j), c) in self.data.indexed_iter() {
            let k1 = signed_wave(i, self.r).abs();
            let k2 = if self.d == 2 {
                signed_wave(j, self.r).abs()
            } else {
                0
            };
            if k1.max(k2) >= mw {
                t = t.max(c.norm());
            }
        }
        t
    }

    /// Largest `‖k‖∞` whose coefficient modulus exceeds `threshold`.
    pub fn observed_bandwidth(&self, threshold: f64) -> i64 {
        let mut b = 0i64;
        for ((i, j), c) in self.data.indexed_iter() {
            if c.norm() > threshold {
                let k1 = signed_wave(i, self.r).abs();
                let k2 = if self.d == 2 {
                    signed_wave(j, self.r).abs()
                } else {
                    0
                };
                b = b.max(k1.max(k2));
            }
        }
        b
    }

    /// Spectral derivative `∂_p`: multiplies by `i·k_p`.  The even-`r`
    /// Nyquist ring (ambiguous sign) is zeroed; tails are checked by callers
    /// so its mass is negligible whenever the grid is accepted at all.
    pub fn derivative(&self, p: usize) -> Result<DenseCoefs> {
        if p >= self.d {
            return Err(Error::IndexOutOfRange {
                index: p as i64,
                max: self.d as i64 - 1,
                context: "DenseCoefs::derivative".into(),
            });
        }
        let r = self.r;
        let nyquist = if r % 2 == 0 { Some(r / 2) } else { None };
        let mut data = self.data.clone();
        for ((i, j), c) in data.indexed_iter_mut() {
            let idx = if p == 0 { i } else { j };
            if nyquist == Some(idx) {
                *c = C64::new(0.0, 0.0);
            } else {
                *c *= C64::new(0.0, signed_wave(idx, r) as f64);
            }
        }
        Ok(DenseCoefs { d: self.d, r, data })
    }
}

/// Sup norm of (the modulus of) a sampled field.
pub fn sup_abs_grid(grid: &Array2<C64>) -> f64 {
    grid.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn signed_wave_conventions() {
        // Odd r = 5: indices 0,1,2,3,4 → 0,1,2,−2,−1.
        assert_eq!(
            (0..5).map(|i| signed_wave(i, 5)).collect::<Vec<_>>(),
            vec![0, 1, 2, -2, -1]
        );
        // Even r = 8: 0..7 → 0,1,2,3,−4,−3,−2,−1; max servable 3.
        assert_eq!(
            (0..8).map(|i| signed_wave(i, 8)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
        assert_eq!(max_wave(8), 3);
        assert_eq!(max_wave(5), 2);
    }

    #[test]
    fn sparse_roundtrip_through_grid_d1() {
        let mut t = SparseTable::new(1).unwrap();
        t.insert_real_pair([1, 0], c(0.5, 0.0)).unwrap(); // cos x
        t.insert_real_pair([3, 0], c(0.0, -0.5)).unwrap(); // sin 3x
        t.insert([0, 0], c(2.0, 0.0)).unwrap();
        t.validate_reality("test").unwrap();
        let grid = t.eval_grid(16);
        assert_eq!(grid.shape(), &[16, 1]);
        // Pointwise check against 2 + cos x + sin 3x.
        for i in 0..16 {
            let x = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            let want = 2.0 + x.cos() + (3.0 * x).sin();
            assert!((grid[[i, 0]] - c(want, 0.0)).norm() < 1e-13);
        }
        let dense = DenseCoefs::from_grid(&grid, 1).unwrap();
        assert!((dense.coef([1, 0]).unwrap() - c(0.5, 0.0)).norm() < 1e-14);
        assert!((dense.coef([3, 0]).unwrap() - c(0.0, -0.5)).norm() < 1e-14);
        assert!((dense.coef([0, 0]).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        assert!((dense.coef([2, 0]).unwrap()).norm() < 1e-14);
        assert!(dense.tail() < 1e-14);
        // Synthesis returns the samples.
        let back = dense.to_grid();
        for i in 0..16 {
            assert!((back[[i, 0]] - grid[[i, 0]]).norm() < 1e-12);
        }
    }

    #[test]
    fn sparse_roundtrip_through_grid_d2() {
        let mut t = SparseTable::new(2).unwrap();
        // cos(x1)·sin(x2) = (e^{ix1}+e^{-ix1})(e^{ix2}-e^{-ix2})/(4i)
        for (s1, s2, coef) in [
            (1i64, 1i64, c(0.0, -0.25)),
            (1, -1, c(0.0, 0.25)),
            (-1, 1, c(0.0, -0.25)),
            (-1, -1, c(0.0, 0.25)),
        ] {
            t.insert([s1, s2], coef).unwrap();
        }
        t.validate_reality("test").unwrap();
        let r = 12;
        let grid = t.eval_grid(r);
        for i in 0..r {
            for j in 0..r {
                let x = 2.0 * std::f64::consts::PI * i as f64 / r as f64;
                let y = 2.0 * std::f64::consts::PI * j as f64 / r as f64;
                assert!((grid[[i, j]] - c(x.cos() * y.sin(), 0.0)).norm() < 1e-13);
            }
        }
        let dense = DenseCoefs::from_grid(&grid, 2).unwrap();
        assert!((dense.coef([1, 1]).unwrap() - c(0.0, -0.25)).norm() < 1e-13);
        assert!((dense.coef([1, -1]).unwrap() - c(0.0, 0.25)).norm() < 1e-13);
        assert!(dense.tail() < 1e-13);
        // Exact dense embedding agrees with the FFT analysis.
        let exact = t.to_dense(r).unwrap();
        for k1 in -2i64..=2 {
            for k2 in -2i64..=2 {
                let a = exact.coef([k1, k2]).unwrap();
                let b = dense.coef([k1, k2]).unwrap();
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_exact_on_trig_polynomials() {
        let mut t = SparseTable::new(1).unwrap();
        t.insert_real_pair([1, 0], c(0.5, 0.0)).unwrap(); // cos x
        let dt = t.derivative(0).unwrap();
        // d/dx cos x = −sin x.
        let grid = dt.eval_grid(12);
        for i in 0..12 {
            let x = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            assert!((grid[[i, 0]] - c(-x.sin(), 0.0)).norm() < 1e-13);
        }
        // Dense spectral derivative matches on the same samples.
        let dense = t.to_dense(12).unwrap().derivative(0).unwrap();
        let dgrid = dense.to_grid();
        for i in 0..12 {
            assert!((dgrid[[i, 0]] - grid[[i, 0]]).norm() < 1e-12);
        }
        assert!(t.derivative(1).is_err(), "axis out of range for d = 1");
    }

    #[test]
    fn tail_flags_undersampled_spectra() {
        // f(x) = 1/(2 + cos x) has geometric coefficient decay with ratio
        // 2 − √3 ≈ 0.268: visible tail on a tiny grid, none on a real one.
        let sample = |r: usize| {
            let mut g = Array2::zeros((r, 1));
            for i in 0..r {
                let x = 2.0 * std::f64::consts::PI * i as f64 / r as f64;
                g[[i, 0]] = c(1.0 / (2.0 + x.cos()), 0.0);
            }
            g
        };
        let coarse = DenseCoefs::from_grid(&sample(8), 1).unwrap();
        let fine = DenseCoefs::from_grid(&sample(64), 1).unwrap();
        assert!(coarse.tail() > TAIL_TOL, "coarse tail {:.3e}", coarse.tail());
        assert!(fine.tail() < 1e-12, "fine tail {:.3e}", fine.tail());
        assert!(fine.observed_bandwidth(1e-10) < 32);
        assert!(fine.observed_bandwidth(1e-3) <= 6);
    }

    #[test]
    fn coef_lookup_range_is_strict() {
        let mut t = SparseTable::new(1).unwrap();
        t.insert([0, 0], c(1.0, 0.0)).unwrap();
        let dense = t.to_dense(8).unwrap();
        assert!(dense.coef([3, 0]).is_some());
        assert!(dense.coef([4, 0]).is_none(), "Nyquist never served");
        assert!(dense.coef([-4, 0]).is_none());
        assert!(dense.coef([0, 1]).is_none(), "d = 1 has no second axis");
        // Sparse modes beyond the servable range are rejected outright.
        let mut wide = SparseTable::new(1).unwrap();
        wide.insert([5, 0], c(1.0, 0.0)).unwrap();
        match wide.to_dense(8) {
            Err(Error::Aliasing { .. }) => {}
            other => panic!("expected Aliasing, got {other:?}"),
        }
    }

    #[test]
    fn sparse_table_validation() {
        let mut t = SparseTable::new(1).unwrap();
        assert!(t.insert([1, 1], c(1.0, 0.0)).is_err(), "d = 1 mode shape");
        assert!(SparseTable::new(3).is_err());
        let mut bad = SparseTable::new(2).unwrap();
        bad.insert([1, 0], c(1.0, 0.0)).unwrap();
        bad.insert([-1, 0], c(0.5, 0.0)).unwrap(); // not the conjugate
        assert!(bad.validate_reality("test").is_err());
        // add_scaled combines coefficients exactly.
        let mut a = SparseTable::new(2).unwrap();
        a.insert([1, 0], c(1.0, 0.0)).unwrap();
        let mut b = SparseTable::new(2).unwrap();
        b.insert([1, 0], c(0.5, 0.0)).unwrap();
        b.insert([0, 1], c(2.0, 0.0)).unwrap();
        let sum = a.add_scaled(&b, 2.0).unwrap();
        assert_eq!(sum.get([1, 0]), c(2.0, 0.0));
        assert_eq!(sum.get([0, 1]), c(4.0, 0.0));
        assert_eq!(sum.max_mode(), 1);
    }
}
