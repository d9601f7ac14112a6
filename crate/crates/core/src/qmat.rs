//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for the handful of qubits/qutrits that appear
//! in two-party black-box models (dimension at most a few dozen), so all
//! matrices are dense and every operation allocates freely.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::tol;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("ragged rows"));
        }
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| c(x, 0.0))).collect();
        Self::new(rows.len(), ncols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, cc| if r == cc { c(values[r], 0.0) } else { ZERO })
    }

    /// `|v><v|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, cc| v[r] * v[cc].conj())
    }

    /// Projector onto a single computational basis vector.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        Self::from_fn(dim, dim, |r, cc| if r == index && cc == index { ONE } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.0.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, cc: usize) -> Complex64 {
        self.0[(r, cc)]
    }

    pub fn set(&mut self, r: usize, cc: usize, z: Complex64) {
        self.0[(r, cc)] = z;
    }

    pub fn entries_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for cc in 0..self.cols() {
                out.push(self.0[(r, cc)]);
            }
        }
        out
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m - m^H|` entrywise; infinite for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_deviation() <= tolerance
    }

    /// `(m + m^H) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// `(m - m^H) / 2`
    pub fn anti_hermitian_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()).map(|z| z * 0.5))
    }

    fn require_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::dims(format!(
                "expected a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        let deviation = self.hermiticity_deviation();
        // scale-aware so that large-norm operators are not rejected for rounding
        let scale = self.max_abs().max(1.0);
        if deviation > tol().herm * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|cc| {
                    let z = self.get(r, cc);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

/// Sum of a nonempty list of equally sized matrices.
pub fn sum<'a>(ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    let mut it = ms.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| &acc + m))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order
/// and eigenvectors stored as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V^H`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors.0;
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let col = v.column(k);
            for r in 0..n {
                let vr = col[r] * w;
                for cc in 0..n {
                    out[(r, cc)] += vr * col[cc].conj();
                }
            }
        }
        ComplexMatrix(out)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalues at or below this are treated as zero when inverting.
    pub fn rank_threshold(&self) -> f64 {
        let largest = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        tol().rank * largest
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.vectors.0.column(k).iter().copied().collect()
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.require_hermitian()?;
    let n = m.dim();
    let eig = m.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, cc| eig.eigenvectors[(r, order[cc])]);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

fn require_psd(eig: &HermitianEigen) -> Result<()> {
    let scale = eig.max_value().abs().max(1.0);
    if eig.min_value() < -tol().psd * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_value(),
        });
    }
    Ok(())
}

/// Pseudo-inverse square root: eigenvalues above the rank threshold map to
/// `λ^{-1/2}`, everything else to zero.
pub fn inv_sqrt_on_support(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    require_psd(&eig)?;
    let cut = eig.rank_threshold();
    Ok(eig.map(|x| if x > cut && x > 0.0 { 1.0 / x.sqrt() } else { 0.0 }))
}

/// Principal square root of a PSD matrix; tiny negative eigenvalues are clamped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    require_psd(&eig)?;
    Ok(eig.map(|x| x.max(0.0).sqrt()))
}

/// Orthogonal projector onto the span of eigenvectors above the rank threshold.
pub fn support_projector(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    let cut = eig.rank_threshold();
    Ok(eig.map(|x| if x > cut && x > 0.0 { 1.0 } else { 0.0 }))
}

pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|x| x.abs()).sum())
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.min_value())
}

/// True iff the Hermitian matrix has no eigenvalue below `-tolerance`.
/// Non-Hermitian input is never PSD.
pub fn is_psd(m: &ComplexMatrix, tolerance: f64) -> bool {
    match eig_hermitian(m) {
        Ok(eig) => eig.min_value() >= -tolerance,
        Err(_) => false,
    }
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("ket must have positive dimension"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol().trace {
            return Err(Error::invalid(format!("ket has norm {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Ok(Self { amplitudes: v })
    }

    /// Equal-weight superposition of all basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        Self::normalized(vec![ONE; dim])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// A density operator together with its tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::dims("density matrix must be square"));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::invalid("subsystem dimensions must be positive"));
        }
        if dims.iter().product::<usize>() != matrix.dim() {
            return Err(Error::dims(format!(
                "subsystem dims {dims:?} do not multiply to {}",
                matrix.dim()
            )));
        }
        let t = tol();
        let deviation = matrix.hermiticity_deviation();
        if deviation > t.herm {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > t.trace || tr.im.abs() > t.trace {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -t.psd {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { matrix, dims })
    }

    pub fn from_ket(ket: &Ket, dims: Vec<usize>) -> Result<Self> {
        Self::new(ket.projector(), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Traces out every subsystem not listed in `keep`. The kept factors stay
    /// in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        let n = self.dims.len();
        if keep.is_empty() {
            return Err(Error::invalid("must keep at least one subsystem"));
        }
        let mut kept = vec![false; n];
        for &s in keep {
            if s >= n {
                return Err(Error::invalid(format!("subsystem index {s} out of range (have {n})")));
            }
            if kept[s] {
                return Err(Error::invalid(format!("subsystem index {s} listed twice")));
            }
            kept[s] = true;
        }
        let kept_dims: Vec<usize> = (0..n).filter(|&s| kept[s]).map(|s| self.dims[s]).collect();
        let traced_dims: Vec<usize> = (0..n).filter(|&s| !kept[s]).map(|s| self.dims[s]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // full index for (kept multi-index, traced multi-index)
        let compose = |k: usize, t: usize| -> usize {
            let (mut k, mut t) = (k, t);
            let mut digits = vec![0usize; n];
            for s in (0..n).rev() {
                if kept[s] {
                    digits[s] = k % self.dims[s];
                    k /= self.dims[s];
                } else {
                    digits[s] = t % self.dims[s];
                    t /= self.dims[s];
                }
            }
            digits.iter().zip(&self.dims).fold(0, |acc, (d, size)| acc * size + d)
        };

        let index: Vec<Vec<usize>> = (0..dk)
            .map(|k| (0..dt).map(|t| compose(k, t)).collect())
            .collect();
        let reduced = ComplexMatrix::from_fn(dk, dk, |r, cc| {
            (0..dt)
                .map(|t| self.matrix.get(index[r][t], index[cc][t]))
                .sum()
        });
        DensityState::new(reduced, kept_dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize, m: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    fn random_density(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let g = random_matrix(rng, n, n);
        let p = &g * &g.adjoint();
        let tr = p.trace().re;
        p.scale(1.0 / tr)
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_of_basis_projectors() {
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let p1 = ComplexMatrix::basis_projector(2, 1);
        let t = tensor(&p0, &p1);
        for r in 0..4 {
            for cc in 0..4 {
                let want = if r == 1 && cc == 1 { ONE } else { ZERO };
                assert_eq!(t.get(r, cc), want);
            }
        }
    }

    #[test]
    fn tensor_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let t = tensor(&a, &b);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            assert_eq!(t.get(2 * i + k, 2 * j + l), a.get(i, j) * b.get(k, l));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ra = random_density(&mut rng, 3);
        let rb = random_density(&mut rng, 2);
        let joint = DensityState::new(tensor(&ra, &rb), vec![3, 2]).unwrap();
        let a = joint.partial_trace(&[0]).unwrap();
        let b = joint.partial_trace(&[1]).unwrap();
        assert!((a.matrix() - &ra).max_abs() < TOL_RECON_TEST);
        assert!((b.matrix() - &rb).max_abs() < TOL_RECON_TEST);
        assert_eq!(a.dims(), &[3]);
        let full = joint.partial_trace(&[0, 1]).unwrap();
        assert_eq!(full.matrix(), joint.matrix());
    }

    const TOL_RECON_TEST: f64 = crate::tol::TOL_RECON;

    #[test]
    fn partial_trace_of_bell_state() {
        let s = 0.5_f64.sqrt();
        let bell = Ket::new(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]).unwrap();
        let rho = DensityState::from_ket(&bell, vec![2, 2]).unwrap();
        let reduced = rho.partial_trace(&[0]).unwrap();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!((reduced.matrix() - &half).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = DensityState::new(ComplexMatrix::identity(4).scale(0.25), vec![2, 2]).unwrap();
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_middle_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let d = random_density(&mut rng, 2);
        let joint = DensityState::new(tensor(&tensor(&a, &b), &d), vec![2, 3, 2]).unwrap();
        let outer = joint.partial_trace(&[0, 2]).unwrap();
        assert!((outer.matrix() - &tensor(&a, &d)).max_abs() < 1e-12);
        let mid = joint.partial_trace(&[1]).unwrap();
        assert!((mid.matrix() - &b).max_abs() < 1e-12);
    }

    #[test]
    fn eig_of_diagonal_and_pauli_x() {
        let e = eig_hermitian(&ComplexMatrix::diag(&[1.0, 3.0])).unwrap();
        assert_abs_diff_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = eig_hermitian(&x).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
        assert!(trace_norm(&m).is_err());
        assert!(!is_psd(&m, 1.0));
    }

    #[test]
    fn eig_reconstructs_random_hermitian_9x9() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let m = random_hermitian(&mut rng, 9);
            let e = eig_hermitian(&m).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            assert!((&e.reconstruct() - &m).max_abs() < 1e-9);
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!((&gram - &ComplexMatrix::identity(9)).max_abs() < 1e-9);
        }
    }

    #[test]
    fn inv_sqrt_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert!((&inv_sqrt_on_support(&i3).unwrap() - &i3).max_abs() < 1e-14);
        let m = inv_sqrt_on_support(&ComplexMatrix::diag(&[4.0, 0.0])).unwrap();
        assert!((&m - &ComplexMatrix::diag(&[0.5, 0.0])).max_abs() < 1e-14);
        assert!(matches!(
            inv_sqrt_on_support(&ComplexMatrix::diag(&[1.0, -0.5])),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn inv_sqrt_gives_support_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for rank in 1..=5 {
            let g = random_matrix(&mut rng, 5, rank);
            let m = &g * &g.adjoint();
            let r = inv_sqrt_on_support(&m).unwrap();
            let p = &(&r * &m) * &r;
            assert!((&p - &support_projector(&m).unwrap()).max_abs() < 1e-9);
            assert_abs_diff_eq!(p.trace().re, rank as f64, epsilon = 1e-9);
            let p2 = &(&r * &r) * &m;
            assert!((&p2 - &p).max_abs() < 1e-9);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_density(&mut rng, 4);
        let s = sqrt_psd(&m).unwrap();
        assert!((&(&s * &s) - &m).max_abs() < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert_abs_diff_eq!(trace_norm(&ComplexMatrix::diag(&[0.5, -0.5])).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&ComplexMatrix::identity(2), crate::tol::TOL_PSD));
        assert!(!is_psd(&ComplexMatrix::diag(&[1.0, -1.0]), crate::tol::TOL_PSD));
        assert!(is_psd(&ComplexMatrix::diag(&[-crate::tol::TOL_PSD / 2.0, 1.0]), crate::tol::TOL_PSD));
    }

    #[test]
    fn density_state_validation() {
        assert!(DensityState::new(ComplexMatrix::identity(2), vec![2]).is_err());
        assert!(DensityState::new(ComplexMatrix::diag(&[1.5, -0.5]), vec![2]).is_err());
        assert!(DensityState::new(ComplexMatrix::diag(&[0.5, 0.5]), vec![3]).is_err());
        assert!(DensityState::new(ComplexMatrix::diag(&[0.5, 0.5]), vec![2]).is_ok());
        assert!(Ket::new(vec![ONE, ONE]).is_err());
        assert!(Ket::basis(2, 2).is_err());
    }

    #[test]
    fn matrix_construction_checks() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        let m = ComplexMatrix::new(2, 3, (0..6).map(|x| c(x as f64, 0.0)).collect()).unwrap();
        assert_eq!(m.get(1, 0), c(3.0, 0.0));
        assert_eq!(m.entries_row_major()[4], c(4.0, 0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
                ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect())
                    .unwrap()
                    .hermitian_part()
            })
        }

        proptest! {
            #[test]
            fn trace_norm_bounds_trace(m in (1usize..7).prop_flat_map(hermitian)) {
                let tn = trace_norm(&m).unwrap();
                prop_assert!(tn + 1e-12 >= m.trace().re.abs());
            }

            #[test]
            fn partial_trace_preserves_trace(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36)) {
                let g = ComplexMatrix::new(6, 6, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
                let p = &g * &g.adjoint();
                let rho = p.scale(1.0 / p.trace().re);
                let joint = DensityState::new(rho, vec![2, 3]).unwrap();
                for keep in [&[0usize][..], &[1]] {
                    let r = joint.partial_trace(keep).unwrap();
                    prop_assert!((r.matrix().trace().re - 1.0).abs() <= 1e-10);
                    prop_assert!(r.matrix().hermiticity_deviation() <= 1e-10);
                }
            }
        }
    }
}
