//! Small dense complex linear algebra.
//!
//! Only what the frame computations need: products, adjoints, LU based
//! determinant and inverse, a cyclic Jacobi eigensolver for Hermitian
//! matrices and the Toeplitz / circulant predicates. Sizes stay well under a
//! few hundred rows, so everything is plain row-major `Vec` storage.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Default absolute tolerance for the Hermitian precondition.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius mass is below this fraction of `‖a‖_F`.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 100;
/// LU declares a pivot singular below this fraction of the largest entry.
pub const PIVOT_REL_TOL: f64 = 1e-12;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidSize(format!("{rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSize(format!("non-finite entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for (i, &a) in self.row(r).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = rhs.row(i);
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᴴ`
    pub fn gram_outer(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for s in r..n {
                let v: Complex = self
                    .row(r)
                    .iter()
                    .zip(self.row(s))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out[(r, s)] = v;
                out[(s, r)] = v.conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Rows at `indices` (0-based), in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSize("empty row selection".into()));
        }
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i + 1,
                    n: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `max |self - rhs|` entrywise; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.sub(rhs).map_or(f64::INFINITY, |d| d.max_abs())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// `max |a - aᴴ|`, or an error for non-square input.
    pub fn hermitian_defect(&self) -> Result<f64> {
        self.require_square()?;
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for s in r..n {
                worst = worst.max((self[(r, s)] - self[(s, r)].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Drops imaginary parts with modulus at most `tol`, failing on anything larger.
    pub fn into_real(mut self, tol: f64) -> Result<Self> {
        let residue = self.max_imag();
        if residue > tol {
            return Err(Error::Internal(format!(
                "imaginary residue {residue:e} exceeds {tol:e} on a real construction"
            )));
        }
        for z in &mut self.data {
            z.im = 0.0;
        }
        Ok(self)
    }

    /// Nested `[re, im]` pairs, row by row.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues of a Hermitian matrix, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    /// Replaces values in `[-tol, 0)` by zero.
    pub fn clamp_nonnegative(mut self, tol: f64) -> Self {
        for v in &mut self.values {
            if *v < 0.0 && *v >= -tol {
                *v = 0.0;
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    pub hermitian_tol: f64,
    pub convergence_tol: f64,
    pub max_sweeps: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            hermitian_tol: DEFAULT_HERMITIAN_TOL,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

/// Eigenvalues of a Hermitian matrix (Hermitian within `tol`), largest first.
pub fn eig_hermitian(a: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    eig_hermitian_with(
        a,
        &EigOptions {
            hermitian_tol: tol,
            ..EigOptions::default()
        },
    )
}

/// Cyclic Jacobi for complex Hermitian matrices.
///
/// Each rotation first removes the phase of `a[p][q]` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the
/// combined transform `J = D·R` zeroes the `(p, q)` pair exactly.
pub fn eig_hermitian_with(a: &ComplexMatrix, opts: &EigOptions) -> Result<Spectrum> {
    let asymmetry = a.hermitian_defect()?;
    if asymmetry > opts.hermitian_tol {
        return Err(Error::NotHermitian {
            asymmetry,
            tol: opts.hermitian_tol,
        });
    }
    let n = a.rows();
    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut m = ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(a[(r, r)].re, 0.0)
        } else {
            (a[(r, c)] + a[(c, r)].conj()) * 0.5
        }
    });
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(Spectrum::new(vec![0.0; n]));
    }
    let target = opts.convergence_tol * scale;

    let off_mass = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += m[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_mass(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps == opts.max_sweeps {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, p, q);
            }
        }
        sweeps += 1;
        off = off_mass(&m);
    }
    Ok(Spectrum::new((0..n).map(|i| m[(i, i)].re).collect()))
}

fn rotate(m: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Below this the rotation angle underflows against the diagonal gap.
    if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]
    let jpp = Complex::new(c, 0.0);
    let jpq = Complex::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.rows();
    for r in 0..n {
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        m[(r, p)] = arp * jpp + arq * jqp;
        m[(r, q)] = arp * jpq + arq * jqq;
    }
    for c2 in 0..n {
        let apc = m[(p, c2)];
        let aqc = m[(q, c2)];
        m[(p, c2)] = jpp.conj() * apc + jqp.conj() * aqc;
        m[(q, c2)] = jpq.conj() * apc + jqq.conj() * aqc;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}

struct Lu {
    factors: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn lu_decompose(a: &ComplexMatrix) -> Result<Lu> {
    a.require_square()?;
    let n = a.rows();
    let mut f = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let threshold = PIVOT_REL_TOL * a.max_abs();
    let mut singular = false;

    for col in 0..n {
        let (piv, piv_abs) =
            (col..n)
                .map(|r| (r, f[(r, col)].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs <= threshold {
            singular = true;
        }
        if piv != col {
            for c in 0..n {
                let tmp = f[(col, c)];
                f[(col, c)] = f[(piv, c)];
                f[(piv, c)] = tmp;
            }
            perm.swap(col, piv);
            sign = -sign;
        }
        let pivot = f[(col, col)];
        if pivot == ZERO {
            continue;
        }
        for r in col + 1..n {
            let factor = f[(r, col)] / pivot;
            f[(r, col)] = factor;
            for c in col + 1..n {
                let u = f[(col, c)];
                f[(r, c)] -= factor * u;
            }
        }
    }
    Ok(Lu {
        factors: f,
        perm,
        sign,
        singular,
    })
}

/// Determinant by partially pivoted LU.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex> {
    let lu = lu_decompose(a)?;
    Ok(lu
        .factors
        .diagonal()
        .iter()
        .fold(Complex::new(lu.sign, 0.0), |acc, d| acc * d))
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = lu_decompose(a)?;
    if lu.singular {
        return Err(Error::Singular);
    }
    let n = a.rows();
    let f = &lu.factors;
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut col = vec![ZERO; n];
    for j in 0..n {
        // Solve L·U·x = P·e_j.
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = if lu.perm[i] == j { ONE } else { ZERO };
        }
        for i in 0..n {
            let mut v = col[i];
            for k in 0..i {
                v -= f[(i, k)] * col[k];
            }
            col[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = col[i];
            for k in i + 1..n {
                v -= f[(i, k)] * col[k];
            }
            col[i] = v / f[(i, i)];
        }
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Every diagonal constant within `tol`.
pub fn is_toeplitz(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(toeplitz_defect(a)? <= tol)
}

/// Toeplitz, and each row's last entry equals the next row's first entry.
pub fn is_circulant(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(circulant_defect(a)? <= tol)
}

/// Largest violation of `a[r][s] = a[r+1][s+1]`.
pub fn toeplitz_defect(a: &ComplexMatrix) -> Result<f64> {
    a.require_square()?;
    let n = a.rows();
    let mut worst = 0.0f64;
    for r in 0..n.saturating_sub(1) {
        for s in 0..n - 1 {
            worst = worst.max((a[(r, s)] - a[(r + 1, s + 1)]).norm());
        }
    }
    Ok(worst)
}

/// Largest violation of the Toeplitz or wrap-around conditions.
pub fn circulant_defect(a: &ComplexMatrix) -> Result<f64> {
    let mut worst = toeplitz_defect(a)?;
    let n = a.rows();
    for r in 0..n - 1 {
        worst = worst.max((a[(r, n - 1)] - a[(r + 1, 0)]).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let s = eig_hermitian(&ComplexMatrix::identity(2), 1e-10).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let s = eig_hermitian(&a, 1e-10).unwrap();
        assert!((s.values()[0] - 3.0).abs() < 1e-14);
        assert!((s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            eig_hermitian(&rect, 1e-10),
            Err(Error::NotSquare { .. })
        ));
        let skew = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            eig_hermitian(&skew, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_reports_no_convergence_when_capped() {
        let a = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 5.0, 4.0],
            vec![3.0, 4.0, 9.0],
        ])
        .unwrap();
        let opts = EigOptions {
            max_sweeps: 0,
            ..EigOptions::default()
        };
        assert!(matches!(
            eig_hermitian_with(&a, &opts),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn zero_matrix_spectrum() {
        let s = eig_hermitian(&ComplexMatrix::zeros(3, 3), 1e-10).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(
            determinant(&ComplexMatrix::identity(4)).unwrap(),
            c(1.0, 0.0)
        );
        let d = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((determinant(&d).unwrap() - c(6.0, 0.0)).norm() < 1e-15);
        // Row swap flips the sign.
        let p = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((determinant(&p).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            determinant(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn singular_determinant_is_zero() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(determinant(&a).unwrap().norm() < 1e-15);
        assert_eq!(inverse(&a), Err(Error::Singular));
    }

    #[test]
    fn inverse_small_cases() {
        let id = ComplexMatrix::identity(3);
        assert!(inverse(&id).unwrap().max_abs_diff(&id) < 1e-15);
        let d = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let expect = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!(inverse(&d).unwrap().max_abs_diff(&expect) < 1e-15);
        assert!(matches!(
            inverse(&ComplexMatrix::zeros(3, 2)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn toeplitz_and_circulant_predicates() {
        let t = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!(is_toeplitz(&t, 1e-12).unwrap());
        assert!(!is_circulant(&t, 1e-12).unwrap());
        let nt = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(!is_toeplitz(&nt, 1e-12).unwrap());
        let circ = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![3.0, 1.0, 2.0],
            vec![2.0, 3.0, 1.0],
        ])
        .unwrap();
        assert!(is_toeplitz(&circ, 1e-12).unwrap());
        assert!(is_circulant(&circ, 1e-12).unwrap());
        assert!(is_toeplitz(&ComplexMatrix::zeros(2, 3), 1e-12).is_err());
        assert!(is_circulant(&ComplexMatrix::identity(1), 1e-12).unwrap());
    }

    #[test]
    fn construction_guards() {
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_real_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn into_real_truncates_small_residue_only() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 1e-14)]]).unwrap();
        assert_eq!(m.clone().into_real(1e-12).unwrap()[(0, 0)], c(1.0, 0.0));
        assert!(matches!(m.into_real(1e-15), Err(Error::Internal(_))));
    }
}
