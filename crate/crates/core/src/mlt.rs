//! Two-level Toeplitz operators: build, adjoint, orthogonal projection, and
//! the off-structure residual used as an equality constraint by the solver.
//!
//! A two-level Toeplitz matrix over an `M_x x M_y` lattice is constant along
//! every two-level diagonal `(k_y, k_x) = (q_y - r_y, q_x - r_x)` under the
//! elevation-major flattening `index = m_y * M_x + m_x`.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::{Error, Result};

/// Coefficients of a Hermitian two-level Toeplitz matrix, indexed by lag
/// pair `(k_y, k_x)` with `k_y in [-(M_y-1), M_y-1]`,
/// `k_x in [-(M_x-1), M_x-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MltParams {
    coeffs: Array2<Complex64>,
    m_x: usize,
    m_y: usize,
}

impl MltParams {
    /// Validates Hermitian symmetry `c(-k_y, -k_x) = conj(c(k_y, k_x))` and
    /// a real center coefficient.
    pub fn new(m_x: usize, m_y: usize, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (2 * m_y - 1, 2 * m_x - 1) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient array {:?} does not match lag range for {}x{}",
                coeffs.dim(),
                m_x,
                m_y
            )));
        }
        let p = Self { coeffs, m_x, m_y };
        for ky in -(m_y as isize - 1)..=(m_y as isize - 1) {
            for kx in -(m_x as isize - 1)..=(m_x as isize - 1) {
                let diff = (p.coeff(ky, kx) - p.coeff(-ky, -kx).conj()).norm();
                if diff > 1e-12 * (1.0 + p.coeff(ky, kx).norm()) {
                    return Err(Error::InvalidParameter(format!(
                        "coefficients not Hermitian at lag ({ky}, {kx})"
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn zeros(m_x: usize, m_y: usize) -> Self {
        Self {
            coeffs: Array2::zeros((2 * m_y - 1, 2 * m_x - 1)),
            m_x,
            m_y,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_x, self.m_y)
    }

    pub fn matrix_size(&self) -> usize {
        self.m_x * self.m_y
    }

    pub fn coeff(&self, k_y: isize, k_x: isize) -> Complex64 {
        self.coeffs[(
            (k_y + self.m_y as isize - 1) as usize,
            (k_x + self.m_x as isize - 1) as usize,
        )]
    }

    pub fn coeff_mut(&mut self, k_y: isize, k_x: isize) -> &mut Complex64 {
        &mut self.coeffs[(
            (k_y + self.m_y as isize - 1) as usize,
            (k_x + self.m_x as isize - 1) as usize,
        )]
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }
}

fn lattice(i: usize, m_x: usize) -> (isize, isize) {
    ((i / m_x) as isize, (i % m_x) as isize)
}

/// Assemble the dense `M x M` two-level Toeplitz matrix from its lag
/// coefficients.
pub fn mlt_build(params: &MltParams) -> Array2<Complex64> {
    let m = params.matrix_size();
    let mut z = Array2::zeros((m, m));
    for q in 0..m {
        let (qy, qx) = lattice(q, params.m_x);
        for r in 0..m {
            let (ry, rx) = lattice(r, params.m_x);
            z[(q, r)] = params.coeff(qy - ry, qx - rx);
        }
    }
    z
}

/// Adjoint of [`mlt_build`] under the Frobenius inner product: per-lag sums
/// of the entries on each two-level diagonal (no averaging, no Hermitian
/// symmetrization), so that `<build(U), Z>_F = <U, diag_sums(Z)>`.
pub fn mlt_diag_sums(z: &ArrayView2<Complex64>, m_x: usize, m_y: usize) -> Result<Array2<Complex64>> {
    let m = m_x * m_y;
    if z.dim() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "matrix {:?} does not match {}x{} lattice",
            z.dim(),
            m_x,
            m_y
        )));
    }
    let mut sums = Array2::zeros((2 * m_y - 1, 2 * m_x - 1));
    for q in 0..m {
        let (qy, qx) = lattice(q, m_x);
        for r in 0..m {
            let (ry, rx) = lattice(r, m_x);
            let ky = (qy - ry + m_y as isize - 1) as usize;
            let kx = (qx - rx + m_x as isize - 1) as usize;
            sums[(ky, kx)] += z[(q, r)];
        }
    }
    Ok(sums)
}

/// Number of matrix entries on the two-level diagonal with lag
/// `(k_y, k_x)`: `(M_y - |k_y|) * (M_x - |k_x|)`.
pub fn diag_count(m_x: usize, m_y: usize, k_y: isize, k_x: isize) -> usize {
    (m_y - k_y.unsigned_abs()) * (m_x - k_x.unsigned_abs())
}

/// Orthogonal projection of the Hermitian part of `Z` onto the Hermitian
/// two-level-Toeplitz subspace: arithmetic mean per two-level diagonal.
pub fn mlt_project(z: &ArrayView2<Complex64>, m_x: usize, m_y: usize) -> Result<MltParams> {
    let zh = hermitian_part(z);
    let sums = mlt_diag_sums(&zh.view(), m_x, m_y)?;
    let mut params = MltParams::zeros(m_x, m_y);
    for ky in -(m_y as isize - 1)..=(m_y as isize - 1) {
        for kx in -(m_x as isize - 1)..=(m_x as isize - 1) {
            let n = diag_count(m_x, m_y, ky, kx) as f64;
            *params.coeff_mut(ky, kx) =
                sums[((ky + m_y as isize - 1) as usize, (kx + m_x as isize - 1) as usize)] / n;
        }
    }
    // the mean of a Hermitian matrix's main two-level diagonal is real up to
    // rounding; pin it exactly
    let c0 = params.coeff(0, 0);
    *params.coeff_mut(0, 0) = Complex64::new(c0.re, 0.0);
    Ok(params)
}

/// Off-structure residual `Z - build(project(Z))`: the component of `Z`
/// orthogonal to the Hermitian two-level-Toeplitz subspace. Zero exactly
/// when `Z` is Hermitian and two-level Toeplitz.
pub fn mlt_residual(z: &ArrayView2<Complex64>, m_x: usize, m_y: usize) -> Result<Array2<Complex64>> {
    let projected = mlt_build(&mlt_project(z, m_x, m_y)?);
    Ok(z.to_owned() - projected)
}

pub(crate) fn hermitian_part(z: &ArrayView2<Complex64>) -> Array2<Complex64> {
    let zh = z.mapv(|c| c.conj()).reversed_axes();
    (z.to_owned() + zh).mapv(|c| c * 0.5)
}
