//! Virtual uniform rectangular array: separable steering vectors, the
//! direction-cosine frequency map, the angular constraint grid, and the
//! ridge-regularized transformation-matrix initializer.

use std::f64::consts::PI;

use ndarray::prelude::*;
use ndarray_linalg::Solve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{uca_steering, UcaGeometry};
use crate::{Error, Result};

/// Virtual URA with `m_x * m_y` elements on a rectangular lattice with
/// spacings given in wavelengths. Spacings are capped at half a wavelength
/// so the spatial-frequency-to-angle map stays injective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UraConfig {
    pub m_x: usize,
    pub m_y: usize,
    pub d_x_wl: f64,
    pub d_y_wl: f64,
}

impl UraConfig {
    pub fn new(m_x: usize, m_y: usize, d_x_wl: f64, d_y_wl: f64) -> Result<Self> {
        if m_x == 0 || m_y == 0 {
            return Err(Error::InvalidParameter("URA dims must be >= 1".into()));
        }
        for d in [d_x_wl, d_y_wl] {
            if !(d > 0.0 && d <= 0.5) {
                return Err(Error::InvalidParameter(format!(
                    "URA spacing must lie in (0, 0.5] wavelengths, got {d}"
                )));
            }
        }
        Ok(Self {
            m_x,
            m_y,
            d_x_wl,
            d_y_wl,
        })
    }

    /// Half-wavelength-spaced URA, the default virtual geometry.
    pub fn half_wavelength(m_x: usize, m_y: usize) -> Result<Self> {
        Self::new(m_x, m_y, 0.5, 0.5)
    }

    pub fn len(&self) -> usize {
        self.m_x * self.m_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Cartesian-product angular grid with elevation-major point ordering:
/// `points[g] = (theta[g % n_theta], phi[g / n_theta])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub points: Vec<(f64, f64)>,
}

impl AngularGrid {
    pub fn from_axes(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() < 1 || phis.len() < 1 {
            return Err(Error::InvalidParameter("grid axes must be non-empty".into()));
        }
        if !thetas.windows(2).all(|w| w[0] < w[1]) || !phis.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "grid axes must be strictly increasing".into(),
            ));
        }
        if thetas[0] < -PI || *thetas.last().unwrap() >= PI {
            return Err(Error::AngleDomain("grid azimuths outside [-pi, pi)".into()));
        }
        if phis[0] < 0.0 || *phis.last().unwrap() > PI / 2.0 {
            return Err(Error::AngleDomain("grid elevations outside [0, pi/2]".into()));
        }
        let mut points = Vec::with_capacity(thetas.len() * phis.len());
        for &phi in &phis {
            for &theta in &thetas {
                points.push((theta, phi));
            }
        }
        Ok(Self {
            thetas,
            phis,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Uniform grid over the full angular domain: `n_theta` azimuths starting at
/// `-pi`, and `n_phi` elevations `(pi/2) * (j+1)/n_phi` — zenith (`phi = 0`)
/// is excluded since all azimuths coincide there.
pub fn build_constraint_grid(n_theta: usize, n_phi: usize) -> Result<AngularGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidParameter(
            "constraint grid needs n_theta >= 2 and n_phi >= 2".into(),
        ));
    }
    let thetas = (0..n_theta)
        .map(|i| -PI + 2.0 * PI * i as f64 / n_theta as f64)
        .collect();
    let phis = (0..n_phi)
        .map(|j| (PI / 2.0) * (j + 1) as f64 / n_phi as f64)
        .collect();
    AngularGrid::from_axes(thetas, phis)
}

/// Direction cosines seen by a planar array: `u = sin(phi) cos(theta)`,
/// `v = sin(phi) sin(theta)`.
pub fn angles_to_freqs(theta: f64, phi: f64) -> (f64, f64) {
    let sp = phi.sin();
    (sp * theta.cos(), sp * theta.sin())
}

/// Inverse of [`angles_to_freqs`]: `phi = asin(sqrt(u^2+v^2))`,
/// `theta = atan2(v, u)`. At the zenith-degenerate point `u = v = 0` the
/// azimuth is reported as 0 by the atan2 convention.
pub fn freqs_to_angles(u: f64, v: f64) -> Result<(f64, f64)> {
    let r2 = u * u + v * v;
    if r2 > 1.0 + 1e-12 {
        return Err(Error::InfeasibleFrequency(r2));
    }
    let phi = r2.sqrt().min(1.0).asin();
    let theta = if u == 0.0 && v == 0.0 {
        0.0
    } else {
        crate::array::wrap_azimuth(v.atan2(u))
    };
    Ok((theta, phi))
}

fn ula_axis(m: usize, d_wl: f64, freq: f64) -> Array1<Complex64> {
    Array1::from_iter(
        (0..m).map(|i| Complex64::from_polar(1.0, 2.0 * PI * d_wl * i as f64 * freq)),
    )
}

/// Separable URA steering vector `b_y(v) ⊗ b_x(u)` evaluated at the
/// direction cosines of `(theta, phi)`. Flattened index is
/// `m_y * M_x + m_x` (elevation-axis major).
pub fn ura_steering(cfg: &UraConfig, theta: f64, phi: f64) -> Result<Array1<Complex64>> {
    if !phi.is_finite() || !(0.0..=PI / 2.0).contains(&phi) {
        return Err(Error::AngleDomain(format!(
            "elevation {phi} outside [0, pi/2]"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::AngleDomain(format!("azimuth {theta} is not finite")));
    }
    let (u, v) = angles_to_freqs(theta, phi);
    Ok(ura_steering_from_freqs(cfg, u, v))
}

/// Same as [`ura_steering`] but parameterized directly by `(u, v)`.
pub fn ura_steering_from_freqs(cfg: &UraConfig, u: f64, v: f64) -> Array1<Complex64> {
    let bx = ula_axis(cfg.m_x, cfg.d_x_wl, u);
    let by = ula_axis(cfg.m_y, cfg.d_y_wl, v);
    let mut b = Array1::zeros(cfg.len());
    for my in 0..cfg.m_y {
        for mx in 0..cfg.m_x {
            b[my * cfg.m_x + mx] = by[my] * bx[mx];
        }
    }
    b
}

/// Stack UCA steering vectors over the grid as columns (N x G).
pub fn uca_dictionary(geom: &UcaGeometry, grid: &AngularGrid) -> Result<Array2<Complex64>> {
    let mut a = Array2::zeros((geom.n_sensors(), grid.len()));
    for (g, &(theta, phi)) in grid.points.iter().enumerate() {
        a.column_mut(g).assign(&uca_steering(geom, theta, phi)?);
    }
    Ok(a)
}

/// Stack URA steering vectors over the grid as columns (M x G).
pub fn ura_dictionary(cfg: &UraConfig, grid: &AngularGrid) -> Result<Array2<Complex64>> {
    let mut b = Array2::zeros((cfg.len(), grid.len()));
    for (g, &(theta, phi)) in grid.points.iter().enumerate() {
        b.column_mut(g).assign(&ura_steering(cfg, theta, phi)?);
    }
    Ok(b)
}

/// Ridge-regularized least-squares initializer for the transformation
/// matrix: the minimizer of `sum_g ||T a_g - b_g||^2 + ridge ||T||_F^2`,
/// i.e. `T0 = B A^H (A A^H + ridge I)^{-1}`.
pub fn init_transform(
    geom: &UcaGeometry,
    cfg: &UraConfig,
    grid: &AngularGrid,
    ridge: f64,
) -> Result<Array2<Complex64>> {
    if !(ridge > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ridge must be positive, got {ridge}"
        )));
    }
    let a = uca_dictionary(geom, grid)?;
    let b = ura_dictionary(cfg, grid)?;
    let a_h = a.mapv(|c| c.conj()).reversed_axes();
    let mut gram = a.dot(&a_h);
    for i in 0..gram.nrows() {
        gram[(i, i)] += Complex64::new(ridge, 0.0);
    }
    let rhs = b.dot(&a_h); // M x N
    // T = rhs * gram^{-1}; gram is Hermitian so solve gram X = rhs^H, T = X^H.
    let rhs_h = rhs.mapv(|c| c.conj()).reversed_axes(); // N x M
    let mut t_h = Array2::zeros(rhs_h.raw_dim());
    for (j, col) in rhs_h.columns().into_iter().enumerate() {
        let x = gram.solve(&col.to_owned())?;
        t_h.column_mut(j).assign(&x);
    }
    Ok(t_h.mapv(|c| c.conj()).reversed_axes())
}
