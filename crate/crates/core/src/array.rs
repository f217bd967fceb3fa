//! Physical uniform circular array: geometry, steering vectors, and
//! reproducible single-snapshot synthesis.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Wrap an azimuth into `[-pi, pi)`.
pub fn wrap_azimuth(theta: f64) -> f64 {
    let mut w = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w -= 2.0 * PI;
    }
    w
}

/// Uniform circular array in the x-y plane. Sensor `n` sits at polar angle
/// `gamma_n = 2*pi*n/N` (0-based) on a circle of `radius_wl` wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct UcaGeometry {
    n_sensors: usize,
    radius_wl: f64,
    sensor_angles: Vec<f64>,
}

impl UcaGeometry {
    pub fn new(n_sensors: usize, radius_wl: f64) -> Result<Self> {
        if n_sensors == 0 {
            return Err(Error::InvalidParameter("n_sensors must be >= 1".into()));
        }
        if !(radius_wl > 0.0) || !radius_wl.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius_wl must be positive and finite, got {radius_wl}"
            )));
        }
        let sensor_angles = (0..n_sensors)
            .map(|n| 2.0 * PI * n as f64 / n_sensors as f64)
            .collect();
        Ok(Self {
            n_sensors,
            radius_wl,
            sensor_angles,
        })
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    pub fn radius_wl(&self) -> f64 {
        self.radius_wl
    }

    pub fn sensor_angles(&self) -> &[f64] {
        &self.sensor_angles
    }
}

/// A set of far-field sources: paired (azimuth, elevation) angles in radians
/// and complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSet {
    angles: Vec<(f64, f64)>,
    amplitudes: Vec<Complex64>,
}

impl SourceSet {
    /// Azimuths are wrapped into `[-pi, pi)`; elevations must lie in
    /// `[0, pi/2]`. Angle pairs must be distinct and amplitudes nonzero.
    pub fn new(angles: Vec<(f64, f64)>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParameter("source set must be non-empty".into()));
        }
        if angles.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} angle pairs vs {} amplitudes",
                angles.len(),
                amplitudes.len()
            )));
        }
        let angles: Vec<(f64, f64)> = angles
            .into_iter()
            .map(|(t, p)| (wrap_azimuth(t), p))
            .collect();
        for &(_, phi) in &angles {
            check_elevation(phi)?;
        }
        for i in 0..angles.len() {
            for j in (i + 1)..angles.len() {
                if angles[i] == angles[j] {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate source direction {:?}",
                        angles[i]
                    )));
                }
            }
        }
        if amplitudes.iter().any(|a| a.norm() == 0.0) {
            return Err(Error::InvalidParameter("source amplitude is zero".into()));
        }
        Ok(Self { angles, amplitudes })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Same directions with fresh amplitudes (used for per-trial phases).
    pub fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(self.angles.clone(), amplitudes)
    }
}

/// One complex measurement vector together with the metadata needed to
/// regenerate and score it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub y: Array1<Complex64>,
    pub noise_var: f64,
    pub truth: Option<SourceSet>,
    pub seed: u64,
}

fn check_elevation(phi: f64) -> Result<()> {
    if !phi.is_finite() || !(0.0..=PI / 2.0).contains(&phi) {
        return Err(Error::AngleDomain(format!(
            "elevation {phi} outside [0, pi/2]"
        )));
    }
    Ok(())
}

/// UCA steering vector: entry `n` is
/// `exp(j * 2*pi * r/lambda * sin(phi) * cos(theta - gamma_n))`.
///
/// The azimuth is treated as circular (wrapped into `[-pi, pi)`); the
/// elevation must lie in `[0, pi/2]`.
pub fn uca_steering(geom: &UcaGeometry, theta: f64, phi: f64) -> Result<Array1<Complex64>> {
    check_elevation(phi)?;
    if !theta.is_finite() {
        return Err(Error::AngleDomain(format!("azimuth {theta} is not finite")));
    }
    let theta = wrap_azimuth(theta);
    let scale = 2.0 * PI * geom.radius_wl * phi.sin();
    Ok(Array1::from_iter(geom.sensor_angles.iter().map(|&g| {
        Complex64::from_polar(1.0, scale * (theta - g).cos())
    })))
}

/// Analytic partials of the UCA steering vector with respect to azimuth and
/// elevation, evaluated entrywise.
pub fn uca_steering_deriv(
    geom: &UcaGeometry,
    theta: f64,
    phi: f64,
) -> Result<(Array1<Complex64>, Array1<Complex64>)> {
    let a = uca_steering(geom, theta, phi)?;
    let theta = wrap_azimuth(theta);
    let j = Complex64::new(0.0, 1.0);
    let two_pi_r = 2.0 * PI * geom.radius_wl;
    let mut d_theta = Array1::zeros(geom.n_sensors);
    let mut d_phi = Array1::zeros(geom.n_sensors);
    for (n, &g) in geom.sensor_angles.iter().enumerate() {
        let psi = theta - g;
        d_theta[n] = a[n] * j * (-two_pi_r * phi.sin() * psi.sin());
        d_phi[n] = a[n] * j * (two_pi_r * phi.cos() * psi.cos());
    }
    Ok((d_theta, d_phi))
}

/// Noise variance for a given SNR in dB under the per-source unit-power
/// convention `SNR = E|s_k|^2 / sigma^2` with `E|s_k|^2 = 1`.
pub fn snr_to_noise_var(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Synthesize `y = sum_k s_k a(theta_k, phi_k) + n` with circular complex
/// Gaussian noise of per-entry variance `noise_var` (variance split evenly
/// between real and imaginary parts).
///
/// Noise is drawn from a ChaCha8 stream seeded with `seed`, so identical
/// inputs give bit-identical snapshots on any platform. With
/// `noise_var == 0` no generator is consulted at all and the result is
/// seed-independent.
pub fn synthesize_snapshot(
    geom: &UcaGeometry,
    sources: &SourceSet,
    noise_var: f64,
    seed: u64,
) -> Result<Snapshot> {
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise_var must be >= 0, got {noise_var}"
        )));
    }
    let mut y = Array1::<Complex64>::zeros(geom.n_sensors);
    for (&(theta, phi), &amp) in sources.angles().iter().zip(sources.amplitudes()) {
        let a = uca_steering(geom, theta, phi)?;
        y.zip_mut_with(&a, |yi, &ai| *yi += amp * ai);
    }
    if noise_var > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = (noise_var / 2.0).sqrt();
        for yi in y.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *yi += Complex64::new(sigma * re, sigma * im);
        }
    }
    Ok(Snapshot {
        y,
        noise_var,
        truth: Some(sources.clone()),
        seed,
    })
}

#[derive(Serialize, Deserialize)]
struct TruthFile {
    theta: Vec<f64>,
    phi: Vec<f64>,
    amp: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct SnapshotFile {
    n_sensors: usize,
    radius_wl: f64,
    noise_var: f64,
    seed: u64,
    y: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<TruthFile>,
}

/// Write a snapshot (plus the geometry it was measured on) as JSON.
pub fn write_snapshot_json(path: &Path, geom: &UcaGeometry, snap: &Snapshot) -> Result<()> {
    let file = SnapshotFile {
        n_sensors: geom.n_sensors,
        radius_wl: geom.radius_wl,
        noise_var: snap.noise_var,
        seed: snap.seed,
        y: snap.y.iter().map(|c| [c.re, c.im]).collect(),
        truth: snap.truth.as_ref().map(|t| TruthFile {
            theta: t.angles().iter().map(|&(th, _)| th).collect(),
            phi: t.angles().iter().map(|&(_, ph)| ph).collect(),
            amp: t.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
        }),
    };
    let body = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Format(format!("snapshot encode: {e}")))?;
    let mut f = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(body.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read a snapshot JSON file back into geometry + snapshot.
pub fn read_snapshot_json(path: &Path) -> Result<(UcaGeometry, Snapshot)> {
    let body = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: SnapshotFile =
        serde_json::from_str(&body).map_err(|e| Error::Format(format!("snapshot decode: {e}")))?;
    let geom = UcaGeometry::new(file.n_sensors, file.radius_wl)?;
    if file.y.len() != file.n_sensors {
        return Err(Error::DimensionMismatch(format!(
            "snapshot has {} samples for {} sensors",
            file.y.len(),
            file.n_sensors
        )));
    }
    let truth = match file.truth {
        Some(t) => {
            if t.theta.len() != t.phi.len() || t.theta.len() != t.amp.len() {
                return Err(Error::Format("truth arrays have unequal lengths".into()));
            }
            let angles = t.theta.iter().copied().zip(t.phi.iter().copied()).collect();
            let amps = t.amp.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            Some(SourceSet::new(angles, amps)?)
        }
        None => None,
    };
    Ok((
        geom,
        Snapshot {
            y: file.y.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
            noise_var: file.noise_var,
            truth,
            seed: file.seed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn geom(n: usize, r: f64) -> UcaGeometry {
        UcaGeometry::new(n, r).unwrap()
    }

    #[test]
    fn sensor_angles_uniform() {
        let g = geom(8, 0.5);
        assert_eq!(g.sensor_angles().len(), 8);
        assert_eq!(g.sensor_angles()[0], 0.0);
        for w in g.sensor_angles().windows(2) {
            assert!((w[1] - w[0] - PI / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_elevation_gives_all_ones() {
        let a = uca_steering(&geom(16, 1.0), 0.7, 0.0).unwrap();
        for &c in a.iter() {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn four_element_endfire_wraps_to_ones() {
        // phases 2*pi*cos(gamma_n) are {2pi, 0, -2pi, 0}
        let a = uca_steering(&geom(4, 1.0), 0.0, PI / 2.0).unwrap();
        for &c in a.iter() {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_matches_direct_formula() {
        let g = geom(16, 1.0);
        let (theta, phi) = (0.3, 0.9);
        let a = uca_steering(&g, theta, phi).unwrap();
        for n in 0..16 {
            let gamma = 2.0 * PI * n as f64 / 16.0;
            let phase = 2.0 * PI * 1.0 * phi.sin() * (theta - gamma).cos();
            let expect = Complex64::new(phase.cos(), phase.sin());
            assert!((a[n] - expect).norm() < 1e-14, "entry {n}");
        }
    }

    #[test]
    fn steering_unit_modulus_and_periodic() {
        let g = geom(16, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(0.0..PI / 2.0);
            let a = uca_steering(&g, theta, phi).unwrap();
            let b = uca_steering(&g, theta + 2.0 * PI, phi).unwrap();
            for n in 0..16 {
                assert!((a[n].norm() - 1.0).abs() < 1e-12);
                assert!((a[n] - b[n]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn elevation_domain_checked() {
        let g = geom(8, 1.0);
        assert!(uca_steering(&g, 0.0, -0.01).is_err());
        assert!(uca_steering(&g, 0.0, PI / 2.0 + 0.01).is_err());
        assert!(uca_steering(&g, f64::NAN, 0.3).is_err());
    }

    #[test]
    fn noiseless_single_source_is_steering_vector() {
        let g = geom(16, 1.0);
        let s = SourceSet::new(vec![(0.4, 0.8)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let snap = synthesize_snapshot(&g, &s, 0.0, 123).unwrap();
        let a = uca_steering(&g, 0.4, 0.8).unwrap();
        assert_eq!(snap.y, a);
    }

    #[test]
    fn noiseless_two_sources_linear() {
        let g = geom(16, 1.0);
        let amps = vec![Complex64::new(0.5, 1.0), Complex64::new(-2.0, 0.25)];
        let s = SourceSet::new(vec![(0.4, 0.8), (-1.0, 0.3)], amps.clone()).unwrap();
        let snap = synthesize_snapshot(&g, &s, 0.0, 9).unwrap();
        let expect = amps[0] * &uca_steering(&g, 0.4, 0.8).unwrap()
            + amps[1] * &uca_steering(&g, -1.0, 0.3).unwrap();
        for n in 0..16 {
            assert!((snap.y[n] - expect[n]).norm() < 1e-14);
        }
    }

    #[test]
    fn noiseless_is_seed_independent() {
        let g = geom(16, 1.0);
        let s = SourceSet::new(vec![(0.4, 0.8)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let a = synthesize_snapshot(&g, &s, 0.0, 1).unwrap();
        let b = synthesize_snapshot(&g, &s, 0.0, 2).unwrap();
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn noisy_snapshot_reproducible() {
        let g = geom(16, 1.0);
        let s = SourceSet::new(vec![(0.4, 0.8)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let a = synthesize_snapshot(&g, &s, 0.5, 42).unwrap();
        let b = synthesize_snapshot(&g, &s, 0.5, 42).unwrap();
        assert_eq!(a.y, b.y);
        let c = synthesize_snapshot(&g, &s, 0.5, 43).unwrap();
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn noise_variance_monte_carlo() {
        // 100_000 complex noise draws across regenerated snapshots.
        let g = geom(16, 1.0);
        let s = SourceSet::new(vec![(0.4, 0.8)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let clean = synthesize_snapshot(&g, &s, 0.0, 0).unwrap().y;
        let n_snaps = 100_000 / 16;
        let mut sum_sq = 0.0;
        for seed in 0..n_snaps {
            let snap = synthesize_snapshot(&g, &s, 1.0, 42 + seed as u64).unwrap();
            for n in 0..16 {
                sum_sq += (snap.y[n] - clean[n]).norm_sqr();
            }
        }
        let var = sum_sq / (n_snaps * 16) as f64;
        assert!((var - 1.0).abs() < 0.02, "empirical variance {var}");
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(snr_to_noise_var(0.0), 1.0);
        assert!((snr_to_noise_var(20.0) - 0.01).abs() < 1e-18);
        assert!((snr_to_noise_var(3.0) - 0.5011872336272722).abs() < 1e-15);
    }

    #[test]
    fn source_set_validation() {
        assert!(SourceSet::new(vec![], vec![]).is_err());
        assert!(SourceSet::new(
            vec![(0.1, 0.2), (0.1, 0.2)],
            vec![Complex64::new(1.0, 0.0); 2]
        )
        .is_err());
        assert!(SourceSet::new(vec![(0.1, 0.2)], vec![Complex64::new(0.0, 0.0)]).is_err());
        // azimuth wraps on construction
        let s = SourceSet::new(vec![(PI, 0.2)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!((s.angles()[0].0 + PI).abs() < 1e-15);
    }

    #[test]
    fn snapshot_json_round_trip() {
        let g = geom(16, 1.0);
        let s = SourceSet::new(
            vec![(0.3, 0.6), (-1.2, 1.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
        )
        .unwrap();
        let snap = synthesize_snapshot(&g, &s, 0.25, 77).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.json");
        write_snapshot_json(&path, &g, &snap).unwrap();
        let (g2, snap2) = read_snapshot_json(&path).unwrap();
        assert_eq!(g, g2);
        assert_eq!(snap.y, snap2.y);
        assert_eq!(snap.noise_var, snap2.noise_var);
        assert_eq!(snap.seed, snap2.seed);
        assert_eq!(snap.truth, snap2.truth);
    }
}
