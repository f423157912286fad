//! Synthetic Fabry-Perot spectra from sectioned waveguide dispersions.
//!
//! The cavity is formed by the sections from the excited one to the output
//! mirror; the band edge of the section behind the excitation spot acts as
//! the second mirror. Resonances sit at integer crossings of the phase
//! function `Phi(lambda) = integral of 2 L_g(u) / u^2 du` with the
//! group-optical path `L_g(lambda) = sum_i n_g,i(lambda) l_i`, which makes
//! the local fringe spacing obey `delta_lambda = lambda^2 / (2 L_g)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use qd_core::Spectrum;

use crate::error::SimError;

/// One sample of a section's group-index dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub lambda_nm: f64,
    pub n_g: f64,
}

/// A waveguide section with its length and sampled dispersion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSection {
    pub length_um: f64,
    pub dispersion: Vec<DispersionPoint>,
}

impl WaveguideSection {
    /// Linear interpolation of the group index; `None` outside the table.
    pub fn group_index(&self, lambda_nm: f64) -> Option<f64> {
        let table = &self.dispersion;
        if table.is_empty()
            || lambda_nm < table[0].lambda_nm
            || lambda_nm > table[table.len() - 1].lambda_nm
        {
            return None;
        }
        let idx = table.partition_point(|p| p.lambda_nm <= lambda_nm);
        if idx == 0 {
            return Some(table[0].n_g);
        }
        if idx >= table.len() {
            return Some(table[table.len() - 1].n_g);
        }
        let (a, b) = (&table[idx - 1], &table[idx]);
        let f = (lambda_nm - a.lambda_nm) / (b.lambda_nm - a.lambda_nm);
        Some(a.n_g + f * (b.n_g - a.n_g))
    }
}

/// Scene description for the spectrum synthesizer. Sections are ordered from
/// the inner terminator toward the output mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FabryPerotSceneConfig {
    pub sections: Vec<WaveguideSection>,
    /// Reflectivities of the two cavity mirrors.
    pub mirror_reflectivities: (f64, f64),
    pub wavelength_grid_nm: Vec<f64>,
    /// Minimum resolvable linewidth (instrument floor), nm.
    pub linewidth_floor_nm: f64,
    /// Peak height above baseline, counts.
    pub peak_amplitude: f64,
    /// Baseline level, counts.
    pub baseline: f64,
    pub noise_seed: u64,
}

impl FabryPerotSceneConfig {
    fn validate(&self, excite_section: usize) -> Result<(), SimError> {
        if self.sections.is_empty() {
            return Err(SimError::InvalidScene("section list is empty".into()));
        }
        if excite_section >= self.sections.len() {
            return Err(SimError::InvalidScene(format!(
                "excited section {excite_section} out of range (have {})",
                self.sections.len()
            )));
        }
        for (i, s) in self.sections.iter().enumerate() {
            if !(s.length_um > 0.0 && s.length_um.is_finite()) {
                return Err(SimError::InvalidScene(format!(
                    "section {i} length must be positive, got {} um",
                    s.length_um
                )));
            }
            if s.dispersion.len() < 2 {
                return Err(SimError::InvalidScene(format!(
                    "section {i} needs at least two dispersion samples"
                )));
            }
            for w in s.dispersion.windows(2) {
                if !(w[1].lambda_nm > w[0].lambda_nm) {
                    return Err(SimError::InvalidScene(format!(
                        "section {i} dispersion wavelengths must increase"
                    )));
                }
            }
            if s.dispersion.iter().any(|p| !(p.n_g >= 1.0) || !p.n_g.is_finite()) {
                return Err(SimError::InvalidScene(format!(
                    "section {i} group index must be >= 1"
                )));
            }
        }
        let (r1, r2) = self.mirror_reflectivities;
        for r in [r1, r2] {
            if !(r > 0.0 && r <= 1.0) {
                return Err(SimError::InvalidScene(format!(
                    "mirror reflectivities must be in (0, 1], got {r}"
                )));
            }
        }
        if self.wavelength_grid_nm.len() < 8 {
            return Err(SimError::InvalidScene("wavelength grid too short".into()));
        }
        for w in self.wavelength_grid_nm.windows(2) {
            if !(w[1] > w[0]) {
                return Err(SimError::InvalidScene(
                    "wavelength grid must be strictly increasing".into(),
                ));
            }
        }
        if self.linewidth_floor_nm < 0.0 || self.peak_amplitude <= 0.0 || self.baseline < 0.0 {
            return Err(SimError::InvalidScene(
                "linewidth floor, amplitude, and baseline must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Group-optical path of the cavity in nm at `lambda`.
fn optical_path_nm(
    cavity: &[WaveguideSection],
    lambda_nm: f64,
) -> Result<f64, SimError> {
    let mut total = 0.0;
    for (i, section) in cavity.iter().enumerate() {
        let n_g = section.group_index(lambda_nm).ok_or_else(|| {
            SimError::InvalidScene(format!(
                "section {i} dispersion does not cover {lambda_nm} nm"
            ))
        })?;
        total += n_g * section.length_um * 1000.0;
    }
    Ok(total)
}

/// Peak centers as integer crossings of the cumulative-trapezoid phase
/// function, located by linear inverse interpolation within grid cells.
fn crossing_centers(cavity: &[WaveguideSection], grid: &[f64]) -> Result<Vec<f64>, SimError> {
    let mut phase = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &lambda in grid {
        let f = 2.0 * optical_path_nm(cavity, lambda)? / (lambda * lambda);
        if let Some((l0, f0)) = prev {
            acc += 0.5 * (f + f0) * (lambda - l0);
        }
        phase.push(acc);
        prev = Some((lambda, f));
    }

    let mut centers = Vec::new();
    for i in 1..grid.len() {
        let (p0, p1) = (phase[i - 1], phase[i]);
        let mut m = p0.floor() + 1.0;
        while m <= p1 {
            let f = (m - p0) / (p1 - p0);
            centers.push(grid[i - 1] + f * (grid[i] - grid[i - 1]));
            m += 1.0;
        }
    }
    Ok(centers)
}

/// Synthesizes the spectrum seen when exciting `excite_section`.
///
/// The cavity consists of the sections from `excite_section` onward; light
/// above the band edge of the section behind the excitation spot cannot
/// propagate backward, so that interface is the inner mirror.
pub fn synthesize_fp_spectrum(
    scene: &FabryPerotSceneConfig,
    excite_section: usize,
) -> Result<Spectrum, SimError> {
    scene.validate(excite_section)?;
    let cavity = &scene.sections[excite_section..];
    let grid = &scene.wavelength_grid_nm;

    let finesse = {
        let (r1, r2) = scene.mirror_reflectivities;
        let root = (r1 * r2).sqrt();
        if root >= 1.0 {
            f64::INFINITY
        } else {
            std::f64::consts::PI * root.sqrt() / (1.0 - root)
        }
    };

    let mut peaks: Vec<(f64, f64)> = Vec::new(); // (center, fwhm)
    for center in crossing_centers(cavity, grid)? {
        let path = optical_path_nm(cavity, center)?;
        let fsr = center * center / (2.0 * path);
        let fwhm = (fsr / finesse).max(scene.linewidth_floor_nm).max(1e-9);
        peaks.push((center, fwhm));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scene.noise_seed);
    let counts: Vec<f64> = grid
        .iter()
        .map(|&lambda| {
            let mut intensity = scene.baseline;
            for &(center, fwhm) in &peaks {
                let h = 0.5 * fwhm;
                let dx = lambda - center;
                intensity += scene.peak_amplitude * h * h / (dx * dx + h * h);
            }
            if intensity > 0.0 {
                Poisson::new(intensity)
                    .map(|p| p.sample(&mut rng))
                    .unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();

    Ok(Spectrum::new(grid.clone(), counts)?)
}

/// Noise-free resonance centers, exposed for tests and scene design.
pub fn resonance_centers(
    scene: &FabryPerotSceneConfig,
    excite_section: usize,
) -> Result<Vec<f64>, SimError> {
    scene.validate(excite_section)?;
    crossing_centers(&scene.sections[excite_section..], &scene.wavelength_grid_nm)
}
