//! Binned measurement containers: TCSPC decay histograms, HBT coincidence
//! histograms, and wavelength-sampled spectra.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

fn check_uniform_edges(edges: &[f64]) -> Result<f64, CoreError> {
    if edges.len() < 2 {
        return Err(CoreError::InvalidHistogram { msg: "need at least one bin".into() });
    }
    let width = edges[1] - edges[0];
    if !(width.is_finite() && width > 0.0) {
        return Err(CoreError::InvalidHistogram {
            msg: format!("bin width must be positive, got {width}"),
        });
    }
    for w in edges.windows(2) {
        let d = w[1] - w[0];
        if (d - width).abs() > 1e-9 * width.max(1.0) {
            return Err(CoreError::InvalidHistogram {
                msg: format!("bins are not uniform: {d} vs {width}"),
            });
        }
    }
    Ok(width)
}

/// Photon arrival times binned relative to the excitation pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayHistogram {
    /// Uniform bin edges in ns; `counts.len() + 1` entries.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Laser repetition period in ns.
    pub rep_period_ns: f64,
    pub total_pulses: u64,
}

impl DecayHistogram {
    pub fn new(
        bin_edges: Vec<f64>,
        counts: Vec<u64>,
        rep_period_ns: f64,
        total_pulses: u64,
    ) -> Result<Self, CoreError> {
        let width = check_uniform_edges(&bin_edges)?;
        if counts.len() + 1 != bin_edges.len() {
            return Err(CoreError::InvalidHistogram {
                msg: format!(
                    "{} counts do not match {} edges",
                    counts.len(),
                    bin_edges.len()
                ),
            });
        }
        let span = width * counts.len() as f64;
        if span > rep_period_ns * (1.0 + 1e-9) {
            return Err(CoreError::InvalidHistogram {
                msg: format!("bin span {span} ns exceeds repetition period {rep_period_ns} ns"),
            });
        }
        Ok(DecayHistogram { bin_edges, counts, rep_period_ns, total_pulses })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Start-stop time differences between two detectors, binned over a symmetric
/// window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    /// Uniform bin edges in ns over `[-window, +window]`.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub rep_period_ns: f64,
}

impl CoincidenceHistogram {
    pub fn new(
        bin_edges: Vec<f64>,
        counts: Vec<u64>,
        rep_period_ns: f64,
    ) -> Result<Self, CoreError> {
        let width = check_uniform_edges(&bin_edges)?;
        if counts.len() + 1 != bin_edges.len() {
            return Err(CoreError::InvalidHistogram {
                msg: format!(
                    "{} counts do not match {} edges",
                    counts.len(),
                    bin_edges.len()
                ),
            });
        }
        let lo = bin_edges[0];
        let hi = *bin_edges.last().unwrap();
        if (lo + hi).abs() > 1e-6 * width {
            return Err(CoreError::InvalidHistogram {
                msg: format!("domain [{lo}, {hi}] is not symmetric around zero"),
            });
        }
        Ok(CoincidenceHistogram { bin_edges, counts, rep_period_ns })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// Half-width of the covered delay window in ns.
    pub fn window_ns(&self) -> f64 {
        *self.bin_edges.last().unwrap()
    }
}

/// Wavelength-sampled intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub wavelength_nm: Vec<f64>,
    pub counts: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavelength_nm: Vec<f64>, counts: Vec<f64>) -> Result<Self, CoreError> {
        if wavelength_nm.len() != counts.len() {
            return Err(CoreError::InvalidHistogram {
                msg: "wavelength and counts lengths differ".into(),
            });
        }
        if wavelength_nm.len() < 2 {
            return Err(CoreError::InvalidHistogram {
                msg: "spectrum needs at least two samples".into(),
            });
        }
        for w in wavelength_nm.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CoreError::InvalidHistogram {
                    msg: format!("wavelengths must be strictly increasing, got {} then {}", w[0], w[1]),
                });
            }
        }
        for &c in &counts {
            if !c.is_finite() || c < 0.0 {
                return Err(CoreError::InvalidHistogram {
                    msg: format!("counts must be finite and non-negative, got {c}"),
                });
            }
        }
        Ok(Spectrum { wavelength_nm, counts })
    }

    pub fn len(&self) -> usize {
        self.wavelength_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelength_nm.is_empty()
    }
}
