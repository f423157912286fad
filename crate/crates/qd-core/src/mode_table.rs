//! Tabulated mode data: relative emitted powers and group index per dipole
//! position, as produced by external electromagnetic simulations.
//!
//! The table loads from CSV with the header
//! `x_nm,y_nm,axis,n_g,p_wg_ratio,p_rad_ratio`. Malformed rows are hard
//! errors carrying the 1-based line number.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::rates::DipoleAxis;

pub const MODE_TABLE_HEADER: &str = "x_nm,y_nm,axis,n_g,p_wg_ratio,p_rad_ratio";

/// One dipole position and orientation with its tabulated mode quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDataEntry {
    pub x_nm: f64,
    pub y_nm: f64,
    pub dipole_axis: DipoleAxis,
    pub n_g: f64,
    /// Power emitted into the guided mode relative to a homogeneous emitter.
    pub p_wg_over_p_hom: f64,
    /// Power emitted into radiation modes relative to a homogeneous emitter.
    pub p_rad_over_p_hom: f64,
}

/// A full position/orientation table for one waveguide structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDataTable {
    pub entries: Vec<ModeDataEntry>,
    pub lattice_constant_nm: f64,
}

impl ModeDataTable {
    /// Parses the CSV text format. `lattice_constant_nm` bounds the x
    /// positions to one unit cell.
    pub fn from_csv_str(text: &str, lattice_constant_nm: f64) -> Result<Self, CoreError> {
        if !(lattice_constant_nm.is_finite() && lattice_constant_nm > 0.0) {
            return Err(CoreError::ModeTable {
                line: 0,
                msg: format!("lattice constant must be positive, got {lattice_constant_nm}"),
            });
        }
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| CoreError::ModeTable {
            line: 1,
            msg: "empty file, expected header".into(),
        })?;
        if header.trim() != MODE_TABLE_HEADER {
            return Err(CoreError::ModeTable {
                line: 1,
                msg: format!("expected header `{MODE_TABLE_HEADER}`, got `{}`", header.trim()),
            });
        }

        let mut entries = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(CoreError::ModeTable {
                    line,
                    msg: format!("expected 6 fields, got {}", fields.len()),
                });
            }
            let num = |i: usize, name: &str| -> Result<f64, CoreError> {
                let v: f64 = fields[i].parse().map_err(|_| CoreError::ModeTable {
                    line,
                    msg: format!("field `{name}` is not a number: `{}`", fields[i]),
                })?;
                if !v.is_finite() {
                    return Err(CoreError::ModeTable {
                        line,
                        msg: format!("field `{name}` must be finite, got `{}`", fields[i]),
                    });
                }
                Ok(v)
            };
            let x_nm = num(0, "x_nm")?;
            let y_nm = num(1, "y_nm")?;
            let dipole_axis: DipoleAxis = fields[2]
                .parse()
                .map_err(|e| CoreError::ModeTable { line, msg: e })?;
            let n_g = num(3, "n_g")?;
            let p_wg = num(4, "p_wg_ratio")?;
            let p_rad = num(5, "p_rad_ratio")?;

            if !(0.0..lattice_constant_nm).contains(&x_nm) {
                return Err(CoreError::ModeTable {
                    line,
                    msg: format!(
                        "x={x_nm} nm outside unit cell [0, {lattice_constant_nm}) nm"
                    ),
                });
            }
            if n_g < 1.0 {
                return Err(CoreError::ModeTable {
                    line,
                    msg: format!("group index must be >= 1, got {n_g}"),
                });
            }
            if p_wg < 0.0 || p_rad < 0.0 {
                return Err(CoreError::ModeTable {
                    line,
                    msg: format!("power ratios must be non-negative, got ({p_wg}, {p_rad})"),
                });
            }

            entries.push(ModeDataEntry {
                x_nm,
                y_nm,
                dipole_axis,
                n_g,
                p_wg_over_p_hom: p_wg,
                p_rad_over_p_hom: p_rad,
            });
        }
        Ok(ModeDataTable { entries, lattice_constant_nm })
    }

    /// Serializes back to the CSV text format.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(MODE_TABLE_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.x_nm, e.y_nm, e.dipole_axis, e.n_g, e.p_wg_over_p_hom, e.p_rad_over_p_hom
            ));
        }
        out
    }
}
