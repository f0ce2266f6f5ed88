//! TOML input files.
//!
//! Chain file:
//!
//! ```toml
//! initial = [0.0, 0.0, 1.0]   # optional Bloch vector, |r| <= 1
//! select = [1, 3]             # optional, 1-based steps; default all
//!
//! [[steps]]
//! setting = [1.0, 0.0, 0.0]
//!
//! [[steps]]
//! setting = [0.0, 0.0, 1.0]
//! unitary = { axis = [0.0, 1.0, 0.0], angle = 0.5 }   # optional, radians
//! ```
//!
//! Quad file: `a1`, `a2`, `b1`, `b2`, each a 3-component array.

use std::path::Path;

use serde::Deserialize;
use tbell::bell::SettingsQuad;
use tbell::qcore::axis_angle_unitary;
use tbell::temporal::Step;
use tbell::BlochVector;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub setting: [f64; 3],
    #[serde(default)]
    pub unitary: Option<AxisAngle>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    #[serde(default)]
    pub initial: Option<[f64; 3]>,
    #[serde(default)]
    pub select: Option<Vec<usize>>,
    pub steps: Vec<StepSpec>,
}

impl ChainFile {
    pub fn build_steps(&self) -> Result<Vec<Step>, CliError> {
        self.steps
            .iter()
            .map(|s| {
                let n = BlochVector::from_array(s.setting)?;
                Ok(match &s.unitary {
                    None => Step::new(n),
                    Some(aa) => {
                        let axis = BlochVector::normalized(aa.axis)?;
                        Step::with_unitary(n, axis_angle_unitary(&axis, aa.angle))?
                    }
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadFile {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

impl QuadFile {
    pub fn to_quad(&self) -> Result<SettingsQuad, CliError> {
        Ok(SettingsQuad::new(
            BlochVector::from_array(self.a1)?,
            BlochVector::from_array(self.a2)?,
            BlochVector::from_array(self.b1)?,
            BlochVector::from_array(self.b2)?,
        ))
    }
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e.message())))
}

/// "x,y,z" → [x, y, z].
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0f64; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("not a number: {p:?}"))?;
        if !o.is_finite() {
            return Err(format!("not finite: {p:?}"));
        }
    }
    Ok(out)
}
