use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::spectral::io::{load_field, save_field};
use crate::spectral::{ComplexField, Grid2D};
use crate::{Error, Result};

/// How a trajectory was produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub dt: f64,
    pub store_every: usize,
    /// `Some(ḡ)` for runs with a constant coupling.
    pub coupling_constant: Option<f64>,
    #[serde(default)]
    pub dealias: bool,
}

/// Solution samples at uniformly spaced instants `t_m = m·τ`, `m = 0..M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: Grid2D,
    spacing: f64,
    times: Vec<f64>,
    fields: Vec<ComplexField>,
    provenance: Provenance,
}

impl Trajectory {
    pub fn new(fields: Vec<ComplexField>, spacing: f64, provenance: Provenance) -> Result<Self> {
        let first = fields.first().ok_or_else(|| Error::arg("trajectory needs at least one field"))?;
        let grid = *first.grid();
        if fields.iter().any(|f| f.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::arg(format!("sample spacing must be positive, got {spacing}")));
        }
        let times = (0..fields.len()).map(|m| m as f64 * spacing).collect();
        Ok(Self { grid, spacing, times, fields, provenance })
    }

    /// Trajectory of externally produced samples with no coupling provenance.
    pub fn from_samples(fields: Vec<ComplexField>, spacing: f64) -> Result<Self> {
        Self::new(
            fields,
            spacing,
            Provenance { dt: spacing, store_every: 1, coupling_constant: None, dealias: false },
        )
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[ComplexField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn initial(&self) -> &ComplexField {
        &self.fields[0]
    }

    pub fn last(&self) -> &ComplexField {
        self.fields.last().expect("nonempty")
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Every `k`-th instant, keeping both endpoints; needs `k` to divide `len − 1`.
    pub fn subsampled(&self, k: usize) -> Result<Self> {
        if k == 0 || (self.len() - 1) % k != 0 {
            return Err(Error::arg(format!("stride {k} does not divide {} intervals", self.len() - 1)));
        }
        let fields = self.fields.iter().step_by(k).cloned().collect();
        let provenance = Provenance { store_every: self.provenance.store_every * k, ..self.provenance };
        Self::new(fields, self.spacing * k as f64, provenance)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { fields: self.fields.iter().map(|f| f.scale_real(c)).collect(), ..self.clone() }
    }

    /// Checks that `other` shares the grid and the sample instants.
    pub fn same_sampling(&self, other: &Trajectory) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::SamplingMismatch("different grids".into()));
        }
        if self.len() != other.len() {
            return Err(Error::SamplingMismatch(format!("{} vs {} instants", self.len(), other.len())));
        }
        if (self.spacing - other.spacing).abs() > 1e-12 * self.spacing {
            return Err(Error::SamplingMismatch(format!(
                "spacing {} vs {}",
                self.spacing, other.spacing
            )));
        }
        Ok(())
    }

    /// Writes `field_XXXXX.bin` files and `manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = Vec::with_capacity(self.len());
        for (m, (f, &t)) in self.fields.iter().zip(&self.times).enumerate() {
            let name = format!("field_{m:05}.bin");
            save_field(&dir.join(&name), f, "u", t)?;
            files.push(name);
        }
        let manifest = TrajectoryManifest {
            grid: self.grid,
            spacing: self.spacing,
            times: self.times.clone(),
            provenance: self.provenance,
            files,
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// JSON manifest of a persisted trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryManifest {
    pub grid: Grid2D,
    pub spacing: f64,
    pub times: Vec<f64>,
    pub provenance: Provenance,
    pub files: Vec<String>,
}

/// Reads a trajectory written by [`Trajectory::save`].
pub fn load_trajectory(manifest_path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut fields = Vec::with_capacity(manifest.files.len());
    for name in &manifest.files {
        let (_, f) = load_field(&dir.join(name))?;
        if f.grid() != &manifest.grid {
            return Err(Error::GridMismatch);
        }
        fields.push(f);
    }
    Trajectory::new(fields, manifest.spacing, manifest.provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_are_uniform_from_zero() {
        let g = Grid2D::new(8, 1.0).unwrap();
        let t = Trajectory::from_samples(vec![ComplexField::zeros(g); 4], 0.25).unwrap();
        assert_eq!(t.times(), &[0.0, 0.25, 0.5, 0.75]);
        assert!(Trajectory::from_samples(Vec::new(), 0.1).is_err());
        assert_eq!(t.subsampled(3).unwrap().len(), 2);
        assert!(t.subsampled(2).is_err());
    }

    #[test]
    fn save_and_load_round_trip() {
        let g = Grid2D::new(8, 3.0).unwrap();
        let fields = (0..3).map(|m| ComplexField::gaussian(g, m as f64 + 1.0, 0.5)).collect();
        let t = Trajectory::new(
            fields,
            0.5,
            Provenance { dt: 0.1, store_every: 5, coupling_constant: Some(1.0), dealias: false },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = t.save(dir.path()).unwrap();
        assert_eq!(load_trajectory(&path).unwrap(), t);
    }
}
