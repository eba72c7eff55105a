//! Run configuration: one TOML document with a section per concern.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DriveProfile, ProjectionLabel, ProtocolParams, StepSizes};
use crate::lattice_green::ChainGeometry;
use crate::radiation::AngularGrid;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub n_atoms: usize,
    /// Lattice constant in units of `λ`.
    pub spacing: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            n_atoms: 20,
            spacing: 0.35,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    pub n_max: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { n_max: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub rabi: f64,
    pub omega_t1: f64,
    pub profile: DriveProfile,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection {
            rabi: 100.0,
            omega_t1: 0.6,
            profile: DriveProfile::SuperradiantShaped,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PvdSection {
    pub delta: f64,
    /// Target of the emission cycles; defaults to `round(3N/4)`, a
    /// superradiant mode inside the light cone for `a = 0.35`.
    pub xi_aim: Option<usize>,
    pub cycle_transfer: Option<f64>,
    pub cycle_free: Option<f64>,
}

impl Default for PvdSection {
    fn default() -> Self {
        PvdSection {
            delta: 100.0,
            xi_aim: None,
            cycle_transfer: None,
            cycle_free: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub storage_time: f64,
    pub n_cycles: usize,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            storage_time: 300.0,
            n_cycles: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Time between samples during storage and free flight.
    pub sample_interval: f64,
    pub projections: Vec<ProjectionLabel>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("out"),
            sample_interval: 0.5,
            projections: vec![ProjectionLabel::Single(1)],
        }
    }
}

/// Parameter lists of the sweep commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub n_atoms: Vec<usize>,
    pub omega_t1: Vec<f64>,
    pub spacings: Vec<f64>,
    /// Chain sizes of the `Γ₁ = α₁ N⁻³` fit.
    pub alpha1_sizes: Vec<usize>,
    /// Storage runs stop once `γ` has stayed within 10% of `Γ₁` for this
    /// fraction of the elapsed storage time (and at least 20 `Γ₀⁻¹`).
    pub settle_fraction: f64,
    /// Hard cap on storage, in units of the rate-model estimate of `t_tr`.
    pub max_storage_factor: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            n_atoms: (4..=20).collect(),
            omega_t1: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            spacings: vec![0.35],
            alpha1_sizes: (10..=40).collect(),
            settle_fraction: 0.2,
            max_storage_factor: 4.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiationSection {
    pub grid: AngularGrid,
    /// Time of the snapshot; defaults to the end of the first emission
    /// transfer.
    pub snapshot_time: Option<f64>,
}

/// Everything a command needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub truncation: TruncationConfig,
    pub drive: DriveSection,
    pub pvd: PvdSection,
    pub schedule: ScheduleSection,
    pub integrator: StepSizes,
    pub output: OutputSection,
    pub sweep: SweepSection,
    pub radiation: RadiationSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Loads `path` (or the defaults) and applies `key.path=value`
    /// overrides; values are parsed as TOML, falling back to strings.
    pub fn resolve(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        let cfg: RunConfig = doc.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("geometry.spacing", self.geometry.spacing),
            ("drive.rabi", self.drive.rabi),
            ("pvd.delta", self.pvd.delta),
            ("output.sample_interval", self.output.sample_interval),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("drive.omega_t1", self.drive.omega_t1),
            ("schedule.storage_time", self.schedule.storage_time),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        if self.geometry.n_atoms == 0 {
            return Err(Error::Config("geometry.n_atoms must be ≥ 1".into()));
        }
        if !(1..=3).contains(&self.truncation.n_max) {
            return Err(Error::Config(format!(
                "truncation.n_max must be 1, 2 or 3, got {}",
                self.truncation.n_max
            )));
        }
        if let Some(xi) = self.pvd.xi_aim {
            if xi == 0 || xi > self.geometry.n_atoms {
                return Err(Error::Config(format!(
                    "pvd.xi_aim = {xi} is not a mode of a {}-atom chain",
                    self.geometry.n_atoms
                )));
            }
        }
        if !(self.sweep.settle_fraction > 0.0) || !(self.sweep.max_storage_factor > 0.0) {
            return Err(Error::Config("sweep settle/storage factors must be positive".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ChainGeometry> {
        ChainGeometry::new(self.geometry.n_atoms, self.geometry.spacing)
    }

    pub fn xi_aim(&self) -> usize {
        self.pvd
            .xi_aim
            .unwrap_or(((3 * self.geometry.n_atoms + 2) / 4).max(1))
    }

    pub fn protocol_params(&self) -> ProtocolParams {
        ProtocolParams {
            rabi: self.drive.rabi,
            omega_t1: self.drive.omega_t1,
            profile: self.drive.profile.clone(),
            delta: self.pvd.delta,
            storage_time: self.schedule.storage_time,
            n_cycles: self.schedule.n_cycles,
            xi_aim: Some(self.xi_aim()),
            cycle_transfer: self.pvd.cycle_transfer,
            cycle_free: self.pvd.cycle_free,
            steps: self.integrator.clone(),
            sample_interval: self.output.sample_interval,
        }
    }
}

fn apply_override(doc: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key `{key}`")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = path.split_last().expect("key has at least one part");
    let mut table = doc;
    for p in parents {
        table = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` in `{key}` is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_fail() {
        assert!(RunConfig::from_toml_str("[geometry]\nn_atom = 3\n").is_err());
        assert!(RunConfig::from_toml_str("[bogus]\n").is_err());
    }

    #[test]
    fn partial_documents_take_defaults() {
        let cfg = RunConfig::from_toml_str("[geometry]\nn_atoms = 7\n").unwrap();
        assert_eq!(cfg.geometry.n_atoms, 7);
        assert_eq!(cfg.geometry.spacing, 0.35);
        assert_eq!(cfg.drive.rabi, 100.0);
    }

    #[test]
    fn overrides() {
        let cfg = RunConfig::resolve(
            None,
            &[
                "geometry.n_atoms=10".into(),
                "drive.profile=uniform".into(),
                "output.directory=/tmp/x".into(),
                "output.projections=[{single = 2}, {pair = [1, 2]}]".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.geometry.n_atoms, 10);
        assert_eq!(cfg.drive.profile, DriveProfile::Uniform);
        assert_eq!(cfg.output.directory, PathBuf::from("/tmp/x"));
        assert_eq!(cfg.output.projections[1], ProjectionLabel::Pair(1, 2));
        assert!(RunConfig::resolve(None, &["truncation.n_max=4".into()]).is_err());
        assert!(RunConfig::resolve(None, &["geometry".into()]).is_err());
        assert!(RunConfig::resolve(None, &["geometry.n_atoms.x=1".into()]).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.geometry.spacing = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.xi_aim(), 15);
        cfg.geometry.n_atoms = 10;
        assert_eq!(cfg.xi_aim(), 8);
        cfg.pvd.xi_aim = Some(11);
        assert!(cfg.validate().is_err());
    }
}
