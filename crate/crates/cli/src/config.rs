//! Run configuration: a TOML file whose every key can be overridden by a
//! flag of the same name (`--flood-buffer-m` or `--flood_buffer_m`).
//! Relative paths in the file resolve against the file's directory; paths
//! given as flags resolve against the working directory.

use std::path::{Path, PathBuf};

use clap::Args;
use flood_exposure::{ExposureConfig, Weighting};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Facilities CSV with columns id,name,kind,lon,lat.
    #[arg(long)]
    pub facilities: Option<PathBuf>,
    /// Census tracts GeoJSON FeatureCollection.
    #[arg(long)]
    pub tracts: Option<PathBuf>,
    /// Flood points CSV (lon,lat,depth_m) for the current scenario.
    #[arg(long, alias = "flood_current")]
    pub flood_current: Option<PathBuf>,
    /// Flood points CSV for the future scenario.
    #[arg(long, alias = "flood_future")]
    pub flood_future: Option<PathBuf>,
    #[arg(long, alias = "current_label")]
    pub current_label: Option<String>,
    #[arg(long, alias = "future_label")]
    pub future_label: Option<String>,
    #[arg(long, alias = "output_dir")]
    pub output_dir: Option<PathBuf>,
    /// Facility-to-flood detection distance, meters.
    #[arg(long, alias = "flood_buffer_m")]
    pub flood_buffer_m: Option<f64>,
    /// Comma-separated zone radii, meters, increasing.
    #[arg(long, alias = "radii_m", value_delimiter = ',')]
    pub radii_m: Option<Vec<f64>>,
    #[arg(long, alias = "disc_segments")]
    pub disc_segments: Option<usize>,
    #[arg(long, alias = "area_correction")]
    pub area_correction: Option<bool>,
    #[arg(long, alias = "snap_resolution_m")]
    pub snap_resolution_m: Option<f64>,
    /// Covered area share a tract must exceed to count as within a zone.
    #[arg(long, alias = "inclusion_threshold")]
    pub inclusion_threshold: Option<f64>,
    /// Weight disparity means by tract population.
    #[arg(long, alias = "population_weighted")]
    pub population_weighted: Option<bool>,
    #[arg(long, alias = "emit_csv")]
    pub emit_csv: Option<bool>,
    #[arg(long, alias = "emit_geojson")]
    pub emit_geojson: Option<bool>,
    #[arg(long, alias = "emit_summary_json")]
    pub emit_summary_json: Option<bool>,
    #[arg(long, alias = "emit_chart_json")]
    pub emit_chart_json: Option<bool>,
}

impl Settings {
    /// Parses a TOML config file and anchors its relative paths to the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut s: Settings = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut s.facilities,
            &mut s.tracts,
            &mut s.flood_current,
            &mut s.flood_future,
            &mut s.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(s)
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            facilities: top.facilities.or(self.facilities),
            tracts: top.tracts.or(self.tracts),
            flood_current: top.flood_current.or(self.flood_current),
            flood_future: top.flood_future.or(self.flood_future),
            current_label: top.current_label.or(self.current_label),
            future_label: top.future_label.or(self.future_label),
            output_dir: top.output_dir.or(self.output_dir),
            flood_buffer_m: top.flood_buffer_m.or(self.flood_buffer_m),
            radii_m: top.radii_m.or(self.radii_m),
            disc_segments: top.disc_segments.or(self.disc_segments),
            area_correction: top.area_correction.or(self.area_correction),
            snap_resolution_m: top.snap_resolution_m.or(self.snap_resolution_m),
            inclusion_threshold: top.inclusion_threshold.or(self.inclusion_threshold),
            population_weighted: top.population_weighted.or(self.population_weighted),
            emit_csv: top.emit_csv.or(self.emit_csv),
            emit_geojson: top.emit_geojson.or(self.emit_geojson),
            emit_summary_json: top.emit_summary_json.or(self.emit_summary_json),
            emit_chart_json: top.emit_chart_json.or(self.emit_chart_json),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub csv: bool,
    pub geojson: bool,
    pub summary_json: bool,
    pub chart_json: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub facilities: PathBuf,
    pub tracts: PathBuf,
    pub flood_current: Option<PathBuf>,
    pub flood_future: Option<PathBuf>,
    pub current_label: String,
    pub future_label: String,
    pub output_dir: PathBuf,
    pub exposure: ExposureConfig,
    pub weighting: Weighting,
    pub emit: Emit,
}

impl RunConfig {
    /// Loads `config` (if any), applies `flags` on top and fills defaults.
    pub fn load(config: Option<&Path>, flags: Settings) -> Result<RunConfig, CliError> {
        let base = match config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        RunConfig::resolve(base.overlay(flags))
    }

    pub fn resolve(s: Settings) -> Result<RunConfig, CliError> {
        let required = |p: Option<PathBuf>, name: &str| {
            p.ok_or_else(|| {
                CliError::Config(format!(
                    "no {name} path: set `{name}` in the config or pass --{name}"
                ))
            })
        };
        let defaults = ExposureConfig::default();
        let exposure = ExposureConfig {
            flood_buffer: s.flood_buffer_m.unwrap_or(defaults.flood_buffer),
            radii: s.radii_m.unwrap_or(defaults.radii),
            disc_segments: s.disc_segments.unwrap_or(defaults.disc_segments),
            area_correction: s.area_correction.unwrap_or(defaults.area_correction),
            snap_resolution: s.snap_resolution_m.unwrap_or(defaults.snap_resolution),
            inclusion_threshold: s
                .inclusion_threshold
                .unwrap_or(defaults.inclusion_threshold),
        };
        exposure.validate()?;
        let cfg = RunConfig {
            facilities: required(s.facilities, "facilities")?,
            tracts: required(s.tracts, "tracts")?,
            flood_current: s.flood_current,
            flood_future: s.flood_future,
            current_label: s.current_label.unwrap_or_else(|| "current".into()),
            future_label: s.future_label.unwrap_or_else(|| "future".into()),
            output_dir: s.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            exposure,
            weighting: if s.population_weighted.unwrap_or(false) {
                Weighting::Population
            } else {
                Weighting::Unweighted
            },
            emit: Emit {
                csv: s.emit_csv.unwrap_or(true),
                geojson: s.emit_geojson.unwrap_or(true),
                summary_json: s.emit_summary_json.unwrap_or(true),
                chart_json: s.emit_chart_json.unwrap_or(true),
            },
        };
        for label in [&cfg.current_label, &cfg.future_label] {
            check_label(label)?;
        }
        if cfg.current_label == cfg.future_label {
            return Err(CliError::Config(format!(
                "current and future labels are both {:?}",
                cfg.current_label
            )));
        }
        Ok(cfg)
    }
}

/// Labels become part of output file names.
fn check_label(label: &str) -> Result<(), CliError> {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok && label != "." && label != ".." {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "scenario label {label:?} must use only letters, digits, '-', '_' or '.'"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = Settings {
            radii_m: Some(vec![1.0, 2.0]),
            disc_segments: Some(32),
            ..Default::default()
        };
        let flags = Settings {
            disc_segments: Some(16),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.disc_segments, Some(16));
        assert_eq!(merged.radii_m, Some(vec![1.0, 2.0]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Settings>("radius = 3").is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let s = Settings {
            facilities: Some("f.csv".into()),
            tracts: Some("t.geojson".into()),
            ..Default::default()
        };
        let c = RunConfig::resolve(s).unwrap();
        assert_eq!(c.exposure, ExposureConfig::default());
        assert_eq!(
            (c.current_label.as_str(), c.future_label.as_str()),
            ("current", "future")
        );
        assert_eq!(c.weighting, Weighting::Unweighted);
    }

    #[test]
    fn bad_labels_and_missing_paths() {
        let base = Settings {
            facilities: Some("f.csv".into()),
            tracts: Some("t.geojson".into()),
            ..Default::default()
        };
        let slash = Settings {
            current_label: Some("a/b".into()),
            ..base.clone()
        };
        assert!(matches!(
            RunConfig::resolve(slash),
            Err(CliError::Config(_))
        ));
        let same = Settings {
            current_label: Some("x".into()),
            future_label: Some("x".into()),
            ..base.clone()
        };
        assert!(RunConfig::resolve(same).is_err());
        assert!(RunConfig::resolve(Settings {
            tracts: None,
            ..base
        })
        .is_err());
    }
}
