use std::io::Write;
use std::path::{Path, PathBuf};

use flood_exposure::ingest::{
    read_facilities, read_flood_scenario, read_tracts, scan_facilities, scan_flood_points,
    scan_tracts,
};
use flood_exposure::{scenario_delta, FloodScenario, IngestError, ScenarioResult, Study, Tract};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::outputs;

/// How many row errors `validate` prints.
pub const MAX_REPORTED_ERRORS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Current,
    Future,
}

impl RunConfig {
    fn scenario(&self, which: Scenario) -> Result<(&Path, &str), CliError> {
        let (path, label, key) = match which {
            Scenario::Current => (&self.flood_current, &self.current_label, "flood_current"),
            Scenario::Future => (&self.flood_future, &self.future_label, "flood_future"),
        };
        let path = path.as_deref().ok_or_else(|| {
            CliError::Config(format!(
                "no {key} path: set `{key}` in the config or pass --{key}"
            ))
        })?;
        Ok((path, label))
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::io("<stdout>", e))
}

/// Reads every configured input, reporting row counts and the first few
/// errors. Returns the process exit code.
pub fn validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut errors: Vec<IngestError> = Vec::new();
    let mut io_failed = false;
    let mut record = |out: &mut dyn Write,
                      name: &str,
                      path: &Path,
                      scan: Result<(usize, Vec<IngestError>), IngestError>| {
        match scan {
            Ok((rows, errs)) => {
                say(
                    out,
                    format_args!(
                        "{name}: {} ({rows} rows, {} errors)",
                        path.display(),
                        errs.len()
                    ),
                )?;
                errors.extend(errs);
            }
            Err(e) => {
                io_failed |= !e.is_validation();
                say(out, format_args!("{name}: {} (unreadable)", path.display()))?;
                errors.push(e);
            }
        }
        Ok::<_, CliError>(())
    };
    let tally = |rows: usize, errs: Vec<IngestError>| (rows, errs);
    record(
        out,
        "facilities",
        &cfg.facilities,
        scan_facilities(&cfg.facilities).map(|s| tally(s.rows(), s.errors)),
    )?;
    record(
        out,
        "tracts",
        &cfg.tracts,
        scan_tracts(&cfg.tracts).map(|s| tally(s.rows(), s.errors)),
    )?;
    for which in [Scenario::Current, Scenario::Future] {
        if let Ok((path, label)) = cfg.scenario(which) {
            let name = if which == Scenario::Current {
                "flood_current"
            } else {
                "flood_future"
            };
            record(
                out,
                name,
                path,
                scan_flood_points(path, label).map(|s| tally(s.rows(), s.errors)),
            )?;
        }
    }
    if errors.is_empty() {
        say(out, format_args!("ok"))?;
        return Ok(0);
    }
    let shown = errors.len().min(MAX_REPORTED_ERRORS);
    say(
        out,
        format_args!("{} errors, showing {shown}:", errors.len()),
    )?;
    for e in &errors[..shown] {
        say(out, format_args!("  {e}"))?;
    }
    Ok(if io_failed { 1 } else { 2 })
}

struct Inputs {
    tracts: Vec<Tract>,
    study: Study,
    facilities: Vec<flood_exposure::Facility>,
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs, CliError> {
    let facilities = read_facilities(&cfg.facilities)?;
    let tracts = read_tracts(&cfg.tracts)?;
    let study = Study::new(&tracts, &cfg.exposure)?;
    Ok(Inputs {
        tracts,
        study,
        facilities,
    })
}

fn run_one(cfg: &RunConfig, inputs: &Inputs, which: Scenario) -> Result<ScenarioResult, CliError> {
    let (path, label) = cfg.scenario(which)?;
    let flood: FloodScenario = read_flood_scenario(path, label)?;
    Ok(inputs
        .study
        .run(&inputs.facilities, &flood, &cfg.exposure)?)
}

struct OutputDir<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> OutputDir<'a> {
    fn create(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutputDir {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

/// Runs one scenario and writes its exposure tables. Returns the files
/// written, in order.
pub fn run(cfg: &RunConfig, which: Scenario) -> Result<Vec<PathBuf>, CliError> {
    let inputs = load_inputs(cfg)?;
    let result = run_one(cfg, &inputs, which)?;
    let label = &result.label;
    let mut out = OutputDir::create(&cfg.output_dir)?;
    if cfg.emit.csv {
        out.write(
            &format!("exposure_{label}.csv"),
            &outputs::exposure_csv(&result),
        )?;
        out.write(
            &format!("flooded_{label}.csv"),
            &outputs::flooded_csv(&result),
        )?;
    }
    if cfg.emit.geojson {
        out.write(
            &format!("exposure_{label}.geojson"),
            &outputs::exposure_geojson(&result, &inputs.tracts),
        )?;
    }
    if cfg.emit.summary_json {
        let summary = outputs::run_summary(
            &result,
            &inputs.tracts,
            cfg.exposure.inclusion_threshold,
            cfg.weighting,
            cfg.emit.chart_json,
        )?;
        out.write(&format!("summary_{label}.json"), &summary)?;
    }
    Ok(out.written)
}

/// Runs both scenarios against the same tracts and writes the change
/// between them.
pub fn compare(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.scenario(Scenario::Current)?;
    cfg.scenario(Scenario::Future)?;
    let inputs = load_inputs(cfg)?;
    let current = run_one(cfg, &inputs, Scenario::Current)?;
    let future = run_one(cfg, &inputs, Scenario::Future)?;
    let delta = scenario_delta(&current, &future)?;
    let mut out = OutputDir::create(&cfg.output_dir)?;
    if cfg.emit.csv {
        out.write("delta.csv", &outputs::delta_csv(&delta))?;
    }
    if cfg.emit.geojson {
        out.write(
            "delta.geojson",
            &outputs::delta_geojson(&delta, &inputs.tracts),
        )?;
    }
    if cfg.emit.summary_json {
        let summary = outputs::compare_summary(
            &inputs.tracts,
            &current,
            &future,
            &delta,
            cfg.exposure.inclusion_threshold,
            cfg.weighting,
            cfg.emit.chart_json,
        )?;
        out.write("compare_summary.json", &summary)?;
    }
    Ok(out.written)
}
