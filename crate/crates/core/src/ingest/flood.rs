use std::io::{Read, Write};
use std::path::Path;

use super::{
    column_indices, csv_error, csv_reader, open, parse_f64, parse_location, FloodPoint,
    FloodScenario, IngestError, Scan,
};

const COLUMNS: [&str; 3] = ["lon", "lat", "depth_m"];

/// Reads a flood-map CSV with header `lon,lat,depth_m`. Zero depths are
/// kept; negative depths are rejected.
pub fn read_flood_scenario(path: &Path, label: &str) -> Result<FloodScenario, IngestError> {
    read_flood_scenario_from(open(path)?, path, label)
}

pub fn read_flood_scenario_from<R: Read>(
    reader: R,
    path: &Path,
    label: &str,
) -> Result<FloodScenario, IngestError> {
    let points = scan(reader, path, label, true)?.items;
    Ok(FloodScenario {
        label: label.to_string(),
        points,
    })
}

/// Reads every row, collecting row-level errors instead of stopping at the
/// first. I/O and header problems are still returned as `Err`.
pub fn scan_flood_points(path: &Path, label: &str) -> Result<Scan<FloodPoint>, IngestError> {
    scan(open(path)?, path, label, false)
}

fn scan<R: Read>(
    reader: R,
    path: &Path,
    label: &str,
    strict: bool,
) -> Result<Scan<FloodPoint>, IngestError> {
    if label.trim().is_empty() {
        return Err(IngestError::Schema {
            path: path.to_path_buf(),
            row: 0,
            column: "label".into(),
            reason: "scenario label is empty".into(),
        });
    }
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, 0, e))?.clone();
    let idx = column_indices(path, &headers, &COLUMNS)?;
    let mut out = Scan::default();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let parsed = (|| {
            let record = record.map_err(|e| csv_error(path, row, e))?;
            let cell = |k: usize| record.get(idx[k]).unwrap_or("");
            let location = parse_location(path, row, cell(0), cell(1))?;
            let depth_m = parse_f64(path, row, "depth_m", cell(2))?;
            if depth_m < 0.0 {
                return Err(IngestError::NegativeDepth {
                    path: path.to_path_buf(),
                    row,
                    depth: depth_m,
                });
            }
            Ok(FloodPoint { location, depth_m })
        })();
        out.push(parsed, strict)?;
    }
    Ok(out)
}

pub fn write_flood_scenario<W: Write>(writer: W, scenario: &FloodScenario) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(COLUMNS)?;
    for p in &scenario.points {
        w.write_record([
            p.location.lon.to_string(),
            p.location.lat.to_string(),
            p.depth_m.to_string(),
        ])?;
    }
    w.flush()
}
