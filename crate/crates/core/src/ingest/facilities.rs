use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    column_indices, csv_error, csv_reader, open, parse_location, Facility, FacilityKind,
    IngestError, Scan,
};

const COLUMNS: [&str; 5] = ["id", "name", "kind", "lon", "lat"];

/// Reads a facilities CSV with header `id,name,kind,lon,lat`.
pub fn read_facilities(path: &Path) -> Result<Vec<Facility>, IngestError> {
    read_facilities_from(open(path)?, path)
}

/// Same as [`read_facilities`] for any reader; `path` is only used in errors.
pub fn read_facilities_from<R: Read>(reader: R, path: &Path) -> Result<Vec<Facility>, IngestError> {
    scan(reader, path, true).map(|s| s.items)
}

/// Reads every row, collecting row-level errors instead of stopping at the
/// first. I/O and header problems are still returned as `Err`.
pub fn scan_facilities(path: &Path) -> Result<Scan<Facility>, IngestError> {
    scan(open(path)?, path, false)
}

fn scan<R: Read>(reader: R, path: &Path, strict: bool) -> Result<Scan<Facility>, IngestError> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, 0, e))?.clone();
    let idx = column_indices(path, &headers, &COLUMNS)?;
    let mut seen = HashSet::new();
    let mut out = Scan::default();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let parsed = (|| {
            let record = record.map_err(|e| csv_error(path, row, e))?;
            let cell = |k: usize| record.get(idx[k]).unwrap_or("");
            let id = cell(0).to_string();
            if id.is_empty() {
                return Err(IngestError::Schema {
                    path: path.to_path_buf(),
                    row,
                    column: "id".into(),
                    reason: "empty id".into(),
                });
            }
            let kind: FacilityKind = cell(2).parse().map_err(|reason| IngestError::Schema {
                path: path.to_path_buf(),
                row,
                column: "kind".into(),
                reason,
            })?;
            let location = parse_location(path, row, cell(3), cell(4))?;
            if !seen.insert(id.clone()) {
                return Err(IngestError::DuplicateId {
                    path: path.to_path_buf(),
                    row,
                    id,
                });
            }
            Ok(Facility {
                id,
                name: cell(1).to_string(),
                kind,
                location,
            })
        })();
        out.push(parsed, strict)?;
    }
    Ok(out)
}

pub fn write_facilities<W: Write>(writer: W, facilities: &[Facility]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(COLUMNS)?;
    for f in facilities {
        w.write_record([
            f.id.clone(),
            f.name.clone(),
            f.kind.to_string(),
            f.location.lon.to_string(),
            f.location.lat.to_string(),
        ])?;
    }
    w.flush()
}
