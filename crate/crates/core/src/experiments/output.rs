use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{FidelityRecord, TrajectoryRecord};
use crate::error::{CtnError, Result};

/// Column order of trajectory CSV files.
pub const CSV_HEADER: [&str; 14] = [
    "seed",
    "step",
    "t_count",
    "theta",
    "max_entropy",
    "mean_entropy",
    "max_chi",
    "method",
    "exact_ok",
    "wall_ms",
    "realization",
    "n",
    "t_over_n",
    "s_norm",
];

/// Header plus one row per record (header only for an empty list).
pub fn write_csv(records: &[TrajectoryRecord], w: impl Write) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| CtnError::io("flushing csv", e))?;
    Ok(())
}

pub fn emit_csv(records: &[TrajectoryRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CtnError::io(format!("creating {}", path.display()), e))?;
    write_csv(records, file).map_err(|e| match e {
        CtnError::Io { source, .. } => CtnError::io(format!("writing {}", path.display()), source),
        other => other,
    })
}

pub fn read_csv(r: impl Read) -> Result<Vec<TrajectoryRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CtnError::Parse { pos: 0, msg: format!("unexpected csv header {header:?}") });
    }
    reader.deserialize().map(|row| row.map_err(CtnError::from)).collect()
}

pub fn emit_fidelity_csv(records: &[FidelityRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CtnError::io(format!("creating {}", path.display()), e))?;
    let mut writer = csv::Writer::from_writer(file);
    if records.is_empty() {
        writer.write_record(["seed", "realization", "n", "t_count", "chi", "inv_chi", "fidelity", "discarded_weight"])?;
    }
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| CtnError::io(format!("writing {}", path.display()), e))?;
    Ok(())
}
