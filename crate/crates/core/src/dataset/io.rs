//! JSONL dataset files: one [`PromptRecord`] per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DatasetError, PromptRecord};

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<PromptRecord>, DatasetError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DatasetError::Io { path: "<input>".into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| DatasetError::MalformedRecord { line: n + 1, reason };
        let rec: PromptRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        rec.check().map_err(malformed)?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_dataset<W: Write>(records: &[PromptRecord], mut writer: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn load_dataset(path: &Path) -> Result<Vec<PromptRecord>, DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_dataset(BufReader::new(file)).map_err(|e| match e {
        DatasetError::Io { source, .. } => DatasetError::Io { path: path.display().to_string(), source },
        other => other,
    })
}

pub fn save_dataset(records: &[PromptRecord], path: &Path) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_dataset(records, BufWriter::new(file)).map_err(io_err(path))
}
