//! CSV and binary (`EMB1`) readers and writers for embedding sets.
//!
//! CSV: header `id,label,e0,...,e{D-1}`, one record per line. Floats are
//! written with the shortest representation that parses back to the same
//! `f64`, so CSV round trips are exact in practice.
//!
//! Binary: magic `EMB1`, `u32` D, `u64` record count, then per record a
//! `u32`-length-prefixed UTF-8 id, a `u32`-length-prefixed UTF-8 label and D
//! `f64` values. All integers and floats are little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{EmbeddingRecord, EmbeddingSet, SplitTag};
use crate::error::{Error, Result};
use crate::wire::{read_exact_or, read_string, read_u32, read_u64, write_str};

pub const EMBEDDING_MAGIC: [u8; 4] = *b"EMB1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Csv,
    Binary,
}

impl EmbeddingFormat {
    /// Sniffs the format from the file's first bytes.
    pub fn detect(path: impl AsRef<Path>) -> Result<Self> {
        let mut head = [0u8; 4];
        let mut file = File::open(path)?;
        let mut filled = 0;
        while filled < head.len() {
            match file.read(&mut head[filled..])? {
                0 => break,
                n => filled += n,
            }
        }
        Ok(if filled == 4 && head == EMBEDDING_MAGIC {
            EmbeddingFormat::Binary
        } else {
            EmbeddingFormat::Csv
        })
    }
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmbeddingFormat::Csv),
            "binary" | "bin" => Ok(EmbeddingFormat::Binary),
            _ => Err(Error::InvalidArgument(format!(
                "unknown embedding format `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub sigmoid_range: bool,
    pub split: SplitTag,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            sigmoid_range: true,
            split: SplitTag::Other,
        }
    }
}

pub fn load_embeddings(path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<EmbeddingSet> {
    load_embeddings_with(path, format, &LoadOptions::default())
}

pub fn load_embeddings_with(
    path: impl AsRef<Path>,
    format: EmbeddingFormat,
    options: &LoadOptions,
) -> Result<EmbeddingSet> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        EmbeddingFormat::Csv => read_csv(reader, options),
        EmbeddingFormat::Binary => read_binary(reader, options),
    }
}

pub fn save_embeddings(
    set: &EmbeddingSet,
    path: impl AsRef<Path>,
    format: EmbeddingFormat,
) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    match format {
        EmbeddingFormat::Csv => write_csv(set, &mut writer)?,
        EmbeddingFormat::Binary => write_binary(set, &mut writer)?,
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<EmbeddingSet> {
    let mut rows = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader)
        .into_records();

    let header = match rows.next() {
        None => return Err(Error::Empty("embedding file has no header")),
        Some(row) => row.map_err(|e| csv_error(e, 1))?,
    };
    let dim = parse_header(&header)?;

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, records.len() + 2))?;
        let line = row
            .position()
            .map_or(records.len() + 2, |p| p.line() as usize);
        if row.len() != dim + 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", dim + 2, row.len()),
            });
        }
        let vector = row
            .iter()
            .skip(2)
            .enumerate()
            .map(|(i, field)| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::MalformedRow {
                        line,
                        reason: format!("component e{i} `{field}` is not a number"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(EmbeddingRecord::new(&row[0], &row[1], vector));
    }

    Ok(EmbeddingSet::new(dim, records, options.sigmoid_range)?.with_split(options.split))
}

fn parse_header(header: &csv::StringRecord) -> Result<usize> {
    let malformed = |reason: String| Error::MalformedRow { line: 1, reason };
    if header.get(0) != Some("id") || header.get(1) != Some("label") {
        return Err(malformed("header must start with `id,label`".into()));
    }
    let dim = header.len().saturating_sub(2);
    if dim == 0 {
        return Err(malformed("header declares no embedding columns".into()));
    }
    for (i, name) in header.iter().skip(2).enumerate() {
        if name != format!("e{i}") {
            return Err(malformed(format!("expected column `e{i}`, found `{name}`")));
        }
    }
    Ok(dim)
}

fn csv_error(err: csv::Error, line: usize) -> Error {
    let line = err.position().map_or(line, |p| p.line() as usize);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        kind => Error::MalformedRow {
            line,
            reason: format!("{kind:?}"),
        },
    }
}

pub fn write_csv<W: Write>(set: &EmbeddingSet, writer: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((0..set.dim()).map(|i| format!("e{i}")));
    out.write_record(&header).map_err(csv_write_error)?;

    let mut row: Vec<String> = Vec::with_capacity(set.dim() + 2);
    for record in set {
        row.clear();
        row.push(record.id.clone());
        row.push(record.label.clone());
        row.extend(record.vector.iter().map(|v| v.to_string()));
        out.write_record(&row).map_err(csv_write_error)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_write_error(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        kind => Error::Corrupt(format!("{kind:?}")),
    }
}

pub fn write_binary<W: Write>(set: &EmbeddingSet, mut writer: W) -> Result<()> {
    writer.write_all(&EMBEDDING_MAGIC)?;
    let dim = u32::try_from(set.dim())
        .map_err(|_| Error::InvalidArgument("dimension exceeds u32".into()))?;
    writer.write_all(&dim.to_le_bytes())?;
    writer.write_all(&(set.len() as u64).to_le_bytes())?;
    for record in set {
        write_str(&mut writer, &record.id)?;
        write_str(&mut writer, &record.label)?;
        for v in &record.vector {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut reader: R, options: &LoadOptions) -> Result<EmbeddingSet> {
    let mut magic = [0u8; 4];
    match read_exact_or(&mut reader, &mut magic, "magic") {
        Err(Error::Truncated(_)) => return Err(Error::Empty("embedding file is empty")),
        other => other?,
    }
    if magic != EMBEDDING_MAGIC {
        return Err(Error::BadMagic {
            expected: EMBEDDING_MAGIC,
            found: magic,
        });
    }
    let dim = read_u32(&mut reader, "dimension")? as usize;
    let count = read_u64(&mut reader, "record count")?;
    if dim == 0 {
        return Err(Error::Corrupt("dimension is zero".into()));
    }

    let mut records = Vec::new();
    for _ in 0..count {
        let id = read_string(&mut reader, "record id")?;
        let label = read_string(&mut reader, "record label")?;
        let mut vector = Vec::with_capacity(dim);
        let mut buf = [0u8; 8];
        for _ in 0..dim {
            read_exact_or(&mut reader, &mut buf, "vector component")?;
            vector.push(f64::from_le_bytes(buf));
        }
        records.push(EmbeddingRecord { id, label, vector });
    }
    let mut probe = [0u8; 1];
    if reader.read(&mut probe)? != 0 {
        return Err(Error::Corrupt("trailing bytes after last record".into()));
    }

    Ok(EmbeddingSet::new(dim, records, options.sigmoid_range)?.with_split(options.split))
}
