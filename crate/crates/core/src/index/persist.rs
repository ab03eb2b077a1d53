//! `HIDX` index files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    "HIDX"                         4 bytes
//! version  u32 = 1
//! L        u32 code length in bits
//! q        u64 IEEE-754 bits of the percentile
//! count    u64 number of entries
//! digest   32 bytes, SHA-256 over (L, q, count, payload)
//! payload  count x { u32 len, id bytes, u32 len, label bytes, ceil(L/64) x u64 }
//! ```
//!
//! The digest is verified over the raw bytes before the payload is parsed,
//! so any single-byte change after the version field is reported as a
//! fingerprint mismatch.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{CodeSet, Fingerprint, HashIndex};
use crate::encoder::{words_for, BinaryCode, ThresholdPercentile};
use crate::error::{Error, Result};
use crate::wire::{read_string, read_u32, read_u64, write_str};

pub const INDEX_MAGIC: [u8; 4] = *b"HIDX";
pub const INDEX_VERSION: u32 = 1;

const HEADER_LEN: usize = 4 + 8 + 8;

pub(super) fn encode_body(codeset: &CodeSet) -> Result<([u8; HEADER_LEN], Vec<u8>)> {
    let mut header = [0u8; HEADER_LEN];
    let len = u32::try_from(codeset.code_length())
        .map_err(|_| Error::UnsupportedCodeLength(codeset.code_length()))?;
    header[..4].copy_from_slice(&len.to_le_bytes());
    header[4..12].copy_from_slice(&codeset.percentile().value().to_bits().to_le_bytes());
    header[12..].copy_from_slice(&(codeset.len() as u64).to_le_bytes());

    let stride = words_for(codeset.code_length());
    let mut payload = Vec::with_capacity(codeset.len() * (stride * 8 + 16));
    for ((id, label), code) in codeset
        .ids()
        .iter()
        .zip(codeset.labels())
        .zip(codeset.codes())
    {
        write_str(&mut payload, id)?;
        write_str(&mut payload, label)?;
        for w in code.words() {
            payload.extend_from_slice(&w.to_le_bytes());
        }
    }
    Ok((header, payload))
}

pub(super) fn digest(header: &[u8], payload: &[u8]) -> Fingerprint {
    let mut hasher = Sha256::new();
    hasher.update(header);
    hasher.update(payload);
    Fingerprint(hasher.finalize().into())
}

pub fn write_index<W: Write>(index: &HashIndex, mut writer: W) -> Result<()> {
    let (header, payload) = encode_body(index.codeset())?;
    writer.write_all(&INDEX_MAGIC)?;
    writer.write_all(&INDEX_VERSION.to_le_bytes())?;
    writer.write_all(&header)?;
    writer.write_all(&index.fingerprint().0)?;
    writer.write_all(&payload)?;
    Ok(())
}

pub fn serialize_index(index: &HashIndex, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_index(index, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn deserialize_index(path: impl AsRef<Path>) -> Result<HashIndex> {
    read_index(File::open(path)?)
}

pub fn read_index<R: Read>(mut reader: R) -> Result<HashIndex> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;

    let magic: [u8; 4] = bytes
        .get(..4)
        .ok_or(Error::Truncated("index magic"))?
        .try_into()
        .expect("4 bytes");
    if magic != INDEX_MAGIC {
        return Err(Error::BadMagic {
            expected: INDEX_MAGIC,
            found: magic,
        });
    }
    let mut rest = &bytes[4..];
    let version = read_u32(&mut rest, "index version")?;
    if version != INDEX_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: INDEX_VERSION,
        });
    }
    if rest.len() < HEADER_LEN + 32 {
        return Err(Error::Truncated("index header"));
    }
    let (header, rest) = rest.split_at(HEADER_LEN);
    let (recorded, payload) = rest.split_at(32);
    if digest(header, payload).0 != recorded {
        return Err(Error::FingerprintMismatch);
    }

    let mut h = header;
    let code_length = read_u32(&mut h, "code length")? as usize;
    let q = f64::from_bits(read_u64(&mut h, "percentile")?);
    let count = read_u64(&mut h, "entry count")?;
    let percentile =
        ThresholdPercentile::new(q).map_err(|e| Error::Corrupt(format!("header: {e}")))?;
    let stride = words_for(code_length);

    let mut p = payload;
    let mut codes = Vec::new();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..count {
        ids.push(read_string(&mut p, "entry id")?);
        labels.push(read_string(&mut p, "entry label")?);
        let words = (0..stride)
            .map(|_| read_u64(&mut p, "code word"))
            .collect::<Result<Vec<_>>>()?;
        codes.push(
            BinaryCode::from_words(words, code_length)
                .map_err(|e| Error::Corrupt(e.to_string()))?,
        );
    }
    if !p.is_empty() {
        return Err(Error::Corrupt("trailing bytes after last entry".into()));
    }

    let index = HashIndex::build(CodeSet::new(codes, ids, labels, code_length, percentile)?)?;
    debug_assert_eq!(index.fingerprint().0, recorded);
    Ok(index)
}
