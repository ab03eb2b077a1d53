//! Little-endian primitives shared by the binary file formats.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub(crate) fn write_str<W: Write>(writer: &mut W, s: &str) -> Result<()> {
    let len = u32::try_from(s.len())
        .map_err(|_| Error::InvalidArgument("string longer than u32::MAX bytes".into()))?;
    writer.write_all(&len.to_le_bytes())?;
    writer.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn read_exact_or<R: Read>(
    reader: &mut R,
    buf: &mut [u8],
    what: &'static str,
) -> Result<()> {
    reader.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Truncated(what),
        _ => Error::Io(e),
    })
}

pub(crate) fn read_u32<R: Read>(reader: &mut R, what: &'static str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact_or(reader, &mut buf, what)?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn read_u64<R: Read>(reader: &mut R, what: &'static str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact_or(reader, &mut buf, what)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_string<R: Read>(reader: &mut R, what: &'static str) -> Result<String> {
    let len = read_u32(reader, what)? as usize;
    let mut bytes = Vec::new();
    // `take` bounds the allocation by what the input actually holds.
    let got = reader.by_ref().take(len as u64).read_to_end(&mut bytes)?;
    if got != len {
        return Err(Error::Truncated(what));
    }
    String::from_utf8(bytes).map_err(|_| Error::Corrupt(format!("{what} is not valid UTF-8")))
}
