//! Binary cache for the sieve table.
//!
//! Layout: magic "DMLB", format version byte, N as 8-byte little-endian,
//! then the spf sequence as fixed-width u32 little-endian records for
//! n = 0..=N, then a CRC-32 trailer over everything before it.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::sieve::FactorTables;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: [u8; 4] = *b"DMLB";
pub const CACHE_VERSION: u8 = 1;

/// Cache file name for a given limit, keyed by (N, format version).
pub fn cache_file_name(limit: u64) -> String {
    format!("dmlb_v{CACHE_VERSION}_{limit}.bin")
}

pub fn write_cache(tables: &FactorTables, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(cache_file_name(tables.limit()));
    let mut w = BufWriter::new(File::create(&path)?);
    let mut crc = crc32fast::Hasher::new();

    let put = |w: &mut BufWriter<File>, crc: &mut crc32fast::Hasher, bytes: &[u8]| -> Result<()> {
        crc.update(bytes);
        w.write_all(bytes)?;
        Ok(())
    };

    put(&mut w, &mut crc, &CACHE_MAGIC)?;
    put(&mut w, &mut crc, &[CACHE_VERSION])?;
    put(&mut w, &mut crc, &tables.limit().to_le_bytes())?;
    let mut buf = Vec::with_capacity(4 << 16);
    for chunk in tables.raw_spf().chunks(1 << 16) {
        buf.clear();
        for &v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        put(&mut w, &mut crc, &buf)?;
    }
    let digest = crc.finalize();
    w.write_all(&digest.to_le_bytes())?;
    w.flush()?;
    Ok(path)
}

pub fn read_cache(dir: &Path, limit: u64) -> Result<FactorTables> {
    let path = dir.join(cache_file_name(limit));
    let fail = |reason: String| Error::Cache { path: path.clone(), reason };

    let mut r = BufReader::new(File::open(&path)?);
    let mut crc = crc32fast::Hasher::new();

    let mut header = [0u8; 13];
    r.read_exact(&mut header).map_err(|e| fail(format!("short header: {e}")))?;
    crc.update(&header);
    if header[0..4] != CACHE_MAGIC {
        return Err(fail("bad magic".into()));
    }
    if header[4] != CACHE_VERSION {
        return Err(fail(format!("format version {} != {CACHE_VERSION}", header[4])));
    }
    let n = u64::from_le_bytes(header[5..13].try_into().unwrap());
    if n != limit {
        return Err(fail(format!("stores N = {n}, expected {limit}")));
    }

    let entries = (n + 1) as usize;
    let mut spf = Vec::with_capacity(entries);
    let mut buf = vec![0u8; 4 << 16];
    let mut remaining = entries * 4;
    while remaining > 0 {
        let take = remaining.min(buf.len());
        r.read_exact(&mut buf[..take]).map_err(|e| fail(format!("truncated payload: {e}")))?;
        crc.update(&buf[..take]);
        for quad in buf[..take].chunks_exact(4) {
            spf.push(u32::from_le_bytes(quad.try_into().unwrap()));
        }
        remaining -= take;
    }

    let mut trailer = [0u8; 4];
    r.read_exact(&mut trailer).map_err(|e| fail(format!("missing checksum: {e}")))?;
    let stored = u32::from_le_bytes(trailer);
    let computed = crc.finalize();
    if stored != computed {
        return Err(fail(format!("CRC mismatch: stored {stored:#010x}, computed {computed:#010x}")));
    }
    Ok(FactorTables::from_raw(n, spf))
}

/// Load from cache if present and intact, else build and write.
/// Returns (tables, true on cache hit).
pub fn load_or_build(dir: &Path, limit: u64) -> Result<(FactorTables, bool)> {
    match read_cache(dir, limit) {
        Ok(t) => Ok((t, true)),
        Err(_) => {
            let t = FactorTables::build(limit)?;
            write_cache(&t, dir)?;
            Ok((t, false))
        }
    }
}
