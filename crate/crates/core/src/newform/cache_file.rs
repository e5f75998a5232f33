use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::{NewformData, PsiCache};
use crate::error::{Error, Result};
use crate::group::GroupElement;

pub const CACHE_MAGIC: &[u8; 8] = b"EISTPSI\0";
pub const CACHE_VERSION: u32 = 1;

const ENTRY_BYTES: usize = 4 * 8 + 1 + 2 * 8;
const HEADER_BYTES: usize = 8 + 4 + 8 + 32 + 8;

/// Write the cache atomically: a temporary sibling file is renamed into place.
///
/// Layout (little endian): magic, version, level, newform fingerprint, entry
/// count, entries `(a, b, c, d, fricke, re, im)`, then SHA-256 of everything before.
pub fn save_cache(path: &Path, nf: &NewformData, cache: &PsiCache) -> Result<()> {
    let entries = cache.entries();
    let mut buf = Vec::with_capacity(HEADER_BYTES + entries.len() * ENTRY_BYTES + 32);
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(&nf.level().to_le_bytes());
    buf.extend_from_slice(&nf.fingerprint());
    buf.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for (g, v) in &entries {
        let (a, b, c, d) = g.integer_part();
        for x in [a, b, c, d] {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        buf.push(g.is_fricke() as u8);
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let digest: [u8; 32] = Sha256::digest(&buf).into();
    buf.extend_from_slice(&digest);

    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn take<const K: usize>(buf: &[u8], at: &mut usize) -> [u8; K] {
    let out: [u8; K] = buf[*at..*at + K].try_into().expect("length checked");
    *at += K;
    out
}

/// Load entries into `cache`; returns how many were read.
///
/// A missing file loads nothing. A file with a bad checksum, a foreign magic or
/// version, or a fingerprint from a different newform is rejected.
pub fn load_cache(path: &Path, nf: &NewformData, cache: &PsiCache) -> Result<usize> {
    let buf = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e.into()),
    };
    let bad = |m: &str| Err(Error::Io(format!("{}: {m}", path.display())));
    if buf.len() < HEADER_BYTES + 32 {
        return bad("truncated cache file");
    }
    let (body, sum) = buf.split_at(buf.len() - 32);
    if Sha256::digest(body).as_slice() != sum {
        return bad("checksum mismatch");
    }
    let mut at = 0;
    if &take::<8>(body, &mut at) != CACHE_MAGIC {
        return bad("not a ψ cache");
    }
    if u32::from_le_bytes(take(body, &mut at)) != CACHE_VERSION {
        return bad("unsupported cache version");
    }
    let level = u64::from_le_bytes(take(body, &mut at));
    if level != nf.level() || take::<32>(body, &mut at) != nf.fingerprint() {
        return bad("cache belongs to a different newform");
    }
    let count = u64::from_le_bytes(take(body, &mut at)) as usize;
    if body.len() != HEADER_BYTES + count * ENTRY_BYTES {
        return bad("entry count does not match file length");
    }
    for _ in 0..count {
        let mut m = [0i64; 4];
        for x in &mut m {
            *x = i64::from_le_bytes(take(body, &mut at));
        }
        let fricke = take::<1>(body, &mut at)[0] != 0;
        let re = f64::from_le_bytes(take(body, &mut at));
        let im = f64::from_le_bytes(take(body, &mut at));
        let g = GroupElement::new(level, m[0], m[1], m[2], m[3], fricke)?;
        cache.insert(g, Complex64::new(re, im));
    }
    Ok(count)
}
