//! Latent vector files: `"DPLZ" | version u32 | count u32 | m u32 | f64 LE × count·m`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::codec::{LatentVector, Reader};
use crate::error::{Error, FormatError, Result};

pub const LATENT_MAGIC: &[u8; 4] = b"DPLZ";
pub const LATENT_VERSION: u32 = 1;

pub fn latents_to_bytes(latents: &[LatentVector]) -> Result<Vec<u8>> {
    let m = latents.first().map_or(0, LatentVector::len);
    for z in latents {
        Error::check_len(m, z.len())?;
    }
    let mut out = Vec::with_capacity(16 + 8 * m * latents.len());
    out.extend_from_slice(LATENT_MAGIC);
    out.extend_from_slice(&LATENT_VERSION.to_le_bytes());
    out.extend_from_slice(&(latents.len() as u32).to_le_bytes());
    out.extend_from_slice(&(m as u32).to_le_bytes());
    for z in latents {
        for v in &z.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

/// The file does not carry the identity block length; callers supply it.
pub fn latents_from_bytes(bytes: &[u8], identity_len: usize) -> Result<Vec<LatentVector>> {
    let mut r = Reader::new(bytes);
    r.magic(LATENT_MAGIC)?;
    let version = r.u32()?;
    if version != LATENT_VERSION {
        return Err(FormatError::VersionMismatch {
            expected: LATENT_VERSION,
            found: version,
        }
        .into());
    }
    let count = r.u32()? as usize;
    let m = r.u32()? as usize;
    let total = count.saturating_mul(m);
    if total > r.remaining() / 8 {
        return Err(FormatError::Truncated {
            needed: total.saturating_mul(8),
            available: r.remaining(),
        }
        .into());
    }
    (0..count)
        .map(|_| {
            let values = (0..m).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
            LatentVector::new(values, identity_len)
        })
        .collect()
}

/// `latent_id,z0,…,z{m-1}` rows.
pub fn latents_to_csv(latents: &[LatentVector]) -> String {
    let m = latents.first().map_or(0, LatentVector::len);
    let mut out = String::from("latent_id");
    for k in 0..m {
        write!(out, ",z{k}").unwrap();
    }
    out.push('\n');
    for (i, z) in latents.iter().enumerate() {
        write!(out, "{i}").unwrap();
        for v in &z.values {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_latents(latents: &[LatentVector], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, latents_to_bytes(latents)?).map_err(|e| Error::io(path, e))
}

pub fn read_latents(path: impl AsRef<Path>, identity_len: usize) -> Result<Vec<LatentVector>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    latents_from_bytes(&bytes, identity_len).map_err(|e| match e {
        Error::Decode(f) => Error::format(path, f),
        other => other,
    })
}
