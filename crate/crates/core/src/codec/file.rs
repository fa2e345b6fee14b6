//! Little-endian model file:
//!
//! ```text
//! "DPIM" | version u32 = 1 | dim count u32 | dims u32 × count | identity_len u32
//! then per layer: weights f64 (row-major, outputs × inputs), biases f64
//! ```

use std::fs;
use std::path::Path;

use super::model::AutoencoderModel;
use crate::error::{Error, FormatError, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"DPIM";
pub const MODEL_VERSION: u32 = 1;

pub fn model_to_bytes(model: &AutoencoderModel) -> Vec<u8> {
    let dims = model.layer_dims();
    let mut out = Vec::with_capacity(16 + 4 * dims.len() + 8 * model.parameter_count());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(&(model.identity_len() as u32).to_le_bytes());
    for p in model.parameters() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

/// Cursor over a byte slice that reports truncation precisely.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.pos;
        if n > available {
            return Err(FormatError::Truncated {
                needed: n,
                available,
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FormatError> {
        let found = self.take(4)?;
        if found != expected {
            return Err(FormatError::BadMagic {
                expected: String::from_utf8_lossy(expected).into_owned(),
                found: String::from_utf8_lossy(found).into_owned(),
            });
        }
        Ok(())
    }

    pub(crate) fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<AutoencoderModel> {
    let mut r = Reader::new(bytes);
    r.magic(MODEL_MAGIC)?;
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(FormatError::VersionMismatch {
            expected: MODEL_VERSION,
            found: version,
        }
        .into());
    }
    let count = r.u32()? as usize;
    if count > r.remaining() / 4 {
        return Err(FormatError::Truncated {
            needed: count * 4,
            available: r.remaining(),
        }
        .into());
    }
    let dims = (0..count)
        .map(|_| r.u32().map(|d| d as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let identity_len = r.u32()? as usize;
    let shape = AutoencoderModel::zeros(&dims, identity_len)
        .map_err(|e| FormatError::Header(e.to_string()))?;
    let n = shape.parameter_count();
    if n > r.remaining() / 8 {
        return Err(FormatError::Truncated {
            needed: n * 8,
            available: r.remaining(),
        }
        .into());
    }
    let params = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if r.remaining() != 0 {
        return Err(FormatError::Header(format!("{} trailing bytes", r.remaining())).into());
    }
    AutoencoderModel::from_parts(&dims, identity_len, &params)
}

pub fn save_model(model: &AutoencoderModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AutoencoderModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    model_from_bytes(&bytes).map_err(|e| match e {
        Error::Decode(f) => Error::format(path, f),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn sample() -> AutoencoderModel {
        let mut rng = RngStream::new(8);
        AutoencoderModel::random(&[16, 5, 3, 5, 16], 2, 1.0, &mut rng).unwrap()
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.dpim");
        let model = sample();
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);
    }

    #[test]
    fn header_layout() {
        let bytes = model_to_bytes(&sample());
        assert_eq!(&bytes[..4], b"DPIM");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &5u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &16u32.to_le_bytes());
        assert_eq!(&bytes[32..36], &2u32.to_le_bytes());
    }

    #[test]
    fn distinct_errors() {
        let good = model_to_bytes(&sample());

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            model_from_bytes(&bad),
            Err(Error::Decode(FormatError::BadMagic { .. }))
        ));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(
            model_from_bytes(&bad),
            Err(Error::Decode(FormatError::VersionMismatch { found: 2, .. }))
        ));

        assert!(matches!(
            model_from_bytes(&good[..good.len() - 3]),
            Err(Error::Decode(FormatError::Truncated { .. }))
        ));
        assert!(matches!(
            model_from_bytes(&good[..10]),
            Err(Error::Decode(FormatError::Truncated { .. }))
        ));
    }
}
