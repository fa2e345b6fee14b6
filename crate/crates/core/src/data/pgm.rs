//! Binary PGM (P5, maxval 255) reader and writer.

use std::fs;
use std::path::Path;

use crate::codec::Image;
use crate::error::{Error, FormatError, Result};

pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(image.pixels().iter().map(|p| (p * 255.0).round() as u8));
    out
}

struct HeaderScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderScanner<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, FormatError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            if self.pos >= self.bytes.len() {
                return Err(FormatError::Truncated {
                    needed: 1,
                    available: 0,
                });
            }
            return Err(FormatError::Header(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| FormatError::Header(format!("{what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 {
        return Err(FormatError::Truncated {
            needed: 2,
            available: bytes.len(),
        }
        .into());
    }
    if &bytes[..2] != b"P5" {
        return Err(FormatError::BadMagic {
            expected: "P5".into(),
            found: String::from_utf8_lossy(&bytes[..2]).into_owned(),
        }
        .into());
    }
    let mut scan = HeaderScanner { bytes, pos: 2 };
    let width = scan.number("width")? as usize;
    let height = scan.number("height")? as usize;
    let maxval = scan.number("maxval")?;
    if maxval != 255 {
        return Err(FormatError::BadMaxval(maxval).into());
    }
    match bytes.get(scan.pos) {
        Some(b) if b.is_ascii_whitespace() => scan.pos += 1,
        Some(_) => {
            return Err(FormatError::Header("missing whitespace after maxval".into()).into())
        }
        None => {
            return Err(FormatError::Truncated {
                needed: 1,
                available: 0,
            }
            .into())
        }
    }
    if width == 0 || height == 0 {
        return Err(FormatError::Header("zero image dimension".into()).into());
    }
    let needed = width * height;
    let data = &bytes[scan.pos..];
    if data.len() < needed {
        return Err(FormatError::Truncated {
            needed,
            available: data.len(),
        }
        .into());
    }
    let pixels = data[..needed].iter().map(|&v| v as f64 / 255.0).collect();
    Image::new(width, height, pixels)
}

pub fn write_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(image)).map_err(|e| Error::io(path, e))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes).map_err(|e| match e {
        Error::Decode(f) => Error::format(path, f),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_bytes_exact() {
        let img = Image::filled(32, 32, 0.5).unwrap();
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(b"P5\n32 32\n255\n"));
        assert_eq!(bytes.len(), "P5\n32 32\n255\n".len() + 1024);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            decode_pgm(b"P2\n1 1\n255\n0"),
            Err(Error::Decode(FormatError::BadMagic { .. }))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n1 1\n65535\n00"),
            Err(Error::Decode(FormatError::BadMaxval(65535)))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x01\x02"),
            Err(Error::Decode(FormatError::Truncated { .. }))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2"),
            Err(Error::Decode(FormatError::Truncated { .. }))
        ));
    }

    #[test]
    fn comments_in_header() {
        let img = decode_pgm(b"P5\n# made by hand\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        let img = Image::new(2, 2, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        write_pgm(&img, &path).unwrap();
        let back = read_pgm(&path).unwrap();
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 1.0 / 510.0);
        }
        assert!(matches!(
            read_pgm(dir.path().join("missing.pgm")),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn quantization_error_bounded(px in proptest::collection::vec(0.0f64..=1.0, 12)) {
            let img = Image::new(4, 3, px).unwrap();
            let back = decode_pgm(&encode_pgm(&img)).unwrap();
            for (a, b) in img.pixels().iter().zip(back.pixels()) {
                prop_assert!((a - b).abs() <= 1.0 / 510.0 + 1e-15);
            }
        }
    }
}
