//! Archive container.
//!
//! ```text
//! magic "VFCP" | u16 version | u8 backend | u8 predictor
//! u32 H | u32 W | u32 T | f64 dx | f64 dy | f64 dt
//! i32 scale exponent | f64 eps | i64 tau' | u32 Bx | u32 By
//! u32 radius | f64 d_max | u32 N_max | u8 K_max
//! u32 CRC-32 of everything above
//! u64 payload length | u64 stored length | stored bytes
//! ```
//!
//! The payload, after the backend stage, is four `u64`-length-prefixed
//! sections in order: mode bitmap, eb codes, residual codes, lossless values.
//! All integers are little-endian.

use crate::codec::backend::Backend;
use crate::codec::Predictor;
use crate::error::{Error, Result};
use crate::field::{Dims, Scale, Spacing};

pub const MAGIC: &[u8; 4] = b"VFCP";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 12 + 24 + 4 + 8 + 8 + 8 + 4 + 8 + 4 + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Header {
    pub backend: Backend,
    pub predictor: Predictor,
    pub dims: Dims,
    pub spacing: Spacing,
    pub scale: Scale,
    /// Absolute error bound in field units.
    pub eps: f64,
    /// Error-bound cap in fixed units.
    pub tau: i64,
    pub block: (usize, usize),
    pub radius: u32,
    pub d_max: f64,
    pub n_max: u32,
    pub k_max: u8,
}

impl Header {
    pub fn blocks_per_frame(&self) -> usize {
        self.dims.h.div_ceil(self.block.0) * self.dims.w.div_ceil(self.block.1)
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(HEADER_LEN + 4);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.push(self.backend.id());
        b.push(self.predictor.id());
        for x in [self.dims.h, self.dims.w, self.dims.t] {
            b.extend_from_slice(&(x as u32).to_le_bytes());
        }
        for x in [self.spacing.dx, self.spacing.dy, self.spacing.dt] {
            b.extend_from_slice(&x.to_le_bytes());
        }
        b.extend_from_slice(&self.scale.exponent.to_le_bytes());
        b.extend_from_slice(&self.eps.to_le_bytes());
        b.extend_from_slice(&self.tau.to_le_bytes());
        b.extend_from_slice(&(self.block.0 as u32).to_le_bytes());
        b.extend_from_slice(&(self.block.1 as u32).to_le_bytes());
        b.extend_from_slice(&self.radius.to_le_bytes());
        b.extend_from_slice(&self.d_max.to_le_bytes());
        b.extend_from_slice(&self.n_max.to_le_bytes());
        b.push(self.k_max);
        debug_assert_eq!(b.len(), HEADER_LEN);
        let crc = crc32fast::hash(&b);
        b.extend_from_slice(&crc.to_le_bytes());
        b
    }

    fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if bytes.len() < HEADER_LEN + 4 {
            return Err(Error::StreamLength {
                section: "header",
                expected: (HEADER_LEN + 4) as u64,
                actual: bytes.len() as u64,
            });
        }
        let stored = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap());
        if crc32fast::hash(&bytes[..HEADER_LEN]) != stored {
            return Err(Error::Format("header checksum mismatch".into()));
        }
        let mut r = Reader {
            buf: &bytes[4..HEADER_LEN],
        };
        let version = u16::from_le_bytes(r.take()?);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let backend = Backend::from_id(r.u8()?)?;
        let predictor = Predictor::from_id(r.u8()?)?;
        let h = r.u32()? as usize;
        let w = r.u32()? as usize;
        let t = r.u32()? as usize;
        let dims = Dims::new(h, w, t).map_err(|e| Error::Format(e.to_string()))?;
        let spacing = Spacing {
            dx: r.f64()?,
            dy: r.f64()?,
            dt: r.f64()?,
        };
        spacing
            .validate()
            .map_err(|e| Error::Format(e.to_string()))?;
        let exponent = i32::from_le_bytes(r.take()?);
        let eps = r.f64()?;
        let tau = i64::from_le_bytes(r.take()?);
        let block = (r.u32()? as usize, r.u32()? as usize);
        let radius = r.u32()?;
        let d_max = r.f64()?;
        let n_max = r.u32()?;
        let k_max = r.u8()?;
        if block.0 == 0 || block.1 == 0 || radius < 2 || tau < 0 || k_max > 62 {
            return Err(Error::Format("header parameters out of range".into()));
        }
        Ok(Header {
            backend,
            predictor,
            dims,
            spacing,
            scale: Scale { exponent },
            eps,
            tau,
            block,
            radius,
            d_max,
            n_max,
            k_max,
        })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Format("truncated field".into()));
        }
        let (a, b) = self.buf.split_at(n);
        self.buf = b;
        Ok(a)
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.bytes(N)?.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

/// The four payload sections.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sections {
    pub modes: Vec<u8>,
    pub eb_codes: Vec<u8>,
    pub residuals: Vec<u8>,
    pub lossless: Vec<u8>,
}

const SECTION_NAMES: [&str; 4] = [
    "mode bitmap",
    "eb codes",
    "residual codes",
    "lossless values",
];

/// Serialized archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    bytes: Vec<u8>,
}

impl Archive {
    pub fn assemble(header: &Header, sections: &Sections) -> Result<Self> {
        let mut payload = Vec::new();
        for s in [
            &sections.modes,
            &sections.eb_codes,
            &sections.residuals,
            &sections.lossless,
        ] {
            payload.extend_from_slice(&(s.len() as u64).to_le_bytes());
            payload.extend_from_slice(s);
        }
        let stored = header.backend.compress(&payload)?;
        let mut bytes = header.to_bytes();
        bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        bytes.extend_from_slice(&(stored.len() as u64).to_le_bytes());
        bytes.extend_from_slice(&stored);
        Ok(Self { bytes })
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn header(&self) -> Result<Header> {
        Header::parse(&self.bytes)
    }
}

/// Parses the header and unpacks the payload sections.
pub fn open(bytes: &[u8]) -> Result<(Header, Sections)> {
    let header = Header::parse(bytes)?;
    let mut r = Reader {
        buf: &bytes[HEADER_LEN + 4..],
    };
    let short = |actual: usize| Error::StreamLength {
        section: "payload",
        expected: 16,
        actual: actual as u64,
    };
    let avail = r.buf.len();
    let raw_len = r.u64().map_err(|_| short(avail))?;
    let stored_len = r.u64().map_err(|_| short(avail))?;
    if r.buf.len() as u64 != stored_len {
        return Err(Error::StreamLength {
            section: "payload",
            expected: stored_len,
            actual: r.buf.len() as u64,
        });
    }
    // a payload is never larger than its four length prefixes plus streams
    // bounded by a few bytes per sample
    let plausible = 64 + 32 * header.dims.len() as u64;
    if raw_len > plausible {
        return Err(Error::Format(format!(
            "implausible payload length {raw_len}"
        )));
    }
    let payload = header.backend.decompress(r.buf, raw_len as usize)?;
    let mut p = Reader { buf: &payload };
    let mut parts: Vec<Vec<u8>> = Vec::with_capacity(4);
    for name in SECTION_NAMES {
        let len = p.u64().map_err(|_| Error::StreamLength {
            section: name,
            expected: 8,
            actual: p.buf.len() as u64,
        })?;
        if (p.buf.len() as u64) < len {
            return Err(Error::StreamLength {
                section: name,
                expected: len,
                actual: p.buf.len() as u64,
            });
        }
        parts.push(p.bytes(len as usize)?.to_vec());
    }
    if !p.buf.is_empty() {
        return Err(Error::Format(format!(
            "{} trailing payload bytes",
            p.buf.len()
        )));
    }
    let lossless = parts.pop().unwrap();
    let residuals = parts.pop().unwrap();
    let eb_codes = parts.pop().unwrap();
    let modes = parts.pop().unwrap();
    Ok((
        header,
        Sections {
            modes,
            eb_codes,
            residuals,
            lossless,
        },
    ))
}
