//! Dictionary-coder stage applied to the concatenated stream sections.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Sections stored as-is; for debugging.
    Identity,
    /// DEFLATE (LZ77 + Huffman).
    #[default]
    Deflate,
}

impl Backend {
    pub fn id(self) -> u8 {
        match self {
            Backend::Identity => 0,
            Backend::Deflate => 1,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Backend::Identity),
            1 => Ok(Backend::Deflate),
            _ => Err(Error::Format(format!("unknown backend id {id}"))),
        }
    }

    pub fn compress(self, data: &[u8]) -> Result<Vec<u8>> {
        match self {
            Backend::Identity => Ok(data.to_vec()),
            Backend::Deflate => {
                let mut enc =
                    DeflateEncoder::new(Vec::with_capacity(data.len() / 4), Compression::best());
                enc.write_all(data)?;
                Ok(enc.finish()?)
            }
        }
    }

    /// Inverse of [`Backend::compress`]; `raw_len` is the exact expected size.
    pub fn decompress(self, data: &[u8], raw_len: usize) -> Result<Vec<u8>> {
        let out = match self {
            Backend::Identity => data.to_vec(),
            Backend::Deflate => {
                let mut out = Vec::with_capacity(raw_len);
                DeflateDecoder::new(data)
                    .take(raw_len as u64 + 1)
                    .read_to_end(&mut out)
                    .map_err(|e| Error::Format(format!("deflate stream: {e}")))?;
                out
            }
        };
        if out.len() != raw_len {
            return Err(Error::StreamLength {
                section: "payload",
                expected: raw_len as u64,
                actual: out.len() as u64,
            });
        }
        Ok(out)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Identity => "identity",
            Backend::Deflate => "deflate",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "none" => Ok(Backend::Identity),
            "deflate" => Ok(Backend::Deflate),
            _ => Err(Error::InvalidParam(format!("unknown backend `{s}`"))),
        }
    }
}
