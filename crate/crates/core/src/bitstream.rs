//! Packed bit sequences and the `RTDBITS1` file format.
//!
//! Layout: 8-byte magic `RTDBITS1`, bit count as a little-endian `u64`, then the
//! payload with 8 bits per byte. The first bit sits in the most significant
//! position of the first byte and the final byte is zero-padded.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"RTDBITS1";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Wrap already-packed bytes. Rejects a byte count that does not match `len`
    /// and nonzero padding.
    pub fn from_packed(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::domain(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let pad = bytes.len() * 8 - len;
        if pad > 0 && bytes[bytes.len() - 1] & ((1u8 << pad) - 1) != 0 {
            return Err(Error::domain("nonzero padding bits"));
        }
        Ok(Self { bytes, len })
    }

    /// Build from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    /// Parse a string of `0`/`1` characters; other characters are ignored.
    pub fn from_ascii(s: &str) -> Self {
        s.bytes()
            .filter_map(|c| match c {
                b'0' => Some(false),
                b'1' => Some(true),
                _ => None,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let shift = 7 - (self.len % 8);
        if shift == 7 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << shift;
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bytes[index / 8] >> (7 - index % 8) & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
    }

    /// Unpack into one byte (0 or 1) per bit.
    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn count_ones(&self) -> usize {
        // padding is always zero
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<BitStream> {
        if start + len > self.len {
            return Err(Error::TooShort {
                needed: start + len,
                got: self.len,
            });
        }
        if start % 8 == 0 {
            let mut bytes = self.bytes[start / 8..(start + len).div_ceil(8)].to_vec();
            let pad = bytes.len() * 8 - len;
            if let Some(last) = bytes.last_mut() {
                *last &= 0xffu8.checked_shl(pad as u32).unwrap_or(0);
            }
            return Ok(BitStream { bytes, len });
        }
        Ok((start..start + len)
            .map(|i| self.bytes[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect())
    }

    pub fn append(&mut self, other: &BitStream) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            self.extend(other.iter());
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.bytes.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    pub fn decode(data: &[u8]) -> std::result::Result<Self, String> {
        if data.len() < HEADER_LEN {
            return Err("truncated header".into());
        }
        if &data[..8] != MAGIC {
            return Err("bad magic, expected RTDBITS1".into());
        }
        let len = u64::from_le_bytes(data[8..16].try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| "bit count overflows usize".to_string())?;
        let payload = &data[HEADER_LEN..];
        if payload.len() != len.div_ceil(8) {
            return Err(format!(
                "payload is {} bytes but header declares {len} bits",
                payload.len()
            ));
        }
        Self::from_packed(payload.to_vec(), len).map_err(|e| e.to_string())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let data = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&data).map_err(|reason| Error::Format {
            path: path.to_path_buf(),
            reason,
        })
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitStream::new();
        out.extend(iter);
        out
    }
}

impl Extend<bool> for BitStream {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for bit in iter {
            self.push(bit);
        }
    }
}
