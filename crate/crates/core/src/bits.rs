//! Finite binary strings.
//!
//! One type serves both as the objects under study (strings over {0,1}) and
//! as codewords emitted by the coders. Bits are stored one per `bool`, most
//! significant (first emitted) bit first.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self {
            bits: Vec::with_capacity(cap),
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The `len` low-order bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut s = Self::with_capacity(len);
        s.push_u64(value, len);
        s
    }

    /// All zeros of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends the `len` low-order bits of `value`, most significant first.
    pub fn push_u64(&mut self, value: u64, len: usize) {
        debug_assert!(len <= 64);
        for i in (0..len).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        Self::from_bits(self.bits[start..end].to_vec())
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Complements every bit.
    pub fn flipped(&self) -> BitString {
        Self::from_bits(self.bits.iter().map(|b| !b).collect())
    }

    /// Packs the bits big-endian into bytes; the final partial byte is
    /// zero-padded. The bit length must be carried separately.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    /// Inverse of [`BitString::to_bytes`]; padding bits are ignored.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<BitString> {
        if len > bytes.len() * 8 {
            return Err(Error::Decode(format!(
                "{} bytes cannot hold {len} bits",
                bytes.len()
            )));
        }
        let bits = (0..len)
            .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
            .collect();
        Ok(Self { bits })
    }

    /// Lowercase hex of the packed bytes.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses hex digits carrying `len` bits (big-endian, zero padded).
    pub fn from_hex(hex: &str, len: usize) -> Result<BitString> {
        if !hex.len().is_multiple_of(2) {
            return Err(Error::Parse("hex string must have an even number of digits".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::Parse(format!("bad hex: {e}")))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "{} hex bytes do not match bit length {len}",
                bytes.len()
            )));
        }
        Self::from_bytes(&bytes, len)
    }

    /// The string as an integer (first bit most significant). Only for
    /// strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }
}

impl Index<usize> for BitString {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.bits[i]
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Accepts ASCII `0`/`1` text, or `hex:<bit length>:<hex digits>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("hex:") {
            let (len, digits) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse("expected hex:<len>:<digits>".into()))?;
            let len: usize = len
                .parse()
                .map_err(|_| Error::Parse(format!("bad bit length {len:?}")))?;
            return Self::from_hex(digits, len);
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Self::from_bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

/// Reads a bit string front to back.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self {
            bits: bits.bits(),
            pos: 0,
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let bit = self
            .bits
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::Decode(format!("stream truncated at bit {}", self.pos)))?;
        self.pos += 1;
        Ok(bit)
    }

    /// Reads `len` bits as an unsigned integer, most significant first.
    pub fn read_u64(&mut self, len: usize) -> Result<u64> {
        if len > 64 {
            return Err(Error::Decode(format!("field of {len} bits exceeds 64")));
        }
        if self.remaining() < len {
            return Err(Error::Decode(format!(
                "stream truncated: need {len} bits at {}, have {}",
                self.pos,
                self.remaining()
            )));
        }
        let v = self.bits[self.pos..self.pos + len]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64);
        self.pos += len;
        Ok(v)
    }

    pub fn read_bits(&mut self, len: usize) -> Result<BitString> {
        if self.remaining() < len {
            return Err(Error::Decode(format!(
                "stream truncated: need {len} bits at {}",
                self.pos
            )));
        }
        let out = BitString::from_bits(self.bits[self.pos..self.pos + len].to_vec());
        self.pos += len;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let s: BitString = "0110".parse().unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_string(), "0110");
        assert!("01a".parse::<BitString>().is_err());
    }

    #[test]
    fn packing_is_big_endian_zero_padded() {
        let s: BitString = "101".parse().unwrap();
        assert_eq!(s.to_bytes(), vec![0b1010_0000]);
        let s: BitString = "111111110".parse().unwrap();
        assert_eq!(s.to_bytes(), vec![0xff, 0x00]);
        assert_eq!(BitString::from_bytes(&s.to_bytes(), 9).unwrap(), s);
    }

    #[test]
    fn hex_form_carries_length() {
        let s: BitString = "hex:9:ff80".parse().unwrap();
        assert_eq!(s.to_string(), "111111111");
        assert!("hex:17:ff80".parse::<BitString>().is_err());
    }

    #[test]
    fn reader_reports_truncation() {
        let s: BitString = "10".parse().unwrap();
        let mut r = BitReader::new(&s);
        assert_eq!(r.read_u64(2).unwrap(), 2);
        assert!(r.read_bit().is_err());
    }
}
