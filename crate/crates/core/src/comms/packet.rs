use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAYLOAD_BITS: usize = 6;

/// Fixed header and preamble prepended to every payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketFormat {
    pub header: Vec<bool>,
    pub preamble: Vec<bool>,
}

impl Default for PacketFormat {
    fn default() -> Self {
        Self { header: vec![true, false], preamble: vec![true, false, true] }
    }
}

impl PacketFormat {
    pub fn validate(&self) -> Result<()> {
        if self.header.is_empty() || self.preamble.is_empty() {
            return Err(Error::InvalidParameter("header and preamble must be non-empty".into()));
        }
        if !self.prefix().iter().any(|&b| b) {
            return Err(Error::InvalidParameter("prefix needs at least one 1 bit as amplitude reference".into()));
        }
        Ok(())
    }

    /// Header followed by preamble.
    pub fn prefix(&self) -> Vec<bool> {
        self.header.iter().chain(&self.preamble).copied().collect()
    }

    pub fn packet_len(&self) -> usize {
        self.header.len() + self.preamble.len() + PAYLOAD_BITS
    }

    pub fn frame(&self, payload: &[bool]) -> Result<Vec<bool>> {
        if payload.len() != PAYLOAD_BITS {
            return Err(Error::PayloadLength { expected: PAYLOAD_BITS, got: payload.len() });
        }
        let mut bits = self.prefix();
        bits.extend_from_slice(payload);
        Ok(bits)
    }

    /// Strips and checks the prefix, returning the payload.
    pub fn deframe(&self, bits: &[bool]) -> Result<[bool; PAYLOAD_BITS]> {
        let prefix = self.prefix();
        if bits.len() != self.packet_len() {
            return Err(Error::PayloadLength { expected: self.packet_len(), got: bits.len() });
        }
        if bits[..prefix.len()] != prefix[..] {
            return Err(Error::InvalidParameter("packet prefix mismatch".into()));
        }
        let mut out = [false; PAYLOAD_BITS];
        out.copy_from_slice(&bits[prefix.len()..]);
        Ok(out)
    }
}

pub fn frame_packet(payload: &[bool]) -> Result<Vec<bool>> {
    PacketFormat::default().frame(payload)
}

pub fn deframe_packet(bits: &[bool]) -> Result<[bool; PAYLOAD_BITS]> {
    PacketFormat::default().deframe(bits)
}

/// Payload bits of a 6-bit value, most significant first.
pub fn payload_from_u8(v: u8) -> [bool; PAYLOAD_BITS] {
    std::array::from_fn(|i| (v >> (PAYLOAD_BITS - 1 - i)) & 1 == 1)
}

pub fn payload_to_u8(bits: &[bool; PAYLOAD_BITS]) -> u8 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u8::from(b))
}

/// Parses a string of `0`/`1` characters.
pub fn bits_from_str(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidParameter(format!("not a bit: {c:?}"))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_layout() {
        let p = bits_from_str("101101").unwrap();
        let f = frame_packet(&p).unwrap();
        assert_eq!(f.len(), 11);
        assert_eq!(bits_to_string(&f), "10101101101");
        assert_eq!(bits_to_string(&frame_packet(&[false; 6]).unwrap()), "10101000000");
    }

    #[test]
    fn wrong_payload_length() {
        assert!(matches!(frame_packet(&[true; 5]), Err(Error::PayloadLength { expected: 6, got: 5 })));
    }

    #[test]
    fn round_trip_all_payloads() {
        for v in 0..64u8 {
            let p = payload_from_u8(v);
            let back = deframe_packet(&frame_packet(&p).unwrap()).unwrap();
            assert_eq!(payload_to_u8(&back), v);
        }
    }

    #[test]
    fn corrupted_prefix_rejected() {
        let mut f = frame_packet(&[true; 6]).unwrap();
        f[0] = false;
        assert!(deframe_packet(&f).is_err());
    }
}
