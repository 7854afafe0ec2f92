//! Meaning of the 6-bit payload: a 2-bit message type followed by 4 bits of
//! content.
//!
//! | type | content                                   |
//! |------|-------------------------------------------|
//! | `00` | IRS id (4 bits)                           |
//! | `01` | AoI bitmap, one bit per angle, 30 deg first |
//! | `10` | angle index (2 bits), IRS id low 2 bits   |
//! | `11` | reserved                                  |

use serde::{Deserialize, Serialize};

use crate::comms::{payload_from_u8, payload_to_u8, PAYLOAD_BITS};
use crate::error::{Error, Result};
use crate::irs::ReflectionAngle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Message {
    IdAnnounce { irs_id: u8 },
    AoiSet { angles: Vec<ReflectionAngle> },
    AngleAnnounce { angle: ReflectionAngle, irs_id_low: u8 },
}

impl Message {
    pub fn encode(&self) -> Result<[bool; PAYLOAD_BITS]> {
        let v = match self {
            Message::IdAnnounce { irs_id } => {
                if *irs_id > 0x0f {
                    return Err(Error::InvalidParameter(format!("IRS id {irs_id} needs more than 4 bits")));
                }
                *irs_id
            }
            Message::AoiSet { angles } => {
                if angles.is_empty() {
                    return Err(Error::InvalidParameter("empty AoI set".into()));
                }
                let map = angles.iter().fold(0u8, |m, a| m | (0b1000 >> a.index()));
                0b01_0000 | map
            }
            Message::AngleAnnounce { angle, irs_id_low } => {
                0b10_0000 | ((angle.index() as u8) << 2) | (irs_id_low & 0b11)
            }
        };
        Ok(payload_from_u8(v))
    }

    pub fn decode(bits: &[bool; PAYLOAD_BITS]) -> Result<Self> {
        let v = payload_to_u8(bits);
        let content = v & 0x0f;
        match v >> 4 {
            0b00 => Ok(Message::IdAnnounce { irs_id: content }),
            0b01 if content != 0 => Ok(Message::AoiSet {
                angles: ReflectionAngle::ALL.into_iter().filter(|a| content & (0b1000 >> a.index()) != 0).collect(),
            }),
            0b01 => Err(Error::InvalidParameter("AoI bitmap is empty".into())),
            0b10 => Ok(Message::AngleAnnounce {
                angle: ReflectionAngle::from_index((content >> 2) as usize).expect("two-bit index"),
                irs_id_low: content & 0b11,
            }),
            _ => Err(Error::InvalidParameter(format!("reserved message type in payload {v:06b}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReflectionAngle::*;

    #[test]
    fn layouts() {
        assert_eq!(payload_to_u8(&Message::IdAnnounce { irs_id: 3 }.encode().unwrap()), 0b00_0011);
        assert_eq!(payload_to_u8(&Message::AoiSet { angles: vec![Deg30, Deg60] }.encode().unwrap()), 0b01_1010);
        let m = Message::AngleAnnounce { angle: Deg75, irs_id_low: 3 };
        assert_eq!(payload_to_u8(&m.encode().unwrap()), 0b10_1111);
    }

    #[test]
    fn every_payload_decodes_or_is_rejected() {
        for v in 0u8..64 {
            match Message::decode(&payload_from_u8(v)) {
                Ok(m) => assert_eq!(payload_to_u8(&m.encode().unwrap()), v),
                Err(_) => assert!(v >> 4 == 0b11 || v == 0b01_0000, "{v:06b}"),
            }
        }
    }

    #[test]
    fn bad_messages() {
        assert!(Message::IdAnnounce { irs_id: 16 }.encode().is_err());
        assert!(Message::AoiSet { angles: vec![] }.encode().is_err());
    }
}
