use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four steerable reflection angles of the 4-way VAA board, 15 deg apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReflectionAngle {
    Deg30,
    Deg45,
    Deg60,
    Deg75,
}

impl ReflectionAngle {
    pub const ALL: [ReflectionAngle; 4] = [Self::Deg30, Self::Deg45, Self::Deg60, Self::Deg75];

    pub fn degrees(self) -> f64 {
        match self {
            Self::Deg30 => 30.0,
            Self::Deg45 => 45.0,
            Self::Deg60 => 60.0,
            Self::Deg75 => 75.0,
        }
    }

    pub fn radians(self) -> f64 {
        self.degrees().to_radians()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| (a.degrees() - deg).abs() < 1e-9)
            .ok_or(Error::AngleNotSupported(deg))
    }

    /// Supported angle closest to `deg`; ties go to the smaller angle.
    pub fn nearest(deg: f64) -> Self {
        let mut best = Self::Deg30;
        for a in Self::ALL {
            if (a.degrees() - deg).abs() < (best.degrees() - deg).abs() {
                best = a;
            }
        }
        best
    }

    pub fn switch_config(self) -> SwitchConfig {
        use SwitchPosition as S;
        use TransmissionLine as L;
        let (lines, switches) = match self {
            Self::Deg30 => ([L(3), L(5)], [S::new(1, 3), S::new(2, 2), S::new(3, 1), S::new(4, 4)]),
            Self::Deg45 => ([L(2), L(8)], [S::new(1, 2), S::new(2, 3), S::new(3, 4), S::new(4, 1)]),
            Self::Deg60 => ([L(1), L(7)], [S::new(1, 1), S::new(2, 4), S::new(3, 3), S::new(4, 2)]),
            Self::Deg75 => ([L(4), L(6)], [S::new(1, 4), S::new(2, 1), S::new(3, 2), S::new(4, 3)]),
        };
        SwitchConfig { lines: lines.to_vec(), switches: switches.to_vec() }
    }
}

impl fmt::Display for ReflectionAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}deg", self.degrees())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransmissionLine(pub u8);

impl fmt::Display for TransmissionLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

/// Throw `throw` of RF switch `switch`, written `S{switch}_{throw}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SwitchPosition {
    pub switch: u8,
    pub throw: u8,
}

impl SwitchPosition {
    pub const fn new(switch: u8, throw: u8) -> Self {
        Self { switch, throw }
    }
}

impl fmt::Display for SwitchPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}_{}", self.switch, self.throw)
    }
}

/// Lines and switch throws engaged for one reflection angle. Empty when the
/// board is in its switches-off (retro / off) state.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SwitchConfig {
    pub lines: Vec<TransmissionLine>,
    pub switches: Vec<SwitchPosition>,
}

impl SwitchConfig {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.switches.is_empty()
    }
}

pub fn switch_config_for(angle_deg: f64) -> Result<SwitchConfig> {
    ReflectionAngle::from_degrees(angle_deg).map(ReflectionAngle::switch_config)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn names(cfg: &SwitchConfig) -> (Vec<String>, Vec<String>) {
        (
            cfg.lines.iter().map(ToString::to_string).collect(),
            cfg.switches.iter().map(ToString::to_string).collect(),
        )
    }

    #[test]
    fn table_rows() {
        let (l, s) = names(&switch_config_for(30.0).unwrap());
        assert_eq!(l, ["L3", "L5"]);
        assert_eq!(s, ["S1_3", "S2_2", "S3_1", "S4_4"]);
        let (l, s) = names(&switch_config_for(45.0).unwrap());
        assert_eq!(l, ["L2", "L8"]);
        assert_eq!(s, ["S1_2", "S2_3", "S3_4", "S4_1"]);
        let (l, s) = names(&switch_config_for(60.0).unwrap());
        assert_eq!(l, ["L1", "L7"]);
        assert_eq!(s, ["S1_1", "S2_4", "S3_3", "S4_2"]);
        let (l, s) = names(&switch_config_for(75.0).unwrap());
        assert_eq!(l, ["L4", "L6"]);
        assert_eq!(s, ["S1_4", "S2_1", "S3_2", "S4_3"]);
    }

    #[test]
    fn unsupported_angle() {
        assert!(matches!(switch_config_for(50.0), Err(Error::AngleNotSupported(_))));
    }

    #[test]
    fn mapping_is_a_bijection_with_disjoint_rows() {
        let mut lines = BTreeSet::new();
        let mut throws = BTreeSet::new();
        for a in ReflectionAngle::ALL {
            let c = a.switch_config();
            assert_eq!(c.lines.len(), 2);
            assert_eq!(c.switches.len(), 4);
            // One throw per switch.
            let sw: BTreeSet<u8> = c.switches.iter().map(|s| s.switch).collect();
            assert_eq!(sw.len(), 4);
            for l in c.lines {
                assert!(lines.insert(l));
            }
            for s in c.switches {
                assert!(throws.insert(s));
            }
        }
        assert_eq!(lines.len(), 8);
        assert_eq!(throws.len(), 16);
    }

    #[test]
    fn nearest_snaps() {
        assert_eq!(ReflectionAngle::nearest(52.0), ReflectionAngle::Deg45);
        assert_eq!(ReflectionAngle::nearest(53.0), ReflectionAngle::Deg60);
        assert_eq!(ReflectionAngle::nearest(-10.0), ReflectionAngle::Deg30);
        assert_eq!(ReflectionAngle::nearest(90.0), ReflectionAngle::Deg75);
    }
}
