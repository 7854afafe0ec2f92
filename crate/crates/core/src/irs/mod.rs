//! Behavioural model of the reconfigurable Van Atta IRS.

mod envelope;
mod pattern;
mod power;
mod table;

pub use envelope::{default_rc_seconds, envelope_detect};
pub use pattern::{array_factor, reflect_gain, steering_angle_from_pairing, VaaPairing, VAA_ELEMENTS};
pub use power::{power_budget, PowerBudget, PowerProfile, DEFAULT_BATTERY_MWH};
pub use table::{switch_config_for, ReflectionAngle, SwitchConfig, SwitchPosition, TransmissionLine};

use serde::{Deserialize, Serialize};

/// Operating mode. `Retro` is the switches-off Van Atta configuration used for
/// discovery and OOK signalling; `Off` absorbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrsMode {
    Off,
    Retro,
    Reflect(ReflectionAngle),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrsState {
    pub id: u8,
    pub mode: IrsMode,
}

impl IrsState {
    pub fn new(id: u8) -> Self {
        Self { id, mode: IrsMode::Off }
    }

    /// Retro-reflecting for an OOK `1`, absorbing for a `0`.
    pub fn with_ook_bit(self, bit: bool) -> Self {
        Self { mode: if bit { IrsMode::Retro } else { IrsMode::Off }, ..self }
    }

    pub fn ook_bit(&self) -> Option<bool> {
        match self.mode {
            IrsMode::Retro => Some(true),
            IrsMode::Off => Some(false),
            IrsMode::Reflect(_) => None,
        }
    }

    pub fn angle(&self) -> Option<ReflectionAngle> {
        match self.mode {
            IrsMode::Reflect(a) => Some(a),
            _ => None,
        }
    }

    pub fn switch_config(&self) -> SwitchConfig {
        match self.mode {
            IrsMode::Reflect(a) => a.switch_config(),
            IrsMode::Off | IrsMode::Retro => SwitchConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retro_and_off_leave_switches_open() {
        let s = IrsState::new(1).with_ook_bit(true);
        assert_eq!(s.mode, IrsMode::Retro);
        assert!(s.switch_config().is_empty());
        assert!(s.with_ook_bit(false).switch_config().is_empty());
        let r = IrsState { id: 1, mode: IrsMode::Reflect(ReflectionAngle::Deg60) };
        assert_eq!(r.switch_config().switches.len(), 4);
        assert_eq!(r.ook_bit(), None);
    }
}
