use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Capacity of the reference 3.7 V, 675 mAh cell in mWh.
pub const DEFAULT_BATTERY_MWH: f64 = 2500.0;

/// Per-state draw and duty cycle of the IRS controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerProfile {
    pub sleep_uw: f64,
    pub comm_uw: f64,
    pub reflect_uw: f64,
    pub sleep_duty: f64,
    pub comm_duty: f64,
    pub reflect_duty: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            sleep_uw: 46.5,
            comm_uw: 2763.0,
            reflect_uw: 50.0,
            sleep_duty: 0.50,
            comm_duty: 0.05,
            reflect_duty: 0.45,
        }
    }
}

impl PowerProfile {
    pub fn validate(&self) -> Result<()> {
        let draws = [self.sleep_uw, self.comm_uw, self.reflect_uw];
        let duties = [self.sleep_duty, self.comm_duty, self.reflect_duty];
        if draws.iter().chain(&duties).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter("power draws and duties must be finite and >= 0".into()));
        }
        let total: f64 = duties.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("duty cycles sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn average_uw(&self) -> f64 {
        self.sleep_uw * self.sleep_duty + self.comm_uw * self.comm_duty + self.reflect_uw * self.reflect_duty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub average_uw: f64,
    pub lifetime_days: f64,
}

pub fn power_budget(profile: &PowerProfile, battery_mwh: f64) -> Result<PowerBudget> {
    profile.validate()?;
    if !(battery_mwh > 0.0) || !battery_mwh.is_finite() {
        return Err(Error::InvalidParameter(format!("battery capacity {battery_mwh}")));
    }
    let average_uw = profile.average_uw();
    let lifetime_days = if average_uw > 0.0 {
        battery_mwh * 1000.0 / average_uw / 24.0
    } else {
        f64::INFINITY
    };
    Ok(PowerBudget { average_uw, lifetime_days })
}
