use crate::error::{invalid, Result};

/// Physical constants entering the Schrödinger equation.
///
/// All formulas are written with explicit `hbar` and `mass`; the natural
/// choice `hbar = mass = 1` is the default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsContext {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitsContext {
    fn default() -> Self {
        Self::NATURAL
    }
}

impl UnitsContext {
    pub const NATURAL: UnitsContext = UnitsContext {
        hbar: 1.0,
        mass: 1.0,
    };

    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(invalid("hbar", "must be positive and finite"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass", "must be positive and finite"));
        }
        Ok(Self { hbar, mass })
    }

    /// `E = (hbar k)^2 / 2m`.
    pub fn energy(&self, k: f64) -> f64 {
        let p = self.hbar * k;
        p * p / (2.0 * self.mass)
    }

    /// Group velocity `hbar k / m`.
    pub fn velocity(&self, k: f64) -> f64 {
        self.hbar * k / self.mass
    }

    /// `2m V / hbar^2`: converts an energy into a squared wavenumber.
    pub fn wavenumber_sq(&self, energy: f64) -> f64 {
        2.0 * self.mass * energy / (self.hbar * self.hbar)
    }

    /// `m / hbar`, the factor turning `length^2` into time.
    pub fn time_scale(&self) -> f64 {
        self.mass / self.hbar
    }
}
