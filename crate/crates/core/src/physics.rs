//! Physical constants and the conversions between catalog units
//! (cm⁻¹, Dalton, nm) and SI.

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{require_non_negative, require_positive, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 2.997_924_58e8;
/// Unified atomic mass unit, kg.
pub const DALTON: f64 = 1.660_539_066_60e-27;

/// The constant set as a value, for callers that want to carry it around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c_light: f64,
    pub dalton: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants { hbar: HBAR, c_light: C_LIGHT, dalton: DALTON };
}

/// Angular frequency in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_rad_per_s(omega: f64) -> Result<Self> {
        require_non_negative("angular frequency", omega).map(Frequency)
    }

    pub fn from_hz(hz: f64) -> Result<Self> {
        require_non_negative("frequency", hz).map(|f| Frequency(2.0 * PI * f))
    }

    pub fn from_wavenumber(cm1: f64) -> Result<Self> {
        require_non_negative("wavenumber", cm1).map(|nu| Frequency(2.0 * PI * C_LIGHT * 100.0 * nu))
    }

    pub fn from_wavelength(meters: f64) -> Result<Self> {
        require_positive("wavelength", meters).map(|l| Frequency(2.0 * PI * C_LIGHT / l))
    }

    pub fn rad_per_s(self) -> f64 {
        self.0
    }

    pub fn hz(self) -> f64 {
        self.0 / (2.0 * PI)
    }

    pub fn wavenumber(self) -> f64 {
        self.0 / (2.0 * PI * C_LIGHT * 100.0)
    }
}

/// k = 2π·100·ν̃ in m⁻¹ for a wavenumber in cm⁻¹.
pub fn wavenumber_to_wavevector(cm1: f64) -> Result<f64> {
    require_non_negative("wavenumber", cm1).map(|nu| 2.0 * PI * 100.0 * nu)
}

/// k = 2π/λ in m⁻¹.
pub fn wavelength_to_wavevector(meters: f64) -> Result<f64> {
    require_positive("wavelength", meters).map(|l| 2.0 * PI / l)
}

/// Ground-state wavepacket size √(ħ/(2mω)) in meters.
pub fn ground_state_extent(total_mass_kg: f64, trap_omega: f64) -> Result<f64> {
    let m = require_positive("total mass", total_mass_kg)?;
    let w = require_positive("trap frequency", trap_omega)?;
    Ok((HBAR / (2.0 * m * w)).sqrt())
}

/// Lamb-Dicke parameter η = k·√(ħ/(2mω_t))·cos θ.
pub fn lamb_dicke(k: f64, total_mass_kg: f64, trap_omega: f64, theta: f64) -> Result<f64> {
    Ok(k * ground_state_extent(total_mass_kg, trap_omega)? * theta.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA_500K: f64 = 2.0 * PI * 500e3;

    #[test]
    fn wavevector_examples() {
        // 2π·100·3259, evaluated at 40 digits
        assert!((wavenumber_to_wavevector(3259.0).unwrap() - 2_047_690.091_609_827).abs() < 1e-1);
        assert_eq!(wavenumber_to_wavevector(0.0).unwrap(), 0.0);
        // 2π/729 nm
        assert!((wavelength_to_wavevector(729e-9).unwrap() - 8_618_909.886_391_751).abs() < 1e-3);
        assert!(wavenumber_to_wavevector(-1.0).is_err());
    }

    #[test]
    fn lamb_dicke_examples() {
        let m = 91.0 * DALTON;
        let eta = lamb_dicke(2.0477e6, m, OMEGA_500K, 0.0).unwrap();
        assert!((eta - 0.02158).abs() < 1e-4, "{eta}");
        assert!(lamb_dicke(2.0477e6, m, OMEGA_500K, PI / 2.0).unwrap().abs() < 1e-15);
        let eta_729 = lamb_dicke(8.6184e6, m, OMEGA_500K, 0.0).unwrap();
        assert!((eta_729 - 0.09083).abs() < 2e-4, "{eta_729}");
        assert!(lamb_dicke(1.0, 0.0, OMEGA_500K, 0.0).is_err());
        assert!(lamb_dicke(1.0, m, -1.0, 0.0).is_err());
    }

    #[test]
    fn wavenumber_round_trip() {
        for nu in [0.5, 911.0, 1890.0, 3259.0, 15000.0] {
            let back = Frequency::from_wavenumber(nu).unwrap().wavenumber();
            assert!(((back - nu) / nu).abs() < 1e-12);
        }
    }

    #[test]
    fn frequency_constructors_agree() {
        let a = Frequency::from_wavelength(729e-9).unwrap();
        let b = Frequency::from_hz(C_LIGHT / 729e-9).unwrap();
        assert!((a.rad_per_s() / b.rad_per_s() - 1.0).abs() < 1e-14);
        assert!(Frequency::from_hz(-1.0).is_err());
    }
}
