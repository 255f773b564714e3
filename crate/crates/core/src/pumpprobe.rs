//! Pump-probe detection of intramolecular vibrational redistribution (IVR).
//!
//! A pump π-pulse excites the bright mode and kicks the crystal by iη. After
//! a delay τ the probe returns any population still in the bright mode,
//! undoing the kick, or excites it a second time if IVR has emptied it,
//! doubling the kick. Only the bright-mode population c₀(τ)² = e^{−τ/τ₁}
//! enters the signal.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::catgen::CatGenResult;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::linalg::C64;
use crate::molecule::{IonCrystal, VibrationalMode};
use crate::optimizer::{optimize_angle, OptimizationProblem, Optimum, ProtocolParams};
use crate::recoil::{kicked_mixture, simulate_mixture, DensityMatrix, DetectionOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct IvrModel {
    tau1: f64,
    bright_mode: VibrationalMode,
}

impl IvrModel {
    /// `tau1` is the bright-state lifetime in seconds.
    pub fn new(tau1: f64, bright_mode: VibrationalMode) -> Result<Self> {
        require_positive("bright-state lifetime", tau1)?;
        Ok(IvrModel { tau1, bright_mode })
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn bright_mode(&self) -> &VibrationalMode {
        &self.bright_mode
    }
}

/// c₀(τ)² = exp(−τ/τ₁)
pub fn bright_population(delay: f64, model: &IvrModel) -> Result<f64> {
    Ok((-require_non_negative("delay", delay)? / model.tau1).exp())
}

/// Optimized detection of a doubled recoil on `mode`.
pub fn two_photon_efficiency(
    crystal: &IonCrystal,
    mode: &VibrationalMode,
    heating_rate: f64,
    params: ProtocolParams,
) -> Result<Optimum> {
    let problem = OptimizationProblem::new(crystal.clone(), mode.frequency_cm1(), heating_rate)?
        .with_params(ProtocolParams { photon_count: 2, ..params })?;
    optimize_angle(&problem)
}

/// (1 − e^{−τ/τ₁})·p₂
pub fn pump_probe_probability(delay: f64, model: &IvrModel, two_photon: f64) -> Result<f64> {
    Ok((1.0 - bright_population(delay, model)?) * two_photon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpProbePoint {
    pub delay: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpProbeCurve {
    /// Optimized two-photon detection, the long-delay asymptote.
    pub saturation: Optimum,
    pub points: Vec<PumpProbePoint>,
}

/// Flip probability versus delay for the model's bright mode.
pub fn pump_probe_curve(
    model: &IvrModel,
    crystal: &IonCrystal,
    heating_rate: f64,
    delays: &[f64],
    params: ProtocolParams,
) -> Result<PumpProbeCurve> {
    let saturation = two_photon_efficiency(crystal, &model.bright_mode, heating_rate, params)?;
    let points = delays
        .iter()
        .map(|&delay| {
            Ok(PumpProbePoint { delay, probability: pump_probe_probability(delay, model, saturation.efficiency)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PumpProbeCurve { saturation, points })
}

/// Options of [`simulate_pump_probe_state`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PumpProbeOptions {
    /// Probability that each pulse transfers its quantum; `None` is a perfect π-pulse.
    pub excitation_probability: Option<f64>,
    /// Oscillator phase ω_t·τ accumulated between pump and probe; `None` neglects it.
    pub trap_phase: Option<f64>,
}

/// Kick branches (weight, displacement along iη units) after pump and probe.
pub fn kick_branches(eta: f64, c0_sq: f64, options: PumpProbeOptions) -> Result<Vec<(f64, C64)>> {
    if !(0.0..=1.0).contains(&c0_sq) {
        return Err(Error::InvalidArgument("bright population must lie in [0, 1]"));
    }
    let p = options.excitation_probability.unwrap_or(1.0);
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument("excitation probability must lie in [0, 1]"));
    }
    let probe = C64::new(0.0, eta);
    let pump = probe * C64::from_polar(1.0, options.trap_phase.unwrap_or(0.0));
    let q = 1.0 - p;
    let branches = [
        // pump returned by the probe, or neither pulse absorbed
        (p * p * c0_sq, pump - probe),
        (q * q, C64::new(0.0, 0.0)),
        // only one of the two pulses transfers a quantum
        (p * q, pump),
        (q * p, probe),
        // IVR emptied the bright mode; the probe excites it again
        (p * p * (1.0 - c0_sq), pump + probe),
    ];
    Ok(branches.into_iter().filter(|&(w, _)| w > 0.0).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpProbeState {
    /// Hybrid state after both pulses, before the inverse mapping.
    pub density: DensityMatrix,
    pub detection: DetectionOutcome,
}

/// Builds the post-probe mixture on the generated cat and reads it out.
pub fn simulate_pump_probe_state(
    gen: &CatGenResult,
    eta: f64,
    c0_sq: f64,
    options: PumpProbeOptions,
) -> Result<PumpProbeState> {
    require_non_negative("probe Lamb-Dicke parameter", eta)?;
    let cat = gen.state.as_ref().ok_or(Error::MissingState)?;
    let branches = kick_branches(eta, c0_sq, options)?;
    let axis = C64::from_polar(1.0, gen.axis_phase);
    let oriented: Vec<(f64, C64)> = branches.iter().map(|&(w, k)| (w, k * axis)).collect();
    Ok(PumpProbeState { density: kicked_mixture(cat, &oriented)?, detection: simulate_mixture(gen, &branches)? })
}
