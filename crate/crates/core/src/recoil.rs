//! The detection protocol: photon recoil on a cat state, the inverse mapping,
//! geometric-phase readout, multi-photon mixtures and spectrum scans.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_2, PI};

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::catgen::CatGenResult;
use crate::dynamics::Propagator;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::fock::{displacement_matrix, FockSpace, HybridState, SpinBasis, DEFAULT_TAIL_THRESHOLD};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::molecule::{eta_probe, IonCrystal, ModeModel, VibrationalMode};
use crate::physics::C_LIGHT;

/// Absorption of `photon_count` probe photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilEvent {
    pub eta_probe: f64,
    /// φ_sc, the phase of the kick relative to the cat axis; π/2 is the sensitive direction.
    pub scatter_phase: f64,
    pub photon_count: u32,
}

impl RecoilEvent {
    pub fn new(eta_probe: f64, scatter_phase: f64, photon_count: u32) -> Result<Self> {
        require_non_negative("probe Lamb-Dicke parameter", eta_probe)?;
        if !scatter_phase.is_finite() {
            return Err(Error::InvalidArgument("scatter phase must be finite"));
        }
        Ok(RecoilEvent { eta_probe, scatter_phase, photon_count })
    }

    /// Phase-space kick e^{iφ_sc}·η·k for a cat along the real axis.
    pub fn displacement(&self) -> C64 {
        C64::from_polar(self.eta_probe * self.photon_count as f64, self.scatter_phase)
    }
}

/// Readout of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOutcome {
    pub spin_flip_probability: f64,
    pub geometric_phase: f64,
    pub contrast: f64,
    /// (1 − C)/2, the flip probability without any recoil.
    pub background: f64,
}

impl DetectionOutcome {
    fn from_phase(geometric_phase: f64, contrast: f64) -> Self {
        DetectionOutcome {
            spin_flip_probability: 0.5 * (1.0 - contrast * (2.0 * geometric_phase).cos()),
            geometric_phase,
            contrast,
            background: 0.5 * (1.0 - contrast),
        }
    }

    /// C·sin²θ_g, the part of the flip probability caused by the recoil.
    pub fn signal_minus_background(&self) -> f64 {
        self.spin_flip_probability - self.background
    }
}

/// θ_g = 2αη·sin φ_sc
pub fn geometric_phase(alpha: f64, eta: f64, scatter_phase: f64) -> f64 {
    2.0 * alpha * eta * scatter_phase.sin()
}

/// Closed-form flip probability (1 − C·cos 2θ_g)/2; equals sin²(2αη) at
/// φ_sc = π/2 and C = 1.
pub fn detect_probability(alpha: f64, eta: f64, scatter_phase: f64, contrast: f64) -> Result<DetectionOutcome> {
    if !(0.0..=1.0).contains(&contrast) {
        return Err(Error::InvalidArgument("contrast must lie in [0, 1]"));
    }
    Ok(DetectionOutcome::from_phase(geometric_phase(alpha, eta, scatter_phase), contrast))
}

/// Displaces the motion by `delta` on both spin components.
pub fn displace(state: &HybridState, delta: C64) -> Result<HybridState> {
    if delta == ZERO {
        return Ok(state.clone());
    }
    let space = FockSpace::new(state.fock_dim())?;
    let out = state.apply_motional(&displacement_matrix(delta, space))?;
    let tail = out.tail_population();
    if tail > DEFAULT_TAIL_THRESHOLD {
        return Err(Error::TruncationOverflow { tail, threshold: DEFAULT_TAIL_THRESHOLD });
    }
    Ok(out)
}

/// Applies the recoil kick D(e^{iφ_sc}·η·k); the spin is untouched.
pub fn apply_recoil(state: &HybridState, event: &RecoilEvent) -> Result<HybridState> {
    displace(state, event.displacement())
}

/// Runs recoil → inverse generation → readout on the generated cat.
///
/// The kick direction is taken relative to the cat's axis, so φ_sc = π/2 is
/// always the sensitive direction. Ideal and analytic cats are undone by the
/// exact conditional displacements; full-dynamics cats by propagating the
/// same Hamiltonian backwards in time.
pub fn simulate_protocol(gen: &CatGenResult, event: &RecoilEvent) -> Result<DetectionOutcome> {
    let state = gen.state.as_ref().ok_or(Error::MissingState)?;
    let kicked = displace(state, event.displacement() * C64::from_polar(1.0, gen.axis_phase))?;
    Ok(readout(&inverse_mapping(gen, &kicked)?))
}

/// Undoes the cat generation of `gen` on `state`.
pub fn inverse_mapping(gen: &CatGenResult, state: &HybridState) -> Result<HybridState> {
    let space = FockSpace::new(state.fock_dim())?;
    match &gen.replay {
        None => {
            let alpha = gen.branch_alpha();
            let minus = displacement_matrix(-alpha, space);
            let plus = displacement_matrix(alpha, space);
            state.apply_conditional(SpinBasis::X, [&minus, &plus])
        }
        Some(replay) => {
            let h = replay.hamiltonian(space)?;
            let mut p = Propagator::new(h.as_ref(), state, gen.duration, replay.config)?;
            p.advance_to(0.0)?;
            Ok(p.state())
        }
    }
}

/// Runs the protocol on a statistical mixture of kicks, given as
/// (weight, displacement relative to the cat axis) pairs.
pub fn simulate_mixture(gen: &CatGenResult, kicks: &[(f64, C64)]) -> Result<DetectionOutcome> {
    let state = gen.state.as_ref().ok_or(Error::MissingState)?;
    let axis = C64::from_polar(1.0, gen.axis_phase);
    let mut coherence = ZERO;
    let mut trace = 0.0;
    for &(w, kick) in kicks {
        require_non_negative("mixture weight", w)?;
        if w == 0.0 {
            continue;
        }
        let undone = inverse_mapping(gen, &displace(state, kick * axis)?)?;
        let pops = undone.x_populations();
        coherence += undone.x_coherence() * w;
        trace += w * (pops[0] + pops[1]);
    }
    if !(trace > 0.0) {
        return Err(Error::InvalidArgument("mixture weights must not all vanish"));
    }
    Ok(readout_coherence(coherence / trace))
}

/// Ramsey analysis in the x basis: contrast and phase from ρ₊₋, flip
/// probability (1 − 2·Re ρ₊₋)/2 relative to the initial |g⟩.
pub fn readout(state: &HybridState) -> DetectionOutcome {
    let pops = state.x_populations();
    readout_coherence(state.x_coherence() / (pops[0] + pops[1]))
}

fn readout_coherence(coherence: C64) -> DetectionOutcome {
    DetectionOutcome::from_phase(0.5 * coherence.arg(), (2.0 * coherence.norm()).min(1.0))
}

/// Photon-number distributions of the excited vibrational modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePopulations {
    modes: Vec<Vec<f64>>,
}

/// Normalization tolerance for each mode distribution.
const POPULATION_TOLERANCE: f64 = 1e-9;

impl ModePopulations {
    pub fn new(modes: Vec<Vec<f64>>) -> Result<Self> {
        for p in &modes {
            if p.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidArgument("probabilities must be non-negative"));
            }
            if (p.iter().sum::<f64>() - 1.0).abs() > POPULATION_TOLERANCE {
                return Err(Error::InvalidArgument("each mode distribution must sum to one"));
            }
        }
        Ok(ModePopulations { modes })
    }

    pub fn single(distribution: Vec<f64>) -> Result<Self> {
        Self::new(vec![distribution])
    }

    pub fn modes(&self) -> &[Vec<f64>] {
        &self.modes
    }

    /// Distribution of the total photon number Σ_j k_j, modes independent.
    pub fn total_count_distribution(&self) -> Vec<f64> {
        let mut total = vec![1.0];
        for p in &self.modes {
            let mut next = vec![0.0; total.len() + p.len() - 1];
            for (i, &a) in total.iter().enumerate() {
                for (j, &b) in p.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            total = next;
        }
        total
    }
}

/// Poisson photon-number distribution of a coherent amplitude β, cut where
/// the remaining tail is below 10⁻¹⁵ and renormalized.
pub fn poisson_distribution(beta: f64) -> Vec<f64> {
    let mean = beta * beta;
    let mut out = vec![(-mean).exp()];
    let mut sum = out[0];
    let mut k = 0usize;
    while 1.0 - sum > 1e-15 || (k as f64) < mean {
        k += 1;
        let next = out[k - 1] * mean / k as f64;
        out.push(next);
        sum += next;
        if k > 10_000 {
            break;
        }
    }
    for p in &mut out {
        *p /= sum;
    }
    out
}

/// Hybrid density matrix in the x basis (spin-major ordering).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    fock_dim: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// tr ρ²
    pub fn purity(&self) -> f64 {
        let n = self.matrix.rows();
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += self.matrix[(r, c)].norm_sqr();
            }
        }
        acc
    }

    /// ⟨+|ρ_spin|−⟩
    pub fn x_coherence(&self) -> C64 {
        let n = self.fock_dim;
        (0..n).map(|i| self.matrix[(i, n + i)]).sum()
    }

    /// Reduced motional density matrix.
    pub fn motional(&self) -> CMatrix {
        let n = self.fock_dim;
        CMatrix::from_fn(n, n, |r, c| self.matrix[(r, c)] + self.matrix[(n + r, n + c)])
    }

    fn add_pure(&mut self, state: &HybridState, weight: f64) {
        let v = state.to_basis(SpinBasis::X);
        let amps = v.amplitudes();
        for (r, a) in amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (c, b) in amps.iter().enumerate() {
                self.matrix[(r, c)] += a * b.conj() * weight;
            }
        }
    }
}

/// ρ = Σ_K P(K)·D(iηK)|cat⟩⟨cat|D(iηK)† with P the total-photon-number
/// distribution; the cat is displaced along +i.
pub fn traced_motional_state(populations: &ModePopulations, eta: f64, cat: &HybridState) -> Result<DensityMatrix> {
    let kicks: Vec<(f64, C64)> = populations
        .total_count_distribution()
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, C64::new(0.0, eta * k as f64)))
        .collect();
    kicked_mixture(cat, &kicks)
}

/// ρ = Σ_i w_i·D(δ_i)|ψ⟩⟨ψ|D(δ_i)†
pub fn kicked_mixture(state: &HybridState, kicks: &[(f64, C64)]) -> Result<DensityMatrix> {
    let n = state.fock_dim();
    let mut rho = DensityMatrix { fock_dim: n, matrix: CMatrix::zeros(2 * n, 2 * n) };
    for &(w, kick) in kicks {
        require_non_negative("mixture weight", w)?;
        if w == 0.0 {
            continue;
        }
        rho.add_pure(&displace(state, kick)?, w);
    }
    Ok(rho)
}

/// Flip probability for several excited modes, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultimodeDetection {
    /// Mixture average Σ_K P(K)·(1 − C·cos 4αηK)/2 over the total photon number.
    pub exact: f64,
    /// sin²(2αη·Σ_j Σ_k k·√P_j(k)), amplitude-weighted and contrast-free.
    pub as_printed: f64,
}

/// Detection probability at φ_sc = π/2 for the photon-number statistics `populations`.
pub fn multimode_detection(
    populations: &ModePopulations,
    eta: f64,
    cat_alpha: f64,
    contrast: f64,
) -> Result<MultimodeDetection> {
    if !(0.0..=1.0).contains(&contrast) {
        return Err(Error::InvalidArgument("contrast must lie in [0, 1]"));
    }
    let total = populations.total_count_distribution();
    let exact = total
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            p * detect_probability(cat_alpha, eta * k as f64, FRAC_PI_2, contrast)
                .map(|d| d.spin_flip_probability)
                .unwrap_or(0.0)
        })
        .sum();
    let weighted: f64 =
        populations.modes.iter().flat_map(|p| p.iter().enumerate().map(|(k, &pk)| k as f64 * pk.sqrt())).sum();
    let as_printed = (2.0 * cat_alpha * eta * weighted).sin().powi(2);
    Ok(MultimodeDetection { exact, as_printed })
}

/// A transform-limited Gaussian probe pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub center_cm1: f64,
    /// Intensity FWHM in seconds.
    pub duration_fwhm: f64,
    /// Dimensionless area: resonant amplitude for the reference transition moment.
    pub area: f64,
    /// IR intensity (km/mol) of the reference moment d_ref. Zero means every
    /// mode counts as unit-normalized.
    pub reference_ir: f64,
}

/// Result of one pulse on one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Excitation {
    /// Coherent amplitude β of a harmonic mode.
    Coherent(f64),
    /// Excited-state probability of a two-level mode.
    TwoLevel(f64),
}

impl Excitation {
    pub fn distribution(&self) -> Vec<f64> {
        match *self {
            Excitation::Coherent(beta) => poisson_distribution(beta),
            Excitation::TwoLevel(p) => vec![1.0 - p, p],
        }
    }

    /// Mean number of absorbed photons.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            Excitation::Coherent(beta) => beta * beta,
            Excitation::TwoLevel(p) => p,
        }
    }
}

/// Gaussian spectral factor exp(−Δ²σ_t²/2), σ_t = FWHM/(2√(2 ln 2)), Δ in rad/s.
pub fn spectral_factor(detuning_cm1: f64, duration_fwhm: f64) -> f64 {
    let delta = 2.0 * PI * C_LIGHT * 100.0 * detuning_cm1;
    let sigma = duration_fwhm / (2.0 * (2.0 * LN_2).sqrt());
    (-0.5 * (delta * sigma).powi(2)).exp()
}

/// Excitation of `mode` by `pulse`, scaled by d/d_ref with d ∝ √(IR intensity).
pub fn pulse_excitation(mode: &VibrationalMode, pulse: &Pulse) -> Result<Excitation> {
    require_positive("pulse duration", pulse.duration_fwhm)?;
    require_non_negative("pulse area", pulse.area)?;
    require_non_negative("reference intensity", pulse.reference_ir)?;
    let ratio = if pulse.reference_ir > 0.0 { (mode.ir_intensity() / pulse.reference_ir).sqrt() } else { 1.0 };
    let amplitude = pulse.area * ratio * spectral_factor(mode.frequency_cm1() - pulse.center_cm1, pulse.duration_fwhm);
    Ok(match mode.model() {
        ModeModel::Harmonic => Excitation::Coherent(amplitude),
        ModeModel::TwoLevel => Excitation::TwoLevel((FRAC_PI_2 * amplitude).sin().powi(2).clamp(0.0, 1.0)),
    })
}

/// Cat parameters held fixed across a spectrum scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSetting {
    pub alpha: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub wavenumber_cm1: f64,
    pub spin_flip_probability: f64,
    /// Per-mode coherent amplitude (or √p for two-level modes), catalog order.
    pub mode_amplitudes: Vec<f64>,
}

/// Pulse settings of a spectrum scan; the center is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPulse {
    pub duration_fwhm: f64,
    pub area: f64,
}

/// Flip probability versus pulse center for a fixed cat.
///
/// The probe Lamb-Dicke parameter is evaluated at each scan wavenumber with
/// the beam along the mode (θ = 0). A molecule without any tabulated IR
/// intensity produces a flat background (1 − C)/2.
pub fn spectrum_scan_with_cat(
    crystal: &IonCrystal,
    wavenumbers: &[f64],
    pulse: ScanPulse,
    cat: CatSetting,
) -> Result<Vec<SpectrumPoint>> {
    let modes = crystal.molecule().modes();
    let reference_ir = modes.iter().map(|m| m.ir_intensity()).fold(0.0, f64::max);
    let background = 0.5 * (1.0 - cat.contrast);
    wavenumbers
        .iter()
        .map(|&nu| {
            if reference_ir == 0.0 {
                return Ok(SpectrumPoint {
                    wavenumber_cm1: nu,
                    spin_flip_probability: background,
                    mode_amplitudes: vec![0.0; modes.len()],
                });
            }
            let p = Pulse { center_cm1: nu, duration_fwhm: pulse.duration_fwhm, area: pulse.area, reference_ir };
            let excitations = modes.iter().map(|m| pulse_excitation(m, &p)).collect::<Result<Vec<_>>>()?;
            let populations = ModePopulations::new(excitations.iter().map(Excitation::distribution).collect())?;
            let eta = eta_probe(crystal, nu, 0.0)?;
            let detection = multimode_detection(&populations, eta, cat.alpha, cat.contrast)?;
            Ok(SpectrumPoint {
                wavenumber_cm1: nu,
                spin_flip_probability: detection.exact,
                mode_amplitudes: excitations.iter().map(|e| e.mean_photons().sqrt()).collect(),
            })
        })
        .collect()
}

/// [`spectrum_scan_with_cat`] with the cat optimized for the brightest mode
/// at the given heating rate.
pub fn spectrum_scan(
    crystal: &IonCrystal,
    wavenumbers: &[f64],
    pulse: ScanPulse,
    heating_rate: f64,
    params: &crate::optimizer::ProtocolParams,
) -> Result<Vec<SpectrumPoint>> {
    let reference = crystal.molecule().default_mode()?;
    let problem = crate::optimizer::OptimizationProblem::new(crystal.clone(), reference.frequency_cm1(), heating_rate)?
        .with_params(*params)?;
    let optimum = crate::optimizer::optimize_angle(&problem)?;
    let cat = CatSetting { alpha: optimum.alpha_star, contrast: optimum.contrast };
    spectrum_scan_with_cat(crystal, wavenumbers, pulse, cat)
}
