//! Schrödinger-cat generation with a bichromatic drive: the Lamb-Dicke
//! closed form, an all-orders growth-rate surrogate, full propagation, the
//! displacement cap set by the first Laguerre zero, and heating-induced
//! dephasing.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::dynamics::{
    bichromatic_tones, hamiltonian_all_orders, hamiltonian_bichromatic_rwa_all_orders, Hamiltonian, Propagator,
    PropagatorConfig,
};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::fock::{
    first_nonpositive_degree, ideal_cat, laguerre_assoc, FockSpace, HybridState, LaguerreSeries, SpinBasis,
};
use crate::linalg::C64;

/// Default hardware cap on the control Rabi frequency, 2π·300 kHz.
pub const DEFAULT_RABI_CAP: f64 = 2.0 * PI * 300e3;
/// Default motional mode frequency, 2π·500 kHz.
pub const DEFAULT_TRAP_OMEGA: f64 = 2.0 * PI * 500e3;
/// Growth counts as stalled below this fraction of the Lamb-Dicke rate ηΩ/2.
pub const STALL_FRACTION: f64 = 1e-3;
/// Stall window in sideband periods 2π/(ηΩ).
pub const STALL_WINDOW_PERIODS: f64 = 10.0;

/// First zero j₁,₁ of the Bessel function J₁.
const BESSEL_J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;
/// Below this η the Laguerre-zero scan would take more than ~10⁸ steps.
const SCAN_MIN_ETA: f64 = 2e-4;

/// What the generation runs towards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatTarget {
    /// Stop once |α| reaches the value.
    Alpha(f64),
    /// Drive for a fixed time in seconds.
    Duration(f64),
    /// Drive until the displacement stops growing.
    Saturation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatGenSpec {
    rabi: f64,
    eta_control: f64,
    target: CatTarget,
    space: FockSpace,
    trap_omega: f64,
}

impl CatGenSpec {
    /// Checks Ω against [`DEFAULT_RABI_CAP`].
    pub fn new(rabi: f64, eta_control: f64, target: CatTarget, space: FockSpace) -> Result<Self> {
        Self::with_rabi_cap(rabi, eta_control, target, space, DEFAULT_RABI_CAP)
    }

    pub fn with_rabi_cap(rabi: f64, eta_control: f64, target: CatTarget, space: FockSpace, cap: f64) -> Result<Self> {
        require_positive("Rabi cap", cap)?;
        require_non_negative("Rabi frequency", rabi)?;
        if rabi > cap * (1.0 + 1e-12) {
            return Err(Error::RabiAboveCap { rabi, cap });
        }
        if !(0.0..1.0).contains(&eta_control) {
            return Err(Error::InvalidArgument("control Lamb-Dicke parameter must lie in [0, 1)"));
        }
        match target {
            CatTarget::Alpha(a) => {
                require_non_negative("target alpha", a)?;
            }
            CatTarget::Duration(t) => {
                require_non_negative("target duration", t)?;
            }
            CatTarget::Saturation => {}
        }
        Ok(CatGenSpec { rabi, eta_control, target, space, trap_omega: DEFAULT_TRAP_OMEGA })
    }

    pub fn with_trap_omega(mut self, trap_omega: f64) -> Result<Self> {
        self.trap_omega = require_positive("trap frequency", trap_omega)?;
        Ok(self)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn eta_control(&self) -> f64 {
        self.eta_control
    }

    pub fn target(&self) -> CatTarget {
        self.target
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn trap_omega(&self) -> f64 {
        self.trap_omega
    }

    /// Lamb-Dicke displacement rate ηΩ/2 in s⁻¹.
    pub fn ld_rate(&self) -> f64 {
        0.5 * self.eta_control * self.rabi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationMethod {
    LdAnalytic,
    GrowthOde,
    FullDynamics,
}

/// Which Hamiltonian the full-dynamics path integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullDynamicsPath {
    /// Explicitly time-dependent all-orders drive with Δ = ±ω_t tones.
    TimeDependent,
    /// Rotating-wave limit (ηΩ/2)·σₓ⊗(𝒜 + 𝒜†).
    Rwa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub alpha: f64,
}

/// Everything needed to rebuild the generation Hamiltonian for time reversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replay {
    pub path: FullDynamicsPath,
    pub rabi: f64,
    pub eta: f64,
    pub trap_omega: f64,
    pub config: PropagatorConfig,
}

impl Replay {
    pub fn hamiltonian(&self, space: FockSpace) -> Result<alloc::boxed::Box<dyn Hamiltonian>> {
        Ok(match self.path {
            FullDynamicsPath::TimeDependent => {
                let tones = bichromatic_tones(self.rabi, self.trap_omega)?;
                alloc::boxed::Box::new(hamiltonian_all_orders(&tones, self.eta, self.trap_omega, space)?)
            }
            FullDynamicsPath::Rwa => {
                alloc::boxed::Box::new(hamiltonian_bichromatic_rwa_all_orders(self.rabi, self.eta, space)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatGenResult {
    pub achieved_alpha: f64,
    pub duration: f64,
    /// |⟨ideal|generated⟩|²; `None` when no state is produced.
    pub fidelity_vs_ideal: Option<f64>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub method: GenerationMethod,
    /// Phase of the |+⟩ₓ branch displacement: α_branch = achieved_alpha·e^{i·axis_phase}.
    pub axis_phase: f64,
    pub state: Option<HybridState>,
    /// Present for full dynamics, which is undone by backward propagation.
    pub replay: Option<Replay>,
}

impl CatGenResult {
    /// Complex displacement of the |+⟩ₓ branch.
    pub fn branch_alpha(&self) -> C64 {
        C64::from_polar(self.achieved_alpha, self.axis_phase)
    }
}

/// Analytic Lamb-Dicke cat: |α| = ηΩt/2 and the ideal two-branch state.
pub fn generate_cat_ld(spec: &CatGenSpec) -> Result<CatGenResult> {
    let rate = spec.ld_rate();
    let (alpha, duration) = match spec.target {
        CatTarget::Alpha(a) => {
            if a > 0.0 && rate == 0.0 {
                return Err(Error::StalledGeneration { alpha: 0.0, target: a });
            }
            (a, if a == 0.0 { 0.0 } else { a / rate })
        }
        CatTarget::Duration(t) => (rate * t, t),
        CatTarget::Saturation => {
            return Err(Error::InvalidArgument("the Lamb-Dicke cat grows without bound; give a target"));
        }
    };
    let state = ideal_cat(C64::new(alpha, 0.0), spec.space)?;
    let samples = 32;
    let trajectory =
        (0..=samples).map(|i| i as f64 / samples as f64 * duration).map(|t| TrajectoryPoint { t, alpha: rate * t });
    Ok(CatGenResult {
        achieved_alpha: alpha,
        duration,
        fidelity_vs_ideal: Some(1.0),
        trajectory: trajectory.collect(),
        method: GenerationMethod::LdAnalytic,
        axis_phase: 0.0,
        state: Some(state),
        replay: None,
    })
}

/// Piecewise-constant all-orders growth model.
///
/// While √n ≤ α < √(n+1) the displacement grows at
/// (ηΩ/2)·e^{−η²/2}·L_n^1(η²)/(n+1), the all-orders sideband coupling
/// relative to its harmonic value √(n+1). Each piece is integrated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurve {
    ld_rate: f64,
    /// time at which α reaches √n
    times: Vec<f64>,
    /// growth rate on [√n, √(n+1))
    rates: Vec<f64>,
    saturated: bool,
}

impl GrowthCurve {
    /// Builds the curve until the rate stalls or α passes `alpha_limit`.
    pub fn new(eta: f64, rabi: f64, alpha_limit: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidArgument("Lamb-Dicke parameter must lie in (0, 1)"));
        }
        require_positive("Rabi frequency", rabi)?;
        let ld_rate = 0.5 * eta * rabi;
        let x = eta * eta;
        let damping = (-0.5 * x).exp();
        let threshold = STALL_FRACTION * ld_rate;
        let mut series = LaguerreSeries::new(1, x);
        let mut times = vec![0.0];
        let mut rates = Vec::new();
        let mut saturated = false;
        let mut n = 0usize;
        loop {
            if (n as f64).sqrt() > alpha_limit {
                break;
            }
            let rate = ld_rate * damping * series.next_value() / (n as f64 + 1.0);
            if rate < threshold {
                saturated = true;
                break;
            }
            let dt = (((n + 1) as f64).sqrt() - (n as f64).sqrt()) / rate;
            times.push(times[n] + dt);
            rates.push(rate);
            n += 1;
        }
        Ok(GrowthCurve { ld_rate, times, rates, saturated })
    }

    /// Whether the curve ended because the growth rate stalled.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Largest displacement covered by the curve.
    pub fn final_alpha(&self) -> f64 {
        ((self.times.len() - 1) as f64).sqrt()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn ld_rate(&self) -> f64 {
        self.ld_rate
    }

    /// Time to reach `alpha`, or `None` if the curve stops short of it.
    pub fn duration_to(&self, alpha: f64) -> Option<f64> {
        if alpha < 0.0 {
            return None;
        }
        let n = (alpha * alpha).floor() as usize;
        if n >= self.rates.len() {
            return (n == self.rates.len() && alpha == self.final_alpha()).then(|| self.final_time());
        }
        Some(self.times[n] + (alpha - (n as f64).sqrt()) / self.rates[n])
    }

    /// Displacement reached after time `t` (clamped at the end of the curve).
    pub fn alpha_at(&self, t: f64) -> f64 {
        let n = match self.times.iter().position(|&tn| tn > t) {
            Some(0) => return 0.0,
            Some(i) => i - 1,
            None => return self.final_alpha(),
        };
        (n as f64).sqrt() + (t - self.times[n]) * self.rates[n]
    }

    /// Breakpoints (t_n, √n).
    pub fn points(&self) -> impl Iterator<Item = TrajectoryPoint> + '_ {
        self.times.iter().enumerate().map(|(n, &t)| TrajectoryPoint { t, alpha: (n as f64).sqrt() })
    }
}

/// Growth-rate surrogate for the all-orders generation time.
pub fn generate_cat_growth_ode(spec: &CatGenSpec) -> Result<CatGenResult> {
    let limit = match spec.target {
        CatTarget::Alpha(a) => a,
        _ => f64::INFINITY,
    };
    let curve = GrowthCurve::new(spec.eta_control, spec.rabi, limit)?;
    let (alpha, duration) = match spec.target {
        CatTarget::Alpha(a) => match curve.duration_to(a) {
            Some(t) => (a, t),
            None => return Err(Error::StalledGeneration { alpha: curve.final_alpha(), target: a }),
        },
        CatTarget::Duration(t) => (curve.alpha_at(t), t),
        CatTarget::Saturation => (curve.final_alpha(), curve.final_time()),
    };
    let mut trajectory: Vec<TrajectoryPoint> = curve.points().take_while(|p| p.t < duration).collect();
    trajectory.push(TrajectoryPoint { t: duration, alpha });
    Ok(CatGenResult {
        achieved_alpha: alpha,
        duration,
        fidelity_vs_ideal: None,
        trajectory,
        method: GenerationMethod::GrowthOde,
        axis_phase: -FRAC_PI_2,
        state: None,
        replay: None,
    })
}

/// Propagates |g⟩|0⟩ under the bichromatic drive and reads α = √⟨n⟩ once per
/// trap period.
///
/// For [`CatTarget::Saturation`] the run stops once the running maximum of α
/// grows by less than `STALL_FRACTION·ηΩ/2` per unit time over a window of
/// `STALL_WINDOW_PERIODS` sideband periods; the state at the maximum is
/// returned. The same condition is an error for an [`CatTarget::Alpha`]
/// target that has not been reached.
pub fn generate_cat_full(spec: &CatGenSpec, path: FullDynamicsPath, config: PropagatorConfig) -> Result<CatGenResult> {
    let eta = spec.eta_control;
    if !(eta > 0.0) || spec.rabi == 0.0 {
        return Err(Error::InvalidArgument("full dynamics needs a non-zero drive and Lamb-Dicke parameter"));
    }
    match spec.target {
        CatTarget::Alpha(a) => spec.space.check_guard(a)?,
        CatTarget::Saturation => spec.space.check_guard(max_alpha(eta))?,
        CatTarget::Duration(_) => {}
    }
    let replay = Replay { path, rabi: spec.rabi, eta, trap_omega: spec.trap_omega, config };
    let hamiltonian = replay.hamiltonian(spec.space)?;
    let start = HybridState::ground(spec.space);
    let mut prop = Propagator::new(hamiltonian.as_ref(), &start, 0.0, config)?;

    let sample = 2.0 * PI / spec.trap_omega;
    let ld_rate = spec.ld_rate();
    let window = STALL_WINDOW_PERIODS * 2.0 * PI / (eta * spec.rabi);
    let window_samples = (window / sample).ceil() as usize;
    let stall_gain = STALL_FRACTION * ld_rate * window;

    let mut trajectory = vec![TrajectoryPoint { t: 0.0, alpha: 0.0 }];
    let mut running_max = vec![0.0f64];
    let mut best = (0.0f64, 0.0f64, start.clone());
    let mut previous = start.clone();
    let mut k = 0usize;
    let (final_state, alpha, duration) = loop {
        k += 1;
        let t = k as f64 * sample;
        let t_step = match spec.target {
            CatTarget::Duration(d) => t.min(d),
            _ => t,
        };
        prop.advance_to(t_step)?;
        let state = prop.state();
        let alpha = state.mean_number().sqrt();
        trajectory.push(TrajectoryPoint { t: t_step, alpha });
        let max_now = running_max.last().copied().unwrap_or(0.0).max(alpha);
        running_max.push(max_now);
        if alpha > best.0 {
            best = (alpha, t_step, state.clone());
        }
        match spec.target {
            CatTarget::Duration(d) if t_step >= d => break (state, alpha, d),
            CatTarget::Alpha(target) if alpha >= target => {
                // refine the crossing inside the last sample interval
                let prev = trajectory[trajectory.len() - 2];
                let frac = if alpha > prev.alpha { (target - prev.alpha) / (alpha - prev.alpha) } else { 1.0 };
                let t_cross = prev.t + frac.clamp(0.0, 1.0) * (t_step - prev.t);
                let mut refine = Propagator::new(hamiltonian.as_ref(), &previous, prev.t, config)?;
                refine.advance_to(t_cross)?;
                let state = refine.state();
                let alpha = state.mean_number().sqrt();
                trajectory.pop();
                trajectory.push(TrajectoryPoint { t: t_cross, alpha });
                break (state, alpha, t_cross);
            }
            _ => {}
        }
        if running_max.len() > window_samples {
            let gained = max_now - running_max[running_max.len() - 1 - window_samples];
            if gained < stall_gain {
                match spec.target {
                    CatTarget::Alpha(target) => {
                        return Err(Error::StalledGeneration { alpha: best.0, target });
                    }
                    _ => {
                        let (alpha, t, state) = best;
                        trajectory.retain(|p| p.t <= t);
                        break (state, alpha, t);
                    }
                }
            }
        }
        previous = state;
    };

    let axis_phase = branch_axis(&final_state);
    let ideal = ideal_cat(C64::from_polar(alpha, axis_phase), spec.space)?;
    let fidelity = ideal.fidelity(&final_state)?;
    Ok(CatGenResult {
        achieved_alpha: alpha,
        duration,
        fidelity_vs_ideal: Some(fidelity),
        trajectory,
        method: GenerationMethod::FullDynamics,
        axis_phase,
        state: Some(final_state),
        replay: Some(replay),
    })
}

/// Phase of ⟨a⟩ on the |+⟩ₓ branch; −π/2 (the bichromatic default) when undefined.
fn branch_axis(state: &HybridState) -> f64 {
    let x = state.to_basis(SpinBasis::X);
    let mean = crate::fock::mean_annihilation(x.component(0));
    if mean.norm() < 1e-9 {
        -FRAC_PI_2
    } else {
        mean.arg()
    }
}

/// √n* with n* the first degree at which L_n^1(η²) ≤ 0, where the sideband
/// coupling vanishes and the cat stops growing.
///
/// For η below 2·10⁻⁴ the Bessel asymptote √(j₁,₁²/(4η²) − 1) is used
/// instead of the scan.
pub fn max_alpha(eta: f64) -> f64 {
    let eta = eta.abs();
    if eta == 0.0 {
        return f64::INFINITY;
    }
    let asymptote = BESSEL_J1_FIRST_ZERO * BESSEL_J1_FIRST_ZERO / (4.0 * eta * eta) - 1.0;
    if eta < SCAN_MIN_ETA {
        return asymptote.sqrt();
    }
    let limit = (1.5 * asymptote) as usize + 16;
    match first_nonpositive_degree(eta * eta, limit) {
        Some(n) => (n as f64).sqrt(),
        None => asymptote.sqrt(),
    }
}

/// ⟨φ²⟩ = 8·R·α²·(2τ/3) for heating rate R in quanta/s.
pub fn heating_phase_variance(rate: f64, alpha: f64, duration: f64) -> Result<f64> {
    let r = require_non_negative("heating rate", rate)?;
    let a = require_non_negative("alpha", alpha)?;
    let t = require_non_negative("duration", duration)?;
    Ok(8.0 * r * a * a * (2.0 * t / 3.0))
}

/// Ramsey contrast C = exp(−⟨φ²⟩/2).
pub fn coherence_factor(phase_variance: f64) -> Result<f64> {
    Ok((-0.5 * require_non_negative("phase variance", phase_variance)?).exp())
}

/// How the generation time for a given displacement is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DurationModel {
    /// τ = 2α/(ηΩ), with α limited by [`max_alpha`].
    #[default]
    LambDickeCapped,
    /// τ from [`GrowthCurve`].
    GrowthOde,
}

/// Generation time for displacement `alpha` under `model`.
pub fn generation_duration(model: DurationModel, eta: f64, rabi: f64, alpha: f64) -> Result<f64> {
    require_non_negative("alpha", alpha)?;
    require_positive("Rabi frequency", rabi)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    require_positive("Lamb-Dicke parameter", eta)?;
    let cap = max_alpha(eta);
    if alpha > cap {
        return Err(Error::InfeasibleAlpha { alpha, max: cap });
    }
    match model {
        DurationModel::LambDickeCapped => Ok(2.0 * alpha / (eta * rabi)),
        DurationModel::GrowthOde => GrowthCurve::new(eta, rabi, alpha)?
            .duration_to(alpha)
            .ok_or(Error::StalledGeneration { alpha: cap, target: alpha }),
    }
}

/// L_n^1(η²)/(n+1): all-orders sideband coupling relative to the harmonic one.
pub fn relative_sideband_coupling(n: usize, eta: f64) -> f64 {
    (-0.5 * eta * eta).exp() * laguerre_assoc(n, 1, eta * eta) / (n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RABI: f64 = 2.0 * PI * 300e3;

    #[test]
    fn ld_examples() {
        let s = FockSpace::for_alpha(10.1);
        let spec = CatGenSpec::new(RABI, 0.09083, CatTarget::Duration(116.9e-6), s).unwrap();
        let r = generate_cat_ld(&spec).unwrap();
        assert!((r.achieved_alpha - 10.00).abs() < 0.02, "{}", r.achieved_alpha);
        assert_eq!(r.fidelity_vs_ideal, Some(1.0));

        let zero = CatGenSpec::new(RABI, 0.09083, CatTarget::Duration(0.0), FockSpace::new(16).unwrap()).unwrap();
        let r0 = generate_cat_ld(&zero).unwrap();
        assert_eq!(r0.achieved_alpha, 0.0);
        let g = HybridState::ground(FockSpace::new(16).unwrap());
        assert!((r0.state.unwrap().fidelity(&g).unwrap() - 1.0).abs() < 1e-12);

        let by_alpha = CatGenSpec::new(RABI, 0.05, CatTarget::Alpha(3.0), FockSpace::new(64).unwrap()).unwrap();
        let r = generate_cat_ld(&by_alpha).unwrap();
        assert!((r.duration - 2.0 * 3.0 / (0.05 * RABI)).abs() < 1e-18);
    }

    #[test]
    fn rabi_cap_is_enforced() {
        let s = FockSpace::new(16).unwrap();
        let err = CatGenSpec::new(2.0 * RABI, 0.05, CatTarget::Alpha(1.0), s).unwrap_err();
        assert!(err.is_infeasible());
        assert!(CatGenSpec::with_rabi_cap(2.0 * RABI, 0.05, CatTarget::Alpha(1.0), s, 3.0 * RABI).is_ok());
    }

    #[test]
    fn max_alpha_examples() {
        // n* = 444 for η = 0.09083 (recurrence scan)
        let m = max_alpha(0.09083);
        assert!((m - 444f64.sqrt()).abs() < 1e-12, "{m}");
        assert!(max_alpha(0.09083 / 2.0) > m);
        let asymptotic = BESSEL_J1_FIRST_ZERO / (2.0 * 0.09083);
        assert!((m - asymptotic).abs() / asymptotic < 0.02);
        assert!((max_alpha(1e-5) - BESSEL_J1_FIRST_ZERO / 2e-5).abs() / max_alpha(1e-5) < 1e-6);
    }

    #[test]
    fn heating_examples() {
        assert_eq!(heating_phase_variance(0.0, 10.0, 1.0).unwrap(), 0.0);
        let v = heating_phase_variance(0.1, 10.0, 118e-6).unwrap();
        assert!((v - 6.29e-3).abs() < 1e-5);
        let big = heating_phase_variance(10.0, 20.0, 1e-3).unwrap();
        assert!((big - 21.33).abs() < 0.01);
        assert_eq!(coherence_factor(0.0).unwrap(), 1.0);
        assert!((coherence_factor(6.29e-3).unwrap() - 0.996_859).abs() < 1e-6);
        assert!((coherence_factor(21.33).unwrap() - 2.33e-5).abs() < 1e-7);
        assert!(heating_phase_variance(-1.0, 1.0, 1.0).is_err());
        assert!(coherence_factor(-1.0).is_err());
    }

    #[test]
    fn growth_curve_limits() {
        let eta = 1e-4;
        let curve = GrowthCurve::new(eta, RABI, 1.0).unwrap();
        let slope = curve.alpha_at(1e-6) / 1e-6;
        assert!((slope / (0.5 * eta * RABI) - 1.0).abs() < 5e-3);
        let t = curve.duration_to(1.0).unwrap();
        assert!((t * 0.5 * eta * RABI - 1.0).abs() < 5e-3);
        for a in [0.3, 0.9, 1.0] {
            let t = curve.duration_to(a).unwrap();
            assert!((curve.alpha_at(t) - a).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_ode_saturates_near_the_cap() {
        let s = FockSpace::new(700).unwrap();
        let spec = CatGenSpec::new(RABI, 0.09083, CatTarget::Saturation, s).unwrap();
        let r = generate_cat_growth_ode(&spec).unwrap();
        assert!(r.achieved_alpha <= max_alpha(0.09083) + 1e-12);
        assert!(r.achieved_alpha > 20.5);
        let stalled = CatGenSpec::new(RABI, 0.09083, CatTarget::Alpha(25.0), s).unwrap();
        assert!(matches!(generate_cat_growth_ode(&stalled), Err(Error::StalledGeneration { .. })));
    }

    #[test]
    fn duration_models_agree_in_deep_lamb_dicke() {
        let ld = generation_duration(DurationModel::LambDickeCapped, 0.005, RABI, 1.0).unwrap();
        let ode = generation_duration(DurationModel::GrowthOde, 0.005, RABI, 1.0).unwrap();
        assert!((ode / ld - 1.0).abs() < 1e-3);
        assert!(matches!(
            generation_duration(DurationModel::LambDickeCapped, 0.09083, RABI, 22.0),
            Err(Error::InfeasibleAlpha { .. })
        ));
    }

    #[test]
    fn rwa_full_dynamics_keeps_x_populations() {
        let s = FockSpace::new(64).unwrap();
        let spec = CatGenSpec::new(RABI, 0.05, CatTarget::Alpha(3.0), s).unwrap();
        let r = generate_cat_full(&spec, FullDynamicsPath::Rwa, PropagatorConfig::default()).unwrap();
        let pops = r.state.as_ref().unwrap().x_populations();
        assert!((pops[0] - 0.5).abs() < 1e-6 && (pops[1] - 0.5).abs() < 1e-6);
        assert!((r.achieved_alpha - 3.0).abs() < 1e-3);
        assert!((r.axis_phase + FRAC_PI_2).abs() < 1e-6);
        assert!(r.fidelity_vs_ideal.unwrap() > 0.999);
    }
}
