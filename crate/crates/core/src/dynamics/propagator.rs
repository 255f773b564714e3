//! Adaptive DOP853 integration of i∂ψ/∂t = (H/ħ)ψ.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::tableau::{A, B, C, E3, E5, STAGES};
use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::fock::{tail_population, HybridState, SpinBasis, DEFAULT_TAIL_THRESHOLD};
use crate::linalg::{norm_sqr, C64, I};
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const STEPS_PER_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Upper bound on the step, in seconds. The Hamiltonian's own oscillation
    /// cap (a fiftieth of its fastest period) is applied on top of this.
    pub max_step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Allowed |‖ψ(t)‖ − ‖ψ(t0)‖|.
    pub norm_drift_limit: f64,
    /// Tail population (top eighth of either spin component) that aborts the run.
    pub tail_threshold: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            max_step: f64::INFINITY,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            norm_drift_limit: 1e-9,
            tail_threshold: DEFAULT_TAIL_THRESHOLD,
        }
    }
}

impl PropagatorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.max_step > 0.0) {
            return Err(Error::NonPositive { what: "max_step", value: self.max_step });
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive"));
        }
        if !(self.norm_drift_limit > 0.0) || !(self.tail_threshold > 0.0) {
            return Err(Error::InvalidArgument("drift and tail limits must be positive"));
        }
        Ok(())
    }
}

/// Diagnostics of a finished (or ongoing) propagation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropagationReport {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Sum of the per-step local error estimates (in units of the state norm).
    pub error_estimate: f64,
    /// Final ‖ψ‖ − initial ‖ψ‖.
    pub norm_drift: f64,
    pub max_tail: f64,
}

/// Stateful integrator that can be advanced in segments, keeping its step size.
pub struct Propagator<'h, H: Hamiltonian + ?Sized> {
    hamiltonian: &'h H,
    config: PropagatorConfig,
    basis_dim: usize,
    t: f64,
    psi: Vec<C64>,
    initial_norm: f64,
    step: Option<f64>,
    step_cap: f64,
    report: PropagationReport,
    stages: Vec<Vec<C64>>,
    scratch: Vec<C64>,
    candidate: Vec<C64>,
}

impl<'h, H: Hamiltonian + ?Sized> Propagator<'h, H> {
    pub fn new(hamiltonian: &'h H, state: &HybridState, t0: f64, config: PropagatorConfig) -> Result<Self> {
        config.validate()?;
        if state.fock_dim() != hamiltonian.fock_dim() {
            return Err(Error::DimensionMismatch { expected: hamiltonian.fock_dim(), found: state.fock_dim() });
        }
        let psi = state.to_basis(SpinBasis::Z).into_amplitudes();
        let n = psi.len();
        let step_cap = match hamiltonian.max_frequency() {
            Some(w) if w > 0.0 => config.max_step.min(2.0 * PI / w / STEPS_PER_PERIOD),
            _ => config.max_step,
        };
        let initial_norm = norm_sqr(&psi).sqrt();
        Ok(Propagator {
            hamiltonian,
            config,
            basis_dim: state.fock_dim(),
            t: t0,
            psi,
            initial_norm,
            step: None,
            step_cap,
            report: PropagationReport::default(),
            stages: vec![vec![C64::new(0.0, 0.0); n]; STAGES],
            scratch: vec![C64::new(0.0, 0.0); n],
            candidate: vec![C64::new(0.0, 0.0); n],
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn report(&self) -> PropagationReport {
        self.report
    }

    /// Current state, in the |g⟩/|e⟩ basis.
    pub fn state(&self) -> HybridState {
        HybridState::from_amplitudes(SpinBasis::Z, self.basis_dim, self.psi.clone()).expect("consistent length")
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.psi
    }

    /// Step cap in force (seconds).
    pub fn step_cap(&self) -> f64 {
        self.step_cap
    }

    /// Integrates from the current time to `t1`, forward or backward.
    pub fn advance_to(&mut self, t1: f64) -> Result<()> {
        if t1 == self.t {
            return Ok(());
        }
        let direction = if t1 > self.t { 1.0 } else { -1.0 };
        let mut h = match self.step {
            Some(h) => h.abs().min(self.step_cap),
            None => self.initial_step(),
        };
        loop {
            let remaining = (t1 - self.t).abs();
            if remaining <= 1e-15 * self.t.abs().max(t1.abs()) {
                self.t = t1;
                return Ok(());
            }
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            let err = self.trial_step(direction * h_try);
            if !err.is_finite() {
                h *= MIN_FACTOR;
                self.report.rejected_steps += 1;
            } else if err <= 1.0 {
                self.t = if last { t1 } else { self.t + direction * h_try };
                core::mem::swap(&mut self.psi, &mut self.candidate);
                self.report.accepted_steps += 1;
                self.report.error_estimate += err * self.config.rel_tol;
                self.check_invariants()?;
                let factor =
                    if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR) };
                // a truncated final step says nothing about the natural step size
                if !last || h_try == h {
                    h = (h_try * factor).min(self.step_cap);
                }
                self.step = Some(h);
            } else {
                let factor = (SAFETY * err.powf(-1.0 / 8.0)).max(MIN_FACTOR);
                h = h_try * factor;
                self.report.rejected_steps += 1;
            }
            if h < 1e-14 * self.t.abs().max(1e-30) || h < f64::MIN_POSITIVE {
                return Err(Error::StepSizeUnderflow { t: self.t });
            }
        }
    }

    fn check_invariants(&mut self) -> Result<()> {
        let norm = norm_sqr(&self.psi).sqrt();
        let drift = norm - self.initial_norm;
        self.report.norm_drift = drift;
        if drift.abs() > self.config.norm_drift_limit {
            return Err(Error::NormDrift { drift, limit: self.config.norm_drift_limit });
        }
        let n = self.basis_dim;
        let tail = tail_population(&self.psi[..n]).max(tail_population(&self.psi[n..]));
        self.report.max_tail = self.report.max_tail.max(tail);
        if tail > self.config.tail_threshold {
            return Err(Error::TruncationOverflow { tail, threshold: self.config.tail_threshold });
        }
        Ok(())
    }

    /// Heuristic first step from the size of Hψ.
    fn initial_step(&mut self) -> f64 {
        self.hamiltonian.apply(self.t, &self.psi, &mut self.scratch);
        let rate = norm_sqr(&self.scratch).sqrt() / self.initial_norm.max(1e-300);
        let guess = if rate > 0.0 { 0.01 / rate } else { self.step_cap.min(1e-6) };
        guess.min(self.step_cap)
    }

    /// Writes the 8th-order solution into `candidate` and returns the scaled error norm.
    fn trial_step(&mut self, h: f64) -> f64 {
        let minus_i = -I;
        let n = self.psi.len();
        for s in 0..STAGES {
            self.scratch.copy_from_slice(&self.psi);
            for (j, &a) in A[s][..s].iter().enumerate() {
                if a != 0.0 {
                    let ha = h * a;
                    for (x, k) in self.scratch.iter_mut().zip(&self.stages[j]) {
                        *x += k * ha;
                    }
                }
            }
            let k = &mut self.stages[s];
            self.hamiltonian.apply(self.t + C[s] * h, &self.scratch, k);
            for z in k.iter_mut() {
                *z *= minus_i;
            }
        }
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..n {
            let mut sum = C64::new(0.0, 0.0);
            let mut e5 = C64::new(0.0, 0.0);
            let mut e3 = C64::new(0.0, 0.0);
            for s in 0..STAGES {
                let k = self.stages[s][i];
                sum += k * B[s];
                e5 += k * E5[s];
                e3 += k * E3[s];
            }
            let y_new = self.psi[i] + sum * h;
            self.candidate[i] = y_new;
            let scale = self.config.abs_tol + self.psi[i].norm().max(y_new.norm()) * self.config.rel_tol;
            err5 += (e5 / scale).norm_sqr();
            err3 += (e3 / scale).norm_sqr();
        }
        if err5 == 0.0 && err3 == 0.0 {
            return 0.0;
        }
        let denom = err5 + 0.01 * err3;
        h.abs() * err5 / (denom * n as f64).sqrt()
    }
}

/// Propagates `state` from `t0` to `t1` (either direction).
pub fn propagate<H: Hamiltonian + ?Sized>(
    hamiltonian: &H,
    state: &HybridState,
    t0: f64,
    t1: f64,
    config: PropagatorConfig,
) -> Result<HybridState> {
    Ok(propagate_with_report(hamiltonian, state, t0, t1, config)?.0)
}

/// [`propagate`] plus step statistics, error estimate and norm drift.
pub fn propagate_with_report<H: Hamiltonian + ?Sized>(
    hamiltonian: &H,
    state: &HybridState,
    t0: f64,
    t1: f64,
    config: PropagatorConfig,
) -> Result<(HybridState, PropagationReport)> {
    let mut p = Propagator::new(hamiltonian, state, t0, config)?;
    p.advance_to(t1)?;
    Ok((p.state().to_basis(state.basis()), p.report()))
}
