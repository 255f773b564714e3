//! Hamiltonians for a two-level logic ion coupled to one motional mode, and
//! their time propagation.
//!
//! Every Hamiltonian acts on amplitudes ordered spin-major in the |g⟩/|e⟩
//! basis (index `s·N + n`, `s = 0` for |g⟩) and returns `H/ħ` in rad/s.

mod propagator;
mod tableau;

pub use propagator::{propagate, propagate_with_report, PropagationReport, Propagator, PropagatorConfig};

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{require_non_negative, Error, Result};
use crate::fock::{nonlinear_ladder, FockSpace, Ladder};
use crate::linalg::{CMatrix, C64, ZERO};

/// One laser tone driving the logic-ion transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveTone {
    rabi: f64,
    detuning: f64,
    phase: f64,
}

impl DriveTone {
    /// `rabi` Ω and `detuning` Δ = ω_l − ω_a in rad/s, `phase` in rad.
    pub fn new(rabi: f64, detuning: f64, phase: f64) -> Result<Self> {
        require_non_negative("Rabi frequency", rabi)?;
        if !detuning.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidArgument("tone detuning and phase must be finite"));
        }
        Ok(DriveTone { rabi, detuning, phase })
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Blue and red sideband tones (Δ = ±ω_t) whose rotating-wave limit is
/// (ηΩ/2)·σₓ⊗(a + a†).
pub fn bichromatic_tones(rabi: f64, trap_omega: f64) -> Result<[DriveTone; 2]> {
    Ok([DriveTone::new(rabi, trap_omega, FRAC_PI_2)?, DriveTone::new(rabi, -trap_omega, FRAC_PI_2)?])
}

/// A Hamiltonian `H(t)/ħ` on spin ⊗ Fock amplitudes.
pub trait Hamiltonian {
    /// Fock dimension N (the full vector has length 2N).
    fn fock_dim(&self) -> usize;

    /// out = (H(t)/ħ)·psi
    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]);

    /// Fastest explicit oscillation frequency in rad/s, if time dependent.
    fn max_frequency(&self) -> Option<f64> {
        None
    }

    /// Dense matrix of H(t)/ħ, built column by column from [`Hamiltonian::apply`].
    fn matrix(&self, t: f64) -> CMatrix {
        let n = 2 * self.fock_dim();
        let mut out = CMatrix::zeros(n, n);
        let mut e = alloc::vec![ZERO; n];
        let mut col = alloc::vec![ZERO; n];
        for c in 0..n {
            e[c] = C64::new(1.0, 0.0);
            self.apply(t, &e, &mut col);
            for (r, v) in col.iter().enumerate() {
                out[(r, c)] = *v;
            }
            e[c] = ZERO;
        }
        out
    }
}

/// Interaction-picture drive with linearized recoil coupling:
///
/// H/ħ = Σ_tones (Ω/2)·[e^{−i(Δt+φ)}·σ₊(1 + iηQ(t)) + h.c.],
/// Q(t) = L·e^{−iω_t t} + L†·e^{iω_t t}
///
/// where L is either the harmonic `a` or the all-orders ladder 𝒜.
#[derive(Debug, Clone)]
pub struct DrivenSideband {
    tones: Vec<DriveTone>,
    eta: f64,
    trap_omega: f64,
    ladder: Ladder,
}

impl DrivenSideband {
    pub fn new(tones: &[DriveTone], eta: f64, trap_omega: f64, ladder: Ladder) -> Result<Self> {
        require_non_negative("trap frequency", trap_omega)?;
        if !eta.is_finite() {
            return Err(Error::InvalidArgument("Lamb-Dicke parameter must be finite"));
        }
        Ok(DrivenSideband { tones: tones.to_vec(), eta, trap_omega, ladder })
    }

    pub fn tones(&self) -> &[DriveTone] {
        &self.tones
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    fn drive(&self, t: f64) -> C64 {
        self.tones.iter().map(|tone| C64::from_polar(0.5 * tone.rabi, -(tone.detuning * t + tone.phase))).sum()
    }
}

impl Hamiltonian for DrivenSideband {
    fn fock_dim(&self) -> usize {
        self.ladder.dim()
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let n = self.fock_dim();
        let s = self.drive(t);
        let (g, e) = psi.split_at(n);
        let (out_g, out_e) = out.split_at_mut(n);
        let down = C64::from_polar(self.eta, -self.trap_omega * t);
        let up = C64::from_polar(self.eta, self.trap_omega * t);
        let band = self.ladder.band();
        // iηQ·v at index m: iη(e^{−iωt}·band[m]·v[m+1] + e^{iωt}·band[m−1]·v[m−1])
        let coupled = |v: &[C64], m: usize| -> C64 {
            let mut q = ZERO;
            if m + 1 < n {
                q += down * v[m + 1] * band[m];
            }
            if m > 0 {
                q += up * v[m - 1] * band[m - 1];
            }
            q
        };
        let s_conj = s.conj();
        for m in 0..n {
            let qg = coupled(g, m);
            let qe = coupled(e, m);
            // σ₊ ⊗ S(1 + iηQ) maps the |g⟩ block into |e⟩; the adjoint does the reverse.
            out_e[m] = s * (g[m] + C64::new(-qg.im, qg.re));
            out_g[m] = s_conj * (e[m] - C64::new(-qe.im, qe.re));
        }
    }

    fn max_frequency(&self) -> Option<f64> {
        let mut w = self.tones.iter().map(|t| t.detuning.abs()).fold(0.0, f64::max);
        if self.eta != 0.0 {
            w += self.trap_omega;
        }
        (w > 0.0).then_some(w)
    }
}

/// Time-independent spin-dependent force g·σₓ⊗(q·L† + q*·L).
#[derive(Debug, Clone)]
pub struct SpinDependentForce {
    strength: f64,
    quadrature: C64,
    ladder: Ladder,
}

impl SpinDependentForce {
    /// `quadrature` must have unit modulus; `1` gives L + L†.
    pub fn new(strength: f64, quadrature: C64, ladder: Ladder) -> Result<Self> {
        if !strength.is_finite() {
            return Err(Error::InvalidArgument("force strength must be finite"));
        }
        if (quadrature.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("quadrature must be a unit phase"));
        }
        Ok(SpinDependentForce { strength, quadrature, ladder })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    /// out = g·(q·L† + q*·L)·v
    fn apply_motional(&self, v: &[C64], out: &mut [C64]) {
        let n = self.ladder.dim();
        let band = self.ladder.band();
        let up = self.quadrature * self.strength;
        let down = self.quadrature.conj() * self.strength;
        for m in 0..n {
            let mut acc = ZERO;
            if m + 1 < n {
                acc += down * v[m + 1] * band[m];
            }
            if m > 0 {
                acc += up * v[m - 1] * band[m - 1];
            }
            out[m] = acc;
        }
    }
}

impl Hamiltonian for SpinDependentForce {
    fn fock_dim(&self) -> usize {
        self.ladder.dim()
    }

    fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
        let n = self.fock_dim();
        let (g, e) = psi.split_at(n);
        let (out_g, out_e) = out.split_at_mut(n);
        // σₓ swaps the spin blocks
        self.apply_motional(e, out_g);
        self.apply_motional(g, out_e);
    }
}

/// A fixed dense matrix (mainly for tests and cross-checks).
#[derive(Debug, Clone)]
pub struct ConstantHamiltonian {
    matrix: CMatrix,
}

impl ConstantHamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) {
            return Err(Error::InvalidArgument("matrix must be square with even dimension"));
        }
        Ok(ConstantHamiltonian { matrix })
    }
}

impl Hamiltonian for ConstantHamiltonian {
    fn fock_dim(&self) -> usize {
        self.matrix.rows() / 2
    }

    fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.matrix.row(r).iter().zip(psi).map(|(a, b)| a * b).sum();
        }
    }

    fn matrix(&self, _t: f64) -> CMatrix {
        self.matrix.clone()
    }
}

/// Lamb-Dicke-expanded drive with the harmonic ladder.
pub fn hamiltonian_ld(tones: &[DriveTone], eta: f64, trap_omega: f64, space: FockSpace) -> Result<DrivenSideband> {
    DrivenSideband::new(tones, eta, trap_omega, Ladder::linear(space))
}

/// Same drive with a → 𝒜, the all-orders ladder. η = 0 gives the carrier-only drive.
pub fn hamiltonian_all_orders(
    tones: &[DriveTone],
    eta: f64,
    trap_omega: f64,
    space: FockSpace,
) -> Result<DrivenSideband> {
    let ladder = if eta == 0.0 { Ladder::linear(space) } else { nonlinear_ladder(eta.abs(), space)? };
    DrivenSideband::new(tones, eta, trap_omega, ladder)
}

/// Rotating-wave bichromatic Hamiltonian (ηΩ/2)·σₓ⊗(a + a†).
pub fn hamiltonian_bichromatic_rwa(rabi: f64, eta: f64, space: FockSpace) -> Result<SpinDependentForce> {
    require_non_negative("Rabi frequency", rabi)?;
    SpinDependentForce::new(0.5 * eta * rabi, C64::new(1.0, 0.0), Ladder::linear(space))
}

/// Rotating-wave bichromatic Hamiltonian with the all-orders ladder, (ηΩ/2)·σₓ⊗(𝒜 + 𝒜†).
pub fn hamiltonian_bichromatic_rwa_all_orders(rabi: f64, eta: f64, space: FockSpace) -> Result<SpinDependentForce> {
    require_non_negative("Rabi frequency", rabi)?;
    SpinDependentForce::new(0.5 * eta * rabi, C64::new(1.0, 0.0), nonlinear_ladder(eta, space)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, HybridState, MotionalState, SpinBasis};
    use crate::linalg::ONE;
    use core::f64::consts::PI;

    const TRAP: f64 = 2.0 * PI * 500e3;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn banded_apply_matches_dense_construction() {
        let s = space(12);
        let tones = bichromatic_tones(2.0 * PI * 300e3, TRAP).unwrap();
        let h = hamiltonian_all_orders(&tones, 0.09, TRAP, s).unwrap();
        let t = 0.37e-6;
        let dense = h.matrix(t);
        // Hermitian
        assert!(dense.sub(&dense.adjoint()).max_abs() < 1e-9);
        // explicit dense build of the same operator
        let drive = h.drive(t);
        let a = h.ladder().lowering_dense();
        let q = a.scale(C64::from_polar(1.0, -TRAP * t)).add(&a.adjoint().scale(C64::from_polar(1.0, TRAP * t)));
        let block = CMatrix::identity(12).add(&q.scale(C64::new(0.0, 0.09))).scale(drive);
        let mut expected = CMatrix::zeros(24, 24);
        for r in 0..12 {
            for c in 0..12 {
                expected[(12 + r, c)] = block[(r, c)];
                expected[(c, 12 + r)] = block[(r, c)].conj();
            }
        }
        assert!(dense.sub(&expected).max_abs() < 1e-12 * dense.max_abs());
    }

    #[test]
    fn zero_hamiltonian_leaves_state_unchanged() {
        let s = space(16);
        let h = hamiltonian_bichromatic_rwa(2.0 * PI * 300e3, 0.0, s).unwrap();
        let psi = HybridState::product(
            SpinBasis::Z,
            [C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            &coherent_state(C64::new(0.3, 0.2), s).unwrap(),
        );
        let out = propagate(&h, &psi, 0.0, 1e-4, PropagatorConfig::default()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn carrier_rabi_flopping() {
        let s = space(4);
        let rabi = 2.0 * PI * 100e3;
        let h = hamiltonian_ld(&[DriveTone::new(rabi, 0.0, 0.0).unwrap()], 0.0, TRAP, s).unwrap();
        let ground = HybridState::ground(s);
        let mut p = Propagator::new(&h, &ground, 0.0, PropagatorConfig::default()).unwrap();
        for i in 1..=20 {
            let t = i as f64 * 0.5e-6;
            p.advance_to(t).unwrap();
            let pe = p.state().z_populations()[1];
            assert!((pe - (0.5 * rabi * t).sin().powi(2)).abs() < 1e-8, "t={t}");
        }
        // π pulse
        let out = propagate(&h, &ground, 0.0, PI / rabi, PropagatorConfig::default()).unwrap();
        assert!((out.z_populations()[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn symmetric_tones_without_recoil_barely_excite() {
        let s = space(4);
        let rabi = 2.0 * PI * 50e3;
        let tones = bichromatic_tones(rabi, TRAP).unwrap();
        let h = hamiltonian_ld(&tones, 0.0, TRAP, s).unwrap();
        let mut p = Propagator::new(&h, &HybridState::ground(s), 0.0, PropagatorConfig::default()).unwrap();
        let bound = (rabi / TRAP).powi(2);
        for i in 1..=200 {
            p.advance_to(i as f64 * 0.13e-6).unwrap();
            assert!(p.state().z_populations()[1] < bound);
        }
    }

    #[test]
    fn forward_backward_reversibility() {
        let s = space(40);
        let tones = bichromatic_tones(2.0 * PI * 300e3, TRAP).unwrap();
        let h = hamiltonian_all_orders(&tones, 0.09, TRAP, s).unwrap();
        let start = HybridState::ground(s);
        let t1 = 20e-6;
        let there = propagate(&h, &start, 0.0, t1, PropagatorConfig::default()).unwrap();
        let back = propagate(&h, &there, t1, 0.0, PropagatorConfig::default()).unwrap();
        assert!(back.fidelity(&start).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn bichromatic_rwa_makes_coherent_branches() {
        let s = space(128);
        let rabi = 2.0 * PI * 300e3;
        let eta = 0.05;
        let h = hamiltonian_bichromatic_rwa(rabi, eta, s).unwrap();
        let t = 150e-6;
        let plus = HybridState::product(SpinBasis::X, [ONE, ZERO], &MotionalState::vacuum(s));
        let out = propagate(&h, &plus, 0.0, t, PropagatorConfig::default()).unwrap().to_basis(SpinBasis::X);
        let alpha = C64::new(0.0, -0.5 * eta * rabi * t);
        let expected = coherent_state(alpha, s).unwrap();
        let overlap = crate::linalg::inner(expected.amplitudes(), out.component(0));
        assert!((overlap.norm() - 1.0).abs() < 1e-8, "{overlap}");
        assert!((out.x_populations()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_length_and_backward_runs_are_allowed() {
        let s = space(4);
        let h = hamiltonian_bichromatic_rwa(1e5, 0.1, s).unwrap();
        let g = HybridState::ground(s);
        assert_eq!(propagate(&h, &g, 1e-6, 1e-6, PropagatorConfig::default()).unwrap(), g);
        assert!(propagate(&h, &g, 1e-6, 0.0, PropagatorConfig::default()).is_ok());
    }

    #[test]
    fn tail_overflow_is_reported() {
        let s = space(10);
        let h = hamiltonian_bichromatic_rwa(2.0 * PI * 300e3, 0.09, s).unwrap();
        let err = propagate(&h, &HybridState::ground(s), 0.0, 200e-6, PropagatorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TruncationOverflow { .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn step_cap_follows_fastest_oscillation() {
        let s = space(8);
        let tones = bichromatic_tones(1e5, TRAP).unwrap();
        let h = hamiltonian_ld(&tones, 0.05, TRAP, s).unwrap();
        let p = Propagator::new(&h, &HybridState::ground(s), 0.0, PropagatorConfig::default()).unwrap();
        assert!(p.step_cap() <= 2.0 * PI / TRAP / 50.0);
    }
}
