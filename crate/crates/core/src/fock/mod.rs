//! Truncated Fock space: states, ladder and displacement operators, and the
//! all-orders sideband ladder.

mod laguerre;

pub use laguerre::{first_nonpositive_degree, laguerre_assoc, LaguerreSeries};

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, CMatrix, C64, ONE, ZERO};

/// Default tail-population threshold marking a state as truncation-valid.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-8;

/// Basis |0⟩ … |N−1⟩ of a harmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("Fock space dimension must be at least 2"));
        }
        Ok(FockSpace { dim })
    }

    /// Smallest space passing the truncation guard for `|alpha|`.
    pub fn for_alpha(alpha: f64) -> Self {
        FockSpace { dim: required_dim(alpha).max(2) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First index of the top eighth of the basis used for tail checks.
    pub fn tail_start(&self) -> usize {
        self.dim - self.dim.div_ceil(8)
    }

    /// Largest n such that a displacement by `|alpha|` of any |m⟩, m < n,
    /// still passes the truncation guard. Operator identities are compared
    /// on this leading block.
    pub fn interior_for(&self, alpha: f64) -> usize {
        let a = alpha.abs();
        let mut n = 0;
        while n < self.dim {
            let reach = (n as f64).sqrt() + a;
            if reach * reach + 6.0 * reach + 9.0 > self.dim as f64 {
                break;
            }
            n += 1;
        }
        n
    }

    /// Errors unless N ≥ |α|² + 6|α| + 9.
    pub fn check_guard(&self, alpha: f64) -> Result<()> {
        let required = required_dim(alpha);
        if self.dim < required {
            return Err(Error::TruncationGuard { alpha: alpha.abs(), dim: self.dim, required });
        }
        Ok(())
    }
}

/// ⌈|α|² + 6|α| + 9⌉, the Poisson mean plus six standard deviations.
pub fn required_dim(alpha: f64) -> usize {
    let a = alpha.abs();
    (a * a + 6.0 * a + 9.0).ceil() as usize
}

/// Pure state of the motional mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalState {
    amps: Vec<C64>,
}

impl MotionalState {
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidArgument("motional state needs at least two amplitudes"));
        }
        Ok(MotionalState { amps })
    }

    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::InvalidArgument("Fock index outside the truncated space"));
        }
        let mut amps = vec![ZERO; space.dim()];
        amps[n] = ONE;
        Ok(MotionalState { amps })
    }

    pub fn vacuum(space: FockSpace) -> Self {
        let mut amps = vec![ZERO; space.dim()];
        amps[0] = ONE;
        MotionalState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    pub fn mean_number(&self) -> f64 {
        mean_number(&self.amps)
    }

    /// ⟨a⟩
    pub fn mean_annihilation(&self) -> C64 {
        mean_annihilation(&self.amps)
    }

    pub fn tail_population(&self) -> f64 {
        tail_population(&self.amps)
    }

    pub fn overlap(&self, other: &MotionalState) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn apply(&self, op: &CMatrix) -> MotionalState {
        MotionalState { amps: op.matvec(&self.amps) }
    }
}

pub(crate) fn mean_number(amps: &[C64]) -> f64 {
    amps.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum()
}

pub(crate) fn mean_annihilation(amps: &[C64]) -> C64 {
    amps.windows(2).enumerate().map(|(n, w)| w[0].conj() * w[1] * ((n + 1) as f64).sqrt()).sum()
}

pub(crate) fn tail_population(amps: &[C64]) -> f64 {
    let start = amps.len() - amps.len().div_ceil(8);
    norm_sqr(&amps[start..])
}

/// Spin basis of a [`HybridState`]: {|g⟩, |e⟩} or {|+⟩ₓ, |−⟩ₓ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinBasis {
    Z,
    X,
}

/// Logic-ion spin ⊗ motional mode, amplitudes ordered spin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    basis: SpinBasis,
    fock_dim: usize,
    amps: Vec<C64>,
}

impl HybridState {
    pub fn from_amplitudes(basis: SpinBasis, fock_dim: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 2 * fock_dim {
            return Err(Error::DimensionMismatch { expected: 2 * fock_dim, found: amps.len() });
        }
        Ok(HybridState { basis, fock_dim, amps })
    }

    /// `first ⊕ second` as the two spin components of `basis`.
    pub fn from_components(basis: SpinBasis, first: &[C64], second: &[C64]) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), found: second.len() });
        }
        let mut amps = Vec::with_capacity(2 * first.len());
        amps.extend_from_slice(first);
        amps.extend_from_slice(second);
        Ok(HybridState { basis, fock_dim: first.len(), amps })
    }

    /// spin ⊗ motion for a spin state given in `basis`.
    pub fn product(basis: SpinBasis, spin: [C64; 2], motion: &MotionalState) -> Self {
        let first: Vec<C64> = motion.amplitudes().iter().map(|z| spin[0] * z).collect();
        let second: Vec<C64> = motion.amplitudes().iter().map(|z| spin[1] * z).collect();
        HybridState::from_components(basis, &first, &second).expect("equal lengths")
    }

    /// |g⟩ ⊗ |0⟩
    pub fn ground(space: FockSpace) -> Self {
        HybridState::product(SpinBasis::Z, [ONE, ZERO], &MotionalState::vacuum(space))
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// Motional amplitudes attached to spin basis state `index` (unnormalized).
    pub fn component(&self, index: usize) -> &[C64] {
        &self.amps[index * self.fock_dim..(index + 1) * self.fock_dim]
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Same state expressed in `basis`.
    pub fn to_basis(&self, basis: SpinBasis) -> HybridState {
        if basis == self.basis {
            return self.clone();
        }
        // Both directions use the Hadamard: |±⟩ = (|g⟩ ± |e⟩)/√2.
        let (a, b) = (self.component(0), self.component(1));
        let first: Vec<C64> = a.iter().zip(b).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
        let second: Vec<C64> = a.iter().zip(b).map(|(x, y)| (x - y) * FRAC_1_SQRT_2).collect();
        HybridState { basis, fock_dim: self.fock_dim, amps: [first, second].concat() }
    }

    pub fn overlap(&self, other: &HybridState) -> Result<C64> {
        if self.fock_dim != other.fock_dim {
            return Err(Error::DimensionMismatch { expected: self.fock_dim, found: other.fock_dim });
        }
        let other = other.to_basis(self.basis);
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn fidelity(&self, other: &HybridState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Adds `other` (same basis required) scaled by `weight`.
    pub fn add_scaled(&mut self, other: &HybridState, weight: C64) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        if self.fock_dim != other.fock_dim {
            return Err(Error::DimensionMismatch { expected: self.fock_dim, found: other.fock_dim });
        }
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += weight * b;
        }
        Ok(())
    }

    /// 2×2 reduced spin density matrix in the state's own basis.
    pub fn spin_density(&self) -> [[C64; 2]; 2] {
        let (a, b) = (self.component(0), self.component(1));
        [[inner(a, a), inner(b, a)], [inner(a, b), inner(b, b)]]
    }

    /// Populations of (|g⟩, |e⟩).
    pub fn z_populations(&self) -> [f64; 2] {
        let z = self.to_basis(SpinBasis::Z);
        [norm_sqr(z.component(0)), norm_sqr(z.component(1))]
    }

    /// Populations of (|+⟩ₓ, |−⟩ₓ).
    pub fn x_populations(&self) -> [f64; 2] {
        let x = self.to_basis(SpinBasis::X);
        [norm_sqr(x.component(0)), norm_sqr(x.component(1))]
    }

    /// ⟨+|ρ_spin|−⟩ in the x basis.
    pub fn x_coherence(&self) -> C64 {
        let x = self.to_basis(SpinBasis::X);
        inner(x.component(1), x.component(0))
    }

    pub fn mean_number(&self) -> f64 {
        mean_number(self.component(0)) + mean_number(self.component(1))
    }

    /// Largest tail population of the two spin components.
    pub fn tail_population(&self) -> f64 {
        tail_population(self.component(0)).max(tail_population(self.component(1)))
    }

    /// Applies the same motional operator to both spin components.
    pub fn apply_motional(&self, op: &CMatrix) -> Result<HybridState> {
        if op.rows() != self.fock_dim || op.cols() != self.fock_dim {
            return Err(Error::DimensionMismatch { expected: self.fock_dim, found: op.rows() });
        }
        let first = op.matvec(self.component(0));
        let second = op.matvec(self.component(1));
        HybridState::from_components(self.basis, &first, &second)
    }

    /// Applies `ops[i]` to spin component `i` of the given basis.
    pub fn apply_conditional(&self, basis: SpinBasis, ops: [&CMatrix; 2]) -> Result<HybridState> {
        let s = self.to_basis(basis);
        for op in ops {
            if op.rows() != self.fock_dim || op.cols() != self.fock_dim {
                return Err(Error::DimensionMismatch { expected: self.fock_dim, found: op.rows() });
            }
        }
        let first = ops[0].matvec(s.component(0));
        let second = ops[1].matvec(s.component(1));
        HybridState::from_components(basis, &first, &second)
    }
}

/// Coherent state |α⟩, renormalized after truncation.
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<MotionalState> {
    space.check_guard(alpha.norm())?;
    let mut amps = Vec::with_capacity(space.dim());
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..space.dim() {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    let norm = norm_sqr(&amps).sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    Ok(MotionalState { amps })
}

pub fn annihilation(space: FockSpace) -> CMatrix {
    let n = space.dim();
    CMatrix::from_fn(n, n, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { ZERO })
}

pub fn creation(space: FockSpace) -> CMatrix {
    annihilation(space).adjoint()
}

pub fn number_operator(space: FockSpace) -> CMatrix {
    let n = space.dim();
    CMatrix::from_fn(n, n, |r, c| if r == c { C64::new(r as f64, 0.0) } else { ZERO })
}

/// D(α) from the closed-form Laguerre matrix elements
/// ⟨m|D(α)|n⟩ = √(n!/m!)·α^{m−n}·e^{−|α|²/2}·L_n^{m−n}(|α|²) for m ≥ n
/// (and the adjoint relation for m < n).
///
/// Entries are exact for the infinite operator, so the truncated matrix is
/// unitary only on the block that stays inside the space.
pub fn displacement_matrix(alpha: C64, space: FockSpace) -> CMatrix {
    let n = space.dim();
    let x = alpha.norm_sqr();
    let lnf = laguerre::ln_factorials(2 * n);
    let unit = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { ONE };
    let below = -unit.conj();
    let mut out = CMatrix::zeros(n, n);
    let mut phase_up = ONE;
    let mut phase_down = ONE;
    for k in 0..n {
        let column = laguerre::scaled_laguerre_column(k, x, n - k, &lnf);
        for (i, &f) in column.iter().enumerate() {
            // ⟨i+k|D|i⟩ and ⟨i|D|i+k⟩
            out[(i + k, i)] = phase_up * f;
            if k > 0 {
                out[(i, i + k)] = phase_down * f;
            }
        }
        phase_up *= unit;
        phase_down *= below;
    }
    out
}

/// exp(αa† − α*a) of the truncated generator. Independent cross-check of
/// [`displacement_matrix`]; agrees with it on the interior block.
pub fn displacement_matrix_expm(alpha: C64, space: FockSpace) -> CMatrix {
    let a = annihilation(space);
    let generator = a.adjoint().scale(alpha).sub(&a.scale(alpha.conj()));
    generator.expm()
}

/// F(n) = e^{−η²/2}·√(1/(n+1))·L_n^1(η²), the all-orders |n⟩ → |n+1⟩
/// sideband coupling in units of η.
pub fn ladder_coupling_f(n: usize, eta: f64) -> f64 {
    let x = eta * eta;
    (-0.5 * x).exp() * (1.0 / (n as f64 + 1.0)).sqrt() * laguerre_assoc(n, 1, x)
}

/// Raising/lowering pair with a single band: L†|n⟩ = band[n]·|n+1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    band: Vec<f64>,
}

impl Ladder {
    /// The harmonic ladder a, a† (band √(n+1)).
    pub fn linear(space: FockSpace) -> Self {
        Ladder { band: (0..space.dim() - 1).map(|n| ((n + 1) as f64).sqrt()).collect() }
    }

    pub fn from_band(band: Vec<f64>) -> Self {
        Ladder { band }
    }

    pub fn band(&self) -> &[f64] {
        &self.band
    }

    pub fn dim(&self) -> usize {
        self.band.len() + 1
    }

    /// Dense lowering operator L (L|n+1⟩ = band[n]|n⟩).
    pub fn lowering_dense(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| if c == r + 1 { C64::new(self.band[r], 0.0) } else { ZERO })
    }

    pub fn raising_dense(&self) -> CMatrix {
        self.lowering_dense().adjoint()
    }

    /// out = L·v
    pub fn lower_into(&self, v: &[C64], out: &mut [C64]) {
        let n = self.dim();
        for i in 0..n - 1 {
            out[i] = v[i + 1] * self.band[i];
        }
        out[n - 1] = ZERO;
    }

    /// out = L†·v
    pub fn raise_into(&self, v: &[C64], out: &mut [C64]) {
        out[0] = ZERO;
        for i in 0..self.dim() - 1 {
            out[i + 1] = v[i] * self.band[i];
        }
    }
}

/// All-orders ladder 𝒜 with 𝒜†|n⟩ = F(n)|n+1⟩.
pub fn nonlinear_ladder(eta: f64, space: FockSpace) -> Result<Ladder> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument("Lamb-Dicke parameter must lie in (0, 1)"));
    }
    let x = eta * eta;
    let damping = (-0.5 * x).exp();
    let mut series = LaguerreSeries::new(1, x);
    let band = (0..space.dim() - 1).map(|n| damping * (1.0 / (n as f64 + 1.0)).sqrt() * series.next_value()).collect();
    Ok(Ladder { band })
}

/// (|+⟩ₓ|α⟩ + |−⟩ₓ|−α⟩)/√2
pub fn ideal_cat(alpha: C64, space: FockSpace) -> Result<HybridState> {
    let plus = coherent_state(alpha, space)?;
    let minus = coherent_state(-alpha, space)?;
    let first: Vec<C64> = plus.amplitudes().iter().map(|z| z * FRAC_1_SQRT_2).collect();
    let second: Vec<C64> = minus.amplitudes().iter().map(|z| z * FRAC_1_SQRT_2).collect();
    let mut cat = HybridState::from_components(SpinBasis::X, &first, &second)?;
    // The two branches overlap by ⟨−α|α⟩ = e^{−2|α|²}; renormalize the sum.
    let norm = cat.norm();
    for z in cat.amplitudes_mut() {
        *z /= norm;
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn space_rejects_degenerate_dimension() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn coherent_state_examples() {
        let vac = coherent_state(C64::new(0.0, 0.0), space(16)).unwrap();
        assert_eq!(vac, MotionalState::vacuum(space(16)));

        let s = coherent_state(C64::new(2.0, 0.0), space(64)).unwrap();
        assert!((s.mean_number() - 4.0).abs() < 1e-9);
        assert!((s.amplitudes()[0].re - (-2.0f64).exp()).abs() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_guard() {
        // |α|² + 6|α| + 9 = (|α| + 3)²
        assert_eq!(required_dim(2.0), 25);
        assert!(coherent_state(C64::new(2.0, 0.0), space(24)).is_err());
        assert!(coherent_state(C64::new(2.0, 0.0), space(25)).is_ok());
    }

    #[test]
    fn displacement_examples() {
        let d0 = displacement_matrix(C64::new(0.0, 0.0), space(12));
        assert!(d0.sub(&CMatrix::identity(12)).max_abs() < 1e-15);
        let d1 = displacement_matrix(C64::new(1.0, 0.0), space(32));
        assert!((d1[(0, 0)].re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((d1[(0, 0)].re - 0.606_531).abs() < 1e-6);
    }

    #[test]
    fn displacement_matches_expm_oracle() {
        let s = space(128);
        let alpha = C64::new(1.5, 0.5);
        let analytic = displacement_matrix(alpha, s);
        let oracle = displacement_matrix_expm(alpha, s);
        let block = s.interior_for(alpha.norm());
        assert!(block > 40);
        let diff = analytic.max_abs_diff_block(&oracle, block);
        assert!(diff < 1e-9, "diff {diff} on block {block}");
    }

    #[test]
    fn displacement_of_vacuum_is_coherent_state() {
        let s = space(80);
        let alpha = C64::new(-1.2, 2.1);
        let via_d = MotionalState::vacuum(s).apply(&displacement_matrix(alpha, s));
        let direct = coherent_state(alpha, s).unwrap();
        for (a, b) in via_d.amplitudes().iter().zip(direct.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn expm_inverse_property() {
        let s = space(64);
        let alpha = C64::new(0.8, -0.3);
        let prod = displacement_matrix_expm(alpha, s).matmul(&displacement_matrix_expm(-alpha, s));
        assert!(prod.max_abs_diff_block(&CMatrix::identity(64), s.interior_for(alpha.norm())) < 1e-10);
        assert!(displacement_matrix_expm(C64::new(0.0, 0.0), s).sub(&CMatrix::identity(64)).max_abs() < 1e-15);
    }

    #[test]
    fn ladder_coupling_examples() {
        assert!((ladder_coupling_f(0, 0.1) - (-0.005f64).exp()).abs() < 1e-15);
        assert!((ladder_coupling_f(0, 0.1) - 0.995_012).abs() < 1e-6);
        // ratio to the harmonic √(n+1) shrinks below the first zero
        let eta = 0.0908;
        let ratio = |n: usize| ladder_coupling_f(n, eta) / ((n + 1) as f64).sqrt();
        for n in 0..400 {
            assert!(ratio(n + 1) < ratio(n));
        }
        let n_star = first_nonpositive_degree(eta * eta, 100_000).unwrap();
        assert_eq!(n_star, 445);
        assert!(ladder_coupling_f(n_star, eta) <= 0.0);
        assert!(ladder_coupling_f(n_star - 1, eta) > 0.0);
    }

    #[test]
    fn nonlinear_ladder_band_and_limits() {
        let s = space(40);
        let eta = 0.05;
        let ladder = nonlinear_ladder(eta, s).unwrap();
        for n in 0..39 {
            assert_eq!(ladder.band()[n], ladder_coupling_f(n, eta));
        }
        let mut out = vec![ZERO; 40];
        ladder.lower_into(MotionalState::vacuum(s).amplitudes(), &mut out);
        assert!(out.iter().all(|z| *z == ZERO));

        // F(n)/√(n+1) = 1 − (n+1)η²/2 + O(η⁴)
        let eta = 1e-3;
        let small = nonlinear_ladder(eta, s).unwrap();
        let linear = Ladder::linear(s);
        for n in 0..=10 {
            let rel = (small.band()[n] - linear.band()[n]).abs() / linear.band()[n];
            assert!(rel <= (n + 1) as f64 * eta * eta / 2.0 * (1.0 + 1e-3), "n={n} rel={rel}");
        }
        assert!((small.band()[0] - 1.0).abs() <= eta * eta);
        assert!(nonlinear_ladder(0.0, s).is_err());
        assert!(nonlinear_ladder(1.0, s).is_err());
    }

    #[test]
    fn ideal_cat_examples() {
        let s = space(32);
        let cat0 = ideal_cat(C64::new(0.0, 0.0), s).unwrap();
        let ground = HybridState::ground(s);
        assert!((cat0.fidelity(&ground).unwrap() - 1.0).abs() < 1e-12);

        let big = space(required_dim(10.0));
        let cat = ideal_cat(C64::new(10.0, 0.0), big).unwrap();
        assert!((cat.norm() - 1.0).abs() < 1e-9);
        // e^{−200} in exact arithmetic; the guard leaves a ~1e-10 truncation residue
        assert!(cat.x_coherence().norm() < 1e-9);
        let pops = cat.x_populations();
        assert!((pops[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn basis_round_trip() {
        let s = space(16);
        let state = HybridState::product(
            SpinBasis::Z,
            [C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            &coherent_state(C64::new(0.3, 0.1), s).unwrap(),
        );
        let back = state.to_basis(SpinBasis::X).to_basis(SpinBasis::Z);
        for (a, b) in state.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
