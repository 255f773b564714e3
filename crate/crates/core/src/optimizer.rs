//! Detection efficiency as a function of the control-beam angle and the cat
//! size, and its maximization.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::catgen::{
    coherence_factor, heating_phase_variance, max_alpha, DurationModel, GrowthCurve, DEFAULT_RABI_CAP,
};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::molecule::{eta_control, eta_probe, Catalog, IonCrystal};

/// Upper end of the angle grid; at 90° the control beam no longer couples.
pub const MAX_ANGLE_DEG: f64 = 89.0;
const ALPHA_SCAN_POINTS: usize = 64;
const GOLDEN_ITERATIONS: usize = 80;

/// Quantity maximized by [`optimize_angle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// C·sin²θ_g: flip probability above the dephasing background.
    #[default]
    SignalMinusBackground,
    /// (1 − C·cos 2θ_g)/2, background included.
    Signal,
}

/// Protocol knobs shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Rabi frequency of each bichromatic tone, rad/s.
    pub rabi: f64,
    /// Photons absorbed per detection event (2 for pump-probe).
    pub photon_count: u32,
    pub objective: Objective,
    pub duration_model: DurationModel,
    /// Count heating during the inverse mapping as well (doubles the exposure).
    pub roundtrip_heating: bool,
    /// Angle between the IR probe and the mode axis, rad.
    pub probe_theta: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            rabi: DEFAULT_RABI_CAP,
            photon_count: 1,
            objective: Objective::default(),
            duration_model: DurationModel::default(),
            roundtrip_heating: false,
            probe_theta: 0.0,
        }
    }
}

impl ProtocolParams {
    fn validate(&self) -> Result<()> {
        require_positive("Rabi frequency", self.rabi)?;
        if self.photon_count == 0 {
            return Err(Error::InvalidArgument("photon count must be at least 1"));
        }
        if !self.probe_theta.is_finite() {
            return Err(Error::InvalidArgument("probe angle must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationProblem {
    crystal: IonCrystal,
    probe_wavenumber: f64,
    heating_rate: f64,
    params: ProtocolParams,
}

impl OptimizationProblem {
    /// `heating_rate` in quanta/s, `probe_wavenumber` in cm⁻¹.
    pub fn new(crystal: IonCrystal, probe_wavenumber: f64, heating_rate: f64) -> Result<Self> {
        require_positive("probe wavenumber", probe_wavenumber)?;
        require_non_negative("heating rate", heating_rate)?;
        Ok(OptimizationProblem { crystal, probe_wavenumber, heating_rate, params: ProtocolParams::default() })
    }

    pub fn with_params(mut self, params: ProtocolParams) -> Result<Self> {
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    pub fn with_photon_count(mut self, photon_count: u32) -> Result<Self> {
        let params = ProtocolParams { photon_count, ..self.params };
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    pub fn crystal(&self) -> &IonCrystal {
        &self.crystal
    }

    pub fn probe_wavenumber(&self) -> f64 {
        self.probe_wavenumber
    }

    pub fn heating_rate(&self) -> f64 {
        self.heating_rate
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }
}

/// Every intermediate of one (θ, α) evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub theta: f64,
    pub alpha: f64,
    pub eta_control: f64,
    pub eta_probe: f64,
    pub duration: f64,
    pub contrast: f64,
    pub geometric_phase: f64,
    /// (1 − C·cos 2θ_g)/2
    pub signal: f64,
    /// (1 − C)/2
    pub background: f64,
    /// Value of the configured objective.
    pub efficiency: f64,
}

/// Result of [`optimize_angle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub theta_star: f64,
    pub alpha_star: f64,
    pub duration: f64,
    pub efficiency: f64,
    pub signal: f64,
    pub background: f64,
    pub contrast: f64,
    pub eta_control: f64,
    pub eta_probe: f64,
}

impl From<Evaluation> for Optimum {
    fn from(e: Evaluation) -> Self {
        Optimum {
            theta_star: e.theta,
            alpha_star: e.alpha,
            duration: e.duration,
            efficiency: e.efficiency,
            signal: e.signal,
            background: e.background,
            contrast: e.contrast,
            eta_control: e.eta_control,
            eta_probe: e.eta_probe,
        }
    }
}

/// Per-angle quantities that do not depend on α.
struct AngleContext<'p> {
    problem: &'p OptimizationProblem,
    theta: f64,
    eta_a: f64,
    eta_m: f64,
    alpha_max: f64,
    curve: Option<GrowthCurve>,
}

impl<'p> AngleContext<'p> {
    fn new(problem: &'p OptimizationProblem, theta: f64) -> Result<Self> {
        let p = &problem.params;
        let eta_a = eta_control(&problem.crystal, theta)?;
        let eta_m = eta_probe(&problem.crystal, problem.probe_wavenumber, p.probe_theta)?.abs();
        // past 2αηk = π/2 the signal only falls while heating keeps growing
        let rollover = if eta_m > 0.0 { PI / (4.0 * eta_m * p.photon_count as f64) } else { f64::INFINITY };
        let (alpha_max, curve) = if eta_a <= 0.0 {
            (0.0, None)
        } else {
            match p.duration_model {
                DurationModel::LambDickeCapped => (max_alpha(eta_a).min(rollover), None),
                DurationModel::GrowthOde => {
                    let curve = GrowthCurve::new(eta_a, p.rabi, rollover)?;
                    (curve.final_alpha().min(rollover), Some(curve))
                }
            }
        };
        Ok(AngleContext { problem, theta, eta_a, eta_m, alpha_max, curve })
    }

    fn duration(&self, alpha: f64) -> Result<f64> {
        if alpha == 0.0 {
            return Ok(0.0);
        }
        if alpha > self.alpha_max * (1.0 + 1e-12) || self.eta_a <= 0.0 {
            return Err(Error::InfeasibleAlpha { alpha, max: self.alpha_max });
        }
        match &self.curve {
            None => Ok(2.0 * alpha / (self.eta_a * self.problem.params.rabi)),
            Some(curve) => curve
                .duration_to(alpha.min(curve.final_alpha()))
                .ok_or(Error::InfeasibleAlpha { alpha, max: self.alpha_max }),
        }
    }

    fn evaluate(&self, alpha: f64) -> Result<Evaluation> {
        require_non_negative("alpha", alpha)?;
        let p = &self.problem.params;
        let duration = self.duration(alpha)?;
        let exposure = if p.roundtrip_heating { 2.0 * duration } else { duration };
        let contrast = coherence_factor(heating_phase_variance(self.problem.heating_rate, alpha, exposure)?)?;
        let geometric_phase = 2.0 * alpha * self.eta_m * p.photon_count as f64;
        let sin2 = geometric_phase.sin().powi(2);
        let signal = 0.5 * (1.0 - contrast * (2.0 * geometric_phase).cos());
        let background = 0.5 * (1.0 - contrast);
        let efficiency = match p.objective {
            Objective::SignalMinusBackground => contrast * sin2,
            Objective::Signal => signal,
        };
        Ok(Evaluation {
            theta: self.theta,
            alpha,
            eta_control: self.eta_a,
            eta_probe: self.eta_m,
            duration,
            contrast,
            geometric_phase,
            signal,
            background,
            efficiency,
        })
    }

    /// Maximizes over α ∈ [0, alpha_max]: a uniform pre-scan picks the
    /// bracket, golden-section search refines it.
    fn best_alpha(&self) -> Result<Evaluation> {
        let hi = self.alpha_max;
        let mut best = self.evaluate(0.0)?;
        if !(hi > 0.0) {
            return Ok(best);
        }
        let step = hi / ALPHA_SCAN_POINTS as f64;
        let mut best_i = 0;
        for i in 1..=ALPHA_SCAN_POINTS {
            let e = self.evaluate(if i == ALPHA_SCAN_POINTS { hi } else { step * i as f64 })?;
            if e.efficiency > best.efficiency {
                best = e;
                best_i = i;
            }
        }
        let lo_b = step * best_i.saturating_sub(1) as f64;
        let hi_b = (step * (best_i + 1) as f64).min(hi);
        let (x, _) = golden_section_max(
            |a| self.evaluate(a).map(|e| e.efficiency).unwrap_or(f64::NEG_INFINITY),
            lo_b,
            hi_b,
            GOLDEN_ITERATIONS,
        );
        let refined = self.evaluate(x)?;
        Ok(if refined.efficiency > best.efficiency { refined } else { best })
    }
}

/// Golden-section search for the maximum of `f` on [a, b].
///
/// Returns the best point seen and its value; runs a fixed number of
/// iterations so results are reproducible bit for bit.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, iterations: usize) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if b - a <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Efficiency at a fixed control angle `theta` (rad) and cat size `alpha`.
pub fn efficiency_at(problem: &OptimizationProblem, theta: f64, alpha: f64) -> Result<Evaluation> {
    AngleContext::new(problem, theta)?.evaluate(alpha)
}

/// Largest α considered at angle `theta`: the generation cap or the
/// sin² rollover, whichever comes first.
pub fn alpha_limit(problem: &OptimizationProblem, theta: f64) -> Result<f64> {
    Ok(AngleContext::new(problem, theta)?.alpha_max)
}

/// Best α at a fixed angle.
pub fn optimize_alpha(problem: &OptimizationProblem, theta: f64) -> Result<Evaluation> {
    AngleContext::new(problem, theta)?.best_alpha()
}

/// Maximizes the efficiency over the control angle and the cat size.
///
/// A 1° grid on [0°, 89°] with an inner α search, then golden-section
/// refinement of θ between the neighbours of the best grid angle.
pub fn optimize_angle(problem: &OptimizationProblem) -> Result<Optimum> {
    let grid = MAX_ANGLE_DEG as usize;
    let mut best: Option<Evaluation> = None;
    let mut best_i = 0;
    for i in 0..=grid {
        let e = optimize_alpha(problem, (i as f64).to_radians())?;
        if best.is_none_or(|b| e.efficiency > b.efficiency) {
            best = Some(e);
            best_i = i;
        }
    }
    let mut best = best.expect("non-empty grid");
    let lo = (best_i.saturating_sub(1) as f64).to_radians();
    let hi = ((best_i + 1).min(grid) as f64).to_radians();
    let (theta, _) = golden_section_max(
        |t| optimize_alpha(problem, t).map(|e| e.efficiency).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        40,
    );
    let refined = optimize_alpha(problem, theta)?;
    if refined.efficiency > best.efficiency {
        best = refined;
    }
    Ok(best.into())
}

/// One row of the reference efficiency tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub molecule: &'static str,
    pub mode: &'static str,
    pub ion: &'static str,
    /// Reference efficiencies at 10, 1 and 0.1 quanta/s: one photon, then two.
    pub single_photon: [f64; 3],
    pub two_photon: [f64; 3],
}

/// Heating rates (quanta/s) of the reference tables.
pub const TABLE_HEATING_RATES: [f64; 3] = [10.0, 1.0, 0.1];

/// Reference detection efficiencies for the built-in catalog.
pub const TABLE_ROWS: [TableRow; 6] = [
    TableRow {
        molecule: "NH3+",
        mode: "nu1",
        ion: "Ca40",
        single_photon: [0.30, 0.67, 0.94],
        two_photon: [0.70, 0.95, 0.99],
    },
    TableRow {
        molecule: "C2H2+",
        mode: "nu2",
        ion: "Ca40",
        single_photon: [0.25, 0.59, 0.91],
        two_photon: [0.64, 0.93, 0.99],
    },
    TableRow {
        molecule: "C3HN+",
        mode: "nu3",
        ion: "Ca40",
        single_photon: [0.06, 0.20, 0.50],
        two_photon: [0.22, 0.57, 0.89],
    },
    TableRow {
        molecule: "C3HN+",
        mode: "nu1",
        ion: "Ca40",
        single_photon: [0.16, 0.44, 0.81],
        two_photon: [0.46, 0.81, 0.98],
    },
    TableRow {
        molecule: "C6H5NH2+",
        mode: "nu2",
        ion: "Sr88",
        single_photon: [0.09, 0.30, 0.66],
        two_photon: [0.29, 0.72, 0.95],
    },
    TableRow {
        molecule: "C9H11NO2+",
        mode: "nu3",
        ion: "Ba138",
        single_photon: [0.03, 0.11, 0.40],
        two_photon: [0.10, 0.36, 0.79],
    },
];

impl TableRow {
    /// Reference value at `heating_rate` for `photon_count` photons, if tabulated.
    pub fn reference(&self, heating_rate: f64, photon_count: u32) -> Option<f64> {
        let i = TABLE_HEATING_RATES.iter().position(|&r| r == heating_rate)?;
        match photon_count {
            1 => Some(self.single_photon[i]),
            2 => Some(self.two_photon[i]),
            _ => None,
        }
    }

    pub fn problem(
        &self,
        catalog: &Catalog,
        trap_omega: f64,
        heating_rate: f64,
        params: ProtocolParams,
    ) -> Result<OptimizationProblem> {
        let molecule = catalog.molecule(self.molecule)?;
        let nu = molecule.mode(self.mode)?.frequency_cm1();
        let crystal = IonCrystal::new(molecule.clone(), catalog.ion(self.ion)?.clone(), trap_omega)?;
        OptimizationProblem::new(crystal, nu, heating_rate)?.with_params(params)
    }
}

/// One optimized table entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableCell {
    pub row: TableRow,
    pub heating_rate: f64,
    pub photon_count: u32,
    pub optimum: Optimum,
    pub reference: Option<f64>,
}

/// Optimizes one table entry.
pub fn table_cell(
    catalog: &Catalog,
    row: &TableRow,
    trap_omega: f64,
    heating_rate: f64,
    params: ProtocolParams,
) -> Result<TableCell> {
    let problem = row.problem(catalog, trap_omega, heating_rate, params)?;
    Ok(TableCell {
        row: *row,
        heating_rate,
        photon_count: params.photon_count,
        optimum: optimize_angle(&problem)?,
        reference: row.reference(heating_rate, params.photon_count),
    })
}

/// All rows at every heating rate, row-major.
pub fn reproduce_tables(
    catalog: &Catalog,
    trap_omega: f64,
    heating_rates: &[f64],
    params: ProtocolParams,
) -> Result<Vec<TableCell>> {
    let mut cells = Vec::with_capacity(TABLE_ROWS.len() * heating_rates.len());
    for row in &TABLE_ROWS {
        for &rate in heating_rates {
            cells.push(table_cell(catalog, row, trap_omega, rate, params)?);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::{builtin_catalog, REFERENCE_TRAP_OMEGA};

    fn problem(molecule: &str, mode: &str, rate: f64) -> OptimizationProblem {
        let cat = builtin_catalog();
        let m = cat.molecule(molecule).unwrap();
        let ion = cat.default_ion_for(m).unwrap();
        let crystal = IonCrystal::new(m.clone(), ion.clone(), REFERENCE_TRAP_OMEGA).unwrap();
        OptimizationProblem::new(crystal, m.mode(mode).unwrap().frequency_cm1(), rate).unwrap()
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 100);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx <= 0.0 && fx > -1e-15);
    }

    #[test]
    fn zero_heating_rises_to_rollover() {
        let p = problem("C3HN+", "nu3", 0.0);
        let limit = alpha_limit(&p, 0.0).unwrap();
        let mut last = 0.0;
        for i in 1..=20 {
            let e = efficiency_at(&p, 0.0, limit * i as f64 / 20.0).unwrap();
            assert!(e.efficiency >= last);
            last = e.efficiency;
        }
        let opt = optimize_alpha(&p, 0.0).unwrap();
        assert_eq!(opt.alpha, limit);
    }

    #[test]
    fn huge_heating_kills_the_signal() {
        let p = problem("NH3+", "nu1", 1e6);
        for alpha in [1.0, 5.0, 10.0] {
            assert!(efficiency_at(&p, 0.0, alpha).unwrap().efficiency < 1e-6);
        }
    }

    #[test]
    fn composition_matches_sub_calls() {
        let p = problem("C3HN+", "nu3", 0.1);
        let e = efficiency_at(&p, 0.0, 10.0).unwrap();
        let eta_a = eta_control(p.crystal(), 0.0).unwrap();
        let eta_m = eta_probe(p.crystal(), 1890.0, 0.0).unwrap();
        let tau = 2.0 * 10.0 / (eta_a * DEFAULT_RABI_CAP);
        let c = coherence_factor(heating_phase_variance(0.1, 10.0, tau).unwrap()).unwrap();
        let expected = c * (2.0f64 * 10.0 * eta_m).sin().powi(2);
        assert!((e.efficiency - expected).abs() < 1e-15);
        assert!(efficiency_at(&p, 0.0, 30.0).is_err());
    }

    #[test]
    fn optimizer_is_deterministic() {
        let p = problem("C2H2+", "nu2", 1.0);
        assert_eq!(optimize_angle(&p).unwrap(), optimize_angle(&p).unwrap());
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(TABLE_ROWS[0].reference(0.1, 1), Some(0.94));
        assert_eq!(TABLE_ROWS[1].reference(1.0, 2), Some(0.93));
        assert_eq!(TABLE_ROWS[0].reference(0.5, 1), None);
    }
}
