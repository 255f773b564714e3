//! Molecules, vibrational modes, logic ions and the built-in catalog.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{require_positive, Error, Result};
use crate::physics::{lamb_dicke, wavelength_to_wavevector, wavenumber_to_wavevector, DALTON};

/// How a vibrational mode responds to a resonant pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeModel {
    /// Anharmonic shift much larger than the pulse bandwidth: at most one quantum.
    TwoLevel,
    /// Harmonic ladder: the pulse creates a coherent state.
    #[default]
    Harmonic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibrationalMode {
    label: String,
    frequency_cm1: f64,
    ir_intensity: f64,
    model: ModeModel,
    experimental_cm1: Vec<f64>,
}

impl VibrationalMode {
    /// `ir_intensity` in km/mol; 0 marks a mode without a tabulated intensity.
    pub fn new(label: &str, frequency_cm1: f64, ir_intensity: f64) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::InvalidArgument("mode label must not be empty"));
        }
        require_positive("mode frequency", frequency_cm1)?;
        crate::error::require_non_negative("IR intensity", ir_intensity)?;
        Ok(VibrationalMode {
            label: label.to_string(),
            frequency_cm1,
            ir_intensity,
            model: ModeModel::default(),
            experimental_cm1: Vec::new(),
        })
    }

    pub fn with_model(mut self, model: ModeModel) -> Self {
        self.model = model;
        self
    }

    /// Attaches measured band positions (cm⁻¹) as metadata.
    pub fn with_experimental(mut self, values: &[f64]) -> Self {
        self.experimental_cm1 = values.to_vec();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn frequency_cm1(&self) -> f64 {
        self.frequency_cm1
    }

    pub fn ir_intensity(&self) -> f64 {
        self.ir_intensity
    }

    pub fn model(&self) -> ModeModel {
        self.model
    }

    pub fn experimental_cm1(&self) -> &[f64] {
        &self.experimental_cm1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec {
    name: String,
    mass_da: f64,
    modes: Vec<VibrationalMode>,
}

impl MoleculeSpec {
    pub fn new(name: &str, mass_da: f64, modes: Vec<VibrationalMode>) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::InvalidArgument("molecule name must not be empty"));
        }
        require_positive("molecule mass", mass_da)?;
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].iter().any(|other| other.label == m.label) {
                return Err(Error::InvalidArgument("duplicate mode label"));
            }
        }
        Ok(MoleculeSpec { name: name.to_string(), mass_da, modes })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mass_da(&self) -> f64 {
        self.mass_da
    }

    pub fn modes(&self) -> &[VibrationalMode] {
        &self.modes
    }

    pub fn mode(&self, label: &str) -> Result<&VibrationalMode> {
        self.modes.iter().find(|m| m.label == label).ok_or(Error::NotFound { kind: "vibrational mode" })
    }

    /// The mode with the largest IR intensity (first one on ties).
    pub fn default_mode(&self) -> Result<&VibrationalMode> {
        self.modes
            .iter()
            .reduce(|best, m| if m.ir_intensity > best.ir_intensity { m } else { best })
            .ok_or(Error::NotFound { kind: "vibrational mode" })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicIon {
    name: String,
    mass_da: f64,
    control_wavelength_m: f64,
}

impl LogicIon {
    pub fn new(name: &str, mass_da: f64, control_wavelength_m: f64) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::InvalidArgument("ion name must not be empty"));
        }
        require_positive("ion mass", mass_da)?;
        require_positive("control wavelength", control_wavelength_m)?;
        Ok(LogicIon { name: name.to_string(), mass_da, control_wavelength_m })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mass_da(&self) -> f64 {
        self.mass_da
    }

    pub fn control_wavelength_m(&self) -> f64 {
        self.control_wavelength_m
    }
}

/// Molecules and logic ions available for lookups.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    molecules: Vec<MoleculeSpec>,
    ions: Vec<LogicIon>,
}

impl Catalog {
    pub fn new(molecules: Vec<MoleculeSpec>, ions: Vec<LogicIon>) -> Result<Self> {
        for (i, m) in molecules.iter().enumerate() {
            if molecules[..i].iter().any(|o| o.name == m.name) {
                return Err(Error::InvalidArgument("duplicate molecule name"));
            }
        }
        for (i, ion) in ions.iter().enumerate() {
            if ions[..i].iter().any(|o| o.name == ion.name) {
                return Err(Error::InvalidArgument("duplicate ion name"));
            }
        }
        Ok(Catalog { molecules, ions })
    }

    pub fn molecules(&self) -> &[MoleculeSpec] {
        &self.molecules
    }

    pub fn ions(&self) -> &[LogicIon] {
        &self.ions
    }

    pub fn molecule(&self, name: &str) -> Result<&MoleculeSpec> {
        self.molecules.iter().find(|m| m.name == name).ok_or(Error::NotFound { kind: "molecule" })
    }

    pub fn ion(&self, name: &str) -> Result<&LogicIon> {
        self.ions.iter().find(|i| i.name == name).ok_or(Error::NotFound { kind: "logic ion" })
    }

    /// The ion whose mass is closest to the molecule's.
    pub fn default_ion_for(&self, molecule: &MoleculeSpec) -> Result<&LogicIon> {
        self.ions
            .iter()
            .reduce(|best, ion| {
                if (ion.mass_da - molecule.mass_da).abs() < (best.mass_da - molecule.mass_da).abs() {
                    ion
                } else {
                    best
                }
            })
            .ok_or(Error::NotFound { kind: "logic ion" })
    }
}

/// Five molecular cations and three logic ions.
/// Frequencies are the scaled DFT values; C₃HN⁺ also carries measured band
/// positions.
pub fn builtin_catalog() -> Catalog {
    let mode = |label: &str, freq: f64, ir: f64| VibrationalMode::new(label, freq, ir).expect("valid builtin mode");
    let molecule =
        |name: &str, mass: f64, modes: Vec<VibrationalMode>| MoleculeSpec::new(name, mass, modes).expect("valid");
    let molecules = vec![
        molecule("NH3+", 17.0, vec![mode("nu1", 3498.0, 0.0)]),
        molecule("C2H2+", 26.0, vec![mode("nu2", 3363.0, 0.0)]),
        molecule(
            "C3HN+",
            51.0,
            vec![
                mode("nu1", 3259.0, 213.0).with_experimental(&[3196.5, 3123.0]),
                mode("nu2", 2206.0, 2.0).with_experimental(&[2175.8, 2177.0]),
                mode("nu3", 1890.0, 334.0).with_experimental(&[1852.8, 1855.0]),
                mode("nu4", 911.0, 7.0).with_experimental(&[829.0]),
            ],
        ),
        molecule("C6H5NH2+", 93.0, vec![mode("nu2", 3398.0, 0.0)]),
        molecule("C9H11NO2+", 165.0, vec![mode("nu3", 3382.0, 0.0)]),
    ];
    let ions = vec![
        LogicIon::new("Ca40", 40.0, 729e-9).expect("valid"),
        LogicIon::new("Sr88", 88.0, 674e-9).expect("valid"),
        LogicIon::new("Ba138", 138.0, 1.7e-6).expect("valid"),
    ];
    Catalog::new(molecules, ions).expect("unique builtin names")
}

/// Mass ratio outside the range where sympathetic cooling and readout work well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRatioWarning {
    /// molecule mass / ion mass
    pub ratio: f64,
}

impl core::fmt::Display for MassRatioWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "molecule/ion mass ratio {:.3} is outside [0.5, 2]", self.ratio)
    }
}

/// A molecule and a logic ion sharing one motional mode.
#[derive(Debug, Clone, PartialEq)]
pub struct IonCrystal {
    molecule: MoleculeSpec,
    ion: LogicIon,
    trap_omega: f64,
}

impl IonCrystal {
    pub fn new(molecule: MoleculeSpec, ion: LogicIon, trap_omega: f64) -> Result<Self> {
        require_positive("trap frequency", trap_omega)?;
        Ok(IonCrystal { molecule, ion, trap_omega })
    }

    pub fn molecule(&self) -> &MoleculeSpec {
        &self.molecule
    }

    pub fn ion(&self) -> &LogicIon {
        &self.ion
    }

    pub fn trap_omega(&self) -> f64 {
        self.trap_omega
    }

    pub fn total_mass_da(&self) -> f64 {
        self.molecule.mass_da + self.ion.mass_da
    }

    pub fn total_mass_kg(&self) -> f64 {
        self.total_mass_da() * DALTON
    }

    pub fn mass_ratio(&self) -> f64 {
        self.molecule.mass_da / self.ion.mass_da
    }

    pub fn mass_ratio_warning(&self) -> Option<MassRatioWarning> {
        let ratio = self.mass_ratio();
        (!(0.5..=2.0).contains(&ratio)).then_some(MassRatioWarning { ratio })
    }
}

/// η of the IR probe at `probe_wavenumber` (cm⁻¹) and angle `theta` to the mode.
pub fn eta_probe(crystal: &IonCrystal, probe_wavenumber: f64, theta: f64) -> Result<f64> {
    let k = wavenumber_to_wavevector(probe_wavenumber)?;
    lamb_dicke(k, crystal.total_mass_kg(), crystal.trap_omega, theta)
}

/// η of the logic-ion control beam at angle `theta` to the mode.
pub fn eta_control(crystal: &IonCrystal, theta: f64) -> Result<f64> {
    let k = wavelength_to_wavevector(crystal.ion.control_wavelength_m)?;
    lamb_dicke(k, crystal.total_mass_kg(), crystal.trap_omega, theta)
}

/// 2π·500 kHz, the reference mode frequency.
pub const REFERENCE_TRAP_OMEGA: f64 = 2.0 * PI * 500e3;

#[cfg(test)]
mod tests {
    use super::*;

    fn crystal(molecule: &str, ion: &str) -> IonCrystal {
        let cat = builtin_catalog();
        IonCrystal::new(cat.molecule(molecule).unwrap().clone(), cat.ion(ion).unwrap().clone(), REFERENCE_TRAP_OMEGA)
            .unwrap()
    }

    #[test]
    fn catalog_lookups() {
        let cat = builtin_catalog();
        let nu3 = cat.molecule("C3HN+").unwrap().mode("nu3").unwrap();
        assert_eq!((nu3.frequency_cm1(), nu3.ir_intensity()), (1890.0, 334.0));
        let nh3 = cat.molecule("NH3+").unwrap();
        assert_eq!(nh3.mass_da(), 17.0);
        assert_eq!(nh3.mode("nu1").unwrap().frequency_cm1(), 3498.0);
        assert_eq!(cat.default_ion_for(nh3).unwrap().name(), "Ca40");
        assert_eq!(cat.molecule("Xe"), Err(Error::NotFound { kind: "molecule" }));
        assert!(cat.molecule("C3HN+").unwrap().mode("nu9").is_err());
    }

    #[test]
    fn default_ions_follow_mass() {
        let cat = builtin_catalog();
        let expected =
            [("NH3+", "Ca40"), ("C2H2+", "Ca40"), ("C3HN+", "Ca40"), ("C6H5NH2+", "Sr88"), ("C9H11NO2+", "Ba138")];
        for (m, ion) in expected {
            assert_eq!(cat.default_ion_for(cat.molecule(m).unwrap()).unwrap().name(), ion, "{m}");
        }
        assert_eq!(cat.molecule("C3HN+").unwrap().default_mode().unwrap().label(), "nu3");
    }

    #[test]
    fn probe_eta_examples() {
        let c = crystal("C3HN+", "Ca40");
        assert!((eta_probe(&c, 3259.0, 0.0).unwrap() - 0.02158).abs() < 1e-4);
        assert!(eta_probe(&c, 3259.0, PI / 2.0).unwrap().abs() < 1e-15);
        let n = crystal("NH3+", "Ca40");
        assert!((eta_probe(&n, 3498.0, 0.0).unwrap() - 0.02927).abs() < 2e-4);
    }

    #[test]
    fn control_eta_examples() {
        let c = crystal("C3HN+", "Ca40");
        let eta0 = eta_control(&c, 0.0).unwrap();
        assert!((eta0 - 0.09083).abs() < 2e-4);
        assert!((eta_control(&c, PI / 3.0).unwrap() - eta0 / 2.0).abs() < 1e-15);
        let phe = crystal("C9H11NO2+", "Ba138");
        assert_eq!(phe.total_mass_da(), 303.0);
        assert!((eta_control(&phe, 0.0).unwrap() - 0.02133).abs() < 2e-4);
    }

    #[test]
    fn mass_ratio_warning_only_outside_factor_two() {
        assert!(crystal("C3HN+", "Ca40").mass_ratio_warning().is_none());
        let w = crystal("NH3+", "Ca40").mass_ratio_warning().unwrap();
        assert!((w.ratio - 0.425).abs() < 1e-12);
        assert!(crystal("NH3+", "Ba138").mass_ratio_warning().is_some());
    }

    #[test]
    fn validation() {
        assert!(VibrationalMode::new("nu1", 0.0, 1.0).is_err());
        assert!(VibrationalMode::new("nu1", 100.0, -1.0).is_err());
        let m = VibrationalMode::new("nu1", 100.0, 0.0).unwrap();
        assert!(MoleculeSpec::new("X", 10.0, vec![m.clone(), m]).is_err());
        assert!(LogicIon::new("Y", 10.0, 0.0).is_err());
    }
}
