//! JSON catalog files.
//!
//! ```json
//! {
//!   "molecules": [{"name": "NH3+", "mass_da": 17.0,
//!                  "modes": [{"label": "nu1", "freq_cm1": 3498.0, "ir_km_mol": 0.0}]}],
//!   "ions": [{"name": "Ca40", "mass_da": 40.0, "control_wavelength_nm": 729.0}]
//! }
//! ```
//!
//! Modes may also carry `experimental_cm1` (a list) and `model`
//! (`"harmonic"` or `"two_level"`).

use std::path::Path;

use qls_core::molecule::{Catalog, LogicIon, ModeModel, MoleculeSpec, VibrationalMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

const CATALOG_KEYS: &[&str] = &["molecules", "ions"];
const MOLECULE_KEYS: &[&str] = &["name", "mass_da", "modes"];
const MODE_KEYS: &[&str] = &["label", "freq_cm1", "ir_km_mol", "experimental_cm1", "model"];
const ION_KEYS: &[&str] = &["name", "mass_da", "control_wavelength_nm"];

#[derive(Debug, Serialize, Deserialize)]
struct CatalogFile {
    molecules: Vec<MoleculeEntry>,
    ions: Vec<IonEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MoleculeEntry {
    name: String,
    mass_da: f64,
    modes: Vec<ModeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModeEntry {
    label: String,
    freq_cm1: f64,
    ir_km_mol: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    experimental_cm1: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_harmonic")]
    model: ModelEntry,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelEntry {
    #[default]
    Harmonic,
    TwoLevel,
}

fn is_harmonic(m: &ModelEntry) -> bool {
    *m == ModelEntry::Harmonic
}

#[derive(Debug, Serialize, Deserialize)]
struct IonEntry {
    name: String,
    mass_da: f64,
    control_wavelength_nm: f64,
}

/// How unknown keys are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Warn,
}

/// A parsed catalog plus the unknown keys that were skipped.
#[derive(Debug)]
pub struct LoadedCatalog {
    pub catalog: Catalog,
    pub warnings: Vec<String>,
}

fn unknown_keys(value: &Value, allowed: &[&str], path: &str, out: &mut Vec<String>) {
    if let Value::Object(map) = value {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                out.push(format!("unknown key `{key}` in {path}"));
            }
        }
    }
}

fn collect_unknown(root: &Value) -> Vec<String> {
    let mut out = Vec::new();
    unknown_keys(root, CATALOG_KEYS, "catalog", &mut out);
    if let Some(Value::Array(molecules)) = root.get("molecules") {
        for (i, m) in molecules.iter().enumerate() {
            unknown_keys(m, MOLECULE_KEYS, &format!("molecules[{i}]"), &mut out);
            if let Some(Value::Array(modes)) = m.get("modes") {
                for (j, mode) in modes.iter().enumerate() {
                    unknown_keys(mode, MODE_KEYS, &format!("molecules[{i}].modes[{j}]"), &mut out);
                }
            }
        }
    }
    if let Some(Value::Array(ions)) = root.get("ions") {
        for (i, ion) in ions.iter().enumerate() {
            unknown_keys(ion, ION_KEYS, &format!("ions[{i}]"), &mut out);
        }
    }
    out
}

/// Nanometre value whose division by 10⁹ gives back `meters` exactly.
fn meters_to_nm(meters: f64) -> f64 {
    let nm = meters * 1e9;
    let mut candidate = nm;
    for _ in 0..4 {
        if candidate / 1e9 == meters {
            return candidate;
        }
        candidate = candidate.next_up();
    }
    candidate = nm;
    for _ in 0..4 {
        if candidate / 1e9 == meters {
            return candidate;
        }
        candidate = candidate.next_down();
    }
    nm
}

pub fn parse_catalog(text: &str, strictness: Strictness) -> Result<LoadedCatalog, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Catalog(e.to_string()))?;
    let warnings = collect_unknown(&root);
    if strictness == Strictness::Strict && !warnings.is_empty() {
        return Err(CliError::Catalog(warnings.join("; ")));
    }
    let file: CatalogFile = serde_json::from_value(root).map_err(|e| CliError::Catalog(e.to_string()))?;
    let invalid = |what: &str, name: &str, e: qls_core::Error| CliError::Catalog(format!("{what} `{name}`: {e}"));
    let mut molecules = Vec::with_capacity(file.molecules.len());
    for m in file.molecules {
        let mut modes = Vec::with_capacity(m.modes.len());
        for mode in m.modes {
            let model = match mode.model {
                ModelEntry::Harmonic => ModeModel::Harmonic,
                ModelEntry::TwoLevel => ModeModel::TwoLevel,
            };
            let v = VibrationalMode::new(&mode.label, mode.freq_cm1, mode.ir_km_mol)
                .map_err(|e| invalid("mode", &mode.label, e))?
                .with_model(model)
                .with_experimental(&mode.experimental_cm1);
            modes.push(v);
        }
        molecules.push(MoleculeSpec::new(&m.name, m.mass_da, modes).map_err(|e| invalid("molecule", &m.name, e))?);
    }
    let mut ions = Vec::with_capacity(file.ions.len());
    for ion in file.ions {
        let wavelength = ion.control_wavelength_nm / 1e9;
        ions.push(LogicIon::new(&ion.name, ion.mass_da, wavelength).map_err(|e| invalid("ion", &ion.name, e))?);
    }
    let catalog = Catalog::new(molecules, ions).map_err(|e| CliError::Catalog(e.to_string()))?;
    Ok(LoadedCatalog { catalog, warnings })
}

pub fn read_catalog(path: &Path, strictness: Strictness) -> Result<LoadedCatalog, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read catalog {}: {e}", path.display())))?;
    parse_catalog(&text, strictness)
}

/// Pretty-printed JSON with a trailing newline.
pub fn catalog_to_json(catalog: &Catalog) -> String {
    let file = CatalogFile {
        molecules: catalog
            .molecules()
            .iter()
            .map(|m| MoleculeEntry {
                name: m.name().to_string(),
                mass_da: m.mass_da(),
                modes: m
                    .modes()
                    .iter()
                    .map(|v| ModeEntry {
                        label: v.label().to_string(),
                        freq_cm1: v.frequency_cm1(),
                        ir_km_mol: v.ir_intensity(),
                        experimental_cm1: v.experimental_cm1().to_vec(),
                        model: match v.model() {
                            ModeModel::Harmonic => ModelEntry::Harmonic,
                            ModeModel::TwoLevel => ModelEntry::TwoLevel,
                        },
                    })
                    .collect(),
            })
            .collect(),
        ions: catalog
            .ions()
            .iter()
            .map(|i| IonEntry {
                name: i.name().to_string(),
                mass_da: i.mass_da(),
                control_wavelength_nm: meters_to_nm(i.control_wavelength_m()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("catalog serializes");
    text.push('\n');
    text
}

/// SHA-256 of the canonical JSON form, hex encoded.
pub fn catalog_hash(catalog: &Catalog) -> String {
    let digest = Sha256::digest(catalog_to_json(catalog).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
