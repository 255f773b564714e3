//! Argument parsing and subcommands.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qls_core::catgen::{
    coherence_factor, generate_cat_full, heating_phase_variance, CatGenSpec, CatTarget, DurationModel, FullDynamicsPath,
};
use qls_core::dynamics::PropagatorConfig;
use qls_core::fock::{required_dim, FockSpace};
use qls_core::molecule::{builtin_catalog, Catalog, IonCrystal, MoleculeSpec, VibrationalMode};
use qls_core::optimizer::{
    efficiency_at, optimize_alpha, optimize_angle, table_cell, Objective, OptimizationProblem, Optimum, ProtocolParams,
    TableCell, TABLE_HEATING_RATES, TABLE_ROWS,
};
use qls_core::pumpprobe::{bright_population, pump_probe_curve, IvrModel};
use qls_core::recoil::{spectrum_scan_with_cat, CatSetting, ScanPulse};
use rayon::prelude::*;
use serde_json::json;

use crate::catalog_io::{catalog_hash, catalog_to_json, read_catalog, Strictness};
use crate::error::CliError;
use crate::table::{Cell, Format, SweepTable};

/// Environment variable naming a catalog file that replaces the built-in one.
pub const CATALOG_ENV: &str = "QLS_CATALOG";

#[derive(Debug, Parser)]
#[command(name = "qls", version, about = "Recoil spectroscopy of single molecular ions with a quantum-logic readout")]
pub struct Cli {
    /// Catalog file (overrides QLS_CATALOG and the built-in catalog).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Reject unknown keys in catalog files instead of warning.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect and validate catalogs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Detection efficiency for one molecular mode.
    Detect(DetectArgs),
    /// Flip probability versus IR pulse center.
    Spectrum(SpectrumArgs),
    /// Pump-probe signal versus delay.
    Pumpprobe(PumpProbeArgs),
    /// Optimized efficiencies for the reference molecules.
    Tables(TablesArgs),
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// List molecules and logic ions.
    List,
    /// Show one molecule or ion.
    Show {
        name: String,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Check a catalog file against the schema.
    Validate { file: PathBuf },
    /// Write the active catalog as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    SignalMinusBackground,
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DurationModelArg {
    LambDickeCapped,
    GrowthOde,
}

#[derive(Debug, Args)]
struct SystemArgs {
    #[arg(long)]
    molecule: String,
    /// Mode label; defaults to the mode with the largest IR intensity.
    #[arg(long)]
    mode: Option<String>,
    /// Logic ion; defaults to the ion closest in mass.
    #[arg(long)]
    ion: Option<String>,
    /// Motional mode frequency in Hz.
    #[arg(long, default_value_t = 500e3)]
    trap_freq: f64,
    /// Heating rate in quanta/s.
    #[arg(long, default_value_t = 0.1)]
    heating: f64,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    /// Rabi frequency of each bichromatic tone in Hz.
    #[arg(long, default_value_t = 300e3)]
    rabi_freq: f64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::SignalMinusBackground)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = DurationModelArg::LambDickeCapped)]
    duration_model: DurationModelArg,
    /// Count heating during the inverse mapping too.
    #[arg(long)]
    roundtrip_heating: bool,
    /// IR probe angle to the mode axis, degrees.
    #[arg(long, default_value_t = 0.0)]
    probe_angle: f64,
}

impl ProtocolArgs {
    fn params(&self, photon_count: u32) -> ProtocolParams {
        ProtocolParams {
            rabi: 2.0 * PI * self.rabi_freq,
            photon_count,
            objective: match self.objective {
                ObjectiveArg::SignalMinusBackground => Objective::SignalMinusBackground,
                ObjectiveArg::Signal => Objective::Signal,
            },
            duration_model: match self.duration_model {
                DurationModelArg::LambDickeCapped => DurationModel::LambDickeCapped,
                DurationModelArg::GrowthOde => DurationModel::GrowthOde,
            },
            roundtrip_heating: self.roundtrip_heating,
            probe_theta: self.probe_angle.to_radians(),
        }
    }

    fn describe(&self, table: &mut SweepTable) {
        table
            .meta("rabi_freq_hz", self.rabi_freq)
            .meta("objective", format!("{:?}", self.objective))
            .meta("duration_model", format!("{:?}", self.duration_model))
            .meta("roundtrip_heating", self.roundtrip_heating)
            .meta("probe_angle_deg", self.probe_angle);
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Control-beam angle in degrees; the cat size is optimized unless --alpha is given.
    #[arg(long, conflicts_with = "optimize_angle")]
    angle: Option<f64>,
    /// Optimize the control-beam angle.
    #[arg(long)]
    optimize_angle: bool,
    /// Fixed cat size (needs --angle).
    #[arg(long, requires = "angle")]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    photons: u32,
    /// Re-run the optimum with full state-vector dynamics and report the difference.
    #[arg(long)]
    validate_full_dynamics: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Scan start, cm⁻¹.
    #[arg(long, default_value_t = 800.0)]
    from: f64,
    /// Scan end, cm⁻¹.
    #[arg(long, default_value_t = 3600.0)]
    to: f64,
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    /// Pulse intensity FWHM in femtoseconds.
    #[arg(long, default_value_t = 200.0)]
    pulse_fs: f64,
    /// Resonant coherent amplitude for the strongest mode.
    #[arg(long, default_value_t = 0.5)]
    pulse_area: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PumpProbeArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Bright-state lifetime in seconds.
    #[arg(long)]
    tau1: f64,
    /// Delay grid `start:stop:count` in seconds.
    #[arg(long, default_value = "0:10e-12:21")]
    delays: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TablesArgs {
    /// 2: one photon; 3: two photons (pump-probe).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=3))]
    which: u32,
    #[arg(long, value_delimiter = ',', default_values_t = TABLE_HEATING_RATES)]
    heating_rates: Vec<f64>,
    #[arg(long, default_value_t = 500e3)]
    trap_freq: f64,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    output: OutputArgs,
}

struct Context {
    catalog: Catalog,
    source: String,
}

impl Context {
    fn load(cli: &Cli) -> Result<Self, CliError> {
        let strictness = if cli.strict { Strictness::Strict } else { Strictness::Warn };
        let path = cli.catalog.clone().or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from));
        match path {
            None => Ok(Context { catalog: builtin_catalog(), source: "builtin".into() }),
            Some(path) => {
                let loaded = read_catalog(&path, strictness)?;
                for w in &loaded.warnings {
                    eprintln!("warning: {w}");
                }
                Ok(Context { catalog: loaded.catalog, source: path.display().to_string() })
            }
        }
    }

    fn describe(&self, table: &mut SweepTable) {
        table.meta("catalog", self.source.clone()).meta("catalog_sha256", catalog_hash(&self.catalog));
    }

    fn resolve(&self, system: &SystemArgs) -> Result<(IonCrystal, VibrationalMode), CliError> {
        let molecule = self.catalog.molecule(&system.molecule).map_err(|_| not_found("molecule", &system.molecule))?;
        let mode = match &system.mode {
            Some(label) => molecule.mode(label).map_err(|_| not_found("mode", label))?,
            None => molecule.default_mode()?,
        }
        .clone();
        let ion = match &system.ion {
            Some(name) => self.catalog.ion(name).map_err(|_| not_found("ion", name))?,
            None => self.catalog.default_ion_for(molecule)?,
        };
        if !(system.trap_freq > 0.0) {
            return Err(CliError::Usage("--trap-freq must be positive".into()));
        }
        if !(system.heating >= 0.0) {
            return Err(CliError::Usage("--heating must be non-negative".into()));
        }
        let crystal = IonCrystal::new(molecule.clone(), ion.clone(), 2.0 * PI * system.trap_freq)?;
        if let Some(w) = crystal.mass_ratio_warning() {
            eprintln!("warning: {w}");
        }
        Ok((crystal, mode))
    }
}

fn not_found(kind: &str, name: &str) -> CliError {
    CliError::Usage(format!("{kind} `{name}` not found"))
}

fn describe_system(table: &mut SweepTable, crystal: &IonCrystal, mode: &VibrationalMode, system: &SystemArgs) {
    table
        .meta("molecule", crystal.molecule().name())
        .meta("mode", mode.label())
        .meta("ion", crystal.ion().name())
        .meta("trap_freq_hz", system.trap_freq)
        .meta("heating_rate", system.heating);
}

fn emit(table: &SweepTable, output: &OutputArgs) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(output.format, &mut w)?;
            w.flush()?;
        }
        None => table.write(output.format, &mut io::stdout().lock())?,
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Catalog { action: CatalogAction::Validate { file } } = &cli.command {
        return validate(file, cli.strict);
    }
    let ctx = Context::load(&cli)?;
    match cli.command {
        Command::Catalog { action } => catalog(&ctx, action),
        Command::Detect(args) => detect(&ctx, &args),
        Command::Spectrum(args) => spectrum(&ctx, &args),
        Command::Pumpprobe(args) => pumpprobe(&ctx, &args),
        Command::Tables(args) => tables(&ctx, &args),
    }
}

fn validate(file: &Path, strict: bool) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    let loaded = read_catalog(file, if strict { Strictness::Strict } else { Strictness::Warn })?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    writeln!(
        out,
        "{}: ok ({} molecules, {} ions)",
        file.display(),
        loaded.catalog.molecules().len(),
        loaded.catalog.ions().len()
    )?;
    Ok(())
}

fn molecule_json(m: &MoleculeSpec) -> serde_json::Value {
    json!({
        "kind": "molecule",
        "name": m.name(),
        "mass_da": m.mass_da(),
        "modes": m.modes().iter().map(|v| json!({
            "label": v.label(),
            "freq_cm1": v.frequency_cm1(),
            "ir_km_mol": v.ir_intensity(),
            "experimental_cm1": v.experimental_cm1(),
        })).collect::<Vec<_>>(),
    })
}

fn catalog(ctx: &Context, action: CatalogAction) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match action {
        CatalogAction::List => {
            writeln!(out, "molecules:")?;
            for m in ctx.catalog.molecules() {
                let labels: Vec<&str> = m.modes().iter().map(VibrationalMode::label).collect();
                writeln!(out, "  {:<12} {:>7.1} Da  modes: {}", m.name(), m.mass_da(), labels.join(", "))?;
            }
            writeln!(out, "ions:")?;
            for i in ctx.catalog.ions() {
                let nm = i.control_wavelength_m() * 1e9;
                writeln!(out, "  {:<12} {:>7.1} Da  control: {nm:.1} nm", i.name(), i.mass_da())?;
            }
        }
        CatalogAction::Show { name, format } => {
            if let Ok(m) = ctx.catalog.molecule(&name) {
                match format {
                    TextFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&molecule_json(m))?)?,
                    TextFormat::Text => {
                        writeln!(out, "{} ({} Da)", m.name(), m.mass_da())?;
                        for v in m.modes() {
                            writeln!(
                                out,
                                "  {:<6} {:>8.1} cm^-1  {:>6.1} km/mol",
                                v.label(),
                                v.frequency_cm1(),
                                v.ir_intensity()
                            )?;
                        }
                    }
                }
            } else if let Ok(i) = ctx.catalog.ion(&name) {
                let nm = i.control_wavelength_m() * 1e9;
                match format {
                    TextFormat::Json => writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "kind": "ion", "name": i.name(), "mass_da": i.mass_da(), "control_wavelength_nm": nm
                        }))?
                    )?,
                    TextFormat::Text => writeln!(out, "{} ({} Da), control beam {nm:.1} nm", i.name(), i.mass_da())?,
                }
            } else {
                return Err(not_found("entry", &name));
            }
        }
        CatalogAction::Export { out: path } => {
            let text = catalog_to_json(&ctx.catalog);
            match path {
                Some(path) => std::fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        CatalogAction::Validate { .. } => unreachable!("handled before the catalog is loaded"),
    }
    Ok(())
}

const OPTIMUM_COLUMNS: [(&str, &str); 9] = [
    ("efficiency", ""),
    ("signal", ""),
    ("background", ""),
    ("contrast", ""),
    ("theta_star_deg", "deg"),
    ("alpha_star", ""),
    ("duration_s", "s"),
    ("eta_control", ""),
    ("eta_probe", ""),
];

fn optimum_cells(o: &Optimum) -> Vec<Cell> {
    vec![
        o.efficiency.into(),
        o.signal.into(),
        o.background.into(),
        o.contrast.into(),
        o.theta_star.to_degrees().into(),
        o.alpha_star.into(),
        o.duration.into(),
        o.eta_control.into(),
        o.eta_probe.into(),
    ]
}

/// Full-dynamics duration and efficiency for the optimum (RWA all-orders path).
fn full_dynamics_check(
    problem: &OptimizationProblem,
    optimum: &Optimum,
) -> Result<(Option<f64>, Option<f64>, String), CliError> {
    let p = problem.params();
    if optimum.alpha_star == 0.0 {
        return Ok((Some(0.0), Some(optimum.efficiency), "trivial".into()));
    }
    let space = FockSpace::new(required_dim(optimum.alpha_star))?;
    let spec =
        CatGenSpec::with_rabi_cap(p.rabi, optimum.eta_control, CatTarget::Alpha(optimum.alpha_star), space, p.rabi)?
            .with_trap_omega(problem.crystal().trap_omega())?;
    match generate_cat_full(&spec, FullDynamicsPath::Rwa, PropagatorConfig::default()) {
        Ok(r) => {
            let exposure = if p.roundtrip_heating { 2.0 * r.duration } else { r.duration };
            let c = coherence_factor(heating_phase_variance(problem.heating_rate(), optimum.alpha_star, exposure)?)?;
            let theta_g = 2.0 * optimum.alpha_star * optimum.eta_probe * p.photon_count as f64;
            let eff = match p.objective {
                Objective::SignalMinusBackground => c * theta_g.sin().powi(2),
                Objective::Signal => 0.5 * (1.0 - c * (2.0 * theta_g).cos()),
            };
            Ok((Some(r.duration), Some(eff), "reached".into()))
        }
        Err(qls_core::Error::StalledGeneration { alpha, .. }) => {
            Ok((None, None, format!("stalled at alpha = {alpha:.3}")))
        }
        Err(e) => Err(e.into()),
    }
}

fn detect(ctx: &Context, args: &DetectArgs) -> Result<(), CliError> {
    let (crystal, mode) = ctx.resolve(&args.system)?;
    let params = args.protocol.params(args.photons);
    let problem =
        OptimizationProblem::new(crystal.clone(), mode.frequency_cm1(), args.system.heating)?.with_params(params)?;
    let optimum: Optimum = match (args.angle, args.alpha) {
        (Some(angle), Some(alpha)) => efficiency_at(&problem, angle.to_radians(), alpha)?.into(),
        (Some(angle), None) => optimize_alpha(&problem, angle.to_radians())?.into(),
        (None, _) => optimize_angle(&problem)?,
    };
    let mut columns = OPTIMUM_COLUMNS.to_vec();
    let mut cells = optimum_cells(&optimum);
    if args.validate_full_dynamics {
        let (duration, efficiency, status) = full_dynamics_check(&problem, &optimum)?;
        columns.extend([
            ("full_dynamics_duration_s", "s"),
            ("full_dynamics_efficiency", ""),
            ("duration_discrepancy", ""),
        ]);
        cells.extend([
            duration.into(),
            efficiency.into(),
            duration.filter(|_| optimum.duration > 0.0).map(|d| d / optimum.duration - 1.0).into(),
        ]);
        eprintln!("full dynamics: {status}");
    }
    let mut table = SweepTable::new(&columns);
    table.push(cells);
    table.meta("command", "detect").meta("photons", args.photons);
    table.meta("angle_deg", args.angle.map_or(serde_json::Value::from("optimized"), serde_json::Value::from));
    if let Some(alpha) = args.alpha {
        table.meta("alpha", alpha);
    }
    ctx.describe(&mut table);
    describe_system(&mut table, &crystal, &mode, &args.system);
    args.protocol.describe(&mut table);
    emit(&table, &args.output)
}

fn spectrum(ctx: &Context, args: &SpectrumArgs) -> Result<(), CliError> {
    if !(args.step > 0.0) || !(args.from < args.to) || !(args.from > 0.0) {
        return Err(CliError::Usage("need 0 < --from < --to and --step > 0".into()));
    }
    if !(args.pulse_fs > 0.0) || !(args.pulse_area >= 0.0) {
        return Err(CliError::Usage("need --pulse-fs > 0 and --pulse-area >= 0".into()));
    }
    let (crystal, mode) = ctx.resolve(&args.system)?;
    let count = ((args.to - args.from) / args.step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| args.from + args.step * i as f64).collect();
    let problem = OptimizationProblem::new(crystal.clone(), mode.frequency_cm1(), args.system.heating)?
        .with_params(args.protocol.params(1))?;
    let optimum = optimize_angle(&problem)?;
    let cat = CatSetting { alpha: optimum.alpha_star, contrast: optimum.contrast };
    let pulse = ScanPulse { duration_fwhm: args.pulse_fs * 1e-15, area: args.pulse_area };
    let points = grid
        .par_iter()
        .map(|&nu| spectrum_scan_with_cat(&crystal, &[nu], pulse, cat).map(|mut v| v.remove(0)))
        .collect::<Result<Vec<_>, _>>()?;

    let labels: Vec<String> = crystal.molecule().modes().iter().map(|m| format!("beta_{}", m.label())).collect();
    let mut columns = vec![("wavenumber_cm1", "cm^-1"), ("spin_flip_probability", "")];
    columns.extend(labels.iter().map(|l| (l.as_str(), "")));
    let mut table = SweepTable::new(&columns);
    for p in &points {
        let mut row: Vec<Cell> = vec![p.wavenumber_cm1.into(), p.spin_flip_probability.into()];
        row.extend(p.mode_amplitudes.iter().map(|&b| Cell::from(b)));
        table.push(row);
    }
    table
        .meta("command", "spectrum")
        .meta("pulse_fwhm_fs", args.pulse_fs)
        .meta("pulse_area", args.pulse_area)
        .meta("alpha_star", optimum.alpha_star)
        .meta("theta_star_deg", optimum.theta_star.to_degrees())
        .meta("contrast", optimum.contrast);
    ctx.describe(&mut table);
    describe_system(&mut table, &crystal, &mode, &args.system);
    args.protocol.describe(&mut table);
    emit(&table, &args.output)
}

fn parse_delays(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--delays expects start:stop:count, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts.as_slice() else { return Err(bad()) };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || !(start >= 0.0) || !(stop >= start) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect())
}

fn pumpprobe(ctx: &Context, args: &PumpProbeArgs) -> Result<(), CliError> {
    if !(args.tau1 > 0.0) {
        return Err(CliError::Usage("--tau1 must be positive".into()));
    }
    let delays = parse_delays(&args.delays)?;
    let (crystal, mode) = ctx.resolve(&args.system)?;
    let model = IvrModel::new(args.tau1, mode.clone())?;
    let curve = pump_probe_curve(&model, &crystal, args.system.heating, &delays, args.protocol.params(2))?;
    let mut table = SweepTable::new(&[("delay_s", "s"), ("bright_population", ""), ("probability", "")]);
    for p in &curve.points {
        table.push(vec![p.delay.into(), bright_population(p.delay, &model)?.into(), p.probability.into()]);
    }
    let sat = &curve.saturation;
    table
        .meta("command", "pumpprobe")
        .meta("tau1_s", args.tau1)
        .meta("delays", args.delays.clone())
        .meta("two_photon_efficiency", sat.efficiency)
        .meta("alpha_star", sat.alpha_star)
        .meta("theta_star_deg", sat.theta_star.to_degrees());
    ctx.describe(&mut table);
    describe_system(&mut table, &crystal, &mode, &args.system);
    args.protocol.describe(&mut table);
    emit(&table, &args.output)
}

fn tables(ctx: &Context, args: &TablesArgs) -> Result<(), CliError> {
    if !(args.trap_freq > 0.0) || args.heating_rates.iter().any(|r| !(*r >= 0.0)) {
        return Err(CliError::Usage("need --trap-freq > 0 and non-negative heating rates".into()));
    }
    let photons = args.which - 1;
    let params = args.protocol.params(photons);
    let trap = 2.0 * PI * args.trap_freq;
    let jobs: Vec<_> =
        TABLE_ROWS.iter().flat_map(|row| args.heating_rates.iter().map(move |&rate| (row, rate))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(row, rate)| table_cell(&ctx.catalog, row, trap, rate, params))
        .collect::<Result<Vec<TableCell>, _>>()?;

    let mut columns = vec![("molecule", ""), ("mode", ""), ("ion", ""), ("heating_rate", "quanta/s")];
    columns.extend(OPTIMUM_COLUMNS);
    columns.extend([("reference", ""), ("deviation_pp", "pp")]);
    let mut table = SweepTable::new(&columns);
    for c in &cells {
        let mut row: Vec<Cell> =
            vec![c.row.molecule.into(), c.row.mode.into(), c.row.ion.into(), c.heating_rate.into()];
        row.extend(optimum_cells(&c.optimum));
        row.push(c.reference.into());
        row.push(c.reference.map(|r| 100.0 * (c.optimum.efficiency - r)).into());
        table.push(row);
    }
    let worst =
        cells.iter().filter_map(|c| c.reference.map(|r| (c.optimum.efficiency - r).abs() * 100.0)).fold(0.0, f64::max);
    table
        .meta("command", "tables")
        .meta("which", args.which)
        .meta("photons", photons)
        .meta("trap_freq_hz", args.trap_freq)
        .meta("heating_rates", args.heating_rates.clone())
        .meta("max_abs_deviation_pp", crate::table::round_significant(worst));
    ctx.describe(&mut table);
    args.protocol.describe(&mut table);
    emit(&table, &args.output)
}
