use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use trispin_core::gates::{self, Circuit, GateRecord};
use trispin_core::io::{self, StateFile};
use trispin_core::pulsesim::{self, CrotVariant, EvolveOptions, PulseProgram, SpinSystem};
use trispin_core::qcore::{fidelity, psd_project};
use trispin_core::reconstruct::{reconstruct_detailed, reconstruct_from_ab_ac, ReconstructConfig};
use trispin_core::states::{self, basis_label, parse_basis_label, PseudopureSpec};
use trispin_core::tomo::{self, PairLabel, Target, TomoOp};
use trispin_core::{CMatrix, DensityMatrix, Error, GenericParams, Ket};

#[derive(Parser)]
#[command(name = "trispin", version, about = "Three-qubit state preparation, tomography and reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a closed-form state.
    Make(MakeArgs),
    /// Run a gate-level preparation circuit.
    Circuit(CircuitArgs),
    /// Compile and simulate a pulse sequence.
    PulseSim(PulseArgs),
    /// Simulate tomography readouts of a state.
    Tomo(TomoArgs),
    /// Invert tomography records to a density matrix.
    TomoInvert(InvertArgs),
    /// Rebuild a pure state from two two-qubit marginals.
    Reconstruct(ReconstructArgs),
    /// Normalized overlap of two states.
    Fidelity(FidelityArgs),
    /// Write the real and imaginary bars of a density matrix as CSV.
    ExportTomograph(ExportArgs),
    /// Report the rank of a tomography operation set.
    RankCheck(RankArgs),
    /// Prepare, tomograph, invert and score in one run.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Generic,
    Ghz,
    W,
    Pseudopure,
}

/// Preparation angles in degrees.
#[derive(Args, Clone, Debug)]
struct Angles {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Args)]
struct MakeArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[command(flatten)]
    angles: Angles,
    /// Basis label for pseudopure states.
    #[arg(long, default_value = "000")]
    state: String,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Multiply the |001> amplitude of a W state by i.
    #[arg(long)]
    phased: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(value_enum, default_value = "generic")]
    kind: Kind,
    #[command(flatten)]
    angles: Angles,
    /// Merge the final Toffoli and phase gates into one transition pulse.
    #[arg(long)]
    fuse: bool,
    /// Run this circuit file instead of a built-in sequence.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Input basis state; defaults to 100 for W and 000 otherwise.
    #[arg(long)]
    input: Option<String>,
    /// Write the gate list as JSON.
    #[arg(long)]
    circuit_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Ideal,
    Short,
}

#[derive(Args)]
struct PulseArgs {
    #[arg(value_enum, default_value = "generic")]
    kind: Kind,
    #[command(flatten)]
    angles: Angles,
    /// Spin system JSON; defaults to the built-in couplings and times.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "off")]
    relaxation: OnOff,
    #[arg(long, value_enum, default_value = "short")]
    variant: VariantArg,
    /// Extra z rotation per qubit left in place at the end, degrees.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    residual: Option<Vec<f64>>,
    #[arg(long)]
    program_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TomoArgs {
    /// full, seven, ab, bc, ac, or a comma-separated list such as III,IXI.
    #[arg(long, default_value = "full")]
    ops: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Gaussian noise width on each line component.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// full, ab, bc or ac.
    #[arg(long, default_value = "full")]
    target: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    ab: PathBuf,
    #[arg(long, required_unless_present = "ac", conflicts_with = "ac")]
    bc: Option<PathBuf>,
    #[arg(long)]
    ac: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    tol_degen: f64,
    #[arg(long, default_value_t = 0.2)]
    tol_inconsistent: f64,
}

#[derive(Args)]
struct FidelityArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long, default_value = "full")]
    ops: String,
    /// full, ab, bc or ac.
    #[arg(long, default_value = "full")]
    target: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Prep {
    Closed,
    Gate,
    Pulse,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(value_enum, default_value = "generic")]
    kind: Kind,
    #[command(flatten)]
    angles: Angles,
    #[arg(long, value_enum, default_value = "pulse")]
    prep: Prep,
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "off")]
    relaxation: OnOff,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also rebuild the state from AB and BC marginal tomography.
    #[arg(long)]
    reconstruct: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn distinct(input: &Path, output: &Path) -> Result<()> {
    if input == output {
        bail!("input and output paths must differ: {}", input.display());
    }
    Ok(())
}

fn generic_params(a: &Angles) -> Result<GenericParams> {
    Ok(GenericParams::from_degrees(a.alpha, a.beta, a.gamma, a.delta, a.phi)?)
}

fn quarter_turn(name: &'static str, deg: f64) -> Result<f64> {
    if !(0.0..=90.0).contains(&deg) {
        return Err(Error::OutOfRange { name, value: deg, range: "[0, 90] degrees" }.into());
    }
    Ok(deg.to_radians())
}

/// Closed-form target of a preparation kind.
fn target_ket(kind: Kind, a: &Angles) -> Result<Ket> {
    Ok(match kind {
        Kind::Generic => states::generic_ket(&generic_params(a)?)?,
        Kind::Ghz => states::ghz_ket(quarter_turn("alpha", a.alpha)?)?,
        Kind::W => states::w_ket(quarter_turn("beta", a.beta)?, quarter_turn("gamma", a.gamma)?)?,
        Kind::Pseudopure => bail!("pseudopure states have no preparation sequence"),
    })
}

fn print_amplitudes(k: &Ket) {
    println!("{:>6} {:>10} {:>10} {:>9} {:>9}", "basis", "re", "im", "|amp|", "phase");
    for (i, z) in k.amps().iter().enumerate() {
        if z.norm() > 1e-12 {
            println!("{:>6} {:>10.6} {:>10.6} {:>9.6} {:>8.2}°", basis_label(i, 3), z.re, z.im, z.norm(), z.arg().to_degrees());
        }
    }
}

fn save_state(path: &Option<PathBuf>, state: &StateFile) -> Result<()> {
    if let Some(p) = path {
        io::write_state(p, state).with_context(|| format!("writing {}", p.display()))?;
        info!("wrote {}", p.display());
    }
    Ok(())
}

fn load_density(path: &Path) -> Result<DensityMatrix> {
    let sf = io::read_state(path).with_context(|| format!("reading {}", path.display()))?;
    sf.density().with_context(|| format!("validating {}", path.display()))
}

/// Loads a possibly noisy marginal and projects it onto the density matrices.
fn load_marginal(path: &Path) -> Result<DensityMatrix> {
    let m = io::read_state(path).with_context(|| format!("reading {}", path.display()))?.matrix()?;
    if m.dim() != 4 {
        bail!("{} is {}x{}, expected a two-qubit marginal", path.display(), m.dim(), m.dim());
    }
    Ok(psd_project(&m)?)
}

fn cmd_make(a: MakeArgs) -> Result<()> {
    match a.kind {
        Kind::Pseudopure => {
            let spec = PseudopureSpec::new(parse_basis_label(&a.state)?, a.epsilon)?;
            let rho = states::pseudopure(&spec)?;
            println!("pseudopure |{}> with epsilon {}", a.state, a.epsilon);
            save_state(&a.out, &StateFile::from_matrix(rho.matrix()))
        }
        Kind::W if a.phased => {
            let k = states::phased_w_ket();
            print_amplitudes(&k);
            save_state(&a.out, &StateFile::from_ket(&k))
        }
        kind => {
            let k = target_ket(kind, &a.angles)?;
            print_amplitudes(&k);
            save_state(&a.out, &StateFile::from_ket(&k))
        }
    }
}

fn builtin_circuit(kind: Kind, a: &Angles, fuse: bool) -> Result<Circuit> {
    Ok(match kind {
        Kind::Generic => gates::build_generic_circuit(&generic_params(a)?, fuse)?,
        Kind::Ghz => gates::ghz_circuit(quarter_turn("alpha", a.alpha)?)?,
        Kind::W => gates::w_circuit(quarter_turn("beta", a.beta)?, quarter_turn("gamma", a.gamma)?)?,
        Kind::Pseudopure => bail!("pseudopure states have no preparation circuit"),
    })
}

fn cmd_circuit(a: CircuitArgs) -> Result<()> {
    let circuit = match &a.circuit {
        Some(path) => {
            let records: Vec<GateRecord> = io::read_json(path).with_context(|| format!("reading {}", path.display()))?;
            Circuit::from_records(&records)?
        }
        None => builtin_circuit(a.kind, &a.angles, a.fuse)?,
    };
    let input = match (&a.input, a.kind) {
        (Some(l), _) => parse_basis_label(l)?,
        (None, Kind::W) if a.circuit.is_none() => 0b100,
        _ => 0,
    };
    let out = gates::apply(&circuit, &Ket::basis(8, input)?)?;
    for g in &circuit.gates {
        println!("{}", g.label);
    }
    print_amplitudes(&out);
    if a.circuit.is_none() {
        let f = out.overlap(&target_ket(a.kind, &a.angles)?);
        println!("overlap with closed form: {f:.12}");
    }
    if let Some(p) = &a.circuit_out {
        io::write_json(p, &circuit.to_records())?;
    }
    save_state(&a.out, &StateFile::from_ket(&out))
}

fn load_system(path: &Option<PathBuf>) -> Result<SpinSystem> {
    match path {
        Some(p) => io::read_json(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(SpinSystem::default()),
    }
}

struct Prepared {
    program: PulseProgram,
    input: usize,
    target: Ket,
}

fn compile(kind: Kind, a: &Angles, sys: &SpinSystem, variant: VariantArg, residual: [f64; 3]) -> Result<Prepared> {
    let target = target_ket(kind, a)?;
    let (program, input) = match kind {
        Kind::Generic => {
            let v = match variant {
                VariantArg::Ideal => CrotVariant::Ideal,
                VariantArg::Short => CrotVariant::Short,
            };
            (pulsesim::compile_generic_variant(&generic_params(a)?, sys, v)?, 0)
        }
        Kind::Ghz => (pulsesim::compile_ghz(a.alpha.to_radians(), sys)?, 0),
        Kind::W => (pulsesim::compile_w(a.beta.to_radians(), a.gamma.to_radians(), sys)?, 0b100),
        Kind::Pseudopure => bail!("pseudopure states have no pulse sequence"),
    };
    let residual_rad = residual.map(f64::to_radians);
    let target = if residual.iter().any(|&r| r != 0.0) {
        Ket::new(pulsesim::zrot_unitary(residual_rad).apply(target.amps()))?
    } else {
        target
    };
    Ok(Prepared { program: program.finalize_with_residual(residual_rad), input, target })
}

fn initial_state(input: usize) -> Result<DensityMatrix> {
    Ok(states::pseudopure(&PseudopureSpec::new(input, 1.0)?)?)
}

/// `<psi|rho|psi>`.
fn overlap(rho: &DensityMatrix, k: &Ket) -> f64 {
    let v = rho.matrix().apply(k.amps());
    k.amps().iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum()
}

fn cmd_pulse_sim(a: PulseArgs) -> Result<()> {
    let sys = load_system(&a.system)?;
    let residual = match a.residual.as_deref() {
        Some(&[x, y, z]) => [x, y, z],
        Some(v) => bail!("--residual takes three comma-separated angles, got {}", v.len()),
        None => [0.0; 3],
    };
    let prep = compile(a.kind, &a.angles, &sys, a.variant, residual)?;
    let rho0 = initial_state(prep.input)?;
    let out = pulsesim::evolve(&prep.program, &rho0, &sys, a.relaxation == OnOff::On)?;
    let f = fidelity(out.matrix(), prep.target.to_density().matrix())?;
    println!("events: {}", prep.program.events.len());
    println!("duration: {:.3} ms", prep.program.duration() * 1e3);
    println!("fidelity: {f:.4}");
    println!("target overlap: {:.4}", overlap(&out, &prep.target));
    if let Some(p) = &a.program_out {
        io::write_json(p, &prep.program)?;
    }
    save_state(&a.out, &StateFile::from_matrix(out.matrix()))
}

fn parse_ops(spec: &str) -> Result<(Vec<TomoOp>, Target)> {
    Ok(match spec.to_ascii_lowercase().as_str() {
        "full" => (tomo::full_ops(), Target::Full),
        "seven" => (tomo::seven_ops(), Target::Full),
        "ab" | "bc" | "ac" => {
            let label: PairLabel = spec.parse()?;
            (label.ops(), Target::Pair(label))
        }
        _ => (spec.split(',').map(str::parse).collect::<std::result::Result<_, _>>()?, Target::Full),
    })
}

fn cmd_tomo(a: TomoArgs) -> Result<()> {
    distinct(&a.input, &a.out)?;
    let rho = load_density(&a.input)?;
    let (ops, _) = parse_ops(&a.ops)?;
    let mut records = tomo::simulate_set(&rho, &ops)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    tomo::add_noise(&mut records, a.noise, &mut rng)?;
    io::write_records_file(&a.out, &records)?;
    println!("{} operations, {} lines written", records.len(), records.len() * 12);
    Ok(())
}

fn cmd_tomo_invert(a: InvertArgs) -> Result<()> {
    distinct(&a.input, &a.out)?;
    let records = io::read_records_file(&a.input)?;
    let target: Target = a.target.parse()?;
    let (raw, residual) = tomo::invert_raw(&records, target)?;
    let rho = psd_project(&raw)?;
    println!("residual: {residual:.3e}");
    println!("projection shift: {:.3e}", rho.matrix().max_abs_diff(&raw));
    save_state(&Some(a.out), &StateFile::from_matrix(rho.matrix()))
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<()> {
    let cfg = ReconstructConfig { degeneracy_tol: a.tol_degen, inconsistency_tol: a.tol_inconsistent };
    let ab = load_marginal(&a.ab)?;
    let ket = match (&a.bc, &a.ac) {
        (Some(bc), _) => {
            let r = reconstruct_detailed(&ab, &load_marginal(bc)?, &cfg)?;
            println!("schmidt weights: {:.4} {:.4}", r.schmidt.p[0], r.schmidt.p[1]);
            println!("relative phase: {:.2}°", r.alpha.to_degrees());
            println!("AB marginal distance: {:.4}", r.ab_distance);
            r.ket
        }
        (None, Some(ac)) => reconstruct_from_ab_ac(&ab, &load_marginal(ac)?, &cfg)?,
        (None, None) => bail!("one of --bc or --ac is required"),
    };
    print_amplitudes(&ket.canonical_phase());
    save_state(&a.out, &StateFile::from_ket(&ket.canonical_phase()))
}

fn load_matrix(path: &Path) -> Result<CMatrix> {
    io::read_state(path).with_context(|| format!("reading {}", path.display()))?.matrix().map_err(Into::into)
}

fn cmd_fidelity(a: FidelityArgs) -> Result<()> {
    let f = fidelity(&load_matrix(&a.a)?, &load_matrix(&a.b)?)?;
    println!("{f:.6}");
    Ok(())
}

fn cmd_export(a: ExportArgs) -> Result<()> {
    distinct(&a.input, &a.out)?;
    let m = load_matrix(&a.input)?;
    let f = std::fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    io::write_tomograph(std::io::BufWriter::new(f), &m)?;
    println!("{} bars written", m.dim() * m.dim());
    Ok(())
}

fn cmd_rank(a: RankArgs) -> Result<()> {
    let (ops, preset) = parse_ops(&a.ops)?;
    let target = if a.target.eq_ignore_ascii_case("full") { preset } else { a.target.parse()? };
    let (rank, missing) = tomo::rank_report(&ops, target);
    let needed = match target {
        Target::Full => 63,
        Target::Pair(_) => 15,
    };
    let names: Vec<String> = ops.iter().map(ToString::to_string).collect();
    println!("ops: {}", names.join(" "));
    println!("rank: {rank} / {needed}");
    if !missing.is_empty() {
        println!("unobserved: {}", missing.join(", "));
    }
    Ok(())
}

#[derive(Serialize)]
struct PipelineReport {
    kind: String,
    prep: String,
    relaxation: bool,
    noise: f64,
    seed: u64,
    duration_ms: Option<f64>,
    prepared_fidelity: f64,
    prepared_overlap: f64,
    tomography_residual: f64,
    tomographed_fidelity: f64,
    reconstruction_fidelity: Option<f64>,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.with_context(|| format!("pipeline stage `{name}` failed"))
}

fn cmd_pipeline(a: PipelineArgs) -> Result<()> {
    let sys = load_system(&a.system)?;
    let relaxation = a.relaxation == OnOff::On;
    let (rho, target, duration) = stage("prepare", (|| {
        Ok(match a.prep {
            Prep::Closed => {
                let t = target_ket(a.kind, &a.angles)?;
                (t.to_density(), t, None)
            }
            Prep::Gate => {
                let c = builtin_circuit(a.kind, &a.angles, true)?;
                let input = if matches!(a.kind, Kind::W) { 0b100 } else { 0 };
                let out = gates::apply(&c, &Ket::basis(8, input)?)?;
                (out.to_density(), target_ket(a.kind, &a.angles)?, None)
            }
            Prep::Pulse => {
                let p = compile(a.kind, &a.angles, &sys, VariantArg::Short, [0.0; 3])?;
                let out = pulsesim::evolve_with(
                    &p.program,
                    &initial_state(p.input)?,
                    &sys,
                    &EvolveOptions { relaxation, ..EvolveOptions::default() },
                )?;
                (out, p.target, Some(p.program.duration() * 1e3))
            }
        })
    })())?;
    let target_rho = target.to_density();
    let prepared_fidelity = fidelity(rho.matrix(), target_rho.matrix())?;

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (tomographed, residual) = stage("tomography", (|| {
        let mut recs = tomo::simulate_set(&rho, &tomo::full_ops())?;
        tomo::add_noise(&mut recs, a.noise, &mut rng)?;
        let (raw, residual) = tomo::invert_raw(&recs, Target::Full)?;
        Ok((psd_project(&raw)?, residual))
    })())?;
    let tomographed_fidelity = fidelity(tomographed.matrix(), target_rho.matrix())?;

    let reconstruction_fidelity = if a.reconstruct {
        Some(stage("reconstruct", (|| {
            let mut pair = |label: PairLabel| -> Result<DensityMatrix> {
                let mut recs = tomo::simulate_set(&rho, &label.ops())?;
                tomo::add_noise(&mut recs, a.noise, &mut rng)?;
                Ok(tomo::invert(&recs, Target::Pair(label))?)
            };
            let (ab, bc) = (pair(PairLabel::AB)?, pair(PairLabel::BC)?);
            let r = reconstruct_detailed(&ab, &bc, &ReconstructConfig::default())?;
            Ok(fidelity(r.ket.to_density().matrix(), target_rho.matrix())?)
        })())?)
    } else {
        None
    };

    let report = PipelineReport {
        kind: format!("{:?}", a.kind).to_lowercase(),
        prep: format!("{:?}", a.prep).to_lowercase(),
        relaxation,
        noise: a.noise,
        seed: a.seed,
        duration_ms: duration,
        prepared_fidelity,
        prepared_overlap: overlap(&rho, &target),
        tomography_residual: residual,
        tomographed_fidelity,
        reconstruction_fidelity,
    };
    println!("prepared fidelity: {prepared_fidelity:.4}");
    println!("prepared target overlap: {:.4}", overlap(&rho, &target));
    println!("tomography residual: {residual:.3e}");
    println!("tomographed fidelity: {tomographed_fidelity:.4}");
    if let Some(f) = reconstruction_fidelity {
        println!("reconstruction fidelity: {f:.4}");
    }
    if let Some(p) = &a.report {
        io::write_json(p, &report)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Make(a) => cmd_make(a),
        Command::Circuit(a) => cmd_circuit(a),
        Command::PulseSim(a) => cmd_pulse_sim(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::TomoInvert(a) => cmd_tomo_invert(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Fidelity(a) => cmd_fidelity(a),
        Command::ExportTomograph(a) => cmd_export(a),
        Command::RankCheck(a) => cmd_rank(a),
        Command::Pipeline(a) => cmd_pipeline(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Degenerate { .. }) | Some(Error::PhaseIndeterminate { .. }) => 2,
        Some(Error::Inconsistent { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        let e: anyhow::Error = Error::Degenerate { gap: 0.0, tol: 1e-3 }.into();
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = Error::PhaseIndeterminate { norm: 0.0 }.into();
        assert_eq!(exit_code(&e.context("stage")), 2);
        let e: anyhow::Error = Error::Inconsistent { diff: 0.5 }.into();
        assert_eq!(exit_code(&e), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
    }

    #[test]
    fn op_specs() {
        assert_eq!(parse_ops("full").unwrap().0.len(), 11);
        assert_eq!(parse_ops("seven").unwrap().0.len(), 7);
        assert_eq!(parse_ops("bc").unwrap().1, Target::Pair(PairLabel::BC));
        assert_eq!(parse_ops("III,XXX").unwrap().0.len(), 2);
        assert!(parse_ops("III,ZZZ").is_err());
    }

    #[test]
    fn angle_ranges_named() {
        let a = Angles { alpha: 120.0, beta: 0.0, gamma: 0.0, delta: 0.0, phi: 0.0 };
        let msg = format!("{:#}", target_ket(Kind::Generic, &a).unwrap_err());
        assert!(msg.contains("alpha"), "{msg}");
        let msg = format!("{:#}", target_ket(Kind::Ghz, &a).unwrap_err());
        assert!(msg.contains("alpha"), "{msg}");
    }
}
