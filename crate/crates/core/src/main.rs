use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rydgate::atomic::{solve_radial, GridSpec, RydbergLevel};
use rydgate::blockade::{blockade_shift, bright_pair_state, Scheme};
use rydgate::gate::{bell_fidelity, calibrate, pulse_duration, BlockadeMode, GateParams, PropagatorConfig};
use rydgate::pair::{C6Options, PairModel};
use rydgate::species::StateLabel;
use rydgate::sweep::{csv_bytes, run_map, sha256_hex, Manifest, OutputEntry, RangeSpec, SweepConfig, DEFAULT_GAMMA_R};
use rydgate::{Error, SpeciesModel, Term};

#[derive(Parser)]
#[command(name = "rydgate", version, about = "Rydberg blockade shift and CZ gate fidelity versus R and θ")]
struct Cli {
    /// Species data file (TOML). Defaults to the bundled Rb87 table.
    #[arg(long, global = true)]
    species: Option<PathBuf>,
    /// Sweep configuration (TOML), used by `map`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; all computations are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Level energies and effective quantum numbers.
    Levels {
        #[arg(long, default_value_t = 66)]
        n_min: u32,
        #[arg(long, default_value_t = 74)]
        n_max: u32,
        /// Terms such as s1/2 (repeatable); all series up to l_max by default.
        #[arg(long)]
        term: Vec<String>,
    },
    /// Channel C6 coefficients and their dominant pair terms.
    C6 {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        c6: C6Args,
    },
    /// Mean blockade shift at one point or over a grid.
    Blockade {
        #[arg(long)]
        state: String,
        /// Separation in μm.
        #[arg(long = "R", alias = "r")]
        r: Option<f64>,
        /// Angle in rad between the interatomic axis and the polarization.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Grid mode: start:stop:step in μm.
        #[arg(long)]
        r_range: Option<String>,
        /// Grid mode: start:stop:step in rad.
        #[arg(long)]
        theta_range: Option<String>,
        #[command(flatten)]
        c6: C6Args,
    },
    /// Two-pulse gate at one point or over an Ω sweep.
    Gate {
        /// Ω/2π in MHz.
        #[arg(long)]
        omega: Option<f64>,
        /// Signed δ_R/2π in MHz (repeatable in sweep mode).
        #[arg(long = "deltaR", alias = "delta-r", allow_negative_numbers = true)]
        delta_r: Vec<f64>,
        /// Rydberg decay rate in 1/μs.
        #[arg(long, default_value_t = DEFAULT_GAMMA_R)]
        gamma: f64,
        /// Derive Δ and ξ from the calibration (default unless --delta and --xi are given).
        #[arg(long)]
        calibrate: bool,
        /// Δ/2π in MHz.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        /// Drop |rr⟩ (perfect blockade).
        #[arg(long)]
        perfect: bool,
        /// Sweep mode: Ω/2π start:stop:step in MHz.
        #[arg(long)]
        omega_range: Option<String>,
    },
    /// Full (R, θ) map from a sweep configuration; writes CSV plus a manifest.
    Map,
    /// Radial wavefunction as two columns r (a0), χ(r).
    Wavefunction {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Args, Clone, Copy)]
struct C6Args {
    /// Intermediate n window around the initial n.
    #[arg(long, default_value_t = 4)]
    window: u32,
    /// Drop pair terms with |δ_AB| above this many GHz (negative keeps all).
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    cutoff: f64,
    /// Förster-resonance guard in MHz.
    #[arg(long, default_value_t = 10.0)]
    guard: f64,
}

impl C6Args {
    fn options(self) -> C6Options {
        C6Options {
            n_window: self.window,
            defect_cutoff_ghz: (self.cutoff >= 0.0).then_some(self.cutoff),
            guard_mhz: self.guard,
            ..C6Options::default()
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Schema(_) | Error::DefectOrdering(_) | Error::Io { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Run(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Run(Error::Output(e.to_string()))
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if cli.seed.is_some() {
        log::info!("--seed is accepted for interface stability; no computation is stochastic");
    }
    let species_source = match &cli.species {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?,
        None => rydgate::species::RB87_TOML.to_string(),
    };
    let species = SpeciesModel::from_toml_str(&species_source)?;

    match &cli.command {
        Command::Levels { n_min, n_max, term } => {
            let terms: Vec<Term> = if term.is_empty() {
                species.series().map(|(t, _)| t).collect()
            } else {
                term.iter().map(|t| t.parse()).collect::<Result<_, _>>()?
            };
            let mut out = String::from("n,term,n_star,energy_GHz\n");
            for t in terms {
                for n in (*n_min).max(t.l + 1)..=*n_max {
                    let lv = RydbergLevel::new(&species, n, t)?;
                    out += &format!("{n},{t},{},{}\n", lv.n_star, lv.energy_ghz);
                }
            }
            emit(cli.output.as_deref(), out.as_bytes())
        }
        Command::C6 { state, c6 } => {
            let label: StateLabel = state.parse()?;
            let model = PairModel::new(&species, label.n, label.term, &c6.options())?;
            let mut out = String::from("channel,C6_GHz_um6,dominance,n_A,n_B,delta_AB_GHz,radial_product_a0sq,term_C6_GHz_um6\n");
            for ch in &model.channels {
                if ch.pair_terms.is_empty() {
                    out += &format!("{},{},{},,,,,\n", ch.spec.label(), ch.c6, ch.dominance());
                }
                for t in &ch.pair_terms {
                    out += &format!(
                        "{},{},{},{},{},{},{},{}\n",
                        ch.spec.label(),
                        ch.c6,
                        ch.dominance(),
                        t.n_a,
                        t.n_b,
                        t.defect_ghz,
                        t.radial_product,
                        t.c6
                    );
                }
            }
            emit(cli.output.as_deref(), out.as_bytes())
        }
        Command::Blockade {
            state,
            r,
            theta,
            r_range,
            theta_range,
            c6,
        } => {
            let label: StateLabel = state.parse()?;
            let scheme = Scheme::from_term(label.term)?;
            let model = PairModel::new(&species, label.n, label.term, &c6.options())?;
            let bright = bright_pair_state(scheme);
            if r_range.is_some() || theta_range.is_some() {
                let rs = match r_range {
                    Some(s) => parse_range(s)?.points(),
                    None => vec![r.ok_or_else(|| CliError::Usage("need --R or --r-range".into()))?],
                };
                let ts = match theta_range {
                    Some(s) => parse_range(s)?.points(),
                    None => vec![*theta],
                };
                let mut out = String::from("R,theta,delta_R_MHz,error\n");
                for &rv in &rs {
                    for &tv in &ts {
                        match blockade_shift(&model.spectrum, &bright, rv, tv) {
                            Ok(b) => out += &format!("{rv},{tv},{},\n", b.delta_r_mhz),
                            Err(e) => out += &format!("{rv},{tv},,\"{e}\"\n"),
                        }
                    }
                }
                emit(cli.output.as_deref(), out.as_bytes())
            } else {
                let rv = r.ok_or_else(|| CliError::Usage("need --R or --r-range".into()))?;
                let b = blockade_shift(&model.spectrum, &bright, rv, *theta)?;
                let mut out = format!(
                    "state {label}  R = {rv} um  theta = {theta} rad\ndelta_R = {} MHz (signed {} MHz)\n\nenergy_MHz,kappa_sq\n",
                    b.delta_r_mhz, b.signed_delta_r_mhz
                );
                for o in &b.overlaps {
                    out += &format!("{},{}\n", o.energy_mhz, o.weight);
                }
                emit(cli.output.as_deref(), out.as_bytes())
            }
        }
        Command::Gate {
            omega,
            delta_r,
            gamma,
            calibrate: _,
            delta,
            xi,
            perfect,
            omega_range,
        } => {
            let mode = if *perfect {
                BlockadeMode::Perfect
            } else {
                BlockadeMode::Finite
            };
            let shifts = if delta_r.is_empty() {
                if !perfect {
                    return Err(CliError::Usage("need --deltaR or --perfect".into()));
                }
                vec![f64::INFINITY]
            } else {
                delta_r.clone()
            };
            let omegas = match (omega_range, omega) {
                (Some(s), _) => parse_range(s)?.points(),
                (None, Some(o)) => vec![*o],
                (None, None) => return Err(CliError::Usage("need --omega or --omega-range".into())),
            };
            let params_for = |om: f64, dr: f64| -> CliResult<GateParams> {
                let (d, x) = match (delta, xi) {
                    (Some(d), Some(x)) => (*d, *x),
                    (None, None) => {
                        let c = calibrate(om)?;
                        (c.delta_mhz, c.xi)
                    }
                    _ => return Err(CliError::Usage("--delta and --xi must be given together".into())),
                };
                Ok(GateParams {
                    omega_mhz: om,
                    delta_mhz: d,
                    xi: x,
                    tau_ns: pulse_duration(om, d)?,
                    delta_r_mhz: if dr.is_finite() { dr } else { 0.0 },
                    gamma_r: *gamma,
                    stark_phase: 0.0,
                    mode,
                })
            };
            let cfg = PropagatorConfig::default();
            if omegas.len() == 1 && shifts.len() == 1 {
                let p = params_for(omegas[0], shifts[0])?;
                let g = bell_fidelity(&p, &cfg)?;
                let names = ["aa", "ab", "ba", "bb"];
                let mut out = format!(
                    "omega/2pi = {} MHz  delta/2pi = {} MHz  xi = {} rad  tau = {} ns  2tau = {} ns\n",
                    p.omega_mhz,
                    p.delta_mhz,
                    p.xi,
                    p.tau_ns,
                    2.0 * p.tau_ns
                );
                out += &format!("mode = {mode:?}  delta_R/2pi = {} MHz  gamma = {} /us\n", p.delta_r_mhz, p.gamma_r);
                out += "sector,amplitude_re,amplitude_im,phase_rad,leakage\n";
                for k in 0..4 {
                    out += &format!(
                        "{},{},{},{},{}\n",
                        names[k], g.amplitudes[k].re, g.amplitudes[k].im, g.phases[k], g.leakage[k]
                    );
                }
                out += &format!("fidelity = {}\n", g.fidelity);
                emit(cli.output.as_deref(), out.as_bytes())
            } else {
                let mut out = String::from("omega_MHz,delta_R_MHz,fidelity\n");
                for &dr in &shifts {
                    for &om in &omegas {
                        let g = bell_fidelity(&params_for(om, dr)?, &cfg)?;
                        out += &format!("{om},{dr},{}\n", g.fidelity);
                    }
                }
                emit(cli.output.as_deref(), out.as_bytes())
            }
        }
        Command::Map => {
            let config = match &cli.config {
                Some(p) => SweepConfig::load(p)?,
                None => SweepConfig::default(),
            };
            let run = run_map(&config, &species)?;
            let bytes = csv_bytes(&run.records)?;
            let failed = run.records.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                log::warn!("{failed} grid points carry an error tag");
            }
            emit(cli.output.as_deref(), &bytes)?;
            if let Some(path) = &cli.output {
                let entry = OutputEntry {
                    path: path.display().to_string(),
                    sha256: sha256_hex(&bytes),
                    rows: run.records.len(),
                };
                let manifest = Manifest::new(&config, &species_source, &run, vec![entry])?;
                let mpath = manifest_path(path);
                std::fs::write(&mpath, manifest.to_json()).map_err(|e| Error::Output(format!("{}: {e}", mpath.display())))?;
            }
            Ok(())
        }
        Command::Wavefunction { state, step } => {
            let label: StateLabel = state.parse()?;
            let level = RydbergLevel::new(&species, label.n, label.term)?;
            let grid = GridSpec {
                step: *step,
                ..GridSpec::default()
            };
            let wf = solve_radial(&species, &level, grid)?;
            let mut out = String::new();
            for (r, chi) in wf.samples() {
                out += &format!("{r} {chi}\n");
            }
            emit(cli.output.as_deref(), out.as_bytes())
        }
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn parse_range(s: &str) -> CliResult<RangeSpec> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("range {s:?}: {e}")))?;
    match parts[..] {
        [start, stop, step] if step > 0.0 && stop >= start => Ok(RangeSpec { start, stop, step }),
        _ => Err(CliError::Usage(format!("range {s:?} must be start:stop:step with step > 0"))),
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).map_err(|e| Error::Output(format!("{}: {e}", p.display())))?);
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
