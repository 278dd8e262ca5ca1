//! Command implementations for the `opamp-qnoise` binary.
//!
//! Every command returns its report text and exit status instead of printing,
//! so the binary stays a thin wrapper and the reports can be tested directly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use opamp_qnoise::checks::{self, random_device, verification_grid, VERIFY_DRAWS, VERIFY_SEED};
use opamp_qnoise::{
    commutator, noise::noise_figure_from, optimize_matching, parse_config, scattering_transcribed,
    sweep, write_csv, AngularFrequency, PhysicalConstants, PortId, RunConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "opamp-qnoise", version, about = "Quantum noise of an ideal op-amp measurement device")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check commutator preservation and both evaluation routes.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the output-field coefficient table at one frequency.
    Scatter {
        #[arg(long)]
        config: PathBuf,
        /// Angular frequency in rad/s (defaults to the sweep's omega_min).
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
    },
    /// Write the added-noise sweep as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the matching point that minimizes the added noise.
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Text for standard output, text for standard error and the exit status.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            ..Self::default()
        }
    }

    fn usage(message: String) -> Self {
        Self {
            stderr: message + "\n",
            code: EXIT_USAGE,
            ..Self::default()
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Verify { config } => with_config(&config, run_verify),
        Command::Scatter { config, omega } => with_config(&config, |c, h| run_scatter(c, h, omega)),
        Command::Sweep { config, out } => with_config(&config, |c, _| run_sweep(c, out.as_deref())),
        Command::Optimize { config } => with_config(&config, run_optimize),
    }
}

fn with_config(path: &Path, f: impl FnOnce(&RunConfig, &str) -> Outcome) -> Outcome {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return Outcome::usage(format!("error: cannot read {}: {e}", path.display())),
    };
    let config = match parse_config(&bytes) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(format!("error: {}: {e}", path.display())),
    };
    f(&config, &hex::encode(Sha256::digest(&bytes)))
}

/// `x` with `digits` significant digits, switching to exponent notation
/// outside `1e-5 ..= 1e6`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let (mantissa, e) = sci.split_once('e').unwrap_or((&sci, "0"));
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

fn fmt_complex(z: Complex64) -> String {
    let re = fmt_sig(z.re, 6);
    if z.im == 0.0 {
        return re;
    }
    let im = fmt_sig(z.im.abs(), 6);
    let sign = if z.im < 0.0 { '-' } else { '+' };
    if z.re == 0.0 {
        format!("{}{im}i", if z.im < 0.0 { "-" } else { "" })
    } else {
        format!("{re}{sign}{im}i")
    }
}

/// Fixed six decimals, without a sign on values that round to zero.
fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn analysis_omega(config: &RunConfig, over: Option<f64>) -> Result<AngularFrequency, String> {
    let w = over.unwrap_or(config.sweep.omega_min());
    AngularFrequency::new(w).map_err(|e| format!("error: --omega: {e}"))
}

pub fn run_verify(config: &RunConfig, hash: &str) -> Outcome {
    let grid = verification_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    let mut devices = vec![config.params];
    devices.extend((0..VERIFY_DRAWS).map(|_| random_device(&mut rng, PhysicalConstants::si())));

    let summary = match checks::check(&devices, &grid) {
        Ok(s) => s,
        Err(e) => {
            return Outcome {
                stderr: format!("error: {e}\n"),
                code: EXIT_VERIFY_FAILED,
                ..Outcome::default()
            }
        }
    };
    let passed = summary.worst() < config.tolerance;

    let mut out = String::new();
    let _ = writeln!(out, "config sha256: {hash}");
    let _ = writeln!(
        out,
        "seed: {VERIFY_SEED}, random draws: {VERIFY_DRAWS}, grid: {} log points from 1e2 to 1e8 rad/s",
        grid.len()
    );
    let _ = writeln!(out, "evaluations: {}", summary.evaluations);
    let _ = writeln!(out, "max Bogoliubov residual: {:.6e}", summary.bogoliubov);
    let _ = writeln!(out, "max formula-vs-solver deviation: {:.6e}", summary.solver);
    let _ = writeln!(out, "max formula-vs-oracle Sigma deviation: {:.6e}", summary.sigma);
    let _ = writeln!(out, "tolerance: {:e}", config.tolerance);
    let _ = writeln!(out, "result: {}", if passed { "PASS" } else { "FAIL" });
    Outcome {
        stdout: out,
        code: if passed { EXIT_OK } else { EXIT_VERIFY_FAILED },
        ..Outcome::default()
    }
}

pub fn run_scatter(config: &RunConfig, hash: &str, omega: Option<f64>) -> Outcome {
    let omega = match analysis_omega(config, omega) {
        Ok(w) => w,
        Err(e) => return Outcome::usage(e),
    };
    let rel = scattering_transcribed(&config.params, omega);

    let mut out = String::new();
    let _ = writeln!(out, "config sha256: {hash}");
    let _ = writeln!(out, "omega = {} rad/s", fmt_sig(omega.get(), 6));
    let _ = writeln!(out, "columns: l, r, f, a, b(creation)");
    for (name, row) in ["l", "r", "f"].iter().zip(rel.rows()) {
        let cells: Vec<String> = [
            row.u(PortId::SignalL),
            row.u(PortId::ReadoutR),
            row.u(PortId::FeedbackF),
            row.u(PortId::NoiseA),
            row.v(PortId::NoiseB),
        ]
        .into_iter()
        .map(fmt_complex)
        .collect();
        let _ = writeln!(out, "row {name}: [{}]", cells.join(", "));
    }
    let norms: Vec<String> = rel
        .rows()
        .iter()
        .map(|row| fixed6(commutator(row, &row.adjoint()).expect("same omega").re))
        .collect();
    let _ = writeln!(out, "row norms [o, o^dagger]: {}", norms.join(", "));
    Outcome::ok(out)
}

pub fn run_sweep(config: &RunConfig, out: Option<&Path>) -> Outcome {
    let reports = sweep(&config.params, &config.sweep);
    let csv = match write_csv(&reports) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(format!("error: {e}")),
    };
    match out {
        None => Outcome::ok(csv),
        Some(path) => match write_atomic(path, csv.as_bytes()) {
            Ok(()) => Outcome::default(),
            Err(e) => Outcome::usage(format!("error: cannot write {}: {e}", path.display())),
        },
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn run_optimize(config: &RunConfig, hash: &str) -> Outcome {
    let omega = match analysis_omega(config, None) {
        Ok(w) => w,
        Err(e) => return Outcome::usage(e),
    };
    let p = &config.params;
    let opt = optimize_matching(p, omega);
    let sigma_ll = p.env().sigma(PortId::SignalL, omega, p.constants());
    let nf = noise_figure_from(sigma_ll, opt.sigma_star);

    let mut out = String::new();
    let _ = writeln!(out, "config sha256: {hash}");
    let _ = writeln!(out, "omega = {} rad/s", fmt_sig(omega.get(), 6));
    let _ = writeln!(
        out,
        "sigma_aa = {}, sigma_bb = {}",
        fmt_sig(opt.sigma_aa, 6),
        fmt_sig(opt.sigma_bb, 6)
    );
    let _ = writeln!(
        out,
        "xi* = {}, sigma* = {}, NF = {:.4} dB",
        fixed6(opt.xi_star),
        fixed6(opt.sigma_star),
        nf
    );
    let _ = writeln!(out, "matched R_0 = {} ohm", fmt_sig(opt.matched_r_0(p.r_l()), 6));
    Outcome::ok(out)
}
