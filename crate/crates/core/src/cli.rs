//! The `purity` command line: `mub`, `verify`, `relation`, `sweep`, `expsim`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification or
//! validation failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsim::{prepare_pair_state, run_protocol, NoiseModel, Readout, SETTINGS};
use crate::linalg::{hermitian_eigenvalues, DensityMatrix};
use crate::mub::{construct_mubs, load_mubs, save_mubs, validate_mubs, MubSet};
use crate::relations::{
    build_bipartite_basis, check_pt_identities, gamma_direct, gamma_via_projector, relation_report,
};
use crate::states::{random_density_with, rho_family, rng_for, WernerFamilyParams};
use crate::sweep::{rows_to_csv, rows_to_json, run_sweep, OutputFormat, SweepConfig, SweepParam};
use crate::tol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "purity", version, about = "MUB uncertainty conservation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct (prime d) or load a MUB set and validate it.
    Mub(MubArgs),
    /// Check orthonormality of the bipartite states, Γ positivity / vanishing
    /// and the partial-transpose identities over random states.
    Verify(VerifyArgs),
    /// Relation report for one state.
    Relation(RelationArgs),
    /// Sweep α or x over the ρ(α, x) family.
    Sweep(SweepArgs),
    /// Simulate the swap-test protocol at one (α, x) point.
    Expsim(ExpsimArgs),
}

#[derive(Args, Debug)]
struct MubArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Read a MUB JSON file instead of constructing one.
    #[arg(long)]
    load: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Dimension of subsystem B (defaults to d).
    #[arg(long = "D", alias = "big-d")]
    big_d: Option<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, env = "PURITY_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    load: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RelationArgs {
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    x: Option<f64>,
    /// Density matrix JSON with dims [d, D].
    #[arg(long, conflicts_with_all = ["alpha", "x"])]
    state: Option<PathBuf>,
    /// Number of constructed MUBs (defaults to d + 1).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, conflicts_with = "m")]
    mubs: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ParamArg {
    Alpha,
    X,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "alpha")]
    param: ParamArg,
    #[arg(long, value_parser = parse_real)]
    from: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    to: Option<f64>,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    /// Value of the other parameter (x = 1 for α-sweeps, α = π/2 for x-sweeps).
    #[arg(long, value_parser = parse_real)]
    fixed: Option<f64>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, env = "PURITY_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_real, default_value = "0")]
    noise: f64,
    /// Add raw and rescaled simulator columns.
    #[arg(long)]
    simulate: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExpsimArgs {
    #[arg(long, value_parser = parse_real)]
    alpha: f64,
    #[arg(long, value_parser = parse_real)]
    x: f64,
    #[arg(long, value_parser = parse_real, default_value = "0")]
    noise: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the gate log of the Tr ρ_AB² run, one gate per line.
    #[arg(long)]
    gate_log: Option<PathBuf>,
}

/// Reals with optional π fractions: `0.5`, `pi`, `pi/2`, `3pi/8`, `3*pi/8`,
/// `-pi/4`, `0.25pi`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(format!("not finite: {s}")) };
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let pos = num.find("pi").ok_or_else(|| format!("cannot parse number: {s}"))?;
    if pos + 2 != num.len() {
        return Err(format!("cannot parse number: {s}"));
    }
    let coef = num[..pos].trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in {s}"))?,
    };
    let den = match den {
        Some(d) => d.parse::<f64>().map_err(|_| format!("bad denominator in {s}"))?,
        None => 1.0,
    };
    if den == 0.0 {
        return Err(format!("zero denominator in {s}"));
    }
    Ok(coef * std::f64::consts::PI / den)
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPrime(_) | Error::MubValidation(_) | Error::NotNormalized(_) => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization") + "\n"
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Mub(a) => cmd_mub(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Relation(a) => cmd_relation(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Expsim(a) => cmd_expsim(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn obtain_mubs(d: Option<usize>, m: Option<usize>, load: Option<&Path>) -> std::result::Result<MubSet, Failure> {
    match load {
        Some(path) => {
            let set = load_mubs(path)?;
            if let Some(d) = d.filter(|&d| d != set.d()) {
                return Err(usage(format!("--d {d} does not match loaded set (d = {})", set.d())));
            }
            if let Some(m) = m.filter(|&m| m != set.m()) {
                return Err(usage(format!("--m {m} does not match loaded set (M = {})", set.m())));
            }
            Ok(set)
        }
        None => {
            let d = d.ok_or_else(|| usage("--d is required unless --load is given"))?;
            let m = m.unwrap_or(d + 1);
            Ok(construct_mubs(d, m)?)
        }
    }
}

fn cmd_mub(a: MubArgs, stdout: &mut dyn Write) -> CmdResult {
    if a.load.is_none() && a.m.is_none() {
        return Err(usage("--m is required unless --load is given"));
    }
    let set = obtain_mubs(a.d, a.m, a.load.as_deref())?;
    let report = validate_mubs(&set);
    let _ = writeln!(stdout, "{report}");
    if let Some(out) = &a.out {
        save_mubs(&set, out)?;
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Default)]
struct Worst {
    value: f64,
    trial: Option<usize>,
}

impl Worst {
    fn update_max(&mut self, v: f64, trial: usize) {
        if self.trial.is_none() || v > self.value {
            self.value = v;
            self.trial = Some(trial);
        }
    }

    fn update_min(&mut self, v: f64, trial: usize) {
        if self.trial.is_none() || v < self.value {
            self.value = v;
            self.trial = Some(trial);
        }
    }
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> CmdResult {
    let mubs = obtain_mubs(a.d, a.m, a.load.as_deref())?;
    let (d, m) = (mubs.d(), mubs.m());
    let big_d = a.big_d.unwrap_or(d);
    if big_d == 0 {
        return Err(usage("--D must be positive"));
    }
    let basis = build_bipartite_basis(&mubs)?;
    let complete = m == d + 1;
    let dim = d * big_d;

    let mut text = String::new();
    let mut ok = true;
    let mut line = |text: &mut String, pass: bool, msg: String| {
        ok &= pass;
        let _ = writeln!(text, "{} {msg}", if pass { "PASS" } else { "FAIL" });
    };
    let _ = writeln!(text, "verify d = {d}, D = {big_d}, M = {m}, trials = {}, seed = {}", a.trials, a.seed);

    let gram = basis.constructed_gram_deviation();
    line(
        &mut text,
        gram <= tol::STRUCTURAL,
        format!(
            "orthonormality of {} bipartite states: max |G - I| = {gram:.3e} (<= {:e})",
            basis.constructed_states().len(),
            tol::STRUCTURAL
        ),
    );
    let pt = check_pt_identities(&basis);
    line(
        &mut text,
        pt.pass,
        format!("partial-transpose identities: max deviation {:.3e} (<= {:e})", pt.max_deviation, tol::STRUCTURAL),
    );

    let mut min_eig = Worst::default();
    let mut max_frob = Worst::default();
    let mut route = Worst::default();
    let mut gap = Worst::default();
    let mut identity = Worst::default();
    for t in 0..a.trials {
        let mut rng = rng_for(a.seed, t as u64);
        let rank = if t % 2 == 0 { dim } else { 1 };
        let rho = random_density_with(dim, rank, &mut rng)?.with_dims(vec![d, big_d])?;
        let g = gamma_direct(&rho, &mubs)?;
        min_eig.update_min(hermitian_eigenvalues(&g.hermitian_part())?[0], t);
        max_frob.update_max(g.frobenius_norm(), t);
        route.update_max(g.frobenius_distance(&gamma_via_projector(&rho, &basis)?), t);
        let r = relation_report(&rho, &mubs)?;
        let g_value = if complete { r.gap.abs() } else { -r.gap };
        gap.update_max(g_value, t);
        identity.update_max((r.gamma_expectation - r.gamma_expectation_from_purities()).abs(), t);
    }

    let offending = |w: &Worst| match w.trial {
        Some(t) => format!(" [trial {t}, seed {}]", a.seed),
        None => String::new(),
    };
    if a.trials > 0 {
        if complete {
            let pass = max_frob.value <= tol::SPECTRAL;
            line(
                &mut text,
                pass,
                format!(
                    "Gamma Frobenius max {:.3e} (<= {:e}){}",
                    max_frob.value,
                    tol::SPECTRAL,
                    if pass { String::new() } else { offending(&max_frob) }
                ),
            );
        } else {
            let pass = min_eig.value >= -tol::PSD;
            line(
                &mut text,
                pass,
                format!(
                    "Gamma min eigenvalue {:.3e} (>= -{:e}){}",
                    min_eig.value,
                    tol::PSD,
                    if pass { String::new() } else { offending(&min_eig) }
                ),
            );
        }
        let pass = route.value <= tol::PSD;
        line(
            &mut text,
            pass,
            format!(
                "projector route vs definition: max Frobenius {:.3e} (<= {:e}){}",
                route.value,
                tol::PSD,
                if pass { String::new() } else { offending(&route) }
            ),
        );
        let pass = gap.value <= tol::SPECTRAL;
        let what = if complete { "max |lhs - rhs|" } else { "max (rhs - lhs)" };
        line(
            &mut text,
            pass,
            format!(
                "conservation relation: {what} = {:.3e} (<= {:e}){}",
                gap.value,
                tol::SPECTRAL,
                if pass { String::new() } else { offending(&gap) }
            ),
        );
        let pass = identity.value <= tol::PSD;
        line(
            &mut text,
            pass,
            format!(
                "Tr(Gamma rho) vs purities: max deviation {:.3e} (<= {:e}){}",
                identity.value,
                tol::PSD,
                if pass { String::new() } else { offending(&identity) }
            ),
        );
    }

    let _ = write!(stdout, "{text}");
    if let Some(out) = &a.out {
        write_file(out, &text)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_relation(a: RelationArgs, stdout: &mut dyn Write) -> CmdResult {
    let rho: DensityMatrix = match (&a.state, a.alpha, a.x) {
        (Some(path), _, _) => serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::from)?)
            .map_err(Error::from)?,
        (None, Some(alpha), Some(x)) => rho_family(WernerFamilyParams::new(alpha, x)?),
        _ => return Err(usage("give either --state FILE or both --alpha and --x")),
    };
    let d = match rho.dims() {
        [d, _] => *d,
        dims => return Err(usage(format!("state dims {dims:?} are not bipartite"))),
    };
    let mubs = match &a.mubs {
        Some(p) => load_mubs(p)?,
        None => construct_mubs(d, a.m.unwrap_or(d + 1))?,
    };
    let report = relation_report(&rho, &mubs)?;
    let _ = writeln!(stdout, "{report}");
    if let Some(out) = &a.out {
        write_file(out, &to_json(&report))?;
    }
    Ok(if report.holds() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_sweep(a: SweepArgs, stdout: &mut dyn Write) -> CmdResult {
    let param = match a.param {
        ParamArg::Alpha => SweepParam::Alpha,
        ParamArg::X => SweepParam::X,
    };
    let mut config = SweepConfig::default_for(param);
    config.from = a.from.unwrap_or(config.from);
    config.to = a.to.unwrap_or(config.to);
    config.fixed_other = a.fixed.unwrap_or(config.fixed_other);
    config.steps = a.steps;
    config.d = a.d;
    config.m = a.m;
    config.seed = a.seed;
    config.noise_p = a.noise;
    config.simulate = a.simulate;
    config.format = match a.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let rows = run_sweep(&config)?;
    let text = match config.format {
        OutputFormat::Csv => rows_to_csv(&rows, config.simulate)?,
        OutputFormat::Json => rows_to_json(&config, &rows),
    };
    match &a.out {
        Some(out) => {
            write_file(out, &text)?;
            let _ = writeln!(stdout, "wrote {} rows to {}", rows.len(), out.display());
        }
        None => {
            let _ = write!(stdout, "{text}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_expsim(a: ExpsimArgs, stdout: &mut dyn Write) -> CmdResult {
    let noise = NoiseModel::depolarizing(a.noise)?;
    let panel = run_protocol(a.alpha, a.x, noise)?;
    let raw = panel.raw.to_array();
    let rescaled = panel.rescaled.to_array();
    let _ = writeln!(stdout, "alpha = {}, x = {}, p_depol = {}", panel.alpha, panel.x, panel.noise_p);
    for (i, s) in SETTINGS.iter().enumerate() {
        let _ = writeln!(stdout, "  {:<18} raw {:.10}  rescaled {:.10}", s.name, raw[i], rescaled[i]);
    }
    let _ = writeln!(
        stdout,
        "  gap (lhs - rhs)    raw {:.3e}  rescaled {:.3e}",
        panel.raw.gap(),
        panel.rescaled.gap()
    );
    if let Some(out) = &a.out {
        write_file(out, &to_json(&panel))?;
    }
    if let Some(path) = &a.gate_log {
        let mut state = prepare_pair_state(a.alpha, a.x, noise)?;
        state.swap_test_readout(Readout::Pair)?;
        write_file(path, &state.gate_log_text())?;
    }
    Ok(EXIT_OK)
}
