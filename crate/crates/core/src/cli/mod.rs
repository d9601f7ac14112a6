//! The `tpc` command line.
//!
//! Exit codes: 0 success, 1 input error, 2 function outside the analysed
//! scope, 3 sweep found a non-positive advantage, 4 POVM not optimal.

mod matrix_file;

pub use matrix_file::{matrix_file_text, parse_complex, parse_matrix_file};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::attacks::{self, AttackConfig, AttackReport, InputUsed};
use crate::blackbox::{output_family, CheaterInput, InputSuperposition, OutputStateFamily, Role};
use crate::builtin;
use crate::discrim::{certify_optimal, povm_success, Povm};
use crate::error::{Error, Result};
use crate::funcspec::{parse_function_file, FunctionSpec, Prior, Sidedness};
use crate::qmat::{ComplexMatrix, DensityState, Ket};
use crate::report::ReportDocument;
use crate::tol::{tol, Tolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_SCOPE: u8 = 2;
pub const EXIT_SWEEP: u8 = 3;
pub const EXIT_NOT_OPTIMAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "tpc", version, about = "Cheating analyses for ideal two-party computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyse a function file or built-in table (`@ot`, `@counterexample`, `@neq3`).
    Analyze(AnalyzeArgs),
    /// Attack every valid 3x3 deterministic function.
    #[command(name = "sweep3x3")]
    Sweep3x3(SweepArgs),
    /// Oblivious-transfer example with the explicit optimal measurement.
    OtDemo(OutArgs),
    /// Check whether a POVM optimally discriminates a state family.
    Certify(CertifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Alice,
    Bob,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::Alice => Role::Alice,
            RoleArg::Bob => Role::Bob,
        }
    }
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Write a machine-readable report document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    /// Prior over the honest party's inputs, e.g. `0.5,0.5`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub prior: Option<Vec<f64>>,
    /// Cheater input amplitudes (normalized on use), e.g. `1,1,0` or `1,0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub superposition: Option<Vec<String>>,
    /// Which party cheats.
    #[arg(long, value_enum)]
    pub role: Option<RoleArg>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Function file path or `@name`.
    pub target: String,
    #[command(flatten)]
    pub state: StateArgs,
    /// Priors `q0` to try for binary tables.
    #[arg(long = "q0-sweep", visible_alias = "q0", value_delimiter = ',')]
    pub q0_sweep: Option<Vec<f64>>,
    /// Also run the iterative optimizer from the attack measurement.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also run the iterative optimizer per function.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Function file, `@name`, or a state file (`dim:` header, one matrix per state).
    pub target: String,
    /// POVM file: `dim:` header, one matrix per element; element `j` guesses state `j`.
    #[arg(long)]
    pub povm: PathBuf,
    /// Cheater's classical input for one-sided functions.
    #[arg(long, default_value_t = 0)]
    pub honest_input: usize,
    #[command(flatten)]
    pub state: StateArgs,
}

/// Parses arguments, installs tolerance overrides, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = Tolerances::from_env().and_then(Tolerances::install) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::OutOfScope(_) => EXIT_SCOPE,
                _ => EXIT_INPUT,
            })
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep3x3(s) => sweep(s),
        Command::OtDemo(o) => ot_demo(o),
        Command::Certify(c) => certify(c),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_out(out: &OutArgs, reports: Vec<AttackReport>) -> Result<()> {
    if let Some(path) = &out.out {
        std::fs::write(path, ReportDocument::new(reports).to_text())
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn load_function(target: &str) -> Result<FunctionSpec> {
    if target.starts_with('@') {
        builtin::lookup(target)
    } else {
        parse_function_file(&read(Path::new(target))?)
    }
}

fn prior_arg(state: &StateArgs) -> Result<Option<Prior>> {
    state.prior.clone().map(Prior::new).transpose()
}

fn superposition_arg(state: &StateArgs) -> Result<Option<InputSuperposition>> {
    let Some(raw) = &state.superposition else { return Ok(None) };
    let amps = raw
        .iter()
        .map(|s| parse_complex(s).ok_or_else(|| Error::invalid(format!("bad amplitude `{s}`"))))
        .collect::<Result<Vec<Complex64>>>()?;
    let ket = Ket::normalized(amps)?;
    Ok(Some(InputSuperposition::new(ket.amplitudes().to_vec())?))
}

fn fmt_input(input: &InputUsed) -> String {
    match input {
        InputUsed::Honest(i) => format!("classical input {i}"),
        InputUsed::Superposition(a) => {
            let parts: Vec<String> = a
                .iter()
                .map(|z| if z.im == 0.0 { format!("{:.6}", z.re) } else { format!("{:.6}{:+.6}i", z.re, z.im) })
                .collect();
            format!("superposition ({})", parts.join(", "))
        }
    }
}

pub fn render_report(r: &AttackReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "function: {}", r.function_id);
    let _ = writeln!(s, "scenario: {}", r.scenario);
    let weights: Vec<String> = r.prior.weights().iter().map(|w| format!("{w}")).collect();
    let _ = writeln!(s, "prior: {}", weights.join(", "));
    let _ = writeln!(s, "input: {}", fmt_input(&r.input_used));
    let _ = writeln!(s, "p_honest: {:.12}", r.p_honest);
    let _ = writeln!(s, "p_attack: {:.12}", r.p_attack);
    if let Some(p) = r.p_optimized {
        let _ = writeln!(s, "p_optimized: {p:.12}");
    }
    let _ = writeln!(s, "advantage: {:.6e}", r.advantage);
    let _ = writeln!(
        s,
        "certified: {} (stationarity {:.3e}, min eigenvalue {:.3e}, anti-hermitian {:.3e})",
        r.certified, r.residuals.stationarity, r.residuals.min_eigenvalue, r.residuals.anti_hermitian
    );
    for note in r.notes.split("; ").filter(|n| !n.is_empty()) {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

fn analyze(a: &AnalyzeArgs) -> Result<u8> {
    let f = load_function(&a.target)?;
    let cfg = AttackConfig {
        prior: prior_arg(&a.state)?,
        superposition: superposition_arg(&a.state)?,
        q0_sweep: a.q0_sweep.clone(),
        role: a.state.role.map(Role::from),
        optimize: a.optimize,
    };
    let report = attacks::analyze(&f, &cfg)?;
    print!("{}", render_report(&report));
    write_out(&a.out, vec![report])?;
    Ok(EXIT_OK)
}

fn sweep(s: &SweepArgs) -> Result<u8> {
    let workers = s
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::invalid("--workers must be at least 1"));
    }
    let outcome = attacks::sweep_all_3x3(workers, s.optimize)?;
    for r in &outcome.reports {
        println!(
            "{}  p_honest={:.12} p_srm={:.12} advantage={:.6e}",
            r.function_id, r.p_honest, r.p_attack, r.advantage
        );
    }
    println!("{}", outcome.summary);
    let failures = outcome.failures();
    let code = if failures.is_empty() {
        EXIT_OK
    } else {
        eprintln!("{} function(s) without advantage above {:e}:", failures.len(), tol().adv_min);
        for r in &failures {
            eprintln!("{}", render_report(r));
        }
        EXIT_SWEEP
    };
    write_out(&s.out, outcome.reports)?;
    Ok(code)
}

fn ot_demo(o: &OutArgs) -> Result<u8> {
    let (report, check) = attacks::attack_oblivious_transfer()?;
    print!("{}", render_report(&report));
    println!("explicit E0 (outcome basis 0, 1, ?):");
    for r in 0..check.element.rows() {
        let row: Vec<String> = (0..check.element.cols()).map(|c| format!("{:>10.6}", check.element.get(r, c).re)).collect();
        println!("  {}", row.join(" "));
    }
    println!("explicit E0 success: {:.12}", check.success);
    println!("explicit E0 gap to optimum: {:.3e}", (check.success - report.p_attack).abs());
    println!(
        "explicit E0 certified: {} (stationarity {:.3e}, min eigenvalue {:.3e}, anti-hermitian {:.3e})",
        check.certified, check.residuals.stationarity, check.residuals.min_eigenvalue, check.residuals.anti_hermitian
    );
    write_out(o, vec![report])?;
    Ok(EXIT_OK)
}

fn certify_family(c: &CertifyArgs) -> Result<OutputStateFamily> {
    if !c.target.starts_with('@') {
        let text = read(Path::new(&c.target))?;
        let first = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .unwrap_or("");
        if first.starts_with("dim:") {
            let states = parse_matrix_file(&text)?
                .into_iter()
                .map(|m| {
                    let d = m.rows();
                    DensityState::new(m, vec![d])
                })
                .collect::<Result<Vec<_>>>()?;
            return OutputStateFamily::from_states(states);
        }
    }
    let f = load_function(&c.target)?;
    let role = c.state.role.map(Role::from).unwrap_or_else(|| attacks::default_role(&f));
    let input = match f.sidedness() {
        Sidedness::One => CheaterInput::Honest(c.honest_input),
        Sidedness::Two => {
            let n = match role {
                Role::Alice => f.alice_arity(),
                Role::Bob => f.bob_arity(),
            };
            CheaterInput::Superposition(match superposition_arg(&c.state)? {
                Some(a) => a,
                None => InputSuperposition::uniform(n)?,
            })
        }
    };
    output_family(&f, &input, role)
}

fn certify(c: &CertifyArgs) -> Result<u8> {
    let family = certify_family(c)?;
    let elements: Vec<ComplexMatrix> = parse_matrix_file(&read(&c.povm)?)?;
    let povm = Povm::one_per_state(elements)?;
    let prior = match prior_arg(&c.state)? {
        Some(p) => p,
        None => Prior::uniform(family.len())?,
    };
    let success = povm_success(&family, &prior, &povm)?;
    let (ok, res) = certify_optimal(&family, &prior, &povm)?;
    println!("states: {} of dimension {}", family.len(), family.dim());
    println!("success: {success:.12}");
    println!("stationarity residual: {:.6e}", res.stationarity);
    println!("min eigenvalue: {:.6e}", res.min_eigenvalue);
    println!("anti-hermitian residual: {:.6e}", res.anti_hermitian);
    println!("certified optimal: {ok} (tolerance {:e})", tol().cert);
    Ok(if ok { EXIT_OK } else { EXIT_NOT_OPTIMAL })
}
