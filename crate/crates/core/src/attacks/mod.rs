//! End-to-end cheating analyses. Each produces an [`AttackReport`] comparing
//! the best honest guessing probability with what a superposition attack
//! achieves.

mod deterministic;
mod one_sided;
mod two_sided;

pub use deterministic::{attack_deterministic_3x3, sweep_all_3x3, SweepOutcome, SweepSummary};
pub use one_sided::{attack_nondet_one_sided, attack_oblivious_transfer, explicit_ot_check, explicit_ot_element, ExplicitPovmCheck};
pub use two_sided::{
    attack_nondet_two_sided, is_exception_table, real_superposition_scan, verify_counterexample, DEFAULT_Q0_SWEEP,
    SCAN_POINTS,
};

use std::fmt;

use num_complex::Complex64;

use crate::blackbox::{InputSuperposition, Role};
use crate::discrim::CertificateResiduals;
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, Kind, Prior, Sidedness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Deterministic3x3,
    NondetTwoSided,
    NondetOneSided,
    ObliviousTransfer,
    Counterexample,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Deterministic3x3,
        Scenario::NondetTwoSided,
        Scenario::NondetOneSided,
        Scenario::ObliviousTransfer,
        Scenario::Counterexample,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Deterministic3x3 => "deterministic-3x3",
            Scenario::NondetTwoSided => "nondet-two-sided",
            Scenario::NondetOneSided => "nondet-one-sided",
            Scenario::ObliviousTransfer => "oblivious-transfer",
            Scenario::Counterexample => "counterexample",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The cheater's input: a superposition over her classical inputs, or one of them.
#[derive(Debug, Clone, PartialEq)]
pub enum InputUsed {
    Superposition(Vec<Complex64>),
    Honest(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub function_id: String,
    pub scenario: Scenario,
    pub prior: Prior,
    pub input_used: InputUsed,
    pub p_honest: f64,
    pub p_attack: f64,
    /// Success after iterative optimization from the attack POVM, when requested.
    pub p_optimized: Option<f64>,
    pub advantage: f64,
    pub certified: bool,
    pub residuals: CertificateResiduals,
    pub notes: String,
}

impl AttackReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        function_id: String,
        scenario: Scenario,
        prior: Prior,
        input_used: InputUsed,
        p_honest: f64,
        p_attack: f64,
        certified: bool,
        residuals: CertificateResiduals,
    ) -> Self {
        let notes = match input_used {
            InputUsed::Superposition(_) => AMPLITUDE_NOTE.to_string(),
            InputUsed::Honest(_) => String::new(),
        };
        Self {
            function_id,
            scenario,
            prior,
            input_used,
            p_honest,
            p_attack,
            p_optimized: None,
            advantage: p_attack - p_honest,
            certified,
            residuals,
            notes,
        }
    }

    pub(crate) fn note(&mut self, text: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
    }
}

/// Knobs shared by the analyses; unset fields take each scenario's default.
#[derive(Debug, Clone, Default)]
pub struct AttackConfig {
    pub prior: Option<Prior>,
    pub superposition: Option<InputSuperposition>,
    pub q0_sweep: Option<Vec<f64>>,
    pub role: Option<Role>,
    pub optimize: bool,
}

/// One-sided tables where only Bob has a choice are attacked by Bob, who
/// receives the output; everything else defaults to a cheating Alice.
pub fn default_role(f: &FunctionSpec) -> Role {
    if f.sidedness() == Sidedness::One && f.bob_arity() == 1 && f.alice_arity() > 1 {
        Role::Bob
    } else {
        Role::Alice
    }
}

/// Box amplitudes are fixed to the nonnegative root of each probability;
/// phase freedom in the box is not explored.
pub const AMPLITUDE_NOTE: &str = "box amplitudes sqrt(p), no phases";

pub const LARGER_ALPHABETS_NOTE: &str = "larger alphabets: conjectured insecure, not verified";

/// Picks the analysis matching the table's kind, sidedness and shape.
pub fn analyze(f: &FunctionSpec, cfg: &AttackConfig) -> Result<AttackReport> {
    if f.sidedness() == Sidedness::One {
        return attack_nondet_one_sided(f, cfg);
    }
    let role = cfg.role.unwrap_or(Role::Alice);
    let g = match role {
        Role::Alice => f.clone(),
        Role::Bob => f.transposed(),
    };
    let shape = (g.alice_arity(), g.bob_arity(), g.outcome_count());
    let mut report = match g.kind() {
        Kind::Deterministic if shape.0 == 3 && shape.1 == 3 => attack_deterministic_3x3(&g, cfg)?,
        Kind::Probabilistic if shape == (2, 2, 2) => attack_nondet_two_sided(&g, cfg)?,
        _ => {
            return Err(Error::OutOfScope(format!(
                "{}x{} table with {} outcomes; {LARGER_ALPHABETS_NOTE}",
                shape.1, shape.0, shape.2
            )))
        }
    };
    if role == Role::Bob {
        report.note("cheater: bob (table transposed)");
    }
    Ok(report)
}

pub(crate) fn require_prior_len(prior: &Prior, n: usize) -> Result<()> {
    if prior.len() != n {
        return Err(Error::dims(format!("prior has {} weights, expected {n}", prior.len())));
    }
    Ok(())
}
