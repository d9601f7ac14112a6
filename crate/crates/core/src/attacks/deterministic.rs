use rayon::prelude::*;

use super::{require_prior_len, AttackConfig, AttackReport, InputUsed, Scenario};
use crate::blackbox::{output_family, CheaterInput, InputSuperposition, Role};
use crate::discrim::{honest_probability, optimize_povm, square_root_measurement, OptimizeOptions};
use crate::error::{Error, Result};
use crate::funcspec::{canonicalize_3x3, enumerate_valid_3x3, FunctionSpec, Kind, Prior, Sidedness};
use crate::tol::tol;

/// Square-root-measurement attack by Alice on a valid two-sided 3x3 table,
/// evaluated on its canonical form. The default input is the uniform
/// superposition and the default prior is uniform.
pub fn attack_deterministic_3x3(f: &FunctionSpec, cfg: &AttackConfig) -> Result<AttackReport> {
    if f.kind() != Kind::Deterministic || f.sidedness() != Sidedness::Two || f.alice_arity() != 3 || f.bob_arity() != 3 {
        return Err(Error::invalid("expected a two-sided deterministic 3x3 table"));
    }
    let cond = f.validate_conditions()?;
    if !cond.both() {
        return Err(Error::invalid(format!(
            "table {} is not valid (potentially concealing: {}, non-degenerate: {})",
            f.identifier(),
            cond.potentially_concealing,
            cond.non_degenerate
        )));
    }
    let form = canonicalize_3x3(f)?;
    let base = &form.base;

    // canonical row r is original row row_perm[r]; same for columns
    let input = match &cfg.superposition {
        Some(a) => {
            if a.len() != 3 {
                return Err(Error::dims("superposition must have 3 amplitudes"));
            }
            let amps = a.amplitudes();
            InputSuperposition::new(form.col_perm.iter().map(|&c| amps[c]).collect())?
        }
        None => InputSuperposition::uniform(3)?,
    };
    let prior = match &cfg.prior {
        Some(p) => {
            require_prior_len(p, 3)?;
            Prior::new(form.row_perm.iter().map(|&r| p.weights()[r]).collect())?
        }
        None => Prior::uniform(3)?,
    };

    let family = output_family(base, &CheaterInput::Superposition(input.clone()), Role::Alice)?;
    let srm = square_root_measurement(&family, &prior)?;
    let p_honest = honest_probability(base, &prior, Role::Alice)?;
    let mut report = AttackReport::new(
        base.identifier(),
        Scenario::Deterministic3x3,
        prior.clone(),
        InputUsed::Superposition(input.amplitudes().to_vec()),
        p_honest,
        srm.success_probability,
        srm.certified_optimal,
        srm.residuals,
    );
    if base.identifier() != f.identifier() {
        report.note(format!("input table {}", f.identifier()));
    }
    if cfg.optimize {
        let (opt, trace) = optimize_povm(&family, &prior, &srm.povm, &OptimizeOptions::default())?;
        report.p_optimized = Some(opt.success_probability);
        report.note(format!(
            "optimized after {} steps, certified {}",
            trace.history.len() - 1,
            opt.certified_optimal
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub min_function_id: String,
}

impl std::fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "functions={} min_adv={:.10e} median_adv={:.10e} max_adv={:.10e}",
            self.count, self.min, self.median, self.max
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Sorted by function identifier.
    pub reports: Vec<AttackReport>,
    pub summary: SweepSummary,
}

impl SweepOutcome {
    /// Reports whose advantage does not exceed the minimum required advantage.
    pub fn failures(&self) -> Vec<&AttackReport> {
        let floor = tol().adv_min;
        self.reports.iter().filter(|r| !(r.advantage > floor)).collect()
    }
}

/// Attacks every valid 3x3 class on `workers` threads.
pub fn sweep_all_3x3(workers: usize, optimize: bool) -> Result<SweepOutcome> {
    let functions = enumerate_valid_3x3();
    let cfg = AttackConfig {
        optimize,
        ..Default::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let mut reports = pool.install(|| {
        functions
            .par_iter()
            .map(|f| attack_deterministic_3x3(f, &cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    reports.sort_by(|a, b| a.function_id.cmp(&b.function_id));
    let summary = summarize(&reports);
    Ok(SweepOutcome { reports, summary })
}

fn summarize(reports: &[AttackReport]) -> SweepSummary {
    let mut adv: Vec<f64> = reports.iter().map(|r| r.advantage).collect();
    adv.sort_by(f64::total_cmp);
    let n = adv.len();
    let median = match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => adv[n / 2],
        _ => 0.5 * (adv[n / 2 - 1] + adv[n / 2]),
    };
    let min_function_id = reports
        .iter()
        .min_by(|a, b| a.advantage.total_cmp(&b.advantage))
        .map(|r| r.function_id.clone())
        .unwrap_or_default();
    SweepSummary {
        count: n,
        min: adv.first().copied().unwrap_or(f64::NAN),
        median,
        max: adv.last().copied().unwrap_or(f64::NAN),
        min_function_id,
    }
}
