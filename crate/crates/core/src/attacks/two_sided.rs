use std::f64::consts::{FRAC_PI_4, PI};

use super::{AttackConfig, AttackReport, InputUsed, Scenario};
use crate::blackbox::{output_family, CheaterInput, InputSuperposition, Role};
use crate::builtin;
use crate::discrim::{helstrom, honest_probability, DiscriminationResult};
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, Prior, Sidedness};
use crate::tol::tol;

pub const DEFAULT_Q0_SWEEP: [f64; 3] = [1.0 - 1e-2, 1.0 - 1e-3, 1.0 - 1e-4];

/// Grid size for the real-amplitude scan over `(cos t, sin t)`, `t` in `[0, pi]`.
pub const SCAN_POINTS: usize = 2001;

fn require_binary_two_sided(f: &FunctionSpec) -> Result<()> {
    if f.sidedness() != Sidedness::Two || f.alice_arity() != 2 || f.bob_arity() != 2 || f.outcome_count() != 2 {
        return Err(Error::invalid("expected a two-sided 2x2 table with binary outcome"));
    }
    Ok(())
}

/// Tables where only one party's input matters: `p00 = p10 and p01 = p11`,
/// or `p00 = p01 and p10 = p11`. Compared exactly.
pub fn is_exception_table(f: &FunctionSpec) -> bool {
    let p = |i, j| f.prob_exact(0, i, j);
    (p(0, 0) == p(1, 0) && p(0, 1) == p(1, 1)) || (p(0, 0) == p(0, 1) && p(1, 0) == p(1, 1))
}

fn sweep_values(cfg: &AttackConfig) -> Result<Vec<f64>> {
    match (&cfg.q0_sweep, &cfg.prior) {
        (Some(_), Some(_)) => Err(Error::invalid("give either a prior or a q0 sweep, not both")),
        (Some(v), None) if v.is_empty() => Err(Error::invalid("empty q0 sweep")),
        (Some(v), None) => Ok(v.clone()),
        (None, Some(p)) if p.len() == 2 => Ok(vec![p.weights()[0]]),
        (None, Some(p)) => Err(Error::dims(format!("prior has {} weights, expected 2", p.len()))),
        (None, None) => Ok(DEFAULT_Q0_SWEEP.to_vec()),
    }
}

fn evaluate(f: &FunctionSpec, a: &InputSuperposition, q0: f64) -> Result<(DiscriminationResult, f64)> {
    let prior = Prior::binary(q0)?;
    let fam = output_family(f, &CheaterInput::Superposition(a.clone()), Role::Alice)?;
    let h = helstrom(&fam.states()[0], &fam.states()[1], q0)?;
    let ph = honest_probability(f, &prior, Role::Alice)?;
    Ok((h, ph))
}

/// Helstrom attack on a binary two-sided table over a sweep of priors;
/// reports the prior with the largest advantage.
pub fn attack_nondet_two_sided(f: &FunctionSpec, cfg: &AttackConfig) -> Result<AttackReport> {
    require_binary_two_sided(f)?;
    let sweep = sweep_values(cfg)?;
    let input = match &cfg.superposition {
        Some(a) if a.len() != 2 => return Err(Error::dims("superposition must have 2 amplitudes")),
        Some(a) => a.clone(),
        None => InputSuperposition::real_pair(FRAC_PI_4),
    };
    let used = InputUsed::Superposition(input.amplitudes().to_vec());
    let sweep_note = format!(
        "q0 sweep {}",
        sweep.iter().map(|q| format!("{q}")).collect::<Vec<_>>().join(",")
    );

    if is_exception_table(f) {
        let (h, ph) = evaluate(f, &input, sweep[0])?;
        let mut r = AttackReport::new(
            f.identifier(),
            Scenario::NondetTwoSided,
            Prior::binary(sweep[0])?,
            used,
            ph,
            ph,
            h.certified_optimal,
            h.residuals,
        );
        r.note("effectively one-input: only one party's input affects the outcome");
        r.note(sweep_note);
        return Ok(r);
    }

    let mut best: Option<(f64, DiscriminationResult, f64)> = None;
    for &q0 in &sweep {
        let (h, ph) = evaluate(f, &input, q0)?;
        let better = best
            .as_ref()
            .is_none_or(|(_, bh, bph)| h.success_probability - ph > bh.success_probability - bph);
        if better {
            best = Some((q0, h, ph));
        }
    }
    let (q0, h, ph) = best.expect("nonempty sweep");
    let mut r = AttackReport::new(
        f.identifier(),
        Scenario::NondetTwoSided,
        Prior::binary(q0)?,
        used,
        ph,
        h.success_probability,
        h.certified_optimal,
        h.residuals,
    );
    r.note(sweep_note);
    r.note(format!("best q0 {q0}"));
    Ok(r)
}

/// Maximizes the Helstrom advantage over real inputs `(cos t, sin t)`:
/// `points` grid values of `t` on `[0, pi]`, then golden-section refinement
/// around the best grid point.
pub fn real_superposition_scan(f: &FunctionSpec, q0: f64, points: usize) -> Result<AttackReport> {
    require_binary_two_sided(f)?;
    let points = points.max(3);
    let advantage = |t: f64| -> Result<f64> {
        let (h, ph) = evaluate(f, &InputSuperposition::real_pair(t), q0)?;
        Ok(h.success_probability - ph)
    };
    let step = PI / (points - 1) as f64;
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for n in 0..points {
        let t = n as f64 * step;
        let a = advantage(t)?;
        if a > best {
            best = a;
            best_t = t;
        }
    }

    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (advantage(x1)?, advantage(x2)?);
    while hi - lo > 1e-12 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = advantage(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = advantage(x2)?;
        }
    }
    let (t_ref, a_ref) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if a_ref > best {
        best_t = t_ref;
    }

    let input = InputSuperposition::real_pair(best_t);
    let (h, ph) = evaluate(f, &input, q0)?;
    let uniform = advantage(FRAC_PI_4)?;
    let mut r = AttackReport::new(
        f.identifier(),
        Scenario::Counterexample,
        Prior::binary(q0)?,
        InputUsed::Superposition(input.amplitudes().to_vec()),
        ph,
        h.success_probability,
        h.certified_optimal,
        h.residuals,
    );
    r.note("real amplitudes only (cos t, sin t)");
    r.note(format!("grid {points} points on [0, pi] plus golden-section refinement"));
    r.note(format!("best t {best_t:.12}"));
    r.note(format!("uniform superposition advantage {uniform:.6e}"));
    let bound = tol().adv_min;
    r.note(if r.advantage <= bound {
        format!("advantage within bound {bound:e}")
    } else {
        format!("advantage exceeds bound {bound:e}")
    });
    Ok(r)
}

/// The built-in counterexample table at `q0 = 1/2`.
pub fn verify_counterexample() -> Result<AttackReport> {
    real_superposition_scan(&builtin::counterexample(), 0.5, SCAN_POINTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrim::binary_difference_spectrum;

    fn table(p: [f64; 4]) -> FunctionSpec {
        FunctionSpec::binary_2x2_f64(Sidedness::Two, p).unwrap()
    }

    #[test]
    fn exception_short_circuits() {
        let r = attack_nondet_two_sided(&table([0.25, 0.25, 0.75, 0.75]), &AttackConfig::default()).unwrap();
        assert_eq!(r.advantage, 0.0);
        assert!(r.notes.contains("effectively one-input"));
        assert!(is_exception_table(&table([0.3, 0.6, 0.3, 0.6])));
        assert!(!is_exception_table(&table([0.5, 0.5, 0.0, 1.0])));
    }

    #[test]
    fn generic_table_has_advantage() {
        let f = table([0.5, 0.5, 0.25, 0.75]);
        let r = attack_nondet_two_sided(&f, &AttackConfig::default()).unwrap();
        assert!(r.advantage > 1e-10, "{r:?}");
        assert!(r.certified);
        let q0 = r.prior.weights()[0];
        let s = binary_difference_spectrum(&f, q0).unwrap();
        assert!((s.success_probability() - r.p_attack).abs() < 1e-10);
    }

    #[test]
    fn revealing_input_leaves_nothing_to_gain() {
        // p10 = 0, p11 = 1: honest input i = 1 reveals j, so p_h = 1
        let r = attack_nondet_two_sided(&table([0.5, 0.5, 0.0, 1.0]), &AttackConfig::default()).unwrap();
        assert_eq!(r.p_honest, 1.0);
        assert!(r.advantage <= 1e-12);
    }

    #[test]
    fn sweep_and_prior_are_exclusive() {
        let cfg = AttackConfig {
            prior: Some(Prior::binary(0.5).unwrap()),
            q0_sweep: Some(vec![0.5]),
            ..Default::default()
        };
        assert!(attack_nondet_two_sided(&table([0.5, 0.5, 0.0, 1.0]), &cfg).is_err());
    }

    #[test]
    fn wrong_shape_rejected() {
        assert!(attack_nondet_two_sided(&builtin::neq3(), &AttackConfig::default()).is_err());
        assert!(attack_nondet_two_sided(&builtin::ot(), &AttackConfig::default()).is_err());
    }

    #[test]
    fn counterexample_uniform_input_gives_nothing() {
        let cfg = AttackConfig {
            q0_sweep: Some(vec![0.5]),
            ..Default::default()
        };
        let r = attack_nondet_two_sided(&builtin::counterexample(), &cfg).unwrap();
        assert!(r.advantage <= 1e-9, "{}", r.advantage);
    }

    #[test]
    fn counterexample_honest_input_gives_nothing() {
        let f = builtin::counterexample();
        for t in [0.0, PI / 2.0] {
            let (h, ph) = evaluate(&f, &InputSuperposition::real_pair(t), 0.5).unwrap();
            assert!(h.success_probability - ph <= 1e-12);
        }
    }

    #[test]
    fn counterexample_scan_regression() {
        // the scan finds a small positive advantage away from the uniform input
        let r = verify_counterexample().unwrap();
        assert!(r.certified);
        assert!((r.advantage - 1.3023212034923848e-4).abs() < 1e-9, "{}", r.advantage);
        assert!(r.notes.contains("exceeds bound"));
    }
}
