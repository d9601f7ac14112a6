use super::{default_role, require_prior_len, AttackConfig, AttackReport, InputUsed, Scenario};
use crate::blackbox::{output_family, CheaterInput, Role};
use crate::builtin;
use crate::discrim::{
    certify_optimal, helstrom, optimize_povm, povm_success, square_root_measurement, CertificateResiduals,
    DiscriminationResult, OptimizeOptions, Povm,
};
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, Prior, Sidedness};
use crate::qmat::ComplexMatrix;

fn priors(cfg: &AttackConfig, n: usize) -> Result<Vec<Prior>> {
    match (&cfg.prior, &cfg.q0_sweep) {
        (Some(_), Some(_)) => Err(Error::invalid("give either a prior or a q0 sweep, not both")),
        (Some(p), None) => {
            require_prior_len(p, n)?;
            Ok(vec![p.clone()])
        }
        (None, Some(v)) if n == 2 && !v.is_empty() => v.iter().map(|&q| Prior::binary(q)).collect(),
        (None, Some(_)) => Err(Error::invalid("a q0 sweep needs exactly two honest inputs")),
        (None, None) => Ok(vec![Prior::uniform(n)?]),
    }
}

/// Guess rate of reading the outcome and answering the likeliest input.
fn basis_rate(g: &FunctionSpec, i: usize, q: &[f64]) -> f64 {
    (0..g.outcome_count())
        .map(|k| (0..g.bob_arity()).map(|j| q[j] * g.prob(k, i, j)).fold(0.0, f64::max))
        .sum()
}

struct PerInput {
    basis: f64,
    attack: DiscriminationResult,
}

fn attack_input(g: &FunctionSpec, i: usize, prior: &Prior) -> Result<PerInput> {
    let fam = output_family(g, &CheaterInput::Honest(i), Role::Alice)?;
    let attack = match fam.len() {
        2 => helstrom(&fam.states()[0], &fam.states()[1], prior.weights()[0])?,
        _ => {
            let seed = square_root_measurement(&fam, prior)?;
            optimize_povm(&fam, prior, &seed.povm, &OptimizeOptions::default())?.0
        }
    };
    Ok(PerInput {
        basis: basis_rate(g, i, prior.weights()),
        attack,
    })
}

/// The receiver keeps a classical input `i` and measures the output state
/// optimally instead of in the outcome basis. Two honest inputs use the
/// Helstrom measurement, more use the iterative optimizer.
pub fn attack_nondet_one_sided(f: &FunctionSpec, cfg: &AttackConfig) -> Result<AttackReport> {
    if f.sidedness() != Sidedness::One {
        return Err(Error::invalid("expected a one-sided table"));
    }
    if cfg.superposition.is_some() {
        return Err(Error::invalid("one-sided analyses use classical cheater inputs"));
    }
    let role = cfg.role.unwrap_or_else(|| default_role(f));
    let g = match role {
        Role::Alice => f.clone(),
        Role::Bob => f.transposed(),
    };

    struct Best {
        prior: Prior,
        i: usize,
        attack: DiscriminationResult,
        p_honest: f64,
    }
    let mut best: Option<Best> = None;
    let mut lines = Vec::new();
    for prior in priors(cfg, g.bob_arity())? {
        let per: Vec<PerInput> = (0..g.alice_arity()).map(|i| attack_input(&g, i, &prior)).collect::<Result<_>>()?;
        for (i, p) in per.iter().enumerate() {
            lines.push(format!(
                "q={:?} i={i} basis={:.12} optimal={:.12}",
                prior.weights(),
                p.basis,
                p.attack.success_probability
            ));
        }
        let p_honest = per.iter().map(|p| p.basis).fold(0.0, f64::max);
        // first input reaching the top success
        let mut i_top = 0;
        for (i, p) in per.iter().enumerate() {
            if p.attack.success_probability > per[i_top].attack.success_probability {
                i_top = i;
            }
        }
        let adv = per[i_top].attack.success_probability - p_honest;
        if best.as_ref().is_none_or(|b| adv > b.attack.success_probability - b.p_honest) {
            best = Some(Best {
                prior,
                i: i_top,
                attack: per[i_top].attack.clone(),
                p_honest,
            });
        }
    }
    let Best { prior, i, attack, p_honest } = best.expect("at least one prior");
    let mut r = AttackReport::new(
        g.identifier(),
        Scenario::NondetOneSided,
        prior,
        InputUsed::Honest(i),
        p_honest,
        attack.success_probability,
        attack.certified_optimal,
        attack.residuals,
    );
    r.note(format!("cheater: {}", role.as_str()));
    for l in lines {
        r.note(l);
    }
    Ok(r)
}

/// The receiver's optimal measurement element for the transfer table,
/// written in the outcome basis `(0, 1, ?)`.
pub fn explicit_ot_element() -> ComplexMatrix {
    let r3 = 3.0_f64.sqrt();
    ComplexMatrix::from_real_rows(&[
        &[2.0 + r3, -1.0, 1.0 + r3],
        &[-1.0, 2.0 - r3, 1.0 - r3],
        &[1.0 + r3, 1.0 - r3, 2.0],
    ])
    .expect("finite entries")
    .scale(1.0 / 6.0)
}

#[derive(Debug, Clone)]
pub struct ExplicitPovmCheck {
    pub element: ComplexMatrix,
    pub success: f64,
    pub certified: bool,
    pub residuals: CertificateResiduals,
}

/// Evaluates and certifies `{E0, I - E0}` on the transfer states, uniform prior.
pub fn explicit_ot_check() -> Result<ExplicitPovmCheck> {
    let f = builtin::ot();
    let fam = output_family(&f, &CheaterInput::Honest(0), Role::Bob)?;
    let prior = Prior::uniform(2)?;
    let e0 = explicit_ot_element();
    let povm = Povm::one_per_state(vec![e0.clone(), &ComplexMatrix::identity(3) - &e0])?;
    let success = povm_success(&fam, &prior, &povm)?;
    let (certified, residuals) = certify_optimal(&fam, &prior, &povm)?;
    Ok(ExplicitPovmCheck {
        element: e0,
        success,
        certified,
        residuals,
    })
}

/// Bob, receiving the transfer output, guesses Alice's bit.
pub fn attack_oblivious_transfer() -> Result<(AttackReport, ExplicitPovmCheck)> {
    let mut r = attack_nondet_one_sided(&builtin::ot(), &AttackConfig::default())?;
    r.scenario = Scenario::ObliviousTransfer;
    let check = explicit_ot_check()?;
    r.note(format!(
        "explicit E0 success {:.12}, certified {}, gap to optimum {:.3e}",
        check.success,
        check.certified,
        (check.success - r.p_attack).abs()
    ));
    Ok((r, check))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_sided(p: [f64; 4]) -> FunctionSpec {
        FunctionSpec::binary_2x2_f64(Sidedness::One, p).unwrap()
    }

    fn at(q0: f64) -> AttackConfig {
        AttackConfig {
            prior: Some(Prior::binary(q0).unwrap()),
            ..Default::default()
        }
    }

    #[test]
    fn ot_values() {
        let (r, check) = attack_oblivious_transfer().unwrap();
        assert_eq!(r.p_honest, 0.75);
        let target = 0.5 + 3.0_f64.sqrt() / 4.0;
        assert!((r.p_attack - target).abs() < 1e-10);
        assert!((check.success - target).abs() < 1e-10);
        assert!(check.certified);
        assert!(r.certified);
        assert!(r.notes.contains("cheater: bob"));
    }

    #[test]
    fn deterministic_entries_give_nothing() {
        for bits in 0..16u32 {
            let p = std::array::from_fn(|n| ((bits >> n) & 1) as f64);
            let r = attack_nondet_one_sided(&one_sided(p), &at(0.37)).unwrap();
            assert!(r.advantage.abs() < 1e-10, "{p:?} {}", r.advantage);
        }
    }

    #[test]
    fn variable_bias_coin_has_advantage() {
        let coin = one_sided([0.6, 0.4, 0.6, 0.4]);
        for q0 in [0.3, 0.45, 0.7] {
            let r = attack_nondet_one_sided(&coin, &at(q0)).unwrap();
            assert!(r.advantage > 1e-4, "q0 {q0}: {}", r.advantage);
        }
    }

    #[test]
    fn mirror_symmetric_coin_at_even_prior_gives_nothing() {
        // the two output states are reflections of each other, so reading the
        // outcome is already optimal when q0 = 1/2
        let r = attack_nondet_one_sided(&one_sided([0.6, 0.4, 0.6, 0.4]), &at(0.5)).unwrap();
        assert!(r.advantage.abs() < 1e-12, "{}", r.advantage);
    }

    #[test]
    fn orthogonal_input_is_basis_optimal() {
        // with p10 = 0 and p11 = 1 the states for i = 1 are orthogonal
        let f = one_sided([0.3, 0.8, 0.0, 1.0]);
        let g = attack_input(&f, 1, &Prior::binary(0.4).unwrap()).unwrap();
        assert!((g.attack.success_probability - g.basis).abs() < 1e-12);
    }

    #[test]
    fn attack_never_below_basis() {
        let f = one_sided([0.2, 0.7, 0.9, 0.45]);
        for q0 in [0.1, 0.5, 0.8] {
            for i in 0..2 {
                let p = attack_input(&f, i, &Prior::binary(q0).unwrap()).unwrap();
                assert!(p.attack.success_probability >= p.basis - 1e-12);
            }
        }
    }

    #[test]
    fn two_sided_rejected() {
        assert!(attack_nondet_one_sided(&builtin::neq3(), &AttackConfig::default()).is_err());
    }
}
