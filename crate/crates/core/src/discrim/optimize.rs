use super::measure::complete_with_kernel;
use super::{certificate_residuals, success_of, weighted_states, DiscriminationResult, Povm};
use crate::blackbox::OutputStateFamily;
use crate::error::Result;
use crate::funcspec::Prior;
use crate::qmat::{self, ComplexMatrix};
use crate::tol::tol;

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Stop once an accepted step improves success by less than this.
    pub step_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            step_tol: 1e-12,
        }
    }
}

/// Success probability after the seed and after every accepted step.
#[derive(Debug, Clone, Default)]
pub struct OptimizeTrace {
    pub history: Vec<f64>,
}

const DILUTIONS: [f64; 10] = [10.0, 1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Fixed-point iteration `E_j <- R^{-1} A_j E_j A_j R^{-1}`, `R^2 = sum_j A_j E_j A_j`,
/// with `A_j = q_j rho_j`. A step that lowers success is retried with the
/// diluted `A_j = I + t q_j rho_j` for decreasing `t`; when no step helps
/// the iteration stops. Success never decreases between accepted steps.
pub fn optimize_povm(
    family: &OutputStateFamily,
    prior: &Prior,
    seed: &Povm,
    options: &OptimizeOptions,
) -> Result<(DiscriminationResult, OptimizeTrace)> {
    super::check_family(family, prior)?;
    let weighted = weighted_states(family, prior);
    let d = family.dim();
    let target = prior.argmax();
    let mut elements = seed.grouped(family.len())?;
    let mut success = success_of(&weighted, &elements);
    let mut trace = OptimizeTrace { history: vec![success] };

    for _ in 0..options.max_iters {
        let mut accepted = None;
        let plain = step(&weighted, &elements, target)?;
        let plain_success = success_of(&weighted, &plain);
        if plain_success >= success {
            accepted = Some((plain, plain_success));
        } else {
            for t in DILUTIONS {
                let diluted: Vec<ComplexMatrix> = weighted
                    .iter()
                    .map(|a| &ComplexMatrix::identity(d) + &a.scale(t))
                    .collect();
                let cand = step(&diluted, &elements, target)?;
                let s = success_of(&weighted, &cand);
                if s >= success {
                    accepted = Some((cand, s));
                    break;
                }
            }
        }
        let Some((next, next_success)) = accepted else { break };
        let gain = next_success - success;
        debug_assert!(gain >= -1e-12);
        elements = next;
        success = next_success;
        trace.history.push(success);
        if gain < options.step_tol {
            break;
        }
    }

    let residuals = certificate_residuals(&weighted, &elements)?;
    Ok((
        DiscriminationResult {
            success_probability: success,
            povm: Povm::one_per_state(elements)?,
            certified_optimal: residuals.within(tol().cert),
            residuals,
        },
        trace,
    ))
}

fn step(a: &[ComplexMatrix], e: &[ComplexMatrix], target: usize) -> Result<Vec<ComplexMatrix>> {
    let sandwiched: Vec<ComplexMatrix> = a.iter().zip(e).map(|(a, e)| &(a * e) * a).collect();
    let r2 = qmat::sum(&sandwiched).expect("nonempty");
    let r_inv = qmat::inv_sqrt_on_support(&r2.hermitian_part())?;
    let mut next: Vec<ComplexMatrix> = sandwiched.iter().map(|m| &(&r_inv * m) * &r_inv).collect();
    complete_with_kernel(&mut next, target);
    Ok(next)
}
