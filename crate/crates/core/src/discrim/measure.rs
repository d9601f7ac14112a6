use super::{certificate_residuals, success_of, weighted_states, DiscriminationResult, Povm};
use crate::blackbox::OutputStateFamily;
use crate::error::{Error, Result};
use crate::funcspec::Prior;
use crate::qmat::{self, ComplexMatrix, DensityState};
use crate::tol::tol;

/// Optimal two-state measurement: project onto the nonnegative eigenspace of
/// `q0 rho0 - q1 rho1`.
pub fn helstrom(rho0: &DensityState, rho1: &DensityState, q0: f64) -> Result<DiscriminationResult> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::dims("Helstrom states must share a dimension"));
    }
    let prior = Prior::binary(q0)?;
    let q1 = prior.weights()[1];
    let gamma = &rho0.matrix().scale(q0) - &rho1.matrix().scale(q1);
    let eig = qmat::eig_hermitian(&gamma)?;
    let e0 = eig.map(|x| if x >= 0.0 { 1.0 } else { 0.0 });
    let e1 = eig.map(|x| if x >= 0.0 { 0.0 } else { 1.0 });
    let trace_norm: f64 = eig.values.iter().map(|x| x.abs()).sum();
    let success_probability = 0.5 * (1.0 + trace_norm);

    let weighted = [rho0.matrix().scale(q0), rho1.matrix().scale(q1)];
    let elements = vec![e0, e1];
    let residuals = certificate_residuals(&weighted, &elements)?;
    Ok(DiscriminationResult {
        success_probability,
        povm: Povm::one_per_state(elements)?,
        certified_optimal: residuals.within(tol().cert),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SrmWeighting {
    /// `S = sum_j sigma_j`
    #[default]
    Unweighted,
    /// `S = sum_j q_j sigma_j`, elements built from `q_j sigma_j`
    Prior,
}

/// Square-root ("pretty good") measurement, unweighted.
pub fn square_root_measurement(family: &OutputStateFamily, prior: &Prior) -> Result<DiscriminationResult> {
    square_root_measurement_with(family, prior, SrmWeighting::Unweighted)
}

/// `E_j = S^{-1/2} s_j S^{-1/2}` with the pseudo-inverse on the support of `S`;
/// the projector onto `ker S` goes to the highest-prior element.
pub fn square_root_measurement_with(
    family: &OutputStateFamily,
    prior: &Prior,
    weighting: SrmWeighting,
) -> Result<DiscriminationResult> {
    super::check_family(family, prior)?;
    let parts: Vec<ComplexMatrix> = match weighting {
        SrmWeighting::Unweighted => family.matrices().into_iter().cloned().collect(),
        SrmWeighting::Prior => weighted_states(family, prior),
    };
    let s = qmat::sum(&parts).expect("nonempty family");
    let r = qmat::inv_sqrt_on_support(&s)?;
    let mut elements: Vec<ComplexMatrix> = parts.iter().map(|p| &(&r * p) * &r).collect();
    complete_with_kernel(&mut elements, prior.argmax());

    let weighted = weighted_states(family, prior);
    let success_probability = success_of(&weighted, &elements);
    let residuals = certificate_residuals(&weighted, &elements)?;
    Ok(DiscriminationResult {
        success_probability,
        povm: Povm::one_per_state(elements)?,
        certified_optimal: residuals.within(tol().cert),
        residuals,
    })
}

/// Adds `I - sum_j E_j` to element `target` and symmetrizes every element.
/// Used after building elements on a support: the remainder is the kernel projector.
pub(crate) fn complete_with_kernel(elements: &mut [ComplexMatrix], target: usize) {
    let d = elements[0].rows();
    for e in elements.iter_mut() {
        *e = e.hermitian_part();
    }
    let total = qmat::sum(elements.iter()).expect("nonempty");
    let rest = (&ComplexMatrix::identity(d) - &total).hermitian_part();
    elements[target] = &elements[target] + &rest;
}
