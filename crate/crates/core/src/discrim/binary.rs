//! Closed forms for binary-output 2x2 tables.

use super::certificate_residuals;
use crate::blackbox::alice_reduced_state_one_sided;
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, Prior, Sidedness};
use crate::qmat::ComplexMatrix;
use crate::tol::tol;

/// Eigenvalues of `q0 rho0 - q1 rho1` for a two-sided binary table under the
/// `(|0> + |1>)/sqrt(2)` input. `lambda` come from the outcome-0 block,
/// `mu` from the outcome-1 block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub a: f64,
    pub b: f64,
    pub a_bar: f64,
    pub b_bar: f64,
}

impl DifferenceSpectrum {
    pub fn values(&self) -> [f64; 4] {
        [self.lambda_plus, self.lambda_minus, self.mu_plus, self.mu_minus]
    }

    /// `(1 + lambda+ - lambda- + mu+ - mu-) / 2`
    pub fn success_probability(&self) -> f64 {
        0.5 * (1.0 + self.lambda_plus - self.lambda_minus + self.mu_plus - self.mu_minus)
    }
}

fn require_binary_2x2(f: &FunctionSpec, side: Sidedness) -> Result<()> {
    if f.sidedness() != side || f.alice_arity() != 2 || f.bob_arity() != 2 || f.outcome_count() != 2 {
        return Err(Error::invalid(format!(
            "expected a {}-sided 2x2 binary-output table",
            if side == Sidedness::Two { "two" } else { "one" }
        )));
    }
    Ok(())
}

/// `p[i][j] = p(0|i,j)`
fn zero_probs(f: &FunctionSpec) -> [[f64; 2]; 2] {
    [[f.prob(0, 0, 0), f.prob(0, 0, 1)], [f.prob(0, 1, 0), f.prob(0, 1, 1)]]
}

fn block(p: [[f64; 2]; 2], q0: f64) -> (f64, f64, f64, f64) {
    let q1 = 1.0 - q0;
    let a = (p[0][0] + p[1][0]) * q0 - (p[0][1] + p[1][1]) * q1;
    let cross = (p[0][1] * p[1][0]).sqrt() - (p[0][0] * p[1][1]).sqrt();
    let b = 4.0 * cross * cross * q0 * q1;
    let root = (a * a + b).sqrt();
    (0.25 * (a + root), 0.25 * (a - root), a, b)
}

pub fn binary_difference_spectrum(f: &FunctionSpec, q0: f64) -> Result<DifferenceSpectrum> {
    require_binary_2x2(f, Sidedness::Two)?;
    Prior::binary(q0)?;
    let p = zero_probs(f);
    let p_bar = p.map(|row| row.map(|x| 1.0 - x));
    let (lambda_plus, lambda_minus, a, b) = block(p, q0);
    let (mu_plus, mu_minus, a_bar, b_bar) = block(p_bar, q0);
    Ok(DifferenceSpectrum {
        lambda_plus,
        lambda_minus,
        mu_plus,
        mu_minus,
        a,
        b,
        a_bar,
        b_bar,
    })
}

/// Off-diagonal residual of the stationarity condition for the outcome-basis
/// measurement on a one-sided table with cheater input `i`.
pub fn basis_measurement_residual(f: &FunctionSpec, i: usize, q0: f64) -> Result<f64> {
    require_binary_2x2(f, Sidedness::One)?;
    let prior = Prior::binary(q0)?;
    let weighted: Vec<ComplexMatrix> = (0..2)
        .map(|j| Ok(alice_reduced_state_one_sided(f, i, j)?.matrix().scale(prior.weights()[j])))
        .collect::<Result<_>>()?;
    let elements = [ComplexMatrix::basis_projector(2, 0), ComplexMatrix::basis_projector(2, 1)];
    Ok(certificate_residuals(&weighted, &elements)?.stationarity)
}

/// True iff the outcome-basis measurement is stationary for this `i` and `q0`.
pub fn basis_measurement_stationary(f: &FunctionSpec, i: usize, q0: f64) -> Result<bool> {
    Ok(basis_measurement_residual(f, i, q0)? <= tol().cert)
}
