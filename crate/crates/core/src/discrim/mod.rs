//! Minimum-error state discrimination.
//!
//! Given states `rho_j` with prior weights `q_j`, a POVM `{E_j}` guesses `j`
//! correctly with probability `sum_j q_j tr(E_j rho_j)`. This module provides
//! the honest-play baseline, the two-state optimum, the square-root
//! measurement, an iterative optimizer, and the stationarity/positivity
//! certificate that decides whether a given POVM is optimal.

mod binary;
mod honest;
mod measure;
mod optimize;

pub use binary::{
    basis_measurement_residual, basis_measurement_stationary, binary_difference_spectrum, DifferenceSpectrum,
};
pub use honest::{honest_probability, HonestPovmFamily};
pub use measure::{helstrom, square_root_measurement, square_root_measurement_with, SrmWeighting};
pub use optimize::{optimize_povm, OptimizeOptions, OptimizeTrace};

use crate::blackbox::OutputStateFamily;
use crate::error::{Error, Result};
use crate::funcspec::Prior;
use crate::qmat::{self, ComplexMatrix};
use crate::tol::tol;

/// A finite POVM; element `e` announces the guess `labels[e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
    labels: Vec<usize>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, labels: Vec<usize>) -> Result<Self> {
        let p = Self::new_unchecked(elements, labels)?;
        p.validate()?;
        Ok(p)
    }

    /// Element `j` guesses state `j`.
    pub fn one_per_state(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (0..elements.len()).collect();
        Self::new(elements, labels)
    }

    fn new_unchecked(elements: Vec<ComplexMatrix>, labels: Vec<usize>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("POVM must have at least one element"));
        }
        if elements.len() != labels.len() {
            return Err(Error::dims("one label per POVM element is required"));
        }
        let d = elements[0].rows();
        if elements.iter().any(|e| !e.is_square() || e.rows() != d) {
            return Err(Error::dims("POVM elements must be square and of equal dimension"));
        }
        Ok(Self { elements, labels })
    }

    fn validate(&self) -> Result<()> {
        let t = tol();
        for (n, e) in self.elements.iter().enumerate() {
            let eig = qmat::eig_hermitian(e)
                .map_err(|err| Error::invalid(format!("POVM element {n}: {err}")))?;
            if eig.min_value() < -t.psd {
                return Err(Error::invalid(format!(
                    "POVM element {n} is not PSD (min eigenvalue {:e})",
                    eig.min_value()
                )));
            }
        }
        let total = qmat::sum(&self.elements).expect("nonempty");
        let deviation = (&total - &ComplexMatrix::identity(self.dim())).max_abs();
        if deviation > t.recon {
            return Err(Error::invalid(format!(
                "POVM elements do not sum to the identity (max deviation {deviation:e})"
            )));
        }
        Ok(())
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Sums elements sharing a label into one operator per guess `0..n`.
    pub fn grouped(&self, n: usize) -> Result<Vec<ComplexMatrix>> {
        let d = self.dim();
        let mut out = vec![ComplexMatrix::zeros(d, d); n];
        for (e, &l) in self.elements.iter().zip(&self.labels) {
            if l >= n {
                return Err(Error::invalid(format!("POVM label {l} has no matching state (have {n})")));
            }
            out[l] = &out[l] + e;
        }
        Ok(out)
    }
}

/// Residuals of the optimality conditions
/// `E_j (q_j rho_j - q_l rho_l) E_l = 0` and `sum_j E_j q_j rho_j - q_l rho_l >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CertificateResiduals {
    /// Largest entry modulus over all `E_j (q_j rho_j - q_l rho_l) E_l`.
    pub stationarity: f64,
    /// Most negative eigenvalue of the Hermitian part of `Y - q_l rho_l` over `l`.
    pub min_eigenvalue: f64,
    /// Largest entry modulus of the anti-Hermitian part of `Y - q_l rho_l`.
    pub anti_hermitian: f64,
}

impl CertificateResiduals {
    pub fn within(&self, tolerance: f64) -> bool {
        self.stationarity <= tolerance && self.min_eigenvalue >= -tolerance && self.anti_hermitian <= tolerance
    }
}

#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    pub success_probability: f64,
    pub povm: Povm,
    pub certified_optimal: bool,
    pub residuals: CertificateResiduals,
}

fn check_family(family: &OutputStateFamily, prior: &Prior) -> Result<()> {
    if family.len() != prior.len() {
        return Err(Error::dims(format!(
            "{} states but {} prior weights",
            family.len(),
            prior.len()
        )));
    }
    Ok(())
}

/// `sum_e q_{label(e)} tr(E_e rho_{label(e)})`
pub fn povm_success(family: &OutputStateFamily, prior: &Prior, povm: &Povm) -> Result<f64> {
    check_family(family, prior)?;
    if povm.dim() != family.dim() {
        return Err(Error::dims(format!(
            "POVM of dimension {} for states of dimension {}",
            povm.dim(),
            family.dim()
        )));
    }
    let grouped = povm.grouped(family.len())?;
    Ok(success_of(&weighted_states(family, prior), &grouped))
}

pub(crate) fn weighted_states(family: &OutputStateFamily, prior: &Prior) -> Vec<ComplexMatrix> {
    family
        .states()
        .iter()
        .zip(prior.weights())
        .map(|(s, &q)| s.matrix().scale(q))
        .collect()
}

/// Success for one operator per weighted state; Re tr(E_j A_j) summed.
pub(crate) fn success_of(weighted: &[ComplexMatrix], elements: &[ComplexMatrix]) -> f64 {
    weighted
        .iter()
        .zip(elements)
        .map(|(a, e)| trace_of_product(e, a))
        .sum()
}

fn trace_of_product(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let d = x.rows();
    let mut acc = 0.0;
    for r in 0..d {
        for k in 0..d {
            acc += (x.get(r, k) * y.get(k, r)).re;
        }
    }
    acc
}

/// Checks the necessary and sufficient optimality conditions for `povm`.
pub fn certify_optimal(
    family: &OutputStateFamily,
    prior: &Prior,
    povm: &Povm,
) -> Result<(bool, CertificateResiduals)> {
    check_family(family, prior)?;
    let elements = povm.grouped(family.len())?;
    let residuals = certificate_residuals(&weighted_states(family, prior), &elements)?;
    Ok((residuals.within(tol().cert), residuals))
}

pub(crate) fn certificate_residuals(
    weighted: &[ComplexMatrix],
    elements: &[ComplexMatrix],
) -> Result<CertificateResiduals> {
    let n = weighted.len();
    let mut stationarity: f64 = 0.0;
    for j in 0..n {
        for l in 0..n {
            if j == l {
                continue;
            }
            let diff = &weighted[j] - &weighted[l];
            let m = &(&elements[j] * &diff) * &elements[l];
            stationarity = stationarity.max(m.max_abs());
        }
    }
    let y = qmat::sum(
        elements
            .iter()
            .zip(weighted)
            .map(|(e, a)| e * a)
            .collect::<Vec<_>>()
            .iter(),
    )
    .expect("nonempty");
    let mut min_eigenvalue = f64::INFINITY;
    let mut anti_hermitian: f64 = 0.0;
    for a in weighted {
        let z = &y - a;
        anti_hermitian = anti_hermitian.max(z.anti_hermitian_part().max_abs());
        min_eigenvalue = min_eigenvalue.min(qmat::min_eigenvalue(&z.hermitian_part())?);
    }
    Ok(CertificateResiduals {
        stationarity,
        min_eigenvalue,
        anti_hermitian,
    })
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::qmat::{c, DensityState, Ket, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn ot_family() -> OutputStateFamily {
        let s = 0.5_f64.sqrt();
        let psi0 = Ket::new(vec![c(s, 0.0), ZERO, c(s, 0.0)]).unwrap();
        let psi1 = Ket::new(vec![ZERO, c(s, 0.0), c(s, 0.0)]).unwrap();
        family(vec![
            DensityState::from_ket(&psi0, vec![3]).unwrap(),
            DensityState::from_ket(&psi1, vec![3]).unwrap(),
        ])
    }

    fn explicit_ot_element() -> ComplexMatrix {
        let r3 = 3.0_f64.sqrt();
        ComplexMatrix::from_real_rows(&[
            &[2.0 + r3, -1.0, 1.0 + r3],
            &[-1.0, 2.0 - r3, 1.0 - r3],
            &[1.0 + r3, 1.0 - r3, 2.0],
        ])
        .unwrap()
        .scale(1.0 / 6.0)
    }

    #[test]
    fn trivial_povm_success() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fam = family(vec![random_mixed(&mut rng, 3, 2)]);
        let povm = Povm::one_per_state(vec![ComplexMatrix::identity(3)]).unwrap();
        let p = povm_success(&fam, &Prior::uniform(1).unwrap(), &povm).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn explicit_ot_povm_is_optimal() {
        let e0 = explicit_ot_element();
        let e1 = &ComplexMatrix::identity(3) - &e0;
        let povm = Povm::one_per_state(vec![e0, e1]).unwrap();
        let fam = ot_family();
        let prior = Prior::uniform(2).unwrap();
        let p = povm_success(&fam, &prior, &povm).unwrap();
        assert!((p - (0.5 + 3.0_f64.sqrt() / 4.0)).abs() < 1e-10);
        let (ok, res) = certify_optimal(&fam, &prior, &povm).unwrap();
        assert!(ok, "{res:?}");
        assert!(res.stationarity < 1e-8 && res.min_eigenvalue > -1e-8);
    }

    #[test]
    fn povm_validation() {
        let i2 = ComplexMatrix::identity(2);
        assert!(Povm::one_per_state(vec![i2.scale(0.5), i2.scale(0.4)]).is_err());
        assert!(Povm::one_per_state(vec![ComplexMatrix::diag(&[1.5, 0.5]), ComplexMatrix::diag(&[-0.5, 0.5])]).is_err());
        assert!(Povm::new(vec![i2.clone()], vec![]).is_err());
        assert!(Povm::one_per_state(vec![i2.scale(0.5), i2.scale(0.5)]).is_ok());
    }

    #[test]
    fn label_and_dimension_mismatch_rejected() {
        let fam = ot_family();
        let prior = Prior::uniform(2).unwrap();
        let wrong_dim = Povm::one_per_state(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(povm_success(&fam, &prior, &wrong_dim).is_err());
        let bad_label = Povm::new(vec![ComplexMatrix::identity(3)], vec![5]).unwrap();
        assert!(povm_success(&fam, &prior, &bad_label).is_err());
        assert!(povm_success(&fam, &Prior::uniform(3).unwrap(), &bad_label).is_err());
    }

    #[test]
    fn helstrom_is_certified_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4E15);
        for _ in 0..100 {
            let d = rng.random_range(2..=6);
            let r0 = random_state(&mut rng, d);
            let r1 = random_state(&mut rng, d);
            let q0 = rng.random_range(0.0..1.0);
            let res = helstrom(&r0, &r1, q0).unwrap();
            assert!(res.certified_optimal, "{:?}", res.residuals);
            assert!(res.residuals.within(crate::tol::CERT_TOL));
            let fam = family(vec![r0, r1]);
            let (ok, _) = certify_optimal(&fam, &Prior::binary(q0).unwrap(), &res.povm).unwrap();
            assert!(ok);
        }
    }
}
