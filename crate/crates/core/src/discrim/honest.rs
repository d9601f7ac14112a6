use super::Povm;
use crate::blackbox::Role;
use crate::error::{Error, Result};
use crate::funcspec::{CanonicalForm3x3, FunctionSpec, Prior};
use crate::qmat::ComplexMatrix;

/// Best honest guessing probability for the cheating `role`:
/// `max_i sum_k max_j p(k|i,j) q_j`, with `i` the cheater's input and `j`
/// the other party's, distributed by `prior`.
pub fn honest_probability(f: &FunctionSpec, prior: &Prior, role: Role) -> Result<f64> {
    let g = match role {
        Role::Alice => f.clone(),
        Role::Bob => f.transposed(),
    };
    if prior.len() != g.bob_arity() {
        return Err(Error::dims(format!(
            "prior has {} weights, honest party has {} inputs",
            prior.len(),
            g.bob_arity()
        )));
    }
    let q = prior.weights();
    let best = (0..g.alice_arity())
        .map(|i| {
            (0..g.outcome_count())
                .map(|k| {
                    (0..g.bob_arity())
                        .map(|j| g.prob(k, i, j) * q[j])
                        .fold(0.0, f64::max)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(best)
}

/// The three-outcome measurement that reads off the input and outcome
/// registers and guesses as an honest player would, for a table in
/// canonical form. `alphas[l]` split the ambiguous basis projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HonestPovmFamily {
    pub alphas: [f64; 5],
}

impl HonestPovmFamily {
    pub fn new(alphas: [f64; 5]) -> Result<Self> {
        if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::invalid("alpha parameters must lie in [0, 1]"));
        }
        Ok(Self { alphas })
    }

    /// Elements `E_0, E_1, E_2` on the `3 x K` register of `form.base`.
    pub fn povm(&self, form: &CanonicalForm3x3) -> Result<Povm> {
        let k_count = form.base.outcome_count();
        let d = 3 * k_count;
        let (a, b) = (form.a, form.b);
        let proj = |i: usize, k: usize| ComplexMatrix::basis_projector(d, i * k_count + k);
        let [al1, al2, al3, al4, al5] = self.alphas;

        let mut e0 = proj(0, 0).scale(al1);
        let mut e1 = proj(0, 0).scale(1.0 - al1);
        if a < k_count {
            e0 = &e0 + &proj(1, a);
        }
        let split = [al2, al3, al4, al5];
        if b < k_count && b < split.len() {
            e1 = &e1 + &proj(1, b).scale(split[b]);
        }
        let e2 = &(&ComplexMatrix::identity(d) - &e0) - &e1;
        Povm::one_per_state(vec![e0, e1, e2])
    }

    /// A coarse grid over the five parameters, `steps` points per axis.
    pub fn grid(steps: usize) -> impl Iterator<Item = HonestPovmFamily> {
        let steps = steps.max(2);
        let axis: Vec<f64> = (0..steps).map(|s| s as f64 / (steps - 1) as f64).collect();
        let n = steps.pow(5);
        (0..n).map(move |mut idx| {
            let mut alphas = [0.0; 5];
            for a in &mut alphas {
                *a = axis[idx % steps];
                idx /= steps;
            }
            HonestPovmFamily { alphas }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{output_family, CheaterInput, InputSuperposition};
    use crate::discrim::{certify_optimal, povm_success};
    use crate::funcspec::{canonicalize_3x3, enumerate_valid_3x3, rational, Sidedness};

    /// Every deterministic guess rule `k -> j` for every cheater input.
    fn brute_force_honest(f: &FunctionSpec, q: &[f64]) -> f64 {
        let (n, m, k_count) = (f.alice_arity(), f.bob_arity(), f.outcome_count());
        let mut best: f64 = 0.0;
        for i in 0..n {
            for rule in 0..m.pow(k_count as u32) {
                let mut r = rule;
                let mut p = 0.0;
                for k in 0..k_count {
                    let j = r % m;
                    r /= m;
                    p += q[j] * f.prob(k, i, j);
                }
                best = best.max(p);
            }
        }
        best
    }

    fn one_minus_delta() -> FunctionSpec {
        FunctionSpec::deterministic(Sidedness::Two, 2, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap()
    }

    fn two_term_family(base: &FunctionSpec) -> crate::blackbox::OutputStateFamily {
        let a = InputSuperposition::from_real_unnormalized(&[1.0, 1.0, 0.0]).unwrap();
        output_family(base, &CheaterInput::Superposition(a), Role::Alice).unwrap()
    }

    #[test]
    fn one_minus_delta_is_two_thirds() {
        let f = one_minus_delta();
        let q = Prior::uniform(3).unwrap();
        let p = honest_probability(&f, &q, Role::Alice).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert!((brute_force_honest(&f, q.weights()) - p).abs() < 1e-12);
    }

    #[test]
    fn biased_binary_table_gives_q0() {
        let f = FunctionSpec::binary_2x2_f64(Sidedness::Two, [0.3, 0.6, 0.8, 0.1]).unwrap();
        let q0 = 1.0 - 1e-3;
        let p = honest_probability(&f, &Prior::binary(q0).unwrap(), Role::Alice).unwrap();
        assert!((p - q0).abs() < 1e-12);
    }

    #[test]
    fn ot_bob_guessing_alice() {
        let half = rational(1, 2);
        let z = rational(0, 1);
        // blocks[k][j][i]: Alice's bit i, Bob's single input j; outcomes 0, 1, ?
        let f = FunctionSpec::probabilistic(
            Sidedness::One,
            vec![
                vec![vec![half.clone(), z.clone()]],
                vec![vec![z.clone(), half.clone()]],
                vec![vec![half.clone(), half.clone()]],
            ],
        )
        .unwrap();
        let p = honest_probability(&f, &Prior::uniform(2).unwrap(), Role::Bob).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_all_classes_and_priors() {
        let priors = [vec![1.0 / 3.0; 3], vec![0.5, 0.3, 0.2], vec![0.1, 0.1, 0.8]];
        for f in enumerate_valid_3x3() {
            for q in &priors {
                let p = honest_probability(&f, &Prior::new(q.clone()).unwrap(), Role::Alice).unwrap();
                assert!((p - brute_force_honest(&f, q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_is_valid_and_alpha_independent() {
        let prior = Prior::uniform(3).unwrap();
        for f in enumerate_valid_3x3() {
            let form = canonicalize_3x3(&f).unwrap();
            let fam = two_term_family(&form.base);
            let ph = honest_probability(&form.base, &prior, Role::Alice).unwrap();
            for h in HonestPovmFamily::grid(3) {
                let povm = h.povm(&form).unwrap();
                let p = povm_success(&fam, &prior, &povm).unwrap();
                assert!((p - ph).abs() < 1e-9, "{} alphas {:?}: {p} vs {ph}", f.identifier(), h.alphas);
            }
        }
    }

    #[test]
    fn family_never_certified() {
        let prior = Prior::uniform(3).unwrap();
        for f in enumerate_valid_3x3() {
            let form = canonicalize_3x3(&f).unwrap();
            let fam = two_term_family(&form.base);
            for h in HonestPovmFamily::grid(3) {
                let (ok, res) = certify_optimal(&fam, &prior, &h.povm(&form).unwrap()).unwrap();
                assert!(!ok, "{} certified with {:?}", f.identifier(), h.alphas);
                assert!(res.stationarity > 1e-3 || res.min_eigenvalue < -1e-3);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_alpha() {
        assert!(HonestPovmFamily::new([0.0, 0.5, 1.0, 1.1, 0.0]).is_err());
        assert!(HonestPovmFamily::new([0.0, 0.5, 1.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn prior_length_checked() {
        assert!(honest_probability(&one_minus_delta(), &Prior::uniform(2).unwrap(), Role::Alice).is_err());
    }
}
