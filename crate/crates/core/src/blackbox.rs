//! States held by the cheating party after an ideal black-box run.
//!
//! For a two-sided function the box maps
//! `|i>_A |j>_B |0>|0>  ->  |i>_A |j>_B  sum_k alpha^k_ij |k>_A |k>_B`
//! with `alpha^k_ij = sqrt(p(k | i, j))`. If Alice feeds in `sum_i a_i |i>`
//! she ends up holding, for Bob's input `j`,
//!
//! `sigma_j = sum_{i,i',k} a_i conj(a_i') alpha^k_ij alpha^k_i'j |i><i'| (x) |k><k|`
//!
//! on her (input register, outcome register) pair. Bob's registers are
//! traced out in closed form here; the tests cross-check against the full
//! purification.

use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, Sidedness};
use crate::qmat::{c, Complex64, ComplexMatrix, DensityState, Ket, ZERO};

/// The cheating party's coherent input `sum_i a_i |i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSuperposition(Ket);

impl InputSuperposition {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Ok(Self(Ket::new(amplitudes)?))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Normalizes the given real weights.
    pub fn from_real_unnormalized(amplitudes: &[f64]) -> Result<Self> {
        Ok(Self(Ket::normalized(amplitudes.iter().map(|&x| c(x, 0.0)).collect())?))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Ok(Self(Ket::uniform(n)?))
    }

    pub fn basis(n: usize, i: usize) -> Result<Self> {
        Ok(Self(Ket::basis(n, i)?))
    }

    /// `cos(theta)|0> + sin(theta)|1>`
    pub fn real_pair(theta: f64) -> Self {
        Self(Ket::normalized(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]).expect("unit vector"))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.amplitudes()
    }

    pub fn len(&self) -> usize {
        self.0.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.0.dim() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        }
    }
}

/// What the cheating party feeds into the box.
#[derive(Debug, Clone, PartialEq)]
pub enum CheaterInput {
    Superposition(InputSuperposition),
    Honest(usize),
}

/// One reduced state per input of the honest party.
#[derive(Debug, Clone)]
pub struct OutputStateFamily {
    states: Vec<DensityState>,
    /// (input register dimension, outcome register dimension)
    dims: (usize, usize),
}

impl OutputStateFamily {
    pub fn new(states: Vec<DensityState>, dims: (usize, usize)) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("state family must be nonempty"));
        }
        let d = dims.0 * dims.1;
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::dims(format!("state of dimension {} in a family of dimension {d}", bad.dim())));
        }
        Ok(Self { states, dims })
    }

    pub fn from_states(states: Vec<DensityState>) -> Result<Self> {
        let d = states.first().map_or(0, DensityState::dim);
        Self::new(states, (1, d))
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn matrices(&self) -> Vec<&ComplexMatrix> {
        self.states.iter().map(DensityState::matrix).collect()
    }
}

fn amplitude(f: &FunctionSpec, k: usize, i: usize, j: usize) -> f64 {
    f.prob(k, i, j).max(0.0).sqrt()
}

/// Alice's reduced state `sigma_j` for a two-sided function.
pub fn alice_reduced_state(f: &FunctionSpec, a: &InputSuperposition, j: usize) -> Result<DensityState> {
    if f.sidedness() != Sidedness::Two {
        return Err(Error::invalid("superposed-input states are built for two-sided functions"));
    }
    let n = f.alice_arity();
    let k_count = f.outcome_count();
    if a.len() != n {
        return Err(Error::dims(format!("superposition has {} amplitudes, function has {n} inputs", a.len())));
    }
    if j >= f.bob_arity() {
        return Err(Error::invalid(format!("honest input {j} out of range ({} inputs)", f.bob_arity())));
    }
    let d = n * k_count;
    let mut sigma = ComplexMatrix::zeros(d, d);
    let amps = a.amplitudes();
    for k in 0..k_count {
        let w: Vec<Complex64> = (0..n).map(|i| amps[i] * amplitude(f, k, i, j)).collect();
        for i in 0..n {
            if w[i] == ZERO {
                continue;
            }
            for i2 in 0..n {
                sigma.set(i * k_count + k, i2 * k_count + k, w[i] * w[i2].conj());
            }
        }
    }
    DensityState::new(sigma, vec![n, k_count])
}

/// The pure outcome-register state `sum_k sqrt(p(k|i,j)) |k>` handed to Alice
/// by a one-sided box when both inputs are classical.
pub fn alice_reduced_state_one_sided(f: &FunctionSpec, i: usize, j: usize) -> Result<DensityState> {
    if f.sidedness() != Sidedness::One {
        return Err(Error::invalid("one-sided state requested for a two-sided function"));
    }
    if i >= f.alice_arity() || j >= f.bob_arity() {
        return Err(Error::invalid(format!("inputs (i={i}, j={j}) out of range")));
    }
    let v: Vec<Complex64> = (0..f.outcome_count()).map(|k| c(amplitude(f, k, i, j), 0.0)).collect();
    let ket = Ket::normalized(v)?;
    DensityState::from_ket(&ket, vec![f.outcome_count()])
}

/// All states the cheating party may end up with, one per honest input.
/// A cheating Bob is handled by transposing the table.
pub fn output_family(f: &FunctionSpec, input: &CheaterInput, role: Role) -> Result<OutputStateFamily> {
    let g = match role {
        Role::Alice => f.clone(),
        Role::Bob => f.transposed(),
    };
    let honest_count = g.bob_arity();
    match (g.sidedness(), input) {
        (Sidedness::Two, CheaterInput::Superposition(a)) => {
            let states = (0..honest_count)
                .map(|j| alice_reduced_state(&g, a, j))
                .collect::<Result<Vec<_>>>()?;
            OutputStateFamily::new(states, (g.alice_arity(), g.outcome_count()))
        }
        (Sidedness::Two, CheaterInput::Honest(i)) => {
            let a = InputSuperposition::basis(g.alice_arity(), *i)?;
            output_family(&g, &CheaterInput::Superposition(a), Role::Alice)
        }
        (Sidedness::One, CheaterInput::Honest(i)) => {
            let states = (0..honest_count)
                .map(|j| alice_reduced_state_one_sided(&g, *i, j))
                .collect::<Result<Vec<_>>>()?;
            OutputStateFamily::new(states, (1, g.outcome_count()))
        }
        (Sidedness::One, CheaterInput::Superposition(_)) => Err(Error::invalid(
            "one-sided functions are attacked with an honest input index",
        )),
    }
}
