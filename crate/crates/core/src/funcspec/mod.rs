//! Two-party function specifications.
//!
//! A function is given either as a deterministic outcome matrix `f(i, j)` or
//! as a table of exact rational probabilities `p(k | i, j)`. Alice's input
//! `i` indexes columns and Bob's input `j` indexes rows, matching the way the
//! tables are written out in the function-file format.

mod canon;
mod parse;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use canon::{canonicalize_3x3, enumerate_valid_3x3, CanonicalForm3x3};
pub use parse::parse_function_file;

use crate::error::{Error, Result};
use crate::tol::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sidedness {
    /// Only one party (the one mounting the attack) receives the outcome.
    One,
    /// Both parties receive the same outcome.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Deterministic,
    Probabilistic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Table {
    /// `rows[j][i] = f(i, j)`
    Deterministic(Vec<Vec<usize>>),
    /// `blocks[k][j][i] = p(k | i, j)`
    Probabilistic(Vec<Vec<Vec<BigRational>>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSpec {
    alice_arity: usize,
    bob_arity: usize,
    outcome_count: usize,
    sidedness: Sidedness,
    table: Table,
}

/// Result of checking the potentially-concealing and non-degeneracy conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    /// Every row and every column repeats some outcome.
    pub potentially_concealing: bool,
    /// No two rows and no two columns coincide.
    pub non_degenerate: bool,
}

impl Conditions {
    pub fn both(&self) -> bool {
        self.potentially_concealing && self.non_degenerate
    }
}

impl FunctionSpec {
    pub fn deterministic(sidedness: Sidedness, outcome_count: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let bob_arity = rows.len();
        let alice_arity = rows.first().map_or(0, Vec::len);
        if alice_arity == 0 || bob_arity == 0 {
            return Err(Error::invalid("function table must be nonempty"));
        }
        if rows.iter().any(|r| r.len() != alice_arity) {
            return Err(Error::dims("ragged outcome matrix"));
        }
        if outcome_count == 0 {
            return Err(Error::invalid("outcome count must be positive"));
        }
        if let Some(&bad) = rows.iter().flatten().find(|&&k| k >= outcome_count) {
            return Err(Error::invalid(format!(
                "outcome label {bad} out of range for {outcome_count} outcomes"
            )));
        }
        Ok(Self {
            alice_arity,
            bob_arity,
            outcome_count,
            sidedness,
            table: Table::Deterministic(rows),
        })
    }

    /// `blocks[k][j][i] = p(k | i, j)`; every `(i, j)` column must sum to exactly one.
    pub fn probabilistic(sidedness: Sidedness, blocks: Vec<Vec<Vec<BigRational>>>) -> Result<Self> {
        let outcome_count = blocks.len();
        if outcome_count == 0 {
            return Err(Error::invalid("outcome count must be positive"));
        }
        let bob_arity = blocks[0].len();
        let alice_arity = blocks[0].first().map_or(0, Vec::len);
        if alice_arity == 0 || bob_arity == 0 {
            return Err(Error::invalid("probability table must be nonempty"));
        }
        for block in &blocks {
            if block.len() != bob_arity || block.iter().any(|r| r.len() != alice_arity) {
                return Err(Error::dims("outcome blocks have inconsistent shapes"));
            }
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        for j in 0..bob_arity {
            for i in 0..alice_arity {
                let mut total = BigRational::zero();
                for (k, block) in blocks.iter().enumerate() {
                    let p = &block[j][i];
                    if *p < zero || *p > one {
                        return Err(Error::invalid(format!("p({k}|{i},{j}) = {p} is not a probability")));
                    }
                    total += p;
                }
                if total != one {
                    return Err(Error::invalid(format!(
                        "probabilities for inputs (i={i}, j={j}) sum to {total}, not 1"
                    )));
                }
            }
        }
        Ok(Self {
            alice_arity,
            bob_arity,
            outcome_count,
            sidedness,
            table: Table::Probabilistic(blocks),
        })
    }

    /// Convenience constructor for binary-output tables given as
    /// `(p00, p01, p10, p11)` with `p_ij = p(0 | i, j)`.
    pub fn binary_2x2(sidedness: Sidedness, p: [BigRational; 4]) -> Result<Self> {
        let [p00, p01, p10, p11] = p;
        let one = BigRational::one();
        let zero_block = vec![vec![p00.clone(), p10.clone()], vec![p01.clone(), p11.clone()]];
        let one_block = vec![
            vec![&one - &p00, &one - &p10],
            vec![&one - &p01, &one - &p11],
        ];
        Self::probabilistic(sidedness, vec![zero_block, one_block])
    }

    pub fn binary_2x2_f64(sidedness: Sidedness, p: [f64; 4]) -> Result<Self> {
        let conv = |x: f64| {
            BigRational::from_float(x).ok_or_else(|| Error::invalid(format!("{x} is not a finite probability")))
        };
        Self::binary_2x2(sidedness, [conv(p[0])?, conv(p[1])?, conv(p[2])?, conv(p[3])?])
    }

    pub fn alice_arity(&self) -> usize {
        self.alice_arity
    }

    pub fn bob_arity(&self) -> usize {
        self.bob_arity
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn kind(&self) -> Kind {
        match self.table {
            Table::Deterministic(_) => Kind::Deterministic,
            Table::Probabilistic(_) => Kind::Probabilistic,
        }
    }

    /// Outcome matrix `rows[j][i]` for deterministic functions.
    pub fn outcome_rows(&self) -> Option<&[Vec<usize>]> {
        match &self.table {
            Table::Deterministic(rows) => Some(rows),
            Table::Probabilistic(_) => None,
        }
    }

    pub fn prob_exact(&self, k: usize, i: usize, j: usize) -> BigRational {
        match &self.table {
            Table::Deterministic(rows) => {
                if rows[j][i] == k {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            Table::Probabilistic(blocks) => blocks[k][j][i].clone(),
        }
    }

    /// `p(k | i, j)` as a double; exact rationals are rounded only here.
    pub fn prob(&self, k: usize, i: usize, j: usize) -> f64 {
        match &self.table {
            Table::Deterministic(rows) => {
                if rows[j][i] == k {
                    1.0
                } else {
                    0.0
                }
            }
            Table::Probabilistic(blocks) => blocks[k][j][i].to_f64().unwrap_or(f64::NAN),
        }
    }

    /// True when every probability is 0 or 1, whatever the representation.
    pub fn is_effectively_deterministic(&self) -> bool {
        match &self.table {
            Table::Deterministic(_) => true,
            Table::Probabilistic(blocks) => blocks
                .iter()
                .flatten()
                .flatten()
                .all(|p| p.is_zero() || p.is_one()),
        }
    }

    /// Swaps the roles of Alice and Bob.
    pub fn transposed(&self) -> Self {
        let table = match &self.table {
            Table::Deterministic(rows) => Table::Deterministic(transpose(rows)),
            Table::Probabilistic(blocks) => Table::Probabilistic(blocks.iter().map(|b| transpose(b)).collect()),
        };
        Self {
            alice_arity: self.bob_arity,
            bob_arity: self.alice_arity,
            outcome_count: self.outcome_count,
            sidedness: self.sidedness,
            table,
        }
    }

    /// Potentially-concealing and non-degeneracy checks; deterministic only.
    pub fn validate_conditions(&self) -> Result<Conditions> {
        let rows = self
            .outcome_rows()
            .ok_or_else(|| Error::invalid("conditions are defined for deterministic functions only"))?;
        Ok(conditions_of(rows))
    }

    /// Stable textual identifier derived from the table contents.
    pub fn identifier(&self) -> String {
        let side = match self.sidedness {
            Sidedness::One => "one",
            Sidedness::Two => "two",
        };
        match &self.table {
            Table::Deterministic(rows) => {
                let wide = self.outcome_count > 10;
                let body: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let labels: Vec<String> = r.iter().map(usize::to_string).collect();
                        labels.join(if wide { "," } else { "" })
                    })
                    .collect();
                format!(
                    "det-{side}-{}x{}:{}",
                    self.alice_arity,
                    self.bob_arity,
                    body.join("/")
                )
            }
            Table::Probabilistic(blocks) => {
                let body: Vec<String> = blocks[..blocks.len() - 1]
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .collect();
                format!(
                    "prob-{side}-{}x{}x{}:{}",
                    self.alice_arity,
                    self.bob_arity,
                    self.outcome_count,
                    body.join("|")
                )
            }
        }
    }

    /// Renders the function in the function-file format.
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind() {
            Kind::Deterministic => "deterministic",
            Kind::Probabilistic => "probabilistic",
        };
        let side = match self.sidedness {
            Sidedness::One => "one",
            Sidedness::Two => "two",
        };
        out.push_str(&format!("type: {kind}\nsided: {side}\n"));
        out.push_str(&format!("inputs: {} {}\noutcomes: {}\n", self.alice_arity, self.bob_arity, self.outcome_count));
        match &self.table {
            Table::Deterministic(rows) => {
                for r in rows {
                    let labels: Vec<String> = r.iter().map(usize::to_string).collect();
                    out.push_str(&labels.join(" "));
                    out.push('\n');
                }
            }
            Table::Probabilistic(blocks) => {
                for (k, b) in blocks.iter().enumerate() {
                    out.push_str(&format!("k: {k}\n"));
                    for r in b {
                        let ps: Vec<String> = r.iter().map(|p| p.to_string()).collect();
                        out.push_str(&ps.join(" "));
                        out.push('\n');
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.identifier())
    }
}

fn transpose<T: Clone>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    let ncols = rows.first().map_or(0, Vec::len);
    (0..ncols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect()
}

fn has_repeat(xs: &[usize]) -> bool {
    xs.iter().enumerate().any(|(n, x)| xs[n + 1..].contains(x))
}

pub(crate) fn conditions_of(rows: &[Vec<usize>]) -> Conditions {
    let cols = transpose(rows);
    let potentially_concealing = rows.iter().all(|r| has_repeat(r)) && cols.iter().all(|c| has_repeat(c));
    let distinct = |lines: &[Vec<usize>]| {
        lines
            .iter()
            .enumerate()
            .all(|(n, a)| lines[n + 1..].iter().all(|b| a != b))
    };
    Conditions {
        potentially_concealing,
        non_degenerate: distinct(rows) && distinct(&cols),
    }
}

/// Probability distribution over one party's classical inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    weights: Vec<f64>,
}

impl Prior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("prior must have at least one weight"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("prior weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol().trace {
            return Err(Error::invalid(format!("prior weights sum to {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("prior must have at least one weight"));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `(q0, 1 - q0)`
    pub fn binary(q0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q0) {
            return Err(Error::invalid(format!("q0 = {q0} is outside [0, 1]")));
        }
        Self::new(vec![q0, 1.0 - q0])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Index of the largest weight, ties to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (n, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = n;
            }
        }
        best
    }
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num_bigint::BigInt::from(num), num_bigint::BigInt::from(den))
}
