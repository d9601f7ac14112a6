//! Reader for the line-oriented function-file format.
//!
//! ```text
//! # oblivious transfer, Bob receives the outcome
//! type: probabilistic
//! sided: one
//! inputs: 2 1
//! outcomes: 3
//! k: 0
//! 1/2 0
//! k: 1
//! 0 1/2
//! ```
//!
//! Deterministic bodies are `bob_arity` rows of `alice_arity` labels.
//! Probabilistic bodies hold one `k: <label>` block per outcome; the last
//! block may be left out and is then the complement of the others.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FunctionSpec, Kind, Sidedness};
use crate::error::{Error, Result};

struct Line<'a> {
    number: usize,
    text: &'a str,
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(n, raw)| {
            let stripped = raw.split('#').next().unwrap_or("").trim();
            (!stripped.is_empty()).then_some(Line {
                number: n + 1,
                text: stripped,
            })
        })
        .collect()
}

fn header<'a>(lines: &[Line<'a>], pos: usize, key: &str, last_line: usize) -> Result<(usize, &'a str)> {
    let line = lines
        .get(pos)
        .ok_or_else(|| Error::parse(last_line, format!("missing `{key}:` header")))?;
    let (k, v) = line
        .text
        .split_once(':')
        .ok_or_else(|| Error::parse(line.number, format!("expected `{key}: ...`")))?;
    if k.trim() != key {
        return Err(Error::parse(line.number, format!("expected `{key}:` header, found `{}`", k.trim())));
    }
    Ok((line.number, v.trim()))
}

fn positive(line: usize, token: &str, what: &str) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::parse(line, format!("{what} must be a positive integer, got `{token}`"))),
    }
}

/// Exact rational from `num/den`, an integer, or a decimal literal.
pub(crate) fn parse_rational(token: &str) -> Option<BigRational> {
    if let Some((num, den)) = token.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|ch| ch.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(num, den);
    Some(if negative { -value } else { value })
}

pub fn parse_function_file(text: &str) -> Result<FunctionSpec> {
    let lines = content_lines(text);
    let last_line = text.lines().count().max(1);

    let (type_line, kind) = header(&lines, 0, "type", last_line)?;
    let kind = match kind {
        "deterministic" => Kind::Deterministic,
        "probabilistic" => Kind::Probabilistic,
        other => {
            return Err(Error::parse(
                type_line,
                format!("type must be `deterministic` or `probabilistic`, got `{other}`"),
            ))
        }
    };
    let (sided_line, sided) = header(&lines, 1, "sided", last_line)?;
    let sidedness = match sided {
        "one" => Sidedness::One,
        "two" => Sidedness::Two,
        other => return Err(Error::parse(sided_line, format!("sided must be `one` or `two`, got `{other}`"))),
    };
    let (inputs_line, inputs) = header(&lines, 2, "inputs", last_line)?;
    let arities: Vec<&str> = inputs.split_whitespace().collect();
    if arities.len() != 2 {
        return Err(Error::parse(inputs_line, "expected `inputs: <alice_arity> <bob_arity>`"));
    }
    let alice_arity = positive(inputs_line, arities[0], "alice arity")?;
    let bob_arity = positive(inputs_line, arities[1], "bob arity")?;
    let (outcomes_line, outcomes) = header(&lines, 3, "outcomes", last_line)?;
    let outcome_count = positive(outcomes_line, outcomes, "outcome count")?;

    let body = &lines[4..];
    match kind {
        Kind::Deterministic => {
            parse_deterministic(body, sidedness, alice_arity, bob_arity, outcome_count, last_line)
        }
        Kind::Probabilistic => {
            parse_probabilistic(body, sidedness, alice_arity, bob_arity, outcome_count, last_line)
        }
    }
}

fn parse_deterministic(
    body: &[Line<'_>],
    sidedness: Sidedness,
    alice_arity: usize,
    bob_arity: usize,
    outcome_count: usize,
    last_line: usize,
) -> Result<FunctionSpec> {
    let mut rows = Vec::with_capacity(bob_arity);
    for line in body {
        if rows.len() == bob_arity {
            return Err(Error::parse(line.number, format!("expected {bob_arity} rows, found extra content")));
        }
        let tokens: Vec<&str> = line.text.split_whitespace().collect();
        if tokens.len() != alice_arity {
            return Err(Error::parse(
                line.number,
                format!("row has {} entries, expected {alice_arity}", tokens.len()),
            ));
        }
        let mut row = Vec::with_capacity(alice_arity);
        for tok in tokens {
            let label: usize = tok
                .parse()
                .map_err(|_| Error::parse(line.number, format!("`{tok}` is not an outcome label")))?;
            if label >= outcome_count {
                return Err(Error::parse(
                    line.number,
                    format!("outcome label {label} out of range (outcomes: {outcome_count})"),
                ));
            }
            row.push(label);
        }
        rows.push(row);
    }
    if rows.len() != bob_arity {
        return Err(Error::parse(last_line, format!("expected {bob_arity} rows, found {}", rows.len())));
    }
    FunctionSpec::deterministic(sidedness, outcome_count, rows)
}

fn parse_probabilistic(
    body: &[Line<'_>],
    sidedness: Sidedness,
    alice_arity: usize,
    bob_arity: usize,
    outcome_count: usize,
    last_line: usize,
) -> Result<FunctionSpec> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut blocks: Vec<Vec<Vec<BigRational>>> = Vec::new();
    // line number of each row of the most recent block
    let mut row_lines: Vec<usize> = Vec::new();
    let mut in_block = false;

    for line in body {
        if let Some(rest) = line.text.strip_prefix("k:") {
            if in_block && blocks.last().is_some_and(|b| b.len() != bob_arity) {
                return Err(Error::parse(line.number, format!("previous block has fewer than {bob_arity} rows")));
            }
            let label: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(line.number, format!("`{}` is not an outcome label", rest.trim())))?;
            if label >= outcome_count {
                return Err(Error::parse(
                    line.number,
                    format!("outcome label {label} out of range (outcomes: {outcome_count})"),
                ));
            }
            if label != blocks.len() {
                return Err(Error::parse(
                    line.number,
                    format!("expected block `k: {}`, found `k: {label}`", blocks.len()),
                ));
            }
            blocks.push(Vec::with_capacity(bob_arity));
            row_lines.clear();
            in_block = true;
            continue;
        }
        let block = match blocks.last_mut() {
            Some(b) if in_block => b,
            _ => return Err(Error::parse(line.number, "probability rows must follow a `k: <label>` line")),
        };
        if block.len() == bob_arity {
            return Err(Error::parse(line.number, format!("block has more than {bob_arity} rows")));
        }
        let tokens: Vec<&str> = line.text.split_whitespace().collect();
        if tokens.len() != alice_arity {
            return Err(Error::parse(
                line.number,
                format!("row has {} entries, expected {alice_arity}", tokens.len()),
            ));
        }
        let mut row = Vec::with_capacity(alice_arity);
        for tok in tokens {
            let p = parse_rational(tok)
                .ok_or_else(|| Error::parse(line.number, format!("`{tok}` is not a rational or decimal")))?;
            if p < zero || p > one {
                return Err(Error::parse(line.number, format!("probability {tok} outside [0, 1]")));
            }
            row.push(p);
        }
        block.push(row);
        row_lines.push(line.number);
    }

    if blocks.last().is_some_and(|b| b.len() != bob_arity) {
        return Err(Error::parse(last_line, format!("final block has fewer than {bob_arity} rows")));
    }
    let given = blocks.len();
    if given + 1 < outcome_count || given == 0 {
        return Err(Error::parse(
            last_line,
            format!("found {given} outcome blocks, expected {outcome_count} (or {} with the last inferred)", outcome_count - 1),
        ));
    }

    let last_row_line = |j: usize| row_lines.get(j).copied().unwrap_or(last_line);
    for j in 0..bob_arity {
        for i in 0..alice_arity {
            let total: BigRational = blocks.iter().map(|b| &b[j][i]).sum();
            if given == outcome_count {
                if total != one {
                    return Err(Error::parse(
                        last_row_line(j),
                        format!("probabilities for (i={i}, j={j}) sum to {total}, not 1"),
                    ));
                }
            } else if total > one {
                return Err(Error::parse(
                    last_row_line(j),
                    format!("probabilities for (i={i}, j={j}) already sum to {total} > 1"),
                ));
            }
        }
    }
    if given + 1 == outcome_count {
        let complement = (0..bob_arity)
            .map(|j| {
                (0..alice_arity)
                    .map(|i| &one - blocks.iter().map(|b| &b[j][i]).sum::<BigRational>())
                    .collect()
            })
            .collect();
        blocks.push(complement);
    }
    FunctionSpec::probabilistic(sidedness, blocks)
}
