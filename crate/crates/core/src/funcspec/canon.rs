//! Canonical form of valid 3x3 deterministic functions and the exhaustive
//! list of their equivalence classes.
//!
//! The canonical layout has column `i = 0` reading `(0, 0, 1)` down the rows
//! and column `i = 1` reading `(a, b, b)` with `a != b` and
//! `a == 0 || b == 0 || b == 1`. Among all row/column permutations and
//! outcome relabelings that reach this layout, the one with the
//! lexicographically smallest row-major table is chosen.

use std::collections::BTreeSet;

use super::{conditions_of, FunctionSpec, Sidedness};
use crate::error::{Error, Result};

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm3x3 {
    pub base: FunctionSpec,
    pub a: usize,
    pub b: usize,
    /// `base` row `r` is row `row_perm[r]` of the original.
    pub row_perm: [usize; 3],
    /// `base` column `c` is column `col_perm[c]` of the original.
    pub col_perm: [usize; 3],
    /// Original label to canonical label; `None` for labels the table never uses.
    pub outcome_relabel: Vec<Option<usize>>,
}

impl CanonicalForm3x3 {
    /// Rebuilds the original outcome matrix from `base` and the recorded transforms.
    pub fn invert(&self) -> Vec<Vec<usize>> {
        let base = self.base.outcome_rows().expect("canonical base is deterministic");
        let mut inverse_label = vec![usize::MAX; self.base.outcome_count()];
        for (orig, new) in self.outcome_relabel.iter().enumerate() {
            if let Some(new) = new {
                inverse_label[*new] = orig;
            }
        }
        let mut rows = vec![vec![0; 3]; 3];
        for r in 0..3 {
            for cc in 0..3 {
                rows[self.row_perm[r]][self.col_perm[cc]] = inverse_label[base[r][cc]];
            }
        }
        rows
    }
}

/// Relabels `t` so that column 0 reads `(0, 0, 1)` and the remaining labels
/// follow first appearance in row-major order. `None` if column 0 does not
/// have the `(x, x, y)` pattern.
fn relabel_for_layout(t: &[[usize; 3]; 3], max_label: usize) -> Option<([[usize; 3]; 3], Vec<Option<usize>>)> {
    let (x, y) = (t[0][0], t[2][0]);
    if t[1][0] != x || x == y {
        return None;
    }
    let mut map = vec![None; max_label + 1];
    map[x] = Some(0);
    map[y] = Some(1);
    let mut next = 2;
    let mut out = [[0; 3]; 3];
    for r in 0..3 {
        for cc in 0..3 {
            let label = t[r][cc];
            let new = *map[label].get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            out[r][cc] = new;
        }
    }
    Some((out, map))
}

fn layout_ok(t: &[[usize; 3]; 3]) -> Option<(usize, usize)> {
    let (a, b) = (t[0][1], t[1][1]);
    let shape = t[0][0] == 0 && t[1][0] == 0 && t[2][0] == 1 && t[2][1] == b;
    (shape && a != b && (a == 0 || b == 0 || b == 1)).then_some((a, b))
}

pub fn canonicalize_3x3(f: &FunctionSpec) -> Result<CanonicalForm3x3> {
    let rows = f
        .outcome_rows()
        .ok_or_else(|| Error::invalid("canonical form is defined for deterministic functions only"))?;
    if f.alice_arity() != 3 || f.bob_arity() != 3 {
        return Err(Error::invalid(format!(
            "canonical form needs a 3x3 table, got {}x{}",
            f.alice_arity(),
            f.bob_arity()
        )));
    }
    if !conditions_of(rows).both() {
        return Err(Error::invalid("function is not potentially concealing and non-degenerate"));
    }
    let max_label = rows.iter().flatten().copied().max().unwrap_or(0);

    let mut best: Option<([[usize; 3]; 3], CanonicalForm3x3Parts)> = None;
    for rp in PERMS3 {
        for cp in PERMS3 {
            let mut t = [[0; 3]; 3];
            for r in 0..3 {
                for cc in 0..3 {
                    t[r][cc] = rows[rp[r]][cp[cc]];
                }
            }
            let Some((relabeled, map)) = relabel_for_layout(&t, max_label) else {
                continue;
            };
            let Some((a, b)) = layout_ok(&relabeled) else {
                continue;
            };
            if best.as_ref().is_none_or(|(cur, _)| relabeled < *cur) {
                best = Some((relabeled, (a, b, rp, cp, map)));
            }
        }
    }
    let (table, (a, b, row_perm, col_perm, outcome_relabel)) = best.ok_or_else(|| {
        Error::invalid(format!("no relabeling of {} reaches the canonical layout", f.identifier()))
    })?;
    let outcome_count = table.iter().flatten().copied().max().unwrap_or(0) + 1;
    let base = FunctionSpec::deterministic(
        Sidedness::Two,
        outcome_count,
        table.iter().map(|r| r.to_vec()).collect(),
    )?;
    let mut outcome_relabel = outcome_relabel;
    outcome_relabel.resize(f.outcome_count(), None);
    Ok(CanonicalForm3x3 {
        base,
        a,
        b,
        row_perm,
        col_perm,
        outcome_relabel,
    })
}

type CanonicalForm3x3Parts = (usize, usize, [usize; 3], [usize; 3], Vec<Option<usize>>);

/// Restricted growth strings of length `n`: every label is at most one more
/// than the largest label before it. These are exactly the tables with
/// labels in first-appearance order.
fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, next: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for label in 0..=next {
            cur.push(label);
            go(n, cur, next.max(label + 1), out);
            cur.pop();
        }
    }
    go(n, &mut cur, 0, &mut out);
    out
}

/// Every inequivalent potentially-concealing, non-degenerate 3x3 deterministic
/// function, each given by its canonical base table, sorted by that table.
pub fn enumerate_valid_3x3() -> Vec<FunctionSpec> {
    let mut classes = BTreeSet::new();
    for flat in restricted_growth_strings(9) {
        let rows: Vec<Vec<usize>> = flat.chunks(3).map(<[usize]>::to_vec).collect();
        if !conditions_of(&rows).both() {
            continue;
        }
        let outcome_count = flat.iter().max().unwrap() + 1;
        let f = FunctionSpec::deterministic(Sidedness::Two, outcome_count, rows)
            .expect("generated table is well formed");
        let canon = canonicalize_3x3(&f).expect("every valid 3x3 function has a canonical form");
        classes.insert(canon.base.outcome_rows().unwrap().to_vec());
    }
    classes
        .into_iter()
        .map(|rows| {
            let k = rows.iter().flatten().max().unwrap() + 1;
            FunctionSpec::deterministic(Sidedness::Two, k, rows).expect("canonical table is well formed")
        })
        .collect()
}
