use serde::Serialize;

use crate::error::{Error, Result};

/// Largest variable count [`sat_brute`] will enumerate.
pub const SAT_VARIABLE_GUARD: usize = 24;

/// CNF formula with DIMACS-style signed literals (`3` is `x3`, `-3` its
/// negation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    pub variable_count: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > variable_count {
                    return Err(Error::Input(format!(
                        "literal {l} outside 1..={variable_count}"
                    )));
                }
            }
        }
        Ok(CnfFormula {
            variable_count,
            clauses,
        })
    }

    /// Occurrences of each variable, counted once per clause.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.variable_count];
        for c in &self.clauses {
            let mut vars: Vec<usize> = c.iter().map(|l| l.unsigned_abs() as usize - 1).collect();
            vars.sort_unstable();
            vars.dedup();
            for v in vars {
                occ[v] += 1;
            }
        }
        occ
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// First satisfying assignment in counting order (variable 1 is the lowest
/// bit), or `None`.
pub fn sat_brute(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    let n = f.variable_count;
    if n > SAT_VARIABLE_GUARD {
        return Err(Error::Resource(format!(
            "{n} variables exceed the enumeration guard of {SAT_VARIABLE_GUARD}"
        )));
    }
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let found = (0..1u32 << n).find(|&a| masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0));
    Ok(found.map(|a| (0..n).map(|i| a >> i & 1 == 1).collect()))
}
