//! Minimum hitting-set search shared by the annotated and boundaried oracles.
//!
//! Every constraint is a set of candidate positions; a selection satisfies
//! the constraint if it contains one of them. Sizes are tried in increasing
//! order and, per size, selections are visited lexicographically by
//! candidate position, so the first hit is the lexicographically smallest
//! minimum selection.

pub(crate) struct CoverSearch {
    candidates: usize,
    /// Satisfying candidate positions per constraint, ascending.
    constraints: Vec<Vec<usize>>,
    /// Constraints touched by each candidate.
    by_candidate: Vec<Vec<usize>>,
}

impl CoverSearch {
    pub fn new(candidates: usize, constraints: Vec<Vec<usize>>) -> Self {
        let mut by_candidate = vec![Vec::new(); candidates];
        let constraints: Vec<Vec<usize>> = constraints
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        for (i, c) in constraints.iter().enumerate() {
            for &p in c {
                by_candidate[p].push(i);
            }
        }
        CoverSearch {
            candidates,
            constraints,
            by_candidate,
        }
    }

    /// Positions of a minimum selection with at most `max_size` elements.
    pub fn solve(&self, max_size: Option<usize>) -> Option<Vec<usize>> {
        if self.constraints.iter().any(Vec::is_empty) {
            return None;
        }
        let cap = max_size.unwrap_or(self.candidates).min(self.candidates);
        let mut state = State {
            hits: vec![0; self.constraints.len()],
            unsatisfied: self.constraints.len(),
            chosen: Vec::new(),
        };
        (0..=cap).find_map(|k| {
            if self.dfs(&mut state, 0, k) {
                Some(state.chosen.clone())
            } else {
                None
            }
        })
    }

    fn dfs(&self, st: &mut State, start: usize, remaining: usize) -> bool {
        if st.unsatisfied == 0 {
            return true;
        }
        if remaining == 0 {
            return false;
        }
        // the next pick may not pass the last satisfier of any open constraint
        let mut limit = usize::MAX;
        for (i, c) in self.constraints.iter().enumerate() {
            if st.hits[i] == 0 {
                let last = *c.last().unwrap();
                if last < start {
                    return false;
                }
                limit = limit.min(last);
            }
        }
        for p in start..=limit {
            let gain = self.by_candidate[p].iter().filter(|&&c| st.hits[c] == 0).count();
            if gain == 0 {
                continue;
            }
            st.chosen.push(p);
            for &c in &self.by_candidate[p] {
                if st.hits[c] == 0 {
                    st.unsatisfied -= 1;
                }
                st.hits[c] += 1;
            }
            if self.dfs(st, p + 1, remaining - 1) {
                return true;
            }
            for &c in &self.by_candidate[p] {
                st.hits[c] -= 1;
                if st.hits[c] == 0 {
                    st.unsatisfied += 1;
                }
            }
            st.chosen.pop();
        }
        false
    }
}

struct State {
    hits: Vec<u32>,
    unsatisfied: usize,
    chosen: Vec<usize>,
}
