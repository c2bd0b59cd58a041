//! Enumeration of subsets closed under a family of Horn implications.

use crate::{Error, Result};

/// Every subset `S` of `0..n` such that `i ∈ S` implies `implies[i] ⊆ S`.
///
/// Propagation keeps each partial assignment closed in both directions, so
/// the search never backtracks out of a dead end and runs in time linear in
/// the number of results.
pub(crate) fn closed_subsets(
    n: usize,
    implies: &[Vec<usize>],
    cap: u64,
    what: &str,
) -> Result<Vec<Vec<bool>>> {
    debug_assert_eq!(implies.len(), n);
    let mut implied_by = vec![Vec::new(); n];
    for (i, targets) in implies.iter().enumerate() {
        for &j in targets {
            implied_by[j].push(i);
        }
    }
    let mut out = Vec::new();
    let mut state = vec![None; n];
    search(0, &mut state, implies, &implied_by, &mut out, cap, what)?;
    Ok(out)
}

fn search(
    next: usize,
    state: &mut Vec<Option<bool>>,
    implies: &[Vec<usize>],
    implied_by: &[Vec<usize>],
    out: &mut Vec<Vec<bool>>,
    cap: u64,
    what: &str,
) -> Result<()> {
    let Some(i) = (next..state.len()).find(|&i| state[i].is_none()) else {
        if out.len() as u64 >= cap {
            return Err(Error::size_limit(what, format!(">{cap}"), cap));
        }
        out.push(state.iter().map(|v| v.unwrap_or(false)).collect());
        return Ok(());
    };
    for value in [false, true] {
        let saved = state.clone();
        let edges = if value { implies } else { implied_by };
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            if state[k].is_some() {
                continue;
            }
            state[k] = Some(value);
            stack.extend(edges[k].iter().copied().filter(|&j| state[j].is_none()));
        }
        search(i + 1, state, implies, implied_by, out, cap, what)?;
        *state = saved;
    }
    Ok(())
}
