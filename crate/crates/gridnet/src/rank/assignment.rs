//! Exact linear assignment on integer costs.
//!
//! Costs are exact integers so optimal-value ties are exact, which makes the
//! lexicographically-smallest optimal assignment well defined: after solving,
//! every optimal assignment lies in the zero-reduced-cost graph of the
//! optimal dual potentials, and the lexicographic representative is found by
//! fixing rows in order to their smallest feasible column.

const INF: i128 = i128::MAX / 4;

/// Minimum-cost perfect assignment of a square cost matrix.
/// Returns (row -> column, total cost, row potentials, column potentials).
fn jonker_volgenant(cost: &[Vec<i128>]) -> (Vec<usize>, i128, Vec<i128>, Vec<i128>) {
    let n = cost.len();
    // 1-based internal arrays, shortest augmenting path per row
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut match_col = vec![0usize; n + 1]; // column -> row (1-based, 0 = free)

    for i in 1..=n {
        match_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = match_col[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if match_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if match_col[j] > 0 {
            assignment[match_col[j] - 1] = j - 1;
        }
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(r, &c)| cost[r][c])
        .sum();
    // potentials in 0-based form; complementary slackness gives
    // cost[r][c] - u[r] - v[c] >= 0 with equality on optimal edges
    let u0: Vec<i128> = (1..=n).map(|i| u[i]).collect();
    let v0: Vec<i128> = (1..=n).map(|j| v[j]).collect();
    (assignment, total, u0, v0)
}

/// Kuhn matching restricted to `allowed` edges, seeking a perfect matching of
/// rows `rows` onto free columns. `col_used` marks columns already fixed.
fn can_match(
    rows: &[usize],
    allowed: &[Vec<usize>],
    col_used: &[bool],
    n: usize,
) -> bool {
    let mut match_of_col: Vec<Option<usize>> = vec![None; n];
    fn try_row(
        r: usize,
        allowed: &[Vec<usize>],
        col_used: &[bool],
        visited: &mut [bool],
        match_of_col: &mut [Option<usize>],
    ) -> bool {
        for &c in &allowed[r] {
            if col_used[c] || visited[c] {
                continue;
            }
            visited[c] = true;
            match match_of_col[c] {
                None => {
                    match_of_col[c] = Some(r);
                    return true;
                }
                Some(other) => {
                    if try_row(other, allowed, col_used, visited, match_of_col) {
                        match_of_col[c] = Some(r);
                        return true;
                    }
                }
            }
        }
        false
    }
    for &r in rows {
        let mut visited = vec![false; n];
        if !try_row(r, allowed, col_used, &mut visited, &mut match_of_col) {
            return false;
        }
    }
    true
}

/// Minimum-cost assignment; among all optima, the one whose column vector
/// `(assignment[0], assignment[1], ...)` is lexicographically smallest.
pub fn solve_assignment_lexicographic(cost: &[Vec<i128>]) -> (Vec<usize>, i128) {
    let n = cost.len();
    debug_assert!(cost.iter().all(|row| row.len() == n));
    if n == 0 {
        return (Vec::new(), 0);
    }
    let (_, total, u, v) = jonker_volgenant(cost);

    // all optimal assignments use only zero-reduced-cost edges
    let allowed: Vec<Vec<usize>> = (0..n)
        .map(|r| {
            (0..n)
                .filter(|&c| cost[r][c] - u[r] - v[c] == 0)
                .collect()
        })
        .collect();

    let mut fixed = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    for r in 0..n {
        let rest: Vec<usize> = (r + 1..n).collect();
        let mut chosen = None;
        for &c in &allowed[r] {
            if col_used[c] {
                continue;
            }
            col_used[c] = true;
            if can_match(&rest, &allowed, &col_used, n) {
                chosen = Some(c);
                break;
            }
            col_used[c] = false;
        }
        let c = chosen.expect("optimal assignment exists");
        fixed[r] = c;
    }
    debug_assert_eq!(
        fixed.iter().enumerate().map(|(r, &c)| cost[r][c]).sum::<i128>(),
        total
    );
    (fixed, total)
}
