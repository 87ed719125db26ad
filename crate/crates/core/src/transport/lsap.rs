//! Dense linear sum assignment by shortest augmenting paths.
//!
//! Rows are inserted one at a time; each insertion runs a Dijkstra-like search
//! over reduced costs `c(i,j) - u(i) - v(j)` for the cheapest augmenting path
//! to a free column, then updates the duals. Complementary slackness holds
//! after every insertion, so the final matching is optimal. Worst case
//! `O(n^3)`.

use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

/// Solves `min sum_i cost[i][col(i)]` over permutations for a square,
/// row-major cost matrix with finite entries. Returns `col` (row -> column).
pub(crate) fn solve_square<T: Scalar>(n: usize, cost: &[T]) -> Vec<usize> {
    debug_assert_eq!(cost.len(), n * n);
    let mut u = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    let mut col4row = vec![NONE; n];
    let mut row4col = vec![NONE; n];

    let mut shortest = vec![T::infinity(); n];
    let mut path = vec![NONE; n];
    let mut row_seen = vec![false; n];
    let mut col_seen = vec![false; n];
    let mut remaining: Vec<usize> = Vec::with_capacity(n);
    let mut visited_rows: Vec<usize> = Vec::with_capacity(n);

    for cur_row in 0..n {
        shortest.fill(T::infinity());
        row_seen.fill(false);
        col_seen.fill(false);
        remaining.clear();
        // reverse order so that a constant cost matrix yields the identity
        remaining.extend((0..n).rev());
        visited_rows.clear();

        let mut i = cur_row;
        let mut min_val = T::zero();
        let sink = loop {
            row_seen[i] = true;
            visited_rows.push(i);
            let row = &cost[i * n..(i + 1) * n];
            let ui = u[i];
            let mut lowest = T::infinity();
            let mut index = NONE;
            for (it, &j) in remaining.iter().enumerate() {
                let r = min_val + row[j] - ui - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                // prefer free columns on ties so paths stay short
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            let j = remaining.swap_remove(index);
            col_seen[j] = true;
            if row4col[j] == NONE {
                break j;
            }
            i = row4col[j];
        };

        u[cur_row] += min_val;
        for &r in &visited_rows {
            if r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for j in 0..n {
            if col_seen[j] {
                v[j] -= min_val - shortest[j];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            std::mem::swap(&mut col4row[r], &mut j);
            if r == cur_row {
                break;
            }
        }
    }
    col4row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matrix_gives_identity() {
        let n = 5;
        let cost = vec![1.0f64; n * n];
        assert_eq!(solve_square(n, &cost), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn small_known_instance() {
        // optimum is (0,1), (1,0), (2,2): 1 + 2 + 2
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let col = solve_square(3, &cost);
        let total: f64 = col.iter().enumerate().map(|(i, &j)| cost[i * 3 + j]).sum();
        assert_eq!(total, 5.0);
    }
}
