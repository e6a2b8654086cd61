//! Spectral radius of a transition matrix.
//!
//! The radius of a nonnegative matrix is the largest radius among its
//! strongly connected classes, and each class is irreducible. On an
//! irreducible class `B = T + I` is primitive, so power iteration converges
//! even for periodic classes such as `[[0,1],[1,0]]`, and the Collatz–Wielandt
//! quotients `min (Bx)_i / x_i <= ρ(B) <= max (Bx)_i / x_i` bracket the answer
//! at every step. Iteration stops once the bracket is narrower than the
//! tolerance; `ρ(T) = ρ(B) - 1`.

use crate::error::{HullError, Result};
use crate::matrix::TransitionMatrix;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const ITERATION_CAP: usize = 1_000_000;

/// Spectral radius (dominant eigenvalue) of `t`, accurate to `tol`.
pub fn entropy(t: &TransitionMatrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(HullError::Input(format!("tolerance must be positive, got {tol}")));
    }
    let adjacency = t.entries();
    let mut best = 0.0f64;
    for class in strongly_connected_classes(&adjacency) {
        let radius = class_radius(&adjacency, &class, tol)?;
        best = best.max(radius);
    }
    Ok(best)
}

fn class_radius(adjacency: &[Vec<u8>], class: &[usize], tol: f64) -> Result<f64> {
    let n = class.len();
    // A lone vertex without a loop carries no cycles.
    if n == 1 && adjacency[class[0]][class[0]] == 0 {
        return Ok(0.0);
    }
    let sub: Vec<Vec<f64>> = class
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            class
                .iter()
                .enumerate()
                .map(|(j, &b)| adjacency[a][b] as f64 + if i == j { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();

    let mut x = vec![1.0; n];
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;
    for _ in 0..ITERATION_CAP {
        let y: Vec<f64> = sub
            .iter()
            .map(|row| row.iter().zip(&x).map(|(m, v)| m * v).sum())
            .collect();
        lower = f64::INFINITY;
        upper = 0.0f64;
        for (yi, xi) in y.iter().zip(&x) {
            let q = yi / xi;
            lower = lower.min(q);
            upper = upper.max(q);
        }
        if upper - lower < tol {
            return Ok((lower + upper) / 2.0 - 1.0);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(HullError::NoConvergence {
        iterations: ITERATION_CAP,
        lower: lower - 1.0,
        upper: upper - 1.0,
    })
}

/// Kosaraju's algorithm; classes come out in a deterministic order.
fn strongly_connected_classes(adjacency: &[Vec<u8>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // iterative post-order DFS
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some((v, next)) = stack.pop() {
            if let Some(w) = (next..n).find(|&w| adjacency[v][w] == 1) {
                stack.push((v, w + 1));
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for &root in order.iter().rev() {
        if component[root] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![root];
        component[root] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            for u in 0..n {
                if adjacency[u][v] == 1 && component[u] == usize::MAX {
                    component[u] = id;
                    members.push(u);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}
