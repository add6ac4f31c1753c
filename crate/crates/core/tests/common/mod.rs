//! Brute-force oracles and generators shared by the property and acceptance
//! suites. Everything here is computed from first principles, independently
//! of the library's dynamic-programming implementations.

#![allow(dead_code)]

use motifminer_core::schema::{ParameterSchema, Series, Stage, Value};
use motifminer_core::{point_distance, LcssParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Mixed-kind schema used by the randomized equivalence checks: one
/// unordered, one ordered and one quantitative parameter.
pub fn hetero_schema() -> Vec<ParameterSchema> {
    vec![
        ParameterSchema::unordered("m", 4),
        ParameterSchema::ordered("p", 3),
        ParameterSchema::quantitative("x", 0.0, 1.0),
    ]
}

pub fn random_hetero_series(rng: &mut ChaCha8Rng, len: usize) -> Series {
    let schema = hetero_schema();
    let rows = (0..len)
        .map(|_| {
            vec![
                Value::Code(rng.random_range(1..=4)),
                Value::Code(rng.random_range(1..=3)),
                Value::Real((rng.random::<f64>() * 100.0).round() / 100.0),
            ]
        })
        .collect();
    Series::new(
        schema,
        (0..len).map(|i| i as f64 * 60.0).collect(),
        rows,
        Stage::Normalized,
    )
}

fn pair_matches(a: &Series, b: &Series, i: usize, j: usize, p: &LcssParams) -> bool {
    let value_ok = a
        .row(i)
        .iter()
        .zip(b.row(j))
        .zip(a.schema.iter().zip(&p.epsilon))
        .all(|((x, y), (s, &e))| point_distance(*x, *y, s) < e);
    if !value_ok {
        return false;
    }
    let (n1, m1) = (i as isize + 1, j as isize + 1);
    let (big_n, big_m) = (a.len() as isize, b.len() as isize);
    (n1 - m1).unsigned_abs() <= p.delta
        && (!p.end_anchored || (big_n - n1 - big_m + m1).unsigned_abs() <= p.delta)
}

/// LCSS by exhaustive enumeration: the longest chain of strictly increasing
/// index pairs whose every pair satisfies the value and window constraints.
pub fn lcss_chain_oracle(a: &Series, b: &Series, p: &LcssParams) -> usize {
    fn best(
        a: &Series,
        b: &Series,
        p: &LcssParams,
        i: usize,
        j: usize,
        memo: &mut Vec<Vec<Option<usize>>>,
    ) -> usize {
        if i >= a.len() || j >= b.len() {
            return 0;
        }
        if let Some(v) = memo[i][j] {
            return v;
        }
        let mut out = 0;
        for i2 in i..a.len() {
            for j2 in j..b.len() {
                if pair_matches(a, b, i2, j2, p) {
                    out = out.max(1 + best(a, b, p, i2 + 1, j2 + 1, memo));
                }
            }
        }
        memo[i][j] = Some(out);
        out
    }
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    best(a, b, p, 0, 0, &mut memo)
}

/// LCSS by the literal recurrence over sequence heads, memoized: 0 on empty,
/// 1 + recurse on both heads when the tails match inside the window,
/// otherwise the max over dropping either tail.
pub fn lcss_memo_oracle(a: &Series, b: &Series, p: &LcssParams) -> usize {
    fn rec(
        a: &Series,
        b: &Series,
        p: &LcssParams,
        n: usize,
        m: usize,
        memo: &mut Vec<Vec<Option<usize>>>,
    ) -> usize {
        if n == 0 || m == 0 {
            return 0;
        }
        if let Some(v) = memo[n][m] {
            return v;
        }
        let out = if pair_matches(a, b, n - 1, m - 1, p) {
            1 + rec(a, b, p, n - 1, m - 1, memo)
        } else {
            rec(a, b, p, n - 1, m, memo).max(rec(a, b, p, n, m - 1, memo))
        };
        memo[n][m] = Some(out);
        out
    }
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    rec(a, b, p, a.len(), b.len(), &mut memo)
}

/// DTW by full enumeration of the monotone warping paths, no memoization:
/// the root of the minimal sum of squared step costs.
pub fn dtw_path_oracle(a: &Series, b: &Series) -> f64 {
    fn step_cost(a: &Series, b: &Series, i: usize, j: usize) -> f64 {
        let c: f64 = a
            .row(i)
            .iter()
            .zip(b.row(j))
            .zip(&a.schema)
            .map(|((x, y), s)| point_distance(*x, *y, s))
            .sum();
        c * c
    }
    fn rec(a: &Series, b: &Series, i: usize, j: usize) -> f64 {
        let c = step_cost(a, b, i, j);
        if i + 1 == a.len() && j + 1 == b.len() {
            return c;
        }
        let mut best = f64::INFINITY;
        if i + 1 < a.len() {
            best = best.min(rec(a, b, i + 1, j));
        }
        if j + 1 < b.len() {
            best = best.min(rec(a, b, i, j + 1));
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            best = best.min(rec(a, b, i + 1, j + 1));
        }
        c + best
    }
    rec(a, b, 0, 0).sqrt()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact per-iteration collision probability for two windows differing in
/// the given `(symbol, parameter)` cells, by enumerating every mask choice:
/// the windows collide iff every differing cell is hidden by the mask.
pub fn collision_probability_oracle(
    w: usize,
    p: usize,
    w_mask: usize,
    p_mask: usize,
    differing: &[(usize, usize)],
) -> f64 {
    let symbol_masks = combinations(w, w_mask);
    let param_masks = combinations(p, p_mask);
    let mut hit = 0usize;
    let mut total = 0usize;
    for sym_mask in &symbol_masks {
        // Cartesian product of the per-unmasked-symbol parameter masks.
        let unmasked: Vec<usize> = (0..w).filter(|s| !sym_mask.contains(s)).collect();
        let mut choice = vec![0usize; unmasked.len()];
        loop {
            total += 1;
            let all_hidden = differing.iter().all(|&(s, k)| {
                if sym_mask.contains(&s) {
                    return true;
                }
                let slot = unmasked.iter().position(|&u| u == s).unwrap();
                param_masks[choice[slot]].contains(&k)
            });
            if all_hidden {
                hit += 1;
            }
            // Next choice vector.
            let mut carry = true;
            for c in choice.iter_mut() {
                if carry {
                    *c += 1;
                    if *c == param_masks.len() {
                        *c = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
    }
    hit as f64 / total as f64
}
