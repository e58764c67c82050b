//! Row Hermite normal form over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Row-style HNF: the nonzero rows of an upper echelon basis of the row
/// lattice, with positive pivots and entries above each pivot reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        loop {
            let pivot = (top..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(p) = pivot else { break };
            rows.swap(top, p);
            let mut done = true;
            for r in top + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[top][col]);
                let pivot_row = rows[top].clone();
                sub_multiple(&mut rows[r], &pivot_row, &q);
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[top][col].is_zero() {
            continue;
        }
        if rows[top][col].is_negative() {
            for x in rows[top].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = rows[top].clone();
        for row in rows.iter_mut().take(top) {
            let q = row[col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                sub_multiple(row, &pivot_row, &q);
            }
        }
        top += 1;
    }
    rows.truncate(top);
    rows
}

fn sub_multiple(row: &mut [BigInt], by: &[BigInt], q: &BigInt) {
    for (x, y) in row.iter_mut().zip(by) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}
