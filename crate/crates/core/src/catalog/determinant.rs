use std::sync::Arc;

use num_complex::Complex64;

use crate::automorphism::AutomorphismFamily;
use crate::domain::{Domain, PointKind};
use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::operator::HausdorffOperator;
use crate::point::Point;

/// Largest parameter set the determinant operator will enumerate (`8!`).
pub const NODE_BUDGET: usize = 40_320;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// `+1` for even permutations, `-1` for odd ones.
pub fn sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for start in 0..p.len() {
        let mut j = start;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn factorial_capped(n: usize) -> usize {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX)
}

/// `S_n` with counting measure, `Φ = sgn`, column permutations of `n × n`
/// matrices. Applied to the diagonal product `Π m_ii` it yields `det M`.
pub fn determinant_operator(n: usize) -> Result<HausdorffOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be at least 1".into()));
    }
    let needed = factorial_capped(n);
    if needed > NODE_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: NODE_BUDGET });
    }
    let omega = MeasureSpace::counting(permutations(n).into_iter().map(Point::Perm).collect())?;
    HausdorffOperator::new(
        format!("determinant({n})"),
        omega,
        |s| Complex64::new(s.as_perm().map_or(f64::NAN, |p| f64::from(sign(p))), 0.0),
        AutomorphismFamily::column_permutation(),
        Arc::new(Domain::bare(PointKind::SquareMatrix(n))),
    )
}

/// `f_0(M) = Π m_ii`.
pub fn diagonal_product(m: &Point) -> Complex64 {
    match m.as_matrix() {
        Ok((n, data)) => Complex64::new((0..n).map(|i| data[i * n + i]).product(), 0.0),
        Err(_) => Complex64::new(f64::NAN, 0.0),
    }
}

pub fn matrix_point(rows: &[Vec<i64>]) -> Point {
    let n = rows.len();
    Point::Matrix { n, data: rows.iter().flat_map(|r| r.iter().map(|&v| v as f64)).collect() }
}

/// The operator's node sum `Σ_σ Φ(σ) f_0(A(σ) M)` carried out in `i128`.
/// Entries must be below `2^53` in magnitude so that they pass through the
/// family's `f64` matrices unchanged.
pub fn determinant_exact(op: &HausdorffOperator, rows: &[Vec<i64>]) -> Result<i128> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    if rows.iter().flatten().any(|v| v.unsigned_abs() >= 1 << 53) {
        return Err(Error::InvalidParameter("entries exceed the exact integer range".into()));
    }
    let m = matrix_point(rows);
    let overflow = || Error::InvalidParameter("determinant overflows i128".into());
    let mut total: i128 = 0;
    for (u, w) in op.omega().nodes().iter().zip(op.omega().weights()) {
        let s = op.phi(u).re * w;
        let image = op.family().apply(u, &m);
        let (k, data) = image.as_matrix()?;
        if k != n {
            return Err(Error::InvalidParameter(format!("operator order {k} does not match matrix order {n}")));
        }
        let mut prod: i128 = s as i128;
        for i in 0..n {
            prod = prod.checked_mul(data[i * n + i] as i128).ok_or_else(overflow)?;
        }
        total = total.checked_add(prod).ok_or_else(overflow)?;
    }
    Ok(total)
}
