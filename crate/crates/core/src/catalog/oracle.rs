//! Fraction-free (Bareiss) elimination for integer determinants.

/// Exact determinant of a square integer matrix.
pub fn bareiss_determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(bareiss_determinant(&[vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(bareiss_determinant(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(bareiss_determinant(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]), 24);
        assert_eq!(bareiss_determinant(&[vec![1, 2], vec![2, 4]]), 0);
    }
}
