//! Matrix helpers shared by the odometer, realization and cohomology code.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type IntMatrix = DMatrix<i64>;

/// Parses `"1 0.5; 0 1"`: rows separated by `;`, entries by whitespace.
///
/// Entries are decimal strings parsed with correct rounding.
pub fn parse_matrix(s: &str) -> Result<RealMatrix> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Invalid(format!("bad matrix entry {t:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    from_rows(&rows)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix must be square and non-empty".into()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("matrix entries must be finite".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn int_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn int_from_rows(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix must be square and non-empty".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// The matrix as integers, if every entry is an integer.
pub fn to_integer(m: &RealMatrix) -> Option<IntMatrix> {
    if m.iter().all(|x| x.fract() == 0.0 && x.abs() < 9.0e15) {
        Some(m.map(|x| x as i64))
    } else {
        None
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn int_det(m: &IntMatrix) -> i128 {
    let n = m.nrows();
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
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

/// Inverse of an integer matrix with determinant ±1 (adjugate formula).
pub fn int_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let det = int_det(m);
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let n = m.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = if n == 1 { 1 } else { int_det(&m.clone().remove_row(j).remove_column(i)) };
            let cof = if (i + j) % 2 == 0 { minor } else { -minor };
            inv[(i, j)] = (cof * det) as i64;
        }
    }
    Ok(inv)
}

/// Largest absolute entry.
pub fn max_abs(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_entry_distance(a: &RealMatrix, b: &RealMatrix) -> f64 {
    max_abs(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rows() {
        let m = parse_matrix("1 0.5; 0 1").unwrap();
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(m[(1, 0)], 0.0);
        assert!(parse_matrix("1 2; 3").is_err());
        assert!(parse_matrix("1 x; 0 1").is_err());
    }

    #[test]
    fn determinants() {
        let a = int_from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(int_det(&a), 1);
        let r = int_from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        assert_eq!(int_det(&r), 1);
        let s = int_from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(int_det(&s), -1);
        let b = int_from_rows(&[vec![2, 3, 1], vec![4, 1, 0], vec![5, 2, 7]]).unwrap();
        // cofactor expansion by hand: 2(7-0) - 3(28-0) + 1(8-5) = -67
        assert_eq!(int_det(&b), -67);
    }

    #[test]
    fn inverse_of_unimodular() {
        let a = int_from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let inv = int_inverse(&a).unwrap();
        assert_eq!(&a * &inv, IntMatrix::identity(2, 2));
        assert!(int_inverse(&int_from_rows(&[vec![2, 0], vec![0, 1]]).unwrap()).is_err());
    }
}
