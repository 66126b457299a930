//! Small square matrices of polynomials.

use num_traits::Zero;

use super::{Base, Poly, Rational};
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<Poly>>;

pub fn zeros(base: &Base, rows: usize, cols: usize) -> Matrix {
    vec![vec![Poly::zero(base); cols]; rows]
}

pub fn identity(base: &Base, n: usize) -> Matrix {
    let mut m = zeros(base, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Poly::one(base);
    }
    m
}

pub fn transpose(m: &Matrix, base: &Base, cols: usize) -> Matrix {
    let mut out = zeros(base, cols, m.len());
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = v.clone();
        }
    }
    out
}

pub fn is_symmetric(m: &Matrix) -> bool {
    (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Determinant by expansion over column subsets, `O(2^n n)` polynomial
/// products. Adequate for the ranks used here (n <= 12).
pub fn determinant(m: &Matrix, base: &Base) -> Poly {
    let n = m.len();
    let mut dp: Vec<Poly> = vec![Poly::zero(base); 1 << n];
    dp[0] = Poly::one(base);
    for mask in 0usize..(1 << n) {
        if dp[mask].is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        let cur = dp[mask].clone();
        for col in 0..n {
            if mask & (1 << col) != 0 || m[row][col].is_zero() {
                continue;
            }
            // sign: number of already-used columns to the right of `col`
            let above = (mask >> (col + 1)).count_ones();
            let term = &cur * &m[row][col];
            let next = mask | (1 << col);
            dp[next] = if above % 2 == 0 {
                &dp[next] + &term
            } else {
                &dp[next] - &term
            };
        }
    }
    dp[(1 << n) - 1].clone()
}

fn minor(m: &Matrix, skip_r: usize, skip_c: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_c)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// Inverse over the polynomial ring. Exists exactly when the determinant is
/// a nonzero constant.
pub fn inverse(m: &Matrix, base: &Base) -> Result<Matrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("matrix is not square".into()));
    }
    let det = determinant(m, base);
    let c: Rational = match det.as_constant() {
        Some(c) if !c.is_zero() => c,
        _ => return Err(Error::DegenerateMetric(det.to_string())),
    };
    let inv_det = c.recip();
    let mut out = zeros(base, n, n);
    for i in 0..n {
        for j in 0..n {
            let cof = determinant(&minor(m, j, i), base);
            let signed = if (i + j) % 2 == 0 { cof } else { -cof };
            out[i][j] = signed.scale(&inv_det);
        }
    }
    Ok(out)
}

pub fn mul(a: &Matrix, b: &Matrix, base: &Base, cols: usize) -> Matrix {
    let mut out = zeros(base, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = &out[i][j] + &(v * &b[k][j]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn determinant_and_inverse() {
        let b = Base::standard(1);
        let x = Poly::var(&b, 0).unwrap();
        let one = Poly::one(&b);
        let zero = Poly::zero(&b);
        // unipotent with polynomial entry: det 1, inverse has -x
        let m = vec![
            vec![one.clone(), x.clone(), zero.clone()],
            vec![zero.clone(), one.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), Poly::int(&b, 2)],
        ];
        assert_eq!(determinant(&m, &b), Poly::int(&b, 2));
        let inv = inverse(&m, &b).unwrap();
        assert_eq!(mul(&m, &inv, &b, 3), identity(&b, 3));
        assert_eq!(inv[0][1], -x.clone());
        assert_eq!(inv[2][2], Poly::constant(&b, rat(1) / rat(2)));

        let sing = vec![vec![x.clone(), zero.clone()], vec![zero, one]];
        assert!(matches!(inverse(&sing, &b), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn hyperbolic_determinant() {
        let b = Base::point();
        let one = Poly::one(&b);
        let zero = Poly::zero(&b);
        let m = vec![vec![zero.clone(), one.clone()], vec![one, zero]];
        assert_eq!(determinant(&m, &b), Poly::int(&b, -1));
        assert_eq!(inverse(&m, &b).unwrap(), m);
    }
}
