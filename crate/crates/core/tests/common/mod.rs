#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use tightlab::exact::IntMatrix;

/// Laplace expansion along the first row. Exponential, only for small
/// matrices, and independent of the elimination code under test.
pub fn cofactor_det(m: &IntMatrix) -> BigInt {
    let rows = m.to_rows();
    fn go(a: &[Vec<BigInt>]) -> BigInt {
        let n = a.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if a[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = a[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][j] * go(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
    go(&rows)
}

pub fn matrix(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
