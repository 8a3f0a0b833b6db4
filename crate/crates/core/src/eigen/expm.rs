//! Matrix exponential by scaling and squaring with a diagonal Padé approximant.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const PADE_DEGREE: usize = 6;
const SCALE_TARGET: f64 = 0.5;

fn pade_coefficients() -> [f64; PADE_DEGREE + 1] {
    let q = PADE_DEGREE;
    let mut c = [0.0; PADE_DEGREE + 1];
    c[0] = 1.0;
    for k in 1..=q {
        c[k] = c[k - 1] * (q + 1 - k) as f64 / (k * (2 * q + 1 - k)) as f64;
    }
    c
}

pub fn matrix_exp(k: &Matrix) -> Result<Matrix> {
    let n = k.square_dim()?;
    let norm = k.norm_one();
    if !norm.is_finite() {
        return Err(Error::Overflow(norm));
    }
    let mut squarings = 0u32;
    if norm > SCALE_TARGET {
        squarings = (norm / SCALE_TARGET).log2().ceil() as u32;
    }
    if squarings > 1000 {
        return Err(Error::Overflow(norm));
    }
    let x = k.scale_real(0.5f64.powi(squarings as i32));
    let c = pade_coefficients();
    let mut num = Matrix::identity(n).scale_real(c[0]);
    let mut den = num.clone();
    let mut power = Matrix::identity(n);
    for (j, &cj) in c.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale_real(cj);
        num = &num + &term;
        den = if j % 2 == 0 {
            &den + &term
        } else {
            &den - &term
        };
    }
    let mut e = den.solve(&num)?;
    for _ in 0..squarings {
        e = &e * &e;
        if !e.is_finite() {
            return Err(Error::Overflow(norm));
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, C64};

    #[test]
    fn zero_and_diagonal() {
        assert_eq!(
            matrix_exp(&Matrix::zeros(3, 3)).unwrap(),
            Matrix::identity(3)
        );
        let d = [c64(1.0, 0.0), c64(-2.0, 0.5), c64(0.0, 3.0)];
        let e = matrix_exp(&Matrix::from_diag(&d)).unwrap();
        let expected = Matrix::from_diag(&d.iter().map(|z| z.exp()).collect::<Vec<C64>>());
        assert!(e.dist(&expected) < 1e-13);
    }

    #[test]
    fn nilpotent_and_inverse() {
        let n = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = matrix_exp(&n).unwrap();
        assert!(e.dist(&Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]])) < 1e-15);
        let k = Matrix::from_fn(4, 4, |i, j| {
            c64((i as f64 - j as f64) * 0.7, (i * j) as f64 * 0.3)
        });
        let p = &matrix_exp(&k).unwrap() * &matrix_exp(&-&k).unwrap();
        assert!(p.dist(&Matrix::identity(4)) < 1e-11);
    }

    #[test]
    fn overflow_is_reported() {
        let k = Matrix::from_diag(&[c64(1e6, 0.0)]);
        assert!(matches!(matrix_exp(&k), Err(Error::Overflow(_))));
    }
}
