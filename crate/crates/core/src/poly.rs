//! Dense univariate polynomials over Z_p in coefficient form (lowest degree first).

use ark_ff::{Field, One, Zero};

use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Horner evaluation.
pub fn evaluate(coefficients: &[Scalar], x: &Scalar) -> Scalar {
    coefficients.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
}

/// Synthetic division by `(x - r)`: returns `(quotient, remainder)` with
/// `P(x) = Q(x)·(x - r) + remainder` and `remainder = P(r)`. The quotient has
/// one coefficient fewer than `coefficients` (none for a constant).
pub fn divide_by_linear(coefficients: &[Scalar], r: &Scalar) -> (Vec<Scalar>, Scalar) {
    let Some((&lead, rest)) = coefficients.split_last() else {
        return (Vec::new(), Scalar::zero());
    };
    let mut quotient = vec![Scalar::zero(); coefficients.len() - 1];
    let mut carry = lead;
    for (q, c) in quotient.iter_mut().rev().zip(rest.iter().rev()) {
        *q = carry;
        carry = *c + carry * r;
    }
    (quotient, carry)
}

/// `a(x)·b(x)`.
pub fn multiply(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * y;
        }
    }
    out
}

/// Lagrange interpolation of the unique polynomial of degree < `points.len()`.
pub fn interpolate(points: &[(Scalar, Scalar)]) -> Result<Vec<Scalar>> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i].0 == points[j].0 {
                return Err(Error::DuplicatePoint);
            }
        }
    }
    let mut out = vec![Scalar::zero(); n];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // basis_i(x) = Π_{j≠i} (x - x_j) / (x_i - x_j)
        let mut basis = vec![Scalar::one()];
        let mut denom = Scalar::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                basis = multiply(&basis, &[-*xj, Scalar::one()]);
                denom *= *xi - xj;
            }
        }
        let scale = *yi * denom.inverse().expect("distinct points");
        for (o, b) in out.iter_mut().zip(&basis) {
            *o += *b * scale;
        }
    }
    Ok(out)
}

/// Solves `A·X = B` over Z_p by Gauss–Jordan elimination, where `A` is
/// square (`u × u`) and `B` has `u` rows of equal width.
pub fn solve_linear_system(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let u = a.len();
    if b.len() != u || a.iter().any(|row| row.len() != u) {
        return Err(Error::InvalidParams("linear system must be square with matching right-hand side".into()));
    }
    let mut a: Vec<Vec<Scalar>> = a.to_vec();
    let mut b: Vec<Vec<Scalar>> = b.to_vec();
    for col in 0..u {
        let pivot = (col..u).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].inverse().unwrap();
        a[col].iter_mut().for_each(|v| *v *= inv);
        b[col].iter_mut().for_each(|v| *v *= inv);
        for r in 0..u {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col];
                let (pivot_a, pivot_b) = (a[col].clone(), b[col].clone());
                a[r].iter_mut().zip(&pivot_a).for_each(|(v, p)| *v -= factor * p);
                b[r].iter_mut().zip(&pivot_b).for_each(|(v, p)| *v -= factor * p);
            }
        }
    }
    Ok(b)
}
