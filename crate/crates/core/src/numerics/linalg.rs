//! Dense complex LU helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Condition number above which a solve is refused.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Natural log of the determinant, with the imaginary part taken modulo 2π.
pub fn log_det(a: &CMat) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    let lu = a.clone().lu();
    let sign: Complex64 = lu.p().determinant();
    let u = lu.u();
    let mut acc = if sign.re < 0.0 {
        Complex64::new(0.0, std::f64::consts::PI)
    } else {
        Complex64::from(0.0)
    };
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d.norm() == 0.0 {
            return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
        }
        acc += d.ln();
    }
    Ok(acc)
}

pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `A X = B`, refusing numerically singular systems.
///
/// Returns the solution and the 1-norm condition number of `A`.
pub fn solve_checked(a: &CMat, b: &CMat) -> Result<(CMat, f64)> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::NearSingular { condition: f64::INFINITY })?;
    let cond = norm1(a) * norm1(&inv);
    if !(cond < CONDITION_LIMIT) {
        return Err(Error::NearSingular { condition: cond });
    }
    let x = lu.solve(b).ok_or(Error::NearSingular { condition: cond })?;
    Ok((x, cond))
}

/// Normwise backward error `‖A X − B‖ / (‖A‖ ‖X‖ + ‖B‖)` (Frobenius norms).
pub fn relative_residual(a: &CMat, x: &CMat, b: &CMat) -> f64 {
    let scale = a.norm() * x.norm() + b.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (a * x - b).norm() / scale
}

/// Null vector of a (numerically) singular matrix by inverse iteration.
///
/// A second, orthogonalised vector is iterated alongside so that a two
/// dimensional near-null space is detected and reported.
pub fn null_vector(a: &CMat) -> Result<(CVec, f64)> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let shifted = a - CMat::identity(n, n) * Complex64::from(1e-13 * scale / (n as f64).sqrt());
    let lu = shifted.lu();
    let mut x = CVec::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * (i % 7) as f64, 0.05 * (i % 3) as f64));
    let mut y = CVec::from_fn(n, |i, _| Complex64::new(((i * 37 % 11) as f64 - 5.0) / 5.0, 0.3));
    for _ in 0..6 {
        x = lu
            .solve(&x)
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        x /= Complex64::from(x.norm());
        y = lu
            .solve(&y)
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let proj = x.dotc(&y);
        y -= &x * proj;
        let yn = y.norm();
        if yn == 0.0 {
            break;
        }
        y /= Complex64::from(yn);
    }
    let res1 = (a * &x).norm() / scale;
    let res2 = (a * &y).norm() / scale;
    if res2 < 1e-8 {
        return Err(Error::DegenerateRoot {
            energy: Complex64::new(f64::NAN, f64::NAN),
        });
    }
    Ok((x, res1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_det_matches_direct() {
        let a = CMat::from_row_slice(3, 3, &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(3.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(-2.0, 0.3)]);
        let direct = a.determinant();
        let ld = log_det(&a).unwrap().exp();
        assert!((direct - ld).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn solve_and_refuse() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let b = CMat::from_row_slice(2, 1, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let (x, cond) = solve_checked(&a, &b).unwrap();
        assert!(relative_residual(&a, &x, &b) < 1e-15);
        assert!(cond > 1.0 && cond < 10.0);
        let s = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(solve_checked(&s, &b), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let v = CVec::from_vec(vec![c(1.0, 0.2), c(-0.5, 0.0), c(0.3, -1.0)]);
        let u = CVec::from_vec(vec![c(0.2, 0.0), c(1.0, 1.0), c(-1.0, 0.0)]);
        let w = CVec::from_vec(vec![c(0.7, 0.0), c(0.1, -0.4), c(0.0, 2.0)]);
        // rank two: columns spanned by u, w, with v in the null space
        let p = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]);
        let mut a = &u * p.transpose() + &w * CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, -1.0)]).transpose();
        // remove the component along v from the row space
        let av = &a * &v;
        a -= av * v.adjoint() / Complex64::from(v.norm_squared());
        let (x, res) = null_vector(&a).unwrap();
        assert!(res < 1e-12);
        let ratio = x[0] / v[0];
        assert!((x - v * ratio).norm() < 1e-10);
    }

    #[test]
    fn degenerate_null_space_is_reported() {
        let mut a = CMat::zeros(4, 4);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(2.0, 0.0);
        assert!(matches!(null_vector(&a), Err(Error::DegenerateRoot { .. })));
    }
}
