use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_LEGENDRE_L: usize = 12;

/// Legendre polynomial `P_L(x)` at complex argument via Bonnet's recurrence.
pub fn legendre_p(l: usize, x: Complex64) -> Result<Complex64> {
    if l > MAX_LEGENDRE_L {
        return Err(Error::Unsupported(format!(
            "Legendre order {l} exceeds the supported maximum {MAX_LEGENDRE_L}"
        )));
    }
    let mut p0 = Complex64::from(1.0);
    if l == 0 {
        return Ok(p0);
    }
    let mut p1 = x;
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre;

    #[test]
    fn low_orders() {
        assert_eq!(legendre_p(0, Complex64::new(3.0, -2.0)).unwrap(), Complex64::from(1.0));
        assert!((legendre_p(1, Complex64::from(0.3)).unwrap().re - 0.3).abs() < 1e-15);
        let x = 0.7f64;
        let exact = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
        assert!((legendre_p(4, Complex64::from(x)).unwrap().re - exact).abs() < 1e-14);
        let z = Complex64::new(0.4, -1.3);
        let exact = (35.0 * z.powi(4) - 30.0 * z * z + 3.0) / 8.0;
        assert!((legendre_p(4, z).unwrap() - exact).norm() < 1e-13);
    }

    #[test]
    fn orthogonality_on_gauss_grid() {
        let (x, w) = gauss_legendre(16, -1.0, 1.0).unwrap();
        for l in 0..=6 {
            for lp in 0..=6 {
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| {
                        w * (legendre_p(l, Complex64::from(*x)).unwrap()
                            * legendre_p(lp, Complex64::from(*x)).unwrap())
                        .re
                    })
                    .sum();
                let exact = if l == lp { 2.0 / (2.0 * l as f64 + 1.0) } else { 0.0 };
                assert!((s - exact).abs() < 1e-12, "L={l} L'={lp}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(legendre_p(13, Complex64::from(0.0)).is_err());
    }
}
