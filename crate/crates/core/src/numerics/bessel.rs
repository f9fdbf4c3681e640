use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_BESSEL_L: usize = 12;
/// `sin z` overflows an f64 once |Im z| approaches 710.
const IMAG_GUARD: f64 = 700.0;

/// Spherical Bessel function of the first kind at complex argument.
///
/// Power series near the origin, upward recurrence when `|z| > L` and
/// Miller's downward recurrence otherwise.
pub fn sph_bessel_j(l: usize, z: Complex64) -> Result<Complex64> {
    if l > MAX_BESSEL_L {
        return Err(Error::Unsupported(format!("spherical Bessel order {l} > {MAX_BESSEL_L}")));
    }
    if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > IMAG_GUARD {
        return Err(Error::Overflow(format!("j_{l}({z})")));
    }
    let r = z.norm();
    if r < 1.0 {
        return Ok(series(l, z));
    }
    if r >= l as f64 {
        return Ok(upward(l, z));
    }
    Ok(miller(l, z))
}

fn series(l: usize, z: Complex64) -> Complex64 {
    // z^L/(2L+1)!! Σ_k (-z²/2)^k / (k! (2L+3)(2L+5)…(2L+2k+1))
    let mut pref = Complex64::from(1.0);
    for k in 0..l {
        pref *= z / (2 * k + 3) as f64;
    }
    let x = -0.5 * z * z;
    let mut term = Complex64::from(1.0);
    let mut sum = term;
    for k in 1..60 {
        term *= x / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    pref * sum
}

fn upward(l: usize, z: Complex64) -> Complex64 {
    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    if l == 0 {
        return j0;
    }
    let mut jm = j0;
    let mut j = s / (z * z) - c / z;
    for k in 1..l {
        let jp = (2 * k + 1) as f64 / z * j - jm;
        jm = j;
        j = jp;
    }
    j
}

fn miller(l: usize, z: Complex64) -> Complex64 {
    let start = l + 20 + z.norm() as usize;
    let mut jp = Complex64::from(0.0);
    let mut j = Complex64::from(1e-30);
    let mut target = Complex64::from(0.0);
    let mut j1 = Complex64::from(0.0);
    for k in (1..=start).rev() {
        // j_{k-1} = (2k+1)/z j_k - j_{k+1}
        let jm = (2 * k + 1) as f64 / z * j - jp;
        jp = j;
        j = jm;
        if k - 1 == l {
            target = j;
        }
        if k - 1 == 1 {
            j1 = j;
        }
        if j.norm() > 1e250 {
            j /= 1e250;
            jp /= 1e250;
            target /= 1e250;
            j1 /= 1e250;
        }
    }
    // j now holds the unnormalised j_0; normalise against whichever of
    // the closed forms is further from a zero
    let (s, c) = (z.sin(), z.cos());
    let e0 = s / z;
    let e1 = s / (z * z) - c / z;
    if e0.norm() >= e1.norm() {
        target * e0 / j
    } else {
        target * e1 / j1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle: plain power series summed with many terms,
    /// usable for moderate |z| where cancellation stays benign.
    fn series_oracle(l: usize, z: Complex64) -> Complex64 {
        let mut df = 1.0;
        for k in 0..=l {
            df *= (2 * k + 1) as f64;
        }
        let mut sum = Complex64::from(0.0);
        let mut fact = 1.0;
        for k in 0..80usize {
            if k > 0 {
                fact *= k as f64;
            }
            let mut den = fact;
            for m in 1..=k {
                den *= (2 * l + 2 * m + 1) as f64;
            }
            sum += (-0.5 * z * z).powu(k as u32) / den;
        }
        z.powu(l as u32) / df * sum
    }

    #[test]
    fn limits_at_origin() {
        assert_eq!(sph_bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(sph_bessel_j(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn j2_against_series_oracle() {
        let z = c(1.5, -0.5);
        let got = sph_bessel_j(2, z).unwrap();
        assert!((got - series_oracle(2, z)).norm() < 1e-12);
    }

    #[test]
    fn closed_forms_on_complex_grid() {
        for re in [-7.0, -2.5, -0.3, 0.01, 0.7, 1.2, 3.3, 9.0, 25.0] {
            for im in [-4.0, -1.0, -0.2, 0.0, 0.5, 2.0] {
                let z = c(re, im);
                let j0 = z.sin() / z;
                let j1 = z.sin() / (z * z) - z.cos() / z;
                let g0 = sph_bessel_j(0, z).unwrap();
                let g1 = sph_bessel_j(1, z).unwrap();
                let scale = 1.0 + j0.norm();
                assert!((g0 - j0).norm() < 1e-12 * scale, "j0 at {z}");
                assert!((g1 - j1).norm() < 1e-12 * (1.0 + j1.norm()), "j1 at {z}");
            }
        }
    }

    #[test]
    fn higher_orders_against_series_oracle() {
        for l in 0..=6 {
            for z in [c(0.3, 0.1), c(2.0, -0.7), c(4.5, 0.0), c(3.0, 1.5), c(0.9, -0.9), c(5.5, -2.0)] {
                let got = sph_bessel_j(l, z).unwrap();
                let want = series_oracle(l, z);
                assert!(
                    (got - want).norm() < 1e-11 * (1.0 + want.norm()),
                    "L={l} z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn recurrence_regimes_agree_at_switch() {
        // |z| just below and above L selects Miller vs upward recurrence
        for l in 2..=6 {
            for f in [1.0 - 1e-6, 1.0 + 1e-6] {
                let z = Complex64::from_polar(l as f64 * f, 0.2);
                let want = series_oracle(l, z);
                assert!((sph_bessel_j(l, z).unwrap() - want).norm() < 1e-12 * want.norm());
            }
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(sph_bessel_j(0, c(1.0, 800.0)).is_err());
    }
}
