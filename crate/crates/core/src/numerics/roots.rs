use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct MullerOptions {
    /// Absolute step tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MullerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

/// Muller's method for a complex root of `f`, seeded with three points.
pub fn muller<F>(mut f: F, x: [Complex64; 3], opts: MullerOptions) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let [mut x0, mut x1, mut x2] = x;
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..opts.max_iter {
        if f2.norm() == 0.0 {
            return Ok(x2);
        }
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        if h1.norm() == 0.0 || h2.norm() == 0.0 || (h1 + h2).norm() == 0.0 {
            return Err(Error::NoConvergence {
                what: "Muller iteration (coincident iterates)",
                iterations: 0,
            });
        }
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * f2).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let dx = if den.norm() == 0.0 {
            // flat quadratic: fall back to a small probing step
            h2 * 0.5
        } else {
            -2.0 * f2 / den
        };
        x0 = x1;
        x1 = x2;
        x2 += dx;
        f0 = f1;
        f1 = f2;
        f2 = f(x2)?;
        if !(x2.re.is_finite() && x2.im.is_finite()) {
            break;
        }
        if dx.norm() < opts.tol {
            return Ok(x2);
        }
    }
    Err(Error::NoConvergence {
        what: "Muller iteration",
        iterations: opts.max_iter,
    })
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(format!("[{a}, {b}] does not bracket a root")));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { s > lo && s < b } else { s > b && s < lo };
        if !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::NoConvergence {
        what: "Brent bracketing",
        iterations: max_iter,
    })
}
