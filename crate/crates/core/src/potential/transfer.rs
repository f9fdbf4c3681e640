//! Momentum-transfer representation of local potentials.
//!
//! For momenta on a common ray `q e^{-iθ}` the partial-wave matrix element
//! only needs the rotated Fourier transform `Ṽ_θ(Q)` at real transfer `Q`:
//!
//! `V_L = 1/(2 q' q) ∫_{|q'-q|}^{q'+q} dQ Q P_L(x(Q)) Ṽ_θ(Q)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::HBARC;
use crate::numerics::{gauss_legendre, RadialGrid};

/// Table spacing in MeV.
const STEP: f64 = 0.5;
const CHUNK: usize = 512;
const BLOCK: usize = 32;
const HARD_CAP: f64 = 60_000.0;
/// Relative size below which a whole chunk of the transform counts as zero.
const NEGLIGIBLE: f64 = 1e-13;

/// `Ṽ_θ(Q)` sampled with derivatives for cubic Hermite interpolation.
#[derive(Debug)]
pub(crate) struct TransferTable {
    values: Vec<Complex64>,
    derivs: Vec<Complex64>,
    q_cut: f64,
}

fn j0_j1(x: f64) -> (f64, f64) {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        (1.0 - x2 / 6.0 + x2 * x2 / 120.0, x / 3.0 - x * x2 / 30.0 + x * x2 * x2 / 840.0)
    } else {
        let (s, c) = x.sin_cos();
        (s / x, s / (x * x) - c / x)
    }
}

impl TransferTable {
    /// Tabulates `4π e^{3iθ}/ħc³ ∫ ds s² j0(Q s/ħc) V(s e^{iθ})` in MeV⁻².
    pub(crate) fn build<F>(profile: F, grid: &RadialGrid, theta: f64) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let rot = Complex64::from_polar(1.0, theta);
        let pref = 4.0 * PI * rot * rot * rot / HBARC.powi(3);
        let s: Vec<f64> = grid.nodes().iter().map(|r| r / HBARC).collect();
        let ws: Vec<Complex64> = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .map(|(&r, &w)| pref * w * r * r * profile(rot * r))
            .collect();
        if ws.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("potential profile not finite on the rotated contour".into()));
        }
        let s_max = s.iter().cloned().fold(0.0, f64::max);
        let direct = |k: usize| -> (Complex64, Complex64) {
            let q = k as f64 * STEP;
            let mut v = Complex64::from(0.0);
            let mut d = Complex64::from(0.0);
            for (sk, wk) in s.iter().zip(&ws) {
                let (a, b) = j0_j1(q * sk);
                v += wk * a;
                d -= wk * (b * sk);
            }
            (v, d)
        };
        // j0 = sin/x and j0' = cos/x - sin/x², summed with the phases advanced by rotation.
        let ws_over_s: Vec<Complex64> = ws.iter().zip(&s).map(|(w, sk)| w / *sk).collect();
        let step_rot: Vec<(f64, f64)> = s.iter().map(|sk| (STEP * sk).sin_cos()).collect();
        let block = |first: usize, len: usize| -> Vec<(Complex64, Complex64)> {
            let mut out = Vec::with_capacity(len);
            let mut k0 = first;
            while k0 < first + len && (k0 as f64 * STEP * s_max) < 1.0 {
                out.push(direct(k0));
                k0 += 1;
            }
            let rest = first + len - k0;
            if rest == 0 {
                return out;
            }
            let mut sa = vec![Complex64::from(0.0); rest];
            let mut cb = vec![Complex64::from(0.0); rest];
            for (i, sk) in s.iter().enumerate() {
                let (mut sn, mut cs) = (k0 as f64 * STEP * sk).sin_cos();
                let (s1, c1) = step_rot[i];
                let (a, b) = (ws_over_s[i], ws[i]);
                for j in 0..rest {
                    sa[j] += a * sn;
                    cb[j] += b * cs;
                    let t = sn * c1 + cs * s1;
                    cs = cs * c1 - sn * s1;
                    sn = t;
                }
            }
            for j in 0..rest {
                let q = (k0 + j) as f64 * STEP;
                out.push((sa[j] / q, cb[j] / q - sa[j] / (q * q)));
            }
            out
        };
        let mut values = Vec::new();
        let mut derivs = Vec::new();
        let mut peak: f64 = 0.0;
        let mut q_cut = HARD_CAP;
        loop {
            let start = values.len();
            if start as f64 * STEP > HARD_CAP {
                break;
            }
            let chunk: Vec<(Complex64, Complex64)> = (0..CHUNK / BLOCK)
                .into_par_iter()
                .flat_map_iter(|b| block(start + b * BLOCK, BLOCK))
                .collect();
            let chunk_max = chunk.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
            peak = peak.max(chunk_max);
            for (v, d) in chunk {
                values.push(v);
                derivs.push(d);
            }
            if start > 0 && chunk_max < NEGLIGIBLE * peak {
                q_cut = start as f64 * STEP;
                values.truncate(start + 1);
                derivs.truncate(start + 1);
                break;
            }
        }
        if peak == 0.0 {
            q_cut = 0.0;
        }
        Ok(Self { values, derivs, q_cut })
    }

    pub(crate) fn q_cut(&self) -> f64 {
        self.q_cut
    }

    pub(crate) fn eval(&self, q: f64) -> Complex64 {
        if q >= self.q_cut || q < 0.0 {
            return Complex64::from(0.0);
        }
        let t = q / STEP;
        let k = (t.floor() as usize).min(self.values.len() - 2);
        let u = t - k as f64;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        self.values[k] * h00
            + self.derivs[k] * (STEP * h10)
            + self.values[k + 1] * h01
            + self.derivs[k + 1] * (STEP * h11)
    }
}

pub(crate) fn legendre_real(l: usize, x: f64) -> f64 {
    let mut p0 = 1.0;
    if l == 0 {
        return p0;
    }
    let mut p1 = x;
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Gauss rule reused for every transfer integral.
pub(crate) struct TransferRule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl TransferRule {
    pub(crate) fn new(points: usize) -> Self {
        let (x, w) = gauss_legendre(points, -1.0, 1.0).expect("fixed rule");
        Self { x, w }
    }

    /// `∫_{lo}^{hi} f` with panels no wider than `width`.
    pub(crate) fn integrate<F: FnMut(f64) -> Complex64>(&self, lo: f64, hi: f64, width: f64, mut f: F) -> Complex64 {
        if hi <= lo {
            return Complex64::from(0.0);
        }
        let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        let mut acc = Complex64::from(0.0);
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for (x, w) in self.x.iter().zip(&self.w) {
                acc += f(mid + 0.5 * h * x) * (0.5 * h * w);
            }
        }
        acc
    }
}

/// `1/(2 q' q) ∫ dQ Q P_L(x) Ṽ(Q)` over the kinematic range, cut at `q_cut`.
pub(crate) fn project_on_ray<F>(rule: &TransferRule, l: usize, qo: f64, qi: f64, q_cut: f64, width: f64, vt: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let d = qo - qi;
    let lo = d.abs();
    let hi = (qo + qi).min(q_cut);
    let two_qq = 2.0 * qo * qi;
    let integral = rule.integrate(lo, hi, width, |q| {
        let x = 1.0 - (q * q - d * d) / two_qq;
        vt(q) * (q * legendre_real(l, x))
    });
    integral / two_qq
}

/// Same integral in the variable `y = ln(Q² + μ²)`, suited to transforms
/// with a `1/(Q² + μ²)` peak at small transfer.
pub(crate) fn project_on_ray_log<F>(rule: &TransferRule, l: usize, qo: f64, qi: f64, mu2: f64, width: f64, vt: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let d = qo - qi;
    let lo = d.abs();
    let hi = qo + qi;
    let two_qq = 2.0 * qo * qi;
    let ylo = (lo * lo + mu2).ln();
    let yhi = (hi * hi + mu2).ln();
    let integral = rule.integrate(ylo, yhi, width, |y| {
        let s = y.exp();
        let q2 = (s - mu2).max(0.0);
        let x = 1.0 - (q2 - d * d) / two_qq;
        vt(q2.sqrt()) * (0.5 * s * legendre_real(l, x))
    });
    integral / two_qq
}
