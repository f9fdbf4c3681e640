//! Two-body channels, kinetic energies and on-shell quantities.
//!
//! All energies, masses and momenta are in MeV. Every function accepts
//! complex momenta so that complex-scaled arguments `q e^{-i theta}` can be
//! passed straight through.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Conversion constant between fm and MeV⁻¹.
pub const HBARC: f64 = 197.326_980_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinematicsMode {
    /// `m + M + p²/(2μ)`
    NonRelativistic,
    /// `√(p²+m²) + √(p²+M²)`
    SemiRelativistic,
}

impl fmt::Display for KinematicsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinematicsMode::NonRelativistic => f.write_str("NR"),
            KinematicsMode::SemiRelativistic => f.write_str("SR"),
        }
    }
}

/// Riemann sheet used when continuing the on-shell momentum to complex energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// `Im k > 0`.
    Physical,
    /// `Im k < 0`; resonances live here.
    Unphysical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    m: f64,
    big_m: f64,
    mode: KinematicsMode,
    label: String,
}

impl Channel {
    pub fn new(m: f64, big_m: f64, mode: KinematicsMode, label: impl Into<String>) -> Result<Self> {
        if !(m > 0.0 && big_m > 0.0 && m.is_finite() && big_m.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "channel masses must be positive and finite, got m = {m}, M = {big_m}"
            )));
        }
        Ok(Self {
            m,
            big_m,
            mode,
            label: label.into(),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    #[allow(non_snake_case)]
    pub fn M(&self) -> f64 {
        self.big_m
    }

    pub fn mode(&self) -> KinematicsMode {
        self.mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_mode(&self, mode: KinematicsMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn reduced_mass(&self) -> f64 {
        self.m * self.big_m / (self.m + self.big_m)
    }

    pub fn threshold(&self) -> f64 {
        self.m + self.big_m
    }
}

/// Principal square root with the cut placed along the negative real axis.
fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Kinetic energy `𝓔(p)` of the channel at complex momentum `p`.
pub fn energy(ch: &Channel, p: Complex64) -> Result<Complex64> {
    match ch.mode {
        KinematicsMode::NonRelativistic => {
            Ok(Complex64::from(ch.threshold()) + p * p / (2.0 * ch.reduced_mass()))
        }
        KinematicsMode::SemiRelativistic => {
            let p2 = p * p;
            let a = p2 + ch.m * ch.m;
            let b = p2 + ch.big_m * ch.big_m;
            let scale = ch.m.min(ch.big_m).powi(2);
            if a.norm() <= 1e-14 * scale || b.norm() <= 1e-14 * scale {
                return Err(Error::Domain(format!(
                    "momentum {p} sits on a square-root branch point of the semirelativistic energy"
                )));
            }
            Ok(principal_sqrt(a) + principal_sqrt(b))
        }
    }
}

/// Derivative `d𝓔/dp` at complex momentum.
pub fn energy_derivative(ch: &Channel, p: Complex64) -> Result<Complex64> {
    match ch.mode {
        KinematicsMode::NonRelativistic => Ok(p / ch.reduced_mass()),
        KinematicsMode::SemiRelativistic => {
            let p2 = p * p;
            let a = principal_sqrt(p2 + ch.m * ch.m);
            let b = principal_sqrt(p2 + ch.big_m * ch.big_m);
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return Err(Error::Domain(format!("branch point at p = {p}")));
            }
            Ok(p / a + p / b)
        }
    }
}

/// Källén function λ(x, y, z).
pub fn kallen(x: f64, y: f64, z: f64) -> f64 {
    x * x + y * y + z * z - 2.0 * x * y - 2.0 * y * z - 2.0 * z * x
}

fn kallen_c(x: Complex64, y: f64, z: f64) -> Complex64 {
    x * x + y * y + z * z - 2.0 * x * y - 2.0 * y * z - 2.0 * z * x
}

/// On-shell relative momentum at (complex) total energy `e`.
///
/// The principal root has `Im k >= 0`; `Sheet::Unphysical` flips it so that
/// `Im k <= 0`. For real energies above threshold both sheets return the
/// same nonnegative real momentum.
pub fn onshell_momentum(ch: &Channel, e: Complex64, sheet: Sheet) -> Result<Complex64> {
    let k2 = match ch.mode {
        KinematicsMode::NonRelativistic => 2.0 * ch.reduced_mass() * (e - ch.threshold()),
        KinematicsMode::SemiRelativistic => {
            if e.norm() == 0.0 {
                return Err(Error::Domain("on-shell momentum undefined at E = 0".into()));
            }
            kallen_c(e * e, ch.m * ch.m, ch.big_m * ch.big_m) / (4.0 * e * e)
        }
    };
    // principal sqrt has Re >= 0; rotate to the upper half plane first
    let mut k = principal_sqrt(k2);
    if k.im < 0.0 {
        k = -k;
    }
    if k.im == 0.0 && k.re < 0.0 {
        k = -k;
    }
    Ok(match sheet {
        Sheet::Physical => k,
        Sheet::Unphysical => {
            if k.im > 0.0 {
                -k
            } else {
                k
            }
        }
    })
}

/// Two-body phase space ρ(E) for real energies above threshold.
pub fn phase_space(ch: &Channel, e: f64) -> Result<f64> {
    if e < ch.threshold() {
        return Err(Error::Domain(format!(
            "phase space requested below threshold ({e} < {})",
            ch.threshold()
        )));
    }
    let k = onshell_momentum(ch, Complex64::from(e), Sheet::Physical)?.re.max(0.0);
    Ok(match ch.mode {
        KinematicsMode::NonRelativistic => ch.reduced_mass() * k / PI,
        KinematicsMode::SemiRelativistic => {
            (k * k + ch.m * ch.m).sqrt() * (k * k + ch.big_m * ch.big_m).sqrt() * k / (PI * e)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lambda_n() -> Channel {
        Channel::new(1115.7, 35.0 * 1115.7, KinematicsMode::NonRelativistic, "A").unwrap()
    }

    #[test]
    fn threshold_energies() {
        let ch = lambda_n();
        assert!((energy(&ch, c(0.0, 0.0)).unwrap().re - 40165.2).abs() < 1e-9);
        let nn = Channel::new(938.9, 938.9, KinematicsMode::SemiRelativistic, "NN").unwrap();
        assert!((energy(&nn, c(0.0, 0.0)).unwrap() - c(1877.8, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn complex_scaled_nr_energy() {
        // direct expansion of m + M + p²/(2μ) with p = 100 e^{-i 20°}
        let ch = lambda_n();
        let th = 20f64.to_radians();
        let mu = 1115.7 * 35.0 / 36.0;
        let expected = c(
            36.0 * 1115.7 + 1e4 * (2.0 * th).cos() / (2.0 * mu),
            -1e4 * (2.0 * th).sin() / (2.0 * mu),
        );
        let got = energy(&ch, Complex64::from_polar(100.0, -th)).unwrap();
        assert!((got - expected).norm() < 1e-10);
    }

    #[test]
    fn kallen_values() {
        assert_eq!(kallen(1.0, 0.0, 0.0), 1.0);
        assert_eq!(kallen(4.0, 1.0, 1.0), 0.0);
        let (x, y) = (7.0, 3.0);
        assert_eq!(kallen(x, y, y), x * x - 4.0 * x * y);
    }

    #[test]
    fn onshell_inverts_energy() {
        let nn = Channel::new(938.9, 938.9, KinematicsMode::SemiRelativistic, "NN").unwrap();
        let e = 2.0 * (200f64.powi(2) + 938.9f64.powi(2)).sqrt();
        let k = onshell_momentum(&nn, c(e, 0.0), Sheet::Physical).unwrap();
        assert!((k - c(200.0, 0.0)).norm() < 1e-9);

        let nr = nn.with_mode(KinematicsMode::NonRelativistic);
        let k = onshell_momentum(&nr, c(1877.8 + 6.2, 0.0), Sheet::Physical).unwrap();
        assert!((k.re - (2.0 * 469.45 * 6.2f64).sqrt()).abs() < 1e-10);
        assert_eq!(onshell_momentum(&nr, c(1877.8, 0.0), Sheet::Physical).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn sheet_convention() {
        let nr = Channel::new(938.9, 938.9, KinematicsMode::NonRelativistic, "NN").unwrap();
        let e = c(1884.0, -0.1);
        let k2 = onshell_momentum(&nr, e, Sheet::Unphysical).unwrap();
        let k1 = onshell_momentum(&nr, e, Sheet::Physical).unwrap();
        assert!(k2.im <= 0.0 && k1.im >= 0.0);
        assert!(k2.re > 0.0);
        assert!((energy(&nr, k2).unwrap() - e).norm() < 1e-10);
    }

    #[test]
    fn phase_space_values() {
        let nr = Channel::new(938.9, 938.9, KinematicsMode::NonRelativistic, "NN").unwrap();
        assert_eq!(phase_space(&nr, 1877.8).unwrap(), 0.0);
        let mu = 469.45;
        let expected = mu * (2.0 * mu * 10.0f64).sqrt() / PI;
        assert!((phase_space(&nr, 1887.8).unwrap() - expected).abs() < 1e-9);
        assert!(phase_space(&nr, 1800.0).is_err());

        let sr = nr.with_mode(KinematicsMode::SemiRelativistic);
        let mut last = 0.0;
        for i in 1..50 {
            let rho = phase_space(&sr, 1877.8 + 0.1 * i as f64).unwrap();
            assert!(rho > last);
            last = rho;
        }
    }

    #[test]
    fn sr_branch_point_is_domain_error() {
        let ch = Channel::new(138.0, 138.0, KinematicsMode::SemiRelativistic, "pipi").unwrap();
        assert!(energy(&ch, c(0.0, 138.0)).is_err());
        assert!(onshell_momentum(&ch, c(0.0, 0.0), Sheet::Physical).is_err());
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(Channel::new(-1.0, 1.0, KinematicsMode::NonRelativistic, "x").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn energy_of_onshell_momentum_roundtrips(de in 0.01f64..500.0, sr in any::<bool>()) {
                let mode = if sr { KinematicsMode::SemiRelativistic } else { KinematicsMode::NonRelativistic };
                let ch = Channel::new(495.7, 938.9, mode, "KN").unwrap();
                let e = c(ch.threshold() + de, 0.0);
                let k = onshell_momentum(&ch, e, Sheet::Physical).unwrap();
                let back = energy(&ch, k).unwrap();
                prop_assert!((back - e).norm() / e.norm() < 1e-10);
            }

            #[test]
            fn kallen_is_symmetric(x in -1e3f64..1e3, y in -1e3f64..1e3, z in -1e3f64..1e3) {
                let v = kallen(x, y, z);
                for w in [kallen(y, x, z), kallen(z, y, x), kallen(x, z, y), kallen(y, z, x)] {
                    prop_assert!((v - w).abs() <= 1e-9 * v.abs().max(1.0));
                }
            }

            #[test]
            fn real_momentum_energy_is_above_threshold(q in 0.0f64..5e3, sr in any::<bool>()) {
                let mode = if sr { KinematicsMode::SemiRelativistic } else { KinematicsMode::NonRelativistic };
                let ch = Channel::new(138.0, 1193.1, mode, "piS").unwrap();
                let e = energy(&ch, c(q, 0.0)).unwrap();
                prop_assert!(e.im == 0.0);
                prop_assert!(e.re >= ch.threshold() - 1e-9);
            }
        }
    }
}
