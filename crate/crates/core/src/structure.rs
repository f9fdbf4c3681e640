//! Pole residues, automatically scaled wave functions and compositeness.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::linalg::CMat;
use crate::numerics::{muller, MullerOptions};
use crate::scattering::{solve_half_offshell, DiscreteSystem};
use crate::spectrum::{self, DensityProfile, Normalization, RadialWaveFunction};

/// `γ_j(q_i e^{-iθ})` from `T ≈ γ γᵀ / (E − E_pole)`.
#[derive(Debug, Clone)]
pub struct ResidueVector {
    pub gamma: Vec<Vec<Complex64>>,
    pub e_pole: Complex64,
    pub theta: f64,
    pub l: usize,
    /// `‖r − γγᵀ‖ / ‖r‖`
    pub factorization_residual: f64,
    /// Channel and node used to fix the square root.
    pub reference: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TildeMeasures {
    pub z: Complex64,
    pub x_tilde: Vec<f64>,
    pub z_tilde: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositenessReport {
    pub e_pole: Complex64,
    /// `Re(threshold of channel 1) − Re E_pole`
    pub binding_energy: f64,
    /// `−2 Im E_pole`
    pub width: f64,
    pub x: Vec<Complex64>,
    pub z: Complex64,
    pub x_tilde: Vec<f64>,
    pub z_tilde: f64,
    pub u: f64,
    pub x_dvde: Complex64,
    pub theta: f64,
    pub provenance: String,
}

/// Pole of the amplitude itself: Muller on `1 / (uᵀ T(E) u)` with `u = (1, …, 1)`.
/// Independent of the determinant search in [`spectrum::find_eigenenergy`].
pub fn locate_pole(ds: &DiscreteSystem, guess: Complex64) -> Result<Complex64> {
    let inverse_amplitude = |e: Complex64| -> Result<Complex64> {
        let a = ds.one_minus_kernel(e)?;
        let v = ds.potential(e);
        let ones = CMat::from_element(v.nrows(), 1, Complex64::from(1.0));
        let vu = &v * &ones;
        let tu = a
            .lu()
            .solve(&vu)
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let s: Complex64 = tu.iter().sum();
        if s.norm() == 0.0 || !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::NearSingular { condition: f64::INFINITY });
        }
        Ok(s.inv())
    };
    let h = 0.1;
    let seeds = [guess - h, guess + h, guess + Complex64::new(0.0, -0.5 * h)];
    let root = muller(inverse_amplitude, seeds, MullerOptions::default())?;
    spectrum::check_not_continuum(ds, root)?;
    Ok(root)
}

pub fn default_delta(e_pole: Complex64) -> f64 {
    (1e-6 * e_pole.norm()).max(1e-3)
}

fn symmetric_difference(ds: &DiscreteSystem, e_pole: Complex64, delta: f64) -> Result<CMat> {
    let tp = solve_half_offshell(ds, e_pole + delta)?.t;
    let tm = solve_half_offshell(ds, e_pole - delta)?.t;
    Ok((tp - tm) * Complex64::from(0.5 * delta))
}

/// Residue of the half-off-shell amplitude at a simple pole, factorised
/// into `γ γᵀ`.
pub fn extract_residues(ds: &DiscreteSystem, e_pole: Complex64, delta: Option<f64>) -> Result<ResidueVector> {
    let delta = delta.unwrap_or_else(|| default_delta(e_pole));
    let a1 = symmetric_difference(ds, e_pole, delta)?;
    let a2 = symmetric_difference(ds, e_pole, 0.5 * delta)?;
    let r = (a2 * Complex64::from(4.0) - a1) / Complex64::from(3.0);
    let dim = r.nrows();
    let star = (0..dim)
        .max_by(|&a, &b| r[(a, a)].norm().total_cmp(&r[(b, b)].norm()))
        .ok_or_else(|| Error::InvalidInput("empty system".into()))?;
    let mut g_star = r[(star, star)].sqrt();
    if g_star.re < 0.0 {
        g_star = -g_star;
    }
    if g_star.norm() == 0.0 {
        return Err(Error::Factorization { residual: f64::INFINITY });
    }
    let gamma: Vec<Complex64> = (0..dim).map(|i| r[(i, star)] / g_star).collect();
    let mut diff = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            diff += (r[(a, b)] - gamma[a] * gamma[b]).norm_sqr();
        }
    }
    let residual = diff.sqrt() / r.norm();
    if !(residual <= 1e-6) {
        return Err(Error::Factorization { residual });
    }
    let n = ds.mesh().n();
    let gamma = gamma.chunks(n).map(<[Complex64]>::to_vec).collect();
    Ok(ResidueVector {
        gamma,
        e_pole,
        theta: ds.theta(),
        l: ds.system().l(),
        factorization_residual: residual,
        reference: (star / n, star % n),
    })
}

/// `R_j = γ_j / (E_pole − 𝓔_j)` without any rescaling.
pub fn residue_wavefunction(ds: &DiscreteSystem, res: &ResidueVector) -> Result<RadialWaveFunction> {
    let energies = ds.channel_energies(res.e_pole)?;
    let values = res
        .gamma
        .iter()
        .zip(&energies)
        .map(|(g, e)| g.iter().zip(e).map(|(g, e)| g / (res.e_pole - e)).collect())
        .collect();
    Ok(RadialWaveFunction {
        values,
        e_pole: res.e_pole,
        theta: res.theta,
        l: res.l,
        normalization: Normalization::AmplitudeScaled,
    })
}

pub fn density_profile(res: &ResidueVector, ds: &DiscreteSystem) -> Result<DensityProfile> {
    Ok(DensityProfile::from_wavefunction(ds, &residue_wavefunction(ds, res)?))
}

/// `X_j = Σ_i w_i P_j(q_i)`.
pub fn compositeness_x(profile: &DensityProfile) -> Vec<Complex64> {
    profile.integrals()
}

/// `Z = 1 − ΣX`, `U = Σ|X| + |Z| − 1`, `X̃ = |X|/(1+U)`, `Z̃ = |Z|/(1+U)`.
pub fn missing_and_tilde(x: &[Complex64]) -> TildeMeasures {
    let sum: Complex64 = x.iter().sum();
    let z = Complex64::from(1.0) - sum;
    let abs_sum: f64 = x.iter().map(|v| v.norm()).sum();
    let u = abs_sum + z.norm() - 1.0;
    let norm = 1.0 + u;
    TildeMeasures {
        z,
        x_tilde: x.iter().map(|v| v.norm() / norm).collect(),
        z_tilde: z.norm() / norm,
        u,
    }
}

/// `1 + e^{-6iθ} Σ_jk ∬ (q²/2π²)(q'²/2π²) R_j R_k ∂V_jk/∂E` on the mesh.
pub fn compositeness_dvde(wf: &RadialWaveFunction, ds: &DiscreteSystem) -> Result<Complex64> {
    let dv = ds.potential_derivative(wf.e_pole);
    let n = ds.mesh().n();
    if wf.values.len() * n != dv.nrows() {
        return Err(Error::InvalidInput("wave function does not match the system".into()));
    }
    let u: Vec<Complex64> = wf
        .values
        .iter()
        .flat_map(|r| r.iter().zip(ds.measure()).map(|(r, m)| r * m))
        .collect();
    let mut acc = Complex64::from(0.0);
    for a in 0..u.len() {
        if u[a].norm() == 0.0 {
            continue;
        }
        let mut row = Complex64::from(0.0);
        for b in 0..u.len() {
            row += dv[(a, b)] * u[b];
        }
        acc += u[a] * row;
    }
    Ok(Complex64::from(1.0) + acc)
}

/// Everything derived from one pole.
#[derive(Debug, Clone)]
pub struct PoleAnalysis {
    pub report: CompositenessReport,
    pub residues: ResidueVector,
    pub amplitude_wf: RadialWaveFunction,
    pub amplitude_profile: DensityProfile,
    pub schrodinger_wf: RadialWaveFunction,
    pub schrodinger_profile: DensityProfile,
    /// `max |P_LS − P_Schr| / max |P_Schr|`
    pub profile_deviation: f64,
    /// Residual of fitting `R_LS = c R_Schr` with one complex constant,
    /// relative to `max |R_LS|`.
    pub shape_residual: f64,
    pub shape_scale: Complex64,
}

/// Pole search, residues, profiles, compositeness and the `∂V/∂E` check.
pub fn analyze_pole(ds: &DiscreteSystem, guess: Complex64, provenance: &str) -> Result<PoleAnalysis> {
    let e_pole = locate_pole(ds, guess)?;
    analyze_at(ds, e_pole, provenance)
}

/// Same as [`analyze_pole`] for an already converged pole.
pub fn analyze_at(ds: &DiscreteSystem, e_pole: Complex64, provenance: &str) -> Result<PoleAnalysis> {
    let residues = extract_residues(ds, e_pole, None)?;
    let amplitude_wf = residue_wavefunction(ds, &residues)?;
    let amplitude_profile = DensityProfile::from_wavefunction(ds, &amplitude_wf);
    let (schrodinger_wf, schrodinger_profile) = spectrum::radial_wavefunction_normalized(ds, e_pole)?;
    let x = compositeness_x(&amplitude_profile);
    let tilde = missing_and_tilde(&x);
    let x_dvde = compositeness_dvde(&amplitude_wf, ds)?;
    let threshold = ds.system().channels()[0].threshold();
    let report = CompositenessReport {
        e_pole,
        binding_energy: threshold.re - e_pole.re,
        width: -2.0 * e_pole.im,
        x,
        z: tilde.z,
        x_tilde: tilde.x_tilde,
        z_tilde: tilde.z_tilde,
        u: tilde.u,
        x_dvde,
        theta: ds.theta(),
        provenance: provenance.to_string(),
    };
    let peak = schrodinger_profile.peak();
    let mut dev: f64 = 0.0;
    for (a, b) in amplitude_profile.values.iter().zip(&schrodinger_profile.values) {
        for (a, b) in a.iter().zip(b) {
            dev = dev.max((a - b).norm());
        }
    }
    let (shape_scale, shape_residual) = fit_scale(&amplitude_wf, &schrodinger_wf);
    Ok(PoleAnalysis {
        report,
        residues,
        amplitude_wf,
        amplitude_profile,
        schrodinger_wf,
        schrodinger_profile,
        profile_deviation: if peak > 0.0 { dev / peak } else { dev },
        shape_residual,
        shape_scale,
    })
}

/// Least-squares `c` in `a ≈ c b` and the relative max-norm residual.
pub fn fit_scale(a: &RadialWaveFunction, b: &RadialWaveFunction) -> (Complex64, f64) {
    let mut num = Complex64::from(0.0);
    let mut den = 0.0;
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (x, y) in ra.iter().zip(rb) {
            num += y.conj() * x;
            den += y.norm_sqr();
        }
    }
    let c = if den > 0.0 { num / den } else { Complex64::from(0.0) };
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - c * y).norm());
            peak = peak.max(x.norm());
        }
    }
    (c, if peak > 0.0 { worst / peak } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tilde_of_pure_composite() {
        let t = missing_and_tilde(&[c(1.0, 0.0)]);
        assert_eq!(t.z, c(0.0, 0.0));
        assert_eq!(t.u, 0.0);
        assert_eq!(t.x_tilde, vec![1.0]);
        assert_eq!(t.z_tilde, 0.0);
    }

    #[test]
    fn tilde_of_table_values() {
        let t = missing_and_tilde(&[c(0.99, -0.08), c(0.01, 0.08)]);
        assert!(t.z.norm() < 1e-15);
        let (a, b) = (0.99f64.hypot(0.08), 0.01f64.hypot(0.08));
        assert!((t.u - (a + b - 1.0)).abs() < 1e-15);
        assert!((t.x_tilde[0] - a / (a + b)).abs() < 1e-15);
        assert!((t.x_tilde[1] - b / (a + b)).abs() < 1e-15);
        // the table inputs are rounded to two digits
        assert!((t.u - 0.07).abs() < 0.01);
        assert!((t.x_tilde[0] - 0.93).abs() < 0.01);
        assert!((t.x_tilde[1] - 0.07).abs() < 0.01);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tilde_sum_rule(xs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..5)) {
                let x: Vec<Complex64> = xs.iter().map(|&(a, b)| c(a, b)).collect();
                let t = missing_and_tilde(&x);
                let s: f64 = t.x_tilde.iter().sum::<f64>() + t.z_tilde;
                prop_assert!((s - 1.0).abs() < 1e-14);
                prop_assert!(t.x_tilde.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert!((0.0..=1.0).contains(&t.z_tilde));
                let total: Complex64 = x.iter().sum::<Complex64>() + t.z;
                prop_assert!((total - 1.0).norm() < 1e-14);
            }
        }
    }
}
