//! Radial Fourier multipliers, their maximal operators and kernels.

mod bump;
mod decay;
mod kernel;
mod profile;
mod surface;

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

pub use bump::{
    bump, dyadic_piece, phi, phi0, phi_derivative, sup_on_interval, tilde_piece, transition,
    transition_derivative, DyadicIndex,
};
pub use decay::{decay_constants, write_decay_csv, DecayRow};
pub use kernel::{bump_kernel, funk_hecke_kernel, kernel, radial_majorant, RadialMajorant, PHI_TABLE_CUTOFF};
pub use profile::RadialProfile;
pub use surface::{surface_multiplier, SurfaceMultiplier};

use crate::error::{Error, Result};
use crate::euclidean_max::RadiiSet;
use crate::grid::{forward_transform, inverse_transform, Domain, GridFunction, GridSpec};

/// Frequency radii of a grid, grouped by the integer `sum k_a^2`.
pub(crate) struct FrequencyShells {
    /// Shell index of every frequency slot.
    pub index: Vec<u32>,
    /// `|xi|` of every shell.
    pub radius: Vec<f64>,
}

impl FrequencyShells {
    pub fn new(spec: &GridSpec) -> Self {
        let step = spec.frequency_step();
        let mut lookup: HashMap<u64, u32> = HashMap::new();
        let mut radius = Vec::new();
        let index = (0..spec.len())
            .map(|flat| {
                let k2 = spec.frequency_k2(flat);
                *lookup.entry(k2).or_insert_with(|| {
                    radius.push((k2 as f64).sqrt() * step);
                    (radius.len() - 1) as u32
                })
            })
            .collect();
        Self { index, radius }
    }

    /// `omega(r |xi|)` per shell.
    pub fn sample(&self, omega: &RadialProfile, r: f64) -> Vec<f64> {
        self.radius.par_iter().map(|&s| omega.eval(r * s)).collect()
    }
}

fn is_real(f: &GridFunction) -> bool {
    f.values().iter().all(|v| v.im == 0.0)
}

/// Multiplies transformed data by per-shell weights and transforms back.
pub(crate) fn multiply_shells(
    hat: &GridFunction,
    shells: &FrequencyShells,
    weights: &[f64],
    real: bool,
) -> Result<GridFunction> {
    let values: Vec<Complex64> = hat
        .values()
        .par_iter()
        .zip(shells.index.par_iter())
        .map(|(v, &i)| v * weights[i as usize])
        .collect();
    let out = inverse_transform(&GridFunction::new(*hat.spec(), values, Domain::Frequency)?)?;
    if real {
        GridFunction::from_real(*hat.spec(), out.real_parts())
    } else {
        Ok(out)
    }
}

/// `(f^ omega(r |.|))^vee`. Real input yields real output.
pub fn apply_multiplier(f: &GridFunction, omega: &RadialProfile, r: f64) -> Result<GridFunction> {
    f.require(Domain::Physical)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("dilation must be positive, got {r}")));
    }
    let shells = FrequencyShells::new(f.spec());
    let hat = forward_transform(f)?;
    multiply_shells(&hat, &shells, &shells.sample(omega, r), is_real(f))
}

/// `sup_{r in R} |(f^ omega(r |.|))^vee|`, node-wise.
pub fn maximal_multiplier(f: &GridFunction, omega: &RadialProfile, radii: &RadiiSet) -> Result<GridFunction> {
    f.require(Domain::Physical)?;
    let shells = FrequencyShells::new(f.spec());
    let hat = forward_transform(f)?;
    let real = is_real(f);
    let mut best = vec![0.0f64; f.len()];
    for &r in radii.radii() {
        let g = multiply_shells(&hat, &shells, &shells.sample(omega, r), real)?;
        for (b, v) in best.iter_mut().zip(g.values()) {
            *b = b.max(v.norm());
        }
    }
    GridFunction::from_real(*f.spec(), best)
}

/// Spherical maximal function: [`maximal_multiplier`] with the sphere multiplier.
pub fn spherical_maximal(f: &GridFunction, d: usize, radii: &RadiiSet) -> Result<GridFunction> {
    if f.spec().dim() != d {
        return Err(Error::DimensionMismatch(f.spec().dim(), d));
    }
    maximal_multiplier(f, &surface_multiplier(d)?, radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::PI;

    #[test]
    fn identity_multiplier() {
        let spec = make_grid(2, 2.0, 16).unwrap();
        let f = sample(&spec, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() * (x[0] + 0.3)).unwrap();
        let g = apply_multiplier(&f, &RadialProfile::constant(1.0), 1.7).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let m = maximal_multiplier(&f, &RadialProfile::constant(1.0), &RadiiSet::new(vec![1.0, 2.0]).unwrap()).unwrap();
        for (a, b) in f.abs_values().iter().zip(m.real_parts()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_average_of_gaussian() {
        // average of e^{-|x|^2} over the sphere |y - x| = r in R^3
        let spec = make_grid(3, 5.0, 64).unwrap();
        let f = sample(&spec, |x| (-x.iter().map(|t| t * t).sum::<f64>()).exp()).unwrap();
        let r = 1.2;
        let g = apply_multiplier(&f, &surface_multiplier(3).unwrap(), r).unwrap();
        let rule = GaussLegendre::new(64);
        for flat in [spec.flatten(&[32, 32, 32]), spec.flatten(&[36, 30, 33])] {
            let x = spec.node(flat);
            let rho = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            // (1/2) int_{-1}^{1} exp(-(rho^2 + r^2 + 2 rho r t)) dt
            let exact = 0.5 * rule.integrate(-1.0, 1.0, |t| (-(rho * rho + r * r + 2.0 * rho * r * t)).exp());
            assert!((g.values()[flat].re - exact).abs() < 1e-6, "{} vs {exact}", g.values()[flat].re);
        }
        let _ = PI;
    }

    #[test]
    fn constant_input_is_fixed() {
        let spec = make_grid(3, 2.0, 8).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        let radii = RadiiSet::new(vec![0.5, 1.0, 2.0]).unwrap();
        let m = spherical_maximal(&one, 3, &radii).unwrap();
        assert!(m.real_parts().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(spherical_maximal(&one, 2, &radii).is_err());
    }
}
