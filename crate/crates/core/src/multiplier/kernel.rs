use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, Domain, GridFunction, GridSpec};
use crate::quadrature::{sine_power_integral, sphere_area, GaussLegendre};

use super::bump::{phi0, DyadicIndex};
use super::profile::RadialProfile;
use super::surface::SurfaceMultiplier;

/// `omega^vee` sampled on the physical grid of `spec`.
///
/// The profile must vanish beyond the per-axis frequency extent `N/(4L)`.
pub fn kernel(omega: &RadialProfile, spec: &GridSpec) -> Result<GridFunction> {
    let extent = spec.frequency_extent();
    let support = omega.support().1;
    if support > extent {
        return Err(Error::Aliasing { support, extent });
    }
    let step = spec.frequency_step();
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let values: Vec<Complex64> = (0..spec.len())
        .map(|flat| {
            let k2 = spec.frequency_k2(flat);
            let v = *cache.entry(k2).or_insert_with(|| omega.eval((k2 as f64).sqrt() * step));
            Complex64::new(v, 0.0)
        })
        .collect();
    let hat = GridFunction::new(*spec, values, Domain::Frequency)?;
    let k = inverse_transform(&hat)?;
    GridFunction::from_real(*spec, k.real_parts())
}

const M_TABLE_STEP: f64 = 1.0 / 64.0;
const M_TABLE_MAX: f64 = 2.0 * PHI_TABLE_CUTOFF + 4.0;
const PHI_TABLE_STEP: f64 = 1.0 / 128.0;
/// `phi_0^vee` is treated as zero beyond this radius.
pub const PHI_TABLE_CUTOFF: f64 = 64.0;
const STENCIL: usize = 8;

/// Uniform table with 8-point Lagrange interpolation.
#[derive(Debug)]
struct Table {
    step: f64,
    values: Vec<f64>,
}

impl Table {
    fn build(step: f64, max: f64, f: impl Fn(f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let n = (max / step).round() as usize;
        let values = (0..=n + STENCIL).into_par_iter().map(|i| f(i as f64 * step)).collect();
        Self { step, values }
    }

    /// Interpolates an even function; arguments are folded to `|t|`.
    fn eval(&self, t: f64) -> f64 {
        let u = t.abs() / self.step;
        let i = u.floor() as isize;
        let start = i - (STENCIL as isize / 2 - 1);
        let mut total = 0.0;
        for a in 0..STENCIL as isize {
            let node = start + a;
            let mut w = 1.0;
            for b in 0..STENCIL as isize {
                if b != a {
                    w *= (u - (start + b) as f64) / (a - b) as f64;
                }
            }
            total += w * self.value(node);
        }
        total
    }

    fn value(&self, node: isize) -> f64 {
        // even extension across the origin
        self.values[node.unsigned_abs()]
    }
}

/// Radial profiles of `m` and of `phi_0^vee` in one dimension, tabulated once.
#[derive(Debug)]
struct FunkHeckeTables {
    d: usize,
    phi0_vee: Table,
}

impl FunkHeckeTables {
    fn get(d: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FunkHeckeTables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&d) {
            return Ok(t.clone());
        }
        let built = Arc::new(Self::build(d)?);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard.entry(d).or_insert(built).clone())
    }

    fn build(d: usize) -> Result<Self> {
        let m = SurfaceMultiplier::new(d)?;
        let m_table = Table::build(M_TABLE_STEP, M_TABLE_MAX, |t| m.eval(t));
        let area = sphere_area(d);
        let rule = GaussLegendre::new(16);
        let power = (d - 1) as i32;
        let phi0_vee = Table::build(PHI_TABLE_STEP, PHI_TABLE_CUTOFF, |rho| {
            // phi_0^vee(rho) = |S^{d-1}| int_0^2 phi_0(s) s^{d-1} m(rho s) ds
            let panels = (4.0 * rho).ceil() as usize + 4;
            let inner = rule.integrate_composite(0.0, 1.0, panels, |s| s.powi(power) * m_table.eval(rho * s));
            let outer =
                rule.integrate_composite(1.0, 2.0, panels, |s| phi0(s) * s.powi(power) * m_table.eval(rho * s));
            area * (inner + outer)
        });
        Ok(Self { d, phi0_vee })
    }

    fn phi0_vee(&self, rho: f64) -> f64 {
        if rho > PHI_TABLE_CUTOFF {
            0.0
        } else {
            self.phi0_vee.eval(rho)
        }
    }

    /// `phi_l^vee(rho) = 2^{ld} Phi_0(2^l rho) - 2^{(l-1)d} Phi_0(2^{l-1} rho)`.
    fn phi_vee(&self, l: DyadicIndex, rho: f64) -> f64 {
        let d = self.d as i32;
        if l.0 == 0 {
            return self.phi0_vee(rho);
        }
        let k = (l.0 as f64).exp2();
        k.powi(d) * self.phi0_vee(k * rho) - (0.5 * k).powi(d) * self.phi0_vee(0.5 * k * rho)
    }
}

/// Radial profile of `phi_l^vee` in dimension `d`.
pub fn bump_kernel(l: DyadicIndex, d: usize, rho: f64) -> Result<f64> {
    Ok(FunkHeckeTables::get(d)?.phi_vee(l, rho))
}

/// `m_l^vee` at radius `x_norm`, from the sphere convolution
/// `c_d int_0^pi phi_l^vee(sqrt(|x|^2 + 1 - 2|x| cos t)) sin^{d-2} t dt`.
pub fn funk_hecke_kernel(l: DyadicIndex, d: usize, x_norm: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::UnsupportedDimension { dim: d, reason: "Funk-Hecke kernel needs d >= 3" });
    }
    let tables = FunkHeckeTables::get(d)?;
    let r = x_norm.abs();
    let c = 1.0 / sine_power_integral(d - 2);
    let power = (d - 2) as i32;
    // phi_l^vee vanishes beyond this radius
    let reach = PHI_TABLE_CUTOFF / (l.0.max(1) as f64 - 1.0).exp2();
    let cos_min = if r == 0.0 { -1.0 } else { (r * r + 1.0 - reach * reach) / (2.0 * r) };
    if cos_min >= 1.0 {
        return Ok(0.0);
    }
    let theta_max = cos_min.max(-1.0).acos();
    let scale = (l.0 as f64).exp2();
    let panels = (4.0 * scale * theta_max).ceil() as usize + 4;
    let rule = GaussLegendre::new(16);
    let integral = rule.integrate_composite(0.0, theta_max, panels, |t| {
        let rho2 = (r * r + 1.0 - 2.0 * r * t.cos()).max(0.0);
        tables.phi_vee(l, rho2.sqrt()) * t.sin().powi(power)
    });
    Ok(c * integral)
}

/// Decreasing radial majorant `Omega(s) = max_{|x| >= s} |k(x)|` of a kernel.
#[derive(Clone, Debug)]
pub struct RadialMajorant {
    radii: Vec<f64>,
    values: Vec<f64>,
    l1_norm: f64,
    profile: RadialProfile,
}

impl RadialMajorant {
    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `int_{R^d} Omega(|x|) dx`.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Node radii (increasing) and the majorant on `(r_{i-1}, r_i]`.
    pub fn steps(&self) -> (&[f64], &[f64]) {
        (&self.radii, &self.values)
    }
}

pub fn radial_majorant(k: &GridFunction) -> Result<RadialMajorant> {
    k.require(Domain::Physical)?;
    let spec = *k.spec();
    let d = spec.dim();
    let mut pairs: Vec<(f64, f64)> = (0..spec.len())
        .map(|flat| {
            let r = spec.node(flat).iter().map(|x| x * x).sum::<f64>().sqrt();
            (r, k.values()[flat].norm())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut radii: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (r, v) in pairs {
        match radii.last() {
            Some(&last) if last == r => {
                let top = values.last_mut().unwrap();
                *top = top.max(v);
            }
            _ => {
                radii.push(r);
                values.push(v);
            }
        }
    }
    // running max from the outside in
    for i in (0..values.len().saturating_sub(1)).rev() {
        values[i] = values[i].max(values[i + 1]);
    }
    let ball = sphere_area(d) / d as f64;
    let mut l1 = 0.0;
    let mut prev = 0.0f64;
    for (r, v) in radii.iter().zip(&values) {
        l1 += v * ball * (r.powi(d as i32) - prev.powi(d as i32));
        prev = *r;
    }
    let (rr, vv) = (radii.clone(), values.clone());
    let outer = *radii.last().unwrap_or(&0.0);
    let bound = values.first().copied().unwrap_or(0.0);
    let profile = RadialProfile::new("Omega", (0.0, outer), Some(bound), move |s| {
        let i = rr.partition_point(|&r| r < s);
        vv.get(i).copied().unwrap_or(0.0)
    });
    Ok(RadialMajorant { radii, values, l1_norm: l1, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::multiplier::bump::{bump, dyadic_piece};
    use approx::assert_relative_eq;

    #[test]
    fn bump_kernel_is_real_even_and_normalized() {
        let spec = make_grid(2, 4.0, 32).unwrap();
        let k = kernel(&bump(DyadicIndex(0)), &spec).unwrap();
        let vals = k.real_parts();
        let total: f64 = vals.iter().sum::<f64>() * spec.cell_volume();
        assert!((total - 1.0).abs() < 1e-8);
        let n = 32;
        for i in 0..n {
            for j in 0..n {
                assert!((vals[i * n + j] - vals[(n - 1 - i) * n + (n - 1 - j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn aliasing_guard() {
        let spec = make_grid(3, 2.0, 16).unwrap();
        // extent 2 < 4
        assert!(matches!(kernel(&bump(DyadicIndex(1)), &spec), Err(Error::Aliasing { .. })));
        assert!(kernel(&RadialProfile::constant(1.0), &spec).is_err());
    }

    #[test]
    fn dilation_of_kernel() {
        let spec = make_grid(2, 8.0, 64).unwrap();
        let half = make_grid(2, 4.0, 64).unwrap();
        let phi = bump(DyadicIndex(0));
        let k2 = kernel(&phi.dilate(2.0), &spec).unwrap();
        let k = kernel(&phi, &half).unwrap();
        for (a, b) in k2.real_parts().iter().zip(k.real_parts()) {
            assert!((a - 0.25 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi0_transform_at_origin_is_volume_integral() {
        // phi_0^vee(0) = |S^2| int_0^2 phi_0(s) s^2 ds
        let area = sphere_area(3);
        let rule = GaussLegendre::new(64);
        let exact = area * (1.0 / 3.0 + rule.integrate_composite(1.0, 2.0, 16, |s| phi0(s) * s * s));
        assert_relative_eq!(bump_kernel(DyadicIndex(0), 3, 0.0).unwrap(), exact, max_relative = 1e-10);
    }

    #[test]
    fn funk_hecke_matches_fft() {
        let spec = make_grid(3, 4.0, 128).unwrap();
        let piece = dyadic_piece(3, DyadicIndex(1)).unwrap();
        let k = kernel(&piece, &spec).unwrap();
        let vals = k.real_parts();
        for flat in [spec.flatten(&[64, 64, 64]), spec.flatten(&[64, 64, 72]), spec.flatten(&[60, 70, 75])] {
            let r = spec.node(flat).iter().map(|x| x * x).sum::<f64>().sqrt();
            let fh = funk_hecke_kernel(DyadicIndex(1), 3, r).unwrap();
            assert!((vals[flat] - fh).abs() <= 1e-3 * fh.abs(), "r={r}: {} vs {fh}", vals[flat]);
        }
    }

    #[test]
    fn majorant_dominates() {
        let spec = make_grid(2, 4.0, 32).unwrap();
        let k = kernel(&bump(DyadicIndex(0)), &spec).unwrap();
        let maj = radial_majorant(&k).unwrap();
        let (radii, values) = maj.steps();
        assert!(values.windows(2).all(|w| w[0] >= w[1]));
        for flat in 0..spec.len() {
            let r = spec.node(flat).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(maj.profile().eval(r) >= k.values()[flat].norm());
        }
        assert!(maj.l1_norm().is_finite() && maj.l1_norm() >= 1.0);
        assert_eq!(radii.len(), values.len());
    }
}
