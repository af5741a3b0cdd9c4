use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{chebyshev_nodes, sine_power_integral, GaussLegendre};

use super::profile::RadialProfile;

const START_NODES: usize = 64;
const MAX_NODES: usize = 1 << 17;
const STATIONARY: f64 = 1e-10;

/// Fourier transform of the normalized surface measure on `S^{d-1}`,
///
/// `m(s) = c_d int_0^pi cos(2 pi s cos t) sin^{d-2}(t) dt`, `m(0) = 1`,
///
/// evaluated by Gauss–Legendre in `t` (Gauss–Chebyshev in `cos t` when
/// `d = 2`) with node doubling until two successive values agree. For
/// `d = 1` the measure sits on `{-1, 1}` and `m(s) = cos(2 pi s)`.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceMultiplier {
    d: usize,
    c: f64,
}

impl SurfaceMultiplier {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            0 => Err(Error::UnsupportedDimension { dim: d, reason: "sphere multiplier needs d >= 1" }),
            1 => Ok(Self { d, c: 1.0 }),
            _ => Ok(Self { d, c: 1.0 / sine_power_integral(d - 2) }),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Normalizing constant `1 / int_0^pi sin^{d-2}` (1 when `d = 1`).
    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        let w = 2.0 * PI * s;
        if self.d == 1 {
            return w.cos();
        }
        self.adaptive(|t| (w * t).cos())
    }

    /// `m'(s) = -2 pi c_d int cos t sin(2 pi s cos t) sin^{d-2} t dt`.
    pub fn derivative(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let w = 2.0 * PI * s;
        if self.d == 1 {
            return -2.0 * PI * w.sin();
        }
        -2.0 * PI * self.adaptive(|t| t * (w * t).sin())
    }

    /// `c_d int_0^pi g(cos t) sin^{d-2} t dt` for even `g`.
    fn adaptive<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let mut n = START_NODES;
        let mut prev = self.rule(&g, n);
        loop {
            n *= 2;
            let cur = self.rule(&g, n);
            if (cur - prev).abs() <= STATIONARY || n >= MAX_NODES {
                return cur;
            }
            prev = cur;
        }
    }

    fn rule<G: Fn(f64) -> f64>(&self, g: &G, n: usize) -> f64 {
        if self.d == 2 {
            let t = chebyshev_nodes(n);
            return t.iter().map(|&x| g(x)).sum::<f64>() / n as f64;
        }
        let power = (self.d - 2) as i32;
        // integrand is symmetric about pi/2
        let sum: f64 = GaussLegendre::new(n)
            .mapped(0.0, FRAC_PI_2)
            .map(|(t, w)| w * g(t.cos()) * t.sin().powi(power))
            .sum();
        2.0 * self.c * sum
    }
}

/// The sphere multiplier `m` as a profile on `[0, inf)` with bound 1.
pub fn surface_multiplier(d: usize) -> Result<RadialProfile> {
    let m = SurfaceMultiplier::new(d)?;
    Ok(RadialProfile::new(format!("m[d={d}]"), (0.0, f64::INFINITY), Some(1.0), move |s| m.eval(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_dimension_zero() {
        assert!(surface_multiplier(0).is_err());
    }

    #[test]
    fn line_case_is_cosine() {
        let m = SurfaceMultiplier::new(1).unwrap();
        assert_eq!(m.eval(0.25), (0.5 * PI).cos());
        assert_eq!(m.derivative(0.125), -2.0 * PI * (0.25 * PI).sin());
    }

    #[test]
    fn normalized_at_origin() {
        for d in 1..8 {
            let m = SurfaceMultiplier::new(d).unwrap();
            assert_eq!(m.eval(0.0), 1.0);
            assert!((m.eval(1e-9) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn three_dimensional_closed_form() {
        let m = SurfaceMultiplier::new(3).unwrap();
        for s in [0.25, 1.0, 3.7, 12.3, 40.0] {
            let w = 2.0 * PI * s;
            assert!((m.eval(s) - w.sin() / w).abs() < 1e-12, "s={s}");
            let dexact = (w * w.cos() - w.sin()) / (w * s);
            assert!((m.derivative(s) - dexact).abs() < 1e-11, "s={s}");
        }
    }

    #[test]
    fn planar_case_is_bessel_j0() {
        // J_0(2 pi s) at 2 pi s = 2.404825557695773 (first zero)
        let m = SurfaceMultiplier::new(2).unwrap();
        assert!(m.eval(2.404825557695773 / (2.0 * PI)).abs() < 1e-12);
        // J_0(1) = 0.7651976865579666
        assert_relative_eq!(m.eval(1.0 / (2.0 * PI)), 0.7651976865579666, max_relative = 1e-12);
    }

    #[test]
    fn five_dimensional_closed_form() {
        // m(s) = 3 (sin w - w cos w) / w^3
        let m = SurfaceMultiplier::new(5).unwrap();
        for s in [0.1, 0.9, 5.5] {
            let w = 2.0 * PI * s;
            let exact = 3.0 * (w.sin() - w * w.cos()) / w.powi(3);
            assert!((m.eval(s) - exact).abs() < 1e-12);
        }
    }
}
