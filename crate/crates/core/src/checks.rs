//! Quick property suite behind the `check` command.

use std::f64::consts::PI;

use crate::error::Result;
use crate::euclidean_max::{ball_average_at, hl_maximal, RadiiSet};
use crate::grid::{forward_transform, inverse_transform, make_grid, sample, GridFunction, VectorField};
use crate::grushin::{grushin_maximal, iterated_maximal, koranyi_distance, GrushinFunction, GrushinGrid, GrushinPoint};
use crate::multiplier::{phi, spherical_maximal, DyadicIndex, RadialProfile, SurfaceMultiplier};
use crate::norms::{mixed_norm, Exponent};
use crate::rotations::{dimension_split, haar_rotation, sphere_identity_check, DescentSplit};
use crate::squarefn::{prop2_check, square_function, TGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn hl_brute_force() -> Result<CheckOutcome> {
    let spec = make_grid(2, 2.0, 8)?;
    let vals: Vec<f64> = (0..spec.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
    let f = GridFunction::from_real(spec, vals)?;
    let radii = RadiiSet::new(vec![0.5, 0.75, 1.2, 2.0])?;
    let m = hl_maximal(&f, &radii)?.real_parts();
    let mut worst = 0.0f64;
    for (i, &got) in m.iter().enumerate() {
        let mut best = f.values()[i].norm();
        for &r in radii.radii() {
            best = best.max(ball_average_at(&f, i, r)?);
        }
        worst = worst.max((got - best).abs());
    }
    Ok(outcome("hl_brute_force", worst == 0.0, format!("max deviation {worst:e}")))
}

fn constants() -> Result<CheckOutcome> {
    let spec = make_grid(2, 4.0, 16)?;
    let one = GridFunction::constant(spec, 1.0);
    let radii = RadiiSet::geometric(0.5, 1.0, 3)?;
    let hl = hl_maximal(&one, &radii)?.real_parts();
    let sph = spherical_maximal(&one, 2, &radii)?.real_parts();
    let interior: Vec<usize> = (0..spec.len()).filter(|&i| spec.is_interior(i, 1.5)).collect();
    let hl_dev = interior.iter().map(|&i| (hl[i] - 1.0).abs()).fold(0.0, f64::max);
    let sph_dev = sph.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    Ok(outcome("constants_fixed", hl_dev <= 1e-10 && sph_dev <= 1e-3, format!("HL {hl_dev:e}, SPH {sph_dev:e}")))
}

fn multiplier_values() -> CheckOutcome {
    let m = SurfaceMultiplier::new(3).expect("d = 3");
    let mut worst = (m.eval(0.0) - 1.0).abs();
    for i in 1..=10 {
        let s = 0.37 * i as f64;
        let w = 2.0 * PI * s;
        worst = worst.max((m.eval(s) - w.sin() / w).abs());
    }
    let mut pou = 0.0f64;
    for i in 0..=2000 {
        let s = 64.0 * i as f64 / 2000.0;
        let total: f64 = (0..=6).map(|l| phi(DyadicIndex(l), s)).sum();
        pou = pou.max((total - 1.0).abs());
    }
    outcome("multiplier_values", worst <= 1e-10 && pou <= 1e-12, format!("closed form {worst:e}, partition {pou:e}"))
}

fn transform_roundtrip() -> Result<CheckOutcome> {
    let spec = make_grid(3, 3.0, 16)?;
    let f = sample(&spec, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + 0.5 * x[2] * x[2])).exp() * (1.0 + x[0]))?;
    let back = inverse_transform(&forward_transform(&f)?)?;
    let dev = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(outcome("fourier_roundtrip", dev <= 1e-12, format!("max deviation {dev:e}")))
}

fn square_function_equality() -> Result<CheckOutcome> {
    let spec = make_grid(2, 4.0, 32)?;
    let f = sample(&spec, |x| x[0] * (-PI * (x[0] * x[0] + x[1] * x[1])).exp())?;
    let omega = RadialProfile::sharp_annulus(1.0, 0.5, 4.0);
    let t = TGrid::for_profile(&omega, &spec, 32)?;
    let g = square_function(&f, &omega, &t)?;
    let rel = (g.l2_norm() / (4f64.ln().sqrt() * f.l2_norm()) - 1.0).abs();
    let field = VectorField::new(vec![f.clone(), sample(&spec, |x| (-(x[0] - 1.0).powi(2) - x[1] * x[1]).exp())?])?;
    let sides = prop2_check(&field, &omega, &t)?;
    Ok(outcome(
        "square_function",
        rel <= 1e-3 && sides.holds(1e-2),
        format!("equality {rel:e}, bound {} <= {}", sides.lhs, sides.rhs),
    ))
}

fn rotations() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        worst = worst.max(haar_rotation(5, seed)?.orthogonality_defect());
    }
    let split = DescentSplit::new(4, 3)?;
    let moment = sphere_identity_check(|x| x[0] * x[0], &split, 4096, 1)?;
    let e = |p| Exponent::Finite(p);
    let dp = dimension_split(e(1.25), e(3.0))?;
    Ok(outcome(
        "rotations",
        worst <= 1e-10 && moment.agrees(3.0, 0.0) && dp == 6,
        format!("defect {worst:e}, moments {} vs {} (se {:e}), d'={dp}", moment.lhs, moment.rhs, moment.stderr),
    ))
}

fn mixed_norms() -> Result<CheckOutcome> {
    let spec = make_grid(1, 2.0, 8)?;
    let a = GridFunction::from_real(spec, (0..8).map(|i| i as f64 - 3.0).collect())?;
    let b = GridFunction::from_real(spec, (0..8).map(|i| (i % 3) as f64).collect())?;
    let field = VectorField::new(vec![a.clone(), b.clone()])?;
    let got = mixed_norm(&field, Exponent::Finite(2.0), Exponent::Finite(2.0))?;
    let naive = (a.real_parts().iter().zip(b.real_parts()).map(|(x, y)| x * x + y * y).sum::<f64>() * spec.h()).sqrt();
    let rel = (got / naive - 1.0).abs();
    Ok(outcome("mixed_norm", rel <= 1e-12, format!("relative {rel:e}")))
}

fn grushin() -> Result<CheckOutcome> {
    let o = GrushinPoint::origin(2);
    let p = GrushinPoint::new(vec![0.6, -0.8], 0.0)?;
    let q = GrushinPoint::new(vec![0.0, 0.0], 2.0)?;
    let exact = koranyi_distance(&o, &p)? == 1.0 && koranyi_distance(&o, &q)? == 2.0 && koranyi_distance(&p, &p)? == 0.0;
    let grid = GrushinGrid::new(1, 2.0, 2.0, 8, 8)?;
    let f = GrushinFunction::sample(&grid, |x, u| (-x[0] * x[0] - u * u).exp())?;
    let radii = RadiiSet::geometric(0.5, 4.0, 6)?;
    let mk = grushin_maximal(&f, &radii)?;
    let it = iterated_maximal(&f, &radii, &radii)?;
    let dominates = mk.values().iter().zip(f.values()).all(|(m, v)| m >= v);
    let finite = it.values().iter().all(|v| v.is_finite());
    Ok(outcome("grushin", exact && dominates && finite, format!("identities {exact}, M_K >= |f| {dominates}")))
}

/// Runs every quick check.
pub fn run_checks() -> Vec<CheckOutcome> {
    let fallible: [(&'static str, fn() -> Result<CheckOutcome>); 7] = [
        ("hl_brute_force", hl_brute_force),
        ("constants_fixed", constants),
        ("fourier_roundtrip", transform_roundtrip),
        ("square_function", square_function_equality),
        ("rotations", rotations),
        ("mixed_norm", mixed_norms),
        ("grushin", grushin),
    ];
    let mut out = vec![multiplier_values()];
    for (name, check) in fallible {
        out.push(check().unwrap_or_else(|e| outcome(name, false, format!("error: {e}"))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_quick_checks_pass() {
        for c in run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
