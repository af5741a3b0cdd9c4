//! `L^p`, pointwise `l^q` and mixed `L^p(l^q)` norms on grid data.
//!
//! All reductions go through [`pairwise_sum`], whose split points depend only
//! on the input length, so results are reproducible bit-for-bit regardless of
//! thread count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction, VectorField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p > 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(p) => *p,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Dual exponent `p/(p-1)`.
    pub fn conjugate(&self) -> f64 {
        match self {
            Self::Finite(p) => p / (p - 1.0),
            Self::Infinity => 1.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Self::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse exponent `{s}`")))?;
        Self::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(p) => s.serialize_f64(*p),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (tree) summation with fixed split points.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    if xs.len() >= 1 << 16 {
        let (a, b) = rayon::join(|| pairwise_sum(&xs[..mid]), || pairwise_sum(&xs[mid..]));
        a + b
    } else {
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub(crate) fn lp_of_moduli(moduli: &[f64], p: Exponent, cell: f64) -> f64 {
    match p {
        Exponent::Infinity => moduli.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let scale = moduli.iter().copied().fold(0.0, f64::max);
            if scale == 0.0 {
                return 0.0;
            }
            let powered: Vec<f64> = moduli.iter().map(|&v| (v / scale).powf(p)).collect();
            scale * (pairwise_sum(&powered) * cell).powf(1.0 / p)
        }
    }
}

/// `(sum_i |f_i|^p h^d)^{1/p}`, or `max |f_i|` for `p = inf`.
pub fn lp_norm(f: &GridFunction, p: Exponent) -> Result<f64> {
    f.require(Domain::Physical)?;
    Ok(lp_of_moduli(&f.abs_values(), p, f.spec().cell_volume()))
}

/// Node-wise `(sum_n |f_n(x)|^q)^{1/q}`.
pub fn lq_pointwise(field: &VectorField, q: Exponent) -> Result<GridFunction> {
    let members = field.members();
    let first = members.first().ok_or(Error::EmptyField)?;
    first.require(Domain::Physical)?;
    let moduli: Vec<Vec<f64>> = members.iter().map(|m| m.abs_values()).collect();
    Ok(GridFunction::from_real_unchecked(*field.spec(), lq_of_moduli(&moduli, q)))
}

/// Node-wise `l^q` norm across equally long columns of moduli.
pub(crate) fn lq_of_moduli(moduli: &[Vec<f64>], q: Exponent) -> Vec<f64> {
    let len = moduli.first().map_or(0, |m| m.len());
    let mut column = vec![0.0; moduli.len()];
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        for (c, m) in column.iter_mut().zip(moduli) {
            *c = m[i];
        }
        out.push(match q {
            Exponent::Infinity => column.iter().copied().fold(0.0, f64::max),
            Exponent::Finite(q) => {
                let scale = column.iter().copied().fold(0.0, f64::max);
                if scale == 0.0 {
                    0.0
                } else {
                    let s: f64 = column.iter().map(|&v| (v / scale).powf(q)).sum();
                    scale * s.powf(1.0 / q)
                }
            }
        });
    }
    out
}

/// `lp_norm(lq_pointwise(F, q), p)`.
pub fn mixed_norm(field: &VectorField, p: Exponent, q: Exponent) -> Result<f64> {
    lp_norm(&lq_pointwise(field, q)?, p)
}

/// `h^d * #{nodes : |g| > lambda}`.
pub fn level_measure(g: &GridFunction, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLevel(lambda));
    }
    g.require(Domain::Physical)?;
    let count = g.values().iter().filter(|v| v.norm() > lambda).count();
    Ok(count as f64 * g.spec().cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use approx::assert_relative_eq;

    fn two() -> Exponent {
        Exponent::new(2.0).unwrap()
    }

    #[test]
    fn exponent_parsing() {
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert_eq!(Exponent::Infinity.to_string(), "inf");
        assert_eq!(Exponent::Finite(3.0).to_string(), "3");
        let e: Vec<Exponent> = serde_json::from_str(r#"[2, "inf", 1.5]"#).unwrap();
        assert_eq!(e, vec![Exponent::Finite(2.0), Exponent::Infinity, Exponent::Finite(1.5)]);
    }

    #[test]
    fn constant_norms() {
        let spec = make_grid(2, 1.0, 8).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        assert_relative_eq!(lp_norm(&one, two()).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(lp_norm(&one, Exponent::Infinity).unwrap(), 1.0);
    }

    #[test]
    fn pointwise_scaling() {
        let spec = make_grid(1, 1.0, 8).unwrap();
        let f = sample(&spec, |x| x[0] - 0.3).unwrap();
        let single = lq_pointwise(&VectorField::new(vec![f.clone()]).unwrap(), two()).unwrap();
        assert_eq!(single.real_parts(), f.abs_values());
        let pair = lq_pointwise(&VectorField::new(vec![f.clone(), f.clone()]).unwrap(), two()).unwrap();
        for (a, b) in pair.real_parts().iter().zip(f.abs_values()) {
            assert_relative_eq!(*a, 2f64.sqrt() * b, max_relative = 1e-15);
        }
    }

    #[test]
    fn level_sets() {
        let spec = make_grid(2, 1.5, 6).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        assert_relative_eq!(level_measure(&one, 0.5).unwrap(), 9.0, max_relative = 1e-15);
        assert_eq!(level_measure(&one, 2.0).unwrap(), 0.0);
        assert!(level_measure(&one, 0.0).is_err());
        let boxed = sample(&spec, |x| if x[0].abs() < 1.0 && x[1].abs() < 0.5 { 1.0 } else { 0.0 }).unwrap();
        // nodes at +-0.25, +-0.75: 4 x 2 cells of area 0.25
        assert_relative_eq!(level_measure(&boxed, 0.5).unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn pairwise_matches_naive_on_exact_data() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i % 17) as f64 * 0.25).collect();
        assert_eq!(pairwise_sum(&xs), xs.iter().sum::<f64>());
    }

    #[test]
    fn frequency_data_rejected() {
        let spec = make_grid(1, 1.0, 4).unwrap();
        let hat = crate::grid::forward_transform(&GridFunction::constant(spec, 1.0)).unwrap();
        assert!(lp_norm(&hat, two()).is_err());
    }
}
