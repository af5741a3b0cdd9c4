use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::Exponent;

/// Operator applied member-wise by a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "HL")]
    Hl,
    #[serde(rename = "HL_weighted")]
    HlWeighted,
    #[serde(rename = "SPH")]
    Sph,
    #[serde(rename = "MULT_L")]
    MultL,
    #[serde(rename = "SQFN")]
    Sqfn,
    #[serde(rename = "DESCENT")]
    Descent,
    #[serde(rename = "MK")]
    Mk,
    #[serde(rename = "MK_iter")]
    MkIter,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Hl,
        Operator::HlWeighted,
        Operator::Sph,
        Operator::MultL,
        Operator::Sqfn,
        Operator::Descent,
        Operator::Mk,
        Operator::MkIter,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Hl => "HL",
            Self::HlWeighted => "HL_weighted",
            Self::Sph => "SPH",
            Self::MultL => "MULT_L",
            Self::Sqfn => "SQFN",
            Self::Descent => "DESCENT",
            Self::Mk => "MK",
            Self::MkIter => "MK_iter",
        }
    }

    /// Operators acting on `R^d_x x R_u`.
    pub fn is_grushin(&self) -> bool {
        matches!(self, Self::Mk | Self::MkIter)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown operator {s:?}")))
    }
}

/// Test-function family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    BallIndicator,
    RemarkBump,
    RandomBumps,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::BallIndicator => "ball_indicator",
            Self::RemarkBump => "remark_bump",
            Self::RandomBumps => "random_bumps",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Gaussian, Self::BallIndicator, Self::RemarkBump, Self::RandomBumps]
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown family {s:?}")))
    }
}

/// Sweep configuration; JSON keys are the field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub operator: Operator,
    pub d_range: Vec<usize>,
    pub p_list: Vec<Exponent>,
    pub q_list: Vec<Exponent>,
    pub family: Family,
    pub n_members: usize,
    /// `(L, N)`; per-dimension defaults when absent.
    pub grid: Option<(f64, usize)>,
    #[serde(rename = "radii_K")]
    pub radii_k: usize,
    pub seed: u64,
    /// Dyadic index for `MULT_L` and `SQFN`.
    pub l: u32,
    /// Weight exponent for `HL_weighted`.
    pub k: u32,
    /// Plane dimension for `DESCENT`.
    pub d_prime: usize,
    /// Haar samples for `DESCENT`.
    pub n_mc: usize,
    /// `t` nodes per annulus for `SQFN`.
    pub nodes_per_annulus: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            operator: Operator::Hl,
            d_range: vec![1, 2, 3],
            p_list: vec![Exponent::Finite(2.0)],
            q_list: vec![Exponent::Finite(2.0)],
            family: Family::Gaussian,
            n_members: 4,
            grid: None,
            radii_k: 32,
            seed: 0,
            l: 1,
            k: 1,
            d_prime: 3,
            n_mc: 16,
            nodes_per_annulus: 32,
        }
    }
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.d_range.is_empty() || self.d_range.contains(&0) {
            return fail("d_range must be a nonempty list of positive dimensions");
        }
        if self.p_list.is_empty() || self.q_list.is_empty() {
            return fail("p_list and q_list must be nonempty");
        }
        if self.n_members == 0 {
            return fail("n_members must be positive");
        }
        if self.radii_k == 0 {
            return fail("radii_K must be positive");
        }
        if self.n_mc == 0 || self.nodes_per_annulus == 0 {
            return fail("n_mc and nodes_per_annulus must be positive");
        }
        if let Some((l, n)) = self.grid {
            if !(l > 0.0 && l.is_finite()) || n < 4 || n % 2 == 1 {
                return fail("grid must be (L > 0, even N >= 4)");
            }
        }
        Ok(())
    }

    /// `(L, N)` used for dimension `d`.
    pub fn grid_for(&self, d: usize) -> (f64, usize) {
        self.grid.unwrap_or_else(|| default_grid(self.operator, d))
    }

    /// All `(p, q)` pairs of the sweep.
    pub fn exponent_pairs(&self) -> Vec<(Exponent, Exponent)> {
        self.p_list.iter().flat_map(|&p| self.q_list.iter().map(move |&q| (p, q))).collect()
    }
}

/// `L = 4` with `N = 32` up to `d = 3`, 16 for `d = 4, 5` and 8 beyond.
/// Grushin operators count `d + 1` axes.
pub fn default_grid(op: Operator, d: usize) -> (f64, usize) {
    let axes = if op.is_grushin() { d + 1 } else { d };
    let n = match axes {
        0..=3 => 32,
        4 | 5 => 16,
        _ => 8,
    };
    let n = if op.is_grushin() { n.min(16) } else { n };
    (4.0, n)
}

/// Parses `"1,2,3"` or `"1..5"` (inclusive).
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("invalid dimension list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

/// Parses `"2,3,inf"`.
pub fn parse_exponents(s: &str) -> Result<Vec<Exponent>> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

/// Parses `"L,N"`.
pub fn parse_grid(s: &str) -> Result<(f64, usize)> {
    let bad = || Error::Config(format!("invalid grid {s:?}, expected L,N"));
    let (l, n) = s.split_once(',').ok_or_else(bad)?;
    Ok((l.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_defaults() {
        let cfg = ScanConfig::from_json(r#"{"operator":"MK_iter","d_range":[1,2],"p_list":[2,"inf"],"radii_K":8}"#).unwrap();
        assert_eq!(cfg.operator, Operator::MkIter);
        assert_eq!(cfg.p_list, vec![Exponent::Finite(2.0), Exponent::Infinity]);
        assert_eq!(cfg.radii_k, 8);
        assert_eq!(cfg.family, Family::Gaussian);
        let back = ScanConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ScanConfig::from_json(r#"{"bogus":1}"#).is_err());
        assert!(ScanConfig::from_json(r#"{"d_range":[]}"#).is_err());
        assert!(ScanConfig::from_json(r#"{"p_list":[1]}"#).is_err());
    }

    #[test]
    fn parsing_helpers() {
        assert_eq!(parse_dims("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_dims("2, 5").unwrap(), vec![2, 5]);
        assert!(parse_dims("x").is_err());
        assert_eq!(parse_grid("4,32").unwrap(), (4.0, 32));
        assert_eq!(parse_exponents("2,inf").unwrap(), vec![Exponent::Finite(2.0), Exponent::Infinity]);
        assert_eq!("mk_iter".parse::<Operator>().unwrap(), Operator::MkIter);
        assert_eq!(default_grid(Operator::Hl, 5), (4.0, 16));
        assert_eq!(default_grid(Operator::Hl, 6), (4.0, 8));
    }
}
