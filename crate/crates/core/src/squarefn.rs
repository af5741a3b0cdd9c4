//! Square functions `g_omega(f)(x) = (int_0^inf |(f^ omega(t .))^vee(x)|^2 dt/t)^{1/2}`
//! for annulus-supported profiles.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, GridFunction, GridSpec, VectorField};
use crate::multiplier::{multiply_shells, FrequencyShells, RadialProfile};
use crate::norms::{lq_pointwise, lp_norm, Exponent};

/// Default number of `t` nodes falling inside one annulus `[a, b)`.
pub const DEFAULT_NODES_PER_ANNULUS: usize = 32;

/// Log-uniform `t` nodes with `dt/t` weights.
///
/// The spacing in `u = ln t` is `ln(b/a)/M`, with nodes at cell midpoints
/// covering `[a/s_max, b/s_min]`, where `[s_min, s_max]` is the range of
/// nonzero frequency radii of the grid. Every nonzero frequency then sees
/// exactly `M` nodes with `t |xi| in [a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TGrid {
    nodes: Vec<f64>,
    du: f64,
    start: f64,
}

impl TGrid {
    pub fn new(support: (f64, f64), spec: &GridSpec, nodes_per_annulus: usize) -> Result<Self> {
        let (a, b) = support;
        if !(a > 0.0 && b.is_finite() && b > a) {
            return Err(Error::NotAnnular(format!("[{a}, {b}]")));
        }
        if nodes_per_annulus == 0 {
            return Err(Error::InvalidArgument("need at least one node per annulus".into()));
        }
        let s_min = spec.frequency_step();
        let s_max = (spec.dim() as f64).sqrt() * spec.frequency_extent();
        let du = (b / a).ln() / nodes_per_annulus as f64;
        let start = (a / s_max).ln();
        let end = (b / s_min).ln();
        let count = ((end - start) / du).ceil() as usize;
        let nodes = (0..count).map(|j| (start + (j as f64 + 0.5) * du).exp()).collect();
        Ok(Self { nodes, du, start })
    }

    /// Grid adapted to the support of `omega` on `spec`.
    pub fn for_profile(omega: &RadialProfile, spec: &GridSpec, nodes_per_annulus: usize) -> Result<Self> {
        if !omega.is_annular() {
            return Err(Error::NotAnnular(omega.name().to_string()));
        }
        Self::new(omega.support(), spec, nodes_per_annulus)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `dt/t` weight of every node.
    pub fn weight(&self) -> f64 {
        self.du
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Endpoints of the covered `t` range.
    pub fn range(&self) -> (f64, f64) {
        (self.start.exp(), (self.start + self.du * self.nodes.len() as f64).exp())
    }

    pub fn total_weight(&self) -> f64 {
        self.du * self.nodes.len() as f64
    }
}

/// `g_omega(f)` on the grid of `f`.
pub fn square_function(f: &GridFunction, omega: &RadialProfile, t: &TGrid) -> Result<GridFunction> {
    if !omega.is_annular() {
        return Err(Error::NotAnnular(omega.name().to_string()));
    }
    let shells = FrequencyShells::new(f.spec());
    let hat = forward_transform(f)?;
    let real = f.values().iter().all(|v| v.im == 0.0);
    let mut acc = vec![0.0f64; f.len()];
    for &tj in t.nodes() {
        let weights = shells.sample(omega, tj);
        if weights.iter().all(|w| *w == 0.0) {
            continue;
        }
        let g = multiply_shells(&hat, &shells, &weights, real)?;
        acc.par_iter_mut().zip(g.values().par_iter()).for_each(|(a, v)| *a += v.norm_sqr());
    }
    let du = t.weight();
    GridFunction::from_real(*f.spec(), acc.into_iter().map(|s| (s * du).sqrt()).collect())
}

/// Both sides of the vector-valued annulus bound
/// `||(sum_n g(f_n)^2)^{1/2}||_2 <= C sqrt(ln rho) ||(sum_n |f_n|^2)^{1/2}||_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prop2Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Prop2Sides {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + tol)
    }
}

pub fn prop2_check(field: &VectorField, omega: &RadialProfile, t: &TGrid) -> Result<Prop2Sides> {
    if !omega.is_annular() {
        return Err(Error::NotAnnular(omega.name().to_string()));
    }
    let c = omega.sup_bound().ok_or_else(|| Error::MissingBound(omega.name().to_string()))?;
    let (a, b) = omega.support();
    let two = Exponent::Finite(2.0);
    let g = field.map(|f| square_function(f, omega, t))?;
    let lhs = lp_norm(&lq_pointwise(&g, two)?, two)?;
    let rhs = c * (b / a).ln().sqrt() * lp_norm(&lq_pointwise(field, two)?, two)?;
    Ok(Prop2Sides { lhs, rhs })
}
