//! Uniform cell-centered grids on `[-L, L]^d`, sampled functions and the
//! continuum-normalized discrete Fourier transform.
//!
//! Nodes sit at `x_j = -L + (j + 1/2) h` with `h = 2L/N`. Frequencies sit at
//! `xi_k = k / (2L)` for signed `k in [-N/2, N/2)`, stored in FFT order. The
//! forward transform approximates `f^(xi) = int f(x) e^{-2 pi i <x, xi>} dx`
//! and the inverse approximates the inverse integral, so that the pair is an
//! exact two-sided inverse and preserves the `L^2` norm exactly when the
//! frequency side is measured with cell volume `(2L)^{-d}`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    d: usize,
    half_width: f64,
    n: usize,
}

/// Builds a grid of `n` points per axis on `[-half_width, half_width]^d`.
pub fn make_grid(d: usize, half_width: f64, n: usize) -> Result<GridSpec> {
    GridSpec::new(d, half_width, n)
}

impl GridSpec {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidGrid(format!("dimension must be >= 1, got {d}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n}"
            )));
        }
        let total = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if total > (1u128 << 31) {
            return Err(Error::InvalidGrid(format!("{n}^{d} nodes exceed the supported size")));
        }
        Ok(Self { d, half_width, n })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of nodes, `N^d`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one physical cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Volume of one frequency cell, `(2L)^{-d}`.
    pub fn frequency_cell_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(-(self.d as i32))
    }

    /// Frequency spacing `1/(2L)`.
    pub fn frequency_step(&self) -> f64 {
        0.5 / self.half_width
    }

    /// Largest `|xi|` per axis, `N/(4L)`.
    pub fn frequency_extent(&self) -> f64 {
        self.n as f64 / (4.0 * self.half_width)
    }

    /// Coordinate of node `j` along any axis.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.h()
    }

    /// Signed frequency index of FFT slot `j`.
    #[inline]
    pub fn signed_index(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Multi-index of a flat index, last axis fastest.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.d).rev() {
            out[a] = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinates of the node with flat index `flat`.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.d];
        self.unflatten(flat, &mut idx);
        idx.iter().map(|&j| self.coord(j)).collect()
    }

    /// Squared integer frequency radius `sum k_a^2` of FFT slot `flat`.
    pub fn frequency_k2(&self, mut flat: usize) -> u64 {
        let mut k2 = 0u64;
        for _ in 0..self.d {
            let k = self.signed_index(flat % self.n);
            k2 += (k * k) as u64;
            flat /= self.n;
        }
        k2
    }

    /// Whether a node lies at distance at least `margin` from every face.
    pub fn is_interior(&self, flat: usize, margin: f64) -> bool {
        let mut f = flat;
        for _ in 0..self.d {
            let x = self.coord(f % self.n);
            if self.half_width - x.abs() < margin {
                return false;
            }
            f /= self.n;
        }
        true
    }

    pub(crate) fn same_as(&self, other: &GridSpec) -> bool {
        self.d == other.d && self.n == other.n && self.half_width == other.half_width
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Physical,
    Frequency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
    domain: Domain,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { spec, values, domain })
    }

    pub fn from_real(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(spec, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), Domain::Physical)
    }

    /// Real data known to be finite, e.g. operator output.
    pub(crate) fn from_real_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self {
            spec,
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            domain: Domain::Physical,
        }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self::from_real_unchecked(spec, vec![c; spec.len()])
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn require(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(Error::DomainMismatch { expected, found: self.domain });
        }
        Ok(())
    }

    /// Node-wise map preserving the grid and domain.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Result<Self> {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        Self::new(self.spec, values, self.domain)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| v * c).collect(),
            domain: self.domain,
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        if !self.spec.same_as(&other.spec) {
            return Err(Error::GridMismatch);
        }
        other.require(self.domain)?;
        Ok(Self {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            domain: self.domain,
        })
    }

    /// `L^2` norm under the measure of the current domain: `h^d` on the
    /// physical side, `(2L)^{-d}` on the frequency side.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.domain {
            Domain::Physical => self.spec.cell_volume(),
            Domain::Frequency => self.spec.frequency_cell_volume(),
        };
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        (crate::norms::pairwise_sum(&sq) * w).sqrt()
    }

    /// Largest modulus.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Samples `field` at every node. Non-finite samples are rejected.
pub fn sample<F>(spec: &GridSpec, field: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = spec.dim();
    let values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map_init(
            || (vec![0usize; d], vec![0.0; d]),
            |(idx, x), flat| {
                spec.unflatten(flat, idx);
                for a in 0..d {
                    x[a] = spec.coord(idx[a]);
                }
                field(x)
            },
        )
        .collect();
    GridFunction::from_real(*spec, values)
}

#[derive(Clone, Debug)]
pub struct VectorField {
    spec: GridSpec,
    members: Vec<GridFunction>,
}

impl VectorField {
    pub fn new(members: Vec<GridFunction>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyField)?;
        let spec = *first.spec();
        if members.iter().any(|m| !m.spec().same_as(&spec)) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { spec, members })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Applies `op` member-wise.
    pub fn map<F>(&self, op: F) -> Result<Self>
    where
        F: Fn(&GridFunction) -> Result<GridFunction>,
    {
        let members = self.members.iter().map(op).collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            spec: self.spec,
            members: self.members.iter().map(|m| m.scale(c)).collect(),
        }
    }
}

/// Phase `(-1)^k e^{-i pi k / N}` linking the DFT to the centered grid.
fn phase(k: i64, n: usize) -> Complex64 {
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::from_polar(sign, -PI * k as f64 / n as f64)
}

/// In-place unnormalized DFT along every axis.
fn fft_nd(values: &mut [Complex64], spec: &GridSpec, inverse: bool) {
    let n = spec.points_per_axis();
    let d = spec.dim();
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> =
        if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let total = values.len();
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            values.par_chunks_mut(n).for_each(|line| fft.process(line));
            continue;
        }
        let block = stride * n;
        values.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for offset in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[offset + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, slot) in line.iter().enumerate() {
                    chunk[offset + j * stride] = *slot;
                }
            }
        });
        debug_assert_eq!(total % block, 0);
    }
}

/// Per-node product of axis phases, conjugated when `conj`.
fn apply_phases(values: &mut [Complex64], spec: &GridSpec, scale: f64, conj: bool) {
    let n = spec.points_per_axis();
    let d = spec.dim();
    let table: Vec<Complex64> = (0..n)
        .map(|j| {
            let p = phase(spec.signed_index(j), n);
            if conj {
                p.conj()
            } else {
                p
            }
        })
        .collect();
    values.par_iter_mut().enumerate().for_each(|(flat, v)| {
        let mut f = flat;
        let mut ph = Complex64::new(scale, 0.0);
        for _ in 0..d {
            ph *= table[f % n];
            f /= n;
        }
        *v *= ph;
    });
}

/// Continuum-normalized forward transform of physical data.
pub fn forward_transform(f: &GridFunction) -> Result<GridFunction> {
    f.require(Domain::Physical)?;
    let spec = *f.spec();
    let mut values = f.values().to_vec();
    fft_nd(&mut values, &spec, false);
    apply_phases(&mut values, &spec, spec.cell_volume(), false);
    Ok(GridFunction { spec, values, domain: Domain::Frequency })
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform(f: &GridFunction) -> Result<GridFunction> {
    f.require(Domain::Frequency)?;
    let spec = *f.spec();
    let mut values = f.values().to_vec();
    apply_phases(&mut values, &spec, spec.frequency_cell_volume(), true);
    fft_nd(&mut values, &spec, true);
    Ok(GridFunction { spec, values, domain: Domain::Physical })
}
