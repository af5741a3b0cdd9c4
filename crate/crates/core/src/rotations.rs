//! Haar-random orthogonal matrices and the rotation-descent operator
//! `M^theta_{d'}`, with Monte-Carlo checks of the rotation-average identities.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euclidean_max::{ball_average_at, RadiiSet};
use crate::grid::{Domain, GridFunction, GridSpec};
use crate::norms::Exponent;
use crate::quadrature::GaussLegendre;

const ORTHO_TOL: f64 = 1e-10;
const BATCHES: usize = 16;

/// Default Monte-Carlo sample count over `O(d)`.
pub const DEFAULT_N_MC: usize = 4096;

/// Independent seed for draw `index` of a stream started at `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// An orthogonal `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    m: DMatrix<f64>,
}

impl RotationMatrix {
    /// Validates `theta^T theta = I` and `|det| = 1` to `1e-10`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument("rotation must be a nonempty square matrix".into()));
        }
        let d = m.nrows();
        let gram = m.transpose() * &m - DMatrix::<f64>::identity(d, d);
        let dev = gram.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if dev > ORTHO_TOL || (m.determinant().abs() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!("matrix is not orthogonal (deviation {dev:e})")));
        }
        Ok(Self { m })
    }

    pub fn identity(d: usize) -> Self {
        Self { m: DMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `max |theta^T theta - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        (self.m.transpose() * &self.m - DMatrix::<f64>::identity(d, d))
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.m[(i, j)] * x[j]).sum()).collect()
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    /// `theta (y', 0)` for `y'` in the first `y.len()` coordinates.
    fn embed(&self, y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| y.iter().enumerate().map(|(j, v)| self.m[(i, j)] * v).sum()).collect()
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// column signs of `Q` fixed by `sign(diag R)`.
pub fn haar_rotation(d: usize, seed: u64) -> Result<RotationMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument("rotation dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(RotationMatrix { m: q })
}

/// `R^d = R^{d'} x R^{d-d'}` with weight exponent `k = d - d'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentSplit {
    d: usize,
    d_prime: usize,
}

impl DescentSplit {
    pub fn new(d: usize, d_prime: usize) -> Result<Self> {
        if d_prime < 3 || d_prime > d {
            return Err(Error::InvalidSplit { d, d_prime });
        }
        Ok(Self { d, d_prime })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn d_prime(&self) -> usize {
        self.d_prime
    }

    pub fn k(&self) -> usize {
        self.d - self.d_prime
    }
}

/// `d' = floor(max(2, p, q, p', q')) + 1`.
pub fn dimension_split(p: Exponent, q: Exponent) -> Result<usize> {
    let mut top = 2.0f64;
    for e in [p, q] {
        match e {
            Exponent::Finite(v) => top = top.max(v).max(e.conjugate()),
            Exponent::Infinity => return Err(Error::InvalidExponent(f64::INFINITY)),
        }
    }
    Ok(top.floor() as usize + 1)
}

/// Polar product rule for weighted `d'`-plane averages: Gauss–Legendre in
/// the radius and seeded antithetic directions on `S^{d'-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentQuadrature {
    pub radial_nodes: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for DescentQuadrature {
    fn default() -> Self {
        Self { radial_nodes: 8, directions: 64, seed: 0 }
    }
}

/// Radial nodes `u_j` in `(0, 1)` with weights `d u^{d-1} w_j` and unit directions.
struct PlaneRule {
    radial: Vec<(f64, f64)>,
    dirs: Vec<Vec<f64>>,
}

impl PlaneRule {
    fn new(split: &DescentSplit, quad: &DescentQuadrature) -> Result<Self> {
        if quad.radial_nodes == 0 || quad.directions < 2 {
            return Err(Error::InvalidArgument("quadrature needs radial nodes and >= 2 directions".into()));
        }
        let d = split.dim() as i32;
        let radial = GaussLegendre::new(quad.radial_nodes)
            .mapped(0.0, 1.0)
            .map(|(u, w)| (u, w * d as f64 * u.powi(d - 1)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(quad.seed);
        let mut dirs = Vec::with_capacity(quad.directions);
        while dirs.len() < quad.directions {
            let v = random_unit(split.d_prime(), &mut rng);
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            dirs.push(v);
            if dirs.len() < quad.directions {
                dirs.push(neg);
            }
        }
        Ok(Self { radial, dirs })
    }
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut *rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Multilinear interpolation of `vals` (last axis fastest) with zero extension.
pub(crate) fn interpolate(vals: &[f64], spec: &GridSpec, point: &[f64]) -> f64 {
    let d = spec.dim();
    let n = spec.points_per_axis();
    let h = spec.h();
    let mut base = [0isize; 16];
    let mut frac = [0.0f64; 16];
    for a in 0..d {
        let t = (point[a] + spec.half_width()) / h - 0.5;
        let i = t.floor();
        base[a] = i as isize;
        frac[a] = t - i;
    }
    let mut total = 0.0;
    'corner: for mask in 0..(1usize << d) {
        let mut weight = 1.0;
        let mut flat = 0usize;
        for a in 0..d {
            let up = (mask >> a) & 1;
            let j = base[a] + up as isize;
            if j < 0 || j >= n as isize {
                continue 'corner;
            }
            weight *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
            flat = flat * n + j as usize;
        }
        total += weight * vals[flat];
    }
    total
}

/// Plane vectors `theta (omega_i, 0)` for every direction of the rule.
fn plane_vectors(theta: &RotationMatrix, rule: &PlaneRule) -> Vec<Vec<f64>> {
    rule.dirs.iter().map(|w| theta.embed(w)).collect()
}

/// Weighted plane average of `|f|` around `x` at radius `r`.
fn plane_average(abs: &[f64], spec: &GridSpec, x: &[f64], r: f64, rule: &PlaneRule, vecs: &[Vec<f64>]) -> f64 {
    let d = spec.dim();
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    for &(u, w) in &rule.radial {
        let rho = r * u;
        let mut s = 0.0;
        for v in vecs {
            for a in 0..d {
                point[a] = x[a] - rho * v[a];
            }
            s += interpolate(abs, spec, &point);
        }
        total += w * s / vecs.len() as f64;
    }
    total
}

fn descent_at(
    abs: &[f64],
    spec: &GridSpec,
    flat: usize,
    radii: &RadiiSet,
    rule: &PlaneRule,
    vecs: &[Vec<f64>],
) -> f64 {
    let x = spec.node(flat);
    radii
        .radii()
        .iter()
        .fold(abs[flat], |best, &r| best.max(plane_average(abs, spec, &x, r, rule, vecs)))
}

fn check_inputs(f: &GridFunction, theta: &RotationMatrix, split: &DescentSplit) -> Result<()> {
    f.require(Domain::Physical)?;
    let d = f.spec().dim();
    if split.dim() != d {
        return Err(Error::DimensionMismatch(d, split.dim()));
    }
    if theta.dim() != d {
        return Err(Error::DimensionMismatch(d, theta.dim()));
    }
    if d > 16 {
        return Err(Error::UnsupportedDimension { dim: d, reason: "interpolation supports d <= 16" });
    }
    Ok(())
}

/// `M^theta_{d'} f`: at every node, the larger of `|f(x)|` and the maximum over
/// `r` of the `|y'|^k`-weighted averages of `|f(x - theta(y', 0))|` over `|y'| <= r`.
pub fn descent_maximal(
    f: &GridFunction,
    theta: &RotationMatrix,
    split: &DescentSplit,
    radii: &RadiiSet,
    quad: &DescentQuadrature,
) -> Result<GridFunction> {
    check_inputs(f, theta, split)?;
    let spec = *f.spec();
    let abs = f.abs_values();
    let rule = PlaneRule::new(split, quad)?;
    let vecs = plane_vectors(theta, &rule);
    let out = (0..spec.len())
        .into_par_iter()
        .map(|flat| descent_at(&abs, &spec, flat, radii, &rule, &vecs))
        .collect();
    GridFunction::from_real(spec, out)
}

/// `M^theta_{d'} f` at selected nodes.
pub fn descent_maximal_at(
    f: &GridFunction,
    theta: &RotationMatrix,
    split: &DescentSplit,
    radii: &RadiiSet,
    quad: &DescentQuadrature,
    nodes: &[usize],
) -> Result<Vec<f64>> {
    check_inputs(f, theta, split)?;
    let spec = *f.spec();
    if let Some(&bad) = nodes.iter().find(|&&i| i >= spec.len()) {
        return Err(Error::InvalidArgument(format!("node {bad} outside the grid")));
    }
    let abs = f.abs_values();
    let rule = PlaneRule::new(split, quad)?;
    let vecs = plane_vectors(theta, &rule);
    Ok(nodes.par_iter().map(|&i| descent_at(&abs, &spec, i, radii, &rule, &vecs)).collect())
}

/// Mean and batch-means standard error.
pub fn batch_mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let batches = BATCHES.min(n);
    if batches < 2 {
        return (mean, 0.0);
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| {
            let hi = if b + 1 == batches { n } else { (b + 1) * size };
            let chunk = &samples[b * size..hi];
            chunk.iter().sum::<f64>() / chunk.len() as f64
        })
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// A Monte-Carlo estimate with its standard error next to a reference value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
}

impl McComparison {
    /// `|lhs - rhs| <= sigmas * stderr + slack`.
    pub fn agrees(&self, sigmas: f64, slack: f64) -> bool {
        (self.lhs - self.rhs).abs() <= sigmas * self.stderr + slack
    }
}

/// Lattice ball average of `|f|` at `(x, r)` against the Haar average of
/// weighted `d'`-plane averages through `x`.
pub fn rotation_average_check(
    f: &GridFunction,
    split: &DescentSplit,
    r: f64,
    node: usize,
    n_mc: usize,
    seed: u64,
    quad: &DescentQuadrature,
) -> Result<McComparison> {
    let spec = *f.spec();
    check_inputs(f, &RotationMatrix::identity(spec.dim()), split)?;
    if node >= spec.len() {
        return Err(Error::InvalidArgument(format!("node {node} outside the grid")));
    }
    let lo = spec.coord(0);
    let hi = spec.coord(spec.points_per_axis() - 1);
    let x = spec.node(node);
    if !(r > 0.0) || x.iter().any(|&c| c - r < lo || c + r > hi) {
        return Err(Error::StencilOutsideCube { radius: r });
    }
    let lhs = ball_average_at(f, node, r)?;
    let abs = f.abs_values();
    let rule = PlaneRule::new(split, quad)?;
    let samples: Vec<f64> = (0..n_mc as u64)
        .into_par_iter()
        .map(|i| {
            let theta = haar_rotation(spec.dim(), derive_seed(seed, i)).expect("d >= 1");
            let vecs = plane_vectors(&theta, &rule);
            plane_average(&abs, &spec, &x, r, &rule, &vecs)
        })
        .collect();
    let (rhs, stderr) = batch_mean_stderr(&samples);
    Ok(McComparison { lhs, rhs, stderr })
}

/// `int_{S^{d-1}} f1` against `int_{O(d)} int_{S^{d'-1}} f1(theta(y', 0))`,
/// both by Monte Carlo with `n_mc` samples.
pub fn sphere_identity_check<F>(f1: F, split: &DescentSplit, n_mc: usize, seed: u64) -> Result<McComparison>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n_mc == 0 {
        return Err(Error::InvalidArgument("n_mc must be positive".into()));
    }
    let (d, dp) = (split.dim(), split.d_prime());
    let direct: Vec<f64> = (0..n_mc as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2 * i));
            f1(&random_unit(d, &mut rng))
        })
        .collect();
    let rotated: Vec<f64> = (0..n_mc as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, 2 * i + 1);
            let theta = haar_rotation(d, s).expect("d >= 1");
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(s, 0));
            f1(&theta.embed(&random_unit(dp, &mut rng)))
        })
        .collect();
    let (lhs, se_l) = batch_mean_stderr(&direct);
    let (rhs, se_r) = batch_mean_stderr(&rotated);
    Ok(McComparison { lhs, rhs, stderr: se_l.hypot(se_r) })
}

/// Haar average of `M^theta_{d'} f` and its standard error, per node.
#[derive(Clone, Debug)]
pub struct DominationEstimate {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Monte-Carlo average over `n_mc` Haar rotations of `M^theta_{d'} f` at `nodes`.
pub fn lemma2_domination_at(
    f: &GridFunction,
    split: &DescentSplit,
    radii: &RadiiSet,
    nodes: &[usize],
    n_mc: usize,
    seed: u64,
    quad: &DescentQuadrature,
) -> Result<DominationEstimate> {
    if n_mc == 0 {
        return Err(Error::InvalidArgument("n_mc must be positive".into()));
    }
    let d = f.spec().dim();
    let draws: Vec<Vec<f64>> = (0..n_mc as u64)
        .map(|i| {
            let theta = haar_rotation(d, derive_seed(seed, i))?;
            descent_maximal_at(f, &theta, split, radii, quad, nodes)
        })
        .collect::<Result<_>>()?;
    let mut mean = Vec::with_capacity(nodes.len());
    let mut stderr = Vec::with_capacity(nodes.len());
    let mut column = vec![0.0; n_mc];
    for j in 0..nodes.len() {
        for (c, draw) in column.iter_mut().zip(&draws) {
            *c = draw[j];
        }
        let (m, s) = batch_mean_stderr(&column);
        mean.push(m);
        stderr.push(s);
    }
    Ok(DominationEstimate { mean, stderr })
}

/// `int_{O(d)} M^theta_{d'} f dmu(theta)` on the whole grid.
pub fn lemma2_domination(
    f: &GridFunction,
    split: &DescentSplit,
    radii: &RadiiSet,
    n_mc: usize,
    seed: u64,
    quad: &DescentQuadrature,
) -> Result<GridFunction> {
    let nodes: Vec<usize> = (0..f.len()).collect();
    let est = lemma2_domination_at(f, split, radii, &nodes, n_mc, seed, quad)?;
    GridFunction::from_real(*f.spec(), est.mean)
}

/// Largest difference of `|f|` between neighboring nodes over `h`.
pub fn discrete_lipschitz(f: &GridFunction) -> f64 {
    let spec = f.spec();
    let n = spec.points_per_axis();
    let abs = f.abs_values();
    let mut best = 0.0f64;
    let mut stride = 1;
    for _ in 0..spec.dim() {
        for (i, v) in abs.iter().enumerate() {
            if (i / stride) % n + 1 < n {
                best = best.max((abs[i + stride] - v).abs());
            }
        }
        stride *= n;
    }
    best / spec.h()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclidean_max::hl_maximal;
    use crate::grid::{make_grid, sample};

    #[test]
    fn haar_is_orthogonal_and_seeded() {
        for d in 1..7 {
            for seed in 0..20 {
                let q = haar_rotation(d, seed).unwrap();
                assert!(q.orthogonality_defect() <= 1e-12);
                assert!((q.determinant().abs() - 1.0).abs() <= 1e-10);
                assert_eq!(q, haar_rotation(d, seed).unwrap());
            }
        }
        assert!(haar_rotation(0, 1).is_err());
    }

    #[test]
    fn split_and_dimension_formula() {
        assert!(DescentSplit::new(4, 5).is_err());
        assert!(DescentSplit::new(4, 2).is_err());
        assert_eq!(DescentSplit::new(5, 3).unwrap().k(), 2);
        let e = |p| Exponent::new(p).unwrap();
        assert_eq!(dimension_split(e(2.0), e(2.0)).unwrap(), 3);
        assert_eq!(dimension_split(e(3.0), e(2.0)).unwrap(), 4);
        assert_eq!(dimension_split(e(1.25), e(1.25)).unwrap(), 6);
        assert!(dimension_split(Exponent::Infinity, e(2.0)).is_err());
    }

    #[test]
    fn interpolation_reproduces_affine_functions() {
        let spec = make_grid(3, 2.0, 8).unwrap();
        let g = |x: &[f64]| 1.0 + 0.5 * x[0] - 0.25 * x[1] + 0.125 * x[2];
        let f = sample(&spec, g).unwrap();
        let vals = f.real_parts();
        for p in [[0.1, -0.3, 0.7], [1.2, 0.4, -1.6], [0.0, 0.0, 0.0]] {
            assert!((interpolate(&vals, &spec, &p) - g(&p)).abs() < 1e-13);
        }
        assert_eq!(interpolate(&vals, &spec, &[5.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn constant_is_fixed() {
        let spec = make_grid(3, 4.0, 16).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        let split = DescentSplit::new(3, 3).unwrap();
        let radii = RadiiSet::geometric(0.5, 2.0, 4).unwrap();
        let theta = haar_rotation(3, 7).unwrap();
        let m = descent_maximal(&one, &theta, &split, &radii, &DescentQuadrature::default()).unwrap();
        let interior: Vec<usize> = (0..spec.len()).filter(|&i| spec.is_interior(i, 2.5)).collect();
        assert!(!interior.is_empty());
        for i in interior {
            assert!((m.real_parts()[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_permutation_commutes() {
        let spec = make_grid(3, 2.0, 8).unwrap();
        let f = sample(&spec, |x| (-(x[0] - 0.3).powi(2) - 0.5 * x[1] * x[1] + 0.2 * x[2]).exp()).unwrap();
        let mut m = DMatrix::zeros(3, 3);
        m[(1, 0)] = 1.0;
        m[(2, 1)] = -1.0;
        m[(0, 2)] = 1.0;
        let theta = RotationMatrix::from_matrix(m).unwrap();
        let inv = theta.inverse();
        // (f o theta)(y) = f(theta y)
        let composed = sample(&spec, |y| {
            let x = theta.apply(y);
            (-(x[0] - 0.3).powi(2) - 0.5 * x[1] * x[1] + 0.2 * x[2]).exp()
        })
        .unwrap();
        let split = DescentSplit::new(3, 3).unwrap();
        let radii = RadiiSet::geometric(0.3, 1.5, 5).unwrap();
        let quad = DescentQuadrature { radial_nodes: 4, directions: 16, seed: 3 };
        let lhs = descent_maximal(&f, &theta, &split, &radii, &quad).unwrap().real_parts();
        let rhs = descent_maximal(&composed, &RotationMatrix::identity(3), &split, &radii, &quad)
            .unwrap()
            .real_parts();
        let n = spec.points_per_axis();
        for flat in 0..spec.len() {
            let x = spec.node(flat);
            let y = inv.apply(&x);
            let idx: Vec<usize> = y.iter().map(|c| ((c + 2.0) / spec.h() - 0.5).round() as usize).collect();
            assert!(idx.iter().all(|&j| j < n));
            assert!((lhs[flat] - rhs[spec.flatten(&idx)]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_descent_tracks_hl() {
        let spec = make_grid(3, 4.0, 32).unwrap();
        let f = sample(&spec, |x| (-x.iter().map(|t| t * t).sum::<f64>() / 2.0).exp()).unwrap();
        let radii = RadiiSet::geometric(0.5, 2.0, 5).unwrap();
        let split = DescentSplit::new(3, 3).unwrap();
        let quad = DescentQuadrature { radial_nodes: 8, directions: 256, seed: 1 };
        let nodes: Vec<usize> = (0..spec.len()).step_by(997).filter(|&i| spec.is_interior(i, 2.0)).collect();
        let got = descent_maximal_at(&f, &RotationMatrix::identity(3), &split, &radii, &quad, &nodes).unwrap();
        let hl = hl_maximal(&f, &radii).unwrap().real_parts();
        for (v, &i) in got.iter().zip(&nodes) {
            assert!((v - hl[i]).abs() < 2e-2, "node {i}: {v} vs {}", hl[i]);
        }
    }

    #[test]
    fn sphere_moments() {
        let split = DescentSplit::new(4, 3).unwrap();
        let one = sphere_identity_check(|_| 1.0, &split, 256, 5).unwrap();
        assert_eq!((one.lhs, one.rhs), (1.0, 1.0));
        let sq = sphere_identity_check(|x| x[0] * x[0], &split, 4096, 5).unwrap();
        assert!(sq.agrees(3.0, 0.0), "{sq:?}");
        assert!((sq.lhs - 0.25).abs() < 4.0 * sq.stderr + 1e-3);
        let a = sphere_identity_check(|x| x[1].powi(3) + x[0], &split, 512, 9).unwrap();
        assert_eq!(a, sphere_identity_check(|x| x[1].powi(3) + x[0], &split, 512, 9).unwrap());
    }

    #[test]
    fn batch_means() {
        let (m, s) = batch_mean_stderr(&[2.0; 64]);
        assert_eq!((m, s), (2.0, 0.0));
        assert_eq!(batch_mean_stderr(&[3.0]), (3.0, 0.0));
    }
}
