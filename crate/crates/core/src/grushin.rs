//! The Koranyi gauge on `R^d_x x R_u`, its balls, the maximal operator
//! `M_K` and the iterated Euclidean maximal operator that dominates it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euclidean_max::{lattice_maximal, maximal_along, RadiiSet};
use crate::norms::{lp_of_moduli, lq_of_moduli, Exponent};

/// A point `(x, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrushinPoint {
    pub x: Vec<f64>,
    pub u: f64,
}

impl GrushinPoint {
    pub fn new(x: Vec<f64>, u: f64) -> Result<Self> {
        if let Some(index) = x.iter().chain(std::iter::once(&u)).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { x, u })
    }

    pub fn origin(d: usize) -> Self {
        Self { x: vec![0.0; d], u: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `delta_s (x, u) = (s x, s^2 u)`.
    pub fn dilate(&self, s: f64) -> Self {
        Self { x: self.x.iter().map(|v| s * v).collect(), u: s * s * self.u }
    }
}

#[inline]
fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Gauge from precomputed `|x|^2`, `|y|^2` and `<x, y>`.
#[inline]
fn gauge(x2: f64, y2: f64, xy: f64, du: f64) -> f64 {
    let s = x2 + y2;
    let t = 2.0 * du.abs();
    ((s * s + t * t).sqrt() - 2.0 * xy).max(0.0).sqrt()
}

/// `d_K(g, g') = (((|x|^2 + |x'|^2)^2 + 4 |u - u'|^2)^{1/2} - 2 <x, x'>)^{1/2}`.
pub fn koranyi_distance(g: &GrushinPoint, h: &GrushinPoint) -> Result<f64> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch(g.dim(), h.dim()));
    }
    Ok(gauge(norm_sq(&g.x), norm_sq(&h.x), dot(&g.x, &h.x), g.u - h.u))
}

/// Cell-centered grid on `[-L_x, L_x]^d x [-L_u, L_u]`, `u` fastest in memory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrushinGrid {
    d: usize,
    lx: f64,
    lu: f64,
    nx: usize,
    nu: usize,
}

impl GrushinGrid {
    pub fn new(d: usize, lx: f64, lu: f64, nx: usize, nu: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        for (name, l) in [("L_x", lx), ("L_u", lu)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!("{name} must be positive, got {l}")));
            }
        }
        for (name, n) in [("N_x", nx), ("N_u", nu)] {
            if n < 4 || n % 2 == 1 {
                return Err(Error::InvalidGrid(format!("{name} must be even and >= 4, got {n}")));
            }
        }
        let total = (nx as f64).powi(d as i32) * nu as f64;
        if total > (1u64 << 31) as f64 {
            return Err(Error::InvalidGrid(format!("{total} nodes exceed the limit")));
        }
        Ok(Self { d, lx, lu, nx, nu })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn half_widths(&self) -> (f64, f64) {
        (self.lx, self.lu)
    }

    pub fn points(&self) -> (usize, usize) {
        (self.nx, self.nu)
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }

    pub fn hu(&self) -> f64 {
        2.0 * self.lu / self.nu as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.hx().powi(self.d as i32) * self.hu()
    }

    pub fn x_len(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        self.x_len() * self.nu
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x` coordinate of (possibly out-of-box) index `i`.
    #[inline]
    pub fn x_coord(&self, i: isize) -> f64 {
        -self.lx + (i as f64 + 0.5) * self.hx()
    }

    #[inline]
    pub fn u_coord(&self, j: isize) -> f64 {
        -self.lu + (j as f64 + 0.5) * self.hu()
    }

    /// Multi-index of an `x` flat index, last axis fastest.
    pub fn x_index(&self, mut xflat: usize, out: &mut [usize]) {
        for a in (0..self.d).rev() {
            out[a] = xflat % self.nx;
            xflat /= self.nx;
        }
    }

    pub fn x_node(&self, xflat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.d];
        self.x_index(xflat, &mut idx);
        idx.iter().map(|&i| self.x_coord(i as isize)).collect()
    }

    pub fn point(&self, flat: usize) -> GrushinPoint {
        GrushinPoint { x: self.x_node(flat / self.nu), u: self.u_coord((flat % self.nu) as isize) }
    }
}

/// Real samples on a [`GrushinGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GrushinFunction {
    grid: GrushinGrid,
    values: Vec<f64>,
}

impl GrushinFunction {
    pub fn new(grid: GrushinGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn sample<F>(grid: &GrushinGrid, f: F) -> Result<Self>
    where
        F: Fn(&[f64], f64) -> f64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let g = grid.point(flat);
                f(&g.x, g.u)
            })
            .collect();
        Self::new(*grid, values)
    }

    pub fn constant(grid: GrushinGrid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &GrushinGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        lp_of_moduli(&abs, p, self.grid.cell_volume())
    }
}

/// `||(sum_n |f_n|^q)^{1/q}||_p` for functions on a common Grushin grid.
pub fn grushin_mixed_norm(members: &[GrushinFunction], p: Exponent, q: Exponent) -> Result<f64> {
    let first = members.first().ok_or(Error::EmptyField)?;
    if members.iter().any(|m| m.grid != first.grid) {
        return Err(Error::GridMismatch);
    }
    let moduli: Vec<Vec<f64>> = members.iter().map(|m| m.values.iter().map(|v| v.abs()).collect()).collect();
    Ok(lp_of_moduli(&lq_of_moduli(&moduli, q), p, first.grid.cell_volume()))
}

/// Counted volume of a Koranyi ball with the volume of cells cut by its boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallVolume {
    pub volume: f64,
    pub boundary: f64,
}

/// `|u - u'|` bound over the ball `B_K((x, u), r)`.
fn u_reach(x: &[f64], r: f64) -> f64 {
    let nx = norm_sq(x).sqrt();
    0.5 * r * r + nx * (nx + r)
}

/// Cell count of `{g' : d_K(g, g') <= r}` times the cell volume.
pub fn koranyi_ball_volume(g: &GrushinPoint, r: f64, grid: &GrushinGrid) -> Result<BallVolume> {
    if g.dim() != grid.dim() {
        return Err(Error::DimensionMismatch(grid.dim(), g.dim()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let (lx, lu) = grid.half_widths();
    let reach = u_reach(&g.x, r);
    if g.x.iter().any(|&c| c.abs() + r > lx) || g.u.abs() + reach > lu {
        return Err(Error::BallExitsBox { radius: r });
    }
    let d = grid.dim();
    let (hx, hu) = (grid.hx(), grid.hu());
    let gx2 = norm_sq(&g.x);
    let (inside, cut) = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let p = grid.point(flat);
            let member = gauge(gx2, norm_sq(&p.x), dot(&g.x, &p.x), g.u - p.u) <= r;
            let mut corner = p.x.clone();
            let mut any_in = member;
            let mut any_out = !member;
            for mask in 0..(1usize << (d + 1)) {
                for a in 0..d {
                    let s = if (mask >> a) & 1 == 1 { 0.5 } else { -0.5 };
                    corner[a] = p.x[a] + s * hx;
                }
                let cu = p.u + if (mask >> d) & 1 == 1 { 0.5 * hu } else { -0.5 * hu };
                let inn = gauge(gx2, norm_sq(&corner), dot(&g.x, &corner), g.u - cu) <= r;
                any_in |= inn;
                any_out |= !inn;
            }
            (member as usize, (any_in && any_out) as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let cell = grid.cell_volume();
    Ok(BallVolume { volume: inside as f64 * cell, boundary: cut as f64 * cell })
}

/// Offsets of the extended lattice `Z^d` within sup-distance `reach`.
fn offsets(d: usize, reach: isize) -> Vec<Vec<isize>> {
    let side = (2 * reach + 1) as usize;
    (0..side.pow(d as u32))
        .map(|mut k| {
            let mut o = vec![0isize; d];
            for a in (0..d).rev() {
                o[a] = (k % side) as isize - reach;
                k /= side;
            }
            o
        })
        .collect()
}

/// `M_K f`: the larger of `|f(g)|` and the maximum over `r` of averages of
/// `|f|` over lattice nodes of `B_K(g, r)`, with `f` extended by zero.
pub fn grushin_maximal(f: &GrushinFunction, radii: &RadiiSet) -> Result<GrushinFunction> {
    let grid = *f.grid();
    let (d, (nx, nu)) = (grid.dim(), grid.points());
    let hx = grid.hx();
    let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    // prefix sums along u per x node
    let prefix: Vec<f64> = abs
        .chunks(nu)
        .flat_map(|row| {
            let mut acc = 0.0;
            std::iter::once(0.0).chain(row.iter().map(move |v| {
                acc += v;
                acc
            }))
        })
        .collect();
    let u: Vec<f64> = (-1..=nu as isize).map(|j| grid.u_coord(j)).collect();
    let rows: Vec<Vec<f64>> = (0..grid.x_len())
        .into_par_iter()
        .map(|xflat| {
            let mut idx = vec![0usize; d];
            grid.x_index(xflat, &mut idx);
            let x: Vec<f64> = idx.iter().map(|&i| grid.x_coord(i as isize)).collect();
            let x2 = norm_sq(&x);
            let mut best: Vec<f64> = abs[xflat * nu..(xflat + 1) * nu].to_vec();
            let mut sums = vec![0.0; nu];
            let mut counts = vec![0.0; nu];
            let mut y = vec![0.0; d];
            for &r in radii.radii() {
                sums.iter_mut().for_each(|s| *s = 0.0);
                counts.iter_mut().for_each(|c| *c = 0.0);
                let reach = (r / hx).floor() as isize + 1;
                for o in offsets(d, reach) {
                    let mut inside = true;
                    let mut yflat = 0usize;
                    for a in 0..d {
                        let i = idx[a] as isize + o[a];
                        y[a] = grid.x_coord(i);
                        inside &= i >= 0 && i < nx as isize;
                        if inside {
                            yflat = yflat * nx + i as usize;
                        }
                    }
                    let y2 = norm_sq(&y);
                    let xy = dot(&x, &y);
                    let rhs = r * r + 2.0 * xy;
                    let disc = rhs * rhs - (x2 + y2) * (x2 + y2);
                    let est = if rhs >= 0.0 && disc >= 0.0 { (0.5 * disc.sqrt() / grid.hu()).floor() as isize } else { -1 };
                    let member = |j0: isize, j: isize| {
                        let (a, b) = (coord_at(&u, &grid, j0), coord_at(&u, &grid, j));
                        gauge(x2, y2, xy, a - b) <= r
                    };
                    for j0 in 0..nu as isize {
                        let up = extent(est, |m| member(j0, j0 + m));
                        if up < 0 {
                            continue;
                        }
                        let down = extent(est, |m| member(j0, j0 - m));
                        let j0u = j0 as usize;
                        counts[j0u] += (up + down + 1) as f64;
                        if inside {
                            let lo = (j0 - down).max(0) as usize;
                            let hi = ((j0 + up) as usize).min(nu - 1);
                            let row = &prefix[yflat * (nu + 1)..(yflat + 1) * (nu + 1)];
                            sums[j0u] += row[hi + 1] - row[lo];
                        }
                    }
                }
                for j in 0..nu {
                    if counts[j] > 0.0 {
                        best[j] = best[j].max(sums[j] / counts[j]);
                    }
                }
            }
            best
        })
        .collect();
    GrushinFunction::new(grid, rows.concat())
}

#[inline]
fn coord_at(cache: &[f64], grid: &GrushinGrid, j: isize) -> f64 {
    if j >= -1 && ((j + 1) as usize) < cache.len() {
        cache[(j + 1) as usize]
    } else {
        grid.u_coord(j)
    }
}

/// Largest `m >= 0` with `member(m)`, given monotonicity and a starting
/// estimate; `-1` if `member(0)` fails.
fn extent(est: isize, member: impl Fn(isize) -> bool) -> isize {
    let mut m = est.max(-1);
    while m >= 0 && !member(m) {
        m -= 1;
    }
    while member(m + 1) {
        m += 1;
    }
    m
}

/// `M_{R^d}(M_R f(., u))(x)`: one-dimensional maximal function along `u`,
/// then the Hardy–Littlewood maximal function in `x` on every `u`-slice.
pub fn iterated_maximal(f: &GrushinFunction, radii_x: &RadiiSet, radii_u: &RadiiSet) -> Result<GrushinFunction> {
    let grid = *f.grid();
    let (d, (nx, nu)) = (grid.dim(), grid.points());
    let mut shape = vec![nx; d];
    shape.push(nu);
    let along = maximal_along(&f.values, &shape, d, grid.hu(), radii_u);
    let m = grid.x_len();
    let slices: Vec<Vec<f64>> = (0..nu)
        .into_par_iter()
        .map(|j| {
            let slice: Vec<f64> = (0..m).map(|i| along[i * nu + j]).collect();
            lattice_maximal(&slice, d, nx, grid.hx(), radii_x, 0)
        })
        .collect();
    let mut out = vec![0.0; grid.len()];
    for (j, slice) in slices.iter().enumerate() {
        for (i, v) in slice.iter().enumerate() {
            out[i * nu + j] = *v;
        }
    }
    GrushinFunction::new(grid, out)
}

/// `max (M_K f / iterated)` over nodes where the iterated value is positive.
pub fn domination_constant(mk: &GrushinFunction, iterated: &GrushinFunction) -> Result<f64> {
    if mk.grid != iterated.grid {
        return Err(Error::GridMismatch);
    }
    Ok(mk
        .values
        .iter()
        .zip(&iterated.values)
        .filter(|(_, b)| **b > 0.0)
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max))
}

/// Report entry for the Carnot–Caratheodory maximal operator.
pub fn cc_domination_note() -> &'static str {
    "M_CC is not computed; it is covered through M_CC f <= C^-1 M_K f and M_K f <= C M_{R^d}(M_R f(.,u))(x)"
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> GrushinGrid {
        GrushinGrid::new(1, 2.0, 2.0, 8, 8).unwrap()
    }

    #[test]
    fn gauge_identities() {
        let o = GrushinPoint::origin(3);
        let p = GrushinPoint::new(vec![0.3, -1.2, 2.0], 0.0).unwrap();
        assert_eq!(koranyi_distance(&o, &o).unwrap(), 0.0);
        assert_eq!(koranyi_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(koranyi_distance(&o, &p).unwrap(), norm_sq(&p.x).sqrt());
        let q = GrushinPoint::new(vec![0.0; 3], -1.7).unwrap();
        assert_eq!(koranyi_distance(&o, &q).unwrap(), (2.0f64 * 1.7).sqrt());
        assert!(koranyi_distance(&o, &GrushinPoint::origin(2)).is_err());
        assert!(GrushinPoint::new(vec![f64::NAN], 0.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GrushinGrid::new(0, 1.0, 1.0, 8, 8).is_err());
        assert!(GrushinGrid::new(1, 1.0, 1.0, 7, 8).is_err());
        assert!(GrushinGrid::new(1, -1.0, 1.0, 8, 8).is_err());
        let g = grid1();
        assert_eq!(g.len(), 64);
        assert_eq!(g.cell_volume(), 0.25);
        assert_eq!(g.point(9), GrushinPoint { x: vec![-1.25], u: -1.25 });
    }

    #[test]
    fn ball_volume_and_exit() {
        let grid = GrushinGrid::new(1, 4.0, 8.0, 64, 128).unwrap();
        let o = GrushinPoint::origin(1);
        let mut last = 0.0;
        for r in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let v = koranyi_ball_volume(&o, r, &grid).unwrap();
            assert!(v.volume >= last);
            last = v.volume;
        }
        assert!(koranyi_ball_volume(&o, 5.0, &grid).is_err());
        let a = koranyi_ball_volume(&GrushinPoint::new(vec![0.0], 0.0).unwrap(), 2.0, &grid).unwrap();
        let b = koranyi_ball_volume(&o, 1.0, &grid).unwrap();
        assert!((a.volume - 8.0 * b.volume).abs() <= a.boundary + 8.0 * b.boundary);
    }

    fn brute_force(f: &GrushinFunction, radii: &RadiiSet) -> Vec<f64> {
        let grid = f.grid();
        let (nx, nu) = grid.points();
        let pad = 64isize;
        (0..grid.len())
            .map(|flat| {
                let g = grid.point(flat);
                let mut best = f.values[flat].abs();
                for &r in radii.radii() {
                    let (mut sum, mut count) = (0.0, 0.0);
                    for i in -pad..nx as isize + pad {
                        for j in -pad..nu as isize + pad {
                            let h = GrushinPoint { x: vec![grid.x_coord(i)], u: grid.u_coord(j) };
                            if koranyi_distance(&g, &h).unwrap() <= r {
                                count += 1.0;
                                if i >= 0 && i < nx as isize && j >= 0 && j < nu as isize {
                                    sum += f.values[i as usize * nu + j as usize].abs();
                                }
                            }
                        }
                    }
                    best = best.max(sum / count);
                }
                best
            })
            .collect()
    }

    #[test]
    fn maximal_matches_brute_force() {
        let grid = grid1();
        let vals: Vec<f64> = (0..grid.len()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let f = GrushinFunction::new(grid, vals).unwrap();
        let radii = RadiiSet::new(vec![0.5, 0.75, 1.0, 1.5, 2.0, 3.0]).unwrap();
        let got = grushin_maximal(&f, &radii).unwrap();
        assert_eq!(got.values(), brute_force(&f, &radii).as_slice());
    }

    #[test]
    fn constants_and_domination() {
        let grid = GrushinGrid::new(2, 2.0, 2.0, 8, 8).unwrap();
        let one = GrushinFunction::constant(grid, 1.0);
        let radii = RadiiSet::geometric(0.5, 1.0, 3).unwrap();
        let mk = grushin_maximal(&one, &radii).unwrap();
        let it = iterated_maximal(&one, &radii, &radii).unwrap();
        for flat in 0..grid.len() {
            let g = grid.point(flat);
            if g.x.iter().all(|c| c.abs() < 0.5) && g.u.abs() < 0.5 {
                assert!((mk.values()[flat] - 1.0).abs() < 1e-14);
            }
            if g.x.iter().all(|c| c.abs() < 1.1) && g.u.abs() < 1.1 {
                assert!((it.values()[flat] - 1.0).abs() < 1e-14);
            }
        }
        let f = GrushinFunction::sample(&grid, |x, u| (-norm_sq(x) - u * u).exp()).unwrap();
        let mk = grushin_maximal(&f, &radii).unwrap();
        assert!(mk.values().iter().zip(f.values()).all(|(m, v)| m >= v));
        let it = iterated_maximal(&f, &radii, &radii).unwrap();
        assert!(domination_constant(&mk, &it).unwrap().is_finite());
    }

    #[test]
    fn iterated_factorizes() {
        let grid = GrushinGrid::new(1, 2.0, 2.0, 8, 8).unwrap();
        let a = |x: f64| (-(x - 0.3).powi(2)).exp();
        let b = |u: f64| 1.0 + u * u;
        let f = GrushinFunction::sample(&grid, |x, u| a(x[0]) * b(u)).unwrap();
        let radii = RadiiSet::geometric(0.5, 2.0, 3).unwrap();
        let it = iterated_maximal(&f, &radii, &radii).unwrap();
        let av: Vec<f64> = (0..8).map(|i| a(grid.x_coord(i))).collect();
        let bv: Vec<f64> = (0..8).map(|j| b(grid.u_coord(j))).collect();
        let ma = lattice_maximal(&av, 1, 8, grid.hx(), &radii, 0);
        let mb = lattice_maximal(&bv, 1, 8, grid.hu(), &radii, 0);
        for i in 0..8 {
            for j in 0..8 {
                let v = it.values()[i * 8 + j];
                assert!((v - ma[i] * mb[j]).abs() <= 1e-12 * v.max(1.0));
            }
        }
    }

    #[test]
    fn note_mentions_chain() {
        let note = cc_domination_note();
        assert!(note.contains("M_K") && note.contains("M_CC"));
    }
}
