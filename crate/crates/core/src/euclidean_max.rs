//! Centered Hardy–Littlewood maximal operators on grid data.
//!
//! A ball of radius `r` around a node `x` is the set of nodes `y` with
//! `|y - x|^2 <= S h^2`, `S = floor((r/h)^2)`. Sums run over grid nodes with
//! `f` zero-extended outside the cube, while normalizations count the full
//! infinite lattice, so averages near the boundary are biased downward. The
//! `r -> 0` limit `|f(x)|` is always part of the supremum.
//!
//! Ball sums for all radii are computed at once from per-node shell
//! histograms `H(x, s) = sum_{|y - x|^2 = s h^2} |f(y)|`, built one axis at a
//! time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction, GridSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiSet {
    radii: Vec<f64>,
}

impl RadiiSet {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidRadii("empty radii set".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidRadii("radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRadii("radii must be strictly increasing".into()));
        }
        Ok(Self { radii })
    }

    /// `k` geometrically spaced radii from `lo` to `hi`, endpoints exact.
    pub fn geometric(lo: f64, hi: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidRadii(format!("need at least 2 radii, got {k}")));
        }
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidRadii(format!("bad range [{lo}, {hi}]")));
        }
        let ratio = hi / lo;
        let mut radii: Vec<f64> =
            (0..k).map(|i| lo * ratio.powf(i as f64 / (k - 1) as f64)).collect();
        radii[0] = lo;
        radii[k - 1] = hi;
        Self::new(radii)
    }

    /// `k` equally spaced radii from `lo` to `hi`.
    pub fn linear(lo: f64, hi: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidRadii(format!("need at least 2 radii, got {k}")));
        }
        Self::new((0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect())
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.radii[0]
    }

    pub fn max(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Radii restricted to `[lo, hi]`; `None` when nothing survives.
    pub fn clamp_to(&self, lo: f64, hi: f64) -> Option<Self> {
        let kept: Vec<f64> = self.radii.iter().copied().filter(|r| *r >= lo && *r <= hi).collect();
        Self::new(kept).ok()
    }
}

/// `k` log-spaced radii from `h` to `2L sqrt(d)`.
pub fn default_radii(spec: &GridSpec, k: usize) -> Result<RadiiSet> {
    let hi = 2.0 * spec.half_width() * (spec.dim() as f64).sqrt();
    RadiiSet::geometric(spec.h(), hi, k)
}

/// Integer threshold `floor((r/h)^2)` with a guard against roundoff.
#[inline]
pub(crate) fn shell_threshold(r: f64, h: f64) -> usize {
    let t = (r / h) * (r / h);
    (t + 1e-9).floor() as usize
}

/// `r_d(s)`: number of `m in Z^d` with `|m|^2 = s`, for `s = 0..=s_max`.
pub(crate) fn lattice_shell_counts(d: usize, s_max: usize) -> Vec<f64> {
    let mut one = vec![0.0; s_max + 1];
    one[0] = 1.0;
    let mut j = 1usize;
    while j * j <= s_max {
        one[j * j] = 2.0;
        j += 1;
    }
    let mut acc = one.clone();
    for _ in 1..d {
        let mut next = vec![0.0; s_max + 1];
        for (s, slot) in next.iter_mut().enumerate() {
            let mut j = 0usize;
            let mut total = 0.0;
            while j * j <= s {
                total += one[j * j] * acc[s - j * j];
                j += 1;
            }
            *slot = total;
        }
        acc = next;
    }
    acc
}

/// Shell weight `s^{k/2}` with `0^0 = 1`.
#[inline]
fn shell_weight(s: usize, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else if k % 2 == 0 {
        (s as f64).powi((k / 2) as i32)
    } else {
        (s as f64).powf(k as f64 / 2.0)
    }
}

#[inline]
fn shells(dim: usize, n: usize) -> usize {
    dim * (n - 1) * (n - 1) + 1
}

/// Reusable per-level buffers for shell histograms of one cube size.
///
/// Level `k` holds the histograms of the `n` slabs of a `k`-cube, each
/// truncated to `width(k - 1)` shells. Buffers are allocated once and reused
/// so that large histograms do not fault in fresh pages on every slab.
struct Histograms {
    n: usize,
    cap: usize,
    levels: Vec<Vec<f64>>,
    live: Vec<Vec<bool>>,
}

impl Histograms {
    fn new(top: usize, n: usize, cap: usize) -> Self {
        let mut levels = vec![Vec::new(); top + 1];
        for (k, level) in levels.iter_mut().enumerate().skip(3) {
            *level = vec![0.0; n * n.pow((k - 1) as u32) * Self::width_for(k - 1, n, cap)];
        }
        Self { n, cap, levels, live: vec![Vec::new(); top + 1] }
    }

    fn width_for(dim: usize, n: usize, cap: usize) -> usize {
        shells(dim, n).min(cap)
    }

    fn width(&self, dim: usize) -> usize {
        Self::width_for(dim, self.n, self.cap)
    }

    /// Writes the histogram of the `dim`-cube `vals` into `out`.
    ///
    /// Layout is `[node][s]` with `width(dim)` entries per node, nodes ordered
    /// with the first axis fastest (the reverse of the grid order).
    fn fill(&mut self, vals: &[f64], dim: usize, out: &mut [f64]) {
        let n = self.n;
        let out_w = self.width(dim);
        out.fill(0.0);
        if dim <= 2 {
            direct_histogram(vals, dim, n, out_w, out);
            return;
        }
        let m = n.pow((dim - 1) as u32);
        let sub_w = self.width(dim - 1);
        let mut subs = std::mem::take(&mut self.levels[dim]);
        let mut live = std::mem::take(&mut self.live[dim]);
        live.clear();
        for (y1, slot) in subs.chunks_mut(m * sub_w).enumerate() {
            let slab = &vals[y1 * m..(y1 + 1) * m];
            let nonzero = slab.iter().any(|v| *v != 0.0);
            if nonzero {
                self.fill(slab, dim - 1, slot);
            }
            live.push(nonzero);
        }
        let subs_ref = &subs;
        let live_ref = &live;
        let scatter = |(rest, dst): (usize, &mut [f64])| {
            for x1 in 0..n {
                let row = &mut dst[x1 * out_w..(x1 + 1) * out_w];
                for y1 in 0..n {
                    if !live_ref[y1] {
                        continue;
                    }
                    let delta = (x1 as isize - y1 as isize).pow(2) as usize;
                    if delta >= out_w {
                        continue;
                    }
                    let len = sub_w.min(out_w - delta);
                    let base = (y1 * m + rest) * sub_w;
                    let src = &subs_ref[base..base + len];
                    for (o, s) in row[delta..delta + len].iter_mut().zip(src) {
                        *o += *s;
                    }
                }
            }
        };
        if out.len() >= 1 << 20 {
            out.par_chunks_mut(n * out_w).enumerate().for_each(scatter);
        } else {
            out.chunks_mut(n * out_w).enumerate().for_each(scatter);
        }
        self.levels[dim] = subs;
        self.live[dim] = live;
    }
}

/// Histogram by direct enumeration of node pairs, for `dim <= 2`.
fn direct_histogram(vals: &[f64], dim: usize, n: usize, w: usize, out: &mut [f64]) {
    match dim {
        0 => out[0] = vals[0],
        1 => {
            for x in 0..n {
                for (y, v) in vals.iter().enumerate() {
                    let s = (x as isize - y as isize).pow(2) as usize;
                    if s < w {
                        out[x * w + s] += v;
                    }
                }
            }
        }
        2 => {
            // vals is in grid order (y1 slow); out is reversed (x1 fast)
            for x2 in 0..n {
                for x1 in 0..n {
                    let row = &mut out[(x2 * n + x1) * w..(x2 * n + x1 + 1) * w];
                    for y1 in 0..n {
                        let d1 = (x1 as isize - y1 as isize).pow(2) as usize;
                        for y2 in 0..n {
                            let s = d1 + (x2 as isize - y2 as isize).pow(2) as usize;
                            if s < w {
                                row[s] += vals[y1 * n + y2];
                            }
                        }
                    }
                }
            }
        }
        _ => unreachable!("direct histogram only for dim <= 2"),
    }
}

/// Grid-order flat index of the node at reversed-order position `rev`.
fn reversed_to_flat(mut rev: usize, dim: usize, n: usize) -> usize {
    let mut flat = 0;
    for _ in 0..dim {
        // first axis is fastest in `rev` and slowest in `flat`
        flat = flat * n + rev % n;
        rev /= n;
    }
    flat
}

/// Weighted ball sums `sum_{|y - x|^2 <= S_t h^2} |f(y)| w(|y - x|^2)` for
/// every node `x` of a `dim`-cube and every threshold `S_t` (nondecreasing).
/// Output layout is `[node][t]` in grid order.
fn ball_sums(vals: &[f64], dim: usize, n: usize, thresholds: &[usize], k: u32) -> Vec<f64> {
    let nt = thresholds.len();
    let m = n.pow((dim - 1) as u32);
    let cap = thresholds.last().map_or(1, |t| t + 1);
    let mut ws = Histograms::new(dim - 1, n, cap);
    let sub_w = ws.width(dim - 1);
    let weights: Vec<f64> = (0..shells(dim, n).min(cap)).map(|s| shell_weight(s, k)).collect();
    let mut sub = vec![0.0; m * sub_w];
    // layout [rest (reversed)][x1][t]
    let mut acc = vec![0.0; m * n * nt];
    for y1 in 0..n {
        let slab = &vals[y1 * m..(y1 + 1) * m];
        if slab.iter().all(|v| *v == 0.0) {
            continue;
        }
        ws.fill(slab, dim - 1, &mut sub);
        if k == 0 {
            for row in sub.chunks_mut(sub_w) {
                for s in 1..sub_w {
                    row[s] += row[s - 1];
                }
            }
        }
        let sub = &sub;
        let weights = &weights;
        let fill = |(rest, dst): (usize, &mut [f64])| {
            let row = &sub[rest * sub_w..(rest + 1) * sub_w];
            for x1 in 0..n {
                let delta = (x1 as isize - y1 as isize).pow(2) as usize;
                let out = &mut dst[x1 * nt..(x1 + 1) * nt];
                if k == 0 {
                    for (o, &t) in out.iter_mut().zip(thresholds) {
                        if t >= delta {
                            *o += row[(t - delta).min(sub_w - 1)];
                        }
                    }
                } else {
                    let mut running = 0.0;
                    let mut next = 0usize;
                    for (o, &t) in out.iter_mut().zip(thresholds) {
                        if t < delta {
                            continue;
                        }
                        let lim = (t - delta).min(sub_w - 1);
                        while next <= lim {
                            running += weights[next + delta] * row[next];
                            next += 1;
                        }
                        *o += running;
                    }
                }
            }
        };
        if acc.len() >= 1 << 16 {
            acc.par_chunks_mut(n * nt).enumerate().for_each(fill);
        } else {
            acc.chunks_mut(n * nt).enumerate().for_each(fill);
        }
    }
    let mut sums = vec![0.0; m * n * nt];
    for rest in 0..m {
        // rest is reversed over axes 2..dim; x1 is the first axis
        let rest_flat = reversed_to_flat(rest, dim - 1, n);
        for x1 in 0..n {
            let flat = x1 * m + rest_flat;
            let src = (rest * n + x1) * nt;
            sums[flat * nt..(flat + 1) * nt].copy_from_slice(&acc[src..src + nt]);
        }
    }
    sums
}

/// Maximal function of `|vals|` on a `dim`-cube of side `n` and spacing `h`,
/// using weights `|y|^k` and the lattice normalization.
pub(crate) fn lattice_maximal(
    vals: &[f64],
    dim: usize,
    n: usize,
    h: f64,
    radii: &RadiiSet,
    k: u32,
) -> Vec<f64> {
    let abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    let thresholds: Vec<usize> = radii.radii().iter().map(|&r| shell_threshold(r, h)).collect();
    let s_max = *thresholds.last().unwrap();
    let counts = lattice_shell_counts(dim, s_max);
    let mut denom = Vec::with_capacity(thresholds.len());
    let mut total = 0.0;
    let mut s = 0usize;
    for &t in &thresholds {
        while s <= t {
            total += counts[s] * shell_weight(s, k);
            s += 1;
        }
        denom.push(total);
    }
    let sums = ball_sums(&abs, dim, n, &thresholds, k);
    let nt = thresholds.len();
    abs.par_iter()
        .enumerate()
        .map(|(i, &center)| {
            let mut best = center;
            for t in 0..nt {
                if denom[t] > 0.0 {
                    best = best.max(sums[i * nt + t] / denom[t]);
                }
            }
            best
        })
        .collect()
}

/// Centered Hardy–Littlewood maximal function of `|f|`.
pub fn hl_maximal(f: &GridFunction, radii: &RadiiSet) -> Result<GridFunction> {
    weighted_maximal(f, 0, radii)
}

/// Maximal function of ball averages of `|f|` against the weight `|y|^k`.
pub fn weighted_maximal(f: &GridFunction, k: u32, radii: &RadiiSet) -> Result<GridFunction> {
    f.require(Domain::Physical)?;
    let spec = *f.spec();
    let vals = f.real_parts();
    let out = lattice_maximal(&vals, spec.dim(), spec.points_per_axis(), spec.h(), radii, k);
    Ok(GridFunction::from_real_unchecked(spec, out))
}

/// One-dimensional maximal function along `axis` of an array with the given
/// shape (last axis fastest), applied independently to every fiber.
pub(crate) fn maximal_along(
    vals: &[f64],
    shape: &[usize],
    axis: usize,
    h: f64,
    radii: &RadiiSet,
) -> Vec<f64> {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![0.0; vals.len()];
    let fibers: Vec<(usize, Vec<f64>)> = (0..outer * stride)
        .into_par_iter()
        .map(|fiber| {
            let (o, inner) = (fiber / stride, fiber % stride);
            let base = o * n * stride + inner;
            let line: Vec<f64> = (0..n).map(|j| vals[base + j * stride]).collect();
            (base, lattice_maximal(&line, 1, n, h, radii, 0))
        })
        .collect();
    for (base, line) in fibers {
        for (j, v) in line.into_iter().enumerate() {
            out[base + j * stride] = v;
        }
    }
    out
}

/// Centered one-dimensional maximal function along `axis`, per fiber.
pub fn maximal_1d(f: &GridFunction, axis: usize, radii: &RadiiSet) -> Result<GridFunction> {
    f.require(Domain::Physical)?;
    let spec = *f.spec();
    if axis >= spec.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: spec.dim() });
    }
    let shape = vec![spec.points_per_axis(); spec.dim()];
    let out = maximal_along(&f.real_parts(), &shape, axis, spec.h(), radii);
    Ok(GridFunction::from_real_unchecked(spec, out))
}

/// Lattice ball average of `|f|` at one node, by direct enumeration.
pub fn ball_average_at(f: &GridFunction, flat: usize, r: f64) -> Result<f64> {
    f.require(Domain::Physical)?;
    let spec = f.spec();
    let d = spec.dim();
    let n = spec.points_per_axis() as isize;
    let s = shell_threshold(r, spec.h());
    let reach = (s as f64).sqrt().floor() as isize;
    let mut center = vec![0usize; d];
    spec.unflatten(flat, &mut center);
    let vals = f.values();
    let mut offset = vec![-reach; d];
    let mut sum = 0.0;
    let mut count = 0.0;
    loop {
        let sq: isize = offset.iter().map(|o| o * o).sum();
        if sq as usize <= s {
            count += 1.0;
            let mut inside = true;
            let mut idx = 0usize;
            for a in 0..d {
                let j = center[a] as isize + offset[a];
                if j < 0 || j >= n {
                    inside = false;
                    break;
                }
                idx = idx * n as usize + j as usize;
            }
            if inside {
                sum += vals[idx].norm();
            }
        }
        let mut a = 0;
        loop {
            if a == d {
                return Ok(sum / count);
            }
            offset[a] += 1;
            if offset[a] <= reach {
                break;
            }
            offset[a] = -reach;
            a += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use approx::assert_relative_eq;

    /// Independent triple loop with the same conventions.
    fn brute(f: &GridFunction, radii: &RadiiSet, k: u32) -> Vec<f64> {
        let spec = f.spec();
        let h = spec.h();
        let vals = f.abs_values();
        (0..spec.len())
            .map(|i| {
                let xi = spec.node(i);
                let mut best = vals[i];
                for &r in radii.radii() {
                    let mut num = 0.0;
                    for (j, v) in vals.iter().enumerate() {
                        let yj = spec.node(j);
                        let sq: f64 = xi.iter().zip(&yj).map(|(a, b)| ((a - b) / h).round().powi(2)).sum();
                        if sq <= (r / h).powi(2) + 1e-9 {
                            num += v * sq.powf(k as f64 / 2.0);
                        }
                    }
                    let s = shell_threshold(r, h) as i64;
                    let reach = (s as f64).sqrt() as i64;
                    let mut den = 0.0;
                    let d = spec.dim() as u32;
                    let side = (2 * reach + 1) as usize;
                    for c in 0..side.pow(d) {
                        let mut cc = c;
                        let mut sq = 0i64;
                        for _ in 0..d {
                            let o = (cc % side) as i64 - reach;
                            sq += o * o;
                            cc /= side;
                        }
                        if sq <= s {
                            den += (sq as f64).powf(k as f64 / 2.0);
                        }
                    }
                    best = best.max(num / den);
                }
                best
            })
            .collect()
    }

    #[test]
    fn default_radii_endpoints() {
        let spec = make_grid(1, 1.0, 4).unwrap();
        assert_eq!(default_radii(&spec, 2).unwrap().radii(), &[0.5, 2.0]);
        let three = default_radii(&spec, 3).unwrap();
        assert_relative_eq!(three.radii()[1], 1.0, max_relative = 1e-15);
        assert!(default_radii(&spec, 1).is_err());
        let many = default_radii(&make_grid(3, 2.0, 16).unwrap(), 32).unwrap();
        assert!(many.radii().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lattice_counts() {
        let c2 = lattice_shell_counts(2, 5);
        assert_eq!(c2, vec![1.0, 4.0, 4.0, 0.0, 4.0, 8.0]);
        let c3 = lattice_shell_counts(3, 3);
        assert_eq!(c3, vec![1.0, 6.0, 12.0, 8.0]);
    }

    #[test]
    fn constant_maps_to_constant() {
        let spec = make_grid(3, 1.0, 8).unwrap();
        let radii = default_radii(&spec, 8).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        for k in [0, 1, 2] {
            let m = weighted_maximal(&one, k, &radii).unwrap();
            assert!(m.real_parts().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn matches_brute_force_exactly() {
        let spec = make_grid(2, 2.0, 8).unwrap();
        let f = sample(&spec, |x| ((x[0] * 3.0 + x[1] * 5.0) * 8.0).round().rem_euclid(7.0) / 4.0).unwrap();
        let radii = RadiiSet::new(vec![0.5, 0.8, 1.3, 2.2, 4.0]).unwrap();
        for k in [0, 2] {
            let fast = weighted_maximal(&f, k, &radii).unwrap().real_parts();
            assert_eq!(fast, brute(&f, &radii, k), "k={k}");
        }
        let cube = make_grid(3, 1.5, 6).unwrap();
        let g = sample(&cube, |x| ((x[0] * 2.0 - x[1] * 4.0 + x[2] * 6.0) * 4.0).round().rem_euclid(5.0) / 8.0).unwrap();
        let radii3 = RadiiSet::new(vec![0.6, 1.1, 1.9, 3.0, 6.0]).unwrap();
        for k in [0, 2] {
            assert_eq!(weighted_maximal(&g, k, &radii3).unwrap().real_parts(), brute(&g, &radii3, k), "d=3 k={k}");
        }
        let hyper = make_grid(4, 1.0, 4).unwrap();
        let q = sample(&hyper, |x| ((x[0] - 2.0 * x[1] + 3.0 * x[2] - x[3]) * 2.0).round().rem_euclid(3.0) / 2.0).unwrap();
        let radii4 = RadiiSet::new(vec![0.5, 0.9, 1.4, 2.5]).unwrap();
        for k in [0, 2] {
            assert_eq!(weighted_maximal(&q, k, &radii4).unwrap().real_parts(), brute(&q, &radii4, k), "d=4 k={k}");
        }
        let k1 = weighted_maximal(&f, 1, &radii).unwrap().real_parts();
        for (a, b) in k1.iter().zip(brute(&f, &radii, 1)) {
            assert_relative_eq!(*a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn indicator_far_value() {
        // continuum sup at x = 2 is 1/3 (r = 3)
        let spec = make_grid(1, 8.0, 256).unwrap();
        let f = sample(&spec, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let radii = RadiiSet::linear(0.0625, 6.0, 96).unwrap();
        let m = hl_maximal(&f, &radii).unwrap();
        let j = (0..256).find(|&j| (spec.coord(j) - 2.03125).abs() < 1e-12).unwrap();
        assert!((m.real_parts()[j] - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn spike_fiber() {
        let spec = make_grid(1, 4.0, 64).unwrap();
        let mut v = vec![0.0; 64];
        v[32] = 1.0;
        let f = GridFunction::from_real(spec, v).unwrap();
        let radii = RadiiSet::new((1..=64).map(|i| i as f64 * spec.h()).collect()).unwrap();
        let m = maximal_1d(&f, 0, &radii).unwrap();
        for dist in [4usize, 8, 16] {
            let s = dist as f64 * spec.h();
            let got = m.real_parts()[32 + dist];
            let expected = spec.h() / (2.0 * s);
            assert!((got - expected).abs() / expected < 0.15, "{got} vs {expected}");
        }
        assert_eq!(m.real_parts(), hl_maximal(&f, &radii).unwrap().real_parts());
        assert!(matches!(maximal_1d(&f, 1, &radii), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn fibers_along_each_axis() {
        let spec = make_grid(2, 1.0, 6).unwrap();
        let f = sample(&spec, |x| (x[0] + 2.0 * x[1]).sin().abs()).unwrap();
        let radii = default_radii(&spec, 5).unwrap();
        let vals = f.real_parts();
        for axis in 0..2 {
            let m = maximal_1d(&f, axis, &radii).unwrap().real_parts();
            let fspec = make_grid(1, 1.0, 6).unwrap();
            for other in 0..6 {
                let line: Vec<f64> = (0..6)
                    .map(|j| if axis == 0 { vals[j * 6 + other] } else { vals[other * 6 + j] })
                    .collect();
                let g = hl_maximal(&GridFunction::from_real(fspec, line).unwrap(), &radii).unwrap();
                for j in 0..6 {
                    let idx = if axis == 0 { j * 6 + other } else { other * 6 + j };
                    assert_eq!(m[idx], g.real_parts()[j]);
                }
            }
        }
    }

    #[test]
    fn direct_ball_average() {
        let spec = make_grid(2, 2.0, 8).unwrap();
        let f = sample(&spec, |x| (x[0] - x[1]).abs()).unwrap();
        let r = 1.3;
        let thresholds = [shell_threshold(r, spec.h())];
        let counts = lattice_shell_counts(2, thresholds[0]);
        let den: f64 = counts.iter().sum();
        let sums = ball_sums(&f.abs_values(), 2, 8, &thresholds, 0);
        for flat in [0, 17, 36, 63] {
            assert_relative_eq!(ball_average_at(&f, flat, r).unwrap(), sums[flat] / den, max_relative = 1e-13);
        }
    }
}
