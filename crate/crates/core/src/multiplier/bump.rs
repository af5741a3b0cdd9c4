use crate::error::Result;

use super::profile::RadialProfile;
use super::surface::SurfaceMultiplier;

/// Smooth transition from 0 on `t <= 0` to 1 on `t >= 1`:
/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`.
pub fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

pub fn transition_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        let s = a + b;
        a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex(pub u32);

impl DyadicIndex {
    pub fn get(&self) -> u32 {
        self.0
    }

    fn scale(&self) -> f64 {
        (self.0 as f64).exp2()
    }

    /// Support `[2^{l-1}, 2^{l+1}]`, or `[0, 2]` for `l = 0`.
    pub fn support(&self) -> (f64, f64) {
        if self.0 == 0 {
            (0.0, 2.0)
        } else {
            (0.5 * self.scale(), 2.0 * self.scale())
        }
    }
}

/// `phi_0(s) = 1 - transition(s - 1)`: equal to 1 on `[0, 1]`, 0 beyond 2.
pub fn phi0(s: f64) -> f64 {
    1.0 - transition(s - 1.0)
}

pub fn phi0_derivative(s: f64) -> f64 {
    -transition_derivative(s - 1.0)
}

/// `phi_l(s) = phi_0(2^{-l} s) - phi_0(2^{1-l} s)` for `l >= 1`.
pub fn phi(l: DyadicIndex, s: f64) -> f64 {
    if l.0 == 0 {
        return phi0(s);
    }
    let k = l.scale();
    phi0(s / k) - phi0(2.0 * s / k)
}

pub fn phi_derivative(l: DyadicIndex, s: f64) -> f64 {
    if l.0 == 0 {
        return phi0_derivative(s);
    }
    let k = l.scale();
    phi0_derivative(s / k) / k - 2.0 * phi0_derivative(2.0 * s / k) / k
}

/// The partition element `phi_l` as a profile.
pub fn bump(l: DyadicIndex) -> RadialProfile {
    RadialProfile::new(format!("phi[l={}]", l.0), l.support(), Some(1.0), move |s| phi(l, s))
}

/// Largest `|g|` on `[a, b]`: dense sampling followed by golden-section
/// refinement around the best samples, with a small relative margin.
pub fn sup_on_interval<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, samples: usize) -> f64 {
    let step = (b - a) / samples as f64;
    let vals: Vec<f64> = (0..=samples).map(|i| g(a + i as f64 * step).abs()).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = vals[order[0]];
    for &i in order.iter().take(8) {
        let lo = (a + (i as f64 - 1.0) * step).max(a);
        let hi = (a + (i as f64 + 1.0) * step).min(b);
        best = best.max(golden_max(|s| g(s).abs(), lo, hi));
    }
    best
}

fn golden_max<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        }
        if hi - lo < 1e-12 * (1.0 + hi.abs()) {
            break;
        }
    }
    f1.max(f2)
}

const SUP_MARGIN: f64 = 1.0 + 1e-9;

fn sweep_samples(l: DyadicIndex) -> usize {
    // several samples per oscillation of m on the support
    (64.0 * l.support().1).max(2048.0) as usize
}

/// `m_l = phi_l m`, with its measured sup norm as bound.
pub fn dyadic_piece(d: usize, l: DyadicIndex) -> Result<RadialProfile> {
    let m = SurfaceMultiplier::new(d)?;
    let eval = move |s: f64| phi(l, s) * m.eval(s);
    let (a, b) = l.support();
    let bound = sup_on_interval(eval, a, b, sweep_samples(l)) * SUP_MARGIN;
    Ok(RadialProfile::new(format!("m_l[d={d},l={}]", l.0), (a, b), Some(bound), eval))
}

/// `s (d/ds) m_l(s) = s (phi_l' m + phi_l m')`.
pub fn tilde_piece(d: usize, l: DyadicIndex) -> Result<RadialProfile> {
    let m = SurfaceMultiplier::new(d)?;
    let eval = move |s: f64| {
        let p = phi(l, s);
        let dp = phi_derivative(l, s);
        let mut v = 0.0;
        if dp != 0.0 {
            v += dp * m.eval(s);
        }
        if p != 0.0 {
            v += p * m.derivative(s);
        }
        s * v
    };
    let (a, b) = l.support();
    let bound = sup_on_interval(eval, a, b, sweep_samples(l)) * SUP_MARGIN;
    Ok(RadialProfile::new(format!("tilde_m_l[d={d},l={}]", l.0), (a, b), Some(bound), eval))
}
