use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::bump::{dyadic_piece, sup_on_interval, tilde_piece, DyadicIndex};
use super::kernel::funk_hecke_kernel;

/// Normalized decay constants of the dyadic pieces at level `l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub l: u32,
    /// `||m_l||_inf 2^{l(d-1)/2}`
    pub c1: f64,
    /// `||s m_l'||_inf 2^{l(d-3)/2}`
    pub c2: f64,
    /// `sup_{|x| <= 8} |m_l^vee(x)| (1 + |x|)^{d+1} / 2^l`
    pub c3: f64,
}

const KERNEL_WINDOW: f64 = 8.0;

/// Decay constants for `l = 1..=l_max`.
pub fn decay_constants(d: usize, l_max: u32) -> Result<Vec<DecayRow>> {
    if d < 3 {
        return Err(Error::UnsupportedDimension { dim: d, reason: "decay constants need d >= 3" });
    }
    if l_max < 2 {
        return Err(Error::InvalidArgument(format!("l_max must be >= 2, got {l_max}")));
    }
    (1..=l_max)
        .map(|l| {
            let idx = DyadicIndex(l);
            let scale = (l as f64).exp2();
            let c1 = dyadic_piece(d, idx)?.sup_bound().unwrap_or(0.0) * scale.powf((d as f64 - 1.0) / 2.0);
            let c2 = tilde_piece(d, idx)?.sup_bound().unwrap_or(0.0) * scale.powf((d as f64 - 3.0) / 2.0);
            Ok(DecayRow { l, c1, c2, c3: kernel_constant(d, idx)? })
        })
        .collect()
}

fn kernel_constant(d: usize, l: DyadicIndex) -> Result<f64> {
    let scale = (l.0 as f64).exp2();
    funk_hecke_kernel(l, d, 0.0)?;
    let weighted = |x: f64| {
        funk_hecke_kernel(l, d, x).unwrap_or(0.0) * (1.0 + x).powi(d as i32 + 1) / scale
    };
    let samples = ((KERNEL_WINDOW * scale * 8.0) as usize).max(512);
    // dense sweep in parallel, then refine around the best samples
    let step = KERNEL_WINDOW / samples as f64;
    let vals: Vec<f64> = (0..=samples).into_par_iter().map(|i| weighted(i as f64 * step).abs()).collect();
    let best = vals.iter().copied().fold(0.0, f64::max);
    let i = vals.iter().position(|&v| v == best).unwrap_or(0);
    let lo = (i as f64 - 2.0).max(0.0) * step;
    let hi = ((i as f64 + 2.0) * step).min(KERNEL_WINDOW);
    Ok(best.max(sup_on_interval(weighted, lo, hi, 16)))
}

/// Writes the table as CSV with header `l,c1,c2,c3`.
pub fn write_decay_csv<W: Write>(rows: &[DecayRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["l", "c1", "c2", "c3"])?;
    }
    w.flush()?;
    Ok(())
}
