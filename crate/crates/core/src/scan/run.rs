use std::time::Instant;

use crate::error::{Error, Result};
use crate::euclidean_max::{default_radii, hl_maximal, weighted_maximal, RadiiSet};
use crate::grid::{make_grid, GridFunction, VectorField};
use crate::grushin::{cc_domination_note, grushin_maximal, grushin_mixed_norm, iterated_maximal, GrushinFunction, GrushinGrid};
use crate::multiplier::{dyadic_piece, maximal_multiplier, spherical_maximal, DyadicIndex};
use crate::norms::{mixed_norm, Exponent};
use crate::rotations::{lemma2_domination, DescentQuadrature, DescentSplit};
use crate::squarefn::{square_function, TGrid};

use super::config::{Family, Operator, ScanConfig};
use super::families::{build_family, build_grushin_family};
use super::report::{ScanReport, ScanRow};

enum Batch {
    Grid(VectorField),
    Grushin(Vec<GrushinFunction>),
}

impl Batch {
    fn mixed(&self, p: Exponent, q: Exponent) -> Result<f64> {
        match self {
            Self::Grid(f) => mixed_norm(f, p, q),
            Self::Grushin(f) => grushin_mixed_norm(f, p, q),
        }
    }
}

struct Applied {
    input: Batch,
    output: Batch,
    wall_ms: f64,
    extra: Vec<String>,
}

/// Least-squares slope of `ln g` against `ln |x|` over nodes with
/// `lo <= |x| <= hi` and `g > 0`.
pub fn decay_slope(g: &GridFunction, lo: f64, hi: f64) -> Option<f64> {
    let spec = g.spec();
    let vals = g.real_parts();
    let pts: Vec<(f64, f64)> = (0..spec.len())
        .filter_map(|i| {
            let r = spec.node(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            (r >= lo && r <= hi && vals[i] > 0.0).then(|| (r.ln(), vals[i].ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| sxy / sxx)
}

fn apply(cfg: &ScanConfig, d: usize) -> Result<Applied> {
    let (l, n) = cfg.grid_for(d);
    let k = cfg.radii_k;
    let mut extra = vec![format!("L={l}"), format!("N={n}"), format!("K={k}")];
    if cfg.operator.is_grushin() {
        let grid = GrushinGrid::new(d, l, l, n, n)?;
        let input = build_grushin_family(cfg.family, &grid, cfg.n_members, cfg.seed)?;
        let start = Instant::now();
        let output = match cfg.operator {
            Operator::Mk => {
                let radii = RadiiSet::geometric(grid.hx(), 2.0 * l, k)?;
                input.iter().map(|f| grushin_maximal(f, &radii)).collect::<Result<Vec<_>>>()?
            }
            _ => {
                let rx = RadiiSet::geometric(grid.hx(), 2.0 * l * (d as f64).sqrt(), k)?;
                let ru = RadiiSet::geometric(grid.hu(), 2.0 * l, k)?;
                input.iter().map(|f| iterated_maximal(f, &rx, &ru)).collect::<Result<Vec<_>>>()?
            }
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        extra.push("cc=via_MK".into());
        return Ok(Applied { input: Batch::Grushin(input), output: Batch::Grushin(output), wall_ms, extra });
    }
    let spec = make_grid(d, l, n)?;
    let input = build_family(cfg.family, &spec, cfg.n_members, cfg.seed)?;
    let start = Instant::now();
    let output = match cfg.operator {
        Operator::Hl => input.map(|f| hl_maximal(f, &default_radii(&spec, k)?))?,
        Operator::HlWeighted => {
            extra.push(format!("k={}", cfg.k));
            input.map(|f| weighted_maximal(f, cfg.k, &default_radii(&spec, k)?))?
        }
        Operator::Sph => {
            let radii = RadiiSet::geometric(spec.h(), l, k)?;
            let out = input.map(|f| spherical_maximal(f, d, &radii))?;
            if cfg.family == Family::RemarkBump {
                if let Some(s) = decay_slope(&out.members()[0], 2.0, 4.0) {
                    extra.push(format!("slope={s}"));
                }
            }
            out
        }
        Operator::MultL => {
            extra.push(format!("l={}", cfg.l));
            let omega = dyadic_piece(d, DyadicIndex(cfg.l))?;
            let radii = RadiiSet::geometric(spec.h(), l, k)?;
            input.map(|f| maximal_multiplier(f, &omega, &radii))?
        }
        Operator::Sqfn => {
            let omega = dyadic_piece(d, DyadicIndex(cfg.l))?;
            let t = TGrid::for_profile(&omega, &spec, cfg.nodes_per_annulus)?;
            extra.push(format!("l={}", cfg.l));
            extra.push(format!("t_nodes={}", t.len()));
            input.map(|f| square_function(f, &omega, &t))?
        }
        Operator::Descent => {
            let split = DescentSplit::new(d, cfg.d_prime)?;
            extra.push(format!("d_prime={}", cfg.d_prime));
            extra.push(format!("n_mc={}", cfg.n_mc));
            let radii = default_radii(&spec, k)?;
            let quad = DescentQuadrature { seed: cfg.seed, ..DescentQuadrature::default() };
            input.map(|f| lemma2_domination(f, &split, &radii, cfg.n_mc, cfg.seed, &quad))?
        }
        Operator::Mk | Operator::MkIter => unreachable!("handled above"),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Applied { input: Batch::Grid(input), output: Batch::Grid(output), wall_ms, extra })
}

fn error_rows(cfg: &ScanConfig, d: usize, err: &Error) -> Vec<ScanRow> {
    let msg = err.to_string().replace([';', '\n'], " ");
    cfg.exponent_pairs()
        .into_iter()
        .map(|(p, q)| ScanRow {
            operator: cfg.operator,
            d,
            p,
            q,
            family: cfg.family,
            n_members: cfg.n_members,
            input_norm: f64::NAN,
            output_norm: f64::NAN,
            ratio: f64::NAN,
            wall_ms: 0.0,
            extra: format!("error={msg}"),
        })
        .collect()
}

fn rows_for(cfg: &ScanConfig, d: usize) -> Result<Vec<ScanRow>> {
    let applied = apply(cfg, d)?;
    let extra = applied.extra.join(";");
    cfg.exponent_pairs()
        .into_iter()
        .map(|(p, q)| {
            let input_norm = applied.input.mixed(p, q)?;
            let output_norm = applied.output.mixed(p, q)?;
            Ok(ScanRow {
                operator: cfg.operator,
                d,
                p,
                q,
                family: cfg.family,
                n_members: cfg.n_members,
                input_norm,
                output_norm,
                ratio: output_norm / input_norm,
                wall_ms: (applied.wall_ms * 1e3).round() / 1e3,
                extra: extra.clone(),
            })
        })
        .collect()
}

/// Runs the sweep. Failures for a dimension become error rows.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let mut report = ScanReport::default();
    for &d in &cfg.d_range {
        match rows_for(cfg, d) {
            Ok(rows) => report.rows.extend(rows),
            Err(e) => report.rows.extend(error_rows(cfg, d, &e)),
        }
    }
    if cfg.operator.is_grushin() {
        report.notes.push(cc_domination_note().to_string());
    }
    report.sort();
    Ok(report)
}
