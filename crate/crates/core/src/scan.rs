//! Grid scans of the fundamental domain.
//!
//! Every grid point is classified independently (closed-form predicate plus
//! a certified search), so cells run in parallel; rows are returned in index
//! order, which keeps output byte-identical across runs.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flat::{
    family_n_witness, find_flat_plane_with, in_region_z, m2_flat_locus, m2_witness, FlatWitness, Optimizer,
    SearchOptions,
};
use crate::lie::SpaceConfig;
use crate::metric::MetricOperator;
use crate::orbit::FundamentalPoint;
use crate::quat::Quaternion;

/// Default inset of the interior grid from the edges of `[0, pi/2]^2`.
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanConfig {
    pub n: usize,
    pub t: f64,
    pub resolution: usize,
    /// Lift-curvature tolerance of a valid witness.
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub margin: f64,
    pub include_boundary: bool,
    pub optimizer: Optimizer,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n: 2,
            t: 1.0,
            resolution: 200,
            tol: 1e-9,
            seed: 42,
            restarts: 20,
            margin: DEFAULT_MARGIN,
            include_boundary: false,
            optimizer: Optimizer::default(),
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        if self.resolution < 2 {
            return bad(format!("resolution must be >= 2, got {}", self.resolution));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(0.0..FRAC_PI_2 / 2.0).contains(&self.margin) {
            return bad(format!("margin must lie in [0, pi/4), got {}", self.margin));
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<MetricOperator> {
        MetricOperator::cheeger(SpaceConfig::new(self.n)?, self.t)
    }

    /// Grid coordinates along either axis.
    pub fn axis(&self) -> Vec<f64> {
        let span = FRAC_PI_2 - 2.0 * self.margin;
        let last = (self.resolution - 1) as f64;
        (0..self.resolution).map(|i| self.margin + span * i as f64 / last).collect()
    }

    /// Grid spacing.
    pub fn cell(&self) -> f64 {
        (FRAC_PI_2 - 2.0 * self.margin) / (self.resolution - 1) as f64
    }

    fn search_options(&self) -> SearchOptions {
        SearchOptions { restarts: self.restarts, optimizer: self.optimizer, lift_tol: self.tol }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Boundary,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: f64,
    pub alpha: f64,
    pub best_objective: f64,
    pub flat_predicted: bool,
    pub flat_found: bool,
    pub lift_numerator: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

/// Full outcome of classifying one point, including the witness if any.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub row: ScanRow,
    pub witness: Option<FlatWitness>,
    /// `"closed_form"` or `"search"`.
    pub method: &'static str,
}

/// Closed-form prediction: the `M_2` locus for `n = 2`, region `Z` otherwise.
pub fn flat_predicted(pt: &FundamentalPoint, n: usize) -> bool {
    if n == 2 {
        m2_flat_locus(pt)
    } else {
        in_region_z(pt)
    }
}

fn witness_objective(w: &FlatWitness) -> f64 {
    w.residuals.condition_b_norm.powi(2) + w.residuals.condition_c_gram
}

/// Classifies one point with the search seeded by `seed`.
pub fn classify_seeded(
    pt: &FundamentalPoint,
    cfg: &ScanConfig,
    op: &MetricOperator,
    seed: u64,
) -> Result<Classification> {
    let predicted = flat_predicted(pt, cfg.n);
    if predicted {
        let closed = if cfg.n == 2 { m2_witness(pt, op) } else { family_n_witness(pt, Quaternion::I, op) };
        if let Ok(mut w) = closed {
            w.lift_tol = cfg.tol;
            if w.is_valid() {
                return Ok(Classification {
                    row: ScanRow {
                        theta: pt.theta,
                        alpha: pt.alpha,
                        best_objective: witness_objective(&w),
                        flat_predicted: true,
                        flat_found: true,
                        lift_numerator: w.residuals.lift_numerator,
                        region: None,
                    },
                    witness: Some(w),
                    method: "closed_form",
                });
            }
        }
    }
    let search = find_flat_plane_with(pt, op, seed, &cfg.search_options())?;
    let flat_found = search.found();
    Ok(Classification {
        row: ScanRow {
            theta: pt.theta,
            alpha: pt.alpha,
            best_objective: search.best_objective,
            flat_predicted: predicted,
            flat_found,
            lift_numerator: search.best_lift_numerator,
            region: None,
        },
        witness: search.witness,
        method: "search",
    })
}

/// Single-point version of [`grid_scan`], seeded with `cfg.seed`.
pub fn classify_point(pt: &FundamentalPoint, cfg: &ScanConfig) -> Result<ScanRow> {
    cfg.validate()?;
    Ok(classify_seeded(pt, cfg, &cfg.metric()?, cfg.seed)?.row)
}

/// The grid points in row order: interior points lexicographically in
/// `(theta index, alpha index)`, then (with `include_boundary`) the boundary
/// flat sets `alpha = pi/2`, `theta = pi/2` and the corner `(0, 0)`.
pub fn grid_points(cfg: &ScanConfig) -> Vec<(FundamentalPoint, Region)> {
    let axis = cfg.axis();
    let mut pts = Vec::with_capacity(axis.len() * axis.len());
    for &theta in &axis {
        for &alpha in &axis {
            pts.push((FundamentalPoint { theta, alpha }, Region::Interior));
        }
    }
    if cfg.include_boundary {
        for &theta in &axis {
            pts.push((FundamentalPoint { theta, alpha: FRAC_PI_2 }, Region::Boundary));
        }
        for &alpha in &axis {
            pts.push((FundamentalPoint { theta: FRAC_PI_2, alpha }, Region::Boundary));
        }
        pts.push((FundamentalPoint { theta: 0.0, alpha: 0.0 }, Region::Boundary));
    }
    pts
}

/// Classifies every grid point; cell `i` uses the seed `cfg.seed ^ i`.
pub fn grid_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let op = cfg.metric()?;
    let pts = grid_points(cfg);
    pts.par_iter()
        .enumerate()
        .map(|(i, (pt, region))| {
            let mut row = classify_seeded(pt, cfg, &op, cfg.seed ^ i as u64)?.row;
            if cfg.include_boundary {
                row.region = Some(*region);
            }
            Ok(row)
        })
        .collect()
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub const CSV_HEADER: &str = "theta,alpha,best_objective,flat_predicted,flat_found,lift_numerator";

/// CSV with 17 significant digits, `0`/`1` booleans and LF endings; a
/// trailing `region` column is added when any row carries one.
pub fn write_csv<W: Write + ?Sized>(rows: &[ScanRow], out: &mut W) -> std::io::Result<()> {
    let with_region = rows.iter().any(|r| r.region.is_some());
    if with_region {
        writeln!(out, "{CSV_HEADER},region")?;
    } else {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for r in rows {
        write!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            r.theta,
            r.alpha,
            r.best_objective,
            flag(r.flat_predicted),
            flag(r.flat_found),
            r.lift_numerator
        )?;
        if with_region {
            write!(out, ",{}", r.region.map_or("", Region::name))?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanReport<'a> {
    config: &'a ScanConfig,
    rows: &'a [ScanRow],
}

pub fn write_json<W: Write + ?Sized>(cfg: &ScanConfig, rows: &[ScanRow], out: &mut W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &ScanReport { config: cfg, rows })?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn small(n: usize, res: usize) -> ScanConfig {
        ScanConfig { n, resolution: res, restarts: 4, ..ScanConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::default().validate().is_ok());
        for bad in [
            ScanConfig { resolution: 1, ..ScanConfig::default() },
            ScanConfig { t: 0.0, ..ScanConfig::default() },
            ScanConfig { tol: -1.0, ..ScanConfig::default() },
            ScanConfig { n: 1, ..ScanConfig::default() },
            ScanConfig { restarts: 0, ..ScanConfig::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn axis_is_inset() {
        let cfg = small(2, 5);
        let axis = cfg.axis();
        assert_eq!(axis.len(), 5);
        assert_eq!(axis[0], DEFAULT_MARGIN);
        assert!((axis[4] - (FRAC_PI_2 - DEFAULT_MARGIN)).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let cfg = ScanConfig { restarts: 20, ..ScanConfig::default() };
        let on = FundamentalPoint::new(FRAC_PI_6, (1.0 / 2f64.sqrt()).atan()).unwrap();
        assert!(classify_point(&on, &cfg).unwrap().flat_found);

        let off = classify_point(&FundamentalPoint::new(FRAC_PI_8, FRAC_PI_8).unwrap(), &cfg).unwrap();
        assert!(!off.flat_found && !off.flat_predicted);
        assert!(off.best_objective > 1e-6);

        let cfg3 = ScanConfig { n: 3, ..cfg };
        let z = classify_point(&FundamentalPoint::new(FRAC_PI_3, FRAC_PI_4).unwrap(), &cfg3).unwrap();
        assert!(z.flat_predicted && z.flat_found);
    }

    #[test]
    fn row_count_and_order() {
        let cfg = small(2, 4);
        let rows = grid_scan(&cfg).unwrap();
        assert_eq!(rows.len(), 16);
        let axis = cfg.axis();
        assert_eq!((rows[1].theta, rows[1].alpha), (axis[0], axis[1]));
        assert_eq!((rows[4].theta, rows[4].alpha), (axis[1], axis[0]));
        assert!(rows.iter().all(|r| r.region.is_none()));
    }

    #[test]
    fn boundary_rows_are_labelled_and_flat() {
        let cfg = ScanConfig { include_boundary: true, ..small(2, 3) };
        let rows = grid_scan(&cfg).unwrap();
        assert_eq!(rows.len(), 9 + 3 + 3 + 1);
        for r in &rows[9..] {
            assert_eq!(r.region, Some(Region::Boundary));
            assert!(r.flat_predicted && r.flat_found, "{r:?}");
        }
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&format!("{CSV_HEADER},region\n")));
        assert!(text.lines().nth(1).unwrap().ends_with(",interior"));
    }

    #[test]
    fn csv_format() {
        let rows = vec![ScanRow {
            theta: 0.5,
            alpha: 0.25,
            best_objective: 1e-3,
            flat_predicted: false,
            flat_found: true,
            lift_numerator: 0.0,
            region: None,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!(
                "{CSV_HEADER}\n5.0000000000000000e-1,2.5000000000000000e-1,1.0000000000000000e-3,0,1,0.0000000000000000e0\n"
            )
        );
    }

    #[test]
    fn json_has_config_and_rows() {
        let cfg = small(2, 2);
        let rows = grid_scan(&cfg).unwrap();
        let mut buf = Vec::new();
        write_json(&cfg, &rows, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["config"]["resolution"], 2);
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert!(v["rows"][0].get("flat_found").is_some());
        assert!(v["rows"][0].get("region").is_none());
    }
}
