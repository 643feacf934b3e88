//! Classification report, `ReportV1`.

use jnr_core::bands::{band_surface, DEFAULT_BAND_RES};
use jnr_core::flat::{
    self, default_tolerance_ladder, tolerance_sweep, ClassLabel, FlatPortion, Outcome,
    SearchConfig, Segments,
};
use jnr_core::range::OperatorTuple;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

pub const REPORT_SCHEMA: &str = "jnr.report.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionEntry {
    pub theta: f64,
    pub phi: f64,
    pub h: [f64; 3],
    pub gap: f64,
    pub dim_s: usize,
    /// `point`, `segment` or `ellipse`.
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub normal: [f64; 3],
    pub offset: f64,
    pub residual: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tau_rel: f64,
    pub tau_deg: f64,
    pub promote_rel: f64,
    pub merge_radius: f64,
    pub search_grid: [usize; 2],
    pub band_grid: [usize; 2],
    pub hermitian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub tau_deg: f64,
    pub class_name: String,
    /// `null` for infinitely many segments.
    pub s: Option<usize>,
    pub e: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarEntry {
    pub pair: [usize; 2],
    pub class: String,
    pub segments: usize,
    pub corners: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportV1 {
    pub schema: String,
    pub tool_version: String,
    pub input_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub class_name: String,
    /// `null` for infinitely many segments or an unlabelled reducible input.
    pub s: Option<usize>,
    pub e: Option<usize>,
    pub reducible: bool,
    pub rank_with_identity: usize,
    pub degenerate_directions: Vec<DirectionEntry>,
    pub curve: Option<CurveEntry>,
    pub band_min_gap: Option<f64>,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
    pub planar: Option<PlanarEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_sweep: Option<Vec<SweepEntry>>,
}

fn counts(label: &ClassLabel) -> (Option<usize>, usize) {
    match label.s {
        Segments::Finite(s) => (Some(s), label.e),
        Segments::Infinite => (None, label.e),
    }
}

fn entry(f: &FlatPortion) -> DirectionEntry {
    let d = f.at.direction;
    DirectionEntry {
        theta: d.theta(),
        phi: d.phi(),
        h: d.vector(),
        gap: f.at.refined_gap,
        dim_s: f.dim_s,
        kind: f.kind.as_str().to_string(),
    }
}

pub struct ReportOptions {
    pub digest: String,
    pub timestamp: bool,
    pub tol_sweep: bool,
    pub band_res: (usize, usize),
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            digest: String::new(),
            timestamp: true,
            tol_sweep: false,
            band_res: DEFAULT_BAND_RES,
        }
    }
}

/// Classifies `ops` (a `d = 3` triple) and records the band minimum gap.
pub fn build_report(ops: &OperatorTuple, opts: &ReportOptions) -> CliResult<ReportV1> {
    let cfg = SearchConfig::default();
    let outcome = flat::classify_with(ops, &cfg)?;
    let scale = ops.scale();
    let band_min_gap = Some(band_surface(ops, opts.band_res.0, opts.band_res.1)?.min_gap());
    let (class_name, s, e) = match outcome.label() {
        Some(l) => {
            let (s, e) = counts(l);
            (l.class_name(), s, Some(e))
        }
        None => ("reducible_unclassified".to_string(), None, None),
    };
    let mut report = ReportV1 {
        schema: REPORT_SCHEMA.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        input_digest: opts.digest.clone(),
        timestamp_unix: opts.timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
        class_name,
        s,
        e,
        reducible: matches!(outcome, Outcome::Reducible(_)),
        rank_with_identity: ops.rank_with_identity(),
        degenerate_directions: Vec::new(),
        curve: None,
        band_min_gap,
        tolerances: Tolerances {
            tau_rel: cfg.tau_rel,
            tau_deg: cfg.tau_rel * scale,
            promote_rel: cfg.promote_rel,
            merge_radius: cfg.merge_radius,
            search_grid: [cfg.theta_res, cfg.phi_res],
            band_grid: [opts.band_res.0, opts.band_res.1],
            hermitian: jnr_core::herm::HERMITIAN_TOL,
        },
        warnings: Vec::new(),
        planar: None,
        tolerance_sweep: None,
    };
    match &outcome {
        Outcome::Classified(c) => {
            report.degenerate_directions = c.degenerate_directions().map(entry).collect();
            report.curve = c.curve.as_ref().map(|k| CurveEntry {
                normal: k.normal,
                offset: k.offset,
                residual: k.residual,
                count: k.count,
            });
            report.warnings = c.warnings.iter().map(|w| format!("{w:?}")).collect();
            if opts.tol_sweep {
                let ladder = tolerance_sweep(ops, &cfg, &default_tolerance_ladder())?;
                report.tolerance_sweep = Some(
                    ladder
                        .into_iter()
                        .map(|(tau, l)| {
                            let (s, e) = counts(&l);
                            SweepEntry {
                                tau_deg: tau,
                                class_name: l.class_name(),
                                s,
                                e,
                            }
                        })
                        .collect(),
                );
            }
        }
        Outcome::Reducible(r) => {
            if let (Some((i, j)), Some(p)) = (r.pair, &r.planar) {
                report.planar = Some(PlanarEntry {
                    pair: [i, j],
                    class: p.class.as_str().to_string(),
                    segments: p.segment_angles.len(),
                    corners: p.corners.len(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jnr_core::fixtures;

    #[test]
    fn report_round_trips() {
        let opts = ReportOptions {
            digest: "abc".into(),
            tol_sweep: true,
            band_res: (32, 64),
            ..Default::default()
        };
        for t in [
            fixtures::class(8),
            fixtures::reducible_triple(),
            fixtures::cone_triple(),
        ] {
            let r = build_report(&t, &opts).unwrap();
            let text = serde_json::to_string_pretty(&r).unwrap();
            let back: ReportV1 = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn class8_report_lists_three_flats() {
        let opts = ReportOptions {
            timestamp: false,
            band_res: (32, 64),
            ..Default::default()
        };
        let r = build_report(&fixtures::class(8), &opts).unwrap();
        assert_eq!(
            (r.class_name.as_str(), r.s, r.e),
            ("s1e2", Some(1), Some(2))
        );
        assert_eq!(r.degenerate_directions.len(), 3);
        assert!(r.timestamp_unix.is_none() && !r.reducible);
    }

    #[test]
    fn reducible_report_carries_the_planar_class() {
        let opts = ReportOptions {
            band_res: (32, 64),
            ..Default::default()
        };
        let r = build_report(&fixtures::reducible_triple(), &opts).unwrap();
        assert!(r.reducible);
        assert_eq!(
            (r.class_name.as_str(), r.s, r.e),
            ("s_inf_e1", None, Some(1))
        );
        assert_eq!(r.planar.unwrap().class, "triangle");
    }
}
