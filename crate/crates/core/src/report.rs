//! CSV emission for metric series, segment summaries and policy comparisons.

use std::fmt::Write;

use crate::metrics::MetricReport;
use crate::sim::SegmentSummary;

pub const METRICS_HEADER: &str =
    "epoch,eta,total_wear_cost,repair_count,total_pollution_exposure,mean_travel_time";
pub const SEGMENTS_HEADER: &str = "segment_id,traversals,repairs,final_quality";
pub const COMPARISON_HEADER: &str = "policy,baseline,eta,delta_eta,total_pollution_exposure,delta_total_pollution_exposure,mean_travel_time,delta_mean_travel_time,repair_count,delta_repair_count";

pub fn metrics_csv(reports: &[MetricReport]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.epoch,
            r.eta,
            r.total_wear_cost,
            r.repair_count,
            r.total_pollution_exposure,
            r.mean_travel_time
        )
        .unwrap();
    }
    out
}

pub fn segments_csv(segments: &[SegmentSummary]) -> String {
    let mut out = format!("{SEGMENTS_HEADER}\n");
    for s in segments {
        writeln!(
            out,
            "{},{},{},{}",
            s.segment_id, s.traversals, s.repairs, s.final_quality
        )
        .unwrap();
    }
    out
}

/// Whole-run aggregates of one policy's metric series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    /// Food-access metric after the last epoch.
    pub final_eta: f64,
    pub total_pollution_exposure: f64,
    /// Trip-weighted mean over all epochs.
    pub mean_travel_time: f64,
    pub repair_count: u64,
    pub total_wear_cost: f64,
}

impl RunSummary {
    pub fn from_reports(reports: &[MetricReport]) -> Self {
        let trips: u64 = reports.iter().map(|r| r.trips).sum();
        let time: f64 = reports.iter().map(|r| r.mean_travel_time * r.trips as f64).sum();
        RunSummary {
            final_eta: reports.last().map_or(0.0, |r| r.eta),
            total_pollution_exposure: reports.iter().map(|r| r.total_pollution_exposure).sum(),
            mean_travel_time: if trips > 0 { time / trips as f64 } else { 0.0 },
            repair_count: reports.iter().map(|r| r.repair_count).sum(),
            total_wear_cost: reports.iter().map(|r| r.total_wear_cost).sum(),
        }
    }
}

/// Deltas of each policy against the baseline, rows in input order.
pub fn comparison_csv(rows: &[(String, RunSummary)], baseline: &str) -> Option<String> {
    let base = rows.iter().find(|(name, _)| name == baseline)?.1;
    let mut out = format!("{COMPARISON_HEADER}\n");
    for (name, s) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            name,
            baseline,
            s.final_eta,
            s.final_eta - base.final_eta,
            s.total_pollution_exposure,
            s.total_pollution_exposure - base.total_pollution_exposure,
            s.mean_travel_time,
            s.mean_travel_time - base.mean_travel_time,
            s.repair_count,
            s.repair_count as i64 - base.repair_count as i64,
        )
        .unwrap();
    }
    Some(out)
}
