use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::HarnessError;
use super::scenario::{Algorithm, CryptoChoice, TrafficItem};
use crate::kernel::{Millis, NodeId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCount {
    pub transmissions: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageStatus {
    Delivered,
    Lost,
    /// The source refused the send; holds the error name.
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub index: usize,
    #[serde(flatten)]
    pub traffic: TrafficItem,
    pub status: MessageStatus,
    pub delivered_at_ms: Option<Millis>,
    pub latency_ms: Option<Millis>,
}

/// Summary of one run. Serializes to the same bytes for the same scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub topology: String,
    pub nodes: usize,
    pub algorithm: Algorithm,
    pub crypto: CryptoChoice,
    pub seed: u64,
    pub duration_ms: Millis,
    pub sent: usize,
    pub delivered: usize,
    pub delivery_ratio: f64,
    /// Rejected sends by error name.
    pub send_errors: BTreeMap<String, usize>,
    /// Deliveries whose payload differed from what was sent.
    pub corrupted: usize,
    /// Extra deliveries of a message already delivered.
    pub duplicates: usize,
    pub mean_latency_ms: Option<f64>,
    pub max_latency_ms: Option<Millis>,
    /// Radio transmissions by message kind name.
    pub radio_sends: BTreeMap<String, KindCount>,
    pub table_sizes: Vec<usize>,
    /// Update or beacon round after which routing state stopped changing.
    pub convergence_round: Option<u64>,
    pub messages: Vec<MessageRecord>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One row per message for spreadsheet use.
    pub fn messages_csv(&self) -> String {
        let mut out =
            String::from("index,at_ms,src,dst,payload_len,status,delivered_at_ms,latency_ms\n");
        let opt = |v: Option<Millis>| v.map(|v| v.to_string()).unwrap_or_default();
        for m in &self.messages {
            let status = match &m.status {
                MessageStatus::Delivered => "delivered".to_string(),
                MessageStatus::Lost => "lost".to_string(),
                MessageStatus::Rejected(e) => format!("rejected:{e}"),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                m.index,
                m.traffic.at_ms,
                m.traffic.src,
                m.traffic.dst,
                m.traffic.payload_len,
                status,
                opt(m.delivered_at_ms),
                opt(m.latency_ms)
            );
        }
        out
    }

    pub fn total_transmissions(&self) -> u64 {
        self.radio_sends.values().map(|k| k.transmissions).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyDelta {
    pub index: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub latency_a_ms: Option<Millis>,
    pub latency_b_ms: Option<Millis>,
    /// `b - a`, when both runs delivered the message.
    pub delta_ms: Option<i64>,
}

/// Paired comparison of two runs over the same traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub messages: usize,
    pub delivered_a: usize,
    pub delivered_b: usize,
    pub deltas: Vec<LatencyDelta>,
    pub max_abs_delta_ms: i64,
    /// Extra latency of b over a, in percent of a, over messages both
    /// runs delivered.
    pub overhead_percent: f64,
    pub transmissions_a: u64,
    pub transmissions_b: u64,
    pub bytes_a: u64,
    pub bytes_b: u64,
}

impl Comparison {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("comparison serializes");
        text.push('\n');
        text
    }

    pub fn all_deltas_zero(&self) -> bool {
        self.deltas.iter().all(|d| d.delta_ms.unwrap_or(0) == 0)
    }
}

pub fn compare_runs(a: &MetricsReport, b: &MetricsReport) -> Result<Comparison, HarnessError> {
    let traffic = |r: &MetricsReport| r.messages.iter().map(|m| m.traffic).collect::<Vec<_>>();
    if traffic(a) != traffic(b) {
        return Err(HarnessError::NotComparable(
            "the runs injected different traffic".into(),
        ));
    }
    let mut deltas = Vec::new();
    let (mut sum_a, mut sum_b) = (0u64, 0u64);
    for (ma, mb) in a.messages.iter().zip(&b.messages) {
        let delta_ms = match (ma.latency_ms, mb.latency_ms) {
            (Some(x), Some(y)) => {
                sum_a += x;
                sum_b += y;
                Some(y as i64 - x as i64)
            }
            _ => None,
        };
        deltas.push(LatencyDelta {
            index: ma.index,
            src: ma.traffic.src,
            dst: ma.traffic.dst,
            latency_a_ms: ma.latency_ms,
            latency_b_ms: mb.latency_ms,
            delta_ms,
        });
    }
    let overhead_percent = if sum_a == 0 {
        0.0
    } else {
        (sum_b as f64 - sum_a as f64) / sum_a as f64 * 100.0
    };
    let bytes = |r: &MetricsReport| r.radio_sends.values().map(|k| k.bytes).sum();
    Ok(Comparison {
        messages: a.messages.len(),
        delivered_a: a.delivered,
        delivered_b: b.delivered,
        max_abs_delta_ms: deltas
            .iter()
            .filter_map(|d| d.delta_ms)
            .map(i64::abs)
            .max()
            .unwrap_or(0),
        deltas,
        overhead_percent,
        transmissions_a: a.total_transmissions(),
        transmissions_b: b.total_transmissions(),
        bytes_a: bytes(a),
        bytes_b: bytes(b),
    })
}
