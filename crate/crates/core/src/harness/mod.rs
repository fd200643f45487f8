//! Scenario runner: builds a protocol stack on every node of a simulated
//! topology, injects application traffic and summarizes what happened.

mod report;
mod run;
mod scenario;

pub use report::{
    compare_runs, Comparison, KindCount, LatencyDelta, MessageRecord, MessageStatus, MetricsReport,
};
pub use run::{run_scenario, HarnessError, RunOutput};
pub use scenario::{
    format_traffic, generate_traffic, parse_traffic, Algorithm, CryptoChoice, Scenario,
    ScenarioError, TrafficItem, TrafficPlan, DEFAULT_TRAFFIC_COUNT,
};
