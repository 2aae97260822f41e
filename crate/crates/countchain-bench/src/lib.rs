//! Shared fixtures for the benchmark targets.

use countchain::ScenarioSpec;

/// Reference workload: 100 nodes, committees of 14, mostly honest players.
pub fn reference_scenario(num_events: u32) -> ScenarioSpec {
    ScenarioSpec::builder(100, 14)
        .honesty_rate(0.85)
        .num_events(num_events)
        .seed(7)
        .build()
        .expect("valid reference parameters")
}
