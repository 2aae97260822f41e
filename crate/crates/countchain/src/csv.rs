//! CSV serialization for sweep results.
//!
//! The schema is a stable external interface: fixed column order, floats
//! with exactly six decimal places, lowercase booleans, UTF-8 with a header
//! row. The `wall_time_ms` column reports the *simulated* span of the run in
//! milliseconds so that files are byte-identical across machines and reruns;
//! measured computation time stays in [`ScenarioMetrics::wall_time`]
//! (informational, never serialized).

use std::fmt::Write as _;

use crate::sim::SweepRow;

/// Header row of the sweep schema (no trailing newline).
pub const SWEEP_CSV_HEADER: &str = "seed,total_nodes,num_verifiers,honesty_rate,\
corrupted_fraction,num_events,raised,decided_true,decided_false,unraised,counter,\
full_success,partial_success,mean_hash_evals,wall_time_ms";

/// Formats one row (no trailing newline).
pub fn sweep_row_csv(row: &SweepRow) -> String {
    let m = &row.metrics;
    format!(
        "{},{},{},{:.6},{:.6},{},{},{},{},{},{},{},{},{:.6},{:.6}",
        row.seed,
        row.total_nodes,
        row.num_verifiers,
        row.honesty_rate,
        row.corrupted_fraction,
        row.num_events,
        m.propositions_raised,
        m.decided_true,
        m.decided_false,
        m.events_unraised,
        m.counter,
        row.full_success(),
        row.partial_success(),
        m.mean_hash_evals_per_verifier,
        m.sim_span.as_millis_f64(),
    )
}

/// Renders a whole result table: header plus one line per row.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 96);
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(out, "{}", sweep_row_csv(row)).expect("writing to String cannot fail");
    }
    out
}
