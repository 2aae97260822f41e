//! Discrete-event simulation harness.
//!
//! A scenario drives the full pipeline on a simulated microsecond clock:
//! events fire at a fixed cadence, every active node stores them, nodes race
//! to submit proposition requests (the host deduplicates), committees vote by
//! proof search, deadlines resolve propositions through the ledger, and the
//! prize pool is distributed at the end (or every K resolutions).
//!
//! Determinism is the core contract: an identical [`ScenarioSpec`], seed
//! included, produces bit-identical metrics and ledger state. The host's
//! committee draws and the nodes' behavioral draws run on separate streams
//! of the same counter-based RNG, and every iteration that touches
//! randomness walks players in ascending id order. Wall-clock time is
//! recorded as an informational metric only; nothing depends on it.
//!
//! Sweeps fan scenarios out across a parameter grid (one independent
//! simulation per point, safe to run in parallel) with per-point seeds
//! derived as `base_seed XOR row_index`, so extending a grid never perturbs
//! existing rows.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, SystemConfig};
use crate::node::{DishonestAction, NodeBehavior};
use crate::protocol::{EventRecord, Host, Outcome, PropositionRequest, SubmitError, VoteError};
use crate::time::{SimDuration, SimTime};
use crate::types::{PlayerId, PropId};

/// A complete, self-contained description of one simulation run.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub config: SystemConfig,
    /// Per-action honesty probability of every uncorrupted node.
    pub honesty_rate: f64,
    /// Fraction of nodes that are corrupted (honesty pinned to zero).
    pub corrupted_fraction: f64,
    pub num_events: u32,
    /// Events per simulated second; inter-arrival is exactly 1/rate.
    pub event_rate: f64,
    /// Master seed; drives both the host's committee draws and the nodes'
    /// behavioral draws (on separate RNG streams).
    pub seed: u64,
    /// Stake deposited for every player at registration.
    pub initial_player_stake: u64,
    pub dishonest_action: DishonestAction,
    /// Per-node, per-event probability of missing the broadcast.
    pub delivery_loss: f64,
    /// Distribute the prize pool every K resolutions (plus the final one).
    pub distribute_every: Option<u32>,
}

impl ScenarioSpec {
    /// Starts a spec for `total_nodes` players and `num_verifiers`-seat
    /// committees; every other knob has a sensible default.
    pub fn builder(total_nodes: u32, num_verifiers: u32) -> ScenarioSpecBuilder {
        ScenarioSpecBuilder {
            spec: ScenarioSpec {
                config: SystemConfig {
                    total_nodes,
                    num_verifiers,
                    ..SystemConfig::default()
                },
                honesty_rate: 1.0,
                corrupted_fraction: 0.0,
                num_events: 1000,
                event_rate: 10.0,
                seed: 0,
                initial_player_stake: 1000,
                dishonest_action: DishonestAction::default(),
                delivery_loss: 0.0,
                distribute_every: None,
            },
        }
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> Result<(), SimError> {
        self.config.validate()?;
        if !(0.0..=1.0).contains(&self.honesty_rate) {
            return Err(SimError::HonestyOutOfRange(self.honesty_rate));
        }
        if !(0.0..=1.0).contains(&self.corrupted_fraction) {
            return Err(SimError::CorruptedFractionOutOfRange(
                self.corrupted_fraction,
            ));
        }
        if self.num_events == 0 {
            return Err(SimError::NoEvents);
        }
        if !(self.event_rate.is_finite() && self.event_rate > 0.0) {
            return Err(SimError::BadEventRate(self.event_rate));
        }
        if !(0.0..1.0).contains(&self.delivery_loss) {
            return Err(SimError::BadDeliveryLoss(self.delivery_loss));
        }
        if self.distribute_every == Some(0) {
            return Err(SimError::ZeroDistributionInterval);
        }
        Ok(())
    }
}

/// Builder for [`ScenarioSpec`]; `build` validates the result.
#[derive(Debug, Clone)]
pub struct ScenarioSpecBuilder {
    spec: ScenarioSpec,
}

impl ScenarioSpecBuilder {
    pub fn honesty_rate(mut self, h: f64) -> Self {
        self.spec.honesty_rate = h;
        self
    }

    pub fn corrupted_fraction(mut self, f: f64) -> Self {
        self.spec.corrupted_fraction = f;
        self
    }

    pub fn num_events(mut self, n: u32) -> Self {
        self.spec.num_events = n;
        self
    }

    pub fn event_rate(mut self, per_second: f64) -> Self {
        self.spec.event_rate = per_second;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.spec.seed = seed;
        self
    }

    pub fn proposition_price(mut self, price: u64) -> Self {
        self.spec.config.proposition_price = price;
        self
    }

    pub fn proposition_deadline(mut self, d: SimDuration) -> Self {
        self.spec.config.proposition_deadline = d;
        self
    }

    pub fn window_half_width(mut self, w: SimDuration) -> Self {
        self.spec.config.window_half_width = w;
        self
    }

    pub fn ban_threshold(mut self, t: i64) -> Self {
        self.spec.config.ban_threshold = t;
        self
    }

    pub fn initial_prize_fund(mut self, fund: u64) -> Self {
        self.spec.config.initial_prize_fund = fund;
        self
    }

    pub fn initial_player_stake(mut self, stake: u64) -> Self {
        self.spec.initial_player_stake = stake;
        self
    }

    pub fn dishonest_action(mut self, action: DishonestAction) -> Self {
        self.spec.dishonest_action = action;
        self
    }

    pub fn delivery_loss(mut self, loss: f64) -> Self {
        self.spec.delivery_loss = loss;
        self
    }

    pub fn distribute_every(mut self, k: u32) -> Self {
        self.spec.distribute_every = Some(k);
        self
    }

    pub fn build(mut self) -> Result<ScenarioSpec, SimError> {
        // The scenario seed is canonical for the whole run.
        self.spec.config.rng_seed = self.spec.seed;
        self.spec.validate()?;
        Ok(self.spec)
    }
}

/// Scenario construction or validation failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("honesty rate must lie in [0, 1], got {0}")]
    HonestyOutOfRange(f64),
    #[error("corrupted fraction must lie in [0, 1], got {0}")]
    CorruptedFractionOutOfRange(f64),
    #[error("need at least one event")]
    NoEvents,
    #[error("event rate must be positive and finite, got {0}")]
    BadEventRate(f64),
    #[error("delivery loss must lie in [0, 1), got {0}")]
    BadDeliveryLoss(f64),
    #[error("prize distribution interval must be positive")]
    ZeroDistributionInterval,
    #[error("sweep grid is empty")]
    EmptyGrid,
}

/// Aggregate results of one scenario run.
///
/// `wall_time` is informational (how long the run took to compute) and is
/// excluded from equality; determinism claims compare everything else.
#[derive(Debug, Clone)]
pub struct ScenarioMetrics {
    pub propositions_raised: u32,
    pub decided_true: u32,
    pub decided_false: u32,
    pub events_unraised: u32,
    /// The host's final event counter (always equals `decided_true`).
    pub counter: u64,
    /// Total proof-search hash evaluations per committee seat.
    pub mean_hash_evals_per_verifier: f64,
    /// Simulated span from the first event to the last resolution.
    pub sim_span: SimDuration,
    /// Measured computation time; informational only.
    pub wall_time: Duration,
}

impl PartialEq for ScenarioMetrics {
    fn eq(&self, other: &Self) -> bool {
        self.propositions_raised == other.propositions_raised
            && self.decided_true == other.decided_true
            && self.decided_false == other.decided_false
            && self.events_unraised == other.events_unraised
            && self.counter == other.counter
            && self.mean_hash_evals_per_verifier == other.mean_hash_evals_per_verifier
            && self.sim_span == other.sim_span
    }
}

/// What one [`Simulation::step`] did.
#[derive(Debug, Clone)]
pub enum StepReport {
    /// One event fired: due propositions were resolved first, then the
    /// event was broadcast and (possibly) raised as a proposition.
    Event {
        index: u32,
        time: SimTime,
        resolved: Vec<Outcome>,
        raised: Option<PropId>,
    },
    /// Post-event drain of the remaining open propositions.
    Drain { resolved: Vec<Outcome> },
    /// The final prize distribution.
    Distribution { payouts: Vec<(PlayerId, u64)> },
}

/// A stepwise scenario run, for callers that audit or chart intermediate
/// state; [`run_scenario`] is the one-shot wrapper.
#[derive(Debug)]
pub struct Simulation {
    spec: ScenarioSpec,
    host: Host,
    nodes: Vec<NodeBehavior>,
    behavior_rng: ChaCha8Rng,
    event_gap_micros: i64,
    next_event: u32,
    drained: bool,
    distributed: bool,
    clock: SimTime,
    raised: u32,
    decided_true: u32,
    decided_false: u32,
    resolutions: u64,
    started: Instant,
}

impl Simulation {
    pub fn new(spec: &ScenarioSpec) -> Result<Self, SimError> {
        spec.validate()?;
        let mut config = spec.config.clone();
        config.rng_seed = spec.seed;
        let mut host = Host::new(config).expect("spec was validated");
        for i in 0..spec.config.total_nodes {
            host.register_player(PlayerId(i), spec.initial_player_stake)
                .expect("fresh ids cannot collide");
        }

        // Behavioral draws run on stream 1; the host's committee draws use
        // stream 0 of the same seed.
        let mut behavior_rng = ChaCha8Rng::seed_from_u64(spec.seed);
        behavior_rng.set_stream(1);

        let total = spec.config.total_nodes;
        let corrupted_count = (spec.corrupted_fraction * total as f64).round() as usize;
        let corrupted = rand::seq::index::sample(
            &mut behavior_rng,
            total as usize,
            corrupted_count.min(total as usize),
        );
        let mut is_corrupted = vec![false; total as usize];
        for idx in corrupted {
            is_corrupted[idx] = true;
        }
        let nodes = (0..total)
            .map(|i| {
                let node = if is_corrupted[i as usize] {
                    NodeBehavior::corrupted(PlayerId(i))
                } else {
                    NodeBehavior::new(PlayerId(i), spec.honesty_rate)
                };
                node.with_dishonest_action(spec.dishonest_action)
            })
            .collect();

        let event_gap_micros = ((1e6 / spec.event_rate).round() as i64).max(1);
        Ok(Simulation {
            spec: spec.clone(),
            host,
            nodes,
            behavior_rng,
            event_gap_micros,
            next_event: 0,
            drained: false,
            distributed: false,
            clock: SimTime::ZERO,
            raised: 0,
            decided_true: 0,
            decided_false: 0,
            resolutions: 0,
            started: Instant::now(),
        })
    }

    pub fn host(&self) -> &Host {
        &self.host
    }

    pub fn node(&self, id: PlayerId) -> Option<&NodeBehavior> {
        self.nodes.get(id.0 as usize)
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// Resolves every open proposition due at or before `up_to`, in
    /// (deadline, id) order, triggering every-K prize distributions.
    fn resolve_due(&mut self, up_to: SimTime) -> Vec<Outcome> {
        let mut resolved = Vec::new();
        for id in self.host.due_propositions(up_to) {
            let deadline = self.host.proposition(id).expect("due id exists").deadline;
            let outcome = self
                .host
                .resolve_proposition(id, deadline)
                .expect("due propositions are open and past deadline");
            self.clock = self.clock.max(deadline);
            if outcome.decided {
                self.decided_true += 1;
            } else {
                self.decided_false += 1;
            }
            self.resolutions += 1;
            if let Some(k) = self.spec.distribute_every {
                if self.resolutions % k as u64 == 0 {
                    self.host.distribute_prizes();
                }
            }
            resolved.push(outcome);
        }
        resolved
    }

    /// Advances the simulation by one stage; `None` once complete.
    pub fn step(&mut self) -> Option<StepReport> {
        if self.next_event < self.spec.num_events {
            let index = self.next_event;
            self.next_event += 1;
            let time = SimTime::from_micros(self.event_gap_micros * index as i64);
            let resolved = self.resolve_due(time);
            self.clock = self.clock.max(time);
            let event = EventRecord::new((index as u64).to_be_bytes().to_vec(), time);

            // Broadcast: every active node stores the event (subject to the
            // delivery-loss knob), in id order.
            let loss = self.spec.delivery_loss;
            let mut receivers = Vec::new();
            for i in 0..self.nodes.len() {
                let id = PlayerId(i as u32);
                if !self.host.is_active(id) {
                    continue;
                }
                let received = loss == 0.0 || self.behavior_rng.gen_bool(1.0 - loss);
                if received {
                    self.nodes[i].ingest_event(&event);
                    receivers.push(id);
                }
            }

            // Submission race: draws in id order, then a shuffled arrival
            // order; the host accepts the first and refunds the rest.
            let mut requests: Vec<PropositionRequest> = receivers
                .iter()
                .filter_map(|&id| {
                    self.nodes[id.0 as usize].maybe_submit(&event, &mut self.behavior_rng)
                })
                .collect();
            requests.shuffle(&mut self.behavior_rng);
            let mut raised = None;
            for req in &requests {
                match self.host.submit_request(req, time) {
                    Ok(prop_id) => {
                        self.raised += 1;
                        raised = Some(prop_id);
                        self.collect_votes(prop_id, time);
                    }
                    Err(SubmitError::Duplicate { .. })
                    | Err(SubmitError::InsufficientVerifierPool { .. })
                    | Err(SubmitError::InsufficientStake { .. }) => {}
                    Err(e) => unreachable!("simulated nodes cannot trigger {e}"),
                }
            }
            return Some(StepReport::Event {
                index,
                time,
                resolved,
                raised,
            });
        }

        if !self.drained {
            self.drained = true;
            let resolved = self.resolve_due(SimTime::from_micros(i64::MAX));
            return Some(StepReport::Drain { resolved });
        }

        if !self.distributed {
            self.distributed = true;
            let payouts = self.host.distribute_prizes();
            return Some(StepReport::Distribution { payouts });
        }

        None
    }

    /// Committee members vote immediately on a fresh proposition, in
    /// ascending id order.
    fn collect_votes(&mut self, prop_id: PropId, now: SimTime) {
        let prop = self
            .host
            .proposition(prop_id)
            .expect("just accepted")
            .clone();
        for &verifier in &prop.verifier_ids {
            let vote = self.nodes[verifier.0 as usize].produce_vote(&prop, now, &mut self.behavior_rng);
            if let Some(vote) = vote {
                match self.host.cast_vote(prop_id, vote, now) {
                    Ok(()) => {}
                    // A broke verifier simply stays silent.
                    Err(VoteError::InsufficientStake { .. }) => {}
                    Err(e) => unreachable!("simulated votes cannot trigger {e}"),
                }
            }
        }
    }

    /// Runs to completion and returns the metrics.
    pub fn run(mut self) -> ScenarioMetrics {
        while self.step().is_some() {}
        self.metrics()
    }

    /// Metrics for the work done so far (complete after the final step).
    pub fn metrics(&self) -> ScenarioMetrics {
        let committee_seats =
            self.raised as u64 * self.spec.config.num_verifiers as u64;
        let total_hash_evals: u64 = self.nodes.iter().map(|n| n.hash_evals()).sum();
        let mean_hash_evals_per_verifier = if committee_seats == 0 {
            0.0
        } else {
            total_hash_evals as f64 / committee_seats as f64
        };
        let metrics = ScenarioMetrics {
            propositions_raised: self.raised,
            decided_true: self.decided_true,
            decided_false: self.decided_false,
            events_unraised: self.spec.num_events - self.raised,
            counter: self.host.counter(),
            mean_hash_evals_per_verifier,
            sim_span: self.clock - SimTime::ZERO,
            wall_time: self.started.elapsed(),
        };
        if self.drained {
            assert_eq!(
                metrics.counter, metrics.decided_true as u64,
                "counter must equal True resolutions"
            );
            assert_eq!(
                metrics.propositions_raised + metrics.events_unraised,
                self.spec.num_events,
                "every event is either raised or unraised"
            );
        }
        metrics
    }
}

/// Runs one scenario to completion. Deterministic for a fixed spec.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioMetrics, SimError> {
    Ok(Simulation::new(spec)?.run())
}

/// One grid point of a sweep: the varied parameters plus the run's metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub seed: u64,
    pub total_nodes: u32,
    pub num_verifiers: u32,
    pub honesty_rate: f64,
    pub corrupted_fraction: f64,
    pub num_events: u32,
    pub metrics: ScenarioMetrics,
}

impl SweepRow {
    /// The attack suppressed every True decision (or all submissions).
    pub fn full_success(&self) -> bool {
        self.metrics.decided_true == 0 || self.metrics.propositions_raised == 0
    }

    /// The attack held True decisions to at most half the raised
    /// propositions.
    pub fn partial_success(&self) -> bool {
        2 * self.metrics.decided_true as u64 <= self.metrics.propositions_raised as u64
    }
}

fn run_row(base: &ScenarioSpec, row_index: u64, spec: ScenarioSpec) -> Result<SweepRow, SimError> {
    let mut spec = spec;
    spec.seed = base.seed ^ row_index;
    spec.config.rng_seed = spec.seed;
    let metrics = run_scenario(&spec)?;
    Ok(SweepRow {
        seed: spec.seed,
        total_nodes: spec.config.total_nodes,
        num_verifiers: spec.config.num_verifiers,
        honesty_rate: spec.honesty_rate,
        corrupted_fraction: spec.corrupted_fraction,
        num_events: spec.num_events,
        metrics,
    })
}

/// Runs `base` across the cartesian grid honesty × verifiers × nodes (in
/// that nesting order), one independent scenario per point, in parallel.
///
/// Row seeds are `base.seed XOR row_index`, so a single-point grid
/// reproduces `run_scenario(base)` exactly and extending the grid never
/// changes existing rows.
pub fn run_sweep(
    base: &ScenarioSpec,
    honesty_rates: &[f64],
    verifier_counts: &[u32],
    node_counts: &[u32],
) -> Result<Vec<SweepRow>, SimError> {
    if honesty_rates.is_empty() || verifier_counts.is_empty() || node_counts.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    let mut points = Vec::new();
    for &h in honesty_rates {
        for &n in verifier_counts {
            for &total in node_counts {
                let mut spec = base.clone();
                spec.honesty_rate = h;
                spec.config.num_verifiers = n;
                spec.config.total_nodes = total;
                points.push(spec);
            }
        }
    }
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| run_row(base, i as u64, spec))
        .collect()
}

/// Runs the coalition experiment: for every uncorrupted-honesty value and
/// every corrupted fraction (fractions nested innermost), a scenario whose
/// corrupted nodes always vote False.
pub fn run_sybil_experiment(
    base: &ScenarioSpec,
    corrupted_fractions: &[f64],
    uncorrupted_honesty: &[f64],
) -> Result<Vec<SweepRow>, SimError> {
    if corrupted_fractions.is_empty() || uncorrupted_honesty.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    let mut points = Vec::new();
    for &unhr in uncorrupted_honesty {
        for &f in corrupted_fractions {
            let mut spec = base.clone();
            spec.honesty_rate = unhr;
            spec.corrupted_fraction = f;
            points.push(spec);
        }
    }
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| run_row(base, i as u64, spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec(events: u32, honesty: f64, seed: u64) -> ScenarioSpec {
        ScenarioSpec::builder(100, 14)
            .honesty_rate(honesty)
            .num_events(events)
            .seed(seed)
            .build()
            .unwrap()
    }

    #[test]
    fn fully_honest_network_counts_every_event() {
        let metrics = run_scenario(&quick_spec(50, 1.0, 7)).unwrap();
        assert_eq!(metrics.propositions_raised, 50);
        assert_eq!(metrics.decided_true, 50);
        assert_eq!(metrics.decided_false, 0);
        assert_eq!(metrics.events_unraised, 0);
        assert_eq!(metrics.counter, 50);
    }

    #[test]
    fn fully_dishonest_network_counts_nothing() {
        let metrics = run_scenario(&quick_spec(50, 0.0, 7)).unwrap();
        assert_eq!(metrics.propositions_raised, 0);
        assert_eq!(metrics.decided_true, 0);
        assert_eq!(metrics.events_unraised, 50);
        assert_eq!(metrics.counter, 0);
    }

    #[test]
    fn identical_specs_give_identical_metrics() {
        let spec = quick_spec(100, 0.6, 42);
        let a = run_scenario(&spec).unwrap();
        let b = run_scenario(&spec).unwrap();
        assert_eq!(a, b, "equality ignores wall time");
        assert_ne!(
            a,
            run_scenario(&quick_spec(100, 0.6, 43)).unwrap(),
            "a different seed should perturb at least one metric"
        );
    }

    #[test]
    fn events_fire_on_an_exact_cadence() {
        let spec = ScenarioSpec::builder(20, 3)
            .num_events(3)
            .event_rate(10.0)
            .seed(1)
            .build()
            .unwrap();
        let mut sim = Simulation::new(&spec).unwrap();
        let mut times = Vec::new();
        while let Some(report) = sim.step() {
            if let StepReport::Event { time, .. } = report {
                times.push(time);
            }
        }
        assert_eq!(
            times,
            vec![
                SimTime::from_micros(0),
                SimTime::from_micros(100_000),
                SimTime::from_micros(200_000)
            ]
        );
    }

    #[test]
    fn simulated_span_covers_the_last_deadline() {
        let metrics = run_scenario(&quick_spec(10, 1.0, 1)).unwrap();
        // Last event at 0.9 s; its proposition resolves 2 s later.
        assert_eq!(metrics.sim_span, SimDuration::from_secs_f64(2.9));
    }

    #[test]
    fn single_point_sweep_equals_run_scenario() {
        let base = quick_spec(80, 0.85, 11);
        let rows = run_sweep(&base, &[0.85], &[14], &[100]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].seed, base.seed, "row 0 keeps the base seed");
        assert_eq!(rows[0].metrics, run_scenario(&base).unwrap());
    }

    #[test]
    fn sweep_rows_follow_honesty_verifier_node_nesting() {
        let base = quick_spec(5, 1.0, 9);
        let rows = run_sweep(&base, &[0.0, 1.0], &[3, 5], &[30]).unwrap();
        assert_eq!(rows.len(), 4);
        let order: Vec<(f64, u32)> = rows
            .iter()
            .map(|r| (r.honesty_rate, r.num_verifiers))
            .collect();
        assert_eq!(order, vec![(0.0, 3), (0.0, 5), (1.0, 3), (1.0, 5)]);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.seed, base.seed ^ i as u64);
        }
    }

    #[test]
    fn sweep_rejects_an_empty_grid() {
        let base = quick_spec(5, 1.0, 9);
        assert_eq!(
            run_sweep(&base, &[], &[3], &[30]),
            Err(SimError::EmptyGrid)
        );
    }

    #[test]
    fn sweep_propagates_invalid_grid_points() {
        let base = quick_spec(5, 1.0, 9);
        // 30 verifiers cannot be drawn from 20 nodes.
        assert!(run_sweep(&base, &[1.0], &[30], &[20]).is_err());
    }

    #[test]
    fn full_corruption_raises_nothing_and_full_honesty_resists_nothing() {
        let base = quick_spec(40, 1.0, 3);
        let rows = run_sybil_experiment(&base, &[0.0, 1.0], &[1.0]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].metrics.decided_true, 40, "no corruption");
        assert!(!rows[0].full_success() && !rows[0].partial_success());
        assert_eq!(rows[1].metrics.propositions_raised, 0, "nobody submits");
        assert!(rows[1].full_success() && rows[1].partial_success());
    }

    #[test]
    fn corrupted_nodes_drag_the_count_down() {
        // Banning disabled so committee composition stays a fixed draw from
        // 50 corrupted + 49 honest peers: expected per-proposition True rate
        // 0.5971, i.e. 119 ± 7 of 200. (With banning active the coalition is
        // expelled mid-run and the rate climbs back up.)
        let base = ScenarioSpec::builder(100, 14)
            .num_events(200)
            .ban_threshold(i64::MIN / 2)
            .seed(5)
            .build()
            .unwrap();
        let rows = run_sybil_experiment(&base, &[0.5], &[1.0]).unwrap();
        let decided = rows[0].metrics.decided_true;
        assert_eq!(rows[0].metrics.propositions_raised, 200);
        assert!(
            (85..=155).contains(&decided),
            "decided_true = {decided} outside 119 ± 5σ"
        );
    }

    #[test]
    fn banning_expels_a_coalition_and_restores_the_count() {
        // Same scenario with the default −5 ban threshold: False-voting
        // coalition members bleed points on every True resolution and are
        // banned, so the decision rate recovers well past the no-ban level.
        let base = ScenarioSpec::builder(100, 14)
            .num_events(200)
            .seed(5)
            .build()
            .unwrap();
        let rows = run_sybil_experiment(&base, &[0.5], &[1.0]).unwrap();
        assert!(
            rows[0].metrics.decided_true > 160,
            "bans should lift decided_true above the no-ban ≈119, got {}",
            rows[0].metrics.decided_true
        );
    }

    #[test]
    fn delivery_loss_costs_decisions_but_not_submissions() {
        let spec = ScenarioSpec::builder(100, 14)
            .num_events(200)
            .delivery_loss(0.3)
            .seed(21)
            .build()
            .unwrap();
        let metrics = run_scenario(&spec).unwrap();
        // Someone always receives and submits each event...
        assert_eq!(metrics.propositions_raised, 200);
        // ...but verifiers now miss ~30% of preimages, so the effective
        // per-seat True rate drops to ≈0.7 and some propositions fail.
        assert!(metrics.decided_true < 200);
        assert!(metrics.decided_true > 100);
    }

    #[test]
    fn periodic_distribution_pays_the_pool_out_mid_run() {
        // 40 events at 0.1 s spacing: the first 2-second deadline falls due
        // while events are still firing, so the every-resolution payout
        // triggers inside an Event step, not merely in the final drain.
        let spec = ScenarioSpec::builder(50, 4)
            .num_events(40)
            .initial_prize_fund(120)
            .distribute_every(1)
            .seed(2)
            .build()
            .unwrap();
        let mut sim = Simulation::new(&spec).unwrap();
        let mut saw_midrun_payout = false;
        while let Some(report) = sim.step() {
            if matches!(report, StepReport::Event { .. })
                && sim.host().ledger().paid_out_total() > 0
            {
                saw_midrun_payout = true;
            }
        }
        assert!(saw_midrun_payout, "fund should be paid before the run ends");
        assert_eq!(sim.host().ledger().paid_out_total(), 120);
        assert_eq!(sim.host().ledger().pool().balance, 0);
        assert!(sim.host().ledger().conservation_holds());
    }

    #[test]
    fn aggressive_banning_can_starve_the_committee_pool() {
        // 20 nodes, 14-seat committees, low honesty, ban at −1: False
        // resolutions quickly ban submitters and verifiers until fewer than
        // 15 players remain and later events cannot raise propositions.
        let spec = ScenarioSpec::builder(20, 14)
            .honesty_rate(0.3)
            .num_events(200)
            .ban_threshold(-1)
            .seed(13)
            .build()
            .unwrap();
        let mut sim = Simulation::new(&spec).unwrap();
        while sim.step().is_some() {}
        assert!(sim.host().active_count() < 15);
        let metrics = sim.metrics();
        assert!(metrics.events_unraised > 0);
        assert!(sim.host().ledger().conservation_holds());
    }

    #[test]
    fn builder_validates_every_knob() {
        assert!(matches!(
            ScenarioSpec::builder(100, 14).honesty_rate(1.2).build(),
            Err(SimError::HonestyOutOfRange(_))
        ));
        assert!(matches!(
            ScenarioSpec::builder(100, 14).num_events(0).build(),
            Err(SimError::NoEvents)
        ));
        assert!(matches!(
            ScenarioSpec::builder(100, 14).event_rate(0.0).build(),
            Err(SimError::BadEventRate(_))
        ));
        assert!(matches!(
            ScenarioSpec::builder(100, 100).build(),
            Err(SimError::Config(_))
        ));
        assert!(matches!(
            ScenarioSpec::builder(100, 14).delivery_loss(1.0).build(),
            Err(SimError::BadDeliveryLoss(_))
        ));
    }
}
