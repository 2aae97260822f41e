//! Deterministic implementation of the CountChain counting-oracle protocol.
//!
//! CountChain counts real-world events without a trusted counter. Every node
//! observes a stream of opaque event identifiers; any player may escrow a stake
//! and ask the host to mint a *proposition*, a claim that "an event with this
//! SHA-256 digest occurred inside this time window". The host assigns a random
//! committee of verifiers; each verifier either proves the claim by revealing a
//! stored preimage of the digest (a True vote) or votes False. Majority wins,
//! ties go to the submitter, and a True outcome increments the global counter.
//! Points and stakes reward honest work and drain dishonest players until they
//! are banned; accumulated forfeitures are paid back out proportionally to
//! positive point balances.
//!
//! The crate bundles three layers:
//!
//! - **Protocol:** the host state machine ([`Host`]), its ledger
//!   ([`ledger::Ledger`]), and the node behavior model ([`NodeBehavior`]).
//!   Everything is integer-timed (microsecond ticks) and seeded, so identical
//!   inputs reproduce identical states bit-for-bit.
//! - **Analysis:** closed-form oracles for the incentive and security
//!   properties: expected utilities of the verifier game, the majority
//!   decision probability, and exact hypergeometric Sybil-takeover bounds
//!   (big-integer arithmetic, floats only at the final division).
//! - **Simulation:** a discrete-event harness ([`sim::run_scenario`]) plus
//!   grid sweeps and Sybil experiments that emit a fixed CSV schema suitable
//!   for diffing across runs.
//!
//! # Example
//!
//! ```
//! use countchain::sim::{run_scenario, ScenarioSpec};
//!
//! // 100 nodes, 14 verifiers per proposition, everyone honest.
//! let spec = ScenarioSpec::builder(100, 14)
//!     .honesty_rate(1.0)
//!     .num_events(50)
//!     .seed(7)
//!     .build()
//!     .unwrap();
//! let metrics = run_scenario(&spec).unwrap();
//! assert_eq!(metrics.decided_true, 50);
//! assert_eq!(metrics.counter, 50);
//! ```

pub mod analysis;
pub mod config;
pub mod csv;
pub mod hash;
pub mod ledger;
pub mod node;
pub mod protocol;
pub mod sim;
pub mod time;
pub mod types;

pub use config::{ConfigError, SystemConfig};
pub use hash::hash_input_id;
pub use ledger::{AccountStatus, PlayerAccount, PrizePool, ResolutionDelta};
pub use node::{DishonestAction, NodeBehavior};
pub use protocol::{
    EventRecord, Host, Outcome, Proposition, PropositionRequest, PropositionStatus, Vote,
};
pub use sim::{
    run_scenario, run_sweep, run_sybil_experiment, ScenarioMetrics, ScenarioSpec, SimError,
    Simulation, StepReport, SweepRow,
};
pub use time::{SimDuration, SimTime};
pub use types::{Digest, PlayerId, PropId};
