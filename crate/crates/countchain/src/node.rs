//! Behavioral agents.
//!
//! A [`NodeBehavior`] models one participant: it stores every event
//! delivered to it, submits proposition requests probabilistically, and
//! votes by actually searching its local store for the digest preimage. The
//! `honesty_rate` parameter is the per-action probability of doing the
//! honest thing; corrupted (Sybil) nodes are pinned to zero.
//!
//! Honest voting is a real proof search: the node hashes every stored input
//! ID inside the proposition's window and votes True only when a preimage
//! matches the digest. A True vote without a matching preimage therefore
//! cannot be produced here at all: dishonesty can only withhold truth, not
//! fabricate it. Each search adds the number of scanned events to a per-node
//! hash-evaluation counter, the empirical proxy for the verification cost.

use rand::Rng;

use crate::hash::hash_input_id;
use crate::protocol::{EventRecord, Proposition, PropositionRequest, Vote};
use crate::time::SimTime;
use crate::types::PlayerId;

/// What a node does when it decides to act dishonestly on a vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DishonestAction {
    /// Vote False regardless of the search (withheld proof). The default:
    /// fabricated True votes are rejected by the host anyway.
    #[default]
    VoteFalse,
    /// Stay silent; the host tallies the seat as False at the deadline.
    Abstain,
}

/// One simulated participant's state and behavior policy.
#[derive(Debug, Clone)]
pub struct NodeBehavior {
    pub player_id: PlayerId,
    /// Per-action probability of acting honestly; 0 for corrupted nodes.
    pub honesty_rate: f64,
    pub corrupted: bool,
    pub dishonest_action: DishonestAction,
    /// Every delivered event, kept sorted by timestamp.
    local_store: Vec<(SimTime, Vec<u8>)>,
    /// Total hash evaluations spent on proof searches.
    hash_evals: u64,
}

impl NodeBehavior {
    /// A regular node acting honestly with probability `honesty_rate`.
    pub fn new(player_id: PlayerId, honesty_rate: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&honesty_rate),
            "honesty_rate must lie in [0, 1]"
        );
        NodeBehavior {
            player_id,
            honesty_rate,
            corrupted: false,
            dishonest_action: DishonestAction::default(),
            local_store: Vec::new(),
            hash_evals: 0,
        }
    }

    /// A corrupted (Sybil) node: honesty rate forced to zero.
    pub fn corrupted(player_id: PlayerId) -> Self {
        NodeBehavior {
            corrupted: true,
            honesty_rate: 0.0,
            ..NodeBehavior::new(player_id, 0.0)
        }
    }

    pub fn with_dishonest_action(mut self, action: DishonestAction) -> Self {
        self.dishonest_action = action;
        self
    }

    /// Hash evaluations spent on proof searches so far.
    pub fn hash_evals(&self) -> u64 {
        self.hash_evals
    }

    pub fn stored_events(&self) -> usize {
        self.local_store.len()
    }

    /// Stores a delivered event. Duplicate deliveries are stored again; the
    /// window query simply returns the preimage more than once.
    pub fn ingest_event(&mut self, event: &EventRecord) {
        let at = self.local_store.len()
            - self
                .local_store
                .iter()
                .rev()
                .take_while(|(t, _)| *t > event.timestamp)
                .count();
        self.local_store
            .insert(at, (event.timestamp, event.input_id.clone()));
    }

    /// Stored events with timestamps in the closed range [t_a, t_b].
    pub fn events_in(&self, t_a: SimTime, t_b: SimTime) -> &[(SimTime, Vec<u8>)] {
        let start = self.local_store.partition_point(|(t, _)| *t < t_a);
        let end = self.local_store.partition_point(|(t, _)| *t <= t_b);
        &self.local_store[start..end]
    }

    /// With probability `honesty_rate`, emits a well-formed proposition
    /// request for an observed event.
    pub fn maybe_submit(
        &self,
        event: &EventRecord,
        rng: &mut impl Rng,
    ) -> Option<PropositionRequest> {
        if rng.gen_bool(self.honesty_rate) {
            Some(PropositionRequest::for_event(self.player_id, event))
        } else {
            None
        }
    }

    /// Decides a vote on an assigned proposition.
    ///
    /// Honest action (probability `honesty_rate`): hash every stored input
    /// ID in the proposition window; vote True with the preimage if one
    /// matches the digest, False otherwise. Dishonest action: vote False or
    /// abstain per [`DishonestAction`]. `None` means the node stays silent.
    pub fn produce_vote(
        &mut self,
        prop: &Proposition,
        now: SimTime,
        rng: &mut impl Rng,
    ) -> Option<Vote> {
        if !rng.gen_bool(self.honesty_rate) {
            return match self.dishonest_action {
                DishonestAction::VoteFalse => Some(Vote::false_vote(self.player_id, now)),
                DishonestAction::Abstain => None,
            };
        }
        // Full-window proof search. No early exit: the cost model charges
        // one hash evaluation per stored event in the window.
        let start = self.local_store.partition_point(|(t, _)| *t < prop.t_a);
        let end = self.local_store.partition_point(|(t, _)| *t <= prop.t_b);
        self.hash_evals += (end - start) as u64;
        let mut preimage: Option<&[u8]> = None;
        for (_, input_id) in &self.local_store[start..end] {
            if hash_input_id(input_id).ok() == Some(prop.digest) {
                preimage = Some(input_id);
            }
        }
        match preimage {
            Some(p) => Some(Vote::true_vote(self.player_id, p.to_vec(), now)),
            None => Some(Vote::false_vote(self.player_id, now)),
        }
    }
}
