//! The host state machine.
//!
//! The host is the trusted coordinator at the center of the counting
//! protocol. It accepts hash-committed proposition requests, mints
//! propositions with a verification window and deadline, draws a random
//! verifier committee for each one, collects preimage-checked votes, and
//! resolves each proposition by majority once its deadline passes, feeding
//! every resolution through the [`Ledger`] so points, stakes, and bans stay
//! consistent.
//!
//! A proposition never carries the raw input ID, only its digest: verifiers
//! must rediscover the preimage in their own stores to vote True, which is
//! what makes lazy True-voting structurally impossible.
//!
//! All mutations are serialized through `&mut Host`; read-only queries can be
//! shared freely. Committee draws consume the host's seeded RNG only on
//! accepted submissions, so rejected requests never perturb later draws.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, SystemConfig};
use crate::hash::hash_input_id;
use crate::ledger::{Ledger, LedgerError, ResolutionDelta, Settlement, VoterTally};
use crate::time::SimTime;
use crate::types::{Digest, PlayerId, PropId};

/// One countable real-world occurrence, as delivered to nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    /// Unique identifier of the underlying data; never empty.
    pub input_id: Vec<u8>,
    pub timestamp: SimTime,
}

impl EventRecord {
    pub fn new(input_id: Vec<u8>, timestamp: SimTime) -> Self {
        assert!(!input_id.is_empty(), "event input_id must be non-empty");
        EventRecord {
            input_id,
            timestamp,
        }
    }
}

/// A player's claim that an event occurred, committed by digest.
///
/// The raw `input_id` travels with the request so the host can check the
/// commitment; it is discarded when the proposition is minted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionRequest {
    pub submitter_id: PlayerId,
    pub input_id: Vec<u8>,
    pub timestamp: SimTime,
    pub digest: Digest,
}

impl PropositionRequest {
    /// Builds a well-formed request for an observed event.
    pub fn for_event(submitter_id: PlayerId, event: &EventRecord) -> Self {
        let digest = hash_input_id(&event.input_id).expect("event ids are non-empty");
        PropositionRequest {
            submitter_id,
            input_id: event.input_id.clone(),
            timestamp: event.timestamp,
            digest,
        }
    }
}

/// Lifecycle state of a proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropositionStatus {
    Open,
    ResolvedTrue,
    ResolvedFalse,
}

/// A verifier's ballot. True votes must carry the claimed preimage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vote {
    pub verifier_id: PlayerId,
    pub value: bool,
    pub claimed_input_id: Option<Vec<u8>>,
    pub received_at: SimTime,
}

impl Vote {
    pub fn true_vote(verifier_id: PlayerId, claimed_input_id: Vec<u8>, at: SimTime) -> Self {
        Vote {
            verifier_id,
            value: true,
            claimed_input_id: Some(claimed_input_id),
            received_at: at,
        }
    }

    pub fn false_vote(verifier_id: PlayerId, at: SimTime) -> Self {
        Vote {
            verifier_id,
            value: false,
            claimed_input_id: None,
            received_at: at,
        }
    }
}

/// A minted proposition: the digest commitment, its verification window,
/// the committee, and every accepted vote.
#[derive(Debug, Clone)]
pub struct Proposition {
    pub prop_id: PropId,
    pub digest: Digest,
    /// Start of the verification window (request timestamp − half width).
    pub t_a: SimTime,
    /// End of the verification window (request timestamp + half width).
    pub t_b: SimTime,
    pub deadline: SimTime,
    pub submitter_id: PlayerId,
    /// The committee, in ascending player-id order.
    pub verifier_ids: Vec<PlayerId>,
    /// Accepted votes (True votes here always passed the preimage check).
    pub votes: BTreeMap<PlayerId, Vote>,
    pub status: PropositionStatus,
    /// Seats burned by an invalid-proof vote; tallied False at resolution.
    defaulted: BTreeSet<PlayerId>,
}

impl Proposition {
    pub fn is_open(&self) -> bool {
        self.status == PropositionStatus::Open
    }

    /// Seats that submitted an invalid True proof and were defaulted to False.
    pub fn defaulted_seats(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.defaulted.iter().copied()
    }
}

/// The result of resolving one proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub prop_id: PropId,
    pub decided: bool,
    pub true_count: u32,
    /// Explicit False votes plus every silent or defaulted seat.
    pub false_count: u32,
    pub tie_broken_by_submitter: bool,
}

/// Why a proposition request was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubmitError {
    #[error("unknown submitter {0}")]
    UnknownSubmitter(PlayerId),
    #[error("submitter {0} is banned")]
    BannedSubmitter(PlayerId),
    #[error("submitter {player} has {available} free stake, price is {needed}")]
    InsufficientStake {
        player: PlayerId,
        available: u64,
        needed: u64,
    },
    /// The digest does not commit to the request's input ID. The stake is
    /// forfeited and the submitter takes the −2 malformed-format penalty.
    #[error("digest does not match the request's input id")]
    InvalidDigest,
    /// A proposition with this digest already covers an overlapping window.
    /// The stake is refunded; no penalty.
    #[error("duplicate of proposition {existing}")]
    Duplicate { existing: PropId },
    #[error("need {needed} verifiers but only {available} other active players")]
    InsufficientVerifierPool { available: usize, needed: u32 },
}

/// Why a vote was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VoteError {
    #[error("unknown proposition {0}")]
    UnknownProposition(PropId),
    #[error("proposition {0} is no longer open")]
    ClosedProposition(PropId),
    #[error("player {0} is not an assigned verifier")]
    NotAssigned(PlayerId),
    #[error("player {0} already voted")]
    AlreadyVoted(PlayerId),
    /// Arrived after the deadline; the seat is tallied False at resolution.
    #[error("vote arrived after the deadline")]
    Late,
    #[error("verifier {player} has {available} free stake, price is {needed}")]
    InsufficientStake {
        player: PlayerId,
        available: u64,
        needed: u64,
    },
    /// The claimed preimage does not hash to the proposition digest. The
    /// voter forfeits the stake, takes −2 points, and the seat defaults to
    /// False.
    #[error("claimed preimage does not match the proposition digest")]
    InvalidProof,
}

/// Why a resolution attempt was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("unknown proposition {0}")]
    UnknownProposition(PropId),
    #[error("proposition {0} was already resolved")]
    AlreadyResolved(PropId),
    #[error("deadline has not passed yet")]
    BeforeDeadline,
}

/// Draws `n` distinct verifiers uniformly from the active set, excluding the
/// submitter. The same RNG state always yields the same committee.
pub fn assign_verifiers(
    active_players: &BTreeSet<PlayerId>,
    submitter_id: PlayerId,
    n: u32,
    rng: &mut impl Rng,
) -> Result<Vec<PlayerId>, SubmitError> {
    let pool: Vec<PlayerId> = active_players
        .iter()
        .copied()
        .filter(|&id| id != submitter_id)
        .collect();
    if pool.len() < n as usize {
        return Err(SubmitError::InsufficientVerifierPool {
            available: pool.len(),
            needed: n,
        });
    }
    let mut chosen: Vec<PlayerId> = rand::seq::index::sample(rng, pool.len(), n as usize)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    chosen.sort_unstable();
    Ok(chosen)
}

/// The protocol coordinator: proposition pool, committee RNG, counter, and
/// the ledger it settles into.
#[derive(Debug, Clone)]
pub struct Host {
    cfg: SystemConfig,
    ledger: Ledger,
    props: BTreeMap<PropId, Proposition>,
    by_digest: HashMap<Digest, Vec<PropId>>,
    /// Open propositions indexed by (deadline, id) for due-date scans.
    open_by_deadline: BTreeSet<(SimTime, PropId)>,
    active: BTreeSet<PlayerId>,
    counter: u64,
    next_prop: u64,
    rng: ChaCha8Rng,
}

impl Host {
    /// Builds a host from a validated configuration.
    pub fn new(cfg: SystemConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(0); // committee draws; behavioral streams live elsewhere
        Ok(Host {
            ledger: Ledger::new(cfg.ban_threshold, cfg.initial_prize_fund),
            props: BTreeMap::new(),
            by_digest: HashMap::new(),
            open_by_deadline: BTreeSet::new(),
            active: BTreeSet::new(),
            counter: 0,
            next_prop: 0,
            rng,
            cfg,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    /// The protocol's output: how many propositions resolved True.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn proposition(&self, id: PropId) -> Option<&Proposition> {
        self.props.get(&id)
    }

    pub fn propositions(&self) -> impl Iterator<Item = &Proposition> {
        self.props.values()
    }

    pub fn is_active(&self, id: PlayerId) -> bool {
        self.active.contains(&id)
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    /// Registers a player with an initial stake deposit.
    pub fn register_player(&mut self, id: PlayerId, deposit: u64) -> Result<(), LedgerError> {
        self.ledger.register_player(id, deposit)?;
        self.active.insert(id);
        Ok(())
    }

    /// Pays out the prize pool proportionally to positive point balances.
    pub fn distribute_prizes(&mut self) -> Vec<(PlayerId, u64)> {
        self.ledger.distribute_prizes()
    }

    /// Drops a player from the active set if the ledger banned them.
    fn sync_ban(&mut self, id: PlayerId) {
        if let Some(acct) = self.ledger.account(id) {
            if !acct.is_active() {
                self.active.remove(&id);
            }
        }
    }

    /// Handles a proposition request at time `now`.
    ///
    /// On acceptance the price is escrowed, a proposition is minted around
    /// the request timestamp, and a committee is drawn. Rejections follow the
    /// incentive rules: a digest that fails the commitment check costs the
    /// stake plus two points, while a duplicate is refunded without penalty.
    pub fn submit_request(
        &mut self,
        req: &PropositionRequest,
        now: SimTime,
    ) -> Result<PropId, SubmitError> {
        let submitter = req.submitter_id;
        let acct = self
            .ledger
            .account(submitter)
            .ok_or(SubmitError::UnknownSubmitter(submitter))?;
        if !acct.is_active() {
            return Err(SubmitError::BannedSubmitter(submitter));
        }
        let price = self.cfg.proposition_price;
        match self.ledger.escrow(submitter, price) {
            Ok(()) => {}
            Err(LedgerError::InsufficientStake {
                player,
                available,
                needed,
            }) => {
                return Err(SubmitError::InsufficientStake {
                    player,
                    available,
                    needed,
                })
            }
            Err(e) => unreachable!("escrow on checked account: {e}"),
        }

        // Commitment check: the digest must be the hash of the carried
        // input ID. A mismatch is the malformed-format offense.
        let valid = hash_input_id(&req.input_id)
            .map(|d| d == req.digest)
            .unwrap_or(false);
        if !valid {
            let prop_id = self.alloc_prop_id();
            self.ledger
                .penalize_invalid_submission(submitter, price, prop_id)
                .expect("stake was just escrowed");
            self.sync_ban(submitter);
            return Err(SubmitError::InvalidDigest);
        }

        // Dedup: same digest, overlapping verification window, whether the
        // earlier proposition is still open or already resolved.
        let half = self.cfg.window_half_width;
        let (req_a, req_b) = (req.timestamp - half, req.timestamp + half);
        if let Some(ids) = self.by_digest.get(&req.digest) {
            for &id in ids {
                let p = &self.props[&id];
                if p.t_a <= req_b && req_a <= p.t_b {
                    self.ledger
                        .release(submitter, price)
                        .expect("stake was just escrowed");
                    return Err(SubmitError::Duplicate { existing: id });
                }
            }
        }

        let verifier_ids =
            match assign_verifiers(&self.active, submitter, self.cfg.num_verifiers, &mut self.rng)
            {
                Ok(ids) => ids,
                Err(e) => {
                    self.ledger
                        .release(submitter, price)
                        .expect("stake was just escrowed");
                    return Err(e);
                }
            };

        let prop_id = self.alloc_prop_id();
        let prop = Proposition {
            prop_id,
            digest: req.digest,
            t_a: req_a,
            t_b: req_b,
            deadline: now + self.cfg.proposition_deadline,
            submitter_id: submitter,
            verifier_ids,
            votes: BTreeMap::new(),
            status: PropositionStatus::Open,
            defaulted: BTreeSet::new(),
        };
        self.open_by_deadline.insert((prop.deadline, prop_id));
        self.by_digest.entry(req.digest).or_default().push(prop_id);
        self.props.insert(prop_id, prop);
        Ok(prop_id)
    }

    fn alloc_prop_id(&mut self) -> PropId {
        let id = PropId(self.next_prop);
        self.next_prop += 1;
        id
    }

    /// Records a verifier's vote at time `now`.
    ///
    /// The price is escrowed on every accepted vote. A True vote whose
    /// claimed preimage fails the digest check is rejected as
    /// [`VoteError::InvalidProof`]: the stake is forfeited, the voter takes
    /// −2 points, and the seat is tallied False at resolution.
    pub fn cast_vote(&mut self, prop_id: PropId, vote: Vote, now: SimTime) -> Result<(), VoteError> {
        let voter = vote.verifier_id;
        let price = self.cfg.proposition_price;
        let prop = self
            .props
            .get(&prop_id)
            .ok_or(VoteError::UnknownProposition(prop_id))?;
        if !prop.is_open() {
            return Err(VoteError::ClosedProposition(prop_id));
        }
        if !prop.verifier_ids.contains(&voter) {
            return Err(VoteError::NotAssigned(voter));
        }
        if prop.votes.contains_key(&voter) || prop.defaulted.contains(&voter) {
            return Err(VoteError::AlreadyVoted(voter));
        }
        if now > prop.deadline {
            return Err(VoteError::Late);
        }
        match self.ledger.escrow(voter, price) {
            Ok(()) => {}
            Err(LedgerError::InsufficientStake {
                player,
                available,
                needed,
            }) => {
                return Err(VoteError::InsufficientStake {
                    player,
                    available,
                    needed,
                })
            }
            Err(e) => unreachable!("escrow on assigned verifier: {e}"),
        }

        if vote.value {
            let proof_ok = vote
                .claimed_input_id
                .as_deref()
                .and_then(|id| hash_input_id(id).ok())
                .map(|d| d == prop.digest)
                .unwrap_or(false);
            if !proof_ok {
                self.ledger
                    .penalize_invalid_submission(voter, price, prop_id)
                    .expect("stake was just escrowed");
                self.sync_ban(voter);
                self.props
                    .get_mut(&prop_id)
                    .expect("proposition exists")
                    .defaulted
                    .insert(voter);
                return Err(VoteError::InvalidProof);
            }
        }

        self.props
            .get_mut(&prop_id)
            .expect("proposition exists")
            .votes
            .insert(voter, vote);
        Ok(())
    }

    /// Resolves an open proposition whose deadline has passed.
    ///
    /// Every committee seat is tallied: accepted True votes count True,
    /// everything else (explicit False, silence, defaulted seats) counts
    /// False. True wins strict majorities and, for even committees, exact
    /// ties, via the submitter's implicit True vote. The settlement is
    /// applied to the ledger and the counter advances on True.
    pub fn resolve_proposition(
        &mut self,
        prop_id: PropId,
        now: SimTime,
    ) -> Result<Outcome, ResolveError> {
        let prop = self
            .props
            .get(&prop_id)
            .ok_or(ResolveError::UnknownProposition(prop_id))?;
        if !prop.is_open() {
            return Err(ResolveError::AlreadyResolved(prop_id));
        }
        if now < prop.deadline {
            return Err(ResolveError::BeforeDeadline);
        }

        let n = self.cfg.num_verifiers;
        let true_count = prop.votes.values().filter(|v| v.value).count() as u32;
        let false_count = n - true_count;
        let decided = true_count >= false_count;
        let tie = true_count == false_count;

        let voters: Vec<(PlayerId, VoterTally)> = prop
            .verifier_ids
            .iter()
            .map(|&id| {
                let tally = match prop.votes.get(&id) {
                    Some(v) if v.value => VoterTally::TrueVote,
                    Some(_) => VoterTally::FalseVote,
                    None => VoterTally::FalseDefaulted,
                };
                (id, tally)
            })
            .collect();
        let settlement = Settlement {
            prop_id,
            decided_true: decided,
            price: self.cfg.proposition_price,
            submitter: prop.submitter_id,
            voters,
        };
        let submitter = prop.submitter_id;
        let deadline = prop.deadline;

        self.ledger
            .apply_resolution(&settlement)
            .expect("all participants are registered and escrows are held");
        self.sync_ban(submitter);
        for (id, _) in &settlement.voters {
            self.sync_ban(*id);
        }

        let prop = self.props.get_mut(&prop_id).expect("proposition exists");
        prop.status = if decided {
            PropositionStatus::ResolvedTrue
        } else {
            PropositionStatus::ResolvedFalse
        };
        self.open_by_deadline.remove(&(deadline, prop_id));
        if decided {
            self.counter += 1;
        }
        Ok(Outcome {
            prop_id,
            decided,
            true_count,
            false_count,
            tie_broken_by_submitter: tie,
        })
    }

    /// Open propositions whose deadline is at or before `now`, in
    /// (deadline, id) order.
    pub fn due_propositions(&self, now: SimTime) -> Vec<PropId> {
        self.open_by_deadline
            .iter()
            .take_while(|(deadline, _)| *deadline <= now)
            .map(|&(_, id)| id)
            .collect()
    }

    /// Earliest deadline among open propositions.
    pub fn next_deadline(&self) -> Option<SimTime> {
        self.open_by_deadline.iter().next().map(|&(t, _)| t)
    }

    /// Applies the resolution delta of an externally computed settlement.
    /// Exposed for tests that audit ledger math against hand-built tallies.
    pub fn apply_settlement(&mut self, s: &Settlement) -> Result<ResolutionDelta, LedgerError> {
        let delta = self.ledger.apply_resolution(s)?;
        self.sync_ban(s.submitter);
        for (id, _) in &s.voters {
            self.sync_ban(*id);
        }
        Ok(delta)
    }
}
