//! Point and stake accounting.
//!
//! The ledger is the incentive half of the protocol: every resolution moves
//! points (reputation that triggers bans and sizes prize shares) and stake
//! (currency escrowed per action, forfeited to the prize pool on misbehavior).
//!
//! Money is conserved at all times:
//!
//! ```text
//! Σ deposits + initial prize fund
//!     = Σ stake balances + Σ escrows + pool balance + Σ paid out
//! ```
//!
//! Point rules per resolved proposition:
//!
//! | role                        | decided True | decided False |
//! |-----------------------------|--------------|---------------|
//! | submitter                   | +4, stake back | −2, stake forfeited |
//! | verifier voting True        | +1, stake back | 0, stake back |
//! | verifier tallied False      | −1, escrow forfeited | 0, escrow back |
//!
//! A verifier "tallied False" is an explicit False voter, a silent verifier,
//! or one whose True vote carried a bad preimage. Only escrowed stake can be
//! forfeited: silent verifiers never escrowed, and invalid-proof voters
//! already forfeited at vote time, so their later stake delta is zero.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::types::{PlayerId, PropId};

/// Whether an account may still act.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccountStatus {
    Active,
    Banned,
}

/// One player's ledger state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerAccount {
    pub player_id: PlayerId,
    /// Reputation points; may go negative. Paid points reset to zero.
    pub points: i64,
    /// Free stake, available for escrow. Never negative.
    pub stake_balance: u64,
    /// Stake locked against open propositions. Never negative.
    pub escrowed: u64,
    pub status: AccountStatus,
    /// Lifetime prize income (informational; prizes leave the staking system).
    pub rewards_withdrawn: u64,
}

impl PlayerAccount {
    pub fn is_active(&self) -> bool {
        self.status == AccountStatus::Active
    }
}

/// The pot that accumulates forfeited stakes plus the initial fund.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrizePool {
    pub balance: u64,
}

/// Why a settlement entry touched a player.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaReason {
    SubmitterTrue,
    SubmitterFalse,
    VoterTrueMajority,
    VoterFalseMinority,
    VoterTrueMinority,
    VoterFalseMajority,
    /// Malformed digest on submission, or a True vote with a bad preimage.
    InvalidFormat,
}

/// One player's share of a settlement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaEntry {
    pub player: PlayerId,
    pub reason: DeltaReason,
    pub point_delta: i64,
    /// Net change to the player's total holdings (balance + escrow).
    /// Returned escrow is Δ0; a forfeiture is negative and credits the pool.
    pub stake_delta: i64,
}

/// The complete per-player effect of settling one proposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionDelta {
    pub prop_id: PropId,
    pub entries: Vec<DeltaEntry>,
}

impl ResolutionDelta {
    /// Total credited to the prize pool: the sum of all forfeitures.
    pub fn pool_credit(&self) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.stake_delta < 0)
            .map(|e| (-e.stake_delta) as u64)
            .sum()
    }
}

/// How a verifier seat was tallied at resolution time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoterTally {
    /// Accepted True vote (valid preimage); price is escrowed.
    TrueVote,
    /// Accepted explicit False vote; price is escrowed.
    FalseVote,
    /// Silent, late, or invalid-proof seat: tallied False, nothing escrowed.
    FalseDefaulted,
}

/// Everything the ledger needs to settle one resolved proposition.
#[derive(Debug, Clone)]
pub struct Settlement {
    pub prop_id: PropId,
    pub decided_true: bool,
    /// Stake escrowed per participant on this proposition.
    pub price: u64,
    pub submitter: PlayerId,
    /// One entry per verifier seat, in ascending player-id order.
    pub voters: Vec<(PlayerId, VoterTally)>,
}

/// Ledger operation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("unknown player {0}")]
    UnknownPlayer(PlayerId),
    #[error("player {0} already registered")]
    DuplicatePlayer(PlayerId),
    #[error("player {player} has {available} free stake, needs {needed}")]
    InsufficientStake {
        player: PlayerId,
        available: u64,
        needed: u64,
    },
    #[error("player {player} has {escrowed} escrowed, tried to move {amount}")]
    EscrowUnderflow {
        player: PlayerId,
        escrowed: u64,
        amount: u64,
    },
    #[error("proposition {0} was already settled")]
    DoubleApplication(PropId),
}

/// Account book, prize pool, and conservation bookkeeping.
#[derive(Debug, Clone)]
pub struct Ledger {
    accounts: BTreeMap<PlayerId, PlayerAccount>,
    pool: PrizePool,
    ban_threshold: i64,
    /// Total currency that ever entered the system (deposits + initial fund).
    total_in: u64,
    /// Total prize currency withdrawn from the pool to players' pockets.
    paid_out: u64,
    settled: HashSet<PropId>,
}

impl Ledger {
    pub fn new(ban_threshold: i64, initial_prize_fund: u64) -> Self {
        Ledger {
            accounts: BTreeMap::new(),
            pool: PrizePool {
                balance: initial_prize_fund,
            },
            ban_threshold,
            total_in: initial_prize_fund,
            paid_out: 0,
            settled: HashSet::new(),
        }
    }

    /// Opens an account funded with `deposit` stake units.
    pub fn register_player(&mut self, id: PlayerId, deposit: u64) -> Result<(), LedgerError> {
        if self.accounts.contains_key(&id) {
            return Err(LedgerError::DuplicatePlayer(id));
        }
        self.accounts.insert(
            id,
            PlayerAccount {
                player_id: id,
                points: 0,
                stake_balance: deposit,
                escrowed: 0,
                status: AccountStatus::Active,
                rewards_withdrawn: 0,
            },
        );
        self.total_in += deposit;
        Ok(())
    }

    pub fn account(&self, id: PlayerId) -> Option<&PlayerAccount> {
        self.accounts.get(&id)
    }

    pub fn accounts(&self) -> impl Iterator<Item = &PlayerAccount> {
        self.accounts.values()
    }

    pub fn pool(&self) -> PrizePool {
        self.pool
    }

    pub fn paid_out_total(&self) -> u64 {
        self.paid_out
    }

    pub fn ban_threshold(&self) -> i64 {
        self.ban_threshold
    }

    fn get_mut(&mut self, id: PlayerId) -> Result<&mut PlayerAccount, LedgerError> {
        self.accounts
            .get_mut(&id)
            .ok_or(LedgerError::UnknownPlayer(id))
    }

    /// Moves free stake into escrow.
    pub fn escrow(&mut self, id: PlayerId, amount: u64) -> Result<(), LedgerError> {
        let acct = self.get_mut(id)?;
        if acct.stake_balance < amount {
            return Err(LedgerError::InsufficientStake {
                player: id,
                available: acct.stake_balance,
                needed: amount,
            });
        }
        acct.stake_balance -= amount;
        acct.escrowed += amount;
        Ok(())
    }

    /// Returns escrowed stake to the player's free balance.
    pub fn release(&mut self, id: PlayerId, amount: u64) -> Result<(), LedgerError> {
        let acct = self.get_mut(id)?;
        if acct.escrowed < amount {
            return Err(LedgerError::EscrowUnderflow {
                player: id,
                escrowed: acct.escrowed,
                amount,
            });
        }
        acct.escrowed -= amount;
        acct.stake_balance += amount;
        Ok(())
    }

    /// Moves escrowed stake into the prize pool.
    pub fn forfeit(&mut self, id: PlayerId, amount: u64) -> Result<(), LedgerError> {
        let acct = self.get_mut(id)?;
        if acct.escrowed < amount {
            return Err(LedgerError::EscrowUnderflow {
                player: id,
                escrowed: acct.escrowed,
                amount,
            });
        }
        acct.escrowed -= amount;
        self.pool.balance += amount;
        Ok(())
    }

    /// Bans the player if points have fallen to the threshold or below.
    /// Returns true when the account is (now) banned. Checked eagerly after
    /// every point mutation; a ban is permanent.
    pub fn ban_check(&mut self, id: PlayerId) -> Result<bool, LedgerError> {
        let threshold = self.ban_threshold;
        let acct = self.get_mut(id)?;
        if acct.points <= threshold {
            acct.status = AccountStatus::Banned;
        }
        Ok(acct.status == AccountStatus::Banned)
    }

    fn add_points(&mut self, id: PlayerId, delta: i64) -> Result<bool, LedgerError> {
        self.get_mut(id)?.points += delta;
        self.ban_check(id)
    }

    /// Escrow-forfeits `staked` and applies the −2 malformed-submission
    /// penalty. Used for both bad request digests and bad vote preimages;
    /// the stake must already be escrowed.
    pub fn penalize_invalid_submission(
        &mut self,
        id: PlayerId,
        staked: u64,
        prop_id: PropId,
    ) -> Result<ResolutionDelta, LedgerError> {
        self.forfeit(id, staked)?;
        self.add_points(id, -2)?;
        Ok(ResolutionDelta {
            prop_id,
            entries: vec![DeltaEntry {
                player: id,
                reason: DeltaReason::InvalidFormat,
                point_delta: -2,
                stake_delta: -(staked as i64),
            }],
        })
    }

    /// Settles a resolved proposition: releases or forfeits every escrow,
    /// applies the point table, and runs ban checks. Each proposition settles
    /// exactly once.
    pub fn apply_resolution(&mut self, s: &Settlement) -> Result<ResolutionDelta, LedgerError> {
        if self.settled.contains(&s.prop_id) {
            return Err(LedgerError::DoubleApplication(s.prop_id));
        }
        // Validate up front so a bad settlement cannot half-apply.
        if !self.accounts.contains_key(&s.submitter) {
            return Err(LedgerError::UnknownPlayer(s.submitter));
        }
        for (id, _) in &s.voters {
            if !self.accounts.contains_key(id) {
                return Err(LedgerError::UnknownPlayer(*id));
            }
        }
        self.settled.insert(s.prop_id);

        let price = s.price as i64;
        let mut entries = Vec::with_capacity(s.voters.len() + 1);

        if s.decided_true {
            self.release(s.submitter, s.price)?;
            self.add_points(s.submitter, 4)?;
            entries.push(DeltaEntry {
                player: s.submitter,
                reason: DeltaReason::SubmitterTrue,
                point_delta: 4,
                stake_delta: 0,
            });
            for &(id, tally) in &s.voters {
                let entry = match tally {
                    VoterTally::TrueVote => {
                        self.release(id, s.price)?;
                        self.add_points(id, 1)?;
                        DeltaEntry {
                            player: id,
                            reason: DeltaReason::VoterTrueMajority,
                            point_delta: 1,
                            stake_delta: 0,
                        }
                    }
                    VoterTally::FalseVote => {
                        self.forfeit(id, s.price)?;
                        self.add_points(id, -1)?;
                        DeltaEntry {
                            player: id,
                            reason: DeltaReason::VoterFalseMinority,
                            point_delta: -1,
                            stake_delta: -price,
                        }
                    }
                    VoterTally::FalseDefaulted => {
                        self.add_points(id, -1)?;
                        DeltaEntry {
                            player: id,
                            reason: DeltaReason::VoterFalseMinority,
                            point_delta: -1,
                            stake_delta: 0,
                        }
                    }
                };
                entries.push(entry);
            }
        } else {
            self.forfeit(s.submitter, s.price)?;
            self.add_points(s.submitter, -2)?;
            entries.push(DeltaEntry {
                player: s.submitter,
                reason: DeltaReason::SubmitterFalse,
                point_delta: -2,
                stake_delta: -price,
            });
            for &(id, tally) in &s.voters {
                let entry = match tally {
                    VoterTally::TrueVote => {
                        self.release(id, s.price)?;
                        DeltaEntry {
                            player: id,
                            reason: DeltaReason::VoterTrueMinority,
                            point_delta: 0,
                            stake_delta: 0,
                        }
                    }
                    VoterTally::FalseVote => {
                        self.release(id, s.price)?;
                        DeltaEntry {
                            player: id,
                            reason: DeltaReason::VoterFalseMajority,
                            point_delta: 0,
                            stake_delta: 0,
                        }
                    }
                    VoterTally::FalseDefaulted => DeltaEntry {
                        player: id,
                        reason: DeltaReason::VoterFalseMajority,
                        point_delta: 0,
                        stake_delta: 0,
                    },
                };
                entries.push(entry);
            }
        }

        let delta = ResolutionDelta {
            prop_id: s.prop_id,
            entries,
        };
        debug_assert!(self.conservation_holds(), "settlement broke conservation");
        Ok(delta)
    }

    /// Pays the pool out proportionally to positive point balances.
    ///
    /// Shares use largest-remainder apportionment so the payouts sum exactly
    /// to the pool; fractional comparisons are done in exact integer
    /// arithmetic (ties broken by lower player id). Paid players' points reset
    /// to zero; zero or negative balances receive nothing and keep their
    /// points. With no positive balance the call is a no-op.
    pub fn distribute_prizes(&mut self) -> Vec<(PlayerId, u64)> {
        let pool = self.pool.balance;
        let winners: Vec<(PlayerId, u64)> = self
            .accounts
            .values()
            .filter(|a| a.points > 0)
            .map(|a| (a.player_id, a.points as u64))
            .collect();
        let total_points: u64 = winners.iter().map(|&(_, p)| p).sum();
        if total_points == 0 || pool == 0 {
            // Still reset positive points when the pool is empty? No: a payout
            // of zero is no payout; points persist until real money moves.
            return Vec::new();
        }

        // Floor shares, then hand the leftover units to the largest
        // fractional remainders (pool·points mod total), lowest id first.
        let mut payouts: Vec<(PlayerId, u64, u64)> = winners
            .iter()
            .map(|&(id, pts)| {
                let prod = pool as u128 * pts as u128;
                let share = (prod / total_points as u128) as u64;
                let rem = (prod % total_points as u128) as u64;
                (id, share, rem)
            })
            .collect();
        let floor_total: u64 = payouts.iter().map(|&(_, s, _)| s).sum();
        let mut leftover = pool - floor_total;
        if leftover > 0 {
            let mut order: Vec<usize> = (0..payouts.len()).collect();
            order.sort_by(|&a, &b| {
                payouts[b]
                    .2
                    .cmp(&payouts[a].2)
                    .then(payouts[a].0.cmp(&payouts[b].0))
            });
            for idx in order {
                if leftover == 0 {
                    break;
                }
                payouts[idx].1 += 1;
                leftover -= 1;
            }
        }

        let mut out = Vec::with_capacity(payouts.len());
        for (id, share, _) in payouts {
            let acct = self.accounts.get_mut(&id).expect("winner exists");
            acct.points = 0;
            acct.rewards_withdrawn += share;
            self.pool.balance -= share;
            self.paid_out += share;
            out.push((id, share));
        }
        debug_assert!(self.conservation_holds(), "distribution broke conservation");
        out
    }

    /// Exact conservation identity over the whole book.
    pub fn conservation_holds(&self) -> bool {
        let held: u64 = self
            .accounts
            .values()
            .map(|a| a.stake_balance + a.escrowed)
            .sum();
        held + self.pool.balance + self.paid_out == self.total_in
    }

    /// Snapshot of every account as CSV (`player_id,points,stake_balance,escrowed,status`).
    pub fn export_csv(&self) -> String {
        let mut out = String::from("player_id,points,stake_balance,escrowed,status\n");
        for a in self.accounts.values() {
            let status = match a.status {
                AccountStatus::Active => "active",
                AccountStatus::Banned => "banned",
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                a.player_id.0, a.points, a.stake_balance, a.escrowed, status
            )
            .expect("writing to String cannot fail");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger_with(players: &[(u32, i64)]) -> Ledger {
        let mut l = Ledger::new(-5, 0);
        for &(id, points) in players {
            l.register_player(PlayerId(id), 100).unwrap();
            l.accounts.get_mut(&PlayerId(id)).unwrap().points = points;
        }
        l
    }

    #[test]
    fn proportional_distribution_ignores_non_positive_points() {
        let mut l = ledger_with(&[(1, 3), (2, 1), (3, -2)]);
        l.pool.balance = 100;
        l.total_in += 100;
        let payouts = l.distribute_prizes();
        assert_eq!(payouts, vec![(PlayerId(1), 75), (PlayerId(2), 25)]);
        assert_eq!(l.account(PlayerId(1)).unwrap().points, 0);
        assert_eq!(l.account(PlayerId(2)).unwrap().points, 0);
        assert_eq!(l.account(PlayerId(3)).unwrap().points, -2);
        assert_eq!(l.pool().balance, 0);
        assert!(l.conservation_holds());
    }

    #[test]
    fn sole_positive_player_takes_the_whole_pool() {
        let mut l = ledger_with(&[(1, 5)]);
        l.pool.balance = 100;
        l.total_in += 100;
        assert_eq!(l.distribute_prizes(), vec![(PlayerId(1), 100)]);
    }

    #[test]
    fn distribution_with_no_positive_points_is_a_noop() {
        let mut l = ledger_with(&[(1, 0), (2, -3)]);
        l.pool.balance = 50;
        l.total_in += 50;
        assert!(l.distribute_prizes().is_empty());
        assert_eq!(l.pool().balance, 50);
        assert_eq!(l.account(PlayerId(2)).unwrap().points, -3);
    }

    #[test]
    fn remainders_go_to_largest_fractional_shares() {
        // pool 11, four equal winners: floor gives 2 each (8); the three
        // leftover units land on the lowest ids (all remainders equal).
        let mut l = ledger_with(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        l.pool.balance = 11;
        l.total_in += 11;
        let payouts = l.distribute_prizes();
        assert_eq!(
            payouts,
            vec![
                (PlayerId(1), 3),
                (PlayerId(2), 3),
                (PlayerId(3), 3),
                (PlayerId(4), 2)
            ]
        );
        let total: u64 = payouts.iter().map(|&(_, x)| x).sum();
        assert_eq!(total, 11, "the pool pays out exactly");
        assert_eq!(l.pool().balance, 0);
    }

    #[test]
    fn invalid_submission_penalty_composes_with_banning() {
        let mut l = ledger_with(&[(1, -3)]);
        l.escrow(PlayerId(1), 1).unwrap();
        let delta = l
            .penalize_invalid_submission(PlayerId(1), 1, PropId(9))
            .unwrap();
        assert_eq!(delta.entries[0].point_delta, -2);
        assert_eq!(delta.entries[0].stake_delta, -1);
        let acct = l.account(PlayerId(1)).unwrap();
        assert_eq!(acct.points, -5);
        assert_eq!(acct.status, AccountStatus::Banned, "hit the −5 threshold");
        assert_eq!(l.pool().balance, 1);
    }

    #[test]
    fn ban_threshold_is_inclusive() {
        let mut l = ledger_with(&[(1, -5), (2, -4), (3, 0)]);
        assert!(l.ban_check(PlayerId(1)).unwrap());
        assert!(!l.ban_check(PlayerId(2)).unwrap());
        assert!(!l.ban_check(PlayerId(3)).unwrap());
    }

    #[test]
    fn true_outcome_pays_submitter_and_majority_and_fines_false_voters() {
        let mut l = ledger_with(&[(1, 0), (2, 0), (3, 0)]);
        l.escrow(PlayerId(1), 1).unwrap(); // submitter
        l.escrow(PlayerId(2), 1).unwrap(); // True voter
        l.escrow(PlayerId(3), 1).unwrap(); // False voter
        let delta = l
            .apply_resolution(&Settlement {
                prop_id: PropId(1),
                decided_true: true,
                price: 1,
                submitter: PlayerId(1),
                voters: vec![
                    (PlayerId(2), VoterTally::TrueVote),
                    (PlayerId(3), VoterTally::FalseVote),
                ],
            })
            .unwrap();
        assert_eq!(l.account(PlayerId(1)).unwrap().points, 4);
        assert_eq!(l.account(PlayerId(2)).unwrap().points, 1);
        assert_eq!(l.account(PlayerId(3)).unwrap().points, -1);
        assert_eq!(l.account(PlayerId(1)).unwrap().stake_balance, 100);
        assert_eq!(l.account(PlayerId(2)).unwrap().stake_balance, 100);
        assert_eq!(l.account(PlayerId(3)).unwrap().stake_balance, 99);
        assert_eq!(l.pool().balance, 1);
        assert_eq!(delta.pool_credit(), 1);
    }

    #[test]
    fn false_outcome_fines_submitter_and_returns_all_voter_escrows() {
        let mut l = ledger_with(&[(1, 0), (2, 0), (3, 0)]);
        l.escrow(PlayerId(1), 1).unwrap();
        l.escrow(PlayerId(2), 1).unwrap();
        l.escrow(PlayerId(3), 1).unwrap();
        l.apply_resolution(&Settlement {
            prop_id: PropId(1),
            decided_true: false,
            price: 1,
            submitter: PlayerId(1),
            voters: vec![
                (PlayerId(2), VoterTally::TrueVote),
                (PlayerId(3), VoterTally::FalseVote),
            ],
        })
        .unwrap();
        assert_eq!(l.account(PlayerId(1)).unwrap().points, -2);
        assert_eq!(l.account(PlayerId(1)).unwrap().stake_balance, 99);
        // Minority True voter: wasted effort is the only penalty.
        assert_eq!(l.account(PlayerId(2)).unwrap().points, 0);
        assert_eq!(l.account(PlayerId(2)).unwrap().stake_balance, 100);
        assert_eq!(l.account(PlayerId(3)).unwrap().points, 0);
        assert_eq!(l.account(PlayerId(3)).unwrap().stake_balance, 100);
        assert_eq!(l.pool().balance, 1);
    }

    #[test]
    fn settling_a_proposition_twice_is_rejected() {
        let mut l = ledger_with(&[(1, 0)]);
        l.escrow(PlayerId(1), 1).unwrap();
        let s = Settlement {
            prop_id: PropId(7),
            decided_true: false,
            price: 1,
            submitter: PlayerId(1),
            voters: vec![],
        };
        l.apply_resolution(&s).unwrap();
        assert_eq!(
            l.apply_resolution(&s),
            Err(LedgerError::DoubleApplication(PropId(7)))
        );
    }

    #[test]
    fn forfeits_equal_pool_credit_in_every_settlement() {
        // 3 explicit False voters under a True outcome: −3 stake total.
        let mut l = ledger_with(&[(1, 0), (2, 0), (3, 0), (4, 0)]);
        for id in 1..=4 {
            l.escrow(PlayerId(id), 1).unwrap();
        }
        let delta = l
            .apply_resolution(&Settlement {
                prop_id: PropId(1),
                decided_true: true,
                price: 1,
                submitter: PlayerId(1),
                voters: vec![
                    (PlayerId(2), VoterTally::FalseVote),
                    (PlayerId(3), VoterTally::FalseVote),
                    (PlayerId(4), VoterTally::FalseDefaulted),
                ],
            })
            .unwrap();
        assert_eq!(delta.pool_credit(), 2, "only escrowed stake is forfeited");
        assert_eq!(l.pool().balance, 2);
        // The defaulted seat still takes the point hit.
        assert_eq!(l.account(PlayerId(4)).unwrap().points, -1);
        assert_eq!(l.account(PlayerId(4)).unwrap().escrowed, 1);
    }

    #[test]
    fn csv_snapshot_lists_accounts_in_id_order() {
        let mut l = ledger_with(&[(2, 1), (1, -5)]);
        l.ban_check(PlayerId(1)).unwrap();
        let csv = l.export_csv();
        assert_eq!(
            csv,
            "player_id,points,stake_balance,escrowed,status\n\
             1,-5,100,0,banned\n\
             2,1,100,0,active\n"
        );
    }

    #[test]
    fn escrow_more_than_balance_is_rejected() {
        let mut l = ledger_with(&[(1, 0)]);
        assert!(matches!(
            l.escrow(PlayerId(1), 101),
            Err(LedgerError::InsufficientStake { .. })
        ));
    }
}
