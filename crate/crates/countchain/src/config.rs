//! Host-side deployment parameters.

use crate::time::SimDuration;

/// Everything the deployment owner fixes before the system starts.
///
/// A config is immutable for the lifetime of a [`crate::Host`]; all stake
/// amounts are integer currency units and all durations integer microseconds,
/// so two hosts built from equal configs behave identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemConfig {
    /// Verifiers assigned to every proposition (committee size `n`).
    pub num_verifiers: u32,
    /// Stake escrowed by the submitter and by each voting verifier.
    pub proposition_price: u64,
    /// Voting window: a proposition resolves this long after creation.
    pub proposition_deadline: SimDuration,
    /// Half-width of the event search window around the claimed timestamp.
    pub window_half_width: SimDuration,
    /// A player whose points fall to this value or below is banned (≤ 0).
    pub ban_threshold: i64,
    /// Currency seeded into the prize pool at genesis.
    pub initial_prize_fund: u64,
    /// Registered players (`N`).
    pub total_nodes: u32,
    /// Seed for the host's committee-selection stream.
    pub rng_seed: u64,
}

/// Validation failure for a [`SystemConfig`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("num_verifiers must be at least 1")]
    NoVerifiers,
    /// The submitter never verifies its own proposition, so at most
    /// `total_nodes - 1` committee seats exist.
    #[error("verifiers must be < nodes (got {verifiers} verifiers, {nodes} nodes)")]
    TooManyVerifiers { verifiers: u32, nodes: u32 },
    #[error("proposition_deadline must be positive")]
    ZeroDeadline,
    #[error("window_half_width must be positive")]
    ZeroWindow,
    #[error("ban_threshold must be ≤ 0 (got {0})")]
    PositiveBanThreshold(i64),
}

impl SystemConfig {
    /// Checks the cross-field invariants; returns `self` for chaining.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_verifiers == 0 {
            return Err(ConfigError::NoVerifiers);
        }
        if self.num_verifiers > self.total_nodes.saturating_sub(1) {
            return Err(ConfigError::TooManyVerifiers {
                verifiers: self.num_verifiers,
                nodes: self.total_nodes,
            });
        }
        if self.proposition_deadline.is_zero() {
            return Err(ConfigError::ZeroDeadline);
        }
        if self.window_half_width.is_zero() {
            return Err(ConfigError::ZeroWindow);
        }
        if self.ban_threshold > 0 {
            return Err(ConfigError::PositiveBanThreshold(self.ban_threshold));
        }
        Ok(())
    }
}

impl Default for SystemConfig {
    /// The reference deployment: 100 nodes, 14 verifiers, price 1,
    /// 2-second deadline, 1-second search half-width, ban at −5 points.
    fn default() -> Self {
        SystemConfig {
            num_verifiers: 14,
            proposition_price: 1,
            proposition_deadline: SimDuration::from_secs_f64(2.0),
            window_half_width: SimDuration::from_secs_f64(1.0),
            ban_threshold: -5,
            initial_prize_fund: 0,
            total_nodes: 100,
            rng_seed: 0,
        }
    }
}
