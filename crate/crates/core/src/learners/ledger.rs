//! Per-round regret bookkeeping.

use super::TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    /// Learner loss `U_t(x_t)` (an expectation for randomized learners).
    pub loss: f64,
    /// Loss of the hindsight comparator on this round.
    pub comparator_loss: f64,
    /// Snapshot of the action played.
    pub action: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    pub rounds: Vec<RoundRecord>,
    /// Total loss of the best fixed action in hindsight.
    pub comparator_loss: f64,
    /// Closed-form regret bound under test.
    pub bound_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretReport {
    pub regret: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// Set when the ledger has no rounds.
    pub degenerate: bool,
}

impl RegretLedger {
    pub fn new(bound_value: f64) -> Self {
        RegretLedger {
            bound_value,
            ..Default::default()
        }
    }

    pub fn push(&mut self, loss: f64, action: Vec<f64>) {
        let round = self.rounds.len() + 1;
        self.rounds.push(RoundRecord {
            round,
            loss,
            comparator_loss: 0.0,
            action,
        });
    }

    /// Records the comparator's per-round losses and their total.
    pub fn set_comparator(&mut self, per_round: &[f64]) {
        for (r, c) in self.rounds.iter_mut().zip(per_round) {
            r.comparator_loss = *c;
        }
        self.comparator_loss = per_round.iter().sum();
    }

    pub fn cumulative_loss(&self) -> f64 {
        self.rounds.iter().map(|r| r.loss).sum()
    }

    pub fn regret(&self) -> f64 {
        self.cumulative_loss() - self.comparator_loss
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}

/// Regret against the recorded comparator and whether it respects the bound
/// (up to the shared absolute tolerance).
pub fn regret_report(ledger: &RegretLedger) -> RegretReport {
    let regret = ledger.regret();
    RegretReport {
        regret,
        bound: ledger.bound_value,
        satisfied: regret <= ledger.bound_value + TOL,
        degenerate: ledger.is_empty(),
    }
}
