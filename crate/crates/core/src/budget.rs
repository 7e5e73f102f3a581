//! Node-count and wall-clock limits for bounded searches.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 2_000_000, max_millis: 60_000 }
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_millis: u64) -> Self {
        SearchBudget { max_nodes, max_millis }
    }

    pub fn unlimited() -> Self {
        SearchBudget { max_nodes: u64::MAX, max_millis: u64::MAX }
    }

    pub fn start(&self) -> Meter {
        Meter { budget: *self, started: Instant::now(), nodes: 0, exhausted: false }
    }
}

/// Running count against a [`SearchBudget`]. Once exhausted it stays exhausted.
#[derive(Clone, Debug)]
pub struct Meter {
    budget: SearchBudget,
    started: Instant,
    nodes: u64,
    exhausted: bool,
}

impl Meter {
    /// Count one expansion; returns `false` once the budget is spent.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes
            || (self.nodes.is_multiple_of(64) && self.elapsed() > Duration::from_millis(self.budget.max_millis))
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    pub fn exhausted(&mut self) -> bool {
        if !self.exhausted && self.elapsed() > Duration::from_millis(self.budget.max_millis) {
            self.exhausted = true;
        }
        self.exhausted
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    /// A budget covering what is left of this one.
    pub fn remaining(&self) -> SearchBudget {
        let spent = self.elapsed().as_millis() as u64;
        SearchBudget {
            max_nodes: self.budget.max_nodes.saturating_sub(self.nodes),
            max_millis: self.budget.max_millis.saturating_sub(spent),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_limit_is_sticky() {
        let mut m = SearchBudget::new(3, 10_000).start();
        assert!(m.tick() && m.tick() && m.tick());
        assert!(!m.tick());
        assert!(!m.tick());
        assert!(m.exhausted());
    }
}
