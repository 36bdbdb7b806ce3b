use serde::{Deserialize, Serialize};

/// Running mean and spread of the adjusted offer values an agent has seen.
///
/// Welford update; `std_dev` is the population form `sqrt(m2 / count)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OfferStatistics {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl OfferStatistics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn std_dev(&self) -> f64 {
        if self.count <= 1 {
            return 0.0;
        }
        (self.m2 / self.count as f64).max(0.0).sqrt()
    }

    /// Lowest value still accepted: `mean - 1.5 * std_dev`.
    pub fn acceptance_floor(&self) -> f64 {
        self.mean - 1.5 * self.std_dev()
    }

    /// True when there is no history, or `value` clears the floor strictly.
    pub fn clears(&self, value: f64) -> bool {
        self.count == 0 || value > self.acceptance_floor()
    }
}

impl FromIterator<f64> for OfferStatistics {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut stats = OfferStatistics::new();
        for v in iter {
            stats.push(v);
        }
        stats
    }
}
