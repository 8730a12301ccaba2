use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::TransformRecord;
use crate::defense::DefenseKind;

/// Observed count of a Bernoulli event against its configured probability.
///
/// `expected` and `variance` sum per-record probabilities, so runs mixing
/// different configurations are still scored correctly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomialCheck {
    pub name: String,
    pub trials: u64,
    pub count: u64,
    /// Mean configured probability over the trials.
    pub p: f64,
    pub frequency: f64,
    pub expected: f64,
    /// `(count - expected) / sqrt(variance)`; absent when the variance is 0.
    pub z: Option<f64>,
}

impl BinomialCheck {
    fn from_trials(name: &str, trials: impl IntoIterator<Item = (f64, bool)>) -> Option<Self> {
        let (mut n, mut count, mut mean, mut var) = (0u64, 0u64, 0.0f64, 0.0f64);
        for (p, hit) in trials {
            n += 1;
            count += hit as u64;
            mean += p;
            var += p * (1.0 - p);
        }
        if n == 0 {
            return None;
        }
        let z = (var > 0.0).then(|| (count as f64 - mean) / var.sqrt());
        Some(Self {
            name: name.to_string(),
            trials: n,
            count,
            p: mean / n as f64,
            frequency: count as f64 / n as f64,
            expected: mean,
            z,
        })
    }

    /// True when the count lies within `sigmas` standard deviations (or
    /// matches exactly when the variance is 0).
    pub fn within(&self, sigmas: f64) -> bool {
        match self.z {
            Some(z) => z.abs() <= sigmas,
            None => (self.count as f64 - self.expected).abs() < 0.5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub total: u64,
    pub processed: u64,
    pub skipped: u64,
    /// One label per record; the counts sum to `total`.
    pub outcomes: BTreeMap<String, u64>,
    /// `count / total` per label.
    pub frequencies: BTreeMap<String, f64>,
    pub checks: Vec<BinomialCheck>,
}

impl RunStats {
    pub fn check(&self, name: &str) -> Option<&BinomialCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Summarizes a run from its records alone.
pub fn compute_stats(records: &[TransformRecord]) -> RunStats {
    let mut stats = RunStats {
        total: records.len() as u64,
        ..Default::default()
    };
    for r in records {
        *stats.outcomes.entry(r.label().to_string()).or_default() += 1;
        if r.is_skipped() {
            stats.skipped += 1;
        }
    }
    stats.processed = stats.total - stats.skipped;
    stats.frequencies = stats
        .outcomes
        .iter()
        .map(|(k, &v)| (k.clone(), v as f64 / stats.total as f64))
        .collect();

    let live = || records.iter().filter(|r| !r.is_skipped());
    let mut checks = vec![
        BinomialCheck::from_trials(
            "ggpr_gate",
            live()
                .filter_map(|r| r.outcome.ggpr)
                .map(|g| (g.p, g.fired)),
        ),
        BinomialCheck::from_trials(
            "lgpr_gate",
            live()
                .filter_map(|r| r.outcome.lgpr)
                .map(|l| (l.gate.p, l.gate.fired)),
        ),
    ];
    for kind in DefenseKind::ALL {
        checks.push(BinomialCheck::from_trials(
            kind.name(),
            live().filter_map(|r| r.outcome.defense.as_ref()).map(|d| {
                (
                    kind.probability(&d.partition()).clamp(0.0, 1.0),
                    d.outcome.kind == kind,
                )
            }),
        ));
    }
    stats.checks = checks.into_iter().flatten().collect();
    stats
}
