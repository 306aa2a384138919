//! Runs every check over a seeded corpus and aggregates the outcome into a
//! report whose serialization depends only on the parameters.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{generate, CorpusParams};
use crate::error::{Error, Result};
use crate::theorems::{check_instance, CheckReport, CheckStatus, InstanceOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Highest Tor degree examined.
    pub bound: usize,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { bound: 8, jobs: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    /// Instances per status.
    pub pass: usize,
    pub fail: usize,
    pub inapplicable: usize,
    /// Summed over instances.
    pub cases: usize,
    pub hits: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceTally {
    pub pairs: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTally {
    pub modules: usize,
    /// Modules with `Ω² ≠ 0`.
    pub nonzero: usize,
    /// Modules where both parts are nonzero.
    pub mixed: usize,
    pub dimension_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub report: CheckReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub params: CorpusParams,
    pub bound: usize,
    pub instances: usize,
    /// SHA-256 (first 64 bits) of the concatenated instance digests.
    pub corpus_digest: String,
    pub checks: BTreeMap<String, CheckTally>,
    pub balance: BalanceTally,
    pub splits: SplitTally,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl ScanReport {
    pub fn tally(&self, name: &str) -> Option<&CheckTally> {
        self.checks.get(name)
    }
}

pub fn run_instances(params: &CorpusParams, opts: &ScanOptions) -> Result<Vec<InstanceOutcome>> {
    params.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..params.count)
            .into_par_iter()
            .map(|i| generate(params, i).map(|inst| check_instance(&inst, opts.bound)))
            .collect()
    })
}

pub fn aggregate(params: &CorpusParams, opts: &ScanOptions, outcomes: &[InstanceOutcome]) -> ScanReport {
    let mut checks: BTreeMap<String, CheckTally> = BTreeMap::new();
    let mut balance = BalanceTally::default();
    let mut splits = SplitTally::default();
    let mut failures = Vec::new();
    let mut h = Sha256::new();
    for o in outcomes {
        h.update(o.digest.as_bytes());
        for r in &o.reports {
            let t = checks.entry(r.name.clone()).or_default();
            match r.status {
                CheckStatus::Pass => t.pass += 1,
                CheckStatus::Fail => t.fail += 1,
                CheckStatus::Inapplicable => t.inapplicable += 1,
            }
            t.cases += r.cases;
            t.hits += r.hits;
            t.failures += r.failures;
            if r.status == CheckStatus::Fail {
                failures.push(Failure {
                    index: o.index,
                    report: r.clone(),
                });
            }
        }
        for b in &o.balance {
            balance.pairs += 1;
            if b.left != b.right {
                balance.mismatches += 1;
            }
        }
        for s in &o.splits {
            splits.modules += 1;
            if s.omega2_dim > 0 {
                splits.nonzero += 1;
            }
            if s.x_dim > 0 && s.z_dim > 0 {
                splits.mixed += 1;
            }
            if s.x_dim + s.z_dim != s.omega2_dim {
                splits.dimension_mismatches += 1;
            }
        }
    }
    let digest = h.finalize();
    let passed = failures.is_empty() && balance.mismatches == 0 && splits.dimension_mismatches == 0;
    ScanReport {
        params: params.clone(),
        bound: opts.bound,
        instances: outcomes.len(),
        corpus_digest: digest[..8].iter().map(|b| format!("{b:02x}")).collect(),
        checks,
        balance,
        splits,
        failures,
        passed,
    }
}

pub fn scan(params: &CorpusParams, opts: &ScanOptions) -> Result<ScanReport> {
    let outcomes = run_instances(params, opts)?;
    Ok(aggregate(params, opts, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_scan_is_clean_and_thread_independent() {
        let params = CorpusParams {
            count: 4,
            seed: 3,
            ..CorpusParams::default()
        };
        let one = scan(&params, &ScanOptions { bound: 6, jobs: 1 }).unwrap();
        let two = scan(&params, &ScanOptions { bound: 6, jobs: 2 }).unwrap();
        assert!(one.passed, "{:?}", one.failures);
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&two).unwrap());
        assert_eq!(one.balance.pairs, 12);
        assert_eq!(one.splits.modules, 12);
    }
}
