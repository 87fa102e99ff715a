use rayon::prelude::*;
use serde::Serialize;

use super::{run_isstar, HashBackend, ISStarConfig, ISStarTranscript, Prover, StubIdentification, Verdict};
use crate::error::{Error, Result};
use crate::rng::{derive, derive_tag, stream};
use crate::stats::binomial_sigma;

/// Per-round classical success bound q(q−1)/(2·2^ℓ).
pub fn birthday_bound(q: u64, ell: u32) -> f64 {
    q as f64 * q.saturating_sub(1) as f64 / (2.0 * (ell as f64).exp2())
}

/// Chernoff bound on a classical pass: exp(−r·∛(2^ℓ)/(32α²)).
pub fn chernoff_classical(cfg: &ISStarConfig) -> f64 {
    (-(cfg.rounds as f64) * (cfg.ell as f64).exp2().cbrt() / (32.0 * cfg.alpha * cfg.alpha)).exp()
}

/// Quantum pass rate lower bound 1 − 0.94^r.
pub fn quantum_bound_094(rounds: usize) -> f64 {
    1.0 - 0.94f64.powi(rounds as i32)
}

/// Quantum pass rate lower bound 1 − exp(−r/16).
pub fn quantum_bound_r16(rounds: usize) -> f64 {
    1.0 - (-(rounds as f64) / 16.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: String,
    /// "upper" (measured ≤ bound + 3σ) or "lower" (measured ≥ bound − 3σ).
    pub direction: String,
    pub bound: f64,
    pub measured: f64,
    pub sigma: f64,
    pub samples: usize,
    pub margin: f64,
    pub pass: bool,
    pub asserted: bool,
}

impl BoundRow {
    fn new(name: &str, upper: bool, bound: f64, measured: f64, samples: usize, asserted: bool) -> Self {
        let sigma = binomial_sigma(measured, samples);
        let margin = if upper { bound + 3.0 * sigma - measured } else { measured - (bound - 3.0 * sigma) };
        Self {
            name: name.to_string(),
            direction: if upper { "upper" } else { "lower" }.to_string(),
            bound,
            measured,
            sigma,
            samples,
            margin,
            pass: margin >= -1e-12,
            asserted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub prover: Prover,
    pub runs: usize,
    pub passes: usize,
    pub pass_rate: f64,
    pub rounds_total: usize,
    pub rounds_won: usize,
    pub budget_exceeded: usize,
    pub mean_coll_count: f64,
    /// Mean of the per-round exact success probabilities (quantum only).
    pub mean_exact_round_success: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub config: ISStarConfig,
    pub classical_budget: u64,
    pub quantum_budget: u64,
    pub classical: RunSummary,
    pub quantum: Option<RunSummary>,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_asserted_pass(&self) -> bool {
        self.rows.iter().filter(|r| r.asserted).all(|r| r.pass)
    }
}

/// `runs` seeded protocol runs for one prover; run i uses
/// `derive(derive_tag(seed, <prover>), i)`.
pub fn simulate(
    cfg: &ISStarConfig,
    prover: Prover,
    backend: HashBackend,
    runs: usize,
    seed: u64,
) -> Result<Vec<ISStarTranscript>> {
    let base = derive_tag(seed, &format!("{prover:?}"));
    (0..runs as u64)
        .into_par_iter()
        .map(|i| run_isstar(cfg, prover, &StubIdentification, backend, &mut stream(derive(base, i))))
        .collect()
}

fn summarize(prover: Prover, ts: &[ISStarTranscript]) -> RunSummary {
    let passes = ts.iter().filter(|t| t.accept).count();
    let rounds: Vec<_> = ts.iter().flat_map(|t| &t.rounds).collect();
    let verdicts = |v: Verdict| rounds.iter().filter(|r| r.verdict == v).count();
    let exact: Vec<f64> = rounds.iter().filter_map(|r| r.exact_success).collect();
    RunSummary {
        prover,
        runs: ts.len(),
        passes,
        pass_rate: passes as f64 / ts.len().max(1) as f64,
        rounds_total: rounds.len(),
        rounds_won: verdicts(Verdict::CollisionValid),
        budget_exceeded: verdicts(Verdict::BudgetExceeded),
        mean_coll_count: ts.iter().map(|t| t.coll_count as f64).sum::<f64>() / ts.len().max(1) as f64,
        mean_exact_round_success: (!exact.is_empty()).then(|| exact.iter().sum::<f64>() / exact.len() as f64),
    }
}

/// Runs both attackers `trials` times and sets measured rates against the
/// closed-form bounds. The quantum side is skipped when ℓ is beyond the
/// simulator.
pub fn bound_report(cfg: &ISStarConfig, trials: usize, seed: u64) -> Result<BoundReport> {
    bound_report_with(cfg, trials, seed, HashBackend::Keyed).map(|(r, _, _)| r)
}

/// As [`bound_report`], also returning the transcripts (classical, quantum).
pub fn bound_report_with(
    cfg: &ISStarConfig,
    trials: usize,
    seed: u64,
    backend: HashBackend,
) -> Result<(BoundReport, Vec<ISStarTranscript>, Vec<ISStarTranscript>)> {
    let cfg = cfg.validated()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial".into()));
    }
    let ct = simulate(&cfg, Prover::ClassicalBirthday, backend, trials, seed)?;
    let classical = summarize(Prover::ClassicalBirthday, &ct);
    let mut rows = vec![
        BoundRow::new(
            "classical-pass-rate-vs-chernoff",
            true,
            chernoff_classical(&cfg),
            classical.pass_rate,
            trials,
            !cfg.unsafe_params,
        ),
        BoundRow::new(
            "classical-round-success-vs-birthday",
            true,
            birthday_bound(cfg.classical_budget(), cfg.ell),
            classical.rounds_won as f64 / classical.rounds_total as f64,
            classical.rounds_total,
            true,
        ),
    ];
    let (quantum, qt) = if cfg.ell <= super::MAX_QUANTUM_ELL && cfg.hash_in_bits <= super::MAX_QUANTUM_ELL + 2 {
        let qt = simulate(&cfg, Prover::QuantumBht, backend, trials, seed)?;
        let q = summarize(Prover::QuantumBht, &qt);
        let round_rate = q.rounds_won as f64 / q.rounds_total as f64;
        rows.push(BoundRow::new("quantum-pass-rate-vs-1-0.94^r", false, quantum_bound_094(cfg.rounds), q.pass_rate, trials, true));
        rows.push(BoundRow::new(
            "quantum-pass-rate-vs-1-exp(-r/16)",
            false,
            quantum_bound_r16(cfg.rounds),
            q.pass_rate,
            trials,
            true,
        ));
        let exact = q.mean_exact_round_success.unwrap_or(0.0);
        let sigma = binomial_sigma(exact, q.rounds_total);
        rows.push(BoundRow {
            name: "quantum-round-success-vs-exact".into(),
            direction: "two-sided".into(),
            bound: exact,
            measured: round_rate,
            sigma,
            samples: q.rounds_total,
            margin: 4.0 * sigma - (round_rate - exact).abs(),
            pass: (round_rate - exact).abs() <= 4.0 * sigma + 1e-12,
            asserted: true,
        });
        rows.push(BoundRow::new("quantum-round-success-vs-1/2", false, 0.5, round_rate, q.rounds_total, false));
        (Some(q), qt)
    } else {
        (None, Vec::new())
    };
    Ok((
        BoundReport {
            config: cfg,
            classical_budget: cfg.classical_budget(),
            quantum_budget: cfg.quantum_budget(),
            classical,
            quantum,
            rows,
        },
        ct,
        qt,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(birthday_bound(2, 1), 0.5);
        assert!((birthday_bound(32, 12) - 992.0 / 8192.0).abs() < 1e-15);
        assert!((quantum_bound_094(64) - (1.0 - 0.94f64.powi(64))).abs() < 1e-15);
        let cfg = ISStarConfig::new(12, 64, 2.0).unwrap();
        assert!((chernoff_classical(&cfg) - (-8.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn small_report_is_consistent() {
        let cfg = ISStarConfig::new(8, 16, 1.0).unwrap();
        let r = bound_report(&cfg, 20, 4).unwrap();
        assert_eq!(r.classical.runs, 20);
        assert_eq!(r.classical.budget_exceeded, 0);
        assert!(r.quantum.is_some());
    }
}
