use serde::Serialize;

use super::HistoryFreeReduction;
use crate::error::{Error, Result};
use crate::primitives::ClassicalRO;
use crate::qsim::lemmas::{exact_output_distribution, FLOAT_SLACK};
use crate::qsim::script::Script;
use crate::qsim::{total_variation, Distribution, OracleTable};
use crate::rng::stream;

/// Re-evaluates every logged `(r, O(r))` against a fresh view of `oc` with
/// nothing else queried, returning how many answers differ.
pub fn replay_rand(reduction: &dyn HistoryFreeReduction, oc: &ClassicalRO, log: &[(u64, u64)]) -> Result<usize> {
    let mut bad = 0;
    for &(r, v) in log {
        if reduction.rand(r, &oc.fresh_view())? != v {
            bad += 1;
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguisherCheck {
    pub script: String,
    pub queries: usize,
    pub distance: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub reduction: String,
    pub points: usize,
    /// Exact distance of each O(r) from uniform.
    pub eps_exact: f64,
    /// Histogram of the materialized table against the exact distribution.
    pub table_tv: f64,
    /// Same statistic for a table drawn directly from the exact
    /// distribution, as a yardstick for sampling noise.
    pub reference_tv: f64,
    pub distinguishers: Vec<DistinguisherCheck>,
}

fn histogram(rows: &[u64], range: usize) -> Result<Distribution> {
    let mut h = vec![0.0; range];
    for &v in rows {
        h[v as usize] += 1.0 / rows.len() as f64;
    }
    Distribution::new(h)
}

/// Materializes O(r) = RAND(r, z, O_c) over every r, measures it, and runs
/// each script whose widths match against an oracle with i.i.d. entries
/// from the exact per-point distribution.
pub fn rand_uniformity_audit(
    reduction: &dyn HistoryFreeReduction,
    oc_seed: u64,
    scripts: &[Script],
) -> Result<UniformityReport> {
    let in_bits = reduction.oracle_in_bits();
    let range = reduction.oracle_codomain().size();
    if in_bits > 20 || range > 1 << 20 {
        return Err(Error::InvalidParameter("audit domain too large to enumerate".into()));
    }
    let oc = super::oc_for(oc_seed);
    let rows: Vec<u64> = (0..1u64 << in_bits).map(|r| reduction.rand(r, &oc)).collect::<Result<_>>()?;
    let table = OracleTable::from_rows(in_bits, range as u64, rows)?;
    let point = reduction.point_distribution()?;
    let eps_exact = total_variation(&point, &Distribution::uniform(point.len()))?;
    let table_tv = total_variation(&histogram(table.rows(), point.len())?, &point)?;
    let reference = reference_rows(in_bits, &point, oc_seed)?;
    let reference_tv = total_variation(&histogram(reference.rows(), point.len())?, &point)?;

    let uniform = Distribution::uniform(point.len());
    let mut distinguishers = Vec::new();
    for s in scripts.iter().filter(|s| 1usize << s.out_bits == point.len()) {
        let near = exact_output_distribution(s, &point)?;
        let far = exact_output_distribution(s, &uniform)?;
        let distance = total_variation(&near, &far)?;
        let bound = 4.0 * (s.queries() as f64).powi(2) * eps_exact.sqrt();
        distinguishers.push(DistinguisherCheck {
            script: s.name.clone(),
            queries: s.queries(),
            distance,
            bound,
            pass: distance <= bound + FLOAT_SLACK,
        });
    }
    Ok(UniformityReport {
        reduction: reduction.name().to_string(),
        points: 1 << in_bits,
        eps_exact,
        table_tv,
        reference_tv,
        distinguishers,
    })
}

fn reference_rows(in_bits: u32, point: &Distribution, seed: u64) -> Result<OracleTable> {
    use rand::distributions::{Distribution as _, WeightedIndex};
    let w = WeightedIndex::new(point.probs()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = stream(seed ^ 1);
    let rows = (0..1u64 << in_bits).map(|_| w.sample(&mut rng) as u64).collect();
    OracleTable::from_rows(in_bits, point.len() as u64, rows)
}
