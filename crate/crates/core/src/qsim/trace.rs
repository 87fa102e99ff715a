use std::collections::HashMap;

use serde::Serialize;

use super::state::{QubitRange, StateVector};
use super::NORM_TOL;
use crate::error::Result;

/// Input registers up to this width get a dense per-input record.
pub const FULL_TRACE_MAX_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TraceEntry {
    /// q_r for every r, indexed by r.
    Dense(Vec<f64>),
    /// q_r for the watched inputs only.
    Watched(Vec<(u64, f64)>),
}

/// One entry per oracle application, holding the input register's query
/// probabilities q_r(|φ_t⟩) at the moment of the call.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QueryTrace {
    watched: Vec<u64>,
    entries: Vec<TraceEntry>,
}

impl QueryTrace {
    /// Dense records where the register is narrow enough, nothing else.
    pub fn full() -> Self {
        Self::default()
    }

    /// Dense records where possible, otherwise q_r for `watched` only.
    pub fn watching(watched: Vec<u64>) -> Self {
        Self {
            watched,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub(crate) fn record(&mut self, state: &StateVector, in_reg: &QubitRange) -> Result<()> {
        let entry = if in_reg.len <= FULL_TRACE_MAX_BITS {
            let probs = state.register_probabilities(in_reg)?;
            debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= NORM_TOL * 10.0);
            TraceEntry::Dense(probs)
        } else if self.watched.is_empty() {
            TraceEntry::Watched(Vec::new())
        } else {
            let mut acc: HashMap<u64, f64> = self.watched.iter().map(|&r| (r, 0.0)).collect();
            for (idx, a) in state.amplitudes().iter().enumerate() {
                if let Some(m) = acc.get_mut(&in_reg.extract(idx)) {
                    *m += a.norm_sqr();
                }
            }
            TraceEntry::Watched(self.watched.iter().map(|r| (*r, acc[r])).collect())
        };
        self.entries.push(entry);
        Ok(())
    }

    /// q_r at query `t`, if recorded.
    pub fn q(&self, t: usize, r: u64) -> Option<f64> {
        match self.entries.get(t)? {
            TraceEntry::Dense(p) => p.get(r as usize).copied(),
            TraceEntry::Watched(w) => w.iter().find(|(x, _)| *x == r).map(|(_, q)| *q),
        }
    }

    /// Σ_{r∈set} q_r at query `t`; `None` if some r was not recorded.
    pub fn mass(&self, t: usize, set: &[u64]) -> Option<f64> {
        set.iter().map(|&r| self.q(t, r)).sum()
    }

    /// Total query probability of `set` over all queries.
    pub fn total_mass(&self, set: &[u64]) -> Option<f64> {
        (0..self.len()).map(|t| self.mass(t, set)).sum()
    }

    /// Σ_{(t,r)∈pairs} q_r(|φ_t⟩).
    pub fn pair_mass(&self, pairs: &[(usize, u64)]) -> Option<f64> {
        pairs.iter().map(|&(t, r)| self.q(t, r)).sum()
    }

    /// Σ_r q_r at query `t` (dense entries only).
    pub fn entry_total(&self, t: usize) -> Option<f64> {
        match self.entries.get(t)? {
            TraceEntry::Dense(p) => Some(p.iter().sum()),
            TraceEntry::Watched(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_xor_oracle, OracleTable};
    use crate::rng::stream;

    #[test]
    fn wide_registers_only_record_watched_inputs() {
        let t = OracleTable::uniform(13, 1, &mut stream(0)).unwrap();
        let mut s = StateVector::zero(14).unwrap();
        let (i, o) = (QubitRange::new(0, 13), QubitRange::new(13, 1));
        s.h_range(&i).unwrap();
        let mut tr = QueryTrace::watching(vec![5, 77]);
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        assert_eq!(tr.len(), 2);
        assert!((tr.q(1, 77).unwrap() - 1.0 / 8192.0).abs() < 1e-15);
        assert_eq!(tr.q(0, 6), None);
        assert!((tr.total_mass(&[5, 77]).unwrap() - 4.0 / 8192.0).abs() < 1e-15);
        assert_eq!(tr.entry_total(0), None);
    }

    #[test]
    fn dense_entries_sum_to_one() {
        let t = OracleTable::uniform(3, 2, &mut stream(0)).unwrap();
        let mut s = StateVector::zero(5).unwrap();
        s.ry(0, 0.3).unwrap();
        s.h(2).unwrap();
        let mut tr = QueryTrace::full();
        let (i, o) = (QubitRange::new(0, 3), QubitRange::new(3, 2));
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        assert!((tr.entry_total(0).unwrap() - 1.0).abs() < 1e-12);
        assert!(tr.pair_mass(&[(0, 0), (0, 1)]).is_some());
    }
}
