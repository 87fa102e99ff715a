//! A tiny circuit language for scripted oracle algorithms.
//!
//! Layout: input register `0..in_bits`, output register right above it,
//! then `work_bits` scratch qubits. `query` applies the XOR oracle to the
//! input/output pair; `xor_target` XORs a run-time target value into the
//! input register (used by planted adversaries that are told the secret).

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::oracle::{apply_xor_oracle, OracleTable};
use super::state::{QubitRange, StateVector};
use super::trace::QueryTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    H { q: usize },
    X { q: usize },
    Z { q: usize },
    Phase { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Cnot { c: usize, t: usize },
    HInput,
    Query,
    XorTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub name: String,
    pub in_bits: usize,
    pub out_bits: usize,
    #[serde(default)]
    pub work_bits: usize,
    pub steps: Vec<Step>,
}

impl Script {
    pub fn num_qubits(&self) -> usize {
        self.in_bits + self.out_bits + self.work_bits
    }

    pub fn input(&self) -> QubitRange {
        QubitRange::new(0, self.in_bits)
    }

    pub fn output(&self) -> QubitRange {
        QubitRange::new(self.in_bits, self.out_bits)
    }

    pub fn queries(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Query)).count()
    }

    /// Runs against the same oracle at every query.
    pub fn run(&self, oracle: &OracleTable, target: u64, trace: &mut QueryTrace) -> Result<StateVector> {
        self.execute(&|_| oracle, target, trace, None)
    }

    /// Runs with `oracle_at(t)` answering query `t`. With `stop_before =
    /// Some(i)` execution halts just before query `i` (0-based) and the
    /// state at that moment is returned.
    pub fn execute<'a>(
        &self,
        oracle_at: &dyn Fn(usize) -> &'a OracleTable,
        target: u64,
        trace: &mut QueryTrace,
        stop_before: Option<usize>,
    ) -> Result<StateVector> {
        let mut s = StateVector::zero(self.num_qubits())?;
        let (inp, out) = (self.input(), self.output());
        let mut t = 0usize;
        for step in &self.steps {
            match *step {
                Step::H { q } => s.h(q)?,
                Step::X { q } => s.x(q)?,
                Step::Z { q } => s.z(q)?,
                Step::Phase { q, theta } => s.phase(q, theta)?,
                Step::Ry { q, theta } => s.ry(q, theta)?,
                Step::Cnot { c, t } => s.cnot(c, t)?,
                Step::HInput => s.h_range(&inp)?,
                Step::XorTarget => s.xor_constant(&inp, target)?,
                Step::Query => {
                    if stop_before == Some(t) {
                        return Ok(s);
                    }
                    apply_xor_oracle(&mut s, oracle_at(t), &inp, &out, trace)?;
                    t += 1;
                }
            }
        }
        if let Some(i) = stop_before {
            return Err(Error::InvalidParameter(format!("script has no query {i}")));
        }
        Ok(s)
    }
}

/// A random circuit: uniform superposition on the input, then `queries`
/// oracle calls each preceded by `1..=max_gates` random gates on any qubit.
pub fn random_script(
    rng: &mut dyn RngCore,
    in_bits: usize,
    out_bits: usize,
    queries: usize,
    max_gates: usize,
) -> Script {
    let n = in_bits + out_bits;
    let mut steps = vec![Step::HInput];
    for _ in 0..queries {
        for _ in 0..rng.gen_range(1..=max_gates.max(1)) {
            let q = rng.gen_range(0..n);
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            steps.push(match rng.gen_range(0..6) {
                0 => Step::H { q },
                1 => Step::X { q },
                2 => Step::Z { q },
                3 => Step::Phase { q, theta },
                4 => Step::Ry { q, theta },
                _ => {
                    let t = (q + rng.gen_range(1..n)) % n;
                    Step::Cnot { c: q, t }
                }
            });
        }
        steps.push(Step::Query);
    }
    Script {
        name: "random".into(),
        in_bits,
        out_bits,
        work_bits: 0,
        steps,
    }
}

fn parse_corpus(src: &str) -> Vec<Script> {
    serde_json::from_str(src).expect("bundled script corpus parses")
}

/// Distinguishers (2 input bits, 2 output bits, at most 3 queries).
pub fn distinguisher_corpus() -> Vec<Script> {
    parse_corpus(include_str!("../../data/distinguishers.json"))
}

/// Planted adversaries that know the target input.
pub fn adversary_corpus() -> Vec<Script> {
    parse_corpus(include_str!("../../data/adversaries.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::euclidean_distance;
    use crate::rng::stream;

    #[test]
    fn corpora_load_and_fit_their_contracts() {
        let d = distinguisher_corpus();
        assert!(d.len() >= 5);
        for s in &d {
            assert_eq!((s.in_bits, s.out_bits), (2, 2), "{}", s.name);
            assert!((1..=3).contains(&s.queries()), "{}", s.name);
        }
        let a = adversary_corpus();
        assert!(a.len() >= 3);
    }

    #[test]
    fn stop_before_returns_prequery_state() {
        let s = random_script(&mut stream(1), 3, 1, 3, 3);
        let o = OracleTable::uniform(3, 1, &mut stream(2)).unwrap();
        let mut tr = QueryTrace::full();
        let mid = s.execute(&|_| &o, 0, &mut tr, Some(1)).unwrap();
        assert_eq!(tr.len(), 1);
        let probs = mid.register_probabilities(&s.input()).unwrap();
        let mut full = QueryTrace::full();
        s.run(&o, 0, &mut full).unwrap();
        for (r, p) in probs.iter().enumerate() {
            assert!((full.q(1, r as u64).unwrap() - p).abs() < 1e-12);
        }
        assert!(s.execute(&|_| &o, 0, &mut QueryTrace::full(), Some(3)).is_err());
    }

    #[test]
    fn xor_target_moves_mass_onto_target() {
        let s = Script {
            name: "t".into(),
            in_bits: 3,
            out_bits: 1,
            work_bits: 0,
            steps: vec![Step::XorTarget, Step::Query],
        };
        let o = OracleTable::uniform(3, 1, &mut stream(0)).unwrap();
        let mut tr = QueryTrace::full();
        let a = s.run(&o, 5, &mut tr).unwrap();
        assert_eq!(tr.q(0, 5), Some(1.0));
        let b = s.run(&o, 5, &mut QueryTrace::full()).unwrap();
        assert_eq!(euclidean_distance(&a, &b).unwrap(), 0.0);
    }
}
