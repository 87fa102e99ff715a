use std::sync::Arc;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::dist::Distribution;
use super::state::{QubitRange, StateVector, DEFAULT_QUBIT_CAP};
use super::trace::QueryTrace;
use crate::error::{Error, Result};

/// Output space of an oracle: the integers `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codomain(u128);

impl Codomain {
    pub fn bits(n: u32) -> Self {
        assert!(n <= 64, "codomain wider than 64 bits");
        Self(1u128 << n)
    }

    pub fn range(size: u64) -> Self {
        assert!(size > 0, "empty codomain");
        Self(size as u128)
    }

    pub fn size(&self) -> u128 {
        self.0
    }

    /// Bits needed to hold any element.
    pub fn out_bits(&self) -> u32 {
        128 - (self.0 - 1).leading_zeros()
    }

    pub fn contains(&self, v: u64) -> bool {
        (v as u128) < self.0
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        if self.0 == 1u128 << 64 {
            rng.next_u64()
        } else {
            rng.gen_range(0..self.0 as u64)
        }
    }
}

/// Classical query access to a function `{0,1}^in_bits → codomain`.
pub trait Oracle: Send + Sync {
    fn in_bits(&self) -> u32;
    fn codomain(&self) -> Codomain;
    fn query(&self, x: u64) -> Result<u64>;

    fn check_input(&self, x: u64) -> Result<()> {
        let bits = self.in_bits();
        if bits < 64 && x >> bits != 0 {
            return Err(Error::DomainOverflow {
                input: x,
                size: 1u128 << bits,
            });
        }
        Ok(())
    }
}

/// A sealed, total function table. Cloning shares the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    in_bits: u32,
    range: u64,
    rows: Arc<[u64]>,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    in_bits: u32,
    out_bits: u32,
    range: u64,
    rows: Vec<u64>,
}

impl OracleTable {
    pub fn from_rows(in_bits: u32, range: u64, rows: Vec<u64>) -> Result<Self> {
        if in_bits as usize > DEFAULT_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "oracle table",
                requested: in_bits as usize,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        if range == 0 {
            return Err(Error::InvalidParameter("empty range".into()));
        }
        if rows.len() != 1usize << in_bits {
            return Err(Error::WidthMismatch {
                expected: 1u64 << in_bits,
                got: rows.len() as u64,
            });
        }
        if let Some(&bad) = rows.iter().find(|&&v| v >= range) {
            return Err(Error::DomainOverflow {
                input: bad,
                size: range as u128,
            });
        }
        Ok(Self {
            in_bits,
            range,
            rows: rows.into(),
        })
    }

    pub fn from_fn(in_bits: u32, range: u64, f: impl Fn(u64) -> u64) -> Result<Self> {
        if in_bits as usize > DEFAULT_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "oracle table",
                requested: in_bits as usize,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        Self::from_rows(in_bits, range, (0..1u64 << in_bits).map(f).collect())
    }

    pub fn uniform(in_bits: u32, out_bits: u32, rng: &mut dyn RngCore) -> Result<Self> {
        Self::uniform_range(in_bits, 1u64 << out_bits, rng)
    }

    pub fn uniform_range(in_bits: u32, range: u64, rng: &mut dyn RngCore) -> Result<Self> {
        if in_bits as usize > DEFAULT_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "oracle table",
                requested: in_bits as usize,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        let rows = (0..1u64 << in_bits).map(|_| rng.gen_range(0..range)).collect();
        Self::from_rows(in_bits, range, rows)
    }

    pub fn in_bits(&self) -> u32 {
        self.in_bits
    }

    pub fn out_bits(&self) -> u32 {
        Codomain::range(self.range).out_bits()
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, x: u64) -> u64 {
        self.rows[x as usize]
    }

    /// Inputs mapped to a nonzero value (for 1-bit indicator tables).
    pub fn support(&self) -> Vec<u64> {
        (0..self.rows.len() as u64).filter(|&x| self.rows[x as usize] != 0).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableRecord {
            in_bits: self.in_bits,
            out_bits: self.out_bits(),
            range: self.range,
            rows: self.rows.to_vec(),
        })
        .expect("table record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: TableRecord =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let t = Self::from_rows(rec.in_bits, rec.range, rec.rows)?;
        if t.out_bits() != rec.out_bits {
            return Err(Error::WidthMismatch {
                expected: t.out_bits() as u64,
                got: rec.out_bits as u64,
            });
        }
        Ok(t)
    }

    /// Little-endian: in_bits u32, out_bits u32, range u64, then one u64 per
    /// row in input order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.rows.len());
        out.extend_from_slice(&self.in_bits.to_le_bytes());
        out.extend_from_slice(&self.out_bits().to_le_bytes());
        out.extend_from_slice(&self.range.to_le_bytes());
        for v in self.rows.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let bad = || Error::InvalidParameter("truncated table bytes".into());
        if b.len() < 16 || !(b.len() - 16).is_multiple_of(8) {
            return Err(bad());
        }
        let in_bits = u32::from_le_bytes(b[0..4].try_into().map_err(|_| bad())?);
        let range = u64::from_le_bytes(b[8..16].try_into().map_err(|_| bad())?);
        let rows = b[16..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::from_rows(in_bits, range, rows)
    }
}

impl Oracle for OracleTable {
    fn in_bits(&self) -> u32 {
        self.in_bits
    }

    fn codomain(&self) -> Codomain {
        Codomain::range(self.range)
    }

    fn query(&self, x: u64) -> Result<u64> {
        self.check_input(x)?;
        Ok(self.get(x))
    }
}

/// Oracle view over a closure; used for simulated oracles in reductions.
pub struct FnOracle<F> {
    in_bits: u32,
    codomain: Codomain,
    f: F,
}

impl<F: Fn(u64) -> Result<u64> + Send + Sync> FnOracle<F> {
    pub fn new(in_bits: u32, codomain: Codomain, f: F) -> Self {
        Self { in_bits, codomain, f }
    }
}

impl<F: Fn(u64) -> Result<u64> + Send + Sync> Oracle for FnOracle<F> {
    fn in_bits(&self) -> u32 {
        self.in_bits
    }

    fn codomain(&self) -> Codomain {
        self.codomain
    }

    fn query(&self, x: u64) -> Result<u64> {
        self.check_input(x)?;
        (self.f)(x)
    }
}

/// |x, y, w⟩ ↦ |x, y ⊕ O(x), w⟩, appending the pre-query input-register
/// distribution to `trace`.
pub fn apply_xor_oracle(
    state: &mut StateVector,
    oracle: &OracleTable,
    in_reg: &QubitRange,
    out_reg: &QubitRange,
    trace: &mut QueryTrace,
) -> Result<()> {
    state.check_range(in_reg)?;
    state.check_range(out_reg)?;
    if in_reg.overlaps(out_reg) {
        return Err(Error::RegisterOverlap);
    }
    if in_reg.len != oracle.in_bits() as usize {
        return Err(Error::WidthMismatch {
            expected: oracle.in_bits() as u64,
            got: in_reg.len as u64,
        });
    }
    if out_reg.len != oracle.out_bits() as usize {
        return Err(Error::WidthMismatch {
            expected: oracle.out_bits() as u64,
            got: out_reg.len as u64,
        });
    }
    trace.record(state, in_reg)?;
    let rows = oracle.rows();
    let amps = state.amplitudes_mut();
    for idx in 0..amps.len() {
        let v = rows[in_reg.extract(idx) as usize];
        if v == 0 {
            continue;
        }
        let j = idx ^ ((v as usize) << out_reg.start);
        if j > idx {
            amps.swap(idx, j);
        }
    }
    Ok(())
}

/// Copy of `oracle` with fresh uniform outputs on `s`.
pub fn resample_oracle_at(oracle: &OracleTable, s: &[u64], rng: &mut dyn RngCore) -> Result<OracleTable> {
    let mut rows = oracle.rows().to_vec();
    for &x in s {
        if x as usize >= rows.len() {
            return Err(Error::DomainOverflow {
                input: x,
                size: rows.len() as u128,
            });
        }
        rows[x as usize] = rng.gen_range(0..oracle.range());
    }
    OracleTable::from_rows(oracle.in_bits(), oracle.range(), rows)
}

/// Table whose entries are i.i.d. draws from `d`.
pub fn sample_near_uniform_oracle(
    in_bits: u32,
    out_bits: u32,
    d: &Distribution,
    rng: &mut dyn RngCore,
) -> Result<OracleTable> {
    if d.len() as u64 != 1u64 << out_bits {
        return Err(Error::WidthMismatch {
            expected: 1u64 << out_bits,
            got: d.len() as u64,
        });
    }
    let w = WeightedIndex::new(d.probs().iter().map(|p| p.max(0.0)))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    if in_bits as usize > DEFAULT_QUBIT_CAP {
        return Err(Error::TooManyQubits {
            what: "oracle table",
            requested: in_bits as usize,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let rows = (0..1u64 << in_bits).map(|_| w.sample(rng) as u64).collect();
    OracleTable::from_rows(in_bits, 1u64 << out_bits, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::euclidean_distance;
    use crate::rng::stream;

    fn regs() -> (QubitRange, QubitRange) {
        (QubitRange::new(0, 2), QubitRange::new(2, 2))
    }

    #[test]
    fn xor_into_zero_register_writes_value() {
        let t = OracleTable::from_rows(2, 4, vec![3, 1, 2, 0]).unwrap();
        let (i, o) = regs();
        let mut s = StateVector::basis(4, 0b0001).unwrap();
        let mut tr = QueryTrace::full();
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        assert_eq!(s, StateVector::basis(4, 0b0101).unwrap());
    }

    #[test]
    fn uniform_input_gives_quarter_query_probabilities() {
        let t = OracleTable::uniform(2, 2, &mut stream(1)).unwrap();
        let (i, o) = regs();
        let mut s = StateVector::zero(4).unwrap();
        s.h_range(&i).unwrap();
        let mut tr = QueryTrace::full();
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        for r in 0..4 {
            assert!((tr.q(0, r).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_on_bad_registers() {
        let t = OracleTable::uniform(2, 2, &mut stream(1)).unwrap();
        let mut s = StateVector::zero(4).unwrap();
        let mut tr = QueryTrace::full();
        let r = |a, b| QubitRange::new(a, b);
        assert_eq!(
            apply_xor_oracle(&mut s, &t, &r(0, 2), &r(1, 2), &mut tr),
            Err(Error::RegisterOverlap)
        );
        assert!(matches!(
            apply_xor_oracle(&mut s, &t, &r(0, 3), &r(3, 1), &mut tr),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(matches!(
            apply_xor_oracle(&mut s, &t, &r(0, 2), &r(3, 2), &mut tr),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert_eq!(tr.len(), 0);
    }

    #[test]
    fn resample_edge_cases() {
        let mut rng = stream(9);
        let t = OracleTable::uniform(8, 4, &mut rng).unwrap();
        assert_eq!(resample_oracle_at(&t, &[], &mut rng).unwrap(), t);
        let all: Vec<u64> = (0..256).collect();
        let mut agree = 0usize;
        let reps = 200;
        for _ in 0..reps {
            let fresh = resample_oracle_at(&t, &all, &mut rng).unwrap();
            agree += t.rows().iter().zip(fresh.rows()).filter(|(a, b)| a == b).count();
        }
        let frac = agree as f64 / (256 * reps) as f64;
        let sigma = (1.0 / 16.0 * 15.0 / 16.0 / (256.0 * reps as f64)).sqrt();
        assert!((frac - 1.0 / 16.0).abs() < 4.0 * sigma);
        assert!(resample_oracle_at(&t, &[256], &mut rng).is_err());
    }

    #[test]
    fn near_uniform_sampler_edge_cases() {
        let mut rng = stream(10);
        let point = Distribution::point(4, 2);
        let t = sample_near_uniform_oracle(5, 2, &point, &mut rng).unwrap();
        assert!(t.rows().iter().all(|&v| v == 2));
        assert!(sample_near_uniform_oracle(5, 3, &point, &mut rng).is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let t = OracleTable::uniform_range(3, 21, &mut stream(5)).unwrap();
        assert_eq!(OracleTable::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(OracleTable::from_bytes(&t.to_bytes()).unwrap(), t);
        assert!(t.to_json().starts_with("{\"in_bits\":3,\"out_bits\":5,\"range\":21,\"rows\":["));
    }

    #[test]
    fn non_power_of_two_ranges_query_in_superposition() {
        let t = OracleTable::from_rows(1, 3, vec![2, 1]).unwrap();
        assert_eq!(t.out_bits(), 2);
        let mut s = StateVector::zero(3).unwrap();
        s.h(0).unwrap();
        let before = s.clone();
        let mut tr = QueryTrace::full();
        let (i, o) = (QubitRange::new(0, 1), QubitRange::new(1, 2));
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        apply_xor_oracle(&mut s, &t, &i, &o, &mut tr).unwrap();
        assert!(euclidean_distance(&s, &before).unwrap() < 1e-15);
    }
}
