use std::collections::HashMap;
use std::sync::Mutex;

use super::prf::Qprf;
use crate::error::{Error, Result};
use crate::qsim::{Codomain, Oracle, OracleTable, DEFAULT_QUBIT_CAP};
use crate::rng::{derive, stream};

#[derive(Debug, Clone)]
pub enum RoBacking {
    /// Entry for x is drawn from a stream seeded by (seed, x) on first use,
    /// so the function does not depend on query order.
    Lazy { seed: u64 },
    Sealed(OracleTable),
    Keyed(Qprf),
}

/// Classical random oracle with consistent answers and a query log.
#[derive(Debug)]
pub struct ClassicalRO {
    in_bits: u32,
    codomain: Codomain,
    backing: RoBacking,
    filled: Mutex<HashMap<u64, u64>>,
    log: Mutex<Vec<u64>>,
}

impl ClassicalRO {
    pub fn lazy(in_bits: u32, codomain: Codomain, seed: u64) -> Self {
        Self::with_backing(in_bits, codomain, RoBacking::Lazy { seed })
    }

    pub fn sealed(table: OracleTable) -> Self {
        Self::with_backing(table.in_bits(), Codomain::range(table.range()), RoBacking::Sealed(table))
    }

    pub fn keyed(in_bits: u32, prf: Qprf) -> Self {
        Self::with_backing(in_bits, Codomain::bits(prf.out_bits()), RoBacking::Keyed(prf))
    }

    fn with_backing(in_bits: u32, codomain: Codomain, backing: RoBacking) -> Self {
        assert!(in_bits <= 64);
        Self {
            in_bits,
            codomain,
            backing,
            filled: Mutex::new(HashMap::new()),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Same function, empty log.
    pub fn fresh_view(&self) -> Self {
        Self::with_backing(self.in_bits, self.codomain, self.backing.clone())
    }

    pub fn backing(&self) -> &RoBacking {
        &self.backing
    }

    fn value(&self, x: u64) -> u64 {
        match &self.backing {
            RoBacking::Lazy { seed } => {
                let mut filled = self.filled.lock().expect("ro lock");
                *filled
                    .entry(x)
                    .or_insert_with(|| self.codomain.sample(&mut stream(derive(*seed, x))))
            }
            RoBacking::Sealed(t) => t.get(x),
            RoBacking::Keyed(k) => k.eval(x),
        }
    }

    pub fn query_log(&self) -> Vec<u64> {
        self.log.lock().expect("ro lock").clone()
    }

    pub fn query_count(&self) -> usize {
        self.log.lock().expect("ro lock").len()
    }

    /// Materializes every entry so the function can be queried in
    /// superposition.
    pub fn as_table(&self) -> Result<OracleTable> {
        if self.in_bits as usize > DEFAULT_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "random oracle table",
                requested: self.in_bits as usize,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        if let RoBacking::Sealed(t) = &self.backing {
            return Ok(t.clone());
        }
        let range = u64::try_from(self.codomain.size())
            .map_err(|_| Error::InvalidParameter("codomain too wide for a table".into()))?;
        OracleTable::from_fn(self.in_bits, range, |x| self.value(x))
    }
}

impl Oracle for ClassicalRO {
    fn in_bits(&self) -> u32 {
        self.in_bits
    }

    fn codomain(&self) -> Codomain {
        self.codomain
    }

    fn query(&self, x: u64) -> Result<u64> {
        self.check_input(x)?;
        self.log.lock().expect("ro lock").push(x);
        Ok(self.value(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn repeated_queries_agree() {
        let ro = ClassicalRO::lazy(16, Codomain::bits(8), 5);
        let a = ro.query(1234).unwrap();
        assert_eq!(ro.query(1234).unwrap(), a);
        assert_eq!(ro.query_log(), vec![1234, 1234]);
        assert!(ro.query(1 << 16).is_err());
    }

    #[test]
    fn order_does_not_matter_and_tables_agree() {
        let a = ClassicalRO::lazy(8, Codomain::range(1000), 9);
        let b = ClassicalRO::lazy(8, Codomain::range(1000), 9);
        let xs: Vec<u64> = (0..256).collect();
        let va: Vec<u64> = xs.iter().map(|&x| a.query(x).unwrap()).collect();
        let vb: Vec<u64> = xs.iter().rev().map(|&x| b.query(x).unwrap()).collect();
        assert_eq!(va, vb.into_iter().rev().collect::<Vec<_>>());
        let t = b.as_table().unwrap();
        assert!(xs.iter().all(|&x| t.get(x) == va[x as usize]));
        let c = ClassicalRO::lazy(8, Codomain::range(1000), 9);
        let t2 = c.as_table().unwrap();
        assert_eq!(t, t2);
        assert_eq!(c.query(17).unwrap(), t.get(17));
    }

    #[test]
    fn fresh_inputs_collide_at_the_uniform_rate() {
        let mut rng = stream(4);
        let trials = 20_000;
        let mut coll = 0;
        for i in 0..trials {
            let ro = ClassicalRO::lazy(32, Codomain::bits(4), i);
            let x: u64 = rng.gen_range(0..1 << 32);
            let y = (x + 1 + rng.gen_range(0..1000)) % (1 << 32);
            coll += (ro.query(x).unwrap() == ro.query(y).unwrap()) as usize;
        }
        let p = 1.0 / 16.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((coll as f64 / trials as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn sealed_and_keyed_backings() {
        let t = OracleTable::uniform(6, 3, &mut stream(1)).unwrap();
        let ro = ClassicalRO::sealed(t.clone());
        assert!((0..64).all(|x| ro.query(x).unwrap() == t.get(x)));
        let prf = Qprf::new(42, 64, 10);
        let k = ClassicalRO::keyed(12, prf);
        assert_eq!(k.query(99).unwrap(), prf.eval(99));
        assert_eq!(k.as_table().unwrap().get(99), prf.eval(99));
        assert!(ClassicalRO::lazy(30, Codomain::bits(4), 0).as_table().is_err());
        assert!(ClassicalRO::lazy(8, Codomain::bits(64), 0).as_table().is_err());
    }
}
