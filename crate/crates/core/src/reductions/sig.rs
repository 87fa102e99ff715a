use super::{HistoryFreeReduction, Solution};
use crate::error::{Error, Result};
use crate::primitives::{coins_from, ClassicalRO, ClawFree, Psf};
use crate::qsim::{Codomain, Distribution, Oracle};

/// Input tag for rejection re-queries: O_c((1<<63) | (r<<8) | ctr).
pub const OC_RETRY: u64 = 1 << 63;
const MAX_MSG_BITS: u32 = 55;

/// The reductions' classical oracle: 64-bit inputs, 64-bit outputs.
pub fn oc_for(seed: u64) -> ClassicalRO {
    ClassicalRO::lazy(64, Codomain::bits(64), seed)
}

/// Carves (a, b) out of O_c(r). `a` comes from the high 32 bits masked to
/// the domain's bit length, re-querying on `r‖ctr` until it lands in the
/// domain; `b` is the low 32 bits mod p with 0 read as p.
pub fn decode_pair(oc: &ClassicalRO, r: u64, domain: u64, p: u64) -> Result<(u64, u64)> {
    if domain == 0 || domain > 1 << 32 || p == 0 {
        return Err(Error::InvalidParameter(format!("cannot decode domain {domain}, p {p}")));
    }
    let mask = domain.next_power_of_two() - 1;
    let v = oc.query(r)?;
    let b = match (v & 0xffff_ffff) % p {
        0 => p,
        b => b,
    };
    let mut a = (v >> 32) & mask;
    let mut ctr = 0u64;
    while a >= domain {
        ctr += 1;
        if ctr > 0xff {
            return Err(Error::InvalidParameter("rejection sampling ran out of counters".into()));
        }
        a = (oc.query(OC_RETRY | (r << 8) | ctr)? >> 32) & mask;
    }
    Ok((a, b))
}

fn check_msg_bits(bits: u32) -> Result<()> {
    if bits > MAX_MSG_BITS {
        return Err(Error::InvalidParameter(format!("messages wider than {MAX_MSG_BITS} bits")));
    }
    Ok(())
}

/// RAND(r) = f(Sample(O_c(r))), SIGN(m) = Sample(O_c(m)),
/// FINISH(m, σ) = (Sample(O_c(m)), σ).
#[derive(Debug, Clone)]
pub struct FdhPsfReduction<P> {
    pub psf: P,
    pub msg_bits: u32,
}

impl<P: Psf + Clone> FdhPsfReduction<P> {
    pub fn instance(pk: &P) -> P {
        pk.clone()
    }

    pub fn start(x: P, msg_bits: u32) -> Result<(P, Self)> {
        check_msg_bits(msg_bits)?;
        Ok((x.clone(), Self { psf: x, msg_bits }))
    }

    fn sample_for(&self, m: u64, oc: &ClassicalRO) -> Result<u64> {
        Ok(self.psf.sample(&mut coins_from(oc.query(m)?)))
    }
}

impl<P: Psf + Clone> HistoryFreeReduction for FdhPsfReduction<P> {
    fn name(&self) -> &'static str {
        "fdh-psf"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_in_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.psf.range_size())
    }

    fn rand(&self, r: u64, oc: &ClassicalRO) -> Result<u64> {
        self.psf.eval(self.sample_for(r, oc)?)
    }

    fn sign(&self, m: u64, oc: &ClassicalRO) -> Result<Option<u64>> {
        self.sample_for(m, oc).map(Some)
    }

    fn finish(&self, m: u64, sigma: u64, oc: &ClassicalRO) -> Result<Option<Solution>> {
        Ok(Some(Solution::Collision {
            x1: self.sample_for(m, oc)?,
            x2: sigma,
        }))
    }

    fn verify_signature(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        Ok(sigma < self.psf.domain_size() && self.psf.eval(sigma)? == oracle.query(m)?)
    }

    fn verify_solution(&self, s: &Solution) -> bool {
        match *s {
            Solution::Collision { x1, x2 } => self.psf.is_collision(x1, x2),
            Solution::Claw { .. } => false,
        }
    }

    fn point_distribution(&self) -> Result<Distribution> {
        let mut img = vec![0.0; self.psf.range_size() as usize];
        for (x, w) in self.psf.sample_weights().into_iter().enumerate() {
            img[self.psf.eval(x as u64)? as usize] += w;
        }
        Distribution::new(img)
    }
}

fn pair_image_distribution<C: ClawFree>(pair: &C, w_f2: f64) -> Result<Distribution> {
    let n = pair.domain_size();
    let mut img = vec![0.0; n as usize];
    for a in 0..n {
        img[pair.f1(a)? as usize] += (1.0 - w_f2) / n as f64;
        img[pair.f2(a)? as usize] += w_f2 / n as f64;
    }
    Distribution::new(img)
}

/// Coron-style reduction: RAND(r) = f2(a) if b = 1 else f1(a), where
/// (a, b) = O_c(r) with b ∈ {1..p}; SIGN aborts when b = 1.
#[derive(Debug, Clone)]
pub struct ClawFreeFdhReduction<C> {
    pub pair: C,
    pub p: u64,
    pub msg_bits: u32,
}

impl<C: ClawFree + Clone> ClawFreeFdhReduction<C> {
    pub fn instance(pk: &C) -> C {
        pk.clone()
    }

    pub fn start(x: C, p: u64, msg_bits: u32) -> Result<(C, Self)> {
        check_msg_bits(msg_bits)?;
        if p < 2 {
            return Err(Error::InvalidParameter("p must be at least 2".into()));
        }
        Ok((x.clone(), Self { pair: x, p, msg_bits }))
    }

    /// p = max(2, q_SIGN).
    pub fn default_p(q_sign: usize) -> u64 {
        (q_sign as u64).max(2)
    }

    /// Exact probability that the low half of O_c decodes to b = 1.
    pub fn b_one_probability(&self) -> f64 {
        let full = (1u64 << 32) / self.p;
        let extra = ((1u64 << 32) % self.p > 1) as u64;
        (full + extra) as f64 / (1u64 << 32) as f64
    }
}

impl<C: ClawFree + Clone> HistoryFreeReduction for ClawFreeFdhReduction<C> {
    fn name(&self) -> &'static str {
        "clawfree-fdh"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_in_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.pair.domain_size())
    }

    fn rand(&self, r: u64, oc: &ClassicalRO) -> Result<u64> {
        let (a, b) = decode_pair(oc, r, self.pair.domain_size(), self.p)?;
        if b == 1 {
            self.pair.f2(a)
        } else {
            self.pair.f1(a)
        }
    }

    fn sign(&self, m: u64, oc: &ClassicalRO) -> Result<Option<u64>> {
        let (a, b) = decode_pair(oc, m, self.pair.domain_size(), self.p)?;
        Ok((b != 1).then_some(a))
    }

    fn finish(&self, m: u64, sigma: u64, oc: &ClassicalRO) -> Result<Option<Solution>> {
        let (a, _) = decode_pair(oc, m, self.pair.domain_size(), self.p)?;
        Ok(Some(Solution::Claw { x1: sigma, x2: a }))
    }

    fn verify_signature(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        Ok(sigma < self.pair.domain_size() && self.pair.f1(sigma)? == oracle.query(m)?)
    }

    fn verify_solution(&self, s: &Solution) -> bool {
        match *s {
            Solution::Claw { x1, x2 } => self.pair.is_claw(x1, x2),
            Solution::Collision { .. } => false,
        }
    }

    fn point_distribution(&self) -> Result<Distribution> {
        pair_image_distribution(&self.pair, self.b_one_probability())
    }
}

/// Katz-Wang reduction: with (a, b′) = O_c(m), RAND(b‖m) = f1(a) if b = b′
/// else f2(a); SIGN(m) = a; FINISH aborts when σ = a.
#[derive(Debug, Clone)]
pub struct KatzWangReduction<C> {
    pub pair: C,
    pub msg_bits: u32,
}

impl<C: ClawFree + Clone> KatzWangReduction<C> {
    pub fn instance(pk: &C) -> C {
        pk.clone()
    }

    pub fn start(x: C, msg_bits: u32) -> Result<(C, Self)> {
        check_msg_bits(msg_bits)?;
        Ok((x.clone(), Self { pair: x, msg_bits }))
    }

    fn decode(&self, m: u64, oc: &ClassicalRO) -> Result<(u64, u64)> {
        let (a, b) = decode_pair(oc, m, self.pair.domain_size(), 2)?;
        Ok((a, b - 1))
    }
}

impl<C: ClawFree + Clone> HistoryFreeReduction for KatzWangReduction<C> {
    fn name(&self) -> &'static str {
        "katz-wang"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_in_bits(&self) -> u32 {
        self.msg_bits + 1
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.pair.domain_size())
    }

    fn rand(&self, r: u64, oc: &ClassicalRO) -> Result<u64> {
        let (b, m) = (r >> self.msg_bits, r & ((1 << self.msg_bits) - 1));
        let (a, b2) = self.decode(m, oc)?;
        if b == b2 {
            self.pair.f1(a)
        } else {
            self.pair.f2(a)
        }
    }

    fn sign(&self, m: u64, oc: &ClassicalRO) -> Result<Option<u64>> {
        Ok(Some(self.decode(m, oc)?.0))
    }

    fn finish(&self, m: u64, sigma: u64, oc: &ClassicalRO) -> Result<Option<Solution>> {
        let (a, _) = self.decode(m, oc)?;
        Ok((sigma != a).then_some(Solution::Claw { x1: sigma, x2: a }))
    }

    fn verify_signature(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        if sigma >= self.pair.domain_size() {
            return Ok(false);
        }
        let img = self.pair.f1(sigma)?;
        Ok(img == oracle.query(m)? || img == oracle.query((1 << self.msg_bits) | m)?)
    }

    fn verify_solution(&self, s: &Solution) -> bool {
        match *s {
            Solution::Claw { x1, x2 } => self.pair.is_claw(x1, x2),
            Solution::Collision { .. } => false,
        }
    }

    fn point_distribution(&self) -> Result<Distribution> {
        pair_image_distribution(&self.pair, 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{psf_from_clawfree, table_psf_gen, GmrPair, TableClawFree};
    use crate::qsim::total_variation;
    use crate::reductions::RandOracle;
    use crate::rng::stream;

    #[test]
    fn decode_pair_is_in_range_and_b_is_near_uniform() {
        let oc = oc_for(3);
        let mut counts = [0usize; 21];
        for r in 0..20_000 {
            let (a, b) = decode_pair(&oc, r, 37, 20).unwrap();
            assert!(a < 37 && (1..=20).contains(&b));
            counts[b as usize] += 1;
        }
        for &c in &counts[1..] {
            let sigma = (20_000.0f64 * 0.05 * 0.95).sqrt();
            assert!((c as f64 - 1000.0).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn start_of_instance_returns_the_key() {
        let pair = GmrPair::from_primes(43, 47).unwrap().public();
        let (pk, z) = ClawFreeFdhReduction::start(ClawFreeFdhReduction::instance(&pair), 5, 12).unwrap();
        assert_eq!(pk.modulus(), pair.modulus());
        assert_eq!(z.pair.modulus(), pair.modulus());
        assert!(ClawFreeFdhReduction::start(pair, 1, 12).is_err());
    }

    #[test]
    fn every_reduction_signs_consistently_with_its_rand() {
        let pair = TableClawFree::random(97, &mut stream(1));
        let psf = table_psf_gen(8, 5, &mut stream(2)).unwrap();
        let coron = ClawFreeFdhReduction::start(pair.clone(), 4, 10).unwrap().1;
        let kw = KatzWangReduction::start(pair.clone(), 10).unwrap().1;
        let fp = FdhPsfReduction::start(psf, 10).unwrap().1;
        let cf = FdhPsfReduction::start(psf_from_clawfree(pair), 10).unwrap().1;
        let reds: [&dyn HistoryFreeReduction; 4] = [&coron, &kw, &fp, &cf];
        for red in reds {
            let oc = oc_for(9);
            let o = RandOracle::new(red, &oc);
            let mut aborts = 0;
            for m in 0..1024 {
                match red.sign(m, &oc).unwrap() {
                    Some(s) => assert!(red.verify_signature(m, s, &o).unwrap(), "{}", red.name()),
                    None => aborts += 1,
                }
            }
            if red.name() != "clawfree-fdh" {
                assert_eq!(aborts, 0);
            } else {
                assert!((aborts as f64 / 1024.0 - 0.25).abs() < 0.06);
            }
        }
    }

    #[test]
    fn point_distributions_are_exactly_uniform_for_the_permutation_reductions() {
        let pair = GmrPair::from_primes(43, 47).unwrap();
        let coron = ClawFreeFdhReduction::start(pair.clone(), 20, 8).unwrap().1;
        let kw = KatzWangReduction::start(pair, 8).unwrap().1;
        for d in [coron.point_distribution().unwrap(), kw.point_distribution().unwrap()] {
            let u = Distribution::uniform(d.len());
            assert!(total_variation(&d, &u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn b_one_probability_matches_counting() {
        for p in [2u64, 3, 7, 20, 1000] {
            let red = ClawFreeFdhReduction {
                pair: TableClawFree::random(4, &mut stream(0)),
                p,
                msg_bits: 4,
            };
            // values v in [0, 2^32) with v % p == 1
            let count = ((1u64 << 32) - 1 - 1) / p + 1;
            assert_eq!(red.b_one_probability(), count as f64 / (1u64 << 32) as f64);
        }
    }
}
