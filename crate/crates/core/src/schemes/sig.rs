use rand::{Rng, RngCore};

use super::{check_msg, check_oracle};
use crate::error::Result;
use crate::primitives::{coins_from, table_tdp_gen, ClawFree, Psf, Qprf, TableTdp};
use crate::qsim::{Codomain, Oracle};
use crate::rng::stream;

pub trait SignatureScheme: Send + Sync {
    fn name(&self) -> &'static str;
    fn msg_bits(&self) -> u32;
    /// Input width of the hash oracle the scheme queries.
    fn oracle_in_bits(&self) -> u32 {
        self.msg_bits()
    }
    fn oracle_codomain(&self) -> Codomain;
    fn sign(&self, m: u64, oracle: &dyn Oracle, rng: &mut dyn RngCore) -> Result<u64>;
    fn verify(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool>;
}

/// σ = f⁻¹(sk, O(m)).
#[derive(Debug, Clone)]
pub struct Fdh {
    pub tdp: TableTdp,
    pub msg_bits: u32,
}

impl Fdh {
    pub fn keygen(domain_bits: u32, msg_bits: u32, seed: u64) -> Result<Self> {
        Ok(Self {
            tdp: table_tdp_gen(domain_bits, &mut stream(seed))?,
            msg_bits,
        })
    }
}

impl SignatureScheme for Fdh {
    fn name(&self) -> &'static str {
        "fdh"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.tdp.domain_size())
    }

    fn sign(&self, m: u64, oracle: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<u64> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        self.tdp.f_inv(oracle.query(m)?)
    }

    fn verify(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        Ok(sigma < self.tdp.domain_size() && self.tdp.f(sigma)? == oracle.query(m)?)
    }
}

/// FDH over a PSF, with preimage sampling derandomized by a PRF of the
/// message.
#[derive(Debug, Clone)]
pub struct FdhPsf<P> {
    pub psf: P,
    pub prf: Qprf,
    pub msg_bits: u32,
}

impl<P: Psf> FdhPsf<P> {
    pub fn new(psf: P, prf_key: u64, msg_bits: u32) -> Self {
        Self {
            psf,
            prf: Qprf::new(prf_key, 64, 64),
            msg_bits,
        }
    }
}

impl<P: Psf> SignatureScheme for FdhPsf<P> {
    fn name(&self) -> &'static str {
        "fdh-psf"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.psf.range_size())
    }

    fn sign(&self, m: u64, oracle: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<u64> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        let y = oracle.query(m)?;
        self.psf.preimage(y, &mut coins_from(self.prf.eval(m)))
    }

    fn verify(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        Ok(sigma < self.psf.domain_size() && self.psf.eval(sigma)? == oracle.query(m)?)
    }
}

/// FDH with f1 of a claw-free pair; f2 is never touched.
#[derive(Debug, Clone)]
pub struct ClawFreeFdh<C> {
    pub pair: C,
    pub msg_bits: u32,
}

impl<C: ClawFree> SignatureScheme for ClawFreeFdh<C> {
    fn name(&self) -> &'static str {
        "clawfree-fdh"
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::range(self.pair.domain_size())
    }

    fn sign(&self, m: u64, oracle: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<u64> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        self.pair.f1_inv(oracle.query(m)?)
    }

    fn verify(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        Ok(sigma < self.pair.domain_size() && self.pair.f1(sigma)? == oracle.query(m)?)
    }
}

/// σ = f1⁻¹(sk, O(b‖m)) for a fresh random bit b; the oracle input is
/// `(b << msg_bits) | m`.
#[derive(Debug, Clone)]
pub struct KatzWang<C> {
    pub pair: C,
    pub msg_bits: u32,
}

impl<C: ClawFree> KatzWang<C> {
    pub fn oracle_input(&self, b: bool, m: u64) -> u64 {
        ((b as u64) << self.msg_bits) | m
    }

    /// Signature for a chosen branch.
    pub fn sign_branch(&self, b: bool, m: u64, oracle: &dyn Oracle) -> Result<u64> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        self.pair.f1_inv(oracle.query(self.oracle_input(b, m))?)
    }
}

impl<C: ClawFree> SignatureScheme for KatzWang<C> {
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

    fn sign(&self, m: u64, oracle: &dyn Oracle, rng: &mut dyn RngCore) -> Result<u64> {
        let b: bool = rng.gen();
        self.sign_branch(b, m, oracle)
    }

    fn verify(&self, m: u64, sigma: u64, oracle: &dyn Oracle) -> Result<bool> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        if sigma >= self.pair.domain_size() {
            return Ok(false);
        }
        let img = self.pair.f1(sigma)?;
        Ok(img == oracle.query(self.oracle_input(false, m))? || img == oracle.query(self.oracle_input(true, m))?)
    }
}
