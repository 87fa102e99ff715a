use rand::{Rng, RngCore};

use super::{check_msg, check_oracle, from_le, to_le, SymmetricScheme};
use crate::error::{Error, Result};
use crate::primitives::{table_tdp_gen, TableTdp};
use crate::qsim::{Codomain, Oracle};
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub y: u64,
    pub body: Vec<u8>,
}

impl Ciphertext {
    /// `y` as 8 little-endian bytes followed by the body.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.y.to_le_bytes().to_vec();
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() < 8 {
            return Err(Error::Rejected);
        }
        Ok(Self {
            y: u64::from_le_bytes(b[..8].try_into().unwrap()),
            body: b[8..].to_vec(),
        })
    }
}

/// Public-key encryption in the random-oracle model. The hash oracle maps
/// the TDP domain to `oracle_codomain()`.
pub trait EncryptionScheme: Send + Sync {
    fn name(&self) -> &'static str;
    fn tdp(&self) -> &TableTdp;
    fn msg_bits(&self) -> u32;
    fn oracle_codomain(&self) -> Codomain;
    fn oracle_in_bits(&self) -> u32 {
        self.tdp().domain_bits()
    }
    fn encrypt(&self, m: u64, oracle: &dyn Oracle, coins: &mut dyn RngCore) -> Result<Ciphertext>;
    fn decrypt(&self, c: &Ciphertext, oracle: &dyn Oracle) -> Result<u64>;

    /// Decryption once the hash value `O(f⁻¹(y))` is known.
    fn decrypt_with_key(&self, c: &Ciphertext, key: u64) -> Result<u64>;
}

/// (f(r), O(r) ⊕ m).
#[derive(Debug, Clone)]
pub struct Br {
    pub tdp: TableTdp,
    pub msg_bits: u32,
}

impl Br {
    pub fn keygen(domain_bits: u32, msg_bits: u32, seed: u64) -> Result<Self> {
        Ok(Self {
            tdp: table_tdp_gen(domain_bits, &mut stream(seed))?,
            msg_bits,
        })
    }
}

impl EncryptionScheme for Br {
    fn name(&self) -> &'static str {
        "br"
    }

    fn tdp(&self) -> &TableTdp {
        &self.tdp
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::bits(self.msg_bits)
    }

    fn encrypt(&self, m: u64, oracle: &dyn Oracle, coins: &mut dyn RngCore) -> Result<Ciphertext> {
        check_msg(m, self.msg_bits)?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        let r = coins.gen_range(0..self.tdp.domain_size());
        Ok(Ciphertext {
            y: self.tdp.f(r)?,
            body: to_le(oracle.query(r)? ^ m, self.msg_bits),
        })
    }

    fn decrypt(&self, c: &Ciphertext, oracle: &dyn Oracle) -> Result<u64> {
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        if c.y >= self.tdp.domain_size() {
            return Err(Error::Rejected);
        }
        let r = self.tdp.f_inv(c.y)?;
        self.decrypt_with_key(c, oracle.query(r)?)
    }

    fn decrypt_with_key(&self, c: &Ciphertext, key: u64) -> Result<u64> {
        Ok(from_le(&c.body, self.msg_bits).map_err(|_| Error::Rejected)? ^ key)
    }
}

/// (f(r), E_sy(O(r), m)).
#[derive(Debug, Clone)]
pub struct Hybrid<S> {
    pub tdp: TableTdp,
    pub sym: S,
}

impl<S: SymmetricScheme> Hybrid<S> {
    pub fn keygen(domain_bits: u32, sym: S, seed: u64) -> Result<Self> {
        Ok(Self {
            tdp: table_tdp_gen(domain_bits, &mut stream(seed))?,
            sym,
        })
    }
}

impl<S: SymmetricScheme> EncryptionScheme for Hybrid<S> {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn tdp(&self) -> &TableTdp {
        &self.tdp
    }

    fn msg_bits(&self) -> u32 {
        self.sym.msg_bits()
    }

    fn oracle_codomain(&self) -> Codomain {
        Codomain::bits(self.sym.key_bits())
    }

    fn encrypt(&self, m: u64, oracle: &dyn Oracle, coins: &mut dyn RngCore) -> Result<Ciphertext> {
        check_msg(m, self.sym.msg_bits())?;
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        let r = coins.gen_range(0..self.tdp.domain_size());
        let y = self.tdp.f(r)?;
        let body = self.sym.enc(oracle.query(r)?, m, coins)?;
        Ok(Ciphertext { y, body })
    }

    fn decrypt(&self, c: &Ciphertext, oracle: &dyn Oracle) -> Result<u64> {
        check_oracle(oracle, self.oracle_in_bits(), self.oracle_codomain())?;
        if c.y >= self.tdp.domain_size() {
            return Err(Error::Rejected);
        }
        let r = self.tdp.f_inv(c.y)?;
        self.decrypt_with_key(c, oracle.query(r)?)
    }

    fn decrypt_with_key(&self, c: &Ciphertext, key: u64) -> Result<u64> {
        self.sym.dec(key, &c.body)
    }
}
