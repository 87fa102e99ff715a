use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_TDP_BITS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdpPublicKey {
    pub domain_bits: u32,
    pub table: Arc<[u64]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdpSecretKey {
    pub inverse: Arc<[u64]>,
}

/// A uniformly random permutation of `{0,1}^domain_bits`, given by its
/// table (public) and inverse table (trapdoor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableTdp {
    pub pk: TdpPublicKey,
    pub sk: Option<TdpSecretKey>,
}

pub fn table_tdp_gen(domain_bits: u32, rng: &mut dyn RngCore) -> Result<TableTdp> {
    if domain_bits > MAX_TDP_BITS {
        return Err(Error::InvalidParameter(format!(
            "domain_bits {domain_bits} exceeds {MAX_TDP_BITS}"
        )));
    }
    let n = 1usize << domain_bits;
    let mut table: Vec<u64> = (0..n as u64).collect();
    table.shuffle(rng);
    let mut inverse = vec![0u64; n];
    for (x, &y) in table.iter().enumerate() {
        inverse[y as usize] = x as u64;
    }
    Ok(TableTdp {
        pk: TdpPublicKey {
            domain_bits,
            table: table.into(),
        },
        sk: Some(TdpSecretKey {
            inverse: inverse.into(),
        }),
    })
}

impl TableTdp {
    pub fn domain_bits(&self) -> u32 {
        self.pk.domain_bits
    }

    pub fn domain_size(&self) -> u64 {
        1u64 << self.pk.domain_bits
    }

    fn check(&self, x: u64) -> Result<()> {
        if x >= self.domain_size() {
            return Err(Error::DomainOverflow {
                input: x,
                size: self.domain_size() as u128,
            });
        }
        Ok(())
    }

    pub fn f(&self, x: u64) -> Result<u64> {
        self.check(x)?;
        Ok(self.pk.table[x as usize])
    }

    pub fn f_inv(&self, y: u64) -> Result<u64> {
        self.check(y)?;
        let sk = self.sk.as_ref().ok_or(Error::MissingTrapdoor)?;
        Ok(sk.inverse[y as usize])
    }

    /// Same permutation without the trapdoor.
    pub fn public(&self) -> Self {
        Self {
            pk: self.pk.clone(),
            sk: None,
        }
    }
}
