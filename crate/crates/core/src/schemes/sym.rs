use rand::RngCore;

use super::{byte_len, check_msg, from_le, to_le};
use crate::error::{Error, Result};
use crate::primitives::prf_eval;

/// Symmetric cipher keyed by a hash output.
pub trait SymmetricScheme: Send + Sync {
    fn name(&self) -> &'static str;
    fn key_bits(&self) -> u32;
    fn msg_bits(&self) -> u32;
    fn enc(&self, key: u64, m: u64, coins: &mut dyn RngCore) -> Result<Vec<u8>>;
    /// `Err(Error::Rejected)` on a malformed or forged body.
    fn dec(&self, key: u64, body: &[u8]) -> Result<u64>;
}

/// k ⊕ m, written as ⌈bits/8⌉ little-endian bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneTimePad {
    pub bits: u32,
}

impl SymmetricScheme for OneTimePad {
    fn name(&self) -> &'static str {
        "otp"
    }

    fn key_bits(&self) -> u32 {
        self.bits
    }

    fn msg_bits(&self) -> u32 {
        self.bits
    }

    fn enc(&self, key: u64, m: u64, _coins: &mut dyn RngCore) -> Result<Vec<u8>> {
        check_msg(m, self.bits)?;
        check_msg(key, self.bits)?;
        Ok(to_le(key ^ m, self.bits))
    }

    fn dec(&self, key: u64, body: &[u8]) -> Result<u64> {
        let c = from_le(body, self.bits).map_err(|_| Error::Rejected)?;
        Ok(c ^ key)
    }
}

const NONCE_BYTES: usize = 4;
const TAG_BYTES: usize = 4;
const TAG_DOMAIN: u64 = 1 << 63;

/// Nonce-based stream cipher with an encrypt-then-MAC tag, both from the
/// toy PRF. Layout: nonce ‖ m ⊕ pad ‖ tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuthXor {
    pub key_bits: u32,
    pub msg_bits: u32,
}

impl AuthXor {
    fn pad(&self, key: u64, nonce: u64) -> u64 {
        prf_eval(key, nonce, self.msg_bits)
    }

    fn tag(&self, key: u64, nonce: u64, c: u64) -> u64 {
        let inner = prf_eval(key, TAG_DOMAIN | nonce, 64);
        prf_eval(key, inner ^ c, 8 * TAG_BYTES as u32)
    }
}

impl SymmetricScheme for AuthXor {
    fn name(&self) -> &'static str {
        "auth-xor"
    }

    fn key_bits(&self) -> u32 {
        self.key_bits
    }

    fn msg_bits(&self) -> u32 {
        self.msg_bits
    }

    fn enc(&self, key: u64, m: u64, coins: &mut dyn RngCore) -> Result<Vec<u8>> {
        check_msg(m, self.msg_bits)?;
        check_msg(key, self.key_bits)?;
        let nonce = coins.next_u32() as u64;
        let c = m ^ self.pad(key, nonce);
        let mut out = Vec::with_capacity(NONCE_BYTES + byte_len(self.msg_bits) + TAG_BYTES);
        out.extend_from_slice(&(nonce as u32).to_le_bytes());
        out.extend(to_le(c, self.msg_bits));
        out.extend_from_slice(&(self.tag(key, nonce, c) as u32).to_le_bytes());
        Ok(out)
    }

    fn dec(&self, key: u64, body: &[u8]) -> Result<u64> {
        let n = byte_len(self.msg_bits);
        if body.len() != NONCE_BYTES + n + TAG_BYTES {
            return Err(Error::Rejected);
        }
        let nonce = u32::from_le_bytes(body[..NONCE_BYTES].try_into().unwrap()) as u64;
        let c = from_le(&body[NONCE_BYTES..NONCE_BYTES + n], self.msg_bits).map_err(|_| Error::Rejected)?;
        let tag = u32::from_le_bytes(body[NONCE_BYTES + n..].try_into().unwrap()) as u64;
        if tag != self.tag(key, nonce, c) {
            return Err(Error::Rejected);
        }
        Ok(c ^ self.pad(key, nonce))
    }
}
