//! Signature and encryption schemes over the toy primitives. Oracles are
//! always passed in explicitly so a reduction can substitute its simulated
//! oracle for the real one.

mod enc;
mod sig;
mod sym;

pub use enc::{Br, Ciphertext, EncryptionScheme, Hybrid};
pub use sig::{ClawFreeFdh, Fdh, FdhPsf, KatzWang, SignatureScheme};
pub use sym::{AuthXor, OneTimePad, SymmetricScheme};

use crate::error::{Error, Result};
use crate::qsim::{Codomain, Oracle};

pub(crate) fn check_oracle(oracle: &dyn Oracle, in_bits: u32, codomain: Codomain) -> Result<()> {
    if oracle.codomain() != codomain {
        return Err(Error::WidthMismatch {
            expected: codomain.size().min(u64::MAX as u128) as u64,
            got: oracle.codomain().size().min(u64::MAX as u128) as u64,
        });
    }
    if oracle.in_bits() < in_bits {
        return Err(Error::WidthMismatch {
            expected: in_bits as u64,
            got: oracle.in_bits() as u64,
        });
    }
    Ok(())
}

pub(crate) fn check_msg(m: u64, bits: u32) -> Result<()> {
    if bits < 64 && m >> bits != 0 {
        return Err(Error::DomainOverflow {
            input: m,
            size: 1u128 << bits,
        });
    }
    Ok(())
}

pub(crate) fn byte_len(bits: u32) -> usize {
    bits.div_ceil(8) as usize
}

pub(crate) fn to_le(v: u64, bits: u32) -> Vec<u8> {
    v.to_le_bytes()[..byte_len(bits)].to_vec()
}

pub(crate) fn from_le(b: &[u8], bits: u32) -> Result<u64> {
    if b.len() != byte_len(bits) {
        return Err(Error::WidthMismatch {
            expected: byte_len(bits) as u64,
            got: b.len() as u64,
        });
    }
    let mut buf = [0u8; 8];
    buf[..b.len()].copy_from_slice(b);
    let v = u64::from_le_bytes(buf);
    check_msg(v, bits)?;
    Ok(v)
}
