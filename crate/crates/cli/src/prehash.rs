//! Variable-length messages are mapped onto a scheme's fixed message width
//! here, outside the schemes themselves.
//!
//! Padding appends 0x80, zero-fills to a multiple of 8 bytes and adds the
//! bit length as a final word; the words are chained through the public
//! mix `prf_eval(chain, word)` from a fixed IV and the result is truncated.

use qrom_core::primitives::prf_eval;

const IV: u64 = 0x7072_6568_6173_6821;

pub fn pad(msg: &[u8]) -> Vec<u64> {
    let mut bytes = msg.to_vec();
    bytes.push(0x80);
    while !bytes.len().is_multiple_of(8) {
        bytes.push(0);
    }
    let mut words: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    words.push((msg.len() as u64).wrapping_mul(8));
    words
}

pub fn prehash(msg: &[u8], bits: u32) -> u64 {
    let h = pad(msg).into_iter().fold(IV, |chain, w| prf_eval(chain, w, 64));
    if bits >= 64 {
        h
    } else {
        h & ((1u64 << bits) - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_is_injective_on_trailing_zeros() {
        assert_ne!(pad(b"a"), pad(b"a\0"));
        assert_ne!(pad(b""), pad(b"\x80"));
        assert_eq!(pad(b"").len(), 2);
        assert_eq!(pad(&[0u8; 7]).len(), 2);
        assert_eq!(pad(&[0u8; 8]).len(), 3);
    }

    #[test]
    fn prehash_fits_the_width() {
        for n in 0..100usize {
            let m = vec![n as u8; n];
            assert!(prehash(&m, 12) < 1 << 12);
        }
        assert_ne!(prehash(b"abc", 64), prehash(b"abd", 64));
    }
}
