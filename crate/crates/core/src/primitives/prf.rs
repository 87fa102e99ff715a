use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qsim::OracleTable;

#[inline]
fn sipround(v: &mut [u64; 4]) {
    v[0] = v[0].wrapping_add(v[1]);
    v[1] = v[1].rotate_left(13) ^ v[0];
    v[0] = v[0].rotate_left(32);
    v[2] = v[2].wrapping_add(v[3]);
    v[3] = v[3].rotate_left(16) ^ v[2];
    v[0] = v[0].wrapping_add(v[3]);
    v[3] = v[3].rotate_left(21) ^ v[0];
    v[2] = v[2].wrapping_add(v[1]);
    v[1] = v[1].rotate_left(17) ^ v[2];
    v[2] = v[2].rotate_left(32);
}

/// SipHash-2-4 shaped mix of one 64-bit word under a 64-bit key, truncated
/// to `out_bits`. Public and fixed; only the key is secret.
pub fn prf_eval(key: u64, x: u64, out_bits: u32) -> u64 {
    let k0 = key;
    let k1 = key.rotate_left(29) ^ 0x5851_f42d_4c95_7f2d;
    let mut v = [
        k0 ^ 0x736f_6d65_7073_6575,
        k1 ^ 0x646f_7261_6e64_6f6d,
        k0 ^ 0x6c79_6765_6e65_7261,
        k1 ^ 0x7465_6462_7974_6573,
    ];
    v[3] ^= x;
    sipround(&mut v);
    sipround(&mut v);
    v[0] ^= x;
    v[2] ^= 0xff;
    for _ in 0..4 {
        sipround(&mut v);
    }
    let out = v[0] ^ v[1] ^ v[2] ^ v[3];
    if out_bits >= 64 {
        out
    } else {
        out & ((1u64 << out_bits) - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qprf {
    key: u64,
    key_bits: u32,
    out_bits: u32,
}

impl Qprf {
    /// `key` is truncated to `key_bits` (≤ 64).
    pub fn new(key: u64, key_bits: u32, out_bits: u32) -> Self {
        let key_bits = key_bits.min(64);
        let key = if key_bits == 64 { key } else { key & ((1u64 << key_bits) - 1) };
        Self {
            key,
            key_bits,
            out_bits: out_bits.min(64),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn key_bits(&self) -> u32 {
        self.key_bits
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn eval(&self, x: u64) -> u64 {
        prf_eval(self.key, x, self.out_bits)
    }

    /// The induced function on `{0,1}^in_bits` as a table that can be
    /// queried in superposition.
    pub fn table(&self, in_bits: u32) -> Result<OracleTable> {
        assert!(self.out_bits < 64, "tables need out_bits < 64");
        OracleTable::from_fn(in_bits, 1u64 << self.out_bits, |x| self.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn deterministic_and_truncated() {
        let f = Qprf::new(0xdead_beef, 32, 12);
        assert_eq!(f.eval(77), f.eval(77));
        assert!(f.eval(77) < 1 << 12);
        let t = f.table(6).unwrap();
        assert_eq!(t.rows().len(), 64);
        assert!((0..64).all(|x| t.get(x) == f.eval(x)));
    }

    #[test]
    fn one_bit_key_change_flips_outputs() {
        let mut rng = stream(5);
        let mut differ = 0;
        let n = 10_000;
        for _ in 0..n {
            let key: u64 = rng.gen();
            let bit = rng.gen_range(0..64);
            let x: u64 = rng.gen();
            differ += (prf_eval(key, x, 16) != prf_eval(key ^ (1 << bit), x, 16)) as usize;
        }
        assert!(differ as f64 / n as f64 >= 0.99);
    }

    #[test]
    fn input_avalanche_and_bit_balance() {
        let mut rng = stream(6);
        let key: u64 = rng.gen();
        let n = 5000;
        let mut flipped = 0u32;
        let mut ones = [0usize; 32];
        for _ in 0..n {
            let x: u64 = rng.gen();
            let y = prf_eval(key, x, 32);
            for (b, c) in ones.iter_mut().enumerate() {
                *c += ((y >> b) & 1) as usize;
            }
            let bit = rng.gen_range(0..64);
            flipped += (y ^ prf_eval(key, x ^ (1 << bit), 32)).count_ones();
        }
        assert!(flipped as f64 / (n as f64 * 32.0) >= 0.4);
        // each output bit within 4σ of balanced
        let sigma = (0.25 / n as f64).sqrt();
        for c in ones {
            assert!((c as f64 / n as f64 - 0.5).abs() < 4.0 * sigma);
        }
    }
}
