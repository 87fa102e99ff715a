use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pair of permutations over one domain, written over element indices
/// `0..domain_size`.
pub trait ClawFree: Send + Sync {
    fn domain_size(&self) -> u64;
    fn f1(&self, x: u64) -> Result<u64>;
    fn f2(&self, x: u64) -> Result<u64>;
    fn f1_inv(&self, y: u64) -> Result<u64>;
    fn f2_inv(&self, y: u64) -> Result<u64>;

    /// f1(x1) = f2(x2)
    fn is_claw(&self, x1: u64, x2: u64) -> bool {
        matches!((self.f1(x1), self.f2(x2)), (Ok(a), Ok(b)) if a == b)
    }
}

fn check(x: u64, size: u64) -> Result<()> {
    if x >= size {
        return Err(Error::DomainOverflow {
            input: x,
            size: size as u128,
        });
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmrPublic {
    pub n: u64,
    /// Quadratic residues mod n, sorted; domain elements are indices here.
    pub qr: Arc<[u64]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmrSecret {
    pub p: u64,
    pub q: u64,
}

/// f1(x) = x², f2(x) = 4x² on the quadratic residues mod N = p·q with
/// p ≡ 3 (mod 8) and q ≡ 7 (mod 8). Neither 2 nor −2 is a residue mod such
/// an N, so any claw yields a nontrivial square root of 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmrPair {
    pub pk: GmrPublic,
    pub sk: Option<GmrSecret>,
}

pub const MAX_MODULUS_BITS: u32 = 24;

pub fn gmr_clawfree_gen(modulus_bits: u32, rng: &mut dyn RngCore) -> Result<GmrPair> {
    if !(5..=MAX_MODULUS_BITS).contains(&modulus_bits) {
        return Err(Error::InvalidParameter(format!(
            "modulus_bits must be in 5..={MAX_MODULUS_BITS}, got {modulus_bits}"
        )));
    }
    let primes_in = |bits: u32, residue: u64| -> Vec<u64> {
        let lo = 1u64 << (bits - 1);
        (lo..lo << 1).filter(|&v| v % 8 == residue && is_prime(v)).collect()
    };
    // most balanced split first, widening until some pair fits
    let half = modulus_bits / 2;
    for skew in 0..half {
        let mut pairs = Vec::new();
        for bp in [half - skew, modulus_bits - half + skew] {
            if bp < 2 || bp >= modulus_bits {
                continue;
            }
            let (ps, qs) = (primes_in(bp, 3), primes_in(modulus_bits + 1 - bp, 7));
            let qs_low = primes_in(modulus_bits - bp, 7);
            for &p in &ps {
                for &q in qs.iter().chain(&qs_low) {
                    if p != q && 64 - (p * q).leading_zeros() == modulus_bits {
                        pairs.push((p, q));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        if !pairs.is_empty() {
            let (p, q) = pairs[rng.gen_range(0..pairs.len())];
            return GmrPair::from_primes(p, q);
        }
    }
    Err(Error::InvalidParameter(format!("no suitable primes for {modulus_bits} bits")))
}

impl GmrPair {
    pub fn from_primes(p: u64, q: u64) -> Result<Self> {
        if !(is_prime(p) && is_prime(q) && p % 8 == 3 && q % 8 == 7) {
            return Err(Error::InvalidParameter(format!(
                "need primes p = 3 mod 8, q = 7 mod 8, got {p}, {q}"
            )));
        }
        let n = p * q;
        if 64 - n.leading_zeros() > MAX_MODULUS_BITS {
            return Err(Error::InvalidParameter(format!("modulus {n} too large to enumerate")));
        }
        let mut is_qr = vec![false; n as usize];
        for x in 1..n {
            if x % p != 0 && x % q != 0 {
                is_qr[mul_mod(x, x, n) as usize] = true;
            }
        }
        let qr: Vec<u64> = (0..n).filter(|&v| is_qr[v as usize]).collect();
        Ok(Self {
            pk: GmrPublic { n, qr: qr.into() },
            sk: Some(GmrSecret { p, q }),
        })
    }

    pub fn public(&self) -> Self {
        Self {
            pk: self.pk.clone(),
            sk: None,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.pk.n
    }

    /// Residue value of domain index `i`.
    pub fn element(&self, i: u64) -> Result<u64> {
        check(i, self.domain_size())?;
        Ok(self.pk.qr[i as usize])
    }

    /// Domain index of residue `v`.
    pub fn index_of(&self, v: u64) -> Option<u64> {
        self.pk.qr.binary_search(&v).ok().map(|i| i as u64)
    }

    fn idx(&self, v: u64) -> u64 {
        self.index_of(v).expect("image of a residue is a residue")
    }

    /// The square root of residue `y` that is itself a residue.
    fn principal_sqrt(&self, y: u64) -> Result<u64> {
        let sk = self.sk.as_ref().ok_or(Error::MissingTrapdoor)?;
        let (p, q, n) = (sk.p, sk.q, self.pk.n);
        let rp = pow_mod(y % p, (p + 1) / 4, p);
        let rq = pow_mod(y % q, (q + 1) / 4, q);
        let (qi, pi) = (
            inv_mod(q % p, p).expect("coprime"),
            inv_mod(p % q, q).expect("coprime"),
        );
        let crt = |a: u64, b: u64| (mul_mod(mul_mod(a, q, n), qi, n) + mul_mod(mul_mod(b, p, n), pi, n)) % n;
        for (a, b) in [(rp, rq), (p - rp, rq), (rp, q - rq), (p - rp, q - rq)] {
            let x = crt(a % p, b % q);
            if self.index_of(x).is_some() && mul_mod(x, x, n) == y {
                return Ok(x);
            }
        }
        Err(Error::InvalidParameter(format!("{y} is not a residue mod {n}")))
    }
}

impl ClawFree for GmrPair {
    fn domain_size(&self) -> u64 {
        self.pk.qr.len() as u64
    }

    fn f1(&self, x: u64) -> Result<u64> {
        let v = self.element(x)?;
        Ok(self.idx(mul_mod(v, v, self.pk.n)))
    }

    fn f2(&self, x: u64) -> Result<u64> {
        let v = self.element(x)?;
        Ok(self.idx(mul_mod(4, mul_mod(v, v, self.pk.n), self.pk.n)))
    }

    fn f1_inv(&self, y: u64) -> Result<u64> {
        let v = self.element(y)?;
        Ok(self.idx(self.principal_sqrt(v)?))
    }

    fn f2_inv(&self, y: u64) -> Result<u64> {
        let v = self.element(y)?;
        let quarter = mul_mod(v, inv_mod(4, self.pk.n).expect("n is odd"), self.pk.n);
        Ok(self.idx(self.principal_sqrt(quarter)?))
    }
}

/// (f1⁻¹, f2⁻¹) tables.
type Inverses = (Arc<[u64]>, Arc<[u64]>);

/// Two independent random permutation tables; handy where a test needs to
/// swap one half of a pair without touching the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableClawFree {
    f1: Arc<[u64]>,
    f2: Arc<[u64]>,
    inv: Option<Inverses>,
}

impl TableClawFree {
    pub fn random(size: u64, rng: &mut dyn RngCore) -> Self {
        let perm = |rng: &mut dyn RngCore| {
            let mut t: Vec<u64> = (0..size).collect();
            t.shuffle(rng);
            t
        };
        let (a, b) = (perm(rng), perm(rng));
        Self::from_tables(a, b)
    }

    pub fn from_tables(f1: Vec<u64>, f2: Vec<u64>) -> Self {
        let invert = |t: &[u64]| {
            let mut inv = vec![0u64; t.len()];
            t.iter().enumerate().for_each(|(x, &y)| inv[y as usize] = x as u64);
            Arc::<[u64]>::from(inv)
        };
        let inv = Some((invert(&f1), invert(&f2)));
        Self {
            f1: f1.into(),
            f2: f2.into(),
            inv,
        }
    }

    pub fn with_f2(&self, f2: Vec<u64>) -> Self {
        Self::from_tables(self.f1.to_vec(), f2)
    }
}

impl ClawFree for TableClawFree {
    fn domain_size(&self) -> u64 {
        self.f1.len() as u64
    }

    fn f1(&self, x: u64) -> Result<u64> {
        check(x, self.domain_size())?;
        Ok(self.f1[x as usize])
    }

    fn f2(&self, x: u64) -> Result<u64> {
        check(x, self.domain_size())?;
        Ok(self.f2[x as usize])
    }

    fn f1_inv(&self, y: u64) -> Result<u64> {
        check(y, self.domain_size())?;
        Ok(self.inv.as_ref().ok_or(Error::MissingTrapdoor)?.0[y as usize])
    }

    fn f2_inv(&self, y: u64) -> Result<u64> {
        check(y, self.domain_size())?;
        Ok(self.inv.as_ref().ok_or(Error::MissingTrapdoor)?.1[y as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    // independent oracle: brute-force residues and the claw relation
    fn brute_qr(n: u64) -> Vec<u64> {
        let mut v: Vec<u64> = (1..n)
            .filter(|x| (1..n).any(|k| k * x % n == 1))
            .map(|x| x * x % n)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn n21_residues_and_bijection() {
        let g = GmrPair::from_primes(3, 7).unwrap();
        assert_eq!(g.pk.qr.to_vec(), brute_qr(21));
        assert_eq!(g.pk.qr.to_vec(), vec![1, 4, 16]);
        let mut img: Vec<u64> = (0..3).map(|x| g.f1(x).unwrap()).collect();
        img.sort();
        assert_eq!(img, vec![0, 1, 2]);
        for x in 0..3 {
            assert_eq!(g.f1_inv(g.f1(x).unwrap()).unwrap(), x);
            assert_eq!(g.f2_inv(g.f2(x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn claw_verifier_matches_definition_exhaustively() {
        for (p, q) in [(3, 7), (11, 7), (19, 23)] {
            let g = GmrPair::from_primes(p, q).unwrap();
            let n = g.modulus();
            let size = g.domain_size();
            for x1 in 0..size {
                for x2 in 0..size {
                    let (a, b) = (g.element(x1).unwrap(), g.element(x2).unwrap());
                    let claw = a * a % n == 4 * b * b % n;
                    assert_eq!(g.is_claw(x1, x2), claw);
                }
            }
        }
    }

    #[test]
    fn generated_pairs_round_trip() {
        let mut rng = stream(3);
        for bits in [5, 8, 12, 16] {
            let g = gmr_clawfree_gen(bits, &mut rng).unwrap();
            assert_eq!(64 - g.modulus().leading_zeros(), bits);
            let size = g.domain_size();
            let xs: Vec<u64> = if size <= 4096 {
                (0..size).collect()
            } else {
                (0..500).map(|_| rng.gen_range(0..size)).collect()
            };
            for x in xs {
                assert_eq!(g.f1_inv(g.f1(x).unwrap()).unwrap(), x);
                assert_eq!(g.f2_inv(g.f2(x).unwrap()).unwrap(), x);
            }
        }
        assert!(gmr_clawfree_gen(4, &mut rng).is_err());
        assert!(gmr_clawfree_gen(25, &mut rng).is_err());
    }

    #[test]
    fn f1_f2_share_domain_and_range() {
        let g = gmr_clawfree_gen(10, &mut stream(4)).unwrap();
        let size = g.domain_size();
        let mut a: Vec<u64> = (0..size).map(|x| g.f1(x).unwrap()).collect();
        let mut b: Vec<u64> = (0..size).map(|x| g.f2(x).unwrap()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, (0..size).collect::<Vec<_>>());
        assert_eq!(a, b);
    }

    #[test]
    fn public_half_cannot_invert() {
        let g = GmrPair::from_primes(3, 7).unwrap().public();
        assert_eq!(g.f1_inv(0), Err(Error::MissingTrapdoor));
        assert!(GmrPair::from_primes(5, 7).is_err());
    }
}
