use std::sync::Arc;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::gmr::ClawFree;
use crate::error::{Error, Result};

/// Preimage-sampleable function over domain `0..domain_size()` and range
/// `0..range_size()`.
pub trait Psf: Send + Sync {
    fn domain_size(&self) -> u64;
    fn range_size(&self) -> u64;
    fn eval(&self, x: u64) -> Result<u64>;
    /// Draw a domain element with the public sampler.
    fn sample(&self, coins: &mut dyn RngCore) -> u64;
    /// Exact sampler distribution over the domain.
    fn sample_weights(&self) -> Vec<f64>;
    /// Trapdoor preimage sampling.
    fn preimage(&self, y: u64, coins: &mut dyn RngCore) -> Result<u64>;
    /// Stated bound on the distance (sum convention) of f(sample) from
    /// uniform on the range.
    fn eps_sample(&self) -> f64;
    /// Bits of min-entropy of a preimage given its image.
    fn min_entropy(&self) -> u32;

    fn is_collision(&self, x1: u64, x2: u64) -> bool {
        x1 != x2 && matches!((self.eval(x1), self.eval(x2)), (Ok(a), Ok(b)) if a == b)
    }
}

/// Domain element `2x + b` maps to f_b(x), with f_0 = f1 and f_1 = f2.
#[derive(Debug, Clone)]
pub struct ClawFreePsf<C> {
    pub pair: C,
}

pub fn psf_from_clawfree<C: ClawFree>(pair: C) -> ClawFreePsf<C> {
    ClawFreePsf { pair }
}

impl<C: ClawFree> ClawFreePsf<C> {
    /// A collision of this PSF has differing bits and so is a claw; returns
    /// it ordered as (f1-preimage, f2-preimage).
    pub fn claw_from_collision(&self, a: u64, b: u64) -> Option<(u64, u64)> {
        if !self.is_collision(a, b) || (a & 1) == (b & 1) {
            return None;
        }
        let (x1, x2) = if a & 1 == 0 { (a >> 1, b >> 1) } else { (b >> 1, a >> 1) };
        self.pair.is_claw(x1, x2).then_some((x1, x2))
    }
}

impl<C: ClawFree> Psf for ClawFreePsf<C> {
    fn domain_size(&self) -> u64 {
        2 * self.pair.domain_size()
    }

    fn range_size(&self) -> u64 {
        self.pair.domain_size()
    }

    fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.domain_size() {
            return Err(Error::DomainOverflow {
                input: x,
                size: self.domain_size() as u128,
            });
        }
        if x & 1 == 0 {
            self.pair.f1(x >> 1)
        } else {
            self.pair.f2(x >> 1)
        }
    }

    fn sample(&self, coins: &mut dyn RngCore) -> u64 {
        coins.gen_range(0..self.domain_size())
    }

    fn sample_weights(&self) -> Vec<f64> {
        vec![1.0 / self.domain_size() as f64; self.domain_size() as usize]
    }

    fn preimage(&self, y: u64, coins: &mut dyn RngCore) -> Result<u64> {
        if coins.gen::<bool>() {
            Ok(2 * self.pair.f2_inv(y)? + 1)
        } else {
            Ok(2 * self.pair.f1_inv(y)?)
        }
    }

    fn eps_sample(&self) -> f64 {
        0.0
    }

    fn min_entropy(&self) -> u32 {
        1
    }
}

pub const MAX_TABLE_PSF_BITS: u32 = 18;

/// A random regular function `{0,1}^d → {0,1}^r`: every image has exactly
/// 2^(d−r) preimages. The sampler is uniform unless built with
/// [`table_psf_skewed`].
#[derive(Debug, Clone)]
pub struct TablePsf {
    domain_bits: u32,
    range_bits: u32,
    f: Arc<[u64]>,
    sampler: Option<(Arc<[f64]>, WeightedIndex<f64>)>,
    eps: f64,
    preimages: Option<Arc<[Vec<u64>]>>,
}

pub fn table_psf_gen(domain_bits: u32, range_bits: u32, rng: &mut dyn RngCore) -> Result<TablePsf> {
    if range_bits > domain_bits {
        return Err(Error::InvalidParameter(format!(
            "no regular function from {domain_bits} bits onto {range_bits} bits"
        )));
    }
    if domain_bits > MAX_TABLE_PSF_BITS {
        return Err(Error::InvalidParameter(format!(
            "domain_bits {domain_bits} exceeds {MAX_TABLE_PSF_BITS}"
        )));
    }
    let fan = 1u64 << (domain_bits - range_bits);
    let mut f: Vec<u64> = (0..1u64 << range_bits)
        .flat_map(|y| std::iter::repeat_n(y, fan as usize))
        .collect();
    f.shuffle(rng);
    let mut pre = vec![Vec::with_capacity(fan as usize); 1usize << range_bits];
    for (x, &y) in f.iter().enumerate() {
        pre[y as usize].push(x as u64);
    }
    Ok(TablePsf {
        domain_bits,
        range_bits,
        f: f.into(),
        sampler: None,
        eps: 0.0,
        preimages: Some(pre.into()),
    })
}

/// Like [`table_psf_gen`], but the sampler's image distribution sits at
/// distance exactly `eps` from uniform: image 0 gains ε/2, the last image
/// loses ε/2, and within an image the sampler stays uniform.
pub fn table_psf_skewed(domain_bits: u32, range_bits: u32, eps: f64, rng: &mut dyn RngCore) -> Result<TablePsf> {
    let mut psf = table_psf_gen(domain_bits, range_bits, rng)?;
    let r = 1usize << range_bits;
    let base = 1.0 / r as f64;
    if r < 2 || !(0.0..=2.0 * base).contains(&eps) {
        return Err(Error::InvalidParameter(format!("cannot plant eps={eps} on {r} images")));
    }
    let mut image = vec![base; r];
    image[0] += eps / 2.0;
    image[r - 1] -= eps / 2.0;
    let fan = (1u64 << (domain_bits - range_bits)) as f64;
    let weights: Vec<f64> = psf.f.iter().map(|&y| image[y as usize] / fan).collect();
    let w = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    psf.sampler = Some((weights.into(), w));
    psf.eps = eps;
    Ok(psf)
}

impl TablePsf {
    pub fn domain_bits(&self) -> u32 {
        self.domain_bits
    }

    pub fn range_bits(&self) -> u32 {
        self.range_bits
    }

    pub fn public(&self) -> Self {
        Self {
            preimages: None,
            ..self.clone()
        }
    }

    pub fn preimage_count(&self, y: u64) -> usize {
        self.f.iter().filter(|&&v| v == y).count()
    }
}

impl Psf for TablePsf {
    fn domain_size(&self) -> u64 {
        1u64 << self.domain_bits
    }

    fn range_size(&self) -> u64 {
        1u64 << self.range_bits
    }

    fn eval(&self, x: u64) -> Result<u64> {
        self.f.get(x as usize).copied().ok_or(Error::DomainOverflow {
            input: x,
            size: self.domain_size() as u128,
        })
    }

    fn sample(&self, coins: &mut dyn RngCore) -> u64 {
        match &self.sampler {
            Some((_, w)) => w.sample(coins) as u64,
            None => coins.gen_range(0..self.domain_size()),
        }
    }

    fn sample_weights(&self) -> Vec<f64> {
        match &self.sampler {
            Some((w, _)) => w.to_vec(),
            None => vec![1.0 / self.domain_size() as f64; self.domain_size() as usize],
        }
    }

    fn preimage(&self, y: u64, coins: &mut dyn RngCore) -> Result<u64> {
        let pre = self.preimages.as_ref().ok_or(Error::MissingTrapdoor)?;
        let list = pre.get(y as usize).ok_or(Error::DomainOverflow {
            input: y,
            size: self.range_size() as u128,
        })?;
        Ok(*list.choose(coins).expect("regular function has preimages"))
    }

    fn eps_sample(&self) -> f64 {
        self.eps
    }

    fn min_entropy(&self) -> u32 {
        self.domain_bits - self.range_bits
    }
}
