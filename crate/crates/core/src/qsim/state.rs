use num_complex::Complex64;
use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::NORM_TOL;
use crate::error::{Error, Result};

pub const DEFAULT_QUBIT_CAP: usize = 24;

// Below this many amplitudes the rayon overhead dominates.
const PAR_THRESHOLD: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct QubitRange {
    pub start: usize,
    pub len: usize,
}

impl QubitRange {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn mask(&self) -> u64 {
        if self.len >= 64 {
            u64::MAX
        } else {
            (1u64 << self.len) - 1
        }
    }

    /// Value of this register in basis state `idx`.
    #[inline]
    pub fn extract(&self, idx: usize) -> u64 {
        ((idx >> self.start) as u64) & self.mask()
    }

    /// `idx` with this register overwritten by `value`.
    #[inline]
    pub fn replace(&self, idx: usize, value: u64) -> usize {
        let m = (self.mask() as usize) << self.start;
        (idx & !m) | (((value & self.mask()) as usize) << self.start)
    }

    pub fn overlaps(&self, other: &QubitRange) -> bool {
        self.len > 0 && other.len > 0 && self.start < other.end() && other.start < self.end()
    }
}

/// Pure state over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` under the default cap.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, 0, cap)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, index, DEFAULT_QUBIT_CAP)
    }

    pub fn basis_with_cap(num_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        if num_qubits > cap {
            return Err(Error::TooManyQubits {
                what: "state vector",
                requested: num_qubits,
                cap,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DomainOverflow {
                input: index as u64,
                size: dim as u128,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps explicit amplitudes; length must be a power of two and the
    /// vector normalized within tolerance.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{dim} amplitudes is not a power of two")));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        if num_qubits > DEFAULT_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "state vector",
                requested: num_qubits,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        let s = Self { num_qubits, amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if n <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let s = 1.0 / n.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn check_range(&self, r: &QubitRange) -> Result<()> {
        if r.end() > self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: r.end().saturating_sub(1),
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Marginal distribution of a register: entry `v` is Σ |α_idx|² over
    /// basis states whose register value is `v`.
    pub fn register_probabilities(&self, r: &QubitRange) -> Result<Vec<f64>> {
        self.check_range(r)?;
        let mut out = vec![0.0; 1usize << r.len];
        for (idx, a) in self.amps.iter().enumerate() {
            out[r.extract(idx) as usize] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Σ |α_idx|² over basis states whose register value satisfies `pred`.
    pub fn mass_where(&self, r: &QubitRange, pred: impl Fn(u64) -> bool) -> Result<f64> {
        self.check_range(r)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| pred(r.extract(*idx)))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    // Applies a 2x2 unitary [[u00,u01],[u10,u11]] to qubit q.
    fn apply_1q(&mut self, q: usize, u: [Complex64; 4]) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let block = stride << 1;
        let kernel = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = u[0] * x + u[1] * y;
                *b = u[2] * x + u[3] * y;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(block).for_each(kernel);
        } else {
            self.amps.chunks_mut(block).for_each(kernel);
        }
        Ok(())
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [s, s, s, -s])
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                self.amps.swap(idx, idx | bit);
            }
        }
        Ok(())
    }

    pub fn z(&mut self, q: usize) -> Result<()> {
        self.phase(q, std::f64::consts::PI)
    }

    /// diag(1, e^{iθ}) on qubit q.
    pub fn phase(&mut self, q: usize, theta: f64) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        let p = Complex64::from_polar(1.0, theta);
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & bit != 0 {
                *a *= p;
            }
        }
        Ok(())
    }

    /// Real rotation exp(−iθY/2).
    pub fn ry(&mut self, q: usize, theta: f64) -> Result<()> {
        let (s, c) = (theta / 2.0).sin_cos();
        let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
        self.apply_1q(q, [c, -s, s, c])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::RegisterOverlap);
        }
        let (cb, tb) = (1usize << control, 1usize << target);
        for idx in 0..self.amps.len() {
            if idx & cb != 0 && idx & tb == 0 {
                self.amps.swap(idx, idx | tb);
            }
        }
        Ok(())
    }

    pub fn h_range(&mut self, r: &QubitRange) -> Result<()> {
        self.check_range(r)?;
        for q in r.start..r.end() {
            self.h(q)?;
        }
        Ok(())
    }

    /// XOR a classical constant into a register (a layer of X gates).
    pub fn xor_constant(&mut self, r: &QubitRange, value: u64) -> Result<()> {
        self.check_range(r)?;
        let shift = ((value & r.mask()) as usize) << r.start;
        if shift == 0 {
            return Ok(());
        }
        for idx in 0..self.amps.len() {
            let j = idx ^ shift;
            if j > idx {
                self.amps.swap(idx, j);
            }
        }
        Ok(())
    }

    /// Reflection 2|s⟩⟨s| − I about the uniform state of register `r`,
    /// acting independently for every setting of the remaining qubits.
    pub fn invert_about_mean(&mut self, r: &QubitRange) -> Result<()> {
        self.check_range(r)?;
        if r.start == 0 {
            let size = 1usize << r.len;
            let kernel = |chunk: &mut [Complex64]| {
                let mean = chunk.iter().sum::<Complex64>() / size as f64;
                chunk.iter_mut().for_each(|a| *a = mean * 2.0 - *a);
            };
            if self.amps.len() >= PAR_THRESHOLD && size < self.amps.len() {
                self.amps.par_chunks_mut(size).for_each(kernel);
            } else {
                self.amps.chunks_mut(size).for_each(kernel);
            }
            return Ok(());
        }
        // H^n (2|0⟩⟨0| − I) H^n
        self.h_range(r)?;
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if r.extract(idx) != 0 {
                *a = -*a;
            }
        }
        self.h_range(r)
    }

    /// Sample one full basis index without collapsing.
    pub fn sample_index(&self, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return idx;
            }
        }
        // float slack: fall back to the last index carrying mass
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }

    /// Measure register `r`, collapse and renormalize in place.
    pub fn measure(&mut self, r: &QubitRange, rng: &mut dyn RngCore) -> Result<u64> {
        let probs = self.register_probabilities(r)?;
        let total: f64 = probs.iter().sum();
        if total <= f64::MIN_POSITIVE {
            return Err(Error::ZeroMass);
        }
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = None;
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                outcome = Some(v);
                break;
            }
        }
        let outcome = match outcome {
            Some(v) => v,
            None => probs.iter().rposition(|p| *p > 0.0).ok_or(Error::ZeroMass)?,
        };
        let p = probs[outcome];
        if p <= f64::MIN_POSITIVE {
            return Err(Error::ZeroMass);
        }
        let scale = 1.0 / p.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if r.extract(idx) as usize == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(outcome as u64)
    }
}

/// Functional form of [`StateVector::measure`].
pub fn partial_measure(
    mut state: StateVector,
    qubits: &QubitRange,
    rng: &mut dyn RngCore,
) -> Result<(u64, StateVector)> {
    let outcome = state.measure(qubits, rng)?;
    Ok((outcome, state))
}

/// (Σ_x |α_x − β_x|²)^{1/2}
pub fn euclidean_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::DimensionMismatch(a.num_qubits, b.num_qubits));
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(StateVector::zero(25), Err(Error::TooManyQubits { .. })));
        assert!(StateVector::zero_with_cap(5, 4).is_err());
        assert!(StateVector::zero(3).unwrap().is_normalized());
    }

    #[test]
    fn distance_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let plus = StateVector::from_amplitudes(vec![c(0.5f64.sqrt()), c(0.5f64.sqrt())]).unwrap();
        assert_eq!(euclidean_distance(&zero, &zero).unwrap(), 0.0);
        assert!((euclidean_distance(&zero, &one).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        // (1 − 1/√2)² + 1/2 = 2 − √2
        let d = euclidean_distance(&zero, &plus).unwrap();
        assert!((d - 0.765_366_864_730_179_9).abs() < 1e-12);
        assert!(euclidean_distance(&zero, &StateVector::zero(2).unwrap()).is_err());
    }

    #[test]
    fn basis_measurement_is_certain() {
        let mut rng = stream(1);
        let s = StateVector::basis(4, 0b1001).unwrap();
        let (out, collapsed) = partial_measure(s.clone(), &QubitRange::new(0, 2), &mut rng).unwrap();
        assert_eq!(out, 0b01);
        assert_eq!(collapsed, s);
    }

    #[test]
    fn bell_like_measurement_collapses_to_matching_branch() {
        // (|0,a⟩ + |1,b⟩)/√2 with a=0b10, b=0b01 in qubits 1..3
        let mut amps = vec![c(0.0); 8];
        amps[0b100] = c(0.5f64.sqrt());
        amps[0b011] = c(0.5f64.sqrt());
        let s = StateVector::from_amplitudes(amps).unwrap();
        let mut rng = stream(2);
        let mut zeros = 0;
        for _ in 0..2000 {
            let (out, post) = partial_measure(s.clone(), &QubitRange::new(0, 1), &mut rng).unwrap();
            let expect = if out == 0 { 0b100 } else { 0b011 };
            assert!((post.amplitudes()[expect].re - 1.0).abs() < 1e-12);
            zeros += (out == 0) as usize;
        }
        assert!((zeros as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn measurement_frequency_tracks_amplitude_squared() {
        let mut amps = vec![c(0.0); 4];
        amps[0b00] = c(0.36f64.sqrt());
        amps[0b11] = c(0.64f64.sqrt());
        let s = StateVector::from_amplitudes(amps).unwrap();
        let expected: f64 = s.register_probabilities(&QubitRange::new(0, 1)).unwrap()[0];
        assert!((expected - 0.36).abs() < 1e-12);
        let mut rng = stream(3);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| s.clone().measure(&QubitRange::new(0, 1), &mut rng).unwrap() == 0)
            .count();
        assert!((zeros as f64 / n as f64 - expected).abs() < 0.01);
    }

    #[test]
    fn measuring_zero_state_errors() {
        let mut s = StateVector::zero(1).unwrap();
        s.amplitudes_mut()[0] = c(0.0);
        assert_eq!(s.measure(&QubitRange::new(0, 1), &mut stream(0)), Err(Error::ZeroMass));
    }

    #[test]
    fn generic_and_chunked_diffusion_agree() {
        let mut rng = stream(4);
        let amps: Vec<Complex64> = (0..32)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let s = StateVector::normalized(amps).unwrap();
        let mut a = s.clone();
        a.invert_about_mean(&QubitRange::new(0, 3)).unwrap();
        let mut b = s.clone();
        b.h_range(&QubitRange::new(0, 3)).unwrap();
        for (idx, amp) in b.amplitudes_mut().iter_mut().enumerate() {
            if idx & 0b111 != 0 {
                *amp = -*amp;
            }
        }
        b.h_range(&QubitRange::new(0, 3)).unwrap();
        assert!(euclidean_distance(&a, &b).unwrap() < 1e-12);
        // the generic path, exercised on an offset register
        let mut c1 = s.clone();
        c1.invert_about_mean(&QubitRange::new(2, 3)).unwrap();
        assert!(c1.is_normalized());
    }
}
