use rand::RngCore;

use super::oracle::{apply_xor_oracle, OracleTable};
use super::state::{QubitRange, StateVector, DEFAULT_QUBIT_CAP};
use super::trace::QueryTrace;
use crate::error::{Error, Result};

/// ⌊(π/4)·√(N/M)⌋
pub fn grover_iterations(n: u64, marked: u64) -> u64 {
    if marked == 0 {
        return 0;
    }
    (std::f64::consts::FRAC_PI_4 * (n as f64 / marked as f64).sqrt()).floor() as u64
}

/// sin²((2k+1)θ) with θ = arcsin √(M/N).
pub fn grover_success_probability(n: u64, marked: u64, k: u64) -> f64 {
    let theta = (marked as f64 / n as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

fn check_indicator(indicator: &OracleTable) -> Result<usize> {
    if indicator.range() != 2 {
        return Err(Error::WidthMismatch {
            expected: 2,
            got: indicator.range(),
        });
    }
    let n = indicator.in_bits() as usize;
    if n + 1 > DEFAULT_QUBIT_CAP {
        return Err(Error::TooManyQubits {
            what: "grover search",
            requested: n + 1,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    Ok(n)
}

/// State after `k` Grover iterations, before measurement. The search
/// register is qubits `0..n`; qubit `n` is an ancilla held in |−⟩ so the
/// XOR oracle acts as a phase flip.
pub fn grover_state(indicator: &OracleTable, k: u64) -> Result<(StateVector, QueryTrace)> {
    let n = check_indicator(indicator)?;
    let search = QubitRange::new(0, n);
    let ancilla = QubitRange::new(n, 1);
    let mut state = StateVector::zero(n + 1)?;
    state.h_range(&search)?;
    state.x(n)?;
    state.h(n)?;
    let mut trace = QueryTrace::full();
    for _ in 0..k {
        apply_xor_oracle(&mut state, indicator, &search, &ancilla, &mut trace)?;
        state.invert_about_mean(&search)?;
    }
    Ok((state, trace))
}

/// Run `k` iterations and measure the search register. Works with zero
/// marked elements (the outcome is then uniform).
pub fn amplify(indicator: &OracleTable, k: u64, rng: &mut dyn RngCore) -> Result<(u64, QueryTrace)> {
    let (mut state, trace) = grover_state(indicator, k)?;
    let outcome = state.measure(&QubitRange::new(0, indicator.in_bits() as usize), rng)?;
    Ok((outcome, trace))
}

pub fn grover_search(indicator: &OracleTable, k: u64, rng: &mut dyn RngCore) -> Result<(u64, QueryTrace)> {
    check_indicator(indicator)?;
    if indicator.rows().iter().all(|&v| v == 0) {
        return Err(Error::NoMarkedElement);
    }
    amplify(indicator, k, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn n4_single_iteration_is_exact() {
        let t = OracleTable::from_rows(2, 2, vec![0, 0, 1, 0]).unwrap();
        let (s, trace) = grover_state(&t, 1).unwrap();
        let p = s.register_probabilities(&QubitRange::new(0, 2)).unwrap();
        assert!((p[2] - 1.0).abs() < 1e-12);
        assert_eq!(trace.len(), 1);
        // amplitude on |2⟩|−⟩ is ±1/√2 per ancilla branch
        let a0 = s.amplitudes()[0b010].norm();
        let a1 = s.amplitudes()[0b110].norm();
        assert!((a0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((a1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn all_marked_always_succeeds() {
        let t = OracleTable::from_rows(1, 2, vec![1, 1]).unwrap();
        let mut rng = stream(1);
        for k in 0..5 {
            let (x, _) = grover_search(&t, k, &mut rng).unwrap();
            assert!(x < 2);
            let (s, _) = grover_state(&t, k).unwrap();
            assert!(s.is_normalized());
        }
    }

    #[test]
    fn no_marked_is_an_error() {
        let t = OracleTable::from_rows(2, 2, vec![0; 4]).unwrap();
        assert_eq!(grover_search(&t, 1, &mut stream(0)), Err(Error::NoMarkedElement));
        assert!(amplify(&t, 1, &mut stream(0)).is_ok());
    }

    #[test]
    fn exact_state_matches_closed_form() {
        for (n_bits, marked, k) in [(4u32, 1usize, 3u64), (6, 3, 2), (8, 5, 4)] {
            let n = 1u64 << n_bits;
            let t = OracleTable::from_fn(n_bits, 2, |x| (x < marked as u64) as u64).unwrap();
            let (s, _) = grover_state(&t, k).unwrap();
            let mass = s.mass_where(&QubitRange::new(0, n_bits as usize), |x| x < marked as u64).unwrap();
            assert!((mass - grover_success_probability(n, marked as u64, k)).abs() < 1e-10);
        }
        assert!((grover_success_probability(16, 1, 3) - 0.961_318_969_726_562_5).abs() < 1e-9);
    }

    #[test]
    fn iteration_helper() {
        assert_eq!(grover_iterations(4, 1), 1);
        assert_eq!(grover_iterations(16, 1), 3);
        assert_eq!(grover_iterations(1024, 1), 25);
        assert_eq!(grover_iterations(8, 0), 0);
    }
}
