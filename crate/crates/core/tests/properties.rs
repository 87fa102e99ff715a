use num_complex::Complex64;
use proptest::prelude::*;
use qrom_core::primitives::{
    psf_from_clawfree, table_psf_gen, table_psf_skewed, table_tdp_gen, ClassicalRO, ClawFree, Psf, TableClawFree,
};
use qrom_core::qsim::lemmas::{lemma1_case, random_state_pair};
use qrom_core::qsim::script::random_script;
use qrom_core::qsim::{
    apply_xor_oracle, euclidean_distance, grover_state, grover_success_probability, total_variation, Codomain,
    Distribution, Oracle, OracleTable, QubitRange, QueryTrace, StateVector,
};
use qrom_core::reductions::{oc_for, ClawFreeFdhReduction, HistoryFreeReduction, KatzWangReduction};
use qrom_core::rng::stream;
use qrom_core::schemes::{Br, EncryptionScheme, Hybrid, OneTimePad, SymmetricScheme};
use rand::seq::SliceRandom;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn scripts_preserve_norm(seed: u64, queries in 0usize..4) {
        let mut rng = stream(seed);
        let s = random_script(&mut rng, 3, 2, queries, 4);
        let o = OracleTable::uniform(3, 2, &mut rng).unwrap();
        let mut trace = QueryTrace::full();
        let st = s.run(&o, 0, &mut trace).unwrap();
        prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert_eq!(trace.len(), queries);
        for t in 0..queries {
            prop_assert!((trace.entry_total(t).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn xor_oracle_is_an_involution(seed: u64) {
        let mut rng = stream(seed);
        let (a, _) = random_state_pair(&mut rng, 5).unwrap();
        let o = OracleTable::uniform(3, 2, &mut rng).unwrap();
        let (inp, out) = (QubitRange::new(0, 3), QubitRange::new(3, 2));
        let mut b = a.clone();
        let mut tr = QueryTrace::full();
        apply_xor_oracle(&mut b, &o, &inp, &out, &mut tr).unwrap();
        apply_xor_oracle(&mut b, &o, &inp, &out, &mut tr).unwrap();
        prop_assert!(euclidean_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn tv_is_a_metric_with_range_0_to_2(seed: u64, len in 2usize..16) {
        let mut rng = stream(seed);
        let mut draw = || {
            let w: Vec<f64> = (0..len).map(|_| rand::Rng::gen::<f64>(&mut rng)).collect();
            let s: f64 = w.iter().sum();
            Distribution::new(w.into_iter().map(|x| x / s).collect()).unwrap()
        };
        let (a, b, c) = (draw(), draw(), draw());
        let ab = total_variation(&a, &b).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
        prop_assert!((ab - total_variation(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!(ab <= total_variation(&a, &c).unwrap() + total_variation(&c, &b).unwrap() + 1e-12);
        prop_assert_eq!(total_variation(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn lemma1_holds(seed: u64) {
        let c = lemma1_case(&mut stream(seed)).unwrap();
        prop_assert!(c.tv <= 4.0 * c.distance + 1e-6);
    }

    #[test]
    fn grover_amplitudes_match_closed_form(n in 2u32..7, k in 0u64..5, seed: u64) {
        let mut rng = stream(seed);
        let marked: Vec<u64> = {
            let mut xs: Vec<u64> = (0..1u64 << n).collect();
            xs.shuffle(&mut rng);
            xs.truncate(1 + (seed % 3) as usize);
            xs
        };
        let ind = OracleTable::from_fn(n, 2, |x| marked.contains(&x) as u64).unwrap();
        let (st, _) = grover_state(&ind, k).unwrap();
        let p = st.mass_where(&QubitRange::new(0, n as usize), |x| marked.contains(&x)).unwrap();
        let want = grover_success_probability(1 << n, marked.len() as u64, k);
        prop_assert!((p - want).abs() < 1e-9, "{} vs {}", p, want);
    }

    #[test]
    fn table_serialization_round_trips(seed: u64, in_bits in 0u32..8, range in 1u64..300) {
        let t = OracleTable::uniform_range(in_bits, range, &mut stream(seed)).unwrap();
        prop_assert_eq!(OracleTable::from_json(&t.to_json()).unwrap(), t.clone());
        prop_assert_eq!(OracleTable::from_bytes(&t.to_bytes()).unwrap(), t);
    }

    #[test]
    fn tdp_round_trip(seed: u64, bits in 1u32..11) {
        let t = table_tdp_gen(bits, &mut stream(seed)).unwrap();
        let mut seen = vec![false; 1 << bits];
        for x in 0..1u64 << bits {
            let y = t.f(x).unwrap();
            prop_assert!(!seen[y as usize]);
            seen[y as usize] = true;
            prop_assert_eq!(t.f_inv(y).unwrap(), x);
        }
    }

    #[test]
    fn psf_regularity_and_preimages(seed: u64, r in 1u32..6, e in 0u32..4) {
        let p = table_psf_gen(r + e, r, &mut stream(seed)).unwrap();
        let mut rng = stream(seed ^ 1);
        for y in 0..1u64 << r {
            prop_assert_eq!(p.preimage_count(y), 1usize << e);
            prop_assert_eq!(p.eval(p.preimage(y, &mut rng).unwrap()).unwrap(), y);
        }
    }

    #[test]
    fn eps_sample_is_reported_honestly(seed: u64, eps in 0.0f64..0.2) {
        let p = table_psf_skewed(6, 2, eps, &mut stream(seed)).unwrap();
        let mut img = vec![0.0; 4];
        for (x, w) in p.sample_weights().into_iter().enumerate() {
            img[p.eval(x as u64).unwrap() as usize] += w;
        }
        let d = total_variation(&Distribution::new(img).unwrap(), &Distribution::uniform(4)).unwrap();
        prop_assert!(d <= p.eps_sample() + 1e-12);
    }

    #[test]
    fn claw_verifier_is_sound(seed: u64, size in 2u64..40) {
        let c = TableClawFree::random(size, &mut stream(seed));
        let psf = psf_from_clawfree(c.clone());
        for x1 in 0..size {
            for x2 in 0..size {
                prop_assert_eq!(c.is_claw(x1, x2), c.f1(x1).unwrap() == c.f2(x2).unwrap());
            }
        }
        for a in 0..2 * size {
            for b in 0..2 * size {
                if psf.is_collision(a, b) {
                    let (x1, x2) = psf.claw_from_collision(a, b).unwrap();
                    prop_assert!(c.is_claw(x1, x2));
                }
            }
        }
    }

    #[test]
    fn lazy_oracle_is_interleaving_independent(seed: u64, order_seed: u64) {
        let ro = ClassicalRO::lazy(6, Codomain::bits(8), seed);
        let mut xs: Vec<u64> = (0..64).chain(0..64).collect();
        xs.shuffle(&mut stream(order_seed));
        let first: Vec<u64> = xs.iter().map(|&x| ro.query(x).unwrap()).collect();
        let table = ro.as_table().unwrap();
        for (&x, v) in xs.iter().zip(first) {
            prop_assert_eq!(table.get(x), v);
        }
    }

    #[test]
    fn rand_is_history_free_under_any_order(seed: u64, order_seed: u64) {
        let pair = TableClawFree::random(50, &mut stream(seed));
        let coron = ClawFreeFdhReduction::start(pair.clone(), 3, 8).unwrap().1;
        let kw = KatzWangReduction::start(pair, 8).unwrap().1;
        let reds: [&dyn HistoryFreeReduction; 2] = [&coron, &kw];
        for red in reds {
            let oc = oc_for(seed);
            let mut rs: Vec<u64> = (0..1u64 << red.oracle_in_bits()).collect();
            let reference: Vec<u64> = rs.iter().map(|&r| red.rand(r, &oc.fresh_view()).unwrap()).collect();
            rs.shuffle(&mut stream(order_seed));
            for &r in &rs {
                let _ = red.sign(r & 0xff, &oc).unwrap();
                prop_assert_eq!(red.rand(r, &oc).unwrap(), reference[r as usize]);
            }
        }
    }

    #[test]
    fn encryption_round_trips(seed: u64, m in 0u64..1 << 10) {
        let br = Br::keygen(8, 10, seed).unwrap();
        let hy = Hybrid { tdp: br.tdp.clone(), sym: OneTimePad { bits: 10 } };
        let o = ClassicalRO::lazy(8, Codomain::bits(10), seed ^ 5);
        let c = br.encrypt(m, &o, &mut stream(seed)).unwrap();
        prop_assert_eq!(br.decrypt(&c, &o).unwrap(), m);
        prop_assert_eq!(hy.encrypt(m, &o, &mut stream(seed)).unwrap(), c);
        let otp = OneTimePad { bits: 10 };
        let k = seed & 0x3ff;
        let once = otp.enc(k, m, &mut stream(0)).unwrap();
        let twice = otp.enc(k, otp.dec(0, &once).unwrap(), &mut stream(0)).unwrap();
        prop_assert_eq!(otp.dec(0, &twice).unwrap(), m);
    }
}

#[test]
fn grover_n4_single_marked_is_exact_in_amplitude() {
    let ind = OracleTable::from_fn(2, 2, |x| (x == 2) as u64).unwrap();
    let (st, _) = grover_state(&ind, 1).unwrap();
    let amp: Complex64 = (0..2)
        .map(|anc| st.amplitudes()[2 | (anc << 2)] * if anc == 0 { 1.0 } else { -1.0 })
        .sum::<Complex64>()
        / 2f64.sqrt();
    assert!((amp.norm() - 1.0).abs() < 1e-9);
    let p: f64 = st.probabilities().iter().enumerate().filter(|(i, _)| i & 3 == 2).map(|(_, p)| p).sum();
    assert!((p - 1.0).abs() < 1e-9);
}

#[test]
fn state_vector_rejects_bad_input() {
    assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]).is_err());
    assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).is_err());
}
