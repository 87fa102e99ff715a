use anyhow::Result;
use clap::Args;
use qrom_core::primitives::{gmr_clawfree_gen, psf_from_clawfree, table_psf_gen, ClassicalRO};
use qrom_core::qsim::script::adversary_corpus;
use qrom_core::qsim::Codomain;
use qrom_core::reductions::{
    cca_inverter_experiment, cca_symmetric_forwarding_experiment, CcaAdversary, DecQuery, ExtractionStats,
};
use qrom_core::rng::{derive, derive_tag, stream};
use qrom_core::schemes::{
    AuthXor, Br, ClawFreeFdh, EncryptionScheme, Fdh, FdhPsf, Hybrid, KatzWang, OneTimePad, SignatureScheme,
};
use rand::Rng;
use serde_json::json;

use crate::prehash::prehash;
use crate::report::{emit, Row};
use crate::Common;

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// Messages per correctness corpus.
    #[arg(long, default_value_t = 1000)]
    pub messages: usize,
    /// Seeds for the forwarding experiment.
    #[arg(long, default_value_t = 100)]
    pub forwarding_seeds: u64,
}

fn corpus(bits: u32, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = stream(seed);
    (0..n).map(|_| rng.gen_range(0..1u64 << bits)).collect()
}

/// Verify rate under a lazy oracle, and whether signing against the
/// materialized table of that oracle gives the same signatures.
fn signature_rows(s: &dyn SignatureScheme, label: &str, n: usize, seed: u64) -> Result<Vec<Row>> {
    let lazy = ClassicalRO::lazy(s.oracle_in_bits(), s.oracle_codomain(), derive_tag(seed, "oracle"));
    let sealed = ClassicalRO::sealed(lazy.as_table()?);
    let msgs = corpus(s.msg_bits(), n, derive_tag(seed, label));
    let (mut ok, mut same) = (0, 0);
    for (i, &m) in msgs.iter().enumerate() {
        let coins = derive(seed, i as u64);
        let a = s.sign(m, &lazy, &mut stream(coins))?;
        let b = s.sign(m, &sealed, &mut stream(coins))?;
        ok += s.verify(m, a, &lazy)? as usize;
        same += (a == b && s.verify(m, b, &sealed)?) as usize;
    }
    let params = format!("msg_bits={}", s.msg_bits());
    Ok(vec![
        Row::new("correctness", &format!("{label}-verify"), params.clone()).equal(1.0, ok as f64 / n as f64, n),
        Row::new("backend", &format!("{label}-lazy-eq-table"), params).equal(1.0, same as f64 / n as f64, n),
    ])
}

fn encryption_row(e: &dyn EncryptionScheme, label: &str, n: usize, seed: u64) -> Result<Row> {
    let o = ClassicalRO::lazy(e.oracle_in_bits(), e.oracle_codomain(), derive_tag(seed, "oracle"));
    let msgs = corpus(e.msg_bits(), n, derive_tag(seed, label));
    let mut rng = stream(derive_tag(seed, "coins"));
    let mut ok = 0;
    for &m in &msgs {
        let c = e.encrypt(m, &o, &mut rng)?;
        ok += (e.decrypt(&c, &o)? == m) as usize;
    }
    Ok(Row::new("correctness", &format!("{label}-decrypt"), format!("msg_bits={}", e.msg_bits()))
        .equal(1.0, ok as f64 / n as f64, n))
}

pub fn correctness_rows(n: usize, seed: u64) -> Result<Vec<Row>> {
    let pair = gmr_clawfree_gen(16, &mut stream(derive_tag(seed, "gmr")))?;
    let mut rows = Vec::new();
    rows.extend(signature_rows(&Fdh::keygen(12, 10, derive_tag(seed, "fdh"))?, "fdh", n, seed)?);
    let table = table_psf_gen(10, 6, &mut stream(derive_tag(seed, "psf")))?;
    rows.extend(signature_rows(&FdhPsf::new(table, 5, 12), "fdh-psf-table", n, seed)?);
    rows.extend(signature_rows(&FdhPsf::new(psf_from_clawfree(pair.clone()), 6, 12), "fdh-psf-clawfree", n, seed)?);
    rows.extend(signature_rows(&ClawFreeFdh { pair: pair.clone(), msg_bits: 12 }, "clawfree-fdh", n, seed)?);
    rows.extend(signature_rows(&KatzWang { pair, msg_bits: 12 }, "katz-wang", n, seed)?);

    let br = Br::keygen(12, 16, derive_tag(seed, "br"))?;
    rows.push(encryption_row(&br, "br", n, seed)?);
    let otp = Hybrid { tdp: br.tdp.clone(), sym: OneTimePad { bits: 16 } };
    rows.push(encryption_row(&otp, "hybrid-otp", n, seed)?);
    let auth = Hybrid::keygen(12, AuthXor { key_bits: 16, msg_bits: 12 }, derive_tag(seed, "hybrid"))?;
    rows.push(encryption_row(&auth, "hybrid-authxor", n, seed)?);

    // same coins, same oracle: BR and hybrid-with-OTP bytes
    let o = ClassicalRO::lazy(12, Codomain::bits(16), derive_tag(seed, "oracle"));
    let mut same = 0;
    for (i, &m) in corpus(16, n, derive_tag(seed, "equiv")).iter().enumerate() {
        let coins = derive(derive_tag(seed, "equiv-coins"), i as u64);
        let a = br.encrypt(m, &o, &mut stream(coins))?;
        let b = otp.encrypt(m, &o, &mut stream(coins))?;
        same += (a.to_bytes() == b.to_bytes()) as usize;
    }
    rows.push(Row::new("backend", "hybrid-otp-bytes-eq-br", "msg_bits=16").equal(1.0, same as f64 / n as f64, n));

    // byte strings of assorted lengths, signed through the prehash
    let fdh = Fdh::keygen(12, 10, derive_tag(seed, "fdh"))?;
    let o = ClassicalRO::lazy(10, fdh.oracle_codomain(), derive_tag(seed, "oracle"));
    let mut rng = stream(derive_tag(seed, "prehash"));
    let mut ok = 0;
    for i in 0..n {
        let msg: Vec<u8> = (0..i % 97).map(|_| rng.gen()).collect();
        let m = prehash(&msg, fdh.msg_bits());
        let sig = fdh.sign(m, &o, &mut rng)?;
        ok += fdh.verify(prehash(&msg, fdh.msg_bits()), sig, &o)? as usize;
    }
    rows.push(Row::new("correctness", "fdh-prehashed-verify", "lengths 0..96 bytes").equal(1.0, ok as f64 / n as f64, n));
    Ok(rows)
}

pub fn extraction_rows(trials: usize, seed: u64) -> Result<(Vec<Row>, Vec<ExtractionStats>)> {
    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for script in adversary_corpus() {
        let q = script.queries();
        let adv = CcaAdversary::passive(script);
        let st = cca_inverter_experiment(&adv, &OneTimePad { bits: 2 }, q, trials, derive_tag(seed, &adv.script.name))?;
        rows.push(
            Row::new("extraction", "eps-over-q", format!("script={}, q={q}, eps={:.6}", st.script, st.eps)).within(
                st.expected,
                st.rate.value(),
                st.rate.sigma_at(st.expected),
                trials,
            ),
        );
        stats.push(st);
    }
    Ok((rows, stats))
}

pub fn forwarding_rows(seeds: u64, seed: u64) -> Result<Vec<Row>> {
    let script = adversary_corpus().remove(1);
    let advs = [
        ("passive", CcaAdversary::passive(script.clone())),
        (
            "active",
            CcaAdversary {
                script,
                decryptions: vec![DecQuery::SameY, DecQuery::OtherY, DecQuery::SameY],
            },
        ),
    ];
    let mut rows = Vec::new();
    for (label, adv) in &advs {
        for (sym_name, sym) in [
            ("otp", Box::new(OneTimePad { bits: 2 }) as Box<dyn qrom_core::schemes::SymmetricScheme>),
            ("authxor", Box::new(AuthXor { key_bits: 2, msg_bits: 8 })),
        ] {
            let mut equal = 0;
            for i in 0..seeds {
                let o = cca_symmetric_forwarding_experiment(adv, sym.as_ref(), derive(seed, i))?;
                equal += o.transcript_equal as usize;
            }
            rows.push(
                Row::new("forwarding", "transcript-eq-game1", format!("adversary={label}, sym={sym_name}")).equal(
                    1.0,
                    equal as f64 / seeds as f64,
                    seeds as usize,
                ),
            );
        }
    }
    Ok(rows)
}

pub fn run(common: &Common, args: &DemoArgs) -> Result<bool> {
    anyhow::ensure!(args.messages > 0 && args.forwarding_seeds > 0, "corpus sizes must be positive");
    let trials = common.trials.unwrap_or(10_000);
    let mut rows = correctness_rows(args.messages, common.seed)?;
    let (ext, stats) = extraction_rows(trials, common.seed)?;
    rows.extend(ext);
    rows.extend(forwarding_rows(args.forwarding_seeds, common.seed)?);
    let params = json!({
        "messages": args.messages,
        "extraction_trials": trials,
        "forwarding_seeds": args.forwarding_seeds,
    });
    emit(common, "crypto-demo", params, &rows, json!({ "extraction": stats }))
}
