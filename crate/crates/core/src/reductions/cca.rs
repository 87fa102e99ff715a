//! The hybrid-encryption CCA proof as two runnable experiments: B_F, which
//! inverts f by measuring a random oracle query, and B_ES, which forwards
//! to a symmetric-scheme challenger.
//!
//! In Game 1 the oracle is O_quant(x) = O_q(f(x)) and decryption of (y′, c′)
//! uses k when y′ = y (Case 1) and O_q(y′) otherwise (Case 2). Adversaries
//! are scripts over qsim plus a list of classical decryption queries; the
//! script's `xor_target` step is handed r.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primitives::{table_tdp_gen, TableTdp};
use crate::qsim::script::Script;
use crate::qsim::{OracleTable, QueryTrace};
use crate::rng::{derive, derive_tag, stream};
use crate::schemes::SymmetricScheme;
use crate::stats::Rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecQuery {
    /// Case 1: the challenge's y with a fresh body.
    SameY,
    /// Case 2: some other y′.
    OtherY,
}

#[derive(Debug, Clone)]
pub struct CcaAdversary {
    pub script: Script,
    pub decryptions: Vec<DecQuery>,
}

impl CcaAdversary {
    pub fn passive(script: Script) -> Self {
        Self {
            script,
            decryptions: Vec::new(),
        }
    }
}

/// Everything the adversary sees, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcaTranscript {
    pub y: u64,
    pub decryptions: Vec<(u64, Vec<u8>, Option<u64>)>,
    pub challenge: (u64, u64),
    pub challenge_body: Vec<u8>,
    pub final_probs: Vec<f64>,
    pub guess: u64,
}

struct Setup {
    tdp: TableTdp,
    r: u64,
    y: u64,
    k: u64,
    b: bool,
    oq: OracleTable,
    quant: OracleTable,
}

fn setup(script: &Script, key_bits: u32, seed: u64) -> Result<Setup> {
    let bits = script.in_bits as u32;
    if script.out_bits as u32 != key_bits {
        return Err(Error::WidthMismatch {
            expected: key_bits as u64,
            got: script.out_bits as u64,
        });
    }
    let tdp = table_tdp_gen(bits, &mut stream(derive_tag(seed, "tdp")))?;
    let r = stream(derive_tag(seed, "r")).gen_range(0..tdp.domain_size());
    let y = tdp.f(r)?;
    let k = stream(derive_tag(seed, "k")).gen_range(0..1u64 << key_bits);
    let b = stream(derive_tag(seed, "b")).gen();
    let oq = OracleTable::uniform(bits, key_bits, &mut stream(derive_tag(seed, "oq")))?;
    let quant = OracleTable::from_fn(bits, 1 << key_bits, |x| oq.get(tdp.f(x).expect("x in domain")))?;
    Ok(Setup {
        tdp,
        r,
        y,
        k,
        b,
        oq,
        quant,
    })
}

/// Game 1 with the Case-1 decryptions and the challenge delegated to the
/// given closures; everything else is answered here.
fn play(
    adv: &CcaAdversary,
    sym: &dyn SymmetricScheme,
    st: &Setup,
    seed: u64,
    case1: &mut dyn FnMut(&[u8]) -> Option<u64>,
    challenge: &mut dyn FnMut(u64, u64) -> Result<Vec<u8>>,
) -> Result<CcaTranscript> {
    let mut rng = stream(derive_tag(seed, "adv"));
    let n = st.tdp.domain_size();
    let msg_space = 1u64 << sym.msg_bits();
    let mut decryptions = Vec::new();
    for q in &adv.decryptions {
        let y2 = match q {
            DecQuery::SameY => st.y,
            DecQuery::OtherY => (st.y + rng.gen_range(1..n)) % n,
        };
        let key = rng.gen_range(0..1u64 << sym.key_bits());
        let body = sym.enc(key, rng.gen_range(0..msg_space), &mut rng)?;
        let answer = if y2 == st.y {
            case1(&body)
        } else {
            sym.dec(st.oq.get(y2), &body).ok()
        };
        decryptions.push((y2, body, answer));
    }
    let m0 = rng.gen_range(0..msg_space);
    let m1 = (m0 + rng.gen_range(1..msg_space.max(2))) % msg_space;
    let challenge_body = challenge(m0, m1)?;

    let mut trace = QueryTrace::full();
    let mut state = adv.script.run(&st.quant, st.r, &mut trace)?;
    let final_probs = state.probabilities();
    let out = adv.script.output();
    let guess = state.measure(&out, &mut rng as &mut dyn RngCore)? & 1;
    Ok(CcaTranscript {
        y: st.y,
        decryptions,
        challenge: (m0, m1),
        challenge_body,
        final_probs,
        guess,
    })
}

fn enc_coins(seed: u64) -> crate::rng::Stream {
    stream(derive_tag(seed, "enc"))
}

/// The Game-1 challenger run directly.
pub fn game1_transcript(adv: &CcaAdversary, sym: &dyn SymmetricScheme, seed: u64) -> Result<CcaTranscript> {
    let st = setup(&adv.script, sym.key_bits(), seed)?;
    let (k, b) = (st.k, st.b);
    play(
        adv,
        sym,
        &st,
        seed,
        &mut |c| sym.dec(k, c).ok(),
        &mut |m0, m1| sym.enc(k, if b { m1 } else { m0 }, &mut enc_coins(seed)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardingOutcome {
    pub transcript_equal: bool,
    pub sym_decrypt_queries: usize,
    pub sym_challenge_queries: usize,
    pub guess_correct: bool,
}

/// Runs B_ES: Case-1 decryptions and the challenge go to a symmetric-scheme
/// challenger holding (k, b). The adversary's view must equal the direct
/// Game-1 run with the same seed.
pub fn cca_symmetric_forwarding_experiment(
    adv: &CcaAdversary,
    sym: &dyn SymmetricScheme,
    seed: u64,
) -> Result<ForwardingOutcome> {
    let st = setup(&adv.script, sym.key_bits(), seed)?;
    // The symmetric challenger's secrets; B_ES never reads them.
    let (k, b) = (st.k, st.b);
    let mut dec_count = 0usize;
    let mut ch_count = 0usize;
    let forwarded = play(
        adv,
        sym,
        &st,
        seed,
        &mut |c| {
            dec_count += 1;
            sym.dec(k, c).ok()
        },
        &mut |m0, m1| {
            ch_count += 1;
            sym.enc(k, if b { m1 } else { m0 }, &mut enc_coins(seed))
        },
    )?;
    let direct = game1_transcript(adv, sym, seed)?;
    if forwarded != direct {
        let at = forwarded
            .decryptions
            .iter()
            .zip(&direct.decryptions)
            .position(|(a, b)| a != b)
            .unwrap_or(forwarded.decryptions.len());
        return Err(Error::TranscriptDivergence(at));
    }
    Ok(ForwardingOutcome {
        transcript_equal: true,
        sym_decrypt_queries: dec_count,
        sym_challenge_queries: ch_count,
        guess_correct: (forwarded.guess == 1) == b,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionStats {
    pub script: String,
    pub queries: usize,
    pub trials: usize,
    /// Mean over trials of the total query probability of r.
    pub eps: f64,
    pub expected: f64,
    pub rate: Rate,
    pub z_score: f64,
}

impl ExtractionStats {
    pub fn within(&self, k: f64) -> bool {
        self.rate.within(self.expected, k)
    }
}

/// Runs Game 1 to measure ε from the query trace, and independently runs
/// B_F (stop at a uniform query i, measure the input register) to get the
/// empirical inversion rate.
pub fn cca_inverter_experiment(
    adv: &CcaAdversary,
    sym: &dyn SymmetricScheme,
    q: usize,
    trials: usize,
    seed: u64,
) -> Result<ExtractionStats> {
    let made = adv.script.queries();
    if made > q {
        return Err(Error::QueryBudget { budget: q });
    }
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let per: Vec<(f64, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, bool)> {
            let s = derive(seed, i);
            let st = setup(&adv.script, sym.key_bits(), s)?;
            let mut trace = QueryTrace::full();
            adv.script.run(&st.quant, st.r, &mut trace)?;
            let eps = trace.total_mass(&[st.r]).ok_or(Error::InvalidParameter("trace missing r".into()))?;

            let mut rng = stream(derive_tag(s, "bf"));
            let pick = rng.gen_range(0..q);
            if pick >= made {
                return Ok((eps, false));
            }
            let mut state =
                adv.script
                    .execute(&|_| &st.quant, st.r, &mut QueryTrace::full(), Some(pick))?;
            let guess = state.measure(&adv.script.input(), &mut rng)?;
            Ok((eps, guess == st.r && st.tdp.f(guess)? == st.y))
        })
        .collect::<Result<_>>()?;
    let eps = per.iter().map(|p| p.0).sum::<f64>() / trials.max(1) as f64;
    let hits = per.iter().filter(|p| p.1).count();
    let rate = Rate::new(hits, trials);
    let expected = eps / q as f64;
    let sigma = rate.sigma_at(expected);
    let z_score = if sigma > 0.0 {
        (rate.value() - expected) / sigma
    } else if rate.value() == expected {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ExtractionStats {
        script: adv.script.name.clone(),
        queries: q,
        trials,
        eps,
        expected,
        rate,
        z_score,
    })
}
