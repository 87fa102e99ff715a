use std::collections::HashSet;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use super::{oc_for, replay_rand, HistoryFreeReduction, RandOracle, Solution};
use crate::error::{Error, Result};
use crate::rng::{derive, derive_tag, stream};
use crate::schemes::SignatureScheme;
use crate::stats::Rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForgeStrategy {
    /// Signs a fresh message with the trapdoor.
    Trapdoor,
    /// Hands back a signature it obtained from the signing oracle.
    ResignQueried,
}

/// A forger that holds the real secret key. It asks for `q_sign` signatures
/// on distinct random messages, then forges on a fresh one.
pub struct PlantedForger<'a> {
    pub signer: &'a dyn SignatureScheme,
    pub q_sign: usize,
    pub strategy: ForgeStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameOutcome {
    pub aborted: bool,
    pub aborted_in_sign: bool,
    pub aborted_in_finish: bool,
    pub forgery: Option<(u64, u64)>,
    pub forgery_valid: bool,
    /// The forged message was never sent to the signing oracle.
    pub fresh_message: bool,
    pub solution: Option<Solution>,
    pub challenger_accepts: bool,
    pub sign_queries: usize,
    /// Signing answers that failed to verify under O = RAND.
    pub sign_inconsistent: usize,
    pub hash_queries: usize,
    pub rand_log: Vec<(u64, u64)>,
    /// Logged rand answers that differ on isolated replay.
    pub replay_mismatches: usize,
}

/// One run of the four-step protocol with O_c seeded from `seed`.
pub fn run_signature_game(
    reduction: &dyn HistoryFreeReduction,
    forger: &PlantedForger,
    seed: u64,
) -> Result<GameOutcome> {
    let oc = oc_for(derive_tag(seed, "oc"));
    let oracle = RandOracle::new(reduction, &oc);
    let mut rng = stream(derive_tag(seed, "forger"));

    let bits = reduction.msg_bits();
    let space = 1usize << bits;
    if forger.q_sign + 1 > space {
        return Err(Error::InvalidParameter(format!("{} queries in a space of {space}", forger.q_sign)));
    }
    let picks = sample(&mut rng, space, forger.q_sign + 1).into_vec();
    let (queries, target) = (&picks[..forger.q_sign], picks[forger.q_sign] as u64);

    let mut out = GameOutcome {
        aborted: false,
        aborted_in_sign: false,
        aborted_in_finish: false,
        forgery: None,
        forgery_valid: false,
        fresh_message: false,
        solution: None,
        challenger_accepts: false,
        sign_queries: 0,
        sign_inconsistent: 0,
        hash_queries: 0,
        rand_log: Vec::new(),
        replay_mismatches: 0,
    };
    let mut signed = HashSet::new();
    let mut first_sig = None;
    for &m in queries {
        let m = m as u64;
        out.sign_queries += 1;
        match reduction.sign(m, &oc)? {
            None => {
                out.aborted = true;
                out.aborted_in_sign = true;
                break;
            }
            Some(s) => {
                if !reduction.verify_signature(m, s, &oracle)? {
                    out.sign_inconsistent += 1;
                }
                signed.insert(m);
                first_sig.get_or_insert((m, s));
            }
        }
    }

    if !out.aborted {
        let forgery = match forger.strategy {
            ForgeStrategy::Trapdoor => {
                let before = oracle.log().len();
                let s = forger.signer.sign(target, &oracle, &mut rng)?;
                out.hash_queries = oracle.log().len() - before;
                Some((target, s))
            }
            ForgeStrategy::ResignQueried => first_sig,
        };
        if let Some((m, s)) = forgery {
            out.forgery = Some((m, s));
            out.fresh_message = !signed.contains(&m);
            out.forgery_valid = out.fresh_message && reduction.verify_signature(m, s, &oracle)?;
            if out.forgery_valid {
                match reduction.finish(m, s, &oc)? {
                    None => {
                        out.aborted = true;
                        out.aborted_in_finish = true;
                    }
                    Some(sol) => {
                        out.challenger_accepts = reduction.verify_solution(&sol);
                        out.solution = Some(sol);
                    }
                }
            }
        }
    }

    out.rand_log = oracle.log();
    out.replay_mismatches = replay_rand(reduction, &oc, &out.rand_log)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTally {
    pub reduction: String,
    pub games: usize,
    pub q_sign: usize,
    pub no_abort_sign: Rate,
    pub valid_forgeries: usize,
    /// Among games with a valid forgery, how often the challenger accepted.
    pub conversion: Rate,
    pub accepted: Rate,
    pub sign_inconsistent: usize,
    pub rand_queries_replayed: usize,
    pub replay_mismatches: usize,
}

/// `games` independent runs with seeds `derive(seed, i)`.
pub fn run_games(
    reduction: &dyn HistoryFreeReduction,
    forger: &PlantedForger,
    games: usize,
    seed: u64,
) -> Result<GameTally> {
    let outcomes: Vec<GameOutcome> = (0..games as u64)
        .into_par_iter()
        .map(|i| run_signature_game(reduction, forger, derive(seed, i)))
        .collect::<Result<_>>()?;
    let no_abort = outcomes.iter().filter(|o| !o.aborted_in_sign).count();
    let valid = outcomes.iter().filter(|o| o.forgery_valid).count();
    let accepted = outcomes.iter().filter(|o| o.challenger_accepts).count();
    Ok(GameTally {
        reduction: reduction.name().to_string(),
        games,
        q_sign: forger.q_sign,
        no_abort_sign: Rate::new(no_abort, games),
        valid_forgeries: valid,
        conversion: Rate::new(accepted, valid),
        accepted: Rate::new(accepted, games),
        sign_inconsistent: outcomes.iter().map(|o| o.sign_inconsistent).sum(),
        rand_queries_replayed: outcomes.iter().map(|o| o.rand_log.len()).sum(),
        replay_mismatches: outcomes.iter().map(|o| o.replay_mismatches).sum(),
    })
}

