use anyhow::Result;
use clap::Args;
use qrom_core::qsim::lemmas::{
    geometric_row, lemma1_row, lemma2_rows, near_uniform_row, preimage_row, LemmaRow,
};
use qrom_core::qsim::script::distinguisher_corpus;
use serde_json::json;

use crate::report::{emit, Check, Row};
use crate::Common;

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// Multiplies the ε fed into the perturbation bound. Values below 1
    /// misreport ε and are expected to fail.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon_scale: f64,
    /// Random oracles per preimage-mass row.
    #[arg(long, default_value_t = 500)]
    pub oracles: usize,
}

fn to_row(r: LemmaRow) -> Row {
    Row {
        section: "lemmas".into(),
        name: r.lemma,
        params: format!("{}; violations={}", r.params, r.violations),
        bound: r.bound,
        measured: r.measured,
        sigma: 0.0,
        samples: r.cases,
        check: Check::Le,
        pass: r.pass,
        asserted: r.asserted,
    }
}

pub fn rows(seed: u64, trials: usize, eps_scale: f64, oracles: usize) -> Result<Vec<Row>> {
    anyhow::ensure!(eps_scale > 0.0, "--epsilon-scale must be positive");
    let mut out = vec![lemma1_row(trials, seed)?];
    out.extend(lemma2_rows(trials, seed, eps_scale)?);
    out.push(geometric_row(trials, seed)?);
    let corpus = distinguisher_corpus();
    for eps in [0.01, 0.05] {
        out.push(near_uniform_row(&corpus, eps)?);
    }
    for m in [4, 6] {
        for q in 1..=4 {
            out.push(preimage_row(m, q, oracles, seed)?);
        }
    }
    Ok(out.into_iter().map(to_row).collect())
}

pub fn run(common: &Common, args: &LemmaArgs) -> Result<bool> {
    let trials = common.trials.unwrap_or(500);
    let rows = rows(common.seed, trials, args.epsilon_scale, args.oracles)?;
    let params = json!({
        "trials": trials,
        "epsilon_scale": args.epsilon_scale,
        "oracles": args.oracles,
    });
    emit(common, "lemmas", params, &rows, json!(null))
}
